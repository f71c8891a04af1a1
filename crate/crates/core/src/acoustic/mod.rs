//! Acoustic feature extraction: prosody, fluency and voice quality from a
//! mono [`AudioBuffer`].

pub mod pitch;
pub mod prosody;
pub mod voice;

use serde::{Deserialize, Serialize};

use crate::audio::{normalize_amplitude, AudioBuffer};

pub use pitch::{detect_pitch, detect_pitch_with, PitchConfig, PitchTrack};
pub use prosody::{
    detect_pauses, detect_pauses_with, f0_statistics, intensity_statistics, rates, F0Stats,
    IntensityConfig, PauseConfig, PauseSet,
};
pub use voice::{hnr, jitter_local, shimmer_local};

/// Canonical names of the columns produced by this module, in manifest order.
pub const FEATURE_NAMES: [&str; 21] = [
    "ZCR",
    "F0_mean",
    "F0_range",
    "F0_var",
    "F0_std",
    "Intensity_mean",
    "Intensity_std",
    "Jitter_local",
    "Shimmer_local",
    "HNR",
    "PVI",
    "duration",
    "Phonation_rate",
    "pause_count",
    "pause_short",
    "pause_medium",
    "pause_long",
    "pause_mean",
    "pause_speech_ratio",
    "articulation_rate",
    "speech_entropy",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcousticConfig {
    pub pitch: PitchConfig,
    pub intensity: IntensityConfig,
    pub pauses: PauseConfig,
}

impl AcousticConfig {
    pub fn with_pitch_range(floor: f64, ceiling: f64) -> Self {
        Self {
            pitch: PitchConfig::with_range(floor, ceiling),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct AcousticFeatures {
    pub ZCR: f64,
    pub F0_mean: f64,
    pub F0_range: f64,
    pub F0_var: f64,
    pub F0_std: f64,
    pub Intensity_mean: f64,
    pub Intensity_std: f64,
    pub Jitter_local: f64,
    pub Shimmer_local: f64,
    pub HNR: f64,
    pub PVI: f64,
    pub duration: f64,
    pub Phonation_rate: f64,
    pub pause_count: f64,
    pub pause_short: f64,
    pub pause_medium: f64,
    pub pause_long: f64,
    pub pause_mean: f64,
    pub pause_speech_ratio: f64,
    pub articulation_rate: f64,
    pub speech_entropy: f64,
}

impl AcousticFeatures {
    /// Values paired with their canonical names, in [`FEATURE_NAMES`] order.
    pub fn named(&self) -> [(&'static str, f64); 21] {
        let v = [
            self.ZCR,
            self.F0_mean,
            self.F0_range,
            self.F0_var,
            self.F0_std,
            self.Intensity_mean,
            self.Intensity_std,
            self.Jitter_local,
            self.Shimmer_local,
            self.HNR,
            self.PVI,
            self.duration,
            self.Phonation_rate,
            self.pause_count,
            self.pause_short,
            self.pause_medium,
            self.pause_long,
            self.pause_mean,
            self.pause_speech_ratio,
            self.articulation_rate,
            self.speech_entropy,
        ];
        std::array::from_fn(|i| (FEATURE_NAMES[i], v[i]))
    }
}

/// Full acoustic feature set with default settings.
pub fn extract_acoustic(buf: &AudioBuffer) -> AcousticFeatures {
    extract_acoustic_with(buf, &AcousticConfig::default())
}

/// Normalizes the buffer, then computes every acoustic feature. Features
/// that depend on voicing fall back to 0 when no frame is voiced.
pub fn extract_acoustic_with(buf: &AudioBuffer, cfg: &AcousticConfig) -> AcousticFeatures {
    let buf = normalize_amplitude(buf).buffer;
    let track = detect_pitch_with(&buf, &cfg.pitch);
    let f0 = f0_statistics(&track);
    let (intensity_mean, intensity_std) = prosody::intensity_statistics_with(&buf, &cfg.intensity);
    let pauses = detect_pauses_with(&buf, &cfg.pauses);
    let (phonation, articulation) = rates(&buf, &track, &pauses);
    let duration = buf.duration();
    let voiced = prosody::voiced_samples(&buf, &track);

    AcousticFeatures {
        ZCR: prosody::zcr(&voiced),
        F0_mean: f0.mean,
        F0_range: f0.range,
        F0_var: f0.var,
        F0_std: f0.std,
        Intensity_mean: intensity_mean,
        Intensity_std: intensity_std,
        Jitter_local: jitter_local(&track),
        Shimmer_local: shimmer_local(&buf, &track),
        HNR: hnr(&buf, &track),
        PVI: prosody::pvi(&track),
        duration,
        Phonation_rate: phonation,
        pause_count: pauses.count() as f64,
        pause_short: pauses.short as f64,
        pause_medium: pauses.medium as f64,
        pause_long: pauses.long as f64,
        pause_mean: pauses.mean_duration,
        pause_speech_ratio: if duration > 0.0 {
            (pauses.total_pause_time / duration).clamp(0.0, 1.0)
        } else {
            0.0
        },
        articulation_rate: articulation,
        speech_entropy: prosody::amplitude_entropy(&voiced, 64),
    }
}
