//! Prosodic and fluency measures: F0 statistics, intensity, zero-crossing
//! rate, pauses, phonation/articulation rates, rhythm and amplitude entropy.

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;

use super::pitch::PitchTrack;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F0Stats {
    pub mean: f64,
    pub range: f64,
    /// Population variance; always exactly `std * std`.
    pub var: f64,
    pub std: f64,
}

/// Statistics over voiced frames only; all zero when nothing is voiced.
pub fn f0_statistics(track: &PitchTrack) -> F0Stats {
    let voiced: Vec<f64> = track
        .f0
        .iter()
        .zip(&track.voiced)
        .filter(|(_, &v)| v)
        .map(|(&f, _)| f)
        .collect();
    if voiced.is_empty() {
        return F0Stats {
            mean: 0.0,
            range: 0.0,
            var: 0.0,
            std: 0.0,
        };
    }
    let n = voiced.len() as f64;
    let mean = voiced.iter().sum::<f64>() / n;
    let raw_var = voiced.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
    let max = voiced.iter().copied().fold(f64::MIN, f64::max);
    let min = voiced.iter().copied().fold(f64::MAX, f64::min);
    let std = raw_var.sqrt();
    F0Stats {
        mean,
        range: max - min,
        var: std * std,
        std,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntensityConfig {
    pub window: f64,
    pub hop: f64,
    /// RMS that maps to 0 dB.
    pub reference: f64,
    /// Level assigned to frames with RMS at or below `silence_rms`.
    pub floor_db: f64,
    pub silence_rms: f64,
}

impl Default for IntensityConfig {
    fn default() -> Self {
        Self {
            window: 0.032,
            hop: 0.01,
            reference: 1e-4,
            floor_db: -40.0,
            silence_rms: 1e-6,
        }
    }
}

/// Frame RMS levels in dB.
pub fn intensity_contour(buf: &AudioBuffer, cfg: &IntensityConfig) -> Vec<f64> {
    let rate = buf.sample_rate as f64;
    let window = ((cfg.window * rate).round() as usize).max(1);
    let hop = ((cfg.hop * rate).round() as usize).max(1);
    let x = &buf.samples;
    if x.is_empty() {
        return Vec::new();
    }
    let starts: Vec<usize> = if x.len() <= window {
        vec![0]
    } else {
        (0..=(x.len() - window) / hop).map(|i| i * hop).collect()
    };
    starts
        .into_iter()
        .map(|s| {
            let frame = &x[s..(s + window).min(x.len())];
            let rms = (frame.iter().map(|v| v * v).sum::<f64>() / frame.len() as f64).sqrt();
            if rms <= cfg.silence_rms {
                cfg.floor_db
            } else {
                (20.0 * (rms / cfg.reference).log10()).max(cfg.floor_db)
            }
        })
        .collect()
}

/// `(Intensity_mean, Intensity_std)` over frames, population std.
pub fn intensity_statistics(buf: &AudioBuffer) -> (f64, f64) {
    intensity_statistics_with(buf, &IntensityConfig::default())
}

pub fn intensity_statistics_with(buf: &AudioBuffer, cfg: &IntensityConfig) -> (f64, f64) {
    let levels = intensity_contour(buf, cfg);
    if levels.is_empty() {
        return (cfg.floor_db, 0.0);
    }
    let n = levels.len() as f64;
    let mean = levels.iter().sum::<f64>() / n;
    let var = levels.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Sign changes divided by `N - 1`; a zero sample keeps the previous sign.
pub fn zcr(samples: &[f64]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let mut prev: Option<bool> = None;
    let mut crossings = 0usize;
    for &x in samples {
        let sign = if x > 0.0 {
            Some(true)
        } else if x < 0.0 {
            Some(false)
        } else {
            prev
        };
        if let (Some(p), Some(s)) = (prev, sign) {
            if p != s {
                crossings += 1;
            }
        }
        prev = sign;
    }
    crossings as f64 / (samples.len() - 1) as f64
}

/// Samples belonging to voiced frames (each frame owns one hop of samples).
pub fn voiced_samples(buf: &AudioBuffer, track: &PitchTrack) -> Vec<f64> {
    let hop = ((track.frame_hop * buf.sample_rate as f64).round() as usize).max(1);
    let mut out = Vec::new();
    for (i, &v) in track.voiced.iter().enumerate() {
        if v {
            let a = (i * hop).min(buf.len());
            let b = ((i + 1) * hop).min(buf.len());
            out.extend_from_slice(&buf.samples[a..b]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PauseConfig {
    /// Frame length for the RMS silence decision, seconds.
    pub frame: f64,
    /// Silence threshold as a fraction of the peak amplitude.
    pub threshold: f64,
    /// Shorter silent stretches are not pauses.
    pub min_pause: f64,
}

impl Default for PauseConfig {
    fn default() -> Self {
        Self {
            frame: 0.01,
            threshold: 0.01,
            min_pause: 0.2,
        }
    }
}

/// Detected silent intervals classified by duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauseSet {
    /// Sorted, non-overlapping `(start, end)` in seconds.
    pub intervals: Vec<(f64, f64)>,
    pub short: usize,
    pub medium: usize,
    pub long: usize,
    pub mean_duration: f64,
    pub total_pause_time: f64,
}

impl PauseSet {
    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    fn from_intervals(intervals: Vec<(f64, f64)>) -> Self {
        let (mut short, mut medium, mut long) = (0, 0, 0);
        let mut total = 0.0;
        for &(a, b) in &intervals {
            let d = b - a;
            total += d;
            if d < 1.0 {
                short += 1;
            } else if d <= 2.0 {
                medium += 1;
            } else {
                long += 1;
            }
        }
        let mean_duration = if intervals.is_empty() {
            0.0
        } else {
            total / intervals.len() as f64
        };
        Self {
            intervals,
            short,
            medium,
            long,
            mean_duration,
            total_pause_time: total,
        }
    }
}

pub fn detect_pauses(buf: &AudioBuffer) -> PauseSet {
    detect_pauses_with(buf, &PauseConfig::default())
}

pub fn detect_pauses_with(buf: &AudioBuffer, cfg: &PauseConfig) -> PauseSet {
    let rate = buf.sample_rate as f64;
    let frame = ((cfg.frame * rate).round() as usize).max(1);
    let peak = buf.peak();
    let threshold = cfg.threshold * peak;
    let n = buf.len();

    let mut intervals = Vec::new();
    let mut open: Option<usize> = None;
    let mut start = 0;
    while start < n {
        let end = (start + frame).min(n);
        let seg = &buf.samples[start..end];
        let rms = (seg.iter().map(|v| v * v).sum::<f64>() / seg.len() as f64).sqrt();
        let silent = peak == 0.0 || rms < threshold;
        match (silent, open) {
            (true, None) => open = Some(start),
            (false, Some(s)) => {
                intervals.push((s, start));
                open = None;
            }
            _ => {}
        }
        start = end;
    }
    if let Some(s) = open {
        intervals.push((s, n));
    }
    let kept = intervals
        .into_iter()
        .map(|(a, b)| (a as f64 / rate, b as f64 / rate))
        .filter(|(a, b)| b - a >= cfg.min_pause - 1e-9)
        .collect();
    PauseSet::from_intervals(kept)
}

/// `(Phonation_rate, articulation_rate)` in voiced frames per second.
pub fn rates(buf: &AudioBuffer, track: &PitchTrack, pauses: &PauseSet) -> (f64, f64) {
    let duration = buf.duration();
    if duration <= 0.0 {
        return (0.0, 0.0);
    }
    let voiced = track.voiced_count() as f64;
    let phonation = voiced / duration;
    let speaking = duration - pauses.total_pause_time;
    let articulation = if speaking > 1e-12 { voiced / speaking } else { 0.0 };
    (phonation, articulation)
}

/// Normalized pairwise variability index over interval durations; 0 with
/// fewer than two intervals.
pub fn npvi(durations: &[f64]) -> f64 {
    if durations.len() < 2 {
        return 0.0;
    }
    let terms: Vec<f64> = durations
        .windows(2)
        .map(|w| {
            let m = (w[0] + w[1]) / 2.0;
            if m > 0.0 {
                (w[0] - w[1]).abs() / m
            } else {
                0.0
            }
        })
        .collect();
    100.0 * terms.iter().sum::<f64>() / terms.len() as f64
}

/// nPVI over the durations of maximal voiced runs.
pub fn pvi(track: &PitchTrack) -> f64 {
    let durations: Vec<f64> = track
        .voiced_runs()
        .into_iter()
        .map(|r| r.len() as f64 * track.frame_hop)
        .collect();
    npvi(&durations)
}

/// Shannon entropy (bits) of a `bins`-bin histogram of `|x|` over `[0, 1]`.
pub fn amplitude_entropy(samples: &[f64], bins: usize) -> f64 {
    if samples.is_empty() || bins == 0 {
        return 0.0;
    }
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let b = ((x.abs().min(1.0) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = samples.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Entropy of absolute voiced-sample amplitudes (64 bins).
pub fn speech_entropy(buf: &AudioBuffer, track: &PitchTrack) -> f64 {
    amplitude_entropy(&voiced_samples(buf, track), 64)
}
