//! Frame-wise autocorrelation pitch tracking.
//!
//! Each 10 ms hop gets a Hann-windowed analysis frame. The autocorrelation of
//! the windowed frame is divided by the autocorrelation of the window itself,
//! which makes the normalized value at the true period close to 1 for a
//! perfectly periodic signal. The best local maximum in the admissible lag
//! range (with a small penalty on longer lags to avoid octave-down errors) is
//! refined by parabolic interpolation and accepted as voiced when it clears
//! the voicing threshold.

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PitchConfig {
    /// Lowest admissible F0 in Hz.
    pub floor: f64,
    /// Highest admissible F0 in Hz.
    pub ceiling: f64,
    /// Frame hop in seconds.
    pub hop: f64,
    /// Analysis window length in seconds.
    pub window: f64,
    /// Minimum normalized autocorrelation peak for a voiced frame.
    pub voicing_threshold: f64,
    /// Frames whose hop interval peaks below this fraction of the global peak
    /// are unvoiced.
    pub silence_threshold: f64,
    /// Strength penalty per octave of lag, favouring the shortest period.
    pub octave_cost: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            floor: 75.0,
            ceiling: 600.0,
            hop: 0.01,
            window: 0.04,
            voicing_threshold: 0.45,
            silence_threshold: 0.03,
            octave_cost: 0.01,
        }
    }
}

impl PitchConfig {
    pub fn with_range(floor: f64, ceiling: f64) -> Self {
        Self {
            floor,
            ceiling,
            ..Self::default()
        }
    }
}

/// F0 contour sampled on a constant hop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchTrack {
    /// Frame centres in seconds.
    pub frame_times: Vec<f64>,
    /// F0 in Hz per frame; 0 for unvoiced frames.
    pub f0: Vec<f64>,
    /// Normalized autocorrelation at the chosen lag (0 when unvoiced).
    pub strength: Vec<f64>,
    pub voiced: Vec<bool>,
    pub frame_hop: f64,
    pub floor: f64,
    pub ceiling: f64,
}

impl PitchTrack {
    pub fn empty(cfg: &PitchConfig) -> Self {
        Self {
            frame_times: Vec::new(),
            f0: Vec::new(),
            strength: Vec::new(),
            voiced: Vec::new(),
            frame_hop: cfg.hop,
            floor: cfg.floor,
            ceiling: cfg.ceiling,
        }
    }

    /// Builds a track directly from per-frame F0 values (0 = unvoiced).
    pub fn from_f0(f0: Vec<f64>, frame_hop: f64, floor: f64, ceiling: f64) -> Self {
        let voiced: Vec<bool> = f0.iter().map(|&f| f > 0.0).collect();
        let strength = voiced.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect();
        let frame_times = (0..f0.len()).map(|i| (i as f64 + 0.5) * frame_hop).collect();
        Self {
            frame_times,
            f0,
            strength,
            voiced,
            frame_hop,
            floor,
            ceiling,
        }
    }

    pub fn len(&self) -> usize {
        self.f0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0.is_empty()
    }

    pub fn voiced_count(&self) -> usize {
        self.voiced.iter().filter(|&&v| v).count()
    }

    pub fn voiced_fraction(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.voiced_count() as f64 / self.len() as f64
        }
    }

    /// Maximal runs of voiced frames as half-open frame index ranges.
    pub fn voiced_runs(&self) -> Vec<std::ops::Range<usize>> {
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &v) in self.voiced.iter().enumerate() {
            match (v, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push(s..i);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push(s..self.voiced.len());
        }
        runs
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos())
        .collect()
}

fn autocorrelation(a: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|lag| a[..a.len() - lag].iter().zip(&a[lag..]).map(|(x, y)| x * y).sum())
        .collect()
}

/// Samples per hop and per analysis window at the buffer's rate.
pub(crate) fn frame_geometry(rate: u32, cfg: &PitchConfig) -> (usize, usize) {
    let hop = ((cfg.hop * rate as f64).round() as usize).max(1);
    let window = ((cfg.window * rate as f64).round() as usize).max(2);
    (hop, window)
}

/// Autocorrelation pitch tracking with default settings and the given range.
pub fn detect_pitch(buf: &AudioBuffer, floor: f64, ceiling: f64) -> PitchTrack {
    detect_pitch_with(buf, &PitchConfig::with_range(floor, ceiling))
}

pub fn detect_pitch_with(buf: &AudioBuffer, cfg: &PitchConfig) -> PitchTrack {
    assert!(
        cfg.floor > 0.0 && cfg.floor < cfg.ceiling,
        "pitch floor must be positive and below the ceiling"
    );
    let rate = buf.sample_rate as f64;
    let (hop, window) = frame_geometry(buf.sample_rate, cfg);
    let n = buf.len();
    if n < window {
        return PitchTrack::empty(cfg);
    }

    let min_lag = ((rate / cfg.ceiling).floor() as usize).max(2);
    let max_lag = ((rate / cfg.floor).ceil() as usize).min(window - 2);
    if min_lag + 1 >= max_lag {
        return PitchTrack::empty(cfg);
    }

    let w = hann(window);
    let rw = autocorrelation(&w, max_lag + 1);
    let global_peak = buf.peak();
    let n_frames = n / hop;

    let mut track = PitchTrack::empty(cfg);
    track.frame_times.reserve(n_frames);
    let mut frame = vec![0.0; window];
    for i in 0..n_frames {
        let centre = i * hop + hop / 2;
        let start = centre as isize - (window / 2) as isize;
        for (j, slot) in frame.iter_mut().enumerate() {
            let idx = start + j as isize;
            let x = if idx >= 0 && (idx as usize) < n {
                buf.samples[idx as usize]
            } else {
                0.0
            };
            *slot = x * w[j];
        }
        // the frame's own hop interval must sound, not just its window
        let own = &buf.samples[i * hop..((i + 1) * hop).min(n)];
        let local_peak = own.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        track.frame_times.push((i as f64 + 0.5) * hop as f64 / rate);

        let (f0, strength) = if global_peak == 0.0 || local_peak < cfg.silence_threshold * global_peak {
            (0.0, 0.0)
        } else {
            best_candidate(&frame, &rw, min_lag, max_lag, rate, cfg)
        };
        track.f0.push(f0);
        track.strength.push(strength);
        track.voiced.push(f0 > 0.0);
    }
    track
}

/// Returns `(f0, strength)` of the best voiced candidate, or `(0, 0)`.
fn best_candidate(
    frame: &[f64],
    rw: &[f64],
    min_lag: usize,
    max_lag: usize,
    rate: f64,
    cfg: &PitchConfig,
) -> (f64, f64) {
    let ra = autocorrelation(frame, max_lag + 1);
    if ra[0] <= 0.0 {
        return (0.0, 0.0);
    }
    let r: Vec<f64> = (0..=max_lag + 1)
        .map(|lag| (ra[lag] / ra[0]) / (rw[lag] / rw[0]))
        .collect();

    let mut best: Option<(f64, f64, f64)> = None; // (score, lag, peak)
    for lag in min_lag..=max_lag {
        let (y0, y1, y2) = (r[lag - 1], r[lag], r[lag + 1]);
        if !(y1 > y0 && y1 >= y2) {
            continue;
        }
        let denom = y0 - 2.0 * y1 + y2;
        let (offset, peak) = if denom < 0.0 {
            let p = 0.5 * (y0 - y2) / denom;
            (p, y1 - 0.25 * (y0 - y2) * p)
        } else {
            (0.0, y1)
        };
        let refined = lag as f64 + offset;
        let score = peak - cfg.octave_cost * (cfg.floor * refined / rate).log2();
        if best.is_none_or(|(s, _, _)| score > s) {
            best = Some((score, refined, peak));
        }
    }
    match best {
        Some((_, lag, peak)) if peak >= cfg.voicing_threshold => {
            let f0 = rate / lag;
            if f0 >= cfg.floor && f0 <= cfg.ceiling {
                (f0, peak.min(1.0))
            } else {
                (0.0, 0.0)
            }
        }
        _ => (0.0, 0.0),
    }
}
