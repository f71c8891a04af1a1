//! Voice-quality perturbation measures: local jitter, local shimmer and HNR.

use crate::audio::AudioBuffer;

use super::pitch::PitchTrack;

/// Mean absolute difference between consecutive values (pairs never span two
/// runs), divided by the mean of all values. Returns 0 with fewer than one
/// consecutive pair.
pub fn local_perturbation<R: AsRef<[f64]>>(runs: &[R]) -> f64 {
    let mut diff_sum = 0.0;
    let mut pairs = 0usize;
    let mut total = 0.0;
    let mut count = 0usize;
    for run in runs {
        let run = run.as_ref();
        total += run.iter().sum::<f64>();
        count += run.len();
        for w in run.windows(2) {
            diff_sum += (w[0] - w[1]).abs();
            pairs += 1;
        }
    }
    if pairs == 0 || total <= 0.0 {
        return 0.0;
    }
    (diff_sum / pairs as f64) / (total / count as f64)
}

/// Local jitter of a single sequence of periods (seconds).
pub fn jitter_from_periods(periods: &[f64]) -> f64 {
    local_perturbation(&[periods])
}

/// Local shimmer of a single sequence of cycle peak amplitudes.
pub fn shimmer_from_amplitudes(amplitudes: &[f64]) -> f64 {
    local_perturbation(&[amplitudes])
}

/// Local jitter from the pitch track: periods `1/F0` of consecutive voiced frames.
pub fn jitter_local(track: &PitchTrack) -> f64 {
    let runs: Vec<Vec<f64>> = track
        .voiced_runs()
        .into_iter()
        .map(|r| track.f0[r].iter().map(|f| 1.0 / f).collect())
        .collect();
    local_perturbation(&runs)
}

/// Peak absolute amplitude in `[start, end)` refined by parabolic interpolation.
fn cycle_peak(x: &[f64], start: usize, end: usize) -> f64 {
    let (k, &y1) = x[start..end]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, v)| (i + start, v))
        .expect("non-empty cycle");
    let y1 = y1.abs();
    if k == 0 || k + 1 >= x.len() {
        return y1;
    }
    let (y0, y2) = (x[k - 1].abs(), x[k + 1].abs());
    let denom = y0 - 2.0 * y1 + y2;
    if denom >= 0.0 {
        return y1;
    }
    let p = 0.5 * (y0 - y2) / denom;
    y1 - 0.25 * (y0 - y2) * p
}

/// Fraction of the buffer peak that marks the first and last sounding
/// sample of a voiced run.
const ONSET_FRACTION: f64 = 0.03;

/// Segments each voiced run, trimmed to its sounding samples, into
/// consecutive glottal cycles using the local period and returns the peak
/// amplitudes per run.
pub fn cycle_amplitudes(buf: &AudioBuffer, track: &PitchTrack) -> Vec<Vec<f64>> {
    let rate = buf.sample_rate as f64;
    let n = buf.len();
    let peak = buf.peak();
    let mut out = Vec::new();
    for run in track.voiced_runs() {
        let t_start = (track.frame_times[run.start] - track.frame_hop / 2.0).max(0.0);
        let t_end = (track.frame_times[run.end - 1] + track.frame_hop / 2.0).min(n as f64 / rate);
        let (a, b) = ((t_start * rate).round() as usize, ((t_end * rate).round() as usize).min(n));
        let sounding = |i: &usize| buf.samples[*i].abs() >= ONSET_FRACTION * peak;
        let (Some(first), Some(last)) = ((a..b).find(sounding), (a..b).rev().find(sounding)) else {
            continue;
        };
        let (t_start, t_end) = (first as f64 / rate, (last + 1) as f64 / rate);
        let mut amps = Vec::new();
        let mut t = t_start;
        loop {
            let frame = (((t / track.frame_hop).floor() as usize).max(run.start)).min(run.end - 1);
            let period = 1.0 / track.f0[frame];
            if t + period > t_end {
                break;
            }
            let a = (t * rate).round() as usize;
            let b = (((t + period) * rate).round() as usize).min(n);
            if b > a {
                amps.push(cycle_peak(&buf.samples, a, b));
            }
            t += period;
        }
        if !amps.is_empty() {
            out.push(amps);
        }
    }
    out
}

/// Local shimmer over detected glottal cycles; 0 with fewer than two cycles.
pub fn shimmer_local(buf: &AudioBuffer, track: &PitchTrack) -> f64 {
    local_perturbation(&cycle_amplitudes(buf, track))
}

/// Frame HNR in dB from the normalized autocorrelation at the pitch lag.
pub fn hnr_from_correlation(r: f64) -> f64 {
    let r = r.clamp(1e-6, 1.0 - 1e-6);
    10.0 * (r / (1.0 - r)).log10()
}

/// Mean per-frame harmonics-to-noise ratio over voiced frames; 0 dB when
/// nothing is voiced.
pub fn hnr(_buf: &AudioBuffer, track: &PitchTrack) -> f64 {
    let values: Vec<f64> = track
        .strength
        .iter()
        .zip(&track.voiced)
        .filter(|(_, &v)| v)
        .map(|(&r, _)| hnr_from_correlation(r))
        .collect();
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_periods() {
        let periods: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 0.010 } else { 0.011 }).collect();
        let j = jitter_from_periods(&periods);
        assert!((j - 0.001 / 0.0105).abs() < 1e-12, "{j}");
    }

    #[test]
    fn alternating_amplitudes() {
        let amps: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { 0.8 }).collect();
        assert!((shimmer_from_amplitudes(&amps) - 0.2 / 0.9).abs() < 1e-12);
    }

    #[test]
    fn fallbacks() {
        assert_eq!(jitter_from_periods(&[0.01]), 0.0);
        assert_eq!(shimmer_from_amplitudes(&[0.5]), 0.0);
        assert_eq!(jitter_from_periods(&[]), 0.0);
        let track = PitchTrack::from_f0(vec![0.0, 200.0, 0.0], 0.01, 75.0, 600.0);
        assert_eq!(jitter_local(&track), 0.0);
    }

    #[test]
    fn pairs_do_not_span_runs() {
        // 100 Hz and 200 Hz runs are separated by an unvoiced frame.
        let track = PitchTrack::from_f0(vec![100.0, 100.0, 0.0, 200.0, 200.0], 0.01, 75.0, 600.0);
        assert_eq!(jitter_local(&track), 0.0);
    }

    #[test]
    fn hnr_mapping() {
        assert!((hnr_from_correlation(0.5)).abs() < 1e-12);
        assert!((hnr_from_correlation(0.9) - 10.0 * 9f64.log10()).abs() < 1e-12);
        assert!((hnr_from_correlation(1.0) - 60.0).abs() < 1e-3);
        let track = PitchTrack::from_f0(vec![0.0; 4], 0.01, 75.0, 600.0);
        assert_eq!(hnr(&AudioBuffer::new(vec![0.0; 10], 16_000), &track), 0.0);
    }
}
