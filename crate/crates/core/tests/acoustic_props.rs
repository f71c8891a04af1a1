use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voicemark::acoustic::{extract_acoustic, AcousticFeatures};
use voicemark::audio::AudioBuffer;

const RATE: u32 = 16_000;

/// Two harmonics with cycle-to-cycle period and amplitude perturbation,
/// followed by a pause and a second voiced stretch.
fn voice(seed: u64, f0: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for segment in 0..2 {
        let mut phase = 0.0f64;
        let mut amp: f64 = 0.6;
        let end = out.len() + (0.6 * RATE as f64) as usize;
        while out.len() < end {
            let period = 1.0 / (f0 * (1.0 + rng.random_range(-0.01..0.01)));
            let n = (period * RATE as f64).round() as usize;
            amp = (amp * (1.0 + rng.random_range(-0.03..0.03))).clamp(0.3, 0.9);
            for i in 0..n {
                let t = phase + i as f64 / n as f64;
                out.push(amp * ((2.0 * std::f64::consts::PI * t).sin() + 0.3 * (4.0 * std::f64::consts::PI * t).sin()));
            }
            phase = 0.0;
        }
        if segment == 0 {
            out.extend(vec![0.0; (0.4 * RATE as f64) as usize]);
        }
    }
    out
}

fn all(f: &AcousticFeatures) -> Vec<f64> {
    f.named().iter().map(|(_, v)| *v).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn extraction_is_deterministic_and_consistent(seed in any::<u64>(), f0 in 90.0f64..300.0) {
        let buf = AudioBuffer::new(voice(seed, f0), RATE);
        let f = extract_acoustic(&buf);
        let g = extract_acoustic(&buf);
        prop_assert_eq!(all(&f).iter().map(|v| v.to_bits()).collect::<Vec<_>>(), all(&g).iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(f.F0_var, f.F0_std * f.F0_std);
        prop_assert_eq!(f.pause_short + f.pause_medium + f.pause_long, f.pause_count);
        prop_assert!(all(&f).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn amplitude_scale_invariance(seed in any::<u64>(), f0 in 90.0f64..300.0, c in prop::sample::select(vec![0.5, 2.0])) {
        let buf = AudioBuffer::new(voice(seed, f0), RATE);
        let (f, g) = (extract_acoustic(&buf), extract_acoustic(&buf.scaled(c)));
        for ((name, a), (_, b)) in f.named().iter().zip(g.named().iter()) {
            prop_assert!((a - b).abs() <= 1e-6, "{}: {} vs {}", name, a, b);
        }
    }

    #[test]
    fn leading_silence_is_tolerated(seed in any::<u64>(), f0 in 90.0f64..300.0) {
        let x = voice(seed, f0);
        let mut shifted = vec![0.0; RATE as usize / 10];
        shifted.extend(&x);
        let f = extract_acoustic(&AudioBuffer::new(x, RATE));
        let g = extract_acoustic(&AudioBuffer::new(shifted, RATE));
        for (name, a, b) in [
            ("F0_mean", f.F0_mean, g.F0_mean),
            ("Jitter_local", f.Jitter_local, g.Jitter_local),
            ("Shimmer_local", f.Shimmer_local, g.Shimmer_local),
            ("HNR", f.HNR, g.HNR),
            ("ZCR", f.ZCR, g.ZCR),
        ] {
            prop_assert!(rel(a, b) <= 0.01, "{}: {} vs {}", name, a, b);
        }
        prop_assert!(g.pause_count >= f.pause_count && g.pause_count <= f.pause_count + 1.0);
    }
}
