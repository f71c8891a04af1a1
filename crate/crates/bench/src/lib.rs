//! Seeded inputs shared by the criterion benches.

use voicemark::audio::AudioBuffer;
use voicemark::dataset::FeatureManifest;
use voicemark::matrix::FeatureMatrix;
use voicemark::model::aggregate_subjects;
use voicemark::synth::{synthetic_matrix, SyntheticMatrixConfig};

pub const RATE: u32 = 16_000;

/// A two-harmonic tone with a 0.3 s gap in the middle.
pub fn voiced_clip(f0: f64, secs: f64) -> AudioBuffer {
    let n = (secs * RATE as f64) as usize;
    let gap = (n / 2 - RATE as usize * 3 / 20)..(n / 2 + RATE as usize * 3 / 20);
    let samples = (0..n)
        .map(|i| {
            if gap.contains(&i) {
                return 0.0;
            }
            let t = i as f64 / RATE as f64;
            let w = 2.0 * std::f64::consts::PI * f0 * t;
            0.6 * w.sin() + 0.2 * (2.0 * w).sin()
        })
        .collect();
    AudioBuffer::new(samples, RATE)
}

/// `n` words drawn from a `vocab`-word vocabulary by a fixed LCG, split
/// into sentences of twelve.
pub fn word_sentences(n: usize, vocab: usize) -> Vec<Vec<String>> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let words: Vec<String> = (0..n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            format!("w{}", (state >> 33) as usize % vocab)
        })
        .collect();
    words.chunks(12).map(<[String]>::to_vec).collect()
}

/// Subject-level synthetic matrix over the 82 manifest columns.
pub fn subject_matrix(seed: u64) -> FeatureMatrix {
    let x = synthetic_matrix(&SyntheticMatrixConfig { seed, ..Default::default() }, &FeatureManifest::builtin());
    aggregate_subjects(&x).expect("synthetic matrix aggregates")
}
