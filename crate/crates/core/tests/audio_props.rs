use proptest::prelude::*;
use voicemark::audio::{decode_wav, encode_wav, normalize_amplitude, resample, AudioBuffer, SampleFormat};

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..400)
}

proptest! {
    #[test]
    fn resampling_twice_to_same_rate_is_idempotent(x in samples(), rate in prop::sample::select(vec![8_000u32, 22_050, 44_100])) {
        let once = resample(&AudioBuffer::new(x, rate), 16_000);
        let twice = resample(&once, 16_000);
        prop_assert_eq!(once.samples.len(), twice.samples.len());
        for (a, b) in once.samples.iter().zip(&twice.samples) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn normalization_is_scale_invariant(x in samples(), c in 1e-3f64..1e3) {
        let buf = AudioBuffer::new(x, 16_000);
        let a = normalize_amplitude(&buf);
        let b = normalize_amplitude(&buf.scaled(c));
        prop_assert_eq!(a.silent, b.silent);
        for (u, v) in a.buffer.samples.iter().zip(&b.buffer.samples) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
    }

    #[test]
    fn decode_resample_normalize_is_finite(
        x in samples(),
        channels in 1u16..=2,
        rate in prop::sample::select(vec![8_000u32, 16_000, 44_100]),
        format in prop::sample::select(vec![SampleFormat::Pcm16, SampleFormat::Pcm24, SampleFormat::Float32]),
    ) {
        let n = x.len() / channels as usize * channels as usize;
        let bytes = encode_wav(&x[..n], channels, rate, format);
        let buf = decode_wav(&bytes).unwrap();
        let out = normalize_amplitude(&resample(&buf, 16_000)).buffer;
        prop_assert!(out.samples.iter().all(|v| v.is_finite()));
        prop_assert!(out.peak() <= 1.0 + 1e-12);
    }
}
