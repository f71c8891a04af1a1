//! Audio ingest: RIFF/WAVE decoding, down-mixing, band-limited resampling
//! and peak normalization into the canonical [`AudioBuffer`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Target rate every recording is brought to before acoustic analysis.
pub const ANALYSIS_RATE: u32 = 16_000;

#[derive(Debug, Error, PartialEq)]
pub enum WavError {
    #[error("malformed RIFF/WAVE header: {0}")]
    MalformedHeader(String),
    #[error("unsupported codec: {0}")]
    UnsupportedCodec(String),
    #[error("truncated data chunk: header declares {declared} bytes, {available} available")]
    TruncatedData { declared: usize, available: usize },
    #[error("non-finite float sample at frame {0}")]
    NonFiniteSample(usize),
}

/// Mono sample sequence with its sampling rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        assert!(sample_rate > 0, "sample rate must be positive");
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    pub fn is_silent(&self) -> bool {
        self.samples.iter().all(|&x| x == 0.0)
    }

    /// Multiplies every sample by `gain`.
    pub fn scaled(&self, gain: f64) -> Self {
        Self::new(
            self.samples.iter().map(|x| x * gain).collect(),
            self.sample_rate,
        )
    }
}

/// Sample encodings accepted by [`decode_wav`] and produced by [`encode_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Pcm16,
    Pcm24,
    Pcm32,
    Float32,
}

impl SampleFormat {
    fn bytes(self) -> usize {
        match self {
            SampleFormat::Pcm16 => 2,
            SampleFormat::Pcm24 => 3,
            SampleFormat::Pcm32 | SampleFormat::Float32 => 4,
        }
    }

    fn format_tag(self) -> u16 {
        match self {
            SampleFormat::Float32 => 3,
            _ => 1,
        }
    }
}

/// Metadata recovered from the `fmt ` chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavInfo {
    pub channels: u16,
    pub sample_rate: u32,
    pub format: SampleFormat,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(chunk: &[u8]) -> Result<WavInfo, WavError> {
    if chunk.len() < 16 {
        return Err(WavError::MalformedHeader(format!(
            "fmt chunk is {} bytes, need at least 16",
            chunk.len()
        )));
    }
    let mut tag = u16_at(chunk, 0);
    let channels = u16_at(chunk, 2);
    let sample_rate = u32_at(chunk, 4);
    let bits = u16_at(chunk, 14);
    if tag == 0xFFFE {
        // WAVE_FORMAT_EXTENSIBLE: the real tag leads the sub-format GUID.
        if chunk.len() < 26 {
            return Err(WavError::MalformedHeader(
                "extensible fmt chunk too short".into(),
            ));
        }
        tag = u16_at(chunk, 24);
    }
    if channels == 0 {
        return Err(WavError::MalformedHeader("zero channels".into()));
    }
    if sample_rate == 0 {
        return Err(WavError::MalformedHeader("zero sample rate".into()));
    }
    let format = match (tag, bits) {
        (1, 16) => SampleFormat::Pcm16,
        (1, 24) => SampleFormat::Pcm24,
        (1, 32) => SampleFormat::Pcm32,
        (3, 32) => SampleFormat::Float32,
        (1, b) => return Err(WavError::UnsupportedCodec(format!("{b}-bit PCM"))),
        (3, b) => return Err(WavError::UnsupportedCodec(format!("{b}-bit float"))),
        (t, _) => return Err(WavError::UnsupportedCodec(format!("format tag {t:#06x}"))),
    };
    Ok(WavInfo {
        channels,
        sample_rate,
        format,
    })
}

fn read_sample(b: &[u8], format: SampleFormat) -> f64 {
    match format {
        SampleFormat::Pcm16 => i16::from_le_bytes([b[0], b[1]]) as f64 / 32_768.0,
        SampleFormat::Pcm24 => {
            let v = i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8;
            v as f64 / 8_388_608.0
        }
        SampleFormat::Pcm32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64 / 2_147_483_648.0,
        SampleFormat::Float32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
    }
}

/// Decodes a RIFF/WAVE byte stream, returning the mono down-mix and the
/// original container metadata.
pub fn decode_wav_with_info(bytes: &[u8]) -> Result<(AudioBuffer, WavInfo), WavError> {
    if bytes.len() < 12 {
        return Err(WavError::MalformedHeader("shorter than a RIFF header".into()));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(WavError::MalformedHeader(format!(
            "expected RIFF magic, found {:?}",
            String::from_utf8_lossy(&bytes[0..4])
        )));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(WavError::MalformedHeader("missing WAVE form type".into()));
    }

    let mut info = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        if id == b"fmt " {
            if body + size > bytes.len() {
                return Err(WavError::MalformedHeader("fmt chunk overruns file".into()));
            }
            info = Some(parse_fmt(&bytes[body..body + size])?);
        } else if id == b"data" {
            let info = info.ok_or_else(|| {
                WavError::MalformedHeader("data chunk precedes fmt chunk".into())
            })?;
            let available = bytes.len() - body;
            if size > available {
                return Err(WavError::TruncatedData {
                    declared: size,
                    available,
                });
            }
            let frame_bytes = info.format.bytes() * info.channels as usize;
            if !size.is_multiple_of(frame_bytes) {
                return Err(WavError::TruncatedData {
                    declared: size,
                    available: size - size % frame_bytes,
                });
            }
            let data = &bytes[body..body + size];
            let channels = info.channels as usize;
            let width = info.format.bytes();
            let mut samples = Vec::with_capacity(size / frame_bytes);
            for (i, frame) in data.chunks_exact(frame_bytes).enumerate() {
                let mut acc = 0.0;
                for ch in 0..channels {
                    let v = read_sample(&frame[ch * width..], info.format);
                    if !v.is_finite() {
                        return Err(WavError::NonFiniteSample(i));
                    }
                    acc += v.clamp(-1.0, 1.0);
                }
                samples.push(acc / channels as f64);
            }
            return Ok((AudioBuffer::new(samples, info.sample_rate), info));
        }
        // Chunks are padded to even length.
        pos = body + size + (size & 1);
    }
    if info.is_none() {
        Err(WavError::MalformedHeader("no fmt chunk".into()))
    } else {
        Err(WavError::MalformedHeader("no data chunk".into()))
    }
}

/// Decodes a RIFF/WAVE byte stream into a mono [`AudioBuffer`].
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer, WavError> {
    decode_wav_with_info(bytes).map(|(buf, _)| buf)
}

/// Encodes interleaved samples in `[-1, 1]` as a canonical RIFF/WAVE file.
pub fn encode_wav(interleaved: &[f64], channels: u16, sample_rate: u32, format: SampleFormat) -> Vec<u8> {
    let width = format.bytes();
    let data_len = interleaved.len() * width;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format.format_tag().to_le_bytes());
    out.extend_from_slice(&channels.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    let block = channels as u32 * width as u32;
    out.extend_from_slice(&(sample_rate * block).to_le_bytes());
    out.extend_from_slice(&(block as u16).to_le_bytes());
    out.extend_from_slice(&((width * 8) as u16).to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &x in interleaved {
        let x = x.clamp(-1.0, 1.0);
        match format {
            SampleFormat::Pcm16 => {
                let v = (x * 32_767.0).round() as i16;
                out.extend_from_slice(&v.to_le_bytes());
            }
            SampleFormat::Pcm24 => {
                let v = (x * 8_388_607.0).round() as i32;
                out.extend_from_slice(&v.to_le_bytes()[0..3]);
            }
            SampleFormat::Pcm32 => {
                let v = (x * 2_147_483_647.0).round() as i32;
                out.extend_from_slice(&v.to_le_bytes());
            }
            SampleFormat::Float32 => out.extend_from_slice(&(x as f32).to_le_bytes()),
        }
    }
    out
}

/// Taps per polyphase branch of the resampling filter.
pub const RESAMPLE_TAPS: usize = 64;
const KAISER_BETA: f64 = 8.6;
// Pass-band edge as a fraction of the lower Nyquist frequency.
const CUTOFF_GUARD: f64 = 0.95;
// Above this many phases the coefficient table is not precomputed.
const MAX_TABLE_PHASES: u64 = 4096;

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let q = x * x / 4.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Coefficients for one fractional delay `frac ∈ [0, 1)`, tap `j` applying
/// to input offset `j - HALF + 1`. Normalized to unit DC gain.
fn phase_coefficients(frac: f64, cutoff: f64) -> [f64; RESAMPLE_TAPS] {
    let half = (RESAMPLE_TAPS / 2) as f64;
    let norm = bessel_i0(KAISER_BETA);
    let mut h = [0.0; RESAMPLE_TAPS];
    for (j, c) in h.iter_mut().enumerate() {
        let t = j as f64 - (half - 1.0) - frac;
        let r = t / half;
        let w = if r.abs() >= 1.0 {
            0.0
        } else {
            bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / norm
        };
        *c = cutoff * sinc(cutoff * t) * w;
    }
    let sum: f64 = h.iter().sum();
    if sum.abs() > 1e-12 {
        h.iter_mut().for_each(|c| *c /= sum);
    }
    h
}

/// Polyphase windowed-sinc (Kaiser) resampling to `target_rate`.
///
/// Resampling to the buffer's own rate returns the samples unchanged.
pub fn resample(buf: &AudioBuffer, target_rate: u32) -> AudioBuffer {
    assert!(target_rate > 0, "target rate must be positive");
    if buf.sample_rate == target_rate || buf.is_empty() {
        return AudioBuffer::new(buf.samples.clone(), target_rate);
    }
    let g = gcd(buf.sample_rate as u64, target_rate as u64);
    let up = target_rate as u64 / g;
    let down = buf.sample_rate as u64 / g;
    let cutoff = CUTOFF_GUARD * (up as f64 / down as f64).min(1.0);
    let n_in = buf.samples.len() as u64;
    let n_out = (n_in * up).div_ceil(down);

    let table: Option<Vec<[f64; RESAMPLE_TAPS]>> = (up <= MAX_TABLE_PHASES).then(|| {
        (0..up)
            .map(|p| phase_coefficients(p as f64 / up as f64, cutoff))
            .collect()
    });

    let half = RESAMPLE_TAPS as i64 / 2;
    let x = &buf.samples;
    let mut out = Vec::with_capacity(n_out as usize);
    for n in 0..n_out {
        let pos = n * down;
        let base = (pos / up) as i64;
        let phase = pos % up;
        let owned;
        let h = match &table {
            Some(t) => &t[phase as usize],
            None => {
                owned = phase_coefficients(phase as f64 / up as f64, cutoff);
                &owned
            }
        };
        let mut acc = 0.0;
        for (j, c) in h.iter().enumerate() {
            let idx = base + j as i64 - (half - 1);
            if idx >= 0 && (idx as u64) < n_in {
                acc += c * x[idx as usize];
            }
        }
        out.push(acc);
    }
    AudioBuffer::new(out, target_rate)
}

/// Result of peak normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub buffer: AudioBuffer,
    /// Set when the input was all zeros and returned unchanged.
    pub silent: bool,
}

/// Divides every sample by the peak absolute amplitude.
pub fn normalize_amplitude(buf: &AudioBuffer) -> Normalized {
    let peak = buf.peak();
    if peak == 0.0 {
        return Normalized {
            buffer: buf.clone(),
            silent: true,
        };
    }
    let samples = buf.samples.iter().map(|x| x / peak).collect();
    Normalized {
        buffer: AudioBuffer::new(samples, buf.sample_rate),
        silent: false,
    }
}

/// Decode, resample to [`ANALYSIS_RATE`] and peak-normalize in one step.
pub fn load_for_analysis(bytes: &[u8]) -> Result<Normalized, WavError> {
    let buf = decode_wav(bytes)?;
    Ok(normalize_amplitude(&resample(&buf, ANALYSIS_RATE)))
}
