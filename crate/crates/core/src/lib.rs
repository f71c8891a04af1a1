//! Speech and language features for clinical voice analysis.
//!
//! Audio is decoded and resampled in [`audio`], then summarised into
//! prosodic and voice-quality measures in [`acoustic`]. Transcripts parsed by
//! [`transcript`] feed the lexical, syntactic and semantic measures in
//! [`linguistic`]. [`dataset`] joins both with external scores into a
//! [`matrix::FeatureMatrix`], which [`stats`] and [`model`] analyse and
//! [`report`] writes out as a reproducible bundle.

pub mod acoustic;
pub mod audio;
pub mod dataset;
pub mod linguistic;
pub mod matrix;
pub mod model;
pub mod report;
pub mod stats;
pub mod synth;
pub mod transcript;

pub use audio::AudioBuffer;
pub use matrix::FeatureMatrix;
