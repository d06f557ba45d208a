//! Objective evaluation of mel-spectrogram speech synthesis with a focus on
//! oversmoothing.
//!
//! The pipeline runs waveform preprocessing ([`audio`]), log-mel extraction
//! ([`spectral`]), the mel-cepstrogram transform ([`cepstral`]) and the four
//! cepstral oversmoothing metrics ([`osmetrics`]). Reference/synthesis pairs
//! are scored with DTW-aligned distances and pitch measures ([`compare`]) and
//! corpora are summarized with descriptive statistics and the Mann-Whitney U
//! test ([`stats`]). [`synthlab`] generates controlled degradations for
//! checking metric behaviour without a trained model.

// `!(x > lo)` style checks reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audio;
pub mod cepstral;
pub mod compare;
mod error;
pub mod fmt;
pub mod osmetrics;
pub mod spectral;
pub mod stats;
pub mod synthlab;

pub use error::{Error, Result};
