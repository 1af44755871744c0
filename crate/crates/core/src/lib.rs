//! Feature extraction, similarity ranking and ant-colony feature selection for
//! content-based image retrieval.
//!
//! Every image is reduced to a fixed 126-component [`FeatureVector`]:
//!
//! | block     | size | source                                                        |
//! |-----------|------|---------------------------------------------------------------|
//! | wavelet   | 18   | Haar LL/LH/HL norm statistics over the R, G and B planes      |
//! | dcd       | 48   | dominant colour centres, 8 partitions over R, G, B, H, S, V   |
//! | stat      | 12   | mean and standard deviation of each of the six channels       |
//! | histogram | 48   | 8-bin normalised histogram of each of the six channels        |
//!
//! Each block is compared with its own metric (Euclidean, weighted dominant
//! colour distance, histogram intersection) and the per-group distances are
//! fused into one ranking score. [`aco`] searches for a [`FeatureMask`] that
//! keeps retrieval F-measure high with as few components as possible.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. All transcendental math goes through `libm` so results are
//! bit-identical with and without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod aco;
pub mod color;
pub mod distance;
pub mod error;
pub mod eval;
pub mod mask;
pub mod pixel;
pub mod rank;
pub mod schema;
mod stats;
pub mod wavelet;

pub use aco::{AcoConfig, AcoState, AntResult, Elitism, Selection};
pub use color::{ColorFeatures, DcdChannel};
pub use error::{Error, Result};
pub use eval::{EvalReport, QueryPolicy};
pub use mask::FeatureMask;
pub use pixel::{Channel, Plane, RasterImage};
pub use rank::{GroupWeights, ImageIndex, IndexRecord, Ranker, RetrievalResult};
pub use schema::{DcdWeights, FeatureVector, Group, ImageFeatures, FEATURE_COUNT};
pub use wavelet::{HaarBands, WaveletFeatures};
