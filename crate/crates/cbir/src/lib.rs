//! File formats, corpus ingestion and reporting around [`cbir_core`].
//!
//! * [`corpus`] walks a `<root>/<class>/<image>` tree and featurises it,
//! * [`store`] reads and writes the binary index container,
//! * [`config`] and [`maskfile`] hold the line-oriented text formats,
//! * [`report`] and [`contact`] render evaluation tables and result pages.

pub mod config;
pub mod contact;
pub mod corpus;
pub mod error;
pub mod image_io;
pub mod maskfile;
pub mod report;
pub mod store;

pub use config::RunConfig;
pub use corpus::{build_index, featurize, BuildReport};
pub use error::{Error, Result};
pub use image_io::load_image;
pub use maskfile::{load_mask, MaskFile};
pub use store::{load_index, save_index};
