//! Decoding raster files into [`RasterImage`]s.

use std::path::Path;

use cbir_core::RasterImage;
use image::{DynamicImage, ImageReader};

use crate::error::{Error, Result};

/// File extensions the corpus walker treats as images.
pub const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

pub fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

/// Decodes a PNG or JPEG at its native size. Gray sources are replicated
/// into R = G = B; alpha is dropped. 16-bit sources keep their precision.
pub fn load_image(path: &Path, id: &str) -> Result<RasterImage> {
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    let img = reader.decode().map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let raster = match img {
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => RasterImage::from_rgb16(id, w, h, img.to_rgb16().as_raw()),
        _ => RasterImage::from_rgb8(id, w, h, img.to_rgb8().as_raw()),
    };
    raster.map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
