//! Building an [`ImageIndex`] from a `<root>/<class>/<image>` directory tree.

use std::fs;
use std::path::{Path, PathBuf};

use cbir_core::schema::extract_features;
use cbir_core::{ImageFeatures, ImageIndex, IndexRecord};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image_io::{has_image_extension, load_image};

/// One corpus file that could not be featurised.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildReport {
    pub classes: usize,
    pub indexed: usize,
    /// Files without an image extension.
    pub ignored: Vec<PathBuf>,
    pub failures: Vec<Failure>,
}

/// Loads, resizes and featurises one image file.
pub fn featurize(path: &Path, id: &str) -> Result<ImageFeatures> {
    let img = load_image(path, id)?;
    extract_features(&img).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

struct Entry {
    id: String,
    label: String,
    path: PathBuf,
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        out.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

fn file_name(path: &Path) -> Option<String> {
    path.file_name().and_then(|n| n.to_str()).map(str::to_owned)
}

fn scan(root: &Path, report: &mut BuildReport) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    for class_dir in sorted_entries(root)? {
        if !class_dir.is_dir() {
            continue;
        }
        let Some(label) = file_name(&class_dir) else {
            log::warn!("skipping non-UTF-8 class directory {}", class_dir.display());
            continue;
        };
        report.classes += 1;
        for path in sorted_entries(&class_dir)? {
            if !path.is_file() {
                continue;
            }
            match file_name(&path) {
                Some(name) if has_image_extension(&path) => entries.push(Entry {
                    id: format!("{label}/{name}"),
                    label: label.clone(),
                    path,
                }),
                _ => report.ignored.push(path),
            }
        }
    }
    Ok(entries)
}

/// Featurises every image under `root` in parallel. Undecodable files are
/// logged and listed in the report; they never abort the build.
pub fn build_index(root: &Path) -> Result<(ImageIndex, BuildReport)> {
    let mut report = BuildReport::default();
    let entries = scan(root, &mut report)?;
    let results: Vec<Result<ImageFeatures>> = entries
        .par_iter()
        .map(|e| featurize(&e.path, &e.id))
        .collect();

    let mut records = Vec::with_capacity(entries.len());
    for (entry, result) in entries.into_iter().zip(results) {
        match result {
            Ok(features) => records.push(IndexRecord {
                id: entry.id,
                label: entry.label,
                features,
                source: entry.path.to_string_lossy().into_owned(),
            }),
            Err(e) => {
                log::warn!("skipping {}: {e}", entry.path.display());
                report.failures.push(Failure {
                    path: entry.path,
                    message: e.to_string(),
                });
            }
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyCorpus {
            path: root.to_path_buf(),
        });
    }
    report.indexed = records.len();
    Ok((ImageIndex::new(records)?, report))
}
