//! Selection report / mask file. Grammar in `docs/mask-format.md`.

use std::fmt::Write as _;
use std::path::Path;

use cbir_core::schema::{component_index, component_name};
use cbir_core::{FeatureMask, Group, Selection, FEATURE_COUNT};

use crate::config::RunConfig;
use crate::error::{Error, Result};

pub const FORMAT_TAG: &str = "cbir-mask 1";

/// What a mask file carries back in.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskFile {
    pub mask: FeatureMask,
    pub seed: Option<u64>,
    pub f_measure: Option<f64>,
}

/// JSON array of component names, one per line, in component order.
pub fn mask_json(mask: &FeatureMask) -> String {
    let names: Vec<String> = mask.indices().map(component_name).collect();
    let mut s = String::from("[\n");
    for (i, n) in names.iter().enumerate() {
        let sep = if i + 1 < names.len() { "," } else { "" };
        let _ = writeln!(s, "  {}{sep}", serde_json::Value::from(n.as_str()));
    }
    s.push_str("]\n");
    s
}

/// A bare mask file: header plus the `[mask]` section.
pub fn render_mask(mask: &FeatureMask) -> String {
    format!("format = {FORMAT_TAG}\nselected = {}\ntotal = {FEATURE_COUNT}\n\n[mask]\n{}", mask.count(), mask_json(mask))
}

pub fn render_selection(sel: &Selection, config: &RunConfig) -> String {
    let mask = &sel.best.mask;
    let mut s = String::new();
    let _ = writeln!(s, "format = {FORMAT_TAG}");
    let _ = writeln!(s, "seed = {}", sel.seed);
    let _ = writeln!(s, "f_measure = {}", sel.best.f_measure);
    let _ = writeln!(s, "selected = {}", mask.count());
    let _ = writeln!(s, "total = {FEATURE_COUNT}");
    for g in [Group::Wavelet, Group::Dcd, Group::Stat, Group::Hist] {
        let _ = writeln!(s, "selected_{} = {}", g.name(), mask.count_in(g));
    }
    let _ = writeln!(s, "searched = {}", sel.searched);
    s.push_str("\n[config]\n");
    s.push_str(&config.echo());
    s.push_str("\n[history]\n# iteration best_f iteration_best_f mean_f mean_size\n");
    for h in &sel.history {
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            h.iteration, h.best_f, h.iteration_best_f, h.mean_f, h.mean_size
        );
    }
    s.push_str("\n[mask]\n");
    s.push_str(&mask_json(mask));
    s
}

pub fn parse_mask_file(text: &str, path: &Path) -> Result<MaskFile> {
    let mut format = None;
    let mut seed = None;
    let mut f_measure = None;
    let mut section = "";
    let mut mask_start = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "[mask]" {
            mask_start = Some(n + 1);
            break;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = if line == "[config]" || line == "[history]" {
                line
            } else {
                return Err(Error::parse(path, n + 1, format!("unknown section {line}")));
            };
            continue;
        }
        if !section.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::parse(path, n + 1, format!("expected `key = value`, got {line:?}")));
        };
        let (k, v) = (k.trim(), v.trim());
        let bad = |what: &str| Error::parse(path, n + 1, format!("{k}: invalid {what} {v:?}"));
        match k {
            "format" => format = Some(v.to_string()),
            "seed" => seed = Some(v.parse().map_err(|_| bad("seed"))?),
            "f_measure" => f_measure = Some(v.parse().map_err(|_| bad("number"))?),
            _ => {}
        }
    }
    match format.as_deref() {
        Some(FORMAT_TAG) => {}
        Some(other) => return Err(Error::parse(path, 1, format!("unsupported mask format {other:?}"))),
        None => return Err(Error::parse(path, 1, "missing `format` line")),
    }
    let start = mask_start.ok_or_else(|| Error::parse(path, text.lines().count(), "missing [mask] section"))?;
    let body: String = text.lines().skip(start).collect::<Vec<_>>().join("\n");
    let names: Vec<String> = serde_json::from_str(&body)
        .map_err(|e| Error::parse(path, start + e.line(), format!("mask array: {e}")))?;
    let mut indices = Vec::with_capacity(names.len());
    for name in &names {
        let i = component_index(name)
            .ok_or_else(|| Error::parse(path, start, format!("unknown component {name:?}")))?;
        indices.push(i);
    }
    let mask = FeatureMask::from_indices(indices)?;
    if mask.is_empty() {
        return Err(Error::Core(cbir_core::Error::EmptyMask));
    }
    Ok(MaskFile { mask, seed, f_measure })
}

pub fn load_mask(path: &Path) -> Result<MaskFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mask_file(&text, path)
}
