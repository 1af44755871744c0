//! Binary index container. The byte layout is described in `docs/index-format.md`.

use std::fs;
use std::path::Path;

use cbir_core::schema::{component_name, layout_descriptor, DcdWeights, FeatureVector, DCD_LEN};
use cbir_core::{ImageFeatures, ImageIndex, IndexRecord, FEATURE_COUNT};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"CBIRIDX\0";
pub const FORMAT_VERSION: u32 = 1;
const CHECKSUM_LEN: usize = 32;
const HEADER_LEN: usize = 8 + 4 + 8 + 4 + 4 + 8;

/// First eight bytes (little-endian) of the SHA-256 of the feature layout descriptor.
pub fn schema_hash() -> u64 {
    let digest = Sha256::digest(layout_descriptor().as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest length"))
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

pub fn encode_index(index: &ImageIndex) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + index.len() * (FEATURE_COUNT + DCD_LEN + 8) * 8);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&schema_hash().to_le_bytes());
    out.extend_from_slice(&(FEATURE_COUNT as u32).to_le_bytes());
    out.extend_from_slice(&(DCD_LEN as u32).to_le_bytes());
    out.extend_from_slice(&(index.len() as u64).to_le_bytes());
    for r in index.records() {
        put_str(&mut out, &r.id);
        put_str(&mut out, &r.label);
        put_str(&mut out, &r.source);
        for v in r.features.vector.as_slice().iter().chain(r.features.dcd_weights.as_slice()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let checksum = Sha256::digest(&out);
    out.extend_from_slice(&checksum);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn corrupt(&self, message: impl Into<String>) -> Error {
        Error::Corrupt {
            path: self.path.to_path_buf(),
            message: message.into(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.bytes.len());
        let end = end.ok_or_else(|| self.corrupt(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| self.corrupt("string is not UTF-8"))
    }
}

pub fn decode_index(bytes: &[u8], path: &Path) -> Result<ImageIndex> {
    let mut r = Reader { bytes, pos: 0, path };
    if r.take(MAGIC.len()).ok() != Some(&MAGIC[..]) {
        return Err(r.corrupt("bad magic bytes"));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            path: path.to_path_buf(),
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    if bytes.len() < HEADER_LEN + CHECKSUM_LEN {
        return Err(r.corrupt("file shorter than header"));
    }
    let (body, checksum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
    if Sha256::digest(body)[..] != checksum[..] {
        return Err(r.corrupt("checksum mismatch (truncated or modified)"));
    }
    r.bytes = body;

    let hash = r.u64()?;
    if hash != schema_hash() {
        return Err(Error::SchemaMismatch {
            path: path.to_path_buf(),
            found: hash,
            expected: schema_hash(),
        });
    }
    let (features, weights) = (r.u32()? as usize, r.u32()? as usize);
    if features != FEATURE_COUNT || weights != DCD_LEN {
        return Err(r.corrupt(format!(
            "record shape {features}+{weights} does not match {FEATURE_COUNT}+{DCD_LEN}"
        )));
    }
    let count = r.u64()?;
    let mut records = Vec::new();
    for _ in 0..count {
        let id = r.string()?;
        let label = r.string()?;
        let source = r.string()?;
        let mut vector = FeatureVector::zeros();
        for v in vector.0.iter_mut() {
            *v = r.f64()?;
        }
        let mut dcd_weights = DcdWeights::zeros();
        for v in dcd_weights.0.iter_mut() {
            *v = r.f64()?;
        }
        records.push(IndexRecord {
            id,
            label,
            features: ImageFeatures { vector, dcd_weights },
            source,
        });
    }
    if r.pos != body.len() {
        return Err(r.corrupt(format!("{} trailing bytes after last record", body.len() - r.pos)));
    }
    let sorted = records.windows(2).all(|w| w[0].id < w[1].id);
    if !sorted {
        return Err(r.corrupt("records are not sorted by id"));
    }
    ImageIndex::new(records).map_err(|e| r.corrupt(e.to_string()))
}

pub fn save_index(index: &ImageIndex, path: &Path) -> Result<()> {
    fs::write(path, encode_index(index)).map_err(|e| Error::io(path, e))
}

pub fn load_index(path: &Path) -> Result<ImageIndex> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_index(&bytes, path)
}

/// Human-readable dump; not read back.
pub fn index_to_json(index: &ImageIndex) -> serde_json::Value {
    let records: Vec<_> = index
        .records()
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "label": r.label,
                "source": r.source,
                "features": r.features.vector.as_slice(),
                "dcd_weights": r.features.dcd_weights.as_slice(),
            })
        })
        .collect();
    json!({
        "format_version": FORMAT_VERSION,
        "schema_hash": format!("{:016x}", schema_hash()),
        "components": (0..FEATURE_COUNT).map(component_name).collect::<Vec<_>>(),
        "records": records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index(n: usize) -> ImageIndex {
        let records = (0..n)
            .map(|i| {
                let mut f = ImageFeatures {
                    vector: FeatureVector::zeros(),
                    dcd_weights: DcdWeights::zeros(),
                };
                for (k, v) in f.vector.0.iter_mut().enumerate() {
                    *v = ((i * 131 + k * 7) % 97) as f64 / 97.0 + 1e-17 * k as f64;
                }
                f.dcd_weights.0[i % DCD_LEN] = 1.0;
                IndexRecord {
                    id: format!("c{}/img{i:03}.png", i % 3),
                    label: format!("c{}", i % 3),
                    features: f,
                    source: format!("/data/c{}/img{i:03}.png", i % 3),
                }
            })
            .collect();
        ImageIndex::new(records).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let idx = index(6);
        let bytes = encode_index(&idx);
        assert_eq!(decode_index(&bytes, Path::new("mem")).unwrap(), idx);
        assert_eq!(encode_index(&idx), bytes);
    }

    #[test]
    fn flipped_magic_is_corrupt() {
        let mut bytes = encode_index(&index(3));
        bytes[0] ^= 0xff;
        assert!(matches!(decode_index(&bytes, Path::new("x")), Err(Error::Corrupt { .. })));
    }

    #[test]
    fn every_truncation_is_corrupt() {
        let bytes = encode_index(&index(2));
        for len in 0..bytes.len() {
            let err = decode_index(&bytes[..len], Path::new("t")).unwrap_err();
            assert!(matches!(err, Error::Corrupt { .. }), "length {len}: {err}");
        }
    }

    #[test]
    fn version_mismatch_names_both_versions() {
        let mut bytes = encode_index(&index(2));
        bytes[8..12].copy_from_slice(&7u32.to_le_bytes());
        let err = decode_index(&bytes, Path::new("v")).unwrap_err();
        assert!(matches!(err, Error::VersionMismatch { found: 7, supported: 1, .. }));
        let msg = err.to_string();
        assert!(msg.contains('7') && msg.contains('1'), "{msg}");
    }

    #[test]
    fn payload_bit_flip_is_caught() {
        let mut bytes = encode_index(&index(2));
        let mid = bytes.len() / 2;
        bytes[mid] ^= 1;
        assert!(matches!(decode_index(&bytes, Path::new("f")), Err(Error::Corrupt { .. })));
    }

    #[test]
    fn json_export_lists_components() {
        let v = index_to_json(&index(1));
        assert_eq!(v["components"].as_array().unwrap().len(), FEATURE_COUNT);
        assert_eq!(v["records"][0]["features"].as_array().unwrap().len(), FEATURE_COUNT);
    }
}
