//! Mask-aware distance fusion and exhaustive top-K retrieval.
//!
//! Three families contribute to the ranking score:
//!
//! * wavelet + statistics: Euclidean distance over components scaled by their
//!   index-wide min-max range,
//! * dominant colours: weighted centre distance, summed over channels,
//! * histograms: intersection distance per channel, summed over channels.
//!
//! The fused score is `Σ λ_g D_g / Σ λ_g` over the families that have at
//! least one active component.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::color::BINS;
use crate::error::{Error, Result};
use crate::mask::FeatureMask;
use crate::schema::{
    Group, ImageFeatures, DCD_OFFSET, FEATURE_COUNT, HIST_OFFSET,
};

#[derive(Clone, Debug, PartialEq)]
pub struct IndexRecord {
    /// `<class>/<file name>`.
    pub id: String,
    pub label: String,
    pub features: ImageFeatures,
    /// Where the image was read from; informational only.
    pub source: String,
}

/// Immutable collection of featurised images, sorted by id.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageIndex {
    records: Vec<IndexRecord>,
}

impl ImageIndex {
    pub fn new(mut records: Vec<IndexRecord>) -> Result<Self> {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in records.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateImage(pair[0].id.clone()));
            }
        }
        for r in &records {
            let bad = r
                .features
                .vector
                .0
                .iter()
                .position(|v| !v.is_finite())
                .or_else(|| {
                    r.features
                        .dcd_weights
                        .0
                        .iter()
                        .position(|v| !v.is_finite())
                        .map(|i| i + DCD_OFFSET)
                });
            if let Some(component) = bad {
                return Err(Error::NonFiniteFeature {
                    id: r.id.clone(),
                    component,
                });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[IndexRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.records.binary_search_by(|r| r.id.as_str().cmp(id)).ok()
    }

    /// Record indices per class label, labels in sorted order.
    pub fn classes(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut out: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.records.iter().enumerate() {
            out.entry(r.label.as_str()).or_default().push(i);
        }
        out
    }

    pub fn class_size(&self, label: &str) -> usize {
        self.records.iter().filter(|r| r.label == label).count()
    }
}

/// Relative importance `λ_g` of each distance family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupWeights {
    pub wavelet_stat: f64,
    pub dcd: f64,
    pub hist: f64,
}

impl Default for GroupWeights {
    fn default() -> Self {
        Self {
            wavelet_stat: 1.0,
            dcd: 1.0,
            hist: 1.0,
        }
    }
}

impl GroupWeights {
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            wavelet_stat: self.wavelet_stat * factor,
            dcd: self.dcd * factor,
            hist: self.hist * factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_wavelet_stat", self.wavelet_stat),
            ("lambda_dcd", self.dcd),
            ("lambda_hist", self.hist),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(alloc::format!(
                    "{name} must be a finite non-negative number, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-component inverse min-max range for the Euclidean family.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupScales {
    inv_range: [f64; FEATURE_COUNT],
}

impl GroupScales {
    /// No rescaling.
    pub fn unit() -> Self {
        Self {
            inv_range: [1.0; FEATURE_COUNT],
        }
    }

    /// Index-wide min-max of every wavelet and statistics component. A
    /// component that is constant over the index gets scale 0.
    pub fn from_index(index: &ImageIndex) -> Self {
        let mut inv_range = [1.0; FEATURE_COUNT];
        for i in euclidean_components() {
            let (lo, hi) = index
                .records
                .iter()
                .map(|r| r.features.vector[i])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            let range = hi - lo;
            inv_range[i] = if range > 0.0 && range.is_finite() {
                1.0 / range
            } else {
                0.0
            };
        }
        Self { inv_range }
    }

    pub fn inv_range(&self, component: usize) -> f64 {
        self.inv_range[component]
    }
}

fn euclidean_components() -> impl Iterator<Item = usize> {
    Group::Wavelet.range().chain(Group::Stat.range())
}

/// Per-family distances; `None` when the family has no active component.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GroupDistances {
    pub wavelet_stat: Option<f64>,
    pub dcd: Option<f64>,
    pub hist: Option<f64>,
}

/// A mask resolved into per-family component lists and normalised weights.
#[derive(Clone, Debug)]
pub struct MaskPlan {
    euclid: Vec<usize>,
    dcd: Vec<usize>,
    hist: Vec<(usize, Vec<usize>)>,
    lambda: [f64; 3],
}

impl MaskPlan {
    pub fn new(mask: &FeatureMask, weights: &GroupWeights) -> Result<Self> {
        mask.require_nonempty()?;
        let euclid: Vec<usize> = euclidean_components().filter(|i| mask.contains(*i)).collect();
        let dcd: Vec<usize> = Group::Dcd.range().filter(|i| mask.contains(*i)).collect();
        let mut hist = Vec::new();
        for ch in 0..6 {
            let start = HIST_OFFSET + ch * BINS;
            let bins: Vec<usize> = (start..start + BINS).filter(|i| mask.contains(*i)).collect();
            if !bins.is_empty() {
                hist.push((ch, bins));
            }
        }
        let raw = [
            if euclid.is_empty() { 0.0 } else { weights.wavelet_stat },
            if dcd.is_empty() { 0.0 } else { weights.dcd },
            if hist.is_empty() { 0.0 } else { weights.hist },
        ];
        let total: f64 = raw.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidConfig(
                "every group with active components has zero weight".to_string(),
            ));
        }
        Ok(Self {
            euclid,
            dcd,
            hist,
            lambda: raw.map(|w| w / total),
        })
    }

    /// Fused distance and the per-family parts.
    pub fn distance(
        &self,
        q: &ImageFeatures,
        x: &ImageFeatures,
        scales: &GroupScales,
    ) -> (f64, GroupDistances) {
        let mut parts = GroupDistances::default();
        let mut total = 0.0;
        if !self.euclid.is_empty() {
            let mut sq = 0.0;
            for &i in &self.euclid {
                let d = (q.vector[i] - x.vector[i]) * scales.inv_range[i];
                sq += d * d;
            }
            let d = libm::sqrt(sq);
            parts.wavelet_stat = Some(d);
            total += self.lambda[0] * d;
        }
        if !self.dcd.is_empty() {
            let mut d = 0.0;
            for &i in &self.dcd {
                let wi = i - DCD_OFFSET;
                let w = (q.dcd_weights.0[wi] + x.dcd_weights.0[wi]) / 2.0;
                d += w * (q.vector[i] - x.vector[i]).abs();
            }
            parts.dcd = Some(d);
            total += self.lambda[1] * d;
        }
        if !self.hist.is_empty() {
            let mut d = 0.0;
            for (_, bins) in &self.hist {
                let overlap: f64 = bins.iter().map(|&i| q.vector[i].min(x.vector[i])).sum();
                d += (1.0 - overlap).max(0.0);
            }
            parts.hist = Some(d);
            total += self.lambda[2] * d;
        }
        (total, parts)
    }
}

/// Fused distance between two images under `mask`.
pub fn aggregate_distance(
    q: &ImageFeatures,
    x: &ImageFeatures,
    mask: &FeatureMask,
    scales: &GroupScales,
    weights: &GroupWeights,
) -> Result<(f64, GroupDistances)> {
    Ok(MaskPlan::new(mask, weights)?.distance(q, x, scales))
}

/// One ranked database image.
#[derive(Clone, Debug, PartialEq)]
pub struct Hit {
    pub id: String,
    pub label: String,
    pub distance: f64,
    pub groups: GroupDistances,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetrievalResult {
    pub query_id: String,
    /// Requested result count.
    pub k: usize,
    /// Set when fewer than `k` candidates were available.
    pub truncated: bool,
    pub hits: Vec<Hit>,
}

/// What to search with.
#[derive(Clone, Copy, Debug)]
pub enum Query<'q> {
    /// An image already in the index; it is excluded from its own results.
    Indexed(&'q str),
    /// Features of an image from outside the index.
    External {
        id: &'q str,
        features: &'q ImageFeatures,
    },
}

/// Scores queries against one index with fixed scaling and family weights.
#[derive(Clone, Debug)]
pub struct Ranker<'a> {
    index: &'a ImageIndex,
    scales: GroupScales,
    weights: GroupWeights,
}

impl<'a> Ranker<'a> {
    pub fn new(index: &'a ImageIndex, weights: GroupWeights) -> Self {
        Self {
            index,
            scales: GroupScales::from_index(index),
            weights,
        }
    }

    pub fn index(&self) -> &'a ImageIndex {
        self.index
    }

    pub fn scales(&self) -> &GroupScales {
        &self.scales
    }

    pub fn weights(&self) -> &GroupWeights {
        &self.weights
    }

    pub fn plan(&self, mask: &FeatureMask) -> Result<MaskPlan> {
        self.weights.validate()?;
        MaskPlan::new(mask, &self.weights)
    }

    /// The `k` nearest records as `(record index, distance)`, ascending,
    /// ties broken by id. `exclude` drops one record (the query itself).
    pub fn nearest(
        &self,
        query: &ImageFeatures,
        exclude: Option<usize>,
        plan: &MaskPlan,
        k: usize,
    ) -> Vec<(usize, f64)> {
        let mut scored: Vec<(usize, f64)> = self
            .index
            .records
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != exclude)
            .map(|(i, r)| (i, plan.distance(query, &r.features, &self.scales).0))
            .collect();
        // Records are sorted by id, so the record index doubles as the id tie-breaker.
        let by_key = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
        if k < scored.len() {
            scored.select_nth_unstable_by(k, by_key);
            scored.truncate(k);
        }
        scored.sort_unstable_by(by_key);
        scored
    }

    pub fn retrieve(&self, query: Query<'_>, mask: &FeatureMask, k: usize) -> Result<RetrievalResult> {
        let plan = self.plan(mask)?;
        let (query_id, features, exclude) = match query {
            Query::Indexed(id) => {
                let pos = self
                    .index
                    .position(id)
                    .ok_or_else(|| Error::UnknownImage(id.to_string()))?;
                (id, &self.index.records[pos].features, Some(pos))
            }
            Query::External { id, features } => (id, features, None),
        };
        let available = self.index.len() - usize::from(exclude.is_some());
        let hits = self
            .nearest(features, exclude, &plan, k)
            .into_iter()
            .map(|(i, _)| {
                let r = &self.index.records[i];
                let (distance, groups) = plan.distance(features, &r.features, &self.scales);
                Hit {
                    id: r.id.clone(),
                    label: r.label.clone(),
                    distance,
                    groups,
                }
            })
            .collect();
        Ok(RetrievalResult {
            query_id: query_id.to_string(),
            k,
            truncated: k > available,
            hits,
        })
    }
}

/// Convenience wrapper: default family weights, query taken from the index.
pub fn retrieve_top_k(
    index: &ImageIndex,
    query_id: &str,
    mask: &FeatureMask,
    k: usize,
) -> Result<RetrievalResult> {
    Ranker::new(index, GroupWeights::default()).retrieve(Query::Indexed(query_id), mask, k)
}
