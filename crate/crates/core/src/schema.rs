//! Layout of the 126-component feature vector.
//!
//! Components are stored block by block: wavelet (18), dominant colour
//! centres (48), channel statistics (12), histograms (48). Dominant colour
//! weights travel alongside the vector as [`DcdWeights`]; they feed the
//! weighted colour distance but are not features themselves.

use alloc::format;
use alloc::string::String;

use crate::color::{self, ColorFeatures, BINS, PARTITIONS};
use crate::error::Result;
use crate::pixel::{Channel, RasterImage};
use crate::wavelet::{self, WaveletFeatures, WAVELET_FEATURES};

pub const FEATURE_COUNT: usize = 126;
pub const DCD_LEN: usize = 6 * PARTITIONS;
pub const STAT_LEN: usize = 12;
pub const HIST_LEN: usize = 6 * BINS;

pub const WAVELET_OFFSET: usize = 0;
pub const DCD_OFFSET: usize = WAVELET_OFFSET + WAVELET_FEATURES;
pub const STAT_OFFSET: usize = DCD_OFFSET + DCD_LEN;
pub const HIST_OFFSET: usize = STAT_OFFSET + STAT_LEN;

const _: () = assert!(HIST_OFFSET + HIST_LEN == FEATURE_COUNT);

/// Bump whenever the component layout or extraction semantics change.
pub const SCHEMA_VERSION: u32 = 1;

const WAVELET_NAMES: [&str; 6] = [
    "LL_meanL", "LH_meanL", "HL_meanL", "LL_stdL", "LH_stdL", "HL_stdL",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Wavelet,
    Dcd,
    Stat,
    Hist,
}

/// Distance family a component is compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Min-max scaled Euclidean distance (wavelet and statistics).
    Euclidean,
    /// Weighted absolute centre difference.
    WeightedDcd,
    /// Histogram intersection.
    Intersection,
}

impl Group {
    pub fn metric(self) -> Metric {
        match self {
            Group::Wavelet | Group::Stat => Metric::Euclidean,
            Group::Dcd => Metric::WeightedDcd,
            Group::Hist => Metric::Intersection,
        }
    }

    pub fn range(self) -> core::ops::Range<usize> {
        match self {
            Group::Wavelet => WAVELET_OFFSET..DCD_OFFSET,
            Group::Dcd => DCD_OFFSET..STAT_OFFSET,
            Group::Stat => STAT_OFFSET..HIST_OFFSET,
            Group::Hist => HIST_OFFSET..FEATURE_COUNT,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Wavelet => "wavelet",
            Group::Dcd => "dcd",
            Group::Stat => "stat",
            Group::Hist => "hist",
        }
    }
}

/// Static description of one component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub index: usize,
    pub group: Group,
    pub channel: Channel,
    /// Position within the channel's block (partition, bin, or statistic slot).
    pub sub: usize,
}

impl Component {
    pub fn of(index: usize) -> Component {
        assert!(index < FEATURE_COUNT, "component {index} out of range");
        let (group, channel, sub) = if index < DCD_OFFSET {
            let i = index - WAVELET_OFFSET;
            (Group::Wavelet, Channel::RGB[i / 6], i % 6)
        } else if index < STAT_OFFSET {
            let i = index - DCD_OFFSET;
            (Group::Dcd, Channel::ALL[i / PARTITIONS], i % PARTITIONS)
        } else if index < HIST_OFFSET {
            let i = index - STAT_OFFSET;
            (Group::Stat, Channel::ALL[i / 2], i % 2)
        } else {
            let i = index - HIST_OFFSET;
            (Group::Hist, Channel::ALL[i / BINS], i % BINS)
        };
        Component {
            index,
            group,
            channel,
            sub,
        }
    }

    /// Human-readable name, e.g. `LL_meanL_G`, `DCDR4`, `S_m`, `HistV8`.
    pub fn name(&self) -> String {
        let c = self.channel.letter();
        match self.group {
            Group::Wavelet => format!("{}_{}", WAVELET_NAMES[self.sub], c),
            Group::Dcd => format!("DCD{}{}", c, self.sub + 1),
            Group::Stat => format!("{}_{}", c, if self.sub == 0 { "m" } else { "s" }),
            Group::Hist => format!("Hist{}{}", c, self.sub + 1),
        }
    }

    /// For centre components, the index of the matching weight in [`DcdWeights`].
    pub fn dcd_weight_index(&self) -> Option<usize> {
        (self.group == Group::Dcd).then(|| self.index - DCD_OFFSET)
    }
}

pub fn components() -> impl Iterator<Item = Component> {
    (0..FEATURE_COUNT).map(Component::of)
}

pub fn component_name(index: usize) -> String {
    Component::of(index).name()
}

/// Looks a component up by its [`Component::name`].
pub fn component_index(name: &str) -> Option<usize> {
    components().find(|c| c.name() == name).map(|c| c.index)
}

/// Canonical one-line description of the layout, used for schema hashing.
pub fn layout_descriptor() -> String {
    let mut s = format!("v{SCHEMA_VERSION};");
    for c in components() {
        s.push_str(&c.name());
        s.push(':');
        s.push_str(c.group.name());
        s.push(';');
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn zeros() -> Self {
        Self([0.0; FEATURE_COUNT])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn block(&self, group: Group) -> &[f64] {
        &self.0[group.range()]
    }
}

impl core::ops::Index<usize> for FeatureVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl core::ops::IndexMut<usize> for FeatureVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Pixel fractions of each dominant colour partition, aligned with the centre block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DcdWeights(pub [f64; DCD_LEN]);

impl DcdWeights {
    pub fn zeros() -> Self {
        Self([0.0; DCD_LEN])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// A feature vector together with its dominant colour weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageFeatures {
    pub vector: FeatureVector,
    pub dcd_weights: DcdWeights,
}

pub fn assemble_feature_vector(w: &WaveletFeatures, c: &ColorFeatures) -> ImageFeatures {
    let mut v = FeatureVector::zeros();
    let mut weights = DcdWeights::zeros();
    v.0[WAVELET_OFFSET..DCD_OFFSET].copy_from_slice(&w.0);
    for (ch, d) in c.dcd.iter().enumerate() {
        let at = ch * PARTITIONS;
        v.0[DCD_OFFSET + at..DCD_OFFSET + at + PARTITIONS].copy_from_slice(&d.centers);
        weights.0[at..at + PARTITIONS].copy_from_slice(&d.weights);
    }
    v.0[STAT_OFFSET..HIST_OFFSET].copy_from_slice(&c.stats);
    for (ch, h) in c.hist.iter().enumerate() {
        let at = HIST_OFFSET + ch * BINS;
        v.0[at..at + BINS].copy_from_slice(h);
    }
    ImageFeatures {
        vector: v,
        dcd_weights: weights,
    }
}

/// Full pipeline for one decoded image: preprocess, then extract every block.
pub fn extract_features(img: &RasterImage) -> Result<ImageFeatures> {
    let img = img.preprocess()?;
    let w = wavelet::wavelet_features(&img)?;
    let c = color::color_features(&img);
    Ok(assemble_feature_vector(&w, &c))
}
