#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cbir_core::schema::{DcdWeights, FeatureVector, HIST_OFFSET, STAT_OFFSET};
use cbir_core::{ImageFeatures, ImageIndex, IndexRecord};
use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Components carrying the class signal in [`planted_index`]: three wavelet
/// statistics and two colour statistics.
pub const PLANTED: [usize; 5] = [2, 9, 15, STAT_OFFSET + 4, STAT_OFFSET + 9];

/// Uniform noise in every component, with valid histograms (dyadic bins
/// summing to 1) and DCD weights summing to 1 per channel.
pub fn noise_features(rng: &mut ChaCha8Rng) -> ImageFeatures {
    let mut vector = FeatureVector::zeros();
    let mut dcd_weights = DcdWeights::zeros();
    for v in vector.0.iter_mut() {
        *v = rng.random::<f64>();
    }
    for ch in 0..6 {
        let raw: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        for b in 0..8 {
            dcd_weights.0[ch * 8 + b] = raw[b] / total;
        }
        let mut left = 64u32;
        for b in 0..8 {
            let take = if b == 7 { left } else { rng.random_range(0..=left) };
            vector[HIST_OFFSET + ch * 8 + b] = take as f64 / 64.0;
            left -= take;
        }
    }
    ImageFeatures { vector, dcd_weights }
}

/// 4 classes x 20 images. Planted component `j` of an image in class `c`
/// is `(c + j) mod 4` plus uniform noise of width 2, so every planted
/// component separates the classes only partially and the five together
/// separate them well. All other components are noise.
pub fn planted_index(seed: u64) -> ImageIndex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for c in 0..4 {
        for i in 0..20 {
            let mut f = noise_features(&mut rng);
            for (j, &p) in PLANTED.iter().enumerate() {
                f.vector[p] = ((c + j) % 4) as f64 + 2.0 * rng.random::<f64>();
            }
            records.push(IndexRecord {
                id: format!("c{c}/{i:02}"),
                label: format!("c{c}"),
                features: f,
                source: String::new(),
            });
        }
    }
    ImageIndex::new(records).unwrap()
}

fn hsv_color(h: f64, s: f64, v: f64) -> [f64; 3] {
    let i = (h * 6.0).floor();
    let f = h * 6.0 - i;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - f * s), v * (1.0 - (1.0 - f) * s));
    match i as i64 % 6 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

fn to_u8(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// One synthetic picture: class `c` fixes hue and texture, `rng` jitters
/// colour, phase and noise.
pub fn synthetic_image(c: usize, rng: &mut ChaCha8Rng, size: u32) -> RgbImage {
    let hue = c as f64 / 10.0 + rng.random_range(-0.01..0.01);
    let base = hsv_color(hue.rem_euclid(1.0), 0.8, 0.85 + rng.random_range(-0.05..0.05));
    let dark = base.map(|x| x * 0.35);
    let phase = rng.random_range(0..16);
    RgbImage::from_fn(size, size, |x, y| {
        let (x, y) = (x as usize + phase, y as usize + phase);
        let on = match c % 5 {
            0 => true,
            1 => (x / 4) % 2 == 0,
            2 => (y / 8) % 2 == 0,
            3 => ((x / 6) + (y / 6)) % 2 == 0,
            _ => ((x + y) / 5) % 2 == 0,
        };
        let px = if on { base } else { dark };
        let n = rng.random_range(-0.02..0.02);
        Rgb(px.map(|v| to_u8(v + n)))
    })
}

/// Writes `classes` x `per_class` PNGs as `<root>/class<c>/img<i>.png`.
pub fn write_image_corpus(root: &Path, classes: usize, per_class: usize, seed: u64) -> Vec<PathBuf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut paths = Vec::new();
    for c in 0..classes {
        let dir = root.join(format!("class{c}"));
        std::fs::create_dir_all(&dir).unwrap();
        for i in 0..per_class {
            let p = dir.join(format!("img{i}.png"));
            synthetic_image(c, &mut rng, 64).save(&p).unwrap();
            paths.push(p);
        }
    }
    paths
}

/// Two colour-separated classes of three solid images each.
pub fn write_two_class_fixture(root: &Path) {
    for (label, color) in [("red", [200u8, 20, 20]), ("blue", [20u8, 20, 200])] {
        let dir = root.join(label);
        std::fs::create_dir_all(&dir).unwrap();
        for i in 0..3u8 {
            let c = color.map(|v| v.saturating_add(i * 5));
            RgbImage::from_pixel(32, 32, Rgb(c)).save(dir.join(format!("{i}.png"))).unwrap();
        }
    }
}
