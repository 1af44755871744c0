//! One-level orthonormal 2-D Haar decomposition and the wavelet norm features.
//!
//! Rows are filtered first, then columns. A 1-D step maps an adjacent pair
//! `(x0, x1)` to approximation `(x0 + x1) / √2` and detail `(x0 - x1) / √2`.
//! Band naming: `LH` is row-approximation / column-detail and `HL` is
//! row-detail / column-approximation.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::pixel::{Channel, Plane, RasterImage};
use crate::stats::mean_std;

/// The four sub-bands of a single decomposition level.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarBands {
    pub ll: Plane,
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

impl HaarBands {
    /// Sum of squared coefficients across all four bands (compensated summation).
    pub fn energy(&self) -> f64 {
        crate::stats::sum_squares(
            [&self.ll, &self.lh, &self.hl, &self.hh]
                .iter()
                .flat_map(|p| p.data().iter().copied()),
        )
    }
}

/// Decomposes a plane with even dimensions into LL, LH, HL and HH.
pub fn haar_decompose(plane: &Plane) -> Result<HaarBands> {
    let (w, h) = (plane.width(), plane.height());
    if w % 2 != 0 || h % 2 != 0 || w == 0 || h == 0 {
        return Err(Error::OddDimensions {
            width: w,
            height: h,
        });
    }
    let (hw, hh) = (w / 2, h / 2);

    // row pass
    let mut low = Vec::with_capacity(hw * h);
    let mut high = Vec::with_capacity(hw * h);
    for y in 0..h {
        for pair in plane.row(y).chunks_exact(2) {
            low.push((pair[0] + pair[1]) * FRAC_1_SQRT_2);
            high.push((pair[0] - pair[1]) * FRAC_1_SQRT_2);
        }
    }

    let columns = |src: &[f64]| {
        let mut approx = Vec::with_capacity(hw * hh);
        let mut detail = Vec::with_capacity(hw * hh);
        for y in 0..hh {
            let top = &src[(2 * y) * hw..(2 * y + 1) * hw];
            let bottom = &src[(2 * y + 1) * hw..(2 * y + 2) * hw];
            for (a, b) in top.iter().zip(bottom) {
                approx.push((a + b) * FRAC_1_SQRT_2);
                detail.push((a - b) * FRAC_1_SQRT_2);
            }
        }
        (approx, detail)
    };
    let (ll, lh) = columns(&low);
    let (hl, hh_band) = columns(&high);
    let band = |data| Plane::new(hw, hh, data).expect("band size");
    Ok(HaarBands {
        ll: band(ll),
        lh: band(lh),
        hl: band(hl),
        hh: band(hh_band),
    })
}

/// Inverse of [`haar_decompose`].
pub fn haar_reconstruct(bands: &HaarBands) -> Result<Plane> {
    let (hw, hh) = (bands.ll.width(), bands.ll.height());
    for b in [&bands.lh, &bands.hl, &bands.hh] {
        if b.width() != hw || b.height() != hh {
            return Err(Error::LengthMismatch {
                expected: hw * hh,
                actual: b.width() * b.height(),
            });
        }
    }
    let (w, h) = (hw * 2, hh * 2);
    let uncolumns = |approx: &Plane, detail: &Plane| {
        let mut out = alloc::vec![0.0; hw * h];
        for y in 0..hh {
            for x in 0..hw {
                let a = approx.get(x, y);
                let d = detail.get(x, y);
                out[(2 * y) * hw + x] = (a + d) * FRAC_1_SQRT_2;
                out[(2 * y + 1) * hw + x] = (a - d) * FRAC_1_SQRT_2;
            }
        }
        out
    };
    let low = uncolumns(&bands.ll, &bands.lh);
    let high = uncolumns(&bands.hl, &bands.hh);
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..hw {
            let a = low[y * hw + x];
            let d = high[y * hw + x];
            data.push((a + d) * FRAC_1_SQRT_2);
            data.push((a - d) * FRAC_1_SQRT_2);
        }
    }
    Plane::new(w, h, data)
}

/// Per-row norms of LL (`a`), per-row norms of LH (`h`) and per-column norms of HL (`v`).
#[derive(Clone, Debug, PartialEq)]
pub struct NormVectors {
    pub a: Vec<f64>,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
}

fn row_norms(p: &Plane) -> Vec<f64> {
    (0..p.height())
        .map(|y| libm::sqrt(p.row(y).iter().map(|x| x * x).sum()))
        .collect()
}

fn column_norms(p: &Plane) -> Vec<f64> {
    let mut sums = alloc::vec![0.0; p.width()];
    for y in 0..p.height() {
        for (s, x) in sums.iter_mut().zip(p.row(y)) {
            *s += x * x;
        }
    }
    sums.into_iter().map(libm::sqrt).collect()
}

pub fn norm_vectors(bands: &HaarBands) -> NormVectors {
    NormVectors {
        a: row_norms(&bands.ll),
        h: row_norms(&bands.lh),
        v: column_norms(&bands.hl),
    }
}

/// Number of wavelet features per image.
pub const WAVELET_FEATURES: usize = 18;

/// Per channel: `mean_a, mean_h, mean_v, std_a, std_h, std_v`; channels R, G, B.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveletFeatures(pub [f64; WAVELET_FEATURES]);

impl WaveletFeatures {
    pub fn channel(&self, c: usize) -> &[f64] {
        &self.0[c * 6..c * 6 + 6]
    }
}

/// Mean and population std of the norm vectors, in feature order.
pub fn channel_wavelet_features(plane: &Plane) -> Result<[f64; 6]> {
    let norms = norm_vectors(&haar_decompose(plane)?);
    let (ma, sa) = mean_std(&norms.a);
    let (mh, sh) = mean_std(&norms.h);
    let (mv, sv) = mean_std(&norms.v);
    Ok([ma, mh, mv, sa, sh, sv])
}

pub fn wavelet_features(img: &RasterImage) -> Result<WaveletFeatures> {
    let mut out = [0.0; WAVELET_FEATURES];
    for (c, ch) in Channel::RGB.iter().enumerate() {
        out[c * 6..c * 6 + 6].copy_from_slice(&channel_wavelet_features(img.plane(*ch))?);
    }
    Ok(WaveletFeatures(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise_plane(w: usize, h: usize, seed: u64) -> Plane {
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        Plane::from_fn(w, h, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        })
    }

    #[test]
    fn constant_plane_bands() {
        let a = 0.37;
        let bands = haar_decompose(&Plane::filled(256, 256, a)).unwrap();
        assert_eq!(bands.ll.width(), 128);
        assert!(bands.ll.data().iter().all(|v| (v - 2.0 * a).abs() < 1e-14));
        for b in [&bands.lh, &bands.hl, &bands.hh] {
            assert!(b.data().iter().all(|v| *v == 0.0));
        }
        let norms = norm_vectors(&bands);
        let want = libm::sqrt(128.0 * (2.0 * a) * (2.0 * a));
        assert!(norms.a.iter().all(|v| (v - want).abs() < 1e-12));
        assert!((want - 2.0 * a * libm::sqrt(128.0)).abs() < 1e-12);
        assert!(norms.h.iter().chain(&norms.v).all(|v| *v == 0.0));
    }

    #[test]
    fn zero_plane_bands() {
        let bands = haar_decompose(&Plane::filled(8, 8, 0.0)).unwrap();
        assert_eq!(bands.energy(), 0.0);
    }

    #[test]
    fn odd_dimensions_rejected() {
        assert_eq!(
            haar_decompose(&Plane::filled(7, 8, 0.0)).unwrap_err(),
            Error::OddDimensions {
                width: 7,
                height: 8
            }
        );
    }

    #[test]
    fn three_four_five_row_norm() {
        let mut ll = alloc::vec![0.0; 128 * 128];
        ll[0] = 3.0;
        ll[1] = 4.0;
        let zero = Plane::filled(128, 128, 0.0);
        let bands = HaarBands {
            ll: Plane::new(128, 128, ll).unwrap(),
            lh: zero.clone(),
            hl: zero.clone(),
            hh: zero,
        };
        let norms = norm_vectors(&bands);
        assert_eq!(norms.a[0], 5.0);
        assert!(norms.h.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn energy_and_reconstruction() {
        for seed in 0..5 {
            let p = noise_plane(64, 32, seed);
            let bands = haar_decompose(&p).unwrap();
            let e: f64 = p.data().iter().map(|v| v * v).sum();
            assert!((bands.energy() - e).abs() < 1e-9);
            let back = haar_reconstruct(&bands).unwrap();
            for (a, b) in back.data().iter().zip(p.data()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_image_features() {
        let img = RasterImage::solid("c", 256, 256, [0.1, 0.5, 0.9]).unwrap();
        let f = wavelet_features(&img).unwrap();
        for c in 0..3 {
            let ch = f.channel(c);
            assert!(ch[1..].iter().all(|v| v.abs() < 1e-12), "{ch:?}");
        }
    }

    #[test]
    fn channel_permutation_permutes_features() {
        let r = noise_plane(256, 256, 1);
        let g = noise_plane(256, 256, 2);
        let b = noise_plane(256, 256, 3);
        let a = RasterImage::from_rgb_planes("a", r.clone(), g.clone(), b.clone()).unwrap();
        let swapped = RasterImage::from_rgb_planes("b", b, g, r).unwrap();
        let fa = wavelet_features(&a).unwrap();
        let fb = wavelet_features(&swapped).unwrap();
        assert_eq!(fa.channel(0), fb.channel(2));
        assert_eq!(fa.channel(1), fb.channel(1));
        assert_eq!(fa.channel(2), fb.channel(0));
    }

    #[test]
    fn detail_features_ignore_constant_offset() {
        let base = Plane::from_fn(256, 256, |x, y| 0.25 + 0.25 * (((x * 3 + y * 5) % 17) as f64 / 16.0));
        let shifted = Plane::new(256, 256, base.data().iter().map(|v| v + 0.3).collect()).unwrap();
        let f0 = channel_wavelet_features(&base).unwrap();
        let f1 = channel_wavelet_features(&shifted).unwrap();
        // mean_h, mean_v, std_h, std_v
        for i in [1, 2, 4, 5] {
            assert!((f0[i] - f1[i]).abs() < 1e-9, "component {i}");
        }
        assert!((f0[0] - f1[0]).abs() > 1e-3);
    }
}
