//! Dominant colour descriptors, channel statistics and channel histograms.

use crate::pixel::{Channel, Plane, RasterImage};
use crate::stats::mean_std;

/// Coarse partitions per channel for the dominant colour descriptor.
pub const PARTITIONS: usize = 8;
/// Histogram bins per channel.
pub const BINS: usize = 8;

/// Index of the uniform `[i/n, (i+1)/n)` cell holding `x`; the last cell is closed.
#[inline]
pub fn cell_index(x: f64, cells: usize) -> usize {
    // x * cells is exact for power-of-two cell counts, so the boundaries are exact too.
    let i = libm::floor(x * cells as f64);
    if i <= 0.0 {
        0
    } else {
        (i as usize).min(cells - 1)
    }
}

/// Dominant colours of one channel: the mean sample of each partition and
/// the fraction of pixels that fell into it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DcdChannel {
    pub centers: [f64; PARTITIONS],
    pub weights: [f64; PARTITIONS],
}

impl DcdChannel {
    /// Midpoint of partition `i`, used as the centre of an empty partition.
    pub fn midpoint(i: usize) -> f64 {
        (i as f64 + 0.5) / PARTITIONS as f64
    }
}

pub fn dcd_channel(plane: &Plane) -> DcdChannel {
    let mut sums = [0.0; PARTITIONS];
    let mut counts = [0usize; PARTITIONS];
    for &x in plane.data() {
        let i = cell_index(x, PARTITIONS);
        sums[i] += x;
        counts[i] += 1;
    }
    let total = plane.data().len() as f64;
    let mut centers = [0.0; PARTITIONS];
    let mut weights = [0.0; PARTITIONS];
    for i in 0..PARTITIONS {
        if counts[i] == 0 {
            centers[i] = DcdChannel::midpoint(i);
        } else {
            centers[i] = sums[i] / counts[i] as f64;
            weights[i] = counts[i] as f64 / total;
        }
    }
    DcdChannel { centers, weights }
}

/// `(mean, std)` for R, G, B, H, S, V, flattened as `R_m, R_s, G_m, G_s, ...`.
pub fn color_statistics(img: &RasterImage) -> [f64; 12] {
    let mut out = [0.0; 12];
    for (c, ch) in Channel::ALL.iter().enumerate() {
        let (m, s) = mean_std(img.plane(*ch).data());
        out[2 * c] = m;
        out[2 * c + 1] = s;
    }
    out
}

/// Normalised histogram over uniform bins of `[0, 1]`.
pub fn color_histogram(plane: &Plane) -> [f64; BINS] {
    let mut counts = [0usize; BINS];
    for &x in plane.data() {
        counts[cell_index(x, BINS)] += 1;
    }
    let total = plane.data().len() as f64;
    counts.map(|c| c as f64 / total)
}

/// All colour features of one image.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorFeatures {
    pub dcd: [DcdChannel; 6],
    pub stats: [f64; 12],
    pub hist: [[f64; BINS]; 6],
}

pub fn color_features(img: &RasterImage) -> ColorFeatures {
    ColorFeatures {
        dcd: Channel::ALL.map(|c| dcd_channel(img.plane(c))),
        stats: color_statistics(img),
        hist: Channel::ALL.map(|c| color_histogram(img.plane(c))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn seeded_plane(seed: u64) -> Plane {
        let mut s = seed.wrapping_mul(0x2545_F491_4F6C_DD1D) | 1;
        Plane::from_fn(256, 256, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            // hits the exact partition boundaries now and then
            if s % 97 == 0 {
                (s % 9) as f64 / 8.0
            } else {
                (s >> 11) as f64 / ((1u64 << 53) - 1) as f64
            }
        })
    }

    #[test]
    fn constant_half_plane_dcd() {
        let d = dcd_channel(&Plane::filled(256, 256, 0.5));
        assert_eq!(d.centers[4], 0.5);
        assert_eq!(d.weights[4], 1.0);
        assert_eq!(d.weights.iter().sum::<f64>(), 1.0);
        assert_eq!(d.centers[0], DcdChannel::midpoint(0));
    }

    #[test]
    fn two_level_plane_dcd() {
        let p = Plane::from_fn(256, 256, |x, _| if x < 128 { 0.1 } else { 0.9 });
        let d = dcd_channel(&p);
        assert_eq!(d.weights[0], 0.5);
        assert_eq!(d.weights[7], 0.5);
        assert!((d.centers[0] - 0.1).abs() < 1e-12);
        assert!((d.centers[7] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn dcd_matches_brute_force_binning() {
        for seed in 1..4 {
            let p = seeded_plane(seed);
            let d = dcd_channel(&p);
            for i in 0..PARTITIONS {
                let lo = i as f64 / 8.0;
                let hi = (i + 1) as f64 / 8.0;
                let members: Vec<f64> = p
                    .data()
                    .iter()
                    .copied()
                    .filter(|&x| x >= lo && (x < hi || (i == PARTITIONS - 1 && x <= hi)))
                    .collect();
                let weight = members.len() as f64 / p.data().len() as f64;
                assert_eq!(d.weights[i], weight);
                if !members.is_empty() {
                    let center = members.iter().sum::<f64>() / members.len() as f64;
                    assert_eq!(d.centers[i], center);
                    assert!(d.centers[i] >= lo && d.centers[i] <= hi);
                }
            }
            assert!((d.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn dcd_centers_are_fixed_points() {
        let d = dcd_channel(&seeded_plane(9));
        let quantized = Plane::new(
            256,
            256,
            seeded_plane(9)
                .data()
                .iter()
                .map(|&x| d.centers[cell_index(x, PARTITIONS)])
                .collect(),
        )
        .unwrap();
        let again = dcd_channel(&quantized);
        for i in 0..PARTITIONS {
            if d.weights[i] > 0.0 {
                assert!((again.centers[i] - d.centers[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn histogram_boundaries() {
        assert_eq!(
            color_histogram(&Plane::filled(256, 256, 0.0)),
            [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            color_histogram(&Plane::filled(256, 256, 1.0)),
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(color_histogram(&Plane::filled(4, 4, 0.125))[1], 1.0);
    }

    #[test]
    fn histogram_matches_brute_force_counts() {
        for seed in 1..4 {
            let p = seeded_plane(seed);
            let hist = color_histogram(&p);
            for (k, bin) in hist.iter().enumerate() {
                let lo = k as f64 / 8.0;
                let hi = (k + 1) as f64 / 8.0;
                let count = p
                    .data()
                    .iter()
                    .filter(|&&x| x >= lo && (x < hi || (k == BINS - 1 && x <= hi)))
                    .count();
                assert_eq!(*bin, count as f64 / p.data().len() as f64);
            }
            assert!((hist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gray_and_split_statistics() {
        let gray = RasterImage::solid("g", 256, 256, [0.5, 0.5, 0.5]).unwrap();
        let s = color_statistics(&gray);
        assert_eq!(s, [0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0]);

        let half = Plane::from_fn(256, 256, |_, y| if y < 128 { 0.0 } else { 1.0 });
        let img = RasterImage::from_rgb_planes("h", half.clone(), half.clone(), half).unwrap();
        let s = color_statistics(&img);
        assert_eq!((s[0], s[1]), (0.5, 0.5));
    }

    #[test]
    fn statistics_match_two_pass_oracle() {
        let img =
            RasterImage::from_rgb_planes("r", seeded_plane(4), seeded_plane(5), seeded_plane(6)).unwrap();
        let s = color_statistics(&img);
        for (c, ch) in Channel::ALL.iter().enumerate() {
            let xs = img.plane(*ch).data();
            let n = xs.len() as f64;
            let mut m = 0.0;
            for x in xs {
                m += x;
            }
            m /= n;
            let mut v = 0.0;
            for x in xs {
                v += (x - m) * (x - m);
            }
            let sd = libm::sqrt(v / n);
            assert!((s[2 * c] - m).abs() < 1e-12);
            assert!((s[2 * c + 1] - sd).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&s[2 * c]) && (0.0..=0.5).contains(&s[2 * c + 1]));
        }
    }
}
