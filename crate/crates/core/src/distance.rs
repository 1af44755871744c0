//! The three per-family distances.

use crate::error::{Error, Result};

fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::LengthMismatch {
            expected: a,
            actual: b,
        })
    } else {
        Ok(())
    }
}

/// `√Σ(p_i − q_i)²`.
pub fn euclidean_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p.len(), q.len())?;
    if p.is_empty() {
        return Err(Error::LengthMismatch {
            expected: 1,
            actual: 0,
        });
    }
    Ok(libm::sqrt(
        p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(),
    ))
}

/// Histogram intersection distance `1 − Σ_k min(h1[k], h2[k])` over active bins.
///
/// Masked-out bins are dropped without renormalising the remaining ones.
pub fn histogram_distance(h1: &[f64], h2: &[f64], active: &[bool]) -> Result<f64> {
    same_len(h1.len(), h2.len())?;
    same_len(h1.len(), active.len())?;
    let overlap: f64 = h1
        .iter()
        .zip(h2)
        .zip(active)
        .filter(|(_, on)| **on)
        .map(|((a, b), _)| a.min(*b))
        .sum();
    // rounding in the overlap sum may push identical histograms a hair below zero
    Ok((1.0 - overlap).max(0.0))
}

/// Weighted dominant colour distance `Σ w_i |C1_i − C2_i|`, `w_i = (p1_i + p2_i) / 2`,
/// over active centres.
pub fn dcd_distance(
    centers1: &[f64],
    weights1: &[f64],
    centers2: &[f64],
    weights2: &[f64],
    active: &[bool],
) -> Result<f64> {
    let n = centers1.len();
    for len in [weights1.len(), centers2.len(), weights2.len(), active.len()] {
        same_len(n, len)?;
    }
    let mut sum = 0.0;
    for i in 0..n {
        if active[i] {
            let w = (weights1[i] + weights2[i]) / 2.0;
            sum += w * (centers1[i] - centers2[i]).abs();
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::{dcd_channel, DcdChannel};
    use crate::pixel::Plane;

    #[test]
    fn euclid_examples() {
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(euclidean_distance(&[1.0], &[1.0, 2.0]).is_err());
        assert!(euclidean_distance(&[], &[]).is_err());
    }

    #[test]
    fn histogram_examples() {
        let h = [0.25, 0.25, 0.5, 0.0];
        assert_eq!(histogram_distance(&h, &h, &[true; 4]).unwrap(), 0.0);
        let a = [1.0, 0.0, 0.0, 0.0];
        let b = [0.0, 0.0, 1.0, 0.0];
        assert_eq!(histogram_distance(&a, &b, &[true; 4]).unwrap(), 1.0);
        // masked bins are compared as-is
        assert_eq!(
            histogram_distance(&h, &h, &[false, false, true, false]).unwrap(),
            0.5
        );
        assert!(histogram_distance(&a, &b, &[true; 3]).is_err());
    }

    #[test]
    fn dcd_two_constant_planes() {
        let a: DcdChannel = dcd_channel(&Plane::filled(16, 16, 0.1));
        let b: DcdChannel = dcd_channel(&Plane::filled(16, 16, 0.9));
        let d = dcd_distance(&a.centers, &a.weights, &b.centers, &b.weights, &[true; 8]).unwrap();
        // partition 0: w = 0.5, |0.1 − midpoint(0)|; partition 7: w = 0.5, |midpoint(7) − 0.9|
        let want = 0.5 * (0.1f64 - 0.0625).abs() + 0.5 * (0.9375f64 - 0.9).abs();
        assert!((d - want).abs() < 1e-12);
        let same = dcd_distance(&a.centers, &a.weights, &a.centers, &a.weights, &[true; 8]).unwrap();
        assert_eq!(same, 0.0);
    }
}
