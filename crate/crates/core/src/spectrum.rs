//! Quasienergies from one-period propagators.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{compare_complex, eig, min_cost_assignment, ComplexMatrix, C64, I};

/// Complex quasienergies and their Floquet states.
#[derive(Clone, Debug, Serialize)]
pub struct FloquetSpectrum {
    /// Sorted by real part, then imaginary part.
    pub quasienergies: Vec<C64>,
    /// Unit-normalized right eigenvectors, column `j` belongs to `quasienergies[j]`.
    pub states: ComplexMatrix,
    pub period: f64,
    pub zone_center: f64,
    pub condition_estimate: f64,
}

impl FloquetSpectrum {
    pub fn len(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quasienergies.is_empty()
    }

    pub fn zone_width(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.quasienergies.iter().map(|e| e.im.abs()).fold(0.0, f64::max)
    }

    /// Eigenvalue multipliers `e^{−iεT}`.
    pub fn multipliers(&self) -> Vec<C64> {
        self.quasienergies
            .iter()
            .map(|e| (-I * e * self.period).exp())
            .collect()
    }
}

/// Folds `x` into `(center − π/T, center + π/T]`.
pub fn fold_to_zone(x: f64, period: f64, center: f64) -> f64 {
    let width = 2.0 * PI / period;
    let half = 0.5 * width;
    let mut y = x - center;
    y -= width * ((y + half) / width).floor();
    // y is now in [−half, half); move the lower edge to the upper edge
    if y <= -half {
        y += width;
    }
    if y > half {
        y -= width;
    }
    y + center
}

/// Circular distance between real parts on a zone of the given width.
pub fn circular_distance(a: f64, b: f64, width: f64) -> f64 {
    let d = (a - b).rem_euclid(width);
    d.min(width - d)
}

/// Distance between two quasienergies with the real part taken modulo the zone.
pub fn zone_distance(a: C64, b: C64, period: f64) -> f64 {
    circular_distance(a.re, b.re, 2.0 * PI / period).hypot(a.im - b.im)
}

/// Largest pairwise distance under the optimal one-to-one matching of two
/// quasienergy multisets.
pub fn matched_max_deviation(a: &[C64], b: &[C64], period: f64) -> Result<f64> {
    let (_, dev) = match_spectra(a, b, period)?;
    Ok(dev)
}

/// Optimal matching `a[i] ↔ b[perm[i]]` and its largest distance.
pub fn match_spectra(a: &[C64], b: &[C64], period: f64) -> Result<(Vec<usize>, f64)> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "spectra of sizes {} and {} cannot be matched",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    let mut cost = Vec::with_capacity(n * n);
    for x in a {
        for y in b {
            cost.push(zone_distance(*x, *y, period));
        }
    }
    let perm = min_cost_assignment(n, &cost);
    let dev = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * n + j])
        .fold(0.0, f64::max);
    Ok((perm, dev))
}

/// `ε = (i/T)·Log λ` on the principal branch for each eigenvalue of `u`.
pub fn quasienergies(u: &ComplexMatrix, period: f64) -> Result<FloquetSpectrum> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
    }
    let dec = eig(u)?;
    let mut eps = Vec::with_capacity(dec.dim());
    for lambda in &dec.eigenvalues {
        eps.push(quasienergy_of(*lambda, period)?);
    }
    let n = eps.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| compare_complex(&eps[i], &eps[j]));
    let states = ComplexMatrix::from_fn(n, |i, j| dec.vectors[(i, order[j])]);
    Ok(FloquetSpectrum {
        quasienergies: order.iter().map(|&i| eps[i]).collect(),
        states,
        period,
        zone_center: 0.0,
        condition_estimate: dec.condition_estimate,
    })
}

/// Single multiplier to quasienergy.
pub fn quasienergy_of(lambda: C64, period: f64) -> Result<C64> {
    let modulus = lambda.norm();
    if modulus < 1e-300 || !modulus.is_finite() {
        return Err(Error::SingularPropagator { modulus });
    }
    let re = fold_to_zone(-lambda.arg() / period, period, 0.0);
    Ok(C64::new(re, modulus.ln() / period))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_zero() {
        let s = quasienergies(&ComplexMatrix::identity(1), 1.0).unwrap();
        assert!(s.quasienergies[0].norm() < 1e-15);
    }

    #[test]
    fn quarter_turn() {
        let lambda = C64::new(0.0, -PI / 2.0).exp();
        let e = quasienergy_of(lambda, 1.0).unwrap();
        assert!((e - C64::new(PI / 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn decaying_multiplier() {
        let e = quasienergy_of(C64::new(0.5, 0.0), 1.0).unwrap();
        assert!(e.re.abs() < 1e-15);
        assert!((e.im + 0.693_147_180_559_945_3).abs() < 1e-15);
    }

    #[test]
    fn branch_cut_maps_to_upper_edge() {
        let e = quasienergy_of(C64::new(-1.0, 0.0), 2.0).unwrap();
        assert!((e.re - PI / 2.0).abs() < 1e-15);
        let e = quasienergy_of(C64::new(-1.0, -0.0), 2.0).unwrap();
        assert!((e.re - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_multiplier_is_singular() {
        assert!(matches!(
            quasienergy_of(C64::new(0.0, 0.0), 1.0),
            Err(Error::SingularPropagator { .. })
        ));
    }

    #[test]
    fn folding_is_half_open() {
        let t = 1.0;
        assert!((fold_to_zone(PI, t, 0.0) - PI).abs() < 1e-15);
        assert!((fold_to_zone(-PI, t, 0.0) - PI).abs() < 1e-15);
        assert!((fold_to_zone(3.0 * PI + 0.5, t, 0.0) - (-PI + 0.5)).abs() < 1e-12);
        assert!((fold_to_zone(0.1, t, 0.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn matching_is_order_free() {
        let a = [C64::new(0.1, 0.0), C64::new(-3.1, 0.2), C64::new(2.0, -1.0)];
        let b = [C64::new(2.0, -1.0), C64::new(0.1, 0.0), C64::new(3.1 + 0.0831853, 0.2)];
        // −3.1 and 3.1831853 differ by 2π − 6.2831853 ≈ 0 on the unit-period zone
        let dev = matched_max_deviation(&a, &b, 1.0).unwrap();
        assert!(dev < 1e-6, "{dev}");
    }
}
