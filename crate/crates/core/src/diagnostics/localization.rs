use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig, ComplexMatrix, C64, ZERO};
use crate::spectrum::{zone_distance, FloquetSpectrum};

/// Degeneracy tolerance for [`disentangled_localization`].
pub const CLUSTER_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationReport {
    /// `I_j = Σ|ψ_j|⁴ − 1/N` per column, after unit normalization.
    pub factors: Vec<f64>,
    pub ipr: Vec<f64>,
    pub dimension: usize,
    /// Set when some input column was not unit-normalized.
    pub renormalized: bool,
}

pub fn localization_factor(states: &ComplexMatrix) -> Result<LocalizationReport> {
    let n = states.dim();
    let mut factors = Vec::with_capacity(n);
    let mut ipr = Vec::with_capacity(n);
    let mut renormalized = false;
    for j in 0..n {
        let col = states.column(j);
        let p = column_ipr(&col).ok_or(Error::InvalidState(j))?;
        let norm2: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        renormalized |= (norm2 - 1.0).abs() > 1e-12;
        ipr.push(p);
        factors.push(p - 1.0 / n as f64);
    }
    Ok(LocalizationReport {
        factors,
        ipr,
        dimension: n,
        renormalized,
    })
}

fn column_ipr(col: &[C64]) -> Option<f64> {
    let norm2: f64 = col.iter().map(|z| z.norm_sqr()).sum();
    if !(norm2 > 0.0) || !norm2.is_finite() {
        return None;
    }
    Some(col.iter().map(|z| (z.norm_sqr() / norm2).powi(2)).sum())
}

/// Localization factors with near-degenerate clusters resolved.
///
/// Inside a cluster of quasienergies closer than `tol` any combination of the
/// eigenvectors is an eigenvector, so the columns returned by the solver are
/// an arbitrary mixture. The cluster subspace is re-expressed in the
/// eigenbasis of the position operator restricted to it, which separates
/// states sitting at opposite ends of the chain.
pub fn disentangled_localization(spectrum: &FloquetSpectrum, positions: &[f64], tol: f64) -> Result<Vec<f64>> {
    let states = &spectrum.states;
    let n = states.dim();
    if positions.len() != n {
        return Err(Error::Dimension(format!(
            "{} positions for {} basis states",
            positions.len(),
            n
        )));
    }
    let base = localization_factor(states)?.factors;
    let mut out = base.clone();
    let mut used = vec![false; n];
    let e = &spectrum.quasienergies;
    for i in 0..n {
        if used[i] {
            continue;
        }
        let cluster: Vec<usize> = (i..n)
            .filter(|&j| !used[j] && zone_distance(e[i], e[j], spectrum.period) < tol)
            .collect();
        for &j in &cluster {
            used[j] = true;
        }
        if cluster.len() < 2 {
            continue;
        }
        let basis = orthonormal_basis(&cluster.iter().map(|&j| states.column(j)).collect::<Vec<_>>());
        let k = basis.len();
        if k == 0 {
            continue;
        }
        let x = ComplexMatrix::from_fn(k, |a, b| {
            basis[a]
                .iter()
                .zip(&basis[b])
                .zip(positions)
                .map(|((u, v), x)| u.conj() * v * *x)
                .sum()
        });
        let rot = eig(&x)?;
        for (slot, &j) in cluster.iter().take(k).enumerate() {
            let mut v = vec![ZERO; n];
            for (c, b) in basis.iter().enumerate() {
                let coef = rot.vectors[(c, slot)];
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += coef * bi;
                }
            }
            out[j] = column_ipr(&v).ok_or(Error::InvalidState(j))? - 1.0 / n as f64;
        }
    }
    Ok(out)
}

/// Modified Gram-Schmidt with reorthogonalization; drops numerically dependent vectors.
fn orthonormal_basis(vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        let start: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for _ in 0..2 {
            for b in &basis {
                let dot: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= dot * bi;
                }
            }
        }
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 * start {
            basis.push(w.iter().map(|z| z / norm).collect());
        }
    }
    basis
}
