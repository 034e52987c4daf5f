//! Chiral half-period frames and winding numbers of two-band driven chains.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{propagate, PropagatorRequest};
use crate::linalg::{eig, inverse, ComplexMatrix, C64, I};
use crate::models::ModelSpec;

/// Momenta scanned by [`chiral_drive_check`] for momentum-space models.
const CHECK_MOMENTA: usize = 16;

fn chiral_operator(dim: usize) -> ComplexMatrix {
    ComplexMatrix::pauli_z().repeat_diagonal(dim / 2)
}

/// `max ‖σ_z H(−t) σ_z + H(t)‖_F` over `t_samples` times in one period (and
/// a momentum grid when the model has a crystal momentum).
pub fn chiral_drive_check(model: &ModelSpec, t_samples: usize) -> Result<f64> {
    if model.dim() % 2 != 0 {
        return Err(Error::Dimension("chiral check needs an even dimension".into()));
    }
    let period = model.require_period()?;
    let models: Vec<ModelSpec> = match model.momentum() {
        Some(_) => (0..CHECK_MOMENTA)
            .map(|i| model.at_momentum(2.0 * PI * i as f64 / CHECK_MOMENTA as f64))
            .collect::<Result<_>>()?,
        None => vec![model.clone()],
    };
    let g = chiral_operator(model.dim());
    let samples = t_samples.max(1);
    let mut worst = 0.0f64;
    for m in &models {
        for i in 0..samples {
            let t = period * i as f64 / samples as f64 + 0.1234 * period / samples as f64;
            let r = &(&(&g * &m.sample(-t)) * &g) + &m.sample(t);
            worst = worst.max(r.frobenius_norm());
        }
    }
    Ok(worst)
}

/// Both chiral frames at one momentum.
#[derive(Clone, Debug, Serialize)]
pub struct ChiralFrame {
    pub k: f64,
    /// `Γ F⁻¹ Γ F` with `F = U(T, T/2)`.
    pub u1: ComplexMatrix,
    /// `F Γ F⁻¹ Γ`.
    pub u2: ComplexMatrix,
    pub heff1: ComplexMatrix,
    pub heff2: ComplexMatrix,
    /// Largest diagonal magnitude of either effective Hamiltonian.
    pub offdiag_residual: f64,
}

/// `(i/T)·V·diag(Log λ)·V⁻¹`; fails on eigenvalues at the branch cut.
pub fn effective_hamiltonian(u: &ComplexMatrix, period: f64, k: f64) -> Result<ComplexMatrix> {
    let dec = eig(u)?;
    let mut logs = Vec::with_capacity(dec.dim());
    for l in &dec.eigenvalues {
        if l.norm() < 1e-300 {
            return Err(Error::SingularPropagator { modulus: l.norm() });
        }
        if (l.arg().abs() - PI).abs() < 1e-12 {
            return Err(Error::BranchCut { k });
        }
        logs.push(I / period * l.ln());
    }
    let v_inv = inverse(&dec.vectors)?;
    Ok(&dec.vectors.scale_columns(&logs) * &v_inv)
}

pub fn half_period_frame(model: &ModelSpec, k: f64, slices: usize) -> Result<ChiralFrame> {
    let model = match model.momentum() {
        Some(_) => model.at_momentum(k)?,
        None => model.clone(),
    };
    let period = model.require_period()?;
    let f = propagate(&PropagatorRequest {
        model: &model,
        t0: period / 2.0,
        t1: period,
        slices: (slices / 2).max(1),
    })?
    .operator;
    let f_inv = inverse(&f)?;
    let g = chiral_operator(model.dim());
    let u1 = &(&(&g * &f_inv) * &g) * &f;
    let u2 = &(&(&f * &g) * &f_inv) * &g;
    let heff1 = effective_hamiltonian(&u1, period, k)?;
    let heff2 = effective_hamiltonian(&u2, period, k)?;
    let offdiag_residual = heff1
        .diagonal()
        .iter()
        .chain(heff2.diagonal().iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(ChiralFrame {
        k,
        u1,
        u2,
        heff1,
        heff2,
        offdiag_residual,
    })
}

/// `−(1/2π)·Σ Δarg q` around a closed loop of samples, i.e. `(i/2π)∮ dq/q`.
/// Returns the winding and the largest single phase step.
pub fn winding_of_loop(values: &[C64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty loop".into()));
    }
    let mut acc = 0.0;
    let mut max_step = 0.0f64;
    for i in 0..values.len() {
        let a = values[i];
        let b = values[(i + 1) % values.len()];
        let step = (b / a).arg();
        max_step = max_step.max(step.abs());
        acc += step;
    }
    Ok((-acc / (2.0 * PI), max_step))
}

#[derive(Clone, Debug, Serialize)]
pub struct WindingReport {
    #[serde(rename = "W1")]
    pub w1: i64,
    #[serde(rename = "W2")]
    pub w2: i64,
    pub nu0: f64,
    pub nu_pi: f64,
    /// Raw `−Σ Δarg q` for both frames (rad).
    pub phase_accumulations: [f64; 2],
    /// Windings of the lower-left entries, when they never vanish.
    pub lower_left_windings: [Option<i64>; 2],
    /// Both hypotheses for the lower-left entry (`q*` or `q⁻¹`) predict `−W`.
    pub lower_left_consistent: bool,
    pub min_abs_q: f64,
    pub max_offdiag_residual: f64,
    pub k_points: usize,
}

const MAX_REFINEMENTS: usize = 4;

pub fn winding_numbers(model: &ModelSpec, nk: usize, slices: usize) -> Result<WindingReport> {
    if nk < 64 {
        return Err(Error::Config(format!("winding needs at least 64 k-points, got {nk}")));
    }
    if model.momentum().is_none() || model.dim() != 2 {
        return Err(Error::Config("winding needs a two-band momentum-space model".into()));
    }
    let mut nk = nk;
    for attempt in 0..=MAX_REFINEMENTS {
        let frames: Vec<ChiralFrame> = (0..nk)
            .into_par_iter()
            .map(|i| {
                let k = 2.0 * PI * i as f64 / nk as f64;
                match half_period_frame(model, k, slices) {
                    Err(Error::BranchCut { .. }) => half_period_frame(model, k + PI / nk as f64, slices),
                    other => other,
                }
            })
            .collect::<Result<_>>()?;
        let mut q = [Vec::with_capacity(nk), Vec::with_capacity(nk)];
        let mut lower = [Vec::with_capacity(nk), Vec::with_capacity(nk)];
        let mut min_abs_q = f64::INFINITY;
        let mut max_offdiag = 0.0f64;
        for fr in &frames {
            for (slot, h) in [&fr.heff1, &fr.heff2].into_iter().enumerate() {
                let value = h[(0, 1)];
                if value.norm() < 1e-12 {
                    return Err(Error::Gapless {
                        k: fr.k,
                        modulus: value.norm(),
                    });
                }
                min_abs_q = min_abs_q.min(value.norm());
                q[slot].push(value);
                lower[slot].push(h[(1, 0)]);
            }
            max_offdiag = max_offdiag.max(fr.offdiag_residual);
        }
        let (w1, s1) = winding_of_loop(&q[0])?;
        let (w2, s2) = winding_of_loop(&q[1])?;
        if s1.max(s2) > PI / 2.0 && attempt < MAX_REFINEMENTS {
            nk *= 2;
            continue;
        }
        let round = |w: f64| -> Result<i64> {
            let r = w.round();
            if (w - r).abs() >= 1e-6 {
                return Err(Error::Domain(format!("winding {w} is not an integer")));
            }
            Ok(r as i64)
        };
        let (w1i, w2i) = (round(w1)?, round(w2)?);
        let lower_winding = |vals: &[C64]| -> Option<i64> {
            if vals.iter().any(|z| z.norm() < 1e-12) {
                return None;
            }
            winding_of_loop(vals).ok().map(|(w, _)| w.round() as i64)
        };
        let ll = [lower_winding(&lower[0]), lower_winding(&lower[1])];
        return Ok(WindingReport {
            w1: w1i,
            w2: w2i,
            nu0: (w1i + w2i) as f64 / 2.0,
            nu_pi: (w1i - w2i) as f64 / 2.0,
            phase_accumulations: [-2.0 * PI * w1, -2.0 * PI * w2],
            lower_left_consistent: ll[0] == Some(-w1i) && ll[1] == Some(-w2i),
            lower_left_windings: ll,
            min_abs_q,
            max_offdiag_residual: max_offdiag,
            k_points: nk,
        });
    }
    unreachable!("loop returns on the last attempt")
}
