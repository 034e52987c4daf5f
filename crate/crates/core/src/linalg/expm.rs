//! Matrix exponentials.
//!
//! `expm` evaluates `exp(−i·A·dt)` by scaling and squaring: the argument is
//! halved until its 1-norm is at most 0.5, a degree-18 Taylor polynomial is
//! evaluated, and the result is squared back. At norm 0.5 the truncation
//! term is below 0.5¹⁹/19! ≈ 1.6e-23, so the accuracy is set by rounding
//! in the squaring phase alone.

use super::matrix::{ComplexMatrix, SparseRows, C64, I, ZERO};
use crate::error::{Error, Result};

const TAYLOR_DEGREE: usize = 18;
const SCALED_NORM: f64 = 0.5;

/// `exp(−i·A·dt)`.
pub fn expm(a: &ComplexMatrix, dt: f64) -> Result<ComplexMatrix> {
    if !dt.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite time step {dt}")));
    }
    a.ensure_finite()?;
    Ok(exp_general(&a.scale(-I * dt)))
}

/// `exp(X)` for an arbitrary complex matrix.
pub fn exp_general(x: &ComplexMatrix) -> ComplexMatrix {
    let norm = x.one_norm();
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as u32
    } else {
        0
    };
    let scaled = x.scale_real(0.5f64.powi(squarings as i32));
    let n = x.dim();

    // Horner: I + X(I + X/2(I + X/3(...)))
    let mut acc = ComplexMatrix::identity(n);
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = scaled.matmul(&acc).scale_real(1.0 / k as f64);
        acc.add_diagonal(C64::new(1.0, 0.0));
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    acc
}

/// Overwrites `u` (row-major, `n×n`) with `exp(−i·H·dt)·u`.
///
/// The exponential is never formed: the Taylor series is applied directly to
/// `u` through a row-compressed copy of `H`, split into substeps of norm at
/// most 0.5 and truncated once a term drops below unit roundoff.
pub(crate) fn apply_exp(h: &ComplexMatrix, dt: f64, u: &mut [C64], scratch: &mut Workspace) {
    let n = h.dim();
    let gen = SparseRows::from_dense(h, -I * dt);
    let norm = gen.one_norm();
    let substeps = if norm > SCALED_NORM {
        (norm / SCALED_NORM).ceil() as usize
    } else {
        1
    };
    let gen = if substeps > 1 {
        SparseRows::from_dense(h, -I * (dt / substeps as f64))
    } else {
        gen
    };
    scratch.resize(n * n);
    for _ in 0..substeps {
        scratch.term.copy_from_slice(u);
        for k in 1..=40 {
            gen.mul_dense(&scratch.term, &mut scratch.next);
            let inv_k = 1.0 / k as f64;
            let mut term_norm = 0.0f64;
            let mut total_norm = 0.0f64;
            for ((t, nx), acc) in scratch
                .term
                .iter_mut()
                .zip(scratch.next.iter())
                .zip(u.iter_mut())
            {
                *t = nx * inv_k;
                *acc += *t;
                term_norm = term_norm.max(t.norm());
                total_norm = total_norm.max(acc.norm());
            }
            if term_norm <= f64::EPSILON * 0.25 * total_norm.max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }
}

#[derive(Default)]
pub(crate) struct Workspace {
    term: Vec<C64>,
    next: Vec<C64>,
}

impl Workspace {
    fn resize(&mut self, len: usize) {
        if self.term.len() != len {
            self.term = vec![ZERO; len];
            self.next = vec![ZERO; len];
        }
    }
}
