//! General complex eigendecomposition.
//!
//! Pipeline: diagonal balancing, Householder reduction to upper Hessenberg
//! form, single-shift complex QR iteration (Wilkinson shifts, Givens
//! rotations, exceptional shifts every ten stalled sweeps) to Schur form,
//! then eigenvectors by back-substitution on the triangular factor.

use std::cmp::Ordering;

use super::lu;
use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenpairs of a square matrix, sorted by real part then imaginary part.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<C64>,
    /// Unit-normalized right eigenvectors stored as columns.
    pub vectors: ComplexMatrix,
    /// `‖V‖₁·‖V⁻¹‖₁` of the eigenvector matrix; infinite when defective.
    pub condition_estimate: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest `‖A·v − λ·v‖₂` over all pairs.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        (0..self.dim())
            .map(|k| {
                let v = self.vectors.column(k);
                let av = a.mul_vec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - self.eigenvalues[k] * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

pub fn compare_complex(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Full eigendecomposition with the default iteration budget (100·dim sweeps).
pub fn eig(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    a.ensure_finite()?;
    let n = a.dim();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let (balanced, scale) = balance(a);
    let (mut t, mut z) = hessenberg(&balanced);
    schur_qr(&mut t, Some(&mut z), a)?;

    let tri = triangular_eigenvectors(&t);
    let mut vectors = z.matmul(&tri);
    for j in 0..n {
        let mut col = vectors.column(j);
        for (v, s) in col.iter_mut().zip(&scale) {
            *v *= *s;
        }
        normalize_with_phase(&mut col);
        vectors.set_column(j, &col);
    }
    let eigenvalues: Vec<C64> = t.diagonal();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| compare_complex(&eigenvalues[i], &eigenvalues[j]));
    let eigenvalues: Vec<C64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| vectors[(i, order[j])]);
    let condition_estimate = lu::condition_one_norm(&vectors);

    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
        condition_estimate,
    })
}

/// Eigenvalues only, sorted by real part then imaginary part.
pub fn eigvals(a: &ComplexMatrix) -> Result<Vec<C64>> {
    a.ensure_finite()?;
    if a.dim() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let (balanced, _) = balance(a);
    let (mut t, _) = hessenberg(&balanced);
    schur_qr(&mut t, None, a)?;
    let mut ev = t.diagonal();
    ev.sort_by(compare_complex);
    Ok(ev)
}

fn normalize_with_phase(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    // fix the gauge: largest component real and positive
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ONE);
    let phase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        ONE
    };
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// Diagonal similarity `D⁻¹·A·D` with power-of-two entries equalizing row and
/// column norms. Returns the balanced matrix and `diag(D)`.
fn balance(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.dim();
    let mut b = a.clone();
    let mut scale = vec![1.0; n];
    let l1 = |z: C64| z.re.abs() + z.im.abs();
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 200 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(b[(j, i)]);
                    r += l1(b[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                scale[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
    }
    (b, scale)
}

/// Householder reduction `A = Q·H·Q†`; returns `(H, Q)`.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vv†) H
        for j in 0..n {
            let mut dot = ZERO;
            for (idx, i) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * h[(i, j)];
            }
            for (idx, i) in (k + 1..n).enumerate() {
                h[(i, j)] -= 2.0 * v[idx] * dot;
            }
        }
        // H ← H (I − 2vv†), Q ← Q (I − 2vv†)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut dot = ZERO;
                for (idx, j) in (k + 1..n).enumerate() {
                    dot += m[(i, j)] * v[idx];
                }
                for (idx, j) in (k + 1..n).enumerate() {
                    m[(i, j)] -= 2.0 * dot * v[idx].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Reduces an upper Hessenberg matrix to upper triangular Schur form in
/// place, accumulating the unitary factor into `z` when given.
fn schur_qr(h: &mut ComplexMatrix, mut z: Option<&mut ComplexMatrix>, original: &ComplexMatrix) -> Result<()> {
    let n = h.dim();
    if n == 1 {
        return Ok(());
    }
    let budget = 100 * n;
    let hnorm = h.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut stalled = 0usize;
    let mut sweeps = 0usize;
    let mut rotations: Vec<(f64, C64)> = Vec::with_capacity(n);

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = hnorm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            stalled = 0;
            continue;
        }
        stalled += 1;
        sweeps += 1;
        if sweeps > budget {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                condition: lu::condition_one_norm(original),
            });
        }

        let shift = if stalled % 10 == 0 {
            let below = if hi >= 2 { h[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].re.abs() + below, 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        rotations.clear();
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
            h[(k + 1, k)] = ZERO;
            rotations.push((c, s));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = rotations[idx];
            for i in 0..=(k + 1) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = c * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + c * y;
            }
            if let Some(zm) = z.as_deref_mut() {
                for i in 0..n {
                    let x = zm[(i, k)];
                    let y = zm[(i, k + 1)];
                    zm[(i, k)] = c * x + s.conj() * y;
                    zm[(i, k + 1)] = -s * x + c * y;
                }
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Rotation `[c s; −s̄ c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

/// Eigenvalue of `[a b; c d]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Right eigenvectors of an upper triangular matrix, as columns.
fn triangular_eigenvectors(t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.dim();
    let tnorm = t.max_abs().max(f64::MIN_POSITIVE);
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * 1e10);
    let mut out = ComplexMatrix::zeros(n);
    let mut x = vec![ZERO; n];
    for k in 0..n {
        let lambda = t[(k, k)];
        x.iter_mut().for_each(|v| *v = ZERO);
        x[k] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[(i, j)] * x[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            x[i] = -s / d;
            let big = x[i].norm();
            if big > 1e100 {
                for v in x.iter_mut().take(k + 1) {
                    *v /= big;
                }
            }
        }
        for i in 0..=k {
            out[(i, k)] = x[i];
        }
    }
    out
}
