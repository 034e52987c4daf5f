use serde::{Deserialize, Serialize};

use super::DriveSpec;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Which parameter set drives the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainVariant {
    /// Skin-effect chain with time-dependent gain/loss factors `e^{±(iωt − 2cos ωt)}`
    /// (reads `r1, r2, v, q1, q2`).
    NonHermitian,
    /// Hermitian chain with `sin ωt` staggered potential (reads `t1, t2, p`).
    HermitianCounterpart,
    /// Hermitian amplitudes dressed with the temporal factors only (reads `t1, t2, p`);
    /// a purely temporal deformation maps it onto the counterpart.
    TemporalOnlyDeformed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lattice {
    RealSpace { cells: usize, boundary: Boundary },
    Momentum { k: f64 },
}

/// Two-sublattice driven chain; real-space ordering is `(a₁, b₁, a₂, b₂, …)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartiteChainSpec {
    pub lattice: Lattice,
    pub variant: ChainVariant,
    pub drive: DriveSpec,
    pub r1: f64,
    pub r2: f64,
    pub v: f64,
    pub q1: f64,
    pub q2: f64,
    pub t1: f64,
    pub t2: f64,
    pub p: f64,
    pub mu0: f64,
}

/// Instantaneous couplings of one unit cell.
#[derive(Clone, Copy, Debug)]
struct Couplings {
    /// `a_j ← b_j` and `b_j ← a_j`
    f1: C64,
    f2: C64,
    /// `b_j ← a_{j+1}` and `a_{j+1} ← b_j`
    g1: C64,
    g2: C64,
    /// `a_j ← a_{j+1}` and `a_{j+1} ← a_j` (opposite sign on b)
    p1: C64,
    p2: C64,
    /// on-site `−μ` on a, `+μ` on b
    mu: C64,
}

impl BipartiteChainSpec {
    pub fn non_hermitian(lattice: Lattice, drive: DriveSpec, r1: f64, r2: f64, v: f64, q1: f64, q2: f64, mu0: f64) -> Self {
        Self {
            lattice,
            variant: ChainVariant::NonHermitian,
            drive,
            r1,
            r2,
            v,
            q1,
            q2,
            t1: 0.0,
            t2: 0.0,
            p: 0.0,
            mu0,
        }
    }

    pub fn hermitian(lattice: Lattice, drive: DriveSpec, t1: f64, t2: f64, p: f64, mu0: f64) -> Self {
        Self {
            lattice,
            variant: ChainVariant::HermitianCounterpart,
            drive,
            r1: 0.0,
            r2: 0.0,
            v: 0.0,
            q1: 0.0,
            q2: 0.0,
            t1,
            t2,
            p,
            mu0,
        }
    }

    pub fn temporal_only(lattice: Lattice, drive: DriveSpec, t1: f64, t2: f64, p: f64, mu0: f64) -> Self {
        Self {
            variant: ChainVariant::TemporalOnlyDeformed,
            ..Self::hermitian(lattice, drive, t1, t2, p, mu0)
        }
    }

    pub fn dim(&self) -> usize {
        match self.lattice {
            Lattice::RealSpace { cells, .. } => 2 * cells,
            Lattice::Momentum { .. } => 2,
        }
    }

    pub fn cells(&self) -> usize {
        match self.lattice {
            Lattice::RealSpace { cells, .. } => cells,
            Lattice::Momentum { .. } => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        if let Lattice::RealSpace { cells, .. } = self.lattice {
            if cells == 0 {
                return Err(Error::Config("chain needs at least one cell".into()));
            }
        }
        let values = [self.r1, self.r2, self.v, self.q1, self.q2, self.t1, self.t2, self.p, self.mu0];
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("chain parameters must be finite".into()));
        }
        if let Lattice::Momentum { k } = self.lattice {
            if !k.is_finite() {
                return Err(Error::Config("momentum must be finite".into()));
            }
        }
        Ok(())
    }

    /// Same chain with a new `μ₀`.
    pub fn with_mu0(&self, mu0: f64) -> Self {
        Self { mu0, ..self.clone() }
    }

    pub fn with_lattice(&self, lattice: Lattice) -> Self {
        Self {
            lattice,
            ..self.clone()
        }
    }

    fn couplings(&self, t: f64) -> Couplings {
        let w = self.drive.omega;
        let (s, c) = (w * t).sin_cos();
        // e^{−iωt + 2cos ωt} and its reciprocal
        let up = (C64::new(2.0 * c, -w * t)).exp();
        let down = (C64::new(-2.0 * c, w * t)).exp();
        let re = |x: f64| C64::new(x, 0.0);
        match self.variant {
            ChainVariant::NonHermitian => Couplings {
                f1: -self.r1 * up,
                f2: -self.r2 * down,
                g1: self.v * down,
                g2: self.v * up,
                p1: re(self.q1 * s),
                p2: re(self.q2 * s),
                mu: C64::new(self.mu0, w) * s - w / 2.0,
            },
            ChainVariant::HermitianCounterpart => Couplings {
                f1: re(-self.t1),
                f2: re(-self.t1),
                g1: re(-self.t2),
                g2: re(-self.t2),
                p1: re(self.p * s),
                p2: re(self.p * s),
                mu: re(self.mu0 * s),
            },
            ChainVariant::TemporalOnlyDeformed => Couplings {
                f1: -self.t1 * up,
                f2: -self.t1 * down,
                g1: -self.t2 * down,
                g2: -self.t2 * up,
                p1: re(self.p * s),
                p2: re(self.p * s),
                mu: C64::new(self.mu0, w) * s - w / 2.0,
            },
        }
    }

    /// `H(t)` without the drive phase offset applied.
    pub(crate) fn sample_raw(&self, t: f64) -> ComplexMatrix {
        let c = self.couplings(t);
        match self.lattice {
            Lattice::Momentum { k } => {
                let e = C64::new(0.0, k).exp();
                let einv = e.conj();
                let aa = -c.mu + c.p1 * e + c.p2 * einv;
                let bb = c.mu - c.p1 * e - c.p2 * einv;
                let ab = c.f1 + c.g2 * einv;
                let ba = c.f2 + c.g1 * e;
                let mut h = ComplexMatrix::zeros(2);
                h[(0, 0)] = aa;
                h[(0, 1)] = ab;
                h[(1, 0)] = ba;
                h[(1, 1)] = bb;
                h
            }
            Lattice::RealSpace { cells, boundary } => {
                let n = 2 * cells;
                let mut h = ComplexMatrix::zeros(n);
                let a = |j: usize| 2 * j;
                let b = |j: usize| 2 * j + 1;
                for j in 0..cells {
                    h[(a(j), b(j))] += c.f1;
                    h[(b(j), a(j))] += c.f2;
                    h[(a(j), a(j))] += -c.mu;
                    h[(b(j), b(j))] += c.mu;
                    let next = j + 1;
                    if next < cells || boundary == Boundary::Periodic {
                        let jn = next % cells;
                        h[(b(j), a(jn))] += c.g1;
                        h[(a(jn), b(j))] += c.g2;
                        h[(a(j), a(jn))] += c.p1;
                        h[(a(jn), a(j))] += c.p2;
                        h[(b(j), b(jn))] += -c.p1;
                        h[(b(jn), b(j))] += -c.p2;
                    }
                }
                h
            }
        }
    }

    /// Cell index of every basis state (used to disentangle degenerate states).
    pub fn positions(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| (i / 2) as f64).collect()
    }
}

/// Hermitian amplitudes related to the skin-effect chain by the spatial gauge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CounterpartParams {
    pub t1: f64,
    pub t2: f64,
    pub p: f64,
    pub beta: f64,
}

/// `t₁ = √(r₁r₂)`, `t₂ = −v`, `p = sign(q₁)·√(q₁q₂)`, `β = ln√(r₁/r₂)`.
///
/// The gauge balances the next-nearest hoppings only when `q₁/q₂ = r₁/r₂`;
/// otherwise the gauged chain keeps a residual asymmetry.
pub fn hermitian_counterpart_params(r1: f64, r2: f64, v: f64, q1: f64, q2: f64) -> Result<CounterpartParams> {
    if !(r1 * r2 > 0.0) {
        return Err(Error::UnsupportedParameters(format!(
            "r1·r2 must be positive (r1 = {r1}, r2 = {r2})"
        )));
    }
    if !(q1 * q2 > 0.0) {
        return Err(Error::UnsupportedParameters(format!(
            "q1 and q2 must share a sign (q1 = {q1}, q2 = {q2})"
        )));
    }
    Ok(CounterpartParams {
        t1: (r1 * r2).sqrt(),
        t2: -v,
        p: q1.signum() * (q1 * q2).sqrt(),
        beta: 0.5 * (r1 / r2).ln(),
    })
}
