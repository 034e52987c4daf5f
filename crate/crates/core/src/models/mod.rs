//! Time-periodic lattice Hamiltonians exposed as samplers `t ↦ H(t)`.

mod chain;
mod quench;
mod stark;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use chain::{hermitian_counterpart_params, BipartiteChainSpec, Boundary, ChainVariant, CounterpartParams, Lattice};
pub use quench::{QuenchStep, StepQuenchSpec};
pub use stark::StarkChainSpec;

use crate::deformation::DeformedModel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Drive frequency and phase. The phase is a time offset: models are sampled at `t + phase`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

impl DriveSpec {
    pub fn new(omega: f64) -> Self {
        Self { omega, phase: 0.0 }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        Self { phase, ..self }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::Config(format!("omega must be positive, got {}", self.omega)));
        }
        if !self.phase.is_finite() {
            return Err(Error::Config("phase must be finite".into()));
        }
        Ok(())
    }
}

/// `H(t) = Σ_p h_p e^{ipωt}` from a finite list of harmonics; a single `p = 0`
/// term gives a static model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierModel {
    pub drive: DriveSpec,
    pub terms: Vec<(i32, ComplexMatrix)>,
}

impl FourierModel {
    pub fn new(omega: f64, terms: Vec<(i32, ComplexMatrix)>) -> Result<Self> {
        let model = Self {
            drive: DriveSpec::new(omega),
            terms,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn constant(omega: f64, h: ComplexMatrix) -> Result<Self> {
        Self::new(omega, vec![(0, h)])
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map(|(_, m)| m.dim()).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        let d = self.dim();
        if d == 0 {
            return Err(Error::Config("fourier model needs at least one term".into()));
        }
        for (_, m) in &self.terms {
            if m.dim() != d {
                return Err(Error::Dimension("fourier terms differ in dimension".into()));
            }
            m.ensure_finite()?;
        }
        Ok(())
    }

    fn sample_raw(&self, t: f64) -> ComplexMatrix {
        let d = self.dim();
        let mut h = ComplexMatrix::zeros(d);
        for (p, m) in &self.terms {
            let phase = C64::new(0.0, *p as f64 * self.drive.omega * t).exp();
            h = &h + &m.scale(phase);
        }
        h
    }
}

/// Any model the library can evolve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    BipartiteChain(BipartiteChainSpec),
    StepQuench(StepQuenchSpec),
    StarkChain(StarkChainSpec),
    Fourier(FourierModel),
    Deformed(Box<DeformedModel>),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::BipartiteChain(_) => "bipartite_chain",
            ModelSpec::StepQuench(_) => "step_quench",
            ModelSpec::StarkChain(_) => "stark_chain",
            ModelSpec::Fourier(_) => "fourier",
            ModelSpec::Deformed(_) => "deformed",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::BipartiteChain(c) => c.validate(),
            ModelSpec::StepQuench(q) => q.validate(),
            ModelSpec::StarkChain(s) => s.validate(),
            ModelSpec::Fourier(f) => f.validate(),
            ModelSpec::Deformed(d) => d.validate(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::BipartiteChain(c) => c.dim(),
            ModelSpec::StepQuench(_) => 2,
            ModelSpec::StarkChain(s) => s.sites,
            ModelSpec::Fourier(f) => f.dim(),
            ModelSpec::Deformed(d) => d.base.dim(),
        }
    }

    /// Drive period, or `None` for static models.
    pub fn period(&self) -> Option<f64> {
        match self {
            ModelSpec::BipartiteChain(c) => Some(c.drive.period()),
            ModelSpec::StepQuench(q) => Some(q.period()),
            ModelSpec::StarkChain(_) => None,
            ModelSpec::Fourier(f) => Some(f.drive.period()),
            ModelSpec::Deformed(d) => d.base.period(),
        }
    }

    pub fn require_period(&self) -> Result<f64> {
        self.period()
            .ok_or_else(|| Error::Config(format!("{} model has no drive period", self.name())))
    }

    pub fn omega(&self) -> Option<f64> {
        self.period().map(|t| 2.0 * PI / t)
    }

    /// Whether `H(t + T) = H(t)`.
    pub fn is_periodic(&self) -> bool {
        match self {
            ModelSpec::StarkChain(_) => false,
            ModelSpec::Deformed(d) => d.period_preserved() && d.base.is_periodic(),
            _ => true,
        }
    }

    /// `H(t)`.
    pub fn sample(&self, t: f64) -> ComplexMatrix {
        match self {
            ModelSpec::BipartiteChain(c) => c.sample_raw(t + c.drive.phase),
            ModelSpec::StepQuench(q) => q.sample_raw(t),
            ModelSpec::StarkChain(s) => s.hamiltonian(),
            ModelSpec::Fourier(f) => f.sample_raw(t + f.drive.phase),
            ModelSpec::Deformed(d) => d.sample(t),
        }
    }

    /// Times within `[0, T]` where the Hamiltonian jumps, if piecewise constant.
    pub fn breakpoints(&self) -> Option<Vec<f64>> {
        match self {
            ModelSpec::StepQuench(q) => Some(q.breakpoints()),
            _ => None,
        }
    }

    /// Spatial coordinate of every basis state.
    pub fn positions(&self) -> Vec<f64> {
        match self {
            ModelSpec::BipartiteChain(c) => c.positions(),
            ModelSpec::Deformed(d) => d.base.positions(),
            _ => (0..self.dim()).map(|i| i as f64).collect(),
        }
    }

    /// Crystal momentum for two-band momentum-space models.
    pub fn momentum(&self) -> Option<f64> {
        match self {
            ModelSpec::BipartiteChain(BipartiteChainSpec {
                lattice: Lattice::Momentum { k },
                ..
            }) => Some(*k),
            ModelSpec::Deformed(d) => d.base.momentum(),
            _ => None,
        }
    }

    /// The same model at another crystal momentum.
    pub fn at_momentum(&self, k: f64) -> Result<ModelSpec> {
        match self {
            ModelSpec::BipartiteChain(c @ BipartiteChainSpec {
                lattice: Lattice::Momentum { .. },
                ..
            }) => Ok(ModelSpec::BipartiteChain(c.with_lattice(Lattice::Momentum { k }))),
            ModelSpec::Deformed(d) => Ok(ModelSpec::Deformed(Box::new(DeformedModel {
                base: d.base.at_momentum(k)?,
                gamma: d.gamma.clone(),
            }))),
            _ => Err(Error::Config(format!(
                "{} model is not a momentum-space model",
                self.name()
            ))),
        }
    }

    /// The same model with `μ₀` replaced (bipartite chains only).
    pub fn with_mu0(&self, mu0: f64) -> Result<ModelSpec> {
        match self {
            ModelSpec::BipartiteChain(c) => Ok(ModelSpec::BipartiteChain(c.with_mu0(mu0))),
            ModelSpec::Deformed(d) => Ok(ModelSpec::Deformed(Box::new(DeformedModel {
                base: d.base.with_mu0(mu0)?,
                gamma: d.gamma.clone(),
            }))),
            _ => Err(Error::Config(format!("{} model has no mu0 parameter", self.name()))),
        }
    }

    pub fn chain(&self) -> Option<&BipartiteChainSpec> {
        match self {
            ModelSpec::BipartiteChain(c) => Some(c),
            ModelSpec::Deformed(d) => d.base.chain(),
            _ => None,
        }
    }
}

impl From<BipartiteChainSpec> for ModelSpec {
    fn from(c: BipartiteChainSpec) -> Self {
        ModelSpec::BipartiteChain(c)
    }
}

impl From<StepQuenchSpec> for ModelSpec {
    fn from(q: StepQuenchSpec) -> Self {
        ModelSpec::StepQuench(q)
    }
}

impl From<FourierModel> for ModelSpec {
    fn from(f: FourierModel) -> Self {
        ModelSpec::Fourier(f)
    }
}

impl From<StarkChainSpec> for ModelSpec {
    fn from(s: StarkChainSpec) -> Self {
        ModelSpec::StarkChain(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn skin_chain(lattice: Lattice) -> BipartiteChainSpec {
        BipartiteChainSpec::non_hermitian(lattice, DriveSpec::new(0.5), 0.025, 0.1, -0.5, -0.05, -0.2, -1.0)
    }

    #[test]
    fn counterpart_at_k0_t0() {
        let (t1, t2) = (0.05, 0.5);
        let m: ModelSpec =
            BipartiteChainSpec::hermitian(Lattice::Momentum { k: 0.0 }, DriveSpec::new(0.5), t1, t2, -0.1, -1.0).into();
        let h = m.sample(0.0);
        let expected = ComplexMatrix::pauli_x().scale_real(-t1 - t2);
        assert!((&h - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn hand_built_open_chain() {
        let spec = skin_chain(Lattice::RealSpace {
            cells: 2,
            boundary: Boundary::Open,
        });
        let w = 0.5;
        let t = 0.25 * 2.0 * PI / w;
        let m: ModelSpec = spec.clone().into();
        let h = m.sample(t);

        // sin ωt = 1, cos ωt = 0, e^{∓iωt} = ∓i
        let mu = C64::new(spec.mu0, w) - w / 2.0;
        let f1 = -spec.r1 * (-I);
        let f2 = -spec.r2 * I;
        let g1 = spec.v * I;
        let g2 = spec.v * (-I);
        let (p1, p2) = (C64::new(spec.q1, 0.0), C64::new(spec.q2, 0.0));
        let z = C64::new(0.0, 0.0);
        let rows = vec![
            vec![-mu, f1, p1, z],
            vec![f2, mu, g1, -p1],
            vec![p2, g2, -mu, f1],
            vec![z, -p2, f2, mu],
        ];
        let expected = ComplexMatrix::from_rows(&rows).unwrap();
        assert!((&h - &expected).max_abs() < 1e-14, "{h:?}");
    }

    #[test]
    fn momentum_space_is_fourier_transform_of_periodic_chain() {
        let cells = 6;
        let real = skin_chain(Lattice::RealSpace {
            cells,
            boundary: Boundary::Periodic,
        });
        let t = 1.7;
        let h = real.sample_raw(t);
        for m in 0..cells {
            let k = 2.0 * PI * m as f64 / cells as f64;
            let hk = real.with_lattice(Lattice::Momentum { k }).sample_raw(t);
            // Bloch vector ψ_{s,j} = e^{ikj} u_s
            for s in 0..2 {
                let mut u = vec![C64::new(0.0, 0.0); 2];
                u[s] = C64::new(1.0, 0.0);
                let psi: Vec<C64> = (0..2 * cells)
                    .map(|i| C64::new(0.0, k * (i / 2) as f64).exp() * u[i % 2])
                    .collect();
                let hpsi = h.mul_vec(&psi);
                let hu = hk.mul_vec(&u);
                for i in 0..2 * cells {
                    let expected = C64::new(0.0, k * (i / 2) as f64).exp() * hu[i % 2];
                    assert!((hpsi[i] - expected).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn counterpart_params_reference_chain() {
        let c = hermitian_counterpart_params(0.025, 0.1, -0.5, -0.05, -0.2).unwrap();
        assert!((c.t1 - 0.05).abs() < 1e-15);
        assert!((c.t2 - 0.5).abs() < 1e-15);
        assert!((c.p + 0.1).abs() < 1e-15);
        assert!((c.beta - 0.5f64.ln()).abs() < 1e-15);
        let sym = hermitian_counterpart_params(0.3, 0.3, 1.0, 0.2, 0.2).unwrap();
        assert_eq!(sym.beta, 0.0);
        assert!((sym.t1 - 0.3).abs() < 1e-15);
        let c = hermitian_counterpart_params(0.4, 0.1, 1.0, 1.0, 1.0).unwrap();
        assert!((c.beta - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(
            hermitian_counterpart_params(0.1, 0.1, 1.0, 0.2, -0.2),
            Err(Error::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn quench_step_spectrum() {
        let q = StepQuenchSpec::seven_step(3.5 * PI, 1.0, [0.3, -1.1]);
        for s in &q.steps {
            let h = q.step_hamiltonian(s);
            let ev = crate::linalg::eigvals(&h).unwrap();
            assert!((ev[0] + 3.5 * PI).norm() < 1e-12 && (ev[1] - 3.5 * PI).norm() < 1e-12);
        }
        assert!((q.period() - 1.0).abs() < 1e-15);
    }
}
