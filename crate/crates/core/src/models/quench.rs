use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// One constant segment of the protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuenchStep {
    pub duration: f64,
    /// Amplitude on `σ⁺`, dressed with `e^{i b·k}`.
    pub j1: C64,
    /// Amplitude on `σ⁻`, dressed with `e^{−i b·k}`.
    pub j2: C64,
    pub b: [f64; 2],
}

/// Piecewise-constant two-level drive `H_n = −(J₁ e^{ib·k} σ⁺ + J₂ e^{−ib·k} σ⁻) + Γ σ_z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepQuenchSpec {
    pub steps: Vec<QuenchStep>,
    pub gamma_z: C64,
    pub k: [f64; 2],
}

impl StepQuenchSpec {
    /// Seven equal steps with bond vectors `b_n = (cos 2πn/7, sin 2πn/7)`, `n = 1…7`.
    pub fn seven_step(j: f64, period: f64, k: [f64; 2]) -> Self {
        let steps = (1..=7)
            .map(|n| {
                let angle = 2.0 * PI * n as f64 / 7.0;
                QuenchStep {
                    duration: period / 7.0,
                    j1: C64::new(j, 0.0),
                    j2: C64::new(j, 0.0),
                    b: [angle.cos(), angle.sin()],
                }
            })
            .collect();
        Self {
            steps,
            gamma_z: C64::new(0.0, 0.0),
            k,
        }
    }

    /// Adds `+r` to `J₁` and `−r` to `J₂` on step `index` (zero-based).
    pub fn with_asymmetry(mut self, index: usize, r: f64) -> Result<Self> {
        let step = self
            .steps
            .get_mut(index)
            .ok_or_else(|| Error::Config(format!("no quench step {index}")))?;
        step.j1 += r;
        step.j2 -= r;
        Ok(self)
    }

    pub fn with_momentum(&self, k: [f64; 2]) -> Self {
        Self { k, ..self.clone() }
    }

    pub fn period(&self) -> f64 {
        self.steps.iter().map(|s| s.duration).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Config("quench needs at least one step".into()));
        }
        for (n, s) in self.steps.iter().enumerate() {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::Config(format!("step {n} has non-positive duration")));
            }
            let finite = [s.j1.re, s.j1.im, s.j2.re, s.j2.im, s.b[0], s.b[1]]
                .iter()
                .all(|x| x.is_finite());
            if !finite {
                return Err(Error::Config(format!("step {n} has non-finite entries")));
            }
        }
        if !(self.gamma_z.re.is_finite() && self.gamma_z.im.is_finite() && self.k.iter().all(|x| x.is_finite())) {
            return Err(Error::Config("quench gamma and momentum must be finite".into()));
        }
        Ok(())
    }

    /// Step boundaries within one period, starting at 0 and ending at `T`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut acc = 0.0;
        for s in &self.steps {
            acc += s.duration;
            out.push(acc);
        }
        out
    }

    pub fn step_hamiltonian(&self, step: &QuenchStep) -> ComplexMatrix {
        let phase = C64::new(0.0, step.b[0] * self.k[0] + step.b[1] * self.k[1]).exp();
        let mut h = ComplexMatrix::zeros(2);
        h[(0, 1)] = -step.j1 * phase;
        h[(1, 0)] = -step.j2 * phase.conj();
        h[(0, 0)] = self.gamma_z;
        h[(1, 1)] = -self.gamma_z;
        h
    }

    /// Hamiltonian active at `t`; steps are closed on the left.
    pub(crate) fn sample_raw(&self, t: f64) -> ComplexMatrix {
        let period = self.period();
        let tau = t.rem_euclid(period);
        let mut acc = 0.0;
        for s in &self.steps {
            acc += s.duration;
            if tau < acc {
                return self.step_hamiltonian(s);
            }
        }
        self.step_hamiltonian(self.steps.last().expect("validated"))
    }
}
