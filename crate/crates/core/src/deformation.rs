//! Non-unitary temporal deformations `S(t) = e^{Γ(t)}` with diagonal `Γ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::floquet_spectrum;
use crate::linalg::{inverse, ComplexMatrix, C64, I};
use crate::models::{BipartiteChainSpec, ChainVariant, Lattice, ModelSpec};
use crate::spectrum::{fold_to_zone, matched_max_deviation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub order: u32,
    /// coefficient of `cos(order·ωt)`
    pub cos: C64,
    /// coefficient of `sin(order·ωt)`
    pub sin: C64,
}

/// `γ(t) = c + a·t + Σ_h [u_h cos(hωt) + w_h sin(hωt)]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SiteGenerator {
    pub constant: C64,
    pub linear: C64,
    pub harmonics: Vec<HarmonicTerm>,
}

impl SiteGenerator {
    pub fn constant(c: C64) -> Self {
        Self {
            constant: c,
            ..Self::default()
        }
    }

    pub fn value(&self, t: f64, omega: f64) -> C64 {
        let mut g = self.constant + self.linear * t;
        for h in &self.harmonics {
            let (s, c) = (h.order as f64 * omega * t).sin_cos();
            g += h.cos * c + h.sin * s;
        }
        g
    }

    pub fn derivative(&self, t: f64, omega: f64) -> C64 {
        let mut g = self.linear;
        for h in &self.harmonics {
            let w = h.order as f64 * omega;
            let (s, c) = (w * t).sin_cos();
            g += (h.sin * c - h.cos * s) * w;
        }
        g
    }
}

/// Per-site generator `Γ(t) = diag(γ_j(t))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationSpec {
    pub omega: f64,
    pub sites: Vec<SiteGenerator>,
}

impl DeformationSpec {
    pub fn identity(dim: usize, omega: f64) -> Self {
        Self {
            omega,
            sites: vec![SiteGenerator::default(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    /// Catalog transform for the bipartite chain:
    /// `γ_{a,j} = β(j−1) + iωt/2 − cos ωt`, `γ_{b,j} = βj − iωt/2 + cos ωt`, `j = 1…cells`.
    pub fn chain_catalog(cells: usize, beta: f64, omega: f64) -> Self {
        let mut sites = Vec::with_capacity(2 * cells);
        for j in 1..=cells {
            sites.push(SiteGenerator {
                constant: C64::new(beta * (j as f64 - 1.0), 0.0),
                linear: C64::new(0.0, omega / 2.0),
                harmonics: vec![HarmonicTerm {
                    order: 1,
                    cos: C64::new(-1.0, 0.0),
                    sin: C64::new(0.0, 0.0),
                }],
            });
            sites.push(SiteGenerator {
                constant: C64::new(beta * j as f64, 0.0),
                linear: C64::new(0.0, -omega / 2.0),
                harmonics: vec![HarmonicTerm {
                    order: 1,
                    cos: C64::new(1.0, 0.0),
                    sin: C64::new(0.0, 0.0),
                }],
            });
        }
        Self { omega, sites }
    }

    /// Catalog transform matched to a chain: spatial gauge from the hopping
    /// ratio for the skin-effect variant, temporal part only otherwise.
    pub fn catalog_for(chain: &BipartiteChainSpec) -> Result<Self> {
        let beta = match (chain.variant, chain.lattice) {
            (ChainVariant::NonHermitian, Lattice::RealSpace { .. }) => {
                crate::models::hermitian_counterpart_params(chain.r1, chain.r2, chain.v, chain.q1, chain.q2)?.beta
            }
            (ChainVariant::NonHermitian, Lattice::Momentum { .. }) => {
                return Err(Error::UnsupportedParameters(
                    "the spatial gauge has no momentum-space form".into(),
                ))
            }
            (ChainVariant::HermitianCounterpart, _) => {
                return Ok(Self::identity(chain.dim(), chain.drive.omega));
            }
            (ChainVariant::TemporalOnlyDeformed, _) => 0.0,
        };
        let mut spec = Self::chain_catalog(chain.cells(), beta, chain.drive.omega);
        if chain.drive.phase != 0.0 {
            // the chain is sampled at t + φ; shift the generator accordingly
            spec = spec.time_shifted(chain.drive.phase);
        }
        Ok(spec)
    }

    /// `γ_j(t + τ)` as a new generator.
    pub fn time_shifted(&self, tau: f64) -> Self {
        let omega = self.omega;
        let sites = self
            .sites
            .iter()
            .map(|s| SiteGenerator {
                constant: s.constant + s.linear * tau,
                linear: s.linear,
                harmonics: s
                    .harmonics
                    .iter()
                    .map(|h| {
                        let (sn, cs) = (h.order as f64 * omega * tau).sin_cos();
                        HarmonicTerm {
                            order: h.order,
                            cos: h.cos * cs + h.sin * sn,
                            sin: h.sin * cs - h.cos * sn,
                        }
                    })
                    .collect(),
            })
            .collect();
        Self { omega, sites }
    }

    /// `−Γ`.
    pub fn negated(&self) -> Self {
        Self {
            omega: self.omega,
            sites: self
                .sites
                .iter()
                .map(|s| SiteGenerator {
                    constant: -s.constant,
                    linear: -s.linear,
                    harmonics: s
                        .harmonics
                        .iter()
                        .map(|h| HarmonicTerm {
                            order: h.order,
                            cos: -h.cos,
                            sin: -h.sin,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn values(&self, t: f64) -> Vec<C64> {
        self.sites.iter().map(|s| s.value(t, self.omega)).collect()
    }

    pub fn derivatives(&self, t: f64) -> Vec<C64> {
        self.sites.iter().map(|s| s.derivative(t, self.omega)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::Config("deformation omega must be positive".into()));
        }
        let finite = |z: C64| z.re.is_finite() && z.im.is_finite();
        for s in &self.sites {
            if !finite(s.constant) || !finite(s.linear) || s.harmonics.iter().any(|h| !finite(h.cos) || !finite(h.sin)) {
                return Err(Error::Config("deformation coefficients must be finite".into()));
            }
        }
        Ok(())
    }

    /// Whether `e^{γ_i − γ_j}` is `T`-periodic for every pair, i.e. each linear
    /// coefficient difference is a multiple of `iω`.
    pub fn period_preserved(&self) -> bool {
        let Some(first) = self.sites.first() else {
            return true;
        };
        self.sites.iter().all(|s| {
            let d = (s.linear - first.linear) / self.omega;
            d.re.abs() < 1e-12 && (d.im - d.im.round()).abs() < 1e-12
        })
    }
}

/// `H'(t) = e^{Γ(t)} H(t) e^{−Γ(t)} + iΓ̇(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformedModel {
    pub base: ModelSpec,
    pub gamma: DeformationSpec,
}

impl DeformedModel {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.gamma.validate()?;
        if self.gamma.dim() != self.base.dim() {
            return Err(Error::Config(format!(
                "deformation has {} sites but the model has dimension {}",
                self.gamma.dim(),
                self.base.dim()
            )));
        }
        Ok(())
    }

    pub fn period_preserved(&self) -> bool {
        self.gamma.period_preserved()
    }

    pub fn sample(&self, t: f64) -> ComplexMatrix {
        let h = self.base.sample(t);
        let g = self.gamma.values(t);
        let gd = self.gamma.derivatives(t);
        let n = h.dim();
        let left: Vec<C64> = g.iter().map(|z| z.exp()).collect();
        let right: Vec<C64> = g.iter().map(|z| (-z).exp()).collect();
        let mut out = ComplexMatrix::from_fn(n, |i, j| left[i] * h[(i, j)] * right[j]);
        for i in 0..n {
            out[(i, i)] += I * gd[i];
        }
        out
    }
}

/// Applies the deformation `gamma` to `model`.
pub fn transform_model(model: &ModelSpec, gamma: &DeformationSpec) -> Result<ModelSpec> {
    let d = DeformedModel {
        base: model.clone(),
        gamma: gamma.clone(),
    };
    d.validate()?;
    Ok(ModelSpec::Deformed(Box::new(d)))
}

/// Residual of `H† − θ₁Hθ₁⁻¹ = i(θ₂† + θ₁θ₂θ₁⁻¹)` with `θ₁ = S†S`, `θ₂ = S⁻¹Ṡ`.
#[derive(Clone, Debug, Serialize)]
pub struct PseudoHermResidual {
    /// `θ₁` at the time of the largest residual.
    pub theta1: ComplexMatrix,
    /// `θ₂` at the time of the largest residual.
    pub theta2: ComplexMatrix,
    pub residual_norm: f64,
    pub worst_time: f64,
    pub sampled_times: Vec<f64>,
}

pub fn pseudo_hermiticity_residual(model: &ModelSpec, gamma: &DeformationSpec, times: &[f64]) -> Result<PseudoHermResidual> {
    if gamma.dim() != model.dim() {
        return Err(Error::Config(format!(
            "deformation has {} sites but the model has dimension {}",
            gamma.dim(),
            model.dim()
        )));
    }
    if times.is_empty() {
        return Err(Error::InvalidInput("no sample times".into()));
    }
    let mut best: Option<PseudoHermResidual> = None;
    for &t in times {
        let h = model.sample(t);
        let g = gamma.values(t);
        let gd = gamma.derivatives(t);
        let s = ComplexMatrix::from_diag(&g.iter().map(|z| z.exp()).collect::<Vec<_>>());
        let s_dot = ComplexMatrix::from_diag(&g.iter().zip(&gd).map(|(z, d)| z.exp() * d).collect::<Vec<_>>());
        let theta1 = &s.adjoint() * &s;
        let diag: Vec<f64> = theta1.diagonal().iter().map(|z| z.re).collect();
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let cond = hi / lo;
        if !(cond <= 1e12) {
            return Err(Error::IllConditioned(cond));
        }
        let theta1_inv = inverse(&theta1)?;
        let theta2 = &inverse(&s)? * &s_dot;
        let lhs = &h.adjoint() - &(&(&theta1 * &h) * &theta1_inv);
        let rhs = (&theta2.adjoint() + &(&(&theta1 * &theta2) * &theta1_inv)).scale(I);
        let r = (&lhs - &rhs).frobenius_norm() / h.frobenius_norm().max(1.0);
        if best.as_ref().map_or(true, |b| r > b.residual_norm) {
            best = Some(PseudoHermResidual {
                theta1,
                theta2,
                residual_norm: r,
                worst_time: t,
                sampled_times: Vec::new(),
            });
        }
    }
    let mut out = best.expect("non-empty times");
    out.sampled_times = times.to_vec();
    Ok(out)
}

/// Largest `‖H' − H'†‖_F / max(1, ‖H'‖_F)` of the deformed sampler over `times`.
pub fn transformed_hermiticity(model: &ModelSpec, gamma: &DeformationSpec, times: &[f64]) -> Result<f64> {
    let deformed = transform_model(model, gamma)?;
    Ok(times
        .iter()
        .map(|&t| deformed.sample(t).hermiticity_residual())
        .fold(0.0, f64::max))
}

/// Per-site `(i/T)(γ_j(T) − γ_j(0))`.
pub fn generalized_shift(gamma: &DeformationSpec, period: f64) -> Vec<C64> {
    let a = gamma.values(0.0);
    let b = gamma.values(period);
    a.iter().zip(&b).map(|(x, y)| I / period * (y - x)).collect()
}

/// Matched maximum distance between the quasienergies of `a` and those of
/// `b` shifted by `shift`, real parts folded into the zone.
pub fn spectra_shift_check(a: &ModelSpec, b: &ModelSpec, shift: C64, slices: usize) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("model dimensions {} and {} differ", a.dim(), b.dim())));
    }
    let ta = a.require_period()?;
    let tb = b.require_period()?;
    if (ta - tb).abs() > 1e-12 * ta {
        return Err(Error::Config("models have different periods".into()));
    }
    let ea = floquet_spectrum(a, 0.0, slices)?.quasienergies;
    let eb: Vec<C64> = floquet_spectrum(b, 0.0, slices)?
        .quasienergies
        .iter()
        .map(|e| {
            let z = e + shift;
            C64::new(fold_to_zone(z.re, ta, 0.0), z.im)
        })
        .collect();
    matched_max_deviation(&ea, &eb, ta)
}

/// `‖P·conj(U)·P⁻¹ − U⁻¹‖_F / ‖U‖_F`.
pub fn pt_check(u: &ComplexMatrix, p: &ComplexMatrix) -> Result<f64> {
    if u.dim() != p.dim() {
        return Err(Error::Dimension("propagator and parity differ in size".into()));
    }
    let u_inv = inverse(u).map_err(|_| Error::Singular("propagator in PT check"))?;
    let p_inv = inverse(p)?;
    let lhs = &(p * &u.conj()) * &p_inv;
    Ok((&lhs - &u_inv).frobenius_norm() / u.frobenius_norm())
}

/// `σ_x` on every two-site cell.
pub fn cell_parity(cells: usize) -> ComplexMatrix {
    ComplexMatrix::pauli_x().repeat_diagonal(cells)
}

/// Spatial inversion of a two-sublattice chain combined with the sublattice swap:
/// `a_j ↔ b_{L+1−j}`.
pub fn inversion_parity(cells: usize) -> ComplexMatrix {
    let n = 2 * cells;
    ComplexMatrix::from_fn(n, |i, j| if i + j == n - 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;
    use std::f64::consts::PI;
    use crate::models::{Boundary, DriveSpec, FourierModel};

    fn skin_chain(cells: usize) -> BipartiteChainSpec {
        BipartiteChainSpec::non_hermitian(
            Lattice::RealSpace {
                cells,
                boundary: Boundary::Open,
            },
            DriveSpec::new(0.5),
            0.025,
            0.1,
            -0.5,
            -0.05,
            -0.2,
            -1.0,
        )
    }

    #[test]
    fn identity_deformation() {
        let m: ModelSpec = skin_chain(3).into();
        let d = transform_model(&m, &DeformationSpec::identity(6, 0.5)).unwrap();
        for t in [0.0, 1.3, 7.7] {
            assert!((&d.sample(t) - &m.sample(t)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn catalog_maps_onto_counterpart() {
        let chain = skin_chain(4);
        let m: ModelSpec = chain.clone().into();
        let gamma = DeformationSpec::catalog_for(&chain).unwrap();
        let d = transform_model(&m, &gamma).unwrap();
        let c = crate::models::hermitian_counterpart_params(0.025, 0.1, -0.5, -0.05, -0.2).unwrap();
        let herm: ModelSpec = BipartiteChainSpec::hermitian(chain.lattice, chain.drive, c.t1, c.t2, c.p, chain.mu0).into();
        for i in 0..16 {
            let t = 0.37 * i as f64;
            let h = d.sample(t);
            assert!(h.hermiticity_residual() < 1e-12);
            assert!((&h - &herm.sample(t)).max_abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn shift_examples() {
        let w = 0.5;
        let t = 2.0 * PI / w;
        let periodic = DeformationSpec {
            omega: w,
            sites: vec![SiteGenerator {
                constant: C64::new(0.3, 0.0),
                linear: C64::new(0.0, 0.0),
                harmonics: vec![HarmonicTerm {
                    order: 2,
                    cos: C64::new(1.0, 0.0),
                    sin: C64::new(0.0, 0.5),
                }],
            }],
        };
        assert!(generalized_shift(&periodic, t)[0].norm() < 1e-14);
        let linear = |a: C64| DeformationSpec {
            omega: w,
            sites: vec![SiteGenerator {
                linear: a,
                ..SiteGenerator::default()
            }],
        };
        let s = generalized_shift(&linear(C64::new(0.0, -w / 2.0)), t)[0];
        assert!((s - C64::new(w / 2.0, 0.0)).norm() < 1e-14);
        let s = generalized_shift(&linear(C64::new(0.7, 0.0)), t)[0];
        assert!((s - C64::new(0.0, 0.7)).norm() < 1e-14);
    }

    #[test]
    fn pt_examples() {
        let p = ComplexMatrix::pauli_x();
        let u = expm(&ComplexMatrix::pauli_x(), 1.0).unwrap();
        assert!(pt_check(&u, &p).unwrap() < 1e-14);
        let u = expm(&ComplexMatrix::pauli_z().scale(I), 1.0).unwrap();
        assert!(pt_check(&u, &p).unwrap() < 1e-14);
    }

    #[test]
    fn residual_negative_control() {
        let chain = skin_chain(3);
        let m: ModelSpec = chain.clone().into();
        let mut gamma = DeformationSpec::catalog_for(&chain).unwrap();
        for s in gamma.sites.iter_mut() {
            for h in s.harmonics.iter_mut() {
                h.cos = -h.cos;
            }
        }
        let times: Vec<f64> = (0..8).map(|i| i as f64 * 1.1).collect();
        let r = pseudo_hermiticity_residual(&m, &gamma, &times).unwrap();
        assert!(r.residual_norm > 0.1);
    }

    #[test]
    fn static_hermitian_has_zero_residual() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 0.5], vec![0.5, -2.0]]).unwrap();
        let m: ModelSpec = FourierModel::constant(1.0, h).unwrap().into();
        let r = pseudo_hermiticity_residual(&m, &DeformationSpec::identity(2, 1.0), &[0.0, 1.0]).unwrap();
        assert_eq!(r.residual_norm, 0.0);
    }

    #[test]
    fn ill_conditioned_metric() {
        let chain = skin_chain(30);
        let m: ModelSpec = chain.clone().into();
        let gamma = DeformationSpec::catalog_for(&chain).unwrap();
        assert!(matches!(
            pseudo_hermiticity_residual(&m, &gamma, &[0.0]),
            Err(Error::IllConditioned(_))
        ));
    }
}
