//! Time-ordered propagators, Floquet operators and parameter sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{disentangled_localization, CLUSTER_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{apply_exp, ComplexMatrix, Workspace, C64, ZERO};
use crate::models::{Boundary, Lattice, ModelSpec, StepQuenchSpec};
use crate::spectrum::{circular_distance, quasienergies, FloquetSpectrum};

/// Midpoint slices per period unless configured otherwise.
pub const DEFAULT_SLICES: usize = 4096;

#[derive(Clone, Copy, Debug)]
pub struct PropagatorRequest<'a> {
    pub model: &'a ModelSpec,
    pub t0: f64,
    pub t1: f64,
    pub slices: usize,
}

#[derive(Clone, Debug)]
pub struct Propagation {
    /// `U(t1, t0)`.
    pub operator: ComplexMatrix,
    /// Set when a smooth drive is sampled with `Δt·ω > π`.
    pub under_resolved: bool,
    pub slices_used: usize,
}

impl PropagatorRequest<'_> {
    fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite()) {
            return Err(Error::InvalidInput("propagation times must be finite".into()));
        }
        if !(self.t1 > self.t0) {
            return Err(Error::InvalidInput(format!(
                "propagation needs t1 > t0 (got {} → {})",
                self.t0, self.t1
            )));
        }
        if self.slices == 0 {
            return Err(Error::InvalidInput("slices must be at least 1".into()));
        }
        Ok(())
    }

    /// `(midpoint, Δt)` of every slice in time order.
    pub fn slice_midpoints(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let span = self.t1 - self.t0;
        let mut out = Vec::with_capacity(self.slices);
        match (self.model.breakpoints(), self.model.period()) {
            (Some(bp), Some(period)) => {
                // cut at every step boundary inside [t0, t1]
                let mut cuts = vec![self.t0, self.t1];
                let first = (self.t0 / period).floor() as i64;
                let last = (self.t1 / period).ceil() as i64;
                for n in first..=last {
                    for b in &bp {
                        let t = n as f64 * period + b;
                        if t > self.t0 + 1e-14 * period && t < self.t1 - 1e-14 * period {
                            cuts.push(t);
                        }
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * period);
                for w in cuts.windows(2) {
                    let len = w[1] - w[0];
                    let count = ((self.slices as f64 * len / span).round() as usize).max(1);
                    let dt = len / count as f64;
                    for s in 0..count {
                        out.push((w[0] + (s as f64 + 0.5) * dt, dt));
                    }
                }
            }
            _ => {
                let dt = span / self.slices as f64;
                for s in 0..self.slices {
                    out.push((self.t0 + (s as f64 + 0.5) * dt, dt));
                }
            }
        }
        Ok(out)
    }
}

/// `U(t1, t0) ≈ ∏ exp(−i H(t_mid) Δt)` with later slices on the left.
pub fn propagate(req: &PropagatorRequest) -> Result<Propagation> {
    let slices = req.slice_midpoints()?;
    let n = req.model.dim();
    let mut u = ComplexMatrix::identity(n);
    let mut ws = Workspace::default();
    let mut max_dt = 0.0f64;
    for &(mid, dt) in &slices {
        let h = req.model.sample(mid);
        if !h.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite Hamiltonian at t = {mid}")));
        }
        apply_exp(&h, dt, u.as_mut_slice(), &mut ws);
        max_dt = max_dt.max(dt);
    }
    if !u.is_finite() {
        return Err(Error::SingularPropagator { modulus: f64::INFINITY });
    }
    let under_resolved = req.model.breakpoints().is_none() && req.model.omega().is_some_and(|w| max_dt * w > PI);
    Ok(Propagation {
        operator: u,
        under_resolved,
        slices_used: slices.len(),
    })
}

/// One-period propagator `U(t_start + T, t_start)`.
pub fn floquet_operator(model: &ModelSpec, t_start: f64, slices: usize) -> Result<ComplexMatrix> {
    let period = model.require_period()?;
    Ok(propagate(&PropagatorRequest {
        model,
        t0: t_start,
        t1: t_start + period,
        slices,
    })?
    .operator)
}

pub fn floquet_spectrum(model: &ModelSpec, t_start: f64, slices: usize) -> Result<FloquetSpectrum> {
    let period = model.require_period()?;
    quasienergies(&floquet_operator(model, t_start, slices)?, period)
}

/// Spectrum with localization factors (degenerate clusters resolved).
#[derive(Clone, Debug, Serialize)]
pub struct LocalizedSpectrum {
    pub spectrum: FloquetSpectrum,
    pub localization: Vec<f64>,
}

pub fn localized_spectrum(model: &ModelSpec, t_start: f64, slices: usize) -> Result<LocalizedSpectrum> {
    let spectrum = floquet_spectrum(model, t_start, slices)?;
    let localization = disentangled_localization(&spectrum, &model.positions(), CLUSTER_TOLERANCE)?;
    Ok(LocalizedSpectrum { spectrum, localization })
}

/// Open-boundary spectrum at one `μ₀` with edge-mode classification.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub mu0: f64,
    pub spectrum: FloquetSpectrum,
    pub localization: Vec<f64>,
    /// Real part farther than the mean level spacing from every periodic-boundary quasienergy.
    pub in_gap: Vec<bool>,
    pub edge_mode: Vec<bool>,
}

impl SweepRow {
    pub fn edge_mode_count(&self) -> usize {
        self.edge_mode.iter().filter(|&&b| b).count()
    }
}

/// In-gap and edge-mode flags for an open-boundary spectrum.
///
/// A state is in the gap when its real quasienergy is farther than the mean
/// level spacing `(2π/T)/N` from every quasienergy of the periodic companion,
/// and an edge mode when it is in the gap with `I > ½(1 − 1/N)`.
pub fn classify_edge_modes(open: &FloquetSpectrum, periodic: &FloquetSpectrum, localization: &[f64]) -> (Vec<bool>, Vec<bool>) {
    let n = open.len();
    let width = open.zone_width();
    let spacing = width / n as f64;
    let threshold = 0.5 * (1.0 - 1.0 / n as f64);
    let in_gap: Vec<bool> = open
        .quasienergies
        .iter()
        .map(|e| {
            periodic
                .quasienergies
                .iter()
                .all(|p| circular_distance(e.re, p.re, width) > spacing)
        })
        .collect();
    let edge = in_gap
        .iter()
        .zip(localization)
        .map(|(&g, &i)| g && i > threshold)
        .collect();
    (in_gap, edge)
}

/// Open-chain spectra over a `μ₀` grid; rows follow the grid order.
pub fn obc_sweep(model: &ModelSpec, mu0_grid: &[f64], slices: usize) -> Result<Vec<SweepRow>> {
    let chain = model
        .chain()
        .ok_or_else(|| Error::Config(format!("sweep needs a bipartite chain, got {}", model.name())))?;
    let Lattice::RealSpace { cells, boundary } = chain.lattice else {
        return Err(Error::Config("sweep needs a real-space chain".into()));
    };
    if boundary != Boundary::Open {
        return Err(Error::Config("sweep needs an open-boundary chain".into()));
    }
    let periodic_lattice = Lattice::RealSpace {
        cells,
        boundary: Boundary::Periodic,
    };
    mu0_grid
        .par_iter()
        .map(|&mu0| {
            let open = model.with_mu0(mu0)?;
            let closed = with_lattice(&open, periodic_lattice)?;
            let LocalizedSpectrum { spectrum, localization } = localized_spectrum(&open, 0.0, slices)?;
            let periodic = floquet_spectrum(&closed, 0.0, slices)?;
            let (in_gap, edge_mode) = classify_edge_modes(&spectrum, &periodic, &localization);
            Ok(SweepRow {
                mu0,
                spectrum,
                localization,
                in_gap,
                edge_mode,
            })
        })
        .collect()
}

fn with_lattice(model: &ModelSpec, lattice: Lattice) -> Result<ModelSpec> {
    match model {
        ModelSpec::BipartiteChain(c) => Ok(ModelSpec::BipartiteChain(c.with_lattice(lattice))),
        _ => Err(Error::Config("boundary change needs an undeformed bipartite chain".into())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseRow {
    pub phi: f64,
    pub spectrum: FloquetSpectrum,
    pub localization: Vec<f64>,
}

/// Floquet operators `U(φ + T, φ)` over starting points `φ` (time offsets).
pub fn starting_point_study(model: &ModelSpec, phis: &[f64], slices: usize) -> Result<Vec<PhaseRow>> {
    model.require_period()?;
    phis.par_iter()
        .map(|&phi| {
            let LocalizedSpectrum { spectrum, localization } = localized_spectrum(model, phi, slices)?;
            Ok(PhaseRow {
                phi,
                spectrum,
                localization,
            })
        })
        .collect()
}

/// Two-band quench spectra over an `nx × ny` cell-centred grid of the zone.
#[derive(Clone, Debug, Serialize)]
pub struct QuenchBands {
    pub k_points: Vec<[f64; 2]>,
    /// Lower and upper quasienergy (by real part) at each k.
    pub bands: Vec<[C64; 2]>,
    pub period: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BandStats {
    pub re_mean: f64,
    pub re_std: f64,
    pub im_mean: f64,
    pub im_std: f64,
    pub max_abs_im: f64,
}

impl QuenchBands {
    pub fn stats(&self, band: usize) -> BandStats {
        let n = self.bands.len() as f64;
        let re: Vec<f64> = self.bands.iter().map(|b| b[band].re).collect();
        let im: Vec<f64> = self.bands.iter().map(|b| b[band].im).collect();
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / n;
        let std = |xs: &[f64], m: f64| (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
        let (re_mean, im_mean) = (mean(&re), mean(&im));
        BandStats {
            re_mean,
            re_std: std(&re, re_mean),
            im_mean,
            im_std: std(&im, im_mean),
            max_abs_im: im.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }
}

pub fn quench_bands(spec: &StepQuenchSpec, nx: usize, ny: usize) -> Result<QuenchBands> {
    if nx == 0 || ny == 0 {
        return Err(Error::Config("quench grid needs at least one point per axis".into()));
    }
    spec.validate()?;
    let cell = |i: usize, n: usize| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64;
    let k_points: Vec<[f64; 2]> = (0..nx).flat_map(|i| (0..ny).map(move |j| [cell(i, nx), cell(j, ny)])).collect();
    let slices = spec.steps.len();
    let bands = k_points
        .par_iter()
        .map(|&k| {
            let s = floquet_spectrum(&spec.with_momentum(k).into(), 0.0, slices)?;
            Ok([s.quasienergies[0], s.quasienergies[1]])
        })
        .collect::<Result<_>>()?;
    Ok(QuenchBands {
        k_points,
        bands,
        period: spec.period(),
    })
}

/// `Σ tr H(t_mid)·Δt` over the slicing of `req`.
pub fn integrated_trace(req: &PropagatorRequest) -> Result<crate::linalg::C64> {
    let mut acc = ZERO;
    for (mid, dt) in req.slice_midpoints()? {
        acc += req.model.sample(mid).trace() * dt;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{determinant, expm, C64, I};
    use crate::models::{BipartiteChainSpec, DriveSpec, FourierModel, StepQuenchSpec};

    fn counterpart(lattice: Lattice, mu0: f64) -> ModelSpec {
        BipartiteChainSpec::hermitian(lattice, DriveSpec::new(0.5), 0.05, 0.5, -0.1, mu0).into()
    }

    #[test]
    fn constant_hamiltonian_single_slice() {
        let h = ComplexMatrix::from_real_rows(&[vec![0.3, 1.2], vec![-0.4, 2.0]]).unwrap();
        let m: ModelSpec = FourierModel::constant(1.0, h.clone()).unwrap().into();
        let u = propagate(&PropagatorRequest {
            model: &m,
            t0: 0.0,
            t1: 4.0,
            slices: 1,
        })
        .unwrap();
        assert!((&u.operator - &expm(&h, 4.0).unwrap()).max_abs() < 1e-12);
        assert!(u.under_resolved);
    }

    #[test]
    fn composition_at_shared_boundary() {
        let m = counterpart(Lattice::Momentum { k: 0.7 }, -1.0);
        let t = m.period().unwrap();
        let whole = propagate(&PropagatorRequest {
            model: &m,
            t0: 0.0,
            t1: t,
            slices: 256,
        })
        .unwrap()
        .operator;
        let first = propagate(&PropagatorRequest {
            model: &m,
            t0: 0.0,
            t1: t / 2.0,
            slices: 128,
        })
        .unwrap()
        .operator;
        let second = propagate(&PropagatorRequest {
            model: &m,
            t0: t / 2.0,
            t1: t,
            slices: 128,
        })
        .unwrap()
        .operator;
        assert!((&whole - &(&second * &first)).max_abs() < 1e-13);
    }

    #[test]
    fn liouville_over_slicing() {
        let m: ModelSpec = BipartiteChainSpec::non_hermitian(
            Lattice::RealSpace {
                cells: 3,
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
        .into();
        let req = PropagatorRequest {
            model: &m,
            t0: 0.0,
            t1: m.period().unwrap(),
            slices: 512,
        };
        let u = propagate(&req).unwrap().operator;
        let expected = (-I * integrated_trace(&req).unwrap()).exp();
        assert!((determinant(&u) - expected).norm() < 1e-8 * expected.norm().max(1.0));
    }

    #[test]
    fn quench_slices_respect_steps() {
        let q: ModelSpec = StepQuenchSpec::seven_step(1.0, 1.0, [0.0, 0.0]).into();
        let req = PropagatorRequest {
            model: &q,
            t0: 0.05,
            t1: 1.05,
            slices: 7,
        };
        let s = req.slice_midpoints().unwrap();
        let total: f64 = s.iter().map(|x| x.1).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn smallest_chain() {
        let m = counterpart(
            Lattice::RealSpace {
                cells: 1,
                boundary: Boundary::Open,
            },
            -1.0,
        );
        let rows = obc_sweep(&m, &[-1.0], 256).unwrap();
        let direct = floquet_spectrum(&m, 0.0, 256).unwrap();
        for (a, b) in rows[0].spectrum.quasienergies.iter().zip(&direct.quasienergies) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn zone_folding_under_constant_shift() {
        let h = ComplexMatrix::from_real_rows(&[vec![0.2, 0.4], vec![0.4, -0.9]]).unwrap();
        let w = 1.3;
        let c = 2.9;
        let base: ModelSpec = FourierModel::new(w, vec![(0, h.clone()), (1, h.scale_real(0.3)), (-1, h.scale_real(0.3))])
            .unwrap()
            .into();
        let mut shifted_h = h.clone();
        shifted_h.add_diagonal(C64::new(c, 0.0));
        let shifted: ModelSpec =
            FourierModel::new(w, vec![(0, shifted_h), (1, h.scale_real(0.3)), (-1, h.scale_real(0.3))])
                .unwrap()
                .into();
        let a = floquet_spectrum(&base, 0.0, 200).unwrap();
        let b = floquet_spectrum(&shifted, 0.0, 200).unwrap();
        let moved: Vec<C64> = a
            .quasienergies
            .iter()
            .map(|e| C64::new(crate::spectrum::fold_to_zone(e.re + c, a.period, 0.0), e.im))
            .collect();
        let dev = crate::spectrum::matched_max_deviation(&moved, &b.quasienergies, a.period).unwrap();
        assert!(dev < 1e-10, "{dev}");
    }
}
