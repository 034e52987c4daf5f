//! Frequency-space (Sambe) Floquet Hamiltonians and the static Stark chain.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig, ComplexMatrix, C64, I};
use crate::models::{BipartiteChainSpec, DriveSpec, Lattice, ModelSpec, StarkChainSpec};
use crate::spectrum::fold_to_zone;

/// Blocks kept away from the truncation edge for a state to count as interior.
pub const INTERIOR_MARGIN: usize = 4;

/// `h_p = (1/T)∫₀ᵀ H(t) e^{−ipωt} dt` for `p ∈ [−P, P]`.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicSet {
    pub omega: f64,
    pub max_order: usize,
    pub quadrature_points: usize,
    /// `blocks[p + P]`.
    pub blocks: Vec<ComplexMatrix>,
    /// Largest `‖h_p‖_F` over the outer quarter of the order range.
    pub tail_norm: f64,
}

impl HarmonicSet {
    pub fn get(&self, p: i64) -> Option<&ComplexMatrix> {
        let idx = p + self.max_order as i64;
        if idx < 0 {
            return None;
        }
        self.blocks.get(idx as usize)
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].dim()
    }

    /// `max_p ‖h_p‖_F`.
    pub fn max_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.frobenius_norm()).fold(0.0, f64::max)
    }

    /// `max_{p≠0} ‖h_p‖_F`.
    pub fn max_coupling_norm(&self) -> f64 {
        let p0 = self.max_order;
        self.blocks
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != p0)
            .map(|(_, b)| b.frobenius_norm())
            .fold(0.0, f64::max)
    }
}

/// Quadrature size `max(1024, 16P)` rounded up to a power of two.
pub fn default_quadrature(max_order: usize) -> usize {
    (16 * max_order).max(1024).next_power_of_two()
}

/// Uniform-grid discrete Fourier transform of `nt` samples over one period.
pub fn harmonics(model: &ModelSpec, max_order: usize, nt: usize) -> Result<HarmonicSet> {
    if !model.is_periodic() {
        return Err(Error::Config(format!("{} model is not periodic", model.name())));
    }
    if !nt.is_power_of_two() || nt < 8 * max_order.max(1) {
        return Err(Error::Config(format!(
            "quadrature size {nt} must be a power of two and at least 8·P = {}",
            8 * max_order
        )));
    }
    let period = model.require_period()?;
    let d = model.dim();
    let samples: Vec<ComplexMatrix> = (0..nt).map(|n| model.sample(period * n as f64 / nt as f64)).collect();
    let twiddle: Vec<C64> = (0..nt)
        .map(|n| C64::new(0.0, -2.0 * PI * n as f64 / nt as f64).exp())
        .collect();
    let p_max = max_order as i64;
    let blocks: Vec<ComplexMatrix> = (-p_max..=p_max)
        .map(|p| {
            let mut acc = ComplexMatrix::zeros(d);
            for (n, h) in samples.iter().enumerate() {
                let w = twiddle[(p * n as i64).rem_euclid(nt as i64) as usize];
                for (a, x) in acc.as_mut_slice().iter_mut().zip(h.as_slice()) {
                    *a += w * x;
                }
            }
            acc.scale_real(1.0 / nt as f64)
        })
        .collect();
    let tail_start = max_order - max_order / 4;
    let tail_norm = blocks
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as i64 - p_max).unsigned_abs() as usize >= tail_start.max(1))
        .map(|(_, b)| b.frobenius_norm())
        .fold(0.0, f64::max);
    Ok(HarmonicSet {
        omega: 2.0 * PI / period,
        max_order,
        quadrature_points: nt,
        blocks,
        tail_norm,
    })
}

/// `max_p ‖h_p e^{−ηp} − (h_{−p} e^{ηp})†‖_F`.
pub fn hermitization_residual(h: &HarmonicSet, eta: f64) -> f64 {
    let p_max = h.max_order as i64;
    (-p_max..=p_max)
        .map(|p| {
            let a = h.get(p).expect("in range").scale_real((-eta * p as f64).exp());
            let b = h.get(-p).expect("in range").scale_real((eta * p as f64).exp()).adjoint();
            (&a - &b).frobenius_norm()
        })
        .fold(0.0, f64::max)
}

/// Truncated extended-zone operator `K_{m',m} = h_{m'−m} + δ_{m'm}·m'ω`, `m ∈ [−M, M]`.
#[derive(Clone, Debug, Serialize)]
pub struct SambeOperator {
    pub cutoff: usize,
    pub block_dim: usize,
    pub omega: f64,
    pub matrix: ComplexMatrix,
}

/// Harmonics beyond the available order are treated as zero.
pub fn sambe_build(h: &HarmonicSet, cutoff: usize) -> Result<SambeOperator> {
    if cutoff > h.max_order {
        return Err(Error::InsufficientHarmonics {
            cutoff,
            available: h.max_order,
        });
    }
    let d = h.dim();
    let blocks = 2 * cutoff + 1;
    let m = cutoff as i64;
    let mut k = ComplexMatrix::zeros(blocks * d);
    for (bi, mp) in (-m..=m).enumerate() {
        for (bj, mm) in (-m..=m).enumerate() {
            if let Some(hp) = h.get(mp - mm) {
                for i in 0..d {
                    for j in 0..d {
                        k[(bi * d + i, bj * d + j)] = hp[(i, j)];
                    }
                }
            }
        }
        for i in 0..d {
            k[(bi * d + i, bi * d + i)] += C64::new(mp as f64 * h.omega, 0.0);
        }
    }
    Ok(SambeOperator {
        cutoff,
        block_dim: d,
        omega: h.omega,
        matrix: k,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SambeSpectrum {
    pub eigenvalues: Vec<C64>,
    /// Per state, weight on each frequency site `m = −M…M`.
    pub populations: Vec<Vec<f64>>,
    pub peak_site: Vec<i64>,
    /// `|m_peak| ≤ M − margin`.
    pub interior: Vec<bool>,
    pub margin: usize,
    pub omega: f64,
}

impl SambeSpectrum {
    pub fn interior_eigenvalues(&self) -> Vec<C64> {
        self.eigenvalues
            .iter()
            .zip(&self.interior)
            .filter(|(_, &i)| i)
            .map(|(e, _)| *e)
            .collect()
    }

    /// Interior eigenvalues with the real part folded to `(−ω/2, ω/2]`.
    pub fn folded_interior(&self) -> Vec<C64> {
        let period = 2.0 * PI / self.omega;
        self.interior_eigenvalues()
            .iter()
            .map(|e| C64::new(fold_to_zone(e.re, period, 0.0), e.im))
            .collect()
    }
}

pub fn sambe_spectrum(s: &SambeOperator) -> Result<SambeSpectrum> {
    sambe_spectrum_with_margin(s, INTERIOR_MARGIN)
}

pub fn sambe_spectrum_with_margin(s: &SambeOperator, margin: usize) -> Result<SambeSpectrum> {
    let dec = eig(&s.matrix)?;
    let d = s.block_dim;
    let sites = 2 * s.cutoff + 1;
    let mut populations = Vec::with_capacity(dec.dim());
    let mut peak_site = Vec::with_capacity(dec.dim());
    let mut interior = Vec::with_capacity(dec.dim());
    for j in 0..dec.dim() {
        let col = dec.vectors.column(j);
        let total: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        let pops: Vec<f64> = (0..sites)
            .map(|b| col[b * d..(b + 1) * d].iter().map(|z| z.norm_sqr()).sum::<f64>() / total)
            .collect();
        let (arg, _) = pops
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
        let m = arg as i64 - s.cutoff as i64;
        peak_site.push(m);
        interior.push(m.unsigned_abs() as usize + margin <= s.cutoff);
        populations.push(pops);
    }
    Ok(SambeSpectrum {
        eigenvalues: dec.eigenvalues,
        populations,
        peak_site,
        interior,
        margin,
        omega: s.omega,
    })
}

/// Harmonics with `P = 2M` and default quadrature, then the Sambe spectrum.
pub fn sambe_for_model(model: &ModelSpec, cutoff: usize) -> Result<SambeSpectrum> {
    let p = 2 * cutoff;
    let h = harmonics(model, p, default_quadrature(p))?;
    sambe_spectrum(&sambe_build(&h, cutoff)?)
}

/// Smallest `2|Re ε|` of folded interior Sambe eigenvalues over `nk` momenta in `[0, π]`.
pub fn sambe_zero_gap(model: &ModelSpec, nk: usize, cutoff: usize) -> Result<f64> {
    if model.momentum().is_none() {
        return Err(Error::Config("zero-gap scan needs a momentum-space model".into()));
    }
    let nk = nk.max(2);
    let gaps: Vec<f64> = (0..nk)
        .into_par_iter()
        .map(|i| {
            let k = PI * i as f64 / (nk - 1) as f64;
            let s = sambe_for_model(&model.at_momentum(k)?, cutoff)?;
            Ok(s.folded_interior().iter().map(|e| 2.0 * e.re.abs()).fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(f64::INFINITY, f64::min))
}

/// Parameters of the two-band case-II chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Case2Params {
    pub t1: f64,
    pub t2: f64,
    pub p: f64,
    pub mu0: f64,
    pub omega: f64,
    pub k: f64,
}

/// Hermitian two-band model reached from the case-II chain by the temporal deformation:
/// off-diagonal `−t₁ − t₂e^{∓ik}`, diagonal `±(2p cos k − μ₀) sin ωt`.
pub fn deformed_case2_model(c: Case2Params) -> ModelSpec {
    BipartiteChainSpec::hermitian(Lattice::Momentum { k: c.k }, DriveSpec::new(c.omega), c.t1, c.t2, c.p, c.mu0).into()
}

/// The undeformed case-II chain (temporal factors on the hoppings, `iω sin ωt − ω/2` on site).
pub fn undeformed_case2_model(c: Case2Params) -> ModelSpec {
    BipartiteChainSpec::temporal_only(Lattice::Momentum { k: c.k }, DriveSpec::new(c.omega), c.t1, c.t2, c.p, c.mu0)
        .into()
}

/// Closed-form harmonic `h_p` of the undeformed case-II chain:
/// `h_p^{ab} = A·I_{p+1}(2)`, `h_p^{ba} = B·(−1)^{p−1} I_{p−1}(2)` with
/// `A = −t₁ − t₂e^{−ik}`, `B = −t₁ − t₂e^{ik}`; the diagonal carries only
/// `p = 0` (`±ω/2`) and `p = ±1` (`∓iD/2`, `D = 2p cos k − μ₀ − iω`).
pub fn case2_undeformed_harmonic(c: Case2Params, order: i32) -> Result<ComplexMatrix> {
    let a = -c.t1 - c.t2 * C64::new(0.0, -c.k).exp();
    let b = -c.t1 - c.t2 * C64::new(0.0, c.k).exp();
    let mut h = ComplexMatrix::zeros(2);
    h[(0, 1)] = a * modified_bessel_i(order + 1, 2.0)?;
    let sign = if (order - 1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    h[(1, 0)] = b * sign * modified_bessel_i(order - 1, 2.0)?;
    let drive = C64::new(2.0 * c.p * c.k.cos() - c.mu0, -c.omega);
    // D sin ωt = D (e^{iωt} − e^{−iωt}) / 2i
    let diag = match order {
        0 => C64::new(c.omega / 2.0, 0.0),
        1 => drive / (2.0 * I),
        -1 => -drive / (2.0 * I),
        _ => C64::new(0.0, 0.0),
    };
    h[(0, 0)] = diag;
    h[(1, 1)] = -diag;
    Ok(h)
}

/// Modified Bessel function of the first kind `I_n(x)` by its power series,
/// for `|n| ≤ 64` and `|x| ≤ 20`.
pub fn modified_bessel_i(n: i32, x: f64) -> Result<f64> {
    if n.unsigned_abs() > 64 {
        return Err(Error::Domain(format!("order {n} outside |n| ≤ 64")));
    }
    if !(x.abs() <= 20.0) {
        return Err(Error::Domain(format!("argument {x} outside |x| ≤ 20")));
    }
    let n = n.unsigned_abs();
    let half = x.abs() / 2.0;
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
    }
    let mut sum = term;
    let q = half * half;
    let mut m = 0u32;
    while term > 1e-17 * sum || m < 2 {
        m += 1;
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if m > 500 {
            break;
        }
    }
    // I_n(−x) = (−1)^n I_n(x)
    Ok(if x < 0.0 && n % 2 == 1 { -sum } else { sum })
}

#[derive(Clone, Debug, Serialize)]
pub struct StarkStudy {
    pub spec: StarkChainSpec,
    /// Sorted by real part.
    pub eigenvalues: Vec<C64>,
    /// `ρ_j` per state (rows follow `eigenvalues`).
    pub populations: Vec<Vec<f64>>,
    pub argmax_site: Vec<usize>,
    /// Median spacing of the middle half of the sorted real eigenvalues.
    pub ladder_spacing_estimate: f64,
    /// `‖D⁻¹HD − H_herm‖_F` with `D = diag(e^{−βl})`.
    pub gauge_residual: f64,
    /// Largest `1 − |⟨v_NH, D·v_H⟩|` over states (unit vectors).
    pub vector_residual: f64,
    pub condition_estimate: f64,
}

pub fn stark_chain_study(spec: &StarkChainSpec) -> Result<StarkStudy> {
    spec.validate()?;
    let n = spec.sites;
    let h = spec.hamiltonian();
    let herm = spec.hermitian_partner();
    let beta = spec.beta();
    let d: Vec<C64> = (0..n).map(|l| C64::new((-beta * l as f64).exp(), 0.0)).collect();
    let gauged = ComplexMatrix::from_fn(n, |i, j| h[(i, j)] * (beta * (i as f64 - j as f64)).exp());
    let gauge_residual = (&gauged - &herm).frobenius_norm();

    let dec = eig(&h)?;
    let dec_h = eig(&herm)?;
    let mut populations = Vec::with_capacity(n);
    let mut argmax_site = Vec::with_capacity(n);
    let mut vector_residual = 0.0f64;
    for j in 0..n {
        let v = dec.vectors.column(j);
        let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let rho: Vec<f64> = v.iter().map(|z| z.norm_sqr() / total).collect();
        let (arg, _) = rho
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
        argmax_site.push(arg);
        populations.push(rho);

        let mapped: Vec<C64> = dec_h.vectors.column(j).iter().zip(&d).map(|(x, s)| x * s).collect();
        let mn: f64 = mapped.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let overlap: C64 = v.iter().zip(&mapped).map(|(a, b)| a.conj() * b).sum::<C64>() / (mn * total.sqrt());
        vector_residual = vector_residual.max(1.0 - overlap.norm());
    }
    let re: Vec<f64> = dec.eigenvalues.iter().map(|z| z.re).collect();
    let lo = n / 4;
    let hi = (3 * n / 4).max(lo + 2).min(n);
    let mut gaps: Vec<f64> = re[lo..hi].windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(f64::total_cmp);
    let ladder_spacing_estimate = gaps.get(gaps.len() / 2).copied().unwrap_or(0.0);
    Ok(StarkStudy {
        spec: spec.clone(),
        eigenvalues: dec.eigenvalues,
        populations,
        argmax_site,
        ladder_spacing_estimate,
        gauge_residual,
        vector_residual,
        condition_estimate: dec.condition_estimate,
    })
}
