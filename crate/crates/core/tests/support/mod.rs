//! Property checks shared by the property suite and the acceptance harness.
#![allow(dead_code)]

use std::f64::consts::PI;

use nonfloquet_core::diagnostics::localization_factor;
use nonfloquet_core::evolution::{floquet_operator, floquet_spectrum, integrated_trace};
use nonfloquet_core::freqspace::{harmonics, sambe_build, sambe_spectrum};
use nonfloquet_core::linalg::{determinant, eigvals, expm};
use nonfloquet_core::spectrum::matched_max_deviation;
use nonfloquet_core::topology::winding_numbers;
use nonfloquet_core::{BipartiteChainSpec, ComplexMatrix, DriveSpec, Error, FourierModel, Lattice, ModelSpec, PropagatorRequest, C64};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn complex_matrix(n: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
        ComplexMatrix::from_fn(n, |i, j| C64::new(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]) * scale)
    })
}

pub fn sized_matrix(max: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max).prop_flat_map(move |n| complex_matrix(n, scale))
}

pub fn hermitian(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.adjoint()).scale_real(0.5)
}

/// `H(t) = h₀ + h₁e^{iωt} + h₋₁e^{−iωt}`, optionally Hermitian.
#[derive(Clone, Debug)]
pub struct DriveCase {
    pub omega: f64,
    pub h0: ComplexMatrix,
    pub h1: ComplexMatrix,
    pub hm1: ComplexMatrix,
}

impl DriveCase {
    pub fn model(&self) -> ModelSpec {
        FourierModel::new(self.omega, vec![(0, self.h0.clone()), (1, self.h1.clone()), (-1, self.hm1.clone())])
            .unwrap()
            .into()
    }
}

pub fn drive(max_dim: usize, omega: std::ops::Range<f64>, scale: f64, hermitian_drive: bool) -> impl Strategy<Value = DriveCase> {
    (1..=max_dim, omega).prop_flat_map(move |(n, w)| {
        (complex_matrix(n, scale), complex_matrix(n, scale), complex_matrix(n, scale)).prop_map(move |(a, b, c)| {
            if hermitian_drive {
                DriveCase {
                    omega: w,
                    h0: hermitian(&a),
                    hm1: b.adjoint(),
                    h1: b,
                }
            } else {
                DriveCase {
                    omega: w,
                    h0: a,
                    h1: b,
                    hm1: c,
                }
            }
        })
    })
}

/// Absolute 1e-12 while `‖A dt‖₁ ≤ 4`; beyond that the floor is set by
/// `‖e^{-iAdt}‖‖e^{iAdt}‖·ε`, so the bound scales with it.
pub fn check_expm_inverse_product(a: &ComplexMatrix, dt: f64) -> Result<(), TestCaseError> {
    let norm = a.one_norm() * dt.abs();
    let dt = if norm > 10.0 { dt * 10.0 / norm } else { dt };
    let forward = expm(a, dt).unwrap();
    let backward = expm(a, -dt).unwrap();
    let err = (&(&forward * &backward) - &ComplexMatrix::identity(a.dim())).max_abs();
    let tol = if norm <= 4.0 {
        1e-12
    } else {
        1e-12_f64.max(1e-14 * forward.one_norm() * backward.one_norm())
    };
    prop_assert!(err < tol, "‖e^{{-iAdt}}e^{{iAdt}} − I‖ = {err:e} (tolerance {tol:e})");
    Ok(())
}

/// Relative error of `det U(T)` against `exp(−i∫tr H)` on the same slicing.
pub fn check_liouville(case: &DriveCase, slices: usize) -> Result<(), TestCaseError> {
    let m = case.model();
    let period = 2.0 * PI / case.omega;
    let u = floquet_operator(&m, 0.0, slices).unwrap();
    let tr = integrated_trace(&PropagatorRequest {
        model: &m,
        t0: 0.0,
        t1: period,
        slices,
    })
    .unwrap();
    let expected = (-C64::new(0.0, 1.0) * tr).exp();
    let err = (determinant(&u) / expected - 1.0).norm();
    prop_assert!(err < 1e-8, "Liouville mismatch {err:e}");
    Ok(())
}

pub fn check_unitary_modulus(case: &DriveCase, slices: usize) -> Result<(), TestCaseError> {
    let u = floquet_operator(&case.model(), 0.0, slices).unwrap();
    let worst = eigvals(&u).unwrap().iter().map(|l| (l.norm() - 1.0).abs()).fold(0.0, f64::max);
    prop_assert!(worst < 1e-10, "max ||λ|−1| = {worst:e}");
    Ok(())
}

pub fn check_start_invariance(case: &DriveCase, t0_fraction: f64, slices: usize) -> Result<(), TestCaseError> {
    let m = case.model();
    let period = 2.0 * PI / case.omega;
    let a = floquet_spectrum(&m, 0.0, slices).unwrap();
    let b = floquet_spectrum(&m, t0_fraction * period, slices).unwrap();
    let dev = matched_max_deviation(&a.quasienergies, &b.quasienergies, period).unwrap();
    prop_assert!(dev < 1e-8, "start-time spectral deviation {dev:e}");
    Ok(())
}

/// Counterpart chain (ω = 0.5 reference couplings) in momentum space.
pub fn counterpart_momentum(mu0: f64) -> ModelSpec {
    BipartiteChainSpec::hermitian(Lattice::Momentum { k: 0.0 }, DriveSpec::new(0.5), 0.05, 0.5, -0.1, mu0).into()
}

pub fn check_winding_stability(mu0: f64, nk: usize, slices: usize) -> Result<(), TestCaseError> {
    let m = counterpart_momentum(mu0);
    let coarse = match winding_numbers(&m, nk, slices) {
        Err(Error::Gapless { .. }) => return Err(TestCaseError::reject("gapless")),
        other => other.map_err(|e| TestCaseError::fail(format!("μ0={mu0}: {e}")))?,
    };
    let fine = winding_numbers(&m, 2 * nk, slices).map_err(|e| TestCaseError::fail(format!("μ0={mu0}: {e}")))?;
    for (i, w) in coarse.phase_accumulations.iter().enumerate() {
        let x = -w / (2.0 * PI);
        prop_assert!((x - x.round()).abs() < 1e-6, "frame {i} accumulates {x}·2π");
    }
    prop_assert_eq!((coarse.w1, coarse.w2), (fine.w1, fine.w2), "Nk doubling changed W at μ0={}", mu0);
    Ok(())
}

/// Interior Sambe eigenvalues shifted by one block reappear in the spectrum.
pub fn check_sambe_translation(case: &DriveCase, cutoff: usize) -> Result<(), TestCaseError> {
    let h = harmonics(&case.model(), 2 * cutoff, 1024).unwrap();
    let s = sambe_spectrum(&sambe_build(&h, cutoff).unwrap()).unwrap();
    let top = cutoff as i64 - s.margin as i64;
    for (j, e) in s.eigenvalues.iter().enumerate() {
        if !s.interior[j] || s.peak_site[j] >= top {
            continue;
        }
        let target = e + case.omega;
        let d = s.eigenvalues.iter().map(|x| (x - target).norm()).fold(f64::INFINITY, f64::min);
        prop_assert!(d < 1e-8, "replica of {e} missing (distance {d:e})");
    }
    Ok(())
}

pub fn check_localization_bounds(states: &ComplexMatrix) -> Result<(), TestCaseError> {
    let n = states.dim() as f64;
    let r = match localization_factor(states) {
        Ok(r) => r,
        Err(_) => return Err(TestCaseError::reject("zero column")),
    };
    for i in &r.factors {
        prop_assert!(*i >= -1e-15 && *i <= 1.0 - 1.0 / n + 1e-15, "I = {i} outside [0, 1 − 1/N]");
    }
    Ok(())
}

fn fmt<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{e}"))
}

/// The seven core properties with their strategies, run through one runner each.
pub fn run_core_properties(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
    let runner = |n: u32| {
        TestRunner::new_with_rng(
            Config {
                cases: n,
                failure_persistence: None,
                ..Config::default()
            },
            TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]),
        )
    };
    let mut out = Vec::new();
    out.push((
        "expm inverse product",
        fmt(runner(cases).run(&(sized_matrix(8, 3.0), -4.0f64..4.0), |(a, dt)| check_expm_inverse_product(&a, dt))),
    ));
    out.push((
        "Liouville determinant",
        fmt(runner(cases).run(&drive(4, 0.5..3.0, 0.3, false), |c| check_liouville(&c, 256))),
    ));
    out.push((
        "unit modulus for Hermitian drives",
        fmt(runner(cases).run(&drive(4, 0.5..3.0, 0.5, true), |c| check_unitary_modulus(&c, 256))),
    ));
    out.push((
        "similarity across start time",
        fmt(runner(cases / 2).run(&(drive(4, 2.0..6.0, 0.25, false), 0.0f64..1.0), |(c, f)| {
            check_start_invariance(&c, f, 4096)
        })),
    ));
    out.push((
        "winding integrality and Nk doubling",
        fmt(runner(cases / 4).run(&prop_oneof![-0.95f64..-0.2, -1.6f64..-1.45], |mu| {
            check_winding_stability(mu, 64, 512)
        })),
    ));
    out.push((
        "Sambe ladder translation",
        fmt(runner(cases / 2).run(&drive(3, 5.0..10.0, 0.05, false), |c| check_sambe_translation(&c, 10))),
    ));
    out.push((
        "localization bounds",
        fmt(runner(cases).run(&sized_matrix(12, 1.0), |m| check_localization_bounds(&m))),
    ));
    out
}
