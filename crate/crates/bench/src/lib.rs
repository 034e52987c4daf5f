//! Fixtures shared by the kernel benchmarks.

use nonfloquet_core::freqspace::{deformed_case2_model, harmonics, sambe_build, Case2Params};
use nonfloquet_core::{BipartiteChainSpec, Boundary, ComplexMatrix, DriveSpec, Lattice, ModelSpec, C64};

/// Deterministic dense matrix with entries in `[-1, 1] + i[-1, 1]`.
pub fn dense(n: usize, seed: u64) -> ComplexMatrix {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    ComplexMatrix::from_fn(n, |_, _| C64::new(next(), next()))
}

/// Open skin-effect chain with `cells` unit cells at ω = 0.5.
pub fn skin_chain(cells: usize) -> ModelSpec {
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
    .into()
}

/// Sambe matrix of the deformed momentum chain at ω = 200, `M = cutoff`.
pub fn sambe_matrix(cutoff: usize) -> ComplexMatrix {
    let m = deformed_case2_model(Case2Params {
        t1: 20.0,
        t2: 200.0,
        p: -40.0,
        mu0: -1.0,
        omega: 200.0,
        k: 0.7,
    });
    let h = harmonics(&m, 2 * cutoff, 1024).expect("periodic model");
    sambe_build(&h, cutoff).expect("cutoff within harmonics").matrix
}
