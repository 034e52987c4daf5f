use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Open chain with asymmetric hopping in a linear potential:
/// `H[l][l+1] = t_L`, `H[l+1][l] = t_R`, `H[l][l] = α·l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarkChainSpec {
    pub sites: usize,
    pub t_left: f64,
    pub t_right: f64,
    pub alpha: f64,
}

impl StarkChainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::Config("stark chain needs at least two sites".into()));
        }
        if !(self.t_left > 0.0 && self.t_right > 0.0) {
            return Err(Error::Config("stark hoppings must be positive".into()));
        }
        if !(self.t_left.is_finite() && self.t_right.is_finite() && self.alpha.is_finite()) {
            return Err(Error::Config("stark parameters must be finite".into()));
        }
        Ok(())
    }

    /// `β` with `e^β = √(t_L/t_R)`.
    pub fn beta(&self) -> f64 {
        0.5 * (self.t_left / self.t_right).ln()
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        self.with_hoppings(self.t_left, self.t_right)
    }

    /// Symmetric chain with hopping `√(t_L·t_R)` and the same potential.
    pub fn hermitian_partner(&self) -> ComplexMatrix {
        let t = (self.t_left * self.t_right).sqrt();
        self.with_hoppings(t, t)
    }

    fn with_hoppings(&self, left: f64, right: f64) -> ComplexMatrix {
        let n = self.sites;
        let mut h = ComplexMatrix::zeros(n);
        for l in 0..n {
            h[(l, l)] = C64::new(self.alpha * l as f64, 0.0);
            if l + 1 < n {
                h[(l, l + 1)] = C64::new(left, 0.0);
                h[(l + 1, l)] = C64::new(right, 0.0);
            }
        }
        h
    }
}
