//! Real-operation counts for the single-cycle detector versus the energy
//! detector, assuming a radix-2 FFT for the spectrum.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexityReport {
    pub n: u64,
    pub l: u64,
    pub proposed_real_mul: u64,
    pub proposed_real_add: u64,
    pub energy_real_mul: u64,
    pub energy_real_add: u64,
}

impl ComplexityReport {
    pub fn log2_n(&self) -> u32 {
        self.n.trailing_zeros()
    }

    /// proposed / energy multiplies, `log2(N)/2 + 5L/(4N)`.
    pub fn mul_ratio(&self) -> f64 {
        self.proposed_real_mul as f64 / self.energy_real_mul as f64
    }

    /// proposed / energy additions, `log2(N) + L/N`.
    pub fn add_ratio(&self) -> f64 {
        self.proposed_real_add as f64 / self.energy_real_add as f64
    }
}

/// Operation counts at transform length `n` (a power of two) and smoothing
/// length `l`. `l` is taken verbatim; it need not be odd.
pub fn complexity_model(n: u64, l: u64) -> Result<ComplexityReport> {
    if !n.is_power_of_two() {
        return Err(Error::config(format!(
            "operation counts assume a radix-2 FFT; n = {n} is not a power of two"
        )));
    }
    if l == 0 {
        return Err(Error::config("smoothing length must be at least 1"));
    }
    let nlog = n * u64::from(n.trailing_zeros());
    Ok(ComplexityReport {
        n,
        l,
        proposed_real_mul: 2 * nlog + 5 * l,
        proposed_real_add: 3 * nlog + 3 * l,
        energy_real_mul: 4 * n,
        energy_real_add: 3 * n,
    })
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "l={}", self.l)?;
        writeln!(f, "proposed_real_mul={}", self.proposed_real_mul)?;
        writeln!(f, "proposed_real_add={}", self.proposed_real_add)?;
        writeln!(f, "energy_real_mul={}", self.energy_real_mul)?;
        writeln!(f, "energy_real_add={}", self.energy_real_add)?;
        writeln!(f, "log2_n={}", self.log2_n())?;
        writeln!(f, "mul_ratio={}", self.mul_ratio())?;
        write!(f, "add_ratio={}", self.add_ratio())
    }
}
