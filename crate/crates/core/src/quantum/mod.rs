//! Fock-space machinery of the circular two-dimensional oscillator.

mod coeffs;
mod displacement;
mod laguerre;
mod mode;
pub mod oracle;

pub use coeffs::{c_coeffs, p_weight, CircCoeffs, CoefficientBranch};
pub use displacement::{form_factor, DisplacementParam};
pub use laguerre::{laguerre, laguerre_scaled};
pub use mode::spatial_mode;
pub use oracle::oracle_displacement;

use std::fmt;

/// Circular component index `sigma = +-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Circular {
    Plus,
    Minus,
}

impl Circular {
    pub const BOTH: [Circular; 2] = [Circular::Plus, Circular::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Circular::Plus => 1.0,
            Circular::Minus => -1.0,
        }
    }

    pub fn other(self) -> Circular {
        match self {
            Circular::Plus => Circular::Minus,
            Circular::Minus => Circular::Plus,
        }
    }
}

/// Circular quantum numbers `(n_+, n_-)` of an oscillator eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeLabel {
    pub n_plus: u32,
    pub n_minus: u32,
}

impl ModeLabel {
    pub fn new(n_plus: u32, n_minus: u32) -> Self {
        ModeLabel { n_plus, n_minus }
    }

    /// Mode with radial index `n_r` and orbital projection `l`.
    pub fn from_radial(n_r: u32, l: i64) -> Self {
        let extra = l.unsigned_abs() as u32;
        if l >= 0 {
            ModeLabel::new(n_r + extra, n_r)
        } else {
            ModeLabel::new(n_r, n_r + extra)
        }
    }

    pub fn n_r(&self) -> u32 {
        self.n_plus.min(self.n_minus)
    }

    pub fn l(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    /// Total excitation `N = n_+ + n_-`.
    pub fn total(&self) -> i64 {
        self.n_plus as i64 + self.n_minus as i64
    }

    pub fn component(&self, sigma: Circular) -> u32 {
        match sigma {
            Circular::Plus => self.n_plus,
            Circular::Minus => self.n_minus,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_plus, self.n_minus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_labels() {
        let m = ModeLabel::new(5, 2);
        assert_eq!((m.n_r(), m.l(), m.total()), (2, 3, 7));
        assert_eq!(ModeLabel::from_radial(2, 3), m);
        assert_eq!(ModeLabel::from_radial(1, -4), ModeLabel::new(1, 5));
        assert_eq!(m.to_string(), "(5,2)");
    }
}
