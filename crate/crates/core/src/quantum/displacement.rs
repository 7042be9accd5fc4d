use num_complex::Complex64;

use super::laguerre::laguerre_scaled;
use super::Circular;

/// Displacement parameters `kappa_sigma = (b rho_H k_perp / 2) e^{i sigma phi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParam {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl DisplacementParam {
    /// `b` is the envelope, `k_perp_scaled` is `rho_H k_perp` and `phi` the
    /// photon azimuth.
    pub fn new(b: f64, k_perp_scaled: f64, phi: f64) -> Self {
        let magnitude = 0.5 * b * k_perp_scaled;
        DisplacementParam {
            plus: Complex64::from_polar(magnitude, phi),
            minus: Complex64::from_polar(magnitude, -phi),
        }
    }

    pub fn zero() -> Self {
        DisplacementParam {
            plus: Complex64::new(0.0, 0.0),
            minus: Complex64::new(0.0, 0.0),
        }
    }

    pub fn get(&self, sigma: Circular) -> Complex64 {
        match sigma {
            Circular::Plus => self.plus,
            Circular::Minus => self.minus,
        }
    }
}

fn ln_factorial(n: u32) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Form factor `<n_f| exp[-i(kappa a + kappa^* a^dagger)] |n_i>`, i.e. the
/// displacement operator `D(alpha)` at `alpha = -i kappa^*`.
pub fn form_factor(n_f: u32, n_i: u32, kappa: Complex64) -> Complex64 {
    let (n, d, base) = if n_f >= n_i {
        (n_i, n_f - n_i, Complex64::new(0.0, -1.0) * kappa.conj())
    } else {
        (n_f, n_i - n_f, Complex64::new(0.0, -1.0) * kappa)
    };
    let x = kappa.norm_sqr();
    if x == 0.0 {
        return if d == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let (lag, lag_scale) = laguerre_scaled(n, d, x);
    if lag == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let log_mag = d as f64 * kappa.norm().ln() + 0.5 * (ln_factorial(n) - ln_factorial(n + d)) - 0.5 * x
        + lag_scale
        + lag.abs().ln();
    let phase = Complex64::from_polar(1.0, d as f64 * base.arg());
    phase * (lag.signum() * log_mag.exp())
}
