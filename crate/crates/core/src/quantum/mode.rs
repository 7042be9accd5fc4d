use num_complex::Complex64;

use super::laguerre::laguerre_scaled;
use super::ModeLabel;

/// Laguerre-Gaussian transverse profile `<rho, phi | n_+, n_->` in units of
/// the magnetic length.
pub fn spatial_mode(rho: f64, phi: f64, mode: ModeLabel) -> Complex64 {
    let n_r = mode.n_r();
    let l = mode.l();
    let abs_l = l.unsigned_abs() as u32;
    if rho == 0.0 && abs_l > 0 {
        return Complex64::new(0.0, 0.0);
    }
    let x = rho * rho;
    let (lag, lag_scale) = laguerre_scaled(n_r, abs_l, x);
    if lag == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let log_norm =
        0.5 * (libm::lgamma(n_r as f64 + 1.0) - libm::lgamma((n_r + abs_l) as f64 + 1.0) - std::f64::consts::PI.ln());
    let radial_log = if abs_l > 0 { abs_l as f64 * rho.ln() } else { 0.0 };
    let magnitude = (log_norm + radial_log - 0.5 * x + lag_scale + lag.abs().ln()).exp() * lag.signum();
    Complex64::from_polar(magnitude, l as f64 * phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn values_on_axis() {
        let v = spatial_mode(0.0, 0.3, ModeLabel::new(0, 0));
        assert!((v.re - 1.0 / PI.sqrt()).abs() < 1e-15 && v.im == 0.0);
        for m in [ModeLabel::new(1, 0), ModeLabel::new(0, 3), ModeLabel::new(4, 2)] {
            assert_eq!(spatial_mode(0.0, 1.0, m), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn vortex_phase_winds_with_l() {
        let m = ModeLabel::new(0, 2);
        let a = spatial_mode(0.8, 0.0, m);
        let b = spatial_mode(0.8, 0.5, m);
        assert!(((b / a).arg() + 1.0).abs() < 1e-12);
    }
}
