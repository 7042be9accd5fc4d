use num_complex::Complex64;

use super::displacement::form_factor;
use super::Circular;

/// Coefficients of `pi_{-sigma} = C_a a_sigma + C_adag a_sigma^dagger` for
/// the transformed kinetic momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircCoeffs {
    pub c_a: Complex64,
    pub c_adag: Complex64,
    pub sigma: Circular,
}

/// Phase convention for the coefficients.
///
/// `Continuous` is `b' - i sigma b Omega -+ i/b` verbatim. `PrincipalArctan`
/// writes each coefficient as `|C| exp(i arctan(Im C / Re C))` with the
/// principal arctangent, which keeps `Re C >= 0` and flips the overall sign
/// wherever `b' < 0`. In a field-free region it is the closed form
/// `C_a = (1/b0) exp(-i arctan(b0^2/z))` on both sides of the waist, and it is
/// the convention behind the `sin^4 X / X^2` edge envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientBranch {
    Continuous,
    #[default]
    PrincipalArctan,
}

impl CoefficientBranch {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientBranch::Continuous => "continuous",
            CoefficientBranch::PrincipalArctan => "principal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "continuous" => Some(CoefficientBranch::Continuous),
            "principal" => Some(CoefficientBranch::PrincipalArctan),
            _ => None,
        }
    }
}

impl CircCoeffs {
    /// Common sign applied to both coefficients under `branch`.
    pub fn branch_sign(&self, branch: CoefficientBranch) -> f64 {
        match branch {
            CoefficientBranch::Continuous => 1.0,
            // Re C_a = Re C_adag = b'
            CoefficientBranch::PrincipalArctan if self.c_a.re < 0.0 => -1.0,
            CoefficientBranch::PrincipalArctan => 1.0,
        }
    }

    pub fn on_branch(self, branch: CoefficientBranch) -> Self {
        let s = self.branch_sign(branch);
        CircCoeffs {
            c_a: self.c_a * s,
            c_adag: self.c_adag * s,
            sigma: self.sigma,
        }
    }
}

/// `C_a = b' - i sigma b Omega - i/b`, `C_adag = b' - i sigma b Omega + i/b`.
pub fn c_coeffs(b: f64, b_prime: f64, omega: f64, sigma: Circular) -> CircCoeffs {
    let shared = Complex64::new(b_prime, -sigma.sign() * b * omega);
    let inv = Complex64::new(0.0, 1.0 / b);
    CircCoeffs {
        c_a: shared - inv,
        c_adag: shared + inv,
        sigma,
    }
}

/// `P = C_a sqrt(n_i) F_{n_f, n_i-1} + C_adag sqrt(n_i+1) F_{n_f, n_i+1}`.
pub fn p_weight(n_f: u32, n_i: u32, kappa: Complex64, coeffs: &CircCoeffs) -> Complex64 {
    let mut p = coeffs.c_adag * ((n_i as f64 + 1.0).sqrt()) * form_factor(n_f, n_i + 1, kappa);
    if n_i > 0 {
        p += coeffs.c_a * (n_i as f64).sqrt() * form_factor(n_f, n_i - 1, kappa);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ermakov::analytic_free;
    use crate::quantum::oracle::{displacement_matrix, Matrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_field_substitution() {
        let plus = c_coeffs(1.0, 0.0, 1.0, Circular::Plus);
        assert_eq!((plus.c_a, plus.c_adag), (c(0.0, -2.0), c(0.0, 0.0)));
        let minus = c_coeffs(1.0, 0.0, 1.0, Circular::Minus);
        assert_eq!((minus.c_a, minus.c_adag), (c(0.0, 0.0), c(0.0, 2.0)));
    }

    #[test]
    fn field_free_closed_form() {
        let b0 = 1.14f64;
        for z in [-20.0, -3.0, -0.1, 0.2, 1.0, 7.5] {
            let e = analytic_free(b0, z);
            let coeffs = c_coeffs(e.b, e.b_prime, 0.0, Circular::Plus);
            let principal = coeffs.on_branch(CoefficientBranch::PrincipalArctan);
            let angle = (b0 * b0 / z).atan();
            let expect_a = Complex64::from_polar(1.0 / b0, -angle);
            let expect_adag = Complex64::from_polar(1.0 / b0, angle);
            assert!((principal.c_a - expect_a).norm() < 1e-12, "z = {z}");
            assert!((principal.c_adag - expect_adag).norm() < 1e-12, "z = {z}");
            assert!((coeffs.c_a.norm() - 1.0 / b0).abs() < 1e-12);
            assert!((coeffs.c_adag.norm() - 1.0 / b0).abs() < 1e-12);
            // the verbatim coefficients differ from the closed form by sign(z)
            let s = if z < 0.0 { -1.0 } else { 1.0 };
            assert!((coeffs.c_a - expect_a * s).norm() < 1e-12);
        }
    }

    #[test]
    fn raising_weight_from_ground() {
        let coeffs = c_coeffs(1.3, 0.4, 0.2, Circular::Minus);
        assert_eq!(p_weight(1, 0, c(0.0, 0.0), &coeffs), coeffs.c_adag);
        assert_eq!(p_weight(2, 0, c(0.0, 0.0), &coeffs), c(0.0, 0.0));
    }

    #[test]
    fn dipole_lowering_weight() {
        let coeffs = c_coeffs(1.3, 0.4, 0.0, Circular::Plus);
        for l in [1u32, 4, 100] {
            let p = p_weight(l - 1, l, c(0.0, 0.0), &coeffs);
            assert!((p - coeffs.c_a * (l as f64).sqrt()).norm() < 1e-12);
        }
    }

    #[test]
    fn weight_matches_matrix_oracle() {
        let coeffs = c_coeffs(0.9, -0.3, 0.6, Circular::Plus);
        let kappa = c(0.5, 0.0);
        let dim = 64;
        let a = Matrix::lowering(dim);
        let pi_bar = a.scale(coeffs.c_a).add(&a.adjoint().scale(coeffs.c_adag));
        // D(alpha) with alpha = -i kappa^*
        let product = displacement_matrix(kappa, dim).mul(&pi_bar);
        for (nf, ni) in [(3, 3), (2, 3), (5, 3), (0, 1)] {
            let v = p_weight(nf, ni, kappa, &coeffs);
            assert!((v - product[(nf as usize, ni as usize)]).norm() < 1e-9, "({nf},{ni})");
        }
    }
}
