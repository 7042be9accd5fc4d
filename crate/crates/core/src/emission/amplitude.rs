use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use super::{check_angles, phase_from_sample, PhotonKinematics, TransitionContext};
use crate::ermakov::EnvelopeSample;
use crate::error::{Error, Result};
use crate::quadrature::gl15;
use crate::quantum::{c_coeffs, form_factor, p_weight, CircCoeffs, Circular, DisplacementParam, ModeLabel};

/// Source of the ladder coefficients. [`c_coeffs`] in normal use; the
/// verification suite swaps in deliberately broken versions.
pub type CoeffFn = fn(f64, f64, f64, Circular) -> CircCoeffs;

const REL_TOL: f64 = 1e-10;
const MAX_PANELS: usize = 1 << 22;

/// Circular polarization component `((cos theta - lambda sigma)/sqrt 2) e^{i sigma phi}`.
pub fn polarization_component(theta: f64, phi: f64, lambda: i32, sigma: Circular) -> Complex64 {
    let s = sigma.sign();
    Complex64::from_polar((theta.cos() - lambda as f64 * s) * FRAC_1_SQRT_2, s * phi)
}

/// True if a dipole (`kappa = 0`) amplitude can be nonzero: exactly one
/// circular quantum number changes, by one unit.
pub fn dipole_allowed(initial: ModeLabel, final_mode: ModeLabel) -> bool {
    let dp = initial.n_plus.abs_diff(final_mode.n_plus);
    let dm = initial.n_minus.abs_diff(final_mode.n_minus);
    dp + dm == 1
}

fn element(
    s: &EnvelopeSample,
    ctx: &TransitionContext,
    theta: f64,
    phi: f64,
    lambda: i32,
    kappa: DisplacementParam,
    coeffs: CoeffFn,
) -> Complex64 {
    let (ni, nf) = (ctx.initial(), ctx.final_mode());
    let mut sum = Complex64::new(0.0, 0.0);
    for sigma in Circular::BOTH {
        let other = sigma.other();
        let spectator = form_factor(nf.component(other), ni.component(other), kappa.get(other));
        if spectator == Complex64::new(0.0, 0.0) {
            continue;
        }
        let c = coeffs(s.b, s.b_prime, s.omega, sigma).on_branch(ctx.branch());
        let p = p_weight(nf.component(sigma), ni.component(sigma), kappa.get(sigma), &c);
        sum += polarization_component(theta, phi, lambda, sigma).conj() * p * spectator;
    }
    0.5 * sum
}

/// Matrix element multiplying `exp(i delta_phi)` in `s_perp`.
pub fn transverse_element(
    z: f64,
    ctx: &TransitionContext,
    photon: &PhotonKinematics,
    dipole: bool,
) -> Result<Complex64> {
    let s = ctx.trajectory().sample(z)?;
    let kappa = if dipole {
        DisplacementParam::zero()
    } else {
        DisplacementParam::new(s.b, photon.k_perp_scaled, photon.phi)
    };
    Ok(element(
        &s,
        ctx,
        photon.theta,
        photon.phi,
        photon.lambda,
        kappa,
        c_coeffs,
    ))
}

/// Amplitude density `s_perp(z)`. The photon energy is fixed by the
/// averaged bracket of the channel.
pub fn s_perp(z: f64, ctx: &TransitionContext, theta: f64, phi: f64, lambda: i32, dipole: bool) -> Result<Complex64> {
    check_angles(theta, lambda)?;
    let s = ctx.trajectory().sample(z)?;
    if dipole {
        let el = element(&s, ctx, theta, phi, lambda, DisplacementParam::zero(), c_coeffs);
        if el == Complex64::new(0.0, 0.0) {
            return Ok(el);
        }
        let photon = ctx.photon(theta, phi, lambda)?;
        return Ok(el * Complex64::from_polar(1.0, phase_from_sample(&s, ctx, &photon)));
    }
    let photon = ctx.photon(theta, phi, lambda)?;
    let kappa = DisplacementParam::new(s.b, photon.k_perp_scaled, phi);
    let el = element(&s, ctx, theta, phi, lambda, kappa, c_coeffs);
    Ok(el * Complex64::from_polar(1.0, phase_from_sample(&s, ctx, &photon)))
}

/// `int_{-L/2}^{L/2} s_perp dz`.
pub fn amplitude_integral(
    ctx: &TransitionContext,
    theta: f64,
    phi: f64,
    lambda: i32,
    dipole: bool,
) -> Result<Complex64> {
    amplitude_integral_with(ctx, theta, phi, lambda, dipole, c_coeffs)
}

pub fn amplitude_integral_with(
    ctx: &TransitionContext,
    theta: f64,
    phi: f64,
    lambda: i32,
    dipole: bool,
    coeffs: CoeffFn,
) -> Result<Complex64> {
    check_angles(theta, lambda)?;
    let zero = Complex64::new(0.0, 0.0);
    if ctx.length() == 0.0 || (dipole && !dipole_allowed(ctx.initial(), ctx.final_mode())) {
        return Ok(zero);
    }
    let photon = ctx.photon(theta, phi, lambda)?;
    let traj = ctx.trajectory();
    let integrand = |z: f64| {
        let s = traj.sample_unchecked(z);
        let kappa = if dipole {
            DisplacementParam::zero()
        } else {
            DisplacementParam::new(s.b, photon.k_perp_scaled, phi)
        };
        let el = element(&s, ctx, theta, phi, lambda, kappa, coeffs);
        el * Complex64::from_polar(1.0, phase_from_sample(&s, ctx, &photon))
    };

    let min_b = traj.min_b();
    let rate = photon.linear_phase_rate().abs()
        + ctx.delta_n().unsigned_abs() as f64 / (min_b * min_b)
        + ctx.delta_l().unsigned_abs() as f64;
    let half = 0.5 * ctx.length();
    let mut edges = vec![-half];
    edges.extend_from_slice(ctx.split_points());
    edges.push(half);
    oscillatory(&integrand, &edges, rate)
}

/// Composite Gauss-Legendre quadrature on the segments between `edges`,
/// starting from panels over which the phase advances by less than `pi/4`
/// at `phase_rate` and doubling until two levels agree.
fn oscillatory<F: Fn(f64) -> Complex64>(f: &F, edges: &[f64], phase_rate: f64) -> Result<Complex64> {
    let (x, w) = gl15();
    let base: Vec<usize> = edges
        .windows(2)
        .map(|e| ((e[1] - e[0]) * phase_rate / FRAC_PI_4).ceil().max(1.0) as usize)
        .collect();
    let mut peak = 0.0f64;
    let eval = |factor: usize, peak: &mut f64| {
        let mut total = Complex64::new(0.0, 0.0);
        for (seg, &n0) in edges.windows(2).zip(&base) {
            let n = n0 * factor;
            let h = (seg[1] - seg[0]) / n as f64;
            for k in 0..n {
                let mid = seg[0] + (k as f64 + 0.5) * h;
                let mut panel = Complex64::new(0.0, 0.0);
                for (xi, wi) in x.iter().zip(w) {
                    let v = f(mid + 0.5 * h * xi);
                    *peak = peak.max(v.norm());
                    panel += v * *wi;
                }
                total += panel * (0.5 * h);
            }
        }
        total
    };
    let total_base: usize = base.iter().sum();
    let mut factor = 1;
    let mut prev = eval(factor, &mut peak);
    loop {
        factor *= 2;
        let next = eval(factor, &mut peak);
        let diff = (next - prev).norm();
        let tol = REL_TOL * peak;
        if diff <= tol {
            return Ok(next);
        }
        if total_base * factor * 2 > MAX_PANELS {
            return Err(Error::QuadratureTolerance {
                achieved: diff,
                requested: tol,
            });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emission::rate::edge_argument;
    use crate::field::FieldProfile;
    use crate::quantum::oracle::{displacement_matrix, required_dim, Matrix};
    use crate::units::{derive_kinematics, BeamKinematics, LabSetup};
    use std::f64::consts::PI;

    fn kin() -> BeamKinematics {
        derive_kinematics(&LabSetup::new(100.0, 1.0, 30.0).unwrap()).unwrap()
    }

    fn closed_form(ell: f64, b0: f64, theta: f64, lambda: i32, length: f64, beta: f64) -> f64 {
        let x = edge_argument(theta, length, b0, beta);
        let pol = (1.0 - lambda as f64 * theta.cos()).powi(2) / 8.0;
        ell / (b0 * b0) * pol * length * length * x.sin().powi(4) / (x * x)
    }

    #[test]
    fn polarization_pair_sum() {
        // sum over lambda of |eps_{lambda, +}|^2 = 1 + cos^2 theta
        for theta in [0.0, 0.4, 1.3, PI] {
            let s: f64 = [1, -1]
                .iter()
                .map(|&l| polarization_component(theta, 0.2, l, Circular::Plus).norm_sqr())
                .sum();
            assert!((s - (1.0 + theta.cos().powi(2))).abs() < 1e-14);
        }
    }

    #[test]
    fn dipole_density_modulus() {
        let b0 = 1.14;
        let ell = 4;
        let ctx =
            TransitionContext::field_free(ModeLabel::new(ell, 0), ModeLabel::new(ell - 1, 0), kin(), 30.0, b0).unwrap();
        for (z, theta, lambda) in [(0.0, 1.0, 1), (0.0, 2.2, -1), (7.0, 0.3, 1)] {
            let s = s_perp(z, &ctx, theta, 0.4, lambda, true).unwrap();
            let c_mod = crate::ermakov::analytic_free(b0, z)
                .b
                .recip()
                .hypot(crate::ermakov::analytic_free(b0, z).b_prime);
            let eps = polarization_component(theta, 0.4, lambda, Circular::Plus).norm();
            let expect = 0.5 * c_mod * eps * (ell as f64).sqrt();
            assert!((s.norm() - expect).abs() < 1e-9 * expect, "z = {z}");
            if z == 0.0 {
                assert!((expect - 0.5 / b0 * eps * (ell as f64).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dipole_forbids_two_quanta() {
        let ctx = TransitionContext::field_free(ModeLabel::new(3, 0), ModeLabel::new(1, 0), kin(), 30.0, 1.14).unwrap();
        assert_eq!(ctx.delta_l(), 2);
        assert_eq!(s_perp(0.5, &ctx, 1.0, 0.0, 1, true).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(
            amplitude_integral(&ctx, 1.0, 0.0, 1, true).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn field_free_dipole_matches_closed_form() {
        let b0 = 1.14;
        let k = kin();
        let ctx = TransitionContext::field_free(ModeLabel::new(1, 0), ModeLabel::new(0, 0), k, 30.0, b0).unwrap();
        for (theta, lambda) in [(PI / 2.0, 1), (0.8, -1), (2.5, 1)] {
            let a = amplitude_integral(&ctx, theta, 0.0, lambda, true).unwrap();
            let expect = closed_form(1.0, b0, theta, lambda, 30.0, k.beta);
            assert!((a.norm_sqr() / expect - 1.0).abs() < 1e-8, "theta = {theta}");
        }
    }

    #[test]
    fn continuous_branch_gives_sinc() {
        // with the verbatim coefficients the integrand has one smooth phase:
        // |I|^2 = prefactor * L^2 sin^2(2X)/(2X)^2
        let b0 = 1.14;
        let k = kin();
        let ctx = TransitionContext::field_free(ModeLabel::new(1, 0), ModeLabel::new(0, 0), k, 30.0, b0)
            .unwrap()
            .with_branch(crate::quantum::CoefficientBranch::Continuous);
        let theta = 1.1;
        let a = amplitude_integral(&ctx, theta, 0.0, 1, true).unwrap();
        let x = edge_argument(theta, 30.0, b0, k.beta);
        let pol = (1.0 - theta.cos()).powi(2) / 8.0;
        let expect = pol / (b0 * b0) * 900.0 * (2.0 * x).sin().powi(2) / (4.0 * x * x);
        assert!((a.norm_sqr() / expect - 1.0).abs() < 1e-8);
    }

    #[test]
    fn shrinking_window() {
        use crate::quantum::CoefficientBranch;
        let ctx = |l, branch| {
            TransitionContext::field_free(ModeLabel::new(2, 0), ModeLabel::new(1, 0), kin(), l, 1.0)
                .unwrap()
                .with_branch(branch)
        };
        let amp = |l, branch| amplitude_integral(&ctx(l, branch), 1.0, 0.0, 1, true).unwrap().norm();
        let c = CoefficientBranch::Continuous;
        assert!((amp(2e-3, c) / amp(1e-3, c) - 2.0).abs() < 1e-5);
        // the principal branch flips sign at the waist, so the two halves
        // cancel to leading order
        let p = CoefficientBranch::PrincipalArctan;
        assert!((amp(2e-3, p) / amp(1e-3, p) - 4.0).abs() < 1e-4);
        assert_eq!(
            amplitude_integral(&ctx(0.0, p), 1.0, 0.0, 1, true).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    /// `<f| D_+ D_- (pi_bar in the single-mode form) |i>` built from
    /// truncated matrices.
    fn oracle_element(ctx: &TransitionContext, z: f64, photon: &PhotonKinematics) -> Complex64 {
        let s = ctx.trajectory().sample(z).unwrap();
        let kappa = DisplacementParam::new(s.b, photon.k_perp_scaled, photon.phi);
        let (ni, nf) = (ctx.initial(), ctx.final_mode());
        let mut sum = Complex64::new(0.0, 0.0);
        for sigma in Circular::BOTH {
            let other = sigma.other();
            let k_s = kappa.get(sigma);
            let k_o = kappa.get(other);
            let dim = required_dim(nf.component(sigma), ni.component(sigma) + 1, k_s).max(required_dim(
                nf.component(other),
                ni.component(other),
                k_o,
            ));
            let c = c_coeffs(s.b, s.b_prime, s.omega, sigma).on_branch(ctx.branch());
            let a = Matrix::lowering(dim);
            let pi_bar = a.scale(c.c_a).add(&a.adjoint().scale(c.c_adag));
            let d_sigma = displacement_matrix(k_s, dim).mul(&pi_bar);
            let d_other = displacement_matrix(k_o, dim);
            let p = d_sigma[(nf.component(sigma) as usize, ni.component(sigma) as usize)];
            let f = d_other[(nf.component(other) as usize, ni.component(other) as usize)];
            sum += polarization_component(photon.theta, photon.phi, photon.lambda, sigma).conj() * p * f;
        }
        0.5 * sum
    }

    #[test]
    fn beyond_dipole_matches_matrix_oracle() {
        // chi = 10 keeps kappa of order one
        let k = BeamKinematics { chi: 10.0, ..kin() };
        let profile = FieldProfile::gaussian(0.0, 3.0, -6.0, 6.0).unwrap();
        let ctx =
            TransitionContext::with_profile(ModeLabel::new(3, 1), ModeLabel::new(0, 0), k, 12.0, &profile, 0.9, 0.1)
                .unwrap();
        assert_eq!(ctx.delta_l(), 2);
        assert!(ctx.is_emitting());
        let photon = ctx.photon(1.2, 0.7, -1).unwrap();
        let mut nonzero = false;
        for z in [-4.0, -1.0, 0.5, 3.0] {
            let el = transverse_element(z, &ctx, &photon, false).unwrap();
            let oracle = oracle_element(&ctx, z, &photon);
            assert!((el - oracle).norm() < 1e-8 * oracle.norm().max(1e-3), "z = {z}");
            nonzero |= el.norm() > 1e-6;
        }
        assert!(nonzero);
    }
}
