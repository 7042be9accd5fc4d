//! Transition amplitudes and spontaneous emission rates.
//!
//! An amplitude is assembled from the Ermakov trajectory and the Fock-space
//! form factors, integrated over the interaction window `[-L/2, L/2]`, and
//! turned into a differential rate `dw/dtheta`. The field-free dipole channel
//! also has a closed form, which doubles as a check on the general path.

mod amplitude;
mod rate;

pub use amplitude::{
    amplitude_integral, amplitude_integral_with, dipole_allowed, polarization_component, s_perp, transverse_element,
    CoeffFn,
};
pub use rate::{
    edge_argument, fieldfree_curve, fieldfree_rate, general_rate_curve, normalized_fieldfree_rate, total_rate,
    RateCurve, RateMetadata, RateModel, TotalRate, REFINEMENT_LIMIT,
};

use std::f64::consts::PI;
use std::sync::Arc;

use crate::ermakov::{EnvelopeSample, ErmakovTrajectory, DEFAULT_REL_TOL};
use crate::error::{Error, Result};
use crate::field::FieldProfile;
use crate::quadrature::adaptive_gk15_split;
use crate::quantum::{CoefficientBranch, ModeLabel};
use crate::units::BeamKinematics;

/// Photon polarizations `lambda = +-1`.
pub const POLARIZATIONS: [i32; 2] = [1, -1];

/// Everything that is fixed for one `initial -> final` channel.
#[derive(Debug, Clone)]
pub struct TransitionContext {
    initial: ModeLabel,
    final_mode: ModeLabel,
    kin: BeamKinematics,
    length: f64,
    trajectory: Arc<ErmakovTrajectory>,
    branch: CoefficientBranch,
    mean_bracket: f64,
    lewis_origin: f64,
    larmor_origin: f64,
    splits: Vec<f64>,
}

/// `(b'^2 + 1/b^2 + Omega^2 b^2) dN + 2 Omega dl`.
fn transverse_bracket(s: &EnvelopeSample, delta_n: i64, delta_l: i64) -> f64 {
    let energy = s.b_prime * s.b_prime + 1.0 / (s.b * s.b) + s.omega * s.omega * s.b * s.b;
    energy * delta_n as f64 + 2.0 * s.omega * delta_l as f64
}

pub(crate) fn check_angles(theta: f64, lambda: i32) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::param("theta", theta, "must lie in [0, pi]"));
    }
    if lambda != 1 && lambda != -1 {
        return Err(Error::param("lambda", lambda as f64, "polarization must be +1 or -1"));
    }
    Ok(())
}

/// Zeros of `b'` inside `(a, b)`, located by bisection between nodes.
fn waist_points(traj: &ErmakovTrajectory, a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let nodes: Vec<EnvelopeSample> = traj.node_samples().collect();
    for w in nodes.windows(2) {
        let (p, q) = (w[0], w[1]);
        if p.b_prime == 0.0 {
            out.push(p.z);
            continue;
        }
        if p.b_prime * q.b_prime >= 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (p.z, q.z);
        let lo_sign = p.b_prime.signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if traj.sample_unchecked(mid).b_prime.signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out.retain(|&z| z > a && z < b);
    out
}

impl TransitionContext {
    /// Channel on an existing trajectory, which must cover `[-L/2, L/2]`.
    pub fn new(
        initial: ModeLabel,
        final_mode: ModeLabel,
        kin: BeamKinematics,
        length: f64,
        trajectory: Arc<ErmakovTrajectory>,
    ) -> Result<Self> {
        if !(length >= 0.0 && length.is_finite()) {
            return Err(Error::param("L", length, "interaction length must be non-negative"));
        }
        let half = 0.5 * length;
        if !trajectory.contains(-half) || !trajectory.contains(half) {
            let (min, max) = trajectory.z_range();
            let z = if trajectory.contains(-half) { half } else { -half };
            return Err(Error::OutOfDomain { z, min, max });
        }
        let start = trajectory.sample(-half)?;
        let mut splits: Vec<f64> = trajectory
            .profile()
            .breakpoints()
            .into_iter()
            .filter(|&z| z > -half && z < half)
            .collect();
        splits.extend(waist_points(&trajectory, -half, half));
        splits.sort_by(f64::total_cmp);
        splits.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

        let mut ctx = TransitionContext {
            initial,
            final_mode,
            kin,
            length,
            trajectory,
            branch: CoefficientBranch::default(),
            mean_bracket: 0.0,
            lewis_origin: start.lewis_phase,
            larmor_origin: start.larmor_phase,
            splits,
        };
        ctx.mean_bracket = ctx.compute_mean_bracket();
        Ok(ctx)
    }

    /// Channel in a field-free region with the waist `b0` at `z = 0`.
    pub fn field_free(
        initial: ModeLabel,
        final_mode: ModeLabel,
        kin: BeamKinematics,
        length: f64,
        b0: f64,
    ) -> Result<Self> {
        let half = if length > 0.0 { 0.5 * length } else { 1.0 };
        let profile = FieldProfile::zero(-half, half)?;
        Self::with_profile(initial, final_mode, kin, length, &profile, b0, 0.0)
    }

    /// Integrates the envelope for `profile` with `b(0) = b0`, `b'(0) = b0_prime`
    /// and builds the channel on it.
    #[allow(clippy::too_many_arguments)]
    pub fn with_profile(
        initial: ModeLabel,
        final_mode: ModeLabel,
        kin: BeamKinematics,
        length: f64,
        profile: &FieldProfile,
        b0: f64,
        b0_prime: f64,
    ) -> Result<Self> {
        if !(length >= 0.0 && length.is_finite()) {
            return Err(Error::param("L", length, "interaction length must be non-negative"));
        }
        let (z_start, z_end) = if length > 0.0 {
            (-0.5 * length, 0.5 * length)
        } else {
            profile.domain()
        };
        let traj = ErmakovTrajectory::integrate_from(profile, 0.0, b0, b0_prime, z_start, z_end, DEFAULT_REL_TOL)?;
        Self::new(initial, final_mode, kin, length, Arc::new(traj))
    }

    pub fn with_branch(mut self, branch: CoefficientBranch) -> Self {
        self.branch = branch;
        self
    }

    pub fn initial(&self) -> ModeLabel {
        self.initial
    }

    pub fn final_mode(&self) -> ModeLabel {
        self.final_mode
    }

    /// `dN = N_i - N_f`.
    pub fn delta_n(&self) -> i64 {
        self.initial.total() - self.final_mode.total()
    }

    /// `dl = l_i - l_f`.
    pub fn delta_l(&self) -> i64 {
        self.initial.l() - self.final_mode.l()
    }

    pub fn kin(&self) -> &BeamKinematics {
        &self.kin
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn trajectory(&self) -> &ErmakovTrajectory {
        &self.trajectory
    }

    pub fn branch(&self) -> CoefficientBranch {
        self.branch
    }

    /// Interior points of `(-L/2, L/2)` where the integrand may have kinks:
    /// profile breakpoints and envelope waists.
    pub fn split_points(&self) -> &[f64] {
        &self.splits
    }

    /// Transverse energy bracket at `z`.
    pub fn bracket_at(&self, z: f64) -> Result<f64> {
        let s = self.trajectory.sample(z)?;
        Ok(transverse_bracket(&s, self.delta_n(), self.delta_l()))
    }

    /// Bracket averaged over `[-L/2, L/2]`; it fixes the photon energy.
    pub fn mean_bracket(&self) -> f64 {
        self.mean_bracket
    }

    pub fn is_emitting(&self) -> bool {
        self.mean_bracket > 0.0
    }

    /// Photon kinematics of the channel, using the averaged bracket.
    pub fn photon(&self, theta: f64, phi: f64, lambda: i32) -> Result<PhotonKinematics> {
        PhotonKinematics::from_bracket(self.mean_bracket, &self.kin, theta, phi, lambda)
    }

    pub(crate) fn phase_origin(&self) -> (f64, f64) {
        (self.lewis_origin, self.larmor_origin)
    }

    fn compute_mean_bracket(&self) -> f64 {
        let (dn, dl) = (self.delta_n(), self.delta_l());
        let traj = &self.trajectory;
        if self.length == 0.0 {
            return transverse_bracket(&traj.sample_unchecked(0.0), dn, dl);
        }
        let scale = traj
            .node_samples()
            .map(|s| transverse_bracket(&s, dn, dl).abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let half = 0.5 * self.length;
        let f = |z: f64| transverse_bracket(&traj.sample_unchecked(z), dn, dl);
        let (integral, _) = adaptive_gk15_split(f, -half, half, &self.splits, 1e-13 * scale * self.length);
        integral / self.length
    }
}

/// Photon energy and momentum for one emission direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonKinematics {
    pub theta: f64,
    pub phi: f64,
    pub lambda: i32,
    pub bracket: f64,
    /// Photon energy in units of `1/(k rho_H^2)`.
    pub omega_norm: f64,
    /// `rho_H k_perp`.
    pub k_perp_scaled: f64,
    /// `(k_z / k) chi^2`.
    pub k_z_term: f64,
}

impl PhotonKinematics {
    pub fn from_bracket(bracket: f64, kin: &BeamKinematics, theta: f64, phi: f64, lambda: i32) -> Result<Self> {
        check_angles(theta, lambda)?;
        if !(bracket > 0.0) {
            return Err(Error::DarkChannel { bracket });
        }
        let half_beta = 0.5 * kin.beta * bracket;
        Ok(PhotonKinematics {
            theta,
            phi,
            lambda,
            bracket,
            omega_norm: half_beta,
            k_perp_scaled: half_beta * theta.sin() / kin.chi,
            k_z_term: half_beta * theta.cos(),
        })
    }

    /// Recoil-free `(dk / k) chi^2`.
    pub fn delta_k_term(&self) -> f64 {
        0.5 * self.bracket
    }

    /// Coefficient of `z` in the accumulated phase.
    pub fn linear_phase_rate(&self) -> f64 {
        self.delta_k_term() - self.k_z_term
    }
}

/// Local photon kinematics from the bracket at `z`.
pub fn photon_kinematics(
    z: f64,
    ctx: &TransitionContext,
    theta: f64,
    phi: f64,
    lambda: i32,
) -> Result<PhotonKinematics> {
    PhotonKinematics::from_bracket(ctx.bracket_at(z)?, &ctx.kin, theta, phi, lambda)
}

pub(crate) fn phase_from_sample(s: &EnvelopeSample, ctx: &TransitionContext, photon: &PhotonKinematics) -> f64 {
    let (lewis0, larmor0) = ctx.phase_origin();
    photon.linear_phase_rate() * s.z
        - ctx.delta_n() as f64 * (s.lewis_phase - lewis0)
        - ctx.delta_l() as f64 * (s.larmor_phase - larmor0)
}

/// Accumulated phase `delta_phi(z)`, with both phase integrals starting at `-L/2`.
pub fn delta_phi(z: f64, ctx: &TransitionContext, photon: &PhotonKinematics) -> Result<f64> {
    let s = ctx.trajectory.sample(z)?;
    Ok(phase_from_sample(&s, ctx, photon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ermakov::analytic_free;
    use crate::units::{derive_kinematics, LabSetup};

    fn kin() -> BeamKinematics {
        derive_kinematics(&LabSetup::new(100.0, 1.0, 30.0).unwrap()).unwrap()
    }

    fn dipole_ctx(b0: f64, length: f64) -> TransitionContext {
        TransitionContext::field_free(ModeLabel::new(3, 0), ModeLabel::new(2, 0), kin(), length, b0).unwrap()
    }

    #[test]
    fn field_free_photon_energy() {
        let b0 = 1.14;
        let ctx = dipole_ctx(b0, 30.0);
        assert_eq!((ctx.delta_n(), ctx.delta_l()), (1, 1));
        let beta = ctx.kin().beta;
        let expect = beta / (2.0 * b0 * b0);
        assert!((ctx.photon(1.0, 0.0, 1).unwrap().omega_norm / expect - 1.0).abs() < 1e-9);
        for z in [-15.0, -2.0, 0.0, 9.0] {
            let p = photon_kinematics(z, &ctx, 1.0, 0.0, 1).unwrap();
            assert!((p.omega_norm / expect - 1.0).abs() < 1e-9);
            assert!((p.delta_k_term() * b0 * b0 * 2.0 - 1.0).abs() < 1e-9);
        }
        assert_eq!(ctx.photon(0.0, 0.3, -1).unwrap().k_perp_scaled, 0.0);
    }

    #[test]
    fn unit_field_bracket() {
        let profile = FieldProfile::constant(-5.0, 5.0).unwrap();
        let ctx = TransitionContext::with_profile(
            ModeLabel::new(1, 1),
            ModeLabel::new(0, 1),
            kin(),
            10.0,
            &profile,
            1.0,
            0.0,
        )
        .unwrap();
        // dN = 1, dl = 1: (0 + 1 + 1) * 1 + 2 * 1
        assert!((ctx.bracket_at(2.5).unwrap() - 4.0).abs() < 1e-9);
        let ctx = TransitionContext::with_profile(
            ModeLabel::new(1, 1),
            ModeLabel::new(1, 0),
            kin(),
            10.0,
            &profile,
            1.0,
            0.0,
        )
        .unwrap();
        assert_eq!((ctx.delta_n(), ctx.delta_l()), (1, -1));
        assert!(ctx.bracket_at(0.0).unwrap().abs() < 1e-9);
        assert!(!ctx.is_emitting());
        assert!(matches!(ctx.photon(1.0, 0.0, 1), Err(Error::DarkChannel { .. })));
    }

    #[test]
    fn phase_terms() {
        let b0 = 1.14;
        let ctx = dipole_ctx(b0, 30.0);
        let p = ctx.photon(0.7, 0.0, 1).unwrap();
        let zs = -15.0;
        assert!((delta_phi(zs, &ctx, &p).unwrap() - p.linear_phase_rate() * zs).abs() < 1e-12);
        let origin = analytic_free(b0, zs).lewis_phase;
        for z in [-10.0, 0.0, 4.0, 15.0] {
            let lewis = analytic_free(b0, z).lewis_phase - origin;
            let expect = p.linear_phase_rate() * z - lewis;
            assert!((delta_phi(z, &ctx, &p).unwrap() - expect).abs() < 1e-8, "z = {z}");
        }
        assert!(matches!(delta_phi(16.0, &ctx, &p), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn waist_is_a_split_point() {
        let ctx = dipole_ctx(1.14, 30.0);
        assert_eq!(ctx.split_points(), &[0.0]);
        let profile = FieldProfile::flat_top(2.0, 4.0, -10.0, 10.0).unwrap();
        let ctx = TransitionContext::with_profile(
            ModeLabel::new(1, 0),
            ModeLabel::new(0, 0),
            kin(),
            20.0,
            &profile,
            0.8,
            0.3,
        )
        .unwrap();
        let pts = ctx.split_points();
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        for bp in profile.breakpoints() {
            assert!(pts.iter().any(|&p| (p - bp).abs() < 1e-12));
        }
        for &p in pts {
            let s = ctx.trajectory().sample(p).unwrap();
            let is_bp = profile.breakpoints().iter().any(|&bp| (p - bp).abs() < 1e-12);
            assert!(is_bp || s.b_prime.abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_angles() {
        let ctx = dipole_ctx(1.0, 4.0);
        assert!(ctx.photon(-0.1, 0.0, 1).is_err());
        assert!(ctx.photon(4.0, 0.0, 1).is_err());
        assert!(ctx.photon(1.0, 0.0, 0).is_err());
    }
}
