use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use super::amplitude::amplitude_integral;
use super::{check_angles, TransitionContext, POLARIZATIONS};
use crate::error::{Error, Result};
use crate::quantum::{CoefficientBranch, ModeLabel};
use crate::units::{normalized_energy_to_rest_units, rate_to_si, BeamKinematics, FINE_STRUCTURE};

/// Largest relative change between Simpson on the full and on the
/// every-other-point grid for a curve to count as resolved.
pub const REFINEMENT_LIMIT: f64 = 1e-3;

/// `sin theta`, exactly zero at both poles.
fn polar_sin(theta: f64) -> f64 {
    if theta == 0.0 || theta == PI {
        0.0
    } else {
        theta.sin()
    }
}

/// Edge-envelope argument `X = (1 - beta cos theta) L / (8 b0^2)`.
pub fn edge_argument(theta: f64, length: f64, b0: f64, beta: f64) -> f64 {
    (1.0 - beta * theta.cos()) * length / (8.0 * b0 * b0)
}

/// `R = (sin^4 X / X^2) (1 + cos^2 theta) sin theta / (8 b0^4)`.
pub fn normalized_fieldfree_rate(theta: f64, length: f64, b0: f64, beta: f64) -> f64 {
    let x = edge_argument(theta, length, b0, beta);
    if x == 0.0 {
        return 0.0;
    }
    let envelope = x.sin().powi(4) / (x * x);
    let c = theta.cos();
    envelope * (1.0 + c * c) * polar_sin(theta) / (8.0 * b0.powi(4))
}

/// Closed-form `dw/dtheta` of the field-free dipole channel `(l, 0) -> (l-1, 0)`,
/// in units of `m_e`.
pub fn fieldfree_rate(theta: f64, length: f64, b0: f64, ell_i: u32, kin: &BeamKinematics) -> f64 {
    let pre = ell_i as f64 * FINE_STRUCTURE * kin.beta.powi(4) * kin.gamma / kin.chi.powi(4);
    pre * normalized_fieldfree_rate(theta, length, b0, kin.beta)
}

/// How a curve was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateModel {
    ClosedForm,
    Quadrature {
        dipole: bool,
        phi_samples: usize,
        branch: CoefficientBranch,
    },
}

impl RateModel {
    /// Photon-energy model: the closed form has a single energy, the
    /// quadrature path uses the bracket averaged over the window.
    pub fn omega_model(&self) -> &'static str {
        match self {
            RateModel::ClosedForm => "exact",
            RateModel::Quadrature { .. } => "z_averaged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateMetadata {
    pub b0: f64,
    pub b0_prime: f64,
    pub length: f64,
    pub beta: f64,
    pub chi: f64,
    pub ell_i: i64,
    pub b_max_tesla: f64,
    pub profile_kind: String,
    pub initial: ModeLabel,
    pub final_mode: ModeLabel,
    pub model: RateModel,
}

impl fmt::Display for RateMetadata {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# b0 = {}", self.b0)?;
        writeln!(f, "# b0_prime = {}", self.b0_prime)?;
        writeln!(f, "# L = {}", self.length)?;
        writeln!(f, "# beta = {}", self.beta)?;
        writeln!(f, "# chi = {}", self.chi)?;
        writeln!(f, "# ell_i = {}", self.ell_i)?;
        writeln!(f, "# B_max_T = {}", self.b_max_tesla)?;
        writeln!(f, "# profile_kind = {}", self.profile_kind)?;
        writeln!(f, "# initial = {}", self.initial)?;
        writeln!(f, "# final = {}", self.final_mode)?;
        writeln!(f, "# omega_model = {}", self.model.omega_model())?;
        match self.model {
            RateModel::ClosedForm => writeln!(f, "# method = closed_form"),
            RateModel::Quadrature {
                dipole,
                phi_samples,
                branch,
            } => {
                writeln!(f, "# method = quadrature")?;
                writeln!(f, "# dipole = {dipole}")?;
                writeln!(f, "# phi_samples = {phi_samples}")?;
                writeln!(f, "# coeff_branch = {}", branch.name())
            }
        }
    }
}

/// Sampled `dw/dtheta` in units of `m_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub theta: Vec<f64>,
    pub rate: Vec<f64>,
    pub meta: RateMetadata,
}

impl RateCurve {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `dw/dtheta` in 1/(s rad).
    pub fn rate_si(&self) -> impl Iterator<Item = f64> + '_ {
        self.rate.iter().map(|&r| rate_to_si(r))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "{}", self.meta)?;
        writeln!(out, "theta_rad,rate_per_theta_norm,rate_per_theta_si")?;
        for (t, r) in self.theta.iter().zip(&self.rate) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", t, r, rate_to_si(*r))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

fn check_grid(theta_grid: &[f64]) -> Result<()> {
    if theta_grid.is_empty() {
        return Err(Error::param("theta_grid", 0.0, "grid must not be empty"));
    }
    for &t in theta_grid {
        check_angles(t, 1)?;
    }
    Ok(())
}

/// Closed-form field-free curve.
pub fn fieldfree_curve(
    theta_grid: &[f64],
    length: f64,
    b0: f64,
    ell_i: u32,
    kin: &BeamKinematics,
) -> Result<RateCurve> {
    check_grid(theta_grid)?;
    if !(b0 > 0.0 && b0.is_finite()) {
        return Err(Error::param("b0", b0, "envelope must be positive"));
    }
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::param("L", length, "interaction length must be non-negative"));
    }
    let rate = theta_grid
        .iter()
        .map(|&t| fieldfree_rate(t, length, b0, ell_i, kin))
        .collect();
    Ok(RateCurve {
        theta: theta_grid.to_vec(),
        rate,
        meta: RateMetadata {
            b0,
            b0_prime: 0.0,
            length,
            beta: kin.beta,
            chi: kin.chi,
            ell_i: ell_i as i64,
            b_max_tesla: kin.b_max_tesla(),
            profile_kind: "zero".into(),
            initial: ModeLabel::new(ell_i, 0),
            final_mode: ModeLabel::new(ell_i.saturating_sub(1), 0),
            model: RateModel::ClosedForm,
        },
    })
}

/// `dw/dtheta = alpha beta^2/(chi^2 L^2) dE sin(theta) sum_lambda <|int s_perp dz|^2>_phi`
/// on `theta_grid`, computed in parallel.
///
/// The dipole amplitude modulus does not depend on `phi`, so dipole curves
/// use a single azimuth; otherwise `phi_samples` equally spaced azimuths are
/// averaged.
pub fn general_rate_curve(
    ctx: &TransitionContext,
    theta_grid: &[f64],
    phi_samples: usize,
    dipole: bool,
) -> Result<RateCurve> {
    check_grid(theta_grid)?;
    if phi_samples == 0 {
        return Err(Error::param("phi_samples", 0.0, "need at least one azimuth"));
    }
    if !ctx.is_emitting() {
        return Err(Error::DarkChannel {
            bracket: ctx.mean_bracket(),
        });
    }
    let kin = ctx.kin();
    let length = ctx.length();
    let photon_energy = normalized_energy_to_rest_units(0.5 * kin.beta * ctx.mean_bracket(), kin);
    let phis: Vec<f64> = if dipole {
        vec![0.0]
    } else {
        (0..phi_samples)
            .map(|j| 2.0 * PI * j as f64 / phi_samples as f64)
            .collect()
    };
    let rate = theta_grid
        .par_iter()
        .map(|&theta| -> Result<f64> {
            let s = polar_sin(theta);
            if length == 0.0 || s == 0.0 {
                return Ok(0.0);
            }
            let mut sum = 0.0;
            for lambda in POLARIZATIONS {
                for &phi in &phis {
                    sum += amplitude_integral(ctx, theta, phi, lambda, dipole)?.norm_sqr();
                }
            }
            sum /= phis.len() as f64;
            let pre = FINE_STRUCTURE * kin.beta * kin.beta / (kin.chi * kin.chi * length * length);
            Ok(pre * photon_energy * s * sum)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (_, b0, b0_prime) = ctx.trajectory().initial();
    Ok(RateCurve {
        theta: theta_grid.to_vec(),
        rate,
        meta: RateMetadata {
            b0,
            b0_prime,
            length,
            beta: kin.beta,
            chi: kin.chi,
            ell_i: ctx.initial().l(),
            b_max_tesla: kin.b_max_tesla(),
            profile_kind: ctx.trajectory().profile().kind().name().into(),
            initial: ctx.initial(),
            final_mode: ctx.final_mode(),
            model: RateModel::Quadrature {
                dipole,
                phi_samples: phis.len(),
                branch: ctx.branch(),
            },
        },
    })
}

/// Integrated rate with its resolution check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalRate {
    /// Units of `m_e`.
    pub norm: f64,
    /// 1/s.
    pub si: f64,
    /// Relative change against the half-resolution estimate.
    pub refinement_change: f64,
    /// True if the curve is too coarse for the estimate to be trusted.
    pub undersampled: bool,
}

/// Composite Simpson rule on a possibly non-uniform grid.
fn simpson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut total = 0.0;
    for i in (0..paired).step_by(2) {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0 * ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
    }
    if paired < intervals {
        // last interval from the parabola through the final three points
        let h0 = x[n - 2] - x[n - 3];
        let h1 = x[n - 1] - x[n - 2];
        let a = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let b = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let c = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += a * y[n - 1] + b * y[n - 2] - c * y[n - 3];
    }
    total
}

/// Simpson integral of the curve over its `theta` range.
pub fn total_rate(curve: &RateCurve) -> TotalRate {
    let norm = simpson(&curve.theta, &curve.rate);
    let coarse_x: Vec<f64> = curve.theta.iter().step_by(2).copied().collect();
    let coarse_y: Vec<f64> = curve.rate.iter().step_by(2).copied().collect();
    let (refinement_change, undersampled) = if curve.len() < 5 {
        (f64::INFINITY, norm != 0.0)
    } else {
        let coarse = simpson(&coarse_x, &coarse_y);
        let change = if norm == 0.0 && coarse == 0.0 {
            0.0
        } else {
            ((norm - coarse) / norm).abs()
        };
        (change, change >= REFINEMENT_LIMIT)
    };
    TotalRate {
        norm,
        si: rate_to_si(norm),
        refinement_change,
        undersampled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{derive_kinematics, LabSetup};

    fn kin() -> BeamKinematics {
        derive_kinematics(&LabSetup::new(100.0, 1.0, 30.0).unwrap()).unwrap()
    }

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let x = [0.0, 0.3, 0.5, 1.1, 1.6, 2.0];
        let y: Vec<f64> = x.iter().map(|t| t * t * t - 2.0 * t + 1.0).collect();
        // 2^4/4 - 2^2 + 2 = 2, even for the odd trailing interval
        assert!((simpson(&x, &y) - 2.0).abs() < 0.02);
        let x = [0.0, 0.5, 1.0, 1.5, 2.0];
        let y: Vec<f64> = x.iter().map(|t| t * t * t - 2.0 * t + 1.0).collect();
        assert!((simpson(&x, &y) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn no_orbital_momentum_no_rate() {
        for t in grid(50) {
            assert_eq!(fieldfree_rate(t, 30.0, 1.14, 0, &kin()), 0.0);
        }
    }

    #[test]
    fn poles_are_dark() {
        assert_eq!(fieldfree_rate(0.0, 30.0, 1.14, 1, &kin()), 0.0);
        assert_eq!(fieldfree_rate(PI, 30.0, 1.14, 1, &kin()), 0.0);
        assert_eq!(fieldfree_rate(1.0, 0.0, 1.14, 1, &kin()), 0.0);
    }

    #[test]
    fn polarization_sum_identity() {
        for t in grid(40) {
            let c = t.cos();
            let s: f64 = [1.0, -1.0].iter().map(|l| (1.0 - l * c).powi(2)).sum();
            assert!((s - 2.0 * (1.0 + c * c)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_curve_integrates_to_zero() {
        let curve = fieldfree_curve(&grid(101), 30.0, 1.14, 0, &kin()).unwrap();
        let total = total_rate(&curve);
        assert_eq!((total.norm, total.undersampled), (0.0, false));
    }

    #[test]
    fn coarse_curve_is_flagged() {
        let curve = fieldfree_curve(&grid(7), 250.0, 1.14, 1, &kin()).unwrap();
        assert!(total_rate(&curve).undersampled);
        let curve = fieldfree_curve(&grid(4001), 30.0, 1.14, 1, &kin()).unwrap();
        assert!(!total_rate(&curve).undersampled);
    }

    #[test]
    fn general_path_reproduces_closed_form() {
        let k = kin();
        let ctx = TransitionContext::field_free(ModeLabel::new(2, 0), ModeLabel::new(1, 0), k, 30.0, 1.14).unwrap();
        let g = grid(13);
        let numeric = general_rate_curve(&ctx, &g, 8, true).unwrap();
        let exact = fieldfree_curve(&g, 30.0, 1.14, 2, &k).unwrap();
        for (a, b) in numeric.rate.iter().zip(&exact.rate) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-12 * exact.rate.iter().cloned().fold(0.0, f64::max)));
        }
        assert_eq!(numeric.rate[0], 0.0);
        assert_eq!(numeric.rate[12], 0.0);
    }

    #[test]
    fn csv_layout() {
        let curve = fieldfree_curve(&[0.5, 1.0], 30.0, 1.14, 1, &kin()).unwrap();
        let text = curve.to_csv_string();
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "theta_rad,rate_per_theta_norm,rate_per_theta_si");
        for key in ["b0", "L", "beta", "chi", "ell_i", "B_max_T", "profile_kind"] {
            assert!(text.lines().any(|l| l.starts_with(&format!("# {key} = "))), "{key}");
        }
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    }
}
