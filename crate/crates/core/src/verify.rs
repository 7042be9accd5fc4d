//! Self-checks against independent references, run by `twistrad verify`.
//!
//! Each suite compares a production code path with an oracle that shares as
//! little code with it as possible: truncated-matrix exponentials for the
//! form factors, closed-form envelopes for the Ermakov solver, the closed
//! field-free rate for the z quadrature, and a two-dimensional operator
//! construction for the ladder coefficients.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::emission::{amplitude_integral_with, edge_argument, fieldfree_rate, CoeffFn, TransitionContext};
use crate::ermakov::{analytic_free, freespace_invariant, propagate, ErmakovTrajectory, DEFAULT_REL_TOL};
use crate::error::Result;
use crate::field::FieldProfile;
use crate::quantum::oracle::{displacement_matrix, required_dim, Matrix};
use crate::quantum::{c_coeffs, form_factor, Circular, ModeLabel};
use crate::units::{derive_kinematics, BeamKinematics, LabSetup};

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Reduced grids.
    pub quick: bool,
    /// Ladder coefficients under test.
    pub coeffs: CoeffFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            quick: false,
            coeffs: c_coeffs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<22} cases={:<5} max_err={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.max_error,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    max_error: f64,
    worst: String,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally {
            name,
            tolerance,
            cases: 0,
            max_error: 0.0,
            worst: String::new(),
        }
    }

    fn record(&mut self, err: f64, label: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN errors must fail the suite
        if !(err <= self.max_error) {
            self.max_error = if err.is_nan() { f64::INFINITY } else { err };
            self.worst = label();
        }
    }

    fn finish(self) -> SuiteReport {
        let passed = self.max_error <= self.tolerance;
        SuiteReport {
            name: self.name,
            passed,
            cases: self.cases,
            max_error: self.max_error,
            tolerance: self.tolerance,
            detail: if passed {
                String::new()
            } else {
                format!("worst: {}", self.worst)
            },
        }
    }

    fn failed(name: &'static str, tolerance: f64, err: impl fmt::Display) -> SuiteReport {
        SuiteReport {
            name,
            passed: false,
            cases: 0,
            max_error: f64::INFINITY,
            tolerance,
            detail: format!("error: {err}"),
        }
    }
}

fn reference_kinematics() -> BeamKinematics {
    derive_kinematics(&LabSetup::new(100.0, 1.0, 30.0).expect("valid setup")).expect("valid setup")
}

/// Analytic form factors against the truncated-matrix exponential.
pub fn displacement_suite(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("displacement_oracle", 1e-9);
    let kappas = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, 0.0),
        Complex64::new(0.0, -0.8),
        Complex64::new(0.7, 0.1),
        Complex64::new(-1.1, 0.6),
        Complex64::new(1.5, -1.2),
        Complex64::new(0.05, 0.02),
        Complex64::new(-2.0, -0.5),
    ];
    let levels: &[u32] = if opts.quick { &[0, 1, 3, 6] } else { &[0, 1, 2, 4, 7] };
    for &kappa in &kappas {
        let max_n = *levels.iter().max().unwrap();
        let dim = required_dim(max_n, max_n, kappa);
        let d = displacement_matrix(kappa, dim);
        for &nf in levels {
            for &ni in levels {
                let err = (form_factor(nf, ni, kappa) - d[(nf as usize, ni as usize)]).norm();
                t.record(err, || format!("F_{{{nf},{ni}}}({kappa})"));
            }
        }
    }
    t.finish()
}

/// Columns of the truncated displacement matrix stay normalized.
pub fn unitarity_suite(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("unitarity", 1e-8);
    let count = if opts.quick { 4 } else { 10 };
    for kappa in [
        Complex64::new(0.4, 0.3),
        Complex64::new(-1.2, 0.9),
        Complex64::new(0.0, 2.0),
    ] {
        let dim = required_dim(count as u32, 0, kappa) + 8;
        let d = displacement_matrix(kappa, dim);
        for ni in 0..=count {
            let s: f64 = (0..dim).map(|f| d[(f, ni)].norm_sqr()).sum();
            t.record((s - 1.0).abs(), || format!("column {ni}, kappa {kappa}"));
        }
    }
    t.finish()
}

/// Ermakov solver against the free envelope and the constant-field
/// closed form `b^2 = b0^2 cos^2 z + sin^2 z / b0^2`, over ten periods.
pub fn pinney_suite(opts: &VerifyOptions) -> SuiteReport {
    let tol = 1e-8;
    let mut t = Tally::new("ermakov_oracles", tol);
    let waists: &[f64] = if opts.quick {
        &[0.7, 1.5]
    } else {
        &[0.5, 0.8, 1.0, 1.3, 2.0]
    };
    let span = 20.0 * PI;
    let samples = if opts.quick { 200 } else { 1000 };
    for &b0 in waists {
        let mut run = || -> Result<()> {
            let constant = FieldProfile::constant(0.0, span)?;
            let traj = ErmakovTrajectory::integrate(&constant, b0, 0.0, 0.0, span, DEFAULT_REL_TOL)?;
            let zero = FieldProfile::zero(0.0, span)?;
            let free = ErmakovTrajectory::integrate(&zero, b0, 0.0, 0.0, span, DEFAULT_REL_TOL)?;
            for i in 0..=samples {
                let z = span * i as f64 / samples as f64;
                let s = traj.sample(z)?;
                let exact = (b0 * b0 * z.cos().powi(2) + z.sin().powi(2) / (b0 * b0)).sqrt();
                t.record((s.b - exact).abs() / exact, || format!("pinney b0={b0} z={z}"));
                t.record((s.larmor_phase - z).abs() / (1.0 + z), || {
                    format!("larmor b0={b0} z={z}")
                });
                let f = free.sample(z)?;
                let e = analytic_free(b0, z);
                t.record((f.b - e.b).abs() / e.b, || format!("free b0={b0} z={z}"));
                t.record((f.lewis_phase - e.lewis_phase).abs(), || {
                    format!("free phase b0={b0} z={z}")
                });
                let inv = freespace_invariant(f.b, f.b_prime) * b0 * b0 - 1.0;
                t.record(inv.abs(), || format!("invariant b0={b0} z={z}"));
            }
            let (b1, bp1) = propagate(&constant, b0, 0.3, 0.0, span, DEFAULT_REL_TOL)?;
            let (b2, bp2) = propagate(&constant, b1, bp1, span, 0.0, DEFAULT_REL_TOL)?;
            t.record((b2 - b0).abs().max((bp2 - 0.3).abs()), || format!("reversal b0={b0}"));
            Ok(())
        };
        if let Err(e) = run() {
            return Tally::failed("ermakov_oracles", tol, e);
        }
    }
    t.finish()
}

fn closed_form_amplitude(ell: f64, b0: f64, theta: f64, lambda: i32, length: f64, beta: f64) -> f64 {
    let x = edge_argument(theta, length, b0, beta);
    let pol = (1.0 - lambda as f64 * theta.cos()).powi(2) / 8.0;
    ell / (b0 * b0) * pol * length * length * x.sin().powi(4) / (x * x)
}

/// Grid of polar angles strictly inside `(0, pi)`.
pub fn interior_angles(n: usize) -> Vec<f64> {
    (1..=n).map(|i| PI * i as f64 / (n + 1) as f64).collect()
}

/// z quadrature of the field-free dipole amplitude against the closed form.
pub fn closure_suite(opts: &VerifyOptions) -> SuiteReport {
    let tol = 1e-7;
    let mut t = Tally::new("closure", tol);
    let kin = reference_kinematics();
    let length = 30.0;
    let (thetas, waists): (Vec<f64>, &[f64]) = if opts.quick {
        (interior_angles(5), &[0.9, 1.14])
    } else {
        (interior_angles(20), &[0.6, 0.9, 1.14, 1.6, 2.5])
    };
    for &b0 in waists {
        let ctx = match TransitionContext::field_free(ModeLabel::new(1, 0), ModeLabel::new(0, 0), kin, length, b0) {
            Ok(c) => c,
            Err(e) => return Tally::failed("closure", tol, e),
        };
        let peak = thetas
            .iter()
            .map(|&th| closed_form_amplitude(1.0, b0, th, -1, length, kin.beta))
            .fold(0.0, f64::max);
        for &theta in &thetas {
            for lambda in [1, -1] {
                let exact = closed_form_amplitude(1.0, b0, theta, lambda, length, kin.beta);
                match amplitude_integral_with(&ctx, theta, 0.0, lambda, true, opts.coeffs) {
                    Ok(a) => {
                        let err = (a.norm_sqr() - exact).abs() / exact.max(1e-12 * peak);
                        t.record(err, || format!("theta={theta:.4} b0={b0} lambda={lambda}"));
                    }
                    Err(e) => return Tally::failed("closure", tol, e),
                }
            }
        }
    }
    t.finish()
}

/// Plane-wave, Gaussian and edge limits of the field-free rate.
pub fn limits_suite(opts: &VerifyOptions) -> SuiteReport {
    let tol = 1e-2;
    let mut t = Tally::new("limiting_transitions", tol);
    let kin = reference_kinematics();
    let beta = kin.beta;
    let thetas = interior_angles(if opts.quick { 5 } else { 25 });
    for &theta in &thetas {
        // waist 10 -> 100 at fixed L: X -> 0 and the rate follows b0^-8
        let ratio = fieldfree_rate(theta, 30.0, 100.0, 1, &kin) / fieldfree_rate(theta, 30.0, 10.0, 1, &kin);
        t.record((ratio / 1e-8 - 1.0).abs(), || format!("b0 scaling theta={theta:.4}"));
        t.record(fieldfree_rate(theta, 30.0, 1.14, 0, &kin).abs() * 1e300, || {
            format!("Gaussian limit theta={theta:.4}")
        });
        // lengthen L by whole periods of X: the envelope decays as 1/L^2
        let b0 = 1.14;
        let l0 = 30.0;
        let base = fieldfree_rate(theta, l0, b0, 1, &kin);
        for n in 1..=4 {
            let ln = l0 + 8.0 * b0 * b0 * PI * n as f64 / (1.0 - beta * theta.cos());
            let ratio = fieldfree_rate(theta, ln, b0, 1, &kin) / base;
            t.record((ratio * (ln / l0).powi(2) - 1.0).abs(), || {
                format!("edge theta={theta:.4} n={n}")
            });
        }
    }
    t.finish()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.dim(), b.dim());
    let mut out = Matrix::zeros(n * m);
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    out[(i * m + k, j * m + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Ladder coefficients against the transformed kinetic momentum
/// `p/b + b' rho + b Omega u_z x rho` built from Cartesian operators.
///
/// The circular component `pi_x - i sigma pi_y` equals
/// `C_a a_sigma + C_adag a_{-sigma}^dagger`; the raising term acts on the
/// opposite circular mode.
pub fn coefficient_suite(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("ladder_coefficients", 1e-12);
    let d = 5;
    let a = Matrix::lowering(d);
    let id = Matrix::identity(d);
    let ax = kron(&a, &id);
    let ay = kron(&id, &a);
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let x = ax.add(&ax.adjoint()).scale(r);
    let y = ay.add(&ay.adjoint()).scale(r);
    let px = ax.add(&ax.adjoint().scale(Complex64::new(-1.0, 0.0))).scale(-i * r);
    let py = ay.add(&ay.adjoint().scale(Complex64::new(-1.0, 0.0))).scale(-i * r);
    let params: &[(f64, f64, f64)] = if opts.quick {
        &[(1.0, 0.0, 1.0), (0.7, -0.4, 0.3)]
    } else {
        &[
            (1.0, 0.0, 1.0),
            (0.7, -0.4, 0.3),
            (2.3, 0.9, -0.6),
            (1.14, 0.0, 0.0),
            (0.4, 1.5, 0.8),
        ]
    };
    for &(b, bp, om) in params {
        let pi_x = px
            .scale((1.0 / b).into())
            .add(&x.scale(bp.into()))
            .add(&y.scale((-b * om).into()));
        let pi_y = py
            .scale((1.0 / b).into())
            .add(&y.scale(bp.into()))
            .add(&x.scale((b * om).into()));
        for sigma in Circular::BOTH {
            let s = sigma.sign();
            let lhs = pi_x.add(&pi_y.scale(-i * s));
            let a_sigma = ax.add(&ay.scale(-i * s)).scale(r);
            let a_other = ax.add(&ay.scale(i * s)).scale(r);
            let c = (opts.coeffs)(b, bp, om, sigma);
            let rhs = a_sigma.scale(c.c_a).add(&a_other.adjoint().scale(c.c_adag));
            let diff = lhs.add(&rhs.scale(Complex64::new(-1.0, 0.0)));
            let err = (0..d * d)
                .flat_map(|i| (0..d * d).map(move |j| (i, j)))
                .map(|ij| diff[ij].norm())
                .fold(0.0, f64::max);
            t.record(err, || format!("b={b} b'={bp} Omega={om} sigma={s}"));
        }
    }
    t.finish()
}

/// Runs every suite.
pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    vec![
        displacement_suite(opts),
        unitarity_suite(opts),
        pinney_suite(opts),
        closure_suite(opts),
        limits_suite(opts),
        coefficient_suite(opts),
    ]
}
