//! Ermakov envelope `b'' + Omega^2(z) b = 1/b^3` with its Lewis phase
//! `int dz/b^2` and Larmor phase `int Omega dz`.
//!
//! The four quantities are integrated as one state vector by an embedded
//! Dormand-Prince 5(4) scheme. Between accepted steps the trajectory is
//! reconstructed by quintic Hermite interpolation using the exact first and
//! second derivatives given by the ODE at each node.

use std::io::Write;

use crate::error::{Error, Result};
use crate::field::FieldProfile;

pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Envelope values below this abort the integration.
pub const COLLAPSE_THRESHOLD: f64 = 1e-6;

const B: usize = 0;
const BP: usize = 1;
const LEWIS: usize = 2;
const LARMOR: usize = 3;

type State = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    z: f64,
    y: State,
    dy: State,
    d2y: State,
}

fn rhs(profile: &FieldProfile, z: f64, y: &State) -> State {
    let omega = profile.value(z);
    let b = y[B];
    [y[BP], 1.0 / (b * b * b) - omega * omega * b, 1.0 / (b * b), omega]
}

fn node(profile: &FieldProfile, z: f64, y: State) -> Node {
    let (omega, slope) = profile.value_and_slope(z);
    let (b, bp) = (y[B], y[BP]);
    let b2 = b * b;
    let bpp = 1.0 / (b2 * b) - omega * omega * b;
    let bppp = -3.0 * bp / (b2 * b2) - 2.0 * omega * slope * b - omega * omega * bp;
    Node {
        z,
        y,
        dy: [bp, bpp, 1.0 / b2, omega],
        d2y: [bpp, bppp, -2.0 * bp / (b2 * b), slope],
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Step {
    y: State,
    f_end: State,
    err: f64,
}

fn dopri_step(profile: &FieldProfile, z: f64, y: &State, f0: &State, h: f64, tol: f64) -> Result<Step> {
    let mut k = [[0.0; 4]; 7];
    k[0] = *f0;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..4 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        if !(ys[B] > COLLAPSE_THRESHOLD) {
            return Err(Error::EnvelopeCollapse {
                z: z + C[s] * h,
                b: ys[B],
            });
        }
        k[s] = rhs(profile, z + C[s] * h, &ys);
    }
    // the last stage is evaluated at the 5th order solution (FSAL)
    let mut y_new = *y;
    for (j, kj) in k.iter().enumerate().take(6) {
        for i in 0..4 {
            y_new[i] += h * A[6][j] * kj[i];
        }
    }
    // error per unit step below h = 1 keeps interpolated derivatives at the
    // level of `tol` instead of `tol / h`
    let per_step = h.abs().min(1.0);
    let mut acc = 0.0;
    for i in 0..4 {
        let e: f64 = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
        let scale = per_step * tol * (1.0 + y[i].abs().max(y_new[i].abs()));
        acc += (e / scale).powi(2);
    }
    Ok(Step {
        y: y_new,
        f_end: k[6],
        err: (acc / 4.0).sqrt(),
    })
}

/// Integrates from `z_from` to `z_to` (either direction), recording every node.
fn solve(profile: &FieldProfile, z_from: f64, z_to: f64, y0: State, tol: f64) -> Result<Vec<Node>> {
    if !(y0[B] > COLLAPSE_THRESHOLD) {
        return Err(Error::EnvelopeCollapse { z: z_from, b: y0[B] });
    }
    let mut nodes = vec![node(profile, z_from, y0)];
    if z_from == z_to {
        return Ok(nodes);
    }
    let dir = (z_to - z_from).signum();
    let span = (z_to - z_from).abs();
    let mut stops: Vec<f64> = profile
        .breakpoints()
        .into_iter()
        .filter(|&x| (x - z_from) * dir > 0.0 && (z_to - x) * dir > 0.0)
        .collect();
    stops.sort_by(|a, b| (a * dir).total_cmp(&(b * dir)));
    stops.push(z_to);
    let mut stops = stops.into_iter().peekable();

    let mut z = z_from;
    let mut y = y0;
    let mut f = rhs(profile, z, &y);
    let mut h = (0.01 * span).min(0.05 * y0[B].min(1.0)).max(1e-6 * span);
    let mut rejected_last = false;
    while let Some(&stop) = stops.peek() {
        let remaining = (stop - z).abs();
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h < 1e-14 * (1.0 + z.abs()) {
            return Err(Error::StepSizeUnderflow { z, h });
        }
        let step = dopri_step(profile, z, &y, &f, dir * h, tol)?;
        if step.err <= 1.0 {
            z = if last { stop } else { z + dir * h };
            y = step.y;
            if !(y[B] > COLLAPSE_THRESHOLD) {
                return Err(Error::EnvelopeCollapse { z, b: y[B] });
            }
            // the FSAL stage is reused only when no kink was crossed
            f = if last { rhs(profile, z, &y) } else { step.f_end };
            nodes.push(node(profile, z, y));
            if last {
                stops.next();
            }
            let grow = if step.err == 0.0 {
                5.0
            } else {
                (0.9 * step.err.powf(-0.25)).clamp(0.2, 5.0)
            };
            h *= if rejected_last { grow.min(1.0) } else { grow };
            rejected_last = false;
        } else {
            h *= (0.9 * step.err.powf(-0.25)).clamp(0.1, 0.9);
            rejected_last = true;
        }
    }
    Ok(nodes)
}

/// Envelope, phases and derivatives at one plane `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSample {
    pub z: f64,
    pub b: f64,
    pub b_prime: f64,
    pub b_second: f64,
    pub lewis_phase: f64,
    pub larmor_phase: f64,
    pub omega: f64,
}

/// Dense Ermakov solution on `[z_start, z_end]`. Phases vanish at `z_start`.
#[derive(Debug, Clone)]
pub struct ErmakovTrajectory {
    profile: FieldProfile,
    nodes: Vec<Node>,
    z_ref: f64,
    b0: f64,
    b0_prime: f64,
    rel_tol: f64,
}

fn check_inputs(profile: &FieldProfile, b0: f64, z_start: f64, z_end: f64, rel_tol: f64) -> Result<()> {
    if !(b0 > 0.0 && b0.is_finite()) {
        return Err(Error::param("b0", b0, "envelope must be positive"));
    }
    if !(z_start < z_end) {
        return Err(Error::param("z_end", z_end, "need z_start < z_end"));
    }
    if !(1e-14..=1e-4).contains(&rel_tol) {
        return Err(Error::param("rel_tol", rel_tol, "must lie in [1e-14, 1e-4]"));
    }
    profile.check(z_start)?;
    profile.check(z_end)
}

impl ErmakovTrajectory {
    /// Integrates with initial conditions `b(z_start) = b0`, `b'(z_start) = b0_prime`.
    pub fn integrate(
        profile: &FieldProfile,
        b0: f64,
        b0_prime: f64,
        z_start: f64,
        z_end: f64,
        rel_tol: f64,
    ) -> Result<Self> {
        Self::integrate_from(profile, z_start, b0, b0_prime, z_start, z_end, rel_tol)
    }

    /// Integrates with initial conditions imposed at an interior plane
    /// `z_ref` in `[z_start, z_end]`; phases are still measured from `z_start`.
    pub fn integrate_from(
        profile: &FieldProfile,
        z_ref: f64,
        b0: f64,
        b0_prime: f64,
        z_start: f64,
        z_end: f64,
        rel_tol: f64,
    ) -> Result<Self> {
        check_inputs(profile, b0, z_start, z_end, rel_tol)?;
        if !(z_start..=z_end).contains(&z_ref) {
            return Err(Error::param("z_ref", z_ref, "must lie inside [z_start, z_end]"));
        }
        let y0 = [b0, b0_prime, 0.0, 0.0];
        let mut nodes = solve(profile, z_ref, z_start, y0, rel_tol)?;
        nodes.reverse();
        let forward = solve(profile, z_ref, z_end, y0, rel_tol)?;
        nodes.extend(forward.into_iter().skip(1));
        let (lewis0, larmor0) = (nodes[0].y[LEWIS], nodes[0].y[LARMOR]);
        for n in &mut nodes {
            n.y[LEWIS] -= lewis0;
            n.y[LARMOR] -= larmor0;
        }
        Ok(ErmakovTrajectory {
            profile: profile.clone(),
            nodes,
            z_ref,
            b0,
            b0_prime,
            rel_tol,
        })
    }

    pub fn profile(&self) -> &FieldProfile {
        &self.profile
    }

    pub fn z_range(&self) -> (f64, f64) {
        (self.nodes[0].z, self.nodes[self.nodes.len() - 1].z)
    }

    /// Initial data `(z_ref, b0, b0')`.
    pub fn initial(&self) -> (f64, f64, f64) {
        (self.z_ref, self.b0, self.b0_prime)
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.z)
    }

    pub fn node_samples(&self) -> impl Iterator<Item = EnvelopeSample> + '_ {
        self.nodes.iter().map(|n| EnvelopeSample {
            z: n.z,
            b: n.y[B],
            b_prime: n.y[BP],
            b_second: n.dy[BP],
            lewis_phase: n.y[LEWIS],
            larmor_phase: n.y[LARMOR],
            omega: n.dy[LARMOR],
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn min_b(&self) -> f64 {
        self.nodes.iter().fold(f64::INFINITY, |m, n| m.min(n.y[B]))
    }

    pub fn max_b(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, n| m.max(n.y[B]))
    }

    pub fn total_lewis_phase(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].y[LEWIS]
    }

    pub fn total_larmor_phase(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].y[LARMOR]
    }

    pub fn contains(&self, z: f64) -> bool {
        let (a, b) = self.z_range();
        let slack = 1e-12 * (1.0 + z.abs());
        z >= a - slack && z <= b + slack
    }

    /// Interpolated sample at `z`.
    pub fn sample(&self, z: f64) -> Result<EnvelopeSample> {
        if !self.contains(z) {
            let (min, max) = self.z_range();
            return Err(Error::OutOfDomain { z, min, max });
        }
        Ok(self.sample_unchecked(z))
    }

    pub(crate) fn sample_unchecked(&self, z: f64) -> EnvelopeSample {
        let n = self.nodes.len();
        if n == 1 {
            let s = &self.nodes[0];
            return EnvelopeSample {
                z,
                b: s.y[B],
                b_prime: s.y[BP],
                b_second: s.dy[BP],
                lewis_phase: s.y[LEWIS],
                larmor_phase: s.y[LARMOR],
                omega: s.dy[LARMOR],
            };
        }
        let i = match self.nodes.partition_point(|nd| nd.z <= z) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let (p, q) = (&self.nodes[i], &self.nodes[i + 1]);
        let h = q.z - p.z;
        let t = ((z - p.z) / h).clamp(0.0, 1.0);
        let interp = |c: usize| hermite5(t, h, p.y[c], p.dy[c], p.d2y[c], q.y[c], q.dy[c], q.d2y[c]);
        let (b, _) = interp(B);
        let (b_prime, b_second) = interp(BP);
        let (lewis_phase, _) = interp(LEWIS);
        let (larmor_phase, _) = interp(LARMOR);
        EnvelopeSample {
            z,
            b,
            b_prime,
            b_second,
            lewis_phase,
            larmor_phase,
            omega: self.profile.value(z),
        }
    }

    /// Defect `b'' + Omega^2 b - 1/b^3` of the interpolated solution.
    pub fn residual(&self, z: f64) -> Result<f64> {
        let s = self.sample(z)?;
        Ok(s.b_second + s.omega * s.omega * s.b - 1.0 / (s.b * s.b * s.b))
    }

    /// Writes `z, b, b_prime, lewis_phase, larmor_phase` at every node.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "z,b,b_prime,lewis_phase,larmor_phase")?;
        for s in self.node_samples() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.z, s.b, s.b_prime, s.lewis_phase, s.larmor_phase
            )?;
        }
        Ok(())
    }
}

/// Quintic Hermite interpolation on one step: returns value and derivative.
#[allow(clippy::too_many_arguments)]
fn hermite5(t: f64, h: f64, y0: f64, d0: f64, s0: f64, y1: f64, d1: f64, s1: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h21 = 0.5 * t3 - t4 + 0.5 * t5;
    let value = h00 * y0 + h10 * h * d0 + h20 * h * h * s0 + h01 * y1 + h11 * h * d1 + h21 * h * h * s1;

    let g00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let g10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let g20 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
    let g01 = -g00;
    let g11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let g21 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
    let slope = (g00 * y0 + g01 * y1) / h + g10 * d0 + g20 * h * s0 + g11 * d1 + g21 * h * s1;
    (value, slope)
}

/// Integrates `(b, b')` from `z_from` to `z_to` in either direction and
/// returns the end state.
pub fn propagate(
    profile: &FieldProfile,
    b: f64,
    b_prime: f64,
    z_from: f64,
    z_to: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if !(b > 0.0) {
        return Err(Error::param("b", b, "envelope must be positive"));
    }
    profile.check(z_from)?;
    profile.check(z_to)?;
    let nodes = solve(profile, z_from, z_to, [b, b_prime, 0.0, 0.0], rel_tol)?;
    let end = nodes[nodes.len() - 1];
    Ok((end.y[B], end.y[BP]))
}

/// Field-free envelope with waist `b0` at `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnvelope {
    pub b: f64,
    pub b_prime: f64,
    /// `int_0^z dz/b^2 = arctan(z / b0^2)`.
    pub lewis_phase: f64,
}

pub fn analytic_free(b0: f64, z: f64) -> FreeEnvelope {
    let r = z / (b0 * b0);
    let s = (1.0 + r * r).sqrt();
    FreeEnvelope {
        b: b0 * s,
        b_prime: z / (b0 * b0 * b0 * s),
        lewis_phase: r.atan(),
    }
}

/// `b'^2 + 1/b^2`, conserved wherever `Omega = 0`.
pub fn freespace_invariant(b: f64, b_prime: f64) -> f64 {
    b_prime * b_prime + 1.0 / (b * b)
}
