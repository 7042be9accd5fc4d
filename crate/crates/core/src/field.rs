//! Normalized axial field profiles `Omega(z) = B_z(z) / max |B_z|`.
//!
//! Only the axial component is represented; the transverse components of an
//! axisymmetric field follow from `div B = 0`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk15_split;

/// Shape family of a profile. Analytic shapes are evaluated unnormalized and
/// rescaled by [`FieldProfile`] so that `max |Omega| = 1` on the domain.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Zero,
    Constant,
    /// Plateau of full width `plateau_length` centered at `z = 0`, with
    /// raised-cosine ramps of length `ramp_length` on both sides.
    FlatTop {
        ramp_length: f64,
        plateau_length: f64,
    },
    /// Two identical flat-top coils centered at `+-coil_center_offset`, each
    /// with plateau width `coil_width`. The ramps are sized so that the
    /// field-free gap between the coils has length `gap`.
    TwoSolenoid {
        coil_center_offset: f64,
        coil_width: f64,
        gap: f64,
    },
    Gaussian {
        center: f64,
        width: f64,
    },
    Tabulated(Tabulated),
}

impl ProfileKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::Zero => "zero",
            ProfileKind::Constant => "constant",
            ProfileKind::FlatTop { .. } => "flat_top",
            ProfileKind::TwoSolenoid { .. } => "two_solenoid",
            ProfileKind::Gaussian { .. } => "gaussian",
            ProfileKind::Tabulated(_) => "tabulated",
        }
    }
}

/// Monotone piecewise-cubic (PCHIP) interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    z: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Tabulated {
    fn new(z: Vec<f64>, values: Vec<f64>) -> Self {
        let slopes = pchip_slopes(&z, &values);
        Tabulated { z, values, slopes }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.z
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn interval(&self, z: f64) -> usize {
        let n = self.z.len();
        match self.z.partition_point(|&x| x <= z) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    fn eval(&self, z: f64) -> (f64, f64) {
        let i = self.interval(z);
        let h = self.z[i + 1] - self.z[i];
        let t = ((z - self.z[i]) / h).clamp(0.0, 1.0);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value =
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
        let d = (6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1;
        (value, d / h)
    }
}

// Fritsch-Butland weighted harmonic mean slopes with shape-preserving
// one-sided end conditions (same scheme as scipy's PchipInterpolator).
fn pchip_slopes(z: &[f64], y: &[f64]) -> Vec<f64> {
    let n = z.len();
    let h: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    if n == 2 {
        m[0] = delta[0];
        m[1] = delta[0];
        return m;
    }
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 * d1 <= 0.0 {
            m[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    m[0] = pchip_end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn pchip_end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Raised-cosine flat-top lobe centered at `center`, with value and slope.
fn lobe(z: f64, center: f64, half_plateau: f64, ramp: f64) -> (f64, f64) {
    let u = (z - center).abs();
    let s = (z - center).signum();
    if u <= half_plateau {
        (1.0, 0.0)
    } else if u < half_plateau + ramp {
        let arg = PI * (u - half_plateau) / ramp;
        (0.5 * (1.0 + arg.cos()), -0.5 * PI / ramp * arg.sin() * s)
    } else {
        (0.0, 0.0)
    }
}

/// An immutable normalized field profile on a finite domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    kind: ProfileKind,
    z_min: f64,
    z_max: f64,
    scale: f64,
}

impl fmt::Display for FieldProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on [{}, {}]", self.kind.name(), self.z_min, self.z_max)
    }
}

fn check_domain(z_min: f64, z_max: f64) -> Result<()> {
    if !(z_min.is_finite() && z_max.is_finite()) || z_min >= z_max {
        return Err(Error::param("z_max", z_max, "domain must satisfy z_min < z_max"));
    }
    Ok(())
}

fn need_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, v, "must be positive"))
    }
}

impl FieldProfile {
    pub fn zero(z_min: f64, z_max: f64) -> Result<Self> {
        check_domain(z_min, z_max)?;
        Ok(FieldProfile {
            kind: ProfileKind::Zero,
            z_min,
            z_max,
            scale: 0.0,
        })
    }

    pub fn constant(z_min: f64, z_max: f64) -> Result<Self> {
        Self::analytic(ProfileKind::Constant, z_min, z_max)
    }

    pub fn flat_top(ramp_length: f64, plateau_length: f64, z_min: f64, z_max: f64) -> Result<Self> {
        need_positive("ramp_length", ramp_length)?;
        if !(plateau_length >= 0.0) {
            return Err(Error::param("plateau_length", plateau_length, "must be non-negative"));
        }
        Self::analytic(
            ProfileKind::FlatTop {
                ramp_length,
                plateau_length,
            },
            z_min,
            z_max,
        )
    }

    pub fn two_solenoid(coil_center_offset: f64, coil_width: f64, gap: f64, z_min: f64, z_max: f64) -> Result<Self> {
        need_positive("coil_center_offset", coil_center_offset)?;
        if !(coil_width >= 0.0) {
            return Err(Error::param("coil_width", coil_width, "must be non-negative"));
        }
        if !(gap >= 0.0) {
            return Err(Error::param("gap", gap, "must be non-negative"));
        }
        if coil_center_offset - 0.5 * coil_width - 0.5 * gap <= 0.0 {
            return Err(Error::param(
                "gap",
                gap,
                "coils overlap: need coil_center_offset > (coil_width + gap) / 2",
            ));
        }
        Self::analytic(
            ProfileKind::TwoSolenoid {
                coil_center_offset,
                coil_width,
                gap,
            },
            z_min,
            z_max,
        )
    }

    pub fn gaussian(center: f64, width: f64, z_min: f64, z_max: f64) -> Result<Self> {
        need_positive("width", width)?;
        Self::analytic(ProfileKind::Gaussian { center, width }, z_min, z_max)
    }

    fn analytic(kind: ProfileKind, z_min: f64, z_max: f64) -> Result<Self> {
        check_domain(z_min, z_max)?;
        let mut p = FieldProfile {
            kind,
            z_min,
            z_max,
            scale: 1.0,
        };
        let peak = p.raw_peak();
        if !(peak > 0.0) {
            return Err(Error::InvalidSamples("profile vanishes on the whole domain".into()));
        }
        p.scale = 1.0 / peak;
        Ok(p)
    }

    /// Closed-form `max |shape|` over the domain: every analytic shape is
    /// unimodal around its centers, so the peak sits at the domain point
    /// closest to a center.
    fn raw_peak(&self) -> f64 {
        let at = |c: f64| self.raw(c.clamp(self.z_min, self.z_max)).0.abs();
        match &self.kind {
            ProfileKind::Zero => 0.0,
            ProfileKind::Constant => 1.0,
            ProfileKind::FlatTop { .. } => at(0.0),
            ProfileKind::TwoSolenoid { coil_center_offset, .. } => {
                at(*coil_center_offset).max(at(-*coil_center_offset))
            }
            ProfileKind::Gaussian { center, .. } => at(*center),
            ProfileKind::Tabulated(t) => t.values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    fn raw(&self, z: f64) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Zero => (0.0, 0.0),
            ProfileKind::Constant => (1.0, 0.0),
            ProfileKind::FlatTop {
                ramp_length,
                plateau_length,
            } => lobe(z, 0.0, 0.5 * plateau_length, *ramp_length),
            ProfileKind::TwoSolenoid {
                coil_center_offset: d,
                coil_width: w,
                gap,
            } => {
                let ramp = d - 0.5 * w - 0.5 * gap;
                let (a, da) = lobe(z, *d, 0.5 * w, ramp);
                let (b, db) = lobe(z, -*d, 0.5 * w, ramp);
                (a + b, da + db)
            }
            ProfileKind::Gaussian { center, width } => {
                let u = (z - center) / width;
                let v = (-0.5 * u * u).exp();
                (v, -u / width * v)
            }
            ProfileKind::Tabulated(t) => t.eval(z),
        }
    }

    /// Builds a tabulated profile from raw `(z, B_z)` samples by dividing by
    /// `max |B_z|`.
    pub fn normalize(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidSamples("need at least two samples".into()));
        }
        if samples.iter().any(|(z, b)| !z.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidSamples("non-finite sample".into()));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSamples("z grid must be strictly increasing".into()));
        }
        let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.1.abs()));
        if peak == 0.0 {
            return Err(Error::InvalidSamples("all field samples are zero".into()));
        }
        let z: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let values: Vec<f64> = samples.iter().map(|s| s.1 / peak).collect();
        let (z_min, z_max) = (z[0], z[z.len() - 1]);
        Ok(FieldProfile {
            kind: ProfileKind::Tabulated(Tabulated::new(z, values)),
            z_min,
            z_max,
            scale: 1.0,
        })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.z_min, self.z_max)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ProfileKind::Zero)
    }

    pub fn contains(&self, z: f64) -> bool {
        let slack = 1e-12 * (1.0 + z.abs());
        z >= self.z_min - slack && z <= self.z_max + slack
    }

    pub fn check(&self, z: f64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                z,
                min: self.z_min,
                max: self.z_max,
            })
        }
    }

    pub fn omega(&self, z: f64) -> Result<f64> {
        self.check(z)?;
        Ok(self.value(z))
    }

    pub fn omega_prime(&self, z: f64) -> Result<f64> {
        self.check(z)?;
        Ok(self.value_and_slope(z).1)
    }

    /// `Omega(z)` without the domain check.
    pub(crate) fn value(&self, z: f64) -> f64 {
        self.raw(z).0 * self.scale
    }

    pub(crate) fn value_and_slope(&self, z: f64) -> (f64, f64) {
        let (v, d) = self.raw(z);
        (v * self.scale, d * self.scale)
    }

    /// Points where the profile is only C^1 (ramp ends, table nodes).
    pub fn breakpoints(&self) -> Vec<f64> {
        let pts = match &self.kind {
            ProfileKind::Zero | ProfileKind::Constant | ProfileKind::Gaussian { .. } => vec![],
            ProfileKind::FlatTop {
                ramp_length,
                plateau_length,
            } => {
                let a = 0.5 * plateau_length;
                vec![-a - ramp_length, -a, a, a + ramp_length]
            }
            ProfileKind::TwoSolenoid {
                coil_center_offset: d,
                coil_width: w,
                gap,
            } => {
                let r = d - 0.5 * w - 0.5 * gap;
                let a = 0.5 * w;
                [-d, *d]
                    .iter()
                    .flat_map(|c| [c - a - r, c - a, c + a, c + a + r])
                    .collect()
            }
            ProfileKind::Tabulated(t) => t.z.clone(),
        };
        pts.into_iter().filter(|&z| z > self.z_min && z < self.z_max).collect()
    }

    /// `int_{z0}^{z1} Omega dz`, the Larmor rotation angle between two planes.
    pub fn larmor_phase_increment(&self, z0: f64, z1: f64) -> Result<f64> {
        self.check(z0)?;
        self.check(z1)?;
        match self.kind {
            ProfileKind::Zero => Ok(0.0),
            ProfileKind::Constant => Ok(self.scale * (z1 - z0)),
            _ => Ok(adaptive_gk15_split(|z| self.value(z), z0, z1, &self.breakpoints(), 1e-10).0),
        }
    }

    /// Tabulated nodes, or a uniform resampling of an analytic profile.
    pub fn samples(&self, count: usize) -> Vec<(f64, f64)> {
        match &self.kind {
            ProfileKind::Tabulated(t) => t.z.iter().copied().zip(t.values.iter().copied()).collect(),
            _ => {
                let n = count.max(2);
                (0..n)
                    .map(|i| {
                        let z = self.z_min + (self.z_max - self.z_min) * i as f64 / (n - 1) as f64;
                        (z, self.value(z))
                    })
                    .collect()
            }
        }
    }
}

/// A parsed two-column field table, `B_z` in tesla.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTable {
    pub samples: Vec<(f64, f64)>,
}

impl FieldTable {
    pub fn b_max(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.1.abs()))
    }

    pub fn profile(&self) -> Result<FieldProfile> {
        FieldProfile::normalize(&self.samples)
    }
}

/// Parses `z, B_z` rows separated by commas or whitespace. A leading
/// non-numeric header line and `#` comments are skipped.
pub fn parse_field_table(text: &str) -> Result<FieldTable> {
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => samples.push((v[0], v[1])),
            None if samples.is_empty() => continue,
            _ => {
                return Err(Error::InvalidSamples(format!(
                    "line {}: expected two numeric columns, got `{line}`",
                    lineno + 1
                )))
            }
        }
    }
    Ok(FieldTable { samples })
}

pub fn read_field_table(path: &Path) -> Result<FieldTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_constant() {
        let z = FieldProfile::zero(-5.0, 5.0).unwrap();
        assert_eq!(z.omega(1.3).unwrap(), 0.0);
        assert_eq!(z.larmor_phase_increment(-5.0, 5.0).unwrap(), 0.0);
        let c = FieldProfile::constant(0.0, 10.0).unwrap();
        assert_eq!(c.omega(3.0).unwrap(), 1.0);
        assert!((c.larmor_phase_increment(0.0, 7.5).unwrap() - 7.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain() {
        let c = FieldProfile::constant(0.0, 1.0).unwrap();
        assert!(matches!(c.omega(1.5), Err(Error::OutOfDomain { .. })));
        assert!(c.larmor_phase_increment(-1.0, 0.5).is_err());
    }

    #[test]
    fn normalize_divides_by_peak() {
        let p = FieldProfile::normalize(&[(0.0, 2.0), (1.0, 4.0)]).unwrap();
        assert_eq!(p.omega(1.0).unwrap(), 1.0);
        assert_eq!(p.omega(0.0).unwrap(), 0.5);
        let p = FieldProfile::normalize(&[(0.0, -3.0), (1.0, 3.0)]).unwrap();
        assert_eq!(p.omega(0.0).unwrap(), -1.0);
        assert_eq!(p.omega(1.0).unwrap(), 1.0);
        let bump: Vec<_> = (0..=10)
            .map(|i| (i as f64, 0.3 * (-(i as f64 - 5.0).powi(2) / 4.0).exp()))
            .collect();
        let p = FieldProfile::normalize(&bump).unwrap();
        assert_eq!(p.omega(5.0).unwrap(), 1.0);
    }

    #[test]
    fn normalize_rejects_bad_input() {
        assert!(FieldProfile::normalize(&[(0.0, 1.0)]).is_err());
        assert!(FieldProfile::normalize(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(FieldProfile::normalize(&[(1.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(FieldProfile::normalize(&[(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn tabulated_hits_nodes() {
        let s = [(0.0, 0.1), (0.5, 0.7), (1.2, 1.0), (2.0, -0.4), (3.0, 0.0)];
        let p = FieldProfile::normalize(&s).unwrap();
        for (z, v) in s {
            assert_eq!(p.omega(z).unwrap(), v);
        }
    }

    #[test]
    fn renormalization_is_idempotent() {
        let s: Vec<_> = (0..40)
            .map(|i| (i as f64 * 0.25, (i as f64 * 0.4).sin() * 3.0))
            .collect();
        let once = FieldProfile::normalize(&s).unwrap();
        let twice = FieldProfile::normalize(&once.samples(0)).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn builtins_are_bounded_by_one() {
        let profiles = [
            FieldProfile::flat_top(2.0, 3.0, -10.0, 10.0).unwrap(),
            FieldProfile::two_solenoid(6.0, 4.0, 3.0, -15.0, 15.0).unwrap(),
            FieldProfile::gaussian(20.0, 2.0, -10.0, 10.0).unwrap(),
            FieldProfile::normalize(
                &(0..30)
                    .map(|i| (i as f64, ((i * 7 % 11) as f64 - 5.0)))
                    .collect::<Vec<_>>(),
            )
            .unwrap(),
        ];
        for p in &profiles {
            let (a, b) = p.domain();
            let mut peak = 0.0f64;
            for i in 0..=10_000 {
                let z = a + (b - a) * i as f64 / 1e4;
                let v = p.omega(z).unwrap();
                assert!(v.abs() <= 1.0 + 1e-12, "{p}: {v} at {z}");
                peak = peak.max(v.abs());
            }
            assert!(peak > 0.999, "{p}: peak {peak}");
        }
    }

    #[test]
    fn gaussian_outside_domain_is_renormalized() {
        let p = FieldProfile::gaussian(20.0, 2.0, -10.0, 10.0).unwrap();
        assert!((p.omega(10.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_solenoid_gap_is_field_free() {
        let p = FieldProfile::two_solenoid(6.0, 4.0, 3.0, -15.0, 15.0).unwrap();
        assert_eq!(p.omega(0.0).unwrap(), 0.0);
        assert_eq!(p.omega(1.5).unwrap(), 0.0);
        assert!(p.omega(1.6).unwrap() > 0.0);
        assert_eq!(p.omega(6.0).unwrap(), 1.0);
        assert!(FieldProfile::two_solenoid(2.0, 3.0, 2.0, -5.0, 5.0).is_err());
    }

    #[test]
    fn larmor_phase_matches_trapezoid_oracle() {
        let p = FieldProfile::flat_top(1.5, 2.0, -5.0, 5.0).unwrap();
        let (a, b) = (-4.2, 3.1);
        // Richardson-extrapolated trapezoid on a dense grid
        let trap = |n: usize| {
            let h = (b - a) / n as f64;
            let inner: f64 = (1..n).map(|i| p.omega(a + h * i as f64).unwrap()).sum();
            h * (inner + 0.5 * (p.omega(a).unwrap() + p.omega(b).unwrap()))
        };
        let oracle = (4.0 * trap(400_000) - trap(200_000)) / 3.0;
        let v = p.larmor_phase_increment(a, b).unwrap();
        assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
        // plateau 2 plus two full ramps of mean 1/2
        let full = p.larmor_phase_increment(-5.0, 5.0).unwrap();
        assert!((full - 3.5).abs() < 1e-10);
    }

    #[test]
    fn slope_matches_finite_difference() {
        let p = FieldProfile::two_solenoid(6.0, 4.0, 3.0, -15.0, 15.0).unwrap();
        for z in [2.0, 3.1, 7.7, -8.4] {
            let h = 1e-6;
            let fd = (p.omega(z + h).unwrap() - p.omega(z - h).unwrap()) / (2.0 * h);
            assert!((p.omega_prime(z).unwrap() - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn parse_table_formats() {
        let t = parse_field_table("z,Bz\n0, 0.5\n1,1.0\n").unwrap();
        assert_eq!(t.samples, vec![(0.0, 0.5), (1.0, 1.0)]);
        let t = parse_field_table("# comment\n0 0.5\n1\t-2.0\n").unwrap();
        assert_eq!(t.b_max(), 2.0);
        assert!(parse_field_table("0,1\nfoo,bar\n").is_err());
    }

    proptest::proptest! {
        #[test]
        fn larmor_phase_is_additive(z0 in -9.0f64..9.0, d1 in 0.0f64..5.0, d2 in 0.0f64..5.0) {
            let p = FieldProfile::two_solenoid(5.0, 3.0, 2.0, -20.0, 20.0).unwrap();
            let (z1, z2) = (z0 + d1, z0 + d1 + d2);
            let sum = p.larmor_phase_increment(z0, z1).unwrap() + p.larmor_phase_increment(z1, z2).unwrap();
            proptest::prop_assert!((sum - p.larmor_phase_increment(z0, z2).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn pchip_never_overshoots(vals in proptest::collection::vec(-5.0f64..5.0, 3..20), t in 0.0f64..1.0) {
            let s: Vec<_> = vals.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect();
            if let Ok(p) = FieldProfile::normalize(&s) {
                let z = t * (s.len() - 1) as f64;
                proptest::prop_assert!(p.omega(z).unwrap().abs() <= 1.0 + 1e-12);
            }
        }
    }
}
