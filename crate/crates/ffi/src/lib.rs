//! C ABI over the `twistrad` library.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_create`
//! style functions and released with the matching `*_free`. Every fallible
//! call returns a [`TwistradStatus`]; on failure the message is available
//! from [`twistrad_last_error`] on the same thread. Panics are caught and
//! reported as `TWISTRAD_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use num_complex::Complex64;
use twistrad::emission::{fieldfree_curve, general_rate_curve, total_rate, RateCurve, TransitionContext};
use twistrad::ermakov::ErmakovTrajectory;
use twistrad::field::FieldProfile;
use twistrad::quantum::{form_factor, ModeLabel};
use twistrad::units::{derive_kinematics, BeamKinematics, LabSetup};
use twistrad::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistradStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    OutOfDomain = 3,
    Numerical = 4,
    DarkChannel = 5,
    Io = 6,
    Config = 7,
    Panic = 8,
}

/// Normalized axial field profile.
pub struct TwistradProfile(FieldProfile);

/// Solved envelope with Lewis and Larmor phases.
pub struct TwistradTrajectory(Arc<ErmakovTrajectory>);

/// Sampled angular rate curve.
pub struct TwistradRateCurve(RateCurve);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TwistradKinematics {
    pub beta: f64,
    pub gamma: f64,
    /// Electron wavenumber, 1/m.
    pub k: f64,
    /// Magnetic length, m.
    pub rho_h: f64,
    pub chi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TwistradEnvelopeSample {
    pub z: f64,
    pub b: f64,
    pub b_prime: f64,
    pub lewis_phase: f64,
    pub larmor_phase: f64,
    pub omega: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TwistradTotalRate {
    pub norm: f64,
    pub si: f64,
    pub refinement_change: f64,
    pub undersampled: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> TwistradStatus {
    match err {
        Error::InvalidParameter { .. } | Error::InvalidSamples(_) => TwistradStatus::InvalidParameter,
        Error::OutOfDomain { .. } => TwistradStatus::OutOfDomain,
        Error::DarkChannel { .. } => TwistradStatus::DarkChannel,
        Error::Io { .. } => TwistradStatus::Io,
        Error::Config { .. } => TwistradStatus::Config,
        _ => TwistradStatus::Numerical,
    }
}

fn guard<F: FnOnce() -> Result<(), TwistradStatus>>(f: F) -> TwistradStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TwistradStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            TwistradStatus::Panic
        }
    }
}

fn check<T>(r: twistrad::Result<T>) -> Result<T, TwistradStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), TwistradStatus> {
    if p.is_null() {
        set_error(format!("`{name}` is null"));
        Err(TwistradStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn twistrad_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn twistrad_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Beam kinematics for a kinetic energy in keV and a peak field in tesla.
///
/// # Safety
/// `out` must point to writable storage for one `TwistradKinematics`.
#[no_mangle]
pub unsafe extern "C" fn twistrad_kinematics(
    energy_kev: f64,
    b_max_tesla: f64,
    out: *mut TwistradKinematics,
) -> TwistradStatus {
    guard(|| {
        non_null(out, "out")?;
        let setup = check(LabSetup::new(energy_kev, b_max_tesla, 1.0))?;
        let k = check(derive_kinematics(&setup))?;
        *out = TwistradKinematics {
            beta: k.beta,
            gamma: k.gamma,
            k: k.k,
            rho_h: k.rho_h,
            chi: k.chi,
        };
        Ok(())
    })
}

fn kinematics_from(k: &TwistradKinematics) -> BeamKinematics {
    BeamKinematics {
        beta: k.beta,
        gamma: k.gamma,
        k: k.k,
        rho_h: k.rho_h,
        chi: k.chi,
    }
}

/// Field-free profile on `[z_min, z_max]`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn twistrad_profile_zero(
    z_min: f64,
    z_max: f64,
    out: *mut *mut TwistradProfile,
) -> TwistradStatus {
    guard(|| {
        non_null(out, "out")?;
        put(out, TwistradProfile(check(FieldProfile::zero(z_min, z_max))?));
        Ok(())
    })
}

/// Uniform unit field on `[z_min, z_max]`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn twistrad_profile_constant(
    z_min: f64,
    z_max: f64,
    out: *mut *mut TwistradProfile,
) -> TwistradStatus {
    guard(|| {
        non_null(out, "out")?;
        put(out, TwistradProfile(check(FieldProfile::constant(z_min, z_max))?));
        Ok(())
    })
}

/// Plateau of length `plateau_length` centred at 0 with raised-cosine ramps.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn twistrad_profile_flat_top(
    ramp_length: f64,
    plateau_length: f64,
    z_min: f64,
    z_max: f64,
    out: *mut *mut TwistradProfile,
) -> TwistradStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = check(FieldProfile::flat_top(ramp_length, plateau_length, z_min, z_max))?;
        put(out, TwistradProfile(p));
        Ok(())
    })
}

/// Two coils centred at `+-coil_center_offset` with a field-free gap between them.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn twistrad_profile_two_solenoid(
    coil_center_offset: f64,
    coil_width: f64,
    gap: f64,
    z_min: f64,
    z_max: f64,
    out: *mut *mut TwistradProfile,
) -> TwistradStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = check(FieldProfile::two_solenoid(
            coil_center_offset,
            coil_width,
            gap,
            z_min,
            z_max,
        ))?;
        put(out, TwistradProfile(p));
        Ok(())
    })
}

/// Gaussian lens.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn twistrad_profile_gaussian(
    center: f64,
    width: f64,
    z_min: f64,
    z_max: f64,
    out: *mut *mut TwistradProfile,
) -> TwistradStatus {
    guard(|| {
        non_null(out, "out")?;
        put(
            out,
            TwistradProfile(check(FieldProfile::gaussian(center, width, z_min, z_max))?),
        );
        Ok(())
    })
}

/// Profile from `n` samples `(z[i], field[i])`, rescaled to unit peak.
///
/// # Safety
/// `z` and `field` must each point to `n` readable doubles; `out` must be a
/// valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn twistrad_profile_tabulated(
    z: *const f64,
    field: *const f64,
    n: usize,
    out: *mut *mut TwistradProfile,
) -> TwistradStatus {
    guard(|| {
        non_null(z, "z")?;
        non_null(field, "field")?;
        non_null(out, "out")?;
        let z = std::slice::from_raw_parts(z, n);
        let f = std::slice::from_raw_parts(field, n);
        let samples: Vec<(f64, f64)> = z.iter().copied().zip(f.iter().copied()).collect();
        put(out, TwistradProfile(check(FieldProfile::normalize(&samples))?));
        Ok(())
    })
}

/// `Omega(z)`.
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn twistrad_profile_omega(
    profile: *const TwistradProfile,
    z: f64,
    out: *mut f64,
) -> TwistradStatus {
    guard(|| {
        non_null(profile, "profile")?;
        non_null(out, "out")?;
        *out = check((*profile).0.omega(z))?;
        Ok(())
    })
}

/// # Safety
/// `profile` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twistrad_profile_free(profile: *mut TwistradProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Solves the envelope on `[z_start, z_end]` with `b(z_ref) = b0`,
/// `b'(z_ref) = b0_prime`. Phases are measured from `z_start`.
///
/// # Safety
/// `profile` must be a live handle and `out` a valid handle slot.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn twistrad_trajectory_integrate(
    profile: *const TwistradProfile,
    z_ref: f64,
    b0: f64,
    b0_prime: f64,
    z_start: f64,
    z_end: f64,
    rel_tol: f64,
    out: *mut *mut TwistradTrajectory,
) -> TwistradStatus {
    guard(|| {
        non_null(profile, "profile")?;
        non_null(out, "out")?;
        let t = check(ErmakovTrajectory::integrate_from(
            &(*profile).0,
            z_ref,
            b0,
            b0_prime,
            z_start,
            z_end,
            rel_tol,
        ))?;
        put(out, TwistradTrajectory(Arc::new(t)));
        Ok(())
    })
}

/// Interpolated envelope at `z`.
///
/// # Safety
/// `traj` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn twistrad_trajectory_sample(
    traj: *const TwistradTrajectory,
    z: f64,
    out: *mut TwistradEnvelopeSample,
) -> TwistradStatus {
    guard(|| {
        non_null(traj, "traj")?;
        non_null(out, "out")?;
        let s = check((*traj).0.sample(z))?;
        *out = TwistradEnvelopeSample {
            z: s.z,
            b: s.b,
            b_prime: s.b_prime,
            lewis_phase: s.lewis_phase,
            larmor_phase: s.larmor_phase,
            omega: s.omega,
        };
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twistrad_trajectory_free(traj: *mut TwistradTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Form factor `<n_f| exp[-i(kappa a + kappa^* a^dagger)] |n_i>`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twistrad_form_factor(
    n_f: u32,
    n_i: u32,
    kappa_re: f64,
    kappa_im: f64,
    re: *mut f64,
    im: *mut f64,
) -> TwistradStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        let v = form_factor(n_f, n_i, Complex64::new(kappa_re, kappa_im));
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Closed-form field-free curve for the `(ell_i, 0) -> (ell_i - 1, 0)` channel.
///
/// # Safety
/// `theta` must point to `n` readable doubles; `kin` must be readable and
/// `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn twistrad_rate_curve_fieldfree(
    theta: *const f64,
    n: usize,
    length: f64,
    b0: f64,
    ell_i: u32,
    kin: *const TwistradKinematics,
    out: *mut *mut TwistradRateCurve,
) -> TwistradStatus {
    guard(|| {
        non_null(theta, "theta")?;
        non_null(kin, "kin")?;
        non_null(out, "out")?;
        let grid = std::slice::from_raw_parts(theta, n);
        let curve = check(fieldfree_curve(grid, length, b0, ell_i, &kinematics_from(&*kin)))?;
        put(out, TwistradRateCurve(curve));
        Ok(())
    })
}

/// General rate curve for the channel `(ni_plus, ni_minus) -> (nf_plus, nf_minus)`
/// on `traj`, which must cover `[-L/2, L/2]`.
///
/// # Safety
/// `traj` must be a live handle, `theta` must point to `n` readable doubles,
/// `kin` must be readable and `out` a valid handle slot.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn twistrad_rate_curve_general(
    traj: *const TwistradTrajectory,
    ni_plus: u32,
    ni_minus: u32,
    nf_plus: u32,
    nf_minus: u32,
    kin: *const TwistradKinematics,
    length: f64,
    theta: *const f64,
    n: usize,
    phi_samples: usize,
    dipole: bool,
    out: *mut *mut TwistradRateCurve,
) -> TwistradStatus {
    guard(|| {
        non_null(traj, "traj")?;
        non_null(kin, "kin")?;
        non_null(theta, "theta")?;
        non_null(out, "out")?;
        let ctx = check(TransitionContext::new(
            ModeLabel::new(ni_plus, ni_minus),
            ModeLabel::new(nf_plus, nf_minus),
            kinematics_from(&*kin),
            length,
            Arc::clone(&(*traj).0),
        ))?;
        let grid = std::slice::from_raw_parts(theta, n);
        let curve = check(general_rate_curve(&ctx, grid, phi_samples, dipole))?;
        put(out, TwistradRateCurve(curve));
        Ok(())
    })
}

/// Number of samples in the curve, 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn twistrad_rate_curve_len(curve: *const TwistradRateCurve) -> usize {
    if curve.is_null() {
        0
    } else {
        (*curve).0.len()
    }
}

/// Sample `index`: angle in rad and `dw/dtheta` in units of `m_e`.
///
/// # Safety
/// `curve` must be a live handle; `theta` and `rate` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twistrad_rate_curve_get(
    curve: *const TwistradRateCurve,
    index: usize,
    theta: *mut f64,
    rate: *mut f64,
) -> TwistradStatus {
    guard(|| {
        non_null(curve, "curve")?;
        non_null(theta, "theta")?;
        non_null(rate, "rate")?;
        let c = &(*curve).0;
        if index >= c.len() {
            set_error(format!("index {index} out of range for {} samples", c.len()));
            return Err(TwistradStatus::InvalidParameter);
        }
        *theta = c.theta[index];
        *rate = c.rate[index];
        Ok(())
    })
}

/// Simpson integral of the curve.
///
/// # Safety
/// `curve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn twistrad_rate_curve_total(
    curve: *const TwistradRateCurve,
    out: *mut TwistradTotalRate,
) -> TwistradStatus {
    guard(|| {
        non_null(curve, "curve")?;
        non_null(out, "out")?;
        let t = total_rate(&(*curve).0);
        *out = TwistradTotalRate {
            norm: t.norm,
            si: t.si,
            refinement_change: t.refinement_change,
            undersampled: t.undersampled,
        };
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twistrad_rate_curve_free(curve: *mut TwistradRateCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}
