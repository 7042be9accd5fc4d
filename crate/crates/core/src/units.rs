//! Laboratory parameters and the normalized paraxial unit system.
//!
//! Inside the library transverse lengths are measured in the magnetic length
//! `rho_H`, the propagation coordinate in `k rho_H^2`, photon energies in
//! `1/(k rho_H^2)` and rates in units of the electron rest energy `m_e`.
//! Conversions to SI happen only here.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reduced Planck constant (J s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Electron rest mass (kg), CODATA 2018.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Fine-structure constant, CODATA 2018.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

/// Electron rest energy in keV.
pub fn electron_rest_energy_kev() -> f64 {
    ELECTRON_MASS * SPEED_OF_LIGHT * SPEED_OF_LIGHT / ELEMENTARY_CHARGE / 1e3
}

/// `m_e c^2 / hbar` in 1/s: converts a rate carried in units of `m_e` to SI.
pub fn rest_energy_rate() -> f64 {
    ELECTRON_MASS * SPEED_OF_LIGHT * SPEED_OF_LIGHT / HBAR
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabSetup {
    /// Electron kinetic energy in keV.
    pub kinetic_energy_kev: f64,
    /// Peak axial field `max |B_z|` in tesla.
    pub b_max_tesla: f64,
    /// Interaction length in units of `k rho_H^2`.
    pub interaction_length: f64,
}

impl LabSetup {
    pub fn new(kinetic_energy_kev: f64, b_max_tesla: f64, interaction_length: f64) -> Result<Self> {
        let setup = LabSetup {
            kinetic_energy_kev,
            b_max_tesla,
            interaction_length,
        };
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        positive("kinetic_energy_kev", self.kinetic_energy_kev)?;
        positive("b_max_tesla", self.b_max_tesla)?;
        positive("interaction_length", self.interaction_length)
    }
}

/// Electron beam kinematics in the lab frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamKinematics {
    pub beta: f64,
    pub gamma: f64,
    /// Electron wavenumber (1/m).
    pub k: f64,
    /// Magnetic length (m).
    pub rho_h: f64,
    /// `k rho_H`.
    pub chi: f64,
}

impl BeamKinematics {
    /// Longitudinal length unit `k rho_H^2` in meters.
    pub fn longitudinal_unit(&self) -> f64 {
        self.k * self.rho_h * self.rho_h
    }

    /// `gamma beta = k hbar / (m_e c)`, the electron momentum in units of `m_e c`.
    pub fn momentum_mc(&self) -> f64 {
        self.gamma * self.beta
    }

    /// Peak field in tesla implied by the magnetic length.
    pub fn b_max_tesla(&self) -> f64 {
        2.0 * HBAR / (ELEMENTARY_CHARGE * self.rho_h * self.rho_h)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, v, "must be positive and finite"))
    }
}

pub fn derive_kinematics(setup: &LabSetup) -> Result<BeamKinematics> {
    positive("kinetic_energy_kev", setup.kinetic_energy_kev)?;
    positive("b_max_tesla", setup.b_max_tesla)?;

    let gamma = 1.0 + setup.kinetic_energy_kev / electron_rest_energy_kev();
    let beta = (1.0 - 1.0 / (gamma * gamma)).sqrt();
    let k = gamma * beta * ELECTRON_MASS * SPEED_OF_LIGHT / HBAR;
    let rho_h = (2.0 * HBAR / (ELEMENTARY_CHARGE * setup.b_max_tesla)).sqrt();
    Ok(BeamKinematics {
        beta,
        gamma,
        k,
        rho_h,
        chi: k * rho_h,
    })
}

/// Photon frequency in Hz for a normalized photon energy (units `1/(k rho_H^2)`).
pub fn normalized_frequency_to_hz(omega_norm: f64, kin: &BeamKinematics) -> f64 {
    debug_assert!(omega_norm >= 0.0);
    omega_norm * SPEED_OF_LIGHT / kin.longitudinal_unit() / (2.0 * PI)
}

pub fn normalized_length_to_meters(length_norm: f64, kin: &BeamKinematics) -> f64 {
    debug_assert!(length_norm >= 0.0);
    length_norm * kin.longitudinal_unit()
}

pub fn meters_to_normalized_length(meters: f64, kin: &BeamKinematics) -> f64 {
    meters / kin.longitudinal_unit()
}

/// Photon energy in units of `m_e` for a normalized photon energy.
///
/// `omega / m_e = omega_norm * gamma beta / chi^2`, since `1/(k rho_H^2) = k / chi^2`
/// and `k = gamma beta m_e` in natural units.
pub fn normalized_energy_to_rest_units(omega_norm: f64, kin: &BeamKinematics) -> f64 {
    omega_norm * kin.momentum_mc() / (kin.chi * kin.chi)
}

/// Rate in 1/s for a rate carried in units of `m_e`.
pub fn rate_to_si(rate_norm: f64) -> f64 {
    rate_norm * rest_energy_rate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kin(kev: f64, tesla: f64) -> BeamKinematics {
        derive_kinematics(&LabSetup::new(kev, tesla, 30.0).unwrap()).unwrap()
    }

    #[test]
    fn microscope_constants() {
        let k = kin(100.0, 1.0);
        assert!((k.rho_h / 36.3e-9 - 1.0).abs() < 5e-3, "rho_H = {}", k.rho_h);
        assert!((k.k / 1.7e12 - 1.0).abs() < 3e-2, "k = {}", k.k);
        assert!((k.chi / 6.2e4 - 1.0).abs() < 2e-2, "chi = {}", k.chi);
        assert!((k.beta - 0.548).abs() < 0.548e-3, "beta = {}", k.beta);
    }

    #[test]
    fn beta_is_field_independent() {
        assert_eq!(kin(100.0, 1.0).beta, kin(100.0, 7.0).beta);
    }

    #[test]
    fn frequency_window() {
        let b0: f64 = 1.14;
        for (tesla, lo, hi) in [(1.0, 4.0e9, 5.0e9), (10.0, 40.0e9, 50.0e9)] {
            let k = kin(100.0, tesla);
            let nu = normalized_frequency_to_hz(k.beta / (2.0 * b0 * b0), &k);
            assert!(nu > lo && nu < hi, "{tesla} T: {nu}");
        }
        assert_eq!(normalized_frequency_to_hz(0.0, &kin(100.0, 1.0)), 0.0);
    }

    #[test]
    fn interaction_length_in_meters() {
        let one = normalized_length_to_meters(30.0, &kin(100.0, 1.0));
        let ten = normalized_length_to_meters(30.0, &kin(100.0, 10.0));
        assert!((one - 0.067).abs() < 0.001, "{one}");
        assert!((ten - 0.0067).abs() < 0.0001, "{ten}");
        assert_eq!(normalized_length_to_meters(0.0, &kin(100.0, 1.0)), 0.0);
    }

    #[test]
    fn chi_two_ways() {
        let k = kin(100.0, 1.0);
        let direct =
            k.gamma * k.beta * ELECTRON_MASS * SPEED_OF_LIGHT * (2.0 / (HBAR * ELEMENTARY_CHARGE * 1.0)).sqrt();
        assert!((k.chi / direct - 1.0).abs() < 1e-12);
        let p = k.k * HBAR / (ELECTRON_MASS * SPEED_OF_LIGHT);
        assert!((k.momentum_mc() / p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_setup() {
        assert!(LabSetup::new(0.0, 1.0, 1.0).is_err());
        assert!(LabSetup::new(100.0, -1.0, 1.0).is_err());
        assert!(LabSetup::new(100.0, 1.0, 0.0).is_err());
        let bad = LabSetup {
            kinetic_energy_kev: f64::NAN,
            b_max_tesla: 1.0,
            interaction_length: 1.0,
        };
        assert!(derive_kinematics(&bad).is_err());
    }

    proptest::proptest! {
        #[test]
        fn length_round_trip(len in 0.0f64..1e4, tesla in 0.01f64..50.0) {
            let k = kin(100.0, tesla);
            let back = meters_to_normalized_length(normalized_length_to_meters(len, &k), &k);
            proptest::prop_assert!((back - len).abs() <= 1e-12 * len.max(1e-300));
        }

        #[test]
        fn beta_monotone_in_energy(e1 in 0.1f64..1e4, de in 1e-3f64..1e3) {
            let a = kin(e1, 1.0).beta;
            let b = kin(e1 + de, 1.0).beta;
            proptest::prop_assert!(b > a);
        }
    }
}
