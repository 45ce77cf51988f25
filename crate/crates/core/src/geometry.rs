//! Units, scattering-plane geometry and momentum transfer.
//!
//! Everything downstream of this module is dimensionless: lengths are in units
//! of the single-well ground-state size a₀, wavevectors in 1/a₀, frequencies in
//! units of the trap frequency ν and times in 1/ν.
//!
//! Angle convention: the detector scans the plane spanned by the laser axis
//! k̂_L and the well axis d̂. The emission angle Φ is measured in that plane
//! from k̂_L towards the in-plane normal n̂ (the component of d̂ orthogonal to
//! k̂_L). The default geometry puts the wells perpendicular to the laser, so
//! n̂ = d̂ and Δk·d = −η·D·sinΦ.

use std::f64::consts::TAU;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

const UNIT_TOLERANCE: f64 = 1e-9;

/// Conversion between SI quantities and the dimensionless trap units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// a₀ in meters.
    pub length_m: f64,
    /// ν in rad/s.
    pub frequency_rad_s: f64,
}

impl UnitSystem {
    pub fn new(length_m: f64, frequency_rad_s: f64) -> Result<Self> {
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(Error::Config(format!(
                "ground-state size must be positive, got {length_m}"
            )));
        }
        if !(frequency_rad_s.is_finite() && frequency_rad_s > 0.0) {
            return Err(Error::Config(format!(
                "trap frequency must be positive, got {frequency_rad_s}"
            )));
        }
        Ok(Self {
            length_m,
            frequency_rad_s,
        })
    }

    /// Builds the unit system from the atomic mass, using a₀ = √(ħ/2Mν).
    pub fn from_mass(mass_kg: f64, frequency_rad_s: f64) -> Result<Self> {
        if !(mass_kg.is_finite() && mass_kg > 0.0) {
            return Err(Error::Config(format!("mass must be positive, got {mass_kg}")));
        }
        Self::new((HBAR / (2.0 * mass_kg * frequency_rad_s)).sqrt(), frequency_rad_s)
    }

    pub fn length(&self, meters: f64) -> f64 {
        meters / self.length_m
    }

    pub fn wavenumber(&self, per_meter: f64) -> f64 {
        per_meter * self.length_m
    }

    pub fn frequency(&self, rad_s: f64) -> f64 {
        rad_s / self.frequency_rad_s
    }

    pub fn time(&self, seconds: f64) -> f64 {
        seconds * self.frequency_rad_s
    }

    /// Speed of light in a₀·ν units.
    pub fn speed_of_light(&self) -> f64 {
        SPEED_OF_LIGHT / (self.length_m * self.frequency_rad_s)
    }
}

/// Laser axis, well axis and the detection plane they span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterGeometry {
    laser_axis: Vec3,
    well_axis: Vec3,
    normal: Vec3,
}

impl Default for ScatterGeometry {
    fn default() -> Self {
        Self::new(Vec3::z(), Vec3::x()).expect("unit axes")
    }
}

impl ScatterGeometry {
    /// Both axes must already be unit vectors.
    ///
    /// When the well axis is parallel to the laser the detection plane is any
    /// plane containing k̂_L; a fixed perpendicular is chosen in that case.
    pub fn new(laser_axis: Vec3, well_axis: Vec3) -> Result<Self> {
        check_unit("laser axis", &laser_axis)?;
        check_unit("well axis", &well_axis)?;
        let mut normal = well_axis - laser_axis * laser_axis.dot(&well_axis);
        if normal.norm() < 1e-12 {
            // pick the coordinate axis least aligned with k̂_L
            let (i, _) = laser_axis
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, c)| {
                    if c.abs() < acc.1 {
                        (i, c.abs())
                    } else {
                        acc
                    }
                });
            let mut e = Vec3::zeros();
            e[i] = 1.0;
            normal = e - laser_axis * laser_axis.dot(&e);
        }
        Ok(Self {
            laser_axis,
            well_axis,
            normal: normal.normalize(),
        })
    }

    pub fn laser_axis(&self) -> &Vec3 {
        &self.laser_axis
    }

    pub fn well_axis(&self) -> &Vec3 {
        &self.well_axis
    }

    /// In-plane unit vector orthogonal to k̂_L, the direction Φ = π/2.
    pub fn plane_normal(&self) -> &Vec3 {
        &self.normal
    }

    /// Detection direction at emission angle Φ.
    pub fn direction(&self, phi: f64) -> Vec3 {
        let phi = phi.rem_euclid(TAU);
        self.laser_axis * phi.cos() + self.normal * phi.sin()
    }

    /// Separation vector d in units of a₀ for well separation `separation` = D.
    pub fn separation_vector(&self, separation: f64) -> Vec3 {
        self.well_axis * separation
    }
}

fn check_unit(name: &str, v: &Vec3) -> Result<()> {
    let n = v.norm();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::Config(format!(
            "{name} must be a unit vector, |v| = {n}"
        )));
    }
    Ok(())
}

/// Wavevector of magnitude `magnitude` (1/a₀ units) emitted at angle Φ.
pub fn wavevector_from_angle(geometry: &ScatterGeometry, phi: f64, magnitude: f64) -> Result<Vec3> {
    if !(magnitude.is_finite() && magnitude > 0.0) {
        return Err(Error::Domain(format!(
            "wavevector magnitude must be positive, got {magnitude}"
        )));
    }
    Ok(geometry.direction(phi) * magnitude)
}

/// Δk = k_L − k with its magnitude and projection on the well separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumTransfer {
    pub vector: Vec3,
    /// |Δk|·a₀.
    pub magnitude: f64,
    /// Δk·d, a dimensionless phase.
    pub dot_separation: f64,
}

impl MomentumTransfer {
    /// Δk directly from its vector and the separation vector d (a₀ units).
    pub fn new(vector: Vec3, separation: &Vec3) -> Self {
        Self {
            vector,
            magnitude: vector.norm(),
            dot_separation: vector.dot(separation),
        }
    }

    /// Δk for emission at Φ with |k| = |k_L| = η.
    pub fn at_angle(geometry: &ScatterGeometry, eta: f64, separation: f64, phi: f64) -> Result<Self> {
        let k_l = geometry.laser_axis() * eta;
        let k = wavevector_from_angle(geometry, phi, eta)?;
        Ok(momentum_transfer(&k_l, &k, &geometry.separation_vector(separation)))
    }

    pub fn scaled(&self, s: f64, separation: &Vec3) -> Self {
        Self::new(self.vector * s, separation)
    }
}

pub fn momentum_transfer(k_l: &Vec3, k: &Vec3, separation: &Vec3) -> MomentumTransfer {
    MomentumTransfer::new(k_l - k, separation)
}

/// Recoil shift ħ|Δk|²/2M in units of ν, using ħ/2M = a₀²ν.
pub fn recoil_shift(dk: &MomentumTransfer) -> f64 {
    dk.magnitude * dk.magnitude
}
