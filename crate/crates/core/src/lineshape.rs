//! Finite-observation-time line profile and spectral-resolution checks.
//!
//! The diffraction function is normalized to unit area over ω:
//! δ^(T)(ω) = (T/2π)·sinc²(ωT/2). It is the |∫₀ᵀ e^{iωt} dt|² / (2πT) of a
//! transform-limited line observed for a time T.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// A ratio at or above this counts as "≫ 1".
pub const RESOLVED_THRESHOLD: f64 = 10.0;
/// A ratio at or below this counts as "≪ 1".
pub const NEGLIGIBLE_THRESHOLD: f64 = 0.1;

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// δ^(T)(ω) for a frequency offset ω and observation time T (both in trap units).
pub fn diffraction(omega: f64, duration: f64) -> f64 {
    let s = sinc(0.5 * omega * duration);
    duration / TAU * s * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffractionProfile {
    duration: f64,
}

impl DiffractionProfile {
    pub fn new(duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Config(format!(
                "observation time must be positive, got {duration}"
            )));
        }
        Ok(Self { duration })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn eval(&self, omega: f64) -> f64 {
        diffraction(omega, self.duration)
    }

    pub fn peak(&self) -> f64 {
        self.duration / TAU
    }
}

/// A dimensionless ratio and whether it meets its criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion {
    pub ratio: f64,
    pub satisfied: bool,
}

impl Criterion {
    fn resolved(ratio: f64) -> Self {
        Self { ratio, satisfied: ratio >= RESOLVED_THRESHOLD }
    }

    fn negligible(ratio: f64) -> Self {
        Self { ratio, satisfied: ratio <= NEGLIGIBLE_THRESHOLD }
    }
}

/// Inputs to [`resolution_report`], all in trap units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionInputs {
    /// δν.
    pub splitting: f64,
    /// T.
    pub duration: f64,
    /// Δω, the laser spectral width.
    pub linewidth: f64,
    /// Recoil shift ħ|Δk|²/2M at the momentum transfer of interest.
    pub recoil: f64,
    /// D = d/a₀.
    pub separation: f64,
    /// c in a₀·ν units, when the optical carrier is known.
    pub speed_of_light: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionReport {
    /// δν·T/2π ≫ 1.
    pub doublet: Criterion,
    /// recoil·T/2π ≫ 1.
    pub recoil: Criterion,
    /// Δω/δν ≪ 1.
    pub linewidth_vs_splitting: Criterion,
    /// Δω·d/2πc ≪ 1, when c is known.
    pub linewidth_vs_separation: Option<Criterion>,
}

impl ResolutionReport {
    pub fn doublet_resolved(&self) -> bool {
        self.doublet.satisfied
    }

    pub fn recoil_resolved(&self) -> bool {
        self.recoil.satisfied
    }

    pub fn laser_linewidth_ok(&self) -> bool {
        self.linewidth_vs_splitting.satisfied
            && self.linewidth_vs_separation.is_none_or(|c| c.satisfied)
    }

    /// Human-readable report lines.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!(
                "doublet_resolved = {} (δν·T/2π = {:.6e}, threshold {RESOLVED_THRESHOLD})",
                self.doublet.satisfied, self.doublet.ratio
            ),
            format!(
                "recoil_resolved = {} (recoil·T/2π = {:.6e}, threshold {RESOLVED_THRESHOLD})",
                self.recoil.satisfied, self.recoil.ratio
            ),
            format!(
                "laser_linewidth_ok = {} (Δω/δν = {:.6e}, threshold {NEGLIGIBLE_THRESHOLD})",
                self.laser_linewidth_ok(),
                self.linewidth_vs_splitting.ratio
            ),
        ];
        match self.linewidth_vs_separation {
            Some(c) => out.push(format!("  Δω·d/2πc = {:.6e}", c.ratio)),
            None => out.push("  Δω·d/2πc not evaluated (optical carrier unknown)".into()),
        }
        out
    }
}

pub fn resolution_report(inputs: &ResolutionInputs) -> ResolutionReport {
    let linewidth_ratio = if inputs.linewidth == 0.0 {
        0.0
    } else {
        inputs.linewidth / inputs.splitting
    };
    ResolutionReport {
        doublet: Criterion::resolved(inputs.splitting * inputs.duration / TAU),
        recoil: Criterion::resolved(inputs.recoil * inputs.duration / TAU),
        linewidth_vs_splitting: Criterion::negligible(linewidth_ratio),
        linewidth_vs_separation: inputs
            .speed_of_light
            .map(|c| Criterion::negligible(inputs.linewidth * inputs.separation / (2.0 * PI * c))),
    }
}
