//! Dimensionless run parameters shared by the scattering, oracle and analysis
//! modules. SI conversion happens in the command-line front end.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{ScatterGeometry, Vec3};
use crate::wavepacket::{overlap_epsilon, AtomState, PacketOverlap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// D = d/a₀.
    pub separation: f64,
    /// δν/ν, the tunnelling splitting of the doublet. An input, not derived from D.
    pub splitting: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserConfig {
    /// η = k_L·a₀.
    pub eta: f64,
    /// Δ/ν = (ω_L − ω₀)/ν.
    pub detuning: f64,
    /// Ω/ν.
    pub rabi: f64,
    /// ν·T.
    pub duration: f64,
    /// Δω/ν.
    pub linewidth: f64,
    /// ω_L/ν, only needed for the Δω ≪ 2πc/d check.
    pub carrier: Option<f64>,
}

/// Spontaneous-emission factors entering g_k² ∝ γ·𝒟(Φ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emission {
    /// γ/ν.
    pub gamma: f64,
    /// 𝒟, held constant over the detector.
    pub dipole_pattern: f64,
}

impl Default for Emission {
    fn default() -> Self {
        Self { gamma: 1.0, dipole_pattern: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScatterChannel {
    /// Back to the trapped ground state |g⟩.
    Rayleigh,
    /// To the untrapped state |g′⟩; `offset` is δω_{g′}/ν.
    Raman { offset: f64 },
}

impl ScatterChannel {
    pub fn name(&self) -> &'static str {
        match self {
            ScatterChannel::Rayleigh => "rayleigh",
            ScatterChannel::Raman { .. } => "raman",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterParams {
    pub trap: TrapConfig,
    pub laser: LaserConfig,
    pub emission: Emission,
    pub state: AtomState,
    pub channel: ScatterChannel,
    pub geometry: ScatterGeometry,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be non-negative and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite, got {v}")))
    }
}

impl ScatterParams {
    pub fn validate(&self) -> Result<()> {
        non_negative("trap.separation", self.trap.separation)?;
        non_negative("trap.splitting", self.trap.splitting)?;
        positive("laser.eta", self.laser.eta)?;
        finite("laser.detuning", self.laser.detuning)?;
        non_negative("laser.rabi", self.laser.rabi)?;
        positive("laser.duration", self.laser.duration)?;
        non_negative("laser.linewidth", self.laser.linewidth)?;
        if let Some(c) = self.laser.carrier {
            positive("laser.carrier", c)?;
        }
        non_negative("emission.gamma", self.emission.gamma)?;
        non_negative("emission.dipole_pattern", self.emission.dipole_pattern)?;
        finite("state.theta", self.state.theta)?;
        finite("state.phi", self.state.phi)?;
        if let ScatterChannel::Raman { offset } = self.channel {
            finite("channel.raman_offset", offset)?;
        }
        Ok(())
    }

    pub fn overlap(&self) -> Result<PacketOverlap> {
        overlap_epsilon(self.trap.separation)
    }

    /// d in units of a₀.
    pub fn separation_vector(&self) -> Vec3 {
        self.geometry.separation_vector(self.trap.separation)
    }

    /// Speed of light in a₀·ν units, c = ω_L/k_L.
    pub fn speed_of_light(&self) -> Option<f64> {
        self.laser.carrier.map(|w| w / self.laser.eta)
    }

    /// Every dimensionless parameter as `section.key` / value pairs, with
    /// values printed in shortest round-trip form.
    pub fn echo(&self) -> Vec<(String, String)> {
        let f = |v: f64| format!("{v:e}");
        let v3 = |v: &Vec3| format!("[{:e}, {:e}, {:e}]", v.x, v.y, v.z);
        let mut out = vec![
            ("trap.separation", f(self.trap.separation)),
            ("trap.splitting", f(self.trap.splitting)),
            ("laser.eta", f(self.laser.eta)),
            ("laser.detuning", f(self.laser.detuning)),
            ("laser.rabi", f(self.laser.rabi)),
            ("laser.duration", f(self.laser.duration)),
            ("laser.linewidth", f(self.laser.linewidth)),
        ];
        if let Some(c) = self.laser.carrier {
            out.push(("laser.carrier", f(c)));
        }
        out.extend([
            ("emission.gamma", f(self.emission.gamma)),
            ("emission.dipole_pattern", f(self.emission.dipole_pattern)),
            ("state.theta", f(self.state.theta)),
            ("state.phi", f(self.state.phi)),
            ("channel.kind", format!("\"{}\"", self.channel.name())),
        ]);
        if let ScatterChannel::Raman { offset } = self.channel {
            out.push(("channel.raman_offset", f(offset)));
        }
        out.push(("geometry.laser_axis", v3(self.geometry.laser_axis())));
        out.push(("geometry.well_axis", v3(self.geometry.well_axis())));
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// SHA-256 over the parameter echo.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.echo() {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_and_fingerprint() {
        let p = fixtures::params(2.0, AtomState::symmetric());
        p.validate().unwrap();
        let mut q = p;
        q.laser.eta = 0.0;
        assert!(q.validate().unwrap_err().is_config());
        let mut r = p;
        r.state.phi = 1.0;
        assert_ne!(p.fingerprint(), r.fingerprint());
        assert_eq!(p.fingerprint(), fixtures::params(2.0, AtomState::symmetric()).fingerprint());
        assert_eq!(p.fingerprint().len(), 64);
    }
}
