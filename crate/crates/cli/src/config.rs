//! Run configuration files.
//!
//! A config is TOML with fixed sections. Unknown keys are rejected. Two forms
//! exist: dimensionless (trap units) and SI. Both resolve to the same
//! [`RunConfig`].

use std::f64::consts::TAU;
use std::path::Path;

use fringe_scatter::geometry::{ScatterGeometry, UnitSystem, Vec3};
use fringe_scatter::{AtomState, Emission, Error, LaserConfig, Result, ScatterChannel, ScatterParams, TrapConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitMode {
    Dimensionless,
    Si,
}

impl UnitMode {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "dimensionless" => Ok(UnitMode::Dimensionless),
            "si" => Ok(UnitMode::Si),
            other => Err(Error::Config(format!("units must be \"si\" or \"dimensionless\", got \"{other}\""))),
        }
    }
}

/// Φ and ω sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub phi_min: f64,
    pub phi_max: f64,
    /// Points over the half-open range [phi_min, phi_max).
    pub phi_steps: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    /// Points over the closed range [omega_min, omega_max].
    pub omega_steps: usize,
}

impl Grids {
    pub fn phis(&self) -> Vec<f64> {
        let h = (self.phi_max - self.phi_min) / self.phi_steps as f64;
        (0..self.phi_steps).map(|i| self.phi_min + i as f64 * h).collect()
    }

    pub fn omegas(&self) -> Vec<f64> {
        if self.omega_steps == 1 {
            return vec![self.omega_min];
        }
        let h = (self.omega_max - self.omega_min) / (self.omega_steps - 1) as f64;
        (0..self.omega_steps).map(|i| self.omega_min + i as f64 * h).collect()
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("geometry.phi_min".into(), format!("{:e}", self.phi_min)),
            ("geometry.phi_max".into(), format!("{:e}", self.phi_max)),
            ("geometry.phi_steps".into(), self.phi_steps.to_string()),
            ("geometry.omega_min".into(), format!("{:e}", self.omega_min)),
            ("geometry.omega_max".into(), format!("{:e}", self.omega_max)),
            ("geometry.omega_steps".into(), self.omega_steps.to_string()),
        ]
    }

    fn validate(&self) -> Result<()> {
        if !(self.phi_min.is_finite() && self.phi_max.is_finite() && self.phi_max > self.phi_min) {
            return Err(Error::Config(format!(
                "geometry.phi_max ({}) must exceed geometry.phi_min ({})",
                self.phi_max, self.phi_min
            )));
        }
        if !(self.omega_min.is_finite() && self.omega_max.is_finite() && self.omega_max >= self.omega_min) {
            return Err(Error::Config("geometry.omega_max must not be below geometry.omega_min".into()));
        }
        if self.phi_steps == 0 || self.omega_steps == 0 {
            return Err(Error::Config("grid step counts must be positive".into()));
        }
        if self.omega_steps > 1 && self.omega_max == self.omega_min {
            return Err(Error::Config("an ω grid with several points needs omega_max > omega_min".into()));
        }
        Ok(())
    }
}

/// Fully resolved run configuration in trap units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub units: UnitMode,
    pub params: ScatterParams,
    pub grids: Grids,
}

impl RunConfig {
    /// Parameter echo followed by the grid echo.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = self.params.echo();
        out.extend(self.grids.echo());
        out
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmissionSection {
    gamma: Option<f64>,
    dipole_pattern: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSection {
    theta: f64,
    phi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ChannelKind {
    Rayleigh,
    Raman,
}

// ---- dimensionless form ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimTrap {
    separation: f64,
    splitting: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimLaser {
    eta: f64,
    detuning: f64,
    rabi: f64,
    duration: f64,
    #[serde(default)]
    linewidth: f64,
    carrier: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimChannel {
    kind: ChannelKind,
    raman_offset: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimGeometry {
    laser_axis: Option<[f64; 3]>,
    well_axis: Option<[f64; 3]>,
    phi_min: Option<f64>,
    phi_max: Option<f64>,
    phi_steps: Option<usize>,
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    omega_steps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimFile {
    #[allow(dead_code)]
    units: Option<String>,
    trap: DimTrap,
    laser: DimLaser,
    #[serde(default)]
    emission: EmissionSection,
    state: StateSection,
    channel: DimChannel,
    #[serde(default)]
    geometry: DimGeometry,
}

// ---- SI form ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiTrap {
    separation_m: f64,
    splitting_rad_s: f64,
    trap_frequency_rad_s: f64,
    ground_state_size_m: Option<f64>,
    mass_kg: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiLaser {
    wavelength_m: f64,
    detuning_rad_s: f64,
    rabi_rad_s: f64,
    duration_s: f64,
    #[serde(default)]
    linewidth_rad_s: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiEmission {
    gamma_rad_s: Option<f64>,
    dipole_pattern: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiChannel {
    kind: ChannelKind,
    raman_offset_rad_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiGeometry {
    laser_axis: Option<[f64; 3]>,
    well_axis: Option<[f64; 3]>,
    phi_min: Option<f64>,
    phi_max: Option<f64>,
    phi_steps: Option<usize>,
    omega_min_rad_s: Option<f64>,
    omega_max_rad_s: Option<f64>,
    omega_steps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiFile {
    #[allow(dead_code)]
    units: Option<String>,
    trap: SiTrap,
    laser: SiLaser,
    #[serde(default)]
    emission: SiEmission,
    state: StateSection,
    channel: SiChannel,
    #[serde(default)]
    geometry: SiGeometry,
}

const DEFAULT_PHI_STEPS: usize = 720;
const DEFAULT_OMEGA_STEPS: usize = 801;

fn geometry(laser: Option<[f64; 3]>, well: Option<[f64; 3]>) -> Result<ScatterGeometry> {
    let v = |a: [f64; 3]| Vec3::new(a[0], a[1], a[2]);
    ScatterGeometry::new(v(laser.unwrap_or([0.0, 0.0, 1.0])), v(well.unwrap_or([1.0, 0.0, 0.0])))
}

fn channel(kind: ChannelKind, offset: Option<f64>) -> Result<ScatterChannel> {
    match (kind, offset) {
        (ChannelKind::Rayleigh, None) => Ok(ScatterChannel::Rayleigh),
        (ChannelKind::Rayleigh, Some(_)) => Err(Error::Config("a Raman offset was given for the rayleigh channel".into())),
        (ChannelKind::Raman, offset) => Ok(ScatterChannel::Raman { offset: offset.unwrap_or(0.0) }),
    }
}

/// Default ω window: ±3δν around ω_L, or ±20/T when δν is zero.
fn default_omega_half_width(splitting: f64, duration: f64) -> f64 {
    if splitting > 0.0 {
        3.0 * splitting
    } else {
        20.0 / duration
    }
}

fn build(units: UnitMode, params: ScatterParams, grids: Grids) -> Result<RunConfig> {
    params.validate()?;
    grids.validate()?;
    Ok(RunConfig { units, params, grids })
}

fn from_dimensionless(f: DimFile) -> Result<RunConfig> {
    let params = ScatterParams {
        trap: TrapConfig { separation: f.trap.separation, splitting: f.trap.splitting },
        laser: LaserConfig {
            eta: f.laser.eta,
            detuning: f.laser.detuning,
            rabi: f.laser.rabi,
            duration: f.laser.duration,
            linewidth: f.laser.linewidth,
            carrier: f.laser.carrier,
        },
        emission: Emission {
            gamma: f.emission.gamma.unwrap_or(1.0),
            dipole_pattern: f.emission.dipole_pattern.unwrap_or(1.0),
        },
        state: AtomState::new(f.state.theta, f.state.phi).map_err(|e| Error::Config(e.to_string()))?,
        channel: channel(f.channel.kind, f.channel.raman_offset)?,
        geometry: geometry(f.geometry.laser_axis, f.geometry.well_axis)?,
    };
    let half = default_omega_half_width(params.trap.splitting, params.laser.duration);
    let g = f.geometry;
    let grids = Grids {
        phi_min: g.phi_min.unwrap_or(0.0),
        phi_max: g.phi_max.unwrap_or(TAU),
        phi_steps: g.phi_steps.unwrap_or(DEFAULT_PHI_STEPS),
        omega_min: g.omega_min.unwrap_or(-half),
        omega_max: g.omega_max.unwrap_or(half),
        omega_steps: g.omega_steps.unwrap_or(DEFAULT_OMEGA_STEPS),
    };
    build(UnitMode::Dimensionless, params, grids)
}

fn from_si(f: SiFile) -> Result<RunConfig> {
    let nu = f.trap.trap_frequency_rad_s;
    let units = match (f.trap.ground_state_size_m, f.trap.mass_kg) {
        (Some(a0), None) => UnitSystem::new(a0, nu)?,
        (None, Some(m)) => UnitSystem::from_mass(m, nu)?,
        _ => {
            return Err(Error::Config(
                "give exactly one of trap.ground_state_size_m and trap.mass_kg".into(),
            ))
        }
    };
    if !(f.laser.wavelength_m > 0.0 && f.laser.wavelength_m.is_finite()) {
        return Err(Error::Config(format!("laser.wavelength_m must be positive, got {}", f.laser.wavelength_m)));
    }
    let k_l = TAU / f.laser.wavelength_m;
    let eta = units.wavenumber(k_l);
    let params = ScatterParams {
        trap: TrapConfig {
            separation: units.length(f.trap.separation_m),
            splitting: units.frequency(f.trap.splitting_rad_s),
        },
        laser: LaserConfig {
            eta,
            detuning: units.frequency(f.laser.detuning_rad_s),
            rabi: units.frequency(f.laser.rabi_rad_s),
            duration: units.time(f.laser.duration_s),
            linewidth: units.frequency(f.laser.linewidth_rad_s),
            carrier: Some(units.speed_of_light() * eta),
        },
        emission: Emission {
            gamma: f.emission.gamma_rad_s.map_or(1.0, |g| units.frequency(g)),
            dipole_pattern: f.emission.dipole_pattern.unwrap_or(1.0),
        },
        state: AtomState::new(f.state.theta, f.state.phi).map_err(|e| Error::Config(e.to_string()))?,
        channel: channel(f.channel.kind, f.channel.raman_offset_rad_s.map(|w| units.frequency(w)))?,
        geometry: geometry(f.geometry.laser_axis, f.geometry.well_axis)?,
    };
    let half = default_omega_half_width(params.trap.splitting, params.laser.duration);
    let g = f.geometry;
    let grids = Grids {
        phi_min: g.phi_min.unwrap_or(0.0),
        phi_max: g.phi_max.unwrap_or(TAU),
        phi_steps: g.phi_steps.unwrap_or(DEFAULT_PHI_STEPS),
        omega_min: g.omega_min_rad_s.map_or(-half, |w| units.frequency(w)),
        omega_max: g.omega_max_rad_s.map_or(half, |w| units.frequency(w)),
        omega_steps: g.omega_steps.unwrap_or(DEFAULT_OMEGA_STEPS),
    };
    build(UnitMode::Si, params, grids)
}

/// Parses config text. `forced` comes from the command line and must agree
/// with a `units` key in the file when both are present.
pub fn parse(text: &str, forced: Option<UnitMode>) -> Result<RunConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let declared = match table.get("units") {
        None => None,
        Some(toml::Value::String(s)) => Some(UnitMode::parse(s)?),
        Some(other) => return Err(Error::Config(format!("units must be a string, got {other}"))),
    };
    let mode = match (forced, declared) {
        (Some(f), Some(d)) if f != d => {
            return Err(Error::Config(format!(
                "command line asks for {f:?} units but the config declares {d:?}"
            )))
        }
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => UnitMode::Dimensionless,
    };
    let de = |e: toml::de::Error| Error::Config(e.to_string());
    match mode {
        UnitMode::Dimensionless => from_dimensionless(toml::from_str(text).map_err(de)?),
        UnitMode::Si => from_si(toml::from_str(text).map_err(de)?),
    }
}

pub fn load(path: &Path, forced: Option<UnitMode>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, forced)
}
