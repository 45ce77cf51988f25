//! Subcommand bodies. Each returns the finished output text; nothing is
//! written until the whole computation has succeeded.

use std::str::FromStr;

use fringe_scatter::scattering::rayleigh_line_profile;
use fringe_scatter::{
    broadband_visibility, fit_fringe, raman_pattern, rayleigh_spectrum, Error, FringeFit, ResolutionReport, Result,
    RayleighLine, ScatterChannel, ScatterParams,
};

use crate::config::RunConfig;
use crate::output::Csv;

pub const SPECTRUM_COLUMNS: [&str; 6] = [
    "phi_rad",
    "omega_over_nu",
    "intensity_total",
    "intensity_elastic",
    "intensity_stokes",
    "intensity_antistokes",
];

pub const RAMAN_COLUMNS: [&str; 4] = ["phi_rad", "dk_dot_d", "intensity", "intensity_envelope_normalized"];

/// Logs the dimensionless groups of a run to standard error.
pub fn log_parameters(cfg: &RunConfig) {
    eprintln!("dimensionless parameters:");
    for (k, v) in cfg.echo() {
        eprintln!("  {k} = {v}");
    }
    if let Ok(o) = cfg.params.overlap() {
        eprintln!("  overlap ε = {:e}{}", o.value, if o.underflowed { " (underflow)" } else { "" });
    }
}

fn report(resolution: &ResolutionReport, check_doublet: bool) {
    for line in resolution.lines() {
        eprintln!("{line}");
    }
    if check_doublet && !resolution.doublet_resolved() {
        eprintln!(
            "warning: doublet unresolved (δν·T/2π = {:.3e}); the line weights assume resolved lines",
            resolution.doublet.ratio
        );
    }
    if !resolution.laser_linewidth_ok() {
        eprintln!("warning: laser linewidth is not negligible");
    }
}

fn header(cmd: &str, cfg: &RunConfig) -> Csv {
    let mut csv = Csv::new(cmd);
    csv.meta("params_hash", format!("\"{}\"", cfg.params.fingerprint()))
        .params(&cfg.echo());
    csv
}

pub fn rayleigh(cfg: &RunConfig) -> Result<String> {
    if cfg.params.channel != ScatterChannel::Rayleigh {
        return Err(Error::Config("rayleigh-spectrum needs channel.kind = \"rayleigh\"".into()));
    }
    let phis = cfg.grids.phis();
    let omegas = cfg.grids.omegas();
    let spec = rayleigh_spectrum(&cfg.params, &phis, &omegas)?;
    report(&spec.resolution, true);
    let mut csv = header("rayleigh-spectrum", cfg);
    csv.columns(&SPECTRUM_COLUMNS);
    for (i, &phi) in phis.iter().enumerate() {
        for (j, &w) in omegas.iter().enumerate() {
            let s = spec.get(i, j);
            csv.row(&[phi, w, s.total, s.elastic, s.stokes, s.antistokes]);
        }
    }
    Ok(csv.into_string())
}

pub fn raman(cfg: &RunConfig) -> Result<String> {
    if !matches!(cfg.params.channel, ScatterChannel::Raman { .. }) {
        return Err(Error::Config("raman-pattern needs channel.kind = \"raman\"".into()));
    }
    let phis = cfg.grids.phis();
    let profile = raman_pattern(&cfg.params, &phis)?;
    report(&profile.resolution, false);
    if !profile.resolution.recoil_resolved() {
        eprintln!("warning: recoil shift is not resolved at the largest |Δk| on the grid");
    }
    let mut csv = header("raman-pattern", cfg);
    csv.columns(&RAMAN_COLUMNS);
    for r in &profile.rows {
        csv.row(&[r.phi, r.dk_dot_d, r.intensity, r.envelope_normalized]);
    }
    match fit_fringe(&profile.fringe_samples()) {
        Ok(fit) => footer(&mut csv, &fit),
        Err(e) => {
            eprintln!("warning: fringe fit failed: {e}");
            csv.meta("fit_error", format!("\"{e}\""));
        }
    }
    Ok(csv.into_string())
}

fn footer(csv: &mut Csv, fit: &FringeFit) {
    csv.meta("fitted_visibility", format!("{:e}", fit.visibility))
        .meta("fitted_phase", format!("{:e}", fit.phase))
        .meta("fitted_period", format!("{:e}", fit.period))
        .meta("fitted_offset", format!("{:e}", fit.offset));
    match fit.envelope_width {
        Some(w) => csv.meta("fitted_envelope_width", format!("{w:e}")),
        None => csv.meta("fitted_envelope_width", "\"undetermined\""),
    };
    csv.meta("fit_residual_norm", format!("{:e}", fit.residual_norm));
}

/// Parameter varied by `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Separation,
    Phi,
    Theta,
    Eta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Separation => "separation",
            SweepParam::Phi => "phi",
            SweepParam::Theta => "theta",
            SweepParam::Eta => "eta",
        }
    }

    fn apply(self, params: &ScatterParams, value: f64) -> ScatterParams {
        let mut p = *params;
        match self {
            SweepParam::Separation => p.trap.separation = value,
            SweepParam::Phi => p.state.phi = value,
            SweepParam::Theta => p.state.theta = value,
            SweepParam::Eta => p.laser.eta = value,
        }
        p
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "separation" => Ok(SweepParam::Separation),
            "phi" => Ok(SweepParam::Phi),
            "theta" => Ok(SweepParam::Theta),
            "eta" => Ok(SweepParam::Eta),
            _ => Err(format!("unknown sweep parameter '{s}' (separation, phi, theta, eta)")),
        }
    }
}

/// Scalar observable recorded by `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Visibility of the ω-integrated Rayleigh profile over Δk·d.
    BroadbandVisibility,
    /// Fitted V of the Raman pattern on the configured Φ grid.
    RamanVisibility,
    /// Fitted φ̂ of the Raman pattern on the configured Φ grid.
    RamanPhase,
    /// Largest ω-integrated elastic intensity over the Φ grid.
    ElasticPeak,
    StokesPeak,
    AntiStokesPeak,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::BroadbandVisibility => "broadband_visibility",
            Observable::RamanVisibility => "raman_visibility",
            Observable::RamanPhase => "raman_phase",
            Observable::ElasticPeak => "elastic_peak",
            Observable::StokesPeak => "stokes_peak",
            Observable::AntiStokesPeak => "antistokes_peak",
        }
    }
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "broadband_visibility" => Observable::BroadbandVisibility,
            "raman_visibility" => Observable::RamanVisibility,
            "raman_phase" => Observable::RamanPhase,
            "elastic_peak" => Observable::ElasticPeak,
            "stokes_peak" => Observable::StokesPeak,
            "antistokes_peak" => Observable::AntiStokesPeak,
            _ => {
                return Err(format!(
                    "unknown observable '{s}' (broadband_visibility, raman_visibility, raman_phase, \
                     elastic_peak, stokes_peak, antistokes_peak)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Include `to` as the last point; otherwise the range is half-open.
    pub inclusive: bool,
    pub observables: Vec<Observable>,
}

impl SweepSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::Config("sweep bounds must be finite".into()));
        }
        if self.steps == 0 || self.from == self.to {
            return Err(Error::Config(format!(
                "empty sweep range: {} from {} to {} in {} steps",
                self.param.name(),
                self.from,
                self.to,
                self.steps
            )));
        }
        if self.observables.is_empty() {
            return Err(Error::Config("no observables requested".into()));
        }
        let denom = if self.inclusive { self.steps.saturating_sub(1).max(1) } else { self.steps } as f64;
        let h = (self.to - self.from) / denom;
        Ok((0..self.steps).map(|i| self.from + i as f64 * h).collect())
    }
}

fn raman_params(params: &ScatterParams) -> ScatterParams {
    let mut p = *params;
    if p.channel == ScatterChannel::Rayleigh {
        p.channel = ScatterChannel::Raman { offset: 0.0 };
    }
    p
}

fn line_peak(params: &ScatterParams, phis: &[f64], line: RayleighLine) -> Result<f64> {
    let profile = rayleigh_line_profile(params, phis, line)?;
    Ok(profile.rows.iter().map(|r| r.intensity).fold(0.0, f64::max))
}

pub fn sweep(cfg: &RunConfig, spec: &SweepSpec) -> Result<String> {
    let points = spec.points()?;
    let phis = cfg.grids.phis();
    let mut rows = Vec::with_capacity(points.len());
    for &value in &points {
        let params = spec.param.apply(&cfg.params, value);
        params.validate()?;
        let mut fit: Option<FringeFit> = None;
        let mut row = vec![value];
        for obs in &spec.observables {
            let v = match obs {
                Observable::BroadbandVisibility => broadband_visibility(&params.state, params.trap.separation)?,
                Observable::RamanVisibility | Observable::RamanPhase => {
                    let f = match fit {
                        Some(f) => f,
                        None => {
                            let f = fit_fringe(&raman_pattern(&raman_params(&params), &phis)?.fringe_samples())?;
                            fit = Some(f);
                            f
                        }
                    };
                    if *obs == Observable::RamanVisibility {
                        f.visibility
                    } else {
                        f.phase
                    }
                }
                Observable::ElasticPeak => line_peak(&params, &phis, RayleighLine::Elastic)?,
                Observable::StokesPeak => line_peak(&params, &phis, RayleighLine::Stokes)?,
                Observable::AntiStokesPeak => line_peak(&params, &phis, RayleighLine::AntiStokes)?,
            };
            row.push(v);
        }
        rows.push(row);
    }
    let mut csv = header("sweep", cfg);
    csv.meta("sweep_param", format!("\"{}\"", spec.param.name()))
        .meta("sweep_from", format!("{:e}", spec.from))
        .meta("sweep_to", format!("{:e}", spec.to))
        .meta("sweep_steps", spec.steps)
        .meta("sweep_inclusive", spec.inclusive);
    let mut names = vec![spec.param.name()];
    names.extend(spec.observables.iter().map(|o| o.name()));
    csv.columns(&names);
    for r in &rows {
        csv.row(r);
    }
    Ok(csv.into_string())
}
