//! Observables extracted from angular profiles: visibility, fringe phase,
//! fringe period and Gaussian envelope width.
//!
//! Fits work on the envelope-divided signal y(x) at fringe coordinate
//! x = Δk·d. The fringe model A·(1 + V·cos(κx + φ̂)) is linear in
//! (A, A·V·cosφ̂, −A·V·sinφ̂) for fixed κ, so only κ is searched nonlinearly.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scattering::{rayleigh_from_coefficients, AngularProfile, ProfileRow};
use crate::wavepacket::{doublet_decompose, overlap_epsilon, AtomState, DoubletMatrix, DEGENERATE_OVERLAP};

/// Fewest samples per fringe period accepted by [`fit_fringe`].
pub const MIN_SAMPLES_PER_PERIOD: f64 = 8.0;

const RANK_TOLERANCE: f64 = 1e-9;
const VISIBILITY_SLACK: f64 = 1e-6;

/// Envelope-normalized visibility (max − min)/(max + min).
pub fn visibility(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("visibility of an empty signal".into()));
    }
    if let Some(bad) = samples.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Domain(format!("signal values must be finite and non-negative, got {bad}")));
    }
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((max - min) / (max + min))
}

/// One angular sample prepared for fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeSample {
    /// Fringe coordinate Δk·d.
    pub x: f64,
    /// |Δk|·a₀.
    pub dk_magnitude: f64,
    /// Measured (or simulated) intensity, envelope included.
    pub intensity: f64,
    /// Analytic envelope at this |Δk|.
    pub envelope: f64,
}

impl From<&ProfileRow> for FringeSample {
    fn from(row: &ProfileRow) -> Self {
        Self {
            x: row.dk_dot_d,
            dk_magnitude: row.dk_magnitude,
            intensity: row.intensity,
            envelope: row.envelope,
        }
    }
}

impl AngularProfile {
    pub fn fringe_samples(&self) -> Vec<FringeSample> {
        self.rows.iter().map(FringeSample::from).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    /// A, the mean envelope-normalized level.
    pub offset: f64,
    /// V ∈ [0, 1].
    pub visibility: f64,
    /// φ̂ ∈ [0, 2π).
    pub phase: f64,
    /// Best-fitting fringe period in Δk·d.
    pub period: f64,
    /// Gaussian 1/e width in |Δk|a₀, when the samples span enough |Δk|.
    pub envelope_width: Option<f64>,
    /// ‖y − model‖₂ of the envelope-divided signal at period 2π.
    pub residual_norm: f64,
}

struct LinearFit {
    coeffs: [f64; 3],
    residual: f64,
}

/// Least squares y ≈ a + b·cos(κx) + c·sin(κx).
fn linear_fringe(xs: &[f64], ys: &[f64], kappa: f64) -> Result<LinearFit> {
    let n = xs.len();
    let design = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => (kappa * xs[i]).cos(),
        _ => (kappa * xs[i]).sin(),
    });
    let rhs = DVector::from_column_slice(ys);
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin / smax < RANK_TOLERANCE {
        return Err(Error::InsufficientSpan);
    }
    let sol = svd
        .solve(&rhs, smax * RANK_TOLERANCE)
        .map_err(|e| Error::Domain(format!("least-squares solve failed: {e}")))?;
    let residual = (design * &sol - rhs).norm();
    Ok(LinearFit { coeffs: [sol[0], sol[1], sol[2]], residual })
}

/// κ minimizing the linear-fit residual, searched over [0.25, 4] then refined.
fn best_wavenumber(xs: &[f64], ys: &[f64]) -> f64 {
    let cost = |k: f64| linear_fringe(xs, ys, k).map_or(f64::INFINITY, |f| f.residual);
    let grid: Vec<f64> = (0..=375).map(|i| 0.25 + 0.01 * i as f64).collect();
    let costs: Vec<f64> = grid.iter().map(|&k| cost(k)).collect();
    let best = costs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    // golden-section refinement on the bracketing cells
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fa, mut fb) = (cost(a), cost(b));
    for _ in 0..80 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = cost(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = cost(b);
        }
    }
    0.5 * (lo + hi)
}

/// Fits A·(1 + V·cos(Δk·d + φ̂)) to the envelope-divided signal.
///
/// The period is reported from a separate scan over κ in cos(κ·Δk·d); V and
/// φ̂ come from the fit at the physical period 2π. V is read off the fitted
/// model rather than the raw sample extrema, so coarse sampling does not bias it.
pub fn fit_fringe(samples: &[FringeSample]) -> Result<FringeFit> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSpan);
    }
    if samples.iter().any(|s| !(s.envelope > 0.0) || !s.intensity.is_finite() || !s.x.is_finite()) {
        return Err(Error::Domain("fringe samples need finite intensities and positive envelopes".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.x).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.intensity / s.envelope).collect();
    let span = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xs.iter().copied().fold(f64::INFINITY, f64::min);
    if !(span > 0.0) {
        return Err(Error::InsufficientSpan);
    }
    let per_period = samples.len() as f64 * TAU / span;
    if per_period < MIN_SAMPLES_PER_PERIOD {
        return Err(Error::InsufficientSampling(per_period));
    }

    let fit = linear_fringe(&xs, &ys, 1.0)?;
    let [a, b, c] = fit.coeffs;
    if !(a > 0.0) {
        return Err(Error::ModelViolation(format!("fitted mean level {a:e} is not positive")));
    }
    let v = b.hypot(c) / a;
    if v > 1.0 + VISIBILITY_SLACK {
        return Err(Error::ModelViolation(format!("fitted visibility {v} exceeds 1")));
    }
    let phase = (-c).atan2(b).rem_euclid(TAU);
    let period = TAU / best_wavenumber(&xs, &ys);
    let envelope_width = fit_envelope_width(samples, |x| a + b * x.cos() + c * x.sin());
    Ok(FringeFit {
        offset: a,
        visibility: v.min(1.0),
        phase,
        period,
        envelope_width,
        residual_norm: fit.residual,
    })
}

/// Gaussian 1/e width w of the envelope, from ln(I/fringe) = c₀ − |Δk|²/w².
///
/// Samples where the fringe model falls below 1e-3 of its peak are skipped.
/// `None` if fewer than three samples or no spread in |Δk| remain.
pub fn fit_envelope_width<F: Fn(f64) -> f64>(samples: &[FringeSample], fringe: F) -> Option<f64> {
    let model: Vec<f64> = samples.iter().map(|s| fringe(s.x)).collect();
    let peak = model.iter().copied().fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .zip(&model)
        .filter(|(s, &m)| m > 1e-3 * peak && s.intensity > 0.0)
        .map(|(s, &m)| (s.dk_magnitude * s.dk_magnitude, (s.intensity / m).ln()))
        .collect();
    let m2_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let m2_max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if pts.len() < 3 || !(m2_max - m2_min > 1e-6) {
        return None;
    }
    let design = DMatrix::from_fn(pts.len(), 2, |i, j| if j == 0 { 1.0 } else { pts[i].0 });
    let rhs = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let sol = design.svd(true, true).solve(&rhs, 1e-12).ok()?;
    let slope = sol[1];
    (slope < 0.0).then(|| (-slope).recip().sqrt())
}

/// One row of a broadband visibility sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityPoint {
    pub separation: f64,
    pub epsilon: f64,
    pub visibility: f64,
}

const SWEEP_POINTS: usize = 16_384;

/// Broadband visibility for an arbitrary state at well separation D.
///
/// The envelope-free broadband coefficient is sampled densely over Δk·d in
/// [0, 4π), which holds whole periods of every component. A single packet
/// (ε at the degenerate limit) has a flat profile and V = 0.
pub fn broadband_visibility(state: &AtomState, separation: f64) -> Result<f64> {
    let epsilon = overlap_epsilon(separation)?.value;
    if epsilon >= DEGENERATE_OVERLAP {
        doublet_decompose(state, epsilon)?;
        return Ok(0.0);
    }
    let coeffs = doublet_decompose(state, epsilon)?;
    let signal = (0..SWEEP_POINTS)
        .map(|i| {
            let x = 2.0 * TAU * i as f64 / SWEEP_POINTS as f64;
            let m = DoubletMatrix::from_phase(x, 0.0, epsilon)?;
            Ok(rayleigh_from_coefficients(&coeffs, &m).broadband())
        })
        .collect::<Result<Vec<f64>>>()?;
    visibility(&signal)
}

/// Broadband visibility of the symmetric state versus well separation.
pub fn visibility_vs_epsilon(separations: &[f64]) -> Result<Vec<VisibilityPoint>> {
    let state = AtomState::symmetric();
    separations
        .par_iter()
        .map(|&separation| {
            Ok(VisibilityPoint {
                separation,
                epsilon: overlap_epsilon(separation)?.value,
                visibility: broadband_visibility(&state, separation)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::params;
    use crate::params::ScatterChannel;
    use crate::scattering::{broadband_intensity, raman_pattern, rayleigh_line_profile, RayleighLine};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, PI};

    fn phi_grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| TAU * i as f64 / n as f64).collect()
    }

    #[test]
    fn visibility_examples() {
        assert_eq!(visibility(&[2.0; 10]).unwrap(), 0.0);
        let full: Vec<f64> = phi_grid(64).iter().map(|x| 1.0 + x.cos()).collect();
        assert!((visibility(&full).unwrap() - 1.0).abs() < 1e-15);
        let half: Vec<f64> = phi_grid(64).iter().map(|x| 1.0 + 0.5 * x.cos()).collect();
        assert!((visibility(&half).unwrap() - 0.5).abs() < 1e-15);
        let scaled: Vec<f64> = half.iter().map(|v| 37.0 * v).collect();
        assert!((visibility(&scaled).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(visibility(&[0.0; 4]), Err(Error::UndefinedVisibility));
        assert!(visibility(&[1.0, -1.0]).is_err());
    }

    fn raman_params(separation: f64, theta: f64, phi: f64) -> crate::params::ScatterParams {
        let mut p = params(separation, AtomState::new(theta, phi).unwrap());
        p.channel = ScatterChannel::Raman { offset: 0.0 };
        p.laser.eta = 2.0;
        p
    }

    #[test]
    fn raman_phase_and_visibility() {
        let p = raman_params(3.0, FRAC_PI_4, 1.0);
        let prof = raman_pattern(&p, &phi_grid(720)).unwrap();
        let fit = fit_fringe(&prof.fringe_samples()).unwrap();
        assert!((fit.phase - 1.0).abs() < 1e-3, "{}", fit.phase);
        assert!((fit.visibility - 1.0).abs() < 1e-6);

        let p = raman_params(3.0, FRAC_PI_8, 0.4);
        let prof = raman_pattern(&p, &phi_grid(720)).unwrap();
        let fit = fit_fringe(&prof.fringe_samples()).unwrap();
        assert!((fit.visibility - FRAC_PI_4.sin()).abs() < 1e-6, "{}", fit.visibility);
        assert!((fit.phase - 0.4).abs() < 1e-3);
        assert!(fit.residual_norm < 1e-9 * fit.offset);
        assert!((fit.period - TAU).abs() < 1e-3 * TAU);
    }

    #[test]
    fn raman_envelope_width() {
        let p = raman_params(3.0, FRAC_PI_8, 0.4);
        let prof = raman_pattern(&p, &phi_grid(720)).unwrap();
        let w = fit_fringe(&prof.fringe_samples()).unwrap().envelope_width.unwrap();
        assert!((w - FRAC_1_SQRT_2).abs() < 1e-6 * FRAC_1_SQRT_2, "{w}");
    }

    #[test]
    fn rayleigh_envelope_width() {
        // far-apart wells: broadband profile is flat × e^{−|Δk|²}
        let mut p = params(60.0, AtomState::symmetric());
        p.laser.eta = 0.05;
        let prof = broadband_intensity(&p, &phi_grid(720)).unwrap();
        let fit = fit_fringe(&prof.fringe_samples()).unwrap();
        assert!(fit.visibility < 1e-9);
        assert!((fit.envelope_width.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn stokes_period() {
        let mut p = params(2.0, AtomState::symmetric());
        p.laser.eta = 2.0;
        let prof = rayleigh_line_profile(&p, &phi_grid(720), RayleighLine::Stokes).unwrap();
        let fit = fit_fringe(&prof.fringe_samples()).unwrap();
        assert!((fit.period - TAU).abs() < 1e-3 * TAU, "{}", fit.period);
        // sin²(x/2) = (1 − cos x)/2: full contrast, phase π
        assert!((fit.visibility - 1.0).abs() < 1e-6);
        assert!((fit.phase - PI).abs() < 1e-6);
    }

    #[test]
    fn fit_errors() {
        let narrow: Vec<FringeSample> = (0..50)
            .map(|i| FringeSample { x: 1.0, dk_magnitude: 0.1 * i as f64, intensity: 1.0, envelope: 1.0 })
            .collect();
        assert_eq!(fit_fringe(&narrow), Err(Error::InsufficientSpan));
        let sparse: Vec<FringeSample> = (0..5)
            .map(|i| FringeSample { x: 3.0 * i as f64, dk_magnitude: 0.0, intensity: 1.0, envelope: 1.0 })
            .collect();
        assert!(matches!(fit_fringe(&sparse), Err(Error::InsufficientSampling(_))));
        let wild: Vec<FringeSample> = phi_grid(64)
            .iter()
            .map(|&x| FringeSample { x, dk_magnitude: 0.0, intensity: 1.0 + 3.0 * x.cos(), envelope: 1.0 })
            .collect();
        assert!(matches!(fit_fringe(&wild), Err(Error::ModelViolation(_))));
    }

    #[test]
    fn sweep_is_monotone_with_limits() {
        let mut ds: Vec<f64> = (0..31).map(|i| 8.0 - 7.5 * i as f64 / 30.0).collect();
        ds.push((-8.0 * 0.999f64.ln()).sqrt());
        ds.push(0.0);
        let table = visibility_vs_epsilon(&ds).unwrap();
        assert!(table[0].visibility < 1e-3);
        for w in table[..31].windows(2) {
            assert!(w[1].epsilon > w[0].epsilon);
            assert!(w[1].visibility > w[0].visibility);
        }
        let near = table[31];
        assert!((near.epsilon - 0.999).abs() < 1e-12);
        assert!(near.visibility >= 0.99);
        assert_eq!(table[32].visibility, 0.0);

        // analytic minimum (1−ε)³ at cos p = −1, maximum at cos p = (1−ε)/2
        let e = table[20].epsilon;
        let b = |c: f64| {
            (-2.0 * e * c * c + 2.0 * e * (1.0 - e) * c + e * e - e.powi(3) + 1.0 + e)
                / ((1.0 + e).powi(2) * (1.0 - e))
        };
        let (hi, lo) = (b(0.5 * (1.0 - e)), b(-1.0));
        assert!((lo - (1.0 - e).powi(3) / ((1.0 + e).powi(2) * (1.0 - e))).abs() < 1e-14);
        assert!((table[20].visibility - (hi - lo) / (hi + lo)).abs() < 1e-6);
    }
}
