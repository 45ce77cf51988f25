//! Closed-form scattered intensities.
//!
//! Rayleigh channel: the atom returns to |g⟩ and ends in one of the doublet
//! states S (energy 0) or A (energy δν). A photon scattered from initial
//! component X into final state F appears at ω_L − (E_F − E_X) with weight
//! |c_X|²·|⟨F|e^{iΔk·x}|X⟩|². Components of different initial energy land on
//! different lines, so with the doublet resolved they add incoherently:
//!
//! * elastic (ω_L): |c_S|²|m_SS|² + |c_A|²|m_AA|²
//! * Stokes (ω_L − δν): |c_S|²|m_AS|²
//! * anti-Stokes (ω_L + δν): |c_A|²|m_SA|²
//!
//! For the symmetric state this is (cos(Δk·d/2)+ε)²/(1+ε)² and
//! sin²(Δk·d/2)/(1−ε²), each times e^{−|Δk|²}.
//!
//! Raman channel: the atom leaves in the free state |g′⟩ at momentum ħΔk.
//! The weight is the normalized momentum density
//! |⟨p = 0|e^{iΔk·x}|ψ⟩|² = |ψ̃(−Δk)|²
//! = N²(2/π)^{3/2} e^{−2|Δk|²} [1 + sin2θ cos(Δk·d + φ)],
//! on the line where ω_L − ω_k + δω_{g′} + |Δk|² = 0.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{recoil_shift, MomentumTransfer};
use crate::lineshape::{diffraction, resolution_report, ResolutionInputs, ResolutionReport};
use crate::params::{ScatterChannel, ScatterParams};
use crate::wavepacket::{doublet_decompose, normalization, AtomState, DoubletCoefficients, DoubletMatrix, PacketOverlap};

const S: usize = 0;
const A: usize = 1;

/// Spectral line of the Rayleigh triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RayleighLine {
    Elastic,
    Stokes,
    AntiStokes,
}

impl RayleighLine {
    pub const ALL: [RayleighLine; 3] = [RayleighLine::Elastic, RayleighLine::Stokes, RayleighLine::AntiStokes];

    /// Line centre relative to ω_L, in units of ν.
    pub fn center(self, splitting: f64) -> f64 {
        match self {
            RayleighLine::Elastic => 0.0,
            RayleighLine::Stokes => -splitting,
            RayleighLine::AntiStokes => splitting,
        }
    }
}

/// Per-line weights with the Gaussian envelope held separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighComponents {
    pub elastic: f64,
    pub stokes: f64,
    pub antistokes: f64,
    /// e^{−|Δk|²a₀²}.
    pub envelope: f64,
}

impl RayleighComponents {
    pub fn coefficient(&self, line: RayleighLine) -> f64 {
        match line {
            RayleighLine::Elastic => self.elastic,
            RayleighLine::Stokes => self.stokes,
            RayleighLine::AntiStokes => self.antistokes,
        }
    }

    /// Coefficient times envelope.
    pub fn weight(&self, line: RayleighLine) -> f64 {
        self.coefficient(line) * self.envelope
    }

    /// Sum of all three coefficients, the ω-integrated signal before the envelope.
    pub fn broadband(&self) -> f64 {
        self.elastic + self.stokes + self.antistokes
    }
}

/// Rayleigh weights for arbitrary doublet amplitudes.
pub fn rayleigh_from_coefficients(coeffs: &DoubletCoefficients, matrix: &DoubletMatrix) -> RayleighComponents {
    let ws = coeffs.symmetric_weight();
    let wa = coeffs.antisymmetric_weight();
    let m = &matrix.reduced;
    RayleighComponents {
        elastic: ws * m[S][S].norm_sqr() + wa * m[A][A].norm_sqr(),
        stokes: ws * m[A][S].norm_sqr(),
        antistokes: wa * m[S][A].norm_sqr(),
        envelope: matrix.envelope * matrix.envelope,
    }
}

pub fn rayleigh_components(state: &AtomState, dk: &MomentumTransfer, overlap: &PacketOverlap) -> Result<RayleighComponents> {
    let eps = overlap.value;
    if overlap.is_degenerate() {
        return Err(Error::DegenerateOverlap { epsilon: eps });
    }
    let coeffs = doublet_decompose(state, eps)?;
    let matrix = DoubletMatrix::from_phase(dk.dot_separation, dk.magnitude, eps)?;
    Ok(rayleigh_from_coefficients(&coeffs, &matrix))
}

/// Overall rate scale γ·𝒟·Ω²/Δ² of the far-detuned model.
pub fn rate_prefactor(gamma: f64, rabi: f64, detuning: f64, dipole_pattern: f64) -> Result<f64> {
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(Error::ZeroDetuning);
    }
    Ok(gamma * dipole_pattern * rabi * rabi / (detuning * detuning))
}

fn params_prefactor(params: &ScatterParams) -> Result<f64> {
    rate_prefactor(
        params.emission.gamma,
        params.laser.rabi,
        params.laser.detuning,
        params.emission.dipole_pattern,
    )
}

/// One (Φ, ω) sample of the Rayleigh spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub total: f64,
    pub elastic: f64,
    pub stokes: f64,
    pub antistokes: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngularSpectrum {
    pub phis: Vec<f64>,
    /// Offsets (ω_k − ω_L)/ν.
    pub omegas: Vec<f64>,
    /// Row-major: `samples[i * omegas.len() + j]` is (phis[i], omegas[j]).
    pub samples: Vec<SpectrumSample>,
    pub params_hash: String,
    pub resolution: ResolutionReport,
}

impl AngularSpectrum {
    pub fn get(&self, phi_index: usize, omega_index: usize) -> &SpectrumSample {
        &self.samples[phi_index * self.omegas.len() + omega_index]
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("{name} grid has non-finite values")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("{name} grid is not strictly increasing")));
    }
    Ok(())
}

fn transfers(params: &ScatterParams, phis: &[f64]) -> Result<Vec<MomentumTransfer>> {
    phis.iter()
        .map(|&phi| MomentumTransfer::at_angle(&params.geometry, params.laser.eta, params.trap.separation, phi))
        .collect()
}

/// Resolution report using the largest momentum transfer on the grid for the recoil criterion.
pub fn params_resolution(params: &ScatterParams, transfers: &[MomentumTransfer]) -> ResolutionReport {
    let recoil = transfers.iter().map(recoil_shift).fold(0.0, f64::max);
    resolution_report(&ResolutionInputs {
        splitting: params.trap.splitting,
        duration: params.laser.duration,
        linewidth: params.laser.linewidth,
        recoil,
        separation: params.trap.separation,
        speed_of_light: params.speed_of_light(),
    })
}

pub fn rayleigh_spectrum(params: &ScatterParams, phis: &[f64], omegas: &[f64]) -> Result<AngularSpectrum> {
    params.validate()?;
    check_grid("Φ", phis)?;
    check_grid("ω", omegas)?;
    let prefactor = params_prefactor(params)?;
    let overlap = params.overlap()?;
    let dks = transfers(params, phis)?;
    let split = params.trap.splitting;
    let duration = params.laser.duration;

    let rows: Vec<Vec<SpectrumSample>> = dks
        .par_iter()
        .map(|dk| {
            let c = rayleigh_components(&params.state, dk, &overlap)?;
            let [we, ws, wa] = RayleighLine::ALL.map(|l| prefactor * c.weight(l));
            Ok(omegas
                .iter()
                .map(|&w| {
                    let elastic = we * diffraction(w - RayleighLine::Elastic.center(split), duration);
                    let stokes = ws * diffraction(w - RayleighLine::Stokes.center(split), duration);
                    let antistokes = wa * diffraction(w - RayleighLine::AntiStokes.center(split), duration);
                    SpectrumSample {
                        total: elastic + stokes + antistokes,
                        elastic,
                        stokes,
                        antistokes,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(AngularSpectrum {
        phis: phis.to_vec(),
        omegas: omegas.to_vec(),
        samples: rows.into_iter().flatten().collect(),
        params_hash: params.fingerprint(),
        resolution: params_resolution(params, &dks),
    })
}

/// One angle of an angular intensity profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub phi: f64,
    /// Δk·d.
    pub dk_dot_d: f64,
    /// |Δk|·a₀.
    pub dk_magnitude: f64,
    /// Gaussian envelope of this channel at |Δk|.
    pub envelope: f64,
    /// Intensity with the envelope divided out.
    pub envelope_normalized: f64,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngularProfile {
    pub rows: Vec<ProfileRow>,
    pub params_hash: String,
    pub resolution: ResolutionReport,
}

impl AngularProfile {
    pub fn normalized(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.envelope_normalized).collect()
    }
}

fn build_profile<F>(params: &ScatterParams, phis: &[f64], eval: F) -> Result<AngularProfile>
where
    F: Fn(&MomentumTransfer) -> Result<(f64, f64)> + Sync,
{
    params.validate()?;
    check_grid("Φ", phis)?;
    let dks = transfers(params, phis)?;
    let rows = phis
        .par_iter()
        .zip(dks.par_iter())
        .map(|(&phi, dk)| {
            let (envelope, normalized) = eval(dk)?;
            Ok(ProfileRow {
                phi,
                dk_dot_d: dk.dot_separation,
                dk_magnitude: dk.magnitude,
                envelope,
                envelope_normalized: normalized,
                intensity: normalized * envelope,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AngularProfile {
        rows,
        params_hash: params.fingerprint(),
        resolution: params_resolution(params, &dks),
    })
}

/// Spectrally integrated Rayleigh intensity: the sum of line weights.
///
/// At ε = 1 (D → 0) there is a single packet and only the elastic line, with
/// coefficient 1.
pub fn broadband_intensity(params: &ScatterParams, phis: &[f64]) -> Result<AngularProfile> {
    let prefactor = params_prefactor(params)?;
    let overlap = params.overlap()?;
    if overlap.is_degenerate() {
        doublet_decompose(&params.state, overlap.value)?;
        return build_profile(params, phis, |dk| {
            Ok(((-dk.magnitude * dk.magnitude).exp(), prefactor))
        });
    }
    build_profile(params, phis, |dk| {
        let c = rayleigh_components(&params.state, dk, &overlap)?;
        Ok((c.envelope, prefactor * c.broadband()))
    })
}

/// Spectrally integrated intensity of a single Rayleigh line.
pub fn rayleigh_line_profile(params: &ScatterParams, phis: &[f64], line: RayleighLine) -> Result<AngularProfile> {
    let prefactor = params_prefactor(params)?;
    let overlap = params.overlap()?;
    build_profile(params, phis, |dk| {
        let c = rayleigh_components(&params.state, dk, &overlap)?;
        Ok((c.envelope, prefactor * c.coefficient(line)))
    })
}

/// Raman weight at one momentum transfer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanIntensity {
    /// N².
    pub normalization_sq: f64,
    /// 1 + sin2θ·cos(Δk·d + φ), in [0, 2].
    pub bracket: f64,
    /// e^{−2|Δk|²a₀²}.
    pub envelope: f64,
    /// (ω_k − ω_L)/ν at which the line peaks: δω_{g′} + |Δk|²a₀².
    pub line_center: f64,
}

impl RamanIntensity {
    /// (2/π)^{3/2}·N²·bracket, the momentum density with the envelope divided out.
    pub fn reduced_density(&self) -> f64 {
        (2.0 / PI).powf(1.5) * self.normalization_sq * self.bracket
    }

    /// |ψ̃(−Δk)|², normalized over Δk.
    pub fn density(&self) -> f64 {
        self.reduced_density() * self.envelope
    }

    /// Density spread over emission frequency by the finite observation time.
    pub fn spectral_density(&self, omega: f64, duration: f64) -> f64 {
        self.density() * diffraction(omega - self.line_center, duration)
    }
}

pub fn raman_bracket(state: &AtomState, dk_dot_d: f64) -> f64 {
    1.0 + (2.0 * state.theta).sin() * (dk_dot_d + state.phi).cos()
}

pub fn raman_intensity(state: &AtomState, dk: &MomentumTransfer, epsilon: f64, offset: f64) -> Result<RamanIntensity> {
    let n = normalization(state.theta, state.phi, epsilon)?;
    Ok(RamanIntensity {
        normalization_sq: n * n,
        bracket: raman_bracket(state, dk.dot_separation),
        envelope: (-2.0 * dk.magnitude * dk.magnitude).exp(),
        line_center: offset + recoil_shift(dk),
    })
}

/// Raman signal across Φ, each angle evaluated at its own line centre.
pub fn raman_pattern(params: &ScatterParams, phis: &[f64]) -> Result<AngularProfile> {
    let offset = match params.channel {
        ScatterChannel::Raman { offset } => offset,
        ScatterChannel::Rayleigh => 0.0,
    };
    let prefactor = params_prefactor(params)?;
    let eps = params.overlap()?.value;
    let peak = params.laser.duration / (2.0 * PI);
    build_profile(params, phis, |dk| {
        let r = raman_intensity(&params.state, dk, eps, offset)?;
        Ok((r.envelope, prefactor * peak * r.reduced_density()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::params;
    use crate::wavepacket::overlap_epsilon;
    use std::f64::consts::{FRAC_PI_4, TAU};

    fn transfer(dot: f64, magnitude: f64) -> MomentumTransfer {
        MomentumTransfer {
            vector: crate::geometry::Vec3::x() * magnitude,
            magnitude,
            dot_separation: dot,
        }
    }

    fn overlap(eps: f64) -> PacketOverlap {
        PacketOverlap { value: eps, underflowed: false }
    }

    #[test]
    fn symmetric_examples() {
        let sym = AtomState::symmetric();
        let c = rayleigh_components(&sym, &transfer(0.0, 0.0), &overlap(0.4)).unwrap();
        assert!((c.elastic - 1.0).abs() < 1e-15);
        assert_eq!(c.stokes, 0.0);

        for &x in &[0.3, 1.0, 2.5] {
            let c = rayleigh_components(&sym, &transfer(x, 0.7), &overlap(0.0)).unwrap();
            assert!((c.elastic - (x / 2.0).cos().powi(2)).abs() < 1e-15);
            assert!((c.stokes - (x / 2.0).sin().powi(2)).abs() < 1e-15);
            assert!((c.broadband() - 1.0).abs() < 1e-15);
        }

        let eps = overlap_epsilon(2.0).unwrap();
        let c = rayleigh_components(&sym, &transfer(PI, 0.0), &eps).unwrap();
        assert!((c.elastic - 0.142_536_956_596_550_97).abs() < 1e-15);
        assert!((c.stokes - 1.581_976_706_869_326_5).abs() < 1e-15);
        assert!(c.antistokes < 1e-30);
    }

    #[test]
    fn antisymmetric_state_populates_antistokes() {
        let eps = overlap(0.3);
        for &x in &[0.0, 0.4, 2.0, 5.0] {
            let a = rayleigh_components(&AtomState::antisymmetric(), &transfer(x, 0.2), &eps).unwrap();
            let s = rayleigh_components(&AtomState::symmetric(), &transfer(x, 0.2), &eps).unwrap();
            assert!(a.stokes < 1e-30);
            assert!((a.antistokes - s.stokes).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_overlap_is_an_error() {
        let err = rayleigh_components(&AtomState::symmetric(), &transfer(0.1, 0.1), &overlap(1.0));
        assert!(matches!(err, Err(Error::DegenerateOverlap { .. })));
    }

    #[test]
    fn prefactor_scaling() {
        let base = rate_prefactor(1.0, 2.0, 10.0, 1.0).unwrap();
        assert!((rate_prefactor(1.0, 4.0, 10.0, 1.0).unwrap() - 4.0 * base).abs() < 1e-15);
        assert!((rate_prefactor(1.0, 2.0, 20.0, 1.0).unwrap() - base / 4.0).abs() < 1e-15);
        assert_eq!(rate_prefactor(1.0, 1.0, 0.0, 1.0), Err(Error::ZeroDetuning));
    }

    #[test]
    fn raman_examples() {
        let sym = AtomState::symmetric();
        let r = raman_intensity(&sym, &transfer(0.0, 0.0), 0.0, 0.0).unwrap();
        assert!((r.bracket - 2.0).abs() < 1e-15);
        let single = AtomState::new(0.0, 0.3).unwrap();
        for &x in &[0.0, 1.0, 4.0] {
            assert!((raman_intensity(&single, &transfer(x, 1.0), 0.2, 0.0).unwrap().bracket - 1.0).abs() < 1e-15);
        }
        // φ = π shifts the pattern by half a period
        let flipped = AtomState::new(FRAC_PI_4, PI).unwrap();
        for &x in &[0.1, 1.3, 2.9] {
            let a = raman_bracket(&sym, x);
            let b = raman_bracket(&flipped, x + PI);
            assert!((a - b).abs() < 1e-14);
        }
        // envelope 1/e point at |Δk| = 1/√2
        let r = raman_intensity(&sym, &transfer(0.0, 1.0 / 2f64.sqrt()), 0.0, 0.5).unwrap();
        assert!((r.envelope - (-1.0f64).exp()).abs() < 1e-15);
        assert!((r.line_center - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_is_resolved_triplet() {
        let p = params(2.0, AtomState::symmetric());
        let phis: Vec<f64> = (0..16).map(|i| TAU * i as f64 / 16.0).collect();
        let omegas: Vec<f64> = (0..201).map(|i| -0.1 + 0.15 * i as f64 / 200.0).collect();
        let s = rayleigh_spectrum(&p, &phis, &omegas).unwrap();
        assert!(s.resolution.doublet_resolved());
        for sample in &s.samples {
            assert!(sample.antistokes < 1e-30);
            assert!((sample.total - (sample.elastic + sample.stokes + sample.antistokes)).abs() <= 1e-12 * sample.total);
        }
        assert!(rayleigh_spectrum(&p, &[], &omegas).is_err());
        assert!(rayleigh_spectrum(&p, &[1.0, 0.5], &omegas).is_err());
    }

    #[test]
    fn broadband_degenerate_single_packet() {
        let p = params(0.0, AtomState::symmetric());
        let phis: Vec<f64> = (0..32).map(|i| TAU * i as f64 / 32.0).collect();
        let prof = broadband_intensity(&p, &phis).unwrap();
        let first = prof.rows[0].envelope_normalized;
        assert!(prof.rows.iter().all(|r| r.envelope_normalized == first));
    }
}
