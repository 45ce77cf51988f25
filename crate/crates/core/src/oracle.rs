//! Brute-force reference values by position-space quadrature.
//!
//! Nothing here reuses the closed forms: packet overlaps, the doublet basis,
//! the state normalization and momentum amplitudes all come from composite
//! Simpson sums over the explicit Gaussian wavefunctions. The 3D integrals
//! factor into one integral along d̂ and two transverse ones.
//!
//! The doublet basis is resolved over {S, A} only, with energies {0, δν}.
//! Ground-state propagators are then diagonal phases, and the excited-state
//! propagator is dropped in the far-detuned limit.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::lineshape::RESOLVED_THRESHOLD;
use crate::scattering::RayleighLine;
use crate::wavepacket::{AtomState, Well};

pub const DEFAULT_STEP: f64 = 0.05;
/// Margin beyond the packet centres for integrands quadratic in ψ.
pub const OVERLAP_MARGIN: f64 = 8.0;
/// Margin for integrands linear in ψ, which decay only as e^{−x²/4}.
pub const AMPLITUDE_MARGIN: f64 = 12.0;
/// Largest number of time steps accepted by [`time_integral_check`].
pub const MAX_TIME_STEPS: usize = 100_000;

const NORM_TOLERANCE: f64 = 1e-10;

fn packet_1d(x: f64) -> f64 {
    (TAU).powf(-0.25) * (-0.25 * x * x).exp()
}

/// Symmetric 1D grid with composite Simpson weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    half_extent: f64,
    separation: f64,
}

impl QuadratureGrid {
    /// Grid over ±(D/2 + margin) with spacing at most `step`.
    pub fn new(separation: f64, margin: f64, step: f64) -> Result<Self> {
        if !(separation >= 0.0 && separation.is_finite()) {
            return Err(Error::Quadrature(format!("invalid separation {separation}")));
        }
        if !(step > 0.0 && margin > 0.0 && step.is_finite() && margin.is_finite()) {
            return Err(Error::Quadrature(format!("invalid grid: margin {margin}, step {step}")));
        }
        let half_extent = 0.5 * separation + margin;
        let mut intervals = (2.0 * half_extent / step).ceil() as usize;
        intervals += intervals % 2;
        let h = 2.0 * half_extent / intervals as f64;
        let nodes: Vec<f64> = (0..=intervals).map(|i| -half_extent + i as f64 * h).collect();
        let weights: Vec<f64> = (0..=intervals)
            .map(|i| {
                let w = if i == 0 || i == intervals {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * h / 3.0
            })
            .collect();
        let grid = Self { nodes, weights, half_extent, separation };
        let norm = grid.integrate(|x| {
            let g = packet_1d(x - 0.5 * separation);
            g * g
        });
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Quadrature(format!(
                "packet norm integrates to {norm:.15} on this grid; refine the step or widen the margin"
            )));
        }
        Ok(grid)
    }

    pub fn for_overlaps(separation: f64) -> Result<Self> {
        Self::new(separation, OVERLAP_MARGIN, DEFAULT_STEP)
    }

    pub fn for_amplitudes(separation: f64) -> Result<Self> {
        Self::new(separation, AMPLITUDE_MARGIN, DEFAULT_STEP)
    }

    /// Same extent, half the step.
    pub fn refined(&self) -> Result<Self> {
        let margin = self.half_extent - 0.5 * self.separation;
        Self::new(self.separation, margin, 0.5 * self.step())
    }

    pub fn step(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    fn check_covers(&self, separation: f64) -> Result<()> {
        if 0.5 * separation + 4.0 > self.half_extent + 1e-12 {
            return Err(Error::Quadrature(format!(
                "grid half-extent {} does not cover packets at ±{}",
                self.half_extent,
                0.5 * separation
            )));
        }
        Ok(())
    }
}

/// Orthonormal frame (d̂, e₁, e₂); d̂ defaults to x̂ when d = 0.
fn frame(separation: &Vec3) -> (f64, Vec3, Vec3, Vec3) {
    let big_d = separation.norm();
    let axis = if big_d > 0.0 { separation / big_d } else { Vec3::x() };
    let helper = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (helper - axis * axis.dot(&helper)).normalize();
    let e2 = axis.cross(&e1);
    (big_d, axis, e1, e2)
}

/// ⟨ψ_bra|e^{iq·x}|ψ_ket⟩ by quadrature.
pub fn quad_displaced_overlap(bra: Well, ket: Well, q: &Vec3, separation: &Vec3, grid: &QuadratureGrid) -> Result<C64> {
    let (big_d, axis, e1, e2) = frame(separation);
    grid.check_covers(big_d)?;
    let (q_par, q1, q2) = (q.dot(&axis), q.dot(&e1), q.dot(&e2));
    let (sb, sk) = (0.5 * bra.sign() * big_d, 0.5 * ket.sign() * big_d);
    let along = grid.integrate_complex(|x| C64::from_polar(packet_1d(x - sb) * packet_1d(x - sk), q_par * x));
    let transverse = |qt: f64| grid.integrate_complex(|y| C64::from_polar(packet_1d(y).powi(2), qt * y));
    Ok(along * transverse(q1) * transverse(q2))
}

/// ∫ e^{−iq·x} ψ_w(x) d³x by quadrature.
fn quad_packet_transform(well: Well, q: &Vec3, separation: &Vec3, grid: &QuadratureGrid) -> Result<C64> {
    let (big_d, axis, e1, e2) = frame(separation);
    grid.check_covers(big_d)?;
    let (q_par, q1, q2) = (q.dot(&axis), q.dot(&e1), q.dot(&e2));
    let centre = 0.5 * well.sign() * big_d;
    let along = grid.integrate_complex(|x| C64::from_polar(packet_1d(x - centre), -q_par * x));
    let transverse = |qt: f64| grid.integrate_complex(|y| C64::from_polar(packet_1d(y), -qt * y));
    Ok(along * transverse(q1) * transverse(q2))
}

/// Gram matrix ⟨ψ_i|ψ_j⟩ over (ψ−, ψ+).
pub fn quad_gram(separation: &Vec3, grid: &QuadratureGrid) -> Result<[[C64; 2]; 2]> {
    let zero = Vec3::zeros();
    let mut g = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, bra) in Well::BOTH.iter().enumerate() {
        for (j, ket) in Well::BOTH.iter().enumerate() {
            g[i][j] = quad_displaced_overlap(*bra, *ket, &zero, separation, grid)?;
        }
    }
    Ok(g)
}

fn inner(gram: &[[C64; 2]; 2], a: &[C64; 2], b: &[C64; 2]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += a[i].conj() * gram[i][j] * b[j];
        }
    }
    acc
}

/// ⟨ψ|ψ⟩^{−1/2} for the unnormalized superposition, by quadrature.
pub fn quad_normalization(state: &AtomState, separation: &Vec3, grid: &QuadratureGrid) -> Result<f64> {
    let gram = quad_gram(separation, grid)?;
    let amps = state.well_amplitudes();
    let norm_sq = inner(&gram, &amps, &amps).re;
    if norm_sq <= 1e-300 {
        return Err(Error::DegenerateState(norm_sq));
    }
    Ok(norm_sq.sqrt().recip())
}

/// Doublet model with every ingredient computed by quadrature.
#[derive(Debug, Clone)]
pub struct EigenbasisModel {
    separation: Vec3,
    splitting: f64,
    grid: QuadratureGrid,
    /// S and A expanded on (ψ−, ψ+).
    basis: [[C64; 2]; 2],
    /// (c_S, c_A).
    coefficients: [C64; 2],
    overlap: f64,
}

impl EigenbasisModel {
    pub fn new(state: &AtomState, separation: &Vec3, splitting: f64, grid: QuadratureGrid) -> Result<Self> {
        let gram = quad_gram(separation, &grid)?;
        let overlap = gram[0][1].re;
        let one = C64::new(1.0, 0.0);

        // Gram–Schmidt on (ψ− + ψ+, ψ+ − ψ−)
        let mut s = [one, one];
        let ns = inner(&gram, &s, &s).re.sqrt();
        s = s.map(|c| c / ns);
        let mut a = [-one, one];
        let proj = inner(&gram, &s, &a);
        a = [a[0] - proj * s[0], a[1] - proj * s[1]];
        let na_sq = inner(&gram, &a, &a).re;
        if na_sq < 1e-12 {
            return Err(Error::DegenerateOverlap { epsilon: overlap });
        }
        let na = na_sq.sqrt();
        a = a.map(|c| c / na);

        let n = quad_normalization(state, separation, &grid)?;
        let psi = state.well_amplitudes().map(|c| c * n);
        let coefficients = [inner(&gram, &s, &psi), inner(&gram, &a, &psi)];
        Ok(Self {
            separation: *separation,
            splitting,
            grid,
            basis: [s, a],
            coefficients,
            overlap,
        })
    }

    pub fn coefficients(&self) -> [C64; 2] {
        self.coefficients
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn splitting(&self) -> f64 {
        self.splitting
    }

    /// Energies of (S, A) in units of ν.
    pub fn energies(&self) -> [f64; 2] {
        [0.0, self.splitting]
    }

    /// m_XY = ⟨X|e^{iq·x}|Y⟩, indexed [X][Y] with 0 = S, 1 = A.
    pub fn matrix(&self, q: &Vec3) -> Result<[[C64; 2]; 2]> {
        let mut wells = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, bra) in Well::BOTH.iter().enumerate() {
            for (j, ket) in Well::BOTH.iter().enumerate() {
                wells[i][j] = quad_displaced_overlap(*bra, *ket, q, &self.separation, &self.grid)?;
            }
        }
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                m[x][y] = inner(&wells, &self.basis[x], &self.basis[y]);
            }
        }
        Ok(m)
    }

    /// Σ_F |⟨F|e^{iq·x}|ψ⟩|², the total weight with coherent initial components.
    pub fn final_state_weights(&self, q: &Vec3) -> Result<f64> {
        let m = self.matrix(q)?;
        Ok((0..2)
            .map(|f| (0..2).map(|x| m[f][x] * self.coefficients[x]).sum::<C64>().norm_sqr())
            .sum())
    }
}

/// One (final, initial) pathway of the doublet spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLine {
    /// 0 = S, 1 = A.
    pub final_state: usize,
    pub initial_state: usize,
    /// (ω_k − ω_L)/ν = E_initial − E_final.
    pub center: f64,
    /// |c_initial|²·|m_final,initial|², envelope included.
    pub weight: f64,
}

impl OracleLine {
    pub fn kind(&self) -> RayleighLine {
        match (self.final_state, self.initial_state) {
            (f, i) if f == i => RayleighLine::Elastic,
            (1, 0) => RayleighLine::Stokes,
            _ => RayleighLine::AntiStokes,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    pub lines: Vec<OracleLine>,
    /// δν·T/2π met the resolution threshold.
    pub doublet_resolved: bool,
}

impl EigenSpectrum {
    /// Weight summed over pathways landing on `line`.
    pub fn weight(&self, line: RayleighLine) -> f64 {
        self.lines.iter().filter(|l| l.kind() == line).map(|l| l.weight).sum()
    }

    pub fn total(&self) -> f64 {
        self.lines.iter().map(|l| l.weight).sum()
    }
}

/// Per-line weights from the quadrature doublet model.
///
/// The time integrals collapse to one δ^(T) per (final, initial) pathway; with
/// the doublet resolved the pathways from different initial energies do not
/// interfere, so each carries |c_X|²|m_FX|².
pub fn spectrum_from_eigenbasis(model: &EigenbasisModel, q: &Vec3, duration: f64) -> Result<EigenSpectrum> {
    let m = model.matrix(q)?;
    let e = model.energies();
    let mut lines = Vec::with_capacity(4);
    for f in 0..2 {
        for x in 0..2 {
            lines.push(OracleLine {
                final_state: f,
                initial_state: x,
                center: e[x] - e[f],
                weight: model.coefficients[x].norm_sqr() * m[f][x].norm_sqr(),
            });
        }
    }
    Ok(EigenSpectrum {
        lines,
        doublet_resolved: model.splitting * duration / TAU >= RESOLVED_THRESHOLD,
    })
}

/// ψ̃(q) = (2π)^{−3/2} ∫ e^{−iq·x} ψ(x) d³x by quadrature.
pub fn quad_momentum_amplitude(state: &AtomState, q: &Vec3, separation: &Vec3, grid: &QuadratureGrid) -> Result<C64> {
    let n = quad_normalization(state, separation, grid)?;
    let [left, right] = state.well_amplitudes();
    let l = quad_packet_transform(Well::Left, q, separation, grid)?;
    let r = quad_packet_transform(Well::Right, q, separation, grid)?;
    Ok((left * l + right * r) * (n * (2.0 * PI).powf(-1.5)))
}

/// |⟨p = 0|e^{iΔk·x}|ψ⟩|² = |ψ̃(−Δk)|², the free-particle Raman weight.
pub fn raman_momentum_oracle(state: &AtomState, dk: &Vec3, separation: &Vec3, grid: &QuadratureGrid) -> Result<f64> {
    Ok(quad_momentum_amplitude(state, &(-dk), separation, grid)?.norm_sqr())
}

/// Time steps adequate for Simpson integration of phases up to `max_rate` over `duration`.
pub fn default_time_steps(duration: f64, max_rate: f64) -> usize {
    let steps = (duration * max_rate.max(1.0 / duration) / 0.05).ceil() as usize;
    (steps.max(64) + 1) & !1
}

/// Spectrum by direct evaluation of the double time integral
///
/// S(ω) = (2πT)⁻¹ ∫₀ᵀdτ ∫₀ᵀdτ̄ e^{iω(τ−τ̄)} W(τ, τ̄),
/// W(τ, τ̄) = Σ_F a_F(τ̄)* a_F(τ), a_F(τ) = ⟨F|e^{iHτ} e^{iq·x} e^{−iHτ}|ψ⟩,
///
/// with ω measured from ω_L. For a resolved doublet this should approach
/// Σ_lines weight·δ^(T)(ω − centre). Cost is O(steps²) per frequency.
pub fn time_integral_check(
    model: &EigenbasisModel,
    q: &Vec3,
    duration: f64,
    omegas: &[f64],
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    if steps > MAX_TIME_STEPS {
        return Err(Error::CostGuard { steps, cap: MAX_TIME_STEPS });
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Domain(format!("observation time must be positive, got {duration}")));
    }
    let steps = (steps.max(2) + 1) & !1;
    let m = model.matrix(q)?;
    let e = model.energies();
    let c = model.coefficients;
    let h = duration / steps as f64;
    let taus: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let weights: Vec<f64> = (0..=steps)
        .map(|i| {
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();
    // a_F(τ) on the time grid
    let amps: Vec<[C64; 2]> = taus
        .iter()
        .map(|&t| {
            let mut a = [C64::new(0.0, 0.0); 2];
            for f in 0..2 {
                for x in 0..2 {
                    a[f] += m[f][x] * c[x] * C64::from_polar(1.0, (e[f] - e[x]) * t);
                }
            }
            a
        })
        .collect();

    Ok(omegas
        .par_iter()
        .map(|&w| {
            let phase: Vec<C64> = taus.iter().map(|&t| C64::from_polar(1.0, w * t)).collect();
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..taus.len() {
                let mut row = C64::new(0.0, 0.0);
                for j in 0..taus.len() {
                    let kernel = amps[j][0].conj() * amps[i][0] + amps[j][1].conj() * amps[i][1];
                    row += kernel * phase[j].conj() * weights[j];
                }
                acc += row * phase[i] * weights[i];
            }
            (w, acc.re / (TAU * duration))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lineshape::diffraction;
    use crate::wavepacket::{displaced_overlap, overlap_epsilon};
    use std::f64::consts::FRAC_PI_4;

    fn d_vec(d: f64) -> Vec3 {
        Vec3::new(1.0, 0.0, 0.0) * d
    }

    #[test]
    fn norm_and_overlap() {
        let d = d_vec(2.0);
        let grid = QuadratureGrid::for_overlaps(2.0).unwrap();
        for w in Well::BOTH {
            let n = quad_displaced_overlap(w, w, &Vec3::zeros(), &d, &grid).unwrap();
            assert!((n - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
        let eps = quad_displaced_overlap(Well::Left, Well::Right, &Vec3::zeros(), &d, &grid).unwrap();
        assert!((eps.re - 0.606_530_659_712_633_4).abs() < 1e-8);
        assert!(eps.im.abs() < 1e-15);
    }

    #[test]
    fn large_kick_magnitude() {
        let d = d_vec(1.5);
        let grid = QuadratureGrid::for_overlaps(1.5).unwrap();
        let q = Vec3::new(3.0, 4.0, 0.0);
        let m = quad_displaced_overlap(Well::Right, Well::Right, &q, &d, &grid).unwrap();
        let expect = (-12.5f64).exp();
        assert!((m.norm() - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(matches!(QuadratureGrid::new(2.0, 8.0, 2.0), Err(Error::Quadrature(_))));
        assert!(matches!(QuadratureGrid::new(2.0, 1.0, 0.05), Err(Error::Quadrature(_))));
        let narrow = QuadratureGrid::for_overlaps(1.0).unwrap();
        let r = quad_displaced_overlap(Well::Left, Well::Left, &Vec3::zeros(), &d_vec(20.0), &narrow);
        assert!(r.is_err());
    }

    #[test]
    fn normalization_by_quadrature() {
        let grid = QuadratureGrid::for_overlaps(2.0).unwrap();
        let n = quad_normalization(&AtomState::symmetric(), &d_vec(2.0), &grid).unwrap();
        assert!((n - 0.788_960_918_678_393_4).abs() < 1e-10);
    }

    #[test]
    fn symmetric_spectrum_matches_rayleigh_structure() {
        let big_d = 2.0;
        let d = d_vec(big_d);
        let grid = QuadratureGrid::for_overlaps(big_d).unwrap();
        let model = EigenbasisModel::new(&AtomState::symmetric(), &d, 0.1, grid).unwrap();
        let eps = overlap_epsilon(big_d).unwrap().value;
        let q = Vec3::new(0.9, 0.3, 0.0);
        let p = 0.5 * q.dot(&d);
        let env = (-q.norm_squared()).exp();
        let spec = spectrum_from_eigenbasis(&model, &q, 1e3).unwrap();
        assert!(spec.doublet_resolved);
        let elastic = env * ((p.cos() + eps) / (1.0 + eps)).powi(2);
        let stokes = env * p.sin().powi(2) / (1.0 - eps * eps);
        assert!((spec.weight(RayleighLine::Elastic) - elastic).abs() < 1e-10);
        assert!((spec.weight(RayleighLine::Stokes) - stokes).abs() < 1e-10);
        assert!(spec.weight(RayleighLine::AntiStokes).abs() < 1e-20);
        // eigenstate: line weights sum to Σ_F |⟨F|e^{iq·x}|ψ⟩|²
        assert!((spec.total() - model.final_state_weights(&q).unwrap()).abs() < 1e-14);

        let zero = spectrum_from_eigenbasis(&model, &Vec3::zeros(), 1e3).unwrap();
        assert!((zero.weight(RayleighLine::Elastic) - 1.0).abs() < 1e-10);
        assert!(zero.weight(RayleighLine::Stokes) < 1e-20);
    }

    #[test]
    fn antisymmetric_initial_state_gives_antistokes() {
        let big_d = 2.5;
        let d = d_vec(big_d);
        let grid = QuadratureGrid::for_overlaps(big_d).unwrap();
        let model = EigenbasisModel::new(&AtomState::antisymmetric(), &d, 0.1, grid).unwrap();
        assert!((model.coefficients()[1].norm() - 1.0).abs() < 1e-10);
        let eps = overlap_epsilon(big_d).unwrap().value;
        let q = Vec3::new(0.6, 0.0, 0.2);
        let p = 0.5 * q.dot(&d);
        let spec = spectrum_from_eigenbasis(&model, &q, 1e3).unwrap();
        let line = spec.lines.iter().find(|l| l.kind() == RayleighLine::AntiStokes && l.weight > 0.0).unwrap();
        assert!((line.center - 0.1).abs() < 1e-15);
        let expect = (-q.norm_squared()).exp() * p.sin().powi(2) / (1.0 - eps * eps);
        assert!((spec.weight(RayleighLine::AntiStokes) - expect).abs() < 1e-10);
    }

    #[test]
    fn gram_schmidt_coefficients_are_normalized() {
        // ε = 0.2
        let big_d = (-8.0 * 0.2f64.ln()).sqrt();
        let grid = QuadratureGrid::for_overlaps(big_d).unwrap();
        let state = AtomState::new(std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_2).unwrap();
        let model = EigenbasisModel::new(&state, &d_vec(big_d), 0.1, grid).unwrap();
        assert!((model.overlap() - 0.2).abs() < 1e-10);
        let [cs, ca] = model.coefficients();
        assert!((cs.norm_sqr() + ca.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn raman_oracle_examples() {
        let d = d_vec(3.0);
        let grid = QuadratureGrid::for_amplitudes(3.0).unwrap();
        let single = AtomState::new(0.0, 0.0).unwrap();
        let dk = Vec3::new(0.4, -0.3, 0.0);
        let rho = raman_momentum_oracle(&single, &dk, &d, &grid).unwrap();
        let expect = (2.0 / PI).powf(1.5) * (-2.0 * dk.norm_squared()).exp();
        assert!((rho - expect).abs() < 1e-10 * expect);

        // Δk·d = π with θ = π/4, φ = 0
        let dk = Vec3::x() * (PI / 3.0);
        let rho = raman_momentum_oracle(&AtomState::symmetric(), &dk, &d, &grid).unwrap();
        assert!(rho < 1e-10);
    }

    #[test]
    fn closed_form_overlap_agrees() {
        let d = Vec3::new(1.0, 2.0, -0.5);
        let grid = QuadratureGrid::for_overlaps(d.norm()).unwrap();
        let q = Vec3::new(-0.4, 1.1, 2.0);
        for bra in Well::BOTH {
            for ket in Well::BOTH {
                let a = displaced_overlap(bra, ket, &q, &d);
                let b = quad_displaced_overlap(bra, ket, &q, &d, &grid).unwrap();
                assert!((a - b).norm() <= 1e-8 * a.norm().max(1e-4), "{bra:?} {ket:?}");
            }
        }
    }

    #[test]
    fn refinement_converges() {
        let d = d_vec(3.0);
        let grid = QuadratureGrid::for_overlaps(3.0).unwrap();
        let fine = grid.refined().unwrap();
        assert!((fine.step() - 0.5 * grid.step()).abs() < 1e-15);
        let q = Vec3::new(2.0, 1.0, 0.5);
        for bra in Well::BOTH {
            for ket in Well::BOTH {
                let a = quad_displaced_overlap(bra, ket, &q, &d, &grid).unwrap();
                let b = quad_displaced_overlap(bra, ket, &q, &d, &fine).unwrap();
                assert!((a - b).norm() < 1e-9 * b.norm());
            }
        }
    }

    #[test]
    fn cost_guard() {
        let grid = QuadratureGrid::for_overlaps(2.0).unwrap();
        let model = EigenbasisModel::new(&AtomState::symmetric(), &d_vec(2.0), 1.0, grid).unwrap();
        let r = time_integral_check(&model, &Vec3::zeros(), 10.0, &[0.0], MAX_TIME_STEPS + 1);
        assert!(matches!(r, Err(Error::CostGuard { .. })));
    }

    #[test]
    fn single_line_time_integral_is_sinc_squared() {
        let grid = QuadratureGrid::for_overlaps(2.0).unwrap();
        let model = EigenbasisModel::new(&AtomState::symmetric(), &d_vec(2.0), 1.0, grid).unwrap();
        let t = 12.0;
        let omegas = [-0.8, -0.3, 0.0, 0.2, 0.5];
        let steps = default_time_steps(t, 1.0 + 0.8);
        let out = time_integral_check(&model, &Vec3::zeros(), t, &omegas, steps).unwrap();
        for (w, s) in out {
            let expect = diffraction(w, t);
            assert!((s - expect).abs() < 1e-2 * diffraction(0.0, t), "ω = {w}: {s} vs {expect}");
        }
    }

    #[test]
    fn unresolved_peak_tracks_broadband_weight() {
        // δν·T ≪ 1: all lines merge, the peak height is Σ weights·T/2π
        let big_d = 2.0;
        let grid = QuadratureGrid::for_overlaps(big_d).unwrap();
        let model = EigenbasisModel::new(&AtomState::new(FRAC_PI_4, 0.0).unwrap(), &d_vec(big_d), 1.0, grid).unwrap();
        let t = 0.01;
        for &qx in &[0.3, 0.9, 1.7] {
            let q = Vec3::x() * qx;
            let total = spectrum_from_eigenbasis(&model, &q, t).unwrap().total();
            let s = time_integral_check(&model, &q, t, &[0.0], 64).unwrap()[0].1;
            assert!((s / (t / TAU) - total).abs() < 1e-4 * total);
        }
    }
}
