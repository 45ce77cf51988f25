//! Two-well Gaussian wave-packet algebra.
//!
//! The wells sit at ±d/2 about the origin. Each well's ground state is an
//! isotropic Gaussian of size a₀ = 1,
//!
//! ```text
//! ψ±(x) = (2π)^(-3/4) · exp(−(x ∓ d/2)² / 4)
//! ```
//!
//! and the atom is prepared in |ψ⟩ = N(cosθ|ψ−⟩ + e^{iφ} sinθ|ψ+⟩).
//!
//! Matrix elements of the momentum kick e^{iq·x} between well states are
//! Gaussian in q. They are split into the envelope e^{−|q|²/2} and a reduced,
//! envelope-free part so that fringe coefficients stay finite at momentum
//! transfers where the envelope itself underflows.
//!
//! Momentum-space convention: ψ̃(q) = (2π)^(-3/2) ∫ e^{−iq·x} ψ(x) d³x.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Below this log-overlap ε is flushed to exactly zero.
const LOG_EPSILON_FLOOR: f64 = -700.0;

/// ε above which the antisymmetric doublet state is treated as undefined.
pub const DEGENERATE_OVERLAP: f64 = 1.0 - 1e-12;

/// Which well a localized packet sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Well {
    /// |ψ−⟩, centred at −d/2.
    Left,
    /// |ψ+⟩, centred at +d/2.
    Right,
}

impl Well {
    pub const BOTH: [Well; 2] = [Well::Left, Well::Right];

    /// Centre of the packet in units of d: ∓1/2.
    pub fn sign(self) -> f64 {
        match self {
            Well::Left => -1.0,
            Well::Right => 1.0,
        }
    }
}

/// Superposition angles over the left/right packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState {
    pub theta: f64,
    pub phi: f64,
}

impl AtomState {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::Config(format!("state angles must be finite: θ = {theta}, φ = {phi}")));
        }
        Ok(Self { theta, phi })
    }

    /// Equal-weight in-phase superposition, the doublet ground state.
    pub fn symmetric() -> Self {
        Self { theta: PI / 4.0, phi: 0.0 }
    }

    /// Equal-weight out-of-phase superposition, the upper doublet state.
    pub fn antisymmetric() -> Self {
        Self { theta: PI / 4.0, phi: PI }
    }

    /// Unnormalized amplitudes on (|ψ−⟩, |ψ+⟩).
    pub fn well_amplitudes(&self) -> [C64; 2] {
        [
            C64::new(self.theta.cos(), 0.0),
            C64::from_polar(self.theta.sin(), self.phi),
        ]
    }
}

/// Overlap ε = ⟨ψ−|ψ+⟩ = e^{−D²/8}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketOverlap {
    pub value: f64,
    /// Set when ε was below e^{-700} and flushed to zero.
    pub underflowed: bool,
}

impl PacketOverlap {
    pub fn is_degenerate(&self) -> bool {
        self.value >= DEGENERATE_OVERLAP
    }
}

pub fn overlap_epsilon(separation: f64) -> Result<PacketOverlap> {
    if !(separation >= 0.0) || separation.is_infinite() {
        return Err(Error::Domain(format!(
            "well separation must be finite and non-negative, got {separation}"
        )));
    }
    let log_eps = -separation * separation / 8.0;
    if log_eps < LOG_EPSILON_FLOOR {
        Ok(PacketOverlap { value: 0.0, underflowed: true })
    } else {
        Ok(PacketOverlap { value: log_eps.exp(), underflowed: false })
    }
}

/// Normalization N = (1 + ε·sin2θ·cosφ)^(−1/2).
pub fn normalization(theta: f64, phi: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("overlap must lie in [0, 1], got {epsilon}")));
    }
    let norm_sq = 1.0 + epsilon * (2.0 * theta).sin() * phi.cos();
    if norm_sq <= 1e-300 {
        return Err(Error::DegenerateState(norm_sq));
    }
    Ok(norm_sq.sqrt().recip())
}

/// Gaussian envelope e^{−|q|²/2} of every single-kick matrix element.
pub fn kick_envelope(q: &Vec3) -> f64 {
    (-0.5 * q.norm_squared()).exp()
}

/// ⟨ψ_bra| e^{iq·x} |ψ_ket⟩ with the envelope e^{−|q|²/2} removed.
pub fn displaced_overlap_reduced(bra: Well, ket: Well, q: &Vec3, separation: &Vec3) -> C64 {
    if bra == ket {
        C64::from_polar(1.0, 0.5 * ket.sign() * q.dot(separation))
    } else {
        let eps = overlap_epsilon(separation.norm()).map_or(0.0, |o| o.value);
        C64::new(eps, 0.0)
    }
}

/// ⟨ψ_bra| e^{iq·x} |ψ_ket⟩.
///
/// Same well: e^{−|q|²/2}·e^{±iq·d/2}. Across wells the packet product is
/// centred at the origin, so the element is ε·e^{−|q|²/2} with no phase.
pub fn displaced_overlap(bra: Well, ket: Well, q: &Vec3, separation: &Vec3) -> C64 {
    displaced_overlap_reduced(bra, ket, q, separation) * kick_envelope(q)
}

/// ψ̃(q) for the normalized superposition state.
pub fn momentum_wavefunction(q: &Vec3, state: &AtomState, separation: &Vec3) -> Result<C64> {
    let eps = overlap_epsilon(separation.norm())?.value;
    let n = normalization(state.theta, state.phi, eps)?;
    let half_phase = 0.5 * q.dot(separation);
    let [left, right] = state.well_amplitudes();
    let gauss = (2.0 / PI).powf(0.75) * (-q.norm_squared()).exp();
    Ok((left * C64::from_polar(1.0, half_phase) + right * C64::from_polar(1.0, -half_phase)) * (n * gauss))
}

/// Amplitudes of a state on the symmetric (S) and antisymmetric (A) doublet.
///
/// S = (|ψ−⟩ + |ψ+⟩)/√(2(1+ε)), A = (|ψ+⟩ − |ψ−⟩)/√(2(1−ε)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubletCoefficients {
    pub symmetric: C64,
    pub antisymmetric: C64,
}

impl DoubletCoefficients {
    pub fn symmetric_weight(&self) -> f64 {
        self.symmetric.norm_sqr()
    }

    pub fn antisymmetric_weight(&self) -> f64 {
        self.antisymmetric.norm_sqr()
    }

    /// Multiplies both amplitudes by a common phase e^{iχ}.
    pub fn with_global_phase(self, chi: f64) -> Self {
        let w = C64::from_polar(1.0, chi);
        Self {
            symmetric: self.symmetric * w,
            antisymmetric: self.antisymmetric * w,
        }
    }
}

pub fn doublet_decompose(state: &AtomState, epsilon: f64) -> Result<DoubletCoefficients> {
    let n = normalization(state.theta, state.phi, epsilon)?;
    let [left, right] = state.well_amplitudes();
    let antisymmetric_content = right - left;
    if epsilon >= DEGENERATE_OVERLAP && antisymmetric_content.norm() > 1e-12 {
        return Err(Error::DegenerateBasis { epsilon });
    }
    Ok(DoubletCoefficients {
        symmetric: (left + right) * (n * ((1.0 + epsilon) / 2.0).sqrt()),
        antisymmetric: antisymmetric_content * (n * ((1.0 - epsilon).max(0.0) / 2.0).sqrt()),
    })
}

/// Expansion of S and A on (|ψ−⟩, |ψ+⟩).
pub fn doublet_vectors(epsilon: f64) -> Result<[[f64; 2]; 2]> {
    if epsilon >= DEGENERATE_OVERLAP {
        return Err(Error::DegenerateOverlap { epsilon });
    }
    let s = (2.0 * (1.0 + epsilon)).sqrt().recip();
    let a = (2.0 * (1.0 - epsilon)).sqrt().recip();
    Ok([[s, s], [-a, a]])
}

/// Doublet matrix elements m_XY = ⟨X|e^{iq·x}|Y⟩, envelope removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubletMatrix {
    /// Indexed `[bra][ket]` with 0 = S, 1 = A.
    pub reduced: [[C64; 2]; 2],
    /// e^{−|q|²/2}.
    pub envelope: f64,
}

impl DoubletMatrix {
    pub fn new(q: &Vec3, separation: &Vec3, epsilon: f64) -> Result<Self> {
        Self::from_phase(q.dot(separation), q.norm(), epsilon)
    }

    /// Elements from the fringe phase q·d and |q| alone.
    ///
    /// Projecting the well matrix [[e^{−iq·d/2}, ε], [ε, e^{iq·d/2}]] onto S and A
    /// gives m_SS = (cos p + ε)/(1+ε), m_AA = (cos p − ε)/(1−ε) and
    /// m_SA = m_AS = i·sin p/√(1−ε²) with p = q·d/2. The closed forms are used
    /// directly: summing the projections loses all relative accuracy of the
    /// off-diagonal elements as p → 0.
    pub fn from_phase(q_dot_d: f64, q_norm: f64, epsilon: f64) -> Result<Self> {
        if epsilon >= DEGENERATE_OVERLAP {
            return Err(Error::DegenerateOverlap { epsilon });
        }
        let (sin_p, cos_p) = (0.5 * q_dot_d).sin_cos();
        let off = C64::new(0.0, sin_p / ((1.0 - epsilon) * (1.0 + epsilon)).sqrt());
        Ok(Self {
            reduced: [
                [C64::new((cos_p + epsilon) / (1.0 + epsilon), 0.0), off],
                [off, C64::new((cos_p - epsilon) / (1.0 - epsilon), 0.0)],
            ],
            envelope: (-0.5 * q_norm * q_norm).exp(),
        })
    }

    pub fn element(&self, bra: usize, ket: usize) -> C64 {
        self.reduced[bra][ket] * self.envelope
    }
}
