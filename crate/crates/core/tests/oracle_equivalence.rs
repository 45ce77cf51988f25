use std::f64::consts::{PI, TAU};

use fringe_scatter::oracle::{raman_momentum_oracle, spectrum_from_eigenbasis, EigenbasisModel, QuadratureGrid};
use fringe_scatter::{overlap_epsilon, raman_intensity, rayleigh_components, AtomState, MomentumTransfer, RayleighLine, ScatterGeometry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * a.abs().max(b.abs()) || (a - b).abs() <= 1e-12
}

#[test]
fn closed_forms_match_quadrature_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let geometry = ScatterGeometry::default();
    for _ in 0..200 {
        let eta = rng.random_range(0.1..3.0);
        let big_d = rng.random_range(0.5..8.0);
        let theta = rng.random_range(0.0..PI / 2.0);
        let phi = rng.random_range(0.0..TAU);
        let angle = rng.random_range(0.0..TAU);
        let state = AtomState::new(theta, phi).unwrap();
        let d = geometry.separation_vector(big_d);
        let dk = MomentumTransfer::at_angle(&geometry, eta, big_d, angle).unwrap();
        let overlap = overlap_epsilon(big_d).unwrap();

        let c = rayleigh_components(&state, &dk, &overlap).unwrap();
        let model = EigenbasisModel::new(&state, &d, 0.05, QuadratureGrid::for_overlaps(big_d).unwrap()).unwrap();
        let spec = spectrum_from_eigenbasis(&model, &dk.vector, 1e4).unwrap();
        for line in RayleighLine::ALL {
            let (a, b) = (c.weight(line), spec.weight(line));
            assert!(close(a, b), "{line:?} η={eta} D={big_d} θ={theta} φ={phi} Φ={angle}: {a:e} vs {b:e}");
        }

        let r = raman_intensity(&state, &dk, overlap.value, 0.0).unwrap().density();
        let o = raman_momentum_oracle(&state, &dk.vector, &d, &QuadratureGrid::for_amplitudes(big_d).unwrap()).unwrap();
        assert!(close(r, o), "raman η={eta} D={big_d} θ={theta} φ={phi} Φ={angle}: {r:e} vs {o:e}");
    }
}
