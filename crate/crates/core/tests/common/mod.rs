//! Shared helpers for the integration suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spinnet_core::linalg::{C64, Matrix};
use spinnet_core::state::PureState;

/// Normalized pseudo-random register state.
pub fn random_state(n_electrons: usize, rng: &mut ChaCha8Rng) -> PureState {
    let dim = 1usize << (2 * n_electrons);
    let mut amps: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    PureState::from_amplitudes(n_electrons, amps).unwrap()
}

/// Haar-ish random unitary via modified Gram-Schmidt on a random matrix.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let mut cols: Vec<Vec<C64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                    .collect()
            })
            .collect();
        let mut ok = true;
        for i in 0..dim {
            for j in 0..i {
                let proj: C64 = cols[j]
                    .iter()
                    .zip(cols[i].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let prior = cols[j].clone();
                for (v, p) in cols[i].iter_mut().zip(&prior) {
                    *v -= proj * p;
                }
            }
            let norm: f64 = cols[i].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for v in cols[i].iter_mut() {
                *v /= norm;
            }
        }
        if !ok {
            continue;
        }
        let mut m = Matrix::zeros(dim);
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        if m.is_unitary(1e-10) {
            return m;
        }
    }
}
