//! Random states, operators and unitaries for property tests and scans.
//!
//! All samplers take the generator explicitly so callers control seeding.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::states::{DensityMatrix, PureState};

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| complex_gaussian(rng)).collect()
}

/// Haar-distributed pure state (normalized complex Gaussian vector).
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        if let Ok(psi) = PureState::normalized(gaussian_vector(rng, dim)) {
            return psi;
        }
    }
}

/// Matrix of independent standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// Full-rank mixed state `G G^dagger / Tr(G G^dagger)`.
pub fn mixed_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim);
    let gg = g.multiply(&g.adjoint()).expect("square");
    let tr = gg.trace().re;
    DensityMatrix::validate(gg.scale(1.0 / tr), &[dim]).expect("Ginibre state is valid")
}

/// Either a pure or a mixed state with equal probability.
pub fn any_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    if rng.random_bool(0.5) {
        pure_state(rng, dim).to_density(&[dim])
    } else {
        mixed_state(rng, dim)
    }
}

/// Hermitian matrix `(G + G^dagger) / 2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    (&g + &g.adjoint()).scale(0.5)
}

/// Unitary `exp(-i H)` with `H` a random Hermitian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    hermitian(rng, dim)
        .unitary_exp(1.0)
        .expect("random Hermitian matrix diagonalizes")
}
