//! Density matrices, pure states and the state families used to probe
//! local uncertainty relations.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ZERO};
use crate::spin_ops::{phased_eigenvectors, spin_components, SpinQuantum};
use crate::tolerance::Tolerances;

/// A validated quantum state of one system (`dims = [d]`) or a pair
/// (`dims = [dA, dB]`, product basis index `i*dB + j`).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    pub fn validate(matrix: ComplexMatrix, dims: &[usize]) -> Result<Self> {
        Self::validate_with(matrix, dims, &Tolerances::default())
    }

    pub fn validate_with(matrix: ComplexMatrix, dims: &[usize], tol: &Tolerances) -> Result<Self> {
        if dims.is_empty() || dims.len() > 2 || dims.contains(&0) {
            return Err(Error::Shape(format!(
                "dims must be [dA] or [dA, dB] with positive entries, got {dims:?}"
            )));
        }
        let total: usize = dims.iter().product();
        if total != matrix.dim() {
            return Err(Error::DimMismatch {
                expected: total,
                found: matrix.dim(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tol.hermiticity {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let eig = matrix.hermitian_eigen()?;
        let min_eigenvalue = eig.values[0];
        if min_eigenvalue < tol.positivity_floor {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        // The stored spectrum is clipped; the matrix itself is kept verbatim
        // so that validation is idempotent.
        let eigenvalues = eig
            .values
            .into_iter()
            .map(|v| {
                if v < 0.0 {
                    0.0
                } else if v > 1.0 && v <= 1.0 + tol.trace {
                    1.0
                } else {
                    v
                }
            })
            .collect();
        Ok(Self {
            dims: dims.to_vec(),
            matrix,
            eigenvalues,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn dim_a(&self) -> usize {
        self.dims[0]
    }

    pub fn dim_b(&self) -> Option<usize> {
        self.dims.get(1).copied()
    }

    /// Ascending spectrum, clipped into [0, 1] at the tolerance boundary.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn purity(&self) -> f64 {
        self.matrix
            .trace_product(&self.matrix)
            .expect("same matrix")
            .re
    }

    /// `rho_A (x) rho_B` as a two-party state.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        if a.dims.len() != 1 || b.dims.len() != 1 {
            return Err(Error::Shape(
                "product states take two single-system factors".into(),
            ));
        }
        Self::validate(a.matrix.kron(&b.matrix), &[a.dim(), b.dim()])
    }

    /// Convex combination `sum w_k rho_k`; all states must share dims.
    pub fn mixture(terms: &[(f64, &Self)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        check_weights(&terms.iter().map(|(w, _)| *w).collect::<Vec<_>>())?;
        let mut acc = ComplexMatrix::zeros(first.dim());
        for (w, rho) in terms {
            if rho.dims != first.dims {
                return Err(Error::DimMismatch {
                    expected: first.dim(),
                    found: rho.dim(),
                });
            }
            acc = &acc + &rho.matrix.scale(*w);
        }
        Self::validate(acc, &first.dims)
    }

    /// SHA-256 over dims and the IEEE-754 bits of every entry.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for &d in &self.dims {
            h.update((d as u64).to_le_bytes());
        }
        for z in self.matrix.as_slice() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if amplitudes.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "state vector norm is {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; rejects the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if amplitudes.is_empty() || !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero vector".into(),
            ));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Same ray, phased so the first nonzero amplitude is real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        if let Some(pivot) = amplitudes.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = pivot.conj() / pivot.norm();
            amplitudes.iter_mut().for_each(|z| *z *= phase);
        }
        Self { amplitudes }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    /// `|psi><psi|` validated with the given dims.
    pub fn to_density(&self, dims: &[usize]) -> DensityMatrix {
        DensityMatrix::validate(self.projector(), dims).expect("pure projector is a valid state")
    }

    /// `<psi|A|psi>` (real part; `A` Hermitian).
    pub fn expectation(&self, a: &ComplexMatrix) -> Result<f64> {
        Ok(linalg::inner(&self.amplitudes, &a.apply(&self.amplitudes)?).re)
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "negative or non-finite weight {w}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {p} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// `(2l+1)^{-1/2} sum_m (-1)^{l-m} |m>|-m>` in the descending-m product basis.
pub fn singlet_vector(l: SpinQuantum) -> Result<Vec<Complex64>> {
    if l.two_l() == 0 {
        return Err(Error::InvalidParameter(
            "spin 0 has no two-party singlet".into(),
        ));
    }
    let n = l.dim();
    let amp = 1.0 / (n as f64).sqrt();
    let mut v = vec![ZERO; n * n];
    // Basis index k carries m = l - k, so |-m> sits at index n-1-k and
    // (-1)^{l-m} = (-1)^k.
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        v[k * n + (n - 1 - k)] = Complex64::new(sign * amp, 0.0);
    }
    Ok(v)
}

pub fn singlet_state(l: SpinQuantum) -> Result<DensityMatrix> {
    let v = singlet_vector(l)?;
    DensityMatrix::validate(ComplexMatrix::outer(&v), &[l.dim(), l.dim()])
}

/// The four Bell vectors for a qubit pair, descending-m basis (index 0 = m=+1/2).
#[derive(Debug, Clone)]
pub struct BellVectors {
    pub singlet: Vec<Complex64>,
    /// Annihilated by `S_i(A) + S_i(B)` for i = 1, 2, 3.
    pub triplets: [Vec<Complex64>; 3],
}

pub fn bell_vectors() -> BellVectors {
    let s = FRAC_1_SQRT_2;
    let v = |a: [f64; 4]| a.iter().map(|&x| Complex64::new(x * s, 0.0)).collect();
    BellVectors {
        singlet: v([0.0, 1.0, -1.0, 0.0]),
        triplets: [
            v([1.0, 0.0, 0.0, -1.0]),
            v([1.0, 0.0, 0.0, 1.0]),
            v([0.0, 1.0, 1.0, 0.0]),
        ],
    }
}

#[derive(Debug, Clone)]
pub struct BellStates {
    pub singlet: DensityMatrix,
    pub triplets: [DensityMatrix; 3],
}

pub fn bell_states() -> BellStates {
    let v = bell_vectors();
    let rho = |x: &[Complex64]| {
        DensityMatrix::validate(ComplexMatrix::outer(x), &[2, 2]).expect("Bell projector")
    };
    BellStates {
        singlet: rho(&v.singlet),
        triplets: [
            rho(&v.triplets[0]),
            rho(&v.triplets[1]),
            rho(&v.triplets[2]),
        ],
    }
}

/// `p_S |S><S| + sum_i p_i |Ti><Ti|`.
pub fn bell_mixture(p_s: f64, p_1: f64, p_2: f64, p_3: f64) -> Result<DensityMatrix> {
    let b = bell_states();
    DensityMatrix::mixture(&[
        (p_s, &b.singlet),
        (p_1, &b.triplets[0]),
        (p_2, &b.triplets[1]),
        (p_3, &b.triplets[2]),
    ])
}

/// `(1 - p_w) |sing><sing| + p_w 1/N^2`.
pub fn white_noise_mixture(l: SpinQuantum, p_w: f64) -> Result<DensityMatrix> {
    check_probability("p_w", p_w)?;
    let n = l.dim();
    let singlet = singlet_state(l)?;
    let noise = ComplexMatrix::identity(n * n).scale(p_w / (n * n) as f64);
    DensityMatrix::validate(&singlet.matrix.scale(1.0 - p_w) + &noise, &[n, n])
}

/// Spin-1 singlet dephased in the L_x basis:
/// `(1 - p_d) |sing><sing| + p_d/3 sum_a |a; -a><a; -a|`, with `a` the L_x
/// eigenvalues -1, 0, +1.
pub fn x_decoherence_mixture(p_d: f64) -> Result<DensityMatrix> {
    check_probability("p_d", p_d)?;
    let l = SpinQuantum::from_two_l(2);
    let ops = spin_components(l);
    let lx = &ops.operators()[0];
    // Ascending eigenvalues: index 0 is L_x = -1, index 2 is L_x = +1.
    let (_, x) = phased_eigenvectors(lx)?;
    let mut acc = singlet_state(l)?.matrix.scale(1.0 - p_d);
    for a in 0..3 {
        let ket = tensor(&x[a], &x[2 - a]);
        acc = &acc + &ComplexMatrix::outer(&ket).scale(p_d / 3.0);
    }
    DensityMatrix::validate(acc, &[3, 3])
}

/// Spin-1 state with amplitudes `sqrt5/4 e^{-i phi}`, `sqrt6/4`,
/// `sqrt5/4 e^{+i phi}` on m = -1, 0, +1. Basis order is descending m, so
/// the vector reads `(sqrt5/4 e^{+i phi}, sqrt6/4, sqrt5/4 e^{-i phi})`.
pub fn min_uncertainty_state_n3(phi: f64) -> PureState {
    let outer = 5f64.sqrt() / 4.0;
    let middle = 6f64.sqrt() / 4.0;
    PureState {
        amplitudes: vec![
            Complex64::from_polar(outer, phi),
            Complex64::new(middle, 0.0),
            Complex64::from_polar(outer, -phi),
        ],
    }
}

pub fn tensor(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Operator exchanging the two subsystems of an `n x n` pair.
pub fn swap_operator(n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            s[(i * n + j, j * n + i)] = Complex64::new(1.0, 0.0);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_ops::stokes_components;
    use crate::uncertainty::{joint_operator, variance};

    fn joint_spin(l: SpinQuantum) -> Vec<ComplexMatrix> {
        spin_components(l)
            .operators()
            .iter()
            .map(|a| joint_operator(a, a))
            .collect()
    }

    fn max_abs(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = DensityMatrix::validate(ComplexMatrix::identity(4).scale(0.25), &[2, 2]).unwrap();
        assert!((rho.purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let err = DensityMatrix::validate(ComplexMatrix::diagonal(&[0.6, 0.6, -0.2]), &[3]);
        match err {
            Err(Error::NotPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.2).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_error_paths() {
        assert!(matches!(
            DensityMatrix::validate(ComplexMatrix::diagonal(&[0.5, 0.4]), &[2]),
            Err(Error::TraceNotOne { .. })
        ));
        let mut m = ComplexMatrix::identity(2).scale(0.5);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            DensityMatrix::validate(m, &[2]),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            DensityMatrix::validate(ComplexMatrix::identity(4).scale(0.25), &[2, 3]),
            Err(Error::DimMismatch {
                expected: 6,
                found: 4
            })
        ));
        assert!(matches!(
            DensityMatrix::validate(ComplexMatrix::identity(1), &[]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn singlet_half_is_pure_and_annihilated() {
        let l = SpinQuantum::from_two_l(1);
        let rho = singlet_state(l).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        let diff = singlet_vector(l)
            .unwrap()
            .iter()
            .zip(&bell_vectors().singlet)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }

    #[test]
    fn singlet_annihilated_by_joint_spin() {
        for two_l in 1..=6 {
            let l = SpinQuantum::from_two_l(two_l);
            let v = singlet_vector(l).unwrap();
            for j in joint_spin(l) {
                assert!(max_abs(&j.apply(&v).unwrap()) < 1e-12, "l={l}");
            }
            let rho = singlet_state(l).unwrap();
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
            let total: f64 = joint_spin(l)
                .iter()
                .map(|j| variance(&rho, j).unwrap())
                .sum();
            assert!(total.abs() < 1e-12);
        }
    }

    #[test]
    fn singlet_rejects_spin_zero() {
        assert!(singlet_state(SpinQuantum::from_two_l(0)).is_err());
    }

    #[test]
    fn singlet_swap_invariant() {
        for two_l in 1..=4 {
            let l = SpinQuantum::from_two_l(two_l);
            let rho = singlet_state(l).unwrap();
            let sw = swap_operator(l.dim());
            let swapped = rho.matrix().conjugate_by(&sw).unwrap();
            assert!(swapped.max_abs_diff(rho.matrix()).unwrap() < 1e-15);
        }
    }

    #[test]
    fn triplets_annihilated_and_orthogonal() {
        let v = bell_vectors();
        let s = stokes_components(1);
        for (i, t) in v.triplets.iter().enumerate() {
            let joint = joint_operator(&s.operators()[i], &s.operators()[i]);
            assert!(max_abs(&joint.apply(t).unwrap()) < 1e-12);
        }
        let all = [&v.singlet, &v.triplets[0], &v.triplets[1], &v.triplets[2]];
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((linalg::inner(a, b).re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bell_mixture_examples() {
        let b = bell_states();
        let rho = bell_mixture(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(rho.matrix().max_abs_diff(b.singlet.matrix()).unwrap() < 1e-15);
        let rho = bell_mixture(0.25, 0.25, 0.25, 0.25).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&ComplexMatrix::identity(4).scale(0.25))
                .unwrap()
                < 1e-15
        );
        assert!(bell_mixture(-0.1, 0.5, 0.3, 0.3).is_err());
        assert!(bell_mixture(0.5, 0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn white_noise_endpoints() {
        let l = SpinQuantum::from_two_l(2);
        let rho = white_noise_mixture(l, 0.0).unwrap();
        assert_eq!(rho, singlet_state(l).unwrap());
        let rho = white_noise_mixture(l, 1.0).unwrap();
        assert!((rho.purity() - 1.0 / 9.0).abs() < 1e-15);
        assert!(white_noise_mixture(l, 1.5).is_err());
        assert!(white_noise_mixture(l, -0.1).is_err());
    }

    #[test]
    fn x_decoherence_keeps_x_variance_zero() {
        let l = SpinQuantum::from_two_l(2);
        let rho = x_decoherence_mixture(0.0).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(singlet_state(l).unwrap().matrix())
                .unwrap()
                < 1e-15
        );
        let joints = joint_spin(l);
        for p in [0.0, 0.3, 0.77, 1.0] {
            let rho = x_decoherence_mixture(p).unwrap();
            assert!(variance(&rho, &joints[0]).unwrap() < 1e-12);
        }
        let rho = x_decoherence_mixture(0.3).unwrap();
        let total: f64 = joints.iter().map(|j| variance(&rho, j).unwrap()).sum();
        assert!((total - 0.8).abs() < 1e-12);
        assert!(x_decoherence_mixture(1.01).is_err());
    }

    #[test]
    fn squeezed_family_is_normalized() {
        for phi in [0.0, 0.4, 1.3, -2.0] {
            let psi = min_uncertainty_state_n3(phi);
            assert!((linalg::norm(psi.amplitudes()) - 1.0).abs() < 1e-15);
            assert!(PureState::new(psi.amplitudes().to_vec()).is_ok());
        }
    }

    #[test]
    fn canonical_phase() {
        let psi = PureState::normalized(vec![
            ZERO,
            Complex64::new(0.0, -2.0),
            Complex64::new(1.0, 1.0),
        ])
        .unwrap()
        .with_canonical_phase();
        assert_eq!(psi.amplitudes()[0], ZERO);
        assert!(psi.amplitudes()[1].im.abs() < 1e-16 && psi.amplitudes()[1].re > 0.0);
    }

    #[test]
    fn pure_state_norm_checked() {
        assert!(PureState::new(vec![Complex64::new(0.5, 0.0)]).is_err());
        assert!(PureState::normalized(vec![ZERO, ZERO]).is_err());
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = bell_mixture(0.7, 0.1, 0.1, 0.1).unwrap();
        let b = bell_mixture(0.7, 0.1, 0.1, 0.1).unwrap();
        let c = bell_mixture(0.7, 0.2, 0.0, 0.1).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
