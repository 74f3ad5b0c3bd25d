//! Angular-momentum and Stokes operators for N-level systems.
//!
//! Every matrix here is written in the L_z eigenbasis ordered by descending
//! m: index 0 is m = +l, index N-1 is m = -l.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Spin quantum number l, stored as the integer 2l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinQuantum {
    two_l: u32,
}

impl SpinQuantum {
    pub const fn from_two_l(two_l: u32) -> Self {
        Self { two_l }
    }

    /// Spin whose representation has `dim` levels (N = 2l + 1).
    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(Self::from_two_l((dim - 1) as u32))
    }

    pub fn two_l(self) -> u32 {
        self.two_l
    }

    pub fn l(self) -> f64 {
        f64::from(self.two_l) / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_l as usize + 1
    }

    /// l(l+1).
    pub fn casimir(self) -> f64 {
        let l = self.l();
        l * (l + 1.0)
    }

    /// m values in basis order: l, l-1, ..., -l.
    pub fn m_values(self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.l() - k as f64).collect()
    }
}

impl fmt::Display for SpinQuantum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_l.is_multiple_of(2) {
            write!(f, "{}", self.two_l / 2)
        } else {
            write!(f, "{}/2", self.two_l)
        }
    }
}

/// Ordered, labelled list of Hermitian operators acting on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    label: String,
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl OperatorSet {
    pub fn new(label: impl Into<String>, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        for op in &operators {
            if op.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
            let deviation = op.hermitian_deviation();
            if deviation > 1e-9 {
                return Err(Error::NotHermitian { deviation });
            }
        }
        Ok(Self {
            label: label.into(),
            dim,
            operators,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Members at `indices`, in that order.
    pub fn select(&self, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        let ops = indices
            .iter()
            .map(|&i| {
                self.operators.get(i).cloned().ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "component {i} out of range for a set of {}",
                        self.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, ops)
    }

    /// Conjugates every member by the same unitary.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let ops = self
            .operators
            .iter()
            .map(|a| a.conjugate_by(u))
            .collect::<Result<Vec<_>>>()?;
        // Rounding can leave ~1e-16 anti-Hermitian residue; fold it away.
        let ops = ops
            .into_iter()
            .map(|a| (&a + &a.adjoint()).scale(0.5))
            .collect();
        Self::new(self.label.clone(), ops)
    }

    pub fn scaled(&self, factor: f64, label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            dim: self.dim,
            operators: self.operators.iter().map(|a| a.scale(factor)).collect(),
        }
    }
}

/// `L_+` with `<m+1|L_+|m> = sqrt(l(l+1) - m(m+1))`.
pub fn raising_operator(l: SpinQuantum) -> ComplexMatrix {
    let n = l.dim();
    let two_l = i64::from(l.two_l());
    let mut plus = ComplexMatrix::zeros(n);
    for k in 1..n {
        // Work in quarter units so half-integer m stays exact.
        let two_m = two_l - 2 * k as i64;
        let quarter = two_l * (two_l + 2) - two_m * (two_m + 2);
        plus[(k - 1, k)] = Complex64::new((quarter as f64 / 4.0).sqrt(), 0.0);
    }
    plus
}

/// `{L_x, L_y, L_z}` for spin `l`.
pub fn spin_components(l: SpinQuantum) -> OperatorSet {
    let plus = raising_operator(l);
    let minus = plus.adjoint();
    let lx = (&plus + &minus).scale(0.5);
    // (L+ - L-) / 2i
    let ly = (&plus - &minus).scale_complex(Complex64::new(0.0, -0.5));
    let lz = ComplexMatrix::diagonal(&l.m_values());
    OperatorSet {
        label: format!("spin l={l} {{Lx,Ly,Lz}}"),
        dim: l.dim(),
        operators: vec![lx, ly, lz],
    }
}

/// Stokes operators `{S1, S2, S3} = {2Lx, 2Ly, 2Lz}` for `n_photons = 2l`.
pub fn stokes_components(n_photons: u32) -> OperatorSet {
    spin_components(SpinQuantum::from_two_l(n_photons))
        .scaled(2.0, format!("stokes n={n_photons} {{S1,S2,S3}}"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirCheck {
    /// Multiple of the identity closest to `sum A_i^2`.
    pub multiple: f64,
    /// Max entrywise deviation from that multiple.
    pub deviation: f64,
}

/// Compares `A_1^2 + A_2^2 + A_3^2` with the nearest multiple of identity.
pub fn casimir_check(set: &OperatorSet) -> Result<CasimirCheck> {
    if set.len() != 3 {
        return Err(Error::Cardinality {
            expected: 3,
            found: set.len(),
        });
    }
    let mut sum = ComplexMatrix::zeros(set.dim());
    for a in set.operators() {
        sum = &sum + &a.multiply(a)?;
    }
    let multiple = sum.trace().re / set.dim() as f64;
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(set.dim()).scale(multiple))?;
    Ok(CasimirCheck {
        multiple,
        deviation,
    })
}

/// Eigenvectors of `op`, each phased so its first nonzero component is real
/// and positive. Columns follow ascending eigenvalue.
pub fn phased_eigenvectors(op: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let eig = op.hermitian_eigen()?;
    let vectors = (0..op.dim())
        .map(|k| {
            let mut v = eig.vector(k);
            if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-12).copied() {
                let phase = pivot.conj() / pivot.norm();
                v.iter_mut().for_each(|z| *z *= phase);
            }
            v
        })
        .collect();
    Ok((eig.values, vectors))
}
