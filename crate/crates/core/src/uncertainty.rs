//! Variances, sum uncertainties and the catalog of analytic lower bounds.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::spin_ops::{spin_components, stokes_components, OperatorSet, SpinQuantum};
use crate::states::DensityMatrix;

const IMAG_TOLERANCE: f64 = 1e-10;
const VARIANCE_FLOOR: f64 = 1e-12;

/// `A (x) 1 + 1 (x) B`.
pub fn joint_operator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let ia = ComplexMatrix::identity(a.dim());
    let ib = ComplexMatrix::identity(b.dim());
    &a.kron(&ib) + &ia.kron(b)
}

/// `Tr(rho A^2) - Tr(rho A)^2`.
pub fn variance(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<f64> {
    let deviation = a.hermitian_deviation();
    if deviation > 1e-9 {
        return Err(Error::NotHermitian { deviation });
    }
    let rho_a = rho.matrix().multiply(a)?;
    let first = rho_a.trace();
    let second = rho_a.trace_product(a)?;
    for z in [first, second] {
        if z.im.abs() > IMAG_TOLERANCE {
            return Err(Error::ComplexExpectation { imag: z.im });
        }
    }
    let value = second.re - first.re * first.re;
    if value >= 0.0 {
        Ok(value)
    } else if value >= -VARIANCE_FLOOR * second.re.abs().max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance { value })
    }
}

/// Variance of each member of `set`, in order.
pub fn component_variances(rho: &DensityMatrix, set: &OperatorSet) -> Result<Vec<f64>> {
    set.operators().iter().map(|a| variance(rho, a)).collect()
}

/// `sum_i dA_i^2`.
pub fn sum_uncertainty(rho: &DensityMatrix, set: &OperatorSet) -> Result<f64> {
    Ok(component_variances(rho, set)?.iter().sum())
}

/// Exact rational bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub const fn new(num: i64, den: i64) -> Self {
        Self { num, den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Closed-form bound from the catalog.
    Analytic,
    /// Minimum found by global search over pure states.
    NumericallyCertified,
    /// Caller-provided number with no backing.
    Supplied,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::NumericallyCertified => "numerically-certified",
            Provenance::Supplied => "supplied",
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Provenance::Analytic),
            "numerically-certified" => Ok(Provenance::NumericallyCertified),
            "supplied" => Ok(Provenance::Supplied),
            other => Err(Error::InvalidParameter(format!(
                "unknown provenance {other:?}"
            ))),
        }
    }
}

/// Catalog entries. The string names (`l3`, `s3`, ...) are the CLI spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    /// `dLx^2 + dLy^2 + dLz^2 >= l`
    Spin3,
    /// `dS1^2 + dS2^2 + dS3^2 >= 2n`
    Stokes3,
    /// `dLx^2 + dLy^2 >= 1/4`, N = 2
    Spin2N2,
    /// `dS1^2 + dS2^2 >= 1`, N = 2
    Stokes2N2,
    /// `dLx^2 + dLy^2 >= 7/16`, N = 3
    Spin2N3,
    /// `dS1^2 + dS2^2 >= 7/4`, N = 3
    Stokes2N3,
}

impl RelationKind {
    pub const ALL: [RelationKind; 6] = [
        RelationKind::Spin3,
        RelationKind::Stokes3,
        RelationKind::Spin2N2,
        RelationKind::Stokes2N2,
        RelationKind::Spin2N3,
        RelationKind::Stokes2N3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Spin3 => "l3",
            RelationKind::Stokes3 => "s3",
            RelationKind::Spin2N2 => "l2n2",
            RelationKind::Stokes2N2 => "s2n2",
            RelationKind::Spin2N3 => "l2n3",
            RelationKind::Stokes2N3 => "s2n3",
        }
    }

    pub fn is_stokes(self) -> bool {
        matches!(
            self,
            RelationKind::Stokes3 | RelationKind::Stokes2N2 | RelationKind::Stokes2N3
        )
    }

    pub fn components(self) -> usize {
        match self {
            RelationKind::Spin3 | RelationKind::Stokes3 => 3,
            _ => 2,
        }
    }

    /// The only dimension the kind is defined for, if restricted.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            RelationKind::Spin2N2 | RelationKind::Stokes2N2 => Some(2),
            RelationKind::Spin2N3 | RelationKind::Stokes2N3 => Some(3),
            _ => None,
        }
    }

    /// Exact bound for spin `l` (photon number `n = 2l` for Stokes kinds).
    pub fn bound(self, l: SpinQuantum) -> Result<Rational> {
        if let Some(dim) = self.fixed_dim() {
            if l.dim() != dim {
                return Err(Error::KindMismatch {
                    kind: self.name().into(),
                    detail: format!("dimension {} (requires {dim})", l.dim()),
                });
            }
        }
        let two_l = i64::from(l.two_l());
        Ok(match self {
            RelationKind::Spin3 => Rational::new(two_l, 2),
            RelationKind::Stokes3 => Rational::new(2 * two_l, 1),
            RelationKind::Spin2N2 => Rational::new(1, 4),
            RelationKind::Stokes2N2 => Rational::new(1, 1),
            RelationKind::Spin2N3 => Rational::new(7, 16),
            RelationKind::Stokes2N3 => Rational::new(7, 4),
        })
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown relation kind {s:?} (expected one of l3, s3, l2n2, s2n2, l2n3, s2n3)"
                ))
            })
    }
}

/// An operator set together with a lower bound on its sum uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyRelation {
    pub set: OperatorSet,
    pub bound: f64,
    /// Exact value for analytic entries.
    pub exact: Option<Rational>,
    pub provenance: Provenance,
}

impl UncertaintyRelation {
    pub fn new(set: OperatorSet, bound: f64, provenance: Provenance) -> Result<Self> {
        if !bound.is_finite() || bound < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "bound {bound} must be >= 0"
            )));
        }
        Ok(Self {
            set,
            bound,
            exact: None,
            provenance,
        })
    }
}

/// Catalog lookup: operator set for spin `l` (or `n = 2l` photons) and its
/// analytic bound.
pub fn catalog_bound(kind: RelationKind, l: SpinQuantum) -> Result<UncertaintyRelation> {
    let exact = kind.bound(l)?;
    let full = if kind.is_stokes() {
        stokes_components(l.two_l())
    } else {
        spin_components(l)
    };
    let set = if kind.components() == 3 {
        full
    } else {
        let label = if kind.is_stokes() {
            format!("stokes n={} {{S1,S2}}", l.two_l())
        } else {
            format!("spin l={l} {{Lx,Ly}}")
        };
        full.select(&[0, 1], label)?
    };
    Ok(UncertaintyRelation {
        set,
        bound: exact.to_f64(),
        exact: Some(exact),
        provenance: Provenance::Analytic,
    })
}
