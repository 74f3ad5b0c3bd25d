//! Local uncertainty relations for bipartite systems.
//!
//! For a separable state the joint sum `sum_i d(A_i + B_i)^2` can never drop
//! below `U_A + U_B`; any state that does is entangled. The relative
//! violation `C = 1 - total / (U_A + U_B)` is 1 for a state with zero joint
//! uncertainty and non-positive when nothing is detected. A verdict of
//! "not detected" says nothing about separability.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::spin_ops::{stokes_components, OperatorSet, SpinQuantum};
use crate::states::{bell_mixture, x_decoherence_mixture, DensityMatrix};
use crate::uncertainty::{
    catalog_bound, joint_operator, variance, Provenance, RelationKind, UncertaintyRelation,
};

/// A state is flagged only when its total lies this far below the limit.
pub const VERDICT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct JointOperatorSet {
    pub set_a: OperatorSet,
    pub set_b: OperatorSet,
    /// `A_i (x) 1 + 1 (x) B_i`.
    pub joint: Vec<ComplexMatrix>,
    pub u_a: f64,
    pub u_b: f64,
    pub local_limit: f64,
    pub provenance: [Provenance; 2],
}

impl JointOperatorSet {
    pub fn dims(&self) -> [usize; 2] {
        [self.set_a.dim(), self.set_b.dim()]
    }

    pub fn label(&self) -> String {
        format!("{} + {}", self.set_a.label(), self.set_b.label())
    }
}

/// Joint operators with local limit `u_a + u_b`; bounds are recorded as
/// [`Provenance::Supplied`].
pub fn build_joint(
    set_a: &OperatorSet,
    u_a: f64,
    set_b: &OperatorSet,
    u_b: f64,
) -> Result<JointOperatorSet> {
    build_joint_with(set_a, u_a, set_b, u_b, [Provenance::Supplied; 2])
}

fn build_joint_with(
    set_a: &OperatorSet,
    u_a: f64,
    set_b: &OperatorSet,
    u_b: f64,
    provenance: [Provenance; 2],
) -> Result<JointOperatorSet> {
    if set_a.len() != set_b.len() {
        return Err(Error::Cardinality {
            expected: set_a.len(),
            found: set_b.len(),
        });
    }
    for u in [u_a, u_b] {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "local limit {u} must be >= 0"
            )));
        }
    }
    let joint = set_a
        .operators()
        .iter()
        .zip(set_b.operators())
        .map(|(a, b)| joint_operator(a, b))
        .collect();
    Ok(JointOperatorSet {
        set_a: set_a.clone(),
        set_b: set_b.clone(),
        joint,
        u_a,
        u_b,
        local_limit: u_a + u_b,
        provenance,
    })
}

pub fn joint_from_relations(
    a: &UncertaintyRelation,
    b: &UncertaintyRelation,
) -> Result<JointOperatorSet> {
    build_joint_with(
        &a.set,
        a.bound,
        &b.set,
        b.bound,
        [a.provenance, b.provenance],
    )
}

/// Same catalog relation on both sides, sized per subsystem.
pub fn catalog_joint(
    kind: RelationKind,
    l_a: SpinQuantum,
    l_b: SpinQuantum,
) -> Result<JointOperatorSet> {
    joint_from_relations(&catalog_bound(kind, l_a)?, &catalog_bound(kind, l_b)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LurCertificate {
    pub relation: String,
    pub per_component: Vec<f64>,
    pub total: f64,
    pub local_limit: f64,
    pub relative_violation: f64,
    pub entangled: bool,
    pub provenance: [&'static str; 2],
    pub state_digest: String,
}

impl LurCertificate {
    pub fn verdict(&self) -> &'static str {
        if self.entangled {
            "entangled"
        } else {
            "not-detected"
        }
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "relation": self.relation,
            "per_component": self.per_component,
            "total": self.total,
            "local_limit": self.local_limit,
            "relative_violation": self.relative_violation,
            "verdict": self.verdict(),
            "provenance": { "a": self.provenance[0], "b": self.provenance[1] },
            "state_digest": self.state_digest,
        });
        serde_json::to_string_pretty(&value).expect("certificate serializes")
    }
}

/// Evaluates the joint uncertainties of `rho` against the local limit.
pub fn certify(rho: &DensityMatrix, joint: &JointOperatorSet) -> Result<LurCertificate> {
    let dims = joint.dims();
    if rho.dims() != dims {
        return Err(Error::Shape(format!(
            "state dims {:?} do not match the joint relation {dims:?}",
            rho.dims()
        )));
    }
    if joint.local_limit <= 0.0 {
        return Err(Error::InvalidParameter(
            "local limit is zero; no violation can be measured".into(),
        ));
    }
    let per_component = joint
        .joint
        .iter()
        .map(|j| variance(rho, j))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = per_component.iter().sum();
    Ok(LurCertificate {
        relation: joint.label(),
        per_component,
        total,
        local_limit: joint.local_limit,
        relative_violation: 1.0 - total / joint.local_limit,
        entangled: total < joint.local_limit - VERDICT_TOLERANCE,
        provenance: [joint.provenance[0].as_str(), joint.provenance[1].as_str()],
        state_digest: rho.digest(),
    })
}

/// Closed-form relative violations of the model state families.
pub mod closed_form {
    /// Singlet plus white noise, three components, `N = 2l + 1` levels.
    pub fn white_noise_c3(n_levels: usize, p_w: f64) -> f64 {
        1.0 - p_w * (n_levels as f64 + 1.0) / 2.0
    }

    /// Spin-1 singlet plus white noise against the 7/16 two-component bound.
    pub fn white_noise_c2_n3(p_w: f64) -> f64 {
        1.0 - 64.0 / 21.0 * p_w
    }

    /// Spin-1 singlet dephased in the L_x basis, three components.
    pub fn decoherence_c3(p_d: f64) -> f64 {
        1.0 - 4.0 / 3.0 * p_d
    }

    /// Spin-1 singlet dephased in the L_x basis, two components.
    pub fn decoherence_c2(p_d: f64) -> f64 {
        1.0 - 32.0 / 21.0 * p_d
    }

    /// Bell mixture, three Stokes components.
    pub fn bell_c_s3(p_s: f64) -> f64 {
        2.0 * p_s - 1.0
    }

    /// Bell mixture, Stokes components 1 and 2.
    pub fn bell_c_s2(p_s: f64, p_3: f64) -> f64 {
        2.0 * p_s - 1.0 - 2.0 * p_3
    }

    /// Concurrence of a Bell-diagonal state: `max(0, 2 p_max - 1)`.
    pub fn bell_concurrence(weights: [f64; 4]) -> f64 {
        let p_max = weights.into_iter().fold(0.0, f64::max);
        (2.0 * p_max - 1.0).max(0.0)
    }

    /// Concurrence lower bound from two visibilities.
    pub fn visibility_concurrence_bound(v1: f64, v2: f64) -> f64 {
        v1 + v2 - 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellAnalysis {
    pub c_s3: f64,
    pub c_s2: f64,
    pub concurrence_formula: f64,
    /// Same quantities measured on the constructed state.
    pub c_s3_certified: f64,
    pub c_s2_certified: f64,
}

impl BellAnalysis {
    pub fn max_discrepancy(&self) -> f64 {
        (self.c_s3 - self.c_s3_certified)
            .abs()
            .max((self.c_s2 - self.c_s2_certified).abs())
    }
}

pub fn bell_mixture_analysis(p_s: f64, p_1: f64, p_2: f64, p_3: f64) -> Result<BellAnalysis> {
    let rho = bell_mixture(p_s, p_1, p_2, p_3)?;
    let half = SpinQuantum::from_two_l(1);
    let s3 = certify(&rho, &catalog_joint(RelationKind::Stokes3, half, half)?)?;
    let s2 = certify(&rho, &catalog_joint(RelationKind::Stokes2N2, half, half)?)?;
    Ok(BellAnalysis {
        c_s3: closed_form::bell_c_s3(p_s),
        c_s2: closed_form::bell_c_s2(p_s, p_3),
        concurrence_formula: closed_form::bell_concurrence([p_s, p_1, p_2, p_3]),
        c_s3_certified: s3.relative_violation,
        c_s2_certified: s2.relative_violation,
    })
}

fn sigma_y_pair() -> ComplexMatrix {
    let s = stokes_components(1);
    let sy = &s.operators()[1];
    sy.kron(sy)
}

/// Two-qubit concurrence `max(0, l1 - l2 - l3 - l4)`. The `l_k` are the
/// square roots, descending, of the spectrum of `rho (sy(x)sy) rho* (sy(x)sy)`,
/// obtained here from the Hermitian matrix `sqrt(rho) rho~ sqrt(rho)` which
/// has the same spectrum.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::Shape(format!(
            "concurrence requires a 2x2 pair, got dims {:?}",
            rho.dims()
        )));
    }
    let yy = sigma_y_pair();
    let conj = ComplexMatrix::from_fn(4, |i, j| rho.matrix()[(i, j)].conj());
    let flipped = yy.multiply(&conj)?.multiply(&yy)?;

    let eig = rho.matrix().hermitian_eigen()?;
    let roots: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    let sqrt_rho = ComplexMatrix::from_fn(4, |i, j| {
        (0..4)
            .map(|k| eig.vectors[(i, k)] * roots[k] * eig.vectors[(j, k)].conj())
            .sum::<Complex64>()
    });
    let m = sqrt_rho.multiply(&flipped)?.multiply(&sqrt_rho)?;
    let m = (&m + &m.adjoint()).scale(0.5);
    let mut lambdas: Vec<f64> = m
        .hermitian_eigen()?
        .values
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Polarization visibilities `V_1, V_2` and optionally `V_3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityRecord {
    pub v1: f64,
    pub v2: f64,
    pub v3: Option<f64>,
}

impl VisibilityRecord {
    pub fn new(v1: f64, v2: f64, v3: Option<f64>) -> Result<Self> {
        for v in [Some(v1), Some(v2), v3].into_iter().flatten() {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "visibility {v} outside [-1, 1]"
                )));
            }
        }
        Ok(Self { v1, v2, v3 })
    }

    pub fn values(&self) -> Vec<f64> {
        [Some(self.v1), Some(self.v2), self.v3]
            .into_iter()
            .flatten()
            .collect()
    }
}

/// Visibilities of a two-photon state, `V_i = P(anti) - P(corr) = -<S_i (x) S_i>`.
pub fn visibilities_from_state(rho: &DensityMatrix) -> Result<VisibilityRecord> {
    if rho.dims() != [2, 2] {
        return Err(Error::Shape("visibilities need a 2x2 pair".into()));
    }
    let s = stokes_components(1);
    let v: Vec<f64> = s
        .operators()
        .iter()
        .map(|si| rho.matrix().trace_product(&si.kron(si)).map(|z| -z.re))
        .collect::<Result<_>>()?;
    // Rounding can push |V| a hair past 1 for pure states.
    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    VisibilityRecord::new(clamp(v[0]), clamp(v[1]), Some(clamp(v[2])))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityUncertainties {
    /// `2 (1 - V_i)` per supplied component.
    pub per_component: Vec<f64>,
    /// `V_1 + V_2 - 1`.
    pub concurrence_lower_bound: f64,
    /// The caller asserted vanishing local polarizations; the mapping is
    /// only exact under that assumption.
    pub assumes_no_local_polarization: bool,
}

pub fn visibility_to_uncertainty(
    v: &VisibilityRecord,
    no_local_polarization: bool,
) -> Result<VisibilityUncertainties> {
    let v = VisibilityRecord::new(v.v1, v.v2, v.v3)?;
    Ok(VisibilityUncertainties {
        per_component: v.values().iter().map(|x| 2.0 * (1.0 - x)).collect(),
        concurrence_lower_bound: closed_form::visibility_concurrence_bound(v.v1, v.v2),
        assumes_no_local_polarization: no_local_polarization,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceAnalysis {
    pub c_l3: f64,
    pub c_l2: f64,
    pub c_l3_certified: f64,
    pub c_l2_certified: f64,
    /// `d(Lx(A) + Lx(B))^2` on the constructed state.
    pub x_uncertainty: f64,
}

impl DecoherenceAnalysis {
    pub fn max_discrepancy(&self) -> f64 {
        (self.c_l3 - self.c_l3_certified)
            .abs()
            .max((self.c_l2 - self.c_l2_certified).abs())
    }
}

pub fn decoherence_analysis(p_d: f64) -> Result<DecoherenceAnalysis> {
    let rho = x_decoherence_mixture(p_d)?;
    let one = SpinQuantum::from_two_l(2);
    let l3 = certify(&rho, &catalog_joint(RelationKind::Spin3, one, one)?)?;
    let l2 = certify(&rho, &catalog_joint(RelationKind::Spin2N3, one, one)?)?;
    Ok(DecoherenceAnalysis {
        c_l3: closed_form::decoherence_c3(p_d),
        c_l2: closed_form::decoherence_c2(p_d),
        c_l3_certified: l3.relative_violation,
        c_l2_certified: l2.relative_violation,
        x_uncertainty: l3.per_component[0],
    })
}
