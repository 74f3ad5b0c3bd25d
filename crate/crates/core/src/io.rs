//! JSON file formats for states and operator sets.
//!
//! State file: `{"dims": [dA] | [dA, dB], "matrix": [[[re, im], ...], ...]}`,
//! full matrix, reals written with 17 significant digits.
//!
//! Operator file: `{"label": "...", "operators": [matrix, ...]}`, optionally
//! with `"bound"` and `"provenance"` to describe a certified relation.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::family::format_real;
use crate::linalg::ComplexMatrix;
use crate::spin_ops::OperatorSet;
use crate::states::DensityMatrix;
use crate::tolerance::Tolerances;
use crate::uncertainty::{Provenance, UncertaintyRelation};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dims: Vec<usize>,
    matrix: RawMatrix,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorFile {
    #[serde(default)]
    label: Option<String>,
    operators: Vec<RawMatrix>,
    #[serde(default)]
    bound: Option<f64>,
    #[serde(default)]
    provenance: Option<String>,
}

fn to_matrix(raw: RawMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::from_rows(
        raw.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect(),
    )
}

fn write_matrix(out: &mut String, m: &ComplexMatrix, indent: &str) {
    out.push_str("[\n");
    for (i, row) in m.rows().enumerate() {
        let entries: Vec<String> = row
            .iter()
            .map(|z| format!("[{}, {}]", format_real(z.re), format_real(z.im)))
            .collect();
        let sep = if i + 1 == m.dim() { "" } else { "," };
        let _ = writeln!(out, "{indent}  [{}]{sep}", entries.join(", "));
    }
    let _ = write!(out, "{indent}]");
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    let dims: Vec<String> = rho.dims().iter().map(|d| d.to_string()).collect();
    let mut out = format!("{{\n  \"dims\": [{}],\n  \"matrix\": ", dims.join(", "));
    write_matrix(&mut out, rho.matrix(), "  ");
    out.push_str("\n}\n");
    out
}

/// Parses a state file and validates it with `tol`.
pub fn state_from_json(text: &str, tol: &Tolerances) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    DensityMatrix::validate_with(to_matrix(file.matrix)?, &file.dims, tol)
}

pub fn operators_to_json(set: &OperatorSet, bound: Option<(f64, Provenance)>) -> String {
    let mut out = format!(
        "{{\n  \"label\": {},\n",
        serde_json::Value::from(set.label())
    );
    if let Some((b, p)) = bound {
        let _ = writeln!(out, "  \"bound\": {},", format_real(b));
        let _ = writeln!(out, "  \"provenance\": \"{}\",", p.as_str());
    }
    out.push_str("  \"operators\": [\n");
    for (k, op) in set.operators().iter().enumerate() {
        out.push_str("    ");
        write_matrix(&mut out, op, "    ");
        out.push_str(if k + 1 == set.len() { "\n" } else { ",\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

fn parse_operator_file(text: &str) -> Result<(OperatorSet, Option<f64>, Option<String>)> {
    let file: OperatorFile =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let ops = file
        .operators
        .into_iter()
        .map(to_matrix)
        .collect::<Result<Vec<_>>>()?;
    let set = OperatorSet::new(file.label.unwrap_or_else(|| "custom".into()), ops)?;
    Ok((set, file.bound, file.provenance))
}

pub fn operators_from_json(text: &str) -> Result<OperatorSet> {
    Ok(parse_operator_file(text)?.0)
}

/// Operator file carrying a bound; provenance defaults to "supplied".
pub fn relation_from_json(text: &str) -> Result<UncertaintyRelation> {
    let (set, bound, provenance) = parse_operator_file(text)?;
    let bound = bound.ok_or_else(|| Error::Format("relation file has no \"bound\"".into()))?;
    let provenance = match provenance {
        Some(p) => p.parse()?,
        None => Provenance::Supplied,
    };
    UncertaintyRelation::new(set, bound, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_ops::{spin_components, SpinQuantum};
    use crate::states::{bell_mixture, singlet_state};

    #[test]
    fn state_round_trip_is_exact() {
        for rho in [
            singlet_state(SpinQuantum::from_two_l(2)).unwrap(),
            bell_mixture(0.8, 0.1, 0.05, 0.05).unwrap(),
        ] {
            let text = state_to_json(&rho);
            let back = state_from_json(&text, &Tolerances::default()).unwrap();
            assert_eq!(back, rho);
            assert_eq!(back.digest(), rho.digest());
        }
    }

    #[test]
    fn writer_emits_seventeen_digits() {
        let text = state_to_json(&bell_mixture(1.0, 0.0, 0.0, 0.0).unwrap());
        assert!(
            text.contains("5.0000000000000011e-1")
                || text.contains("4.9999999999999989e-1")
                || text.contains("5.0000000000000000e-1")
        );
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dims"], serde_json::json!([2, 2]));
        assert_eq!(v["matrix"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn malformed_inputs() {
        let tol = Tolerances::default();
        assert!(matches!(state_from_json("{", &tol), Err(Error::Format(_))));
        assert!(matches!(
            state_from_json(r#"{"dims":[2],"matrix":[[[1,0]]]}"#, &tol),
            Err(Error::DimMismatch { .. })
        ));
        assert!(matches!(
            state_from_json(r#"{"dims":[1],"matrix":[[[1,0]]],"extra":1}"#, &tol),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            state_from_json(
                r#"{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[-0.5,0]]]}"#,
                &tol
            ),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn operator_and_relation_files() {
        let set = spin_components(SpinQuantum::from_two_l(2));
        let back = operators_from_json(&operators_to_json(&set, None)).unwrap();
        assert_eq!(back, set);
        let rel = relation_from_json(&operators_to_json(
            &set,
            Some((1.0, Provenance::NumericallyCertified)),
        ))
        .unwrap();
        assert_eq!(rel.bound, 1.0);
        assert_eq!(rel.provenance, Provenance::NumericallyCertified);
        assert!(relation_from_json(&operators_to_json(&set, None)).is_err());
        let bad = r#"{"operators":[[[[0,0],[1,0]],[[0,0],[0,0]]]]}"#;
        assert!(matches!(
            operators_from_json(bad),
            Err(Error::NotHermitian { .. })
        ));
    }
}
