//! Parameter scans over the model state families, with closed-form
//! comparison columns where one exists.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lur::{catalog_joint, certify, closed_form};
use crate::spin_ops::SpinQuantum;
use crate::states::{bell_mixture, white_noise_mixture, x_decoherence_mixture, DensityMatrix};
use crate::uncertainty::RelationKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Singlet of spin `l` mixed with white noise; parameter `p_W`.
    White { l: SpinQuantum },
    /// Spin-1 singlet dephased in the L_x basis; parameter `p_D`.
    XDecoherence,
    /// Bell mixture with singlet weight `p_S`; the remaining weight is
    /// shared among the triplets in proportion to `split`.
    Bell { split: [f64; 3] },
}

impl Family {
    pub fn spin(&self) -> SpinQuantum {
        match self {
            Family::White { l } => *l,
            Family::XDecoherence => SpinQuantum::from_two_l(2),
            Family::Bell { .. } => SpinQuantum::from_two_l(1),
        }
    }

    fn bell_weights(split: [f64; 3], p_s: f64) -> Result<[f64; 4]> {
        let total: f64 = split.iter().sum();
        if split.iter().any(|w| !w.is_finite() || *w < 0.0) || total <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "triplet split {split:?} must be nonnegative with a positive sum"
            )));
        }
        let rest = 1.0 - p_s;
        Ok([
            p_s,
            rest * split[0] / total,
            rest * split[1] / total,
            rest * split[2] / total,
        ])
    }

    pub fn state(&self, p: f64) -> Result<DensityMatrix> {
        match *self {
            Family::White { l } => white_noise_mixture(l, p),
            Family::XDecoherence => x_decoherence_mixture(p),
            Family::Bell { split } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!(
                        "p_S = {p} is outside [0, 1]"
                    )));
                }
                let [ps, p1, p2, p3] = Self::bell_weights(split, p)?;
                bell_mixture(ps, p1, p2, p3)
            }
        }
    }

    /// Closed-form relative violation, when the family has one for `kind`.
    pub fn closed_form(&self, kind: RelationKind, p: f64) -> Option<f64> {
        use RelationKind::*;
        match (*self, kind) {
            (Family::White { l }, Spin3 | Stokes3) => Some(closed_form::white_noise_c3(l.dim(), p)),
            (Family::White { l }, Spin2N3 | Stokes2N3) if l.dim() == 3 => {
                Some(closed_form::white_noise_c2_n3(p))
            }
            (Family::XDecoherence, Spin3 | Stokes3) => Some(closed_form::decoherence_c3(p)),
            (Family::XDecoherence, Spin2N3 | Stokes2N3) => Some(closed_form::decoherence_c2(p)),
            (Family::Bell { .. }, Spin3 | Stokes3) => Some(closed_form::bell_c_s3(p)),
            (Family::Bell { split }, Spin2N2 | Stokes2N2) => {
                let w = Self::bell_weights(split, p).ok()?;
                Some(closed_form::bell_c_s2(p, w[3]))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    pub parameter: f64,
    pub total: f64,
    pub local_limit: f64,
    pub relative_violation: f64,
    pub closed_form: Option<f64>,
}

impl FamilyRow {
    pub fn abs_difference(&self) -> Option<f64> {
        self.closed_form
            .map(|c| (c - self.relative_violation).abs())
    }
}

/// Certifies every grid point; rows come back in grid order.
pub fn scan_family(family: Family, kind: RelationKind, grid: &[f64]) -> Result<Vec<FamilyRow>> {
    let l = family.spin();
    let joint = catalog_joint(kind, l, l)?;
    grid.par_iter()
        .map(|&p| {
            let cert = certify(&family.state(p)?, &joint)?;
            Ok(FamilyRow {
                parameter: p,
                total: cert.total,
                local_limit: cert.local_limit,
                relative_violation: cert.relative_violation,
                closed_form: family.closed_form(kind, p),
            })
        })
        .collect()
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("grid {spec:?} must be start:stop:step"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|k| {
            let p = start + k as f64 * step;
            if k == n && (p - stop).abs() < 1e-9 * step {
                stop
            } else {
                p
            }
        })
        .collect())
}

/// Full-precision scientific notation (17 significant digits).
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: &str = "parameter,total,local_limit,C,closed_form_C,abs_difference";

pub fn rows_to_csv(rows: &[FamilyRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_real(r.parameter),
            format_real(r.total),
            format_real(r.local_limit),
            format_real(r.relative_violation),
            opt(r.closed_form),
            opt(r.abs_difference()),
        );
    }
    out
}
