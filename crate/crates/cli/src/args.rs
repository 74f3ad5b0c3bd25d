use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lurcert::RelationKind;

/// Entanglement screening with local sum-uncertainty relations.
///
/// Exit status: 0 success, 3 entangled verdict (certify), 1 usage error,
/// 2 validation, parse or I/O error. Set LURCERT_VALIDATION_TOL to loosen
/// the tolerances applied to input matrices.
#[derive(Debug, Parser)]
#[command(name = "lurcert", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify a two-party state against a local uncertainty relation.
    Certify(CertifyArgs),
    /// Print a catalog bound, optionally writing it as a relation file.
    Bound(BoundArgs),
    /// Minimize the sum uncertainty of an operator set over all states.
    SearchBound(SearchArgs),
    /// Scan a model state family and write a CSV curve.
    Family(FamilyArgs),
    /// Write a model state to a JSON state file.
    StateGen(StateGenArgs),
}

/// Catalog kind or `file:<path>` pointing at a relation file.
#[derive(Debug, Clone)]
pub enum RelationArg {
    Catalog(RelationKind),
    File(PathBuf),
}

fn parse_relation(s: &str) -> Result<RelationArg, String> {
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(RelationArg::File(path.into()));
    }
    s.parse()
        .map(RelationArg::Catalog)
        .map_err(|e: lurcert::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<RelationKind, String> {
    s.parse().map_err(|e: lurcert::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// JSON state file with dims [dA, dB].
    #[arg(long)]
    pub state: PathBuf,
    /// l3, s3, l2n2, s2n2, l2n3, s2n3 or file:<relation.json>.
    #[arg(long, value_parser = parse_relation)]
    pub relation: RelationArg,
    /// Also write the certificate as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_parser = parse_kind)]
    pub relation: RelationKind,
    /// Twice the spin quantum number (photon number for Stokes kinds).
    #[arg(long)]
    pub two_l: u32,
    /// Write the relation (operators and bound) to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Operator set for `search-bound`.
#[derive(Debug, Clone)]
pub enum SetSpec {
    /// Spin components by letter, e.g. `spin:xy`.
    Spin(Vec<usize>),
    /// Stokes components by index, e.g. `stokes:12`.
    Stokes(Vec<usize>),
    File(PathBuf),
}

fn parse_components(spec: &str, letters: &[char; 3]) -> Result<Vec<usize>, String> {
    if spec.is_empty() {
        return Ok(vec![0, 1, 2]);
    }
    let mut picked = Vec::new();
    for ch in spec.chars() {
        let k = letters
            .iter()
            .position(|&c| c == ch)
            .ok_or_else(|| format!("unknown component {ch:?}"))?;
        if picked.contains(&k) {
            return Err(format!("component {ch:?} listed twice"));
        }
        picked.push(k);
    }
    Ok(picked)
}

fn parse_set(s: &str) -> Result<SetSpec, String> {
    let (family, rest) = s.split_once(':').unwrap_or((s, ""));
    match family {
        "spin" => parse_components(rest, &['x', 'y', 'z']).map(SetSpec::Spin),
        "stokes" => parse_components(rest, &['1', '2', '3']).map(SetSpec::Stokes),
        "file" if !rest.is_empty() => Ok(SetSpec::File(rest.into())),
        _ => Err(format!(
            "set {s:?} must be spin[:xyz], stokes[:123] or file:<path>"
        )),
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// spin[:xyz], stokes[:123] or file:<operators.json>.
    #[arg(long, value_parser = parse_set)]
    pub set: SetSpec,
    /// Twice the spin quantum number; required for builtin sets.
    #[arg(long)]
    pub two_l: Option<u32>,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the minimizing state to this file.
    #[arg(long)]
    pub emit_state: Option<PathBuf>,
    /// Write the set with its numerically certified bound to this file.
    #[arg(long)]
    pub emit_bound: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyKind {
    White,
    Xdecoherence,
    Bell,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub kind: FamilyKind,
    /// Parameter grid start:stop:step (inclusive).
    #[arg(long)]
    pub grid: String,
    #[arg(long, value_parser = parse_kind)]
    pub relation: RelationKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Spin of the white-noise family, as 2l.
    #[arg(long, default_value_t = 2)]
    pub two_l: u32,
    /// Relative triplet weights for the Bell family, e.g. 1,0,0.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.0, 0.0], allow_negative_numbers = true)]
    pub split: Vec<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StateKind {
    Singlet,
    Eq10,
    White,
    Xdecoherence,
    Bell,
}

#[derive(Debug, Args)]
pub struct StateGenArgs {
    #[arg(long, value_enum)]
    pub kind: StateKind,
    /// 2l for singlet and white.
    #[arg(long, default_value_t = 2)]
    pub two_l: u32,
    /// Phase of the squeezed spin-1 state (kind eq10).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Noise weight for white and xdecoherence.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Bell weights p_S,p_1,p_2,p_3.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}
