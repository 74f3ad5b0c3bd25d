use std::fs;
use std::path::Path;

use lurcert::bound_search::{minimize_sum_uncertainty, SearchConfig, REFUTATION_MARGIN};
use lurcert::family::{parse_grid, rows_to_csv, scan_family, Family};
use lurcert::io::{
    operators_from_json, operators_to_json, relation_from_json, state_from_json, state_to_json,
};
use lurcert::lur::{catalog_joint, certify, joint_from_relations};
use lurcert::spin_ops::{spin_components, stokes_components};
use lurcert::states::{
    bell_mixture, min_uncertainty_state_n3, singlet_state, white_noise_mixture,
    x_decoherence_mixture,
};
use lurcert::uncertainty::catalog_bound;
use lurcert::{DensityMatrix, OperatorSet, Provenance, SpinQuantum, Tolerances};

use crate::args::{
    BoundArgs, CertifyArgs, FamilyArgs, FamilyKind, RelationArg, SearchArgs, SetSpec, StateGenArgs,
    StateKind,
};
use crate::failure::{Failure, Outcome};

/// Below this the set shares an eigenstate for all practical purposes.
const COMMON_EIGENSTATE: f64 = 1e-9;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

pub fn certify_cmd(args: &CertifyArgs) -> Result<Outcome, Failure> {
    let tol = Tolerances::from_env();
    let rho = state_from_json(&read(&args.state)?, &tol)?;
    let [da, db] = match *rho.dims() {
        [a, b] => [a, b],
        _ => {
            return Err(Failure::validation(
                "E_SHAPE",
                format!(
                    "certify needs a two-party state, file has dims {:?}",
                    rho.dims()
                ),
            ))
        }
    };
    let joint = match &args.relation {
        RelationArg::Catalog(kind) => catalog_joint(
            *kind,
            SpinQuantum::from_dim(da)?,
            SpinQuantum::from_dim(db)?,
        )?,
        RelationArg::File(path) => {
            let rel = relation_from_json(&read(path)?)?;
            joint_from_relations(&rel, &rel)?
        }
    };
    let cert = certify(&rho, &joint)?;

    println!("relation            {}", cert.relation);
    for (k, v) in cert.per_component.iter().enumerate() {
        println!("component {:<9} {v:.12}", k + 1);
    }
    println!("total               {:.12}", cert.total);
    println!("local limit         {:.12}", cert.local_limit);
    println!("C                   {:.12}", cert.relative_violation);
    println!(
        "provenance          {} / {}",
        cert.provenance[0], cert.provenance[1]
    );
    println!("verdict             {}", cert.verdict());
    println!("state digest        {}", cert.state_digest);
    if let Some(path) = &args.json {
        write(path, &(cert.to_json() + "\n"))?;
    }
    Ok(if cert.entangled {
        Outcome::Entangled
    } else {
        Outcome::Ok
    })
}

pub fn bound_cmd(args: &BoundArgs) -> Result<Outcome, Failure> {
    let l = SpinQuantum::from_two_l(args.two_l);
    let rel = catalog_bound(args.relation, l)?;
    let exact = rel.exact.map(|r| r.to_string()).unwrap_or_default();
    println!("relation    {} ({})", args.relation, rel.set.label());
    println!("bound       {exact} = {:.17e}", rel.bound);
    println!("provenance  {}", rel.provenance.as_str());
    if let Some(path) = &args.out {
        write(
            path,
            &operators_to_json(&rel.set, Some((rel.bound, rel.provenance))),
        )?;
    }
    Ok(Outcome::Ok)
}

fn builtin_set(spec: &SetSpec, two_l: Option<u32>) -> Result<OperatorSet, Failure> {
    let need_l =
        || two_l.ok_or_else(|| Failure::usage("--two-l is required for builtin operator sets"));
    match spec {
        SetSpec::Spin(picked) => {
            let l = SpinQuantum::from_two_l(need_l()?);
            let names: String = picked.iter().map(|&k| ['x', 'y', 'z'][k]).collect();
            Ok(spin_components(l).select(picked, format!("spin l={l} {{{names}}}"))?)
        }
        SetSpec::Stokes(picked) => {
            let n = need_l()?;
            let names: String = picked.iter().map(|&k| ['1', '2', '3'][k]).collect();
            Ok(stokes_components(n).select(picked, format!("stokes n={n} {{{names}}}"))?)
        }
        SetSpec::File(path) => Ok(operators_from_json(&read(path)?)?),
    }
}

pub fn search_cmd(args: &SearchArgs) -> Result<Outcome, Failure> {
    let set = builtin_set(&args.set, args.two_l)?;
    let mut config = SearchConfig {
        restarts: args.restarts,
        ..SearchConfig::default()
    };
    if let Some(seed) = args.seed {
        config.rng_seed = seed;
    }
    let found = minimize_sum_uncertainty(&set, &config)?;

    println!("set            {}", set.label());
    println!("dimension      {}", set.dim());
    println!("minimum        {:.17e}", found.minimum);
    println!(
        "agreement      {}/{} restarts within tolerance",
        found.restarts_agreeing,
        found.restarts.len()
    );
    println!(
        "converged      {}/{} restarts",
        found.converged_count(),
        found.restarts.len()
    );
    println!(
        "confidence     {}",
        if found.low_confidence() { "LOW" } else { "ok" }
    );
    println!("best restart   {}", found.best_restart);
    if found.minimum.abs() < COMMON_EIGENSTATE {
        println!("note           common eigenstate exists");
    }
    if let Some(path) = &args.emit_state {
        let d = set.dim();
        write(path, &state_to_json(&found.argmin.to_density(&[d])))?;
    }
    if let Some(path) = &args.emit_bound {
        if found.low_confidence() {
            eprintln!("warning: writing a bound from a low-confidence search");
        }
        // Back off by the refutation margin so the bound stays on the safe side.
        let bound = (found.minimum - REFUTATION_MARGIN).max(0.0);
        write(
            path,
            &operators_to_json(&set, Some((bound, Provenance::NumericallyCertified))),
        )?;
    }
    Ok(Outcome::Ok)
}

pub fn family_cmd(args: &FamilyArgs) -> Result<Outcome, Failure> {
    let grid = parse_grid(&args.grid).map_err(|e| Failure::usage(e.to_string()))?;
    let family = match args.kind {
        FamilyKind::White => Family::White {
            l: SpinQuantum::from_two_l(args.two_l),
        },
        FamilyKind::Xdecoherence => Family::XDecoherence,
        FamilyKind::Bell => {
            let split: [f64; 3] = args.split.as_slice().try_into().map_err(|_| {
                Failure::usage(format!("--split takes 3 weights, got {}", args.split.len()))
            })?;
            Family::Bell { split }
        }
    };
    let rows = scan_family(family, args.relation, &grid)?;
    write(&args.out, &rows_to_csv(&rows))?;
    let worst = rows
        .iter()
        .filter_map(|r| r.abs_difference())
        .fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |a| a.max(d)))
        });
    println!("rows           {}", rows.len());
    match worst {
        Some(d) => println!("max |C - closed form|  {d:.3e}"),
        None => println!("closed form    none for this family and relation"),
    }
    Ok(Outcome::Ok)
}

fn require_p(p: Option<f64>) -> Result<f64, Failure> {
    p.ok_or_else(|| Failure::usage("--p is required for this state kind"))
}

pub fn state_gen_cmd(args: &StateGenArgs) -> Result<Outcome, Failure> {
    let l = SpinQuantum::from_two_l(args.two_l);
    let rho: DensityMatrix = match args.kind {
        StateKind::Singlet => singlet_state(l)?,
        StateKind::Eq10 => {
            let psi = min_uncertainty_state_n3(args.phi);
            let amps: Vec<String> = psi
                .amplitudes()
                .iter()
                .map(|z| format!("{:.12}{:+.12}i", z.re, z.im))
                .collect();
            println!("amplitudes (m = +1, 0, -1): {}", amps.join(", "));
            psi.to_density(&[3])
        }
        StateKind::White => white_noise_mixture(l, require_p(args.p)?)?,
        StateKind::Xdecoherence => x_decoherence_mixture(require_p(args.p)?)?,
        StateKind::Bell => {
            let w = args
                .weights
                .as_deref()
                .ok_or_else(|| Failure::usage("--weights p_S,p_1,p_2,p_3 is required for bell"))?;
            let [ps, p1, p2, p3] = <[f64; 4]>::try_from(w).map_err(|_| {
                Failure::usage(format!("--weights takes 4 values, got {}", w.len()))
            })?;
            bell_mixture(ps, p1, p2, p3)?
        }
    };
    write(&args.out, &state_to_json(&rho))?;
    println!(
        "wrote {} (dims {:?}, digest {})",
        args.out.display(),
        rho.dims(),
        rho.digest()
    );
    Ok(Outcome::Ok)
}
