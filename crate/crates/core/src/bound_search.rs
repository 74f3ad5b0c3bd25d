//! Numerical certification of sum-uncertainty limits.
//!
//! The sum of variances is concave in the density matrix, so its minimum over
//! all states is attained on a pure state. The search therefore runs on the
//! unit sphere of state vectors: projected gradient descent with backtracking,
//! restarted from Haar-random points. [`brute_force_minimum`] is an
//! independent exhaustive-grid oracle for dimensions up to three.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::random;
use crate::spin_ops::OperatorSet;
use crate::states::PureState;

/// Restarts within this distance of the best value count as agreeing.
pub const AGREEMENT_TOLERANCE: f64 = 1e-8;
/// A claimed bound is refuted only if beaten by more than this.
pub const REFUTATION_MARGIN: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// First trial step of every backtracking line search.
    pub initial_step: f64,
    /// Line search gives up below this step.
    pub min_step: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Stop when the objective fell by less than `stall_decrease` over
    /// the last `stall_window` iterations.
    pub stall_window: usize,
    pub stall_decrease: f64,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 10_000,
            gradient_tolerance: 1e-10,
            initial_step: 0.5,
            min_step: 1e-18,
            armijo: 1e-4,
            stall_window: 50,
            stall_decrease: 1e-14,
            rng_seed: 0x5eed,
        }
    }
}

impl SearchConfig {
    fn check(&self) -> Result<()> {
        let positive = [
            self.gradient_tolerance,
            self.initial_step,
            self.min_step,
            self.armijo,
            self.stall_decrease,
        ];
        if self.restarts == 0
            || self.max_iterations == 0
            || self.stall_window == 0
            || positive.iter().any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "search configuration must be strictly positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradientTolerance,
    Stalled,
    /// No step down to `min_step` decreased the objective.
    LineSearchExhausted,
    MaxIterations,
}

impl StopReason {
    pub fn converged(self) -> bool {
        !matches!(self, StopReason::MaxIterations)
    }
}

/// Outcome of a single descent from one starting point.
#[derive(Debug, Clone)]
pub struct Descent {
    pub state: PureState,
    pub value: f64,
    pub iterations: usize,
    pub stop: StopReason,
    /// Objective after every accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartSummary {
    pub index: usize,
    pub start_value: f64,
    pub value: f64,
    pub iterations: usize,
    pub stop: StopReason,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub minimum: f64,
    pub argmin: PureState,
    pub restarts_agreeing: usize,
    pub restarts: Vec<RestartSummary>,
    pub best_restart: usize,
}

impl SearchResult {
    /// At least one restart converged.
    pub fn converged(&self) -> bool {
        self.restarts.iter().any(|r| r.stop.converged())
    }

    pub fn converged_count(&self) -> usize {
        self.restarts.iter().filter(|r| r.stop.converged()).count()
    }

    /// Fewer than a quarter of the restarts reached the reported minimum.
    pub fn low_confidence(&self) -> bool {
        self.restarts_agreeing * 4 < self.restarts.len()
    }
}

/// `f(psi) = sum_i <A_i^2> - <A_i>^2` with the squares precomputed.
struct Objective {
    ops: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl Objective {
    fn new(set: &OperatorSet) -> Result<Self> {
        let ops = set
            .operators()
            .iter()
            .map(|a| Ok((a.clone(), a.multiply(a)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ops })
    }

    fn value(&self, psi: &[Complex64]) -> f64 {
        self.ops
            .iter()
            .map(|(a, a2)| {
                let mean = linalg::inner(psi, &a.apply(psi).expect("dim")).re;
                let second = linalg::inner(psi, &a2.apply(psi).expect("dim")).re;
                second - mean * mean
            })
            .sum()
    }

    /// Value and Euclidean gradient `sum_i 2 (A_i^2 psi - 2 <A_i> A_i psi)`.
    fn value_and_gradient(&self, psi: &[Complex64]) -> (f64, Vec<Complex64>) {
        let mut value = 0.0;
        let mut grad = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (a, a2) in &self.ops {
            let a_psi = a.apply(psi).expect("dim");
            let a2_psi = a2.apply(psi).expect("dim");
            let mean = linalg::inner(psi, &a_psi).re;
            let second = linalg::inner(psi, &a2_psi).re;
            value += second - mean * mean;
            for ((g, x2), x1) in grad.iter_mut().zip(&a2_psi).zip(&a_psi) {
                *g += (x2 - x1 * (2.0 * mean)) * 2.0;
            }
        }
        (value, grad)
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = linalg::norm(v);
    v.iter_mut().for_each(|z| *z /= n);
}

fn descend_objective(objective: &Objective, start: &PureState, config: &SearchConfig) -> Descent {
    let mut psi = start.amplitudes().to_vec();
    let mut history = Vec::new();
    let mut iterations = 0;
    let stop = loop {
        let (value, grad) = objective.value_and_gradient(&psi);
        if history.is_empty() {
            history.push(value);
        }
        // Tangent-space projection on the real sphere S^{2N-1}.
        let radial = linalg::inner(&psi, &grad).re;
        let tangent: Vec<Complex64> = grad.iter().zip(&psi).map(|(g, p)| g - p * radial).collect();
        let gnorm_sq: f64 = tangent.iter().map(|z| z.norm_sqr()).sum();
        if gnorm_sq.sqrt() < config.gradient_tolerance {
            break StopReason::GradientTolerance;
        }
        if iterations == config.max_iterations {
            break StopReason::MaxIterations;
        }
        let n = history.len();
        if n > config.stall_window
            && history[n - 1 - config.stall_window] - history[n - 1] < config.stall_decrease
        {
            break StopReason::Stalled;
        }

        let mut step = config.initial_step;
        let accepted = loop {
            let mut trial: Vec<Complex64> = psi
                .iter()
                .zip(&tangent)
                .map(|(p, g)| p - g * step)
                .collect();
            normalize(&mut trial);
            let trial_value = objective.value(&trial);
            if trial_value <= value - config.armijo * step * gnorm_sq {
                break Some((trial, trial_value));
            }
            step *= 0.5;
            if step < config.min_step {
                break None;
            }
        };
        match accepted {
            Some((next, next_value)) => {
                psi = next;
                history.push(next_value);
                iterations += 1;
            }
            None => break StopReason::LineSearchExhausted,
        }
    };
    let value = objective.value(&psi);
    Descent {
        state: PureState::normalized(psi).expect("iterate stays on the sphere"),
        value,
        iterations,
        stop,
        history,
    }
}

/// Runs one projected-gradient descent from `start`.
pub fn descend(set: &OperatorSet, start: &PureState, config: &SearchConfig) -> Result<Descent> {
    config.check()?;
    if start.dim() != set.dim() {
        return Err(Error::DimMismatch {
            expected: set.dim(),
            found: start.dim(),
        });
    }
    Ok(descend_objective(&Objective::new(set)?, start, config))
}

/// Starting point of restart `index`; its generator is the ChaCha stream
/// `index` under `seed`, so restarts are independent of scheduling.
pub fn restart_start(seed: u64, index: usize, dim: usize) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    random::pure_state(&mut rng, dim)
}

/// Global minimum of the sum uncertainty of `set` over pure states.
pub fn minimize_sum_uncertainty(set: &OperatorSet, config: &SearchConfig) -> Result<SearchResult> {
    config.check()?;
    let objective = Objective::new(set)?;
    let runs: Vec<(RestartSummary, Descent)> = (0..config.restarts)
        .into_par_iter()
        .map(|index| {
            let start = restart_start(config.rng_seed, index, set.dim());
            let d = descend_objective(&objective, &start, config);
            let summary = RestartSummary {
                index,
                start_value: d.history[0],
                value: d.value,
                iterations: d.iterations,
                stop: d.stop,
            };
            (summary, d)
        })
        .collect();

    let (best_restart, best) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.1.value.total_cmp(&b.1.value).then(i.cmp(j)))
        .map(|(i, r)| (i, &r.1))
        .expect("at least one restart");
    let minimum = best.value;
    let argmin = best.state.with_canonical_phase();
    let restarts_agreeing = runs
        .iter()
        .filter(|(s, _)| s.value <= minimum + AGREEMENT_TOLERANCE)
        .count();
    Ok(SearchResult {
        minimum,
        argmin,
        restarts_agreeing,
        restarts: runs.into_iter().map(|(s, _)| s).collect(),
        best_restart,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Supported,
    Refuted,
}

#[derive(Debug, Clone)]
pub struct BoundCertification {
    pub verdict: Verdict,
    pub claimed: f64,
    pub achieved: f64,
    /// State beating the claim, present when refuted.
    pub witness: Option<PureState>,
    pub search: SearchResult,
}

/// Tests a claimed bound against the global search. "Supported" is
/// numerical evidence, not a proof.
pub fn certify_bound(
    set: &OperatorSet,
    claimed: f64,
    config: &SearchConfig,
) -> Result<BoundCertification> {
    if !claimed.is_finite() || claimed < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "claimed bound {claimed} must be >= 0"
        )));
    }
    let search = minimize_sum_uncertainty(set, config)?;
    let refuted = search.minimum < claimed - REFUTATION_MARGIN;
    Ok(BoundCertification {
        verdict: if refuted {
            Verdict::Refuted
        } else {
            Verdict::Supported
        },
        claimed,
        achieved: search.minimum,
        witness: refuted.then(|| search.argmin.clone()),
        search,
    })
}

#[derive(Debug, Clone)]
pub struct GridMinimum {
    pub value: f64,
    pub state: PureState,
    pub points: usize,
}

/// `sum_i ||A_i psi||^2 - <psi|A_i|psi>^2`; deliberately avoids the squared
/// operators the descent uses.
fn grid_objective(ops: &[ComplexMatrix], psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let mut total = 0.0;
    for a in ops {
        let mut second = 0.0;
        let mut mean = 0.0;
        for i in 0..n {
            let row = a.row(i);
            let mut ai = Complex64::new(0.0, 0.0);
            for j in 0..n {
                ai += row[j] * psi[j];
            }
            second += ai.norm_sqr();
            mean += (psi[i].conj() * ai).re;
        }
        total += second - mean * mean;
    }
    total
}

/// Uniform grid over `[0, span]` with spacing at most `resolution`.
fn grid(span: f64, resolution: f64, closed: bool) -> Vec<f64> {
    let steps = (span / resolution).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let count = if closed { steps + 1 } else { steps };
    (0..count).map(|k| k as f64 * h).collect()
}

/// Exhaustive minimum over a grid of normalized vectors (dim <= 3):
/// `(cos t1, sin t1 cos t2 e^{i p1}, sin t1 sin t2 e^{i p2})` with the
/// global phase removed, each angle stepped by at most `resolution`.
pub fn brute_force_minimum(set: &OperatorSet, resolution: f64) -> Result<GridMinimum> {
    if !(resolution.is_finite() && resolution > 0.0 && resolution <= FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {resolution} must lie in (0, pi/2]"
        )));
    }
    let ops = set.operators();
    let c = |re: f64| Complex64::new(re, 0.0);
    let best = match set.dim() {
        1 => (grid_objective(ops, &[c(1.0)]), vec![c(1.0)], 1),
        2 => {
            let thetas = grid(FRAC_PI_2, resolution, true);
            let phis = grid(2.0 * PI, resolution, false);
            let mut best = (f64::INFINITY, vec![], 0);
            for &t in &thetas {
                for &p in &phis {
                    let psi = [c(t.cos()), Complex64::from_polar(t.sin(), p)];
                    let v = grid_objective(ops, &psi);
                    if v < best.0 {
                        best = (v, psi.to_vec(), 0);
                    }
                }
            }
            best.2 = thetas.len() * phis.len();
            best
        }
        3 => {
            let thetas = grid(FRAC_PI_2, resolution, true);
            let phases: Vec<Complex64> = grid(2.0 * PI, resolution, false)
                .into_iter()
                .map(|p| Complex64::from_polar(1.0, p))
                .collect();
            let nt = thetas.len();
            let (value, psi) = (0..nt * nt)
                .into_par_iter()
                .map(|k| {
                    let (t1, t2) = (thetas[k / nt], thetas[k % nt]);
                    let r0 = t1.cos();
                    let r1 = t1.sin() * t2.cos();
                    let r2 = t1.sin() * t2.sin();
                    let mut best = (f64::INFINITY, [c(0.0); 3]);
                    for e1 in &phases {
                        for e2 in &phases {
                            let psi = [c(r0), e1 * r1, e2 * r2];
                            let v = grid_objective(ops, &psi);
                            if v < best.0 {
                                best = (v, psi);
                            }
                        }
                    }
                    (k, best)
                })
                .min_by(|(i, a), (j, b)| a.0.total_cmp(&b.0).then(i.cmp(j)))
                .map(|(_, b)| b)
                .expect("nonempty grid");
            (value, psi.to_vec(), nt * nt * phases.len() * phases.len())
        }
        d => {
            return Err(Error::InvalidParameter(format!(
                "brute-force grid supports dimension <= 3, got {d}"
            )))
        }
    };
    Ok(GridMinimum {
        value: best.0,
        state: PureState::normalized(best.1)?,
        points: best.2,
    })
}

/// Scale of the grid discretization error: `resolution^2 * sum_i ||A_i||^2`
/// with `||.||` the spectral norm.
pub fn grid_error_bound(set: &OperatorSet, resolution: f64) -> Result<f64> {
    let mut scale = 0.0;
    for a in set.operators() {
        let eig = a.hermitian_eigen()?;
        let norm = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        scale += norm * norm;
    }
    Ok(resolution * resolution * scale)
}
