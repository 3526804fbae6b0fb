//! Numerical brackets for the incompatibility and error-disturbance
//! coefficients.
//!
//! The outer minimization over joint observables (or instruments) is
//! solved by an exchange scheme. Each round minimizes the worst error over
//! a finite atlas of pure states, which yields a certified lower bound, and
//! then searches all pure states for the worst error of the candidate,
//! which yields the upper estimate. The worst states found are added to
//! the atlas and the loop repeats until the bracket is narrow enough.

mod inner;
mod restricted;
mod space;

use std::io::Write;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::entropy::{divergence_finiteness, ExtendedReal};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::objects::{BiObservable, Instrument, MultiObservable, Observable, State};

pub use inner::max_error_over_states;

pub(crate) use inner::{eigen_seeds, fidelity, multistart, Pairs, SphereObjective};
use space::{Blocks, Space};

/// Step rule for the outer projected-gradient iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// Barzilai-Borwein steps with a nonmonotone line search on a
    /// log-sum-exp smoothing of the atlas maximum.
    Spectral,
    /// Plain projected subgradient with step c / sqrt(t).
    InverseSqrt { c: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub restarts: usize,
    pub inner_tol: f64,
    pub outer_tol: f64,
    pub max_exchange_rounds: usize,
    pub seed: u64,
    pub step_schedule: StepSchedule,
    pub iterations_per_round: usize,
    /// Largest inverse temperature of the smoothed maximum.
    pub smoothing: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            inner_tol: 1e-7,
            outer_tol: 1e-4,
            max_exchange_rounds: 200,
            seed: 0xC0FFEE,
            step_schedule: StepSchedule::Spectral,
            iterations_per_round: 2000,
            smoothing: 1e5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64, name: &str| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
            }
        };
        pos(self.inner_tol, "inner_tol")?;
        pos(self.outer_tol, "outer_tol")?;
        pos(self.smoothing, "smoothing")?;
        if self.max_exchange_rounds == 0 || self.iterations_per_round == 0 {
            return Err(Error::InvalidParameter("round and iteration limits must be positive".into()));
        }
        Ok(())
    }
}

/// Progress of one exchange round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub lower: f64,
    pub upper: f64,
    pub atlas_size: usize,
}

/// Result of a min-max solve: `lower` is certified, `upper` is the error of
/// the witness as found by the state search.
#[derive(Debug, Clone)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    /// Joint observable attaining `upper` (for error-disturbance runs, the
    /// sequential measurement of `witness_instrument`).
    pub witness_measurement: MultiObservable,
    pub witness_instrument: Option<Instrument>,
    /// State at which the witness has its largest error.
    pub worst_state: State,
    pub atlas: StateAtlas,
    pub rounds_used: usize,
    /// True when the round limit was hit before the bracket closed.
    pub saturated: bool,
    pub trace: Vec<RoundRecord>,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        self.lower - tol <= value && value <= self.upper + tol
    }

    pub fn witness_bi(&self) -> Option<BiObservable> {
        self.witness_measurement.to_bi().ok()
    }

    /// One JSON object per round.
    pub fn write_trace<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.trace {
            writeln!(out, "{}", serde_json::to_string(r).expect("plain record"))?;
        }
        Ok(())
    }
}

/// Pure states collected as worst cases during an exchange run.
#[derive(Debug, Clone, Default)]
pub struct StateAtlas {
    states: Vec<State>,
}

impl StateAtlas {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `s` after checking that it is rank one.
    pub fn push(&mut self, s: State) -> Result<()> {
        let vals = linalg::eigenvalues(s.matrix());
        let second = if vals.len() > 1 { vals[vals.len() - 2] } else { 0.0 };
        if second.abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("atlas state is not pure (second eigenvalue {second:e})")));
        }
        self.states.push(s);
        Ok(())
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

/// Runs `f` on a pool capped by ENTRIMUR_THREADS when that is set.
pub(crate) fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let pool = POOL.get_or_init(|| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var("ENTRIMUR_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
            b = b.num_threads(n.max(1));
        }
        b.build().expect("thread pool")
    });
    pool.install(f)
}

fn check_targets(targets: &[&Observable]) -> Result<usize> {
    let d = targets.first().ok_or_else(|| Error::InvalidParameter("no targets".into()))?.dim();
    for t in targets {
        if t.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: t.dim() });
        }
    }
    Ok(d)
}

struct Outcome {
    x: Blocks,
    lower: f64,
    upper: f64,
    worst: Vec<Complex64>,
    atlas: Vec<Vec<Complex64>>,
    rounds: usize,
    saturated: bool,
    trace: Vec<RoundRecord>,
}

fn round_seed(cfg: &SolverConfig, round: usize) -> u64 {
    cfg.seed ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn worst_case(space: &Space, targets: &[&Observable], x: &[ComplexMatrix], seeds: &[Vec<Complex64>], cfg: &SolverConfig, seed: u64) -> inner::InnerResult {
    let approx = space.approximations(x);
    let approx_refs: Vec<&Observable> = approx.iter().collect();
    let pairs = Pairs::new(targets, &approx_refs);
    let mut all = seeds.to_vec();
    let mats: Vec<&ComplexMatrix> = approx.iter().flat_map(|o| o.effects()).collect();
    all.extend(eigen_seeds(&mats));
    inner::maximize(&pairs, &all, cfg.restarts, seed, cfg.inner_tol)
}

/// Worst case of the candidate `x`. A candidate on the boundary of the
/// feasible set can have infinite error; then mixtures with the interior
/// centre are tried and the best finite one is returned, with the kernel
/// witness kept among the maxima.
fn evaluate_candidate(
    space: &Space,
    targets: &[&Observable],
    x: &[ComplexMatrix],
    seeds: &[Vec<Complex64>],
    cfg: &SolverConfig,
    seed: u64,
) -> (inner::InnerResult, Blocks) {
    let found = worst_case(space, targets, x, seeds, cfg, seed);
    if found.value.is_finite() {
        return (found, x.to_vec());
    }
    let centre = space.centre();
    let mut best: Option<(inner::InnerResult, Blocks)> = None;
    for w in [1e-9, 1e-7, 1e-5, 1e-3, 1e-2, 1e-1, 0.5] {
        let mixed: Blocks =
            x.iter().zip(&centre).map(|(a, b)| a * Complex64::new(1.0 - w, 0.0) + b * Complex64::new(w, 0.0)).collect();
        let r = worst_case(space, targets, &mixed, seeds, cfg, seed);
        if r.value.is_finite() && best.as_ref().is_none_or(|(b, _)| r.value < b.value) {
            best = Some((r, mixed));
        }
    }
    match best {
        Some((mut r, mixed)) => {
            r.maxima.insert(0, (f64::INFINITY, found.state));
            (r, mixed)
        }
        None => (found, x.to_vec()),
    }
}

fn exchange(space: &Space, targets: &[&Observable], cfg: &SolverConfig) -> Result<Outcome> {
    cfg.validate()?;
    let target_effects: Vec<Vec<ComplexMatrix>> = targets.iter().map(|t| t.effects().to_vec()).collect();
    let mut mats: Vec<&ComplexMatrix> = Vec::new();
    for t in targets {
        mats.extend(t.effects());
    }
    let base_seeds = eigen_seeds(&mats);
    let mut atlas: Vec<Vec<Complex64>> = Vec::new();
    for s in &base_seeds {
        if atlas.iter().all(|a| fidelity(a, s) < 1.0 - 1e-10) {
            atlas.push(s.clone());
        }
    }
    let mut x = space.centre();
    let mut best_x = x.clone();
    let mut lower: f64 = 0.0;
    let mut upper = f64::INFINITY;
    let mut worst = atlas[0].clone();
    let mut trace = Vec::new();
    let mut budget = cfg.iterations_per_round;
    let mut beta = cfg.smoothing;
    let mut saturated = true;
    let mut rounds = 0;
    for round in 1..=cfg.max_exchange_rounds {
        rounds = round;
        let probes: Vec<_> = atlas.iter().map(|s| space.probe(linalg::outer(s), &target_effects)).collect();
        x = restricted::solve(space, &probes, x, cfg.step_schedule, beta, budget);
        lower = lower.max(restricted::certificate(space, &probes, &x, beta));
        let mut seeds = base_seeds.clone();
        seeds.extend(atlas.iter().cloned());
        let (found, candidate) = evaluate_candidate(space, targets, &x, &seeds, cfg, round_seed(cfg, round));
        if found.value < upper {
            upper = found.value;
            best_x = candidate;
            worst = found.state.clone();
        }
        trace.push(RoundRecord { round, lower, upper, atlas_size: atlas.len() });
        if upper - lower <= cfg.outer_tol {
            saturated = false;
            break;
        }
        let mut added = 0;
        for (v, s) in &found.maxima {
            if added >= 4 || *v <= lower {
                break;
            }
            if atlas.iter().all(|a| fidelity(a, s) < 1.0 - 1e-9) {
                atlas.push(s.clone());
                added += 1;
            }
        }
        if added == 0 {
            budget = budget.saturating_mul(2).min(cfg.iterations_per_round * 16);
            beta *= 4.0;
        }
    }
    Ok(Outcome { x: best_x, lower, upper, worst, atlas, rounds, saturated, trace })
}

fn to_states(vs: &[Vec<Complex64>]) -> StateAtlas {
    StateAtlas { states: vs.iter().map(|v| State::pure(v).expect("unit vector")).collect() }
}

fn joint_from_blocks(targets: &[&Observable], x: Blocks) -> MultiObservable {
    let sets = targets.iter().map(|t| t.outcomes().to_vec()).collect();
    MultiObservable::from_parts_unchecked(targets[0].dim(), sets, x)
}

/// Bracket on inf over joint observables of the worst error against n targets.
pub fn icomp_multi(targets: &[&Observable], cfg: &SolverConfig) -> Result<Bracket> {
    let d = check_targets(targets)?;
    let space = Space::Joint { d, shape: targets.iter().map(|t| t.len()).collect() };
    let out = exchange(&space, targets, cfg)?;
    Ok(Bracket {
        lower: out.lower,
        upper: out.upper,
        witness_measurement: joint_from_blocks(targets, out.x),
        witness_instrument: None,
        worst_state: State::pure(&out.worst).expect("unit vector"),
        atlas: to_states(&out.atlas),
        rounds_used: out.rounds,
        saturated: out.saturated,
        trace: out.trace,
    })
}

/// Bracket on the incompatibility coefficient of (a, b).
pub fn icomp(a: &Observable, b: &Observable, cfg: &SolverConfig) -> Result<Bracket> {
    icomp_multi(&[a, b], cfg)
}

/// Bracket on the error-disturbance coefficient: measure `a` by an
/// instrument, then `b` on the output.
pub fn iad(a: &Observable, b: &Observable, cfg: &SolverConfig) -> Result<Bracket> {
    let d = check_targets(&[a, b])?;
    let space = Space::Instrument { d, n: a.len(), b: b.effects().to_vec() };
    let out = exchange(&space, &[a, b], cfg)?;
    let instrument = Instrument::from_parts_unchecked(d, d, a.outcomes().to_vec(), out.x);
    let seq = crate::objects::sequential_measurement(&instrument, b)?;
    Ok(Bracket {
        lower: out.lower,
        upper: out.upper,
        witness_measurement: seq.into_multi(),
        witness_instrument: Some(instrument),
        worst_state: State::pure(&out.worst).expect("unit vector"),
        atlas: to_states(&out.atlas),
        rounds_used: out.rounds,
        saturated: out.saturated,
        trace: out.trace,
    })
}

/// Largest error of a fixed joint observable against its targets, over pure states.
pub fn divergence(targets: &[&Observable], m: &MultiObservable, cfg: &SolverConfig) -> Result<(f64, State)> {
    if targets.len() != m.arity() {
        return Err(Error::OutcomeMismatch("target count differs from joint arity".into()));
    }
    let marg = m.marginals();
    let refs: Vec<&Observable> = marg.iter().collect();
    Ok(max_error_over_states(targets, &refs, cfg.restarts, cfg.seed, cfg.inner_tol))
}

/// Entropic divergence of `m` from (a, b), with a state attaining it. When
/// the divergence is infinite the state is a kernel witness.
pub fn max_over_states(
    a: &Observable,
    b: &Observable,
    m: &BiObservable,
    cfg: &SolverConfig,
) -> Result<(ExtendedReal, State)> {
    cfg.validate()?;
    let finite = divergence_finiteness(a, b, m)?;
    let (v, s) = divergence(&[a, b], m.as_multi(), cfg)?;
    if !finite {
        return Ok((ExtendedReal::Infinite, s));
    }
    Ok((ExtendedReal::from_f64(v), s))
}
