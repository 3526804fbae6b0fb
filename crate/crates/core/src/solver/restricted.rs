//! The outer convex problem restricted to a finite atlas of states:
//! minimize max_k f_k(X) over the feasible set. The max is smoothed by a
//! log-sum-exp at temperature 1/beta and minimized by projected gradient
//! steps. A lower bound on the restricted optimum is certified from the
//! Lagrangian dual of the linearized problem.

use crate::linalg::{self, c, ComplexMatrix};

use super::space::{axpy, inner, probe_value, Blocks, Probe, Space};
use super::StepSchedule;

pub(crate) struct Evaluation {
    pub values: Vec<f64>,
    coeffs: Vec<Vec<Vec<f64>>>,
}

impl Evaluation {
    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

pub(crate) fn evaluate(space: &Space, probes: &[Probe], x: &[ComplexMatrix]) -> Evaluation {
    let mut values = Vec::with_capacity(probes.len());
    let mut coeffs = Vec::with_capacity(probes.len());
    for p in probes {
        let (v, cf) = probe_value(&p.target, &space.marginals(x, p));
        values.push(v);
        coeffs.push(cf);
    }
    Evaluation { values, coeffs }
}

/// Log-sum-exp weights exp(beta f_k) / sum exp(beta f_j).
fn softmax(values: &[f64], beta: f64) -> Vec<f64> {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = values.iter().map(|v| (beta * (v - m)).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn smoothed_value(values: &[f64], beta: f64) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return f64::INFINITY;
    }
    m + values.iter().map(|v| (beta * (v - m)).exp()).sum::<f64>().ln() / beta
}

fn weighted_gradient(space: &Space, probes: &[Probe], ev: &Evaluation, w: &[f64]) -> Blocks {
    let mut g = vec![linalg::zeros(space.block_dim()); space.blocks()];
    for (k, p) in probes.iter().enumerate() {
        if w[k] > 1e-300 {
            space.accumulate(p, &ev.coeffs[k], w[k], &mut g);
        }
    }
    g
}

/// Pulls a point with infinite objective back into the interior.
pub(crate) fn repair(space: &Space, probes: &[Probe], x: &mut Blocks) {
    let centre = space.centre();
    let mut weight = 1e-6;
    while !evaluate(space, probes, x).is_finite() && weight <= 1.0 {
        for (b, cb) in x.iter_mut().zip(&centre) {
            *b = &*b * c(1.0 - weight, 0.0) + cb * c(weight, 0.0);
        }
        weight *= 4.0;
    }
}

const DYKSTRA_ITERS: usize = 300;

/// Spectral projected gradient with a nonmonotone line search on the
/// smoothed objective.
fn spectral(space: &Space, probes: &[Probe], x0: Blocks, beta: f64, budget: usize) -> Blocks {
    let mut x = x0;
    let mut ev = evaluate(space, probes, &x);
    let mut w = softmax(&ev.values, beta);
    let mut f = smoothed_value(&ev.values, beta);
    let mut g = weighted_gradient(space, probes, &ev, &w);
    let gn = inner(&g, &g).sqrt().max(1e-12);
    let mut lam = 1.0 / gn;
    let mut history = vec![f];
    for _ in 0..budget {
        let z: Blocks = x.iter().zip(&g).map(|(a, b)| a - b * c(lam, 0.0)).collect();
        let p = space.project(&z, DYKSTRA_ITERS);
        let d: Blocks = p.iter().zip(&x).map(|(a, b)| a - b).collect();
        let gd = inner(&g, &d);
        let dn = inner(&d, &d);
        if dn < 1e-26 || gd >= 0.0 {
            break;
        }
        let fref = history.iter().rev().take(10).cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-14 {
            let mut xn = x.clone();
            axpy(&mut xn, alpha, &d);
            let evn = evaluate(space, probes, &xn);
            let fnew = smoothed_value(&evn.values, beta);
            if fnew.is_finite() && fnew <= fref + 1e-4 * alpha * gd {
                accepted = Some((xn, evn, fnew));
                break;
            }
            alpha *= 0.3;
        }
        let Some((xn, evn, fnew)) = accepted else { break };
        let wn = softmax(&evn.values, beta);
        let gnew = weighted_gradient(space, probes, &evn, &wn);
        let s: Blocks = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Blocks = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = inner(&s, &y);
        lam = if sy > 1e-300 { (inner(&s, &s) / sy).clamp(1e-12, 1e12) } else { 1e6 };
        x = xn;
        ev = evn;
        w = wn;
        g = gnew;
        f = fnew;
        history.push(f);
    }
    let _ = (ev, w);
    x
}

/// Projected subgradient with step c / sqrt(t) on the unsmoothed maximum.
fn subgradient(space: &Space, probes: &[Probe], x0: Blocks, scale: f64, budget: usize) -> Blocks {
    let mut x = x0;
    let mut best = x.clone();
    let mut best_val = evaluate(space, probes, &x).max();
    for t in 1..=budget {
        let ev = evaluate(space, probes, &x);
        if !ev.is_finite() {
            repair(space, probes, &mut x);
            continue;
        }
        let v = ev.max();
        if v < best_val {
            best_val = v;
            best = x.clone();
        }
        let k = (0..ev.values.len()).max_by(|&a, &b| ev.values[a].total_cmp(&ev.values[b])).unwrap();
        let mut w = vec![0.0; ev.values.len()];
        w[k] = 1.0;
        let g = weighted_gradient(space, probes, &ev, &w);
        let gn = inner(&g, &g).sqrt().max(1e-300);
        let step = scale / (t as f64).sqrt() / gn;
        let z: Blocks = x.iter().zip(&g).map(|(a, b)| a - b * c(step, 0.0)).collect();
        x = space.project(&z, DYKSTRA_ITERS);
    }
    best
}

/// Approximate minimizer of max_k f_k over the feasible set.
pub(crate) fn solve(
    space: &Space,
    probes: &[Probe],
    x0: Blocks,
    schedule: StepSchedule,
    beta_max: f64,
    budget: usize,
) -> Blocks {
    let mut x = x0;
    repair(space, probes, &mut x);
    match schedule {
        StepSchedule::Spectral => {
            let stages = [beta_max * 1e-3, beta_max * 1e-2, beta_max * 1e-1, beta_max];
            for beta in stages {
                x = spectral(space, probes, x, beta, budget / stages.len());
            }
            x
        }
        StepSchedule::InverseSqrt { c } => subgradient(space, probes, x, c, budget),
    }
}

/// Certified lower bound on min_X max_k f_k(X) from the point `x`, using
/// atlas weights w = softmax(beta f(x)).
///
/// For any weights w and feasible x with finite objective,
/// min_X sum_k w_k f_k(X) >= g(x) - <G, x> + Tr(Y) whenever
/// G_j - Phi*(Y) is positive semidefinite for every block j, where
/// g = sum_k w_k f_k and G is its gradient at x.
pub(crate) fn certificate(space: &Space, probes: &[Probe], x: &[ComplexMatrix], beta: f64) -> f64 {
    let ev = evaluate(space, probes, x);
    if !ev.is_finite() {
        return 0.0;
    }
    let w = softmax(&ev.values, beta);
    let gval: f64 = w.iter().zip(&ev.values).map(|(a, b)| a * b).sum();
    let g = weighted_gradient(space, probes, &ev, &w);
    let gx = inner(&g, x);
    let dy = space.constraint_dim();
    let mut y = linalg::zeros(dy);
    for (gj, xj) in g.iter().zip(x) {
        y += space.constraint_map(&(gj * xj));
    }
    let mut y = linalg::hermitian_part(&y);
    let h = |y: &ComplexMatrix| -> (f64, Option<(usize, nalgebra::DVector<num_complex::Complex64>)>) {
        let ay = space.constraint_adjoint(y);
        let mut worst = 0.0;
        let mut arg = None;
        for (j, gj) in g.iter().enumerate() {
            let (vals, vecs) = linalg::eigh(&(&ay - gj));
            let top = vals[vals.len() - 1];
            if top > worst {
                worst = top;
                arg = Some((j, vecs.column(vals.len() - 1).into_owned()));
            }
        }
        (y.trace().re - dy as f64 * worst, arg)
    };
    let (mut best, mut arg) = h(&y);
    let scale = g.iter().map(|m| m.norm()).fold(1e-12, f64::max);
    let mut step = 1e-3 * scale;
    for t in 1..=200 {
        let Some((_, v)) = &arg else { break };
        let vv = linalg::outer(v.as_slice());
        let sub = linalg::identity(dy) - space.constraint_map(&vv) * c(dy as f64, 0.0);
        let trial = &y + sub * c(step / (t as f64).sqrt(), 0.0);
        let (ht, at) = h(&trial);
        if ht > best {
            best = ht;
            y = trial;
            arg = at;
        } else {
            step *= 0.5;
        }
    }
    gval - gx + best
}
