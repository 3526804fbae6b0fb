//! Maximization of the error function over pure states: Riemannian
//! gradient ascent on the unit sphere of C^d with multiple starts.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entropy::{s_raw, SUPPORT_EPS};
use crate::linalg::{self, c, ComplexMatrix};
use crate::objects::{Observable, State};

const LN2: f64 = std::f64::consts::LN_2;

/// Target/approximation pairs whose relative entropies are summed.
#[derive(Clone)]
pub(crate) struct Pairs {
    pub targets: Vec<Vec<ComplexMatrix>>,
    pub approx: Vec<Vec<ComplexMatrix>>,
}

impl Pairs {
    pub fn new(targets: &[&Observable], approx: &[&Observable]) -> Self {
        Self {
            targets: targets.iter().map(|o| o.effects().to_vec()).collect(),
            approx: approx.iter().map(|o| o.effects().to_vec()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.targets[0][0].nrows()
    }

    /// Error function and its gradient with respect to conj(psi), psi unit.
    fn value_and_gradient(&self, psi: &[Complex64]) -> (f64, Vec<Complex64>) {
        let d = psi.len();
        let v = nalgebra::DVector::from_column_slice(psi);
        let mut grad = vec![c(0.0, 0.0); d];
        let mut total = 0.0;
        for (ts, ms) in self.targets.iter().zip(&self.approx) {
            for (a, m) in ts.iter().zip(ms) {
                let av = a * &v;
                let mv = m * &v;
                let u: f64 = v.iter().zip(av.iter()).map(|(x, y)| (x.conj() * y).re).sum();
                let q: f64 = v.iter().zip(mv.iter()).map(|(x, y)| (x.conj() * y).re).sum();
                if u <= SUPPORT_EPS {
                    continue;
                }
                if q <= 0.0 {
                    return (f64::INFINITY, grad);
                }
                total += s_raw(u, q);
                let du = (u / q).log2() + 1.0 / LN2;
                let dq = -u / (q * LN2);
                for k in 0..d {
                    grad[k] += av[k] * du + mv[k] * dq;
                }
            }
        }
        (total, grad)
    }

    /// A pure state with infinite error, if any effect of an approximation
    /// has a kernel direction on which its target is nonzero.
    pub fn infinite_witness(&self) -> Option<Vec<Complex64>> {
        for (ts, ms) in self.targets.iter().zip(&self.approx) {
            for (a, m) in ts.iter().zip(ms) {
                let (vals, vecs) = linalg::eigh(m);
                let kernel: Vec<usize> =
                    (0..vals.len()).filter(|&j| vals[j] <= crate::entropy::KERNEL_TOL).collect();
                if kernel.is_empty() {
                    continue;
                }
                let p = ComplexMatrix::from_fn(vecs.nrows(), kernel.len(), |i, j| vecs[(i, kernel[j])]);
                let compressed = p.adjoint() * a * &p;
                let (avals, avecs) = linalg::eigh(&compressed);
                let top = avals.len() - 1;
                let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
                if avals[top] > crate::entropy::KERNEL_TOL * scale {
                    let w = &p * avecs.column(top);
                    return Some(w.iter().cloned().collect());
                }
            }
        }
        None
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// Objective on unit vectors returning the value and the gradient with
/// respect to conj(psi).
pub(crate) trait SphereObjective: Sync {
    fn eval(&self, psi: &[Complex64]) -> (f64, Vec<Complex64>);
}

impl SphereObjective for Pairs {
    fn eval(&self, psi: &[Complex64]) -> (f64, Vec<Complex64>) {
        self.value_and_gradient(psi)
    }
}

/// Local ascent from `start`; returns the value and the final vector.
pub(crate) fn ascend<O: SphereObjective + ?Sized>(
    obj: &O,
    start: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> (f64, Vec<Complex64>) {
    let mut psi = start.to_vec();
    normalize(&mut psi);
    let (mut val, mut grad) = obj.eval(&psi);
    if !val.is_finite() {
        return (val, psi);
    }
    let mut step = 0.5;
    let mut stalls = 0;
    for _ in 0..max_iter {
        let overlap: Complex64 = psi.iter().zip(&grad).map(|(a, b)| a.conj() * b).sum();
        let tangent: Vec<Complex64> = grad.iter().zip(&psi).map(|(g, p)| g - overlap * p).collect();
        let gnorm2: f64 = tangent.iter().map(|z| z.norm_sqr()).sum();
        if gnorm2 < 1e-24 {
            break;
        }
        let mut accepted = false;
        let mut t = step;
        for _ in 0..60 {
            let mut trial: Vec<Complex64> = psi.iter().zip(&tangent).map(|(p, g)| p + g * t).collect();
            normalize(&mut trial);
            let (tv, tg) = obj.eval(&trial);
            if tv.is_finite() && tv >= val + 1e-4 * t * gnorm2 {
                let gain = tv - val;
                psi = trial;
                val = tv;
                grad = tg;
                accepted = true;
                step = (t * 2.0).min(1e6);
                stalls = if gain < tol * 1e-3 { stalls + 1 } else { 0 };
                break;
            }
            t *= 0.5;
        }
        if !accepted || stalls >= 3 {
            break;
        }
    }
    (val, psi)
}

/// Best value found by ascent from every seed and every random start.
pub(crate) struct InnerResult {
    pub value: f64,
    pub state: Vec<Complex64>,
    /// Distinct local maxima, best first.
    pub maxima: Vec<(f64, Vec<Complex64>)>,
}

pub(crate) fn eigen_seeds(mats: &[&ComplexMatrix]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for m in mats {
        let (_, vecs) = linalg::eigh(m);
        for j in 0..vecs.ncols() {
            out.push(vecs.column(j).iter().cloned().collect());
        }
    }
    out
}

pub(crate) fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let o: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    o.norm_sqr() / (na * nb)
}

pub(crate) fn maximize(
    pairs: &Pairs,
    seeds: &[Vec<Complex64>],
    restarts: usize,
    seed: u64,
    tol: f64,
) -> InnerResult {
    if let Some(w) = pairs.infinite_witness() {
        return InnerResult { value: f64::INFINITY, state: w.clone(), maxima: vec![(f64::INFINITY, w)] };
    }
    multistart(pairs, pairs.dim(), seeds, restarts, seed, tol)
}

/// Ascent from every seed and from `restarts` random unit vectors.
pub(crate) fn multistart<O: SphereObjective + ?Sized>(
    obj: &O,
    d: usize,
    seeds: &[Vec<Complex64>],
    restarts: usize,
    seed: u64,
    tol: f64,
) -> InnerResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<Complex64>> = seeds.to_vec();
    for _ in 0..restarts {
        starts.push(linalg::random_unit_vector(&mut rng, d));
    }
    let results: Vec<(f64, Vec<Complex64>)> =
        crate::solver::with_pool(|| starts.par_iter().map(|s| ascend(obj, s, tol, 400)).collect());
    let mut sorted = results;
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut maxima: Vec<(f64, Vec<Complex64>)> = Vec::new();
    for (v, s) in sorted {
        if !v.is_nan() && maxima.iter().all(|(_, t)| fidelity(&s, t) < 1.0 - 1e-6) {
            maxima.push((v, s));
        }
    }
    let (value, state) = maxima[0].clone();
    InnerResult { value, state, maxima }
}

/// sup over pure states of sum_i S(A_i^rho || M_i^rho), with the maximizing state.
pub fn max_error_over_states(
    targets: &[&Observable],
    approximations: &[&Observable],
    restarts: usize,
    seed: u64,
    tol: f64,
) -> (f64, State) {
    let pairs = Pairs::new(targets, approximations);
    let mut mats: Vec<&ComplexMatrix> = Vec::new();
    for o in targets.iter().chain(approximations) {
        mats.extend(o.effects());
    }
    let seeds = eigen_seeds(&mats);
    let r = maximize(&pairs, &seeds, restarts, seed, tol);
    (r.value, State::pure(&r.state).expect("unit vector"))
}
