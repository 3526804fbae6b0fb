//! Feasible sets for the outer problem: joint observables (blocks summing
//! to the identity) and instruments (Choi blocks whose output partial
//! traces sum to the identity).

use crate::entropy::SUPPORT_EPS;
use crate::linalg::{self, c, identity, partial_trace, tensor, ComplexMatrix, Factor};
use crate::objects::Observable;

pub(crate) type Blocks = Vec<ComplexMatrix>;

pub(crate) fn inner(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p.conj() * q).re).sum::<f64>())
        .sum()
}

pub(crate) fn axpy(y: &mut [ComplexMatrix], alpha: f64, x: &[ComplexMatrix]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * c(alpha, 0.0);
    }
}

/// Per-state data needed to evaluate marginal probabilities.
pub(crate) struct Probe {
    pub rho: ComplexMatrix,
    /// Target probabilities, one vector per target.
    pub target: Vec<Vec<f64>>,
    /// Lifted operators rho^T (x) F for the instrument space.
    lifted: Vec<ComplexMatrix>,
}

pub(crate) enum Space {
    /// Joint observables with outcome tuples of the given shape on C^d.
    Joint { d: usize, shape: Vec<usize> },
    /// Instruments on C^d with `n` outcomes followed by observable `b`.
    Instrument { d: usize, n: usize, b: Vec<ComplexMatrix> },
}

impl Space {
    pub fn blocks(&self) -> usize {
        match self {
            Space::Joint { shape, .. } => shape.iter().product(),
            Space::Instrument { n, .. } => *n,
        }
    }

    pub fn block_dim(&self) -> usize {
        match self {
            Space::Joint { d, .. } => *d,
            Space::Instrument { d, .. } => d * d,
        }
    }

    /// Dimension of the identity in the linear constraint.
    pub fn constraint_dim(&self) -> usize {
        match self {
            Space::Joint { d, .. } | Space::Instrument { d, .. } => *d,
        }
    }

    fn tuple(shape: &[usize], mut k: usize) -> Vec<usize> {
        let mut out = vec![0; shape.len()];
        for i in (0..shape.len()).rev() {
            out[i] = k % shape[i];
            k /= shape[i];
        }
        out
    }

    /// Strictly feasible centre of the set.
    pub fn centre(&self) -> Blocks {
        let n = self.blocks();
        match self {
            Space::Joint { d, .. } => vec![identity(*d) * c(1.0 / n as f64, 0.0); n],
            Space::Instrument { d, .. } => vec![identity(d * d) * c(1.0 / (n * d) as f64, 0.0); n],
        }
    }

    /// Phi(X): the constraint map applied to one block.
    pub fn constraint_map(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Space::Joint { .. } => x.clone(),
            Space::Instrument { d, .. } => partial_trace(x, (*d, *d), Factor::Second).expect("block dims"),
        }
    }

    /// Phi*(Y).
    pub fn constraint_adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Space::Joint { .. } => y.clone(),
            Space::Instrument { d, .. } => tensor(y, &identity(*d)),
        }
    }

    fn constraint_total(&self, x: &[ComplexMatrix]) -> ComplexMatrix {
        let mut s = linalg::zeros(self.constraint_dim());
        for b in x {
            s += self.constraint_map(b);
        }
        s
    }

    /// Euclidean projection onto the affine constraint set.
    pub fn affine_project(&self, x: &mut [ComplexMatrix]) {
        let dy = self.constraint_dim();
        let excess = self.constraint_total(x) - identity(dy);
        let scale = match self {
            Space::Joint { .. } => 1.0 / self.blocks() as f64,
            Space::Instrument { d, .. } => 1.0 / (self.blocks() * d) as f64,
        };
        let corr = self.constraint_adjoint(&excess) * c(scale, 0.0);
        for b in x.iter_mut() {
            *b -= &corr;
        }
    }

    /// Maps a blockwise positive point onto the feasible set exactly:
    /// X_k -> Phi*(S^{-1/2}) X_k Phi*(S^{-1/2}) with S the constraint total.
    pub fn normalize(&self, x: &mut [ComplexMatrix]) {
        for b in x.iter_mut() {
            *b = linalg::psd_projection(b);
        }
        let s = self.constraint_total(x) + identity(self.constraint_dim()) * c(1e-300, 0.0);
        let r = self.constraint_adjoint(&linalg::inv_sqrt(&s));
        for b in x.iter_mut() {
            *b = linalg::hermitian_part(&(&r * &*b * &r));
        }
    }

    /// Dykstra's alternating projections between the positive cone and the
    /// affine constraint, followed by an exact normalization.
    pub fn project(&self, z: &[ComplexMatrix], max_iter: usize) -> Blocks {
        let mut x: Blocks = z.to_vec();
        let mut p: Blocks = vec![linalg::zeros(self.block_dim()); x.len()];
        for _ in 0..max_iter {
            let mut y: Blocks = x.iter().zip(&p).map(|(a, b)| linalg::psd_projection(&(a + b))).collect();
            for k in 0..x.len() {
                p[k] = &x[k] + &p[k] - &y[k];
            }
            self.affine_project(&mut y);
            let moved: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).norm_squared()).sum();
            x = y;
            if moved < 1e-24 {
                break;
            }
        }
        self.normalize(&mut x);
        x
    }

    pub fn probe(&self, rho: ComplexMatrix, targets: &[Vec<ComplexMatrix>]) -> Probe {
        let target = targets.iter().map(|t| t.iter().map(|e| linalg::real_trace_product(&rho, e)).collect()).collect();
        let lifted = match self {
            Space::Joint { .. } => Vec::new(),
            Space::Instrument { d, b, .. } => {
                let rt = rho.transpose();
                let mut v = vec![tensor(&rt, &identity(*d))];
                v.extend(b.iter().map(|e| tensor(&rt, e)));
                v
            }
        };
        Probe { rho, target, lifted }
    }

    /// Marginal probabilities of the candidate at the probe state.
    pub fn marginals(&self, x: &[ComplexMatrix], probe: &Probe) -> Vec<Vec<f64>> {
        match self {
            Space::Joint { shape, .. } => {
                let mut out: Vec<Vec<f64>> = shape.iter().map(|&n| vec![0.0; n]).collect();
                for (k, b) in x.iter().enumerate() {
                    let t = linalg::real_trace_product(&probe.rho, b);
                    for (i, &o) in Self::tuple(shape, k).iter().enumerate() {
                        out[i][o] += t;
                    }
                }
                out
            }
            Space::Instrument { b, .. } => {
                let first = x.iter().map(|cx| linalg::real_trace_product(cx, &probe.lifted[0])).collect();
                let second = (0..b.len())
                    .map(|y| x.iter().map(|cx| linalg::real_trace_product(cx, &probe.lifted[y + 1])).sum())
                    .collect();
                vec![first, second]
            }
        }
    }

    /// Adds weight * sum_{i,o} coeff[i][o] * d(marginal_{i,o})/dX to `grad`.
    pub fn accumulate(&self, probe: &Probe, coeff: &[Vec<f64>], weight: f64, grad: &mut [ComplexMatrix]) {
        match self {
            Space::Joint { shape, .. } => {
                for (k, g) in grad.iter_mut().enumerate() {
                    let s: f64 = Self::tuple(shape, k).iter().enumerate().map(|(i, &o)| coeff[i][o]).sum();
                    *g += &probe.rho * c(weight * s, 0.0);
                }
            }
            Space::Instrument { b, .. } => {
                let mut shared = linalg::zeros(probe.lifted[0].nrows());
                for y in 0..b.len() {
                    shared += &probe.lifted[y + 1] * c(coeff[1][y], 0.0);
                }
                for (x, g) in grad.iter_mut().enumerate() {
                    *g += (&probe.lifted[0] * c(coeff[0][x], 0.0) + &shared) * c(weight, 0.0);
                }
            }
        }
    }

    /// The approximating observables defined by a candidate point.
    pub fn approximations(&self, x: &[ComplexMatrix]) -> Vec<Observable> {
        match self {
            Space::Joint { d, shape } => {
                let mut out = Vec::new();
                for (i, &n) in shape.iter().enumerate() {
                    let mut eff = vec![linalg::zeros(*d); n];
                    for (k, b) in x.iter().enumerate() {
                        eff[Self::tuple(shape, k)[i]] += b;
                    }
                    out.push(eff);
                }
                out.into_iter().map(unchecked_observable).collect()
            }
            Space::Instrument { d, b, .. } => {
                let adj = |cx: &ComplexMatrix, f: &ComplexMatrix| {
                    let lifted = cx * tensor(&identity(*d), f);
                    linalg::hermitian_part(&partial_trace(&lifted, (*d, *d), Factor::Second).unwrap().transpose())
                };
                let first = x.iter().map(|cx| adj(cx, &identity(*d))).collect();
                let second = b
                    .iter()
                    .map(|e| {
                        let mut acc = linalg::zeros(*d);
                        for cx in x {
                            acc += adj(cx, e);
                        }
                        acc
                    })
                    .collect();
                vec![unchecked_observable(first), unchecked_observable(second)]
            }
        }
    }
}

fn unchecked_observable(effects: Vec<ComplexMatrix>) -> Observable {
    crate::objects::observable_unchecked(effects)
}

/// f(X) = sum_i S(p_i || q_i(X)) at one probe, with the partial derivatives
/// with respect to each marginal probability.
pub(crate) fn probe_value(targets: &[Vec<f64>], marg: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>) {
    let mut val = 0.0;
    let mut coeff = Vec::with_capacity(targets.len());
    for (p, q) in targets.iter().zip(marg) {
        let mut row = vec![0.0; p.len()];
        for o in 0..p.len() {
            if p[o] > SUPPORT_EPS {
                if q[o] <= 0.0 {
                    return (f64::INFINITY, Vec::new());
                }
                val += p[o] * (p[o] / q[o]).log2();
                row[o] = -p[o] / (q[o] * std::f64::consts::LN_2);
            }
        }
        coeff.push(row);
    }
    (val, coeff)
}
