//! Closed-form and cheaply computable bounds: approximate cloning, the
//! trivial uniform bound, preparation uncertainty and its operator-norm
//! lower bound.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::objects::{choi_of, BiObservable, Instrument, MultiObservable, Observable};
use crate::solver::{eigen_seeds, multistart, SolverConfig, SphereObjective};

fn common_dim(targets: &[&Observable]) -> Result<usize> {
    let d = targets.first().ok_or_else(|| Error::InvalidParameter("no observables".into()))?.dim();
    for t in targets {
        if t.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: t.dim() });
        }
    }
    Ok(d)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Noise parameter of the marginals of the optimal n-cloning joint observable.
pub fn cloning_lambda(d: usize, n: usize) -> f64 {
    (d + n) as f64 / (n * (d + 1)) as f64
}

/// d! n! / (d + n - 1)!
fn cloning_constant(d: usize, n: usize) -> f64 {
    factorial(d) * factorial(n) / factorial(d + n - 1)
}

/// M(x_1..x_n) = Phi*(A_1(x_1) (x) ... (x) A_n(x_n)) where Phi is the optimal
/// n-cloning channel, so Phi*(X) = c_n Tr_{2..n}(S_n X S_n).
pub fn cloning_multi(targets: &[&Observable]) -> Result<MultiObservable> {
    let d = common_dim(targets)?;
    let n = targets.len();
    let s = linalg::symmetric_projector(d, n);
    let k = c(cloning_constant(d, n), 0.0);
    let sets: Vec<_> = targets.iter().map(|t| t.outcomes().to_vec()).collect();
    let shape: Vec<usize> = targets.iter().map(|t| t.len()).collect();
    let total: usize = shape.iter().product();
    let mut effects = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut factors = vec![ComplexMatrix::zeros(0, 0); n];
        for i in (0..n).rev() {
            factors[i] = targets[i].effect(rem % shape[i]).clone();
            rem /= shape[i];
        }
        let x = linalg::tensor_all(&factors);
        let reduced = linalg::trace_all_but_first(&(&s * x * &s), d, n)?;
        effects.push(linalg::hermitian_part(&(reduced * k)));
    }
    MultiObservable::new(sets, effects)
}

/// Two-copy cloning joint observable of (a, b).
pub fn cloning_biobservable(a: &Observable, b: &Observable) -> Result<BiObservable> {
    cloning_multi(&[a, b])?.to_bi()
}

/// Instrument J_x(rho) = Tr_1[(A(x) (x) I) Phi(rho)] that measures `a` on one
/// clone and outputs the other; its sequential measurement with `b` is
/// the cloning joint observable.
pub fn cloning_instrument(a: &Observable) -> Result<Instrument> {
    let d = a.dim();
    let s = linalg::symmetric_projector(d, 2);
    let k = c(cloning_constant(d, 2), 0.0);
    let id = linalg::identity(d);
    let choi = a
        .effects()
        .iter()
        .map(|e| {
            let lift = linalg::tensor(e, &id);
            choi_of(d, d, |rho| {
                let out = &s * linalg::tensor(rho, &id) * &s * k;
                linalg::partial_trace(&(&lift * out), (d, d), linalg::Factor::First).expect("square")
            })
        })
        .collect();
    Instrument::new(d, d, a.outcomes().to_vec(), choi)
}

/// sum_i log[n(d+1) / (d + n + (n-1) min_x Tr A_i(x))].
pub fn cloning_upper_bound(targets: &[&Observable]) -> Result<f64> {
    let d = common_dim(targets)? as f64;
    let n = targets.len() as f64;
    Ok(targets
        .iter()
        .map(|t| {
            let m = t.effects().iter().map(|e| e.trace().re).fold(f64::INFINITY, f64::min);
            (n * (d + 1.0) / (d + n + (n - 1.0) * m)).log2()
        })
        .sum())
}

/// Negative sum of Shannon entropies of the outcome distributions.
struct NegEntropy {
    effects: Vec<Vec<ComplexMatrix>>,
}

impl SphereObjective for NegEntropy {
    fn eval(&self, psi: &[Complex64]) -> (f64, Vec<Complex64>) {
        let v = nalgebra::DVector::from_column_slice(psi);
        let mut grad = vec![c(0.0, 0.0); psi.len()];
        let mut total = 0.0;
        for set in &self.effects {
            for a in set {
                let av = a * &v;
                let p: f64 = v.iter().zip(av.iter()).map(|(x, y)| (x.conj() * y).re).sum();
                if p <= 1e-15 {
                    continue;
                }
                total += p * p.log2();
                let dp = p.log2() + std::f64::consts::LOG2_E;
                for (g, w) in grad.iter_mut().zip(av.iter()) {
                    *g += w * dp;
                }
            }
        }
        (total, grad)
    }
}

/// inf over states of sum_i H(A_i^rho). The entropy sum is concave, so the
/// infimum is taken over pure states; the returned value is the best found.
pub fn min_entropy_sum(targets: &[&Observable], cfg: &SolverConfig) -> Result<f64> {
    cfg.validate()?;
    let d = common_dim(targets)?;
    let obj = NegEntropy { effects: targets.iter().map(|t| t.effects().to_vec()).collect() };
    let mut mats: Vec<&ComplexMatrix> = Vec::new();
    for t in targets {
        mats.extend(t.effects());
    }
    let seeds = eigen_seeds(&mats);
    let r = multistart(&obj, d, &seeds, cfg.restarts, cfg.seed, cfg.inner_tol);
    Ok((-r.value).max(0.0))
}

/// log|X| - inf H(A^rho).
pub fn shannon_cap(a: &Observable, cfg: &SolverConfig) -> Result<f64> {
    Ok((a.len() as f64).log2() - min_entropy_sum(&[a], cfg)?)
}

/// sum_i log|X_i| - inf sum_i H(A_i^rho), the bound from the uniform joint observable.
pub fn shannon_cap_multi(targets: &[&Observable], cfg: &SolverConfig) -> Result<f64> {
    let logs: f64 = targets.iter().map(|t| (t.len() as f64).log2()).sum();
    Ok(logs - min_entropy_sum(targets, cfg)?)
}

/// inf over states of H(A^rho) + H(B^rho).
pub fn prep_coefficient(a: &Observable, b: &Observable, cfg: &SolverConfig) -> Result<f64> {
    min_entropy_sum(&[a, b], cfg)
}

/// -log max_{x,y} ||A(x)^{1/2} B(y)^{1/2}||^2.
pub fn kp_lower_bound(a: &Observable, b: &Observable) -> Result<f64> {
    common_dim(&[a, b])?;
    let ra: Vec<ComplexMatrix> = a.effects().iter().map(linalg::psd_sqrt).collect();
    let rb: Vec<ComplexMatrix> = b.effects().iter().map(linalg::psd_sqrt).collect();
    let mut best: f64 = 0.0;
    for x in &ra {
        for y in &rb {
            best = best.max(linalg::operator_norm(&(x * y)).powi(2));
        }
    }
    Ok(-best.log2())
}

/// icomp_upper + prep <= log|X| + log|Y| (with slack 1e-6).
pub fn tradeoff_check(a: &Observable, b: &Observable, icomp_upper: f64, prep: f64) -> bool {
    icomp_upper + prep <= tradeoff_total(a, b) + 1e-6
}

fn tradeoff_total(a: &Observable, b: &Observable) -> f64 {
    (a.len() as f64).log2() + (b.len() as f64).log2()
}

/// Named bounds for a list of targets; the pairwise entries use the first two.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub cloning2: f64,
    #[serde(rename = "cloningN")]
    pub cloning_n: f64,
    pub shannon_cap: f64,
    pub kp_lower: f64,
    pub prep_coeff: f64,
    /// log|X| + log|Y| - prep_coeff, an upper bound on the incompatibility index.
    pub tradeoff_rhs: f64,
}

pub fn bound_report(targets: &[&Observable], cfg: &SolverConfig) -> Result<BoundReport> {
    if targets.len() < 2 {
        return Err(Error::InvalidParameter("need at least two observables".into()));
    }
    let (a, b) = (targets[0], targets[1]);
    let prep = prep_coefficient(a, b, cfg)?;
    Ok(BoundReport {
        cloning2: cloning_upper_bound(&[a, b])?,
        cloning_n: cloning_upper_bound(targets)?,
        shannon_cap: shannon_cap(a, cfg)?.min(shannon_cap(b, cfg)?),
        kp_lower: kp_lower_bound(a, b)?,
        prep_coeff: prep,
        tradeoff_rhs: tradeoff_total(a, b) - prep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::target_pair;

    #[test]
    fn qubit_cloning_marginals() {
        let (a, b) = target_pair(std::f64::consts::FRAC_PI_2).unwrap();
        let m = cloning_biobservable(&a, &b).unwrap();
        let lam = cloning_lambda(2, 2);
        assert!((lam - 2.0 / 3.0).abs() < 1e-15);
        for (p, q) in m.marginal1().effects().iter().zip(a.noisy(lam).effects()) {
            assert!((p - q).norm() < 1e-10);
        }
        for (p, q) in m.marginal2().effects().iter().zip(b.noisy(lam).effects()) {
            assert!((p - q).norm() < 1e-10);
        }
        let bound = cloning_upper_bound(&[&a, &b]).unwrap();
        assert!((bound - 2.0 * (6.0f64 / 5.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn cloning_instrument_reproduces_joint() {
        let (a, b) = target_pair(0.4).unwrap();
        let j = cloning_instrument(&a).unwrap();
        let seq = crate::objects::sequential_measurement(&j, &b).unwrap();
        let m = cloning_biobservable(&a, &b).unwrap();
        for (p, q) in seq.effects().iter().zip(m.effects()) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn kp_for_equal_sharp() {
        let (a, _) = target_pair(0.3).unwrap();
        assert!(kp_lower_bound(&a, &a).unwrap().abs() < 1e-12);
    }
}
