//! Relative entropy, Shannon entropy and the error function of an
//! approximate joint measurement. All logarithms are base 2.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::objects::{BiObservable, MultiObservable, Observable, ProbabilityDistribution, State};

/// Slack allowed when checking that probabilities lie in [0, 1].
pub const DOMAIN_SLACK: f64 = 1e-12;
/// Probabilities at or below this count as outside the support.
pub const SUPPORT_EPS: f64 = 1e-12;
/// Eigenvalues at or below this count as kernel directions.
pub const KERNEL_TOL: f64 = 1e-9;

/// A real number or +infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::Infinite
        } else {
            ExtendedReal::Finite(x)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The value as an f64, mapping +infinity to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinite => None,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

fn check_unit(x: f64, name: &str) -> Result<f64> {
    if !x.is_finite() || !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        return Err(Error::Domain(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// u log(u/v) without domain checks; +infinity when u > 0 = v.
#[inline]
pub fn s_raw(u: f64, v: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if v <= 0.0 {
        f64::INFINITY
    } else {
        u * (u / v).log2()
    }
}

/// s(u, v) = u log(u/v) with s(0, v) = 0 and s(u, 0) = +inf for u > 0.
pub fn s_func(u: f64, v: f64) -> Result<ExtendedReal> {
    let u = check_unit(u, "u")?;
    let v = check_unit(v, "v")?;
    Ok(ExtendedReal::from_f64(s_raw(u, v)))
}

/// Relative entropy without validation. Entries below the support
/// threshold count as zero on both sides.
pub fn relative_entropy_raw(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > SUPPORT_EPS {
            acc += if qi > SUPPORT_EPS { s_raw(pi, qi) } else { f64::INFINITY };
        }
    }
    acc
}

fn check_distribution(p: &[f64], name: &str) -> Result<Vec<f64>> {
    let clamped = p.iter().map(|&x| check_unit(x, name)).collect::<Result<Vec<_>>>()?;
    let total: f64 = clamped.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { what: name.into(), deviation: total - 1.0 });
    }
    Ok(clamped)
}

/// S(p || q) = sum_x s(p(x), q(x)).
pub fn relative_entropy(p: &[f64], q: &[f64]) -> Result<ExtendedReal> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    let p = check_distribution(p, "p")?;
    let q = check_distribution(q, "q")?;
    Ok(ExtendedReal::from_f64(relative_entropy_raw(&p, &q)))
}

/// H(p) = -sum p log p.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let p = check_distribution(p, "p")?;
    Ok(shannon_raw(&p))
}

pub fn shannon_raw(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Sum of relative entropies between target and approximating marginal
/// distributions, all given as raw probability vectors.
pub fn error_function_raw(targets: &[Vec<f64>], approximations: &[Vec<f64>]) -> f64 {
    targets.iter().zip(approximations).map(|(p, q)| relative_entropy_raw(p, q)).sum()
}

fn same_setting(targets: &[&Observable], m: &MultiObservable) -> Result<()> {
    if targets.len() != m.arity() {
        return Err(Error::OutcomeMismatch(format!(
            "{} targets for a joint observable with {} outcome sets",
            targets.len(),
            m.arity()
        )));
    }
    for (i, t) in targets.iter().enumerate() {
        if t.dim() != m.dim() {
            return Err(Error::DimensionMismatch { expected: m.dim(), found: t.dim() });
        }
        if t.outcomes() != m.outcome_sets()[i].as_slice() {
            return Err(Error::OutcomeMismatch(format!("target {i} outcomes differ from marginal {i}")));
        }
    }
    Ok(())
}

/// sum_i S(A_i^rho || M_i^rho) for a joint observable with n marginals.
pub fn error_function_multi(targets: &[&Observable], m: &MultiObservable, rho: &State) -> Result<ExtendedReal> {
    same_setting(targets, m)?;
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: rho.dim() });
    }
    let mut total = ExtendedReal::Finite(0.0);
    for (i, t) in targets.iter().enumerate() {
        let p = t.probabilities(rho.matrix());
        let q = m.marginal(i).probabilities(rho.matrix());
        total = total + relative_entropy(&p, &q)?;
    }
    Ok(total)
}

/// S(A^rho || M1^rho) + S(B^rho || M2^rho).
pub fn error_function(
    a: &Observable,
    b: &Observable,
    m: &BiObservable,
    rho: &State,
) -> Result<ExtendedReal> {
    error_function_multi(&[a, b], m.as_multi(), rho)
}

/// True iff ker M(x) is contained in ker A(x) for every outcome, which is
/// exactly when sup over states of S(A^rho || M^rho) is finite.
pub fn marginal_finiteness(target: &Observable, approx: &Observable) -> Result<bool> {
    if target.len() != approx.len() {
        return Err(Error::OutcomeMismatch("observables have different outcome counts".into()));
    }
    if target.dim() != approx.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: approx.dim() });
    }
    Ok(target.effects().iter().zip(approx.effects()).all(|(a, m)| kernel_contained(a, m)))
}

/// Finiteness of the divergence of `m` from the pair (a, b).
pub fn divergence_finiteness(a: &Observable, b: &Observable, m: &BiObservable) -> Result<bool> {
    same_setting(&[a, b], m.as_multi())?;
    Ok(marginal_finiteness(a, &m.marginal1())? && marginal_finiteness(b, &m.marginal2())?)
}

fn kernel_contained(a: &ComplexMatrix, m: &ComplexMatrix) -> bool {
    let (vals, vecs) = linalg::eigh(m);
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    vals.iter().enumerate().filter(|(_, &l)| l <= KERNEL_TOL).all(|(j, _)| {
        let v = vecs.column(j);
        let av = a * v;
        let quad = v.iter().zip(av.iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
        quad <= KERNEL_TOL * scale
    })
}

/// max_p S(p || lambda p + (1 - lambda) q) = log 1/(lambda + (1 - lambda) min q).
pub fn mixture_max(lambda: f64, q: &[f64]) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda = {lambda} outside [0, 1]")));
    }
    let q = check_distribution(q, "q")?;
    let qmin = q.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(-(lambda + (1.0 - lambda) * qmin).log2())
}

fn same_labels(p: &ProbabilityDistribution, q: &ProbabilityDistribution) -> Result<()> {
    if p.outcomes != q.outcomes {
        return Err(Error::OutcomeMismatch("distributions live on different outcome sets".into()));
    }
    Ok(())
}

/// Relative entropy of two labelled distributions.
pub fn rel_entropy(p: &ProbabilityDistribution, q: &ProbabilityDistribution) -> Result<ExtendedReal> {
    same_labels(p, q)?;
    relative_entropy(&p.weights, &q.weights)
}

pub fn shannon(p: &ProbabilityDistribution) -> Result<f64> {
    shannon_entropy(&p.weights)
}

/// Closed form of max_p S(p || lambda p + (1 - lambda) q) for lambda in (0, 1].
pub fn max_rel_entropy_mixture(lambda: f64, q: &ProbabilityDistribution) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("lambda = {lambda} outside (0, 1]")));
    }
    mixture_max(lambda, &q.weights)
}
