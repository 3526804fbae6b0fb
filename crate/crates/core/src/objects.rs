//! Observables (POVMs), joint observables, states and instruments.
//!
//! Instruments are stored in Choi form with the input factor first:
//! `C_x = sum_ij |i><j| (x) J_x(|i><j|)`, so `J_x(rho) = Tr_1[(rho^T (x) I) C_x]`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, check_square, identity, is_hermitian, min_eigenvalue, partial_trace, ComplexMatrix, Factor,
    HERMITIAN_TOL, PSD_TOL,
};

/// Opaque outcome label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Int(i64),
    Str(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Int(i) => write!(f, "{i}"),
            Outcome::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for Outcome {
    fn from(v: i64) -> Self {
        Outcome::Int(v)
    }
}

/// Labels 1..=n.
pub fn numbered_outcomes(n: usize) -> Vec<Outcome> {
    (1..=n as i64).map(Outcome::Int).collect()
}

/// Finite probability distribution over labelled outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    pub outcomes: Vec<Outcome>,
    pub weights: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(outcomes: Vec<Outcome>, weights: Vec<f64>) -> Result<Self> {
        if outcomes.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: outcomes.len(), found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < -1e-12) {
            return Err(Error::Domain("negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { what: "distribution".into(), deviation: total - 1.0 });
        }
        Ok(Self { outcomes, weights })
    }

    pub fn uniform(outcomes: Vec<Outcome>) -> Self {
        let n = outcomes.len();
        Self { outcomes, weights: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn check_effect(m: &ComplexMatrix, d: usize, what: impl Fn() -> String) -> Result<()> {
    check_square(m, d)?;
    let dev = linalg::hermiticity_defect(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { what: what(), deviation: dev });
    }
    let lo = min_eigenvalue(m);
    if lo < -PSD_TOL {
        return Err(Error::NotPositive { what: what(), min_eigenvalue: lo });
    }
    Ok(())
}

fn check_sums_to_identity(effects: &[ComplexMatrix], d: usize, what: &str) -> Result<()> {
    let mut total = linalg::zeros(d);
    for e in effects {
        total += e;
    }
    let dev = (total - identity(d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > PSD_TOL {
        return Err(Error::NotNormalized { what: format!("{what} effects"), deviation: dev });
    }
    Ok(())
}

/// Positive operator valued measure with a finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    dim: usize,
    outcomes: Vec<Outcome>,
    effects: Vec<ComplexMatrix>,
}

impl Observable {
    pub fn new(outcomes: Vec<Outcome>, effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidParameter("observable needs at least one outcome".into()));
        }
        if outcomes.len() != effects.len() {
            return Err(Error::OutcomeMismatch(format!(
                "{} outcome labels for {} effects",
                outcomes.len(),
                effects.len()
            )));
        }
        let d = effects[0].nrows();
        for (k, e) in effects.iter().enumerate() {
            check_effect(e, d, || format!("effect {k}"))?;
        }
        check_sums_to_identity(&effects, d, "observable")?;
        Ok(Self { dim: d, outcomes, effects })
    }

    /// Observable with outcomes labelled 1..=n.
    pub fn from_effects(effects: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(numbered_outcomes(effects.len()), effects)
    }

    /// Trivial observable u(x) I.
    pub fn trivial(dim: usize, outcomes: Vec<Outcome>, weights: &[f64]) -> Result<Self> {
        let effects = weights.iter().map(|w| identity(dim) * c(*w, 0.0)).collect();
        Self::new(outcomes, effects)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, x: usize) -> &ComplexMatrix {
        &self.effects[x]
    }

    /// Outcome probabilities Tr(rho A(x)).
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.effects.iter().map(|e| linalg::real_trace_product(rho, e)).collect()
    }

    pub fn distribution(&self, state: &State) -> ProbabilityDistribution {
        ProbabilityDistribution { outcomes: self.outcomes.clone(), weights: self.probabilities(state.matrix()) }
    }

    /// Sharp means every effect is a projection.
    pub fn is_sharp(&self, tol: f64) -> bool {
        self.effects.iter().all(|e| (e * e - e).iter().all(|z| z.norm() <= tol))
    }

    /// lambda A(x) + (1 - lambda) Tr(rho0 A(x)) I with rho0 = I/d.
    pub fn noisy(&self, lambda: f64) -> Self {
        let d = self.dim as f64;
        let effects = self
            .effects
            .iter()
            .map(|e| {
                let t = e.trace().re / d;
                e * c(lambda, 0.0) + identity(self.dim) * c((1.0 - lambda) * t, 0.0)
            })
            .collect();
        Self { dim: self.dim, outcomes: self.outcomes.clone(), effects }
    }

    /// Conjugation U* A(x) U.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Self {
        let effects = self.effects.iter().map(|e| u.adjoint() * e * u).collect();
        Self { dim: self.dim, outcomes: self.outcomes.clone(), effects }
    }

    /// Same effects under a relabelling of outcomes; `perm[x]` is the new index of outcome x.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut effects = self.effects.clone();
        let mut outcomes = self.outcomes.clone();
        for (x, &to) in perm.iter().enumerate() {
            effects[to] = self.effects[x].clone();
            outcomes[to] = self.outcomes[x].clone();
        }
        Self { dim: self.dim, outcomes, effects }
    }

    pub fn same_outcomes(&self, other: &Observable) -> bool {
        self.outcomes == other.outcomes
    }
}

/// Observable with outcome tuples from a product of finite sets.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiObservable {
    dim: usize,
    outcome_sets: Vec<Vec<Outcome>>,
    effects: Vec<ComplexMatrix>,
}

impl MultiObservable {
    /// `effects` are in row-major order over the outcome tuples.
    pub fn new(outcome_sets: Vec<Vec<Outcome>>, effects: Vec<ComplexMatrix>) -> Result<Self> {
        let expected: usize = outcome_sets.iter().map(|s| s.len()).product();
        if outcome_sets.is_empty() || expected == 0 {
            return Err(Error::InvalidParameter("empty outcome set".into()));
        }
        if effects.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: effects.len() });
        }
        let d = effects[0].nrows();
        for (k, e) in effects.iter().enumerate() {
            check_effect(e, d, || format!("joint effect {k}"))?;
        }
        check_sums_to_identity(&effects, d, "joint observable")?;
        Ok(Self { dim: d, outcome_sets, effects })
    }

    pub(crate) fn from_parts_unchecked(
        dim: usize,
        outcome_sets: Vec<Vec<Outcome>>,
        effects: Vec<ComplexMatrix>,
    ) -> Self {
        Self { dim, outcome_sets, effects }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.outcome_sets.len()
    }

    pub fn outcome_sets(&self) -> &[Vec<Outcome>] {
        &self.outcome_sets
    }

    pub fn shape(&self) -> Vec<usize> {
        self.outcome_sets.iter().map(|s| s.len()).collect()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// Row-major index of an outcome tuple.
    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().zip(self.shape()).fold(0, |acc, (&t, n)| acc * n + t)
    }

    /// Inverse of `index`.
    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut out = vec![0; shape.len()];
        for k in (0..shape.len()).rev() {
            out[k] = index % shape[k];
            index /= shape[k];
        }
        out
    }

    pub fn effect(&self, tuple: &[usize]) -> &ComplexMatrix {
        &self.effects[self.index(tuple)]
    }

    /// The i-th marginal (0-based).
    pub fn marginal(&self, i: usize) -> Observable {
        let n = self.outcome_sets[i].len();
        let mut effects = vec![linalg::zeros(self.dim); n];
        for (k, e) in self.effects.iter().enumerate() {
            effects[self.tuple(k)[i]] += e;
        }
        Observable { dim: self.dim, outcomes: self.outcome_sets[i].clone(), effects }
    }

    pub fn marginals(&self) -> Vec<Observable> {
        (0..self.arity()).map(|i| self.marginal(i)).collect()
    }

    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.effects.iter().map(|e| linalg::real_trace_product(rho, e)).collect()
    }

    pub fn conjugate(&self, u: &ComplexMatrix) -> Self {
        let effects = self.effects.iter().map(|e| u.adjoint() * e * u).collect();
        Self { dim: self.dim, outcome_sets: self.outcome_sets.clone(), effects }
    }

    /// Mixture (1 - w) M + w U with U the uniform joint observable I/N.
    pub fn mix_uniform(&self, w: f64) -> Self {
        let n = self.effects.len() as f64;
        let effects = self
            .effects
            .iter()
            .map(|e| e * c(1.0 - w, 0.0) + identity(self.dim) * c(w / n, 0.0))
            .collect();
        Self { dim: self.dim, outcome_sets: self.outcome_sets.clone(), effects }
    }

    pub fn to_bi(&self) -> Result<BiObservable> {
        if self.arity() != 2 {
            return Err(Error::InvalidParameter(format!("expected 2 outcome sets, found {}", self.arity())));
        }
        Ok(BiObservable { inner: self.clone() })
    }
}

/// Joint observable with outcome pairs (x, y).
#[derive(Debug, Clone, PartialEq)]
pub struct BiObservable {
    inner: MultiObservable,
}

impl BiObservable {
    /// `effects[x * |Y| + y]` is M(x, y).
    pub fn new(outcomes1: Vec<Outcome>, outcomes2: Vec<Outcome>, effects: Vec<ComplexMatrix>) -> Result<Self> {
        Ok(Self { inner: MultiObservable::new(vec![outcomes1, outcomes2], effects)? })
    }

    /// Builds M(x, y) from a closure over 0-based indices.
    pub fn from_fn(
        outcomes1: Vec<Outcome>,
        outcomes2: Vec<Outcome>,
        f: impl Fn(usize, usize) -> ComplexMatrix,
    ) -> Result<Self> {
        let (n1, n2) = (outcomes1.len(), outcomes2.len());
        let effects = (0..n1 * n2).map(|k| f(k / n2, k % n2)).collect();
        Self::new(outcomes1, outcomes2, effects)
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.inner.outcome_sets[0].len(), self.inner.outcome_sets[1].len())
    }

    pub fn outcomes1(&self) -> &[Outcome] {
        &self.inner.outcome_sets[0]
    }

    pub fn outcomes2(&self) -> &[Outcome] {
        &self.inner.outcome_sets[1]
    }

    pub fn effect(&self, x: usize, y: usize) -> &ComplexMatrix {
        &self.inner.effects[x * self.shape().1 + y]
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.inner.effects
    }

    pub fn marginal1(&self) -> Observable {
        self.inner.marginal(0)
    }

    pub fn marginal2(&self) -> Observable {
        self.inner.marginal(1)
    }

    pub fn as_multi(&self) -> &MultiObservable {
        &self.inner
    }

    pub fn into_multi(self) -> MultiObservable {
        self.inner
    }

    pub fn conjugate(&self, u: &ComplexMatrix) -> Self {
        Self { inner: self.inner.conjugate(u) }
    }

    /// The joint observable with the two outcome slots exchanged.
    pub fn transposed(&self) -> Self {
        let (n1, n2) = self.shape();
        let effects = (0..n1 * n2).map(|k| self.effect(k % n1, k / n1).clone()).collect();
        Self {
            inner: MultiObservable {
                dim: self.dim(),
                outcome_sets: vec![self.outcomes2().to_vec(), self.outcomes1().to_vec()],
                effects,
            },
        }
    }

    /// Product joint observable M(x, y) = A(x)^{1/2} B(y) A(x)^{1/2}.
    pub fn lueders_product(a: &Observable, b: &Observable) -> Result<Self> {
        let roots: Vec<_> = a.effects().iter().map(linalg::psd_sqrt).collect();
        Self::from_fn(a.outcomes().to_vec(), b.outcomes().to_vec(), |x, y| {
            linalg::hermitian_part(&(&roots[x] * b.effect(y) * &roots[x]))
        })
    }
}

/// Density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    matrix: ComplexMatrix,
}

impl State {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.nrows();
        check_effect(&matrix, d, || "state".to_string())?;
        let t = matrix.trace();
        if (t.re - 1.0).abs() > PSD_TOL || t.im.abs() > PSD_TOL {
            return Err(Error::NotNormalized { what: "state".into(), deviation: t.re - 1.0 });
        }
        Ok(Self { matrix })
    }

    /// |psi><psi| / <psi|psi>.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("zero or non-finite state vector".into()));
        }
        Ok(Self { matrix: linalg::outer(psi) * c(1.0 / norm, 0.0) })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: identity(d) * c(1.0 / d as f64, 0.0) }
    }

    /// Qubit state (I + r . sigma)/2.
    pub fn bloch(r: [f64; 3]) -> Result<Self> {
        Self::new(linalg::bloch_operator(0.5, [r[0] / 2.0, r[1] / 2.0, r[2] / 2.0]))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Instrument with finite outcome set, stored as Choi blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    dim_in: usize,
    dim_out: usize,
    outcomes: Vec<Outcome>,
    choi: Vec<ComplexMatrix>,
}

impl Instrument {
    pub fn new(dim_in: usize, dim_out: usize, outcomes: Vec<Outcome>, choi: Vec<ComplexMatrix>) -> Result<Self> {
        if outcomes.len() != choi.len() || choi.is_empty() {
            return Err(Error::OutcomeMismatch(format!("{} labels for {} Choi blocks", outcomes.len(), choi.len())));
        }
        let n = dim_in * dim_out;
        for (k, m) in choi.iter().enumerate() {
            check_effect(m, n, || format!("Choi block {k}"))?;
        }
        let mut total = linalg::zeros(dim_in);
        for m in &choi {
            total += partial_trace(m, (dim_in, dim_out), Factor::Second)?;
        }
        let dev = (total - identity(dim_in)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > PSD_TOL {
            return Err(Error::NotNormalized { what: "instrument (trace preservation)".into(), deviation: dev });
        }
        Ok(Self { dim_in, dim_out, outcomes, choi })
    }

    pub(crate) fn from_parts_unchecked(
        dim_in: usize,
        dim_out: usize,
        outcomes: Vec<Outcome>,
        choi: Vec<ComplexMatrix>,
    ) -> Self {
        Self { dim_in, dim_out, outcomes, choi }
    }

    /// Builds the Choi blocks of the maps `x -> (E_ij -> map(x, E_ij))`.
    pub fn from_maps(
        dim_in: usize,
        dim_out: usize,
        outcomes: Vec<Outcome>,
        map: impl Fn(usize, &ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let choi = (0..outcomes.len()).map(|x| choi_of(dim_in, dim_out, |e| map(x, e))).collect();
        Self::new(dim_in, dim_out, outcomes, choi)
    }

    /// Instrument with Kraus operators `kraus[x]` for outcome x.
    pub fn from_kraus(outcomes: Vec<Outcome>, kraus: &[Vec<ComplexMatrix>]) -> Result<Self> {
        let k0 = &kraus[0][0];
        let (dim_out, dim_in) = (k0.nrows(), k0.ncols());
        Self::from_maps(dim_in, dim_out, outcomes, |x, e| {
            let mut acc = linalg::zeros(dim_out);
            for k in &kraus[x] {
                acc += k * e * k.adjoint();
            }
            acc
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn choi(&self) -> &[ComplexMatrix] {
        &self.choi
    }

    /// J_x(rho).
    pub fn apply(&self, x: usize, rho: &ComplexMatrix) -> ComplexMatrix {
        let lifted = linalg::tensor(&rho.transpose(), &identity(self.dim_out)) * &self.choi[x];
        partial_trace(&lifted, (self.dim_in, self.dim_out), Factor::First).expect("consistent dims")
    }

    /// Heisenberg picture J*_x(F).
    pub fn adjoint(&self, x: usize, f: &ComplexMatrix) -> ComplexMatrix {
        let lifted = &self.choi[x] * linalg::tensor(&identity(self.dim_in), f);
        partial_trace(&lifted, (self.dim_in, self.dim_out), Factor::Second).expect("consistent dims").transpose()
    }

    /// Outcome observable x -> J*_x(I).
    pub fn induced_observable(&self) -> Observable {
        let effects = (0..self.choi.len())
            .map(|x| linalg::hermitian_part(&self.adjoint(x, &identity(self.dim_out))))
            .collect();
        Observable { dim: self.dim_in, outcomes: self.outcomes.clone(), effects }
    }
}

/// Choi matrix sum_ij |i><j| (x) phi(|i><j|) of a linear map.
pub fn choi_of(dim_in: usize, dim_out: usize, phi: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
    for i in 0..dim_in {
        for j in 0..dim_in {
            let mut e = ComplexMatrix::zeros(dim_in, dim_in);
            e[(i, j)] = c(1.0, 0.0);
            let img = phi(&e);
            for a in 0..dim_out {
                for b in 0..dim_out {
                    out[(i * dim_out + a, j * dim_out + b)] = img[(a, b)];
                }
            }
        }
    }
    out
}

pub(crate) fn observable_unchecked(effects: Vec<ComplexMatrix>) -> Observable {
    let dim = effects[0].nrows();
    Observable { dim, outcomes: numbered_outcomes(effects.len()), effects }
}

/// Sequential measurement M(x, y) = J*_x[B(y)].
pub fn sequential_measurement(instrument: &Instrument, b: &Observable) -> Result<BiObservable> {
    if b.dim() != instrument.dim_out {
        return Err(Error::DimensionMismatch { expected: instrument.dim_out, found: b.dim() });
    }
    let (n1, n2) = (instrument.outcomes.len(), b.len());
    let effects = (0..n1 * n2)
        .map(|k| linalg::hermitian_part(&instrument.adjoint(k / n2, b.effect(k % n2))))
        .collect();
    Ok(BiObservable {
        inner: MultiObservable::from_parts_unchecked(
            instrument.dim_in,
            vec![instrument.outcomes.clone(), b.outcomes().to_vec()],
            effects,
        ),
    })
}

/// Distribution of `o` in `state`; entries are clipped to [0, 1] and
/// renormalized when the drift is below 1e-9.
pub fn outcome_distribution(o: &Observable, state: &State) -> Result<ProbabilityDistribution> {
    if o.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: o.dim(), found: state.dim() });
    }
    let mut weights: Vec<f64> = o.probabilities(state.matrix()).into_iter().map(|w| w.clamp(0.0, 1.0)).collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() < 1e-9 && total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    }
    Ok(ProbabilityDistribution { outcomes: o.outcomes().to_vec(), weights })
}

/// i-th marginal of a joint observable.
pub fn marginal(m: &MultiObservable, i: usize) -> Result<Observable> {
    if i >= m.arity() {
        return Err(Error::InvalidParameter(format!("factor {i} of a {}-fold joint observable", m.arity())));
    }
    Ok(m.marginal(i))
}

/// lambda A(x) + (1 - lambda) Tr(rho0 A(x)) I.
pub fn noisy_version(o: &Observable, lambda: f64, rho0: &State) -> Result<Observable> {
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
    }
    if rho0.dim() != o.dim() {
        return Err(Error::DimensionMismatch { expected: o.dim(), found: rho0.dim() });
    }
    let effects = o
        .effects()
        .iter()
        .map(|e| {
            let t = linalg::real_trace_product(rho0.matrix(), e);
            e * c(lambda, 0.0) + identity(o.dim()) * c((1.0 - lambda) * t, 0.0)
        })
        .collect();
    Observable::new(o.outcomes().to_vec(), effects)
}

/// J*_x[F] looked up by outcome label.
pub fn adjoint_apply(j: &Instrument, x: &Outcome, f: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(f, j.dim_out())?;
    let k = j
        .outcomes()
        .iter()
        .position(|o| o == x)
        .ok_or_else(|| Error::OutcomeMismatch(format!("instrument has no outcome {x}")))?;
    Ok(j.adjoint(k, f))
}

/// u(x) rho for every outcome x, with u uniform.
pub fn trivial_uniform_instrument(dim: usize, outcomes: Vec<Outcome>) -> Instrument {
    let u = 1.0 / outcomes.len() as f64;
    let id = choi_of(dim, dim, |e| e.clone());
    let choi = outcomes.iter().map(|_| &id * c(u, 0.0)).collect();
    Instrument { dim_in: dim, dim_out: dim, outcomes, choi }
}

/// Instrument J_x(rho) = sum_y Tr(rho M(x, y)) B(y) / Tr B(y) whose
/// sequential measurement with the sharp observable `b` gives back `m`.
pub fn sharp_b_instrument(m: &BiObservable, b: &Observable) -> Result<Instrument> {
    if !b.is_sharp(1e-9) {
        return Err(Error::NotSharp("second observable is not sharp".into()));
    }
    if m.outcomes2() != b.outcomes() {
        return Err(Error::OutcomeMismatch("second outcome set differs from the sharp observable".into()));
    }
    if m.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: b.dim() });
    }
    let d = m.dim();
    let (n1, n2) = m.shape();
    let choi = (0..n1)
        .map(|x| {
            let mut block = ComplexMatrix::zeros(d * d, d * d);
            for y in 0..n2 {
                let tr = b.effect(y).trace().re;
                if tr < 0.5 {
                    continue;
                }
                block += linalg::tensor(&m.effect(x, y).transpose(), &(b.effect(y) * c(1.0 / tr, 0.0)));
            }
            block
        })
        .collect();
    Ok(Instrument { dim_in: d, dim_out: d, outcomes: m.outcomes1().to_vec(), choi })
}

/// Rejects non-square or non-Hermitian input before it reaches eigen routines.
pub fn require_hermitian(m: &ComplexMatrix, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if !is_hermitian(m, HERMITIAN_TOL) {
        return Err(Error::NotHermitian { what: what.into(), deviation: linalg::hermiticity_defect(m) });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, pauli_x, pauli_z};

    fn spin(axis: &ComplexMatrix) -> Observable {
        let half = c(0.5, 0.0);
        Observable::from_effects(vec![(identity(2) + axis) * half, (identity(2) - axis) * half]).unwrap()
    }

    #[test]
    fn rejects_bad_observables() {
        let bad = Observable::from_effects(vec![diag(&[1.0, 0.0]), diag(&[0.5, 0.5])]);
        assert!(matches!(bad, Err(Error::NotNormalized { .. })));
        let neg = Observable::from_effects(vec![diag(&[1.5, 1.0]), diag(&[-0.5, 0.0])]);
        assert!(matches!(neg, Err(Error::NotPositive { .. })));
        let mut nh = diag(&[0.5, 0.5]);
        nh[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            Observable::from_effects(vec![nh.clone(), identity(2) - nh]),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn marginals_of_lueders_product() {
        let a = spin(&pauli_z());
        let b = spin(&pauli_x()).noisy(0.5);
        let m = BiObservable::lueders_product(&a, &b).unwrap();
        assert_eq!(m.marginal1().effects(), a.effects());
        let t = m.transposed();
        assert_eq!(t.marginal2(), m.marginal1());
    }

    #[test]
    fn kraus_instrument_duality() {
        let a = spin(&pauli_z());
        let kraus: Vec<Vec<ComplexMatrix>> = a.effects().iter().map(|e| vec![linalg::psd_sqrt(e)]).collect();
        let j = Instrument::from_kraus(numbered_outcomes(2), &kraus).unwrap();
        assert_eq!(j.induced_observable().len(), 2);
        let rho = State::bloch([0.3, -0.2, 0.5]).unwrap();
        let f = spin(&pauli_x()).effect(0).clone();
        for x in 0..2 {
            let lhs = linalg::real_trace_product(&j.apply(x, rho.matrix()), &f);
            let rhs = linalg::real_trace_product(rho.matrix(), &j.adjoint(x, &f));
            assert!((lhs - rhs).abs() < 1e-12);
        }
        let seq = sequential_measurement(&j, &spin(&pauli_x())).unwrap();
        for (p, q) in seq.marginal1().effects().iter().zip(a.effects()) {
            assert!((p - q).norm() < 1e-12);
        }
    }
}
