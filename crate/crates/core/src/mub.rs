//! Two Fourier-conjugate mutually unbiased bases in prime power dimension,
//! the Weyl and squeezing operators of the finite phase space, covariant
//! phase-space observables and the optimal approximate joint measurement.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::linalg::{self, c, ComplexMatrix};
use crate::objects::{BiObservable, Observable, Outcome, State};
use crate::solver::{max_error_over_states, SolverConfig};

/// exp(2 pi i k / p).
fn root_of_unity(k: usize, p: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64)
}

pub fn field_outcomes(f: &FiniteField) -> Vec<Outcome> {
    f.elements().map(|a| Outcome::Int(a as i64)).collect()
}

/// F[z, t] = exp(-2 pi i tr(z t)/p) / sqrt(d).
pub fn fourier(f: &FiniteField) -> ComplexMatrix {
    let d = f.order();
    let p = f.characteristic();
    let norm = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |z, t| root_of_unity(f.trace(f.mul(z, t)), p).conj() * norm)
}

/// Point (u1, u2) of the phase space F x F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PhasePoint {
    pub u1: usize,
    pub u2: usize,
}

impl PhasePoint {
    pub fn new(f: &FiniteField, u1: usize, u2: usize) -> Result<Self> {
        if u1 >= f.order() || u2 >= f.order() {
            return Err(Error::InvalidParameter(format!("({u1}, {u2}) is not a point of GF({})^2", f.order())));
        }
        Ok(Self { u1, u2 })
    }

    pub fn add(self, f: &FiniteField, v: PhasePoint) -> PhasePoint {
        PhasePoint { u1: f.add(self.u1, v.u1), u2: f.add(self.u2, v.u2) }
    }
}

/// W(u) phi(z) = exp(2 pi i tr(u2 (z - u1))/p) phi(z - u1).
///
/// Panics if a coordinate of `u` is not a field element.
pub fn weyl(f: &FiniteField, u: PhasePoint) -> ComplexMatrix {
    let (u1, u2) = (u.u1, u.u2);
    let d = f.order();
    let mut w = ComplexMatrix::zeros(d, d);
    for z in f.elements() {
        let shifted = f.sub(z, u1);
        w[(z, shifted)] = root_of_unity(f.trace(f.mul(u2, shifted)), f.characteristic());
    }
    w
}

/// D(a) phi(z) = phi(a^{-1} z) for nonzero a.
pub fn squeeze(f: &FiniteField, a: usize) -> Result<ComplexMatrix> {
    let ai = f.inv(a).ok_or_else(|| Error::InvalidParameter("squeeze by zero".into()))?;
    let d = f.order();
    let mut m = ComplexMatrix::zeros(d, d);
    for z in f.elements() {
        m[(z, f.mul(ai, z))] = c(1.0, 0.0);
    }
    Ok(m)
}

/// Position basis Q(x) = |delta_x><delta_x| and momentum basis
/// P(y) = |omega_y><omega_y| with omega_y = F* delta_y.
pub fn mub_pair(f: &FiniteField) -> (Observable, Observable) {
    let d = f.order();
    let fm = fourier(f);
    let fa = fm.adjoint();
    let q = (0..d)
        .map(|x| {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(x, x)] = c(1.0, 0.0);
            m
        })
        .collect();
    let p = (0..d).map(|y| linalg::outer(fa.column(y).as_slice())).collect();
    (
        Observable::new(field_outcomes(f), q).expect("basis projections"),
        Observable::new(field_outcomes(f), p).expect("basis projections"),
    )
}

/// M_tau(x, y) = W(x, y) tau W(x, y)* / d.
pub fn covariant_phase_space_obs(f: &FiniteField, tau: &State) -> Result<BiObservable> {
    let d = f.order();
    if tau.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: tau.dim() });
    }
    BiObservable::from_fn(field_outcomes(f), field_outcomes(f), |x, y| {
        let w = weyl(f, PhasePoint { u1: x, u2: y });
        linalg::hermitian_part(&(&w * tau.matrix() * w.adjoint())) * c(1.0 / d as f64, 0.0)
    })
}

/// Noise weight of the optimal marginals, 1 - sqrt(d)/(2(sqrt(d) + 1)).
pub fn lambda0(d: usize) -> f64 {
    let s = (d as f64).sqrt();
    1.0 - s / (2.0 * (s + 1.0))
}

/// M0(x, y) = |psi_xy><psi_xy| / (2(d + sqrt d)) with
/// psi_xy = delta_x + exp(-2 pi i tr(xy)/p) F delta_{-y}, and the noise
/// weight of its marginals.
pub fn optimal_mub_measurement(f: &FiniteField) -> (BiObservable, f64) {
    (optimal_mub_joint(f), lambda0(f.order()))
}

fn optimal_mub_joint(f: &FiniteField) -> BiObservable {
    let d = f.order();
    let fm = fourier(f);
    let norm = 1.0 / (2.0 * (d as f64 + (d as f64).sqrt()));
    BiObservable::from_fn(field_outcomes(f), field_outcomes(f), |x, y| {
        let phase = root_of_unity(f.trace(f.mul(x, y)), f.characteristic()).conj();
        let col = fm.column(f.neg(y));
        let psi: Vec<Complex64> = (0..d).map(|z| col[z] * phase + if z == x { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect();
        linalg::outer(&psi) * c(norm, 0.0)
    })
    .expect("valid joint observable")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MubSandwich {
    pub d: usize,
    pub p: usize,
    pub n: usize,
    pub lambda0: f64,
    /// log(2 sqrt(d)/(sqrt(d) + 1)).
    pub lower: f64,
    /// Largest error of the optimal measurement found by the state search.
    pub value: f64,
    /// 2 log(2(d + 1)/(d + 3)).
    pub upper: f64,
}

/// Closed-form bounds for the conjugate pair and the numerical worst
/// error of the optimal measurement between them.
pub fn mub_bound_sandwich(f: &FiniteField, cfg: &SolverConfig) -> Result<MubSandwich> {
    cfg.validate()?;
    let d = f.order();
    let (p, n) = (f.characteristic(), f.degree());
    let (q, pp) = mub_pair(f);
    let m = optimal_mub_joint(f);
    let (m1, m2) = (m.marginal1(), m.marginal2());
    let (value, _) = max_error_over_states(&[&q, &pp], &[&m1, &m2], cfg.restarts, cfg.seed, cfg.inner_tol);
    let s = (d as f64).sqrt();
    let df = d as f64;
    Ok(MubSandwich {
        d,
        p,
        n,
        lambda0: lambda0(d),
        lower: (2.0 * s / (s + 1.0)).log2(),
        value,
        upper: 2.0 * (2.0 * (df + 1.0) / (df + 3.0)).log2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn fourier_square_is_parity() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)] {
            let f = FiniteField::new(p, n).unwrap();
            let fm = fourier(&f);
            let minus_one = f.neg(1);
            assert!(close(&(&fm * &fm), &squeeze(&f, minus_one).unwrap(), 1e-12));
            assert!(close(&(&fm * fm.adjoint()), &linalg::identity(f.order()), 1e-12));
        }
    }

    #[test]
    fn optimal_marginals_are_noisy_bases() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let f = FiniteField::new(p, n).unwrap();
            let (q, pp) = mub_pair(&f);
            let (m, l) = optimal_mub_measurement(&f);
            for (a, b) in m.marginal1().effects().iter().zip(q.noisy(l).effects()) {
                assert!(close(a, b, 1e-10));
            }
            for (a, b) in m.marginal2().effects().iter().zip(pp.noisy(l).effects()) {
                assert!(close(a, b, 1e-10));
            }
        }
    }
}
