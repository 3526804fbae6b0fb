#![allow(dead_code)]

use entrimur::linalg::{self, c, ComplexMatrix};
use entrimur::objects::{numbered_outcomes, BiObservable, Instrument, Observable, State};
use entrimur::spin;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() <= tol)
}

pub fn max_dev(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).iter().map(|z| z.norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
}

/// Random full-rank POVM: S^{-1/2} G_k* G_k S^{-1/2}.
pub fn random_effects(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<ComplexMatrix> {
    let gs: Vec<ComplexMatrix> = (0..n).map(|_| linalg::random_ginibre(rng, d, d)).collect();
    let mut s = linalg::zeros(d);
    for g in &gs {
        s += g.adjoint() * g;
    }
    let r = linalg::inv_sqrt(&s);
    gs.iter().map(|g| linalg::hermitian_part(&(&r * g.adjoint() * g * &r))).collect()
}

pub fn random_povm(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Observable {
    Observable::from_effects(random_effects(rng, d, n)).unwrap()
}

pub fn random_bi(rng: &mut ChaCha8Rng, d: usize, n1: usize, n2: usize) -> BiObservable {
    BiObservable::new(numbered_outcomes(n1), numbered_outcomes(n2), random_effects(rng, d, n1 * n2)).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng, d: usize) -> State {
    State::pure(&linalg::random_unit_vector(rng, d)).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, d: usize) -> State {
    let g = linalg::random_ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    State::new(linalg::hermitian_part(&(m * c(1.0 / t, 0.0)))).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    linalg::hermitian_part(&linalg::random_ginibre(rng, d, d))
}

pub fn random_unit3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let s = random_pure(rng, 2);
    let m = s.matrix();
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re]
}

pub fn random_sharp_qubit(rng: &mut ChaCha8Rng) -> Observable {
    spin::spin_observable(random_unit3(rng)).unwrap()
}

/// Instrument with at least `k` random Kraus operators per outcome, enough
/// for the total to be invertible.
pub fn random_instrument(rng: &mut ChaCha8Rng, d_in: usize, d_out: usize, n: usize, k: usize) -> Instrument {
    let k = k.max(d_in.div_ceil(n * d_out));
    let ks: Vec<Vec<ComplexMatrix>> =
        (0..n).map(|_| (0..k).map(|_| linalg::random_ginibre(rng, d_out, d_in)).collect()).collect();
    let mut s = linalg::zeros(d_in);
    for kx in &ks {
        for op in kx {
            s += op.adjoint() * op;
        }
    }
    let r = linalg::inv_sqrt(&s);
    let normalized: Vec<Vec<ComplexMatrix>> =
        ks.iter().map(|kx| kx.iter().map(|op| op * &r).collect()).collect();
    Instrument::from_kraus(numbered_outcomes(n), &normalized).unwrap()
}

/// Probability vector with entries from a symmetric Dirichlet-like draw;
/// with `sparse`, some entries are exactly zero.
pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize, sparse: bool) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    if sparse {
        for x in w.iter_mut() {
            if rng.gen::<f64>() < 0.3 {
                *x = 0.0;
            }
        }
        if w.iter().all(|&x| x == 0.0) {
            w[0] = 1.0;
        }
    }
    let t: f64 = w.iter().sum();
    w.iter().map(|x| x / t).collect()
}
