mod common;

use std::f64::consts::FRAC_PI_2;

use common::*;
use entrimur::bounds::{cloning_upper_bound, shannon_cap};
use entrimur::entropy::{error_function, error_function_multi, ExtendedReal};
use entrimur::objects::{Observable, State};
use entrimur::solver::{self, Bracket, SolverConfig, StateAtlas};
use entrimur::spin;

const EXACT: f64 = 0.228_446_744_929_426_4;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

/// Trace monotonicity, witness validity and the closed-form caps.
fn check_run(targets: &[&Observable], br: &Bracket) {
    let c = cfg();
    let mut best_upper = f64::INFINITY;
    let mut last_lower = f64::NEG_INFINITY;
    for r in &br.trace {
        assert!(r.lower >= last_lower - 1e-12, "lower decreased: {:?}", br.trace);
        last_lower = r.lower;
        let running = best_upper.min(r.upper);
        assert!(running <= best_upper);
        best_upper = running;
    }
    assert!(br.lower <= br.upper + 1e-9);
    let check = SolverConfig { restarts: 64, seed: c.seed ^ 0x5A5A, ..c.clone() };
    let (again, _) = solver::divergence(targets, &br.witness_measurement, &check).unwrap();
    assert!(again >= br.lower - 1e-9, "witness {again} below lower {}", br.lower);
    let at_worst = error_function_multi(targets, &br.witness_measurement, &br.worst_state).unwrap().to_f64();
    assert!((at_worst - br.upper).abs() < 1e-6, "{at_worst} vs {}", br.upper);
    if targets.len() == 2 {
        assert!(br.upper <= cloning_upper_bound(targets).unwrap() + c.outer_tol);
        let cap = shannon_cap(targets[0], &c).unwrap().min(shannon_cap(targets[1], &c).unwrap());
        assert!(br.upper <= cap + c.outer_tol);
    }
    for s in br.atlas.states() {
        assert!(entrimur::linalg::eigenvalues(s.matrix())[0].abs() < 1e-9 || s.dim() == 1);
    }
}

fn overlap(x: &Bracket, y: &Bracket, tol: f64) -> bool {
    x.lower <= y.upper + tol && y.lower <= x.upper + tol
}

#[test]
fn orthogonal_spins() {
    let (a, b) = spin::target_pair(FRAC_PI_2).unwrap();
    let br = solver::icomp(&a, &b, &cfg()).unwrap();
    check_run(&[&a, &b], &br);
    assert!(br.contains(EXACT, 1e-3), "{} {}", br.lower, br.upper);
    assert!(!br.saturated);
    let back = solver::icomp(&b, &a, &cfg()).unwrap();
    check_run(&[&b, &a], &back);
    assert!(overlap(&br, &back, 2.0 * cfg().outer_tol));
}

#[test]
fn unitary_invariance_on_random_qubits() {
    let mut r = rng(31);
    for _ in 0..2 {
        let a = random_sharp_qubit(&mut r);
        let b = random_povm(&mut r, 2, 2);
        let u = entrimur::linalg::random_unitary(&mut r, 2);
        let base = solver::icomp(&a, &b, &cfg()).unwrap();
        let (au, bu) = (a.conjugate(&u), b.conjugate(&u));
        let moved = solver::icomp(&au, &bu, &cfg()).unwrap();
        check_run(&[&a, &b], &base);
        check_run(&[&au, &bu], &moved);
        assert!(overlap(&base, &moved, 2.0 * cfg().outer_tol), "{:?} {:?}", (base.lower, base.upper), (moved.lower, moved.upper));
        let rho = random_state(&mut r, 2);
        let m = random_bi(&mut r, 2, 2, 2);
        let m = entrimur::objects::BiObservable::new(a.outcomes().to_vec(), b.outcomes().to_vec(), m.effects().to_vec()).unwrap();
        let e0 = error_function(&a, &b, &m, &rho).unwrap().to_f64();
        let rho_u = State::new(u.adjoint() * rho.matrix() * &u).unwrap();
        let e1 = error_function(&au, &bu, &m.conjugate(&u), &rho_u).unwrap().to_f64();
        assert!((e0 - e1).abs() < 1e-10);
    }
}

#[test]
fn compatible_pairs_vanish() {
    let z = spin::spin_observable([0.0, 0.0, 1.0]).unwrap();
    let noisy = z.noisy(0.4);
    let br = solver::icomp(&z, &noisy, &cfg()).unwrap();
    check_run(&[&z, &noisy], &br);
    assert!(br.upper <= 1e-4, "{}", br.upper);
    let (a, b) = spin::target_pair(FRAC_PI_2).unwrap();
    let (an, bn) = (a.noisy(0.5), b.noisy(0.5));
    let br = solver::icomp(&an, &bn, &cfg()).unwrap();
    assert!(br.upper <= 1e-4, "{}", br.upper);
}

#[test]
fn error_disturbance_with_sharp_second() {
    let (a, b) = spin::target_pair(FRAC_PI_2).unwrap();
    let br = solver::iad(&a, &b, &cfg()).unwrap();
    check_run(&[&a, &b], &br);
    assert!(br.contains(EXACT, 2.0 * cfg().outer_tol), "{} {}", br.lower, br.upper);
    assert!(br.witness_instrument.is_some());
}

#[test]
fn three_targets_bracket() {
    let t = spin::three_spin_targets();
    let br = solver::icomp_multi(&[&t[0], &t[1], &t[2]], &cfg()).unwrap();
    check_run(&[&t[0], &t[1], &t[2]], &br);
    assert!(br.contains((3.0 - 3f64.sqrt()).log2(), 1e-3), "{} {}", br.lower, br.upper);
}

#[test]
fn max_over_states_examples() {
    let (a, b) = spin::target_pair(FRAC_PI_2).unwrap();
    let m0 = spin::m_gamma(0.0).unwrap();
    let (v, s) = solver::max_over_states(&a, &b, &m0, &cfg()).unwrap();
    assert!((v.to_f64() - EXACT).abs() < 1e-7);
    assert!((error_function(&a, &b, &m0, &s).unwrap().to_f64() - EXACT).abs() < 1e-7);
    let vertex = spin::m_gamma(1.0).unwrap();
    let (v, s) = solver::max_over_states(&a, &b, &vertex, &cfg()).unwrap();
    assert_eq!(v, ExtendedReal::Infinite);
    assert_eq!(error_function(&a, &b, &vertex, &s).unwrap(), ExtendedReal::Infinite);
    let bad = SolverConfig { outer_tol: -1.0, ..cfg() };
    assert!(solver::max_over_states(&a, &b, &m0, &bad).is_err());
}

#[test]
fn atlas_holds_pure_states_only() {
    let mut atlas = StateAtlas::new();
    assert!(atlas.is_empty());
    atlas.push(State::bloch([0.0, 0.0, 1.0]).unwrap()).unwrap();
    assert!(atlas.push(State::maximally_mixed(2)).is_err());
    assert!(atlas.push(State::bloch([0.3, 0.0, 0.0]).unwrap()).is_err());
    assert_eq!(atlas.len(), 1);
}
