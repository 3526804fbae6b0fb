mod common;

use common::*;
use entrimur::bounds::{kp_lower_bound, prep_coefficient};
use entrimur::field::{field_construct, field_trace, smallest_irreducible, FiniteField};
use entrimur::linalg::{self, c, identity, pauli_x, pauli_y, pauli_z, ComplexMatrix};
use entrimur::mub::{
    covariant_phase_space_obs, fourier, lambda0, mub_pair, optimal_mub_measurement, squeeze, weyl, PhasePoint,
};
use entrimur::objects::State;
use entrimur::solver::SolverConfig;
use entrimur::spin;
use num_complex::Complex64;
use std::f64::consts::PI;

const SMALL: [(usize, usize); 10] = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1)];

fn chi(f: &FiniteField, t: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * f.trace(t) as f64 / f.characteristic() as f64)
}

fn pt(u1: usize, u2: usize) -> PhasePoint {
    PhasePoint { u1, u2 }
}

/// Equal up to a global phase.
fn same_ray(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    let k = (0..a.len()).max_by(|&i, &j| a[i].norm().partial_cmp(&a[j].norm()).unwrap()).unwrap();
    if b[k].norm() < 1e-12 {
        return false;
    }
    let phase = a[k] / b[k];
    (phase.norm() - 1.0).abs() < tol && close(a, &(b * phase), tol)
}

#[test]
fn field_axioms_exhaustive() {
    for (p, n) in SMALL {
        let f = FiniteField::new(p, n).unwrap();
        let q = f.order();
        assert_eq!(q, p.pow(n as u32));
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            match f.inv(a) {
                Some(ai) => assert_eq!(f.mul(a, ai), 1),
                None => assert_eq!(a, 0),
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(f.add(a, b), b), a);
                assert_eq!(field_trace(&f, f.add(a, b)), (field_trace(&f, a) + field_trace(&f, b)) % p);
                for cc in 0..q {
                    assert_eq!(f.add(f.add(a, b), cc), f.add(a, f.add(b, cc)));
                    assert_eq!(f.mul(f.mul(a, b), cc), f.mul(a, f.mul(b, cc)));
                    assert_eq!(f.mul(a, f.add(b, cc)), f.add(f.mul(a, b), f.mul(a, cc)));
                }
            }
            // trace lands in Z_p, and a^q = a
            assert!(field_trace(&f, a) < p);
            assert_eq!(f.pow(a, q), a);
        }
        // the trace is onto Z_p
        let hit: std::collections::BTreeSet<_> = (0..q).map(|a| field_trace(&f, a)).collect();
        assert_eq!(hit.len(), p);
    }
}

#[test]
fn field_construction_examples() {
    let z2 = field_construct(2, 1).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert_eq!(z2.add(a, b), a ^ b);
            assert_eq!(z2.mul(a, b), a & b);
        }
    }
    assert_eq!(field_construct(2, 2).unwrap().modulus(), &[1, 1, 1]);
    assert_eq!(field_construct(3, 2).unwrap().modulus(), &[1, 0, 1]);
    assert_eq!(smallest_irreducible(2, 3), vec![1, 1, 0, 1]);
    let gf4 = field_construct(2, 2).unwrap();
    let omega = 2;
    assert_eq!(gf4.mul(omega, omega), gf4.add(omega, 1));
    assert_eq!(field_trace(&gf4, omega), 1);
    let gf7 = field_construct(7, 1).unwrap();
    for x in 0..7 {
        assert_eq!(field_trace(&gf7, x), x);
    }
    assert!(field_construct(4, 1).is_err());
    assert!(field_construct(2, 7).is_err());
    assert!(field_construct(3, 0).is_err());
    assert!(field_construct(2, 6).is_ok());
}

#[test]
fn weyl_composition_and_squeezing() {
    for (p, n) in [(2, 1), (3, 1), (2, 2)] {
        let f = FiniteField::new(p, n).unwrap();
        let d = f.order();
        assert!(close(&weyl(&f, pt(0, 0)), &identity(d), 0.0));
        assert!(close(&squeeze(&f, 1).unwrap(), &identity(d), 0.0));
        assert!(squeeze(&f, 0).is_err());
        for u1 in 0..d {
            for u2 in 0..d {
                let wu = weyl(&f, pt(u1, u2));
                assert!(close(&(&wu * wu.adjoint()), &identity(d), 1e-12));
                for v1 in 0..d {
                    for v2 in 0..d {
                        let lhs = &wu * weyl(&f, pt(v1, v2));
                        let rhs = weyl(&f, pt(u1, u2).add(&f, pt(v1, v2))) * chi(&f, f.mul(u2, v1));
                        assert!(close(&lhs, &rhs, 1e-12));
                    }
                }
                for a in 1..d {
                    let da = squeeze(&f, a).unwrap();
                    let ai = f.inv(a).unwrap();
                    let lhs = &da * &wu * da.adjoint();
                    assert!(close(&lhs, &weyl(&f, pt(f.mul(a, u1), f.mul(ai, u2))), 1e-12));
                }
            }
        }
    }
    let f = FiniteField::new(3, 1).unwrap();
    assert!(PhasePoint::new(&f, 3, 0).is_err());
    assert_eq!(PhasePoint::new(&f, 2, 1).unwrap(), pt(2, 1));
}

#[test]
fn fourier_and_unbiasedness() {
    for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3)] {
        let f = FiniteField::new(p, n).unwrap();
        let d = f.order();
        let fm = fourier(&f);
        assert!(close(&(&fm * fm.adjoint()), &identity(d), 1e-12));
        let f4 = &fm * &fm * &fm * &fm;
        assert!(close(&f4, &identity(d), 1e-12));
        let (q, pp) = mub_pair(&f);
        for x in 0..d {
            assert!(close(pp.effect(x), &(fm.adjoint() * q.effect(x) * &fm), 1e-12));
            for y in 0..d {
                let overlap = linalg::real_trace_product(q.effect(x), pp.effect(y));
                assert!((overlap - 1.0 / d as f64).abs() < 1e-12);
            }
        }
    }
}

/// Rotation by 2 pi / 3 about (1, 1, 1): s3 -> s1, s1 -> s2, s2 -> s3.
fn cyclic() -> ComplexMatrix {
    (identity(2) - (pauli_x() + pauli_y() + pauli_z()) * c(0.0, 1.0)) * c(0.5, 0.0)
}

#[test]
fn qubit_case_matches_spin_components() {
    let u = cyclic();
    let conj = |m: &ComplexMatrix| &u * m * u.adjoint();
    assert!(close(&conj(&pauli_z()), &pauli_x(), 1e-12));
    assert!(close(&conj(&pauli_x()), &pauli_y(), 1e-12));

    let f = FiniteField::new(2, 1).unwrap();
    let fm = fourier(&f);
    // Hadamard in the computational frame, (s1 + s2)/sqrt2 once Q is identified with s1
    assert!(same_ray(&fm, &((pauli_x() + pauli_z()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0)), 1e-12));
    assert!(same_ray(&conj(&fm), &((pauli_x() + pauli_y()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0)), 1e-12));

    let (q, pp) = mub_pair(&f);
    let x = spin::spin_observable([1.0, 0.0, 0.0]).unwrap();
    let y = spin::spin_observable([0.0, 1.0, 0.0]).unwrap();
    for k in 0..2 {
        assert!(close(&conj(q.effect(k)), x.effect(k), 1e-12));
        assert!(close(&conj(pp.effect(k)), y.effect(k), 1e-12));
    }
    let (m0, l) = optimal_mub_measurement(&f);
    let spin_m0 = spin::m_gamma(0.0).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!(close(&conj(m0.effect(i, j)), spin_m0.effect(i, j), 1e-12));
        }
    }
    assert!((l - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
}

#[test]
fn optimal_measurement_is_translation_covariant() {
    for (p, n) in [(2, 1), (3, 1), (2, 2)] {
        let f = FiniteField::new(p, n).unwrap();
        let d = f.order();
        let (m0, _) = optimal_mub_measurement(&f);
        for v1 in 0..d {
            for v2 in 0..d {
                let w = weyl(&f, pt(v1, v2));
                for x in 0..d {
                    for y in 0..d {
                        let moved = &w * m0.effect(x, y) * w.adjoint();
                        assert!(close(&moved, m0.effect(f.add(x, v1), f.add(y, v2)), 1e-10));
                    }
                }
            }
        }
    }
}

#[test]
fn optimal_measurement_marginals_and_lambda() {
    assert!((lambda0(4) - 2.0 / 3.0).abs() < 1e-15);
    for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let f = FiniteField::new(p, n).unwrap();
        let (q, pp) = mub_pair(&f);
        let (m0, l) = optimal_mub_measurement(&f);
        assert!(max_dev(m0.marginal1().effects(), q.noisy(l).effects()) < 1e-10);
        assert!(max_dev(m0.marginal2().effects(), pp.noisy(l).effects()) < 1e-10);
        for e in m0.effects() {
            // rank one
            let ev = linalg::eigenvalues(e);
            assert!(ev.iter().filter(|&&v| v > 1e-10).count() == 1);
        }
    }
}

#[test]
fn phase_space_marginals_are_convolutions() {
    let mut r = rng(21);
    for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let f = FiniteField::new(p, n).unwrap();
        let d = f.order();
        let (q, pp) = mub_pair(&f);
        for _ in 0..3 {
            let tau = random_state(&mut r, d);
            let m = covariant_phase_space_obs(&f, &tau).unwrap();
            let qt = q.probabilities(tau.matrix());
            let pt_ = pp.probabilities(tau.matrix());
            for x in 0..d {
                let mut conv1 = linalg::zeros(d);
                let mut conv2 = linalg::zeros(d);
                for z in 0..d {
                    conv1 += q.effect(z) * c(qt[f.sub(z, x)], 0.0);
                    conv2 += pp.effect(z) * c(pt_[f.sub(z, x)], 0.0);
                }
                assert!(close(&m.marginal1().effects()[x], &conv1, 1e-10));
                assert!(close(&m.marginal2().effects()[x], &conv2, 1e-10));
            }
            let mut total = linalg::zeros(d);
            for e in m.effects() {
                total += e;
            }
            assert!(close(&total, &identity(d), 1e-10));
        }
        let flat = covariant_phase_space_obs(&f, &State::maximally_mixed(d)).unwrap();
        for e in flat.effects() {
            assert!(close(e, &(identity(d) * c(1.0 / (d * d) as f64, 0.0)), 1e-12));
        }
        assert!(covariant_phase_space_obs(&f, &State::maximally_mixed(d + 1)).is_err());
    }
}

#[test]
fn preparation_uncertainty_of_conjugate_bases() {
    let cfg = SolverConfig::default();
    for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let f = FiniteField::new(p, n).unwrap();
        let d = f.order() as f64;
        let (q, pp) = mub_pair(&f);
        assert!((prep_coefficient(&q, &pp, &cfg).unwrap() - d.log2()).abs() < 1e-6);
        assert!((kp_lower_bound(&q, &pp).unwrap() - d.log2()).abs() < 1e-10);
    }
}
