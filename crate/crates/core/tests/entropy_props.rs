mod common;

use common::*;
use entrimur::entropy::{
    error_function, max_rel_entropy_mixture, mixture_max, rel_entropy, relative_entropy, relative_entropy_raw, s_func,
    shannon, shannon_entropy, ExtendedReal,
};
use entrimur::objects::{numbered_outcomes, BiObservable, ProbabilityDistribution, State};
use entrimur::linalg;
use entrimur::spin;
use proptest::prelude::*;

fn rel(p: &[f64], q: &[f64]) -> ExtendedReal {
    relative_entropy(p, q).unwrap()
}

fn product(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn nonnegative_and_bounded(seed in any::<u64>(), n in 1usize..7, sparse in any::<bool>()) {
        let mut r = rng(seed);
        let p = random_distribution(&mut r, n, sparse);
        let q = random_distribution(&mut r, n, sparse);
        let h = shannon_entropy(&p).unwrap();
        prop_assert!(h >= -1e-15 && h <= (n as f64).log2() + 1e-12);
        prop_assert!(rel(&p, &q) >= ExtendedReal::Finite(-1e-15));
    }

    #[test]
    fn zero_exactly_on_the_diagonal(seed in any::<u64>(), n in 2usize..7) {
        let mut r = rng(seed);
        let p = random_distribution(&mut r, n, true);
        prop_assert!(rel(&p, &p).to_f64().abs() < 1e-12);
        let u = vec![1.0 / n as f64; n];
        let q = near_p(&p, &u, 0.1);
        if p.iter().zip(&q).any(|(a, b)| (a - b).abs() > 1e-9) {
            prop_assert!(rel(&p, &q) > ExtendedReal::Finite(0.0));
        }
    }

    #[test]
    fn zero_entropy_only_for_deltas(seed in any::<u64>(), n in 2usize..7) {
        let mut r = rng(seed);
        let k = (seed % n as u64) as usize;
        let mut delta = vec![0.0; n];
        delta[k] = 1.0;
        prop_assert_eq!(shannon_entropy(&delta).unwrap(), 0.0);
        let p = random_distribution(&mut r, n, false);
        prop_assert!(shannon_entropy(&p).unwrap() > 0.0);
    }

    #[test]
    fn entropy_is_log_size_minus_divergence_from_uniform(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let p = random_distribution(&mut r, n, true);
        let u = vec![1.0 / n as f64; n];
        let lhs = shannon_entropy(&p).unwrap();
        let rhs = (n as f64).log2() - rel(&p, &u).to_f64();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!((shannon_entropy(&u).unwrap() - (n as f64).log2()).abs() < 1e-12);
    }

    #[test]
    fn relabelling_invariance(seed in any::<u64>(), n in 2usize..7) {
        let mut r = rng(seed);
        let p = random_distribution(&mut r, n, true);
        let q = random_distribution(&mut r, n, true);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed % n as u64) as usize);
        perm.swap(0, n - 1);
        let pp: Vec<f64> = perm.iter().map(|&i| p[i]).collect();
        let qq: Vec<f64> = perm.iter().map(|&i| q[i]).collect();
        prop_assert!((shannon_entropy(&pp).unwrap() - shannon_entropy(&p).unwrap()).abs() < 1e-12);
        match (rel(&pp, &qq), rel(&p, &q)) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => prop_assert!((a - b).abs() < 1e-12),
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn concavity_and_joint_convexity(seed in any::<u64>(), n in 2usize..6, lambda in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let p1 = random_distribution(&mut r, n, false);
        let p2 = random_distribution(&mut r, n, false);
        let q1 = random_distribution(&mut r, n, false);
        let q2 = random_distribution(&mut r, n, false);
        let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect::<Vec<_>>();
        let h = shannon_entropy(&mix(&p1, &p2)).unwrap();
        prop_assert!(h >= lambda * shannon_entropy(&p1).unwrap() + (1.0 - lambda) * shannon_entropy(&p2).unwrap() - 1e-12);
        let lhs = rel(&mix(&p1, &p2), &mix(&q1, &q2)).to_f64();
        let rhs = lambda * rel(&p1, &q1).to_f64() + (1.0 - lambda) * rel(&p2, &q2).to_f64();
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn continuity_and_lower_semicontinuity(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let p = random_distribution(&mut r, n, false);
        let q = random_distribution(&mut r, n, true);
        let u = vec![1.0 / n as f64; n];
        let near = |eps: f64| q.iter().zip(&u).map(|(a, b)| (1.0 - eps) * a + eps * b).collect::<Vec<_>>();
        match rel(&p, &q) {
            ExtendedReal::Finite(v) => {
                let close_v = rel(&p, &near(1e-10)).to_f64();
                prop_assert!((close_v - v).abs() < 1e-6);
            }
            ExtendedReal::Infinite => {
                let a = rel(&p, &near(1e-3)).to_f64();
                let b = rel(&p, &near(1e-6)).to_f64();
                prop_assert!(b > a && b.is_finite());
            }
        }
        let h0 = shannon_entropy(&p).unwrap();
        let h1 = shannon_entropy(&near_p(&p, &u, 1e-10)).unwrap();
        prop_assert!((h0 - h1).abs() < 1e-6);
    }

    #[test]
    fn additivity_on_products(seed in any::<u64>(), n in 1usize..5, m in 1usize..5) {
        let mut r = rng(seed);
        let p1 = random_distribution(&mut r, n, false);
        let p2 = random_distribution(&mut r, n, false);
        let q1 = random_distribution(&mut r, m, false);
        let q2 = random_distribution(&mut r, m, false);
        let lhs = rel(&product(&p1, &q1), &product(&p2, &q2)).to_f64();
        let rhs = rel(&p1, &p2).to_f64() + rel(&q1, &q2).to_f64();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}

fn near_p(p: &[f64], u: &[f64], eps: f64) -> Vec<f64> {
    p.iter().zip(u).map(|(a, b)| (1.0 - eps) * a + eps * b).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn mixture_closed_form_matches_vertices(seed in any::<u64>(), n in 1usize..7, lambda in 0.001f64..=1.0) {
        let mut r = rng(seed);
        let q = random_distribution(&mut r, n, true);
        let brute = (0..n)
            .map(|x| {
                let mut delta = vec![0.0; n];
                delta[x] = 1.0;
                let mixed: Vec<f64> = delta.iter().zip(&q).map(|(d, qq)| lambda * d + (1.0 - lambda) * qq).collect();
                relative_entropy_raw(&delta, &mixed)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((brute - mixture_max(lambda, &q).unwrap()).abs() < 1e-12);
        // no interior point beats the vertices
        let p = random_distribution(&mut r, n, false);
        let mixed: Vec<f64> = p.iter().zip(&q).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        prop_assert!(relative_entropy_raw(&p, &mixed) <= brute + 1e-12);
    }
}

#[test]
fn s_func_examples() {
    assert_eq!(s_func(0.0, 0.0).unwrap(), ExtendedReal::Finite(0.0));
    assert_eq!(s_func(0.5, 0.0).unwrap(), ExtendedReal::Infinite);
    let v = s_func((-1.0f64).exp(), 1.0).unwrap().to_f64();
    assert!((v + 0.530738).abs() < 1e-6);
    assert!(s_func(-0.1, 0.5).is_err());
}

#[test]
fn labelled_distribution_examples() {
    let two = numbered_outcomes(2);
    let delta = ProbabilityDistribution::new(two.clone(), vec![1.0, 0.0]).unwrap();
    let u = ProbabilityDistribution::uniform(two.clone());
    assert_eq!(rel_entropy(&delta, &u).unwrap(), ExtendedReal::Finite(1.0));
    assert_eq!(rel_entropy(&delta, &delta).unwrap(), ExtendedReal::Finite(0.0));
    let other = ProbabilityDistribution::new(two.clone(), vec![0.0, 1.0]).unwrap();
    assert_eq!(rel_entropy(&delta, &other).unwrap(), ExtendedReal::Infinite);
    let three = ProbabilityDistribution::uniform(numbered_outcomes(3));
    assert!(rel_entropy(&delta, &three).is_err());
    assert_eq!(shannon(&delta).unwrap(), 0.0);
    assert!((shannon(&ProbabilityDistribution::uniform(numbered_outcomes(4))).unwrap() - 2.0).abs() < 1e-15);
    assert!((max_rel_entropy_mixture(0.5, &u).unwrap() - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    assert_eq!(max_rel_entropy_mixture(1.0, &u).unwrap(), 0.0);
    assert!(max_rel_entropy_mixture(0.0, &u).is_err());
    let mut last = f64::INFINITY;
    for k in 1..=50 {
        let v = max_rel_entropy_mixture(k as f64 / 50.0, &u).unwrap();
        assert!(v < last);
        last = v;
    }
}

#[test]
fn error_function_examples() {
    let (x, y) = spin::target_pair(std::f64::consts::FRAC_PI_2).unwrap();
    let m0 = spin::m_gamma(0.0).unwrap();
    let rho = State::bloch([1.0, 0.0, 0.0]).unwrap();
    let v = error_function(&x, &y, &m0, &rho).unwrap().to_f64();
    assert!((v - 0.228447).abs() < 1e-6);
    // uniform trivial joint: log|X| + log|Y| - H(A) - H(B)
    let mut r = rng(5);
    let a = random_povm(&mut r, 3, 2);
    let b = random_povm(&mut r, 3, 4);
    let uniform = BiObservable::from_fn(a.outcomes().to_vec(), b.outcomes().to_vec(), |_, _| {
        linalg::identity(3) * linalg::c(1.0 / 8.0, 0.0)
    })
    .unwrap();
    let st = random_state(&mut r, 3);
    let expected = 1.0 + 2.0
        - shannon_entropy(&a.probabilities(st.matrix())).unwrap()
        - shannon_entropy(&b.probabilities(st.matrix())).unwrap();
    assert!((error_function(&a, &b, &uniform, &st).unwrap().to_f64() - expected).abs() < 1e-12);
    // a joint measurement of compatible targets has zero error everywhere
    let sharp = spin::spin_observable([0.0, 0.0, 1.0]).unwrap();
    let joint = BiObservable::lueders_product(&sharp, &sharp).unwrap();
    assert_eq!(error_function(&sharp, &sharp, &joint, &random_state(&mut r, 2)).unwrap().to_f64(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn error_function_product_form_and_invariances(seed in any::<u64>(), d in 2usize..4, n1 in 2usize..4, n2 in 2usize..4) {
        let mut r = rng(seed);
        let a = random_povm(&mut r, d, n1);
        let b = random_povm(&mut r, d, n2);
        let m = random_bi(&mut r, d, n1, n2);
        let rho = random_state(&mut r, d);
        let v = error_function(&a, &b, &m, &rho).unwrap().to_f64();
        let pa = a.probabilities(rho.matrix());
        let pb = b.probabilities(rho.matrix());
        let q1 = m.marginal1().probabilities(rho.matrix());
        let q2 = m.marginal2().probabilities(rho.matrix());
        let prod = rel(&product(&pa, &pb), &product(&q1, &q2)).to_f64();
        prop_assert!((v - prod).abs() < 1e-10);
        let u = linalg::random_unitary(&mut r, d);
        let rho_u = State::new(u.adjoint() * rho.matrix() * &u).unwrap();
        let vu = error_function(&a.conjugate(&u), &b.conjugate(&u), &m.conjugate(&u), &rho_u).unwrap().to_f64();
        prop_assert!((v - vu).abs() < 1e-10);
        let swapped = error_function(&b, &a, &m.transposed(), &rho).unwrap().to_f64();
        prop_assert!((v - swapped).abs() < 1e-12);
    }
}
