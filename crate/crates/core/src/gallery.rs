//! Two compatible pairs that are not sequentially compatible in one
//! order, with their explicit joint observables.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};
use crate::linalg::{self, c, from_real_rows, identity, ComplexMatrix};
use crate::objects::{numbered_outcomes, require_hermitian, BiObservable, Observable};

#[derive(Debug, Clone)]
pub struct GalleryCase {
    pub name: String,
    pub a: Observable,
    pub b: Observable,
    pub provided_joint: Option<BiObservable>,
    pub notes: String,
}

impl GalleryCase {
    /// Largest entrywise deviation between the marginals of the provided
    /// joint and the targets; None when there is no joint.
    pub fn marginal_defect(&self) -> Option<f64> {
        let m = self.provided_joint.as_ref()?;
        let dev = |x: &Observable, y: &Observable| {
            x.effects()
                .iter()
                .zip(y.effects())
                .map(|(p, q)| (p - q).iter().map(|z| z.norm()).fold(0.0, f64::max))
                .fold(0.0, f64::max)
        };
        Some(dev(&m.marginal1(), &self.a).max(dev(&m.marginal2(), &self.b)))
    }
}

fn scaled(k: f64, rows: &[&[f64]]) -> ComplexMatrix {
    from_real_rows(rows) * c(k, 0.0)
}

/// Three-level pair with two and five outcomes and a joint whose
/// effects are those of B, placed on the support of A.
pub fn hw_example_1() -> GalleryCase {
    let r = SQRT_2;
    let a = vec![
        scaled(0.5, &[&[2.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
        scaled(0.5, &[&[0.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 1.0]]),
    ];
    let b = vec![
        scaled(0.25, &[&[2.0, 0.0, -r], &[0.0, 0.0, 0.0], &[-r, 0.0, 1.0]]),
        scaled(0.1, &[&[0.0, 0.0, 0.0], &[0.0, 1.0, -2.0], &[0.0, -2.0, 4.0]]),
        scaled(0.5, &[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]),
        scaled(0.1, &[&[0.0, 0.0, 0.0], &[0.0, 4.0, 2.0], &[0.0, 2.0, 1.0]]),
        scaled(0.25, &[&[2.0, 0.0, r], &[0.0, 0.0, 0.0], &[r, 0.0, 1.0]]),
    ];
    // Outcome 1 of A carries B(1), B(5); outcome 2 carries B(2), B(3), B(4).
    let first = [true, false, false, false, true];
    let m = BiObservable::from_fn(numbered_outcomes(2), numbered_outcomes(5), |x, y| {
        if (x == 0) == first[y] {
            b[y].clone()
        } else {
            linalg::zeros(3)
        }
    })
    .expect("valid joint");
    GalleryCase {
        name: "hw_example_1".into(),
        a: Observable::new(numbered_outcomes(2), a).expect("valid observable"),
        b: Observable::new(numbered_outcomes(5), b).expect("valid observable"),
        provided_joint: Some(m),
        notes: "compatible; some instrument for B leaves A undisturbed, every instrument for A disturbs B".into(),
    }
}

fn check_projection(p: &ComplexMatrix, what: &str) -> Result<()> {
    require_hermitian(p, what)?;
    let dev = (p * p - p).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > 1e-10 {
        return Err(Error::InvalidParameter(format!("{what} is not a projection (defect {dev:e})")));
    }
    Ok(())
}

/// Two-outcome pair built from noncommuting projections P and Q with
/// equal noise lambda in (1/2, 2/3].
pub fn hw_example_2(lambda: f64, p: &ComplexMatrix, q: &ComplexMatrix) -> Result<GalleryCase> {
    if !(lambda > 0.5 && lambda <= 2.0 / 3.0 + 1e-15) {
        return Err(Error::Domain(format!("lambda = {lambda} outside (1/2, 2/3]")));
    }
    check_projection(p, "P")?;
    check_projection(q, "Q")?;
    if p.nrows() != q.nrows() {
        return Err(Error::DimensionMismatch { expected: p.nrows(), found: q.nrows() });
    }
    let comm = (p * q - q * p).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if comm < 1e-10 {
        return Err(Error::InvalidParameter("P and Q commute".into()));
    }
    let d = p.nrows();
    let id = identity(d);
    let k = |x: f64| c(x, 0.0);
    let m = [
        &id * k(1.0 - lambda),
        p * k(2.0 * lambda - 1.0),
        q * k(2.0 * lambda - 1.0),
        (p + q) * k(1.0 - 1.5 * lambda) + (&id * k(2.0) - p - q) * k(lambda / 2.0),
    ];
    let noisy = |proj: &ComplexMatrix| {
        let perp = &id - proj;
        vec![proj * k(lambda) + &perp * k(1.0 - lambda), &perp * k(lambda) + proj * k(1.0 - lambda)]
    };
    let joint = BiObservable::new(numbered_outcomes(2), numbered_outcomes(2), m.to_vec())?;
    Ok(GalleryCase {
        name: "hw_example_2".into(),
        a: Observable::new(numbered_outcomes(2), noisy(p))?,
        b: Observable::new(numbered_outcomes(2), noisy(q))?,
        provided_joint: Some(joint),
        notes: format!("compatible by construction at lambda = {lambda}; no instrument for A leaves B undisturbed"),
    })
}

/// Default projections: P onto |0>, Q onto the +1 eigenvector of (s1 + s3)/sqrt2.
pub fn default_projections() -> (ComplexMatrix, ComplexMatrix) {
    let p = linalg::diag(&[1.0, 0.0]);
    let q = linalg::bloch_operator(0.5, [FRAC_1_SQRT_2 / 2.0, 0.0, FRAC_1_SQRT_2 / 2.0]);
    (p, q)
}

pub fn hw_example_2_default(lambda: f64) -> Result<GalleryCase> {
    let (p, q) = default_projections();
    hw_example_2(lambda, &p, &q)
}
