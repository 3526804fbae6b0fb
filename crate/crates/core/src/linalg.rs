//! Dense complex matrices: Hermitian eigensolver, tensor products, partial
//! traces and permutation operators on tensor powers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Default tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default tolerance for positivity checks.
pub const PSD_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(d, d)
}

/// Builds a matrix from real entries given row by row.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let n = rows.len();
    ComplexMatrix::from_fn(n, rows[0].len(), |i, j| c(rows[i][j], 0.0))
}

pub fn diag(entries: &[f64]) -> ComplexMatrix {
    let n = entries.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c(entries[i], 0.0) } else { c(0.0, 0.0) })
}

/// Projector |v><v| (no normalization applied).
pub fn outer(v: &[Complex64]) -> ComplexMatrix {
    let n = v.len();
    ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && hermiticity_defect(m) <= tol
}

pub fn check_square(m: &ComplexMatrix, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.nrows().max(m.ncols()) });
    }
    Ok(())
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
/// Columns of the returned matrix are the matching orthonormal eigenvectors.
pub fn eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)].re], identity(1));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    eigh(m).0
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    eigenvalues(m)[0]
}

pub fn max_eigenvalue(m: &ComplexMatrix) -> f64 {
    *eigenvalues(m).last().unwrap()
}

pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    is_hermitian(m, tol.max(HERMITIAN_TOL)) && min_eigenvalue(m) >= -tol
}

/// Applies `f` to the spectrum of the Hermitian part of `m`.
pub fn spectral_map(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, vecs) = eigh(m);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for j in 0..n {
        let fj = f(vals[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    &scaled * vecs.adjoint()
}

/// Frobenius-nearest positive semidefinite matrix.
pub fn psd_projection(m: &ComplexMatrix) -> ComplexMatrix {
    spectral_map(m, |x| x.max(0.0))
}

pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    spectral_map(m, |x| x.max(0.0).sqrt())
}

/// Inverse square root of a positive definite matrix.
pub fn inv_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    spectral_map(m, |x| 1.0 / x.sqrt())
}

/// Orthogonal projector onto the span of eigenvectors with |eigenvalue| <= tol.
pub fn kernel_projector(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    spectral_map(m, |x| if x.abs() <= tol { 1.0 } else { 0.0 })
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    max_eigenvalue(&(m.adjoint() * m)).max(0.0).sqrt()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

/// Re Tr(a b), the real inner product of two Hermitian matrices.
pub fn real_trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut out = identity(1);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Partial trace over one factor of a bipartite operator on C^d1 (x) C^d2.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), which: Factor) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    check_square(m, d1 * d2)?;
    Ok(match which {
        Factor::Second => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Factor::First => ComplexMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()
        }),
    })
}

/// Traces out factors 2..n of an operator on (C^d)^{(x) n}.
pub fn trace_all_but_first(m: &ComplexMatrix, d: usize, n: usize) -> Result<ComplexMatrix> {
    let rest = d.pow(n as u32 - 1);
    partial_trace(m, (d, rest), Factor::Second)
}

/// Permutation operator on (C^d)^{(x) n}: sends factor k to position perm[k].
pub fn permutation_operator(d: usize, perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let dim = d.pow(n as u32);
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; n];
    let mut moved = vec![0usize; n];
    for idx in 0..dim {
        let mut r = idx;
        for k in (0..n).rev() {
            digits[k] = r % d;
            r /= d;
        }
        for k in 0..n {
            moved[perm[k]] = digits[k];
        }
        let target = moved.iter().fold(0, |acc, &x| acc * d + x);
        out[(target, idx)] = c(1.0, 0.0);
    }
    out
}

/// The swap operator on C^d (x) C^d.
pub fn swap(d: usize) -> ComplexMatrix {
    permutation_operator(d, &[1, 0])
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Projector onto the symmetric subspace of (C^d)^{(x) n}.
pub fn symmetric_projector(d: usize, n: usize) -> ComplexMatrix {
    let perms = permutations(n);
    let dim = d.pow(n as u32);
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for p in &perms {
        acc += permutation_operator(d, p);
    }
    acc * c(1.0 / perms.len() as f64, 0.0)
}

pub fn pauli_x() -> ComplexMatrix {
    from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> ComplexMatrix {
    diag(&[1.0, -1.0])
}

/// r0 I + r . sigma for a real three-vector r.
pub fn bloch_operator(r0: f64, r: [f64; 3]) -> ComplexMatrix {
    identity(2) * c(r0, 0.0) + pauli_x() * c(r[0], 0.0) + pauli_y() * c(r[1], 0.0) + pauli_z() * c(r[2], 0.0)
}

/// Unit vector drawn uniformly from the sphere in C^d.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| c(gaussian(rng), gaussian(rng))).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random unitary via Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| c(gaussian(rng), gaussian(rng))).collect();
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
