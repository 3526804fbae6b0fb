//! Arithmetic in GF(p^n) with elements encoded as integers in base p
//! (digit k is the coefficient of x^k).

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: usize,
    n: usize,
    q: usize,
    /// Monic modulus, coefficients c_0..c_n.
    modulus: Vec<usize>,
    add: Vec<usize>,
    mul: Vec<usize>,
    trace: Vec<usize>,
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k))
}

fn digits(mut a: usize, p: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for d in out.iter_mut() {
        *d = a % p;
        a /= p;
    }
    out
}

fn undigits(ds: &[usize], p: usize) -> usize {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo the monic polynomial `m` over Z_p.
fn poly_rem(a: &[usize], m: &[usize], p: usize) -> Vec<usize> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &mk) in m.iter().enumerate() {
                r[shift + k] = (r[shift + k] + p - (lead * mk) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn poly_mul(a: &[usize], b: &[usize], p: usize) -> Vec<usize> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// True if no monic polynomial of degree 1..=deg/2 divides `m`.
fn is_irreducible(m: &[usize], p: usize) -> bool {
    let deg = m.len() - 1;
    for k in 1..=deg / 2 {
        for low in 0..p.pow(k as u32) {
            let mut f = digits(low, p, k);
            f.push(1);
            if poly_rem(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// GF(p^n) with the smallest irreducible modulus.
pub fn field_construct(p: usize, n: usize) -> Result<FiniteField> {
    FiniteField::new(p, n)
}

/// Field trace x + x^p + ... + x^{p^{n-1}}, as an element of Z_p.
pub fn field_trace(f: &FiniteField, x: usize) -> usize {
    f.trace(x)
}

/// Lexicographically smallest monic irreducible polynomial of degree n,
/// comparing coefficients from degree n-1 down to 0.
pub fn smallest_irreducible(p: usize, n: usize) -> Vec<usize> {
    for code in 0..p.pow(n as u32) {
        let mut m = digits(code, p, n);
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FiniteField {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("p = {p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(n as u32).filter(|&q| q <= MAX_ORDER as u128).ok_or_else(|| {
            Error::InvalidParameter(format!("field order {p}^{n} exceeds {MAX_ORDER}"))
        })? as usize;
        let modulus = smallest_irreducible(p, n);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = digits(a, p, n);
            for b in 0..q {
                let db = digits(b, p, n);
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&s, p);
                let mut prod = poly_rem(&poly_mul(&da, &db, p), &modulus, p);
                prod.resize(n, 0);
                mul[a * q + b] = undigits(&prod, p);
            }
        }
        let mut field = Self { p, n, q, modulus, add, mul, trace: vec![0; q] };
        for a in 0..q {
            let mut acc = 0;
            let mut power = a;
            for _ in 0..n {
                acc = field.add(acc, power);
                power = field.pow(power, p);
            }
            if acc >= p {
                return Err(Error::InvalidParameter("trace left the prime subfield".into()));
            }
            field.trace[a] = acc;
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[usize] {
        &self.modulus
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.q
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        let d: Vec<usize> = digits(a, self.p, self.n).iter().map(|&x| (self.p - x) % self.p).collect();
        undigits(&d, self.p)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn pow(&self, a: usize, mut e: usize) -> usize {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: usize) -> Option<usize> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.q - 2))
        }
    }

    /// tr(x) = sum_k x^{p^k}, an element of the prime field 0..p.
    pub fn trace(&self, a: usize) -> usize {
        self.trace[a]
    }
}
