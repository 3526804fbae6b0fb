//! One-dimensional grid search with golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizer of a unimodal `f` on [a, b] to abscissa tolerance `tol`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|t| -f(t), a, b, tol);
    (x, -v)
}

/// Global maximum of `f` on [a, b]: evaluate `n` grid points, then refine
/// every grid-local maximum within the best few by golden section.
pub fn grid_max(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, tol: f64, periodic: bool) -> (f64, f64) {
    let h = if periodic { (b - a) / n as f64 } else { (b - a) / (n - 1) as f64 };
    let xs: Vec<f64> = (0..n).map(|k| a + h * k as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&k| {
            let left = if k > 0 { vals[k - 1] } else if periodic { vals[n - 1] } else { f64::NEG_INFINITY };
            let right = if k + 1 < n { vals[k + 1] } else if periodic { vals[0] } else { f64::NEG_INFINITY };
            vals[k] >= left && vals[k] >= right
        })
        .collect();
    peaks.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    peaks.truncate(6);
    let mut best = (xs[peaks[0]], vals[peaks[0]]);
    for &k in &peaks {
        let (lo, hi) = if periodic { (xs[k] - h, xs[k] + h) } else { ((xs[k] - h).max(a), (xs[k] + h).min(b)) };
        let (x, v) = golden_max(&f, lo, hi, tol);
        for (x, v) in [(x, v), (xs[k], vals[k])] {
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_and_periodic_maxima() {
        let (x, v) = golden_max(|t| -(t - 0.3) * (t - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8 && v.abs() < 1e-15);
        let (x, _) = grid_max(|t| (t - 1.0).cos() + 0.3 * (3.0 * t).cos(), 0.0, std::f64::consts::TAU, 720, 1e-10, true);
        let check = grid_max(|t| (t - 1.0).cos() + 0.3 * (3.0 * t).cos(), -3.0, 3.5, 20000, 1e-12, false);
        assert!((x - check.0).abs() < 1e-6);
    }
}
