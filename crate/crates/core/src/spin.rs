//! Spin-1/2 components in the x-y plane and their covariant joint
//! observables: closed-form error functions, the covariant minimax, the
//! analytic lower bound and the three orthogonal components.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use serde::Serialize;

use crate::entropy::s_raw;
use crate::error::{Error, Result};
use crate::linalg::{self, bloch_operator, c, ComplexMatrix};
use crate::objects::{BiObservable, MultiObservable, Observable, Outcome, State};
use crate::search::{golden_max, golden_min, grid_max};

/// Outcome labels +1, -1 in that order.
pub fn pm_outcomes() -> Vec<Outcome> {
    vec![Outcome::Int(1), Outcome::Int(-1)]
}

/// Sign of outcome index 0, 1.
fn sign(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Spin component (I + x r . sigma)/2 with |r| <= 1, outcomes +1, -1.
pub fn spin_observable(r: [f64; 3]) -> Result<Observable> {
    let h = [r[0] / 2.0, r[1] / 2.0, r[2] / 2.0];
    Observable::new(pm_outcomes(), vec![bloch_operator(0.5, h), bloch_operator(0.5, [-h[0], -h[1], -h[2]])])
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2 + 1e-15).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, pi/2]")));
    }
    Ok(())
}

/// Components (a1, a2) of the first target direction; the second is (a2, a1).
pub fn target_components(alpha: f64) -> (f64, f64) {
    let s = alpha.sin();
    let a1 = ((1.0 + s) / 2.0).sqrt();
    let a2 = alpha.cos() / (2.0 * (1.0 + s)).sqrt();
    (a1, a2)
}

/// Geometry of the target pair at angle alpha: a = (a1, a2), b = (a2, a1)
/// and the bisectors n, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinPairConfig {
    pub alpha: f64,
    pub a1: f64,
    pub a2: f64,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub n: [f64; 3],
    pub m: [f64; 3],
}

impl SpinPairConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let (a1, a2) = target_components(alpha);
        let (n, m) = bisectors();
        Ok(Self { alpha, a1, a2, a: [a1, a2, 0.0], b: [a2, a1, 0.0], n, m })
    }
}

/// Target pair A = a . sigma, B = b . sigma at angle alpha.
pub fn target_pair(alpha: f64) -> Result<(Observable, Observable)> {
    check_alpha(alpha)?;
    let (a1, a2) = target_components(alpha);
    Ok((spin_observable([a1, a2, 0.0])?, spin_observable([a2, a1, 0.0])?))
}

/// Admissible gamma range for a covariant joint observable with vector c.
pub fn gamma_range(c1: f64, c2: f64) -> (f64, f64) {
    (SQRT_2 * (c1 + c2).abs() - 1.0, 1.0 - SQRT_2 * (c1 - c2).abs())
}

/// M(x,y) = [(1 + g xy) I + (c1 x + c2 y) s1 + (c2 x + c1 y) s2] / 4.
pub fn covariant_joint(c1: f64, c2: f64, gamma: f64) -> Result<BiObservable> {
    let (lo, hi) = gamma_range(c1, c2);
    if gamma < lo - 1e-12 || gamma > hi + 1e-12 {
        return Err(Error::Domain(format!("gamma = {gamma} outside [{lo}, {hi}] for c = ({c1}, {c2})")));
    }
    BiObservable::from_fn(pm_outcomes(), pm_outcomes(), |i, j| {
        let (x, y) = (sign(i), sign(j));
        bloch_operator((1.0 + gamma * x * y) / 4.0, [(c1 * x + c2 * y) / 4.0, (c2 * x + c1 * y) / 4.0, 0.0])
    })
}

/// Parameters (gamma, c1, c2) of a covariant joint observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovariantParams {
    pub gamma: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CovariantParams {
    /// The optimal-family point c = (1/sqrt2, gamma/sqrt2).
    pub fn on_family(gamma: f64) -> Self {
        Self { gamma, c1: FRAC_1_SQRT_2, c2: gamma * FRAC_1_SQRT_2 }
    }

    pub fn is_admissible(&self) -> bool {
        let (lo, hi) = gamma_range(self.c1, self.c2);
        self.gamma >= lo - 1e-12 && self.gamma <= hi + 1e-12
    }
}

pub fn covariant_biobservable(p: &CovariantParams) -> Result<BiObservable> {
    covariant_joint(p.c1, p.c2, p.gamma)
}

/// The one-parameter family with c = (1/sqrt2, gamma/sqrt2).
pub fn m_gamma(gamma: f64) -> Result<BiObservable> {
    if !(-1.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma = {gamma} outside [-1, 1]")));
    }
    covariant_joint(FRAC_1_SQRT_2, gamma * FRAC_1_SQRT_2, gamma)
}

/// Bisector directions n = (i + j)/sqrt2 and m = (j - i)/sqrt2.
pub fn bisectors() -> ([f64; 3], [f64; 3]) {
    ([FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0], [-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0])
}

/// Product joint observables M+(x,y) = A_n(x) B_n(y) and
/// M-(x,y) = [(I - x m.s)/2][(I + y m.s)/2]; M_gamma mixes them with
/// weights (1 + gamma)/2 and (1 - gamma)/2.
pub fn extremal_joints() -> Result<(BiObservable, BiObservable)> {
    let (n, m) = bisectors();
    let half = |s: f64, r: [f64; 3]| bloch_operator(0.5, [s * r[0] / 2.0, s * r[1] / 2.0, 0.0]);
    let plus = BiObservable::from_fn(pm_outcomes(), pm_outcomes(), |i, j| half(sign(i), n) * half(sign(j), n))?;
    let minus = BiObservable::from_fn(pm_outcomes(), pm_outcomes(), |i, j| half(-sign(i), m) * half(sign(j), m))?;
    Ok((plus, minus))
}

/// Unitaries -i n.sigma and -i m.sigma of the two generating rotations,
/// with their outcome actions (x, y) -> (y, x) and (x, y) -> (-y, -x).
pub fn d2_generators() -> Vec<(ComplexMatrix, fn(f64, f64) -> (f64, f64))> {
    let (n, m) = bisectors();
    let u = |r: [f64; 3]| linalg::bloch_operator(0.0, r) * c(0.0, -1.0);
    vec![(u(n), |x, y| (y, x)), (u(m), |x, y| (-y, -x))]
}

/// Equatorial pure state (I + cos phi s1 + sin phi s2)/2.
pub fn equatorial_state(phi: f64) -> State {
    State::bloch([phi.cos(), phi.sin(), 0.0]).expect("unit Bloch vector")
}

fn two_outcome(r: f64, q: f64) -> f64 {
    s_raw((1.0 + r) / 2.0, (1.0 + q) / 2.0) + s_raw((1.0 - r) / 2.0, (1.0 - q) / 2.0)
}

/// Error of the covariant joint with vector c against targets along a and
/// b = (a2, a1), at the state rho(phi).
pub fn covariant_error(a: (f64, f64), c: (f64, f64), phi: f64) -> f64 {
    let (cs, sn) = (phi.cos(), phi.sin());
    two_outcome(a.0 * cs + a.1 * sn, c.0 * cs + c.1 * sn) + two_outcome(a.1 * cs + a.0 * sn, c.1 * cs + c.0 * sn)
}

/// Error of M_gamma against the alpha pair at rho(phi).
pub fn error_at(alpha: f64, gamma: f64, phi: f64) -> f64 {
    let a = target_components(alpha);
    covariant_error(a, (FRAC_1_SQRT_2, gamma * FRAC_1_SQRT_2), phi)
}

const PHI_GRID: usize = 720;
const GAMMA_GRID: usize = 201;
const REFINE_TOL: f64 = 1e-10;

/// Representative in [-pi/4, pi/4] of phi modulo the symmetry orbit
/// {phi, phi + pi, pi/2 - phi, 3pi/2 - phi}.
pub fn canonical_phi(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(PI);
    if p > FRAC_PI_2 {
        p -= PI;
    }
    if p > FRAC_PI_4 {
        FRAC_PI_2 - p
    } else if p < -FRAC_PI_4 {
        -FRAC_PI_2 - p
    } else {
        p
    }
}

/// max over phi of the error of M_gamma, with the maximizing angle.
pub fn max_over_phi(alpha: f64, gamma: f64) -> (f64, f64) {
    let (phi, v) = grid_max(|p| error_at(alpha, gamma, p), 0.0, 2.0 * PI, PHI_GRID, REFINE_TOL, true);
    (v, canonical_phi(phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinPoint {
    pub gamma: f64,
    pub phi: f64,
    pub value: f64,
}

/// Incompatibility coefficient of the alpha pair, minimized over M_gamma.
pub fn qubit_minimax(alpha: f64) -> Result<SpinPoint> {
    check_alpha(alpha)?;
    let objective = |g: f64| max_over_phi(alpha, g).0;
    let h = 2.0 / (GAMMA_GRID - 1) as f64;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..GAMMA_GRID {
        let g = -1.0 + h * k as f64;
        let v = objective(g);
        if v < best.1 {
            best = (g, v);
        }
    }
    let (g, v) = golden_min(objective, (best.0 - h).max(-1.0), (best.0 + h).min(1.0), REFINE_TOL);
    let gamma = if v < best.1 { g } else { best.0 };
    let (value, phi) = max_over_phi(alpha, gamma);
    Ok(SpinPoint { gamma, phi, value })
}

/// Closed-form lower bound at angle alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    /// Minimizing gamma of the trial-state error.
    pub gamma: f64,
    /// Bloch component of the minimizing marginal along the trial direction.
    pub ell: f64,
    /// Angle of the trial state rho(pi/4 - alpha/2).
    pub phi: f64,
}

impl LowerBound {
    pub fn point(&self) -> SpinPoint {
        SpinPoint { gamma: self.gamma, phi: self.phi, value: self.value }
    }
}

/// Closed-form lower bound: the minimum over gamma of the error of M_gamma
/// at the trial state rho(pi/4 - alpha/2).
pub fn analytic_lower_bound(alpha: f64) -> Result<LowerBound> {
    check_alpha(alpha)?;
    let phi = FRAC_PI_4 - alpha / 2.0;
    if alpha == 0.0 {
        return Ok(LowerBound { value: 0.0, gamma: 1.0, ell: 1.0, phi });
    }
    let (a1, a2) = target_components(alpha);
    let (s, ca) = (alpha.sin(), alpha.cos());
    let u = (1.0 + (1.0 + s).sqrt()) * s / 2.0;
    let root = (u * u + 8.0 * (1.0 + u) * a2 * a2).sqrt();
    let (ell, gamma) = if a2 <= 1e-15 { (0.0, 0.0) } else {
        let ell = (root - u) / (2.0 * SQRT_2 * a2);
        (ell, (SQRT_2 * ell - a2) / a1)
    };
    let w = 0.5 + root / (4.0 * SQRT_2 * a1) + (s / 8.0) * (3.0 / (SQRT_2 * a1) - 1.0);
    let term = |p: f64, q: f64| if p <= 0.0 { 0.0 } else { p / 2.0 * (p / q).log2() };
    let value = -w.log2() + term(1.0 + ca, 1.0 + ell) + term(1.0 - ca, 1.0 - ell);
    Ok(LowerBound { value, gamma, ell, phi })
}

/// Error of M_gamma at rho(pi/4 - alpha/2) by the explicit formula.
pub fn trial_state_error(alpha: f64, gamma: f64) -> f64 {
    let (a1, a2) = target_components(alpha);
    let ell = (a1 * gamma + a2) / SQRT_2;
    let k = 2.0 * a1 * a2;
    let term = |p: f64, q: f64| if p <= 0.0 { 0.0 } else { p / 2.0 * (p / q).log2() };
    (2.0 / (1.0 + (a1 + a2 * gamma) / SQRT_2)).log2() + term(1.0 + k, 1.0 + ell) + term(1.0 - k, 1.0 - ell)
}

/// Two earlier approximate joint measurements, as members of the family.
pub fn comparison_gammas(alpha: f64) -> [(&'static str, f64); 2] {
    let (a1, a2) = target_components(alpha);
    [("BLW", SQRT_2 * a2), ("NV", a2 / a1)]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableColumn {
    pub label: String,
    #[serde(flatten)]
    pub point: SpinPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonPoints {
    pub lb: SpinPoint,
    pub icomp: SpinPoint,
    pub blw: SpinPoint,
    pub nv: SpinPoint,
}

/// Lower bound, optimum and the two earlier proposals at angle alpha.
pub fn comparison_points(alpha: f64) -> Result<ComparisonPoints> {
    let lb = analytic_lower_bound(alpha)?.point();
    let icomp = qubit_minimax(alpha)?;
    let [blw, nv] = comparison_gammas(alpha).map(|(_, gamma)| {
        let (value, phi) = max_over_phi(alpha, gamma);
        SpinPoint { gamma, phi, value }
    });
    Ok(ComparisonPoints { lb, icomp, blw, nv })
}

/// The comparison points as labelled columns LB, Icomp, BLW, NV.
pub fn comparison_table(alpha: f64) -> Result<Vec<TableColumn>> {
    let p = comparison_points(alpha)?;
    Ok([("LB", p.lb), ("Icomp", p.icomp), ("BLW", p.blw), ("NV", p.nv)]
        .into_iter()
        .map(|(label, point)| TableColumn { label: label.into(), point })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub lb: f64,
    pub icomp_value: f64,
    pub gamma_star: f64,
    pub phi_star: f64,
}

/// Lower bound and optimum at `grid` equally spaced angles in [0, pi/2].
pub fn scan(grid: usize) -> Result<Vec<ScanRow>> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid must be at least 2, got {grid}")));
    }
    (0..grid)
        .map(|k| {
            let alpha = FRAC_PI_2 * k as f64 / (grid - 1) as f64;
            let lb = analytic_lower_bound(alpha)?.value;
            let opt = qubit_minimax(alpha)?;
            Ok(ScanRow { alpha, lb, icomp_value: opt.value, gamma_star: opt.gamma, phi_star: opt.phi })
        })
        .collect()
}

/// The three Pauli components as +1/-1 observables.
pub fn three_spin_targets() -> [Observable; 3] {
    [
        spin_observable([1.0, 0.0, 0.0]).unwrap(),
        spin_observable([0.0, 1.0, 0.0]).unwrap(),
        spin_observable([0.0, 0.0, 1.0]).unwrap(),
    ]
}

/// [I + c(x s1 + y s2 + z s3)]/8 for |c| <= 1/sqrt3.
pub fn octahedral_joint(cc: f64) -> Result<MultiObservable> {
    if cc.abs() > 1.0 / 3f64.sqrt() + 1e-12 {
        return Err(Error::Domain(format!("c = {cc} outside [-1/sqrt3, 1/sqrt3]")));
    }
    let effects = (0..8)
        .map(|k| {
            let (x, y, z) = (sign(k >> 2 & 1), sign(k >> 1 & 1), sign(k & 1));
            bloch_operator(0.125, [cc * x / 8.0, cc * y / 8.0, cc * z / 8.0])
        })
        .collect();
    MultiObservable::new(vec![pm_outcomes(); 3], effects)
}

/// The optimal joint with c = 1/sqrt3.
pub fn three_spin_m0() -> MultiObservable {
    octahedral_joint(1.0 / 3f64.sqrt()).unwrap()
}

/// 2 M0 on outcome triples with xyz = -1, zero elsewhere.
pub fn three_spin_m1() -> MultiObservable {
    let m0 = three_spin_m0();
    let effects = (0..8)
        .map(|k| {
            let prod = sign(k >> 2 & 1) * sign(k >> 1 & 1) * sign(k & 1);
            if prod < 0.0 {
                &m0.effects()[k] * c(2.0, 0.0)
            } else {
                linalg::zeros(2)
            }
        })
        .collect();
    MultiObservable::new(vec![pm_outcomes(); 3], effects).unwrap()
}

/// Error of the octahedral joint with parameter c at Bloch vector r.
pub fn three_spin_error(cc: f64, r: [f64; 3]) -> f64 {
    r.iter().map(|&ri| two_outcome(ri, cc * ri)).sum()
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Maximum over pure states by a (theta, phi) grid with coordinate-wise
/// golden-section polishing of the best cells.
pub fn sphere_max(f: impl Fn([f64; 3]) -> f64, n_theta: usize, n_phi: usize) -> (f64, [f64; 3]) {
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(n_theta * n_phi);
    for i in 0..=n_theta {
        let th = PI * i as f64 / n_theta as f64;
        for j in 0..n_phi {
            let ph = 2.0 * PI * j as f64 / n_phi as f64;
            cells.push((f(sphere_point(th, ph)), th, ph));
        }
    }
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (ht, hp) = (PI / n_theta as f64, 2.0 * PI / n_phi as f64);
    let mut best = (cells[0].0, sphere_point(cells[0].1, cells[0].2));
    for &(_, th0, ph0) in cells.iter().take(8) {
        let (mut th, mut ph) = (th0, ph0);
        for _ in 0..40 {
            th = golden_max(|t| f(sphere_point(t, ph)), th - ht, th + ht, 1e-12).0;
            ph = golden_max(|p| f(sphere_point(th, p)), ph - hp, ph + hp, 1e-12).0;
        }
        let v = f(sphere_point(th, ph));
        if v > best.0 {
            best = (v, sphere_point(th, ph));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeSpinResult {
    /// Optimal parameter c of the octahedral family.
    pub c: f64,
    pub value: f64,
    /// Largest error over the six Pauli eigenstates.
    pub pauli_value: f64,
    /// Largest error found by the global sphere scan.
    pub scan_value: f64,
}

/// Incompatibility coefficient of the three Pauli components over the
/// octahedrally covariant family.
pub fn three_spin_icomp() -> ThreeSpinResult {
    let cmax = 1.0 / 3f64.sqrt();
    let worst = |cc: f64| sphere_max(|r| three_spin_error(cc, r), 24, 48).0;
    let (mut cc, _) = golden_min(worst, 0.0, cmax, 1e-9);
    if worst(cmax) <= worst(cc) {
        cc = cmax;
    }
    let pauli_value = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        .iter()
        .flat_map(|r| [*r, [-r[0], -r[1], -r[2]]])
        .map(|r| three_spin_error(cc, r))
        .fold(f64::NEG_INFINITY, f64::max);
    let scan_value = sphere_max(|r| three_spin_error(cc, r), 90, 180).0;
    ThreeSpinResult { c: cc, value: pauli_value.max(scan_value), pauli_value, scan_value }
}

pub struct ThreeSpinSuite {
    pub targets: [Observable; 3],
    pub m0: MultiObservable,
    pub m1: MultiObservable,
    pub icomp: ThreeSpinResult,
}

impl ThreeSpinSuite {
    /// Member of the octahedrally covariant family.
    pub fn family(&self, cc: f64) -> Result<MultiObservable> {
        octahedral_joint(cc)
    }
}

/// Targets, the two optimal joints and the covariant minimum for the
/// three Pauli components.
pub fn three_spin_suite() -> ThreeSpinSuite {
    ThreeSpinSuite { targets: three_spin_targets(), m0: three_spin_m0(), m1: three_spin_m1(), icomp: three_spin_icomp() }
}
