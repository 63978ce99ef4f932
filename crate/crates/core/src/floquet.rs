//! Monodromy matrices of the θ-periodic linear systems `ζ' = J B(θ) ζ` and
//! a coarse classification of their spectra.
//!
//! The default integrator is the three-stage Gauss–Legendre collocation
//! method (order 6) applied to the fundamental matrix. The method is
//! symplectic for any symmetric `B`, but in plain `f64` the rounding of
//! thousands of step products already costs most of the `1e-8` budget on
//! the symplectic defect once the monodromy grows to norm ~10⁴ (high
//! eccentricity). The stage solves and the propagated matrix are therefore
//! carried in double-double arithmetic; only the step-size control runs in
//! `f64`. An explicit Dormand–Prince 5(4) integration of the same matrix
//! equation is available as a cross-check.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::dd::Dd;
use crate::linsys::{full_matrix_from_hessian, kepler_matrix, EssentialSystem, Hessian6, OrbitParams};
use crate::ode::{dopri5, OdeOptions, OdeStats};
use crate::{Error, Result};

/// Tolerance for `|λ| = 1` in the classification.
pub const UNIT_CIRCLE_TOL: f64 = 1e-7;
/// Eigenvalues closer than this (relative) are treated as one cluster when
/// comparing spectra or counting multiplicities. A Jordan block at the
/// default tolerances splits by up to a few `1e-4` at high eccentricity.
pub const CLUSTER_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Kepler4,
    Essential8,
    Full12,
    Decoupled4,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Kepler4 => "kepler4",
            SystemKind::Essential8 => "essential8",
            SystemKind::Full12 => "full12",
            SystemKind::Decoupled4 => "decoupled4",
        }
    }
}

/// A linear Hamiltonian system with `2π`-periodic symmetric coefficient
/// matrix `B(θ)`, momenta first.
pub trait PeriodicHamiltonian: Sync {
    fn dim(&self) -> usize;
    fn hessian(&self, theta: f64) -> DMatrix<f64>;
    fn kind(&self) -> SystemKind;
    fn eccentricity(&self) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct KeplerSystem(pub OrbitParams);

#[derive(Debug, Clone, Copy)]
pub struct EssentialBlock(pub EssentialSystem);

#[derive(Debug, Clone, Copy)]
pub struct FullSystem(pub EssentialSystem);

/// One of the two 4-dimensional systems obtained by dropping `β₁₂`.
#[derive(Debug, Clone, Copy)]
pub struct DecoupledMode {
    pub system: EssentialSystem,
    /// 1 or 2.
    pub mode: usize,
}

/// Full system built from an independently computed potential Hessian.
#[derive(Debug, Clone, Copy)]
pub struct HessianSystem {
    pub params: OrbitParams,
    pub sigma: f64,
    pub hessian: Hessian6,
}

fn to_dmatrix<const N: usize>(m: &nalgebra::SMatrix<f64, N, N>) -> DMatrix<f64> {
    DMatrix::from_fn(N, N, |i, j| m[(i, j)])
}

impl PeriodicHamiltonian for KeplerSystem {
    fn dim(&self) -> usize {
        4
    }
    fn hessian(&self, theta: f64) -> DMatrix<f64> {
        to_dmatrix(&kepler_matrix(theta, &self.0))
    }
    fn kind(&self) -> SystemKind {
        SystemKind::Kepler4
    }
    fn eccentricity(&self) -> f64 {
        self.0.e
    }
}

impl PeriodicHamiltonian for EssentialBlock {
    fn dim(&self) -> usize {
        8
    }
    fn hessian(&self, theta: f64) -> DMatrix<f64> {
        to_dmatrix(&self.0.essential_matrix(theta))
    }
    fn kind(&self) -> SystemKind {
        SystemKind::Essential8
    }
    fn eccentricity(&self) -> f64 {
        self.0.params.e
    }
}

impl PeriodicHamiltonian for FullSystem {
    fn dim(&self) -> usize {
        12
    }
    fn hessian(&self, theta: f64) -> DMatrix<f64> {
        to_dmatrix(&self.0.full_matrix(theta))
    }
    fn kind(&self) -> SystemKind {
        SystemKind::Full12
    }
    fn eccentricity(&self) -> f64 {
        self.0.params.e
    }
}

impl PeriodicHamiltonian for DecoupledMode {
    fn dim(&self) -> usize {
        4
    }
    fn hessian(&self, theta: f64) -> DMatrix<f64> {
        to_dmatrix(&self.system.decoupled_matrix(theta, self.mode))
    }
    fn kind(&self) -> SystemKind {
        SystemKind::Decoupled4
    }
    fn eccentricity(&self) -> f64 {
        self.system.params.e
    }
}

impl PeriodicHamiltonian for HessianSystem {
    fn dim(&self) -> usize {
        12
    }
    fn hessian(&self, theta: f64) -> DMatrix<f64> {
        to_dmatrix(&full_matrix_from_hessian(theta, &self.params, self.sigma, &self.hessian))
    }
    fn kind(&self) -> SystemKind {
        SystemKind::Full12
    }
    fn eccentricity(&self) -> f64 {
        self.params.e
    }
}

/// Standard symplectic matrix `[[0, −I], [I, 0]]` of size `n`.
pub fn symplectic_j(n: usize) -> DMatrix<f64> {
    let h = n / 2;
    let mut j = DMatrix::zeros(n, n);
    for i in 0..h {
        j[(i, h + i)] = -1.0;
        j[(h + i, i)] = 1.0;
    }
    j
}

/// `J·B` without a matrix product: rows are permuted and negated.
pub fn generator(b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = b.nrows();
    let h = n / 2;
    DMatrix::from_fn(n, n, |i, j| if i < h { -b[(h + i, j)] } else { b[(i - h, j)] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Double-double Gauss–Legendre collocation, order 6.
    GaussLegendre,
    /// Explicit Dormand–Prince 5(4) in `f64`.
    DormandPrince,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::GaussLegendre => "gauss_legendre6_dd",
            Method::DormandPrince => "dormand_prince54",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub method: Method,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { rtol: 1e-10, atol: 1e-12, method: Method::GaussLegendre, max_steps: 200_000 }
    }
}

impl IntegratorOptions {
    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive, got rtol={} atol={}",
                self.rtol, self.atol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorStats {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub h_min: f64,
    pub h_max: f64,
}

impl IntegratorStats {
    fn new(opts: &IntegratorOptions) -> Self {
        IntegratorStats {
            method: opts.method,
            rtol: opts.rtol,
            atol: opts.atol,
            accepted: 0,
            rejected: 0,
            h_min: f64::INFINITY,
            h_max: 0.0,
        }
    }

    fn record(&mut self, h: f64) {
        self.accepted += 1;
        self.h_min = self.h_min.min(h);
        self.h_max = self.h_max.max(h);
    }
}

// ---------------------------------------------------------------------------
// double-double dense kernels (row-major, square)

fn dd_identity(n: usize) -> Vec<Dd> {
    let mut m = vec![Dd::ZERO; n * n];
    for i in 0..n {
        m[i * n + i] = Dd::ONE;
    }
    m
}

fn dd_matmul(a: &[Dd], b: &[Dd], n: usize) -> Vec<Dd> {
    let mut c = vec![Dd::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.hi == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] = c[i * n + j].mul_add(aik, b[k * n + j]);
            }
        }
    }
    c
}

/// In-place LU with partial pivoting of the `n×n` matrix `a`, then solves
/// for the `m` right-hand-side columns of the `n×m` matrix `rhs`. Returns
/// the determinant.
fn dd_lu_solve(a: &mut [Dd], n: usize, rhs: &mut [Dd], m: usize) -> Dd {
    let mut det = Dd::ONE;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x * n + col].hi.abs().total_cmp(&a[y * n + col].hi.abs()))
            .unwrap_or(col);
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            for j in 0..m {
                rhs.swap(col * m + j, piv * m + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        if p.hi == 0.0 {
            continue;
        }
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f.hi == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] = a[r * n + j] - f * a[col * n + j];
            }
            for j in 0..m {
                rhs[r * m + j] = rhs[r * m + j] - f * rhs[col * m + j];
            }
        }
    }
    for col in (0..n).rev() {
        let p = a[col * n + col];
        for j in 0..m {
            let mut s = rhs[col * m + j];
            for k in col + 1..n {
                s = s - a[col * n + k] * rhs[k * m + j];
            }
            rhs[col * m + j] = s / p;
        }
    }
    det
}

struct GlTableau {
    c: [f64; 3],
    a: [[Dd; 3]; 3],
    b: [Dd; 3],
}

impl GlTableau {
    fn new() -> Self {
        let d = Dd::from;
        let s15 = d(15.0).sqrt();
        let frac = |p: f64, q: f64| d(p) / d(q);
        let c = [(d(0.5) - s15 / d(10.0)).to_f64(), 0.5, (d(0.5) + s15 / d(10.0)).to_f64()];
        let a = [
            [frac(5.0, 36.0), frac(2.0, 9.0) - s15 / d(15.0), frac(5.0, 36.0) - s15 / d(30.0)],
            [frac(5.0, 36.0) + s15 / d(24.0), frac(2.0, 9.0), frac(5.0, 36.0) - s15 / d(24.0)],
            [frac(5.0, 36.0) + s15 / d(30.0), frac(2.0, 9.0) + s15 / d(15.0), frac(5.0, 36.0)],
        ];
        let b = [frac(5.0, 18.0), frac(4.0, 9.0), frac(5.0, 18.0)];
        GlTableau { c, a, b }
    }

    /// One-step propagator `R` with `ζ(t + h) = R ζ(t)`.
    fn step<S: PeriodicHamiltonian + ?Sized>(&self, sys: &S, t: f64, h: f64) -> Vec<Dd> {
        let n = sys.dim();
        let gens: Vec<DMatrix<f64>> = self.c.iter().map(|&ci| generator(&sys.hessian(t + ci * h))).collect();
        let big = 3 * n;
        let hd = Dd::from(h);
        let mut lhs = vec![Dd::ZERO; big * big];
        let mut rhs = vec![Dd::ZERO; big * n];
        for (i, gi) in gens.iter().enumerate() {
            for j in 0..3 {
                let haij = hd * self.a[i][j];
                for r in 0..n {
                    for c in 0..n {
                        let g = gi[(r, c)];
                        let mut v = if g == 0.0 { Dd::ZERO } else { -(haij * Dd::from(g)) };
                        if i == j && r == c {
                            v = v + Dd::ONE;
                        }
                        lhs[(i * n + r) * big + j * n + c] = v;
                    }
                }
            }
            for r in 0..n {
                for c in 0..n {
                    rhs[(i * n + r) * n + c] = Dd::from(gi[(r, c)]);
                }
            }
        }
        dd_lu_solve(&mut lhs, big, &mut rhs, n);
        let mut out = dd_identity(n);
        for (i, bi) in self.b.iter().enumerate() {
            let w = hd * *bi;
            for r in 0..n {
                for c in 0..n {
                    out[r * n + c] = out[r * n + c].mul_add(w, rhs[(i * n + r) * n + c]);
                }
            }
        }
        out
    }
}

fn integrate_gl<S: PeriodicHamiltonian + ?Sized>(
    sys: &S,
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<(DMatrix<f64>, IntegratorStats)> {
    let n = sys.dim();
    let tab = GlTableau::new();
    let mut stats = IntegratorStats::new(opts);
    let mut m = dd_identity(n);
    let span = t1 - t0;
    let dir = span.signum();
    let mut t = t0;
    let mut h = (0.05 * span.abs()).max(1e-3).min(span.abs());
    let h_floor = 1e-12 * span.abs().max(1.0);
    while (t1 - t) * dir > 0.0 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepUnderflow { t, h });
        }
        let last = h >= (t1 - t).abs();
        let hh = if last { (t1 - t).abs() } else { h };
        let hs = dir * hh;
        let full = tab.step(sys, t, hs);
        let r1 = tab.step(sys, t, hs / 2.0);
        let r2 = tab.step(sys, t + hs / 2.0, hs / 2.0);
        let fine = dd_matmul(&r2, &r1, n);
        let scale = fine.iter().map(|v| v.hi.abs()).fold(0.0, f64::max);
        let diff = full.iter().zip(&fine).map(|(a, b)| (*a - *b).hi.abs()).fold(0.0, f64::max) / 63.0;
        // error per unit step, so the global error tracks the tolerance
        let err = diff / ((opts.atol + opts.rtol * scale) * (hh / span.abs()).min(1.0));
        if !err.is_finite() {
            stats.rejected += 1;
            h = hh * 0.25;
        } else if err <= 1.0 {
            m = dd_matmul(&fine, &m, n);
            t = if last { t1 } else { t + hs };
            stats.record(hh);
            let fac = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-1.0 / 7.0)).clamp(0.2, 4.0) };
            h = hh * fac;
        } else {
            stats.rejected += 1;
            h = hh * (0.9 * err.powf(-1.0 / 7.0)).clamp(0.2, 0.9);
        }
        if h < h_floor {
            return Err(Error::StepUnderflow { t, h });
        }
    }
    Ok((DMatrix::from_fn(n, n, |i, j| m[i * n + j].to_f64()), stats))
}

fn integrate_dopri<S: PeriodicHamiltonian + ?Sized>(
    sys: &S,
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<(DMatrix<f64>, IntegratorStats)> {
    let n = sys.dim();
    let y0: Vec<f64> = DMatrix::<f64>::identity(n, n).as_slice().to_vec();
    let ode_opts = OdeOptions { rtol: opts.rtol, atol: opts.atol, h0: None, h_min: 1e-12, max_steps: opts.max_steps };
    let mut ode_stats = OdeStats::default();
    let mut stats = IntegratorStats::new(opts);
    let mut last_t = t0;
    let y = dopri5(
        |t, y, dy| {
            let g = generator(&sys.hessian(t));
            let ym = DMatrix::from_column_slice(n, n, y);
            dy.copy_from_slice((g * ym).as_slice());
        },
        t0,
        &y0,
        t1,
        &ode_opts,
        &mut ode_stats,
        |t, _| {
            stats.record((t - last_t).abs());
            last_t = t;
            Ok(())
        },
    )?;
    stats.rejected = ode_stats.rejected;
    Ok((DMatrix::from_column_slice(n, n, &y), stats))
}

/// Fundamental matrix `Φ(θ₁)` of `ζ' = J B(θ) ζ` with `Φ(θ₀) = I`.
pub fn integrate_fundamental<S: PeriodicHamiltonian + ?Sized>(
    sys: &S,
    theta0: f64,
    theta1: f64,
    opts: &IntegratorOptions,
) -> Result<(DMatrix<f64>, IntegratorStats)> {
    opts.validate()?;
    let e = sys.eccentricity();
    if !(0.0..1.0).contains(&e) {
        return Err(Error::InvalidParameter(format!("eccentricity must lie in [0, 1), got {e}")));
    }
    if theta0 == theta1 {
        return Ok((DMatrix::identity(sys.dim(), sys.dim()), IntegratorStats::new(opts)));
    }
    match opts.method {
        Method::GaussLegendre => integrate_gl(sys, theta0, theta1, opts),
        Method::DormandPrince => integrate_dopri(sys, theta0, theta1, opts),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    SpectrallyStable,
    EllipticHyperbolicMixed,
    Unstable,
    Degenerate,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::SpectrallyStable => "spectrally_stable",
            Stability::EllipticHyperbolicMixed => "elliptic_hyperbolic_mixed",
            Stability::Unstable => "unstable",
            Stability::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MonodromyReport {
    pub system_kind: SystemKind,
    pub matrix: DMatrix<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub symplectic_defect: f64,
    pub det: f64,
    pub stability: Stability,
    pub stats: IntegratorStats,
}

/// `‖MᵀJM − J‖∞` (maximum absolute row sum), evaluated in double-double
/// so that the result reflects the matrix and not the check.
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let h = n / 2;
    // JM: rows permuted and negated
    let jm = |r: usize, c: usize| if r < h { -m[(h + r, c)] } else { m[(r - h, c)] };
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            let mut s = Dd::ZERO;
            for k in 0..n {
                s = s.mul_add(Dd::from(m[(k, i)]), Dd::from(jm(k, j)));
            }
            let target = if i < h && j == h + i {
                -1.0
            } else if i >= h && j + h == i {
                1.0
            } else {
                0.0
            };
            row += (s - Dd::from(target)).to_f64().abs();
        }
        worst = worst.max(row);
    }
    worst
}

/// Determinant evaluated in double-double.
pub fn determinant(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut a: Vec<Dd> = (0..n * n).map(|k| Dd::from(m[(k / n, k % n)])).collect();
    dd_lu_solve(&mut a, n, &mut [], 0).to_f64()
}

/// Eigenvalues sorted by real then imaginary part.
///
/// The real Schur iteration can stall on matrices with exactly repeated
/// structure; it is retried on a fixed orthogonal similarity transform,
/// which leaves the spectrum unchanged.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    let n = m.nrows();
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).or_else(|| {
        let q = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 13 + 1) as f64).sin()).qr().q();
        Schur::try_new(q.transpose() * m * &q, f64::EPSILON, 100_000)
    });
    let Some(schur) = schur else {
        return vec![Complex64::new(f64::NAN, f64::NAN); n];
    };
    let mut ev: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Single-linkage clusters of a list of eigenvalues.
fn clusters(points: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = points[i].norm().max(points[j].norm()).max(1.0);
            if (points[i] - points[j]).norm() <= radius * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut label, i);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(i);
    }
    groups
}

/// Distance between two spectra that is robust to defective eigenvalues.
///
/// Both lists are pooled and clustered at [`CLUSTER_RADIUS`]; every cluster
/// must hold as many members of `a` as of `b`, and the result is the largest
/// relative distance between the per-cluster means. A nontrivial Jordan
/// block splits its eigenvalue by roughly the square root of the integration
/// error, while the cluster mean (a trace) stays accurate. Returns infinity
/// when multiplicities disagree.
pub fn spectral_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let pooled: Vec<Complex64> = a.iter().chain(b).copied().collect();
    let mut worst: f64 = 0.0;
    for group in clusters(&pooled, CLUSTER_RADIUS) {
        let (ga, gb): (Vec<usize>, Vec<usize>) = group.iter().partition(|&&k| k < a.len());
        if ga.len() != gb.len() {
            return f64::INFINITY;
        }
        let mean = |idx: &[usize]| idx.iter().map(|&k| pooled[k]).sum::<Complex64>() / idx.len() as f64;
        let (ma, mb) = (mean(&ga), mean(&gb));
        worst = worst.max((ma - mb).norm() / ma.norm().max(1.0));
    }
    worst
}

/// Largest distance from any eigenvalue to its symplectic partners
/// `1/λ`, `λ̄` and `1/λ̄`, measured with [`spectral_distance`].
pub fn quadruple_defect(ev: &[Complex64]) -> f64 {
    let inv: Vec<Complex64> = ev.iter().map(|z| 1.0 / z).collect();
    let conj: Vec<Complex64> = ev.iter().map(|z| z.conj()).collect();
    spectral_distance(ev, &inv).max(spectral_distance(ev, &conj))
}

/// Whether every eigenvalue cluster of `m` has a full eigenspace, judged by
/// the numerical nullity of `M − λI` at the cluster mean.
pub fn is_semisimple(m: &DMatrix<f64>, ev: &[Complex64]) -> bool {
    let n = m.nrows();
    let mc: DMatrix<Complex64> = m.map(|x| Complex64::new(x, 0.0));
    let norm = m.norm().max(1.0);
    for group in clusters(ev, CLUSTER_RADIUS) {
        if group.len() < 2 {
            continue;
        }
        let lambda = group.iter().map(|&k| ev[k]).sum::<Complex64>() / group.len() as f64;
        let shifted = &mc - DMatrix::<Complex64>::identity(n, n) * lambda;
        let sv = shifted.singular_values();
        let nullity = sv.iter().filter(|&&s| s <= 1e-6 * norm).count();
        if nullity < group.len() {
            return false;
        }
    }
    true
}

pub fn classify(m: &DMatrix<f64>, ev: &[Complex64]) -> Stability {
    let near_one = ev.iter().filter(|z| (*z - Complex64::new(1.0, 0.0)).norm() <= CLUSTER_RADIUS).count();
    if near_one >= 2 {
        return Stability::Degenerate;
    }
    let on_circle = ev.iter().filter(|z| (z.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL).count();
    if on_circle == 0 {
        Stability::Unstable
    } else if on_circle < ev.len() {
        Stability::EllipticHyperbolicMixed
    } else if is_semisimple(m, ev) {
        Stability::SpectrallyStable
    } else {
        Stability::Degenerate
    }
}

/// Monodromy over `θ ∈ [0, 2π]` with spectrum, structure checks and
/// classification.
pub fn monodromy<S: PeriodicHamiltonian + ?Sized>(sys: &S, opts: &IntegratorOptions) -> Result<MonodromyReport> {
    let (matrix, stats) = integrate_fundamental(sys, 0.0, 2.0 * std::f64::consts::PI, opts)?;
    let eigenvalues = eigenvalues(&matrix);
    let stability = classify(&matrix, &eigenvalues);
    Ok(MonodromyReport {
        system_kind: sys.kind(),
        symplectic_defect: symplectic_defect(&matrix),
        det: determinant(&matrix),
        eigenvalues,
        stability,
        matrix,
        stats,
    })
}

/// Eigenvalues of the constant generator `J B` of a circular (`e = 0`)
/// system.
pub fn spectrum_autonomous<S: PeriodicHamiltonian + ?Sized>(sys: &S) -> Result<Vec<Complex64>> {
    if sys.eccentricity() != 0.0 {
        return Err(Error::InvalidParameter("autonomous spectrum requires e = 0".into()));
    }
    Ok(eigenvalues(&generator(&sys.hessian(0.0))))
}

/// `exp(2π λ)` for each eigenvalue of the generator.
pub fn floquet_multipliers(exponents: &[Complex64]) -> Vec<Complex64> {
    exponents.iter().map(|z| (z * 2.0 * std::f64::consts::PI).exp()).collect()
}

/// Row-by-row copy of a matrix, for serialization.
pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}
