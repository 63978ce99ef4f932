//! Quadratic Hamiltonians of the linearization at the elliptic relative
//! equilibrium.
//!
//! In the reduced coordinates `(Z, W₁, W₂, z, w₁, w₂)` (each in ℝ²) and with
//! the true anomaly `θ` as time, the Hamiltonian is
//!
//! ```text
//! H = ½(|Z|² + |W₁|² + |W₂|²) + (z·JZ + w₁·JW₁ + w₂·JW₂)
//!     + (p − r)/(2p) (|z|² + |w₁|² + |w₂|²) − (r/σ) U(z, w₁, w₂)
//! ```
//!
//! with `r(θ) = p/(1 + e cos θ)` and `σ = (μp)^{1/4}`. Its Hessian at the
//! equilibrium `Z = (0, σ)`, `z = (σ, 0)`, `W = w = 0` is the matrix `B(θ)`
//! of the linear system `ζ' = J B(θ) ζ`. The `z`–`w` blocks vanish, which
//! splits off the Kepler block `(Z, z)` from the essential part
//! `(W₁, W₂, w₁, w₂)`.
//!
//! Position-position blocks are built from the closed forms
//!
//! ```text
//! H_zz   = I − (r/p)(I + K),                         K = diag(2, −1)
//! H_wᵢwᵢ = I − (r/p)[(3 + βᵢ)/2 · I + Ψ(βᵢᵢ)],        β₁ = 0
//! H_w₁w₂ = −(r/p) Ψ(β₁₂)
//! ```
//!
//! and [`hessian_fd`] / [`hessian_pairwise`] recompute the underlying
//! potential Hessian independently.

use nalgebra::{DMatrix, Matrix4, SMatrix, Vector2};

use crate::centralconfig::N_BODIES;
use crate::cplx::{j2, phi, psi, Mat2, PlanarComplex};
use crate::symbasis::{BetaSet, ReductionBasis};
use crate::{Error, Result};

pub type Hessian6 = SMatrix<f64, 6, 6>;

/// Distances below this count as a collision in the transformed potential.
pub const COLLISION_TOL: f64 = 1e-12;

/// Keplerian orbit shape: eccentricity `e ∈ [0, 1)` and semi-latus
/// rectum `p > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitParams {
    pub e: f64,
    pub p: f64,
}

impl OrbitParams {
    pub fn new(e: f64, p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&e) {
            return Err(Error::InvalidParameter(format!("eccentricity must lie in [0, 1), got {e}")));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter(format!("semi-latus rectum must be positive, got {p}")));
        }
        Ok(OrbitParams { e, p })
    }

    /// Circular orbit with `p = 1`.
    pub fn circular() -> Self {
        OrbitParams { e: 0.0, p: 1.0 }
    }

    pub fn r(&self, theta: f64) -> f64 {
        self.p / (1.0 + self.e * theta.cos())
    }

    /// `r/p = 1/(1 + e cos θ)`; the only way `θ` enters `B(θ)`.
    pub fn r_over_p(&self, theta: f64) -> f64 {
        1.0 / (1.0 + self.e * theta.cos())
    }
}

/// `d_ij(z, w₁, w₂) = |Φ(aᵢ−aⱼ)z + Φ(bᵢ−bⱼ)w₁ + (cᵢ−cⱼ)w₂|`
fn pair_offset(basis: &ReductionBasis, i: usize, j: usize, z: &Vector2<f64>, w1: &Vector2<f64>, w2: &Vector2<f64>) -> Vector2<f64> {
    phi(basis.v2[i] - basis.v2[j]) * z + phi(basis.v3[i] - basis.v3[j]) * w1 + w2 * (basis.v4[i] - basis.v4[j])
}

/// Potential in the reduced coordinates, `Σ_{i<j} mᵢmⱼ/d_ij(z, w₁, w₂)`.
pub fn transformed_potential(z: &Vector2<f64>, w1: &Vector2<f64>, w2: &Vector2<f64>, basis: &ReductionBasis) -> Result<f64> {
    let m = &basis.masses;
    let mut u = 0.0;
    for i in 0..N_BODIES {
        for j in i + 1..N_BODIES {
            let distance = pair_offset(basis, i, j, z, w1, w2).norm();
            if !(distance >= COLLISION_TOL) {
                return Err(Error::Collision { i, j, distance });
            }
            u += m[i] * m[j] / distance;
        }
    }
    Ok(u)
}

fn potential_at(basis: &ReductionBasis, x: &[f64; 6]) -> Result<f64> {
    transformed_potential(&Vector2::new(x[0], x[1]), &Vector2::new(x[2], x[3]), &Vector2::new(x[4], x[5]), basis)
}

/// Central-difference Hessian of the transformed potential over
/// `(z, w₁, w₂)` at `z = (σ, 0)`, `w₁ = w₂ = 0`.
pub fn hessian_fd(basis: &ReductionBasis, sigma: f64, h: f64) -> Result<Hessian6> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidParameter(format!("finite-difference step must lie in [1e-7, 1e-3], got {h}")));
    }
    let x0 = [sigma, 0.0, 0.0, 0.0, 0.0, 0.0];
    let f = |di: Option<(usize, f64)>, dj: Option<(usize, f64)>| -> Result<f64> {
        let mut x = x0;
        for (k, s) in [di, dj].into_iter().flatten() {
            x[k] += s;
        }
        potential_at(basis, &x)
    };
    let f0 = f(None, None)?;
    let mut hess = Hessian6::zeros();
    for i in 0..6 {
        let fp = f(Some((i, h)), None)?;
        let fm = f(Some((i, -h)), None)?;
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let fpp = f(Some((i, h)), Some((j, h)))?;
            let fpm = f(Some((i, h)), Some((j, -h)))?;
            let fmp = f(Some((i, -h)), Some((j, h)))?;
            let fmm = f(Some((i, -h)), Some((j, -h)))?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Exact Hessian of the transformed potential at the equilibrium, summed
/// pair by pair: with `Gᵢⱼ = [Φ(aᵢ−aⱼ), Φ(bᵢ−bⱼ), (cᵢ−cⱼ)I]` and
/// `x = σ(aᵢ − aⱼ)`,
/// `∂²Uᵢⱼ = mᵢmⱼ Gᵢⱼᵀ (3xxᵀ/|x|⁵ − I/|x|³) Gᵢⱼ`.
pub fn hessian_pairwise(basis: &ReductionBasis, sigma: f64) -> Hessian6 {
    let m = &basis.masses;
    let mut hess = Hessian6::zeros();
    for i in 0..N_BODIES {
        for j in i + 1..N_BODIES {
            let mut g = SMatrix::<f64, 2, 6>::zeros();
            g.fixed_view_mut::<2, 2>(0, 0).copy_from(&phi(basis.v2[i] - basis.v2[j]));
            g.fixed_view_mut::<2, 2>(0, 2).copy_from(&phi(basis.v3[i] - basis.v3[j]));
            g.fixed_view_mut::<2, 2>(0, 4).copy_from(&(Mat2::identity() * (basis.v4[i] - basis.v4[j])));
            let da = basis.v2[i] - basis.v2[j];
            let x = Vector2::new(da.re, da.im) * sigma;
            let d = x.norm();
            let inner = x * x.transpose() * (3.0 / d.powi(5)) - Mat2::identity() / d.powi(3);
            hess += g.transpose() * inner * g * (m[i] * m[j]);
        }
    }
    hess
}

/// Potential Hessian predicted by the reduction: `(μ/σ³)` times
/// `K`, `O`, `(1+βᵢ)/2·I + Ψ(βᵢᵢ)` and `Ψ(β₁₂)` blocks.
pub fn hessian_from_betas(mu: f64, sigma: f64, betas: &BetaSet) -> Hessian6 {
    let s = mu / sigma.powi(3);
    let k = Mat2::new(2.0, 0.0, 0.0, -1.0);
    let w11 = Mat2::identity() * ((1.0 + betas.beta1) / 2.0) + psi(betas.beta11);
    let w22 = Mat2::identity() * ((1.0 + betas.beta2) / 2.0) + psi(betas.beta22);
    let w12 = psi(betas.beta12);
    let mut h = Hessian6::zeros();
    h.fixed_view_mut::<2, 2>(0, 0).copy_from(&(k * s));
    h.fixed_view_mut::<2, 2>(2, 2).copy_from(&(w11 * s));
    h.fixed_view_mut::<2, 2>(4, 4).copy_from(&(w22 * s));
    h.fixed_view_mut::<2, 2>(2, 4).copy_from(&(w12 * s));
    h.fixed_view_mut::<2, 2>(4, 2).copy_from(&(w12.transpose() * s));
    h
}

/// `H_zz(θ) = diag(−(2 − e cos θ)/(1 + e cos θ), 1)`
pub fn kepler_block(theta: f64, params: &OrbitParams) -> Mat2 {
    let ec = params.e * theta.cos();
    Mat2::new(-(2.0 - ec) / (1.0 + ec), 0.0, 0.0, 1.0)
}

/// Block layout `[[I, C], [Cᵀ, H]]` with `C = diag(−J, …, −J)`, for a
/// position Hessian `H` of size `2k × 2k`.
fn hamiltonian_matrix<const N: usize>(pos: &DMatrix<f64>) -> SMatrix<f64, N, N> {
    let half = N / 2;
    let mut out = SMatrix::<f64, N, N>::zeros();
    out.view_mut((0, 0), (half, half)).fill_with_identity();
    for k in 0..half / 2 {
        out.fixed_view_mut::<2, 2>(2 * k, half + 2 * k).copy_from(&(-j2()));
        out.fixed_view_mut::<2, 2>(half + 2 * k, 2 * k).copy_from(&j2());
    }
    out.view_mut((half, half), (half, half)).copy_from(pos);
    out
}

/// `(e, p, β₂, β₁₁, β₁₂, β₂₂)`: everything the essential system depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialSystem {
    pub params: OrbitParams,
    pub beta2: f64,
    pub beta11: PlanarComplex,
    pub beta12: PlanarComplex,
    pub beta22: PlanarComplex,
}

impl EssentialSystem {
    pub fn new(params: OrbitParams, betas: &BetaSet) -> Self {
        EssentialSystem { params, beta2: betas.beta2, beta11: betas.beta11, beta12: betas.beta12, beta22: betas.beta22 }
    }

    /// `(H_w₁w₁, H_w₁w₂, H_w₂w₂)` at true anomaly `θ`.
    pub fn blocks(&self, theta: f64) -> (Mat2, Mat2, Mat2) {
        let rp = self.params.r_over_p(theta);
        let id = Mat2::identity();
        let h11 = id - (id * 1.5 + psi(self.beta11)) * rp;
        let h22 = id - (id * ((3.0 + self.beta2) / 2.0) + psi(self.beta22)) * rp;
        let h12 = -psi(self.beta12) * rp;
        (h11, h12, h22)
    }

    /// 8×8 `B(θ)` over `(W₁, W₂, w₁, w₂)`.
    pub fn essential_matrix(&self, theta: f64) -> SMatrix<f64, 8, 8> {
        let (h11, h12, h22) = self.blocks(theta);
        let mut pos = DMatrix::zeros(4, 4);
        pos.fixed_view_mut::<2, 2>(0, 0).copy_from(&h11);
        pos.fixed_view_mut::<2, 2>(0, 2).copy_from(&h12);
        pos.fixed_view_mut::<2, 2>(2, 0).copy_from(&h12.transpose());
        pos.fixed_view_mut::<2, 2>(2, 2).copy_from(&h22);
        hamiltonian_matrix::<8>(&pos)
    }

    /// 12×12 `B(θ)` over `(Z, W₁, W₂, z, w₁, w₂)`.
    pub fn full_matrix(&self, theta: f64) -> SMatrix<f64, 12, 12> {
        let (h11, h12, h22) = self.blocks(theta);
        let mut pos = DMatrix::zeros(6, 6);
        pos.fixed_view_mut::<2, 2>(0, 0).copy_from(&kepler_block(theta, &self.params));
        pos.fixed_view_mut::<2, 2>(2, 2).copy_from(&h11);
        pos.fixed_view_mut::<2, 2>(2, 4).copy_from(&h12);
        pos.fixed_view_mut::<2, 2>(4, 2).copy_from(&h12.transpose());
        pos.fixed_view_mut::<2, 2>(4, 4).copy_from(&h22);
        hamiltonian_matrix::<12>(&pos)
    }

    /// 4×4 system `[[I, −J], [J, H_wᵢwᵢ]]` of mode `i ∈ {1, 2}`, which is
    /// exact when `β₁₂ = 0`.
    pub fn decoupled_matrix(&self, theta: f64, mode: usize) -> Matrix4<f64> {
        let (h11, _, h22) = self.blocks(theta);
        let h = if mode == 1 { h11 } else { h22 };
        let pos = DMatrix::from_fn(2, 2, |i, j| h[(i, j)]);
        hamiltonian_matrix::<4>(&pos)
    }
}

/// 4×4 Kepler system over `(Z, z)`.
pub fn kepler_matrix(theta: f64, params: &OrbitParams) -> Matrix4<f64> {
    let h = kepler_block(theta, params);
    hamiltonian_matrix::<4>(&DMatrix::from_fn(2, 2, |i, j| h[(i, j)]))
}

/// 12×12 `B(θ)` assembled from a potential Hessian rather than from the
/// β formulas: `H = (p − r)/p · I − (r/σ)·U''`.
pub fn full_matrix_from_hessian(theta: f64, params: &OrbitParams, sigma: f64, hess: &Hessian6) -> SMatrix<f64, 12, 12> {
    let rp = params.r_over_p(theta);
    let pos = DMatrix::<f64>::identity(6, 6) * (1.0 - rp) - DMatrix::from_fn(6, 6, |i, j| hess[(i, j)]) * (rp * params.p / sigma);
    let pos = (&pos + pos.transpose()) * 0.5;
    hamiltonian_matrix::<12>(&pos)
}

/// The quadratic Hamiltonian written term by term,
///
/// `½|Z|² + z·JZ + ½zᵀH_zz z + w₁ᵀH_w₁w₂ w₂ + Σᵢ(½|Wᵢ|² + wᵢ·JWᵢ + ½wᵢᵀH_wᵢwᵢ wᵢ)`,
///
/// for `ζ = (Z, W₁, W₂, z, w₁, w₂)`.
pub fn quadratic_hamiltonian(theta: f64, sys: &EssentialSystem, zeta: &SMatrix<f64, 12, 1>) -> f64 {
    let v = |k: usize| Vector2::new(zeta[2 * k], zeta[2 * k + 1]);
    let (big_z, big_w1, big_w2, z, w1, w2) = (v(0), v(1), v(2), v(3), v(4), v(5));
    let j = j2();
    let (h11, h12, h22) = sys.blocks(theta);
    let hzz = kepler_block(theta, &sys.params);
    0.5 * big_z.norm_squared()
        + z.dot(&(j * big_z))
        + 0.5 * z.dot(&(hzz * z))
        + w1.dot(&(h12 * w2))
        + (0.5 * big_w1.norm_squared() + w1.dot(&(j * big_w1)) + 0.5 * w1.dot(&(h11 * w1)))
        + (0.5 * big_w2.norm_squared() + w2.dot(&(j * big_w2)) + 0.5 * w2.dot(&(h22 * w2)))
}
