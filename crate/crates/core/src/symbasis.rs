//! The `M̃`-unitary eigenbasis of `D` and the reduction coefficients.
//!
//! For a non-collinear central configuration `D` has eigenvectors
//!
//! * `v₁ = (1,1,1,1)ᵀ` with eigenvalue `μ`,
//! * `v₂ = (z₁,…,z₄)ᵀ` and `v̄₂` with eigenvalue 0,
//! * a real `v₄` with eigenvalue `tr(D) − μ`.
//!
//! `v₃ = k v̄₂ + l v₂` is the combination of the two null vectors that is
//! `M̃`-orthonormal to `v₂`, and `v₄` is obtained from signed triangle areas
//! (the cofactors of the last column of `Ã = (v₁ v₂ v₃ v₄)`). Lifting `Ã`
//! entrywise through `phi` gives the symplectic coordinate matrix `A` with
//! `AᵀMA = I₈`.

use nalgebra::{Matrix4, SMatrix};

use crate::centralconfig::{CentralConfiguration, Configuration, N_BODIES};
use crate::cplx::{phi, PlanarComplex};
use crate::{Error, Result};

/// `|Σ mᵢ z̄ᵢ²|` at or beyond this is treated as collinear.
pub const KL_DEGENERACY_TOL: f64 = 1e-10;
/// Tolerance for the F/G eigenvector cross-check.
pub const FG_TOL: f64 = 1e-8;

/// Oriented area of the triangle `p1 p2 p3`, positive when counterclockwise,
/// computed as `(i/4)·det[[1, z, z̄]]` over the three vertices.
pub fn signed_area(p1: PlanarComplex, p2: PlanarComplex, p3: PlanarComplex) -> f64 {
    let row = |z: PlanarComplex| [PlanarComplex::new(1.0, 0.0), z, z.conj()];
    let (a, b, c) = (row(p1), row(p2), row(p3));
    let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
    (PlanarComplex::new(0.0, 0.25) * det).re
}

/// Parameters of `v₃ = k v̄₂ + l v₂`.
///
/// With `S = Σ mᵢ z̄ᵢ²`, `k = 1/√(1 − |S|²)` and `l = −S k`; `S = 0` gives
/// `(1, 0)`. Collinear configurations have `|S| = 1`.
pub fn build_kl(config: &Configuration) -> Result<(f64, PlanarComplex)> {
    let m = config.masses().as_array();
    let s: PlanarComplex = config.positions().iter().zip(m).map(|(z, m)| z.conj() * z.conj() * *m).sum();
    let abs = s.norm();
    if abs >= 1.0 - KL_DEGENERACY_TOL {
        return Err(Error::CollinearDegeneracy);
    }
    if abs < 1e-12 {
        return Ok((1.0, PlanarComplex::new(0.0, 0.0)));
    }
    let k = 1.0 / (1.0 - abs * abs).sqrt();
    Ok((k, -s * k))
}

#[derive(Debug, Clone)]
pub struct ReductionBasis {
    pub masses: [f64; N_BODIES],
    pub v1: [f64; N_BODIES],
    /// The positions `aᵢ`.
    pub v2: [PlanarComplex; N_BODIES],
    /// The entries `bᵢ = k āᵢ + l aᵢ`.
    pub v3: [PlanarComplex; N_BODIES],
    /// The entries `cᵢ`.
    pub v4: [f64; N_BODIES],
    pub k: f64,
    pub l: PlanarComplex,
    pub rho: f64,
    /// Rows of 2×2 blocks `[I, Φ(aᵢ), Φ(bᵢ), cᵢI]`.
    pub a: SMatrix<f64, 8, 8>,
}

impl ReductionBasis {
    /// `Ã = (v₁ v₂ v₃ v₄)`
    pub fn a_tilde(&self) -> Matrix4<PlanarComplex> {
        Matrix4::from_fn(|i, j| match j {
            0 => PlanarComplex::new(self.v1[i], 0.0),
            1 => self.v2[i],
            2 => self.v3[i],
            _ => PlanarComplex::new(self.v4[i], 0.0),
        })
    }

    /// `max |Ã* M̃ Ã − I₄|`
    pub fn unitarity_defect(&self) -> f64 {
        let at = self.a_tilde();
        let m = Matrix4::from_fn(|i, j| {
            if i == j {
                PlanarComplex::new(self.masses[i], 0.0)
            } else {
                PlanarComplex::new(0.0, 0.0)
            }
        });
        let g = at.adjoint() * m * at - Matrix4::identity();
        g.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |AᵀMA − I₈|`
    pub fn atma_defect(&self) -> f64 {
        let mut mm = SMatrix::<f64, 8, 8>::zeros();
        for i in 0..N_BODIES {
            mm[(2 * i, 2 * i)] = self.masses[i];
            mm[(2 * i + 1, 2 * i + 1)] = self.masses[i];
        }
        (self.a.transpose() * mm * self.a - SMatrix::<f64, 8, 8>::identity()).amax()
    }

    /// Rayleigh quotient `v̄ᵀ M̃ D v` of a basis vector (all have unit
    /// `M̃`-norm).
    fn rayleigh(&self, d: &Matrix4<f64>, v: &[PlanarComplex; N_BODIES]) -> f64 {
        let mut q = PlanarComplex::new(0.0, 0.0);
        for i in 0..N_BODIES {
            let mut dv = PlanarComplex::new(0.0, 0.0);
            for j in 0..N_BODIES {
                dv += v[j] * d[(i, j)];
            }
            q += v[i].conj() * dv * self.masses[i];
        }
        q.re
    }
}

/// Builds `v₁…v₄`, `k`, `l`, `ρ` and `A` for a non-collinear central
/// configuration.
pub fn build_basis(cc: &CentralConfiguration) -> Result<ReductionBasis> {
    if cc.collinear {
        return Err(Error::CollinearDegeneracy);
    }
    let (k, l) = build_kl(&cc.config)?;
    let masses = *cc.masses().as_array();
    let a = *cc.positions();
    let b = a.map(|z| z.conj() * k + l * z);
    let rho = cc.masses().rho();
    let area = |i: usize, j: usize, q: usize| signed_area(a[i], a[j], a[q]);
    let s = 4.0 * k * rho;
    let c = [
        s / masses[0] * area(1, 2, 3),
        -s / masses[1] * area(0, 2, 3),
        s / masses[2] * area(0, 1, 3),
        -s / masses[3] * area(0, 1, 2),
    ];

    let mut big = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..N_BODIES {
        let r = 2 * i;
        big.fixed_view_mut::<2, 2>(r, 0).fill_with_identity();
        big.fixed_view_mut::<2, 2>(r, 2).copy_from(&phi(a[i]));
        big.fixed_view_mut::<2, 2>(r, 4).copy_from(&phi(b[i]));
        big.fixed_view_mut::<2, 2>(r, 6).copy_from(&phi(PlanarComplex::new(c[i], 0.0)));
    }

    Ok(ReductionBasis { masses, v1: [1.0; N_BODIES], v2: a, v3: b, v4: c, k, l, rho, a: big })
}

/// Coefficients of the reduced Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSet {
    /// `−λ₃/μ`, zero up to rounding; kept for auditing.
    pub beta1: f64,
    /// `1 − tr(D)/μ`
    pub beta2: f64,
    pub beta11: PlanarComplex,
    pub beta12: PlanarComplex,
    pub beta22: PlanarComplex,
}

fn pair_sum<F>(cc: &CentralConfiguration, f: F) -> PlanarComplex
where
    F: Fn(usize, usize) -> PlanarComplex,
{
    let m = cc.masses().as_array();
    let a = cc.positions();
    let mut sum = PlanarComplex::new(0.0, 0.0);
    for i in 0..N_BODIES {
        for j in i + 1..N_BODIES {
            let da = a[i] - a[j];
            sum += da * da * f(i, j) * (m[i] * m[j] / da.norm().powi(5));
        }
    }
    sum * (1.5 / cc.mu)
}

/// Largest deviation in the eigenvector identities
/// `Fᵢ = μ(1+β₁)mᵢbᵢ` and `Gᵢ = μ(1+β₂)mᵢcᵢ`, where
/// `Fᵢ = Σⱼ mᵢmⱼ(bᵢ − bⱼ)/|aᵢ − aⱼ|³` and likewise for `Gᵢ` with `c`.
pub fn fg_defect(cc: &CentralConfiguration, basis: &ReductionBasis, beta1: f64, beta2: f64) -> f64 {
    let m = &basis.masses;
    let a = &basis.v2;
    let b = &basis.v3;
    let c = &basis.v4;
    let mut worst = 0.0_f64;
    for i in 0..N_BODIES {
        let mut f = PlanarComplex::new(0.0, 0.0);
        let mut g = 0.0;
        for j in 0..N_BODIES {
            if i != j {
                let w = m[i] * m[j] / (a[i] - a[j]).norm().powi(3);
                f += (b[i] - b[j]) * w;
                g += (c[i] - c[j]) * w;
            }
        }
        worst = worst.max((f - b[i] * (cc.mu * (1.0 + beta1) * m[i])).norm());
        worst = worst.max((g - c[i] * (cc.mu * (1.0 + beta2) * m[i])).abs());
    }
    worst
}

/// Computes `β₁, β₂, β₁₁, β₁₂, β₂₂`, rejecting inputs that fail the F/G
/// cross-check.
pub fn compute_betas(cc: &CentralConfiguration, basis: &ReductionBasis) -> Result<BetaSet> {
    let lambda3 = basis.rayleigh(&cc.d, &basis.v3);
    let beta1 = -lambda3 / cc.mu;
    let beta2 = 1.0 - cc.trace_d() / cc.mu;

    let b = &basis.v3;
    let c = &basis.v4;
    let beta11 = pair_sum(cc, |i, j| (b[i] - b[j]).conj() * (b[i] - b[j]).conj());
    let beta12 = pair_sum(cc, |i, j| (b[i] - b[j]).conj() * (c[i] - c[j]));
    let beta22 = pair_sum(cc, |i, j| PlanarComplex::new((c[i] - c[j]).powi(2), 0.0));

    let defect = fg_defect(cc, basis, beta1, beta2);
    if !(defect <= FG_TOL) {
        return Err(Error::FGIdentityViolation { defect });
    }
    Ok(BetaSet { beta1, beta2, beta11, beta12, beta22 })
}
