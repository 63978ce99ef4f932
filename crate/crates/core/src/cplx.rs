//! Real 2×2 representations of complex numbers.
//!
//! `phi` embeds `z = x + iy` as the rotation-scaling matrix `[[x, -y], [y, x]]`
//! and `psi` as the reflection-scaling matrix `[[x, y], [y, -x]]`. The
//! products of these images close under complex multiplication and
//! conjugation, which is what turns the Hessian of the transformed potential
//! into a handful of complex sums.
//!
//! `Mat2` is nalgebra's `Matrix2`; constructors below take entries in
//! row-major order, and that order is used everywhere a 2×2 block is written
//! out.

use nalgebra::{Matrix2, Matrix4, SMatrix, Vector2};
use num_complex::Complex64;

/// A point of the plane, identified with `x + iy`.
pub type PlanarComplex = Complex64;

pub type Mat2 = Matrix2<f64>;

/// `[[0, -1], [1, 0]]`, i.e. `phi(i)`.
pub fn j2() -> Mat2 {
    Mat2::new(0.0, -1.0, 1.0, 0.0)
}

pub fn phi(z: PlanarComplex) -> Mat2 {
    Mat2::new(z.re, -z.im, z.im, z.re)
}

pub fn psi(z: PlanarComplex) -> Mat2 {
    Mat2::new(z.re, z.im, z.im, -z.re)
}

pub fn is_phi_image(m: &Mat2, tol: f64) -> bool {
    (m[(0, 0)] - m[(1, 1)]).abs() <= tol && (m[(1, 0)] + m[(0, 1)]).abs() <= tol
}

pub fn is_psi_image(m: &Mat2, tol: f64) -> bool {
    (m[(0, 0)] + m[(1, 1)]).abs() <= tol && (m[(0, 1)] - m[(1, 0)]).abs() <= tol
}

pub fn to_vec2(z: PlanarComplex) -> Vector2<f64> {
    Vector2::new(z.re, z.im)
}

pub fn from_vec2(v: &Vector2<f64>) -> PlanarComplex {
    PlanarComplex::new(v[0], v[1])
}

/// Entrywise lift of a complex 4×4 matrix to a real 8×8 matrix of `phi`
/// blocks. It is a `*`-homomorphism: `lift(S)·lift(T) = lift(S·T)` and
/// `lift(T)ᵀ = lift(T̄ᵀ)`.
pub fn lift_phi(t: &Matrix4<PlanarComplex>) -> SMatrix<f64, 8, 8> {
    let mut out = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(&phi(t[(i, j)]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> PlanarComplex {
        PlanarComplex::new(re, im)
    }

    fn max_abs(m: &Mat2) -> f64 {
        m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(c(1.0, 2.0)), Mat2::new(1.0, -2.0, 2.0, 1.0));
        assert_eq!(phi(c(1.0, 0.0)), Mat2::identity());
        assert_eq!(phi(c(0.0, 1.0)) * phi(c(0.0, 1.0)), phi(c(-1.0, 0.0)));
        assert_eq!(phi(c(-1.0, 0.0)), -Mat2::identity());
        assert_eq!(phi(c(0.0, 1.0)), j2());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(c(1.0, 0.0)), Mat2::new(1.0, 0.0, 0.0, -1.0));
        assert_eq!(psi(c(0.0, 1.0)), Mat2::new(0.0, 1.0, 1.0, 0.0));
        let z = c(3.0, 4.0);
        assert_eq!(psi(z) * psi(z), Mat2::identity() * 25.0);
    }

    #[test]
    fn membership_predicates() {
        let z = c(0.3, -1.7);
        assert!(is_phi_image(&phi(z), 0.0));
        assert!(is_psi_image(&psi(z), 0.0));
        assert!(!is_phi_image(&psi(z), 1e-12));
        assert!(!is_psi_image(&phi(z), 1e-12));
    }

    fn small_complex() -> impl Strategy<Value = PlanarComplex> {
        (0.0..10.0_f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| PlanarComplex::from_polar(r, a))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn product_rules(z in small_complex(), w in small_complex()) {
            let tol = 1e-12;
            prop_assert!(max_abs(&(phi(z) * phi(w) - phi(z * w))) <= tol);
            prop_assert!(max_abs(&(psi(z) * psi(w) - phi(z * w.conj()))) <= tol);
            prop_assert!(max_abs(&(phi(z) * psi(w) - psi(z * w))) <= tol);
            prop_assert!(max_abs(&(psi(z) * phi(w) - psi(z * w.conj()))) <= tol);
        }

        #[test]
        fn transpose_rules(z in small_complex()) {
            prop_assert_eq!(phi(z).transpose(), phi(z.conj()));
            prop_assert_eq!(psi(z).transpose(), psi(z));
        }

        #[test]
        fn block_lift_is_star_homomorphism(
            s in proptest::collection::vec(small_complex(), 16),
            t in proptest::collection::vec(small_complex(), 16),
        ) {
            let s = Matrix4::from_row_slice(&s);
            let t = Matrix4::from_row_slice(&t);
            let prod = lift_phi(&s) * lift_phi(&t) - lift_phi(&(s * t));
            prop_assert!(prod.amax() <= 1e-10);
            let adj = lift_phi(&t).transpose() - lift_phi(&t.adjoint());
            prop_assert!(adj.amax() == 0.0);
        }
    }
}
