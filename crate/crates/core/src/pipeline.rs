//! End-to-end reduction with numerical audits.

use crate::centralconfig::{solve_cc, CentralConfiguration, Configuration, MassVector, SolverOptions, N_BODIES};
use crate::floquet::{monodromy, DecoupledMode, EssentialBlock, IntegratorOptions, MonodromyReport};
use crate::linsys::{hessian_fd, hessian_from_betas, EssentialSystem, OrbitParams};
use crate::symbasis::{build_basis, compute_betas, fg_defect, BetaSet, ReductionBasis};
use crate::Result;

/// FD step used by the Hessian audit.
pub const FD_STEP: f64 = 1e-5;
/// `|β₁₂|` below which the essential system splits into two 4-dimensional
/// systems.
pub const DECOUPLING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Audits {
    /// `‖AᵀMA − I₈‖` (max entry).
    pub atma_defect: f64,
    pub unitarity_defect: f64,
    /// Spectrum of `D`, ascending.
    pub d_spectrum: [f64; N_BODIES],
    /// Distance of that spectrum from `{μ, 0, 0, tr D − μ}`.
    pub d_spectrum_defect: f64,
    pub fg_defect: f64,
    /// Largest entry of `(σ³/μ)·(U''_FD − U''_β)` at `p = 1`.
    pub fd_hessian_defect: f64,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub cc: CentralConfiguration,
    pub basis: ReductionBasis,
    pub betas: BetaSet,
    pub audits: Audits,
}

/// Essential monodromy, plus the two decoupled ones when `β₁₂` vanishes.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub essential: MonodromyReport,
    pub decoupled: Option<[MonodromyReport; 2]>,
}

impl Reduction {
    pub fn from_central(cc: CentralConfiguration) -> Result<Self> {
        let basis = build_basis(&cc)?;
        let betas = compute_betas(&cc, &basis)?;
        let sigma = cc.sigma(1.0);
        let fd = hessian_fd(&basis, sigma, FD_STEP)?;
        let scale = sigma.powi(3) / cc.mu;
        let audits = Audits {
            atma_defect: basis.atma_defect(),
            unitarity_defect: basis.unitarity_defect(),
            d_spectrum: cc.d_spectrum(),
            d_spectrum_defect: cc.d_spectrum_defect(),
            fg_defect: fg_defect(&cc, &basis, betas.beta1, betas.beta2),
            fd_hessian_defect: (fd - hessian_from_betas(cc.mu, sigma, &betas)).amax() * scale,
        };
        Ok(Reduction { cc, basis, betas, audits })
    }

    pub fn essential_system(&self, params: OrbitParams) -> EssentialSystem {
        EssentialSystem::new(params, &self.betas)
    }

    pub fn decouples(&self) -> bool {
        self.betas.beta12.norm() <= DECOUPLING_TOL
    }

    pub fn stability(&self, params: OrbitParams, opts: &IntegratorOptions) -> Result<StabilityReport> {
        let system = self.essential_system(params);
        let essential = monodromy(&EssentialBlock(system), opts)?;
        let decoupled = if self.decouples() {
            Some([
                monodromy(&DecoupledMode { system, mode: 1 }, opts)?,
                monodromy(&DecoupledMode { system, mode: 2 }, opts)?,
            ])
        } else {
            None
        };
        Ok(StabilityReport { essential, decoupled })
    }
}

/// Solves for a central configuration from `seed` and reduces it.
pub fn reduce(masses: &MassVector, seed: &Configuration, opts: &SolverOptions) -> Result<Reduction> {
    let cc = solve_cc(masses, seed, opts)?;
    Reduction::from_central(cc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centralconfig::Family;
    use crate::floquet::spectral_distance;
    use crate::Error;

    fn run(masses: [f64; 4], family: Family) -> Result<Reduction> {
        let m = MassVector::new(masses)?;
        let seed = Configuration::normalize(masses, family.seed())?;
        reduce(&m, &seed, &SolverOptions::default())
    }

    #[test]
    fn audits_pass_on_square() {
        let r = run([1.0; 4], Family::Square).unwrap();
        assert!(r.audits.atma_defect < 1e-12);
        assert!(r.audits.unitarity_defect < 1e-12);
        assert!(r.audits.d_spectrum_defect < 1e-12);
        assert!(r.audits.fg_defect < 1e-12);
        assert!(r.audits.fd_hessian_defect < 1e-5);
        assert!(r.decouples());
    }

    #[test]
    fn collinear_family_is_rejected() {
        let err = run([1.0; 4], Family::Collinear).unwrap_err();
        assert_eq!(err, Error::CollinearDegeneracy);
    }

    #[test]
    fn decoupled_reports_reproduce_essential_spectrum() {
        let r = run([1.0; 4], Family::Square).unwrap();
        let rep = r.stability(OrbitParams::new(0.2, 1.0).unwrap(), &IntegratorOptions::default()).unwrap();
        let [a, b] = rep.decoupled.expect("square decouples");
        let union: Vec<_> = a.eigenvalues.iter().chain(&b.eigenvalues).copied().collect();
        assert!(spectral_distance(&rep.essential.eigenvalues, &union) < 1e-7);
        let generic = run([1.0, 2.0, 3.0, 4.0], Family::Square).unwrap();
        assert!(!generic.decouples());
        let rep = generic.stability(OrbitParams::circular(), &IntegratorOptions::default()).unwrap();
        assert!(rep.decoupled.is_none());
    }
}
