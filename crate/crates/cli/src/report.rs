//! Serializable views of pipeline results.

use ere4::centralconfig::CentralConfiguration;
use ere4::floquet::{rows, IntegratorStats, MonodromyReport};
use ere4::pipeline::Reduction;
use ere4::symbasis::BetaSet;
use num_complex::Complex64;
use serde::Serialize;

use crate::input::SCHEMA_VERSION;

/// `[re, im]`
pub type ComplexPair = [f64; 2];

fn pair(z: Complex64) -> ComplexPair {
    [z.re, z.im]
}

#[derive(Debug, Serialize)]
pub struct CcReport {
    pub masses: [f64; 4],
    pub positions: Vec<ComplexPair>,
    pub mu: f64,
    #[serde(rename = "trD")]
    pub tr_d: f64,
    pub residual: f64,
    pub iterations: usize,
    pub collinear: bool,
}

impl CcReport {
    pub fn new(cc: &CentralConfiguration) -> Self {
        CcReport {
            masses: *cc.masses().as_array(),
            positions: cc.positions().iter().copied().map(pair).collect(),
            mu: cc.mu,
            tr_d: cc.trace_d(),
            residual: cc.residual_norm,
            iterations: cc.residual_history.len().saturating_sub(1),
            collinear: cc.collinear,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveCcOutput {
    pub schema_version: u32,
    pub cc: CcReport,
}

#[derive(Debug, Serialize)]
pub struct BasisReport {
    pub k: f64,
    pub l: ComplexPair,
    pub c: [f64; 4],
}

#[derive(Debug, Serialize)]
pub struct BetaReport {
    pub beta1: f64,
    pub beta2: f64,
    pub beta11: ComplexPair,
    pub beta12: ComplexPair,
    pub beta22: ComplexPair,
}

impl BetaReport {
    pub fn new(b: &BetaSet) -> Self {
        BetaReport { beta1: b.beta1, beta2: b.beta2, beta11: pair(b.beta11), beta12: pair(b.beta12), beta22: pair(b.beta22) }
    }
}

#[derive(Debug, Serialize)]
pub struct AuditReport {
    #[serde(rename = "ATMA_defect")]
    pub atma_defect: f64,
    pub unitarity_defect: f64,
    #[serde(rename = "D_spectrum")]
    pub d_spectrum: [f64; 4],
    #[serde(rename = "D_spectrum_defect")]
    pub d_spectrum_defect: f64,
    #[serde(rename = "FG_defect")]
    pub fg_defect: f64,
    pub fd_hessian_defect: f64,
}

#[derive(Debug, Serialize)]
pub struct ReduceOutput {
    pub schema_version: u32,
    pub cc: CcReport,
    pub basis: BasisReport,
    pub betas: BetaReport,
    pub audits: AuditReport,
}

impl ReduceOutput {
    pub fn new(r: &Reduction) -> Self {
        let a = &r.audits;
        ReduceOutput {
            schema_version: SCHEMA_VERSION,
            cc: CcReport::new(&r.cc),
            basis: BasisReport { k: r.basis.k, l: pair(r.basis.l), c: r.basis.v4 },
            betas: BetaReport::new(&r.betas),
            audits: AuditReport {
                atma_defect: a.atma_defect,
                unitarity_defect: a.unitarity_defect,
                d_spectrum: a.d_spectrum,
                d_spectrum_defect: a.d_spectrum_defect,
                fg_defect: a.fg_defect,
                fd_hessian_defect: a.fd_hessian_defect,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatsReport {
    pub method: &'static str,
    pub rtol: f64,
    pub atol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub h_min: f64,
    pub h_max: f64,
}

impl StatsReport {
    fn new(s: &IntegratorStats) -> Self {
        StatsReport {
            method: s.method.as_str(),
            rtol: s.rtol,
            atol: s.atol,
            accepted_steps: s.accepted,
            rejected_steps: s.rejected,
            h_min: s.h_min,
            h_max: s.h_max,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MonodromyOutput {
    pub system_kind: &'static str,
    pub matrix: Vec<Vec<f64>>,
    pub eigenvalues: Vec<ComplexPair>,
    pub eigenvalue_moduli: Vec<f64>,
    pub symplectic_defect: f64,
    pub det: f64,
    pub stability: &'static str,
    pub integrator_stats: StatsReport,
}

impl MonodromyOutput {
    pub fn new(r: &MonodromyReport) -> Self {
        MonodromyOutput {
            system_kind: r.system_kind.as_str(),
            matrix: rows(&r.matrix),
            eigenvalues: r.eigenvalues.iter().copied().map(pair).collect(),
            eigenvalue_moduli: r.eigenvalues.iter().map(|z| z.norm()).collect(),
            symplectic_defect: r.symplectic_defect,
            det: r.det,
            stability: r.stability.as_str(),
            integrator_stats: StatsReport::new(&r.stats),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StabilityOutput {
    pub schema_version: u32,
    pub e: f64,
    pub p: f64,
    pub betas: BetaReport,
    pub essential: MonodromyOutput,
    /// Present when `|β₁₂|` is below the decoupling threshold.
    pub decoupled: Option<[MonodromyOutput; 2]>,
}
