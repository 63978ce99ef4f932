//! Acceptance gate. Prints one line per criterion and exits nonzero if any
//! criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;

use ere4::centralconfig::{Configuration, Family, MassVector, SolverOptions};
use ere4::cplx::{psi, Mat2};
use ere4::floquet::{
    floquet_multipliers, generator, monodromy, spectral_distance, spectrum_autonomous, DecoupledMode, EssentialBlock, FullSystem,
    HessianSystem, IntegratorOptions, KeplerSystem,
};
use ere4::linsys::{hessian_fd, hessian_pairwise, OrbitParams};
use ere4::ode::OdeOptions;
use ere4::orbit::{ere_state, integrate_nbody, kepler_period, energy_drift, homographic_deviation};
use ere4::pipeline::{reduce, Reduction};
use nalgebra::{DMatrix, SMatrix};
use num_complex::Complex64;

struct Case {
    name: &'static str,
    masses: [f64; 4],
    family: Family,
}

const CASES: [Case; 3] = [
    Case { name: "square", masses: [1.0; 4], family: Family::Square },
    Case { name: "rhombus(1,0.6,1,0.6)", masses: [1.0, 0.6, 1.0, 0.6], family: Family::Rhombus },
    Case { name: "triangle+center", masses: [1.0; 4], family: Family::TrianglePlusCenter },
];

fn solve(case: &Case) -> Reduction {
    let m = MassVector::new(case.masses).expect("valid masses");
    let seed = Configuration::normalize(case.masses, case.family.seed()).expect("valid seed");
    reduce(&m, &seed, &SolverOptions { tol: 1e-12, max_iter: 200 }).expect("reduction succeeds")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `max |AᵀMA − I|`, `max |⟨vᵢ, vⱼ⟩_M̃ − δᵢⱼ|` and the D-spectrum error.
fn criterion_1(reds: &[Reduction]) -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut residual_ok = true;
    for r in reds {
        residual_ok &= r.cc.residual_norm <= 1e-12;
        let m = r.cc.masses().as_array();
        let mut mm = SMatrix::<f64, 8, 8>::zeros();
        for i in 0..4 {
            mm[(2 * i, 2 * i)] = m[i];
            mm[(2 * i + 1, 2 * i + 1)] = m[i];
        }
        let a = &r.basis.a;
        worst.0 = worst.0.max((a.transpose() * mm * a - SMatrix::<f64, 8, 8>::identity()).amax());

        let vecs: [[Complex64; 4]; 4] = [
            r.basis.v1.map(|x| Complex64::new(x, 0.0)),
            r.basis.v2,
            r.basis.v3,
            r.basis.v4.map(|x| Complex64::new(x, 0.0)),
        ];
        for i in 0..4 {
            for j in 0..4 {
                let g: Complex64 = (0..4).map(|k| vecs[i][k].conj() * vecs[j][k] * m[k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst.1 = worst.1.max((g - target).norm());
            }
        }

        // eigenvalues of D from a general eigen-solver
        let d = DMatrix::from_fn(4, 4, |i, j| r.cc.d[(i, j)]);
        let mut ev: Vec<f64> = d.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let tr = r.cc.d.trace();
        let mut expected = vec![r.cc.mu, 0.0, 0.0, tr - r.cc.mu];
        expected.sort_by(f64::total_cmp);
        for (x, y) in ev.iter().zip(&expected) {
            worst.2 = worst.2.max((x - y).abs());
        }
    }
    let pass = residual_ok && worst.0 <= 1e-10 && worst.1 <= 1e-10 && worst.2 <= 1e-9;
    outcome(
        pass,
        format!(
            "cc residual <= 1e-12: {residual_ok}; ATMA defect {:.2e}; M-orthonormality {:.2e}; D spectrum {:.2e}",
            worst.0, worst.1, worst.2
        ),
    )
}

fn criterion_2(reds: &[Reduction]) -> Outcome {
    let beta1 = reds.iter().map(|r| r.betas.beta1.abs()).fold(0.0, f64::max);
    // masses 1/4 at the unit-circle vertices: four sides of length √2 and
    // two diagonals of length 2, so μ = U = (4/√2 + 2/2)/16; tr D = 1/8
    let mu_square = (1.0 + 2.0 * SQRT_2) / 16.0;
    let beta2_oracle = 1.0 - (1.0 / 8.0) / mu_square;
    let sq = &reds[0];
    let beta2_err = (sq.betas.beta2 - beta2_oracle).abs();
    let beta12 = sq.betas.beta12.norm();
    let pass = beta1 <= 1e-12 && beta2_err <= 1e-10 && beta12 <= 1e-10;
    outcome(
        pass,
        format!(
            "max|beta1| {beta1:.2e}; square beta2 {:.16} vs oracle {beta2_oracle:.16} (err {beta2_err:.2e}); square |beta12| {beta12:.2e}",
            sq.betas.beta2
        ),
    )
}

fn criterion_3(reds: &[Reduction]) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in reds {
        let mu = r.cc.mu;
        let sigma = r.cc.sigma(1.0);
        let fd = hessian_fd(&r.basis, sigma, 1e-5).expect("fd hessian");
        let scaled = fd * (sigma.powi(3) / mu);
        let b = &r.betas;
        let block = |i: usize, j: usize| -> Mat2 { scaled.fixed_view::<2, 2>(2 * i, 2 * j).into_owned() };
        let k = Mat2::new(2.0, 0.0, 0.0, -1.0);
        let w1 = Mat2::identity() * 0.5 + psi(b.beta11);
        let w2 = Mat2::identity() * ((1.0 + b.beta2) / 2.0) + psi(b.beta22);
        let w12 = psi(b.beta12);
        let errs = [
            (block(0, 0) - k).amax(),
            block(0, 1).amax(),
            block(0, 2).amax(),
            block(1, 0).amax(),
            block(2, 0).amax(),
            (block(1, 1) - w1).amax(),
            (block(2, 2) - w2).amax(),
            (block(1, 2) - w12).amax(),
            (block(2, 1) - w12.transpose()).amax(),
        ];
        worst = errs.iter().copied().fold(worst, f64::max);
    }
    outcome(worst <= 1e-5, format!("max scaled block error {worst:.2e} (h = 1e-5, three configurations)"))
}

fn criterion_4(square: &Reduction, opts: &IntegratorOptions) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_pairwise: f64 = 0.0;
    let sigma = square.cc.sigma(1.0);
    let exact_hessian = hessian_pairwise(&square.basis, sigma);
    for e in [0.0, 0.3, 0.6] {
        let params = OrbitParams::new(e, 1.0).unwrap();
        let sys = square.essential_system(params);
        let full = monodromy(&FullSystem(sys), opts).expect("full monodromy");
        let kepler = monodromy(&KeplerSystem(params), opts).expect("kepler monodromy");
        let essential = monodromy(&EssentialBlock(sys), opts).expect("essential monodromy");
        let union: Vec<Complex64> = kepler.eigenvalues.iter().chain(&essential.eigenvalues).copied().collect();
        worst = worst.max(spectral_distance(&full.eigenvalues, &union));
        // the full system assembled from the pairwise potential Hessian
        let from_hessian = HessianSystem { params, sigma, hessian: exact_hessian };
        let alt = monodromy(&from_hessian, opts).expect("hessian-route monodromy");
        worst_pairwise = worst_pairwise.max(spectral_distance(&alt.eigenvalues, &union));
    }
    let pass = worst <= 1e-7 && worst_pairwise <= 1e-7;
    outcome(
        pass,
        format!("e in {{0, 0.3, 0.6}}: full vs kepler+essential {worst:.2e}; pairwise-Hessian full vs kepler+essential {worst_pairwise:.2e}"),
    )
}

/// `exp(A)` by scaling and squaring with a degree-24 Taylor polynomial.
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.abs().row_sum().max();
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = a / 2f64.powi(s);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

fn criterion_5(square: &Reduction, opts: &IntegratorOptions) -> Outcome {
    let mut defect: f64 = 0.0;
    let mut det: f64 = 0.0;
    let mut runs = 0;
    for k in 0..10 {
        let params = OrbitParams::new(k as f64 / 10.0, 1.0).unwrap();
        let sys = square.essential_system(params);
        let reports = [
            monodromy(&EssentialBlock(sys), opts).expect("essential monodromy"),
            monodromy(&FullSystem(sys), opts).expect("full monodromy"),
            monodromy(&KeplerSystem(params), opts).expect("kepler monodromy"),
        ];
        for rep in &reports {
            defect = defect.max(rep.symplectic_defect);
            det = det.max((rep.det - 1.0).abs());
            runs += 1;
        }
    }
    let circular = square.essential_system(OrbitParams::circular());
    let rep = monodromy(&EssentialBlock(circular), opts).expect("circular monodromy");
    let b = DMatrix::from_fn(8, 8, |i, j| circular.essential_matrix(0.0)[(i, j)]);
    let oracle = expm(&(generator(&b) * (2.0 * PI)));
    let expm_rel = (&rep.matrix - &oracle).amax() / oracle.amax();
    let mult = floquet_multipliers(&spectrum_autonomous(&EssentialBlock(circular)).unwrap());
    let eig = spectral_distance(&rep.eigenvalues, &mult);
    let pass = defect <= 1e-8 && det <= 1e-8 && expm_rel <= 1e-9;
    outcome(
        pass,
        format!(
            "{runs} runs over e = 0..0.9: max symplectic defect {defect:.2e}, max |det-1| {det:.2e}; e=0 vs exp(2piJB) rel {expm_rel:.2e}, multipliers {eig:.2e}"
        ),
    )
}

fn criterion_6(square: &Reduction) -> Outcome {
    let params = OrbitParams::new(0.3, 1.0).unwrap();
    let period = kepler_period(square.cc.mu, &params);
    let state0 = ere_state(0.0, &square.cc, &params);
    let samples: Vec<f64> = (1..=400).map(|k| period * k as f64 / 400.0).collect();
    let opts = OdeOptions { rtol: 1e-13, atol: 1e-15, ..Default::default() };
    let masses = square.cc.masses().as_array().to_vec();
    let mut traj = integrate_nbody(&state0, &masses, &samples, &opts).expect("nonlinear integration");
    traj.times.insert(0, 0.0);
    traj.states.insert(0, state0);
    let dev = homographic_deviation(&traj, &square.cc, &params);
    let drift = energy_drift(&traj);
    outcome(dev <= 1e-7 && drift <= 1e-9, format!("square e=0.3: max deviation {dev:.2e}; energy drift {drift:.2e} ({} steps)", traj.stats.accepted))
}

fn criterion_7(reds: &[Reduction], names: &[&str], opts: &IntegratorOptions) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = Vec::new();
    let mut skipped = Vec::new();
    for (r, name) in reds.iter().zip(names) {
        if r.betas.beta12.norm() > 1e-10 {
            skipped.push(format!("{name} |beta12|={:.3}", r.betas.beta12.norm()));
            continue;
        }
        checked.push(*name);
        for e in [0.0, 0.3, 0.6] {
            let sys = r.essential_system(OrbitParams::new(e, 1.0).unwrap());
            let ess = monodromy(&EssentialBlock(sys), opts).expect("essential monodromy");
            let d1 = monodromy(&DecoupledMode { system: sys, mode: 1 }, opts).expect("mode 1");
            let d2 = monodromy(&DecoupledMode { system: sys, mode: 2 }, opts).expect("mode 2");
            let union: Vec<Complex64> = d1.eigenvalues.iter().chain(&d2.eigenvalues).copied().collect();
            worst = worst.max(spectral_distance(&ess.eigenvalues, &union));
        }
    }
    outcome(
        !checked.is_empty() && worst <= 1e-7,
        format!("checked {:?} at e in {{0, 0.3, 0.6}}: {worst:.2e}; not applicable: {:?}", checked, skipped),
    )
}

fn main() -> ExitCode {
    let reds: Vec<Reduction> = CASES.iter().map(solve).collect();
    let names: Vec<&str> = CASES.iter().map(|c| c.name).collect();
    let opts = IntegratorOptions::default();

    let results = [
        ("1 basis/unitarity", criterion_1(&reds)),
        ("2 beta suite", criterion_2(&reds)),
        ("3 hessian oracle", criterion_3(&reds)),
        ("4 kepler/essential decoupling", criterion_4(&reds[0], &opts)),
        ("5 floquet quality gates", criterion_5(&reds[0], &opts)),
        ("6 nonlinear homographic orbit", criterion_6(&reds[0])),
        ("7 mode decoupling", criterion_7(&reds, &names, &opts)),
    ];
    let mut all = true;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all &= o.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
