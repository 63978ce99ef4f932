use std::f64::consts::PI;

use ere4::centralconfig::{CentralConfiguration, Configuration, Family, MassVector, SolverOptions};
use ere4::floquet::{
    eigenvalues, monodromy, quadruple_defect, spectral_distance, spectrum_autonomous, EssentialBlock, FullSystem, IntegratorOptions,
    Method, Stability,
};
use ere4::linsys::OrbitParams;
use ere4::ode::OdeOptions;
use ere4::orbit::{ere_state, homographic_deviation, integrate_nbody, kepler_period};
use ere4::pipeline::{reduce, Reduction};
use num_complex::Complex64;

fn reduction(masses: [f64; 4], family: Family) -> Reduction {
    let m = MassVector::new(masses).unwrap();
    let seed = Configuration::normalize(masses, family.seed()).unwrap();
    reduce(&m, &seed, &SolverOptions::default()).unwrap()
}

#[test]
fn spectrum_stable_under_halved_tolerances() {
    for (masses, family) in [([1.0; 4], Family::Square), ([1.0, 2.0, 3.0, 4.0], Family::Square)] {
        let r = reduction(masses, family);
        let sys = EssentialBlock(r.essential_system(OrbitParams::new(0.5, 1.0).unwrap()));
        let coarse = monodromy(&sys, &IntegratorOptions::default()).unwrap();
        let fine = monodromy(&sys, &IntegratorOptions { rtol: 5e-11, atol: 5e-13, ..Default::default() }).unwrap();
        assert!(spectral_distance(&coarse.eigenvalues, &fine.eigenvalues) < 1e-6);
    }
}

#[test]
fn multipliers_come_in_symplectic_quadruples() {
    let r = reduction([1.0, 2.0, 3.0, 4.0], Family::Square);
    for e in [0.0, 0.4, 0.8] {
        let rep = monodromy(&EssentialBlock(r.essential_system(OrbitParams::new(e, 1.0).unwrap())), &IntegratorOptions::default())
            .unwrap();
        assert!(quadruple_defect(&rep.eigenvalues) < 1e-7, "e = {e}");
        assert!(rep.symplectic_defect < 1e-8);
        assert!((rep.det - 1.0).abs() < 1e-8);
    }
}

#[test]
fn autonomous_spectrum_closed_under_negation_and_conjugation() {
    for (masses, family) in [([1.0; 4], Family::Square), ([1.0, 0.6, 1.0, 0.6], Family::Rhombus), ([1.0; 4], Family::TrianglePlusCenter)] {
        let r = reduction(masses, family);
        let ev = spectrum_autonomous(&EssentialBlock(r.essential_system(OrbitParams::circular()))).unwrap();
        let neg: Vec<Complex64> = ev.iter().map(|z| -z).collect();
        let conj: Vec<Complex64> = ev.iter().map(|z| z.conj()).collect();
        assert!(spectral_distance(&ev, &neg) < 1e-12);
        assert!(spectral_distance(&ev, &conj) < 1e-12);
    }
}

#[test]
fn square_circular_golden_exponents() {
    // frozen from a verified run; the equal-mass square is linearly unstable
    let golden = [
        (-8.595_325_037_695_041e-1, 1.0),
        (-6.394_812_009_138_151e-1, 9.533_814_589_775_634e-1),
        (6.394_812_009_138_163e-1, 9.533_814_589_775_635e-1),
        (8.595_325_037_695_033e-1, 1.0),
    ];
    let expected: Vec<Complex64> =
        golden.iter().flat_map(|&(re, im)| [Complex64::new(re, -im), Complex64::new(re, im)]).collect();
    let r = reduction([1.0; 4], Family::Square);
    let sys = EssentialBlock(r.essential_system(OrbitParams::circular()));
    let ev = spectrum_autonomous(&sys).unwrap();
    assert!(spectral_distance(&ev, &expected) < 1e-12);
    let rep = monodromy(&sys, &IntegratorOptions::default()).unwrap();
    assert_eq!(rep.stability, Stability::Unstable);
}

#[test]
fn dormand_prince_cross_check() {
    let r = reduction([1.0, 2.0, 3.0, 4.0], Family::Square);
    let sys = FullSystem(r.essential_system(OrbitParams::new(0.2, 1.0).unwrap()));
    let opts = IntegratorOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
    let gl = monodromy(&sys, &opts).unwrap();
    let dp = monodromy(&sys, &IntegratorOptions { method: Method::DormandPrince, ..opts }).unwrap();
    assert!(spectral_distance(&gl.eigenvalues, &dp.eigenvalues) < 1e-7);
    assert!(spectral_distance(&eigenvalues(&gl.matrix), &gl.eigenvalues) == 0.0);
}

#[test]
fn homographic_deviation_is_rotation_invariant() {
    let r = reduction([1.0, 2.0, 3.0, 4.0], Family::Square);
    let params = OrbitParams::new(0.3, 1.0).unwrap();
    let quarter = kepler_period(r.cc.mu, &params) / 4.0;
    let times: Vec<f64> = (1..=20).map(|k| quarter * k as f64 / 20.0).collect();
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
    let deviation = |cc: &CentralConfiguration| {
        let s0 = ere_state(0.0, cc, &params);
        let traj = integrate_nbody(&s0, cc.masses().as_array(), &times, &opts).unwrap();
        homographic_deviation(&traj, cc, &params)
    };
    let base = deviation(&r.cc);
    let rotated = CentralConfiguration::from_configuration(r.cc.config.rotated(0.7 * PI));
    assert!((deviation(&rotated) - base).abs() < 1e-10);
    assert!(base < 1e-8);
}
