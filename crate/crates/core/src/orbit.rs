//! The homographic elliptic solution in physical time and a nonlinear
//! n-body integrator to test it against.
//!
//! Time starts at pericenter. Each body moves as `qᵢ(t) = x(t)·aᵢ` where
//! `x(t) = r(t)e^{iθ(t)}` is a Kepler orbit with gravitational parameter
//! `μ = U(a)` and semi-latus rectum `p`.

use std::f64::consts::PI;
use std::io::Write;

use crate::centralconfig::CentralConfiguration;
use crate::cplx::PlanarComplex;
use crate::linsys::OrbitParams;
use crate::ode::{dopri5, OdeOptions, OdeStats};
use crate::{Error, Result};

/// Pairs closer than this abort the nonlinear integration.
pub const COLLISION_DISTANCE: f64 = 1e-8;

/// Positions and momenta `Pᵢ = mᵢ q̇ᵢ` of `n` planar bodies, stored as
/// `[x₁, y₁, x₂, y₂, …]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn n_bodies(&self) -> usize {
        self.q.len() / 2
    }

    pub fn position(&self, i: usize) -> PlanarComplex {
        PlanarComplex::new(self.q[2 * i], self.q[2 * i + 1])
    }

    pub fn momentum(&self, i: usize) -> PlanarComplex {
        PlanarComplex::new(self.p[2 * i], self.p[2 * i + 1])
    }

    fn from_flat(y: &[f64]) -> Self {
        let h = y.len() / 2;
        PhaseState { q: y[..h].to_vec(), p: y[h..].to_vec() }
    }

    fn to_flat(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }
}

/// Solves `E − e sin E = M` by Newton's method.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::InvalidParameter(format!("eccentricity must lie in [0, 1), got {e}")));
    }
    let m = mean_anomaly;
    let mut big_e = m + e * m.sin();
    for _ in 0..100 {
        let f = big_e - e * big_e.sin() - m;
        let step = f / (1.0 - e * big_e.cos());
        big_e -= step;
        if step.abs() <= 1e-15 * big_e.abs().max(1.0) {
            break;
        }
    }
    Ok(big_e)
}

/// Relative Kepler orbit `x(t)` with gravitational parameter `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerOrbit {
    pub mu: f64,
    pub params: OrbitParams,
}

/// Polar state of a Kepler orbit at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerState {
    pub r: f64,
    pub theta: f64,
    pub r_dot: f64,
    pub theta_dot: f64,
}

impl KeplerState {
    pub fn position(&self) -> PlanarComplex {
        PlanarComplex::from_polar(self.r, self.theta)
    }

    pub fn velocity(&self) -> PlanarComplex {
        PlanarComplex::new(self.r_dot, self.r * self.theta_dot) * PlanarComplex::from_polar(1.0, self.theta)
    }
}

impl KeplerOrbit {
    pub fn new(mu: f64, params: OrbitParams) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!("gravitational parameter must be positive, got {mu}")));
        }
        Ok(KeplerOrbit { mu, params })
    }

    pub fn semi_major_axis(&self) -> f64 {
        self.params.p / (1.0 - self.params.e * self.params.e)
    }

    /// `2π a^{3/2}/√μ`.
    pub fn period(&self) -> f64 {
        2.0 * PI * self.semi_major_axis().powf(1.5) / self.mu.sqrt()
    }

    pub fn state(&self, t: f64) -> KeplerState {
        let OrbitParams { e, p } = self.params;
        let a = self.semi_major_axis();
        let n = (self.mu / a.powi(3)).sqrt();
        // reduce the mean anomaly so Newton starts near the root
        let mean = (n * t).rem_euclid(2.0 * PI);
        let turns = ((n * t) - mean) / (2.0 * PI);
        let big_e = solve_kepler(mean, e).expect("eccentricity validated by OrbitParams");
        let theta = 2.0 * ((1.0 + e).sqrt() * (big_e / 2.0).sin()).atan2((1.0 - e).sqrt() * (big_e / 2.0).cos());
        let r = a * (1.0 - e * big_e.cos());
        let h = (self.mu * p).sqrt();
        KeplerState { r, theta: theta + 2.0 * PI * turns, r_dot: (self.mu / p).sqrt() * e * theta.sin(), theta_dot: h / (r * r) }
    }
}

/// Period of the homographic solution, `2π (p/(1−e²))^{3/2}/√μ`.
pub fn kepler_period(mu: f64, params: &OrbitParams) -> f64 {
    2.0 * PI * (params.p / (1.0 - params.e * params.e)).powf(1.5) / mu.sqrt()
}

/// State of the homographic solution at time `t`.
pub fn ere_state(t: f64, cc: &CentralConfiguration, params: &OrbitParams) -> PhaseState {
    let orbit = KeplerOrbit { mu: cc.mu, params: *params };
    let ks = orbit.state(t);
    let (x, v) = (ks.position(), ks.velocity());
    let m = cc.masses().as_array();
    let mut q = Vec::with_capacity(8);
    let mut p = Vec::with_capacity(8);
    for (mi, ai) in m.iter().zip(cc.positions()) {
        let qi = x * ai;
        let pi = v * ai * *mi;
        q.extend([qi.re, qi.im]);
        p.extend([pi.re, pi.im]);
    }
    PhaseState { q, p }
}

fn min_pair_distance(q: &[f64]) -> (usize, usize, f64) {
    let n = q.len() / 2;
    let mut best = (0, 0, f64::INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let d = (q[2 * i] - q[2 * j]).hypot(q[2 * i + 1] - q[2 * j + 1]);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

fn nbody_rhs(masses: &[f64], y: &[f64], dy: &mut [f64]) {
    let n = masses.len();
    let (q, p) = y.split_at(2 * n);
    let (dq, dp) = dy.split_at_mut(2 * n);
    for i in 0..n {
        dq[2 * i] = p[2 * i] / masses[i];
        dq[2 * i + 1] = p[2 * i + 1] / masses[i];
    }
    dp.fill(0.0);
    for i in 0..n {
        for j in i + 1..n {
            let dx = q[2 * j] - q[2 * i];
            let dyy = q[2 * j + 1] - q[2 * i + 1];
            let r2 = dx * dx + dyy * dyy;
            let s = masses[i] * masses[j] / (r2 * r2.sqrt());
            dp[2 * i] += s * dx;
            dp[2 * i + 1] += s * dyy;
            dp[2 * j] -= s * dx;
            dp[2 * j + 1] -= s * dyy;
        }
    }
}

/// States sampled at requested times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub masses: Vec<f64>,
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub stats: OdeStats,
}

/// Integrates Newton's equations for `n` bodies with `G = 1` from `state0`
/// at `t = 0`, recording the state at each of the ascending, nonnegative
/// `times`.
pub fn integrate_nbody(state0: &PhaseState, masses: &[f64], times: &[f64], opts: &OdeOptions) -> Result<Trajectory> {
    let n = masses.len();
    if state0.q.len() != 2 * n || state0.p.len() != 2 * n {
        return Err(Error::InvalidParameter(format!("state has {} coordinates for {n} bodies", state0.q.len())));
    }
    if masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::InvalidParameter("masses must be positive".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::InvalidParameter("sample times must be ascending and nonnegative".into()));
    }
    let (i, j, d) = min_pair_distance(&state0.q);
    if d < COLLISION_DISTANCE {
        return Err(Error::CollisionDetected { t: 0.0, i, j });
    }
    let mut y = state0.to_flat();
    let mut t = 0.0;
    let mut stats = OdeStats::default();
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        let mut seg = OdeStats::default();
        y = dopri5(
            |_, y, dy| nbody_rhs(masses, y, dy),
            t,
            &y,
            target,
            opts,
            &mut seg,
            |t, y| {
                let (i, j, d) = min_pair_distance(&y[..2 * n]);
                if d < COLLISION_DISTANCE {
                    Err(Error::CollisionDetected { t, i, j })
                } else {
                    Ok(())
                }
            },
        )?;
        stats.merge(&seg);
        t = target;
        states.push(PhaseState::from_flat(&y));
    }
    Ok(Trajectory { masses: masses.to_vec(), times: times.to_vec(), states, stats })
}

pub fn energy(masses: &[f64], s: &PhaseState) -> f64 {
    let n = masses.len();
    let kinetic: f64 = (0..n).map(|i| s.momentum(i).norm_sqr() / (2.0 * masses[i])).sum();
    let mut potential = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            potential += masses[i] * masses[j] / (s.position(i) - s.position(j)).norm();
        }
    }
    kinetic - potential
}

/// `Σ qᵢ × Pᵢ`
pub fn angular_momentum(s: &PhaseState) -> f64 {
    (0..s.n_bodies()).map(|i| (s.position(i).conj() * s.momentum(i)).im).sum()
}

pub fn linear_momentum(s: &PhaseState) -> PlanarComplex {
    (0..s.n_bodies()).map(|i| s.momentum(i)).sum()
}

/// `max_{t,i} |Qᵢ(t) − r(t)e^{iθ(t)} aᵢ|` over a sampled trajectory.
pub fn homographic_deviation(traj: &Trajectory, cc: &CentralConfiguration, params: &OrbitParams) -> f64 {
    let mut worst: f64 = 0.0;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let reference = ere_state(*t, cc, params);
        for i in 0..s.n_bodies() {
            worst = worst.max((s.position(i) - reference.position(i)).norm());
        }
    }
    worst
}

/// Largest relative energy change along the trajectory.
pub fn energy_drift(traj: &Trajectory) -> f64 {
    let Some(first) = traj.states.first() else {
        return 0.0;
    };
    let e0 = energy(&traj.masses, first);
    traj.states.iter().map(|s| ((energy(&traj.masses, s) - e0) / e0).abs()).fold(0.0, f64::max)
}

/// CSV with columns `t, q1x, q1y, …, p1x, p1y, …` at 17 significant digits.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory) -> std::io::Result<()> {
    let n = traj.masses.len();
    let mut header = vec!["t".to_string()];
    for prefix in ["q", "p"] {
        for i in 1..=n {
            header.push(format!("{prefix}{i}x"));
            header.push(format!("{prefix}{i}y"));
        }
    }
    writeln!(w, "{}", header.join(","))?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let row: Vec<String> = std::iter::once(t).chain(&s.q).chain(&s.p).map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centralconfig::{solve_cc, Configuration, Family, MassVector, SolverOptions};

    fn square() -> CentralConfiguration {
        let m = MassVector::new([1.0; 4]).unwrap();
        let seed = Configuration::normalize([1.0; 4], Family::Square.seed()).unwrap();
        solve_cc(&m, &seed, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn kepler_equation_examples() {
        assert_eq!(solve_kepler(0.0, 0.7).unwrap(), 0.0);
        for m in [0.3, 1.0, 2.5, 5.0] {
            assert!((solve_kepler(m, 0.0).unwrap() - m).abs() < 1e-15);
        }
        let e = solve_kepler(PI / 2.0, 0.5).unwrap();
        assert!((e - 0.5 * e.sin() - PI / 2.0).abs() < 1e-13);
        // bisection oracle
        let (mut lo, mut hi) = (0.0f64, PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - 0.5 * mid.sin() < PI / 2.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((e - lo).abs() < 1e-13);
        assert!((e - 2.02097993808977).abs() < 1e-13);
        for ecc in [0.1, 0.9, 0.99] {
            for m in [0.01, 1.0, 3.0, 6.2] {
                let big_e = solve_kepler(m, ecc).unwrap();
                assert!((big_e - ecc * big_e.sin() - m).abs() < 1e-13);
            }
        }
        assert!(solve_kepler(1.0, 1.0).is_err());
    }

    #[test]
    fn kepler_orbit_geometry() {
        let orbit = KeplerOrbit::new(0.7, OrbitParams::new(0.4, 1.3).unwrap()).unwrap();
        let s0 = orbit.state(0.0);
        assert!((s0.r - 1.3 / 1.4).abs() < 1e-15);
        assert_eq!(s0.theta, 0.0);
        let half = orbit.state(orbit.period() / 2.0);
        assert!((half.r - 1.3 / 0.6).abs() < 1e-12);
        assert!((half.theta - PI).abs() < 1e-12);
        // areal velocity
        for t in [0.3, 1.7, 4.0] {
            let s = orbit.state(t);
            assert!((s.r * s.r * s.theta_dot - (0.7f64 * 1.3).sqrt()).abs() < 1e-14);
            assert!((s.r - 1.3 / (1.0 + 0.4 * s.theta.cos())).abs() < 1e-14);
        }
        let h = 1e-5;
        let t = 2.2;
        let fd = (orbit.state(t + h).position() - orbit.state(t - h).position()) / (2.0 * h);
        assert!((fd - orbit.state(t).velocity()).norm() < 1e-9);
    }

    #[test]
    fn ere_state_circular_start() {
        let cc = square();
        let s = ere_state(0.0, &cc, &OrbitParams::new(0.0, 2.0).unwrap());
        for i in 0..4 {
            let a = cc.positions()[i];
            assert!((s.position(i) - a * 2.0).norm() < 1e-15);
            // circular speed |v| = √(μ/p)·|aᵢ|, perpendicular to the position
            let v = s.momentum(i) / cc.masses().get(i);
            assert!((v.norm() - (cc.mu / 2.0).sqrt() * a.norm()).abs() < 1e-14);
            assert!((v.conj() * s.position(i)).re.abs() < 1e-14);
        }
        assert!(linear_momentum(&s).norm() < 1e-15);
    }

    #[test]
    fn ere_state_is_periodic() {
        let cc = square();
        let params = OrbitParams::new(0.6, 1.0).unwrap();
        let period = kepler_period(cc.mu, &params);
        for t in [0.0, 0.9, 3.1] {
            let a = ere_state(t, &cc, &params);
            let b = ere_state(t + period, &cc, &params);
            for k in 0..8 {
                assert!((a.q[k] - b.q[k]).abs() < 1e-9);
                assert!((a.p[k] - b.p[k]).abs() < 1e-9);
            }
        }
        let pericenter = ere_state(0.0, &cc, &params);
        assert!((pericenter.position(0).norm() - cc.positions()[0].norm() / 1.6).abs() < 1e-15);
    }

    #[test]
    fn ere_conserved_quantities() {
        let cc = square();
        let params = OrbitParams::new(0.3, 1.0).unwrap();
        let m = cc.masses().as_array().to_vec();
        let period = kepler_period(cc.mu, &params);
        let s0 = ere_state(0.0, &cc, &params);
        let (e0, l0) = (energy(&m, &s0), angular_momentum(&s0));
        for k in 1..20 {
            let s = ere_state(period * k as f64 / 20.0, &cc, &params);
            assert!((energy(&m, &s) - e0).abs() < 1e-10);
            assert!((angular_momentum(&s) - l0).abs() < 1e-10);
        }
    }

    #[test]
    fn two_body_period() {
        // equal masses 1/2 at separation 1: relative orbit with μ = 1
        let masses = [0.5, 0.5];
        let v = 0.5;
        let s0 = PhaseState { q: vec![-0.5, 0.0, 0.5, 0.0], p: vec![0.0, -0.5 * v, 0.0, 0.5 * v] };
        let period = 2.0 * PI;
        let opts = OdeOptions { rtol: 1e-13, atol: 1e-15, ..Default::default() };
        let traj = integrate_nbody(&s0, &masses, &[period / 2.0, period], &opts).unwrap();
        let end = &traj.states[1];
        for k in 0..4 {
            assert!((end.q[k] - s0.q[k]).abs() < 1e-8);
        }
        let mid = &traj.states[0];
        assert!((mid.q[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn collision_is_detected() {
        let masses = [0.5, 0.5];
        let s0 = PhaseState { q: vec![-0.5, 0.0, 0.5, 0.0], p: vec![0.0; 4] };
        let err = integrate_nbody(&s0, &masses, &[10.0], &OdeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::CollisionDetected { .. } | Error::StepUnderflow { .. }));
    }

    #[test]
    fn invalid_sampling_rejected() {
        let s0 = PhaseState { q: vec![-0.5, 0.0, 0.5, 0.0], p: vec![0.0; 4] };
        assert!(integrate_nbody(&s0, &[0.5, 0.5], &[2.0, 1.0], &OdeOptions::default()).is_err());
        assert!(integrate_nbody(&s0, &[0.5], &[1.0], &OdeOptions::default()).is_err());
    }

    #[test]
    fn csv_layout() {
        let traj = Trajectory {
            masses: vec![1.0, 1.0],
            times: vec![0.0],
            states: vec![PhaseState { q: vec![1.0, 2.0, 3.0, 4.0], p: vec![5.0, 6.0, 7.0, 8.0] }],
            stats: OdeStats::default(),
        };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,q1x,q1y,q2x,q2y,p1x,p1y,p2x,p2y");
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    }
}
