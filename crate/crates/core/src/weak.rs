//! Weak-force limit α → 0: scaled potentials, the zero-ĥ energy level and
//! grid checks along families of scaled collision runs.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NcolError, Result};
use crate::mcgehee::{integrate_el_until, radial_exponent, McGeheeState, SimOptions, Trajectory};
use crate::nbody::{
    mass_inner, potential, potential_gradient_raw, Alpha, Configuration, MassVector, TangentVector,
};

/// Default α grid, decreasing.
pub const ALPHA_GRID: [f64; 6] = [0.5, 0.3, 0.2, 0.1, 0.05, 0.02];
/// Runs stop once ln ρ falls below this.
pub const LOG_RHO_STOP: f64 = -30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledPotentials {
    /// U/α.
    pub tilde: f64,
    /// Σ m_i m_j (|x_i − x_j|^{−α} − 1)/α.
    pub hat: f64,
    /// −Σ m_i m_j ln|x_i − x_j|.
    pub log: f64,
}

fn pair_sums(x: &Configuration, m: &MassVector, alpha: f64) -> Result<(f64, f64)> {
    let d = x.min_distance();
    if !(d > 0.0) {
        return Err(NcolError::CollisionConfiguration(d));
    }
    let ms = m.as_slice();
    let (mut hat, mut log) = (0.0, 0.0);
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let ln_d = x.distance(i, j).ln();
            hat += ms[i] * ms[j] * (-alpha * ln_d).exp_m1() / alpha;
            log -= ms[i] * ms[j] * ln_d;
        }
    }
    Ok((hat, log))
}

pub fn scaled_potentials(x: &Configuration, m: &MassVector, alpha: Alpha) -> Result<ScaledPotentials> {
    let u = potential(x, m, alpha)?;
    let (hat, log) = pair_sums(x, m, alpha.get())?;
    Ok(ScaledPotentials { tilde: u / alpha.get(), hat, log })
}

/// Energy of the unscaled solution whose scaled counterpart has ĥ = 0:
/// h = −Σ m_i m_j / α^{α/(α+2)}.
pub fn energy_h(m: &MassVector, alpha: Alpha) -> f64 {
    let a = alpha.get();
    -m.pair_sum() / a.powf(a / (a + 2.0))
}

/// Length factor α^{−1/(α+2)} taking x to x̃.
pub fn length_scale(alpha: Alpha) -> f64 {
    let a = alpha.get();
    a.powf(-1.0 / (a + 2.0))
}

/// Trapezoid action ∫ ½|ẋ|²_M + κU(x) dt of a sampled path with forward
/// difference velocities.
pub fn discrete_action(path: &[Configuration], dt: f64, m: &MassVector, alpha: Alpha, kappa: f64) -> Result<f64> {
    if path.len() < 2 {
        return Ok(0.0);
    }
    let dim = path[0].dim();
    let mut kin = 0.0;
    for w in path.windows(2) {
        let v: Vec<f64> = w[1].flat().iter().zip(w[0].flat()).map(|(b, a)| (b - a) / dt).collect();
        kin += 0.5 * mass_inner(m, dim, &v, &v) * dt;
    }
    let us = path.iter().map(|x| potential(x, m, alpha)).collect::<Result<Vec<_>>>()?;
    let n = us.len();
    let pot: f64 = us.iter().enumerate().map(|(i, u)| if i == 0 || i == n - 1 { 0.5 * u } else { *u }).sum();
    Ok(kin + kappa * pot * dt)
}

/// (Ã(x̃), α^{−2/(α+2)}A(x)) for x̃ = α^{−1/(α+2)}x on the same time grid.
pub fn scaling_pair(path: &[Configuration], dt: f64, m: &MassVector, alpha: Alpha) -> Result<(f64, f64)> {
    let a = alpha.get();
    let lam = length_scale(alpha);
    let scaled: Vec<Configuration> = path.iter().map(|x| x.scaled(lam)).collect();
    let tilde = discrete_action(&scaled, dt, m, alpha, 1.0 / a)?;
    let plain = discrete_action(path, dt, m, alpha, 1.0)?;
    Ok((tilde, a.powf(-2.0 / (a + 2.0)) * plain))
}

/// Initial state at ρ̃ = 1 with prescribed s̃, s̃′ and ρ̃′ < 0 fixed by ĥ = 0:
/// ½c²p² = Û(s) − ½|s′|².
pub fn hat_zero_initial(s: &Configuration, s_prime: &TangentVector, m: &MassVector, alpha: Alpha) -> Result<McGeheeState> {
    let (hat, _) = pair_sums(s, m, alpha.get())?;
    let k = 0.5 * mass_inner(m, s.dim(), s_prime.flat(), s_prime.flat());
    let e = hat - k;
    if !(e > 0.0) {
        return Err(NcolError::RejectedInitialData(format!(
            "U_hat(s) - |s'|^2/2 = {e} leaves no inward radial velocity"
        )));
    }
    let c = radial_exponent(alpha);
    Ok(McGeheeState {
        rho: 1.0,
        rho_prime: -(2.0 * e).sqrt() / c,
        s: s.clone(),
        s_prime: s_prime.clone(),
        tau: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakOptions {
    pub tau_max: f64,
    /// Uniform output spacing.
    pub grid: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Stop when the smallest pairwise distance of s̃ falls below this; away
    /// from the stable manifold the shape drifts into a partial collision.
    pub min_shape_distance: f64,
}

impl Default for WeakOptions {
    fn default() -> Self {
        WeakOptions { tau_max: 400.0, grid: 0.001, rtol: 1e-11, atol: 1e-13, min_shape_distance: 0.2 }
    }
}

fn min_pair_distance(s: &[f64], n: usize, dim: usize) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let r2: f64 = (0..dim).map(|k| (s[i * dim + k] - s[j * dim + k]).powi(2)).sum();
            d = d.min(r2.sqrt());
        }
    }
    d
}

/// Scaled runs over a decreasing α grid from common (s̃(0), s̃′(0)).
#[derive(Debug, Clone)]
pub struct ScaledFamily {
    pub alphas: Vec<f64>,
    pub runs: Vec<Trajectory>,
    pub pair_sum: f64,
}

impl ScaledFamily {
    pub fn build(
        s0: &Configuration,
        s_prime: &TangentVector,
        m: &MassVector,
        alphas: &[f64],
        opts: &WeakOptions,
    ) -> Result<Self> {
        let runs = alphas
            .par_iter()
            .map(|&a| {
                let alpha = Alpha::new(a)?;
                let init = hat_zero_initial(s0, s_prime, m, alpha)?;
                let sim = SimOptions {
                    tau_max: opts.tau_max,
                    rtol: opts.rtol,
                    atol: opts.atol,
                    rho_min: Some(LOG_RHO_STOP.exp()),
                    grid: Some(opts.grid),
                    sigma: 1.0 / a,
                    ..Default::default()
                };
                let (n, dim) = (m.len(), s0.dim());
                let floor = opts.min_shape_distance;
                integrate_el_until(&init, m, alpha, &sim, |y| min_pair_distance(&y[2..2 + n * dim], n, dim) < floor)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScaledFamily { alphas: alphas.to_vec(), runs, pair_sum: m.pair_sum() })
    }

    /// ĥ at the first state of each run.
    pub fn initial_hat(&self) -> Vec<f64> {
        self.runs.iter().zip(&self.alphas).map(|(r, a)| r.h + self.pair_sum / a).collect()
    }

    /// Whether ρ̃′ < 0 at every stored state of every run.
    pub fn radially_decreasing(&self) -> bool {
        self.runs.iter().all(|r| r.y.iter().all(|y| y[1] < 0.0))
    }

    /// For each level, the first τ after which every run has ρ̃ below it.
    pub fn uniform_collapse(&self, levels: &[f64]) -> Vec<(f64, Option<f64>)> {
        levels
            .iter()
            .map(|&lv| {
                let ln = lv.ln();
                let t = self.runs.iter().try_fold(f64::NEG_INFINITY, |acc: f64, r| {
                    let last_above = (0..r.len()).rev().find(|&i| r.log_rho(i) >= ln);
                    match last_above {
                        None => Some(acc.max(r.tau[0])),
                        Some(i) if i + 1 < r.len() => Some(acc.max(r.tau[i + 1])),
                        Some(_) => None,
                    }
                });
                (lv, t)
            })
            .collect()
    }
}

/// Γ = ½|s̃′|² − Û(s̃) sampled along a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaTrace {
    pub tau: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Largest |dΓ/dτ + 2(ρ̃′/ρ̃)|s̃′|²| with a five-point difference quotient.
    pub identity_error: f64,
    /// Partial sums of ∫ −(ρ̃′/ρ̃)|s̃′|² dτ.
    pub dissipation: Vec<f64>,
}

fn hat_of(traj: &Trajectory, i: usize) -> f64 {
    let mut g = vec![0.0; traj.masses.len() * traj.dim];
    let u = potential_gradient_raw(traj.s_flat(i), traj.dim, traj.masses.as_slice(), traj.alpha.get(), &mut g);
    (u - traj.masses.pair_sum()) / traj.alpha.get()
}

/// Requires stored states on a uniform τ grid for the difference check.
pub fn gamma_trace(traj: &Trajectory) -> GammaTrace {
    let n = traj.len();
    let gamma: Vec<f64> = (0..n).map(|i| 0.5 * traj.sprime_sq(i) - hat_of(traj, i)).collect();
    let rhs: Vec<f64> = (0..n).map(|i| -2.0 * traj.rate(i) * traj.sprime_sq(i)).collect();
    let mut err: f64 = 0.0;
    for i in 2..n.saturating_sub(2) {
        let h = traj.tau[i + 1] - traj.tau[i];
        let uniform = (2..=2)
            .all(|_| (traj.tau[i + 2] - traj.tau[i + 1] - h).abs() < 1e-9 * h.max(1.0))
            && (traj.tau[i] - traj.tau[i - 1] - h).abs() < 1e-9 * h.max(1.0)
            && (traj.tau[i - 1] - traj.tau[i - 2] - h).abs() < 1e-9 * h.max(1.0);
        if !uniform {
            continue;
        }
        let d = (gamma[i - 2] - 8.0 * gamma[i - 1] + 8.0 * gamma[i + 1] - gamma[i + 2]) / (12.0 * h);
        err = crate::worst(err, (d - rhs[i]).abs());
    }
    let mut dissipation = vec![0.0; n];
    for i in 1..n {
        let h = traj.tau[i] - traj.tau[i - 1];
        dissipation[i] = dissipation[i - 1] + 0.25 * h * (rhs[i] + rhs[i - 1]);
    }
    GammaTrace { tau: traj.tau.clone(), gamma, identity_error: err, dissipation }
}

/// Outcome of a grid search for (τ_ε, α_ε): the condition holds for every
/// grid α ≤ α_ε and τ ≥ τ_ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinderResult {
    pub epsilon: f64,
    pub tau_eps: Option<f64>,
    pub alpha_eps: Option<f64>,
    /// Per-α first τ from which the condition holds to the end of the run.
    pub table: Vec<(f64, Option<f64>)>,
}

impl FinderResult {
    pub fn found(&self) -> Option<(f64, f64)> {
        self.tau_eps.zip(self.alpha_eps)
    }

    pub fn require(&self) -> Result<(f64, f64)> {
        self.found().ok_or_else(|| {
            NcolError::NotSatisfiedOnGrid(format!("no (tau_eps, alpha_eps) for eps = {}", self.epsilon))
        })
    }
}

/// Smallest index from which `ok` holds through the end of the run.
fn tail_start<F: Fn(usize) -> bool>(n: usize, ok: F) -> Option<usize> {
    match (0..n).rev().find(|&i| !ok(i)) {
        None => Some(0),
        Some(i) if i + 1 < n => Some(i + 1),
        Some(_) => None,
    }
}

fn finish(epsilon: f64, family: &ScaledFamily, table: Vec<(f64, Option<f64>)>) -> FinderResult {
    // Grid values sorted increasing; keep the longest run from the smallest α.
    let mut idx: Vec<usize> = (0..family.alphas.len()).collect();
    idx.sort_by(|&a, &b| family.alphas[a].total_cmp(&family.alphas[b]));
    let mut tau_eps: Option<f64> = None;
    let mut alpha_eps = None;
    for i in idx {
        match table[i].1 {
            Some(t) => {
                tau_eps = Some(tau_eps.map_or(t, |x: f64| x.max(t)));
                alpha_eps = Some(family.alphas[i]);
            }
            None => break,
        }
    }
    FinderResult { epsilon, tau_eps, alpha_eps, table }
}

/// (1 − ρ̃^γ)/γ with γ = 4α/(2−α).
pub fn esplode1_quantity(alpha: f64, log_rho: f64) -> f64 {
    let g = 4.0 * alpha / (2.0 - alpha);
    -(g * log_rho).exp_m1() / g
}

/// Search for τ_ε, α_ε with (1 − ρ̃^γ)/γ ≥ 1/ε.
pub fn check_esplode1(family: &ScaledFamily, epsilon: f64) -> FinderResult {
    let table = family
        .runs
        .iter()
        .zip(&family.alphas)
        .map(|(r, &a)| {
            let k = tail_start(r.len(), |i| esplode1_quantity(a, r.log_rho(i)) >= 1.0 / epsilon);
            (a, k.map(|i| r.tau[i]))
        })
        .collect();
    finish(epsilon, family, table)
}

/// (1 − 2^α)/(α2^α), the lower bound of (d^{−α} − 1)/α for d ≤ 2.
pub fn disotto_floor(alpha: f64) -> f64 {
    let t = 2f64.powf(alpha);
    (1.0 - t) / (alpha * t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisottoReport {
    pub epsilon: f64,
    /// (α, inf over τ ≥ τ_ε of 2Ũ(s̃) + βh̃ρ̃^{β−2}).
    pub table: Vec<(f64, f64)>,
    pub infimum: f64,
    /// 2Σm_im_j·min_α (1 − 2^α)/(α2^α) over the checked α.
    pub constant: f64,
    pub satisfied: bool,
}

/// 2Ũ(s̃) + βh̃ρ̃^{β−2} with h̃ = −Σm_im_j/α.
pub fn disotto_quantity(traj: &Trajectory, i: usize) -> f64 {
    let a = traj.alpha.get();
    let ps = traj.masses.pair_sum();
    let beta = traj.beta();
    let u = hat_of(traj, i) + ps / a;
    2.0 * u - beta * ps / a * ((beta - 2.0) * traj.log_rho(i)).exp()
}

pub fn check_disotto(family: &ScaledFamily, epsilon: f64, tau_eps: f64, alpha_eps: f64) -> Result<DisottoReport> {
    let mut table = Vec::new();
    let mut floor = f64::INFINITY;
    for (r, &a) in family.runs.iter().zip(&family.alphas) {
        if a > alpha_eps {
            continue;
        }
        let inf = (0..r.len())
            .filter(|&i| r.tau[i] >= tau_eps)
            .map(|i| disotto_quantity(r, i))
            .fold(f64::INFINITY, f64::min);
        table.push((a, inf));
        floor = floor.min(disotto_floor(a));
    }
    if table.is_empty() {
        return Err(NcolError::NotSatisfiedOnGrid(format!("no grid alpha at or below {alpha_eps}")));
    }
    let constant = 2.0 * family.pair_sum * floor;
    let infimum = table.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    Ok(DisottoReport { epsilon, table, infimum, constant, satisfied: infimum >= constant + 1.0 / epsilon })
}

/// ∫_{τ_i}^{end} |s̃′|² dτ for every stored index.
fn tail_integrals(r: &Trajectory) -> Vec<f64> {
    let n = r.len();
    let mut tail = vec![0.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        tail[i] = tail[i + 1] + 0.5 * (r.tau[i + 1] - r.tau[i]) * (r.sprime_sq(i) + r.sprime_sq(i + 1));
    }
    tail
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Esplode2Report {
    pub finder: FinderResult,
    /// (α, ∫_{τ_ε}^{end}|s̃′|², min φ over τ ≥ τ_ε) with φ = −ρ̃′/ρ̃.
    pub tails: Vec<(f64, f64, f64)>,
    pub phi_positive: bool,
}

/// Search for τ_ε, α_ε with ∫_{τ}^{end} |s̃′|² < ε.
pub fn check_esplode2(family: &ScaledFamily, epsilon: f64) -> Esplode2Report {
    let table = family
        .runs
        .iter()
        .zip(&family.alphas)
        .map(|(r, &a)| {
            let tail = tail_integrals(r);
            (a, tail_start(r.len(), |i| tail[i] < epsilon).map(|i| r.tau[i]))
        })
        .collect();
    let finder = finish(epsilon, family, table);
    let t0 = finder.tau_eps.unwrap_or(0.0);
    let tails = family
        .runs
        .iter()
        .zip(&family.alphas)
        .map(|(r, &a)| {
            let tail = tail_integrals(r);
            let i = r.tau.partition_point(|&t| t < t0).min(r.len() - 1);
            let phi = (i..r.len()).map(|k| -r.rate(k)).fold(f64::INFINITY, f64::min);
            (a, tail[i], phi)
        })
        .collect();
    let phi_positive = family.runs.iter().all(|r| (0..r.len()).all(|k| r.rate(k) < 0.0));
    Esplode2Report { finder, tails, phi_positive }
}

/// One CSV row of the family report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyRow {
    pub alpha: f64,
    pub tau_eps: Option<f64>,
    pub inf_disotto: Option<f64>,
    pub tail_integral: Option<f64>,
    pub phi_min: f64,
}

pub fn family_report(family: &ScaledFamily, epsilon: f64) -> Vec<FamilyRow> {
    let e1 = check_esplode1(family, epsilon);
    family
        .runs
        .iter()
        .zip(&e1.table)
        .map(|(r, &(alpha, tau))| {
            let phi_min = (0..r.len()).map(|k| -r.rate(k)).fold(f64::INFINITY, f64::min);
            let (inf, tail) = match tau {
                Some(t) => {
                    let i = r.tau.partition_point(|&x| x < t).min(r.len() - 1);
                    let inf = (i..r.len()).map(|k| disotto_quantity(r, k)).fold(f64::INFINITY, f64::min);
                    (Some(inf), Some(tail_integrals(r)[i]))
                }
                None => (None, None),
            };
            FamilyRow { alpha, tau_eps: tau, inf_disotto: inf, tail_integral: tail, phi_min }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::collinear3;

    fn two_bodies(d: f64) -> (Configuration, MassVector) {
        (
            Configuration::new(1, vec![-0.5 * d, 0.5 * d]).unwrap(),
            MassVector::new(vec![1.0, 1.0]).unwrap(),
        )
    }

    fn oracle_start() -> (Configuration, MassVector) {
        let cc = collinear3(1.0, 1.0, Alpha::new(0.5).unwrap()).unwrap();
        (cc.s0.embedded(2).unwrap(), cc.masses)
    }

    fn perturbation(s: &Configuration, m: &MassVector, size: f64) -> TangentVector {
        // Middle body moves along the line; tangent and momentum-free.
        let mut v = vec![0.0; s.flat().len()];
        v[0] = 1.0;
        v[2] = -2.0;
        v[4] = 1.0;
        let n = mass_inner(m, 2, &v, &v).sqrt();
        TangentVector::new(2, v.iter().map(|x| size * x / n).collect()).unwrap()
    }

    #[test]
    fn hat_potential_limits() {
        let (x, m) = two_bodies(2.0);
        let p = scaled_potentials(&x, &m, Alpha::new(1e-6).unwrap()).unwrap();
        assert!((p.hat + 2f64.ln()).abs() < 1e-6);
        assert!((p.log + 2f64.ln()).abs() < 1e-15);
        let (x1, _) = two_bodies(1.0);
        for a in [0.01, 0.5, 1.5] {
            assert_eq!(scaled_potentials(&x1, &m, Alpha::new(a).unwrap()).unwrap().hat, 0.0);
        }
        let q = scaled_potentials(&x, &m, Alpha::new(0.5).unwrap()).unwrap();
        assert!((q.tilde - 2f64.powf(-0.5) / 0.5).abs() < 1e-15);
        assert!((q.hat - (2f64.powf(-0.5) - 1.0) / 0.5).abs() < 1e-15);
    }

    #[test]
    fn energy_level() {
        let m = MassVector::unit(3).unwrap();
        assert!((energy_h(&m, Alpha::new(1.0).unwrap()) + 3.0).abs() < 1e-15);
        assert!((energy_h(&m, Alpha::new(1e-9).unwrap()) + 3.0).abs() < 1e-6);
    }

    #[test]
    fn action_scaling() {
        let m = MassVector::unit(3).unwrap();
        let path: Vec<Configuration> = (0..50)
            .map(|k| {
                let t = k as f64 * 0.02;
                Configuration::new(2, vec![-1.0 + 0.1 * t, 0.2 * t, 0.3, 0.5 - t * t, 1.2, -0.1 * t]).unwrap()
            })
            .collect();
        for a in [0.05, 0.5, 1.0, 1.7] {
            let (lhs, rhs) = scaling_pair(&path, 0.02, &m, Alpha::new(a).unwrap()).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * rhs.abs(), "{a}: {lhs} {rhs}");
        }
    }

    #[test]
    fn esplode1_limit() {
        let eta: f64 = 0.3;
        let v = esplode1_quantity(1e-7, eta.ln());
        assert!((v + eta.ln()).abs() < 1e-6);
        let a = esplode1_quantity(0.1, -1.0);
        let b = esplode1_quantity(0.1, -2.0);
        assert!(b > a);
    }

    #[test]
    fn disotto_floor_bounds_pairs() {
        for a in [0.02, 0.1, 0.5, 1.0] {
            let f = disotto_floor(a);
            for k in 1..=400 {
                let d = 2.0 * k as f64 / 400.0;
                assert!((d.powf(-a) - 1.0) / a >= f - 1e-12);
            }
        }
        assert!((disotto_floor(1e-8) + 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn homothetic_family() {
        let (s0, m) = oracle_start();
        let zero = TangentVector::zeros(2, 3);
        let fam = ScaledFamily::build(&s0, &zero, &m, &[0.5, 0.1, 0.02], &WeakOptions::default()).unwrap();
        assert!(fam.radially_decreasing());
        for (h, a) in fam.initial_hat().iter().zip(&fam.alphas) {
            assert!(h.abs() < 1e-10 * (1.0 + fam.pair_sum / a), "{h}");
        }
        for r in &fam.runs {
            let g = gamma_trace(r);
            let g0 = g.gamma[0];
            assert!(g.gamma.iter().all(|x| (x - g0).abs() < 1e-9));
            assert!(g.identity_error < 1e-6);
        }
        let e1 = check_esplode1(&fam, 0.5);
        assert!(e1.found().is_some());
        let e2 = check_esplode2(&fam, 0.1);
        assert!(e2.tails.iter().all(|t| t.1 < 1e-20));
        assert!(e2.phi_positive);
    }

    #[test]
    fn perturbed_gamma_identity() {
        let (s0, m) = oracle_start();
        let sp = perturbation(&s0, &m, 0.1);
        let fam = ScaledFamily::build(&s0, &sp, &m, &[0.5, 0.05], &WeakOptions::default()).unwrap();
        for r in &fam.runs {
            let g = gamma_trace(r);
            assert!(g.identity_error < 1e-6, "{}", g.identity_error);
            assert!(g.dissipation.last().unwrap().is_finite());
        }
        assert!(fam.radially_decreasing());
    }

    #[test]
    fn rejects_large_velocity() {
        let (s0, m) = oracle_start();
        let sp = perturbation(&s0, &m, 5.0);
        assert!(matches!(
            hat_zero_initial(&s0, &sp, &m, Alpha::new(0.1).unwrap()),
            Err(NcolError::RejectedInitialData(_))
        ));
    }
}
