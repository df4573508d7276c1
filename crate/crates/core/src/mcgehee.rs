//! Collision coordinates (ρ, s, τ) with r = √I, s = x/r, ρ = r^{(2−α)/4},
//! dt = r^{(2+α)/2} dτ, and the flow of the reduced Euler–Lagrange system.
//!
//! States are integrated as y = [ln ρ, ρ′/ρ, s, s′]. In these variables the
//! radial equation does not involve the energy, so the flow is regular as
//! ρ → 0 and the energy becomes a diagnostic rather than a parameter.

use nalgebra::DMatrix;

use crate::central::CentralConfiguration;
use crate::error::{NcolError, Result};
use crate::nbody::{
    dot, hessian_bilinear_raw, mass_inner, moment_of_inertia, potential, potential_gradient_raw,
    Alpha, Configuration, MassVector, TangentVector,
};
use crate::ode::{integrate, OdeOptions, Solution};

/// 4/(2−α), so that r = ρ^c.
pub fn radial_exponent(alpha: Alpha) -> f64 {
    4.0 / (2.0 - alpha.get())
}

/// The limiting rate ρ′/ρ → −((2−α)/4)√(2b) at potential level b.
pub fn homothetic_rate(alpha: Alpha, b: f64) -> f64 {
    -(2.0 - alpha.get()) / 4.0 * (2.0 * b).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct McGeheeState {
    pub rho: f64,
    pub rho_prime: f64,
    pub s: Configuration,
    pub s_prime: TangentVector,
    pub tau: f64,
}

/// Cartesian (x, ẋ) to collision coordinates at τ = 0.
pub fn to_mcgehee(x: &Configuration, xdot: &TangentVector, m: &MassVector, alpha: Alpha) -> Result<McGeheeState> {
    let i = moment_of_inertia(x, m);
    if !(i > 0.0) {
        return Err(NcolError::ZeroConfiguration);
    }
    if xdot.flat().len() != x.flat().len() {
        return Err(NcolError::DimensionMismatch("velocity and position sizes differ".into()));
    }
    let c = radial_exponent(alpha);
    let k = (2.0 + alpha.get()) / 2.0;
    let r = i.sqrt();
    let s: Vec<f64> = x.flat().iter().map(|v| v / r).collect();
    let rdot = mass_inner(m, x.dim(), x.flat(), xdot.flat()) / r;
    let rk = r.powf(k);
    let sp: Vec<f64> = xdot
        .flat()
        .iter()
        .zip(&s)
        .map(|(v, si)| (v - rdot * si) / r * rk)
        .collect();
    let rho = r.powf(1.0 / c);
    let p = rdot * r.powf(k - 1.0) / c;
    Ok(McGeheeState {
        rho,
        rho_prime: rho * p,
        s: Configuration::new(x.dim(), s)?,
        s_prime: TangentVector::new(x.dim(), sp)?,
        tau: 0.0,
    })
}

/// Inverse of [`to_mcgehee`].
pub fn from_mcgehee(state: &McGeheeState, alpha: Alpha) -> (Configuration, TangentVector) {
    let c = radial_exponent(alpha);
    let k = (2.0 + alpha.get()) / 2.0;
    let r = state.rho.powf(c);
    let p = state.rho_prime / state.rho;
    let rdot = c * p * r.powf(1.0 - k);
    let rmk = r.powf(-k);
    let dim = state.s.dim();
    let x: Vec<f64> = state.s.flat().iter().map(|v| r * v).collect();
    let xd: Vec<f64> = state
        .s
        .flat()
        .iter()
        .zip(state.s_prime.flat())
        .map(|(si, spi)| rdot * si + r * rmk * spi)
        .collect();
    (
        Configuration::new(dim, x).expect("same shape"),
        TangentVector::new(dim, xd).expect("same shape"),
    )
}

/// h = ρ^{−β}(½c²ρ′² + ρ²(½|s′|² − U(s))).
pub fn energy(state: &McGeheeState, m: &MassVector, alpha: Alpha) -> Result<f64> {
    energy_scaled(state, m, alpha, 1.0)
}

/// Energy for the potential σU.
pub fn energy_scaled(state: &McGeheeState, m: &MassVector, alpha: Alpha, sigma: f64) -> Result<f64> {
    let c = radial_exponent(alpha);
    let u = potential(&state.s, m, alpha)?;
    let k2 = mass_inner(m, state.s.dim(), state.s_prime.flat(), state.s_prime.flat());
    let rho = state.rho;
    Ok(rho.powf(-alpha.beta())
        * (0.5 * c * c * state.rho_prime.powi(2) + rho * rho * (0.5 * k2 - sigma * u)))
}

/// Right-hand side of the reduced system for the potential σU.
#[derive(Debug, Clone)]
pub struct Dynamics {
    pub masses: MassVector,
    pub alpha: Alpha,
    pub dim: usize,
    pub sigma: f64,
    md: Vec<f64>,
}

impl Dynamics {
    pub fn new(masses: MassVector, alpha: Alpha, dim: usize, sigma: f64) -> Self {
        let md = masses.metric_diagonal(dim);
        Dynamics {
            masses,
            alpha,
            dim,
            sigma,
            md,
        }
    }

    pub fn nd(&self) -> usize {
        self.md.len()
    }

    /// y = [u, p, s, s′] ↦ y′.
    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let nd = self.nd();
        let a = self.alpha.get();
        let c = radial_exponent(self.alpha);
        let (s, sp) = (&y[2..2 + nd], &y[2 + nd..]);
        let p = y[1];
        let (head, ds) = dy.split_at_mut(2 + nd);
        let grad = &mut ds[..nd];
        let u = potential_gradient_raw(s, self.dim, self.masses.as_slice(), a, grad);
        let k2: f64 = sp.iter().zip(&self.md).map(|(v, mi)| mi * v * v).sum();
        head[0] = p;
        head[1] = (k2 - a * self.sigma * u) / c + 0.5 * a * c * p * p;
        head[2..].copy_from_slice(sp);
        for i in 0..nd {
            let ge = self.sigma * (grad[i] / self.md[i] + a * u * s[i]);
            grad[i] = ge - 2.0 * p * sp[i] - k2 * s[i];
        }
    }

    /// Re-normalizes s to I(s) = 1 with centre of mass at 0 and makes s′
    /// tangent. Returns the size of the correction.
    pub fn project(&self, y: &mut [f64]) -> f64 {
        let nd = self.nd();
        let d = self.dim;
        let ms = self.masses.as_slice();
        let total = self.masses.total();
        let mut corr = 0.0;
        let (_, rest) = y.split_at_mut(2);
        let (s, sp) = rest.split_at_mut(nd);
        for v in [&mut *s, &mut *sp] {
            for k in 0..d {
                let com: f64 = (0..ms.len()).map(|i| ms[i] * v[i * d + k]).sum::<f64>() / total;
                for i in 0..ms.len() {
                    v[i * d + k] -= com;
                }
                corr += com.abs();
            }
        }
        let i: f64 = s.iter().zip(&self.md).map(|(v, mi)| mi * v * v).sum();
        let nrm = i.sqrt();
        corr += (nrm - 1.0).abs();
        s.iter_mut().for_each(|v| *v /= nrm);
        let radial: f64 = s.iter().zip(sp.iter()).zip(&self.md).map(|((a, b), mi)| mi * a * b).sum();
        sp.iter_mut().zip(s.iter()).for_each(|(v, si)| *v -= radial * si);
        corr + radial.abs()
    }

    /// e^{−cαu}(½c²p² + ½|s′|² − σU(s)).
    pub fn energy_of(&self, y: &[f64]) -> f64 {
        let (u, k2, pot) = self.parts(y);
        let c = radial_exponent(self.alpha);
        (-c * self.alpha.get() * u).exp() * (0.5 * c * c * y[1] * y[1] + 0.5 * k2 - self.sigma * pot)
    }

    /// (ln ρ, |s′|², U(s)).
    fn parts(&self, y: &[f64]) -> (f64, f64, f64) {
        let nd = self.nd();
        let (s, sp) = (&y[2..2 + nd], &y[2 + nd..]);
        let k2: f64 = sp.iter().zip(&self.md).map(|(v, mi)| mi * v * v).sum();
        let mut g = vec![0.0; nd];
        let pot = potential_gradient_raw(s, self.dim, self.masses.as_slice(), self.alpha.get(), &mut g);
        (y[0], k2, pot)
    }

    pub fn pack(&self, st: &McGeheeState) -> Vec<f64> {
        let mut y = vec![st.rho.ln(), st.rho_prime / st.rho];
        y.extend_from_slice(st.s.flat());
        y.extend_from_slice(st.s_prime.flat());
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub tau_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Stop once ρ falls below this value.
    pub rho_min: Option<f64>,
    /// Stop once U(s)·r^{−α} exceeds this multiple of its initial value.
    pub potential_growth: Option<f64>,
    /// Uniform output spacing in τ; every step is stored when `None`.
    pub grid: Option<f64>,
    /// Scale σ of the potential σU.
    pub sigma: f64,
    /// Largest tolerated projection correction per step.
    pub drift_tol: f64,
    pub max_steps: usize,
    /// Upper bound on the τ step, so stored states resolve the flow.
    pub h_max: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            tau_max: 50.0,
            rtol: 1e-10,
            atol: 1e-12,
            rho_min: Some(1e-8),
            potential_growth: None,
            grid: None,
            sigma: 1.0,
            drift_tol: 1e-6,
            max_steps: 2_000_000,
            h_max: 0.05,
        }
    }
}

/// Stored states of the reduced flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub alpha: Alpha,
    pub masses: MassVector,
    pub dim: usize,
    pub sigma: f64,
    /// Energy of the first state.
    pub h: f64,
    pub tau: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub dy: Vec<Vec<f64>>,
}

impl Trajectory {
    fn from_solution(dynamics: &Dynamics, sol: Solution) -> Self {
        let h = dynamics.energy_of(&sol.y[0]);
        Trajectory {
            alpha: dynamics.alpha,
            masses: dynamics.masses.clone(),
            dim: dynamics.dim,
            sigma: dynamics.sigma,
            h,
            tau: sol.t,
            y: sol.y,
            dy: sol.dy,
        }
    }

    pub fn dynamics(&self) -> Dynamics {
        Dynamics::new(self.masses.clone(), self.alpha, self.dim, self.sigma)
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn beta(&self) -> f64 {
        self.alpha.beta()
    }

    fn nd(&self) -> usize {
        self.masses.len() * self.dim
    }

    pub fn log_rho(&self, i: usize) -> f64 {
        self.y[i][0]
    }

    pub fn rho(&self, i: usize) -> f64 {
        self.y[i][0].exp()
    }

    /// ρ′/ρ.
    pub fn rate(&self, i: usize) -> f64 {
        self.y[i][1]
    }

    pub fn rho_prime(&self, i: usize) -> f64 {
        self.rho(i) * self.y[i][1]
    }

    pub fn s_flat(&self, i: usize) -> &[f64] {
        &self.y[i][2..2 + self.nd()]
    }

    pub fn s_prime_flat(&self, i: usize) -> &[f64] {
        &self.y[i][2 + self.nd()..]
    }

    pub fn s(&self, i: usize) -> Configuration {
        Configuration::new(self.dim, self.s_flat(i).to_vec()).expect("stored shape")
    }

    pub fn s_prime(&self, i: usize) -> TangentVector {
        TangentVector::new(self.dim, self.s_prime_flat(i).to_vec()).expect("stored shape")
    }

    pub fn state(&self, i: usize) -> McGeheeState {
        McGeheeState {
            rho: self.rho(i),
            rho_prime: self.rho_prime(i),
            s: self.s(i),
            s_prime: self.s_prime(i),
            tau: self.tau[i],
        }
    }

    /// U(s(τ_i)), unscaled.
    pub fn potential_s(&self, i: usize) -> f64 {
        let mut g = vec![0.0; self.nd()];
        potential_gradient_raw(self.s_flat(i), self.dim, self.masses.as_slice(), self.alpha.get(), &mut g)
    }

    /// |s′|² in the mass metric.
    pub fn sprime_sq(&self, i: usize) -> f64 {
        mass_inner(&self.masses, self.dim, self.s_prime_flat(i), self.s_prime_flat(i))
    }

    pub fn energy(&self, i: usize) -> f64 {
        self.dynamics().energy_of(&self.y[i])
    }

    /// λ1 = ρ^{2−β}(−c²ρ″/ρ + |s′|² + 2σU), from the stored acceleration.
    pub fn lambda1(&self, i: usize) -> f64 {
        let c = radial_exponent(self.alpha);
        let p = self.y[i][1];
        let dp = self.dy[i][1];
        let scale = (-c * self.alpha.get() * self.y[i][0]).exp();
        scale * (-c * c * (dp + p * p) + self.sprime_sq(i) + 2.0 * self.sigma * self.potential_s(i))
    }

    /// λ2 = ρ²|s′|².
    pub fn lambda2(&self, i: usize) -> f64 {
        (2.0 * self.y[i][0]).exp() * self.sprime_sq(i)
    }

    /// Physical kinetic energy ½|ẋ|² = r^{−α}(½c²p² + ½|s′|²).
    pub fn kinetic(&self, i: usize) -> f64 {
        let c = radial_exponent(self.alpha);
        let p = self.y[i][1];
        (-c * self.alpha.get() * self.y[i][0]).exp() * (0.5 * c * c * p * p + 0.5 * self.sprime_sq(i))
    }

    /// max_i |h(τ_i) − h(τ_0)|.
    pub fn max_energy_drift(&self) -> f64 {
        let d = self.dynamics();
        self.y.iter().map(|y| (d.energy_of(y) - self.h).abs()).fold(0.0, crate::worst)
    }

    /// max_i |h(τ_i) − h(τ_0)| / (1 + |h0| + K(τ_i)). Rounding in the
    /// bracket is amplified by r^{−α}, so the kinetic energy sets the floor.
    pub fn max_scaled_energy_drift(&self) -> f64 {
        let d = self.dynamics();
        (0..self.len())
            .map(|i| (d.energy_of(&self.y[i]) - self.h).abs() / (1.0 + self.h.abs() + self.kinetic(i)))
            .fold(0.0, crate::worst)
    }

    /// Largest |I(s) − 1| over stored states.
    pub fn max_constraint_drift(&self) -> f64 {
        (0..self.len())
            .map(|i| (mass_inner(&self.masses, self.dim, self.s_flat(i), self.s_flat(i)) - 1.0).abs())
            .fold(0.0, crate::worst)
    }

    /// State at arbitrary τ by cubic Hermite interpolation.
    pub fn interpolate(&self, tau: f64, out: &mut [f64]) -> Option<()> {
        let n = self.len();
        if n < 2 || tau < self.tau[0] || tau > self.tau[n - 1] {
            return None;
        }
        let i = self.tau.partition_point(|&t| t <= tau).saturating_sub(1).min(n - 2);
        crate::ode::hermite(
            self.tau[i], &self.y[i], &self.dy[i], self.tau[i + 1], &self.y[i + 1], &self.dy[i + 1], tau, out,
        );
        Some(())
    }

    /// (ln ρ, ρ′/ρ, s, s′) and the σ-scaled ∇²U_E(s) quadratic form at τ.
    pub fn hessian_e(&self, s: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let a = self.alpha.get();
        let mut g = vec![0.0; self.nd()];
        let u = potential_gradient_raw(s, self.dim, self.masses.as_slice(), a, &mut g);
        self.sigma
            * (hessian_bilinear_raw(s, self.dim, self.masses.as_slice(), a, v, w)
                + a * u * mass_inner(&self.masses, self.dim, v, w))
    }

    /// Same trajectory shifted so that τ starts at `tau0` and ln ρ at `u0`.
    pub fn rebased(mut self, tau0: f64, u0: f64) -> Self {
        let (dt, du) = (tau0 - self.tau[0], u0 - self.y[0][0]);
        self.tau.iter_mut().for_each(|t| *t += dt);
        self.y.iter_mut().for_each(|y| y[0] += du);
        self.h = self.dynamics().energy_of(&self.y[0]);
        self
    }
}

/// Integrates the reduced Euler–Lagrange flow from `initial`.
pub fn integrate_el(initial: &McGeheeState, m: &MassVector, alpha: Alpha, opts: &SimOptions) -> Result<Trajectory> {
    integrate_el_to(initial, m, alpha, opts, initial.tau + opts.tau_max)
}

/// As [`integrate_el`] but to an explicit end time, which may precede the
/// initial time.
pub fn integrate_el_to(
    initial: &McGeheeState,
    m: &MassVector,
    alpha: Alpha,
    opts: &SimOptions,
    tau_end: f64,
) -> Result<Trajectory> {
    run(initial, m, alpha, opts, tau_end, |_| false)
}

/// As [`integrate_el`] with an extra stop test on the packed state
/// (ln ρ, ρ′/ρ, s, s′).
pub fn integrate_el_until<X: Fn(&[f64]) -> bool>(
    initial: &McGeheeState,
    m: &MassVector,
    alpha: Alpha,
    opts: &SimOptions,
    stop: X,
) -> Result<Trajectory> {
    run(initial, m, alpha, opts, initial.tau + opts.tau_max, stop)
}

fn run<X: Fn(&[f64]) -> bool>(
    initial: &McGeheeState,
    m: &MassVector,
    alpha: Alpha,
    opts: &SimOptions,
    tau_end: f64,
    extra_stop: X,
) -> Result<Trajectory> {
    if initial.s.n() != m.len() {
        return Err(NcolError::DimensionMismatch(format!(
            "{} bodies but {} masses",
            initial.s.n(),
            m.len()
        )));
    }
    if !(initial.rho > 0.0) {
        return Err(NcolError::ZeroConfiguration);
    }
    let dynm = Dynamics::new(m.clone(), alpha, initial.s.dim(), opts.sigma);
    let mut y0 = dynm.pack(initial);
    let c0 = dynm.project(&mut y0);
    if c0 > opts.drift_tol {
        return Err(NcolError::EllipsoidDrift {
            tau: initial.tau,
            correction: c0,
        });
    }
    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        max_steps: opts.max_steps,
        grid: opts.grid,
        h_max: opts.h_max,
        ..Default::default()
    };
    let log_min = opts.rho_min.map(f64::ln);
    let c = radial_exponent(alpha);
    let a = alpha.get();
    let mut g = vec![0.0; dynm.nd()];
    let v0 = potential_gradient_raw(&y0[2..2 + dynm.nd()], dynm.dim, m.as_slice(), a, &mut g)
        * (-c * a * y0[0]).exp();
    let growth = opts.potential_growth;
    let nd = dynm.nd();
    let d2 = dynm.clone();
    let stop = move |_: f64, y: &[f64]| {
        if extra_stop(y) {
            return true;
        }
        if let Some(lm) = log_min {
            if y[0] < lm {
                return true;
            }
        }
        if let Some(gr) = growth {
            let v = potential_gradient_raw(&y[2..2 + nd], d2.dim, d2.masses.as_slice(), a, &mut g)
                * (-c * a * y[0]).exp();
            if v > gr * v0 {
                return true;
            }
        }
        false
    };
    let d3 = dynm.clone();
    let tol = opts.drift_tol;
    let project = move |t: f64, y: &mut [f64]| {
        let corr = d3.project(y);
        if corr > tol || !corr.is_finite() {
            return Err(NcolError::EllipsoidDrift { tau: t, correction: corr });
        }
        Ok(())
    };
    let d1 = dynm.clone();
    let sol = integrate(
        |_, y, dy| d1.rhs(y, dy),
        initial.tau,
        &y0,
        tau_end,
        &ode,
        stop,
        project,
    )?;
    let mut traj = Trajectory::from_solution(&dynm, sol);
    if tau_end < initial.tau {
        traj.tau.reverse();
        traj.y.reverse();
        traj.dy.reverse();
    }
    Ok(traj)
}

/// State on the ellipsoid at s0 with zero angular velocity and the radial
/// velocity fixed by the energy h (inward).
pub fn homothetic_initial(cc: &CentralConfiguration, h: f64, sigma: f64) -> Result<McGeheeState> {
    let c = radial_exponent(cc.alpha);
    let e = h + sigma * cc.b;
    if !(e > 0.0) {
        return Err(NcolError::RejectedInitialData(format!(
            "h + U(s0) = {e} leaves no inward radial velocity at rho = 1"
        )));
    }
    let p = -(2.0 * e).sqrt() / c;
    Ok(McGeheeState {
        rho: 1.0,
        rho_prime: p,
        s: cc.s0.clone(),
        s_prime: TangentVector::zeros(cc.dim(), cc.n()),
        tau: 0.0,
    })
}

/// Closed-form zero-energy collapse φ(t) = k(T − t)^{2/(2+α)} with φ(0) = 1:
/// returns (k, T).
pub fn homothetic_closed_form(alpha: Alpha, b: f64) -> (f64, f64) {
    let a = alpha.get();
    let k = (b * (2.0 + a).powi(2) / 2.0).powf(1.0 / (2.0 + a));
    let q = 2.0 / (2.0 + a);
    (k, k.powf(-1.0 / q))
}

/// Homothetic collapse x(t) = φ(t)s0, integrated in physical time from
/// φ(0) = 1 with φ̈ = −ασUφ^{−α−1} and converted to collision coordinates.
///
/// Also returns, when h = 0, the largest deviation of t from the closed
/// form t(φ) = T − (φ/k)^{(2+α)/2}, relative to T (zero otherwise).
pub fn homothetic_oracle(cc: &CentralConfiguration, h: f64, opts: &SimOptions) -> Result<(Trajectory, f64)> {
    let alpha = cc.alpha;
    let a = alpha.get();
    let u = opts.sigma * cc.b;
    let init = homothetic_initial(cc, h, opts.sigma)?;
    let c = radial_exponent(alpha);
    let phidot0 = -(2.0 * (h + u)).sqrt();
    let phi_stop = [
        opts.rho_min.map(|r| r.powf(c)),
        opts.potential_growth.map(|g| g.powf(-1.0 / a)),
    ]
    .into_iter()
    .flatten()
    .fold(0.0, f64::max);
    let tau_max = opts.tau_max;
    let ode = OdeOptions {
        rtol: opts.rtol.min(1e-12),
        atol: 1e-14,
        max_steps: opts.max_steps,
        ..Default::default()
    };
    let f = move |_: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -a * u * y[0].powf(-a - 1.0);
        dy[2] = y[0].powf(-(2.0 + a) / 2.0);
    };
    let t_guess = 10.0 * homothetic_closed_form(alpha, u.max(1e-300)).1.max(1.0);
    let sol = integrate(
        f,
        0.0,
        &[1.0, phidot0, 0.0],
        t_guess * 1e6,
        &ode,
        |_, y| y[0] <= phi_stop || y[2] >= tau_max || y[1] >= 0.0,
        |_, _| Ok(()),
    )?;
    if sol.y.iter().any(|y| y[1] >= 0.0) || !sol.stopped {
        return Err(NcolError::NonCollapsing(format!(
            "phi did not reach {phi_stop:e} (h = {h})"
        )));
    }

    let dynm = Dynamics::new(cc.masses.clone(), alpha, cc.dim(), opts.sigma);
    let mut closed_err: f64 = 0.0;
    let (k, tc) = homothetic_closed_form(alpha, u);
    let mut traj = Trajectory {
        alpha,
        masses: cc.masses.clone(),
        dim: cc.dim(),
        sigma: opts.sigma,
        h: 0.0,
        tau: Vec::with_capacity(sol.t.len()),
        y: Vec::with_capacity(sol.t.len()),
        dy: Vec::with_capacity(sol.t.len()),
    };
    let mut base = dynm.pack(&init);
    for (t, z) in sol.t.iter().zip(&sol.y) {
        let (phi, phidot, tau) = (z[0], z[1], z[2]);
        if h == 0.0 {
            // time left to collision is well conditioned as a function of φ
            let t_exact = tc - (phi / k).powf((2.0 + a) / 2.0);
            closed_err = crate::worst(closed_err, (t - t_exact).abs() / tc);
        }
        base[0] = phi.ln() / c;
        base[1] = phidot * phi.powf(a / 2.0) / c;
        let mut dy = vec![0.0; base.len()];
        dynm.rhs(&base, &mut dy);
        traj.tau.push(tau);
        traj.y.push(base.clone());
        traj.dy.push(dy);
    }
    traj.h = dynm.energy_of(&traj.y[0]);
    Ok((traj, closed_err))
}

/// μ with ∇²U_E(s0)ξ ≈ μξ along ξ: ⟨ξ, (∇²U + αUM)ξ⟩/⟨ξ, Mξ⟩, times σ.
pub fn linear_rate(cc: &CentralConfiguration, xi: &TangentVector, sigma: f64) -> f64 {
    let a = cc.alpha.get();
    let ms = cc.masses.as_slice();
    let q = hessian_bilinear_raw(cc.s0.flat(), cc.dim(), ms, a, xi.flat(), xi.flat())
        + a * cc.b * mass_inner(&cc.masses, cc.dim(), xi.flat(), xi.flat());
    sigma * q / mass_inner(&cc.masses, cc.dim(), xi.flat(), xi.flat())
}

/// A collision orbit on the stable manifold of the homothetic motion,
/// tangent to ξ (which must have μ > 0).
///
/// The end state s0 + εξ, s′ = λ₋εξ, ρ′/ρ = −κ with λ₋ = κ − √(κ² + μ)
/// is integrated backward, where the stable manifold is attracting, for at
/// most `tau_back` or until ‖s − s0‖ reaches `radius`. The stored
/// trajectory is then read forward and rebased to τ = 0, ρ(0) = 1. `dp`
/// perturbs the end value of ρ′/ρ.
#[allow(clippy::too_many_arguments)]
pub fn stable_manifold_orbit(
    cc: &CentralConfiguration,
    xi: &TangentVector,
    eps: f64,
    dp: f64,
    tau_back: f64,
    radius: f64,
    opts: &SimOptions,
) -> Result<Trajectory> {
    let alpha = cc.alpha;
    let mu = linear_rate(cc, xi, opts.sigma);
    let kappa = -homothetic_rate(alpha, opts.sigma * cc.b);
    if !(mu > 0.0) {
        return Err(NcolError::RejectedInitialData(format!(
            "direction has mu = {mu}; the stable manifold needs mu > 0"
        )));
    }
    let lam = kappa - (kappa * kappa + mu).sqrt();
    let s: Vec<f64> = cc.s0.flat().iter().zip(xi.flat()).map(|(a, b)| a + eps * b).collect();
    let sp: Vec<f64> = xi.flat().iter().map(|b| lam * eps * b).collect();
    let end = McGeheeState {
        rho: 1.0,
        rho_prime: -kappa + dp,
        s: Configuration::new(cc.dim(), s)?,
        s_prime: TangentVector::new(cc.dim(), sp)?,
        tau: 0.0,
    };
    let back = SimOptions {
        rho_min: None,
        potential_growth: None,
        grid: None,
        ..*opts
    };
    let nd = cc.s0.flat().len();
    let s0 = cc.s0.flat().to_vec();
    let far = move |y: &[f64]| {
        let d: f64 = y[2..2 + nd].iter().zip(&s0).map(|(a, b)| (a - b) * (a - b)).sum();
        d.sqrt() > radius
    };
    let traj = run(&end, &cc.masses, alpha, &back, -tau_back, far)?;
    Ok(traj.rebased(0.0, 0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub tau_final: f64,
    pub log_rho_final: f64,
    /// Extrapolated lim U(s(τ)).
    pub b_limit: f64,
    /// Extrapolated lim ρ′/ρ.
    pub rate_limit: f64,
    /// −((2−α)/4)√(2σb) at the extrapolated b.
    pub rate_target: f64,
    pub rate_error: f64,
    /// Distance from s(τ_final) to the nearest supplied central
    /// configuration, up to orthogonal transformations.
    pub dist_cc: Option<f64>,
    /// ∫ −(ρ′/ρ)|s′|² dτ over the horizon.
    pub tail_integral: f64,
    pub sprime_initial: f64,
    pub sprime_final: f64,
    /// Successive extrapolations of b and of ρ′/ρ agree to 1e-4.
    pub converged: bool,
}

fn aitken(x: [f64; 3]) -> f64 {
    let d1 = x[1] - x[0];
    let d2 = x[2] - x[1];
    let den = d2 - d1;
    if den.abs() <= 1e-14 * x[2].abs().max(1.0) || d2 * d1 <= 0.0 {
        x[2]
    } else {
        x[2] - d2 * d2 / den
    }
}

/// Limits of Proposition-style asymptotics measured on a finite horizon.
pub fn asymptotic_report(traj: &Trajectory, cc_set: &[CentralConfiguration]) -> Result<AsymptoticReport> {
    let n = traj.len();
    let t0 = traj.tau[0];
    let tf = traj.tau[n.saturating_sub(1)];
    if n < 10 || !(tf - t0 > 0.0) {
        return Err(NcolError::InsufficientHorizon(format!("{n} samples over [{t0}, {tf}]")));
    }
    let nd = traj.nd();
    let mut buf = vec![0.0; 2 + 2 * nd];
    let mut sample = |tau: f64| -> (f64, f64) {
        traj.interpolate(tau, &mut buf).expect("inside horizon");
        let mut g = vec![0.0; nd];
        let u = potential_gradient_raw(&buf[2..2 + nd], traj.dim, traj.masses.as_slice(), traj.alpha.get(), &mut g);
        (u, buf[1])
    };
    let span = tf - t0;
    let at = |f: f64| t0 + f * span;
    let late: Vec<(f64, f64)> = [0.9, 0.95, 1.0].iter().map(|&f| sample(at(f))).collect();
    let early: Vec<(f64, f64)> = [0.8, 0.85, 0.9].iter().map(|&f| sample(at(f))).collect();
    let b1 = aitken([late[0].0, late[1].0, late[2].0]);
    let b0 = aitken([early[0].0, early[1].0, early[2].0]);
    let p1 = aitken([late[0].1, late[1].1, late[2].1]);
    let p0 = aitken([early[0].1, early[1].1, early[2].1]);
    let rate_target = homothetic_rate(traj.alpha, traj.sigma * b1);

    let sfin = traj.s(n - 1);
    let dist_cc = cc_set
        .iter()
        .filter(|cc| cc.n() == sfin.n() && cc.dim() == sfin.dim())
        .map(|cc| procrustes_distance(&sfin, &cc.s0))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))));

    let mut tail = 0.0;
    for i in 1..n {
        let f0 = -traj.rate(i - 1) * traj.sprime_sq(i - 1);
        let f1 = -traj.rate(i) * traj.sprime_sq(i);
        tail += 0.5 * (f0 + f1) * (traj.tau[i] - traj.tau[i - 1]);
    }
    Ok(AsymptoticReport {
        tau_final: tf,
        log_rho_final: traj.log_rho(n - 1),
        b_limit: b1,
        rate_limit: p1,
        rate_target,
        rate_error: (p1 - rate_target).abs(),
        dist_cc,
        tail_integral: tail,
        sprime_initial: traj.sprime_sq(0).sqrt(),
        sprime_final: traj.sprime_sq(n - 1).sqrt(),
        converged: (b1 - b0).abs() < 1e-4 && (p1 - p0).abs() < 1e-4,
    })
}

/// min over orthogonal R of ‖aR − b‖ (rows are bodies).
pub fn procrustes_distance(a: &Configuration, b: &Configuration) -> f64 {
    let (n, d) = (a.n(), a.dim());
    let x = DMatrix::from_row_slice(n, d, a.flat());
    let y = DMatrix::from_row_slice(n, d, b.flat());
    let svd = (x.transpose() * &y).svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let r = u * vt;
    (x * r - y).norm()
}

/// Plain sum of squared Euclidean coordinates, used for |s′| in reports.
pub fn euclid_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}
