//! Second variation of the collision action along a trajectory in reduced
//! coordinates, bump families of angular variations and the homographic
//! block decomposition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NcolError, Result};
use crate::mcgehee::{radial_exponent, Trajectory};
use crate::nbody::{potential_gradient_raw, MassVector, TangentVector};

/// Supports closer than this are treated as touching.
const SUPPORT_GAP: f64 = 1e-12;
/// Largest |s′| accepted as homographic.
pub const HOMOGRAPHIC_TOL: f64 = 1e-10;

/// Shape of a scalar bump on (ℓ1, ℓ2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// exp(−1/(1−u²)) on u ∈ (−1, 1).
    Exp,
    /// Smooth step up, plateau on the central `flat` fraction, smooth step down.
    FlatTop { flat: f64 },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::FlatTop { flat: 0.8 }
    }
}

fn edge(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn edge_d(x: f64) -> f64 {
    let f = edge(x);
    if f == 0.0 {
        0.0
    } else {
        f / (x * x)
    }
}

/// Smooth step S(x) = f(x)/(f(x) + f(1−x)) and its derivative.
fn smooth_step(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let (a, b) = (edge(x), edge(1.0 - x));
    let (da, db) = (edge_d(x), -edge_d(1.0 - x));
    let d = a + b;
    (a / d, (da * d - a * (da + db)) / (d * d))
}

/// A scalar function of τ with compact support.
pub trait ScalarPath: Sync {
    fn support(&self) -> (f64, f64);
    /// (ζ(τ), ζ′(τ)).
    fn eval(&self, tau: f64) -> (f64, f64);
}

/// φ((τ − shift)) with φ supported on (ℓ1, ℓ2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarBump {
    pub l1: f64,
    pub l2: f64,
    pub shift: f64,
    pub profile: Profile,
}

impl ScalarBump {
    pub fn new(l1: f64, l2: f64, shift: f64, profile: Profile) -> Result<Self> {
        if !(l1 > 0.0 && l2 > l1 && l2.is_finite() && shift.is_finite()) {
            return Err(NcolError::RejectedInitialData(format!(
                "bump support needs 0 < l1 < l2, got ({l1}, {l2})"
            )));
        }
        if let Profile::FlatTop { flat } = profile {
            if !(0.0..1.0).contains(&flat) {
                return Err(NcolError::RejectedInitialData(format!("flat fraction {flat} outside [0, 1)")));
            }
        }
        Ok(ScalarBump { l1, l2, shift, profile })
    }

    /// φ and φ′ at x = τ − shift.
    pub fn shape(&self, x: f64) -> (f64, f64) {
        if x <= self.l1 || x >= self.l2 {
            return (0.0, 0.0);
        }
        let len = self.l2 - self.l1;
        match self.profile {
            Profile::Exp => {
                let u = 2.0 * (x - self.l1) / len - 1.0;
                let q = 1.0 - u * u;
                let f = if q > 0.0 { (-1.0 / q).exp() } else { 0.0 };
                if f == 0.0 {
                    // exp(−1/q) underflows long before 1/q² overflows
                    return (0.0, 0.0);
                }
                (f, f * (-2.0 * u / (q * q)) * 2.0 / len)
            }
            Profile::FlatTop { flat } => {
                let r = 0.5 * (1.0 - flat) * len;
                if x < self.l1 + r {
                    let (f, d) = smooth_step((x - self.l1) / r);
                    (f, d / r)
                } else if x > self.l2 - r {
                    let (f, d) = smooth_step((self.l2 - x) / r);
                    (f, -d / r)
                } else {
                    (1.0, 0.0)
                }
            }
        }
    }
}

impl ScalarPath for ScalarBump {
    fn support(&self) -> (f64, f64) {
        (self.l1 + self.shift, self.l2 + self.shift)
    }

    fn eval(&self, tau: f64) -> (f64, f64) {
        self.shape(tau - self.shift)
    }
}

/// A compactly supported path of configuration-space vectors along a
/// trajectory. `y` is the interpolated reduced state (ln ρ, ρ′/ρ, s, s′).
pub trait VariationPath: Sync {
    fn support(&self) -> (f64, f64);
    /// Writes w(τ) and w′(τ); returns the size of any transport correction.
    fn eval(&self, tau: f64, y: &[f64], w: &mut [f64], wp: &mut [f64]) -> f64;
}

/// φ(τ − τ_n)·ξ(τ), with ξ carried along the trajectory by projecting a
/// fixed vector onto the tangent space of the ellipsoid at s(τ).
#[derive(Debug, Clone, PartialEq)]
pub struct BumpVariation {
    pub bump: ScalarBump,
    /// Unit mass-norm direction with zero centre of mass.
    pub xi: Vec<f64>,
    metric: Vec<f64>,
}

impl BumpVariation {
    pub fn new(bump: ScalarBump, xi: &TangentVector, m: &MassVector) -> Result<Self> {
        let dim = xi.dim();
        if xi.n() != m.len() {
            return Err(NcolError::DimensionMismatch(format!("{} bodies but {} masses", xi.n(), m.len())));
        }
        let metric = m.metric_diagonal(dim);
        let mut v = xi.flat().to_vec();
        let total = m.total();
        for k in 0..dim {
            let c: f64 = (0..m.len()).map(|i| m.as_slice()[i] * v[i * dim + k]).sum::<f64>() / total;
            (0..m.len()).for_each(|i| v[i * dim + k] -= c);
        }
        let norm = weighted(&metric, &v, &v).sqrt();
        if !(norm > 1e-14) {
            return Err(NcolError::NotTangent(norm));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(BumpVariation { bump, xi: v, metric })
    }
}

impl VariationPath for BumpVariation {
    fn support(&self) -> (f64, f64) {
        self.bump.support()
    }

    fn eval(&self, tau: f64, y: &[f64], w: &mut [f64], wp: &mut [f64]) -> f64 {
        let nd = self.xi.len();
        let (s, sp) = (&y[2..2 + nd], &y[2 + nd..2 + 2 * nd]);
        let (f, df) = self.bump.eval(tau);
        let a = weighted(&self.metric, &self.xi, s);
        let b = weighted(&self.metric, &self.xi, sp);
        for k in 0..nd {
            let x = self.xi[k] - a * s[k];
            let dx = -b * s[k] - a * sp[k];
            w[k] = f * x;
            wp[k] = df * x + f * dx;
        }
        if f != 0.0 {
            a.abs()
        } else {
            0.0
        }
    }
}

/// w = ρv, w′ = ρ(ρ′/ρ·v + v′).
pub struct RhoWeighted<'a>(pub &'a dyn VariationPath);

impl VariationPath for RhoWeighted<'_> {
    fn support(&self) -> (f64, f64) {
        self.0.support()
    }

    fn eval(&self, tau: f64, y: &[f64], w: &mut [f64], wp: &mut [f64]) -> f64 {
        let t = self.0.eval(tau, y, w, wp);
        let (rho, p) = (y[0].exp(), y[1]);
        for (x, dx) in w.iter_mut().zip(wp.iter_mut()) {
            *dx = rho * (p * *x + *dx);
            *x *= rho;
        }
        t
    }
}

/// Σ c_k w_k.
pub struct Combination<'a> {
    pub terms: Vec<(f64, &'a dyn VariationPath)>,
}

impl VariationPath for Combination<'_> {
    fn support(&self) -> (f64, f64) {
        self.terms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, p)| {
            let (a, b) = p.support();
            (lo.min(a), hi.max(b))
        })
    }

    fn eval(&self, tau: f64, y: &[f64], w: &mut [f64], wp: &mut [f64]) -> f64 {
        w.iter_mut().for_each(|x| *x = 0.0);
        wp.iter_mut().for_each(|x| *x = 0.0);
        let (mut a, mut b) = (vec![0.0; w.len()], vec![0.0; w.len()]);
        let mut corr: f64 = 0.0;
        for &(c, p) in &self.terms {
            let (lo, hi) = p.support();
            if tau <= lo || tau >= hi {
                continue;
            }
            corr = corr.max(p.eval(tau, y, &mut a, &mut b));
            w.iter_mut().zip(&a).for_each(|(x, v)| *x += c * v);
            wp.iter_mut().zip(&b).for_each(|(x, v)| *x += c * v);
        }
        corr
    }
}

/// The zero path.
pub struct ZeroPath;

impl VariationPath for ZeroPath {
    fn support(&self) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn eval(&self, _tau: f64, _y: &[f64], w: &mut [f64], wp: &mut [f64]) -> f64 {
        w.iter_mut().for_each(|x| *x = 0.0);
        wp.iter_mut().for_each(|x| *x = 0.0);
        0.0
    }
}

impl ScalarPath for ZeroPath {
    fn support(&self) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn eval(&self, _tau: f64) -> (f64, f64) {
        (0.0, 0.0)
    }
}

fn weighted(md: &[f64], a: &[f64], b: &[f64]) -> f64 {
    md.iter().zip(a).zip(b).map(|((m, x), y)| m * x * y).sum()
}

/// Composite trapezoid settings; the grid is halved until two successive
/// totals agree within `tol·max(1, |total|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub tol: f64,
    pub n0: usize,
    pub max_n: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { tol: 1e-8, n0: 256, max_n: 1 << 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondVariationReport {
    #[serde(rename = "Q")]
    pub q: f64,
    pub kinetic: f64,
    pub rho_term: f64,
    pub cross: f64,
    pub hessian: f64,
    pub per_bump: Vec<f64>,
    pub witnesses: usize,
    /// First index from which every Q(w_n) is negative.
    pub n0: Option<usize>,
    /// Largest tangential component removed when transporting ξ.
    pub transport_correction: f64,
    /// max |Q(Σ c_n w_n) − Σ c_n² Q(w_n)| / max(1, Σ c_n² |Q(w_n)|).
    pub block_error: f64,
    /// Q on the random combinations used for the block check.
    pub combinations: Vec<f64>,
}

fn check_support(traj: &Trajectory, lo: f64, hi: f64) -> Result<()> {
    let (t0, t1) = (traj.tau[0], traj.tau[traj.len() - 1]);
    if lo < t0 || hi > t1 {
        return Err(NcolError::SupportOutOfRange { lo, hi, t0, t1 });
    }
    Ok(())
}

/// Trapezoid sums of several integrands over n cells of [lo, hi].
fn trapezoid<const K: usize, F>(lo: f64, hi: f64, n: usize, f: F) -> [f64; K]
where
    F: Fn(f64) -> [f64; K] + Sync,
{
    let h = (hi - lo) / n as f64;
    let mut acc = (0..=n)
        .into_par_iter()
        .map(|k| {
            let t = if k == n { hi } else { lo + h * k as f64 };
            let wgt = if k == 0 || k == n { 0.5 } else { 1.0 };
            let mut v = f(t);
            v.iter_mut().for_each(|x| *x *= wgt);
            v
        })
        .reduce(|| [0.0; K], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });
    acc.iter_mut().for_each(|x| *x *= h);
    acc
}

/// Refines until the sum of the first `key` components settles.
fn adaptive<const K: usize, F>(lo: f64, hi: f64, quad: &QuadOptions, key: usize, f: F) -> Result<([f64; K], usize)>
where
    F: Fn(f64) -> [f64; K] + Sync,
{
    if !(hi > lo) {
        return Ok(([0.0; K], 0));
    }
    let total = |v: &[f64; K]| v[..key].iter().sum::<f64>();
    let finite = |v: &[f64; K]| {
        if v.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(NcolError::NonFinite(format!("integrand on [{lo}, {hi}]")))
        }
    };
    let mut n = quad.n0.max(2);
    let mut prev = trapezoid(lo, hi, n, &f);
    finite(&prev)?;
    while n < quad.max_n {
        n *= 2;
        let cur = trapezoid(lo, hi, n, &f);
        finite(&cur)?;
        let (a, b) = (total(&prev), total(&cur));
        prev = cur;
        if (a - b).abs() <= quad.tol * b.abs().max(1.0) {
            return Ok((prev, n));
        }
    }
    Err(NcolError::NoConvergence { iterations: n, residual: f64::NAN })
}

struct Ctx<'a> {
    traj: &'a Trajectory,
    md: Vec<f64>,
    nd: usize,
}

impl<'a> Ctx<'a> {
    fn new(traj: &'a Trajectory) -> Self {
        let nd = traj.masses.len() * traj.dim;
        Ctx { traj, md: traj.masses.metric_diagonal(traj.dim), nd }
    }

    fn state(&self, tau: f64) -> Vec<f64> {
        let mut y = vec![0.0; 2 + 2 * self.nd];
        self.traj.interpolate(tau, &mut y).expect("tau inside trajectory");
        y
    }

    /// [|w′|², p²|w|², −2p⟨w′,w⟩, ∇²U_E(w,w), transport].
    fn q_density(&self, path: &dyn VariationPath, tau: f64) -> [f64; 5] {
        let (lo, hi) = path.support();
        if tau <= lo || tau >= hi {
            return [0.0; 5];
        }
        let y = self.state(tau);
        let (mut w, mut wp) = (vec![0.0; self.nd], vec![0.0; self.nd]);
        let corr = path.eval(tau, &y, &mut w, &mut wp);
        let p = y[1];
        let s = &y[2..2 + self.nd];
        [
            weighted(&self.md, &wp, &wp),
            p * p * weighted(&self.md, &w, &w),
            -2.0 * p * weighted(&self.md, &wp, &w),
            self.traj.hessian_e(s, &w, &w),
            corr,
        ]
    }
}

fn report_from(v: [f64; 5], transport: f64) -> SecondVariationReport {
    let q = v[0] + v[1] + v[2] + v[3];
    SecondVariationReport {
        q,
        kinetic: v[0],
        rho_term: v[1],
        cross: v[2],
        hessian: v[3],
        per_bump: vec![q],
        witnesses: usize::from(q < 0.0),
        n0: if q < 0.0 { Some(0) } else { None },
        transport_correction: transport,
        block_error: 0.0,
        combinations: Vec::new(),
    }
}

fn q_on(ctx: &Ctx, path: &dyn VariationPath, quad: &QuadOptions) -> Result<([f64; 5], usize)> {
    let (lo, hi) = path.support();
    adaptive(lo, hi, quad, 4, |t| ctx.q_density(path, t))
}

fn max_transport(ctx: &Ctx, path: &dyn VariationPath, n: usize) -> f64 {
    let (lo, hi) = path.support();
    if n == 0 {
        return 0.0;
    }
    (0..=n)
        .map(|k| ctx.q_density(path, lo + (hi - lo) * k as f64 / n as f64)[4])
        .fold(0.0, crate::worst)
}

/// ∫ ρ²(|v′|² + ∇²U_E(s)(v, v)) dτ.
pub fn second_variation_s(traj: &Trajectory, v: &dyn VariationPath, quad: &QuadOptions) -> Result<f64> {
    let (lo, hi) = v.support();
    if hi <= lo {
        return Ok(0.0);
    }
    check_support(traj, lo, hi)?;
    let ctx = Ctx::new(traj);
    let (r, _) = adaptive::<1, _>(lo, hi, quad, 1, |t| {
        if t <= lo || t >= hi {
            return [0.0];
        }
        let y = ctx.state(t);
        let (mut w, mut wp) = (vec![0.0; ctx.nd], vec![0.0; ctx.nd]);
        v.eval(t, &y, &mut w, &mut wp);
        let s = &y[2..2 + ctx.nd];
        [(2.0 * y[0]).exp() * (weighted(&ctx.md, &wp, &wp) + traj.hessian_e(s, &w, &w))]
    })?;
    Ok(r[0])
}

/// Q(w) = ∫ |w′|² + p²|w|² − 2p⟨w′, w⟩ + ∇²U_E(s)(w, w) dτ with p = ρ′/ρ.
pub fn quadratic_q(traj: &Trajectory, w: &dyn VariationPath, quad: &QuadOptions) -> Result<SecondVariationReport> {
    let (lo, hi) = w.support();
    if hi <= lo {
        return Ok(report_from([0.0; 5], 0.0));
    }
    check_support(traj, lo, hi)?;
    let ctx = Ctx::new(traj);
    let (v, n) = q_on(&ctx, w, quad)?;
    Ok(report_from(v, max_transport(&ctx, w, n.min(4096))))
}

/// Default bump family: supports (ℓ1, ℓ1 + 20) shifted by multiples of
/// twice the width.
pub fn default_shifts(count: usize, l1: f64, l2: f64, start: f64) -> Vec<f64> {
    (0..count).map(|n| start + 2.0 * (l2 - l1) * n as f64).collect()
}

/// Q on each disjointly supported w_n = φ(τ − τ_n)ξ, the witness count, and a
/// block-diagonality check on seeded random combinations.
pub fn morse_witnesses(
    traj: &Trajectory,
    xi: &TangentVector,
    shifts: &[f64],
    l1: f64,
    l2: f64,
    profile: Profile,
    quad: &QuadOptions,
) -> Result<SecondVariationReport> {
    let bumps = shifts
        .iter()
        .map(|&t| BumpVariation::new(ScalarBump::new(l1, l2, t, profile)?, xi, &traj.masses))
        .collect::<Result<Vec<_>>>()?;
    for pair in bumps.windows(2) {
        let (a, b) = (pair[0].support(), pair[1].support());
        if b.0 < a.1 + SUPPORT_GAP {
            return Err(NcolError::OverlappingSupports(format!(
                "({}, {}) and ({}, {})",
                a.0, a.1, b.0, b.1
            )));
        }
    }
    for b in &bumps {
        let (lo, hi) = b.support();
        check_support(traj, lo, hi)?;
    }
    if bumps.is_empty() {
        return Ok(SecondVariationReport { per_bump: Vec::new(), n0: None, witnesses: 0, ..report_from([0.0; 5], 0.0) });
    }
    let ctx = Ctx::new(traj);
    let each: Vec<([f64; 5], usize)> = bumps.par_iter().map(|b| q_on(&ctx, b, quad)).collect::<Result<_>>()?;
    let per_bump: Vec<f64> = each.iter().map(|(v, _)| v[0] + v[1] + v[2] + v[3]).collect();
    let mut sum = [0.0; 5];
    for (v, _) in &each {
        (0..4).for_each(|k| sum[k] += v[k]);
    }
    let transport = bumps
        .iter()
        .zip(&each)
        .map(|(b, (_, n))| max_transport(&ctx, b, (*n).min(4096)))
        .fold(0.0, crate::worst);
    let mut rep = report_from(sum, transport);
    rep.witnesses = per_bump.iter().filter(|&&q| q < 0.0).count();
    rep.n0 = match per_bump.iter().rposition(|&q| q >= 0.0) {
        None => Some(0),
        Some(i) if i + 1 < per_bump.len() => Some(i + 1),
        Some(_) => None,
    };
    rep.per_bump = per_bump;

    // One global grid at the finest per-bump spacing.
    let spacing = bumps
        .iter()
        .zip(&each)
        .map(|(b, (_, n))| {
            let (lo, hi) = b.support();
            (hi - lo) / (*n).max(1) as f64
        })
        .fold(f64::INFINITY, f64::min);
    let (lo, hi) = (bumps[0].support().0, bumps[bumps.len() - 1].support().1);
    let n = ((hi - lo) / spacing).ceil() as usize;
    let blocks: Vec<f64> = bumps
        .iter()
        .map(|b| {
            let v = trapezoid(lo, hi, n, |t| ctx.q_density(b, t));
            v[0] + v[1] + v[2] + v[3]
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let c: Vec<f64> = (0..bumps.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let combo = Combination {
            terms: c.iter().zip(&bumps).map(|(&ck, b)| (ck, b as &dyn VariationPath)).collect(),
        };
        let v = trapezoid(lo, hi, n, |t| ctx.q_density(&combo, t));
        let qc = v[0] + v[1] + v[2] + v[3];
        if !qc.is_finite() {
            return Err(NcolError::NonFinite("Q of a bump combination".into()));
        }
        let expect: f64 = c.iter().zip(&blocks).map(|(ck, q)| ck * ck * q).sum();
        let scale: f64 = c.iter().zip(&blocks).map(|(ck, q)| ck * ck * q.abs()).sum::<f64>().max(1.0);
        worst = crate::worst(worst, (qc - expect).abs() / scale);
        rep.combinations.push(qc);
    }
    rep.block_error = worst;
    Ok(rep)
}

/// Second-variation blocks along a homographic collision: radial-radial,
/// mixed and angular-angular, plus ‖(ζ, w)‖² = ∫ ζ′² + ζ² + |w′|² + |w|²
/// with w = ρv.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomographicBlocks {
    pub rr: f64,
    pub rs: f64,
    pub ss: f64,
    pub norm_sq: f64,
}

pub fn homographic_blocks(
    traj: &Trajectory,
    zeta: &dyn ScalarPath,
    v: &dyn VariationPath,
    quad: &QuadOptions,
) -> Result<HomographicBlocks> {
    let sp = (0..traj.len()).map(|i| traj.sprime_sq(i).sqrt()).fold(0.0, crate::worst);
    if !(sp <= HOMOGRAPHIC_TOL) {
        return Err(NcolError::NotHomographic(sp));
    }
    let (z0, z1) = zeta.support();
    let (v0, v1) = v.support();
    let live = |a: f64, b: f64| b > a;
    let (lo, hi) = match (live(z0, z1), live(v0, v1)) {
        (false, false) => return Ok(HomographicBlocks { rr: 0.0, rs: 0.0, ss: 0.0, norm_sq: 0.0 }),
        (true, false) => (z0, z1),
        (false, true) => (v0, v1),
        (true, true) => (z0.min(v0), z1.max(v1)),
    };
    check_support(traj, lo, hi)?;
    let ctx = Ctx::new(traj);
    let c = radial_exponent(traj.alpha);
    let (a, sigma) = (traj.alpha.get(), traj.sigma);
    let m = traj.masses.as_slice();
    let (r, _) = adaptive::<4, _>(lo, hi, quad, 3, |t| {
        let y = ctx.state(t);
        let nd = ctx.nd;
        let (s, sdot) = (&y[2..2 + nd], &y[2 + nd..2 + 2 * nd]);
        let (z, dz) = zeta.eval(t);
        let (mut w, mut wp) = (vec![0.0; nd], vec![0.0; nd]);
        v.eval(t, &y, &mut w, &mut wp);
        let mut g = vec![0.0; nd];
        let u = potential_gradient_raw(s, traj.dim, m, a, &mut g);
        let rho = y[0].exp();
        let p = y[1];
        // Tangential gradient of σU on the ellipsoid.
        let grad_v: f64 = (0..nd).map(|k| sigma * (g[k] + a * u * ctx.md[k] * s[k]) * w[k]).sum();
        let rr = c * c * dz * dz + z * z * (weighted(&ctx.md, sdot, sdot) + 2.0 * sigma * u);
        let rs = 2.0 * rho * z * (weighted(&ctx.md, sdot, &wp) + grad_v);
        let ss = rho * rho * (weighted(&ctx.md, &wp, &wp) + traj.hessian_e(s, &w, &w));
        let ww: f64 = weighted(&ctx.md, &w, &w);
        let dwdw: f64 = (0..nd).map(|k| ctx.md[k] * (p * w[k] + wp[k]).powi(2)).sum();
        [rr, ss, rs, dz * dz + z * z + rho * rho * (ww + dwdw)]
    })?;
    Ok(HomographicBlocks { rr: r[0], rs: r[2], ss: r[1], norm_sq: r[3] })
}
