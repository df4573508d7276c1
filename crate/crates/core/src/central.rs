//! Central configurations: the analytic collinear and regular-polygon
//! families, a numeric solver on the standard ellipsoid, and isometry
//! normalization.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{NcolError, Result};
use crate::nbody::{
    centrality_residual, constrained_hessian_matrix, gradient, moment_of_inertia, potential,
    tangent_basis, Alpha, Configuration, MassVector,
};

/// Residual required of every returned [`CentralConfiguration`], relative
/// to max(1, ‖αU Ms‖), the size of the terms that cancel.
pub const RESIDUAL_TOL: f64 = 1e-9;

fn residual_scale(s: &Configuration, m: &MassVector, alpha: Alpha, u: f64) -> f64 {
    let md = m.metric_diagonal(s.dim());
    let n: f64 = s.flat().iter().zip(&md).map(|(x, w)| (w * x).powi(2)).sum::<f64>().sqrt();
    (alpha.get() * u * n).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "collinear3-equal")]
    Collinear3Equal,
    #[serde(rename = "collinear3-m2")]
    Collinear3M2,
    #[serde(rename = "ngon")]
    Ngon,
    #[serde(rename = "numeric")]
    Numeric,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Collinear3Equal => "collinear3-equal",
            Family::Collinear3M2 => "collinear3-m2",
            Family::Ngon => "ngon",
            Family::Numeric => "numeric",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = NcolError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collinear3-equal" | "collinear3" => Ok(Family::Collinear3Equal),
            "collinear3-m2" => Ok(Family::Collinear3M2),
            "ngon" => Ok(Family::Ngon),
            "numeric" => Ok(Family::Numeric),
            other => Err(NcolError::Parse(format!("unknown family '{other}'"))),
        }
    }
}

/// A verified central configuration on the standard ellipsoid at a given α.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralConfiguration {
    pub s0: Configuration,
    pub masses: MassVector,
    pub alpha: Alpha,
    /// Potential level U(s0).
    pub b: f64,
    /// ‖∇U(s0) + αU(s0)Ms0‖.
    pub residual: f64,
    pub family: Family,
}

impl CentralConfiguration {
    /// Checks I(s0) = 1, the centre of mass and the Lagrange residual.
    pub fn verify(
        s0: Configuration,
        masses: MassVector,
        alpha: Alpha,
        family: Family,
    ) -> Result<Self> {
        let i = moment_of_inertia(&s0, &masses);
        if (i - 1.0).abs() > 1e-12 {
            return Err(NcolError::NotCentral((i - 1.0).abs()));
        }
        let residual = centrality_residual(&s0, &masses, alpha)?;
        let b = potential(&s0, &masses, alpha)?;
        if !(residual < RESIDUAL_TOL * residual_scale(&s0, &masses, alpha, b)) {
            return Err(NcolError::NotCentral(residual));
        }
        Ok(CentralConfiguration {
            s0,
            masses,
            alpha,
            b,
            residual,
            family,
        })
    }

    /// Residual bound this configuration was verified against.
    pub fn residual_tolerance(&self) -> f64 {
        RESIDUAL_TOL * residual_scale(&self.s0, &self.masses, self.alpha, self.b)
    }

    /// The same shape re-verified at another exponent.
    pub fn at_alpha(&self, alpha: Alpha) -> Result<Self> {
        Self::verify(self.s0.clone(), self.masses.clone(), alpha, self.family)
    }

    pub fn n(&self) -> usize {
        self.s0.n()
    }

    pub fn dim(&self) -> usize {
        self.s0.dim()
    }

    pub fn embedded(&self, dim: usize) -> Result<Self> {
        Self::verify(self.s0.embedded(dim)?, self.masses.clone(), self.alpha, self.family)
    }
}

/// Symmetric collinear configuration with masses (m1, m2, m1), outer bodies
/// at ±1/√(2 m1) on the first axis.
pub fn collinear3(m1: f64, m2: f64, alpha: Alpha) -> Result<CentralConfiguration> {
    let masses = MassVector::new(vec![m1, m2, m1])?;
    let a = 1.0 / (2.0 * m1).sqrt();
    let s0 = Configuration::new(2, vec![-a, 0.0, 0.0, 0.0, a, 0.0])?;
    let family = if m1 == m2 {
        Family::Collinear3Equal
    } else {
        Family::Collinear3M2
    };
    CentralConfiguration::verify(s0, masses, alpha, family)
}

/// Regular N-gon of unit masses on the circle of radius 1/√N in the first
/// coordinate plane of R^dim.
pub fn ngon(n: usize, alpha: Alpha, dim: usize) -> Result<CentralConfiguration> {
    if n < 2 {
        return Err(NcolError::InvalidN(n));
    }
    if dim < 2 {
        return Err(NcolError::DimensionMismatch("a polygon needs dim >= 2".into()));
    }
    let r = 1.0 / (n as f64).sqrt();
    let mut flat = vec![0.0; n * dim];
    for k in 0..n {
        let t = 2.0 * PI * k as f64 / n as f64;
        flat[k * dim] = r * t.cos();
        flat[k * dim + 1] = r * t.sin();
    }
    let s0 = Configuration::new(dim, flat)?;
    CentralConfiguration::verify(s0, MassVector::unit(n)?, alpha, Family::Ngon)
}

/// Warning text for polygon sizes outside N ≥ 4.
pub fn ngon_range_note(n: usize) -> Option<String> {
    (n == 2 || n == 3).then(|| {
        format!("warning: N = {n} is accepted but the polygon criterion is stated for N >= 4")
    })
}

/// Closed-form polygon side lengths r_1k = (2/√N) sin((k−1)π/N), k = 2..N.
pub fn ngon_distances(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (2..=n)
        .map(|k| 2.0 / nf.sqrt() * ((k - 1) as f64 * PI / nf).sin())
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iter: usize,
    /// Iteration stops once the residual is below this value.
    pub target: f64,
    /// Minimum pairwise distance treated as a collision during iteration.
    pub collision_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iter: 5000,
            target: 1e-13,
            collision_threshold: 1e-8,
        }
    }
}

/// Finds a central configuration near `initial`.
///
/// Each iteration tries a Newton step for the tangential gradient (the
/// Lagrangian Hessian ∇²U + αUM projected on the tangent space, inverted on
/// its non-null part) and accepts it when the residual drops. Otherwise a
/// projected gradient step on U with backtracking is taken. Newton
/// converges to saddles as well as minima, so a guess near a collinear
/// configuration stays there.
pub fn solve_central(
    initial: &Configuration,
    m: &MassVector,
    alpha: Alpha,
    opts: SolverOptions,
) -> Result<CentralConfiguration> {
    if initial.min_distance() < opts.collision_threshold {
        return Err(NcolError::CollisionConfiguration(initial.min_distance()));
    }
    let mut x = initial.normalized(m)?;
    let mut res = centrality_residual(&x, m, alpha)?;
    let mut best = (x.clone(), res);

    for _ in 0..opts.max_iter {
        if res < opts.target {
            break;
        }
        let q = tangent_basis(&x, m);
        let g = DVector::from_vec(gradient(&x, m, alpha)?);
        let gt = q.transpose() * &g;

        let mut accepted = false;
        if let Ok(step) = newton_step(&x, m, alpha, &q, &gt) {
            let mut t = 1.0;
            for _ in 0..30 {
                let trial = retract(&x, &step, t, m)?;
                if trial.min_distance() > opts.collision_threshold {
                    let r = centrality_residual(&trial, m, alpha)?;
                    if r < res {
                        x = trial;
                        res = r;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
        }

        if !accepted {
            let dir = -(&q * &gt);
            let slope = gt.norm_squared();
            let u0 = potential(&x, m, alpha)?;
            let mut t = 1.0 / (1.0 + g.norm());
            let mut moved = false;
            for _ in 0..60 {
                let trial = retract(&x, &dir, t, m)?;
                if trial.min_distance() > opts.collision_threshold {
                    let u1 = potential(&trial, m, alpha)?;
                    if u1 <= u0 - 1e-4 * t * slope {
                        x = trial;
                        res = centrality_residual(&x, m, alpha)?;
                        moved = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }

        let md = x.min_distance();
        if md < opts.collision_threshold {
            return Err(NcolError::ConvergedToCollision(md));
        }
        if res < best.1 {
            best = (x.clone(), res);
        }
    }

    let (x, res) = best;
    let u = potential(&x, m, alpha)?;
    if !(res < RESIDUAL_TOL * residual_scale(&x, m, alpha, u)) {
        return Err(NcolError::NoConvergence {
            iterations: opts.max_iter,
            residual: res,
        });
    }
    let (s0, masses) = canonicalize(&x, m);
    CentralConfiguration::verify(s0, masses, alpha, Family::Numeric)
}

fn newton_step(
    x: &Configuration,
    m: &MassVector,
    alpha: Alpha,
    q: &DMatrix<f64>,
    gt: &DVector<f64>,
) -> Result<DVector<f64>> {
    let h = constrained_hessian_matrix(x, m, alpha)?;
    let ht = q.transpose() * h * q;
    let eig = SymmetricEigen::new(ht);
    let scale = eig.eigenvalues.amax().max(1e-300);
    let mut coeff = DVector::zeros(gt.len());
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        // rotations lie in the kernel; drop them and other near-null modes
        if lam.abs() > 1e-9 * scale {
            let vk = eig.eigenvectors.column(k);
            coeff += vk * (-vk.dot(gt) / lam);
        }
    }
    Ok(q * coeff)
}

fn retract(x: &Configuration, dir: &DVector<f64>, t: f64, m: &MassVector) -> Result<Configuration> {
    let flat: Vec<f64> = x
        .flat()
        .iter()
        .zip(dir.iter())
        .map(|(a, d)| a + t * d)
        .collect();
    Configuration::new(x.dim(), flat)?.normalized(m)
}

/// Brings a configuration to a normal form under rotations, reflections and
/// relabelling of equal masses: centred, principal axes in decreasing order
/// of inertia, axis signs fixed by the third moment (or by the first
/// non-zero coordinate), bodies sorted by (mass, coordinates).
pub fn canonicalize(x: &Configuration, m: &MassVector) -> (Configuration, MassVector) {
    let d = x.dim();
    let n = x.n();
    let c = x.recentered(m);
    let mut s = DMatrix::<f64>::zeros(d, d);
    for (i, &mi) in m.as_slice().iter().enumerate() {
        let p = DVector::from_column_slice(c.point(i));
        s += mi * &p * p.transpose();
    }
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut rotated = vec![0.0; n * d];
    for (new_k, &old_k) in order.iter().enumerate() {
        let axis = eig.eigenvectors.column(old_k);
        let coords: Vec<f64> = (0..n)
            .map(|i| axis.dot(&DVector::from_column_slice(c.point(i))))
            .collect();
        let third: f64 = coords
            .iter()
            .zip(m.as_slice())
            .map(|(v, mi)| mi * v.powi(3))
            .sum();
        let sign = if third.abs() > 1e-9 {
            third.signum()
        } else {
            coords
                .iter()
                .find(|v| v.abs() > 1e-9)
                .map_or(1.0, |v| v.signum())
        };
        for i in 0..n {
            rotated[i * d + new_k] = sign * coords[i] + 0.0;
        }
    }

    let key = |v: f64| (v * 1e9).round() as i64;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        let ka = (key(m.as_slice()[a]), (0..d).map(|k| key(rotated[a * d + k])).collect::<Vec<_>>());
        let kb = (key(m.as_slice()[b]), (0..d).map(|k| key(rotated[b * d + k])).collect::<Vec<_>>());
        ka.cmp(&kb)
    });
    let flat: Vec<f64> = idx
        .iter()
        .flat_map(|&i| rotated[i * d..(i + 1) * d].to_vec())
        .collect();
    let masses = MassVector::new(idx.iter().map(|&i| m.as_slice()[i]).collect())
        .expect("permutation of valid masses");
    (
        Configuration::new(d, flat).expect("same shape"),
        masses,
    )
}

/// Largest difference between the sorted pairwise-distance lists of two
/// configurations; zero iff they agree up to isometry and relabelling
/// (for generic shapes).
pub fn shape_distance(a: &Configuration, b: &Configuration) -> f64 {
    let sorted = |x: &Configuration| {
        let mut v = Vec::new();
        for i in 0..x.n() {
            for j in i + 1..x.n() {
                v.push(x.distance(i, j));
            }
        }
        v.sort_by(f64::total_cmp);
        v
    };
    let (da, db) = (sorted(a), sorted(b));
    if da.len() != db.len() {
        return f64::INFINITY;
    }
    da.iter()
        .zip(&db)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, crate::worst)
}
