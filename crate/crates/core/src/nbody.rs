//! Configuration space of N point masses in R^d and the derivatives of the
//! α-homogeneous potential U(x) = Σ_{i<j} m_i m_j |x_i − x_j|^{−α}.
//!
//! Positions and variations are stored flat, body-major: component `k` of
//! body `i` lives at index `i * dim + k`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{NcolError, Result};

/// Minimum pairwise distance below which a configuration counts as a collision.
pub const COLLISION_TOL: f64 = 1e-12;
/// Default tolerance on the constrained gradient residual.
pub const CENTRAL_TOL: f64 = 1e-8;
/// Tolerance on the ellipsoid and tangency constraints.
pub const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 2.0 {
            Ok(Alpha(alpha))
        } else {
            Err(NcolError::InvalidAlpha(alpha))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// β = 2(2+α)/(2−α), the exponent of the radial equation.
    pub fn beta(self) -> f64 {
        2.0 * (2.0 + self.0) / (2.0 - self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassVector(Vec<f64>);

impl MassVector {
    pub fn new(m: Vec<f64>) -> Result<Self> {
        if m.len() < 2 {
            return Err(NcolError::InvalidN(m.len()));
        }
        if let Some(bad) = m.iter().find(|&&mi| !(mi.is_finite() && mi > 0.0)) {
            return Err(NcolError::InvalidMass(format!("mass {bad} is not positive")));
        }
        Ok(MassVector(m))
    }

    pub fn unit(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Σ_{i<j} m_i m_j.
    pub fn pair_sum(&self) -> f64 {
        let m = &self.0;
        let mut acc = 0.0;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                acc += m[i] * m[j];
            }
        }
        acc
    }

    pub fn is_equal(&self) -> bool {
        self.0.iter().all(|&mi| mi == self.0[0])
    }

    /// The diagonal of M on R^{Nd}.
    pub fn metric_diagonal(&self, dim: usize) -> Vec<f64> {
        self.0
            .iter()
            .flat_map(|&mi| std::iter::repeat(mi).take(dim))
            .collect()
    }
}

/// N points in R^d, stored flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    dim: usize,
    x: Vec<f64>,
}

/// A variation: N vectors in R^d with the same layout as [`Configuration`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    dim: usize,
    v: Vec<f64>,
}

macro_rules! point_set_common {
    ($t:ident, $field:ident) => {
        impl $t {
            pub fn new(dim: usize, flat: Vec<f64>) -> Result<Self> {
                if dim == 0 || flat.is_empty() || flat.len() % dim != 0 {
                    return Err(NcolError::DimensionMismatch(format!(
                        "{} values cannot be split into points of dimension {}",
                        flat.len(),
                        dim
                    )));
                }
                Ok($t { dim, $field: flat })
            }

            pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
                let dim = points.first().map_or(0, |p| p.len());
                if points.iter().any(|p| p.len() != dim) {
                    return Err(NcolError::DimensionMismatch(
                        "points have different lengths".into(),
                    ));
                }
                Self::new(dim, points.concat())
            }

            pub fn zeros(n: usize, dim: usize) -> Self {
                $t {
                    dim,
                    $field: vec![0.0; n * dim],
                }
            }

            #[inline]
            pub fn dim(&self) -> usize {
                self.dim
            }

            #[inline]
            pub fn n(&self) -> usize {
                self.$field.len() / self.dim
            }

            #[inline]
            pub fn flat(&self) -> &[f64] {
                &self.$field
            }

            #[inline]
            pub fn flat_mut(&mut self) -> &mut [f64] {
                &mut self.$field
            }

            pub fn into_flat(self) -> Vec<f64> {
                self.$field
            }

            #[inline]
            pub fn point(&self, i: usize) -> &[f64] {
                &self.$field[i * self.dim..(i + 1) * self.dim]
            }

            pub fn points(&self) -> Vec<Vec<f64>> {
                self.$field.chunks(self.dim).map(|c| c.to_vec()).collect()
            }

            pub fn scaled(&self, lambda: f64) -> Self {
                $t {
                    dim: self.dim,
                    $field: self.$field.iter().map(|a| a * lambda).collect(),
                }
            }

            pub fn norm(&self) -> f64 {
                dot(&self.$field, &self.$field).sqrt()
            }

            pub fn to_dvector(&self) -> DVector<f64> {
                DVector::from_column_slice(&self.$field)
            }
        }
    };
}

point_set_common!(Configuration, x);
point_set_common!(TangentVector, v);

impl Configuration {
    pub fn as_tangent(&self) -> TangentVector {
        TangentVector {
            dim: self.dim,
            v: self.x.clone(),
        }
    }

    /// Pairwise distance |x_i − x_j|.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        dist(self.point(i), self.point(j))
    }

    pub fn min_distance(&self) -> f64 {
        let n = self.n();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(self.distance(i, j));
            }
        }
        best
    }

    /// Σ m_i x_i / Σ m_i.
    pub fn center_of_mass(&self, m: &MassVector) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for (i, &mi) in m.as_slice().iter().enumerate() {
            for (ck, xk) in c.iter_mut().zip(self.point(i)) {
                *ck += mi * xk;
            }
        }
        let total = m.total();
        c.iter_mut().for_each(|ck| *ck /= total);
        c
    }

    pub fn recentered(&self, m: &MassVector) -> Self {
        let c = self.center_of_mass(m);
        let mut out = self.clone();
        for p in out.x.chunks_mut(self.dim) {
            for (pk, ck) in p.iter_mut().zip(&c) {
                *pk -= ck;
            }
        }
        out
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        let mut out = self.clone();
        for p in out.x.chunks_mut(self.dim) {
            for (pk, sk) in p.iter_mut().zip(shift) {
                *pk += sk;
            }
        }
        out
    }

    /// Recentre and scale onto the standard ellipsoid I = 1.
    pub fn normalized(&self, m: &MassVector) -> Result<Self> {
        let c = self.recentered(m);
        let i = moment_of_inertia(&c, m);
        if !(i > 0.0) {
            return Err(NcolError::ZeroConfiguration);
        }
        Ok(c.scaled(1.0 / i.sqrt()))
    }

    pub fn embedded(&self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(NcolError::DimensionMismatch(format!(
                "cannot embed dimension {} into {}",
                self.dim, dim
            )));
        }
        let mut flat = vec![0.0; self.n() * dim];
        for i in 0..self.n() {
            flat[i * dim..i * dim + self.dim].copy_from_slice(self.point(i));
        }
        Configuration::new(dim, flat)
    }
}

impl TangentVector {
    /// Residuals of ⟨v, Ms⟩ = 0 and Σ m_i v_i = 0 (largest absolute value).
    pub fn tangency_residual(&self, s: &Configuration, m: &MassVector) -> f64 {
        let mut radial = 0.0;
        let mut com = vec![0.0; self.dim];
        for (i, &mi) in m.as_slice().iter().enumerate() {
            for k in 0..self.dim {
                let vik = self.v[i * self.dim + k];
                radial += mi * vik * s.flat()[i * self.dim + k];
                com[k] += mi * vik;
            }
        }
        com.iter().fold(radial.abs(), |acc, c| acc.max(c.abs()))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// ⟨Mv, w⟩.
pub fn mass_inner(m: &MassVector, dim: usize, v: &[f64], w: &[f64]) -> f64 {
    v.chunks(dim)
        .zip(w.chunks(dim))
        .zip(m.as_slice())
        .map(|((a, b), mi)| mi * dot(a, b))
        .sum()
}

fn check_shape(x: &Configuration, m: &MassVector) -> Result<()> {
    if x.n() != m.len() {
        return Err(NcolError::DimensionMismatch(format!(
            "{} bodies but {} masses",
            x.n(),
            m.len()
        )));
    }
    Ok(())
}

fn check_collision(x: &Configuration) -> Result<()> {
    let d = x.min_distance();
    if d < COLLISION_TOL {
        Err(NcolError::CollisionConfiguration(d))
    } else {
        Ok(())
    }
}

/// U(x) = Σ_{i<j} m_i m_j |x_i − x_j|^{−α}.
pub fn potential(x: &Configuration, m: &MassVector, alpha: Alpha) -> Result<f64> {
    check_shape(x, m)?;
    check_collision(x)?;
    let a = alpha.get();
    let ms = m.as_slice();
    let mut u = 0.0;
    for i in 0..x.n() {
        for j in i + 1..x.n() {
            u += ms[i] * ms[j] * x.distance(i, j).powf(-a);
        }
    }
    Ok(u)
}

/// I(x) = Σ m_i |x_i|².
pub fn moment_of_inertia(x: &Configuration, m: &MassVector) -> f64 {
    mass_inner(m, x.dim(), x.flat(), x.flat())
}

/// ∇U(x), with ∂U/∂x_i = −α m_i Σ_j m_j |x_i − x_j|^{−α−2}(x_i − x_j).
pub fn gradient(x: &Configuration, m: &MassVector, alpha: Alpha) -> Result<Vec<f64>> {
    check_shape(x, m)?;
    check_collision(x)?;
    let a = alpha.get();
    let d = x.dim();
    let ms = m.as_slice();
    let mut g = vec![0.0; x.flat().len()];
    for i in 0..x.n() {
        for j in i + 1..x.n() {
            let (pi, pj) = (x.point(i), x.point(j));
            let r = dist(pi, pj);
            let c = -a * ms[i] * ms[j] * r.powf(-a - 2.0);
            for k in 0..d {
                let diff = pi[k] - pj[k];
                g[i * d + k] += c * diff;
                g[j * d + k] -= c * diff;
            }
        }
    }
    Ok(g)
}

/// U and ∇U on a flat position slice without allocation or collision
/// checks; a collision shows up as a non-finite value.
pub(crate) fn potential_gradient_raw(x: &[f64], dim: usize, m: &[f64], alpha: f64, grad: &mut [f64]) -> f64 {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let n = m.len();
    let mut u = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (pi, pj) = (&x[i * dim..(i + 1) * dim], &x[j * dim..(j + 1) * dim]);
            let r2: f64 = pi.iter().zip(pj).map(|(a, b)| (a - b) * (a - b)).sum();
            let ra = r2.powf(-0.5 * alpha);
            let mm = m[i] * m[j];
            u += mm * ra;
            let c = -alpha * mm * ra / r2;
            for k in 0..dim {
                let diff = pi[k] - pj[k];
                grad[i * dim + k] += c * diff;
                grad[j * dim + k] -= c * diff;
            }
        }
    }
    u
}

/// ∇²U(x)(v, w) on flat slices, pair by pair.
pub(crate) fn hessian_bilinear_raw(x: &[f64], dim: usize, m: &[f64], alpha: f64, v: &[f64], w: &[f64]) -> f64 {
    let n = m.len();
    let mut q = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (mut r2, mut dv, mut dw, mut vw) = (0.0, 0.0, 0.0, 0.0);
            for k in 0..dim {
                let d = x[i * dim + k] - x[j * dim + k];
                let a = v[i * dim + k] - v[j * dim + k];
                let b = w[i * dim + k] - w[j * dim + k];
                r2 += d * d;
                dv += d * a;
                dw += d * b;
                vw += a * b;
            }
            let ra2 = r2.powf(-0.5 * alpha) / r2;
            q += alpha * m[i] * m[j] * ra2 * ((alpha + 2.0) * dv * dw / r2 - vw);
        }
    }
    q
}

/// The full Hessian ∇²U(x) as a dense Nd × Nd matrix.
pub fn hessian_full(x: &Configuration, m: &MassVector, alpha: Alpha) -> Result<DMatrix<f64>> {
    check_shape(x, m)?;
    check_collision(x)?;
    let a = alpha.get();
    let d = x.dim();
    let n = x.n();
    let ms = m.as_slice();
    let mut h = DMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in i + 1..n {
            let (pi, pj) = (x.point(i), x.point(j));
            let r = dist(pi, pj);
            let mm = a * ms[i] * ms[j];
            let c_outer = mm * (a + 2.0) * r.powf(-a - 4.0);
            let c_id = mm * r.powf(-a - 2.0);
            for k in 0..d {
                for l in 0..d {
                    let mut kkl = c_outer * (pi[k] - pj[k]) * (pi[l] - pj[l]);
                    if k == l {
                        kkl -= c_id;
                    }
                    h[(i * d + k, i * d + l)] += kkl;
                    h[(j * d + k, j * d + l)] += kkl;
                    h[(i * d + k, j * d + l)] -= kkl;
                    h[(j * d + k, i * d + l)] -= kkl;
                }
            }
        }
    }
    Ok(h)
}

/// Evaluates the bilinear form B(v, w) = vᵀ H w.
pub fn bilinear(h: &DMatrix<f64>, v: &[f64], w: &[f64]) -> f64 {
    let wv = DVector::from_column_slice(w);
    let hw = h * wv;
    dot(v, hw.as_slice())
}

/// ∇U(x) + αU(x)Mx; vanishes exactly at central configurations on I = 1.
pub fn constrained_gradient(x: &Configuration, m: &MassVector, alpha: Alpha) -> Result<Vec<f64>> {
    let mut g = gradient(x, m, alpha)?;
    let au = alpha.get() * potential(x, m, alpha)?;
    let md = m.metric_diagonal(x.dim());
    for ((gi, xi), mi) in g.iter_mut().zip(x.flat()).zip(&md) {
        *gi += au * mi * xi;
    }
    Ok(g)
}

/// ‖∇U(x) + αU(x)Mx‖ together with the centre-of-mass offset.
pub fn centrality_residual(x: &Configuration, m: &MassVector, alpha: Alpha) -> Result<f64> {
    let g = constrained_gradient(x, m, alpha)?;
    Ok(dot(&g, &g).sqrt())
}

/// ∇²U(s)(v, v) + αU(s)⟨Mv, v⟩ without any centrality check.
///
/// This is the second derivative of ε ↦ U((s + εv)/√I(s + εv)) at ε = 0 for
/// any s on the ellipsoid and v tangent there. At a central configuration it
/// is the Hessian of U restricted to the ellipsoid.
pub fn hessian_on_ellipsoid(
    s: &Configuration,
    m: &MassVector,
    alpha: Alpha,
    v: &TangentVector,
) -> Result<f64> {
    let h = hessian_full(s, m, alpha)?;
    let u = potential(s, m, alpha)?;
    Ok(ellipsoid_form(&h, u, alpha, m, s.dim(), v.flat(), v.flat()))
}

pub(crate) fn ellipsoid_form(
    h: &DMatrix<f64>,
    u: f64,
    alpha: Alpha,
    m: &MassVector,
    dim: usize,
    v: &[f64],
    w: &[f64],
) -> f64 {
    bilinear(h, v, w) + alpha.get() * u * mass_inner(m, dim, v, w)
}

/// The matrix of the constrained Hessian, ∇²U(s) + αU(s)M, on all of R^{Nd}.
pub fn constrained_hessian_matrix(
    s: &Configuration,
    m: &MassVector,
    alpha: Alpha,
) -> Result<DMatrix<f64>> {
    let mut h = hessian_full(s, m, alpha)?;
    let au = alpha.get() * potential(s, m, alpha)?;
    for (k, mk) in m.metric_diagonal(s.dim()).iter().enumerate() {
        h[(k, k)] += au * mk;
    }
    Ok(h)
}

fn check_on_ellipsoid(s: &Configuration, m: &MassVector) -> Result<()> {
    let i = moment_of_inertia(s, m);
    if (i - 1.0).abs() > CONSTRAINT_TOL {
        return Err(NcolError::NotCentral((i - 1.0).abs()));
    }
    Ok(())
}

/// ∇²U(s)(v,v) + αU(s)⟨Mv,v⟩ at a central configuration s.
pub fn hessian_constrained(
    s: &Configuration,
    m: &MassVector,
    alpha: Alpha,
    v: &TangentVector,
) -> Result<f64> {
    check_shape(s, m)?;
    check_on_ellipsoid(s, m)?;
    let res = centrality_residual(s, m, alpha)?;
    if res > CENTRAL_TOL {
        return Err(NcolError::NotCentral(res));
    }
    let tan = v.tangency_residual(s, m);
    if tan > CONSTRAINT_TOL * v.norm().max(1.0) {
        return Err(NcolError::NotTangent(tan));
    }
    hessian_on_ellipsoid(s, m, alpha, v)
}

/// The interaction matrix A: a_ii = Σ_{k≠i} m_k r_ik^{−(α+2)}, a_ij = −m_j r_ij^{−(α+2)}.
pub fn matrix_a(x: &Configuration, m: &MassVector, alpha: Alpha) -> Result<DMatrix<f64>> {
    check_shape(x, m)?;
    check_collision(x)?;
    let e = -(alpha.get() + 2.0);
    let n = x.n();
    let ms = m.as_slice();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let w = x.distance(i, j).powf(e);
                a[(i, j)] = -ms[j] * w;
                a[(i, i)] += ms[j] * w;
            }
        }
    }
    Ok(a)
}

/// ∇²U(x)(v, v) for a normal variation given by one scalar per body:
/// −α⟨v, MAv⟩.
pub fn normal_hessian(x: &Configuration, m: &MassVector, alpha: Alpha, v: &[f64]) -> Result<f64> {
    let a = matrix_a(x, m, alpha)?;
    let av = &a * DVector::from_column_slice(v);
    let mav: f64 = v
        .iter()
        .zip(av.iter())
        .zip(m.as_slice())
        .map(|((vi, avi), mi)| vi * mi * avi)
        .sum();
    Ok(-alpha.get() * mav)
}

/// Orthonormal basis (Euclidean) of {v : ⟨v, Ms⟩ = 0, Σ m_i v_i = 0},
/// returned as the columns of an Nd × k matrix.
///
/// Constraint rows are orthonormalized first, then the standard basis is
/// swept through modified Gram–Schmidt against them and the accepted vectors.
pub fn tangent_basis(s: &Configuration, m: &MassVector) -> DMatrix<f64> {
    let d = s.dim();
    let nd = s.flat().len();
    let md = m.metric_diagonal(d);

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    rows.push(s.flat().iter().zip(&md).map(|(x, mi)| x * mi).collect());
    for k in 0..d {
        let mut r = vec![0.0; nd];
        for (i, &mi) in m.as_slice().iter().enumerate() {
            r[i * d + k] = mi;
        }
        rows.push(r);
    }

    let mut cons: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        if let Some(q) = orthonormalize(r, &cons) {
            cons.push(q);
        }
    }

    let target = nd - cons.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(target);
    for j in 0..nd {
        if basis.len() == target {
            break;
        }
        let mut e = vec![0.0; nd];
        e[j] = 1.0;
        let mut all = cons.clone();
        all.extend(basis.iter().cloned());
        if let Some(q) = orthonormalize(e, &all) {
            basis.push(q);
        }
    }
    DMatrix::from_fn(nd, basis.len(), |r, c| basis[c][r])
}

fn orthonormalize(mut v: Vec<f64>, against: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n0 = dot(&v, &v).sqrt();
    if n0 == 0.0 {
        return None;
    }
    // two passes keep the loss of orthogonality at rounding level
    for _ in 0..2 {
        for q in against {
            let c = dot(&v, q);
            v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= c * qi);
        }
    }
    let n1 = dot(&v, &v).sqrt();
    if n1 < 1e-8 * n0 {
        return None;
    }
    v.iter_mut().for_each(|vi| *vi /= n1);
    Some(v)
}

/// Projects v onto the tangent space at s (Euclidean orthogonal projection).
pub fn project_tangent(s: &Configuration, m: &MassVector, v: &[f64]) -> TangentVector {
    let q = tangent_basis(s, m);
    let coeff = q.transpose() * DVector::from_column_slice(v);
    let p = &q * coeff;
    TangentVector {
        dim: s.dim(),
        v: p.as_slice().to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn collinear_unit() -> (Configuration, MassVector) {
        let x = Configuration::new(2, vec![-FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2, 0.0]).unwrap();
        (x, MassVector::unit(3).unwrap())
    }

    fn al(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    #[test]
    fn raw_helpers_match() {
        let x = Configuration::new(2, vec![0.3, -0.2, -0.5, 0.4, 0.1, 0.7, -0.6, -0.1]).unwrap();
        let m = MassVector::new(vec![1.0, 2.0, 0.5, 1.5]).unwrap();
        let a = al(0.8);
        let mut g = vec![0.0; 8];
        let u = potential_gradient_raw(x.flat(), 2, m.as_slice(), 0.8, &mut g);
        assert!((u - potential(&x, &m, a).unwrap()).abs() < 1e-14 * u);
        let g0 = gradient(&x, &m, a).unwrap();
        for (p, q) in g.iter().zip(&g0) {
            assert!((p - q).abs() < 1e-13 * u);
        }
        let h = hessian_full(&x, &m, a).unwrap();
        let v: Vec<f64> = (0..8).map(|k| (k as f64 * 0.7).sin()).collect();
        let w: Vec<f64> = (0..8).map(|k| (k as f64 * 1.3).cos()).collect();
        let r = hessian_bilinear_raw(x.flat(), 2, m.as_slice(), 0.8, &v, &w);
        assert!((r - bilinear(&h, &v, &w)).abs() < 1e-12 * r.abs().max(1.0));
    }

    #[test]
    fn alpha_bounds() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(2.0).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert_eq!(al(1.0).beta(), 6.0);
    }

    #[test]
    fn masses_must_be_positive() {
        assert!(MassVector::new(vec![1.0, 0.0]).is_err());
        assert!(MassVector::new(vec![1.0]).is_err());
        assert_eq!(MassVector::new(vec![1.0, 2.0, 3.0]).unwrap().pair_sum(), 11.0);
    }

    #[test]
    fn two_bodies_at_unit_distance() {
        let x = Configuration::new(2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let m = MassVector::unit(2).unwrap();
        for a in [0.1, 1.0, 1.9] {
            assert!((potential(&x, &m, al(a)).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn collinear_potential_closed_form() {
        let (x, m) = collinear_unit();
        for a in [0.05, 0.5, 1.0, 1.7] {
            let expect = 2.0 * 2f64.powf(a / 2.0) + 2f64.powf(-a / 2.0);
            assert!((potential(&x, &m, al(a)).unwrap() - expect).abs() < 1e-13);
        }
        let u1 = potential(&x, &m, al(1.0)).unwrap();
        assert!((u1 - 3.5355339059327378).abs() < 1e-12);
        assert!((moment_of_inertia(&x, &m) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collision_is_rejected() {
        let x = Configuration::new(1, vec![0.0, 0.0, 1.0]).unwrap();
        let m = MassVector::unit(3).unwrap();
        assert!(matches!(
            potential(&x, &m, al(1.0)),
            Err(NcolError::CollisionConfiguration(_))
        ));
    }

    #[test]
    fn matrix_a_entries_on_collinear() {
        let (x, m) = collinear_unit();
        for a in [0.3, 1.0, 1.5] {
            let g = 2f64.powf((a + 2.0) / 2.0);
            let am = matrix_a(&x, &m, al(a)).unwrap();
            assert!((am[(1, 1)] - 2.0 * g).abs() < 1e-12);
            assert!((am[(0, 1)] + g).abs() < 1e-12);
            assert!((am[(0, 2)] + 1.0 / g).abs() < 1e-12);
            let ones = &am * DVector::from_element(3, 1.0);
            assert!(ones.norm() < 1e-12);
            let w = [1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt()];
            let waw = bilinear(&am, &w, &w);
            let u = potential(&x, &m, al(a)).unwrap();
            let two_a = 2f64.powf(a);
            assert!((waw / u - 6.0 * two_a / (2.0 * two_a + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_is_central() {
        let (x, m) = collinear_unit();
        for a in [0.1, 1.0, 1.9] {
            assert!(centrality_residual(&x, &m, al(a)).unwrap() < 1e-13);
        }
    }

    // v = ((cosθ, sinθ), (0, −2 sinθ), (−cosθ, sinθ))
    fn planar_variation(theta: f64) -> TangentVector {
        let (c, s) = (theta.cos(), theta.sin());
        TangentVector::new(2, vec![c, s, 0.0, -2.0 * s, -c, s]).unwrap()
    }

    fn planar_closed_form(a: f64, theta: f64) -> f64 {
        let c2 = theta.cos().powi(2);
        let p = 2f64.powf(a / 2.0);
        2.0 * a * (c2 * (2.0 * (a + 10.0) * p + (a + 1.0) / p) - 18.0 * p)
    }

    #[test]
    fn planar_variation_full_hessian() {
        let (x, m) = collinear_unit();
        for a in [0.2, 1.0, 1.6] {
            let h = hessian_full(&x, &m, al(a)).unwrap();
            for theta in [0.0, PI / 4.0, PI / 2.0] {
                let v = planar_variation(theta);
                let got = bilinear(&h, v.flat(), v.flat());
                assert!((got - planar_closed_form(a, theta)).abs() < 1e-10, "a={a} θ={theta}");
            }
        }
    }

    #[test]
    fn planar_variation_is_tangent_only_when_normal() {
        let (x, m) = collinear_unit();
        assert!(planar_variation(PI / 2.0).tangency_residual(&x, &m) < 1e-15);
        let r0 = planar_variation(0.0).tangency_residual(&x, &m);
        assert!((r0 - 2f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            hessian_constrained(&x, &m, al(1.0), &planar_variation(0.0)),
            Err(NcolError::NotTangent(_))
        ));
    }

    #[test]
    fn normal_variation_two_formulas_agree() {
        let (x, m) = collinear_unit();
        for a in [0.1, 0.7, 1.0, 1.8] {
            let v = planar_variation(PI / 2.0);
            let constrained = hessian_constrained(&x, &m, al(a), &v).unwrap();
            let am = matrix_a(&x, &m, al(a)).unwrap();
            let w = [1.0, -2.0, 1.0];
            let u = potential(&x, &m, al(a)).unwrap();
            let other = a * (-bilinear(&am, &w, &w) + u * 6.0);
            assert!((constrained - other).abs() < 1e-10 * other.abs().max(1.0));
        }
    }

    #[test]
    fn two_body_normal_direction() {
        let x = Configuration::new(2, vec![0.0, 0.0, 1.5, 0.0]).unwrap();
        let m = MassVector::new(vec![2.0, 3.0]).unwrap();
        let a = 0.8;
        let h = hessian_full(&x, &m, al(a)).unwrap();
        let v = [0.0, 0.4, 0.0, -1.1];
        let expect = -a * 6.0 * (0.4f64 + 1.1).powi(2) / 1.5f64.powf(a + 2.0);
        assert!((bilinear(&h, &v, &v) - expect).abs() < 1e-12);
        let nv = normal_hessian(&x, &m, al(a), &[0.4, -1.1]).unwrap();
        assert!((nv - expect).abs() < 1e-12);
    }

    #[test]
    fn rigid_translation_is_in_kernel() {
        let x = Configuration::new(3, vec![0.3, -0.2, 0.1, -0.5, 0.4, 0.0, 0.2, 0.2, -0.6]).unwrap();
        let m = MassVector::new(vec![1.0, 2.0, 0.5]).unwrap();
        let h = hessian_full(&x, &m, al(1.3)).unwrap();
        let v = [0.7, -0.1, 0.2, 0.7, -0.1, 0.2, 0.7, -0.1, 0.2];
        assert!(bilinear(&h, &v, &v).abs() < 1e-12);
    }

    #[test]
    fn gradient_satisfies_euler_identity() {
        let x = Configuration::new(2, vec![0.3, -0.2, -0.5, 0.4, 0.2, 0.9]).unwrap();
        let m = MassVector::new(vec![1.0, 2.0, 0.5]).unwrap();
        let a = al(0.6);
        let g = gradient(&x, &m, a).unwrap();
        let u = potential(&x, &m, a).unwrap();
        assert!((dot(&g, x.flat()) + 0.6 * u).abs() < 1e-12);
    }

    #[test]
    fn tangent_basis_dimension_and_orthonormality() {
        let (x, m) = collinear_unit();
        let q = tangent_basis(&x, &m);
        assert_eq!(q.ncols(), 3);
        let qtq = q.transpose() * &q;
        assert!((qtq - DMatrix::identity(3, 3)).norm() < 1e-13);
        for c in 0..q.ncols() {
            let v = TangentVector::new(2, q.column(c).iter().copied().collect()).unwrap();
            assert!(v.tangency_residual(&x, &m) < 1e-14);
        }
    }

    #[test]
    fn ngon_inertia_is_one() {
        for n in [3usize, 4, 7] {
            let flat: Vec<f64> = (0..n)
                .flat_map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    [t.cos() / (n as f64).sqrt(), t.sin() / (n as f64).sqrt()]
                })
                .collect();
            let x = Configuration::new(2, flat).unwrap();
            let m = MassVector::unit(n).unwrap();
            assert!((moment_of_inertia(&x, &m) - 1.0).abs() < 1e-14);
            assert!((moment_of_inertia(&x.scaled(3.0), &m) - 9.0).abs() < 1e-13);
        }
    }
}
