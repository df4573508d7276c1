//! The non-minimality criterion μ1 < −(2−α)²/8·U(s0) and its closed-form
//! sufficient conditions for the collinear and polygonal families.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::central::{collinear3, ngon, CentralConfiguration, Family};
use crate::error::{NcolError, Result};
use crate::nbody::{
    centrality_residual, constrained_hessian_matrix, matrix_a, Alpha, TangentVector, CENTRAL_TOL,
};
use crate::roots::{bisect, linspace, sign_changes};

/// Grid used to bracket thresholds before bisection.
pub const SCAN_POINTS: usize = 4096;
/// Smallest α at which (α+2)²/(8α) is evaluated.
pub const ALPHA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub alpha: f64,
    pub mu1: f64,
    /// Unit (Euclidean) eigenvector for μ1.
    pub eigvec: TangentVector,
    /// Orthonormal basis of the μ1 eigenspace, eigvec first.
    pub eigenspace: Vec<TangentVector>,
    pub b: f64,
    /// μ1 + (2−α)²/8·b.
    pub margin: f64,
    pub satisfied: bool,
    pub family: Family,
    pub n: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Condition {
    fn new(lhs: f64, rhs: f64) -> Self {
        Condition {
            lhs,
            rhs,
            holds: lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub alpha_star: Option<f64>,
    pub bracket: (f64, f64),
    /// f(α*) − g(α*) for the defining pair.
    pub residual: f64,
    /// Number of sign changes seen on the pre-scan grid.
    pub crossings: usize,
}

/// (2−α)²/8 · b, the right-hand side of the criterion with the sign removed.
pub fn criterion_offset(alpha: f64, b: f64) -> f64 {
    (2.0 - alpha).powi(2) / 8.0 * b
}

/// (α+2)²/(8α).
pub fn g_alpha(alpha: f64) -> f64 {
    (alpha + 2.0).powi(2) / (8.0 * alpha)
}

/// Smallest eigenvalue of the constrained Hessian on
/// {⟨v, Ms0⟩ = 0} ∩ {Σ m_i v_i = 0} with Euclidean unit eigenvector.
pub fn smallest_eigenvalue(cc: &CentralConfiguration) -> Result<SpectralReport> {
    let (s, m, alpha) = (&cc.s0, &cc.masses, cc.alpha);
    let res = centrality_residual(s, m, alpha)?;
    if res > CENTRAL_TOL {
        return Err(NcolError::NotCentral(res));
    }
    let h = constrained_hessian_matrix(s, m, alpha)?;
    let q = crate::nbody::tangent_basis(s, m);
    let r = q.transpose() * &h * &q;
    let r = (&r + r.transpose()) * 0.5;
    let eig = SymmetricEigen::new(r);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mu1 = eig.eigenvalues[order[0]];
    let scale = eig.eigenvalues.amax().max(1.0);

    let lift = |k: usize| -> TangentVector {
        let y = eig.eigenvectors.column(k);
        let v = &q * y;
        let nrm = v.norm();
        TangentVector::new(s.dim(), (v / nrm).as_slice().to_vec()).expect("dimension from basis")
    };
    let eigenspace: Vec<TangentVector> = order
        .iter()
        .take_while(|&&k| eig.eigenvalues[k] - mu1 <= 1e-9 * scale)
        .map(|&k| lift(k))
        .collect();
    let margin = mu1 + criterion_offset(alpha.get(), cc.b);
    Ok(SpectralReport {
        alpha: alpha.get(),
        mu1,
        eigvec: eigenspace[0].clone(),
        eigenspace,
        b: cc.b,
        margin,
        satisfied: margin < 0.0,
        family: cc.family,
        n: cc.n(),
        dim: cc.dim(),
    })
}

/// (satisfied, margin) for the criterion at cc.
pub fn check_rel_eigen(cc: &CentralConfiguration) -> Result<(bool, f64)> {
    let r = smallest_eigenvalue(cc)?;
    Ok((r.satisfied, r.margin))
}

/// Criterion restricted to one normal variation given by one scalar per
/// body: lhs = (⟨v, MAv⟩ − U⟨v, Mv⟩)/(U‖v‖²), rhs = (2−α)²/(8α).
/// lhs > rhs exactly when the margin along that direction is negative.
pub fn normal_condition(cc: &CentralConfiguration, v: &[f64]) -> Result<Condition> {
    if v.len() != cc.n() {
        return Err(NcolError::DimensionMismatch(format!(
            "{} weights for {} bodies",
            v.len(),
            cc.n()
        )));
    }
    let a = matrix_a(&cc.s0, &cc.masses, cc.alpha)?;
    let av = &a * DVector::from_column_slice(v);
    let ms = cc.masses.as_slice();
    let mav: f64 = (0..v.len()).map(|i| v[i] * ms[i] * av[i]).sum();
    let mv: f64 = (0..v.len()).map(|i| v[i] * ms[i] * v[i]).sum();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let al = cc.alpha.get();
    Ok(Condition::new(
        (mav - cc.b * mv) / (cc.b * vv),
        (2.0 - al).powi(2) / (8.0 * al),
    ))
}

// ---- three bodies on a line -------------------------------------------

/// f(α) = 6·2^α/(2·2^α+1) against g(α) = (α+2)²/(8α).
pub fn collinear_equal_condition(alpha: f64) -> Condition {
    let t = 2f64.powf(alpha);
    Condition::new(6.0 * t / (2.0 * t + 1.0), g_alpha(alpha))
}

/// Root ᾱ of f − g on [0.01, 6 − 4√2].
pub fn collinear_threshold() -> Result<ThresholdResult> {
    let hi = 6.0 - 4.0 * 2f64.sqrt();
    let d = |a: f64| {
        let c = collinear_equal_condition(a);
        c.lhs - c.rhs
    };
    threshold_on(d, 0.01, hi)
}

fn threshold_on<F: Fn(f64) -> f64>(d: F, lo: f64, hi: f64) -> Result<ThresholdResult> {
    let brackets = sign_changes(&d, lo, hi, SCAN_POINTS);
    let Some(&(a, b)) = brackets.first() else {
        return Ok(ThresholdResult {
            alpha_star: None,
            bracket: (lo, hi),
            residual: f64::NAN,
            crossings: 0,
        });
    };
    let root = bisect(&d, a, b)?;
    Ok(ThresholdResult {
        alpha_star: Some(root),
        bracket: (a, b),
        residual: d(root),
        crossings: brackets.len(),
    })
}

/// The unequal-mass inequality in the published closed form, masses
/// (m1, 1, m1): lhs = (2^α(16m1+4) − m1² + 2m1)/(2^{α+1}+m1),
/// rhs = 3(2−α)²/(8α).
pub fn collinear_unequal_condition(m1: f64, alpha: f64) -> Condition {
    let t = 2f64.powf(alpha);
    Condition::new(
        (t * (16.0 * m1 + 4.0) - m1 * m1 + 2.0 * m1) / (2.0 * t + m1),
        3.0 * (2.0 - alpha).powi(2) / (8.0 * alpha),
    )
}

/// The same inequality evaluated from first principles for v = (1, −2, 1):
/// lhs = (⟨v, MAv⟩ − U⟨v, Mv⟩)/(2U). Closed form
/// (2^α(16m1−4) − m1² − 2m1)/(2^{α+1}+m1).
pub fn collinear_unequal_direct(m1: f64, alpha: f64) -> Condition {
    let t = 2f64.powf(alpha);
    Condition::new(
        (t * (16.0 * m1 - 4.0) - m1 * m1 - 2.0 * m1) / (2.0 * t + m1),
        3.0 * (2.0 - alpha).powi(2) / (8.0 * alpha),
    )
}

/// Normal variation (1, −2m1, 1), which keeps the centre of mass fixed for
/// masses (m1, 1, m1).
pub fn collinear_unequal_admissible(m1: f64, alpha: Alpha) -> Result<Condition> {
    let cc = collinear3(m1, 1.0, alpha)?;
    normal_condition(&cc, &[1.0, -2.0 * m1, 1.0])
}

/// Threshold α* of the published unequal-mass inequality for a given m1.
pub fn collinear_unequal_threshold(m1: f64) -> Result<ThresholdResult> {
    let d = |a: f64| {
        let c = collinear_unequal_condition(m1, a);
        c.lhs - c.rhs
    };
    threshold_on(d, ALPHA_FLOOR, 2.0 - ALPHA_FLOOR)
}

/// Largest m1 with f(2) > g(2) = 0 in the published form.
pub fn unequal_existence_boundary() -> Result<f64> {
    bisect(|m| collinear_unequal_condition(m, 2.0).lhs, 1.0, 200.0)
}

/// Largest m1 for which the published inequality holds at α = 1.
pub fn unequal_newtonian_boundary() -> Result<f64> {
    bisect(
        |m| {
            let c = collinear_unequal_condition(m, 1.0);
            c.lhs - c.rhs
        },
        1.0,
        100.0,
    )
}

/// A on collinear3(1,1) in the basis w1 = (1,0,−1), w2 = (0,1,−1).
pub fn b_matrix(alpha: Alpha) -> Result<Matrix2<f64>> {
    let cc = collinear3(1.0, 1.0, alpha)?;
    let a = matrix_a(&cc.s0, &cc.masses, alpha)?;
    let w = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0]);
    let b = w.transpose() * a * w;
    Ok(Matrix2::new(b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]))
}

/// (7γ+5γ⁻¹ ∓ √(13γ²−2+25γ⁻²))/2 with γ = 2^{(α+2)/2}, ascending.
pub fn b_eigen_closed(alpha: f64) -> (f64, f64) {
    let g = 2f64.powf((alpha + 2.0) / 2.0);
    let tr = 7.0 * g + 5.0 / g;
    let disc = (13.0 * g * g - 2.0 + 25.0 / (g * g)).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

/// lhs = λ_B^max, rhs = (2+α)²/(8α)·(γ + 2γ⁻¹).
pub fn collinear_b_eigen_condition(alpha: f64) -> Condition {
    let g = 2f64.powf((alpha + 2.0) / 2.0);
    Condition::new(b_eigen_closed(alpha).1, g_alpha(alpha) * (g + 2.0 / g))
}

// ---- regular polygons -------------------------------------------------

fn check_polygon_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(NcolError::InvalidN(n));
    }
    Ok(())
}

/// sin((k−1)π/N) for k = 2..N.
pub fn scaled_distances(n: usize) -> Vec<f64> {
    (1..n).map(|j| (j as f64 * PI / n as f64).sin()).collect()
}

fn sum_pow(r: &[f64], e: f64) -> f64 {
    r.iter().map(|x| x.powf(e)).sum()
}

/// Φ_N(α) = ½ Σ r̃^{−α−2} / Σ r̃^{−α}.
pub fn phi(n: usize, alpha: f64) -> Result<f64> {
    check_polygon_n(n)?;
    let r = scaled_distances(n);
    Ok(0.5 * sum_pow(&r, -alpha - 2.0) / sum_pow(&r, -alpha))
}

/// Ψ_N(α) and Φ_N(α) for the standard choice of w.
pub fn psi_phi(n: usize, alpha: f64) -> Result<(f64, f64)> {
    let p = phi(n, alpha)?;
    let r = scaled_distances(n);
    let sigma = sum_pow(&r, -alpha);
    let e = -alpha - 2.0;
    let psi = if n == 4 {
        p + 0.5 * (2.0 * r[0].powf(e) - r[1].powf(e)) / sigma
    } else {
        p + 0.5 * r[0].powf(e) / sigma
    };
    Ok((psi, p))
}

/// Ψ_N(α) = ½⟨w, Ãw⟩/Σ r̃^{−α} for an arbitrary weight vector w.
pub fn psi_for_w(n: usize, alpha: f64, w: &[f64]) -> Result<f64> {
    check_polygon_n(n)?;
    if w.len() != n {
        return Err(NcolError::DimensionMismatch(format!("{} weights for N = {n}", w.len())));
    }
    let r = scaled_distances(n);
    let e = -alpha - 2.0;
    let diag = sum_pow(&r, e);
    let mut q = 0.0;
    for i in 0..n {
        q += diag * w[i] * w[i];
        for j in 0..n {
            if i != j {
                let k = if j > i { j - i } else { i - j };
                q -= r[k - 1].powf(e) * w[i] * w[j];
            }
        }
    }
    Ok(0.5 * q / sum_pow(&r, -alpha))
}

/// The standard w: alternating halves for N = 4, a normalized adjacent
/// pair for N ≥ 5.
pub fn standard_w(n: usize) -> Vec<f64> {
    if n == 4 {
        vec![0.5, -0.5, 0.5, -0.5]
    } else {
        adjacent_pair_w(n, 0)
    }
}

/// w_i = 1/√2, w_{i+1} = −1/√2 (indices mod N), zero elsewhere.
pub fn adjacent_pair_w(n: usize, i: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    w[i % n] = std::f64::consts::FRAC_1_SQRT_2;
    w[(i + 1) % n] = -std::f64::consts::FRAC_1_SQRT_2;
    w
}

/// Root α_N of Ψ_N − (α+2)²/(8α) on [1e-6, 1].
///
/// Fails with `NotSatisfiedOnGrid` if Ψ_N is not strictly increasing on a
/// 1000-point grid of [0, 2]. `crossings` counts sign changes on a
/// 10⁴-point grid of (0, 1).
pub fn ngon_threshold(n: usize) -> Result<ThresholdResult> {
    check_polygon_n(n)?;
    let grid = linspace(0.0, 2.0, 999);
    let vals: Vec<f64> = grid
        .iter()
        .map(|&a| psi_phi(n, a).map(|p| p.0))
        .collect::<Result<_>>()?;
    if let Some(k) = vals.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(NcolError::NotSatisfiedOnGrid(format!(
            "Psi_{n} not increasing near alpha = {}",
            grid[k]
        )));
    }
    let d = |a: f64| psi_phi(n, a).map(|p| p.0).unwrap_or(f64::NAN) - g_alpha(a);
    let mut t = threshold_on(&d, ALPHA_FLOOR, 1.0)?;
    t.crossings = sign_changes(&d, 1e-4, 1.0, 9999).len();
    Ok(t)
}

/// sin^{−α−2}(π/N) + 2Σ_{j=3}^{N/2}(−1)^j sin^{−α−2}((j−1)π/N) + (−1)^{N/2+1}.
pub fn hiphop_g(n: usize, alpha: f64) -> Result<f64> {
    if n < 6 || n % 2 == 1 {
        return Err(NcolError::InvalidN(n));
    }
    let nf = n as f64;
    let e = -alpha - 2.0;
    let mut g = (PI / nf).sin().powf(e);
    for j in 3..=n / 2 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        g += 2.0 * sign * ((j - 1) as f64 * PI / nf).sin().powf(e);
    }
    g += if (n / 2 + 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(g)
}

/// Σ b^{x+2}/Σ b^x.
pub fn scemo_f(b: &[f64], x: f64) -> f64 {
    sum_pow(b, x + 2.0) / sum_pow(b, x)
}

/// (1 + Σ b^{x+2})/(1 + Σ b^x).
pub fn scemo_g(b: &[f64], x: f64) -> f64 {
    (1.0 + sum_pow(b, x + 2.0)) / (1.0 + sum_pow(b, x))
}

/// Distinct inverse polygon distances 1/sin(jπ/N) > 1, decreasing.
pub fn ngon_bases(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (1..=(n - 1) / 2).map(|j| 1.0 / (j as f64 * PI / nf).sin()).collect()
}

// ---- sweeps -----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepFamily {
    CollinearEqual,
    CollinearM2 { m1: f64 },
    Ngon { n: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub mu1: f64,
    pub margin: f64,
}

fn rows_at(fam: SweepFamily, alpha: f64) -> Result<Vec<SweepRow>> {
    let al = Alpha::new(alpha)?;
    let (cc, conds): (CentralConfiguration, Vec<(&str, Condition)>) = match fam {
        SweepFamily::CollinearEqual => {
            let cc = collinear3(1.0, 1.0, al)?;
            let b = collinear_b_eigen_condition(alpha);
            let u = cc.b;
            (
                cc,
                vec![
                    ("collinear3", collinear_equal_condition(alpha)),
                    ("collinear3-B", Condition::new(b.lhs / u, b.rhs / u)),
                ],
            )
        }
        SweepFamily::CollinearM2 { m1 } => (
            collinear3(m1, 1.0, al)?,
            vec![("collinear3-m2", collinear_unequal_condition(m1, alpha))],
        ),
        SweepFamily::Ngon { n, dim } => {
            let (psi, _) = psi_phi(n, alpha)?;
            (ngon(n, al, dim)?, vec![("ngon", Condition::new(psi, g_alpha(alpha)))])
        }
    };
    let rep = smallest_eigenvalue(&cc)?;
    Ok(conds
        .into_iter()
        .map(|(name, c)| SweepRow {
            alpha,
            family: name.to_string(),
            n: cc.n(),
            lhs: c.lhs,
            rhs: c.rhs,
            holds: c.holds,
            mu1: rep.mu1,
            margin: rep.margin,
        })
        .collect())
}

/// Rows for every α, in the order given. Runs in parallel.
pub fn sweep(fam: SweepFamily, alphas: &[f64]) -> Result<Vec<SweepRow>> {
    let per: Vec<Vec<SweepRow>> = alphas
        .par_iter()
        .map(|&a| rows_at(fam, a))
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// α = k/200 for k = 10..=399: step 0.005 on [0.05, 2).
pub fn figure1_grid() -> Vec<f64> {
    (10..400).map(|k| k as f64 / 200.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nbody::{hessian_constrained, potential};

    fn al(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    #[test]
    fn collinear_mu1_matches_normal_direction() {
        for &a in &[0.3, 1.0, 1.7] {
            let cc = collinear3(1.0, 1.0, al(a)).unwrap();
            let rep = smallest_eigenvalue(&cc).unwrap();
            let g = 2f64.powf((a + 2.0) / 2.0);
            let v = TangentVector::new(
                2,
                [0.0, 1.0, 0.0, -2.0, 0.0, 1.0].iter().map(|x| x / 6f64.sqrt()).collect(),
            )
            .unwrap();
            let ray = hessian_constrained(&cc.s0, &cc.masses, cc.alpha, &v).unwrap();
            assert!((ray - a * (cc.b - 3.0 * g)).abs() < 1e-10 * cc.b);
            assert!(rep.mu1 <= ray + 1e-10);
            // the normal direction is the minimizer for the planar collinear case
            assert!((rep.mu1 - ray).abs() < 1e-9 * cc.b);
            let re = hessian_constrained(&cc.s0, &cc.masses, cc.alpha, &rep.eigvec).unwrap();
            assert!((re - rep.mu1).abs() < 1e-10 * cc.b);
        }
    }

    #[test]
    fn collinear_criterion_sign() {
        assert!(check_rel_eigen(&collinear3(1.0, 1.0, al(1.0)).unwrap()).unwrap().0);
        assert!(!check_rel_eigen(&collinear3(1.0, 1.0, al(0.01)).unwrap()).unwrap().0);
    }

    #[test]
    fn criterion_agrees_with_normal_condition() {
        for k in 1..100 {
            let a = 0.02 * k as f64 - 0.01;
            let cc = collinear3(1.0, 1.0, al(a)).unwrap();
            let c = normal_condition(&cc, &[1.0, -2.0, 1.0]).unwrap();
            let eq = collinear_equal_condition(a);
            assert_eq!(c.holds, eq.holds, "alpha = {a}");
            assert_eq!(eq.holds, check_rel_eigen(&cc).unwrap().0, "alpha = {a}");
        }
    }

    #[test]
    fn equal_condition_values() {
        let c = collinear_equal_condition(1.0);
        assert!((c.lhs - 2.4).abs() < 1e-15 && (c.rhs - 1.125).abs() < 1e-15 && c.holds);
        let c = collinear_equal_condition(2.0 - 1e-15);
        assert!((c.rhs - 1.0).abs() < 1e-12 && (c.lhs - 24.0 / 9.0).abs() < 1e-12);
        assert!((g_alpha(6.0 - 4.0 * 2f64.sqrt()) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn threshold_below_bound() {
        let t = collinear_threshold().unwrap();
        let a = t.alpha_star.unwrap();
        assert!(a < 6.0 - 4.0 * 2f64.sqrt());
        assert!(t.residual.abs() < 1e-12);
        assert!(!collinear_equal_condition(a / 2.0).holds);
        assert!(collinear_equal_condition(2.0 * a).holds);
    }

    #[test]
    fn unequal_direct_matches_matrix_oracle() {
        for &m1 in &[0.5, 1.0, 3.0, 30.0] {
            for &a in &[0.2, 1.0, 1.8] {
                let cc = collinear3(m1, 1.0, al(a)).unwrap();
                let c = normal_condition(&cc, &[1.0, -2.0, 1.0]).unwrap();
                let d = collinear_unequal_direct(m1, a);
                assert!((3.0 * c.lhs - d.lhs).abs() < 1e-11 * d.lhs.abs().max(1.0));
                // the published form differs by a constant 4
                let p = collinear_unequal_condition(m1, a);
                assert!((p.lhs - d.lhs - 4.0).abs() < 1e-11 * p.lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn unequal_reduces_to_equal_masses() {
        for &a in &[0.3, 1.0, 1.6] {
            let d = collinear_unequal_direct(1.0, a);
            let e = collinear_equal_condition(a);
            assert!((d.lhs - 3.0 * (e.lhs - 1.0)).abs() < 1e-12);
            assert_eq!(d.holds, e.holds);
        }
    }

    #[test]
    fn unequal_boundaries() {
        let m = unequal_existence_boundary().unwrap();
        assert!((m - (33.0 + 1105f64.sqrt())).abs() < 1e-9);
        for &m1 in &[1.0, 10.0, 60.0] {
            let f2 = collinear_unequal_condition(m1, 2.0).lhs;
            assert!((f2 - (-m1 * m1 + 66.0 * m1 + 16.0) / (m1 + 8.0)).abs() < 1e-12 * f2.abs().max(1.0));
        }
        let m = unequal_newtonian_boundary().unwrap();
        let root = (269.0 + (269f64.powi(2) + 4.0 * 8.0 * 52.0).sqrt()) / 16.0;
        assert!((m - root).abs() < 1e-9);
    }

    #[test]
    fn b_matrix_closed_form() {
        for &a in &[0.1, 0.7, 1.0, 1.9] {
            let b = b_matrix(al(a)).unwrap();
            let g = 2f64.powf((a + 2.0) / 2.0);
            assert!((b[(0, 0)] - (2.0 * g + 4.0 / g)).abs() < 1e-12 * g);
            assert!((b[(1, 1)] - (5.0 * g + 1.0 / g)).abs() < 1e-12 * g);
            assert!((b[(0, 1)] - (g + 2.0 / g)).abs() < 1e-12 * g);
            let e = b.symmetric_eigen().eigenvalues;
            let (lo, hi) = b_eigen_closed(a);
            let (elo, ehi) = (e.min(), e.max());
            assert!((elo - lo).abs() < 1e-12 * hi && (ehi - hi).abs() < 1e-12 * hi);
            let cc = collinear3(1.0, 1.0, al(a)).unwrap();
            assert!((cc.b - (g + 2.0 / g)).abs() < 1e-13 * cc.b);
        }
    }

    #[test]
    fn phi_at_zero_exact() {
        // Σ_{j=1}^{N−1} 1/sin²(jπ/N) = (N²−1)/3
        for n in 4..=64 {
            let p = phi(n, 0.0).unwrap();
            assert!((p - (n as f64 + 1.0) / 6.0).abs() < 1e-12 * n as f64);
        }
    }

    #[test]
    fn psi_small_n_exact() {
        let (p4, _) = psi_phi(4, 0.0).unwrap();
        assert!((p4 - 4.0 / 3.0).abs() < 1e-14);
        let (p5, _) = psi_phi(5, 0.0).unwrap();
        assert!((p5 - (25.0 + 5f64.sqrt()) / 20.0).abs() < 1e-14);
        // the exact value sits well below (6√5−1)/(5(√5−1)) ≈ 2.009
        assert!(p5 > 9.0 / 8.0);
    }

    #[test]
    fn psi_matches_matrix_oracle() {
        for n in [4usize, 5, 7, 12] {
            for &a in &[0.4, 1.0, 1.5] {
                let cc = ngon(n, al(a), 3).unwrap();
                let amat = matrix_a(&cc.s0, &cc.masses, cc.alpha).unwrap();
                let w = DVector::from_vec(standard_w(n));
                let q = w.dot(&(&amat * &w));
                let r = crate::central::ngon_distances(n);
                let sig: f64 = r.iter().map(|x| x.powf(-a)).sum();
                let oracle = 2.0 / n as f64 * q / sig;
                let (psi, _) = psi_phi(n, a).unwrap();
                assert!((psi - oracle).abs() < 1e-12 * psi);
                assert!((psi_for_w(n, a, &standard_w(n)).unwrap() - psi).abs() < 1e-12 * psi);
                if n >= 5 {
                    for i in 0..n {
                        let s = psi_for_w(n, a, &adjacent_pair_w(n, i)).unwrap();
                        assert!((s - psi).abs() < 1e-12 * psi);
                    }
                }
                let u = potential(&cc.s0, &cc.masses, cc.alpha).unwrap();
                assert!((u - n as f64 / 2.0 * sig).abs() < 1e-12 * u);
            }
        }
    }

    #[test]
    fn ngon_threshold_below_one() {
        for n in [4usize, 5, 6, 10, 33] {
            let t = ngon_threshold(n).unwrap();
            assert!(t.alpha_star.unwrap() < 1.0);
            assert_eq!(t.crossings, 1);
        }
        assert!(matches!(ngon_threshold(3), Err(NcolError::InvalidN(3))));
    }

    #[test]
    fn ngon_spatial_criterion_at_newton() {
        for n in 4..=8 {
            let cc = ngon(n, al(1.0), 3).unwrap();
            assert!(check_rel_eigen(&cc).unwrap().0, "N = {n}");
        }
    }

    #[test]
    fn hiphop_positive_and_comp1() {
        for n in (6..=20).step_by(2) {
            assert!(hiphop_g(n, 1.0).unwrap() > 0.0);
            let cc = ngon(n, al(1.0), 3).unwrap();
            let a = matrix_a(&cc.s0, &cc.masses, cc.alpha).unwrap();
            let mut lhs = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    lhs += s * a[(i, j)];
                }
            }
            lhs /= n as f64;
            assert!(lhs > g_alpha(1.0) * cc.b);
        }
        assert!(hiphop_g(7, 1.0).is_err());
        assert!(hiphop_g(4, 1.0).is_err());
    }

    #[test]
    fn scemo_monotone_for_polygons() {
        let xs = linspace(0.0, 2.0, 999);
        for n in 4..=64 {
            let b = ngon_bases(n);
            assert!(b.windows(2).all(|w| w[0] > w[1]) && *b.last().unwrap() > 1.0);
            // odd N pairs every distance; even N adds the diameter, r̃ = 1
            let h = |x: f64| if n % 2 == 1 { scemo_f(&b, x) } else { scemo_g(&b, x) };
            for w in xs.windows(2) {
                assert!(h(w[1]) > h(w[0]), "N = {n}");
            }
        }
    }

    #[test]
    fn sweep_rows_in_order() {
        let rows = sweep(SweepFamily::CollinearEqual, &[0.5, 1.0]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[2].alpha, 1.0);
        assert_eq!(rows[2].rhs, 1.125);
        assert_eq!(rows[3].family, "collinear3-B");
        let g = figure1_grid();
        assert!(g.contains(&1.0) && g[0] == 0.05 && *g.last().unwrap() < 2.0);
    }
}
