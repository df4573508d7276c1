use std::sync::OnceLock;

use proptest::prelude::*;

use ncol::central::{collinear3, ngon, shape_distance};
use ncol::io::ConfigFile;
use ncol::mcgehee::{energy, energy_scaled, from_mcgehee, homothetic_initial, integrate_el, to_mcgehee, SimOptions, Trajectory};
use ncol::morse::{
    quadratic_q, second_variation_s, BumpVariation, Combination, Profile, QuadOptions, RhoWeighted, ScalarBump,
    VariationPath,
};
use ncol::nbody::{
    bilinear, gradient, hessian_constrained, hessian_full, mass_inner, potential, project_tangent,
};
use ncol::roots::bisect;
use ncol::spectral::{criterion_offset, hiphop_g, psi_phi, smallest_eigenvalue, SpectralReport};
use ncol::weak::{esplode1_quantity, hat_zero_initial, scaled_potentials, scaling_pair};
use ncol::{Alpha, Configuration, MassVector, TangentVector};

fn al(a: f64) -> Alpha {
    Alpha::new(a).unwrap()
}

/// Bodies in the plane, pairwise distances at least 0.2.
fn planar_bodies() -> impl Strategy<Value = (Configuration, MassVector)> {
    (2usize..=5)
        .prop_flat_map(|n| (prop::collection::vec(-2.0..2.0f64, 2 * n), prop::collection::vec(0.3..3.0f64, n)))
        .prop_map(|(x, m)| (Configuration::new(2, x).unwrap(), MassVector::new(m).unwrap()))
        .prop_filter("near collision", |(x, _)| x.min_distance() >= 0.2)
}

fn alpha() -> impl Strategy<Value = f64> {
    0.05..1.95f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_is_homogeneous((x, m) in planar_bodies(), a in alpha(), lam in 0.2..5.0f64) {
        let u = potential(&x, &m, al(a)).unwrap();
        let ul = potential(&x.scaled(lam), &m, al(a)).unwrap();
        prop_assert!((ul - lam.powf(-a) * u).abs() < 1e-12 * ul.abs().max(1.0));
        let g = gradient(&x, &m, al(a)).unwrap();
        let euler: f64 = g.iter().zip(x.flat()).map(|(p, q)| p * q).sum();
        prop_assert!((euler + a * u).abs() < 1e-10 * u.max(1.0));
    }

    #[test]
    fn hessian_matches_gradient_differences((x, m) in planar_bodies(), a in alpha()) {
        let h = hessian_full(&x, &m, al(a)).unwrap();
        let nd = x.flat().len();
        let step = 1e-5;
        let mut err = 0.0;
        for k in 0..nd {
            let (mut p, mut q) = (x.flat().to_vec(), x.flat().to_vec());
            p[k] += step;
            q[k] -= step;
            let gp = gradient(&Configuration::new(2, p).unwrap(), &m, al(a)).unwrap();
            let gq = gradient(&Configuration::new(2, q).unwrap(), &m, al(a)).unwrap();
            for j in 0..nd {
                err += ((gp[j] - gq[j]) / (2.0 * step) - h[(j, k)]).powi(2);
                prop_assert!((h[(j, k)] - h[(k, j)]).abs() < 1e-12 * h.norm());
            }
        }
        prop_assert!(err.sqrt() < 1e-5 * h.norm());
    }

    #[test]
    fn translations_are_in_the_hessian_kernel((x, m) in planar_bodies(), a in alpha(), t in (-1.0..1.0f64, -1.0..1.0f64)) {
        let h = hessian_full(&x, &m, al(a)).unwrap();
        let v: Vec<f64> = (0..m.len()).flat_map(|_| [t.0, t.1]).collect();
        let w: Vec<f64> = (0..v.len()).map(|k| (k as f64).sin()).collect();
        prop_assert!(bilinear(&h, &v, &w).abs() < 1e-10 * h.norm());
    }

    #[test]
    fn collision_coordinates_round_trip(
        (x, m) in planar_bodies(),
        a in alpha(),
        vel in prop::collection::vec(-1.0..1.0f64, 10),
    ) {
        let nd = x.flat().len();
        let xd = TangentVector::new(2, vel[..nd].to_vec()).unwrap();
        let st = to_mcgehee(&x, &xd, &m, al(a)).unwrap();
        prop_assert!((mass_inner(&m, 2, st.s.flat(), st.s.flat()) - 1.0).abs() < 1e-12);
        let (x2, xd2) = from_mcgehee(&st, al(a));
        for (p, q) in x.flat().iter().zip(x2.flat()).chain(xd.flat().iter().zip(xd2.flat())) {
            prop_assert!((p - q).abs() < 1e-11 * (1.0 + p.abs()));
        }
        let cart = 0.5 * mass_inner(&m, 2, xd.flat(), xd.flat()) - potential(&x, &m, al(a)).unwrap();
        prop_assert!((energy(&st, &m, al(a)).unwrap() - cart).abs() < 1e-9 * (1.0 + cart.abs()));
    }

    #[test]
    fn collinear_family_is_central(m1 in 0.1..50.0f64, m2 in 0.1..50.0f64, a in alpha()) {
        let cc = collinear3(m1, m2, al(a)).unwrap();
        prop_assert!(cc.residual < 1e-9 * (cc.alpha.get() * cc.b * m1.sqrt()).max(1.0));
        prop_assert!(cc.residual <= cc.residual_tolerance());
        prop_assert!((mass_inner(&cc.masses, cc.dim(), cc.s0.flat(), cc.s0.flat()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_minimum_bounds_rayleigh_quotients(a in alpha(), raw in prop::collection::vec(-1.0..1.0f64, 6)) {
        let cc = collinear3(1.0, 1.0, al(a)).unwrap();
        let rep = smallest_eigenvalue(&cc).unwrap();
        prop_assert!((rep.margin - rep.mu1 - criterion_offset(a, cc.b)).abs() < 1e-12 * cc.b);
        let v = project_tangent(&cc.s0, &cc.masses, &raw);
        let n2: f64 = v.flat().iter().map(|x| x * x).sum();
        prop_assume!(n2 > 1e-6);
        let q = hessian_constrained(&cc.s0, &cc.masses, cc.alpha, &v).unwrap() / n2;
        prop_assert!(q >= rep.mu1 - 1e-9 * cc.b);
    }

    #[test]
    fn polygon_quantities(n in 4usize..40, a in 0.0..2.0f64, b in 0.0..2.0f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(psi_phi(n, lo).unwrap().0 < psi_phi(n, hi).unwrap().0);
        let even = 6 + 2 * (n % 30);
        prop_assert!(hiphop_g(even, a).unwrap() > 0.0);
    }

    #[test]
    fn polygon_file_round_trip(n in 3usize..12, a in alpha(), dim in 2usize..=3) {
        let cc = ngon(n, al(a), dim).unwrap();
        let text = serde_json::to_string(&ConfigFile::from_central(&cc)).unwrap();
        let back = ConfigFile::read(text.as_bytes()).unwrap().to_central().unwrap();
        prop_assert!(shape_distance(&back.s0, &cc.s0) < 1e-14);
        prop_assert!((back.b - cc.b).abs() < 1e-14 * cc.b);
    }

    #[test]
    fn bisection_brackets_a_root(r in -5.0..5.0f64, k in 0.1..10.0f64) {
        let f = |x: f64| k * (x - r) * (1.0 + (x - r).powi(2));
        let x = bisect(f, -6.0, 6.0).unwrap();
        prop_assert!((x - r).abs() < 1e-12);
    }

    #[test]
    fn weak_potential_approaches_log((x, m) in planar_bodies(), a in 1e-6..0.1f64) {
        let p = scaled_potentials(&x, &m, al(a)).unwrap();
        let ms = m.as_slice();
        let mut bound = 0.0;
        for i in 0..ms.len() {
            for j in i + 1..ms.len() {
                bound += ms[i] * ms[j] * x.distance(i, j).ln().powi(2);
            }
        }
        // |expm1(−αL)/α + L| ≤ αL²/2·e^{α|L|}
        prop_assert!((p.hat - p.log).abs() <= 0.5 * a * bound * 1.5 + 1e-12);
        prop_assert!((p.tilde - potential(&x, &m, al(a)).unwrap() / a).abs() < 1e-12 * p.tilde);
    }

    #[test]
    fn scaled_action_identity(a in alpha(), wiggle in prop::collection::vec(-0.3..0.3f64, 6)) {
        let m = MassVector::unit(3).unwrap();
        let path: Vec<Configuration> = (0..40)
            .map(|k| {
                let t = k as f64 * 0.025;
                let base = [-1.0, 0.0, 0.2, 0.9, 1.1, -0.3];
                Configuration::new(2, base.iter().zip(&wiggle).map(|(b, w)| b + w * t).collect()).unwrap()
            })
            .collect();
        let (lhs, rhs) = scaling_pair(&path, 0.025, &m, al(a)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-11 * rhs.abs());
    }

    #[test]
    fn hat_energy_vanishes_initially(a in 0.01..1.0f64, size in 0.0..0.3f64) {
        let cc = collinear3(1.0, 1.0, al(a)).unwrap();
        let v = project_tangent(&cc.s0, &cc.masses, &[0.3, 1.0, 0.0, -0.5, -0.3, -0.5]);
        let nv = mass_inner(&cc.masses, 2, v.flat(), v.flat()).sqrt();
        let sp = TangentVector::new(2, v.flat().iter().map(|x| size * x / nv).collect()).unwrap();
        let st = hat_zero_initial(&cc.s0, &sp, &cc.masses, al(a)).unwrap();
        prop_assert!(st.rho_prime < 0.0);
        let h = energy_scaled(&st, &cc.masses, al(a), 1.0 / a).unwrap() + cc.masses.pair_sum() / a;
        prop_assert!(h.abs() < 1e-10 * (1.0 + cc.masses.pair_sum() / a));
    }

    #[test]
    fn esplode1_quantity_grows_as_rho_shrinks(a in 0.01..1.9f64, u in -30.0..-0.01f64, du in 0.01..5.0f64) {
        // saturates at 1/γ once ρ^γ underflows
        let g = 4.0 * a / (2.0 - a);
        let (q0, q1) = (esplode1_quantity(a, u), esplode1_quantity(a, u - du));
        prop_assert!(q1 >= q0 && q0 > 0.0 && q1 <= 1.0 / g);
        if g * u > -30.0 {
            prop_assert!(q1 > q0);
        }
    }
}

// ---- second variation along one stored collision run ----------------

fn newton_run() -> &'static (Trajectory, SpectralReport) {
    static RUN: OnceLock<(Trajectory, SpectralReport)> = OnceLock::new();
    RUN.get_or_init(|| {
        let cc = collinear3(1.0, 1.0, al(1.0)).unwrap();
        let rep = smallest_eigenvalue(&cc).unwrap();
        let init = homothetic_initial(&cc, 0.3, 1.0).unwrap();
        let opts = SimOptions { tau_max: 40.0, rho_min: None, ..Default::default() };
        (integrate_el(&init, &cc.masses, cc.alpha, &opts).unwrap(), rep)
    })
}

fn bump() -> impl Strategy<Value = ScalarBump> {
    (0.2..2.0f64, 2.0..12.0f64, 0.0..20.0f64, prop::option::of(0.0..0.9f64)).prop_map(|(l1, len, shift, flat)| {
        let profile = flat.map_or(Profile::Exp, |f| Profile::FlatTop { flat: f });
        ScalarBump::new(l1, l1 + len, shift, profile).unwrap()
    })
}

fn direction() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 6)
}

fn variation(b: ScalarBump, raw: &[f64]) -> Option<BumpVariation> {
    let (traj, _) = newton_run();
    let xi = project_tangent(&traj.s(0), &traj.masses, raw);
    BumpVariation::new(b, &xi, &traj.masses).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn substitution_matches_angular_form(b in bump(), raw in direction()) {
        let Some(v) = variation(b, &raw) else { return Ok(()) };
        let (traj, _) = newton_run();
        let quad = QuadOptions::default();
        let q = quadratic_q(traj, &RhoWeighted(&v), &quad).unwrap().q;
        let s = second_variation_s(traj, &v, &quad).unwrap();
        prop_assert!((q - s).abs() < 1e-6 * s.abs().max(1.0), "{q} vs {s}");
    }

    #[test]
    fn second_variation_is_quadratic(b in bump(), raw in direction(), c in -3.0..3.0f64) {
        let Some(v) = variation(b, &raw) else { return Ok(()) };
        let (traj, _) = newton_run();
        let quad = QuadOptions::default();
        let q1 = quadratic_q(traj, &v, &quad).unwrap().q;
        let scaled = Combination { terms: vec![(c, &v as &dyn VariationPath)] };
        let qc = quadratic_q(traj, &scaled, &quad).unwrap().q;
        prop_assert!((qc - c * c * q1).abs() < 1e-6 * (c * c * q1).abs().max(1.0));
    }

    #[test]
    fn disjoint_supports_add(b1 in bump(), gap in 0.0..3.0f64, raw1 in direction(), raw2 in direction()) {
        let b2 = ScalarBump::new(b1.l1, b1.l2.min(b1.l1 + 6.0), b1.l2 + b1.shift - b1.l1 + gap, b1.profile).unwrap();
        prop_assume!(b2.l2 + b2.shift < 39.0);
        let (Some(v1), Some(v2)) = (variation(b1, &raw1), variation(b2, &raw2)) else { return Ok(()) };
        let (traj, _) = newton_run();
        let quad = QuadOptions::default();
        let both = Combination { terms: vec![(1.0, &v1 as &dyn VariationPath), (1.0, &v2)] };
        let q = quadratic_q(traj, &both, &quad).unwrap().q;
        let q1 = quadratic_q(traj, &v1, &quad).unwrap().q;
        let q2 = quadratic_q(traj, &v2, &quad).unwrap().q;
        prop_assert!((q - q1 - q2).abs() < 1e-6 * (q1.abs() + q2.abs()).max(1.0));
    }
}
