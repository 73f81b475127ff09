use proptest::prelude::*;
use std::f64::consts::PI;
use wdirichlet::capacity::{assemble_form, capacity_with_form, grid_spacing, variational_capacity};
use wdirichlet::cyclicity::cyclic_distance;
use wdirichlet::dirichlet::{bregman_f, phi_entropy};
use wdirichlet::measure::{BoundaryMeasure, DiscAtom, DiscMeasure, SuperharmonicWeight};
use wdirichlet::outer::{cutoff_max, cutoff_min, BoundaryLogModulus, Holomorphic, OuterFunction};
use wdirichlet::potentials::{f_mu_profile, green_potential, poisson_integral, v_mu};
use wdirichlet::sets::{Arc, BoundarySet};
use wdirichlet::C64;

fn atom() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..0.95f64, 0.0..2.0 * PI, 0.01..3.0f64)
}

fn atoms(max: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec(atom(), 1..=max)
}

fn measure(a: &[(f64, f64, f64)]) -> DiscMeasure {
    DiscMeasure::atoms(a.iter().map(|&(r, t, m)| DiscAtom::polar(r, t, m).unwrap()).collect()).unwrap()
}

fn disc_point() -> impl Strategy<Value = C64> {
    (0.0..0.99f64, 0.0..2.0 * PI).prop_map(|(r, t)| C64::from_polar(r, t))
}

/// Trigonometric log modulus with a few random modes.
fn log_modulus(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.8..0.8f64, 5).prop_map(move |c| {
        (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                c[0] + c[1] * t.cos() + c[2] * t.sin() + c[3] * (2.0 * t).cos() + c[4] * (3.0 * t).sin()
            })
            .collect()
    })
}

fn arc() -> impl Strategy<Value = Arc> {
    (0.0..2.0 * PI, 3.0..7.0f64).prop_map(|(c, k)| Arc::centered(c, 2f64.powf(-k)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn riesz_moment_is_additive(a in atoms(5), b in atoms(5)) {
        let joint: Vec<_> = a.iter().chain(&b).cloned().collect();
        let lhs = measure(&joint).riesz_moment().unwrap();
        let rhs = measure(&a).riesz_moment().unwrap() + measure(&b).riesz_moment().unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn arc_length_has_constant_poisson_integral(z in disc_point()) {
        let nu = BoundaryMeasure::arc_length();
        prop_assert!((poisson_integral(&nu, z) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn v_mu_crude_bound(a in atoms(4), z in disc_point()) {
        let mu = measure(&a);
        let bound = (1.0 + z.norm()) / (1.0 - z.norm()) * mu.riesz_moment().unwrap();
        prop_assert!(v_mu(&mu, z) <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn green_potential_is_superharmonic(a in atoms(3), z in disc_point(), rad in 0.001..0.05f64) {
        let mu = measure(&a);
        let rad = rad.min(0.5 * (1.0 - z.norm()));
        let center = green_potential(&mu, z);
        let n = 512;
        let avg: f64 = (0..n)
            .map(|j| green_potential(&mu, z + C64::from_polar(rad, 2.0 * PI * (j as f64 + 0.5) / n as f64)))
            .sum::<f64>() / n as f64;
        prop_assert!(!center.is_finite() || avg <= center + 1e-6 * center.abs().max(1.0));
    }

    #[test]
    fn radial_profile_is_comparable_to_v_mu(a in atoms(4), theta in 0.0..2.0 * PI) {
        let mu = measure(&a);
        let zeta = C64::from_polar(1.0, theta);
        for k in 1..=20 {
            let y = 0.5f64.powi(k);
            let f = f_mu_profile(&mu, y, theta);
            let v = y * v_mu(&mu, zeta * (1.0 - y));
            prop_assert!(f > 0.0 && v > 0.0);
            let ratio = f / v;
            // an atom at the origin seen from the antipode gives 1/(2(1+π²)) as y → 0
            prop_assert!((1.0 / 32.0..=16.0).contains(&ratio), "y = {}: ratio {}", y, ratio);
        }
    }

    #[test]
    fn bregman_is_nonnegative(x in -20.0..20.0f64, y in -20.0..20.0f64) {
        prop_assert!(bregman_f(x, y) >= -1e-12 * x.exp().max(y.exp()));
        prop_assert!(bregman_f(x, x).abs() <= 1e-12 * x.exp());
    }

    #[test]
    fn entropy_is_the_minimum_over_shifts(u in prop::collection::vec(-3.0..3.0f64, 2..10), raw in prop::collection::vec(0.05..1.0f64, 10), shift in -1.0..1.0f64) {
        let m = u.len();
        let total: f64 = raw[..m].iter().sum();
        let sigma: Vec<f64> = raw[..m].iter().map(|s| s / total).collect();
        let ent = phi_entropy(&sigma, &u);
        prop_assert!(ent >= -1e-12);
        let mean: f64 = sigma.iter().zip(&u).map(|(s, x)| s * x).sum();
        let at = |a: f64| sigma.iter().zip(&u).map(|(s, x)| s * bregman_f(*x, a)).sum::<f64>();
        prop_assert!((at(mean) - ent).abs() <= 1e-10 * ent.max(1.0));
        prop_assert!(at(mean) <= at(mean + shift) + 1e-12);
    }

    #[test]
    fn outer_functions_multiply(h1 in log_modulus(128), h2 in log_modulus(128), z in disc_point()) {
        let z = z * 0.9;
        let f = OuterFunction::from_log_modulus(BoundaryLogModulus::new(h1.clone()).unwrap()).unwrap();
        let g = OuterFunction::from_log_modulus(BoundaryLogModulus::new(h2.clone()).unwrap()).unwrap();
        let sum: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| a + b).collect();
        let fg = OuterFunction::from_log_modulus(BoundaryLogModulus::new(sum).unwrap()).unwrap();
        let lhs = fg.eval(z);
        let rhs = f.eval(z) * g.eval(z);
        prop_assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm());
        let mean = h1.iter().sum::<f64>() / h1.len() as f64;
        prop_assert!((f.value_at_zero() - mean.exp()).abs() <= 1e-10 * mean.exp());
    }

    #[test]
    fn cutoffs_form_a_lattice(h1 in log_modulus(64), h2 in log_modulus(64), h3 in log_modulus(64)) {
        let mk = |h: &Vec<f64>| OuterFunction::from_log_modulus(BoundaryLogModulus::new(h.clone()).unwrap()).unwrap();
        let (f, g, k) = (mk(&h1), mk(&h2), mk(&h3));
        let s = |o: &OuterFunction| o.log_modulus().samples().to_vec();
        prop_assert_eq!(s(&cutoff_min(&f, &g).unwrap()), s(&cutoff_min(&g, &f).unwrap()));
        prop_assert_eq!(s(&cutoff_max(&f, &g).unwrap()), s(&cutoff_max(&g, &f).unwrap()));
        prop_assert_eq!(
            s(&cutoff_min(&cutoff_min(&f, &g).unwrap(), &k).unwrap()),
            s(&cutoff_min(&f, &cutoff_min(&g, &k).unwrap()).unwrap())
        );
        prop_assert_eq!(s(&cutoff_max(&f, &f).unwrap()), s(&f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn capacity_is_monotone_and_subadditive(a in arc(), b in arc(), central in any::<bool>()) {
        let w = if central {
            SuperharmonicWeight::disc_only(DiscMeasure::point(C64::new(0.0, 0.0), 1.0).unwrap())
        } else {
            SuperharmonicWeight::classical()
        };
        let q = assemble_form(&w, 256).unwrap();
        let cap = |arcs: Vec<Arc>| capacity_with_form(&q, &BoundarySet::Arcs(arcs), 0.0).unwrap().value;
        let (ca, cb, cab) = (cap(vec![a]), cap(vec![b]), cap(vec![a, b]));
        prop_assert!(ca <= cab * 1.02 + 1e-12, "monotone: {} > {}", ca, cab);
        prop_assert!(cab <= (ca + cb) * 1.02 + 1e-12, "subadditive: {} > {} + {}", cab, ca, cb);
    }

    #[test]
    fn capacity_is_stable_under_grid_doubling(node in 0usize..64, k in 3i32..=6) {
        let e = BoundarySet::arc(Arc::new(2.0 * PI * node as f64 / 64.0, 2.0 * PI * 2f64.powi(-k)).unwrap());
        let w = SuperharmonicWeight::disc_only(DiscMeasure::point(C64::new(0.0, 0.0), 1.0).unwrap());
        let c1 = variational_capacity(&e, 0.0, &w, 1024).unwrap().value;
        let c2 = variational_capacity(&e, 0.0, &w, 2048).unwrap().value;
        prop_assert!((c1 - c2).abs() < 0.05 * c2, "{} vs {}", c1, c2);
    }

    #[test]
    fn distance_curves_never_increase(a in atoms(2), h in log_modulus(128)) {
        let w = SuperharmonicWeight::disc_only(measure(&a));
        let f = Holomorphic::Outer(OuterFunction::from_log_modulus(BoundaryLogModulus::new(h).unwrap()).unwrap());
        let curve = cyclic_distance(&f, &w, 24).unwrap();
        prop_assert!(curve.is_nonincreasing(1e-9));
        prop_assert!(curve.distances[0] <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// A point carries no capacity when μ is finite: c at t = one grid step shrinks as N grows.
    #[test]
    fn point_capacity_vanishes_for_finite_atomic_weights(a in atoms(2), theta in 0.0..2.0 * PI) {
        let w = SuperharmonicWeight::disc_only(measure(&a));
        let e = BoundarySet::point(theta);
        let caps: Vec<f64> = [256usize, 1024, 4096]
            .iter()
            .map(|&n| variational_capacity(&e, grid_spacing(n), &w, n).unwrap().value)
            .collect();
        prop_assert!(caps[1] < caps[0] && caps[2] < caps[1], "{:?}", caps);
        prop_assert!(caps[2] < 0.25 * caps[0], "{:?}", caps);
    }
}
