//! Randomized and exhaustive property suites behind `wdir verify`.
//!
//! Every suite draws from a ChaCha stream seeded by (seed, suite) and walks its trials in
//! order, so a report depends only on the scenario and the seed.

use crate::capacity::{
    assemble_form, capacity_with_form, strong_type_check, weak_type_check, DirichletFormMatrix,
};
use crate::config::{build_function, FunctionSpec, Scenario};
use crate::cyclicity::cyclic_distance;
use crate::dirichlet::{
    bregman_minmax_violations, bregman_square_violations, dirichlet, dirichlet_area, douglas_type_form,
    entropy_cutoff_margins, relative_spread,
};
use crate::error::{Error, Result};
use crate::measure::{BoundaryMeasure, DiscAtom, DiscMeasure, SuperharmonicWeight};
use crate::outer::{cutoff_max, cutoff_min, random_smooth, wedge_square, Holomorphic, OuterFunction};
use crate::sets::{Arc, BoundarySet};
use crate::C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub const SUITES: &[&str] = &["bregman", "cutoff", "routes", "capacity", "cyclicity"];

/// Relative slack granted to quadrature-level inequalities.
pub const QUADRATURE_SLACK: f64 = 0.01;
/// Absolute tolerance of the exact-arithmetic lemmas.
pub const EXACT_TOL: f64 = 1e-12;
/// Distance every finite-μ curve must reach.
pub const CYCLIC_THRESHOLD: f64 = 0.1;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub violations: usize,
    pub statistics: BTreeMap<String, f64>,
    /// First violating instance, if any.
    pub violation: Option<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.to_string(), cases: 0, violations: 0, statistics: BTreeMap::new(), violation: None }
    }

    fn check(&mut self, ok: bool, instance: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.violation.is_none() {
                self.violation = Some(instance());
            }
        }
    }

    fn record_max(&mut self, key: &str, v: f64) {
        let e = self.statistics.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        if v > *e || v.is_nan() {
            *e = v;
        }
    }

    fn record(&mut self, key: &str, v: f64) {
        self.statistics.insert(key.to_string(), v);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub trials: usize,
    pub grid: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub suites: Vec<SuiteReport>,
    pub passed: usize,
    pub failed: usize,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// Pretty JSON with a trailing newline; floats print in shortest round-trip form.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn suite_rng(seed: u64, suite: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = SUITES.iter().position(|s| *s == suite).unwrap_or(SUITES.len()) as u64;
    rng.set_stream(idx + 1);
    rng
}

/// Run `suite` ("all" runs every suite in order).
pub fn run_verify(sc: &Scenario, suite: &str, seed: u64, trials: usize, command: &str, digest: &str) -> Result<RunReport> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::Invalid(format!("unknown suite `{suite}` (bregman, cutoff, routes, capacity, cyclicity, all)")));
    };
    let mut suites = Vec::new();
    for name in names {
        let mut rng = suite_rng(seed, name);
        let r = match name {
            "bregman" => bregman_suite(&mut rng, trials),
            "cutoff" => cutoff_suite(&mut rng, sc, trials)?,
            "routes" => routes_suite(&mut rng, sc, trials)?,
            "capacity" => capacity_suite(&mut rng, sc, trials)?,
            _ => cyclicity_suite(&mut rng, sc, trials)?,
        };
        suites.push(r);
    }
    let failed = suites.iter().filter(|s| !s.passed()).count();
    let mut tolerances = BTreeMap::new();
    tolerances.insert("exact".to_string(), EXACT_TOL);
    tolerances.insert("quadrature_slack".to_string(), QUADRATURE_SLACK);
    tolerances.insert("route_agreement".to_string(), sc.run.tolerance);
    tolerances.insert("cyclic_threshold".to_string(), CYCLIC_THRESHOLD);
    Ok(RunReport {
        command: command.to_string(),
        config_digest: digest.to_string(),
        seed,
        trials,
        grid: sc.run.grid,
        tolerances,
        passed: suites.len() - failed,
        failed,
        suites,
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Bregman min-max lemma on a 20⁴ grid, the F(g(x),g(y)) ≤ 4F(x,y) lemma on a 40² grid and the
/// probability-space cut-off lemma on random discrete σ.
pub fn bregman_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut r = SuiteReport::new("bregman");
    let g20 = linspace(-4.0, 4.0, 20);
    let bad = bregman_minmax_violations(&g20, EXACT_TOL);
    r.check(bad == 0, || format!("min-max lemma: {bad} violations on linspace(-4, 4, 20)^4"));
    let g40 = linspace(-4.0, 4.0, 40);
    let bad = bregman_square_violations(&g40, EXACT_TOL);
    r.check(bad == 0, || format!("square lemma: {bad} violations on linspace(-4, 4, 40)^2"));
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let m = rng.gen_range(2..=12);
        let mut sigma: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = sigma.iter().sum();
        sigma.iter_mut().for_each(|x| *x /= s);
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let margins = entropy_cutoff_margins(&sigma, &u, &v);
        let top = margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(top);
        r.check(top <= EXACT_TOL, || format!("entropy cut-off: sigma={sigma:?} u={u:?} v={v:?} margins={margins:?}"));
    }
    r.record("max_entropy_margin", worst);
    r
}

/// Weight rotation used by the randomized suites: the configured weight, then harmonic, atomic
/// and mixed random weights.
pub fn random_weight(rng: &mut ChaCha8Rng, sc: &Scenario, i: usize) -> Result<(String, SuperharmonicWeight)> {
    Ok(match i % 4 {
        0 => (sc.family.clone(), sc.weight.clone()),
        1 => {
            let a = rng.gen_range(0.0..2.0 * PI);
            let m = rng.gen_range(0.5..2.0);
            (format!("harmonic({a:.6},{m:.6})"), SuperharmonicWeight::harmonic_point(a, m)?)
        }
        2 => {
            let z = C64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..2.0 * PI));
            let m = rng.gen_range(0.5..2.0);
            (format!("atomic({:.6}{:+.6}i,{m:.6})", z.re, z.im), SuperharmonicWeight::disc_only(DiscMeasure::point(z, m)?))
        }
        _ => {
            let z = C64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..2.0 * PI));
            let a = rng.gen_range(0.0..2.0 * PI);
            let mu = DiscMeasure::atoms(vec![DiscAtom::at(z, rng.gen_range(0.1..1.0))?])?;
            let nu = BoundaryMeasure::new(vec![(a, rng.gen_range(0.1..1.0))], Some(vec![rng.gen_range(0.1..1.0)]))?;
            (format!("mixed({:.6}{:+.6}i,{a:.6})", z.re, z.im), SuperharmonicWeight::new(mu, nu))
        }
    })
}

fn random_outer(rng: &mut ChaCha8Rng, n: usize) -> Result<OuterFunction> {
    let modes = rng.gen_range(2..=6);
    let amp = rng.gen_range(0.3..1.2);
    random_smooth(rng, n, modes, amp)
}

/// D_ω(f∧g), D_ω(f∨g) ≤ D_ω(f)+D_ω(g) and D_ω(f∧f²) ≤ 4D_ω(f) on random triples.
pub fn cutoff_suite(rng: &mut ChaCha8Rng, sc: &Scenario, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("cutoff");
    let n = sc.run.grid;
    let bound = 1.0 + QUADRATURE_SLACK;
    for i in 0..trials {
        let f = random_outer(rng, n)?;
        let g = random_outer(rng, n)?;
        let (wname, w) = random_weight(rng, sc, i)?;
        let d = |h: OuterFunction| dirichlet_area(&Holomorphic::Outer(h), &w).value();
        let df = d(f.clone());
        let dg = d(g.clone());
        let dmin = d(cutoff_min(&f, &g)?);
        let dmax = d(cutoff_max(&f, &g)?);
        let dsq = d(wedge_square(&f)?);
        let sum = df + dg;
        let ratios = [dmin / sum, dmax / sum, if df > 0.0 { dsq / (4.0 * df) } else { 0.0 }];
        for (k, label) in ["min", "max", "square"].iter().enumerate() {
            r.check(ratios[k] <= bound, || {
                format!("trial {i} weight {wname}: {label} ratio {} (D f={df}, D g={dg}, min={dmin}, max={dmax}, sq={dsq})", ratios[k])
            });
        }
        r.record_max("max_slack", ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        if df > 0.0 {
            r.record_max("max_square_constant", dsq / df);
        }
    }
    Ok(r)
}

/// The three Dirichlet routes and the Douglas-type form agree within the run tolerance.
pub fn routes_suite(rng: &mut ChaCha8Rng, sc: &Scenario, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("routes");
    let n = sc.run.grid;
    r.record("max_spread", 0.0);
    for i in 0..trials {
        let f = match &sc.function {
            Some(FunctionSpec::RandomSmooth { modes, amplitude, .. }) => {
                Holomorphic::Outer(random_smooth(rng, n, *modes, *amplitude)?)
            }
            Some(spec) => build_function(spec, sc.set.as_ref(), n)?,
            None => Holomorphic::Outer(random_outer(rng, n)?),
        };
        let (wname, w) = random_weight(rng, sc, i)?;
        let routes = dirichlet(&f, &w);
        let mut v = routes.values();
        v.push(douglas_type_form(&f, &w).value());
        let spread = relative_spread(&v);
        // all-zero families (constants) agree trivially
        let ok = spread <= sc.run.tolerance || v.iter().all(|x| x.abs() <= EXACT_TOL);
        r.check(ok, || format!("trial {i} weight {wname}: values {v:?} spread {spread}"));
        r.record_max("max_spread", spread);
    }
    Ok(r)
}

fn random_arc(rng: &mut ChaCha8Rng) -> Result<Arc> {
    let m = 2f64.powf(-rng.gen_range(2.0..6.0));
    Arc::centered(rng.gen_range(0.0..2.0 * PI), m)
}

fn capacity_of(q: &DirichletFormMatrix, arcs: Vec<Arc>) -> Result<f64> {
    Ok(capacity_with_form(q, &BoundarySet::Arcs(arcs), 0.0)?.value)
}

/// Normalization, monotonicity, subadditivity and the weak- and strong-type inequalities.
pub fn capacity_suite(rng: &mut ChaCha8Rng, sc: &Scenario, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("capacity");
    let n = sc.run.grid;
    let weights = [
        (sc.family.clone(), sc.weight.clone()),
        ("atomic(0)".to_string(), SuperharmonicWeight::disc_only(DiscMeasure::point(C64::new(0.0, 0.0), 1.0)?)),
    ];
    let rel = 1e-6;
    for (wname, w) in &weights {
        let q = assemble_form(w, n)?;
        let circle = capacity_with_form(&q, &BoundarySet::Circle, 0.0)?.value;
        r.check((circle - 1.0).abs() <= 1e-9, || format!("weight {wname}: capacity of the circle {circle}"));
        let empty = capacity_with_form(&q, &BoundarySet::Empty, 0.0)?.value;
        r.check(empty == 0.0, || format!("weight {wname}: capacity of the empty set {empty}"));
        let mut weak_max: f64 = 0.0;
        let mut strong_max: f64 = 0.0;
        for i in 0..trials {
            let a = random_arc(rng)?;
            let b = random_arc(rng)?;
            let ca = capacity_of(&q, vec![a])?;
            let cb = capacity_of(&q, vec![b])?;
            let cab = capacity_of(&q, vec![a, b])?;
            r.check(ca <= cab * (1.0 + rel) + 1e-12, || {
                format!("weight {wname} trial {i}: monotonicity c({a:?})={ca} > c(∪)={cab}")
            });
            r.check(cab <= (ca + cb) * (1.0 + rel) + 1e-12, || {
                format!("weight {wname} trial {i}: subadditivity c(∪)={cab} > {ca}+{cb} for {a:?}, {b:?}")
            });
            let f = random_outer(rng, n)?;
            let samples: Vec<f64> = f.log_modulus().samples().iter().map(|h| h.exp()).collect();
            let sup = samples.iter().cloned().fold(0.0, f64::max);
            for frac in [0.5, 0.8] {
                let wt = weak_type_check(&q, &samples, frac * sup)?;
                weak_max = weak_max.max(wt.ratio);
                r.check(wt.ratio <= 1.0 + QUADRATURE_SLACK, || {
                    format!("weight {wname} trial {i}: weak type at level {}: {} > {}", wt.level, wt.capacity, wt.bound)
                });
            }
            let st = strong_type_check(&q, &samples)?;
            strong_max = strong_max.max(st.ratio);
            r.check(st.ratio.is_finite(), || format!("weight {wname} trial {i}: strong-type ratio {}", st.ratio));
        }
        r.record(&format!("weak_max_ratio[{wname}]"), weak_max);
        r.record(&format!("strong_constant[{wname}]"), strong_max);
    }
    Ok(r)
}

/// Finite atomic μ: distance curves of bounded outer functions are nonincreasing and fall below 0.1.
pub fn cyclicity_suite(rng: &mut ChaCha8Rng, sc: &Scenario, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("cyclicity");
    let degree = sc.degree;
    let n = 256;
    r.record("max_final_distance", 0.0);
    for i in 0..trials {
        let atoms = (0..rng.gen_range(1..=3))
            .map(|_| DiscAtom::at(C64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..2.0 * PI)), rng.gen_range(0.2..2.0)))
            .collect::<Result<Vec<_>>>()?;
        let w = SuperharmonicWeight::disc_only(DiscMeasure::atoms(atoms)?);
        let f = Holomorphic::Outer(random_outer(rng, n)?);
        let curve = cyclic_distance(&f, &w, degree)?;
        let last = curve.last();
        r.check(curve.is_nonincreasing(1e-9), || format!("trial {i}: distance curve increases: {:?}", curve.distances));
        r.check(last < CYCLIC_THRESHOLD, || format!("trial {i}: d({degree}) = {last}"));
        r.record_max("max_final_distance", last);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use std::path::Path;

    fn scenario(text: &str) -> Scenario {
        parse_config(text, Path::new(".")).unwrap()
    }

    #[test]
    fn bregman_suite_passes() {
        let mut rng = suite_rng(7, "bregman");
        let r = bregman_suite(&mut rng, 50);
        assert!(r.passed(), "{:?}", r.violation);
        assert_eq!(r.cases, 52);
    }

    #[test]
    fn constant_routes_pass_trivially() {
        let sc = scenario("[run]\ngrid = 256\n[function]\nkind = \"constant\"\nvalue = 2.0\n");
        let rep = run_verify(&sc, "routes", 1, 4, "verify", "-").unwrap();
        assert!(rep.ok());
        assert_eq!(rep.suites[0].statistics["max_spread"], 0.0);
    }

    #[test]
    fn reports_repeat_exactly() {
        let sc = scenario("[run]\ngrid = 128\n[cyclicity]\ndegree = 16\n");
        let a = run_verify(&sc, "all", 5, 2, "verify", "-").unwrap().render();
        let b = run_verify(&sc, "all", 5, 2, "verify", "-").unwrap().render();
        assert_eq!(a, b);
        let c = run_verify(&sc, "all", 6, 2, "verify", "-").unwrap().render();
        assert_ne!(a, c);
    }

    #[test]
    fn unknown_suite_is_an_error() {
        let sc = scenario("");
        assert!(run_verify(&sc, "nope", 1, 1, "verify", "-").is_err());
    }
}
