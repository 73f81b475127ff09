//! Cyclicity diagnostics: distance from 1 to polynomial multiples, the integral sufficient
//! conditions, and a constructed outer function vanishing on a polar set.

use crate::capacity::{condition_c, stieltjes_sums, tail_test, CapacitySource, ConditionCReport, SeriesVerdict, TailTest};
use crate::dirichlet::{dirichlet_area, CoefficientForm, Energy};
use crate::error::{invalid, Error, Result};
use crate::fourier;
use crate::measure::SuperharmonicWeight;
use crate::outer::{distance_outer, DistanceProfile, Holomorphic, OuterFunction};
use crate::quad;
use crate::sets::BoundarySet;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

pub const RIDGE: f64 = 1e-10;
pub const CONDITION_LIMIT: f64 = 1e14;

/// Taylor coefficients of f, trimmed where the remaining ℓ² tail is below 1e-28 of the total.
pub fn taylor_coefficients(f: &Holomorphic) -> Vec<C64> {
    let mut c = match f {
        Holomorphic::Polynomial(c) => c.clone(),
        Holomorphic::Outer(g) => {
            let n = g.n();
            let mut v = Holomorphic::Outer(g.clone()).ring(1.0, n, 0.0).f;
            fourier::fft(&mut v);
            v.truncate(n / 2);
            v.iter().map(|x| x / n as f64).collect()
        }
    };
    let total: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    let mut tail = 0.0;
    let mut keep = c.len();
    while keep > 1 {
        let t = tail + c[keep - 1].norm_sqr();
        if t > 1e-28 * total {
            break;
        }
        tail = t;
        keep -= 1;
    }
    c.truncate(keep.max(1));
    c
}

/// Normal equations for min over deg p ≤ n of ‖1 − pf‖ in D_ω.
#[derive(Clone, Debug)]
pub struct GramSystem {
    pub degree: usize,
    /// G_{jk} = ⟨z^k f, z^j f⟩.
    pub gram: DMatrix<C64>,
    /// b_j = ⟨1, z^j f⟩ conjugated, so the minimizer solves G c = b.
    pub rhs: DVector<C64>,
    pub unit_norm_sq: f64,
}

impl GramSystem {
    pub fn new(f: &Holomorphic, w: &SuperharmonicWeight, degree: usize) -> Result<Self> {
        let a = taylor_coefficients(f);
        if a.iter().all(|c| c.norm() == 0.0) {
            return invalid("cyclic distance of the zero function is undefined");
        }
        let len = a.len() + degree;
        let form = CoefficientForm::new(w, len);
        let mut v = DMatrix::<C64>::zeros(len, degree + 1);
        for j in 0..=degree {
            for (m, c) in a.iter().enumerate() {
                v[(m + j, j)] = *c;
            }
        }
        let mv = form.matrix() * &v;
        let gram = v.adjoint() * &mv;
        let rhs = DVector::from_iterator(degree + 1, (0..=degree).map(|j| mv[(0, j)].conj()));
        let unit_norm_sq = form.matrix()[(0, 0)].re;
        Ok(GramSystem { degree, gram, rhs, unit_norm_sq })
    }
}

#[derive(Clone, Debug)]
pub struct DistanceCurve {
    /// d(k) for k = 0..=degree, or fewer when truncated.
    pub distances: Vec<f64>,
    pub truncated_at: Option<usize>,
    /// Squared ratio of extreme Cholesky pivots at the last kept degree.
    pub condition: f64,
    pub ridge: f64,
}

impl DistanceCurve {
    pub fn last(&self) -> f64 {
        *self.distances.last().unwrap()
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.distances.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

pub fn distance_curve(sys: &GramSystem) -> Result<DistanceCurve> {
    let k = sys.degree + 1;
    let trace: f64 = (0..k).map(|i| sys.gram[(i, i)].re).sum();
    let ridge = RIDGE * trace;
    let mut g = sys.gram.clone();
    for i in 0..k {
        g[(i, i)] += C64::new(ridge, 0.0);
    }
    let chol = g.cholesky().ok_or_else(|| Error::Solver("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let y = l
        .solve_lower_triangular(&sys.rhs)
        .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
    let mut distances = Vec::with_capacity(k);
    let mut acc = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut truncated_at = None;
    let mut condition = 1.0;
    for i in 0..k {
        let p = l[(i, i)].re;
        lo = lo.min(p);
        hi = hi.max(p);
        let cond = (hi / lo).powi(2);
        if cond > CONDITION_LIMIT {
            truncated_at = Some(i);
            break;
        }
        condition = cond;
        acc += y[i].norm_sqr();
        distances.push((sys.unit_norm_sq - acc).max(0.0).sqrt());
    }
    Ok(DistanceCurve { distances, truncated_at, condition, ridge })
}

/// d(k) = min over deg p ≤ k of ‖1 − pf‖_{D_ω}, k = 0..=degree.
pub fn cyclic_distance(f: &Holomorphic, w: &SuperharmonicWeight, degree: usize) -> Result<DistanceCurve> {
    distance_curve(&GramSystem::new(f, w, degree)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Th4Verdict {
    Met,
    NotMet,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct Th4Report {
    pub verdict: Th4Verdict,
    pub sums: ConditionCReport,
}

fn log_inverse(t: f64) -> f64 {
    (1.0 / t).ln()
}

/// ∫₀ c_ω(E_t) log(1/t) dt/t < ∞, summed as the Stieltjes series with η = log(1/t).
pub fn th4_test(e: &BoundarySet, source: &CapacitySource, j_max: usize) -> Result<Th4Report> {
    let sums = condition_c(e, &log_inverse, source, j_max)?;
    let verdict = match sums.verdict {
        SeriesVerdict::Convergent => Th4Verdict::Met,
        SeriesVerdict::Divergent => Th4Verdict::NotMet,
        SeriesVerdict::Inconclusive => Th4Verdict::Inconclusive,
    };
    Ok(Th4Report { verdict, sums })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DalphaVerdict {
    Cyclic,
    /// Growth bound holds but the integral converges.
    NoVerdict,
    /// |E_t| = O(t^γ) fails on the sampled scales while |E_t| still shrinks.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct DalphaReport {
    pub verdict: DalphaVerdict,
    pub radii: Vec<f64>,
    pub measures: Vec<f64>,
    /// Fitted exponent of |E_t| against t over the finest ten radii.
    pub growth_exponent: f64,
    pub increments: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub tail: TailTest,
}

/// Cyclicity in D_α when |E_t| = O(t^γ) and ∫₀^π dt/(t^α |E_t|) = ∞.
pub fn dalpha_test(e: &BoundarySet, alpha: f64, gamma: f64, j_max: usize) -> Result<DalphaReport> {
    if !(alpha > 0.0 && alpha < 1.0) || !(gamma > 0.0) || j_max < 6 {
        return invalid("dalpha test needs α ∈ (0,1), γ > 0 and at least six dyadic levels");
    }
    if e.is_empty() {
        return invalid("dalpha test needs a nonempty set");
    }
    let radii: Vec<f64> = (0..=j_max).map(|j| PI * 0.5f64.powi(j as i32)).collect();
    let measures: Vec<f64> = radii.iter().map(|&t| e.neighborhood_measure(t)).collect();
    let tail_from = radii.len().saturating_sub(10);
    let xs: Vec<f64> = radii[tail_from..].iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = measures[tail_from..].iter().map(|m| m.max(1e-300).ln()).collect();
    let growth_exponent = quad::fit_slope(&xs, &ys);
    let mut increments = Vec::new();
    let mut partial_sums = Vec::new();
    let mut acc = 0.0;
    for j in 0..radii.len() - 1 {
        let (t, t_next) = (radii[j], radii[j + 1]);
        // the integrand grows as t decreases; the value at the outer radius gives a lower sum
        let d = (t - t_next) / (t.powf(alpha) * measures[j]);
        acc += d;
        increments.push(d);
        partial_sums.push(acc);
    }
    let tail = tail_test(&increments);
    let growth_ok = growth_exponent >= gamma - 0.05;
    // a flat |E_t| means E itself carries measure, where the test says nothing
    let verdict = if growth_ok && tail.verdict == SeriesVerdict::Divergent {
        DalphaVerdict::Cyclic
    } else if growth_ok || growth_exponent < 0.05 {
        DalphaVerdict::NoVerdict
    } else {
        DalphaVerdict::Inconclusive
    };
    Ok(DalphaReport { verdict, radii, measures, growth_exponent, increments, partial_sums, tail })
}

#[derive(Clone, Debug)]
pub struct VanishingCandidate {
    pub function: OuterFunction,
    pub profile: DistanceProfile,
    /// Condition C sums for η = −log φ.
    pub sums: ConditionCReport,
    pub energy: Energy,
    pub th4: Th4Report,
}

/// Profiles tried from the fastest vanishing to the slowest.
pub fn candidate_profiles() -> Vec<DistanceProfile> {
    vec![
        DistanceProfile::Power(1.0),
        DistanceProfile::Power(0.5),
        DistanceProfile::Power(0.25),
        DistanceProfile::ExpLog { c: -1.0, q: 0.75 },
        DistanceProfile::ExpLog { c: -1.0, q: 0.5 },
        DistanceProfile::Log(-2.0),
        DistanceProfile::Log(-1.0),
        DistanceProfile::Log(-0.5),
    ]
}

/// Pick the fastest vanishing profile φ whose η = −log φ satisfies condition C against the
/// capacity sweep of E, and return the distance outer function of E built from it.
///
/// Below the source's smallest usable radius the sweep is continued by the power law
/// c_j ≈ A·(j+1)^{-p} fitted to its last six levels.
pub fn vanishing_cyclic_candidate(
    e: &BoundarySet,
    w: &SuperharmonicWeight,
    source: &CapacitySource,
    n: usize,
    j_max: usize,
) -> Result<VanishingCandidate> {
    if e.is_empty() {
        return invalid("the empty set needs no vanishing function");
    }
    let sweep = condition_c(e, &|_| 1.0, source, j_max)?;
    let caps = &sweep.capacities;
    if caps.len() < 4 {
        return invalid("capacity sweep has too few levels to judge decay");
    }
    let from = caps.len().saturating_sub(6);
    let xs: Vec<f64> = (from..caps.len()).map(|j| (j as f64 + 1.0).ln()).collect();
    let ys: Vec<f64> = caps[from..].iter().map(|c| c.max(1e-300).ln()).collect();
    let decay = -quad::fit_slope(&xs, &ys);
    if !(decay >= 0.3) {
        return Err(Error::Solver(format!(
            "capacity sweep does not decay (fitted exponent {decay:.3}); the set is likely not polar"
        )));
    }
    let last = caps.len() - 1;
    let scale = caps[last] * (last as f64 + 1.0).powf(decay);
    let radii: Vec<f64> = (0..=j_max).map(|j| PI * 0.5f64.powi(j as i32)).collect();
    let extended: Vec<f64> = (0..=j_max)
        .map(|j| if j <= last { caps[j] } else { scale * (j as f64 + 1.0).powf(-decay) })
        .collect();
    let th4 = th4_test(e, source, j_max)?;
    for profile in candidate_profiles() {
        let eta = |t: f64| -profile.log_value(t);
        let sums = stieltjes_sums(radii.clone(), extended.clone(), &eta)?;
        if sums.verdict != SeriesVerdict::Convergent {
            continue;
        }
        let function = match e {
            BoundarySet::Points(pts) if pts.len() > 1 => {
                let mut acc = distance_outer(&profile, &BoundarySet::point(pts[0]), n)?;
                for &p in &pts[1..] {
                    acc = acc.product(&distance_outer(&profile, &BoundarySet::point(p), n)?)?;
                }
                acc
            }
            _ => distance_outer(&profile, e, n)?,
        };
        let energy = dirichlet_area(&Holomorphic::Outer(function.clone()), w);
        if !energy.is_finite() {
            continue;
        }
        return Ok(VanishingCandidate { function, profile, sums, energy, th4 });
    }
    Err(Error::Solver("no profile in the family satisfies condition C with finite energy".into()))
}
