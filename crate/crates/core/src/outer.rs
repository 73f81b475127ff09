//! Outer functions from boundary log-modulus data, cut-offs, distance profiles and arc localization.

use crate::error::{invalid, Result};
use crate::fourier;
use crate::quad;
use crate::sets::{Arc, BoundarySet};
use num_complex::Complex64 as C64;
use rand::Rng;
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// Samples of h = log|f*| on the uniform grid θ_j = 2πj/N; −∞ marks zeros of f*.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLogModulus {
    samples: Vec<f64>,
}

impl BoundaryLogModulus {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if !fourier::is_pow2(n) || n < 4 {
            return invalid(format!("log-modulus grid size {n} must be a power of two ≥ 4"));
        }
        if samples.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return invalid("log-modulus samples must be finite or −∞");
        }
        let zeros = samples.iter().filter(|v| **v == f64::NEG_INFINITY).count();
        if zeros as f64 > (n as f64).sqrt() {
            return invalid(format!("{zeros} −∞ samples exceed √N = {}", (n as f64).sqrt()));
        }
        let l1: f64 = samples.iter().filter(|v| v.is_finite()).map(|v| v.abs()).sum::<f64>() / n as f64;
        if !l1.is_finite() {
            return invalid("log modulus is not integrable");
        }
        Ok(BoundaryLogModulus { samples })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, h: F) -> Result<Self> {
        Self::new((0..n).map(|j| h(TAU * j as f64 / n as f64)).collect())
    }

    /// Parse `angle,log_modulus` lines; angles must form the uniform grid 2πj/N.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let (a, b) = match (parts.next(), parts.next()) {
                (Some(a), Some(b)) => (a.trim(), b.trim()),
                _ => return invalid(format!("line {}: expected two comma-separated fields", i + 1)),
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => rows.push((x, y)),
                _ if rows.is_empty() => continue,
                _ => return invalid(format!("line {}: unparsable number", i + 1)),
            }
        }
        let n = rows.len();
        for (j, (a, _)) in rows.iter().enumerate() {
            if (a - TAU * j as f64 / n as f64).abs() > 1e-9 {
                return invalid(format!("angle on row {j} is not 2π·{j}/{n}"));
            }
        }
        Self::new(rows.into_iter().map(|r| r.1).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Trapezoid mean of h over finite nodes.
    pub fn mean(&self) -> f64 {
        self.samples.iter().filter(|v| v.is_finite()).sum::<f64>() / self.len() as f64
    }
}

/// Factor (1 − e^{−iθ₀}z)^β carried exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularFactor {
    pub angle: f64,
    pub exponent: f64,
}

impl SingularFactor {
    fn log_at(&self, z: C64) -> C64 {
        let w = C64::new(1.0, 0.0) - C64::from_polar(1.0, -self.angle) * z;
        self.exponent * w.ln()
    }

    fn dlog_at(&self, z: C64) -> C64 {
        let e = C64::from_polar(1.0, -self.angle);
        -self.exponent * e / (C64::new(1.0, 0.0) - e * z)
    }

    /// β·log|2 sin((θ−θ₀)/2)|, the boundary log modulus.
    fn boundary_log(&self, theta: f64) -> f64 {
        self.exponent * (2.0 * (0.5 * (theta - self.angle)).sin()).abs().ln()
    }
}

/// Outer function with unimodular constant 1.
///
/// log f = Σ_{k≤N/2} a_k z^k + Σ β_i log(1 − e^{−iθ_i}z), where the first sum is the
/// Herglotz transform of the trigonometric interpolant of the regular part of h.
#[derive(Clone, Debug)]
pub struct OuterFunction {
    h: BoundaryLogModulus,
    coeffs: Vec<C64>,
    factors: Vec<SingularFactor>,
}

impl OuterFunction {
    pub fn from_log_modulus(h: BoundaryLogModulus) -> Result<Self> {
        Self::with_factors(h, Vec::new())
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, h: F) -> Result<Self> {
        Self::from_log_modulus(BoundaryLogModulus::from_fn(n, h)?)
    }

    /// f ≡ e^c.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::from_fn(n, |_| c)
    }

    /// Build from samples that may hold −∞ at isolated nodes plus explicitly known factors.
    ///
    /// Each −∞ node gets a factor whose exponent is fitted to the two neighbours on each side.
    pub fn with_factors(h: BoundaryLogModulus, extra: Vec<SingularFactor>) -> Result<Self> {
        let n = h.len();
        let step = TAU / n as f64;
        let s = h.samples();
        let l1 = (2.0 * (0.5 * step).sin()).ln();
        let l2 = (2.0 * step.sin()).ln();
        let mut factors = extra.clone();
        let mut zero_nodes = Vec::new();
        for (j, v) in s.iter().enumerate() {
            if *v != f64::NEG_INFINITY {
                continue;
            }
            let at = |d: i64| s[(j as i64 + d).rem_euclid(n as i64) as usize];
            let (p1, p2, m1, m2) = (at(1), at(2), at(-1), at(-2));
            if ![p1, p2, m1, m2].iter().all(|v| v.is_finite()) {
                return invalid(format!("zero of f* at node {j} is not isolated"));
            }
            let beta = 0.5 * ((p2 - p1) + (m2 - m1)) / (l2 - l1);
            let beta = if beta.is_finite() && beta > 0.0 { beta } else { 0.0 };
            zero_nodes.push(j);
            if beta > 0.0 {
                factors.push(SingularFactor { angle: TAU * j as f64 / n as f64, exponent: beta });
            }
        }
        let fitted = &factors[extra.len()..];
        let mut rem: Vec<f64> = (0..n)
            .map(|j| {
                let th = TAU * j as f64 / n as f64;
                if s[j] == f64::NEG_INFINITY {
                    return 0.0;
                }
                s[j] - fitted.iter().map(|f| f.boundary_log(th)).sum::<f64>()
            })
            .collect();
        for &j in &zero_nodes {
            let a = rem[(j + n - 1) % n];
            let b = rem[(j + 1) % n];
            rem[j] = 0.5 * (a + b);
        }
        Self::from_regular_part(h, rem, factors)
    }

    /// Regular-part samples `rem` and the full factor list; `h` is kept as the nominal data.
    pub fn from_regular_part(h: BoundaryLogModulus, rem: Vec<f64>, factors: Vec<SingularFactor>) -> Result<Self> {
        let n = h.len();
        if rem.len() != n || rem.iter().any(|v| !v.is_finite()) {
            return invalid("regular part must be finite on the grid");
        }
        let c = fourier::coefficients_real(&rem);
        let half = n / 2;
        let mut coeffs = Vec::with_capacity(half + 1);
        coeffs.push(C64::new(c[0].re, 0.0));
        for ck in c.iter().take(half).skip(1) {
            coeffs.push(2.0 * ck);
        }
        coeffs.push(C64::new(c[half].re, 0.0));
        Ok(OuterFunction { h, coeffs, factors })
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn log_modulus(&self) -> &BoundaryLogModulus {
        &self.h
    }

    pub fn factors(&self) -> &[SingularFactor] {
        &self.factors
    }

    pub fn log_coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn log_eval(&self, z: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for a in self.coeffs.iter().rev() {
            s = s * z + a;
        }
        for f in &self.factors {
            s += f.log_at(z);
        }
        s
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.log_eval(z).exp()
    }

    /// (log f)'(z).
    pub fn log_deriv(&self, z: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (k, a) in self.coeffs.iter().enumerate().skip(1).rev() {
            s = s * z + a * k as f64;
        }
        for f in &self.factors {
            s += f.dlog_at(z);
        }
        s
    }

    pub fn deriv(&self, z: C64) -> C64 {
        self.eval(z) * self.log_deriv(z)
    }

    /// f(0) = exp(mean of h).
    pub fn value_at_zero(&self) -> f64 {
        self.coeffs[0].re.exp()
    }

    /// log f and (log f)' at ρe^{i(θ_j + rot)}, θ_j = 2πj/m.
    pub fn ring_log(&self, rho: f64, m: usize, rot: f64) -> (Vec<C64>, Vec<C64>) {
        let mut logf = series_on_ring(&self.coeffs, rho, m, rot);
        let mut dlog = derivative_on_ring(&self.coeffs, rho, m, rot);
        if !self.factors.is_empty() {
            for j in 0..m {
                let z = C64::from_polar(rho, TAU * j as f64 / m as f64 + rot);
                for f in &self.factors {
                    logf[j] += f.log_at(z);
                    dlog[j] += f.dlog_at(z);
                }
            }
        }
        (logf, dlog)
    }

    /// Outer function with log modulus h₁ + h₂ (grids must match).
    pub fn product(&self, other: &OuterFunction) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    fn combine<F: Fn(f64, f64) -> f64>(&self, other: &OuterFunction, op: F) -> Result<Self> {
        if self.n() != other.n() {
            return invalid(format!("grid sizes differ: {} vs {}", self.n(), other.n()));
        }
        let s: Vec<f64> = self
            .h
            .samples()
            .iter()
            .zip(other.h.samples())
            .map(|(&a, &b)| op(a, b))
            .collect();
        Self::from_log_modulus(BoundaryLogModulus::new(s)?)
    }

    fn map(&self, op: impl Fn(f64) -> f64) -> Result<Self> {
        let s: Vec<f64> = self.h.samples().iter().map(|&v| op(v)).collect();
        Self::from_log_modulus(BoundaryLogModulus::new(s)?)
    }
}

/// Σ c_k ρ^k e^{ik(θ_j+rot)} on m points (coefficients beyond m fold by aliasing).
fn series_on_ring(c: &[C64], rho: f64, m: usize, rot: f64) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let mut rk = 1.0;
    for (k, ck) in c.iter().enumerate() {
        buf[k % m] += ck * rk * C64::from_polar(1.0, k as f64 * rot);
        rk *= rho;
    }
    fourier::ifft(&mut buf);
    buf
}

/// Σ k c_k z^{k−1} at z = ρe^{i(θ_j+rot)}.
fn derivative_on_ring(c: &[C64], rho: f64, m: usize, rot: f64) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let mut rk = 1.0;
    for (k, ck) in c.iter().enumerate().skip(1) {
        buf[k % m] += ck * (k as f64 * rk) * C64::from_polar(1.0, k as f64 * rot);
        rk *= rho;
    }
    fourier::ifft(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= C64::from_polar(1.0, -(TAU * j as f64 / m as f64 + rot));
    }
    buf
}

/// f ∧ g: log modulus min(h_f, h_g).
pub fn cutoff_min(f: &OuterFunction, g: &OuterFunction) -> Result<OuterFunction> {
    f.combine(g, f64::min)
}

/// f ∨ g: log modulus max(h_f, h_g).
pub fn cutoff_max(f: &OuterFunction, g: &OuterFunction) -> Result<OuterFunction> {
    f.combine(g, f64::max)
}

/// f ∧ f²: log modulus min(h, 2h).
pub fn wedge_square(f: &OuterFunction) -> Result<OuterFunction> {
    f.map(|x| x.min(2.0 * x))
}

/// Analytic function handled by the Dirichlet routes.
#[derive(Clone, Debug)]
pub enum Holomorphic {
    Outer(OuterFunction),
    /// Taylor coefficients c_0..c_d.
    Polynomial(Vec<C64>),
}

/// Values of f and f' on a circle; `log_f` only for outer functions.
#[derive(Clone, Debug)]
pub struct RingSamples {
    pub f: Vec<C64>,
    pub df: Vec<C64>,
    pub log_f: Option<Vec<C64>>,
    pub dlog_f: Option<Vec<C64>>,
}

impl Holomorphic {
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[n] = C64::new(1.0, 0.0);
        Holomorphic::Polynomial(c)
    }

    pub fn is_outer(&self) -> bool {
        matches!(self, Holomorphic::Outer(_))
    }

    pub fn as_outer(&self) -> Option<&OuterFunction> {
        match self {
            Holomorphic::Outer(f) => Some(f),
            _ => None,
        }
    }

    /// Native boundary grid size N.
    pub fn grid_size(&self) -> usize {
        match self {
            Holomorphic::Outer(f) => f.n(),
            Holomorphic::Polynomial(c) => fourier::next_pow2_at_least(4.0 * c.len() as f64).max(1024),
        }
    }

    /// Radius 1 − 1/N² standing in for radial limits.
    pub fn surrogate_radius(&self) -> f64 {
        let n = self.grid_size() as f64;
        1.0 - 1.0 / (n * n)
    }

    pub fn eval(&self, z: C64) -> C64 {
        match self {
            Holomorphic::Outer(f) => f.eval(z),
            Holomorphic::Polynomial(c) => c.iter().rev().fold(C64::new(0.0, 0.0), |s, a| s * z + a),
        }
    }

    pub fn deriv(&self, z: C64) -> C64 {
        match self {
            Holomorphic::Outer(f) => f.deriv(z),
            Holomorphic::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(C64::new(0.0, 0.0), |s, (k, a)| s * z + a * k as f64),
        }
    }

    /// Samples at ρe^{i(2πj/m + rot)}.
    pub fn ring(&self, rho: f64, m: usize, rot: f64) -> RingSamples {
        match self {
            Holomorphic::Outer(f) => {
                let (logf, dlog) = f.ring_log(rho, m, rot);
                let vals: Vec<C64> = logf.iter().map(|l| l.exp()).collect();
                let df = vals.iter().zip(&dlog).map(|(a, b)| a * b).collect();
                RingSamples { f: vals, df, log_f: Some(logf), dlog_f: Some(dlog) }
            }
            Holomorphic::Polynomial(c) => RingSamples {
                f: series_on_ring(c, rho, m, rot),
                df: derivative_on_ring(c, rho, m, rot),
                log_f: None,
                dlog_f: None,
            },
        }
    }
}

/// Named decreasing profiles φ on (0, π].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistanceProfile {
    Constant(f64),
    /// φ(t) = t^p.
    Power(f64),
    /// φ(t) = log(eπ/t)^p.
    Log(f64),
    /// φ(t) = exp(c·log(eπ/t)^q).
    ExpLog { c: f64, q: f64 },
}

impl DistanceProfile {
    fn ell(t: f64) -> f64 {
        1.0 + (PI / t).ln()
    }

    pub fn log_value(&self, t: f64) -> f64 {
        match *self {
            DistanceProfile::Constant(c) => c.ln(),
            DistanceProfile::Power(p) => {
                if p == 0.0 {
                    0.0
                } else {
                    p * t.ln()
                }
            }
            DistanceProfile::Log(p) => p * Self::ell(t).ln(),
            DistanceProfile::ExpLog { c, q } => c * Self::ell(t).powf(q),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.log_value(t).exp()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            DistanceProfile::Constant(_) => 0.0,
            DistanceProfile::Power(p) => p * t.powf(p - 1.0),
            DistanceProfile::Log(p) => -p * Self::ell(t).powf(p - 1.0) / t,
            DistanceProfile::ExpLog { c, q } => -self.value(t) * c * q * Self::ell(t).powf(q - 1.0) / t,
        }
    }

    /// Exponent β with φ(t) = t^β exactly, when the profile is a pure power.
    pub fn power_exponent(&self) -> Option<f64> {
        match *self {
            DistanceProfile::Power(p) => Some(p),
            DistanceProfile::Constant(_) => Some(0.0),
            _ => None,
        }
    }

    /// log φ(0⁺) is finite.
    pub fn finite_at_zero(&self) -> bool {
        match *self {
            DistanceProfile::Constant(_) => true,
            DistanceProfile::Power(p) => p == 0.0,
            DistanceProfile::Log(p) => p == 0.0,
            DistanceProfile::ExpLog { c, q } => c == 0.0 || q == 0.0,
        }
    }
}

/// Worst-case diagnostics of the class R conditions on t_j = π2^{-j}.
#[derive(Clone, Debug)]
pub struct ClassRReport {
    pub accepted: bool,
    pub violations: Vec<String>,
    pub value_doubling: (f64, f64),
    pub derivative_doubling: (f64, f64),
}

/// Doubling ratios must stay inside [1/DOUBLING_BOUND, DOUBLING_BOUND].
pub const DOUBLING_BOUND: f64 = 16.0;

pub fn class_r_check(phi: &DistanceProfile) -> ClassRReport {
    let levels = 40;
    let ts: Vec<f64> = (0..=levels).map(|j| PI * 0.5f64.powi(j)).collect();
    let mut violations = Vec::new();
    for w in ts.windows(2) {
        let (big, small) = (w[0], w[1]);
        if phi.log_value(small) < phi.log_value(big) - 1e-12 {
            violations.push(format!("not decreasing: φ({small:e}) < φ({big:e})"));
            break;
        }
    }
    for w in ts.windows(2) {
        let (big, small) = (w[0], w[1]);
        let gb = big * big * phi.derivative(big).abs();
        let gs = small * small * phi.derivative(small).abs();
        if gs > gb * (1.0 + 1e-12) {
            violations.push(format!("x²|φ'| not increasing between {small:e} and {big:e}"));
            break;
        }
    }
    let mut vd = (f64::INFINITY, 0.0f64);
    let mut dd = (f64::INFINITY, 0.0f64);
    for w in ts.windows(2) {
        let (x2, x) = (w[0], w[1]);
        let r = (phi.log_value(x2) - phi.log_value(x)).exp();
        vd = (vd.0.min(r), vd.1.max(r));
        let (a, b) = (phi.derivative(x2).abs(), phi.derivative(x).abs());
        if a > 0.0 || b > 0.0 {
            let r = a / b;
            dd = (dd.0.min(r), dd.1.max(r));
        }
    }
    if vd.0 < 1.0 / DOUBLING_BOUND || vd.1 > DOUBLING_BOUND {
        violations.push(format!("φ(2x)/φ(x) range [{:.3e}, {:.3e}] exceeds doubling bound", vd.0, vd.1));
    }
    if dd.1 > 0.0 && (dd.0 < 1.0 / DOUBLING_BOUND || dd.1 > DOUBLING_BOUND) {
        violations.push(format!("φ'(2x)/φ'(x) range [{:.3e}, {:.3e}] exceeds doubling bound", dd.0, dd.1));
    }
    if dd.1 == 0.0 {
        dd = (1.0, 1.0);
    }
    ClassRReport { accepted: violations.is_empty(), violations, value_doubling: vd, derivative_doubling: dd }
}

/// φ̃_E on an n-point grid: log modulus log φ(dist(·,E)), chordal distance.
pub fn distance_outer(phi: &DistanceProfile, e: &BoundarySet, n: usize) -> Result<OuterFunction> {
    if !fourier::is_pow2(n) {
        return invalid(format!("grid size {n} must be a power of two"));
    }
    if e.is_empty() {
        return invalid("distance outer function needs a nonempty set");
    }
    if e.measure() > 0.0 && !phi.finite_at_zero() {
        return invalid("log φ(0⁺) is infinite on a set of positive measure; |E| must be 0");
    }
    let step = TAU / n as f64;
    let points: Vec<f64> = match e {
        BoundarySet::Points(p) => p.clone(),
        _ => Vec::new(),
    };
    let beta = phi.power_exponent();
    let factors: Vec<SingularFactor> = match beta {
        Some(b) if b != 0.0 => points.iter().map(|&a| SingularFactor { angle: a, exponent: b }).collect(),
        _ => Vec::new(),
    };
    let regular = |theta: f64| -> f64 {
        let mut theta = theta;
        let mut d = e.distance(theta);
        if d < 1e-200 {
            theta += 1e-9 * step;
            d = e.distance(theta);
        }
        phi.log_value(d) - factors.iter().map(|f| f.boundary_log(theta)).sum::<f64>()
    };
    let mut rem = Vec::with_capacity(n);
    let mut nominal = Vec::with_capacity(n);
    for j in 0..n {
        let th = step * j as f64;
        let d = e.distance(th);
        nominal.push(if d == 0.0 && !phi.finite_at_zero() {
            if phi.log_value(1e-300) < 0.0 {
                f64::NEG_INFINITY
            } else {
                // +∞ is not a legal sample; keep the cell average instead
                f64::NAN
            }
        } else {
            phi.log_value(d)
        });
        let near_point = points.iter().any(|&p| {
            let x = (th - p).rem_euclid(TAU);
            x.min(TAU - x) < 0.5 * step
        });
        let v = if near_point && beta.is_none() {
            // cell average of the regular part across an integrable singularity
            let mut g = |x: f64| regular(x);
            let mut acc = 0.0;
            for &p in &points {
                let x = (th - p).rem_euclid(TAU);
                if x.min(TAU - x) < 0.5 * step {
                    let off = if x < PI { x } else { x - TAU };
                    let c = th - off;
                    let a = th - 0.5 * step;
                    let b = th + 0.5 * step;
                    acc = quad::adaptive(&mut g, a, c, 1e-10, 24) + quad::adaptive(&mut g, c, b, 1e-10, 24);
                }
            }
            acc / step
        } else {
            regular(th)
        };
        if !v.is_finite() {
            return invalid(format!("log φ(dist) not integrable near node {j}"));
        }
        rem.push(v);
    }
    let cell_avg: Vec<f64> = nominal
        .iter()
        .zip(&rem)
        .map(|(&h, &r)| if h.is_nan() { r } else { h })
        .collect();
    let h = BoundaryLogModulus::new(cell_avg)?;
    OuterFunction::from_regular_part(h, rem, factors)
}

/// (f_Γ, f_{T∖Γ}) for Γ = (a, b) counterclockwise.
pub fn arc_localize(f: &OuterFunction, a: f64, b: f64) -> Result<(OuterFunction, OuterFunction)> {
    let len = (b - a).rem_euclid(TAU);
    if len <= 0.0 || !(a.is_finite() && b.is_finite()) {
        return invalid("degenerate arc");
    }
    let gamma = Arc::new(a, len)?;
    let n = f.n();
    let step = TAU / n as f64;
    let ends = [
        SingularFactor { angle: a.rem_euclid(TAU), exponent: 1.0 },
        SingularFactor { angle: b.rem_euclid(TAU), exponent: 1.0 },
    ];
    let indicator = |th: f64| -> f64 {
        let x = (th - gamma.start).rem_euclid(TAU);
        let at_end = x.abs() < 1e-12 || (x - gamma.length).abs() < 1e-12 || (TAU - x).abs() < 1e-12;
        if at_end {
            0.5
        } else if x < gamma.length {
            1.0
        } else {
            0.0
        }
    };
    let hs = f.log_modulus().samples();
    let build = |inside: bool| -> Result<OuterFunction> {
        let mut samples = Vec::with_capacity(n);
        for (j, &h) in hs.iter().enumerate() {
            let th = step * j as f64;
            let w = if inside { indicator(th) } else { 1.0 - indicator(th) };
            samples.push(if w == 0.0 { 0.0 } else if h == f64::NEG_INFINITY { h } else { w * h });
        }
        let regular = OuterFunction::with_factors(BoundaryLogModulus::new(samples)?, Vec::new())?;
        let mut nominal = Vec::with_capacity(n);
        for (j, r) in regular.log_modulus().samples().iter().enumerate() {
            let th = step * j as f64;
            nominal.push(r + ends.iter().map(|e| e.boundary_log(th)).sum::<f64>());
        }
        let mut factors = regular.factors().to_vec();
        factors.extend_from_slice(&ends);
        let c = &regular.coeffs;
        Ok(OuterFunction { h: BoundaryLogModulus { samples: nominal }, coeffs: c.clone(), factors })
    };
    Ok((build(true)?, build(false)?))
}

/// Smooth random outer function: h = c + Σ_{k≤modes} decaying random trig terms.
pub fn random_smooth<R: Rng>(rng: &mut R, n: usize, modes: usize, amplitude: f64) -> Result<OuterFunction> {
    let c0 = rng.gen_range(-0.5..0.5);
    let terms: Vec<(f64, f64)> = (1..=modes)
        .map(|k| {
            let s = amplitude / (k as f64).powf(1.5);
            (rng.gen_range(-s..s), rng.gen_range(-s..s))
        })
        .collect();
    OuterFunction::from_fn(n, |t| {
        c0 + terms
            .iter()
            .enumerate()
            .map(|(k, (a, b))| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
            .sum::<f64>()
    })
}
