//! Dirichlet integrals D_ω(f) by the area, local and entropy formulas, the Douglas-type
//! double integral, and the Bregman/entropy objects behind them.
//!
//! Boundary values f(ζ) are read at the dilated point (1 − 1/N²)ζ throughout.

use crate::error::{invalid, Result};
use crate::fourier;
use crate::measure::{DiscMeasure, Ring, SuperharmonicWeight};
use crate::outer::{DistanceProfile, Holomorphic};
use crate::potentials::{f_mu_profile, green_modes, poisson_kernel, ring_a_kernel, ring_resolution};
use crate::quad::GaussLegendre;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// Partial sums beyond this are reported as infinite.
pub const ENERGY_CAP: f64 = 1e12;

/// Factor applied to the A_μ part of the Douglas-type form, fixed by f = z, μ = δ₀.
pub const DOUGLAS_CALIBRATION: f64 = 0.5;

const MAX_RING_NODES: usize = 1 << 18;
const RADIAL_ORDER: usize = 10;

/// Nonnegative extended real with the partial sum kept on overflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Energy {
    Finite(f64),
    Infinite { partial: f64 },
}

impl Energy {
    pub fn value(self) -> f64 {
        match self {
            Energy::Finite(v) => v,
            Energy::Infinite { .. } => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Energy::Finite(_))
    }

    /// Running sum with the cap applied after every term.
    pub fn total<I: IntoIterator<Item = f64>>(parts: I) -> Energy {
        let mut s = 0.0;
        for p in parts {
            if !p.is_finite() {
                return Energy::Infinite { partial: s };
            }
            s += p;
            if s > ENERGY_CAP {
                return Energy::Infinite { partial: s };
            }
        }
        Energy::Finite(s.max(0.0))
    }

    pub fn add(self, other: Energy) -> Energy {
        match (self, other) {
            (Energy::Finite(a), Energy::Finite(b)) => Energy::total([a, b]),
            (a, b) => Energy::Infinite { partial: finite_part(a) + finite_part(b) },
        }
    }

    pub fn scale(self, c: f64) -> Energy {
        match self {
            Energy::Finite(v) => Energy::total([c * v]),
            Energy::Infinite { partial } => Energy::Infinite { partial: c * partial },
        }
    }
}

fn finite_part(e: Energy) -> f64 {
    match e {
        Energy::Finite(v) => v,
        Energy::Infinite { partial } => partial,
    }
}

/// F(x,y) = e^x − e^y − e^y(x−y), with F(x,−∞) = e^x.
pub fn bregman_f(x: f64, y: f64) -> f64 {
    if y == f64::NEG_INFINITY {
        return x.exp();
    }
    if x == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let d = x - y;
    let core = if d.abs() < 1e-3 {
        d * d * (0.5 + d * (1.0 / 6.0 + d * (1.0 / 24.0 + d / 120.0)))
    } else {
        d.exp_m1() - d
    };
    y.exp() * core
}

/// g(x) = x for x ≥ 0 and 2x for x ≤ 0; the log-modulus map of f ↦ f ∧ f².
pub fn wedge_square_map(x: f64) -> f64 {
    x.min(2.0 * x)
}

/// Ent_σ(u) = E_σ(e^u) − e^{E_σ u}, evaluated as E_σ F(u, E_σ u).
pub fn phi_entropy(sigma: &[f64], u: &[f64]) -> f64 {
    let total: f64 = sigma.iter().sum();
    let mut mean = 0.0;
    for (&s, &x) in sigma.iter().zip(u) {
        if s > 0.0 {
            mean += s * x;
        }
    }
    let a = mean / total;
    let mut acc = 0.0;
    for (&s, &x) in sigma.iter().zip(u) {
        if s > 0.0 {
            acc += s * bregman_f(x, a);
        }
    }
    acc / total
}

/// inf_a E_σ F(u, a) by golden-section search; returns (value, minimizer).
pub fn phi_entropy_inf(sigma: &[f64], u: &[f64]) -> (f64, f64) {
    let total: f64 = sigma.iter().sum();
    let obj = |a: f64| {
        sigma
            .iter()
            .zip(u)
            .filter(|(s, _)| **s > 0.0)
            .map(|(s, x)| s * bregman_f(*x, a))
            .sum::<f64>()
            / total
    };
    let finite = u.iter().zip(sigma).filter(|(x, s)| x.is_finite() && **s > 0.0).map(|(x, _)| *x);
    let (mut lo, mut hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    if !lo.is_finite() {
        return (0.0, 0.0);
    }
    lo -= 1.0;
    hi += 1.0;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (obj(c), obj(d));
    for _ in 0..200 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = obj(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = obj(d);
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let a = 0.5 * (lo + hi);
    (obj(a), a)
}

/// lhs − rhs of the three probability-space cut-off inequalities for u = 2log|f|, v = 2log|g|:
/// Ent(u∧v) ≤ Ent(u)+Ent(v), Ent(u∨v) ≤ Ent(u)+Ent(v), Ent(g(u)) ≤ 4Ent(u).
pub fn entropy_cutoff_margins(sigma: &[f64], u: &[f64], v: &[f64]) -> [f64; 3] {
    let eu = phi_entropy(sigma, u);
    let ev = phi_entropy(sigma, v);
    let mn: Vec<f64> = u.iter().zip(v).map(|(a, b)| a.min(*b)).collect();
    let mx: Vec<f64> = u.iter().zip(v).map(|(a, b)| a.max(*b)).collect();
    let sq: Vec<f64> = u.iter().map(|&a| 2.0 * wedge_square_map(0.5 * a)).collect();
    [
        phi_entropy(sigma, &mn) - eu - ev,
        phi_entropy(sigma, &mx) - eu - ev,
        phi_entropy(sigma, &sq) - 4.0 * eu,
    ]
}

/// Violations of F(x₁∧x₂, y₁∧y₂) ≤ max(F(x₁,y₁), F(x₂,y₂)) and its ∨ analogue over grid⁴.
pub fn bregman_minmax_violations(grid: &[f64], tol: f64) -> usize {
    let mut bad = 0;
    for &x1 in grid {
        for &y1 in grid {
            let f1 = bregman_f(x1, y1);
            for &x2 in grid {
                for &y2 in grid {
                    let bound = f1.max(bregman_f(x2, y2));
                    let slack = tol * (1.0 + bound.abs());
                    if bregman_f(x1.min(x2), y1.min(y2)) > bound + slack {
                        bad += 1;
                    }
                    if bregman_f(x1.max(x2), y1.max(y2)) > bound + slack {
                        bad += 1;
                    }
                }
            }
        }
    }
    bad
}

/// Violations of F(g(x), g(y)) ≤ 4F(x,y) over grid².
pub fn bregman_square_violations(grid: &[f64], tol: f64) -> usize {
    let mut bad = 0;
    for &x in grid {
        for &y in grid {
            let rhs = 4.0 * bregman_f(x, y);
            if bregman_f(wedge_square_map(x), wedge_square_map(y)) > rhs + tol * (1.0 + rhs.abs()) {
                bad += 1;
            }
        }
    }
    bad
}

/// Harmonic measure σ_w on an m-point circle grid.
#[derive(Clone, Debug)]
pub struct LocalMeasure {
    pub w: C64,
    pub weights: Vec<f64>,
    /// Σ P_w(ζ_j)/m before normalization.
    pub raw_mass: f64,
}

impl LocalMeasure {
    pub fn new(w: C64, m: usize) -> Result<Self> {
        if !(w.norm() < 1.0) {
            return invalid(format!("|w| = {} must be < 1", w.norm()));
        }
        let (s, phi) = (w.norm(), w.arg());
        let gs = 1.0 - s;
        let mut weights: Vec<f64> =
            (0..m).map(|j| poisson_kernel(s, gs, phi, TAU * j as f64 / m as f64) / m as f64).collect();
        let raw_mass: f64 = weights.iter().sum();
        for v in weights.iter_mut() {
            *v /= raw_mass;
        }
        Ok(LocalMeasure { w, weights, raw_mass })
    }

    /// Power-of-two grid resolving P_w: at least 32 nodes per width 1 − |w|.
    pub fn nodes_for(w: C64, floor: usize) -> usize {
        let gap = 1.0 - w.norm();
        fourier::next_pow2_at_least(32.0 / gap).clamp(floor.max(64), MAX_RING_NODES)
    }
}

/// Dilated boundary data of f on an m-point grid rotated by `rot`.
struct Boundary {
    f: Vec<C64>,
    /// ∂θ f.
    tang: Vec<C64>,
    /// log|f| and ∂θ log|f| when f is zero-free.
    log_abs: Option<Vec<f64>>,
    dlog: Option<Vec<f64>>,
}

impl Boundary {
    fn new(f: &Holomorphic, rho: f64, m: usize, rot: f64, with_log: bool) -> Boundary {
        let r = f.ring(rho, m, rot);
        let z: Vec<C64> = (0..m).map(|j| C64::from_polar(rho, TAU * j as f64 / m as f64 + rot)).collect();
        let i = C64::new(0.0, 1.0);
        let tang: Vec<C64> = r.df.iter().zip(&z).map(|(d, z)| i * z * d).collect();
        let (log_abs, dlog) = if !with_log {
            (None, None)
        } else if let (Some(l), Some(dl)) = (&r.log_f, &r.dlog_f) {
            (
                Some(l.iter().map(|v| v.re).collect()),
                Some(dl.iter().zip(&z).map(|(d, z)| (i * z * d).re).collect()),
            )
        } else {
            (
                Some(r.f.iter().map(|v| v.norm().ln()).collect()),
                Some(r.f.iter().zip(&tang).map(|(v, t)| (t / v).re).collect()),
            )
        };
        Boundary { f: r.f, tang, log_abs, dlog }
    }

    fn abs_sq(&self) -> Vec<f64> {
        self.f.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// Dilated boundary data keyed by grid size.
struct BoundaryCache<'a> {
    f: &'a Holomorphic,
    rho: f64,
    with_log: bool,
    map: HashMap<usize, Boundary>,
}

impl<'a> BoundaryCache<'a> {
    fn new(f: &'a Holomorphic, with_log: bool) -> Self {
        BoundaryCache { f, rho: f.surrogate_radius(), with_log, map: HashMap::new() }
    }

    fn get(&mut self, m: usize) -> &Boundary {
        let (f, rho, wl) = (self.f, self.rho, self.with_log);
        self.map.entry(m).or_insert_with(|| Boundary::new(f, rho, m, 0.0, wl))
    }
}

/// 1/|ζ_j − ζ_0|² on an m-point grid, zero at j = 0.
fn chord_kernel(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                let s = (PI * j as f64 / m as f64).sin();
                1.0 / (4.0 * s * s)
            }
        })
        .collect()
}

/// Whether the entropy formula applies: f outer, or a polynomial without zeros in the closed disc.
pub fn entropy_capable(f: &Holomorphic) -> bool {
    match f {
        Holomorphic::Outer(_) => true,
        Holomorphic::Polynomial(_) => {
            let m = 4 * f.grid_size();
            let r = f.ring(f.surrogate_radius(), m, 0.0);
            if r.f.iter().any(|v| v.norm() == 0.0) {
                return false;
            }
            let mut turn = 0.0;
            for j in 0..m {
                turn += (r.f[(j + 1) % m] / r.f[j]).arg();
            }
            (turn / TAU).round() == 0.0
        }
    }
}

/// Douglas-type local integral D_ζ(f) at ζ = e^{iθ}, diagonal |∂θ f|².
fn douglas_at(f: &Holomorphic, rho: f64, m: usize, theta: f64) -> f64 {
    let b = Boundary::new(f, rho, m, theta, false);
    let k = chord_kernel(m);
    let f0 = b.f[0];
    let mut s = b.tang[0].norm_sqr();
    for j in 1..m {
        s += (b.f[j] - f0).norm_sqr() * k[j];
    }
    s / m as f64
}

/// Richter–Sundberg local integral at ζ = e^{iθ}, diagonal 2e^{2h}h'².
fn rs_at(f: &Holomorphic, rho: f64, m: usize, theta: f64) -> f64 {
    let b = Boundary::new(f, rho, m, theta, true);
    let h = b.log_abs.as_ref().unwrap();
    let dh = b.dlog.as_ref().unwrap();
    let k = chord_kernel(m);
    let y = 2.0 * h[0];
    let mut s = 2.0 * y.exp() * dh[0] * dh[0];
    for j in 1..m {
        s += bregman_f(2.0 * h[j], y) * k[j];
    }
    s / m as f64
}

/// Local Dirichlet integral at an interior point, by the Douglas-type and entropy formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoutePair {
    pub douglas: Energy,
    pub entropy: Option<Energy>,
}

/// D_w(f) = ∫ |f(ζ)−f(w)|²/|ζ−w|² dm and (1−|w|²)⁻¹·Ent_{σ_w}(2log|f|).
pub fn local_dirichlet_interior(f: &Holomorphic, w: C64) -> Result<RoutePair> {
    if !(w.norm() < 1.0) {
        return invalid(format!("|w| = {} must be < 1", w.norm()));
    }
    let rho = f.surrogate_radius();
    let m = LocalMeasure::nodes_for(w, 2 * f.grid_size());
    let cap = entropy_capable(f);
    let b = Boundary::new(f, rho, m, 0.0, cap);
    let fw = f.eval(rho * w);
    let mut parts = Vec::with_capacity(m);
    for (j, v) in b.f.iter().enumerate() {
        let z = C64::from_polar(1.0, TAU * j as f64 / m as f64);
        parts.push((v - fw).norm_sqr() / (z - w).norm_sqr() / m as f64);
    }
    let douglas = Energy::total(parts);
    let entropy = if cap {
        let sigma = LocalMeasure::new(w, m)?;
        let u: Vec<f64> = b.log_abs.as_ref().unwrap().iter().map(|h| 2.0 * h).collect();
        let d = 1.0 - w.norm_sqr();
        Some(Energy::total([phi_entropy(&sigma.weights, &u) / d]))
    } else {
        None
    };
    Ok(RoutePair { douglas, entropy })
}

/// D_ζ(f) at ζ = e^{iθ} by Douglas' formula and by the Richter–Sundberg formula.
pub fn local_dirichlet_boundary(f: &Holomorphic, theta: f64) -> RoutePair {
    let rho = f.surrogate_radius();
    let m = 2 * f.grid_size();
    let douglas = Energy::total([douglas_at(f, rho, m, theta)]);
    let entropy = if entropy_capable(f) { Some(Energy::total([rs_at(f, rho, m, theta)])) } else { None };
    RoutePair { douglas, entropy }
}

/// Values of D_ω(f) by the three formulas; `entropy` is absent when f is not zero-free.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletRoutes {
    pub area: Energy,
    pub local: Energy,
    pub entropy: Option<Energy>,
}

impl DirichletRoutes {
    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![self.area.value(), self.local.value()];
        if let Some(e) = self.entropy {
            v.push(e.value());
        }
        v
    }
}

/// Largest pairwise relative difference, relative to the largest magnitude.
pub fn relative_spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        0.0
    } else if hi.is_infinite() {
        if lo.is_infinite() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (hi - lo) / scale
    }
}

pub fn dirichlet(f: &Holomorphic, w: &SuperharmonicWeight) -> DirichletRoutes {
    DirichletRoutes { area: dirichlet_area(f, w), local: dirichlet_local(f, w), entropy: dirichlet_entropy(f, w) }
}

fn radial_breaks(mu: &DiscMeasure, n: usize) -> Vec<f64> {
    let mut pts = vec![0.0, 1.0];
    let top = (2.0 * (n as f64).log2()).ceil() as i32 + 6;
    for k in 1..=top.min(60) {
        pts.push(1.0 - 0.5f64.powi(k));
    }
    for j in 2..=24 {
        pts.push(0.5f64.powi(j));
    }
    for a in &mu.atoms {
        if a.mass == 0.0 || a.radius == 0.0 {
            continue;
        }
        let s = a.radius;
        let scale = s.min(a.gap);
        pts.push(s);
        for j in 1..=14 {
            let d = scale * 0.5f64.powi(j);
            pts.push(s - d);
            pts.push(s + d);
        }
    }
    for r in mu.rings() {
        pts.push(r.radius);
    }
    pts.retain(|p| (0.0..=1.0).contains(p));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    pts
}

/// Route 1: ∫ |f'|² ω dA, angular integrals in Fourier space, radial Gauss–Legendre.
pub fn dirichlet_area(f: &Holomorphic, w: &SuperharmonicWeight) -> Energy {
    let n = f.grid_size();
    let m = 2 * n;
    let kmax = m / 2 - 1;
    let nu_modes: Vec<C64> = if w.nu.is_zero() {
        Vec::new()
    } else {
        (0..=kmax).map(|k| w.nu.mode(k as i64)).collect()
    };
    let mu_zero = w.mu.is_zero();
    let gl = GaussLegendre::new(RADIAL_ORDER);
    let breaks = radial_breaks(&w.mu, n);
    let nodes: Vec<(f64, f64)> = breaks.windows(2).flat_map(|s| gl.on(s[0], s[1]).collect::<Vec<_>>()).collect();
    let parts: Vec<f64> = nodes
        .par_iter()
        .map(|&(rho, wt)| {
            let r = f.ring(rho, m, 0.0);
            let g: Vec<f64> = r.df.iter().map(|d| d.norm_sqr()).collect();
            let gh = fourier::coefficients_real(&g);
            let mut modes = vec![C64::new(0.0, 0.0); kmax + 1];
            if !mu_zero {
                let gm = green_modes(&w.mu, rho, 1.0 - rho, kmax);
                for (o, v) in modes.iter_mut().zip(gm) {
                    *o += v;
                }
            }
            if !nu_modes.is_empty() {
                let mut rk = 1.0;
                for (o, v) in modes.iter_mut().zip(&nu_modes) {
                    *o += v * rk;
                    rk *= rho;
                }
            }
            let mut s = (modes[0] * gh[0].conj()).re;
            for k in 1..=kmax {
                s += 2.0 * (modes[k] * gh[k].conj()).re;
            }
            wt * 2.0 * rho * s
        })
        .collect();
    Energy::total(parts)
}

fn ring_nodes(ring: &Ring, floor: usize) -> usize {
    ring_resolution(ring, 32.0).clamp(floor, MAX_RING_NODES).max(ring.masses.len())
}

fn atom_nodes(gap: f64, floor: usize) -> usize {
    fourier::next_pow2_at_least(32.0 / gap).clamp(floor, MAX_RING_NODES)
}

/// Σ_j x_j P_w(ζ_j)/m for w = (s, φ).
fn poisson_sums(b: &Boundary, b2: &[f64], s: f64, gs: f64, phi: f64) -> (f64, C64, f64) {
    let m = b.f.len();
    let (mut s0, mut s1, mut s2) = (0.0, C64::new(0.0, 0.0), 0.0);
    for j in 0..m {
        let p = poisson_kernel(s, gs, phi, TAU * j as f64 / m as f64);
        s0 += p;
        s1 += b.f[j] * p;
        s2 += b2[j] * p;
    }
    let inv = 1.0 / m as f64;
    (s0 * inv, s1 * inv, s2 * inv)
}

/// Poisson sums at every node of a ring of radius s by cyclic convolution.
fn ring_poisson_sums(b: &Boundary, b2: &[f64], s: f64, gs: f64) -> (Vec<f64>, Vec<C64>, Vec<f64>) {
    let m = b.f.len();
    let ker: Vec<C64> = (0..m)
        .map(|j| C64::new(poisson_kernel(s, gs, 0.0, TAU * j as f64 / m as f64) / m as f64, 0.0))
        .collect();
    let mut spec = ker;
    fourier::fft(&mut spec);
    let ones = vec![C64::new(1.0, 0.0); m];
    let s0 = fourier::conv_with_spectrum(&ones, &spec).into_iter().map(|v| v.re).collect();
    let s1 = fourier::conv_with_spectrum(&b.f, &spec);
    let b2c: Vec<C64> = b2.iter().map(|&v| C64::new(v, 0.0)).collect();
    let s2 = fourier::conv_with_spectrum(&b2c, &spec).into_iter().map(|v| v.re).collect();
    (s0, s1, s2)
}

/// Route 2: ∫ D_ζ dν + ∫ (1−|w|²) D_w dμ, local integrals by Douglas' formula and Poisson sums.
pub fn dirichlet_local(f: &Holomorphic, w: &SuperharmonicWeight) -> Energy {
    let n = f.grid_size();
    let m = 2 * n;
    let rho = f.surrogate_radius();
    let mut parts = Vec::new();
    for &(a, mass) in &w.nu.atoms {
        if mass > 0.0 {
            parts.push(mass * douglas_at(f, rho, m, a));
        }
    }
    if let Some(d) = w.nu.density_on(m) {
        let b = Boundary::new(f, rho, m, 0.0, false);
        let k = chord_kernel(m);
        let kc: Vec<C64> = k.iter().map(|&v| C64::new(v, 0.0)).collect();
        let ksum: f64 = k.iter().sum();
        let b2: Vec<C64> = b.f.iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
        let t1 = fourier::cyclic_conv(&b2, &kc);
        let t2 = fourier::cyclic_conv(&b.f, &kc);
        let mut s = 0.0;
        for i in 0..m {
            let di = t1[i].re + b2[i].re * ksum - 2.0 * (b.f[i].conj() * t2[i]).re + b.tang[i].norm_sqr();
            s += d[i] * di / m as f64;
        }
        parts.push(s / m as f64);
    }
    let mut cache = BoundaryCache::new(f, false);
    for a in &w.mu.atoms {
        if a.mass == 0.0 {
            continue;
        }
        let mm = atom_nodes(a.gap, m);
        let b = cache.get(mm);
        let b2 = b.abs_sq();
        let (s0, s1, s2) = poisson_sums(b, &b2, a.radius, a.gap, a.angle);
        let fw = f.eval(rho * a.position());
        parts.push(a.mass * (s2 - 2.0 * (fw.conj() * s1).re + fw.norm_sqr() * s0));
    }
    let bbar = {
        let b = cache.get(m);
        b.abs_sq().iter().sum::<f64>() / m as f64
    };
    for ring in w.mu.rings() {
        if ring.uniform {
            let r = f.ring(rho * ring.radius, m, 0.0);
            let inner = r.f.iter().map(|v| v.norm_sqr()).sum::<f64>() / m as f64;
            parts.push(ring.total * (bbar - inner));
        } else {
            let mm = ring_nodes(ring, m);
            let b = cache.get(mm);
            let b2 = b.abs_sq();
            let (s0, s1, s2) = ring_poisson_sums(b, &b2, ring.radius, ring.gap);
            let masses = ring.masses_on(mm);
            let r = f.ring(rho * ring.radius, mm, 0.0);
            let mut s = 0.0;
            for l in 0..mm {
                let fl = r.f[l];
                s += masses[l] * (s2[l] - 2.0 * (fl.conj() * s1[l]).re + fl.norm_sqr() * s0[l]);
            }
            parts.push(s);
        }
    }
    Energy::total(parts)
}

/// Σ_k c_k s^{|k|} e^{ikφ} for real data with normalized coefficients c.
fn harmonic_extension(c: &[C64], s: f64, phi: f64) -> f64 {
    let m = c.len();
    let mut acc = c[0].re;
    let mut sk = 1.0;
    for (k, ck) in c.iter().enumerate().take(m / 2).skip(1) {
        sk *= s;
        if sk < 1e-300 {
            break;
        }
        acc += 2.0 * sk * (ck * C64::from_polar(1.0, k as f64 * phi)).re;
    }
    acc
}

/// Harmonic extension to all nodes of an l-point ring of radius s.
fn harmonic_extension_ring(c: &[C64], s: f64, l: usize) -> Vec<f64> {
    let mut spec = fourier::pad_spectrum(c, l.max(c.len()));
    let len = spec.len();
    for (k, v) in spec.iter_mut().enumerate() {
        let kk = k.min(len - k);
        *v *= s.powi(kk as i32);
    }
    fourier::ifft(&mut spec);
    spec.into_iter().map(|v| v.re).collect()
}

/// Route 3: Richter–Sundberg for ν, Ent_{σ_w}(2log|f|) for μ. None unless f is zero-free.
pub fn dirichlet_entropy(f: &Holomorphic, w: &SuperharmonicWeight) -> Option<Energy> {
    if !entropy_capable(f) {
        return None;
    }
    let n = f.grid_size();
    let m = 2 * n;
    let rho = f.surrogate_radius();
    let mut parts = Vec::new();
    for &(a, mass) in &w.nu.atoms {
        if mass > 0.0 {
            parts.push(mass * rs_at(f, rho, m, a));
        }
    }
    if let Some(d) = w.nu.density_on(n) {
        let b = Boundary::new(f, rho, n, 0.0, true);
        let h = b.log_abs.as_ref().unwrap();
        let dh = b.dlog.as_ref().unwrap();
        let e: Vec<f64> = h.iter().map(|v| (2.0 * v).exp()).collect();
        let k = chord_kernel(n);
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (ei, yi) = (e[i], 2.0 * h[i]);
                let mut s = 2.0 * ei * dh[i] * dh[i];
                for j in 0..n {
                    if j != i {
                        let kk = k[(j + n - i) % n];
                        s += (e[j] - ei - ei * (2.0 * h[j] - yi)) * kk;
                    }
                }
                d[i] * s / n as f64
            })
            .collect();
        parts.push(rows.iter().sum::<f64>() / n as f64);
    }
    if !w.mu.is_zero() {
        let b = Boundary::new(f, rho, m, 0.0, true);
        let h = b.log_abs.as_ref().unwrap();
        let b2 = b.abs_sq();
        let two_h: Vec<f64> = h.iter().map(|v| 2.0 * v).collect();
        let cb = fourier::coefficients_real(&b2);
        let ch = fourier::coefficients_real(&two_h);
        for a in &w.mu.atoms {
            if a.mass == 0.0 {
                continue;
            }
            let e1 = harmonic_extension(&cb, a.radius, a.angle);
            let e2 = harmonic_extension(&ch, a.radius, a.angle);
            parts.push(a.mass * (e1 - e2.exp()));
        }
        for ring in w.mu.rings() {
            let l = m.max(ring.masses.len());
            let e1 = harmonic_extension_ring(&cb, ring.radius, l);
            let e2 = harmonic_extension_ring(&ch, ring.radius, l);
            let masses = ring.masses_on(l);
            let s: f64 = (0..l).map(|j| masses[j] * (e1[j] - e2[j].exp())).sum();
            parts.push(s);
        }
    }
    Some(Energy::total(parts))
}

/// ∫∫ |f*(ζ)−f*(λ)|² (c·A_μ(ζ,λ) dm(ζ) + dν(ζ)/|ζ−λ|²) dm(λ) with c = DOUGLAS_CALIBRATION.
pub fn douglas_type_form(f: &Holomorphic, w: &SuperharmonicWeight) -> Energy {
    let n = f.grid_size();
    let m = 2 * n;
    let rho = f.surrogate_radius();
    let mut parts = Vec::new();
    let b = Boundary::new(f, rho, n, 0.0, false);
    let k = chord_kernel(n);
    if let Some(d) = w.nu.density_on(n) {
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let fi = b.f[i];
                let mut s = 0.0;
                for j in 0..n {
                    if j != i {
                        s += (b.f[j] - fi).norm_sqr() * k[(j + n - i) % n];
                    }
                }
                let nb = |j: usize| (b.f[j] - fi).norm_sqr() * k[1];
                s += 0.5 * (nb((i + 1) % n) + nb((i + n - 1) % n));
                d[i] * s / n as f64
            })
            .collect();
        parts.push(rows.iter().sum::<f64>() / n as f64);
    }
    for &(a, mass) in &w.nu.atoms {
        if mass == 0.0 {
            continue;
        }
        let fa = f.eval(C64::from_polar(rho, a));
        let za = C64::from_polar(1.0, a);
        let vals: Vec<Option<f64>> = (0..n)
            .map(|j| {
                let z = C64::from_polar(1.0, TAU * j as f64 / n as f64);
                let d2 = (z - za).norm_sqr();
                if d2 < 1e-24 {
                    None
                } else {
                    Some((b.f[j] - fa).norm_sqr() / d2)
                }
            })
            .collect();
        let mut s = 0.0;
        for j in 0..n {
            s += match vals[j] {
                Some(v) => v,
                None => {
                    let l = vals[(j + n - 1) % n].unwrap_or(0.0);
                    let r = vals[(j + 1) % n].unwrap_or(0.0);
                    0.5 * (l + r)
                }
            };
        }
        parts.push(mass * s / n as f64);
    }
    let mut cache = BoundaryCache::new(f, false);
    for a in &w.mu.atoms {
        if a.mass == 0.0 {
            continue;
        }
        let bb = cache.get(atom_nodes(a.gap, m));
        let b2 = bb.abs_sq();
        let (s0, s1, s2) = poisson_sums(bb, &b2, a.radius, a.gap, a.angle);
        parts.push(DOUGLAS_CALIBRATION * a.mass * 2.0 * (s0 * s2 - s1.norm_sqr()));
    }
    let mut autocorr: HashMap<usize, Vec<f64>> = HashMap::new();
    for ring in w.mu.rings() {
        let mm = ring_nodes(ring, m);
        if ring.uniform {
            let c = autocorr.entry(mm).or_insert_with(|| {
                let bb = cache.get(mm);
                difference_autocorrelation(&bb.f)
            });
            let mut s = 0.0;
            for (dd, cd) in c.iter().enumerate().skip(1) {
                s += ring_a_kernel(ring, TAU * dd as f64 / mm as f64, None) * cd;
            }
            parts.push(DOUGLAS_CALIBRATION * s / mm as f64);
        } else {
            let bb = cache.get(mm);
            let b2 = bb.abs_sq();
            let (s0, s1, s2) = ring_poisson_sums(bb, &b2, ring.radius, ring.gap);
            let masses = ring.masses_on(mm);
            let s: f64 = (0..mm).map(|l| masses[l] * 2.0 * (s0[l] * s2[l] - s1[l].norm_sqr())).sum();
            parts.push(DOUGLAS_CALIBRATION * s);
        }
    }
    Energy::total(parts)
}

/// C(d) = (1/m) Σ_i |f_{i+d} − f_i|².
fn difference_autocorrelation(f: &[C64]) -> Vec<f64> {
    let m = f.len();
    let mut spec = f.to_vec();
    fourier::fft(&mut spec);
    let mut p: Vec<C64> = spec.iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
    fourier::ifft(&mut p);
    let scale = 1.0 / (m as f64 * m as f64);
    let mean = p[0].re * scale;
    p.iter().map(|v| 2.0 * (mean - v.re * scale)).collect()
}

/// ∫∫ (|f(ζ)|²−|f(λ)|²)·log|f(ζ)/f(λ)| / |ζ−λ|^{2−α} dm dm.
pub fn carleson_type_bound(f: &Holomorphic, alpha: f64) -> Result<Energy> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha = {alpha} must lie in (0,1)"));
    }
    if !entropy_capable(f) {
        return invalid("the Carleson-type bound needs a zero-free function");
    }
    let n = f.grid_size();
    let b = Boundary::new(f, f.surrogate_radius(), n, 0.0, true);
    let h = b.log_abs.as_ref().unwrap();
    let e: Vec<f64> = h.iter().map(|v| (2.0 * v).exp()).collect();
    let ker: Vec<f64> = (0..n)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                (2.0 * (PI * j as f64 / n as f64).sin()).powf(alpha - 2.0)
            }
        })
        .collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                if j != i {
                    s += (e[i] - e[j]) * (h[i] - h[j]) * ker[(j + n - i) % n];
                }
            }
            s
        })
        .collect();
    Ok(Energy::total(rows.into_iter().map(|r| r / (n as f64 * n as f64))))
}

/// Dyadic test grid π2^{-j}, j = 0..=40.
pub fn dyadic_grid() -> Vec<f64> {
    (0..=40).map(|j| PI * 0.5f64.powi(j)).collect()
}

/// sup_y |φ'(y)| F_{μ,ζ}(y) · sup φ on the dyadic grid, ζ = e^{iθ}.
pub fn ne_bound(phi: &DistanceProfile, theta: f64, mu: &DiscMeasure) -> f64 {
    let grid = dyadic_grid();
    let sup_phi = grid.iter().map(|&y| phi.value(y)).fold(0.0, f64::max);
    let sup_prod = grid.iter().map(|&y| phi.derivative(y).abs() * f_mu_profile(mu, y, theta)).fold(0.0, f64::max);
    sup_prod * sup_phi
}

/// ∫_ε^π ∫_ε^x |φ'(x)|/(xφ(x)) φ(y) dy dx / φ(ε), ε the smallest dyadic grid point.
pub fn elementary_lemma_ratio(phi: &DistanceProfile) -> f64 {
    let grid = dyadic_grid();
    let eps = *grid.last().unwrap();
    let gl = GaussLegendre::new(16);
    let mut segs: Vec<(f64, f64)> = grid.windows(2).map(|w| (w[1], w[0])).collect();
    segs.reverse();
    let mut below = 0.0;
    let mut outer = 0.0;
    for &(a, b) in &segs {
        for (x, wx) in gl.on(a, b) {
            let partial: f64 = gl.on(a, x).map(|(y, wy)| wy * phi.value(y)).sum();
            let inner = below + partial;
            let v = phi.value(x);
            if v > 0.0 {
                outer += wx * phi.derivative(x).abs() / (x * v) * inner;
            }
        }
        below += gl.on(a, b).map(|(y, wy)| wy * phi.value(y)).sum::<f64>();
    }
    let _ = eps;
    outer / phi.value(eps)
}

/// ⟨g,h⟩ = ⟨g,h⟩_{H²} + D_ω(g,h) on Taylor coefficients of degree below `len`, as hᴴMg.
///
/// Disc atoms contribute ∫ g h̄ P_w dm − g(w)h̄(w), rings the angular average of that, and ν
/// the sum over i of the (g − g(ζ))/(z − ζ) coefficient pairings.
#[derive(Clone, Debug)]
pub struct CoefficientForm {
    matrix: DMatrix<C64>,
}

impl CoefficientForm {
    pub fn new(w: &SuperharmonicWeight, len: usize) -> Self {
        let mut m = DMatrix::<C64>::identity(len, len);
        let l = len as i64;
        if !w.nu.is_zero() {
            let modes: Vec<C64> = (-(l - 1)..l).map(|k| w.nu.mode(k)).collect();
            for a in 0..len {
                for b in 0..len {
                    m[(a, b)] += modes[(a as i64 - b as i64 + l - 1) as usize] * a.min(b) as f64;
                }
            }
        }
        for atom in w.mu.atoms.iter().filter(|a| a.mass > 0.0) {
            let z = atom.position();
            let mut pw = vec![C64::new(1.0, 0.0); len];
            for k in 1..len {
                pw[k] = pw[k - 1] * z;
            }
            for a in 0..len {
                for b in 0..len {
                    let toeplitz = if b >= a { pw[b - a] } else { pw[a - b].conj() };
                    m[(a, b)] += atom.mass * (toeplitz - pw[b] * pw[a].conj());
                }
            }
        }
        for ring in w.mu.rings() {
            let s = ring.radius;
            let band = ring.band();
            let ln_s = (-ring.gap).ln_1p();
            for a in 0..len {
                let lo = (a as i64 - band).max(0) as usize;
                let hi = ((a as i64 + band) as usize).min(len - 1);
                for b in lo..=hi {
                    let d = a.abs_diff(b) as f64;
                    let w = if s == 0.0 {
                        if d == 0.0 && a > 0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        (d * ln_s).exp() - ((a + b) as f64 * ln_s).exp()
                    };
                    m[(a, b)] += ring.mode(a as i64 - b as i64) * w;
                }
            }
        }
        CoefficientForm { matrix: m }
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    fn pad(&self, g: &[C64]) -> DVector<C64> {
        let mut v = DVector::zeros(self.len());
        for (i, c) in g.iter().take(self.len()).enumerate() {
            v[i] = *c;
        }
        v
    }

    pub fn inner(&self, g: &[C64], h: &[C64]) -> C64 {
        let (g, h) = (self.pad(g), self.pad(h));
        h.dotc(&(&self.matrix * g))
    }

    /// D_ω(g) alone.
    pub fn dirichlet(&self, g: &[C64]) -> f64 {
        let h2: f64 = g.iter().take(self.len()).map(|c| c.norm_sqr()).sum();
        self.inner(g, g).re - h2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{BoundaryMeasure, DiscAtom, QuadratureGrid};
    use crate::outer::{self, OuterFunction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64, y: f64) -> C64 {
        C64::new(x, y)
    }

    fn z_pow(n: usize) -> Holomorphic {
        Holomorphic::monomial(n)
    }

    #[test]
    fn bregman_examples() {
        for x in [-3.0, 0.0, 3.0] {
            assert_eq!(bregman_f(x, x), 0.0);
        }
        assert_eq!(bregman_f(0.0, f64::NEG_INFINITY), 1.0);
        assert!((bregman_f(1.0, 0.0) - (std::f64::consts::E - 2.0)).abs() < 1e-15);
        assert!((bregman_f(1.0, 0.0) - 0.718282).abs() < 1e-6);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(phi_entropy(&[0.25; 4], &[0.7; 4]), 0.0);
        let v = phi_entropy(&[0.5, 0.5], &[0.0, 2.0 * 2f64.ln()]);
        assert!((v - 0.5).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u: Vec<f64> = (0..7).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut s: Vec<f64> = (0..7).map(|_| rng.gen_range(0.1..1.0)).collect();
            let t: f64 = s.iter().sum();
            s.iter_mut().for_each(|v| *v /= t);
            let a: f64 = s.iter().zip(&u).map(|(p, x)| p * x).sum();
            let at = |b: f64| s.iter().zip(&u).map(|(p, x)| p * bregman_f(*x, b)).sum::<f64>();
            assert!(at(a) <= at(a + 0.1) && at(a) <= at(a - 0.1));
            let (inf, arg) = phi_entropy_inf(&s, &u);
            assert!((inf - phi_entropy(&s, &u)).abs() < 1e-12);
            assert!((arg - a).abs() < 1e-5);
        }
    }

    #[test]
    fn local_measure_is_probability() {
        for w in [c(0.0, 0.0), c(0.5, 0.3), c(-0.99, 0.0), c(0.0, 0.999)] {
            let m = LocalMeasure::nodes_for(w, 64);
            let s = LocalMeasure::new(w, m).unwrap();
            assert!((s.raw_mass - 1.0).abs() < 1e-10, "{w} {}", s.raw_mass);
        }
        assert!(LocalMeasure::new(c(1.0, 0.0), 64).is_err());
    }

    #[test]
    fn local_interior_examples() {
        let one = Holomorphic::Outer(OuterFunction::constant(64, 0.3).unwrap());
        let r = local_dirichlet_interior(&one, c(0.2, 0.4)).unwrap();
        assert!(r.douglas.value() < 1e-20);
        assert!(r.entropy.unwrap().value() < 1e-20);
        for w in [c(0.0, 0.0), c(0.3, -0.5), c(0.9, 0.0)] {
            let r = local_dirichlet_interior(&z_pow(1), w).unwrap();
            assert!((r.douglas.value() - 1.0).abs() < 1e-5);
            assert!(r.entropy.is_none());
        }
        let r = local_dirichlet_interior(&z_pow(2), c(0.0, 0.0)).unwrap();
        assert!((r.douglas.value() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn local_interior_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let f = Holomorphic::Outer(outer::random_smooth(&mut rng, 512, 8, 1.0).unwrap());
            let w = C64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU));
            let r = local_dirichlet_interior(&f, w).unwrap();
            let (a, b) = (r.douglas.value(), r.entropy.unwrap().value());
            assert!((a - b).abs() < 1e-8 * a.max(1e-12), "{a} {b}");
        }
    }

    #[test]
    fn local_boundary_examples() {
        let one = Holomorphic::Outer(OuterFunction::constant(64, 0.0).unwrap());
        let r = local_dirichlet_boundary(&one, 0.4);
        assert_eq!(r.douglas.value(), 0.0);
        assert_eq!(r.entropy.unwrap().value(), 0.0);
        let r = local_dirichlet_boundary(&z_pow(1), 0.0);
        assert!((r.douglas.value() - 1.0).abs() < 1e-5);
        let p = Holomorphic::Polynomial(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let r = local_dirichlet_boundary(&p, 0.0);
        assert!((r.douglas.value() - 1.0).abs() < 1e-5);
        assert!(r.entropy.is_some());
        let n = 4096;
        let f = Holomorphic::Outer(OuterFunction::from_fn(n, |t| (2.0 * (0.5 * t).sin()).abs().ln()).unwrap());
        let r = local_dirichlet_boundary(&f, 0.0);
        assert!((r.douglas.value() - 1.0).abs() < 1e-5, "{:?}", r);
        assert!((r.entropy.unwrap().value() - 1.0).abs() < 1e-3, "{:?}", r);
    }

    #[test]
    fn classical_monomials() {
        let w = SuperharmonicWeight::classical();
        for k in 1..=3 {
            let r = dirichlet(&z_pow(k), &w);
            assert!((r.area.value() - k as f64).abs() < 1e-8, "{:?}", r);
            assert!((r.local.value() - k as f64).abs() < 1e-4, "{:?}", r);
            assert!(r.entropy.is_none());
            assert!((douglas_type_form(&z_pow(k), &w).value() - k as f64).abs() < 1e-4);
        }
    }

    #[test]
    fn point_masses() {
        let w = SuperharmonicWeight::harmonic_point(0.0, 1.0).unwrap();
        let r = dirichlet(&z_pow(1), &w);
        assert!((r.area.value() - 1.0).abs() < 1e-5, "{:?}", r);
        assert!((r.local.value() - 1.0).abs() < 1e-5);
        assert!((douglas_type_form(&z_pow(1), &w).value() - 1.0).abs() < 1e-5);
        let w = SuperharmonicWeight::disc_only(DiscMeasure::point(c(0.0, 0.0), 1.0).unwrap());
        let r = dirichlet(&z_pow(1), &w);
        assert!((r.area.value() - 1.0).abs() < 1e-8, "{:?}", r);
        assert!((r.local.value() - 1.0).abs() < 1e-5, "{:?}", r);
        assert!((douglas_type_form(&z_pow(1), &w).value() - 1.0).abs() < 1e-5);
        assert_eq!(DOUGLAS_CALIBRATION, 0.5);
    }

    #[test]
    fn constants_have_zero_energy() {
        let f = Holomorphic::Outer(OuterFunction::constant(128, 0.7).unwrap());
        let mu = DiscMeasure::atoms(vec![DiscAtom::at(c(0.3, 0.2), 1.0).unwrap()]).unwrap();
        let w = SuperharmonicWeight::new(mu, BoundaryMeasure::arc_length());
        let r = dirichlet(&f, &w);
        for v in r.values() {
            assert!(v.abs() < 1e-12);
        }
        assert!(douglas_type_form(&f, &w).value() < 1e-12);
        assert!(carleson_type_bound(&f, 0.5).unwrap().value() < 1e-12);
    }

    #[test]
    fn routes_agree_on_mixed_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = Holomorphic::Outer(outer::random_smooth(&mut rng, 256, 6, 1.0).unwrap());
        let mu = DiscMeasure::atoms(vec![
            DiscAtom::at(c(0.0, 0.0), 0.5).unwrap(),
            DiscAtom::at(c(0.6, -0.3), 1.0).unwrap(),
            DiscAtom::from_gap(0.01, 2.0, 3.0).unwrap(),
        ])
        .unwrap();
        let nu = BoundaryMeasure::new(vec![(1.0, 0.5), (4.0, 0.25)], Some(vec![1.0, 0.5, 0.2, 0.5])).unwrap();
        let w = SuperharmonicWeight::new(mu, nu);
        let r = dirichlet(&f, &w);
        let mut v = r.values();
        v.push(douglas_type_form(&f, &w).value());
        // area route sees f, the others its dilate at 1 − 1/N²
        assert!(relative_spread(&v[1..]) < 1e-5, "{v:?}");
        assert!(relative_spread(&v) < 1e-3, "{v:?}");
    }

    #[test]
    fn standard_alpha_routes() {
        let grid = QuadratureGrid::dyadic(20, 4, 1).unwrap();
        let mu = DiscMeasure::standard_alpha(0.5, grid).unwrap();
        let w = SuperharmonicWeight::disc_only(mu);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = Holomorphic::Outer(outer::random_smooth(&mut rng, 256, 6, 1.0).unwrap());
        let r = dirichlet(&f, &w);
        let mut v = r.values();
        v.push(douglas_type_form(&f, &w).value());
        assert!(relative_spread(&v) < 1e-3, "{v:?}");
    }

    #[test]
    fn carleson_symmetric_and_finite() {
        let n = 1024;
        let f = Holomorphic::Outer(OuterFunction::from_fn(n, |t| (2.0 * (0.5 * t).sin()).abs().ln()).unwrap());
        let b = carleson_type_bound(&f, 0.5).unwrap();
        assert!(b.is_finite() && b.value() > 0.0);
        assert!(carleson_type_bound(&z_pow(1), 0.5).is_err());
    }

    #[test]
    fn ne_bound_examples() {
        let phi = DistanceProfile::Log(1.0);
        assert_eq!(ne_bound(&phi, 0.0, &DiscMeasure::zero()), 0.0);
        let delta = DiscMeasure::point(c(0.0, 0.0), 1.0).unwrap();
        assert_eq!(ne_bound(&DistanceProfile::Constant(1.0), 0.0, &delta), 0.0);
        let grid = dyadic_grid();
        let sup = grid.iter().map(|&y| (1.0 / y) * y * y / (1.0 + y * y)).fold(0.0, f64::max);
        let want = sup * phi.value(*grid.last().unwrap());
        assert!((ne_bound(&phi, 0.0, &delta) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn elementary_lemma_bounded() {
        for phi in [DistanceProfile::Log(1.0), DistanceProfile::Log(2.0), DistanceProfile::Power(-0.5)] {
            let r = elementary_lemma_ratio(&phi);
            assert!(r.is_finite() && r > 0.0 && r < 10.0, "{phi:?} {r}");
        }
    }

    #[test]
    fn lemma_grids() {
        let g20: Vec<f64> = (0..20).map(|i| -4.0 + 8.0 * i as f64 / 19.0).collect();
        assert_eq!(bregman_minmax_violations(&g20, 1e-12), 0);
        let g40: Vec<f64> = (0..40).map(|i| -4.0 + 8.0 * i as f64 / 39.0).collect();
        assert_eq!(bregman_square_violations(&g40, 1e-12), 0);
    }

    #[test]
    fn coefficient_form_matches_routes() {
        let form = CoefficientForm::new(&SuperharmonicWeight::classical(), 8);
        for n in 1..6 {
            let mut e = vec![c(0.0, 0.0); n + 1];
            e[n] = c(1.0, 0.0);
            assert!((form.dirichlet(&e) - n as f64).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let coeffs: Vec<C64> = (0..9).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let grid = QuadratureGrid::dyadic(20, 4, 8).unwrap();
        let mut atoms = DiscMeasure::standard_alpha(0.5, grid).unwrap();
        atoms.atoms.push(DiscAtom::at(c(0.6, -0.3), 1.0).unwrap());
        let nu = BoundaryMeasure::new(vec![(1.0, 0.5)], Some(vec![1.0, 0.5, 0.2, 0.5])).unwrap();
        let w = SuperharmonicWeight::new(DiscMeasure::new(atoms.atoms, atoms.density).unwrap(), nu);
        let form = CoefficientForm::new(&w, 12);
        // the area route reads f itself; the local route would see the dilate
        let route = dirichlet_area(&Holomorphic::Polynomial(coeffs.clone()), &w).value();
        let v = form.dirichlet(&coeffs);
        assert!((v - route).abs() < 1e-10 * route, "{v} vs {route}");
    }
}
