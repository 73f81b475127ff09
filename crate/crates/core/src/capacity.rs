//! Kernel-diagonal estimates, capacities of boundary sets and the capacitary inequalities.

use crate::error::{invalid, Error, Result};
use crate::fourier;
use crate::measure::{DiscMeasure, SuperharmonicWeight};
use crate::potentials::{poisson_kernel, ring_resolution, v_mu, DiscPoint};
use crate::quad::{self, GaussLegendre};
use crate::sets::{Arc, BoundarySet};
use crate::C64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

const TAU: f64 = 2.0 * PI;

pub const KKT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 100_000;
/// Dyadic radial levels used by the polarity test.
pub const POLAR_LEVELS: usize = 40;
pub const SLOPE_THRESHOLD: f64 = 0.1;
pub const EXPORT_MAGIC: &[u8; 8] = b"WDFORM01";

/// Alias images kept per Fourier mode for ring contributions.
const RING_ALIASES: i64 = 16;
const NU_ALIASES: i64 = 64;
const CELL_ORDER: usize = 8;

fn radial_block(mu: &DiscMeasure, theta: f64, u_lo: f64, u_hi: f64) -> f64 {
    if mu.is_zero() {
        return 1.0 / u_lo - 1.0 / u_hi;
    }
    // in s = ln(1−r) the integrand is 1/(V_μ + (1−r))
    let mut f = |s: f64| {
        let u = s.exp();
        1.0 / (v_mu(mu, DiscPoint::radial(u, theta)) + u)
    };
    quad::adaptive(&mut f, u_lo.ln(), u_hi.ln(), 1e-10, 16)
}

/// ∫ from r = 0 to r = 1 − `gap_end` along the ray at angle θ, split into dyadic blocks of 1−r.
fn radial_integral(mu: &DiscMeasure, theta: f64, gap_end: f64) -> f64 {
    let mut total = 0.0;
    let mut hi = 1.0;
    while hi > gap_end {
        let lo = (0.5 * hi).max(gap_end);
        total += radial_block(mu, theta, lo, hi);
        hi = lo;
    }
    total
}

/// 1 + ∫₀^{|z|} dr/((1−r)V_μ(rζ) + (1−r)²), ζ = z/|z|.
pub fn kernel_diag_estimate(z: C64, mu: &DiscMeasure) -> Result<f64> {
    let r = z.norm();
    if !(r > 0.0 && r < 1.0) {
        return invalid(format!("kernel estimate needs 0 < |z| < 1, got {r}"));
    }
    Ok(1.0 + radial_integral(mu, z.arg(), 1.0 - r))
}

/// Reciprocal kernel estimate at (1−|I|)·(midpoint of I).
pub fn arc_capacity_estimate(arc: &Arc, mu: &DiscMeasure) -> Result<f64> {
    let m = arc.measure();
    if !(m > 0.0 && m < 0.5) {
        return invalid(format!("arc measure {m} must lie in (0, 1/2)"));
    }
    Ok(1.0 / kernel_diag_estimate(C64::from_polar(1.0 - m, arc.midpoint()), mu)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct TailTest {
    pub verdict: SeriesVerdict,
    /// Least-squares slope of log₂(increment) over the last five levels.
    pub slope: f64,
    /// Fitted decay exponent p of increment ≈ k^{-p} over the last ten levels.
    pub power: f64,
}

/// Classify a series of nonnegative dyadic increments by its tail.
pub fn tail_test(increments: &[f64]) -> TailTest {
    let n = increments.len();
    let tail5 = &increments[n.saturating_sub(5)..];
    if tail5.is_empty() || tail5.iter().all(|&d| d <= 1e-300) {
        return TailTest { verdict: SeriesVerdict::Convergent, slope: f64::NEG_INFINITY, power: f64::INFINITY };
    }
    let lg = |d: f64| d.max(1e-300).log2();
    let start5 = n - tail5.len();
    let xs: Vec<f64> = (start5..n).map(|k| k as f64).collect();
    let ys: Vec<f64> = tail5.iter().map(|&d| lg(d)).collect();
    let slope = if xs.len() > 1 { quad::fit_slope(&xs, &ys) } else { 0.0 };
    let start10 = n.saturating_sub(10);
    let xs: Vec<f64> = (start10..n).map(|k| (k as f64 + 1.0).ln()).collect();
    let ys: Vec<f64> = increments[start10..].iter().map(|&d| d.max(1e-300).ln()).collect();
    let power = if xs.len() > 1 { -quad::fit_slope(&xs, &ys) } else { 0.0 };
    let verdict = if slope >= SLOPE_THRESHOLD {
        SeriesVerdict::Divergent
    } else if slope <= -SLOPE_THRESHOLD || power > 1.1 {
        SeriesVerdict::Convergent
    } else if power < 0.9 {
        SeriesVerdict::Divergent
    } else {
        SeriesVerdict::Inconclusive
    };
    TailTest { verdict, slope, power }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Polar,
    NonPolar,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct PolarityReport {
    pub verdict: Polarity,
    /// Partial integrals up to r = 1 − 2^{-k}, k = 1..=POLAR_LEVELS.
    pub partials: Vec<f64>,
    pub increments: Vec<f64>,
    pub tail: TailTest,
}

pub fn point_polar_test(theta: f64, mu: &DiscMeasure) -> PolarityReport {
    let increments: Vec<f64> = (1..=POLAR_LEVELS)
        .map(|k| {
            let hi = 0.5f64.powi(k as i32 - 1);
            radial_block(mu, theta, 0.5 * hi, hi)
        })
        .collect();
    let partials = increments
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    let tail = tail_test(&increments);
    let verdict = match tail.verdict {
        SeriesVerdict::Divergent => Polarity::Polar,
        SeriesVerdict::Convergent => Polarity::NonPolar,
        SeriesVerdict::Inconclusive => Polarity::Inconclusive,
    };
    PolarityReport { verdict, partials, increments, tail }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormMetadata {
    pub n: usize,
    pub diagonal: &'static str,
    pub cell_order: usize,
    pub ring_aliases: i64,
    pub boundary_aliases: i64,
}

/// Quadratic form of the harmonic weighted Dirichlet space on piecewise-linear boundary functions.
///
/// Stored as structured pieces: a circulant part (uniform rings and uniform ν), lumped diagonal
/// and rank-one parts (disc atoms), a sparse part (ν atoms), an optional dense part
/// (non-uniform ν density) and the lumped L² mass.
#[derive(Clone, Debug)]
pub struct DirichletFormMatrix {
    n: usize,
    eig: Vec<f64>,
    circ_row: Vec<f64>,
    diag: Vec<f64>,
    rank_one: Vec<(f64, Vec<f64>)>,
    sparse: Vec<Vec<(usize, f64)>>,
    dense: Option<Vec<f64>>,
    l2: f64,
    pub meta: FormMetadata,
}

/// (sin x / x)² for the hat-function transform at x = πk/N.
fn hat_factor(k: i64, n: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let x = PI * k as f64 / n as f64;
    let s = x.sin() / x;
    s * s
}

/// Quadrature nodes (local t ∈ [0,1], weight against dθ/2π) on cell c, refined toward `focus`.
fn cell_nodes(gl: &GaussLegendre, n: usize, c: usize, focus: Option<(f64, f64)>) -> Vec<(f64, f64)> {
    let h = TAU / n as f64;
    let th0 = c as f64 * h;
    let mut cuts = vec![0.0, 1.0];
    if let Some((phi, scale)) = focus {
        // signed offset of φ from the cell start, in cell units
        let off = ((phi - th0 + PI).rem_euclid(TAU) - PI) / h;
        let s = scale / h;
        let mut push = |x: f64| {
            if x > 0.0 && x < 1.0 {
                cuts.push(x);
            }
        };
        push(off);
        let mut d = s;
        while d < 1.0 {
            push(off - d);
            push(off + d);
            d *= 2.0;
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut out = Vec::with_capacity(cuts.len() * gl.nodes.len());
    for w in cuts.windows(2) {
        for (t, wt) in gl.on(w[0], w[1]) {
            out.push((t, wt / n as f64));
        }
    }
    out
}

fn angular_gap(a: f64, b: f64) -> f64 {
    ((a - b + PI).rem_euclid(TAU) - PI).abs()
}

/// p_j = ∫ φ_j P_w dm for the hat basis, normalized to total 1.
fn hat_poisson_weights(n: usize, radius: f64, gap: f64, angle: f64) -> Vec<f64> {
    if radius == 0.0 {
        return vec![1.0 / n as f64; n];
    }
    let gl = GaussLegendre::new(CELL_ORDER);
    let h = TAU / n as f64;
    let near = 8.0 * gap.max(h);
    let mut p = vec![0.0; n];
    for c in 0..n {
        let mid = (c as f64 + 0.5) * h;
        let focus = if angular_gap(mid, angle) < near + h { Some((angle, gap.min(h))) } else { None };
        let th0 = c as f64 * h;
        let (mut a, mut b) = (0.0, 0.0);
        for (t, w) in cell_nodes(&gl, n, c, focus) {
            let pk = poisson_kernel(radius, gap, angle, th0 + t * h);
            a += w * (1.0 - t) * pk;
            b += w * t * pk;
        }
        p[c] += a;
        p[(c + 1) % n] += b;
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}

fn sparse_add(map: &mut HashMap<(usize, usize), f64>, i: usize, j: usize, v: f64) {
    *map.entry((i, j)).or_insert(0.0) += v;
}

/// m·∫|u(a) − u(λ)|²/|e^{ia} − λ|² dm(λ) for piecewise-linear u, accumulated cell by cell.
fn boundary_atom_block(map: &mut HashMap<(usize, usize), f64>, n: usize, a: f64, mass: f64) {
    let gl = GaussLegendre::new(CELL_ORDER);
    let h = TAU / n as f64;
    let x = a.rem_euclid(TAU) / h;
    let mut a0 = x.floor() as usize % n;
    let mut alpha1 = x - x.floor();
    if alpha1 > 1.0 - 1e-14 {
        a0 = (a0 + 1) % n;
        alpha1 = 0.0;
    }
    let a1 = (a0 + 1) % n;
    let alpha0 = 1.0 - alpha1;
    for c in 0..n {
        let mid = (c as f64 + 0.5) * h;
        let focus = if angular_gap(mid, a) < 3.0 * h { Some((a, h / 1024.0)) } else { None };
        let th0 = c as f64 * h;
        let c1 = (c + 1) % n;
        let mut acc: [[f64; 4]; 4] = [[0.0; 4]; 4];
        let idx = [a0, a1, c, c1];
        for (t, w) in cell_nodes(&gl, n, c, focus) {
            let lam = th0 + t * h;
            let s = (0.5 * (lam - a)).sin();
            let k = 1.0 / (4.0 * s * s);
            if !k.is_finite() {
                continue;
            }
            // merge coefficients on coinciding nodes
            let raw = [alpha0, alpha1, -(1.0 - t), -t];
            let mut v = [0.0; 4];
            for i in 0..4 {
                let first = (0..4).find(|&j| idx[j] == idx[i]).unwrap();
                v[first] += raw[i];
            }
            for i in 0..4 {
                for j in 0..4 {
                    acc[i][j] += w * k * v[i] * v[j];
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                if acc[i][j] != 0.0 {
                    sparse_add(map, idx[i], idx[j], mass * acc[i][j]);
                }
            }
        }
    }
}

/// Σ_l 1/|x + l|³ over all integers l, x ∈ (0,1).
fn periodic_cube_sum(x: f64) -> f64 {
    let mut s = 0.0;
    for l in 0..NU_ALIASES {
        let l = l as f64;
        s += 1.0 / (x + l).powi(3) + 1.0 / (1.0 - x + l).powi(3);
    }
    let tail = |y: f64| 0.5 / (y + NU_ALIASES as f64 - 0.5).powi(2);
    s + tail(x) + tail(1.0 - x)
}

impl DirichletFormMatrix {
    /// Assemble ∫∫|u(ζ)−u(λ)|²(A_μ(ζ,λ)dm(ζ) + dν(ζ)/|ζ−λ|²)dm(λ) + ∫|u|²dm on an n-point grid.
    pub fn assemble(w: &SuperharmonicWeight, n: usize) -> Result<Self> {
        if !fourier::is_pow2(n) || n < 8 {
            return invalid(format!("form grid size {n} must be a power of two ≥ 8"));
        }
        let nf = n as f64;
        let mut eig = vec![0.0; n];

        // uniform ν density: λ_k = c|k|
        let (nu_floor, nu_excess) = match w.nu.density_on(n) {
            None => (0.0, None),
            Some(d) => {
                let lo = d.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
                let excess: Vec<f64> = d.iter().map(|v| (v - lo).max(0.0)).collect();
                let any = excess.iter().any(|&e| e > 1e-14 * lo.max(1e-300));
                (lo, if any { Some(excess) } else { None })
            }
        };
        if nu_floor > 0.0 {
            for (m, e) in eig.iter_mut().enumerate().skip(1) {
                let x = m as f64 / nf;
                let s = (PI * x).sin();
                // Σ_l sinc⁴·|k| = (N/π)⁴ sin⁴(πm/N) N^{-3} Σ_l |x+l|^{-3}
                *e += nu_floor * (nf / PI).powi(4) * s.powi(4) * periodic_cube_sum(x) / nf.powi(3);
            }
        }

        // uniform rings: λ_k = 2·total·(1 − s^{2|k|})
        let uniform: Vec<(f64, f64)> = w
            .mu
            .rings()
            .iter()
            .filter(|r| r.uniform && r.total > 0.0)
            .map(|r| (r.total, (-r.gap).ln_1p()))
            .collect();
        if !uniform.is_empty() {
            let ring_eig: Vec<f64> = (1..n)
                .into_par_iter()
                .map(|m| {
                    let mut acc = 0.0;
                    for l in -RING_ALIASES..=RING_ALIASES {
                        let k = m as i64 + l * n as i64;
                        let sig = hat_factor(k, n);
                        let sig2 = sig * sig;
                        let ka = k.unsigned_abs() as f64;
                        let mut lam = 0.0;
                        for &(total, ln_s) in &uniform {
                            lam += 2.0 * total * -(2.0 * ka * ln_s).exp_m1();
                        }
                        acc += sig2 * lam;
                    }
                    acc
                })
                .collect();
            for (m, v) in ring_eig.into_iter().enumerate() {
                eig[m + 1] += v;
            }
        }

        // disc atoms and non-uniform rings: 2m(diag p − ppᵀ)
        let mut points: Vec<(f64, f64, f64, f64)> =
            w.mu.atoms.iter().map(|a| (a.radius, a.gap, a.angle, a.mass)).collect();
        for r in w.mu.rings().iter().filter(|r| !r.uniform) {
            let m = ring_resolution(r, 4.0).min(1024);
            for (l, ml) in r.masses_on(m).into_iter().enumerate() {
                points.push((r.radius, r.gap, TAU * l as f64 / m as f64, ml));
            }
        }
        let weights: Vec<(f64, Vec<f64>)> = points
            .par_iter()
            .filter(|p| p.3 > 0.0)
            .map(|&(s, g, phi, mass)| (2.0 * mass, hat_poisson_weights(n, s, g, phi)))
            .collect();
        let mut diag = vec![0.0; n];
        for (c, p) in &weights {
            for (d, v) in diag.iter_mut().zip(p) {
                *d += c * v;
            }
        }
        let mut dense = None;
        let mut rank_one = weights;
        if rank_one.len() > n / 4 {
            let mut m = vec![0.0; n * n];
            for (c, p) in &rank_one {
                for i in 0..n {
                    let ci = c * p[i];
                    for j in 0..n {
                        m[i * n + j] -= ci * p[j];
                    }
                }
            }
            dense = Some(m);
            rank_one = Vec::new();
        }

        // non-uniform part of the ν density by nodal sums
        if let Some(e) = nu_excess {
            let m = dense.get_or_insert_with(|| vec![0.0; n * n]);
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut row = vec![0.0; n];
                    let mut s = 0.0;
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let sn = (PI * (i as f64 - j as f64) / nf).sin();
                        let wij = 2.0 * 0.5 * (e[i] + e[j]) / (nf * nf * 4.0 * sn * sn);
                        row[j] = -wij;
                        s += wij;
                    }
                    row[i] = s;
                    row
                })
                .collect();
            for (i, row) in rows.into_iter().enumerate() {
                for (j, v) in row.into_iter().enumerate() {
                    m[i * n + j] += v;
                }
            }
        }

        // ν atoms
        let mut map = HashMap::new();
        for &(a, mass) in &w.nu.atoms {
            if mass > 0.0 {
                boundary_atom_block(&mut map, n, a, mass);
            }
        }
        let mut sparse = vec![Vec::new(); n];
        for ((i, j), v) in map {
            sparse[i].push((j, v));
        }
        for row in &mut sparse {
            row.sort_by_key(|e| e.0);
        }

        let mut spec: Vec<C64> = eig.iter().map(|&e| C64::new(e, 0.0)).collect();
        fourier::ifft(&mut spec);
        let circ_row = spec.iter().map(|c| c.re / (nf * nf)).collect();

        Ok(DirichletFormMatrix {
            n,
            eig,
            circ_row,
            diag,
            rank_one,
            sparse,
            dense,
            l2: 1.0 / nf,
            meta: FormMetadata {
                n,
                diagonal: "piecewise-linear weak form",
                cell_order: CELL_ORDER,
                ring_aliases: RING_ALIASES,
                boundary_aliases: NU_ALIASES,
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Lumped L² mass per node.
    pub fn l2_weight(&self) -> f64 {
        self.l2
    }

    fn apply_circulant(&self, u: &[f64], out: &mut [f64]) {
        if self.eig.iter().all(|&e| e == 0.0) {
            return;
        }
        let nf = self.n as f64;
        let mut b: Vec<C64> = u.iter().map(|&x| C64::new(x, 0.0)).collect();
        fourier::fft(&mut b);
        for (v, e) in b.iter_mut().zip(&self.eig) {
            *v *= *e;
        }
        fourier::ifft(&mut b);
        for (o, v) in out.iter_mut().zip(&b) {
            *o += v.re / (nf * nf);
        }
    }

    /// Dirichlet part applied to u.
    pub fn apply_dirichlet(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        self.apply_circulant(u, &mut out);
        for i in 0..n {
            out[i] += self.diag[i] * u[i];
        }
        for (c, p) in &self.rank_one {
            let dot: f64 = p.iter().zip(u).map(|(a, b)| a * b).sum();
            for (o, pi) in out.iter_mut().zip(p) {
                *o -= c * dot * pi;
            }
        }
        for (i, row) in self.sparse.iter().enumerate() {
            for &(j, v) in row {
                out[i] += v * u[j];
            }
        }
        if let Some(m) = &self.dense {
            for i in 0..n {
                out[i] += m[i * n..(i + 1) * n].iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        out
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = self.apply_dirichlet(u);
        for (o, x) in out.iter_mut().zip(u) {
            *o += self.l2 * x;
        }
        out
    }

    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        self.apply_dirichlet(u).iter().zip(u).map(|(a, b)| a * b).sum()
    }

    /// Full form uᵀQu.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.apply(u).iter().zip(u).map(|(a, b)| a * b).sum()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.n;
        let mut v = self.circ_row[(i + n - j) % n];
        if i == j {
            v += self.diag[i] + self.l2;
        }
        for (c, p) in &self.rank_one {
            v -= c * p[i] * p[j];
        }
        if let Ok(k) = self.sparse[i].binary_search_by_key(&j, |e| e.0) {
            v += self.sparse[i][k].1;
        }
        if let Some(m) = &self.dense {
            v += m[i * n + j];
        }
        v
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.entry(i, i)).collect()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        (0..n * n).into_par_iter().map(|k| self.entry(k / n, k % n)).collect()
    }

    /// Header `WDFORM01`, N as u64, then N² row-major f64, all little-endian.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(EXPORT_MAGIC)?;
        out.write_all(&(self.n as u64).to_le_bytes())?;
        for v in self.to_dense() {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Inverse of the circulant part plus the mean of the remaining diagonal.
    fn precondition(&self, r: &[f64], shift: f64) -> Vec<f64> {
        let nf = self.n as f64;
        let mut b: Vec<C64> = r.iter().map(|&x| C64::new(x, 0.0)).collect();
        fourier::fft(&mut b);
        for (v, e) in b.iter_mut().zip(&self.eig) {
            *v /= e / (nf * nf) + shift;
        }
        fourier::ifft(&mut b);
        b.iter().map(|v| v.re / nf).collect()
    }
}

/// Read a matrix written by `write_binary`.
pub fn read_form_binary<R: Read>(mut input: R) -> Result<(usize, Vec<f64>)> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != EXPORT_MAGIC {
        return invalid("not a form export (bad header)");
    }
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        input.read_exact(&mut b8)?;
        data.push(f64::from_le_bytes(b8));
    }
    Ok((n, data))
}

pub fn assemble_form(w: &SuperharmonicWeight, n: usize) -> Result<DirichletFormMatrix> {
    DirichletFormMatrix::assemble(w, n)
}

#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub value: f64,
    pub minimizer: Vec<f64>,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub converged: bool,
    /// Neighbourhood radius used for the constrained node set.
    pub t: f64,
    pub constrained: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Fixed,
    Free,
    Lower,
    Upper,
}

fn kkt_residual(slots: &[Slot], g: &[f64], d: &[f64]) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..g.len() {
        let v = match slots[i] {
            Slot::Fixed => 0.0,
            Slot::Free => g[i].abs(),
            Slot::Lower => (-g[i]).max(0.0),
            Slot::Upper => g[i].max(0.0),
        };
        r = r.max(v / d[i]);
    }
    r
}

/// Preconditioned CG for Q_FF d = b_F; returns (d, iterations).
fn pcg_free(q: &DirichletFormMatrix, free: &[bool], b: &[f64], shift: f64, diag: &[f64], budget: usize) -> (Vec<f64>, usize) {
    let n = q.n;
    let mask = |v: &mut Vec<f64>| {
        for i in 0..n {
            if !free[i] {
                v[i] = 0.0;
            }
        }
    };
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    mask(&mut r);
    let scaled = |r: &[f64]| (0..n).map(|i| r[i].abs() / diag[i]).fold(0.0, f64::max);
    let target = 1e-3 * KKT_TOL;
    if scaled(&r) <= target {
        return (x, 0);
    }
    let mut z = q.precondition(&r, shift);
    mask(&mut z);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut it = 0;
    while it < budget {
        it += 1;
        let mut ap = q.apply(&p);
        mask(&mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if scaled(&r) <= target {
            break;
        }
        let mut z = q.precondition(&r, shift);
        mask(&mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    (x, it)
}

/// Projected Barzilai–Borwein iterations on min uᵀQu over the box with fixed nodes.
fn projected_bb(q: &DirichletFormMatrix, fixed: &[bool], u: &mut [f64], diag: &[f64], budget: usize) -> usize {
    let n = q.n;
    let mut g = q.apply(u);
    let mut step = 1.0 / diag.iter().cloned().fold(0.0, f64::max);
    let mut it = 0;
    while it < budget {
        it += 1;
        let mut s = vec![0.0; n];
        let mut moved = false;
        for i in 0..n {
            if fixed[i] {
                continue;
            }
            let v = (u[i] - step * g[i]).clamp(0.0, 1.0);
            s[i] = v - u[i];
            if s[i] != 0.0 {
                moved = true;
            }
        }
        if !moved {
            break;
        }
        let y = q.apply(&s);
        for i in 0..n {
            u[i] += s[i];
            g[i] += y[i];
        }
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|a| a * a).sum();
        step = if sy > 0.0 { (ss / sy).clamp(1e-14, 1e14) } else { step };
        let slots: Vec<Slot> = (0..n)
            .map(|i| {
                if fixed[i] {
                    Slot::Fixed
                } else if u[i] <= 0.0 {
                    Slot::Lower
                } else if u[i] >= 1.0 {
                    Slot::Upper
                } else {
                    Slot::Free
                }
            })
            .collect();
        if kkt_residual(&slots, &g, diag) <= KKT_TOL {
            break;
        }
    }
    it
}

/// min uᵀQu subject to u = 1 on `fixed` and 0 ≤ u ≤ 1 elsewhere.
pub fn solve_constrained(q: &DirichletFormMatrix, fixed: &[bool]) -> CapacityResult {
    let n = q.n;
    assert_eq!(fixed.len(), n);
    let diag = q.diagonal();
    let nf = n as f64;
    let circ_diag = q.circ_row[0];
    let shift = diag.iter().map(|d| d - circ_diag).sum::<f64>() / nf;
    let mut u: Vec<f64> = fixed.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
    let mut slots: Vec<Slot> = fixed.iter().map(|&f| if f { Slot::Fixed } else { Slot::Free }).collect();
    let mut iterations = 0;
    let mut converged = false;
    for _outer in 0..500 {
        let free: Vec<bool> = slots.iter().map(|s| *s == Slot::Free).collect();
        if free.iter().any(|&f| f) {
            let g = q.apply(&u);
            let b: Vec<f64> = g.iter().map(|v| -v).collect();
            let budget = (MAX_ITERATIONS - iterations).min(4 * n + 100);
            let (d, it) = pcg_free(q, &free, &b, shift, &diag, budget);
            iterations += it;
            let mut alpha: f64 = 1.0;
            for i in 0..n {
                if free[i] {
                    if u[i] + d[i] < 0.0 {
                        alpha = alpha.min(u[i] / -d[i]);
                    } else if u[i] + d[i] > 1.0 {
                        alpha = alpha.min((1.0 - u[i]) / d[i]);
                    }
                }
            }
            for i in 0..n {
                if free[i] {
                    u[i] = (u[i] + alpha * d[i]).clamp(0.0, 1.0);
                }
            }
            if alpha < 1.0 {
                for i in 0..n {
                    if free[i] {
                        if u[i] <= 1e-15 {
                            u[i] = 0.0;
                            slots[i] = Slot::Lower;
                        } else if u[i] >= 1.0 - 1e-15 {
                            u[i] = 1.0;
                            slots[i] = Slot::Upper;
                        }
                    }
                }
                if iterations >= MAX_ITERATIONS {
                    break;
                }
                continue;
            }
        }
        let g = q.apply(&u);
        let mut released = false;
        for i in 0..n {
            let v = match slots[i] {
                Slot::Lower => -g[i],
                Slot::Upper => g[i],
                _ => 0.0,
            };
            if v / diag[i] > KKT_TOL {
                slots[i] = Slot::Free;
                released = true;
            }
        }
        if !released && kkt_residual(&slots, &g, &diag) <= KKT_TOL {
            converged = true;
            break;
        }
        if iterations >= MAX_ITERATIONS {
            break;
        }
    }
    if !converged && iterations < MAX_ITERATIONS {
        iterations += projected_bb(q, fixed, &mut u, &diag, MAX_ITERATIONS - iterations);
    }
    let g = q.apply(&u);
    let slots: Vec<Slot> = (0..n)
        .map(|i| {
            if fixed[i] {
                Slot::Fixed
            } else if u[i] <= 0.0 {
                Slot::Lower
            } else if u[i] >= 1.0 {
                Slot::Upper
            } else {
                Slot::Free
            }
        })
        .collect();
    let kkt = kkt_residual(&slots, &g, &diag);
    let value = g.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>().max(0.0);
    CapacityResult {
        value,
        minimizer: u,
        iterations,
        kkt_residual: kkt,
        converged: kkt <= KKT_TOL,
        t: 0.0,
        constrained: fixed.iter().filter(|&&f| f).count(),
    }
}

/// c_ω(E_t) on the form's grid.
pub fn capacity_with_form(q: &DirichletFormMatrix, e: &BoundarySet, t: f64) -> Result<CapacityResult> {
    let n = q.n();
    if e.is_empty() {
        return Ok(CapacityResult {
            value: 0.0,
            minimizer: vec![0.0; n],
            iterations: 0,
            kkt_residual: 0.0,
            converged: true,
            t,
            constrained: 0,
        });
    }
    let mask = e.node_mask(n, t);
    if !mask.iter().any(|&b| b) {
        return invalid(format!("neighbourhood radius {t} contains no grid node; use t ≥ one grid spacing"));
    }
    let mut r = solve_constrained(q, &mask);
    r.t = t;
    Ok(r)
}

pub fn variational_capacity(e: &BoundarySet, t: f64, w: &SuperharmonicWeight, n: usize) -> Result<CapacityResult> {
    if !(t >= 0.0) {
        return invalid(format!("neighbourhood radius {t} must be nonnegative"));
    }
    let q = assemble_form(w, n)?;
    capacity_with_form(&q, e, t)
}

/// Chordal length of one grid step.
pub fn grid_spacing(n: usize) -> f64 {
    2.0 * (PI / n as f64).sin()
}

#[derive(Clone, Debug)]
pub struct WeakTypeReport {
    pub level: f64,
    pub capacity: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// c_ω(|f| > t) against ‖f‖²/t².
pub fn weak_type_check(q: &DirichletFormMatrix, f: &[f64], t: f64) -> Result<WeakTypeReport> {
    if f.len() != q.n() || !(t > 0.0) {
        return invalid("weak-type check needs samples on the form grid and a positive level");
    }
    let mask: Vec<bool> = f.iter().map(|v| v.abs() > t).collect();
    let capacity = if mask.iter().any(|&b| b) { solve_constrained(q, &mask).value } else { 0.0 };
    let bound = q.energy(f) / (t * t);
    let ratio = if bound > 0.0 { capacity / bound } else { 0.0 };
    Ok(WeakTypeReport { level: t, capacity, bound, ratio })
}

#[derive(Clone, Debug)]
pub struct StrongTypeReport {
    pub levels: Vec<(f64, f64)>,
    pub integral: f64,
    pub norm_sq: f64,
    pub ratio: f64,
}

/// Σ_j c_ω(|f| > t_{j+1})·(t_j² − t_{j+1}²)/2 over t_j = 2^{-j}‖f‖_∞, j = −2..12, against ‖f‖².
pub fn strong_type_check(q: &DirichletFormMatrix, f: &[f64]) -> Result<StrongTypeReport> {
    if f.len() != q.n() {
        return invalid("strong-type check needs samples on the form grid");
    }
    let sup = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let norm_sq = q.energy(f);
    if sup == 0.0 {
        return Ok(StrongTypeReport { levels: Vec::new(), integral: 0.0, norm_sq, ratio: 0.0 });
    }
    let ts: Vec<f64> = (-2..=12).map(|j| sup * 2f64.powi(-j)).collect();
    let caps: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let mask: Vec<bool> = f.iter().map(|v| v.abs() > t).collect();
            if mask.iter().any(|&b| b) {
                solve_constrained(q, &mask).value
            } else {
                0.0
            }
        })
        .collect();
    let mut integral = 0.0;
    for j in 0..ts.len() - 1 {
        integral += caps[j + 1] * 0.5 * (ts[j] * ts[j] - ts[j + 1] * ts[j + 1]);
    }
    let ratio = if norm_sq > 0.0 { integral / norm_sq } else { 0.0 };
    Ok(StrongTypeReport { levels: ts.into_iter().zip(caps).collect(), integral, norm_sq, ratio })
}

/// Where c_ω(E_t) comes from in the Stieltjes sums.
pub enum CapacitySource<'a> {
    Variational(&'a DirichletFormMatrix),
    /// Sum of reciprocal kernel estimates over the arcs of E_t.
    ArcEstimate(&'a DiscMeasure),
}

impl CapacitySource<'_> {
    pub fn capacity(&self, e: &BoundarySet, t: f64) -> Result<f64> {
        match self {
            CapacitySource::Variational(q) => Ok(capacity_with_form(q, e, t)?.value),
            CapacitySource::ArcEstimate(mu) => {
                let mut s = 0.0;
                for a in e.neighborhood_arcs(t) {
                    let m = a.measure().min(0.5);
                    if m <= 0.0 {
                        continue;
                    }
                    s += 1.0 / kernel_diag_estimate(C64::from_polar(1.0 - m, a.midpoint()), mu)?;
                }
                Ok(s)
            }
        }
    }

    /// Smallest usable dyadic radius.
    fn min_radius(&self) -> f64 {
        match self {
            CapacitySource::Variational(q) => 2.0 * grid_spacing(q.n()),
            CapacitySource::ArcEstimate(_) => 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConditionCReport {
    pub verdict: SeriesVerdict,
    pub radii: Vec<f64>,
    pub capacities: Vec<f64>,
    pub increments: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub tail: TailTest,
}

/// Σ_j c_ω(E_{t_j})·|η²(t_{j+1}) − η²(t_j)| over t_j = π·2^{-j}, j ≤ j_max.
pub fn condition_c(e: &BoundarySet, eta: &dyn Fn(f64) -> f64, source: &CapacitySource, j_max: usize) -> Result<ConditionCReport> {
    let floor = source.min_radius();
    let mut radii = Vec::new();
    let mut capacities = Vec::new();
    for j in 0..=j_max {
        let t = PI * 0.5f64.powi(j as i32);
        if t < floor {
            break;
        }
        radii.push(t);
        capacities.push(source.capacity(e, t)?);
    }
    stieltjes_sums(radii, capacities, eta)
}

/// Condition C sums for given capacities at radii t_j, with t_{j+1} = t_j/2.
pub fn stieltjes_sums(radii: Vec<f64>, capacities: Vec<f64>, eta: &dyn Fn(f64) -> f64) -> Result<ConditionCReport> {
    let mut increments = Vec::with_capacity(radii.len());
    let mut partial_sums = Vec::with_capacity(radii.len());
    let mut acc = 0.0;
    for (&t, &c) in radii.iter().zip(&capacities) {
        let a = eta(0.5 * t);
        let b = eta(t);
        let d = c * (a * a - b * b).abs();
        if !d.is_finite() {
            return Err(Error::Invalid(format!("profile is not finite at t = {t}")));
        }
        acc += d;
        increments.push(d);
        partial_sums.push(acc);
    }
    let tail = tail_test(&increments);
    Ok(ConditionCReport { verdict: tail.verdict, radii, capacities, increments, partial_sums, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{BoundaryMeasure, DiscAtom, QuadratureGrid};

    fn delta0() -> DiscMeasure {
        DiscMeasure::point(C64::new(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn kernel_without_disc_measure() {
        let k = kernel_diag_estimate(C64::new(0.5, 0.0), &DiscMeasure::zero()).unwrap();
        assert!((k - 2.0).abs() < 1e-12);
        let a = Arc::centered(1.0, 1.0 / 16.0).unwrap();
        let c = arc_capacity_estimate(&a, &DiscMeasure::zero()).unwrap();
        assert!((c - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_for_central_mass() {
        // oracle: composite Simpson on [0, 1/2] of 1/((1−r)²(2+r))
        let n = 20000;
        let h = 0.5 / n as f64;
        let g = |r: f64| 1.0 / ((1.0 - r) * (1.0 - r) * (2.0 + r));
        let mut s = g(0.0) + g(0.5);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        let oracle = 1.0 + s * h / 3.0;
        let k = kernel_diag_estimate(C64::new(0.0, 0.5), &delta0()).unwrap();
        assert!((k - oracle).abs() < 1e-9, "{k} vs {oracle}");
        // partial fractions: 1 + ln(5/2)/9 + 1/3
        assert!((k - (1.0 + 2.5f64.ln() / 9.0 + 1.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn polarity_verdicts() {
        assert_eq!(point_polar_test(0.3, &delta0()).verdict, Polarity::Polar);
        let atoms: Vec<DiscAtom> = (1..=50)
            .map(|j| DiscAtom::from_gap(0.5f64.powi(j), 0.0, (j * j) as f64).unwrap())
            .collect();
        let mu = DiscMeasure::atoms(atoms).unwrap();
        let rep = point_polar_test(0.0, &mu);
        assert_eq!(rep.verdict, Polarity::NonPolar, "{:?}", rep.tail);
    }

    #[test]
    fn form_vanishes_on_constants() {
        let grid = QuadratureGrid::dyadic(12, 4, 64).unwrap();
        let mu = DiscMeasure::standard_alpha(0.5, grid).unwrap();
        let w = SuperharmonicWeight::new(mu, BoundaryMeasure::new(vec![(0.7, 0.3)], Some(vec![1.0, 2.0, 1.5, 0.5])).unwrap());
        let q = assemble_form(&w, 64).unwrap();
        let ones = vec![1.0; 64];
        let d = q.dirichlet_energy(&ones);
        assert!(d.abs() < 1e-10, "{d}");
        assert!((q.energy(&ones) - 1.0).abs() < 1e-10);
        for i in 0..64 {
            for j in 0..i {
                assert!((q.entry(i, j) - q.entry(j, i)).abs() < 1e-10 * q.entry(i, i));
            }
        }
    }

    #[test]
    fn central_mass_form_on_real_part() {
        let n = 256;
        let q = assemble_form(&SuperharmonicWeight::disc_only(delta0()), n).unwrap();
        let u: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).cos()).collect();
        let v = q.dirichlet_energy(&u);
        assert!((v - 1.0).abs() < 0.02, "{v}");
    }

    #[test]
    fn point_mass_on_circle_matches_line_integral() {
        let n = 512;
        let q = assemble_form(&SuperharmonicWeight::harmonic_point(0.0, 1.0).unwrap(), n).unwrap();
        let u: Vec<f64> = (0..n).map(|j| (1.0 - (TAU * j as f64 / n as f64).cos()).powi(1)).collect();
        // oracle: ∫|u(1) − u(λ)|²/|1−λ|² dm with u = 1 − cos θ, |1−λ|² = 2(1−cos θ)
        let oracle = GaussLegendre::new(40).integrate(0.0, TAU, |t| (1.0 - t.cos()) / 2.0) / TAU;
        let v = q.dirichlet_energy(&u);
        assert!((v - oracle).abs() < 0.02 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn capacity_of_whole_and_empty() {
        let q = assemble_form(&SuperharmonicWeight::classical(), 64).unwrap();
        let r = capacity_with_form(&q, &BoundarySet::Circle, 0.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = capacity_with_form(&q, &BoundarySet::Empty, 0.0).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn arc_capacity_solver_is_consistent() {
        let q = assemble_form(&SuperharmonicWeight::classical(), 256).unwrap();
        let e = BoundarySet::arc(Arc::centered(0.0, 0.1).unwrap());
        let r = capacity_with_form(&q, &e, 0.0).unwrap();
        assert!(r.converged, "kkt {}", r.kkt_residual);
        assert!(r.minimizer.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!((q.energy(&r.minimizer) - r.value).abs() < 1e-12);
        let big = BoundarySet::arc(Arc::centered(0.0, 0.2).unwrap());
        assert!(capacity_with_form(&q, &big, 0.0).unwrap().value >= r.value);
    }

    #[test]
    fn export_round_trip() {
        let q = assemble_form(&SuperharmonicWeight::classical(), 16).unwrap();
        let mut buf = Vec::new();
        q.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 8 * 256);
        let (n, data) = read_form_binary(&buf[..]).unwrap();
        assert_eq!(n, 16);
        assert_eq!(data[3 * 16 + 5], q.entry(3, 5));
    }

    #[test]
    fn constant_function_inequalities() {
        let q = assemble_form(&SuperharmonicWeight::classical(), 64).unwrap();
        let f = vec![1.0; 64];
        let w = weak_type_check(&q, &f, 0.5).unwrap();
        assert!((w.capacity - 1.0).abs() < 1e-12 && (w.bound - 4.0).abs() < 1e-10);
        assert_eq!(weak_type_check(&q, &f, 2.0).unwrap().capacity, 0.0);
        let s = strong_type_check(&q, &f).unwrap();
        assert!((s.integral - 0.5).abs() < 1e-6);
        let z = strong_type_check(&q, &vec![0.0; 64]).unwrap();
        assert_eq!(z.integral, 0.0);
    }

    #[test]
    fn tail_test_cases() {
        let geo: Vec<f64> = (0..20).map(|k| 2f64.powi(k)).collect();
        assert_eq!(tail_test(&geo).verdict, SeriesVerdict::Divergent);
        let sq: Vec<f64> = (1..=40).map(|k| 1.0 / (k * k) as f64).collect();
        assert_eq!(tail_test(&sq).verdict, SeriesVerdict::Convergent);
        let flat = vec![1.0; 20];
        assert_eq!(tail_test(&flat).verdict, SeriesVerdict::Divergent);
        assert_eq!(tail_test(&[0.0; 10]).verdict, SeriesVerdict::Convergent);
    }
}
