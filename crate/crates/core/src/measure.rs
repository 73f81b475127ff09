//! Measures on the disc and the circle, superharmonic weights, quadrature grids.

use crate::error::{invalid, Error, Result};
use crate::fourier;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Integrals above this are reported as divergent.
pub const MASS_CAP: f64 = 1e12;

/// Point mass in the open disc, stored in polar form with 1−|w| kept separately for accuracy near the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscAtom {
    pub radius: f64,
    pub gap: f64,
    pub angle: f64,
    pub mass: f64,
}

impl DiscAtom {
    pub fn at(position: C64, mass: f64) -> Result<Self> {
        let r = position.norm();
        Self::from_gap(1.0 - r, position.arg(), mass)
    }

    pub fn polar(radius: f64, angle: f64, mass: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&radius) {
            return invalid(format!("disc atom radius {radius} outside [0,1)"));
        }
        Self::from_gap(1.0 - radius, angle, mass)
    }

    /// Atom at radius 1 − gap.
    pub fn from_gap(gap: f64, angle: f64, mass: f64) -> Result<Self> {
        if !(gap > 0.0 && gap <= 1.0) {
            return invalid(format!("disc atom must satisfy |w| < 1 (1−|w| = {gap})"));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return invalid(format!("disc atom mass {mass} must be finite and nonnegative"));
        }
        if !angle.is_finite() {
            return invalid("disc atom angle must be finite");
        }
        Ok(DiscAtom { radius: 1.0 - gap, gap, angle: angle.rem_euclid(2.0 * PI), mass })
    }

    pub fn position(&self) -> C64 {
        C64::from_polar(self.radius, self.angle)
    }

    /// 1 − |w|².
    pub fn one_minus_sq(&self) -> f64 {
        self.gap * (2.0 - self.gap)
    }
}

/// Tensor grid on a disc of radius 1 − 2^{-blocks}: midpoint rule in r on dyadic blocks, trapezoid in angle.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub radii: Vec<f64>,
    pub gaps: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub angular: usize,
}

impl QuadratureGrid {
    pub fn dyadic(blocks: usize, per_block: usize, angular: usize) -> Result<Self> {
        if blocks == 0 || per_block == 0 {
            return invalid("grid needs at least one block and one node per block");
        }
        if blocks > 50 {
            return invalid("at most 50 dyadic blocks are representable");
        }
        if !fourier::is_pow2(angular) {
            return invalid(format!("angular node count {angular} is not a power of two"));
        }
        let mut radii = Vec::new();
        let mut gaps = Vec::new();
        let mut weights = Vec::new();
        for k in 0..blocks {
            let outer_gap = 0.5f64.powi(k as i32);
            let width = if k == 0 { 0.5 } else { 0.5 * outer_gap };
            let h = width / per_block as f64;
            for i in 0..per_block {
                let gap = outer_gap - (i as f64 + 0.5) * h;
                let r = 1.0 - gap;
                radii.push(r);
                gaps.push(gap);
                weights.push(2.0 * r * h);
            }
        }
        Ok(QuadratureGrid { radii, gaps, radial_weights: weights, angular })
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angular
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Normalized area covered by the grid.
    pub fn area(&self) -> f64 {
        self.radial_weights.iter().sum()
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.angular as f64
    }
}

/// Density samples on a grid, as a density against normalized area measure.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscDensity {
    pub grid: QuadratureGrid,
    /// Radial-major: value at (radial node i, angle j) is `values[i * angular + j]`.
    pub values: Vec<f64>,
}

/// One radial node of a density, seen as a band-limited measure on a circle of radius `radius`.
#[derive(Clone, Debug)]
pub struct Ring {
    pub radius: f64,
    pub gap: f64,
    pub masses: Vec<f64>,
    pub total: f64,
    pub uniform: bool,
    spectrum: Vec<C64>,
}

impl Ring {
    fn new(radius: f64, gap: f64, masses: Vec<f64>) -> Ring {
        let total: f64 = masses.iter().sum();
        let first = masses[0];
        let uniform = masses.iter().all(|&m| (m - first).abs() <= 1e-14 * first.abs().max(1e-300));
        let spectrum = if uniform {
            Vec::new()
        } else {
            let mut b: Vec<C64> = masses.iter().map(|&m| C64::new(m, 0.0)).collect();
            fourier::fft(&mut b);
            b
        };
        Ring { radius, gap, masses, total, uniform, spectrum }
    }

    pub fn one_minus_sq(&self) -> f64 {
        self.gap * (2.0 - self.gap)
    }

    /// Coefficient of e^{ikφ} in the angular density ρ with ∫ρ dφ/2π = total.
    pub fn mode(&self, k: i64) -> C64 {
        if self.uniform {
            return if k == 0 { C64::new(self.total, 0.0) } else { C64::new(0.0, 0.0) };
        }
        let a = self.masses.len() as i64;
        let half = a / 2;
        if k.abs() > half || (a == 1 && k != 0) {
            return C64::new(0.0, 0.0);
        }
        let idx = k.rem_euclid(a) as usize;
        let v = self.spectrum[idx];
        if a > 1 && k.abs() == half {
            0.5 * v
        } else {
            v
        }
    }

    /// Highest nonzero mode.
    pub fn band(&self) -> i64 {
        if self.uniform {
            0
        } else {
            self.masses.len() as i64 / 2
        }
    }

    /// Σ_k c(|k|)·mode(k)·e^{ikθ} for a kernel with even coefficients `c`.
    pub fn kernel_sum<F: Fn(u64) -> f64>(&self, theta: f64, coef: F) -> f64 {
        let mut s = coef(0) * self.total;
        for k in 1..=self.band() {
            let e = C64::from_polar(1.0, k as f64 * theta);
            s += 2.0 * coef(k as u64) * (self.mode(k) * e).re;
        }
        s
    }

    /// Masses on an m-point ring carrying the same band-limited density.
    pub fn masses_on(&self, m: usize) -> Vec<f64> {
        if self.uniform {
            return vec![self.total / m as f64; m];
        }
        let a = self.masses.len();
        let scale = a as f64 / m as f64;
        fourier::resample_real(&self.masses, m).into_iter().map(|v| v * scale).collect()
    }
}

/// Positive measure on the open disc: atoms plus an optional gridded density.
#[derive(Clone, Debug)]
pub struct DiscMeasure {
    pub atoms: Vec<DiscAtom>,
    pub density: Option<DiscDensity>,
    rings: Vec<Ring>,
}

impl PartialEq for DiscMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.density == other.density
    }
}

impl DiscMeasure {
    pub fn zero() -> Self {
        DiscMeasure { atoms: Vec::new(), density: None, rings: Vec::new() }
    }

    pub fn new(atoms: Vec<DiscAtom>, density: Option<DiscDensity>) -> Result<Self> {
        let mut rings = Vec::new();
        if let Some(d) = &density {
            let a = d.grid.angular;
            if d.values.len() != d.grid.len() {
                return invalid(format!(
                    "density has {} values but the grid has {} nodes",
                    d.values.len(),
                    d.grid.len()
                ));
            }
            if d.values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return invalid("density values must be finite and nonnegative");
            }
            for (i, (&r, &g)) in d.grid.radii.iter().zip(&d.grid.gaps).enumerate() {
                let w = d.grid.radial_weights[i] / a as f64;
                let masses: Vec<f64> = d.values[i * a..(i + 1) * a].iter().map(|v| v * w).collect();
                if masses.iter().any(|&m| m > 0.0) {
                    rings.push(Ring::new(r, g, masses));
                }
            }
        }
        let mu = DiscMeasure { atoms, density, rings };
        let moment = mu.riesz_moment_unchecked();
        if !(moment.is_finite() && moment <= MASS_CAP) {
            return Err(Error::Cap(format!("riesz moment {moment} exceeds cap; (RMF) fails")));
        }
        Ok(mu)
    }

    pub fn atoms(atoms: Vec<DiscAtom>) -> Result<Self> {
        Self::new(atoms, None)
    }

    pub fn point(position: C64, mass: f64) -> Result<Self> {
        Self::atoms(vec![DiscAtom::at(position, mass)?])
    }

    /// Riesz measure of (1−|z|²)^α under the unsquared Green kernel: density ½·(−Δ)(1−|z|²)^α.
    pub fn standard_alpha(alpha: f64, grid: QuadratureGrid) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("alpha = {alpha} must lie in (0,1)"));
        }
        let mut values = Vec::with_capacity(grid.len());
        for (&r, &g) in grid.radii.iter().zip(&grid.gaps) {
            let v = standard_alpha_density(alpha, r, g);
            values.extend(std::iter::repeat(v).take(grid.angular));
        }
        Self::new(Vec::new(), Some(DiscDensity { grid, values }))
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.mass == 0.0) && self.rings.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.rings.iter().map(|r| r.total).sum::<f64>()
    }

    fn riesz_moment_unchecked(&self) -> f64 {
        let a: f64 = self.atoms.iter().map(|a| a.mass * a.one_minus_sq()).sum();
        let d: f64 = self.rings.iter().map(|r| r.total * r.one_minus_sq()).sum();
        a + d
    }

    /// ∫(1−|w|²)dμ(w).
    pub fn riesz_moment(&self) -> Result<f64> {
        let m = self.riesz_moment_unchecked();
        if m.is_finite() && m <= MASS_CAP {
            Ok(m)
        } else {
            Err(Error::Cap(format!("riesz moment {m}")))
        }
    }

    /// Largest radius carrying mass (atoms or rings).
    pub fn smallest_gap(&self) -> f64 {
        let a = self.atoms.iter().filter(|a| a.mass > 0.0).map(|a| a.gap);
        let r = self.rings.iter().map(|r| r.gap);
        a.chain(r).fold(1.0, f64::min)
    }
}

/// ½·(−Δ)(1−r²)^α = 2α(1−αr²)(1−r²)^{α−2}, with 1−r = gap.
pub fn standard_alpha_density(alpha: f64, r: f64, gap: f64) -> f64 {
    let d = gap * (2.0 - gap);
    2.0 * alpha * (1.0 - alpha * r * r) * d.powf(alpha - 2.0)
}

/// Finite positive measure on the circle: atoms plus optional density samples (density against dm).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<Vec<f64>>,
    coeffs: Vec<C64>,
}

impl BoundaryMeasure {
    pub fn zero() -> Self {
        BoundaryMeasure { atoms: Vec::new(), density: None, coeffs: Vec::new() }
    }

    pub fn new(atoms: Vec<(f64, f64)>, density: Option<Vec<f64>>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms
            .into_iter()
            .map(|(a, m)| (a.rem_euclid(2.0 * PI), m))
            .collect();
        for &(a, m) in &atoms {
            if !(m >= 0.0 && m.is_finite()) || !a.is_finite() {
                return invalid(format!("boundary atom ({a}, {m}) must have finite angle and nonnegative mass"));
            }
        }
        atoms.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for w in atoms.windows(2) {
            if (w[1].0 - w[0].0).abs() < 1e-15 {
                return invalid(format!("boundary atom angles must be distinct ({} repeated)", w[0].0));
            }
        }
        let mut coeffs = Vec::new();
        if let Some(d) = &density {
            if !fourier::is_pow2(d.len()) {
                return invalid(format!("boundary density has {} samples; need a power of two", d.len()));
            }
            if d.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return invalid("boundary density values must be finite and nonnegative");
            }
            coeffs = fourier::coefficients_real(d);
        }
        let nu = BoundaryMeasure { atoms, density, coeffs };
        let t = nu.total_mass();
        if !(t.is_finite() && t <= MASS_CAP) {
            return Err(Error::Cap(format!("boundary mass {t}")));
        }
        Ok(nu)
    }

    /// Normalized arc length.
    pub fn arc_length() -> Self {
        Self::new(Vec::new(), Some(vec![1.0])).unwrap()
    }

    pub fn point(angle: f64, mass: f64) -> Result<Self> {
        Self::new(vec![(angle, mass)], None)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.coeffs.first().map(|c| c.re).unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.total_mass() == 0.0
    }

    /// ∫ e^{-ikθ} dν, the density read as its trigonometric interpolant.
    pub fn mode(&self, k: i64) -> C64 {
        let mut s: C64 = self.atoms.iter().map(|&(a, m)| C64::from_polar(m, -(k as f64) * a)).sum();
        s += self.density_mode(k);
        s
    }

    pub fn density_mode(&self, k: i64) -> C64 {
        let l = self.coeffs.len() as i64;
        if l == 0 {
            return C64::new(0.0, 0.0);
        }
        let half = l / 2;
        if (l == 1 && k != 0) || k.abs() > half {
            return C64::new(0.0, 0.0);
        }
        let v = self.coeffs[k.rem_euclid(l) as usize];
        if l > 1 && k.abs() == half {
            0.5 * v
        } else {
            v
        }
    }

    pub fn density_band(&self) -> i64 {
        match self.coeffs.len() {
            0 | 1 => 0,
            l => l as i64 / 2,
        }
    }

    /// Density is a constant multiple of arc length.
    pub fn density_is_uniform(&self) -> bool {
        match &self.density {
            None => false,
            Some(d) => d.iter().all(|&v| (v - d[0]).abs() <= 1e-14 * d[0].abs().max(1e-300)),
        }
    }

    /// Density values on an m-point grid (band-limited interpolation).
    pub fn density_on(&self, m: usize) -> Option<Vec<f64>> {
        let d = self.density.as_ref()?;
        if d.len() == 1 {
            return Some(vec![d[0]; m]);
        }
        if m >= d.len() {
            Some(fourier::resample_real(d, m))
        } else {
            let mut out = vec![0.0; m];
            for (j, o) in out.iter_mut().enumerate() {
                let th = 2.0 * PI * j as f64 / m as f64;
                let mut s = 0.0;
                for k in -self.density_band()..=self.density_band() {
                    s += (self.density_mode(k) * C64::from_polar(1.0, k as f64 * th)).re;
                }
                *o = s;
            }
            Some(out)
        }
    }
}

/// ω = G_μ + P_ν.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperharmonicWeight {
    pub mu: DiscMeasure,
    pub nu: BoundaryMeasure,
}

impl SuperharmonicWeight {
    pub fn new(mu: DiscMeasure, nu: BoundaryMeasure) -> Self {
        SuperharmonicWeight { mu, nu }
    }

    /// ω ≡ 1: ν = arc length, μ = 0.
    pub fn classical() -> Self {
        Self::new(DiscMeasure::zero(), BoundaryMeasure::arc_length())
    }

    pub fn harmonic_point(angle: f64, mass: f64) -> Result<Self> {
        Ok(Self::new(DiscMeasure::zero(), BoundaryMeasure::point(angle, mass)?))
    }

    pub fn disc_only(mu: DiscMeasure) -> Self {
        Self::new(mu, BoundaryMeasure::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.mu.is_zero() && self.nu.is_zero()
    }
}
