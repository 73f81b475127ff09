//! Green and Poisson potentials and the auxiliary kernels V_μ, Ψ_μ, V_r, B_μ, A_μ, F_{μ,ζ}.

use crate::fourier;
use crate::measure::{BoundaryMeasure, DiscMeasure, Ring, SuperharmonicWeight};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Multiplier applied to log|(1−w̄z)/(z−w)|; 2 selects the squared-modulus kernel.
pub const GREEN_FACTOR: f64 = 2.0;

/// A point of the closed disc with 1−|z| carried separately.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscPoint {
    pub r: f64,
    pub gap: f64,
    pub theta: f64,
}

impl DiscPoint {
    pub fn new(z: C64) -> Self {
        let r = z.norm();
        DiscPoint { r, gap: 1.0 - r, theta: z.arg() }
    }

    /// The point (1 − gap)·e^{iθ}.
    pub fn radial(gap: f64, theta: f64) -> Self {
        DiscPoint { r: 1.0 - gap, gap, theta }
    }

    pub fn boundary(theta: f64) -> Self {
        DiscPoint { r: 1.0, gap: 0.0, theta }
    }

    pub fn z(&self) -> C64 {
        C64::from_polar(self.r, self.theta)
    }

    pub fn one_minus_sq(&self) -> f64 {
        self.gap * (2.0 - self.gap)
    }
}

impl From<C64> for DiscPoint {
    fn from(z: C64) -> Self {
        DiscPoint::new(z)
    }
}

/// |z − w|² for z = (r,θ), w = (s,φ), stable when both are near the circle.
pub(crate) fn dist_sq(r: f64, gr: f64, theta: f64, s: f64, gs: f64, phi: f64) -> f64 {
    let d = gs - gr;
    let h = ((theta - phi) * 0.5).sin();
    d * d + 4.0 * r * s * h * h
}

/// 1 − r·s from the two gaps.
fn one_minus_product(gr: f64, gs: f64) -> f64 {
    gr + gs - gr * gs
}

fn one_minus_sq(g: f64) -> f64 {
    g * (2.0 - g)
}

/// G_μ(z) = GREEN_FACTOR·∫ log|(1−w̄z)/(z−w)| dμ(w); +∞ at an atom.
pub fn green_potential(mu: &DiscMeasure, z: impl Into<DiscPoint>) -> f64 {
    let p = z.into();
    let dz = p.one_minus_sq();
    let mut s = 0.0;
    for a in &mu.atoms {
        if a.mass == 0.0 {
            continue;
        }
        let d2 = dist_sq(p.r, p.gap, p.theta, a.radius, a.gap, a.angle);
        if d2 == 0.0 {
            return f64::INFINITY;
        }
        s += a.mass * 0.5 * GREEN_FACTOR * (dz * a.one_minus_sq() / d2).ln_1p();
    }
    for ring in mu.rings() {
        s += ring_green(ring, p);
    }
    s
}

fn ring_green(ring: &Ring, p: DiscPoint) -> f64 {
    let gmin = p.gap.min(ring.gap);
    let c0 = -0.5 * GREEN_FACTOR * 2.0 * (-gmin).ln_1p();
    if ring.uniform {
        return ring.total * c0;
    }
    let (lo, hi) = if p.r < ring.radius { (p.r, ring.radius) } else { (ring.radius, p.r) };
    let q = lo / hi;
    let rs = p.r * ring.radius;
    ring.kernel_sum(p.theta, |k| {
        if k == 0 {
            c0
        } else {
            0.5 * GREEN_FACTOR * (q.powi(k as i32) - rs.powi(k as i32)) / k as f64
        }
    })
}

/// Angular Fourier coefficient of G_μ on the circle |z| = ρ: coefficient of e^{ikθ}, k = 0..=kmax.
pub fn green_modes(mu: &DiscMeasure, rho: f64, rho_gap: f64, kmax: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); kmax + 1];
    let half = 0.5 * GREEN_FACTOR;
    for a in &mu.atoms {
        if a.mass == 0.0 {
            continue;
        }
        let gmin = rho_gap.min(a.gap);
        out[0] += a.mass * (-GREEN_FACTOR * (-gmin).ln_1p());
        let (lo, hi) = if rho < a.radius { (rho, a.radius) } else { (a.radius, rho) };
        let q = if hi > 0.0 { lo / hi } else { 0.0 };
        let rs = rho * a.radius;
        let mut qk = 1.0;
        let mut rsk = 1.0;
        for (k, o) in out.iter_mut().enumerate().skip(1) {
            qk *= q;
            rsk *= rs;
            if qk < 1e-18 {
                break;
            }
            let c = half * (qk - rsk) / k as f64;
            *o += C64::from_polar(a.mass * c, -(k as f64) * a.angle);
        }
    }
    for ring in mu.rings() {
        let gmin = rho_gap.min(ring.gap);
        out[0] += ring.total * (-GREEN_FACTOR * (-gmin).ln_1p());
        if ring.uniform {
            continue;
        }
        let (lo, hi) = if rho < ring.radius { (rho, ring.radius) } else { (ring.radius, rho) };
        let q = lo / hi;
        let rs = rho * ring.radius;
        for k in 1..=(ring.band() as usize).min(kmax) {
            let c = half * (q.powi(k as i32) - rs.powi(k as i32)) / k as f64;
            out[k] += c * ring.mode(k as i64);
        }
    }
    out
}

/// P_ν(z) = ∫ (1−|z|²)/|ζ−z|² dν(ζ).
pub fn poisson_integral(nu: &BoundaryMeasure, z: impl Into<DiscPoint>) -> f64 {
    let p = z.into();
    let dz = p.one_minus_sq();
    let mut s = 0.0;
    for &(a, m) in &nu.atoms {
        let d2 = dist_sq(p.r, p.gap, p.theta, 1.0, 0.0, a);
        s += m * dz / d2;
    }
    if nu.density.is_some() {
        s += nu.density_mode(0).re;
        let mut rk = 1.0;
        for k in 1..=nu.density_band() {
            rk *= p.r;
            s += 2.0 * (nu.density_mode(k) * C64::from_polar(rk, k as f64 * p.theta)).re;
        }
    }
    s
}

/// ω(z) = G_μ(z) + P_ν(z).
pub fn weight_value(w: &SuperharmonicWeight, z: impl Into<DiscPoint>) -> f64 {
    let p = z.into();
    green_potential(&w.mu, p) + poisson_integral(&w.nu, p)
}

/// V_μ(z) = ∫ (1−|z|²)(1−|w|²)/|1−zw̄|² dμ(w).
pub fn v_mu(mu: &DiscMeasure, z: impl Into<DiscPoint>) -> f64 {
    let p = z.into();
    kernel_1mzw(mu, p, true)
}

/// Ψ_μ(z) = ∫ (1−|z|²)/|1−zw̄|² dμ(w).
pub fn psi_mu(mu: &DiscMeasure, z: impl Into<DiscPoint>) -> f64 {
    let p = z.into();
    kernel_1mzw(mu, p, false)
}

fn kernel_1mzw(mu: &DiscMeasure, p: DiscPoint, with_w_factor: bool) -> f64 {
    let dz = p.one_minus_sq();
    let mut s = 0.0;
    for a in &mu.atoms {
        let dw = a.one_minus_sq();
        let den = dz * dw + dist_sq(p.r, p.gap, p.theta, a.radius, a.gap, a.angle);
        let f = if with_w_factor { dw } else { 1.0 };
        s += a.mass * dz * f / den;
    }
    for ring in mu.rings() {
        let dw = ring.one_minus_sq();
        let f = if with_w_factor { dw } else { 1.0 };
        let g = one_minus_product(p.gap, ring.gap);
        let rs = p.r * ring.radius;
        let pref = dz * f / (g * (1.0 + rs));
        if ring.uniform {
            s += ring.total * pref;
        } else {
            s += ring.kernel_sum(p.theta, |k| pref * rs.powi(k as i32));
        }
    }
    s
}

/// V_r(z) = ∫ r²(1−|z|²)/|ζ−rz|² dν(ζ).
pub fn v_r_potential(nu: &BoundaryMeasure, z: impl Into<DiscPoint>, r: f64) -> f64 {
    let p = z.into();
    let q = DiscPoint { r: r * p.r, gap: 1.0 - r * p.r, theta: p.theta };
    let dz = p.one_minus_sq();
    let dq = q.one_minus_sq();
    if dq == 0.0 {
        return 0.0;
    }
    r * r * dz / dq * poisson_integral(nu, q)
}

/// B_μ(ζ) = ∫ (1−|z|²)/|1−ζ̄z|² dμ(z) at ζ = e^{iθ}.
pub fn balayage(mu: &DiscMeasure, theta: f64) -> f64 {
    let mut s = 0.0;
    for a in &mu.atoms {
        let d2 = dist_sq(1.0, 0.0, theta, a.radius, a.gap, a.angle);
        if d2 == 0.0 {
            return f64::INFINITY;
        }
        s += a.mass * a.one_minus_sq() / d2;
    }
    for ring in mu.rings() {
        if ring.uniform {
            s += ring.total;
        } else {
            let rad = ring.radius;
            s += ring.kernel_sum(theta, |k| rad.powi(k as i32));
        }
    }
    s
}

/// Poisson kernel P_w(e^{iθ}) for w = (s, φ).
pub(crate) fn poisson_kernel(s: f64, gs: f64, phi: f64, theta: f64) -> f64 {
    one_minus_sq(gs) / dist_sq(1.0, 0.0, theta, s, gs, phi)
}

/// A_μ(ζ,λ) = ∫ P_z(ζ)P_z(λ) dμ(z) for ζ = e^{iθ}, λ = e^{iψ}.
pub fn a_mu_kernel(mu: &DiscMeasure, theta: f64, psi: f64) -> f64 {
    let mut s = 0.0;
    for a in &mu.atoms {
        s += a.mass * poisson_kernel(a.radius, a.gap, a.angle, theta) * poisson_kernel(a.radius, a.gap, a.angle, psi);
    }
    for ring in mu.rings() {
        s += ring_a_kernel(ring, theta - psi, Some((theta, psi)));
    }
    s
}

/// Contribution of one ring to A_μ at angular separation `delta`; uses the full angles when the ring is not uniform.
pub(crate) fn ring_a_kernel(ring: &Ring, delta: f64, angles: Option<(f64, f64)>) -> f64 {
    let s = ring.radius;
    if ring.uniform {
        let d = ring.one_minus_sq();
        let h = (0.5 * delta).sin();
        return ring.total * d * (1.0 + s * s) / (d * d + 4.0 * s * s * h * h);
    }
    let (theta, psi) = angles.expect("non-uniform ring needs absolute angles");
    let m = ring_resolution(ring, 32.0);
    let masses = ring.masses_on(m);
    let mut acc = 0.0;
    for (l, ml) in masses.iter().enumerate() {
        let phi = 2.0 * PI * l as f64 / m as f64;
        acc += ml * poisson_kernel(s, ring.gap, phi, theta) * poisson_kernel(s, ring.gap, phi, psi);
    }
    acc
}

/// Power-of-two node count resolving angular features of width 1−s on a ring.
pub(crate) fn ring_resolution(ring: &Ring, per_width: f64) -> usize {
    let want = (per_width / ring.gap).min((1u64 << 20) as f64);
    fourier::next_pow2_at_least(want).max(ring.masses.len())
}

fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// F_{μ,ζ}(y) = ∫ (1−r)y²/((1−r)² + (s−s₀)² + y²) dμ(r,s), ζ = e^{is₀}.
pub fn f_mu_profile(mu: &DiscMeasure, y: f64, theta0: f64) -> f64 {
    let y2 = y * y;
    let mut s = 0.0;
    for a in &mu.atoms {
        let ds = wrap_angle(a.angle - theta0);
        s += a.mass * a.gap * y2 / (a.gap * a.gap + ds * ds + y2);
    }
    for ring in mu.rings() {
        let g = ring.gap;
        let a2 = g * g + y2;
        if ring.uniform {
            let a = a2.sqrt();
            s += ring.total * g * y2 * (PI / a).atan() / (PI * a);
        } else {
            let want = (16.0 * PI / a2.sqrt()).min((1u64 << 16) as f64);
            let m = fourier::next_pow2_at_least(want).max(ring.masses.len());
            let masses = ring.masses_on(m);
            for (l, ml) in masses.iter().enumerate() {
                let ds = wrap_angle(2.0 * PI * l as f64 / m as f64 - theta0);
                s += ml * g * y2 / (a2 + ds * ds);
            }
        }
    }
    s
}

/// Evaluator bundling a weight; all methods are pure.
#[derive(Clone, Debug)]
pub struct PotentialEvaluator<'a> {
    pub weight: &'a SuperharmonicWeight,
}

impl<'a> PotentialEvaluator<'a> {
    pub fn new(weight: &'a SuperharmonicWeight) -> Self {
        PotentialEvaluator { weight }
    }

    pub fn green(&self, z: C64) -> f64 {
        green_potential(&self.weight.mu, z)
    }

    pub fn poisson(&self, z: C64) -> f64 {
        poisson_integral(&self.weight.nu, z)
    }

    pub fn weight(&self, z: C64) -> f64 {
        weight_value(self.weight, z)
    }

    pub fn v_mu(&self, z: C64) -> f64 {
        v_mu(&self.weight.mu, z)
    }

    pub fn psi_mu(&self, z: C64) -> f64 {
        psi_mu(&self.weight.mu, z)
    }

    pub fn v_r(&self, z: C64, r: f64) -> f64 {
        v_r_potential(&self.weight.nu, z, r)
    }

    pub fn balayage(&self, theta: f64) -> f64 {
        balayage(&self.weight.mu, theta)
    }

    pub fn a_mu(&self, theta: f64, psi: f64) -> f64 {
        a_mu_kernel(&self.weight.mu, theta, psi)
    }

    pub fn f_profile(&self, y: f64, theta0: f64) -> f64 {
        f_mu_profile(&self.weight.mu, y, theta0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{DiscAtom, DiscDensity, QuadratureGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64, y: f64) -> C64 {
        C64::new(x, y)
    }

    fn random_atomic(rng: &mut ChaCha8Rng, n: usize) -> DiscMeasure {
        let atoms = (0..n)
            .map(|_| DiscAtom::polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..6.28), rng.gen_range(0.1..2.0)).unwrap())
            .collect();
        DiscMeasure::atoms(atoms).unwrap()
    }

    #[test]
    fn green_examples() {
        assert_eq!(green_potential(&DiscMeasure::zero(), c(0.3, 0.1)), 0.0);
        let mu = DiscMeasure::point(c(0.5, 0.0), 1.0).unwrap();
        assert!((green_potential(&mu, c(0.0, 0.0)) - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert_eq!(green_potential(&mu, c(0.5, 0.0)), f64::INFINITY);
    }

    #[test]
    fn green_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let z = C64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..6.28));
            let w = C64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..6.28));
            let a = green_potential(&DiscMeasure::point(w, 1.0).unwrap(), z);
            let b = green_potential(&DiscMeasure::point(z, 1.0).unwrap(), w);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn green_ring_matches_atom_sum() {
        let g = QuadratureGrid::dyadic(2, 1, 8).unwrap();
        let values: Vec<f64> = (0..g.len()).map(|j| 1.0 + 0.5 * ((j % 8) as f64).cos()).collect();
        let mu = DiscMeasure::new(Vec::new(), Some(DiscDensity { grid: g.clone(), values: values.clone() })).unwrap();
        // densely sampled atoms carrying the same band-limited ring densities
        let mut atoms = Vec::new();
        for ring in mu.rings() {
            let m = 4096;
            for (l, ml) in ring.masses_on(m).into_iter().enumerate() {
                atoms.push(DiscAtom::polar(ring.radius, 2.0 * PI * l as f64 / m as f64, ml).unwrap());
            }
        }
        let dense = DiscMeasure::atoms(atoms).unwrap();
        for z in [c(0.1, 0.2), c(-0.6, 0.3), c(0.0, -0.9)] {
            let a = green_potential(&mu, z);
            let b = green_potential(&dense, z);
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{a} {b}");
            let a = v_mu(&mu, z);
            let b = v_mu(&dense, z);
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
        for (t, p) in [(0.3, 1.0), (2.0, 2.1)] {
            let a = a_mu_kernel(&mu, t, p);
            let b = a_mu_kernel(&dense, t, p);
            assert!((a - b).abs() < 1e-8 * a, "{a} {b}");
            let a = balayage(&mu, t);
            let b = balayage(&dense, t);
            assert!((a - b).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn green_is_superharmonic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mu = random_atomic(&mut rng, 4);
        for _ in 0..20 {
            let z = C64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..6.28));
            let center = green_potential(&mu, z);
            let rad = 0.05;
            let n = 256;
            let avg: f64 = (0..n)
                .map(|j| green_potential(&mu, z + C64::from_polar(rad, 2.0 * PI * j as f64 / n as f64)))
                .sum::<f64>()
                / n as f64;
            assert!(avg <= center + 1e-6 || !center.is_finite());
        }
    }

    #[test]
    fn poisson_examples() {
        let nu = BoundaryMeasure::point(0.7, 1.0).unwrap();
        assert!((poisson_integral(&nu, c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        let nu = BoundaryMeasure::point(0.0, 1.0).unwrap();
        assert!((poisson_integral(&nu, c(0.5, 0.0)) - 3.0).abs() < 1e-12);
        let nu = BoundaryMeasure::arc_length();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let z = C64::from_polar(rng.gen_range(0.0..0.9999), rng.gen_range(0.0..6.28));
            assert!((poisson_integral(&nu, z) - 1.0).abs() < 1e-10);
        }
        let nu = BoundaryMeasure::new(Vec::new(), Some(vec![1.0; 16])).unwrap();
        assert!((poisson_integral(&nu, c(0.3, -0.7)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn v_and_psi_examples() {
        let mu = DiscMeasure::point(c(0.0, 0.0), 1.0).unwrap();
        assert!((v_mu(&mu, c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((psi_mu(&mu, c(0.3, 0.4)) - 0.75).abs() < 1e-15);
        assert!((v_mu(&mu, c(0.3, 0.4)) - 0.75).abs() < 1e-15);
        assert_eq!(v_mu(&DiscMeasure::zero(), c(0.2, 0.0)), 0.0);
        let mu = DiscMeasure::point(c(0.5, 0.0), 1.0).unwrap();
        assert!((v_mu(&mu, c(0.5, 0.0)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn v_bounded_by_psi_and_crude_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let mu = random_atomic(&mut rng, 5);
            let moment = mu.riesz_moment().unwrap();
            for _ in 0..20 {
                let z = C64::from_polar(rng.gen_range(0.0..0.999), rng.gen_range(0.0..6.28));
                let v = v_mu(&mu, z);
                assert!(v <= psi_mu(&mu, z) * (1.0 + 1e-14));
                let r = z.norm();
                assert!(v <= (1.0 + r) / (1.0 - r) * moment * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn v_r_examples() {
        let nu = BoundaryMeasure::point(0.0, 1.0).unwrap();
        assert!((v_r_potential(&nu, c(0.0, 0.0), 0.5) - 0.25).abs() < 1e-15);
        let nu = BoundaryMeasure::new(vec![(0.0, 1.0), (2.0, 0.5)], Some(vec![0.3, 0.7, 1.0, 0.2])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let z = C64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..6.28));
            // r ↦ V_r(z) increases: ∂_r log(r²/|ζ−rz|²) = 2(1 − r·Re ζ̄z)/(r|ζ−rz|²) > 0
            let mut prev = 0.0;
            for j in 1..20 {
                let r = j as f64 / 20.0;
                let v = v_r_potential(&nu, z, r);
                assert!(v >= prev * (1.0 - 1e-12));
                prev = v;
            }
            if z.norm() < 0.8 {
                let lim = poisson_integral(&nu, z);
                assert!((v_r_potential(&nu, z, 0.999) - lim).abs() < 0.05 * lim);
            }
        }
    }

    #[test]
    fn balayage_examples() {
        let mu = DiscMeasure::point(c(0.0, 0.0), 1.0).unwrap();
        assert!((balayage(&mu, 1.3) - 1.0).abs() < 1e-15);
        assert_eq!(balayage(&DiscMeasure::zero(), 1.3), 0.0);
        // Fubini: ∫B_μ dm = μ(𝔻)
        let mu = DiscMeasure::atoms(vec![
            DiscAtom::polar(0.5, 0.0, 1.0).unwrap(),
            DiscAtom::polar(0.9, 2.0, 0.5).unwrap(),
        ])
        .unwrap();
        let n = 4096;
        let mean: f64 = (0..n).map(|j| balayage(&mu, 2.0 * PI * j as f64 / n as f64)).sum::<f64>() / n as f64;
        assert!((mean - 1.5).abs() < 1e-8);
    }

    #[test]
    fn a_kernel_examples() {
        let mu = DiscMeasure::point(c(0.0, 0.0), 1.0).unwrap();
        assert!((a_mu_kernel(&mu, 0.2, 2.5) - 1.0).abs() < 1e-15);
        let mu = DiscMeasure::point(c(0.5, 0.0), 1.0).unwrap();
        assert!((a_mu_kernel(&mu, 0.0, 0.0) - 9.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mu = random_atomic(&mut rng, 6);
        for _ in 0..50 {
            let (t, p) = (rng.gen_range(0.0..6.28), rng.gen_range(0.0..6.28));
            assert!((a_mu_kernel(&mu, t, p) - a_mu_kernel(&mu, p, t)).abs() < 1e-12 * a_mu_kernel(&mu, t, p));
        }
    }

    #[test]
    fn f_profile_examples() {
        let mu = DiscMeasure::point(c(0.0, 0.0), 1.0).unwrap();
        for y in [0.1, 0.5, 2.0] {
            assert!((f_mu_profile(&mu, y, 0.0) - y * y / (1.0 + y * y)).abs() < 1e-15);
        }
        assert_eq!(f_mu_profile(&DiscMeasure::zero(), 0.5, 0.0), 0.0);
    }

    #[test]
    fn f_profile_monotone_and_comparable_to_v() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mu = random_atomic(&mut rng, 5);
            let ys: Vec<f64> = (0..64).map(|j| PI * (j as f64 + 1.0) / 64.0).collect();
            let fs: Vec<f64> = ys.iter().map(|&y| f_mu_profile(&mu, y, 0.0)).collect();
            for j in 1..64 {
                assert!(fs[j] >= fs[j - 1]);
                assert!(fs[j] / (ys[j] * ys[j]) <= fs[j - 1] / (ys[j - 1] * ys[j - 1]) * (1.0 + 1e-12));
            }
            for k in 1..12 {
                let y = 0.5f64.powi(k);
                let f = f_mu_profile(&mu, y, 0.0);
                let v = y * v_mu(&mu, DiscPoint::radial(y, 0.0));
                let ratio = f / v;
                assert!((1.0 / 16.0..=16.0).contains(&ratio), "ratio {ratio}");
            }
        }
    }

    #[test]
    fn uniform_ring_f_profile_matches_dense_atoms() {
        let g = QuadratureGrid::dyadic(3, 1, 1).unwrap();
        let values = vec![1.0; g.len()];
        let mu = DiscMeasure::new(Vec::new(), Some(DiscDensity { grid: g, values })).unwrap();
        let mut atoms = Vec::new();
        for ring in mu.rings() {
            let m = 1 << 14;
            for l in 0..m {
                atoms.push(DiscAtom::polar(ring.radius, 2.0 * PI * l as f64 / m as f64, ring.total / m as f64).unwrap());
            }
        }
        let dense = DiscMeasure::atoms(atoms).unwrap();
        for y in [0.01, 0.2, 1.0] {
            let a = f_mu_profile(&mu, y, 0.4);
            let b = f_mu_profile(&dense, y, 0.4);
            assert!((a - b).abs() < 1e-6 * a, "{a} {b}");
        }
    }
}
