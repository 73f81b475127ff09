//! Gauss–Legendre rules and a few composite integrators.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = (order + 1) / 2;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }

    /// Mapped nodes and weights on [a, b].
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive Gauss–Legendre: bisect until the 10-point value of a panel matches the sum of its halves.
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, rel_tol: f64, max_depth: usize) -> f64 {
    let gl = GaussLegendre::new(10);
    let whole = gl.integrate(a, b, &mut *f);
    adaptive_rec(&gl, f, a, b, whole, rel_tol, max_depth)
}

fn adaptive_rec<F: FnMut(f64) -> f64>(
    gl: &GaussLegendre,
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl.integrate(a, m, &mut *f);
    let right = gl.integrate(m, b, &mut *f);
    let both = left + right;
    if depth == 0 || (both - whole).abs() <= tol * both.abs().max(1e-300) {
        return both;
    }
    adaptive_rec(gl, f, a, m, left, tol, depth - 1) + adaptive_rec(gl, f, m, b, right, tol, depth - 1)
}

/// Geometrically graded breakpoints on [a, b] clustering toward the listed singular ends.
pub fn graded(a: f64, b: f64, toward_a: bool, toward_b: bool, levels: usize) -> Vec<f64> {
    let len = b - a;
    let mut pts = vec![a, b];
    for j in 1..=levels {
        let d = len * 0.5f64.powi(j as i32 + 1);
        if toward_a {
            pts.push(a + d);
        }
        if toward_b {
            pts.push(b - d);
        }
    }
    if !toward_a && !toward_b {
        pts.push(a + 0.5 * len);
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-300);
    pts
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let mut f = |x: f64| 1.0 / x.sqrt();
        let v = adaptive(&mut f, 0.0, 1.0, 1e-12, 60);
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((fit_slope(&xs, &ys) - 3.0).abs() < 1e-12);
    }
}
