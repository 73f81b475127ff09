//! Closed boundary sets: finite unions of arcs and points, and Cantor-type sets.

use crate::error::{invalid, Result};
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// Closed arc from `start` counterclockwise over `length` radians; length 0 is a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(length >= 0.0 && length <= TAU) || !start.is_finite() {
            return invalid(format!("arc length {length} must lie in [0, 2π]"));
        }
        Ok(Arc { start: start.rem_euclid(TAU), length })
    }

    /// Arc of normalized measure `m` centred at `center`.
    pub fn centered(center: f64, m: f64) -> Result<Self> {
        Arc::new(center - PI * m, TAU * m)
    }

    pub fn midpoint(&self) -> f64 {
        (self.start + 0.5 * self.length).rem_euclid(TAU)
    }

    /// Normalized measure |I|.
    pub fn measure(&self) -> f64 {
        self.length / TAU
    }

    pub fn angular_distance(&self, theta: f64) -> f64 {
        let x = (theta - self.start).rem_euclid(TAU);
        if x <= self.length {
            0.0
        } else {
            (x - self.length).min(TAU - x)
        }
    }
}

/// Middle-gap Cantor construction on an arc: at level k each arc keeps two end pieces of relative length ratios[k].
#[derive(Clone, Debug, PartialEq)]
pub struct CantorSet {
    pub base: Arc,
    pub ratios: Vec<f64>,
}

impl CantorSet {
    pub fn middle_thirds(base: Arc, levels: usize) -> Self {
        CantorSet { base, ratios: vec![1.0 / 3.0; levels] }
    }

    /// Ratios ½·(k+1)/(k+2), so 2^k·ℓ_k ≍ 1/k and |E_t| ≍ 1/log(1/t).
    pub fn slowly_thinning(base: Arc, levels: usize) -> Self {
        let ratios = (0..levels).map(|k| 0.5 * (k as f64 + 1.0) / (k as f64 + 2.0)).collect();
        CantorSet { base, ratios }
    }

    pub fn level_length(&self, level: usize) -> f64 {
        self.base.length * self.ratios[..level].iter().product::<f64>()
    }

    pub fn arcs_at(&self, level: usize) -> Vec<Arc> {
        let mut arcs = vec![self.base];
        for &r in &self.ratios[..level] {
            let mut next = Vec::with_capacity(arcs.len() * 2);
            for a in &arcs {
                let l = a.length * r;
                next.push(Arc { start: a.start, length: l });
                next.push(Arc { start: (a.start + a.length - l).rem_euclid(TAU), length: l });
            }
            arcs = next;
        }
        arcs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundarySet {
    Empty,
    Circle,
    Arcs(Vec<Arc>),
    Points(Vec<f64>),
    Cantor(CantorSet),
}

impl BoundarySet {
    pub fn point(theta: f64) -> Self {
        BoundarySet::Points(vec![theta.rem_euclid(TAU)])
    }

    pub fn arc(a: Arc) -> Self {
        BoundarySet::Arcs(vec![a])
    }

    /// Finite list of closed arcs (points as zero-length arcs) covering the set at a resolution finer than `scale`.
    pub fn components(&self, scale: f64) -> Vec<Arc> {
        match self {
            BoundarySet::Empty => Vec::new(),
            BoundarySet::Circle => vec![Arc { start: 0.0, length: TAU }],
            BoundarySet::Arcs(a) => a.clone(),
            BoundarySet::Points(p) => p.iter().map(|&t| Arc { start: t.rem_euclid(TAU), length: 0.0 }).collect(),
            BoundarySet::Cantor(c) => {
                let mut level = 0;
                while level < c.ratios.len() && c.level_length(level) > scale && level < 22 {
                    level += 1;
                }
                c.arcs_at(level)
            }
        }
    }

    /// Normalized Lebesgue measure of the set.
    pub fn measure(&self) -> f64 {
        match self {
            BoundarySet::Empty | BoundarySet::Points(_) => 0.0,
            BoundarySet::Circle => 1.0,
            BoundarySet::Arcs(a) => union_measure(a, 0.0),
            BoundarySet::Cantor(c) => {
                let l = c.ratios.len();
                c.level_length(l) * 2f64.powi(l as i32) / TAU
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            BoundarySet::Empty => true,
            BoundarySet::Arcs(a) => a.is_empty(),
            BoundarySet::Points(p) => p.is_empty(),
            _ => false,
        }
    }

    /// Angular distance from e^{iθ} to the set.
    pub fn angular_distance(&self, theta: f64) -> f64 {
        match self {
            BoundarySet::Empty => f64::INFINITY,
            BoundarySet::Circle => 0.0,
            _ => self
                .components(1e-9)
                .iter()
                .map(|a| a.angular_distance(theta))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Chordal distance |ζ − E|.
    pub fn distance(&self, theta: f64) -> f64 {
        let d = self.angular_distance(theta);
        if d.is_infinite() {
            return d;
        }
        2.0 * (0.5 * d).sin()
    }

    /// |E_t| for E_t = {ζ : d(ζ,E) < t} with chordal d.
    pub fn neighborhood_measure(&self, t: f64) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        if t >= 2.0 {
            return 1.0;
        }
        let delta = 2.0 * (0.5 * t).asin();
        let comps = self.components(t / 8.0);
        union_measure(&comps, delta)
    }

    /// Closure of E_t as disjoint arcs; an arc crossing angle 0 is kept whole.
    pub fn neighborhood_arcs(&self, t: f64) -> Vec<Arc> {
        match self {
            BoundarySet::Empty => return Vec::new(),
            BoundarySet::Circle => return vec![Arc { start: 0.0, length: TAU }],
            _ => {}
        }
        let delta = if t >= 2.0 { PI } else { 2.0 * (0.5 * t).asin() };
        let scale = if t > 0.0 { t / 8.0 } else { 1e-9 };
        let mut iv = merged_intervals(&self.components(scale), delta);
        if iv.len() > 1 && iv[0].0 <= 0.0 && iv[iv.len() - 1].1 >= TAU {
            let first = iv.remove(0);
            let last = iv.last_mut().unwrap();
            last.1 = TAU + first.1;
        }
        iv.into_iter()
            .map(|(a, b)| Arc { start: a.rem_euclid(TAU), length: (b - a).min(TAU) })
            .collect()
    }

    /// Nodes e^{2πij/n} lying in E or at chordal distance < t from it.
    pub fn node_mask(&self, n: usize, t: f64) -> Vec<bool> {
        let mut mask = vec![false; n];
        match self {
            BoundarySet::Empty => return mask,
            BoundarySet::Circle => return vec![true; n],
            _ => {}
        }
        let h = TAU / n as f64;
        let delta = if t >= 2.0 { PI } else { 2.0 * (0.5 * t).asin() };
        let comps = self.components(h / 4.0);
        for a in comps {
            // closed arc ∪ open δ-neighbourhood
            let lo = a.start - delta;
            let hi = a.start + a.length + delta;
            let j0 = (lo / h).floor() as i64 - 1;
            let j1 = (hi / h).ceil() as i64 + 1;
            for j in j0..=j1 {
                let th = j as f64 * h;
                let inside_arc = th >= a.start - 1e-12 && th <= a.start + a.length + 1e-12;
                let near = th > lo && th < hi && delta > 0.0;
                if inside_arc || near {
                    mask[j.rem_euclid(n as i64) as usize] = true;
                }
            }
        }
        mask
    }
}

/// Normalized measure of ⋃ (a_i expanded by δ on both sides).
fn union_measure(arcs: &[Arc], delta: f64) -> f64 {
    let total: f64 = merged_intervals(arcs, delta).iter().map(|(a, b)| b - a).sum();
    (total / TAU).min(1.0)
}

/// Disjoint sorted intervals in [0, 2π] covering ⋃ (a_i expanded by δ).
fn merged_intervals(arcs: &[Arc], delta: f64) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = Vec::with_capacity(arcs.len() + 1);
    for a in arcs {
        let len = a.length + 2.0 * delta;
        if len >= TAU {
            return vec![(0.0, TAU)];
        }
        let s = (a.start - delta).rem_euclid(TAU);
        if s + len > TAU {
            iv.push((s, TAU));
            iv.push((0.0, s + len - TAU));
        } else {
            iv.push((s, s + len));
        }
    }
    iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_neighbourhoods() {
        let e = BoundarySet::Points(vec![0.0, PI]);
        let t = 0.01f64;
        let delta = 2.0 * (0.5 * t).asin();
        assert!((e.neighborhood_measure(t) - 2.0 * 2.0 * delta / TAU).abs() < 1e-15);
        assert_eq!(BoundarySet::Empty.neighborhood_measure(0.3), 0.0);
    }

    #[test]
    fn arc_measure_and_distance() {
        let a = Arc::new(0.0, 1.0).unwrap();
        let e = BoundarySet::arc(a);
        assert!((e.measure() - 1.0 / TAU).abs() < 1e-15);
        assert_eq!(e.angular_distance(0.5), 0.0);
        assert!((e.angular_distance(1.5) - 0.5).abs() < 1e-15);
        assert!((e.angular_distance(-0.25) - 0.25).abs() < 1e-15);
        assert!((e.distance(1.5) - 2.0 * 0.25f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn wrapped_union() {
        let arcs = vec![Arc::new(6.0, 1.0).unwrap(), Arc::new(0.5, 0.3).unwrap()];
        let m = union_measure(&arcs, 0.0);
        // [6, 7) wraps to [6, 2π) ∪ [0, 0.7168...); [0.5, 0.8) overlaps
        let expect = (TAU - 6.0) + 0.8;
        assert!((m * TAU - expect).abs() < 1e-12);
        let merged = BoundarySet::Arcs(arcs).neighborhood_arcs(0.0);
        assert_eq!(merged.len(), 1);
        assert!((merged[0].start - 6.0).abs() < 1e-12);
        assert!((merged[0].length - expect).abs() < 1e-12);
    }

    #[test]
    fn cantor_levels() {
        let c = CantorSet::middle_thirds(Arc::new(0.0, 1.0).unwrap(), 6);
        assert_eq!(c.arcs_at(3).len(), 8);
        assert!((c.level_length(2) - 1.0 / 9.0).abs() < 1e-15);
        let e = BoundarySet::Cantor(c);
        assert!((e.measure() * TAU - (2.0f64 / 3.0).powi(6)).abs() < 1e-12);
    }

    #[test]
    fn node_mask_counts() {
        let n = 64;
        let e = BoundarySet::point(0.0);
        let h = TAU / n as f64;
        let m = e.node_mask(n, 0.0);
        assert_eq!(m.iter().filter(|&&b| b).count(), 1);
        // chordal t slightly above one spacing reaches the two neighbours
        let t = 2.0 * (0.5 * h * 1.01).sin();
        let m = e.node_mask(n, t);
        assert_eq!(m.iter().filter(|&&b| b).count(), 3);
        assert!(BoundarySet::Circle.node_mask(n, 0.0).iter().all(|&b| b));
    }
}
