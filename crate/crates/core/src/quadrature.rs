//! Fixed-order Gauss–Legendre panels and midpoint-sample interpolation.

use std::f64::consts::PI;

/// Panel order used by the kernel and variance quadratures.
pub const PANEL_ORDER: usize = 4;

/// Gauss–Legendre nodes and weights mapped to the unit interval [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `order`-point rule by Newton iteration on P_n.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes on [0, 1], ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for [0, 1]; they sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_a^b f.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut acc = 0.0;
        self.visit(a, b, |x, w| acc += w * f(x));
        acc
    }

    /// ∫_a^b f over `panels` equal sub-intervals.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let mut acc = 0.0;
        self.visit_composite(a, b, panels, |x, w| acc += w * f(x));
        acc
    }

    /// ∫_a^b f on panels aligned with the uniform mesh {k·h}: full mesh
    /// cells inside [a, b] plus the partial end cells.
    pub fn integrate_on_mesh<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, h: f64, mut f: F) -> f64 {
        let mut acc = 0.0;
        self.visit_mesh(a, b, h, |x, w| acc += w * f(x));
        acc
    }

    /// Calls `f(node, weight)` for the rule mapped onto [a, b].
    pub fn visit<F: FnMut(f64, f64)>(&self, a: f64, b: f64, mut f: F) {
        let h = b - a;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            f(a + h * x, w * h);
        }
    }

    pub fn visit_composite<F: FnMut(f64, f64)>(&self, a: f64, b: f64, panels: usize, mut f: F) {
        let h = (b - a) / panels as f64;
        for k in 0..panels {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == panels { b } else { lo + h };
            self.visit(lo, hi, &mut f);
        }
    }

    pub fn visit_mesh<F: FnMut(f64, f64)>(&self, a: f64, b: f64, h: f64, mut f: F) {
        if b <= a {
            return;
        }
        // tolerate rounding when a or b sit on a mesh point
        let snap = |v: f64| {
            let r = (v / h).round();
            if (v / h - r).abs() < 1e-9 {
                r
            } else {
                f64::NAN
            }
        };
        let first = {
            let s = snap(a);
            if s.is_nan() {
                (a / h).ceil()
            } else {
                s
            }
        };
        let last = {
            let s = snap(b);
            if s.is_nan() {
                (b / h).floor()
            } else {
                s
            }
        };
        if first >= last {
            self.visit(a, b, f);
            return;
        }
        let start = first * h;
        if start > a {
            self.visit(a, start, &mut f);
        }
        let mut k = first;
        while k < last {
            self.visit(k * h, (k + 1.0) * h, &mut f);
            k += 1.0;
        }
        let end = last * h;
        if b > end {
            self.visit(end, b, &mut f);
        }
    }
}

/// (P_n(x), P_n'(x)).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Samples of a smooth function taken at the midpoints of `len` equal bins
/// of [0, extent], evaluated anywhere in [0, extent] by four-point Lagrange
/// interpolation (one-sided stencils at the ends). Zero outside the interval.
#[derive(Debug, Clone, Copy)]
pub struct MidpointSamples<'a> {
    values: &'a [f64],
    h: f64,
}

impl<'a> MidpointSamples<'a> {
    pub fn new(values: &'a [f64], extent: f64) -> Self {
        Self {
            values,
            h: extent / values.len() as f64,
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        let n = self.values.len();
        let extent = self.h * n as f64;
        if !(0.0..=extent).contains(&x) {
            return 0.0;
        }
        if n < 4 {
            return self.linear(x);
        }
        // position in units of bins, measured from the first midpoint
        let u = x / self.h - 0.5;
        let base = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let s = u - base as f64;
        // nodes at s = 0, 1, 2, 3
        let v = &self.values[base..base + 4];
        let l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
        let l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
        let l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
        let l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
        l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3]
    }

    fn linear(&self, x: f64) -> f64 {
        let n = self.values.len();
        if n == 1 {
            return self.values[0];
        }
        let u = (x / self.h - 0.5).clamp(0.0, (n - 1) as f64);
        let i = (u.floor() as usize).min(n - 2);
        let s = u - i as f64;
        (1.0 - s) * self.values[i] + s * self.values[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_polynomials_are_exact() {
        for order in 1..=10 {
            let rule = GaussLegendre::new(order);
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-14, "order {order}");
            let degree = 2 * order - 1;
            let got = rule.integrate(0.0, 2.0, |x| x.powi(degree as i32));
            let want = 2f64.powi(degree as i32 + 1) / (degree as f64 + 1.0);
            assert!(((got - want) / want).abs() < 1e-13, "order {order}");
        }
    }

    #[test]
    fn four_point_nodes_match_closed_form() {
        let rule = GaussLegendre::new(4);
        let inner = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        assert!((rule.nodes()[2] - 0.5 * (1.0 + inner)).abs() < 1e-15);
    }

    #[test]
    fn mesh_aligned_integration_matches_plain_composite() {
        let rule = GaussLegendre::new(PANEL_ORDER);
        let f = |x: f64| (3.0 * x).cos() * (-x).exp();
        let exact = {
            // ∫ e^{-x} cos 3x = e^{-x}(3 sin 3x − cos 3x)/10
            let g = |x: f64| (-x).exp() * (3.0 * (3.0 * x).sin() - (3.0 * x).cos()) / 10.0;
            g(0.93) - g(0.11)
        };
        let got = rule.integrate_on_mesh(0.11, 0.93, 0.05, f);
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let n = 16;
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.3 * x * x * x;
        let vals: Vec<f64> = (0..n).map(|k| f((k as f64 + 0.5) / n as f64)).collect();
        let s = MidpointSamples::new(&vals, 1.0);
        for &x in &[0.0, 0.01, 0.33, 0.5, 0.97, 1.0] {
            assert!((s.at(x) - f(x)).abs() < 1e-13, "x = {x}");
        }
        assert_eq!(s.at(1.5), 0.0);
    }
}
