//! Gauss–Legendre rules and tensor polar quadrature on the unit disk.

use std::f64::consts::PI;

use crate::C64;

/// Radial Gauss–Legendre order of the standard disk rule.
pub const DISK_RADIAL_ORDER: usize = 64;
/// Angular trapezoid nodes of the standard disk rule.
pub const DISK_ANGULAR_NODES: usize = 512;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`, exact for degree `2n - 1`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = self.nodes.iter().map(|x| mid + half * x).collect();
        let weights = self.weights.iter().map(|w| half * w).collect();
        (nodes, weights)
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (x, w) = self.on_interval(a, b);
        x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Tensor grid `r_i e^{i theta_j}` with radial weights for `int_0^1 dr` and
/// `n_theta` equispaced angles `theta_j = 2 pi j / n_theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    n_theta: usize,
}

impl PolarGrid {
    /// A grid from explicit radii and radial weights.
    pub fn new(radii: Vec<f64>, radial_weights: Vec<f64>, n_theta: usize) -> crate::Result<Self> {
        if radii.len() != radial_weights.len() || radii.is_empty() || n_theta == 0 {
            return Err(crate::Error::Dimension(format!(
                "{} radii, {} weights, {} angles",
                radii.len(),
                radial_weights.len(),
                n_theta
            )));
        }
        if radii.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(crate::Error::Domain("grid radii must lie in [0, 1]".into()));
        }
        Ok(PolarGrid {
            radii,
            radial_weights,
            n_theta,
        })
    }

    /// Gauss–Legendre radii on `(0, 1)` times the periodic trapezoid rule.
    pub fn gauss_legendre(radial_order: usize, n_theta: usize) -> Self {
        let (radii, radial_weights) = GaussLegendre::new(radial_order).on_interval(0.0, 1.0);
        PolarGrid {
            radii,
            radial_weights,
            n_theta,
        }
    }

    /// Radii `1/n, 2/n, ..., 1`; the weights are a first-order rule and only
    /// meant for sampling, not accurate integration.
    pub fn uniform(n_r: usize, n_theta: usize) -> Self {
        let radii = (1..=n_r).map(|i| i as f64 / n_r as f64).collect();
        PolarGrid {
            radii,
            radial_weights: vec![1.0 / n_r as f64; n_r],
            n_theta,
        }
    }

    /// The 64 x 512 rule used for moments, pairings and `A_1` norms.
    pub fn standard() -> Self {
        Self::gauss_legendre(DISK_RADIAL_ORDER, DISK_ANGULAR_NODES)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_points(&self) -> usize {
        self.radii.len() * self.n_theta
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    /// Grid points in radius-major order.
    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        self.radii.iter().flat_map(move |&r| {
            (0..self.n_theta).map(move |j| C64::from_polar(r, self.theta(j)))
        })
    }

    /// `iint_D f dx dy` using samples in radius-major order.
    pub fn integrate_values(&self, values: &[C64]) -> C64 {
        assert_eq!(values.len(), self.n_points(), "sample count does not match grid");
        let dtheta = 2.0 * PI / self.n_theta as f64;
        let mut total = C64::new(0.0, 0.0);
        for (i, (&r, &w)) in self.radii.iter().zip(&self.radial_weights).enumerate() {
            let ring: C64 = values[i * self.n_theta..(i + 1) * self.n_theta].iter().sum();
            total += ring * (w * r * dtheta);
        }
        total
    }

    pub fn integrate(&self, f: impl Fn(C64) -> C64) -> C64 {
        let values: Vec<C64> = self.points().map(f).collect();
        self.integrate_values(&values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the limit
        let v = rule.integrate(0.0, 1.0, |x| x.powi(15));
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn high_order_rule_is_accurate() {
        let rule = GaussLegendre::new(64);
        for p in [0, 1, 10, 60, 120] {
            let v = rule.integrate(0.0, 1.0, |x| x.powi(p));
            assert!((v - 1.0 / (p as f64 + 1.0)).abs() < 1e-15, "p = {p}");
        }
    }

    #[test]
    fn disk_area_and_moments() {
        let grid = PolarGrid::standard();
        let area = grid.integrate(|_| C64::new(1.0, 0.0));
        assert!((area.re - PI).abs() < 1e-13);
        // iint |z|^2 = pi / 2
        let m2 = grid.integrate(|z| C64::new(z.norm_sqr(), 0.0));
        assert!((m2.re - PI / 2.0).abs() < 1e-13);
        // iint z = 0 by angular orthogonality
        assert!(grid.integrate(|z| z).norm() < 1e-14);
    }
}
