//! Uniform tensor grid over the covering box, Q1 shape functions and
//! tensor Gauss-Legendre rules on the reference square `[-1, 1]^2`.

use crate::error::{DdmError, Result};
use crate::geometry::Point;

/// Axis-aligned box `[xmin, xmax] x [ymin, ymax]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxDomain {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl BoxDomain {
    pub const fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Self { xmin, xmax, ymin, ymax }
    }

    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }
}

/// Uniform grid with lexicographic node numbering `j * (nx + 1) + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub domain: BoxDomain,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn new(domain: BoxDomain, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(DdmError::Grid(format!("need at least 2 cells per axis, got {nx}x{ny}")));
        }
        let BoxDomain { xmin, xmax, ymin, ymax } = domain;
        if ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) || xmax <= xmin || ymax <= ymin {
            return Err(DdmError::Grid(format!("degenerate box [{xmin}, {xmax}] x [{ymin}, {ymax}]")));
        }
        if (nx + 1).checked_mul(ny + 1).is_none_or(|n| n > u32::MAX as usize) {
            return Err(DdmError::Grid(format!("{nx}x{ny} grid has too many nodes")));
        }
        Ok(Self {
            domain,
            nx,
            ny,
            hx: (xmax - xmin) / nx as f64,
            hy: (ymax - ymin) / ny as f64,
        })
    }

    pub fn num_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn node(&self, k: usize) -> Point {
        let i = k % (self.nx + 1);
        let j = k / (self.nx + 1);
        self.node_at(i, j)
    }

    pub fn node_at(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.domain.xmin + i as f64 * self.hx,
            self.domain.ymin + j as f64 * self.hy,
        )
    }

    /// Node indices of cell `(i, j)` in counterclockwise order starting at
    /// the lower-left corner; matches the ordering of [`q1_shape`].
    pub fn cell_nodes(&self, i: usize, j: usize) -> [usize; 4] {
        let n0 = self.node_index(i, j);
        let stride = self.nx + 1;
        [n0, n0 + 1, n0 + stride + 1, n0 + stride]
    }

    /// Physical point of reference coordinates `(xi, eta)` in cell `(i, j)`.
    pub fn map(&self, i: usize, j: usize, xi: f64, eta: f64) -> Point {
        Point::new(
            self.domain.xmin + (i as f64 + 0.5 * (xi + 1.0)) * self.hx,
            self.domain.ymin + (j as f64 + 0.5 * (eta + 1.0)) * self.hy,
        )
    }

    /// Jacobian determinant of the reference-to-cell map.
    pub fn jacobian(&self) -> f64 {
        0.25 * self.hx * self.hy
    }

    /// Nodal interpolation of `f`.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        (0..self.num_nodes()).map(|k| f(self.node(k))).collect()
    }
}

/// Values and reference gradients of the four bilinear shape functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeEval {
    pub values: [f64; 4],
    pub grads: [[f64; 2]; 4],
}

const CORNERS: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// `N_a(xi, eta) = (1 + xi_a xi)(1 + eta_a eta) / 4`.
pub fn q1_shape(xi: f64, eta: f64) -> ShapeEval {
    let mut values = [0.0; 4];
    let mut grads = [[0.0; 2]; 4];
    for (a, [ca, cb]) in CORNERS.iter().enumerate() {
        let sx = 1.0 + ca * xi;
        let sy = 1.0 + cb * eta;
        values[a] = 0.25 * sx * sy;
        grads[a] = [0.25 * ca * sy, 0.25 * cb * sx];
    }
    ShapeEval { values, grads }
}

/// Quadrature rule on `[-1, 1]^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    /// `(xi, eta, weight)`.
    pub points: Vec<(f64, f64, f64)>,
    pub order: usize,
}

fn gauss_legendre_1d(n: usize) -> Option<Vec<(f64, f64)>> {
    let rule = match n {
        2 => {
            let a = 1.0 / 3.0_f64.sqrt();
            vec![(-a, 1.0), (a, 1.0)]
        }
        3 => {
            let a = 0.6_f64.sqrt();
            vec![(-a, 5.0 / 9.0), (0.0, 8.0 / 9.0), (a, 5.0 / 9.0)]
        }
        4 => {
            let s = (6.0_f64 / 5.0).sqrt();
            let a = ((3.0 - 2.0 * s) / 7.0).sqrt();
            let b = ((3.0 + 2.0 * s) / 7.0).sqrt();
            let wa = (18.0 + 30.0_f64.sqrt()) / 36.0;
            let wb = (18.0 - 30.0_f64.sqrt()) / 36.0;
            vec![(-b, wb), (-a, wa), (a, wa), (b, wb)]
        }
        5 => {
            let s = 2.0 * (10.0_f64 / 7.0).sqrt();
            let a = (5.0 - s).sqrt() / 3.0;
            let b = (5.0 + s).sqrt() / 3.0;
            let r = 70.0_f64.sqrt();
            let wa = (322.0 + 13.0 * r) / 900.0;
            let wb = (322.0 - 13.0 * r) / 900.0;
            vec![(-b, wb), (-a, wa), (0.0, 128.0 / 225.0), (a, wa), (b, wb)]
        }
        _ => return None,
    };
    Some(rule)
}

/// Tensor Gauss-Legendre rule with `n` points per axis, exact for
/// polynomials of degree `2n - 1` in each variable.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    let line = gauss_legendre_1d(n).ok_or(DdmError::QuadratureOrder(n))?;
    let mut points = Vec::with_capacity(n * n);
    for &(eta, wy) in &line {
        for &(xi, wx) in &line {
            points.push((xi, eta, wx * wy));
        }
    }
    Ok(QuadratureRule { points, order: 2 * n - 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> BoxDomain {
        BoxDomain::new(0.0, 1.0, 0.0, 1.0)
    }

    #[test]
    fn counts() {
        let g = Grid::new(unit_square(), 2, 2).unwrap();
        assert_eq!(g.num_nodes(), 9);
        assert_eq!(g.num_cells(), 4);
        let g = Grid::new(BoxDomain::new(-0.5, 0.5, -0.5, 0.5), 512, 512).unwrap();
        assert_eq!(g.hx, 1.0 / 512.0);
        assert_eq!(g.hy, 1.0 / 512.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(unit_square(), 1, 4).is_err());
        assert!(Grid::new(BoxDomain::new(0.0, 0.0, 0.0, 1.0), 4, 4).is_err());
    }

    #[test]
    fn cell_nodes_are_counterclockwise() {
        let g = Grid::new(unit_square(), 3, 2).unwrap();
        let nodes = g.cell_nodes(1, 1);
        let p: Vec<Point> = nodes.iter().map(|&k| g.node(k)).collect();
        // signed area of the quadrilateral is positive
        let area: f64 = (0..4)
            .map(|a| {
                let (u, v) = (p[a], p[(a + 1) % 4]);
                u.x * v.y - v.x * u.y
            })
            .sum::<f64>()
            * 0.5;
        assert!((area - g.hx * g.hy).abs() < 1e-15);
        for (a, [xi, eta]) in CORNERS.iter().enumerate() {
            assert_eq!(g.map(1, 1, *xi, *eta), p[a]);
        }
    }

    #[test]
    fn shape_values_at_reference_points() {
        assert_eq!(q1_shape(-1.0, -1.0).values, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(q1_shape(0.0, 0.0).values, [0.25; 4]);
    }

    #[test]
    fn partition_of_unity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = q1_shape(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            assert!((s.values.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let gx: f64 = s.grads.iter().map(|g| g[0]).sum();
            let gy: f64 = s.grads.iter().map(|g| g[1]).sum();
            assert!(gx.abs() < 1e-15 && gy.abs() < 1e-15);
        }
    }

    #[test]
    fn gauss_rule_exactness() {
        let r2 = gauss_rule(2).unwrap();
        let w: f64 = r2.points.iter().map(|p| p.2).sum();
        assert!((w - 4.0).abs() < 1e-15);
        let i: f64 = r2.points.iter().map(|&(x, y, w)| w * x * x * y * y).sum();
        assert!((i - 4.0 / 9.0).abs() < 1e-14);

        let r4 = gauss_rule(4).unwrap();
        let i: f64 = r4.points.iter().map(|&(x, _, w)| w * x.powi(6)).sum();
        // int_{-1}^{1} x^6 dx * int_{-1}^{1} dy
        assert!((i - 2.0 * 2.0 / 7.0).abs() < 1e-13);

        for n in 2..=5 {
            let r = gauss_rule(n).unwrap();
            let deg = (2 * n - 1) as i32;
            let exact = |k: i32| if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            for (a, b) in [(deg, 0), (deg - 1, deg - 1), (0, deg - 1)] {
                let i: f64 = r.points.iter().map(|&(x, y, w)| w * x.powi(a) * y.powi(b)).sum();
                assert!((i - exact(a) * exact(b)).abs() < 1e-13, "n={n} a={a} b={b}");
            }
        }
        assert!(gauss_rule(1).is_err());
        assert!(gauss_rule(6).is_err());
    }

    #[test]
    fn interpolant_reproduces_bilinears() {
        let g = Grid::new(BoxDomain::new(-0.5, 0.5, -0.3, 0.7), 5, 4).unwrap();
        let f = |p: Point| 1.0 + 2.0 * p.x - 3.0 * p.y + 4.0 * p.x * p.y;
        let u = g.interpolate(f);
        let rule = gauss_rule(3).unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let nodes = g.cell_nodes(i, j);
                for &(xi, eta, _) in &rule.points {
                    let s = q1_shape(xi, eta);
                    let uh: f64 = (0..4).map(|a| s.values[a] * u[nodes[a]]).sum();
                    assert!((uh - f(g.map(i, j, xi, eta))).abs() < 1e-13);
                }
            }
        }
    }
}
