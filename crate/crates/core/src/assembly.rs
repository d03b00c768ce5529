//! Weighted finite element operators of the diffuse domain problem.
//!
//! Every integral runs over the whole covering box with the phase-field
//! weight supplied by a [`Weight`]: `omega` for volume terms and
//! `|grad omega|` for the diffuse boundary term. Weight samples at all
//! quadrature points are computed once per [`Discretization`] and reused by
//! every assembly call, including the per-step loads.

use std::sync::Arc;

use crate::error::{DdmError, Result};
use crate::geometry::{Point, Weight, WeightSample};
use crate::grid::{gauss_rule, q1_shape, Grid, QuadratureRule, ShapeEval};
use crate::linalg::CsrMatrix;

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
/// `f(t, x, u)`.
pub type Reaction = Arc<dyn Fn(f64, Point, f64) -> f64 + Send + Sync>;
/// `g(t, y, n)` with `y` a boundary point and `n` the outward normal there.
/// Off the boundary the datum is extended constant along normals: a point
/// `x` of the interface band sees `g(t, foot(x), n(x))`.
pub type NeumannData = Arc<dyn Fn(f64, Point, Point) -> f64 + Send + Sync>;
pub type SpaceTimeField = Arc<dyn Fn(f64, Point) -> f64 + Send + Sync>;
pub type SpaceTimeGradient = Arc<dyn Fn(f64, Point) -> Point + Send + Sync>;

#[derive(Clone)]
pub struct ExactSolution {
    pub value: SpaceTimeField,
    pub gradient: Option<SpaceTimeGradient>,
}

/// Data of a semilinear parabolic problem with Neumann boundary conditions.
/// All fields must be evaluable on the whole covering box.
#[derive(Clone)]
pub struct ProblemSpec {
    pub diffusion: ScalarField,
    /// Coercivity constant: `kappa <= A(x) <= 1 / kappa`.
    pub kappa: f64,
    pub reaction: Reaction,
    /// `df/du`, used to stabilize stiff reactions (see the time stepper).
    pub reaction_derivative: Option<Reaction>,
    pub neumann: NeumannData,
    pub initial: ScalarField,
    pub exact: Option<ExactSolution>,
    pub final_time: f64,
    /// Abort when `max |u|` exceeds this value.
    pub blowup_limit: Option<f64>,
}

impl ProblemSpec {
    /// Pure diffusion with `A = a`, `f = 0`, `g = 0` and the given initial datum.
    pub fn heat(a: f64, initial: ScalarField, final_time: f64) -> Self {
        Self {
            diffusion: Arc::new(move |_| a),
            kappa: a.min(1.0 / a),
            reaction: Arc::new(|_, _, _| 0.0),
            reaction_derivative: None,
            neumann: Arc::new(|_, _, _| 0.0),
            initial,
            exact: None,
            final_time,
            blowup_limit: None,
        }
    }
}

/// Grid plus quadrature rule plus cached weight samples.
pub struct Discretization {
    pub grid: Grid,
    pub rule: QuadratureRule,
    shapes: Vec<ShapeEval>,
    samples: Vec<WeightSample>,
}

impl Discretization {
    pub fn new(grid: Grid, weight: &dyn Weight, quad_order: usize) -> Result<Self> {
        let rule = gauss_rule(quad_order)?;
        let shapes: Vec<ShapeEval> = rule.points.iter().map(|&(xi, eta, _)| q1_shape(xi, eta)).collect();
        let nq = rule.points.len();
        let mut samples = Vec::with_capacity(grid.num_cells() * nq);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                for &(xi, eta, _) in &rule.points {
                    samples.push(weight.sample(grid.map(i, j, xi, eta)));
                }
            }
        }
        Ok(Self { grid, rule, shapes, samples })
    }

    pub fn num_nodes(&self) -> usize {
        self.grid.num_nodes()
    }

    pub fn shapes(&self) -> &[ShapeEval] {
        &self.shapes
    }

    /// Weight samples of cell `(i, j)`, in rule order.
    pub fn cell_samples(&self, i: usize, j: usize) -> &[WeightSample] {
        let nq = self.rule.points.len();
        let c = j * self.grid.nx + i;
        &self.samples[c * nq..(c + 1) * nq]
    }

    /// Physical gradients of the shape functions at quadrature point `q`.
    pub fn physical_grads(&self, q: usize) -> [[f64; 2]; 4] {
        let sx = 2.0 / self.grid.hx;
        let sy = 2.0 / self.grid.hy;
        let g = &self.shapes[q].grads;
        [
            [g[0][0] * sx, g[0][1] * sy],
            [g[1][0] * sx, g[1][1] * sy],
            [g[2][0] * sx, g[2][1] * sy],
            [g[3][0] * sx, g[3][1] * sy],
        ]
    }

    /// Visits every quadrature point as
    /// `visit(cell nodes, physical point, q index, weight sample, w * |J|)`.
    pub fn for_each_point(&self, mut visit: impl FnMut([usize; 4], Point, usize, &WeightSample, f64)) {
        let jac = self.grid.jacobian();
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let nodes = self.grid.cell_nodes(i, j);
                let samples = self.cell_samples(i, j);
                for (q, &(xi, eta, w)) in self.rule.points.iter().enumerate() {
                    visit(nodes, self.grid.map(i, j, xi, eta), q, &samples[q], w * jac);
                }
            }
        }
    }

    /// `int omega dx` with the cached samples.
    pub fn weighted_volume(&self) -> f64 {
        let mut total = 0.0;
        self.for_each_point(|_, _, _, s, wj| total += s.omega * wj);
        total
    }
}

/// Empty CSR pattern of the Q1 stiffness/mass on `grid` (nine-point stencil).
pub fn q1_pattern(grid: &Grid) -> CsrMatrix {
    let (nx, ny) = (grid.nx, grid.ny);
    let n = grid.num_nodes();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(9 * n);
    row_ptr.push(0);
    for j in 0..=ny {
        for i in 0..=nx {
            for jj in j.saturating_sub(1)..=(j + 1).min(ny) {
                for ii in i.saturating_sub(1)..=(i + 1).min(nx) {
                    col_idx.push(grid.node_index(ii, jj) as u32);
                }
            }
            row_ptr.push(col_idx.len());
        }
    }
    let values = vec![0.0; col_idx.len()];
    CsrMatrix { n, row_ptr, col_idx, values }
}

fn scatter(mat: &mut CsrMatrix, nodes: &[usize; 4], local: &[[f64; 4]; 4]) {
    for a in 0..4 {
        for b in 0..4 {
            let p = mat.position(nodes[a], nodes[b]).expect("Q1 pattern covers every cell pair");
            mat.values[p] += local[a][b];
        }
    }
}

/// `M_ij = int N_i N_j omega dx`.
pub fn assemble_weighted_mass(disc: &Discretization) -> CsrMatrix {
    let mut mat = q1_pattern(&disc.grid);
    let jac = disc.grid.jacobian();
    for j in 0..disc.grid.ny {
        for i in 0..disc.grid.nx {
            let samples = disc.cell_samples(i, j);
            let mut local = [[0.0; 4]; 4];
            for (q, &(_, _, w)) in disc.rule.points.iter().enumerate() {
                let n = &disc.shapes[q].values;
                let c = w * jac * samples[q].omega;
                for a in 0..4 {
                    for b in 0..4 {
                        local[a][b] += c * n[a] * n[b];
                    }
                }
            }
            scatter(&mut mat, &disc.grid.cell_nodes(i, j), &local);
        }
    }
    mat
}

/// `K_ij = int A grad N_i . grad N_j omega dx`. Fails if `A` is not
/// positive and finite at some quadrature point.
pub fn assemble_weighted_stiffness(disc: &Discretization, diffusion: &dyn Fn(Point) -> f64) -> Result<CsrMatrix> {
    let mut mat = q1_pattern(&disc.grid);
    let jac = disc.grid.jacobian();
    let grads: Vec<[[f64; 2]; 4]> = (0..disc.rule.points.len()).map(|q| disc.physical_grads(q)).collect();
    for j in 0..disc.grid.ny {
        for i in 0..disc.grid.nx {
            let samples = disc.cell_samples(i, j);
            let mut local = [[0.0; 4]; 4];
            for (q, &(xi, eta, w)) in disc.rule.points.iter().enumerate() {
                let x = disc.grid.map(i, j, xi, eta);
                let a_val = diffusion(x);
                if !(a_val > 0.0 && a_val.is_finite()) {
                    return Err(DdmError::Coercivity { value: a_val, x: x.x, y: x.y, lo: 0.0, hi: f64::INFINITY });
                }
                let c = w * jac * samples[q].omega * a_val;
                let g = &grads[q];
                for a in 0..4 {
                    for b in 0..4 {
                        local[a][b] += c * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                    }
                }
            }
            scatter(&mut mat, &disc.grid.cell_nodes(i, j), &local);
        }
    }
    Ok(mat)
}

/// Verifies `kappa <= A <= 1/kappa` at every quadrature point.
pub fn check_coercivity(disc: &Discretization, diffusion: &dyn Fn(Point) -> f64, kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(DdmError::Coercivity { value: kappa, x: f64::NAN, y: f64::NAN, lo: 0.0, hi: 1.0 });
    }
    let (lo, hi) = (kappa, 1.0 / kappa);
    let mut bad = None;
    disc.for_each_point(|_, x, _, _, _| {
        if bad.is_none() {
            let a = diffusion(x);
            if !(a >= lo && a <= hi) {
                bad = Some(DdmError::Coercivity { value: a, x: x.x, y: x.y, lo, hi });
            }
        }
    });
    bad.map_or(Ok(()), Err)
}

fn check_nodes(disc: &Discretization, u: &[f64]) -> Result<()> {
    if u.len() != disc.num_nodes() {
        return Err(DdmError::Dimension { expected: disc.num_nodes(), got: u.len() });
    }
    Ok(())
}

/// `b_i = int f(t, x, u_h(x)) N_i omega dx`.
pub fn assemble_source(disc: &Discretization, f: &dyn Fn(f64, Point, f64) -> f64, t: f64, u: &[f64]) -> Result<Vec<f64>> {
    check_nodes(disc, u)?;
    let mut b = vec![0.0; disc.num_nodes()];
    let mut bad = None;
    disc.for_each_point(|nodes, x, q, s, wj| {
        let n = &disc.shapes[q].values;
        let uh = n[0] * u[nodes[0]] + n[1] * u[nodes[1]] + n[2] * u[nodes[2]] + n[3] * u[nodes[3]];
        let fv = f(t, x, uh);
        if !fv.is_finite() {
            bad.get_or_insert(DdmError::NonFinite { what: "reaction term", t, x: x.x, y: x.y });
            return;
        }
        let c = fv * s.omega * wj;
        for a in 0..4 {
            b[nodes[a]] += c * n[a];
        }
    });
    bad.map_or(Ok(b), Err)
}

/// `c_i = int g(t, foot(x), n(x)) N_i |grad omega| dx`, the diffuse boundary
/// integral with `g` carried constant along normals.
pub fn assemble_boundary_load(disc: &Discretization, g: &dyn Fn(f64, Point, Point) -> f64, t: f64) -> Result<Vec<f64>> {
    let mut c = vec![0.0; disc.num_nodes()];
    let mut bad = None;
    disc.for_each_point(|nodes, x, q, s, wj| {
        if s.grad_mag == 0.0 {
            return;
        }
        let gv = g(t, s.foot, s.normal);
        if !gv.is_finite() {
            bad.get_or_insert(DdmError::NonFinite { what: "Neumann datum", t, x: x.x, y: x.y });
            return;
        }
        let n = &disc.shapes[q].values;
        let v = gv * s.grad_mag * wj;
        for a in 0..4 {
            c[nodes[a]] += v * n[a];
        }
    });
    bad.map_or(Ok(c), Err)
}
