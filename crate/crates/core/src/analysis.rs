//! Weighted error norms, convergence-rate tables and numerical probes of the
//! weighted trace and Poincare inequalities.

use std::fmt::Write as _;

use crate::assembly::{Discretization, ExactSolution};
use crate::error::{DdmError, Result};
use crate::geometry::Point;

/// `sqrt(int (u_h - u)^2 omega dx)` over the covering box.
pub fn weighted_l2_distance(disc: &Discretization, u_h: &[f64], reference: &dyn Fn(Point) -> f64) -> Result<f64> {
    check_len(disc, u_h)?;
    let mut acc = 0.0;
    disc.for_each_point(|nodes, x, q, s, wj| {
        let n = &disc.shapes()[q].values;
        let uh: f64 = (0..4).map(|a| n[a] * u_h[nodes[a]]).sum();
        let e = uh - reference(x);
        acc += e * e * s.omega * wj;
    });
    Ok(acc.sqrt())
}

/// Full weighted H1 distance `sqrt(||e||^2 + ||grad e||^2)`.
pub fn weighted_h1_distance(
    disc: &Discretization,
    u_h: &[f64],
    reference: &dyn Fn(Point) -> f64,
    reference_grad: &dyn Fn(Point) -> Point,
) -> Result<f64> {
    check_len(disc, u_h)?;
    let grads: Vec<[[f64; 2]; 4]> = (0..disc.rule.points.len()).map(|q| disc.physical_grads(q)).collect();
    let mut acc = 0.0;
    disc.for_each_point(|nodes, x, q, s, wj| {
        let n = &disc.shapes()[q].values;
        let g = &grads[q];
        let mut uh = 0.0;
        let mut gx = 0.0;
        let mut gy = 0.0;
        for a in 0..4 {
            let v = u_h[nodes[a]];
            uh += n[a] * v;
            gx += g[a][0] * v;
            gy += g[a][1] * v;
        }
        let e = uh - reference(x);
        let rg = reference_grad(x);
        let (ex, ey) = (gx - rg.x, gy - rg.y);
        acc += (e * e + ex * ex + ey * ey) * s.omega * wj;
    });
    Ok(acc.sqrt())
}

fn check_len(disc: &Discretization, u: &[f64]) -> Result<()> {
    if u.len() != disc.num_nodes() {
        return Err(DdmError::Dimension { expected: disc.num_nodes(), got: u.len() });
    }
    Ok(())
}

pub fn weighted_l2_error(disc: &Discretization, u_h: &[f64], exact: Option<&ExactSolution>, t: f64) -> Result<f64> {
    let exact = exact.ok_or(DdmError::MissingExact(""))?;
    weighted_l2_distance(disc, u_h, &|p| (exact.value)(t, p))
}

pub fn weighted_h1_error(disc: &Discretization, u_h: &[f64], exact: Option<&ExactSolution>, t: f64) -> Result<f64> {
    let exact = exact.ok_or(DdmError::MissingExact(""))?;
    let grad = exact.gradient.as_ref().ok_or(DdmError::MissingExact(" gradient"))?;
    weighted_h1_distance(disc, u_h, &|p| (exact.value)(t, p), &|p| grad(t, p))
}

/// `int h omega dx`, the diffuse approximation of `int_D h dx`.
pub fn diffuse_volume_integral(disc: &Discretization, h: &dyn Fn(Point) -> f64) -> f64 {
    let mut acc = 0.0;
    disc.for_each_point(|_, x, _, s, wj| acc += h(x) * s.omega * wj);
    acc
}

/// `int h |grad omega| dx`, the diffuse approximation of `int_{dD} h ds`.
pub fn diffuse_surface_integral(disc: &Discretization, h: &dyn Fn(Point) -> f64) -> f64 {
    let mut acc = 0.0;
    disc.for_each_point(|_, x, _, s, wj| acc += h(x) * s.grad_mag * wj);
    acc
}

/// Weighted integrals of a test function `v` used by the inequality probes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedMoments {
    /// `int v^2 omega`
    pub l2_sq: f64,
    /// `int |grad v|^2 omega`
    pub grad_sq: f64,
    /// `int v^2 |grad omega|`
    pub trace_sq: f64,
}

impl WeightedMoments {
    pub fn compute(disc: &Discretization, v: &dyn Fn(Point) -> f64, grad_v: &dyn Fn(Point) -> Point) -> Self {
        let mut m = Self { l2_sq: 0.0, grad_sq: 0.0, trace_sq: 0.0 };
        disc.for_each_point(|_, x, _, s, wj| {
            let val = v(x);
            let g = grad_v(x);
            m.l2_sq += val * val * s.omega * wj;
            m.grad_sq += g.dot(g) * s.omega * wj;
            m.trace_sq += val * val * s.grad_mag * wj;
        });
        m
    }

    /// `int v^2 |grad omega| / ||v||^2_{H1(omega)}`.
    pub fn trace_ratio(&self) -> f64 {
        self.trace_sq / (self.l2_sq + self.grad_sq)
    }

    /// `||v||^2_{L2(omega)} / (||grad v||^2_{L2(omega)} + int v^2 |grad omega|)`.
    pub fn poincare_ratio(&self) -> f64 {
        self.l2_sq / (self.grad_sq + self.trace_sq)
    }
}

/// Errors of one solver run at the final time.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub epsilon: f64,
    pub l2_weighted: f64,
    pub h1_weighted: f64,
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub report: ErrorReport,
    pub l2_rate: Option<f64>,
    pub h1_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

/// `log2(e_prev / e_next)`.
pub fn halving_rate(e_prev: f64, e_next: f64) -> f64 {
    (e_prev / e_next).log2()
}

/// Relative slack when checking that consecutive thicknesses halve.
const HALVING_TOL: f64 = 1e-12;

pub fn is_halving(eps: &[f64]) -> bool {
    eps.windows(2).all(|w| (w[0] - 2.0 * w[1]).abs() <= HALVING_TOL * w[0])
}

/// Rates between consecutive reports; thicknesses must halve exactly.
pub fn rate_table(reports: Vec<ErrorReport>) -> Result<RateTable> {
    if reports.is_empty() {
        return Err(DdmError::Rates("no reports".into()));
    }
    let eps: Vec<f64> = reports.iter().map(|r| r.epsilon).collect();
    if !is_halving(&eps) {
        return Err(DdmError::Rates(format!("eps must halve between consecutive runs, got {eps:?}")));
    }
    let mut rows: Vec<RateRow> = Vec::with_capacity(reports.len());
    for report in reports {
        let (l2_rate, h1_rate) = match rows.last() {
            Some(prev) => (
                Some(halving_rate(prev.report.l2_weighted, report.l2_weighted)),
                Some(halving_rate(prev.report.h1_weighted, report.h1_weighted)),
            ),
            None => (None, None),
        };
        rows.push(RateRow { report, l2_rate, h1_rate });
    }
    Ok(RateTable { rows })
}

impl RateTable {
    /// Table without rate columns, for sweeps whose thicknesses do not halve.
    pub fn without_rates(reports: Vec<ErrorReport>) -> Self {
        Self { rows: reports.into_iter().map(|report| RateRow { report, l2_rate: None, h1_rate: None }).collect() }
    }

    pub fn l2_rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.l2_rate).collect()
    }

    pub fn h1_rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.h1_rate).collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>10}  {:>12}  {:>6}  {:>12}  {:>6}", "eps", "L2 error", "rate", "H1 error", "rate");
        for row in &self.rows {
            let rate = |r: Option<f64>| r.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
            let _ = writeln!(
                out,
                "{:>10}  {:>12.4e}  {:>6}  {:>12.4e}  {:>6}",
                format_epsilon(row.report.epsilon),
                row.report.l2_weighted,
                rate(row.l2_rate),
                row.report.h1_weighted,
                rate(row.h1_rate)
            );
        }
        out
    }

    /// CSV with header `epsilon,l2_error,l2_rate,h1_error,h1_rate,nx,ny,nt,seconds`.
    /// The `seconds` column is left empty unless `with_timing` is set, so that
    /// identical runs produce identical files.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from("epsilon,l2_error,l2_rate,h1_error,h1_rate,nx,ny,nt,seconds\n");
        let rate = |r: Option<f64>| r.map_or_else(String::new, |v| format!("{v:.6}"));
        for row in &self.rows {
            let r = &row.report;
            let secs = if with_timing { format!("{:.3}", r.seconds) } else { String::new() };
            let _ = writeln!(
                out,
                "{:e},{:.10e},{},{:.10e},{},{},{},{},{}",
                r.epsilon,
                r.l2_weighted,
                rate(row.l2_rate),
                r.h1_weighted,
                rate(row.h1_rate),
                r.nx,
                r.ny,
                r.nt,
                secs
            );
        }
        out
    }
}

/// `1/2^k` thicknesses print as fractions, anything else as a decimal.
pub fn format_epsilon(eps: f64) -> String {
    let inv = 1.0 / eps;
    if inv.fract() == 0.0 && (1.0..1e9).contains(&inv) {
        format!("1/{}", inv as u64)
    } else {
        format!("{eps}")
    }
}
