//! CSR storage, a compact symmetric nine-point stencil, matrix-vector
//! products and Jacobi-preconditioned conjugate gradients. All reductions run
//! in a fixed sequential order so results are bit-reproducible.

use crate::error::{DdmError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    /// Column indices, sorted within each row.
    pub col_idx: Vec<u32>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n as u32).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::identity(diag.len());
        m.values.copy_from_slice(diag);
        m
    }

    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            assert_eq!(row.len(), n, "dense matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    col_idx.push(j as u32);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { n, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Position of entry `(i, j)` in `values`, if it is stored.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.col_idx[start..self.row_ptr[i + 1]].binary_search(&(j as u32)).ok().map(|p| start + p)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Positions of the diagonal entries in `values`.
    pub fn diagonal_positions(&self) -> Result<Vec<usize>> {
        (0..self.n)
            .map(|i| self.position(i, i).ok_or_else(|| DdmError::Solver(format!("row {i} has no stored diagonal"))))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// `max |A_ij - A_ji|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j as usize, i)).abs());
            }
        }
        worst
    }

    pub fn same_pattern(&self, other: &CsrMatrix) -> bool {
        self.n == other.n && self.row_ptr == other.row_ptr && self.col_idx == other.col_idx
    }

    /// `alpha * self + beta * other` for matrices sharing one sparsity pattern.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Result<CsrMatrix> {
        if !self.same_pattern(other) {
            return Err(DdmError::Solver("linear combination needs identical sparsity patterns".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(CsrMatrix { values, ..self.clone() })
    }

    /// Adds `diag[i]` to every stored diagonal entry.
    pub fn add_diagonal(&mut self, diag: &[f64]) -> Result<()> {
        check_len(self.n, diag.len())?;
        for (i, d) in diag.iter().enumerate() {
            let p = self
                .position(i, i)
                .ok_or_else(|| DdmError::Solver(format!("row {i} has no stored diagonal")))?;
            self.values[p] += d;
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `y = A x`, reusing `y`.
    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (yi, w) in y.iter_mut().zip(self.row_ptr.windows(2)) {
            *yi = row_dot(&self.col_idx[w[0]..w[1]], &self.values[w[0]..w[1]], x);
        }
    }
}

#[inline]
fn row_dot(cols: &[u32], vals: &[f64], x: &[f64]) -> f64 {
    if let (Ok(c), Ok(v)) = (<&[u32; 9]>::try_from(cols), <&[f64; 9]>::try_from(vals)) {
        // interior Q1 rows: three independent partial sums
        let p = |k: usize| v[k] * x[c[k] as usize];
        return (p(0) + p(1) + p(2)) + (p(3) + p(4) + p(5)) + (p(6) + p(7) + p(8));
    }
    let mut acc = 0.0;
    for (&j, &v) in cols.iter().zip(vals) {
        acc += v * x[j as usize];
    }
    acc
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(DdmError::Dimension { expected, got })
    }
}

/// Square operator seen by [`cg_solve`].
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn diagonal(&self) -> Vec<f64>;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// `y = A x`, returning `x . y` accumulated in row order.
    fn apply_dot(&self, x: &[f64], y: &mut [f64]) -> f64 {
        self.apply(x, y);
        x.iter().zip(y.iter()).map(|(a, b)| a * b).fold(0.0, |acc, v| acc + v)
    }

    /// Sets `p = r * inv_diag + beta p`, then `y = A p`, returning `p . y`.
    fn update_apply_dot(&self, p: &mut [f64], r: &[f64], inv_diag: &[f64], beta: f64, y: &mut [f64]) -> f64 {
        for ((pi, ri), di) in p.iter_mut().zip(r).zip(inv_diag) {
            *pi = ri * di + beta * *pi;
        }
        self.apply_dot(p, y)
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn diagonal(&self) -> Vec<f64> {
        CsrMatrix::diagonal(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_into(x, y);
    }

    fn apply_dot(&self, x: &[f64], y: &mut [f64]) -> f64 {
        let mut acc = 0.0;
        for ((yi, w), xi) in y.iter_mut().zip(self.row_ptr.windows(2)).zip(x) {
            let v = row_dot(&self.col_idx[w[0]..w[1]], &self.values[w[0]..w[1]], x);
            *yi = v;
            acc += xi * v;
        }
        acc
    }
}

/// Symmetric matrix whose row `k` couples only to `k +- {1, w - 1, w, w + 1}`,
/// the bilinear element pattern on a node grid `w` wide. Only the diagonal
/// and the four upper couplings of every row are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricStencil {
    pub width: usize,
    pub diag: Vec<f64>,
    /// `a(k, k + 1), a(k, k + w - 1), a(k, k + w), a(k, k + w + 1)`; zero when
    /// the neighbor does not exist.
    pub upper: Vec<[f64; 4]>,
}

impl SymmetricStencil {
    fn offsets(width: usize) -> [usize; 4] {
        [1, width - 1, width, width + 1]
    }

    /// Upper half of `mat` when its pattern fits the stencil of some width
    /// `w >= 3`; `None` otherwise. The lower half is not compared.
    pub fn from_csr(mat: &CsrMatrix) -> Option<Self> {
        let n = mat.n;
        let mut max_off = 0;
        for i in 0..n {
            let (cols, _) = mat.row(i);
            if let Some(&last) = cols.last() {
                max_off = max_off.max((last as usize).saturating_sub(i));
            }
        }
        let width = max_off.checked_sub(1).filter(|&w| w >= 3)?;
        let offs = Self::offsets(width);
        let mut diag = vec![0.0; n];
        let mut upper = vec![[0.0; 4]; n];
        for i in 0..n {
            let (cols, vals) = mat.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let j = j as usize;
                if j == i {
                    diag[i] = v;
                } else if j > i {
                    let s = offs.iter().position(|&o| o == j - i)?;
                    upper[i][s] = v;
                } else if !offs.contains(&(i - j)) {
                    return None;
                }
            }
        }
        Some(Self { width, diag, upper })
    }

    /// Becomes `base` with `d` added to the diagonal.
    pub fn set_shifted_diagonal(&mut self, base: &SymmetricStencil, d: &[f64]) {
        self.width = base.width;
        self.upper.clone_from(&base.upper);
        self.diag.clone_from(&base.diag);
        for (out, s) in self.diag.iter_mut().zip(d) {
            *out += s;
        }
    }

    #[inline]
    fn row(&self, k: usize, x: &[f64]) -> f64 {
        let offs = Self::offsets(self.width);
        let n = self.diag.len();
        let mut acc = self.diag[k] * x[k];
        for (s, &o) in offs.iter().enumerate() {
            if k + o < n {
                acc += self.upper[k][s] * x[k + o];
            }
            if k >= o {
                acc += self.upper[k - o][s] * x[k - o];
            }
        }
        acc
    }
}

impl LinearOperator for SymmetricStencil {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_dot(x, y);
    }

    fn apply_dot(&self, x: &[f64], y: &mut [f64]) -> f64 {
        let n = self.diag.len();
        let w = self.width;
        let reach = w + 1;
        let mut acc = 0.0;
        if n <= 2 * reach {
            for k in 0..n {
                y[k] = self.row(k, x);
                acc += x[k] * y[k];
            }
            return acc;
        }
        for k in 0..reach {
            y[k] = self.row(k, x);
            acc += x[k] * y[k];
        }
        // every neighbor index is in range here
        let (d, up) = (&self.diag[..], &self.upper[..]);
        for k in reach..n - reach {
            let a = &up[k];
            let (e, nw, no, ne) = (&up[k - 1], &up[k - w + 1], &up[k - w], &up[k - w - 1]);
            let here = d[k] * x[k];
            let above = (a[0] * x[k + 1] + a[1] * x[k + w - 1]) + (a[2] * x[k + w] + a[3] * x[k + w + 1]);
            let below = (e[0] * x[k - 1] + nw[1] * x[k - w + 1]) + (no[2] * x[k - w] + ne[3] * x[k - w - 1]);
            let v = here + above + below;
            y[k] = v;
            acc += x[k] * v;
        }
        for k in n - reach..n {
            y[k] = self.row(k, x);
            acc += x[k] * y[k];
        }
        acc
    }

    /// Updates `p` one stencil reach ahead of the product, so both happen
    /// in a single sweep.
    fn update_apply_dot(&self, p: &mut [f64], r: &[f64], inv_diag: &[f64], beta: f64, y: &mut [f64]) -> f64 {
        let n = self.diag.len();
        let w = self.width;
        let reach = w + 1;
        if n <= 2 * reach {
            for k in 0..n {
                p[k] = r[k] * inv_diag[k] + beta * p[k];
            }
            return self.apply_dot(p, y);
        }
        for k in 0..=reach {
            p[k] = r[k] * inv_diag[k] + beta * p[k];
        }
        let mut acc = 0.0;
        for k in 0..reach {
            let j = k + reach + 1;
            p[j] = r[j] * inv_diag[j] + beta * p[j];
            y[k] = self.row(k, p);
            acc += p[k] * y[k];
        }
        let (d, up) = (&self.diag[..], &self.upper[..]);
        for k in reach..n - reach {
            if k + reach + 1 < n {
                let j = k + reach + 1;
                p[j] = r[j] * inv_diag[j] + beta * p[j];
            }
            let a = &up[k];
            let (e, nw, no, ne) = (&up[k - 1], &up[k - w + 1], &up[k - w], &up[k - w - 1]);
            let here = d[k] * p[k];
            let above = (a[0] * p[k + 1] + a[1] * p[k + w - 1]) + (a[2] * p[k + w] + a[3] * p[k + w + 1]);
            let below = (e[0] * p[k - 1] + nw[1] * p[k - w + 1]) + (no[2] * p[k - w] + ne[3] * p[k - w - 1]);
            let v = here + above + below;
            y[k] = v;
            acc += p[k] * v;
        }
        for k in n - reach..n {
            y[k] = self.row(k, p);
            acc += p[k] * y[k];
        }
        acc
    }
}

pub fn spmv(mat: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_len(mat.n, x.len())?;
    let mut y = vec![0.0; mat.n];
    mat.mul_into(x, &mut y);
    Ok(y)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOptions {
    /// Relative residual target `||b - A x|| <= tol ||b||`.
    pub tol: f64,
    pub max_iter: usize,
}

impl CgOptions {
    /// Default iteration cap `10 sqrt(n)` (at least 50).
    pub fn for_size(tol: f64, n: usize) -> Self {
        Self { tol, max_iter: ((10.0 * (n as f64).sqrt()).ceil() as usize).max(50) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Relative floor applied to the Jacobi diagonal.
pub const DIAG_FLOOR: f64 = 1e-12;

pub fn cg_solve<A: LinearOperator + ?Sized>(mat: &A, rhs: &[f64], x0: &[f64], opts: CgOptions) -> Result<(Vec<f64>, CgReport)> {
    cg_solve_monitored(mat, rhs, x0, opts, |_, _| {})
}

/// Same as [`cg_solve`], calling `monitor(iteration, r . z)` after every
/// update, where `z` is the preconditioned residual.
pub fn cg_solve_monitored<A: LinearOperator + ?Sized>(
    mat: &A,
    rhs: &[f64],
    x0: &[f64],
    opts: CgOptions,
    mut monitor: impl FnMut(usize, f64),
) -> Result<(Vec<f64>, CgReport)> {
    let n = mat.dim();
    check_len(n, rhs.len())?;
    check_len(n, x0.len())?;
    if !(opts.tol > 0.0) {
        return Err(DdmError::Solver(format!("tolerance must be positive, got {}", opts.tol)));
    }

    let bnorm = norm2(rhs);
    if !bnorm.is_finite() {
        return Err(DdmError::Solver("non-finite right-hand side".into()));
    }
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], CgReport { iterations: 0, relative_residual: 0.0, converged: true }));
    }

    let diag = mat.diagonal();
    let dmax = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let floor = DIAG_FLOOR * dmax;
    let inv_diag: Vec<f64> = diag.iter().map(|&d| 1.0 / d.max(floor).max(f64::MIN_POSITIVE)).collect();

    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    mat.apply(&x, &mut r);
    r.iter_mut().zip(rhs).for_each(|(ri, bi)| *ri = bi - *ri);
    let target = opts.tol * bnorm;

    let mut rnorm = norm2(&r);
    if !rnorm.is_finite() {
        return Err(DdmError::Solver("non-finite initial residual".into()));
    }
    // p is formed lazily at the start of each sweep: p = z + beta p
    let mut p = vec![0.0; n];
    let mut beta = 0.0;
    let mut rz = r.iter().zip(&inv_diag).map(|(a, d)| a * (a * d)).fold(0.0, |acc, v| acc + v);
    let mut ap = vec![0.0; n];
    let mut it = 0;
    monitor(0, rz);

    while rnorm > target && it < opts.max_iter {
        // p update, ap = A p and p.Ap in one sweep
        let pap = mat.update_apply_dot(&mut p, &r, &inv_diag, beta, &mut ap);
        if !pap.is_finite() {
            return Err(DdmError::Solver(format!("non-finite curvature at iteration {it}")));
        }
        if pap <= 0.0 {
            return Err(DdmError::Solver(format!("matrix not positive definite (p.Ap = {pap:e}) at iteration {it}")));
        }
        let alpha = rz / pap;
        let mut rz_new = 0.0;
        let mut rr = 0.0;
        for ((((xi, ri), pi), api), di) in x.iter_mut().zip(r.iter_mut()).zip(&p).zip(&ap).zip(&inv_diag) {
            *xi += alpha * pi;
            *ri -= alpha * api;
            rz_new += *ri * *ri * di;
            rr += *ri * *ri;
        }
        beta = rz_new / rz;
        rz = rz_new;
        rnorm = rr.sqrt();
        it += 1;
        if !rnorm.is_finite() {
            return Err(DdmError::Solver(format!("non-finite residual at iteration {it}")));
        }
        monitor(it, rz);
    }

    // report the true residual, not the recursively updated one
    mat.apply(&x, &mut ap);
    let true_res = ap.iter().zip(rhs).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt() / bnorm;
    let converged = rnorm <= target && true_res <= opts.tol * 10.0;
    Ok((x, CgReport { iterations: it, relative_residual: true_res, converged }))
}
