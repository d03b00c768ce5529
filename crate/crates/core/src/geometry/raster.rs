use super::{Mask, Point};
use crate::error::{DdmError, Result};

/// Signed distance sampled on the cell centers of a binary mask.
///
/// Built by fast sweeping on `|grad d| = 1`. Cells with a 4-neighbor of the
/// opposite type are seeded with half a cell (the distance to the shared
/// face); everything else is relaxed by Gauss-Seidel sweeps in the four
/// diagonal orderings until the largest update falls below `1e-10 * cell`.
#[derive(Clone, Debug)]
pub struct RasterDistance {
    pub width: usize,
    pub height: usize,
    pub cell: f64,
    /// Lower-left corner of the raster.
    pub origin: Point,
    values: Vec<f64>,
    grad_x: Vec<f64>,
    grad_y: Vec<f64>,
}

impl RasterDistance {
    pub fn from_mask(mask: &Mask, cell: f64, origin: Point) -> Result<Self> {
        if !(cell > 0.0 && cell.is_finite()) {
            return Err(DdmError::Geometry(format!("cell size must be positive, got {cell}")));
        }
        let (w, h) = (mask.width, mask.height);
        if w == 0 || h == 0 {
            return Err(DdmError::DegenerateMask("empty mask".into()));
        }
        let inside_count = mask.data.iter().filter(|&&b| b).count();
        if inside_count == 0 || inside_count == mask.data.len() {
            return Err(DdmError::DegenerateMask(
                "mask must contain both inside and outside cells".into(),
            ));
        }

        let idx = |i: usize, j: usize| j * w + i;
        let mut dist = vec![f64::INFINITY; w * h];
        let mut fixed = vec![false; w * h];
        for j in 0..h {
            for i in 0..w {
                let me = mask.get(i, j);
                let mut seam = false;
                if i > 0 && mask.get(i - 1, j) != me {
                    seam = true;
                }
                if i + 1 < w && mask.get(i + 1, j) != me {
                    seam = true;
                }
                if j > 0 && mask.get(i, j - 1) != me {
                    seam = true;
                }
                if j + 1 < h && mask.get(i, j + 1) != me {
                    seam = true;
                }
                if seam {
                    dist[idx(i, j)] = 0.5 * cell;
                    fixed[idx(i, j)] = true;
                }
            }
        }

        let tol = 1e-10 * cell;
        loop {
            let mut max_change: f64 = 0.0;
            for (rev_i, rev_j) in [(false, false), (true, false), (true, true), (false, true)] {
                for jj in 0..h {
                    let j = if rev_j { h - 1 - jj } else { jj };
                    for ii in 0..w {
                        let i = if rev_i { w - 1 - ii } else { ii };
                        let k = idx(i, j);
                        if fixed[k] {
                            continue;
                        }
                        let a = f64::min(
                            if i > 0 { dist[k - 1] } else { f64::INFINITY },
                            if i + 1 < w { dist[k + 1] } else { f64::INFINITY },
                        );
                        let b = f64::min(
                            if j > 0 { dist[k - w] } else { f64::INFINITY },
                            if j + 1 < h { dist[k + w] } else { f64::INFINITY },
                        );
                        let cand = if (a - b).abs() >= cell {
                            a.min(b) + cell
                        } else {
                            0.5 * (a + b + (2.0 * cell * cell - (a - b) * (a - b)).sqrt())
                        };
                        if cand < dist[k] {
                            let change = if dist[k].is_finite() { dist[k] - cand } else { f64::INFINITY };
                            max_change = max_change.max(change);
                            dist[k] = cand;
                        }
                    }
                }
            }
            if max_change < tol {
                break;
            }
        }

        for j in 0..h {
            for i in 0..w {
                if mask.get(i, j) {
                    dist[idx(i, j)] = -dist[idx(i, j)];
                }
            }
        }

        let mut grad_x = vec![0.0; w * h];
        let mut grad_y = vec![0.0; w * h];
        for j in 0..h {
            for i in 0..w {
                grad_x[idx(i, j)] = difference(w, cell, |m| dist[idx(m, j)], i);
                grad_y[idx(i, j)] = difference(h, cell, |m| dist[idx(i, m)], j);
            }
        }

        Ok(Self { width: w, height: h, cell, origin, values: dist, grad_x, grad_y })
    }

    /// Distance stored at the center of cell `(i, j)`.
    pub fn node_value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        self.origin + Point::new((i as f64 + 0.5) * self.cell, (j as f64 + 0.5) * self.cell)
    }

    /// Upper-right corner of the raster.
    pub fn extent(&self) -> Point {
        self.origin + Point::new(self.width as f64 * self.cell, self.height as f64 * self.cell)
    }

    fn bilinear(&self, field: &[f64], p: Point) -> (f64, f64) {
        let fx = (p.x - self.origin.x) / self.cell - 0.5;
        let fy = (p.y - self.origin.y) / self.cell - 0.5;
        let cx = fx.clamp(0.0, (self.width - 1) as f64);
        let cy = fy.clamp(0.0, (self.height - 1) as f64);
        let overshoot = Point::new((fx - cx) * self.cell, (fy - cy) * self.cell).norm();
        let i0 = (cx.floor() as usize).min(self.width.saturating_sub(2));
        let j0 = (cy.floor() as usize).min(self.height.saturating_sub(2));
        let i1 = (i0 + 1).min(self.width - 1);
        let j1 = (j0 + 1).min(self.height - 1);
        let tx = cx - i0 as f64;
        let ty = cy - j0 as f64;
        let at = |i: usize, j: usize| field[j * self.width + i];
        let v = (1.0 - tx) * (1.0 - ty) * at(i0, j0)
            + tx * (1.0 - ty) * at(i1, j0)
            + tx * ty * at(i1, j1)
            + (1.0 - tx) * ty * at(i0, j1);
        (v, overshoot)
    }

    /// Bilinear interpolation of the cell-center distances. Queries beyond
    /// the outermost centers are clamped onto them and the clamping distance
    /// is added, which keeps the field 1-Lipschitz and growing outward.
    pub fn eval(&self, p: Point) -> f64 {
        let (v, overshoot) = self.bilinear(&self.values, p);
        v + overshoot
    }

    pub fn eval_with_gradient(&self, p: Point) -> (f64, Point) {
        let (v, overshoot) = self.bilinear(&self.values, p);
        let (gx, _) = self.bilinear(&self.grad_x, p);
        let (gy, _) = self.bilinear(&self.grad_y, p);
        (v + overshoot, Point::new(gx, gy))
    }
}

fn difference(n: usize, h: f64, at: impl Fn(usize) -> f64, i: usize) -> f64 {
    if n < 2 {
        0.0
    } else if i == 0 {
        (at(1) - at(0)) / h
    } else if i == n - 1 {
        (at(n - 1) - at(n - 2)) / h
    } else {
        (at(i + 1) - at(i - 1)) / (2.0 * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_edt(mask: &Mask, cell: f64, i: usize, j: usize) -> f64 {
        // distance from cell center (i, j) to the nearest face separating
        // cells of opposite type
        let me = mask.get(i, j);
        let c = Point::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
        let mut best = f64::INFINITY;
        for jj in 0..mask.height {
            for ii in 0..mask.width {
                if mask.get(ii, jj) == me {
                    continue;
                }
                // nearest point of the opposite cell's square
                let lo = Point::new(ii as f64 * cell, jj as f64 * cell);
                let q = Point::new(c.x.clamp(lo.x, lo.x + cell), c.y.clamp(lo.y, lo.y + cell));
                best = best.min(c.dist(q));
            }
        }
        if me {
            -best
        } else {
            best
        }
    }

    #[test]
    fn single_pixel() {
        let mut data = vec![false; 25];
        data[12] = true;
        let mask = Mask::new(5, 5, data).unwrap();
        let r = RasterDistance::from_mask(&mask, 1.0, Point::default()).unwrap();
        assert!((r.node_value(2, 2) + 0.5).abs() < 0.1);
        for (i, j) in [(1, 2), (3, 2), (2, 1), (2, 3)] {
            assert!((r.node_value(i, j) - 0.5).abs() < 0.1);
            assert!((r.node_value(i, j) - brute_force_edt(&mask, 1.0, i, j)).abs() < 0.1);
        }
        assert!((r.node_value(2, 2) - brute_force_edt(&mask, 1.0, 2, 2)).abs() < 0.1);
    }

    #[test]
    fn half_plane_is_within_one_cell() {
        let (w, h) = (20, 8);
        let data = (0..w * h).map(|k| k % w < 7).collect();
        let mask = Mask::new(w, h, data).unwrap();
        let cell = 0.05;
        let r = RasterDistance::from_mask(&mask, cell, Point::default()).unwrap();
        let interface = 7.0 * cell;
        for j in 0..h {
            for i in 0..w {
                let c = r.cell_center(i, j);
                assert!((r.eval(c) - (c.x - interface)).abs() < cell);
            }
        }
        let x = Point::new(0.3, 0.2);
        assert!((r.eval(x) - (x.x - interface)).abs() < cell);
    }

    #[test]
    fn row_mask_grows_away_from_row() {
        let (w, h) = (9, 9);
        let data = (0..w * h).map(|k| k / w == 4).collect();
        let mask = Mask::new(w, h, data).unwrap();
        let r = RasterDistance::from_mask(&mask, 1.0, Point::default()).unwrap();
        let mut last = f64::NEG_INFINITY;
        for y in [6.0, 8.0, 12.0, 20.0, 50.0] {
            let d = r.eval(Point::new(4.5, y));
            assert!(d > 0.0 && d > last, "{d} at y = {y}");
            last = d;
        }
    }

    #[test]
    fn degenerate_masks_are_rejected() {
        let all_in = Mask::new(3, 3, vec![true; 9]).unwrap();
        let all_out = Mask::new(3, 3, vec![false; 9]).unwrap();
        for m in [all_in, all_out] {
            let err = RasterDistance::from_mask(&m, 1.0, Point::default()).unwrap_err();
            assert!(err.to_string().contains("degenerate mask"));
        }
    }
}
