//! ASCII field dumps for external plotting.
//!
//! ```text
//! ddm-field nx ny xmin xmax ymin ymax
//! x y u omega        (one line per node, x fastest)
//! ```
//!
//! Reals are written with 17 significant digits, so reading a dump back
//! reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{DdmError, Result};
use crate::geometry::Weight;
use crate::grid::{BoxDomain, Grid};

/// Contents of a dump file.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub grid: Grid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub omega: Vec<f64>,
}

/// Nodal values of the volume weight.
pub fn nodal_omega(grid: &Grid, weight: &dyn Weight) -> Vec<f64> {
    grid.interpolate(|p| weight.sample(p).omega)
}

pub fn write_field(out: &mut impl Write, grid: &Grid, values: &[f64], omega: &[f64]) -> Result<()> {
    let n = grid.num_nodes();
    for len in [values.len(), omega.len()] {
        if len != n {
            return Err(DdmError::Dimension { expected: n, got: len });
        }
    }
    let b = grid.domain;
    writeln!(out, "ddm-field {} {} {:.16e} {:.16e} {:.16e} {:.16e}", grid.nx, grid.ny, b.xmin, b.xmax, b.ymin, b.ymax)?;
    for k in 0..n {
        let p = grid.node(k);
        writeln!(out, "{:.16e} {:.16e} {:.16e} {:.16e}", p.x, p.y, values[k], omega[k])?;
    }
    Ok(())
}

/// Writes `values` with the nodal weight of `weight` to `path`.
pub fn dump_field(grid: &Grid, values: &[f64], weight: &dyn Weight, path: &Path) -> Result<()> {
    dump_field_with_omega(grid, values, &nodal_omega(grid, weight), path)
}

/// Same as [`dump_field`] with precomputed nodal weights.
pub fn dump_field_with_omega(grid: &Grid, values: &[f64], omega: &[f64], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_field(&mut out, grid, values, omega)?;
    out.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<FieldDump> {
    let bad = |line: usize, message: String| DdmError::Input { path: path.to_path_buf(), message: format!("line {line}: {message}") };
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.ok_or_else(|| bad(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 7 || fields[0] != "ddm-field" {
        return Err(bad(1, format!("expected `ddm-field nx ny xmin xmax ymin ymax`, got {header:?}")));
    }
    let count = |s: &str| s.parse::<usize>().map_err(|e| bad(1, format!("{s:?}: {e}")));
    let real = |line: usize, s: &str| s.parse::<f64>().map_err(|e| bad(line, format!("{s:?}: {e}")));
    let (nx, ny) = (count(fields[1])?, count(fields[2])?);
    let domain = BoxDomain::new(real(1, fields[3])?, real(1, fields[4])?, real(1, fields[5])?, real(1, fields[6])?);
    let grid = Grid::new(domain, nx, ny)?;

    let n = grid.num_nodes();
    let mut dump = FieldDump {
        grid,
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        omega: Vec::with_capacity(n),
    };
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() != 4 {
            return Err(bad(lineno, format!("expected 4 columns, got {}", vals.len())));
        }
        dump.x.push(real(lineno, vals[0])?);
        dump.y.push(real(lineno, vals[1])?);
        dump.u.push(real(lineno, vals[2])?);
        dump.omega.push(real(lineno, vals[3])?);
    }
    if dump.u.len() != n {
        return Err(bad(n + 1, format!("expected {n} data lines, got {}", dump.u.len())));
    }
    Ok(dump)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DistanceField, PhaseField, Point};

    #[test]
    fn zero_field_on_small_grid() {
        let grid = Grid::new(BoxDomain::new(0.0, 1.0, 0.0, 1.0), 2, 2).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &grid, &[0.0; 9], &[1.0; 9]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert!(lines[0].starts_with("ddm-field 2 2 "));
        for l in &lines[1..] {
            let u: f64 = l.split_whitespace().nth(2).unwrap().parse().unwrap();
            assert_eq!(u, 0.0);
        }
        // row-major, x fastest
        assert!(lines[2].starts_with("5.0000000000000000e-1 0.0000000000000000e0"));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        let grid = Grid::new(BoxDomain::new(-0.5, 0.5, -0.3, 0.7), 7, 5).unwrap();
        let u: Vec<f64> = (0..grid.num_nodes()).map(|k| (k as f64 * 0.37).sin() / 3.0 - 1e-300).collect();
        let pf = PhaseField::new(DistanceField::circle(Point::default(), 0.25).unwrap(), 0.1).unwrap();
        dump_field(&grid, &u, &pf, &path).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back.grid, grid);
        assert_eq!(back.u.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), u.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        assert_eq!(back.omega, nodal_omega(&grid, &pf));
        for k in 0..grid.num_nodes() {
            assert_eq!(Point::new(back.x[k], back.y[k]), grid.node(k));
        }
    }

    #[test]
    fn omega_is_half_on_the_boundary() {
        // node (0.25, 0) of a 4x4 grid on [-0.5, 0.5]^2 lies on the circle
        let grid = Grid::new(BoxDomain::new(-0.5, 0.5, -0.5, 0.5), 4, 4).unwrap();
        let pf = PhaseField::new(DistanceField::circle(Point::default(), 0.25).unwrap(), 0.125).unwrap();
        let omega = nodal_omega(&grid, &pf);
        assert_eq!(omega[grid.node_index(3, 2)], 0.5);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let grid = Grid::new(BoxDomain::new(0.0, 1.0, 0.0, 1.0), 2, 2).unwrap();
        assert!(write_field(&mut Vec::new(), &grid, &[0.0; 8], &[1.0; 9]).is_err());
    }
}
