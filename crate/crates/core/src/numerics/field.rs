use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::stencil::Stencil;

/// A uniform grid `x_i = x0 + i h`, `i = 0..nx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
}

impl Default for Grid {
    /// `[-15, 15]` with `h = 0.0375`; finer spacing only raises the rounding floor of `u_5`.
    fn default() -> Self {
        Grid { x0: -15.0, x1: 15.0, nx: 801 }
    }
}

impl Grid {
    pub fn new(x0: f64, x1: f64, nx: usize) -> Result<Self> {
        if !(x1 > x0) || !x0.is_finite() || !x1.is_finite() {
            return Err(Error::InvalidParams(format!("grid bounds [{x0}, {x1}] are not increasing")));
        }
        if nx < 2 {
            return Err(Error::GridTooSmall { points: nx, needed: 2 });
        }
        Ok(Grid { x0, x1, nx })
    }

    /// Grid on `[x0, x1]` with spacing as close to `h` as the endpoints allow.
    pub fn with_spacing(x0: f64, x1: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParams(format!("spacing must be positive, got {h}")));
        }
        Self::new(x0, x1, ((x1 - x0) / h).round() as usize + 1)
    }

    pub fn h(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(|i| self.x(i))
    }

    /// The sub-grid that drops `r` points at each end.
    pub fn interior(&self, r: usize) -> Result<Grid> {
        let needed = 2 * r + 1;
        if self.nx < needed {
            return Err(Error::GridTooSmall { points: self.nx, needed });
        }
        Ok(Grid { x0: self.x(r), x1: self.x(self.nx - 1 - r), nx: self.nx - 2 * r })
    }
}

/// Samples of `u: R -> R^N` on a grid, one row per point.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionField {
    pub grid: Grid,
    pub samples: DMatrix<f64>,
    pub provenance: String,
}

impl SolutionField {
    /// Samples `f(x)` in parallel over the grid points.
    pub fn sample<F>(grid: Grid, dim: usize, provenance: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<DVector<f64>> + Sync,
    {
        let rows: Vec<DVector<f64>> = (0..grid.nx)
            .into_par_iter()
            .map(|i| f(grid.x(i)))
            .collect::<Result<_>>()?;
        let samples = DMatrix::from_fn(grid.nx, dim, |i, j| rows[i][j]);
        Ok(SolutionField { grid, samples, provenance: provenance.into() })
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.samples.row(i).transpose()
    }

    /// The same field restricted to the interior sub-grid dropping `r` points per side.
    pub fn interior(&self, r: usize) -> Result<SolutionField> {
        let grid = self.grid.interior(r)?;
        Ok(SolutionField {
            grid,
            samples: self.samples.rows(r, grid.nx).into_owned(),
            provenance: self.provenance.clone(),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }
}

/// `d^order u/dx^order` by a centered stencil of the given accuracy, on interior points only.
pub fn fd_derivative(field: &SolutionField, order: u32, accuracy: u32) -> Result<SolutionField> {
    let st = Stencil::central(order, accuracy);
    let grid = field.grid.interior(st.radius)?;
    let h = field.grid.h();
    let n = field.dim();
    let samples = DMatrix::from_fn(grid.nx, n, |i, j| {
        st.apply(|k| field.samples[(k, j)], i + st.radius, h)
    });
    Ok(SolutionField {
        grid,
        samples,
        provenance: format!("d^{order}/dx^{order} of {}", field.provenance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(grid: Grid) -> SolutionField {
        SolutionField::sample(grid, 1, "sin", |x| Ok(DVector::from_element(1, x.sin()))).unwrap()
    }

    #[test]
    fn derivative_of_sine_is_fourth_order() {
        let err = |nx| {
            let g = Grid::new(0.0, 3.0, nx).unwrap();
            let d = fd_derivative(&sine(g), 1, 4).unwrap();
            (0..d.grid.nx)
                .map(|i| (d.samples[(i, 0)] - d.grid.x(i).cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(61), err(121));
        let slope = (e1 / e2).log2();
        assert!((slope - 4.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let g = Grid::new(-1.0, 1.0, 41).unwrap();
        let f = SolutionField::sample(g, 2, "const", |_| Ok(DVector::from_vec(vec![3.0, -2.0]))).unwrap();
        for order in 1..=5 {
            let d = fd_derivative(&f, order, 4).unwrap();
            assert!(d.samples.iter().all(|v| *v == 0.0), "order {order}");
        }
    }

    #[test]
    fn interior_excludes_boundary() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let d = fd_derivative(&sine(g), 3, 4).unwrap();
        assert_eq!(d.grid.nx, 11 - 6);
        assert!((d.grid.x0 - 0.3).abs() < 1e-15);
        assert!(matches!(fd_derivative(&sine(Grid::new(0.0, 1.0, 6).unwrap()), 3, 4), Err(Error::GridTooSmall { .. })));
    }
}
