use crate::error::{Error, Result};

use super::{Grid2D, Point};

/// Real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField2D {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid2D, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.node_at(k))).collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: Grid2D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Node-wise map; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self::from_raw(self.grid, values)
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &ScalarField2D, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(Self::from_raw(self.grid, values))
    }

    pub fn sub(&self, other: &ScalarField2D) -> Result<Self> {
        self.axpby(1.0, other, -1.0)
    }

    pub fn add(&self, other: &ScalarField2D) -> Result<Self> {
        self.axpby(1.0, other, 1.0)
    }

    pub fn check_same_grid(&self, other: &ScalarField2D) -> Result<()> {
        if self.grid.same_extent(&other.grid) {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(
                "fields live on different grids".into(),
            ))
        }
    }

    /// Discrete L² inner product with cell-area weight.
    pub fn dot(&self, other: &ScalarField2D) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        s * self.grid.cell_area()
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Two components per node.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2D {
    grid: Grid2D,
    vx: Vec<f64>,
    vy: Vec<f64>,
}

impl VectorField2D {
    pub fn new(grid: Grid2D, vx: Vec<f64>, vy: Vec<f64>) -> Result<Self> {
        for v in [&vx, &vy] {
            if v.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
            if let Some(k) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(k));
            }
        }
        Ok(Self { grid, vx, vy })
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point) -> [f64; 2]) -> Self {
        let (vx, vy) = (0..grid.len()).map(|k| f(grid.node_at(k))).map(|v| (v[0], v[1])).unzip();
        Self { grid, vx, vy }
    }

    pub(crate) fn from_raw(grid: Grid2D, vx: Vec<f64>, vy: Vec<f64>) -> Self {
        Self { grid, vx, vy }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn vx(&self) -> &[f64] {
        &self.vx
    }

    pub fn vy(&self) -> &[f64] {
        &self.vy
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 2] {
        [self.vx[idx], self.vy[idx]]
    }

    pub fn magnitude(&self) -> ScalarField2D {
        let values = self
            .vx
            .iter()
            .zip(&self.vy)
            .map(|(a, b)| a.hypot(*b))
            .collect();
        ScalarField2D::from_raw(self.grid, values)
    }

    pub fn components(&self) -> (ScalarField2D, ScalarField2D) {
        (
            ScalarField2D::from_raw(self.grid, self.vx.clone()),
            ScalarField2D::from_raw(self.grid, self.vy.clone()),
        )
    }
}
