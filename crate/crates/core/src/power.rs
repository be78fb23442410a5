//! Exact averages of pure powers `x^b` on subintervals of `(0,1)`.

use crate::dyadic::{DyadicCube, Grid};
use crate::error::{Error, Result};
use crate::exponent::Recip;

/// The function `x ↦ x^b` on `(0,1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerCellWeight {
    pub b: f64,
}

/// `∫_{x0}^{x1} x^{c-1} dx = (x1^c - x0^c)/c`, computed without cancellation for small `c`.
fn integral_with_exponent(c: f64, x0: f64, x1: f64) -> Result<f64> {
    if c <= 0.0 {
        return Err(Error::NonIntegrablePower);
    }
    if x0 <= 0.0 {
        return Ok(x1.powf(c) / c);
    }
    // x1^c (1 - (x0/x1)^c) / c
    let l = (x0 / x1).ln();
    Ok(-x1.powf(c) * (c * l).exp_m1() / c)
}

impl PowerCellWeight {
    pub fn new(b: f64) -> Self {
        PowerCellWeight { b }
    }

    pub fn pow(self, e: f64) -> Self {
        PowerCellWeight { b: self.b * e }
    }

    /// `∫_{x0}^{x1} x^{b t} dx`.
    pub fn integral(&self, t: f64, x0: f64, x1: f64) -> Result<f64> {
        integral_with_exponent(self.b * t + 1.0, x0, x1)
    }

    /// `⟨x^b⟩_{t,[x0,x1)}` with `1/t = rho`; `rho = 0` gives the supremum.
    pub fn average(&self, rho: Recip, x0: f64, x1: f64) -> Result<f64> {
        if rho.is_inf() {
            return Ok(if self.b >= 0.0 {
                x1.powf(self.b)
            } else if x0 > 0.0 {
                x0.powf(self.b)
            } else {
                f64::INFINITY
            });
        }
        let t = 1.0 / rho.get();
        let mass = self.integral(t, x0, x1)?;
        Ok((mass / (x1 - x0)).powf(rho.get()))
    }

    /// Average over a cube of `grid`, reading cells as `[c/N, (c+1)/N)`.
    pub fn cube_average(&self, rho: Recip, grid: &Grid, q: &DyadicCube) -> Result<f64> {
        let n = grid.cells() as f64;
        let r = grid.cell_range(q);
        self.average(rho, r.start as f64 / n, r.end as f64 / n)
    }

    /// The cell values `⟨x^b⟩_{t,cell}` at resolution `level`.
    pub fn cell_values(&self, rho: Recip, level: u32) -> Result<Vec<f64>> {
        let n = (1usize << level) as f64;
        (0..1usize << level).map(|c| self.average(rho, c as f64 / n, (c + 1) as f64 / n)).collect()
    }
}
