//! Finite-difference residuals of the x-space system on sampled periods.

use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::exact;
use crate::operator_algebra::{gkz_operator, XSpaceOperator};
use crate::quadrature::{evaluate_period, QuadratureSettings};
use crate::reduction::SpectralParams;
use crate::toric_data::ToricData;

/// Uniform grid `min ..= max` with spacing `step` on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub step: f64,
}

impl GridSpec {
    pub fn point(x: Vec<f64>, step: f64) -> Self {
        Self {
            min: x.clone(),
            max: x,
            step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_len("grid max", self.min.len(), self.max.len())?;
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter("grid step must be positive".into()));
        }
        if self.min.iter().zip(&self.max).any(|(a, b)| a > b || a.is_nan() || b.is_nan()) {
            return Err(Error::InvalidParameter("grid min must not exceed max".into()));
        }
        Ok(())
    }

    /// Points per axis, `round((max - min) / step) + 1`.
    pub fn shape(&self) -> Vec<usize> {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| ((b - a) / self.step).round() as usize + 1)
            .collect()
    }

    /// Grid points in row-major order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let shape = self.shape();
        multi_indices(&shape)
            .map(|idx| {
                idx.iter()
                    .zip(&self.min)
                    .map(|(&i, &a)| a + i as f64 * self.step)
                    .collect()
            })
            .collect()
    }
}

fn multi_indices(shape: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = shape.iter().product();
    (0..total).map(move |mut code| {
        let mut idx = vec![0; shape.len()];
        for (slot, &len) in idx.iter_mut().zip(shape).rev() {
            *slot = code % len;
            code /= len;
        }
        idx
    })
}

/// Function values on a uniform grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    pub origin: Vec<f64>,
    pub step: f64,
    pub shape: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl SampledGrid {
    pub fn from_fn(
        origin: Vec<f64>,
        step: f64,
        shape: Vec<usize>,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Self {
        let values = multi_indices(&shape)
            .map(|idx| f(&Self::coordinates(&origin, step, &idx)))
            .collect();
        Self {
            origin,
            step,
            shape,
            values,
        }
    }

    fn coordinates(origin: &[f64], step: f64, index: &[usize]) -> Vec<f64> {
        index.iter().zip(origin).map(|(&i, &o)| o + i as f64 * step).collect()
    }

    pub fn point(&self, index: &[usize]) -> Vec<f64> {
        Self::coordinates(&self.origin, self.step, index)
    }

    fn value_at(&self, index: &[isize]) -> Option<Complex64> {
        let mut offset = 0usize;
        for (&i, &len) in index.iter().zip(&self.shape) {
            if i < 0 || i as usize >= len {
                return None;
            }
            offset = offset * len + i as usize;
        }
        Some(self.values[offset])
    }
}

/// Central-difference weights for the `order`-th derivative on offsets
/// `-p..=p`, `p = ceil(order / 2)`, second-order accurate. Multiply by
/// `h^{-order}`.
pub fn central_weights(order: u32) -> Vec<f64> {
    let p = order.div_ceil(2) as i64;
    let offsets: Vec<i64> = (-p..=p).collect();
    let size = offsets.len();
    // Moment conditions Σ_o w_o o^r = order! δ_{r,order}, r = 0..size.
    let system: Vec<Vec<_>> = (0..size as u32)
        .map(|r| offsets.iter().map(|&o| exact::rational(o.pow(r))).collect())
        .collect();
    let factorial: i64 = (1..=order as i64).product();
    let rhs: Vec<_> = (0..size as u32)
        .map(|r| exact::rational(if r == order { factorial } else { 0 }))
        .collect();
    exact::solve(&system, &rhs)
        .expect("Vandermonde system on distinct nodes")
        .iter()
        .map(exact::to_f64)
        .collect()
}

/// One term `c_β D^β f(x0)` per derivative, plus `-e^{x0^α} f(x0)`.
fn fd_terms(op: &XSpaceOperator, f: &SampledGrid, index: &[usize]) -> Result<Vec<Complex64>> {
    check_len("grid dimension", op.variables, f.shape.len())?;
    check_len("grid index", op.variables, index.len())?;
    let out_of_range = || Error::StencilOutOfRange {
        index: index.to_vec(),
    };
    let h = f.step;
    let center: Vec<isize> = index.iter().map(|&i| i as isize).collect();
    let mut terms = Vec::with_capacity(op.poly_part.len() + 1);
    for (beta, coef) in &op.poly_part {
        let stencils: Vec<Vec<f64>> = beta.iter().map(|&b| central_weights(b)).collect();
        let shape: Vec<usize> = stencils.iter().map(Vec::len).collect();
        let mut derivative = Complex64::new(0.0, 0.0);
        for choice in multi_indices(&shape) {
            let mut weight = 1.0;
            let mut at = center.clone();
            for (axis, &k) in choice.iter().enumerate() {
                let half = (stencils[axis].len() / 2) as isize;
                weight *= stencils[axis][k];
                at[axis] += k as isize - half;
            }
            if weight != 0.0 {
                derivative += f.value_at(&at).ok_or_else(out_of_range)? * weight;
            }
        }
        let order: i32 = beta.iter().sum::<u32>() as i32;
        terms.push(coef * derivative / h.powi(order));
    }
    let f0 = f.value_at(&center).ok_or_else(out_of_range)?;
    let x0 = f.point(index);
    terms.push(-f0 * x0[op.alpha].exp());
    Ok(terms)
}

/// `Σ_β c_β D_h^β f(x0) - e^{x0^α} f(x0)` with second-order central differences.
pub fn fd_apply(op: &XSpaceOperator, f: &SampledGrid, index: &[usize]) -> Result<Complex64> {
    Ok(fd_terms(op, f, index)?.into_iter().sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub x0: Vec<f64>,
    /// Zero-based operator index.
    pub alpha: usize,
    pub h: f64,
    pub residual: Complex64,
    /// Sum of the magnitudes of all operator terms at `x0`.
    pub normalizer: f64,
    pub normalized_residual: f64,
}

impl ResidualReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.normalized_residual <= tolerance
    }
}

pub fn residual_report(op: &XSpaceOperator, f: &SampledGrid, index: &[usize]) -> Result<ResidualReport> {
    let terms = fd_terms(op, f, index)?;
    let residual: Complex64 = terms.iter().sum();
    let normalizer: f64 = terms.iter().map(|t| t.norm()).sum();
    let normalized_residual = if normalizer > 0.0 {
        residual.norm() / normalizer
    } else {
        0.0
    };
    Ok(ResidualReport {
        x0: f.point(index),
        alpha: op.alpha,
        h: f.step,
        residual,
        normalizer,
        normalized_residual,
    })
}

/// Samples `Ψ` by quadrature on `grid` (padded by the stencil half-width)
/// and reports the residual of every α-operator at every grid point.
pub fn verify_system(
    data: &ToricData,
    params: &SpectralParams,
    grid: &GridSpec,
    settings: &QuadratureSettings,
) -> Result<Vec<ResidualReport>> {
    grid.validate()?;
    let n = data.charge.rank();
    check_len("grid min", n, grid.min.len())?;
    let ops: Vec<XSpaceOperator> = (0..n)
        .map(|alpha| gkz_operator(&data.charge, params, alpha))
        .collect::<Result<_>>()?;
    let pad = ops
        .iter()
        .flat_map(|op| op.poly_part.keys().flatten())
        .map(|&b| b.div_ceil(2) as usize)
        .max()
        .unwrap_or(0);

    let inner_shape = grid.shape();
    let shape: Vec<usize> = inner_shape.iter().map(|s| s + 2 * pad).collect();
    let origin: Vec<f64> = grid.min.iter().map(|a| a - pad as f64 * grid.step).collect();
    let indices: Vec<Vec<usize>> = multi_indices(&shape).collect();
    let values = indices
        .par_iter()
        .map(|idx| {
            let x = SampledGrid::coordinates(&origin, grid.step, idx);
            evaluate_period(data, params, &x, settings).map(|p| p.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let sampled = SampledGrid {
        origin,
        step: grid.step,
        shape,
        values,
    };

    let mut reports = Vec::new();
    for inner in multi_indices(&inner_shape) {
        let index: Vec<usize> = inner.iter().map(|i| i + pad).collect();
        for op in &ops {
            reports.push(residual_report(op, &sampled, &index)?);
        }
    }
    Ok(reports)
}

/// Largest normalized residual over `grid` for each step in `steps`, and the
/// observed orders `log(r_i / r_{i+1}) / log(h_i / h_{i+1})`.
pub fn convergence_orders(
    data: &ToricData,
    params: &SpectralParams,
    grid: &GridSpec,
    steps: &[f64],
    settings: &QuadratureSettings,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let worst: Vec<f64> = steps
        .iter()
        .map(|&step| {
            let g = GridSpec { step, ..grid.clone() };
            let reports = verify_system(data, params, &g, settings)?;
            Ok(reports.iter().map(|r| r.normalized_residual).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let orders = worst
        .windows(2)
        .zip(steps.windows(2))
        .map(|(r, h)| (r[0] / r[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok((worst, orders))
}
