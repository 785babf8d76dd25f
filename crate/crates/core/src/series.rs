//! Formal solutions `Σ_d a_d e^{d·x}` of the x-space system.
//!
//! On `e^{d·x}` the polynomial part of the α-th operator acts by the scalar
//! `P_α(d)` and the shift term maps `e^{d·x}` to `e^{(d+e_α)·x}`, so
//! coefficients obey `P_α(d) a_d = a_{d-e_α}`.

use num::complex::Complex64;
use num::Zero;

use crate::error::{check_len, Error, Result};
use crate::operator_algebra::XSpaceOperator;
use crate::reduction::SpectralParams;
use crate::toric_data::{ChargeMatrix, ToricData};

const RESONANCE_FLOOR: f64 = 1e-14;

/// Coefficients `a_d` on the box `0 <= d <= dmax`, normalized by `a_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    dmax: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl SeriesCoefficients {
    pub fn dmax(&self) -> &[usize] {
        &self.dmax
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn offset(&self, d: &[usize]) -> usize {
        d.iter()
            .zip(&self.dmax)
            .fold(0, |acc, (&di, &max)| acc * (max + 1) + di)
    }

    /// `a_d`, or `None` outside the box.
    pub fn get(&self, d: &[usize]) -> Option<Complex64> {
        if d.len() != self.dmax.len() || d.iter().zip(&self.dmax).any(|(a, b)| a > b) {
            return None;
        }
        Some(self.coeffs[self.offset(d)])
    }

    /// Multi-indices in lexicographic order with their coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        box_indices(&self.dmax).zip(self.coeffs.iter().copied())
    }

    fn on_outer_face(&self, d: &[usize]) -> bool {
        d.iter().zip(&self.dmax).any(|(a, b)| a == b)
    }
}

fn box_indices(dmax: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dmax.iter().map(|m| m + 1).product();
    (0..total).map(move |mut code| {
        let mut d = vec![0; dmax.len()];
        for (slot, &max) in d.iter_mut().zip(dmax).rev() {
            *slot = code % (max + 1);
            code /= max + 1;
        }
        d
    })
}

/// `P_α(d) = Π_j Π_{k<m_j^α} (iλ_j + k - μ_j(d))` with `μ_j(d) = Σ_β m_j^β d_β`.
pub fn step_factor(m: &ChargeMatrix, params: &SpectralParams, alpha: usize, d: &[usize]) -> Complex64 {
    (0..m.dim())
        .map(|j| {
            let mu: i64 = (0..m.rank()).map(|b| m.entry(b, j) * d[b] as i64).sum();
            (0..m.entry(alpha, j))
                .map(|k| Complex64::new((k - mu) as f64, params.lambda[j]))
                .product::<Complex64>()
        })
        .product()
}

/// Which admissible step reaches `d` from the box already filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepOrder {
    /// Step along the first α with `d_α >= 1`.
    #[default]
    FirstAxis,
    /// Step along the last α with `d_α >= 1`.
    LastAxis,
}

pub fn build_series(data: &ToricData, params: &SpectralParams, dmax: &[usize]) -> Result<SeriesCoefficients> {
    build_series_with(&data.charge, params, dmax, StepOrder::FirstAxis)
}

pub fn build_series_with(
    m: &ChargeMatrix,
    params: &SpectralParams,
    dmax: &[usize],
    order: StepOrder,
) -> Result<SeriesCoefficients> {
    check_len("dmax", m.rank(), dmax.len())?;
    check_len("lambda", m.dim(), params.lambda.len())?;
    let mut series = SeriesCoefficients {
        dmax: dmax.to_vec(),
        coeffs: Vec::new(),
    };
    // Lexicographic order visits d - e_α before d.
    for d in box_indices(dmax) {
        let mut steps = (0..d.len()).filter(|&a| d[a] > 0);
        let alpha = match order {
            StepOrder::FirstAxis => steps.next(),
            StepOrder::LastAxis => steps.next_back(),
        };
        let value = match alpha {
            None => Complex64::new(1.0, 0.0),
            Some(alpha) => {
                let factor = step_factor(m, params, alpha, &d);
                if factor.norm() < RESONANCE_FLOOR {
                    return Err(Error::ResonantParameters {
                        alpha,
                        multi_index: d,
                        modulus: factor.norm(),
                    });
                }
                let mut prev = d.clone();
                prev[alpha] -= 1;
                series.coeffs[series.offset(&prev)] / factor
            }
        };
        series.coeffs.push(value);
    }
    Ok(series)
}

/// Largest relative violation of `P_α(d) a_d = a_{d-e_α}` over the box and all α.
pub fn recursion_defect(series: &SeriesCoefficients, m: &ChargeMatrix, params: &SpectralParams) -> f64 {
    let mut worst = 0.0f64;
    for (d, a) in series.iter() {
        for alpha in (0..d.len()).filter(|&a| d[a] > 0) {
            let mut prev = d.clone();
            prev[alpha] -= 1;
            let target = series.get(&prev).expect("inside box");
            let lhs = step_factor(m, params, alpha, &d) * a;
            worst = worst.max((lhs - target).norm() / target.norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// `Σ |a_d e^{d·x}|` over the outer faces of the truncation box.
    pub tail: f64,
}

/// `Σ_{0 <= d <= dmax} a_d e^{d·x}`.
pub fn series_eval(series: &SeriesCoefficients, x: &[f64]) -> Result<SeriesValue> {
    check_len("x", series.dmax.len(), x.len())?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for (d, a) in series.iter() {
        let term = a * exp_dot(&d, x);
        value += term;
        if series.on_outer_face(&d) {
            tail += term.norm();
        }
    }
    Ok(SeriesValue { value, tail })
}

fn exp_dot(d: &[usize], x: &[f64]) -> f64 {
    d.iter().zip(x).map(|(&di, xi)| di as f64 * xi).sum::<f64>().exp()
}

/// Applies `op` termwise to the truncated series at `x`:
/// `Σ_d a_d [op.symbol(d) e^{d·x} - e^{(d+e_α)·x}]`.
///
/// Terms are collected per exponent before summing, so interior
/// cancellation happens coefficient by coefficient and only the recursion
/// defect and the outer shell `d_α = dmax_α + 1` survive.
pub fn series_residual(series: &SeriesCoefficients, op: &XSpaceOperator, x: &[f64]) -> Result<Complex64> {
    check_len("x", series.dmax.len(), x.len())?;
    check_len("operator variables", series.dmax.len(), op.variables)?;
    let alpha = op.alpha;
    let mut grown = series.dmax.clone();
    grown[alpha] += 1;
    Ok(box_indices(&grown)
        .map(|d| {
            let own = series.get(&d).map_or(Complex64::zero(), |a| {
                let df: Vec<f64> = d.iter().map(|&v| v as f64).collect();
                a * op.symbol(&df)
            });
            let shifted = if d[alpha] == 0 {
                Complex64::zero()
            } else {
                let mut prev = d.clone();
                prev[alpha] -= 1;
                series.get(&prev).unwrap_or_else(Complex64::zero)
            };
            (own - shifted) * exp_dot(&d, x)
        })
        .sum())
}
