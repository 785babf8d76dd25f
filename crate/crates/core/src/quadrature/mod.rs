//! Numerical evaluation of the period `Ψ_λ(e^x)`.
//!
//! The reduced integrand is integrated over the polytope
//! `{ s : max_j u_j(s) <= L }`, outside of which it is below
//! `exp(-e^L)`. Integration is nested adaptive Gauss–Kronrod, one axis at a
//! time, with the range of each inner axis cut to the slice of the polytope.

mod bessel;
mod gauss_kronrod;

pub use bessel::{bessel_k_oracle, p1_closed_form};

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::reduction::{log_reduce, ReducedIntegrand, SpectralParams};
use crate::toric_data::ToricData;
use gauss_kronrod::{integrate, Estimate, Sample};

/// Largest `N - n` handled by [`evaluate_period`].
pub const MAX_QUADRATURE_DIM: usize = 3;

/// Share of the tolerance budget handed to each inner integration.
const INNER_SHARE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub truncation_margin: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            truncation_margin: 1.0,
            max_subdivisions: 500,
        }
    }
}

impl QuadratureSettings {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(self.abs_tol) || !in_unit(self.rel_tol) {
            return Err(Error::InvalidParameter("tolerances must lie in (0, 1)".into()));
        }
        if !(self.truncation_margin > 0.0 && self.truncation_margin.is_finite()) {
            return Err(Error::InvalidParameter("truncation_margin must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    /// `L = log(log(100 / abs_tol)) + margin`, so that `exp(-e^L) < abs_tol / 100`.
    pub fn truncation_level(&self) -> f64 {
        (100.0 / self.abs_tol).ln().ln() + self.truncation_margin
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

pub fn evaluate_period(
    data: &ToricData,
    params: &SpectralParams,
    x: &[f64],
    settings: &QuadratureSettings,
) -> Result<PeriodValue> {
    let dim = data.kernel.len();
    if dim > MAX_QUADRATURE_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_QUADRATURE_DIM,
        });
    }
    let reduced = log_reduce(data, params, x)?;
    evaluate_reduced(&reduced, settings)
}

/// Evaluates `Ψ_λ(e^{m·y})`; the matrix element depends on `y` only through `x = m·y`.
pub fn evaluate_matrix_element(
    data: &ToricData,
    params: &SpectralParams,
    y: &[f64],
    settings: &QuadratureSettings,
) -> Result<PeriodValue> {
    check_len("y", data.charge.dim(), y.len())?;
    evaluate_period(data, params, &data.charge.apply(y), settings)
}

/// `jacobian × ∫ integrand(s) ds` over `R^{N-n}`.
pub fn evaluate_reduced(
    integrand: &ReducedIntegrand,
    settings: &QuadratureSettings,
) -> Result<PeriodValue> {
    settings.validate()?;
    let dim = integrand.dim();
    if dim == 0 {
        return Ok(PeriodValue {
            value: integrand.eval(&[]) * integrand.jacobian,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    if dim > MAX_QUADRATURE_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_QUADRATURE_DIM,
        });
    }

    let level = settings.truncation_level();
    let region = Region {
        normals: (0..integrand.kernel.ambient_dim())
            .map(|j| integrand.kernel.rows().iter().map(|v| v[j] as f64).collect())
            .collect(),
        bounds: integrand.u0.iter().map(|u| level - u).collect(),
    };
    let nested = Nested {
        integrand,
        region: &region,
        settings,
    };
    let mut prefix = Vec::with_capacity(dim);
    let est = nested.axis(
        &mut prefix,
        settings.abs_tol / integrand.jacobian,
        settings.rel_tol,
    );

    let value = est.value * integrand.jacobian;
    let error_estimate = (est.error + est.carried) * integrand.jacobian;
    let target = settings.abs_tol.max(settings.rel_tol * value.norm());
    if !est.converged || error_estimate > target {
        return Err(Error::NotConverged {
            estimate: error_estimate,
            target,
        });
    }
    Ok(PeriodValue {
        value,
        error_estimate,
        evaluations: est.evaluations,
    })
}

struct Nested<'a> {
    integrand: &'a ReducedIntegrand,
    region: &'a Region,
    settings: &'a QuadratureSettings,
}

impl Nested<'_> {
    /// Integrates over axis `prefix.len()` and everything after it, with the
    /// earlier coordinates fixed to `prefix`.
    fn axis(&self, prefix: &mut Vec<f64>, abs_tol: f64, rel_tol: f64) -> Estimate {
        let depth = prefix.len();
        let last = depth + 1 == self.integrand.dim();
        let Some((lo, hi)) = self.region.slice(prefix).coordinate_range() else {
            return Estimate::zero();
        };
        let width = (hi - lo).max(f64::MIN_POSITIVE);
        let inner_abs = INNER_SHARE * abs_tol / width;
        let inner_rel = INNER_SHARE * rel_tol;
        integrate(
            |t| {
                prefix.push(t);
                let sample = if last {
                    Sample::exact(self.integrand.eval(prefix))
                } else {
                    let inner = self.axis(prefix, inner_abs, inner_rel);
                    Sample {
                        value: inner.value,
                        carried: inner.error + inner.carried,
                        evaluations: inner.evaluations,
                    }
                };
                prefix.pop();
                sample
            },
            lo,
            hi,
            abs_tol,
            rel_tol,
            self.settings.max_subdivisions,
        )
    }
}

/// Polytope `{ s : normals_j · s <= bounds_j }`.
#[derive(Debug, Clone)]
struct Region {
    normals: Vec<Vec<f64>>,
    bounds: Vec<f64>,
}

impl Region {
    /// Restriction to the coordinates after `prefix`.
    fn slice(&self, prefix: &[f64]) -> Region {
        let k = prefix.len();
        Region {
            normals: self.normals.iter().map(|a| a[k..].to_vec()).collect(),
            bounds: self
                .normals
                .iter()
                .zip(&self.bounds)
                .map(|(a, b)| b - a[..k].iter().zip(prefix).map(|(x, y)| x * y).sum::<f64>())
                .collect(),
        }
    }

    fn contains(&self, s: &[f64]) -> bool {
        self.normals.iter().zip(&self.bounds).all(|(a, &b)| {
            let lhs: f64 = a.iter().zip(s).map(|(x, y)| x * y).sum();
            lhs <= b + 1e-9 * (1.0 + b.abs())
        })
    }

    /// Range of the first coordinate over the (bounded) polytope, found by
    /// enumerating its vertices. `None` when the polytope is empty.
    fn coordinate_range(&self) -> Option<(f64, f64)> {
        let dim = self.normals.first().map_or(0, Vec::len);
        let mut range: Option<(f64, f64)> = None;
        for_each_subset(self.normals.len(), dim, &mut |subset| {
            let system: Vec<Vec<f64>> = subset.iter().map(|&j| self.normals[j].clone()).collect();
            let rhs: Vec<f64> = subset.iter().map(|&j| self.bounds[j]).collect();
            if let Some(vertex) = solve_dense(system, rhs) {
                if self.contains(&vertex) {
                    let v = vertex[0];
                    range = Some(match range {
                        Some((lo, hi)) => (lo.min(v), hi.max(v)),
                        None => (v, v),
                    });
                }
            }
        });
        range
    }
}

fn for_each_subset(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn recurse(start: usize, n: usize, k: usize, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if chosen.len() == k {
            visit(chosen);
            return;
        }
        for i in start..n {
            chosen.push(i);
            recurse(i + 1, n, k, chosen, visit);
            chosen.pop();
        }
    }
    recurse(0, n, k, &mut Vec::with_capacity(k), visit);
}

/// Gaussian elimination with partial pivoting; `None` for (near) singular systems.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(p, c);
        b.swap(p, c);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            let (upper, lower) = a.split_at_mut(i);
            for (entry, p) in lower[0][c..n].iter_mut().zip(&upper[c][c..n]) {
                *entry -= f * p;
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - tail) / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> QuadratureSettings {
        QuadratureSettings::with_tolerance(1e-12)
    }

    #[test]
    fn projective_line_at_origin() {
        let data = ToricData::projective_space(1).unwrap();
        let v = evaluate_period(&data, &SpectralParams::zero(2), &[0.0], &tight()).unwrap();
        assert!((v.value.re - 0.227_787_745_499_066_9).abs() < 1e-11);
        assert!(v.value.im.abs() < 1e-14);
        assert!(v.error_estimate >= 0.0);
    }

    #[test]
    fn zero_dimensional_case_is_a_point_evaluation() {
        let data = ToricData::new(&[vec![1]]).unwrap();
        let params = SpectralParams::with_lambda(vec![0.7]).unwrap();
        let v = evaluate_period(&data, &params, &[0.3], &tight()).unwrap();
        let expected = Complex64::new(-(0.3f64.exp()), 0.21).exp();
        assert!((v.value - expected).norm() < 1e-15);
        assert_eq!(v.error_estimate, 0.0);
        assert_eq!(v.evaluations, 1);
    }

    #[test]
    fn oscillation_lowers_the_modulus() {
        let data = ToricData::projective_space(1).unwrap();
        let base = evaluate_period(&data, &SpectralParams::zero(2), &[0.4], &tight()).unwrap();
        let params = SpectralParams::with_lambda(vec![1.2, -0.4]).unwrap();
        let v = evaluate_period(&data, &params, &[0.4], &tight()).unwrap();
        assert!(v.value.norm() <= base.value.norm());
    }

    #[test]
    fn matrix_element_depends_on_m_times_y() {
        let data = ToricData::projective_space(1).unwrap();
        let params = SpectralParams::with_lambda(vec![0.3, -0.1]).unwrap();
        let origin = evaluate_period(&data, &params, &[0.0], &tight()).unwrap();
        for a in [-1.0, 0.5, 2.0] {
            let v = evaluate_matrix_element(&data, &params, &[a, -a], &tight()).unwrap();
            assert!((v.value - origin.value).norm() <= 2.0 * (v.error_estimate + origin.error_estimate));
        }
        let zero = evaluate_matrix_element(&data, &params, &[0.0, 0.0], &tight()).unwrap();
        assert_eq!(zero.value, origin.value);
    }

    #[test]
    fn region_range_of_simplex() {
        // s₁ <= 1, s₂ <= 1, -s₁ - s₂ <= 1: vertices (1,1), (1,-2), (-2,1)
        let region = Region {
            normals: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            bounds: vec![1.0, 1.0, 1.0],
        };
        assert_eq!(region.coordinate_range(), Some((-2.0, 1.0)));
        assert_eq!(region.slice(&[0.5]).coordinate_range(), Some((-1.5, 1.0)));
        assert_eq!(region.slice(&[3.0]).coordinate_range(), None);
    }

    #[test]
    fn rejects_large_kernels_and_bad_settings() {
        let data = ToricData::projective_space(4).unwrap();
        assert!(matches!(
            evaluate_period(&data, &SpectralParams::zero(5), &[0.0], &tight()),
            Err(Error::DimensionTooLarge { dim: 4, max: 3 })
        ));
        let p1 = ToricData::projective_space(1).unwrap();
        let bad = QuadratureSettings {
            abs_tol: 0.0,
            ..QuadratureSettings::default()
        };
        assert!(evaluate_period(&p1, &SpectralParams::zero(2), &[0.0], &bad).is_err());
    }

    #[test]
    fn subdivision_budget_is_enforced() {
        let data = ToricData::projective_space(1).unwrap();
        let starved = QuadratureSettings {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            truncation_margin: 1.0,
            max_subdivisions: 1,
        };
        let params = SpectralParams::with_lambda(vec![8.0, -8.0]).unwrap();
        assert!(matches!(
            evaluate_period(&data, &params, &[0.0], &starved),
            Err(Error::NotConverged { .. })
        ));
    }
}
