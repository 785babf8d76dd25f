//! Resolution of the delta constraints in logarithmic coordinates.
//!
//! With `u_j = log t_j` the measure `d^×t` becomes `du`, each constraint
//! reads `Σ_j m_j^α u_j = x^α`, and the constraint set is the affine space
//! `u(s) = u0 + Vᵀ s`. Resolving `δ(e^z - 1) = δ(z)` contributes the
//! Gram-determinant ratio `sqrt(det(V Vᵀ) / det(m mᵀ))`.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::exact;
use crate::toric_data::{ChargeMatrix, KernelBasis, ToricData};

/// Spectral parameters `λ ∈ R^N` and the central value `c > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub lambda: Vec<f64>,
    #[serde(default = "default_central")]
    pub c: f64,
}

fn default_central() -> f64 {
    1.0
}

impl SpectralParams {
    pub fn new(lambda: Vec<f64>, c: f64) -> Result<Self> {
        if lambda.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("lambda entries must be finite".into()));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("central value c = {c} must be positive")));
        }
        Ok(Self { lambda, c })
    }

    /// `c = 1`.
    pub fn with_lambda(lambda: Vec<f64>) -> Result<Self> {
        Self::new(lambda, 1.0)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            lambda: vec![0.0; dim],
            c: 1.0,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            lambda: self.lambda.iter().map(|v| -v).collect(),
            c: self.c,
        }
    }
}

/// The integrand `s ↦ Π_j exp(iλ_j u_j(s) - e^{u_j(s)})` on `R^{N-n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedIntegrand {
    pub u0: Vec<f64>,
    pub kernel: KernelBasis,
    pub jacobian: f64,
    pub params: SpectralParams,
}

impl ReducedIntegrand {
    pub fn dim(&self) -> usize {
        self.kernel.len()
    }

    /// Replaces the base point by another solution `u0 + Vᵀ w` of `m·u = x`.
    pub fn shifted_base(&self, w: &[f64]) -> Self {
        let mut shifted = self.clone();
        shifted.u0 = self.point(w);
        shifted
    }

    /// `u(s) = u0 + Vᵀ s`
    pub fn point(&self, s: &[f64]) -> Vec<f64> {
        let mut u = self.u0.clone();
        for (v, &coef) in self.kernel.rows().iter().zip(s) {
            for (uj, &vj) in u.iter_mut().zip(v) {
                *uj += coef * vj as f64;
            }
        }
        u
    }

    pub fn eval(&self, s: &[f64]) -> Complex64 {
        let u = self.point(s);
        let phase: f64 = self.params.lambda.iter().zip(&u).map(|(l, uj)| l * uj).sum();
        let decay: f64 = u.iter().map(|uj| uj.exp()).sum();
        Complex64::from_polar((-decay).exp(), phase)
    }

    /// `|integrand(s)| = Π_j exp(-e^{u_j(s)})`
    pub fn modulus(&self, s: &[f64]) -> f64 {
        (-self.point(s).iter().map(|uj| uj.exp()).sum::<f64>()).exp()
    }
}

/// Minimum-norm solution `u0 = mᵀ (m mᵀ)^{-1} x` of `m · u = x`.
pub fn particular_solution(m: &ChargeMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_len("x", m.rank(), x.len())?;
    let inverse = exact::inverse(&exact::gram(m.rows())).ok_or(Error::SingularGram)?;
    let w: Vec<f64> = inverse
        .iter()
        .map(|row| row.iter().zip(x).map(|(g, xi)| exact::to_f64(g) * xi).sum())
        .collect();
    Ok((0..m.dim())
        .map(|j| (0..m.rank()).map(|a| m.entry(a, j) as f64 * w[a]).sum())
        .collect())
}

/// `sqrt(det(V Vᵀ) / det(m mᵀ))`, evaluated exactly before the square root.
pub fn jacobian_factor(m: &ChargeMatrix, kernel: &KernelBasis) -> f64 {
    let kernel_volume = exact::determinant(&exact::gram(kernel.rows()));
    let charge_volume = exact::determinant(&exact::gram(m.rows()));
    exact::to_f64(&(kernel_volume / charge_volume)).sqrt()
}

pub fn log_reduce(data: &ToricData, params: &SpectralParams, x: &[f64]) -> Result<ReducedIntegrand> {
    if !data.integrable {
        return Err(Error::NotIntegrable);
    }
    check_len("lambda", data.charge.dim(), params.lambda.len())?;
    let u0 = particular_solution(&data.charge, x)?;
    Ok(ReducedIntegrand {
        u0,
        kernel: data.kernel.clone(),
        jacobian: data.jacobian,
        params: params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric_data::validate_charge_matrix;

    fn data(raw: &[Vec<i64>]) -> ToricData {
        ToricData::new(raw).unwrap()
    }

    #[test]
    fn particular_solution_examples() {
        let p1 = validate_charge_matrix(&[vec![1, 1]]).unwrap();
        assert_eq!(particular_solution(&p1, &[0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(particular_solution(&p1, &[2.0]).unwrap(), vec![1.0, 1.0]);
        let p2 = validate_charge_matrix(&[vec![1, 1, 1]]).unwrap();
        let u = particular_solution(&p2, &[3.0]).unwrap();
        for v in u {
            assert!((v - 1.0).abs() < 1e-15);
        }
        assert!(matches!(
            particular_solution(&p2, &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn particular_solution_satisfies_constraints() {
        let m = validate_charge_matrix(&[vec![1, 1, 1, 0], vec![0, 0, 1, 1]]).unwrap();
        let x = [0.7, -1.3];
        let u = particular_solution(&m, &x).unwrap();
        for (mx, xi) in m.apply(&u).iter().zip(&x) {
            assert!((mx - xi).abs() <= 1e-12 * (1.0 + xi.abs()));
        }
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(data(&[vec![1, 1]]).jacobian, 1.0);
        assert!((data(&[vec![1, 1, 1]]).jacobian - 1.0).abs() < 1e-15);
        assert!((data(&[vec![1, 2]]).jacobian - 1.0).abs() < 1e-15);
        let point = data(&[vec![1]]);
        assert!(point.kernel.is_empty());
        assert_eq!(point.jacobian, 1.0);
    }

    #[test]
    fn integrand_at_origin_of_projective_line() {
        let reduced = log_reduce(&data(&[vec![1, 1]]), &SpectralParams::zero(2), &[0.0]).unwrap();
        let value = reduced.eval(&[0.0]);
        assert!((value.re - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(value.im, 0.0);
    }

    #[test]
    fn modulus_bound_from_largest_coordinate() {
        let reduced = log_reduce(
            &data(&[vec![1, 1, 1]]),
            &SpectralParams::with_lambda(vec![0.4, -1.0, 2.5]).unwrap(),
            &[0.3],
        )
        .unwrap();
        for s in [[0.0, 0.0], [1.5, -0.5], [-3.0, 2.0], [4.0, 4.0]] {
            let value = reduced.eval(&s);
            let largest = reduced.point(&s).into_iter().fold(f64::NEG_INFINITY, f64::max);
            assert!(value.norm() <= (-largest.exp()).exp() * (1.0 + 1e-14));
            assert!((value.norm() - reduced.modulus(&s)).abs() < 1e-15);
        }
    }

    #[test]
    fn non_integrable_data_is_refused() {
        let d = data(&[vec![1, 0]]);
        assert!(!d.integrable);
        assert_eq!(log_reduce(&d, &SpectralParams::zero(2), &[0.0]), Err(Error::NotIntegrable));
    }

    #[test]
    fn spectral_params_validation() {
        assert!(SpectralParams::new(vec![f64::NAN], 1.0).is_err());
        assert!(SpectralParams::new(vec![0.0], 0.0).is_err());
        assert!(SpectralParams::new(vec![0.0], 2.0).is_ok());
    }
}
