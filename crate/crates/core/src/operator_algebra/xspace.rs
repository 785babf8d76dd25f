//! Constant-coefficient operators in `∂_x` (and `∂_y`) emitted from the
//! charge matrix, together with their JSON wire format.

use std::collections::BTreeMap;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduction::SpectralParams;
use crate::toric_data::ChargeMatrix;

/// Polynomial in commuting derivatives: multi-index → coefficient.
pub type DerivativePolynomial = BTreeMap<Vec<u32>, Complex64>;

fn poly_mul(a: &DerivativePolynomial, b: &DerivativePolynomial) -> DerivativePolynomial {
    let mut out = DerivativePolynomial::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    out
}

/// `Π_j Π_{k<mult_j} (iλ_j + k - L_j)` where `L_j` is the linear form `linear[j]`
/// in `vars` derivatives.
fn falling_product(
    multiplicities: &[i64],
    lambda: &[f64],
    linear: &[Vec<i64>],
    vars: usize,
) -> DerivativePolynomial {
    let mut out = DerivativePolynomial::new();
    out.insert(vec![0; vars], Complex64::new(1.0, 0.0));
    for (j, &mult) in multiplicities.iter().enumerate() {
        for k in 0..mult {
            let mut factor = DerivativePolynomial::new();
            factor.insert(vec![0; vars], Complex64::new(k as f64, lambda[j]));
            for (beta, &coef) in linear[j].iter().enumerate() {
                if coef != 0 {
                    let mut e = vec![0; vars];
                    e[beta] = 1;
                    factor.insert(e, Complex64::new(-(coef as f64), 0.0));
                }
            }
            out = poly_mul(&out, &factor);
        }
    }
    out
}

/// `P_α(∂_x) - e^{x^α}` acting on functions of `x ∈ R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "XSpaceOperatorWire", try_from = "XSpaceOperatorWire")]
pub struct XSpaceOperator {
    /// Zero-based row of the charge matrix; also the index of the shift term.
    pub alpha: usize,
    pub variables: usize,
    pub poly_part: DerivativePolynomial,
}

impl XSpaceOperator {
    /// Highest total derivative order in the polynomial part.
    pub fn order(&self) -> u32 {
        self.poly_part.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Polynomial part evaluated on `e^{d·x}`: `Σ_β c_β d^β`.
    pub fn symbol(&self, d: &[f64]) -> Complex64 {
        self.poly_part
            .iter()
            .map(|(beta, c)| {
                c * beta
                    .iter()
                    .zip(d)
                    .map(|(&b, &v)| v.powi(b as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

/// Emits `Π_j Π_{k<m_j^α} (iλ_j + k - Σ_β m_j^β ∂_{x^β}) - e^{x^α}`.
pub fn gkz_operator(m: &ChargeMatrix, params: &SpectralParams, alpha: usize) -> Result<XSpaceOperator> {
    check_alpha(m, alpha)?;
    crate::error::check_len("lambda", m.dim(), params.lambda.len())?;
    let columns: Vec<Vec<i64>> = (0..m.dim())
        .map(|j| (0..m.rank()).map(|b| m.entry(b, j)).collect())
        .collect();
    Ok(XSpaceOperator {
        alpha,
        variables: m.rank(),
        poly_part: falling_product(&m.rows()[alpha], &params.lambda, &columns, m.rank()),
    })
}

fn check_alpha(m: &ChargeMatrix, alpha: usize) -> Result<()> {
    if alpha < m.rank() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha = {} out of range for {} relations",
            alpha + 1,
            m.rank()
        )))
    }
}

/// `Π_j Π_{k<m_j^α} (iλ_j + k - ∂_{y^j}) - exp(Σ_j m_j^α y^j)` on functions of `y ∈ R^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct YSpaceOperator {
    pub alpha: usize,
    pub poly_part: DerivativePolynomial,
    /// Exponent of the shift term: `m_j^α`.
    pub shift: Vec<i64>,
}

pub fn y_space_operator(m: &ChargeMatrix, params: &SpectralParams, alpha: usize) -> Result<YSpaceOperator> {
    check_alpha(m, alpha)?;
    crate::error::check_len("lambda", m.dim(), params.lambda.len())?;
    let n = m.dim();
    let unit: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| (i == j) as i64).collect()).collect();
    Ok(YSpaceOperator {
        alpha,
        poly_part: falling_product(&m.rows()[alpha], &params.lambda, &unit, n),
        shift: m.rows()[alpha].clone(),
    })
}

impl YSpaceOperator {
    /// Restricts to functions of `x = m·y` via `∂_{y^j} = Σ_β m_j^β ∂_{x^β}`.
    pub fn pull_back(&self, m: &ChargeMatrix) -> XSpaceOperator {
        let vars = m.rank();
        let mut out = DerivativePolynomial::new();
        for (exps, coef) in &self.poly_part {
            let mut term = DerivativePolynomial::new();
            term.insert(vec![0; vars], *coef);
            for (j, &k) in exps.iter().enumerate() {
                let mut chain = DerivativePolynomial::new();
                for beta in 0..vars {
                    if m.entry(beta, j) != 0 {
                        let mut e = vec![0; vars];
                        e[beta] = 1;
                        chain.insert(e, Complex64::new(m.entry(beta, j) as f64, 0.0));
                    }
                }
                for _ in 0..k {
                    term = poly_mul(&term, &chain);
                }
            }
            for (e, c) in term {
                *out.entry(e).or_default() += c;
            }
        }
        out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        XSpaceOperator {
            alpha: self.alpha,
            variables: vars,
            poly_part: out,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermWire {
    derivative: Vec<u32>,
    re: f64,
    im: f64,
}

/// `{"alpha": 1, "variables": n, "terms": [...], "shift": {"alpha": 1, "coefficient": -1}}`,
/// with one-based `alpha`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct XSpaceOperatorWire {
    alpha: usize,
    variables: usize,
    terms: Vec<TermWire>,
    shift: ShiftWire,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftWire {
    alpha: usize,
    coefficient: f64,
}

impl From<XSpaceOperator> for XSpaceOperatorWire {
    fn from(op: XSpaceOperator) -> Self {
        Self {
            alpha: op.alpha + 1,
            variables: op.variables,
            terms: op
                .poly_part
                .into_iter()
                .map(|(derivative, c)| TermWire {
                    derivative,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
            shift: ShiftWire {
                alpha: op.alpha + 1,
                coefficient: -1.0,
            },
        }
    }
}

impl TryFrom<XSpaceOperatorWire> for XSpaceOperator {
    type Error = String;

    fn try_from(wire: XSpaceOperatorWire) -> std::result::Result<Self, String> {
        if wire.alpha == 0 || wire.alpha > wire.variables {
            return Err(format!("alpha {} out of range 1..={}", wire.alpha, wire.variables));
        }
        if wire.shift.alpha != wire.alpha || wire.shift.coefficient != -1.0 {
            return Err("shift term must be -e^{x^alpha} for the operator's own alpha".into());
        }
        let mut poly_part = DerivativePolynomial::new();
        for term in wire.terms {
            if term.derivative.len() != wire.variables {
                return Err(format!(
                    "derivative multi-index {:?} has length {}, expected {}",
                    term.derivative,
                    term.derivative.len(),
                    wire.variables
                ));
            }
            if poly_part
                .insert(term.derivative.clone(), Complex64::new(term.re, term.im))
                .is_some()
            {
                return Err(format!("duplicate derivative multi-index {:?}", term.derivative));
            }
        }
        Ok(Self {
            alpha: wire.alpha - 1,
            variables: wire.variables,
            poly_part,
        })
    }
}
