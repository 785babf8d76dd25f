//! The Lie algebra `L_N`, its representation `π_{λ,c}` on functions of
//! `t ∈ R_+^N`, the elements `C_α` that act by zero there, and the
//! constant-coefficient operators they induce on the period.

mod coefficient;
mod diffop;
mod normal_form;
mod xspace;

pub use coefficient::{Coefficient, ExactComplex};
pub use diffop::{apply_diffop, rep_map, DiffMonomial, DiffOperator, Polynomial, Representation};
pub use normal_form::{normal_order, Generator, Monomial, NormalForm, Word};
pub use xspace::{gkz_operator, y_space_operator, DerivativePolynomial, XSpaceOperator, YSpaceOperator};

use num::complex::Complex64;

use crate::reduction::SpectralParams;
use crate::toric_data::ChargeMatrix;

/// Sign between the two products in `C_α`; `Plus` is the negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnnihilatorSign {
    #[default]
    Minus,
    Plus,
}

/// `Π_j (F_j E_j)^{k_j} ∓ Π_j C^{k_j} (H_j - iλ_j)^{k_j}` for charges `k_j`.
pub fn annihilator_for_charges<S: Coefficient>(
    charges: &[i64],
    rep: &Representation<S>,
    sign: AnnihilatorSign,
) -> NormalForm<S> {
    let rank = charges.len();
    let generator = |g| NormalForm::generator(rank, g);
    let mut lowering = NormalForm::one(rank);
    let mut cartan = NormalForm::one(rank);
    for (j, &k) in charges.iter().enumerate() {
        let k = u32::try_from(k).expect("nonnegative charge");
        if k == 0 {
            continue;
        }
        let fe = &generator(Generator::F(j)) * &generator(Generator::E(j));
        lowering = &lowering * &fe.pow(k);
        let shifted_h = &generator(Generator::H(j)) - &NormalForm::scalar(rank, rep.i_lambda[j].clone());
        let factor = &generator(Generator::C) * &shifted_h;
        cartan = &cartan * &factor.pow(k);
    }
    match sign {
        AnnihilatorSign::Minus => &lowering - &cartan,
        AnnihilatorSign::Plus => &lowering + &cartan,
    }
}

/// `C_α = Π_j (F_j E_j)^{m_j^α} - Π_j C^{m_j^α} (H_j - iλ_j)^{m_j^α}` in normal form.
pub fn annihilator<S: Coefficient>(m: &ChargeMatrix, rep: &Representation<S>, alpha: usize) -> NormalForm<S> {
    annihilator_for_charges(&m.rows()[alpha], rep, AnnihilatorSign::Minus)
}

/// Checks that `C_α` acts by zero: symbolically over exact complex
/// rationals, and on every monomial `t^a` with `a_j <= 3` in double precision.
pub fn verify_annihilator(m: &ChargeMatrix, params: &SpectralParams, alpha: usize) -> bool {
    verify_annihilator_with_sign(m, params, alpha, AnnihilatorSign::Minus)
}

pub fn verify_annihilator_with_sign(
    m: &ChargeMatrix,
    params: &SpectralParams,
    alpha: usize,
    sign: AnnihilatorSign,
) -> bool {
    let charges = &m.rows()[alpha];
    let exact_rep = Representation::<ExactComplex>::new(params);
    let symbolic = rep_map(&annihilator_for_charges(charges, &exact_rep, sign), &exact_rep).is_zero();

    let float_rep = Representation::<Complex64>::new(params);
    let op = rep_map(&annihilator_for_charges(charges, &float_rep, sign), &float_rep);
    let monomials = MonomialBox::new(m.dim(), 3);
    let numeric = monomials.into_iter().all(|a| {
        apply_diffop(&op, &a)
            .values()
            .all(|c| c.norm() < 1e-12 * monomial_scale(&a, params))
    });
    symbolic && numeric
}

/// Rough size of `C_α t^a` terms, so the numeric check is relative.
fn monomial_scale(a: &[u32], params: &SpectralParams) -> f64 {
    a.iter()
        .zip(&params.lambda)
        .map(|(&k, l)| (1.0 + k as f64 + l.abs()).powi(2))
        .product::<f64>()
        .max(1.0)
}

/// All exponent vectors in `{0..=max}^dim`.
struct MonomialBox {
    dim: usize,
    max: u32,
}

impl MonomialBox {
    fn new(dim: usize, max: u32) -> Self {
        Self { dim, max }
    }

    fn into_iter(self) -> impl Iterator<Item = Vec<u32>> {
        let side = self.max as usize + 1;
        let total = side.pow(self.dim as u32);
        (0..total).map(move |mut code| {
            (0..self.dim)
                .map(|_| {
                    let digit = (code % side) as u32;
                    code /= side;
                    digit
                })
                .collect()
        })
    }
}
