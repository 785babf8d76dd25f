//! Polynomial differential operators in `t_1, …, t_N` and the
//! representation `π_{λ,c}`: `E_i = c∂_i`, `F_i = t_i`,
//! `H_i = t_i∂_i + iλ_i`, `C = c`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use super::coefficient::Coefficient;
use super::normal_form::{Monomial, NormalForm};
use crate::reduction::SpectralParams;

/// `t^t ∂^d`, multiplication operators written to the left.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffMonomial {
    pub t: Vec<u32>,
    pub d: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator<S> {
    rank: usize,
    terms: BTreeMap<DiffMonomial, S>,
}

/// Polynomial in `t` as exponent vector → coefficient.
pub type Polynomial<S> = BTreeMap<Vec<u32>, S>;

impl<S: Coefficient> DiffOperator<S> {
    pub fn zero(rank: usize) -> Self {
        Self {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(rank: usize, value: S) -> Self {
        let mut out = Self::zero(rank);
        out.add_term(
            DiffMonomial {
                t: vec![0; rank],
                d: vec![0; rank],
            },
            value,
        );
        out
    }

    pub fn monomial(t: Vec<u32>, d: Vec<u32>, value: S) -> Self {
        let mut out = Self::zero(t.len());
        out.add_term(DiffMonomial { t, d }, value);
        out
    }

    /// Multiplication by `t_i`.
    pub fn coordinate(rank: usize, i: usize) -> Self {
        let mut t = vec![0; rank];
        t[i] = 1;
        Self::monomial(t, vec![0; rank], S::one())
    }

    /// `∂/∂t_i`.
    pub fn derivative(rank: usize, i: usize) -> Self {
        let mut d = vec![0; rank];
        d[i] = 1;
        Self::monomial(vec![0; rank], d, S::one())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &BTreeMap<DiffMonomial, S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient is negligible (exactly zero for exact scalars).
    pub fn is_negligible(&self) -> bool {
        self.terms.values().all(Coefficient::is_negligible)
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * factor.clone());
        }
        out
    }

    pub fn pow(&self, exponent: u32) -> Self {
        (0..exponent).fold(Self::scalar(self.rank, S::one()), |acc, _| &acc * self)
    }

    fn add_term(&mut self, monomial: DiffMonomial, value: S) {
        match self.terms.entry(monomial) {
            Entry::Vacant(slot) => {
                if !value.is_zero() {
                    slot.insert(value);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += value;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn falling(n: u32, k: u32) -> i64 {
    (0..k).map(|i| (n - i) as i64).product()
}

impl<S: Coefficient> Add for &DiffOperator<S> {
    type Output = DiffOperator<S>;

    fn add(self, other: &DiffOperator<S>) -> DiffOperator<S> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Coefficient> Sub for &DiffOperator<S> {
    type Output = DiffOperator<S>;

    fn sub(self, other: &DiffOperator<S>) -> DiffOperator<S> {
        self + &other.scale(&-S::one())
    }
}

/// Composition. Uses `∂^b t^a = Σ_k C(b,k) a(a-1)…(a-k+1) t^{a-k} ∂^{b-k}`
/// per variable to move derivatives right.
impl<S: Coefficient> Mul for &DiffOperator<S> {
    type Output = DiffOperator<S>;

    fn mul(self, other: &DiffOperator<S>) -> DiffOperator<S> {
        let rank = self.rank.max(other.rank);
        let mut out = DiffOperator::zero(rank);
        for (left, cl) in &self.terms {
            for (right, cr) in &other.terms {
                // Per-variable choices of how many derivatives hit t.
                let limits: Vec<u32> = (0..rank).map(|i| left.d[i].min(right.t[i])).collect();
                let mut k = vec![0u32; rank];
                loop {
                    let mut weight = 1i64;
                    let mut t = Vec::with_capacity(rank);
                    let mut d = Vec::with_capacity(rank);
                    for (i, &ki) in k.iter().enumerate() {
                        weight *= binomial(left.d[i], ki) * falling(right.t[i], ki);
                        t.push(left.t[i] + right.t[i] - ki);
                        d.push(left.d[i] - ki + right.d[i]);
                    }
                    out.add_term(
                        DiffMonomial { t, d },
                        cl.clone() * cr.clone() * S::from_integer(weight),
                    );
                    let Some(pos) = (0..rank).find(|&i| k[i] < limits[i]) else {
                        break;
                    };
                    k[pos] += 1;
                    for slot in k.iter_mut().take(pos) {
                        *slot = 0;
                    }
                }
            }
        }
        out
    }
}

/// Images of the generators under `π_{λ,c}`: the values `iλ_j` and `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<S> {
    pub i_lambda: Vec<S>,
    pub c: S,
}

impl<S: Coefficient> Representation<S> {
    pub fn new(params: &SpectralParams) -> Self {
        Self {
            i_lambda: params.lambda.iter().map(|&l| S::imaginary(l)).collect(),
            c: S::from_real(params.c),
        }
    }

    pub fn rank(&self) -> usize {
        self.i_lambda.len()
    }
}

/// Image of a normal form under `π_{λ,c}`, in `t`-left order.
pub fn rep_map<S: Coefficient>(nf: &NormalForm<S>, rep: &Representation<S>) -> DiffOperator<S> {
    let rank = nf.rank().max(rep.rank());
    let mut out = DiffOperator::zero(rank);
    for (m, coef) in nf.terms() {
        out = &out + &(&monomial_image(rank, m, rep) * &DiffOperator::scalar(rank, coef.clone()));
    }
    out
}

fn monomial_image<S: Coefficient>(rank: usize, m: &Monomial, rep: &Representation<S>) -> DiffOperator<S> {
    let mut t = vec![0; rank];
    t[..m.f.len()].copy_from_slice(&m.f);
    let mut op = DiffOperator::monomial(t, vec![0; rank], S::one());
    for (i, &k) in m.h.iter().enumerate() {
        if k > 0 {
            let euler = &(&DiffOperator::coordinate(rank, i) * &DiffOperator::derivative(rank, i))
                + &DiffOperator::scalar(rank, rep.i_lambda[i].clone());
            op = &op * &euler.pow(k);
        }
    }
    let mut d = vec![0; rank];
    d[..m.e.len()].copy_from_slice(&m.e);
    let c_power: u32 = m.e.iter().sum::<u32>() + m.c;
    let c_factor = (0..c_power).fold(S::one(), |acc, _| acc * rep.c.clone());
    &op * &DiffOperator::monomial(vec![0; rank], d, c_factor)
}

/// `op(t^a)`, using `∂_i t_i^{a_i} = a_i t_i^{a_i - 1}`.
pub fn apply_diffop<S: Coefficient>(op: &DiffOperator<S>, a: &[u32]) -> Polynomial<S> {
    let mut out: Polynomial<S> = BTreeMap::new();
    for (m, coef) in op.terms() {
        if m.d.iter().zip(a).any(|(d, a)| d > a) {
            continue;
        }
        let weight: i64 = m.d.iter().zip(a).map(|(&d, &a)| falling(a, d)).product();
        let exponent: Vec<u32> = (0..a.len()).map(|i| a[i] - m.d[i] + m.t[i]).collect();
        *out.entry(exponent).or_insert_with(S::zero) += coef.clone() * S::from_integer(weight);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::{normal_order, ExactComplex, Word};
    use num::BigRational;

    type Op = DiffOperator<ExactComplex>;

    fn rep(lambda: &[f64], c: f64) -> Representation<ExactComplex> {
        Representation::new(&SpectralParams::new(lambda.to_vec(), c).unwrap())
    }

    fn image(rank: usize, text: &str, r: &Representation<ExactComplex>) -> Op {
        rep_map(&normal_order(&Word::parse(rank, text).unwrap()), r)
    }

    #[test]
    fn ordered_product_maps_directly() {
        let r = rep(&[0.5], 2.0);
        let expected = Op::monomial(vec![1], vec![1], ExactComplex::from_integer(2));
        assert_eq!(image(1, "F1 E1", &r), expected);
    }

    #[test]
    fn reordered_product_picks_up_identity() {
        let r = rep(&[0.5], 2.0);
        let expected = &Op::monomial(vec![1], vec![1], ExactComplex::from_integer(2))
            + &Op::scalar(1, ExactComplex::from_integer(2));
        assert_eq!(image(1, "E1 F1", &r), expected);
    }

    #[test]
    fn cartan_generator() {
        let r = rep(&[0.75], 1.0);
        let expected = &Op::monomial(vec![1], vec![1], ExactComplex::from_integer(1))
            + &Op::scalar(1, ExactComplex::new(BigRational::from_float(0.0).unwrap(), BigRational::from_float(0.75).unwrap()));
        assert_eq!(image(1, "H1", &r), expected);
    }

    #[test]
    fn leibniz_composition() {
        // ∂² t² = t²∂² + 4t∂ + 2
        let d2 = Op::monomial(vec![0], vec![2], ExactComplex::from_integer(1));
        let t2 = Op::monomial(vec![2], vec![0], ExactComplex::from_integer(1));
        let mut expected = Op::monomial(vec![2], vec![2], ExactComplex::from_integer(1));
        expected = &expected + &Op::monomial(vec![1], vec![1], ExactComplex::from_integer(4));
        expected = &expected + &Op::scalar(1, ExactComplex::from_integer(2));
        assert_eq!(&d2 * &t2, expected);
    }

    #[test]
    fn apply_examples() {
        let euler = Op::monomial(vec![1], vec![1], ExactComplex::from_integer(1));
        let out = apply_diffop(&euler, &[3]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[&vec![3]], ExactComplex::from_integer(3));
        assert!(apply_diffop(&Op::derivative(1, 0), &[0]).is_empty());
    }
}
