//! Ordered monomials in the enveloping algebra of `L_N`.
//!
//! Brackets: `[E_i, H_j] = δ_ij E_i`, `[F_i, H_j] = -δ_ij F_i`,
//! `[E_i, F_j] = δ_ij C`, with `C` central and every other pair commuting.
//! Normal order puts all `F` first, then `H`, then `E`, then powers of `C`,
//! index-ascending inside each block.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::coefficient::Coefficient;
use crate::error::{Error, Result};

/// A generator of `L_N`. Indices are zero-based; they display one-based.
/// The derived order is the normal order `F < H < E < C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    F(usize),
    H(usize),
    E(usize),
    C,
}

impl Generator {
    pub fn index(self) -> Option<usize> {
        match self {
            Generator::F(i) | Generator::H(i) | Generator::E(i) => Some(i),
            Generator::C => None,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::F(i) => write!(f, "F{}", i + 1),
            Generator::H(i) => write!(f, "H{}", i + 1),
            Generator::E(i) => write!(f, "E{}", i + 1),
            Generator::C => write!(f, "C"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown generator `{s}`"));
        if s == "C" {
            return Ok(Generator::C);
        }
        let (head, index) = s.split_at(s.len().min(1));
        let index: usize = index.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        match head {
            "F" => Ok(Generator::F(index - 1)),
            "H" => Ok(Generator::H(index - 1)),
            "E" => Ok(Generator::E(index - 1)),
            _ => Err(bad()),
        }
    }
}

/// `[x, y] = xy - yx` for `x > y`; every nonzero bracket is a single generator.
fn bracket(x: Generator, y: Generator) -> Option<Generator> {
    use Generator::*;
    match (x, y) {
        (H(i), F(j)) if i == j => Some(F(i)),
        (E(i), F(j)) if i == j => Some(C),
        (E(i), H(j)) if i == j => Some(E(i)),
        _ => None,
    }
}

/// A finite product of generators of `L_N`, read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<Generator>,
}

impl Word {
    pub fn new(rank: usize, letters: Vec<Generator>) -> Result<Self> {
        if let Some(g) = letters.iter().find(|g| g.index().is_some_and(|i| i >= rank)) {
            return Err(Error::InvalidParameter(format!("generator {g} out of range for N = {rank}")));
        }
        Ok(Self { rank, letters })
    }

    /// Parses whitespace-separated generators such as `"E1 F1 H2 C"`.
    pub fn parse(rank: usize, text: &str) -> Result<Self> {
        let letters = text
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(rank, letters)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            rank: self.rank.max(other.rank),
            letters,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `F^f H^h E^e C^c` with per-index exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub f: Vec<u32>,
    pub h: Vec<u32>,
    pub e: Vec<u32>,
    pub c: u32,
}

impl Monomial {
    pub fn identity(rank: usize) -> Self {
        Self {
            f: vec![0; rank],
            h: vec![0; rank],
            e: vec![0; rank],
            c: 0,
        }
    }

    fn from_sorted(rank: usize, letters: &[Generator]) -> Self {
        let mut m = Self::identity(rank);
        for g in letters {
            match *g {
                Generator::F(i) => m.f[i] += 1,
                Generator::H(i) => m.h[i] += 1,
                Generator::E(i) => m.e[i] += 1,
                Generator::C => m.c += 1,
            }
        }
        m
    }

    /// The monomial written out in normal order.
    pub fn letters(&self) -> Vec<Generator> {
        let block = |exps: &[u32], g: fn(usize) -> Generator| {
            exps.iter()
                .enumerate()
                .flat_map(move |(i, &k)| std::iter::repeat_n(g(i), k as usize))
                .collect::<Vec<_>>()
        };
        let mut out = block(&self.f, Generator::F);
        out.extend(block(&self.h, Generator::H));
        out.extend(block(&self.e, Generator::E));
        out.extend(std::iter::repeat_n(Generator::C, self.c as usize));
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.letters();
        if letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = letters.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A linear combination of normal-ordered monomials. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm<S> {
    rank: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Coefficient> NormalForm<S> {
    pub fn zero(rank: usize) -> Self {
        Self {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(rank: usize, value: S) -> Self {
        let mut out = Self::zero(rank);
        out.add_term(Monomial::identity(rank), value);
        out
    }

    pub fn one(rank: usize) -> Self {
        Self::scalar(rank, S::one())
    }

    pub fn generator(rank: usize, g: Generator) -> Self {
        normal_order(&Word::new(rank, vec![g]).expect("generator index in range"))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, S> {
        &self.terms
    }

    pub fn coefficient(&self, monomial: &Monomial) -> S {
        self.terms.get(monomial).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * factor.clone());
        }
        out
    }

    pub fn pow(&self, exponent: u32) -> Self {
        (0..exponent).fold(Self::one(self.rank), |acc, _| &acc * self)
    }

    fn add_term(&mut self, monomial: Monomial, value: S) {
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

/// Rewrites a word into normal form by repeatedly replacing the leftmost
/// out-of-order pair `xy` with `yx + [x, y]`. Each step either lowers the
/// number of inversions or shortens the word, so rewriting terminates.
pub fn normal_order<S: Coefficient>(word: &Word) -> NormalForm<S> {
    let mut pending = BTreeMap::new();
    pending.insert(word.letters.clone(), S::one());
    normalize(word.rank, pending)
}

fn normalize<S: Coefficient>(rank: usize, mut pending: BTreeMap<Vec<Generator>, S>) -> NormalForm<S> {
    let mut out = NormalForm::zero(rank);
    while let Some((letters, coef)) = pending.pop_last() {
        if coef.is_zero() {
            continue;
        }
        let Some(i) = letters.windows(2).position(|w| w[0] > w[1]) else {
            out.add_term(Monomial::from_sorted(rank, &letters), coef);
            continue;
        };
        let (x, y) = (letters[i], letters[i + 1]);
        let mut swapped = letters.clone();
        swapped.swap(i, i + 1);
        *pending.entry(swapped).or_insert_with(S::zero) += coef.clone();
        if let Some(g) = bracket(x, y) {
            let mut shorter = letters[..i].to_vec();
            shorter.push(g);
            shorter.extend_from_slice(&letters[i + 2..]);
            *pending.entry(shorter).or_insert_with(S::zero) += coef;
        }
    }
    out
}

impl<S: Coefficient> Add for &NormalForm<S> {
    type Output = NormalForm<S>;

    fn add(self, other: &NormalForm<S>) -> NormalForm<S> {
        let mut out = self.clone();
        out.rank = self.rank.max(other.rank);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Coefficient> Neg for &NormalForm<S> {
    type Output = NormalForm<S>;

    fn neg(self) -> NormalForm<S> {
        self.scale(&-S::one())
    }
}

impl<S: Coefficient> Sub for &NormalForm<S> {
    type Output = NormalForm<S>;

    fn sub(self, other: &NormalForm<S>) -> NormalForm<S> {
        self + &(-other)
    }
}

impl<S: Coefficient> Mul for &NormalForm<S> {
    type Output = NormalForm<S>;

    fn mul(self, other: &NormalForm<S>) -> NormalForm<S> {
        let rank = self.rank.max(other.rank);
        let mut pending: BTreeMap<Vec<Generator>, S> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut letters = a.letters();
                letters.extend(b.letters());
                *pending.entry(letters).or_insert_with(S::zero) += ca.clone() * cb.clone();
            }
        }
        normalize(rank, pending)
    }
}

impl<S: Coefficient + fmt::Display> fmt::Display for NormalForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})·{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::ExactComplex;
    use num::One;

    type Nf = NormalForm<ExactComplex>;

    fn nf(rank: usize, text: &str) -> Nf {
        normal_order(&Word::parse(rank, text).unwrap())
    }

    fn sum(rank: usize, words: &[&str]) -> Nf {
        words.iter().fold(Nf::zero(rank), |acc, w| &acc + &nf(rank, w))
    }

    #[test]
    fn heisenberg_bracket() {
        assert_eq!(nf(1, "E1 F1"), sum(1, &["F1 E1", "C"]));
    }

    #[test]
    fn cartan_brackets() {
        assert_eq!(nf(1, "E1 H1"), sum(1, &["H1 E1", "E1"]));
        assert_eq!(&nf(1, "H1 F1") - &nf(1, "F1 H1"), nf(1, "F1"));
    }

    #[test]
    fn distinct_indices_commute() {
        assert_eq!(nf(2, "E1 F2"), nf(2, "F2 E1"));
        assert_eq!(nf(2, "E2 H1"), nf(2, "H1 E2"));
        assert_eq!(nf(2, "C F2"), nf(2, "F2 C"));
    }

    #[test]
    fn normal_monomials_are_fixed_points() {
        let w = Word::parse(3, "F1 F3 H2 H2 E1 E3 C").unwrap();
        let n: Nf = normal_order(&w);
        assert_eq!(n.terms().len(), 1);
        let (m, c) = n.terms().iter().next().unwrap();
        assert_eq!(m.letters(), w.letters());
        assert_eq!(*c, ExactComplex::one());
    }

    #[test]
    fn cancellation_drops_terms() {
        assert!((&nf(1, "E1 F1") - &sum(1, &["F1 E1", "C"])).is_zero());
    }

    #[test]
    fn squared_heisenberg_element() {
        // E F E F = F E F E + ... ; check against E² F² expansion identity
        // E² F² = F² E² + 4 C F E + 2 C².
        let lhs = nf(1, "E1 E1 F1 F1");
        let mut rhs = nf(1, "F1 F1 E1 E1");
        rhs = &rhs + &nf(1, "C F1 E1").scale(&ExactComplex::from_integer(4));
        rhs = &rhs + &nf(1, "C C").scale(&ExactComplex::from_integer(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn parse_and_display() {
        let w = Word::parse(2, "E1 F2 H1 C").unwrap();
        assert_eq!(w.to_string(), "E1 F2 H1 C");
        assert!(Word::parse(2, "E3").is_err());
        assert!(Word::parse(2, "X1").is_err());
        assert!(Word::parse(2, "F0").is_err());
        assert_eq!(Monomial::identity(2).to_string(), "1");
    }
}
