//! Charge matrices of toric quotients `C^N // T^n` and the integer kernel of
//! the projection `m : Lie(T^N)* -> Lie(T^n)*`.
//!
//! The kernel basis is the exact saturated lattice basis, computed by
//! unimodular integer column reduction and then brought to Hermite normal
//! form so that the output is canonical.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::reduction::jacobian_factor;

/// Largest kernel dimension accepted by [`integrability_check`].
pub const MAX_KERNEL_DIM: usize = 4;

/// Validated `n x N` charge matrix (`N >= n`) with nonnegative entries and
/// full row rank. `N = n` gives a zero-dimensional constraint set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeMatrix {
    rows: Vec<Vec<i64>>,
}

impl ChargeMatrix {
    /// Torus rank `n`.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn entry(&self, alpha: usize, j: usize) -> i64 {
        self.rows[alpha][j]
    }

    /// `x = m · y`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(y).map(|(&m, &v)| m as f64 * v).sum())
            .collect()
    }

    /// `Σ_j m_j^α`, the order of the α-th operator.
    pub fn row_degree(&self, alpha: usize) -> usize {
        self.rows[alpha].iter().map(|&m| m as usize).sum()
    }
}

/// Integer basis of `ker m`, one vector per row, in Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelBasis {
    rows: Vec<Vec<i64>>,
    ambient: usize,
}

impl KernelBasis {
    pub fn new(rows: Vec<Vec<i64>>, ambient: usize) -> Result<Self> {
        for row in &rows {
            crate::error::check_len("kernel row", ambient, row.len())?;
        }
        Ok(Self { rows, ambient })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Number of kernel vectors, `N - n`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
}

/// Everything derived from a charge matrix that the evaluators need.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricData {
    pub charge: ChargeMatrix,
    pub kernel: KernelBasis,
    pub jacobian: f64,
    pub integrable: bool,
}

impl ToricData {
    pub fn new(raw: &[Vec<i64>]) -> Result<Self> {
        let charge = validate_charge_matrix(raw)?;
        let kernel = kernel_basis(&charge);
        let jacobian = jacobian_factor(&charge, &kernel);
        let integrable = integrability_check(&kernel)?;
        Ok(Self {
            charge,
            kernel,
            jacobian,
            integrable,
        })
    }

    /// Complex projective space `P^ℓ`: `m = (1, …, 1)` with `ℓ + 1` columns.
    pub fn projective_space(ell: usize) -> Result<Self> {
        Self::new(&[vec![1; ell + 1]])
    }
}

pub fn validate_charge_matrix(raw: &[Vec<i64>]) -> Result<ChargeMatrix> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    for (row, entries) in raw.iter().enumerate() {
        if entries.len() != cols {
            return Err(Error::RaggedMatrix {
                row,
                expected: cols,
                found: entries.len(),
            });
        }
    }
    if rows == 0 || cols < rows {
        return Err(Error::BadShape { rows, cols });
    }
    for (row, entries) in raw.iter().enumerate() {
        if let Some((col, &value)) = entries.iter().enumerate().find(|(_, &v)| v < 0) {
            return Err(Error::NegativeEntry { row, col, value });
        }
    }
    let rank = exact::rank(&exact::from_integers(raw));
    if rank < rows {
        return Err(Error::RankDeficient { rank, rows });
    }
    Ok(ChargeMatrix {
        rows: raw.to_vec(),
    })
}

pub fn kernel_basis(m: &ChargeMatrix) -> KernelBasis {
    let n = m.rank();
    let big_n = m.dim();
    let mut a: Vec<Vec<BigInt>> = m
        .rows()
        .iter()
        .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    // Columns of `u` track the unimodular column operations applied to `a`.
    let mut u: Vec<Vec<BigInt>> = (0..big_n)
        .map(|i| (0..big_n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();

    let mut pivot = 0;
    for r in 0..n {
        loop {
            let nonzero: Vec<usize> = (pivot..big_n).filter(|&c| !a[r][c].is_zero()).collect();
            if nonzero.len() <= 1 {
                if let Some(&c) = nonzero.first() {
                    swap_columns(&mut a, &mut u, pivot, c);
                    pivot += 1;
                }
                break;
            }
            let smallest = *nonzero
                .iter()
                .min_by(|&&x, &&y| a[r][x].abs().cmp(&a[r][y].abs()))
                .unwrap();
            for &c in &nonzero {
                if c != smallest {
                    let q = a[r][c].div_floor(&a[r][smallest]);
                    sub_column_multiple(&mut a, &mut u, c, smallest, &q);
                }
            }
        }
    }

    let lattice: Vec<Vec<BigInt>> = (pivot..big_n)
        .map(|c| (0..big_n).map(|i| u[i][c].clone()).collect())
        .collect();
    let rows = hermite_rows(lattice)
        .into_iter()
        .map(primitive)
        .map(|row| {
            row.iter()
                .map(|v| v.to_i64().expect("kernel entry overflows i64"))
                .collect()
        })
        .collect();
    KernelBasis {
        rows,
        ambient: big_n,
    }
}

fn swap_columns(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], x: usize, y: usize) {
    for row in a.iter_mut().chain(u.iter_mut()) {
        row.swap(x, y);
    }
}

/// column[target] -= q * column[source]
fn sub_column_multiple(
    a: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    target: usize,
    source: usize,
    q: &BigInt,
) {
    for row in a.iter_mut().chain(u.iter_mut()) {
        let delta = q * &row[source];
        row[target] -= delta;
    }
}

/// Row Hermite normal form: positive pivots, strictly increasing pivot
/// columns, entries above each pivot reduced into `[0, pivot)`.
fn hermite_rows(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let count = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == count {
            break;
        }
        loop {
            let nonzero: Vec<usize> = (r..count).filter(|&i| !rows[i][c].is_zero()).collect();
            let Some(&smallest) = nonzero
                .iter()
                .min_by(|&&x, &&y| rows[x][c].abs().cmp(&rows[y][c].abs()))
            else {
                break;
            };
            if nonzero.len() == 1 {
                rows.swap(r, smallest);
                if rows[r][c].is_negative() {
                    for v in rows[r].iter_mut() {
                        *v = -v.clone();
                    }
                }
                for i in 0..r {
                    let q = rows[i][c].div_floor(&rows[r][c]);
                    if !q.is_zero() {
                        let pivot_row = rows[r].clone();
                        for (v, p) in rows[i].iter_mut().zip(&pivot_row) {
                            *v -= &q * p;
                        }
                    }
                }
                r += 1;
                break;
            }
            let pivot_row = rows[smallest].clone();
            for &i in &nonzero {
                if i != smallest {
                    let q = rows[i][c].div_floor(&pivot_row[c]);
                    for (v, p) in rows[i].iter_mut().zip(&pivot_row) {
                        *v -= &q * p;
                    }
                }
            }
        }
    }
    rows
}

fn primitive(row: Vec<BigInt>) -> Vec<BigInt> {
    let g = row.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() || g.is_one() {
        row
    } else {
        row.into_iter().map(|v| v / &g).collect()
    }
}

/// True iff `ker m` contains no nonzero vector with all coordinates `>= 0`,
/// which is what makes the reduced integrand decay in every direction.
pub fn integrability_check(kernel: &KernelBasis) -> Result<bool> {
    let dim = kernel.len();
    if dim == 0 {
        return Ok(true);
    }
    if dim > MAX_KERNEL_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_KERNEL_DIM,
        });
    }
    if sampled_nonnegative_direction(kernel) {
        return Ok(false);
    }
    Ok(!nonnegative_cone_feasible(kernel))
}

/// Scans integer directions `s ∈ {-4..4}^d` for `Vᵀs >= 0, Vᵀs != 0`.
/// A hit is an exact certificate of non-integrability.
fn sampled_nonnegative_direction(kernel: &KernelBasis) -> bool {
    const RADIUS: i64 = 4;
    let dim = kernel.len();
    let side = (2 * RADIUS + 1) as usize;
    let total = side.pow(dim as u32);
    (0..total).any(|mut code| {
        let s: Vec<i64> = (0..dim)
            .map(|_| {
                let digit = (code % side) as i64 - RADIUS;
                code /= side;
                digit
            })
            .collect();
        let image: Vec<i64> = (0..kernel.ambient_dim())
            .map(|j| kernel.rows().iter().zip(&s).map(|(v, &c)| v[j] * c).sum())
            .collect();
        image.iter().all(|&v| v >= 0) && image.iter().any(|&v| v > 0)
    })
}

/// Exact Fourier–Motzkin feasibility of `{ s : Vᵀs >= 0, Σ_j (Vᵀs)_j >= 1 }`.
fn nonnegative_cone_feasible(kernel: &KernelBasis) -> bool {
    let dim = kernel.len();
    let mut constraints: Vec<Inequality> = (0..kernel.ambient_dim())
        .map(|j| Inequality {
            coeffs: kernel.rows().iter().map(|v| exact::rational(v[j])).collect(),
            rhs: BigRational::zero(),
        })
        .collect();
    constraints.push(Inequality {
        coeffs: kernel
            .rows()
            .iter()
            .map(|v| exact::rational(v.iter().sum()))
            .collect(),
        rhs: BigRational::one(),
    });

    for var in 0..dim {
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in constraints {
            if c.coeffs[var].is_positive() {
                upper.push(c);
            } else if c.coeffs[var].is_negative() {
                lower.push(c);
            } else {
                rest.push(c);
            }
        }
        for p in &upper {
            for q in &lower {
                let wp = -q.coeffs[var].clone();
                let wq = p.coeffs[var].clone();
                let combined = Inequality {
                    coeffs: p
                        .coeffs
                        .iter()
                        .zip(&q.coeffs)
                        .map(|(a, b)| a * &wp + b * &wq)
                        .collect(),
                    rhs: &p.rhs * &wp + &q.rhs * &wq,
                }
                .normalized();
                if !rest.contains(&combined) {
                    rest.push(combined);
                }
            }
        }
        constraints = rest;
    }
    constraints.iter().all(|c| !c.rhs.is_positive())
}

/// `coeffs · s >= rhs`
#[derive(Debug, Clone, PartialEq)]
struct Inequality {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
}

impl Inequality {
    fn normalized(self) -> Self {
        let scale = self
            .coeffs
            .iter()
            .chain(std::iter::once(&self.rhs))
            .map(|v| v.abs())
            .max()
            .filter(|v| !v.is_zero());
        match scale {
            Some(scale) => Self {
                coeffs: self.coeffs.iter().map(|v| v / &scale).collect(),
                rhs: &self.rhs / &scale,
            },
            None => self,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel_of(raw: &[Vec<i64>]) -> Vec<Vec<i64>> {
        kernel_basis(&validate_charge_matrix(raw).unwrap()).rows().to_vec()
    }

    #[test]
    fn validates_projective_line() {
        let m = validate_charge_matrix(&[vec![1, 1]]).unwrap();
        assert_eq!((m.rank(), m.dim()), (1, 2));
    }

    #[test]
    fn rejects_dependent_rows() {
        assert_eq!(
            validate_charge_matrix(&[vec![1, 1], vec![2, 2]]),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        );
    }

    #[test]
    fn accepts_hirzebruch_type_data() {
        let m = validate_charge_matrix(&[vec![1, 1, 1, 0], vec![0, 0, 1, 1]]).unwrap();
        assert_eq!((m.rank(), m.dim()), (2, 4));
    }

    #[test]
    fn rejects_bad_shapes_and_signs() {
        assert!(matches!(validate_charge_matrix(&[vec![1], vec![1]]), Err(Error::BadShape { .. })));
        assert!(validate_charge_matrix(&[vec![1]]).is_ok());
        assert!(matches!(validate_charge_matrix(&[]), Err(Error::BadShape { .. })));
        assert!(matches!(
            validate_charge_matrix(&[vec![1, -1]]),
            Err(Error::NegativeEntry { row: 0, col: 1, value: -1 })
        ));
        assert!(matches!(
            validate_charge_matrix(&[vec![1, 1], vec![1]]),
            Err(Error::RaggedMatrix { .. })
        ));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_of(&[vec![1, 1]]), vec![vec![1, -1]]);
        assert_eq!(kernel_of(&[vec![1, 1, 1]]), vec![vec![1, 0, -1], vec![0, 1, -1]]);
        assert_eq!(
            kernel_of(&[vec![1, 1, 0, 0], vec![0, 0, 1, 1]]),
            vec![vec![1, -1, 0, 0], vec![0, 0, 1, -1]]
        );
        assert_eq!(kernel_of(&[vec![1, 0]]), vec![vec![0, 1]]);
    }

    #[test]
    fn kernel_of_weighted_projective_space_is_saturated() {
        // ker (1, 2) is spanned by (2, -1), not by a multiple of it.
        assert_eq!(kernel_of(&[vec![1, 2]]), vec![vec![2, -1]]);
        assert_eq!(kernel_of(&[vec![2, 4, 6]]), vec![vec![1, 1, -1], vec![0, 3, -2]]);
    }

    #[test]
    fn integrability_examples() {
        let basis = |rows: Vec<Vec<i64>>| {
            let n = rows[0].len();
            KernelBasis::new(rows, n).unwrap()
        };
        assert!(integrability_check(&basis(vec![vec![1, -1]])).unwrap());
        assert!(!integrability_check(&basis(vec![vec![0, 1]])).unwrap());
        assert!(integrability_check(&basis(vec![vec![1, 0, -1], vec![0, 1, -1]])).unwrap());
        assert!(integrability_check(&KernelBasis::new(vec![], 1).unwrap()).unwrap());
    }

    #[test]
    fn exact_feasibility_catches_what_sampling_misses() {
        // The only nonnegative ray is s = (4, 5), outside the sampled box.
        let kernel = KernelBasis::new(vec![vec![1, 0, -5, 5], vec![0, 1, 4, -4]], 4).unwrap();
        assert!(!sampled_nonnegative_direction(&kernel));
        assert!(nonnegative_cone_feasible(&kernel));
        assert!(!integrability_check(&kernel).unwrap());
    }

    #[test]
    fn too_many_kernel_vectors_are_rejected() {
        let rows: Vec<Vec<i64>> = (0..5)
            .map(|k| (0..6).map(|j| if j == k { 1 } else if j == 5 { -1 } else { 0 }).collect())
            .collect();
        let kernel = KernelBasis::new(rows, 6).unwrap();
        assert_eq!(
            integrability_check(&kernel),
            Err(Error::DimensionTooLarge { dim: 5, max: 4 })
        );
    }
}
