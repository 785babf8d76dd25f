//! Exact rational linear algebra on small dense matrices.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

pub(crate) type RationalMatrix = Vec<Vec<BigRational>>;

pub(crate) fn rational(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

pub(crate) fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn from_integers(rows: &[Vec<i64>]) -> RationalMatrix {
    rows.iter()
        .map(|row| row.iter().copied().map(rational).collect())
        .collect()
}

/// `A Aᵀ` for an integer matrix given by rows.
pub(crate) fn gram(rows: &[Vec<i64>]) -> RationalMatrix {
    rows.iter()
        .map(|a| {
            rows.iter()
                .map(|b| {
                    let dot: i128 = a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum();
                    BigRational::from_integer(BigInt::from(dot))
                })
                .collect()
        })
        .collect()
}

/// Reduces `mat` to row echelon form in place and returns the pivot columns.
fn echelon(mat: &mut RationalMatrix) -> Vec<usize> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].recip();
        for entry in mat[r].iter_mut() {
            *entry = &*entry * &inv;
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let factor = mat[i][c].clone();
                let pivot = mat[r][c..cols].to_vec();
                for (entry, p) in mat[i][c..cols].iter_mut().zip(&pivot) {
                    *entry -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rank(mat: &RationalMatrix) -> usize {
    echelon(&mut mat.clone()).len()
}

/// Determinant of a square matrix; the empty matrix has determinant one.
pub(crate) fn determinant(mat: &RationalMatrix) -> BigRational {
    let n = mat.len();
    let mut a = mat.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] * &inv;
            let (upper, lower) = a.split_at_mut(i);
            for (entry, p) in lower[0][c..n].iter_mut().zip(&upper[c][c..n]) {
                *entry -= &factor * p;
            }
        }
    }
    det
}

pub(crate) fn inverse(mat: &RationalMatrix) -> Option<RationalMatrix> {
    let n = mat.len();
    let mut augmented: RationalMatrix = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let pivots = echelon(&mut augmented);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(augmented.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `mat · x = rhs` for square nonsingular `mat`.
pub(crate) fn solve(mat: &RationalMatrix, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let inv = inverse(mat)?;
    Some(
        inv.iter()
            .map(|row| row.iter().zip(rhs).map(|(a, b)| a * b).sum())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_empty_matrix_is_one() {
        assert_eq!(determinant(&Vec::new()), BigRational::one());
    }

    #[test]
    fn determinant_and_inverse_agree() {
        let m = from_integers(&[vec![2, 1], vec![1, 2]]);
        assert_eq!(determinant(&m), rational(3));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[0][0], BigRational::new(2.into(), 3.into()));
        assert_eq!(inv[0][1], BigRational::new((-1).into(), 3.into()));
    }

    #[test]
    fn rank_detects_dependent_rows() {
        assert_eq!(rank(&from_integers(&[vec![1, 1], vec![2, 2]])), 1);
        assert_eq!(rank(&from_integers(&[vec![1, 1, 1, 0], vec![0, 0, 1, 1]])), 2);
        assert!(inverse(&from_integers(&[vec![1, 1], vec![2, 2]])).is_none());
    }
}
