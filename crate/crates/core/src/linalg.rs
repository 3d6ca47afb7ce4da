//! Exact linear algebra over the rationals and over the jet ring.

// Row operations read one row while writing another; index loops are clearer.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub type Matrix = Vec<Vec<Scalar>>;

/// Rank by fraction-free (Bareiss) elimination after clearing denominators
/// row by row.
pub fn rank(m: &Matrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|row| integer_row(row)).collect();
    bareiss_rank(&mut a)
}

fn integer_row(row: &[Scalar]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Rank of an integer matrix; the matrix is destroyed.
pub fn bareiss_rank(a: &mut [Vec<BigInt>]) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

pub fn determinant(m: &Matrix) -> Scalar {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Scalar::zero();
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
            let f = &a[i][c] * &inv;
            for j in c..n {
                let v = &a[c][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    det
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&i| !a[i][c].is_zero())
            .ok_or(Error::SingularLinearPart)?;
        a.swap(p, c);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * n {
                let v = &a[c][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Indices of a maximal set of linearly independent rows, chosen greedily.
pub fn independent_rows(m: &Matrix) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current: Matrix = Vec::new();
    let mut r = 0;
    for (i, row) in m.iter().enumerate() {
        current.push(row.clone());
        let nr = rank(&current);
        if nr > r {
            chosen.push(i);
            r = nr;
        } else {
            current.pop();
        }
    }
    chosen
}

/// Solves `A x = b` over the jet ring. The constant part of `A` must be
/// invertible; pivots are chosen among entries with nonzero constant term.
pub fn solve_jets(a: &[Vec<Jet>], b: &[Jet]) -> Result<Vec<Jet>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let mut a: Vec<Vec<Jet>> = a.to_vec();
    let mut b: Vec<Jet> = b.to_vec();
    for c in 0..n {
        let p = (c..n)
            .find(|&i| !a[i][c].constant_term().is_zero())
            .ok_or(Error::SingularLinearPart)?;
        a.swap(p, c);
        b.swap(p, c);
        let inv = a[c][c].reciprocal()?;
        for j in c..n {
            a[c][j] = a[c][j].mul_jet(&inv);
        }
        b[c] = b[c].mul_jet(&inv);
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..n {
                let v = a[c][j].mul_jet(&f);
                a[i][j] = a[i][j].sub_jet(&v);
            }
            let v = b[c].mul_jet(&f);
            b[i] = b[i].sub_jet(&v);
        }
    }
    Ok(b)
}

/// Constant parts of a matrix of jets.
pub fn constant_part(a: &[Vec<Jet>]) -> Matrix {
    a.iter()
        .map(|row| row.iter().map(|j| j.constant_term()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{frac, int};
    use crate::space::VariableSpace;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_determinant() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        assert_eq!(determinant(&a), int(0));
        let b = m(&[&[0, 1], &[-1, 0]]);
        assert_eq!(determinant(&b), int(1));
        let mut h = vec![vec![frac(1, 2), frac(1, 3)], vec![frac(1, 3), frac(1, 4)]];
        assert_eq!(rank(&h), 2);
        h[1] = vec![frac(1, 4), frac(1, 6)];
        assert_eq!(rank(&h), 1);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn jet_system() {
        let s = VariableSpace::quasi(0);
        let a = vec![vec![Jet::parse(s, 4, "1 + y").unwrap()]];
        let b = vec![Jet::parse(s, 4, "1").unwrap()];
        let x = solve_jets(&a, &b).unwrap();
        assert_eq!(x[0], Jet::parse(s, 4, "1 - y + y^2 - y^3 + y^4").unwrap());
    }
}
