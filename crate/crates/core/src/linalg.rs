//! Small exact linear algebra over the scalar field.

use crate::coeff::Scalar;
use crate::Error;

pub type Matrix = Vec<Vec<Scalar>>;

/// Matrix-vector product.
pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Scalar::zero(v[0].nvars()), |acc, (a, b)| &acc + &(a * b))
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let nv = a[0][0].nvars();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..k).fold(Scalar::zero(nv), |acc, l| &acc + &(&a[i][l] * &b[l][j]))
                })
                .collect()
        })
        .collect()
}

pub fn identity(r: usize, nvars: usize) -> Matrix {
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    if i == j {
                        Scalar::one(nvars)
                    } else {
                        Scalar::zero(nvars)
                    }
                })
                .collect()
        })
        .collect()
}

/// Solves A x = b by Gaussian elimination with exact pivoting.
///
/// Accepts an overdetermined consistent system; errors with `Degenerate`
/// when the solution is not unique or the system is inconsistent.
pub fn solve(a: &Matrix, b: &[Scalar]) -> Result<Vec<Scalar>, Error> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    assert_eq!(rows, b.len());
    let nv = b.first().map(|s| s.nvars()).unwrap_or(0);
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].inverse()?;
        for v in m[pivot_row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=cols {
                    let sub = &m[pivot_row][c] * &f;
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    if pivots.len() < cols {
        return Err(Error::Degenerate);
    }
    // consistency of any remaining rows
    for r in pivot_row..rows {
        if !m[r][cols].is_zero() {
            return Err(Error::Degenerate);
        }
    }
    let mut x = vec![Scalar::zero(nv); cols];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = m[row][cols].clone();
    }
    Ok(x)
}

/// Matrix inverse over the scalar field.
pub fn invert(a: &Matrix) -> Result<Matrix, Error> {
    let r = a.len();
    let nv = a[0][0].nvars();
    let mut cols = Vec::with_capacity(r);
    for j in 0..r {
        let e: Vec<Scalar> = (0..r)
            .map(|i| {
                if i == j {
                    Scalar::one(nv)
                } else {
                    Scalar::zero(nv)
                }
            })
            .collect();
        cols.push(solve(a, &e)?);
    }
    // cols[j] is the j-th column of the inverse
    Ok((0..r)
        .map(|i| (0..r).map(|j| cols[j][i].clone()).collect())
        .collect())
}

/// Determinant by fraction-free expansion (ranks here are tiny).
pub fn det(a: &Matrix) -> Scalar {
    let r = a.len();
    let nv = a[0][0].nvars();
    if r == 1 {
        return a[0][0].clone();
    }
    let mut acc = Scalar::zero(nv);
    for j in 0..r {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Matrix = (1..r)
            .map(|i| {
                (0..r)
                    .filter(|&c| c != j)
                    .map(|c| a[i][c].clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * &det(&minor);
        if j % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}
