//! Exact rational arithmetic for the small constants that feed positivity
//! margins: Gaussian elimination with partial pivoting over `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Shorthand used throughout the kernel catalog.
pub type Rat = BigRational;

/// `p/q` as an exact rational.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as an exact rational.
pub fn int(p: i64) -> Rat {
    Rat::from(BigInt::from(p))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(x: &Rat) -> f64 {
    // BigRational has no direct conversion; go through a scaled quotient.
    let num = x.numer();
    let den = x.denom();
    let scale = BigInt::from(1u64 << 60);
    let q = (num * &scale) / den;
    let qf = q.to_string().parse::<f64>().unwrap_or(f64::NAN);
    qf / (1u64 << 60) as f64
}

/// Solves `A x = b` exactly by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is singular.
pub fn solve_exact(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().cmp(&m[j][col].abs()))?;
        if m[pivot][col].is_zero() {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &m[col][col];
            let (pivot_rows, rest) = m.split_at_mut(row);
            let pivot_row = &pivot_rows[col];
            for (entry, pivot) in rest[0].iter_mut().zip(pivot_row).skip(col) {
                let sub = &factor * pivot;
                *entry -= sub;
            }
        }
    }

    let mut x = vec![Rat::zero(); n];
    for row in (0..n).rev() {
        let mut s = m[row][n].clone();
        for (coef, value) in m[row].iter().zip(&x).skip(row + 1) {
            s -= coef * value;
        }
        x[row] = s / &m[row][row];
    }
    Some(x)
}

/// Determinant by exact elimination; used to certify the moment matrices
/// are invertible.
pub fn det_exact(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a.to_vec();
    let mut det = Rat::from(BigInt::from(1));
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Rat::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= m[col][col].clone();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &m[col][col];
            let (pivot_rows, rest) = m.split_at_mut(row);
            let pivot_row = &pivot_rows[col];
            for (entry, pivot) in rest[0].iter_mut().zip(pivot_row).skip(col) {
                let sub = &factor * pivot;
                *entry -= sub;
            }
        }
    }
    det
}
