//! Symmetric Toeplitz systems `T x = b`, `T[i][j] = t[|i − j|]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Above this condition estimate a solve is refused.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Reflection coefficients this close to ±1 hand the system to the dense solver.
const REFLECTION_LIMIT: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSolution {
    pub x: Vec<f64>,
    /// Cheap estimate of the 2-norm condition number.
    pub condition: f64,
    /// `‖T x − b‖₂ / ‖b‖₂` (zero when `b` is zero).
    pub residual: f64,
}

/// Solves a symmetric Toeplitz system by Levinson recursion.
///
/// `column` is the first column of `T`. When a reflection coefficient reaches
/// magnitude `1 − 1e−10` the recursion is abandoned for Gaussian elimination
/// with partial pivoting.
///
/// The condition estimate is a Gershgorin bound on the largest eigenvalue over
/// the final prediction error (Levinson) or the smallest pivot (dense).
pub fn solve_symmetric(column: &[f64], rhs: &[f64]) -> Result<ToeplitzSolution> {
    let n = column.len();
    if n == 0 || rhs.len() != n {
        return Err(Error::Shape(format!(
            "toeplitz column has {} entries, rhs has {}",
            n,
            rhs.len()
        )));
    }
    if column.iter().chain(rhs).any(|v| !v.is_finite()) {
        return Err(Error::Range("toeplitz system has non-finite entries".into()));
    }
    let lambda_max = column[0].abs() + 2.0 * column[1..].iter().map(|v| v.abs()).sum::<f64>();
    if lambda_max == 0.0 {
        return Err(Error::IllConditioned(f64::INFINITY));
    }

    let (x, lambda_min) = match levinson(column, rhs) {
        Some(found) => found,
        None => dense_solve(column, rhs)?,
    };
    let condition = if lambda_min > 0.0 { lambda_max / lambda_min } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned(condition));
    }
    let residual = residual(column, &x, rhs);
    Ok(ToeplitzSolution { x, condition, residual })
}

/// Returns the solution and the final prediction error, or `None` when the
/// recursion hits a near-unit reflection coefficient.
fn levinson(column: &[f64], rhs: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = column.len();
    let t0 = column[0];
    if t0 <= 0.0 {
        return None;
    }
    let r: Vec<f64> = column[1..].iter().map(|v| v / t0).collect();
    let b: Vec<f64> = rhs.iter().map(|v| v / t0).collect();

    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    x[0] = b[0];
    if n == 1 {
        return Some((x, t0));
    }
    y[0] = -r[0];
    let mut alpha = -r[0];
    let mut beta = 1.0;
    for k in 1..n {
        if alpha.abs() >= REFLECTION_LIMIT {
            return None;
        }
        beta *= 1.0 - alpha * alpha;
        if !(beta > 0.0) {
            return None;
        }
        let dot: f64 = (0..k).map(|j| r[j] * x[k - 1 - j]).sum();
        let mu = (b[k] - dot) / beta;
        for j in 0..k {
            scratch[j] = x[j] + mu * y[k - 1 - j];
        }
        x[..k].copy_from_slice(&scratch[..k]);
        x[k] = mu;
        if k < n - 1 {
            let dot: f64 = (0..k).map(|j| r[j] * y[k - 1 - j]).sum();
            alpha = -(r[k] + dot) / beta;
            for j in 0..k {
                scratch[j] = y[j] + alpha * y[k - 1 - j];
            }
            y[..k].copy_from_slice(&scratch[..k]);
            y[k] = alpha;
        }
    }
    if !x.iter().all(|v| v.is_finite()) {
        return None;
    }
    Some((x, beta * t0))
}

fn dense_solve(column: &[f64], rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = column.len();
    let mut a: Vec<f64> = (0..n * n)
        .map(|idx| column[(idx / n).abs_diff(idx % n)])
        .collect();
    let mut b = rhs.to_vec();
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        let pivot = a[pivot_row * n + col];
        if pivot == 0.0 {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        min_pivot = min_pivot.min(pivot.abs());
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Ok((x, min_pivot))
}

/// Symmetric Toeplitz matrix–vector product.
pub(crate) fn multiply(column: &[f64], x: &[f64]) -> Vec<f64> {
    let n = column.len();
    (0..n)
        .map(|i| (0..n).map(|j| column[i.abs_diff(j)] * x[j]).sum())
        .collect()
}

fn residual(column: &[f64], x: &[f64], rhs: &[f64]) -> f64 {
    let tx = multiply(column, x);
    let diff: Vec<f64> = tx.iter().zip(rhs).map(|(a, b)| a - b).collect();
    let norm_b = math::norm2(rhs);
    if norm_b == 0.0 {
        math::norm2(&diff)
    } else {
        math::norm2(&diff) / norm_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_system() {
        let s = solve_symmetric(&[2.0, 0.0, 0.0], &[2.0, 4.0, -6.0]).unwrap();
        assert_eq!(s.x, vec![1.0, 2.0, -3.0]);
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn tridiagonal_matches_hand_solution() {
        // [[2,1,0],[1,2,1],[0,1,2]] x = [3,4,3] → x = [1,1,1]
        let s = solve_symmetric(&[2.0, 1.0, 0.0], &[3.0, 4.0, 3.0]).unwrap();
        for v in &s.x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(s.residual < 1e-15);
    }

    #[test]
    fn indefinite_system_falls_back_to_dense() {
        // Leading 1×1 block is zero, so Levinson cannot start.
        let s = solve_symmetric(&[0.0, 1.0], &[2.0, 3.0]).unwrap();
        assert!((s.x[0] - 3.0).abs() < 1e-14 && (s.x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_systems_are_refused() {
        assert!(matches!(solve_symmetric(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]), Err(Error::IllConditioned(_))));
        assert!(matches!(solve_symmetric(&[0.0, 0.0], &[1.0, 1.0]), Err(Error::IllConditioned(_))));
        assert!(matches!(solve_symmetric(&[1.0], &[1.0, 2.0]), Err(Error::Shape(_))));
    }
}
