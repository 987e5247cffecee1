//! Small dense linear algebra on row-major square matrices.
//!
//! Matrices here are at most `(n + 2) x (n + 2)` for data dimension `n`, so a
//! plain partially pivoted LU is all that is needed.

use crate::scalar::Real;

/// LU factorisation `P A = L U` with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
    parity: bool,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &[T], n: usize) -> Self {
        assert_eq!(a.len(), n * n, "matrix must be n x n");
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = false;
        let mut singular = false;
        for col in 0..n {
            let mut piv = col;
            let mut best = lu[col * n + col].abs();
            for row in col + 1..n {
                let v = lu[row * n + col].abs();
                if v > best {
                    best = v;
                    piv = row;
                }
            }
            if best == T::zero() {
                singular = true;
                continue;
            }
            if piv != col {
                for j in 0..n {
                    lu.swap(col * n + j, piv * n + j);
                }
                perm.swap(col, piv);
                parity = !parity;
            }
            let d = lu[col * n + col];
            for row in col + 1..n {
                let f = lu[row * n + col] / d;
                lu[row * n + col] = f;
                if f != T::zero() {
                    for j in col + 1..n {
                        let u = lu[col * n + j];
                        lu[row * n + j] -= f * u;
                    }
                }
            }
        }
        Lu {
            n,
            lu,
            perm,
            parity,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> T {
        if self.singular {
            return T::zero();
        }
        let mut d = if self.parity { -T::one() } else { T::one() };
        for i in 0..self.n {
            d *= self.lu[i * self.n + i];
        }
        d
    }

    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        if self.singular {
            return None;
        }
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        Some(x)
    }

    /// Row-major inverse.
    pub fn inverse(&self) -> Option<Vec<T>> {
        let n = self.n;
        let mut inv = vec![T::zero(); n * n];
        let mut e = vec![T::zero(); n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[c] = T::one();
            let col = self.solve(&e)?;
            for r in 0..n {
                inv[r * n + c] = col[r];
            }
        }
        Some(inv)
    }
}

pub fn det<T: Real>(a: &[T], n: usize) -> T {
    Lu::new(a, n).det()
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1<T: Real>(a: &[T], n: usize) -> T {
    (0..n)
        .map(|c| (0..n).map(|r| a[r * n + c].abs()).sum::<T>())
        .fold(T::zero(), T::max)
}

/// 1-norm condition number; infinite when the matrix is singular.
pub fn cond1<T: Real>(a: &[T], n: usize) -> T {
    match Lu::new(a, n).inverse() {
        Some(inv) => {
            let c = norm1(a, n) * norm1(&inv, n);
            if c.is_finite() {
                c
            } else {
                T::infinity()
            }
        }
        None => T::infinity(),
    }
}

/// `y = A x` for a row-major `rows x cols` matrix.
pub fn mat_vec<T: Real>(a: &[T], rows: usize, cols: usize, x: &[T]) -> Vec<T> {
    (0..rows)
        .map(|r| {
            a[r * cols..(r + 1) * cols]
                .iter()
                .zip(x)
                .map(|(&m, &v)| m * v)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_3x3() {
        let a: [f64; 9] = [2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let x = Lu::new(&a, 3).solve(&[8.0, -11.0, -3.0]).unwrap();
        for (got, want) in x.iter().zip([2.0, 3.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn determinant_with_pivoting() {
        let a: [f64; 4] = [0.0, 1.0, 1.0, 0.0];
        assert_eq!(det(&a, 2), -1.0);
        let b: [f64; 9] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0];
        assert!((det(&b, 3) - -3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_detected() {
        let a: [f64; 4] = [1.0, 2.0, 2.0, 4.0];
        let lu = Lu::new(&a, 2);
        assert!(lu.is_singular() || lu.det().abs() < 1e-15);
        assert!(cond1(&[1.0_f64, 0.0, 0.0, 0.0], 2).is_infinite());
    }

    #[test]
    fn inverse_roundtrip() {
        let a: [f64; 4] = [4.0, 7.0, 2.0, 6.0];
        let inv = Lu::new(&a, 2).inverse().unwrap();
        let id = [
            a[0] * inv[0] + a[1] * inv[2],
            a[0] * inv[1] + a[1] * inv[3],
            a[2] * inv[0] + a[3] * inv[2],
            a[2] * inv[1] + a[3] * inv[3],
        ];
        for (g, w) in id.iter().zip([1.0, 0.0, 0.0, 1.0]) {
            assert!((g - w).abs() < 1e-12);
        }
    }
}
