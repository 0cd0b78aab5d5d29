//! Exact dense matrix helpers over Z and Q.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{int_rat, rat, Polynomial, Rational};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<Rational>>;

/// Newton interpolation through the points `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Polynomial {
    let n = xs.len();
    let mut coef: Vec<Rational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = Polynomial::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = Polynomial::new(vec![-xs[i].clone(), rat(1)]);
        p = &(&p * &lin) + &Polynomial::constant(coef[i].clone());
    }
    p
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn det_int(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Determinant over Q by Gaussian elimination.
pub fn det_rat(m: &RatMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = rat(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det *= &piv;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    det
}

/// Characteristic polynomial `det(t I - B)` via evaluation and interpolation.
pub fn char_poly_int(b: &IntMatrix) -> Polynomial {
    let n = b.len();
    let xs: Vec<Rational> = (0..=n).map(|i| rat(i as i64)).collect();
    let ys: Vec<Rational> = (0..=n)
        .map(|t| {
            let m: IntMatrix = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let d = if i == j { BigInt::from(t) } else { BigInt::zero() };
                            d - &b[i][j]
                        })
                        .collect()
                })
                .collect();
            int_rat(&det_int(&m))
        })
        .collect();
    interpolate(&xs, &ys)
}

pub fn mat_mul_int(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let inner = b.len();
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_pow_int(a: &IntMatrix, e: usize) -> IntMatrix {
    let n = a.len();
    let mut result: IntMatrix = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect())
        .collect();
    let mut base = a.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul_int(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul_int(&base, &base);
        }
    }
    result
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Inverse over Q, or `None` when singular.
pub fn inverse_rat(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { rat(1) } else { Rational::zero() }));
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(p, k);
        let piv = a[k][k].clone();
        for v in a[k].iter_mut() {
            *v /= &piv;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in 0..2 * n {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec_rat(m: &RatMatrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

pub fn int_to_rat(m: &IntMatrix) -> RatMatrix {
    m.iter().map(|r| r.iter().map(int_rat).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn determinants_agree() {
        let m = im(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(det_int(&m), BigInt::from(6));
        assert_eq!(det_rat(&int_to_rat(&m)), rat(6));
        let s = im(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]);
        assert_eq!(det_int(&s), BigInt::zero());
        let z = im(&[&[0, 1], &[1, 0]]);
        assert_eq!(det_int(&z), BigInt::from(-1));
    }

    #[test]
    fn characteristic_polynomial() {
        let m = im(&[&[2, 1], &[1, 1]]);
        assert_eq!(char_poly_int(&m), Polynomial::from_ints(&[1, -3, 1]));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = int_to_rat(&im(&[&[3, 1], &[-1, 0]]));
        let inv = inverse_rat(&m).unwrap();
        assert_eq!(inv, int_to_rat(&im(&[&[0, -1], &[1, 3]])));
    }

    #[test]
    fn powers() {
        let m = im(&[&[1, 1], &[1, 0]]);
        assert_eq!(mat_pow_int(&m, 10), im(&[&[89, 55], &[55, 34]]));
    }
}
