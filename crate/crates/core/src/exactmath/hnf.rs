//! Row-style Hermite normal form with a unimodular transform.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Result of reducing generator rows `G` (r x k): `h = u * G`, `u` unimodular.
/// The first `rank` rows of `h` are in echelon form with positive pivots
/// and entries above each pivot reduced into `[0, pivot)`; the rest are zero.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
    if f.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (l, r) = m.split_at_mut(src);
        (&mut l[dst], &r[0])
    } else {
        let (l, r) = m.split_at_mut(dst);
        (&mut r[0], &l[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= f * y;
        }
    }
}

pub fn hnf(g: &IntMatrix) -> Hnf {
    let r = g.len();
    let k = g.first().map_or(0, |row| row.len());
    let mut h = g.clone();
    let mut u: IntMatrix = (0..r)
        .map(|i| (0..r).map(|j| BigInt::from((i == j) as u8)).collect())
        .collect();
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        if row == r {
            break;
        }
        loop {
            let best = (row..r)
                .filter(|&i| !h[i][col].is_zero())
                .min_by(|&a, &b| h[a][col].abs().cmp(&h[b][col].abs()));
            let Some(best) = best else { break };
            h.swap(row, best);
            u.swap(row, best);
            let mut done = true;
            for i in row + 1..r {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = h[i][col].div_floor(&h[row][col]);
                row_axpy(&mut h, i, row, &q);
                row_axpy(&mut u, i, row, &q);
                if !h[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[row][col].is_zero() {
            continue;
        }
        if h[row][col].is_negative() {
            for v in h[row].iter_mut() {
                *v = -&*v;
            }
            for v in u[row].iter_mut() {
                *v = -&*v;
            }
        }
        for i in 0..row {
            let q = h[i][col].div_floor(&h[row][col]);
            row_axpy(&mut h, i, row, &q);
            row_axpy(&mut u, i, row, &q);
        }
        pivots.push(col);
        row += 1;
    }
    Hnf {
        h,
        u,
        rank: row,
        pivots,
    }
}

/// Gcd of all entries of a matrix slice (0 for an all-zero input).
pub fn content(rows: &[Vec<BigInt>]) -> BigInt {
    let mut g = BigInt::zero();
    for r in rows {
        for v in r {
            g = g.gcd(v);
            if g.is_one() {
                return g;
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::matrix::mat_mul_int;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn reduces_and_tracks_transform() {
        let g = im(&[&[4, 6], &[6, 9], &[2, 5]]);
        let res = hnf(&g);
        assert_eq!(res.rank, 2);
        assert_eq!(mat_mul_int(&res.u, &g), res.h);
        assert_eq!(res.h[0][0], BigInt::from(2));
        assert_eq!(res.h[1][0], BigInt::zero());
        assert!(res.h[2].iter().all(|v| v.is_zero()));
    }
}
