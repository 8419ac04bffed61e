//! Integer kernels by unimodular column reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Basis of `{x in Z^r : A x = 0}`. The kernel of an integer matrix is
/// saturated, so the basis also spans its rational span inside `Z^r`.
pub fn integer_kernel(rows: &[Vec<BigInt>], r: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|row| row.clone()).collect();
    let mut u: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    // Column j of a matrix m is m[..][j]; u is stored row-major as well.
    let col_op = |m: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, f: &BigInt| {
        for row in m.iter_mut() {
            let v = &row[src] * f;
            row[dst] -= v;
        }
    };
    let swap = |m: &mut Vec<Vec<BigInt>>, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut pivot = 0;
    for i in 0..a.len() {
        if pivot == r {
            break;
        }
        loop {
            // Smallest nonzero entry in row i among columns >= pivot becomes the pivot.
            let best = (pivot..r).filter(|&j| !a[i][j].is_zero()).min_by(|&x, &y| a[i][x].abs().cmp(&a[i][y].abs()));
            let Some(b) = best else { break };
            swap(&mut a, pivot, b);
            swap(&mut u, pivot, b);
            let mut done = true;
            for j in pivot + 1..r {
                if a[i][j].is_zero() {
                    continue;
                }
                let f = a[i][j].div_floor(&a[i][pivot]);
                col_op(&mut a, j, pivot, &f);
                col_op(&mut u, j, pivot, &f);
                if !a[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !a[i][pivot].is_zero() {
            pivot += 1;
        }
    }
    (pivot..r).map(|j| (0..r).map(|k| u[k][j].clone()).collect()).collect()
}
