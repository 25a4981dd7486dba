//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::scalar::Rational;

/// Affine solution set `particular + span(kernel)` of `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
}

/// Solves `rows · x = rhs`; `None` when inconsistent.
pub fn solve(rows: &[Vec<Rational>], rhs: &[Rational], n: usize) -> Option<Solution> {
    let mut a: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let d = &a[row][c] * &f;
                    a[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if a[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut particular = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = a[r][n].clone();
    }
    let kernel = (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::from_integer(1.into());
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -a[r][free].clone();
            }
            v
        })
        .collect();
    Some(Solution { particular, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn unique_and_free() {
        let s = solve(&[vec![int(1), int(1)], vec![int(1), int(-1)]], &[int(3), int(1)], 2).unwrap();
        assert_eq!(s.particular, vec![int(2), int(1)]);
        assert!(s.kernel.is_empty());
        let s = solve(&[vec![int(1), int(-1)]], &[int(1)], 2).unwrap();
        assert_eq!(s.particular, vec![int(1), int(0)]);
        assert_eq!(s.kernel, vec![vec![int(1), int(1)]]);
        let s = solve(&[vec![int(2), int(0)]], &[int(1)], 2).unwrap();
        assert_eq!(s.particular[0], rat(1, 2));
    }

    #[test]
    fn inconsistent() {
        assert!(solve(&[vec![int(1)], vec![int(2)]], &[int(1), int(1)], 1).is_none());
        assert!(solve(&[vec![int(0)]], &[int(1)], 1).is_none());
    }
}
