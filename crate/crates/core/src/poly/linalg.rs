//! Exact dense linear algebra over the Gaussian rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use super::polynomial::Polynomial;

pub type Matrix = Vec<Vec<GaussianRational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &(&f * pv);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Basis of the right nullspace `{v : m v = 0}`, one vector per free column,
/// each with a 1 in its free column (so the basis is itself in echelon form).
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<GaussianRational>> {
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![GaussianRational::zero(); cols];
            v[f] = GaussianRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&work[row][f];
            }
            v
        })
        .collect()
}

/// Gaussian integer as `(re, im)`.
type Gint = (BigInt, BigInt);

fn gmul(a: &Gint, b: &Gint) -> Gint {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn gsub(a: &Gint, b: &Gint) -> Gint {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn gzero(a: &Gint) -> bool {
    a.0.is_zero() && a.1.is_zero()
}

fn gdiv_exact(a: &Gint, b: &Gint) -> Option<Gint> {
    let norm = &b.0 * &b.0 + &b.1 * &b.1;
    let (re, im) = gmul(a, &(b.0.clone(), -&b.1));
    let (q_re, r_re) = re.div_rem(&norm);
    let (q_im, r_im) = im.div_rem(&norm);
    (r_re.is_zero() && r_im.is_zero()).then_some((q_re, q_im))
}

/// Row scaled to Gaussian integers.
fn integer_row(row: &[GaussianRational]) -> Vec<Gint> {
    let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denominator_lcm()));
    let scale = BigRational::from_integer(l);
    row.iter()
        .map(|v| {
            let re = &v.re * &scale;
            let im = &v.im * &scale;
            (re.to_integer(), im.to_integer())
        })
        .collect()
}

/// Same result as [`nullspace`], computed by fraction-free Gauss-Jordan
/// elimination over the Gaussian integers. Much faster when the entries are
/// large, since no gcd is taken until the end.
pub fn nullspace_fraction_free(m: &Matrix, cols: usize) -> Vec<Vec<GaussianRational>> {
    let mut a: Vec<Vec<Gint>> = m.iter().map(|r| integer_row(r)).collect();
    let rows = a.len();
    let mut prev: Gint = (BigInt::one(), BigInt::zero());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !gzero(&a[i][c])) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            for (j, v) in row.iter_mut().enumerate() {
                let num = gsub(&gmul(&pivot, v), &gmul(&f, &pivot_row[j]));
                match gdiv_exact(&num, &prev) {
                    Some(q) => *v = q,
                    None => return nullspace(m, cols),
                }
            }
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    let d = GaussianRational::new(
        BigRational::from_integer(prev.0.clone()),
        BigRational::from_integer(prev.1.clone()),
    );
    let d_inv = match d.inv() {
        Ok(v) => v,
        Err(_) => return nullspace(m, cols),
    };
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![GaussianRational::zero(); cols];
            v[f] = GaussianRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                let e = &a[row][f];
                let g = GaussianRational::new(
                    BigRational::from_integer(e.0.clone()),
                    BigRational::from_integer(e.1.clone()),
                );
                v[pc] = -&(&g * &d_inv);
            }
            v
        })
        .collect()
}

/// Symbolic determinant by cofactor expansion; intended for small `n`.
pub fn poly_determinant(m: &[Vec<Polynomial>], num_vars: usize) -> Polynomial {
    let n = m.len();
    match n {
        0 => Polynomial::one(num_vars),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Polynomial::zero(num_vars);
            for (j, entry) in m[0].iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = entry * &poly_determinant(&minor, num_vars);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: i64) -> GaussianRational {
        GaussianRational::from_int(v)
    }

    #[test]
    fn rank_and_nullspace() {
        let m = vec![vec![g(1), g(2), g(3)], vec![g(2), g(4), g(6)]];
        assert_eq!(rank(&m), 1);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot: GaussianRational = m[0]
                .iter()
                .zip(v)
                .fold(GaussianRational::zero(), |a, (x, y)| &a + &(x * y));
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn fraction_free_nullspace_agrees() {
        let q = |a, b| GaussianRational::from_parts(a, b, 1, 3);
        let m = vec![
            vec![q(1, 2), g(2), g(3), q(5, 7)],
            vec![g(2), g(4), q(-3, 5), g(1)],
            vec![q(3, 2), g(6), q(12, 5), q(12, 7)],
        ];
        assert_eq!(nullspace_fraction_free(&m, 4), nullspace(&m, 4));
        let z = vec![vec![g(0), g(0)], vec![g(0), g(1)]];
        assert_eq!(nullspace_fraction_free(&z, 2), nullspace(&z, 2));
    }

    #[test]
    fn determinant_of_triangular() {
        let x = |i| Polynomial::var(2, i);
        let z = Polynomial::zero(2);
        let m = vec![vec![x(0), x(1)], vec![z, x(1)]];
        assert_eq!(poly_determinant(&m, 2), &x(0) * &x(1));
    }
}
