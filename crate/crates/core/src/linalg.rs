//! Dense exact linear algebra over fields and over the local ring `Q[x]_(x)`.
//!
//! Matrices are row-major `Vec<Vec<_>>`; vectors are plain `Vec<_>`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Field;
use crate::series::LocalSeries;

pub type Matrix<F> = Vec<Vec<F>>;

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref<F: Field>(m: &mut Matrix<F>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv();
        for c in col..ncols {
            let v = m[row][c].clone() * &inv;
            m[row][c] = v;
        }
        for i in 0..m.len() {
            if i == row || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for c in col..ncols {
                let d = f.clone() * &m[row][c];
                m[i][c] -= &d;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>, ncols: usize) -> usize {
    let mut a = m.clone();
    rref(&mut a, ncols).len()
}

/// Basis of `{v : m v = 0}`.
pub fn nullspace<F: Field>(m: &Matrix<F>, ncols: usize) -> Vec<Vec<F>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, ncols);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); ncols];
        v[free] = F::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        out.push(v);
    }
    out
}

/// Canonical basis of the span of `vectors` (nonzero rows of the rref).
pub fn echelon<F: Field>(vectors: &[Vec<F>], dim: usize) -> Vec<Vec<F>> {
    let mut a = vectors.to_vec();
    let r = rref(&mut a, dim).len();
    a.truncate(r);
    a
}

pub fn span_rank<F: Field>(vectors: &[Vec<F>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank(&vectors.to_vec(), dim)
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span<F: Field>(basis: &[Vec<F>], v: &[F], dim: usize) -> bool {
    let r = span_rank(basis, dim);
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    span_rank(&all, dim) == r
}

/// Basis of the intersection of two subspaces given by spanning sets.
pub fn intersect<F: Field>(u: &[Vec<F>], w: &[Vec<F>], dim: usize) -> Vec<Vec<F>> {
    if u.is_empty() || w.is_empty() {
        return Vec::new();
    }
    // a u + b w = 0  ->  a u lies in both
    let cols = u.len() + w.len();
    let mut m: Matrix<F> = vec![vec![F::zero(); cols]; dim];
    for (j, vec) in u.iter().chain(w.iter()).enumerate() {
        for i in 0..dim {
            m[i][j] = vec[i].clone();
        }
    }
    let ker = nullspace(&m, cols);
    let mut out = Vec::new();
    for k in ker {
        let mut v = vec![F::zero(); dim];
        for (j, uj) in u.iter().enumerate() {
            if k[j].is_zero() {
                continue;
            }
            for i in 0..dim {
                let d = uj[i].clone() * &k[j];
                v[i] += &d;
            }
        }
        out.push(v);
    }
    echelon(&out, dim)
}

pub fn mat_vec<F: Field>(m: &Matrix<F>, v: &[F]) -> Vec<F> {
    m.iter()
        .map(|row| {
            let mut acc = F::zero();
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a.clone() * b);
                }
            }
            acc
        })
        .collect()
}

/// Unique solution of `a x = b`; `a` may have more rows than columns.
pub fn solve<F: Field>(a: &Matrix<F>, b: &[F], ncols: usize) -> Result<Vec<F>> {
    let mut aug: Matrix<F> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.contains(&ncols) {
        return Err(Error::NoSolution("inconsistent system".into()));
    }
    if pivots.len() < ncols {
        return Err(Error::NonUniqueSolution(format!("rank {} < {}", pivots.len(), ncols)));
    }
    Ok((0..ncols).map(|r| aug[r][ncols].clone()).collect())
}

pub fn det<F: Field>(m: &Matrix<F>) -> F {
    let n = m.len();
    let mut a = m.clone();
    let mut acc = F::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return F::zero();
        };
        if p != col {
            a.swap(p, col);
            acc = -acc;
        }
        acc = acc * &a[col][col];
        let inv = a[col][col].inv();
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone() * &inv;
            for c in col..n {
                let d = f.clone() * &a[col][c];
                a[i][c] -= &d;
            }
        }
    }
    acc
}

/// Result of diagonalizing a square matrix over the local ring.
#[derive(Clone, Debug)]
pub struct LocalSmith<F> {
    /// `x`-adic valuations of the diagonal entries.
    pub valuations: Vec<usize>,
    /// Column transform evaluated at `x = 0`; column `i` pairs with `valuations[i]`.
    pub v0: Matrix<F>,
}

/// Smith form of `g` over `Q[x]_(x)`, computed modulo `x^modulus`.
///
/// Exact as long as the valuation of `det g` is below `modulus`; the caller
/// supplies a modulus from an independent determinant computation.
pub fn local_smith<F: Field>(g: &Matrix<LocalSeries<F>>, modulus: usize) -> Result<LocalSmith<F>> {
    let n = g.len();
    let mut a: Matrix<LocalSeries<F>> =
        g.iter().map(|r| r.iter().map(|e| e.truncate(modulus)).collect()).collect();
    let mut v0: Matrix<F> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect();
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if let Some(v) = a[i][j].valuation() {
                    if best.map_or(true, |(b, _, _)| v < b) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((d, pi, pj)) = best else {
            return Err(Error::PrecisionExhausted(modulus));
        };
        a.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            for row in v0.iter_mut() {
                row.swap(k, pj);
            }
        }
        let uinv = a[k][k].shift_down(d).inv_unit(modulus);
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let c = (a[i][k].shift_down(d) * &uinv).truncate(modulus);
            for j in k..n {
                let t = c.clone() * &a[k][j];
                a[i][j] = (a[i][j].clone() - t).truncate(modulus);
            }
        }
        for j in k + 1..n {
            if a[k][j].is_zero() {
                continue;
            }
            let c = (a[k][j].shift_down(d) * &uinv).truncate(modulus);
            let c0 = c.coeff(0);
            a[k][j] = LocalSeries::zero().truncate(modulus);
            if !c0.is_zero() {
                for row in v0.iter_mut() {
                    let t = c0.clone() * &row[k];
                    row[j] -= &t;
                }
            }
        }
        vals.push(d);
    }
    Ok(LocalSmith { valuations: vals, v0 })
}

/// Unique solution in `Q[x]_(x)` of `a x = b`, with unit inverses truncated at `cap`.
pub fn solve_local<F: Field>(
    a: &Matrix<LocalSeries<F>>,
    b: &[LocalSeries<F>],
    ncols: usize,
    cap: usize,
) -> Result<Vec<LocalSeries<F>>> {
    let m = a.len();
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut perm: Vec<usize> = (0..ncols).collect();
    for k in 0..ncols {
        let mut best: Option<(usize, usize, usize)> = None;
        let mut inexact_zero = false;
        for i in k..m {
            for j in k..ncols {
                match a[i][j].valuation() {
                    Some(v) => {
                        if best.map_or(true, |(bv, _, _)| v < bv) {
                            best = Some((v, i, j));
                        }
                    }
                    None => inexact_zero |= !a[i][j].is_exact(),
                }
            }
        }
        let Some((d, pi, pj)) = best else {
            if inexact_zero {
                return Err(Error::PrecisionExhausted(cap));
            }
            return Err(Error::NonUniqueSolution(format!("rank {k} < {ncols}")));
        };
        a.swap(k, pi);
        b.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            perm.swap(k, pj);
        }
        let uinv = a[k][k].shift_down(d).inv_unit(cap);
        for i in k + 1..m {
            if a[i][k].is_zero() && a[i][k].is_exact() {
                continue;
            }
            let c = a[i][k].shift_down(d) * &uinv;
            for j in k..ncols {
                let t = c.clone() * &a[k][j];
                a[i][j] -= &t;
            }
            let t = c * &b[k];
            b[i] -= &t;
        }
    }
    for bi in b.iter().skip(ncols) {
        if bi.valuation().is_some() {
            return Err(Error::NoSolution("inconsistent system over the local ring".into()));
        }
    }
    let mut x: Vec<LocalSeries<F>> = vec![LocalSeries::zero(); ncols];
    for k in (0..ncols).rev() {
        let mut r = b[k].clone();
        for j in k + 1..ncols {
            let t = a[k][j].clone() * &x[j];
            r -= &t;
        }
        let d = a[k][k].valuation().unwrap_or(0);
        match r.valuation() {
            Some(v) if v < d => {
                return Err(Error::NoSolution("solution leaves the local ring".into()))
            }
            None if r.precision().is_some_and(|p| p < d) => {
                return Err(Error::PrecisionExhausted(cap))
            }
            _ => {}
        }
        x[k] = r.div_local(&a[k][k], cap).expect("valuations checked");
    }
    let mut out = vec![LocalSeries::zero(); ncols];
    for (k, &p) in perm.iter().enumerate() {
        out[p] = x[k].clone();
    }
    Ok(out)
}

/// [`solve_local`] with the cap doubled on precision exhaustion, up to `max_cap`.
pub fn solve_local_retry<F: Field>(
    a: &Matrix<LocalSeries<F>>,
    b: &[LocalSeries<F>],
    ncols: usize,
    mut cap: usize,
    max_cap: usize,
) -> Result<Vec<LocalSeries<F>>> {
    loop {
        match solve_local(a, b, ncols, cap) {
            Err(Error::PrecisionExhausted(_)) if cap < max_cap => cap *= 2,
            Err(Error::PrecisionExhausted(_)) => {
                return Err(Error::NonUniqueSolution(format!("no unit pivot up to cap {cap}")))
            }
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;
    use num_rational::BigRational as Q;

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        rows.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect()
    }

    #[test]
    fn nullspace_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&a, 3), 1);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&a, v).iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn determinant_and_solve() {
        let a = m(&[&[2, 1], &[1, 3]]);
        assert_eq!(det(&a), qi(5));
        let x = solve(&a, &[qi(3), qi(4)], 2).unwrap();
        assert_eq!(x, vec![qi(1), qi(1)]);
        assert!(matches!(
            solve(&m(&[&[1, 1], &[1, 1]]), &[qi(1), qi(2)], 2),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn intersection_of_planes() {
        let u = m(&[&[1, 0, 0], &[0, 1, 0]]);
        let w = m(&[&[0, 1, 0], &[0, 0, 1]]);
        let i = intersect(&u, &w, 3);
        assert_eq!(i, m(&[&[0, 1, 0]]));
    }

    fn s(c: &[i64]) -> LocalSeries<Q> {
        LocalSeries::exact(c.iter().map(|&v| qi(v)).collect())
    }

    #[test]
    fn smith_over_local_ring() {
        // diag(x, x^2) disguised by unimodular transforms
        let g = vec![vec![s(&[0, 1]), s(&[0, 1])], vec![s(&[0, 1]), s(&[0, 1, 1])]];
        let sm = local_smith(&g, 4).unwrap();
        let mut v = sm.valuations.clone();
        v.sort();
        assert_eq!(v, vec![1, 2]);
    }

    #[test]
    fn local_solve_divides_by_units_only() {
        let a = vec![vec![s(&[1, 1]), s(&[0])], vec![s(&[0]), s(&[0, 1])]];
        let b = vec![s(&[1]), s(&[0, 3])];
        let x = solve_local(&a, &b, 2, 6).unwrap();
        assert_eq!(x[1], s(&[3]));
        assert_eq!(x[0].coeff(0), qi(1));
        assert_eq!(x[0].coeff(1), qi(-1));
        let bad = vec![s(&[1]), s(&[1])];
        assert!(matches!(solve_local(&a, &bad, 2, 6), Err(Error::NoSolution(_))));
    }
}
