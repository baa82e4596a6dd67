//! Finite-dimensional base superalgebras built from their matrix realizations.

use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{det, Matrix};
use crate::scalar::qi;

/// Sparse vector in the algebra basis, sorted by index, no zero entries.
pub type SparseVec = Vec<(usize, Q)>;

pub(crate) fn sparse_add(acc: &mut SparseVec, idx: usize, c: &Q) {
    if c.is_zero() {
        return;
    }
    match acc.binary_search_by_key(&idx, |(i, _)| *i) {
        Ok(pos) => {
            acc[pos].1 += c;
            if acc[pos].1.is_zero() {
                acc.remove(pos);
            }
        }
        Err(pos) => acc.insert(pos, (idx, c.clone())),
    }
}

#[derive(Clone, Debug)]
pub struct FiniteSuperAlgebra {
    pub name: String,
    pub labels: Vec<String>,
    pub parity: Vec<bool>,
    /// The Cartan subalgebra is spanned by basis indices `0..rank`.
    pub rank: usize,
    bracket: Vec<Vec<SparseVec>>,
    pub form: Matrix<Q>,
    /// Root of each basis vector in simple-root coordinates (zero on the Cartan).
    pub roots: Vec<Vec<i64>>,
    /// `simple_values[i][k] = alpha_i(h_k)`.
    pub simple_values: Matrix<Q>,
    pub chevalley: Vec<(usize, usize)>,
    /// Basis permutation realizing the matrix transpose.
    pub transpose: Vec<usize>,
    pub theta: Vec<i64>,
    pub e_theta: usize,
    pub f_theta: usize,
}

type Mat = Vec<Vec<Q>>;

fn zero_mat(n: usize) -> Mat {
    vec![vec![Q::zero(); n]; n]
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = zero_mat(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    c[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    c
}

impl FiniteSuperAlgebra {
    /// `sl(m|n)` in its defining realization with the distinguished Borel.
    /// `parities[i]` is the parity of the i-th standard basis vector.
    fn from_matrices(name: &str, parities: &[bool]) -> Result<Self> {
        let n = parities.len();
        let rank = n - 1;
        let mut mats: Vec<Mat> = Vec::new();
        let mut labels = Vec::new();
        let mut parity = Vec::new();
        let mut roots = Vec::new();
        let mut positions: Vec<Option<(usize, usize)>> = Vec::new();
        for i in 0..rank {
            let mut m = zero_mat(n);
            m[i][i] = qi(1);
            let s = if parities[i] != parities[i + 1] { 1 } else { -1 };
            m[i + 1][i + 1] = qi(s);
            mats.push(m);
            labels.push(if rank == 1 { "h".to_string() } else { format!("h{}", i + 1) });
            parity.push(false);
            roots.push(vec![0; rank]);
            positions.push(None);
        }
        for sign in [1i64, -1] {
            for d in 1..n {
                for i in 0..n - d {
                    let j = i + d;
                    let (r, c) = if sign > 0 { (i, j) } else { (j, i) };
                    let mut m = zero_mat(n);
                    m[r][c] = qi(1);
                    mats.push(m);
                    let letter = if sign > 0 { "e" } else { "f" };
                    labels.push(if rank == 1 {
                        letter.to_string()
                    } else if d == 1 {
                        format!("{letter}{}", i + 1)
                    } else {
                        format!("{letter}{}{}", i + 1, j + 1)
                    });
                    parity.push(parities[r] != parities[c]);
                    let mut root = vec![0; rank];
                    for slot in root.iter_mut().take(j).skip(i) {
                        *slot = sign;
                    }
                    roots.push(root);
                    positions.push(Some((r, c)));
                }
            }
        }
        let dim = mats.len();
        let find = |r: usize, c: usize| positions.iter().position(|p| *p == Some((r, c))).unwrap();

        let decompose = |m: &Mat| -> Result<SparseVec> {
            let mut out = SparseVec::new();
            for r in 0..n {
                for c in 0..n {
                    if r != c && !m[r][c].is_zero() {
                        sparse_add(&mut out, find(r, c), &m[r][c]);
                    }
                }
            }
            // diagonal: h_i has +1 at i and s_i at i+1
            let mut carry = Q::zero();
            for i in 0..rank {
                let ci = &m[i][i] - &carry;
                let s = &mats[i][i + 1][i + 1];
                carry = s * &ci;
                sparse_add(&mut out, i, &ci);
            }
            if m[rank][rank] != carry {
                return Err(Error::ValidationFailure("matrix is not supertraceless".into()));
            }
            Ok(out)
        };

        let mut bracket = vec![vec![SparseVec::new(); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                let ab = mat_mul(&mats[a], &mats[b]);
                let ba = mat_mul(&mats[b], &mats[a]);
                let s = if parity[a] && parity[b] { qi(1) } else { qi(-1) };
                let mut c = ab;
                for r in 0..n {
                    for k in 0..n {
                        c[r][k] += &s * &ba[r][k];
                    }
                }
                bracket[a][b] = decompose(&c)?;
            }
        }
        let mut form = vec![vec![Q::zero(); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                let ab = mat_mul(&mats[a], &mats[b]);
                let mut s = Q::zero();
                for (i, row) in ab.iter().enumerate() {
                    if parities[i] {
                        s -= &row[i];
                    } else {
                        s += &row[i];
                    }
                }
                form[a][b] = s;
            }
        }
        let simple_values = (0..rank)
            .map(|i| (0..rank).map(|k| &mats[k][i][i] - &mats[k][i + 1][i + 1]).collect())
            .collect();
        let chevalley = (0..rank).map(|i| (find(i, i + 1), find(i + 1, i))).collect();
        let transpose = (0..dim)
            .map(|a| match positions[a] {
                None => a,
                Some((r, c)) => find(c, r),
            })
            .collect();
        let alg = FiniteSuperAlgebra {
            name: name.to_string(),
            labels,
            parity,
            rank,
            bracket,
            form,
            roots,
            simple_values,
            chevalley,
            transpose,
            theta: vec![1; rank],
            e_theta: find(0, n - 1),
            f_theta: find(n - 1, 0),
        };
        alg.validate()?;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn bracket(&self, a: usize, b: usize) -> &SparseVec {
        &self.bracket[a][b]
    }

    pub fn is_cartan(&self, a: usize) -> bool {
        a < self.rank
    }

    pub fn is_positive(&self, a: usize) -> bool {
        self.roots[a].iter().sum::<i64>() > 0
    }

    pub fn is_negative(&self, a: usize) -> bool {
        self.roots[a].iter().sum::<i64>() < 0
    }

    pub fn odd_count(&self) -> usize {
        self.parity.iter().filter(|&&p| p).count()
    }

    pub fn bracket_sparse(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, ca) in x {
            for (b, cb) in y {
                let c = ca * cb;
                for (k, ck) in &self.bracket[*a][*b] {
                    sparse_add(&mut out, *k, &(&c * ck));
                }
            }
        }
        out
    }

    pub fn form_sparse(&self, x: &SparseVec, y: &SparseVec) -> Q {
        let mut s = Q::zero();
        for (a, ca) in x {
            for (b, cb) in y {
                if !self.form[*a][*b].is_zero() {
                    s += ca * cb * &self.form[*a][*b];
                }
            }
        }
        s
    }

    fn basis_vec(&self, a: usize) -> SparseVec {
        vec![(a, Q::one())]
    }

    /// Exhaustive super-Jacobi, super-antisymmetry, form invariance and
    /// normalization checks.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let fail = |msg: String| Err(Error::ValidationFailure(msg));
        for a in 0..dim {
            for b in 0..dim {
                let mut sum = self.bracket[a][b].clone();
                let s = if self.parity[a] && self.parity[b] { qi(-1) } else { qi(1) };
                for (k, c) in &self.bracket[b][a] {
                    sparse_add(&mut sum, *k, &(&s * c));
                }
                if !sum.is_empty() {
                    return fail(format!("antisymmetry fails for ({a},{b})"));
                }
                let fs = if self.parity[a] && self.parity[b] { qi(-1) } else { qi(1) };
                if self.form[a][b] != &fs * &self.form[b][a] {
                    return fail(format!("form not supersymmetric at ({a},{b})"));
                }
                if self.parity[a] != self.parity[b] && !self.form[a][b].is_zero() {
                    return fail(format!("form not even at ({a},{b})"));
                }
            }
        }
        for x in 0..dim {
            for y in 0..dim {
                let xy = self.bracket[x][y].clone();
                for z in 0..dim {
                    let lhs = self.bracket_sparse(&self.basis_vec(x), &self.bracket[y][z]);
                    let r1 = self.bracket_sparse(&xy, &self.basis_vec(z));
                    let r2 = self.bracket_sparse(&self.basis_vec(y), &self.bracket[x][z]);
                    let s = if self.parity[x] && self.parity[y] { qi(-1) } else { qi(1) };
                    let mut diff = lhs;
                    for (k, c) in r1 {
                        sparse_add(&mut diff, k, &-c);
                    }
                    for (k, c) in r2 {
                        sparse_add(&mut diff, k, &-(&s * &c));
                    }
                    if !diff.is_empty() {
                        return fail(format!("Jacobi fails for ({x},{y},{z})"));
                    }
                    let l = self.form_sparse(&xy, &self.basis_vec(z));
                    let r = self.form_sparse(&self.basis_vec(x), &self.bracket[y][z]);
                    if l != r {
                        return fail(format!("form not invariant for ({x},{y},{z})"));
                    }
                }
            }
        }
        for (i, &(e, f)) in self.chevalley.iter().enumerate() {
            let ef = &self.bracket[e][f];
            let norm = &self.form[e][f];
            for k in 0..self.rank {
                let lhs = self.form_sparse(&self.basis_vec(k), ef);
                if lhs != norm * &self.simple_values[i][k] {
                    return fail(format!("(e_{i}|f_{i}) normalization"));
                }
            }
        }
        if det(&self.form).is_zero() {
            return fail("form is degenerate".into());
        }
        Ok(())
    }

    /// Catalog entry as a JSON document; rationals are `[num, den]` pairs.
    pub fn to_json(&self) -> Value {
        let pair = |q: &Q| json!([q.numer().to_string(), q.denom().to_string()]);
        let mut structure = Vec::new();
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                if self.bracket[a][b].is_empty() {
                    continue;
                }
                let terms: Vec<Value> = self.bracket[a][b]
                    .iter()
                    .map(|(k, c)| json!([k, c.numer().to_string(), c.denom().to_string()]))
                    .collect();
                structure.push(json!([a, b, terms]));
            }
        }
        let mut form = Vec::new();
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                if !self.form[a][b].is_zero() {
                    form.push(json!([a, b, pair(&self.form[a][b])]));
                }
            }
        }
        json!({
            "name": self.name,
            "dim": self.dim(),
            "labels": self.labels,
            "parities": self.parity.iter().map(|&p| p as u8).collect::<Vec<_>>(),
            "structure": structure,
            "form": form,
        })
    }
}

pub const CATALOG: [&str; 3] = ["sl2", "sl3", "sl(2|1)"];

pub fn build_from_catalog(name: &str) -> Result<FiniteSuperAlgebra> {
    match name {
        "sl2" => FiniteSuperAlgebra::from_matrices(name, &[false, false]),
        "sl3" => FiniteSuperAlgebra::from_matrices(name, &[false, false, false]),
        "sl(2|1)" | "sl21" => FiniteSuperAlgebra::from_matrices("sl(2|1)", &[false, false, true]),
        other => Err(Error::UnknownAlgebra(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_dimensions() {
        let sl2 = build_from_catalog("sl2").unwrap();
        assert_eq!((sl2.dim(), sl2.rank, sl2.chevalley.len()), (3, 1, 1));
        let sl3 = build_from_catalog("sl3").unwrap();
        assert_eq!((sl3.dim(), sl3.chevalley.len()), (8, 2));
        let s21 = build_from_catalog("sl(2|1)").unwrap();
        assert_eq!((s21.dim(), s21.odd_count()), (8, 4));
        assert!(matches!(build_from_catalog("e8"), Err(Error::UnknownAlgebra(_))));
    }

    #[test]
    fn supertrace_form_on_cartan() {
        let s21 = build_from_catalog("sl(2|1)").unwrap();
        assert_eq!(s21.form[0][0], qi(2));
        assert_eq!(s21.form[0][1], qi(-1));
        assert_eq!(s21.form[1][1], qi(0));
    }

    #[test]
    fn corrupt_table_is_rejected() {
        let mut sl2 = build_from_catalog("sl2").unwrap();
        let (e, f) = sl2.chevalley[0];
        sl2.bracket[e][f] = vec![(0, qi(2))];
        sl2.bracket[f][e] = vec![(0, qi(-2))];
        assert!(matches!(sl2.validate(), Err(Error::ValidationFailure(_))));
    }
}
