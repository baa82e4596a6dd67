//! Non-twisted affinizations `g ⊗ C[t, t^-1] ⊕ CK ⊕ CD`.
//!
//! Affine roots are integer vectors in simple-root coordinates
//! `[c_0, c_1, .., c_r]`; `c_0` is the `D`-degree. Elements of `ĥ*` are stored
//! as their values on the basis `[h_1, .., h_r, K, D]`.

use std::collections::BTreeMap;

use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::finite::FiniteSuperAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{solve, Matrix};
use crate::pbw::Window;
use crate::scalar::{q, qi, Scalar};

/// Basis of the affine algebra: `a(m)` for a base index `a`, the central `K`
/// and the derivation `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Loop(usize, i64),
    K,
    D,
}

/// Finite linear combination of basis elements.
pub type Elem = BTreeMap<Basis, Q>;

pub fn elem_add(e: &mut Elem, b: Basis, c: &Q) {
    if c.is_zero() {
        return;
    }
    let entry = e.entry(b).or_insert_with(Q::zero);
    *entry += c;
    if entry.is_zero() {
        e.remove(&b);
    }
}

pub fn single(b: Basis) -> Elem {
    let mut e = Elem::new();
    e.insert(b, Q::one());
    e
}

/// Position of a basis element relative to the triangular and N/H splits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Split {
    /// `x t^-m`, `x` in `n+`, `m > 0`.
    NPlusLow,
    /// `h t^-m`, `m > 0`.
    HLow,
    /// `x t^-m`, `x` in `n-`, `m >= 0`.
    NMinusLow,
    /// `x t^m`, `x` in `n+`, `m >= 0`.
    NPlus,
    /// `h t^m`, `m > 0`.
    H,
    /// `x t^m`, `x` in `n-`, `m > 0`.
    NMinus,
    /// `h t^0`, `K`, `D`.
    Cartan,
}

impl Split {
    pub fn is_lowering(self) -> bool {
        matches!(self, Split::NPlusLow | Split::HLow | Split::NMinusLow)
    }
    pub fn is_raising(self) -> bool {
        matches!(self, Split::NPlus | Split::H | Split::NMinus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootKind {
    Real,
    Imaginary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootInfo {
    pub coords: Vec<i64>,
    pub kind: RootKind,
    pub odd: bool,
    pub mult: usize,
}

/// Weight in `ĥ*`, stored as values on `[h_1, .., h_r, K, D]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight<R> {
    pub values: Vec<R>,
}

impl<R: Scalar> Weight<R> {
    pub fn new(finite: Vec<R>, level: R, d: R) -> Self {
        let mut values = finite;
        values.push(level);
        values.push(d);
        Weight { values }
    }

    pub fn rank(&self) -> usize {
        self.values.len() - 2
    }

    pub fn level(&self) -> &R {
        &self.values[self.rank()]
    }

    pub fn d_value(&self) -> &R {
        &self.values[self.rank() + 1]
    }

    pub fn finite(&self) -> &[R] {
        &self.values[..self.rank()]
    }

    pub fn embed<S: Scalar>(&self, f: impl Fn(&R) -> S) -> Weight<S> {
        Weight { values: self.values.iter().map(f).collect() }
    }
}

impl Weight<Q> {
    pub fn add(&self, other: &Self) -> Self {
        Weight { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn scaled(&self, c: &Q) -> Self {
        Weight { values: self.values.iter().map(|a| a * c).collect() }
    }
}

/// `λ + x ξ` over a ring containing `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformedWeight {
    pub base: Weight<Q>,
    pub direction: Weight<Q>,
}

impl DeformedWeight {
    /// Realizes the coordinates in a ring `R`, given the image of `x`.
    pub fn realize<R: Scalar>(&self, x: &R) -> Weight<R> {
        Weight {
            values: self
                .base
                .values
                .iter()
                .zip(&self.direction.values)
                .map(|(b, d)| R::from_rational(b) + x.scale(d))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AffineAlgebra {
    pub base: FiniteSuperAlgebra,
    /// Form on `ĥ` in the basis `[h.., K, D]` and its inverse.
    pub cartan_form: Matrix<Q>,
    pub cartan_form_inv: Matrix<Q>,
    pub rho: Weight<Q>,
    pub dual_coxeter: Q,
}

impl AffineAlgebra {
    pub fn rank(&self) -> usize {
        self.base.rank
    }

    /// Number of simple roots, `rank + 1`.
    pub fn n_simple(&self) -> usize {
        self.base.rank + 1
    }

    pub fn name(&self) -> String {
        format!("{}^", self.base.name)
    }

    pub fn parity(&self, b: Basis) -> bool {
        match b {
            Basis::Loop(a, _) => self.base.parity[a],
            _ => false,
        }
    }

    pub fn label(&self, b: Basis) -> String {
        match b {
            Basis::Loop(a, m) => format!("{}({})", self.base.labels[a], m),
            Basis::K => "K".into(),
            Basis::D => "D".into(),
        }
    }

    pub fn bracket(&self, x: Basis, y: Basis) -> Elem {
        let mut out = Elem::new();
        match (x, y) {
            (Basis::Loop(a, m), Basis::Loop(b, k)) => {
                for (c, v) in self.base.bracket(a, b) {
                    elem_add(&mut out, Basis::Loop(*c, m + k), v);
                }
                if m + k == 0 && m != 0 {
                    elem_add(&mut out, Basis::K, &(qi(m) * &self.base.form[a][b]));
                }
            }
            (Basis::D, Basis::Loop(a, m)) => elem_add(&mut out, Basis::Loop(a, m), &qi(m)),
            (Basis::Loop(a, m), Basis::D) => elem_add(&mut out, Basis::Loop(a, m), &qi(-m)),
            _ => {}
        }
        out
    }

    pub fn bracket_elems(&self, x: &Elem, y: &Elem) -> Elem {
        let mut out = Elem::new();
        for (bx, cx) in x {
            for (by, cy) in y {
                let c = cx * cy;
                for (b, v) in self.bracket(*bx, *by) {
                    elem_add(&mut out, b, &(&c * &v));
                }
            }
        }
        out
    }

    pub fn form(&self, x: Basis, y: Basis) -> Q {
        match (x, y) {
            (Basis::Loop(a, m), Basis::Loop(b, n)) if m + n == 0 => self.base.form[a][b].clone(),
            (Basis::K, Basis::D) | (Basis::D, Basis::K) => Q::one(),
            _ => Q::zero(),
        }
    }

    pub fn form_elems(&self, x: &Elem, y: &Elem) -> Q {
        let mut s = Q::zero();
        for (bx, cx) in x {
            for (by, cy) in y {
                let f = self.form(*bx, *by);
                if !f.is_zero() {
                    s += cx * cy * f;
                }
            }
        }
        s
    }

    /// Exhaustive super-Jacobi and form invariance over loop modes `|m| <= m_max`.
    pub fn validate(&self, m_max: i64) -> Result<()> {
        let basis = self.basis_up_to(m_max);
        let sub = |a: &mut Elem, b: &Elem, c: &Q| {
            for (k, v) in b {
                elem_add(a, *k, &-(c * v));
            }
        };
        let brackets: Vec<Vec<Elem>> =
            basis.iter().map(|&x| basis.iter().map(|&y| self.bracket(x, y)).collect()).collect();
        for (i, &x) in basis.iter().enumerate() {
            let ex = single(x);
            for (j, &y) in basis.iter().enumerate() {
                let ey = single(y);
                let xy = &brackets[i][j];
                let s = if self.parity(x) && self.parity(y) { qi(-1) } else { qi(1) };
                for (k, &z) in basis.iter().enumerate() {
                    let ez = single(z);
                    let mut diff = self.bracket_elems(&ex, &brackets[j][k]);
                    sub(&mut diff, &self.bracket_elems(xy, &ez), &Q::one());
                    sub(&mut diff, &self.bracket_elems(&ey, &brackets[i][k]), &s);
                    if !diff.is_empty() {
                        return Err(Error::ValidationFailure(format!(
                            "Jacobi fails for ({}, {}, {})",
                            self.label(x),
                            self.label(y),
                            self.label(z)
                        )));
                    }
                    if self.form_elems(xy, &ez) != self.form_elems(&ex, &brackets[j][k]) {
                        return Err(Error::ValidationFailure(format!(
                            "form not invariant for ({}, {}, {})",
                            self.label(x),
                            self.label(y),
                            self.label(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn delta(&self) -> Vec<i64> {
        let mut d = vec![1];
        d.extend(self.base.theta.iter().copied());
        d
    }

    pub fn height(nu: &[i64]) -> i64 {
        nu.iter().sum()
    }

    /// Affine root of `a(m)` in simple-root coordinates; zero for `K`, `D`
    /// and Cartan elements at degree 0.
    pub fn weight(&self, b: Basis) -> Vec<i64> {
        match b {
            Basis::Loop(a, m) => {
                let mut v = vec![m];
                for (i, t) in self.base.theta.iter().enumerate() {
                    v.push(self.base.roots[a][i] + m * t);
                }
                v
            }
            _ => vec![0; self.n_simple()],
        }
    }

    /// Inverse of [`Self::weight`] on loop elements: `(finite root, degree)`.
    pub fn split_root(&self, nu: &[i64]) -> (Vec<i64>, i64) {
        let m = nu[0];
        let beta = self.base.theta.iter().enumerate().map(|(i, t)| nu[i + 1] - m * t).collect();
        (beta, m)
    }

    /// Values of the functional `ν` on `[h.., K, D]`.
    pub fn root_functional(&self, nu: &[i64]) -> Vec<Q> {
        let r = self.rank();
        let sv = &self.base.simple_values;
        let mut out = vec![Q::zero(); r + 2];
        for (k, slot) in out.iter_mut().enumerate().take(r) {
            let mut s = Q::zero();
            for i in 0..r {
                let c = nu[i + 1] - nu[0] * self.base.theta[i];
                if c != 0 {
                    s += qi(c) * &sv[i][k];
                }
            }
            *slot = s;
        }
        out[r + 1] = qi(nu[0]);
        out
    }

    /// `(λ, μ)` for `μ` with rational values.
    pub fn pair<R: Scalar>(&self, lam: &[R], mu: &[Q]) -> R {
        let n = mu.len();
        let mut acc = R::zero();
        for i in 0..n {
            let mut c = Q::zero();
            for j in 0..n {
                if !mu[j].is_zero() {
                    c += &self.cartan_form_inv[i][j] * &mu[j];
                }
            }
            if !c.is_zero() {
                acc += &lam[i].scale(&c);
            }
        }
        acc
    }

    pub fn root_pair(&self, a: &[i64], b: &[i64]) -> Q {
        self.pair(&self.root_functional(a), &self.root_functional(b))
    }

    pub fn critical_level(&self) -> Q {
        -self.dual_coxeter.clone()
    }

    pub fn simple_root(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.n_simple()];
        v[i] = 1;
        v
    }

    /// Positive roots inside the window, with multiplicities.
    pub fn positive_roots(&self, w: &Window) -> Vec<RootInfo> {
        let mut out = Vec::new();
        for m in 0..=w.s_max {
            for a in 0..self.base.dim() {
                if self.base.is_cartan(a) || (m == 0 && !self.base.is_positive(a)) {
                    continue;
                }
                let nu = self.weight(Basis::Loop(a, m));
                if w.contains(&nu) {
                    out.push(RootInfo {
                        coords: nu,
                        kind: RootKind::Real,
                        odd: self.base.parity[a],
                        mult: 1,
                    });
                }
            }
            if m > 0 {
                let nu: Vec<i64> = self.delta().iter().map(|c| c * m).collect();
                if w.contains(&nu) {
                    out.push(RootInfo { coords: nu, kind: RootKind::Imaginary, odd: false, mult: self.rank() });
                }
            }
        }
        out.sort_by(|a, b| (Self::height(&a.coords), &a.coords).cmp(&(Self::height(&b.coords), &b.coords)));
        out
    }

    pub fn classify_root(&self, nu: &[i64]) -> Result<RootKind> {
        if nu.len() != self.n_simple() || nu.iter().all(|&c| c == 0) {
            return Err(Error::NotARoot(nu.to_vec()));
        }
        let (beta, m) = self.split_root(nu);
        if beta.iter().all(|&c| c == 0) {
            if m < 0 {
                return Err(Error::NotARoot(nu.to_vec()));
            }
            return Ok(RootKind::Imaginary);
        }
        let positive = m > 0 || beta.iter().sum::<i64>() > 0;
        if positive && (0..self.base.dim()).any(|a| !self.base.is_cartan(a) && self.base.roots[a] == beta) {
            return Ok(RootKind::Real);
        }
        Err(Error::NotARoot(nu.to_vec()))
    }

    /// The anti-involution induced by matrix transpose.
    pub fn sigma(&self, b: Basis) -> Basis {
        match b {
            Basis::Loop(a, m) => Basis::Loop(self.base.transpose[a], -m),
            other => other,
        }
    }

    pub fn sigma_elem(&self, e: &Elem) -> Elem {
        e.iter().map(|(b, c)| (self.sigma(*b), c.clone())).collect()
    }

    pub fn split(&self, b: Basis) -> Split {
        match b {
            Basis::K | Basis::D => Split::Cartan,
            Basis::Loop(a, m) => {
                let g = &self.base;
                if g.is_cartan(a) {
                    match m.cmp(&0) {
                        std::cmp::Ordering::Less => Split::HLow,
                        std::cmp::Ordering::Equal => Split::Cartan,
                        std::cmp::Ordering::Greater => Split::H,
                    }
                } else if g.is_positive(a) {
                    if m < 0 {
                        Split::NPlusLow
                    } else {
                        Split::NPlus
                    }
                } else if m <= 0 {
                    Split::NMinusLow
                } else {
                    Split::NMinus
                }
            }
        }
    }

    /// Chevalley raising generators `e_0, .., e_r`.
    pub fn chevalley_raising(&self) -> Vec<Basis> {
        let mut v = vec![Basis::Loop(self.base.f_theta, 1)];
        v.extend(self.base.chevalley.iter().map(|&(e, _)| Basis::Loop(e, 0)));
        v
    }

    /// Chevalley lowering generators `f_0, .., f_r`.
    pub fn chevalley_lowering(&self) -> Vec<Basis> {
        let mut v = vec![Basis::Loop(self.base.e_theta, -1)];
        v.extend(self.base.chevalley.iter().map(|&(_, f)| Basis::Loop(f, 0)));
        v
    }

    /// All loop basis elements with `|m| <= m_max`, plus `K` and `D`.
    pub fn basis_up_to(&self, m_max: i64) -> Vec<Basis> {
        let mut v = Vec::new();
        for m in -m_max..=m_max {
            for a in 0..self.base.dim() {
                v.push(Basis::Loop(a, m));
            }
        }
        v.push(Basis::K);
        v.push(Basis::D);
        v
    }

    /// The weight `ξ = Λ_0`: value 1 on `K`, 0 elsewhere.
    pub fn lambda0(&self) -> Weight<Q> {
        Weight::new(vec![Q::zero(); self.rank()], Q::one(), Q::zero())
    }
}

pub fn affinize(base: FiniteSuperAlgebra) -> AffineAlgebra {
    let r = base.rank;
    let mut g = vec![vec![Q::zero(); r + 2]; r + 2];
    for i in 0..r {
        for j in 0..r {
            g[i][j] = base.form[i][j].clone();
        }
    }
    g[r][r + 1] = Q::one();
    g[r + 1][r] = Q::one();
    let ginv = invert(&g);
    let mut alg = AffineAlgebra {
        base,
        cartan_form: g,
        cartan_form_inv: ginv,
        rho: Weight { values: vec![] },
        dual_coxeter: Q::zero(),
    };
    // (ρ̂, α_i) = ½(α_i, α_i) for all simple roots, ρ̂(D) = 0
    let n = r + 2;
    let mut rows: Matrix<Q> = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..=r {
        let a = alg.root_functional(&alg.simple_root(i));
        let row: Vec<Q> = (0..n)
            .map(|k| {
                let mut c = Q::zero();
                for j in 0..n {
                    c += &alg.cartan_form_inv[k][j] * &a[j];
                }
                c
            })
            .collect();
        rows.push(row);
        rhs.push(alg.pair(&a, &a) * q(1, 2));
    }
    let mut last = vec![Q::zero(); n];
    last[r + 1] = Q::one();
    rows.push(last);
    rhs.push(Q::zero());
    let rho = solve(&rows, &rhs, n).expect("simple roots are independent");
    alg.dual_coxeter = rho[r].clone();
    alg.rho = Weight { values: rho };
    alg
}

/// Inverse of a symmetric matrix (columns double as rows).
fn invert(m: &Matrix<Q>) -> Matrix<Q> {
    let n = m.len();
    (0..n)
        .map(|j| {
            let mut e = vec![Q::zero(); n];
            e[j] = Q::one();
            solve(m, &e, n).expect("form is nondegenerate")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_from_catalog;

    fn aff(name: &str) -> AffineAlgebra {
        affinize(build_from_catalog(name).unwrap())
    }

    #[test]
    fn dual_coxeter_numbers() {
        assert_eq!(aff("sl2").dual_coxeter, qi(2));
        assert_eq!(aff("sl3").dual_coxeter, qi(3));
        assert_eq!(aff("sl(2|1)").dual_coxeter, qi(1));
    }

    #[test]
    fn loop_brackets() {
        let g = aff("sl2");
        let (e, f) = g.base.chevalley[0];
        let ef = g.bracket(Basis::Loop(e, 1), Basis::Loop(f, -1));
        let mut want = single(Basis::Loop(0, 0));
        want.insert(Basis::K, qi(1));
        assert_eq!(ef, want);
        assert_eq!(g.bracket(Basis::Loop(0, 2), Basis::Loop(0, -2)), {
            let mut k = Elem::new();
            k.insert(Basis::K, qi(4));
            k
        });
        for b in g.basis_up_to(2) {
            assert!(g.bracket(Basis::K, b).is_empty());
        }
    }

    #[test]
    fn affine_tables_validate() {
        for name in ["sl2", "sl(2|1)"] {
            aff(name).validate(2).unwrap();
        }
    }

    #[test]
    fn root_classification() {
        let g = aff("sl2");
        assert_eq!(g.classify_root(&[1, 1]).unwrap(), RootKind::Imaginary);
        assert_eq!(g.classify_root(&[0, 1]).unwrap(), RootKind::Real);
        assert_eq!(g.classify_root(&[1, 0]).unwrap(), RootKind::Real);
        assert_eq!(g.root_pair(&[1, 0], &[1, 0]), qi(2));
        assert!(g.classify_root(&[0, 2]).is_err());
    }

    #[test]
    fn sigma_swaps_chevalley_generators() {
        let g = aff("sl3");
        for (e, f) in g.chevalley_raising().into_iter().zip(g.chevalley_lowering()) {
            assert_eq!(g.sigma(e), f);
            assert_eq!(g.sigma(g.sigma(e)), e);
        }
        assert_eq!(g.sigma(Basis::K), Basis::K);
    }

    #[test]
    fn delta_pairs_to_level() {
        let g = aff("sl(2|1)");
        let d = g.root_functional(&g.delta());
        let lam = Weight::new(vec![qi(3), qi(5)], qi(7), qi(0));
        assert_eq!(g.pair(&lam.values, &d), qi(7));
        assert!(g.root_pair(&g.delta(), &g.delta()).is_zero());
    }
}
