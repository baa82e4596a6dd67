//! PBW bases of `U(n̂-)` inside a truncation window and straightening.
//!
//! A generator is a basis element `a(-j)` of `n̂-`. Generators are numbered in
//! the PBW order of the chosen [`Ordering`], so a monomial is normal exactly
//! when its generator ids increase. Straightening a product `g · m` of a
//! generator and a normal monomial produces rational coefficients that do not
//! depend on the highest weight, so they are cached once per basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::algebra::{AffineAlgebra, Basis, Elem, Split};
use crate::error::{Error, Result};
use crate::scalar::{q, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub s_max: i64,
    pub h_max: i64,
}

impl Window {
    pub fn new(s_max: i64, h_max: i64) -> Self {
        Window { s_max, h_max }
    }

    pub fn contains(&self, nu: &[i64]) -> bool {
        nu.iter().all(|&c| c >= 0) && nu[0] <= self.s_max && nu.iter().sum::<i64>() <= self.h_max
    }

    /// All weights `ν` of the window, by height then lexicographically.
    pub fn weights(&self, n_simple: usize) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = vec![0i64; n_simple];
        fn rec(w: &Window, i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            let hi = if i == 0 { left.min(w.s_max) } else { left };
            for c in 0..=hi {
                cur[i] = c;
                rec(w, i + 1, left - c, cur, out);
            }
            cur[i] = 0;
        }
        rec(self, 0, self.h_max, &mut cur, &mut out);
        out.sort_by(|a, b| (a.iter().sum::<i64>(), a).cmp(&(b.iter().sum::<i64>(), b)));
        out
    }
}

/// Which N-block comes first in the generator order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ordering {
    /// `N+-`, then `H-`, then `N--`.
    Plus,
    /// `N--`, then `H-`, then `N+-`.
    Minus,
}

#[derive(Clone, Debug)]
pub struct Gen {
    pub base: usize,
    /// The generator is `base(-j)`.
    pub j: i64,
    pub nu: Vec<i64>,
    pub odd: bool,
    pub split: Split,
}

impl Gen {
    pub fn basis(&self) -> Basis {
        Basis::Loop(self.base, -self.j)
    }
}

/// Normal-ordered monomial: `(generator id, exponent)` with increasing ids.
pub type Mono = SmallVec<[(u16, u16); 4]>;

/// Sparse linear combination of monomials, all of one weight.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedVector<R> {
    pub terms: BTreeMap<Mono, R>,
}

impl<R: Scalar> Default for GradedVector<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Scalar> GradedVector<R> {
    pub fn zero() -> Self {
        GradedVector { terms: BTreeMap::new() }
    }

    /// The vacuum `1 · v_λ`.
    pub fn unit() -> Self {
        Self::from_mono(Mono::new(), R::one())
    }

    pub fn from_mono(m: Mono, c: R) -> Self {
        let mut v = Self::zero();
        v.add_term(m, c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &R) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v.clone() * c);
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v.clone());
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c);
        }
        out
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&R) -> S) -> GradedVector<S> {
        let mut out = GradedVector::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), f(v));
        }
        out
    }

    /// Coordinates in a given ordered basis; terms outside it are dropped.
    pub fn coords(&self, basis: &[Mono]) -> Vec<R> {
        basis.iter().map(|m| self.coeff(m)).collect()
    }

    pub fn from_coords(basis: &[Mono], coords: &[R]) -> Self {
        let mut v = Self::zero();
        for (m, c) in basis.iter().zip(coords) {
            v.add_term(m.clone(), c.clone());
        }
        v
    }
}

type Cached = Arc<Vec<(Mono, Q)>>;

pub struct PbwBasis {
    pub alg: Arc<AffineAlgebra>,
    pub window: Window,
    pub ordering: Ordering,
    pub gens: Vec<Gen>,
    index: HashMap<Basis, u16>,
    memo: RwLock<HashMap<(u16, Mono), Cached>>,
    bases: RwLock<HashMap<Vec<i64>, Arc<Vec<Mono>>>>,
}

impl std::fmt::Debug for PbwBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PbwBasis")
            .field("algebra", &self.alg.name())
            .field("window", &self.window)
            .field("ordering", &self.ordering)
            .field("generators", &self.gens.len())
            .finish()
    }
}

fn block(ordering: Ordering, s: Split) -> u8 {
    match (ordering, s) {
        (_, Split::HLow) => 1,
        (Ordering::Plus, Split::NPlusLow) | (Ordering::Minus, Split::NMinusLow) => 0,
        _ => 2,
    }
}

impl PbwBasis {
    pub fn new(alg: Arc<AffineAlgebra>, window: Window, ordering: Ordering) -> Self {
        let mut gens = Vec::new();
        for j in 0..=window.s_max {
            for a in 0..alg.base.dim() {
                let b = Basis::Loop(a, -j);
                let split = alg.split(b);
                if !split.is_lowering() {
                    continue;
                }
                let nu: Vec<i64> = alg.weight(b).iter().map(|c| -c).collect();
                if window.contains(&nu) {
                    gens.push(Gen { base: a, j, nu, odd: alg.base.parity[a], split });
                }
            }
        }
        gens.sort_by_key(|g| (block(ordering, g.split), g.j, g.base));
        let index = gens.iter().enumerate().map(|(i, g)| (g.basis(), i as u16)).collect();
        PbwBasis {
            alg,
            window,
            ordering,
            gens,
            index,
            memo: RwLock::new(HashMap::new()),
            bases: RwLock::new(HashMap::new()),
        }
    }

    pub fn gen_id(&self, b: Basis) -> Option<u16> {
        self.index.get(&b).copied()
    }

    pub fn n_simple(&self) -> usize {
        self.alg.n_simple()
    }

    pub fn mono_weight(&self, m: &Mono) -> Vec<i64> {
        let mut nu = vec![0; self.n_simple()];
        for &(g, e) in m {
            for (s, c) in nu.iter_mut().zip(&self.gens[g as usize].nu) {
                *s += c * e as i64;
            }
        }
        nu
    }

    pub fn mono_is_odd(&self, m: &Mono) -> bool {
        m.iter().filter(|&&(g, e)| self.gens[g as usize].odd && e % 2 == 1).count() % 2 == 1
    }

    /// Number of factors counted with multiplicity.
    pub fn mono_len(m: &Mono) -> usize {
        m.iter().map(|&(_, e)| e as usize).sum()
    }

    /// Whether every factor lies in `H-`.
    pub fn mono_is_cartan(&self, m: &Mono) -> bool {
        m.iter().all(|&(g, _)| self.gens[g as usize].split == Split::HLow)
    }

    pub fn mono_to_string(&self, m: &Mono) -> String {
        if m.is_empty() {
            return "1".into();
        }
        let mut s = String::new();
        for (i, &(g, e)) in m.iter().enumerate() {
            if i > 0 {
                s.push('.');
            }
            let gen = &self.gens[g as usize];
            let _ = write!(s, "{}({})", self.alg.base.labels[gen.base], -gen.j);
            if e > 1 {
                let _ = write!(s, "^{e}");
            }
        }
        s
    }

    /// Factors of a monomial as `(basis element, exponent)`.
    pub fn mono_factors(&self, m: &Mono) -> Vec<(Basis, u16)> {
        m.iter().map(|&(g, e)| (self.gens[g as usize].basis(), e)).collect()
    }

    /// `g · m` in normal form, for a generator `g` and a normal monomial `m`.
    pub fn insert(&self, g: u16, m: &Mono) -> Cached {
        let key = (g, m.clone());
        if let Some(hit) = self.memo.read().expect("memo lock").get(&key) {
            return hit.clone();
        }
        let out = Arc::new(self.insert_uncached(g, m));
        self.memo.write().expect("memo lock").insert(key, out.clone());
        out
    }

    fn insert_uncached(&self, g: u16, m: &Mono) -> Vec<(Mono, Q)> {
        let Some(&(g1, a)) = m.first() else {
            return vec![(smallvec![(g, 1)], Q::one())];
        };
        if g < g1 {
            let mut out: Mono = smallvec![(g, 1)];
            out.extend(m.iter().copied());
            return vec![(out, Q::one())];
        }
        let gen = &self.gens[g as usize];
        let mut acc: BTreeMap<Mono, Q> = BTreeMap::new();
        let push = |acc: &mut BTreeMap<Mono, Q>, mono: Mono, c: Q| {
            let e = acc.entry(mono).or_insert_with(Q::zero);
            *e += c;
        };
        let mut rest = m.clone();
        if a == 1 {
            rest.remove(0);
        } else {
            rest[0].1 -= 1;
        }
        if g == g1 {
            if !gen.odd {
                let mut out = m.clone();
                out[0].1 += 1;
                return vec![(out, Q::one())];
            }
            // g g = [g, g] / 2 for odd g
            let br = self.alg.bracket(gen.basis(), gen.basis());
            for (b, c) in br {
                let id = self.gen_id(b).expect("bracket stays in the window");
                for (mono, c2) in self.insert(id, &rest).iter() {
                    push(&mut acc, mono.clone(), &c * c2 * q(1, 2));
                }
            }
        } else {
            let g1gen = &self.gens[g1 as usize];
            let sign = if gen.odd && g1gen.odd { -Q::one() } else { Q::one() };
            for (mono, c) in self.insert(g, &rest).iter() {
                for (mono2, c2) in self.insert(g1, mono).iter() {
                    push(&mut acc, mono2.clone(), &sign * c * c2);
                }
            }
            for (b, c) in self.alg.bracket(gen.basis(), g1gen.basis()) {
                let id = self.gen_id(b).expect("bracket stays in the window");
                for (mono, c2) in self.insert(id, &rest).iter() {
                    push(&mut acc, mono.clone(), &c * c2);
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Left multiplication by a generator.
    pub fn lower<R: Scalar>(&self, g: u16, v: &GradedVector<R>) -> GradedVector<R> {
        let mut out = GradedVector::zero();
        for (m, c) in &v.terms {
            for (m2, c2) in self.insert(g, m).iter() {
                out.add_term(m2.clone(), c.scale(c2));
            }
        }
        out
    }

    /// Left multiplication by an element of `n̂-`.
    pub fn lower_elem<R: Scalar>(&self, e: &Elem, v: &GradedVector<R>) -> Result<GradedVector<R>> {
        let mut out = GradedVector::zero();
        for (b, c) in e {
            let id = self.gen_id(*b).ok_or_else(|| Error::WindowExceeded(self.alg.weight(*b)))?;
            out.add_scaled(&self.lower(id, v), &R::from_rational(c));
        }
        Ok(out)
    }

    /// Normal form of an ordered product of generators with exponents.
    pub fn straighten(&self, product: &[(Basis, u32)]) -> Result<GradedVector<Q>> {
        let mut nu = vec![0; self.n_simple()];
        let mut ids = Vec::new();
        for &(b, e) in product {
            let id = self.gen_id(b).ok_or_else(|| Error::WindowExceeded(self.alg.weight(b)))?;
            for (s, c) in nu.iter_mut().zip(&self.gens[id as usize].nu) {
                *s += c * e as i64;
            }
            ids.push((id, e));
        }
        if !self.window.contains(&nu) {
            return Err(Error::WindowExceeded(nu));
        }
        let mut v = GradedVector::unit();
        for &(id, e) in ids.iter().rev() {
            for _ in 0..e {
                v = self.lower(id, &v);
            }
        }
        Ok(v)
    }

    /// PBW monomials of weight `ν`, in a fixed deterministic order.
    pub fn weight_basis(&self, nu: &[i64]) -> Result<Arc<Vec<Mono>>> {
        if !self.window.contains(nu) {
            return Err(Error::WindowExceeded(nu.to_vec()));
        }
        if let Some(hit) = self.bases.read().expect("basis lock").get(nu) {
            return Ok(hit.clone());
        }
        let candidates: Vec<u16> = (0..self.gens.len() as u16)
            .filter(|&g| self.gens[g as usize].nu.iter().zip(nu).all(|(a, b)| a <= b))
            .collect();
        let mut out = Vec::new();
        let mut cur = Mono::new();
        self.enumerate(&candidates, 0, nu.to_vec(), &mut cur, &mut out);
        out.sort();
        let arc = Arc::new(out);
        self.bases.write().expect("basis lock").insert(nu.to_vec(), arc.clone());
        Ok(arc)
    }

    fn enumerate(&self, cands: &[u16], start: usize, left: Vec<i64>, cur: &mut Mono, out: &mut Vec<Mono>) {
        if left.iter().all(|&c| c == 0) {
            out.push(cur.clone());
            return;
        }
        for (k, &g) in cands.iter().enumerate().skip(start) {
            let gen = &self.gens[g as usize];
            let max_e = if gen.odd { 1 } else { u16::MAX };
            let mut rem = left.clone();
            let mut e = 0u16;
            loop {
                for (r, c) in rem.iter_mut().zip(&gen.nu) {
                    *r -= c;
                }
                if rem.iter().any(|&c| c < 0) || e == max_e {
                    break;
                }
                e += 1;
                cur.push((g, e));
                self.enumerate(cands, k + 1, rem.clone(), cur, out);
                cur.pop();
            }
        }
    }

    /// Re-expresses a vector written in `from`'s basis in this basis.
    pub fn reorder<R: Scalar>(&self, from: &PbwBasis, v: &GradedVector<R>) -> Result<GradedVector<R>> {
        let mut out = GradedVector::zero();
        for (m, c) in &v.terms {
            let mut acc = GradedVector::<Q>::unit();
            for (b, e) in from.mono_factors(m).into_iter().rev() {
                let id = self.gen_id(b).ok_or_else(|| Error::WindowExceeded(self.alg.weight(b)))?;
                for _ in 0..e {
                    acc = self.lower(id, &acc);
                }
            }
            for (m2, c2) in acc.terms {
                out.add_term(m2, c.scale(&c2));
            }
        }
        Ok(out)
    }

    pub fn cache_size(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::affine_from_catalog;
    use crate::scalar::qi;

    fn basis(name: &str, s: i64, h: i64, o: Ordering) -> PbwBasis {
        PbwBasis::new(Arc::new(affine_from_catalog(name).unwrap()), Window::new(s, h), o)
    }

    #[test]
    fn partition_counts_sl2() {
        let b = basis("sl2", 3, 6, Ordering::Plus);
        assert_eq!(b.weight_basis(&[0, 0]).unwrap().len(), 1);
        assert_eq!(b.weight_basis(&[1, 1]).unwrap().len(), 2);
        assert_eq!(b.weight_basis(&[2, 2]).unwrap().len(), 6);
        assert_eq!(b.weight_basis(&[3, 3]).unwrap().len(), 14);
        assert!(b.weight_basis(&[4, 0]).is_err());
    }

    #[test]
    fn ordered_monomial_is_fixed() {
        let b = basis("sl2", 3, 6, Ordering::Plus);
        let h1 = Basis::Loop(0, -1);
        let h2 = Basis::Loop(0, -2);
        let v = b.straighten(&[(h1, 1), (h2, 1)]).unwrap();
        let w = b.straighten(&[(h2, 1), (h1, 1)]).unwrap();
        assert_eq!(v, w);
        assert_eq!(v.len(), 1);
        let f = Basis::Loop(b.alg.base.chevalley[0].1, 0);
        let ff = b.straighten(&[(f, 2)]).unwrap();
        assert_eq!(ff.len(), 1);
        assert_eq!(b.mono_to_string(ff.terms.keys().next().unwrap()), "f(0)^2");
    }

    #[test]
    fn mixed_swap_has_two_terms() {
        // f(0) e(-1) in the plus order: e(-1) f(0) - h(-1)
        let b = basis("sl2", 1, 2, Ordering::Plus);
        let (e, f) = b.alg.base.chevalley[0];
        let v = b.straighten(&[(Basis::Loop(f, 0), 1), (Basis::Loop(e, -1), 1)]).unwrap();
        assert_eq!(v.len(), 2);
        let h = b.gen_id(Basis::Loop(0, -1)).unwrap();
        assert_eq!(v.coeff(&smallvec![(h, 1)]), qi(-1));
    }

    #[test]
    fn odd_square_is_half_bracket() {
        let b = basis("sl(2|1)", 2, 6, Ordering::Plus);
        let odd = b.gens.iter().find(|g| g.odd && g.j == 0).unwrap().basis();
        let v = b.straighten(&[(odd, 2)]).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn window_weights_are_down_closed() {
        let w = Window::new(2, 5);
        let all = w.weights(2);
        assert!(all.iter().all(|nu| w.contains(nu)));
        assert!(all.contains(&vec![2, 3]));
        assert!(!all.contains(&vec![3, 0]));
    }
}
