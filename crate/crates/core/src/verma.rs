//! Verma modules `M(λ) ≅ U(n̂-) v_λ` inside a truncation window.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{AffineAlgebra, Basis, Elem, RootKind, Split, Weight};
use crate::error::{Error, Result};
use crate::linalg::{echelon, nullspace, Matrix};
use crate::pbw::{GradedVector, Mono, Ordering, PbwBasis, Window};
use crate::scalar::{qi, Scalar};

/// Monomial of `𝒮 = U(H-)`: sorted `(Cartan index, j, exponent)` for `h(-j)`.
pub type SMono = Vec<(usize, i64, u16)>;
/// Element of `𝒮`.
pub type SElem<R> = BTreeMap<SMono, R>;

pub fn s_mono_degree(m: &SMono) -> i64 {
    m.iter().map(|&(_, j, e)| j * e as i64).sum()
}

pub fn s_mono_parts(m: &SMono) -> usize {
    m.iter().map(|&(_, _, e)| e as usize).sum()
}

pub fn s_mono_mul(a: &SMono, b: &SMono) -> SMono {
    let mut map: BTreeMap<(i64, usize), u16> = BTreeMap::new();
    for &(k, j, e) in a.iter().chain(b) {
        *map.entry((j, k)).or_default() += e;
    }
    let mut out: SMono = map.into_iter().map(|((j, k), e)| (k, j, e)).collect();
    out.sort_by_key(|&(k, j, _)| (j, k));
    out
}

pub fn s_mul<R: Scalar>(a: &SElem<R>, b: &SElem<R>) -> SElem<R> {
    let mut out = SElem::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = s_mono_mul(ma, mb);
            let e = out.entry(m).or_insert_with(R::zero);
            *e += &(ca.clone() * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn s_to_string(alg: &AffineAlgebra, m: &SMono) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter()
        .map(|&(k, j, e)| {
            let base = format!("{}({})", alg.base.labels[k], -j);
            if e > 1 {
                format!("{base}^{e}")
            } else {
                base
            }
        })
        .collect::<Vec<_>>()
        .join(".")
}

/// Monomial basis of `𝒮` in degree `s` (all multisets of `h_k(-j)` with `Σ j = s`).
pub fn s_basis(rank: usize, s: i64) -> Vec<SMono> {
    let gens: Vec<(usize, i64)> =
        (1..=s).flat_map(|j| (0..rank).map(move |k| (k, j))).collect();
    let mut out = Vec::new();
    fn rec(gens: &[(usize, i64)], i: usize, left: i64, cur: &mut SMono, out: &mut Vec<SMono>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if i == gens.len() {
            return;
        }
        let (k, j) = gens[i];
        rec(gens, i + 1, left, cur, out);
        let mut e = 1u16;
        while j * e as i64 <= left {
            cur.push((k, j, e));
            rec(gens, i + 1, left - j * e as i64, cur, out);
            cur.pop();
            e += 1;
        }
    }
    rec(&gens, 0, s, &mut Vec::new(), &mut out);
    for m in out.iter_mut() {
        m.sort_by_key(|&(k, j, _)| (j, k));
    }
    out.sort();
    out
}

type RaiseKey = (Basis, Mono);

pub struct VermaModule<R: Scalar> {
    pub pbw: Arc<PbwBasis>,
    pub lambda: Weight<R>,
    raise_memo: RwLock<HashMap<RaiseKey, Arc<GradedVector<R>>>>,
}

impl<R: Scalar> VermaModule<R> {
    pub fn new(pbw: Arc<PbwBasis>, lambda: Weight<R>) -> Self {
        VermaModule { pbw, lambda, raise_memo: RwLock::new(HashMap::new()) }
    }

    pub fn alg(&self) -> &AffineAlgebra {
        &self.pbw.alg
    }

    pub fn window(&self) -> Window {
        self.pbw.window
    }

    pub fn weight_basis(&self, nu: &[i64]) -> Result<Arc<Vec<Mono>>> {
        self.pbw.weight_basis(nu)
    }

    pub fn dim(&self, nu: &[i64]) -> Result<usize> {
        Ok(self.weight_basis(nu)?.len())
    }

    /// Weight drop `ν` of a nonzero vector.
    pub fn drop_of(&self, v: &GradedVector<R>) -> Option<Vec<i64>> {
        v.terms.keys().next().map(|m| self.pbw.mono_weight(m))
    }

    /// Scalar by which `b ∈ ĥ` acts on the weight space `λ - ν`.
    fn cartan_value(&self, b: Basis, nu: &[i64]) -> R {
        let r = self.alg().rank();
        match b {
            Basis::K => self.lambda.values[r].clone(),
            Basis::D => self.lambda.values[r + 1].clone() - R::from_int(nu[0]),
            Basis::Loop(a, 0) => {
                let f = self.alg().root_functional(nu);
                self.lambda.values[a].clone() - R::from_rational(&f[a])
            }
            _ => unreachable!("not a Cartan element"),
        }
    }

    /// Action of a basis element on a monomial.
    pub fn act_basis(&self, b: Basis, m: &Mono) -> Result<GradedVector<R>> {
        let split = self.alg().split(b);
        match split {
            Split::Cartan => {
                let nu = self.pbw.mono_weight(m);
                Ok(GradedVector::from_mono(m.clone(), self.cartan_value(b, &nu)))
            }
            s if s.is_lowering() => {
                let id = self.pbw.gen_id(b).ok_or_else(|| Error::WindowExceeded(self.alg().weight(b)))?;
                let mut nu = self.pbw.mono_weight(m);
                for (a, c) in nu.iter_mut().zip(&self.pbw.gens[id as usize].nu) {
                    *a += c;
                }
                if !self.window().contains(&nu) {
                    return Err(Error::WindowExceeded(nu));
                }
                Ok(self.pbw.lower(id, &GradedVector::from_mono(m.clone(), R::one())))
            }
            _ => Ok((*self.raise(b, m)?).clone()),
        }
    }

    fn raise(&self, b: Basis, m: &Mono) -> Result<Arc<GradedVector<R>>> {
        let key = (b, m.clone());
        if let Some(hit) = self.raise_memo.read().expect("raise lock").get(&key) {
            return Ok(hit.clone());
        }
        let out = Arc::new(self.raise_uncached(b, m)?);
        self.raise_memo.write().expect("raise lock").insert(key, out.clone());
        Ok(out)
    }

    fn raise_uncached(&self, b: Basis, m: &Mono) -> Result<GradedVector<R>> {
        let Some(&(g1, a)) = m.first() else {
            return Ok(GradedVector::zero());
        };
        let nu = self.pbw.mono_weight(m);
        let wt = self.alg().weight(b);
        if nu.iter().zip(&wt).any(|(n, w)| n < w) {
            return Ok(GradedVector::zero());
        }
        let mut rest = m.clone();
        if a == 1 {
            rest.remove(0);
        } else {
            rest[0].1 -= 1;
        }
        let gen = &self.pbw.gens[g1 as usize];
        // u g1 R = ± g1 (u R) + [u, g1] R
        let inner = self.raise(b, &rest)?;
        let mut out = self.pbw.lower(g1, &inner);
        if self.alg().parity(b) && gen.odd {
            out = out.scale(&-R::one());
        }
        let br = self.alg().bracket(b, gen.basis());
        let rest_v = GradedVector::from_mono(rest, R::one());
        out.add(&self.act_elem(&br, &rest_v)?);
        Ok(out)
    }

    pub fn act(&self, b: Basis, v: &GradedVector<R>) -> Result<GradedVector<R>> {
        let mut out = GradedVector::zero();
        for (m, c) in &v.terms {
            out.add_scaled(&self.act_basis(b, m)?, c);
        }
        Ok(out)
    }

    pub fn act_elem(&self, e: &Elem, v: &GradedVector<R>) -> Result<GradedVector<R>> {
        let mut out = GradedVector::zero();
        for (b, c) in e {
            out.add_scaled(&self.act(*b, v)?, &R::from_rational(c));
        }
        Ok(out)
    }

    /// `u · v` for `u ∈ U(n̂-)` given in this module's PBW basis.
    pub fn apply_lowering(&self, u: &GradedVector<R>, v: &GradedVector<R>) -> Result<GradedVector<R>> {
        let mut out = GradedVector::zero();
        for (m, c) in &u.terms {
            let mut acc = v.clone();
            for &(g, e) in m.iter().rev() {
                for _ in 0..e {
                    acc = self.pbw.lower(g, &acc);
                }
            }
            out.add_scaled(&acc, c);
        }
        if let Some(nu) = self.drop_of(&out) {
            if !self.window().contains(&nu) {
                return Err(Error::WindowExceeded(nu));
            }
        }
        Ok(out)
    }

    /// Matrix of `b` from `M_{λ-ν}` to `M_{λ-ν+wt b}`; columns index the source basis.
    pub fn raising_matrix(&self, b: Basis, nu: &[i64]) -> Result<Matrix<R>> {
        let src = self.weight_basis(nu)?;
        let target: Vec<i64> = nu.iter().zip(self.alg().weight(b)).map(|(n, w)| n - w).collect();
        if target.iter().any(|&c| c < 0) {
            return Ok(Vec::new());
        }
        let tgt = self.weight_basis(&target)?;
        let pos: HashMap<&Mono, usize> = tgt.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut mat = vec![vec![R::zero(); src.len()]; tgt.len()];
        for (j, m) in src.iter().enumerate() {
            for (t, c) in self.act_basis(b, m)?.terms {
                mat[pos[&t]][j] = c;
            }
        }
        Ok(mat)
    }

    /// `HC+`: the part of `v` (in the plus-adapted basis) built from `H-` only.
    pub fn hc_plus(&self, v: &GradedVector<R>) -> Result<SElem<R>> {
        self.check_imaginary(v)?;
        Ok(read_cartan_part(&self.pbw, v))
    }

    /// `HC-`: the same read-off after re-expansion in the minus-adapted basis.
    pub fn hc_minus(&self, minus: &PbwBasis, v: &GradedVector<R>) -> Result<SElem<R>> {
        debug_assert_eq!(minus.ordering, Ordering::Minus);
        self.check_imaginary(v)?;
        let w = minus.reorder(&self.pbw, v)?;
        Ok(read_cartan_part(minus, &w))
    }

    fn check_imaginary(&self, v: &GradedVector<R>) -> Result<()> {
        let Some(nu) = self.drop_of(v) else {
            return Ok(());
        };
        let delta = self.alg().delta();
        let s = nu[0];
        if nu.iter().zip(&delta).any(|(n, d)| *n != s * d) {
            return Err(Error::NotImaginaryWeight(nu));
        }
        Ok(())
    }

    /// Vector of `M(λ)` whose `U(n̂-)` part is the given `𝒮` element.
    pub fn from_s(&self, z: &SElem<R>) -> Result<GradedVector<R>> {
        let mut out = GradedVector::zero();
        for (m, c) in z {
            let mut prod: Vec<(Basis, u32)> = Vec::new();
            for &(k, j, e) in m {
                prod.push((Basis::Loop(k, -j), e as u32));
            }
            let v = self.pbw.straighten(&prod)?;
            for (mm, cc) in v.terms {
                out.add_term(mm, c.scale(&cc));
            }
        }
        Ok(out)
    }
}

fn read_cartan_part<R: Scalar>(pbw: &PbwBasis, v: &GradedVector<R>) -> SElem<R> {
    let mut out = SElem::new();
    for (m, c) in &v.terms {
        if pbw.mono_is_cartan(m) {
            let mut sm: SMono =
                m.iter().map(|&(g, e)| (pbw.gens[g as usize].base, pbw.gens[g as usize].j, e)).collect();
            sm.sort_by_key(|&(k, j, _)| (j, k));
            out.insert(sm, c.clone());
        }
    }
    out
}

/// Coordinates of an `𝒮` element in the monomial basis of its degree.
pub fn s_coords<R: Scalar>(z: &SElem<R>, basis: &[SMono]) -> Vec<R> {
    basis.iter().map(|m| z.get(m).cloned().unwrap_or_else(R::zero)).collect()
}

/// Singular vectors of weight `λ - sδ`.
#[derive(Clone, Debug)]
pub struct SingularBasis {
    pub s: i64,
    pub vectors: Vec<GradedVector<Q>>,
}

/// Null space of the stacked raising maps for the given elements at drop `ν`,
/// returned as vectors of `M_{λ-ν}` in echelon form.
pub fn annihilated(m: &VermaModule<Q>, elems: &[Basis], nu: &[i64]) -> Result<Vec<GradedVector<Q>>> {
    let basis = m.weight_basis(nu)?;
    let n = basis.len();
    let mut stacked: Matrix<Q> = Vec::new();
    for &b in elems {
        stacked.extend(m.raising_matrix(b, nu)?);
    }
    let ns = if stacked.is_empty() {
        (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
    } else {
        nullspace(&stacked, n)
    };
    let ech = echelon(&ns, n);
    Ok(ech.iter().map(|c| GradedVector::from_coords(&basis, c)).collect())
}

pub fn singular_vectors(m: &VermaModule<Q>, s: i64) -> Result<SingularBasis> {
    let nu: Vec<i64> = m.alg().delta().iter().map(|d| d * s).collect();
    let elems = m.alg().chevalley_raising();
    Ok(SingularBasis { s, vectors: annihilated(m, &elems, &nu)? })
}

/// Basis elements of `N+ ⊕ H` whose weight fits under `ν`.
pub fn n_plus_h_elements(alg: &AffineAlgebra, nu: &[i64]) -> Vec<Basis> {
    let mut out = Vec::new();
    for m in 0..=nu[0] {
        for a in 0..alg.base.dim() {
            let b = Basis::Loop(a, m);
            let s = alg.split(b);
            if (s == Split::NPlus || s == Split::H)
                && alg.weight(b).iter().zip(nu).all(|(w, n)| w <= n)
            {
                out.push(b);
            }
        }
    }
    out
}

/// All raising basis elements whose weight fits under `ν`.
pub fn raising_elements(alg: &AffineAlgebra, nu: &[i64]) -> Vec<Basis> {
    let mut out = Vec::new();
    for m in 0..=nu[0] {
        for a in 0..alg.base.dim() {
            let b = Basis::Loop(a, m);
            if alg.split(b).is_raising() && alg.weight(b).iter().zip(nu).all(|(w, n)| w <= n) {
                out.push(b);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub critical: bool,
    /// Violated `(α, k)`: `2(λ+ρ̂, α) = k(α, α)`.
    pub witnesses: Vec<(Vec<i64>, i64)>,
}

impl GenericityReport {
    pub fn is_generic_critical(&self) -> bool {
        self.critical && self.witnesses.is_empty()
    }
}

/// Genericity of a critical weight, certified on the window only.
pub fn is_generic_critical(alg: &AffineAlgebra, lambda: &Weight<Q>, window: &Window) -> GenericityReport {
    let lr: Vec<Q> = lambda.values.iter().zip(&alg.rho.values).map(|(a, b)| a + b).collect();
    let delta = alg.root_functional(&alg.delta());
    let critical = alg.pair(&lr, &delta).is_zero();
    let mut witnesses = Vec::new();
    for root in alg.positive_roots(window) {
        if root.kind != RootKind::Real {
            continue;
        }
        let f = alg.root_functional(&root.coords);
        let lhs = alg.pair(&lr, &f) * qi(2);
        let norm = alg.pair(&f, &f);
        let mut k = 1;
        loop {
            let kc: Vec<i64> = root.coords.iter().map(|c| c * k).collect();
            if !window.contains(&kc) {
                break;
            }
            if (!root.odd || k % 2 == 1) && lhs == &norm * qi(k) {
                witnesses.push((root.coords.clone(), k));
            }
            k += 1;
        }
    }
    GenericityReport { critical, witnesses }
}

/// `φ_v(w)`: rewrites `w = u v_λ` and returns `u · v`.
pub fn singular_product(
    m: &VermaModule<Q>,
    v: &GradedVector<Q>,
    w: &GradedVector<Q>,
    genericity: &GenericityReport,
) -> Result<GradedVector<Q>> {
    if !genericity.is_generic_critical() {
        return Err(Error::GenericityUnverified(format!("{:?}", genericity.witnesses)));
    }
    m.apply_lowering(w, v)
}

/// Graded dimensions of `U(n̂-) · generators` over the whole window.
pub fn submodule_span(
    m: &VermaModule<Q>,
    generators: &[GradedVector<Q>],
) -> Result<BTreeMap<Vec<i64>, usize>> {
    Ok(submodule_span_bases(m, generators)?.into_iter().map(|(k, v)| (k, v.len())).collect())
}

/// Echelon bases (in weight-basis coordinates) of `U(n̂-) · generators` per weight.
pub fn submodule_span_bases(
    m: &VermaModule<Q>,
    generators: &[GradedVector<Q>],
) -> Result<BTreeMap<Vec<i64>, Vec<Vec<Q>>>> {
    let alg = m.alg();
    let lowering: Vec<(Vec<i64>, u16)> = alg
        .chevalley_lowering()
        .into_iter()
        .filter_map(|b| m.pbw.gen_id(b).map(|id| (m.pbw.gens[id as usize].nu.clone(), id)))
        .collect();
    let mut by_weight: HashMap<Vec<i64>, Vec<&GradedVector<Q>>> = HashMap::new();
    for g in generators {
        if let Some(nu) = m.drop_of(g) {
            by_weight.entry(nu).or_default().push(g);
        }
    }
    let mut out: BTreeMap<Vec<i64>, Vec<Vec<Q>>> = BTreeMap::new();
    for nu in m.window().weights(alg.n_simple()) {
        let basis = m.weight_basis(&nu)?;
        let mut vecs: Vec<Vec<Q>> = Vec::new();
        if let Some(gs) = by_weight.get(&nu) {
            vecs.extend(gs.iter().map(|g| g.coords(&basis)));
        }
        for (a, id) in &lowering {
            let prev: Vec<i64> = nu.iter().zip(a).map(|(n, x)| n - x).collect();
            let Some(pb) = out.get(&prev) else { continue };
            let prev_basis = m.weight_basis(&prev)?;
            for c in pb {
                let v = GradedVector::from_coords(&prev_basis, c);
                vecs.push(m.pbw.lower(*id, &v).coords(&basis));
            }
        }
        out.insert(nu, echelon(&vecs, basis.len()));
    }
    Ok(out)
}

/// Default rational test weight: critical level, finite part `1/7, 1/11, ..`.
pub fn default_generic_weight(alg: &AffineAlgebra) -> Weight<Q> {
    const DEN: [i64; 4] = [7, 11, 13, 17];
    let finite = (0..alg.rank()).map(|i| crate::scalar::q(1, DEN[i % 4])).collect();
    Weight::new(finite, alg.critical_level(), Q::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::affine_from_catalog;

    fn module(name: &str, w: Window) -> VermaModule<Q> {
        let alg = Arc::new(affine_from_catalog(name).unwrap());
        let lam = default_generic_weight(&alg);
        VermaModule::new(Arc::new(PbwBasis::new(alg, w, Ordering::Plus)), lam)
    }

    #[test]
    fn rank_one_relations() {
        let m = module("sl2", Window::new(1, 2));
        let (e, f) = m.alg().base.chevalley[0];
        let fv = m.act(Basis::Loop(f, 0), &GradedVector::unit()).unwrap();
        let efv = m.act(Basis::Loop(e, 0), &fv).unwrap();
        assert_eq!(efv, GradedVector::from_mono(Mono::new(), m.lambda.values[0].clone()));
        let hv = m.act(Basis::Loop(0, -1), &GradedVector::unit()).unwrap();
        let back = m.act(Basis::Loop(0, 1), &hv).unwrap();
        assert_eq!(back.coeff(&Mono::new()), qi(-4));
        let kv = m.act(Basis::K, &hv).unwrap();
        assert_eq!(kv, hv.scale(&qi(-2)));
    }

    #[test]
    fn singular_dimensions_sl2() {
        let m = module("sl2", Window::new(2, 4));
        assert_eq!(singular_vectors(&m, 0).unwrap().vectors.len(), 1);
        assert_eq!(singular_vectors(&m, 1).unwrap().vectors.len(), 1);
        assert_eq!(singular_vectors(&m, 2).unwrap().vectors.len(), 2);
    }

    #[test]
    fn hc_plus_of_first_singular_vector() {
        let m = module("sl2", Window::new(1, 2));
        let v = &singular_vectors(&m, 1).unwrap().vectors[0];
        let z = m.hc_plus(v).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z.keys().next().unwrap(), &vec![(0usize, 1i64, 1u16)]);
        let hv = m.act(Basis::Loop(0, -1), &GradedVector::unit()).unwrap();
        assert_eq!(m.hc_plus(&hv).unwrap().len(), 1);
        let fv = m.act(Basis::Loop(2, 0), &GradedVector::unit()).unwrap();
        assert!(matches!(m.hc_plus(&fv), Err(Error::NotImaginaryWeight(_))));
    }

    #[test]
    fn genericity() {
        let alg = affine_from_catalog("sl2").unwrap();
        let w = Window::new(3, 9);
        let lam = default_generic_weight(&alg);
        assert!(is_generic_critical(&alg, &lam, &w).is_generic_critical());
        let level0 = Weight::new(vec![crate::scalar::q(1, 7)], qi(0), qi(0));
        assert!(!is_generic_critical(&alg, &level0, &w).critical);
        // (λ+ρ̂, α1) = (α1, α1): λ(h) + 1 = 2
        let bad = Weight::new(vec![qi(1)], qi(-2), qi(0));
        let rep = is_generic_critical(&alg, &bad, &w);
        assert!(rep.witnesses.contains(&(vec![0, 1], 2)));
    }

    #[test]
    fn s_basis_counts() {
        assert_eq!(s_basis(1, 4).len(), 5);
        assert_eq!(s_basis(2, 2).len(), 5);
        assert_eq!(s_basis(1, 0), vec![SMono::new()]);
    }

    #[test]
    fn span_of_vacuum_is_everything() {
        let m = module("sl2", Window::new(2, 4));
        let dims = submodule_span(&m, &[GradedVector::unit()]).unwrap();
        for (nu, d) in dims {
            assert_eq!(d, m.dim(&nu).unwrap());
        }
        let empty = submodule_span(&m, &[]).unwrap();
        assert!(empty.values().all(|&d| d == 0));
    }
}
