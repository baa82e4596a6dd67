//! Vacuum modules `V^k` over the Heisenberg algebra `H- ⊕ CK ⊕ H`.

use std::collections::HashMap;

use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::AffineAlgebra;
use crate::characters::{kk_character, s_part_counts};
use crate::error::{Error, Result};
use crate::jantzen::{to_series, Layers};
use crate::linalg::{det, echelon, local_smith, Matrix};
use crate::modular::det_poly;
use crate::poly::Poly;
use crate::scalar::{qi, Scalar};
use crate::verma::{is_generic_critical, s_basis, s_coords, singular_vectors, SMono, VermaModule};
use crate::QPoly;

/// Orthogonal basis `u_i = Σ c_{ik} h_k` of the Cartan subalgebra and the norms `(u_i|u_i)`.
pub fn orthogonal_cartan(alg: &AffineAlgebra) -> Result<(Vec<Vec<Q>>, Vec<Q>)> {
    let r = alg.rank();
    let g = &alg.base.form;
    let ip = |a: &[Q], b: &[Q]| -> Q {
        let mut s = Q::zero();
        for i in 0..r {
            for j in 0..r {
                s += &a[i] * &g[i][j] * &b[j];
            }
        }
        s
    };
    let mut vecs: Vec<Vec<Q>> = Vec::new();
    let mut norms = Vec::new();
    for k in 0..r {
        let mut v: Vec<Q> = (0..r).map(|i| if i == k { Q::one() } else { Q::zero() }).collect();
        for (u, n) in vecs.iter().zip(&norms) {
            let c = ip(&v, u) / n;
            for (a, b) in v.iter_mut().zip(u) {
                *a -= &c * b;
            }
        }
        let n = ip(&v, &v);
        if n.is_zero() {
            return Err(Error::ValidationFailure("isotropic Cartan direction".into()));
        }
        vecs.push(v);
        norms.push(n);
    }
    Ok((vecs, norms))
}

/// Gram matrices of one slice by degree, with their partition bases.
pub type SliceCache<R> = HashMap<i64, (Vec<Vec<(i64, u16)>>, Matrix<R>)>;

/// One Cartan direction of norm `n`: creation operators `u(-j)`, level `k`.
pub struct FockSlice<R: Scalar> {
    pub norm: Q,
    pub level: R,
}

impl<R: Scalar> FockSlice<R> {
    /// `u(j) · m` for a monomial in `u(-1), u(-2), ..` (partition as sorted `(j, e)` pairs).
    pub fn annihilate(&self, j: i64, m: &[(i64, u16)]) -> Vec<(Vec<(i64, u16)>, R)> {
        let mut out = Vec::new();
        for (pos, &(jj, e)) in m.iter().enumerate() {
            if jj != j {
                continue;
            }
            // [u(j), u(-j)] = j (u|u) K
            let c = self.level.scale(&(qi(j) * &self.norm * qi(e as i64)));
            let mut rest = m.to_vec();
            if e == 1 {
                rest.remove(pos);
            } else {
                rest[pos].1 -= 1;
            }
            out.push((rest, c));
        }
        out
    }

    /// Gram matrix on partitions of `s`, by peeling the first creation operator.
    pub fn gram(&self, s: i64, cache: &mut SliceCache<R>) -> Matrix<R> {
        if let Some((_, g)) = cache.get(&s) {
            return g.clone();
        }
        let basis = partitions(s);
        let n = basis.len();
        let mut g = vec![vec![R::zero(); n]; n];
        if s == 0 {
            g[0][0] = R::one();
        } else {
            for (i, u) in basis.iter().enumerate() {
                let (j, _) = u[0];
                let mut rest = u.clone();
                if rest[0].1 == 1 {
                    rest.remove(0);
                } else {
                    rest[0].1 -= 1;
                }
                let sub = self.gram(s - j, cache);
                let sub_basis = &cache[&(s - j)].0;
                let r = sub_basis.iter().position(|b| *b == rest).expect("partition");
                for (k, w) in basis.iter().enumerate() {
                    let mut acc = R::zero();
                    for (mono, c) in self.annihilate(j, w) {
                        let p = sub_basis.iter().position(|b| *b == mono).expect("partition");
                        acc += &(c * &sub[r][p]);
                    }
                    g[i][k] = acc;
                }
            }
        }
        cache.insert(s, (basis, g.clone()));
        g
    }
}

/// Partitions of `s` as sorted `(part, multiplicity)` lists.
pub fn partitions(s: i64) -> Vec<Vec<(i64, u16)>> {
    s_basis(1, s).into_iter().map(|m| m.into_iter().map(|(_, j, e)| (j, e)).collect()).collect()
}

/// `V^k` for the whole Cartan subalgebra, as a tensor product of slices.
pub struct VacuumModule<R: Scalar> {
    pub slices: Vec<FockSlice<R>>,
    caches: Vec<SliceCache<R>>,
}

impl<R: Scalar> VacuumModule<R> {
    pub fn new(alg: &AffineAlgebra, level: R) -> Result<Self> {
        let (_, norms) = orthogonal_cartan(alg)?;
        let slices: Vec<FockSlice<R>> = norms.into_iter().map(|n| FockSlice { norm: n, level: level.clone() }).collect();
        let caches = slices.iter().map(|_| HashMap::new()).collect();
        Ok(VacuumModule { slices, caches })
    }

    pub fn rank(&self) -> usize {
        self.slices.len()
    }

    /// Monomial basis at degree `s` (indices are orthogonal directions).
    pub fn basis(&self, s: i64) -> Vec<SMono> {
        s_basis(self.rank(), s)
    }

    pub fn dim(&self, s: i64) -> usize {
        self.basis(s).len()
    }

    /// `⟨u(-m) v_k, u(-m) v_k⟩` on slice `i`.
    pub fn single_pairing(&mut self, i: usize, m: i64) -> R {
        let s = &self.slices[i];
        let mono = vec![(m, 1u16)];
        s.annihilate(m, &mono).into_iter().map(|(_, c)| c).fold(R::zero(), |a, b| a + b)
    }

    pub fn gram(&mut self, s: i64) -> Matrix<R> {
        let basis = self.basis(s);
        let n = basis.len();
        let split = |m: &SMono, i: usize| -> Vec<(i64, u16)> {
            let mut p: Vec<(i64, u16)> = m.iter().filter(|t| t.0 == i).map(|&(_, j, e)| (j, e)).collect();
            p.sort();
            p
        };
        let mut g = vec![vec![R::zero(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let mut acc = R::one();
                for i in 0..self.rank() {
                    let (pa, pb) = (split(&basis[a], i), split(&basis[b], i));
                    let (da, db): (i64, i64) =
                        (pa.iter().map(|&(j, e)| j * e as i64).sum(), pb.iter().map(|&(j, e)| j * e as i64).sum());
                    if da != db {
                        acc = R::zero();
                        break;
                    }
                    let sg = self.slices[i].gram(da, &mut self.caches[i]);
                    let sb = &self.caches[i][&da].0;
                    let ia = sb.iter().position(|x| *x == pa).expect("partition");
                    let ib = sb.iter().position(|x| *x == pb).expect("partition");
                    acc = acc * &sg[ia][ib];
                }
                g[a][b] = acc;
            }
        }
        g
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VacuumRow {
    pub s: i64,
    pub dim: usize,
    pub nondegenerate: Vec<bool>,
    pub layers: Vec<usize>,
    pub expected_layers: Vec<usize>,
    pub layer_sum: usize,
    pub sum_fs: i64,
    pub pass: bool,
}

/// `Σ_{k≥1} dim 𝒮^{≥k}_s` through `ch 𝒮 · r Σ q^m/(1-q^m)`.
pub fn sum_fs(rank: usize, s: i64) -> i64 {
    let c = s_part_counts(rank, s.max(0) as usize);
    let dim_s = |t: i64| -> i64 { c[t as usize].iter().sum() };
    (1..=s).map(|n| (1..=n).filter(|d| n % d == 0).count() as i64 * dim_s(s - n)).sum::<i64>() * rank as i64
}

/// Layer dims of `V^0` deformed to level `x`, degree `s`.
pub fn vacuum_layers(v: &mut VacuumModule<QPoly>, s: i64) -> Result<Layers> {
    let g = v.gram(s);
    let d = det_poly(&g);
    let val = d.valuation().ok_or_else(|| Error::DegenerateDirection(vec![s]))?;
    let sm = local_smith(&to_series(&g), val + 1)?;
    let mut dims = Vec::new();
    for k in 0.. {
        let c = sm.valuations.iter().filter(|&&d| d >= k).count();
        dims.push(c);
        if c == 0 {
            break;
        }
    }
    Ok(Layers { nu: vec![s], dims, valuation: val, bases: Vec::new() })
}

/// Nondegeneracy of `V^k` for the given levels, and the adic structure of `V^0`.
pub fn simplicity_and_adic_check(alg: &AffineAlgebra, levels: &[Q], s_max: i64) -> Result<Vec<VacuumRow>> {
    let mut numeric: Vec<VacuumModule<Q>> =
        levels.iter().map(|k| VacuumModule::new(alg, k.clone())).collect::<Result<_>>()?;
    let mut deformed = VacuumModule::new(alg, Poly::x())?;
    let c = s_part_counts(alg.rank(), s_max.max(0) as usize);
    let mut rows = Vec::new();
    for s in 0..=s_max {
        let nondegenerate: Vec<bool> = numeric.iter_mut().map(|v| !det(&v.gram(s)).is_zero()).collect();
        let l = vacuum_layers(&mut deformed, s)?;
        let row = &c[s as usize];
        let mut expected: Vec<usize> = Vec::new();
        for k in 0.. {
            let e: i64 = row.iter().skip(k).sum();
            expected.push(e as usize);
            if e == 0 {
                break;
            }
        }
        let fs = sum_fs(alg.rank(), s);
        let pass = nondegenerate.iter().all(|&b| b)
            && l.dims == expected
            && l.layer_sum() as i64 == fs
            && l.valuation == l.layer_sum();
        rows.push(VacuumRow {
            s,
            dim: deformed.dim(s),
            nondegenerate,
            layers: l.dims.clone(),
            expected_layers: expected,
            layer_sum: l.layer_sum(),
            sum_fs: fs,
            pass,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceRow {
    pub s: i64,
    pub singular_dim: usize,
    #[serde(rename = "S_dim")]
    pub s_dim: usize,
    pub hc_rank: usize,
    pub layers_verma: Vec<usize>,
    pub layers_vacuum: Vec<usize>,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Singular vectors of `M(λ)` against `V^0`, degree by degree, including the
/// Jantzen layers (`verma_layers[s]` are the layer dims of `M(λ)` at `λ - sδ`).
pub fn correspondence_check(
    m0: &VermaModule<Q>,
    verma_layers: &[Vec<usize>],
    s_max: i64,
) -> Result<Vec<CorrespondenceRow>> {
    let alg = m0.alg();
    let w = m0.window();
    let rep = is_generic_critical(alg, &m0.lambda, &w);
    if !rep.is_generic_critical() {
        return Err(Error::GenericityUnverified(format!("{:?}", rep.witnesses)));
    }
    // the correspondence targets V^k with k = (λ+ρ̂, δ)
    let lr: Vec<Q> = m0.lambda.values.iter().zip(&alg.rho.values).map(|(a, b)| a + b).collect();
    let k = alg.pair(&lr, &alg.root_functional(&alg.delta()));
    if !k.is_zero() {
        return Err(Error::GenericityUnverified(format!("(λ+ρ̂,δ) = {k}")));
    }
    let mut vac = VacuumModule::new(alg, Poly::x())?;
    let vac_layers: Vec<Vec<usize>> = (0..=s_max).map(|s| Ok(vacuum_layers(&mut vac, s)?.dims)).collect::<Result<_>>()?;
    let ch_l = kk_character(alg, w);
    let delta = alg.delta();
    let mut rows = Vec::new();
    for s in 0..=s_max {
        let sing = singular_vectors(m0, s)?;
        let sb = s_basis(alg.rank(), s);
        let images: Vec<Vec<Q>> = sing
            .vectors
            .iter()
            .map(|v| Ok(s_coords(&m0.hc_plus(v)?, &sb)))
            .collect::<Result<_>>()?;
        let hc_rank = echelon(&images, sb.len()).len();
        let lv = &verma_layers[s as usize];
        let mut predicted = Vec::new();
        for kk in 0..lv.len() {
            let mut total = 0i64;
            for t in 0..=s {
                let rest: Vec<i64> = delta.iter().map(|d| d * (s - t)).collect();
                let vl = vac_layers[t as usize].get(kk).copied().unwrap_or(0) as i64;
                total += ch_l.get(&rest) * vl;
            }
            predicted.push(total as usize);
        }
        let matches = sing.vectors.len() == sb.len()
            && hc_rank == sb.len()
            && *lv == predicted;
        rows.push(CorrespondenceRow {
            s,
            singular_dim: sing.vectors.len(),
            s_dim: sb.len(),
            hc_rank,
            layers_verma: lv.clone(),
            layers_vacuum: vac_layers[s as usize].clone(),
            matches,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::affine_from_catalog;
    use crate::scalar::q;

    #[test]
    fn orthogonal_basis_sl21() {
        let alg = affine_from_catalog("sl(2|1)").unwrap();
        let (vecs, norms) = orthogonal_cartan(&alg).unwrap();
        assert_eq!(norms[0], qi(2));
        assert_eq!(norms[1], q(-1, 2));
        assert_eq!(vecs[1], vec![q(1, 2), qi(1)]);
    }

    #[test]
    fn dimensions_and_pairing() {
        let alg = affine_from_catalog("sl2").unwrap();
        let mut v = VacuumModule::new(&alg, q(3, 2)).unwrap();
        assert_eq!(v.dim(0), 1);
        assert_eq!(v.dim(4), 5);
        // m (a|a) k
        assert_eq!(v.single_pairing(0, 3), qi(3) * qi(2) * q(3, 2));
        let g = v.gram(3);
        assert!(!det(&g).is_zero());
    }

    #[test]
    fn adic_layers() {
        let alg = affine_from_catalog("sl2").unwrap();
        let mut v = VacuumModule::new(&alg, Poly::x()).unwrap();
        assert_eq!(vacuum_layers(&mut v, 1).unwrap().dims, vec![1, 1, 0]);
        assert_eq!(vacuum_layers(&mut v, 2).unwrap().dims, vec![2, 2, 1, 0]);
        let rows = simplicity_and_adic_check(&alg, &[qi(1), q(-3, 2)], 4).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    }

    #[test]
    fn sum_fs_values() {
        // rank 1, degree 2: partitions 2, 1+1 have 1 and 2 parts
        assert_eq!(sum_fs(1, 2), 3);
        assert_eq!(sum_fs(1, 3), 1 + 2 + 3);
    }
}
