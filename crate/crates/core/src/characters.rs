//! Truncated formal characters as finite tables `ν ↦ dim` at weight `λ - ν`.

use std::collections::BTreeMap;

use num_rational::BigRational as Q;
use serde::Serialize;

use crate::algebra::{AffineAlgebra, RootKind};
use crate::error::{Error, Result};
use crate::linalg::{echelon, intersect};
use crate::pbw::{GradedVector, Window};
use crate::verma::{is_generic_critical, singular_vectors, submodule_span_bases, s_basis, s_coords, VermaModule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedCharacter {
    pub window: Window,
    pub table: BTreeMap<Vec<i64>, i64>,
}

#[derive(Serialize)]
struct Entry<'a> {
    nu_coords: &'a [i64],
    dim: i64,
}

impl TruncatedCharacter {
    pub fn zero(window: Window) -> Self {
        TruncatedCharacter { window, table: BTreeMap::new() }
    }

    fn unit(window: Window, n: usize) -> Self {
        let mut t = Self::zero(window);
        t.table.insert(vec![0; n], 1);
        t
    }

    pub fn get(&self, nu: &[i64]) -> i64 {
        self.table.get(nu).copied().unwrap_or(0)
    }

    pub fn set(&mut self, nu: Vec<i64>, d: i64) {
        if d == 0 {
            self.table.remove(&nu);
        } else {
            self.table.insert(nu, d);
        }
    }

    /// Windowed product of characters.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.window);
        for (a, x) in &self.table {
            for (b, y) in &other.table {
                let nu: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                if self.window.contains(&nu) {
                    *out.table.entry(nu).or_default() += x * y;
                }
            }
        }
        out.table.retain(|_, d| *d != 0);
        out
    }

    /// Multiplies by `(1 - e^{-γ})^{-1}`.
    fn mul_geometric(&mut self, gamma: &[i64]) {
        // ascending height so that shifted sources are already final
        let mut all: Vec<Vec<i64>> = self.window.weights(gamma.len());
        all.sort_by_key(|k| k.iter().sum::<i64>());
        for nu in all {
            let src: Vec<i64> = nu.iter().zip(gamma).map(|(a, b)| a - b).collect();
            if src.iter().all(|&c| c >= 0) {
                let add = self.get(&src);
                if add != 0 {
                    *self.table.entry(nu).or_default() += add;
                }
            }
        }
    }

    /// Multiplies by `(1 + e^{-γ})`.
    fn mul_binomial(&mut self, gamma: &[i64]) {
        let old = self.table.clone();
        for (nu, d) in old {
            let t: Vec<i64> = nu.iter().zip(gamma).map(|(a, b)| a + b).collect();
            if self.window.contains(&t) {
                *self.table.entry(t).or_default() += d;
            }
        }
    }

    /// Shift by `e^{-μ}`.
    pub fn shift(&self, mu: &[i64]) -> Self {
        let mut out = Self::zero(self.window);
        for (nu, d) in &self.table {
            let t: Vec<i64> = nu.iter().zip(mu).map(|(a, b)| a + b).collect();
            if self.window.contains(&t) {
                out.table.insert(t, *d);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Entry> = self.table.iter().map(|(k, d)| Entry { nu_coords: k, dim: *d }).collect();
        serde_json::to_value(rows).expect("serializable")
    }
}

fn root_product(alg: &AffineAlgebra, window: Window, real: bool, imaginary: bool) -> TruncatedCharacter {
    let mut ch = TruncatedCharacter::unit(window, alg.n_simple());
    for root in alg.positive_roots(&window) {
        let keep = match root.kind {
            RootKind::Real => real,
            RootKind::Imaginary => imaginary,
        };
        if !keep {
            continue;
        }
        for _ in 0..root.mult {
            if root.odd {
                ch.mul_binomial(&root.coords);
            } else {
                ch.mul_geometric(&root.coords);
            }
        }
    }
    ch
}

/// Kostant partition function `τ` on the window.
pub fn ch_verma(alg: &AffineAlgebra, window: Window) -> TruncatedCharacter {
    root_product(alg, window, true, true)
}

/// `Π_{real even}(1-e^{-α})^{-1} Π_{real odd}(1+e^{-α})`.
pub fn kk_character(alg: &AffineAlgebra, window: Window) -> TruncatedCharacter {
    root_product(alg, window, true, false)
}

/// Character of `𝒮 = U(H-)`.
pub fn ch_s(alg: &AffineAlgebra, window: Window) -> TruncatedCharacter {
    root_product(alg, window, false, true)
}

/// `c[s][p]`: monomials of `𝒮` of degree `s` with exactly `p` factors.
pub fn s_part_counts(rank: usize, s_max: usize) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; s_max + 1]; s_max + 1];
    c[0][0] = 1;
    for j in 1..=s_max {
        for _ in 0..rank {
            // multiply by 1/(1 - y q^j)
            for s in j..=s_max {
                for p in 1..=s_max {
                    c[s][p] += c[s - j][p - 1];
                }
            }
        }
    }
    c
}

/// Character of `𝒮^{≥k}`, the span of monomials with at least `k` factors.
pub fn ch_s_geq(alg: &AffineAlgebra, window: Window, k: usize) -> TruncatedCharacter {
    let delta = alg.delta();
    let s_max = window.s_max.max(0) as usize;
    let c = s_part_counts(alg.rank(), s_max);
    let mut out = TruncatedCharacter::zero(window);
    for (s, row) in c.iter().enumerate() {
        let nu: Vec<i64> = delta.iter().map(|d| d * s as i64).collect();
        if !window.contains(&nu) {
            continue;
        }
        let d: i64 = row.iter().skip(k).sum();
        out.set(nu, d);
    }
    out
}

/// Simple character computed as `τ - dim(span of all singular vectors)`.
pub fn ch_simple_bruteforce(m: &VermaModule<Q>) -> Result<TruncatedCharacter> {
    let rep = is_generic_critical(m.alg(), &m.lambda, &m.window());
    if !rep.is_generic_critical() {
        return Err(Error::GenericityUnverified(format!("{:?}", rep.witnesses)));
    }
    let mut gens = Vec::new();
    for s in 1..=m.window().s_max {
        let nu: Vec<i64> = m.alg().delta().iter().map(|d| d * s).collect();
        if !m.window().contains(&nu) {
            break;
        }
        gens.extend(singular_vectors(m, s)?.vectors);
    }
    let span = submodule_span_bases(m, &gens)?;
    let mut out = TruncatedCharacter::zero(m.window());
    for (nu, b) in span {
        out.set(nu.clone(), m.dim(&nu)? as i64 - b.len() as i64);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Cor01Report {
    pub pass: bool,
    pub mismatches: Vec<(Vec<i64>, i64, i64)>,
    /// `dim HC+(N^n̂)` at each `sδ`.
    pub hc_dims: Vec<i64>,
}

/// Compares `ch N` with `ch L · ch HC+(N^n̂)` for `N` generated by singular vectors.
pub fn cor01_check(m: &VermaModule<Q>, generators: &[GradedVector<Q>]) -> Result<Cor01Report> {
    let alg = m.alg();
    let w = m.window();
    let rep = is_generic_critical(alg, &m.lambda, &w);
    if !rep.is_generic_critical() {
        return Err(Error::GenericityUnverified(format!("{:?}", rep.witnesses)));
    }
    let span = submodule_span_bases(m, generators)?;
    let mut ch_n = TruncatedCharacter::zero(w);
    for (nu, b) in &span {
        ch_n.set(nu.clone(), b.len() as i64);
    }
    let mut ch_h = TruncatedCharacter::zero(w);
    let mut hc_dims = Vec::new();
    for s in 0..=w.s_max {
        let nu: Vec<i64> = alg.delta().iter().map(|d| d * s).collect();
        if !w.contains(&nu) {
            break;
        }
        let basis = m.weight_basis(&nu)?;
        let sing: Vec<Vec<Q>> =
            singular_vectors(m, s)?.vectors.iter().map(|v| v.coords(&basis)).collect();
        let inside = intersect(&sing, &span[&nu], basis.len());
        let sb = s_basis(alg.rank(), s);
        let images: Vec<Vec<Q>> = inside
            .iter()
            .map(|c| Ok(s_coords(&m.hc_plus(&GradedVector::from_coords(&basis, c))?, &sb)))
            .collect::<Result<_>>()?;
        let d = echelon(&images, sb.len()).len() as i64;
        hc_dims.push(d);
        ch_h.set(nu, d);
    }
    let rhs = kk_character(alg, w).convolve(&ch_h);
    let mut mismatches = Vec::new();
    for nu in w.weights(alg.n_simple()) {
        let (a, b) = (ch_n.get(&nu), rhs.get(&nu));
        if a != b {
            mismatches.push((nu, a, b));
        }
    }
    Ok(Cor01Report { pass: mismatches.is_empty(), mismatches, hc_dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::affine_from_catalog;

    /// Brute-force multiset enumeration over positive roots.
    fn tau_bruteforce(alg: &AffineAlgebra, w: Window, nu: &[i64]) -> i64 {
        let mut roots = Vec::new();
        for r in alg.positive_roots(&w) {
            for _ in 0..r.mult {
                roots.push((r.coords.clone(), r.odd));
            }
        }
        fn rec(roots: &[(Vec<i64>, bool)], i: usize, left: &mut Vec<i64>) -> i64 {
            if left.iter().all(|&c| c == 0) {
                return 1;
            }
            if i == roots.len() {
                return 0;
            }
            let (g, odd) = &roots[i];
            let mut total = rec(roots, i + 1, left);
            let mut used = 0;
            loop {
                if left.iter().zip(g).any(|(l, c)| l < c) || (*odd && used == 1) {
                    break;
                }
                for (l, c) in left.iter_mut().zip(g) {
                    *l -= c;
                }
                used += 1;
                total += rec(roots, i + 1, left);
            }
            for (l, c) in left.iter_mut().zip(g) {
                *l += c * used;
            }
            total
        }
        rec(&roots, 0, &mut nu.to_vec())
    }

    #[test]
    fn verma_character_matches_enumeration() {
        for (name, w) in [("sl2", Window::new(3, 8)), ("sl(2|1)", Window::new(2, 6))] {
            let alg = affine_from_catalog(name).unwrap();
            let ch = ch_verma(&alg, w);
            for nu in w.weights(alg.n_simple()) {
                assert_eq!(ch.get(&nu), tau_bruteforce(&alg, w, &nu), "{name} {nu:?}");
            }
        }
    }

    #[test]
    fn small_values() {
        let alg = affine_from_catalog("sl2").unwrap();
        let w = Window::new(3, 9);
        let ch = ch_verma(&alg, w);
        assert_eq!(ch.get(&[1, 1]), 2);
        assert_eq!(ch.get(&[2, 2]), 6);
        assert_eq!(ch.get(&[3, 3]), 14);
        let kk = kk_character(&alg, w);
        assert_eq!(kk.get(&[0, 0]), 1);
        assert_eq!(kk.get(&[1, 1]), 1);
        assert_eq!(kk.get(&[2, 2]), 3);
        assert_eq!(ch_s(&alg, w).get(&[2, 2]), 2);
        assert_eq!(ch_s_geq(&alg, w, 2).get(&[2, 2]), 1);
        assert_eq!(ch_s_geq(&alg, w, 2).get(&[3, 3]), 2);
    }

    #[test]
    fn verma_factors_through_s() {
        for name in ["sl2", "sl3", "sl(2|1)"] {
            let alg = affine_from_catalog(name).unwrap();
            let w = Window::new(2, 7);
            let lhs = ch_verma(&alg, w);
            let rhs = kk_character(&alg, w).convolve(&ch_s(&alg, w));
            assert_eq!(lhs, rhs, "{name}");
        }
    }

    #[test]
    fn partitions_with_parts() {
        let c = s_part_counts(1, 5);
        let p: Vec<i64> = c.iter().map(|r| r.iter().sum()).collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 7]);
        assert_eq!(c[4][2], 2);
    }
}
