use std::sync::Arc;

use proptest::prelude::*;
use verma_core::algebra::{affine_from_catalog, Basis, Weight};
use verma_core::pbw::{GradedVector, Ordering, PbwBasis, Window};
use verma_core::scalar::{q, sign};
use verma_core::shapovalov::shapovalov_pair;
use verma_core::verma::VermaModule;
use verma_core::{Error, Rational as Q};

const NAMES: [&str; 3] = ["sl2", "sl3", "sl(2|1)"];

fn module(name: &str, w: Window, num: &[i64]) -> VermaModule<Q> {
    let alg = Arc::new(affine_from_catalog(name).unwrap());
    let r = alg.rank();
    let finite = (0..r).map(|i| q(num[i % num.len()], 5)).collect();
    let lam = Weight::new(finite, q(num[0] + 1, 3), q(0, 1));
    VermaModule::new(Arc::new(PbwBasis::new(alg, w, Ordering::Plus)), lam)
}

/// A monomial basis vector of some weight of height at most `h`.
fn pick_vector(m: &VermaModule<Q>, h: i64, idx: usize) -> GradedVector<Q> {
    let weights: Vec<Vec<i64>> = m
        .window()
        .weights(m.alg().n_simple())
        .into_iter()
        .filter(|nu| nu.iter().sum::<i64>() <= h && m.dim(nu).unwrap() > 0)
        .collect();
    let nu = &weights[idx % weights.len()];
    let basis = m.weight_basis(nu).unwrap();
    GradedVector::from_mono(basis[(idx / weights.len()) % basis.len()].clone(), q(1, 1))
}

fn skip_window<T>(r: Result<T, Error>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(Error::WindowExceeded(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn module_axiom(alg_i in 0usize..3, iu in 0usize..200, iw in 0usize..200, iv in 0usize..400, num in prop::collection::vec(-9i64..9, 2)) {
        let m = module(NAMES[alg_i], Window::new(2, 7), &num);
        let basis = m.alg().basis_up_to(1);
        let (u, w) = (basis[iu % basis.len()], basis[iw % basis.len()]);
        let v = pick_vector(&m, 2, iv);
        let lhs = (|| Some((skip_window(m.act(w, &v))?, skip_window(m.act(u, &v))?)))();
        prop_assume!(lhs.is_some());
        let (wv, uv) = lhs.unwrap();
        let (Some(uwv), Some(wuv)) = (skip_window(m.act(u, &wv)), skip_window(m.act(w, &uv))) else {
            return Ok(());
        };
        let Some(bracket) = skip_window(m.act_elem(&m.alg().bracket(u, w), &v)) else {
            return Ok(());
        };
        let mut diff = uwv;
        diff.add_scaled(&wuv, &-sign(m.alg().parity(u) && m.alg().parity(w)));
        diff.add_scaled(&bracket, &q(-1, 1));
        prop_assert!(diff.is_zero(), "{u:?} {w:?} on {v:?}");
    }

    #[test]
    fn reorder_round_trip(alg_i in 0usize..3, iv in 0usize..400, c in -20i64..20) {
        let m = module(NAMES[alg_i], Window::new(2, 6), &[1, 2]);
        let plus = m.pbw.clone();
        let minus = PbwBasis::new(plus.alg.clone(), plus.window, Ordering::Minus);
        let v = pick_vector(&m, 6, iv).scale(&q(c, 7));
        let there = minus.reorder(&plus, &v).unwrap();
        let back = plus.reorder(&minus, &there).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn straighten_is_idempotent(alg_i in 0usize..3, iv in 0usize..400) {
        let m = module(NAMES[alg_i], Window::new(2, 6), &[1]);
        let pbw = &m.pbw;
        let v = pick_vector(&m, 6, iv);
        let (mono, _) = v.terms.iter().next().unwrap();
        let factors: Vec<(Basis, u32)> = pbw.mono_factors(mono).into_iter().map(|(b, e)| (b, e as u32)).collect();
        prop_assert_eq!(pbw.straighten(&factors).unwrap(), v);
    }

    #[test]
    fn straightened_products_match_sequential_action(alg_i in 0usize..3, gens in prop::collection::vec(0usize..64, 1..4)) {
        let m = module(NAMES[alg_i], Window::new(2, 7), &[3]);
        let lowering: Vec<Basis> = m.pbw.gens.iter().map(|g| g.basis()).collect();
        let product: Vec<(Basis, u32)> = gens.iter().map(|&i| (lowering[i % lowering.len()], 1)).collect();
        let Some(s) = skip_window(m.pbw.straighten(&product)) else { return Ok(()); };
        let mut acc = GradedVector::unit();
        for &(b, _) in product.iter().rev() {
            acc = m.act(b, &acc).unwrap();
        }
        prop_assert_eq!(s, acc);
    }

    #[test]
    fn shapovalov_form_is_contravariant(alg_i in 0usize..3, iu in 0usize..200, ix in 0usize..400, iy in 0usize..400) {
        let m = module(NAMES[alg_i], Window::new(1, 5), &[2, -3]);
        let basis = m.alg().basis_up_to(1);
        let u = basis[iu % basis.len()];
        let x = pick_vector(&m, 4, ix);
        let Some(ux) = skip_window(m.act(u, &x)) else { return Ok(()); };
        prop_assume!(!ux.is_zero());
        // y in the weight space of u·x, so both sides are generically nonzero
        let nu = m.drop_of(&ux).unwrap();
        let yb = m.weight_basis(&nu).unwrap();
        let y = GradedVector::from_mono(yb[iy % yb.len()].clone(), q(1, 1));
        let Some(sy) = skip_window(m.act(m.alg().sigma(u), &y)) else { return Ok(()); };
        let lhs = shapovalov_pair(&m, &ux, &y).unwrap();
        let rhs = if sy.is_zero() { q(0, 1) } else { shapovalov_pair(&m, &x, &sy).unwrap() };
        prop_assert_eq!(lhs, rhs);
    }
}
