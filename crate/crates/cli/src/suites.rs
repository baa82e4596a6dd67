//! The verification suites. Each returns a JSON section with a `pass` flag.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use anyhow::anyhow;
use num_traits::One;
use serde_json::{json, Value};
use verma_core::algebra::DeformedWeight;
use verma_core::characters::{ch_simple_bruteforce, ch_verma, cor01_check, kk_character};
use verma_core::construct::{
    cartan_modes_annihilate, level_coefficient, local_module, minus_basis, monomial_check, product_rule_check, Constructor,
};
use verma_core::heisenberg::{correspondence_check, simplicity_and_adic_check};
use verma_core::jantzen::{
    deformed_module, jantzen_layers, layers_closed, layers_nested, predicted_layer_dims, sum_formula_check,
    thm02_check, JantzenReport, Layers,
};
use verma_core::linalg::span_rank;
use verma_core::pbw::{Ordering, PbwBasis, Window};
use verma_core::scalar::q;
use verma_core::shapovalov::{default_lines, det_vs_product_check, line_module, GramBuilder};
use verma_core::verma::{
    is_generic_critical, s_basis, s_coords, s_mul, s_to_string, singular_product, singular_vectors, submodule_span,
    VermaModule,
};
use verma_core::{QPoly, Rational};

use crate::config::RunConfig;

pub struct Section {
    pub pass: bool,
    pub summary: String,
    pub body: Value,
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub pbw: Arc<PbwBasis>,
    pub dw: DeformedWeight,
    m0: VermaModule<Rational>,
    deformed: VermaModule<QPoly>,
    layers: OnceLock<Result<BTreeMap<Vec<i64>, Layers>, String>>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        let alg = Arc::new(cfg.algebra.clone());
        let pbw = Arc::new(PbwBasis::new(alg, cfg.window, Ordering::Plus));
        let dw = DeformedWeight { base: cfg.lambda.clone(), direction: cfg.xi.clone() };
        let m0 = VermaModule::new(pbw.clone(), dw.base.clone());
        let deformed = deformed_module(pbw.clone(), &dw);
        Context { cfg, pbw, dw, m0, deformed, layers: OnceLock::new() }
    }

    fn delta(&self, s: i64) -> Vec<i64> {
        self.pbw.alg.delta().iter().map(|d| d * s).collect()
    }

    /// Jantzen layers at every weight of the window, computed once.
    fn layers(&self) -> anyhow::Result<&BTreeMap<Vec<i64>, Layers>> {
        let r = self.layers.get_or_init(|| {
            let g = GramBuilder::new(&self.deformed);
            let mut t = BTreeMap::new();
            for nu in self.cfg.window.weights(self.pbw.alg.n_simple()) {
                let l = jantzen_layers(&g, &nu).map_err(|e| format!("nu = {nu:?}: {e}"))?;
                t.insert(nu, l);
            }
            Ok(t)
        });
        r.as_ref().map_err(|e| anyhow!("{e}"))
    }
}

pub fn run_suite(name: &str, ctx: &Context<'_>) -> Section {
    let r = match name {
        "shapovalov-det" => shapovalov_det(ctx),
        "thm01" => thm01(ctx),
        "thm02" => thm02(ctx),
        "sum-formula" => sum_formula(ctx),
        "construct" => construct(ctx),
        "heisenberg" => heisenberg(ctx),
        "characters" => characters(ctx),
        other => Err(anyhow!("unknown suite {other}")),
    };
    r.unwrap_or_else(|e| Section { pass: false, summary: format!("error: {e}"), body: json!({ "error": e.to_string() }) })
}

fn shapovalov_det(ctx: &Context<'_>) -> anyhow::Result<Section> {
    let alg = &ctx.pbw.alg;
    let w = Window::new(ctx.cfg.nu_max_delta, ctx.cfg.window.h_max);
    let tau = ch_verma(alg, w);
    let mut lines = Vec::new();
    let mut rows_total = 0;
    let mut pass = true;
    for line in default_lines(alg, &ctx.dw.base) {
        let m = line_module(ctx.pbw.clone(), &line);
        let g = GramBuilder::new(&m);
        let mut rows = Vec::new();
        for nu in w.weights(alg.n_simple()) {
            let row = det_vs_product_check(&g, &tau, &line, &nu).map_err(|e| anyhow!("nu = {nu:?}: {e}"))?;
            pass &= row.matches;
            rows.push(row);
        }
        rows_total += rows.len();
        lines.push(json!({
            "direction": line.direction.values.iter().cloned().map(verma_core::scalar::JsonQ).collect::<Vec<_>>(),
            "rows": rows,
        }));
    }
    Ok(Section { pass, summary: format!("{rows_total} determinant rows on {} lines", lines.len()), body: json!({ "lines": lines }) })
}

fn thm01(ctx: &Context<'_>) -> anyhow::Result<Section> {
    let m = &ctx.m0;
    let alg = m.alg();
    let w = ctx.cfg.window;
    let gen = is_generic_critical(alg, &m.lambda, &w);
    if !gen.is_generic_critical() {
        return Ok(Section {
            pass: false,
            summary: "weight is not certified generic critical".into(),
            body: json!({ "genericity": gen }),
        });
    }
    let minus = minus_basis(&ctx.pbw);
    let mut pass = true;
    let mut rows = Vec::new();
    let mut sing = Vec::new();
    for s in 0..=w.s_max {
        let sb = singular_vectors(m, s)?;
        let basis = s_basis(alg.rank(), s);
        let mut ranks = Vec::new();
        for minus_side in [false, true] {
            let images: Vec<Vec<Rational>> = sb
                .vectors
                .iter()
                .map(|v| {
                    let z = if minus_side { m.hc_minus(&minus, v)? } else { m.hc_plus(v)? };
                    Ok(s_coords(&z, &basis))
                })
                .collect::<verma_core::Result<_>>()?;
            ranks.push(span_rank(&images, basis.len()));
        }
        let ok = sb.vectors.len() == basis.len() && ranks.iter().all(|&r| r == basis.len());
        pass &= ok;
        rows.push(json!({
            "s": s, "singular_dim": sb.vectors.len(), "S_dim": basis.len(),
            "hc_plus_rank": ranks[0], "hc_minus_rank": ranks[1], "pass": ok,
        }));
        sing.push(sb);
    }
    let mut products = 0;
    let mut multiplicative = true;
    for a in 1..=w.s_max {
        for b in 1..=(w.s_max - a) {
            for v in &sing[a as usize].vectors {
                for u in &sing[b as usize].vectors {
                    let prod = singular_product(m, v, u, &gen)?;
                    multiplicative &= m.hc_plus(&prod)? == s_mul(&m.hc_plus(v)?, &m.hc_plus(u)?);
                    products += 1;
                }
            }
        }
    }
    pass &= multiplicative;
    let mut spans = Vec::new();
    for s in 1..=w.s_max.min(2) {
        let shift = ctx.delta(s);
        let tau = ch_verma(alg, w);
        for (i, v) in sing[s as usize].vectors.iter().enumerate() {
            let dims = submodule_span(m, std::slice::from_ref(v))?;
            let mut bad = Vec::new();
            for (nu, d) in dims {
                let rest: Vec<i64> = nu.iter().zip(&shift).map(|(a, b)| a - b).collect();
                let want = if rest.iter().all(|&c| c >= 0) { tau.get(&rest) } else { 0 };
                if d as i64 != want {
                    bad.push(json!({ "nu": nu, "dim": d, "expected": want }));
                }
            }
            pass &= bad.is_empty();
            spans.push(json!({ "s": s, "vector": i, "mismatches": bad }));
        }
    }
    let all: Vec<_> = sing.iter().skip(1).flat_map(|s| s.vectors.iter().cloned()).collect();
    let cor = cor01_check(m, &all)?;
    pass &= cor.pass;
    Ok(Section {
        pass,
        summary: format!(
            "singular dims {:?}, {products} products",
            sing.iter().map(|s| s.vectors.len()).collect::<Vec<_>>()
        ),
        body: json!({
            "singular": rows,
            "products": products,
            "multiplicative": multiplicative,
            "submodules": spans,
            "cor01": cor,
        }),
    })
}

fn thm02(ctx: &Context<'_>) -> anyhow::Result<Section> {
    let table = ctx.layers()?;
    let mut rows = Vec::new();
    let mut pass = true;
    let mut imaginary = BTreeMap::new();
    for s in 0..=ctx.cfg.window.s_max {
        let nu = ctx.delta(s);
        let l = &table[&nu];
        imaginary.insert(nu, l.clone());
        if s == 0 {
            continue;
        }
        let r = thm02_check(&ctx.m0, l, s)?;
        pass &= r.iter().all(|x| x.pass);
        rows.extend(r);
    }
    let nested = table.values().all(layers_nested);
    let closed = layers_closed(&ctx.m0, table)?;
    pass &= nested && closed;
    let report = JantzenReport::new(&ctx.dw, &imaginary);
    Ok(Section {
        pass,
        summary: format!("{} (s, k) rows, layers nested and closed: {}", rows.len(), nested && closed),
        body: json!({ "layers": report.layers, "lambda": report.lambda, "xi": report.xi, "rows": rows, "nested": nested, "closed": closed }),
    })
}

fn sum_formula(ctx: &Context<'_>) -> anyhow::Result<Section> {
    let alg = &ctx.pbw.alg;
    let w = ctx.cfg.window;
    let critical = alg.pair(
        &ctx.dw.base.values.iter().zip(&alg.rho.values).map(|(a, b)| a + b).collect::<Vec<_>>(),
        &alg.root_functional(&alg.delta()),
    ) == Rational::from_integer(0.into());
    let tau = ch_verma(alg, w);
    let mut rows = Vec::new();
    let mut pass = true;
    for (nu, l) in ctx.layers()? {
        let row = sum_formula_check(l, alg, &tau, critical);
        let predicted = critical.then(|| predicted_layer_dims(alg, w, nu, l.dims.len() - 1));
        let dims_ok = predicted.as_ref().map_or(true, |p| p.iter().zip(&l.dims).all(|(a, b)| *a == *b as i64));
        pass &= row.pass && dims_ok;
        rows.push(json!({ "row": row, "dims": l.dims, "predicted_dims": predicted, "dims_match": dims_ok }));
    }
    Ok(Section { pass, summary: format!("{} weights", rows.len()), body: json!({ "critical": critical, "rows": rows }) })
}

fn construct(ctx: &Context<'_>) -> anyhow::Result<Section> {
    let alg = &ctx.pbw.alg;
    let local = local_module(ctx.pbw.clone(), &ctx.dw);
    let cons = Constructor::new(&local, None);
    let g = GramBuilder::new(&ctx.deformed);
    let mut pass = true;
    let mut monomials = Vec::new();
    for s in 1..=ctx.cfg.window.s_max.min(3) {
        for z in s_basis(alg.rank(), s) {
            let r = monomial_check(&cons, &ctx.m0, &g, &z).map_err(|e| anyhow!("z = {}: {e}", s_to_string(alg, &z)))?;
            pass &= r.pass();
            monomials.push(r);
        }
    }
    let h = vec![(0usize, Rational::one())];
    let mut level = Vec::new();
    for m in 1..=ctx.cfg.window.s_max.min(2) {
        let lc = level_coefficient(ctx.pbw.clone(), ctx.dw.base.finite(), &h, &h, m)?;
        let ratio = &lc.c.0 / q(m, 1);
        let ok = lc.pass && ratio == alg.dual_coxeter;
        pass &= ok;
        level.push(json!({ "coefficient": lc, "c_over_m": verma_core::scalar::JsonQ(ratio), "pass": ok }));
    }
    let s_max = ctx.cfg.window.s_max;
    let mut product_rule = Vec::new();
    for s in 0..s_max {
        for z in s_basis(alg.rank(), s) {
            let ok = product_rule_check(&cons, (0, 1), &z)?;
            pass &= ok;
            product_rule.push(json!({ "z": s_to_string(alg, &z), "pass": ok }));
        }
    }
    let annihilation = if s_max >= 2 { Some(cartan_modes_annihilate(&cons, &h, &h, 2)?) } else { None };
    pass &= annihilation.unwrap_or(true);
    Ok(Section {
        pass,
        summary: format!("{} monomials, {} level coefficients", monomials.len(), level.len()),
        body: json!({ "monomials": monomials, "level": level, "product_rule": product_rule, "cartan_modes_annihilate": annihilation }),
    })
}

fn heisenberg(ctx: &Context<'_>) -> anyhow::Result<Section> {
    let alg = &ctx.pbw.alg;
    let s_max = ctx.cfg.window.s_max;
    let vacuum = simplicity_and_adic_check(alg, &[q(1, 1), q(-3, 2)], s_max)?;
    let table = ctx.layers()?;
    let verma: Vec<Vec<usize>> = (0..=s_max).map(|s| table[&ctx.delta(s)].dims.clone()).collect();
    let corr = correspondence_check(&ctx.m0, &verma, s_max)?;
    let pass = vacuum.iter().all(|r| r.pass) && corr.iter().all(|r| r.matches);
    Ok(Section {
        pass,
        summary: format!("{} vacuum degrees, {} correspondence rows", vacuum.len(), corr.len()),
        body: json!({ "vacuum": vacuum, "correspondence": corr }),
    })
}

fn characters(ctx: &Context<'_>) -> anyhow::Result<Section> {
    let alg = &ctx.pbw.alg;
    let w = ctx.cfg.window;
    let brute = ch_simple_bruteforce(&ctx.m0)?;
    let kk = kk_character(alg, w);
    let mismatches: Vec<Vec<i64>> =
        w.weights(alg.n_simple()).into_iter().filter(|nu| brute.get(nu) != kk.get(nu)).collect();
    let factor = ch_verma(alg, w) == kk.convolve(&verma_core::characters::ch_s(alg, w));
    Ok(Section {
        pass: mismatches.is_empty() && factor,
        summary: format!("{} weights, {} mismatches", w.weights(alg.n_simple()).len(), mismatches.len()),
        body: json!({ "simple": kk.to_json(), "mismatches": mismatches, "verma_factorizes": factor }),
    })
}
