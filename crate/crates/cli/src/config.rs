//! Run configuration: JSON file merged with command-line flags (flags win).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use verma_core::algebra::{affine_from_catalog, AffineAlgebra, Weight};
use verma_core::pbw::Window;
use verma_core::scalar::JsonQ;
use verma_core::verma::default_generic_weight;
use verma_core::Rational;

pub const SUITES: [&str; 7] =
    ["shapovalov-det", "thm01", "thm02", "sum-formula", "construct", "heisenberg", "characters"];

/// Every field optional so that file and flags can be layered.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub algebra: Option<String>,
    /// `"critical"` or a rational.
    pub level: Option<String>,
    /// Finite part of `λ`, comma separated rationals.
    pub lambda: Option<String>,
    /// Value of `λ` on `D`.
    pub d: Option<String>,
    /// Full deformation direction `[h.., K, D]`, comma separated.
    pub xi: Option<String>,
    pub smax: Option<i64>,
    pub hmax: Option<i64>,
    pub suites: Option<Vec<String>>,
    pub nu_max_delta: Option<i64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| anyhow!("config {}: line {} column {}: {e}", path.display(), e.line(), e.column()))
    }

    /// `self` wins over `base`.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            algebra: self.algebra.or(base.algebra),
            level: self.level.or(base.level),
            lambda: self.lambda.or(base.lambda),
            d: self.d.or(base.d),
            xi: self.xi.or(base.xi),
            smax: self.smax.or(base.smax),
            hmax: self.hmax.or(base.hmax),
            suites: self.suites.or(base.suites),
            nu_max_delta: self.nu_max_delta.or(base.nu_max_delta),
            out: self.out.or(base.out),
            threads: self.threads.or(base.threads),
        }
    }
}

/// A validated configuration.
pub struct RunConfig {
    pub algebra: AffineAlgebra,
    pub lambda: Weight<Rational>,
    pub xi: Weight<Rational>,
    pub window: Window,
    pub suites: Vec<String>,
    pub nu_max_delta: i64,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

/// Problems the user must fix; the process exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn parse_rational(field: &str, s: &str) -> anyhow::Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| usage(format!("{field}: `{s}` is not a rational")))
}

fn parse_list(field: &str, s: &str) -> anyhow::Result<Vec<Rational>> {
    s.split(',').map(|t| parse_rational(field, t)).collect()
}

impl RunConfig {
    pub fn resolve(p: PartialConfig, env_threads: Option<String>) -> anyhow::Result<Self> {
        let name = p.algebra.unwrap_or_else(|| "sl2".into());
        let algebra = affine_from_catalog(&name).map_err(|e| usage(format!("UnknownAlgebra: {e}")))?;
        let r = algebra.rank();
        let mut lambda = default_generic_weight(&algebra);
        if let Some(s) = &p.lambda {
            let f = parse_list("lambda", s)?;
            if f.len() != r {
                bail!(usage(format!("lambda: expected {r} finite coordinates, got {}", f.len())));
            }
            lambda.values[..r].clone_from_slice(&f);
        }
        match p.level.as_deref() {
            None | Some("critical") => lambda.values[r] = algebra.critical_level(),
            Some(s) => lambda.values[r] = parse_rational("level", s)?,
        }
        if let Some(s) = &p.d {
            lambda.values[r + 1] = parse_rational("d", s)?;
        }
        let xi = match &p.xi {
            None => algebra.lambda0(),
            Some(s) => {
                let v = parse_list("xi", s)?;
                if v.len() != r + 2 {
                    bail!(usage(format!("xi: expected {} coordinates [h.., K, D], got {}", r + 2, v.len())));
                }
                Weight { values: v }
            }
        };
        let smax = p.smax.unwrap_or(2);
        let height = AffineAlgebra::height(&algebra.delta());
        let hmax = p.hmax.unwrap_or(smax * height);
        if smax < 1 {
            bail!(usage(format!("smax: must be at least 1, got {smax}")));
        }
        if hmax < smax * height {
            bail!(usage(format!("hmax: must be at least smax × height(δ) = {}, got {hmax}", smax * height)));
        }
        let mut suites: Vec<String> = Vec::new();
        for s in p.suites.unwrap_or_else(|| vec!["all".into()]) {
            for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                if t == "all" {
                    suites.extend(SUITES.iter().map(|x| x.to_string()));
                } else if SUITES.contains(&t) {
                    suites.push(t.to_string());
                } else {
                    bail!(usage(format!("suite: unknown suite `{t}` (known: {}, all)", SUITES.join(", "))));
                }
            }
        }
        suites.sort_by_key(|s| SUITES.iter().position(|x| x == s));
        suites.dedup();
        let nu_max_delta = p.nu_max_delta.unwrap_or(smax);
        if nu_max_delta < 0 || nu_max_delta > smax {
            bail!(usage(format!("nu-max-delta: must lie in 0..={smax}, got {nu_max_delta}")));
        }
        let mut threads = p.threads.unwrap_or(0);
        if let Some(t) = env_threads {
            threads = t.trim().parse().map_err(|_| usage(format!("VERMA_CRITICAL_THREADS: `{t}` is not a count")))?;
        }
        Ok(RunConfig { algebra, lambda, xi, window: Window::new(smax, hmax), suites, nu_max_delta, out: p.out, threads })
    }

    /// The configuration echoed into the report.
    pub fn echo(&self) -> serde_json::Value {
        let q = |w: &Weight<Rational>| w.values.iter().cloned().map(JsonQ).collect::<Vec<_>>();
        serde_json::json!({
            "algebra": self.algebra.base.name,
            "lambda": q(&self.lambda),
            "xi": q(&self.xi),
            "smax": self.window.s_max,
            "hmax": self.window.h_max,
            "suites": self.suites,
            "nu_max_delta": self.nu_max_delta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(p: PartialConfig) -> anyhow::Result<RunConfig> {
        RunConfig::resolve(p, None)
    }

    #[test]
    fn defaults_and_precedence() {
        let file = PartialConfig { algebra: Some("sl3".into()), smax: Some(1), ..Default::default() };
        let flags = PartialConfig { smax: Some(2), ..Default::default() };
        let c = resolve(flags.over(file)).unwrap();
        assert_eq!(c.algebra.base.name, "sl3");
        assert_eq!(c.window, Window::new(2, 6));
        assert_eq!(c.suites.len(), SUITES.len());
        assert_eq!(c.lambda.values[2], Rational::from_integer((-3).into()));
    }

    #[test]
    fn window_sanity() {
        let p = PartialConfig { smax: Some(2), hmax: Some(3), ..Default::default() };
        assert!(resolve(p).err().unwrap().downcast_ref::<UsageError>().is_some());
        let p = PartialConfig { smax: Some(0), ..Default::default() };
        assert!(resolve(p).is_err());
    }

    #[test]
    fn weights_parse() {
        let p = PartialConfig { lambda: Some("1/3".into()), level: Some("-1/2".into()), xi: Some("0,1,0".into()), ..Default::default() };
        let c = resolve(p).unwrap();
        assert_eq!(c.lambda.values[0], parse_rational("", "1/3").unwrap());
        assert_eq!(c.lambda.values[1], parse_rational("", "-1/2").unwrap());
        assert!(resolve(PartialConfig { lambda: Some("x".into()), ..Default::default() }).is_err());
        assert!(resolve(PartialConfig { algebra: Some("e8".into()), ..Default::default() }).is_err());
    }

    #[test]
    fn env_overrides_threads() {
        let p = PartialConfig { threads: Some(3), ..Default::default() };
        assert_eq!(RunConfig::resolve(p.clone(), Some("5".into())).unwrap().threads, 5);
        assert_eq!(RunConfig::resolve(p, None).unwrap().threads, 3);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, "{\n  \"algebra\": \"sl2\",\n  \"smx\": 3\n}").unwrap();
        let e = PartialConfig::from_file(&path).unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
    }
}
