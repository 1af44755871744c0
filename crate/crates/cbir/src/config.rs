//! `key = value` run configuration for selection and evaluation.
//!
//! Blank lines and `#` comments are ignored. Keys:
//!
//! ```text
//! gamma delta alpha beta rho phi omega tau0 theta   reals
//! ants iterations k                                 positive integers
//! queries_per_class                                 integer, or `all` (0 also means all)
//! elitism                                           iteration | global
//! lambda_wavelet_stat lambda_dcd lambda_hist        non-negative reals
//! seed                                              u64
//! ```
//!
//! When `theta` is absent it is derived from the configured `phi` and `omega`.

use std::fmt::Write as _;
use std::path::Path;

use cbir_core::aco::default_theta;
use cbir_core::{AcoConfig, Elitism, GroupWeights, QueryPolicy};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub aco: AcoConfig,
    pub weights: GroupWeights,
    pub seed: Option<u64>,
}

fn real(path: &Path, line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::parse(path, line, format!("{key}: expected a number, got {v:?}")))
}

fn count(path: &Path, line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::parse(path, line, format!("{key}: expected a non-negative integer, got {v:?}")))
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut theta = None;
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::parse(path, line, format!("expected `key = value`, got {content:?}")));
            };
            let (key, v) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(Error::parse(path, line, format!("duplicate key {key}")));
            }
            seen.push(key.to_string());
            let a = &mut cfg.aco;
            match key {
                "gamma" => a.gamma = real(path, line, key, v)?,
                "delta" => a.delta = real(path, line, key, v)?,
                "alpha" => a.alpha = real(path, line, key, v)?,
                "beta" => a.beta = real(path, line, key, v)?,
                "rho" => a.rho = real(path, line, key, v)?,
                "phi" => a.phi = real(path, line, key, v)?,
                "omega" => a.omega = real(path, line, key, v)?,
                "tau0" => a.tau0 = real(path, line, key, v)?,
                "theta" => theta = Some(real(path, line, key, v)?),
                "ants" => a.ants = count(path, line, key, v)?,
                "iterations" => a.iterations = count(path, line, key, v)?,
                "k" => a.k = count(path, line, key, v)?,
                "queries_per_class" => {
                    a.queries = match v {
                        "all" | "0" => QueryPolicy::All,
                        _ => QueryPolicy::Stratified {
                            per_class: count(path, line, key, v)?,
                        },
                    }
                }
                "elitism" => {
                    a.elitism = match v {
                        "iteration" => Elitism::IterationBest,
                        "global" => Elitism::GlobalBest,
                        _ => {
                            return Err(Error::parse(
                                path,
                                line,
                                format!("elitism: expected `iteration` or `global`, got {v:?}"),
                            ))
                        }
                    }
                }
                "lambda_wavelet_stat" => cfg.weights.wavelet_stat = real(path, line, key, v)?,
                "lambda_dcd" => cfg.weights.dcd = real(path, line, key, v)?,
                "lambda_hist" => cfg.weights.hist = real(path, line, key, v)?,
                "seed" => {
                    cfg.seed = Some(v.parse().map_err(|_| {
                        Error::parse(path, line, format!("seed: expected an unsigned integer, got {v:?}"))
                    })?)
                }
                _ => return Err(Error::parse(path, line, format!("unknown key {key:?}"))),
            }
        }
        cfg.aco.theta = theta.unwrap_or_else(|| default_theta(cfg.aco.phi, cfg.aco.omega));
        cfg.aco.validate()?;
        cfg.weights.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Every setting as `key = value` lines, in a fixed order; parses back to `self`.
    pub fn echo(&self) -> String {
        let a = &self.aco;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("gamma", a.gamma.to_string());
        kv("delta", a.delta.to_string());
        kv("alpha", a.alpha.to_string());
        kv("beta", a.beta.to_string());
        kv("rho", a.rho.to_string());
        kv("phi", a.phi.to_string());
        kv("omega", a.omega.to_string());
        kv("ants", a.ants.to_string());
        kv("iterations", a.iterations.to_string());
        kv("tau0", a.tau0.to_string());
        kv("theta", a.theta.to_string());
        kv("k", a.k.to_string());
        kv(
            "queries_per_class",
            match a.queries {
                QueryPolicy::All => "all".to_string(),
                QueryPolicy::Stratified { per_class } => per_class.to_string(),
            },
        );
        kv(
            "elitism",
            match a.elitism {
                Elitism::IterationBest => "iteration",
                Elitism::GlobalBest => "global",
            }
            .to_string(),
        );
        kv("lambda_wavelet_stat", self.weights.wavelet_stat.to_string());
        kv("lambda_dcd", self.weights.dcd.to_string());
        kv("lambda_hist", self.weights.hist.to_string());
        if let Some(seed) = self.seed {
            kv("seed", seed.to_string());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse(text, Path::new("test.cfg"))
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse("# nothing\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn values_and_comments() {
        let c = parse("ants = 4 # few\niterations=3\nqueries_per_class = all\nelitism = global\nlambda_hist = 0.5\nseed = 9\n")
            .unwrap();
        assert_eq!(c.aco.ants, 4);
        assert_eq!(c.aco.iterations, 3);
        assert_eq!(c.aco.queries, QueryPolicy::All);
        assert_eq!(c.aco.elitism, Elitism::GlobalBest);
        assert_eq!(c.weights.hist, 0.5);
        assert_eq!(c.seed, Some(9));
    }

    #[test]
    fn theta_follows_phi_and_omega_unless_given() {
        let c = parse("phi = 0.5\nomega = 0.5\n").unwrap();
        assert_eq!(c.aco.theta, default_theta(0.5, 0.5));
        let c = parse("theta = inf\n").unwrap();
        assert_eq!(c.aco.theta, f64::INFINITY);
    }

    #[test]
    fn echo_parses_back() {
        let c = parse("rho = 0.35\nk = 7\nqueries_per_class = 3\nseed = 42\n").unwrap();
        assert_eq!(parse(&c.echo()).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(parse(&d.echo()).unwrap(), d);
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse("ants = 3\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(matches!(parse("ants = x").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(parse("ants").unwrap_err(), Error::Parse { .. }));
        assert!(matches!(parse("k = 1\nk = 2").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(matches!(parse("elitism = best").unwrap_err(), Error::Parse { .. }));
        assert!(matches!(parse("rho = 1.5").unwrap_err(), Error::Core(_)));
        assert!(matches!(parse("lambda_dcd = -1").unwrap_err(), Error::Core(_)));
    }
}
