//! Existence constants that the cited geography and stabilization results leave unspecified.
//!
//! File format: one `key = value` per line, `#` starts a comment. Keys: `c_eps`, `eps`, `wall_n0`, `n1`.

use std::path::Path;

use num_traits::Signed;

use crate::arith::{fmt_rat, parse_rat, rat, Rat};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Braungardt-Kotschick constant `c(eps')`.
    pub c_eps: Rat,
    pub eps: Rat,
    /// Wall stabilization count `n0`; spin families need `d > n0`.
    pub wall_n0: u64,
    /// Main-pair families need `chi_h > n1`.
    pub n1: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config { c_eps: rat(1, 1), eps: rat(1, 10), wall_n0: 1, n1: 0 }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", idx + 1)))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", idx + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let positive = |v: &str| {
            parse_rat(v)
                .filter(|r| r.is_positive())
                .ok_or_else(|| Error::Config(format!("{key} must be a positive rational, got {v:?}")))
        };
        let natural = |v: &str| {
            v.parse::<u64>().map_err(|_| Error::Config(format!("{key} must be a natural number, got {v:?}")))
        };
        match key {
            "c_eps" => self.c_eps = positive(value)?,
            "eps" => self.eps = positive(value)?,
            "wall_n0" => self.wall_n0 = natural(value)?,
            "n1" => self.n1 = natural(value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        format!(
            "c_eps = {}\neps = {}\nwall_n0 = {}\nn1 = {}\n",
            fmt_rat(&self.c_eps),
            fmt_rat(&self.eps),
            self.wall_n0,
            self.n1
        )
    }
}
