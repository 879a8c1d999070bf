//! Exact numerical invariants of a closed oriented 4-manifold.

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::arith::{as_int, int, int_json, rat, rat_json, to_rat, Int, Rat};
use crate::error::{Error, Result};

/// Euler characteristic, signature and first Betti number; everything else is derived.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InvariantRecord {
    pub chi: Int,
    pub tau: Int,
    pub b1: Int,
}

impl InvariantRecord {
    pub fn new(chi: Int, tau: Int, b1: Int) -> Self {
        InvariantRecord { chi, tau, b1 }
    }

    pub fn simply(chi: i64, tau: i64) -> Self {
        InvariantRecord::new(int(chi), int(tau), Int::zero())
    }

    /// Builds a record from Chern numbers; `c1^2 - 2 c2` must be divisible by 3.
    pub fn from_chern(c1sq: Int, c2: Int, b1: Int) -> Result<Self> {
        let num = &c1sq - int(2) * &c2;
        if !(&num % int(3)).is_zero() {
            return Err(Error::InvalidExpr(format!(
                "c1^2 = {c1sq}, c2 = {c2} give a non-integral signature"
            )));
        }
        Ok(InvariantRecord::new(c2, num / int(3), b1))
    }

    pub fn c1sq(&self) -> Int {
        int(2) * &self.chi + int(3) * &self.tau
    }

    pub fn c2(&self) -> Int {
        self.chi.clone()
    }

    /// `(chi + tau) / 4`, which equals `(c1^2 + c2) / 12`.
    pub fn chi_h(&self) -> Rat {
        rat(&self.chi + &self.tau, int(4))
    }

    pub fn b2(&self) -> Int {
        &self.chi - int(2) + int(2) * &self.b1
    }

    pub fn b2plus(&self) -> Rat {
        rat(self.b2() + &self.tau, int(2))
    }

    pub fn b2minus(&self) -> Rat {
        rat(self.b2() - &self.tau, int(2))
    }

    pub fn b2plus_int(&self) -> Option<Int> {
        as_int(&self.b2plus())
    }

    pub fn b2minus_int(&self) -> Option<Int> {
        as_int(&self.b2minus())
    }

    /// `2 chi - 3 tau`, the other Hitchin-Thorpe quantity.
    pub fn c1sq_reversed(&self) -> Int {
        int(2) * &self.chi - int(3) * &self.tau
    }

    /// Componentwise scaling, as for a d-sheeted cover of a manifold with `b1 = 0`.
    pub fn scaled(&self, d: u64) -> InvariantRecord {
        let d = Int::from(d);
        InvariantRecord::new(&self.chi * &d, &self.tau * &d, self.b1.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "chi": int_json(&self.chi),
            "tau": int_json(&self.tau),
            "b1": int_json(&self.b1),
            "c1sq": int_json(&self.c1sq()),
            "c2": int_json(&self.c2()),
            "chi_h": rat_json(&self.chi_h()),
            "b2": int_json(&self.b2()),
            "b2plus": rat_json(&self.b2plus()),
            "b2minus": rat_json(&self.b2minus()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiReport {
    pub b2: Int,
    pub b2plus: Rat,
    pub b2minus: Rat,
    pub warning: Option<String>,
}

/// Splits `b2` by the signature; a half-integral or negative result only raises a warning.
pub fn derive_betti(rec: &InvariantRecord) -> BettiReport {
    let b2 = rec.b2();
    let b2plus = rec.b2plus();
    let b2minus = rec.b2minus();
    let mut problems = Vec::new();
    if !b2plus.is_integer() || !b2minus.is_integer() {
        problems.push(format!("b2 = {b2} and tau = {} have different parity", rec.tau));
    }
    if b2plus.is_negative() || b2minus.is_negative() {
        problems.push(format!("|tau| = {} exceeds b2 = {b2}", rec.tau.abs()));
    }
    if rec.b1.is_negative() {
        problems.push(format!("b1 = {} is negative", rec.b1));
    }
    let warning = if problems.is_empty() { None } else { Some(problems.join("; ")) };
    BettiReport { b2, b2plus, b2minus, warning }
}

pub fn chi_h_from_chern(c1sq: &Int, c2: &Int) -> Rat {
    to_rat(&(c1sq + c2)) / to_rat(&int(12))
}
