//! Rewriting connected sums to `a CP2 # b CP2b` or `p K3 # q (S2xS2)`.
//!
//! Every rule only consumes a summand it also replaces, and it never lowers the count of the
//! atom that enables another rule. A rule that becomes applicable therefore stays applicable,
//! which makes the fixed point independent of the rule order.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith::{uint, Int};
use crate::dsl;
use crate::error::{Error, Result};
use crate::eval::{evaluate, Evaluated};
use crate::expr::ManifoldExpr;
use crate::flags::Tri;
use crate::invariants::InvariantRecord;
use crate::obstruction::{Certificate, Verdict};
use crate::registry::Registry;
use crate::surgery::connected_sum_record;

const RA: &str = "R-A: (S2xS2) # CP2b = CP2 # 2 CP2b (Hirzebruch surface identity)";
const RB: &str = "R-B: M # CP2 is completely decomposable when M is almost completely decomposable";
const RE: &str =
    "R-E: elliptic surfaces and their log transforms completely decompose after one S2xS2 (Mandelbaum, Gompf)";
const RX: &str = "R-E: X442 # n0 (S2xS2) is diffeomorphic to 4 K3 # (7 + n0)(S2xS2) (Wall stabilization)";
const REWRITE: &str = "rewrite axioms: each step is one of the cited decomposition rules";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    /// `(S2xS2) # CP2b -> CP2 # 2 CP2b`.
    RA,
    /// `M # CP2 -> (b2+(M)+1) CP2 # b2-(M) CP2b` for ACD `M`.
    RB,
    /// `Y_j` or an odd log transform of `E(2)` absorbs one `S2xS2` into a `K3`.
    REY,
    /// `E(2n) # S2xS2 -> n K3 # n (S2xS2)`.
    REE,
    /// `X442 # n0 (S2xS2) -> 4 K3 # (7 + n0)(S2xS2)`.
    REX,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::RA => "R-A",
            RuleId::RB => "R-B",
            RuleId::REY => "R-E(Y)",
            RuleId::REE => "R-E(E)",
            RuleId::REX => "R-E(X442)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    NonSpin,
    Spin,
}

impl Mode {
    pub fn rules(self) -> Vec<RuleId> {
        match self {
            Mode::NonSpin => vec![RuleId::RA, RuleId::RB],
            Mode::Spin => vec![RuleId::REY, RuleId::REE, RuleId::REX],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::NonSpin => "non-spin",
            Mode::Spin => "spin",
        }
    }
}

/// Atom counts plus summands no rule has consumed; `rest` is kept sorted by printed form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalForm {
    pub cp2: u64,
    pub cp2bar: u64,
    pub s2xs2: u64,
    pub k3: u64,
    pub rest: Vec<(ManifoldExpr, u64)>,
}

impl NormalForm {
    pub fn non_spin(a: u64, b: u64) -> Self {
        NormalForm { cp2: a, cp2bar: b, ..Default::default() }
    }

    pub fn spin(p: u64, q: u64) -> Self {
        NormalForm { k3: p, s2xs2: q, ..Default::default() }
    }

    pub fn is_canonical(&self, mode: Mode) -> bool {
        self.rest.is_empty()
            && match mode {
                Mode::NonSpin => self.s2xs2 == 0 && self.k3 == 0,
                Mode::Spin => self.cp2 == 0 && self.cp2bar == 0,
            }
    }

    fn atoms(&self) -> [(ManifoldExpr, u64); 4] {
        [
            (ManifoldExpr::k3(), self.k3),
            (ManifoldExpr::s2xs2(), self.s2xs2),
            (ManifoldExpr::cp2(), self.cp2),
            (ManifoldExpr::cp2bar(), self.cp2bar),
        ]
    }

    pub fn to_expr(&self) -> ManifoldExpr {
        let mut parts: Vec<(ManifoldExpr, u64)> = self.rest.clone();
        parts.extend(self.atoms().into_iter().filter(|(_, m)| *m > 0));
        if parts.is_empty() {
            return ManifoldExpr::prim("S4");
        }
        ManifoldExpr::sum(parts)
    }

    fn add_rest(&mut self, part: ManifoldExpr, m: u64) {
        match self.rest.iter_mut().find(|(p, _)| *p == part) {
            Some(slot) => slot.1 += m,
            None => {
                self.rest.push((part, m));
                self.rest.sort_by_key(|(p, _)| dsl::print(p));
            }
        }
    }

    fn take_rest(&mut self, idx: usize) -> ManifoldExpr {
        let part = self.rest[idx].0.clone();
        self.rest[idx].1 -= 1;
        if self.rest[idx].1 == 0 {
            self.rest.remove(idx);
        }
        part
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (p, m) in &self.rest {
            let body = match p {
                ManifoldExpr::ConnectedSum(_) => format!("({})", dsl::print(p)),
                _ => dsl::print(p),
            };
            terms.push(if *m == 1 { body } else { format!("{m} {body}") });
        }
        for (p, m) in self.atoms() {
            match m {
                0 => {}
                1 => terms.push(dsl::print(&p)),
                _ => terms.push(format!("{m} {}", dsl::print(&p))),
            }
        }
        if terms.is_empty() {
            write!(f, "S4")
        } else {
            write!(f, "{}", terms.join(" # "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: RuleId,
    pub citation: String,
    /// Euler characteristic and signature of the rewritten summands, before and after.
    pub arithmetic: String,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub mode: Mode,
    pub form: NormalForm,
    pub canonical: bool,
    pub trace: Vec<TraceStep>,
    pub record: InvariantRecord,
    pub spin: Tri,
}

impl Normalized {
    pub fn trace_json(&self) -> Value {
        Value::Array(
            self.trace
                .iter()
                .map(|s| json!({"rule": s.rule.name(), "citation": s.citation, "arithmetic": s.arithmetic, "result": s.result}))
                .collect(),
        )
    }
}

pub fn mode_of(ev: &Evaluated) -> Mode {
    if ev.flags.spin == Tri::Yes {
        Mode::Spin
    } else {
        Mode::NonSpin
    }
}

/// Normalizes with the mode given by the spin flag and the default rule order.
pub fn normalize(reg: &Registry, expr: &ManifoldExpr) -> Result<Normalized> {
    let ev = evaluate(reg, expr)?;
    let mode = mode_of(&ev);
    normalize_with(reg, expr, mode, &mode.rules(), 1)
}

/// Normalizes in `mode` trying rules in `order`; `n0` is the stabilization count for `X442`.
pub fn normalize_with(
    reg: &Registry,
    expr: &ManifoldExpr,
    mode: Mode,
    order: &[RuleId],
    n0: u64,
) -> Result<Normalized> {
    let ev = evaluate(reg, expr)?;
    if mode != mode_of(&ev) {
        return Err(Error::InvalidExpr(format!(
            "{} rules requested for a manifold whose spin flag is {}",
            mode.as_str(),
            ev.flags.spin.as_str()
        )));
    }
    if order.iter().any(|r| !mode.rules().contains(r)) {
        return Err(Error::InvalidExpr(format!("rule order mixes in rules outside the {} set", mode.as_str())));
    }
    let mut form = NormalForm::default();
    for (part, m) in expr.flatten_sum() {
        match part.primitive_name() {
            Some("CP2") if part.int_params().is_empty() => form.cp2 += m,
            Some("CP2b") => form.cp2bar += m,
            Some("S2xS2") => form.s2xs2 += m,
            Some("K3") => form.k3 += m,
            Some("S4") => {}
            _ => form.add_rest(part, m),
        }
    }
    let mut engine = Engine { reg, n0, form, trace: Vec::new(), records: BTreeMap::new() };
    let target = ev.record.clone();
    engine.check_preserved(&target, ev.flags.spin)?;
    'outer: loop {
        for rule in order {
            if engine.apply(*rule)? {
                engine.check_preserved(&target, ev.flags.spin)?;
                continue 'outer;
            }
        }
        break;
    }
    let canonical = engine.form.is_canonical(mode);
    Ok(Normalized {
        mode,
        canonical,
        form: engine.form,
        trace: engine.trace,
        record: target,
        spin: ev.flags.spin,
    })
}

struct Engine<'a> {
    reg: &'a Registry,
    n0: u64,
    form: NormalForm,
    trace: Vec<TraceStep>,
    records: BTreeMap<String, Evaluated>,
}

impl Engine<'_> {
    fn eval_part(&mut self, part: &ManifoldExpr) -> Result<Evaluated> {
        let key = dsl::print(part);
        if let Some(e) = self.records.get(&key) {
            return Ok(e.clone());
        }
        let e = evaluate(self.reg, part)?;
        self.records.insert(key, e.clone());
        Ok(e)
    }

    fn check_preserved(&mut self, target: &InvariantRecord, spin: Tri) -> Result<()> {
        let expr = self.form.to_expr();
        let ev = evaluate(self.reg, &expr)?;
        if ev.record != *target || ev.flags.spin != spin {
            return Err(Error::Internal(format!(
                "rewrite changed invariants: {} has chi = {}, tau = {}, b1 = {}, spin = {}",
                self.form, ev.record.chi, ev.record.tau, ev.record.b1, ev.flags.spin.as_str()
            )));
        }
        Ok(())
    }

    fn push(&mut self, rule: RuleId, citation: &str, lhs: &[(InvariantRecord, u64)], rhs: &[(InvariantRecord, u64)]) {
        let arithmetic = format!("{}; {}", euler_line(lhs, rhs), signature_line(lhs, rhs));
        self.trace.push(TraceStep {
            rule,
            citation: citation.to_string(),
            arithmetic,
            result: self.form.to_string(),
        });
    }

    fn find_rest(&mut self, pred: impl Fn(&ManifoldExpr, &Evaluated) -> bool) -> Result<Option<usize>> {
        for idx in 0..self.form.rest.len() {
            let part = self.form.rest[idx].0.clone();
            let ev = self.eval_part(&part)?;
            if pred(&part, &ev) {
                return Ok(Some(idx));
            }
        }
        Ok(None)
    }

    fn apply(&mut self, rule: RuleId) -> Result<bool> {
        let s2 = InvariantRecord::simply(4, 0);
        let cp2 = InvariantRecord::simply(3, 1);
        let cp2b = InvariantRecord::simply(3, -1);
        let k3 = InvariantRecord::simply(24, -16);
        match rule {
            RuleId::RA => {
                if self.form.s2xs2 == 0 || self.form.cp2bar == 0 {
                    return Ok(false);
                }
                self.form.s2xs2 -= 1;
                self.form.cp2 += 1;
                self.form.cp2bar += 1;
                self.push(rule, RA, &[(s2, 1), (cp2b.clone(), 1)], &[(cp2, 1), (cp2b, 2)]);
                Ok(true)
            }
            RuleId::RB => {
                if self.form.cp2 == 0 {
                    return Ok(false);
                }
                let (part, ev) = if self.form.k3 > 0 {
                    self.form.k3 -= 1;
                    (ManifoldExpr::k3(), self.eval_part(&ManifoldExpr::k3())?)
                } else if self.form.s2xs2 > 0 {
                    self.form.s2xs2 -= 1;
                    (ManifoldExpr::s2xs2(), self.eval_part(&ManifoldExpr::s2xs2())?)
                } else {
                    let found = self.find_rest(|_, ev| {
                        ev.flags.acd == Tri::Yes
                            && ev.flags.pi1.is_trivial()
                            && ev.record.b1.is_zero()
                            && ev.record.b2plus_int().is_some()
                    })?;
                    match found {
                        Some(idx) => {
                            let part = self.form.take_rest(idx);
                            let ev = self.eval_part(&part)?;
                            (part, ev)
                        }
                        None => return Ok(false),
                    }
                };
                let to_u64 = |v: Option<Int>| v.and_then(|x| x.to_u64());
                let (bp, bm) = match (to_u64(ev.record.b2plus_int()), to_u64(ev.record.b2minus_int())) {
                    (Some(p), Some(m)) => (p, m),
                    _ => return Err(Error::Internal(format!("{} has non-integral b2", dsl::print(&part)))),
                };
                self.form.cp2 += bp;
                self.form.cp2bar += bm;
                let source = ev.flags.rule_for("acd").unwrap_or("declared").to_string();
                let citation = format!("{RB}; ACD of {}: {source}", dsl::print(&part));
                self.push(rule, &citation, &[(ev.record.clone(), 1), (cp2.clone(), 1)], &[(cp2, bp + 1), (cp2b, bm)]);
                Ok(true)
            }
            RuleId::REY => {
                if self.form.s2xs2 == 0 {
                    return Ok(false);
                }
                let found = self.find_rest(|p, _| is_y_like(p))?;
                let Some(idx) = found else { return Ok(false) };
                let part = self.form.take_rest(idx);
                let ev = self.eval_part(&part)?;
                self.form.k3 += 1;
                self.push(rule, RE, &[(ev.record, 1), (s2.clone(), 1)], &[(k3, 1), (s2, 1)]);
                Ok(true)
            }
            RuleId::REE => {
                if self.form.s2xs2 == 0 {
                    return Ok(false);
                }
                let found = self.find_rest(|p, _| even_elliptic(p).is_some())?;
                let Some(idx) = found else { return Ok(false) };
                let part = self.form.take_rest(idx);
                let half = even_elliptic(&part).unwrap_or(1);
                let ev = self.eval_part(&part)?;
                self.form.k3 += half;
                self.form.s2xs2 = self.form.s2xs2 - 1 + half;
                self.push(rule, RE, &[(ev.record, 1), (s2.clone(), 1)], &[(k3, half), (s2, half)]);
                Ok(true)
            }
            RuleId::REX => {
                if self.form.s2xs2 < self.n0 {
                    return Ok(false);
                }
                let found = self.find_rest(|p, _| p.primitive_name() == Some("X442"))?;
                let Some(idx) = found else { return Ok(false) };
                let part = self.form.take_rest(idx);
                let ev = self.eval_part(&part)?;
                self.form.k3 += 4;
                self.form.s2xs2 += 7;
                let n0 = self.n0;
                self.push(rule, RX, &[(ev.record, 1), (s2.clone(), n0)], &[(k3, 4), (s2, 7 + n0)]);
                Ok(true)
            }
        }
    }
}

fn is_y_like(p: &ManifoldExpr) -> bool {
    match p {
        ManifoldExpr::Primitive { name, .. } => name == "Y",
        ManifoldExpr::LogTransform { inner, multiplicity } => {
            multiplicity % 2 == 1 && **inner == ManifoldExpr::elliptic(2)
        }
        _ => false,
    }
}

fn even_elliptic(p: &ManifoldExpr) -> Option<u64> {
    if p.primitive_name() != Some("E") {
        return None;
    }
    match p.int_params().as_slice() {
        [n] if *n > 0 && n % 2 == 0 => Some((*n / 2) as u64),
        _ => None,
    }
}

fn sum_terms(parts: &[(InvariantRecord, u64)], field: impl Fn(&InvariantRecord) -> &Int) -> String {
    let terms: Vec<String> = parts
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|(r, m)| format!("{m}*({})", field(r)))
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// `sum m_i chi_i - 2 (sum m_i - 1)` on both sides; empty sides are the 4-sphere.
fn euler_line(lhs: &[(InvariantRecord, u64)], rhs: &[(InvariantRecord, u64)]) -> String {
    let side = |parts: &[(InvariantRecord, u64)]| {
        let count: u64 = parts.iter().map(|(_, m)| m).sum();
        if count == 0 {
            "2".to_string()
        } else {
            format!("{} - 2*({count} - 1)", sum_terms(parts, |r| &r.chi))
        }
    };
    let value = connected_sum_record(&nonzero(lhs)).chi;
    format!("{} = {} = {value}", side(lhs), side(rhs))
}

fn signature_line(lhs: &[(InvariantRecord, u64)], rhs: &[(InvariantRecord, u64)]) -> String {
    let value = connected_sum_record(&nonzero(lhs)).tau;
    format!("{} = {} = {value}", sum_terms(lhs, |r| &r.tau), sum_terms(rhs, |r| &r.tau))
}

fn nonzero(parts: &[(InvariantRecord, u64)]) -> Vec<(InvariantRecord, u64)> {
    parts.iter().filter(|(_, m)| *m > 0).cloned().collect()
}

/// `V # CP2 = X1 # X2 # 2g CP2 # (2g + n - 1) CP2b` for a normal-crossing degeneration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmSchema {
    pub g: u64,
    pub n: u64,
    pub cp2: u64,
    pub cp2bar: u64,
}

impl MmSchema {
    pub fn rhs_text(&self) -> String {
        let mut terms = vec!["X1".to_string(), "X2".to_string()];
        if self.cp2 > 0 {
            terms.push(format!("{} CP2", self.cp2));
        }
        if self.cp2bar > 0 {
            terms.push(format!("{} CP2b", self.cp2bar));
        }
        terms.join(" # ")
    }

    /// The only `chi(V)` compatible with additivity on both sides.
    pub fn chi_v(&self, chi1: &Int, chi2: &Int) -> Int {
        chi1 + chi2 + uint(4 * self.g + self.n) - uint(4)
    }

    /// Signature bookkeeping as supplied by the degeneration lemma, not derived here.
    pub fn tau_v(&self, tau1: &Int, tau2: &Int) -> Int {
        tau1 + tau2 - uint(self.n)
    }

    /// Euler characteristics of both sides for given `chi(V)`, `chi(X1)`, `chi(X2)`.
    pub fn euler_sides(&self, chi_v: &Int, chi1: &Int, chi2: &Int) -> (Int, Int) {
        let lhs = chi_v + uint(3) - uint(2);
        let parts = 2 + self.cp2 + self.cp2bar;
        let rhs = chi1 + chi2 + uint(3 * (self.cp2 + self.cp2bar)) - uint(2 * (parts - 1));
        (lhs, rhs)
    }
}

pub fn mm_rule(g: u64, n: u64) -> Result<MmSchema> {
    if n == 0 {
        return Err(Error::InvalidExpr("mm_rule needs n >= 1".to_string()));
    }
    Ok(MmSchema { g, n, cp2: 2 * g, cp2bar: 2 * g + n - 1 })
}

/// Normalizes both sides; equal canonical forms give a rewrite-axiom verdict.
pub fn verify_diffeo_claim(reg: &Registry, lhs: &ManifoldExpr, rhs: &ManifoldExpr) -> Result<Certificate> {
    let l = normalize(reg, lhs)?;
    let r = normalize(reg, rhs)?;
    if l.record != r.record || l.spin != r.spin {
        return Err(Error::MismatchedInvariants(format!(
            "chi, tau, b1, spin = {}, {}, {}, {} vs {}, {}, {}, {}",
            l.record.chi,
            l.record.tau,
            l.record.b1,
            l.spin.as_str(),
            r.record.chi,
            r.record.tau,
            r.record.b1,
            r.spin.as_str()
        )));
    }
    let mut c = Certificate::new("rewrite");
    let (lf, rf) = (l.form.to_string(), r.form.to_string());
    c.input("lhs", Value::from(dsl::print(lhs)))
        .input("rhs", Value::from(dsl::print(rhs)))
        .input("lhs_form", Value::from(lf.clone()))
        .input("rhs_form", Value::from(rf.clone()))
        .input("lhs_canonical", Value::from(l.canonical))
        .input("rhs_canonical", Value::from(r.canonical))
        .input("lhs_invariants", l.record.to_json())
        .input("rhs_invariants", r.record.to_json());
    for (side, n) in [("lhs", &l), ("rhs", &r)] {
        for (idx, s) in n.trace.iter().enumerate() {
            c.step(&format!("{side}_{}_{}", idx + 1, s.rule.name()), &s.citation, s.arithmetic.clone());
        }
    }
    c.step(
        "invariants_equal",
        REWRITE,
        format!(
            "{} = {}; {} = {}",
            l.record.chi, r.record.chi, l.record.tau, r.record.tau
        ),
    );
    let same = lf == rf && l.canonical && r.canonical;
    c.step(
        "canonical_forms",
        REWRITE,
        format!("\"{lf}\" {} \"{rf}\"", if lf == rf { "=" } else { "!=" }),
    );
    c.verdict = if same { Verdict::DiffeomorphicUnderRewriteAxioms } else { Verdict::NoVerdict };
    Ok(c)
}
