//! Certificates: a verdict, cited steps with exact arithmetic, and an independent checker.
//!
//! Arithmetic lines are chains of relations over exact rationals, for example
//! `2*24 + 3*(-16) = 0 >= 0` or `28 ≡ 4 (mod 8)`. Several chains may be joined by `;`.
//! Quoted strings compare with `=` and `!=`. Every line must evaluate to true, so a failed
//! hypothesis is logged as its true negation.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::arith::{fmt_rat, parse_rat, to_rat, Int, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    EinsteinObstructed,
    HitchinThorpeOk,
    HitchinThorpeViolated,
    Homeomorphic,
    NotHomeomorphic,
    NoVerdict,
    DiffeomorphicUnderRewriteAxioms,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::EinsteinObstructed => "einstein_obstructed",
            Verdict::HitchinThorpeOk => "hitchin_thorpe_ok",
            Verdict::HitchinThorpeViolated => "hitchin_thorpe_violated",
            Verdict::Homeomorphic => "homeomorphic",
            Verdict::NotHomeomorphic => "not_homeomorphic",
            Verdict::NoVerdict => "no_verdict",
            Verdict::DiffeomorphicUnderRewriteAxioms => "diffeomorphic_under_rewrite_axioms",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        [
            Verdict::EinsteinObstructed,
            Verdict::HitchinThorpeOk,
            Verdict::HitchinThorpeViolated,
            Verdict::Homeomorphic,
            Verdict::NotHomeomorphic,
            Verdict::NoVerdict,
            Verdict::DiffeomorphicUnderRewriteAxioms,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: String,
    pub citation: String,
    pub arithmetic: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub steps: Vec<Step>,
    /// Echoed inputs; `inputs["check"]` names the procedure the checker re-runs.
    pub inputs: Map<String, Value>,
}

impl Certificate {
    pub fn new(check: &str) -> Self {
        let mut inputs = Map::new();
        inputs.insert("check".to_string(), Value::from(check));
        Certificate { verdict: Verdict::NoVerdict, steps: Vec::new(), inputs }
    }

    pub fn input(&mut self, key: &str, value: Value) -> &mut Self {
        self.inputs.insert(key.to_string(), value);
        self
    }

    pub fn step(&mut self, rule: &str, citation: &str, arithmetic: impl Into<String>) -> &mut Self {
        self.steps.push(Step {
            rule: rule.to_string(),
            citation: citation.to_string(),
            arithmetic: arithmetic.into(),
        });
        self
    }

    /// JSON with sorted keys (serde_json's default map is ordered).
    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| json!({"rule": s.rule, "citation": s.citation, "arithmetic": s.arithmetic}))
            .collect();
        json!({
            "verdict": self.verdict.as_str(),
            "steps": steps,
            "inputs": Value::Object(self.inputs.clone()),
        })
    }

    pub fn from_json(v: &Value) -> std::result::Result<Certificate, CheckError> {
        let verdict = v
            .get("verdict")
            .and_then(Value::as_str)
            .and_then(Verdict::parse)
            .ok_or_else(|| CheckError::new("missing or unknown verdict"))?;
        let inputs = v
            .get("inputs")
            .and_then(Value::as_object)
            .cloned()
            .ok_or_else(|| CheckError::new("missing inputs"))?;
        let mut steps = Vec::new();
        for s in v.get("steps").and_then(Value::as_array).ok_or_else(|| CheckError::new("missing steps"))? {
            let field = |k: &str| {
                s.get(k)
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .ok_or_else(|| CheckError::new(format!("step without {k}")))
            };
            steps.push(Step { rule: field("rule")?, citation: field("citation")?, arithmetic: field("arithmetic")? });
        }
        Ok(Certificate { verdict, steps, inputs })
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("verdict: {}\n", self.verdict);
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("  {}. [{}] {}\n     ({})\n", i + 1, s.rule, s.arithmetic, s.citation));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckError(pub String);

impl CheckError {
    fn new(msg: impl Into<String>) -> Self {
        CheckError(msg.into())
    }
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckError {}

type CheckResult<T> = std::result::Result<T, CheckError>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Int),
    Str(String),
    Ident(String),
    Op(&'static str),
}

fn tokenize(src: &str) -> CheckResult<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().map_err(|_| CheckError::new("bad number"))?));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            if i == chars.len() {
                return Err(CheckError::new("unterminated string"));
            }
            out.push(Tok::Str(chars[start..i].iter().collect()));
            i += 1;
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let op = match two.as_str() {
            "<=" => Some("<="),
            ">=" => Some(">="),
            "!=" => Some("!="),
            _ => None,
        };
        if let Some(op) = op {
            out.push(Tok::Op(op));
            i += 2;
            continue;
        }
        let op = match c {
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            '(' => "(",
            ')' => ")",
            ',' => ",",
            ';' => ";",
            '=' => "=",
            '<' => "<",
            '>' => ">",
            '≤' => "<=",
            '≥' => ">=",
            '≠' => "!=",
            '≡' => "≡",
            '≢' => "≢",
            other => return Err(CheckError::new(format!("unexpected character {other:?}"))),
        };
        out.push(Tok::Op(op));
        i += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Val {
    Num(Rat),
    Str(String),
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_op(&self, op: &str) -> bool {
        matches!(self.peek(), Some(Tok::Op(o)) if *o == op)
    }

    fn expect_op(&mut self, op: &str) -> CheckResult<()> {
        if self.peek_op(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(CheckError::new(format!("expected `{op}` at token {}", self.pos)))
        }
    }

    fn line(&mut self) -> CheckResult<bool> {
        let mut all = true;
        loop {
            all &= self.chain()?;
            if self.peek_op(";") {
                self.pos += 1;
                continue;
            }
            if self.peek().is_some() {
                return Err(CheckError::new(format!("trailing input at token {}", self.pos)));
            }
            return Ok(all);
        }
    }

    fn chain(&mut self) -> CheckResult<bool> {
        let mut left = self.operand()?;
        let mut relations = 0;
        let mut ok = true;
        while let Some(Tok::Op(op)) = self.peek().cloned() {
            if !matches!(op, "=" | "!=" | "<" | "<=" | ">" | ">=" | "≡" | "≢") {
                break;
            }
            self.pos += 1;
            let right = self.operand()?;
            let holds = if matches!(op, "≡" | "≢") {
                self.expect_op("(")?;
                match self.peek() {
                    Some(Tok::Ident(s)) if s == "mod" => self.pos += 1,
                    _ => return Err(CheckError::new("expected `mod`")),
                }
                let m = self.sum()?;
                self.expect_op(")")?;
                let congruent = congruent(&left, &right, &m)?;
                if op == "≡" {
                    congruent
                } else {
                    !congruent
                }
            } else {
                relate(&left, op, &right)?
            };
            ok &= holds;
            relations += 1;
            left = right;
        }
        if relations == 0 {
            return Err(CheckError::new("a chain needs at least one relation"));
        }
        Ok(ok)
    }

    fn operand(&mut self) -> CheckResult<Val> {
        if let Some(Tok::Str(s)) = self.peek().cloned() {
            self.pos += 1;
            return Ok(Val::Str(s));
        }
        self.sum().map(Val::Num)
    }

    fn sum(&mut self) -> CheckResult<Rat> {
        let mut acc = self.product()?;
        loop {
            if self.peek_op("+") {
                self.pos += 1;
                acc += self.product()?;
            } else if self.peek_op("-") {
                self.pos += 1;
                acc -= self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> CheckResult<Rat> {
        let mut acc = self.unary()?;
        loop {
            if self.peek_op("*") {
                self.pos += 1;
                acc *= self.unary()?;
            } else if self.peek_op("/") {
                self.pos += 1;
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(CheckError::new("division by zero"));
                }
                acc /= d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> CheckResult<Rat> {
        if self.peek_op("-") {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> CheckResult<Rat> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(to_rat(&n))
            }
            Some(Tok::Op("(")) => {
                self.pos += 1;
                let v = self.sum()?;
                self.expect_op(")")?;
                Ok(v)
            }
            Some(Tok::Ident(name)) if name == "floor" => {
                self.pos += 1;
                self.expect_op("(")?;
                let v = self.sum()?;
                self.expect_op(")")?;
                Ok(to_rat(&v.floor().to_integer()))
            }
            Some(Tok::Ident(name)) if name == "gcd" => {
                self.pos += 1;
                self.expect_op("(")?;
                let a = integer(&self.sum()?)?;
                self.expect_op(",")?;
                let b = integer(&self.sum()?)?;
                self.expect_op(")")?;
                Ok(to_rat(&a.gcd(&b)))
            }
            other => Err(CheckError::new(format!("unexpected token {other:?}"))),
        }
    }
}

fn integer(r: &Rat) -> CheckResult<Int> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(CheckError::new(format!("{} is not an integer", fmt_rat(r))))
    }
}

fn congruent(a: &Val, b: &Val, m: &Rat) -> CheckResult<bool> {
    match (a, b) {
        (Val::Num(a), Val::Num(b)) => {
            let m = integer(m)?;
            if !m.is_positive() {
                return Err(CheckError::new("modulus must be positive"));
            }
            Ok((integer(a)? - integer(b)?).mod_floor(&m).is_zero())
        }
        _ => Err(CheckError::new("congruence between strings")),
    }
}

fn relate(a: &Val, op: &str, b: &Val) -> CheckResult<bool> {
    match (a, b) {
        (Val::Num(x), Val::Num(y)) => {
            let ord = x.cmp(y);
            Ok(match op {
                "=" => ord == Ordering::Equal,
                "!=" => ord != Ordering::Equal,
                "<" => ord == Ordering::Less,
                "<=" => ord != Ordering::Greater,
                ">" => ord == Ordering::Greater,
                ">=" => ord != Ordering::Less,
                _ => unreachable!("relation operators are filtered by the caller"),
            })
        }
        (Val::Str(x), Val::Str(y)) => match op {
            "=" => Ok(x == y),
            "!=" => Ok(x != y),
            _ => Err(CheckError::new("strings only support = and !=")),
        },
        _ => Err(CheckError::new("comparison between a string and a number")),
    }
}

/// Evaluates one arithmetic line; `Ok(false)` means it parsed but some relation is false.
pub fn eval_arithmetic(line: &str) -> CheckResult<bool> {
    let mut p = Parser { toks: tokenize(line)?, pos: 0 };
    p.line()
}

fn num(inputs: &Map<String, Value>, key: &str) -> CheckResult<Rat> {
    let v = inputs.get(key).ok_or_else(|| CheckError::new(format!("missing input {key}")))?;
    value_rat(v).ok_or_else(|| CheckError::new(format!("input {key} is not a number")))
}

fn value_rat(v: &Value) -> Option<Rat> {
    match v {
        Value::Number(n) => n.as_i64().map(|x| to_rat(&Int::from(x))),
        Value::String(s) => parse_rat(s),
        _ => None,
    }
}

fn text<'a>(obj: &'a Map<String, Value>, key: &str) -> CheckResult<&'a str> {
    obj.get(key).and_then(Value::as_str).ok_or_else(|| CheckError::new(format!("missing text input {key}")))
}

fn rederive(inputs: &Map<String, Value>) -> CheckResult<Option<Verdict>> {
    let check = text(inputs, "check")?;
    let zero = Rat::zero();
    Ok(Some(match check {
        "hitchin_thorpe" => {
            let chi = num(inputs, "chi")?;
            let tau = num(inputs, "tau")?;
            let two = to_rat(&Int::from(2));
            let three = to_rat(&Int::from(3));
            let plus = &two * &chi + &three * &tau;
            let minus = &two * &chi - &three * &tau;
            if plus >= zero && minus >= zero && chi >= zero {
                Verdict::HitchinThorpeOk
            } else {
                Verdict::HitchinThorpeViolated
            }
        }
        "lebrun" => {
            let c1sq = num(inputs, "c1sq")?;
            let k = num(inputs, "k")?;
            let l = num(inputs, "l")?;
            let sw = text(inputs, "sw")?;
            let lhs = k + to_rat(&Int::from(4)) * l;
            if sw == "yes" && c1sq > zero && lhs * to_rat(&Int::from(3)) >= c1sq {
                Verdict::EinsteinObstructed
            } else {
                Verdict::NoVerdict
            }
        }
        "spin_einstein" => {
            let pieces = inputs
                .get("pieces")
                .and_then(Value::as_array)
                .ok_or_else(|| CheckError::new("missing pieces"))?;
            let m = integer(&num(inputs, "m")?)?;
            let mut hyp = pieces.len() == 4 && m >= Int::from(2) && m <= Int::from(4);
            let mut total = Int::zero();
            let mut c1_sum = Rat::zero();
            for (idx, p) in pieces.iter().enumerate() {
                let p = p.as_object().ok_or_else(|| CheckError::new("piece is not an object"))?;
                let b2p = integer(&num(p, "b2plus")?)?;
                let b1 = num(p, "b1")?;
                hyp &= text(p, "sw_mod2")? == "yes"
                    && b1.is_zero()
                    && b2p.mod_floor(&Int::from(4)) == Int::from(3);
                total += &b2p;
                if Int::from(idx) < m {
                    c1_sum += num(p, "c1sq")?;
                }
            }
            hyp &= total.mod_floor(&Int::from(8)) == Int::from(4);
            let n_b2p = num(inputs, "n_b2plus")?;
            let n_c1 = num(inputs, "n_c1sq")?;
            hyp &= n_b2p.is_zero();
            let lhs = to_rat(&(Int::from(4) * &m)) - n_c1;
            if hyp && lhs * to_rat(&Int::from(3)) >= c1_sum {
                Verdict::EinsteinObstructed
            } else {
                Verdict::NoVerdict
            }
        }
        "homeo" => {
            let a = inputs.get("a").ok_or_else(|| CheckError::new("missing key a"))?;
            let b = inputs.get("b").ok_or_else(|| CheckError::new("missing key b"))?;
            if a == b {
                Verdict::Homeomorphic
            } else {
                Verdict::NotHomeomorphic
            }
        }
        "rewrite" => {
            let same_form = text(inputs, "lhs_form")? == text(inputs, "rhs_form")?;
            let same_inv = inputs.get("lhs_invariants") == inputs.get("rhs_invariants");
            let canonical = |k: &str| inputs.get(k).and_then(Value::as_bool).unwrap_or(false);
            if same_form && same_inv && canonical("lhs_canonical") && canonical("rhs_canonical") {
                Verdict::DiffeomorphicUnderRewriteAxioms
            } else {
                Verdict::NoVerdict
            }
        }
        _ => return Ok(None),
    }))
}

/// Re-evaluates every step and, for known checks, re-derives the verdict from the inputs.
pub fn check_certificate(cert: &Certificate) -> CheckResult<()> {
    for (i, s) in cert.steps.iter().enumerate() {
        match eval_arithmetic(&s.arithmetic) {
            Ok(true) => {}
            Ok(false) => {
                return Err(CheckError::new(format!("step {} [{}] is false: {}", i + 1, s.rule, s.arithmetic)))
            }
            Err(e) => {
                return Err(CheckError::new(format!("step {} [{}] does not parse: {e}", i + 1, s.rule)))
            }
        }
        if s.citation.trim().is_empty() {
            return Err(CheckError::new(format!("step {} [{}] has no citation", i + 1, s.rule)));
        }
    }
    if let Some(expected) = rederive(&cert.inputs)? {
        if expected != cert.verdict {
            return Err(CheckError::new(format!(
                "verdict {} but the inputs give {}",
                cert.verdict, expected
            )));
        }
    }
    Ok(())
}
