//! Text syntax for expressions and region queries.
//!
//! ```text
//! program := query | expr
//! expr    := term ('#' term)*
//! term    := [INT ['*']] atom
//! atom    := NAME ['(' arg (',' arg)* ')'] | '(' expr ')'
//!          | 'cover' '(' BASE ',' 'd' '=' INT ',' 'branch' '=' (INT | '(' INT ',' INT ')') ')'
//!          | 'bicyclic' '(' INT ',' INT ';' INT ',' INT ',' INT ',' INT ')'
//!          | 'quotient' '(' expr ',' INT [',' ('standard' | 'weighted')] ')'
//!          | 'fibersum' '(' expr ',' expr ',' ['g' '='] INT ')'
//!          | 'logt' '(' expr ',' INT ')'
//! query   := ('region' | 'bk') '(' NAME '=' value (',' NAME '=' value)* ')'
//! ```
//! A sum of one term with multiplicity 1 is that term, so printing and reparsing is the identity.

use crate::arith::{fmt_rat, parse_rat, Rat};
use crate::error::{Error, Result};
use crate::expr::{Action, Base, DivisorClass, GroupLabel, ManifoldExpr, Param};
use crate::geography::{GeographyQuery, Query};
use crate::registry::{self, Registry};

#[derive(Debug, Clone, PartialEq)]
pub enum Program {
    Expr(ManifoldExpr),
    Query(Query),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Int(String),
    Decimal(String),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                Kind::Decimal(chars[start..i].iter().collect())
            } else {
                Kind::Int(chars[start..i].iter().collect())
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Kind::Ident(chars[start..i].iter().collect())
        } else if "#*(),;=/-".contains(c) {
            i += 1;
            Kind::Sym(c)
        } else {
            return Err(Error::Syntax { line, column, message: format!("unexpected character {c:?}") });
        };
        column += i - start;
        out.push(Token { kind, line: tl, column: tc });
    }
    out.push(Token { kind: Kind::End, line, column });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    reg: &'a Registry,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Kind {
        &self.toks[(self.pos + offset).min(self.toks.len() - 1)].kind
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax { line: t.line, column: t.column, message: message.into() })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().kind == Kind::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<()> {
        match &self.peek().kind {
            Kind::Ident(s) if s == name => {
                self.bump();
                Ok(())
            }
            _ => self.err(format!("expected `{name}`")),
        }
    }

    fn uint(&mut self) -> Result<u64> {
        match self.peek().kind.clone() {
            Kind::Int(s) => match s.parse::<u64>() {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(_) => self.err("integer out of range"),
            },
            _ => self.err("expected an integer"),
        }
    }

    fn positive(&mut self, what: &str) -> Result<u64> {
        let v = self.uint()?;
        if v == 0 {
            return Err(Error::NegativeDegree(format!("{what} = 0")));
        }
        Ok(v)
    }

    fn sint(&mut self) -> Result<i64> {
        let negative = self.is_sym('-');
        if negative {
            self.bump();
        }
        let v = self.uint()?;
        let v = i64::try_from(v).or_else(|_| self.err("integer out of range"))?;
        Ok(if negative { -v } else { v })
    }

    fn done(&mut self) -> Result<()> {
        if self.peek().kind == Kind::End {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn expr(&mut self) -> Result<ManifoldExpr> {
        let mut parts = vec![self.term()?];
        while self.is_sym('#') {
            self.bump();
            parts.push(self.term()?);
        }
        Ok(ManifoldExpr::sum(parts))
    }

    fn term(&mut self) -> Result<(ManifoldExpr, u64)> {
        if let Kind::Int(_) = self.peek().kind {
            let m = self.positive("multiplicity")?;
            if self.is_sym('*') {
                self.bump();
            }
            return Ok((self.atom()?, m));
        }
        Ok((self.atom()?, 1))
    }

    fn atom(&mut self) -> Result<ManifoldExpr> {
        if self.is_sym('(') {
            self.bump();
            let e = self.expr()?;
            self.expect_sym(')')?;
            return Ok(e);
        }
        let name = match self.peek().kind.clone() {
            Kind::Ident(s) => s,
            _ => return self.err("expected a manifold name"),
        };
        let start = self.peek().clone();
        self.bump();
        match name.as_str() {
            "cover" => self.cover(),
            "bicyclic" => self.bicyclic(),
            "quotient" => self.quotient(),
            "fibersum" => self.fibersum(),
            "logt" => self.logt(),
            _ => {
                let canonical = if name == "CP2bar" { "CP2b".to_string() } else { name };
                if !self.reg.is_known_name(&canonical) {
                    let _ = start;
                    return Err(Error::UnknownPrimitive(canonical));
                }
                let mut params = Vec::new();
                if self.is_sym('(') {
                    self.bump();
                    loop {
                        params.push(self.param()?);
                        if self.is_sym(',') {
                            self.bump();
                            continue;
                        }
                        break;
                    }
                    self.expect_sym(')')?;
                }
                Ok(ManifoldExpr::Primitive { name: canonical, params })
            }
        }
    }

    fn param(&mut self) -> Result<Param> {
        match self.peek().kind.clone() {
            Kind::Int(_) | Kind::Sym('-') => Ok(Param::Int(self.sint()?)),
            Kind::Ident(s) => {
                self.bump();
                let group = match s.as_str() {
                    "trivial" => GroupLabel::Trivial,
                    "unknown" => GroupLabel::Unknown,
                    "Z" if self.is_sym('/') => {
                        self.bump();
                        GroupLabel::Cyclic(self.positive("cyclic order")?)
                    }
                    _ => GroupLabel::Presented(s),
                };
                Ok(Param::Group(group))
            }
            _ => self.err("expected an integer or a group"),
        }
    }

    fn keyword_value(&mut self, key: &str) -> Result<()> {
        self.expect_ident(key)?;
        self.expect_sym('=')
    }

    fn cover(&mut self) -> Result<ManifoldExpr> {
        self.expect_sym('(')?;
        let base = match self.peek().kind.clone() {
            Kind::Ident(s) if s == "CP2" => Base::CP2,
            Kind::Ident(s) if s == "CP1xCP1" => Base::CP1xCP1,
            _ => return self.err("expected CP2 or CP1xCP1"),
        };
        self.bump();
        self.expect_sym(',')?;
        self.keyword_value("d")?;
        let d = self.positive("d")?;
        self.expect_sym(',')?;
        self.keyword_value("branch")?;
        let branch = if self.is_sym('(') {
            self.bump();
            let p = self.uint()?;
            self.expect_sym(',')?;
            let q = self.uint()?;
            self.expect_sym(')')?;
            DivisorClass::bidegree(p, q)
        } else {
            DivisorClass::cp2(self.uint()?)
        };
        self.expect_sym(')')?;
        if branch.base != base {
            return Err(Error::InvalidExpr(format!("branch {branch} does not live on {}", base.name())));
        }
        if !branch.is_divisible_by(d) {
            return Err(Error::NonDivisibleBranch(format!("{branch} by {d}")));
        }
        Ok(ManifoldExpr::cyclic_cover(base, d, branch))
    }

    fn bicyclic(&mut self) -> Result<ManifoldExpr> {
        self.expect_sym('(')?;
        let d = self.positive("d")?;
        self.expect_sym(',')?;
        let p = self.positive("p")?;
        self.expect_sym(';')?;
        let mut rest = [0u64; 4];
        for (idx, (slot, name)) in rest.iter_mut().zip(["a", "b", "m", "n"]).enumerate() {
            if idx > 0 {
                self.expect_sym(',')?;
            }
            *slot = self.positive(name)?;
        }
        self.expect_sym(')')?;
        Ok(ManifoldExpr::bicyclic(d, p, rest[0], rest[1], rest[2], rest[3]))
    }

    fn quotient(&mut self) -> Result<ManifoldExpr> {
        self.expect_sym('(')?;
        let inner = self.expr()?;
        self.expect_sym(',')?;
        let d = self.positive("quotient order")?;
        let mut action = Action::Standard;
        if self.is_sym(',') {
            self.bump();
            action = match self.peek().kind.clone() {
                Kind::Ident(s) if s == "weighted" => Action::Weighted,
                Kind::Ident(s) if s == "standard" => Action::Standard,
                _ => return self.err("expected `standard` or `weighted`"),
            };
            self.bump();
        }
        self.expect_sym(')')?;
        Ok(ManifoldExpr::quotient(inner, d, action))
    }

    fn fibersum(&mut self) -> Result<ManifoldExpr> {
        self.expect_sym('(')?;
        let left = self.expr()?;
        self.expect_sym(',')?;
        let right = self.expr()?;
        self.expect_sym(',')?;
        if matches!(&self.peek().kind, Kind::Ident(s) if s == "g") {
            self.keyword_value("g")?;
        }
        let g = self.uint()?;
        self.expect_sym(')')?;
        Ok(ManifoldExpr::fiber_sum(left, right, g))
    }

    fn logt(&mut self) -> Result<ManifoldExpr> {
        self.expect_sym('(')?;
        let inner = self.expr()?;
        self.expect_sym(',')?;
        let m = self.positive("multiplicity")?;
        self.expect_sym(')')?;
        Ok(ManifoldExpr::log_transform(inner, m))
    }

    fn value(&mut self) -> Result<Rat> {
        let negative = self.is_sym('-');
        if negative {
            self.bump();
        }
        let mut text = match self.peek().kind.clone() {
            Kind::Int(s) | Kind::Decimal(s) => s,
            _ => return self.err("expected a number"),
        };
        self.bump();
        if self.is_sym('/') {
            self.bump();
            match self.peek().kind.clone() {
                Kind::Int(s) => {
                    text = format!("{text}/{s}");
                    self.bump();
                }
                _ => return self.err("expected a denominator"),
            }
        }
        let v = match parse_rat(&text) {
            Some(v) => v,
            None => return self.err(format!("bad number {text}")),
        };
        Ok(if negative { -v } else { v })
    }

    fn query(&mut self, kind: &str) -> Result<Query> {
        self.bump();
        self.expect_sym('(')?;
        let mut d = None;
        let mut eps = None;
        let mut c = None;
        let mut bounds = None;
        loop {
            let key = match self.peek().kind.clone() {
                Kind::Ident(s) => s,
                _ => return self.err("expected a parameter name"),
            };
            self.bump();
            self.expect_sym('=')?;
            match key.as_str() {
                "d" => d = Some(self.positive("d")?),
                "eps" | "epsilon" | "eps_prime" => eps = Some(self.value()?),
                "c" => c = Some(self.value()?),
                "bounds" => {
                    self.expect_sym('(')?;
                    let x = self.uint()?;
                    self.expect_sym(',')?;
                    let y = self.uint()?;
                    self.expect_sym(')')?;
                    bounds = Some((x, y));
                }
                other => return self.err(format!("unknown parameter `{other}`")),
            }
            if self.is_sym(',') {
                self.bump();
                continue;
            }
            break;
        }
        self.expect_sym(')')?;
        let missing = |what: &str| Error::InvalidExpr(format!("{kind} query needs `{what}`"));
        let eps = eps.ok_or_else(|| missing("eps"))?;
        let c = c.ok_or_else(|| missing("c"))?;
        let bounds = bounds.ok_or_else(|| missing("bounds"))?;
        match kind {
            "bk" => Ok(Query::Bk { eps_prime: eps, c, bounds }),
            _ => {
                let q = GeographyQuery { d: d.ok_or_else(|| missing("d"))?, epsilon: eps, c_of_eps: c, bounds };
                q.validate()?;
                Ok(Query::FreeActions(q))
            }
        }
    }
}

pub fn parse_with(reg: &Registry, text: &str) -> Result<ManifoldExpr> {
    let mut p = Parser { toks: lex(text)?, pos: 0, reg };
    if p.peek().kind == Kind::End {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    p.done()?;
    Ok(e)
}

/// Parses an expression against the built-in registry.
pub fn parse(text: &str) -> Result<ManifoldExpr> {
    parse_with(registry::standard(), text)
}

pub fn parse_program(reg: &Registry, text: &str) -> Result<Program> {
    let mut p = Parser { toks: lex(text)?, pos: 0, reg };
    if let Kind::Ident(name) = p.peek().kind.clone() {
        if (name == "region" || name == "bk") && *p.peek_at(1) == Kind::Sym('(') {
            let q = p.query(&name)?;
            p.done()?;
            return Ok(Program::Query(q));
        }
    }
    if p.peek().kind == Kind::End {
        return p.err("empty program");
    }
    let e = p.expr()?;
    p.done()?;
    Ok(Program::Expr(e))
}

fn print_param(p: &Param) -> String {
    match p {
        Param::Int(v) => v.to_string(),
        Param::Group(g) => g.to_string(),
    }
}

fn print_term(e: &ManifoldExpr, m: u64) -> String {
    let body = match e {
        ManifoldExpr::ConnectedSum(_) => format!("({})", print(e)),
        _ => print(e),
    };
    if m == 1 {
        body
    } else {
        format!("{m}*{body}")
    }
}

pub fn print(e: &ManifoldExpr) -> String {
    match e {
        ManifoldExpr::Primitive { name, params } => {
            if params.is_empty() {
                name.clone()
            } else {
                let args: Vec<String> = params.iter().map(print_param).collect();
                format!("{name}({})", args.join(","))
            }
        }
        ManifoldExpr::CyclicCover { base, d, branch } => {
            format!("cover({}, d={d}, branch={branch})", base.name())
        }
        ManifoldExpr::BicyclicCover { d, p, a, b, m, n } => format!("bicyclic({d},{p};{a},{b},{m},{n})"),
        ManifoldExpr::Quotient { inner, d, action } => match action {
            Action::Standard => format!("quotient({}, {d})", print(inner)),
            Action::Weighted => format!("quotient({}, {d}, weighted)", print(inner)),
        },
        ManifoldExpr::ConnectedSum(parts) => {
            let terms: Vec<String> = parts.iter().map(|(p, m)| print_term(p, *m)).collect();
            terms.join(" # ")
        }
        ManifoldExpr::FiberSum { left, right, genus } => {
            format!("fibersum({}, {}, g={genus})", print(left), print(right))
        }
        ManifoldExpr::LogTransform { inner, multiplicity } => format!("logt({}, {multiplicity})", print(inner)),
    }
}

/// Renders a query back into the text syntax.
pub fn print_query(q: &Query) -> String {
    match q {
        Query::Bk { eps_prime, c, bounds } => {
            format!("bk(eps={}, c={}, bounds=({},{}))", fmt_rat(eps_prime), fmt_rat(c), bounds.0, bounds.1)
        }
        Query::FreeActions(g) => format!(
            "region(d={}, eps={}, c={}, bounds=({},{}))",
            g.d,
            fmt_rat(&g.epsilon),
            fmt_rat(&g.c_of_eps),
            g.bounds.0,
            g.bounds.1
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse("CP2 # 2*CP2b").unwrap(),
            ManifoldExpr::sum(vec![(ManifoldExpr::cp2(), 1), (ManifoldExpr::cp2bar(), 2)])
        );
        assert_eq!(
            parse("quotient(bicyclic(3,2;3,3,3,3), 3)").unwrap(),
            ManifoldExpr::quotient(ManifoldExpr::bicyclic(3, 2, 3, 3, 3, 3), 3, Action::Standard)
        );
        assert_eq!(
            parse("cover(CP2, d=2, branch=8)").unwrap(),
            ManifoldExpr::cyclic_cover(Base::CP2, 2, DivisorClass::cp2(8))
        );
        assert_eq!(parse("CP2bar").unwrap(), ManifoldExpr::cp2bar());
        assert_eq!(parse("15 CP2 # 77 CP2b").unwrap(), parse("15*CP2 # 77*CP2b").unwrap());
        assert_eq!(
            parse("XG(24,-16,Z/5)").unwrap(),
            ManifoldExpr::xg(24, -16, GroupLabel::Cyclic(5))
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse("CP2 #\n  2*Foo") {
            Err(Error::UnknownPrimitive(n)) => assert_eq!(n, "Foo"),
            other => panic!("{other:?}"),
        }
        match parse("CP2 # # K3") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 7)),
            other => panic!("{other:?}"),
        }
        match parse("K3 $") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 4)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("cover(CP2, d=3, branch=8)"), Err(Error::NonDivisibleBranch(_))));
    }

    #[test]
    fn printing_round_trips() {
        for text in [
            "2*(CP2 # K3) # S2xS2",
            "fibersum(XG(24,-16,G), E(4), g=1) # 9*CP2b",
            "logt(E(2), 3)",
            "quotient(bicyclic(2,3;6,3,1,1), 2, weighted)",
            "cover(CP1xCP1, d=2, branch=(2,2))",
        ] {
            let e = parse(text).unwrap();
            assert_eq!(parse(&print(&e)).unwrap(), e, "{text}");
        }
    }

    #[test]
    fn queries() {
        let q = parse_program(registry::standard(), "region(d=2, eps=0.1, c=1, bounds=(40,40))").unwrap();
        match q {
            Program::Query(Query::FreeActions(g)) => {
                assert_eq!(g.epsilon, rat(1, 10));
                assert_eq!(g.bounds, (40, 40));
            }
            other => panic!("{other:?}"),
        }
        let b = parse_program(registry::standard(), "bk(eps=1, c=100, bounds=(20,40))").unwrap();
        assert!(matches!(b, Program::Query(Query::Bk { .. })));
    }
}
