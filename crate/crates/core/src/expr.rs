//! Term trees for 4-manifolds and the divisor classes used as branch data.

use std::fmt;

use crate::arith::{int, uint, Int};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    CP2,
    CP1xCP1,
}

impl Base {
    pub fn name(self) -> &'static str {
        match self {
            Base::CP2 => "CP2",
            Base::CP1xCP1 => "CP1xCP1",
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Base::CP2 => 1,
            Base::CP1xCP1 => 2,
        }
    }

    /// First Chern class of the base in the degree basis.
    pub fn c1(self) -> ClassVec {
        match self {
            Base::CP2 => ClassVec::new(self, vec![int(3)]),
            Base::CP1xCP1 => ClassVec::new(self, vec![int(2), int(2)]),
        }
    }
}

/// An effective class given by its degree (CP2) or bidegree (CP1xCP1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    pub base: Base,
    pub degrees: Vec<u64>,
}

impl DivisorClass {
    pub fn cp2(k: u64) -> Self {
        DivisorClass { base: Base::CP2, degrees: vec![k] }
    }

    pub fn bidegree(p: u64, q: u64) -> Self {
        DivisorClass { base: Base::CP1xCP1, degrees: vec![p, q] }
    }

    pub fn is_well_formed(&self) -> bool {
        self.degrees.len() == self.base.rank()
    }

    pub fn is_divisible_by(&self, d: u64) -> bool {
        d != 0 && self.degrees.iter().all(|k| k % d == 0)
    }

    /// `self / d`; callers check divisibility first.
    pub fn divided(&self, d: u64) -> DivisorClass {
        DivisorClass { base: self.base, degrees: self.degrees.iter().map(|k| k / d).collect() }
    }

    pub fn scaled(&self, d: u64) -> DivisorClass {
        DivisorClass { base: self.base, degrees: self.degrees.iter().map(|k| k * d).collect() }
    }

    pub fn as_vec(&self) -> ClassVec {
        ClassVec::new(self.base, self.degrees.iter().map(|&k| uint(k)).collect())
    }

    pub fn dot(&self, other: &DivisorClass) -> Int {
        self.as_vec().dot(&other.as_vec())
    }

    pub fn self_intersection(&self) -> Int {
        self.dot(self)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.base {
            Base::CP2 => write!(f, "{}", self.degrees[0]),
            Base::CP1xCP1 => write!(f, "({},{})", self.degrees[0], self.degrees[1]),
        }
    }
}

/// A signed class on one of the two bases, used for canonical and Chern classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVec {
    pub base: Base,
    pub coeffs: Vec<Int>,
}

impl ClassVec {
    pub fn new(base: Base, coeffs: Vec<Int>) -> Self {
        debug_assert_eq!(coeffs.len(), base.rank());
        ClassVec { base, coeffs }
    }

    /// Intersection pairing: `k k'` on CP2, `p q' + q p'` on CP1xCP1.
    pub fn dot(&self, other: &ClassVec) -> Int {
        assert_eq!(self.base, other.base, "classes live on different bases");
        match self.base {
            Base::CP2 => &self.coeffs[0] * &other.coeffs[0],
            Base::CP1xCP1 => {
                &self.coeffs[0] * &other.coeffs[1] + &self.coeffs[1] * &other.coeffs[0]
            }
        }
    }

    pub fn self_intersection(&self) -> Int {
        self.dot(self)
    }

    pub fn minus_scaled(&self, other: &ClassVec, factor: &Int) -> ClassVec {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - factor * b).collect();
        ClassVec::new(self.base, coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Standard,
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupLabel {
    Trivial,
    Cyclic(u64),
    Presented(String),
    Unknown,
}

impl GroupLabel {
    pub fn is_trivial(&self) -> bool {
        matches!(self, GroupLabel::Trivial | GroupLabel::Cyclic(1))
    }

    /// Order is known and odd (the trivial group counts).
    pub fn has_odd_order(&self) -> bool {
        match self {
            GroupLabel::Trivial => true,
            GroupLabel::Cyclic(d) => d % 2 == 1,
            _ => false,
        }
    }

    pub fn normalized(self) -> GroupLabel {
        match self {
            GroupLabel::Cyclic(1) => GroupLabel::Trivial,
            other => other,
        }
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupLabel::Trivial => write!(f, "trivial"),
            GroupLabel::Cyclic(d) => write!(f, "Z/{d}"),
            GroupLabel::Presented(name) => write!(f, "{name}"),
            GroupLabel::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Int(i64),
    Group(GroupLabel),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ManifoldExpr {
    Primitive { name: String, params: Vec<Param> },
    CyclicCover { base: Base, d: u64, branch: DivisorClass },
    BicyclicCover { d: u64, p: u64, a: u64, b: u64, m: u64, n: u64 },
    Quotient { inner: Box<ManifoldExpr>, d: u64, action: Action },
    ConnectedSum(Vec<(ManifoldExpr, u64)>),
    FiberSum { left: Box<ManifoldExpr>, right: Box<ManifoldExpr>, genus: u64 },
    LogTransform { inner: Box<ManifoldExpr>, multiplicity: u64 },
}

impl ManifoldExpr {
    pub fn prim(name: &str) -> Self {
        ManifoldExpr::Primitive { name: name.to_string(), params: Vec::new() }
    }

    pub fn prim_with(name: &str, params: &[i64]) -> Self {
        ManifoldExpr::Primitive {
            name: name.to_string(),
            params: params.iter().map(|&v| Param::Int(v)).collect(),
        }
    }

    pub fn cp2() -> Self {
        Self::prim("CP2")
    }

    pub fn cp2bar() -> Self {
        Self::prim("CP2b")
    }

    pub fn s2xs2() -> Self {
        Self::prim("S2xS2")
    }

    pub fn k3() -> Self {
        Self::prim("K3")
    }

    pub fn s1xs3() -> Self {
        Self::prim("S1xS3")
    }

    pub fn elliptic(n: u64) -> Self {
        Self::prim_with("E", &[n as i64])
    }

    pub fn sd(d: u64) -> Self {
        Self::prim_with("Sd", &[d as i64])
    }

    pub fn xk(k: u64) -> Self {
        Self::prim_with("Xk", &[k as i64])
    }

    pub fn y(j: u64) -> Self {
        Self::prim_with("Y", &[j as i64])
    }

    pub fn x442() -> Self {
        Self::prim("X442")
    }

    pub fn fg_product(g1: u64, g2: u64) -> Self {
        Self::prim_with("FgProduct", &[g1 as i64, g2 as i64])
    }

    pub fn xg(chi: i64, tau: i64, group: GroupLabel) -> Self {
        ManifoldExpr::Primitive {
            name: "XG".to_string(),
            params: vec![Param::Int(chi), Param::Int(tau), Param::Group(group)],
        }
    }

    /// Symbolic symplectic block with prescribed holomorphic Euler characteristic and `c1^2`.
    pub fn block(chi_h: i64, c1sq: i64, j: u64) -> Self {
        Self::prim_with("Block", &[chi_h, c1sq, j as i64])
    }

    pub fn cyclic_cover(base: Base, d: u64, branch: DivisorClass) -> Self {
        ManifoldExpr::CyclicCover { base, d, branch }
    }

    pub fn bicyclic(d: u64, p: u64, a: u64, b: u64, m: u64, n: u64) -> Self {
        ManifoldExpr::BicyclicCover { d, p, a, b, m, n }
    }

    pub fn quotient(inner: ManifoldExpr, d: u64, action: Action) -> Self {
        ManifoldExpr::Quotient { inner: Box::new(inner), d, action }
    }

    pub fn fiber_sum(left: ManifoldExpr, right: ManifoldExpr, genus: u64) -> Self {
        ManifoldExpr::FiberSum { left: Box::new(left), right: Box::new(right), genus }
    }

    pub fn log_transform(inner: ManifoldExpr, multiplicity: u64) -> Self {
        ManifoldExpr::LogTransform { inner: Box::new(inner), multiplicity }
    }

    /// Connected sum of `(part, multiplicity)` pairs; a lone part of multiplicity 1 is returned as is.
    pub fn sum(parts: Vec<(ManifoldExpr, u64)>) -> Self {
        if parts.len() == 1 && parts[0].1 == 1 {
            return parts.into_iter().next().map(|(e, _)| e).expect("one part");
        }
        ManifoldExpr::ConnectedSum(parts)
    }

    pub fn sum_of(parts: Vec<ManifoldExpr>) -> Self {
        Self::sum(parts.into_iter().map(|e| (e, 1)).collect())
    }

    pub fn primitive_name(&self) -> Option<&str> {
        match self {
            ManifoldExpr::Primitive { name, .. } => Some(name.as_str()),
            _ => None,
        }
    }

    pub fn int_params(&self) -> Vec<i64> {
        match self {
            ManifoldExpr::Primitive { params, .. } => params
                .iter()
                .filter_map(|p| match p {
                    Param::Int(v) => Some(*v),
                    Param::Group(_) => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Flattens nested connected sums into `(part, multiplicity)` pairs; non-sums give one pair.
    pub fn flatten_sum(&self) -> Vec<(ManifoldExpr, u64)> {
        let mut out = Vec::new();
        flatten_into(self, 1, &mut out);
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            ManifoldExpr::Primitive { .. }
            | ManifoldExpr::CyclicCover { .. }
            | ManifoldExpr::BicyclicCover { .. } => 1,
            ManifoldExpr::Quotient { inner, .. } | ManifoldExpr::LogTransform { inner, .. } => {
                1 + inner.depth()
            }
            ManifoldExpr::ConnectedSum(parts) => {
                1 + parts.iter().map(|(e, _)| e.depth()).max().unwrap_or(0)
            }
            ManifoldExpr::FiberSum { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

fn flatten_into(expr: &ManifoldExpr, mult: u64, out: &mut Vec<(ManifoldExpr, u64)>) {
    match expr {
        ManifoldExpr::ConnectedSum(parts) => {
            for (part, m) in parts {
                flatten_into(part, mult * m, out);
            }
        }
        other => out.push((other.clone(), mult)),
    }
}
