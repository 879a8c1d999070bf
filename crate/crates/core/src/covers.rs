//! Chern-number formulas for cyclic and bi-cyclic branched covers and their free quotients.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{int, uint, Int};
use crate::error::{Error, Result};
use crate::expr::{Action, Base, ClassVec, DivisorClass};
use crate::invariants::InvariantRecord;

/// Euler characteristic of a smooth curve in the given class (adjunction).
pub fn branch_curve_euler(class: &DivisorClass) -> Int {
    match class.base {
        Base::CP2 => {
            let k = uint(class.degrees[0]);
            int(2) - (&k - 1) * (&k - 2)
        }
        Base::CP1xCP1 => {
            let p = uint(class.degrees[0]);
            let q = uint(class.degrees[1]);
            int(2) * (&p + &q) - int(2) * &p * &q
        }
    }
}

/// Euler characteristic of the preimage of `D` in a d-fold cover branched along `C`.
pub fn proper_transform_euler(d: u64, chi_d: &Int, c_dot_d: &Int) -> Int {
    let d = uint(d);
    &d * chi_d - (&d - 1) * c_dot_d
}

/// The record of the base surfaces themselves.
pub fn base_record(base: Base) -> InvariantRecord {
    match base {
        Base::CP2 => InvariantRecord::simply(3, 1),
        Base::CP1xCP1 => InvariantRecord::simply(4, 0),
    }
}

/// d-cyclic cover of a simply connected surface branched along `D = d L`.
///
/// `base_c1` is the first Chern class of the base in the same basis as `l`.
pub fn cyclic_cover_invariants(
    base_rec: &InvariantRecord,
    base_c1: &ClassVec,
    d: u64,
    l: &DivisorClass,
) -> Result<InvariantRecord> {
    if d == 0 {
        return Err(Error::NegativeDegree("cover degree 0".to_string()));
    }
    if !l.is_well_formed() || l.base != base_c1.base {
        return Err(Error::InvalidExpr(format!("class {l} does not live on the base")));
    }
    if d == 1 {
        return Ok(base_rec.clone());
    }
    let branch = l.scaled(d);
    let chi_d = branch_curve_euler(&branch);
    let du = uint(d);
    let c2 = &du * base_rec.c2() - (&du - 1) * &chi_d;
    let c1 = base_c1.minus_scaled(&l.as_vec(), &(&du - 1));
    let c1sq = &du * c1.self_intersection();
    InvariantRecord::from_chern(c1sq, c2, Int::zero())
}

/// Cyclic cover of CP2 or CP1xCP1 along an explicit branch class.
pub fn cyclic_cover_of_base(base: Base, d: u64, branch: &DivisorClass) -> Result<InvariantRecord> {
    if branch.base != base || !branch.is_well_formed() {
        return Err(Error::InvalidExpr(format!("branch {branch} does not live on {}", base.name())));
    }
    if !branch.is_divisible_by(d) {
        return Err(Error::NonDivisibleBranch(format!("{branch} by {d}")));
    }
    cyclic_cover_invariants(&base_record(base), &base.c1(), d, &branch.divided(d))
}

fn check_bicyclic(params: [u64; 6]) -> Result<()> {
    let names = ["d", "p", "a", "b", "m", "n"];
    for (name, v) in names.iter().zip(params) {
        if v == 0 {
            return Err(Error::NegativeDegree(format!("{name} = 0")));
        }
    }
    Ok(())
}

/// Canonical class of the bi-cyclic cover as a pullback `(x, y)` from CP1xCP1.
pub fn bicyclic_canonical(d: u64, p: u64, a: u64, b: u64, m: u64, n: u64) -> (Int, Int) {
    let (d, p) = (uint(d), uint(p));
    let x = (&d - 1) * uint(a) + (&p - 1) * uint(m) - 2;
    let y = (&d - 1) * uint(b) + (&p - 1) * uint(n) - 2;
    (x, y)
}

/// Closed-form invariants of the type `(d, p)` cover branched along `C = (da, db)` then `D = (pm, pn)`.
pub fn bicyclic_invariants(d: u64, p: u64, a: u64, b: u64, m: u64, n: u64) -> Result<InvariantRecord> {
    check_bicyclic([d, p, a, b, m, n])?;
    let (x, y) = bicyclic_canonical(d, p, a, b, m, n);
    let (d_, p_, a_, b_, m_, n_) = (uint(d), uint(p), uint(a), uint(b), uint(m), uint(n));
    let c1sq = int(2) * &p_ * &d_ * x * y;
    let bracket = int(4)
        - int(2) * (&d_ - 1) * (&a_ + &b_ - &d_ * &a_ * &b_)
        - int(2) * (&p_ - 1) * (&m_ + &n_ - &p_ * &m_ * &n_)
        + (&p_ - 1) * (&d_ - 1) * (&a_ * &n_ + &b_ * &m_);
    let c2 = &p_ * &d_ * bracket;
    InvariantRecord::from_chern(c1sq, c2, Int::zero())
}

/// A surface mapping to CP1xCP1 with known degree, `c2` and first Chern class pulled back from the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulledBackSurface {
    pub degree: Int,
    pub c2: Int,
    pub c1: ClassVec,
}

impl PulledBackSurface {
    pub fn base(base: Base) -> Self {
        PulledBackSurface { degree: Int::one(), c2: base_record(base).c2(), c1: base.c1() }
    }

    /// Self-intersection of a pulled-back class is the degree times that on the base.
    pub fn c1sq(&self) -> Int {
        &self.degree * self.c1.self_intersection()
    }

    /// Cyclic cover of this surface branched along the preimage of a base curve of class `k L`.
    ///
    /// `preimage_euler` is the Euler characteristic of that (smooth) preimage.
    pub fn cover(&self, k: u64, l: &DivisorClass, preimage_euler: &Int) -> PulledBackSurface {
        let ku = uint(k);
        PulledBackSurface {
            degree: &self.degree * &ku,
            c2: &ku * &self.c2 - (&ku - 1) * preimage_euler,
            c1: self.c1.minus_scaled(&l.as_vec(), &(&ku - 1)),
        }
    }

    pub fn record(&self) -> Result<InvariantRecord> {
        InvariantRecord::from_chern(self.c1sq(), self.c2.clone(), Int::zero())
    }
}

/// Bi-cyclic invariants computed as two successive cyclic covers.
pub fn bicyclic_by_composition(d: u64, p: u64, a: u64, b: u64, m: u64, n: u64) -> Result<InvariantRecord> {
    check_bicyclic([d, p, a, b, m, n])?;
    let c_class = DivisorClass::bidegree(d * a, d * b);
    let d_class = DivisorClass::bidegree(p * m, p * n);
    let y = PulledBackSurface::base(Base::CP1xCP1);
    let x = y.cover(d, &DivisorClass::bidegree(a, b), &branch_curve_euler(&c_class));
    let chi_d_prime = proper_transform_euler(d, &branch_curve_euler(&d_class), &c_class.dot(&d_class));
    let n_surface = x.cover(p, &DivisorClass::bidegree(m, n), &chi_d_prime);
    n_surface.record()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdCheck {
    pub label: String,
    pub value: u64,
    pub gcd: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissibility {
    pub pass: bool,
    pub checks: Vec<GcdCheck>,
}

impl Admissibility {
    /// First failing gcd, if any.
    pub fn witness(&self) -> Option<&GcdCheck> {
        self.checks.iter().find(|c| c.gcd != 1)
    }
}

/// Whether the (standard or weighted) `Z/d` action on `O(a, b)` is free away from the zero section.
pub fn action_admissibility(d: u64, a: u64, b: u64, action: Action) -> Admissibility {
    let values: [(String, u64); 3] = match action {
        Action::Standard => [
            ("a+1".to_string(), a + 1),
            ("b+1".to_string(), b + 1),
            ("a+b+1".to_string(), a + b + 1),
        ],
        Action::Weighted => [
            ("a+1".to_string(), a + 1),
            ("2b+1".to_string(), 2 * b + 1),
            ("a+2b+1".to_string(), a + 2 * b + 1),
        ],
    };
    let checks: Vec<GcdCheck> = values
        .into_iter()
        .map(|(label, value)| GcdCheck { gcd: value.gcd(&d), label, value })
        .collect();
    let pass = checks.iter().all(|c| c.gcd == 1);
    Admissibility { pass, checks }
}

/// Invariants of the free quotient by `Z/d`; both Chern numbers and `chi_h` must stay integral.
pub fn quotient_invariants(inner: &InvariantRecord, d: u64) -> Result<InvariantRecord> {
    if d == 0 {
        return Err(Error::NegativeDegree("quotient order 0".to_string()));
    }
    if d == 1 {
        return Ok(inner.clone());
    }
    let du = uint(d);
    let (c2, c1sq) = (inner.c2(), inner.c1sq());
    if !c2.is_multiple_of(&du) || !c1sq.is_multiple_of(&du) {
        return Err(Error::NonIntegralQuotient(format!(
            "c2 = {c2}, c1^2 = {c1sq} not divisible by {d}"
        )));
    }
    let rec = InvariantRecord::from_chern(&c1sq / &du, &c2 / &du, Int::zero())
        .map_err(|e| Error::NonIntegralQuotient(e.to_string()))?;
    if !rec.chi_h().is_integer() {
        return Err(Error::NonIntegralQuotient(format!("chi_h = {} is not an integer", rec.chi_h())));
    }
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmpleMode {
    /// Thresholds on the cover itself: `(d-1)a + (p-1)m >= 3`.
    Cover,
    /// Thresholds on the quotient parameterization: `(d-1)a + d(p-1)m > 2`.
    Quotient,
}

pub fn ample_canonical(d: u64, p: u64, a: u64, b: u64, m: u64, n: u64, mode: AmpleMode) -> bool {
    let (d, p, a, b, m, n) = (d as u128, p as u128, a as u128, b as u128, m as u128, n as u128);
    match mode {
        AmpleMode::Cover => (d - 1) * a + (p - 1) * m >= 3 && (d - 1) * b + (p - 1) * n >= 3,
        AmpleMode::Quotient => (d - 1) * a + d * (p - 1) * m > 2 && (d - 1) * b + d * (p - 1) * n > 2,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlueprintSpec {
    Cyclic { base: Base, d: u64, branch: DivisorClass },
    Bicyclic { d: u64, p: u64, a: u64, b: u64, m: u64, n: u64 },
    Quotient { d: u64, p: u64, a: u64, b: u64, m: u64, n: u64, action: Action },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precondition {
    pub name: String,
    pub passed: bool,
    pub citation: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverBlueprint {
    pub spec: BlueprintSpec,
    pub preconditions: Vec<Precondition>,
}

fn pre(name: &str, passed: bool, citation: &str, detail: String) -> Precondition {
    Precondition { name: name.to_string(), passed, citation: citation.to_string(), detail }
}

impl CoverBlueprint {
    pub fn constructible(&self) -> bool {
        self.preconditions.iter().all(|p| p.passed)
    }

    pub fn failures(&self) -> Vec<&Precondition> {
        self.preconditions.iter().filter(|p| !p.passed).collect()
    }

    pub fn cyclic(base: Base, d: u64, branch: DivisorClass) -> Self {
        let divisible = branch.is_divisible_by(d);
        let positive = branch.degrees.iter().all(|&k| k >= 1);
        let preconditions = vec![
            pre("smooth branch", true, "generic member of a base point free system", "assumed".into()),
            pre("d-divisibility", divisible, "O(D) = L^d", format!("{branch} by {d}")),
            pre(
                "flexibility",
                positive,
                "Catanese: covers along flexible divisors of simply connected bases are simply connected",
                if positive { "assumed for positive degrees".into() } else { "zero degree".into() },
            ),
            pre("simple connectivity", positive, "follows from flexibility", String::new()),
        ];
        CoverBlueprint { spec: BlueprintSpec::Cyclic { base, d, branch }, preconditions }
    }

    pub fn bicyclic(d: u64, p: u64, a: u64, b: u64, m: u64, n: u64) -> Self {
        let positive = [d, p, a, b, m, n].iter().all(|&v| v >= 1);
        let ample = ample_canonical(d, p, a, b, m, n, AmpleMode::Cover);
        let preconditions = vec![
            pre("smooth transversal branch", true, "Bertini", "assumed".into()),
            pre("flexibility", positive, "all parameters strictly positive", String::new()),
            pre("simple connectivity", positive, "two flexible cyclic covers", String::new()),
            pre(
                "ample canonical class",
                ample,
                "pullback of an ample class by a finite map",
                format!("(d-1)a+(p-1)m and (d-1)b+(p-1)n at least 3: {ample}"),
            ),
        ];
        CoverBlueprint { spec: BlueprintSpec::Bicyclic { d, p, a, b, m, n }, preconditions }
    }

    /// Quotient of the bi-cyclic cover of type `(d, p)` by the free `Z/d` action on `O(a, b)`.
    pub fn quotient(d: u64, p: u64, a: u64, b: u64, m: u64, n: u64, action: Action) -> Self {
        let mut bp = CoverBlueprint::bicyclic(d, p, a, b, m, n);
        let adm = action_admissibility(d, a, b, action);
        let detail = adm
            .checks
            .iter()
            .map(|c| format!("gcd({}={}, {d}) = {}", c.label, c.value, c.gcd))
            .collect::<Vec<_>>()
            .join(", ");
        bp.preconditions.push(pre("gcd admissibility", adm.pass, "free cyclic action on O(a,b)", detail));
        if action == Action::Standard {
            let invariant = m.is_multiple_of(d) && n.is_multiple_of(d);
            bp.preconditions.push(pre(
                "invariant second branch",
                invariant,
                "branch class (pdm', pdn') of an invariant polynomial",
                format!("d = {d} divides m = {m} and n = {n}: {invariant}"),
            ));
        }
        if let Ok(rec) = bicyclic_invariants(d, p, a, b, m, n) {
            let integral = quotient_invariants(&rec, d).is_ok();
            bp.preconditions.push(pre(
                "integral quotient",
                integral,
                "chi_h of a complex surface is an integer",
                String::new(),
            ));
        }
        bp.spec = BlueprintSpec::Quotient { d, p, a, b, m, n, action };
        bp
    }
}
