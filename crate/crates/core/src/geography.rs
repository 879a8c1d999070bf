//! Lattice regions in the Chern plane and the named family generators.
//!
//! Every blueprint carries its certificates and a list of named checks. Builders return
//! errors only for invalid input. A failed check is recorded with `passed = false` and never hidden.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith::{fmt_rat, int, rat, to_rat, uint, Int, Rat};
use crate::covers::action_admissibility;
use crate::dsl;
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::expr::{Action, GroupLabel, ManifoldExpr};
use crate::flags::{Parity, Tri, W2Type};
use crate::invariants::InvariantRecord;
use crate::normal_form::{mode_of, normalize_with, NormalForm};
use crate::obstruction::{
    check_certificate, hitchin_thorpe, homeo_key, lebrun_einstein, spin_einstein, Certificate, Verdict,
};
use crate::registry::Registry;
use crate::surgery::universal_cover;

const BK: &str = "realized by infinitely many ACD minimal symplectic manifolds (Braungardt-Kotschick)";

/// Parameters of the free-action region; `N(eps)` is always derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeographyQuery {
    pub d: u64,
    pub epsilon: Rat,
    pub c_of_eps: Rat,
    /// `(n_max, m_max)`.
    pub bounds: (u64, u64),
}

impl GeographyQuery {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidExpr(format!("region needs d >= 2, got {}", self.d)));
        }
        if !self.epsilon.is_positive() || !self.c_of_eps.is_positive() {
            return Err(Error::InvalidExpr("region needs eps > 0 and c > 0".to_string()));
        }
        Ok(())
    }

    pub fn epsilon_prime(&self) -> Rat {
        rat(3, 2) * &self.epsilon
    }

    /// `N(eps) = (2d/3)(c(eps') + 1)`.
    pub fn n_eps(&self) -> Rat {
        rat(2 * self.d as i64, 3) * (&self.c_of_eps + Rat::one())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    FreeActions(GeographyQuery),
    Bk { eps_prime: Rat, c: Rat, bounds: (u64, u64) },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BkPoint {
    pub x: u64,
    pub y: u64,
    pub note: &'static str,
}

/// `(x, y)` with `0 < y <= (9 - eps') x - c` inside the bounds.
pub fn bk_region(eps_prime: &Rat, c: &Rat, bounds: (u64, u64)) -> Result<Vec<BkPoint>> {
    if !eps_prime.is_positive() || !c.is_positive() {
        return Err(Error::InvalidExpr("bk region needs eps' > 0 and c > 0".to_string()));
    }
    let slope = Rat::from_integer(int(9)) - eps_prime;
    let mut out = Vec::new();
    for x in 1..=bounds.0 {
        let top = &slope * to_rat(&uint(x)) - c;
        for y in 1..=bounds.1 {
            if to_rat(&uint(y)) <= top {
                out.push(BkPoint { x, y, note: BK });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A quotient, its universal cover and the evidence attached to both.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyBlueprint {
    pub name: String,
    pub d: u64,
    pub quotient: ManifoldExpr,
    pub cover: Option<ManifoldExpr>,
    pub cover_form: Option<NormalForm>,
    pub certificates: Vec<Certificate>,
    pub labels: Vec<(String, i64)>,
    pub checks: Vec<Check>,
}

impl FamilyBlueprint {
    fn new(name: &str, d: u64, quotient: ManifoldExpr) -> Self {
        FamilyBlueprint {
            name: name.to_string(),
            d,
            quotient,
            cover: None,
            cover_form: None,
            certificates: Vec::new(),
            labels: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn label(&mut self, key: &str, value: i64) {
        self.labels.push((key.to_string(), value));
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    /// Attaches a certificate after checking it independently.
    fn certify(&mut self, cert: Certificate) {
        let name = format!("certificate_{}", cert.inputs.get("check").and_then(Value::as_str).unwrap_or("?"));
        match check_certificate(&cert) {
            Ok(()) => self.check(&name, true, cert.verdict.as_str()),
            Err(e) => self.check(&name, false, e.0),
        }
        self.certificates.push(cert);
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Computes the universal cover, its normal form, and the multiplicativity check.
    ///
    /// `n0` is the Wall stabilization count used by the spin rewrite of `X442`.
    fn attach_cover(&mut self, reg: &Registry, n0: u64) -> Result<()> {
        let cover = universal_cover(reg, &self.quotient)?;
        let down = evaluate(reg, &self.quotient)?.record;
        let up = evaluate(reg, &cover)?.record;
        let d = uint(self.d);
        let ok = up.chi == &d * &down.chi && up.tau == &d * &down.tau;
        self.check(
            "cover_multiplicativity",
            ok,
            format!("chi {} = {} * {}, tau {} = {} * {}", up.chi, self.d, down.chi, up.tau, self.d, down.tau),
        );
        let mode = mode_of(&evaluate(reg, &cover)?);
        let nf = normalize_with(reg, &cover, mode, &mode.rules(), n0)?;
        self.cover_form = Some(nf.form);
        self.cover = Some(cover);
        Ok(())
    }

    fn expect_cover_form(&mut self, expected: NormalForm) {
        let got = self.cover_form.clone();
        let ok = got.as_ref() == Some(&expected);
        let shown = got.map(|f| f.to_string()).unwrap_or_else(|| "none".to_string());
        self.check("cover_normal_form", ok, format!("{shown} vs expected {expected}"));
    }

    pub fn to_json(&self) -> Value {
        let labels: serde_json::Map<String, Value> =
            self.labels.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
            .collect();
        json!({
            "name": self.name,
            "d": self.d,
            "quotient": dsl::print(&self.quotient),
            "cover": self.cover.as_ref().map(dsl::print),
            "cover_normal_form": self.cover_form.as_ref().map(|f| f.to_string()),
            "labels": labels,
            "checks": checks,
            "certificates": self.certificates.iter().map(Certificate::to_json).collect::<Vec<_>>(),
        })
    }
}

fn small(v: &Int) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::InvalidExpr(format!("{v} is too large for a block parameter")))
}

/// `M # Sd(d) # k CP2b` with `c1^2(M) = floor(3n/2d) + 1` and `chi_h(M) = m/d`.
pub fn build_quotient_blueprint(reg: &Registry, n: u64, m: u64, d: u64, j: u64) -> Result<FamilyBlueprint> {
    if d < 2 || n == 0 || m == 0 || !n.is_multiple_of(d) || !m.is_multiple_of(d) {
        return Err(Error::InfeasiblePoint(format!("(n, m) = ({n}, {m}) is not admissible for d = {d}")));
    }
    let c1 = Integer::div_floor(&(3 * n), &(2 * d)) + 1;
    let chi_h = m / d;
    let k = c1 - n / d;
    let block = ManifoldExpr::block(chi_h as i64, c1 as i64, j);
    let x = ManifoldExpr::sum_of(vec![block.clone(), ManifoldExpr::sd(d)]);
    let quotient = ManifoldExpr::sum(vec![(block, 1), (ManifoldExpr::sd(d), 1), (ManifoldExpr::cp2bar(), k)]);
    let mut bp = FamilyBlueprint::new("free_action", d, quotient);
    for (key, v) in [("d", d), ("n", n), ("m", m), ("j", j), ("k", k)] {
        bp.label(key, v as i64);
    }
    let rec = evaluate(reg, &bp.quotient)?.record;
    bp.check(
        "quotient_c1sq",
        rec.c1sq() == uint(n / d),
        format!("2chi + 3tau = {} and n/d = {}", rec.c1sq(), n / d),
    );
    bp.check(
        "quotient_chi_h",
        rec.chi_h() == to_rat(&uint(chi_h)),
        format!("chi_h = {} and m/d = {chi_h}", fmt_rat(&rec.chi_h())),
    );
    bp.check("k_exceeds_third", 3 * k > c1, format!("3*{k} > {c1}"));
    bp.attach_cover(reg, 1)?;
    let (a, b) = (2 * m - 1, 10 * m - n - 1);
    bp.expect_cover_form(NormalForm::non_spin(a, b));
    let target = InvariantRecord::simply(3 * (a + b) as i64 - 2 * (a + b - 1) as i64, a as i64 - b as i64);
    bp.check(
        "cover_target_invariants",
        target.c1sq() == uint(n) && target.chi_h() == to_rat(&uint(m)),
        format!("{a} CP2 # {b} CP2b has 2chi + 3tau = {} and chi_h = {}", target.c1sq(), fmt_rat(&target.chi_h())),
    );
    bp.certify(lebrun_einstein(reg, &x, k, 0)?);
    Ok(bp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub n: u64,
    pub m: u64,
    pub k: u64,
    pub verdict: Verdict,
    pub blueprint: FamilyBlueprint,
}

/// All `(n, m)` with `d | n`, `d | m` and `n < (6 - eps) m - N(eps)`, in lexicographic order.
pub fn free_action_region(reg: &Registry, q: &GeographyQuery) -> Result<Vec<RegionPoint>> {
    q.validate()?;
    let six = Rat::from_integer(int(6)) - &q.epsilon;
    let ep = q.epsilon_prime();
    let n_eps = q.n_eps();
    let mut out = Vec::new();
    for n in (q.d..=q.bounds.0).step_by(q.d as usize) {
        for m in (q.d..=q.bounds.1).step_by(q.d as usize) {
            if to_rat(&uint(n)) >= &six * to_rat(&uint(m)) - &n_eps {
                continue;
            }
            let mut bp = build_quotient_blueprint(reg, n, m, q.d, 1)?;
            let lhs = Integer::div_floor(&(3 * n), &(2 * q.d)) + 1;
            let rhs = (Rat::from_integer(int(9)) - &ep) * rat(m as i64, q.d as i64) - &q.c_of_eps;
            bp.check(
                "bk_chain",
                to_rat(&uint(lhs)) < rhs,
                format!("floor(3n/2d) + 1 = {lhs} < (9 - eps') m/d - c = {}", fmt_rat(&rhs)),
            );
            let verdict = bp.certificates.last().map(|c| c.verdict).unwrap_or(Verdict::NoVerdict);
            let k = bp.labels.iter().find(|(key, _)| key == "k").map(|(_, v)| *v as u64).unwrap_or(0);
            out.push(RegionPoint { n, m, k, verdict, blueprint: bp });
        }
    }
    Ok(out)
}

fn odd_part(mut d: u64) -> u64 {
    while d.is_multiple_of(2) {
        d /= 2;
    }
    d
}

/// Bicyclic parameters and action used for `Z_i`.
pub fn zi_parameters(d: u64, i: u64) -> ([u64; 6], Action) {
    if d % 2 == 1 {
        ([d, 2, d, d, d * i, d * i], Action::Standard)
    } else {
        let dp = match odd_part(d) {
            1 => 3,
            o => o,
        };
        ([d, 3, 2 * dp, dp, i, i], Action::Weighted)
    }
}

/// `Z_i` as an expression without the start-index gate.
pub fn zi_expr(d: u64, i: u64) -> Result<ManifoldExpr> {
    if d < 2 {
        return Err(Error::InvalidExpr(format!("Z_i needs d >= 2, got {d}")));
    }
    if i.is_multiple_of(2) {
        return Err(Error::BadParity(i));
    }
    let ([d0, p, a, b, m, n], action) = zi_parameters(d, i);
    let adm = action_admissibility(d, a, b, action);
    if let Some(w) = adm.witness() {
        return Err(Error::AdmissibilityFail(format!("{} has gcd {} with {d}", w.label, w.gcd)));
    }
    Ok(ManifoldExpr::quotient(ManifoldExpr::bicyclic(d0, p, a, b, m, n), d, action))
}

/// Closed forms for `Z_i` as printed: `(c1^2, chi_h)` for odd `d`.
pub fn zi_printed_odd(d: u64, i: u64) -> (Int, Rat) {
    let (d, i) = (uint(d), uint(i));
    let one = Int::one();
    let base: Int = &d * (&d - &one) + &d * &i - int(2);
    let c1sq = int(4) * &base * &base;
    let chi_h = to_rat(&(&d * &d * (&d - &one) * (int(2) * &d - &one))) / to_rat(&int(3))
        + to_rat(&(&d * (&d - &one) * (&d * &i - &one) + &d * &d * &i * &i - int(2) * &d * &i + int(2)));
    (c1sq, chi_h)
}

/// Closed forms for `Z_i` as printed: `(c1^2, c2)` for even `d`.
pub fn zi_printed_even(d: u64, i: u64) -> (Int, Int) {
    let dp = match odd_part(d) {
        1 => 3,
        o => o,
    };
    let (d, dp, i) = (uint(d), uint(dp), uint(i));
    let dm1: Int = &d - Int::one();
    let c1sq = int(6) * (int(2) * &dm1 * &dp + int(2) * &i - int(2)) * (&dm1 * &dp + int(2) * &i - int(2));
    let c2 = int(3)
        * (int(4) - int(2) * &dm1 * (int(3) * &dp - int(2) * &dp * &dp * &d) - int(4) * (int(2) * &i - int(3) * &i * &i)
            + int(3) * &dm1 * &dp * &i);
    (c1sq, c2)
}

/// Least odd `i` with `c1^2(Z_i) <= 5 chi_h(Z_i)`, searched up to `limit`.
pub fn zi_n0(reg: &Registry, d: u64, limit: u64) -> Result<u64> {
    let mut i = 1;
    while i <= limit {
        let rec = evaluate(reg, &zi_expr(d, i)?)?.record;
        if to_rat(&rec.c1sq()) <= to_rat(&int(5)) * rec.chi_h() {
            return Ok(i);
        }
        i += 2;
    }
    Err(Error::InfeasiblePoint(format!("no odd i <= {limit} with c1^2 <= 5 chi_h for d = {d}")))
}

const N0_SEARCH: u64 = 100_001;

/// `Z_i` for odd `i >= n0`.
pub fn zi_family(reg: &Registry, d: u64, i: u64) -> Result<FamilyBlueprint> {
    let expr = zi_expr(d, i)?;
    let n0 = zi_n0(reg, d, N0_SEARCH)?;
    if i < n0 {
        return Err(Error::InfeasiblePoint(format!("Z_i for d = {d} starts at i = {n0}, got {i}")));
    }
    let mut bp = zi_blueprint(reg, d, i, expr)?;
    bp.label("n0", n0 as i64);
    Ok(bp)
}

/// `Z_i` without the start-index gate, for evaluating the printed closed forms at small indices.
pub fn zi_family_raw(reg: &Registry, d: u64, i: u64) -> Result<FamilyBlueprint> {
    let expr = zi_expr(d, i)?;
    zi_blueprint(reg, d, i, expr)
}

fn zi_blueprint(reg: &Registry, d: u64, i: u64, expr: ManifoldExpr) -> Result<FamilyBlueprint> {
    let ev = evaluate(reg, &expr)?;
    let rec = ev.record.clone();
    let mut bp = FamilyBlueprint::new("Z_i", d, expr);
    bp.label("d", d as i64);
    bp.label("i", i as i64);
    let f = &ev.flags;
    bp.check("minimal_general_type", f.minimal_general_type == Tri::Yes, f.minimal_general_type.as_str());
    bp.check("ample_canonical", f.ample_canonical == Tri::Yes, f.ample_canonical.as_str());
    bp.check("parity_odd", f.parity == Parity::Odd, f.parity.as_str());
    bp.check("w2type_I", f.w2type == W2Type::I, f.w2type.as_str());
    bp.check("pi1_cyclic", f.pi1 == GroupLabel::Cyclic(d), f.pi1.to_string());
    let ratio_ok = to_rat(&rec.c1sq()) < to_rat(&int(5)) * rec.chi_h();
    bp.check(
        "ratio_below_five",
        ratio_ok,
        format!("c1^2 = {}, 5 chi_h = {}", rec.c1sq(), fmt_rat(&(to_rat(&int(5)) * rec.chi_h()))),
    );
    if f.ample_canonical == Tri::Yes {
        bp.check("kahler_einstein", true, "ample canonical class: Kahler-Einstein (Aubin-Yau)");
    }
    if d % 2 == 1 {
        let (c1, chi_h) = zi_printed_odd(d, i);
        bp.check("printed_c1sq", c1 == rec.c1sq(), format!("printed {c1}, evaluated {}", rec.c1sq()));
        bp.check(
            "printed_chi_h",
            chi_h == rec.chi_h(),
            format!("printed {}, evaluated {}", fmt_rat(&chi_h), fmt_rat(&rec.chi_h())),
        );
    } else {
        let (c1, c2) = zi_printed_even(d, i);
        bp.check("printed_c1sq", c1 == rec.c1sq(), format!("printed {c1}, evaluated {}", rec.c1sq()));
        bp.check("printed_c2", c2 == rec.c2(), format!("printed {c2}, evaluated {}", rec.c2()));
    }
    bp.certify(hitchin_thorpe(&rec));
    bp.attach_cover(reg, 1)?;
    Ok(bp)
}

/// `M_{i,j} = M'_{i,j} # Sd(d) # k CP2b`, homeomorphic to `Z_i`.
pub fn main_pair_family(reg: &Registry, d: u64, i: u64, j: u64, n1: u64) -> Result<FamilyBlueprint> {
    let z = zi_family(reg, d, i)?;
    let zrec = evaluate(reg, &z.quotient)?.record;
    let chi_h = zrec
        .chi_h()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Internal("chi_h of Z_i is not a small natural number".to_string()))?;
    if chi_h <= n1 {
        return Err(Error::InfeasiblePoint(format!("chi_h = {chi_h} does not exceed n1 = {n1}")));
    }
    let c1_block = 8 * chi_h;
    let zc1 = zrec.c1sq();
    let k_int = uint(c1_block) - &zc1;
    let k = k_int
        .to_u64()
        .ok_or_else(|| Error::InfeasiblePoint(format!("k = {k_int} is negative")))?;
    let block = ManifoldExpr::block(small(&uint(chi_h))?, small(&uint(c1_block))?, j);
    let x = ManifoldExpr::sum_of(vec![block.clone(), ManifoldExpr::sd(d)]);
    let quotient = ManifoldExpr::sum(vec![(block, 1), (ManifoldExpr::sd(d), 1), (ManifoldExpr::cp2bar(), k)]);
    let mut bp = FamilyBlueprint::new("M_ij", d, quotient);
    for (key, v) in [("d", d), ("i", i), ("j", j), ("k", k)] {
        bp.label(key, v as i64);
    }
    let zk = homeo_key(reg, &z.quotient)?;
    let mk = homeo_key(reg, &bp.quotient)?;
    bp.check("homeo_key_matches_Z_i", zk == mk, format!("{} vs {}", mk.to_json(), zk.to_json()));
    bp.certify(crate::obstruction::homeo_certificate(&mk, &zk));
    bp.check("k_at_least_3chi_h", k >= 3 * chi_h, format!("{k} >= 3*{chi_h}"));
    let mrec = evaluate(reg, &bp.quotient)?.record;
    bp.check(
        "k_at_least_third_c1sq",
        int(3) * uint(k) >= mrec.c1sq(),
        format!("3*{k} >= {}", mrec.c1sq()),
    );
    bp.certify(lebrun_einstein(reg, &x, k, 0)?);
    bp.attach_cover(reg, 1)?;
    let inner = match &z.quotient {
        ManifoldExpr::Quotient { inner, .. } => evaluate(reg, inner)?.record,
        _ => return Err(Error::Internal("Z_i is not a quotient".to_string())),
    };
    let (a, b) = (
        inner.b2plus_int().and_then(|v| v.to_u64()),
        inner.b2minus_int().and_then(|v| v.to_u64()),
    );
    if let (Some(a), Some(b)) = (a, b) {
        bp.expect_cover_form(NormalForm::non_spin(a, b));
    } else {
        bp.check("cover_normal_form", false, "cover of Z_i has non-integral Betti numbers");
    }
    Ok(bp)
}

/// Fourth congruence piece: `K3` has `b2+ = 3`, `E(4)` has `b2+ = 7`.
pub fn default_fourth_piece(n: u64) -> ManifoldExpr {
    if n % 2 == 1 {
        ManifoldExpr::k3()
    } else {
        ManifoldExpr::elliptic(4)
    }
}

/// `M_{1,n}^j` and `M_{2,n}^j`, spin with fundamental group `Z/d`.
pub fn spin_families(
    reg: &Registry,
    d: u64,
    n: u64,
    j: u64,
    wall_n0: u64,
    fourth: Option<ManifoldExpr>,
) -> Result<(FamilyBlueprint, FamilyBlueprint)> {
    if d <= wall_n0 {
        return Err(Error::InfeasiblePoint(format!("d = {d} must exceed the Wall constant {wall_n0}")));
    }
    if n == 0 || j == 0 {
        return Err(Error::InvalidExpr("spin families need n, j >= 1".to_string()));
    }
    let fourth = fourth.unwrap_or_else(|| default_fourth_piece(n));
    let sd = ManifoldExpr::sd(d);
    let p1 = vec![ManifoldExpr::x442(), ManifoldExpr::y(j), ManifoldExpr::elliptic(2 * n)];
    let p2 = vec![
        ManifoldExpr::x442(),
        ManifoldExpr::elliptic(2),
        ManifoldExpr::y(j),
        ManifoldExpr::elliptic(2 * (2 * n - 1)),
    ];
    let mut m1_parts = p1.clone();
    m1_parts.push(sd.clone());
    let mut m2_parts = p2.clone();
    m2_parts.push(sd.clone());
    let mut b1 = FamilyBlueprint::new("M_1n", d, ManifoldExpr::sum_of(m1_parts));
    let mut b2 = FamilyBlueprint::new("M_2n", d, ManifoldExpr::sum_of(m2_parts));
    let mut pieces1 = p1;
    pieces1.push(fourth);
    let expected = [
        NormalForm::spin(d * (n + 5), d * (n + 7) - 1),
        NormalForm::spin(d * (2 * n + 5), d * (2 * n + 6) - 1),
    ];
    for ((bp, pieces, m), form) in [(&mut b1, pieces1, 3usize), (&mut b2, p2, 4usize)].into_iter().zip(expected) {
        for (key, v) in [("d", d), ("n", n), ("j", j)] {
            bp.label(key, v as i64);
        }
        let ev = evaluate(reg, &bp.quotient)?;
        bp.check("spin", ev.flags.spin == Tri::Yes, ev.flags.spin.as_str());
        bp.check("pi1_cyclic", ev.flags.pi1 == GroupLabel::Cyclic(d), ev.flags.pi1.to_string());
        bp.check(
            "c1sq_positive",
            ev.record.c1sq().is_positive(),
            format!("2chi + 3tau = {}", ev.record.c1sq()),
        );
        let ht = hitchin_thorpe(&ev.record);
        bp.check("hitchin_thorpe_ok", ht.verdict == Verdict::HitchinThorpeOk, ht.verdict.as_str());
        bp.certify(ht);
        let se = spin_einstein(reg, &pieces, m, &sd)?;
        bp.check("spin_einstein_fires", se.verdict == Verdict::EinsteinObstructed, se.verdict.as_str());
        bp.certify(se);
        bp.attach_cover(reg, wall_n0)?;
        bp.expect_cover_form(form);
    }
    Ok((b1, b2))
}

/// `c1^2(Xk(k)) = 8k`.
pub fn xk_c1sq(reg: &Registry, k: u64) -> Result<Int> {
    Ok(evaluate(reg, &ManifoldExpr::xk(k))?.record.c1sq())
}

/// The fiber-sum chain `XG #T E(4) #S2 Xk #S2 E(4) #T logt(E(2), 2j+1)`.
pub fn group_chain(xg: ManifoldExpr, k: u64, j: u64) -> ManifoldExpr {
    let e4 = ManifoldExpr::elliptic(4);
    let s1 = ManifoldExpr::fiber_sum(xg, e4.clone(), 1);
    let s2 = ManifoldExpr::fiber_sum(s1, ManifoldExpr::xk(k), 2);
    let s3 = ManifoldExpr::fiber_sum(s2, e4, 2);
    ManifoldExpr::fiber_sum(s3, crate::surgery::log_transform_expr(ManifoldExpr::elliptic(2), 2 * j + 1), 1)
}

/// Non-spin manifolds with fundamental group `G`: the chain blown up `p` times.
pub fn nonspin_group_family(
    reg: &Registry,
    chi_g: i64,
    tau_g: i64,
    group: GroupLabel,
    k: u64,
    p: u64,
    j: u64,
) -> Result<FamilyBlueprint> {
    let top = xk_c1sq(reg, k)? + int(16);
    let p_int = uint(p);
    if !(p_int < top && int(3) * &p_int > top) {
        return Err(Error::BadP(format!("p = {p} must satisfy {top} > p > {top}/3")));
    }
    let chain = group_chain(ManifoldExpr::xg(chi_g, tau_g, group.clone()), k, j);
    let quotient = ManifoldExpr::sum(vec![(chain.clone(), 1), (ManifoldExpr::cp2bar(), p)]);
    let mut bp = FamilyBlueprint::new("nonspin_G", 0, quotient);
    for (key, v) in [("k", k), ("p", p), ("j", j)] {
        bp.label(key, v as i64);
    }
    let cev = evaluate(reg, &chain)?;
    bp.check("chain_c1sq", cev.record.c1sq() == top, format!("{} vs {top}", cev.record.c1sq()));
    let ev = evaluate(reg, &bp.quotient)?;
    bp.check("pi1_is_G", ev.flags.pi1 == group, format!("{} vs {group}", ev.flags.pi1));
    bp.check("not_spin", ev.flags.spin == Tri::No, ev.flags.spin.as_str());
    let ht = hitchin_thorpe(&ev.record);
    bp.check("hitchin_thorpe_ok", ht.verdict == Verdict::HitchinThorpeOk, ht.verdict.as_str());
    bp.certify(ht);
    let lb = lebrun_einstein(reg, &chain, p, 0)?;
    bp.check("lebrun_fires", lb.verdict == Verdict::EinsteinObstructed, lb.verdict.as_str());
    bp.certify(lb);
    Ok(bp)
}

/// `N_G(n) = XG(24k', -16k', G) #T E(2n)`.
pub fn n_g(k_prime: u64, n: u64, group: GroupLabel) -> ManifoldExpr {
    let k = k_prime as i64;
    ManifoldExpr::fiber_sum(ManifoldExpr::xg(24 * k, -16 * k, group), ManifoldExpr::elliptic(2 * n), 1)
}

/// Spin manifolds with fundamental group `G`: `Xk(2) # N_G(n) # Y_j`.
pub fn spin_group_family(
    reg: &Registry,
    k_prime: u64,
    n: u64,
    group: GroupLabel,
    j: u64,
) -> Result<FamilyBlueprint> {
    if k_prime == 0 || n == 0 || j == 0 {
        return Err(Error::InvalidExpr("spin group family needs k', n, j >= 1".to_string()));
    }
    let ng = n_g(k_prime, n, group.clone());
    let pieces = vec![
        ManifoldExpr::xk(2),
        ng,
        ManifoldExpr::y(j),
        default_fourth_piece(k_prime + n),
    ];
    let quotient = ManifoldExpr::sum_of(pieces[..3].to_vec());
    let mut bp = FamilyBlueprint::new("spin_G", 0, quotient);
    for (key, v) in [("k_prime", k_prime), ("n", n), ("j", j)] {
        bp.label(key, v as i64);
    }
    let ngev = evaluate(reg, &pieces[1])?;
    let b2p = ngev.record.b2plus_int().unwrap_or_else(|| int(-1));
    bp.check("n_g_b2plus_3_mod_4", b2p.mod_floor(&int(4)) == int(3), format!("b2+ = {b2p}"));
    let ev = evaluate(reg, &bp.quotient)?;
    bp.check("pi1_is_G", ev.flags.pi1 == group, format!("{} vs {group}", ev.flags.pi1));
    bp.check("spin", ev.flags.spin == Tri::Yes, ev.flags.spin.as_str());
    let ht = hitchin_thorpe(&ev.record);
    bp.check("hitchin_thorpe_ok", ht.verdict == Verdict::HitchinThorpeOk, ht.verdict.as_str());
    bp.certify(ht);
    let se = spin_einstein(reg, &pieces, 3, &ManifoldExpr::prim("S4"))?;
    bp.check("spin_einstein_fires", se.verdict == Verdict::EinsteinObstructed, se.verdict.as_str());
    bp.certify(se);
    Ok(bp)
}

/// Limit of `c1^2 / chi_h` along `Z_i`: 4 for odd `d`, 24/5 for even `d`.
pub fn zi_ratio_limit(d: u64) -> Rat {
    if d % 2 == 1 {
        Rat::from_integer(int(4))
    } else {
        rat(24, 5)
    }
}

pub fn ratio(rec: &InvariantRecord) -> Option<Rat> {
    let h = rec.chi_h();
    if h.is_zero() {
        None
    } else {
        Some(to_rat(&rec.c1sq()) / h)
    }
}
