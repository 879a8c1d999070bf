//! Named end-to-end reproductions. Each report lists computed values, named checks and certificates.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::{fmt_rat, int, to_rat, uint, Int};
use crate::config::Config;
use crate::dsl;
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::expr::{Base, DivisorClass, GroupLabel, ManifoldExpr};
use crate::geography::{
    self, main_pair_family, n_g, nonspin_group_family, spin_families, spin_group_family, zi_family_raw, zi_n0,
    zi_printed_even, zi_printed_odd, Check, FamilyBlueprint, GeographyQuery,
};
use crate::normal_form::{normalize, verify_diffeo_claim};
use crate::obstruction::{check_certificate, hitchin_thorpe, lebrun_einstein, Certificate, Verdict};
use crate::registry::{self, Registry};
use crate::surgery::universal_cover;

pub const TARGETS: &[&str] = &["prop1.3", "prop1.4", "thm1.1", "thm1.5", "thm1.8", "thm1.6", "thm1.7", "prop3.12"];

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub target: String,
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
    pub certificates: Vec<Certificate>,
}

impl Report {
    fn new(target: &str) -> Self {
        Report { target: target.to_string(), lines: Vec::new(), checks: Vec::new(), certificates: Vec::new() }
    }

    fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    fn expect_int(&mut self, name: &str, got: &Int, want: i64) {
        self.check(name, *got == int(want), format!("{got} (expected {want})"));
    }

    fn certify(&mut self, cert: Certificate) {
        let name = format!("certificate {} self-check", self.certificates.len() + 1);
        match check_certificate(&cert) {
            Ok(()) => self.check(name, true, cert.verdict.as_str()),
            Err(e) => self.check(name, false, e.0),
        }
        self.certificates.push(cert);
    }

    fn absorb(&mut self, prefix: &str, bp: &FamilyBlueprint) {
        for c in &bp.checks {
            self.check(format!("{prefix} {}", c.name), c.passed, c.detail.clone());
        }
        self.certificates.extend(bp.certificates.iter().cloned());
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Deterministic text: values, every check, then certificates.
    pub fn render_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.target);
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("checks: {passed}/{} passed\n", self.checks.len()));
        for c in &self.checks {
            out.push_str(&format!("  [{}] {}: {}\n", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail));
        }
        for (i, c) in self.certificates.iter().enumerate() {
            out.push_str(&format!("certificate {}:\n", i + 1));
            for l in c.render_text().lines() {
                out.push_str("  ");
                out.push_str(l);
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target,
            "ok": self.ok(),
            "lines": self.lines,
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
            "certificates": self.certificates.iter().map(Certificate::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn reproduce(target: &str, cfg: &Config) -> Result<Report> {
    let reg = registry::standard();
    match target {
        "prop1.3" => prop13(reg),
        "prop1.4" => prop14(reg),
        "thm1.1" => thm11(reg, cfg),
        "thm1.5" => thm15(reg, cfg),
        "thm1.8" => thm18(reg, cfg),
        "thm1.6" => thm16(reg),
        "thm1.7" => thm17(reg),
        "prop3.12" => prop312(reg),
        other => Err(Error::InvalidExpr(format!("unknown target {other:?}; expected one of {}", TARGETS.join(", ")))),
    }
}

/// Double cover of `CP2` branched over an octic.
pub fn octic_double_cover() -> ManifoldExpr {
    ManifoldExpr::cyclic_cover(Base::CP2, 2, DivisorClass::cp2(8))
}

fn explicit_action(reg: &Registry, target: &str, d: u64, a: i64, b: i64) -> Result<Report> {
    let mut r = Report::new(target);
    let n = octic_double_cover();
    let nev = evaluate(reg, &n)?;
    let rec = &nev.record;
    r.line(format!("N = {}", dsl::print(&n)));
    r.line(format!(
        "N: c2 = {}, c1^2 = {}, tau = {}, b2+ = {}, b2- = {}",
        rec.c2(),
        rec.c1sq(),
        rec.tau,
        fmt_rat(&rec.b2plus()),
        fmt_rat(&rec.b2minus())
    ));
    r.expect_int("N c2", &rec.c2(), 46);
    r.expect_int("N c1^2", &rec.c1sq(), 2);
    r.expect_int("N tau", &rec.tau, -30);
    r.check("N b2+", rec.b2plus() == to_rat(&int(7)), fmt_rat(&rec.b2plus()));
    r.check("N b2-", rec.b2minus() == to_rat(&int(37)), fmt_rat(&rec.b2minus()));
    r.check("N acd", nev.flags.acd == crate::flags::Tri::Yes, nev.flags.acd.as_str());

    let m = ManifoldExpr::sum_of(vec![n.clone(), ManifoldExpr::cp2bar(), ManifoldExpr::sd(d)]);
    let mev = evaluate(reg, &m)?;
    r.line(format!(
        "M = {}: chi = {}, tau = {}, pi1 = {}",
        dsl::print(&m),
        mev.record.chi,
        mev.record.tau,
        mev.flags.pi1
    ));
    r.check("M pi1", mev.flags.pi1 == GroupLabel::Cyclic(d), mev.flags.pi1.to_string());

    let cover = universal_cover(reg, &m)?;
    let nf = normalize(reg, &cover)?;
    r.line(format!("universal cover = {}", dsl::print(&cover)));
    for s in &nf.trace {
        r.line(format!("  {} -> {}", s.rule.name(), s.result));
    }
    r.line(format!("normal form: {}", nf.form));
    let want = format!("{a} CP2 # {b} CP2b");
    r.check("cover normal form", nf.canonical && nf.form.to_string() == want, format!("{} (expected {want})", nf.form));
    let up = evaluate(reg, &cover)?.record;
    r.check(
        "cover multiplicativity",
        up.chi == uint(d) * &mev.record.chi && up.tau == uint(d) * &mev.record.tau,
        format!("chi {} tau {}", up.chi, up.tau),
    );

    let x = ManifoldExpr::sum_of(vec![n, ManifoldExpr::sd(d)]);
    let lb = lebrun_einstein(reg, &x, 1, 0)?;
    r.check("LeBrun fires", lb.verdict == Verdict::EinsteinObstructed, lb.verdict.as_str());
    r.certify(lb);
    let target_expr = ManifoldExpr::sum(vec![
        (ManifoldExpr::cp2(), a as u64),
        (ManifoldExpr::cp2bar(), b as u64),
    ]);
    let rw = verify_diffeo_claim(reg, &cover, &target_expr)?;
    r.check(
        "rewrite claim",
        rw.verdict == Verdict::DiffeomorphicUnderRewriteAxioms,
        rw.verdict.as_str(),
    );
    r.certify(rw);
    let ht = hitchin_thorpe(&mev.record);
    r.line(format!("M: 2chi + 3tau = {}, 2chi - 3tau = {}", mev.record.c1sq(), mev.record.c1sq_reversed()));
    r.certify(ht);
    Ok(r)
}

fn prop13(reg: &Registry) -> Result<Report> {
    explicit_action(reg, "prop1.3", 2, 15, 77)
}

fn prop14(reg: &Registry) -> Result<Report> {
    explicit_action(reg, "prop1.4", 3, 23, 116)
}

fn thm11(reg: &Registry, cfg: &Config) -> Result<Report> {
    let mut r = Report::new("thm1.1");
    for d in [2u64, 3] {
        let n0 = zi_n0(reg, d, 10_001)?;
        r.line(format!("d = {d}: n0 = {n0}"));
        for j in [1u64, 2] {
            let bp = main_pair_family(reg, d, n0, j, cfg.n1)?;
            let z = geography::zi_family(reg, d, n0)?;
            let zr = evaluate(reg, &z.quotient)?.record;
            let k = bp.labels.iter().find(|(key, _)| key == "k").map(|(_, v)| *v).unwrap_or(0);
            r.line(format!(
                "  Z_{n0} = {}: c1^2 = {}, chi_h = {}; M_{{{n0},{j}}} = {}, k = {k}; cover -> {}",
                dsl::print(&z.quotient),
                zr.c1sq(),
                fmt_rat(&zr.chi_h()),
                dsl::print(&bp.quotient),
                bp.cover_form.as_ref().map(|f| f.to_string()).unwrap_or_default()
            ));
            if j == 1 {
                r.absorb(&format!("d={d} Z_{n0}"), &z);
            }
            r.absorb(&format!("d={d} M_{n0},{j}"), &bp);
        }
    }
    Ok(r)
}

/// Evenly spaced admissible points of the free-action region.
pub fn thm15_samples(cfg: &Config, d: u64, count: usize) -> Result<Vec<(u64, u64)>> {
    let q = GeographyQuery { d, epsilon: cfg.eps.clone(), c_of_eps: cfg.c_eps.clone(), bounds: (0, 0) };
    q.validate()?;
    let six = to_rat(&int(6)) - &q.epsilon;
    let n_eps = q.n_eps();
    let mut pts = Vec::new();
    let mut m = d;
    while pts.len() < count * 4 && m <= 400 * d {
        let mut n = d;
        while to_rat(&uint(n)) < &six * to_rat(&uint(m)) - &n_eps {
            pts.push((n, m));
            n += d;
        }
        m += d;
    }
    if pts.len() < count {
        return Ok(pts);
    }
    let stride = pts.len() / count;
    Ok(pts.into_iter().step_by(stride).take(count).collect())
}

fn thm15(reg: &Registry, cfg: &Config) -> Result<Report> {
    let mut r = Report::new("thm1.5");
    r.line(format!("eps = {}, c(eps') = {}", fmt_rat(&cfg.eps), fmt_rat(&cfg.c_eps)));
    for d in [2u64, 3] {
        let q = GeographyQuery { d, epsilon: cfg.eps.clone(), c_of_eps: cfg.c_eps.clone(), bounds: (0, 0) };
        r.line(format!("d = {d}: N(eps) = {}", fmt_rat(&q.n_eps())));
        let samples = thm15_samples(cfg, d, 50)?;
        let mut all = true;
        for (idx, (n, m)) in samples.iter().enumerate() {
            let bp = geography::build_quotient_blueprint(reg, *n, *m, d, 1)?;
            if idx < 3 {
                r.line(format!(
                    "  (n, m) = ({n}, {m}): {} ; cover -> {}",
                    dsl::print(&bp.quotient),
                    bp.cover_form.as_ref().map(|f| f.to_string()).unwrap_or_default()
                ));
            }
            for c in bp.failures() {
                r.check(format!("d={d} ({n},{m}) {}", c.name), false, c.detail.clone());
            }
            all &= bp.all_passed();
            r.certificates.extend(bp.certificates);
        }
        r.check(format!("d={d} {} sampled points", samples.len()), all && samples.len() == 50, "all blueprint checks");
    }
    Ok(r)
}

fn thm18(reg: &Registry, cfg: &Config) -> Result<Report> {
    let mut r = Report::new("thm1.8");
    r.line(format!("Wall constant n0 = {}", cfg.wall_n0));
    let x442 = evaluate(reg, &ManifoldExpr::x442())?;
    let target = ManifoldExpr::sum(vec![(ManifoldExpr::k3(), 4), (ManifoldExpr::s2xs2(), 7)]);
    let same = crate::obstruction::homeo_equal(reg, &ManifoldExpr::x442(), &target)?;
    r.line(format!("X442: chi = {}, tau = {}; homeomorphic to 4 K3 # 7 S2xS2: {}", x442.record.chi, x442.record.tau, same.verdict));
    r.check("X442 homeomorphic to 4K3#7(S2xS2)", same.verdict == Verdict::Homeomorphic, same.verdict.as_str());
    r.certify(same);
    for d in [2u64, 3] {
        for n in [1u64, 2] {
            let mut forms = Vec::new();
            for j in [1u64, 2] {
                let (m1, m2) = spin_families(reg, d, n, j, cfg.wall_n0, None)?;
                let c1 = evaluate(reg, &m1.quotient)?.record;
                r.line(format!(
                    "d = {d}, n = {n}, j = {j}: M1 chi = {}, cover -> {}; M2 cover -> {}",
                    c1.chi,
                    m1.cover_form.as_ref().map(|f| f.to_string()).unwrap_or_default(),
                    m2.cover_form.as_ref().map(|f| f.to_string()).unwrap_or_default()
                ));
                forms.push((m1.cover_form.clone(), m2.cover_form.clone()));
                if j == 1 {
                    r.absorb(&format!("d={d} n={n} M1"), &m1);
                    r.absorb(&format!("d={d} n={n} M2"), &m2);
                }
            }
            r.check(format!("d={d} n={n} cover independent of j"), forms[0] == forms[1], "j = 1, 2");
        }
    }
    Ok(r)
}

/// `Xk(k)` built from `F_{k+1} x F_2` by torus sums with `2k+2` copies of `E(2)`.
pub fn xk_by_construction(k: u64) -> ManifoldExpr {
    let mut acc = ManifoldExpr::fg_product(k + 1, 2);
    for _ in 0..2 * k + 2 {
        acc = ManifoldExpr::fiber_sum(acc, ManifoldExpr::elliptic(2), 1);
    }
    acc
}

fn thm16(reg: &Registry) -> Result<Report> {
    let mut r = Report::new("thm1.6");
    for k in 1..=10u64 {
        let xk = evaluate(reg, &ManifoldExpr::xk(k))?;
        let built = evaluate(reg, &xk_by_construction(k))?;
        let ki = k as i64;
        r.line(format!("Xk({k}): chi = {}, tau = {}, c1^2 = {}", xk.record.chi, xk.record.tau, xk.record.c1sq()));
        r.expect_int(&format!("Xk({k}) chi"), &xk.record.chi, 52 * ki + 48);
        r.expect_int(&format!("Xk({k}) tau"), &xk.record.tau, -32 * (ki + 1));
        r.check(
            format!("Xk({k}) matches its fiber-sum construction"),
            built.record == xk.record && built.flags.pi1.is_trivial(),
            format!("chi {} tau {} b1 {} pi1 {}", built.record.chi, built.record.tau, built.record.b1, built.flags.pi1),
        );
    }
    let g = GroupLabel::Presented("G".to_string());
    let top = geography::xk_c1sq(reg, 1)? + int(16);
    r.line(format!("k = 1: {top} > p > {top}/3"));
    for p in [9u64, 16, 23] {
        let bp = nonspin_group_family(reg, 24, -16, g.clone(), 1, p, 1)?;
        let ev = evaluate(reg, &bp.quotient)?;
        r.line(format!(
            "  p = {p}: chi = {}, tau = {}, pi1 = {}",
            ev.record.chi, ev.record.tau, ev.flags.pi1
        ));
        r.absorb(&format!("p={p}"), &bp);
    }
    for p in [8u64, 24] {
        let res = nonspin_group_family(reg, 24, -16, g.clone(), 1, p, 1);
        r.check(format!("p={p} rejected"), matches!(res, Err(Error::BadP(_))), "BadP");
    }
    Ok(r)
}

fn thm17(reg: &Registry) -> Result<Report> {
    let mut r = Report::new("thm1.7");
    let x2 = evaluate(reg, &ManifoldExpr::xk(2))?;
    let b2p = x2.record.b2plus_int().unwrap_or_else(|| int(-1));
    r.line(format!("X_2: c2 = {}, tau = {}, b2+ = {b2p}", x2.record.c2(), x2.record.tau));
    r.expect_int("X_2 c2", &x2.record.c2(), 152);
    r.expect_int("X_2 tau", &x2.record.tau, -96);
    r.expect_int("X_2 b2+", &b2p, 27);
    r.check("X_2 b2+ = 3 mod 4", crate::arith::residue(&b2p, 4) == 3, format!("{b2p} mod 4"));
    let g = GroupLabel::Presented("G".to_string());
    for kp in 1..=3u64 {
        for n in 1..=4u64 {
            let ev = evaluate(reg, &n_g(kp, n, g.clone()))?;
            let b = ev.record.b2plus_int().unwrap_or_else(|| int(-1));
            r.check(
                format!("N_G chi_G={} n={n} b2+ = 3 mod 4", 24 * kp),
                crate::arith::residue(&b, 4) == 3 && !b.is_zero(),
                format!("b2+ = {b}"),
            );
        }
    }
    for (kp, n) in [(1u64, 1u64), (1, 2), (2, 3)] {
        let bp = spin_group_family(reg, kp, n, g.clone(), 1)?;
        let ev = evaluate(reg, &bp.quotient)?;
        r.line(format!(
            "k' = {kp}, n = {n}: {} has chi = {}, tau = {}, pi1 = {}",
            dsl::print(&bp.quotient),
            ev.record.chi,
            ev.record.tau,
            ev.flags.pi1
        ));
        r.absorb(&format!("k'={kp} n={n}"), &bp);
    }
    Ok(r)
}

fn prop312(reg: &Registry) -> Result<Report> {
    let mut r = Report::new("prop3.12");
    for d in [3u64, 5, 7] {
        for i in [1u64, 3, 5] {
            let bp = zi_family_raw(reg, d, i)?;
            let rec = evaluate(reg, &bp.quotient)?.record;
            let (c1p, hp) = zi_printed_odd(d, i);
            let from_chern = to_rat(&(rec.c1sq() + rec.c2())) / to_rat(&int(12));
            r.line(format!(
                "d = {d}, i = {i}: c1^2 = {} (printed {c1p}), chi_h = {} (printed {}), (c1^2+c2)/12 = {}",
                rec.c1sq(),
                fmt_rat(&rec.chi_h()),
                fmt_rat(&hp),
                fmt_rat(&from_chern)
            ));
            r.check(format!("d={d} i={i} printed c1^2"), c1p == rec.c1sq(), format!("{c1p} vs {}", rec.c1sq()));
            r.check(
                format!("d={d} i={i} printed chi_h"),
                hp == from_chern,
                format!("{} vs {}", fmt_rat(&hp), fmt_rat(&from_chern)),
            );
        }
    }
    for d in [2u64, 4, 6] {
        for i in [1u64, 3, 5] {
            let bp = zi_family_raw(reg, d, i)?;
            let rec = evaluate(reg, &bp.quotient)?.record;
            let (c1p, c2p) = zi_printed_even(d, i);
            r.line(format!(
                "d = {d}, i = {i}: {} c1^2 = {} (printed {c1p}), c2 = {} (printed {c2p}), chi_h = {}",
                dsl::print(&bp.quotient),
                rec.c1sq(),
                rec.c2(),
                fmt_rat(&rec.chi_h())
            ));
            r.check(format!("d={d} i={i} printed c1^2"), c1p == rec.c1sq(), format!("{c1p} vs {}", rec.c1sq()));
            r.check(format!("d={d} i={i} printed c2"), c2p == rec.c2(), format!("{c2p} vs {}", rec.c2()));
        }
    }
    for d in 2..=7u64 {
        let n0 = zi_n0(reg, d, 10_001)?;
        let bp = zi_family_raw(reg, d, n0)?;
        let rec = evaluate(reg, &bp.quotient)?.record;
        let ratio = geography::ratio(&rec).unwrap_or_default();
        r.line(format!(
            "d = {d}: n0 = {n0}, c1^2/chi_h at n0 = {} (limit {})",
            fmt_rat(&ratio),
            fmt_rat(&geography::zi_ratio_limit(d))
        ));
        for name in ["parity_odd", "w2type_I", "ample_canonical", "pi1_cyclic", "ratio_below_five"] {
            if let Some(c) = bp.check_named(name) {
                r.check(format!("d={d} Z_n0 {name}"), c.passed, c.detail.clone());
            }
        }
    }
    Ok(r)
}
