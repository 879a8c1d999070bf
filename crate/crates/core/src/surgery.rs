//! Transport of invariants and flags through connected sums, fiber sums, log transforms and covers.

use num_traits::{Signed, Zero};

use crate::arith::{int, uint};
use crate::error::{Error, Result};
use crate::eval::{evaluate, Evaluated};
use crate::expr::{GroupLabel, ManifoldExpr};
use crate::flags::{Parity, StructureFlags, Tri, W2Type};
use crate::invariants::InvariantRecord;
use crate::obstruction::sw;
use crate::registry::{Capabilities, Registry, SurfaceTag};

/// Invariants of `#_i m_i P_i` with `k = sum m_i` summands: `chi = sum chi - 2(k-1)`.
pub fn connected_sum_record(parts: &[(InvariantRecord, u64)]) -> InvariantRecord {
    let mut chi = int(0);
    let mut tau = int(0);
    let mut b1 = int(0);
    let mut count = 0u64;
    for (rec, m) in parts {
        let m_ = uint(*m);
        chi += &rec.chi * &m_;
        tau += &rec.tau * &m_;
        b1 += &rec.b1 * &m_;
        count += m;
    }
    chi -= int(2) * (uint(count) - 1);
    InvariantRecord::new(chi, tau, b1)
}

fn sum_pi1(parts: &[(Evaluated, u64)]) -> GroupLabel {
    let mut nontrivial = Vec::new();
    for (e, m) in parts {
        match &e.flags.pi1 {
            GroupLabel::Unknown => return GroupLabel::Unknown,
            g if g.is_trivial() => {}
            g => nontrivial.push((g.clone(), *m)),
        }
    }
    match nontrivial.as_slice() {
        [] => GroupLabel::Trivial,
        [(g, 1)] => g.clone(),
        _ => {
            let factors: Vec<String> = nontrivial
                .iter()
                .flat_map(|(g, m)| std::iter::repeat_n(g.to_string(), *m as usize))
                .collect();
            GroupLabel::Presented(factors.join(" * "))
        }
    }
}

pub fn connected_sum(parts: &[(Evaluated, u64)]) -> Result<Evaluated> {
    let total: u64 = parts.iter().map(|(_, m)| m).sum();
    if total == 1 {
        return Ok(parts.iter().find(|(_, m)| *m == 1).map(|(e, _)| e.clone()).expect("one part"));
    }
    let records: Vec<(InvariantRecord, u64)> = parts.iter().map(|(e, m)| (e.record.clone(), *m)).collect();
    let record = connected_sum_record(&records);
    let mut flags = StructureFlags::new();
    flags.set_pi1(sum_pi1(parts), "Seifert-van Kampen: free product of the summands")?;

    let spins: Vec<Tri> = parts.iter().map(|(e, _)| e.flags.spin).collect();
    if spins.iter().all(|s| *s == Tri::Yes) {
        flags.set_spin(Tri::Yes, "connected sum of spin manifolds is spin")?;
    } else if spins.contains(&Tri::No) {
        flags.set_spin(Tri::No, "a non-spin summand makes the sum non-spin")?;
    }
    let parities: Vec<Parity> = parts.iter().map(|(e, _)| e.flags.parity).collect();
    if parities.contains(&Parity::Odd) {
        flags.set_parity(Parity::Odd, "intersection form is the orthogonal sum")?;
    } else if parities.iter().all(|p| *p == Parity::Even) {
        flags.set_parity(Parity::Even, "intersection form is the orthogonal sum")?;
    }
    let w2: Vec<W2Type> = parts.iter().map(|(e, _)| e.flags.w2type).collect();
    if w2.contains(&W2Type::I) {
        flags.set_w2type(W2Type::I, "a summand of type I has non-spin universal cover")?;
    } else if w2.iter().all(|w| *w == W2Type::II) {
        flags.set_w2type(W2Type::II, "all summands spin")?;
    } else if w2.iter().all(|w| matches!(w, W2Type::II | W2Type::III)) {
        flags.set_w2type(W2Type::III, "spin universal cover but a non-spin summand")?;
    }
    if parts.iter().all(|(e, _)| e.flags.acd == Tri::Yes) {
        flags.set_acd(Tri::Yes, "ACD is closed under connected sum")?;
    }
    sw::apply_sum_rules(parts, &mut flags)?;

    let mut labels: Vec<String> = Vec::new();
    for (e, _) in parts {
        for l in &e.labels {
            if !labels.contains(l) {
                labels.push(l.clone());
            }
        }
    }
    let mut out = Evaluated::bare(record, flags);
    out.labels = labels;
    Ok(out)
}

fn take_tag(caps: &Capabilities, genus: u64) -> Option<(SurfaceTag, Vec<SurfaceTag>)> {
    let idx = caps.surfaces.iter().position(|t| t.genus == genus)?;
    let mut rest = caps.surfaces.clone();
    let tag = rest.remove(idx);
    Some((tag, rest))
}

/// The fundamental group of one side after gluing in a simply connected complement along `tag`.
fn after_kills(side: &Evaluated, tag: &SurfaceTag) -> (GroupLabel, u64, u64) {
    let killed = tag.kills.min(side.free_generators);
    if killed == 0 {
        return (side.flags.pi1.clone(), side.free_generators, 0);
    }
    let remaining = side.free_generators - killed;
    let group = if remaining == 0 {
        GroupLabel::Trivial
    } else {
        match &side.flags.pi1 {
            GroupLabel::Presented(name) if name.starts_with("quotient of ") => side.flags.pi1.clone(),
            other => GroupLabel::Presented(format!("quotient of {other}")),
        }
    };
    (group, remaining, killed)
}

/// Symplectic sum along genus-`g` surfaces of self-intersection zero.
pub fn fiber_sum(left: &Evaluated, right: &Evaluated, genus: u64) -> Result<Evaluated> {
    let (ltag, lrest) = take_tag(&left.caps, genus)
        .ok_or_else(|| Error::MissingCapability(format!("left side has no genus-{genus} surface")))?;
    let (rtag, rrest) = take_tag(&right.caps, genus)
        .ok_or_else(|| Error::MissingCapability(format!("right side has no genus-{genus} surface")))?;

    let right_fills = rtag.complement_simply_connected && right.flags.pi1.is_trivial();
    let left_fills = ltag.complement_simply_connected && left.flags.pi1.is_trivial();
    let (pi1, free_generators, killed) = if right_fills {
        after_kills(left, &ltag)
    } else if left_fills {
        after_kills(right, &rtag)
    } else {
        return Err(Error::UnsupportedPattern(format!(
            "fundamental group of the sum along {} and {}",
            ltag.label, rtag.label
        )));
    };

    let g = uint(genus);
    let chi = &left.record.chi + &right.record.chi - int(2) * (int(2) - int(2) * &g);
    let tau = &left.record.tau + &right.record.tau;
    let b1 = &left.record.b1 + &right.record.b1 - uint(killed);
    if b1.is_negative() {
        return Err(Error::Internal("negative b1 after a fiber sum".to_string()));
    }
    let record = InvariantRecord::new(chi, tau, b1);

    let mut flags = StructureFlags::new();
    flags.set_pi1(pi1.clone(), "Seifert-van Kampen with a simply connected complement")?;
    if left.flags.symplectic == Tri::Yes && right.flags.symplectic == Tri::Yes {
        flags.set_symplectic(Tri::Yes, "Gompf: symplectic sum")?;
    }
    if left.flags.spin == Tri::Yes && right.flags.spin == Tri::Yes {
        flags.set_spin(Tri::Yes, "Gompf: sum of spin manifolds along surfaces with compatible spin structures")?;
    }

    let keep_sc = pi1.is_trivial();
    let surfaces = lrest
        .into_iter()
        .chain(rrest)
        .map(|mut t| {
            t.complement_simply_connected &= keep_sc;
            t
        })
        .collect();
    let elliptic = left.caps.elliptic_fibers > 0 && right.caps.elliptic_fibers > 0 && genus == 1;
    let mut labels = left.labels.clone();
    labels.extend(right.labels.iter().cloned());
    Ok(Evaluated {
        record,
        flags,
        caps: Capabilities { surfaces, elliptic_fibers: u64::from(elliptic) },
        free_generators,
        labels,
    })
}

/// Logarithmic transform of multiplicity `mult` on an elliptic fiber; invariants are unchanged.
pub fn log_transform(inner: &Evaluated, mult: u64) -> Result<Evaluated> {
    if mult == 0 {
        return Err(Error::NegativeDegree("log transform multiplicity 0".to_string()));
    }
    if inner.caps.elliptic_fibers == 0 {
        return Err(Error::MissingCapability("log transform needs an elliptic fiber".to_string()));
    }
    if mult == 1 {
        return Ok(inner.clone());
    }
    let mut flags = StructureFlags::new();
    let rule = "one multiple fiber keeps the elliptic surface simply connected";
    flags.set_pi1(inner.flags.pi1.clone(), rule)?;
    flags.set_kahler(inner.flags.kahler, "log transforms of algebraic elliptic surfaces stay Kahler")?;
    if inner.flags.kahler == Tri::Yes {
        flags.set_symplectic(Tri::Yes, "Kahler forms are symplectic")?;
        flags.mark_complex();
    }
    if mult % 2 == 1 {
        flags.set_spin(inner.flags.spin, "odd multiplicity preserves w2")?;
    }
    flags.set_sw(inner.flags.sw_nontrivial, "log transforms keep a basic class")?;
    flags.set_sw_mod2(inner.flags.sw_mod2_nontrivial, "log transforms keep a basic class with odd invariant")?;
    flags.set_minimal_general_type(inner.flags.minimal_general_type, "Kodaira dimension is unchanged")?;
    let mut out = inner.clone();
    out.flags = flags;
    out.labels.push(format!("basic class {}f", mult - 1));
    out.labels.push(format!("log transform multiplicity {mult}"));
    Ok(out)
}

/// Expression-level log transform; multiplicity 1 returns the input.
pub fn log_transform_expr(expr: ManifoldExpr, mult: u64) -> ManifoldExpr {
    if mult == 1 {
        expr
    } else {
        ManifoldExpr::log_transform(expr, mult)
    }
}

/// Universal cover for the supported patterns: trivial groups, quotients, `Sd`, and sums with one cyclic summand.
pub fn universal_cover(reg: &Registry, expr: &ManifoldExpr) -> Result<ManifoldExpr> {
    let ev = evaluate(reg, expr)?;
    let d = match &ev.flags.pi1 {
        g if g.is_trivial() => return Ok(expr.clone()),
        GroupLabel::Cyclic(d) => *d,
        other => return Err(Error::UnsupportedPattern(format!("universal cover with pi1 = {other}"))),
    };
    let cover = match expr {
        ManifoldExpr::Quotient { inner, .. } => (**inner).clone(),
        ManifoldExpr::Primitive { name, .. } if name == "Sd" => {
            ManifoldExpr::sum(vec![(ManifoldExpr::s2xs2(), d - 1)])
        }
        ManifoldExpr::ConnectedSum(_) => {
            let parts = expr.flatten_sum();
            let mut special = None;
            let mut others = Vec::new();
            for (part, m) in parts {
                let pi1 = evaluate(reg, &part)?.flags.pi1;
                if pi1.is_trivial() {
                    others.push((part, m * d));
                } else if special.is_none() && m == 1 && pi1 == GroupLabel::Cyclic(d) {
                    special = Some(part);
                } else {
                    return Err(Error::UnsupportedPattern(format!("summand with pi1 = {pi1}")));
                }
            }
            let special = special.ok_or_else(|| Error::UnsupportedPattern("no cyclic summand".to_string()))?;
            for piece in universal_cover(reg, &special)?.flatten_sum() {
                others.push(piece);
            }
            ManifoldExpr::sum(others)
        }
        _ => return Err(Error::UnsupportedPattern("no universal cover rule matches".to_string())),
    };
    let up = evaluate(reg, &cover)?.record;
    let expected = ev.record.scaled(d);
    if up.chi != expected.chi || up.tau != expected.tau || !up.b1.is_zero() {
        return Err(Error::Internal(format!(
            "cover has chi = {}, tau = {} but {d} times the base gives {}, {}",
            up.chi, up.tau, expected.chi, expected.tau
        )));
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;
    use crate::expr::{Base, DivisorClass};
    use crate::registry::standard;

    fn n8() -> ManifoldExpr {
        ManifoldExpr::cyclic_cover(Base::CP2, 2, DivisorClass::cp2(8))
    }

    #[test]
    fn sum_examples() {
        let s = ManifoldExpr::sum_of(vec![ManifoldExpr::cp2(), ManifoldExpr::cp2bar()]);
        assert_eq!(eval(&s).unwrap().record, InvariantRecord::simply(4, 0));
        let p = ManifoldExpr::sum_of(vec![n8(), ManifoldExpr::cp2bar(), ManifoldExpr::sd(2)]);
        let ev = eval(&p).unwrap();
        assert_eq!(ev.record, InvariantRecord::simply(47, -31));
        assert_eq!(ev.b2plus(), int(7));
        assert_eq!(ev.flags.pi1, GroupLabel::Cyclic(2));
    }

    #[test]
    fn torus_sum_of_rational_elliptic_surfaces() {
        let e = ManifoldExpr::fiber_sum(ManifoldExpr::elliptic(1), ManifoldExpr::elliptic(1), 1);
        assert_eq!(eval(&e).unwrap().record, InvariantRecord::simply(24, -16));
    }

    #[test]
    fn genus_two_sum_adds_four() {
        let e = ManifoldExpr::fiber_sum(ManifoldExpr::elliptic(4), ManifoldExpr::xk(1), 2);
        let r = eval(&e).unwrap().record;
        assert_eq!(r.chi, int(48 + 100 + 4));
    }

    #[test]
    fn missing_capability() {
        let e = ManifoldExpr::fiber_sum(ManifoldExpr::cp2(), ManifoldExpr::elliptic(1), 1);
        assert!(matches!(eval(&e), Err(Error::MissingCapability(_))));
        let l = ManifoldExpr::log_transform(ManifoldExpr::cp2(), 3);
        assert!(matches!(eval(&l), Err(Error::MissingCapability(_))));
    }

    #[test]
    fn log_transform_matches_y() {
        let l = eval(&ManifoldExpr::log_transform(ManifoldExpr::elliptic(2), 5)).unwrap();
        let y = eval(&ManifoldExpr::y(2)).unwrap();
        assert_eq!(l.record, y.record);
        assert_eq!(l.flags.spin, Tri::Yes);
        assert!(y.labels.iter().all(|t| l.labels.contains(t)));
        assert_eq!(log_transform_expr(ManifoldExpr::k3(), 1), ManifoldExpr::k3());
    }

    #[test]
    fn covers() {
        let reg = standard();
        assert_eq!(universal_cover(reg, &ManifoldExpr::sd(2)).unwrap(), ManifoldExpr::s2xs2());
        assert_eq!(universal_cover(reg, &ManifoldExpr::k3()).unwrap(), ManifoldExpr::k3());
        let p = ManifoldExpr::sum_of(vec![n8(), ManifoldExpr::cp2bar(), ManifoldExpr::sd(2)]);
        let up = universal_cover(reg, &p).unwrap();
        assert_eq!(
            up,
            ManifoldExpr::sum(vec![(n8(), 2), (ManifoldExpr::cp2bar(), 2), (ManifoldExpr::s2xs2(), 1)])
        );
        let two = ManifoldExpr::sum(vec![(ManifoldExpr::sd(2), 2)]);
        assert!(matches!(universal_cover(reg, &two), Err(Error::UnsupportedPattern(_))));
    }
}
