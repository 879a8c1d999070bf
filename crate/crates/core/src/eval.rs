//! Structural evaluation of expressions into invariants, flags and capabilities.

use num_traits::Signed;

use crate::arith::{int, Int};
use crate::covers::{self, AmpleMode};
use crate::error::{Error, Result};
use crate::expr::{Action, Base, GroupLabel, ManifoldExpr};
use crate::flags::{StructureFlags, Tri, W2Type};
use crate::invariants::InvariantRecord;
use crate::obstruction::sw;
use crate::registry::{self, Capabilities, PrimitiveEntry, Registry};
use crate::surgery;

/// Everything known about an evaluated expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluated {
    pub record: InvariantRecord,
    pub flags: StructureFlags,
    pub caps: Capabilities,
    pub free_generators: u64,
    pub labels: Vec<String>,
}

impl From<PrimitiveEntry> for Evaluated {
    fn from(e: PrimitiveEntry) -> Self {
        Evaluated {
            record: e.record,
            flags: e.flags,
            caps: e.caps,
            free_generators: e.free_generators,
            labels: e.labels,
        }
    }
}

impl Evaluated {
    pub fn bare(record: InvariantRecord, flags: StructureFlags) -> Self {
        Evaluated { record, flags, caps: Capabilities::default(), free_generators: 0, labels: Vec::new() }
    }

    /// `b2+` as an integer; non-integral values are reported as zero only after a warning upstream.
    pub fn b2plus(&self) -> Int {
        self.record.b2plus().floor().to_integer()
    }
}

pub fn evaluate(reg: &Registry, expr: &ManifoldExpr) -> Result<Evaluated> {
    let mut out = match expr {
        ManifoldExpr::Primitive { name, params } => Evaluated::from(reg.lookup(name, params)?),
        ManifoldExpr::CyclicCover { base, d, branch } => cyclic(*base, *d, branch)?,
        ManifoldExpr::BicyclicCover { d, p, a, b, m, n } => bicyclic(*d, *p, *a, *b, *m, *n)?,
        ManifoldExpr::Quotient { inner, d, action } => quotient(reg, inner, *d, *action)?,
        ManifoldExpr::ConnectedSum(parts) => {
            if parts.is_empty() {
                return Err(Error::InvalidExpr("empty connected sum".to_string()));
            }
            let mut evaluated = Vec::with_capacity(parts.len());
            for (part, mult) in parts {
                if *mult == 0 {
                    return Err(Error::InvalidExpr("multiplicity 0 in connected sum".to_string()));
                }
                evaluated.push((evaluate(reg, part)?, *mult));
            }
            surgery::connected_sum(&evaluated)?
        }
        ManifoldExpr::FiberSum { left, right, genus } => {
            surgery::fiber_sum(&evaluate(reg, left)?, &evaluate(reg, right)?, *genus)?
        }
        ManifoldExpr::LogTransform { inner, multiplicity } => {
            surgery::log_transform(&evaluate(reg, inner)?, *multiplicity)?
        }
    };
    sw::apply_block_rules(&out.record, &mut out.flags)?;
    out.flags.close(&out.record)?;
    Ok(out)
}

pub fn eval_invariants(reg: &Registry, expr: &ManifoldExpr) -> Result<InvariantRecord> {
    evaluate(reg, expr).map(|e| e.record)
}

pub fn infer_flags(reg: &Registry, expr: &ManifoldExpr) -> Result<StructureFlags> {
    evaluate(reg, expr).map(|e| e.flags)
}

/// Evaluation against the built-in registry.
pub fn eval(expr: &ManifoldExpr) -> Result<Evaluated> {
    evaluate(registry::standard(), expr)
}

fn cover_flags(
    flags: &mut StructureFlags,
    canonical: &[Int],
    total_degree_odd: bool,
    spin_rule_odd: &str,
) -> Result<()> {
    flags.set_pi1(GroupLabel::Trivial, "flexible branch over a simply connected base")?;
    flags.set_kahler(Tri::Yes, "branched cover of a projective surface")?;
    flags.set_symplectic(Tri::Yes, "Kahler forms are symplectic")?;
    flags.mark_complex();
    let positive = canonical.iter().all(|c| c.is_positive());
    flags.set_ample_canonical(Tri::from_bool(positive), "canonical class is a pullback of O(K) by a finite map")?;
    flags.set_minimal_general_type(
        Tri::from_bool(positive),
        "ample canonical class exactly when every pulled-back degree is positive",
    )?;
    let even = canonical.iter().all(|c| (c % int(2)) == int(0));
    if even {
        flags.set_spin(Tri::Yes, "canonical class is twice a pulled-back class")?;
    } else if total_degree_odd {
        flags.set_spin(Tri::No, spin_rule_odd)?;
    }
    Ok(())
}

fn cyclic(base: Base, d: u64, branch: &crate::expr::DivisorClass) -> Result<Evaluated> {
    let record = covers::cyclic_cover_of_base(base, d, branch)?;
    let mut flags = StructureFlags::new();
    let l = branch.divided(d);
    let c1 = base.c1().minus_scaled(&l.as_vec(), &(Int::from(d) - 1));
    let canonical: Vec<Int> = c1.coeffs.iter().map(|c| -c).collect();
    cover_flags(
        &mut flags,
        &canonical,
        true,
        "a line component of a degenerate branch meets the canonical class oddly",
    )?;
    match base {
        Base::CP1xCP1 => flags.set_acd(Tri::Yes, "Mandelbaum-Moishezon: iterated cyclic covers of CP1xCP1 are ACD")?,
        Base::CP2 => flags.set_acd(Tri::Yes, "Mandelbaum: hypersurfaces in weighted projective space are ACD")?,
    }
    Ok(Evaluated::bare(record, flags))
}

fn bicyclic(d: u64, p: u64, a: u64, b: u64, m: u64, n: u64) -> Result<Evaluated> {
    let record = covers::bicyclic_invariants(d, p, a, b, m, n)?;
    let mut flags = StructureFlags::new();
    let (x, y) = covers::bicyclic_canonical(d, p, a, b, m, n);
    debug_assert_eq!(
        x.is_positive() && y.is_positive(),
        covers::ample_canonical(d, p, a, b, m, n, AmpleMode::Cover)
    );
    cover_flags(
        &mut flags,
        &[x, y],
        d % 2 == 1 || p % 2 == 1,
        "a ruling component of a degenerate branch meets the canonical class oddly",
    )?;
    flags.set_acd(Tri::Yes, "Mandelbaum-Moishezon: iterated cyclic covers of CP1xCP1 are ACD")?;
    Ok(Evaluated::bare(record, flags))
}

fn quotient(reg: &Registry, inner: &ManifoldExpr, d: u64, action: Action) -> Result<Evaluated> {
    let cover = evaluate(reg, inner)?;
    if d == 1 {
        return Ok(cover);
    }
    match inner {
        ManifoldExpr::BicyclicCover { d: di, a, b, m, n, .. } => {
            if *di != d {
                return Err(Error::InvalidExpr(format!("quotient by {d} of a cover of type ({di}, _)")));
            }
            let adm = covers::action_admissibility(d, *a, *b, action);
            if let Some(w) = adm.witness() {
                return Err(Error::AdmissibilityFail(format!("gcd({}={}, {d}) = {}", w.label, w.value, w.gcd)));
            }
            if action == Action::Standard && (m % d != 0 || n % d != 0) {
                return Err(Error::AdmissibilityFail(format!(
                    "standard action needs {d} | m = {m} and {d} | n = {n}"
                )));
            }
        }
        ManifoldExpr::CyclicCover { base: Base::CP1xCP1, d: dc, branch } => {
            if *dc != d {
                return Err(Error::InvalidExpr(format!("quotient by {d} of a {dc}-fold cover")));
            }
            let l = branch.divided(d);
            let adm = covers::action_admissibility(d, l.degrees[0], l.degrees[1], action);
            if let Some(w) = adm.witness() {
                return Err(Error::AdmissibilityFail(format!("gcd({}={}, {d}) = {}", w.label, w.value, w.gcd)));
            }
        }
        _ => {
            return Err(Error::InvalidExpr(
                "quotients are defined for cyclic covers of CP1xCP1 and bi-cyclic covers".to_string(),
            ))
        }
    }
    let record = covers::quotient_invariants(&cover.record, d)?;
    let mut flags = StructureFlags::new();
    flags.set_pi1(GroupLabel::Cyclic(d), "free Z/d action on a simply connected cover")?;
    flags.set_kahler(Tri::Yes, "free quotient of a Kahler surface")?;
    flags.set_symplectic(Tri::Yes, "Kahler forms are symplectic")?;
    flags.mark_complex();
    let inherit = "free quotients inherit the canonical class";
    flags.set_ample_canonical(cover.flags.ample_canonical, inherit)?;
    flags.set_minimal_general_type(cover.flags.minimal_general_type, inherit)?;
    if cover.flags.spin == Tri::No {
        flags.set_w2type(W2Type::I, "universal cover is non-spin")?;
    }
    if cover.flags.spin == Tri::Yes && d % 2 == 1 {
        flags.set_spin(Tri::Yes, "odd-order quotient of a spin cover: no 2-torsion obstruction")?;
    }
    Ok(Evaluated::bare(record, flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::expr::DivisorClass;
    use crate::flags::Parity;

    #[test]
    fn registry_examples() {
        let e2 = eval(&ManifoldExpr::elliptic(2)).unwrap().record;
        assert_eq!((e2.chi.clone(), e2.tau.clone()), (int(24), int(-16)));
        let x = eval(&ManifoldExpr::x442()).unwrap().record;
        assert_eq!((x.c1sq(), x.c2(), x.b2plus()), (int(16), int(104), rat(19, 1)));
    }

    #[test]
    fn octic_double_plane_flags() {
        let n = ManifoldExpr::cyclic_cover(Base::CP2, 2, DivisorClass::cp2(8));
        let ev = eval(&n).unwrap();
        assert_eq!(ev.flags.spin, Tri::No);
        assert_eq!(ev.flags.acd, Tri::Yes);
        assert_eq!(ev.flags.sw_nontrivial, Tri::Yes);
        assert_eq!(ev.flags.w2type, W2Type::I);
    }

    #[test]
    fn sextic_double_plane_is_spin() {
        let k3 = ManifoldExpr::cyclic_cover(Base::CP2, 2, DivisorClass::cp2(6));
        let ev = eval(&k3).unwrap();
        assert_eq!(ev.record, InvariantRecord::simply(24, -16));
        assert_eq!(ev.flags.spin, Tri::Yes);
    }

    #[test]
    fn zi_odd_flags() {
        let z = ManifoldExpr::quotient(ManifoldExpr::bicyclic(3, 2, 3, 3, 3, 3), 3, Action::Standard);
        let ev = eval(&z).unwrap();
        assert_eq!(ev.flags.parity, Parity::Odd);
        assert_eq!(ev.flags.w2type, W2Type::I);
        assert_eq!(ev.flags.pi1, GroupLabel::Cyclic(3));
        assert!(ev.flags.rule_for("parity").is_some());
    }

    #[test]
    fn bad_quotients() {
        let wrong_order = ManifoldExpr::quotient(ManifoldExpr::bicyclic(3, 2, 3, 3, 3, 3), 2, Action::Standard);
        assert!(matches!(eval(&wrong_order), Err(Error::InvalidExpr(_))));
        let clash = ManifoldExpr::quotient(ManifoldExpr::bicyclic(2, 2, 1, 2, 2, 2), 2, Action::Standard);
        assert!(matches!(eval(&clash), Err(Error::AdmissibilityFail(_))));
    }
}
