//! Named primitives with declared invariants, flags and fiber-sum capabilities.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::arith::{int, Int};
use crate::error::{Error, Result};
use crate::expr::{GroupLabel, Param};
use crate::flags::{Parity, StructureFlags, Tri};
use crate::invariants::{derive_betti, InvariantRecord};

/// An embedded surface of self-intersection zero available for one fiber sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceTag {
    pub genus: u64,
    /// The complement of the surface in its host is simply connected.
    pub complement_simply_connected: bool,
    /// Number of first-homology generators of the host killed by gluing in a simply connected complement.
    pub kills: u64,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Capabilities {
    pub surfaces: Vec<SurfaceTag>,
    pub elliptic_fibers: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveEntry {
    pub record: InvariantRecord,
    pub flags: StructureFlags,
    pub caps: Capabilities,
    /// Generators of `H1` that surface sums can still kill; zero means none are tracked.
    pub free_generators: u64,
    pub labels: Vec<String>,
}

impl PrimitiveEntry {
    fn new(record: InvariantRecord, flags: StructureFlags) -> Self {
        PrimitiveEntry { record, flags, caps: Capabilities::default(), free_generators: 0, labels: Vec::new() }
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "CP2", "CP2b", "S2xS2", "K3", "S1xS3", "S4", "E", "Sd", "X442", "Xk", "XG", "Y", "FgProduct",
    "Block",
];

#[derive(Debug, Clone, Default)]
pub struct Registry {
    user: BTreeMap<String, PrimitiveEntry>,
}

static STANDARD: OnceLock<Registry> = OnceLock::new();

/// The shared registry holding only the built-in primitives.
pub fn standard() -> &'static Registry {
    STANDARD.get_or_init(Registry::new)
}

const DECLARED: &str = "declared primitive";

impl Registry {
    pub fn new() -> Self {
        Registry { user: BTreeMap::new() }
    }

    pub fn is_known_name(&self, name: &str) -> bool {
        BUILTIN_NAMES.contains(&name) || self.user.contains_key(name)
    }

    pub fn user_names(&self) -> impl Iterator<Item = &str> {
        self.user.keys().map(String::as_str)
    }

    /// Adds a parameterless primitive after checking the record and closing its flags.
    pub fn register_primitive(
        &mut self,
        name: &str,
        record: InvariantRecord,
        mut flags: StructureFlags,
    ) -> Result<()> {
        if self.is_known_name(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        if let Some(w) = derive_betti(&record).warning {
            return Err(Error::InvalidExpr(format!("record for `{name}` is inconsistent: {w}")));
        }
        flags.close(&record)?;
        self.user.insert(name.to_string(), PrimitiveEntry::new(record, flags));
        Ok(())
    }

    pub fn lookup(&self, name: &str, params: &[Param]) -> Result<PrimitiveEntry> {
        if let Some(entry) = self.user.get(name) {
            if !params.is_empty() {
                return Err(Error::InvalidExpr(format!("`{name}` takes no parameters")));
            }
            return Ok(entry.clone());
        }
        let mut entry = builtin(name, params)?;
        entry.flags.close(&entry.record)?;
        Ok(entry)
    }
}

fn ints(name: &str, params: &[Param], arity: std::ops::RangeInclusive<usize>) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for p in params {
        match p {
            Param::Int(v) => out.push(*v),
            Param::Group(_) => {
                return Err(Error::InvalidExpr(format!("`{name}` takes only integer parameters")))
            }
        }
    }
    if !arity.contains(&out.len()) {
        return Err(Error::InvalidExpr(format!(
            "`{name}` expects {}..={} parameters, got {}",
            arity.start(),
            arity.end(),
            out.len()
        )));
    }
    Ok(out)
}

fn positive(name: &str, v: i64) -> Result<u64> {
    if v < 1 {
        return Err(Error::NegativeDegree(format!("{name} parameter {v}")));
    }
    Ok(v as u64)
}

fn simply_connected(flags: &mut StructureFlags) -> Result<()> {
    flags.set_pi1(GroupLabel::Trivial, DECLARED)
}

fn kahler(flags: &mut StructureFlags, rule: &str) -> Result<()> {
    flags.set_kahler(Tri::Yes, rule)?;
    flags.set_symplectic(Tri::Yes, "Kahler forms are symplectic")?;
    flags.mark_complex();
    Ok(())
}

fn torus(label: &str) -> SurfaceTag {
    SurfaceTag { genus: 1, complement_simply_connected: true, kills: 0, label: label.to_string() }
}

fn builtin(name: &str, params: &[Param]) -> Result<PrimitiveEntry> {
    let mut f = StructureFlags::new();
    let entry = match name {
        "CP2" => {
            ints(name, params, 0..=0)?;
            simply_connected(&mut f)?;
            kahler(&mut f, "projective plane")?;
            f.set_spin(Tri::No, DECLARED)?;
            f.set_acd(Tri::Yes, "completely decomposable")?;
            f.set_minimal_general_type(Tri::No, DECLARED)?;
            PrimitiveEntry::new(InvariantRecord::simply(3, 1), f)
        }
        "CP2b" => {
            ints(name, params, 0..=0)?;
            simply_connected(&mut f)?;
            f.set_spin(Tri::No, DECLARED)?;
            f.set_symplectic(Tri::No, "b2+ = 0 admits no symplectic form")?;
            f.set_acd(Tri::Yes, "completely decomposable")?;
            f.set_minimal_general_type(Tri::No, DECLARED)?;
            PrimitiveEntry::new(InvariantRecord::simply(3, -1), f)
        }
        "S2xS2" => {
            ints(name, params, 0..=0)?;
            simply_connected(&mut f)?;
            kahler(&mut f, "quadric surface")?;
            f.set_spin(Tri::Yes, DECLARED)?;
            f.set_acd(Tri::Yes, "S2xS2 # CP2 = 2 CP2 # CP2b")?;
            f.set_minimal_general_type(Tri::No, DECLARED)?;
            PrimitiveEntry::new(InvariantRecord::simply(4, 0), f)
        }
        "K3" => {
            ints(name, params, 0..=0)?;
            simply_connected(&mut f)?;
            kahler(&mut f, "quartic surface")?;
            f.set_spin(Tri::Yes, DECLARED)?;
            f.set_acd(Tri::Yes, "Mandelbaum: complete intersections are ACD")?;
            f.set_minimal_general_type(Tri::No, "Kodaira dimension 0")?;
            let mut e = PrimitiveEntry::new(InvariantRecord::simply(24, -16), f);
            e.caps.surfaces.push(torus("elliptic fiber of K3"));
            e.caps.elliptic_fibers = 1;
            e
        }
        "S1xS3" => {
            ints(name, params, 0..=0)?;
            f.set_pi1(GroupLabel::Presented("Z".to_string()), DECLARED)?;
            f.set_spin(Tri::Yes, DECLARED)?;
            f.set_symplectic(Tri::No, "b2+ = 0 admits no symplectic form")?;
            PrimitiveEntry::new(InvariantRecord::new(int(0), int(0), int(1)), f)
        }
        "S4" => {
            ints(name, params, 0..=0)?;
            simply_connected(&mut f)?;
            f.set_spin(Tri::Yes, DECLARED)?;
            PrimitiveEntry::new(InvariantRecord::simply(2, 0), f)
        }
        "E" => {
            let v = ints(name, params, 1..=1)?;
            let n = positive(name, v[0])?;
            simply_connected(&mut f)?;
            kahler(&mut f, "elliptic surface")?;
            f.set_spin(Tri::from_bool(n % 2 == 0), "E(n) is spin exactly when n is even")?;
            f.set_minimal_general_type(Tri::No, "elliptic surfaces are not of general type")?;
            let n_i = n as i64;
            let mut e = PrimitiveEntry::new(InvariantRecord::simply(12 * n_i, -8 * n_i), f);
            e.caps.surfaces.push(torus(&format!("generic fiber of E({n})")));
            if n == 4 {
                e.caps.surfaces.push(SurfaceTag {
                    genus: 2,
                    complement_simply_connected: true,
                    kills: 0,
                    label: "genus-2 surface of E(4)".to_string(),
                });
            }
            e.caps.elliptic_fibers = 1;
            e
        }
        "Sd" => {
            let v = ints(name, params, 1..=1)?;
            let d = positive(name, v[0])?;
            if d < 2 {
                return Err(Error::InvalidExpr("Sd needs d >= 2".to_string()));
            }
            f.set_pi1(GroupLabel::Cyclic(d), "rational homology sphere with cyclic fundamental group")?;
            f.set_parity(Parity::Even, "b2 = 0")?;
            f.set_sw(Tri::No, "b2+ = 0")?;
            if d % 2 == 0 {
                f.set_spin(Tri::Yes, "declared: the rational homology sphere is built spin (Ue)")?;
            }
            let mut e = PrimitiveEntry::new(InvariantRecord::simply(2, 0), f);
            e.labels.push(format!("universal cover {}(S2xS2)", d - 1));
            e
        }
        "X442" => {
            ints(name, params, 0..=0)?;
            simply_connected(&mut f)?;
            kahler(&mut f, "hypersurface of tridegree (4,4,2) in (CP1)^3")?;
            f.set_spin(Tri::Yes, "canonical class (2,2,0) is even")?;
            f.set_minimal_general_type(Tri::Yes, DECLARED)?;
            PrimitiveEntry::new(InvariantRecord::simply(104, -64), f)
        }
        "Xk" => {
            let v = ints(name, params, 1..=1)?;
            let k = positive(name, v[0])? as i64;
            simply_connected(&mut f)?;
            f.set_spin(Tri::Yes, "fiber sum of spin pieces along tori")?;
            f.set_symplectic(Tri::Yes, "Gompf symplectic sum")?;
            let mut e = PrimitiveEntry::new(InvariantRecord::simply(52 * k + 48, -32 * (k + 1)), f);
            for copy in 1..=2 {
                e.caps.surfaces.push(SurfaceTag {
                    genus: 2,
                    complement_simply_connected: true,
                    kills: 0,
                    label: format!("{{pt}}xF2 copy {copy} in Xk({k})"),
                });
            }
            e
        }
        "XG" => xg(params)?,
        "Y" => {
            let v = ints(name, params, 1..=1)?;
            let j = positive(name, v[0])?;
            simply_connected(&mut f)?;
            kahler(&mut f, "logarithmic transform of E(2) of odd multiplicity")?;
            f.set_spin(Tri::Yes, DECLARED)?;
            f.set_sw(Tri::Yes, "Kahler with b2+ > 1")?;
            f.set_sw_mod2(Tri::Yes, "basic class with Seiberg-Witten invariant 1")?;
            f.set_minimal_general_type(Tri::No, "elliptic surfaces are not of general type")?;
            let mut e = PrimitiveEntry::new(InvariantRecord::simply(24, -16), f);
            e.labels.push(format!("basic class {}f", 2 * j));
            e.labels.push(format!("log transform multiplicity {}", 2 * j + 1));
            e
        }
        "FgProduct" => {
            let v = ints(name, params, 2..=2)?;
            let g1 = positive(name, v[0])?;
            let g2 = positive(name, v[1])?;
            f.set_pi1(
                GroupLabel::Presented(format!("pi1(F{g1}xF{g2})")),
                "product of surface groups",
            )?;
            kahler(&mut f, "product of curves")?;
            f.set_spin(Tri::Yes, "product of surfaces")?;
            let chi = (2 - 2 * g1 as i64) * (2 - 2 * g2 as i64);
            let b1 = 2 * g1 + 2 * g2;
            let mut e = PrimitiveEntry::new(InvariantRecord::new(int(chi), int(0), Int::from(b1)), f);
            e.free_generators = b1;
            if g2 == 2 && g1 >= 2 {
                for i in 1..=2 * g1 {
                    e.caps.surfaces.push(SurfaceTag {
                        genus: 1,
                        complement_simply_connected: false,
                        kills: if i <= 4 { 2 } else { 1 },
                        label: format!("Lagrangian torus T{i}"),
                    });
                }
            }
            e
        }
        "Block" => {
            let v = ints(name, params, 3..=3)?;
            let (chi_h, c1sq, j) = (v[0], v[1], v[2]);
            if chi_h < 1 || c1sq < 1 || j < 1 {
                return Err(Error::InvalidExpr(format!(
                    "Block({chi_h},{c1sq},{j}) needs positive parameters"
                )));
            }
            simply_connected(&mut f)?;
            f.set_symplectic(Tri::Yes, "Braungardt-Kotschick geography")?;
            f.set_minimal_general_type(Tri::Yes, "minimal symplectic block")?;
            f.set_acd(Tri::Yes, "Braungardt-Kotschick: realized by ACD manifolds")?;
            f.set_sw(Tri::Yes, "symplectic with b2+ > 1")?;
            f.set_sw_mod2(Tri::Yes, "symplectic with b2+ > 1")?;
            let rec = InvariantRecord::simply(12 * chi_h - c1sq, c1sq - 8 * chi_h);
            let mut e = PrimitiveEntry::new(rec, f);
            e.labels.push(format!("structure index {j}"));
            e
        }
        other => return Err(Error::UnknownPrimitive(other.to_string())),
    };
    Ok(entry)
}

fn xg(params: &[Param]) -> Result<PrimitiveEntry> {
    let mut nums = Vec::new();
    let mut group = None;
    for p in params {
        match p {
            Param::Int(v) => nums.push(*v),
            Param::Group(g) if group.is_none() => group = Some(g.clone()),
            Param::Group(_) => return Err(Error::InvalidExpr("XG takes one group".to_string())),
        }
    }
    let group = group.unwrap_or(GroupLabel::Trivial);
    if !(2..=3).contains(&nums.len()) {
        return Err(Error::InvalidExpr("XG expects (chi, tau, group[, b1])".to_string()));
    }
    let (chi, tau) = (nums[0], nums[1]);
    let b1 = nums.get(2).copied().unwrap_or(0);
    if b1 < 0 {
        return Err(Error::InvalidExpr("XG b1 must be nonnegative".to_string()));
    }
    if 2 * chi + 3 * tau != 0 {
        return Err(Error::InvalidExpr(format!(
            "XG must have c1^2 = 0, got 2*{chi}+3*({tau}) = {}",
            2 * chi + 3 * tau
        )));
    }
    let mut f = StructureFlags::new();
    f.set_pi1(group, "Gompf: any finitely presented group")?;
    f.set_spin(Tri::Yes, "Gompf: spin symplectic")?;
    f.set_symplectic(Tri::Yes, "Gompf: spin symplectic")?;
    let mut e = PrimitiveEntry::new(InvariantRecord::new(int(chi), int(tau), int(b1)), f);
    e.caps.surfaces.push(SurfaceTag {
        genus: 1,
        complement_simply_connected: false,
        kills: 0,
        label: "symplectic torus in XG".to_string(),
    });
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sd_entry() {
        let e = standard().lookup("Sd", &[Param::Int(2)]).unwrap();
        assert_eq!(e.record, InvariantRecord::simply(2, 0));
        assert_eq!(e.flags.pi1, GroupLabel::Cyclic(2));
        assert_eq!(e.record.b2(), int(0));
    }

    #[test]
    fn sd_is_spin() {
        let e = standard().lookup("Sd", &[Param::Int(3)]).unwrap();
        assert_eq!(e.flags.spin, Tri::Yes);
        let e2 = standard().lookup("Sd", &[Param::Int(2)]).unwrap();
        assert_eq!(e2.flags.spin, Tri::Yes);
    }

    #[test]
    fn xk_one() {
        let e = standard().lookup("Xk", &[Param::Int(1)]).unwrap();
        assert_eq!(e.record, InvariantRecord::simply(100, -64));
    }

    #[test]
    fn rohlin_rejects_bad_registration() {
        let mut reg = Registry::new();
        let mut f = StructureFlags::new();
        f.set_spin(Tri::Yes, "claimed").unwrap();
        let err = reg.register_primitive("Bad", InvariantRecord::simply(46, -30), f).unwrap_err();
        assert!(matches!(err, Error::InconsistentFlags(_)));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let mut reg = Registry::new();
        let rec = InvariantRecord::simply(46, -30);
        reg.register_primitive("N8", rec.clone(), StructureFlags::new()).unwrap();
        assert_eq!(
            reg.register_primitive("N8", rec.clone(), StructureFlags::new()),
            Err(Error::DuplicateName("N8".to_string()))
        );
        assert!(matches!(
            reg.register_primitive("K3", rec, StructureFlags::new()),
            Err(Error::DuplicateName(_))
        ));
    }

    #[test]
    fn xg_requires_vanishing_c1sq() {
        let bad = [Param::Int(24), Param::Int(-8), Param::Group(GroupLabel::Trivial)];
        assert!(standard().lookup("XG", &bad).is_err());
        let good = [Param::Int(24), Param::Int(-16), Param::Group(GroupLabel::Cyclic(5))];
        assert_eq!(standard().lookup("XG", &good).unwrap().flags.pi1, GroupLabel::Cyclic(5));
    }
}
