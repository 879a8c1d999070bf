//! Tri-state structure flags with provenance, and the closure rules relating them.

use std::fmt;

use serde_json::{json, Value};

use crate::arith::residue;
use crate::error::{Error, Result};
use crate::expr::GroupLabel;
use crate::invariants::InvariantRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn is_known(self) -> bool {
        self != Tri::Unknown
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
    Unknown,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum W2Type {
    I,
    II,
    III,
    Unknown,
}

impl W2Type {
    pub fn as_str(self) -> &'static str {
        match self {
            W2Type::I => "I",
            W2Type::II => "II",
            W2Type::III => "III",
            W2Type::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for W2Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub flag: String,
    pub value: String,
    pub rule: String,
}

/// Structure annotations; every known entry has at least one provenance line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureFlags {
    pub spin: Tri,
    pub parity: Parity,
    pub w2type: W2Type,
    pub pi1: GroupLabel,
    pub sw_nontrivial: Tri,
    pub sw_mod2_nontrivial: Tri,
    pub symplectic: Tri,
    pub kahler: Tri,
    pub minimal_general_type: Tri,
    pub ample_canonical: Tri,
    pub acd: Tri,
    /// True when `chi_h` is reported for something that is not known to be a complex surface.
    pub chi_h_formal: bool,
    pub provenance: Vec<Provenance>,
}

impl Default for StructureFlags {
    fn default() -> Self {
        StructureFlags {
            spin: Tri::Unknown,
            parity: Parity::Unknown,
            w2type: W2Type::Unknown,
            pi1: GroupLabel::Unknown,
            sw_nontrivial: Tri::Unknown,
            sw_mod2_nontrivial: Tri::Unknown,
            symplectic: Tri::Unknown,
            kahler: Tri::Unknown,
            minimal_general_type: Tri::Unknown,
            ample_canonical: Tri::Unknown,
            acd: Tri::Unknown,
            chi_h_formal: true,
            provenance: Vec::new(),
        }
    }
}

macro_rules! tri_setter {
    ($fn_name:ident, $field:ident, $label:expr) => {
        pub fn $fn_name(&mut self, value: Tri, rule: &str) -> Result<()> {
            if value == Tri::Unknown {
                return Ok(());
            }
            if self.$field == value {
                return Ok(());
            }
            if self.$field != Tri::Unknown {
                return Err(self.conflict($label, self.$field.as_str(), value.as_str(), rule));
            }
            self.$field = value;
            self.note($label, value.as_str(), rule);
            Ok(())
        }
    };
}

impl StructureFlags {
    pub fn new() -> Self {
        Self::default()
    }

    fn note(&mut self, flag: &str, value: &str, rule: &str) {
        self.provenance.push(Provenance {
            flag: flag.to_string(),
            value: value.to_string(),
            rule: rule.to_string(),
        });
    }

    fn conflict(&self, flag: &str, old: &str, new: &str, rule: &str) -> Error {
        let earlier = self
            .provenance
            .iter()
            .rev()
            .find(|p| p.flag == flag)
            .map(|p| p.rule.as_str())
            .unwrap_or("declaration");
        Error::InconsistentFlags(format!(
            "{flag} = {old} (by {earlier}) contradicts {flag} = {new} (by {rule})"
        ))
    }

    tri_setter!(set_spin, spin, "spin");
    tri_setter!(set_sw, sw_nontrivial, "sw_nontrivial");
    tri_setter!(set_sw_mod2, sw_mod2_nontrivial, "sw_mod2_nontrivial");
    tri_setter!(set_symplectic, symplectic, "symplectic");
    tri_setter!(set_kahler, kahler, "kahler");
    tri_setter!(set_minimal_general_type, minimal_general_type, "minimal_general_type");
    tri_setter!(set_ample_canonical, ample_canonical, "ample_canonical");
    tri_setter!(set_acd, acd, "acd");

    pub fn set_parity(&mut self, value: Parity, rule: &str) -> Result<()> {
        if value == Parity::Unknown || self.parity == value {
            return Ok(());
        }
        if self.parity != Parity::Unknown {
            return Err(self.conflict("parity", self.parity.as_str(), value.as_str(), rule));
        }
        self.parity = value;
        self.note("parity", value.as_str(), rule);
        Ok(())
    }

    pub fn set_w2type(&mut self, value: W2Type, rule: &str) -> Result<()> {
        if value == W2Type::Unknown || self.w2type == value {
            return Ok(());
        }
        if self.w2type != W2Type::Unknown {
            return Err(self.conflict("w2type", self.w2type.as_str(), value.as_str(), rule));
        }
        self.w2type = value;
        self.note("w2type", value.as_str(), rule);
        Ok(())
    }

    pub fn set_pi1(&mut self, value: GroupLabel, rule: &str) -> Result<()> {
        let value = value.normalized();
        if value == GroupLabel::Unknown || self.pi1 == value {
            return Ok(());
        }
        if self.pi1 != GroupLabel::Unknown {
            return Err(self.conflict("pi1", &self.pi1.to_string(), &value.to_string(), rule));
        }
        self.note("pi1", &value.to_string(), rule);
        self.pi1 = value;
        Ok(())
    }

    pub fn mark_complex(&mut self) {
        self.chi_h_formal = false;
    }

    /// Applies the structural and arithmetic rules until nothing changes.
    pub fn close(&mut self, rec: &InvariantRecord) -> Result<()> {
        loop {
            let before = self.clone();
            self.close_once(rec)?;
            if before == *self {
                return Ok(());
            }
        }
    }

    fn close_once(&mut self, rec: &InvariantRecord) -> Result<()> {
        let b1_zero = rec.b1 == 0.into();
        if b1_zero && residue(&rec.tau, 16) != 0 {
            if self.spin == Tri::Yes {
                return Err(Error::InconsistentFlags(format!(
                    "declared spin with b1 = 0 but tau = {} is not divisible by 16 (Rohlin)",
                    rec.tau
                )));
            }
            self.set_spin(Tri::No, "Rohlin: b1 = 0 and tau not divisible by 16")?;
        }
        if residue(&rec.tau, 8) != 0 {
            if self.parity == Parity::Even {
                return Err(Error::InconsistentFlags(format!(
                    "even intersection form with tau = {} not divisible by 8",
                    rec.tau
                )));
            }
            self.set_parity(Parity::Odd, "even unimodular forms have tau divisible by 8")?;
        }
        match self.spin {
            Tri::Yes => {
                self.set_parity(Parity::Even, "spin implies an even intersection form")?;
                self.set_w2type(W2Type::II, "w2 = 0 is type II")?;
            }
            Tri::No => {
                if self.w2type == W2Type::II {
                    return Err(Error::InconsistentFlags(
                        "w2type II requires spin".to_string(),
                    ));
                }
                if self.pi1.has_odd_order() {
                    self.set_parity(
                        Parity::Odd,
                        "no 2-torsion in H1: non-spin implies an odd intersection form",
                    )?;
                }
                if self.pi1.is_trivial() {
                    self.set_w2type(W2Type::I, "simply connected and non-spin is type I")?;
                }
            }
            Tri::Unknown => {}
        }
        if self.w2type == W2Type::II {
            self.set_spin(Tri::Yes, "w2type II means w2 = 0")?;
        }
        if matches!(self.w2type, W2Type::I | W2Type::III) {
            self.set_spin(Tri::No, "w2type I or III means w2 is nonzero")?;
        }
        if self.parity == Parity::Even && self.pi1.has_odd_order() {
            self.set_spin(Tri::Yes, "no 2-torsion in H1: even form implies spin")?;
        }
        if self.parity == Parity::Odd {
            self.set_spin(Tri::No, "odd intersection form implies non-spin")?;
        }
        Ok(())
    }

    pub fn rule_for(&self, flag: &str) -> Option<&str> {
        self.provenance.iter().rev().find(|p| p.flag == flag).map(|p| p.rule.as_str())
    }

    pub fn to_json(&self) -> Value {
        let provenance: Vec<Value> = self
            .provenance
            .iter()
            .map(|p| json!({"flag": p.flag, "value": p.value, "rule": p.rule}))
            .collect();
        json!({
            "spin": self.spin.as_str(),
            "parity": self.parity.as_str(),
            "w2type": self.w2type.as_str(),
            "pi1": self.pi1.to_string(),
            "sw_nontrivial": self.sw_nontrivial.as_str(),
            "sw_mod2_nontrivial": self.sw_mod2_nontrivial.as_str(),
            "symplectic": self.symplectic.as_str(),
            "kahler": self.kahler.as_str(),
            "minimal_general_type": self.minimal_general_type.as_str(),
            "ample_canonical": self.ample_canonical.as_str(),
            "acd": self.acd.as_str(),
            "chi_h_formal": self.chi_h_formal,
            "provenance": provenance,
        })
    }
}
