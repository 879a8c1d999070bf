//! Seiberg-Witten flag rules R1-R4.
//!
//! R1: Kahler with `b2+ > 1` has a nontrivial invariant (Witten).
//! R2: symplectic with `b2+ > 1` has a nontrivial invariant (Taubes).
//! R3: one nontrivial summand plus summands with `b2+ = 0` keeps a basic class.
//! R4: two or more summands with `b2+ > 0` kill the invariant.
//! R3 needs every other summand to have `b2+ = 0`, so R3 and R4 never both apply.

use num_traits::{One, Zero};

use crate::error::Result;
use crate::eval::Evaluated;
use crate::flags::{StructureFlags, Tri};
use crate::invariants::InvariantRecord;

pub const R1: &str = "R1: Kahler surfaces with b2+ > 1 have nontrivial Seiberg-Witten invariants (Witten)";
pub const R2: &str = "R2: symplectic manifolds with b2+ > 1 have nontrivial Seiberg-Witten invariants (Taubes)";
pub const R3: &str =
    "R3: a summand with nontrivial invariant plus summands with b2+ = 0 keeps a basic class (LeBrun)";
pub const R4: &str = "R4: the Seiberg-Witten invariant vanishes on sums of two manifolds with b2+ > 0";
const MOD2: &str = "the canonical class has Seiberg-Witten invariant +-1 (Taubes)";
const TAUBES_CONVERSE: &str = "vanishing invariant with b2+ > 1 rules out symplectic forms (Taubes)";

pub fn apply_block_rules(rec: &InvariantRecord, flags: &mut StructureFlags) -> Result<()> {
    if rec.b2plus() <= num_rational::BigRational::one() {
        return Ok(());
    }
    if flags.kahler == Tri::Yes {
        flags.set_sw(Tri::Yes, R1)?;
        flags.set_sw_mod2(Tri::Yes, MOD2)?;
    }
    if flags.symplectic == Tri::Yes {
        flags.set_sw(Tri::Yes, R2)?;
        flags.set_sw_mod2(Tri::Yes, MOD2)?;
    }
    if flags.sw_nontrivial == Tri::No {
        flags.set_symplectic(Tri::No, TAUBES_CONVERSE)?;
        flags.set_kahler(Tri::No, TAUBES_CONVERSE)?;
    }
    Ok(())
}

pub fn apply_sum_rules(parts: &[(Evaluated, u64)], flags: &mut StructureFlags) -> Result<()> {
    let positive: u64 = parts
        .iter()
        .filter(|(e, _)| e.record.b2plus() > num_rational::BigRational::zero())
        .map(|(_, m)| *m)
        .sum();
    if positive >= 2 {
        flags.set_sw(Tri::No, R4)?;
        flags.set_sw_mod2(Tri::No, R4)?;
        return Ok(());
    }
    let yes: Vec<&(Evaluated, u64)> = parts.iter().filter(|(e, _)| e.flags.sw_nontrivial == Tri::Yes).collect();
    if let [(carrier, 1)] = yes.as_slice() {
        let others_definite = parts
            .iter()
            .filter(|(e, _)| !std::ptr::eq(e, carrier))
            .all(|(e, _)| e.record.b2plus().is_zero());
        if others_definite {
            flags.set_sw(Tri::Yes, R3)?;
            if carrier.flags.sw_mod2_nontrivial == Tri::Yes {
                flags.set_sw_mod2(Tri::Yes, R3)?;
            }
        }
    }
    Ok(())
}
