//! Library results against closed forms recomputed here from the classical cover formulas.
//!
//! The oracles below use the Euler and signature route (Riemann-Hurwitz for the Euler number,
//! Hirzebruch's signature formula for branched covers) with machine integers, while the library
//! uses Chern classes and big integers.

use fourfold_core::arith::{int, rat};
use fourfold_core::covers::{bicyclic_invariants, cyclic_cover_of_base, quotient_invariants};
use fourfold_core::dsl::parse;
use fourfold_core::expr::{Action, Base, DivisorClass, ManifoldExpr};
use fourfold_core::geography::{zi_expr, zi_printed_odd};
use fourfold_core::normal_form::{mm_rule, normalize, NormalForm};
use fourfold_core::registry;
use fourfold_core::reproduce::xk_by_construction;
use fourfold_core::surgery::universal_cover;
use fourfold_core::{evaluate, InvariantRecord};

/// Euler number of a smooth curve of bidegree `(p, q)` on CP1xCP1.
fn curve_euler_bidegree(p: i128, q: i128) -> i128 {
    2 * (p + q) - 2 * p * q
}

/// `(chi, tau)` of the `(d, p)` bi-cyclic cover branched along `(da, db)` then `(pm, pn)`.
fn bicyclic_oracle(d: i128, p: i128, a: i128, b: i128, m: i128, n: i128) -> (i128, i128) {
    let chi_c = curve_euler_bidegree(d * a, d * b);
    let chi_x = 4 * d - (d - 1) * chi_c;
    let c_sq = 2 * (d * a) * (d * b);
    assert_eq!(((d * d - 1) * c_sq) % (3 * d), 0);
    let sig_x = -(d * d - 1) * c_sq / (3 * d);
    let chi_d = curve_euler_bidegree(p * m, p * n);
    let c_dot_d = (d * a) * (p * n) + (d * b) * (p * m);
    let chi_d_up = d * chi_d - (d - 1) * c_dot_d;
    let d_up_sq = d * 2 * (p * m) * (p * n);
    assert_eq!(((p * p - 1) * d_up_sq) % (3 * p), 0);
    let chi_n = p * chi_x - (p - 1) * chi_d_up;
    let sig_n = p * sig_x - (p * p - 1) * d_up_sq / (3 * p);
    (chi_n, sig_n)
}

/// `(chi, tau)` of the d-cyclic cover of CP2 branched along a smooth curve of degree `k`.
fn cp2_cover_oracle(d: i128, k: i128) -> (i128, i128) {
    let chi_c = 3 * k - k * k;
    let chi = 3 * d - (d - 1) * chi_c;
    let tau = d - (d * d - 1) * k * k / (3 * d);
    (chi, tau)
}

fn rec(chi: i128, tau: i128) -> InvariantRecord {
    InvariantRecord::simply(chi as i64, tau as i64)
}

#[test]
fn bicyclic_matches_signature_oracle_on_full_grid() {
    let mut cases = 0;
    for d in 1..=4u64 {
        for p in 1..=4u64 {
            for a in 1..=3u64 {
                for b in 1..=3u64 {
                    for m in 1..=3u64 {
                        for n in 1..=3u64 {
                            let got = bicyclic_invariants(d, p, a, b, m, n).unwrap();
                            let (chi, tau) =
                                bicyclic_oracle(d as i128, p as i128, a as i128, b as i128, m as i128, n as i128);
                            assert_eq!(got, rec(chi, tau), "({d},{p};{a},{b},{m},{n})");
                            cases += 1;
                        }
                    }
                }
            }
        }
    }
    assert_eq!(cases, 1296);
}

#[test]
fn bicyclic_is_symmetric_under_swapping_branch_curves() {
    for d in 1..=4u64 {
        for p in 1..=4u64 {
            for (a, b, m, n) in [(1, 2, 3, 1), (2, 2, 1, 3), (3, 1, 2, 2)] {
                assert_eq!(
                    bicyclic_invariants(d, p, a, b, m, n).unwrap(),
                    bicyclic_invariants(p, d, m, n, a, b).unwrap()
                );
            }
        }
    }
}

#[test]
fn cyclic_covers_of_cp2_match_oracle() {
    for d in 2..=5u64 {
        for l in 1..=4u64 {
            let k = d * l;
            let got = cyclic_cover_of_base(Base::CP2, d, &DivisorClass::cp2(k)).unwrap();
            let (chi, tau) = cp2_cover_oracle(d as i128, k as i128);
            assert_eq!(got, rec(chi, tau), "d={d} k={k}");
        }
    }
}

#[test]
fn octic_double_cover_values() {
    let e = parse("cover(CP2, d=2, branch=8)").unwrap();
    let ev = evaluate(registry::standard(), &e).unwrap();
    let (chi, tau) = cp2_cover_oracle(2, 8);
    assert_eq!(ev.record, rec(chi, tau));
    assert_eq!(ev.record.c2(), int(46));
    assert_eq!(ev.record.c1sq(), int(2));
    assert_eq!(ev.record.tau, int(-30));
    assert_eq!(ev.record.b2plus(), rat(7, 1));
    assert_eq!(ev.record.b2minus(), rat(37, 1));
}

#[test]
fn connected_sum_matches_euler_formula() {
    let reg = registry::standard();
    let parts = [("K3", 24, -16, 2), ("CP2", 3, 1, 3), ("S2xS2", 4, 0, 1), ("CP2b", 3, -1, 4)];
    let text: Vec<String> = parts.iter().map(|(n, _, _, m)| format!("{m}*{n}")).collect();
    let e = parse(&text.join(" # ")).unwrap();
    let count: i128 = parts.iter().map(|p| p.3 as i128).sum();
    let chi: i128 = parts.iter().map(|p| p.1 as i128 * p.3 as i128).sum::<i128>() - 2 * (count - 1);
    let tau: i128 = parts.iter().map(|p| p.2 as i128 * p.3 as i128).sum();
    assert_eq!(evaluate(reg, &e).unwrap().record, rec(chi, tau));
}

#[test]
fn xk_fiber_sum_construction_matches_declared_invariants() {
    let reg = registry::standard();
    for k in 1..=10i128 {
        // chi(F_{k+1} x F_2) is the product of the curve Euler numbers.
        let chi_prod = (2 - 2 * (k + 1)) * (2 - 2 * 2);
        // Each torus fiber sum with E(2) adds chi(E(2)) = 24 and tau(E(2)) = -16.
        let chi = chi_prod + (2 * k + 2) * 24;
        let tau = (2 * k + 2) * -16;
        let declared = evaluate(reg, &ManifoldExpr::xk(k as u64)).unwrap().record;
        let built = evaluate(reg, &xk_by_construction(k as u64)).unwrap().record;
        assert_eq!(declared, rec(chi, tau));
        assert_eq!(built, declared);
        assert_eq!(declared.chi, int(52 * k as i64 + 48));
        assert_eq!(declared.tau, int(-32 * (k as i64 + 1)));
    }
}

#[test]
fn zi_odd_quotient_against_oracle() {
    let reg = registry::standard();
    for d in [3i128, 5, 7] {
        for i in [1i128, 3, 5] {
            let (chi, tau) = bicyclic_oracle(d, 2, d, d, d * i, d * i);
            assert_eq!(chi % d, 0);
            assert_eq!(tau % d, 0);
            let (chi_q, tau_q) = (chi / d, tau / d);
            let got = evaluate(reg, &zi_expr(d as u64, i as u64).unwrap()).unwrap().record;
            assert_eq!(got, rec(chi_q, tau_q), "d={d} i={i}");
            let c1sq = 2 * chi_q + 3 * tau_q;
            let closed = 4 * (d * (d - 1) + d * i - 2).pow(2);
            assert_eq!(c1sq, closed);
            let (printed_c1sq, _) = zi_printed_odd(d as u64, i as u64);
            assert_eq!(printed_c1sq, int(closed as i64));
        }
    }
}

#[test]
fn zi_three_one_has_chi_h_41() {
    // (c1^2 + c2) / 12 from the oracle record of the quotient of bicyclic(3,2;3,3,3,3) by Z/3.
    let (chi, tau) = bicyclic_oracle(3, 2, 3, 3, 3, 3);
    let (chi_q, tau_q) = (chi / 3, tau / 3);
    let c1sq = 2 * chi_q + 3 * tau_q;
    assert_eq!(c1sq, 196);
    assert_eq!((c1sq + chi_q) % 12, 0);
    assert_eq!((c1sq + chi_q) / 12, 41);
    let inner = bicyclic_invariants(3, 2, 3, 3, 3, 3).unwrap();
    assert_eq!(quotient_invariants(&inner, 3).unwrap().chi_h(), rat(41, 1));
}

#[test]
fn explicit_action_covers_normalize() {
    let reg = registry::standard();
    for (d, a, b) in [(2u64, 15u64, 77u64), (3, 23, 116)] {
        let m = parse(&format!("cover(CP2, d=2, branch=8) # CP2b # Sd({d})")).unwrap();
        let up = universal_cover(reg, &m).unwrap();
        let r = evaluate(reg, &up).unwrap().record;
        // The cover is d copies of chi = 46 + 3 + 2 - 4 glued back along d - 1 spheres.
        let chi_m = 46 + 3 + 2 - 4;
        let tau_m = -30 - 1;
        assert_eq!(r, rec(d as i128 * chi_m, d as i128 * tau_m));
        let b2 = d as i128 * chi_m - 2;
        let plus = (b2 + d as i128 * tau_m) / 2;
        assert_eq!((plus as u64, (b2 - plus) as u64), (a, b));
        assert_eq!(normalize(reg, &up).unwrap().form, NormalForm::non_spin(a, b));
    }
}

#[test]
fn quotient_requires_integral_chi_h() {
    let inner = InvariantRecord::simply(4, 0);
    assert!(quotient_invariants(&inner, 2).is_err());
    let bic = bicyclic_invariants(2, 2, 1, 1, 1, 1).unwrap();
    assert!(quotient_invariants(&bic, 2).is_ok());
}

#[test]
fn mandelbaum_moishezon_schema() {
    for g in 1..=3u64 {
        for n in 1..=4u64 {
            let s = mm_rule(g, n).unwrap();
            let (chi1, chi2) = (int(24), int(46));
            let (tau1, tau2) = (int(-16), int(-30));
            let chi_v = s.chi_v(&chi1, &chi2);
            let tau_v = s.tau_v(&tau1, &tau2);
            assert_eq!(chi_v, int(24 + 46 + 4 * g as i64 + n as i64 - 4));
            assert_eq!(tau_v, int(-16 - 30 - n as i64));
            let (lhs, rhs) = s.euler_sides(&chi_v, &chi1, &chi2);
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn weighted_even_family_values() {
    let reg = registry::standard();
    // d = 2 uses (6,3,i,i) under the weighted action.
    let (chi, tau) = bicyclic_oracle(2, 3, 6, 3, 1, 1);
    let got = evaluate(reg, &zi_expr(2, 1).unwrap()).unwrap().record;
    assert_eq!(got, rec(chi / 2, tau / 2));
    assert_eq!(got.c1sq(), int(108));
    assert_eq!(got.c2(), int(240));
    let direct = ManifoldExpr::quotient(ManifoldExpr::bicyclic(2, 3, 6, 3, 1, 1), 2, Action::Weighted);
    assert_eq!(evaluate(reg, &direct).unwrap().record, got);
}
