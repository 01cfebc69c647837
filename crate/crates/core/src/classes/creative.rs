//! Creative sets, m-completeness and w.e.u. sets.

use super::{after, ce_smn1, compose, ClassError, SetHandle, Verdict, Witness, WitnessKind};
use crate::coding::Nat;
use crate::ips::{
    arg, ce_comp, ce_const, ce_pair, comp, encode, identity, lit, lit_code, mu, proj, strong_fp, tag, Ast,
};
use crate::re_sets::{finite_windex, post_combiner_program, w_mem};

pub fn identity_index() -> Nat {
    encode(&identity())
}

/// `K` is creative via the identity: if `W_e ⊆ complement(K)` then `e ∉ K ∪ W_e`.
pub fn k_creative_witness() -> Witness {
    Witness::new(WitnessKind::Creative, identity_index())
}

/// The identity m-reduction of `K` to itself.
pub fn identity_m_reduction() -> Witness {
    Witness::new(WitnessKind::MReduction, identity_index())
}

/// `B_n` with `B_0 = {}` and `B_{k+1} = B_k ∪ {f(w(B_k))}`.
pub fn creative_complement_enum(w: &Witness, n: usize, fuel: u64) -> Result<Vec<Nat>, ClassError> {
    let mut b: Vec<Nat> = Vec::new();
    while b.len() < n {
        let y = w.apply(&finite_windex(&b), fuel).ok_or(ClassError::OutOfFuel)?;
        if !b.contains(&y) {
            b.push(y);
        } else {
            return Err(ClassError::BadArguments(format!("witness repeated {y}")));
        }
    }
    Ok(b)
}

/// Checks the creative clause for `e`, assuming `W_e ⊆ complement(A)`:
/// `f(e)` must stay out of `A_s` and out of `W_{e,s}`.
pub fn check_creative(w: &Witness, e: &Nat, a: &SetHandle, s: u64, fuel: u64) -> Verdict {
    let Some(y) = w.apply(e, fuel) else {
        return Verdict::Inconclusive;
    };
    if a.contains(&y, s) || w_mem(e, &y, s) {
        Verdict::Fail
    } else {
        Verdict::Pass
    }
}

/// From `e ∈ K ⇔ f(e) ∈ A`: `A` is creative via `f ∘ h` where
/// `phi_{h(e)}(z) = phi_e(f(z))`.
pub fn myhill_forward(m: &Witness) -> Witness {
    let h = ce_comp(
        lit_code(&Ast::Univ),
        vec![ce_const(arg(0)), lit(encode(&crate::ips::call(&m.body, vec![proj(1, 1)])))],
    );
    Witness::new(WitnessKind::Creative, after(&m.body, &h))
}

/// `(p, z, x) ↦ 0` when `phi_z(z)` converges and `x = phi_f(p)`, diverging otherwise.
fn backward_body(f: &Nat) -> Nat {
    let halts = comp(Ast::Univ, vec![proj(3, 2), proj(3, 2)]);
    let target = comp(Ast::Univ, vec![Ast::Const(f.clone()), proj(4, 2)]);
    let guard = mu(comp(Ast::Eq, vec![proj(4, 4), target]));
    encode(&comp(proj(2, 2), vec![halts, guard]))
}

/// From a creative witness `f` for `A`: the m-reduction `f ∘ g` of `K` to `A`,
/// with `W_{g(z)} = {f(g(z))}` for `z ∈ K` and empty otherwise (strong fixed point).
pub fn myhill_backward(c: &Witness) -> Witness {
    let h = backward_body(&c.body);
    let t = encode(&ce_comp(lit(h), vec![ce_const(arg(0)), ce_const(arg(1)), lit_code(&proj(1, 1))]).program(2));
    let g = strong_fp(&t, 1);
    Witness::new(WitnessKind::MReduction, compose(&c.body, &g))
}

/// From an m-reduction `f` of `K` to `A`: `A` is w.e.u. via `f ∘ h` where
/// `phi_{h(e)}(x) = 0` if `phi_e(f(x)) = 0` and diverges otherwise.
pub fn mcomplete_to_weu(m: &Witness) -> Witness {
    let inner_tail = encode(&comp(Ast::Univ, vec![Ast::Const(m.body.clone()), proj(2, 2)]));
    let g = ce_comp(lit_code(&Ast::Univ), vec![ce_const(arg(0)), lit(inner_tail)]);
    let h = ce_pair(lit(Nat::from(tag::MU)), g);
    Witness::new(WitnessKind::Weu, after(&m.body, &h))
}

/// Code of `p(alpha, e)`: 0 on `W_e`, 1 on `W_alpha`.
pub(crate) fn veldman_g(alpha: &Nat) -> crate::ips::CodeExpr {
    ce_smn1(&post_combiner_program(), vec![lit(alpha.clone()), arg(0)])
}

/// From a w.e.u. witness `f` for `A = W_alpha`: creative via `f ∘ g`,
/// where `g(e)` is the Post combiner of `A` and `W_e`.
pub fn weu_to_creative(w: &Witness, a: &SetHandle) -> Witness {
    let alpha = a.windex.clone().expect("set handle without an r.e. index");
    Witness::new(WitnessKind::Creative, after(&w.body, &veldman_g(&alpha)))
}

/// Checks the w.e.u. clause at `e`: if `phi_e(f(e))` converges, it differs from `A(f(e))`.
pub fn check_weu(w: &Witness, e: &Nat, a: &SetHandle, s: u64, fuel: u64) -> Verdict {
    let Some(y) = w.apply(e, fuel) else {
        return Verdict::Inconclusive;
    };
    match crate::ips::eval(e, &[y.clone()], None, fuel).value() {
        None => Verdict::Inconclusive,
        Some(v) => {
            let bit = a.contains(&y, s) as u64;
            if *v == Nat::from(bit) {
                Verdict::Fail
            } else {
                Verdict::Pass
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::FinSet;
    use crate::ips::divergent;
    use crate::re_sets::{corpus_entry, finset_to_windex, k_mem};

    fn non_k_indices() -> Vec<Nat> {
        let div = encode(&divergent());
        vec![div.clone(), finite_windex(&[div]), finset_to_windex(&FinSet::new())]
    }

    #[test]
    fn k_witness_contract() {
        let k = SetHandle::k();
        let w = k_creative_witness();
        for e in non_k_indices() {
            assert_eq!(check_creative(&w, &e, &k, 100_000, 1000), Verdict::Pass);
        }
    }

    #[test]
    fn complement_enumeration() {
        let w = k_creative_witness();
        assert!(creative_complement_enum(&w, 0, 1000).unwrap().is_empty());
        let b = creative_complement_enum(&w, 5, 1000).unwrap();
        assert_eq!(b.len(), 5);
        for x in &b {
            assert!(!k_mem(x, 20_000));
        }
        let b3 = creative_complement_enum(&w, 3, 1000).unwrap();
        assert_eq!(&b[..3], &b3[..]);
    }

    #[test]
    fn forward_from_identity() {
        let k = SetHandle::k();
        let w = myhill_forward(&identity_m_reduction());
        for e in non_k_indices() {
            assert_eq!(check_creative(&w, &e, &k, 20_000, 10_000), Verdict::Pass);
        }
    }

    #[test]
    fn backward_reduces_k() {
        let r = myhill_backward(&k_creative_witness());
        let z_in = corpus_entry("zero").index;
        let y = r.apply(&z_in, 1_000_000).unwrap();
        assert!(k_mem(&y, 1_000_000));
        for z in [corpus_entry("divergent").index, corpus_entry("table_1_5").index] {
            let y = r.apply(&z, 1_000_000).unwrap();
            assert!(!k_mem(&y, 100_000));
        }
    }

    #[test]
    fn weu_from_identity_reduction() {
        let k = SetHandle::k();
        let w = mcomplete_to_weu(&identity_m_reduction());
        let const1 = encode(&crate::ips::cnst(1u64));
        for e in [corpus_entry("zero").index, const1, corpus_entry("identity").index] {
            assert_eq!(check_weu(&w, &e, &k, 100_000, 100_000), Verdict::Pass, "{e}");
        }
    }

    #[test]
    fn veldman_arrow() {
        let k = SetHandle::k();
        let weu = mcomplete_to_weu(&identity_m_reduction());
        let c = weu_to_creative(&weu, &k);
        for e in non_k_indices() {
            assert_eq!(check_creative(&c, &e, &k, 5_000, 100_000), Verdict::Pass);
        }
    }
}
