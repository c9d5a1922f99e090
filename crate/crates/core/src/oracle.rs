//! Reference computations used by the verification suites. They follow the scheme
//! characterizations directly and share no code with the fixpoint algorithms.

use std::collections::HashSet;

use crate::closure::step_relation;
use crate::oalg::{Elem, OrderedAlgebra};
use crate::otalg::{labels, VarPoset};
use crate::relation::BitRel;
use crate::signature::Signature;
use crate::term::{Leaf, Term, VarId};

/// Terms reachable from `s` by schemes of at most `max_len` steps `p(u) → p(v)` with
/// `u ≤ v` in `≤_X ∪̇ ≤_{F₀}`, where `p` replaces one leaf.
pub fn sigma_leq_upset(sig: &Signature, xp: &VarPoset, s: &Term<VarId>, max_len: usize) -> Vec<Term<VarId>> {
    let labs = labels(sig, xp);
    let gen: Vec<(Leaf<VarId>, Leaf<VarId>)> = labs
        .iter()
        .flat_map(|&u| labs.iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| {
            u != v
                && match (u, v) {
                    (Leaf::Var(a), Leaf::Var(b)) => xp.leq(a, b),
                    (Leaf::Const(c), Leaf::Const(d)) => sig.const_leq(c, d),
                    _ => false,
                }
        })
        .collect();
    let mut seen: HashSet<Term<VarId>> = HashSet::from([s.clone()]);
    let mut frontier = vec![s.clone()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            let leaves = w.leaves();
            for j in 1..=leaves.len() {
                let u = leaves.0[j - 1];
                for &(a, b) in &gen {
                    if a == u {
                        let w2 = w.leaf_subst(j, &Term::leaf(b)).expect("leaf in range");
                        if seen.insert(w2.clone()) {
                            next.push(w2);
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let mut out: Vec<Term<VarId>> = seen.into_iter().collect();
    out.sort();
    out
}

/// `c Σ_H c'` iff `c ≤ c'` or a scheme `c ≤ p1(a1) → p1(a1') ≤ .. ≤ c'` exists, with
/// translations of at most `max_ops` operations and at most `max_len` steps.
pub fn closure_by_schemes(a: &OrderedAlgebra, h: &[(Elem, Elem)], max_ops: usize, max_len: usize) -> BitRel {
    let carrier: Vec<Elem> = (0..a.size()).collect();
    let step = step_relation(a, &carrier, h, max_ops);
    let le = a.order().clone();
    let hop = step.compose(&le);
    let mut r = le.clone();
    for _ in 0..max_len {
        let next = r.union(&r.compose(&hop));
        if next == r {
            break;
        }
        r = next;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oalg::fixtures::*;
    use crate::term::parse_term;

    #[test]
    fn upset_of_small_term() {
        let sig = sig1();
        let xp = VarPoset::chain(2);
        let s = parse_term(&sig, &xp, "f x1 c").unwrap();
        let up = sigma_leq_upset(&sig, &xp, &s, 2);
        assert_eq!(up.len(), 4);
        let t = parse_term(&sig, &xp, "f x2 d").unwrap();
        assert!(up.contains(&t));
        assert_eq!(sigma_leq_upset(&sig, &xp, &s, 1).len(), 3);
    }

    #[test]
    fn scheme_closure_on_ch3() {
        let a = ch3();
        assert_eq!(closure_by_schemes(&a, &[(2, 0)], 1, 3), BitRel::full(3));
        assert_eq!(&closure_by_schemes(&a, &[], 3, 6), a.order());
    }
}
