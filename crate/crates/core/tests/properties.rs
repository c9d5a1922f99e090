use std::sync::Arc;

use proptest::prelude::*;

use oalg::amalgam::{enumerate_homs, pushout_leq, xleaf, Budget, LeqOutcome, Side};
use oalg::closure::{gen_compatible_quasiorder, gen_order_congruence};
use oalg::oalg::{
    directed_kernel, is_compatible_quasiorder, is_order_congruence, kernel, leq_theta, nonregular_quotient, regular_quotient, Homomorphism,
};
use oalg::otalg::{term_leq, VarPoset};
use oalg::random::{random_algebra, rng, sig1, sig_binary, special_corpus};
use oalg::scheme::{covering, Verdict};
use oalg::signature::Signature;
use oalg::term::{substitute, Leaf, Term, Tok, VarId};
use rand::Rng;

fn leaf() -> impl Strategy<Value = Term<VarId>> {
    let sig = sig1();
    let (c, d) = (sig.lookup("c").unwrap(), sig.lookup("d").unwrap());
    prop_oneof![Just(Term::var(VarId(0))), Just(Term::var(VarId(1))), Just(Term::constant(c)), Just(Term::constant(d))]
}

/// Terms over SIG1 with variables `x1 <= x2`.
fn term() -> impl Strategy<Value = Term<VarId>> {
    let sig = sig1();
    let (f, g) = (sig.lookup("f").unwrap(), sig.lookup("g").unwrap());
    leaf().prop_recursive(3, 24, 3, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| Term::node(f, &[a, b])),
            (inner.clone(), inner.clone(), inner).prop_map(move |(a, b, c)| Term::node(g, &[a, b, c])),
        ]
    })
}

/// `t` with some leaves raised along `x1 <= x2` and `c <= d`.
fn raise(t: &Term<VarId>, flags: &[bool]) -> Term<VarId> {
    let sig = sig1();
    let (c, d) = (sig.lookup("c").unwrap(), sig.lookup("d").unwrap());
    let mut k = 0;
    t.map_leaves(|l| {
        k += 1;
        let up = flags.get(k - 1).copied().unwrap_or(false);
        match l {
            Leaf::Var(VarId(0)) if up => Term::var(VarId(1)),
            Leaf::Const(x) if up && x == c => Term::constant(d),
            Leaf::Var(v) => Term::var(v),
            Leaf::Const(x) => Term::constant(x),
        }
    })
}

fn xp() -> VarPoset {
    VarPoset::chain(2)
}

fn signature_text() -> impl Strategy<Value = String> {
    (prop::collection::vec(1usize..4, 0..4), 0usize..4, prop::collection::vec(any::<bool>(), 6)).prop_map(|(ops, nc, flags)| {
        let mut s = String::new();
        for (i, a) in ops.iter().enumerate() {
            s.push_str(&format!("op f{i} {a}\n"));
        }
        for i in 0..nc {
            s.push_str(&format!("const c{i}\n"));
        }
        let mut k = 0;
        for i in 0..nc {
            for j in i + 1..nc {
                if flags[k] {
                    s.push_str(&format!("order c{i} <= c{j}\n"));
                }
                k += 1;
            }
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn signature_round_trip(text in signature_text()) {
        let s = Signature::parse(&text).unwrap();
        let back = Signature::parse(&s.print()).unwrap();
        prop_assert_eq!(&back, &s);
        let consts: Vec<_> = s.constants().collect();
        for &a in &consts {
            prop_assert!(s.const_leq(a, a));
            for &b in &consts {
                prop_assert!(a == b || !(s.const_leq(a, b) && s.const_leq(b, a)));
                for &c in &consts {
                    prop_assert!(!(s.const_leq(a, b) && s.const_leq(b, c)) || s.const_leq(a, c));
                }
            }
        }
    }

    #[test]
    fn regularize_then_substitute(t in term()) {
        let (tbar, leaves) = t.regularize();
        let assign: Vec<Term<VarId>> = leaves.0.iter().map(|&l| Term::leaf(l)).collect();
        prop_assert_eq!(substitute(&tbar, &assign).unwrap(), t);
    }

    #[test]
    fn skeleton_is_the_regular_term(s in term(), t in term()) {
        prop_assert_eq!(s.skeleton() == t.skeleton(), s.regularize().0 == t.regularize().0);
    }

    #[test]
    fn leaf_counts_add_up(a in term(), b in term(), c in term()) {
        let g = sig1().lookup("g").unwrap();
        let n = Term::node(g, &[a.clone(), b.clone(), c.clone()]);
        prop_assert_eq!(n.leaf_count(), a.leaf_count() + b.leaf_count() + c.leaf_count());
    }

    #[test]
    fn term_order_is_compatible(a in term(), b in term(), fa in prop::collection::vec(any::<bool>(), 30), fb in prop::collection::vec(any::<bool>(), 30)) {
        let sig = sig1();
        let (ra, rb) = (raise(&a, &fa), raise(&b, &fb));
        prop_assert!(term_leq(&sig, &xp(), &a, &ra));
        prop_assert!(term_leq(&sig, &xp(), &b, &rb));
        let f = sig.lookup("f").unwrap();
        prop_assert!(term_leq(&sig, &xp(), &Term::node(f, &[a.clone(), b.clone()]), &Term::node(f, &[ra.clone(), rb.clone()])));
        if a != ra {
            prop_assert!(!term_leq(&sig, &xp(), &ra, &a));
        }
    }

    #[test]
    fn subterms_never_overlap_partially(t in term(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let x = t.map_vars(|v| oalg::amalgam::XLabel::new(Side::One, v.0 as usize));
        let (p, q) = (i.index(x.len()), j.index(x.len()));
        prop_assert_ne!(covering(&x, p, q).verdict, Verdict::PartialOverlap);
    }

    #[test]
    fn kernels_of_homomorphisms(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=3) {
        let sig = sig1();
        let mut r = rng(seed);
        let a = Arc::new(random_algebra(&mut r, &sig, n, "A"));
        let d = Arc::new(random_algebra(&mut r, &sig, m, "D"));
        for map in enumerate_homs(&a, &d).into_iter().take(10) {
            let h = Homomorphism::new(a.clone(), d.clone(), map).unwrap();
            let dk = directed_kernel(&h).unwrap();
            prop_assert!(is_compatible_quasiorder(&a, &dk).is_ok());
            prop_assert_eq!(kernel(&h).unwrap(), dk.intersection(&dk.inverse()));
        }
    }

    #[test]
    fn generated_quasiorders(seed in any::<u64>(), n in 1usize..=5, k in 0usize..=3) {
        let sig = sig1();
        let mut r = rng(seed);
        let a = Arc::new(random_algebra(&mut r, &sig, n, "A"));
        let h: Vec<_> = (0..k).map(|_| (r.gen_range(0..n), r.gen_range(0..n))).collect();
        let sigma = gen_compatible_quasiorder(&a, &h).rel;
        let theta = sigma.intersection(&sigma.inverse());
        prop_assert_eq!(is_order_congruence(&a, &theta), Ok(true));

        // Least: dropping any pair outside the generators breaks a closure rule.
        for (x, y) in sigma.pairs() {
            if a.leq(x, y) || h.contains(&(x, y)) {
                continue;
            }
            let mut smaller = oalg::relation::BitRel::empty(n);
            for (u, v) in sigma.pairs().filter(|&p| p != (x, y)) {
                smaller.insert(u, v);
            }
            prop_assert!(is_compatible_quasiorder(&a, &smaller).is_err());
        }

        let rq = regular_quotient(&a, &theta).unwrap();
        let nq = nonregular_quotient(&a, &sigma).unwrap();
        prop_assert_eq!(&rq.classes, &nq.classes);
        prop_assert!(rq.algebra.order().is_subset(nq.algebra.order()));
        prop_assert!(rq.algebra.is_valid());
        prop_assert!(nq.algebra.is_valid());

        let oc = gen_order_congruence(&a, &h);
        let lt = leq_theta(&a, &oc.theta).unwrap();
        prop_assert!(h.iter().all(|&(x, y)| lt.contains(x, y)));
    }

    #[test]
    fn generated_congruence_is_least(seed in any::<u64>(), n in 1usize..=4, k in 0usize..=3, j in 0usize..=3) {
        let sig = sig1();
        let mut r = rng(seed);
        let a = Arc::new(random_algebra(&mut r, &sig, n, "A"));
        let h0: Vec<_> = (0..k).map(|_| (r.gen_range(0..n), r.gen_range(0..n))).collect();
        let theta = gen_order_congruence(&a, &h0).theta;
        let lt = leq_theta(&a, &theta).unwrap();
        let pairs: Vec<_> = lt.pairs().collect();
        let h: Vec<_> = (0..j).map(|_| pairs[r.gen_range(0..pairs.len())]).collect();
        let sigma = gen_compatible_quasiorder(&a, &h).rel;
        prop_assert!(sigma.intersection(&sigma.inverse()).is_subset(&theta));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn special_amalgams_are_weakly_embeddable(seed in any::<u64>()) {
        let sp = &special_corpus(seed, 1, &sig_binary(), 4)[0];
        let budget = Budget::new(4, 2);
        for x in 0..sp.base.size() {
            for y in 0..sp.base.size() {
                let (s, t) = (xleaf(Side::One, x), xleaf(Side::One, y));
                let out = pushout_leq(&sp.am, &s, &t, &budget).unwrap();
                if sp.base.leq(x, y) {
                    let sch = out.proven().expect("trivial witness");
                    prop_assert_eq!(sch.rel_len(), 0);
                } else {
                    prop_assert!(matches!(out, LeqOutcome::Unknown(_)));
                    prop_assert!(!sp.base.leq(sp.nu0_bar(&s), sp.nu0_bar(&t)));
                }
            }
        }
    }
}

#[test]
fn word_map_is_injective() {
    // Unique readability: constant-free regular terms with leaf labels give distinct words.
    let sig = sig1();
    let c = sig.lookup("c").unwrap();
    let labels = [Leaf::Var(VarId(0)), Leaf::Const(c)];
    let mut seen = std::collections::HashMap::new();
    for shape in oalg::term::regular_shapes_upto(&sig, 4) {
        let k = shape.leaf_count();
        if k > 9 {
            continue;
        }
        for mask in 0u32..1 << k {
            let lab: Vec<Leaf<VarId>> = (0..k).map(|i| labels[(mask >> i & 1) as usize]).collect();
            let assign: Vec<Term<VarId>> = lab.iter().map(|&l| Term::leaf(l)).collect();
            let word: Vec<Tok<VarId>> = substitute(&shape, &assign).unwrap().toks().to_vec();
            let prev = seen.insert(word, (shape.clone(), lab.clone()));
            assert!(prev.is_none(), "two readings of one word");
        }
    }
    assert!(seen.len() > 10_000);
}
