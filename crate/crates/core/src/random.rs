//! Seeded generators for the verification suites and benches.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amalgam::{make_special, xleaf, Amalgam, Side, SpecialAmalgam, XLabel, XTerm};
use crate::closure::Translation;
use crate::oalg::{for_each_tuple, Elem, OrderedAlgebra};
use crate::relation::BitRel;
use crate::scheme::{RelTag, Scheme, Step};
use crate::signature::{Signature, Sym};
use crate::term::{Leaf, Term, Tok};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `f` binary, `g` ternary, constants `c <= d`.
pub fn sig1() -> Arc<Signature> {
    Arc::new(Signature::parse("op f 2; op g 3; const c; const d; order c <= d").expect("valid signature"))
}

/// `f` binary, constants `c <= d`.
pub fn sig_binary() -> Arc<Signature> {
    Arc::new(Signature::parse("op f 2; const c; const d; order c <= d").expect("valid signature"))
}

/// The chain `e0 < .. < e(n-1)` with every operation the join, `c` the bottom and every
/// other constant the top.
pub fn chain(sig: &Arc<Signature>, n: usize, name: &str) -> OrderedAlgebra {
    let order = BitRel::from_pairs(n, (0..n).flat_map(|a| (a..n).map(move |b| (a, b))));
    OrderedAlgebra::from_fn(
        sig.clone(),
        name,
        (0..n).map(|i| format!("e{i}")).collect(),
        &order,
        |_, args| args.iter().copied().max().unwrap_or(0),
        |c| if sig.name(c) == "c" { 0 } else { n - 1 },
    )
    .expect("chain is well formed")
}

pub fn ch3() -> OrderedAlgebra {
    chain(&sig1(), 3, "CH3")
}

/// A random partial order on `0..n`; each pair of a random linear order is a cover
/// candidate with probability `density`.
pub fn random_poset(rng: &mut Rand, n: usize, density: f64) -> BitRel {
    let mut perm: Vec<Elem> = (0..n).collect();
    perm.shuffle(rng);
    let mut r = BitRel::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                r.insert(perm[i], perm[j]);
            }
        }
    }
    r.rt_closure()
}

/// Linear extension of `order`.
fn linear_extension(order: &BitRel) -> Vec<Elem> {
    let n = order.size();
    let mut out: Vec<Elem> = (0..n).collect();
    out.sort_by_key(|&x| (0..n).filter(|&y| order.contains(y, x)).count());
    out
}

/// A random monotone table of arity `k`, or `None` when a tuple has no common upper bound.
fn random_monotone(rng: &mut Rand, order: &BitRel, k: usize) -> Option<Vec<Elem>> {
    let n = order.size();
    let mut rank = vec![0; n];
    for (i, &x) in linear_extension(order).iter().enumerate() {
        rank[x] = i;
    }
    let mut tuples = Vec::new();
    for_each_tuple(n, k, |t| tuples.push(t.to_vec()));
    let index = |t: &[Elem]| t.iter().fold(0, |acc, &x| acc * n + x);
    tuples.sort_by_key(|t| t.iter().map(|&x| rank[x]).sum::<usize>());
    let mut table: Vec<Option<Elem>> = vec![None; tuples.len()];
    for t in &tuples {
        let mut lower = Vec::new();
        let mut s = t.clone();
        for i in 0..k {
            for y in 0..n {
                if y != t[i] && order.contains(y, t[i]) {
                    s[i] = y;
                    lower.push(table[index(&s)].expect("predecessor assigned"));
                }
            }
            s[i] = t[i];
        }
        let cands: Vec<Elem> = (0..n).filter(|&v| lower.iter().all(|&l| order.contains(l, v))).collect();
        table[index(t)] = Some(*cands.choose(rng)?);
    }
    Some(table.into_iter().map(|v| v.expect("assigned")).collect())
}

/// A random algebra of size `n` in the variety: monotone operations on a random poset,
/// constants respecting the signature's inequalities.
pub fn random_algebra(rng: &mut Rand, sig: &Arc<Signature>, n: usize, name: &str) -> OrderedAlgebra {
    loop {
        let density = rng.gen_range(0.2..0.9);
        let order = random_poset(rng, n, density);
        let mut tables: Vec<Option<Vec<Elem>>> = Vec::new();
        let mut ok = true;
        for (_, sym) in sig.symbols() {
            if sym.arity == 0 {
                tables.push(None);
                continue;
            }
            match random_monotone(rng, &order, sym.arity) {
                Some(t) => tables.push(Some(t)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let consts: Vec<Sym> = sig.constants().collect();
        let mut vals: Vec<Option<Elem>> = vec![None; sig.len()];
        let mut sorted = consts.clone();
        sorted.sort_by_key(|&c| consts.iter().filter(|&&d| d != c && sig.const_leq(d, c)).count());
        for &c in &sorted {
            let cands: Vec<Elem> = (0..n)
                .filter(|&v| consts.iter().all(|&d| d == c || !sig.const_leq(d, c) || vals[d.index()].is_none_or(|w| order.contains(w, v))))
                .collect();
            match cands.choose(rng) {
                Some(&v) => vals[c.index()] = Some(v),
                None => ok = false,
            }
        }
        if !ok {
            continue;
        }
        let a = OrderedAlgebra::from_fn(
            sig.clone(),
            name,
            (0..n).map(|i| format!("e{i}")).collect(),
            &order,
            |f, args| tables[f.index()].as_ref().expect("operation")[args.iter().fold(0, |acc, &x| acc * n + x)],
            |c| vals[c.index()].expect("constant"),
        )
        .expect("generated algebra is well formed");
        if a.is_valid() {
            return a;
        }
    }
}

/// A random special amalgam over an algebra of size `2..=max_n` whose subalgebra `C`,
/// generated by a random seed, is proper.
pub fn random_special(rng: &mut Rand, sig: &Arc<Signature>, max_n: usize, name: &str) -> SpecialAmalgam {
    loop {
        let n = rng.gen_range(2..=max_n);
        let a = Arc::new(random_algebra(rng, sig, n, name));
        let seed: Vec<Elem> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
        let c = a.generated_subalgebra(&seed);
        if c.len() < n {
            return make_special(a, &seed).expect("seed inside the carrier");
        }
    }
}

/// `count` special amalgams from one seed.
pub fn special_corpus(seed: u64, count: usize, sig: &Arc<Signature>, max_n: usize) -> Vec<SpecialAmalgam> {
    let mut r = rng(seed);
    (0..count).map(|i| random_special(&mut r, sig, max_n, &format!("S{i}"))).collect()
}

/// Terms over `A_side ∪ F₀` with at most one operation whose value is exactly `e`.
fn exact_unfoldings(am: &Amalgam, side: Side, e: Elem) -> Vec<XTerm> {
    let a = am.alg(side);
    let sig = am.sig();
    let consts: Vec<Sym> = sig.constants().collect();
    let mut out: Vec<XTerm> = consts.iter().filter(|&&c| a.const_val(c) == e).map(|&c| Term::constant(c)).collect();
    let leaves: Vec<XTerm> = (0..a.size()).map(|x| xleaf(side, x)).chain(consts.iter().map(|&c| Term::constant(c))).collect();
    for (f, k) in sig.operations() {
        for_each_tuple(leaves.len(), k, |idx| {
            let t = Term::node(f, &idx.iter().map(|&i| leaves[i].clone()).collect::<Vec<_>>());
            if a.eval(&t, |x| x.e()) == e {
                out.push(t);
            }
        });
    }
    out
}

fn element_at(t: &XTerm, pos: usize) -> Option<XLabel> {
    match t.toks()[pos] {
        Tok::Var(x) => Some(x),
        _ => None,
    }
}

fn pure_side(am: &Amalgam, t: &XTerm) -> Option<Side> {
    [Side::One, Side::Two].into_iter().find(|&s| am.in_side(t, s))
}

/// One relation step at `pos` of `cur`, or a free raise; `None` when the move does not apply.
fn random_move(rng: &mut Rand, sp: &SpecialAmalgam, cur: &XTerm, max_ops: usize) -> Option<Step> {
    let am = &sp.am;
    let elems: Vec<usize> = cur.leaf_positions().into_iter().filter(|&p| element_at(cur, p).is_some()).collect();
    match rng.gen_range(0..8) {
        0..=2 => {
            let &pos = elems.choose(rng)?;
            let x = element_at(cur, pos)?;
            let opts = exact_unfoldings(am, x.side, x.e());
            let u = opts.choose(rng)?;
            if cur.op_count() + u.op_count() > max_ops {
                return None;
            }
            Some(Step::Rel { tag: RelTag::RInv(x.side), p: Translation::from_context(cur, pos), from: xleaf(x.side, x.e()), to: u.clone() })
        }
        3 | 4 => {
            let ops: Vec<usize> = (0..cur.len()).filter(|&p| matches!(cur.toks()[p], Tok::Op(..))).collect();
            let cands: Vec<(usize, Side)> = ops.into_iter().filter_map(|p| pure_side(am, &cur.subterm(p)).map(|s| (p, s))).collect();
            let &(pos, side) = cands.choose(rng)?;
            let sub = cur.subterm(pos);
            let val = am.value(&sub, side)?;
            Some(Step::Rel { tag: RelTag::R(side), p: Translation::from_context(cur, pos), from: sub, to: xleaf(side, val) })
        }
        5 | 6 => {
            let cands: Vec<usize> = elems.into_iter().filter(|&p| sp.in_c(element_at(cur, p).unwrap().e())).collect();
            let &pos = cands.choose(rng)?;
            Some(flip(cur, pos))
        }
        _ => {
            let &pos = elems.choose(rng)?;
            let x = element_at(cur, pos)?;
            let a = am.alg(x.side);
            let v = sp.nu0_bar(cur);
            let ups: Vec<XTerm> = (0..a.size())
                .filter(|&y| y != x.e() && a.leq(x.e(), y))
                .map(|y| cur.replace(pos, &xleaf(x.side, y)))
                .filter(|t| sp.nu0_bar(t) == v)
                .collect();
            let rhs = ups.choose(rng)?.clone();
            Some(Step::Leq { lhs: cur.clone(), rhs })
        }
    }
}

fn flip(cur: &XTerm, pos: usize) -> Step {
    let x = element_at(cur, pos).expect("element leaf");
    let tag = if x.side == Side::One { RelTag::H } else { RelTag::HInv };
    Step::Rel { tag, p: Translation::from_context(cur, pos), from: xleaf(x.side, x.e()), to: xleaf(x.side.other(), x.e()) }
}

/// Collapses `cur` to a single element: pure subterms are evaluated and elements of `C` are
/// moved to the side of the remaining non-`C` leaves. `None` when non-`C` leaves sit on both sides.
fn close(sp: &SpecialAmalgam, sch: &mut Scheme, target: Side) -> Option<()> {
    let am = &sp.am;
    loop {
        let cur = sch.end();
        if let Some(leaf) = cur.as_leaf() {
            let Leaf::Var(x) = leaf else {
                let side = target.other();
                let val = am.value(&cur, side)?;
                sch.push(Step::Rel { tag: RelTag::R(side), p: Translation::identity(), from: cur, to: xleaf(side, val) });
                continue;
            };
            if x.side != target {
                sch.push(flip(&cur, 0));
            }
            return Some(());
        }
        let collapse =
            (0..cur.len()).filter(|&p| matches!(cur.toks()[p], Tok::Op(..))).find_map(|p| pure_side(am, &cur.subterm(p)).map(|s| (p, s)));
        if let Some((pos, side)) = collapse {
            let sub = cur.subterm(pos);
            let val = am.value(&sub, side)?;
            sch.push(Step::Rel { tag: RelTag::R(side), p: Translation::from_context(&cur, pos), from: sub, to: xleaf(side, val) });
            continue;
        }
        let sides: Vec<Side> =
            cur.leaf_positions().iter().filter_map(|&p| element_at(&cur, p)).filter(|x| !sp.in_c(x.e())).map(|x| x.side).collect();
        let home = match sides.first() {
            Some(&s) if sides.iter().all(|&t| t == s) => s,
            Some(_) => return None,
            None => target,
        };
        let pos = cur.leaf_positions().into_iter().find(|&p| element_at(&cur, p).is_some_and(|x| x.side != home))?;
        sch.push(flip(&cur, pos));
    }
}

/// A scheme from `φ_from(z)` to `φ_other(z)` on a special amalgam, padded with a random walk of
/// `moves` relation steps (`R⁻¹` unfoldings, `R` collapses, `H′` flips and value-preserving
/// raises) before it is closed. Every term keeps `ν̄0` equal to `z`'s element. `None` when the
/// walk cannot be closed or contains no `R⁻¹` detour.
pub fn padded_scheme(rng: &mut Rand, sp: &SpecialAmalgam, z: Elem, from: Side, moves: usize, max_ops: usize) -> Option<Scheme> {
    let x = sp.c_elems[z];
    let mut sch = Scheme::empty(xleaf(from, x));
    let mut made = 0;
    for _ in 0..moves * 8 {
        if made == moves {
            break;
        }
        if let Some(step) = random_move(rng, sp, &sch.end(), max_ops) {
            if !matches!(step, Step::Leq { .. }) {
                made += 1;
            }
            sch.push(step);
        }
    }
    if !sch.steps.iter().any(|s| matches!(s.tag(), Some(RelTag::RInv(_)))) {
        return None;
    }
    close(sp, &mut sch, from.other())?;
    (sch.end() == xleaf(from.other(), x)).then_some(sch)
}

/// `count` padded pairs `(forward, reverse)` with their centres `z`.
pub fn padded_corpus(seed: u64, corpus: &[SpecialAmalgam], count: usize, max_ops: usize) -> Vec<(usize, Elem, Scheme, Scheme)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < count * 100 {
        attempts += 1;
        let i = r.gen_range(0..corpus.len());
        let sp = &corpus[i];
        let z = r.gen_range(0..sp.c_elems.len());
        let moves = r.gen_range(2..=6);
        let Some(fwd) = padded_scheme(&mut r, sp, z, Side::One, moves, max_ops) else { continue };
        let Some(rev) = padded_scheme(&mut r, sp, z, Side::Two, moves, max_ops) else { continue };
        out.push((i, z, fwd, rev));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebras_are_valid_and_reproducible() {
        let sig = sig1();
        let mut r = rng(7);
        for n in 1..=4 {
            for _ in 0..20 {
                assert!(random_algebra(&mut r, &sig, n, "A").is_valid());
            }
        }
        let a = random_algebra(&mut rng(3), &sig, 4, "A");
        let b = random_algebra(&mut rng(3), &sig, 4, "A");
        assert_eq!(a, b);
    }

    #[test]
    fn specials_have_proper_c() {
        for sp in special_corpus(1, 20, &sig1(), 4) {
            assert!(sp.c_elems.len() < sp.base.size());
            assert!(crate::amalgam::validate_amalgam(&sp.am).is_empty());
        }
    }

    #[test]
    fn padded_schemes_validate() {
        let corpus = special_corpus(2, 10, &sig_binary(), 4);
        let pads = padded_corpus(3, &corpus, 40, 4);
        assert_eq!(pads.len(), 40);
        for (i, z, fwd, rev) in &pads {
            let sp = &corpus[*i];
            let x = sp.c_elems[*z];
            assert!(crate::scheme::check_certificate(&sp.am, fwd, &xleaf(Side::One, x), &xleaf(Side::Two, x)).is_empty());
            assert!(crate::scheme::check_certificate(&sp.am, rev, &xleaf(Side::Two, x), &xleaf(Side::One, x)).is_empty());
            assert!(fwd.terms().iter().all(|t| sp.nu0_bar(t) == x));
        }
    }

    #[test]
    fn posets_are_partial_orders() {
        let mut r = rng(5);
        for n in 1..6 {
            assert!(random_poset(&mut r, n, 0.5).is_partial_order());
        }
    }
}
