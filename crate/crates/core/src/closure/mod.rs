//! Closure of relations on finite algebras into compatible quasiorders and
//! order-congruences, with zigzag witnesses rebuilt from back-pointers.

mod translation;

pub use translation::Translation;

use crate::oalg::{for_each_tuple, Elem, OrderedAlgebra};
use crate::relation::BitRel;
use crate::signature::Sym;
use crate::term::regular_shapes_upto;

/// The filler set `X ∪ F₀^A` as sorted distinct elements.
pub fn filler_values(a: &OrderedAlgebra, x: &[Elem]) -> Vec<Elem> {
    let mut v: Vec<Elem> = x.to_vec();
    v.extend(a.sig().constants().map(|c| a.const_val(c)));
    v.sort_unstable();
    v.dedup();
    v
}

/// Streams every cfr translation with at most `max_ops` operation symbols, fillers drawn
/// from `X ∪ F₀^A`. Order: template size, template, slot, fillers lexicographically.
pub fn for_each_translation(a: &OrderedAlgebra, x: &[Elem], max_ops: usize, mut f: impl FnMut(&Translation<Elem>)) {
    let fill = filler_values(a, x);
    for template in regular_shapes_upto(a.sig(), max_ops) {
        let n = template.leaf_count();
        for slot in 1..=n {
            for_each_tuple(fill.len(), n - 1, |ix| {
                let fillers = ix.iter().map(|&i| fill[i]).collect();
                let p = Translation::new(template.clone(), slot, fillers).expect("regular template");
                f(&p);
            });
        }
    }
}

pub fn enumerate_translations(a: &OrderedAlgebra, x: &[Elem], max_ops: usize) -> Vec<Translation<Elem>> {
    let mut out = Vec::new();
    for_each_translation(a, x, max_ops, |p| out.push(p.clone()));
    out
}

/// `→^H`: all `(p(u), p(v))` with `(u, v) ∈ H` over the enumerated translations.
pub fn step_relation(a: &OrderedAlgebra, x: &[Elem], h: &[(Elem, Elem)], max_ops: usize) -> BitRel {
    let mut r = BitRel::empty(a.size());
    if h.is_empty() {
        return r;
    }
    let mut args: Vec<Elem> = h.iter().flat_map(|&(u, v)| [u, v]).collect();
    args.sort_unstable();
    args.dedup();
    let mut img = vec![0; a.size()];
    for_each_translation(a, x, max_ops, |p| {
        for &u in &args {
            img[u] = p.eval(a, u);
        }
        for &(u, v) in h {
            r.insert(img[u], img[v]);
        }
    });
    r
}

/// One link `p(from) → p(to)` of a witness, with `(from, to) ∈ H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub p: Translation<Elem>,
    pub from: Elem,
    pub to: Elem,
}

/// `start ≤ p1(a1) → p1(a1') ≤ p2(a2) → ... ≤ end` in a finite algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteScheme {
    pub start: Elem,
    pub links: Vec<Link>,
    pub end: Elem,
}

impl FiniteScheme {
    /// Checks the shape against `A` and `H`; returns the first failure.
    pub fn check(&self, a: &OrderedAlgebra, h: &[(Elem, Elem)]) -> Result<(), String> {
        let mut cur = self.start;
        for (i, l) in self.links.iter().enumerate() {
            if !h.contains(&(l.from, l.to)) {
                return Err(format!("link {} uses a pair outside H", i + 1));
            }
            let lhs = l.p.eval(a, l.from);
            if !a.leq(cur, lhs) {
                return Err(format!("inequality before link {} fails", i + 1));
            }
            cur = l.p.eval(a, l.to);
        }
        if !a.leq(cur, self.end) {
            return Err("final inequality fails".into());
        }
        Ok(())
    }

    fn map(&self, a: &OrderedAlgebra, f: Sym, before: &[Elem], after: &[Elem]) -> FiniteScheme {
        let wrap = |u: Elem| {
            let mut args = before.to_vec();
            args.push(u);
            args.extend_from_slice(after);
            a.apply(f, &args)
        };
        FiniteScheme {
            start: wrap(self.start),
            links: self.links.iter().map(|l| Link { p: l.p.wrap(f, before, after), from: l.from, to: l.to }).collect(),
            end: wrap(self.end),
        }
    }
}

#[derive(Clone, Debug)]
enum Reason {
    Order,
    Gen,
    Compat { op: Sym, pos: u8, args: Vec<Elem>, from: (Elem, Elem) },
    Trans { mid: Elem },
}

/// A generated compatible quasiorder with back-pointers for witnesses.
#[derive(Clone, Debug)]
pub struct Closure {
    pub rel: BitRel,
    pub h: Vec<(Elem, Elem)>,
    reasons: Vec<Option<Reason>>,
    n: usize,
}

impl Closure {
    /// A witness for `(c, c')`, or `None` if the pair is not in the relation.
    pub fn witness(&self, a: &OrderedAlgebra, c: Elem, d: Elem) -> Option<FiniteScheme> {
        self.reasons[c * self.n + d].as_ref()?;
        Some(self.build(a, c, d))
    }

    fn build(&self, a: &OrderedAlgebra, c: Elem, d: Elem) -> FiniteScheme {
        match self.reasons[c * self.n + d].as_ref().expect("pair in closure") {
            Reason::Order => FiniteScheme { start: c, links: Vec::new(), end: d },
            Reason::Gen => FiniteScheme { start: c, links: vec![Link { p: Translation::identity(), from: c, to: d }], end: d },
            Reason::Compat { op, pos, args, from } => {
                let inner = self.build(a, from.0, from.1);
                let p = *pos as usize;
                inner.map(a, *op, &args[..p], &args[p + 1..])
            }
            Reason::Trans { mid } => {
                let mut left = self.build(a, c, *mid);
                let right = self.build(a, *mid, d);
                left.links.extend(right.links);
                left.end = right.end;
                left
            }
        }
    }
}

/// `Σ_H`: least compatible quasiorder containing `≤_A ∪ H`.
pub fn gen_compatible_quasiorder(a: &OrderedAlgebra, h: &[(Elem, Elem)]) -> Closure {
    let n = a.size();
    let mut rel = BitRel::empty(n);
    let mut reasons: Vec<Option<Reason>> = vec![None; n * n];
    let mut work: Vec<(Elem, Elem)> = Vec::new();
    for (x, y) in a.order().pairs() {
        rel.insert(x, y);
        reasons[x * n + y] = Some(Reason::Order);
        work.push((x, y));
    }
    for &(x, y) in h {
        if rel.insert(x, y) {
            reasons[x * n + y] = Some(Reason::Gen);
            work.push((x, y));
        }
    }
    let ops: Vec<(Sym, usize)> = a.sig().operations().collect();
    while let Some((x, y)) = work.pop() {
        if x == y {
            continue;
        }
        for &(f, k) in &ops {
            for i in 0..k {
                for_each_tuple(n, k - 1, |rest| {
                    let mut args = rest.to_vec();
                    args.insert(i, x);
                    let fx = a.apply(f, &args);
                    args[i] = y;
                    let fy = a.apply(f, &args);
                    if rel.insert(fx, fy) {
                        reasons[fx * n + fy] = Some(Reason::Compat { op: f, pos: i as u8, args, from: (x, y) });
                        work.push((fx, fy));
                    }
                });
            }
        }
        for z in 0..n {
            if rel.contains(y, z) && rel.insert(x, z) {
                reasons[x * n + z] = Some(Reason::Trans { mid: y });
                work.push((x, z));
            }
            if rel.contains(z, x) && rel.insert(z, y) {
                reasons[z * n + y] = Some(Reason::Trans { mid: x });
                work.push((z, y));
            }
        }
    }
    Closure { rel, h: h.to_vec(), reasons, n }
}

/// `Θ_H` and `≤_{Θ_H} = Σ_{H ∪ H⁻¹}`.
#[derive(Clone, Debug)]
pub struct OrderCongruence {
    pub theta: BitRel,
    pub leq: Closure,
}

pub fn gen_order_congruence(a: &OrderedAlgebra, h: &[(Elem, Elem)]) -> OrderCongruence {
    let mut sym: Vec<(Elem, Elem)> = h.to_vec();
    sym.extend(h.iter().map(|&(x, y)| (y, x)));
    sym.sort_unstable();
    sym.dedup();
    let leq = gen_compatible_quasiorder(a, &sym);
    let theta = leq.rel.intersection(&leq.rel.inverse());
    OrderCongruence { theta, leq }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oalg::fixtures::*;
    use crate::oalg::{is_compatible_quasiorder, is_order_congruence, leq_theta};
    use crate::term::{parse_term, Formal};

    #[test]
    fn translation_counts() {
        let a = ch3();
        assert_eq!(enumerate_translations(&a, &[0], 0), vec![Translation::identity()]);
        // Fillers {e0} ∪ {e0, e2} = {e0, e2}: identity + f (2 slots · 2) + g (3 slots · 4).
        let ts = enumerate_translations(&a, &[0], 1);
        assert_eq!(ts.len(), 1 + 2 * 2 + 3 * 4);
        let bare = std::sync::Arc::new(crate::signature::Signature::parse("op f 2").unwrap());
        let b = OrderedAlgebra::from_fn(bare, "B", vec!["a".into()], &BitRel::identity(1), |_, _| 0, |_| 0).unwrap();
        assert_eq!(enumerate_translations(&b, &[], 1).len(), 1);
    }

    #[test]
    fn step_relation_examples() {
        let a = ch3();
        let all = [0, 1, 2];
        assert_eq!(step_relation(&a, &all, &[], 2).count(), 0);
        let diag: Vec<(Elem, Elem)> = (0..3).map(|e| (e, e)).collect();
        assert!(BitRel::identity(3).is_subset(&step_relation(&a, &all, &diag, 1)));
        let r = step_relation(&a, &all, &[(2, 0)], 1);
        assert!(r.contains(2, 0) && r.contains(2, 1));
    }

    #[test]
    fn compatible_quasiorders() {
        let a = ch3();
        assert_eq!(&gen_compatible_quasiorder(&a, &[]).rel, a.order());
        assert_eq!(gen_compatible_quasiorder(&a, &[(2, 0)]).rel, BitRel::full(3));
        let le: Vec<_> = a.order().pairs().collect();
        assert_eq!(&gen_compatible_quasiorder(&a, &le).rel, a.order());
    }

    #[test]
    fn order_congruences() {
        let a = ch3();
        let oc = gen_order_congruence(&a, &[]);
        assert_eq!(oc.theta, BitRel::identity(3));
        let oc = gen_order_congruence(&a, &[(0, 1)]);
        assert!(oc.leq.rel.contains(1, 0));
        assert_eq!(oc.theta, BitRel::from_pairs(3, [(0, 1), (1, 0)]).rt_closure());
        assert!(is_order_congruence(&a, &oc.theta).unwrap());
        assert_eq!(leq_theta(&a, &oc.theta).unwrap(), oc.leq.rel);
        let diag: Vec<(Elem, Elem)> = (0..3).map(|e| (e, e)).collect();
        assert_eq!(gen_order_congruence(&a, &diag).theta, BitRel::identity(3));
    }

    #[test]
    fn witnesses_check() {
        let a = ch3();
        let h = [(2, 0)];
        let cl = gen_compatible_quasiorder(&a, &h);
        assert!(is_compatible_quasiorder(&a, &cl.rel).is_ok());
        for (x, y) in cl.rel.pairs() {
            let w = cl.witness(&a, x, y).unwrap();
            assert_eq!((w.start, w.end), (x, y));
            w.check(&a, &h).unwrap();
        }
    }

    #[test]
    fn wrap_composes() {
        let a = ch3();
        let sig = a.sig().clone();
        let f = sig.lookup("f").unwrap();
        let g = sig.lookup("g").unwrap();
        let p = Translation::<Elem>::identity().wrap(f, &[0], &[]).wrap(g, &[], &[1, 0]);
        assert_eq!(p.template(), &parse_term(&sig, &Formal, "g f z1 z2 z3 z4").unwrap());
        assert_eq!(p.slot(), 2);
        assert_eq!(p.fillers(), &[0, 1, 0]);
        assert_eq!(p.eval(&a, 2), 2);
        assert_eq!(p.eval(&a, 0), 1);
    }

    #[test]
    fn context_round_trip() {
        let sig = sig1();
        let vars = crate::term::VarNames::new(&["x1", "x2", "x4"]).unwrap();
        let t = parse_term(&sig, &vars, "f g x2 x1 c f x1 x4").unwrap();
        for pos in 0..t.len() {
            let p = Translation::from_context(&t, pos);
            assert_eq!(p.apply(&t.subterm(pos)), t);
            assert_eq!(p.hole_position(), pos);
        }
    }
}
