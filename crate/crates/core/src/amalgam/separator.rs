use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::closure::gen_compatible_quasiorder;
use crate::error::{Error, Result};
use crate::oalg::{for_each_tuple, nonregular_quotient, Elem, Homomorphism, OrderedAlgebra};
use crate::relation::BitRel;

/// Every compatible quasiorder of `a`, as joins of the principal ones. For an algebra
/// with the trivial order only the symmetric ones (congruences) are kept.
pub fn all_compatible_quasiorders(a: &OrderedAlgebra) -> Vec<BitRel> {
    let n = a.size();
    let unordered = a.order() == &BitRel::identity(n);
    let gen = |pairs: &[(Elem, Elem)]| gen_compatible_quasiorder(a, pairs).rel;
    let mut principal = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if a.leq(x, y) {
                continue;
            }
            let r = if unordered { gen(&[(x, y), (y, x)]) } else { gen(&[(x, y)]) };
            if !principal.contains(&r) {
                principal.push(r);
            }
        }
    }
    let base = a.order().clone();
    let mut seen: HashSet<BitRel> = HashSet::new();
    seen.insert(base.clone());
    let mut out = vec![base];
    let mut k = 0;
    while k < out.len() {
        let cur = out[k].clone();
        k += 1;
        for p in &principal {
            if p.is_subset(&cur) {
                continue;
            }
            let pairs: Vec<(Elem, Elem)> = cur.union(p).pairs().collect();
            let j = gen(&pairs);
            if seen.insert(j.clone()) {
                out.push(j);
            }
        }
    }
    out.sort_by_key(|r| r.count());
    out
}

/// All monotone homomorphisms `a → d`, in lexicographic order of their maps.
pub fn enumerate_homs(a: &OrderedAlgebra, d: &OrderedAlgebra) -> Vec<Vec<Elem>> {
    let n = a.size();
    let mut forced: Vec<Option<Elem>> = vec![None; n];
    for c in a.sig().constants() {
        let (e, v) = (a.const_val(c), d.const_val(c));
        match forced[e] {
            Some(w) if w != v => return Vec::new(),
            _ => forced[e] = Some(v),
        }
    }
    let ops: Vec<_> = a.sig().operations().collect();
    let mut out = Vec::new();
    let mut map = vec![0; n];
    extend(a, d, &ops, &forced, &mut map, 0, &mut out);
    out
}

fn consistent(a: &OrderedAlgebra, d: &OrderedAlgebra, ops: &[(crate::signature::Sym, usize)], map: &[Elem], i: usize) -> bool {
    for j in 0..i {
        if (a.leq(j, i) && !d.leq(map[j], map[i])) || (a.leq(i, j) && !d.leq(map[i], map[j])) {
            return false;
        }
    }
    let mut ok = true;
    let mut img = Vec::new();
    for &(f, k) in ops {
        for_each_tuple(i + 1, k, |args| {
            if !ok {
                return;
            }
            // Each entry is checked once, when the last of its arguments and result is assigned.
            let r = a.apply(f, args);
            if r > i || (r != i && !args.contains(&i)) {
                return;
            }
            img.clear();
            img.extend(args.iter().map(|&x| map[x]));
            ok = d.apply(f, &img) == map[r];
        });
        if !ok {
            return false;
        }
    }
    true
}

fn extend(
    a: &OrderedAlgebra,
    d: &OrderedAlgebra,
    ops: &[(crate::signature::Sym, usize)],
    forced: &[Option<Elem>],
    map: &mut Vec<Elem>,
    i: usize,
    out: &mut Vec<Vec<Elem>>,
) {
    if i == map.len() {
        out.push(map.clone());
        return;
    }
    let choices: Vec<Elem> = match forced[i] {
        Some(v) => vec![v],
        None => (0..d.size()).collect(),
    };
    for v in choices {
        map[i] = v;
        if consistent(a, d, ops, map, i) {
            extend(a, d, ops, forced, map, i + 1, out);
        }
    }
}

/// Two homomorphisms that agree on a subalgebra and differ at `x`.
#[derive(Clone, Debug)]
pub struct Separator {
    pub d: Arc<OrderedAlgebra>,
    pub f: Vec<Elem>,
    pub g: Vec<Elem>,
    pub x: Elem,
}

#[derive(Clone, Debug)]
pub enum SeparatorOutcome {
    Found(Separator),
    Inconclusive { codomains: usize, homs: usize },
}

/// Upper bound on the number of chain algebras tried per carrier size.
const CHAIN_LIMIT: usize = 250_000;

/// All monotone tables of arity `k` on the chain `0 < .. < n-1`, or `None` past `limit`.
fn chain_tables(n: usize, k: usize, limit: usize) -> Option<Vec<Vec<Elem>>> {
    let len = n.pow(k as u32);
    let mut out = Vec::new();
    let mut t = vec![0; len];
    // Predecessors of a tuple index: one coordinate lowered by one.
    let preds: Vec<Vec<usize>> = (0..len)
        .map(|i| {
            let mut p = Vec::new();
            let mut stride = 1;
            for _ in 0..k {
                if (i / stride) % n > 0 {
                    p.push(i - stride);
                }
                stride *= n;
            }
            p
        })
        .collect();
    fn fill(i: usize, n: usize, t: &mut Vec<Elem>, preds: &[Vec<usize>], out: &mut Vec<Vec<Elem>>, limit: usize) -> bool {
        if i == t.len() {
            out.push(t.clone());
            return out.len() <= limit;
        }
        let lo = preds[i].iter().map(|&p| t[p]).max().unwrap_or(0);
        for v in lo..n {
            t[i] = v;
            if !fill(i + 1, n, t, preds, out, limit) {
                return false;
            }
        }
        true
    }
    fill(0, n, &mut t, &preds, &mut out, limit).then_some(out)
}

/// Visits every algebra on the chain of size `n` in the variety until `visit` returns
/// false; nothing is visited when there are more than `limit`.
fn chain_algebras(sig: &Arc<crate::signature::Signature>, n: usize, limit: usize, mut visit: impl FnMut(OrderedAlgebra) -> bool) {
    let ops: Vec<_> = sig.operations().collect();
    let mut tables = Vec::new();
    let mut total = 1usize;
    for &(_, k) in &ops {
        let Some(ts) = chain_tables(n, k, limit) else { return };
        total = total.saturating_mul(ts.len());
        tables.push(ts);
    }
    let consts: Vec<_> = sig.constants().collect();
    let mut const_vals: Vec<Vec<Elem>> = Vec::new();
    crate::oalg::for_each_tuple(n, consts.len(), |v| {
        let ok = consts.iter().enumerate().all(|(i, &c)| consts.iter().enumerate().all(|(j, &d)| !sig.const_leq(c, d) || v[i] <= v[j]));
        if ok {
            const_vals.push(v.to_vec());
        }
    });
    total = total.saturating_mul(const_vals.len());
    if total > limit {
        return;
    }
    let order = BitRel::from_pairs(n, (0..n).flat_map(|a| (a..n).map(move |b| (a, b))));
    let names: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
    let sizes: Vec<usize> = tables.iter().map(Vec::len).collect();
    let mut go = true;
    crate::oalg::for_each_tuple_mixed(&sizes, |pick| {
        for cv in &const_vals {
            if !go {
                return;
            }
            let a = OrderedAlgebra::from_fn(
                sig.clone(),
                format!("K{n}"),
                names.clone(),
                &order,
                |f, args| {
                    let i = ops.iter().position(|&(g, _)| g == f).expect("operation");
                    let idx = args.iter().rev().fold(0, |acc, &x| acc * n + x);
                    tables[i][pick[i]][idx]
                },
                |c| cv[consts.iter().position(|&d| d == c).expect("constant")],
            )
            .expect("chain algebra is well formed");
            go = visit(a);
        }
    });
}

/// Codomains tried by [`separator_search`]: quotients of `a` by its compatible
/// quasiorders, largest first, then binary products of nontrivial quotients. Chains
/// are tried afterwards by [`separator_search`].
fn codomains(a: &Arc<OrderedAlgebra>, max_d: usize) -> Vec<Arc<OrderedAlgebra>> {
    let mut quots: Vec<Arc<OrderedAlgebra>> = Vec::new();
    for sigma in all_compatible_quasiorders(a) {
        let Ok(q) = nonregular_quotient(a, &sigma) else { continue };
        if q.algebra.size() <= max_d {
            quots.push(q.algebra);
        }
    }
    quots.sort_by_key(|q| std::cmp::Reverse(q.size()));
    let mut out = quots.clone();
    let nontrivial: Vec<&Arc<OrderedAlgebra>> = quots.iter().filter(|q| q.size() > 1).collect();
    for i in 0..nontrivial.len() {
        for j in i..nontrivial.len() {
            if nontrivial[i].size() * nontrivial[j].size() > max_d {
                continue;
            }
            if let Ok(p) = crate::oalg::product(a.sig(), &[nontrivial[i], nontrivial[j]]) {
                out.push(Arc::new(p));
            }
        }
    }
    out
}

/// First pair among the homomorphisms `a → d` agreeing on `c` and differing at `x`.
fn separating_pair(a: &OrderedAlgebra, d: &OrderedAlgebra, c: &[Elem], x: Elem, homs: &mut usize) -> Option<(Vec<Elem>, Vec<Elem>)> {
    let all = enumerate_homs(a, d);
    *homs += all.len();
    let mut groups: HashMap<Vec<Elem>, Vec<usize>> = HashMap::new();
    for (k, h) in all.iter().enumerate() {
        let key: Vec<Elem> = c.iter().map(|&e| h[e]).collect();
        let group = groups.entry(key).or_default();
        if let Some(&j) = group.iter().find(|&&j| all[j][x] != h[x]) {
            return Some((h.clone(), all[j].clone()));
        }
        group.push(k);
    }
    None
}

/// Looks for homomorphisms `f, g: a → D` with `f|C = g|C` and `f(x) ≠ g(x)`, over the
/// codomains of size at most `max_d`. Inconclusive never means `x` is in the dominion.
pub fn separator_search(a: &Arc<OrderedAlgebra>, c: &[Elem], x: Elem, max_d: usize) -> Result<SeparatorOutcome> {
    if x >= a.size() {
        return Err(Error::PreconditionFailed("element outside the carrier".into()));
    }
    if c.contains(&x) {
        return Err(Error::PreconditionFailed(format!("{} lies in the subalgebra", a.elem_name(x))));
    }
    if !a.is_subuniverse(c) {
        return Err(Error::PreconditionFailed("the given elements do not form a subalgebra".into()));
    }
    if !a.is_valid() {
        return Err(Error::PreconditionFailed(format!("{} is not in the variety", a.name())));
    }
    let cods = codomains(a, max_d);
    let mut homs = 0;
    let mut tried = cods.len();
    for d in &cods {
        if let Some((f, g)) = separating_pair(a, d, c, x, &mut homs) {
            return Ok(SeparatorOutcome::Found(Separator { d: d.clone(), f, g, x }));
        }
    }
    if a.order() != &BitRel::identity(a.size()) {
        for n in 2..=max_d {
            let mut found = None;
            chain_algebras(a.sig(), n, CHAIN_LIMIT, |d| {
                tried += 1;
                if let Some((f, g)) = separating_pair(a, &d, c, x, &mut homs) {
                    found = Some(Separator { d: Arc::new(d), f, g, x });
                }
                found.is_none()
            });
            if let Some(sep) = found {
                return Ok(SeparatorOutcome::Found(sep));
            }
        }
    }
    Ok(SeparatorOutcome::Inconclusive { codomains: tried, homs })
}

#[derive(Clone, Debug)]
pub enum EpiOutcome {
    Surjective,
    NotEpi(Separator),
    Inconclusive,
}

/// Surjective maps are epimorphisms; otherwise tries to separate some element outside
/// the image.
pub fn epi_check(h: &Homomorphism, max_d: usize) -> Result<EpiOutcome> {
    h.require_hom()?;
    if h.is_surjective() {
        return Ok(EpiOutcome::Surjective);
    }
    let img = h.image();
    for b in 0..h.cod.size() {
        if img.contains(&b) {
            continue;
        }
        if let SeparatorOutcome::Found(sep) = separator_search(&h.cod, &img, b, max_d)? {
            return Ok(EpiOutcome::NotEpi(sep));
        }
    }
    Ok(EpiOutcome::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oalg::fixtures::{ch3, chain, sig1};

    #[test]
    fn ch3_separator_is_identity_and_collapse() {
        let a = Arc::new(ch3());
        let SeparatorOutcome::Found(sep) = separator_search(&a, &[0, 2], 1, 3).unwrap() else { panic!() };
        assert_eq!(sep.d.size(), 3);
        assert_eq!(sep.f, vec![0, 1, 2]);
        assert_eq!(sep.g, vec![0, 0, 2]);
    }

    #[test]
    fn preconditions_and_cap() {
        let a = Arc::new(ch3());
        assert!(separator_search(&a, &[0, 2], 0, 3).is_err());
        assert!(separator_search(&a, &[0, 1], 2, 3).is_err());
        assert!(matches!(separator_search(&a, &[0, 2], 1, 1).unwrap(), SeparatorOutcome::Inconclusive { .. }));
    }

    #[test]
    fn homs_of_chains() {
        let a = ch3();
        // Monotone join maps fixing the ends: e1 goes anywhere.
        assert_eq!(enumerate_homs(&a, &a), vec![vec![0, 0, 2], vec![0, 1, 2], vec![0, 2, 2]]);
        let two = chain(&sig1(), 2, "CH2");
        assert_eq!(enumerate_homs(&a, &two), vec![vec![0, 0, 1], vec![0, 1, 1]]);
        for h in enumerate_homs(&a, &two) {
            let h = Homomorphism::new(Arc::new(a.clone()), Arc::new(two.clone()), h).unwrap();
            assert!(h.require_hom().is_ok());
        }
    }

    #[test]
    fn quasiorders_of_ch3() {
        let a = ch3();
        let qs = all_compatible_quasiorders(&a);
        assert_eq!(qs[0], *a.order());
        for q in &qs {
            assert!(crate::oalg::is_compatible_quasiorder(&a, q).is_ok());
        }
        assert!(qs.contains(&BitRel::full(3)));
    }

    #[test]
    fn epi_cases() {
        let a = Arc::new(ch3());
        let id = Homomorphism::identity(a.clone());
        assert!(matches!(epi_check(&id, 3).unwrap(), EpiOutcome::Surjective));
        let c = Arc::new(a.subalgebra(&[0, 2], "C").unwrap());
        let incl = Homomorphism::new(c, a.clone(), vec![0, 2]).unwrap();
        let EpiOutcome::NotEpi(sep) = epi_check(&incl, 3).unwrap() else { panic!() };
        assert_eq!(sep.x, 1);
        assert!(matches!(epi_check(&incl, 1).unwrap(), EpiOutcome::Inconclusive));
    }
}
