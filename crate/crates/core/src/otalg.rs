//! The ordered term algebra over a poset of variables and ordered constants.

use std::sync::Arc;

use crate::error::{parse_err, Error, Result};
use crate::exec::Exec;
use crate::oalg::{Elem, OrderedAlgebra};
use crate::relation::BitRel;
use crate::signature::{statements, Signature, Sym};
use crate::term::{regular_shapes, Leaf, Term, Tok, VarId, VarNames, VarSyntax};

/// Variables with a partial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarPoset {
    pub names: VarNames,
    order: BitRel,
}

impl VarPoset {
    pub fn new<S: AsRef<str>>(names: &[S], order: &[(usize, usize)]) -> Result<Self> {
        let names = VarNames::new(names)?;
        let order = BitRel::from_pairs(names.len(), order.iter().copied()).rt_closure();
        if !order.is_antisymmetric() {
            return Err(Error::Validation("variable order is not antisymmetric".into()));
        }
        Ok(VarPoset { names, order })
    }

    pub fn antichain<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Self::new(names, &[])
    }

    /// `x1 <= x2 <= .. <= xn`.
    pub fn chain(n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let order: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(&names, &order).expect("valid chain")
    }

    /// Reads `var x` and `varorder x <= y` lines; other lines are ignored.
    pub fn parse(text: &str, sig: &Signature) -> Result<Self> {
        let mut names = Vec::new();
        let mut order = Vec::new();
        for (no, stmt) in statements(text) {
            let w: Vec<&str> = stmt.split_whitespace().collect();
            match w.as_slice() {
                ["var", rest @ ..] if !rest.is_empty() => names.extend(rest.iter().map(|s| s.to_string())),
                ["varorder", a, "<=", b] => order.push((no, a.to_string(), b.to_string())),
                ["var"] | ["varorder", ..] => return parse_err(format!("line {no}: malformed {stmt:?}")),
                _ => {}
            }
        }
        if let Some(n) = names.iter().find(|n| sig.lookup(n).is_some()) {
            return Err(Error::Validation(format!("variable {n} clashes with a signature symbol")));
        }
        let idx =
            |no: usize, n: &str| names.iter().position(|m| m == n).ok_or_else(|| Error::Parse(format!("line {no}: unknown variable {n}")));
        let pairs = order.iter().map(|(no, a, b)| Ok((idx(*no, a)?, idx(*no, b)?))).collect::<Result<Vec<_>>>()?;
        Self::new(&names, &pairs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    #[inline]
    pub fn leq(&self, a: VarId, b: VarId) -> bool {
        self.order.contains(a.0 as usize, b.0 as usize)
    }

    pub fn order(&self) -> &BitRel {
        &self.order
    }
}

impl VarSyntax<VarId> for VarPoset {
    fn parse_var(&self, word: &str) -> Option<VarId> {
        self.names.parse_var(word)
    }
    fn write_var(&self, v: VarId, out: &mut String) {
        self.names.write_var(v, out)
    }
}

/// `s ≼ t` for a label order given leafwise: equal skeletons and related leaves.
#[inline]
pub fn term_leq_by<V: Copy + Eq>(s: &Term<V>, t: &Term<V>, var_leq: impl Fn(V, V) -> bool, const_leq: impl Fn(Sym, Sym) -> bool) -> bool {
    let (a, b) = (s.toks(), t.toks());
    if a.len() != b.len() {
        return false;
    }
    for (x, y) in a.iter().zip(b) {
        let ok = match (*x, *y) {
            (Tok::Op(f, _), Tok::Op(g, _)) => f == g,
            (Tok::Var(u), Tok::Var(v)) => u == v || var_leq(u, v),
            (Tok::Const(c), Tok::Const(d)) => c == d || const_leq(c, d),
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// The order of the ordered term algebra: `≤_X ∪̇ ≤_{F₀}` lifted leafwise over equal skeletons.
#[inline]
pub fn term_leq(sig: &Signature, xp: &VarPoset, s: &Term<VarId>, t: &Term<VarId>) -> bool {
    term_leq_by(s, t, |u, v| xp.leq(u, v), |c, d| sig.const_leq(c, d))
}

/// Leaf labels `X ∪ F₀` in a fixed order: variables first, then constants.
pub fn labels(sig: &Signature, xp: &VarPoset) -> Vec<Leaf<VarId>> {
    xp.names.ids().map(Leaf::Var).chain(sig.constants().map(Leaf::Const)).collect()
}

/// All terms with exactly the skeleton of `shape`, labelings in lexicographic order.
pub fn labelings(shape: &Term<crate::term::Z>, labels: &[Leaf<VarId>]) -> Vec<Term<VarId>> {
    let n = shape.leaf_count();
    let shape = shape.map_vars(|_| VarId(0));
    let mut out = Vec::with_capacity(labels.len().pow(n as u32));
    crate::oalg::for_each_tuple(labels.len(), n, |ix| {
        let ls: Vec<Leaf<VarId>> = ix.iter().map(|&i| labels[i]).collect();
        out.push(shape.with_leaves(&ls));
    });
    out
}

/// Outcome of [`verify_partial_order`]. Any discrepancy is a failure.
#[derive(Clone, Debug, Default)]
pub struct OrderReport {
    pub terms: usize,
    pub skeletons: usize,
    pub pairs_compared: u64,
    pub compat_checks: u64,
    pub discrepancies: Vec<String>,
}

/// Checks, on all terms with at most `depth` operation symbols, that `≼` is reflexive,
/// antisymmetric, transitive, compatible with the operations, and equal to the
/// quasiorder generated by `≤_X ∪̇ ≤_{F₀}` as found by bounded scheme search.
///
/// Pairs with different skeletons are covered by checking every term against one
/// representative of every other skeleton and by checking that the scheme search never
/// leaves the skeleton it starts from.
pub fn verify_partial_order(sig: &Signature, xp: &VarPoset, depth: usize, exec: Exec) -> OrderReport {
    let labs = labels(sig, xp);
    let mut report = OrderReport::default();
    if labs.is_empty() {
        report.discrepancies.push("no variables and no constants: the term algebra is empty".into());
        return report;
    }
    let shapes: Vec<_> = (0..=depth).flat_map(|k| regular_shapes(sig, k)).collect();
    report.skeletons = shapes.len();
    let reps: Vec<Term<VarId>> = shapes.iter().map(|s| labelings(s, &labs[..1])[0].clone()).collect();
    let name = |t: &Term<VarId>| t.display(sig, xp, crate::term::Notation::Prefix);
    let code_of =
        |t: &Term<VarId>| -> usize { t.leaves().0.iter().fold(0, |acc, l| acc * labs.len() + labs.iter().position(|m| m == l).unwrap()) };
    let bit = |row: &[u64], j: usize| row[j / 64] >> (j % 64) & 1 == 1;
    let mut leq_pairs: Vec<Vec<(Term<VarId>, Term<VarId>)>> = vec![Vec::new(); depth.max(1)];

    for (si, shape) in shapes.iter().enumerate() {
        let terms = labelings(shape, &labs);
        let m = terms.len();
        let words = m.div_ceil(64);
        report.terms += m;
        report.pairs_compared += (m * m) as u64;
        let rows: Vec<(Vec<u64>, Vec<String>)> = exec.map(&terms, |s| {
            let mut issues = Vec::new();
            let mut mine = vec![0u64; words];
            for (j, t) in terms.iter().enumerate() {
                if term_leq(sig, xp, s, t) {
                    mine[j / 64] |= 1 << (j % 64);
                }
            }
            let mut oracle = vec![0u64; words];
            for t in crate::oracle::sigma_leq_upset(sig, xp, s, shape.leaf_count()) {
                if !t.same_skeleton(s) {
                    issues.push(format!("scheme search left the skeleton: {} to {}", name(s), name(&t)));
                    continue;
                }
                let j = code_of(&t);
                oracle[j / 64] |= 1 << (j % 64);
            }
            if let Some(j) = (0..m).find(|&j| bit(&mine, j) != bit(&oracle, j)) {
                issues.push(format!(
                    "leafwise order ({}) and generated order ({}) disagree on {} vs {}",
                    bit(&mine, j),
                    bit(&oracle, j),
                    name(s),
                    name(&terms[j])
                ));
            }
            for (ri, r) in reps.iter().enumerate() {
                if ri != si && (term_leq(sig, xp, s, r) || term_leq(sig, xp, r, s)) {
                    issues.push(format!("terms with different skeletons compared: {} and {}", name(s), name(r)));
                }
            }
            (mine, issues)
        });
        for (i, (row, issues)) in rows.iter().enumerate() {
            report.discrepancies.extend(issues.iter().cloned());
            if !bit(row, i) {
                report.discrepancies.push(format!("not reflexive at {}", name(&terms[i])));
            }
            for j in (0..m).filter(|&j| j != i && bit(row, j)) {
                if bit(&rows[j].0, i) {
                    report.discrepancies.push(format!("not antisymmetric: {} and {}", name(&terms[i]), name(&terms[j])));
                }
                if rows[j].0.iter().zip(row).any(|(b, a)| b & !a != 0) {
                    report.discrepancies.push(format!("not transitive through {}", name(&terms[j])));
                }
            }
            if shape.op_count() < depth {
                for j in (0..m).filter(|&j| bit(row, j)) {
                    leq_pairs[shape.op_count()].push((terms[i].clone(), terms[j].clone()));
                }
            }
        }
    }

    // s_i ≼ t_i for all i implies f(s̄) ≼ f(t̄), for all results within the depth.
    if depth > 0 {
        for (f, k) in sig.operations() {
            for parts in crate::term::compositions_upto(depth - 1, k) {
                let lists: Vec<&Vec<(Term<VarId>, Term<VarId>)>> = parts.iter().map(|&o| &leq_pairs[o]).collect();
                if lists.iter().any(|l| l.is_empty()) {
                    continue;
                }
                crate::oalg::for_each_tuple_mixed(&lists.iter().map(|l| l.len()).collect::<Vec<_>>(), |ix| {
                    let ss: Vec<Term<VarId>> = ix.iter().zip(&lists).map(|(&i, l)| l[i].0.clone()).collect();
                    let ts: Vec<Term<VarId>> = ix.iter().zip(&lists).map(|(&i, l)| l[i].1.clone()).collect();
                    let (fs, ft) = (Term::node(f, &ss), Term::node(f, &ts));
                    report.compat_checks += 1;
                    if !term_leq(sig, xp, &fs, &ft) {
                        report.discrepancies.push(format!("not compatible: {} vs {}", name(&fs), name(&ft)));
                    }
                });
            }
        }
    }
    report
}

/// The unique homomorphism extending a monotone `alpha: X → D`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub d: Arc<OrderedAlgebra>,
    pub alpha: Vec<Elem>,
}

impl Extension {
    pub fn eval(&self, t: &Term<VarId>) -> Elem {
        self.d.eval(t, |v| self.alpha[v.0 as usize])
    }
}

pub fn extend_monotone_map(xp: &VarPoset, d: Arc<OrderedAlgebra>, alpha: Vec<Elem>) -> Result<Extension> {
    if alpha.len() != xp.len() || alpha.iter().any(|&e| e >= d.size()) {
        return Err(Error::Validation("alpha must map every variable into the carrier".into()));
    }
    if let Some((x, y)) = xp.order().pairs().find(|&(x, y)| !d.leq(alpha[x], alpha[y])) {
        let n = |i: usize| xp.names.name(VarId(i as u16)).to_string();
        return Err(Error::NotMonotone(format!("{} <= {} but {} is not <= {}", n(x), n(y), d.elem_name(alpha[x]), d.elem_name(alpha[y]))));
    }
    Ok(Extension { d, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oalg::fixtures::*;
    use crate::term::parse_term;

    #[test]
    fn leafwise_order() {
        let sig = sig1();
        let xp = VarPoset::parse("var x1 x2 x4\nvarorder x1 <= x2", &sig).unwrap();
        let p = |s: &str| parse_term(&sig, &xp, s).unwrap();
        assert!(term_leq(&sig, &xp, &p("f c x1"), &p("f d x2")));
        assert!(!term_leq(&sig, &xp, &p("f d x2"), &p("f c x1")));
        let t = p("f g x2 x1 c f x1 x4");
        assert!(term_leq(&sig, &xp, &t, &t));
        assert!(!term_leq(&sig, &xp, &t, &p("g c f x2 x1 f x1 x4")));
        assert!(!term_leq(&sig, &xp, &p("x1"), &p("c")));
    }

    #[test]
    fn partial_order_depth_two() {
        let sig = sig1();
        let r = verify_partial_order(&sig, &VarPoset::chain(2), 2, Exec::Sequential);
        assert!(r.discrepancies.is_empty(), "{:?}", &r.discrepancies[..r.discrepancies.len().min(5)]);
        assert_eq!(r.skeletons, 1 + 2 + 10);
        assert!(r.compat_checks > 0);
    }

    #[test]
    fn antichain_gives_equality() {
        let sig = Signature::parse("op f 2; const c; const d").unwrap();
        let xp = VarPoset::antichain(&["x", "y"]).unwrap();
        let r = verify_partial_order(&sig, &xp, 1, Exec::Sequential);
        assert!(r.discrepancies.is_empty());
        let labs = labels(&sig, &xp);
        let shape = &regular_shapes(&sig, 1)[0];
        let ts = labelings(shape, &labs);
        for s in &ts {
            for t in &ts {
                assert_eq!(term_leq(&sig, &xp, s, t), s == t);
            }
        }
    }

    #[test]
    fn single_variable_no_ops() {
        let sig = Signature::parse("const c").unwrap();
        let xp = VarPoset::antichain(&["x"]).unwrap();
        let r = verify_partial_order(&sig, &xp, 2, Exec::Sequential);
        assert!(r.discrepancies.is_empty());
        assert_eq!(r.terms, 2);
    }

    #[test]
    fn extension_into_ch3() {
        let d = Arc::new(ch3());
        let sig = d.sig().clone();
        let xp = VarPoset::chain(2);
        let beta = extend_monotone_map(&xp, d.clone(), vec![0, 1]).unwrap();
        let t = parse_term(&sig, &xp, "g x1 c x2").unwrap();
        assert_eq!(beta.eval(&t), 1);
        assert_eq!(beta.eval(&parse_term(&sig, &xp, "f x1 d").unwrap()), 2);
        assert!(matches!(extend_monotone_map(&xp, d, vec![1, 0]), Err(Error::NotMonotone(_))));
        let one = Arc::new(crate::oalg::product(&sig, &[]).unwrap());
        let b = extend_monotone_map(&xp, one, vec![0, 0]).unwrap();
        assert_eq!(b.eval(&t), 0);
    }
}
