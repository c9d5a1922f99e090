use std::collections::HashSet;

use super::{xleaf, Amalgam, Side, XLabel, XLeaf, XTerm};
use crate::closure::Translation;
use crate::error::{Error, Result};
use crate::oalg::{for_each_tuple, Elem};
use crate::scheme::{check_certificate, RelTag, Scheme, Step};
use crate::term::{Leaf, Term, Tok};

/// Limits for one scheme search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximal number of translated relation steps.
    pub max_scheme_len: usize,
    /// Maximal number of operation symbols in any term along the scheme.
    pub max_term_ops: usize,
    /// Cap on distinct terms visited per direction; hitting it makes the search incomplete.
    pub max_states: usize,
    /// On special amalgams, drop terms `w` with `ν̄0(w) ≰ ν̄0(t)`.
    pub prune: bool,
}

impl Budget {
    pub fn new(max_scheme_len: usize, max_term_ops: usize) -> Self {
        Budget { max_scheme_len, max_term_ops, max_states: 1 << 22, prune: false }
    }

    pub fn pruned(self) -> Self {
        Budget { prune: true, ..self }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(8, 3)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Distinct terms reached, summed over the deepening rounds.
    pub states: usize,
    /// Terms whose moves were generated.
    pub expanded: usize,
    /// Deepest completed layer (relation steps) of the last round.
    pub depth: usize,
    /// Terms cut by the `ν̄0` bound.
    pub pruned: usize,
    /// The state cap was hit, so the budget was not searched exhaustively.
    pub truncated: bool,
    /// The reachable space ran out before the length bound in the last round.
    pub saturated: bool,
}

impl SearchStats {
    fn absorb(&mut self, o: &SearchStats) {
        self.states += o.states;
        self.expanded += o.expanded;
        self.depth = self.depth.max(o.depth);
        self.pruned += o.pruned;
        self.truncated |= o.truncated;
        self.saturated = o.saturated;
    }
}

#[derive(Clone, Debug)]
pub enum LeqOutcome {
    /// A validated scheme from `s` to `t`.
    Proven(Scheme),
    Unknown(SearchStats),
}

impl LeqOutcome {
    pub fn proven(&self) -> Option<&Scheme> {
        match self {
            LeqOutcome::Proven(s) => Some(s),
            LeqOutcome::Unknown(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum EqOutcome {
    /// Schemes for `s ≤ t` and `t ≤ s`.
    Proven(Scheme, Scheme),
    Unknown(SearchStats),
}

impl EqOutcome {
    pub fn proven(&self) -> Option<(&Scheme, &Scheme)> {
        match self {
            EqOutcome::Proven(a, b) => Some((a, b)),
            EqOutcome::Unknown(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
enum Move {
    /// `R_i` on the subterm at `pos`.
    Collapse { pos: usize, side: Side, val: Elem },
    /// Raise the leaf at `pos` to `φ_side(c)` and cross with `H′` or `H′⁻¹`.
    Flip { pos: usize, side: Side, c: Elem },
    /// Raise the leaf at `pos` to `val` and unfold it by `R_i⁻¹`.
    Expand { pos: usize, side: Side, val: Elem, term: XTerm },
}

/// Precomputed unfoldings: for each side and element `e`, the minimal constants and
/// one-operation terms over `A_i ∪ F₀` whose value is at least `e`.
struct Unfoldings {
    by: [Vec<Vec<(Elem, XTerm)>>; 2],
    flips: [Vec<Vec<Elem>>; 2],
}

impl Unfoldings {
    fn new(am: &Amalgam) -> Self {
        let sig = am.sig();
        let consts: Vec<_> = sig.constants().collect();
        let by = Side::BOTH.map(|side| {
            let a = am.alg(side);
            let mut labels: Vec<XLeaf> = (0..a.size()).map(|e| Leaf::Var(XLabel::new(side, e))).collect();
            labels.extend(consts.iter().map(|&c| Leaf::Const(c)));
            let val = |l: XLeaf| match l {
                Leaf::Var(x) => x.e(),
                Leaf::Const(c) => a.const_val(c),
            };
            (0..a.size())
                .map(|e| {
                    let mut out: Vec<(Elem, XTerm)> = Vec::new();
                    for &c in &consts {
                        let v = a.const_val(c);
                        let dominated = consts.iter().any(|&d| d != c && sig.const_leq(d, c) && a.leq(e, a.const_val(d)));
                        if a.leq(e, v) && !dominated {
                            out.push((v, Term::constant(c)));
                        }
                    }
                    for (f, k) in sig.operations() {
                        let mut ups: Vec<Vec<XLeaf>> = Vec::new();
                        let mut args = Vec::with_capacity(k);
                        for_each_tuple(labels.len(), k, |ix| {
                            args.clear();
                            args.extend(ix.iter().map(|&i| val(labels[i])));
                            if a.leq(e, a.apply(f, &args)) {
                                ups.push(ix.iter().map(|&i| labels[i]).collect());
                            }
                        });
                        let below = |x: &[XLeaf], y: &[XLeaf]| x != y && x.iter().zip(y).all(|(&p, &q)| am.leaf_leq(p, q));
                        for u in &ups {
                            if ups.iter().any(|w| below(w, u)) {
                                continue;
                            }
                            let children: Vec<XTerm> = u.iter().map(|&l| Term::leaf(l)).collect();
                            let t = Term::node(f, &children);
                            let v = a.eval(&t, |x| x.e());
                            out.push((v, t));
                        }
                    }
                    out
                })
                .collect()
        });
        let flips = Side::BOTH.map(|side| (0..am.alg(side).size()).map(|e| am.minimal_flips(side, e)).collect());
        Unfoldings { by, flips }
    }
}

/// Values of every subterm of `w` in `A1` and `A2`, `None` where the subterm leaves that side.
fn subterm_values(am: &Amalgam, w: &XTerm) -> Vec<[Option<Elem>; 2]> {
    let toks = w.toks();
    let mut out = vec![[None, None]; toks.len()];
    let mut stack: Vec<[Option<Elem>; 2]> = Vec::new();
    let mut args = Vec::new();
    for pos in (0..toks.len()).rev() {
        let v = match toks[pos] {
            Tok::Var(x) => {
                let mut v = [None, None];
                v[x.side.index()] = Some(x.e());
                v
            }
            Tok::Const(c) => Side::BOTH.map(|s| Some(am.alg(s).const_val(c))),
            Tok::Op(f, k) => {
                let kids = stack.split_off(stack.len() - k as usize);
                Side::BOTH.map(|s| {
                    args.clear();
                    for kid in kids.iter().rev() {
                        args.push(kid[s.index()]?);
                    }
                    Some(am.alg(s).apply(f, &args))
                })
            }
        };
        out[pos] = v;
        stack.push(v);
    }
    out
}

fn moves(am: &Amalgam, unf: &Unfoldings, w: &XTerm, max_ops: usize) -> Vec<(Move, XTerm)> {
    let toks = w.toks();
    let vals = subterm_values(am, w);
    let mut out = Vec::new();
    for side in Side::BOTH {
        for pos in 0..toks.len() {
            if matches!(toks[pos], Tok::Var(_)) {
                continue;
            }
            if let Some(val) = vals[pos][side.index()] {
                let next = w.replace(pos, &xleaf(side, val));
                out.push((Move::Collapse { pos, side, val }, next));
            }
        }
    }
    for side in Side::BOTH {
        for (pos, tok) in toks.iter().enumerate() {
            let Tok::Var(x) = *tok else { continue };
            if x.side != side {
                continue;
            }
            for &c in &unf.flips[side.index()][x.e()] {
                let next = w.replace(pos, &xleaf(side.other(), am.phi(side.other(), c)));
                out.push((Move::Flip { pos, side, c }, next));
            }
        }
    }
    let ops = w.op_count();
    for (pos, tok) in toks.iter().enumerate() {
        let Tok::Var(x) = *tok else { continue };
        for (val, term) in &unf.by[x.side.index()][x.e()] {
            if ops + term.op_count() > max_ops {
                continue;
            }
            let next = w.replace(pos, term);
            out.push((Move::Expand { pos, side: x.side, val: *val, term: term.clone() }, next));
        }
    }
    out
}

fn leaf_at(w: &XTerm, pos: usize) -> XTerm {
    w.subterm(pos)
}

fn push_leq(steps: &mut Vec<Step>, lhs: &XTerm, rhs: &XTerm) {
    if lhs == rhs {
        return;
    }
    if let Some(Step::Leq { rhs: r, .. }) = steps.last_mut() {
        *r = rhs.clone();
        return;
    }
    steps.push(Step::Leq { lhs: lhs.clone(), rhs: rhs.clone() });
}

fn steps_of(am: &Amalgam, w: &XTerm, m: &Move, steps: &mut Vec<Step>) {
    match m {
        Move::Collapse { pos, side, val } => {
            let p = Translation::from_context(w, *pos);
            steps.push(Step::Rel { tag: RelTag::R(*side), p, from: leaf_at(w, *pos), to: xleaf(*side, *val) });
        }
        Move::Flip { pos, side, c } => {
            let from = xleaf(*side, am.phi(*side, *c));
            let raised = w.replace(*pos, &from);
            push_leq(steps, w, &raised);
            let tag = if *side == Side::One { RelTag::H } else { RelTag::HInv };
            let to = xleaf(side.other(), am.phi(side.other(), *c));
            steps.push(Step::Rel { tag, p: Translation::from_context(w, *pos), from, to });
        }
        Move::Expand { pos, side, val, term } => {
            let from = xleaf(*side, *val);
            let raised = w.replace(*pos, &from);
            push_leq(steps, w, &raised);
            steps.push(Step::Rel { tag: RelTag::RInv(*side), p: Translation::from_context(w, *pos), from, to: term.clone() });
        }
    }
}

struct Node {
    term: XTerm,
    parent: usize,
    mv: Option<Move>,
}

fn rebuild(am: &Amalgam, nodes: &[Node], goal: usize, t: &XTerm) -> Scheme {
    let mut chain = Vec::new();
    let mut k = goal;
    while let Some(m) = &nodes[k].mv {
        chain.push((nodes[k].parent, m));
        k = nodes[k].parent;
    }
    chain.reverse();
    let mut steps = Vec::new();
    for (parent, m) in chain {
        steps_of(am, &nodes[parent].term, m, &mut steps);
    }
    push_leq(&mut steps, &nodes[goal].term, t);
    Scheme { start: nodes[0].term.clone(), steps }
}

fn bfs(am: &Amalgam, unf: &Unfoldings, s: &XTerm, t: &XTerm, budget: &Budget, max_ops: usize) -> (Option<Scheme>, SearchStats) {
    let mut stats = SearchStats::default();
    let bound = (budget.prune && am.is_special()).then(|| {
        let a = am.alg(Side::One);
        let top = a.eval(t, |x| x.e());
        move |w: &XTerm| a.leq(a.eval(w, |x| x.e()), top)
    });
    let mut nodes = vec![Node { term: s.clone(), parent: 0, mv: None }];
    let mut seen: HashSet<XTerm> = HashSet::new();
    seen.insert(s.clone());
    stats.states = 1;
    if am.term_leq(s, t) {
        return (Some(rebuild(am, &nodes, 0, t)), stats);
    }
    let mut layer = vec![0usize];
    for depth in 1..=budget.max_scheme_len {
        let mut next_layer = Vec::new();
        for &k in &layer {
            stats.expanded += 1;
            let w = nodes[k].term.clone();
            for (m, next) in moves(am, unf, &w, max_ops) {
                if seen.contains(&next) {
                    continue;
                }
                if let Some(ok) = &bound {
                    if !ok(&next) {
                        stats.pruned += 1;
                        continue;
                    }
                }
                if seen.len() >= budget.max_states {
                    stats.truncated = true;
                    return (None, stats);
                }
                seen.insert(next.clone());
                stats.states += 1;
                let goal = am.term_leq(&next, t);
                nodes.push(Node { term: next, parent: k, mv: Some(m) });
                if goal {
                    return (Some(rebuild(am, &nodes, nodes.len() - 1, t)), stats);
                }
                next_layer.push(nodes.len() - 1);
            }
        }
        stats.depth = depth;
        if next_layer.is_empty() {
            stats.saturated = true;
            break;
        }
        layer = next_layer;
    }
    (None, stats)
}

/// Searches for a scheme witnessing `s ≤ t` in the pushout, deepening the term-size
/// bound and searching breadth-first by the number of relation steps.
pub fn pushout_leq(am: &Amalgam, s: &XTerm, t: &XTerm, budget: &Budget) -> Result<LeqOutcome> {
    let mut stats = SearchStats::default();
    let lo = s.op_count().max(t.op_count());
    if lo > budget.max_term_ops {
        return Ok(LeqOutcome::Unknown(stats));
    }
    let unf = Unfoldings::new(am);
    for ops in lo..=budget.max_term_ops {
        let (found, st) = bfs(am, &unf, s, t, budget, ops);
        stats.absorb(&st);
        if let Some(sch) = found {
            let errs = check_certificate(am, &sch, s, t);
            if !errs.is_empty() {
                return Err(Error::WitnessInconsistency(errs.join("; ")));
            }
            return Ok(LeqOutcome::Proven(sch));
        }
        if st.truncated {
            break;
        }
    }
    Ok(LeqOutcome::Unknown(stats))
}

/// Both directions of [`pushout_leq`].
pub fn pushout_equal(am: &Amalgam, s: &XTerm, t: &XTerm, budget: &Budget) -> Result<EqOutcome> {
    let fwd = match pushout_leq(am, s, t, budget)? {
        LeqOutcome::Proven(sch) => sch,
        LeqOutcome::Unknown(st) => return Ok(EqOutcome::Unknown(st)),
    };
    match pushout_leq(am, t, s, budget)? {
        LeqOutcome::Proven(rev) => Ok(EqOutcome::Proven(fwd, rev)),
        LeqOutcome::Unknown(st) => Ok(EqOutcome::Unknown(st)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::make_special;
    use crate::oalg::fixtures::ch3;
    use crate::scheme::validate_scheme;
    use std::sync::Arc;

    fn sp() -> crate::amalgam::SpecialAmalgam {
        make_special(Arc::new(ch3()), &[]).unwrap()
    }

    #[test]
    fn reflexive_is_empty_scheme() {
        let sp = sp();
        let am = &sp.am;
        let s = am.parse_term("f e1@1 e2@2").unwrap();
        let LeqOutcome::Proven(sch) = pushout_leq(am, &s, &s, &Budget::default()).unwrap() else { panic!() };
        assert!(sch.is_empty());
    }

    #[test]
    fn single_h_step() {
        let sp = sp();
        let am = &sp.am;
        let (s, t) = (am.parse_term("e0@1").unwrap(), am.parse_term("e0@2").unwrap());
        let LeqOutcome::Proven(sch) = pushout_leq(am, &s, &t, &Budget::default()).unwrap() else { panic!() };
        assert_eq!(sch.len(), 1);
        assert_eq!(sch.steps[0].tag(), Some(RelTag::H));
    }

    #[test]
    fn evaluation_pair_both_ways() {
        let sp = sp();
        let am = &sp.am;
        let (s, t) = (am.parse_term("f e0@1 e2@1").unwrap(), am.parse_term("e2@1").unwrap());
        let EqOutcome::Proven(fwd, rev) = pushout_equal(am, &s, &t, &Budget::default()).unwrap() else { panic!() };
        assert_eq!(fwd.len(), 1);
        assert_eq!(fwd.steps[0].tag(), Some(RelTag::R(Side::One)));
        assert_eq!(rev.len(), 1);
        assert_eq!(rev.steps[0].tag(), Some(RelTag::RInv(Side::One)));
        assert!(validate_scheme(am, &rev).is_empty());
    }

    #[test]
    fn middle_element_stays_unknown() {
        let sp = sp();
        let am = &sp.am;
        let (s, t) = (am.parse_term("e1@1").unwrap(), am.parse_term("e1@2").unwrap());
        for b in [Budget::new(4, 2), Budget::new(6, 3).pruned()] {
            let LeqOutcome::Unknown(st) = pushout_leq(am, &s, &t, &b).unwrap() else { panic!() };
            assert!(st.states > 1 && !st.truncated);
        }
    }

    #[test]
    fn leq_with_raise() {
        let sp = sp();
        let am = &sp.am;
        // e1@1 <= e2@1 -> e2@2: one raise and one flip.
        let (s, t) = (am.parse_term("e1@1").unwrap(), am.parse_term("e2@2").unwrap());
        let LeqOutcome::Proven(sch) = pushout_leq(am, &s, &t, &Budget::default()).unwrap() else { panic!() };
        assert_eq!(sch.rel_len(), 1);
        assert!(matches!(sch.steps[0], Step::Leq { .. }));
    }
}
