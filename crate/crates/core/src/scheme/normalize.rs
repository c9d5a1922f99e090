use crate::amalgam::{Amalgam, Side, XLabel, XTerm};
use crate::closure::Translation;
use crate::error::{Error, Result};
use crate::oalg::Elem;
use crate::term::{Leaf, Term};

use super::grid::{covering, grid_contract, Verdict};
use super::rewrite::{push_r_left, push_rinv_right};
use super::{leaf_tag, validate_scheme, ColTag, RelTag, Scheme, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Simplify,
    GridContract,
    Lemma3,
    Lemma4,
    /// Disjoint inner terms, `R⁻¹` left of `R`: the tags are swapped.
    Case2a,
    /// Disjoint inner terms, `R⁻¹` right of `R`.
    Case2aDual,
    /// Same inner term: both tags vanish.
    Case2b,
    /// The `R⁻¹` term strictly contains the `R` term, both on one side.
    Case2cSame,
    /// The `R⁻¹` term strictly contains the `R` term, on different sides.
    Case2cCross,
    Case2dSame,
    Case2dCross,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub rule: Rule,
    /// Step index the rule was applied at.
    pub at: usize,
    pub len: usize,
    /// `(R/R⁻¹ steps, nodes under R tags)` after the rule.
    pub measure: (usize, usize),
}

/// A scheme all of whose terms are single nodes, with only `≼`, `H′`, `H′⁻¹` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case1Scheme(Scheme);

impl Case1Scheme {
    pub fn new(am: &Amalgam, sch: Scheme) -> Result<Self> {
        let errs = validate_scheme(am, &sch);
        if !errs.is_empty() {
            return Err(Error::Validation(errs.join("; ")));
        }
        if let Some(t) = sch.terms().iter().find(|t| !t.is_leaf()) {
            return Err(Error::Validation(format!("{} has more than one node", am.show(t))));
        }
        if let Some(s) =
            sch.steps.iter().find(|s| !matches!(s, Step::Leq { .. } | Step::Rel { tag: RelTag::H | RelTag::HInv | RelTag::I, .. }))
        {
            return Err(Error::Validation(format!("step {s:?} is not allowed in a Case 1 scheme")));
        }
        Ok(Case1Scheme(sch))
    }

    pub fn scheme(&self) -> &Scheme {
        &self.0
    }

    pub fn into_scheme(self) -> Scheme {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct Stuck {
    pub residual: Scheme,
    pub reason: String,
    pub trace: Vec<TraceEntry>,
}

#[derive(Clone, Debug)]
pub enum NormalizeOutcome {
    Case1 { scheme: Case1Scheme, trace: Vec<TraceEntry> },
    Stuck(Stuck),
}

impl NormalizeOutcome {
    pub fn case1(&self) -> Option<&Case1Scheme> {
        match self {
            NormalizeOutcome::Case1 { scheme, .. } => Some(scheme),
            NormalizeOutcome::Stuck(_) => None,
        }
    }

    pub fn trace(&self) -> &[TraceEntry] {
        match self {
            NormalizeOutcome::Case1 { trace, .. } => trace,
            NormalizeOutcome::Stuck(s) => &s.trace,
        }
    }
}

fn note(trace: &mut Vec<TraceEntry>, rule: Rule, at: usize, s: &Scheme) {
    trace.push(TraceEntry { rule, at, len: s.len(), measure: s.eval_measure() });
}

fn stuck(residual: Scheme, reason: String, trace: Vec<TraceEntry>) -> Result<NormalizeOutcome> {
    Ok(NormalizeOutcome::Stuck(Stuck { residual, reason, trace }))
}

fn inconsistent<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::WitnessInconsistency(msg.into()))
}

/// The `⇉` step between equal-skeleton terms, with column tags read off the leaves.
fn par(am: &Amalgam, lhs: XTerm, rhs: XTerm) -> Result<Option<Step>> {
    if lhs == rhs {
        return Ok(None);
    }
    if !lhs.same_skeleton(&rhs) {
        return inconsistent(format!("{} and {} differ in skeleton", am.show(&lhs), am.show(&rhs)));
    }
    let cols: Option<Vec<ColTag>> = lhs.leaves().0.iter().zip(&rhs.leaves().0).map(|(&a, &b)| leaf_tag(am, a, b)).collect();
    match cols {
        Some(cols) => Ok(Some(Step::Par { lhs, rhs, cols })),
        None => inconsistent(format!("{} and {} are not related leafwise", am.show(&lhs), am.show(&rhs))),
    }
}

fn value_leaf(am: &Amalgam, t: &XTerm, side: Side) -> Result<XTerm> {
    match am.value(t, side) {
        Some(v) => Ok(Term::var(XLabel::new(side, v))),
        None => inconsistent(format!("{} is not a term over A{}", am.show(t), side.number())),
    }
}

fn rel(tag: RelTag, host: &XTerm, pos: usize, from: XTerm, to: XTerm) -> Step {
    Step::Rel { tag, p: Translation::from_context(host, pos), from, to }
}

/// The adjacent core `T0 →R⁻¹ T1 [⇉ T2] →R T3`, read off a scheme.
struct Core {
    t0: XTerm,
    t1: XTerm,
    t2: XTerm,
    t3: XTerm,
    i: Side,
    j: Side,
    p1: usize,
    p2: usize,
    inner1: XTerm,
    inner2: XTerm,
}

fn core(steps: &[Step]) -> Option<Core> {
    let (first, last) = (steps.first()?, steps.last()?);
    let Step::Rel { tag: RelTag::RInv(i), p: pa, from: v_i, to: inner1 } = first else { return None };
    let Step::Rel { tag: RelTag::R(j), p: pb, from: inner2, .. } = last else { return None };
    Some(Core {
        t0: pa.apply(v_i),
        t1: first.rhs(),
        t2: last.lhs(),
        t3: last.rhs(),
        i: *i,
        j: *j,
        p1: pa.hole_position(),
        p2: pb.hole_position(),
        inner1: inner1.clone(),
        inner2: inner2.clone(),
    })
}

/// Case 2c: the `R⁻¹` term strictly contains the `R` term.
fn covers(am: &Amalgam, c: &Core) -> Result<(Rule, Vec<Step>)> {
    let v_i = value_leaf(am, &c.inner1, c.i)?;
    let w = value_leaf(am, &c.t1.subterm(c.p2), c.i)?;
    let shrunk = c.inner1.replace(c.p2 - c.p1, &w);
    let mut out = Vec::new();
    let rule = if c.i == c.j {
        let m1 = c.t2.replace(c.p1, &v_i);
        let m2 = c.t2.replace(c.p1, &shrunk);
        out.extend(par(am, c.t0.clone(), m1.clone())?);
        out.push(rel(RelTag::RInv(c.i), &m1, c.p1, v_i, shrunk));
        out.extend(par(am, m2, c.t3.clone())?);
        Rule::Case2cSame
    } else {
        let m = c.t0.replace(c.p1, &shrunk);
        out.push(rel(RelTag::RInv(c.i), &c.t0, c.p1, v_i, shrunk));
        out.extend(par(am, m, c.t3.clone())?);
        Rule::Case2cCross
    };
    Ok((rule, out))
}

fn reverse(steps: &[Step]) -> Vec<Step> {
    steps.iter().rev().map(|s| s.reversed().expect("relation steps reverse")).collect()
}

/// Rewrites `R⁻¹ [⇉] R` so that the pair is swapped or at least one tag disappears.
fn resolve(am: &Amalgam, seg: &[Step]) -> Result<(Rule, Vec<Step>)> {
    let Some(c) = core(seg) else { return inconsistent("segment is not R^-1 [=>] R") };
    if !c.t1.same_skeleton(&c.t2) {
        return inconsistent("the terms around the parallel step differ in skeleton");
    }
    match covering(&c.t1, c.p1, c.p2).verdict {
        Verdict::Disjoint => {
            let v_i = Term::var(match c.t0.subterm(c.p1).as_leaf() {
                Some(Leaf::Var(x)) => x,
                _ => return inconsistent("R^-1 starts from a non-element"),
            });
            let v_j = value_leaf(am, &c.inner2, c.j)?;
            let len1 = c.inner1.len();
            let len2 = c.inner2.len();
            let (p2m, p1m) = if c.p1 < c.p2 { (c.p2 + 1 - len1, c.p1) } else { (c.p2, c.p1 + 1 - len2) };
            let m1 = c.t2.replace(c.p1, &v_i);
            let m2 = m1.replace(p2m, &v_j);
            let m3 = m2.replace(p1m, &c.inner1);
            if m1.subterm(p2m) != c.inner2 {
                return inconsistent("R term moved while swapping");
            }
            let mut out = Vec::new();
            out.extend(par(am, c.t0.clone(), m1.clone())?);
            out.push(rel(RelTag::R(c.j), &m1, p2m, c.inner2.clone(), v_j));
            out.push(rel(RelTag::RInv(c.i), &m2, p1m, v_i, c.inner1.clone()));
            out.extend(par(am, m3, c.t3.clone())?);
            Ok((if c.p1 < c.p2 { Rule::Case2a } else { Rule::Case2aDual }, out))
        }
        Verdict::Proper => Ok((Rule::Case2b, par(am, c.t0.clone(), c.t3.clone())?.into_iter().collect())),
        Verdict::Covers => covers(am, &c),
        Verdict::CoveredBy => {
            let rev = reverse(seg);
            let Some(rc) = core(&rev) else { return inconsistent("reversed segment lost its shape") };
            let (rule, steps) = covers(am, &rc)?;
            let rule = if rule == Rule::Case2cSame { Rule::Case2dSame } else { Rule::Case2dCross };
            Ok((rule, reverse(&steps)))
        }
        Verdict::PartialOverlap => Err(Error::TheoremContradiction("inner terms of one skeleton overlap partially".into())),
    }
}

/// Drops steps with equal endpoints and merges adjacent inequalities.
fn simplify(sch: &mut Scheme) -> bool {
    let before = sch.steps.len();
    let mut out: Vec<Step> = Vec::with_capacity(before);
    for s in sch.steps.drain(..) {
        if s.is_trivial() {
            continue;
        }
        if let (Some(Step::Leq { rhs, .. }), Step::Leq { rhs: r2, .. }) = (out.last_mut(), &s) {
            *rhs = r2.clone();
            if let Some(Step::Leq { lhs, rhs }) = out.last() {
                if lhs == rhs {
                    out.pop();
                }
            }
            continue;
        }
        out.push(s);
    }
    sch.steps = out;
    sch.steps.len() != before
}

/// Rewrites a scheme between single elements into a Case 1 scheme.
///
/// Each round takes the first `R` step and the nearest `R⁻¹` before it, contracts the `H′`
/// segment between them, moves both next to the `⇉` with the Lemma 3/4 rewrites and resolves
/// the pair by the covering case analysis. Every round lowers the number of `R⁻¹ … R` pairs.
pub fn normalize(am: &Amalgam, sch: &Scheme, max_iters: Option<usize>) -> Result<NormalizeOutcome> {
    let errs = validate_scheme(am, sch);
    if !errs.is_empty() {
        return Err(Error::PreconditionFailed(format!("invalid scheme: {}", errs.join("; "))));
    }
    if !sch.start.is_leaf() || !sch.end().is_leaf() {
        return Err(Error::PreconditionFailed("endpoints must be single elements".into()));
    }
    let cap = max_iters.unwrap_or(10 * sch.len().max(1));
    let mut cur = sch.clone();
    let mut trace = Vec::new();
    if simplify(&mut cur) {
        note(&mut trace, Rule::Simplify, 0, &cur);
    }
    let mut rounds = 0;
    while let Some(l) = cur.steps.iter().position(|s| matches!(s.tag(), Some(RelTag::R(_)))) {
        let Some(k) = cur.steps[..l].iter().rposition(|s| matches!(s.tag(), Some(RelTag::RInv(_)))) else {
            return stuck(cur, format!("step {} is an R step with no R^-1 before it", l + 1), trace);
        };
        if rounds == cap {
            return stuck(cur, format!("iteration cap {cap} reached"), trace);
        }
        rounds += 1;
        let mut next = cur.clone();
        let mut l = l;
        let mut k = k;
        let mut applied = Vec::new();
        let lone_leq = l == k + 2 && matches!(next.steps[k + 1], Step::Leq { .. });
        if l > k + 1 && !lone_leq {
            let before = next.len();
            next = match grid_contract(am, &next, k + 1..l) {
                Ok(s) => s,
                Err(e) => return stuck(cur, format!("grid contraction failed: {e}"), trace),
            };
            l = l + next.len() - before;
            applied.push((Rule::GridContract, k + 1, next.clone()));
        }
        if matches!(next.steps[k + 1], Step::Leq { .. }) {
            next = match push_rinv_right(am, &next, k) {
                Ok(s) => s,
                Err(e) => return stuck(cur, format!("lemma 3 failed: {e}"), trace),
            };
            applied.push((Rule::Lemma3, k, next.clone()));
            k += 1;
        }
        if l > k + 1 && matches!(next.steps[l - 1], Step::Leq { .. }) {
            next = match push_r_left(am, &next, l) {
                Ok(s) => s,
                Err(e) => return stuck(cur, format!("lemma 4 failed: {e}"), trace),
            };
            applied.push((Rule::Lemma4, l, next.clone()));
            l -= 1;
        }
        let seg = next.steps[k..=l].to_vec();
        let (rule, rewritten) = match resolve(am, &seg) {
            Ok(r) => r,
            Err(e @ Error::TheoremContradiction(_)) => return Err(e),
            Err(e) => return stuck(cur, format!("no rule for the pair at steps {}..{}: {e}", k + 1, l + 1), trace),
        };
        next.steps.splice(k..=l, rewritten);
        applied.push((rule, k, next.clone()));
        for (rule, at, s) in applied {
            let errs = validate_scheme(am, &s);
            if !errs.is_empty() {
                return stuck(cur, format!("{rule:?} produced an invalid scheme: {}", errs.join("; ")), trace);
            }
            note(&mut trace, rule, at, &s);
        }
        cur = next;
        if simplify(&mut cur) {
            note(&mut trace, Rule::Simplify, 0, &cur);
        }
    }
    if let Some(k) = cur.steps.iter().position(|s| matches!(s.tag(), Some(RelTag::RInv(_)))) {
        return stuck(cur, format!("step {} is an R^-1 step with no R after it", k + 1), trace);
    }
    let mut flat = Scheme::empty(cur.start.clone());
    for s in &cur.steps {
        match s {
            Step::Par { lhs, rhs, cols } if lhs.is_leaf() => {
                if cols[0] != ColTag::I {
                    flat.push(Step::Rel { tag: cols[0].rel(), p: Translation::identity(), from: lhs.clone(), to: rhs.clone() });
                }
            }
            other => flat.push(other.clone()),
        }
    }
    match Case1Scheme::new(am, flat) {
        Ok(c1) => Ok(NormalizeOutcome::Case1 { scheme: c1, trace }),
        Err(e) => stuck(cur, format!("no R steps left but the scheme is not Case 1: {e}"), trace),
    }
}

/// The `z ∈ C` with `x = φ1(z)` and `y = φ2(z)`, from Case 1 schemes `x → y` and `y → x`.
///
/// All values are carried to `A1` by `ν⁻¹`; both chains then run between `x` and `ν⁻¹(y)`
/// and collapse by antisymmetry.
pub fn extract_center(am: &Amalgam, fwd: &Case1Scheme, rev: Option<&Case1Scheme>) -> Result<Elem> {
    let Some(rev) = rev else {
        return Err(Error::NotClosedChain("the reverse scheme is missing".into()));
    };
    if !am.is_special() {
        return Err(Error::PreconditionFailed("transport by ν needs a special amalgam".into()));
    }
    let (f, r) = (fwd.scheme(), rev.scheme());
    if f.start != r.end() || f.end() != r.start {
        return Err(Error::NotClosedChain("the schemes do not run between the same endpoints".into()));
    }
    let elem = |t: &XTerm| match t.as_leaf() {
        Some(Leaf::Var(x)) => Ok(x),
        _ => Err(Error::NotClosedChain(format!("{} is not an element", am.show(t)))),
    };
    let x = elem(&f.start)?;
    let y = elem(&f.end())?;
    if x.side == y.side {
        return Err(Error::NotClosedChain("endpoints lie in the same copy".into()));
    }
    let base = am.alg(Side::One);
    let mut vals = Vec::new();
    for t in f.terms().iter().chain(r.terms().iter()) {
        vals.push(elem(t)?.e());
    }
    if let Some(v) = vals.iter().find(|&&v| v != x.e()) {
        let (a, b) = (base.elem_name(x.e()), base.elem_name(*v));
        return Err(Error::NotClosedChain(format!("chain does not collapse: {a} and {b} differ after transport")));
    }
    let z = am.phi_inverse(x.side, x.e()).ok_or_else(|| Error::NotClosedChain(format!("{} is not in the image of C", am.label_name(x))))?;
    if am.phi(y.side, z) != y.e() {
        return Err(Error::NotClosedChain("endpoints are not images of one element of C".into()));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{make_special, SpecialAmalgam};
    use crate::oalg::fixtures::ch3;
    use crate::scheme::parse_scheme;
    use std::sync::Arc;

    fn sp() -> SpecialAmalgam {
        make_special(Arc::new(ch3()), &[]).unwrap()
    }

    fn run(sp: &SpecialAmalgam, text: &str) -> (Scheme, Case1Scheme, Vec<TraceEntry>) {
        let am = &sp.am;
        let sch = parse_scheme(am, text).unwrap();
        assert!(validate_scheme(am, &sch).is_empty(), "{:?}", validate_scheme(am, &sch));
        let out = normalize(am, &sch, None).unwrap();
        let NormalizeOutcome::Case1 { scheme, trace } = out else { panic!("stuck: {out:?}") };
        assert_eq!(scheme.scheme().start, sch.start);
        assert_eq!(scheme.scheme().end(), sch.end());
        let mut count = sch.eval_measure().0;
        for e in &trace {
            assert!(e.measure.0 <= count, "{trace:?}");
            count = e.measure.0;
        }
        (sch, scheme, trace)
    }

    fn rules(trace: &[TraceEntry]) -> Vec<Rule> {
        trace.iter().map(|e| e.rule).filter(|r| *r != Rule::Simplify).collect()
    }

    #[test]
    fn case1_is_unchanged() {
        let sp = sp();
        let text = "START e0@1\nREL H' z1 1 e0@1 -> e0@2\n";
        let (sch, c1, trace) = run(&sp, text);
        assert_eq!(c1.scheme(), &sch);
        assert!(trace.is_empty());
    }

    #[test]
    fn lemma3_then_case2b() {
        let sp = sp();
        let text = "\
START e1@1
INEQ e1@1 <= e2@1
REL R1^-1 z1 1 e2@1 -> f e0@1 e2@1
INEQ f e0@1 e2@1 <= f e1@1 e2@1
REL R1 z1 1 f e1@1 e2@1 -> e2@1
REL H' z1 1 e2@1 -> e2@2
";
        let (_, c1, trace) = run(&sp, text);
        assert_eq!(rules(&trace), vec![Rule::Lemma3, Rule::Case2b]);
        assert_eq!(sp.am.show(&c1.scheme().terms()[1]), "e2@1");
        assert_eq!(c1.scheme().len(), 2);
    }

    #[test]
    fn nested_same_side_case2c() {
        let sp = sp();
        let text = "\
START e2@1
REL R1^-1 z1 1 e2@1 -> f e0@1 f e0@1 e2@1
REL R1 f z1 z2 2 e0@1 f e0@1 e2@1 -> e2@1
REL R1 z1 1 f e0@1 e2@1 -> e2@1
REL H' z1 1 e2@1 -> e2@2
";
        let (sch, _, trace) = run(&sp, text);
        assert_eq!(rules(&trace), vec![Rule::Case2cSame, Rule::Case2b]);
        let first = trace.iter().find(|e| e.rule == Rule::Case2cSame).unwrap();
        assert!(first.measure.1 < sch.eval_measure().1);
    }

    #[test]
    fn nested_cross_side_case2c() {
        let sp = sp();
        let text = "\
START e2@1
REL R1^-1 z1 1 e2@1 -> f e0@1 f e0@1 e2@1
REL H' f z1 f z2 z3 1 e0@1 e2@1 e0@1 -> e0@2
REL H' f z1 f z2 z3 2 e0@2 e2@1 e0@1 -> e0@2
REL H' f z1 f z2 z3 3 e0@2 e0@2 e2@1 -> e2@2
REL R2 f z1 z2 2 e0@2 f e0@2 e2@2 -> e2@2
REL R2 z1 1 f e0@2 e2@2 -> e2@2
";
        let (_, c1, trace) = run(&sp, text);
        let r = rules(&trace);
        assert_eq!(r[0], Rule::GridContract);
        assert!(r.contains(&Rule::Case2cCross), "{r:?}");
        assert_eq!(*r.last().unwrap(), Rule::Case2b);
        assert!(c1.scheme().steps.iter().all(|s| s.tag() == Some(RelTag::H)));
    }

    #[test]
    fn disjoint_pair_swaps() {
        let sp = sp();
        let text = "\
START e2@1
REL R1^-1 z1 1 e2@1 -> f e2@1 e2@1
REL R1^-1 f z1 z2 1 e2@1 e2@1 -> f e0@1 e2@1
REL R1^-1 f f z1 z2 z3 3 e0@1 e2@1 e2@1 -> f e0@1 e2@1
REL R1 f z1 f z2 z3 1 e0@1 e2@1 f e0@1 e2@1 -> e2@1
REL R1 f z1 z2 2 e2@1 f e0@1 e2@1 -> e2@1
REL R1 z1 1 f e2@1 e2@1 -> e2@1
REL H' z1 1 e2@1 -> e2@2
";
        let (_, _, trace) = run(&sp, text);
        let r = rules(&trace);
        assert_eq!(r[0], Rule::Case2aDual);
        assert_eq!(r.iter().filter(|&&x| x == Rule::Case2b).count(), 3);
    }

    #[test]
    fn covered_pair_is_case2d() {
        let sp = sp();
        let text = "\
START e2@1
REL R1^-1 z1 1 e2@1 -> f e2@1 e2@1
REL R1^-1 f z1 z2 1 e2@1 e2@1 -> f e0@1 e2@1
REL R1 z1 1 f f e0@1 e2@1 e2@1 -> e2@1
REL H' z1 1 e2@1 -> e2@2
";
        let (_, _, trace) = run(&sp, text);
        assert_eq!(rules(&trace), vec![Rule::Case2dSame, Rule::Case2b]);
    }

    #[test]
    fn unmatched_r_is_stuck_and_bad_input_refused() {
        let sp = sp();
        let am = &sp.am;
        let sch = parse_scheme(am, "START e1@1\nINEQ e1@1 <= e2@1\n").unwrap();
        assert!(normalize(am, &sch, None).unwrap().case1().is_some());
        let bad = parse_scheme(am, "START e2@1\nINEQ e2@1 <= e1@1\n").unwrap();
        assert!(matches!(normalize(am, &bad, None), Err(Error::PreconditionFailed(_))));
        let open = parse_scheme(am, "START e2@1\nREL R1^-1 z1 1 e2@1 -> f e0@1 e2@1\n").unwrap();
        assert!(matches!(normalize(am, &open, None), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn iteration_cap_gives_stuck() {
        let sp = sp();
        let text = "\
START e2@1
REL R1^-1 z1 1 e2@1 -> f e0@1 e2@1
REL R1 z1 1 f e0@1 e2@1 -> e2@1
REL H' z1 1 e2@1 -> e2@2
";
        let sch = parse_scheme(&sp.am, text).unwrap();
        let NormalizeOutcome::Stuck(s) = normalize(&sp.am, &sch, Some(0)).unwrap() else { panic!() };
        assert!(s.reason.contains("cap"));
    }

    #[test]
    fn centers() {
        let sp = sp();
        let am = &sp.am;
        let c1 = |t: &str| Case1Scheme::new(am, parse_scheme(am, t).unwrap()).unwrap();
        let f = c1("REL H' z1 1 e0@1 -> e0@2");
        let r = c1("REL H'^-1 z1 1 e0@2 -> e0@1");
        assert_eq!(extract_center(am, &f, Some(&r)).unwrap(), 0);
        // `d` is interpreted by e2, the second element of C.
        let f = c1("REL H' z1 1 e2@1 -> e2@2");
        let r = c1("REL H'^-1 z1 1 e2@2 -> e2@1");
        assert_eq!(extract_center(am, &f, Some(&r)).unwrap(), 1);
        assert!(matches!(extract_center(am, &f, None), Err(Error::NotClosedChain(_))));
        let up = c1("START e0@1\nINEQ e0@1 <= e2@1\nREL H' z1 1 e2@1 -> e2@2");
        let down = c1("REL H'^-1 z1 1 e2@2 -> e2@1");
        assert!(matches!(extract_center(am, &up, Some(&down)), Err(Error::NotClosedChain(_))));
    }
}
