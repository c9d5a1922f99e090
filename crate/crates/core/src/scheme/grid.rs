use std::ops::Range;

use crate::amalgam::{Amalgam, XLeaf, XTerm};
use crate::error::{Error, Result};

use super::{leaf_tag, ColTag, Scheme, Step};

/// How consecutive grid rows are related.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Edge {
    /// Leafwise `≤`.
    Leq,
    /// One tag per column; a single-slot `H′` step has one non-`I` column.
    Rel(Vec<ColTag>),
}

/// Leaf rows of a run of equal-skeleton terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    /// The first term; later rows are its skeleton relabelled.
    pub shape: XTerm,
    pub rows: Vec<Vec<XLeaf>>,
    /// `edges[j]` relates `rows[j]` and `rows[j + 1]`.
    pub edges: Vec<Edge>,
}

impl Grid {
    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, a: usize) -> Vec<XLeaf> {
        self.rows.iter().map(|r| r[a]).collect()
    }

    /// Rows that are the right end of a relation edge (the primed `p_i(u_i′)`).
    pub fn primed(&self) -> Vec<bool> {
        let mut out = vec![false; self.rows.len()];
        for (j, e) in self.edges.iter().enumerate() {
            if matches!(e, Edge::Rel(_)) {
                out[j + 1] = true;
            }
        }
        out
    }

    pub fn row_term(&self, j: usize) -> XTerm {
        self.shape.with_leaves(&self.rows[j])
    }
}

/// Grid of the terms from the left end of step `range.start` to the right end of step `range.end - 1`.
pub fn build_grid(am: &Amalgam, sch: &Scheme, range: Range<usize>) -> Result<Grid> {
    if range.end > sch.steps.len() || range.start > range.end {
        return Err(Error::IndexOutOfRange { index: range.end, len: sch.steps.len() });
    }
    let shape = if range.start == 0 { sch.start.clone() } else { sch.steps[range.start - 1].rhs() };
    let mut rows = vec![shape.leaves().0];
    let mut edges = Vec::new();
    for (i, step) in sch.steps[range.clone()].iter().enumerate() {
        let rhs = step.rhs();
        if !rhs.same_skeleton(&shape) {
            return Err(Error::SkeletonMismatch(format!("step {} changes the skeleton", range.start + i + 1)));
        }
        let l = rows.last().unwrap().clone();
        let r = rhs.leaves().0;
        let edge = match step {
            Step::Leq { .. } => Edge::Leq,
            Step::Par { cols, .. } => Edge::Rel(cols.clone()),
            Step::Rel { .. } => {
                let cols: Option<Vec<ColTag>> = l.iter().zip(&r).map(|(&a, &b)| leaf_tag(am, a, b)).collect();
                match cols {
                    Some(c) if step.tag().is_some_and(|t| !t.is_eval()) => Edge::Rel(c),
                    _ => return Err(Error::SkeletonMismatch(format!("step {} is not an H' step", range.start + i + 1))),
                }
            }
        };
        edges.push(edge);
        rows.push(r);
    }
    Ok(Grid { shape, rows, edges })
}

/// `(a, b, tag)` for one column: `top ≤ a`, `(a, b) ∈ tag`, `b ≤ bottom`.
fn contract_column(am: &Amalgam, col: &[XLeaf], edges: &[Edge], a: usize) -> Result<(XLeaf, XLeaf, ColTag)> {
    let top = col[0];
    let bottom = *col.last().unwrap();
    let last_flip = edges
        .iter()
        .enumerate()
        .filter_map(|(j, e)| match e {
            Edge::Rel(c) if c[a] != ColTag::I => Some((j, c[a])),
            _ => None,
        })
        .next_back();
    let flips = edges.iter().filter(|e| matches!(e, Edge::Rel(c) if c[a] != ColTag::I)).count();
    let (x, y, tag) = match last_flip {
        Some((k, tag)) if flips % 2 == 1 => (col[k], col[k + 1], tag),
        _ => (bottom, bottom, ColTag::I),
    };
    if !am.leaf_leq(top, x) || !am.leaf_leq(y, bottom) {
        return Err(Error::NotApplicable(format!("column {} cannot be contracted without transport between the copies", a + 1)));
    }
    Ok((x, y, tag))
}

/// Replaces steps `range` (equal skeletons, only `≼` and `H′ ∪ H′⁻¹ ∪ I` steps) by `≼ · ⇉ · ≼`.
///
/// Columns with an even number of flips collapse to the diagonal; with an odd number the last
/// flip is kept. Both use that the two copies are related by `ν`, so trivial pieces are dropped
/// and a segment without surviving flips becomes one inequality.
pub fn grid_contract(am: &Amalgam, sch: &Scheme, range: Range<usize>) -> Result<Scheme> {
    let g = build_grid(am, sch, range.clone()).map_err(|e| match e {
        Error::SkeletonMismatch(m) => Error::NotApplicable(m),
        e => e,
    })?;
    let mut top = Vec::with_capacity(g.width());
    let mut bottom = Vec::with_capacity(g.width());
    let mut cols = Vec::with_capacity(g.width());
    for a in 0..g.width() {
        let (x, y, tag) = contract_column(am, &g.column(a), &g.edges, a)?;
        top.push(x);
        bottom.push(y);
        cols.push(tag);
    }
    let first = g.row_term(0);
    let last = g.row_term(g.height() - 1);
    let p = g.shape.with_leaves(&top);
    let q = g.shape.with_leaves(&bottom);
    let mut seg = Vec::new();
    if cols.iter().all(|&c| c == ColTag::I) {
        if first != last {
            seg.push(Step::Leq { lhs: first, rhs: last });
        }
    } else {
        if first != p {
            seg.push(Step::Leq { lhs: first, rhs: p.clone() });
        }
        seg.push(Step::Par { lhs: p, rhs: q.clone(), cols });
        if q != last {
            seg.push(Step::Leq { lhs: q, rhs: last });
        }
    }
    let mut out = sch.clone();
    out.steps.splice(range, seg);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The left subterm strictly contains the right one.
    Covers,
    CoveredBy,
    /// Same subterm.
    Proper,
    Disjoint,
    /// Spans that overlap without nesting; impossible for subterms of one skeleton.
    PartialOverlap,
}

/// Relative position of two subterms of one skeleton, with their 1-based leaf spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Covering {
    pub verdict: Verdict,
    pub left: (usize, usize),
    pub right: (usize, usize),
}

/// Compares the subterms at token positions `left` and `right` of `shape`.
///
/// Nesting is decided on token spans, so a unary chain `g(g(x))` distinguishes its two
/// subterms even though they have the same leaves.
pub fn covering(shape: &XTerm, left: usize, right: usize) -> Covering {
    let le = shape.subterm_end(left);
    let re = shape.subterm_end(right);
    let leaf_span = |s: usize, e: usize| {
        let before = shape.leaves_before(s);
        (before + 1, before + (shape.leaves_before(e) - before))
    };
    let verdict = if left == right {
        Verdict::Proper
    } else if left <= right && re <= le {
        Verdict::Covers
    } else if right <= left && le <= re {
        Verdict::CoveredBy
    } else if le <= right || re <= left {
        Verdict::Disjoint
    } else {
        Verdict::PartialOverlap
    };
    Covering { verdict, left: leaf_span(left, le), right: leaf_span(right, re) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{make_special, SpecialAmalgam};
    use crate::closure::Translation;
    use crate::oalg::fixtures::ch3;
    use crate::scheme::{validate_scheme, RelTag};
    use std::sync::Arc;

    fn sp() -> SpecialAmalgam {
        make_special(Arc::new(ch3()), &[]).unwrap()
    }

    fn flip(am: &Amalgam, t: &XTerm, leaf: usize, tag: RelTag) -> Step {
        let pos = t.leaf_position(leaf).unwrap();
        let from = t.subterm(pos);
        let crate::term::Leaf::Var(x) = from.as_leaf().unwrap() else { panic!() };
        let to = crate::amalgam::xleaf(x.side.other(), x.e());
        let _ = am;
        Step::Rel { tag, p: Translation::from_context(t, pos), from, to }
    }

    #[test]
    fn one_row_and_mismatch() {
        let sp = sp();
        let am = &sp.am;
        let t = am.parse_term("f e0@1 e1@1").unwrap();
        let sch = Scheme::empty(t.clone());
        let g = build_grid(am, &sch, 0..0).unwrap();
        assert_eq!((g.height(), g.width()), (1, 2));
        let v = am.parse_term("e1@1").unwrap();
        let bad = Scheme {
            start: t.clone(),
            steps: vec![Step::Rel { tag: RelTag::R(crate::amalgam::Side::One), p: Translation::identity(), from: t, to: v }],
        };
        assert!(matches!(build_grid(am, &bad, 0..1), Err(Error::SkeletonMismatch(_))));
    }

    #[test]
    fn two_flips_give_three_rows() {
        let sp = sp();
        let am = &sp.am;
        let t0 = am.parse_term("f e0@1 e1@1").unwrap();
        let s1 = flip(am, &t0, 1, RelTag::H);
        let t1 = s1.rhs();
        let t2 = am.parse_term("f e2@2 e1@1").unwrap();
        let sch = Scheme { start: t0, steps: vec![s1, Step::Leq { lhs: t1, rhs: t2 }] };
        assert!(validate_scheme(am, &sch).is_empty());
        let g = build_grid(am, &sch, 0..2).unwrap();
        assert_eq!((g.height(), g.width()), (3, 2));
        assert_eq!(g.edges[0], Edge::Rel(vec![ColTag::H, ColTag::I]));
        assert_eq!(g.primed(), vec![false, true, false]);
    }

    #[test]
    fn even_column_contracts_to_diagonal() {
        let sp = sp();
        let am = &sp.am;
        let t0 = am.parse_term("f e0@1 e1@1").unwrap();
        let s1 = flip(am, &t0, 1, RelTag::H);
        let t1 = s1.rhs();
        let t1r = am.parse_term("f e2@2 e1@1").unwrap();
        let s3 = flip(am, &t1r, 1, RelTag::HInv);
        let end = s3.rhs();
        let sch = Scheme { start: t0.clone(), steps: vec![s1, Step::Leq { lhs: t1, rhs: t1r }, s3] };
        assert!(validate_scheme(am, &sch).is_empty());
        let out = grid_contract(am, &sch, 0..3).unwrap();
        assert!(validate_scheme(am, &out).is_empty(), "{:?}", validate_scheme(am, &out));
        assert_eq!(out.steps, vec![Step::Leq { lhs: t0, rhs: end }]);
    }

    #[test]
    fn odd_column_keeps_last_flip() {
        let sp = sp();
        let am = &sp.am;
        let t0 = am.parse_term("f e0@1 e1@1").unwrap();
        let s1 = flip(am, &t0, 1, RelTag::H);
        let t1 = s1.rhs();
        let t1r = am.parse_term("f e2@2 e1@1").unwrap();
        let s3 = flip(am, &t1r, 1, RelTag::HInv);
        let t3 = s3.rhs();
        let s4 = flip(am, &t3, 1, RelTag::H);
        let sch = Scheme { start: t0.clone(), steps: vec![s1, Step::Leq { lhs: t1, rhs: t1r }, s3, s4] };
        assert!(validate_scheme(am, &sch).is_empty());
        let out = grid_contract(am, &sch, 0..4).unwrap();
        assert!(validate_scheme(am, &out).is_empty(), "{:?}", validate_scheme(am, &out));
        assert_eq!(out.end(), sch.end());
        let pars: Vec<_> = out.steps.iter().filter(|s| matches!(s, Step::Par { .. })).collect();
        assert_eq!(pars.len(), 1);
        let Step::Par { lhs, rhs, cols } = pars[0] else { unreachable!() };
        assert_eq!(cols, &vec![ColTag::H, ColTag::I]);
        assert_eq!(am.show(lhs), "f e2@1 e1@1");
        assert_eq!(am.show(rhs), "f e2@2 e1@1");
    }

    #[test]
    fn covering_verdicts() {
        let sp = sp();
        let t = sp.am.parse_term("f f e0@1 g e1@1 e2@1 e0@1 e1@1").unwrap();
        // positions: 0 f, 1 f, 2 e0, 3 g, 4 e1, 5 e2, 6 e0, 7 e1
        assert_eq!(covering(&t, 3, 3).verdict, Verdict::Proper);
        let c = covering(&t, 1, 3);
        assert_eq!(c.verdict, Verdict::Covers);
        assert_eq!((c.left, c.right), ((1, 4), (2, 4)));
        assert_eq!(covering(&t, 5, 1).verdict, Verdict::CoveredBy);
        assert_eq!(covering(&t, 2, 3).verdict, Verdict::Disjoint);
        assert_eq!(covering(&t, 1, 7).verdict, Verdict::Disjoint);
    }
}
