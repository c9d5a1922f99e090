//! Zigzag schemes over an amalgam: steps, validation, the `.scheme` line format,
//! the grid representation and the normalization engine.

mod format;
mod grid;
mod normalize;
mod rewrite;

pub use format::{parse_scheme, print_scheme};
pub use grid::{build_grid, covering, grid_contract, Covering, Edge, Grid, Verdict};
pub use normalize::{extract_center, normalize, Case1Scheme, NormalizeOutcome, Rule, Stuck, TraceEntry};
pub use rewrite::{push_r_left, push_rinv_right};

use crate::amalgam::{Amalgam, Side, XLabel, XLeaf, XTerm};
use crate::closure::Translation;
use crate::term::Leaf;

/// Relation tag of a single translated step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelTag {
    /// `(t, t^{A_i})` with `t ∈ T(A_i)`.
    R(Side),
    RInv(Side),
    /// `(φ1(c), φ2(c))`.
    H,
    HInv,
    /// Diagonal on `A1 ∪̇ A2`.
    I,
}

impl RelTag {
    pub fn inverse(self) -> RelTag {
        match self {
            RelTag::R(s) => RelTag::RInv(s),
            RelTag::RInv(s) => RelTag::R(s),
            RelTag::H => RelTag::HInv,
            RelTag::HInv => RelTag::H,
            RelTag::I => RelTag::I,
        }
    }

    pub fn is_eval(self) -> bool {
        matches!(self, RelTag::R(_) | RelTag::RInv(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            RelTag::R(Side::One) => "R1",
            RelTag::R(Side::Two) => "R2",
            RelTag::RInv(Side::One) => "R1^-1",
            RelTag::RInv(Side::Two) => "R2^-1",
            RelTag::H => "H'",
            RelTag::HInv => "H'^-1",
            RelTag::I => "I",
        }
    }

    pub fn from_name(s: &str) -> Option<RelTag> {
        Some(match s {
            "R1" => RelTag::R(Side::One),
            "R2" => RelTag::R(Side::Two),
            "R1^-1" => RelTag::RInv(Side::One),
            "R2^-1" => RelTag::RInv(Side::Two),
            "H'" => RelTag::H,
            "H'^-1" => RelTag::HInv,
            "I" => RelTag::I,
            _ => return None,
        })
    }
}

/// Per-column tag of a parallel step `⇉`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColTag {
    H,
    HInv,
    I,
}

impl ColTag {
    pub fn name(self) -> &'static str {
        match self {
            ColTag::H => "H'",
            ColTag::HInv => "H'^-1",
            ColTag::I => "I",
        }
    }

    pub fn from_name(s: &str) -> Option<ColTag> {
        Some(match s {
            "H'" => ColTag::H,
            "H'^-1" => ColTag::HInv,
            "I" => ColTag::I,
            _ => return None,
        })
    }

    pub fn rel(self) -> RelTag {
        match self {
            ColTag::H => RelTag::H,
            ColTag::HInv => RelTag::HInv,
            ColTag::I => RelTag::I,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// `lhs ≼ rhs`.
    Leq { lhs: XTerm, rhs: XTerm },
    /// `p(from) → p(to)` with `(from, to)` in the tagged relation.
    Rel { tag: RelTag, p: Translation<XLeaf>, from: XTerm, to: XTerm },
    /// `q(u1..uk) ⇉ q(u1'..uk')`, one tag per leaf.
    Par { lhs: XTerm, rhs: XTerm, cols: Vec<ColTag> },
}

impl Step {
    pub fn lhs(&self) -> XTerm {
        match self {
            Step::Leq { lhs, .. } | Step::Par { lhs, .. } => lhs.clone(),
            Step::Rel { p, from, .. } => p.apply(from),
        }
    }

    pub fn rhs(&self) -> XTerm {
        match self {
            Step::Leq { rhs, .. } | Step::Par { rhs, .. } => rhs.clone(),
            Step::Rel { p, to, .. } => p.apply(to),
        }
    }

    pub fn tag(&self) -> Option<RelTag> {
        match self {
            Step::Rel { tag, .. } => Some(*tag),
            _ => None,
        }
    }

    pub fn is_eval(&self) -> bool {
        self.tag().is_some_and(RelTag::is_eval)
    }

    /// A step whose endpoints coincide.
    pub fn is_trivial(&self) -> bool {
        match self {
            Step::Leq { lhs, rhs } | Step::Par { lhs, rhs, .. } => lhs == rhs,
            Step::Rel { from, to, .. } => from == to,
        }
    }

    /// The step read backwards, where that is again a step.
    pub fn reversed(&self) -> Option<Step> {
        match self {
            Step::Leq { lhs, rhs } => (lhs == rhs).then(|| Step::Leq { lhs: rhs.clone(), rhs: lhs.clone() }),
            Step::Rel { tag, p, from, to } => Some(Step::Rel { tag: tag.inverse(), p: p.clone(), from: to.clone(), to: from.clone() }),
            Step::Par { lhs, rhs, cols } => Some(Step::Par {
                lhs: rhs.clone(),
                rhs: lhs.clone(),
                cols: cols
                    .iter()
                    .map(|c| match c {
                        ColTag::H => ColTag::HInv,
                        ColTag::HInv => ColTag::H,
                        ColTag::I => ColTag::I,
                    })
                    .collect(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    pub start: XTerm,
    pub steps: Vec<Step>,
}

impl Scheme {
    pub fn empty(start: XTerm) -> Self {
        Scheme { start, steps: Vec::new() }
    }

    pub fn end(&self) -> XTerm {
        self.steps.last().map_or_else(|| self.start.clone(), Step::rhs)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of translated relation steps (inequalities excluded).
    pub fn rel_len(&self) -> usize {
        self.steps.iter().filter(|s| !matches!(s, Step::Leq { .. })).count()
    }

    /// All terms along the scheme, starting with `start`.
    pub fn terms(&self) -> Vec<XTerm> {
        let mut out = vec![self.start.clone()];
        out.extend(self.steps.iter().map(Step::rhs));
        out
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    /// Counts `R`/`R⁻¹` steps and the operation symbols in their inner terms.
    pub fn eval_measure(&self) -> (usize, usize) {
        let mut count = 0;
        let mut nodes = 0;
        for s in &self.steps {
            if let Step::Rel { tag: RelTag::R(_), from, .. } | Step::Rel { tag: RelTag::RInv(_), to: from, .. } = s {
                count += 1;
                nodes += from.len();
            }
        }
        (count, nodes)
    }

    /// Pairs `(i, j)`, `i < j`, with step `i` tagged `R⁻¹` and step `j` tagged `R`.
    pub fn inversions(&self) -> usize {
        let mut seen = 0;
        let mut inv = 0;
        for s in &self.steps {
            match s.tag() {
                Some(RelTag::RInv(_)) => seen += 1,
                Some(RelTag::R(_)) => inv += seen,
                _ => {}
            }
        }
        inv
    }

    /// The `.scheme` rendering.
    pub fn show(&self, am: &Amalgam) -> String {
        print_scheme(am, self)
    }
}

pub(crate) fn leaf_tag(am: &Amalgam, a: XLeaf, b: XLeaf) -> Option<ColTag> {
    if a == b {
        return Some(ColTag::I);
    }
    let (Leaf::Var(x), Leaf::Var(y)) = (a, b) else { return None };
    if x.side == y.side {
        return None;
    }
    let c = am.phi_inverse(x.side, x.e())?;
    if am.phi(y.side, c) != y.e() {
        return None;
    }
    Some(if x.side == Side::One { ColTag::H } else { ColTag::HInv })
}

/// Checks that `(from, to)` lies in the tagged relation.
pub fn in_relation(am: &Amalgam, tag: RelTag, from: &XTerm, to: &XTerm) -> Result<(), String> {
    let show = |t: &XTerm| am.show(t);
    match tag {
        RelTag::R(side) | RelTag::RInv(side) => {
            let (t, v) = if matches!(tag, RelTag::R(_)) { (from, to) } else { (to, from) };
            let Some(val) = am.value(t, side) else {
                return Err(format!("{} is not a term over A{}", show(t), side.number()));
            };
            if v.as_leaf() != Some(Leaf::Var(XLabel::new(side, val))) {
                return Err(format!("{} is not the value of {} in A{}", show(v), show(t), side.number()));
            }
            Ok(())
        }
        RelTag::H | RelTag::HInv | RelTag::I => {
            let (Some(a), Some(b)) = (from.as_leaf(), to.as_leaf()) else {
                return Err(format!("{} -> {} is not a pair of elements", show(from), show(to)));
            };
            let want = match tag {
                RelTag::H => ColTag::H,
                RelTag::HInv => ColTag::HInv,
                _ => ColTag::I,
            };
            if want == ColTag::I && !matches!(a, Leaf::Var(_)) {
                return Err(format!("{} is not an element of A1 or A2", show(from)));
            }
            if leaf_tag(am, a, b) != Some(want) {
                return Err(format!("({}, {}) is not in {}", show(from), show(to), tag.name()));
            }
            Ok(())
        }
    }
}

fn check_step(am: &Amalgam, step: &Step) -> Result<(), String> {
    match step {
        Step::Leq { lhs, rhs } => {
            if am.term_leq(lhs, rhs) {
                Ok(())
            } else {
                Err(format!("{} is not below {}", am.show(lhs), am.show(rhs)))
            }
        }
        Step::Rel { tag, from, to, .. } => in_relation(am, *tag, from, to),
        Step::Par { lhs, rhs, cols } => {
            if !lhs.same_skeleton(rhs) {
                return Err(format!("{} and {} have different skeletons", am.show(lhs), am.show(rhs)));
            }
            let (l, r) = (lhs.leaves(), rhs.leaves());
            if cols.len() != l.len() {
                return Err(format!("{} column tags for {} leaves", cols.len(), l.len()));
            }
            for (k, tag) in cols.iter().enumerate() {
                let (a, b) = (l.0[k], r.0[k]);
                if leaf_tag(am, a, b) != Some(*tag) {
                    return Err(format!("column {}: ({}, {}) is not in {}", k + 1, am.show_leaf(a), am.show_leaf(b), tag.name()));
                }
            }
            Ok(())
        }
    }
}

/// Every violated invariant of a scheme; empty means a valid certificate.
pub fn validate_scheme(am: &Amalgam, sch: &Scheme) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = sch.start.clone();
    for (i, step) in sch.steps.iter().enumerate() {
        let lhs = step.lhs();
        if lhs != cur {
            out.push(format!("step {}: starts at {} but the previous term is {}", i + 1, am.show(&lhs), am.show(&cur)));
        }
        if let Err(e) = check_step(am, step) {
            out.push(format!("step {}: {e}", i + 1));
        }
        cur = step.rhs();
    }
    out
}

/// Validates and checks both endpoints.
pub fn check_certificate(am: &Amalgam, sch: &Scheme, s: &XTerm, t: &XTerm) -> Vec<String> {
    let mut out = validate_scheme(am, sch);
    if &sch.start != s {
        out.push(format!("scheme starts at {}, expected {}", am.show(&sch.start), am.show(s)));
    }
    let end = sch.end();
    if &end != t {
        out.push(format!("scheme ends at {}, expected {}", am.show(&end), am.show(t)));
    }
    out
}
