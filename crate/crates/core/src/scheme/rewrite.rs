use crate::amalgam::{Amalgam, XLabel};
use crate::closure::Translation;
use crate::error::{Error, Result};
use crate::term::Term;

use super::{RelTag, Scheme, Step};

fn na<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::NotApplicable(msg.into()))
}

/// Moves the `R⁻¹` step `i` to the right of the inequality that follows it.
///
/// `p1(u1) → p1(v1) ≼ W` becomes `p1(u1) ≼ p2(u2) → p2(v2) = W`, where `v2` is the subterm of
/// `W` at the hole and `u2` its value.
pub fn push_rinv_right(am: &Amalgam, sch: &Scheme, i: usize) -> Result<Scheme> {
    let Some(Step::Rel { tag: RelTag::RInv(side), p, from, .. }) = sch.steps.get(i) else {
        return na(format!("step {} is not tagged R^-1", i + 1));
    };
    let Some(Step::Leq { rhs: w, .. }) = sch.steps.get(i + 1) else {
        return na(format!("step {} is not followed by an inequality", i + 1));
    };
    let pos = p.hole_position();
    let v2 = w.subterm(pos);
    let Some(u2) = am.value(&v2, *side) else {
        return na("raised subterm left the algebra");
    };
    let u2 = Term::var(XLabel::new(*side, u2));
    let lower = p.apply(from);
    let mid = w.replace(pos, &u2);
    let mut out = sch.clone();
    out.steps.splice(
        i..i + 2,
        [
            Step::Leq { lhs: lower, rhs: mid },
            Step::Rel { tag: RelTag::RInv(*side), p: Translation::from_context(w, pos), from: u2, to: v2 },
        ],
    );
    Ok(out)
}

/// Moves the `R` step `i` to the left of the inequality that precedes it.
///
/// `W ≼ p2(u2) → p2(v2)` becomes `W = p1(u1) → p1(v1) ≼ p2(v2)`.
pub fn push_r_left(am: &Amalgam, sch: &Scheme, i: usize) -> Result<Scheme> {
    let Some(Step::Rel { tag: RelTag::R(side), p, to, .. }) = sch.steps.get(i) else {
        return na(format!("step {} is not tagged R", i + 1));
    };
    if i == 0 {
        return na("R step has no inequality before it");
    }
    let Some(Step::Leq { lhs: w, .. }) = sch.steps.get(i - 1) else {
        return na(format!("step {} is not preceded by an inequality", i + 1));
    };
    let pos = p.hole_position();
    let u1 = w.subterm(pos);
    let Some(v1) = am.value(&u1, *side) else {
        return na("lowered subterm left the algebra");
    };
    let v1 = Term::var(XLabel::new(*side, v1));
    let upper = p.apply(to);
    let mid = w.replace(pos, &v1);
    let mut out = sch.clone();
    out.steps.splice(
        i - 1..i + 1,
        [Step::Rel { tag: RelTag::R(*side), p: Translation::from_context(w, pos), from: u1, to: v1 }, Step::Leq { lhs: mid, rhs: upper }],
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{make_special, Side};
    use crate::oalg::fixtures::ch3;
    use crate::scheme::validate_scheme;
    use std::sync::Arc;

    fn lemma3_input() -> (crate::amalgam::SpecialAmalgam, Scheme) {
        let sp = make_special(Arc::new(ch3()), &[]).unwrap();
        let am = &sp.am;
        let e2 = am.parse_term("e2@1").unwrap();
        let unfolded = am.parse_term("f e0@1 e2@1").unwrap();
        let raised = am.parse_term("f e2@1 e2@1").unwrap();
        let sch = Scheme {
            start: e2.clone(),
            steps: vec![
                Step::Rel { tag: RelTag::RInv(Side::One), p: Translation::identity(), from: e2, to: unfolded.clone() },
                Step::Leq { lhs: unfolded, rhs: raised },
            ],
        };
        (sp, sch)
    }

    #[test]
    fn rinv_moves_past_raise() {
        let (sp, sch) = lemma3_input();
        let am = &sp.am;
        assert!(validate_scheme(am, &sch).is_empty());
        let out = push_rinv_right(am, &sch, 0).unwrap();
        assert!(validate_scheme(am, &out).is_empty(), "{:?}", validate_scheme(am, &out));
        assert_eq!(out.end(), sch.end());
        assert!(matches!(&out.steps[0], Step::Leq { lhs, rhs } if lhs == rhs));
        let Step::Rel { tag, to, .. } = &out.steps[1] else { panic!() };
        assert_eq!(*tag, RelTag::RInv(Side::One));
        assert_eq!(am.show(to), "f e2@1 e2@1");
    }

    #[test]
    fn identity_raise_is_identity_rewrite() {
        let (sp, mut sch) = lemma3_input();
        let unfolded = sch.steps[0].rhs();
        sch.steps[1] = Step::Leq { lhs: unfolded.clone(), rhs: unfolded };
        let out = push_rinv_right(&sp.am, &sch, 0).unwrap();
        assert_eq!(out.steps[1], sch.steps[0]);
        assert!(out.steps[0].is_trivial());
    }

    #[test]
    fn mirrored_r_moves_before_lowering() {
        let (sp, sch) = lemma3_input();
        let am = &sp.am;
        let low = am.parse_term("f e0@1 e1@1").unwrap();
        let high = am.parse_term("f e0@1 e2@1").unwrap();
        let e2 = am.parse_term("e2@1").unwrap();
        let sch2 = Scheme {
            start: low.clone(),
            steps: vec![
                Step::Leq { lhs: low, rhs: high.clone() },
                Step::Rel { tag: RelTag::R(Side::One), p: Translation::identity(), from: high, to: e2 },
            ],
        };
        assert!(validate_scheme(am, &sch2).is_empty());
        let out = push_r_left(am, &sch2, 1).unwrap();
        assert!(validate_scheme(am, &out).is_empty());
        assert_eq!(am.show(&out.steps[0].rhs()), "e1@1");
        assert_eq!(out.end(), sch2.end());
        assert!(matches!(push_r_left(am, &sch, 0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn wrong_tag_not_applicable() {
        let (sp, mut sch) = lemma3_input();
        let am = &sp.am;
        let a = am.parse_term("e0@1").unwrap();
        let b = am.parse_term("e0@2").unwrap();
        sch.steps[0] = Step::Rel { tag: RelTag::H, p: Translation::identity(), from: a, to: b };
        assert!(matches!(push_rinv_right(am, &sch, 0), Err(Error::NotApplicable(_))));
    }
}
