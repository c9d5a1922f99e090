use super::{pushout_equal, Budget, EqOutcome, SearchStats, Side, SpecialAmalgam};
use crate::error::{Error, Result};
use crate::oalg::Elem;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominionStatus {
    InC,
    /// No scheme joins `α1(x)` and `α2(x)` within the budget.
    NoWitnessFound(SearchStats),
}

#[derive(Clone, Debug)]
pub struct DominionReport {
    /// One entry per element of the base algebra, in carrier order.
    pub entries: Vec<(Elem, DominionStatus)>,
}

impl DominionReport {
    /// Elements reported in the dominion.
    pub fn elements(&self) -> Vec<Elem> {
        self.entries.iter().filter(|(_, s)| *s == DominionStatus::InC).map(|(x, _)| *x).collect()
    }
}

/// Classifies every element of the base: members of `C` are in the dominion; for the
/// others the copies `α1(x)`, `α2(x)` are searched for a common pushout class, which
/// must not be found.
pub fn dominion_special(sp: &SpecialAmalgam, budget: &Budget) -> Result<DominionReport> {
    let mut entries = Vec::new();
    for x in 0..sp.base.size() {
        if sp.in_c(x) {
            entries.push((x, DominionStatus::InC));
            continue;
        }
        let s = Term::var(sp.alpha(Side::One, x));
        let t = Term::var(sp.alpha(Side::Two, x));
        match pushout_equal(&sp.am, &s, &t, budget)? {
            EqOutcome::Unknown(st) => entries.push((x, DominionStatus::NoWitnessFound(st))),
            EqOutcome::Proven(..) => {
                return Err(Error::TheoremContradiction(format!(
                    "{} is outside C but its two copies are equal in the pushout",
                    sp.base.elem_name(x)
                )))
            }
        }
    }
    Ok(DominionReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::make_special;
    use crate::oalg::fixtures::{ch3, chain, sig1};
    use std::sync::Arc;

    #[test]
    fn ch3_over_constants() {
        let sp = make_special(Arc::new(ch3()), &[0, 2]).unwrap();
        let rep = dominion_special(&sp, &Budget::new(4, 2)).unwrap();
        assert_eq!(rep.elements(), vec![0, 2]);
        assert!(matches!(rep.entries[1].1, DominionStatus::NoWitnessFound(_)));
    }

    #[test]
    fn whole_carrier_and_one_element() {
        let sp = make_special(Arc::new(ch3()), &[1]).unwrap();
        assert_eq!(dominion_special(&sp, &Budget::default()).unwrap().elements(), vec![0, 1, 2]);
        let sp = make_special(Arc::new(chain(&sig1(), 1, "ONE")), &[]).unwrap();
        assert_eq!(dominion_special(&sp, &Budget::default()).unwrap().elements(), vec![0]);
    }
}
