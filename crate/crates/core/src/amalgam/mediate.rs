use std::sync::Arc;

use super::{Amalgam, Side, XTerm};
use crate::error::{Error, Result};
use crate::oalg::{Elem, Homomorphism, OrderedAlgebra};
use crate::scheme::{Scheme, Step};
use crate::term::Leaf;

/// A commuting pair `γ1: A1 → D`, `γ2: A2 → D` and the induced map `δ` on the pushout.
#[derive(Clone, Debug)]
pub struct Mediator {
    pub d: Arc<OrderedAlgebra>,
    pub gamma: [Vec<Elem>; 2],
}

/// Checks that `γ1, γ2` are homomorphisms with `γ1 ∘ φ1 = γ2 ∘ φ2`.
pub fn mediate(am: &Amalgam, d: Arc<OrderedAlgebra>, gamma1: Vec<Elem>, gamma2: Vec<Elem>) -> Result<Mediator> {
    for (side, g) in [(Side::One, &gamma1), (Side::Two, &gamma2)] {
        let h = Homomorphism::new(am.a[side.index()].clone(), d.clone(), g.clone())?;
        let chk = h.check();
        if !chk.is_hom || !chk.is_monotone {
            return Err(Error::NotAHomomorphism(format!("gamma{} is not a monotone homomorphism", side.number())));
        }
    }
    for c in 0..am.c.size() {
        let (x, y) = (gamma1[am.phi(Side::One, c)], gamma2[am.phi(Side::Two, c)]);
        if x != y {
            return Err(Error::CommutationFailure(format!(
                "gamma1(phi1({c})) = {} but gamma2(phi2({c})) = {}",
                d.elem_name(x),
                d.elem_name(y),
                c = am.c.elem_name(c)
            )));
        }
    }
    Ok(Mediator { d, gamma: [gamma1, gamma2] })
}

impl Mediator {
    /// `β(t)`: the extension of `γ1 ∪̇ γ2` to terms.
    pub fn beta(&self, t: &XTerm) -> Elem {
        self.d.eval(t, |x| self.gamma[x.side.index()][x.e()])
    }

    /// `δ([t]) = β(t)`, evaluated on a representative.
    pub fn delta(&self, t: &XTerm) -> Elem {
        self.beta(t)
    }

    /// `δ ∘ μ_side` on an element of `A_side`.
    pub fn delta_mu(&self, side: Side, e: Elem) -> Elem {
        self.gamma[side.index()][e]
    }

    /// Maps a scheme through `β`: inequality steps must go up in `D`, relation steps
    /// must be equalities. Returns `β(start) ≤ β(end)`.
    pub fn check_scheme(&self, sch: &Scheme) -> Result<(Elem, Elem)> {
        let d = &self.d;
        for (i, step) in sch.steps.iter().enumerate() {
            let (l, r) = (self.beta(&step.lhs()), self.beta(&step.rhs()));
            let ok = match step {
                Step::Leq { .. } => d.leq(l, r),
                Step::Rel { .. } | Step::Par { .. } => l == r,
            };
            if !ok {
                return Err(Error::WitnessInconsistency(format!(
                    "step {} maps to ({}, {}) in {}",
                    i + 1,
                    d.elem_name(l),
                    d.elem_name(r),
                    d.name()
                )));
            }
        }
        let (s, t) = (self.beta(&sch.start), self.beta(&sch.end()));
        if !d.leq(s, t) {
            return Err(Error::WitnessInconsistency("endpoints are not ordered in the codomain".into()));
        }
        Ok((s, t))
    }

    /// Checks both schemes of an equality and returns the common value of `δ`.
    pub fn check_equal(&self, fwd: &Scheme, rev: &Scheme) -> Result<Elem> {
        let (s, t) = self.check_scheme(fwd)?;
        let (t2, s2) = self.check_scheme(rev)?;
        if s != s2 || t != t2 || s != t {
            return Err(Error::WitnessInconsistency("the two schemes give different values".into()));
        }
        Ok(s)
    }

    /// Value of a constant leaf, for completeness of `β` on leaves.
    pub fn leaf_value(&self, l: Leaf<super::XLabel>) -> Elem {
        match l {
            Leaf::Var(x) => self.gamma[x.side.index()][x.e()],
            Leaf::Const(c) => self.d.const_val(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{make_special, pushout_equal, Budget, EqOutcome};
    use crate::oalg::fixtures::{ch3, chain, sig1};

    #[test]
    fn nu0_bar_is_identity_on_copies() {
        let sp = make_special(Arc::new(ch3()), &[]).unwrap();
        let m = sp.nu0_mediator();
        let m = mediate(&sp.am, m.d, m.gamma[0].clone(), m.gamma[1].clone()).unwrap();
        for e in 0..3 {
            assert_eq!(m.delta_mu(Side::One, e), e);
            assert_eq!(m.delta(&super::super::xleaf(Side::One, e)), e);
        }
        let (s, t) = (sp.am.parse_term("f e0@1 e2@1").unwrap(), sp.am.parse_term("e2@2").unwrap());
        let EqOutcome::Proven(f, r) = pushout_equal(&sp.am, &s, &t, &Budget::default()).unwrap() else { panic!() };
        assert_eq!(m.check_equal(&f, &r).unwrap(), 2);
    }

    #[test]
    fn one_element_codomain_is_constant() {
        let sp = make_special(Arc::new(ch3()), &[]).unwrap();
        let one = Arc::new(chain(&sig1(), 1, "ONE"));
        let m = mediate(&sp.am, one, vec![0; 3], vec![0; 3]).unwrap();
        assert_eq!(m.delta(&sp.am.parse_term("g e1@1 e2@2 d").unwrap()), 0);
    }

    #[test]
    fn non_commuting_pair() {
        // Over C = A, both maps are homomorphisms but they disagree on e1.
        let sp = make_special(Arc::new(ch3()), &[1]).unwrap();
        let two = Arc::new(chain(&sig1(), 2, "CH2"));
        assert!(mediate(&sp.am, two.clone(), vec![0, 0, 1], vec![0, 0, 1]).is_ok());
        let err = mediate(&sp.am, two, vec![0, 0, 1], vec![0, 1, 1]).unwrap_err();
        assert!(matches!(err, Error::CommutationFailure(_)), "{err:?}");
    }
}
