use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::oalg::{Elem, OrderedAlgebra};
use crate::signature::{Signature, Sym};
use crate::term::{is_regular, Formal, Leaf, Notation, Term, Tok, Z};

/// A unary polynomial `p(u) = t(a1, .., u, .., an)` given by a constant-free regular
/// template, the 1-based slot of `u`, and fillers for the remaining leaves in order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Translation<F> {
    template: Term<Z>,
    slot: usize,
    fillers: Vec<F>,
}

impl<F: Clone> Translation<F> {
    pub fn identity() -> Self {
        Translation { template: Term::var(Z(1)), slot: 1, fillers: Vec::new() }
    }

    pub fn new(template: Term<Z>, slot: usize, fillers: Vec<F>) -> Result<Self> {
        let n = is_regular(&template).ok_or_else(|| Error::Validation("translation template is not regular".into()))?;
        if slot == 0 || slot > n {
            return Err(Error::IndexOutOfRange { index: slot, len: n });
        }
        if fillers.len() != n - 1 {
            return Err(Error::Validation(format!("template of arity {n} needs {} fillers", n - 1)));
        }
        Ok(Translation { template, slot, fillers })
    }

    pub fn template(&self) -> &Term<Z> {
        &self.template
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn fillers(&self) -> &[F] {
        &self.fillers
    }

    pub fn arity(&self) -> usize {
        self.fillers.len() + 1
    }

    pub fn op_count(&self) -> usize {
        self.template.op_count()
    }

    pub fn is_identity(&self) -> bool {
        self.template.is_leaf()
    }

    /// Filler for leaf `k` (1-based, `k != slot`).
    fn filler(&self, k: usize) -> &F {
        &self.fillers[if k < self.slot { k - 1 } else { k - 2 }]
    }

    /// `q ∘ self` where `q(u) = f(before.., u, after..)`.
    pub fn wrap(&self, f: Sym, before: &[F], after: &[F]) -> Translation<F> {
        let k = before.len() + 1 + after.len();
        let mut toks = vec![Tok::Op(f, k as u8)];
        toks.extend(std::iter::repeat_n(Tok::Var(Z(0)), before.len()));
        toks.extend_from_slice(self.template.toks());
        toks.extend(std::iter::repeat_n(Tok::Var(Z(0)), after.len()));
        let template = Term::from_toks(toks).regularize().0;
        let mut fillers = before.to_vec();
        fillers.extend_from_slice(&self.fillers);
        fillers.extend_from_slice(after);
        Translation { template, slot: before.len() + self.slot, fillers }
    }

    pub fn display(&self, sig: &Signature, filler: impl Fn(&F) -> String) -> String {
        let mut s = self.template.display(sig, &Formal, Notation::Prefix);
        let _ = write!(s, " {}", self.slot);
        for f in &self.fillers {
            let _ = write!(s, " {}", filler(f));
        }
        s
    }
}

impl Translation<Elem> {
    /// `p(u)` in a finite algebra.
    pub fn eval(&self, a: &OrderedAlgebra, u: Elem) -> Elem {
        a.eval(&self.template, |Z(k)| if k as usize == self.slot { u } else { *self.filler(k as usize) })
    }
}

impl<V: Copy + Eq> Translation<Leaf<V>> {
    /// `p(u)` in the term algebra.
    pub fn apply(&self, u: &Term<V>) -> Term<V> {
        let mut toks = Vec::with_capacity(self.template.len() + u.len());
        for t in self.template.toks() {
            match *t {
                Tok::Op(f, k) => toks.push(Tok::Op(f, k)),
                Tok::Const(c) => toks.push(Tok::Const(c)),
                Tok::Var(Z(k)) => {
                    if k as usize == self.slot {
                        toks.extend_from_slice(u.toks());
                    } else {
                        toks.push((*self.filler(k as usize)).into());
                    }
                }
            }
        }
        Term::from_toks(toks)
    }

    /// The translation whose hole is the subterm of `t` at token `pos`.
    pub fn from_context(t: &Term<V>, pos: usize) -> Translation<Leaf<V>> {
        let end = t.subterm_end(pos);
        let mut toks = Vec::with_capacity(t.len() - (end - pos) + 1);
        let mut fillers = Vec::new();
        let mut slot = 0;
        let mut k = 0u32;
        let mut i = 0;
        while i < t.len() {
            if i == pos {
                k += 1;
                slot = k as usize;
                toks.push(Tok::Var(Z(k)));
                i = end;
                continue;
            }
            match t.toks()[i] {
                Tok::Op(f, a) => toks.push(Tok::Op(f, a)),
                other => {
                    k += 1;
                    toks.push(Tok::Var(Z(k)));
                    fillers.push(other.as_leaf().unwrap());
                }
            }
            i += 1;
        }
        Translation { template: Term::from_toks(toks), slot, fillers }
    }

    /// Token position of the hole in `p(u)`.
    pub fn hole_position(&self) -> usize {
        self.template.leaf_position(self.slot).expect("slot within template")
    }

    pub fn map_fillers<W: Copy + Eq>(&self, f: impl Fn(Leaf<V>) -> Leaf<W>) -> Translation<Leaf<W>> {
        Translation { template: self.template.clone(), slot: self.slot, fillers: self.fillers.iter().map(|&l| f(l)).collect() }
    }
}
