//! Amalgams `(C; A1, A2; φ1, φ2)`, pushout queries by scheme search, special amalgams,
//! dominions, separators and epimorphism checks.

mod dominion;
mod format;
mod mediate;
mod search;
mod separator;

pub use dominion::{dominion_special, DominionReport, DominionStatus};
pub use format::{load_amalgam, load_hom, parse_amalgam, parse_hom, AmalgamFile};
pub use mediate::{mediate, Mediator};
pub use search::{pushout_equal, pushout_leq, Budget, EqOutcome, LeqOutcome, SearchStats};
pub use separator::{all_compatible_quasiorders, enumerate_homs, epi_check, separator_search, EpiOutcome, Separator, SeparatorOutcome};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oalg::{Elem, Homomorphism, OrderedAlgebra};
use crate::otalg::term_leq_by;
use crate::signature::Signature;
use crate::term::{Leaf, Term, Tok, VarSyntax};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub const BOTH: [Side; 2] = [Side::One, Side::Two];
}

/// An element of `A1 ∪̇ A2`, tagged with its side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XLabel {
    pub side: Side,
    pub elem: u32,
}

impl XLabel {
    pub fn new(side: Side, elem: Elem) -> Self {
        XLabel { side, elem: elem as u32 }
    }

    pub fn e(self) -> Elem {
        self.elem as Elem
    }
}

pub type XTerm = Term<XLabel>;
pub type XLeaf = Leaf<XLabel>;

pub fn xleaf(side: Side, e: Elem) -> XTerm {
    Term::var(XLabel::new(side, e))
}

/// Whether element names are tagged with their side when read and printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tagging {
    /// `e1@1`, `e1@2` (also read: `e1⟨1⟩`).
    Auto,
    /// Names are used verbatim and must be distinct across the algebras.
    Off,
}

#[derive(Clone, Debug)]
pub struct Amalgam {
    pub c: Arc<OrderedAlgebra>,
    pub a: [Arc<OrderedAlgebra>; 2],
    pub phi: [Vec<Elem>; 2],
    pub tagging: Tagging,
}

impl Amalgam {
    pub fn new(c: Arc<OrderedAlgebra>, a1: Arc<OrderedAlgebra>, a2: Arc<OrderedAlgebra>, phi1: Vec<Elem>, phi2: Vec<Elem>) -> Self {
        Amalgam { c, a: [a1, a2], phi: [phi1, phi2], tagging: Tagging::Auto }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        self.c.sig()
    }

    pub fn alg(&self, side: Side) -> &OrderedAlgebra {
        &self.a[side.index()]
    }

    pub fn phi(&self, side: Side, c: Elem) -> Elem {
        self.phi[side.index()][c]
    }

    /// True when `A2` is `A1` over the same embedding, so `ν` is the identity on element indices.
    pub fn is_special(&self) -> bool {
        let (a, b) = (&self.a[0], &self.a[1]);
        self.phi[0] == self.phi[1]
            && (Arc::ptr_eq(a, b)
                || (a.size() == b.size()
                    && a.order() == b.order()
                    && self.sig().operations().all(|(f, _)| a.table(f) == b.table(f))
                    && self.sig().constants().all(|c| a.const_val(c) == b.const_val(c))))
    }

    /// `≤_X ∪̇ ≤_{F₀}` on leaf labels, with `X = A1 ∪̇ A2`.
    #[inline]
    pub fn label_leq(&self, u: XLabel, v: XLabel) -> bool {
        u.side == v.side && self.alg(u.side).leq(u.e(), v.e())
    }

    pub fn leaf_leq(&self, u: XLeaf, v: XLeaf) -> bool {
        match (u, v) {
            (Leaf::Var(a), Leaf::Var(b)) => self.label_leq(a, b),
            (Leaf::Const(c), Leaf::Const(d)) => self.sig().const_leq(c, d),
            _ => false,
        }
    }

    /// The order of the ordered term algebra over `A1 ∪̇ A2`.
    pub fn term_leq(&self, s: &XTerm, t: &XTerm) -> bool {
        term_leq_by(s, t, |u, v| self.label_leq(u, v), |c, d| self.sig().const_leq(c, d))
    }

    /// True iff every variable leaf of `t` lies on `side`.
    pub fn in_side(&self, t: &XTerm, side: Side) -> bool {
        t.toks().iter().all(|tok| !matches!(tok, Tok::Var(x) if x.side != side))
    }

    /// `t^{A_i}` for `t ∈ T(A_i)`.
    pub fn value(&self, t: &XTerm, side: Side) -> Option<Elem> {
        if !self.in_side(t, side) {
            return None;
        }
        Some(self.alg(side).eval(t, |x| x.e()))
    }

    /// `c` with `φ_side(c) = e`, if any.
    pub fn phi_inverse(&self, side: Side, e: Elem) -> Option<Elem> {
        self.phi[side.index()].iter().position(|&x| x == e)
    }

    /// Minimal `c ∈ C` with `e ≤ φ_side(c)`.
    pub fn minimal_flips(&self, side: Side, e: Elem) -> Vec<Elem> {
        let a = self.alg(side);
        let ups: Vec<Elem> = (0..self.c.size()).filter(|&c| a.leq(e, self.phi(side, c))).collect();
        ups.iter().copied().filter(|&c| !ups.iter().any(|&d| d != c && self.c.leq(d, c))).collect()
    }

    pub fn label_name(&self, x: XLabel) -> String {
        let mut s = String::new();
        self.write_var(x, &mut s);
        s
    }

    pub fn show(&self, t: &XTerm) -> String {
        t.display(self.sig(), self, crate::term::Notation::Prefix)
    }

    pub fn show_leaf(&self, l: XLeaf) -> String {
        match l {
            Leaf::Var(x) => self.label_name(x),
            Leaf::Const(c) => self.sig().name(c).to_string(),
        }
    }

    pub fn parse_term(&self, word: &str) -> Result<XTerm> {
        crate::term::parse_term(self.sig(), self, word)
    }
}

impl VarSyntax<XLabel> for Amalgam {
    fn parse_var(&self, word: &str) -> Option<XLabel> {
        let (name, side) = if let Some((n, s)) = word.rsplit_once('@') {
            (n, s)
        } else if let Some(rest) = word.strip_suffix('⟩') {
            rest.rsplit_once('⟨')?
        } else {
            if self.tagging == Tagging::Auto {
                return None;
            }
            let hits: Vec<XLabel> = Side::BOTH.iter().filter_map(|&s| self.alg(s).elem(word).map(|e| XLabel::new(s, e))).collect();
            return if hits.len() == 1 { Some(hits[0]) } else { None };
        };
        let side = match side {
            "1" => Side::One,
            "2" => Side::Two,
            _ => return None,
        };
        self.alg(side).elem(name).map(|e| XLabel::new(side, e))
    }

    fn write_var(&self, v: XLabel, out: &mut String) {
        out.push_str(self.alg(v.side).elem_name(v.e()));
        if self.tagging == Tagging::Auto {
            out.push('@');
            out.push_str(&v.side.number().to_string());
        }
    }
}

/// Every failed condition on an amalgam; empty means valid.
pub fn validate_amalgam(am: &Amalgam) -> Vec<String> {
    let mut out = Vec::new();
    let sig = am.sig();
    for (label, alg) in [("C", &am.c), ("A1", &am.a[0]), ("A2", &am.a[1])] {
        if alg.sig().as_ref() != sig.as_ref() {
            out.push(format!("{label} is over a different signature"));
            continue;
        }
        for v in alg.validate() {
            out.push(format!("{label} is not in the variety: {}", alg.describe(&v)));
        }
    }
    for side in Side::BOTH {
        let i = side.number();
        let phi = &am.phi[side.index()];
        if phi.len() != am.c.size() || phi.iter().any(|&e| e >= am.alg(side).size()) {
            out.push(format!("phi{i} is not a total map C -> A{i}"));
            continue;
        }
        let h = Homomorphism { dom: am.c.clone(), cod: am.a[side.index()].clone(), map: phi.clone() };
        let chk = h.check();
        if !chk.is_hom {
            out.push(format!("phi{i} does not commute with the operations"));
        }
        if !chk.is_order_embedding {
            let mut sorted = phi.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != phi.len() {
                out.push(format!("phi{i} is not injective"));
            }
            out.push(format!("phi{i} is not an order-embedding"));
        }
    }
    if am.tagging == Tagging::Off {
        let algs = [("C", &am.c), ("A1", &am.a[0]), ("A2", &am.a[1])];
        for i in 0..3 {
            for j in i + 1..3 {
                for n in algs[i].1.elems() {
                    if algs[j].1.elems().contains(n) {
                        out.push(format!("carriers of {} and {} share the name {n}", algs[i].0, algs[j].0));
                    }
                }
            }
        }
    }
    out
}

/// A special amalgam: two tagged copies of `base` over a subalgebra `C`.
#[derive(Clone, Debug)]
pub struct SpecialAmalgam {
    pub base: Arc<OrderedAlgebra>,
    /// Elements of `C` in `base`, ascending; `C`'s element `k` is `c_elems[k]`.
    pub c_elems: Vec<Elem>,
    pub am: Amalgam,
}

/// Builds the special amalgam over the subalgebra generated by `seed`.
pub fn make_special(base: Arc<OrderedAlgebra>, seed: &[Elem]) -> Result<SpecialAmalgam> {
    if seed.iter().any(|&e| e >= base.size()) {
        return Err(Error::PreconditionFailed("seed element outside the carrier".into()));
    }
    let c_elems = base.generated_subalgebra(seed);
    let c = Arc::new(base.subalgebra(&c_elems, format!("{}_C", base.name()))?);
    let am = Amalgam::new(c, base.clone(), base.clone(), c_elems.clone(), c_elems.clone());
    Ok(SpecialAmalgam { base, c_elems, am })
}

impl SpecialAmalgam {
    pub fn in_c(&self, x: Elem) -> bool {
        self.c_elems.binary_search(&x).is_ok()
    }

    /// `α_i(x)`.
    pub fn alpha(&self, side: Side, x: Elem) -> XLabel {
        XLabel::new(side, x)
    }

    /// `ν = α2 ∘ α1⁻¹` on labels of side 1, and its inverse on side 2.
    pub fn nu(&self, x: XLabel) -> XLabel {
        XLabel { side: x.side.other(), elem: x.elem }
    }

    /// `ν̄0`: evaluate in the base algebra with side tags forgotten.
    pub fn nu0_bar(&self, t: &XTerm) -> Elem {
        self.base.eval(t, |x| x.e())
    }

    /// `ν̄0` as a mediating map into the base algebra.
    pub fn nu0_mediator(&self) -> Mediator {
        let id: Vec<Elem> = (0..self.base.size()).collect();
        Mediator { d: self.base.clone(), gamma: [id.clone(), id] }
    }
}
