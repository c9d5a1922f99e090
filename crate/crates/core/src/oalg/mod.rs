//! Finite ordered F-algebras: tables, validation, evaluation, subalgebras and products.

mod format;
mod hom;
mod quotient;

pub use format::{load_algebra, parse_algebra, print_algebra, AlgebraFile};
pub use hom::{directed_kernel, kernel, HomCheck, Homomorphism};
pub use quotient::{
    factor_through, is_compatible_quasiorder, is_congruence, is_order_congruence, leq_theta, nonregular_quotient, regular_quotient,
    Quotient,
};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relation::BitRel;
use crate::signature::{Signature, Sym};
use crate::term::{Term, Tok};

pub type Elem = usize;

pub const MAX_CARRIER: usize = 10_000;
pub const MAX_TABLE: usize = 1 << 24;

/// A total operation table stored in mixed radix (first argument most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpTable {
    arity: usize,
    n: usize,
    data: Vec<u32>,
}

impl OpTable {
    pub fn from_fn(n: usize, arity: usize, mut f: impl FnMut(&[Elem]) -> Elem) -> Result<Self> {
        let len = table_len(n, arity)?;
        let mut data = Vec::with_capacity(len);
        let mut args = vec![0; arity];
        for _ in 0..len {
            data.push(f(&args) as u32);
            odometer(&mut args, n);
        }
        Ok(OpTable { arity, n, data })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn index(&self, args: &[Elem]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.n + a)
    }

    #[inline]
    pub fn get(&self, args: &[Elem]) -> Elem {
        self.data[self.index(args)] as Elem
    }

    pub fn set(&mut self, args: &[Elem], v: Elem) {
        let i = self.index(args);
        self.data[i] = v as u32;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

pub(crate) fn table_len(n: usize, arity: usize) -> Result<usize> {
    let mut len = 1usize;
    for _ in 0..arity {
        len = len
            .checked_mul(n)
            .filter(|&l| l <= MAX_TABLE)
            .ok_or_else(|| Error::SizeLimit(format!("operation table of arity {arity} over {n} elements exceeds {MAX_TABLE} entries")))?;
    }
    Ok(len)
}

/// Advances a little-endian-last tuple; returns false after wrapping to all zeros.
pub fn odometer(args: &mut [Elem], n: usize) -> bool {
    for a in args.iter_mut().rev() {
        *a += 1;
        if *a < n {
            return true;
        }
        *a = 0;
    }
    false
}

/// Iterates over all tuples in `0..n` of the given length in lexicographic order.
pub fn for_each_tuple(n: usize, len: usize, mut f: impl FnMut(&[Elem])) {
    if n == 0 && len > 0 {
        return;
    }
    let mut args = vec![0; len];
    loop {
        f(&args);
        if !odometer(&mut args, n) {
            break;
        }
    }
}

/// Iterates over all tuples with `tuple[i] < sizes[i]`, lexicographically.
pub fn for_each_tuple_mixed(sizes: &[usize], mut f: impl FnMut(&[Elem])) {
    if sizes.contains(&0) {
        return;
    }
    let mut t = vec![0; sizes.len()];
    loop {
        f(&t);
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < sizes[i] {
                break;
            }
            t[i] = 0;
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct OrderedAlgebra {
    sig: Arc<Signature>,
    name: String,
    elems: Vec<String>,
    order: BitRel,
    tables: Vec<Option<OpTable>>,
    consts: Vec<Option<Elem>>,
}

impl fmt::Debug for OrderedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrderedAlgebra").field("name", &self.name).field("elems", &self.elems).finish()
    }
}

/// One failed condition of [`validate_algebra`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    OrderNotReflexive(Elem),
    OrderNotTransitive(Elem, Elem, Elem),
    OrderNotAntisymmetric(Elem, Elem),
    /// `lhs <= rhs` componentwise but `f(lhs) <= f(rhs)` fails.
    Monotonicity {
        op: Sym,
        lhs: Vec<Elem>,
        rhs: Vec<Elem>,
    },
    /// `c <= d` holds in the signature but not for the values.
    ConstantOrder {
        c: Sym,
        d: Sym,
    },
}

impl OrderedAlgebra {
    /// Builds an algebra from closures. `order` is closed reflexive-transitively here.
    pub fn from_fn(
        sig: Arc<Signature>,
        name: impl Into<String>,
        elems: Vec<String>,
        order: &BitRel,
        mut op: impl FnMut(Sym, &[Elem]) -> Elem,
        mut constant: impl FnMut(Sym) -> Elem,
    ) -> Result<Self> {
        let n = elems.len();
        if n == 0 {
            return Err(Error::Validation("empty carrier".into()));
        }
        if n > MAX_CARRIER {
            return Err(Error::SizeLimit(format!("carrier of {n} elements exceeds {MAX_CARRIER}")));
        }
        let mut tables = Vec::with_capacity(sig.len());
        let mut consts = Vec::with_capacity(sig.len());
        for (s, sym) in sig.symbols() {
            if sym.arity == 0 {
                let v = constant(s);
                if v >= n {
                    return Err(Error::Validation(format!("constant {} out of carrier", sym.name)));
                }
                tables.push(None);
                consts.push(Some(v));
            } else {
                let mut bad = None;
                let t = OpTable::from_fn(n, sym.arity, |a| {
                    let v = op(s, a);
                    if v >= n {
                        bad = Some(a.to_vec());
                    }
                    v.min(n - 1)
                })?;
                if let Some(a) = bad {
                    return Err(Error::Validation(format!("{} at {:?} leaves the carrier", sym.name, a)));
                }
                tables.push(Some(t));
                consts.push(None);
            }
        }
        Ok(OrderedAlgebra { sig, name: name.into(), elems, order: order.rt_closure(), tables, consts })
    }

    pub(crate) fn from_parts(
        sig: Arc<Signature>,
        name: String,
        elems: Vec<String>,
        order: BitRel,
        tables: Vec<Option<OpTable>>,
        consts: Vec<Option<Elem>>,
    ) -> Self {
        OrderedAlgebra { sig, name, elems, order, tables, consts }
    }

    /// Same algebra with a different (already closed) order.
    pub fn with_order(&self, order: BitRel) -> Self {
        OrderedAlgebra { order, ..self.clone() }
    }

    pub fn renamed(&self, name: impl Into<String>, elems: Vec<String>) -> Self {
        assert_eq!(elems.len(), self.elems.len());
        OrderedAlgebra { name: name.into(), elems, ..self.clone() }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[String] {
        &self.elems
    }

    pub fn elem_name(&self, e: Elem) -> &str {
        &self.elems[e]
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.elems.iter().position(|n| n == name)
    }

    pub fn order(&self) -> &BitRel {
        &self.order
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.order.contains(a, b)
    }

    pub fn table(&self, f: Sym) -> &OpTable {
        self.tables[f.index()].as_ref().expect("operation symbol")
    }

    #[inline]
    pub fn apply(&self, f: Sym, args: &[Elem]) -> Elem {
        match &self.tables[f.index()] {
            Some(t) => t.get(args),
            None => self.consts[f.index()].expect("constant symbol"),
        }
    }

    pub fn const_val(&self, c: Sym) -> Elem {
        self.consts[c.index()].expect("constant symbol")
    }

    /// Evaluates a term; `var` resolves variable leaves.
    pub fn eval_with<V: Copy + Eq>(&self, t: &Term<V>, mut var: impl FnMut(V) -> Result<Elem>) -> Result<Elem> {
        let mut stack: Vec<Elem> = Vec::with_capacity(t.len());
        let mut args: Vec<Elem> = Vec::with_capacity(16);
        for tok in t.toks().iter().rev() {
            match *tok {
                Tok::Var(v) => stack.push(var(v)?),
                Tok::Const(c) => stack.push(self.const_val(c)),
                Tok::Op(f, k) => {
                    args.clear();
                    for _ in 0..k {
                        args.push(stack.pop().expect("well-formed term"));
                    }
                    stack.push(self.table(f).get(&args));
                }
            }
        }
        Ok(stack.pop().expect("non-empty term"))
    }

    /// Evaluates with an infallible variable map.
    pub fn eval<V: Copy + Eq>(&self, t: &Term<V>, mut var: impl FnMut(V) -> Elem) -> Elem {
        self.eval_with(t, |v| Ok(var(v))).expect("infallible")
    }

    /// Evaluation under a partial environment; unbound variables are reported by name.
    pub fn evaluate<V: Copy + Eq + std::hash::Hash>(
        &self,
        t: &Term<V>,
        env: &std::collections::HashMap<V, Elem>,
        name: impl Fn(V) -> String,
    ) -> Result<Elem> {
        self.eval_with(t, |v| env.get(&v).copied().ok_or_else(|| Error::UnboundVariable(name(v))))
    }

    /// Every violated condition; empty iff the algebra lies in the variety.
    pub fn validate(&self) -> Vec<Violation> {
        validate_algebra(self)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn describe(&self, v: &Violation) -> String {
        let names = |xs: &[Elem]| xs.iter().map(|&x| self.elem_name(x).to_string()).collect::<Vec<_>>().join(",");
        match v {
            Violation::OrderNotReflexive(a) => format!("order not reflexive at {}", self.elem_name(*a)),
            Violation::OrderNotTransitive(a, b, c) => {
                format!("order not transitive: {} <= {} <= {}", self.elem_name(*a), self.elem_name(*b), self.elem_name(*c))
            }
            Violation::OrderNotAntisymmetric(a, b) => {
                format!("order not antisymmetric: {} <= {} <= {}", self.elem_name(*a), self.elem_name(*b), self.elem_name(*a))
            }
            Violation::Monotonicity { op, lhs, rhs } => {
                let s = self.sig.name(*op);
                format!(
                    "{s} not monotone: ({}) <= ({}) but {s}(..)={} is not <= {}",
                    names(lhs),
                    names(rhs),
                    self.elem_name(self.apply(*op, lhs)),
                    self.elem_name(self.apply(*op, rhs))
                )
            }
            Violation::ConstantOrder { c, d } => format!(
                "constant inequality {} <= {} fails: {} is not <= {}",
                self.sig.name(*c),
                self.sig.name(*d),
                self.elem_name(self.const_val(*c)),
                self.elem_name(self.const_val(*d))
            ),
        }
    }

    /// Closure of `seed` and the constants under all operations, ascending.
    pub fn generated_subalgebra(&self, seed: &[Elem]) -> Vec<Elem> {
        let n = self.size();
        let mut inside = vec![false; n];
        for &s in seed {
            inside[s] = true;
        }
        for c in self.sig.constants() {
            inside[self.const_val(c)] = true;
        }
        loop {
            let members: Vec<Elem> = (0..n).filter(|&e| inside[e]).collect();
            let mut grew = false;
            for (f, k) in self.sig.operations() {
                let t = self.table(f);
                let mut idx = vec![0; k];
                for_each_tuple(members.len(), k, |ix| {
                    for (slot, &i) in idx.iter_mut().zip(ix) {
                        *slot = members[i];
                    }
                    let v = t.get(&idx);
                    if !inside[v] {
                        inside[v] = true;
                        grew = true;
                    }
                });
            }
            if !grew {
                return (0..n).filter(|&e| inside[e]).collect();
            }
        }
    }

    /// True iff `elems` contains the constants and is closed under the operations.
    pub fn is_subuniverse(&self, elems: &[Elem]) -> bool {
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.generated_subalgebra(&sorted) == sorted
    }

    /// The subalgebra on a closed subset, with the restricted order; element `i` of the
    /// result is `elems[i]`.
    pub fn subalgebra(&self, elems: &[Elem], name: impl Into<String>) -> Result<OrderedAlgebra> {
        if !self.is_subuniverse(elems) {
            return Err(Error::PreconditionFailed("subset is not closed under the operations".into()));
        }
        let pos = |e: Elem| elems.iter().position(|&x| x == e).expect("closed");
        let order = BitRel::from_pairs(
            elems.len(),
            (0..elems.len()).flat_map(|i| (0..elems.len()).map(move |j| (i, j))).filter(|&(i, j)| self.leq(elems[i], elems[j])),
        );
        let mut args = Vec::new();
        OrderedAlgebra::from_fn(
            self.sig.clone(),
            name,
            elems.iter().map(|&e| self.elem_name(e).to_string()).collect(),
            &order,
            |f, a| {
                args.clear();
                args.extend(a.iter().map(|&i| elems[i]));
                pos(self.apply(f, &args))
            },
            |c| pos(self.const_val(c)),
        )
    }

    /// The same algebra with the trivial order `=`.
    pub fn with_trivial_order(&self) -> Self {
        self.with_order(BitRel::identity(self.size()))
    }
}

pub fn validate_algebra(a: &OrderedAlgebra) -> Vec<Violation> {
    let n = a.size();
    let mut out = Vec::new();
    for x in 0..n {
        if !a.leq(x, x) {
            out.push(Violation::OrderNotReflexive(x));
        }
    }
    for x in 0..n {
        for y in a.order.successors(x) {
            for z in a.order.successors(y) {
                if !a.leq(x, z) {
                    out.push(Violation::OrderNotTransitive(x, y, z));
                }
            }
        }
    }
    for (x, y) in a.order.antisymmetry_violations() {
        out.push(Violation::OrderNotAntisymmetric(x, y));
    }
    // Monotonicity in each argument separately is equivalent to joint monotonicity.
    for (f, k) in a.sig.operations() {
        let t = a.table(f);
        for_each_tuple(n, k, |args| {
            let lhs = t.get(args);
            let mut other = args.to_vec();
            for i in 0..k {
                for b in a.order.successors(args[i]) {
                    if b == args[i] {
                        continue;
                    }
                    other[i] = b;
                    if !a.leq(lhs, t.get(&other)) {
                        out.push(Violation::Monotonicity { op: f, lhs: args.to_vec(), rhs: other.clone() });
                    }
                }
                other[i] = args[i];
            }
        });
    }
    for (c, d) in a.sig.const_order_pairs() {
        if !a.leq(a.const_val(c), a.const_val(d)) {
            out.push(Violation::ConstantOrder { c, d });
        }
    }
    out
}

/// Componentwise product. The empty product is the one-element algebra.
pub fn product(sig: &Arc<Signature>, factors: &[&OrderedAlgebra]) -> Result<OrderedAlgebra> {
    if factors.len() == 1 {
        return Ok(factors[0].clone());
    }
    let mut size = 1usize;
    for f in factors {
        if f.sig.as_ref() != sig.as_ref() {
            return Err(Error::PreconditionFailed("factors over different signatures".into()));
        }
        size = size
            .checked_mul(f.size())
            .filter(|&s| s <= MAX_CARRIER)
            .ok_or_else(|| Error::SizeLimit(format!("product exceeds {MAX_CARRIER} elements")))?;
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
    let decode = |mut e: Elem| -> Vec<Elem> {
        let mut out = vec![0; sizes.len()];
        for i in (0..sizes.len()).rev() {
            out[i] = e % sizes[i];
            e /= sizes[i];
        }
        out
    };
    let encode = |xs: &[Elem]| xs.iter().zip(&sizes).fold(0, |acc, (&x, &s)| acc * s + x);
    let comps: Vec<Vec<Elem>> = (0..size).map(decode).collect();
    let names: Vec<String> = if factors.is_empty() {
        vec!["unit".to_string()]
    } else {
        comps.iter().map(|c| c.iter().zip(factors).map(|(&x, f)| f.elem_name(x)).collect::<Vec<_>>().join("_")).collect()
    };
    let mut order = BitRel::empty(size);
    for a in 0..size {
        for b in 0..size {
            if comps[a].iter().zip(&comps[b]).zip(factors).all(|((&x, &y), f)| f.leq(x, y)) {
                order.insert(a, b);
            }
        }
    }
    let name = if factors.is_empty() { "1".to_string() } else { factors.iter().map(|f| f.name()).collect::<Vec<_>>().join("x") };
    let mut col = Vec::new();
    OrderedAlgebra::from_fn(
        sig.clone(),
        name,
        names,
        &order,
        |f, args| {
            let out: Vec<Elem> = factors
                .iter()
                .enumerate()
                .map(|(i, fa)| {
                    col.clear();
                    col.extend(args.iter().map(|&a| comps[a][i]));
                    fa.apply(f, &col)
                })
                .collect();
            encode(&out)
        },
        |c| encode(&factors.iter().map(|fa| fa.const_val(c)).collect::<Vec<_>>()),
    )
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn sig1() -> Arc<Signature> {
        Arc::new(Signature::parse("op f 2; op g 3; const c; const d; order c <= d").unwrap())
    }

    pub fn chain(sig: &Arc<Signature>, n: usize, name: &str) -> OrderedAlgebra {
        let order = BitRel::from_pairs(n, (0..n).flat_map(|a| (a..n).map(move |b| (a, b))));
        let top = n - 1;
        OrderedAlgebra::from_fn(
            sig.clone(),
            name,
            (0..n).map(|i| format!("e{i}")).collect(),
            &order,
            |_, args| *args.iter().max().unwrap(),
            |c| if sig.name(c) == "c" { 0 } else { top },
        )
        .unwrap()
    }

    /// Chain e0 < e1 < e2 with f and g the joins, c = e0, d = e2.
    pub fn ch3() -> OrderedAlgebra {
        chain(&sig1(), 3, "CH3")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::term::{parse_term, VarNames};
    use std::collections::HashMap;

    #[test]
    fn ch3_validates() {
        assert!(ch3().validate().is_empty());
    }

    #[test]
    fn trivial_order_validates_any_tables() {
        let sig = sig1();
        let a = OrderedAlgebra::from_fn(
            sig.clone(),
            "T",
            vec!["a".into(), "b".into(), "c".into()],
            &BitRel::identity(3),
            |_, args| (args.iter().sum::<usize>() * 7 + 1) % 3,
            |_| 1,
        )
        .unwrap();
        assert!(a.validate().is_empty());
    }

    #[test]
    fn swapped_constants_violate_variety() {
        let a = ch3();
        let sig = a.sig().clone();
        let swapped = OrderedAlgebra::from_fn(
            sig.clone(),
            "CH3'",
            a.elems().to_vec(),
            a.order(),
            |f, x| a.apply(f, x),
            |c| if sig.name(c) == "c" { 2 } else { 0 },
        )
        .unwrap();
        let v = swapped.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::ConstantOrder { .. }));
    }

    #[test]
    fn non_monotone_table_reported() {
        let a = ch3();
        let f = a.sig().lookup("f").unwrap();
        let bad = OrderedAlgebra::from_fn(
            a.sig().clone(),
            "bad",
            a.elems().to_vec(),
            a.order(),
            |s, x| if s == f && x == [0, 0] { 2 } else { a.apply(s, x) },
            |c| a.const_val(c),
        )
        .unwrap();
        let v = bad.validate();
        assert!(v.contains(&Violation::Monotonicity { op: f, lhs: vec![0, 0], rhs: vec![1, 0] }));
        assert!(v.iter().all(|x| matches!(x, Violation::Monotonicity { op, .. } if *op == f)));
        assert!(!bad.describe(&v[0]).is_empty());
    }

    #[test]
    fn evaluation() {
        let a = ch3();
        let vars = VarNames::new(&["x1", "x2"]).unwrap();
        let t = parse_term(a.sig(), &vars, "f x1 c").unwrap();
        let x1 = vars.get("x1").unwrap();
        let env = HashMap::from([(x1, 1)]);
        assert_eq!(a.evaluate(&t, &env, |v| vars.name(v).to_string()).unwrap(), 1);
        let c = parse_term(a.sig(), &vars, "c").unwrap();
        assert_eq!(a.evaluate(&c, &HashMap::new(), |v| vars.name(v).to_string()).unwrap(), 0);
        let u = parse_term(a.sig(), &vars, "f x1 x2").unwrap();
        let env = HashMap::from([(x1, 2)]);
        assert_eq!(a.evaluate(&u, &env, |v| vars.name(v).to_string()), Err(Error::UnboundVariable("x2".into())));
    }

    #[test]
    fn subalgebras() {
        let a = ch3();
        assert_eq!(a.generated_subalgebra(&[]), vec![0, 2]);
        assert_eq!(a.generated_subalgebra(&[0, 1, 2]), vec![0, 1, 2]);
        assert_eq!(a.generated_subalgebra(&[1]), vec![0, 1, 2]);
        let c = a.subalgebra(&[0, 2], "C").unwrap();
        assert_eq!(c.size(), 2);
        assert!(c.leq(0, 1) && !c.leq(1, 0));
        assert!(c.validate().is_empty());
        assert!(a.subalgebra(&[1], "bad").is_err());
    }

    #[test]
    fn products() {
        let sig = sig1();
        let ch2 = chain(&sig, 2, "CH2");
        let p1 = product(&sig, &[&ch2]).unwrap();
        assert_eq!(p1, ch2);
        let d = product(&sig, &[&ch2, &ch2]).unwrap();
        assert_eq!(d.size(), 4);
        assert!(d.validate().is_empty());
        // Diamond: 00 < 01, 10 < 11, with 01 and 10 incomparable.
        assert_eq!(d.order().count(), 9);
        assert!(!d.leq(1, 2) && !d.leq(2, 1));
        let f = sig.lookup("f").unwrap();
        assert_eq!(d.apply(f, &[1, 2]), 3);
        let unit = product(&sig, &[]).unwrap();
        assert_eq!(unit.size(), 1);
        assert!(unit.validate().is_empty());
        let big = chain(&sig, 40, "CH40");
        assert!(matches!(product(&sig, &[&big, &big, &big]), Err(Error::SizeLimit(_))));
    }
}
