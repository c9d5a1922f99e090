//! Terms as prefix token vectors, with leaf machinery, skeletons and regularization.
//!
//! A term is stored as its prefix word. Every subterm is a contiguous token span,
//! so positions are plain token indices. Leaf indices in the public API are 1-based.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::signature::{is_formal_name, Signature, Sym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tok<V> {
    Op(Sym, u8),
    Const(Sym),
    Var(V),
}

/// A leaf label: a variable or a constant symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leaf<V> {
    Const(Sym),
    Var(V),
}

impl<V: Copy> Tok<V> {
    #[inline]
    pub fn arity(&self) -> usize {
        match self {
            Tok::Op(_, k) => *k as usize,
            _ => 0,
        }
    }

    #[inline]
    pub fn as_leaf(&self) -> Option<Leaf<V>> {
        match *self {
            Tok::Op(..) => None,
            Tok::Const(c) => Some(Leaf::Const(c)),
            Tok::Var(v) => Some(Leaf::Var(v)),
        }
    }
}

impl<V> From<Leaf<V>> for Tok<V> {
    fn from(l: Leaf<V>) -> Self {
        match l {
            Leaf::Const(c) => Tok::Const(c),
            Leaf::Var(v) => Tok::Var(v),
        }
    }
}

/// Formal variable `z_k` (1-based), reserved for regular terms and templates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z(pub u32);

/// Index into a declared variable list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u16);

/// How variable labels are read and written in term words.
pub trait VarSyntax<V> {
    fn parse_var(&self, word: &str) -> Option<V>;
    fn write_var(&self, v: V, out: &mut String);
}

/// Syntax for formal variables `z1, z2, ...`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Formal;

impl VarSyntax<Z> for Formal {
    fn parse_var(&self, word: &str) -> Option<Z> {
        if !is_formal_name(word) {
            return None;
        }
        word[1..].parse::<u32>().ok().filter(|&k| k >= 1).map(Z)
    }
    fn write_var(&self, v: Z, out: &mut String) {
        let _ = write!(out, "z{}", v.0);
    }
}

/// A declared list of variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarNames {
    names: Vec<String>,
    index: HashMap<String, VarId>,
}

impl VarNames {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut v = VarNames::default();
        for n in names {
            v.push(n.as_ref())?;
        }
        Ok(v)
    }

    pub fn push(&mut self, name: &str) -> Result<VarId> {
        crate::signature::check_name(name)?;
        if is_formal_name(name) {
            return Err(Error::Validation(format!("variable {name} uses the reserved formal namespace")));
        }
        let id = VarId(self.names.len() as u16);
        if self.index.insert(name.to_string(), id).is_some() {
            return Err(Error::Validation(format!("duplicate variable {name}")));
        }
        self.names.push(name.to_string());
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0 as usize]
    }

    pub fn get(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.names.len() as u16).map(VarId)
    }
}

impl VarSyntax<VarId> for VarNames {
    fn parse_var(&self, word: &str) -> Option<VarId> {
        self.get(word)
    }
    fn write_var(&self, v: VarId, out: &mut String) {
        out.push_str(self.name(v));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Notation {
    Prefix,
    Functional,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term<V> {
    toks: Vec<Tok<V>>,
}

/// Tree shape with operation labels kept and leaf labels erased (`None`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Skeleton(pub Vec<Option<(Sym, u8)>>);

impl Skeleton {
    pub fn leaf_count(&self) -> usize {
        self.0.iter().filter(|t| t.is_none()).count()
    }
}

/// Leaf labels of a term, left to right, read with 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LeafSeq<V>(pub Vec<Leaf<V>>);

impl<V: Copy> LeafSeq<V> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `t[j]`.
    pub fn get(&self, j: usize) -> Result<Leaf<V>> {
        if j == 0 || j > self.0.len() {
            return Err(Error::IndexOutOfRange { index: j, len: self.0.len() });
        }
        Ok(self.0[j - 1])
    }

    /// `t<l>`: the first `l` leaf labels.
    pub fn prefix(&self, l: usize) -> Result<&[Leaf<V>]> {
        if l > self.0.len() {
            return Err(Error::IndexOutOfRange { index: l, len: self.0.len() });
        }
        Ok(&self.0[..l])
    }

    pub fn vars(&self) -> Vec<V> {
        self.0.iter().filter_map(|l| if let Leaf::Var(v) = l { Some(*v) } else { None }).collect()
    }
}

impl<V: Copy + Eq> Term<V> {
    pub fn from_toks(toks: Vec<Tok<V>>) -> Self {
        debug_assert!(well_formed(&toks));
        Term { toks }
    }

    pub fn leaf(l: Leaf<V>) -> Self {
        Term { toks: vec![l.into()] }
    }

    pub fn var(v: V) -> Self {
        Term { toks: vec![Tok::Var(v)] }
    }

    pub fn constant(c: Sym) -> Self {
        Term { toks: vec![Tok::Const(c)] }
    }

    /// `f(children)`; the arity is taken from the number of children.
    pub fn node(f: Sym, children: &[Term<V>]) -> Self {
        let mut toks = Vec::with_capacity(1 + children.iter().map(|c| c.toks.len()).sum::<usize>());
        toks.push(Tok::Op(f, children.len() as u8));
        for c in children {
            toks.extend_from_slice(&c.toks);
        }
        Term { toks }
    }

    pub fn toks(&self) -> &[Tok<V>] {
        &self.toks
    }

    pub fn len(&self) -> usize {
        self.toks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.toks.is_empty()
    }

    pub fn is_leaf(&self) -> bool {
        self.toks.len() == 1
    }

    pub fn as_leaf(&self) -> Option<Leaf<V>> {
        if self.is_leaf() {
            self.toks[0].as_leaf()
        } else {
            None
        }
    }

    pub fn root(&self) -> Tok<V> {
        self.toks[0]
    }

    pub fn op_count(&self) -> usize {
        self.toks.iter().filter(|t| matches!(t, Tok::Op(..))).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.toks.len() - self.op_count()
    }

    pub fn leaves(&self) -> LeafSeq<V> {
        LeafSeq(self.toks.iter().filter_map(Tok::as_leaf).collect())
    }

    /// Leaf sequence with constants removed.
    pub fn var_seq(&self) -> Vec<V> {
        self.toks.iter().filter_map(|t| if let Tok::Var(v) = t { Some(*v) } else { None }).collect()
    }

    pub fn is_constant_free(&self) -> bool {
        !self.toks.iter().any(|t| matches!(t, Tok::Const(_)))
    }

    pub fn skeleton(&self) -> Skeleton {
        Skeleton(self.toks.iter().map(|t| if let Tok::Op(f, k) = t { Some((*f, *k)) } else { None }).collect())
    }

    #[inline]
    pub fn same_skeleton<W: Copy>(&self, other: &Term<W>) -> bool {
        self.toks.len() == other.toks.len()
            && self.toks.iter().zip(&other.toks).all(|(a, b)| match (a, b) {
                (Tok::Op(f, _), Tok::Op(g, _)) => f == g,
                (Tok::Op(..), _) | (_, Tok::Op(..)) => false,
                _ => true,
            })
    }

    /// End (exclusive) of the subterm starting at token `pos`.
    pub fn subterm_end(&self, pos: usize) -> usize {
        let mut need = 1usize;
        let mut i = pos;
        while need > 0 {
            need = need - 1 + self.toks[i].arity();
            i += 1;
        }
        i
    }

    pub fn subterm(&self, pos: usize) -> Term<V> {
        Term { toks: self.toks[pos..self.subterm_end(pos)].to_vec() }
    }

    /// Token positions of the children of the node at `pos`.
    pub fn children(&self, pos: usize) -> Vec<usize> {
        let k = self.toks[pos].arity();
        let mut out = Vec::with_capacity(k);
        let mut p = pos + 1;
        for _ in 0..k {
            out.push(p);
            p = self.subterm_end(p);
        }
        out
    }

    /// Subterm end for every position, computed in one backward pass.
    pub fn subterm_ends(&self) -> Vec<usize> {
        let n = self.toks.len();
        let mut ends = vec![0; n];
        let mut stack: Vec<usize> = Vec::new();
        for i in (0..n).rev() {
            let k = self.toks[i].arity();
            let end = if k == 0 {
                i + 1
            } else {
                let mut e = i + 1;
                for _ in 0..k {
                    e = stack.pop().expect("well-formed term");
                }
                e
            };
            ends[i] = end;
            stack.push(end);
        }
        ends
    }

    /// Token positions of the leaves, in leaf order.
    pub fn leaf_positions(&self) -> Vec<usize> {
        (0..self.toks.len()).filter(|&i| self.toks[i].arity() == 0).collect()
    }

    /// Number of leaves strictly before token `pos`.
    pub fn leaves_before(&self, pos: usize) -> usize {
        self.toks[..pos].iter().filter(|t| t.arity() == 0).count()
    }

    /// Replaces the subterm at `pos` by `u`.
    pub fn replace(&self, pos: usize, u: &Term<V>) -> Term<V> {
        let end = self.subterm_end(pos);
        let mut toks = Vec::with_capacity(self.toks.len() - (end - pos) + u.toks.len());
        toks.extend_from_slice(&self.toks[..pos]);
        toks.extend_from_slice(&u.toks);
        toks.extend_from_slice(&self.toks[end..]);
        Term { toks }
    }

    /// `t[j, u]`: replaces the `j`-th leaf (1-based) by `u`.
    pub fn leaf_subst(&self, j: usize, u: &Term<V>) -> Result<Term<V>> {
        let pos = self.leaf_position(j)?;
        Ok(self.replace(pos, u))
    }

    pub fn leaf_position(&self, j: usize) -> Result<usize> {
        let n = self.leaf_count();
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j, len: n });
        }
        Ok(self.toks.iter().enumerate().filter(|(_, t)| t.arity() == 0).nth(j - 1).map(|(i, _)| i).unwrap())
    }

    pub fn map_vars<W: Copy + Eq>(&self, mut f: impl FnMut(V) -> W) -> Term<W> {
        Term {
            toks: self
                .toks
                .iter()
                .map(|t| match *t {
                    Tok::Op(s, k) => Tok::Op(s, k),
                    Tok::Const(c) => Tok::Const(c),
                    Tok::Var(v) => Tok::Var(f(v)),
                })
                .collect(),
        }
    }

    /// Replaces every leaf by a term.
    pub fn map_leaves<W: Copy + Eq>(&self, mut f: impl FnMut(Leaf<V>) -> Term<W>) -> Term<W> {
        let mut toks = Vec::with_capacity(self.toks.len());
        for t in &self.toks {
            match *t {
                Tok::Op(s, k) => toks.push(Tok::Op(s, k)),
                Tok::Const(c) => toks.extend_from_slice(&f(Leaf::Const(c)).toks),
                Tok::Var(v) => toks.extend_from_slice(&f(Leaf::Var(v)).toks),
            }
        }
        Term { toks }
    }

    /// Returns the constant-free regular term with the same skeleton and the leaf assignment.
    pub fn regularize(&self) -> (Term<Z>, LeafSeq<V>) {
        let mut k = 0u32;
        let tbar = Term {
            toks: self
                .toks
                .iter()
                .map(|t| match *t {
                    Tok::Op(s, a) => Tok::Op(s, a),
                    _ => {
                        k += 1;
                        Tok::Var(Z(k))
                    }
                })
                .collect(),
        };
        (tbar, self.leaves())
    }

    /// Fills the leaves of a skeleton-equal term, in order.
    pub fn with_leaves(&self, labels: &[Leaf<V>]) -> Term<V> {
        let mut it = labels.iter();
        Term {
            toks: self
                .toks
                .iter()
                .map(|t| match *t {
                    Tok::Op(s, a) => Tok::Op(s, a),
                    _ => (*it.next().expect("enough labels")).into(),
                })
                .collect(),
        }
    }

    pub fn display<S: VarSyntax<V> + ?Sized>(&self, sig: &Signature, syn: &S, notation: Notation) -> String {
        let mut out = String::new();
        match notation {
            Notation::Prefix => {
                for (i, t) in self.toks.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    write_tok(sig, syn, t, &mut out);
                }
            }
            Notation::Functional => {
                self.write_functional(sig, syn, 0, &mut out);
            }
        }
        out
    }

    fn write_functional<S: VarSyntax<V> + ?Sized>(&self, sig: &Signature, syn: &S, pos: usize, out: &mut String) -> usize {
        let t = &self.toks[pos];
        write_tok(sig, syn, t, out);
        let mut p = pos + 1;
        if t.arity() > 0 {
            out.push('(');
            for i in 0..t.arity() {
                if i > 0 {
                    out.push(',');
                }
                p = self.write_functional(sig, syn, p, out);
            }
            out.push(')');
        }
        p
    }
}

fn write_tok<V: Copy, S: VarSyntax<V> + ?Sized>(sig: &Signature, syn: &S, t: &Tok<V>, out: &mut String) {
    match *t {
        Tok::Op(f, _) => out.push_str(sig.name(f)),
        Tok::Const(c) => out.push_str(sig.name(c)),
        Tok::Var(v) => syn.write_var(v, out),
    }
}

fn well_formed<V: Copy>(toks: &[Tok<V>]) -> bool {
    let mut need = 1isize;
    for (i, t) in toks.iter().enumerate() {
        if need == 0 {
            return i == toks.len();
        }
        need += t.arity() as isize - 1;
    }
    need == 0
}

/// Substitutes `assign[k-1]` for `z_k` in a template.
pub fn substitute<V: Copy + Eq>(template: &Term<Z>, assign: &[Term<V>]) -> Result<Term<V>> {
    let mut toks = Vec::new();
    for t in template.toks() {
        match *t {
            Tok::Op(s, a) => toks.push(Tok::Op(s, a)),
            Tok::Const(c) => toks.push(Tok::Const(c)),
            Tok::Var(Z(k)) => {
                let u = assign.get(k as usize - 1).ok_or(Error::IndexOutOfRange { index: k as usize, len: assign.len() })?;
                toks.extend_from_slice(u.toks());
            }
        }
    }
    Ok(Term { toks })
}

/// Returns the arity `n` if `t` is constant free with variable sequence `(z1, ..., zn)`.
pub fn is_regular(t: &Term<Z>) -> Option<usize> {
    if !t.is_constant_free() {
        return None;
    }
    let vars = t.var_seq();
    if vars.iter().enumerate().all(|(i, z)| z.0 as usize == i + 1) && !vars.is_empty() {
        Some(vars.len())
    } else {
        None
    }
}

fn tokenize(word: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in word.char_indices() {
        if ch.is_whitespace() || ch == '(' || ch == ')' || ch == ',' {
            if let Some(s) = start.take() {
                out.push(&word[s..i]);
            }
            if !ch.is_whitespace() {
                out.push(&word[i..i + 1]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(&word[s..]);
    }
    out
}

/// Parses a prefix word; functional notation `f(s1,...,sk)` is accepted as well.
pub fn parse_term<V: Copy + Eq, S: VarSyntax<V> + ?Sized>(sig: &Signature, syn: &S, word: &str) -> Result<Term<V>> {
    let toks = tokenize(word);
    let mut i = 0;
    let mut out = Vec::new();
    parse_at(sig, syn, &toks, &mut i, &mut out)?;
    if i != toks.len() {
        return parse_err(format!("trailing tokens after term: {}", toks[i..].join(" ")));
    }
    Ok(Term { toks: out })
}

/// Parses one self-delimiting term from a token stream (used by line formats).
pub(crate) fn parse_prefix_from<V: Copy + Eq, S: VarSyntax<V> + ?Sized>(
    sig: &Signature,
    syn: &S,
    words: &[&str],
    i: &mut usize,
) -> Result<Term<V>> {
    let mut out = Vec::new();
    parse_at(sig, syn, words, i, &mut out)?;
    Ok(Term { toks: out })
}

fn parse_at<V: Copy + Eq, S: VarSyntax<V> + ?Sized>(
    sig: &Signature,
    syn: &S,
    toks: &[&str],
    i: &mut usize,
    out: &mut Vec<Tok<V>>,
) -> Result<()> {
    let Some(&w) = toks.get(*i) else {
        return parse_err("unexpected end of term");
    };
    *i += 1;
    if let Some(s) = sig.lookup(w) {
        let k = sig.arity(s);
        if k == 0 {
            out.push(Tok::Const(s));
            if toks.get(*i) == Some(&"(") && toks.get(*i + 1) == Some(&")") {
                *i += 2;
            }
            return Ok(());
        }
        out.push(Tok::Op(s, k as u8));
        if toks.get(*i) == Some(&"(") {
            *i += 1;
            for a in 0..k {
                if a > 0 {
                    if toks.get(*i) != Some(&",") {
                        return parse_err(format!("{w} needs {k} arguments"));
                    }
                    *i += 1;
                }
                parse_at(sig, syn, toks, i, out)?;
            }
            if toks.get(*i) != Some(&")") {
                return parse_err(format!("{w} takes exactly {k} arguments"));
            }
            *i += 1;
        } else {
            for _ in 0..k {
                if *i >= toks.len() || matches!(toks[*i], ")" | ",") {
                    return parse_err(format!("{w} needs {k} arguments"));
                }
                parse_at(sig, syn, toks, i, out)?;
            }
        }
        return Ok(());
    }
    if matches!(w, "(" | ")" | ",") {
        return parse_err(format!("unexpected {w:?}"));
    }
    match syn.parse_var(w) {
        Some(v) => {
            out.push(Tok::Var(v));
            Ok(())
        }
        None => parse_err(format!("unknown token {w:?}")),
    }
}

/// All constant-free regular terms with exactly `ops` operation symbols, in a fixed order.
pub fn regular_shapes(sig: &Signature, ops: usize) -> Vec<Term<Z>> {
    let mut memo: HashMap<usize, Vec<Vec<Tok<Z>>>> = HashMap::new();
    raw_shapes(sig, ops, &mut memo)
        .into_iter()
        .map(|toks| {
            let t = Term { toks };
            t.regularize().0
        })
        .collect()
}

/// All regular shapes with at most `max_ops` operation symbols, ordered by size.
pub fn regular_shapes_upto(sig: &Signature, max_ops: usize) -> Vec<Term<Z>> {
    (0..=max_ops).flat_map(|k| regular_shapes(sig, k)).collect()
}

fn raw_shapes(sig: &Signature, ops: usize, memo: &mut HashMap<usize, Vec<Vec<Tok<Z>>>>) -> Vec<Vec<Tok<Z>>> {
    if let Some(v) = memo.get(&ops) {
        return v.clone();
    }
    let mut out = Vec::new();
    if ops == 0 {
        out.push(vec![Tok::Var(Z(1))]);
    } else {
        for (f, k) in sig.operations().collect::<Vec<_>>() {
            for split in compositions(ops - 1, k) {
                let mut acc: Vec<Vec<Tok<Z>>> = vec![vec![Tok::Op(f, k as u8)]];
                for &part in &split {
                    let sub = raw_shapes(sig, part, memo);
                    acc = acc
                        .iter()
                        .flat_map(|pre| {
                            sub.iter().map(move |s| {
                                let mut v = pre.clone();
                                v.extend_from_slice(s);
                                v
                            })
                        })
                        .collect();
                }
                out.extend(acc);
            }
        }
    }
    memo.insert(ops, out.clone());
    out
}

/// Ordered ways of writing at most `total` as `parts` non-negative summands.
pub fn compositions_upto(total: usize, parts: usize) -> Vec<Vec<usize>> {
    (0..=total).flat_map(|t| compositions(t, parts)).collect()
}

/// Ordered ways of writing `total` as `parts` non-negative summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
