//! Operation symbols with arities and the order on constant symbols.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::relation::BitRel;

pub const MAX_SYMBOLS: usize = 64;
pub const MAX_ARITY: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub u16);

impl Sym {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// A finite signature. `const_order` is kept reflexive-transitively closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, Sym>,
    const_order: BitRel,
}

/// Rejects names that would collide with term syntax.
pub(crate) fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || "(),;#".contains(c)) || name == "<=" || name == "->" {
        return Err(Error::Validation(format!("invalid name {name:?}")));
    }
    Ok(())
}

pub(crate) fn is_formal_name(name: &str) -> bool {
    name.len() > 1 && name.starts_with('z') && name[1..].chars().all(|c| c.is_ascii_digit())
}

/// Splits a declaration file into trimmed non-empty lines; `#` starts a comment and `;` separates statements.
pub(crate) fn statements(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().flat_map(|(no, line)| {
        let line = line.split('#').next().unwrap_or("");
        line.split(';').map(str::trim).filter(|s| !s.is_empty()).map(move |s| (no + 1, s))
    })
}

impl Signature {
    /// Builds a signature; `order` may be any relation on constants and is closed here.
    pub fn new(symbols: Vec<Symbol>, order: &[(String, String)]) -> Result<Self> {
        if symbols.len() > MAX_SYMBOLS {
            return Err(Error::Validation(format!("more than {MAX_SYMBOLS} symbols")));
        }
        let mut by_name = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            check_name(&s.name)?;
            if is_formal_name(&s.name) {
                return Err(Error::Validation(format!("symbol {} uses the reserved formal-variable namespace", s.name)));
            }
            if s.arity > MAX_ARITY {
                return Err(Error::Validation(format!("arity of {} exceeds {MAX_ARITY}", s.name)));
            }
            if by_name.insert(s.name.clone(), Sym(i as u16)).is_some() {
                return Err(Error::Validation(format!("duplicate symbol {}", s.name)));
            }
        }
        let mut rel = BitRel::empty(symbols.len());
        for (a, b) in order {
            let lookup = |n: &String| -> Result<usize> {
                let s = *by_name.get(n).ok_or_else(|| Error::Validation(format!("unknown symbol {n} in order")))?;
                if symbols[s.index()].arity != 0 {
                    return Err(Error::Validation(format!("order on non-constant symbol {n}")));
                }
                Ok(s.index())
            };
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            rel.insert(ia, ib);
        }
        let rel = rel.rt_closure();
        if let Some(&(a, b)) = rel.antisymmetry_violations().first() {
            return Err(Error::Validation(format!(
                "constant order is not antisymmetric: {} <= {} <= {}",
                symbols[a].name, symbols[b].name, symbols[a].name
            )));
        }
        Ok(Signature { symbols, by_name, const_order: rel })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut order = Vec::new();
        for (no, stmt) in statements(text) {
            let words: Vec<&str> = stmt.split_whitespace().collect();
            match words.as_slice() {
                ["op", name, arity] => {
                    let arity = arity.parse::<usize>().or_else(|_| parse_err(format!("line {no}: bad arity {arity:?}")))?;
                    symbols.push(Symbol { name: name.to_string(), arity });
                }
                ["const", name] => symbols.push(Symbol { name: name.to_string(), arity: 0 }),
                ["order", a, "<=", b] => order.push((a.to_string(), b.to_string())),
                _ => return parse_err(format!("line {no}: malformed declaration {stmt:?}")),
            }
        }
        Self::new(symbols, &order)
    }

    /// Canonical text form; `order` lines list every non-reflexive pair of the closure.
    pub fn print(&self) -> String {
        let mut out = String::new();
        for s in &self.symbols {
            if s.arity == 0 {
                let _ = writeln!(out, "const {}", s.name);
            } else {
                let _ = writeln!(out, "op {} {}", s.name, s.arity);
            }
        }
        for (a, b) in self.const_order.pairs() {
            if a != b {
                let _ = writeln!(out, "order {} <= {}", self.symbols[a].name, self.symbols[b].name);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Sym, &Symbol)> {
        self.symbols.iter().enumerate().map(|(i, s)| (Sym(i as u16), s))
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.symbols[s.index()].name
    }

    pub fn arity(&self, s: Sym) -> usize {
        self.symbols[s.index()].arity
    }

    pub fn constants(&self) -> impl Iterator<Item = Sym> + '_ {
        self.symbols().filter(|(_, s)| s.arity == 0).map(|(i, _)| i)
    }

    /// Symbols of positive arity.
    pub fn operations(&self) -> impl Iterator<Item = (Sym, usize)> + '_ {
        self.symbols().filter(|(_, s)| s.arity > 0).map(|(i, s)| (i, s.arity))
    }

    #[inline]
    pub fn const_leq(&self, a: Sym, b: Sym) -> bool {
        self.const_order.contains(a.index(), b.index())
    }

    /// Non-reflexive pairs of the closed constant order.
    pub fn const_order_pairs(&self) -> impl Iterator<Item = (Sym, Sym)> + '_ {
        self.const_order.pairs().filter(|(a, b)| a != b).map(|(a, b)| (Sym(a as u16), Sym(b as u16)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig1() {
        let s = Signature::parse("op f 2; op g 3; const c; const d; order c <= d").unwrap();
        assert_eq!(s.arity(s.lookup("f").unwrap()), 2);
        assert_eq!(s.arity(s.lookup("g").unwrap()), 3);
        let (c, d) = (s.lookup("c").unwrap(), s.lookup("d").unwrap());
        assert!(s.const_leq(c, d) && !s.const_leq(d, c) && s.const_leq(c, c));
    }

    #[test]
    fn single_constant_is_reflexive() {
        let s = Signature::parse("const c").unwrap();
        let c = s.lookup("c").unwrap();
        assert!(s.const_leq(c, c));
        assert_eq!(s.const_order_pairs().count(), 0);
    }

    #[test]
    fn antisymmetry_rejected() {
        let e = Signature::parse("const c; const d; order c <= d; order d <= c").unwrap_err();
        assert!(matches!(e, Error::Validation(_)));
    }

    #[test]
    fn other_rejections() {
        assert!(matches!(Signature::parse("op f 2; order f <= f"), Err(Error::Validation(_))));
        assert!(matches!(Signature::parse("const c; const c"), Err(Error::Validation(_))));
        assert!(matches!(Signature::parse("op f"), Err(Error::Parse(_))));
        assert!(matches!(Signature::parse("op f 17"), Err(Error::Validation(_))));
        assert!(matches!(Signature::parse("const z3"), Err(Error::Validation(_))));
    }

    #[test]
    fn transitive_closure_of_order() {
        let s = Signature::parse("const a\nconst b\nconst c # three\norder a <= b\norder b <= c").unwrap();
        assert!(s.const_leq(s.lookup("a").unwrap(), s.lookup("c").unwrap()));
    }

    #[test]
    fn print_round_trip() {
        for text in
            ["op f 2; op g 3; const c; const d; order c <= d", "const c", "op h 1", "const a; const b; const c; order a <= b; order b <= c"]
        {
            let s = Signature::parse(text).unwrap();
            assert_eq!(Signature::parse(&s.print()).unwrap(), s);
        }
    }
}
