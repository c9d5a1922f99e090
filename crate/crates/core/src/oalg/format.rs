use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::{table_len, Elem, OpTable, OrderedAlgebra};
use crate::error::{parse_err, Error, Result};
use crate::relation::BitRel;
use crate::signature::{statements, Signature};

/// A parsed `.oalg` file: the algebra plus any `pair` lines.
#[derive(Clone, Debug)]
pub struct AlgebraFile {
    pub algebra: OrderedAlgebra,
    pub sig_path: String,
    pub pairs: Vec<(Elem, Elem)>,
}

/// Parses `.oalg` text. `resolve` loads the signature named on the `algebra` line.
pub fn parse_algebra(text: &str, resolve: &mut dyn FnMut(&str) -> Result<Arc<Signature>>) -> Result<AlgebraFile> {
    let mut header: Option<(String, String, Arc<Signature>)> = None;
    let mut elems: Vec<String> = Vec::new();
    let mut index: HashMap<String, Elem> = HashMap::new();
    let mut order_pairs = Vec::new();
    let mut entries: Vec<(usize, String, Vec<String>, String)> = Vec::new();
    let mut consts: Vec<(usize, String, String)> = Vec::new();
    let mut pair_lines = Vec::new();
    for (no, stmt) in statements(text) {
        let words: Vec<&str> = stmt.split_whitespace().collect();
        match words.first().copied() {
            Some("algebra") => match words.as_slice() {
                ["algebra", name, "over", path] => header = Some((name.to_string(), path.to_string(), resolve(path)?)),
                _ => return parse_err(format!("line {no}: expected `algebra <name> over <sigfile>`")),
            },
            Some("elements") => {
                for w in &words[1..] {
                    crate::signature::check_name(w).map_err(|e| Error::Parse(format!("line {no}: {e}")))?;
                    if index.insert(w.to_string(), elems.len()).is_some() {
                        return parse_err(format!("line {no}: duplicate element {w}"));
                    }
                    elems.push(w.to_string());
                }
            }
            Some("order") => match words.as_slice() {
                ["order", a, "<=", b] => order_pairs.push((no, a.to_string(), b.to_string())),
                _ => return parse_err(format!("line {no}: expected `order <a> <= <b>`")),
            },
            Some("pair") => match words.as_slice() {
                ["pair", a, b] => pair_lines.push((no, a.to_string(), b.to_string())),
                _ => return parse_err(format!("line {no}: expected `pair <a> <b>`")),
            },
            Some("const") => match words.as_slice() {
                ["const", c, "=", e] => consts.push((no, c.to_string(), e.to_string())),
                _ => return parse_err(format!("line {no}: expected `const <c> = <e>`")),
            },
            Some("op") => {
                let rest = stmt[2..].trim();
                let Some((name, body)) = rest.split_once(':') else {
                    return parse_err(format!("line {no}: expected `op <f>: (args) -> <e>`"));
                };
                let Some((args, out)) = body.split_once("->") else {
                    return parse_err(format!("line {no}: missing `->`"));
                };
                let args = args.trim().trim_start_matches('(').trim_end_matches(')');
                let args: Vec<String> = args.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                entries.push((no, name.trim().to_string(), args, out.trim().to_string()));
            }
            _ => return parse_err(format!("line {no}: unknown declaration {stmt:?}")),
        }
    }
    let Some((name, sig_path, sig)) = header else {
        return parse_err("missing `algebra <name> over <sigfile>` line");
    };
    if elems.is_empty() {
        return parse_err("missing `elements` line");
    }
    let n = elems.len();
    let el = |no: usize, e: &str| -> Result<Elem> {
        index.get(e).copied().ok_or_else(|| Error::Parse(format!("line {no}: unknown element {e:?}")))
    };
    let mut order = BitRel::identity(n);
    for (no, a, b) in &order_pairs {
        order.insert(el(*no, a)?, el(*no, b)?);
    }
    let order = order.rt_closure();
    let mut tables: Vec<Option<OpTable>> = Vec::new();
    let mut filled: Vec<Vec<bool>> = Vec::new();
    for (_, s) in sig.symbols() {
        if s.arity == 0 {
            tables.push(None);
            filled.push(Vec::new());
        } else {
            let len = table_len(n, s.arity)?;
            tables.push(Some(OpTable { arity: s.arity, n, data: vec![0; len] }));
            filled.push(vec![false; len]);
        }
    }
    for (no, f, args, out) in &entries {
        let s = sig.lookup(f).ok_or_else(|| Error::Parse(format!("line {no}: unknown operation {f:?}")))?;
        let k = sig.arity(s);
        if k == 0 {
            return parse_err(format!("line {no}: {f} is a constant; use `const`"));
        }
        if args.len() != k {
            return parse_err(format!("line {no}: {f} takes {k} arguments"));
        }
        let xs: Vec<Elem> = args.iter().map(|a| el(*no, a)).collect::<Result<_>>()?;
        let v = el(*no, out)?;
        let t = tables[s.index()].as_mut().unwrap();
        let i = t.index(&xs);
        if filled[s.index()][i] && t.data[i] as Elem != v {
            return parse_err(format!("line {no}: conflicting entry for {f}({})", args.join(",")));
        }
        t.data[i] = v as u32;
        filled[s.index()][i] = true;
    }
    for (s, sym) in sig.symbols() {
        if let Some(missing) = filled[s.index()].iter().position(|f| !f) {
            let mut xs = vec![0; sym.arity];
            let mut m = missing;
            for slot in xs.iter_mut().rev() {
                *slot = m % n;
                m /= n;
            }
            let names: Vec<&str> = xs.iter().map(|&x| elems[x].as_str()).collect();
            return parse_err(format!("table of {} is not total: missing {}({})", sym.name, sym.name, names.join(",")));
        }
    }
    let mut cvals: Vec<Option<Elem>> = vec![None; sig.len()];
    for (no, c, e) in &consts {
        let s = sig.lookup(c).filter(|&s| sig.arity(s) == 0);
        let s = s.ok_or_else(|| Error::Parse(format!("line {no}: unknown constant {c:?}")))?;
        cvals[s.index()] = Some(el(*no, e)?);
    }
    for c in sig.constants() {
        if cvals[c.index()].is_none() {
            return parse_err(format!("constant {} has no value", sig.name(c)));
        }
    }
    let mut pairs = Vec::new();
    for (no, a, b) in &pair_lines {
        pairs.push((el(*no, a)?, el(*no, b)?));
    }
    let algebra = OrderedAlgebra::from_parts(sig, name, elems, order, tables, cvals);
    Ok(AlgebraFile { algebra, sig_path, pairs })
}

/// Reads a `.oalg` file, resolving its signature path relative to the file.
pub fn load_algebra(path: &Path) -> Result<AlgebraFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut resolve = |p: &str| -> Result<Arc<Signature>> {
        let sp = dir.join(p);
        let t = std::fs::read_to_string(&sp).map_err(|e| Error::Parse(format!("{}: {e}", sp.display())))?;
        Ok(Arc::new(Signature::parse(&t)?))
    };
    parse_algebra(&text, &mut resolve)
}

/// `.oalg` text; `order` lines list the covering pairs.
pub fn print_algebra(a: &OrderedAlgebra, sig_path: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "algebra {} over {}", a.name(), sig_path);
    let _ = writeln!(out, "elements {}", a.elems().join(" "));
    let n = a.size();
    for x in 0..n {
        for y in 0..n {
            let covers = x != y && a.leq(x, y) && !(0..n).any(|z| z != x && z != y && a.leq(x, z) && a.leq(z, y));
            if covers {
                let _ = writeln!(out, "order {} <= {}", a.elem_name(x), a.elem_name(y));
            }
        }
    }
    for (f, k) in a.sig().operations() {
        super::for_each_tuple(n, k, |args| {
            let names: Vec<&str> = args.iter().map(|&x| a.elem_name(x)).collect();
            let _ = writeln!(out, "op {}: ({}) -> {}", a.sig().name(f), names.join(","), a.elem_name(a.apply(f, args)));
        });
    }
    for c in a.sig().constants() {
        let _ = writeln!(out, "const {} = {}", a.sig().name(c), a.elem_name(a.const_val(c)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oalg::fixtures::*;

    fn resolver() -> impl FnMut(&str) -> Result<Arc<Signature>> {
        |_| Ok(sig1())
    }

    #[test]
    fn round_trip() {
        let a = ch3();
        let text = print_algebra(&a, "sig1.sig");
        let f = parse_algebra(&text, &mut resolver()).unwrap();
        assert_eq!(f.algebra, a);
        assert_eq!(f.sig_path, "sig1.sig");
    }

    #[test]
    fn partial_table_rejected() {
        let text = "algebra T over s.sig\nelements a\nop f: (a,a) -> a\nconst c = a\nconst d = a\n";
        let e = parse_algebra(text, &mut resolver()).unwrap_err();
        assert!(matches!(e, Error::Parse(m) if m.contains("not total") && m.contains("g(a,a,a)")));
    }

    #[test]
    fn pairs_and_errors() {
        let mut text = print_algebra(&ch3(), "s.sig");
        text.push_str("pair e2 e0\n");
        let f = parse_algebra(&text, &mut resolver()).unwrap();
        assert_eq!(f.pairs, vec![(2, 0)]);
        for bad in ["elements a\n", "algebra T over s.sig\nelements a a\n", "algebra T over s.sig\nelements a\nfoo\n"] {
            assert!(matches!(parse_algebra(bad, &mut resolver()), Err(Error::Parse(_))), "{bad}");
        }
    }
}
