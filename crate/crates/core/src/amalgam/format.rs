use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::{make_special, Amalgam, SpecialAmalgam, Tagging};
use crate::error::{parse_err, Error, Result};
use crate::oalg::{load_algebra, Elem, Homomorphism, OrderedAlgebra};
use crate::signature::statements;

/// A parsed `.amalgam` file.
#[derive(Clone, Debug)]
pub struct AmalgamFile {
    pub am: Amalgam,
    /// Present for `special over` files.
    pub special: Option<SpecialAmalgam>,
}

type Resolver<'a> = dyn FnMut(&str) -> Result<Arc<OrderedAlgebra>> + 'a;

fn elem_of(a: &OrderedAlgebra, name: &str, line: usize) -> Result<Elem> {
    a.elem(name).ok_or_else(|| Error::Parse(format!("line {line}: {name:?} is not an element of {}", a.name())))
}

/// Parses `.amalgam` text. Either `special over <oalg> seed <e>..`, or the lines
/// `C <oalg>`, `A1 <oalg>`, `A2 <oalg>`, `embed phi1: <c> -> <a>`, `embed phi2: <c> -> <b>`
/// and optionally `tagging off`.
pub fn parse_amalgam(text: &str, resolve: &mut Resolver<'_>) -> Result<AmalgamFile> {
    let mut algs: [Option<Arc<OrderedAlgebra>>; 3] = [None, None, None];
    let mut embeds: Vec<(usize, usize, String, String)> = Vec::new();
    let mut tagging = Tagging::Auto;
    let mut special = None;
    for (line, stmt) in statements(text) {
        let words: Vec<&str> = stmt.split_whitespace().collect();
        match words.as_slice() {
            ["special", "over", path, rest @ ..] => {
                let seed_names = match rest {
                    [] => &[][..],
                    ["seed", names @ ..] => names,
                    _ => return parse_err(format!("line {line}: expected `special over <oalg> seed <elements>`")),
                };
                let base = resolve(path)?;
                let seed = seed_names.iter().map(|n| elem_of(&base, n, line)).collect::<Result<Vec<_>>>()?;
                special = Some(make_special(base, &seed)?);
            }
            [slot @ ("C" | "A1" | "A2"), path] => {
                let k = match *slot {
                    "C" => 0,
                    "A1" => 1,
                    _ => 2,
                };
                if algs[k].is_some() {
                    return parse_err(format!("line {line}: {slot} given twice"));
                }
                algs[k] = Some(resolve(path)?);
            }
            ["embed", which, c, "->", a] => {
                let side = match *which {
                    "phi1:" => 1,
                    "phi2:" => 2,
                    _ => return parse_err(format!("line {line}: expected `embed phi1:` or `embed phi2:`")),
                };
                embeds.push((line, side, c.to_string(), a.to_string()));
            }
            ["tagging", "off"] => tagging = Tagging::Off,
            ["tagging", "auto"] => tagging = Tagging::Auto,
            _ => return parse_err(format!("line {line}: unknown statement {stmt:?}")),
        }
    }
    if let Some(sp) = special {
        if algs.iter().any(Option::is_some) || !embeds.is_empty() {
            return parse_err("`special over` cannot be combined with C, A1, A2 or embed lines");
        }
        let mut am = sp.am.clone();
        am.tagging = tagging;
        let sp = SpecialAmalgam { am: am.clone(), ..sp };
        return Ok(AmalgamFile { am, special: Some(sp) });
    }
    let [Some(c), Some(a1), Some(a2)] = algs else {
        return parse_err("missing one of the C, A1, A2 lines");
    };
    let mut phi: [Vec<Option<Elem>>; 2] = [vec![None; c.size()], vec![None; c.size()]];
    for (line, side, cn, an) in embeds {
        let target = if side == 1 { &a1 } else { &a2 };
        let (x, y) = (elem_of(&c, &cn, line)?, elem_of(target, &an, line)?);
        let slot = &mut phi[side - 1][x];
        if slot.is_some_and(|v| v != y) {
            return parse_err(format!("line {line}: phi{side} maps {cn} twice"));
        }
        *slot = Some(y);
    }
    let total = |k: usize| -> Result<Vec<Elem>> {
        phi[k]
            .iter()
            .enumerate()
            .map(|(x, v)| v.ok_or_else(|| Error::Parse(format!("phi{} has no image for {}", k + 1, c.elem_name(x)))))
            .collect()
    };
    let (p1, p2) = (total(0)?, total(1)?);
    let mut am = Amalgam::new(c, a1, a2, p1, p2);
    am.tagging = tagging;
    Ok(AmalgamFile { am, special: None })
}

/// Parses `.hom` text: `hom <name> from <oalg> to <oalg>` and `map <a> -> <b>` lines.
pub fn parse_hom(text: &str, resolve: &mut Resolver<'_>) -> Result<Homomorphism> {
    let mut ends: Option<(Arc<OrderedAlgebra>, Arc<OrderedAlgebra>)> = None;
    let mut pairs = Vec::new();
    for (line, stmt) in statements(text) {
        let words: Vec<&str> = stmt.split_whitespace().collect();
        match words.as_slice() {
            ["hom", _name, "from", a, "to", b] => {
                if ends.is_some() {
                    return parse_err(format!("line {line}: second `hom` line"));
                }
                ends = Some((resolve(a)?, resolve(b)?));
            }
            ["map", a, "->", b] => pairs.push((line, a.to_string(), b.to_string())),
            _ => return parse_err(format!("line {line}: unknown statement {stmt:?}")),
        }
    }
    let Some((dom, cod)) = ends else { return parse_err("missing `hom <name> from <oalg> to <oalg>` line") };
    let mut map: Vec<Option<Elem>> = vec![None; dom.size()];
    for (line, a, b) in pairs {
        let (x, y) = (elem_of(&dom, &a, line)?, elem_of(&cod, &b, line)?);
        if map[x].is_some_and(|v| v != y) {
            return parse_err(format!("line {line}: {a} is mapped twice"));
        }
        map[x] = Some(y);
    }
    let map = map
        .iter()
        .enumerate()
        .map(|(x, v)| v.ok_or_else(|| Error::Parse(format!("no image for {}", dom.elem_name(x)))))
        .collect::<Result<Vec<_>>>()?;
    Homomorphism::new(dom, cod, map)
}

fn file_resolver(path: &Path) -> impl FnMut(&str) -> Result<Arc<OrderedAlgebra>> {
    let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut cache: HashMap<PathBuf, Arc<OrderedAlgebra>> = HashMap::new();
    move |p: &str| {
        let full = dir.join(p);
        if let Some(a) = cache.get(&full) {
            return Ok(a.clone());
        }
        let a = Arc::new(load_algebra(&full)?.algebra);
        cache.insert(full, a.clone());
        Ok(a)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads an `.amalgam` file; algebra paths are relative to the file.
pub fn load_amalgam(path: &Path) -> Result<AmalgamFile> {
    parse_amalgam(&read(path)?, &mut file_resolver(path))
}

/// Reads a `.hom` file; algebra paths are relative to the file.
pub fn load_hom(path: &Path) -> Result<Homomorphism> {
    parse_hom(&read(path)?, &mut file_resolver(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::validate_amalgam;
    use crate::oalg::fixtures::ch3;

    fn resolver() -> impl FnMut(&str) -> Result<Arc<OrderedAlgebra>> {
        let a = Arc::new(ch3());
        let c = Arc::new(a.subalgebra(&[0, 2], "C").unwrap());
        move |p: &str| match p {
            "ch3.oalg" => Ok(a.clone()),
            "c.oalg" => Ok(c.clone()),
            _ => parse_err(format!("no file {p}")),
        }
    }

    #[test]
    fn special_file() {
        let f = parse_amalgam("special over ch3.oalg seed e0 e2", &mut resolver()).unwrap();
        let sp = f.special.unwrap();
        assert_eq!(sp.c_elems, vec![0, 2]);
        assert!(validate_amalgam(&f.am).is_empty());
    }

    #[test]
    fn explicit_file() {
        let text =
            "C c.oalg\nA1 ch3.oalg\nA2 ch3.oalg\nembed phi1: e0 -> e0\nembed phi1: e2 -> e2\nembed phi2: e0 -> e0\nembed phi2: e2 -> e2\n";
        let f = parse_amalgam(text, &mut resolver()).unwrap();
        assert!(f.special.is_none());
        assert!(f.am.is_special());
        assert!(validate_amalgam(&f.am).is_empty());
        let bad =
            "C c.oalg\nA1 ch3.oalg\nA2 ch3.oalg\nembed phi1: e0 -> e0\nembed phi1: e2 -> e0\nembed phi2: e0 -> e0\nembed phi2: e2 -> e2\n";
        let f = parse_amalgam(bad, &mut resolver()).unwrap();
        assert!(validate_amalgam(&f.am).iter().any(|m| m.contains("phi1 is not injective")));
        assert!(parse_amalgam("C c.oalg\nA1 ch3.oalg", &mut resolver()).is_err());
        assert!(parse_amalgam("C c.oalg\nA1 ch3.oalg\nA2 ch3.oalg\nembed phi1: e0 -> e0", &mut resolver()).is_err());
    }

    #[test]
    fn hom_file() {
        let text = "hom incl from c.oalg to ch3.oalg\nmap e0 -> e0\nmap e2 -> e2\n";
        let h = parse_hom(text, &mut resolver()).unwrap();
        assert_eq!(h.map, vec![0, 2]);
        assert!(parse_hom("hom h from c.oalg to ch3.oalg\nmap e0 -> e0", &mut resolver()).is_err());
        assert!(parse_hom("hom h from c.oalg to ch3.oalg\nmap e1 -> e0", &mut resolver()).is_err());
    }
}
