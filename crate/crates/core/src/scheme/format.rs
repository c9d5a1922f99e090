use crate::amalgam::{Amalgam, XTerm};
use crate::closure::Translation;
use crate::error::{parse_err, Result};
use crate::signature::statements;
use crate::term::{parse_prefix_from, parse_term, Formal, Term, Z};

use super::{ColTag, RelTag, Scheme, Step};

fn term_of(am: &Amalgam, words: &[&str]) -> Result<XTerm> {
    if words.is_empty() {
        return parse_err("missing term");
    }
    parse_term(am.sig(), am, &words.join(" "))
}

fn split_at<'a>(words: &'a [&'a str], sep: &str, line: usize) -> Result<(&'a [&'a str], &'a [&'a str])> {
    match words.iter().position(|w| *w == sep) {
        Some(k) => Ok((&words[..k], &words[k + 1..])),
        None => parse_err(format!("line {line}: expected {sep:?}")),
    }
}

/// Reads the line format: `START t`, `INEQ s <= t`, `REL tag template slot fills.. u -> v`,
/// `PAR tag,tag,.. : s => t`. Without `START` the scheme starts at the first step.
pub fn parse_scheme(am: &Amalgam, text: &str) -> Result<Scheme> {
    let mut start: Option<XTerm> = None;
    let mut steps = Vec::new();
    for (line, stmt) in statements(text) {
        let words: Vec<&str> = stmt.split_whitespace().collect();
        let ctx = |e: crate::error::Error| crate::error::Error::Parse(format!("line {line}: {e}"));
        match words[0] {
            "START" => {
                if start.is_some() || !steps.is_empty() {
                    return parse_err(format!("line {line}: START must come first"));
                }
                start = Some(term_of(am, &words[1..]).map_err(ctx)?);
            }
            "INEQ" => {
                let (l, r) = split_at(&words[1..], "<=", line)?;
                steps.push(Step::Leq { lhs: term_of(am, l).map_err(ctx)?, rhs: term_of(am, r).map_err(ctx)? });
            }
            "PAR" => {
                let (cols, rest) = split_at(&words[1..], ":", line)?;
                let cols = cols
                    .join("")
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        ColTag::from_name(s).ok_or_else(|| crate::error::Error::Parse(format!("line {line}: unknown column tag {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (l, r) = split_at(rest, "=>", line)?;
                steps.push(Step::Par { lhs: term_of(am, l).map_err(ctx)?, rhs: term_of(am, r).map_err(ctx)?, cols });
            }
            "REL" => {
                let Some(tag) = words.get(1).and_then(|w| RelTag::from_name(w)) else {
                    return parse_err(format!("line {line}: unknown relation tag"));
                };
                let mut i = 2;
                let template: Term<Z> = parse_prefix_from(am.sig(), &Formal, &words, &mut i).map_err(ctx)?;
                let Some(slot) = words.get(i).and_then(|w| w.parse::<usize>().ok()) else {
                    return parse_err(format!("line {line}: expected a slot number"));
                };
                i += 1;
                let n = template.leaf_count();
                let mut fills = Vec::with_capacity(n.saturating_sub(1));
                for _ in 1..n {
                    let Some(w) = words.get(i) else { return parse_err(format!("line {line}: missing fillers")) };
                    let t = term_of(am, &[w]).map_err(ctx)?;
                    match t.as_leaf() {
                        Some(l) => fills.push(l),
                        None => return parse_err(format!("line {line}: filler {w} is not a leaf")),
                    }
                    i += 1;
                }
                let p = Translation::new(template, slot, fills).map_err(ctx)?;
                let (u, v) = split_at(&words[i..], "->", line)?;
                steps.push(Step::Rel { tag, p, from: term_of(am, u).map_err(ctx)?, to: term_of(am, v).map_err(ctx)? });
            }
            other => return parse_err(format!("line {line}: unknown statement {other:?}")),
        }
    }
    let start = match (start, steps.first()) {
        (Some(s), _) => s,
        (None, Some(first)) => first.lhs(),
        (None, None) => return parse_err("empty scheme needs a START line"),
    };
    Ok(Scheme { start, steps })
}

pub fn print_scheme(am: &Amalgam, sch: &Scheme) -> String {
    let mut out = format!("START {}\n", am.show(&sch.start));
    for s in &sch.steps {
        match s {
            Step::Leq { lhs, rhs } => out.push_str(&format!("INEQ {} <= {}\n", am.show(lhs), am.show(rhs))),
            Step::Par { lhs, rhs, cols } => {
                let cols: Vec<&str> = cols.iter().map(|c| c.name()).collect();
                out.push_str(&format!("PAR {} : {} => {}\n", cols.join(","), am.show(lhs), am.show(rhs)));
            }
            Step::Rel { tag, p, from, to } => {
                let p = p.display(am.sig(), |l| am.show_leaf(*l));
                out.push_str(&format!("REL {} {} {} -> {}\n", tag.name(), p, am.show(from), am.show(to)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::make_special;
    use crate::oalg::fixtures::ch3;
    use crate::scheme::validate_scheme;
    use std::sync::Arc;

    #[test]
    fn round_trip() {
        let sp = make_special(Arc::new(ch3()), &[]).unwrap();
        let am = &sp.am;
        let text = "\
START e0@1
INEQ e0@1 <= e0@1
REL H' z1 1 e0@1 -> e0@2
REL R2^-1 z1 1 e0@2 -> f e0@2 c
PAR I,I : f e0@2 c => f e0@2 c
REL R2 z1 1 f e0@2 c -> e0@2
";
        let sch = parse_scheme(am, text).unwrap();
        assert!(validate_scheme(am, &sch).is_empty(), "{:?}", validate_scheme(am, &sch));
        assert_eq!(print_scheme(am, &sch), text);
        assert_eq!(parse_scheme(am, &print_scheme(am, &sch)).unwrap(), sch);
    }

    #[test]
    fn translation_with_fillers() {
        let sp = make_special(Arc::new(ch3()), &[]).unwrap();
        let am = &sp.am;
        let text = "REL H' f z1 z2 2 e1@1 e2@1 -> e2@2\n";
        let sch = parse_scheme(am, text).unwrap();
        assert_eq!(am.show(&sch.start), "f e1@1 e2@1");
        assert_eq!(am.show(&sch.end()), "f e1@1 e2@2");
        assert!(validate_scheme(am, &sch).is_empty());
    }

    #[test]
    fn errors() {
        let sp = make_special(Arc::new(ch3()), &[]).unwrap();
        let am = &sp.am;
        assert!(parse_scheme(am, "").is_err());
        assert!(parse_scheme(am, "INEQ e0@1 e1@1").is_err());
        assert!(parse_scheme(am, "REL X z1 1 e0@1 -> e0@2").is_err());
        assert!(parse_scheme(am, "REL H' f z1 z2 1 e0@1 -> e0@2").is_err());
        let bad = parse_scheme(am, "INEQ e1@1 <= e0@1").unwrap();
        assert_eq!(validate_scheme(am, &bad).len(), 1);
    }
}
