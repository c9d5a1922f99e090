use std::path::Path;
use std::sync::Arc;

use oalg::amalgam::{
    dominion_special, epi_check, load_amalgam, load_hom, make_special, pushout_equal, separator_search, validate_amalgam, Amalgam, Budget,
    DominionStatus, EpiOutcome, EqOutcome, SearchStats, Separator, SeparatorOutcome,
};
use oalg::closure::{gen_compatible_quasiorder, gen_order_congruence, Closure, FiniteScheme};
use oalg::oalg::{is_order_congruence, load_algebra, nonregular_quotient, print_algebra, regular_quotient, Elem, OrderedAlgebra};
use oalg::scheme::{extract_center, normalize, parse_scheme, print_scheme, validate_scheme, NormalizeOutcome, Scheme};
use oalg::selftest::{self, Config};
use oalg::signature::Signature;
use oalg::{Error, Exec};

use crate::report::Report;
use crate::{Cli, Command, SearchFlags};

pub const OK: u8 = 0;
pub const VIOLATION: u8 = 1;
pub const PARSE: u8 = 2;
pub const INCONCLUSIVE: u8 = 3;

/// A failure with its exit code.
struct Fail(u8, String);

type Res<T> = Result<T, Fail>;

/// Errors while reading input files.
fn load<T>(r: oalg::Result<T>) -> Res<T> {
    r.map_err(|e| Fail(PARSE, e.to_string()))
}

/// Errors from the operations themselves.
fn op<T>(r: oalg::Result<T>) -> Res<T> {
    r.map_err(|e| {
        let code = match e {
            Error::Parse(_) | Error::UnboundVariable(_) => PARSE,
            _ => VIOLATION,
        };
        Fail(code, e.to_string())
    })
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Fail(PARSE, format!("{}: {e}", path.display())))
}

pub fn run(cli: &Cli) -> (u8, String) {
    let mut rep = Report::new(cli.format);
    let code = match dispatch(&cli.command, &mut rep) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            rep.record("error", &[("code", code.to_string()), ("message", msg.clone())], format!("error: {msg}"));
            code
        }
    };
    (code, rep.finish())
}

fn dispatch(cmd: &Command, rep: &mut Report) -> Res<u8> {
    match cmd {
        Command::Validate { file, amalgam } => validate(file, amalgam.as_deref(), rep),
        Command::Closure { algebra, pairs, congruence } => closure(algebra, pairs, *congruence, rep),
        Command::Quotient { algebra, pairs, nonregular } => quotient(algebra, pairs, *nonregular, rep),
        Command::PushoutEq { amalgam, s, t, search } => pushout_eq(amalgam, s, t, search, rep),
        Command::Dominion { special, seed_elems, search, max_codomain } => dominion(special, seed_elems, search, *max_codomain, rep),
        Command::Epi { hom, max_codomain } => epi(hom, *max_codomain, rep),
        Command::Normalize { amalgam, scheme, reverse, max_iters } => normalize_cmd(amalgam, scheme, reverse.as_deref(), *max_iters, rep),
        Command::Selftest { seed, criteria, sequential } => selftest_cmd(*seed, criteria, *sequential, rep),
    }
}

fn budget(s: &SearchFlags) -> Budget {
    Budget::new(s.max_scheme_len as usize, s.max_term_ops as usize)
}

fn violations(rep: &mut Report, file: &Path, found: &[String]) -> u8 {
    for v in found {
        rep.record("violation", &[("message", v.clone())], format!("violation: {v}"));
    }
    let name = file.display().to_string();
    rep.record(
        "valid",
        &[("file", name.clone()), ("violations", found.len().to_string())],
        if found.is_empty() { format!("{name}: valid") } else { format!("{name}: {} violations", found.len()) },
    );
    if found.is_empty() {
        OK
    } else {
        VIOLATION
    }
}

fn validate(file: &Path, amalgam: Option<&Path>, rep: &mut Report) -> Res<u8> {
    let ext = file.extension().and_then(|e| e.to_str()).unwrap_or("");
    let found: Vec<String> = match ext {
        "sig" => {
            let sig = load(Signature::parse(&read(file)?))?;
            rep.record("signature", &[("symbols", sig.len().to_string())], format!("{} symbols", sig.len()));
            Vec::new()
        }
        "oalg" => {
            let a = load(load_algebra(file))?.algebra;
            a.validate().iter().map(|v| a.describe(v)).collect()
        }
        "amalgam" => validate_amalgam(&load(load_amalgam(file))?.am),
        "hom" => {
            let h = load(load_hom(file))?;
            let mut out: Vec<String> = Vec::new();
            for alg in [&h.dom, &h.cod] {
                out.extend(alg.validate().iter().map(|v| format!("{}: {}", alg.name(), alg.describe(v))));
            }
            let chk = h.check();
            if !chk.is_hom {
                out.push("the map does not commute with the operations".into());
            }
            if !chk.is_monotone {
                out.push("the map is not monotone".into());
            }
            out
        }
        "scheme" => {
            let Some(am_path) = amalgam else {
                return Err(Fail(PARSE, "a scheme is validated against --amalgam <file>".into()));
            };
            let am = load(load_amalgam(am_path))?.am;
            let sch = load(parse_scheme(&am, &read(file)?))?;
            validate_scheme(&am, &sch)
        }
        _ => return Err(Fail(PARSE, format!("{}: unknown file kind {ext:?}", file.display()))),
    };
    Ok(violations(rep, file, &found))
}

fn generators(a: &OrderedAlgebra, from_file: &[(Elem, Elem)], args: &[String]) -> Res<Vec<(Elem, Elem)>> {
    let mut h = from_file.to_vec();
    for p in args {
        let Some((x, y)) = p.split_once(':') else {
            return Err(Fail(PARSE, format!("pair {p:?} is not of the form a:b")));
        };
        let get = |n: &str| a.elem(n).ok_or_else(|| Fail(PARSE, format!("{n:?} is not an element of {}", a.name())));
        h.push((get(x)?, get(y)?));
    }
    Ok(h)
}

fn show_witness(a: &OrderedAlgebra, w: &FiniteScheme) -> String {
    let mut s = a.elem_name(w.start).to_string();
    for l in &w.links {
        let p = l.p.display(a.sig(), |e| a.elem_name(*e).to_string());
        s.push_str(&format!(" <= [{p}] {} -> {}", a.elem_name(l.from), a.elem_name(l.to)));
    }
    s.push_str(&format!(" <= {}", a.elem_name(w.end)));
    s
}

fn dump_pairs(a: &OrderedAlgebra, cl: &Closure, rep: &mut Report) -> usize {
    let mut count = 0;
    for (x, y) in cl.rel.pairs() {
        if a.leq(x, y) {
            continue;
        }
        count += 1;
        let w = cl.witness(a, x, y).map(|w| show_witness(a, &w)).unwrap_or_default();
        let (xn, yn) = (a.elem_name(x).to_string(), a.elem_name(y).to_string());
        rep.record("pair", &[("lhs", xn.clone()), ("rhs", yn.clone()), ("witness", w.clone())], format!("{xn} <= {yn}   by {w}"));
    }
    count
}

fn closure(path: &Path, pairs: &[String], congruence: bool, rep: &mut Report) -> Res<u8> {
    let f = load(load_algebra(path))?;
    let a = Arc::new(f.algebra);
    let h = generators(&a, &f.pairs, pairs)?;
    if !congruence {
        let cl = gen_compatible_quasiorder(&a, &h);
        let n = dump_pairs(&a, &cl, rep);
        rep.record("summary", &[("relation", "sigma".into()), ("new_pairs", n.to_string())], format!("{n} pairs beyond the order"));
        return Ok(OK);
    }
    let oc = gen_order_congruence(&a, &h);
    let n = dump_pairs(&a, &oc.leq, rep);
    for class in classes(&oc.theta) {
        let names: Vec<&str> = class.iter().map(|&x| a.elem_name(x)).collect();
        rep.record("class", &[("members", names.join(","))], format!("class {{{}}}", names.join(", ")));
    }
    let ccc = op(is_order_congruence(&a, &oc.theta))?;
    rep.record(
        "summary",
        &[("relation", "theta".into()), ("new_pairs", n.to_string()), ("ccc", ccc.to_string())],
        format!("{n} pairs in the generated order beyond the order of {}; closed chain condition: {ccc}", a.name()),
    );
    Ok(if ccc { OK } else { VIOLATION })
}

fn classes(theta: &oalg::relation::BitRel) -> Vec<Vec<Elem>> {
    let n = theta.size();
    let mut out: Vec<Vec<Elem>> = Vec::new();
    for x in 0..n {
        if !out.iter().any(|c| theta.contains(c[0], x)) {
            out.push((x..n).filter(|&y| theta.contains(x, y)).collect());
        }
    }
    out
}

fn quotient(path: &Path, pairs: &[String], nonregular: bool, rep: &mut Report) -> Res<u8> {
    let f = load(load_algebra(path))?;
    let a = Arc::new(f.algebra);
    let h = generators(&a, &f.pairs, pairs)?;
    let q = if nonregular {
        op(nonregular_quotient(&a, &gen_compatible_quasiorder(&a, &h).rel))?
    } else {
        op(regular_quotient(&a, &gen_order_congruence(&a, &h).theta))?
    };
    for (k, class) in q.classes.iter().enumerate() {
        let names: Vec<&str> = class.iter().map(|&x| a.elem_name(x)).collect();
        rep.record(
            "class",
            &[("name", q.algebra.elem_name(k).to_string()), ("members", names.join(","))],
            format!("# {} = {{{}}}", q.algebra.elem_name(k), names.join(", ")),
        );
    }
    let qa = &q.algebra;
    for (x, y) in qa.order().pairs().filter(|(x, y)| x != y) {
        rep.record("order", &[("lhs", qa.elem_name(x).to_string()), ("rhs", qa.elem_name(y).to_string())], "");
    }
    rep.text(print_algebra(qa, &f.sig_path));
    Ok(OK)
}

fn stats_fields(st: &SearchStats) -> Vec<(&'static str, String)> {
    vec![
        ("states", st.states.to_string()),
        ("depth", st.depth.to_string()),
        ("truncated", st.truncated.to_string()),
        ("saturated", st.saturated.to_string()),
    ]
}

fn print_proof(am: &Amalgam, label: &str, sch: &Scheme, rep: &mut Report) {
    rep.record("scheme", &[("direction", label.to_string()), ("steps", sch.len().to_string()), ("text", print_scheme(am, sch))], "");
    rep.text(format!("# {label}, {} steps", sch.len()));
    rep.text(print_scheme(am, sch));
}

fn checked_amalgam(path: &Path) -> Res<oalg::amalgam::AmalgamFile> {
    let af = load(load_amalgam(path))?;
    let errs = validate_amalgam(&af.am);
    if !errs.is_empty() {
        return Err(Fail(VIOLATION, format!("invalid amalgam: {}", errs.join("; "))));
    }
    Ok(af)
}

fn pushout_eq(path: &Path, s: &str, t: &str, search: &SearchFlags, rep: &mut Report) -> Res<u8> {
    let am = checked_amalgam(path)?.am;
    let s = load(am.parse_term(s))?;
    let t = load(am.parse_term(t))?;
    match op(pushout_equal(&am, &s, &t, &budget(search)))? {
        EqOutcome::Proven(fwd, rev) => {
            rep.record("result", &[("status", "proven".into())], format!("proven: {} = {}", am.show(&s), am.show(&t)));
            print_proof(&am, "forward", &fwd, rep);
            print_proof(&am, "reverse", &rev, rep);
            Ok(OK)
        }
        EqOutcome::Unknown(st) => {
            let mut fields = vec![("status", "unknown".to_string())];
            fields.extend(stats_fields(&st));
            rep.record(
                "result",
                &fields,
                format!("unknown: no scheme within the budget ({} states, depth {}, truncated {})", st.states, st.depth, st.truncated),
            );
            Ok(INCONCLUSIVE)
        }
    }
}

fn separator_fields(a: &OrderedAlgebra, sep: &Separator) -> (Vec<(&'static str, String)>, String) {
    let show = |m: &[Elem]| m.iter().map(|&y| sep.d.elem_name(y)).collect::<Vec<_>>().join(",");
    let fields = vec![
        ("element", a.elem_name(sep.x).to_string()),
        ("codomain_size", sep.d.size().to_string()),
        ("f", show(&sep.f)),
        ("g", show(&sep.g)),
    ];
    let text = format!(
        "separated at {} by f = [{}], g = [{}] into a {}-element algebra",
        a.elem_name(sep.x),
        show(&sep.f),
        show(&sep.g),
        sep.d.size()
    );
    (fields, text)
}

fn dominion(path: &Path, seed: &[String], search: &SearchFlags, max_d: Option<u64>, rep: &mut Report) -> Res<u8> {
    let a = Arc::new(load(load_algebra(path))?.algebra);
    let bad: Vec<String> = a.validate().iter().map(|v| a.describe(v)).collect();
    if !bad.is_empty() {
        return Err(Fail(VIOLATION, format!("{} is not in the variety: {}", a.name(), bad.join("; "))));
    }
    let seed: Vec<Elem> = seed
        .iter()
        .map(|n| a.elem(n).ok_or_else(|| Fail(PARSE, format!("{n:?} is not an element of {}", a.name()))))
        .collect::<Res<_>>()?;
    let sp = op(make_special(a.clone(), &seed))?;
    let report = op(dominion_special(&sp, &budget(search)))?;
    let max_d = max_d.map_or(a.size(), |m| m as usize);
    for (x, status) in &report.entries {
        let name = a.elem_name(*x).to_string();
        match status {
            DominionStatus::InC => rep.record("element", &[("element", name.clone()), ("status", "InC".into())], format!("{name}: InC")),
            DominionStatus::NoWitnessFound(st) => {
                let mut fields = vec![("element", name.clone()), ("status", "NoWitnessFound".to_string())];
                fields.extend(stats_fields(st));
                rep.record("element", &fields, format!("{name}: NoWitnessFound ({} states, depth {})", st.states, st.depth));
                match op(separator_search(&a, &sp.c_elems, *x, max_d))? {
                    SeparatorOutcome::Found(sep) => {
                        let (fields, text) = separator_fields(&a, &sep);
                        rep.record("separator", &fields, format!("  {text}"));
                    }
                    SeparatorOutcome::Inconclusive { codomains, homs } => rep.record(
                        "separator",
                        &[("element", name.clone()), ("status", "inconclusive".into()), ("codomains", codomains.to_string())],
                        format!("  no separator among {codomains} codomains ({homs} homomorphisms)"),
                    ),
                }
            }
        }
    }
    let dom: Vec<&str> = report.elements().iter().map(|&x| a.elem_name(x)).collect();
    rep.record("dominion", &[("elements", dom.join(","))], format!("dominion: {{{}}}", dom.join(", ")));
    Ok(OK)
}

fn epi(path: &Path, max_d: Option<u64>, rep: &mut Report) -> Res<u8> {
    let h = load(load_hom(path))?;
    let max_d = max_d.map_or(h.cod.size(), |m| m as usize);
    match op(epi_check(&h, max_d))? {
        EpiOutcome::Surjective => {
            rep.record("result", &[("status", "Surjective".into())], "Surjective: an epimorphism");
            Ok(OK)
        }
        EpiOutcome::NotEpi(sep) => {
            let (mut fields, text) = separator_fields(&h.cod, &sep);
            fields.insert(0, ("status", "NotEpi".into()));
            rep.record("result", &fields, format!("NotEpi: {text}"));
            Ok(OK)
        }
        EpiOutcome::Inconclusive => {
            rep.record(
                "result",
                &[("status", "Inconclusive".into()), ("max_codomain", max_d.to_string())],
                format!("Inconclusive: no separating pair with codomains up to {max_d} elements"),
            );
            Ok(INCONCLUSIVE)
        }
    }
}

/// Normalizes one scheme; `None` when it is stuck.
fn normalize_one(
    am: &Amalgam,
    path: &Path,
    label: &str,
    max_iters: Option<u64>,
    rep: &mut Report,
) -> Res<Option<oalg::scheme::Case1Scheme>> {
    let sch = load(parse_scheme(am, &read(path)?))?;
    match op(normalize(am, &sch, max_iters.map(|m| m as usize)))? {
        NormalizeOutcome::Case1 { scheme, trace } => {
            let rules: Vec<String> = trace.iter().map(|e| format!("{:?}", e.rule)).collect();
            rep.record(
                "normalized",
                &[("direction", label.to_string()), ("rules", rules.join(",")), ("steps", scheme.scheme().len().to_string())],
                if rules.is_empty() {
                    format!("{label}: already in Case 1 form")
                } else {
                    format!("{label}: Case 1 after {} rules ({})", rules.len(), rules.join(", "))
                },
            );
            print_proof(am, label, scheme.scheme(), rep);
            Ok(Some(scheme))
        }
        NormalizeOutcome::Stuck(s) => {
            rep.record("stuck", &[("direction", label.to_string()), ("reason", s.reason.clone())], format!("{label}: stuck: {}", s.reason));
            rep.text(print_scheme(am, &s.residual));
            Ok(None)
        }
    }
}

fn normalize_cmd(am_path: &Path, scheme: &Path, reverse: Option<&Path>, max_iters: Option<u64>, rep: &mut Report) -> Res<u8> {
    let am = checked_amalgam(am_path)?.am;
    let Some(fwd) = normalize_one(&am, scheme, "forward", max_iters, rep)? else { return Ok(INCONCLUSIVE) };
    let Some(rev_path) = reverse else { return Ok(OK) };
    let Some(rev) = normalize_one(&am, rev_path, "reverse", max_iters, rep)? else { return Ok(INCONCLUSIVE) };
    let z = op(extract_center(&am, &fwd, Some(&rev)))?;
    let name = am.c.elem_name(z).to_string();
    rep.record("center", &[("element", name.clone())], format!("center: {name} in {}", am.c.name()));
    Ok(OK)
}

fn selftest_cmd(seed: u64, criteria: &[u64], sequential: bool, rep: &mut Report) -> Res<u8> {
    let cfg = Config { seed, exec: if sequential { Exec::Sequential } else { Exec::best() } };
    let ids: Vec<usize> = if criteria.is_empty() { (1..=9).collect() } else { criteria.iter().map(|&c| c as usize).collect() };
    let mut failed = 0;
    for id in ids {
        let r = selftest::run(id, &cfg);
        failed += usize::from(!r.passed);
        rep.record(
            "criterion",
            &[
                ("id", id.to_string()),
                ("passed", r.passed.to_string()),
                ("seconds", format!("{:.2}", r.elapsed.as_secs_f64())),
                ("limit", r.limit.as_secs().to_string()),
                ("summary", r.summary.clone()),
            ],
            r.line(),
        );
        for n in &r.notes {
            rep.record("note", &[("id", id.to_string()), ("message", n.clone())], format!("    note: {n}"));
        }
        for f in &r.failures {
            rep.record("failure", &[("id", id.to_string()), ("message", f.clone())], format!("    failure: {f}"));
        }
    }
    Ok(if failed == 0 { OK } else { VIOLATION })
}
