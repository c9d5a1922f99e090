//! The acceptance suite: nine seeded checks with time limits, shared by the `acceptance`
//! test target and `oalg selftest`.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::amalgam::{
    all_compatible_quasiorders, enumerate_homs, epi_check, mediate, pushout_equal, separator_search, xleaf, Budget, EpiOutcome, EqOutcome,
    SeparatorOutcome, Side, SpecialAmalgam, XTerm,
};
use crate::closure::{gen_compatible_quasiorder, gen_order_congruence};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::oalg::{
    directed_kernel, factor_through, is_order_congruence, leq_theta, nonregular_quotient, regular_quotient, Elem, Homomorphism,
    OrderedAlgebra,
};
use crate::oracle::closure_by_schemes;
use crate::otalg::{extend_monotone_map, labelings, labels, term_leq, verify_partial_order, VarPoset};
use crate::random::{padded_corpus, random_algebra, rng, sig1, sig_binary, special_corpus, Rand};
use crate::relation::BitRel;
use crate::scheme::{check_certificate, extract_center, normalize, NormalizeOutcome, Scheme};
use crate::signature::Signature;
use crate::term::{parse_term, regular_shapes_upto, Leaf, Term, Tok, VarId, VarNames};

pub const DEFAULT_SEED: u64 = 1;

/// Amalgams in the shared corpus of criteria 6 to 8.
pub const CORPUS_SIZE: usize = 60;

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub seed: u64,
    pub exec: Exec,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: DEFAULT_SEED, exec: Exec::best() }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub summary: String,
    pub failures: Vec<String>,
    /// Informational lines, such as Inconclusive separator searches.
    pub notes: Vec<String>,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Report {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {}: {} [{:.2}s of {}s] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.summary
        )
    }
}

struct Outcome {
    summary: String,
    failures: Vec<String>,
    notes: Vec<String>,
    /// A failing rate or count that is not tied to one instance.
    shortfall: bool,
}

impl Outcome {
    fn new(summary: String, failures: Vec<String>) -> Self {
        Outcome { summary, failures, notes: Vec::new(), shortfall: false }
    }
}

pub const TITLES: [&str; 9] = [
    "term example",
    "antisymmetry of the scheme order",
    "closure oracle equivalence",
    "quotient laws",
    "universal mapping property",
    "pushout soundness",
    "special amalgamation and separators",
    "normalizer correctness",
    "unordered corollary",
];

const LIMITS: [u64; 9] = [1, 60, 120, 60, 60, 120, 300, 120, 10];

pub fn run(id: usize, cfg: &Config) -> Report {
    assert!((1..=9).contains(&id), "criteria are numbered 1 to 9");
    let t0 = Instant::now();
    let out = match id {
        1 => term_example(),
        2 => antisymmetry(cfg),
        3 => closure_oracle(cfg),
        4 => quotient_laws(cfg),
        5 => universal(cfg),
        6 => pushout_soundness(cfg),
        7 => special_amalgamation(cfg),
        8 => normalizer(cfg),
        _ => unordered(),
    };
    let elapsed = t0.elapsed();
    let limit = Duration::from_secs(LIMITS[id - 1]);
    let out = out.unwrap_or_else(|e| Outcome::new("aborted".into(), vec![format!("unexpected error: {e}")]));
    let mut summary = out.summary;
    if elapsed > limit {
        summary.push_str("; over the time limit");
    }
    Report {
        id,
        title: TITLES[id - 1],
        passed: out.failures.is_empty() && !out.shortfall && elapsed <= limit,
        summary,
        failures: out.failures,
        notes: out.notes,
        elapsed,
        limit,
    }
}

pub fn run_all(cfg: &Config) -> Vec<Report> {
    (1..=9).map(|id| run(id, cfg)).collect()
}

fn sub_rng(cfg: &Config, id: u64) -> Rand {
    rng(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id))
}

fn failures_of(per: Vec<Vec<String>>) -> Vec<String> {
    per.into_iter().flatten().collect()
}

fn term_example() -> Result<Outcome> {
    let sig = sig1();
    let xs = VarNames::new(&["x1", "x2", "x3", "x4"])?;
    let p = |w: &str| parse_term::<VarId, _>(&sig, &xs, w);
    let t = p("f g x2 x1 c f x1 x4")?;
    let mut fails = Vec::new();
    let ls = t.leaves();
    let show = |l: Leaf<VarId>| match l {
        Leaf::Var(v) => xs.name(v).to_string(),
        Leaf::Const(c) => sig.name(c).to_string(),
    };
    let names: Vec<String> = ls.0.iter().map(|&l| show(l)).collect();
    if ls.len() != 5 {
        fails.push(format!("{} leaves", ls.len()));
    }
    for (j, want) in [(1, "x2"), (3, "c"), (5, "x4")] {
        let got = show(ls.get(j)?);
        if got != want {
            fails.push(format!("leaf({j}) = {got}, expected {want}"));
        }
    }
    let vars: Vec<&str> = t.var_seq().iter().map(|&v| xs.name(v)).collect();
    if vars != ["x2", "x1", "x1", "x4"] {
        fails.push(format!("var = {vars:?}"));
    }
    if t.skeleton() != p("f g x2 x1 x1 f x4 c")?.skeleton() {
        fails.push("skeleton differs from that of f g x2 x1 x1 f x4 c".into());
    }
    if t.skeleton() == p("g c f x2 x1 f x1 x4")?.skeleton() {
        fails.push("skeleton equals that of g c f x2 x1 f x1 x4".into());
    }
    Ok(Outcome::new(format!("leaves ({}), var ({})", names.join(","), vars.join(",")), fails))
}

fn antisymmetry(cfg: &Config) -> Result<Outcome> {
    let r = verify_partial_order(&sig1(), &VarPoset::chain(2), 3, cfg.exec);
    Ok(Outcome::new(
        format!(
            "{} terms, {} skeletons, {} pairs, {} compatibility checks, {} discrepancies",
            r.terms,
            r.skeletons,
            r.pairs_compared,
            r.compat_checks,
            r.discrepancies.len()
        ),
        r.discrepancies,
    ))
}

fn random_h(rng: &mut Rand, n: usize, max: usize) -> Vec<(Elem, Elem)> {
    let k = rng.gen_range(0..=max);
    (0..k).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
}

/// Random algebras over SIG1 with carriers `1..=max_n` and random `H`, one stream per instance.
/// An algebra, generating pairs and the seed that produced them.
type Instance = (Arc<OrderedAlgebra>, Vec<(Elem, Elem)>, u64);

fn algebra_instances(cfg: &Config, id: u64, count: usize, max_n: usize) -> Vec<Instance> {
    let sig = sig1();
    let mut r = sub_rng(cfg, id);
    (0..count)
        .map(|i| {
            let n = r.gen_range(1..=max_n);
            let a = Arc::new(random_algebra(&mut r, &sig, n, &format!("A{i}")));
            let h = random_h(&mut r, n, 3);
            (a, h, r.gen())
        })
        .collect()
}

fn closure_oracle(cfg: &Config) -> Result<Outcome> {
    let inst = algebra_instances(cfg, 3, 200, 4);
    let per = cfg.exec.map(&inst, |(a, h, _)| {
        let mut f = Vec::new();
        let tag = format!("{} (size {}, H = {h:?})", a.name(), a.size());
        let sigma = gen_compatible_quasiorder(a, h);
        if sigma.rel != closure_by_schemes(a, h, 3, 6) {
            f.push(format!("{tag}: fixpoint and scheme search disagree on Σ_H"));
        }
        for (c, d) in sigma.rel.pairs() {
            match sigma.witness(a, c, d) {
                Some(w) if w.start == c && w.end == d => {
                    if let Err(e) = w.check(a, h) {
                        f.push(format!("{tag}: witness for ({c}, {d}) fails: {e}"));
                    }
                }
                _ => f.push(format!("{tag}: no witness for ({c}, {d})")),
            }
        }
        let oc = gen_order_congruence(a, h);
        let mut sym = h.clone();
        sym.extend(h.iter().map(|&(x, y)| (y, x)));
        match leq_theta(a, &oc.theta) {
            Ok(lt) if lt == closure_by_schemes(a, &sym, 3, 6) => {}
            Ok(_) => f.push(format!("{tag}: ≤_Θ differs from Σ of H and its inverse")),
            Err(e) => f.push(format!("{tag}: {e}")),
        }
        if is_order_congruence(a, &oc.theta) != Ok(true) {
            f.push(format!("{tag}: Θ_H fails the closed chain condition"));
        }
        f
    });
    let fails = failures_of(per);
    Ok(Outcome::new(format!("{} algebras, {} mismatches", inst.len(), fails.len()), fails))
}

/// All partial orders on `0..m` containing the identity.
fn partial_orders(m: usize) -> Vec<BitRel> {
    let off: Vec<(usize, usize)> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    (0u32..1 << off.len())
        .filter_map(|mask| {
            let pairs = off.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p);
            let r = BitRel::identity(m).union(&BitRel::from_pairs(m, pairs));
            r.is_partial_order().then_some(r)
        })
        .collect()
}

fn quotient_laws(cfg: &Config) -> Result<Outcome> {
    let inst = algebra_instances(cfg, 4, 200, 4);
    let orders: Vec<Vec<BitRel>> = (0..=4).map(partial_orders).collect();
    let sig = sig1();
    let per = cfg.exec.map(&inst, |(a, h, seed)| {
        let mut r = rng(*seed);
        let tag = format!("{} (size {}, H = {h:?})", a.name(), a.size());
        let out = quotient_case(a, h, &orders, &sig, &mut r).unwrap_or_else(|e| (vec![format!("error: {e}")], 0));
        (out.0.into_iter().map(|e| format!("{tag}: {e}")).collect::<Vec<_>>(), out.1)
    });
    let factored: usize = per.iter().map(|p| p.1).sum();
    let fails = failures_of(per.into_iter().map(|p| p.0).collect());
    let mut out = Outcome::new(format!("{} quotients, {factored} factorizations, {} failures", inst.len(), fails.len()), fails);
    if factored < inst.len() {
        out.shortfall = true;
        out.summary.push_str("; too few factorizations");
    }
    Ok(out)
}

fn quotient_case(
    a: &Arc<OrderedAlgebra>,
    h: &[(Elem, Elem)],
    orders: &[Vec<BitRel>],
    sig: &Arc<Signature>,
    r: &mut Rand,
) -> Result<(Vec<String>, usize)> {
    let mut f = Vec::new();
    let theta = gen_order_congruence(a, h).theta;
    let q = regular_quotient(a, &theta)?;
    let qa = &q.algebra;
    let mono = |o: &BitRel| a.order().pairs().all(|(x, y)| o.contains(q.proj.apply(x), q.proj.apply(y)));
    if !qa.is_valid() || !q.proj.check().is_hom || !mono(qa.order()) {
        f.push("quotient is not a valid image under a monotone homomorphism".into());
    }
    let mut seen_own = false;
    for o in &orders[qa.size()] {
        if !mono(o) || !qa.with_order(o.clone()).is_valid() {
            continue;
        }
        seen_own |= o == qa.order();
        if !qa.order().is_subset(o) {
            f.push(format!("compatible order {:?} making the projection monotone misses a quotient pair", o.pairs().collect::<Vec<_>>()));
        }
    }
    if !seen_own {
        f.push("the quotient order is not among the compatible orders".into());
    }

    // Codomains: the quotient by a larger congruence, and a random small algebra.
    let mut h2 = h.to_vec();
    h2.push((r.gen_range(0..a.size()), r.gen_range(0..a.size())));
    let q2 = regular_quotient(a, &gen_order_congruence(a, &h2).theta)?;
    let n = r.gen_range(1..=3);
    let d = Arc::new(random_algebra(r, sig, n, "D"));
    let lt = leq_theta(a, &theta)?;
    let mut maps: Vec<Homomorphism> = vec![q2.proj.clone()];
    for m in enumerate_homs(a, &d).into_iter().take(8) {
        maps.push(Homomorphism::new(a.clone(), d.clone(), m)?);
    }
    let mut factored = 0;
    for fh in &maps {
        let applies = lt.is_subset(&directed_kernel(fh)?);
        match factor_through(fh, &theta) {
            Ok(g) if applies => {
                factored += 1;
                if q.proj.then(&g).map != fh.map {
                    f.push("g ∘ θ♮ differs from f".into());
                }
                if !g.check().is_hom || !g.is_monotone() {
                    f.push("factor is not a monotone homomorphism".into());
                }
                for (k, class) in q.classes.iter().enumerate() {
                    if class.iter().any(|&m| fh.apply(m) != g.apply(k)) {
                        f.push(format!("another representative of class {k} gives a different factor"));
                    }
                }
                let all: Vec<Vec<Elem>> = enumerate_homs(qa, &fh.cod)
                    .into_iter()
                    .filter(|g2| (0..a.size()).all(|x| g2[q.proj.apply(x)] == fh.apply(x)))
                    .collect();
                if all != [g.map.clone()] {
                    f.push(format!("{} homomorphisms factor f", all.len()));
                }
            }
            Err(Error::PreconditionFailed(_)) if !applies => {}
            Ok(_) => f.push("factored a map whose directed kernel misses ≤_θ".into()),
            Err(e) => f.push(format!("factor_through failed: {e}")),
        }
    }
    Ok((f, factored))
}

fn universal(cfg: &Config) -> Result<Outcome> {
    let sig = sig1();
    let shapes = regular_shapes_upto(&sig, 2);
    let mut r = sub_rng(cfg, 5);
    let mut inst = Vec::new();
    while inst.len() < 100 {
        let nv = r.gen_range(1..=2);
        let names: Vec<String> = (1..=nv).map(|i| format!("x{i}")).collect();
        let order: Vec<(usize, usize)> = if nv == 2 && r.gen_bool(0.5) { vec![(0, 1)] } else { vec![] };
        let xp = VarPoset::new(&names, &order)?;
        let n = r.gen_range(1..=4);
        let d = Arc::new(random_algebra(&mut r, &sig, n, "D"));
        let alpha: Vec<Elem> = (0..nv).map(|_| r.gen_range(0..n)).collect();
        if order.iter().all(|&(x, y)| d.leq(alpha[x], alpha[y])) {
            inst.push((xp, d, alpha));
        }
    }
    let per = cfg.exec.map(&inst, |(xp, d, alpha)| {
        let tag = format!("alpha {alpha:?} into a size {} algebra", d.size());
        let ext = match extend_monotone_map(xp, d.clone(), alpha.clone()) {
            Ok(e) => e,
            Err(e) => return (vec![format!("{tag}: {e}")], 0u64),
        };
        let labs = labels(&sig, xp);
        let mut f = Vec::new();
        let mut pairs = 0u64;
        for shape in &shapes {
            let terms = labelings(shape, &labs);
            let beta: Vec<Elem> = terms.iter().map(|t| ext.eval(t)).collect();
            for (t, &b) in terms.iter().zip(&beta) {
                if !hom_at_root(d, &ext, t, b, alpha) {
                    f.push(format!("{tag}: β is not a homomorphism at {}", t.display(&sig, xp, crate::term::Notation::Prefix)));
                }
            }
            for (i, s) in terms.iter().enumerate() {
                for (j, t) in terms.iter().enumerate() {
                    if term_leq(&sig, xp, s, t) {
                        pairs += 1;
                        if !d.leq(beta[i], beta[j]) {
                            f.push(format!("{tag}: β is not monotone on a pair of shape {}", shape.len()));
                        }
                    }
                }
            }
        }
        (f, pairs)
    });
    let pairs: u64 = per.iter().map(|p| p.1).sum();
    let fails = failures_of(per.into_iter().map(|p| p.0).collect());
    Ok(Outcome::new(format!("{} maps, {pairs} related pairs, {} failures", inst.len(), fails.len()), fails))
}

/// `β(t)` agrees with the operation applied to the values of the children, with
/// the constant's value, or with `α` on a variable.
fn hom_at_root(d: &OrderedAlgebra, ext: &crate::otalg::Extension, t: &Term<VarId>, b: Elem, alpha: &[Elem]) -> bool {
    match t.root() {
        Tok::Op(f, _) => {
            let args: Vec<Elem> = t.children(0).into_iter().map(|p| ext.eval(&t.subterm(p))).collect();
            d.apply(f, &args) == b
        }
        Tok::Const(c) => d.const_val(c) == b,
        Tok::Var(v) => alpha[v.0 as usize] == b,
    }
}

fn corpus(cfg: &Config) -> Vec<SpecialAmalgam> {
    special_corpus(cfg.seed, CORPUS_SIZE, &sig_binary(), 4)
}

fn pair(x: Elem) -> (XTerm, XTerm) {
    (xleaf(Side::One, x), xleaf(Side::Two, x))
}

/// Commuting pairs `(γ1, γ2)` from `A` into its non-regular quotients; pairs that differ
/// are preferred.
/// A codomain and two maps into it.
type MapPair = (Arc<OrderedAlgebra>, Vec<Elem>, Vec<Elem>);

fn commuting_pairs(sp: &SpecialAmalgam, r: &mut Rand, want: usize) -> Result<Vec<MapPair>> {
    let base = &sp.base;
    let mut diff = Vec::new();
    let mut same = Vec::new();
    for sigma in all_compatible_quasiorders(base) {
        let d = nonregular_quotient(base, &sigma)?.algebra;
        let homs = enumerate_homs(base, &d);
        for g1 in &homs {
            for g2 in &homs {
                if sp.c_elems.iter().all(|&c| g1[c] == g2[c]) {
                    let item = (d.clone(), g1.clone(), g2.clone());
                    if g1 != g2 {
                        diff.push(item);
                    } else {
                        same.push(item);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for pool in [&mut diff, &mut same] {
        while out.len() < want && !pool.is_empty() {
            let i = r.gen_range(0..pool.len());
            out.push(pool.swap_remove(i));
        }
    }
    Ok(out)
}

fn pushout_soundness(cfg: &Config) -> Result<Outcome> {
    let corpus = corpus(cfg);
    let seeds: Vec<u64> = {
        let mut r = sub_rng(cfg, 6);
        corpus.iter().map(|_| r.gen()).collect()
    };
    let items: Vec<(usize, &SpecialAmalgam)> = corpus.iter().enumerate().collect();
    let per = cfg.exec.map(&items, |&(i, sp)| -> (Vec<String>, usize, usize) {
        let am = &sp.am;
        let tag = |x: &str| format!("{}: {x}", sp.base.name());
        let mut f = Vec::new();
        let mut proven = Vec::new();
        for &x in &sp.c_elems {
            let (s, t) = pair(x);
            match pushout_equal(am, &s, &t, &Budget::default()) {
                Ok(EqOutcome::Proven(fwd, rev)) => {
                    for (sch, a, b) in [(&fwd, &s, &t), (&rev, &t, &s)] {
                        let errs = check_certificate(am, sch, a, b);
                        if !errs.is_empty() {
                            f.push(tag(&format!("scheme for {} fails: {}", sp.base.elem_name(x), errs.join("; "))));
                        }
                    }
                    proven.push((x, fwd, rev));
                }
                Ok(EqOutcome::Unknown(_)) => f.push(tag(&format!("μ1φ1 = μ2φ2 not proven at {}", sp.base.elem_name(x)))),
                Err(e) => f.push(tag(&e.to_string())),
            }
        }
        let mut r = rng(seeds[i]);
        let pairs = match commuting_pairs(sp, &mut r, 2) {
            Ok(p) => p,
            Err(e) => return (vec![tag(&e.to_string())], proven.len(), 0),
        };
        let mut distinct = 0;
        for (d, g1, g2) in &pairs {
            distinct += usize::from(g1 != g2);
            let med = match mediate(am, d.clone(), g1.clone(), g2.clone()) {
                Ok(m) => m,
                Err(e) => {
                    f.push(tag(&format!("mediate failed: {e}")));
                    continue;
                }
            };
            for (side, g) in [(Side::One, g1), (Side::Two, g2)] {
                if (0..sp.base.size()).any(|a| med.delta_mu(side, a) != g[a]) {
                    f.push(tag(&format!("δ ∘ μ{} differs from γ{}", side.number(), side.number())));
                }
            }
            for (x, fwd, rev) in &proven {
                match med.check_equal(fwd, rev) {
                    Ok(v) if v == g1[*x] => {}
                    Ok(_) => f.push(tag("δ moves a proven element")),
                    Err(e) => f.push(tag(&e.to_string())),
                }
            }
        }
        (f, proven.len(), distinct)
    });
    let proven: usize = per.iter().map(|p| p.1).sum();
    let distinct: usize = per.iter().map(|p| p.2).sum();
    let fails = failures_of(per.into_iter().map(|p| p.0).collect());
    let mut out = Outcome::new(
        format!("{} amalgams, {proven} elements of C proven, {distinct} distinct commuting pairs mediated", corpus.len()),
        fails,
    );
    if distinct < 20 {
        out.shortfall = true;
        out.summary.push_str("; fewer than 20 commuting pairs");
    }
    Ok(out)
}

#[derive(Default)]
struct AmalgamTally {
    failures: Vec<String>,
    notes: Vec<String>,
    proven: usize,
    unknown: usize,
    truncated: usize,
    separated: usize,
}

fn special_amalgamation(cfg: &Config) -> Result<Outcome> {
    let corpus = corpus(cfg);
    let budget = Budget::new(8, 4);
    let items: Vec<(Elem, &SpecialAmalgam)> = corpus.iter().flat_map(|sp| (0..sp.base.size()).map(move |x| (x, sp))).collect();
    let per = cfg.exec.map(&items, |&(x, sp)| {
        let mut t = AmalgamTally::default();
        let name = format!("{} x = {}", sp.base.name(), sp.base.elem_name(x));
        let (s, u) = pair(x);
        match pushout_equal(&sp.am, &s, &u, &budget) {
            Ok(EqOutcome::Proven(..)) if sp.in_c(x) => t.proven += 1,
            Ok(EqOutcome::Proven(..)) => t.failures.push(format!("{name}: theorem contradiction, equality proven outside C")),
            Ok(EqOutcome::Unknown(_)) if sp.in_c(x) => t.failures.push(format!("{name}: not proven although x is in C")),
            Ok(EqOutcome::Unknown(st)) => {
                t.unknown += 1;
                t.truncated += usize::from(st.truncated);
            }
            Err(e) => t.failures.push(format!("{name}: {e}")),
        }
        if !sp.in_c(x) {
            match separator_search(&sp.base, &sp.c_elems, x, sp.base.size()) {
                Ok(SeparatorOutcome::Found(sep)) => match check_separator(&sp.base, &sp.c_elems, &sep.d, &sep.f, &sep.g, x) {
                    Ok(()) => t.separated += 1,
                    Err(e) => t.failures.push(format!("{name}: bad separator: {e}")),
                },
                Ok(SeparatorOutcome::Inconclusive { codomains, homs }) => {
                    t.notes.push(format!("{name}: Inconclusive after {codomains} codomains and {homs} homomorphisms"))
                }
                Err(e) => t.failures.push(format!("{name}: {e}")),
            }
        }
        t
    });
    let mut all = AmalgamTally::default();
    for t in per {
        all.failures.extend(t.failures);
        all.notes.extend(t.notes);
        all.proven += t.proven;
        all.unknown += t.unknown;
        all.truncated += t.truncated;
        all.separated += t.separated;
    }
    let outside = items.iter().filter(|(x, sp)| !sp.in_c(*x)).count();
    let rate = if outside == 0 { 1.0 } else { all.separated as f64 / outside as f64 };
    let mut summary = String::new();
    let _ = write!(
        summary,
        "{} amalgams, {} elements of C proven, {} outside C Unknown ({} truncated), separators {}/{} ({:.1}%)",
        corpus.len(),
        all.proven,
        all.unknown,
        all.truncated,
        all.separated,
        outside,
        100.0 * rate
    );
    let mut out = Outcome::new(summary, all.failures);
    out.notes = all.notes;
    if rate < 0.9 {
        out.shortfall = true;
        out.summary.push_str("; separator rate below 90%");
    }
    Ok(out)
}

/// `f`, `g` are homomorphisms `A → D` that agree on `C` and differ at `x`.
pub fn check_separator(a: &Arc<OrderedAlgebra>, c: &[Elem], d: &Arc<OrderedAlgebra>, f: &[Elem], g: &[Elem], x: Elem) -> Result<()> {
    for m in [f, g] {
        let h = Homomorphism::new(a.clone(), d.clone(), m.to_vec())?;
        let chk = h.check();
        if !chk.is_hom || !chk.is_monotone {
            return Err(Error::NotAHomomorphism(format!("{m:?}")));
        }
    }
    if let Some(&e) = c.iter().find(|&&e| f[e] != g[e]) {
        return Err(Error::CommutationFailure(format!("the maps differ at {} in C", a.elem_name(e))));
    }
    if f[x] == g[x] {
        return Err(Error::CommutationFailure(format!("the maps agree at {}", a.elem_name(x))));
    }
    Ok(())
}

fn normalize_pair(sp: &SpecialAmalgam, z: Elem, fwd: &Scheme, rev: &Scheme) -> std::result::Result<(), String> {
    let am = &sp.am;
    let mut done = Vec::new();
    for sch in [fwd, rev] {
        match normalize(am, sch, None).map_err(|e| e.to_string())? {
            NormalizeOutcome::Case1 { scheme, .. } => done.push(scheme),
            NormalizeOutcome::Stuck(s) => return Err(format!("stuck: {}", s.reason)),
        }
    }
    match extract_center(am, &done[0], Some(&done[1])) {
        Ok(c) if c == z => Ok(()),
        Ok(c) => Err(format!("center {c}, expected {z}")),
        Err(e) => Err(e.to_string()),
    }
}

fn normalizer(cfg: &Config) -> Result<Outcome> {
    let corpus = corpus(cfg);
    let items: Vec<(&SpecialAmalgam, Elem)> = corpus.iter().flat_map(|sp| (0..sp.c_elems.len()).map(move |z| (sp, z))).collect();
    let per = cfg.exec.map(&items, |&(sp, z)| {
        let (s, t) = pair(sp.c_elems[z]);
        match pushout_equal(&sp.am, &s, &t, &Budget::default()) {
            Ok(EqOutcome::Proven(fwd, rev)) => {
                normalize_pair(sp, z, &fwd, &rev).map_err(|e| format!("{} z = {z}: {e}", sp.base.name())).err()
            }
            Ok(EqOutcome::Unknown(_)) => Some(format!("{} z = {z}: no proven pair", sp.base.name())),
            Err(e) => Some(e.to_string()),
        }
    });
    let mut fails: Vec<String> = per.into_iter().flatten().collect();
    let pads = padded_corpus(cfg.seed.wrapping_add(8), &corpus, 60, 4);
    let per = cfg.exec.map(&pads, |(i, z, fwd, rev)| {
        normalize_pair(&corpus[*i], *z, fwd, rev).map_err(|e| format!("padded {} z = {z}: {e}", corpus[*i].base.name())).err()
    });
    fails.extend(per.into_iter().flatten());
    let steps: usize = pads.iter().map(|p| p.2.len() + p.3.len()).sum();
    let mut out = Outcome::new(
        format!("{} proven pairs and {} padded pairs ({steps} steps), {} failures", items.len(), pads.len(), fails.len()),
        fails,
    );
    if pads.len() < 50 {
        out.shortfall = true;
        out.summary.push_str("; fewer than 50 padded pairs");
    }
    Ok(out)
}

fn unordered() -> Result<Outcome> {
    let sig = Arc::new(Signature::parse("op f 2; op g 3; const c; const d")?);
    let ch3 = crate::random::ch3();
    let a = Arc::new(OrderedAlgebra::from_fn(
        sig.clone(),
        "CH3",
        ch3.elems().to_vec(),
        &BitRel::identity(3),
        |f, args| ch3.apply(ch3.sig().lookup(sig.name(f)).expect("same operations"), args),
        |c| ch3.const_val(ch3.sig().lookup(sig.name(c)).expect("same constants")),
    )?);
    if !a.is_valid() {
        return Ok(Outcome::new("invalid algebra".into(), vec!["CH3 under the trivial order does not validate".into()]));
    }
    let sub: Vec<Elem> = vec![0, 2];
    let b = Arc::new(a.subalgebra(&sub, "C")?);
    let h = Homomorphism::new(b, a.clone(), sub.clone())?;
    match epi_check(&h, 3)? {
        EpiOutcome::NotEpi(sep) => {
            check_separator(&a, &sub, &sep.d, &sep.f, &sep.g, sep.x)?;
            let summary =
                format!("NotEpi at {}: f = {:?}, g = {:?} into a {}-element algebra", a.elem_name(sep.x), sep.f, sep.g, sep.d.size());
            let mut f = Vec::new();
            if !sep.d.order().is_subset(&BitRel::identity(sep.d.size())) {
                f.push("separating codomain is not trivially ordered".into());
            }
            Ok(Outcome::new(summary, f))
        }
        other => Ok(Outcome::new(format!("{other:?}"), vec!["inclusion was not shown to be a non-epimorphism".into()])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_orders_counts() {
        let counts: Vec<usize> = (0..=4).map(|m| partial_orders(m).len()).collect();
        assert_eq!(counts, [1, 1, 3, 19, 219]);
    }

    #[test]
    fn quick_criteria_pass() {
        let cfg = Config::default();
        for id in [1, 9] {
            let r = run(id, &cfg);
            assert!(r.passed, "{}\n{:?}", r.line(), r.failures);
        }
    }
}
