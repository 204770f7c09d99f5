//! Executable checks of the monad, strength and hiding laws, plus the suite
//! drivers used by the CLI.

use std::sync::Arc;

use rayon::prelude::*;

use crate::denote::hiding::{p_bind, p_hide, p_map, p_map_init, p_return, p_strength};
use crate::denote::monad::{t_bind, t_map, t_return, t_strength};
use crate::denote::{apply_closure, denote_closed, Kleisli, MonadComp};
use crate::error::{GenError, SemError};
use crate::initialisations::oracle::{enumerate_initialisations, rep_universe};
use crate::initialisations::{coend_equal, enumerate_stores, stores_action, CoendRep, Initialisation, Store};
use crate::signature::{GroundType, Signature, Sort};
use crate::syntax::{parse_core_term, parse_program, Type};
use crate::typing::{check, Context};
use crate::worlds::{enumerate_worlds, injections, interp_type, Injection, SemValue, World};

use super::equations::{builtin_schemas, check_equations};
use super::gen::{GenConfig, Generator};
use super::report::{Failure, TestReport};
use super::soundness::{check_masking, check_preservation, check_soundness};

pub const SUITES: [&str; 5] = ["monad", "hiding", "gs", "masking", "soundness"];

/// Knobs shared by the suite drivers.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    /// Largest world, in cells, that the law checks quantify over.
    pub bound: usize,
    pub seed: u64,
    /// Generated programs per signature.
    pub programs: usize,
    pub size: usize,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig { bound: 2, seed: 0, programs: 200, size: 12 }
    }
}

/// Runs one law over all of its instances in parallel, keeping instance order.
fn law<I: Sync>(name: &str, instances: Vec<I>, f: impl Fn(&I) -> Result<Option<String>, SemError> + Sync) -> TestReport {
    let mut report = TestReport::new(name);
    let results: Vec<Option<Failure>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| match f(inst) {
            Ok(None) => None,
            Ok(Some(w)) => Some(Failure { instance: format!("#{i}"), witness: w }),
            Err(e) => Some(Failure { instance: format!("#{i}"), witness: e.to_string() }),
        })
        .collect();
    report.absorb(results);
    report
}

fn same_rep(what: &str, a: &CoendRep, b: &CoendRep) -> Result<Option<String>, SemError> {
    Ok(if coend_equal(a, b)? { None } else { Some(format!("{what}\n  left:  {a}\n  right: {b}")) })
}

/// Compares two computations over the same world at every extension of at
/// most `bound` cells and every store there.
pub fn t_equal(sig: &Signature, m1: &MonadComp, m2: &MonadComp, bound: usize) -> Result<Option<String>, SemError> {
    let base = m1.base();
    for w in enumerate_worlds(sig, bound).into_iter().filter(|w| w.len() >= base.len()) {
        for h in injections(base, &w) {
            for s in enumerate_stores(sig, &w) {
                let (r1, r2) = (m1.at(&h, &s)?, m2.at(&h, &s)?);
                if !coend_equal(&r1, &r2)? {
                    return Ok(Some(format!("at {h} with store {s}\n  left:  {r1}\n  right: {r2}")));
                }
            }
        }
    }
    Ok(None)
}

fn fst(v: &SemValue) -> SemValue {
    match v {
        SemValue::Pair(a, _) => (**a).clone(),
        other => other.clone(),
    }
}

fn snd(v: &SemValue) -> SemValue {
    match v {
        SemValue::Pair(_, b) => (**b).clone(),
        other => other.clone(),
    }
}

/// `⟨⟨x, y⟩, z⟩ ↦ ⟨x, ⟨y, z⟩⟩`
fn reassoc(v: &SemValue) -> SemValue {
    let (xy, z) = (fst(v), snd(v));
    SemValue::pair(fst(&xy), SemValue::pair(snd(&xy), z))
}

/// Kleisli arrows `ref κ → T(ref κ)` denoted by closed functions that
/// mention no locations, so each is natural in the world.
pub fn sample_kleislis(sig: &Signature, k: &Sort) -> Vec<(String, Kleisli)> {
    let mut texts = vec![
        format!("fun (x : ref {k}) -> x"),
        format!("fun (x : ref {k}) -> let v = !x in new {{ y : {k} = v }} in y"),
        format!("fun (x : ref {k}) -> let v = !x in new {{ y : {k} = v }} in x"),
        format!("fun (x : ref {k}) -> (x := !x; x)"),
    ];
    if *sig.typeof_sort(k) == GroundType::bool() {
        texts.push(format!("fun (x : ref {k}) -> match !x with inj1 a -> (x := false; x) | inj2 b -> (x := true; x)"));
        texts.push(format!("fun (x : ref {k}) -> match !x with inj1 a -> (new {{ y : {k} = false }} in y) | inj2 b -> x"));
    }
    let ty = Type::arrow(Type::Ref(k.clone()), Type::Ref(k.clone()));
    texts
        .into_iter()
        .map(|text| {
            let t = parse_core_term(sig, &World::empty(), &Context::new(), &text).expect("bundled law terms parse");
            check(sig, &World::empty(), &Context::new(), &t, &ty).expect("bundled law terms typecheck");
            let value = denote_closed(&t, &World::empty()).and_then(|m| m.run(&Store::empty())).expect("a function value");
            let SemValue::Closure(c) = value.payload else { panic!("{text} denotes a closure") };
            let f: Kleisli = Arc::new(move |w: &World, x: SemValue| apply_closure(&c, x, w));
            (text, f)
        })
        .collect()
}

fn unit_kleisli() -> Kleisli {
    Arc::new(|w: &World, x: SemValue| Ok(t_return(w, x)))
}

fn locs_of(w: &World, k: &Sort) -> Vec<SemValue> {
    interp_type(&GroundType::Ref(k.clone()), w)
}

fn strength_args(w: &World) -> Vec<SemValue> {
    let mut out = vec![SemValue::tt(), SemValue::ff()];
    out.extend(w.locs().map(SemValue::Loc));
    out
}

/// A world `w`, a sort `κ` and a location `x : ref κ` at `w`.
struct Setting {
    w: World,
    k: Sort,
    x: SemValue,
}

fn settings(sig: &Signature, bound: usize) -> Vec<Setting> {
    let mut out = Vec::new();
    for w in enumerate_worlds(sig, bound) {
        for k in sig.sorts() {
            for x in locs_of(&w, k) {
                out.push(Setting { w: w.clone(), k: k.clone(), x });
            }
        }
    }
    out
}

/// `T` unit and associativity laws, the four strength axioms, and the
/// covariance of components along initialisations.
pub fn t_laws(sig: &Signature, bound: usize) -> TestReport {
    let mut report = TestReport::new("monad T").bound("world", bound);
    let arrows: Vec<(Sort, Vec<(String, Kleisli)>)> = sig.sorts().map(|k| (k.clone(), sample_kleislis(sig, k))).collect();
    let arrows_for = |k: &Sort| &arrows.iter().find(|(s, _)| s == k).expect("every sort").1;
    let settings = settings(sig, bound);

    let mut pairs = Vec::new();
    let mut triples = Vec::new();
    for s in &settings {
        for (i, _) in arrows_for(&s.k).iter().enumerate() {
            pairs.push((s, i));
            for (j, _) in arrows_for(&s.k).iter().enumerate() {
                triples.push((s, i, j));
            }
        }
    }
    // Computations over `s.w`: the unit and every sample arrow applied to `s.x`.
    let comp = |s: &Setting, i: usize| -> Result<MonadComp, SemError> { (arrows_for(&s.k)[i].1)(&s.w, s.x.clone()) };

    report.merge(law("T left unit", pairs.clone(), |(s, i)| {
        let f = arrows_for(&s.k)[*i].1.clone();
        let lhs = t_bind(&t_return(&s.w, s.x.clone()), f.clone());
        let rhs = f(&s.w, s.x.clone())?;
        t_equal(sig, &lhs, &rhs, bound)
    }));
    report.merge(law("T right unit", pairs.clone(), |(s, i)| {
        let m = comp(s, *i)?;
        t_equal(sig, &t_bind(&m, unit_kleisli()), &m, bound)
    }));
    report.merge(law("T associativity", triples.clone(), |(s, i, j)| {
        let m = t_return(&s.w, s.x.clone());
        let (f, g) = (arrows_for(&s.k)[*i].1.clone(), arrows_for(&s.k)[*j].1.clone());
        let m = t_bind(&m, f.clone());
        let lhs = t_bind(&t_bind(&m, f.clone()), g.clone());
        let fg: Kleisli = Arc::new(move |w: &World, y: SemValue| Ok(t_bind(&f(w, y)?, g.clone())));
        let rhs = t_bind(&m, fg);
        t_equal(sig, &lhs, &rhs, bound)
    }));

    let mut with_args = Vec::new();
    for (s, i) in &pairs {
        for a in strength_args(&s.w) {
            with_args.push((*s, *i, a));
        }
    }
    report.merge(law("T strength unit", pairs.clone(), |(s, i)| {
        let m = comp(s, *i)?;
        t_equal(sig, &t_map(&t_strength(SemValue::Star, &m), |v| snd(&v)), &m, bound)
    }));
    report.merge(law("T strength return", with_args.clone(), |(s, _, a)| {
        let lhs = t_strength(a.clone(), &t_return(&s.w, s.x.clone()));
        let rhs = t_return(&s.w, SemValue::pair(a.clone(), s.x.clone()));
        t_equal(sig, &lhs, &rhs, bound)
    }));
    report.merge(law("T strength bind", with_args.clone(), |(s, i, a)| {
        let f = arrows_for(&s.k)[*i].1.clone();
        let m = comp(s, 0)?;
        let lhs = t_strength(a.clone(), &t_bind(&m, f.clone()));
        let after: Kleisli = Arc::new(move |w: &World, p: SemValue| Ok(t_strength(fst(&p), &f(w, snd(&p))?)));
        let rhs = t_bind(&t_strength(a.clone(), &m), after);
        t_equal(sig, &lhs, &rhs, bound)
    }));
    let mut with_two = Vec::new();
    for (s, i) in &pairs {
        for a in strength_args(&s.w) {
            for b in strength_args(&s.w) {
                with_two.push((*s, *i, a.clone(), b));
            }
        }
    }
    report.merge(law("T strength associativity", with_two, |(s, i, a, b)| {
        let m = comp(s, *i)?;
        let lhs = t_map(&t_strength(SemValue::pair(a.clone(), b.clone()), &m), |v| reassoc(&v));
        let rhs = t_strength(a.clone(), &t_strength(b.clone(), &m));
        t_equal(sig, &lhs, &rhs, bound)
    }));

    let mut covariance = Vec::new();
    for (s, i) in &pairs {
        for w1 in enumerate_worlds(sig, bound).into_iter().filter(|w1| w1.len() >= s.w.len()) {
            for h in injections(&s.w, &w1) {
                for init in enumerate_initialisations(sig, &w1, bound) {
                    covariance.push((*s, *i, h.clone(), init));
                }
            }
        }
    }
    report.merge(law("T covariance along initialisations", covariance, |(s, i, h, init)| {
        let m = comp(s, *i)?;
        for st in enumerate_stores(sig, init.dom()) {
            let moved = p_map_init(init, &m.at(h, &st)?)?;
            let direct = m.at(&init.inj().after(h), &stores_action(init, &st))?;
            if let Some(w) = same_rep(&format!("store {st}, initialisation {init:?}"), &moved, &direct)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }));
    report
}

fn p_kleisli(f: &Kleisli, a: &SemValue, s: &Store) -> Result<CoendRep, SemError> {
    f(s.world(), a.clone())?.run(s)
}

/// `P` unit and associativity laws and the four strength axioms on every
/// representative with at most `bound` cells.
pub fn p_laws(sig: &Signature, bound: usize) -> TestReport {
    let mut report = TestReport::new("monad P").bound("world", bound);
    let mut reps: Vec<(Sort, CoendRep)> = Vec::new();
    let mut returns: Vec<(Sort, SemValue, Store)> = Vec::new();
    for w in enumerate_worlds(sig, bound) {
        for k in sig.sorts() {
            for r in rep_universe(sig, &w, bound, &GroundType::Ref(k.clone())) {
                reps.push((k.clone(), r));
            }
            for x in locs_of(&w, k) {
                for s in enumerate_stores(sig, &w) {
                    returns.push((k.clone(), x.clone(), s));
                }
            }
        }
    }
    let arrows: Vec<(Sort, Vec<(String, Kleisli)>)> = sig.sorts().map(|k| (k.clone(), sample_kleislis(sig, k))).collect();
    let arrows_for = |k: &Sort| &arrows.iter().find(|(s, _)| s == k).expect("every sort").1;

    let with_arrow = |items: &[(Sort, CoendRep)]| {
        let mut out = Vec::new();
        for (k, r) in items {
            for i in 0..arrows_for(k).len() {
                out.push((k.clone(), r.clone(), i));
            }
        }
        out
    };

    let mut left = Vec::new();
    for (k, x, s) in &returns {
        for i in 0..arrows_for(k).len() {
            left.push((k.clone(), x.clone(), s.clone(), i));
        }
    }
    report.merge(law("P left unit", left, |(k, x, s, i)| {
        let f = &arrows_for(k)[*i].1;
        let lhs = p_bind(&p_return(x.clone(), s.clone()), |a, s| p_kleisli(f, a, s))?;
        same_rep("left unit", &lhs, &p_kleisli(f, x, s)?)
    }));
    report.merge(law("P right unit", reps.clone(), |(_, r)| {
        let lhs = p_bind(r, |a, s| Ok(p_return(a.clone(), s.clone())))?;
        same_rep("right unit", &lhs, r)
    }));
    let mut assoc = Vec::new();
    for (k, r, i) in with_arrow(&reps) {
        for j in 0..arrows_for(&k).len() {
            assoc.push((k.clone(), r.clone(), i, j));
        }
    }
    report.merge(law("P associativity", assoc, |(k, r, i, j)| {
        let (f, g) = (&arrows_for(k)[*i].1, &arrows_for(k)[*j].1);
        let lhs = p_bind(&p_bind(r, |a, s| p_kleisli(f, a, s))?, |a, s| p_kleisli(g, a, s))?;
        let rhs = p_bind(r, |a, s| p_bind(&p_kleisli(f, a, s)?, |b, s| p_kleisli(g, b, s)))?;
        same_rep("associativity", &lhs, &rhs)
    }));

    report.merge(law("P strength unit", reps.clone(), |(_, r)| {
        same_rep("strength unit", &p_map(&p_strength(&SemValue::Star, r), snd), r)
    }));
    let mut ret_args = Vec::new();
    for (_, y, s) in &returns {
        for a in strength_args(s.world()) {
            ret_args.push((a, y.clone(), s.clone()));
        }
    }
    report.merge(law("P strength return", ret_args, |(a, y, s)| {
        let lhs = p_strength(a, &p_return(y.clone(), s.clone()));
        same_rep("strength return", &lhs, &p_return(SemValue::pair(a.clone(), y.clone()), s.clone()))
    }));
    let mut bind_args = Vec::new();
    for (k, r, i) in with_arrow(&reps) {
        for a in strength_args(&r.base) {
            bind_args.push((k.clone(), r.clone(), i, a));
        }
    }
    report.merge(law("P strength bind", bind_args, |(k, r, i, a)| {
        let f = &arrows_for(k)[*i].1;
        let lhs = p_strength(a, &p_bind(r, |b, s| p_kleisli(f, b, s))?);
        let rhs = p_bind(&p_strength(a, r), |p, s| Ok(p_strength(&fst(p), &p_kleisli(f, &snd(p), s)?)))?;
        same_rep("strength bind", &lhs, &rhs)
    }));
    let mut two_args = Vec::new();
    for (_, r) in &reps {
        for a in strength_args(&r.base) {
            for b in strength_args(&r.base) {
                two_args.push((r.clone(), a.clone(), b));
            }
        }
    }
    report.merge(law("P strength associativity", two_args, |(r, a, b)| {
        let lhs = p_map(&p_strength(&SemValue::pair(a.clone(), b.clone()), r), reassoc);
        same_rep("strength associativity", &lhs, &p_strength(a, &p_strength(b, r)))
    }));
    report
}

/// Does the square `ι1 : w1 → w2`, `ι2 : w3 → w4`, `h1 : w1 → w3`,
/// `h2 : w2 → w4` satisfy the side conditions of the third hiding axiom?
pub fn qualifying_square(i1: &Initialisation, i2: &Initialisation, h1: &Injection, h2: &Injection) -> bool {
    if i2.inj().after(h1).loc_map() != h2.after(i1.inj()).loc_map() {
        return false;
    }
    for l2 in i1.cod().locs() {
        for l3 in i2.dom().locs() {
            if h2.apply(l2) == i2.inj().apply(l3) {
                let witness = i1.dom().locs().any(|l1| i1.inj().apply(l1) == l2 && h1.apply(l1) == l3);
                if !witness {
                    return false;
                }
            }
        }
    }
    let image = i1.inj().image();
    i1.cod().locs().filter(|l| !image.contains(l)).all(|l2| {
        match (i2.data().get(h2.apply(l2)), i1.data().get(l2)) {
            (Some(d2), Some(d1)) => *d2 == d1.push(h2),
            _ => false,
        }
    })
}

/// The hiding algebra axioms on `P(X · Stores)` together with the invertible
/// unit and invertible strength lemmas when they apply.
pub fn hiding_laws(sig: &Signature, bound: usize) -> TestReport {
    let mut report = TestReport::new("hiding").bound("world", bound);
    let worlds = enumerate_worlds(sig, bound);
    let payloads: Vec<GroundType> =
        std::iter::once(GroundType::Unit).chain(sig.sorts().map(|k| GroundType::Ref(k.clone()))).collect();
    let universe = |w: &World| -> Vec<CoendRep> { payloads.iter().flat_map(|p| rep_universe(sig, w, bound, p)).collect() };

    let all: Vec<CoendRep> = worlds.iter().flat_map(&universe).collect();
    report.merge(law("hide identity", all, |r| same_rep("hide_id", &p_hide(&Injection::identity(&r.base), r)?, r)));

    let mut chains = Vec::new();
    for w3 in &worlds {
        for w2 in worlds.iter().filter(|w| w.len() <= w3.len()) {
            for h2 in injections(w2, w3) {
                for w1 in worlds.iter().filter(|w| w.len() <= w2.len()) {
                    for h1 in injections(w1, w2) {
                        chains.push((h1, h2.clone()));
                    }
                }
            }
        }
    }
    let mut compositions = Vec::new();
    for (h1, h2) in chains {
        for r in universe(h2.cod()) {
            compositions.push((h1.clone(), h2.clone(), r));
        }
    }
    report.merge(law("hide composition", compositions, |(h1, h2, r)| {
        same_rep("hide composition", &p_hide(h1, &p_hide(h2, r)?)?, &p_hide(&h2.after(h1), r)?)
    }));

    let mut squares = Vec::new();
    for w1 in &worlds {
        for i1 in enumerate_initialisations(sig, w1, bound) {
            for w3 in worlds.iter().filter(|w| w.len() >= w1.len()) {
                for h1 in injections(w1, w3) {
                    for i2 in enumerate_initialisations(sig, w3, bound) {
                        for h2 in injections(i1.cod(), i2.cod()) {
                            if qualifying_square(&i1, &i2, &h1, &h2) {
                                squares.push((i1.clone(), i2.clone(), h1.clone(), h2));
                            }
                        }
                    }
                }
            }
        }
    }
    report.note(format!("{} qualifying squares", squares.len()));
    report.merge(law("hide third axiom", squares, |(i1, i2, h1, h2)| {
        for r in universe(i2.dom()) {
            let lhs = p_map_init(i1, &p_hide(h1, &r)?)?;
            let rhs = p_hide(h2, &p_map_init(i2, &r)?)?;
            if let Some(w) = same_rep(&format!("rep {r}"), &lhs, &rhs)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }));

    if sig.is_constant() {
        let unit_bound = bound.max(3);
        let worlds3 = enumerate_worlds(sig, unit_bound);
        report.merge(law("invertible unit", worlds3, |w| invertible_unit_at(sig, w, unit_bound)));
    }
    report.merge(law("invertible strength", worlds.clone(), |w| invertible_strength_at(sig, w, bound)));
    report
}

/// `η : Stores w → P Stores w` is injective and every representative over
/// `w` is equal to the unit of some store.
pub fn invertible_unit_at(sig: &Signature, w: &World, bound: usize) -> Result<Option<String>, SemError> {
    let units: Vec<CoendRep> = enumerate_stores(sig, w).into_iter().map(|s| p_return(SemValue::Star, s)).collect();
    for (i, a) in units.iter().enumerate() {
        for b in &units[i + 1..] {
            if coend_equal(a, b)? {
                return Ok(Some(format!("distinct stores identified: {a} and {b}")));
            }
        }
    }
    for r in rep_universe(sig, w, bound, &GroundType::Unit) {
        let mut hit = false;
        for u in &units {
            if coend_equal(&r, u)? {
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(Some(format!("{r} is not the unit of any store")));
        }
    }
    Ok(None)
}

/// For `X = bool`: `(x, r) ↦ σ(x, r)` is injective on classes and every
/// representative with a pair payload is hit.
pub fn invertible_strength_at(sig: &Signature, w: &World, bound: usize) -> Result<Option<String>, SemError> {
    let reps = rep_universe(sig, w, bound, &GroundType::Unit);
    let mut classes: Vec<CoendRep> = Vec::new();
    for r in reps {
        let mut fresh = true;
        for c in &classes {
            if coend_equal(c, &r)? {
                fresh = false;
                break;
            }
        }
        if fresh {
            classes.push(r);
        }
    }
    let mut images = Vec::new();
    for x in [SemValue::tt(), SemValue::ff()] {
        for c in &classes {
            images.push((x.clone(), c.clone(), p_strength(&x, c)));
        }
    }
    for (i, (x, c, a)) in images.iter().enumerate() {
        for (y, d, b) in &images[i + 1..] {
            if coend_equal(a, b)? {
                return Ok(Some(format!("σ({x}, {c}) = σ({y}, {d})")));
            }
        }
    }
    for r in rep_universe(sig, w, bound, &GroundType::product(GroundType::bool(), GroundType::Unit)) {
        let back = p_strength(&fst(&r.payload), &p_map(&r, snd));
        if let Some(wit) = same_rep("not in the image of the strength", &r, &back)? {
            return Ok(Some(wit));
        }
    }
    Ok(None)
}

/// Monad and strength laws for both monads.
pub fn monad_suite(sig: &Signature, cfg: &SuiteConfig) -> TestReport {
    let mut report = TestReport::new("monad").bound("world", cfg.bound);
    report.merge(p_laws(sig, cfg.bound));
    report.merge(t_laws(sig, cfg.bound));
    report
}

pub fn hiding_suite(sig: &Signature, cfg: &SuiteConfig) -> TestReport {
    hiding_laws(sig, cfg.bound)
}

pub fn gs_suite(sig: &Signature, cfg: &SuiteConfig) -> TestReport {
    check_equations(&builtin_schemas(), sig, cfg.bound.max(3), true)
}

/// Bundled masking examples followed by generated closed boolean programs at
/// the empty layout.
pub fn masking_suite(sig: &Signature, cfg: &SuiteConfig) -> TestReport {
    let mut report = TestReport::new("masking").bound("programs", cfg.programs).bound("size", cfg.size);
    let mut bundled = vec!["let x = ref KAPPA true in true".to_string(), "true".to_string()];
    if sig.sorts().any(|k| k.as_str() == "cell") {
        bundled.push(
            "new { payload : data = true, cyclic_list : list = inj2 head, head : cell = (payload, cyclic_list) } in \
             match !head with (p, rest) -> !p"
                .to_string(),
        );
    }
    let bool_sort = sig.sorts().find(|k| *sig.typeof_sort(k) == GroundType::bool()).cloned();
    for text in bundled {
        let text = match &bool_sort {
            Some(k) => text.replace("KAPPA", k.as_str()),
            None if text.contains("KAPPA") => continue,
            None => text,
        };
        match parse_core_term(sig, &World::empty(), &Context::new(), &text) {
            Ok(t) => report.merge(check_masking(sig, &t, &Type::bool())),
            Err(e) => {
                report.instances += 1;
                report.fail(text, e.to_string());
            }
        }
    }
    let results: Vec<Option<Failure>> = (0..cfg.programs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let t = match closed_program(sig, &World::empty(), &Type::bool(), cfg.size, seed) {
                Ok(t) => t,
                Err(e) => return Some(Failure { instance: format!("seed {seed}"), witness: e.to_string() }),
            };
            let r = check_masking(sig, &t, &Type::bool());
            r.failures.into_iter().next()
        })
        .collect();
    report.absorb(results);
    report
}

/// A closed program of type `ty` at `layout`, trying a few seeds derived
/// from `seed` before giving up.
pub fn closed_program(sig: &Signature, layout: &World, ty: &Type, size: usize, seed: u64) -> Result<crate::syntax::Term, GenError> {
    let mut last = None;
    for attempt in 0..8u64 {
        match Generator::new(sig, seed.wrapping_mul(8).wrapping_add(attempt)).closed_of_type(layout, ty, size) {
            Ok(t) => return Ok(t),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Preservation and totality on generated programs.
pub fn preservation_suite(sig: &Signature, cfg: &SuiteConfig) -> TestReport {
    let mut report = TestReport::new("preservation").bound("programs", cfg.programs).bound("size", cfg.size);
    let results: Vec<Option<Failure>> = (0..cfg.programs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let (w, t, ty) = match super::gen::gen_well_typed(sig, cfg.size, seed) {
                Ok(p) => p,
                Err(e) => return Some(Failure { instance: format!("seed {seed}"), witness: e.to_string() }),
            };
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            check_preservation(sig, &w, &t, &ty, &mut rng)
        })
        .collect();
    report.absorb(results);
    report
}

/// Agreement of evaluation and denotation on generated programs, over every
/// extension of their layout within the bound and every heap there.
pub fn soundness_suite(sig: &Signature, cfg: &SuiteConfig) -> TestReport {
    let mut report = TestReport::new("soundness")
        .bound("world", cfg.bound)
        .bound("programs", cfg.programs)
        .bound("size", cfg.size);
    let reports: Vec<TestReport> = (0..cfg.programs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let gen_cfg = GenConfig { size: cfg.size, max_layout: cfg.bound };
            match Generator::new(sig, seed).program(gen_cfg) {
                Ok((program, t, ty)) => check_soundness(sig, &program, &t, &ty, cfg.bound),
                Err(e) => {
                    let mut r = TestReport::new("soundness");
                    r.instances = 1;
                    r.fail(format!("seed {seed}"), e.to_string());
                    r
                }
            }
        })
        .collect();
    for r in reports {
        report.instances += r.instances;
        report.failures.extend(r.failures);
    }
    report
}

pub fn run_suite(name: &str, sig: &Signature, cfg: &SuiteConfig) -> Option<TestReport> {
    Some(match name {
        "monad" => monad_suite(sig, cfg),
        "hiding" => hiding_suite(sig, cfg),
        "gs" => gs_suite(sig, cfg),
        "masking" => masking_suite(sig, cfg),
        "soundness" => {
            let mut r = soundness_suite(sig, cfg);
            let p = preservation_suite(sig, cfg);
            r.merge(p);
            r
        }
        _ => return None,
    })
}

/// The two signatures every suite runs against by default.
pub fn default_signatures() -> Vec<(&'static str, Signature)> {
    vec![("linked-list", Signature::linked_list()), ("constant", Signature::constant_bool())]
}

/// The program of the counter example, for reuse by callers.
pub fn swap_program() -> crate::syntax::Program {
    parse_program("cell data = bool;\nlayout { #0 : data, #1 : data }\nlet x = !#0 in #0 := !#1; #1 := x")
        .expect("bundled program parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kleislis_typecheck_for_every_sort() {
        let sig = Signature::linked_list();
        for k in sig.sorts() {
            assert!(sample_kleislis(&sig, k).len() >= 4);
        }
    }

    #[test]
    fn t_laws_small() {
        let r = t_laws(&Signature::constant_bool(), 1);
        assert!(r.passed(), "{r}");
        assert!(r.instances > 0);
    }

    #[test]
    fn p_laws_small() {
        let r = p_laws(&Signature::constant_bool(), 1);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn hiding_small() {
        let r = hiding_laws(&Signature::constant_bool(), 1);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn a_square_that_does_not_commute_is_rejected() {
        let d = Sort::new("d");
        let w1 = World::contiguous([d.clone()].iter());
        let w3 = World::contiguous([d.clone(), d].iter());
        let (i1, i3) = (Initialisation::identity(&w1), Initialisation::identity(&w3));
        let h1 = Injection::inclusion(&w1, &w3).unwrap();
        let shifted = injections(&w1, &w3).into_iter().find(|h| h.loc_map() != h1.loc_map()).unwrap();
        assert!(qualifying_square(&i1, &i3, &h1, &h1));
        assert!(!qualifying_square(&i1, &i3, &h1, &shifted));
    }

    #[test]
    fn masking_suite_small() {
        let cfg = SuiteConfig { programs: 20, ..SuiteConfig::default() };
        for (_, sig) in default_signatures() {
            let r = masking_suite(&sig, &cfg);
            assert!(r.passed(), "{r}");
        }
    }
}
