use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use lref::denote::{denote_closed, denote_heap, denote_value, equal_bounded, equal_open, Bounds, Env, Verdict};
use lref::harness::equations::{builtin_schemas, check_equation, Expect, Source};
use lref::harness::gen::gen_well_typed;
use lref::harness::laws::{invertible_unit_at, masking_suite, monad_suite, soundness_suite, swap_program, SuiteConfig};
use lref::harness::obs::obs_diff;
use lref::harness::soundness::{check_masking, check_preservation, has_heaps, layouts_above};
use lref::initialisations::oracle::{oracle_classes, rep_universe, DEFAULT_BUDGET};
use lref::initialisations::{coend_equal, CoendRep};
use lref::opsem::{eval, to_typed, UntypedHeap, DEFAULT_FUEL};
use lref::syntax::{parse_core_term, parse_program, parse_type, Program};
use lref::typing::{check, infer_principal, Context};
use lref::worlds::enumerate_worlds;
use lref::{GroundType, Injection, Loc, SemValue, Signature, Term, Type, World};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const CORPUS_PER_SIG: u64 = 5000;
const CORPUS_SIZE: usize = 12;

fn sigs() -> [(&'static str, Signature); 2] {
    [("linked-list", Signature::linked_list()), ("constant", Signature::constant_bool())]
}

fn load(src: &str) -> Program {
    parse_program(src).unwrap_or_else(|e| panic!("bundled program does not parse: {e}\n{src}"))
}

fn first_errors(errs: Vec<String>) -> Outcome {
    let n = errs.len();
    let shown: Vec<String> = errs.into_iter().take(5).collect();
    Err(format!("{n} failures, first: {}", shown.join(" | ")))
}

fn typing_corpus() -> Outcome {
    let mut total = 0;
    let mut unique = 0;
    let mut errs = Vec::new();
    for (label, sig) in sigs() {
        let results: Vec<Result<bool, String>> = (0..CORPUS_PER_SIG)
            .into_par_iter()
            .map(|seed| {
                let (w, t, ty) = gen_well_typed(&sig, CORPUS_SIZE, seed).map_err(|e| format!("{label} seed {seed}: {e}"))?;
                if t.size() > CORPUS_SIZE {
                    return Err(format!("{label} seed {seed}: size {} exceeds {CORPUS_SIZE}", t.size()));
                }
                let ctx = Context::new();
                let p = infer_principal(&sig, &w, &ctx, &t).map_err(|e| format!("{label} seed {seed}: {t}: {e}"))?;
                if !p.admits(&ty) {
                    return Err(format!("{label} seed {seed}: principal {p} does not admit {ty}"));
                }
                if let Some(exact) = p.to_type() {
                    if exact != ty {
                        return Err(format!("{label} seed {seed}: inferred {exact}, generated at {ty}"));
                    }
                }
                check(&sig, &w, &ctx, &t, &ty).map_err(|e| format!("{label} seed {seed}: check: {e}"))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let uppers: Vec<World> =
                    layouts_above(&sig, &w, w.len() + 2).into_iter().filter(|u| u != &w && has_heaps(&sig, u)).collect();
                for u in uppers.choose_multiple(&mut rng, 3) {
                    check(&sig, u, &ctx, &t, &ty).map_err(|e| format!("{label} seed {seed}: not typed at {u}: {e}"))?;
                }
                Ok(p.to_type().is_some())
            })
            .collect();
        for r in results {
            total += 1;
            match r {
                Ok(true) => unique += 1,
                Ok(false) => {}
                Err(e) => errs.push(e),
            }
        }
    }
    if errs.is_empty() {
        Ok(format!("{total} terms typed, {unique} with a fully determined principal type"))
    } else {
        first_errors(errs)
    }
}

fn preservation_corpus() -> Outcome {
    let mut total = 0;
    let mut errs = Vec::new();
    for (label, sig) in sigs() {
        let results: Vec<Option<String>> = (0..CORPUS_PER_SIG)
            .into_par_iter()
            .map(|seed| {
                let (w, t, ty) = match gen_well_typed(&sig, CORPUS_SIZE, seed) {
                    Ok(p) => p,
                    Err(e) => return Some(format!("{label} seed {seed}: {e}")),
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
                check_preservation(&sig, &w, &t, &ty, &mut rng).map(|f| format!("{label}: {}: {}", f.instance, f.witness))
            })
            .collect();
        total += results.len();
        errs.extend(results.into_iter().flatten());
    }
    if errs.is_empty() {
        Ok(format!("{total} programs terminate with a well-typed value and heap"))
    } else {
        first_errors(errs)
    }
}

fn soundness() -> Outcome {
    let cfg = SuiteConfig { bound: 2, programs: 500, ..SuiteConfig::default() };
    let mut instances = 0;
    let mut errs = Vec::new();
    for (label, sig) in sigs() {
        let r = soundness_suite(&sig, &cfg);
        instances += r.instances;
        errs.extend(r.failures.iter().map(|f| format!("{label}: {}: {}", f.instance, f.witness)));
    }
    if errs.is_empty() {
        Ok(format!("{} programs, {instances} world/heap instances agree", 2 * cfg.programs))
    } else {
        first_errors(errs)
    }
}

fn coend_vs_oracle() -> Outcome {
    const CELLS: usize = 3;
    let mut pairs = 0u64;
    let mut reps = 0usize;
    let mut errs = Vec::new();
    for (label, sig) in sigs() {
        let mut payloads = vec![GroundType::Unit, GroundType::bool()];
        payloads.extend(sig.sorts().map(|k| GroundType::Ref(k.clone())));
        for base in enumerate_worlds(&sig, 2) {
            for payload in &payloads {
                let universe = rep_universe(&sig, &base, CELLS, payload);
                if universe.is_empty() {
                    continue;
                }
                let classes = match oracle_classes(&sig, &universe, CELLS, DEFAULT_BUDGET) {
                    Ok(c) => c,
                    Err(e) => {
                        errs.push(format!("{label} base {base} payload {payload}: oracle: {e}"));
                        continue;
                    }
                };
                reps += universe.len();
                let mismatches: Vec<String> = (0..universe.len())
                    .into_par_iter()
                    .flat_map_iter(|i| {
                        let (universe, classes) = (&universe, &classes);
                        (i..universe.len()).filter_map(move |j| {
                            let expected = classes[i] == classes[j];
                            match coend_equal(&universe[i], &universe[j]) {
                                Ok(got) if got == expected => None,
                                Ok(got) => Some(format!(
                                    "{label}: {} vs {}: coend_equal {got}, oracle {expected}",
                                    universe[i], universe[j]
                                )),
                                Err(e) => Some(format!("{label}: {} vs {}: {e}", universe[i], universe[j])),
                            }
                        })
                    })
                    .collect();
                let n = universe.len() as u64;
                pairs += n * (n + 1) / 2;
                errs.extend(mismatches);
            }
        }
    }
    if errs.is_empty() {
        Ok(format!("{reps} representatives within {CELLS} cells, {pairs} pairs agree with the move-graph oracle"))
    } else {
        first_errors(errs)
    }
}

fn monad_laws() -> Outcome {
    let cfg = SuiteConfig { bound: 2, ..SuiteConfig::default() };
    let mut instances = 0;
    let mut errs = Vec::new();
    for (label, sig) in sigs() {
        let r = monad_suite(&sig, &cfg);
        instances += r.instances;
        errs.extend(r.failures.iter().map(|f| format!("{label}: {}: {}", f.instance, f.witness)));
    }
    if errs.is_empty() {
        Ok(format!("{instances} law instances over worlds of at most 2 cells"))
    } else {
        first_errors(errs)
    }
}

fn masking() -> Outcome {
    let mut errs = Vec::new();
    let constant = Signature::constant_bool();
    let worlds = enumerate_worlds(&constant, 3);
    for w in &worlds {
        match invertible_unit_at(&constant, w, 3) {
            Ok(None) => {}
            Ok(Some(why)) => errs.push(format!("unit at {w}: {why}")),
            Err(e) => errs.push(format!("unit at {w}: {e}")),
        }
    }
    let cfg = SuiteConfig::default();
    let mut programs = 0;
    for (label, sig) in sigs() {
        let r = masking_suite(&sig, &cfg);
        programs += r.instances;
        errs.extend(r.failures.iter().map(|f| format!("{label}: {}: {}", f.instance, f.witness)));
    }
    let t = parse_core_term(&constant, &World::empty(), &Context::new(), "let x = ref d true in true").map_err(|e| e.to_string())?;
    let r = check_masking(&constant, &t, &Type::bool());
    errs.extend(r.failures.iter().map(|f| format!("{}: {}", f.instance, f.witness)));
    if errs.is_empty() {
        Ok(format!(
            "unit invertible at {} constant worlds, {programs} boolean programs mask their allocations",
            worlds.len()
        ))
    } else {
        first_errors(errs)
    }
}

fn equations() -> Outcome {
    let schemas = builtin_schemas();
    let mut errs = Vec::new();
    let mut summary = Vec::new();
    for (label, sig) in sigs() {
        let mut checked = 0;
        let mut instances = 0;
        for s in &schemas {
            let r = check_equation(s, &sig, 3, true);
            instances += r.instances;
            if r.instances == 0 {
                continue;
            }
            checked += 1;
            errs.extend(r.failures.iter().map(|f| format!("{label} {}: {}: {}", s.name, f.instance, f.witness)));
            if s.expect == Expect::NotEqual && r.passed() && !r.notes.iter().any(|n| n.contains("refuted at")) {
                errs.push(format!("{label} {}: refuted without a witness", s.name));
            }
            if s.source == Source::Stated && r.passed() {
                summary.push(format!("{} holds on {label}", s.name));
            }
        }
        summary.push(format!("{label}: {checked} schemas, {instances} instances"));
    }
    if errs.is_empty() {
        Ok(summary.join("; "))
    } else {
        first_errors(errs)
    }
}

fn swap_distinguished() -> Outcome {
    let swap = swap_program();
    let unit = parse_core_term(&swap.sig, &swap.layout, &Context::new(), "()").map_err(|e| e.to_string())?;
    let m1 = denote_closed(&swap.term, &swap.layout).map_err(|e| e.to_string())?;
    let m2 = denote_closed(&unit, &swap.layout).map_err(|e| e.to_string())?;
    let witness = match equal_bounded(&swap.sig, &m1, &m2, &Type::Unit, Bounds { world: 2, ..Bounds::default() }) {
        Ok(Verdict::NotEqual(w)) => w,
        Ok(v) => return Err(format!("expected a separating store, got {v}")),
        Err(e) => return Err(e.to_string()),
    };
    let ctx = obs_diff(&swap.sig, &swap.layout, &Context::new(), &swap.term, &unit, &Type::Unit, 20_000)
        .ok_or("no observation context separates swap from ()")?;
    let plug = ctx.context.to_string();
    if !plug.contains("!#0") {
        return Err(format!("separating context does not read #0: {plug}"));
    }
    Ok(format!("store {} separates; context {plug}", witness.store))
}

fn hidden_state_functions() -> Outcome {
    let sig = Signature::constant_bool();
    let plain = parse_core_term(&sig, &World::empty(), &Context::new(), "fun (u : 1) -> true").map_err(|e| e.to_string())?;
    let hidden = parse_core_term(&sig, &World::empty(), &Context::new(), "let x = ref d true in fun (u : 1) -> !x").map_err(|e| e.to_string())?;
    let ty = parse_type(&sig, "1 -> bool").map_err(|e| e.to_string())?;
    match equal_open(&sig, &World::empty(), &Context::new(), &plain, &hidden, &ty, Bounds { world: 3, ..Bounds::default() }) {
        Ok(Verdict::NotEqual(w)) => Ok(format!("distinguished: {}", w.detail)),
        Ok(v) => Err(format!("expected the denotations to differ, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn locs_in(v: &SemValue, out: &mut Vec<Loc>) {
    match v {
        SemValue::Loc(l) => out.push(*l),
        SemValue::Inj(_, v) => locs_in(v, out),
        SemValue::Pair(a, b) => {
            locs_in(a, out);
            locs_in(b, out);
        }
        SemValue::Tuple(vs) => vs.iter().for_each(|v| locs_in(v, out)),
        SemValue::Star | SemValue::Closure(_) => {}
    }
}

fn reachable(r: &CoendRep) -> BTreeSet<Loc> {
    let mut roots = Vec::new();
    locs_in(&r.payload, &mut roots);
    roots.extend(r.inj.image());
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<Loc> = roots.into();
    while let Some(l) = queue.pop_front() {
        if seen.insert(l) {
            let mut next = Vec::new();
            locs_in(r.store.lookup(l).expect("store covers its world"), &mut next);
            queue.extend(next);
        }
    }
    seen
}

fn sort_counts(w: &World, keep: &BTreeSet<Loc>) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for (_, k) in w.iter().filter(|(l, _)| keep.contains(l)) {
        *m.entry(k.to_string()).or_insert(0) += 1;
    }
    m
}

fn gc_against_bfs(prog: &Program, expect_kept: usize, expect_dropped: usize) -> Result<(), String> {
    let out = eval(&prog.term, &UntypedHeap::new(), DEFAULT_FUEL).map_err(|e| e.to_string())?;
    let w = out.final_layout(&prog.layout);
    let s = denote_heap(&to_typed(&prog.sig, &w, &out.heap).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let payload = denote_value(&out.value, &Injection::identity(&w), &Env::new()).map_err(|e| e.to_string())?;
    let public = Injection::inclusion(&prog.layout, &w).ok_or("final layout does not extend the initial one")?;
    let r = CoendRep::new(public, payload, s);
    let start = denote_heap(&to_typed(&prog.sig, &prog.layout, &UntypedHeap::new()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let denoted = denote_closed(&prog.term, &prog.layout)
        .and_then(|m| m.at(&Injection::identity(&prog.layout), &start))
        .map_err(|e| e.to_string())?;
    if !coend_equal(&denoted, &r).map_err(|e| e.to_string())? {
        return Err(format!("denotation {denoted} differs from the evaluated {r}"));
    }
    let live = reachable(&r);
    let gc = r.gc_canonical();
    let all: BTreeSet<Loc> = r.world().locs().collect();
    let kept: BTreeSet<Loc> = gc.world().locs().collect();
    if live.len() != expect_kept || all.len() - live.len() != expect_dropped {
        return Err(format!("{r}: {} reachable of {}, expected {expect_kept} and {expect_dropped} garbage", live.len(), all.len()));
    }
    if kept.len() != live.len() || sort_counts(gc.world(), &kept) != sort_counts(r.world(), &live) {
        return Err(format!("collected {gc} from {r}, reachable cells {live:?}"));
    }
    if !coend_equal(&r, &gc).map_err(|e| e.to_string())? {
        return Err(format!("{gc} is not equal to {r}"));
    }
    Ok(())
}

fn cyclic_list() -> Outcome {
    let src = "cell data = bool;\ncell list = 1 + ref cell;\ncell cell = ref data * ref list;\n\
               new { payload : data = true, cyclic_list : list = inj2 head, head : cell = (payload, cyclic_list) } in cyclic_list";
    let prog = load(src);
    let out = eval(&prog.term, &UntypedHeap::new(), DEFAULT_FUEL).map_err(|e| e.to_string())?;
    let expected: UntypedHeap = [
        (Loc(0), Term::tt()),
        (Loc(1), Term::inj(lref::syntax::Side::Second, Term::loc(2))),
        (Loc(2), Term::Pair(Box::new(Term::loc(0)), Box::new(Term::loc(1)))),
    ]
    .into();
    if out.value != Term::loc(1) || out.heap != expected {
        return Err(format!("value {} heap {:?}", out.value, out.heap));
    }
    let next = |l: Loc| -> Option<Loc> {
        match out.heap.get(&l)? {
            Term::Inj(_, t) | Term::Pair(_, t) => match &**t {
                Term::Loc(m) => Some(*m),
                _ => None,
            },
            _ => None,
        }
    };
    if next(Loc(1)) != Some(Loc(2)) || next(Loc(2)) != Some(Loc(1)) {
        return Err("no cycle #1 -> #2 -> #1".into());
    }
    let w = out.final_layout(&prog.layout);
    to_typed(&prog.sig, &w, &out.heap).map_err(|e| format!("final heap: {e}"))?;
    gc_against_bfs(&prog, 3, 0)?;
    let with_junk = src.replace("new { payload", "new { junk : data = false, payload");
    gc_against_bfs(&load(&with_junk), 3, 1)?;
    Ok("value #1, heap #1 -> #2 -> #1 with #0 = true; collection keeps exactly the reachable cells".into())
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 10] = [
        ("typing on 10000 generated terms", typing_corpus),
        ("preservation and termination", preservation_corpus),
        ("adequacy against evaluation", soundness),
        ("coend equality against the move-graph oracle", coend_vs_oracle),
        ("monad and strength laws", monad_laws),
        ("masking", masking),
        ("store equations", equations),
        ("swap is observable", swap_distinguished),
        ("hidden state in functions", hidden_state_functions),
        ("cyclic list and collection", cyclic_list),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {}. {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
