//! Operational checks (preservation, totality) and agreement between the
//! evaluator and the denotational model.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::denote::{denote_closed, denote_heap, denote_value, equality::compare_reps, Bounds, Verdict};
use crate::error::SemError;
use crate::initialisations::{enumerate_stores, CoendRep};
use crate::opsem::{eval, render_heap, to_typed, UntypedHeap, DEFAULT_FUEL};
use crate::signature::Signature;
use crate::syntax::{Side, Term, Type};
use crate::typing::{check, Context};
use crate::worlds::{cell_values, enumerate_worlds, indep_coproduct, Injection, SemValue, World};

use super::report::{Failure, TestReport};

/// The syntactic value denoting a ground semantic value.
pub fn semvalue_to_term(v: &SemValue) -> Option<Term> {
    Some(match v {
        SemValue::Star => Term::Star,
        SemValue::Loc(l) => Term::Loc(*l),
        SemValue::Inj(s, v) => Term::inj(*s, semvalue_to_term(v)?),
        SemValue::Pair(a, b) => Term::pair(semvalue_to_term(a)?, semvalue_to_term(b)?),
        SemValue::Tuple(_) | SemValue::Closure(_) => return None,
    })
}

/// Every typed heap over `w`.
pub fn all_heaps(sig: &Signature, w: &World) -> Vec<UntypedHeap> {
    enumerate_stores(sig, w)
        .into_iter()
        .map(|s| s.cells().iter().map(|(l, v)| (*l, semvalue_to_term(v).expect("stores are ground"))).collect())
        .collect()
}

/// Whether some typed heap over `w` exists.
pub fn has_heaps(sig: &Signature, w: &World) -> bool {
    w.iter().all(|(_, k)| !cell_values(sig, k, w).is_empty())
}

/// A uniformly random typed heap over `w`, which must satisfy [`has_heaps`].
pub fn random_heap(sig: &Signature, w: &World, rng: &mut impl Rng) -> UntypedHeap {
    w.iter()
        .map(|(l, k)| {
            let vals = cell_values(sig, k, w);
            let v = vals.choose(rng).expect("every sort is inhabited at a world holding it");
            (l, semvalue_to_term(v).expect("ground"))
        })
        .collect()
}

/// Extensions `w ⊕ E` of `w` with at most `bound` cells in total.
pub fn layouts_above(sig: &Signature, w: &World, bound: usize) -> Vec<World> {
    enumerate_worlds(sig, bound.saturating_sub(w.len())).into_iter().map(|e| indep_coproduct(w, &e).0).collect()
}

pub fn as_bool(t: &Term) -> Option<bool> {
    match t {
        Term::Inj(Side::First, v) if **v == Term::Star => Some(true),
        Term::Inj(Side::Second, v) if **v == Term::Star => Some(false),
        _ => None,
    }
}

/// Runs `t` at a random extension of its layout and heap there, then checks
/// that the result re-typechecks and the final heap is typed.
pub fn check_preservation(
    sig: &Signature,
    w: &World,
    t: &Term,
    ty: &Type,
    rng: &mut impl Rng,
) -> Option<Failure> {
    let uppers: Vec<World> = layouts_above(sig, w, w.len() + 1).into_iter().filter(|u| has_heaps(sig, u)).collect();
    let w1 = uppers.choose(rng)?;
    let h1 = random_heap(sig, w1, rng);
    let instance = || format!("{t} : {ty} at {w1} with heap {{{}}}", render_heap(w1, &h1).trim().replace('\n', ", "));
    let out = match eval(t, &h1, DEFAULT_FUEL) {
        Ok(out) => out,
        Err(e) => return Some(Failure { instance: instance(), witness: e.to_string() }),
    };
    let w2 = out.final_layout(w1);
    if let Err(e) = check(sig, &w2, &Context::new(), &out.value, ty) {
        return Some(Failure { instance: instance(), witness: format!("result {} does not retype: {e}", out.value) });
    }
    if let Err(e) = to_typed(sig, &w2, &out.heap) {
        return Some(Failure { instance: instance(), witness: format!("final heap is not typed: {e}") });
    }
    None
}

/// Bounds used when results are functions.
pub fn soundness_bounds(world: usize) -> Bounds {
    Bounds { world, value: 8 }
}

/// Checks `(π_{w≤w'}⟦t⟧)⟦H'⟧ = q_{w'≤w''}(⟦v⟧, ⟦H''⟧)` for every `w'` above
/// `w` within `bound` cells and every heap `H'` over it, where
/// `⟨t, H'⟩ ⇓ ⟨v, H''⟩`.
pub fn check_soundness(sig: &Signature, w: &World, t: &Term, ty: &Type, bound: usize) -> TestReport {
    let mut report = TestReport::new("soundness").bound("world", bound);
    let m = match denote_closed(t, w) {
        Ok(m) => m,
        Err(e) => {
            report.instances += 1;
            report.fail(t.to_string(), format!("no denotation: {e}"));
            return report;
        }
    };
    let mut results = Vec::new();
    for w1 in layouts_above(sig, w, bound) {
        let h = Injection::inclusion(w, &w1).expect("extension");
        for heap in all_heaps(sig, &w1) {
            results.push(soundness_instance(sig, t, ty, &m, &h, &w1, &heap, bound));
        }
    }
    report.absorb(results);
    report
}

#[allow(clippy::too_many_arguments)]
fn soundness_instance(
    sig: &Signature,
    t: &Term,
    ty: &Type,
    m: &crate::denote::MonadComp,
    h: &Injection,
    w1: &World,
    heap: &UntypedHeap,
    bound: usize,
) -> Option<Failure> {
    let instance = || format!("{t} at {w1} with heap {{{}}}", render_heap(w1, heap).trim().replace('\n', ", "));
    let run = || -> Result<Option<String>, String> {
        let out = eval(t, heap, DEFAULT_FUEL).map_err(|e| e.to_string())?;
        let w2 = out.final_layout(w1);
        let typed1 = to_typed(sig, w1, heap).map_err(|e| e.to_string())?;
        let typed2 = to_typed(sig, &w2, &out.heap).map_err(|e| e.to_string())?;
        let sem = |e: SemError| e.to_string();
        let left = m.at(h, &denote_heap(&typed1).map_err(sem)?).map_err(sem)?;
        let v = denote_value(&out.value, &Injection::identity(&w2), &Default::default()).map_err(sem)?;
        let right = CoendRep::new(Injection::inclusion(w1, &w2).expect("heaps only grow"), v, denote_heap(&typed2).map_err(sem)?);
        match compare_reps(sig, &left, &right, ty, soundness_bounds(bound)).map_err(sem)? {
            Verdict::NotEqual(wit) => Ok(Some(format!(
                "evaluated to {} with heap {{{}}}\n{}",
                out.value,
                render_heap(&w2, &out.heap).trim().replace('\n', ", "),
                wit
            ))),
            _ => Ok(None),
        }
    };
    match run() {
        Ok(None) => None,
        Ok(Some(w)) => Some(Failure { instance: instance(), witness: w }),
        Err(e) => Some(Failure { instance: instance(), witness: e }),
    }
}

/// For a closed program at the empty layout whose type has no references and
/// no functions: its result at the empty store, provided no private cells
/// survive garbage collection.
pub fn masked_value(t: &Term) -> Result<SemValue, String> {
    let m = denote_closed(t, &World::empty()).map_err(|e| e.to_string())?;
    let r = m.run(&crate::initialisations::Store::empty()).map_err(|e| e.to_string())?;
    if r.private_count() == 0 {
        Ok(r.payload)
    } else {
        Err(format!("private cells survive: {r}"))
    }
}

pub fn check_masking(sig: &Signature, t: &Term, ty: &Type) -> TestReport {
    let mut report = TestReport::new("masking");
    report.instances = 1;
    if !ty.is_constant() {
        report.fail(t.to_string(), format!("{ty} mentions references or functions"));
        return report;
    }
    if let Err(e) = check(sig, &World::empty(), &Context::new(), t, ty) {
        report.fail(t.to_string(), e.to_string());
        return report;
    }
    match masked_value(t) {
        Ok(v) => report.note(format!("{t} is pure {v}")),
        Err(e) => report.fail(t.to_string(), e),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn program(src: &str) -> (Signature, World, Term, Type) {
        let p = parse_program(src).unwrap();
        let ty = crate::typing::infer(&p.sig, &p.layout, &Context::new(), &p.term).unwrap();
        (p.sig, p.layout, p.term, ty)
    }

    #[test]
    fn swap_is_sound() {
        let (sig, w, t, ty) = program(
            "cell data = bool;\nlayout { #0 : data, #1 : data }\nlet x = !#0 in #0 := !#1; #1 := x",
        );
        let r = check_soundness(&sig, &w, &t, &ty, 2);
        assert!(r.passed(), "{r}");
        assert_eq!(r.instances, 4);
    }

    #[test]
    fn cyclic_list_is_sound() {
        let (sig, w, t, ty) = program(
            "cell data = bool; cell list = 1 + ref cell; cell cell = ref data * ref list;\n\
             new { payload : data = true, cyclic_list : list = inj2 head, head : cell = (payload, cyclic_list) } in cyclic_list",
        );
        let r = check_soundness(&sig, &w, &t, &ty, 2);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn functions_returned_are_sound() {
        let (sig, w, t, ty) =
            program("cell d = bool;\nlayout { #0 : d }\nnew { c : d = false } in fun (u : 1) -> (c := true; !c)");
        let r = check_soundness(&sig, &w, &t, &ty, 2);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn masking_of_unused_allocation() {
        let (sig, _, t, _) = program("cell d = bool;\nnew { x : d = true } in !x");
        let r = check_masking(&sig, &t, &Type::bool());
        assert!(r.passed(), "{r}");
    }
}
