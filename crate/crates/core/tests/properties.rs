use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::Index;

use lref::denote::hiding::p_map;
use lref::harness::gen::gen_well_typed;
use lref::initialisations::oracle::{enumerate_initialisations, rep_universe};
use lref::initialisations::{coend_equal, compose_init, enumerate_stores, stores_action, Initialisation};
use lref::syntax::alpha::alpha_eq;
use lref::syntax::parse_core_term;
use lref::typing::Context;
use lref::worlds::{enumerate_worlds, injections, interp_type, local_coproduct};
use lref::{GroundType, Injection, SemValue, Signature, World};

fn sig_of(linked: bool) -> Signature {
    if linked {
        Signature::linked_list()
    } else {
        Signature::constant_bool()
    }
}

fn pick<T: Clone>(xs: &[T], i: Index) -> Option<T> {
    (!xs.is_empty()).then(|| xs[i.index(xs.len())].clone())
}

fn world(sig: &Signature, max: usize, i: Index) -> World {
    pick(&enumerate_worlds(sig, max), i).expect("the empty world is always there")
}

/// Two composable injections `w0 → w1 → w2` with `|w2| ≤ 3`.
fn chain(sig: &Signature, a: Index, b: Index, c: Index, d: Index) -> Option<(Injection, Injection)> {
    let w2 = world(sig, 3, a);
    let w1s: Vec<World> = enumerate_worlds(sig, w2.len()).into_iter().filter(|w| !injections(w, &w2).is_empty()).collect();
    let w1 = pick(&w1s, b)?;
    let h2 = pick(&injections(&w1, &w2), c)?;
    let w0s: Vec<World> = enumerate_worlds(sig, w1.len()).into_iter().filter(|w| !injections(w, &w1).is_empty()).collect();
    let w0 = pick(&w0s, d)?;
    let h1 = pick(&injections(&w0, &w1), a)?;
    Some((h1, h2))
}

fn payload_types(sig: &Signature) -> Vec<GroundType> {
    let mut out = vec![GroundType::Unit, GroundType::bool(), GroundType::product(GroundType::bool(), GroundType::Unit)];
    for k in sig.sorts() {
        out.push(GroundType::Ref(k.clone()));
        out.push(GroundType::sum(GroundType::Unit, GroundType::Ref(k.clone())));
    }
    out
}

fn negate(v: &SemValue) -> SemValue {
    if *v == SemValue::tt() {
        SemValue::ff()
    } else {
        SemValue::tt()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn printed_terms_parse_back(linked: bool, seed: u64) {
        let sig = sig_of(linked);
        let (w, t, _) = gen_well_typed(&sig, 12, seed).unwrap();
        let text = t.to_string();
        let back = parse_core_term(&sig, &w, &Context::new(), &text).unwrap();
        prop_assert!(alpha_eq(&t, &back), "{} reparsed as {}", text, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn values_are_functorial_in_worlds(linked: bool, a: Index, b: Index, c: Index, d: Index, g: Index, v: Index) {
        let sig = sig_of(linked);
        let Some((h1, h2)) = chain(&sig, a, b, c, d) else { return Ok(()) };
        let gamma = pick(&payload_types(&sig), g).unwrap();
        let Some(x) = pick(&interp_type(&gamma, h1.dom()), v) else { return Ok(()) };
        prop_assert_eq!(x.push(&Injection::identity(h1.dom())), x.clone());
        let composite = x.push(&h2.after(&h1));
        prop_assert_eq!(&composite, &x.push(&h1).push(&h2));
        prop_assert!(interp_type(&gamma, h2.cod()).contains(&composite));
    }

    #[test]
    fn local_coproduct_is_a_pushout_of_images(linked: bool, a: Index, b: Index, c: Index, d: Index, e: Index) {
        let sig = sig_of(linked);
        let w = world(&sig, 2, a);
        let targets: Vec<World> = enumerate_worlds(&sig, 3).into_iter().filter(|t| !injections(&w, t).is_empty()).collect();
        let (t1, t2) = (pick(&targets, b).unwrap(), pick(&targets, c).unwrap());
        let h1 = pick(&injections(&w, &t1), d).unwrap();
        let h2 = pick(&injections(&w, &t2), e).unwrap();
        let lc = local_coproduct(&h1, &h2);
        prop_assert_eq!(lc.p1.after(&h1), lc.p2.after(&h2));
        let (i1, i2) = (lc.p1.image(), lc.p2.image());
        let all: BTreeSet<_> = lc.world.locs().collect();
        prop_assert_eq!(i1.union(&i2).copied().collect::<BTreeSet<_>>(), all);
        prop_assert_eq!(i1.intersection(&i2).copied().collect::<BTreeSet<_>>(), lc.p1.after(&h1).image());
        prop_assert_eq!(lc.world.len(), t1.len() + t2.len() - w.len());
    }

    #[test]
    fn initialisations_form_a_category(linked: bool, a: Index, b: Index, c: Index, d: Index, s: Index) {
        let sig = sig_of(linked);
        let w0 = world(&sig, 1, a);
        let Some(i1) = pick(&enumerate_initialisations(&sig, &w0, 2), b) else { return Ok(()) };
        let Some(i2) = pick(&enumerate_initialisations(&sig, i1.cod(), 3), c) else { return Ok(()) };
        let Some(i3) = pick(&enumerate_initialisations(&sig, i2.cod(), 3), d) else { return Ok(()) };
        prop_assert_eq!(compose_init(&Initialisation::identity(i1.dom()), &i1), i1.clone());
        prop_assert_eq!(compose_init(&i1, &Initialisation::identity(i1.cod())), i1.clone());
        prop_assert_eq!(
            compose_init(&compose_init(&i1, &i2), &i3),
            compose_init(&i1, &compose_init(&i2, &i3))
        );
        let Some(st) = pick(&enumerate_stores(&sig, &w0), s) else { return Ok(()) };
        prop_assert_eq!(
            stores_action(&compose_init(&i1, &i2), &st),
            stores_action(&i2, &stores_action(&i1, &st))
        );
        prop_assert!(stores_action(&i1, &st).well_formed(&sig));
    }

    #[test]
    fn hiding_monad_is_a_functor(linked: bool, a: Index, r: Index) {
        let sig = sig_of(linked);
        let base = world(&sig, 1, a);
        let universe = rep_universe(&sig, &base, 2, &GroundType::bool());
        let Some(rep) = pick(&universe, r) else { return Ok(()) };
        prop_assert!(coend_equal(&p_map(&rep, SemValue::clone), &rep).unwrap());
        let twice = p_map(&p_map(&rep, negate), negate);
        prop_assert!(coend_equal(&twice, &rep).unwrap());
        let composed = p_map(&rep, |v| negate(&negate(v)));
        prop_assert!(coend_equal(&twice, &composed).unwrap());
    }
}
