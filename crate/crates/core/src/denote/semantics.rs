//! The interpretation of terms. A judgement `Γ ⊢_w t : τ` is interpreted at
//! every `h : w → w'` and environment over `w'`, giving a computation over
//! `w'`. Continuations recover their `h` and environment through the
//! strength, which carries them as a packed value.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::SemError;
use crate::initialisations::Store;
use crate::opsem::TypedHeap;
use crate::syntax::{Ident, Loc, Term};
use crate::worlds::{indep_coproduct, Closure, Injection, SemValue, World};

use super::monad::{mget, mnew, mset, t_bind, t_dstrength, t_map, t_return, t_strength, Kleisli, MonadComp};

pub type Env = BTreeMap<Ident, SemValue>;

fn unbound(x: &str) -> SemError {
    SemError::Shape(format!("unbound identifier `{x}`"))
}

fn expect_loc(v: &SemValue) -> Result<Loc, SemError> {
    v.as_loc().ok_or_else(|| SemError::Shape(format!("expected a location, got {v}")))
}

fn split_pair(v: SemValue) -> Result<(SemValue, SemValue), SemError> {
    match v {
        SemValue::Pair(a, b) => Ok((*a, *b)),
        other => Err(SemError::Shape(format!("expected a pair, got {other}"))),
    }
}

/// The part of `⟨h, e⟩` a continuation needs, and how to unpack it later.
struct Frame {
    dom: World,
    names: Vec<Ident>,
}

impl Frame {
    fn capture(conts: &[&Term], h: &Injection, env: &Env) -> (Frame, SemValue) {
        let mut locs = BTreeSet::new();
        let mut vars = BTreeSet::new();
        for t in conts {
            locs.extend(t.locations());
            vars.extend(t.free_vars());
        }
        let names: Vec<Ident> =
            vars.into_iter().filter(|x| env.contains_key(x)).collect();
        let dom = h.dom().restrict(&locs);
        let packed = SemValue::Tuple(vec![
            SemValue::Tuple(dom.locs().map(|l| SemValue::Loc(h.apply(l))).collect()),
            SemValue::Tuple(names.iter().map(|x| env[x].clone()).collect()),
        ]);
        (Frame { dom, names }, packed)
    }

    fn restore(&self, w: &World, packed: &SemValue) -> Result<(Injection, Env), SemError> {
        let bad = || SemError::Shape("malformed continuation frame".into());
        let SemValue::Tuple(parts) = packed else { return Err(bad()) };
        let [SemValue::Tuple(ls), SemValue::Tuple(vs)] = parts.as_slice() else { return Err(bad()) };
        let mut map = BTreeMap::new();
        for (l, v) in self.dom.locs().zip(ls) {
            map.insert(l, expect_loc(v)?);
        }
        let h = Injection::new(self.dom.clone(), w.clone(), map).ok_or_else(bad)?;
        Ok((h, self.names.iter().cloned().zip(vs.iter().cloned()).collect()))
    }
}

/// Runs `m`, then continues with `k` given the restored `h`, environment and result.
fn then(
    m: &MonadComp,
    conts: &[&Term],
    h: &Injection,
    env: &Env,
    k: impl Fn(&World, Injection, Env, SemValue) -> Result<MonadComp, SemError> + Send + Sync + 'static,
) -> MonadComp {
    let (frame, packed) = Frame::capture(conts, h, env);
    let f: Kleisli = Arc::new(move |w, v| {
        let (packed, x) = split_pair(v)?;
        let (h, env) = frame.restore(w, &packed)?;
        k(w, h, env, x)
    });
    t_bind(&t_strength(packed, m), f)
}

/// `⟦v⟧(h, e)` for a value `v`.
pub fn denote_value(v: &Term, h: &Injection, env: &Env) -> Result<SemValue, SemError> {
    Ok(match v {
        Term::Loc(l) => SemValue::Loc(h.get(*l).ok_or(SemError::UnknownLocation(*l))?),
        Term::Var(x) => env.get(x).cloned().ok_or_else(|| unbound(x))?,
        Term::Star => SemValue::Star,
        Term::Inj(side, v) => SemValue::inj(*side, denote_value(v, h, env)?),
        Term::Pair(a, b) => SemValue::pair(denote_value(a, h, env)?, denote_value(b, h, env)?),
        Term::Fun(x, ty, body) => {
            let mut locenv = BTreeMap::new();
            for l in body.locations() {
                locenv.insert(l, h.get(l).ok_or(SemError::UnknownLocation(l))?);
            }
            let mut captured = Vec::new();
            for y in body.free_vars().into_iter().filter(|y| y != x) {
                let val = env.get(&y).cloned().ok_or_else(|| unbound(&y))?;
                captured.push((y, val));
            }
            SemValue::Closure(Arc::new(Closure {
                param: x.clone(),
                param_ty: ty.clone(),
                body: Arc::new((**body).clone()),
                locenv,
                env: captured,
            }))
        }
        other => return Err(SemError::Shape(format!("`{other}` is not a value"))),
    })
}

/// Applies a closure at world `w` to an argument living at `w`.
pub fn apply_closure(c: &Closure, arg: SemValue, w: &World) -> Result<MonadComp, SemError> {
    let mut dom = World::empty();
    for (l, target) in &c.locenv {
        let sort = w.get(*target).ok_or(SemError::UnknownLocation(*target))?;
        dom.insert(*l, sort.clone());
    }
    let h = Injection::new(dom, w.clone(), c.locenv.clone())
        .ok_or_else(|| SemError::Shape("closure locations are not injective".into()))?;
    let mut env: Env = c.env.iter().cloned().collect();
    env.insert(c.param.clone(), arg);
    denote_term(&c.body, &h, &env)
}

fn apply_value(f: SemValue, arg: SemValue, w: &World) -> Result<MonadComp, SemError> {
    match f {
        SemValue::Closure(c) => apply_closure(&c, arg, w),
        other => Err(SemError::Shape(format!("expected a function, got {other}"))),
    }
}

/// `⟦t⟧` at `h : w → w'` and an environment over `w'`, as a computation over `w'`.
pub fn denote_term(t: &Term, h: &Injection, env: &Env) -> Result<MonadComp, SemError> {
    let here = h.cod();
    if t.is_value() {
        return Ok(t_return(here, denote_value(t, h, env)?));
    }
    Ok(match t {
        Term::Inj(side, a) => {
            let side = *side;
            t_map(&denote_term(a, h, env)?, move |v| SemValue::inj(side, v))
        }
        Term::Pair(a, b) => t_dstrength(&denote_term(a, h, env)?, &denote_term(b, h, env)?)?,
        Term::App(f, a) => {
            let both = t_dstrength(&denote_term(f, h, env)?, &denote_term(a, h, env)?)?;
            t_bind(
                &both,
                Arc::new(|w, v| {
                    let (f, a) = split_pair(v)?;
                    apply_value(f, a, w)
                }),
            )
        }
        Term::Assign(r, v) => {
            let both = t_dstrength(&denote_term(r, h, env)?, &denote_term(v, h, env)?)?;
            t_bind(
                &both,
                Arc::new(|w, v| {
                    let (l, a) = split_pair(v)?;
                    mset(w, expect_loc(&l)?, a)
                }),
            )
        }
        Term::Deref(r) => t_bind(&denote_term(r, h, env)?, Arc::new(|w, v| mget(w, expect_loc(&v)?))),
        Term::MatchEmpty(a, _) => t_bind(
            &denote_term(a, h, env)?,
            Arc::new(|_, v| Err(SemError::Shape(format!("{v} inhabits the empty type")))),
        ),
        Term::MatchSum(a, x1, t1, x2, t2) => {
            let (x1, x2) = (x1.clone(), x2.clone());
            let (t1c, t2c) = (Arc::new((**t1).clone()), Arc::new((**t2).clone()));
            then(&denote_term(a, h, env)?, &[t1, t2], h, env, move |_, h, mut env, v| match v {
                SemValue::Inj(crate::syntax::Side::First, v) => {
                    env.insert(x1.clone(), *v);
                    denote_term(&t1c, &h, &env)
                }
                SemValue::Inj(crate::syntax::Side::Second, v) => {
                    env.insert(x2.clone(), *v);
                    denote_term(&t2c, &h, &env)
                }
                other => Err(SemError::Shape(format!("expected an injection, got {other}"))),
            })
        }
        Term::MatchProd(a, x1, x2, body) => {
            let (x1, x2) = (x1.clone(), x2.clone());
            let bodyc = Arc::new((**body).clone());
            then(&denote_term(a, h, env)?, &[body], h, env, move |_, h, mut env, v| {
                let (u, v) = split_pair(v)?;
                env.insert(x1.clone(), u);
                env.insert(x2.clone(), v);
                denote_term(&bodyc, &h, &env)
            })
        }
        Term::New(binders, body) => {
            let w0 = World::contiguous(binders.iter().map(|b| &b.sort));
            let (_, i1, i2) = indep_coproduct(here, &w0);
            let h1 = i1.after(h);
            let mut env1: Env = env.iter().map(|(x, v)| (x.clone(), v.push(&i1))).collect();
            for (b, l) in binders.iter().zip(w0.locs()) {
                env1.insert(b.name.clone(), SemValue::Loc(i2.apply(l)));
            }
            let mut data = BTreeMap::new();
            for (b, l) in binders.iter().zip(w0.locs()) {
                data.insert(l, denote_value(&b.init, &h1, &env1)?);
            }
            let names: Vec<Ident> = binders.iter().map(|b| b.name.clone()).collect();
            let bodyc = Arc::new((**body).clone());
            then(&mnew(here, &w0, data)?, &[body], h, env, move |_, h, mut env, v| {
                let SemValue::Tuple(ls) = v else {
                    return Err(SemError::Shape("allocation returned no locations".into()));
                };
                for (x, l) in names.iter().zip(ls) {
                    env.insert(x.clone(), l);
                }
                denote_term(&bodyc, &h, &env)
            })
        }
        other => return Err(SemError::Shape(format!("no interpretation for `{other}`"))),
    })
}

/// `⟦t⟧` of a closed term at its layout, at the identity.
pub fn denote_closed(t: &Term, layout: &World) -> Result<MonadComp, SemError> {
    denote_term(t, &Injection::identity(layout), &Env::new())
}

/// `⟦H⟧ ∈ Stores w` for a typed heap over layout `w`.
pub fn denote_heap(heap: &TypedHeap) -> Result<Store, SemError> {
    let id = Injection::identity(heap.layout());
    let mut cells = BTreeMap::new();
    for (l, v) in heap.contents() {
        cells.insert(*l, denote_value(v, &id, &Env::new())?);
    }
    Ok(Store::new(heap.layout().clone(), cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initialisations::CoendRep;
    use crate::opsem::to_typed;
    use crate::signature::Signature;
    use crate::syntax::parse_program;

    fn run(src: &str, heap: &[(u32, SemValue)]) -> CoendRep {
        let p = parse_program(src).unwrap();
        let m = denote_closed(&p.term, &p.layout).unwrap();
        let s = Store::new(p.layout.clone(), heap.iter().map(|(l, v)| (Loc(*l), v.clone())).collect());
        m.run(&s).unwrap()
    }

    #[test]
    fn swap_denotes_the_swapped_store() {
        let src = "cell d = bool;\nlayout { #0 : d, #1 : d }\n\
                   let x = !#0 in let y = !#1 in #0 := y; #1 := x";
        let r = run(src, &[(0, SemValue::tt()), (1, SemValue::ff())]);
        assert_eq!(r.payload, SemValue::Star);
        assert_eq!(r.private_count(), 0);
        assert_eq!(r.public_cells(), vec![(Loc(0), SemValue::ff()), (Loc(1), SemValue::tt())]);
    }

    #[test]
    fn allocation_hides_unreachable_cells() {
        let r = run("cell d = bool;\nnew { x : d = true } in !x", &[]);
        assert_eq!(r, CoendRep::pure(SemValue::tt(), Store::empty()));
    }

    #[test]
    fn returned_cell_stays_private() {
        let r = run("cell d = bool;\nnew { x : d = false } in x", &[]);
        assert_eq!(r.private_count(), 1);
        assert_eq!(r.payload, SemValue::Loc(Loc(0)));
    }

    #[test]
    fn closures_read_the_current_store() {
        let src = "cell d = bool;\nlayout { #0 : d }\n\
                   let f = fun (u : 1) -> !#0 in #0 := false; f ()";
        let r = run(src, &[(0, SemValue::tt())]);
        assert_eq!(r.payload, SemValue::ff());
    }

    #[test]
    fn heap_denotation() {
        let sig = Signature::constant_bool();
        let p = parse_program("cell d = bool;\nlayout { #0 : d }\n()").unwrap();
        let heap = to_typed(&sig, &p.layout, &[(Loc(0), Term::ff())].into()).unwrap();
        let s = denote_heap(&heap).unwrap();
        assert_eq!(*s.lookup(Loc(0)).unwrap(), SemValue::ff());
    }

    #[test]
    fn cyclic_allocation() {
        let src = "cell data = bool; cell list = 1 + (ref data * ref list);\n\
                   new { a : data = true, n : list = inj2 (a, n) } in n";
        let r = run(src, &[]);
        assert_eq!(r.private_count(), 2);
        let l = r.payload.as_loc().unwrap();
        let SemValue::Inj(_, pair) = r.store.lookup(l).unwrap() else { panic!() };
        let SemValue::Pair(_, tail) = &**pair else { panic!() };
        assert_eq!(tail.as_loc(), Some(l));
    }
}
