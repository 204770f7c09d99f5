//! Observational differ: plugs both terms into boolean-valued contexts and
//! runs them on concrete heaps.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::denote::equality::sample_values;
use crate::opsem::{eval, render_heap, UntypedHeap, DEFAULT_FUEL};
use crate::signature::Signature;
use crate::syntax::{Ident, Side, Term, Type};
use crate::typing::Context;
use crate::worlds::World;

use super::soundness::{all_heaps, as_bool, has_heaps, layouts_above, random_heap, semvalue_to_term};

/// A context with one hole, kept as the term to run around it.
#[derive(Clone, Debug)]
pub struct Plug {
    pub hole: Ident,
    pub hole_ty: Type,
    pub body: Term,
}

impl Plug {
    pub fn fill(&self, t: &Term) -> Term {
        Term::let_in(&self.hole, self.hole_ty.clone(), t.clone(), self.body.clone())
    }
}

impl fmt::Display for Plug {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "let {} = [-] in {}", self.hole, self.body)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObsWitness {
    pub context: String,
    pub bindings: Vec<String>,
    pub heap: String,
    pub left: bool,
    pub right: bool,
}

impl fmt::Display for ObsWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "context: {}", self.context)?;
        if !self.bindings.is_empty() {
            writeln!(f, "with: {}", self.bindings.join(", "))?;
        }
        writeln!(f, "heap: {{{}}}", self.heap)?;
        write!(f, "left gives {}, right gives {}", self.left, self.right)
    }
}

struct Names(usize);

impl Names {
    fn fresh(&mut self) -> Ident {
        self.0 += 1;
        format!("o{}", self.0)
    }
}

fn test_sum(scrut: Term, left: Term, right: Term, names: &mut Names) -> Term {
    Term::MatchSum(Box::new(scrut), names.fresh(), Box::new(left), names.fresh(), Box::new(right))
}

/// Boolean observations of the variable `r : ty`.
fn observe(
    sig: &Signature,
    layout: &World,
    r: &Term,
    ty: &Type,
    depth: usize,
    names: &mut Names,
) -> Vec<Term> {
    match ty {
        Type::Unit => vec![Term::tt()],
        Type::Empty => vec![Term::MatchEmpty(Box::new(r.clone()), Type::bool())],
        Type::Sum(a, b) => {
            let mut out = vec![test_sum(r.clone(), Term::tt(), Term::ff(), names)];
            if depth > 0 {
                let x = names.fresh();
                for o in observe(sig, layout, &Term::Var(x.clone()), a, depth - 1, names) {
                    out.push(Term::MatchSum(Box::new(r.clone()), x.clone(), Box::new(o), names.fresh(), Box::new(Term::ff())));
                }
                let y = names.fresh();
                for o in observe(sig, layout, &Term::Var(y.clone()), b, depth - 1, names) {
                    out.push(Term::MatchSum(Box::new(r.clone()), names.fresh(), Box::new(Term::ff()), y.clone(), Box::new(o)));
                }
            }
            out
        }
        Type::Product(a, b) => {
            let (x, y) = (names.fresh(), names.fresh());
            let mut out = Vec::new();
            for o in observe(sig, layout, &Term::Var(x.clone()), a, depth, names) {
                out.push(Term::MatchProd(Box::new(r.clone()), x.clone(), y.clone(), Box::new(o)));
            }
            for o in observe(sig, layout, &Term::Var(y.clone()), b, depth, names) {
                out.push(Term::MatchProd(Box::new(r.clone()), x.clone(), y.clone(), Box::new(o)));
            }
            out
        }
        Type::Ref(k) => {
            if depth == 0 {
                return vec![Term::tt()];
            }
            let c = names.fresh();
            let content = Type::from(sig.typeof_sort(k));
            let mut out: Vec<Term> = observe(sig, layout, &Term::Var(c.clone()), &content, depth - 1, names)
                .into_iter()
                .map(|o| Term::let_in(&c, content.clone(), Term::deref(r.clone()), o))
                .collect();
            // Write through the reference, then look at the whole heap.
            for v in syntactic_values(&content, layout, 2) {
                for (l, kl) in layout.iter() {
                    let cl = Type::from(sig.typeof_sort(kl));
                    let d = names.fresh();
                    for o in observe(sig, layout, &Term::Var(d.clone()), &cl, depth - 1, names) {
                        let look = Term::let_in(&d, cl.clone(), Term::deref(Term::Loc(l)), o);
                        out.push(Term::let_in(&names.fresh(), Type::Unit, Term::assign(r.clone(), v.clone()), look));
                    }
                }
            }
            out
        }
        Type::Arrow(a, b) => {
            let mut out = Vec::new();
            for arg in syntactic_values(a, layout, 3) {
                let z = names.fresh();
                for o in observe(sig, layout, &Term::Var(z.clone()), b, depth.saturating_sub(1), names) {
                    let once = Term::let_in(&z, (**b).clone(), Term::app(r.clone(), arg.clone()), o.clone());
                    out.push(once.clone());
                    let twice = Term::let_in(&names.fresh(), (**b).clone(), Term::app(r.clone(), arg.clone()), once);
                    out.push(twice);
                }
            }
            out
        }
    }
}

/// Closed syntactic values of `ty` at `layout`, at most `n` of them.
fn syntactic_values(ty: &Type, layout: &World, n: usize) -> Vec<Term> {
    if let Some(g) = ty.as_ground() {
        let (vals, _) = sample_values(&Type::from(&g), layout, n);
        return vals.iter().filter_map(semvalue_to_term).take(n).collect();
    }
    match ty {
        Type::Arrow(a, b) => {
            let x = "a0".to_string();
            syntactic_values(b, layout, n)
                .into_iter()
                .map(|body| Term::Fun(x.clone(), (**a).clone(), Box::new(body)))
                .collect()
        }
        Type::Product(a, b) => {
            let (xs, ys) = (syntactic_values(a, layout, n), syntactic_values(b, layout, n));
            xs.iter().flat_map(|x| ys.iter().map(move |y| Term::pair(x.clone(), y.clone()))).take(n).collect()
        }
        Type::Sum(a, b) => {
            let mut out: Vec<Term> = syntactic_values(a, layout, n).into_iter().map(|v| Term::inj(Side::First, v)).collect();
            out.extend(syntactic_values(b, layout, n).into_iter().map(|v| Term::inj(Side::Second, v)));
            out.truncate(n);
            out
        }
        _ => Vec::new(),
    }
}

/// Boolean-valued contexts for a hole of type `ty` at `layout`: observations
/// of the result, and of every heap cell after the run.
pub fn contexts(sig: &Signature, layout: &World, ty: &Type, depth: usize) -> Vec<Plug> {
    let mut names = Names(0);
    let hole = "r".to_string();
    let mut out: Vec<Plug> = observe(sig, layout, &Term::Var(hole.clone()), ty, depth, &mut names)
        .into_iter()
        .map(|body| Plug { hole: hole.clone(), hole_ty: ty.clone(), body })
        .collect();
    for (l, k) in layout.iter() {
        let content = Type::from(sig.typeof_sort(k));
        let c = names.fresh();
        for o in observe(sig, layout, &Term::Var(c.clone()), &content, depth, &mut names) {
            let body = Term::let_in(&c, content.clone(), Term::deref(Term::Loc(l)), o);
            out.push(Plug { hole: hole.clone(), hole_ty: ty.clone(), body });
        }
    }
    out
}

/// Searches for a context, a heap and closing values for `ctx` under which
/// `t1` and `t2` produce different booleans. At most `budget` runs of each term.
pub fn obs_diff(
    sig: &Signature,
    layout: &World,
    ctx: &Context,
    t1: &Term,
    t2: &Term,
    ty: &Type,
    budget: usize,
) -> Option<ObsWitness> {
    let plugs = contexts(sig, layout, ty, 3);
    let mut closings: Vec<Vec<(Ident, Type, Term)>> = vec![Vec::new()];
    for (x, xty) in ctx {
        let vals = syntactic_values(xty, layout, 4);
        closings = closings
            .into_iter()
            .flat_map(|c| {
                vals.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((x.clone(), xty.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    let mut heaps: Vec<(World, UntypedHeap)> = Vec::new();
    for w in layouts_above(sig, layout, layout.len() + 1) {
        heaps.extend(all_heaps(sig, &w).into_iter().map(|h| (w.clone(), h)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for w in layouts_above(sig, layout, layout.len() + 2).into_iter().filter(|w| w.len() == layout.len() + 2 && has_heaps(sig, w)) {
        let h = random_heap(sig, &w, &mut rng);
        heaps.push((w, h));
    }
    let close = |t: &Term, c: &[(Ident, Type, Term)]| {
        c.iter().rev().fold(t.clone(), |acc, (x, xty, v)| Term::let_in(x, xty.clone(), v.clone(), acc))
    };
    let mut runs = 0;
    for closing in &closings {
        let (c1, c2) = (close(t1, closing), close(t2, closing));
        for plug in &plugs {
            let (p1, p2) = (plug.fill(&c1), plug.fill(&c2));
            for (w, heap) in &heaps {
                if runs >= budget {
                    return None;
                }
                runs += 1;
                let b1 = eval(&p1, heap, DEFAULT_FUEL).ok().and_then(|o| as_bool(&o.value));
                let b2 = eval(&p2, heap, DEFAULT_FUEL).ok().and_then(|o| as_bool(&o.value));
                if let (Some(left), Some(right)) = (b1, b2) {
                    if left != right {
                        return Some(ObsWitness {
                            context: plug.to_string(),
                            bindings: closing.iter().map(|(x, _, v)| format!("{x} = {v}")).collect(),
                            heap: render_heap(w, heap).trim().replace('\n', ", "),
                            left,
                            right,
                        });
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Sort;
    use crate::syntax::{parse_core_term, parse_program};

    #[test]
    fn contexts_are_well_typed() {
        let sig = Signature::linked_list();
        let layout = World::contiguous([Sort::new("cell"), Sort::new("list")].iter());
        for ty in ["1", "ref cell", "typeof list * bool", "1 -> ref data"] {
            let ty = crate::syntax::parse_type(&sig, ty).unwrap();
            let mut ctx = Context::new();
            ctx.insert("t".into(), ty.clone());
            for p in contexts(&sig, &layout, &ty, 3) {
                crate::typing::check(&sig, &layout, &ctx, &p.fill(&Term::var("t")), &Type::bool())
                    .unwrap_or_else(|e| panic!("{p}: {e}"));
            }
        }
    }

    #[test]
    fn swap_is_told_apart_from_unit_by_reading_the_first_cell() {
        let p = parse_program("cell data = bool;\nlayout { #0 : data, #1 : data }\nlet x = !#0 in #0 := !#1; #1 := x").unwrap();
        let w = obs_diff(&p.sig, &p.layout, &Context::new(), &p.term, &Term::Star, &Type::Unit, 10_000)
            .expect("a distinguishing context");
        assert!(w.context.contains("!#0"), "{w}");
    }

    #[test]
    fn a_term_agrees_with_itself() {
        let p = parse_program("cell data = bool;\nlayout { #0 : data }\nfun (u : 1) -> !#0").unwrap();
        let ty = Type::arrow(Type::Unit, Type::bool());
        assert!(obs_diff(&p.sig, &p.layout, &Context::new(), &p.term, &p.term, &ty, 10_000).is_none());
    }

    #[test]
    fn bound_variables_are_closed_with_values() {
        let sig = Signature::constant_bool();
        let layout = World::contiguous([Sort::new("d")].iter());
        let mut ctx = Context::new();
        ctx.insert("v".into(), Type::bool());
        let t1 = parse_core_term(&sig, &layout, &ctx, "#0 := v; !#0").unwrap();
        let t2 = parse_core_term(&sig, &layout, &ctx, "!#0").unwrap();
        assert!(obs_diff(&sig, &layout, &ctx, &t1, &t2, &Type::bool(), 10_000).is_some());
    }
}
