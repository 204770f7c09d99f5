//! Heaps and the big-step evaluator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{EvalError, HeapError};
use crate::signature::{Signature, Sort};
use crate::syntax::{Binder, Ident, Loc, Term};
use crate::typing::{check, Context, Layout};

pub const DEFAULT_FUEL: u64 = 1_000_000;

pub type UntypedHeap = BTreeMap<Loc, Term>;

/// A heap whose support is exactly its layout and whose contents are well typed there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedHeap {
    layout: Layout,
    contents: UntypedHeap,
}

impl TypedHeap {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn contents(&self) -> &UntypedHeap {
        &self.contents
    }

    pub fn get(&self, l: Loc) -> Option<&Term> {
        self.contents.get(&l)
    }

    pub fn render(&self) -> String {
        render_heap(&self.layout, &self.contents)
    }
}

/// `#i : sort = value` lines, ascending.
pub fn render_heap(layout: &Layout, heap: &UntypedHeap) -> String {
    let mut out = String::new();
    for (l, v) in heap {
        match layout.get(*l) {
            Some(s) => out.push_str(&format!("{l} : {s} = {v}\n")),
            None => out.push_str(&format!("{l} = {v}\n")),
        }
    }
    out
}

pub fn to_typed(sig: &Signature, w: &Layout, h: &UntypedHeap) -> Result<TypedHeap, HeapError> {
    for l in h.keys() {
        if !w.contains(*l) {
            return Err(HeapError::IllTypedHeap { loc: *l, reason: "location is not in the layout".into() });
        }
    }
    for (l, sort) in w.iter() {
        let v = h
            .get(&l)
            .ok_or_else(|| HeapError::IllTypedHeap { loc: l, reason: "no contents for this cell".into() })?;
        if !v.is_value() || !v.free_vars().is_empty() {
            return Err(HeapError::IllTypedHeap { loc: l, reason: format!("`{v}` is not a closed value") });
        }
        let expected = crate::syntax::Type::from(sig.typeof_sort(sort));
        check(sig, w, &Context::new(), v, &expected)
            .map_err(|e| HeapError::IllTypedHeap { loc: l, reason: e.to_string() })?;
    }
    Ok(TypedHeap { layout: w.clone(), contents: h.clone() })
}

pub fn fresh_locations(w: &Layout, n: usize) -> Vec<Loc> {
    w.fresh(n)
}

fn fresh_in_heap(h: &UntypedHeap, n: usize) -> Vec<Loc> {
    (0u32..).map(Loc).filter(|l| !h.contains_key(l)).take(n).collect()
}

/// Simultaneous capture-avoiding substitution.
pub fn substitute(t: &Term, e: &BTreeMap<Ident, Term>) -> Term {
    if e.is_empty() {
        return t.clone();
    }
    let avoid: BTreeSet<Ident> = e.values().flat_map(|v| v.free_vars()).collect();
    Subst { avoid }.go(t, e)
}

struct Subst {
    avoid: BTreeSet<Ident>,
}

impl Subst {
    fn fresh_name(&self, base: &str, body_fv: &BTreeSet<Ident>) -> Ident {
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.avoid.contains(n) && !body_fv.contains(n))
            .expect("infinitely many names")
    }

    /// Enters binders: drops shadowed entries and renames binders that would capture.
    fn bind(&self, names: &[&Ident], bodies: &[&Term], e: &BTreeMap<Ident, Term>) -> (Vec<Ident>, BTreeMap<Ident, Term>) {
        let mut inner = e.clone();
        for x in names {
            inner.remove(*x);
        }
        let mut fv: BTreeSet<Ident> = bodies.iter().flat_map(|b| b.free_vars()).collect();
        fv.extend(names.iter().map(|x| (*x).clone()));
        let mut out = Vec::with_capacity(names.len());
        for x in names {
            if self.avoid.contains(*x) && !inner.is_empty() {
                let y = self.fresh_name(x, &fv);
                fv.insert(y.clone());
                inner.insert((*x).clone(), Term::Var(y.clone()));
                out.push(y);
            } else {
                out.push((*x).clone());
            }
        }
        (out, inner)
    }

    fn go(&self, t: &Term, e: &BTreeMap<Ident, Term>) -> Term {
        if e.is_empty() {
            return t.clone();
        }
        match t {
            Term::Loc(_) | Term::Star => t.clone(),
            Term::Var(x) => e.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::Inj(s, a) => Term::inj(*s, self.go(a, e)),
            Term::Deref(a) => Term::deref(self.go(a, e)),
            Term::MatchEmpty(a, ty) => Term::MatchEmpty(Box::new(self.go(a, e)), ty.clone()),
            Term::Pair(a, b) => Term::pair(self.go(a, e), self.go(b, e)),
            Term::App(a, b) => Term::app(self.go(a, e), self.go(b, e)),
            Term::Assign(a, b) => Term::assign(self.go(a, e), self.go(b, e)),
            Term::Fun(x, ty, body) => {
                let (xs, inner) = self.bind(&[x], &[body], e);
                Term::Fun(xs[0].clone(), ty.clone(), Box::new(self.go(body, &inner)))
            }
            Term::MatchSum(a, x1, t1, x2, t2) => {
                let (y1, e1) = self.bind(&[x1], &[t1], e);
                let (y2, e2) = self.bind(&[x2], &[t2], e);
                Term::MatchSum(
                    Box::new(self.go(a, e)),
                    y1[0].clone(),
                    Box::new(self.go(t1, &e1)),
                    y2[0].clone(),
                    Box::new(self.go(t2, &e2)),
                )
            }
            Term::MatchProd(a, x1, x2, body) => {
                let (ys, inner) = self.bind(&[x1, x2], &[body], e);
                Term::MatchProd(Box::new(self.go(a, e)), ys[0].clone(), ys[1].clone(), Box::new(self.go(body, &inner)))
            }
            Term::New(binders, body) => {
                let names: Vec<&Ident> = binders.iter().map(|b| &b.name).collect();
                let mut bodies: Vec<&Term> = binders.iter().map(|b| &b.init).collect();
                bodies.push(body);
                let (ys, inner) = self.bind(&names, &bodies, e);
                Term::New(
                    binders
                        .iter()
                        .zip(ys)
                        .map(|(b, y)| Binder { name: y, sort: b.sort.clone(), init: self.go(&b.init, &inner) })
                        .collect(),
                    Box::new(self.go(body, &inner)),
                )
            }
        }
    }
}

/// Outcome of a run: the value, the final heap, and the cells allocated along the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub value: Term,
    pub heap: UntypedHeap,
    pub allocated: Vec<(Loc, Sort)>,
}

impl Outcome {
    /// The layout of the final heap, given the layout of the initial one.
    pub fn final_layout(&self, initial: &Layout) -> Layout {
        let mut w = initial.clone();
        for (l, s) in &self.allocated {
            w.insert(*l, s.clone());
        }
        w
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Runs `t` from heap `h`. Fresh cells take the smallest free indices.
pub fn eval(t: &Term, h: &UntypedHeap, fuel: u64) -> Result<Outcome, EvalError> {
    let mut m = Machine { heap: h.clone(), fuel, allocated: Vec::new() };
    let value = m.run(t)?;
    Ok(Outcome { value, heap: m.heap, allocated: m.allocated })
}

struct Machine {
    heap: UntypedHeap,
    fuel: u64,
    allocated: Vec<(Loc, Sort)>,
}

fn stuck(t: &Term) -> EvalError {
    let s = t.to_string();
    EvalError::Stuck(if s.len() > 80 { format!("{}...", &s[..s.char_indices().nth(77).map_or(s.len(), |(i, _)| i)]) } else { s })
}

impl Machine {
    fn run(&mut self, t: &Term) -> Result<Term, EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.fuel -= 1;
        match t {
            Term::Var(_) => Err(stuck(t)),
            Term::Loc(_) | Term::Star | Term::Fun(..) => Ok(t.clone()),
            Term::Inj(s, a) => Ok(Term::inj(*s, self.run(a)?)),
            Term::Pair(a, b) => {
                let va = self.run(a)?;
                let vb = self.run(b)?;
                Ok(Term::pair(va, vb))
            }
            Term::MatchEmpty(a, _) => {
                self.run(a)?;
                Err(stuck(t))
            }
            Term::MatchSum(a, x1, t1, x2, t2) => match self.run(a)? {
                Term::Inj(side, v) => {
                    let (x, body) = if side.index() == 1 { (x1, t1) } else { (x2, t2) };
                    self.run(&substitute(body, &BTreeMap::from([(x.clone(), *v)])))
                }
                _ => Err(stuck(t)),
            },
            Term::MatchProd(a, x1, x2, body) => match self.run(a)? {
                Term::Pair(v1, v2) => {
                    let e = if x1 == x2 {
                        BTreeMap::from([(x2.clone(), *v2)])
                    } else {
                        BTreeMap::from([(x1.clone(), *v1), (x2.clone(), *v2)])
                    };
                    self.run(&substitute(body, &e))
                }
                _ => Err(stuck(t)),
            },
            Term::App(f, a) => {
                let vf = self.run(f)?;
                let va = self.run(a)?;
                match vf {
                    Term::Fun(x, _, body) => self.run(&substitute(&body, &BTreeMap::from([(x, va)]))),
                    _ => Err(stuck(t)),
                }
            }
            Term::Assign(r, v) => {
                let vr = self.run(r)?;
                let vv = self.run(v)?;
                match vr {
                    Term::Loc(l) if self.heap.contains_key(&l) => {
                        self.heap.insert(l, vv);
                        Ok(Term::Star)
                    }
                    _ => Err(stuck(t)),
                }
            }
            Term::Deref(r) => match self.run(r)? {
                Term::Loc(l) => self.heap.get(&l).cloned().ok_or_else(|| stuck(t)),
                _ => Err(stuck(t)),
            },
            Term::New(binders, body) => {
                let locs = fresh_in_heap(&self.heap, binders.len());
                let e: BTreeMap<Ident, Term> =
                    binders.iter().zip(&locs).map(|(b, l)| (b.name.clone(), Term::Loc(*l))).collect();
                for (b, l) in binders.iter().zip(&locs) {
                    self.heap.insert(*l, substitute(&b.init, &e));
                    self.allocated.push((*l, b.sort.clone()));
                }
                self.run(&substitute(body, &e))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, Type};

    fn d() -> Sort {
        Sort::new("d")
    }

    #[test]
    fn typed_heap_checks() {
        let sig = Signature::constant_bool();
        let w: Layout = [(Loc(0), d())].into_iter().collect();
        assert!(to_typed(&sig, &w, &[(Loc(0), Term::tt())].into()).is_ok());
        assert!(matches!(to_typed(&sig, &w, &UntypedHeap::new()), Err(HeapError::IllTypedHeap { .. })));
    }

    #[test]
    fn dangling_reference_rejected() {
        let sig = Signature::linked_list();
        let w: Layout = [(Loc(0), Sort::new("list"))].into_iter().collect();
        let h = [(Loc(0), Term::inj(crate::syntax::Side::Second, Term::loc(1)))].into();
        assert!(matches!(to_typed(&sig, &w, &h), Err(HeapError::IllTypedHeap { loc: Loc(0), .. })));
    }

    #[test]
    fn fresh_policy() {
        let w: Layout = [(Loc(0), d()), (Loc(2), d())].into_iter().collect();
        assert_eq!(fresh_locations(&w, 2), vec![Loc(1), Loc(3)]);
        assert_eq!(fresh_locations(&Layout::empty(), 1), vec![Loc(0)]);
    }

    #[test]
    fn substitution_basics() {
        let e = BTreeMap::from([("x".to_string(), Term::Star)]);
        assert_eq!(substitute(&Term::var("x"), &e), Term::Star);
        let v = Term::tt();
        let e = BTreeMap::from([("y".to_string(), v.clone())]);
        assert_eq!(
            substitute(&Term::fun("x", Type::Unit, Term::var("y")), &e),
            Term::fun("x", Type::Unit, v)
        );
    }

    #[test]
    fn substitution_avoids_capture() {
        let e = BTreeMap::from([("y".to_string(), Term::var("x"))]);
        let t = Term::fun("x", Type::Unit, Term::pair(Term::var("x"), Term::var("y")));
        let out = substitute(&t, &e);
        let Term::Fun(z, _, body) = &out else { panic!() };
        assert_ne!(z, "x");
        assert_eq!(**body, Term::pair(Term::Var(z.clone()), Term::var("x")));
    }

    #[test]
    fn allocate_then_read() {
        let t = Term::New(
            vec![Binder { name: "x".into(), sort: d(), init: Term::tt() }],
            Box::new(Term::deref(Term::var("x"))),
        );
        let out = eval(&t, &UntypedHeap::new(), DEFAULT_FUEL).unwrap();
        assert_eq!(out.value, Term::tt());
        assert_eq!(out.heap, UntypedHeap::from([(Loc(0), Term::tt())]));
        assert_eq!(out.allocated, vec![(Loc(0), d())]);
    }

    #[test]
    fn swap_program() {
        let src = "cell data = bool; layout {#0:data, #1:data} let x = !#0 in #0 := !#1; #1 := x";
        let p = parse_program(src).unwrap();
        let h = UntypedHeap::from([(Loc(0), Term::tt()), (Loc(1), Term::ff())]);
        let out = eval(&p.term, &h, DEFAULT_FUEL).unwrap();
        assert_eq!(out.value, Term::Star);
        assert_eq!(out.heap, UntypedHeap::from([(Loc(0), Term::ff()), (Loc(1), Term::tt())]));
    }

    #[test]
    fn values_evaluate_to_themselves() {
        let h = UntypedHeap::from([(Loc(0), Term::tt())]);
        let v = Term::pair(Term::loc(0), Term::fun("x", Type::Unit, Term::deref(Term::loc(0))));
        let out = eval(&v, &h, 10).unwrap();
        assert_eq!((out.value, out.heap), (v, h));
    }

    #[test]
    fn stuck_on_non_location() {
        assert!(matches!(eval(&Term::deref(Term::Star), &UntypedHeap::new(), 10), Err(EvalError::Stuck(_))));
    }

    #[test]
    fn assignment_needs_allocated_cell() {
        let t = Term::assign(Term::loc(3), Term::Star);
        assert!(matches!(eval(&t, &UntypedHeap::new(), 10), Err(EvalError::Stuck(_))));
    }
}
