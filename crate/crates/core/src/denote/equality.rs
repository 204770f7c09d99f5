//! Bounded equality of denotations.
//!
//! Two computations over `w` are compared at every extension `w ⊕ E` within
//! the world bound and every store there. Ground results are compared in the
//! hiding quotient exactly. Function results are compared extensionally:
//! first the private parts are matched up to a bijection, then the two
//! closures are applied to every argument at every further extension and
//! store. Function-typed arguments are drawn from a finite sample, which makes
//! the verdict approximate.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::SemError;
use crate::initialisations::{coend_equal, enumerate_stores, CoendRep, Store};
use crate::signature::Signature;
use crate::syntax::{Ident, Loc, Term, Type};
use crate::typing::Context;
use crate::worlds::{enumerate_worlds, indep_coproduct, interp_type, isomorphisms, Closure, Injection, SemValue, World};

use super::monad::MonadComp;
use super::semantics::{apply_closure, denote_term, Env};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Largest world, in cells, that extensions reach.
    pub world: usize,
    /// Largest number of sampled values per type.
    pub value: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { world: 3, value: 16 }
    }
}

/// Where two denotations were seen to differ.
#[derive(Clone, Debug)]
pub struct Witness {
    pub world: World,
    pub env: Vec<(Ident, SemValue)>,
    pub store: Store,
    pub left: CoendRep,
    pub right: CoendRep,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at world {}", self.world)?;
        if !self.env.is_empty() {
            f.write_str(" with ")?;
            for (i, (x, v)) in self.env.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x} = {v}")?;
            }
        }
        write!(f, " and store {}:\n  left:  {}\n  right: {}", self.store, self.left, self.right)?;
        if !self.detail.is_empty() {
            write!(f, "\n  {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Equal,
    NotEqual(Box<Witness>),
    /// No difference found, but some function arguments were only sampled.
    Approximate(String),
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal)
    }

    pub fn is_not_equal(&self) -> bool {
        matches!(self, Verdict::NotEqual(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::NotEqual(_) => "not-equal",
            Verdict::Approximate(_) => "approximate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equal => f.write_str("equal"),
            Verdict::NotEqual(w) => write!(f, "not equal {w}"),
            Verdict::Approximate(why) => write!(f, "equal on all samples ({why})"),
        }
    }
}

/// Outcome of comparing two representatives, before it is placed in context.
enum Cmp {
    Same,
    Sampled(String),
    Differ(String),
}

struct Comparer<'a> {
    sig: &'a Signature,
    bounds: Bounds,
}

fn contains_closure(v: &SemValue) -> bool {
    match v {
        SemValue::Closure(_) => true,
        SemValue::Star | SemValue::Loc(_) => false,
        SemValue::Inj(_, v) => contains_closure(v),
        SemValue::Pair(a, b) => contains_closure(a) || contains_closure(b),
        SemValue::Tuple(vs) => vs.iter().any(contains_closure),
    }
}

/// Extensions `w ⊕ E` of `w` within `bound` cells; always includes `w` itself.
fn extensions(sig: &Signature, w: &World, bound: usize) -> Vec<(World, Injection)> {
    enumerate_worlds(sig, bound.saturating_sub(w.len()))
        .into_iter()
        .map(|e| {
            let (sum, i1, _) = indep_coproduct(w, &e);
            (sum, i1)
        })
        .collect()
}

impl<'a> Comparer<'a> {
    fn reps(&self, r1: &CoendRep, r2: &CoendRep, ty: &Type) -> Result<Cmp, SemError> {
        if coend_equal(r1, r2)? {
            return Ok(Cmp::Same);
        }
        if !contains_closure(&r1.payload) && !contains_closure(&r2.payload) {
            return Ok(Cmp::Differ(String::new()));
        }
        let a = r1.gc_canonical();
        let b = r2.gc_canonical();
        let private = |r: &CoendRep| {
            let image = r.inj.image();
            let keep: BTreeSet<Loc> = r.world().locs().filter(|l| !image.contains(l)).collect();
            r.world().restrict(&keep)
        };
        let (pa, pb) = (private(&a), private(&b));
        let mut sampled = None;
        let mut reason = String::from("private cells cannot be matched");
        for pi in isomorphisms(&pa, &pb) {
            let mut map = pi.loc_map().clone();
            map.extend(a.inj.image().into_iter().map(|l| (l, l)));
            let iso = Injection::new(a.world().clone(), b.world().clone(), map).expect("sort-preserving bijection");
            if a.store.rename(&iso) != b.store {
                reason = "stores differ under every matching of private cells".into();
                continue;
            }
            match self.values(&a.payload.push(&iso), &b.payload, ty, b.world())? {
                Cmp::Same => return Ok(Cmp::Same),
                Cmp::Sampled(why) => sampled = Some(why),
                Cmp::Differ(why) => reason = why,
            }
        }
        Ok(match sampled {
            Some(why) => Cmp::Sampled(why),
            None => Cmp::Differ(reason),
        })
    }

    fn values(&self, x: &SemValue, y: &SemValue, ty: &Type, w: &World) -> Result<Cmp, SemError> {
        if x == y {
            return Ok(Cmp::Same);
        }
        match (ty, x, y) {
            (Type::Sum(a, b), SemValue::Inj(s, u), SemValue::Inj(t, v)) if s == t => {
                let ty = if *s == crate::syntax::Side::First { a } else { b };
                self.values(u, v, ty, w)
            }
            (Type::Product(a, b), SemValue::Pair(x1, x2), SemValue::Pair(y1, y2)) => {
                let first = self.values(x1, y1, a, w)?;
                if let Cmp::Differ(_) = first {
                    return Ok(first);
                }
                let second = self.values(x2, y2, b, w)?;
                Ok(match (first, second) {
                    (_, Cmp::Differ(why)) => Cmp::Differ(why),
                    (Cmp::Sampled(why), _) | (_, Cmp::Sampled(why)) => Cmp::Sampled(why),
                    _ => Cmp::Same,
                })
            }
            (Type::Arrow(a, r), SemValue::Closure(f), SemValue::Closure(g)) => self.closures(f, g, a, r, w),
            _ => Ok(Cmp::Differ(format!("values {x} and {y} differ"))),
        }
    }

    fn closures(&self, f: &Closure, g: &Closure, arg: &Type, res: &Type, w: &World) -> Result<Cmp, SemError> {
        let mut sampled = None;
        for (w2, k) in extensions(self.sig, w, self.bounds.world) {
            let (f2, g2) = (f.push(&|l| k.apply(l)), g.push(&|l| k.apply(l)));
            let (args, exact) = sample_values(arg, &w2, self.bounds.value);
            if !exact {
                sampled = Some(format!("arguments of type {arg} were sampled"));
            }
            for a in args {
                let mf = apply_closure(&f2, a.clone(), &w2)?;
                let mg = apply_closure(&g2, a.clone(), &w2)?;
                for s in enumerate_stores(self.sig, &w2) {
                    let (r1, r2) = (mf.run(&s)?, mg.run(&s)?);
                    match self.reps(&r1, &r2, res)? {
                        Cmp::Same => {}
                        Cmp::Sampled(why) => sampled = Some(why),
                        Cmp::Differ(_) => {
                            return Ok(Cmp::Differ(format!(
                                "functions differ at world {w2}, argument {a}, store {s}: {r1} versus {r2}"
                            )))
                        }
                    }
                }
            }
        }
        Ok(match sampled {
            Some(why) => Cmp::Sampled(why),
            None => Cmp::Same,
        })
    }
}

/// Up to `n` elements of `⟦τ⟧w`, and whether they are all of them.
/// Functions are sampled as constant functions, plus the identity where it
/// type-checks.
pub fn sample_values(ty: &Type, w: &World, n: usize) -> (Vec<SemValue>, bool) {
    if let Some(g) = ty.as_ground() {
        let mut all = interp_type(&g, w);
        let exact = all.len() <= n;
        all.truncate(n);
        return (all, exact);
    }
    match ty {
        Type::Sum(a, b) => {
            let (xs, e1) = sample_values(a, w, n);
            let (ys, e2) = sample_values(b, w, n);
            let mut out: Vec<SemValue> = xs.into_iter().map(|x| SemValue::inj(crate::syntax::Side::First, x)).collect();
            out.extend(ys.into_iter().map(|y| SemValue::inj(crate::syntax::Side::Second, y)));
            let exact = e1 && e2 && out.len() <= n;
            out.truncate(n);
            (out, exact)
        }
        Type::Product(a, b) => {
            let (xs, e1) = sample_values(a, w, n);
            let (ys, e2) = sample_values(b, w, n);
            let mut out = Vec::new();
            for x in &xs {
                for y in &ys {
                    out.push(SemValue::pair(x.clone(), y.clone()));
                }
            }
            let exact = e1 && e2 && out.len() <= n;
            out.truncate(n);
            (out, exact)
        }
        Type::Arrow(a, r) => {
            let mut out = Vec::new();
            if a == r {
                out.push(closure("x", a, Term::var("x"), Vec::new()));
            }
            let (results, _) = sample_values(r, w, n);
            for v in results {
                out.push(closure("x", a, Term::var("k"), vec![("k".to_string(), v)]));
            }
            out.truncate(n.max(1));
            (out, false)
        }
        _ => (Vec::new(), true),
    }
}

fn closure(param: &str, ty: &Type, body: Term, env: Vec<(Ident, SemValue)>) -> SemValue {
    SemValue::Closure(Arc::new(Closure {
        param: param.to_string(),
        param_ty: ty.clone(),
        body: Arc::new(body),
        locenv: Default::default(),
        env,
    }))
}

fn conclude(
    cmp: Cmp,
    world: &World,
    env: &Env,
    store: &Store,
    r1: CoendRep,
    r2: CoendRep,
    sampled: &mut Option<String>,
) -> Option<Verdict> {
    match cmp {
        Cmp::Same => None,
        Cmp::Sampled(why) => {
            sampled.get_or_insert(why);
            None
        }
        Cmp::Differ(detail) => Some(Verdict::NotEqual(Box::new(Witness {
            world: world.clone(),
            env: env.iter().map(|(x, v)| (x.clone(), v.clone())).collect(),
            store: store.clone(),
            left: r1,
            right: r2,
            detail,
        }))),
    }
}

/// Compares two representatives over the same public world at payload type `ty`.
pub fn compare_reps(
    sig: &Signature,
    r1: &CoendRep,
    r2: &CoendRep,
    ty: &Type,
    bounds: Bounds,
) -> Result<Verdict, SemError> {
    if r1.base != r2.base {
        return Err(SemError::BaseMismatch);
    }
    let mut sampled = None;
    let c = Comparer { sig, bounds }.reps(r1, r2, ty)?;
    Ok(match conclude(c, &r1.base, &Env::new(), &r1.store, r1.clone(), r2.clone(), &mut sampled) {
        Some(v) => v,
        None => match sampled {
            Some(why) => Verdict::Approximate(why),
            None => Verdict::Equal,
        },
    })
}

/// Compares two computations over the same world at result type `ty`.
pub fn equal_bounded(
    sig: &Signature,
    m1: &MonadComp,
    m2: &MonadComp,
    ty: &Type,
    bounds: Bounds,
) -> Result<Verdict, SemError> {
    if m1.base() != m2.base() {
        return Err(SemError::BaseMismatch);
    }
    let cmp = Comparer { sig, bounds };
    let mut sampled = None;
    for (w, h) in extensions(sig, m1.base(), bounds.world) {
        for s in enumerate_stores(sig, &w) {
            let (r1, r2) = (m1.at(&h, &s)?, m2.at(&h, &s)?);
            let c = cmp.reps(&r1, &r2, ty)?;
            if let Some(v) = conclude(c, &w, &Env::new(), &s, r1, r2, &mut sampled) {
                return Ok(v);
            }
        }
    }
    Ok(match sampled {
        Some(why) => Verdict::Approximate(why),
        None => Verdict::Equal,
    })
}

/// Compares `Γ ⊢_w t1 : τ` and `Γ ⊢_w t2 : τ` at every extension of `w`,
/// every environment (sampled for function-typed variables) and every store.
pub fn equal_open(
    sig: &Signature,
    layout: &World,
    ctx: &Context,
    t1: &Term,
    t2: &Term,
    ty: &Type,
    bounds: Bounds,
) -> Result<Verdict, SemError> {
    let cmp = Comparer { sig, bounds };
    let mut sampled = None;
    for (w, h) in extensions(sig, layout, bounds.world) {
        let mut envs = vec![Env::new()];
        for (x, xty) in ctx {
            let (vals, exact) = sample_values(xty, &w, bounds.value);
            if !exact {
                sampled.get_or_insert(format!("values of `{x} : {xty}` were sampled"));
            }
            envs = envs
                .into_iter()
                .flat_map(|e| {
                    vals.iter().map(move |v| {
                        let mut e = e.clone();
                        e.insert(x.clone(), v.clone());
                        e
                    })
                })
                .collect();
        }
        for env in &envs {
            let m1 = denote_term(t1, &h, env)?;
            let m2 = denote_term(t2, &h, env)?;
            for s in enumerate_stores(sig, &w) {
                let (r1, r2) = (m1.run(&s)?, m2.run(&s)?);
                let c = cmp.reps(&r1, &r2, ty)?;
                if let Some(v) = conclude(c, &w, env, &s, r1, r2, &mut sampled) {
                    return Ok(v);
                }
            }
        }
    }
    Ok(match sampled {
        Some(why) => Verdict::Approximate(why),
        None => Verdict::Equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denote::semantics::denote_closed;
    use crate::syntax::parse_program;
    use crate::syntax::parse_type;
    use crate::typing::check;

    fn verdict(a: &str, b: &str, ty: &str) -> Verdict {
        let p1 = parse_program(a).unwrap();
        let p2 = parse_program(b).unwrap();
        let ty = parse_type(&p1.sig, ty).unwrap();
        check(&p1.sig, &p1.layout, &Context::new(), &p1.term, &ty).unwrap();
        check(&p2.sig, &p2.layout, &Context::new(), &p2.term, &ty).unwrap();
        let m1 = denote_closed(&p1.term, &p1.layout).unwrap();
        let m2 = denote_closed(&p2.term, &p2.layout).unwrap();
        equal_bounded(&p1.sig, &m1, &m2, &ty, Bounds::default()).unwrap()
    }

    #[test]
    fn allocation_of_unused_cell_is_invisible() {
        let v = verdict("cell d = bool;\nnew { x : d = true } in ()", "cell d = bool;\n()", "1");
        assert!(v.is_equal(), "{v}");
    }

    #[test]
    fn different_constants_differ() {
        let v = verdict("cell d = bool;\ntrue", "cell d = bool;\nfalse", "bool");
        assert!(v.is_not_equal());
    }

    #[test]
    fn private_counter_is_not_constant() {
        let v = verdict(
            "cell d = bool;\nfun (u : 1) -> true",
            "cell d = bool;\nnew { x : d = true } in fun (u : 1) -> !x",
            "1 -> bool",
        );
        assert!(v.is_not_equal(), "{v}");
    }

    #[test]
    fn extensionally_equal_functions() {
        let v = verdict(
            "cell d = bool;\nfun (b : bool) -> b",
            "cell d = bool;\nfun (b : bool) -> match b with inj1 u -> true | inj2 u -> false",
            "bool -> bool",
        );
        assert!(v.is_equal(), "{v}");
    }

    #[test]
    fn reads_of_the_public_store_differ_from_constants() {
        let v = verdict("cell d = bool;\nlayout { #0 : d }\n!#0", "cell d = bool;\nlayout { #0 : d }\ntrue", "bool");
        let Verdict::NotEqual(w) = v else { panic!("{v}") };
        assert_eq!(*w.store.lookup(Loc(0)).unwrap(), SemValue::ff());
    }
}
