//! Typing contexts, layouts and the typing relation.
//!
//! Injections carry no annotation for the summand they do not inhabit, so the
//! checker works with partial types and first-order unification. A term's
//! principal type may still contain holes (`inj1 ()` is `1 + _`); [`infer`]
//! reports such a term as ambiguous while [`check`] accepts any instance.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::TypeError;
use crate::signature::{Signature, Sort};
use crate::syntax::{print_term, Ident, Term, Type};
use crate::worlds::World;

pub type Context = BTreeMap<Ident, Type>;
pub type Layout = World;

/// `w ≤ w2`.
pub fn layout_extends(w: &Layout, w2: &Layout) -> bool {
    w.extended_by(w2)
}

/// A type that may contain unknown parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartialType {
    Hole(u32),
    Ref(Sort),
    Empty,
    Sum(Box<PartialType>, Box<PartialType>),
    Unit,
    Product(Box<PartialType>, Box<PartialType>),
    Arrow(Box<PartialType>, Box<PartialType>),
}

impl PartialType {
    fn bin(mk: fn(Box<PartialType>, Box<PartialType>) -> PartialType, a: PartialType, b: PartialType) -> PartialType {
        mk(Box::new(a), Box::new(b))
    }

    pub fn to_type(&self) -> Option<Type> {
        Some(match self {
            PartialType::Hole(_) => return None,
            PartialType::Ref(s) => Type::Ref(s.clone()),
            PartialType::Empty => Type::Empty,
            PartialType::Unit => Type::Unit,
            PartialType::Sum(a, b) => Type::sum(a.to_type()?, b.to_type()?),
            PartialType::Product(a, b) => Type::product(a.to_type()?, b.to_type()?),
            PartialType::Arrow(a, b) => Type::arrow(a.to_type()?, b.to_type()?),
        })
    }

    /// Whether `ty` is obtained by filling the holes consistently.
    pub fn admits(&self, ty: &Type) -> bool {
        fn go(p: &PartialType, t: &Type, fill: &mut BTreeMap<u32, Type>) -> bool {
            match (p, t) {
                (PartialType::Hole(n), t) => match fill.get(n) {
                    Some(prev) => prev == t,
                    None => {
                        fill.insert(*n, t.clone());
                        true
                    }
                },
                (PartialType::Ref(a), Type::Ref(b)) => a == b,
                (PartialType::Empty, Type::Empty) | (PartialType::Unit, Type::Unit) => true,
                (PartialType::Sum(a, b), Type::Sum(c, d))
                | (PartialType::Product(a, b), Type::Product(c, d))
                | (PartialType::Arrow(a, b), Type::Arrow(c, d)) => go(a, c, fill) && go(b, d, fill),
                _ => false,
            }
        }
        go(self, ty, &mut BTreeMap::new())
    }

    fn occurs(&self, n: u32) -> bool {
        match self {
            PartialType::Hole(m) => *m == n,
            PartialType::Sum(a, b) | PartialType::Product(a, b) | PartialType::Arrow(a, b) => a.occurs(n) || b.occurs(n),
            _ => false,
        }
    }
}

impl From<&Type> for PartialType {
    fn from(t: &Type) -> PartialType {
        match t {
            Type::Ref(s) => PartialType::Ref(s.clone()),
            Type::Empty => PartialType::Empty,
            Type::Unit => PartialType::Unit,
            Type::Sum(a, b) => PartialType::bin(PartialType::Sum, (&**a).into(), (&**b).into()),
            Type::Product(a, b) => PartialType::bin(PartialType::Product, (&**a).into(), (&**b).into()),
            Type::Arrow(a, b) => PartialType::bin(PartialType::Arrow, (&**a).into(), (&**b).into()),
        }
    }
}

impl fmt::Display for PartialType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(f: &mut fmt::Formatter<'_>, t: &PartialType, prec: u8) -> fmt::Result {
            let wrap = |f: &mut fmt::Formatter<'_>, on: bool, s: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
                if on {
                    f.write_str("(")?;
                }
                s(f)?;
                if on {
                    f.write_str(")")?;
                }
                Ok(())
            };
            match t {
                PartialType::Hole(_) => f.write_str("_"),
                PartialType::Ref(s) => write!(f, "ref {s}"),
                PartialType::Empty => f.write_str("0"),
                PartialType::Unit => f.write_str("1"),
                PartialType::Sum(a, b) if **a == PartialType::Unit && **b == PartialType::Unit => f.write_str("bool"),
                PartialType::Arrow(a, b) => wrap(f, prec > 0, &|f| {
                    go(f, a, 1)?;
                    f.write_str(" -> ")?;
                    go(f, b, 0)
                }),
                PartialType::Sum(a, b) => wrap(f, prec > 1, &|f| {
                    go(f, a, 2)?;
                    f.write_str(" + ")?;
                    go(f, b, 1)
                }),
                PartialType::Product(a, b) => wrap(f, prec > 2, &|f| {
                    go(f, a, 3)?;
                    f.write_str(" * ")?;
                    go(f, b, 2)
                }),
            }
        }
        go(f, self, 0)
    }
}

/// The principal type of `t`, possibly with holes.
pub fn infer_principal(sig: &Signature, w: &Layout, ctx: &Context, t: &Term) -> Result<PartialType, TypeError> {
    let mut inf = Inference::new(sig, w, ctx);
    let ty = inf.infer(t)?;
    inf.settle()?;
    Ok(inf.resolve(&ty))
}

/// The type of `t`, which must be fully determined by the term and context.
pub fn infer(sig: &Signature, w: &Layout, ctx: &Context, t: &Term) -> Result<Type, TypeError> {
    let p = infer_principal(sig, w, ctx, t)?;
    p.to_type().ok_or_else(|| TypeError::Ambiguous { term: short(t), partial: p.to_string() })
}

/// `ctx ⊢_w t : expected`.
pub fn check(sig: &Signature, w: &Layout, ctx: &Context, t: &Term, expected: &Type) -> Result<(), TypeError> {
    let mut inf = Inference::new(sig, w, ctx);
    let ty = inf.infer(t)?;
    inf.unify(&ty, &expected.into(), t)?;
    inf.settle()
}

fn short(t: &Term) -> String {
    let s = print_term(t);
    if s.chars().count() > 60 {
        format!("{}...", s.chars().take(57).collect::<String>())
    } else {
        s
    }
}

struct Inference<'a> {
    sig: &'a Signature,
    w: &'a Layout,
    ctx: &'a Context,
    locals: Vec<(Ident, PartialType)>,
    holes: Vec<Option<PartialType>>,
    /// (reference type, content type, subterm) awaiting the reference's sort.
    deferred: Vec<(PartialType, PartialType, Term)>,
}

impl<'a> Inference<'a> {
    fn new(sig: &'a Signature, w: &'a Layout, ctx: &'a Context) -> Self {
        Inference { sig, w, ctx, locals: Vec::new(), holes: Vec::new(), deferred: Vec::new() }
    }

    fn fresh(&mut self) -> PartialType {
        self.holes.push(None);
        PartialType::Hole(self.holes.len() as u32 - 1)
    }

    fn shallow(&self, t: &PartialType) -> PartialType {
        let mut t = t.clone();
        while let PartialType::Hole(n) = t {
            match &self.holes[n as usize] {
                Some(next) => t = next.clone(),
                None => break,
            }
        }
        t
    }

    fn resolve(&self, t: &PartialType) -> PartialType {
        match self.shallow(t) {
            PartialType::Sum(a, b) => PartialType::bin(PartialType::Sum, self.resolve(&a), self.resolve(&b)),
            PartialType::Product(a, b) => PartialType::bin(PartialType::Product, self.resolve(&a), self.resolve(&b)),
            PartialType::Arrow(a, b) => PartialType::bin(PartialType::Arrow, self.resolve(&a), self.resolve(&b)),
            other => other,
        }
    }

    fn mismatch(&self, at: &Term, expected: &PartialType, found: &PartialType) -> TypeError {
        TypeError::Mismatch {
            subterm: short(at),
            expected: self.resolve(expected).to_string(),
            found: self.resolve(found).to_string(),
        }
    }

    fn unify(&mut self, found: &PartialType, expected: &PartialType, at: &Term) -> Result<(), TypeError> {
        let a = self.shallow(found);
        let b = self.shallow(expected);
        match (&a, &b) {
            (PartialType::Hole(n), PartialType::Hole(m)) if n == m => Ok(()),
            (PartialType::Hole(n), other) | (other, PartialType::Hole(n)) => {
                if self.resolve(other).occurs(*n) {
                    return Err(self.mismatch(at, &b, &a));
                }
                self.holes[*n as usize] = Some(other.clone());
                Ok(())
            }
            (PartialType::Ref(x), PartialType::Ref(y)) if x == y => Ok(()),
            (PartialType::Empty, PartialType::Empty) | (PartialType::Unit, PartialType::Unit) => Ok(()),
            (PartialType::Sum(a1, a2), PartialType::Sum(b1, b2))
            | (PartialType::Product(a1, a2), PartialType::Product(b1, b2))
            | (PartialType::Arrow(a1, a2), PartialType::Arrow(b1, b2)) => {
                self.unify(a1, b1, at).map_err(|_| self.mismatch(at, &b, &a))?;
                self.unify(a2, b2, at).map_err(|_| self.mismatch(at, &b, &a))
            }
            _ => Err(self.mismatch(at, &b, &a)),
        }
    }

    fn content(&mut self, sort: &Sort) -> Result<PartialType, TypeError> {
        self.sig
            .try_typeof(sort)
            .map(|g| PartialType::from(&Type::from(g)))
            .ok_or_else(|| TypeError::UnknownSort(sort.to_string()))
    }

    /// Relates a reference type to its content type, deferring when the sort is unknown.
    fn ref_content(&mut self, r: &PartialType, content: &PartialType, at: &Term) -> Result<(), TypeError> {
        match self.shallow(r) {
            PartialType::Ref(k) => {
                let c = self.content(&k)?;
                self.unify(content, &c, at)
            }
            PartialType::Hole(_) => {
                self.deferred.push((r.clone(), content.clone(), at.clone()));
                Ok(())
            }
            other => Err(TypeError::Mismatch {
                subterm: short(at),
                expected: "ref _".into(),
                found: self.resolve(&other).to_string(),
            }),
        }
    }

    fn settle(&mut self) -> Result<(), TypeError> {
        loop {
            let pending = std::mem::take(&mut self.deferred);
            let before = pending.len();
            for (r, c, at) in pending {
                self.ref_content(&r, &c, &at)?;
            }
            if self.deferred.is_empty() {
                return Ok(());
            }
            if self.deferred.len() == before {
                let (r, _, at) = &self.deferred[0];
                return Err(TypeError::Ambiguous { term: short(at), partial: self.resolve(r).to_string() });
            }
        }
    }

    fn lookup(&self, x: &str) -> Option<PartialType> {
        self.locals
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, t)| t.clone())
            .or_else(|| self.ctx.get(x).map(PartialType::from))
    }

    fn under<R>(&mut self, binds: Vec<(Ident, PartialType)>, f: impl FnOnce(&mut Self) -> R) -> R {
        let n = binds.len();
        self.locals.extend(binds);
        let r = f(self);
        self.locals.truncate(self.locals.len() - n);
        r
    }

    fn infer(&mut self, t: &Term) -> Result<PartialType, TypeError> {
        match t {
            Term::Loc(l) => self.w.get(*l).map(|s| PartialType::Ref(s.clone())).ok_or(TypeError::UnknownLocation(*l)),
            Term::Var(x) => self.lookup(x).ok_or_else(|| TypeError::UnboundIdentifier(x.clone())),
            Term::Inj(side, inner) => {
                let known = self.infer(inner)?;
                let other = self.fresh();
                Ok(match side.index() {
                    1 => PartialType::bin(PartialType::Sum, known, other),
                    _ => PartialType::bin(PartialType::Sum, other, known),
                })
            }
            Term::Star => Ok(PartialType::Unit),
            Term::Pair(a, b) => {
                let ta = self.infer(a)?;
                let tb = self.infer(b)?;
                Ok(PartialType::bin(PartialType::Product, ta, tb))
            }
            Term::Fun(x, ty, body) => {
                self.check_type(ty)?;
                let p = PartialType::from(ty);
                let tb = self.under(vec![(x.clone(), p.clone())], |s| s.infer(body))?;
                Ok(PartialType::bin(PartialType::Arrow, p, tb))
            }
            Term::MatchEmpty(scrut, ty) => {
                self.check_type(ty)?;
                let ts = self.infer(scrut)?;
                self.unify(&ts, &PartialType::Empty, scrut)?;
                Ok(ty.into())
            }
            Term::MatchSum(scrut, x1, t1, x2, t2) => {
                let ts = self.infer(scrut)?;
                let (a, b) = (self.fresh(), self.fresh());
                self.unify(&ts, &PartialType::bin(PartialType::Sum, a.clone(), b.clone()), scrut)?;
                let r1 = self.under(vec![(x1.clone(), a)], |s| s.infer(t1))?;
                let r2 = self.under(vec![(x2.clone(), b)], |s| s.infer(t2))?;
                self.unify(&r2, &r1, t2)?;
                Ok(r1)
            }
            Term::MatchProd(scrut, x1, x2, body) => {
                let ts = self.infer(scrut)?;
                let (a, b) = (self.fresh(), self.fresh());
                self.unify(&ts, &PartialType::bin(PartialType::Product, a.clone(), b.clone()), scrut)?;
                self.under(vec![(x1.clone(), a), (x2.clone(), b)], |s| s.infer(body))
            }
            Term::App(f, a) => {
                let tf = self.infer(f)?;
                let ta = self.infer(a)?;
                match self.shallow(&tf) {
                    PartialType::Arrow(dom, cod) => {
                        self.unify(&ta, &dom, a)?;
                        Ok(*cod)
                    }
                    PartialType::Hole(_) => {
                        let r = self.fresh();
                        self.unify(&tf, &PartialType::bin(PartialType::Arrow, ta, r.clone()), f)?;
                        Ok(r)
                    }
                    other => Err(TypeError::Mismatch {
                        subterm: short(f),
                        expected: "_ -> _".into(),
                        found: self.resolve(&other).to_string(),
                    }),
                }
            }
            Term::Assign(r, v) => {
                let tr = self.infer(r)?;
                let tv = self.infer(v)?;
                self.ref_content(&tr, &tv, t)?;
                Ok(PartialType::Unit)
            }
            Term::Deref(r) => {
                let tr = self.infer(r)?;
                let c = self.fresh();
                self.ref_content(&tr, &c, t)?;
                Ok(c)
            }
            Term::New(binders, body) => {
                if binders.is_empty() {
                    return Err(TypeError::EmptyAllocation);
                }
                let mut scope = Vec::with_capacity(binders.len());
                for b in binders {
                    if scope.iter().any(|(x, _): &(Ident, PartialType)| *x == b.name) {
                        return Err(TypeError::DuplicateBinder(b.name.clone()));
                    }
                    if !self.sig.contains(&b.sort) {
                        return Err(TypeError::UnknownSort(b.sort.to_string()));
                    }
                    scope.push((b.name.clone(), PartialType::Ref(b.sort.clone())));
                }
                self.under(scope, |s| {
                    for b in binders {
                        if !b.init.is_value() {
                            return Err(TypeError::NotAValue(print_term(&b.init)));
                        }
                        let ti = s.infer(&b.init)?;
                        let c = s.content(&b.sort)?;
                        s.unify(&ti, &c, &b.init)?;
                    }
                    s.infer(body)
                })
            }
        }
    }

    fn check_type(&self, ty: &Type) -> Result<(), TypeError> {
        let mut sorts = Default::default();
        ty.sorts(&mut sorts);
        match sorts.into_iter().find(|s| !self.sig.contains(s)) {
            Some(s) => Err(TypeError::UnknownSort(s.to_string())),
            None => Ok(()),
        }
    }
}
