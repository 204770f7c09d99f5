//! Surface syntax and its translation into the core calculus.
//!
//! The surface language adds `let`, sequencing `t1; t2`, the single-cell
//! allocation `ref κ t` and n-ary tuples. A `let` without an annotation (and
//! every `;`) needs the type of the bound term, which is inferred against the
//! enclosing context; everything else is a purely syntactic rewrite.

use std::collections::BTreeMap;

use super::{Binder, Ident, Loc, Side, Term, Type};
use crate::error::TypeError;
use crate::signature::{Signature, Sort};
use crate::typing::{infer, Context};
use crate::worlds::World;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceBinder {
    pub name: Ident,
    pub sort: Sort,
    pub init: Surface,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Surface {
    Loc(Loc),
    Var(Ident),
    Inj(Side, Box<Surface>),
    Star,
    /// Two or more components; nests to the right.
    Tuple(Vec<Surface>),
    Fun(Ident, Type, Box<Surface>),
    MatchEmpty(Box<Surface>, Type),
    MatchSum(Box<Surface>, Ident, Box<Surface>, Ident, Box<Surface>),
    MatchProd(Box<Surface>, Ident, Ident, Box<Surface>),
    App(Box<Surface>, Box<Surface>),
    Assign(Box<Surface>, Box<Surface>),
    Deref(Box<Surface>),
    New(Vec<SurfaceBinder>, Box<Surface>),
    Let(Ident, Option<Type>, Box<Surface>, Box<Surface>),
    Seq(Box<Surface>, Box<Surface>),
    RefNew(Sort, Box<Surface>),
}

impl Surface {
    /// Whether this is a value once desugared. `let`, `;` and `ref` never are.
    pub fn is_value(&self) -> bool {
        match self {
            Surface::Loc(_) | Surface::Var(_) | Surface::Star | Surface::Fun(..) => true,
            Surface::Inj(_, t) => t.is_value(),
            Surface::Tuple(ts) => ts.iter().all(Surface::is_value),
            _ => false,
        }
    }
}

impl From<&Term> for Surface {
    fn from(t: &Term) -> Surface {
        let b = |t: &Term| Box::new(Surface::from(t));
        match t {
            Term::Loc(l) => Surface::Loc(*l),
            Term::Var(x) => Surface::Var(x.clone()),
            Term::Inj(s, t) => Surface::Inj(*s, b(t)),
            Term::Star => Surface::Star,
            Term::Pair(x, y) => Surface::Tuple(vec![Surface::from(&**x), Surface::from(&**y)]),
            Term::Fun(x, ty, body) => Surface::Fun(x.clone(), ty.clone(), b(body)),
            Term::MatchEmpty(t, ty) => Surface::MatchEmpty(b(t), ty.clone()),
            Term::MatchSum(t, x1, t1, x2, t2) => Surface::MatchSum(b(t), x1.clone(), b(t1), x2.clone(), b(t2)),
            Term::MatchProd(t, x1, x2, body) => Surface::MatchProd(b(t), x1.clone(), x2.clone(), b(body)),
            Term::App(f, a) => Surface::App(b(f), b(a)),
            Term::Assign(r, v) => Surface::Assign(b(r), b(v)),
            Term::Deref(r) => Surface::Deref(b(r)),
            Term::New(binders, body) => Surface::New(
                binders
                    .iter()
                    .map(|bd| SurfaceBinder { name: bd.name.clone(), sort: bd.sort.clone(), init: Surface::from(&bd.init) })
                    .collect(),
                b(body),
            ),
        }
    }
}

/// Translates surface syntax to core syntax under `ctx` at layout `layout`.
pub fn desugar(sig: &Signature, layout: &World, ctx: &Context, surface: &Surface) -> Result<Term, TypeError> {
    Desugarer { sig, layout }.go(&mut ctx.clone(), surface)
}

struct Desugarer<'a> {
    sig: &'a Signature,
    layout: &'a World,
}

impl Desugarer<'_> {
    fn go(&self, ctx: &mut Context, s: &Surface) -> Result<Term, TypeError> {
        Ok(match s {
            Surface::Loc(l) => Term::Loc(*l),
            Surface::Var(x) => Term::Var(x.clone()),
            Surface::Inj(side, t) => Term::inj(*side, self.go(ctx, t)?),
            Surface::Star => Term::Star,
            Surface::Tuple(ts) => {
                let mut parts = ts.iter().map(|t| self.go(ctx, t)).collect::<Result<Vec<_>, _>>()?;
                let mut acc = parts.pop().expect("tuples have at least two components");
                while let Some(p) = parts.pop() {
                    acc = Term::pair(p, acc);
                }
                acc
            }
            Surface::Fun(x, ty, body) => {
                let body = self.under(ctx, &[(x.clone(), Some(ty.clone()))], body)?;
                Term::Fun(x.clone(), ty.clone(), Box::new(body))
            }
            Surface::MatchEmpty(t, ty) => Term::MatchEmpty(Box::new(self.go(ctx, t)?), ty.clone()),
            Surface::MatchSum(t, x1, t1, x2, t2) => {
                let scrut = self.go(ctx, t)?;
                let (ty1, ty2) = match infer(self.sig, self.layout, ctx, &scrut) {
                    Ok(Type::Sum(a, b)) => (Some(*a), Some(*b)),
                    _ => (None, None),
                };
                let t1 = self.under(ctx, &[(x1.clone(), ty1)], t1)?;
                let t2 = self.under(ctx, &[(x2.clone(), ty2)], t2)?;
                Term::MatchSum(Box::new(scrut), x1.clone(), Box::new(t1), x2.clone(), Box::new(t2))
            }
            Surface::MatchProd(t, x1, x2, body) => {
                let scrut = self.go(ctx, t)?;
                let (ty1, ty2) = match infer(self.sig, self.layout, ctx, &scrut) {
                    Ok(Type::Product(a, b)) => (Some(*a), Some(*b)),
                    _ => (None, None),
                };
                let body = self.under(ctx, &[(x1.clone(), ty1), (x2.clone(), ty2)], body)?;
                Term::MatchProd(Box::new(scrut), x1.clone(), x2.clone(), Box::new(body))
            }
            Surface::App(f, a) => Term::app(self.go(ctx, f)?, self.go(ctx, a)?),
            Surface::Assign(r, v) => Term::assign(self.go(ctx, r)?, self.go(ctx, v)?),
            Surface::Deref(r) => Term::deref(self.go(ctx, r)?),
            Surface::New(binders, body) => {
                let scope: Vec<_> =
                    binders.iter().map(|b| (b.name.clone(), Some(Type::Ref(b.sort.clone())))).collect();
                let mut core = Vec::with_capacity(binders.len());
                for b in binders {
                    let init = self.under(ctx, &scope, &b.init)?;
                    if !init.is_value() {
                        return Err(TypeError::NotAValue(init.to_string()));
                    }
                    core.push(Binder { name: b.name.clone(), sort: b.sort.clone(), init });
                }
                let body = self.under(ctx, &scope, body)?;
                Term::New(core, Box::new(body))
            }
            Surface::Let(x, ty, bound, body) => {
                let bound = self.go(ctx, bound)?;
                let ty = match ty {
                    Some(ty) => ty.clone(),
                    None => infer(self.sig, self.layout, ctx, &bound)?,
                };
                let body = self.under(ctx, &[(x.clone(), Some(ty.clone()))], body)?;
                Term::let_in(x, ty, bound, body)
            }
            Surface::Seq(first, rest) => {
                let first = self.go(ctx, first)?;
                let ty = infer(self.sig, self.layout, ctx, &first)?;
                let rest = self.under(ctx, &[("_".to_string(), None)], rest)?;
                Term::let_in("_", ty, first, rest)
            }
            Surface::RefNew(sort, init) => {
                let content = self
                    .sig
                    .try_typeof(sort)
                    .ok_or_else(|| TypeError::UnknownSort(sort.to_string()))?;
                let init = self.go(ctx, init)?;
                let body = Term::New(
                    vec![Binder { name: "c".into(), sort: sort.clone(), init: Term::var("v") }],
                    Box::new(Term::var("c")),
                );
                Term::let_in("v", Type::from(content), init, body)
            }
        })
    }

    /// Desugars `body` with extra bindings in scope; a binding with unknown
    /// type shadows the name so later inference cannot see a stale type.
    fn under(&self, ctx: &mut Context, binds: &[(Ident, Option<Type>)], body: &Surface) -> Result<Term, TypeError> {
        let saved: BTreeMap<Ident, Option<Type>> =
            binds.iter().map(|(x, _)| (x.clone(), ctx.get(x).cloned())).collect();
        for (x, ty) in binds {
            match ty {
                Some(ty) => ctx.insert(x.clone(), ty.clone()),
                None => ctx.remove(x),
            };
        }
        let out = self.go(ctx, body);
        for (x, old) in saved {
            match old {
                Some(ty) => ctx.insert(x, ty),
                None => ctx.remove(&x),
            };
        }
        out
    }
}
