//! Type-directed random generation of well-typed programs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GenError;
use crate::signature::{GroundType, Signature, Sort};
use crate::syntax::{Binder, Ident, Side, Term, Type};
use crate::worlds::World;
use crate::typing::{check, Context};

const ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Upper bound on the number of syntax nodes.
    pub size: usize,
    /// Largest initial layout, in cells.
    pub max_layout: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { size: 12, max_layout: 2 }
    }
}

pub struct Generator<'a> {
    sig: &'a Signature,
    sorts: Vec<Sort>,
    rng: ChaCha8Rng,
    layout: World,
    next_name: usize,
}

type Ctx = Vec<(Ident, Type)>;

impl<'a> Generator<'a> {
    pub fn new(sig: &'a Signature, seed: u64) -> Generator<'a> {
        Generator {
            sig,
            sorts: sig.sorts().cloned().collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            layout: World::empty(),
            next_name: 0,
        }
    }

    fn fresh(&mut self) -> Ident {
        self.next_name += 1;
        format!("x{}", self.next_name - 1)
    }

    fn sort(&mut self) -> Sort {
        self.sorts.choose(&mut self.rng).expect("nonempty signature").clone()
    }

    /// A random layout of at most `max_cells` cells over which some heap exists.
    pub fn layout(&mut self, max_cells: usize) -> World {
        loop {
            let n = self.rng.gen_range(0..=max_cells);
            let sorts: Vec<Sort> = (0..n).map(|_| self.sort()).collect();
            let w = World::contiguous(sorts.iter());
            if super::soundness::has_heaps(self.sig, &w) {
                return w;
            }
        }
    }

    /// A type whose closed terms exist (given that every sort can be allocated).
    pub fn ty(&mut self, depth: usize) -> Type {
        let roll = self.rng.gen_range(0..if depth == 0 { 7 } else { 12 });
        match roll {
            0 | 1 => Type::Unit,
            2..=4 => Type::bool(),
            5 | 6 => Type::Ref(self.sort()),
            7 | 8 => Type::product(self.ty(depth - 1), self.ty(depth - 1)),
            9 => Type::sum(self.ty(depth - 1), self.ty(depth - 1)),
            _ => Type::arrow(self.param_ty(depth - 1), self.ty(depth - 1)),
        }
    }

    fn param_ty(&mut self, depth: usize) -> Type {
        match self.rng.gen_range(0..10) {
            0..=2 => Type::Empty,
            3 if depth > 0 => Type::sum(Type::Empty, self.ty(depth - 1)),
            _ => self.ty(depth),
        }
    }

    fn split(&mut self, size: usize) -> (usize, usize) {
        let rest = size.saturating_sub(1).max(2);
        let a = self.rng.gen_range(1..rest);
        (a, rest - a)
    }

    fn vars_of<'c>(&self, ctx: &'c Ctx, ty: &Type) -> Vec<&'c Ident> {
        ctx.iter().rev().filter(|(_, t)| t == ty).map(|(x, _)| x).collect()
    }

    fn refs_available(&self, ctx: &Ctx, k: &Sort) -> Vec<Term> {
        let mut out: Vec<Term> = self.layout.iter().filter(|(_, s)| *s == k).map(|(l, _)| Term::Loc(l)).collect();
        out.extend(self.vars_of(ctx, &Type::Ref(k.clone())).into_iter().map(|x| Term::Var(x.clone())));
        out
    }

    /// A syntactic value of ground type, using only references already in scope.
    fn value(&mut self, ctx: &Ctx, ty: &GroundType) -> Option<Term> {
        let as_type = Type::from(ty);
        let vars = self.vars_of(ctx, &as_type);
        if !vars.is_empty() && self.rng.gen_bool(0.3) {
            return Some(Term::Var((*vars.choose(&mut self.rng)?).clone()));
        }
        match ty {
            GroundType::Unit => Some(Term::Star),
            GroundType::Empty => None,
            GroundType::Ref(k) => self.refs_available(ctx, k).choose(&mut self.rng).cloned(),
            GroundType::Product(a, b) => Some(Term::pair(self.value(ctx, a)?, self.value(ctx, b)?)),
            GroundType::Sum(a, b) => {
                let first = self.rng.gen_bool(0.5);
                let order = if first { [(Side::First, a), (Side::Second, b)] } else { [(Side::Second, b), (Side::First, a)] };
                order.into_iter().find_map(|(side, t)| self.value(ctx, t).map(|v| Term::inj(side, v)))
            }
        }
    }

    /// Binders for an allocation including `want`, closed under the sorts
    /// their contents need, with initial values.
    fn binders(&mut self, ctx: &Ctx, want: Vec<Sort>) -> Option<(Vec<Binder>, Ctx)> {
        let mut sorts = want;
        for _ in 0..ATTEMPTS {
            let mut inner = ctx.clone();
            let names: Vec<Ident> = sorts.iter().map(|_| self.fresh()).collect();
            for (x, k) in names.iter().zip(&sorts) {
                inner.push((x.clone(), Type::Ref(k.clone())));
            }
            let mut out = Vec::new();
            let mut missing = None;
            let sig = self.sig;
            for (x, k) in names.iter().zip(&sorts) {
                match self.value(&inner, sig.typeof_sort(k)) {
                    Some(v) => out.push(Binder { name: x.clone(), sort: k.clone(), init: v }),
                    None => {
                        let mut refs = Vec::new();
                        self.sig.typeof_sort(k).referenced_sorts(&mut refs);
                        missing = Some(refs);
                        break;
                    }
                }
            }
            match missing {
                None => {
                    let bound = inner[ctx.len()..].to_vec();
                    return Some((out, bound));
                }
                Some(refs) => {
                    let extra = refs.into_iter().find(|r| !sorts.contains(r))?;
                    if sorts.len() >= 3 {
                        return None;
                    }
                    sorts.push(extra);
                }
            }
        }
        None
    }

    fn alloc(&mut self, ctx: &Ctx, k: &Sort) -> Option<Term> {
        let (binders, _) = self.binders(ctx, vec![k.clone()])?;
        let x = binders[0].name.clone();
        Some(Term::New(binders, Box::new(Term::Var(x))))
    }

    /// Smallest-effort term of type `ty`.
    fn leaf(&mut self, ctx: &Ctx, ty: &Type) -> Option<Term> {
        if let Some((x, _)) = ctx.iter().rev().find(|(_, t)| *t == Type::Empty) {
            if *ty != Type::Empty && self.rng.gen_bool(0.5) {
                return Some(Term::MatchEmpty(Box::new(Term::Var(x.clone())), ty.clone()));
            }
        }
        let vars = self.vars_of(ctx, ty);
        if !vars.is_empty() && (self.rng.gen_bool(0.5) || matches!(ty, Type::Empty)) {
            return Some(Term::Var((*vars.choose(&mut self.rng)?).clone()));
        }
        match ty {
            Type::Unit => Some(Term::Star),
            Type::Empty => {
                let x = ctx.iter().rev().find(|(_, t)| *t == Type::Empty)?.0.clone();
                Some(Term::Var(x))
            }
            Type::Ref(k) => {
                let refs = self.refs_available(ctx, k);
                if !refs.is_empty() && self.rng.gen_bool(0.8) {
                    return refs.choose(&mut self.rng).cloned();
                }
                self.alloc(ctx, k)
            }
            Type::Product(a, b) => Some(Term::pair(self.leaf(ctx, a)?, self.leaf(ctx, b)?)),
            Type::Sum(a, b) => {
                let first = self.rng.gen_bool(0.5);
                let order = if first { [(Side::First, a), (Side::Second, b)] } else { [(Side::Second, b), (Side::First, a)] };
                order.into_iter().find_map(|(side, t)| self.leaf(ctx, t).map(|v| Term::inj(side, v)))
            }
            Type::Arrow(a, r) => {
                let x = self.fresh();
                let mut inner = ctx.clone();
                inner.push((x.clone(), (**a).clone()));
                let body = self.leaf(&inner, r)?;
                Some(Term::Fun(x, (**a).clone(), Box::new(body)))
            }
        }
    }

    /// A term of type `ty` in `ctx` with at most roughly `size` nodes.
    pub fn term(&mut self, ctx: &Ctx, ty: &Type, size: usize) -> Option<Term> {
        if size <= 2 {
            return self.leaf(ctx, ty);
        }
        for _ in 0..4 {
            if let Some(t) = self.step(ctx, ty, size) {
                return Some(t);
            }
        }
        self.leaf(ctx, ty)
    }

    fn step(&mut self, ctx: &Ctx, ty: &Type, size: usize) -> Option<Term> {
        let has_empty = ctx.iter().any(|(_, t)| *t == Type::Empty);
        let deref_sorts: Vec<Sort> = self.sorts.iter().filter(|k| Type::from(self.sig.typeof_sort(k)) == *ty).cloned().collect();
        let funs: Vec<(Ident, Type)> = ctx
            .iter()
            .filter(|(_, t)| matches!(t, Type::Arrow(_, r) if **r == *ty))
            .cloned()
            .collect();
        let mut menu: Vec<(&str, u32)> = vec![("intro", 4), ("app", 3), ("match-sum", 3), ("match-prod", 5), ("new", 3)];
        if has_empty {
            menu.push(("match-empty", 8));
        }
        if !deref_sorts.is_empty() {
            menu.push(("deref", 4));
        }
        if *ty == Type::Unit {
            menu.push(("assign", 5));
        } else {
            menu.push(("seq", 4));
        }
        if !funs.is_empty() {
            menu.push(("call", 3));
        }
        let pick = menu.choose_weighted(&mut self.rng, |(_, w)| *w).ok()?.0;
        let (s1, s2) = self.split(size);
        match pick {
            "intro" => self.intro(ctx, ty, size),
            "app" => {
                let arg = self.ty(1);
                let x = self.fresh();
                let mut inner = ctx.clone();
                inner.push((x.clone(), arg.clone()));
                let f = if self.rng.gen_bool(0.7) {
                    Term::Fun(x, arg.clone(), Box::new(self.term(&inner, ty, s1.saturating_sub(1))?))
                } else {
                    self.term(ctx, &Type::arrow(arg.clone(), ty.clone()), s1)?
                };
                Some(Term::app(f, self.term(ctx, &arg, s2)?))
            }
            "call" => {
                let (f, fty) = funs.choose(&mut self.rng)?.clone();
                let Type::Arrow(a, _) = fty else { return None };
                Some(Term::app(Term::Var(f), self.term(ctx, &a, size - 1)?))
            }
            "deref" => {
                let k = deref_sorts.choose(&mut self.rng)?.clone();
                Some(Term::deref(self.term(ctx, &Type::Ref(k), size - 1)?))
            }
            "assign" => {
                let k = self.sort();
                let r = self.term(ctx, &Type::Ref(k.clone()), s1)?;
                let v = self.term(ctx, &Type::from(self.sig.typeof_sort(&k)), s2)?;
                Some(Term::assign(r, v))
            }
            "seq" => {
                let k = self.sort();
                let r = self.term(ctx, &Type::Ref(k.clone()), s1 / 2 + 1)?;
                let v = self.term(ctx, &Type::from(self.sig.typeof_sort(&k)), s1 / 2 + 1)?;
                let x = self.fresh();
                let rest = self.term(ctx, ty, s2.saturating_sub(1))?;
                Some(Term::app(Term::Fun(x, Type::Unit, Box::new(rest)), Term::assign(r, v)))
            }
            "match-empty" => {
                let x = ctx.iter().rev().find(|(_, t)| *t == Type::Empty)?.0.clone();
                Some(Term::MatchEmpty(Box::new(Term::Var(x)), ty.clone()))
            }
            "match-sum" => {
                let (a, b) = if self.rng.gen_bool(0.5) {
                    (Type::Unit, Type::Unit)
                } else {
                    (self.param_ty(0), self.ty(1))
                };
                let scrut = self.term(ctx, &Type::sum(a.clone(), b.clone()), s1)?;
                let (x1, x2) = (self.fresh(), self.fresh());
                let mut c1 = ctx.clone();
                c1.push((x1.clone(), a));
                let mut c2 = ctx.clone();
                c2.push((x2.clone(), b));
                let half = (s2 / 2).max(1);
                let t1 = self.term(&c1, ty, half)?;
                let t2 = self.term(&c2, ty, half)?;
                Some(Term::MatchSum(Box::new(scrut), x1, Box::new(t1), x2, Box::new(t2)))
            }
            "match-prod" => {
                let (a, b) = (self.ty(1), self.ty(1));
                let scrut = self.term(ctx, &Type::product(a.clone(), b.clone()), s1)?;
                let (x1, x2) = (self.fresh(), self.fresh());
                let mut inner = ctx.clone();
                inner.push((x1.clone(), a));
                inner.push((x2.clone(), b));
                let body = self.term(&inner, ty, s2)?;
                Some(Term::MatchProd(Box::new(scrut), x1, x2, Box::new(body)))
            }
            "new" => {
                let n = self.rng.gen_range(1..=3);
                let want: Vec<Sort> = (0..n).map(|_| self.sort()).collect();
                let (binders, bound) = self.binders(ctx, want)?;
                let mut inner = ctx.clone();
                inner.extend(bound);
                let body = self.term(&inner, ty, size.saturating_sub(1 + binders.len() * 2))?;
                Some(Term::New(binders, Box::new(body)))
            }
            _ => None,
        }
    }

    fn intro(&mut self, ctx: &Ctx, ty: &Type, size: usize) -> Option<Term> {
        let (s1, s2) = self.split(size);
        match ty {
            Type::Unit | Type::Empty => self.leaf(ctx, ty),
            Type::Ref(k) => {
                if self.rng.gen_bool(0.5) {
                    self.alloc(ctx, k)
                } else {
                    self.leaf(ctx, ty)
                }
            }
            Type::Sum(a, b) => {
                let side = if self.rng.gen_bool(0.5) { Side::First } else { Side::Second };
                let part = if side == Side::First { a } else { b };
                Some(Term::inj(side, self.term(ctx, part, size - 1)?))
            }
            Type::Product(a, b) => Some(Term::pair(self.term(ctx, a, s1)?, self.term(ctx, b, s2)?)),
            Type::Arrow(a, r) => {
                let x = self.fresh();
                let mut inner = ctx.clone();
                inner.push((x.clone(), (**a).clone()));
                Some(Term::Fun(x, (**a).clone(), Box::new(self.term(&inner, r, size - 1)?)))
            }
        }
    }

    /// A closed term of type `ty` at `layout`.
    pub fn closed_of_type(&mut self, layout: &World, ty: &Type, size: usize) -> Result<Term, GenError> {
        self.layout = layout.clone();
        for _ in 0..ATTEMPTS {
            self.next_name = 0;
            if let Some(t) = self.term(&Vec::new(), ty, size) {
                if t.size() <= size.max(1) && check(self.sig, layout, &Context::new(), &t, ty).is_ok() {
                    return Ok(t);
                }
            }
        }
        Err(GenError::GenerationExhausted(ATTEMPTS))
    }

    /// A random layout, type and closed term.
    pub fn program(&mut self, cfg: GenConfig) -> Result<(World, Term, Type), GenError> {
        for _ in 0..ATTEMPTS {
            let layout = self.layout(cfg.max_layout);
            let ty = self.ty(2);
            if let Ok(t) = self.closed_of_type(&layout, &ty, cfg.size) {
                if t.size() <= cfg.size {
                    return Ok((layout, t, ty));
                }
            }
        }
        Err(GenError::GenerationExhausted(ATTEMPTS))
    }
}

/// A random closed program of at most `size` nodes; the same seed always
/// gives the same program.
pub fn gen_well_typed(sig: &Signature, size: usize, seed: u64) -> Result<(World, Term, Type), GenError> {
    Generator::new(sig, seed).program(GenConfig { size, ..GenConfig::default() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let sig = Signature::linked_list();
        assert_eq!(gen_well_typed(&sig, 12, 7).unwrap(), gen_well_typed(&sig, 12, 7).unwrap());
    }

    #[test]
    fn generated_terms_typecheck() {
        for sig in [Signature::linked_list(), Signature::constant_bool()] {
            for seed in 0..300 {
                let (w, t, ty) = gen_well_typed(&sig, 12, seed).unwrap();
                assert!(t.size() <= 12);
                check(&sig, &w, &Context::new(), &t, &ty).unwrap_or_else(|e| panic!("{t} : {ty} at {w}: {e}"));
            }
        }
    }

    #[test]
    fn constructor_coverage() {
        let mut counts = std::collections::BTreeMap::new();
        let mut total = 0usize;
        for sig in [Signature::linked_list(), Signature::constant_bool()] {
            for seed in 0..500 {
                let (_, t, _) = gen_well_typed(&sig, 12, seed).unwrap();
                t.visit(&mut |s: &Term| {
                    *counts.entry(s.constructor()).or_insert(0usize) += 1;
                    total += 1;
                });
            }
        }
        for c in crate::syntax::CONSTRUCTORS {
            let n = counts.get(c).copied().unwrap_or(0);
            eprintln!("{c}: {:.2}%", 100.0 * n as f64 / total as f64);
            assert!(n * 100 >= total, "{c} is under 1%: {n} of {total}");
        }
    }
}
