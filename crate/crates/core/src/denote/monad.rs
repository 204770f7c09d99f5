//! The storage monad `T`. An element of `T X w` is kept as the family of its
//! components: for every `h : w → w'` and store over `w'`, a representative
//! over `w'`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::SemError;
use crate::initialisations::{minit, promote, stores_action, CoendRep, Store};
use crate::syntax::Loc;
use crate::worlds::{indep_coproduct, Injection, SemValue, World};

type Component = Arc<dyn Fn(&Injection, &Store) -> Result<CoendRep, SemError> + Send + Sync>;

/// A Kleisli arrow, given the world at which its argument lives.
pub type Kleisli = Arc<dyn Fn(&World, SemValue) -> Result<MonadComp, SemError> + Send + Sync>;

#[derive(Clone)]
pub struct MonadComp {
    base: World,
    comp: Component,
}

impl fmt::Debug for MonadComp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonadComp@{}", self.base)
    }
}

impl MonadComp {
    pub fn new(
        base: World,
        comp: impl Fn(&Injection, &Store) -> Result<CoendRep, SemError> + Send + Sync + 'static,
    ) -> MonadComp {
        MonadComp { base, comp: Arc::new(comp) }
    }

    pub fn base(&self) -> &World {
        &self.base
    }

    /// `π_h(m)(σ)`, canonicalised.
    pub fn at(&self, h: &Injection, s: &Store) -> Result<CoendRep, SemError> {
        if *h.dom() != self.base || h.cod() != s.world() {
            return Err(SemError::BaseMismatch);
        }
        let r = (self.comp)(h, s)?;
        if r.base != *s.world() {
            return Err(SemError::BaseMismatch);
        }
        Ok(r.gc_canonical())
    }

    /// The component at the identity.
    pub fn run(&self, s: &Store) -> Result<CoendRep, SemError> {
        self.at(&Injection::identity(&self.base), s)
    }

    /// `T X k` for `k : base → w'`: precomposition.
    pub fn push(&self, k: &Injection) -> Result<MonadComp, SemError> {
        if *k.dom() != self.base {
            return Err(SemError::BaseMismatch);
        }
        let inner = self.clone();
        let k = k.clone();
        Ok(MonadComp::new(k.cod().clone(), move |h, s| inner.at(&h.after(&k), s)))
    }
}

/// `π_h(η x)(σ) = q_id(X h x, σ)`.
pub fn t_return(base: &World, x: SemValue) -> MonadComp {
    MonadComp::new(base.clone(), move |h, s| Ok(CoendRep::pure(x.push(h), s.clone())))
}

/// `π_h(α ≫= f)(σ') = q_{h''∘h'}(y, σ''')` where `π_h α σ' = q_{h'}(x, σ'')`
/// and `π_id(f_{w''} x)(σ'') = q_{h''}(y, σ''')`.
pub fn t_bind(m: &MonadComp, f: Kleisli) -> MonadComp {
    let m = m.clone();
    MonadComp::new(m.base.clone(), move |h, s| {
        let first = m.at(h, s)?;
        let next = f(first.world(), first.payload.clone())?;
        let second = next.at(&Injection::identity(first.world()), &first.store)?;
        Ok(CoendRep::new(second.inj.after(&first.inj), second.payload, second.store))
    })
}

/// `π_h(σ(x, α))(σ') = q_{h'}(⟨X(h'∘h) x, y⟩, σ'')`.
pub fn t_strength(x: SemValue, m: &MonadComp) -> MonadComp {
    let m = m.clone();
    MonadComp::new(m.base.clone(), move |h, s| {
        let r = m.at(h, s)?;
        let moved = x.push(&r.inj.after(h));
        Ok(CoendRep::new(r.inj, SemValue::pair(moved, r.payload), r.store))
    })
}

/// Double strength, left argument first:
/// `π_{h1} ψ(α, β) (σ1) = q_{h3∘h2}(⟨X h3 x, y⟩, σ3)`.
pub fn t_dstrength(m1: &MonadComp, m2: &MonadComp) -> Result<MonadComp, SemError> {
    if m1.base != m2.base {
        return Err(SemError::BaseMismatch);
    }
    let (m1, m2) = (m1.clone(), m2.clone());
    Ok(MonadComp::new(m1.base.clone(), move |h1, s1| {
        let r1 = m1.at(h1, s1)?;
        let r2 = m2.at(&r1.inj.after(h1), &r1.store)?;
        Ok(CoendRep::new(r2.inj.after(&r1.inj), SemValue::pair(r1.payload.push(&r2.inj), r2.payload), r2.store))
    }))
}

/// `T f` for a natural map `f` on payloads.
pub fn t_map(m: &MonadComp, f: impl Fn(SemValue) -> SemValue + Send + Sync + 'static) -> MonadComp {
    let m = m.clone();
    MonadComp::new(m.base.clone(), move |h, s| {
        let r = m.at(h, s)?;
        Ok(CoendRep::new(r.inj, f(r.payload), r.store))
    })
}

/// `π_h(mget ℓ)(σ) = q_id(σ(h ℓ), σ)`.
pub fn mget(base: &World, l: Loc) -> Result<MonadComp, SemError> {
    if !base.contains(l) {
        return Err(SemError::UnknownLocation(l));
    }
    Ok(MonadComp::new(base.clone(), move |h, s| Ok(CoendRep::pure(s.lookup(h.apply(l))?.clone(), s.clone()))))
}

/// `π_h(mset(ℓ, a))(σ) = q_id(⋆, σ[h ℓ ↦ h a])`.
pub fn mset(base: &World, l: Loc, a: SemValue) -> Result<MonadComp, SemError> {
    if !base.contains(l) {
        return Err(SemError::UnknownLocation(l));
    }
    Ok(MonadComp::new(base.clone(), move |h, s| Ok(CoendRep::pure(SemValue::Star, s.update(h.apply(l), a.push(h))?))))
}

/// Allocates the cells of `w0` with the given contents, which live at
/// `base ⊕ w0` and may refer to the new cells. The payload lists the new
/// locations in ascending order of `w0`.
pub fn mnew(base: &World, w0: &World, data: BTreeMap<Loc, SemValue>) -> Result<MonadComp, SemError> {
    if data.len() != w0.len() || w0.locs().any(|l| !data.contains_key(&l)) {
        return Err(SemError::Shape("initialisation data must cover the new cells".into()));
    }
    let init = minit(base, w0, &data);
    let (_, _, i2) = indep_coproduct(base, w0);
    let fresh: Vec<Loc> = w0.locs().map(|l| i2.apply(l)).collect();
    Ok(MonadComp::new(base.clone(), move |h, s| {
        let (along, back) = promote(h, &init);
        let payload = SemValue::Tuple(fresh.iter().map(|l| SemValue::Loc(back.apply(*l))).collect());
        Ok(CoendRep::new(along.inj().clone(), payload, stores_action(&along, s)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initialisations::coend_equal;
    use crate::signature::Sort;

    fn d() -> Sort {
        Sort::new("d")
    }
    fn dworld(n: u32) -> World {
        (0..n).map(|i| (Loc(i), d())).collect()
    }

    #[test]
    fn mget_reads_the_cell() {
        let w = dworld(1);
        let s = Store::new(w.clone(), [(Loc(0), SemValue::tt())].into());
        let r = mget(&w, Loc(0)).unwrap().run(&s).unwrap();
        assert_eq!(r, CoendRep::pure(SemValue::tt(), s));
    }

    #[test]
    fn mset_writes_the_cell() {
        let w = dworld(1);
        let s = Store::new(w.clone(), [(Loc(0), SemValue::tt())].into());
        let r = mset(&w, Loc(0), SemValue::ff()).unwrap().run(&s).unwrap();
        assert_eq!(r, CoendRep::pure(SemValue::Star, Store::new(w, [(Loc(0), SemValue::ff())].into())));
    }

    #[test]
    fn mnew_at_empty_world() {
        let m = mnew(&World::empty(), &dworld(1), [(Loc(0), SemValue::tt())].into()).unwrap();
        let r = m.run(&Store::empty()).unwrap();
        assert_eq!(*r.world(), dworld(1));
        assert_eq!(r.payload, SemValue::Tuple(vec![SemValue::Loc(Loc(0))]));
        assert_eq!(*r.store.lookup(Loc(0)).unwrap(), SemValue::tt());
        assert_eq!(r.base, World::empty());
    }

    #[test]
    fn allocating_then_discarding_is_pure() {
        let alloc = mnew(&World::empty(), &dworld(1), [(Loc(0), SemValue::tt())].into()).unwrap();
        let discard: Kleisli = Arc::new(|w: &World, _x| Ok(t_return(w, SemValue::tt())));
        let lhs = t_bind(&alloc, discard).run(&Store::empty()).unwrap();
        let rhs = t_return(&World::empty(), SemValue::tt()).run(&Store::empty()).unwrap();
        assert!(coend_equal(&lhs, &rhs).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mnew_under_a_nontrivial_extension() {
        // base {#0}, component at the inclusion into {#0, #1}
        let base = dworld(1);
        let m = mnew(&base, &dworld(1), [(Loc(0), SemValue::ff())].into()).unwrap();
        let big = dworld(2);
        let h = Injection::inclusion(&base, &big).unwrap();
        let s = Store::new(big.clone(), [(Loc(0), SemValue::tt()), (Loc(1), SemValue::tt())].into());
        let r = m.at(&h, &s).unwrap();
        assert_eq!(r.base, big);
        assert_eq!(r.private_count(), 1);
        let SemValue::Tuple(ls) = &r.payload else { panic!() };
        let fresh = ls[0].as_loc().unwrap();
        assert!(!r.inj.image().contains(&fresh));
        assert_eq!(*r.store.lookup(fresh).unwrap(), SemValue::ff());
    }

    #[test]
    fn set_then_get() {
        let w = dworld(2);
        let setget = t_bind(
            &mset(&w, Loc(1), SemValue::ff()).unwrap(),
            Arc::new(|v: &World, _| mget(v, Loc(1))),
        );
        for s in crate::initialisations::enumerate_stores(&crate::signature::Signature::constant_bool(), &w) {
            assert_eq!(setget.run(&s).unwrap().payload, SemValue::ff());
        }
    }
}
