//! The hiding monad on `A = X · Stores`, whose elements are coend
//! representatives `q_h(x, σ)`. Every result is returned in canonical form.

use crate::error::SemError;
use crate::initialisations::{promote, stores_action, CoendRep, Initialisation, Store};
use crate::worlds::{Injection, SemValue};

/// `η = q_id`.
pub fn p_return(payload: SemValue, store: Store) -> CoendRep {
    CoendRep::pure(payload, store).gc_canonical()
}

/// `hide_h : P A w2 → P A w1` for `h : w1 → w2`, sending `q_{h'}` to `q_{h'∘h}`.
pub fn p_hide(h: &Injection, r: &CoendRep) -> Result<CoendRep, SemError> {
    if *h.cod() != r.base {
        return Err(SemError::BaseMismatch);
    }
    Ok(CoendRep::new(r.inj.after(h), r.payload.clone(), r.store.clone()).gc_canonical())
}

/// `q_h(a) ≫= g := hide_h(g_{w'}(a))`.
pub fn p_bind(
    r: &CoendRep,
    g: impl FnOnce(&SemValue, &Store) -> Result<CoendRep, SemError>,
) -> Result<CoendRep, SemError> {
    let inner = g(&r.payload, &r.store)?;
    if inner.base != *r.world() {
        return Err(SemError::BaseMismatch);
    }
    p_hide(&r.inj, &inner)
}

/// `σ(x, q_h(a)) := q_h(⟨X h x, a⟩)`.
pub fn p_strength(x: &SemValue, r: &CoendRep) -> CoendRep {
    CoendRep::new(r.inj.clone(), SemValue::pair(x.push(&r.inj), r.payload.clone()), r.store.clone()).gc_canonical()
}

/// The functorial action along a natural map on payloads.
pub fn p_map(r: &CoendRep, f: impl FnOnce(&SemValue) -> SemValue) -> CoendRep {
    CoendRep::new(r.inj.clone(), f(&r.payload), r.store.clone()).gc_canonical()
}

/// The action of `P(X · Stores)` along an initialisation `ι : w1 → w2`:
/// `q_h(x, σ) ↦ q_{ι◁h}(x pushed along h▷ι, Stores(h▷ι) σ)` where the
/// promotion is taken of `ι` along `h`.
pub fn p_map_init(i: &Initialisation, r: &CoendRep) -> Result<CoendRep, SemError> {
    if *i.dom() != r.base {
        return Err(SemError::BaseMismatch);
    }
    let (along, back) = promote(&r.inj, i);
    Ok(CoendRep::new(back, r.payload.push(along.inj()), stores_action(&along, &r.store)).gc_canonical())
}
