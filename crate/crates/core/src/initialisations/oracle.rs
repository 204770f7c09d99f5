//! Brute-force connectivity in the hiding quotient.
//!
//! Two representatives over the same public world are identified when a chain
//! of initialisation moves links them. This module walks that chain directly:
//! forward moves apply every initialisation into a contiguous world within
//! the size bound, backward moves undo an initialisation by deleting a
//! reference-closed set of private cells. It shares no code with the garbage
//! collector or the canonical labelling.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::SemError;
use crate::signature::{GroundType, Signature};
use crate::syntax::Loc;
use crate::worlds::{cell_values, enumerate_worlds, injections, interp_type, Injection, SemValue, World};

use super::{enumerate_stores, stores_action, CoendRep, Initialisation, Store};

pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Relabels a representative's world onto `#0..#(n-1)` preserving index order.
pub fn compact(r: &CoendRep) -> CoendRep {
    if r.world().is_contiguous() {
        return r.clone();
    }
    let target = World::contiguous(r.world().iter().map(|(_, s)| s));
    let map: BTreeMap<Loc, Loc> = r.world().locs().zip(target.locs()).collect();
    let iso = Injection::new(r.world().clone(), target, map).expect("order-preserving relabelling is sort-preserving");
    apply_iso(r, &iso)
}

fn apply_iso(r: &CoendRep, iso: &Injection) -> CoendRep {
    CoendRep::new(iso.after(&r.inj), r.payload.push(iso), r.store.rename(iso))
}

/// Moves from one representative to its neighbours within `bound` cells.
pub struct Explorer<'a> {
    sig: &'a Signature,
    targets: Vec<World>,
}

impl<'a> Explorer<'a> {
    pub fn new(sig: &'a Signature, bound: usize) -> Explorer<'a> {
        Explorer { sig, targets: enumerate_worlds(sig, bound) }
    }

    /// Every initialisation out of `w` into one of the target worlds.
    pub fn initialisations(&self, w: &World) -> Vec<Initialisation> {
        let mut out = Vec::new();
        for target in self.targets.iter().filter(|t| t.len() >= w.len()) {
            for inj in injections(w, target) {
                let image = inj.image();
                let missing: Vec<(Loc, _)> = target.iter().filter(|(l, _)| !image.contains(l)).collect();
                let mut datas: Vec<BTreeMap<Loc, SemValue>> = vec![BTreeMap::new()];
                for (l, k) in &missing {
                    let vals = cell_values(self.sig, k, target);
                    datas = datas
                        .into_iter()
                        .flat_map(|d| {
                            vals.iter().map(move |v| {
                                let mut d = d.clone();
                                d.insert(*l, v.clone());
                                d
                            })
                        })
                        .collect();
                }
                for data in datas {
                    out.push(Initialisation::new(inj.clone(), data).expect("data covers the complement"));
                }
            }
        }
        out
    }

    fn forward(&self, r: &CoendRep, out: &mut Vec<CoendRep>) {
        for i in self.initialisations(r.world()) {
            out.push(CoendRep::new(i.inj().after(&r.inj), r.payload.push(i.inj()), stores_action(&i, &r.store)));
        }
    }

    /// Representatives `r0` with `r` reachable from `r0` by one forward move
    /// whose injection is an order-preserving inclusion.
    fn backward(&self, r: &CoendRep, out: &mut Vec<CoendRep>) {
        let must: BTreeSet<Loc> = r.inj.image().into_iter().chain(r.payload.loc_list()).collect();
        let optional: Vec<Loc> = r.world().locs().filter(|l| !must.contains(l)).collect();
        if optional.len() > 16 {
            return;
        }
        for mask in 0u32..(1 << optional.len()) {
            if mask == (1 << optional.len()) - 1 {
                continue;
            }
            let mut keep = must.clone();
            keep.extend(optional.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| *l));
            let closed = keep.iter().all(|l| r.store.cells()[l].loc_list().iter().all(|m| keep.contains(m)));
            if !closed {
                continue;
            }
            let sub = r.world().restrict(&keep);
            let cells = keep.iter().map(|l| (*l, r.store.cells()[l].clone())).collect();
            let inj = Injection::new(r.base.clone(), sub.clone(), r.inj.loc_map().clone()).expect("image kept");
            out.push(compact(&CoendRep::new(inj, r.payload.clone(), Store::new(sub, cells))));
        }
    }

    pub fn neighbours(&self, r: &CoendRep) -> Vec<CoendRep> {
        let mut out = Vec::new();
        self.forward(r, &mut out);
        self.backward(r, &mut out);
        out
    }
}

/// Whether `r1` and `r2` are linked by initialisation moves through worlds of
/// at most `size_bound` cells.
pub fn coend_equal_oracle(
    sig: &Signature,
    r1: &CoendRep,
    r2: &CoendRep,
    size_bound: usize,
    budget: usize,
) -> Result<bool, SemError> {
    if r1.base != r2.base {
        return Err(SemError::BaseMismatch);
    }
    let start = compact(r1);
    let goal = compact(r2);
    if start == goal {
        return Ok(true);
    }
    let ex = Explorer::new(sig, size_bound);
    let mut seen_reps: HashSet<CoendRep> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(r) = queue.pop_front() {
        for n in ex.neighbours(&r) {
            if n == goal {
                return Ok(true);
            }
            if seen_reps.insert(n.clone()) {
                if seen_reps.len() > budget {
                    return Err(SemError::BudgetExceeded(budget));
                }
                queue.push_back(n);
            }
        }
    }
    Ok(false)
}

/// Every initialisation out of `w` into a contiguous world of at most
/// `max_cells` cells.
pub fn enumerate_initialisations(sig: &Signature, w: &World, max_cells: usize) -> Vec<Initialisation> {
    Explorer::new(sig, max_cells).initialisations(w)
}

/// Every representative over `base` whose world is contiguous with at most
/// `max_cells` cells, carrying a payload of type `payload`.
pub fn rep_universe(sig: &Signature, base: &World, max_cells: usize, payload: &GroundType) -> Vec<CoendRep> {
    let mut out = Vec::new();
    for w in enumerate_worlds(sig, max_cells).into_iter().filter(|w| w.len() >= base.len()) {
        let stores = enumerate_stores(sig, &w);
        let payloads = interp_type(payload, &w);
        for inj in injections(base, &w) {
            for s in &stores {
                for x in &payloads {
                    out.push(CoendRep::new(inj.clone(), x.clone(), s.clone()));
                }
            }
        }
    }
    out
}

/// Connected components of the move graph restricted to `universe`, which
/// must be closed under moves within `size_bound`. Returns a class index per
/// element of `universe`.
pub fn oracle_classes(
    sig: &Signature,
    universe: &[CoendRep],
    size_bound: usize,
    budget: usize,
) -> Result<Vec<usize>, SemError> {
    let ex = Explorer::new(sig, size_bound);
    let index: HashMap<&CoendRep, usize> = universe.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut class = vec![usize::MAX; universe.len()];
    let mut next = 0;
    let mut steps = 0usize;
    for seed in 0..universe.len() {
        if class[seed] != usize::MAX {
            continue;
        }
        class[seed] = next;
        let mut queue = VecDeque::from([seed]);
        while let Some(i) = queue.pop_front() {
            for n in ex.neighbours(&universe[i]) {
                steps += 1;
                if steps > budget {
                    return Err(SemError::BudgetExceeded(budget));
                }
                let j = *index
                    .get(&n)
                    .ok_or_else(|| SemError::Shape(format!("move left the universe: {n}")))?;
                if class[j] == usize::MAX {
                    class[j] = next;
                    queue.push_back(j);
                }
            }
        }
        next += 1;
    }
    Ok(class)
}
