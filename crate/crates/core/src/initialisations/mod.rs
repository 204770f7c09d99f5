//! Heaplets, initialisations, stores, and representatives of the hiding
//! quotient together with the procedure deciding their equality.

pub mod oracle;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::SemError;
use crate::signature::Signature;
use crate::syntax::Loc;
use crate::worlds::{cell_values, complement, indep_coproduct, local_coproduct, Injection, SemValue, World};

/// An element of `Stores(shape, ambient)`: one value per cell of `shape`,
/// each an element of the cell's content type at `ambient`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Heaplet {
    pub shape: World,
    pub ambient: World,
    pub contents: BTreeMap<Loc, SemValue>,
}

impl Heaplet {
    pub fn empty(ambient: &World) -> Heaplet {
        Heaplet { shape: World::empty(), ambient: ambient.clone(), contents: BTreeMap::new() }
    }

    pub fn get(&self, l: Loc) -> Option<&SemValue> {
        self.contents.get(&l)
    }

    /// Totality on the shape and membership of every value in its interpretation.
    pub fn well_formed(&self, sig: &Signature) -> bool {
        self.contents.len() == self.shape.len()
            && self.shape.iter().all(|(l, k)| {
                self.contents.get(&l).is_some_and(|v| v.inhabits(sig.typeof_sort(k), &self.ambient))
            })
    }
}

impl fmt::Debug for Heaplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Heaplet({} @ {}: {:?})", self.shape, self.ambient, self.contents)
    }
}

/// `Stores(w1, w) × Stores(w2, w) ≅ Stores(w1 ⊕ w2, w)`.
pub fn heaplet_concat(r1: &Heaplet, r2: &Heaplet) -> Heaplet {
    assert_eq!(r1.ambient, r2.ambient, "concatenated heaplets share their ambient world");
    let (shape, i1, i2) = indep_coproduct(&r1.shape, &r2.shape);
    let mut contents = BTreeMap::new();
    for (l, v) in &r1.contents {
        contents.insert(i1.apply(*l), v.clone());
    }
    for (l, v) in &r2.contents {
        contents.insert(i2.apply(*l), v.clone());
    }
    Heaplet { shape, ambient: r1.ambient.clone(), contents }
}

/// Projection along `h: w → shape`.
pub fn heaplet_contra(h: &Injection, r: &Heaplet) -> Heaplet {
    assert_eq!(*h.cod(), r.shape, "contravariant action needs cod h = shape");
    Heaplet {
        shape: h.dom().clone(),
        ambient: r.ambient.clone(),
        contents: h.pairs().map(|(a, b)| (a, r.contents[&b].clone())).collect(),
    }
}

/// Pushes every value along `h: ambient → w'`.
pub fn heaplet_co(h: &Injection, r: &Heaplet) -> Heaplet {
    assert_eq!(*h.dom(), r.ambient, "covariant action needs dom h = ambient");
    Heaplet {
        shape: r.shape.clone(),
        ambient: h.cod().clone(),
        contents: r.contents.iter().map(|(l, v)| (*l, v.push(h))).collect(),
    }
}

/// A full heap over a world: a heaplet whose shape is its ambient world.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Store {
    world: World,
    cells: BTreeMap<Loc, SemValue>,
}

impl Store {
    pub fn empty() -> Store {
        Store { world: World::empty(), cells: BTreeMap::new() }
    }

    /// Panics if the cells do not cover exactly the world.
    pub fn new(world: World, cells: BTreeMap<Loc, SemValue>) -> Store {
        assert!(
            cells.len() == world.len() && world.locs().all(|l| cells.contains_key(&l)),
            "store cells must cover exactly {world}"
        );
        Store { world, cells }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn cells(&self) -> &BTreeMap<Loc, SemValue> {
        &self.cells
    }

    pub fn lookup(&self, l: Loc) -> Result<&SemValue, SemError> {
        self.cells.get(&l).ok_or(SemError::UnknownLocation(l))
    }

    pub fn update(&self, l: Loc, v: SemValue) -> Result<Store, SemError> {
        if !self.world.contains(l) {
            return Err(SemError::UnknownLocation(l));
        }
        let mut out = self.clone();
        out.cells.insert(l, v);
        Ok(out)
    }

    pub fn as_heaplet(&self) -> Heaplet {
        Heaplet { shape: self.world.clone(), ambient: self.world.clone(), contents: self.cells.clone() }
    }

    pub fn from_heaplet(h: Heaplet) -> Option<Store> {
        (h.shape == h.ambient).then_some(Store { world: h.shape, cells: h.contents })
    }

    /// `Stores w ≅ Init(∅, w)`.
    pub fn as_init(&self) -> Initialisation {
        Initialisation {
            inj: Injection::inclusion(&World::empty(), &self.world).expect("∅ is included everywhere"),
            data: self.as_heaplet(),
        }
    }

    pub fn well_formed(&self, sig: &Signature) -> bool {
        self.as_heaplet().well_formed(sig)
    }

    /// Renames every location, cell and contents alike.
    pub fn rename(&self, h: &Injection) -> Store {
        assert!(h.is_iso() && *h.dom() == self.world, "store renaming must be a bijection on its world");
        Store {
            world: h.cod().clone(),
            cells: self.cells.iter().map(|(l, v)| (h.apply(*l), v.push(h))).collect(),
        }
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, v)) in self.cells.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}:{} = {v}", self.world.get(*l).expect("cells cover the world"))?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn store_lookup(s: &Store, l: Loc) -> Result<SemValue, SemError> {
    s.lookup(l).cloned()
}

pub fn store_update(s: &Store, l: Loc, v: SemValue) -> Result<Store, SemError> {
    s.update(l, v)
}

/// Every store over `w`, in lexicographic order of cell contents.
pub fn enumerate_stores(sig: &Signature, w: &World) -> Vec<Store> {
    let mut out = vec![BTreeMap::new()];
    for (l, k) in w.iter() {
        let choices = cell_values(sig, k, w);
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for partial in &out {
            for v in &choices {
                let mut m: BTreeMap<Loc, SemValue> = partial.clone();
                m.insert(l, v.clone());
                next.push(m);
            }
        }
        out = next;
    }
    out.into_iter().map(|cells| Store { world: w.clone(), cells }).collect()
}

/// A morphism of `Init`: an injection with values for every cell it misses.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Initialisation {
    inj: Injection,
    data: Heaplet,
}

impl Initialisation {
    pub fn new(inj: Injection, data: BTreeMap<Loc, SemValue>) -> Option<Initialisation> {
        let shape = complement(&inj).dom().clone();
        let ok = data.len() == shape.len() && shape.locs().all(|l| data.contains_key(&l));
        ok.then(|| Initialisation { data: Heaplet { shape, ambient: inj.cod().clone(), contents: data }, inj })
    }

    pub fn identity(w: &World) -> Initialisation {
        Initialisation { inj: Injection::identity(w), data: Heaplet::empty(w) }
    }

    pub fn inj(&self) -> &Injection {
        &self.inj
    }

    pub fn data(&self) -> &Heaplet {
        &self.data
    }

    pub fn dom(&self) -> &World {
        self.inj.dom()
    }

    pub fn cod(&self) -> &World {
        self.inj.cod()
    }
}

impl fmt::Debug for Initialisation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Init({} with {:?})", self.inj, self.data.contents)
    }
}

/// `i2 ∘ i1`: the composite injection, with the data of `i1` pushed along `i2`
/// and the data of `i2` kept.
pub fn compose_init(i1: &Initialisation, i2: &Initialisation) -> Initialisation {
    assert_eq!(i1.cod(), i2.dom(), "composable initialisations");
    let inj = i2.inj.after(&i1.inj);
    let mut data = i2.data.contents.clone();
    for (l, v) in &i1.data.contents {
        data.insert(i2.inj.apply(*l), v.push(&i2.inj));
    }
    Initialisation::new(inj, data).expect("the composite misses exactly the two data shapes")
}

/// `Stores ι : Stores w1 → Stores w2`.
pub fn stores_action(i: &Initialisation, s: &Store) -> Store {
    assert_eq!(i.dom(), s.world(), "store must live over the initialisation's domain");
    let mut cells = i.data.contents.clone();
    for (l, v) in &s.cells {
        cells.insert(i.inj.apply(*l), v.push(&i.inj));
    }
    Store { world: i.cod().clone(), cells }
}

/// Promotion of `ι` along `h`: returns `h ▷ ι : w' → L` and `ι ◁ h : w2 → L`
/// where `L` is the local coproduct of `h` and the injection of `ι`.
pub fn promote(h: &Injection, i: &Initialisation) -> (Initialisation, Injection) {
    let lc = local_coproduct(h, &i.inj);
    let data = i.data.contents.iter().map(|(l, v)| (lc.p2.apply(*l), v.push(&lc.p2))).collect();
    let promoted = Initialisation::new(lc.p1, data).expect("p1 misses exactly the image of the fresh part");
    (promoted, lc.p2)
}

/// `w → w ⊕ w0` with the given values for the cells of `w0`, typed at `w ⊕ w0`.
pub fn minit(w: &World, w0: &World, data: &BTreeMap<Loc, SemValue>) -> Initialisation {
    let (_, i1, i2) = indep_coproduct(w, w0);
    let data = w0.locs().map(|l| (i2.apply(l), data[&l].clone())).collect();
    Initialisation::new(i1, data).expect("ι1 misses exactly the image of ι2")
}

/// `q_h(x, σ)`: a payload and store at a private extension of a public world.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoendRep {
    pub base: World,
    pub inj: Injection,
    pub payload: SemValue,
    pub store: Store,
}

impl CoendRep {
    pub fn new(inj: Injection, payload: SemValue, store: Store) -> CoendRep {
        debug_assert_eq!(inj.cod(), store.world());
        CoendRep { base: inj.dom().clone(), inj, payload, store }
    }

    /// `q_id(x, σ)`.
    pub fn pure(payload: SemValue, store: Store) -> CoendRep {
        CoendRep::new(Injection::identity(store.world()), payload, store)
    }

    pub fn world(&self) -> &World {
        self.store.world()
    }

    pub fn private_count(&self) -> usize {
        self.world().len() - self.base.len()
    }

    /// Drops private cells unreachable from the public cells and the payload,
    /// then renames: public cells back to their base names, private cells to
    /// the smallest free indices in breadth-first discovery order.
    pub fn gc_canonical(&self) -> CoendRep {
        let public: BTreeMap<Loc, Loc> = self.inj.pairs().map(|(b, l)| (l, b)).collect();
        let mut label: BTreeMap<Loc, Loc> = public.clone();
        let mut free = (0u32..).map(Loc).filter(|l| !self.base.contains(*l));
        let mut queue = VecDeque::new();
        let mut discover = |l: Loc, label: &mut BTreeMap<Loc, Loc>, queue: &mut VecDeque<Loc>| {
            if let std::collections::btree_map::Entry::Vacant(e) = label.entry(l) {
                e.insert(free.next().expect("unbounded supply of indices"));
                queue.push_back(l);
            }
        };
        for l in self.payload.loc_list() {
            discover(l, &mut label, &mut queue);
        }
        for (_, l) in self.inj.pairs() {
            queue.push_back(l);
        }
        while let Some(l) = queue.pop_front() {
            for m in self.store.cells[&l].loc_list() {
                discover(m, &mut label, &mut queue);
            }
        }
        let rename = |l: Loc| label[&l];
        let world: World = label.iter().map(|(old, new)| (*new, self.world().get(*old).expect("in world").clone())).collect();
        let cells = label.iter().map(|(old, new)| (*new, self.store.cells[old].map_locs(&rename))).collect();
        CoendRep {
            base: self.base.clone(),
            inj: Injection::inclusion(&self.base, &world).expect("public cells keep their names"),
            payload: self.payload.map_locs(&rename),
            store: Store { world, cells },
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.gc_canonical()
    }

    /// The public part of the store, read through the injection.
    pub fn public_cells(&self) -> Vec<(Loc, SemValue)> {
        self.inj.pairs().map(|(b, l)| (b, self.store.cells[&l].clone())).collect()
    }
}

impl fmt::Display for CoendRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let image = self.inj.image();
        f.write_str("public: {")?;
        for (i, (b, l)) in self.inj.pairs().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}:{} = {}", self.base.get(b).expect("base cell"), self.store.cells[&l])?;
            if b != l {
                write!(f, " (as {l})")?;
            }
        }
        f.write_str("} | private: {")?;
        let mut first = true;
        for (l, v) in self.store.cells.iter().filter(|(l, _)| !image.contains(l)) {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{l}:{} = {v}", self.world().get(*l).expect("cell"))?;
        }
        write!(f, "}} | payload: {}", self.payload)
    }
}

impl fmt::Debug for CoendRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Walks two values in lockstep, reporting each pair of locations met at the
/// same position. False on any structural difference.
pub(crate) fn zip_locs(a: &SemValue, b: &SemValue, f: &mut impl FnMut(Loc, Loc) -> bool) -> bool {
    match (a, b) {
        (SemValue::Star, SemValue::Star) => true,
        (SemValue::Loc(x), SemValue::Loc(y)) => f(*x, *y),
        (SemValue::Inj(s, x), SemValue::Inj(t, y)) => s == t && zip_locs(x, y, f),
        (SemValue::Pair(x1, x2), SemValue::Pair(y1, y2)) => zip_locs(x1, y1, f) && zip_locs(x2, y2, f),
        (SemValue::Tuple(xs), SemValue::Tuple(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| zip_locs(x, y, f))
        }
        (SemValue::Closure(c), SemValue::Closure(d)) => {
            c.param == d.param
                && c.param_ty == d.param_ty
                && c.body == d.body
                && c.locenv.len() == d.locenv.len()
                && c.env.len() == d.env.len()
                && c.locenv.iter().zip(&d.locenv).all(|((k1, l1), (k2, l2))| k1 == k2 && f(*l1, *l2))
                && c.env.iter().zip(&d.env).all(|((x, u), (y, v))| x == y && zip_locs(u, v, f))
        }
        _ => false,
    }
}

/// Equality in the hiding quotient: after garbage collection the two
/// representatives must agree up to a sort-preserving bijection of private
/// cells. Every private cell is reachable from the payload or a public cell,
/// so matching from those roots forces the bijection.
pub fn coend_equal(r1: &CoendRep, r2: &CoendRep) -> Result<bool, SemError> {
    if r1.base != r2.base {
        return Err(SemError::BaseMismatch);
    }
    let a = r1.gc_canonical();
    let b = r2.gc_canonical();
    if a.world().len() != b.world().len() {
        return Ok(false);
    }
    let mut fwd: BTreeMap<Loc, Loc> = a.inj.pairs().map(|(_, l)| (l, l)).collect();
    let mut used: BTreeSet<Loc> = fwd.values().copied().collect();
    let mut work: Vec<(SemValue, SemValue)> = vec![(a.payload.clone(), b.payload.clone())];
    for (_, l) in a.inj.pairs() {
        work.push((a.store.cells[&l].clone(), b.store.cells[&l].clone()));
    }
    while let Some((x, y)) = work.pop() {
        let mut fresh_pairs = Vec::new();
        let ok = zip_locs(&x, &y, &mut |p, q| match fwd.get(&p) {
            Some(m) => *m == q,
            None => {
                if used.contains(&q) || a.world().get(p) != b.world().get(q) {
                    return false;
                }
                fwd.insert(p, q);
                used.insert(q);
                fresh_pairs.push((p, q));
                true
            }
        });
        if !ok {
            return Ok(false);
        }
        for (p, q) in fresh_pairs {
            work.push((a.store.cells[&p].clone(), b.store.cells[&q].clone()));
        }
    }
    Ok(fwd.len() == a.world().len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Sort;
    use crate::syntax::Side;

    fn d() -> Sort {
        Sort::new("d")
    }
    fn w(n: u32) -> World {
        (0..n).map(|i| (Loc(i), d())).collect()
    }
    fn store(vals: &[SemValue]) -> Store {
        Store::new(w(vals.len() as u32), vals.iter().enumerate().map(|(i, v)| (Loc(i as u32), v.clone())).collect())
    }

    #[test]
    fn concat_shifts_second_shape() {
        let amb = w(2);
        let r = Heaplet { shape: w(1), ambient: amb.clone(), contents: [(Loc(0), SemValue::tt())].into() };
        let s = Heaplet { shape: w(1), ambient: amb.clone(), contents: [(Loc(0), SemValue::ff())].into() };
        let c = heaplet_concat(&r, &s);
        assert_eq!(c.shape, w(2));
        assert_eq!(c.contents[&Loc(1)], SemValue::ff());
        let (_, i1, i2) = indep_coproduct(&w(1), &w(1));
        assert_eq!(heaplet_contra(&i1, &c), r);
        assert_eq!(heaplet_contra(&i2, &c), s);
        let e = Heaplet::empty(&amb);
        assert_eq!(heaplet_concat(&e, &r), r);
    }

    #[test]
    fn projection() {
        let s = store(&[SemValue::tt(), SemValue::ff()]).as_heaplet();
        let h = Injection::inclusion(&w(1), &w(2)).unwrap();
        assert_eq!(heaplet_contra(&h, &s).contents, BTreeMap::from([(Loc(0), SemValue::tt())]));
    }

    #[test]
    fn lookup_update_laws() {
        let s = store(&[SemValue::tt(), SemValue::ff()]);
        let t = s.update(Loc(0), SemValue::ff()).unwrap();
        assert_eq!(*t.lookup(Loc(0)).unwrap(), SemValue::ff());
        assert_eq!(t.lookup(Loc(1)).unwrap(), s.lookup(Loc(1)).unwrap());
        assert_eq!(s.update(Loc(1), s.lookup(Loc(1)).unwrap().clone()).unwrap(), s);
        assert_eq!(s.lookup(Loc(5)), Err(SemError::UnknownLocation(Loc(5))));
    }

    #[test]
    fn compose_two_single_cell_inits() {
        let i1 = Initialisation::new(Injection::inclusion(&World::empty(), &w(1)).unwrap(), [(Loc(0), SemValue::tt())].into()).unwrap();
        let i2 = Initialisation::new(Injection::inclusion(&w(1), &w(2)).unwrap(), [(Loc(1), SemValue::ff())].into()).unwrap();
        let c = compose_init(&i1, &i2);
        assert_eq!(*c.inj(), Injection::inclusion(&World::empty(), &w(2)).unwrap());
        assert_eq!(c.data().contents, BTreeMap::from([(Loc(0), SemValue::tt()), (Loc(1), SemValue::ff())]));
        assert_eq!(compose_init(&Initialisation::identity(&World::empty()), &i1), i1);
        assert_eq!(compose_init(&i1, &Initialisation::identity(&w(1))), i1);
    }

    #[test]
    fn stores_action_is_composition_from_empty() {
        let s = store(&[SemValue::tt()]);
        let i = Initialisation::new(Injection::inclusion(&w(1), &w(2)).unwrap(), [(Loc(1), SemValue::ff())].into()).unwrap();
        let via_action = stores_action(&i, &s);
        let via_compose = Store::from_heaplet(compose_init(&s.as_init(), &i).data().clone()).unwrap();
        assert_eq!(via_action, via_compose);
        assert_eq!(stores_action(&Initialisation::identity(&w(1)), &s), s);
    }

    #[test]
    fn promote_along_identity() {
        let i = Initialisation::new(Injection::inclusion(&w(1), &w(2)).unwrap(), [(Loc(1), SemValue::ff())].into()).unwrap();
        let (p, back) = promote(&Injection::identity(&w(1)), &i);
        // equal to `i` up to the renaming `back` of its codomain
        assert!(back.is_iso());
        assert_eq!(back.after(i.inj()), *p.inj());
        for (l, v) in &i.data().contents {
            assert_eq!(p.data().contents[&back.apply(*l)], v.push(&back));
        }
        assert_eq!(p.data().contents.len(), i.data().contents.len());
    }

    #[test]
    fn gc_drops_unreachable_private_cell() {
        let r = CoendRep::new(Injection::inclusion(&World::empty(), &w(1)).unwrap(), SemValue::Star, store(&[SemValue::tt()]));
        let g = r.gc_canonical();
        assert!(g.world().is_empty());
        assert_eq!(g.payload, SemValue::Star);
        let bare = CoendRep::pure(SemValue::tt(), store(&[SemValue::ff()]));
        assert_eq!(bare.gc_canonical(), bare);
    }

    #[test]
    fn equal_up_to_private_renaming() {
        // payload points at a private cell living at #1 in one and #2 in the other
        let base = w(1);
        let big = w(3);
        let s1 = Store::new(big.clone(), [(Loc(0), SemValue::tt()), (Loc(1), SemValue::ff()), (Loc(2), SemValue::tt())].into());
        let s2 = Store::new(big.clone(), [(Loc(0), SemValue::tt()), (Loc(1), SemValue::tt()), (Loc(2), SemValue::ff())].into());
        let inc = Injection::inclusion(&base, &big).unwrap();
        let r1 = CoendRep::new(inc.clone(), SemValue::Loc(Loc(1)), s1);
        let r2 = CoendRep::new(inc.clone(), SemValue::Loc(Loc(2)), s2.clone());
        assert!(coend_equal(&r1, &r2).unwrap());
        assert_eq!(r1.gc_canonical(), r2.gc_canonical());
        let r3 = CoendRep::new(inc, SemValue::Loc(Loc(1)), s2);
        assert!(!coend_equal(&r1, &r3).unwrap());
    }

    #[test]
    fn public_mismatch_is_unequal() {
        let a = CoendRep::pure(SemValue::Star, store(&[SemValue::tt()]));
        let b = CoendRep::pure(SemValue::Star, store(&[SemValue::ff()]));
        assert!(!coend_equal(&a, &b).unwrap());
        let c = CoendRep::pure(SemValue::Star, Store::empty());
        assert_eq!(coend_equal(&a, &c), Err(SemError::BaseMismatch));
    }

    #[test]
    fn enumerate_store_count() {
        let sig = Signature::constant_bool();
        assert_eq!(enumerate_stores(&sig, &w(3)).len(), 8);
        assert_eq!(enumerate_stores(&sig, &World::empty()).len(), 1);
    }

    #[test]
    fn minit_places_data_on_the_right() {
        let i = minit(&w(1), &w(1), &[(Loc(0), SemValue::inj(Side::Second, SemValue::Star))].into());
        assert_eq!(*i.cod(), w(2));
        assert_eq!(i.data().contents, BTreeMap::from([(Loc(1), SemValue::ff())]));
    }
}
