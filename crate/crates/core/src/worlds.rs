//! Worlds (heap layouts), injections between them, and semantic values of
//! full ground types interpreted at a world.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::signature::{GroundType, Signature, Sort};
use crate::syntax::{Ident, Loc, Side, Term, Type};

/// A finite map from locations to cell sorts. Also serves as a heap layout.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World(BTreeMap<Loc, Sort>);

impl World {
    pub fn empty() -> World {
        World(BTreeMap::new())
    }

    /// `#0 .. #(n-1)` carrying the given sorts in order.
    pub fn contiguous<'a>(sorts: impl IntoIterator<Item = &'a Sort>) -> World {
        World(sorts.into_iter().enumerate().map(|(i, s)| (Loc(i as u32), s.clone())).collect())
    }

    pub fn insert(&mut self, l: Loc, s: Sort) -> Option<Sort> {
        self.0.insert(l, s)
    }

    pub fn remove(&mut self, l: Loc) -> Option<Sort> {
        self.0.remove(&l)
    }

    pub fn get(&self, l: Loc) -> Option<&Sort> {
        self.0.get(&l)
    }

    pub fn contains(&self, l: Loc) -> bool {
        self.0.contains_key(&l)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cells in ascending location order.
    pub fn iter(&self) -> impl Iterator<Item = (Loc, &Sort)> + '_ {
        self.0.iter().map(|(l, s)| (*l, s))
    }

    pub fn locs(&self) -> impl Iterator<Item = Loc> + '_ {
        self.0.keys().copied()
    }

    /// `⌈w⌉`: one past the largest index in use.
    pub fn numof(&self) -> u32 {
        self.0.keys().next_back().map_or(0, |l| l.0 + 1)
    }

    pub fn is_contiguous(&self) -> bool {
        self.numof() as usize == self.len()
    }

    /// `self ≤ other`: `other` agrees with `self` on every cell of `self`.
    pub fn extended_by(&self, other: &World) -> bool {
        self.0.iter().all(|(l, s)| other.get(*l) == Some(s))
    }

    /// The sub-world on the given locations.
    pub fn restrict(&self, keep: &BTreeSet<Loc>) -> World {
        World(self.0.iter().filter(|(l, _)| keep.contains(l)).map(|(l, s)| (*l, s.clone())).collect())
    }

    /// The `n` smallest indices not in use, ascending.
    pub fn fresh(&self, n: usize) -> Vec<Loc> {
        (0u32..).map(Loc).filter(|l| !self.contains(*l)).take(n).collect()
    }

    pub fn count_sort(&self, s: &Sort) -> usize {
        self.0.values().filter(|t| *t == s).count()
    }
}

impl FromIterator<(Loc, Sort)> for World {
    fn from_iter<I: IntoIterator<Item = (Loc, Sort)>>(iter: I) -> World {
        World(iter.into_iter().collect())
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, s)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}:{s}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A sort-preserving injection between worlds.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Injection {
    dom: World,
    cod: World,
    map: BTreeMap<Loc, Loc>,
}

impl Injection {
    /// Checks totality on `dom`, injectivity and sort preservation.
    pub fn new(dom: World, cod: World, map: BTreeMap<Loc, Loc>) -> Option<Injection> {
        if map.len() != dom.len() {
            return None;
        }
        let mut image = BTreeSet::new();
        for (l, s) in dom.iter() {
            let t = *map.get(&l)?;
            if cod.get(t) != Some(s) || !image.insert(t) {
                return None;
            }
        }
        Some(Injection { dom, cod, map })
    }

    pub fn identity(w: &World) -> Injection {
        Injection { dom: w.clone(), cod: w.clone(), map: w.locs().map(|l| (l, l)).collect() }
    }

    /// The inclusion `w ≤ w'`, identity on indices.
    pub fn inclusion(w: &World, w2: &World) -> Option<Injection> {
        w.extended_by(w2).then(|| Injection { dom: w.clone(), cod: w2.clone(), map: w.locs().map(|l| (l, l)).collect() })
    }

    pub fn dom(&self) -> &World {
        &self.dom
    }

    pub fn cod(&self) -> &World {
        &self.cod
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Loc, Loc)> + '_ {
        self.map.iter().map(|(a, b)| (*a, *b))
    }

    pub fn get(&self, l: Loc) -> Option<Loc> {
        self.map.get(&l).copied()
    }

    /// Applies the injection. Panics outside the domain.
    pub fn apply(&self, l: Loc) -> Loc {
        match self.map.get(&l) {
            Some(t) => *t,
            None => panic!("location {l} is not in the domain {}", self.dom),
        }
    }

    pub fn image(&self) -> BTreeSet<Loc> {
        self.map.values().copied().collect()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Injection) -> Injection {
        debug_assert_eq!(first.cod, self.dom, "composing injections with mismatched worlds");
        Injection {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            map: first.map.iter().map(|(a, b)| (*a, self.apply(*b))).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.map.iter().all(|(a, b)| a == b)
    }

    pub fn is_iso(&self) -> bool {
        self.dom.len() == self.cod.len()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<Injection> {
        self.is_iso().then(|| Injection {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            map: self.map.iter().map(|(a, b)| (*b, *a)).collect(),
        })
    }

    /// Replaces the codomain by a larger world containing it.
    pub fn widen(&self, cod: &World) -> Injection {
        debug_assert!(self.cod.extended_by(cod));
        Injection { dom: self.dom.clone(), cod: cod.clone(), map: self.map.clone() }
    }

    pub fn loc_map(&self) -> &BTreeMap<Loc, Loc> {
        &self.map
    }
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [", self.dom, self.cod)?;
        for (i, (a, b)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `w1 ⊕ w2` with its two coprojections.
pub fn indep_coproduct(w1: &World, w2: &World) -> (World, Injection, Injection) {
    let shift = w1.numof();
    let mut sum = w1.clone();
    let mut right = BTreeMap::new();
    for (l, s) in w2.iter() {
        let t = Loc(shift + l.0);
        sum.insert(t, s.clone());
        right.insert(l, t);
    }
    let i1 = Injection::inclusion(w1, &sum).expect("w1 sits inside w1 ⊕ w2");
    let i2 = Injection { dom: w2.clone(), cod: sum.clone(), map: right };
    (sum, i1, i2)
}

/// The inclusion of `cod h ⊖ h`, the locations `h` misses.
pub fn complement(h: &Injection) -> Injection {
    let image = h.image();
    let rest: World = h.cod.iter().filter(|(l, _)| !image.contains(l)).map(|(l, s)| (l, s.clone())).collect();
    Injection::inclusion(&rest, &h.cod).expect("a sub-world is included in its parent")
}

/// `h1 ⊕' h2 = w ⊕ (w1 ⊖ h1) ⊕ (w2 ⊖ h2)` for `h1: w → w1`, `h2: w → w2`,
/// with `p1: w1 → L`, `p2: w2 → L` satisfying `p1 ∘ h1 = p2 ∘ h2`.
#[derive(Clone, Debug)]
pub struct LocalCoproduct {
    pub world: World,
    pub p1: Injection,
    pub p2: Injection,
}

pub fn local_coproduct(h1: &Injection, h2: &Injection) -> LocalCoproduct {
    assert_eq!(h1.dom, h2.dom, "local coproduct needs a shared domain");
    let w = &h1.dom;
    let c1 = complement(h1);
    let c2 = complement(h2);
    let (wc1, j1, j2) = indep_coproduct(w, c1.dom());
    let (world, k1, k2) = indep_coproduct(&wc1, c2.dom());
    let back1: BTreeMap<Loc, Loc> = h1.map.iter().map(|(a, b)| (*b, *a)).collect();
    let back2: BTreeMap<Loc, Loc> = h2.map.iter().map(|(a, b)| (*b, *a)).collect();
    let p1 = h1
        .cod
        .locs()
        .map(|l| match back1.get(&l) {
            Some(x) => (l, k1.apply(j1.apply(*x))),
            None => (l, k1.apply(j2.apply(l))),
        })
        .collect();
    let p2 = h2
        .cod
        .locs()
        .map(|l| match back2.get(&l) {
            Some(x) => (l, k1.apply(j1.apply(*x))),
            None => (l, k2.apply(l)),
        })
        .collect();
    LocalCoproduct {
        p1: Injection { dom: h1.cod.clone(), cod: world.clone(), map: p1 },
        p2: Injection { dom: h2.cod.clone(), cod: world.clone(), map: p2 },
        world,
    }
}

/// All sort-preserving injections `dom → cod`, in lexicographic order of images.
pub fn injections(dom: &World, cod: &World) -> Vec<Injection> {
    let src: Vec<(Loc, &Sort)> = dom.iter().collect();
    let mut out = Vec::new();
    let mut chosen: Vec<Loc> = Vec::new();
    fn go(
        src: &[(Loc, &Sort)],
        dom: &World,
        cod: &World,
        chosen: &mut Vec<Loc>,
        out: &mut Vec<Injection>,
    ) {
        if chosen.len() == src.len() {
            let map = src.iter().map(|(l, _)| *l).zip(chosen.iter().copied()).collect();
            out.push(Injection { dom: dom.clone(), cod: cod.clone(), map });
            return;
        }
        let want = src[chosen.len()].1;
        for (t, s) in cod.iter() {
            if s == want && !chosen.contains(&t) {
                chosen.push(t);
                go(src, dom, cod, chosen, out);
                chosen.pop();
            }
        }
    }
    go(&src, dom, cod, &mut chosen, &mut out);
    out
}

pub fn isomorphisms(w1: &World, w2: &World) -> Vec<Injection> {
    if w1.len() != w2.len() {
        return Vec::new();
    }
    injections(w1, w2)
}

/// Every contiguous world with at most `max_cells` cells, by size then by
/// sort assignment in declaration order.
pub fn enumerate_worlds(sig: &Signature, max_cells: usize) -> Vec<World> {
    let sorts: Vec<&Sort> = sig.sorts().collect();
    let mut out = vec![World::empty()];
    if sorts.is_empty() {
        return out;
    }
    let mut layer: Vec<Vec<&Sort>> = vec![Vec::new()];
    for _ in 0..max_cells {
        let mut next = Vec::new();
        for prefix in &layer {
            for s in &sorts {
                let mut p = prefix.clone();
                p.push(*s);
                next.push(p);
            }
        }
        out.extend(next.iter().map(|p| World::contiguous(p.iter().copied())));
        layer = next;
    }
    out
}

/// A function value: an abstraction together with the images of its location
/// literals and the values of its free identifiers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Closure {
    pub param: Ident,
    pub param_ty: Type,
    pub body: Arc<Term>,
    /// Location literal in `body` ↦ the location it denotes at the current world.
    pub locenv: BTreeMap<Loc, Loc>,
    pub env: Vec<(Ident, SemValue)>,
}

impl Closure {
    pub fn push(&self, f: &impl Fn(Loc) -> Loc) -> Closure {
        Closure {
            param: self.param.clone(),
            param_ty: self.param_ty.clone(),
            body: self.body.clone(),
            locenv: self.locenv.iter().map(|(a, b)| (*a, f(*b))).collect(),
            env: self.env.iter().map(|(x, v)| (x.clone(), v.map_locs(f))).collect(),
        }
    }
}

/// Elements of `⟦τ⟧w`. `Tuple` packages several values, e.g. an environment.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum SemValue {
    Star,
    Inj(Side, Box<SemValue>),
    Pair(Box<SemValue>, Box<SemValue>),
    Loc(Loc),
    Tuple(Vec<SemValue>),
    Closure(Arc<Closure>),
}

impl SemValue {
    pub fn tt() -> SemValue {
        SemValue::Inj(Side::First, Box::new(SemValue::Star))
    }

    pub fn ff() -> SemValue {
        SemValue::Inj(Side::Second, Box::new(SemValue::Star))
    }

    pub fn inj(side: Side, v: SemValue) -> SemValue {
        SemValue::Inj(side, Box::new(v))
    }

    pub fn pair(a: SemValue, b: SemValue) -> SemValue {
        SemValue::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            SemValue::Inj(Side::First, v) if **v == SemValue::Star => Some(true),
            SemValue::Inj(Side::Second, v) if **v == SemValue::Star => Some(false),
            _ => None,
        }
    }

    pub fn as_loc(&self) -> Option<Loc> {
        match self {
            SemValue::Loc(l) => Some(*l),
            _ => None,
        }
    }

    pub fn map_locs(&self, f: &impl Fn(Loc) -> Loc) -> SemValue {
        match self {
            SemValue::Star => SemValue::Star,
            SemValue::Loc(l) => SemValue::Loc(f(*l)),
            SemValue::Inj(s, v) => SemValue::Inj(*s, Box::new(v.map_locs(f))),
            SemValue::Pair(a, b) => SemValue::pair(a.map_locs(f), b.map_locs(f)),
            SemValue::Tuple(vs) => SemValue::Tuple(vs.iter().map(|v| v.map_locs(f)).collect()),
            SemValue::Closure(c) => SemValue::Closure(Arc::new(c.push(f))),
        }
    }

    /// The covariant action along an injection.
    pub fn push(&self, h: &Injection) -> SemValue {
        self.map_locs(&|l| h.apply(l))
    }

    /// Locations occurring in the value, left to right, repetitions kept.
    pub fn locs(&self, out: &mut Vec<Loc>) {
        match self {
            SemValue::Star => {}
            SemValue::Loc(l) => out.push(*l),
            SemValue::Inj(_, v) => v.locs(out),
            SemValue::Pair(a, b) => {
                a.locs(out);
                b.locs(out);
            }
            SemValue::Tuple(vs) => vs.iter().for_each(|v| v.locs(out)),
            SemValue::Closure(c) => {
                out.extend(c.locenv.values().copied());
                c.env.iter().for_each(|(_, v)| v.locs(out));
            }
        }
    }

    pub fn loc_list(&self) -> Vec<Loc> {
        let mut out = Vec::new();
        self.locs(&mut out);
        out
    }

    /// Membership in `⟦γ⟧w`.
    pub fn inhabits(&self, gamma: &GroundType, w: &World) -> bool {
        match (gamma, self) {
            (GroundType::Unit, SemValue::Star) => true,
            (GroundType::Ref(k), SemValue::Loc(l)) => w.get(*l) == Some(k),
            (GroundType::Sum(a, _), SemValue::Inj(Side::First, v)) => v.inhabits(a, w),
            (GroundType::Sum(_, b), SemValue::Inj(Side::Second, v)) => v.inhabits(b, w),
            (GroundType::Product(a, b), SemValue::Pair(x, y)) => x.inhabits(a, w) && y.inhabits(b, w),
            _ => false,
        }
    }
}

impl fmt::Display for SemValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(b) = self.as_bool() {
            return write!(f, "{b}");
        }
        match self {
            SemValue::Star => f.write_str("()"),
            SemValue::Loc(l) => write!(f, "{l}"),
            SemValue::Inj(s, v) => match **v {
                SemValue::Inj(..) | SemValue::Closure(_) if v.as_bool().is_none() => write!(f, "inj{} ({v})", s.index()),
                _ => write!(f, "inj{} {v}", s.index()),
            },
            SemValue::Pair(a, b) => write!(f, "({a}, {b})"),
            SemValue::Tuple(vs) => {
                f.write_str("[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            SemValue::Closure(c) => {
                write!(f, "<fun ({} : {}) -> {}", c.param, c.param_ty, c.body)?;
                if !c.locenv.is_empty() {
                    f.write_str(" with")?;
                    for (a, b) in &c.locenv {
                        write!(f, " {a}={b}")?;
                    }
                }
                for (x, v) in &c.env {
                    write!(f, " {x}={v}")?;
                }
                f.write_str(">")
            }
        }
    }
}

impl fmt::Debug for SemValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The finite set `⟦γ⟧w`, in a fixed order.
pub fn interp_type(gamma: &GroundType, w: &World) -> Vec<SemValue> {
    match gamma {
        GroundType::Empty => Vec::new(),
        GroundType::Unit => vec![SemValue::Star],
        GroundType::Ref(k) => w.iter().filter(|(_, s)| *s == k).map(|(l, _)| SemValue::Loc(l)).collect(),
        GroundType::Sum(a, b) => {
            let mut out: Vec<SemValue> = interp_type(a, w).into_iter().map(|v| SemValue::inj(Side::First, v)).collect();
            out.extend(interp_type(b, w).into_iter().map(|v| SemValue::inj(Side::Second, v)));
            out
        }
        GroundType::Product(a, b) => {
            let bs = interp_type(b, w);
            let mut out = Vec::new();
            for x in interp_type(a, w) {
                for y in &bs {
                    out.push(SemValue::pair(x.clone(), y.clone()));
                }
            }
            out
        }
    }
}

/// `|⟦γ⟧w|` without building the set.
pub fn interp_size(gamma: &GroundType, w: &World) -> usize {
    match gamma {
        GroundType::Empty => 0,
        GroundType::Unit => 1,
        GroundType::Ref(k) => w.count_sort(k),
        GroundType::Sum(a, b) => interp_size(a, w) + interp_size(b, w),
        GroundType::Product(a, b) => interp_size(a, w) * interp_size(b, w),
    }
}

/// `⟦γ⟧h v`. For full ground types the action only renames locations.
pub fn interp_action(_gamma: &GroundType, h: &Injection, v: &SemValue) -> SemValue {
    v.push(h)
}

/// Cell contents for a sort at a world.
pub fn cell_values(sig: &Signature, sort: &Sort, w: &World) -> Vec<SemValue> {
    interp_type(sig.typeof_sort(sort), w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Sort {
        Sort::new("d")
    }
    fn c() -> Sort {
        Sort::new("c")
    }
    fn w(cells: &[(u32, Sort)]) -> World {
        cells.iter().map(|(i, s)| (Loc(*i), s.clone())).collect()
    }

    #[test]
    fn numof_examples() {
        assert_eq!(World::empty().numof(), 0);
        assert_eq!(w(&[(0, d()), (2, d())]).numof(), 3);
        assert_eq!(w(&[(5, d())]).numof(), 6);
    }

    #[test]
    fn coproduct_examples() {
        let (sum, i1, i2) = indep_coproduct(&w(&[(0, d())]), &w(&[(0, d())]));
        assert_eq!(sum, w(&[(0, d()), (1, d())]));
        assert_eq!(i1.apply(Loc(0)), Loc(0));
        assert_eq!(i2.apply(Loc(0)), Loc(1));

        let (_, _, i2) = indep_coproduct(&w(&[(0, d()), (2, c())]), &w(&[(1, d())]));
        assert_eq!(i2.apply(Loc(1)), Loc(4));

        let x = w(&[(0, d()), (1, c())]);
        let (sum, _, i2) = indep_coproduct(&World::empty(), &x);
        assert_eq!(sum, x);
        assert!(i2.is_identity());
    }

    #[test]
    fn complement_examples() {
        let x = w(&[(0, d()), (1, c())]);
        assert!(complement(&Injection::identity(&x)).dom().is_empty());
        let h = Injection::inclusion(&w(&[(0, d())]), &x).unwrap();
        assert_eq!(*complement(&h).dom(), w(&[(1, c())]));
        let (_, i1, _) = indep_coproduct(&x, &w(&[(0, d()), (1, d()), (2, c())]));
        assert_eq!(complement(&i1).dom().len(), 3);
    }

    #[test]
    fn local_coproduct_of_two_fresh_cells() {
        let e = World::empty();
        let h1 = Injection::inclusion(&e, &w(&[(0, d())])).unwrap();
        let h2 = Injection::inclusion(&e, &w(&[(0, c())])).unwrap();
        let lc = local_coproduct(&h1, &h2);
        assert_eq!(lc.world, w(&[(0, d()), (1, c())]));
        assert_eq!(lc.p1.apply(Loc(0)), Loc(0));
        assert_eq!(lc.p2.apply(Loc(0)), Loc(1));
    }

    #[test]
    fn local_coproduct_of_identities_is_trivial() {
        let x = w(&[(0, d()), (1, c())]);
        let id = Injection::identity(&x);
        let lc = local_coproduct(&id, &id);
        assert_eq!(lc.world, x);
        assert!(lc.p1.is_identity() && lc.p2.is_identity());
    }

    #[test]
    fn interp_examples() {
        let x = w(&[(0, d()), (1, c())]);
        assert_eq!(interp_type(&GroundType::Ref(d()), &x), vec![SemValue::Loc(Loc(0))]);
        assert_eq!(interp_type(&GroundType::bool(), &x), vec![SemValue::tt(), SemValue::ff()]);
        let cc = w(&[(0, c()), (1, c())]);
        let prod = GroundType::product(GroundType::Ref(c()), GroundType::Ref(c()));
        assert_eq!(interp_type(&prod, &cc).len(), 4);
        assert_eq!(interp_size(&prod, &cc), 4);
    }

    #[test]
    fn action_on_refs() {
        let src = w(&[(0, d())]);
        let dst = w(&[(0, c()), (3, d())]);
        let h = Injection::new(src, dst, [(Loc(0), Loc(3))].into()).unwrap();
        assert_eq!(interp_action(&GroundType::Ref(d()), &h, &SemValue::Loc(Loc(0))), SemValue::Loc(Loc(3)));
    }

    #[test]
    fn enumerate_counts() {
        let one = Signature::constant_bool();
        assert_eq!(enumerate_worlds(&one, 1), vec![World::empty(), w(&[(0, d())])]);
        let two = Signature::validate(vec![(d(), GroundType::Unit), (c(), GroundType::Unit)]).unwrap();
        assert_eq!(enumerate_worlds(&two, 1).len(), 3);
        assert_eq!(enumerate_worlds(&two, 2).len(), 7);
    }

    #[test]
    fn no_codiagonal() {
        let x = w(&[(0, d())]);
        let (sum, _, _) = indep_coproduct(&x, &x);
        assert!(injections(&sum, &x).is_empty());
    }

    #[test]
    fn fresh_smallest_first() {
        assert_eq!(w(&[(0, d()), (2, d())]).fresh(2), vec![Loc(1), Loc(3)]);
        assert_eq!(World::empty().fresh(1), vec![Loc(0)]);
        assert_eq!(w(&[(0, d())]).fresh(1), vec![Loc(1)]);
    }

    #[test]
    fn new_rejects_sort_change() {
        let h = Injection::new(w(&[(0, d())]), w(&[(0, c())]), [(Loc(0), Loc(0))].into());
        assert!(h.is_none());
    }
}
