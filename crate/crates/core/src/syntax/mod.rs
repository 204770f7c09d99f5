//! Abstract syntax of the calculus, its concrete grammar, desugaring,
//! printing and alpha-equivalence.

pub mod alpha;
pub mod desugar;
pub mod lexer;
pub mod parser;
pub mod print;

use std::collections::BTreeSet;
use std::fmt;

use crate::signature::{GroundType, Sort};

pub use alpha::alpha_eq;
pub use desugar::{desugar, Surface, SurfaceBinder};
pub use parser::{parse_core_term, parse_program, parse_signature, parse_term, parse_type, parse_value_in, Program};
pub use print::print_term;

pub type Ident = String;

/// A memory location `#n`. The enumeration of locations is the identity on indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc(pub u32);

impl Loc {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Ref(Sort),
    Empty,
    Sum(Box<Type>, Box<Type>),
    Unit,
    Product(Box<Type>, Box<Type>),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn bool() -> Type {
        Type::sum(Type::Unit, Type::Unit)
    }

    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: Type, b: Type) -> Type {
        Type::Product(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    /// The full ground type this denotes, if it has no arrows.
    pub fn as_ground(&self) -> Option<GroundType> {
        Some(match self {
            Type::Ref(s) => GroundType::Ref(s.clone()),
            Type::Empty => GroundType::Empty,
            Type::Unit => GroundType::Unit,
            Type::Sum(a, b) => GroundType::sum(a.as_ground()?, b.as_ground()?),
            Type::Product(a, b) => GroundType::product(a.as_ground()?, b.as_ground()?),
            Type::Arrow(..) => return None,
        })
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Ref(_) | Type::Empty | Type::Unit => true,
            Type::Sum(a, b) | Type::Product(a, b) => a.is_ground() && b.is_ground(),
            Type::Arrow(..) => false,
        }
    }

    /// Built from `0`, `1`, `+` and `*` only: interpreted by a constant functor.
    pub fn is_constant(&self) -> bool {
        match self {
            Type::Empty | Type::Unit => true,
            Type::Sum(a, b) | Type::Product(a, b) => a.is_constant() && b.is_constant(),
            Type::Ref(_) | Type::Arrow(..) => false,
        }
    }

    pub fn sorts(&self, out: &mut BTreeSet<Sort>) {
        match self {
            Type::Ref(s) => {
                out.insert(s.clone());
            }
            Type::Empty | Type::Unit => {}
            Type::Sum(a, b) | Type::Product(a, b) | Type::Arrow(a, b) => {
                a.sorts(out);
                b.sorts(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Type::Ref(_) | Type::Empty | Type::Unit => 1,
            Type::Sum(a, b) | Type::Product(a, b) | Type::Arrow(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl From<&GroundType> for Type {
    fn from(g: &GroundType) -> Type {
        match g {
            GroundType::Empty => Type::Empty,
            GroundType::Unit => Type::Unit,
            GroundType::Ref(s) => Type::Ref(s.clone()),
            GroundType::Sum(a, b) => Type::sum(Type::from(&**a), Type::from(&**b)),
            GroundType::Product(a, b) => Type::product(Type::from(&**a), Type::from(&**b)),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_type(f, self, 0)
    }
}

/// Which summand an injection targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::First => 1,
            Side::Second => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: Ident,
    pub sort: Sort,
    pub init: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Loc(Loc),
    Var(Ident),
    Inj(Side, Box<Term>),
    Star,
    Pair(Box<Term>, Box<Term>),
    Fun(Ident, Type, Box<Term>),
    /// `match t with {} : τ`
    MatchEmpty(Box<Term>, Type),
    /// `match t with inj1 x1 -> t1 | inj2 x2 -> t2`
    MatchSum(Box<Term>, Ident, Box<Term>, Ident, Box<Term>),
    /// `match t with (x1, x2) -> t'`
    MatchProd(Box<Term>, Ident, Ident, Box<Term>),
    App(Box<Term>, Box<Term>),
    Assign(Box<Term>, Box<Term>),
    Deref(Box<Term>),
    New(Vec<Binder>, Box<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn loc(n: u32) -> Term {
        Term::Loc(Loc(n))
    }

    pub fn inj(side: Side, t: Term) -> Term {
        Term::Inj(side, Box::new(t))
    }

    pub fn tt() -> Term {
        Term::inj(Side::First, Term::Star)
    }

    pub fn ff() -> Term {
        Term::inj(Side::Second, Term::Star)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn fun(x: &str, ty: Type, body: Term) -> Term {
        Term::Fun(x.to_string(), ty, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn assign(r: Term, v: Term) -> Term {
        Term::Assign(Box::new(r), Box::new(v))
    }

    pub fn deref(r: Term) -> Term {
        Term::Deref(Box::new(r))
    }

    /// `let x : ty = bound in body`, already desugared.
    pub fn let_in(x: &str, ty: Type, bound: Term, body: Term) -> Term {
        Term::app(Term::fun(x, ty, body), bound)
    }

    /// Syntactic values: locations, identifiers, injections and pairs of values,
    /// unit and function abstractions.
    pub fn is_value(&self) -> bool {
        match self {
            Term::Loc(_) | Term::Var(_) | Term::Star | Term::Fun(..) => true,
            Term::Inj(_, t) => t.is_value(),
            Term::Pair(a, b) => a.is_value() && b.is_value(),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
        match self {
            Term::Loc(_) | Term::Star => {}
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Inj(_, t) | Term::Deref(t) | Term::MatchEmpty(t, _) => t.collect_free(bound, out),
            Term::Pair(a, b) | Term::App(a, b) | Term::Assign(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::Fun(x, _, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::MatchSum(t, x1, t1, x2, t2) => {
                t.collect_free(bound, out);
                bound.push(x1.clone());
                t1.collect_free(bound, out);
                bound.pop();
                bound.push(x2.clone());
                t2.collect_free(bound, out);
                bound.pop();
            }
            Term::MatchProd(t, x1, x2, body) => {
                t.collect_free(bound, out);
                bound.push(x1.clone());
                bound.push(x2.clone());
                body.collect_free(bound, out);
                bound.truncate(bound.len() - 2);
            }
            Term::New(binders, body) => {
                let n = binders.len();
                bound.extend(binders.iter().map(|b| b.name.clone()));
                for b in binders {
                    b.init.collect_free(bound, out);
                }
                body.collect_free(bound, out);
                bound.truncate(bound.len() - n);
            }
        }
    }

    /// Location literals occurring in the term.
    pub fn locations(&self) -> BTreeSet<Loc> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Loc(l) = t {
                out.insert(*l);
            }
        });
        out
    }

    /// Pre-order traversal of all subterms.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Loc(_) | Term::Star | Term::Var(_) => {}
            Term::Inj(_, t) | Term::Deref(t) | Term::MatchEmpty(t, _) | Term::Fun(_, _, t) => t.visit(f),
            Term::Pair(a, b) | Term::App(a, b) | Term::Assign(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::MatchSum(t, _, t1, _, t2) => {
                t.visit(f);
                t1.visit(f);
                t2.visit(f);
            }
            Term::MatchProd(t, _, _, body) => {
                t.visit(f);
                body.visit(f);
            }
            Term::New(binders, body) => {
                for b in binders {
                    b.init.visit(f);
                }
                body.visit(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Short constructor name, used by coverage statistics.
    pub fn constructor(&self) -> &'static str {
        match self {
            Term::Loc(_) => "loc",
            Term::Var(_) => "var",
            Term::Inj(..) => "inj",
            Term::Star => "unit",
            Term::Pair(..) => "pair",
            Term::Fun(..) => "fun",
            Term::MatchEmpty(..) => "match-empty",
            Term::MatchSum(..) => "match-sum",
            Term::MatchProd(..) => "match-prod",
            Term::App(..) => "app",
            Term::Assign(..) => "assign",
            Term::Deref(..) => "deref",
            Term::New(..) => "new",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

pub const CONSTRUCTORS: [&str; 13] = [
    "loc",
    "var",
    "inj",
    "unit",
    "pair",
    "fun",
    "match-empty",
    "match-sum",
    "match-prod",
    "app",
    "assign",
    "deref",
    "new",
];
