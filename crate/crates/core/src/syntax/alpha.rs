use super::{Ident, Term};

/// Equality up to consistent renaming of bound identifiers.
pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    Alpha::default().eq(t1, t2)
}

/// Each side keeps a stack of bound names; two bound occurrences agree when they
/// resolve to the same stack depth.
#[derive(Default)]
struct Alpha {
    left: Vec<Ident>,
    right: Vec<Ident>,
}

impl Alpha {
    fn lookup(stack: &[Ident], x: &str) -> Option<usize> {
        stack.iter().rposition(|y| y == x)
    }

    fn with<R>(&mut self, xs: &[&Ident], ys: &[&Ident], f: impl FnOnce(&mut Self) -> R) -> R {
        self.left.extend(xs.iter().map(|x| (*x).clone()));
        self.right.extend(ys.iter().map(|y| (*y).clone()));
        let r = f(self);
        self.left.truncate(self.left.len() - xs.len());
        self.right.truncate(self.right.len() - ys.len());
        r
    }

    fn eq(&mut self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Loc(x), Term::Loc(y)) => x == y,
            (Term::Star, Term::Star) => true,
            (Term::Var(x), Term::Var(y)) => match (Self::lookup(&self.left, x), Self::lookup(&self.right, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            },
            (Term::Inj(s1, a), Term::Inj(s2, b)) => s1 == s2 && self.eq(a, b),
            (Term::Deref(a), Term::Deref(b)) => self.eq(a, b),
            (Term::Pair(a1, a2), Term::Pair(b1, b2))
            | (Term::App(a1, a2), Term::App(b1, b2))
            | (Term::Assign(a1, a2), Term::Assign(b1, b2)) => self.eq(a1, b1) && self.eq(a2, b2),
            (Term::Fun(x, tx, a), Term::Fun(y, ty, b)) => tx == ty && self.with(&[x], &[y], |s| s.eq(a, b)),
            (Term::MatchEmpty(a, ta), Term::MatchEmpty(b, tb)) => ta == tb && self.eq(a, b),
            (Term::MatchSum(a, x1, a1, x2, a2), Term::MatchSum(b, y1, b1, y2, b2)) => {
                self.eq(a, b) && self.with(&[x1], &[y1], |s| s.eq(a1, b1)) && self.with(&[x2], &[y2], |s| s.eq(a2, b2))
            }
            (Term::MatchProd(a, x1, x2, a1), Term::MatchProd(b, y1, y2, b1)) => {
                self.eq(a, b) && self.with(&[x1, x2], &[y1, y2], |s| s.eq(a1, b1))
            }
            (Term::New(bs1, a), Term::New(bs2, b)) => {
                if bs1.len() != bs2.len() || bs1.iter().zip(bs2).any(|(p, q)| p.sort != q.sort) {
                    return false;
                }
                let xs: Vec<&Ident> = bs1.iter().map(|p| &p.name).collect();
                let ys: Vec<&Ident> = bs2.iter().map(|q| &q.name).collect();
                self.with(&xs, &ys, |s| bs1.iter().zip(bs2).all(|(p, q)| s.eq(&p.init, &q.init)) && s.eq(a, b))
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Sort;
    use crate::syntax::{Binder, Type};

    #[test]
    fn renaming_binders() {
        assert!(alpha_eq(&Term::fun("x", Type::Unit, Term::var("x")), &Term::fun("y", Type::Unit, Term::var("y"))));
        assert!(!alpha_eq(&Term::fun("x", Type::Unit, Term::var("x")), &Term::fun("x", Type::Unit, Term::Star)));
    }

    #[test]
    fn new_binds_its_names() {
        let mk = |n: &str| {
            Term::New(vec![Binder { name: n.into(), sort: Sort::new("d"), init: Term::tt() }], Box::new(Term::var(n)))
        };
        assert!(alpha_eq(&mk("a"), &mk("b")));
    }

    #[test]
    fn free_variables_must_match_by_name() {
        assert!(!alpha_eq(&Term::var("x"), &Term::var("y")));
        let capture = Term::fun("y", Type::Unit, Term::var("x"));
        let other = Term::fun("x", Type::Unit, Term::var("x"));
        assert!(!alpha_eq(&capture, &other));
    }

    #[test]
    fn shadowing() {
        let a = Term::fun("x", Type::Unit, Term::fun("x", Type::Unit, Term::var("x")));
        let b = Term::fun("y", Type::Unit, Term::fun("z", Type::Unit, Term::var("z")));
        let c = Term::fun("y", Type::Unit, Term::fun("z", Type::Unit, Term::var("y")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
    }
}
