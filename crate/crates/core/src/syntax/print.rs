use std::fmt::{self, Write};

use super::{Side, Term, Type};

/// Writes a type; `prec` is 0 for arrows, 1 for sums, 2 for products, 3 for atoms.
pub fn write_type(f: &mut impl Write, ty: &Type, prec: u8) -> fmt::Result {
    if *ty == Type::bool() {
        return f.write_str("bool");
    }
    match ty {
        Type::Empty => f.write_str("0"),
        Type::Unit => f.write_str("1"),
        Type::Ref(s) => write!(f, "ref {s}"),
        Type::Arrow(a, b) => paren(f, prec > 0, |f| {
            write_type(f, a, 1)?;
            f.write_str(" -> ")?;
            write_type(f, b, 0)
        }),
        Type::Sum(a, b) => paren(f, prec > 1, |f| {
            write_type(f, a, 2)?;
            f.write_str(" + ")?;
            write_type(f, b, 1)
        }),
        Type::Product(a, b) => paren(f, prec > 2, |f| {
            write_type(f, a, 3)?;
            f.write_str(" * ")?;
            write_type(f, b, 2)
        }),
    }
}

fn paren<W: Write>(f: &mut W, wrap: bool, body: impl FnOnce(&mut W) -> fmt::Result) -> fmt::Result {
    if wrap {
        f.write_char('(')?;
    }
    body(f)?;
    if wrap {
        f.write_char(')')?;
    }
    Ok(())
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, 0).expect("writing to a String cannot fail");
    s
}

/// Binding forms whose last component extends as far right as possible.
fn open_ended(t: &Term) -> bool {
    matches!(
        t,
        Term::Fun(..) | Term::MatchEmpty(..) | Term::MatchSum(..) | Term::MatchProd(..) | Term::New(..) | Term::Assign(..)
    ) || matches!(t, Term::App(f, _) if matches!(**f, Term::Fun(..)))
}

// lvl 0: anywhere; 1: function position or a non-final slot; 2: argument of an application or prefix.
fn write_term(f: &mut String, t: &Term, lvl: u8) -> fmt::Result {
    if open_ended(t) && lvl > 0 {
        f.push('(');
        write_term(f, t, 0)?;
        f.push(')');
        return Ok(());
    }
    match t {
        Term::Loc(l) => write!(f, "{l}"),
        Term::Var(x) => f.write_str(x),
        Term::Star => f.write_str("()"),
        Term::Inj(Side::First, inner) if **inner == Term::Star => f.write_str("true"),
        Term::Inj(Side::Second, inner) if **inner == Term::Star => f.write_str("false"),
        Term::Inj(side, inner) => {
            write!(f, "inj{} ", side.index())?;
            write_term(f, inner, 2)
        }
        Term::Deref(inner) => {
            f.push('!');
            write_term(f, inner, 2)
        }
        Term::Pair(a, b) => {
            f.push('(');
            write_term(f, a, 0)?;
            f.push_str(", ");
            write_term(f, b, 0)?;
            f.push(')');
            Ok(())
        }
        Term::App(fun, arg) => match &**fun {
            Term::Fun(x, ty, body) => {
                write!(f, "let {x} : ")?;
                write_type(f, ty, 0)?;
                f.push_str(" = ");
                write_term(f, arg, 0)?;
                f.push_str(" in ");
                write_term(f, body, 0)
            }
            _ => paren(f, lvl > 1, |f| {
                write_term(f, fun, 1)?;
                f.push(' ');
                write_term(f, arg, 2)
            }),
        },
        Term::Fun(x, ty, body) => {
            write!(f, "fun ({x} : ")?;
            write_type(f, ty, 0)?;
            f.push_str(") -> ");
            write_term(f, body, 0)
        }
        Term::MatchEmpty(scrut, ty) => {
            f.push_str("match ");
            write_term(f, scrut, 1)?;
            f.push_str(" with {} : ");
            write_type(f, ty, 0)
        }
        Term::MatchSum(scrut, x1, t1, x2, t2) => {
            f.push_str("match ");
            write_term(f, scrut, 1)?;
            write!(f, " with inj1 {x1} -> ")?;
            write_term(f, t1, 1)?;
            write!(f, " | inj2 {x2} -> ")?;
            write_term(f, t2, 0)
        }
        Term::MatchProd(scrut, x1, x2, body) => {
            f.push_str("match ");
            write_term(f, scrut, 1)?;
            write!(f, " with ({x1}, {x2}) -> ")?;
            write_term(f, body, 0)
        }
        Term::Assign(r, v) => {
            write_term(f, r, 1)?;
            f.push_str(" := ");
            write_term(f, v, 0)
        }
        Term::New(binders, body) => {
            f.push_str("new {");
            for (i, b) in binders.iter().enumerate() {
                if i > 0 {
                    f.push_str(", ");
                }
                write!(f, "{} : {} = ", b.name, b.sort)?;
                write_term(f, &b.init, 0)?;
            }
            f.push_str("} in ");
            write_term(f, body, 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Sort;
    use crate::syntax::Binder;

    #[test]
    fn atoms() {
        assert_eq!(print_term(&Term::Star), "()");
        assert_eq!(print_term(&Term::deref(Term::loc(0))), "!#0");
        assert_eq!(print_term(&Term::tt()), "true");
    }

    #[test]
    fn application_and_prefix() {
        let t = Term::app(Term::app(Term::var("f"), Term::deref(Term::var("x"))), Term::app(Term::var("g"), Term::Star));
        assert_eq!(print_term(&t), "f !x (g ())");
        assert_eq!(print_term(&Term::deref(Term::app(Term::var("f"), Term::Star))), "!(f ())");
    }

    #[test]
    fn nested_match_in_first_arm_is_wrapped() {
        let inner = Term::MatchSum(
            Box::new(Term::var("y")),
            "a".into(),
            Box::new(Term::Star),
            "b".into(),
            Box::new(Term::Star),
        );
        let t = Term::MatchSum(Box::new(Term::var("x")), "y".into(), Box::new(inner), "z".into(), Box::new(Term::Star));
        assert_eq!(
            print_term(&t),
            "match x with inj1 y -> (match y with inj1 a -> () | inj2 b -> ()) | inj2 z -> ()"
        );
    }

    #[test]
    fn types() {
        let ty = Type::arrow(Type::product(Type::sum(Type::Unit, Type::Empty), Type::Ref(Sort::new("d"))), Type::bool());
        let mut s = String::new();
        write_type(&mut s, &ty, 0).unwrap();
        assert_eq!(s, "(1 + 0) * ref d -> bool");
    }

    #[test]
    fn new_and_let() {
        let t = Term::New(
            vec![Binder { name: "x".into(), sort: Sort::new("d"), init: Term::tt() }],
            Box::new(Term::let_in("y", Type::bool(), Term::deref(Term::var("x")), Term::var("y"))),
        );
        assert_eq!(print_term(&t), "new {x : d = true} in let y : bool = !x in y");
    }
}
