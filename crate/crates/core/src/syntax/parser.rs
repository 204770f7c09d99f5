//! Recursive-descent parser for programs, terms and types.
//!
//! ```text
//! program := ("cell" name "=" type ";")* ("layout" "{" (#n ":" sort),* "}")? term
//! term    := expr (";" term)?
//! expr    := "fun" "(" x ":" type ")" "->" term
//!          | "let" x (":" type)? "=" term "in" term
//!          | "new" "{" (x ":" sort "=" value),+ "}" "in" term
//!          | "match" term "with" arms
//!          | app (":=" expr)?
//! app     := prefix prefix*
//! prefix  := "!" prefix | "inj1" prefix | "inj2" prefix | "ref" sort prefix | atom
//! atom    := "()" | "(" term ("," term)* ")" | #n | x | "true" | "false"
//! type    := sum ("->" type)?      sum := prod ("+" sum)?      prod := atom ("*" prod)?
//! ```

use super::desugar::{desugar, Surface, SurfaceBinder};
use super::lexer::{error_at, tokenize, Tok, Token};
use super::{Loc, Side, Term, Type};
use crate::error::{Error, ParseError};
use crate::signature::{GroundType, Signature, Sort};
use crate::typing::Context;
use crate::worlds::World;

const KEYWORDS: &[&str] = &["fun", "let", "in", "new", "match", "with", "inj1", "inj2", "ref", "true", "false"];

/// A parsed and desugared program.
#[derive(Clone, Debug)]
pub struct Program {
    pub sig: Signature,
    pub layout: World,
    pub surface: Surface,
    pub term: Term,
}

pub fn parse_program(text: &str) -> Result<Program, Error> {
    let mut p = Parser::new(text)?;
    let sig = p.signature()?;
    p.sig = sig.clone();
    let layout = if p.peek_ident("layout") { p.layout()? } else { World::empty() };
    let surface = p.term()?;
    p.expect_eof()?;
    let term = desugar(&sig, &layout, &Context::new(), &surface)?;
    Ok(Program { sig, layout, surface, term })
}

/// Parses only signature declarations.
pub fn parse_signature(text: &str) -> Result<Signature, Error> {
    let mut p = Parser::new(text)?;
    let sig = p.signature()?;
    p.expect_eof()?;
    Ok(sig)
}

/// Parses a surface term against a known signature (no declarations or layout).
pub fn parse_term(sig: &Signature, text: &str) -> Result<Surface, ParseError> {
    let mut p = Parser::new(text)?;
    p.sig = sig.clone();
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses and desugars a closed-or-open term at the given layout and context.
pub fn parse_core_term(sig: &Signature, layout: &World, ctx: &Context, text: &str) -> Result<Term, Error> {
    let s = parse_term(sig, text)?;
    Ok(desugar(sig, layout, ctx, &s)?)
}

pub fn parse_type(sig: &Signature, text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text)?;
    p.sig = sig.clone();
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a world literal such as `{#0:data, #1:list}`.
pub fn parse_world(sig: &Signature, text: &str) -> Result<World, ParseError> {
    let mut p = Parser::new(text)?;
    p.sig = sig.clone();
    let w = p.world_body()?;
    p.expect_eof()?;
    Ok(w)
}

/// Parses a store literal `{#0 = v0, #1 = v1}` into its syntactic values.
pub fn parse_store_literal(sig: &Signature, text: &str) -> Result<Vec<(Loc, Term)>, ParseError> {
    let mut p = Parser::new(text)?;
    p.sig = sig.clone();
    p.expect(Tok::LBrace, "`{`")?;
    let mut out = Vec::new();
    if !p.eat(&Tok::RBrace) {
        loop {
            let loc = p.loc()?;
            p.expect(Tok::Eq, "`=`")?;
            let at = p.offset();
            let v = p.prefix()?;
            if !v.is_value() {
                return Err(p.err_at(at, "store contents must be values"));
            }
            let v = desugar(&p.sig, &World::empty(), &Context::new(), &v).map_err(|e| p.err_at(at, e.to_string()))?;
            out.push((loc, v));
            if p.eat(&Tok::RBrace) {
                break;
            }
            p.expect(Tok::Comma, "`,` or `}`")?;
        }
    }
    p.expect_eof()?;
    Ok(out)
}

/// Parses a single syntactic value.
pub fn parse_value_in(sig: &Signature, text: &str) -> Result<Term, Error> {
    let s = parse_term(sig, text)?;
    if !s.is_value() {
        return Err(error_at(text, 0, "expected a value").into());
    }
    Ok(desugar(sig, &World::empty(), &Context::new(), &s)?)
}

struct Parser<'s> {
    src: &'s str,
    toks: Vec<Token>,
    pos: usize,
    sig: Signature,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str) -> Result<Parser<'s>, ParseError> {
        Ok(Parser { src, toks: tokenize(src)?, pos: 0, sig: Signature::empty() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn peek_ident(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_ident(&mut self, kw: &str) -> bool {
        if self.peek_ident(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err_at(&self, offset: usize, msg: impl Into<String>) -> ParseError {
        error_at(self.src, offset, msg)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        self.err_at(self.offset(), msg)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_ident(kw) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{kw}`, found {}", describe(self.peek()))))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.err(format!("unexpected {}", describe(self.peek()))))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.err(format!("expected an identifier, found {}", describe(&other)))),
        }
    }

    fn loc(&mut self) -> Result<Loc, ParseError> {
        match self.peek().clone() {
            Tok::Loc(n) => {
                self.bump();
                Ok(Loc(n))
            }
            other => Err(self.err(format!("expected a location, found {}", describe(&other)))),
        }
    }

    fn sort(&mut self) -> Result<Sort, ParseError> {
        let at = self.offset();
        let name = self.name()?;
        self.sig.lookup(&name).cloned().ok_or_else(|| self.err_at(at, format!("unknown cell sort `{name}`")))
    }

    // ---- signature and layout ----

    fn signature(&mut self) -> Result<Signature, Error> {
        let mut decls: Vec<(Sort, GroundType)> = Vec::new();
        while self.peek_ident("cell") && matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Eq {
            self.bump();
            let name = self.name()?;
            self.expect(Tok::Eq, "`=`")?;
            let at = self.offset();
            let ty = self.ty_with(false)?;
            let ground = ty.as_ground().ok_or_else(|| self.err_at(at, "cell contents must be a full ground type"))?;
            self.expect(Tok::Semi, "`;`")?;
            decls.push((Sort::new(&name), ground));
        }
        Ok(Signature::validate(decls)?)
    }

    fn layout(&mut self) -> Result<World, ParseError> {
        self.expect_keyword("layout")?;
        self.world_body()
    }

    fn world_body(&mut self) -> Result<World, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut w = World::empty();
        if self.eat(&Tok::RBrace) {
            return Ok(w);
        }
        loop {
            let at = self.offset();
            let l = self.loc()?;
            self.expect(Tok::Colon, "`:`")?;
            let s = self.sort()?;
            if w.contains(l) {
                return Err(self.err_at(at, format!("location {l} declared twice")));
            }
            w.insert(l, s);
            if self.eat(&Tok::RBrace) {
                return Ok(w);
            }
            self.expect(Tok::Comma, "`,` or `}`")?;
        }
    }

    // ---- types ----

    fn ty(&mut self) -> Result<Type, ParseError> {
        self.ty_with(true)
    }

    /// `resolve` checks sort names against the current signature; declarations
    /// parse with it off since sorts may be used before they are declared.
    fn ty_with(&mut self, resolve: bool) -> Result<Type, ParseError> {
        let lhs = self.sum_ty(resolve)?;
        if self.eat(&Tok::Arrow) {
            Ok(Type::arrow(lhs, self.ty_with(resolve)?))
        } else {
            Ok(lhs)
        }
    }

    fn sum_ty(&mut self, resolve: bool) -> Result<Type, ParseError> {
        let lhs = self.prod_ty(resolve)?;
        if self.eat(&Tok::Plus) {
            Ok(Type::sum(lhs, self.sum_ty(resolve)?))
        } else {
            Ok(lhs)
        }
    }

    fn prod_ty(&mut self, resolve: bool) -> Result<Type, ParseError> {
        let lhs = self.atom_ty(resolve)?;
        if self.eat(&Tok::Star) {
            Ok(Type::product(lhs, self.prod_ty(resolve)?))
        } else {
            Ok(lhs)
        }
    }

    fn atom_ty(&mut self, resolve: bool) -> Result<Type, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(0) => {
                self.bump();
                Ok(Type::Empty)
            }
            Tok::Num(1) => {
                self.bump();
                Ok(Type::Unit)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty_with(resolve)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(s) if s == "bool" => {
                self.bump();
                Ok(Type::bool())
            }
            Tok::Ident(s) if s == "ref" => {
                self.bump();
                if resolve {
                    Ok(Type::Ref(self.sort()?))
                } else {
                    Ok(Type::Ref(Sort::new(&self.name()?)))
                }
            }
            Tok::Ident(s) if s == "typeof" && resolve => {
                self.bump();
                let sort = self.sort()?;
                Ok(Type::from(self.sig.typeof_sort(&sort)))
            }
            other => Err(self.err_at(at, format!("expected a type, found {}", describe(&other)))),
        }
    }

    // ---- terms ----

    fn term(&mut self) -> Result<Surface, ParseError> {
        let first = self.expr()?;
        if self.eat(&Tok::Semi) {
            Ok(Surface::Seq(Box::new(first), Box::new(self.term()?)))
        } else {
            Ok(first)
        }
    }

    fn expr(&mut self) -> Result<Surface, ParseError> {
        if self.eat_ident("fun") {
            self.expect(Tok::LParen, "`(`")?;
            let x = self.name()?;
            self.expect(Tok::Colon, "`:`")?;
            let ty = self.ty()?;
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::Arrow, "`->`")?;
            let body = self.term()?;
            return Ok(Surface::Fun(x, ty, Box::new(body)));
        }
        if self.eat_ident("let") {
            let x = self.name()?;
            let ty = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
            self.expect(Tok::Eq, "`=`")?;
            let bound = self.term()?;
            self.expect_keyword("in")?;
            let body = self.term()?;
            return Ok(Surface::Let(x, ty, Box::new(bound), Box::new(body)));
        }
        if self.eat_ident("new") {
            self.expect(Tok::LBrace, "`{`")?;
            let mut binders = Vec::new();
            loop {
                let at = self.offset();
                let name = self.name()?;
                if binders.iter().any(|b: &SurfaceBinder| b.name == name) {
                    return Err(self.err_at(at, format!("duplicate binder `{name}`")));
                }
                self.expect(Tok::Colon, "`:`")?;
                let sort = self.sort()?;
                self.expect(Tok::Eq, "`=`")?;
                let vat = self.offset();
                let init = self.expr()?;
                if !init.is_value() {
                    return Err(self.err_at(vat, "allocation initialisers must be values"));
                }
                binders.push(SurfaceBinder { name, sort, init });
                if self.eat(&Tok::RBrace) {
                    break;
                }
                self.expect(Tok::Comma, "`,` or `}`")?;
            }
            self.expect_keyword("in")?;
            let body = self.term()?;
            return Ok(Surface::New(binders, Box::new(body)));
        }
        if self.eat_ident("match") {
            let scrut = self.term()?;
            self.expect_keyword("with")?;
            return self.arms(scrut);
        }
        let lhs = self.app()?;
        if self.eat(&Tok::Assign) {
            let rhs = self.expr()?;
            return Ok(Surface::Assign(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn arms(&mut self, scrut: Surface) -> Result<Surface, ParseError> {
        let scrut = Box::new(scrut);
        if self.eat(&Tok::LBrace) {
            self.expect(Tok::RBrace, "`}`")?;
            self.expect(Tok::Colon, "`:` and the result type")?;
            let ty = self.ty()?;
            return Ok(Surface::MatchEmpty(scrut, ty));
        }
        if self.eat(&Tok::LParen) {
            let x1 = self.name()?;
            self.expect(Tok::Comma, "`,`")?;
            let x2 = self.name()?;
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::Arrow, "`->`")?;
            let body = self.term()?;
            return Ok(Surface::MatchProd(scrut, x1, x2, Box::new(body)));
        }
        self.eat(&Tok::Bar);
        self.expect_keyword("inj1")?;
        let x1 = self.name()?;
        self.expect(Tok::Arrow, "`->`")?;
        let t1 = self.term()?;
        self.expect(Tok::Bar, "`|`")?;
        self.expect_keyword("inj2")?;
        let x2 = self.name()?;
        self.expect(Tok::Arrow, "`->`")?;
        let t2 = self.term()?;
        Ok(Surface::MatchSum(scrut, x1, Box::new(t1), x2, Box::new(t2)))
    }

    fn starts_prefix(&self) -> bool {
        match self.peek() {
            Tok::Bang | Tok::LParen | Tok::Loc(_) => true,
            Tok::Ident(s) => {
                matches!(s.as_str(), "inj1" | "inj2" | "ref" | "true" | "false") || !KEYWORDS.contains(&s.as_str())
            }
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Surface, ParseError> {
        let mut f = self.prefix()?;
        while self.starts_prefix() {
            let a = self.prefix()?;
            f = Surface::App(Box::new(f), Box::new(a));
        }
        Ok(f)
    }

    fn prefix(&mut self) -> Result<Surface, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(Surface::Deref(Box::new(self.prefix()?)));
        }
        if self.eat_ident("inj1") {
            return Ok(Surface::Inj(Side::First, Box::new(self.prefix()?)));
        }
        if self.eat_ident("inj2") {
            return Ok(Surface::Inj(Side::Second, Box::new(self.prefix()?)));
        }
        if self.eat_ident("ref") {
            let sort = self.sort()?;
            return Ok(Surface::RefNew(sort, Box::new(self.prefix()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Surface, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Loc(n) => {
                self.bump();
                Ok(Surface::Loc(Loc(n)))
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Surface::Inj(Side::First, Box::new(Surface::Star)))
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Surface::Inj(Side::Second, Box::new(Surface::Star)))
            }
            Tok::Ident(_) => Ok(Surface::Var(self.name()?)),
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok(Surface::Star);
                }
                let first = self.term()?;
                if self.eat(&Tok::RParen) {
                    return Ok(first);
                }
                let mut parts = vec![first];
                while self.eat(&Tok::Comma) {
                    parts.push(self.term()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Surface::Tuple(parts))
            }
            other => Err(self.err_at(at, format!("expected a term, found {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Loc(n) => format!("`#{n}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Assign => "`:=`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Star => "`*`".into(),
        Tok::Eof => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, Binder};

    #[test]
    fn deref_program_with_layout() {
        let p = parse_program("cell d = bool; layout {#0:d,#1:d} !#0").unwrap();
        assert_eq!(p.term, Term::deref(Term::loc(0)));
        let d = Sort::new("d");
        assert_eq!(p.layout.get(Loc(0)), Some(&d));
        assert_eq!(p.layout.get(Loc(1)), Some(&d));
        assert_eq!(p.layout.len(), 2);
    }

    #[test]
    fn cyclic_list_parses_into_three_binders() {
        let src = "cell data = bool; cell list = 1 + ref cell; cell cell = ref data * ref list;\n\
                   new { payload : data = true, cyclic_list : list = inj2 head, head : cell = (payload, cyclic_list) } in cyclic_list";
        let p = parse_program(src).unwrap();
        let Term::New(binders, body) = &p.term else { panic!("expected new, got {}", p.term) };
        assert_eq!(binders.len(), 3);
        assert_eq!(**body, Term::var("cyclic_list"));
        assert_eq!(
            binders[2],
            Binder {
                name: "head".into(),
                sort: Sort::new("cell"),
                init: Term::pair(Term::var("payload"), Term::var("cyclic_list"))
            }
        );
    }

    #[test]
    fn let_is_function_application() {
        let p = parse_program("let x : 1 = () in x").unwrap();
        assert_eq!(p.term, Term::app(Term::fun("x", Type::Unit, Term::var("x")), Term::Star));
    }

    #[test]
    fn types_associate_and_bind_as_documented() {
        let sig = Signature::empty();
        assert_eq!(
            parse_type(&sig, "1 * 1 + 0").unwrap(),
            Type::sum(Type::product(Type::Unit, Type::Unit), Type::Empty)
        );
        assert_eq!(
            parse_type(&sig, "1 + 1 + 1").unwrap(),
            Type::sum(Type::Unit, Type::sum(Type::Unit, Type::Unit))
        );
        assert_eq!(
            parse_type(&sig, "1 -> 1 -> 0").unwrap(),
            Type::arrow(Type::Unit, Type::arrow(Type::Unit, Type::Empty))
        );
    }

    #[test]
    fn non_value_initialiser_is_a_parse_error() {
        let err = parse_program("cell d = bool; new { x : d = !x } in x").unwrap_err();
        assert!(matches!(err, Error::Parse(ref e) if e.message.contains("values")), "{err}");
    }

    #[test]
    fn unknown_sort_in_layout() {
        assert!(parse_program("cell d = bool; layout {#0:e} ()").is_err());
    }

    #[test]
    fn signature_error_surfaces() {
        let err = parse_program("cell a = ref b; ()").unwrap_err();
        assert!(matches!(err, Error::Signature(_)));
    }

    #[test]
    fn sequencing_and_assignment() {
        let src = "cell data = bool; layout {#0:data, #1:data} let x = !#0 in #0 := !#1; #1 := x";
        let p = parse_program(src).unwrap();
        let expected = Term::let_in(
            "x",
            Type::bool(),
            Term::deref(Term::loc(0)),
            Term::let_in(
                "_",
                Type::Unit,
                Term::assign(Term::loc(0), Term::deref(Term::loc(1))),
                Term::assign(Term::loc(1), Term::var("x")),
            ),
        );
        assert!(alpha_eq(&p.term, &expected), "{}", p.term);
    }

    #[test]
    fn error_has_position() {
        let err = parse_program("fun (x:1) ->").unwrap_err();
        let Error::Parse(e) = err else { panic!() };
        assert_eq!(e.line, 1);
        assert_eq!(e.column, 13);
    }
}
