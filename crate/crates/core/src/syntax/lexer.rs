use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Loc(u32),
    Num(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Eq,
    Assign,
    Bang,
    Arrow,
    Bar,
    Plus,
    Star,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub offset: usize,
}

pub fn error_at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError { offset, line, column, message: message.into() }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let single = |t: Tok| Token { tok: t, offset: start };
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b',' => Tok::Comma,
            b';' => Tok::Semi,
            b'!' => Tok::Bang,
            b'|' => Tok::Bar,
            b'+' => Tok::Plus,
            b'*' => Tok::Star,
            b'=' => Tok::Eq,
            b':' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                out.push(single(Tok::Assign));
                continue;
            }
            b':' => Tok::Colon,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                out.push(single(Tok::Arrow));
                continue;
            }
            b'#' => {
                i += 1;
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if digits_start == i {
                    return Err(error_at(src, start, "expected digits after `#`"));
                }
                let n = src[digits_start..i]
                    .parse()
                    .map_err(|_| error_at(src, start, "location index out of range"))?;
                out.push(single(Tok::Loc(n)));
                continue;
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i].parse().map_err(|_| error_at(src, start, "number out of range"))?;
                out.push(single(Tok::Num(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                out.push(single(Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(error_at(src, start, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        out.push(single(tok));
    }
    out.push(Token { tok: Tok::Eof, offset: src.len() });
    Ok(out)
}
