//! Tokenizer shared by the `.cd` and `.lmtm` parsers.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    // punctuation
    Lt,        // <
    Gt,        // >
    Pipe,      // |
    Colon,     // :
    Semi,      // ;
    Comma,     // ,
    Dot,       // .
    Eq,        // =
    LParen,    // (
    RParen,    // )
    LBrace,    // {
    RBrace,    // }
    LBracket,  // [
    RBracket,  // ]
    Backslash, // \
    Underscore,
    Arrow,     // ->
    FatArrow,  // =>
    Turnstile, // |-
    CoTurnstile, // -|
    InfixSum,  // (+)
    InfixProd, // (*)
    InfixWith, // (&)
    InfixPar,  // (%)
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Num(n) => write!(f, "{n}"),
            Tok::Lt => write!(f, "<"),
            Tok::Gt => write!(f, ">"),
            Tok::Pipe => write!(f, "|"),
            Tok::Colon => write!(f, ":"),
            Tok::Semi => write!(f, ";"),
            Tok::Comma => write!(f, ","),
            Tok::Dot => write!(f, "."),
            Tok::Eq => write!(f, "="),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Backslash => write!(f, "\\"),
            Tok::Underscore => write!(f, "_"),
            Tok::Arrow => write!(f, "->"),
            Tok::FatArrow => write!(f, "=>"),
            Tok::Turnstile => write!(f, "|-"),
            Tok::CoTurnstile => write!(f, "-|"),
            Tok::InfixSum => write!(f, "(+)"),
            Tok::InfixProd => write!(f, "(*)"),
            Tok::InfixWith => write!(f, "(&)"),
            Tok::InfixPar => write!(f, "(%)"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Loc {
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub loc: Loc,
    pub end: usize,
}

#[derive(Clone, Debug)]
pub struct LexError {
    pub loc: Loc,
    pub msg: String,
}

pub fn lex(src: &str) -> Result<Vec<Spanned>, LexError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    let mut line = 1usize;
    let mut col = 1usize;
    macro_rules! loc {
        () => {
            Loc {
                offset: i,
                line,
                col,
            }
        };
    }
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '-' if i + 1 < bytes.len() && bytes[i + 1] == b'-' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '-' if i + 1 < bytes.len() && bytes[i + 1] == b'>' => {
                toks.push(Spanned {
                    tok: Tok::Arrow,
                    loc: loc!(),
                    end: i + 2,
                });
                i += 2;
                col += 2;
            }
            '-' if i + 1 < bytes.len() && bytes[i + 1] == b'|' => {
                toks.push(Spanned {
                    tok: Tok::CoTurnstile,
                    loc: loc!(),
                    end: i + 2,
                });
                i += 2;
                col += 2;
            }
            '|' if i + 1 < bytes.len() && bytes[i + 1] == b'-' => {
                toks.push(Spanned {
                    tok: Tok::Turnstile,
                    loc: loc!(),
                    end: i + 2,
                });
                i += 2;
                col += 2;
            }
            '=' if i + 1 < bytes.len() && bytes[i + 1] == b'>' => {
                toks.push(Spanned {
                    tok: Tok::FatArrow,
                    loc: loc!(),
                    end: i + 2,
                });
                i += 2;
                col += 2;
            }
            '(' if i + 2 < bytes.len() && bytes[i + 2] == b')' && b"+*&%".contains(&bytes[i + 1]) =>
            {
                let tok = match bytes[i + 1] {
                    b'+' => Tok::InfixSum,
                    b'*' => Tok::InfixProd,
                    b'&' => Tok::InfixWith,
                    _ => Tok::InfixPar,
                };
                toks.push(Spanned {
                    tok,
                    loc: loc!(),
                    end: i + 3,
                });
                i += 3;
                col += 3;
            }
            '<' | '>' | '|' | ':' | ';' | ',' | '.' | '=' | '(' | ')' | '{' | '}' | '[' | ']'
            | '\\' => {
                let tok = match c {
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '|' => Tok::Pipe,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '=' => Tok::Eq,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    _ => Tok::Backslash,
                };
                toks.push(Spanned {
                    tok,
                    loc: loc!(),
                    end: i + 1,
                });
                i += 1;
                col += 1;
            }
            '_' if i + 1 >= bytes.len() || !ident_char(bytes[i + 1] as char) => {
                toks.push(Spanned {
                    tok: Tok::Underscore,
                    loc: loc!(),
                    end: i + 1,
                });
                i += 1;
                col += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                let l = loc!();
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                let n: u64 = src[start..i].parse().map_err(|_| LexError {
                    loc: l,
                    msg: "numeral out of range".into(),
                })?;
                toks.push(Spanned {
                    tok: Tok::Num(n),
                    loc: l,
                    end: i,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let l = loc!();
                while i < bytes.len() && ident_char(bytes[i] as char) {
                    i += 1;
                    col += 1;
                }
                // allow one `@disc` suffix glued onto the identifier
                if i < bytes.len() && bytes[i] == b'@' {
                    let mut j = i + 1;
                    while j < bytes.len() && ident_char(bytes[j] as char) {
                        j += 1;
                    }
                    col += j - i;
                    i = j;
                }
                toks.push(Spanned {
                    tok: Tok::Ident(src[start..i].to_string()),
                    loc: l,
                    end: i,
                });
            }
            other => {
                return Err(LexError {
                    loc: loc!(),
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(toks)
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}
