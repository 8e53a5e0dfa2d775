//! Lexer for the `.gctt` surface syntax. Line comments start with `--`.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Dot,
    Colon,
    Semi,
    ColonEq,
    At,
    Arrow,
    Star,
    Equals,
    Tilde,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "`{s}`"),
            TokenKind::Int(n) => write!(f, "`{n}`"),
            TokenKind::LParen => write!(f, "`(`"),
            TokenKind::RParen => write!(f, "`)`"),
            TokenKind::LBrace => write!(f, "`{{`"),
            TokenKind::RBrace => write!(f, "`}}`"),
            TokenKind::LBracket => write!(f, "`[`"),
            TokenKind::RBracket => write!(f, "`]`"),
            TokenKind::Lt => write!(f, "`<`"),
            TokenKind::Gt => write!(f, "`>`"),
            TokenKind::Comma => write!(f, "`,`"),
            TokenKind::Dot => write!(f, "`.`"),
            TokenKind::Colon => write!(f, "`:`"),
            TokenKind::Semi => write!(f, "`;`"),
            TokenKind::ColonEq => write!(f, "`:=`"),
            TokenKind::At => write!(f, "`@`"),
            TokenKind::Arrow => write!(f, "`->`"),
            TokenKind::Star => write!(f, "`*`"),
            TokenKind::Equals => write!(f, "`=`"),
            TokenKind::Tilde => write!(f, "`~`"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lex error at {line}:{col}: {msg}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

pub fn lex(input: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;

    macro_rules! push {
        ($kind:expr, $l:expr, $c:expr) => {
            out.push(Token {
                kind: $kind,
                line: $l,
                col: $c,
            })
        };
    }

    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let ch = chars.next().unwrap();
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            ch
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '(' => {
                bump(&mut chars);
                push!(TokenKind::LParen, l0, c0);
            }
            ')' => {
                bump(&mut chars);
                push!(TokenKind::RParen, l0, c0);
            }
            '{' => {
                bump(&mut chars);
                push!(TokenKind::LBrace, l0, c0);
            }
            '}' => {
                bump(&mut chars);
                push!(TokenKind::RBrace, l0, c0);
            }
            '[' => {
                bump(&mut chars);
                push!(TokenKind::LBracket, l0, c0);
            }
            ']' => {
                bump(&mut chars);
                push!(TokenKind::RBracket, l0, c0);
            }
            '<' => {
                bump(&mut chars);
                push!(TokenKind::Lt, l0, c0);
            }
            '>' => {
                bump(&mut chars);
                push!(TokenKind::Gt, l0, c0);
            }
            ',' => {
                bump(&mut chars);
                push!(TokenKind::Comma, l0, c0);
            }
            '.' => {
                bump(&mut chars);
                push!(TokenKind::Dot, l0, c0);
            }
            ';' => {
                bump(&mut chars);
                push!(TokenKind::Semi, l0, c0);
            }
            '@' => {
                bump(&mut chars);
                push!(TokenKind::At, l0, c0);
            }
            '*' => {
                bump(&mut chars);
                push!(TokenKind::Star, l0, c0);
            }
            '=' => {
                bump(&mut chars);
                push!(TokenKind::Equals, l0, c0);
            }
            '~' => {
                bump(&mut chars);
                push!(TokenKind::Tilde, l0, c0);
            }
            ':' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(TokenKind::ColonEq, l0, c0);
                } else {
                    push!(TokenKind::Colon, l0, c0);
                }
            }
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('-') => {
                        // line comment
                        while let Some(&ch) = chars.peek() {
                            if ch == '\n' {
                                break;
                            }
                            bump(&mut chars);
                        }
                    }
                    Some('>') => {
                        bump(&mut chars);
                        push!(TokenKind::Arrow, l0, c0);
                    }
                    _ => {
                        return Err(LexError {
                            line: l0,
                            col: c0,
                            msg: "stray `-` (expected `--` or `->`)".into(),
                        })
                    }
                }
            }
            d if d.is_ascii_digit() => {
                let mut n: u32 = 0;
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_digit() {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add(ch as u32 - '0' as u32))
                            .ok_or_else(|| LexError {
                                line: l0,
                                col: c0,
                                msg: "integer literal too large".into(),
                            })?;
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                push!(TokenKind::Int(n), l0, c0);
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_alphanumeric() || ch == '_' || ch == '\'' {
                        s.push(ch);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                // `clk-lam` is the one keyword containing a hyphen
                if s == "clk" {
                    let mut look = chars.clone();
                    if look.next() == Some('-')
                        && look.next() == Some('l')
                        && look.next() == Some('a')
                        && look.next() == Some('m')
                    {
                        for _ in 0..4 {
                            bump(&mut chars);
                        }
                        s = "clk-lam".into();
                    }
                }
                push!(TokenKind::Ident(s), l0, c0);
            }
            other => {
                return Err(LexError {
                    line: l0,
                    col: c0,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Token {
        kind: TokenKind::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_keywords_and_symbols() {
        let toks = lex("lam x. <tt, x> -- trailing comment\nU<3> @k :=").unwrap();
        let kinds: Vec<_> = toks.into_iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Ident("lam".into()),
                TokenKind::Ident("x".into()),
                TokenKind::Dot,
                TokenKind::Lt,
                TokenKind::Ident("tt".into()),
                TokenKind::Comma,
                TokenKind::Ident("x".into()),
                TokenKind::Gt,
                TokenKind::Ident("U".into()),
                TokenKind::Lt,
                TokenKind::Int(3),
                TokenKind::Gt,
                TokenKind::At,
                TokenKind::Ident("k".into()),
                TokenKind::ColonEq,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn lexes_clk_lam() {
        let toks = lex("clk-lam k. tt").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident("clk-lam".into()));
    }

    #[test]
    fn reports_position() {
        let err = lex("tt\n  ?").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }
}
