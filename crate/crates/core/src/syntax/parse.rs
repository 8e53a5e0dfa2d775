//! Recursive-descent parser for formal terms.
//!
//! Identifiers are resolved at parse time: a name must be bound by an
//! enclosing binder or name a definition, otherwise parsing fails with the
//! position of the offending identifier. Definition references are spliced
//! in (definitions must be closed, so splicing cannot capture).

use std::collections::BTreeMap;

use super::lex::{lex, Token, TokenKind};
use super::FormalTerm;

const RESERVED: &[&str] = &[
    "lam", "clk-lam", "fix", "pi", "sg", "wty", "all", "isect", "if", "then", "else", "later",
    "fst", "snd", "succ", "Eq", "ifze", "sup", "wrec", "tt", "ff", "zero", "ax", "void", "unit",
    "bool", "nat", "U", "def", "lemma", "by", "conv", "auto", "trace",
];

/// Binder forms; application stops before these.
const BINDER_KEYWORDS: &[&str] = &[
    "lam", "clk-lam", "fix", "pi", "sg", "wty", "all", "isect", "if",
];

pub fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

/// A table of named, closed definitions available for splicing.
#[derive(Debug, Clone, Default)]
pub struct Definitions {
    map: BTreeMap<String, FormalTerm>,
}

impl Definitions {
    pub fn new() -> Self {
        Self::default()
    }

    /// Definitions must be closed: no free variables or clocks.
    pub fn insert(&mut self, name: &str, term: FormalTerm) -> Result<(), String> {
        if is_reserved(name) {
            return Err(format!("`{name}` is a reserved word"));
        }
        if self.map.contains_key(name) {
            return Err(format!("`{name}` is already defined"));
        }
        if let Some(v) = term.free_vars().iter().next() {
            return Err(format!("definition `{name}` has a free variable `{v}`"));
        }
        if let Some(k) = term.free_clock_vars().iter().next() {
            return Err(format!("definition `{name}` has a free clock `{k}`"));
        }
        self.map.insert(name.to_owned(), term);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&FormalTerm> {
        self.map.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    defs: Definitions,
    pub clock_env: Vec<String>,
    pub var_env: Vec<String>,
    /// In open mode, unknown identifiers parse as free variables and any
    /// name is accepted in clock position. Scripts use this for schema
    /// bindings, whose scope is only known when the checker instantiates
    /// them; the checker's judgment validation reports anything unbound.
    pub open_mode: bool,
}

impl Parser {
    pub fn new(input: &str, defs: Definitions) -> Result<Self, ParseError> {
        let toks = lex(input).map_err(|e| ParseError {
            line: e.line,
            col: e.col,
            msg: e.msg,
        })?;
        Ok(Parser {
            toks,
            pos: 0,
            defs,
            clock_env: Vec::new(),
            var_env: Vec::new(),
            open_mode: false,
        })
    }

    pub fn add_def(&mut self, name: &str, term: FormalTerm) -> Result<(), String> {
        self.defs.insert(name, term)
    }

    pub fn defs(&self) -> &Definitions {
        &self.defs
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn peek2(&self) -> &Token {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)]
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn err_here<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    pub fn expect(&mut self, kind: &TokenKind) -> Result<(), ParseError> {
        if &self.peek().kind == kind {
            self.bump();
            Ok(())
        } else {
            self.err_here(format!("expected {kind}, found {}", self.peek().kind))
        }
    }

    pub fn at_ident(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    pub fn eat_ident(&mut self, word: &str) -> bool {
        if self.at_ident(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_ident_word(&mut self, word: &str) -> Result<(), ParseError> {
        if self.eat_ident(word) {
            Ok(())
        } else {
            self.err_here(format!("expected `{word}`, found {}", self.peek().kind))
        }
    }

    /// A binder or context name; reserved words are rejected.
    pub fn expect_name(&mut self) -> Result<String, ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(s) if !is_reserved(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            TokenKind::Ident(s) => self.err_here(format!("`{s}` is a reserved word")),
            other => self.err_here(format!("expected a name, found {other}")),
        }
    }

    pub fn expect_int(&mut self) -> Result<u32, ParseError> {
        match self.peek().kind {
            TokenKind::Int(n) => {
                self.bump();
                Ok(n)
            }
            ref other => self.err_here(format!("expected an integer, found {other}")),
        }
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek().kind {
            TokenKind::Eof => Ok(()),
            ref other => self.err_here(format!("expected end of input, found {other}")),
        }
    }

    fn resolve_clock(&mut self) -> Result<String, ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(s) if self.clock_env.contains(s) || (self.open_mode && !is_reserved(s)) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            TokenKind::Ident(s) => self.err_here(format!("unbound clock `{s}`")),
            other => self.err_here(format!("expected a clock name, found {other}")),
        }
    }

    pub fn parse_term(&mut self) -> Result<FormalTerm, ParseError> {
        if let TokenKind::Ident(word) = &self.peek().kind {
            match word.as_str() {
                "lam" => {
                    self.bump();
                    let x = self.expect_name()?;
                    self.expect(&TokenKind::Dot)?;
                    self.var_env.push(x.clone());
                    let body = self.parse_term()?;
                    self.var_env.pop();
                    return Ok(FormalTerm::Lam(x, Box::new(body)));
                }
                "clk-lam" => {
                    self.bump();
                    let k = self.expect_name()?;
                    self.expect(&TokenKind::Dot)?;
                    self.clock_env.push(k.clone());
                    let body = self.parse_term()?;
                    self.clock_env.pop();
                    return Ok(FormalTerm::ClkLam(k, Box::new(body)));
                }
                "fix" => {
                    self.bump();
                    let x = self.expect_name()?;
                    self.expect(&TokenKind::Dot)?;
                    self.var_env.push(x.clone());
                    let body = self.parse_term()?;
                    self.var_env.pop();
                    return Ok(FormalTerm::Fix(x, Box::new(body)));
                }
                "all" | "isect" => {
                    let isect = word == "isect";
                    self.bump();
                    let k = self.expect_name()?;
                    self.expect(&TokenKind::Dot)?;
                    self.clock_env.push(k.clone());
                    let body = self.parse_term()?;
                    self.clock_env.pop();
                    return Ok(if isect {
                        FormalTerm::Isect(k, Box::new(body))
                    } else {
                        FormalTerm::KProd(k, Box::new(body))
                    });
                }
                "pi" | "sg" | "wty" => {
                    let w = word.clone();
                    self.bump();
                    let x = self.expect_name()?;
                    self.expect(&TokenKind::Colon)?;
                    let a = self.parse_term()?;
                    self.expect(&TokenKind::Dot)?;
                    self.var_env.push(x.clone());
                    let b = self.parse_term()?;
                    self.var_env.pop();
                    return Ok(match w.as_str() {
                        "pi" => FormalTerm::Pi(x, Box::new(a), Box::new(b)),
                        "sg" => FormalTerm::Sg(x, Box::new(a), Box::new(b)),
                        _ => FormalTerm::WTy(x, Box::new(a), Box::new(b)),
                    });
                }
                "if" => {
                    self.bump();
                    let b = self.parse_term()?;
                    self.expect_ident_word("then")?;
                    let t = self.parse_term()?;
                    self.expect_ident_word("else")?;
                    let f = self.parse_term()?;
                    return Ok(FormalTerm::if_(b, t, f));
                }
                _ => {}
            }
        }
        self.parse_arrow()
    }

    fn parse_arrow(&mut self) -> Result<FormalTerm, ParseError> {
        let lhs = self.parse_prod()?;
        if self.peek().kind == TokenKind::Arrow {
            self.bump();
            let rhs = self.parse_arrow()?;
            Ok(FormalTerm::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_prod(&mut self) -> Result<FormalTerm, ParseError> {
        let lhs = self.parse_app()?;
        if self.peek().kind == TokenKind::Star {
            self.bump();
            let rhs = self.parse_prod()?;
            Ok(FormalTerm::times(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn starts_item(&self) -> bool {
        match &self.peek().kind {
            TokenKind::LParen | TokenKind::Lt => true,
            TokenKind::Ident(s) => {
                !BINDER_KEYWORDS.contains(&s.as_str())
                    && s != "then"
                    && s != "else"
                    && s != "by"
            }
            _ => false,
        }
    }

    fn parse_app(&mut self) -> Result<FormalTerm, ParseError> {
        let mut head = self.parse_item()?;
        while self.starts_item() {
            let arg = self.parse_item()?;
            head = FormalTerm::app(head, arg);
        }
        Ok(head)
    }

    fn parse_item(&mut self) -> Result<FormalTerm, ParseError> {
        if let TokenKind::Ident(word) = &self.peek().kind {
            match word.as_str() {
                "fst" => {
                    self.bump();
                    return Ok(FormalTerm::fst(self.parse_item()?));
                }
                "snd" => {
                    self.bump();
                    return Ok(FormalTerm::snd(self.parse_item()?));
                }
                "succ" => {
                    self.bump();
                    return Ok(FormalTerm::su(self.parse_item()?));
                }
                "later" => {
                    self.bump();
                    let k = self.resolve_clock()?;
                    let a = self.parse_item()?;
                    return Ok(FormalTerm::Later(k, Box::new(a)));
                }
                "Eq" => {
                    self.bump();
                    let a = self.parse_item()?;
                    let m = self.parse_item()?;
                    let n = self.parse_item()?;
                    return Ok(FormalTerm::eq(a, m, n));
                }
                _ => {}
            }
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> Result<FormalTerm, ParseError> {
        let mut t = self.parse_atom()?;
        while self.peek().kind == TokenKind::At {
            self.bump();
            let k = self.resolve_clock()?;
            t = FormalTerm::ClkApp(Box::new(t), k);
        }
        Ok(t)
    }

    fn parse_atom(&mut self) -> Result<FormalTerm, ParseError> {
        match self.peek().kind.clone() {
            TokenKind::LParen => {
                self.bump();
                let t = self.parse_term()?;
                self.expect(&TokenKind::RParen)?;
                Ok(t)
            }
            TokenKind::Lt => {
                self.bump();
                let a = self.parse_term()?;
                self.expect(&TokenKind::Comma)?;
                let b = self.parse_term()?;
                self.expect(&TokenKind::Gt)?;
                Ok(FormalTerm::pair(a, b))
            }
            TokenKind::Ident(word) => match word.as_str() {
                "tt" => {
                    self.bump();
                    Ok(FormalTerm::Tt)
                }
                "ff" => {
                    self.bump();
                    Ok(FormalTerm::Ff)
                }
                "zero" => {
                    self.bump();
                    Ok(FormalTerm::Ze)
                }
                "ax" => {
                    self.bump();
                    Ok(FormalTerm::Ax)
                }
                "void" => {
                    self.bump();
                    Ok(FormalTerm::Void)
                }
                "unit" => {
                    self.bump();
                    Ok(FormalTerm::Unit)
                }
                "bool" => {
                    self.bump();
                    Ok(FormalTerm::Bool)
                }
                "nat" => {
                    self.bump();
                    Ok(FormalTerm::Nat)
                }
                "U" => {
                    self.bump();
                    self.expect(&TokenKind::Lt)?;
                    let i = self.expect_int()?;
                    self.expect(&TokenKind::Gt)?;
                    Ok(FormalTerm::Univ(i))
                }
                "ifze" => {
                    self.bump();
                    self.expect(&TokenKind::LParen)?;
                    let n = self.parse_term()?;
                    self.expect(&TokenKind::Semi)?;
                    let z = self.parse_term()?;
                    self.expect(&TokenKind::Semi)?;
                    let x = self.expect_name()?;
                    self.expect(&TokenKind::Dot)?;
                    self.var_env.push(x.clone());
                    let s = self.parse_term()?;
                    self.var_env.pop();
                    self.expect(&TokenKind::RParen)?;
                    Ok(FormalTerm::IfZe(Box::new(n), Box::new(z), x, Box::new(s)))
                }
                "sup" => {
                    self.bump();
                    self.expect(&TokenKind::LParen)?;
                    let m = self.parse_term()?;
                    self.expect(&TokenKind::Semi)?;
                    let x = self.expect_name()?;
                    self.expect(&TokenKind::Dot)?;
                    self.var_env.push(x.clone());
                    let n = self.parse_term()?;
                    self.var_env.pop();
                    self.expect(&TokenKind::RParen)?;
                    Ok(FormalTerm::Sup(Box::new(m), x, Box::new(n)))
                }
                "wrec" => {
                    self.bump();
                    self.expect(&TokenKind::LParen)?;
                    let m = self.parse_term()?;
                    self.expect(&TokenKind::Semi)?;
                    let x = self.expect_name()?;
                    let y = self.expect_name()?;
                    let z = self.expect_name()?;
                    self.expect(&TokenKind::Dot)?;
                    self.var_env.push(x.clone());
                    self.var_env.push(y.clone());
                    self.var_env.push(z.clone());
                    let o = self.parse_term()?;
                    self.var_env.pop();
                    self.var_env.pop();
                    self.var_env.pop();
                    self.expect(&TokenKind::RParen)?;
                    Ok(FormalTerm::WRec(Box::new(m), x, y, z, Box::new(o)))
                }
                _ if is_reserved(&word) => self.err_here(format!("unknown keyword `{word}`")),
                _ => {
                    if self.var_env.contains(&word) {
                        self.bump();
                        Ok(FormalTerm::Var(word))
                    } else if let Some(def) = self.defs.get(&word) {
                        let def = def.clone();
                        self.bump();
                        Ok(def)
                    } else if self.clock_env.contains(&word) {
                        self.err_here(format!(
                            "`{word}` is a clock, not a term (clock application is `M @{word}`)"
                        ))
                    } else if self.open_mode {
                        self.bump();
                        Ok(FormalTerm::Var(word))
                    } else {
                        self.err_here(format!("unbound identifier `{word}`"))
                    }
                }
            },
            other => self.err_here(format!("expected a term, found {other}")),
        }
    }
}

/// Parse a term against a definition table and ambient clock/variable scopes.
pub fn parse_term(
    input: &str,
    defs: &Definitions,
    clocks: &[String],
    vars: &[String],
) -> Result<FormalTerm, ParseError> {
    let mut p = Parser::new(input, defs.clone())?;
    p.clock_env = clocks.to_vec();
    p.var_env = vars.to_vec();
    let t = p.parse_term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parse a closed term with no definitions in scope.
pub fn parse(input: &str) -> Result<FormalTerm, ParseError> {
    parse_term(input, &Definitions::new(), &[], &[])
}
