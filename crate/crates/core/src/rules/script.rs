//! Parsing and checking of `.gctt` script files.
//!
//! A file is a sequence of `def NAME := TERM ;` items and
//! `lemma NAME : JUDGMENT by { SCRIPT } ;` items. Judgments are written
//! `[clocks] (hyps) M = N : A` (or `M : A` for membership) and
//! `[clocks] (vars) M ~ N` for conversions. A script node is a rule name
//! with optional `(name = value, ...)` bindings and a `{ ... }` block of
//! premise scripts; `lemma NAME` cites an earlier lemma and
//! `conv auto` / `conv trace { M ~> ... }` discharge conversion premises.

use serde::Serialize;

use super::{
    check, premises_of, Binding, BindingKind, Bindings, CheckError, Derivation, Judgment,
    LemmaTable, RuleName,
};
use crate::syntax::{Definitions, FormalTerm, ParseError, Parser, TokenKind};

#[derive(Debug, Clone)]
pub struct Lemma {
    pub name: String,
    pub judgment: Judgment,
    pub derivation: Derivation,
}

#[derive(Debug, Clone)]
pub struct ScriptFile {
    pub defs: Definitions,
    pub lemmas: Vec<Lemma>,
}

pub fn parse_script_file(input: &str) -> Result<ScriptFile, ParseError> {
    let mut p = Parser::new(input, Definitions::new())?;
    let mut lemmas: Vec<Lemma> = Vec::new();
    loop {
        match &p.peek().kind {
            TokenKind::Eof => break,
            TokenKind::Ident(w) if w == "def" => {
                p.bump();
                let name = match &p.peek().kind {
                    TokenKind::Ident(s) => {
                        let s = s.clone();
                        p.bump();
                        s
                    }
                    other => return p.err_here(format!("expected a definition name, found {other}")),
                };
                p.expect(&TokenKind::ColonEq)?;
                let term = p.parse_term()?;
                p.expect(&TokenKind::Semi)?;
                if let Err(msg) = p.add_def(&name, term) {
                    return p.err_here(msg);
                }
            }
            TokenKind::Ident(w) if w == "lemma" => {
                p.bump();
                let name = match &p.peek().kind {
                    TokenKind::Ident(s) => {
                        let s = s.clone();
                        p.bump();
                        s
                    }
                    other => return p.err_here(format!("expected a lemma name, found {other}")),
                };
                if lemmas.iter().any(|l| l.name == name) {
                    return p.err_here(format!("lemma `{name}` is already defined"));
                }
                p.expect(&TokenKind::Colon)?;
                let judgment = parse_judgment(&mut p)?;
                p.expect_ident_word("by")?;
                p.expect(&TokenKind::LBrace)?;
                let derivation = parse_script(&mut p)?;
                p.expect(&TokenKind::RBrace)?;
                p.expect(&TokenKind::Semi)?;
                lemmas.push(Lemma {
                    name,
                    judgment,
                    derivation,
                });
            }
            other => return p.err_here(format!("expected `def` or `lemma`, found {other}")),
        }
    }
    Ok(ScriptFile {
        defs: p.defs().clone(),
        lemmas,
    })
}

pub fn parse_judgment(p: &mut Parser) -> Result<Judgment, ParseError> {
    let saved_clocks = p.clock_env.clone();
    let saved_vars = p.var_env.clone();
    let out = parse_judgment_inner(p);
    p.clock_env = saved_clocks;
    p.var_env = saved_vars;
    out
}

fn parse_judgment_inner(p: &mut Parser) -> Result<Judgment, ParseError> {
    p.expect(&TokenKind::LBracket)?;
    let mut clocks = Vec::new();
    while p.peek().kind != TokenKind::RBracket {
        clocks.push(p.expect_name()?);
        if p.peek().kind == TokenKind::Comma {
            p.bump();
        }
    }
    p.expect(&TokenKind::RBracket)?;
    p.clock_env = clocks.clone();
    p.var_env = Vec::new();

    p.expect(&TokenKind::LParen)?;
    let mut hyps: Vec<(String, FormalTerm)> = Vec::new();
    let mut plain_vars: Vec<String> = Vec::new();
    let mut typed = None;
    while p.peek().kind != TokenKind::RParen {
        let name = p.expect_name()?;
        if typed.is_none() {
            typed = Some(p.peek().kind == TokenKind::Colon);
        }
        if typed == Some(true) {
            p.expect(&TokenKind::Colon)?;
            let ty = p.parse_term()?;
            p.var_env.push(name.clone());
            hyps.push((name, ty));
        } else {
            p.var_env.push(name.clone());
            plain_vars.push(name);
        }
        if p.peek().kind == TokenKind::Comma {
            p.bump();
        }
    }
    p.expect(&TokenKind::RParen)?;

    let left = p.parse_term()?;
    match p.peek().kind.clone() {
        TokenKind::Tilde => {
            p.bump();
            let right = p.parse_term()?;
            if typed == Some(true) {
                return p.err_here("a conversion context lists bare variable names".to_string());
            }
            Ok(Judgment::OpenConv {
                clocks,
                vars: plain_vars,
                left,
                right,
            })
        }
        TokenKind::Equals => {
            p.bump();
            let right = p.parse_term()?;
            p.expect(&TokenKind::Colon)?;
            let ty = p.parse_term()?;
            if typed == Some(false) {
                return p.err_here("an equality context lists typed hypotheses".to_string());
            }
            Ok(Judgment::EqMem {
                clocks,
                hyps,
                left,
                right,
                ty,
            })
        }
        TokenKind::Colon => {
            p.bump();
            let ty = p.parse_term()?;
            if typed == Some(false) {
                return p.err_here("an equality context lists typed hypotheses".to_string());
            }
            Ok(Judgment::EqMem {
                clocks,
                hyps,
                left: left.clone(),
                right: left,
                ty,
            })
        }
        other => p.err_here(format!("expected `=`, `:` or `~` in a judgment, found {other}")),
    }
}

fn parse_script(p: &mut Parser) -> Result<Derivation, ParseError> {
    match &p.peek().kind {
        TokenKind::Ident(w) if w == "lemma" => {
            p.bump();
            match &p.peek().kind {
                TokenKind::Ident(s) => {
                    let s = s.clone();
                    p.bump();
                    Ok(Derivation::Lemma(s))
                }
                other => p.err_here(format!("expected a lemma name, found {other}")),
            }
        }
        TokenKind::Ident(w) if w == "conv" => {
            p.bump();
            if p.eat_ident("auto") {
                return Ok(Derivation::ConvAuto);
            }
            p.expect_ident_word("trace")?;
            p.expect(&TokenKind::LBrace)?;
            let mut terms = Vec::new();
            let was_open = p.open_mode;
            p.open_mode = true;
            terms.push(p.parse_term()?);
            while p.peek().kind == TokenKind::Tilde {
                p.bump();
                p.expect(&TokenKind::Gt)?;
                terms.push(p.parse_term()?);
            }
            p.open_mode = was_open;
            p.expect(&TokenKind::RBrace)?;
            Ok(Derivation::ConvTrace(terms))
        }
        TokenKind::Ident(_) => {
            let rule = parse_rule_name(p)?;
            let bindings = parse_bindings(p, rule)?;
            let mut premises = Vec::new();
            if p.peek().kind == TokenKind::LBrace {
                p.bump();
                while p.peek().kind != TokenKind::RBrace {
                    premises.push(parse_script(p)?);
                    if p.peek().kind == TokenKind::Semi {
                        p.bump();
                    }
                }
                p.expect(&TokenKind::RBrace)?;
            }
            Ok(Derivation::Rule {
                rule,
                bindings,
                premises,
            })
        }
        other => p.err_here(format!("expected a rule application, found {other}")),
    }
}

fn parse_rule_name(p: &mut Parser) -> Result<RuleName, ParseError> {
    let group = match &p.peek().kind {
        TokenKind::Ident(s) => {
            let s = s.clone();
            p.bump();
            s
        }
        other => return p.err_here(format!("expected a rule name, found {other}")),
    };
    p.expect(&TokenKind::Dot)?;
    let item = match &p.peek().kind {
        TokenKind::Ident(s) => {
            let s = s.clone();
            p.bump();
            s
        }
        other => return p.err_here(format!("expected a rule name, found {other}")),
    };
    let full = format!("{group}.{item}");
    RuleName::parse(&full)
        .ok_or(())
        .or_else(|_| p.err_here(format!("`{full}` is not a validated rule")))
}

fn parse_bindings(p: &mut Parser, rule: RuleName) -> Result<Bindings, ParseError> {
    let mut bindings = Bindings::new();
    if p.peek().kind != TokenKind::LParen {
        return Ok(bindings);
    }
    p.bump();
    let spec = super::rule_bindings(rule);
    while p.peek().kind != TokenKind::RParen {
        let name = match &p.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                p.bump();
                s
            }
            other => return p.err_here(format!("expected a binding name, found {other}")),
        };
        let kind = match spec.iter().find(|(n, _, _)| *n == name) {
            Some((_, kind, _)) => *kind,
            None => {
                return p.err_here(format!("rule {rule} does not take a `{name}` binding"));
            }
        };
        p.expect(&TokenKind::Equals)?;
        let value = match kind {
            BindingKind::Index => Binding::Index(p.expect_int()?),
            BindingKind::Var => Binding::Var(p.expect_name()?),
            BindingKind::Clock => Binding::Clock(p.expect_name()?),
            BindingKind::Term => {
                let was_open = p.open_mode;
                p.open_mode = true;
                let t = p.parse_term();
                p.open_mode = was_open;
                Binding::Term(t?)
            }
        };
        bindings.insert(name, value);
        if p.peek().kind == TokenKind::Comma {
            p.bump();
        }
    }
    p.expect(&TokenKind::RParen)?;
    for (name, _, required) in spec {
        if *required && !bindings.contains_key(*name) {
            return p.err_here(format!("rule {rule} requires a `{name}` binding"));
        }
    }
    Ok(bindings)
}

/// Per-lemma result of checking a script file.
#[derive(Debug, Clone, Serialize)]
pub enum LemmaOutcome {
    Ok,
    Error { path: String, msg: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub name: String,
    pub judgment: String,
    pub outcome: LemmaOutcome,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ScriptReport {
    pub lemmas: Vec<LemmaReport>,
}

impl ScriptReport {
    pub fn all_ok(&self) -> bool {
        self.lemmas
            .iter()
            .all(|l| matches!(l.outcome, LemmaOutcome::Ok))
    }
}

/// Check every lemma of a script file in order. Later lemmas may cite
/// earlier ones; one failure does not abort the file.
pub fn check_script(input: &str, fuel: u64) -> Result<ScriptReport, ParseError> {
    let file = parse_script_file(input)?;
    Ok(check_script_file(&file, fuel))
}

pub fn check_script_file(file: &ScriptFile, fuel: u64) -> ScriptReport {
    let mut table = LemmaTable::new();
    let mut report = ScriptReport::default();
    for lemma in &file.lemmas {
        let outcome = match check(&lemma.derivation, &lemma.judgment, &table, fuel) {
            Ok(()) => {
                table.insert(&lemma.name, lemma.judgment.clone());
                LemmaOutcome::Ok
            }
            Err(CheckError { path, msg }) => LemmaOutcome::Error { path, msg },
        };
        report.lemmas.push(LemmaReport {
            name: lemma.name.clone(),
            judgment: lemma.judgment.to_string(),
            outcome,
        });
    }
    report
}

/// Like [`check_script_file`], but carrying the full per-node derivation
/// trees for machine-readable reports.
pub fn check_script_trees(file: &ScriptFile, fuel: u64) -> Vec<(LemmaReport, super::NodeReport)> {
    let mut table = LemmaTable::new();
    let mut out = Vec::new();
    for lemma in &file.lemmas {
        let tree = super::report_tree(&lemma.derivation, &lemma.judgment, &table, fuel);
        let outcome = match check(&lemma.derivation, &lemma.judgment, &table, fuel) {
            Ok(()) => {
                table.insert(&lemma.name, lemma.judgment.clone());
                LemmaOutcome::Ok
            }
            Err(CheckError { path, msg }) => LemmaOutcome::Error { path, msg },
        };
        out.push((
            LemmaReport {
                name: lemma.name.clone(),
                judgment: lemma.judgment.to_string(),
                outcome,
            },
            tree,
        ));
    }
    out
}

/// Collect the judgments of all lemmas that check, for cross-checking.
pub fn checked_judgments(file: &ScriptFile, fuel: u64) -> Vec<(String, Judgment)> {
    let mut table = LemmaTable::new();
    let mut out = Vec::new();
    for lemma in &file.lemmas {
        if check(&lemma.derivation, &lemma.judgment, &table, fuel).is_ok() {
            table.insert(&lemma.name, lemma.judgment.clone());
            out.push((lemma.name.clone(), lemma.judgment.clone()));
        }
    }
    out
}

/// Expose premise computation for negative-control tests.
pub fn premises_for_test(
    rule: RuleName,
    bindings: &Bindings,
    concl: &Judgment,
) -> Result<Vec<Judgment>, String> {
    premises_of(rule, bindings, concl)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_defs_and_membership_lemma() {
        let src = r#"
-- the constant stream of tt
def ones := fix x. <tt, x> ;

lemma tt_wf : [] () tt : bool by { Bool.tt_equality } ;
"#;
        let file = parse_script_file(src).unwrap();
        assert_eq!(file.lemmas.len(), 1);
        let report = check_script(src, 1000).unwrap();
        assert!(report.all_ok());
    }

    #[test]
    fn lemma_citation_matches_alpha_equal_judgments() {
        let src = r#"
lemma tt_wf : [] () tt : bool by { Bool.tt_equality } ;
lemma tt_wf_again : [] () tt = tt : bool by { lemma tt_wf } ;
"#;
        let report = check_script(src, 1000).unwrap();
        assert!(report.all_ok());
    }

    #[test]
    fn unknown_lemma_is_reported() {
        let src = r#"
lemma bad : [] () tt : bool by { lemma missing } ;
"#;
        let report = check_script(src, 1000).unwrap();
        assert!(!report.all_ok());
        match &report.lemmas[0].outcome {
            LemmaOutcome::Error { msg, .. } => assert!(msg.contains("unknown lemma"), "{msg}"),
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_rule_names_are_rejected() {
        // the rule set is a closed enumeration: no silent axioms
        let src = "lemma bad : [] () tt : bool by { Fake.axiom } ;";
        let err = parse_script_file(src).unwrap_err();
        assert!(err.msg.contains("not a validated rule"), "{err}");
    }

    #[test]
    fn empty_file_gives_empty_report() {
        let report = check_script("", 1000).unwrap();
        assert!(report.lemmas.is_empty());
        assert!(report.all_ok());
    }

    #[test]
    fn conv_premises_in_scripts() {
        let src = r#"
lemma red : [] () if tt then tt else ff : bool by {
  General.conv_mem(via = tt) {
    General.eq_symm {
      General.conv_mem(via = tt) {
        Bool.tt_equality;
        conv auto
      }
    };
    conv trace { if tt then tt else ff ~> tt }
  }
} ;
"#;
        let report = check_script(src, 1000).unwrap();
        assert!(report.all_ok(), "{report:?}");
    }

    #[test]
    fn conversion_premises_can_cite_lemmas() {
        let src = r#"
lemma fst_red : [] (x) fst <x, tt> ~ x by { conv auto } ;
lemma use_it : [] (x : bool) fst <x, tt> = x : bool by {
  General.conv_mem(via = x) {
    General.hypothesis;
    lemma fst_red
  }
} ;
"#;
        let report = check_script(src, 1000).unwrap();
        assert!(report.all_ok(), "{report:?}");
    }

    #[test]
    fn karr_elim_requires_a_fresh_bound_clock() {
        let src = r#"
lemma bad : [k] () (clk-lam j. tt) @k : bool by {
  KArr.elim(k = k, A = bool, i = 0) {
    Bool.univ_eq;
    KArr.intro(i = 0) { Bool.univ_eq; Bool.tt_equality }
  }
} ;
"#;
        let report = check_script(src, 1000).unwrap();
        assert!(!report.all_ok());
        match &report.lemmas[0].outcome {
            LemmaOutcome::Error { msg, .. } => {
                assert!(msg.contains("fresh"), "{msg}")
            }
            other => panic!("expected an error, got {other:?}"),
        }
    }

    #[test]
    fn later_induction_script() {
        let src = r#"
lemma fix_tt : [k] () fix x. tt : bool by {
  Later.induction { Bool.tt_equality }
} ;
"#;
        let report = check_script(src, 1000).unwrap();
        assert!(report.all_ok(), "{report:?}");
    }
}
