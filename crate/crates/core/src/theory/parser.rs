//! Recursive-descent parser for the presentation DSL.
//!
//! ```text
//! file   := "theory" IDENT ";" (opdecl | eqdecl)*
//! opdecl := "op" IDENT "/" NAT ";"
//! eqdecl := "eq" "[" NAT "]" term "=" term ";"
//! term   := IDENT "(" term ("," term)* ")" | IDENT | "x" NAT
//! ```
//!
//! Whitespace is insignificant and `//` starts a line comment. Symbols must be
//! declared before an equation uses them.

use super::{Equation, Presentation, Signature, Symbol, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(usize),
    Punct(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number {n}"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, column);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: start_line,
                column: start_col,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            column += i - start;
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| Error::Syntax {
                line: start_line,
                column: start_col,
                expected: vec!["natural number".into()],
                found: digits.clone(),
            })?;
            out.push(Spanned {
                tok: Tok::Nat(n),
                line: start_line,
                column: start_col,
            });
        } else if ";/[]()=,".contains(c) {
            i += 1;
            column += 1;
            out.push(Spanned {
                tok: Tok::Punct(c),
                line: start_line,
                column: start_col,
            });
        } else {
            return Err(Error::Syntax {
                line,
                column,
                expected: vec!["identifier".into(), "number".into(), "punctuation".into()],
                found: format!("`{c}`"),
            });
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// `x<k>` spelled as one identifier.
fn var_index(ident: &str) -> Option<usize> {
    let digits = ident.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    n_max: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        })
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Punct(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{c}`")])
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => self.fail(&[&format!("`{kw}`")]),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn nat(&mut self) -> Result<usize> {
        match self.peek().tok {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.fail(&["natural number"]),
        }
    }

    fn file(&mut self) -> Result<Presentation> {
        self.keyword("theory")?;
        let name = self.ident()?;
        self.punct(';')?;
        let mut symbols: Vec<Symbol> = Vec::new();
        let mut equations = Vec::new();
        loop {
            match &self.peek().tok {
                Tok::Eof => break,
                Tok::Ident(s) if s == "op" => {
                    self.bump();
                    let at = self.peek().clone();
                    let sym = self.ident()?;
                    if var_index(&sym).is_some() || sym == "x" {
                        return Err(Error::Syntax {
                            line: at.line,
                            column: at.column,
                            expected: vec!["symbol name not of the form x<k>".into()],
                            found: format!("identifier `{sym}`"),
                        });
                    }
                    self.punct('/')?;
                    let arity = self.nat()?;
                    self.punct(';')?;
                    if symbols.iter().any(|s| s.name == sym) {
                        return Err(Error::DuplicateSymbol(sym));
                    }
                    if arity > self.n_max {
                        return Err(Error::ArityAboveBound {
                            symbol: sym,
                            arity,
                            n_max: self.n_max,
                        });
                    }
                    symbols.push(Symbol { name: sym, arity });
                }
                Tok::Ident(s) if s == "eq" => {
                    self.bump();
                    self.punct('[')?;
                    let nvars = self.nat()?;
                    self.punct(']')?;
                    let lhs = self.term(&symbols, nvars)?;
                    self.punct('=')?;
                    let rhs = self.term(&symbols, nvars)?;
                    self.punct(';')?;
                    equations.push(Equation { nvars, lhs, rhs });
                }
                _ => return self.fail(&["`op`", "`eq`", "end of input"]),
            }
        }
        let signature = Signature::new(symbols, self.n_max)?;
        Presentation::new(&name, signature, equations)
    }

    fn term(&mut self, symbols: &[Symbol], nvars: usize) -> Result<Term> {
        let at = self.peek().clone();
        let name = match &at.tok {
            Tok::Ident(s) => s.clone(),
            _ => return self.fail(&["term"]),
        };
        self.bump();
        let index = if name == "x" {
            match self.peek().tok {
                Tok::Nat(n) => {
                    self.bump();
                    Some(n)
                }
                _ => None,
            }
        } else {
            var_index(&name)
        };
        if let Some(i) = index {
            if i == 0 || i > nvars {
                return Err(Error::VariableOutOfRange { index: i, nvars });
            }
            return Ok(Term::Var(i));
        }
        let mut args = Vec::new();
        if self.peek().tok == Tok::Punct('(') {
            self.bump();
            args.push(self.term(symbols, nvars)?);
            while self.peek().tok == Tok::Punct(',') {
                self.bump();
                args.push(self.term(symbols, nvars)?);
            }
            self.punct(')')?;
        }
        let declared =
            symbols
                .iter()
                .find(|s| s.name == name)
                .ok_or_else(|| Error::UnknownSymbol {
                    symbol: name.clone(),
                    line: at.line,
                    column: at.column,
                })?;
        if declared.arity != args.len() {
            return Err(Error::Arity {
                symbol: name,
                declared: declared.arity,
                used: args.len(),
                line: at.line,
                column: at.column,
            });
        }
        Ok(Term::App(name, args))
    }
}

/// Parses with the default truncation bound.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    parse_presentation_with(text, crate::budget::DEFAULT_N_MAX)
}

/// Parses, rejecting symbols of arity above `n_max`.
pub fn parse_presentation_with(text: &str, n_max: usize) -> Result<Presentation> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        n_max,
    };
    p.file()
}

/// Parses a single term over `nvars` variables against `sig`.
pub fn parse_term(text: &str, sig: &Signature, nvars: usize) -> Result<Term> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        n_max: usize::MAX,
    };
    let t = p.term(sig.symbols(), nvars)?;
    if p.peek().tok != Tok::Eof {
        return p.fail(&["end of input"]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_terms_parse_against_a_signature() {
        let p = parse_presentation(gallery_pointed()).unwrap();
        let t = parse_term("x2", &p.signature, 2).unwrap();
        assert_eq!(t, Term::Var(2));
        assert_eq!(
            parse_term("e", &p.signature, 0).unwrap(),
            Term::constant("e")
        );
        assert!(parse_term("e e", &p.signature, 0).is_err());
        assert!(parse_term("x3", &p.signature, 2).is_err());
    }

    fn gallery_pointed() -> &'static str {
        "theory Pointed; op e/0;"
    }

    #[test]
    fn parses_semilattice() {
        let p = parse_presentation(
            "theory Semilattice; op meet/2; eq[2] meet(x1,x1)=x1; \
             eq[2] meet(x1,x2)=meet(x2,x1); eq[3] meet(meet(x1,x2),x3)=meet(x1,meet(x2,x3));",
        )
        .unwrap();
        assert_eq!(p.name, "Semilattice");
        assert_eq!(p.signature.len(), 1);
        assert_eq!(p.equations.len(), 3);
        assert_eq!(p.equations[2].nvars, 3);
    }

    #[test]
    fn parses_pointed() {
        let p = parse_presentation("theory Pointed; op e/0;").unwrap();
        assert_eq!(p.signature.symbols()[0].arity, 0);
        assert!(p.equations.is_empty());
    }

    #[test]
    fn constant_normalises_to_empty_application() {
        let p = parse_presentation("theory P; op e/0; op f/1; eq[1] f(e) = e;").unwrap();
        assert_eq!(p.equations[0].rhs, Term::App("e".into(), vec![]),);
    }

    #[test]
    fn wrong_arity_is_an_arity_error() {
        let err = parse_presentation("theory Bad; op f/2; eq[1] f(x1)=x1;").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Arity {
                    declared: 2,
                    used: 1,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn syntax_error_reports_position_and_expectations() {
        let err = parse_presentation("theory T;\nop f 2;").unwrap_err();
        match err {
            Error::Syntax {
                line,
                column,
                expected,
                ..
            } => {
                assert_eq!((line, column), (2, 6));
                assert_eq!(expected, vec!["`/`".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_presentation("op f/2;").unwrap_err();
        assert!(matches!(
            err,
            Error::Syntax {
                line: 1,
                column: 1,
                ..
            }
        ));
    }

    #[test]
    fn variables_are_range_checked() {
        let err = parse_presentation("theory T; op f/1; eq[1] f(x2)=x1;").unwrap_err();
        assert_eq!(err, Error::VariableOutOfRange { index: 2, nvars: 1 });
    }

    #[test]
    fn split_variable_spelling_is_accepted() {
        let p = parse_presentation("theory T; op f/1; eq[1] f(x 1) = x1;").unwrap();
        assert_eq!(p.equations[0].rhs, Term::Var(1));
    }

    #[test]
    fn rejects_unknown_and_duplicate_symbols() {
        assert!(matches!(
            parse_presentation("theory T; eq[1] g(x1)=x1;"),
            Err(Error::UnknownSymbol { .. })
        ));
        assert!(matches!(
            parse_presentation("theory T; op g/1; op g/2;"),
            Err(Error::DuplicateSymbol(_))
        ));
        assert!(matches!(
            parse_presentation("theory T; op g/4;"),
            Err(Error::ArityAboveBound { .. })
        ));
    }

    fn arb_term(arities: Vec<(String, usize)>, nvars: usize) -> BoxedStrategy<Term> {
        let leaf = (1..=nvars).prop_map(Term::Var).boxed();
        let consts: Vec<Term> = arities
            .iter()
            .filter(|(_, a)| *a == 0)
            .map(|(n, _)| Term::constant(n))
            .collect();
        let leaf = if consts.is_empty() {
            leaf
        } else {
            prop_oneof![leaf, proptest::sample::select(consts)].boxed()
        };
        let ops: Vec<(String, usize)> = arities.into_iter().filter(|(_, a)| *a > 0).collect();
        if ops.is_empty() {
            return leaf;
        }
        leaf.prop_recursive(3, 24, 3, move |inner| {
            let ops = ops.clone();
            proptest::sample::select(ops).prop_flat_map(move |(name, arity)| {
                proptest::collection::vec(inner.clone(), arity)
                    .prop_map(move |args| Term::App(name.clone(), args))
            })
        })
        .boxed()
    }

    fn arb_presentation() -> impl Strategy<Value = Presentation> {
        proptest::collection::vec(0usize..=3, 1..4).prop_flat_map(|arities| {
            let syms: Vec<(String, usize)> = arities
                .iter()
                .enumerate()
                .map(|(i, a)| (format!("f{i}"), *a))
                .collect();
            let eqs = proptest::collection::vec(
                (1usize..=3).prop_flat_map({
                    let syms = syms.clone();
                    move |n| {
                        (
                            Just(n),
                            arb_term(syms.clone(), n),
                            arb_term(syms.clone(), n),
                        )
                    }
                }),
                0..4,
            );
            (Just(syms), eqs).prop_map(|(syms, eqs)| {
                let sig = Signature::new(
                    syms.into_iter()
                        .map(|(name, arity)| Symbol { name, arity })
                        .collect(),
                    3,
                )
                .unwrap();
                let equations = eqs
                    .into_iter()
                    .map(|(nvars, lhs, rhs)| Equation { nvars, lhs, rhs })
                    .collect();
                Presentation::new("Random", sig, equations).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(p in arb_presentation()) {
            let text = p.to_string();
            let back = parse_presentation(&text).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
