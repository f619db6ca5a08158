//! Terms, signatures and presentations of one-sorted algebraic theories.
//!
//! Variables are positional: a term over `n` variables mentions only
//! `x1 … xn`. Constants are applications with no arguments and print without
//! parentheses.

mod parser;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget::DEFAULT_N_MAX;
use crate::error::{Error, Result};

pub use parser::{parse_presentation, parse_presentation_with, parse_term};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>, n_max: usize) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &symbols {
            if !seen.insert(s.name.as_str()) {
                return Err(Error::DuplicateSymbol(s.name.clone()));
            }
            if s.arity > n_max {
                return Err(Error::ArityAboveBound {
                    symbol: s.name.clone(),
                    arity: s.arity,
                    n_max,
                });
            }
        }
        Ok(Signature { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    /// 1-based variable index.
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    /// App-nesting depth. Variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) if args.is_empty() => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Largest variable index mentioned (0 for ground terms).
    pub fn max_var(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::App(_, args) => args.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    /// Checks arities against `sig` and variable indices against `nvars`.
    pub fn check(&self, sig: &Signature, nvars: usize) -> Result<()> {
        match self {
            Term::Var(i) => {
                if *i == 0 || *i > nvars {
                    return Err(Error::VariableOutOfRange { index: *i, nvars });
                }
                Ok(())
            }
            Term::App(f, args) => {
                let arity = sig.arity_of(f).ok_or_else(|| Error::UnknownSymbol {
                    symbol: f.clone(),
                    line: 0,
                    column: 0,
                })?;
                if arity != args.len() {
                    return Err(Error::Arity {
                        symbol: f.clone(),
                        declared: arity,
                        used: args.len(),
                        line: 0,
                        column: 0,
                    });
                }
                args.iter().try_for_each(|a| a.check(sig, nvars))
            }
        }
    }

    /// Simultaneous substitution `t[s_1/x_1, …, s_n/x_n]`.
    ///
    /// `self` is read as a term over `subs.len()` variables; a variable outside
    /// that range is an [`Error::ArityMismatch`].
    pub fn substitute(&self, subs: &[Term]) -> Result<Term> {
        match self {
            Term::Var(i) => subs
                .get(i.wrapping_sub(1))
                .cloned()
                .ok_or(Error::ArityMismatch {
                    expected: *i,
                    found: subs.len(),
                }),
            Term::App(f, args) => Ok(Term::App(
                f.clone(),
                args.iter()
                    .map(|a| a.substitute(subs))
                    .collect::<Result<_>>()?,
            )),
        }
    }

    fn structural_cmp(&self, other: &Term) -> Ordering {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::Var(_), Term::App(..)) => Ordering::Less,
            (Term::App(..), Term::Var(_)) => Ordering::Greater,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f.cmp(g).then(xs.len().cmp(&ys.len())).then_with(|| {
                    xs.iter()
                        .zip(ys)
                        .map(|(x, y)| x.cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                })
            }
        }
    }
}

/// Canonical order: depth first, then left-to-right lexicographic with
/// variables before applications.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.depth()
            .cmp(&other.depth())
            .then_with(|| self.structural_cmp(other))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(name, args) if args.is_empty() => write!(f, "{name}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// `lhs = rhs`, both sides over `nvars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub nvars: usize,
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub name: String,
    pub signature: Signature,
    pub equations: Vec<Equation>,
}

impl Presentation {
    /// Builds a presentation, checking every equation against the signature.
    pub fn new(name: &str, signature: Signature, equations: Vec<Equation>) -> Result<Self> {
        for eq in &equations {
            eq.lhs.check(&signature, eq.nvars)?;
            eq.rhs.check(&signature, eq.nvars)?;
        }
        Ok(Presentation {
            name: name.to_string(),
            signature,
            equations,
        })
    }

    /// Parses the DSL with the default truncation bound.
    pub fn parse(text: &str) -> Result<Self> {
        parse_presentation_with(text, DEFAULT_N_MAX)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theory {};", self.name)?;
        for s in self.signature.symbols() {
            writeln!(f, "op {}/{};", s.name, s.arity)?;
        }
        for eq in &self.equations {
            writeln!(f, "eq[{}] {} = {};", eq.nvars, eq.lhs, eq.rhs)?;
        }
        Ok(())
    }
}

/// Free-function form of [`Term::substitute`].
pub fn term_substitute(t: &Term, subs: &[Term]) -> Result<Term> {
    t.substitute(subs)
}

/// All well-formed terms over `nvars` variables with nesting at most `depth`,
/// sorted in canonical order.
pub fn enumerate_terms(p: &Presentation, nvars: usize, depth: usize) -> Vec<Term> {
    let sig = &p.signature;
    let mut level: BTreeSet<Term> = (1..=nvars).map(Term::Var).collect();
    for s in sig.symbols().iter().filter(|s| s.arity == 0) {
        level.insert(Term::constant(&s.name));
    }
    for _ in 0..depth {
        let current: Vec<Term> = level.iter().cloned().collect();
        for s in sig.symbols().iter().filter(|s| s.arity > 0) {
            for args in tuples(&current, s.arity) {
                level.insert(Term::App(s.name.clone(), args));
            }
        }
    }
    level.into_iter().collect()
}

/// All `k`-tuples over `items` in lexicographic order of positions.
pub(crate) fn tuples<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::with_capacity(k)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for it in items {
                let mut v = prefix.clone();
                v.push(it.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}
