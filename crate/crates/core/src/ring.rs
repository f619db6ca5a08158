//! Finite commutative rings given by their tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite commutative ring with unit, elements `0..size` indexed into the
/// tables. Axioms are checked exhaustively at construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteRing {
    names: Vec<String>,
    add: Vec<usize>,
    mul: Vec<usize>,
    zero: usize,
    one: usize,
    neg: Vec<usize>,
}

impl FiniteRing {
    pub fn new(
        names: Vec<String>,
        add: Vec<usize>,
        mul: Vec<usize>,
        zero: usize,
        one: usize,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 || add.len() != n * n || mul.len() != n * n || zero >= n || one >= n {
            return Err(Error::InvalidInput("malformed ring tables".into()));
        }
        if add.iter().chain(&mul).any(|&x| x >= n) {
            return Err(Error::InvalidInput("ring table entry out of range".into()));
        }
        let a = |x: usize, y: usize| add[x * n + y];
        let m = |x: usize, y: usize| mul[x * n + y];
        let mut neg = vec![usize::MAX; n];
        for x in 0..n {
            if a(x, zero) != x || m(x, one) != x {
                return Err(Error::InvalidInput(format!("unit laws fail at {x}")));
            }
            neg[x] = (0..n)
                .find(|&y| a(x, y) == zero)
                .ok_or_else(|| Error::InvalidInput(format!("{x} has no additive inverse")))?;
            for y in 0..n {
                if a(x, y) != a(y, x) || m(x, y) != m(y, x) {
                    return Err(Error::InvalidInput(format!("not commutative at ({x},{y})")));
                }
                for z in 0..n {
                    if a(a(x, y), z) != a(x, a(y, z))
                        || m(m(x, y), z) != m(x, m(y, z))
                        || m(x, a(y, z)) != a(m(x, y), m(x, z))
                    {
                        return Err(Error::InvalidInput(format!(
                            "ring axioms fail at ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteRing {
            names,
            add,
            mul,
            zero,
            one,
            neg,
        })
    }

    /// Integers modulo `m`.
    pub fn zmod(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("modulus {m} < 2")));
        }
        let names = (0..m).map(|x| x.to_string()).collect();
        let mut add = Vec::with_capacity(m * m);
        let mut mul = Vec::with_capacity(m * m);
        for x in 0..m {
            for y in 0..m {
                add.push((x + y) % m);
                mul.push((x * y) % m);
            }
        }
        Self::new(names, add, mul, 0, 1 % m)
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.names.len() + y]
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.names.len() + y]
    }

    #[inline]
    pub fn neg(&self, x: usize) -> usize {
        self.neg[x]
    }

    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }

    /// `D(k)`: tuples whose pairwise products (squares included) vanish.
    pub fn nil_square_tuples(&self, k: usize) -> Vec<Vec<usize>> {
        crate::theory::tuples(&(0..self.size()).collect::<Vec<_>>(), k)
            .into_iter()
            .filter(|d| {
                d.iter()
                    .all(|&x| d.iter().all(|&y| self.mul(x, y) == self.zero))
            })
            .collect()
    }
}
