//! Finite semigroups given by multiplication tables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{Audit, Report, Violation};

/// A finite semigroup Ω on `{0, …, size-1}`.
///
/// [`FiniteSemigroup::new`] checks shape and range only; use
/// [`FiniteSemigroup::checked`] to also require associativity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteSemigroup {
    size: usize,
    table: Vec<Vec<usize>>,
    unit: Option<usize>,
}

/// Associativity verdict plus the unit, if one exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemigroupReport {
    pub report: Report,
    pub unit: Option<usize>,
}

impl FiniteSemigroup {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let size = table.len();
        if size == 0 {
            return Err(Error::shape("a semigroup needs at least one element"));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != size {
                return Err(Error::shape(format!("row {a} has length {}, expected {size}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= size) {
                return Err(Error::OutOfRange { index: bad, size });
            }
        }
        let unit = (0..size).find(|&e| (0..size).all(|a| table[e][a] == a && table[a][e] == a));
        Ok(FiniteSemigroup { size, table, unit })
    }

    /// Like [`FiniteSemigroup::new`] but rejects non-associative tables.
    pub fn checked(table: Vec<Vec<usize>>) -> Result<Self> {
        let s = Self::new(table)?;
        s.validate().report.require("semigroup associativity")?;
        Ok(s)
    }

    /// Build from a table and a claimed unit, which must be a two-sided identity.
    pub fn with_unit(table: Vec<Vec<usize>>, unit: Option<usize>) -> Result<Self> {
        let s = Self::new(table)?;
        if let Some(u) = unit {
            if u >= s.size {
                return Err(Error::OutOfRange { index: u, size: s.size });
            }
            if s.unit != Some(u) {
                return Err(Error::Invalid(format!("element {u} is not a two-sided identity")));
            }
        }
        Ok(s)
    }

    pub fn trivial() -> Self {
        Self::new(vec![vec![0]]).expect("valid table")
    }

    /// Cyclic group Z/n written additively.
    pub fn cyclic(n: usize) -> Self {
        Self::new((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).expect("valid table")
    }

    /// `{0, …, n-1}` under multiplication mod n.
    pub fn mult_mod(n: usize) -> Self {
        Self::new((0..n).map(|a| (0..n).map(|b| (a * b) % n).collect()).collect()).expect("valid table")
    }

    /// αβ = α.
    pub fn left_zero(n: usize) -> Self {
        Self::new((0..n).map(|a| vec![a; n]).collect()).expect("valid table")
    }

    /// αβ = β.
    pub fn right_zero(n: usize) -> Self {
        Self::new((0..n).map(|_| (0..n).collect()).collect()).expect("valid table")
    }

    /// Adjoin a fresh identity as the last element.
    pub fn with_adjoined_unit(&self) -> Self {
        let n = self.size;
        let mut table: Vec<Vec<usize>> = self.table.iter().map(|r| {
            let mut r = r.clone();
            r.push(0);
            r
        }).collect();
        for (a, row) in table.iter_mut().enumerate() {
            row[n] = a;
        }
        table.push((0..=n).collect());
        Self::new(table).expect("valid table")
    }

    /// Direct product, with (a, b) at index `a * other.size + b`.
    pub fn direct_product(&self, other: &FiniteSemigroup) -> Self {
        let (n, m) = (self.size, other.size);
        let table = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| self.table[x / m][y / m] * m + other.table[x % m][y % m])
                    .collect()
            })
            .collect();
        Self::new(table).expect("valid table")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    /// Unchecked table lookup for indices known to be in range.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn product(&self, a: usize, b: usize) -> Result<usize> {
        for x in [a, b] {
            if x >= self.size {
                return Err(Error::OutOfRange { index: x, size: self.size });
            }
        }
        Ok(self.table[a][b])
    }

    /// Product of a nonempty word.
    pub fn product_of(&self, word: &[usize]) -> usize {
        let (first, rest) = word.split_first().expect("nonempty word");
        rest.iter().fold(*first, |acc, &x| self.table[acc][x])
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.size).all(|a| (0..self.size).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn validate(&self) -> SemigroupReport {
        let mut audit = Audit::default();
        let outcome = (|| -> std::result::Result<(), Violation> {
            for a in 0..self.size {
                for b in 0..self.size {
                    for c in 0..self.size {
                        let l = self.table[self.table[a][b]][c];
                        let r = self.table[a][self.table[b][c]];
                        audit.expect_bool(l == r, "associativity", &[a, b, c], &[])?;
                    }
                }
            }
            Ok(())
        })();
        SemigroupReport { report: audit.finish(outcome), unit: self.unit }
    }

    /// All words of length `n`, in lexicographic order.
    pub fn tuples(&self, n: usize) -> Tuples {
        Tuples::new(self.size, n)
    }
}

pub fn validate_semigroup(s: &FiniteSemigroup) -> SemigroupReport {
    s.validate()
}

pub fn product(s: &FiniteSemigroup, a: usize, b: usize) -> Result<usize> {
    s.product(a, b)
}

/// Lexicographic enumeration of `{0..base}^len`.
#[derive(Debug, Clone)]
pub struct Tuples {
    base: usize,
    current: Option<Vec<usize>>,
}

impl Tuples {
    pub fn new(base: usize, len: usize) -> Self {
        let current = if base == 0 && len > 0 { None } else { Some(vec![0; len]) };
        Tuples { base, current }
    }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let mut nxt = cur.clone();
        let mut i = nxt.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            nxt[i] += 1;
            if nxt[i] < self.base {
                self.current = Some(nxt);
                break;
            }
            nxt[i] = 0;
        }
        Some(cur)
    }
}

/// Rank of a tuple in the lexicographic order of [`Tuples`].
pub fn tuple_index(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_monoid() {
        let s = FiniteSemigroup::trivial();
        let r = s.validate();
        assert!(r.report.passed());
        assert_eq!(r.unit, Some(0));
        assert_eq!(s.product(0, 0).unwrap(), 0);
    }

    #[test]
    fn multiplicative_z2() {
        let s = FiniteSemigroup::new(vec![vec![0, 0], vec![0, 1]]).unwrap();
        let r = s.validate();
        assert!(r.report.passed());
        assert_eq!(r.report.checks, 8);
        assert_eq!(r.unit, Some(1));
        assert_eq!(s.product(1, 1).unwrap(), 1);
    }

    #[test]
    fn left_zero_has_no_unit() {
        let s = FiniteSemigroup::left_zero(2);
        let r = s.validate();
        assert!(r.report.passed());
        assert_eq!(r.unit, None);
        assert_eq!(s.product(0, 1).unwrap(), 0);
        assert!(!s.is_commutative());
    }

    #[test]
    fn malformed_tables() {
        assert!(matches!(FiniteSemigroup::new(vec![vec![0, 2], vec![0, 1]]), Err(Error::OutOfRange { index: 2, .. })));
        assert!(FiniteSemigroup::new(vec![vec![0], vec![0, 1]]).is_err());
        assert!(FiniteSemigroup::trivial().product(0, 1).is_err());
        assert!(FiniteSemigroup::with_unit(vec![vec![0, 0], vec![0, 1]], Some(0)).is_err());
    }

    #[test]
    fn first_nonassociative_triple() {
        // a·b = 1 for a = b = 0, otherwise 0.
        let s = FiniteSemigroup::new(vec![vec![1, 0], vec![0, 0]]).unwrap();
        let r = s.validate().report;
        assert_eq!(r.violation.unwrap().elements, vec![0, 0, 1]);
        assert!(FiniteSemigroup::checked(vec![vec![1, 0], vec![0, 0]]).is_err());
    }

    #[test]
    fn adjoined_unit_and_products() {
        let s = FiniteSemigroup::left_zero(2).with_adjoined_unit();
        assert_eq!(s.unit(), Some(2));
        assert!(s.validate().report.passed());
        let p = FiniteSemigroup::cyclic(2).direct_product(&FiniteSemigroup::left_zero(2));
        assert!(p.validate().report.passed());
        assert_eq!(p.size(), 4);
    }

    #[test]
    fn tuples_are_lexicographic() {
        let t: Vec<_> = Tuples::new(2, 2).collect();
        assert_eq!(t, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(Tuples::new(3, 0).count(), 1);
        for (i, x) in Tuples::new(3, 3).enumerate() {
            assert_eq!(tuple_index(&x, 3), i);
        }
    }

    proptest! {
        #[test]
        fn standard_families_are_associative(n in 1usize..6) {
            for s in [FiniteSemigroup::cyclic(n), FiniteSemigroup::mult_mod(n),
                      FiniteSemigroup::left_zero(n), FiniteSemigroup::right_zero(n)] {
                prop_assert!(s.validate().report.passed());
                for w in s.tuples(3) {
                    prop_assert_eq!(s.mul(s.mul(w[0], w[1]), w[2]), s.mul(w[0], s.mul(w[1], w[2])));
                }
            }
        }
    }
}
