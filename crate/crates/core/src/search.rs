//! Bounded brute-force enumeration of operator families and Yang-Baxter
//! tensor families with entries from a finite coefficient set.

use crate::algebra_core::{adjoint_bimodule, Algebra, Bimodule, Cocycle2};
use crate::error::{Error, Result};
use crate::exact_linalg::{Matrix, Scalar};
use crate::family_ops::{check_family, FamilyKind, OperatorFamily};
use crate::report::Report;
use crate::semigroup::FiniteSemigroup;
use crate::yang_baxter::{check_aybf_type1, check_aybf_type2, is_skew_symmetric, TensorFamily};

/// Largest number of candidates a search may enumerate unless told otherwise.
pub const DEFAULT_SEARCH_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchTarget {
    Family(FamilyKind),
    AybfType1,
    /// `skew_only` discards candidates that are not skew-symmetric.
    AybfType2 { skew_only: bool },
}

impl SearchTarget {
    /// Family tags from [`FamilyKind::from_tag`], plus `aybf1`, `aybf2` and `aybf2_skew`.
    pub fn from_tag(tag: &str, lambda: Option<Scalar>) -> Result<Self> {
        Ok(match tag {
            "aybf1" => SearchTarget::AybfType1,
            "aybf2" => SearchTarget::AybfType2 { skew_only: false },
            "aybf2_skew" => SearchTarget::AybfType2 { skew_only: true },
            other => SearchTarget::Family(FamilyKind::from_tag(other, lambda)?),
        })
    }
}

/// The data a search runs over. `bimodule` defaults to the adjoint one.
#[derive(Debug, Clone, Copy)]
pub struct SearchSpace<'a> {
    pub semigroup: &'a FiniteSemigroup,
    pub algebra: &'a Algebra,
    pub bimodule: Option<&'a Bimodule>,
    pub cocycle: Option<&'a Cocycle2>,
    pub coeffs: &'a [Scalar],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Family(OperatorFamily),
    Tensors(TensorFamily),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Candidates examined before stopping.
    pub examined: u64,
    /// Size of the full candidate space.
    pub space_size: u64,
    pub hits: Vec<Solution>,
    /// False when the search stopped at `max_results`.
    pub exhausted: bool,
}

/// Runs the checker that defines `target` on one candidate.
pub fn check_solution(target: &SearchTarget, space: &SearchSpace<'_>, sol: &Solution) -> Result<Report> {
    match (target, sol) {
        (SearchTarget::Family(kind), Solution::Family(t)) => {
            check_family(kind, t, space.algebra, space.bimodule, space.cocycle)
        }
        (SearchTarget::AybfType1, Solution::Tensors(r)) => check_aybf_type1(r, space.algebra),
        (SearchTarget::AybfType2 { .. }, Solution::Tensors(r)) => check_aybf_type2(r, space.algebra),
        _ => Err(Error::Invalid("solution does not match the search target".into())),
    }
}

/// `(rows, cols)` of each candidate map.
fn map_shape(target: &SearchTarget, space: &SearchSpace<'_>) -> (usize, usize) {
    let da = space.algebra.dim();
    let dm = space.bimodule.map_or(da, Bimodule::module_dim);
    match target {
        SearchTarget::Family(FamilyKind::OOperator | FamilyKind::TwistedOOperator) => (da, dm),
        SearchTarget::Family(FamilyKind::Derivation) => (dm, da),
        _ => (da, da),
    }
}

/// Enumerates every candidate in a fixed order (the last entry varies
/// fastest) and keeps those passing the defining identity. Each hit is
/// checked a second time before it is returned.
pub fn search(target: &SearchTarget, space: &SearchSpace<'_>, max_results: usize, bound: u64) -> Result<SearchOutcome> {
    let mut coeffs: Vec<Scalar> = Vec::new();
    for c in space.coeffs {
        if !coeffs.contains(c) {
            coeffs.push(c.clone());
        }
    }
    if coeffs.is_empty() {
        return Err(Error::Invalid("empty coefficient set".into()));
    }
    if let Some(m) = space.bimodule {
        if m.algebra_dim() != space.algebra.dim() {
            return Err(Error::shape("bimodule is over an algebra of a different dimension"));
        }
    }
    let k = space.semigroup.size();
    let (rows, cols) = map_shape(target, space);
    let entries = k * rows * cols;
    let space_size = u32::try_from(entries)
        .ok()
        .and_then(|e| (coeffs.len() as u64).checked_pow(e))
        .filter(|&n| n <= bound)
        .ok_or_else(|| {
            Error::ResourceBound(format!("{} candidates with {entries} entries exceed the bound {bound}", coeffs.len()))
        })?;

    let adj;
    let space = match (target, space.bimodule) {
        (SearchTarget::Family(_), None) => {
            adj = adjoint_bimodule(space.algebra);
            SearchSpace { bimodule: Some(&adj), ..*space }
        }
        _ => *space,
    };
    let mut digits = vec![0usize; entries];
    let mut hits = Vec::new();
    let mut examined = 0;
    loop {
        examined += 1;
        let maps: Vec<Matrix> = (0..k)
            .map(|al| {
                let mut m = Matrix::zeros(rows, cols);
                for i in 0..rows {
                    for j in 0..cols {
                        m.set(i, j, coeffs[digits[(al * rows + i) * cols + j]].clone());
                    }
                }
                m
            })
            .collect();
        let candidate = match target {
            SearchTarget::Family(_) => Some(Solution::Family(OperatorFamily::new(space.semigroup.clone(), maps)?)),
            SearchTarget::AybfType1 => Some(Solution::Tensors(TensorFamily::new(space.semigroup.clone(), maps)?)),
            SearchTarget::AybfType2 { skew_only } => {
                let r = TensorFamily::new(space.semigroup.clone(), maps)?;
                (!skew_only || is_skew_symmetric(&r)).then_some(Solution::Tensors(r))
            }
        };
        if let Some(c) = candidate {
            if check_solution(target, &space, &c)?.passed() {
                check_solution(target, &space, &c)?.ensure("search hit re-passes its checker")?;
                hits.push(c);
                if hits.len() >= max_results {
                    let exhausted = examined == space_size;
                    return Ok(SearchOutcome { examined, space_size, hits, exhausted });
                }
            }
        }
        if !advance(&mut digits, coeffs.len()) {
            return Ok(SearchOutcome { examined, space_size, hits, exhausted: true });
        }
    }
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
