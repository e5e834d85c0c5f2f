//! Small named instances used by the tests, the acceptance suite and the CLI
//! `search` command.

use crate::algebra_core::Algebra;
use crate::exact_linalg::{basis_vec, Scalar, Tensor3};
use crate::semigroup::FiniteSemigroup;

fn algebra_from_products(dim: usize, products: &[(usize, usize, usize, i64)], unit: Option<usize>) -> Algebra {
    let mut m = Tensor3::zeros(dim, dim, dim);
    for &(i, j, k, c) in products {
        m.set(i, j, k, Scalar::int(c));
    }
    Algebra::checked(m, unit.map(|u| basis_vec(dim, u))).expect("catalogue algebra is valid")
}

/// The base field: `e·e = e`.
pub fn field() -> Algebra {
    algebra_from_products(1, &[(0, 0, 0, 1)], Some(0))
}

/// `e1e1 = e1`, `e1e2 = e2`, other products zero. Non-unital.
pub fn two_dim_left_unit() -> Algebra {
    algebra_from_products(2, &[(0, 0, 0, 1), (0, 1, 1, 1)], None)
}

/// Basis `{x, x²}` with `x·x = x²` and all other products zero.
pub fn nilpotent_x() -> Algebra {
    algebra_from_products(2, &[(0, 0, 1, 1)], None)
}

/// `k[ε]/(ε²)` on `{1, ε}`.
pub fn dual_numbers() -> Algebra {
    algebra_from_products(2, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)], Some(0))
}

/// `k × k` on its two idempotents.
pub fn diagonal2() -> Algebra {
    let mut a = algebra_from_products(2, &[(0, 0, 0, 1), (1, 1, 1, 1)], None);
    a = a.with_detected_unit();
    a
}

/// `k[x]/(x^n)` on `{1, x, …, x^{n-1}}`.
pub fn truncated_polynomials(n: usize) -> Algebra {
    let mut prods = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + j < n {
                prods.push((i, j, i + j, 1));
            }
        }
    }
    algebra_from_products(n, &prods, Some(0))
}

/// Upper triangular 2×2 matrices on `{E11, E12, E22}`.
pub fn upper_triangular() -> Algebra {
    let mut a = algebra_from_products(3, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 2, 1, 1), (2, 2, 2, 1)], None);
    a = a.with_detected_unit();
    a
}

/// Algebras of dimension at most 3 covering unital, non-unital, nilpotent
/// and non-commutative cases.
pub fn algebras() -> Vec<Algebra> {
    vec![
        field(),
        Algebra::zero(1),
        Algebra::zero(2),
        two_dim_left_unit(),
        nilpotent_x(),
        dual_numbers(),
        diagonal2(),
        truncated_polynomials(3),
        upper_triangular(),
    ]
}

/// Semigroups of size at most 3, including non-commutative and non-unital ones.
pub fn semigroups() -> Vec<FiniteSemigroup> {
    vec![
        FiniteSemigroup::trivial(),
        FiniteSemigroup::cyclic(2),
        FiniteSemigroup::mult_mod(2),
        FiniteSemigroup::left_zero(2),
        FiniteSemigroup::right_zero(2),
        FiniteSemigroup::left_zero(2).with_adjoined_unit(),
        FiniteSemigroup::cyclic(3),
        FiniteSemigroup::mult_mod(3),
    ]
}
