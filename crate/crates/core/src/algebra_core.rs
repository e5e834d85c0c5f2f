//! Finite-dimensional associative algebras, bimodules and Hochschild 2-cocycles.

use crate::error::{Error, Result};
use crate::exact_linalg::{add_into, basis_vec, sub_into, zero_vec, Matrix, Scalar, Tensor3};
use crate::report::{Audit, Report, Violation};
use crate::semigroup::FiniteSemigroup;

/// Associative algebra given by structure constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    dim: usize,
    mult: Tensor3,
    unit: Option<Vec<Scalar>>,
}

/// Bimodule over an algebra: `left` holds `a·u`, `right` holds `u·a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule {
    algebra_dim: usize,
    module_dim: usize,
    left: Tensor3,
    right: Tensor3,
}

/// Bilinear map `H: A × A → M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle2 {
    algebra_dim: usize,
    module_dim: usize,
    h: Tensor3,
}

impl Algebra {
    pub fn new(mult: Tensor3, unit: Option<Vec<Scalar>>) -> Result<Self> {
        let (d1, d2, d3) = mult.dims();
        if d1 != d2 || d2 != d3 {
            return Err(Error::shape(format!("multiplication tensor has dims {:?}", mult.dims())));
        }
        if let Some(u) = &unit {
            if u.len() != d1 {
                return Err(Error::shape(format!("unit has length {}, expected {d1}", u.len())));
            }
        }
        Ok(Algebra { dim: d1, mult, unit })
    }

    /// Like [`Algebra::new`] but also requires associativity and a genuine unit.
    pub fn checked(mult: Tensor3, unit: Option<Vec<Scalar>>) -> Result<Self> {
        let a = Self::new(mult, unit)?;
        a.validate().require("algebra axioms")?;
        Ok(a)
    }

    pub fn zero(dim: usize) -> Self {
        Algebra { dim, mult: Tensor3::zeros(dim, dim, dim), unit: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mult(&self) -> &Tensor3 {
        &self.mult
    }

    pub fn unit(&self) -> Option<&[Scalar]> {
        self.unit.as_deref()
    }

    /// Product of two coordinate vectors.
    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.mult.apply(x, y)
    }

    /// Product of basis elements.
    pub fn mul_basis(&self, i: usize, j: usize) -> &[Scalar] {
        self.mult.fiber(i, j)
    }

    /// Search for a two-sided identity by solving the linear system `e·x = x = x·e`.
    pub fn find_unit(&self) -> Option<Vec<Scalar>> {
        let d = self.dim;
        if d == 0 {
            return Some(Vec::new());
        }
        let mut sys = Matrix::zeros(2 * d * d, d);
        let mut rhs = zero_vec(2 * d * d);
        for j in 0..d {
            for k in 0..d {
                let r = j * d + k;
                for i in 0..d {
                    sys.set(r, i, self.mult.get(i, j, k).clone());
                    sys.set(d * d + r, i, self.mult.get(j, i, k).clone());
                }
                if j == k {
                    rhs[r] = Scalar::one();
                    rhs[d * d + r] = Scalar::one();
                }
            }
        }
        sys.solve(&rhs)
    }

    /// Same algebra with its unit (if any) recorded.
    pub fn with_detected_unit(mut self) -> Self {
        if self.unit.is_none() {
            self.unit = self.find_unit();
        }
        self
    }

    pub fn validate(&self) -> Report {
        let d = self.dim;
        let mut audit = Audit::default();
        let outcome = (|| -> std::result::Result<(), Violation> {
            for a in 0..d {
                for b in 0..d {
                    let ab = self.mul_basis(a, b).to_vec();
                    for c in 0..d {
                        let lhs = self.mult.apply_right_basis(&ab, c);
                        let rhs = self.mult.apply_left_basis(a, self.mul_basis(b, c));
                        audit.expect_eq(&lhs, &rhs, "associativity", &[], &[a, b, c])?;
                    }
                }
            }
            if let Some(u) = &self.unit {
                for a in 0..d {
                    let e = basis_vec(d, a);
                    audit.expect_eq(&self.mult.apply_right_basis(u, a), &e, "left unit", &[], &[a])?;
                    audit.expect_eq(&self.mult.apply_left_basis(a, u), &e, "right unit", &[], &[a])?;
                }
            }
            Ok(())
        })();
        audit.finish(outcome)
    }

    /// Algebra with identical multiplication and the same unit, but the basis
    /// permuted and rescaled by `p` (new basis vector j = Σ_i p[i][j] e_i).
    pub fn change_basis(&self, p: &Matrix) -> Result<Algebra> {
        let pinv = p.inverse().ok_or(Error::Singular { element: 0 })?;
        let d = self.dim;
        let mut mult = Tensor3::zeros(d, d, d);
        for i in 0..d {
            for j in 0..d {
                let prod = self.mul(&p.column(i), &p.column(j));
                mult.fiber_mut(i, j).clone_from_slice(&pinv.apply(&prod));
            }
        }
        Algebra::new(mult, self.unit.as_ref().map(|u| pinv.apply(u)))
    }
}

impl Bimodule {
    pub fn new(left: Tensor3, right: Tensor3) -> Result<Self> {
        let (a, m1, m2) = left.dims();
        let (m3, a2, m4) = right.dims();
        if m1 != m2 || m3 != m1 || m4 != m1 || a2 != a {
            return Err(Error::shape(format!(
                "left action dims {:?} and right action dims {:?} are inconsistent",
                left.dims(),
                right.dims()
            )));
        }
        Ok(Bimodule { algebra_dim: a, module_dim: m1, left, right })
    }

    pub fn zero(algebra_dim: usize, module_dim: usize) -> Self {
        Bimodule {
            algebra_dim,
            module_dim,
            left: Tensor3::zeros(algebra_dim, module_dim, module_dim),
            right: Tensor3::zeros(module_dim, algebra_dim, module_dim),
        }
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn left(&self) -> &Tensor3 {
        &self.left
    }

    pub fn right(&self) -> &Tensor3 {
        &self.right
    }

    /// `a·u`.
    pub fn act_left(&self, a: &[Scalar], u: &[Scalar]) -> Vec<Scalar> {
        self.left.apply(a, u)
    }

    /// `u·a`.
    pub fn act_right(&self, u: &[Scalar], a: &[Scalar]) -> Vec<Scalar> {
        self.right.apply(u, a)
    }

    pub fn validate(&self, alg: &Algebra) -> Result<Report> {
        if alg.dim() != self.algebra_dim {
            return Err(Error::shape(format!(
                "bimodule over a {}-dim algebra, given a {}-dim algebra",
                self.algebra_dim,
                alg.dim()
            )));
        }
        let (da, dm) = (self.algebra_dim, self.module_dim);
        let mut audit = Audit::default();
        let outcome = (|| -> std::result::Result<(), Violation> {
            for a in 0..da {
                for b in 0..da {
                    for u in 0..dm {
                        let lhs = self.left.apply_right_basis(alg.mul_basis(a, b), u);
                        let rhs = self.left.apply_left_basis(a, self.left.fiber(b, u));
                        audit.expect_eq(&lhs, &rhs, "(ab)u = a(bu)", &[], &[a, b, u])?;
                    }
                }
            }
            for a in 0..da {
                for u in 0..dm {
                    for b in 0..da {
                        let lhs = self.right.apply_right_basis(self.left.fiber(a, u), b);
                        let rhs = self.left.apply_left_basis(a, self.right.fiber(u, b));
                        audit.expect_eq(&lhs, &rhs, "(au)b = a(ub)", &[], &[a, u, b])?;
                    }
                }
            }
            for u in 0..dm {
                for a in 0..da {
                    for b in 0..da {
                        let lhs = self.right.apply_right_basis(self.right.fiber(u, a), b);
                        let rhs = self.right.apply_left_basis(u, alg.mul_basis(a, b));
                        audit.expect_eq(&lhs, &rhs, "(ua)b = u(ab)", &[], &[u, a, b])?;
                    }
                }
            }
            Ok(())
        })();
        Ok(audit.finish(outcome))
    }
}

impl Cocycle2 {
    pub fn new(h: Tensor3) -> Result<Self> {
        let (a1, a2, m) = h.dims();
        if a1 != a2 {
            return Err(Error::shape(format!("cocycle tensor has dims {:?}", h.dims())));
        }
        Ok(Cocycle2 { algebra_dim: a1, module_dim: m, h })
    }

    pub fn zero(algebra_dim: usize, module_dim: usize) -> Self {
        Cocycle2 { algebra_dim, module_dim, h: Tensor3::zeros(algebra_dim, algebra_dim, module_dim) }
    }

    /// The multiplication of `a` viewed as a map into the adjoint bimodule.
    pub fn multiplication(a: &Algebra) -> Self {
        Cocycle2 { algebra_dim: a.dim(), module_dim: a.dim(), h: a.mult().clone() }
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn tensor(&self) -> &Tensor3 {
        &self.h
    }

    pub fn scale(&self, c: &Scalar) -> Cocycle2 {
        Cocycle2 { algebra_dim: self.algebra_dim, module_dim: self.module_dim, h: self.h.scale(c) }
    }

    pub fn eval(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        self.h.apply(a, b)
    }

    pub fn validate(&self, alg: &Algebra, m: &Bimodule) -> Result<Report> {
        if alg.dim() != self.algebra_dim || m.algebra_dim() != self.algebra_dim || m.module_dim() != self.module_dim {
            return Err(Error::shape("cocycle dims do not match the algebra and bimodule"));
        }
        let d = self.algebra_dim;
        let mut audit = Audit::default();
        let outcome = (|| -> std::result::Result<(), Violation> {
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        let mut r = m.left.apply_left_basis(a, self.h.fiber(b, c));
                        sub_into(&mut r, &self.h.apply_right_basis(alg.mul_basis(a, b), c));
                        add_into(&mut r, &self.h.apply_left_basis(a, alg.mul_basis(b, c)));
                        sub_into(&mut r, &m.right.apply_right_basis(self.h.fiber(a, b), c));
                        audit.expect_zero(&r, "2-cocycle identity", &[], &[a, b, c])?;
                    }
                }
            }
            Ok(())
        })();
        Ok(audit.finish(outcome))
    }
}

pub fn validate_algebra(a: &Algebra) -> Report {
    a.validate()
}

pub fn validate_bimodule(a: &Algebra, m: &Bimodule) -> Result<Report> {
    m.validate(a)
}

pub fn validate_2cocycle(h: &Cocycle2, a: &Algebra, m: &Bimodule) -> Result<Report> {
    h.validate(a, m)
}

/// `A` acting on itself by multiplication.
pub fn adjoint_bimodule(a: &Algebra) -> Bimodule {
    Bimodule { algebra_dim: a.dim(), module_dim: a.dim(), left: a.mult().clone(), right: a.mult().clone() }
}

/// `A*` with `(a·f)(b) = f(b·a)` and `(f·a)(b) = f(a·b)`, in the dual basis.
pub fn coadjoint_bimodule(a: &Algebra) -> Bimodule {
    let d = a.dim();
    let mut left = Tensor3::zeros(d, d, d);
    let mut right = Tensor3::zeros(d, d, d);
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                // (e_i · f_k)(e_j) = f_k(e_j e_i), (f_k · e_i)(e_j) = f_k(e_i e_j)
                left.set(i, k, j, a.mult().get(j, i, k).clone());
                right.set(k, i, j, a.mult().get(i, j, k).clone());
            }
        }
    }
    Bimodule { algebra_dim: d, module_dim: d, left, right }
}

/// `A ⋉_H M` on `A ⊕ M`, with A-coordinates first.
pub fn semidirect_product(a: &Algebra, m: &Bimodule, h: Option<&Cocycle2>) -> Result<Algebra> {
    if m.algebra_dim() != a.dim() {
        return Err(Error::shape("bimodule is over an algebra of a different dimension"));
    }
    if let Some(h) = h {
        h.validate(a, m)?.require("H is a 2-cocycle")?;
    }
    let (da, dm) = (a.dim(), m.module_dim());
    let n = da + dm;
    let mut mult = Tensor3::zeros(n, n, n);
    for i in 0..da {
        for j in 0..da {
            let f = mult.fiber_mut(i, j);
            f[..da].clone_from_slice(a.mul_basis(i, j));
            if let Some(h) = h {
                f[da..].clone_from_slice(h.tensor().fiber(i, j));
            }
        }
        for v in 0..dm {
            mult.fiber_mut(i, da + v)[da..].clone_from_slice(m.left().fiber(i, v));
            mult.fiber_mut(da + v, i)[da..].clone_from_slice(m.right().fiber(v, i));
        }
    }
    let out = Algebra::new(mult, None)?;
    out.validate().ensure("semidirect product is associative")?;
    Ok(out)
}

/// Coordinates of `x ⊗ α` in `V ⊗ kΩ`, blocked by semigroup element.
#[inline]
pub fn tensor_index(dim: usize, x: usize, alpha: usize) -> usize {
    alpha * dim + x
}

/// `A ⊗ kΩ` and, if given, `M ⊗ kΩ` as a bimodule over it.
pub fn extend_by_semigroup(
    a: &Algebra,
    m: Option<&Bimodule>,
    s: &FiniteSemigroup,
) -> Result<(Algebra, Option<Bimodule>)> {
    let (d, n) = (a.dim(), s.size());
    let big = d * n;
    let mut mult = Tensor3::zeros(big, big, big);
    for al in 0..n {
        for be in 0..n {
            let ab = s.mul(al, be);
            for x in 0..d {
                for y in 0..d {
                    let dst = mult.fiber_mut(tensor_index(d, x, al), tensor_index(d, y, be));
                    dst[ab * d..(ab + 1) * d].clone_from_slice(a.mul_basis(x, y));
                }
            }
        }
    }
    let unit = match (a.unit(), s.unit()) {
        (Some(u), Some(e)) => {
            let mut v = zero_vec(big);
            v[e * d..(e + 1) * d].clone_from_slice(u);
            Some(v)
        }
        _ => None,
    };
    let alg = Algebra::new(mult, unit)?;
    alg.validate().ensure("A ⊗ kΩ is an algebra")?;

    let module = match m {
        None => None,
        Some(m) => {
            if m.algebra_dim() != d {
                return Err(Error::shape("bimodule is over an algebra of a different dimension"));
            }
            let dm = m.module_dim();
            let bm = dm * n;
            let mut left = Tensor3::zeros(big, bm, bm);
            let mut right = Tensor3::zeros(bm, big, bm);
            for al in 0..n {
                for be in 0..n {
                    let ab = s.mul(al, be);
                    let ba = s.mul(be, al);
                    for x in 0..d {
                        for u in 0..dm {
                            left.fiber_mut(tensor_index(d, x, al), tensor_index(dm, u, be))[ab * dm..(ab + 1) * dm]
                                .clone_from_slice(m.left().fiber(x, u));
                            right.fiber_mut(tensor_index(dm, u, be), tensor_index(d, x, al))[ba * dm..(ba + 1) * dm]
                                .clone_from_slice(m.right().fiber(u, x));
                        }
                    }
                }
            }
            let bim = Bimodule::new(left, right)?;
            bim.validate(&alg)?.ensure("M ⊗ kΩ is a bimodule")?;
            Some(bim)
        }
    };
    Ok((alg, module))
}

/// `Ĥ(a⊗α, b⊗β) = H(a,b) ⊗ αβ`.
pub fn cocycle_extension(h: &Cocycle2, s: &FiniteSemigroup) -> Cocycle2 {
    let (d, dm, n) = (h.algebra_dim(), h.module_dim(), s.size());
    let mut t = Tensor3::zeros(d * n, d * n, dm * n);
    for al in 0..n {
        for be in 0..n {
            let ab = s.mul(al, be);
            for x in 0..d {
                for y in 0..d {
                    t.fiber_mut(tensor_index(d, x, al), tensor_index(d, y, be))[ab * dm..(ab + 1) * dm]
                        .clone_from_slice(h.tensor().fiber(x, y));
                }
            }
        }
    }
    Cocycle2 { algebra_dim: d * n, module_dim: dm * n, h: t }
}

/// `A` with a unit adjoined as the last basis vector, unless `A` already has one.
///
/// Returns the algebra and whether a new basis vector was added.
pub fn unitization(a: &Algebra) -> (Algebra, bool) {
    if let Some(u) = a.unit().map(<[Scalar]>::to_vec).or_else(|| a.find_unit()) {
        let mut out = a.clone();
        out.unit = Some(u);
        return (out, false);
    }
    let d = a.dim();
    let n = d + 1;
    let mut mult = Tensor3::zeros(n, n, n);
    for i in 0..d {
        for j in 0..d {
            mult.fiber_mut(i, j)[..d].clone_from_slice(a.mul_basis(i, j));
        }
    }
    for i in 0..n {
        mult.set(i, d, i, Scalar::one());
        mult.set(d, i, i, Scalar::one());
    }
    (Algebra { dim: n, mult, unit: Some(basis_vec(n, d)) }, true)
}

/// Matrix of left multiplication `x ↦ a·x` on an algebra.
pub fn left_mult_matrix(alg: &Algebra, a: &[Scalar]) -> Matrix {
    alg.mult().left_multiplication(a)
}

/// Matrix of right multiplication `x ↦ x·a` on an algebra.
pub fn right_mult_matrix(alg: &Algebra, a: &[Scalar]) -> Matrix {
    alg.mult().right_multiplication(a)
}

/// `H(a, T e_j)` for every basis `j`, as a matrix `M → M`, for fixed `a ∈ A`
/// and `T: M → A`.
pub(crate) fn cocycle_left_fixed(h: &Cocycle2, a: &[Scalar], t: &Matrix) -> Matrix {
    let cols: Vec<Vec<Scalar>> = (0..t.cols()).map(|j| h.eval(a, &t.column(j))).collect();
    crate::exact_linalg::assemble_linear_map(&cols, t.cols(), h.module_dim()).expect("consistent shapes")
}

/// `H(T e_j, a)` for every basis `j`.
pub(crate) fn cocycle_right_fixed(h: &Cocycle2, t: &Matrix, a: &[Scalar]) -> Matrix {
    let cols: Vec<Vec<Scalar>> = (0..t.cols()).map(|j| h.eval(&t.column(j), a)).collect();
    crate::exact_linalg::assemble_linear_map(&cols, t.cols(), h.module_dim()).expect("consistent shapes")
}
