//! Operator families `{T_α}` indexed by a finite semigroup: checks,
//! inversions, lifts, collapses and the Reynolds series.

use num_bigint::BigUint;

use crate::algebra_core::{
    adjoint_bimodule, cocycle_extension, extend_by_semigroup, semidirect_product, tensor_index, Algebra, Bimodule,
    Cocycle2,
};
use crate::error::{Error, Result};
use crate::exact_linalg::{add_into, axpy, basis_vec, dot, sub_into, vec_add, zero_vec, Matrix, Scalar, Tensor3};
use crate::report::{Audit, Report, Violation};
use crate::semigroup::FiniteSemigroup;

/// One linear map per semigroup element, all of shape `codomain × domain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorFamily {
    semigroup: FiniteSemigroup,
    domain_dim: usize,
    codomain_dim: usize,
    maps: Vec<Matrix>,
}

/// Which defining identity a family is checked against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyKind {
    RotaBaxter,
    OOperator,
    TwistedOOperator,
    Nijenhuis,
    Reynolds,
    Derivation,
    WeightedRb(Scalar),
}

impl FamilyKind {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilyKind::RotaBaxter => "rota_baxter",
            FamilyKind::OOperator => "o_operator",
            FamilyKind::TwistedOOperator => "twisted_o_operator",
            FamilyKind::Nijenhuis => "nijenhuis",
            FamilyKind::Reynolds => "reynolds",
            FamilyKind::Derivation => "derivation",
            FamilyKind::WeightedRb(_) => "weighted_rb",
        }
    }

    /// Parse a tag; `weighted_rb` needs `lambda`.
    pub fn from_tag(tag: &str, lambda: Option<Scalar>) -> Result<Self> {
        Ok(match tag {
            "rota_baxter" => FamilyKind::RotaBaxter,
            "o_operator" => FamilyKind::OOperator,
            "twisted_o_operator" => FamilyKind::TwistedOOperator,
            "nijenhuis" => FamilyKind::Nijenhuis,
            "reynolds" => FamilyKind::Reynolds,
            "derivation" => FamilyKind::Derivation,
            "weighted_rb" => FamilyKind::WeightedRb(
                lambda.ok_or_else(|| Error::Invalid("weighted_rb needs a weight lambda".into()))?,
            ),
            other => return Err(Error::Invalid(format!("unknown family kind '{other}'"))),
        })
    }
}

impl OperatorFamily {
    pub fn new(semigroup: FiniteSemigroup, maps: Vec<Matrix>) -> Result<Self> {
        if maps.len() != semigroup.size() {
            return Err(Error::shape(format!("{} maps for a semigroup of size {}", maps.len(), semigroup.size())));
        }
        let (r, c) = (maps[0].rows(), maps[0].cols());
        if let Some(bad) = maps.iter().position(|m| m.rows() != r || m.cols() != c) {
            return Err(Error::shape(format!("map {bad} does not have shape {r}×{c}")));
        }
        Ok(OperatorFamily { semigroup, domain_dim: c, codomain_dim: r, maps })
    }

    pub fn constant(semigroup: FiniteSemigroup, m: Matrix) -> Self {
        let maps = vec![m; semigroup.size()];
        Self::new(semigroup, maps).expect("uniform shapes")
    }

    pub fn zero(semigroup: FiniteSemigroup, domain_dim: usize, codomain_dim: usize) -> Self {
        Self::constant(semigroup, Matrix::zeros(codomain_dim, domain_dim))
    }

    pub fn identity(semigroup: FiniteSemigroup, dim: usize) -> Self {
        Self::constant(semigroup, Matrix::identity(dim))
    }

    /// `T_α = c_α · id`.
    pub fn scalar(semigroup: FiniteSemigroup, dim: usize, coeffs: &[Scalar]) -> Result<Self> {
        let maps = coeffs.iter().map(|c| Matrix::scalar(dim, c)).collect();
        Self::new(semigroup, maps)
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn map(&self, alpha: usize) -> &Matrix {
        &self.maps[alpha]
    }

    /// Same semigroup, new maps.
    pub fn with_maps(&self, maps: Vec<Matrix>) -> Result<Self> {
        Self::new(self.semigroup.clone(), maps)
    }

    pub fn map_each(&self, f: impl Fn(usize, &Matrix) -> Matrix) -> Result<Self> {
        self.with_maps(self.maps.iter().enumerate().map(|(a, m)| f(a, m)).collect())
    }

    /// Columns `T_α e_u`, indexed `[α][u]`.
    fn images(&self) -> Vec<Vec<Vec<Scalar>>> {
        self.maps.iter().map(|m| (0..m.cols()).map(|j| m.column(j)).collect()).collect()
    }
}

/// A (possibly twisted) O-operator family together with its algebra,
/// bimodule and cocycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedContext {
    pub algebra: Algebra,
    pub bimodule: Bimodule,
    pub cocycle: Option<Cocycle2>,
    pub family: OperatorFamily,
}

impl TwistedContext {
    pub fn new(algebra: Algebra, bimodule: Bimodule, cocycle: Option<Cocycle2>, family: OperatorFamily) -> Result<Self> {
        twisted_shapes(&family, &algebra, &bimodule, cocycle.as_ref())?;
        Ok(TwistedContext { algebra, bimodule, cocycle, family })
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        self.family.semigroup()
    }

    pub fn check(&self) -> Report {
        check_twisted_o_family(&self.family, &self.algebra, &self.bimodule, self.cocycle.as_ref())
            .expect("shapes verified at construction")
    }

    /// `H(a, b)`, or zero when untwisted.
    pub fn h(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        match &self.cocycle {
            Some(h) => h.eval(a, b),
            None => zero_vec(self.bimodule.module_dim()),
        }
    }

    /// Same data with the family replaced.
    pub fn with_family(&self, family: OperatorFamily) -> Result<Self> {
        Self::new(self.algebra.clone(), self.bimodule.clone(), self.cocycle.clone(), family)
    }
}

fn twisted_shapes(t: &OperatorFamily, a: &Algebra, m: &Bimodule, h: Option<&Cocycle2>) -> Result<()> {
    if m.algebra_dim() != a.dim() {
        return Err(Error::shape("bimodule is over an algebra of a different dimension"));
    }
    if t.domain_dim() != m.module_dim() || t.codomain_dim() != a.dim() {
        return Err(Error::shape(format!(
            "family maps are {}×{}, expected {}×{} (M → A)",
            t.codomain_dim(),
            t.domain_dim(),
            a.dim(),
            m.module_dim()
        )));
    }
    if let Some(h) = h {
        if h.algebra_dim() != a.dim() || h.module_dim() != m.module_dim() {
            return Err(Error::shape("cocycle dims do not match the algebra and bimodule"));
        }
    }
    Ok(())
}

fn square_shapes(t: &OperatorFamily, a: &Algebra) -> Result<()> {
    if t.domain_dim() != a.dim() || t.codomain_dim() != a.dim() {
        return Err(Error::shape(format!(
            "family maps are {}×{}, expected square maps on a {}-dim algebra",
            t.codomain_dim(),
            t.domain_dim(),
            a.dim()
        )));
    }
    Ok(())
}

/// `T_α(u)·T_β(v) = T_{αβ}(T_α(u)·v + u·T_β(v) + H(T_α u, T_β v))`.
pub fn check_twisted_o_family(t: &OperatorFamily, a: &Algebra, m: &Bimodule, h: Option<&Cocycle2>) -> Result<Report> {
    twisted_shapes(t, a, m, h)?;
    let s = t.semigroup();
    let img = t.images();
    let dm = m.module_dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let ab = s.mul(al, be);
                for u in 0..dm {
                    let tu = &img[al][u];
                    for v in 0..dm {
                        let tv = &img[be][v];
                        let lhs = a.mul(tu, tv);
                        let mut inner = m.left().apply_right_basis(tu, v);
                        add_into(&mut inner, &m.right().apply_left_basis(u, tv));
                        if let Some(h) = h {
                            add_into(&mut inner, &h.eval(tu, tv));
                        }
                        let rhs = t.map(ab).apply(&inner);
                        audit.expect_eq(&lhs, &rhs, "twisted O-operator family identity", &[al, be], &[u, v])?;
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// Rota-Baxter family of weight zero: the O-family identity on the adjoint bimodule.
pub fn check_rota_baxter_family(r: &OperatorFamily, a: &Algebra) -> Result<Report> {
    check_twisted_o_family(r, a, &adjoint_bimodule(a), None)
}

/// `D_{αβ}(ab) = D_α(a)·b + a·D_β(b)` for `D_α: A → M`.
pub fn check_derivation_family(d: &OperatorFamily, a: &Algebra, m: &Bimodule) -> Result<Report> {
    if m.algebra_dim() != a.dim() || d.domain_dim() != a.dim() || d.codomain_dim() != m.module_dim() {
        return Err(Error::shape("derivation family maps must be A → M"));
    }
    let s = d.semigroup();
    let img = d.images();
    let n = a.dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let ab = s.mul(al, be);
                for x in 0..n {
                    for y in 0..n {
                        let lhs = d.map(ab).apply(a.mul_basis(x, y));
                        let mut rhs = m.right().apply_right_basis(&img[al][x], y);
                        add_into(&mut rhs, &m.left().apply_left_basis(x, &img[be][y]));
                        audit.expect_eq(&lhs, &rhs, "derivation family identity", &[al, be], &[x, y])?;
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// Member-wise inverses, which form an O-operator family.
pub fn invert_derivation_family(d: &OperatorFamily, a: &Algebra, m: &Bimodule) -> Result<OperatorFamily> {
    if a.dim() != m.module_dim() {
        return Err(Error::shape("dim A must equal dim M to invert a derivation family"));
    }
    check_derivation_family(d, a, m)?.require("input is a derivation family")?;
    let inv = invert_members(d)?;
    check_twisted_o_family(&inv, a, m, None)?.ensure("inverse is an O-operator family")?;
    Ok(inv)
}

fn invert_members(t: &OperatorFamily) -> Result<OperatorFamily> {
    let maps = t
        .maps()
        .iter()
        .enumerate()
        .map(|(al, m)| m.inverse().ok_or(Error::Singular { element: al }))
        .collect::<Result<Vec<_>>>()?;
    t.with_maps(maps)
}

/// `N_α(a)N_β(b) = N_{αβ}(N_α(a)b + aN_β(b) − N_{αβ}(ab))`.
pub fn check_nijenhuis_family(n: &OperatorFamily, a: &Algebra) -> Result<Report> {
    square_shapes(n, a)?;
    let s = n.semigroup();
    let img = n.images();
    let d = a.dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let nab = n.map(s.mul(al, be));
                for x in 0..d {
                    for y in 0..d {
                        let lhs = a.mul(&img[al][x], &img[be][y]);
                        let mut inner = a.mult().apply_right_basis(&img[al][x], y);
                        add_into(&mut inner, &a.mult().apply_left_basis(x, &img[be][y]));
                        sub_into(&mut inner, &nab.apply(a.mul_basis(x, y)));
                        let rhs = nab.apply(&inner);
                        audit.expect_eq(&lhs, &rhs, "Nijenhuis family identity", &[al, be], &[x, y])?;
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// Check of a single Nijenhuis operator, as a family over the trivial monoid.
pub fn check_nijenhuis_operator(n: &Matrix, a: &Algebra) -> Result<Report> {
    check_nijenhuis_family(&OperatorFamily::new(FiniteSemigroup::trivial(), vec![n.clone()])?, a)
}

/// Block-diagonal `N(a⊗α) = N_α(a)⊗α` on `A ⊗ kΩ`.
pub fn collapse_nijenhuis(n: &OperatorFamily, a: &Algebra, s: &FiniteSemigroup) -> Result<Matrix> {
    if n.semigroup() != s {
        return Err(Error::Invalid("family is indexed by a different semigroup".into()));
    }
    check_nijenhuis_family(n, a)?.require("input is a Nijenhuis family")?;
    let big = block_diagonal(n);
    let (ext, _) = extend_by_semigroup(a, None, s)?;
    check_nijenhuis_operator(&big, &ext)?.ensure("collapsed operator is Nijenhuis")?;
    Ok(big)
}

fn block_diagonal(t: &OperatorFamily) -> Matrix {
    let (r, c, n) = (t.codomain_dim(), t.domain_dim(), t.semigroup().size());
    let mut big = Matrix::zeros(r * n, c * n);
    for al in 0..n {
        for i in 0..r {
            for j in 0..c {
                big.set(tensor_index(r, i, al), tensor_index(c, j, al), t.map(al).get(i, j).clone());
            }
        }
    }
    big
}

/// `T_α(u)S_β(v) + S_α(u)T_β(v) = T_{αβ}(S_α(u)v + uS_β(v)) + S_{αβ}(T_α(u)v + uT_β(v))`.
pub fn check_compatible_pair(t: &OperatorFamily, sf: &OperatorFamily, a: &Algebra, m: &Bimodule) -> Result<Report> {
    twisted_shapes(t, a, m, None)?;
    twisted_shapes(sf, a, m, None)?;
    if t.semigroup() != sf.semigroup() {
        return Err(Error::Invalid("families are indexed by different semigroups".into()));
    }
    let s = t.semigroup();
    let (ti, si) = (t.images(), sf.images());
    let dm = m.module_dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let ab = s.mul(al, be);
                for u in 0..dm {
                    for v in 0..dm {
                        let lhs = vec_add(&a.mul(&ti[al][u], &si[be][v]), &a.mul(&si[al][u], &ti[be][v]));
                        let mut s_in = m.left().apply_right_basis(&si[al][u], v);
                        add_into(&mut s_in, &m.right().apply_left_basis(u, &si[be][v]));
                        let mut t_in = m.left().apply_right_basis(&ti[al][u], v);
                        add_into(&mut t_in, &m.right().apply_left_basis(u, &ti[be][v]));
                        let rhs = vec_add(&t.map(ab).apply(&s_in), &sf.map(ab).apply(&t_in));
                        audit.expect_eq(&lhs, &rhs, "compatibility identity", &[al, be], &[u, v])?;
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// Which member of a compatible pair gets inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invert {
    /// `N_α = T_α ∘ S_α⁻¹`.
    Second,
    /// `N_α = S_α ∘ T_α⁻¹`.
    First,
}

pub fn nijenhuis_from_compatible_pair(
    t: &OperatorFamily,
    sf: &OperatorFamily,
    a: &Algebra,
    m: &Bimodule,
    invert: Invert,
) -> Result<OperatorFamily> {
    check_twisted_o_family(t, a, m, None)?.require("first family is an O-operator family")?;
    check_twisted_o_family(sf, a, m, None)?.require("second family is an O-operator family")?;
    check_compatible_pair(t, sf, a, m)?.require("families are compatible")?;
    let (keep, inv) = match invert {
        Invert::Second => (t, invert_members(sf)?),
        Invert::First => (sf, invert_members(t)?),
    };
    let maps = keep.maps().iter().zip(inv.maps()).map(|(k, i)| k * i).collect();
    let n = keep.with_maps(maps)?;
    check_nijenhuis_family(&n, a)?.ensure("composite is a Nijenhuis family")?;
    Ok(n)
}

/// `T̂_α(a, u) = (T_α(u), 0)` on `A ⊕ M`, A-coordinates first.
pub fn lift_to_semidirect(t: &OperatorFamily, a: &Algebra, m: &Bimodule) -> Result<OperatorFamily> {
    twisted_shapes(t, a, m, None)?;
    let (da, dm) = (a.dim(), m.module_dim());
    t.map_each(|_, tm| {
        let mut big = Matrix::zeros(da + dm, da + dm);
        for i in 0..da {
            for j in 0..dm {
                big.set(i, da + j, tm.get(i, j).clone());
            }
        }
        big
    })
}

/// Single operator `T(u⊗α) = T_α(u)⊗α` from `M⊗kΩ` to `A⊗kΩ`, an
/// `Ĥ`-twisted O-operator.
pub fn collapse_family(
    t: &OperatorFamily,
    a: &Algebra,
    m: &Bimodule,
    h: Option<&Cocycle2>,
    s: &FiniteSemigroup,
) -> Result<Matrix> {
    if t.semigroup() != s {
        return Err(Error::Invalid("family is indexed by a different semigroup".into()));
    }
    check_twisted_o_family(t, a, m, h)?.require("input is a twisted O-operator family")?;
    let big = block_diagonal(t);
    let (ea, em) = extend_by_semigroup(a, Some(m), s)?;
    let eh = h.map(|h| cocycle_extension(h, s));
    let single = OperatorFamily::new(FiniteSemigroup::trivial(), vec![big.clone()])?;
    check_twisted_o_family(&single, &ea, &em.expect("module requested"), eh.as_ref())?
        .ensure("collapsed operator is a twisted O-operator")?;
    Ok(big)
}

/// Checks `Gr(T_α) ⋆_H Gr(T_β) ⊆ Gr(T_{αβ})` inside `A ⋉_H M` by subspace membership.
pub fn graph_subalgebra_check(t: &OperatorFamily, a: &Algebra, m: &Bimodule, h: Option<&Cocycle2>) -> Result<Report> {
    twisted_shapes(t, a, m, h)?;
    let (da, dm) = (a.dim(), m.module_dim());
    let s = t.semigroup();
    let mut mult = Tensor3::zeros(da + dm, da + dm, da + dm);
    {
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
    }
    // Graph basis vectors (T_α e_u, e_u) and annihilators of each graph.
    let graph_vec = |al: usize, u: usize| {
        let mut g = t.map(al).column(u);
        g.extend(basis_vec(dm, u));
        g
    };
    let annihilators: Vec<Vec<Vec<Scalar>>> = (0..s.size())
        .map(|al| {
            let mut g = Matrix::zeros(da + dm, dm);
            for u in 0..dm {
                for (i, x) in graph_vec(al, u).into_iter().enumerate() {
                    g.set(i, u, x);
                }
            }
            g.transpose().kernel_basis()
        })
        .collect();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let ab = s.mul(al, be);
                for u in 0..dm {
                    let gu = graph_vec(al, u);
                    for v in 0..dm {
                        let p = mult.apply(&gu, &graph_vec(be, v));
                        let inside = annihilators[ab].iter().all(|y| dot(y, &p).is_zero());
                        audit.expect_bool(inside, "graph product lies in the graph", &[al, be], &[u, v])?;
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// `R_α(a)R_β(b) = R_{αβ}(R_α(a)b + aR_β(b) − R_α(a)R_β(b))`.
pub fn check_reynolds_family(r: &OperatorFamily, a: &Algebra) -> Result<Report> {
    square_shapes(r, a)?;
    let s = r.semigroup();
    let img = r.images();
    let d = a.dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let rab = r.map(s.mul(al, be));
                for x in 0..d {
                    for y in 0..d {
                        let lhs = a.mul(&img[al][x], &img[be][y]);
                        let mut inner = a.mult().apply_right_basis(&img[al][x], y);
                        add_into(&mut inner, &a.mult().apply_left_basis(x, &img[be][y]));
                        sub_into(&mut inner, &lhs);
                        let rhs = rab.apply(&inner);
                        audit.expect_eq(&lhs, &rhs, "Reynolds family identity", &[al, be], &[x, y])?;
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// `R_α(a)R_β(b) = R_{αβ}(R_α(a)b + aR_β(b) + λab)`.
pub fn check_weighted_rb_family(r: &OperatorFamily, a: &Algebra, lambda: &Scalar) -> Result<Report> {
    square_shapes(r, a)?;
    let s = r.semigroup();
    let img = r.images();
    let d = a.dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let rab = r.map(s.mul(al, be));
                for x in 0..d {
                    for y in 0..d {
                        let lhs = a.mul(&img[al][x], &img[be][y]);
                        let mut inner = a.mult().apply_right_basis(&img[al][x], y);
                        add_into(&mut inner, &a.mult().apply_left_basis(x, &img[be][y]));
                        axpy(&mut inner, lambda, a.mul_basis(x, y));
                        let rhs = rab.apply(&inner);
                        audit.expect_eq(&lhs, &rhs, "weighted Rota-Baxter family identity", &[al, be], &[x, y])?;
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// Dispatch on [`FamilyKind`]. `m` defaults to the adjoint bimodule.
pub fn check_family(
    kind: &FamilyKind,
    t: &OperatorFamily,
    a: &Algebra,
    m: Option<&Bimodule>,
    h: Option<&Cocycle2>,
) -> Result<Report> {
    let adj;
    let m = match m {
        Some(m) => m,
        None => {
            adj = adjoint_bimodule(a);
            &adj
        }
    };
    match kind {
        FamilyKind::RotaBaxter => check_rota_baxter_family(t, a),
        FamilyKind::OOperator => check_twisted_o_family(t, a, m, None),
        FamilyKind::TwistedOOperator => check_twisted_o_family(t, a, m, h),
        FamilyKind::Nijenhuis => check_nijenhuis_family(t, a),
        FamilyKind::Reynolds => check_reynolds_family(t, a),
        FamilyKind::Derivation => check_derivation_family(t, a, m),
        FamilyKind::WeightedRb(l) => check_weighted_rb_family(t, a, l),
    }
}

/// `R_α = Σ_{n < nil_bound} (−1)^n D_α^n` for a nilpotent derivation family.
pub fn reynolds_from_nilpotent_derivation(d: &OperatorFamily, a: &Algebra, nil_bound: usize) -> Result<OperatorFamily> {
    square_shapes(d, a)?;
    check_derivation_family(d, a, &adjoint_bimodule(a))?.require("input is a derivation family")?;
    let n = a.dim();
    let mut maps = Vec::with_capacity(d.maps().len());
    for (al, dm) in d.maps().iter().enumerate() {
        let mut sum = Matrix::zeros(n, n);
        let mut power = Matrix::identity(n);
        for k in 0..nil_bound {
            sum = if k % 2 == 0 { &sum + &power } else { &sum - &power };
            power = &power * dm;
        }
        if !power.is_zero() {
            return Err(Error::NotNilpotent { element: al, bound: nil_bound });
        }
        maps.push(sum);
    }
    let r = d.with_maps(maps)?;
    check_reynolds_family(&r, a)?.ensure("series is a Reynolds family")?;
    Ok(r)
}

/// `{R_α⁻¹ − id}` for an invertible Reynolds family; a derivation family.
pub fn derivation_from_invertible_reynolds(r: &OperatorFamily, a: &Algebra) -> Result<OperatorFamily> {
    check_reynolds_family(r, a)?.require("input is a Reynolds family")?;
    let inv = invert_members(r)?;
    let d = inv.map_each(|_, m| m - &Matrix::identity(a.dim()))?;
    check_derivation_family(&d, a, &adjoint_bimodule(a))?.ensure("R⁻¹ − id is a derivation family")?;
    Ok(d)
}

/// `Σ_{i≤p} C(i+q,i) + Σ_{j≤q} C(p+j,j) − Σ_{i≤p}Σ_{j≤q} C(i+j,i) = 1`.
pub fn reynolds_binomial_identity(p: usize, q: usize) -> bool {
    let c = |n: usize, k: usize| num_integer::binomial(BigUint::from(n), BigUint::from(k));
    let first: BigUint = (0..=p).map(|i| c(i + q, i)).sum();
    let second: BigUint = (0..=q).map(|j| c(p + j, j)).sum();
    let both: BigUint = (0..=p).flat_map(|i| (0..=q).map(move |j| (i, j))).map(|(i, j)| c(i + j, i)).sum();
    first + second == both + BigUint::from(1u8)
}

/// The twisted context of a Nijenhuis family: the algebra `(A⊗kΩ)_N`, the
/// bimodule `A`, the cocycle `H(a⊗α, b⊗β) = −N_{αβ}(ab)` and `{Id_α}`.
pub fn build_nijenhuis_twisted_context(n: &OperatorFamily, a: &Algebra, s: &FiniteSemigroup) -> Result<TwistedContext> {
    if n.semigroup() != s {
        return Err(Error::Invalid("family is indexed by a different semigroup".into()));
    }
    check_nijenhuis_family(n, a)?.require("input is a Nijenhuis family")?;
    let (d, k) = (a.dim(), s.size());
    let big = d * k;
    let img = n.images();
    let mut mult = Tensor3::zeros(big, big, big);
    let mut left = Tensor3::zeros(big, d, d);
    let mut right = Tensor3::zeros(d, big, d);
    let mut h = Tensor3::zeros(big, big, d);
    for al in 0..k {
        for be in 0..k {
            let ab = s.mul(al, be);
            let nab = n.map(ab);
            for x in 0..d {
                for y in 0..d {
                    let nxy = nab.apply(a.mul_basis(x, y));
                    let mut p = a.mult().apply_right_basis(&img[al][x], y);
                    add_into(&mut p, &a.mult().apply_left_basis(x, &img[be][y]));
                    sub_into(&mut p, &nxy);
                    let (i, j) = (tensor_index(d, x, al), tensor_index(d, y, be));
                    mult.fiber_mut(i, j)[ab * d..(ab + 1) * d].clone_from_slice(&p);
                    for (w, c) in nxy.iter().enumerate() {
                        h.set(i, j, w, -c);
                    }
                }
            }
        }
        for x in 0..d {
            for y in 0..d {
                let i = tensor_index(d, x, al);
                left.fiber_mut(i, y).clone_from_slice(&a.mult().apply_right_basis(&img[al][x], y));
                right.fiber_mut(y, i).clone_from_slice(&a.mult().apply_left_basis(y, &img[al][x]));
            }
        }
    }
    let alg = Algebra::new(mult, None)?;
    alg.validate().ensure("(A⊗kΩ)_N is associative")?;
    let bim = Bimodule::new(left, right)?;
    bim.validate(&alg)?.ensure("A is a bimodule over (A⊗kΩ)_N")?;
    let coc = Cocycle2::new(h)?;
    coc.validate(&alg, &bim)?.ensure("−N_{αβ}(ab) is a 2-cocycle")?;
    let ids = (0..k)
        .map(|al| {
            let mut e = Matrix::zeros(big, d);
            for x in 0..d {
                e.set(tensor_index(d, x, al), x, Scalar::one());
            }
            e
        })
        .collect();
    let fam = OperatorFamily::new(s.clone(), ids)?;
    let ctx = TwistedContext::new(alg, bim, Some(coc), fam)?;
    ctx.check().ensure("Id_α is a twisted O-operator family")?;
    Ok(ctx)
}

/// Checks that `(φ, ψ)` is a morphism of (twisted) O-operator families:
/// φ is an algebra map, ψ is equivariant, `ψ∘H = H'∘(φ⊗φ)` and `φ∘T_α = T'_α∘ψ`.
pub fn check_family_morphism(src: &TwistedContext, tgt: &TwistedContext, phi: &Matrix, psi: &Matrix) -> Result<Report> {
    let (a, a2) = (&src.algebra, &tgt.algebra);
    let (m, m2) = (&src.bimodule, &tgt.bimodule);
    if phi.cols() != a.dim() || phi.rows() != a2.dim() || psi.cols() != m.module_dim() || psi.rows() != m2.module_dim() {
        return Err(Error::shape("morphism maps do not match the two contexts"));
    }
    if src.semigroup() != tgt.semigroup() {
        return Err(Error::Invalid("contexts are indexed by different semigroups".into()));
    }
    let (da, dm) = (a.dim(), m.module_dim());
    let phic: Vec<Vec<Scalar>> = (0..da).map(|i| phi.column(i)).collect();
    let psic: Vec<Vec<Scalar>> = (0..dm).map(|i| psi.column(i)).collect();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for x in 0..da {
            for y in 0..da {
                let lhs = phi.apply(a.mul_basis(x, y));
                let rhs = a2.mul(&phic[x], &phic[y]);
                audit.expect_eq(&lhs, &rhs, "φ is multiplicative", &[], &[x, y])?;
            }
        }
        for x in 0..da {
            for u in 0..dm {
                let lhs = psi.apply(m.left().fiber(x, u));
                let rhs = m2.act_left(&phic[x], &psic[u]);
                audit.expect_eq(&lhs, &rhs, "ψ(a·u) = φ(a)·ψ(u)", &[], &[x, u])?;
                let lhs = psi.apply(m.right().fiber(u, x));
                let rhs = m2.act_right(&psic[u], &phic[x]);
                audit.expect_eq(&lhs, &rhs, "ψ(u·a) = ψ(u)·φ(a)", &[], &[u, x])?;
            }
        }
        for x in 0..da {
            for y in 0..da {
                let lhs = psi.apply(&src.h(&basis_vec(da, x), &basis_vec(da, y)));
                let rhs = tgt.h(&phic[x], &phic[y]);
                audit.expect_eq(&lhs, &rhs, "ψ∘H = H'∘(φ⊗φ)", &[], &[x, y])?;
            }
        }
        for al in 0..src.semigroup().size() {
            for u in 0..dm {
                let lhs = phi.apply(&src.family.map(al).column(u));
                let rhs = tgt.family.map(al).apply(&psic[u]);
                audit.expect_eq(&lhs, &rhs, "φ∘T_α = T'_α∘ψ", &[al], &[u])?;
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// Semidirect product and lifted family together, for the lift equivalences.
pub fn lifted_context(t: &OperatorFamily, a: &Algebra, m: &Bimodule) -> Result<(Algebra, OperatorFamily)> {
    Ok((semidirect_product(a, m, None)?, lift_to_semidirect(t, a, m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::coadjoint_bimodule;
    use crate::catalog;
    fn sg() -> Vec<FiniteSemigroup> {
        vec![FiniteSemigroup::trivial(), FiniteSemigroup::left_zero(2), FiniteSemigroup::mult_mod(2)]
    }

    /// `D(x) = x²`, `D(x²) = 0` on span{x, x²}.
    fn d_x_squared() -> Matrix {
        Matrix::from_ints(&[&[0, 0], &[1, 0]])
    }

    #[test]
    fn zero_family_is_twisted_o() {
        let a = catalog::two_dim_left_unit();
        let m = coadjoint_bimodule(&a);
        let h = Cocycle2::multiplication(&a);
        let adj = adjoint_bimodule(&a);
        for s in sg() {
            let z = OperatorFamily::zero(s.clone(), 2, 2);
            assert!(check_twisted_o_family(&z, &a, &m, None).unwrap().passed());
            assert!(check_twisted_o_family(&z, &a, &adj, Some(&h)).unwrap().passed());
        }
    }

    #[test]
    fn identity_on_field_is_not_rota_baxter() {
        let k = catalog::field();
        let t = OperatorFamily::identity(FiniteSemigroup::trivial(), 1);
        let r = check_rota_baxter_family(&t, &k).unwrap();
        assert_eq!(r.violation.unwrap().basis, vec![0, 0]);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let k = catalog::field();
        let t = OperatorFamily::identity(FiniteSemigroup::trivial(), 2);
        assert!(matches!(check_rota_baxter_family(&t, &k), Err(Error::Shape(_))));
        assert!(OperatorFamily::new(FiniteSemigroup::cyclic(2), vec![Matrix::identity(1)]).is_err());
    }

    #[test]
    fn identity_twisted_example() {
        for s in [FiniteSemigroup::trivial(), FiniteSemigroup::left_zero(2), FiniteSemigroup::cyclic(3)] {
            for a in [catalog::field(), catalog::two_dim_left_unit()] {
                let n = OperatorFamily::identity(s.clone(), a.dim());
                let ctx = build_nijenhuis_twisted_context(&n, &a, &s).unwrap();
                let (ext, _) = extend_by_semigroup(&a, None, &s).unwrap();
                assert_eq!(ctx.algebra.mult(), ext.mult());
                assert!(ctx.check().passed());
            }
        }
    }

    #[test]
    fn derivation_families() {
        let nx = catalog::nilpotent_x();
        let adj = adjoint_bimodule(&nx);
        for s in sg() {
            let d = OperatorFamily::constant(s.clone(), d_x_squared());
            assert!(check_derivation_family(&d, &nx, &adj).unwrap().passed());
            let z = Algebra::zero(2);
            let any = OperatorFamily::constant(s, Matrix::from_ints(&[&[1, 2], &[3, 4]]));
            assert!(check_derivation_family(&any, &z, &adjoint_bimodule(&z)).unwrap().passed());
        }
        let id = OperatorFamily::identity(FiniteSemigroup::trivial(), 2);
        assert!(!check_derivation_family(&id, &nx, &adj).unwrap().passed());
    }

    #[test]
    fn inverting_derivations() {
        let z = Algebra::zero(2);
        let adj = adjoint_bimodule(&z);
        let two = OperatorFamily::scalar(FiniteSemigroup::cyclic(2), 2, &[Scalar::int(2), Scalar::int(2)]).unwrap();
        let inv = invert_derivation_family(&two, &z, &adj).unwrap();
        assert_eq!(inv.map(1), &Matrix::scalar(2, &Scalar::ratio(1, 2)));
        let sing = OperatorFamily::scalar(FiniteSemigroup::cyclic(2), 2, &[Scalar::one(), Scalar::zero()]).unwrap();
        assert!(matches!(invert_derivation_family(&sing, &z, &adj), Err(Error::Singular { element: 1 })));

        // Grading derivation D(x) = x + b_α x², D(x²) = 2x² on span{x,x²}, left-zero Ω.
        let nx = catalog::nilpotent_x();
        let adj = adjoint_bimodule(&nx);
        let d = OperatorFamily::new(
            FiniteSemigroup::left_zero(2),
            vec![Matrix::from_ints(&[&[1, 0], &[0, 2]]), Matrix::from_ints(&[&[1, 0], &[5, 2]])],
        )
        .unwrap();
        let inv = invert_derivation_family(&d, &nx, &adj).unwrap();
        assert!(check_rota_baxter_family(&inv, &nx).unwrap().passed());
    }

    #[test]
    fn nijenhuis_families() {
        for a in catalog::algebras() {
            for s in sg() {
                let id = OperatorFamily::identity(s.clone(), a.dim());
                assert!(check_nijenhuis_family(&id, &a).unwrap().passed());
                assert!(check_nijenhuis_family(&OperatorFamily::zero(s.clone(), a.dim(), a.dim()), &a).unwrap().passed());
            }
            // c_{αβ} ∈ {c_α, c_β} on left-zero Ω.
            let c = OperatorFamily::scalar(FiniteSemigroup::left_zero(2), a.dim(), &[Scalar::int(3), Scalar::int(-1)]).unwrap();
            assert!(check_nijenhuis_family(&c, &a).unwrap().passed());
            let big = collapse_nijenhuis(&c, &a, &FiniteSemigroup::left_zero(2)).unwrap();
            assert_eq!(big.rows(), 2 * a.dim());
        }
        // On Z/2, 1+1 = 0 forces c_0 ∈ {c_1}.
        let k = catalog::field();
        let c = OperatorFamily::scalar(FiniteSemigroup::cyclic(2), 1, &[Scalar::int(1), Scalar::int(2)]).unwrap();
        assert!(!check_nijenhuis_family(&c, &k).unwrap().passed());
        assert!(collapse_nijenhuis(&c, &k, &FiniteSemigroup::cyclic(2)).is_err());
    }

    #[test]
    fn compatible_pairs() {
        let z = Algebra::zero(2);
        let adj = adjoint_bimodule(&z);
        let s = FiniteSemigroup::cyclic(2);
        let t = OperatorFamily::constant(s.clone(), Matrix::from_ints(&[&[1, 1], &[0, 1]]));
        let t2 = t.map_each(|_, m| m.scale(&Scalar::int(2))).unwrap();
        assert!(check_compatible_pair(&t, &t, &z, &adj).unwrap().passed());
        assert!(check_compatible_pair(&t, &OperatorFamily::zero(s.clone(), 2, 2), &z, &adj).unwrap().passed());
        let n = nijenhuis_from_compatible_pair(&t, &t, &z, &adj, Invert::Second).unwrap();
        assert_eq!(n.map(0), &Matrix::identity(2));
        let n = nijenhuis_from_compatible_pair(&t2, &t, &z, &adj, Invert::Second).unwrap();
        assert_eq!(n.map(1), &Matrix::scalar(2, &Scalar::int(2)));
        let zero = OperatorFamily::zero(s, 2, 2);
        assert!(matches!(
            nijenhuis_from_compatible_pair(&t, &zero, &z, &adj, Invert::Second),
            Err(Error::Singular { element: 0 })
        ));
    }

    #[test]
    fn lift_detects_invalid_family() {
        let k = catalog::field();
        let adj = adjoint_bimodule(&k);
        let id = OperatorFamily::identity(FiniteSemigroup::trivial(), 1);
        let (p, lifted) = lifted_context(&id, &k, &adj).unwrap();
        assert!(!check_rota_baxter_family(&lifted, &p).unwrap().passed());
        assert!(!check_nijenhuis_family(&lifted, &p).unwrap().passed());
        let zero = OperatorFamily::zero(FiniteSemigroup::trivial(), 1, 1);
        let (p, lifted) = lifted_context(&zero, &k, &adj).unwrap();
        assert!(check_rota_baxter_family(&lifted, &p).unwrap().passed());
    }

    #[test]
    fn graph_check_agrees_on_small_cases() {
        let k = catalog::field();
        let adj = adjoint_bimodule(&k);
        let h = Cocycle2::multiplication(&k);
        // T = c on k is μ-twisted RB iff c ∈ {0, −1}.
        for c in -2..=1 {
            let t = OperatorFamily::scalar(FiniteSemigroup::trivial(), 1, &[Scalar::int(c)]).unwrap();
            let direct = check_twisted_o_family(&t, &k, &adj, Some(&h)).unwrap().passed();
            let graph = graph_subalgebra_check(&t, &k, &adj, Some(&h)).unwrap().passed();
            assert_eq!(direct, graph);
            assert_eq!(direct, c == 0 || c == -1);
        }
    }

    #[test]
    fn nonconstant_twisted_family_on_mult_mod_2() {
        let k = catalog::field();
        let adj = adjoint_bimodule(&k);
        let h = Cocycle2::multiplication(&k);
        let t = OperatorFamily::scalar(FiniteSemigroup::mult_mod(2), 1, &[Scalar::zero(), Scalar::int(-1)]).unwrap();
        assert!(check_twisted_o_family(&t, &k, &adj, Some(&h)).unwrap().passed());
        let swapped = OperatorFamily::scalar(FiniteSemigroup::mult_mod(2), 1, &[Scalar::int(-1), Scalar::zero()]).unwrap();
        assert!(!check_twisted_o_family(&swapped, &k, &adj, Some(&h)).unwrap().passed());
        let big = collapse_family(&t, &k, &adj, Some(&h), &FiniteSemigroup::mult_mod(2)).unwrap();
        assert_eq!(big, Matrix::from_ints(&[&[0, 0], &[0, -1]]));
    }

    #[test]
    fn reynolds_examples() {
        let nx = catalog::nilpotent_x();
        let r = OperatorFamily::constant(FiniteSemigroup::trivial(), &Matrix::identity(2) - &d_x_squared());
        assert!(check_reynolds_family(&r, &nx).unwrap().passed());
        let d = OperatorFamily::constant(FiniteSemigroup::left_zero(2), d_x_squared());
        let built = reynolds_from_nilpotent_derivation(&d, &nx, 2).unwrap();
        assert_eq!(built.map(0), &(&Matrix::identity(2) - &d_x_squared()));
        let zero = OperatorFamily::zero(FiniteSemigroup::cyclic(2), 2, 2);
        assert_eq!(reynolds_from_nilpotent_derivation(&zero, &nx, 1).unwrap().map(1), &Matrix::identity(2));
        let z1 = Algebra::zero(1);
        let id = OperatorFamily::identity(FiniteSemigroup::trivial(), 1);
        assert!(matches!(
            reynolds_from_nilpotent_derivation(&id, &z1, 4),
            Err(Error::NotNilpotent { element: 0, bound: 4 })
        ));
        let back = derivation_from_invertible_reynolds(&built, &nx).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn reynolds_series_with_nonzero_square() {
        // D = x² d/dx on k[x]/(x⁴): D(x) = x², D(x²) = 2x³, D² ≠ 0, D³ = 0.
        let a = catalog::truncated_polynomials(4);
        let mut d = Matrix::zeros(4, 4);
        d.set(2, 1, Scalar::int(1));
        d.set(3, 2, Scalar::int(2));
        let fam = OperatorFamily::constant(FiniteSemigroup::trivial(), d.clone());
        assert!(check_derivation_family(&fam, &a, &adjoint_bimodule(&a)).unwrap().passed());
        assert!(reynolds_from_nilpotent_derivation(&fam, &a, 2).is_err());
        let r = reynolds_from_nilpotent_derivation(&fam, &a, 3).unwrap();
        assert!(!d.pow(2).is_zero());
        assert_eq!(r.map(0), &(&(&Matrix::identity(4) - &d) + &d.pow(2)));
    }

    #[test]
    fn binomial_identity() {
        assert!(reynolds_binomial_identity(0, 0));
        assert!(reynolds_binomial_identity(1, 0));
        for p in 0..=20 {
            for q in 0..=20 - p {
                assert!(reynolds_binomial_identity(p, q));
            }
        }
    }

    #[test]
    fn weighted_rb_scalar() {
        for a in catalog::algebras() {
            let lambda = Scalar::ratio(3, 2);
            let r = OperatorFamily::constant(FiniteSemigroup::left_zero(2), Matrix::scalar(a.dim(), &-&lambda));
            assert!(check_weighted_rb_family(&r, &a, &lambda).unwrap().passed());
        }
    }

    #[test]
    fn morphism_identity() {
        let a = catalog::two_dim_left_unit();
        let n = OperatorFamily::identity(FiniteSemigroup::left_zero(2), 2);
        let ctx = build_nijenhuis_twisted_context(&n, &a, &FiniteSemigroup::left_zero(2)).unwrap();
        let r = check_family_morphism(&ctx, &ctx, &Matrix::identity(4), &Matrix::identity(2)).unwrap();
        assert!(r.passed());
        let bad = check_family_morphism(&ctx, &ctx, &Matrix::identity(4), &Matrix::zeros(2, 2)).unwrap();
        assert!(!bad.passed());
    }
}
