//! Dendriform, tridendriform and NS-family algebras, Ω-associative algebras
//! and their bimodules, and the constructions linking them to operator families.
//!
//! Per-element operations are indexed by `α`; per-pair operations by `α·|Ω| + β`.

use crate::algebra_core::{extend_by_semigroup, cocycle_extension, tensor_index, Algebra, Bimodule, Cocycle2};
use crate::error::{Error, Result};
use crate::exact_linalg::{add_into, vec_add, Matrix, Scalar, Tensor3};
use crate::family_ops::{
    check_family_morphism, check_nijenhuis_family, check_twisted_o_family, check_weighted_rb_family, collapse_family,
    OperatorFamily, TwistedContext,
};
use crate::report::{Audit, Report, Violation};
use crate::semigroup::FiniteSemigroup;

fn square_tensors(ts: &[&Tensor3], dim: usize, what: &str) -> Result<()> {
    for (i, t) in ts.iter().enumerate() {
        if t.dims() != (dim, dim, dim) {
            return Err(Error::shape(format!("{what} {i} has dims {:?}, expected {dim}³", t.dims())));
        }
    }
    Ok(())
}

fn count(v: &[Tensor3], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::shape(format!("{} {what} operations, expected {n}", v.len())));
    }
    Ok(())
}

/// `(x ∘₂ y) ∘₁ z` with `xy` already evaluated.
fn outer_left(outer: &Tensor3, xy: &[Scalar], z: usize) -> Vec<Scalar> {
    outer.apply_right_basis(xy, z)
}

/// `x ∘₁ (y ∘₂ z)` with `yz` already evaluated.
fn outer_right(outer: &Tensor3, x: usize, yz: &[Scalar]) -> Vec<Scalar> {
    outer.apply_left_basis(x, yz)
}

fn sum_fibers(ts: &[&Tensor3], x: usize, y: usize) -> Vec<Scalar> {
    let mut out = ts[0].fiber(x, y).to_vec();
    for t in &ts[1..] {
        add_into(&mut out, t.fiber(x, y));
    }
    out
}

// ---------------------------------------------------------------------------
// Dendriform families

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DendriformFamily {
    semigroup: FiniteSemigroup,
    dim: usize,
    prec: Vec<Tensor3>,
    succ: Vec<Tensor3>,
}

impl DendriformFamily {
    pub fn new(semigroup: FiniteSemigroup, prec: Vec<Tensor3>, succ: Vec<Tensor3>) -> Result<Self> {
        let n = semigroup.size();
        count(&prec, n, "≺")?;
        count(&succ, n, "≻")?;
        let dim = prec[0].dims().0;
        square_tensors(&prec.iter().chain(&succ).collect::<Vec<_>>(), dim, "operation")?;
        Ok(DendriformFamily { semigroup, dim, prec, succ })
    }

    pub fn zero(semigroup: FiniteSemigroup, dim: usize) -> Self {
        let n = semigroup.size();
        let z = vec![Tensor3::zeros(dim, dim, dim); n];
        Self::new(semigroup, z.clone(), z).expect("uniform shapes")
    }

    /// The constant family of a single dendriform algebra.
    pub fn constant(semigroup: FiniteSemigroup, prec: Tensor3, succ: Tensor3) -> Result<Self> {
        let n = semigroup.size();
        Self::new(semigroup, vec![prec; n], vec![succ; n])
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self, alpha: usize) -> &Tensor3 {
        &self.prec[alpha]
    }

    pub fn succ(&self, alpha: usize) -> &Tensor3 {
        &self.succ[alpha]
    }

    /// The same operations with `⋎ = 0`.
    pub fn to_ns(&self) -> NsFamily {
        let n = self.semigroup.size();
        let vee = vec![Tensor3::zeros(self.dim, self.dim, self.dim); n * n];
        NsFamily::new(self.semigroup.clone(), self.prec.clone(), self.succ.clone(), vee).expect("same shapes")
    }

    pub fn validate(&self) -> Report {
        validate_dendriform_family(self)
    }
}

pub fn validate_dendriform_family(d: &DendriformFamily) -> Report {
    let s = d.semigroup();
    let n = d.dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let ab = s.mul(al, be);
                for x in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            let e = [al, be];
                            let b = [x, y, z];
                            let lhs = outer_left(&d.prec[be], d.prec[al].fiber(x, y), z);
                            let rhs = outer_right(&d.prec[ab], x, &sum_fibers(&[&d.prec[be], &d.succ[al]], y, z));
                            audit.expect_eq(&lhs, &rhs, "dendriform family axiom 1", &e, &b)?;
                            let lhs = outer_left(&d.prec[be], d.succ[al].fiber(x, y), z);
                            let rhs = outer_right(&d.succ[al], x, d.prec[be].fiber(y, z));
                            audit.expect_eq(&lhs, &rhs, "dendriform family axiom 2", &e, &b)?;
                            let lhs = outer_left(&d.succ[ab], &sum_fibers(&[&d.prec[be], &d.succ[al]], x, y), z);
                            let rhs = outer_right(&d.succ[al], x, d.succ[be].fiber(y, z));
                            audit.expect_eq(&lhs, &rhs, "dendriform family axiom 3", &e, &b)?;
                        }
                    }
                }
            }
        }
        Ok(())
    })();
    audit.finish(outcome)
}

// ---------------------------------------------------------------------------
// Tridendriform families

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TridendriformFamily {
    semigroup: FiniteSemigroup,
    dim: usize,
    prec: Vec<Tensor3>,
    succ: Vec<Tensor3>,
    odot: Tensor3,
}

impl TridendriformFamily {
    pub fn new(semigroup: FiniteSemigroup, prec: Vec<Tensor3>, succ: Vec<Tensor3>, odot: Tensor3) -> Result<Self> {
        let n = semigroup.size();
        count(&prec, n, "≺")?;
        count(&succ, n, "≻")?;
        let dim = prec[0].dims().0;
        square_tensors(&prec.iter().chain(&succ).chain(std::iter::once(&odot)).collect::<Vec<_>>(), dim, "operation")?;
        Ok(TridendriformFamily { semigroup, dim, prec, succ, odot })
    }

    pub fn zero(semigroup: FiniteSemigroup, dim: usize) -> Self {
        let z = vec![Tensor3::zeros(dim, dim, dim); semigroup.size()];
        Self::new(semigroup, z.clone(), z, Tensor3::zeros(dim, dim, dim)).expect("uniform shapes")
    }

    /// A dendriform family with `⊙ = 0`.
    pub fn from_dendriform(d: &DendriformFamily) -> Self {
        let n = d.dim();
        Self::new(d.semigroup.clone(), d.prec.clone(), d.succ.clone(), Tensor3::zeros(n, n, n)).expect("same shapes")
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self, alpha: usize) -> &Tensor3 {
        &self.prec[alpha]
    }

    pub fn succ(&self, alpha: usize) -> &Tensor3 {
        &self.succ[alpha]
    }

    pub fn odot(&self) -> &Tensor3 {
        &self.odot
    }

    pub fn validate(&self) -> Report {
        validate_tridendriform_family(self)
    }
}

pub fn validate_tridendriform_family(t: &TridendriformFamily) -> Report {
    let s = t.semigroup();
    let n = t.dim();
    let o = &t.odot;
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let ab = s.mul(al, be);
                for x in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            let e = [al, be];
                            let b = [x, y, z];
                            let lhs = outer_left(&t.prec[be], t.prec[al].fiber(x, y), z);
                            let rhs = outer_right(&t.prec[ab], x, &sum_fibers(&[&t.prec[be], &t.succ[al], o], y, z));
                            audit.expect_eq(&lhs, &rhs, "tridendriform family axiom 1", &e, &b)?;
                            let lhs = outer_left(&t.prec[be], t.succ[al].fiber(x, y), z);
                            let rhs = outer_right(&t.succ[al], x, t.prec[be].fiber(y, z));
                            audit.expect_eq(&lhs, &rhs, "tridendriform family axiom 2", &e, &b)?;
                            let lhs = outer_left(&t.succ[ab], &sum_fibers(&[&t.prec[be], &t.succ[al], o], x, y), z);
                            let rhs = outer_right(&t.succ[al], x, t.succ[be].fiber(y, z));
                            audit.expect_eq(&lhs, &rhs, "tridendriform family axiom 3", &e, &b)?;
                        }
                    }
                }
            }
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let b = [x, y, z];
                        let lhs = outer_left(o, t.succ[al].fiber(x, y), z);
                        let rhs = outer_right(&t.succ[al], x, o.fiber(y, z));
                        audit.expect_eq(&lhs, &rhs, "tridendriform family axiom 4", &[al], &b)?;
                        let lhs = outer_left(o, t.prec[al].fiber(x, y), z);
                        let rhs = outer_right(o, x, t.succ[al].fiber(y, z));
                        audit.expect_eq(&lhs, &rhs, "tridendriform family axiom 5", &[al], &b)?;
                        let lhs = outer_left(&t.prec[al], o.fiber(x, y), z);
                        let rhs = outer_right(o, x, t.prec[al].fiber(y, z));
                        audit.expect_eq(&lhs, &rhs, "tridendriform family axiom 6", &[al], &b)?;
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = outer_left(o, o.fiber(x, y), z);
                    let rhs = outer_right(o, x, o.fiber(y, z));
                    audit.expect_eq(&lhs, &rhs, "tridendriform family axiom 7", &[], &[x, y, z])?;
                }
            }
        }
        Ok(())
    })();
    audit.finish(outcome)
}

/// `a ≺_α b = a·R_α(b)`, `a ≻_α b = R_α(a)·b`, `a ⊙ b = λab` for a
/// Rota-Baxter family of weight λ.
pub fn tridendriform_from_weighted_rb(r: &OperatorFamily, a: &Algebra, lambda: &Scalar) -> Result<TridendriformFamily> {
    check_weighted_rb_family(r, a, lambda)?.require("input is a weighted Rota-Baxter family")?;
    let (prec, succ) = split_products(r, a.mult(), a.mult(), a.dim());
    let td = TridendriformFamily::new(r.semigroup().clone(), prec, succ, a.mult().scale(lambda))?;
    td.validate().ensure("induced structure is a tridendriform family algebra")?;
    Ok(td)
}

/// `u ≺_α v = u·T_α(v)` and `u ≻_α v = T_α(u)·v` for `T_α: M → A` with
/// right action `right: M×A→M` and left action `left: A×M→M`.
fn split_products(t: &OperatorFamily, left: &Tensor3, right: &Tensor3, dm: usize) -> (Vec<Tensor3>, Vec<Tensor3>) {
    let mut prec = Vec::new();
    let mut succ = Vec::new();
    for tm in t.maps() {
        let cols: Vec<Vec<Scalar>> = (0..dm).map(|v| tm.column(v)).collect();
        let mut p = Tensor3::zeros(dm, dm, dm);
        let mut q = Tensor3::zeros(dm, dm, dm);
        for u in 0..dm {
            for v in 0..dm {
                p.fiber_mut(u, v).clone_from_slice(&right.apply_left_basis(u, &cols[v]));
                q.fiber_mut(u, v).clone_from_slice(&left.apply_right_basis(&cols[u], v));
            }
        }
        prec.push(p);
        succ.push(q);
    }
    (prec, succ)
}

// ---------------------------------------------------------------------------
// NS-families

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsFamily {
    semigroup: FiniteSemigroup,
    dim: usize,
    prec: Vec<Tensor3>,
    succ: Vec<Tensor3>,
    vee: Vec<Tensor3>,
}

impl NsFamily {
    pub fn new(semigroup: FiniteSemigroup, prec: Vec<Tensor3>, succ: Vec<Tensor3>, vee: Vec<Tensor3>) -> Result<Self> {
        let n = semigroup.size();
        count(&prec, n, "≺")?;
        count(&succ, n, "≻")?;
        count(&vee, n * n, "⋎")?;
        let dim = prec[0].dims().0;
        square_tensors(&prec.iter().chain(&succ).chain(&vee).collect::<Vec<_>>(), dim, "operation")?;
        Ok(NsFamily { semigroup, dim, prec, succ, vee })
    }

    pub fn zero(semigroup: FiniteSemigroup, dim: usize) -> Self {
        DendriformFamily::zero(semigroup, dim).to_ns()
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self, alpha: usize) -> &Tensor3 {
        &self.prec[alpha]
    }

    pub fn succ(&self, alpha: usize) -> &Tensor3 {
        &self.succ[alpha]
    }

    pub fn vee(&self, alpha: usize, beta: usize) -> &Tensor3 {
        &self.vee[alpha * self.semigroup.size() + beta]
    }

    pub fn precs(&self) -> &[Tensor3] {
        &self.prec
    }

    pub fn succs(&self) -> &[Tensor3] {
        &self.succ
    }

    /// `⋎` in `α·|Ω| + β` order.
    pub fn vees(&self) -> &[Tensor3] {
        &self.vee
    }

    /// True when every `⋎_{α,β}` vanishes.
    pub fn is_dendriform(&self) -> bool {
        self.vee.iter().all(Tensor3::is_zero)
    }

    /// Drops `⋎`; errors unless it vanishes.
    pub fn to_dendriform(&self) -> Result<DendriformFamily> {
        if !self.is_dendriform() {
            return Err(Error::Invalid("NS-family has a nonzero ⋎ component".into()));
        }
        DendriformFamily::new(self.semigroup.clone(), self.prec.clone(), self.succ.clone())
    }

    /// `x ∗_{α,β} y = x ≺_β y + x ≻_α y + x ⋎_{α,β} y` on basis vectors.
    pub fn total(&self, alpha: usize, beta: usize, x: usize, y: usize) -> Vec<Scalar> {
        sum_fibers(&[&self.prec[beta], &self.succ[alpha], self.vee(alpha, beta)], x, y)
    }

    pub fn validate(&self) -> Report {
        validate_ns_family(self)
    }
}

pub fn validate_ns_family(f: &NsFamily) -> Report {
    let s = f.semigroup();
    let k = s.size();
    let n = f.dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..k {
            for be in 0..k {
                let ab = s.mul(al, be);
                for x in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            let e = [al, be];
                            let b = [x, y, z];
                            let lhs = outer_left(&f.prec[be], f.prec[al].fiber(x, y), z);
                            let rhs = outer_right(&f.prec[ab], x, &f.total(al, be, y, z));
                            audit.expect_eq(&lhs, &rhs, "NS-family axiom 1", &e, &b)?;
                            let lhs = outer_left(&f.prec[be], f.succ[al].fiber(x, y), z);
                            let rhs = outer_right(&f.succ[al], x, f.prec[be].fiber(y, z));
                            audit.expect_eq(&lhs, &rhs, "NS-family axiom 2", &e, &b)?;
                            let lhs = outer_left(&f.succ[ab], &f.total(al, be, x, y), z);
                            let rhs = outer_right(&f.succ[al], x, f.succ[be].fiber(y, z));
                            audit.expect_eq(&lhs, &rhs, "NS-family axiom 3", &e, &b)?;
                        }
                    }
                }
            }
        }
        for al in 0..k {
            for be in 0..k {
                let ab = s.mul(al, be);
                for ga in 0..k {
                    let bg = s.mul(be, ga);
                    for x in 0..n {
                        for y in 0..n {
                            let xy = f.total(al, be, x, y);
                            let xvy = f.vee(al, be).fiber(x, y);
                            for z in 0..n {
                                let mut lhs = outer_left(f.vee(ab, ga), &xy, z);
                                add_into(&mut lhs, &outer_left(&f.prec[ga], xvy, z));
                                let mut rhs = outer_right(&f.succ[al], x, f.vee(be, ga).fiber(y, z));
                                add_into(&mut rhs, &outer_right(f.vee(al, bg), x, &f.total(be, ga, y, z)));
                                audit.expect_eq(&lhs, &rhs, "NS-family axiom 4", &[al, be, ga], &[x, y, z])?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    })();
    audit.finish(outcome)
}

/// Checks `f(x ≺_α y) = f(x) ≺'_α f(y)` and likewise for `≻_α` and `⋎_{α,β}`.
pub fn check_ns_morphism(src: &NsFamily, tgt: &NsFamily, f: &Matrix) -> Result<Report> {
    if src.semigroup() != tgt.semigroup() {
        return Err(Error::Invalid("NS-families are indexed by different semigroups".into()));
    }
    if f.cols() != src.dim() || f.rows() != tgt.dim() {
        return Err(Error::shape(format!("morphism is {}×{}, expected {}×{}", f.rows(), f.cols(), tgt.dim(), src.dim())));
    }
    let k = src.semigroup().size();
    let n = src.dim();
    let cols: Vec<Vec<Scalar>> = (0..n).map(|j| f.column(j)).collect();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..k {
            for x in 0..n {
                for y in 0..n {
                    let lhs = f.apply(src.prec[al].fiber(x, y));
                    let rhs = tgt.prec[al].apply(&cols[x], &cols[y]);
                    audit.expect_eq(&lhs, &rhs, "f(x ≺ y) = f(x) ≺' f(y)", &[al], &[x, y])?;
                    let lhs = f.apply(src.succ[al].fiber(x, y));
                    let rhs = tgt.succ[al].apply(&cols[x], &cols[y]);
                    audit.expect_eq(&lhs, &rhs, "f(x ≻ y) = f(x) ≻' f(y)", &[al], &[x, y])?;
                }
            }
        }
        for al in 0..k {
            for be in 0..k {
                for x in 0..n {
                    for y in 0..n {
                        let lhs = f.apply(src.vee(al, be).fiber(x, y));
                        let rhs = tgt.vee(al, be).apply(&cols[x], &cols[y]);
                        audit.expect_eq(&lhs, &rhs, "f(x ⋎ y) = f(x) ⋎' f(y)", &[al, be], &[x, y])?;
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// Dendriform-family morphism check, i.e. the NS check with `⋎ = 0` on both sides.
pub fn check_dendriform_morphism(src: &DendriformFamily, tgt: &DendriformFamily, f: &Matrix) -> Result<Report> {
    check_ns_morphism(&src.to_ns(), &tgt.to_ns(), f)
}

/// `u ≺_α v = u·T_α(v)` and `u ≻_α v = T_α(u)·v` for an O-operator family.
pub fn dendriform_from_o_family(t: &OperatorFamily, a: &Algebra, m: &Bimodule) -> Result<DendriformFamily> {
    check_twisted_o_family(t, a, m, None)?.require("input is an O-operator family")?;
    let (prec, succ) = split_products(t, m.left(), m.right(), m.module_dim());
    let d = DendriformFamily::new(t.semigroup().clone(), prec, succ)?;
    d.validate().ensure("induced structure is a dendriform family algebra")?;
    Ok(d)
}

/// For a morphism `(φ, ψ)` of O-operator families, checks that `ψ` is a
/// morphism of the induced dendriform families.
pub fn transport_dendriform_morphism(src: &TwistedContext, tgt: &TwistedContext, phi: &Matrix, psi: &Matrix) -> Result<Report> {
    if src.cocycle.is_some() || tgt.cocycle.is_some() {
        return Err(Error::Invalid("dendriform transport needs untwisted contexts".into()));
    }
    check_family_morphism(src, tgt, phi, psi)?.require("(φ, ψ) is a morphism of O-operator families")?;
    let d = dendriform_from_o_family(&src.family, &src.algebra, &src.bimodule)?;
    let d2 = dendriform_from_o_family(&tgt.family, &tgt.algebra, &tgt.bimodule)?;
    check_dendriform_morphism(&d, &d2, psi)
}

/// For a morphism `(φ, ψ)` of twisted O-operator families, checks that `ψ`
/// is a morphism of the induced NS-families.
pub fn transport_ns_morphism(src: &TwistedContext, tgt: &TwistedContext, phi: &Matrix, psi: &Matrix) -> Result<Report> {
    check_family_morphism(src, tgt, phi, psi)?.require("(φ, ψ) is a morphism of twisted O-operator families")?;
    let n = induce_ns_family(NsSource::from_context(src))?;
    let n2 = induce_ns_family(NsSource::from_context(tgt))?;
    check_ns_morphism(&n, &n2, psi)
}

/// The four structures that induce an NS-family.
#[derive(Debug, Clone, Copy)]
pub enum NsSource<'a> {
    TwistedO { t: &'a OperatorFamily, a: &'a Algebra, m: &'a Bimodule, h: Option<&'a Cocycle2> },
    Nijenhuis { n: &'a OperatorFamily, a: &'a Algebra },
    Tridendriform(&'a TridendriformFamily),
    WeightedRb { r: &'a OperatorFamily, a: &'a Algebra, lambda: &'a Scalar },
}

impl<'a> NsSource<'a> {
    pub fn from_context(ctx: &'a TwistedContext) -> Self {
        NsSource::TwistedO { t: &ctx.family, a: &ctx.algebra, m: &ctx.bimodule, h: ctx.cocycle.as_ref() }
    }
}

/// Builds the induced NS-family:
/// - twisted O-family: `u ≺_α v = u·T_α(v)`, `u ≻_α v = T_α(u)·v`, `u ⋎_{α,β} v = H(T_α u, T_β v)`;
/// - Nijenhuis family: `a ≺_α b = a·N_α(b)`, `a ≻_α b = N_α(a)·b`, `a ⋎_{α,β} b = −N_{αβ}(ab)`;
/// - tridendriform family: `⋎_{α,β} = ⊙`;
/// - weighted Rota-Baxter family: `a ≺_α b = a·R_α(b)`, `a ≻_α b = R_α(a)·b`, `a ⋎_{α,β} b = λab`.
pub fn induce_ns_family(source: NsSource<'_>) -> Result<NsFamily> {
    let out = match source {
        NsSource::TwistedO { t, a, m, h } => {
            check_twisted_o_family(t, a, m, h)?.require("input is a twisted O-operator family")?;
            let dm = m.module_dim();
            let (prec, succ) = split_products(t, m.left(), m.right(), dm);
            let s = t.semigroup();
            let k = s.size();
            let mut vee = vec![Tensor3::zeros(dm, dm, dm); k * k];
            if let Some(h) = h {
                let cols: Vec<Vec<Vec<Scalar>>> =
                    t.maps().iter().map(|tm| (0..dm).map(|v| tm.column(v)).collect()).collect();
                for al in 0..k {
                    for be in 0..k {
                        let target = &mut vee[al * k + be];
                        for u in 0..dm {
                            for v in 0..dm {
                                target.fiber_mut(u, v).clone_from_slice(&h.eval(&cols[al][u], &cols[be][v]));
                            }
                        }
                    }
                }
            }
            NsFamily::new(s.clone(), prec, succ, vee)?
        }
        NsSource::Nijenhuis { n, a } => {
            check_nijenhuis_family(n, a)?.require("input is a Nijenhuis family")?;
            let d = a.dim();
            let (prec, succ) = split_products(n, a.mult(), a.mult(), d);
            let s = n.semigroup();
            let k = s.size();
            let mut vee = Vec::with_capacity(k * k);
            for al in 0..k {
                for be in 0..k {
                    let nab = n.map(s.mul(al, be));
                    let mut t = Tensor3::zeros(d, d, d);
                    for x in 0..d {
                        for y in 0..d {
                            let v = nab.apply(a.mul_basis(x, y));
                            for (w, c) in v.into_iter().enumerate() {
                                t.set(x, y, w, -c);
                            }
                        }
                    }
                    vee.push(t);
                }
            }
            NsFamily::new(s.clone(), prec, succ, vee)?
        }
        NsSource::Tridendriform(td) => {
            td.validate().require("input is a tridendriform family algebra")?;
            let k = td.semigroup().size();
            NsFamily::new(td.semigroup.clone(), td.prec.clone(), td.succ.clone(), vec![td.odot.clone(); k * k])?
        }
        NsSource::WeightedRb { r, a, lambda } => {
            check_weighted_rb_family(r, a, lambda)?.require("input is a weighted Rota-Baxter family")?;
            let (prec, succ) = split_products(r, a.mult(), a.mult(), a.dim());
            let k = r.semigroup().size();
            NsFamily::new(r.semigroup().clone(), prec, succ, vec![a.mult().scale(lambda); k * k])?
        }
    };
    out.validate().ensure("induced structure is an NS-family algebra")?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Single NS-algebras

/// An NS-algebra: an NS-family over the trivial semigroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsAlgebra {
    pub prec: Tensor3,
    pub succ: Tensor3,
    pub vee: Tensor3,
}

impl NsAlgebra {
    pub fn dim(&self) -> usize {
        self.prec.dims().0
    }

    pub fn as_family(&self) -> Result<NsFamily> {
        NsFamily::new(FiniteSemigroup::trivial(), vec![self.prec.clone()], vec![self.succ.clone()], vec![self.vee.clone()])
    }

    pub fn validate(&self) -> Result<Report> {
        Ok(validate_ns_family(&self.as_family()?))
    }
}

/// `(x⊗α) ≺ (y⊗β) = (x ≺_β y)⊗αβ`, `(x⊗α) ≻ (y⊗β) = (x ≻_α y)⊗αβ`,
/// `(x⊗α) ⋎ (y⊗β) = (x ⋎_{α,β} y)⊗αβ` on `D⊗kΩ`.
pub fn ns_family_to_ns_algebra(n: &NsFamily) -> Result<NsAlgebra> {
    n.validate().require("input is an NS-family algebra")?;
    let s = n.semigroup();
    let (d, k) = (n.dim(), s.size());
    let big = d * k;
    let mut prec = Tensor3::zeros(big, big, big);
    let mut succ = Tensor3::zeros(big, big, big);
    let mut vee = Tensor3::zeros(big, big, big);
    for al in 0..k {
        for be in 0..k {
            let ab = s.mul(al, be);
            for x in 0..d {
                for y in 0..d {
                    let (i, j) = (tensor_index(d, x, al), tensor_index(d, y, be));
                    let range = ab * d..(ab + 1) * d;
                    prec.fiber_mut(i, j)[range.clone()].clone_from_slice(n.prec[be].fiber(x, y));
                    succ.fiber_mut(i, j)[range.clone()].clone_from_slice(n.succ[al].fiber(x, y));
                    vee.fiber_mut(i, j)[range].clone_from_slice(n.vee(al, be).fiber(x, y));
                }
            }
        }
    }
    let out = NsAlgebra { prec, succ, vee };
    out.validate()?.ensure("D⊗kΩ is an NS-algebra")?;
    Ok(out)
}

/// `u ≺ v = u·T(v)`, `u ≻ v = T(u)·v`, `u ⋎ v = H(Tu, Tv)` for a single
/// twisted O-operator `T: M → A`.
pub fn ns_algebra_from_twisted_operator(t: &Matrix, a: &Algebra, m: &Bimodule, h: Option<&Cocycle2>) -> Result<NsAlgebra> {
    let fam = OperatorFamily::new(FiniteSemigroup::trivial(), vec![t.clone()])?;
    let ns = induce_ns_family(NsSource::TwistedO { t: &fam, a, m, h })?;
    Ok(NsAlgebra { prec: ns.prec[0].clone(), succ: ns.succ[0].clone(), vee: ns.vee[0].clone() })
}

/// Compares the two routes from a twisted family to an NS-algebra on
/// `M⊗kΩ`: family → NS-family → NS-algebra against family → collapsed
/// operator → NS-algebra.
pub fn commuting_diagram_check(t: &OperatorFamily, a: &Algebra, m: &Bimodule, h: Option<&Cocycle2>) -> Result<Report> {
    let s = t.semigroup();
    let via_family = ns_family_to_ns_algebra(&induce_ns_family(NsSource::TwistedO { t, a, m, h })?)?;
    let big = collapse_family(t, a, m, h, s)?;
    let (ea, em) = extend_by_semigroup(a, Some(m), s)?;
    let eh = h.map(|h| cocycle_extension(h, s));
    let via_collapse = ns_algebra_from_twisted_operator(&big, &ea, &em.expect("module requested"), eh.as_ref())?;
    let n = via_family.dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for (name, l, r) in [
            ("≺ agrees on both routes", &via_family.prec, &via_collapse.prec),
            ("≻ agrees on both routes", &via_family.succ, &via_collapse.succ),
            ("⋎ agrees on both routes", &via_family.vee, &via_collapse.vee),
        ] {
            for i in 0..n {
                for j in 0..n {
                    audit.expect_eq(l.fiber(i, j), r.fiber(i, j), name, &[], &[i, j])?;
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

// ---------------------------------------------------------------------------
// Ω-associative algebras and bimodules

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaAssocAlgebra {
    semigroup: FiniteSemigroup,
    dim: usize,
    mult: Vec<Tensor3>,
}

impl OmegaAssocAlgebra {
    pub fn new(semigroup: FiniteSemigroup, mult: Vec<Tensor3>) -> Result<Self> {
        let k = semigroup.size();
        count(&mult, k * k, "·")?;
        let dim = mult[0].dims().0;
        square_tensors(&mult.iter().collect::<Vec<_>>(), dim, "product")?;
        Ok(OmegaAssocAlgebra { semigroup, dim, mult })
    }

    pub fn zero(semigroup: FiniteSemigroup, dim: usize) -> Self {
        let k = semigroup.size();
        Self::new(semigroup, vec![Tensor3::zeros(dim, dim, dim); k * k]).expect("uniform shapes")
    }

    /// `·_{α,β} = ·` for every pair.
    pub fn constant(semigroup: FiniteSemigroup, a: &Algebra) -> Self {
        let k = semigroup.size();
        Self::new(semigroup, vec![a.mult().clone(); k * k]).expect("uniform shapes")
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mult(&self, alpha: usize, beta: usize) -> &Tensor3 {
        &self.mult[alpha * self.semigroup.size() + beta]
    }

    pub fn mults(&self) -> &[Tensor3] {
        &self.mult
    }

    /// The algebra acting on itself.
    pub fn regular_bimodule(&self) -> OmegaBimodule {
        OmegaBimodule::new(self.semigroup.clone(), self.mult.clone(), self.mult.clone()).expect("same shapes")
    }

    pub fn validate(&self) -> Report {
        validate_omega_associative(self)
    }
}

pub fn validate_omega_associative(o: &OmegaAssocAlgebra) -> Report {
    let s = o.semigroup();
    let k = s.size();
    let n = o.dim();
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..k {
            for be in 0..k {
                for ga in 0..k {
                    let (ab, bg) = (s.mul(al, be), s.mul(be, ga));
                    for x in 0..n {
                        for y in 0..n {
                            for z in 0..n {
                                let lhs = outer_left(o.mult(ab, ga), o.mult(al, be).fiber(x, y), z);
                                let rhs = outer_right(o.mult(al, bg), x, o.mult(be, ga).fiber(y, z));
                                audit.expect_eq(&lhs, &rhs, "Ω-associativity", &[al, be, ga], &[x, y, z])?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    })();
    audit.finish(outcome)
}

/// Actions `l_{α,β}: A×M → M` and `r_{α,β}: M×A → M`, in `α·|Ω| + β` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaBimodule {
    semigroup: FiniteSemigroup,
    algebra_dim: usize,
    module_dim: usize,
    left: Vec<Tensor3>,
    right: Vec<Tensor3>,
}

impl OmegaBimodule {
    pub fn new(semigroup: FiniteSemigroup, left: Vec<Tensor3>, right: Vec<Tensor3>) -> Result<Self> {
        let k = semigroup.size();
        count(&left, k * k, "left")?;
        count(&right, k * k, "right")?;
        let (da, dm, _) = left[0].dims();
        if let Some(bad) = left.iter().position(|t| t.dims() != (da, dm, dm)) {
            return Err(Error::shape(format!("left action {bad} is not {da}×{dm}→{dm}")));
        }
        if let Some(bad) = right.iter().position(|t| t.dims() != (dm, da, dm)) {
            return Err(Error::shape(format!("right action {bad} is not {dm}×{da}→{dm}")));
        }
        Ok(OmegaBimodule { semigroup, algebra_dim: da, module_dim: dm, left, right })
    }

    pub fn zero(semigroup: FiniteSemigroup, algebra_dim: usize, module_dim: usize) -> Self {
        let k = semigroup.size();
        Self::new(
            semigroup,
            vec![Tensor3::zeros(algebra_dim, module_dim, module_dim); k * k],
            vec![Tensor3::zeros(module_dim, algebra_dim, module_dim); k * k],
        )
        .expect("uniform shapes")
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn left(&self, alpha: usize, beta: usize) -> &Tensor3 {
        &self.left[alpha * self.semigroup.size() + beta]
    }

    pub fn right(&self, alpha: usize, beta: usize) -> &Tensor3 {
        &self.right[alpha * self.semigroup.size() + beta]
    }

    pub fn lefts(&self) -> &[Tensor3] {
        &self.left
    }

    pub fn rights(&self) -> &[Tensor3] {
        &self.right
    }
}

/// The three mixed associativity axioms on all basis triples and `(α,β,γ)`.
pub fn validate_omega_bimodule(o: &OmegaAssocAlgebra, m: &OmegaBimodule) -> Result<Report> {
    if o.semigroup() != m.semigroup() {
        return Err(Error::Invalid("Ω-algebra and bimodule use different semigroups".into()));
    }
    if m.algebra_dim() != o.dim() {
        return Err(Error::shape("bimodule is over an Ω-algebra of a different dimension"));
    }
    let s = o.semigroup();
    let k = s.size();
    let (da, dm) = (o.dim(), m.module_dim());
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..k {
            for be in 0..k {
                for ga in 0..k {
                    let (ab, bg) = (s.mul(al, be), s.mul(be, ga));
                    let e = [al, be, ga];
                    for a in 0..da {
                        for b in 0..da {
                            for u in 0..dm {
                                let lhs = outer_left(m.left(ab, ga), o.mult(al, be).fiber(a, b), u);
                                let rhs = outer_right(m.left(al, bg), a, m.left(be, ga).fiber(b, u));
                                audit.expect_eq(&lhs, &rhs, "(a·b)·u = a·(b·u)", &e, &[a, b, u])?;
                                let lhs = outer_left(m.right(ab, ga), m.left(al, be).fiber(a, u), b);
                                let rhs = outer_right(m.left(al, bg), a, m.right(be, ga).fiber(u, b));
                                audit.expect_eq(&lhs, &rhs, "(a·u)·b = a·(u·b)", &e, &[a, u, b])?;
                                let lhs = outer_left(m.right(ab, ga), m.right(al, be).fiber(u, a), b);
                                let rhs = outer_right(m.right(al, bg), u, o.mult(be, ga).fiber(a, b));
                                audit.expect_eq(&lhs, &rhs, "(u·a)·b = u·(a·b)", &e, &[u, a, b])?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// `x ∗_{α,β} y = x ≺_β y + x ≻_α y + x ⋎_{α,β} y`.
pub fn total_omega_assoc_from_ns(n: &NsFamily) -> Result<OmegaAssocAlgebra> {
    n.validate().require("input is an NS-family algebra")?;
    let k = n.semigroup().size();
    let d = n.dim();
    let mut mult = Vec::with_capacity(k * k);
    for al in 0..k {
        for be in 0..k {
            let mut t = Tensor3::zeros(d, d, d);
            for x in 0..d {
                for y in 0..d {
                    t.fiber_mut(x, y).clone_from_slice(&n.total(al, be, x, y));
                }
            }
            mult.push(t);
        }
    }
    let out = OmegaAssocAlgebra::new(n.semigroup().clone(), mult)?;
    out.validate().ensure("total products form an Ω-associative algebra")?;
    Ok(out)
}

/// The Ω-algebra `(M, ∗_{α,β})` with
/// `u ∗_{α,β} v = T_α(u)·v + u·T_β(v) + H(T_α u, T_β v)` and the bimodule
/// `A` with `u ▷_{α,β} a = T_α(u)a − T_{αβ}(u·a) − T_{αβ}(H(T_α u, a))` and
/// `a ◁_{α,β} u = aT_β(u) − T_{αβ}(a·u) − T_{αβ}(H(a, T_β u))`.
pub fn omega_bimodule_from_twisted_family(
    t: &OperatorFamily,
    a: &Algebra,
    m: &Bimodule,
    h: Option<&Cocycle2>,
) -> Result<(OmegaAssocAlgebra, OmegaBimodule)> {
    check_twisted_o_family(t, a, m, h)?.require("input is a twisted O-operator family")?;
    let s = t.semigroup();
    let k = s.size();
    let (da, dm) = (a.dim(), m.module_dim());
    let cols: Vec<Vec<Vec<Scalar>>> = t.maps().iter().map(|tm| (0..dm).map(|v| tm.column(v)).collect()).collect();
    let hh = |x: &[Scalar], y: &[Scalar]| match h {
        Some(h) => h.eval(x, y),
        None => vec![Scalar::zero(); dm],
    };
    let mut star = Vec::with_capacity(k * k);
    let mut left = Vec::with_capacity(k * k);
    let mut right = Vec::with_capacity(k * k);
    for al in 0..k {
        for be in 0..k {
            let tab = t.map(s.mul(al, be));
            let mut st = Tensor3::zeros(dm, dm, dm);
            for u in 0..dm {
                for v in 0..dm {
                    let mut w = m.left().apply_right_basis(&cols[al][u], v);
                    add_into(&mut w, &m.right().apply_left_basis(u, &cols[be][v]));
                    add_into(&mut w, &hh(&cols[al][u], &cols[be][v]));
                    st.fiber_mut(u, v).clone_from_slice(&w);
                }
            }
            let mut l = Tensor3::zeros(dm, da, da);
            let mut r = Tensor3::zeros(da, dm, da);
            for u in 0..dm {
                for x in 0..da {
                    let ex = crate::exact_linalg::basis_vec(da, x);
                    let corr = vec_add(m.right().fiber(u, x), &hh(&cols[al][u], &ex));
                    let mut v = a.mult().apply_right_basis(&cols[al][u], x);
                    crate::exact_linalg::sub_into(&mut v, &tab.apply(&corr));
                    l.fiber_mut(u, x).clone_from_slice(&v);
                    let corr = vec_add(m.left().fiber(x, u), &hh(&ex, &cols[be][u]));
                    let mut v = a.mult().apply_left_basis(x, &cols[be][u]);
                    crate::exact_linalg::sub_into(&mut v, &tab.apply(&corr));
                    r.fiber_mut(x, u).clone_from_slice(&v);
                }
            }
            star.push(st);
            left.push(l);
            right.push(r);
        }
    }
    let alg = OmegaAssocAlgebra::new(s.clone(), star)?;
    alg.validate().ensure("(M, ∗) is an Ω-associative algebra")?;
    let bim = OmegaBimodule::new(s.clone(), left, right)?;
    validate_omega_bimodule(&alg, &bim)?.ensure("(A, ▷, ◁) is a bimodule over (M, ∗)")?;
    Ok((alg, bim))
}

// ---------------------------------------------------------------------------
// The Tot construction and the adjunction

/// The twisted context `((D⊗kΩ)_Tot, D, H, {Id_α})` of an NS-family:
/// `(a⊗α)∗(b⊗β) = (a ∗_{α,β} b)⊗αβ`, `(a⊗α)·b = a ≻_α b`,
/// `b·(a⊗α) = b ≺_α a`, `H(a⊗α, b⊗β) = a ⋎_{α,β} b`, `Id_α(x) = x⊗α`.
/// The cocycle is omitted when `⋎` vanishes.
pub fn tot_context(n: &NsFamily) -> Result<TwistedContext> {
    n.validate().require("input is an NS-family algebra")?;
    let s = n.semigroup();
    let (d, k) = (n.dim(), s.size());
    let big = d * k;
    let mut mult = Tensor3::zeros(big, big, big);
    let mut left = Tensor3::zeros(big, d, d);
    let mut right = Tensor3::zeros(d, big, d);
    let mut h = Tensor3::zeros(big, big, d);
    for al in 0..k {
        for be in 0..k {
            let ab = s.mul(al, be);
            for x in 0..d {
                for y in 0..d {
                    let (i, j) = (tensor_index(d, x, al), tensor_index(d, y, be));
                    mult.fiber_mut(i, j)[ab * d..(ab + 1) * d].clone_from_slice(&n.total(al, be, x, y));
                    h.fiber_mut(i, j).clone_from_slice(n.vee(al, be).fiber(x, y));
                }
            }
        }
        for x in 0..d {
            for y in 0..d {
                let i = tensor_index(d, x, al);
                left.fiber_mut(i, y).clone_from_slice(n.succ[al].fiber(x, y));
                right.fiber_mut(y, i).clone_from_slice(n.prec[al].fiber(y, x));
            }
        }
    }
    let alg = Algebra::new(mult, None)?;
    alg.validate().ensure("(D⊗kΩ)_Tot is associative")?;
    let bim = Bimodule::new(left, right)?;
    bim.validate(&alg)?.ensure("D is a bimodule over (D⊗kΩ)_Tot")?;
    let coc = if n.is_dendriform() {
        None
    } else {
        let c = Cocycle2::new(h)?;
        c.validate(&alg, &bim)?.ensure("⋎ is a 2-cocycle on (D⊗kΩ)_Tot")?;
        Some(c)
    };
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
    let ctx = TwistedContext::new(alg, bim, coc, fam)?;
    ctx.check().ensure("Id_α is a twisted O-operator family")?;
    Ok(ctx)
}

/// Dendriform version of [`tot_context`], with product `(x ≺_β y + x ≻_α y)⊗αβ`.
pub fn tot_context_dendriform(d: &DendriformFamily) -> Result<TwistedContext> {
    tot_context(&d.to_ns())
}

/// `T^f(x⊗α) = T_α(f(x))` as a matrix `D⊗kΩ → A`.
pub fn adjoint_map(target: &TwistedContext, f: &Matrix) -> Result<Matrix> {
    let t = &target.family;
    if f.rows() != t.domain_dim() {
        return Err(Error::shape("f does not land in the target family's module"));
    }
    let d = f.cols();
    let k = t.semigroup().size();
    let mut out = Matrix::zeros(t.codomain_dim(), d * k);
    for al in 0..k {
        let tf = t.map(al) * f;
        for x in 0..d {
            for r in 0..out.rows() {
                out.set(r, tensor_index(d, x, al), tf.get(r, x).clone());
            }
        }
    }
    Ok(out)
}

/// `f ↦ (T^f, f)`: for an NS-family morphism `f: D → M_T` returns the
/// morphism of twisted O-operator families from the Tot context of `D` to `target`.
pub fn adjunction_transport(d: &NsFamily, target: &TwistedContext, f: &Matrix) -> Result<(Matrix, Matrix)> {
    let induced = induce_ns_family(NsSource::from_context(target))?;
    check_ns_morphism(d, &induced, f)?.require("f is an NS-family morphism into the induced structure")?;
    let tot = tot_context(d)?;
    let tf = adjoint_map(target, f)?;
    check_family_morphism(&tot, target, &tf, f)?.ensure("(T^f, f) is a morphism of twisted O-operator families")?;
    Ok((tf, f.clone()))
}

/// `(φ, ψ) ↦ ψ`: checks the pair is a morphism out of the Tot context and
/// returns `ψ`, itself an NS-family morphism into the induced structure.
pub fn adjunction_restrict(d: &NsFamily, target: &TwistedContext, phi: &Matrix, psi: &Matrix) -> Result<Matrix> {
    let tot = tot_context(d)?;
    check_family_morphism(&tot, target, phi, psi)?.require("(φ, ψ) is a morphism out of the Tot context")?;
    let induced = induce_ns_family(NsSource::from_context(target))?;
    check_ns_morphism(d, &induced, psi)?.ensure("ψ is an NS-family morphism")?;
    Ok(psi.clone())
}

/// Both round trips of the adjunction on one candidate each:
/// `f ↦ (T^f, f) ↦ f` and `(φ, ψ) ↦ ψ ↦ (T^ψ, ψ) = (φ, ψ)`.
pub fn adjunction_round_trip(d: &NsFamily, target: &TwistedContext, phi: &Matrix, psi: &Matrix) -> Result<Report> {
    let mut audit = Audit::default();
    let back = adjunction_restrict(d, target, phi, psi)?;
    let (tf, f) = adjunction_transport(d, target, &back)?;
    let outcome = (|| -> std::result::Result<(), Violation> {
        audit.expect_bool(f == *psi, "(φ, ψ) ↦ ψ ↦ T^ψ keeps ψ", &[], &[])?;
        audit.expect_bool(tf == *phi, "T^ψ = φ", &[], &[])?;
        let (_, f2) = adjunction_transport(d, target, &f).map_err(|_| Violation {
            rule: "T^f is a morphism".into(),
            elements: vec![],
            basis: vec![],
        })?;
        audit.expect_bool(f2 == f, "f ↦ (T^f, f) ↦ f", &[], &[])?;
        Ok(())
    })();
    Ok(audit.finish(outcome))
}
