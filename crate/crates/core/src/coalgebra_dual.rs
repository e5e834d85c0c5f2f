//! Coassociative coalgebras, cobimodules, coHochschild 2-cocycles,
//! twisted O-operator cofamilies and NS-cofamily coalgebras.
//!
//! Every map is a matrix on the fixed basis, with `e_i ⊗ e_j` at row
//! `i·d2 + j`. Dualizing is transposition: the dual algebra of `(C, Δ)` has
//! `e^i·e^j = Σ_c Δ[(i,j), c] e^c`, and likewise for coactions, `h` and `S_α`.
//! The co-side validators below work on the matrices directly and never pass
//! through the algebra side.

use crate::algebra_core::{Algebra, Bimodule, Cocycle2};
use crate::error::{Error, Result};
use crate::exact_linalg::{Matrix, Scalar, Tensor3};
use crate::family_algebras::NsFamily;
use crate::family_ops::{check_twisted_o_family, OperatorFamily, TwistedContext};
use crate::report::{Audit, Report, Violation};
use crate::semigroup::FiniteSemigroup;

/// `(C, Δ)` with `Δ` a `dim² × dim` matrix and an optional counit `ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalgebra {
    dim: usize,
    comult: Matrix,
    counit: Option<Vec<Scalar>>,
}

/// Left coaction `N → C⊗N` and right coaction `N → N⊗C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cobimodule {
    coalgebra_dim: usize,
    module_dim: usize,
    left: Matrix,
    right: Matrix,
}

/// Linear map `h: N → C⊗C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoCocycle {
    coalgebra_dim: usize,
    module_dim: usize,
    h: Matrix,
}

/// Maps `S_α: C → N`, one per semigroup element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoFamily {
    inner: OperatorFamily,
}

/// Comultiplications `Δ_{≺_α}`, `Δ_{≻_α}` and `Δ_{⋎_{α,β}}` (stored at `α·k+β`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsCofamily {
    semigroup: FiniteSemigroup,
    dim: usize,
    prec: Vec<Matrix>,
    succ: Vec<Matrix>,
    vee: Vec<Matrix>,
}

/// A cofamily together with the coalgebra, cobimodule and optional cocycle it lives on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoContext {
    pub coalgebra: Coalgebra,
    pub cobimodule: Cobimodule,
    pub cocycle: Option<CoCocycle>,
    pub cofamily: CoFamily,
}

fn expect_shape(m: &Matrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.rows() != rows || m.cols() != cols {
        return Err(Error::shape(format!("{what} is {}×{}, expected {rows}×{cols}", m.rows(), m.cols())));
    }
    Ok(())
}

impl Coalgebra {
    pub fn new(dim: usize, comult: Matrix) -> Result<Self> {
        expect_shape(&comult, dim * dim, dim, "comultiplication")?;
        Ok(Coalgebra { dim, comult, counit: None })
    }

    /// Records `ε` as the counit; [`Coalgebra::validate`] checks the counit laws.
    pub fn with_counit(mut self, counit: Vec<Scalar>) -> Result<Self> {
        if counit.len() != self.dim {
            return Err(Error::shape(format!("counit has length {}, expected {}", counit.len(), self.dim)));
        }
        self.counit = Some(counit);
        Ok(self)
    }

    pub fn zero(dim: usize) -> Self {
        Coalgebra { dim, comult: Matrix::zeros(dim * dim, dim), counit: None }
    }

    /// Dual of an algebra: `Δ = μᵀ`, with the unit as counit.
    pub fn dual_of(a: &Algebra) -> Self {
        Coalgebra { dim: a.dim(), comult: a.mult().as_matrix().transpose(), counit: a.unit().map(<[Scalar]>::to_vec) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn comult(&self) -> &Matrix {
        &self.comult
    }

    pub fn counit(&self) -> Option<&[Scalar]> {
        self.counit.as_deref()
    }

    /// `(C^dual, Δᵀ)` with the counit as unit.
    pub fn dualize(&self) -> Algebra {
        let mult = Tensor3::from_matrix(&self.comult.transpose(), self.dim, self.dim).expect("square comultiplication");
        Algebra::new(mult, self.counit.clone()).expect("cubic tensor")
    }

    pub fn validate(&self) -> Report {
        let id = Matrix::identity(self.dim);
        let lhs = &self.comult.kron(&id) * &self.comult;
        let rhs = &id.kron(&self.comult) * &self.comult;
        let mut audit = Audit::default();
        let outcome = compare_columns(&mut audit, &lhs, &rhs, "coassociativity", &[]).and_then(|()| {
            let Some(e) = &self.counit else { return Ok(()) };
            let e = Matrix::from_rows(vec![e.clone()], self.dim).expect("counit row");
            compare_columns(&mut audit, &(&e.kron(&id) * &self.comult), &id, "(ε⊗id)Δ = id", &[])?;
            compare_columns(&mut audit, &(&id.kron(&e) * &self.comult), &id, "(id⊗ε)Δ = id", &[])
        });
        audit.finish(outcome)
    }
}

impl Cobimodule {
    pub fn new(coalgebra_dim: usize, module_dim: usize, left: Matrix, right: Matrix) -> Result<Self> {
        let (c, n) = (coalgebra_dim, module_dim);
        expect_shape(&left, c * n, n, "left coaction")?;
        expect_shape(&right, n * c, n, "right coaction")?;
        Ok(Cobimodule { coalgebra_dim, module_dim, left, right })
    }

    pub fn zero(coalgebra_dim: usize, module_dim: usize) -> Self {
        let (c, n) = (coalgebra_dim, module_dim);
        Cobimodule { coalgebra_dim, module_dim, left: Matrix::zeros(c * n, n), right: Matrix::zeros(n * c, n) }
    }

    /// `C` over itself with `Δˡ = Δʳ = Δ`.
    pub fn regular(c: &Coalgebra) -> Self {
        Cobimodule { coalgebra_dim: c.dim, module_dim: c.dim, left: c.comult.clone(), right: c.comult.clone() }
    }

    /// Dual of a bimodule: the coactions are the transposed actions.
    pub fn dual_of(m: &Bimodule) -> Self {
        Cobimodule {
            coalgebra_dim: m.algebra_dim(),
            module_dim: m.module_dim(),
            left: m.left().as_matrix().transpose(),
            right: m.right().as_matrix().transpose(),
        }
    }

    pub fn coalgebra_dim(&self) -> usize {
        self.coalgebra_dim
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn left(&self) -> &Matrix {
        &self.left
    }

    pub fn right(&self) -> &Matrix {
        &self.right
    }

    pub fn dualize(&self) -> Bimodule {
        let (c, n) = (self.coalgebra_dim, self.module_dim);
        let left = Tensor3::from_matrix(&self.left.transpose(), c, n).expect("checked shape");
        let right = Tensor3::from_matrix(&self.right.transpose(), n, c).expect("checked shape");
        Bimodule::new(left, right).expect("consistent dims")
    }

    pub fn validate(&self, c: &Coalgebra) -> Result<Report> {
        if c.dim != self.coalgebra_dim {
            return Err(Error::shape(format!(
                "cobimodule over a {}-dim coalgebra, given a {}-dim coalgebra",
                self.coalgebra_dim, c.dim
            )));
        }
        let ic = Matrix::identity(self.coalgebra_dim);
        let in_ = Matrix::identity(self.module_dim);
        let (dl, dr, d) = (&self.left, &self.right, &c.comult);
        let checks = [
            ("(Δ⊗id)Δˡ = (id⊗Δˡ)Δˡ", &d.kron(&in_) * dl, &ic.kron(dl) * dl),
            ("(Δˡ⊗id)Δʳ = (id⊗Δʳ)Δˡ", &dl.kron(&ic) * dr, &ic.kron(dr) * dl),
            ("(Δʳ⊗id)Δʳ = (id⊗Δ)Δʳ", &dr.kron(&ic) * dr, &in_.kron(d) * dr),
        ];
        let mut audit = Audit::default();
        let outcome = checks.iter().try_for_each(|(rule, l, r)| compare_columns(&mut audit, l, r, rule, &[]));
        Ok(audit.finish(outcome))
    }
}

impl CoCocycle {
    pub fn new(coalgebra_dim: usize, module_dim: usize, h: Matrix) -> Result<Self> {
        expect_shape(&h, coalgebra_dim * coalgebra_dim, module_dim, "coHochschild cochain")?;
        Ok(CoCocycle { coalgebra_dim, module_dim, h })
    }

    pub fn zero(coalgebra_dim: usize, module_dim: usize) -> Self {
        CoCocycle { coalgebra_dim, module_dim, h: Matrix::zeros(coalgebra_dim * coalgebra_dim, module_dim) }
    }

    pub fn dual_of(h: &Cocycle2) -> Self {
        CoCocycle { coalgebra_dim: h.algebra_dim(), module_dim: h.module_dim(), h: h.tensor().as_matrix().transpose() }
    }

    pub fn coalgebra_dim(&self) -> usize {
        self.coalgebra_dim
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.h
    }

    pub fn dualize(&self) -> Cocycle2 {
        let c = self.coalgebra_dim;
        Cocycle2::new(Tensor3::from_matrix(&self.h.transpose(), c, c).expect("checked shape")).expect("square")
    }

    /// `(id⊗h)Δˡ − (Δ⊗id)h + (id⊗Δ)h − (h⊗id)Δʳ = 0`.
    pub fn validate(&self, c: &Coalgebra, n: &Cobimodule) -> Result<Report> {
        if c.dim != self.coalgebra_dim || n.coalgebra_dim != self.coalgebra_dim || n.module_dim != self.module_dim {
            return Err(Error::shape("cocycle dims do not match the coalgebra and cobimodule"));
        }
        let ic = Matrix::identity(c.dim);
        let h = &self.h;
        let plus = &(&ic.kron(h) * &n.left) + &(&ic.kron(&c.comult) * h);
        let minus = &(&c.comult.kron(&ic) * h) + &(&h.kron(&ic) * &n.right);
        let mut audit = Audit::default();
        let outcome = compare_columns(&mut audit, &plus, &minus, "coHochschild 2-cocycle identity", &[]);
        Ok(audit.finish(outcome))
    }
}

impl CoFamily {
    pub fn new(semigroup: FiniteSemigroup, maps: Vec<Matrix>) -> Result<Self> {
        Ok(CoFamily { inner: OperatorFamily::new(semigroup, maps)? })
    }

    pub fn zero(semigroup: FiniteSemigroup, coalgebra_dim: usize, module_dim: usize) -> Self {
        CoFamily { inner: OperatorFamily::zero(semigroup, coalgebra_dim, module_dim) }
    }

    /// `S_α = T_αᵀ`.
    pub fn dual_of(t: &OperatorFamily) -> Self {
        CoFamily { inner: t.map_each(|_, m| m.transpose()).expect("uniform shapes") }
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        self.inner.semigroup()
    }

    pub fn coalgebra_dim(&self) -> usize {
        self.inner.domain_dim()
    }

    pub fn module_dim(&self) -> usize {
        self.inner.codomain_dim()
    }

    pub fn maps(&self) -> &[Matrix] {
        self.inner.maps()
    }

    pub fn map(&self, alpha: usize) -> &Matrix {
        self.inner.map(alpha)
    }

    pub fn dualize(&self) -> OperatorFamily {
        self.inner.map_each(|_, m| m.transpose()).expect("uniform shapes")
    }
}

impl CoContext {
    pub fn new(coalgebra: Coalgebra, cobimodule: Cobimodule, cocycle: Option<CoCocycle>, cofamily: CoFamily) -> Result<Self> {
        cofamily_shapes(&cofamily, &coalgebra, &cobimodule, cocycle.as_ref())?;
        Ok(CoContext { coalgebra, cobimodule, cocycle, cofamily })
    }

    /// Transpose of every piece of a twisted context.
    pub fn dual_of(ctx: &TwistedContext) -> Self {
        CoContext {
            coalgebra: Coalgebra::dual_of(&ctx.algebra),
            cobimodule: Cobimodule::dual_of(&ctx.bimodule),
            cocycle: ctx.cocycle.as_ref().map(CoCocycle::dual_of),
            cofamily: CoFamily::dual_of(&ctx.family),
        }
    }

    pub fn check(&self) -> Result<Report> {
        check_twisted_o_cofamily(&self.cofamily, &self.coalgebra, &self.cobimodule, self.cocycle.as_ref())
    }

    /// The dual twisted context, keeping an absent cocycle absent.
    pub fn dualize(&self) -> Result<TwistedContext> {
        TwistedContext::new(
            self.coalgebra.dualize(),
            self.cobimodule.dualize(),
            self.cocycle.as_ref().map(CoCocycle::dualize),
            self.cofamily.dualize(),
        )
    }
}

fn cofamily_shapes(s: &CoFamily, c: &Coalgebra, n: &Cobimodule, h: Option<&CoCocycle>) -> Result<()> {
    if n.coalgebra_dim != c.dim {
        return Err(Error::shape("cobimodule is over a coalgebra of a different dimension"));
    }
    if s.coalgebra_dim() != c.dim || s.module_dim() != n.module_dim {
        return Err(Error::shape(format!(
            "cofamily maps are {}×{}, expected {}×{} (C → N)",
            s.module_dim(),
            s.coalgebra_dim(),
            n.module_dim,
            c.dim
        )));
    }
    if let Some(h) = h {
        if h.coalgebra_dim != c.dim || h.module_dim != n.module_dim {
            return Err(Error::shape("cocycle dims do not match the coalgebra and cobimodule"));
        }
    }
    Ok(())
}

fn compare_columns(
    audit: &mut Audit,
    lhs: &Matrix,
    rhs: &Matrix,
    rule: &str,
    elements: &[usize],
) -> std::result::Result<(), Violation> {
    for j in 0..lhs.cols() {
        audit.expect_eq(&lhs.column(j), &rhs.column(j), rule, elements, &[j])?;
    }
    Ok(())
}

pub fn validate_coalgebra(c: &Coalgebra) -> Report {
    c.validate()
}

pub fn validate_cobimodule(c: &Coalgebra, n: &Cobimodule) -> Result<Report> {
    n.validate(c)
}

pub fn validate_cococycle(h: &CoCocycle, c: &Coalgebra, n: &Cobimodule) -> Result<Report> {
    h.validate(c, n)
}

/// `(S_α⊗S_β)Δ = ((S_α⊗id)Δˡ + (id⊗S_β)Δʳ + (S_α⊗S_β)h) S_{αβ}` for all `α, β`.
pub fn check_twisted_o_cofamily(s: &CoFamily, c: &Coalgebra, n: &Cobimodule, h: Option<&CoCocycle>) -> Result<Report> {
    cofamily_shapes(s, c, n, h)?;
    if let Some(h) = h {
        h.validate(c, n)?.require("h is a coHochschild 2-cocycle")?;
    }
    let sg = s.semigroup();
    let in_ = Matrix::identity(n.module_dim);
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..sg.size() {
            for be in 0..sg.size() {
                let (sa, sb) = (s.map(al), s.map(be));
                let both = sa.kron(sb);
                let lhs = &both * &c.comult;
                let mut inner = &(&sa.kron(&in_) * &n.left) + &(&in_.kron(sb) * &n.right);
                if let Some(h) = h {
                    inner = &inner + &(&both * &h.h);
                }
                let rhs = &inner * s.map(sg.mul(al, be));
                compare_columns(&mut audit, &lhs, &rhs, "twisted O-operator cofamily identity", &[al, be])?;
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// The dual `H`-twisted O-operator family `{S_αᵀ}` with its algebra, bimodule
/// and cocycle. An absent `h` dualizes to the zero cocycle.
pub fn dualize_cofamily(
    s: &CoFamily,
    c: &Coalgebra,
    n: &Cobimodule,
    h: Option<&CoCocycle>,
) -> Result<(OperatorFamily, Algebra, Bimodule, Cocycle2)> {
    check_twisted_o_cofamily(s, c, n, h)?.require("input is a twisted O-operator cofamily")?;
    let t = s.dualize();
    let a = c.dualize();
    let m = n.dualize();
    let hh = match h {
        Some(h) => h.dualize(),
        None => Cocycle2::zero(c.dim, n.module_dim),
    };
    check_twisted_o_family(&t, &a, &m, Some(&hh))?.ensure("dual is a twisted O-operator family")?;
    Ok((t, a, m, hh))
}

impl NsCofamily {
    pub fn new(semigroup: FiniteSemigroup, prec: Vec<Matrix>, succ: Vec<Matrix>, vee: Vec<Matrix>) -> Result<Self> {
        let k = semigroup.size();
        if prec.len() != k || succ.len() != k || vee.len() != k * k {
            return Err(Error::shape(format!(
                "{}/{}/{} comultiplications for a semigroup of size {k}",
                prec.len(),
                succ.len(),
                vee.len()
            )));
        }
        let dim = prec[0].cols();
        for m in prec.iter().chain(&succ).chain(&vee) {
            expect_shape(m, dim * dim, dim, "comultiplication")?;
        }
        Ok(NsCofamily { semigroup, dim, prec, succ, vee })
    }

    pub fn zero(semigroup: FiniteSemigroup, dim: usize) -> Self {
        let k = semigroup.size();
        let z = Matrix::zeros(dim * dim, dim);
        NsCofamily { semigroup, dim, prec: vec![z.clone(); k], succ: vec![z.clone(); k], vee: vec![z; k * k] }
    }

    /// Transposes of the operations of an NS-family.
    pub fn dual_of(f: &NsFamily) -> Self {
        let t = |v: &[Tensor3]| v.iter().map(|x| x.as_matrix().transpose()).collect();
        NsCofamily {
            semigroup: f.semigroup().clone(),
            dim: f.dim(),
            prec: t(f.precs()),
            succ: t(f.succs()),
            vee: t(f.vees()),
        }
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self, alpha: usize) -> &Matrix {
        &self.prec[alpha]
    }

    pub fn succ(&self, alpha: usize) -> &Matrix {
        &self.succ[alpha]
    }

    pub fn vee(&self, alpha: usize, beta: usize) -> &Matrix {
        &self.vee[alpha * self.semigroup.size() + beta]
    }

    /// All `Δ_⋎` vanish.
    pub fn is_dendriform(&self) -> bool {
        self.vee.iter().all(Matrix::is_zero)
    }

    pub fn dualize(&self) -> NsFamily {
        let d = self.dim;
        let t = |v: &[Matrix]| v.iter().map(|m| Tensor3::from_matrix(&m.transpose(), d, d).expect("checked")).collect();
        NsFamily::new(self.semigroup.clone(), t(&self.prec), t(&self.succ), t(&self.vee)).expect("checked shapes")
    }

    /// `Δ_{≻_α} + Δ_{≺_β} + Δ_{⋎_{α,β}}`.
    fn total(&self, alpha: usize, beta: usize) -> Matrix {
        &(&self.succ[alpha] + &self.prec[beta]) + self.vee(alpha, beta)
    }

    pub fn validate(&self) -> Report {
        validate_ns_cofamily(self)
    }
}

/// The four NS-cofamily coaxioms on every basis vector.
pub fn validate_ns_cofamily(f: &NsCofamily) -> Report {
    let s = &f.semigroup;
    let k = s.size();
    let id = Matrix::identity(f.dim);
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..k {
            for be in 0..k {
                let ab = s.mul(al, be);
                let e = [al, be];
                let lhs = &f.prec[al].kron(&id) * &f.prec[be];
                let rhs = &id.kron(&f.total(al, be)) * &f.prec[ab];
                compare_columns(&mut audit, &lhs, &rhs, "NS-cofamily coaxiom 1", &e)?;
                let lhs = &f.succ[al].kron(&id) * &f.prec[be];
                let rhs = &id.kron(&f.prec[be]) * &f.succ[al];
                compare_columns(&mut audit, &lhs, &rhs, "NS-cofamily coaxiom 2", &e)?;
                let lhs = &f.total(al, be).kron(&id) * &f.succ[ab];
                let rhs = &id.kron(&f.succ[be]) * &f.succ[al];
                compare_columns(&mut audit, &lhs, &rhs, "NS-cofamily coaxiom 3", &e)?;
            }
        }
        for al in 0..k {
            for be in 0..k {
                let ab = s.mul(al, be);
                for ga in 0..k {
                    let bg = s.mul(be, ga);
                    let lhs = &(&f.total(al, be).kron(&id) * f.vee(ab, ga)) + &(&f.vee(al, be).kron(&id) * &f.prec[ga]);
                    let rhs = &(&id.kron(f.vee(be, ga)) * &f.succ[al]) + &(&id.kron(&f.total(be, ga)) * f.vee(al, bg));
                    compare_columns(&mut audit, &lhs, &rhs, "NS-cofamily coaxiom 4", &[al, be, ga])?;
                }
            }
        }
        Ok(())
    })();
    audit.finish(outcome)
}

/// `Δ_{≺_α} = (id⊗S_α)Δʳ`, `Δ_{≻_α} = (S_α⊗id)Δˡ`, `Δ_{⋎_{α,β}} = (S_α⊗S_β)h`.
pub fn induce_ns_cofamily(s: &CoFamily, c: &Coalgebra, n: &Cobimodule, h: Option<&CoCocycle>) -> Result<NsCofamily> {
    check_twisted_o_cofamily(s, c, n, h)?.require("input is a twisted O-operator cofamily")?;
    let sg = s.semigroup();
    let k = sg.size();
    let dn = n.module_dim;
    let in_ = Matrix::identity(dn);
    let prec = s.maps().iter().map(|sa| &in_.kron(sa) * &n.right).collect();
    let succ = s.maps().iter().map(|sa| &sa.kron(&in_) * &n.left).collect();
    let mut vee = Vec::with_capacity(k * k);
    for al in 0..k {
        for be in 0..k {
            vee.push(match h {
                Some(h) => &s.map(al).kron(s.map(be)) * &h.h,
                None => Matrix::zeros(dn * dn, dn),
            });
        }
    }
    let out = NsCofamily::new(sg.clone(), prec, succ, vee)?;
    validate_ns_cofamily(&out).ensure("induced structure is an NS-cofamily coalgebra")?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::{adjoint_bimodule, coadjoint_bimodule};
    use crate::catalog;
    use crate::exact_linalg::Scalar;
    use crate::family_algebras::{induce_ns_family, NsSource};
    use crate::family_ops::build_nijenhuis_twisted_context;

    fn id_context(s: &FiniteSemigroup, a: &Algebra) -> TwistedContext {
        build_nijenhuis_twisted_context(&OperatorFamily::identity(s.clone(), a.dim()), a, s).unwrap()
    }

    #[test]
    fn trivial_coalgebras() {
        assert!(Coalgebra::zero(3).validate().passed());
        let grouplike = Coalgebra::new(1, Matrix::from_ints(&[&[1]])).unwrap();
        assert!(grouplike.validate().passed());
        let dual = grouplike.dualize();
        assert_eq!(dual.mul_basis(0, 0), &[Scalar::one()]);
        assert!(Coalgebra::new(2, Matrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn counit_laws() {
        let c = Coalgebra::dual_of(&catalog::dual_numbers());
        assert_eq!(c.counit(), catalog::dual_numbers().unit());
        assert!(c.validate().passed());
        let bad = c.clone().with_counit(vec![Scalar::one(), Scalar::one()]).unwrap();
        assert!(!bad.validate().passed());
        assert!(c.with_counit(vec![Scalar::one()]).is_err());
    }

    #[test]
    fn non_coassociative_is_located() {
        // Δ(e0) = e1⊗e1, Δ(e1) = e0⊗e0
        let mut d = Matrix::zeros(4, 2);
        d.set(3, 0, Scalar::one());
        d.set(0, 1, Scalar::one());
        let c = Coalgebra::new(2, d).unwrap();
        let r = c.validate();
        assert_eq!(r.violation.unwrap().basis, vec![0]);
        assert!(!c.dualize().validate().passed());
    }

    #[test]
    fn duals_of_catalog_structures_validate() {
        for a in catalog::algebras() {
            let c = Coalgebra::dual_of(&a);
            assert!(c.validate().passed());
            assert_eq!(c.dualize().mult(), a.mult());
            for m in [adjoint_bimodule(&a), coadjoint_bimodule(&a)] {
                let n = Cobimodule::dual_of(&m);
                assert!(n.validate(&c).unwrap().passed());
                assert_eq!(n.dualize(), m);
            }
            assert!(Cobimodule::regular(&c).validate(&c).unwrap().passed());
            assert!(Cobimodule::zero(c.dim(), 2).validate(&c).unwrap().passed());
            let reg = Cobimodule::regular(&c);
            let h = CoCocycle::new(c.dim(), c.dim(), c.comult().clone()).unwrap();
            assert!(h.validate(&c, &reg).unwrap().passed());
            assert!(CoCocycle::zero(c.dim(), c.dim()).validate(&c, &reg).unwrap().passed());
        }
    }

    #[test]
    fn broken_cobimodule_and_cocycle_are_rejected() {
        let a = catalog::dual_numbers();
        let c = Coalgebra::dual_of(&a);
        let mut left = c.comult().clone();
        left.set(0, 0, Scalar::int(2));
        let n = Cobimodule::new(2, 2, left, c.comult().clone()).unwrap();
        assert!(!n.validate(&c).unwrap().passed());
        let reg = Cobimodule::regular(&c);
        let mut h = Matrix::zeros(4, 2);
        h.set(0, 0, Scalar::one());
        let h = CoCocycle::new(2, 2, h).unwrap();
        let direct = h.validate(&c, &reg).unwrap().passed();
        let via_dual = h.dualize().validate(&a, &adjoint_bimodule(&a)).unwrap().passed();
        assert_eq!(direct, via_dual);
    }

    #[test]
    fn trivial_cofamilies_pass() {
        let s = FiniteSemigroup::cyclic(2);
        let a = catalog::upper_triangular();
        let c = Coalgebra::dual_of(&a);
        let n = Cobimodule::regular(&c);
        let z = CoFamily::zero(s.clone(), 3, 3);
        assert!(check_twisted_o_cofamily(&z, &c, &n, None).unwrap().passed());
        let (t, _, _, h) = dualize_cofamily(&z, &c, &n, None).unwrap();
        assert!(t.maps().iter().all(Matrix::is_zero));
        assert!(h.tensor().is_zero());
        let ns = induce_ns_cofamily(&z, &c, &n, None).unwrap();
        assert_eq!(ns, NsCofamily::zero(s.clone(), 3));
        let zc = Coalgebra::zero(2);
        let any = CoFamily::new(s, vec![Matrix::from_ints(&[&[1, 2], &[3, 4]]); 2]).unwrap();
        let zn = Cobimodule::zero(2, 2);
        assert!(check_twisted_o_cofamily(&any, &zc, &zn, Some(&CoCocycle::zero(2, 2))).unwrap().passed());
    }

    #[test]
    fn grouplike_dualizes_to_the_field() {
        let c = Coalgebra::new(1, Matrix::from_ints(&[&[1]])).unwrap();
        let n = Cobimodule::regular(&c);
        let s = CoFamily::zero(FiniteSemigroup::trivial(), 1, 1);
        let (t, a, _, _) = dualize_cofamily(&s, &c, &n, None).unwrap();
        assert_eq!(a.mult(), catalog::field().mult());
        assert!(t.map(0).is_zero());
    }

    #[test]
    fn id_contexts_round_trip_through_the_dual() {
        for s in [FiniteSemigroup::trivial(), FiniteSemigroup::cyclic(2), FiniteSemigroup::left_zero(2)] {
            for a in [catalog::dual_numbers(), catalog::two_dim_left_unit()] {
                let ctx = id_context(&s, &a);
                let co = CoContext::dual_of(&ctx);
                assert!(co.check().unwrap().passed());
                assert!(co.coalgebra.validate().passed());
                assert!(co.cobimodule.validate(&co.coalgebra).unwrap().passed());
                let back = co.dualize().unwrap();
                assert_eq!(back.family, ctx.family);
                assert_eq!(back.bimodule, ctx.bimodule);
                assert_eq!(back.cocycle, ctx.cocycle);
                assert_eq!(back.algebra.mult(), ctx.algebra.mult());
                assert_eq!(CoContext::dual_of(&back), co);

                let h = co.cocycle.as_ref();
                let ns = induce_ns_cofamily(&co.cofamily, &co.coalgebra, &co.cobimodule, h).unwrap();
                let expected = induce_ns_family(NsSource::from_context(&ctx)).unwrap();
                assert_eq!(ns.dualize(), expected);
                assert_eq!(NsCofamily::dual_of(&expected), ns);
            }
        }
    }

    #[test]
    fn invalid_cofamily_is_refused() {
        let a = catalog::dual_numbers();
        let c = Coalgebra::dual_of(&a);
        let n = Cobimodule::regular(&c);
        let s = CoFamily::new(FiniteSemigroup::trivial(), vec![Matrix::identity(2)]).unwrap();
        let r = check_twisted_o_cofamily(&s, &c, &n, None).unwrap();
        assert!(!r.passed());
        let via_dual = check_twisted_o_family(&s.dualize(), &a, &adjoint_bimodule(&a), None).unwrap();
        assert!(!via_dual.passed());
        assert!(matches!(dualize_cofamily(&s, &c, &n, None), Err(Error::Precondition { .. })));
        assert!(matches!(induce_ns_cofamily(&s, &c, &n, None), Err(Error::Precondition { .. })));
    }

    #[test]
    fn untwisted_cofamily_gives_dendriform() {
        // R(x) = x², R(x²) = 0: every product involving x² vanishes.
        let a = catalog::nilpotent_x();
        let s = FiniteSemigroup::cyclic(2);
        let t = OperatorFamily::constant(s, Matrix::from_ints(&[&[0, 0], &[1, 0]]));
        let ctx = TwistedContext::new(a.clone(), adjoint_bimodule(&a), None, t).unwrap();
        assert!(ctx.check().passed());
        let co = CoContext::dual_of(&ctx);
        let ns = induce_ns_cofamily(&co.cofamily, &co.coalgebra, &co.cobimodule, None).unwrap();
        assert!(ns.is_dendriform());
        assert!(ns.validate().passed());
    }
}
