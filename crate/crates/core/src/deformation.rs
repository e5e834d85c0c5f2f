//! Truncated formal deformations of twisted O-operator families and of
//! NS-family algebras, their equivalences and the trivialization step.
//!
//! A power series `Σ tⁱ Xᵢ` of linear maps is a slice of matrices, truncated
//! at the order of the deformation it acts on.

use serde::Serialize;

use crate::algebra_core::{cocycle_left_fixed, cocycle_right_fixed, left_mult_matrix, right_mult_matrix};
use crate::cohomology::{delta_nsfam, delta_twooperf, twooperf_theta_coboundary, Cochain};
use crate::error::{Error, Result};
use crate::exact_linalg::{add_into, sub_into, zero_vec, Matrix, Scalar, Tensor3};
use crate::family_algebras::NsFamily;
use crate::family_ops::{OperatorFamily, TwistedContext};
use crate::report::{Audit, Report, Violation};

/// Per-order outcome of a deformation check; entry `n` covers the coefficient of `tⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderReports {
    pub orders: Vec<Report>,
}

impl OrderReports {
    pub fn passed(&self) -> bool {
        self.orders.iter().all(Report::passed)
    }

    /// True when orders `0..=n` pass.
    pub fn passed_through(&self, n: usize) -> bool {
        self.orders.iter().take(n + 1).all(Report::passed)
    }

    pub fn first_failure(&self) -> Option<(usize, &Violation)> {
        self.orders.iter().enumerate().find_map(|(n, r)| r.violation.as_ref().map(|v| (n, v)))
    }
}

// ---------------------------------------------------------------------------
// power series of matrices

fn series_mul(a: &[Matrix], b: &[Matrix], order: usize) -> Vec<Matrix> {
    (0..=order)
        .map(|n| {
            let mut acc = &a[0] * &b[n];
            for i in 1..=n {
                acc = &acc + &(&a[i] * &b[n - i]);
            }
            acc
        })
        .collect()
}

/// Inverse of a series whose constant term is invertible.
fn series_inv(a: &[Matrix], order: usize) -> Result<Vec<Matrix>> {
    let a0inv = a[0].inverse().ok_or_else(|| Error::Invalid("constant term of the series is not invertible".into()))?;
    let mut out = vec![a0inv.clone()];
    for n in 1..=order {
        let mut acc = Matrix::zeros(a[0].rows(), a[0].cols());
        for i in 1..=n {
            acc = &acc + &(&a[i] * &out[n - i]);
        }
        out.push(-&(&a0inv * &acc));
    }
    Ok(out)
}

fn pad(mut v: Vec<Matrix>, order: usize, rows: usize, cols: usize) -> Vec<Matrix> {
    v.truncate(order + 1);
    while v.len() <= order {
        v.push(Matrix::zeros(rows, cols));
    }
    v
}

// ---------------------------------------------------------------------------
// twisted O-operator family deformations

/// `T^t = Σ tⁱ T⁽ⁱ⁾` truncated at order `N`, with `T⁽⁰⁾` the context's family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedFamilyDeformation {
    context: TwistedContext,
    terms: Vec<OperatorFamily>,
}

impl TruncatedFamilyDeformation {
    pub fn new(context: TwistedContext, terms: Vec<OperatorFamily>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Invalid("a deformation needs its order-0 term".into()));
        }
        if terms[0] != context.family {
            return Err(Error::Invalid("order-0 term differs from the base family".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.semigroup() != context.semigroup()
                || t.domain_dim() != context.family.domain_dim()
                || t.codomain_dim() != context.family.codomain_dim()
            {
                return Err(Error::shape(format!("term {i} does not match the base family's shape")));
            }
        }
        Ok(TruncatedFamilyDeformation { context, terms })
    }

    /// The constant deformation `T^t = T` at the given order.
    pub fn constant(context: TwistedContext, order: usize) -> Self {
        let f = &context.family;
        let zero = OperatorFamily::zero(f.semigroup().clone(), f.domain_dim(), f.codomain_dim());
        let mut terms = vec![f.clone()];
        terms.extend(std::iter::repeat_n(zero, order));
        TruncatedFamilyDeformation { context, terms }
    }

    /// `T + t·T¹` at order 1.
    pub fn first_order(context: TwistedContext, t1: OperatorFamily) -> Result<Self> {
        let t0 = context.family.clone();
        Self::new(context, vec![t0, t1])
    }

    pub fn context(&self) -> &TwistedContext {
        &self.context
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[OperatorFamily] {
        &self.terms
    }

    pub fn term(&self, i: usize) -> &OperatorFamily {
        &self.terms[i]
    }

    /// `T^t_α` as a power series.
    fn series(&self, alpha: usize) -> Vec<Matrix> {
        self.terms.iter().map(|t| t.map(alpha).clone()).collect()
    }
}

/// Checks, for each `n ≤ N`,
/// `Σ_{i+j=n} T⁽ⁱ⁾_α(u)·T⁽ʲ⁾_β(v) = Σ_{i+j=n} T⁽ⁱ⁾_{αβ}(T⁽ʲ⁾_α(u)·v + u·T⁽ʲ⁾_β(v))
///  + Σ_{i+j+k=n} T⁽ⁱ⁾_{αβ}(H(T⁽ʲ⁾_α u, T⁽ᵏ⁾_β v))` on basis pairs.
pub fn check_family_deformation(d: &TruncatedFamilyDeformation) -> Result<OrderReports> {
    let ctx = &d.context;
    ctx.check().require("order-0 term is a twisted O-operator family")?;
    let s = ctx.semigroup();
    let k = s.size();
    let (alg, bim) = (&ctx.algebra, &ctx.bimodule);
    let dm = bim.module_dim();
    let n_max = d.order();
    // cols[i][α][u] = T⁽ⁱ⁾_α(e_u)
    let cols: Vec<Vec<Vec<Vec<Scalar>>>> = d
        .terms
        .iter()
        .map(|t| t.maps().iter().map(|m| (0..dm).map(|u| m.column(u)).collect()).collect())
        .collect();
    let mut orders = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut audit = Audit::default();
        let outcome = (|| -> std::result::Result<(), Violation> {
            for al in 0..k {
                for be in 0..k {
                    let ab = s.mul(al, be);
                    for u in 0..dm {
                        for v in 0..dm {
                            let mut lhs = zero_vec(alg.dim());
                            let mut rhs = zero_vec(alg.dim());
                            for i in 0..=n {
                                let j = n - i;
                                add_into(&mut lhs, &alg.mul(&cols[i][al][u], &cols[j][be][v]));
                                let mut arg = bim.left().apply_right_basis(&cols[j][al][u], v);
                                add_into(&mut arg, &bim.right().apply_left_basis(u, &cols[j][be][v]));
                                for jj in 0..=j {
                                    add_into(&mut arg, &ctx.h(&cols[jj][al][u], &cols[j - jj][be][v]));
                                }
                                add_into(&mut rhs, &d.terms[i].map(ab).apply(&arg));
                            }
                            audit.expect_eq(&lhs, &rhs, &format!("deformation equation at order {n}"), &[al, be], &[u, v])?;
                        }
                    }
                }
            }
            Ok(())
        })();
        orders.push(audit.finish(outcome));
    }
    Ok(OrderReports { orders })
}

/// `δ T⁽¹⁾ = 0` for a deformation valid through order 1.
pub fn infinitesimal_cocycle_check(d: &TruncatedFamilyDeformation) -> Result<bool> {
    if d.order() < 1 {
        return Err(Error::Invalid("deformation has no order-1 term".into()));
    }
    let rep = check_family_deformation(d)?;
    rep.orders[1].clone().require("deformation is valid to order 1")?;
    let c = Cochain::from_family(d.term(1));
    Ok(delta_twooperf(&d.context, &c)?.is_zero())
}

/// `θ ∈ A` with higher terms `φᵢ` (on `A`) and `ψᵢ_α` (on `M`, one per `α`) for `i ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceData {
    pub theta: Vec<Scalar>,
    /// `φ₂, φ₃, …`
    pub phi_higher: Vec<Matrix>,
    /// `ψ₂, ψ₃, …`, each a list indexed by `α`.
    pub psi_higher: Vec<Vec<Matrix>>,
}

impl EquivalenceData {
    /// `θ` with all higher terms zero.
    pub fn first_order(theta: Vec<Scalar>) -> Self {
        EquivalenceData { theta, phi_higher: vec![], psi_higher: vec![] }
    }

    /// `φ^t = exp(t(l^ad_θ − r^ad_θ))` and `ψ^t_α = exp(t(l_θ − r_θ))`, an
    /// equivalence that carries deformations to deformations when `H = 0`.
    pub fn exponential(ctx: &TwistedContext, theta: Vec<Scalar>, order: usize) -> Result<Self> {
        if ctx.cocycle.is_some() {
            return Err(Error::Invalid("exponential equivalences need an untwisted context".into()));
        }
        let ad = &left_mult_matrix(&ctx.algebra, &theta) - &right_mult_matrix(&ctx.algebra, &theta);
        let lr = &ctx.bimodule.left().left_multiplication(&theta) - &ctx.bimodule.right().right_multiplication(&theta);
        let mut phi_higher = Vec::new();
        let mut psi_higher = Vec::new();
        let mut fact = Scalar::one();
        for i in 2..=order {
            fact = &fact * &Scalar::int(i as i64);
            let c = fact.recip().expect("nonzero factorial");
            phi_higher.push(ad.pow(i).scale(&c));
            psi_higher.push(vec![lr.pow(i).scale(&c); ctx.semigroup().size()]);
        }
        Ok(EquivalenceData { theta, phi_higher, psi_higher })
    }

    fn check_shapes(&self, ctx: &TwistedContext) -> Result<()> {
        let (da, dm, k) = (ctx.algebra.dim(), ctx.bimodule.module_dim(), ctx.semigroup().size());
        if self.theta.len() != da {
            return Err(Error::shape(format!("θ has length {}, expected {da}", self.theta.len())));
        }
        if self.phi_higher.iter().any(|m| m.rows() != da || m.cols() != da) {
            return Err(Error::shape("higher φ terms must be maps A → A"));
        }
        for per in &self.psi_higher {
            if per.len() != k || per.iter().any(|m| m.rows() != dm || m.cols() != dm) {
                return Err(Error::shape("higher ψ terms must be one map M → M per semigroup element"));
            }
        }
        Ok(())
    }

    /// `φ^t` truncated at `order`.
    pub fn phi_series(&self, ctx: &TwistedContext, order: usize) -> Vec<Matrix> {
        let da = ctx.algebra.dim();
        let mut s = vec![
            Matrix::identity(da),
            &left_mult_matrix(&ctx.algebra, &self.theta) - &right_mult_matrix(&ctx.algebra, &self.theta),
        ];
        s.extend(self.phi_higher.iter().cloned());
        pad(s, order, da, da)
    }

    /// `ψ^t_α = id + t(l_θ − r_θ + H(θ, T_α −) − H(T_α −, θ)) + Σ tⁱψᵢ_α`, truncated.
    pub fn psi_series(&self, ctx: &TwistedContext, alpha: usize, order: usize) -> Vec<Matrix> {
        let dm = ctx.bimodule.module_dim();
        let mut first = &ctx.bimodule.left().left_multiplication(&self.theta) - &ctx.bimodule.right().right_multiplication(&self.theta);
        if let Some(h) = &ctx.cocycle {
            let t = ctx.family.map(alpha);
            first = &first + &(&cocycle_left_fixed(h, &self.theta, t) - &cocycle_right_fixed(h, t, &self.theta));
        }
        let mut s = vec![Matrix::identity(dm), first];
        s.extend(self.psi_higher.iter().map(|per| per[alpha].clone()));
        pad(s, order, dm, dm)
    }
}

/// `T̄^t_α = φ^t ∘ T^t_α ∘ (ψ^t_α)⁻¹ mod t^{N+1}`.
fn transport(d: &TruncatedFamilyDeformation, e: &EquivalenceData) -> Result<TruncatedFamilyDeformation> {
    let ctx = &d.context;
    e.check_shapes(ctx)?;
    let n = d.order();
    let phi = e.phi_series(ctx, n);
    let k = ctx.semigroup().size();
    let mut per_alpha = Vec::with_capacity(k);
    for al in 0..k {
        let psi_inv = series_inv(&e.psi_series(ctx, al, n), n)?;
        per_alpha.push(series_mul(&series_mul(&phi, &d.series(al), n), &psi_inv, n));
    }
    let terms = (0..=n)
        .map(|i| OperatorFamily::new(ctx.semigroup().clone(), per_alpha.iter().map(|s| s[i].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedFamilyDeformation { context: ctx.clone(), terms })
}

fn family_diff(a: &OperatorFamily, b: &OperatorFamily) -> Result<OperatorFamily> {
    a.with_maps(a.maps().iter().zip(b.maps()).map(|(x, y)| x - y).collect())
}

/// Transports a deformation along an equivalence. Errors unless the result
/// passes [`check_family_deformation`] to every order and its order-1 term
/// satisfies `T⁽¹⁾ − T̄⁽¹⁾ = δθ`.
pub fn apply_equivalence(d: &TruncatedFamilyDeformation, e: &EquivalenceData) -> Result<TruncatedFamilyDeformation> {
    let out = transport(d, e)?;
    let rep = check_family_deformation(&out)?;
    if let Some((n, v)) = rep.first_failure() {
        return Err(Error::Postcondition {
            what: format!("transported family is a deformation (order {n})"),
            violation: v.clone(),
        });
    }
    if d.order() >= 1 {
        let shift = family_diff(d.term(1), out.term(1))?;
        let want = twooperf_theta_coboundary(&d.context, &e.theta)?;
        if shift != want {
            return Err(Error::Postcondition {
                what: "order-1 terms differ by δθ".into(),
                violation: Violation { rule: "T⁽¹⁾ − T̄⁽¹⁾ = δθ".into(), elements: vec![], basis: vec![1] },
            });
        }
    }
    Ok(out)
}

/// The equivalence `e₂ ∘ e₁`: `φ = φ₂φ₁`, `ψ_α = ψ₂_α ψ₁_α`, with `θ = θ₁ + θ₂`.
pub fn compose_equivalences(ctx: &TwistedContext, e1: &EquivalenceData, e2: &EquivalenceData, order: usize) -> Result<EquivalenceData> {
    e1.check_shapes(ctx)?;
    e2.check_shapes(ctx)?;
    let theta: Vec<Scalar> = e1.theta.iter().zip(&e2.theta).map(|(a, b)| a + b).collect();
    let phi = series_mul(&e2.phi_series(ctx, order), &e1.phi_series(ctx, order), order);
    let k = ctx.semigroup().size();
    let psis: Vec<Vec<Matrix>> =
        (0..k).map(|al| series_mul(&e2.psi_series(ctx, al, order), &e1.psi_series(ctx, al, order), order)).collect();
    let out = EquivalenceData {
        theta,
        phi_higher: phi.iter().skip(2).cloned().collect(),
        psi_higher: (2..=order).map(|i| psis.iter().map(|s| s[i].clone()).collect()).collect(),
    };
    let linear = order == 0
        || (out.phi_series(ctx, 1)[1] == phi[1] && (0..k).all(|al| out.psi_series(ctx, al, 1)[1] == psis[al][1]));
    if !linear {
        return Err(Error::Postcondition {
            what: "composite order-1 terms are those of θ₁ + θ₂".into(),
            violation: Violation { rule: "order-1 terms are linear in θ".into(), elements: vec![], basis: vec![] },
        });
    }
    Ok(out)
}

/// Transports along `φ^t = id + t(l^ad_θ − r^ad_θ)` and
/// `ψ^t_α = id + t(l_θ − r_θ + H(θ, T_α −) − H(T_α −, θ))` when `δθ = T⁽¹⁾`;
/// the result has zero order-1 term. Only orders `≤ 1` of the result are
/// re-verified, since these first-order maps need not carry the higher
/// deformation equations along.
pub fn trivialization_step(d: &TruncatedFamilyDeformation, theta: &[Scalar]) -> Result<TruncatedFamilyDeformation> {
    if d.order() < 1 {
        return Ok(d.clone());
    }
    let cob = twooperf_theta_coboundary(&d.context, theta)?;
    if &cob != d.term(1) {
        return Err(Error::NotACoboundary);
    }
    let out = transport(d, &EquivalenceData::first_order(theta.to_vec()))?;
    let rep = check_family_deformation(&out)?;
    if !rep.passed_through(1) {
        let (n, v) = rep.first_failure().expect("a failing order");
        return Err(Error::Postcondition { what: format!("trivialized family is a deformation (order {n})"), violation: v.clone() });
    }
    if out.term(1).maps().iter().any(|m| !m.is_zero()) {
        return Err(Error::Postcondition {
            what: "order-1 term vanishes".into(),
            violation: Violation { rule: "T̄⁽¹⁾ = 0".into(), elements: vec![], basis: vec![1] },
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// NS-family deformations

/// `π^t = Σ tⁱ πⁱ` truncated at order `N`; each `πⁱ` stored as `(≺ⁱ, ≻ⁱ, ⋎ⁱ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedNSDeformation {
    terms: Vec<NsFamily>,
}

impl TruncatedNSDeformation {
    /// `terms[0]` is the base NS-family; later terms only need matching shapes.
    pub fn new(terms: Vec<NsFamily>) -> Result<Self> {
        let base = terms.first().ok_or_else(|| Error::Invalid("a deformation needs its order-0 term".into()))?;
        if terms.iter().any(|t| t.semigroup() != base.semigroup() || t.dim() != base.dim()) {
            return Err(Error::shape("all terms must share the base semigroup and dimension"));
        }
        Ok(TruncatedNSDeformation { terms })
    }

    pub fn constant(base: NsFamily, order: usize) -> Self {
        let zero = NsFamily::zero(base.semigroup().clone(), base.dim());
        let mut terms = vec![base];
        terms.extend(std::iter::repeat_n(zero, order));
        TruncatedNSDeformation { terms }
    }

    /// `π + t·π¹` from a degree-2 cochain `π¹`.
    pub fn first_order(base: NsFamily, pi1: &Cochain) -> Result<Self> {
        let t1 = pi1.to_ns_family(base.semigroup(), base.dim())?;
        Self::new(vec![base, t1])
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn base(&self) -> &NsFamily {
        &self.terms[0]
    }

    pub fn terms(&self) -> &[NsFamily] {
        &self.terms
    }

    /// `πⁱ` as a degree-2 cochain.
    pub fn cochain(&self, i: usize) -> Cochain {
        Cochain::from_ns_family(&self.terms[i])
    }
}

fn total(p: &NsFamily, al: usize, be: usize, x: usize, y: usize) -> Vec<Scalar> {
    p.total(al, be, x, y)
}

/// The four NS-family axioms with every composite `outer(inner(·,·),·)` or
/// `outer(·,inner(·,·))` taken from `(outer, inner) = (p, q)`, as
/// `lhs − rhs` on basis vectors.
fn ns_residual(p: &NsFamily, q: &NsFamily, axiom: usize, e: &[usize], b: &[usize]) -> Vec<Scalar> {
    let s = p.semigroup();
    let (x, y, z) = (b[0], b[1], b[2]);
    let (al, be) = (e[0], e[1]);
    let ab = s.mul(al, be);
    match axiom {
        1 => {
            let mut r = p.prec(be).apply_right_basis(q.prec(al).fiber(x, y), z);
            sub_into(&mut r, &p.prec(ab).apply_left_basis(x, &total(q, al, be, y, z)));
            r
        }
        2 => {
            let mut r = p.prec(be).apply_right_basis(q.succ(al).fiber(x, y), z);
            sub_into(&mut r, &p.succ(al).apply_left_basis(x, q.prec(be).fiber(y, z)));
            r
        }
        3 => {
            let mut r = p.succ(ab).apply_right_basis(&total(q, al, be, x, y), z);
            sub_into(&mut r, &p.succ(al).apply_left_basis(x, q.succ(be).fiber(y, z)));
            r
        }
        _ => {
            let ga = e[2];
            let bg = s.mul(be, ga);
            let mut r = p.vee(ab, ga).apply_right_basis(&total(q, al, be, x, y), z);
            add_into(&mut r, &p.prec(ga).apply_right_basis(q.vee(al, be).fiber(x, y), z));
            sub_into(&mut r, &p.succ(al).apply_left_basis(x, q.vee(be, ga).fiber(y, z)));
            sub_into(&mut r, &p.vee(al, bg).apply_left_basis(x, &total(q, be, ga, y, z)));
            r
        }
    }
}

/// Coefficient of `tⁿ` in the NS-family axioms for `π^t`, for each `n ≤ N`.
pub fn check_ns_deformation(d: &TruncatedNSDeformation) -> Result<OrderReports> {
    d.base().validate().require("order-0 term is an NS-family algebra")?;
    let s = d.base().semigroup();
    let dim = d.base().dim();
    let mut orders = Vec::new();
    for n in 0..=d.order() {
        let mut audit = Audit::default();
        let outcome = (|| -> std::result::Result<(), Violation> {
            for axiom in 1..=4 {
                let arity = if axiom == 4 { 3 } else { 2 };
                for e in s.tuples(arity) {
                    for b in crate::semigroup::Tuples::new(dim, 3) {
                        let mut r = zero_vec(dim);
                        for i in 0..=n {
                            add_into(&mut r, &ns_residual(&d.terms[i], &d.terms[n - i], axiom, &e, &b));
                        }
                        audit.expect_zero(&r, &format!("NS-family axiom {axiom} at order {n}"), &e, &b)?;
                    }
                }
            }
            Ok(())
        })();
        orders.push(audit.finish(outcome));
    }
    Ok(OrderReports { orders })
}

/// `δ π¹ = 0` for an NS deformation valid through order 1.
pub fn infinitesimal_ns_cocycle_check(d: &TruncatedNSDeformation) -> Result<bool> {
    if d.order() < 1 {
        return Err(Error::Invalid("deformation has no order-1 term".into()));
    }
    check_ns_deformation(d)?.orders[1].clone().require("deformation is valid to order 1")?;
    Ok(delta_nsfam(d.base(), &d.cochain(1))?.is_zero())
}

/// Bilinear map `(x, y) ↦ ψ(π(χx, χy))` summed over the series coefficients
/// with total degree `n`.
fn transport_term(p: &[NsFamily], psi: &[Matrix], chi: &[Matrix], n: usize, pick: impl Fn(&NsFamily) -> &Tensor3) -> Tensor3 {
    let d = psi[0].rows();
    let mut out = Tensor3::zeros(d, d, d);
    for a in 0..=n {
        for b in 0..=n - a {
            for c in 0..=n - a - b {
                let e = n - a - b - c;
                let t = pick(&p[b]);
                for x in 0..d {
                    let cx = chi[c].column(x);
                    for y in 0..d {
                        let ey = chi[e].column(y);
                        add_into(out.fiber_mut(x, y), &psi[a].apply(&t.apply(&cx, &ey)));
                    }
                }
            }
        }
    }
    out
}

/// `π̄^t(x, y) = ψ^t(π^t((ψ^t)⁻¹x, (ψ^t)⁻¹y))` for `ψ^t = id + Σ_{i≥1} tⁱψⁱ`,
/// making `ψ^t` a morphism from `π^t` to `π̄^t`. Errors unless the result is
/// a deformation and `π¹ − π̄¹ = δψ¹`.
pub fn apply_ns_equivalence(d: &TruncatedNSDeformation, psi_terms: &[Matrix]) -> Result<TruncatedNSDeformation> {
    let base = d.base();
    let (dim, n) = (base.dim(), d.order());
    if psi_terms.iter().any(|m| m.rows() != dim || m.cols() != dim) {
        return Err(Error::shape("ψⁱ must be maps D → D"));
    }
    let mut psi = vec![Matrix::identity(dim)];
    psi.extend(psi_terms.iter().cloned());
    let psi = pad(psi, n, dim, dim);
    let chi = series_inv(&psi, n)?;
    let s = base.semigroup();
    let k = s.size();
    let mut terms = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let prec = (0..k).map(|al| transport_term(&d.terms, &psi, &chi, i, |p| p.prec(al))).collect();
        let succ = (0..k).map(|al| transport_term(&d.terms, &psi, &chi, i, |p| p.succ(al))).collect();
        let vee = (0..k * k).map(|ab| transport_term(&d.terms, &psi, &chi, i, |p| p.vee(ab / k, ab % k))).collect();
        terms.push(NsFamily::new(s.clone(), prec, succ, vee)?);
    }
    let out = TruncatedNSDeformation::new(terms)?;
    if &out.terms[0] != base {
        return Err(Error::Invalid("transport changed the order-0 term".into()));
    }
    let rep = check_ns_deformation(&out)?;
    if let Some((n, v)) = rep.first_failure() {
        return Err(Error::Postcondition { what: format!("transported structure is a deformation (order {n})"), violation: v.clone() });
    }
    if n >= 1 {
        let lhs: Vec<Scalar> = d.cochain(1).data.iter().zip(&out.cochain(1).data).map(|(a, b)| a - b).collect();
        let dpsi = delta_nsfam(base, &Cochain::from_map(&psi[1]))?;
        if lhs != dpsi.data {
            return Err(Error::Postcondition {
                what: "order-1 terms differ by δψ¹".into(),
                violation: Violation { rule: "π¹ − π̄¹ = δψ¹".into(), elements: vec![], basis: vec![1] },
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::{adjoint_bimodule, Algebra};
    use crate::catalog;
    use crate::family_algebras::{induce_ns_family, NsSource};
    use crate::family_ops::build_nijenhuis_twisted_context;
    use crate::semigroup::FiniteSemigroup;

    fn id_context(s: &FiniteSemigroup, a: &Algebra) -> TwistedContext {
        build_nijenhuis_twisted_context(&OperatorFamily::identity(s.clone(), a.dim()), a, s).unwrap()
    }

    fn rb_context() -> TwistedContext {
        // R = 0 on the dual numbers, untwisted, adjoint bimodule.
        let a = catalog::dual_numbers();
        let m = adjoint_bimodule(&a);
        TwistedContext::new(a, m, None, OperatorFamily::zero(FiniteSemigroup::mult_mod(2), 2, 2)).unwrap()
    }

    #[test]
    fn constant_deformation_passes() {
        let d = TruncatedFamilyDeformation::constant(id_context(&FiniteSemigroup::cyclic(2), &catalog::dual_numbers()), 3);
        assert!(check_family_deformation(&d).unwrap().passed());
        assert!(infinitesimal_cocycle_check(&d).unwrap());
    }

    #[test]
    fn coboundary_deformations_pass_order_one() {
        for ctx in [id_context(&FiniteSemigroup::left_zero(2), &catalog::dual_numbers()), rb_context()] {
            let da = ctx.algebra.dim();
            let theta: Vec<Scalar> = (0..da).map(|i| Scalar::int(i as i64 * 2 - 1)).collect();
            let t1 = twooperf_theta_coboundary(&ctx, &theta).unwrap();
            let d = TruncatedFamilyDeformation::first_order(ctx, t1).unwrap();
            assert!(check_family_deformation(&d).unwrap().passed());
            assert!(infinitesimal_cocycle_check(&d).unwrap());
            let triv = trivialization_step(&d, &theta).unwrap();
            assert!(triv.term(1).maps().iter().all(Matrix::is_zero));
            if !d.term(1).maps().iter().all(Matrix::is_zero) {
                assert!(matches!(trivialization_step(&d, &vec![Scalar::zero(); da]), Err(Error::NotACoboundary)));
            }
        }
    }

    #[test]
    fn non_cocycle_fails_with_witness() {
        let ctx = id_context(&FiniteSemigroup::trivial(), &catalog::dual_numbers());
        let s = ctx.semigroup().clone();
        let t1 = OperatorFamily::constant(s, Matrix::from_ints(&[&[1, 0], &[0, 0]]));
        let d = TruncatedFamilyDeformation::first_order(ctx, t1).unwrap();
        let rep = check_family_deformation(&d).unwrap();
        assert!(rep.orders[0].passed());
        let (n, v) = rep.first_failure().unwrap();
        assert_eq!(n, 1);
        assert_eq!(v.elements.len(), 2);
        assert!(matches!(infinitesimal_cocycle_check(&d), Err(Error::Precondition { .. })));
    }

    #[test]
    fn exponential_equivalence_at_order_two() {
        let ctx = rb_context();
        let d = TruncatedFamilyDeformation::constant(ctx.clone(), 2);
        let e = EquivalenceData::exponential(&ctx, vec![Scalar::int(0), Scalar::int(1)], 2).unwrap();
        let out = apply_equivalence(&d, &e).unwrap();
        let want = twooperf_theta_coboundary(&ctx, &e.theta).unwrap();
        assert_eq!(family_diff(d.term(1), out.term(1)).unwrap(), want);
    }

    /// First nonzero weight-0 Rota-Baxter operator on upper triangular matrices
    /// with 0/1 entries, as an untwisted context on the adjoint bimodule.
    fn triangular_rb_context(s: FiniteSemigroup) -> TwistedContext {
        let a = catalog::upper_triangular();
        for code in 1..512u32 {
            let rows: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| ((code >> (3 * i + j)) & 1) as i64).collect()).collect();
            let r = Matrix::from_ints(&rows.iter().map(|r| r.as_slice()).collect::<Vec<_>>());
            let t = OperatorFamily::constant(s.clone(), r);
            let ctx = TwistedContext::new(a.clone(), adjoint_bimodule(&a), None, t).unwrap();
            if ctx.check().passed() {
                return ctx;
            }
        }
        unreachable!("a nonzero solution exists")
    }

    #[test]
    fn exponential_equivalences_compose() {
        let ctx = triangular_rb_context(FiniteSemigroup::cyclic(2));
        let d = TruncatedFamilyDeformation::constant(ctx.clone(), 2);
        let e1 = EquivalenceData::exponential(&ctx, vec![Scalar::zero(), Scalar::int(1), Scalar::zero()], 2).unwrap();
        let e2 = EquivalenceData::exponential(&ctx, vec![Scalar::int(2), Scalar::zero(), Scalar::int(-1)], 2).unwrap();
        let once = apply_equivalence(&d, &e1).unwrap();
        assert_ne!(once, d);
        let twice = apply_equivalence(&once, &e2).unwrap();
        let comp = compose_equivalences(&ctx, &e1, &e2, 2).unwrap();
        assert_eq!(apply_equivalence(&d, &comp).unwrap(), twice);
    }

    #[test]
    fn identity_equivalence_is_identity() {
        let ctx = id_context(&FiniteSemigroup::cyclic(2), &catalog::diagonal2());
        let d = TruncatedFamilyDeformation::constant(ctx, 2);
        let out = apply_equivalence(&d, &EquivalenceData::first_order(vec![Scalar::zero(); 4])).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn series_inverse() {
        let a = vec![Matrix::identity(2), Matrix::from_ints(&[&[1, 2], &[0, 1]]), Matrix::from_ints(&[&[0, 1], &[3, 0]])];
        let inv = series_inv(&a, 2).unwrap();
        let prod = series_mul(&a, &inv, 2);
        assert_eq!(prod[0], Matrix::identity(2));
        assert!(prod[1].is_zero() && prod[2].is_zero());
    }

    #[test]
    fn ns_constant_and_coboundary() {
        let a = catalog::dual_numbers();
        let s = FiniteSemigroup::cyclic(2);
        let ns = induce_ns_family(NsSource::Nijenhuis { n: &OperatorFamily::identity(s.clone(), 2), a: &a }).unwrap();
        let c = TruncatedNSDeformation::constant(ns.clone(), 2);
        assert!(check_ns_deformation(&c).unwrap().passed());
        let psi1 = Matrix::from_ints(&[&[0, 1], &[2, -1]]);
        let out = apply_ns_equivalence(&c, &[psi1.scale(&Scalar::int(-1))]).unwrap();
        let dpsi = delta_nsfam(&ns, &Cochain::from_map(&psi1)).unwrap();
        assert_eq!(out.cochain(1), dpsi);
        let d = TruncatedNSDeformation::first_order(ns, &dpsi).unwrap();
        assert!(check_ns_deformation(&d).unwrap().passed());
        assert!(infinitesimal_ns_cocycle_check(&d).unwrap());
    }

    #[test]
    fn zero_base_ns_order_one_is_vacuous() {
        let base = NsFamily::zero(FiniteSemigroup::trivial(), 1);
        let pi1 = Cochain { degree: 2, data: vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)] };
        let d = TruncatedNSDeformation::first_order(base, &pi1).unwrap();
        let rep = check_ns_deformation(&d).unwrap();
        assert!(rep.orders[1].passed());
        assert!(infinitesimal_ns_cocycle_check(&d).unwrap());
    }
}
