//! Cochain complexes of Ω-associative algebras, twisted O-operator families
//! and NS-family (or dendriform family) algebras.
//!
//! Cochains are flat coefficient vectors on a canonical basis ordered
//! lexicographically by (Ω-tuple, basis multi-index, target basis vector).
//!
//! - Ω-Hochschild and twisted-family complexes: degree 0 is a vector of the
//!   coefficient space; degree `n ≥ 1` stores `f_{α⃗}(e_{x⃗})` at
//!   `((idx(α⃗)·dᵢₙⁿ + idx(x⃗))·dₒᵤₜ)`.
//! - NS-family complex: degree `n` stores components `[1..=n]`, each keyed by
//!   `Ω^{n−1}` (the tuple with `α_r` removed), followed for `n ≥ 2` by the
//!   component `[n+1]` keyed by `Ω^n`. Degree 1 is a single map `D → D`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linalg::{add_into, axpy, is_zero_vec, sub_into, vec_add, zero_vec, EchelonBuilder, Matrix, Scalar, Tensor3};
use crate::family_algebras::{omega_bimodule_from_twisted_family, DendriformFamily, NsFamily, OmegaAssocAlgebra, OmegaBimodule};
use crate::family_ops::{OperatorFamily, TwistedContext};
use crate::report::{Audit, Report, Violation};
use crate::semigroup::{tuple_index, FiniteSemigroup, Tuples};

/// Upper bound on `dim Cⁿ · dim Cⁿ⁺¹` for any assembled differential.
pub const DEFAULT_RESOURCE_BOUND: usize = 20_000_000;

/// Value of `S_{m;i,n}`: one label or the sum of all labels of `C_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    Single(usize),
    Sum,
}

fn c_size(n: usize) -> usize {
    if n == 1 {
        1
    } else {
        n + 1
    }
}

/// `(R_{m;i,n}([r]), S_{m;i,n}([r]))` for `[r] ∈ C_{m+n−1} \ {[m+n]}`.
pub fn index_maps(m: usize, i: usize, n: usize, r: usize) -> Result<(usize, Label)> {
    if m == 0 || n == 0 || i == 0 || i > m {
        return Err(Error::Invalid(format!("index maps need m, n ≥ 1 and 1 ≤ i ≤ m, got m={m}, i={i}, n={n}")));
    }
    let top = m + n - 1;
    if r == 0 || r > top {
        return Err(Error::OutOfRange { index: r, size: top });
    }
    Ok(if r < i {
        (r, Label::Sum)
    } else if r < i + n {
        (i, Label::Single(r - i + 1))
    } else {
        (r - n + 1, Label::Sum)
    })
}

/// Which complex, with its underlying structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexDescriptor {
    OmegaHoch { algebra: OmegaAssocAlgebra, module: OmegaBimodule },
    TwOoperf(TwistedContext),
    NsFam(NsFamily),
    DendFam(DendriformFamily),
}

/// A cochain of some degree in one of the complexes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cochain {
    pub degree: usize,
    pub data: Vec<Scalar>,
}

impl Cochain {
    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    /// A degree-1 twisted-family cochain from a family of maps `M → A`.
    pub fn from_family(t: &OperatorFamily) -> Self {
        let (dm, da) = (t.domain_dim(), t.codomain_dim());
        let mut data = Vec::with_capacity(t.maps().len() * dm * da);
        for m in t.maps() {
            for u in 0..dm {
                data.extend(m.column(u));
            }
        }
        Cochain { degree: 1, data }
    }

    /// Inverse of [`Cochain::from_family`].
    pub fn to_family(&self, s: &FiniteSemigroup, domain_dim: usize, codomain_dim: usize) -> Result<OperatorFamily> {
        if self.degree != 1 || self.data.len() != s.size() * domain_dim * codomain_dim {
            return Err(Error::shape("cochain is not a degree-1 family of the requested shape"));
        }
        let maps = (0..s.size())
            .map(|al| {
                let mut m = Matrix::zeros(codomain_dim, domain_dim);
                for u in 0..domain_dim {
                    for w in 0..codomain_dim {
                        m.set(w, u, self.data[(al * domain_dim + u) * codomain_dim + w].clone());
                    }
                }
                m
            })
            .collect();
        OperatorFamily::new(s.clone(), maps)
    }

    /// A degree-1 NS-family cochain from a single map `D → D`.
    pub fn from_map(f: &Matrix) -> Self {
        let mut data = Vec::new();
        for x in 0..f.cols() {
            data.extend(f.column(x));
        }
        Cochain { degree: 1, data }
    }

    /// The element `π = (≺_β, ≻_α, ⋎_{α,β})` of the degree-2 NS-family cochains.
    pub fn from_ns_family(n: &NsFamily) -> Self {
        let k = n.semigroup().size();
        let d = n.dim();
        let mut data = Vec::with_capacity(2 * k * d * d * d + k * k * d * d * d);
        for t in n.precs().iter().chain(n.succs()).chain(n.vees()) {
            for x in 0..d {
                for y in 0..d {
                    data.extend_from_slice(t.fiber(x, y));
                }
            }
        }
        Cochain { degree: 2, data }
    }

    /// Splits a degree-2 NS-family cochain back into `(≺, ≻, ⋎)`.
    pub fn to_ns_family(&self, s: &FiniteSemigroup, d: usize) -> Result<NsFamily> {
        let k = s.size();
        if self.degree != 2 || self.data.len() != ns_dim(k, d, 2) {
            return Err(Error::shape("cochain is not a degree-2 NS-family cochain of the requested shape"));
        }
        let mut chunks = self.data.chunks(d * d * d).map(|c| {
            let mut t = Tensor3::zeros(d, d, d);
            for x in 0..d {
                for y in 0..d {
                    t.fiber_mut(x, y).clone_from_slice(&c[(x * d + y) * d..(x * d + y + 1) * d]);
                }
            }
            t
        });
        let prec = chunks.by_ref().take(k).collect();
        let succ = chunks.by_ref().take(k).collect();
        let vee = chunks.collect();
        NsFamily::new(s.clone(), prec, succ, vee)
    }
}

fn ns_dim(k: usize, d: usize, n: usize) -> usize {
    let blk = k.pow(n as u32 - 1) * d.pow(n as u32 + 1);
    n * blk + if n >= 2 { k.pow(n as u32) * d.pow(n as u32 + 1) } else { 0 }
}

/// One row of a cohomology table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeRow {
    pub degree: usize,
    pub dim_cochains: usize,
    pub rank_delta: usize,
    pub dim_cocycles: usize,
    pub dim_coboundaries: usize,
    pub dim_cohomology: usize,
}

impl ComplexDescriptor {
    pub fn tag(&self) -> &'static str {
        match self {
            ComplexDescriptor::OmegaHoch { .. } => "omega_hoch",
            ComplexDescriptor::TwOoperf(_) => "twooperf",
            ComplexDescriptor::NsFam(_) => "nsfam",
            ComplexDescriptor::DendFam(_) => "dendfam",
        }
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        match self {
            ComplexDescriptor::OmegaHoch { algebra, .. } => algebra.semigroup(),
            ComplexDescriptor::TwOoperf(c) => c.semigroup(),
            ComplexDescriptor::NsFam(n) => n.semigroup(),
            ComplexDescriptor::DendFam(d) => d.semigroup(),
        }
    }

    /// Checks that the underlying structures validate.
    pub fn validate(&self) -> Result<()> {
        match self {
            ComplexDescriptor::OmegaHoch { algebra, module } => {
                algebra.validate().require("Ω-associative algebra")?;
                crate::family_algebras::validate_omega_bimodule(algebra, module)?.require("Ω-bimodule")
            }
            ComplexDescriptor::TwOoperf(c) => c.check().require("twisted O-operator family"),
            ComplexDescriptor::NsFam(n) => n.validate().require("NS-family algebra"),
            ComplexDescriptor::DendFam(d) => d.validate().require("dendriform family algebra"),
        }
    }

    /// Lowest degree of the complex: 0 for the Ω-Hochschild and twisted-family
    /// complexes over a unital Ω, 1 otherwise.
    pub fn start_degree(&self) -> usize {
        match self {
            ComplexDescriptor::OmegaHoch { .. } | ComplexDescriptor::TwOoperf(_) if self.semigroup().unit().is_some() => 0,
            _ => 1,
        }
    }

    /// `(dim of argument space, dim of value space)` for the Hochschild-type complexes.
    fn hoch_dims(&self) -> (usize, usize) {
        match self {
            ComplexDescriptor::OmegaHoch { algebra, module } => (algebra.dim(), module.module_dim()),
            ComplexDescriptor::TwOoperf(c) => (c.bimodule.module_dim(), c.algebra.dim()),
            ComplexDescriptor::NsFam(n) => (n.dim(), n.dim()),
            ComplexDescriptor::DendFam(d) => (d.dim(), d.dim()),
        }
    }

    /// `dim Cⁿ` as a vector space.
    pub fn cochain_dim(&self, n: usize) -> usize {
        let k = self.semigroup().size();
        let (din, dout) = self.hoch_dims();
        match self {
            ComplexDescriptor::OmegaHoch { .. } | ComplexDescriptor::TwOoperf(_) => {
                k.pow(n as u32) * din.pow(n as u32) * dout
            }
            ComplexDescriptor::NsFam(_) => {
                if n == 0 {
                    0
                } else {
                    ns_dim(k, din, n)
                }
            }
            ComplexDescriptor::DendFam(_) => {
                if n == 0 {
                    0
                } else {
                    n * k.pow(n as u32 - 1) * din.pow(n as u32 + 1)
                }
            }
        }
    }

    /// Length of the stored coefficient vector; larger than [`Self::cochain_dim`]
    /// only for the dendriform subcomplex, which keeps a zero top component.
    fn storage_dim(&self, n: usize) -> usize {
        match self {
            ComplexDescriptor::DendFam(d) if n >= 1 => ns_dim(d.semigroup().size(), d.dim(), n),
            _ => self.cochain_dim(n),
        }
    }

    pub fn zero_cochain(&self, n: usize) -> Cochain {
        Cochain { degree: n, data: zero_vec(self.storage_dim(n)) }
    }

    /// The `j`-th canonical basis cochain of `Cⁿ`.
    pub fn basis_cochain(&self, n: usize, j: usize) -> Result<Cochain> {
        let dim = self.cochain_dim(n);
        if j >= dim {
            return Err(Error::OutOfRange { index: j, size: dim });
        }
        let mut c = self.zero_cochain(n);
        c.data[j] = Scalar::one();
        Ok(c)
    }

    /// A pseudo-random cochain of `Cⁿ` with entries in `{−2,…,2}/{1,2}`.
    pub fn random_cochain(&self, n: usize, rng: &mut ChaCha8Rng) -> Cochain {
        let mut c = self.zero_cochain(n);
        let dim = self.cochain_dim(n);
        for x in c.data.iter_mut().take(dim) {
            *x = Scalar::ratio(rng.gen_range(-2..=2), rng.gen_range(1..=2));
        }
        c
    }

    /// The coboundary of `c`.
    pub fn delta(&self, c: &Cochain) -> Result<Cochain> {
        if c.data.len() != self.storage_dim(c.degree) {
            return Err(Error::shape(format!(
                "{} cochain of degree {} has {} coefficients, expected {}",
                self.tag(),
                c.degree,
                c.data.len(),
                self.storage_dim(c.degree)
            )));
        }
        match self {
            ComplexDescriptor::OmegaHoch { algebra, module } => delta_omega_hoch(algebra, module, c),
            ComplexDescriptor::TwOoperf(ctx) => delta_twooperf(ctx, c),
            ComplexDescriptor::NsFam(n) => delta_nsfam(n, c),
            ComplexDescriptor::DendFam(d) => delta_dendfam(d, c),
        }
    }

    /// The twisted-family complex presented as the Ω-Hochschild complex of
    /// `(M, ∗)` with coefficients in `(A, ▷, ◁)`.
    pub fn twooperf_as_omega_hoch(&self) -> Result<ComplexDescriptor> {
        match self {
            ComplexDescriptor::TwOoperf(c) => {
                let (algebra, module) =
                    omega_bimodule_from_twisted_family(&c.family, &c.algebra, &c.bimodule, c.cocycle.as_ref())?;
                Ok(ComplexDescriptor::OmegaHoch { algebra, module })
            }
            _ => Err(Error::Invalid(format!("{} is not a twisted-family complex", self.tag()))),
        }
    }
}

// ---------------------------------------------------------------------------
// Ω-Hochschild

struct HochLayout {
    k: usize,
    din: usize,
    dout: usize,
}

impl HochLayout {
    fn offset(&self, alphas: &[usize], xs: &[usize]) -> usize {
        (tuple_index(alphas, self.k) * self.din.pow(xs.len() as u32) + tuple_index(xs, self.din)) * self.dout
    }

    fn get<'a>(&self, data: &'a [Scalar], alphas: &[usize], xs: &[usize]) -> &'a [Scalar] {
        let o = self.offset(alphas, xs);
        &data[o..o + self.dout]
    }

    /// `f_{α⃗}(x₁, …, v, …, xₙ)` with the vector `v` in slot `p`.
    fn get_with(&self, data: &[Scalar], alphas: &[usize], xs: &mut [usize], p: usize, v: &[Scalar], out: &mut [Scalar], c: &Scalar) {
        let keep = xs[p];
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            xs[p] = j;
            axpy(out, &(vj * c), self.get(data, alphas, xs));
        }
        xs[p] = keep;
    }
}

fn merge(s: &FiniteSemigroup, alphas: &[usize], p: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(alphas.len() - 1);
    out.extend_from_slice(&alphas[..p]);
    out.push(s.mul(alphas[p], alphas[p + 1]));
    out.extend_from_slice(&alphas[p + 2..]);
    out
}

fn drop_at(xs: &[usize], p: usize) -> Vec<usize> {
    let mut out = xs.to_vec();
    out.remove(p);
    out
}

fn sign(i: usize) -> Scalar {
    if i.is_multiple_of(2) {
        Scalar::one()
    } else {
        Scalar::int(-1)
    }
}

/// `(δu)_α(a) = a·_{α,1}u − u·_{1,α}a` in degree 0, and for `n ≥ 1`
/// `a₁·_{α₁,α₂⋯αₙ₊₁}f(a₂,…) + Σ(−1)^i f_{…,αᵢαᵢ₊₁,…}(…, aᵢ·_{αᵢ,αᵢ₊₁}aᵢ₊₁, …)
///  + (−1)^{n+1} f(a₁,…,aₙ)·_{α₁⋯αₙ,αₙ₊₁}aₙ₊₁`.
pub fn delta_omega_hoch(algebra: &OmegaAssocAlgebra, module: &OmegaBimodule, c: &Cochain) -> Result<Cochain> {
    let s = algebra.semigroup();
    let k = s.size();
    let (din, dout) = (algebra.dim(), module.module_dim());
    let n = c.degree;
    let lay = HochLayout { k, din, dout };
    let f = &c.data;
    if n == 0 {
        let one = s.unit().ok_or(Error::NonUnitalSemigroup)?;
        let mut out = Vec::with_capacity(k * din * dout);
        for al in 0..k {
            for a in 0..din {
                let mut v = module.left(al, one).apply_left_basis(a, f);
                sub_into(&mut v, &module.right(one, al).apply_right_basis(f, a));
                out.extend(v);
            }
        }
        return Ok(Cochain { degree: 1, data: out });
    }
    let mut out = Vec::with_capacity(k.pow(n as u32 + 1) * din.pow(n as u32 + 1) * dout);
    for alphas in Tuples::new(k, n + 1) {
        let tail_prod = s.product_of(&alphas[1..]);
        let head_prod = s.product_of(&alphas[..n]);
        let merged: Vec<Vec<usize>> = (0..n).map(|p| merge(s, &alphas, p)).collect();
        for xs in Tuples::new(din, n + 1) {
            let mut v = module.left(alphas[0], tail_prod).apply_left_basis(xs[0], lay.get(f, &alphas[1..], &xs[1..]));
            for p in 0..n {
                let prod = algebra.mult(alphas[p], alphas[p + 1]).fiber(xs[p], xs[p + 1]).to_vec();
                let mut short = drop_at(&xs, p + 1);
                lay.get_with(f, &merged[p], &mut short, p, &prod, &mut v, &sign(p + 1));
            }
            let last = module.right(head_prod, alphas[n]).apply_right_basis(lay.get(f, &alphas[..n], &xs[..n]), xs[n]);
            axpy(&mut v, &sign(n + 1), &last);
            out.extend(v);
        }
    }
    Ok(Cochain { degree: n + 1, data: out })
}

// ---------------------------------------------------------------------------
// Twisted O-operator families

struct TwData<'a> {
    ctx: &'a TwistedContext,
    /// `T_α(e_u)`.
    cols: Vec<Vec<Vec<Scalar>>>,
}

impl<'a> TwData<'a> {
    fn new(ctx: &'a TwistedContext) -> Self {
        let dm = ctx.bimodule.module_dim();
        let cols = ctx.family.maps().iter().map(|m| (0..dm).map(|u| m.column(u)).collect()).collect();
        TwData { ctx, cols }
    }

    fn t(&self, alpha: usize, v: &[Scalar]) -> Vec<Scalar> {
        self.ctx.family.map(alpha).apply(v)
    }

    fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        self.ctx.algebra.mul(a, b)
    }

    /// `u·a` for a basis vector `u`.
    fn ua(&self, u: usize, a: &[Scalar]) -> Vec<Scalar> {
        self.ctx.bimodule.right().apply_left_basis(u, a)
    }

    /// `a·u` for a basis vector `u`.
    fn au(&self, a: &[Scalar], u: usize) -> Vec<Scalar> {
        self.ctx.bimodule.left().apply_right_basis(a, u)
    }

    fn h(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        self.ctx.h(a, b)
    }

    /// `T_γ(u·a + H(T_α u, a))` where `α` indexes the `T` applied to `u`.
    fn left_correction(&self, gamma: usize, alpha: usize, u: usize, a: &[Scalar]) -> Vec<Scalar> {
        self.t(gamma, &vec_add(&self.ua(u, a), &self.h(&self.cols[alpha][u], a)))
    }

    /// `T_γ(a·u + H(a, T_β u))`.
    fn right_correction(&self, gamma: usize, beta: usize, a: &[Scalar], u: usize) -> Vec<Scalar> {
        self.t(gamma, &vec_add(&self.au(a, u), &self.h(a, &self.cols[beta][u])))
    }
}

/// `(δa)_α(u) = T_α(u)·a − T_α(u·a) − T_α(H(T_α u, a)) − a·T_α(u) + T_α(a·u) + T_α(H(a, T_α u))`.
///
/// Computed for any Ω; [`delta_twooperf`] additionally requires a unital Ω in degree 0.
pub fn twooperf_theta_coboundary(ctx: &TwistedContext, theta: &[Scalar]) -> Result<OperatorFamily> {
    let (da, dm) = (ctx.algebra.dim(), ctx.bimodule.module_dim());
    if theta.len() != da {
        return Err(Error::shape(format!("θ has length {}, expected {da}", theta.len())));
    }
    let td = TwData::new(ctx);
    let maps = (0..ctx.semigroup().size())
        .map(|al| {
            let mut m = Matrix::zeros(da, dm);
            for u in 0..dm {
                let tu = &td.cols[al][u];
                let mut v = td.mul(tu, theta);
                sub_into(&mut v, &td.left_correction(al, al, u, theta));
                sub_into(&mut v, &td.mul(theta, tu));
                add_into(&mut v, &td.right_correction(al, al, theta, u));
                for (w, x) in v.into_iter().enumerate() {
                    m.set(w, u, x);
                }
            }
            m
        })
        .collect();
    OperatorFamily::new(ctx.semigroup().clone(), maps)
}

/// The coboundary of the twisted-family complex, by its defining formula
/// with the three `H`-corrections and the middle argument
/// `T_{αᵢ}(uᵢ)·uᵢ₊₁ + uᵢ·T_{αᵢ₊₁}(uᵢ₊₁) + H(T_{αᵢ}uᵢ, T_{αᵢ₊₁}uᵢ₊₁)`.
pub fn delta_twooperf(ctx: &TwistedContext, c: &Cochain) -> Result<Cochain> {
    let s = ctx.semigroup();
    let k = s.size();
    let (da, dm) = (ctx.algebra.dim(), ctx.bimodule.module_dim());
    let n = c.degree;
    if n == 0 {
        s.unit().ok_or(Error::NonUnitalSemigroup)?;
        return Ok(Cochain::from_family(&twooperf_theta_coboundary(ctx, &c.data)?));
    }
    let lay = HochLayout { k, din: dm, dout: da };
    let td = TwData::new(ctx);
    let f = &c.data;
    let mut out = Vec::with_capacity(k.pow(n as u32 + 1) * dm.pow(n as u32 + 1) * da);
    for alphas in Tuples::new(k, n + 1) {
        let all = s.product_of(&alphas);
        let merged: Vec<Vec<usize>> = (0..n).map(|p| merge(s, &alphas, p)).collect();
        for xs in Tuples::new(dm, n + 1) {
            let g = lay.get(f, &alphas[1..], &xs[1..]);
            let mut v = td.mul(&td.cols[alphas[0]][xs[0]], g);
            sub_into(&mut v, &td.left_correction(all, alphas[0], xs[0], g));
            for p in 0..n {
                let (a1, a2) = (alphas[p], alphas[p + 1]);
                let (u1, u2) = (xs[p], xs[p + 1]);
                let mut arg = td.au(&td.cols[a1][u1], u2);
                add_into(&mut arg, &td.ua(u1, &td.cols[a2][u2]));
                add_into(&mut arg, &td.h(&td.cols[a1][u1], &td.cols[a2][u2]));
                let mut short = drop_at(&xs, p + 1);
                lay.get_with(f, &merged[p], &mut short, p, &arg, &mut v, &sign(p + 1));
            }
            let g = lay.get(f, &alphas[..n], &xs[..n]);
            let mut last = td.mul(g, &td.cols[alphas[n]][xs[n]]);
            sub_into(&mut last, &td.right_correction(all, alphas[n], g, xs[n]));
            axpy(&mut v, &sign(n + 1), &last);
            out.extend(v);
        }
    }
    Ok(Cochain { degree: n + 1, data: out })
}

// ---------------------------------------------------------------------------
// NS-families

struct NsLayout {
    k: usize,
    d: usize,
    n: usize,
}

impl NsLayout {
    fn block(&self) -> usize {
        self.k.pow(self.n as u32 - 1) * self.d.pow(self.n as u32 + 1)
    }

    fn has_top(&self) -> bool {
        self.n >= 2
    }

    /// Offset of `f^{[r]}_{α⃗}(e_{x⃗})`; `None` for the missing top component in degree 1.
    fn offset(&self, r: usize, alphas: &[usize], xs: &[usize]) -> Option<usize> {
        let dn = self.d.pow(self.n as u32);
        if r <= self.n {
            let key: usize = alphas
                .iter()
                .enumerate()
                .filter(|&(p, _)| p + 1 != r)
                .fold(0, |acc, (_, &a)| acc * self.k + a);
            Some((r - 1) * self.block() + (key * dn + tuple_index(xs, self.d)) * self.d)
        } else if self.has_top() {
            Some(self.n * self.block() + (tuple_index(alphas, self.k) * dn + tuple_index(xs, self.d)) * self.d)
        } else {
            None
        }
    }

    /// Adds `c·f^{label}_{α⃗}(x₁, …, v, …)` (vector `v` in slot `p` when given) into `out`.
    #[allow(clippy::too_many_arguments)]
    fn add(&self, data: &[Scalar], label: Label, alphas: &[usize], xs: &mut [usize], slot: Option<(usize, &[Scalar])>, out: &mut [Scalar], c: &Scalar) {
        let labels: Vec<usize> = match label {
            Label::Single(r) => vec![r],
            Label::Sum => (1..=c_size(self.n)).collect(),
        };
        for r in labels {
            match slot {
                None => {
                    if let Some(o) = self.offset(r, alphas, xs) {
                        axpy(out, c, &data[o..o + self.d]);
                    }
                }
                Some((p, v)) => {
                    let keep = xs[p];
                    for (j, vj) in v.iter().enumerate() {
                        if vj.is_zero() {
                            continue;
                        }
                        xs[p] = j;
                        if let Some(o) = self.offset(r, alphas, xs) {
                            axpy(out, &(vj * c), &data[o..o + self.d]);
                        }
                    }
                    xs[p] = keep;
                }
            }
        }
    }
}

/// `π^{[1]}_{α,β} = ≺_β`, `π^{[2]}_{α,β} = ≻_α`, `π^{[3]}_{α,β} = ⋎_{α,β}`, or their sum.
fn pi_ops(ns: &NsFamily, label: Label, alpha: usize, beta: usize) -> Vec<&Tensor3> {
    let one = |r: usize| match r {
        1 => ns.prec(beta),
        2 => ns.succ(alpha),
        _ => ns.vee(alpha, beta),
    };
    match label {
        Label::Single(r) => vec![one(r)],
        Label::Sum => (1..=3).map(one).collect(),
    }
}

fn pi_left(ns: &NsFamily, label: Label, alpha: usize, beta: usize, x: usize, v: &[Scalar]) -> Vec<Scalar> {
    let mut out = zero_vec(ns.dim());
    for t in pi_ops(ns, label, alpha, beta) {
        add_into(&mut out, &t.apply_left_basis(x, v));
    }
    out
}

fn pi_right(ns: &NsFamily, label: Label, alpha: usize, beta: usize, v: &[Scalar], y: usize) -> Vec<Scalar> {
    let mut out = zero_vec(ns.dim());
    for t in pi_ops(ns, label, alpha, beta) {
        add_into(&mut out, &t.apply_right_basis(v, y));
    }
    out
}

fn pi_basis(ns: &NsFamily, label: Label, alpha: usize, beta: usize, x: usize, y: usize) -> Vec<Scalar> {
    let mut out = zero_vec(ns.dim());
    for t in pi_ops(ns, label, alpha, beta) {
        add_into(&mut out, t.fiber(x, y));
    }
    out
}

/// `f^{label}_{α⃗}(x⃗)` on basis inputs.
fn ns_eval(lay: &NsLayout, f: &[Scalar], label: Label, alphas: &[usize], xs: &[usize]) -> Vec<Scalar> {
    let mut out = zero_vec(lay.d);
    let mut xs = xs.to_vec();
    lay.add(f, label, alphas, &mut xs, None, &mut out, &Scalar::one());
    out
}

/// Components `[r] ≠ [n+2]` use the first-term indices `R_{2;2,n}, S_{2;2,n}` and
/// last-term indices `R_{2;1,n}, S_{2;1,n}`; the component `[n+2]` has its own formula.
fn ns_component(ns: &NsFamily, lay: &NsLayout, f: &[Scalar], r: usize, alphas: &[usize], xs: &[usize]) -> Result<Vec<Scalar>> {
    let s = ns.semigroup();
    let n = lay.n;
    let d = lay.d;
    let tail = s.product_of(&alphas[1..]);
    let head = s.product_of(&alphas[..n]);
    let mut out = zero_vec(d);
    if r <= n + 1 {
        let (rl, sl) = index_maps(2, 2, n, r)?;
        let g = ns_eval(lay, f, sl, &alphas[1..], &xs[1..]);
        add_into(&mut out, &pi_left(ns, Label::Single(rl), alphas[0], tail, xs[0], &g));
        for i in 1..=n {
            let p = i - 1;
            let (rl, sl) = index_maps(n, i, 2, r)?;
            let v = pi_basis(ns, sl, alphas[p], alphas[p + 1], xs[p], xs[p + 1]);
            let mut short = drop_at(xs, p + 1);
            lay.add(f, Label::Single(rl), &merge(s, alphas, p), &mut short, Some((p, &v)), &mut out, &sign(i));
        }
        let (rl, sl) = index_maps(2, 1, n, r)?;
        let g = ns_eval(lay, f, sl, &alphas[..n], &xs[..n]);
        axpy(&mut out, &sign(n + 1), &pi_right(ns, Label::Single(rl), head, alphas[n], &g, xs[n]));
    } else {
        let top = Label::Single(n + 1);
        let g_top = ns_eval(lay, f, top, &alphas[1..], &xs[1..]);
        let g_sum = ns_eval(lay, f, Label::Sum, &alphas[1..], &xs[1..]);
        add_into(&mut out, &pi_left(ns, Label::Single(2), alphas[0], tail, xs[0], &g_top));
        add_into(&mut out, &pi_left(ns, Label::Single(3), alphas[0], tail, xs[0], &g_sum));
        for i in 1..=n {
            let p = i - 1;
            let merged = merge(s, alphas, p);
            let v = pi_basis(ns, Label::Single(3), alphas[p], alphas[p + 1], xs[p], xs[p + 1]);
            let mut short = drop_at(xs, p + 1);
            lay.add(f, Label::Single(i), &merged, &mut short, Some((p, &v)), &mut out, &sign(i));
            let v = pi_basis(ns, Label::Sum, alphas[p], alphas[p + 1], xs[p], xs[p + 1]);
            lay.add(f, top, &merged, &mut short, Some((p, &v)), &mut out, &sign(i));
        }
        let g_top = ns_eval(lay, f, top, &alphas[..n], &xs[..n]);
        let g_sum = ns_eval(lay, f, Label::Sum, &alphas[..n], &xs[..n]);
        let mut last = pi_right(ns, Label::Single(1), head, alphas[n], &g_top, xs[n]);
        add_into(&mut last, &pi_right(ns, Label::Single(3), head, alphas[n], &g_sum, xs[n]));
        axpy(&mut out, &sign(n + 1), &last);
    }
    Ok(out)
}

/// The NS-family coboundary. Evaluated on every full index tuple; the
/// components `[r] ≤ [n+1]` are then stored once per tuple with `α_r`
/// removed, after checking they do not depend on `α_r`.
pub fn delta_nsfam(ns: &NsFamily, c: &Cochain) -> Result<Cochain> {
    let n = c.degree;
    if n == 0 {
        return Err(Error::Invalid("the NS-family complex starts in degree 1".into()));
    }
    let k = ns.semigroup().size();
    let d = ns.dim();
    let lay = NsLayout { k, d, n };
    if c.data.len() != ns_dim(k, d, n) {
        return Err(Error::shape("cochain does not match the NS-family layout"));
    }
    let out_lay = NsLayout { k, d, n: n + 1 };
    let mut out = zero_vec(ns_dim(k, d, n + 1));
    for alphas in Tuples::new(k, n + 1) {
        for xs in Tuples::new(d, n + 1) {
            for r in 1..=n + 2 {
                let v = ns_component(ns, &lay, &c.data, r, &alphas, &xs)?;
                let o = out_lay.offset(r, &alphas, &xs).expect("output degree is at least 2");
                if r <= n + 1 && alphas[r - 1] != 0 {
                    if out[o..o + d] != v[..] {
                        return Err(Error::Independence(format!(
                            "component [{r}] of δf depends on α_{r} at α = {alphas:?}, x = {xs:?}"
                        )));
                    }
                } else {
                    out[o..o + d].clone_from_slice(&v);
                }
            }
        }
    }
    Ok(Cochain { degree: n + 1, data: out })
}

fn top_is_zero(k: usize, d: usize, c: &Cochain) -> bool {
    let n = c.degree;
    n < 2 || is_zero_vec(&c.data[n * NsLayout { k, d, n }.block()..])
}

/// The coboundary of the dendriform subcomplex: the NS-family coboundary
/// with `⋎ = 0` on cochains whose top component vanishes.
pub fn delta_dendfam(dend: &DendriformFamily, c: &Cochain) -> Result<Cochain> {
    let (k, d) = (dend.semigroup().size(), dend.dim());
    if c.degree == 0 || c.data.len() != ns_dim(k, d, c.degree) {
        return Err(Error::shape("cochain does not match the dendriform-family layout"));
    }
    if !top_is_zero(k, d, c) {
        return Err(Error::Invalid("cochain lies outside the dendriform subcomplex".into()));
    }
    let out = delta_nsfam(&dend.to_ns(), c)?;
    if !top_is_zero(k, d, &out) {
        return Err(Error::Postcondition {
            what: "the dendriform subcomplex is closed under δ".into(),
            violation: Violation { rule: "top component of δf vanishes".into(), elements: vec![], basis: vec![out.degree + 1] },
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Dimensions and δ² = 0

fn bound_check(ctx: &ComplexDescriptor, n: usize, bound: usize) -> Result<()> {
    let (a, b) = (ctx.cochain_dim(n), ctx.storage_dim(n + 1));
    if a.saturating_mul(b) > bound {
        return Err(Error::ResourceBound(format!(
            "δ_{n} of the {} complex is {b}×{a}, above the bound {bound}",
            ctx.tag()
        )));
    }
    Ok(())
}

/// `rank δₙ`, by feeding the images of the basis cochains to an echelon builder.
pub fn delta_rank(ctx: &ComplexDescriptor, n: usize, bound: usize) -> Result<usize> {
    bound_check(ctx, n, bound)?;
    let mut e = EchelonBuilder::new();
    for j in 0..ctx.cochain_dim(n) {
        let img = ctx.delta(&ctx.basis_cochain(n, j)?)?;
        e.insert(&img.data);
    }
    Ok(e.rank())
}

/// `dim Hⁿ = nullity(δₙ) − rank(δₙ₋₁)` for `n` from the start degree to `n_max`.
pub fn cohomology_dimensions(ctx: &ComplexDescriptor, n_max: usize) -> Result<Vec<DegreeRow>> {
    cohomology_dimensions_bounded(ctx, n_max, DEFAULT_RESOURCE_BOUND)
}

pub fn cohomology_dimensions_bounded(ctx: &ComplexDescriptor, n_max: usize, bound: usize) -> Result<Vec<DegreeRow>> {
    ctx.validate()?;
    let start = ctx.start_degree();
    let mut rows = Vec::new();
    let mut prev_rank = 0;
    for n in start..=n_max {
        let dim = ctx.cochain_dim(n);
        let rank = delta_rank(ctx, n, bound)?;
        let z = dim - rank;
        rows.push(DegreeRow {
            degree: n,
            dim_cochains: dim,
            rank_delta: rank,
            dim_cocycles: z,
            dim_coboundaries: prev_rank,
            dim_cohomology: z - prev_rank,
        });
        prev_rank = rank;
    }
    Ok(rows)
}

/// Basis cochains are checked when `dim Cⁿ · dim Cⁿ⁺²` stays below this.
const BASIS_SWEEP_BOUND: usize = 5_000_000;

/// Applies δ twice to `trials` random cochains of `Cⁿ` and, when feasible,
/// to every basis cochain. For the dendriform subcomplex both steps also
/// check that the top component stays zero.
pub fn verify_dsquared_zero(ctx: &ComplexDescriptor, n: usize, trials: usize, seed: u64) -> Result<Report> {
    ctx.validate()?;
    if n < ctx.start_degree() {
        return Err(Error::Invalid(format!("the {} complex starts in degree {}", ctx.tag(), ctx.start_degree())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit = Audit::default();
    let dim = ctx.cochain_dim(n);
    let sweep = dim.saturating_mul(ctx.storage_dim(n + 2)) <= BASIS_SWEEP_BOUND;
    let mut inputs: Vec<(String, Cochain)> = (0..trials).map(|t| (format!("random cochain {t}"), ctx.random_cochain(n, &mut rng))).collect();
    if sweep {
        for j in 0..dim {
            inputs.push((format!("basis cochain {j}"), ctx.basis_cochain(n, j)?));
        }
    }
    let outcome = (|| -> std::result::Result<(), Violation> {
        for (name, c) in &inputs {
            let twice = ctx.delta(c).and_then(|d1| ctx.delta(&d1));
            match twice {
                Ok(dd) => audit.expect_zero(&dd.data, &format!("δ∘δ vanishes on {name}"), &[], &[n])?,
                Err(e) => audit.expect_bool(false, &format!("δ∘δ defined on {name}: {e}"), &[], &[n])?,
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}
