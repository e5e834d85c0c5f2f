//! Associative Yang-Baxter families `{r_α}` and the operator families they induce.
//!
//! `r_α = Σ r[i][j] e_i ⊗ e_j` is stored as its coefficient matrix. The
//! identities live in `(A⁺)^{⊗3}`, where `A⁺` is `A` itself when `A` has a
//! unit and the unitization otherwise.

use crate::algebra_core::{coadjoint_bimodule, unitization, Algebra};
use crate::error::{Error, Result};
use crate::exact_linalg::{Matrix, Scalar};
use crate::family_ops::{check_rota_baxter_family, check_twisted_o_family, OperatorFamily};
use crate::report::{Audit, Report, Violation};
use crate::semigroup::FiniteSemigroup;

/// One `dim × dim` coefficient matrix per semigroup element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorFamily {
    semigroup: FiniteSemigroup,
    algebra_dim: usize,
    r: Vec<Matrix>,
}

impl TensorFamily {
    pub fn new(semigroup: FiniteSemigroup, r: Vec<Matrix>) -> Result<Self> {
        if r.len() != semigroup.size() {
            return Err(Error::shape(format!("{} tensors for a semigroup of size {}", r.len(), semigroup.size())));
        }
        let d = r[0].rows();
        if let Some(bad) = r.iter().position(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::shape(format!("tensor {bad} is not {d}×{d}")));
        }
        Ok(TensorFamily { semigroup, algebra_dim: d, r })
    }

    pub fn constant(semigroup: FiniteSemigroup, r: Matrix) -> Result<Self> {
        let n = semigroup.size();
        Self::new(semigroup, vec![r; n])
    }

    pub fn zero(semigroup: FiniteSemigroup, dim: usize) -> Self {
        Self::constant(semigroup, Matrix::zeros(dim, dim)).expect("uniform shapes")
    }

    pub fn semigroup(&self) -> &FiniteSemigroup {
        &self.semigroup
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn tensors(&self) -> &[Matrix] {
        &self.r
    }

    pub fn tensor(&self, alpha: usize) -> &Matrix {
        &self.r[alpha]
    }
}

/// Dense element of `(A⁺)^{⊗3}` with index `(p·n + q)·n + r`.
struct Triple {
    n: usize,
    c: Vec<Scalar>,
}

impl Triple {
    fn zero(n: usize) -> Self {
        Triple { n, c: vec![Scalar::zero(); n * n * n] }
    }

    fn idx(&self, p: usize, q: usize, r: usize) -> usize {
        (p * self.n + q) * self.n + r
    }

    fn add_scaled(&mut self, k: &Scalar, other: &Triple) {
        for (x, y) in self.c.iter_mut().zip(&other.c) {
            if !y.is_zero() {
                *x += &(k * y);
            }
        }
    }

    fn nonzero(&self) -> Vec<(usize, usize, usize, &Scalar)> {
        let n = self.n;
        self.c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i / (n * n), (i / n) % n, i % n, v))
            .collect()
    }

    /// Componentwise product `(a⊗b⊗c)(a'⊗b'⊗c') = aa'⊗bb'⊗cc'`.
    fn mul(&self, other: &Triple, alg: &Algebra) -> Triple {
        let n = self.n;
        let mut out = Triple::zero(n);
        let sparse = |v: &[Scalar]| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect::<Vec<_>>();
        let lhs = self.nonzero();
        let rhs = other.nonzero();
        for &(a, b, c, x) in &lhs {
            for &(a2, b2, c2, y) in &rhs {
                let xy = x * y;
                let f1 = sparse(alg.mul_basis(a, a2));
                if f1.is_empty() {
                    continue;
                }
                let f2 = sparse(alg.mul_basis(b, b2));
                let f3 = sparse(alg.mul_basis(c, c2));
                for (p, u) in &f1 {
                    let xu = &xy * u;
                    for (q, v) in &f2 {
                        let xuv = &xu * v;
                        for (r, w) in &f3 {
                            let i = out.idx(*p, *q, *r);
                            out.c[i] += &(&xuv * w);
                        }
                    }
                }
            }
        }
        out
    }
}

/// `A⁺` together with its unit vector and the three leg embeddings of each `r_α`.
struct Legs {
    alg: Algebra,
    r12: Vec<Triple>,
    r13: Vec<Triple>,
    r23: Vec<Triple>,
}

fn legs(rf: &TensorFamily, a: &Algebra) -> Result<Legs> {
    if rf.algebra_dim() != a.dim() {
        return Err(Error::shape(format!("tensors are over a {}-dim space, algebra has dim {}", rf.algebra_dim(), a.dim())));
    }
    let (alg, _) = unitization(a);
    let n = alg.dim();
    let one = alg.unit().expect("unitization has a unit").to_vec();
    let d = a.dim();
    let (mut r12, mut r13, mut r23) = (Vec::new(), Vec::new(), Vec::new());
    for r in rf.tensors() {
        let (mut t12, mut t13, mut t23) = (Triple::zero(n), Triple::zero(n), Triple::zero(n));
        for i in 0..d {
            for j in 0..d {
                let c = r.get(i, j);
                if c.is_zero() {
                    continue;
                }
                for (k, u) in one.iter().enumerate() {
                    if u.is_zero() {
                        continue;
                    }
                    let cu = c * u;
                    let i12 = t12.idx(i, j, k);
                    t12.c[i12] += &cu;
                    let i13 = t13.idx(i, k, j);
                    t13.c[i13] += &cu;
                    let i23 = t23.idx(k, i, j);
                    t23.c[i23] += &cu;
                }
            }
        }
        r12.push(t12);
        r13.push(t13);
        r23.push(t23);
    }
    Ok(Legs { alg, r12, r13, r23 })
}

fn first_nonzero(t: &Triple) -> Option<Vec<usize>> {
    t.nonzero().first().map(|&(p, q, r, _)| vec![p, q, r])
}

fn check_aybf(rf: &TensorFamily, a: &Algebra, type_two: bool) -> Result<Report> {
    let l = legs(rf, a)?;
    let s = rf.semigroup();
    let one = Scalar::one();
    let minus = -Scalar::one();
    let rule = if type_two { "associative Yang-Baxter family (type II)" } else { "associative Yang-Baxter family (type I)" };
    let mut audit = Audit::default();
    let outcome = (|| -> std::result::Result<(), Violation> {
        for al in 0..s.size() {
            for be in 0..s.size() {
                let ab = s.mul(al, be);
                let terms = if type_two {
                    [
                        l.r13[al].mul(&l.r12[be], &l.alg),
                        l.r12[ab].mul(&l.r23[al], &l.alg),
                        l.r23[be].mul(&l.r13[ab], &l.alg),
                    ]
                } else {
                    [
                        l.r13[ab].mul(&l.r12[al], &l.alg),
                        l.r12[al].mul(&l.r23[be], &l.alg),
                        l.r23[be].mul(&l.r13[ab], &l.alg),
                    ]
                };
                let mut total = Triple::zero(l.alg.dim());
                total.add_scaled(&one, &terms[0]);
                total.add_scaled(&minus, &terms[1]);
                total.add_scaled(&one, &terms[2]);
                let witness = first_nonzero(&total);
                audit.expect_bool(witness.is_none(), rule, &[al, be], &witness.unwrap_or_default())?;
            }
        }
        Ok(())
    })();
    Ok(audit.finish(outcome))
}

/// `r^{13}_{αβ} r^{12}_α − r^{12}_α r^{23}_β + r^{23}_β r^{13}_{αβ} = 0`.
///
/// A violation's `basis` is the first nonzero coordinate `(p, q, r)` of the
/// residual in `(A⁺)^{⊗3}`; index `dim` is the adjoined unit, if any.
pub fn check_aybf_type1(rf: &TensorFamily, a: &Algebra) -> Result<Report> {
    check_aybf(rf, a, false)
}

/// `r^{13}_α r^{12}_β − r^{12}_{αβ} r^{23}_α + r^{23}_β r^{13}_{αβ} = 0`.
pub fn check_aybf_type2(rf: &TensorFamily, a: &Algebra) -> Result<Report> {
    check_aybf(rf, a, true)
}

/// Each `r_α` equals `−τ(r_α)`.
pub fn is_skew_symmetric(rf: &TensorFamily) -> bool {
    rf.tensors().iter().all(|r| r.transpose() == -r)
}

fn rb_maps(rf: &TensorFamily, a: &Algebra) -> Result<OperatorFamily> {
    let d = a.dim();
    let maps = rf
        .tensors()
        .iter()
        .map(|r| {
            let mut m = Matrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    let c = r.get(i, j);
                    if c.is_zero() {
                        continue;
                    }
                    for x in 0..d {
                        let v = a.mult().apply_right_basis(a.mul_basis(i, x), j);
                        for (k, val) in v.iter().enumerate() {
                            if !val.is_zero() {
                                *m.entry_mut(k, x) += &(c * val);
                            }
                        }
                    }
                }
            }
            m
        })
        .collect();
    OperatorFamily::new(rf.semigroup().clone(), maps)
}

/// `R_α(x) = Σ r[i][j] e_i·x·e_j`, a Rota-Baxter family for a type-I family.
pub fn rb_family_from_aybf1(rf: &TensorFamily, a: &Algebra) -> Result<OperatorFamily> {
    check_aybf_type1(rf, a)?.require("input is a type-I associative Yang-Baxter family")?;
    let fam = rb_maps(rf, a)?;
    check_rota_baxter_family(&fam, a)?.ensure("induced family is a Rota-Baxter family")?;
    Ok(fam)
}

/// `T_α: A* → A`, `T_α(f_j) = Σ_i r[i][j] e_i`, an O-operator family on the
/// coadjoint bimodule for a skew-symmetric type-II family.
pub fn o_family_from_aybf2(rf: &TensorFamily, a: &Algebra) -> Result<OperatorFamily> {
    if let Some(bad) = rf.tensors().iter().position(|r| r.transpose() != -r) {
        return Err(Error::NotSkewSymmetric { element: bad });
    }
    check_aybf_type2(rf, a)?.require("input is a type-II associative Yang-Baxter family")?;
    let fam = OperatorFamily::new(rf.semigroup().clone(), rf.tensors().to_vec())?;
    check_twisted_o_family(&fam, a, &coadjoint_bimodule(a), None)?
        .ensure("induced family is an O-operator family on the coadjoint bimodule")?;
    Ok(fam)
}

/// The single associative Yang-Baxter equation `r^{13}r^{12} − r^{12}r^{23} + r^{23}r^{13} = 0`.
pub fn check_aybe(r: &Matrix, a: &Algebra) -> Result<Report> {
    let rf = TensorFamily::new(FiniteSemigroup::trivial(), vec![r.clone()])?;
    check_aybf_type1(&rf, a)
}

/// Rota-Baxter check of the induced family without the type-I precondition.
pub fn induced_rb_report(rf: &TensorFamily, a: &Algebra) -> Result<Report> {
    if rf.algebra_dim() != a.dim() {
        return Err(Error::shape("tensor family and algebra dimensions differ"));
    }
    check_rota_baxter_family(&rb_maps(rf, a)?, a)
}
