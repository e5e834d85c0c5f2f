//! JSON workspace files: named structures plus a list of command requests.
//!
//! Rationals are written as `"p/q"` strings or integers. Matrices are lists
//! of rows, 3-tensors are nested `[i][j][k]` lists with `t[i][j][k]` the
//! coefficient of `e_k` in `e_i ∘ e_j`. Names share one namespace; objects may
//! only refer to objects of sections listed before their own.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::algebra_core::{adjoint_bimodule, coadjoint_bimodule, Algebra, Bimodule, Cocycle2};
use crate::catalog;
use crate::coalgebra_dual::{CoCocycle, CoContext, CoFamily, Coalgebra, Cobimodule, NsCofamily};
use crate::commands::CommandRequest;
use crate::deformation::{TruncatedFamilyDeformation, TruncatedNSDeformation};
use crate::error::{Error, Result};
use crate::exact_linalg::{Matrix, Scalar, Tensor3};
use crate::family_algebras::{DendriformFamily, NsFamily, TridendriformFamily};
use crate::family_ops::{build_nijenhuis_twisted_context, FamilyKind, OperatorFamily, TwistedContext};
use crate::semigroup::FiniteSemigroup;
use crate::yang_baxter::TensorFamily;

type RawMatrix = Vec<Vec<Scalar>>;
type RawTensor = Vec<Vec<Vec<Scalar>>>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorkspace {
    #[serde(default)]
    semigroups: BTreeMap<String, RawSemigroup>,
    #[serde(default)]
    algebras: BTreeMap<String, RawAlgebra>,
    #[serde(default)]
    bimodules: BTreeMap<String, RawBimodule>,
    #[serde(default)]
    cocycles: BTreeMap<String, RawCocycle>,
    #[serde(default)]
    families: BTreeMap<String, RawFamily>,
    #[serde(default)]
    tensor_families: BTreeMap<String, RawTensorFamily>,
    #[serde(default)]
    family_algebras: BTreeMap<String, RawFamilyAlgebra>,
    #[serde(default)]
    coalgebras: BTreeMap<String, RawCoalgebra>,
    #[serde(default)]
    cobimodules: BTreeMap<String, RawCobimodule>,
    #[serde(default)]
    cococycles: BTreeMap<String, RawCococycle>,
    #[serde(default)]
    cofamilies: BTreeMap<String, RawCofamily>,
    #[serde(default)]
    deformations: BTreeMap<String, RawDeformation>,
    #[serde(default)]
    commands: Vec<CommandRequest>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSemigroup {
    table: Option<Vec<Vec<usize>>>,
    builtin: Option<String>,
    n: Option<usize>,
    #[serde(default)]
    adjoin_unit: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    mult: Option<RawTensor>,
    unit: Option<Vec<Scalar>>,
    builtin: Option<String>,
    n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBimodule {
    algebra: String,
    builtin: Option<String>,
    dim: Option<usize>,
    left: Option<RawTensor>,
    right: Option<RawTensor>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCocycle {
    algebra: String,
    bimodule: String,
    h: Option<RawTensor>,
    /// `"multiplication"` (adjoint bimodule only) or `"zero"`.
    builtin: Option<String>,
    scale: Option<Scalar>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    lambda: Option<Scalar>,
    semigroup: String,
    algebra: String,
    bimodule: Option<String>,
    cocycle: Option<String>,
    maps: Option<Vec<RawMatrix>>,
    constant: Option<RawMatrix>,
    /// `"identity"` or `"zero"`.
    builtin: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTensorFamily {
    /// `"aybf1"` or `"aybf2"`.
    kind: String,
    semigroup: String,
    algebra: String,
    tensors: Option<Vec<RawMatrix>>,
    constant: Option<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamilyAlgebra {
    /// `"dendriform"`, `"tridendriform"` or `"ns"`.
    kind: String,
    semigroup: String,
    prec: Vec<RawTensor>,
    succ: Vec<RawTensor>,
    odot: Option<RawTensor>,
    vee: Option<Vec<RawTensor>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoalgebra {
    comult: Option<RawMatrix>,
    counit: Option<Vec<Scalar>>,
    dim: Option<usize>,
    dual_of: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoactions {
    left: RawMatrix,
    right: RawMatrix,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCobimodule {
    coalgebra: String,
    coactions: Option<RawCoactions>,
    /// `"regular"` or `"zero"` (with `dim`).
    builtin: Option<String>,
    dim: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCococycle {
    coalgebra: String,
    cobimodule: String,
    h: RawMatrix,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCofamily {
    semigroup: String,
    coalgebra: String,
    cobimodule: String,
    cocycle: Option<String>,
    maps: Vec<RawMatrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNsTerm {
    prec: Vec<RawTensor>,
    succ: Vec<RawTensor>,
    vee: Vec<RawTensor>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeformation {
    /// A family object, or an NS-family algebra.
    base: String,
    /// Orders 1..N. Family deformations list one matrix per element per order;
    /// NS deformations list `{prec, succ, vee}` per order.
    #[serde(default)]
    terms: Vec<serde_json::Value>,
}

/// Which Yang-Baxter equation a tensor family is meant to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AybfKind {
    TypeOne,
    TypeTwo,
}

/// An operator family together with the names of the data it lives on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyObject {
    pub kind: FamilyKind,
    pub semigroup: String,
    pub algebra: String,
    pub bimodule: Option<String>,
    pub cocycle: Option<String>,
    pub value: OperatorFamily,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Object {
    Semigroup(FiniteSemigroup),
    Algebra(Algebra),
    Bimodule { algebra: String, value: Bimodule },
    Cocycle { algebra: String, bimodule: String, value: Cocycle2 },
    Family(FamilyObject),
    TensorFamily { kind: AybfKind, algebra: String, value: TensorFamily },
    Dendriform(DendriformFamily),
    Tridendriform(TridendriformFamily),
    Ns(NsFamily),
    Coalgebra(Coalgebra),
    Cobimodule { coalgebra: String, value: Cobimodule },
    CoCocycle { coalgebra: String, cobimodule: String, value: CoCocycle },
    CoFamily { coalgebra: String, cobimodule: String, cocycle: Option<String>, value: CoFamily },
    NsCofamily(NsCofamily),
    Deformation { base: String, value: TruncatedFamilyDeformation },
    NsDeformation { base: String, value: TruncatedNSDeformation },
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Semigroup(_) => "semigroup",
            Object::Algebra(_) => "algebra",
            Object::Bimodule { .. } => "bimodule",
            Object::Cocycle { .. } => "cocycle",
            Object::Family(_) => "family",
            Object::TensorFamily { .. } => "tensor family",
            Object::Dendriform(_) => "dendriform family algebra",
            Object::Tridendriform(_) => "tridendriform family algebra",
            Object::Ns(_) => "NS-family algebra",
            Object::Coalgebra(_) => "coalgebra",
            Object::Cobimodule { .. } => "cobimodule",
            Object::CoCocycle { .. } => "coHochschild cocycle",
            Object::CoFamily { .. } => "cofamily",
            Object::NsCofamily(_) => "NS-cofamily coalgebra",
            Object::Deformation { .. } => "family deformation",
            Object::NsDeformation { .. } => "NS deformation",
        }
    }
}

/// A fully resolved workspace.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    objects: BTreeMap<String, Object>,
    commands: Vec<CommandRequest>,
}

fn wrap<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(path, other.to_string()),
    })
}

fn matrix(path: &str, raw: &RawMatrix) -> Result<Matrix> {
    let cols = raw.first().map_or(0, Vec::len);
    wrap(path, Matrix::from_rows(raw.clone(), cols))
}

fn tensor(path: &str, raw: &RawTensor) -> Result<Tensor3> {
    let d1 = raw.len();
    let d2 = raw.first().map_or(0, Vec::len);
    let d3 = raw.first().and_then(|r| r.first()).map_or(0, Vec::len);
    wrap(path, Tensor3::from_nested(raw.clone(), (d1, d2, d3)))
}

fn tensors(path: &str, raw: &[RawTensor]) -> Result<Vec<Tensor3>> {
    raw.iter().enumerate().map(|(i, t)| tensor(&format!("{path}[{i}]"), t)).collect()
}

fn matrices(path: &str, raw: &[RawMatrix]) -> Result<Vec<Matrix>> {
    raw.iter().enumerate().map(|(i, m)| matrix(&format!("{path}[{i}]"), m)).collect()
}

fn exactly_one(path: &str, present: &[(&str, bool)]) -> Result<()> {
    let given: Vec<&str> = present.iter().filter(|p| p.1).map(|p| p.0).collect();
    if given.len() != 1 {
        let names: Vec<&str> = present.iter().map(|p| p.0).collect();
        return Err(Error::parse(path, format!("give exactly one of {}", names.join(", "))));
    }
    Ok(())
}

fn need<T: Clone>(path: &str, v: &Option<T>, what: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::parse(path, format!("missing '{what}'")))
}

fn builtin_semigroup(path: &str, name: &str, n: Option<usize>) -> Result<FiniteSemigroup> {
    let size = || need(&format!("{path}.n"), &n, "n");
    Ok(match name {
        "trivial" => FiniteSemigroup::trivial(),
        "cyclic" => FiniteSemigroup::cyclic(size()?),
        "mult_mod" => FiniteSemigroup::mult_mod(size()?),
        "left_zero" => FiniteSemigroup::left_zero(size()?),
        "right_zero" => FiniteSemigroup::right_zero(size()?),
        other => return Err(Error::parse(format!("{path}.builtin"), format!("unknown semigroup '{other}'"))),
    })
}

fn builtin_algebra(path: &str, name: &str, n: Option<usize>) -> Result<Algebra> {
    let size = || need(&format!("{path}.n"), &n, "n");
    Ok(match name {
        "field" => catalog::field(),
        "two_dim_left_unit" => catalog::two_dim_left_unit(),
        "nilpotent_x" => catalog::nilpotent_x(),
        "dual_numbers" => catalog::dual_numbers(),
        "diagonal2" => catalog::diagonal2(),
        "upper_triangular" => catalog::upper_triangular(),
        "truncated_polynomials" => catalog::truncated_polynomials(size()?),
        "zero" => Algebra::zero(size()?),
        other => return Err(Error::parse(format!("{path}.builtin"), format!("unknown algebra '{other}'"))),
    })
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        Self::from_json_str(&text)
    }

    /// Parses and resolves a workspace. Errors name the offending key path.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let raw: RawWorkspace = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            Error::parse(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
        })?;
        let mut ws = Workspace::new();
        ws.resolve(raw)?;
        Ok(ws)
    }

    pub fn objects(&self) -> &BTreeMap<String, Object> {
        &self.objects
    }

    pub fn commands(&self) -> &[CommandRequest] {
        &self.commands
    }

    pub fn get(&self, name: &str) -> Result<&Object> {
        self.objects.get(name).ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    /// Adds an object under a fresh name.
    pub fn insert(&mut self, name: &str, obj: Object) -> Result<()> {
        if self.objects.contains_key(name) {
            return Err(Error::Invalid(format!("name '{name}' is already taken")));
        }
        self.objects.insert(name.to_string(), obj);
        Ok(())
    }

    fn wrong_kind(&self, name: &str, expected: &str) -> Error {
        match self.objects.get(name) {
            Some(o) => Error::Invalid(format!("'{name}' is a {}, expected a {expected}", o.kind())),
            None => Error::UnknownObject(name.to_string()),
        }
    }

    pub fn semigroup(&self, name: &str) -> Result<&FiniteSemigroup> {
        match self.objects.get(name) {
            Some(Object::Semigroup(s)) => Ok(s),
            _ => Err(self.wrong_kind(name, "semigroup")),
        }
    }

    pub fn algebra(&self, name: &str) -> Result<&Algebra> {
        match self.objects.get(name) {
            Some(Object::Algebra(a)) => Ok(a),
            _ => Err(self.wrong_kind(name, "algebra")),
        }
    }

    pub fn bimodule(&self, name: &str) -> Result<&Bimodule> {
        match self.objects.get(name) {
            Some(Object::Bimodule { value, .. }) => Ok(value),
            _ => Err(self.wrong_kind(name, "bimodule")),
        }
    }

    pub fn cocycle(&self, name: &str) -> Result<&Cocycle2> {
        match self.objects.get(name) {
            Some(Object::Cocycle { value, .. }) => Ok(value),
            _ => Err(self.wrong_kind(name, "cocycle")),
        }
    }

    pub fn family(&self, name: &str) -> Result<&FamilyObject> {
        match self.objects.get(name) {
            Some(Object::Family(f)) => Ok(f),
            _ => Err(self.wrong_kind(name, "family")),
        }
    }

    pub fn coalgebra(&self, name: &str) -> Result<&Coalgebra> {
        match self.objects.get(name) {
            Some(Object::Coalgebra(c)) => Ok(c),
            _ => Err(self.wrong_kind(name, "coalgebra")),
        }
    }

    pub fn cobimodule(&self, name: &str) -> Result<&Cobimodule> {
        match self.objects.get(name) {
            Some(Object::Cobimodule { value, .. }) => Ok(value),
            _ => Err(self.wrong_kind(name, "cobimodule")),
        }
    }

    pub fn cococycle(&self, name: &str) -> Result<&CoCocycle> {
        match self.objects.get(name) {
            Some(Object::CoCocycle { value, .. }) => Ok(value),
            _ => Err(self.wrong_kind(name, "coHochschild cocycle")),
        }
    }

    pub fn ns_family(&self, name: &str) -> Result<NsFamily> {
        match self.objects.get(name) {
            Some(Object::Ns(n)) => Ok(n.clone()),
            Some(Object::Dendriform(d)) => Ok(d.to_ns()),
            _ => Err(self.wrong_kind(name, "NS-family algebra")),
        }
    }

    /// The bimodule a family acts through: the named one or the adjoint bimodule.
    pub fn family_bimodule(&self, f: &FamilyObject) -> Result<Bimodule> {
        match &f.bimodule {
            Some(m) => self.bimodule(m).cloned(),
            None => Ok(adjoint_bimodule(self.algebra(&f.algebra)?)),
        }
    }

    /// The twisted O-operator context a family determines: Rota-Baxter and
    /// O-operator families are untwisted, Reynolds families carry `H = −μ`,
    /// Nijenhuis families use their own twisted context.
    pub fn family_context(&self, f: &FamilyObject) -> Result<TwistedContext> {
        let a = self.algebra(&f.algebra)?;
        match &f.kind {
            FamilyKind::RotaBaxter => TwistedContext::new(a.clone(), adjoint_bimodule(a), None, f.value.clone()),
            FamilyKind::OOperator | FamilyKind::TwistedOOperator => {
                let h = match (&f.kind, &f.cocycle) {
                    (FamilyKind::TwistedOOperator, Some(h)) => Some(self.cocycle(h)?.clone()),
                    _ => None,
                };
                TwistedContext::new(a.clone(), self.family_bimodule(f)?, h, f.value.clone())
            }
            FamilyKind::Reynolds => {
                let h = Cocycle2::multiplication(a).scale(&Scalar::int(-1));
                TwistedContext::new(a.clone(), adjoint_bimodule(a), Some(h), f.value.clone())
            }
            FamilyKind::Nijenhuis => build_nijenhuis_twisted_context(&f.value, a, self.semigroup(&f.semigroup)?),
            other => Err(Error::Invalid(format!("a {} family has no twisted O-operator context", other.tag()))),
        }
    }

    /// The cofamily together with its coalgebra, cobimodule and cocycle.
    pub fn co_context(&self, name: &str) -> Result<CoContext> {
        match self.objects.get(name) {
            Some(Object::CoFamily { coalgebra, cobimodule, cocycle, value }) => CoContext::new(
                self.coalgebra(coalgebra)?.clone(),
                self.cobimodule(cobimodule)?.clone(),
                cocycle.as_deref().map(|h| self.cococycle(h).cloned()).transpose()?,
                value.clone(),
            ),
            _ => Err(self.wrong_kind(name, "cofamily")),
        }
    }

    fn add(&mut self, path: &str, name: &str, obj: Object) -> Result<()> {
        wrap(path, self.insert(name, obj))
    }

    fn lookup<T>(&self, path: &str, r: Result<T>) -> Result<T> {
        wrap(path, r)
    }

    fn resolve(&mut self, raw: RawWorkspace) -> Result<()> {
        for (name, s) in &raw.semigroups {
            let p = format!("semigroups.{name}");
            exactly_one(&p, &[("table", s.table.is_some()), ("builtin", s.builtin.is_some())])?;
            let mut sg = match (&s.table, &s.builtin) {
                (Some(t), _) => wrap(&format!("{p}.table"), FiniteSemigroup::new(t.clone()))?,
                (_, Some(b)) => builtin_semigroup(&p, b, s.n)?,
                _ => unreachable!(),
            };
            if s.adjoin_unit {
                sg = sg.with_adjoined_unit();
            }
            self.add(&p, name, Object::Semigroup(sg))?;
        }
        for (name, a) in &raw.algebras {
            let p = format!("algebras.{name}");
            exactly_one(&p, &[("mult", a.mult.is_some()), ("builtin", a.builtin.is_some())])?;
            let alg = match (&a.mult, &a.builtin) {
                (Some(m), _) => {
                    let alg = wrap(&p, Algebra::new(tensor(&format!("{p}.mult"), m)?, a.unit.clone()))?;
                    if a.unit.is_some() { alg } else { alg.with_detected_unit() }
                }
                (_, Some(b)) => builtin_algebra(&p, b, a.n)?,
                _ => unreachable!(),
            };
            self.add(&p, name, Object::Algebra(alg))?;
        }
        for (name, m) in &raw.bimodules {
            let p = format!("bimodules.{name}");
            let alg = self.lookup(&format!("{p}.algebra"), self.algebra(&m.algebra))?;
            let value = match (&m.builtin, &m.left, &m.right) {
                (Some(b), None, None) => match b.as_str() {
                    "adjoint" => adjoint_bimodule(alg),
                    "coadjoint" => coadjoint_bimodule(alg),
                    "zero" => Bimodule::zero(alg.dim(), need(&format!("{p}.dim"), &m.dim, "dim")?),
                    other => return Err(Error::parse(format!("{p}.builtin"), format!("unknown bimodule '{other}'"))),
                },
                (None, Some(l), Some(r)) => wrap(
                    &p,
                    Bimodule::new(tensor(&format!("{p}.left"), l)?, tensor(&format!("{p}.right"), r)?),
                )?,
                _ => return Err(Error::parse(&p, "give either 'builtin' or both 'left' and 'right'")),
            };
            if value.algebra_dim() != alg.dim() {
                return Err(Error::parse(&p, "actions do not match the algebra's dimension"));
            }
            self.add(&p, name, Object::Bimodule { algebra: m.algebra.clone(), value })?;
        }
        for (name, c) in &raw.cocycles {
            let p = format!("cocycles.{name}");
            let alg = self.lookup(&format!("{p}.algebra"), self.algebra(&c.algebra))?.clone();
            let m = self.lookup(&format!("{p}.bimodule"), self.bimodule(&c.bimodule))?.clone();
            exactly_one(&p, &[("h", c.h.is_some()), ("builtin", c.builtin.is_some())])?;
            let mut value = match (&c.h, c.builtin.as_deref()) {
                (Some(h), _) => wrap(&p, Cocycle2::new(tensor(&format!("{p}.h"), h)?))?,
                (_, Some("zero")) => Cocycle2::zero(alg.dim(), m.module_dim()),
                (_, Some("multiplication")) => {
                    if m.module_dim() != alg.dim() {
                        return Err(Error::parse(&p, "the multiplication cocycle needs the adjoint bimodule"));
                    }
                    Cocycle2::multiplication(&alg)
                }
                (_, Some(other)) => {
                    return Err(Error::parse(format!("{p}.builtin"), format!("unknown cocycle '{other}'")))
                }
                _ => unreachable!(),
            };
            if let Some(s) = &c.scale {
                value = value.scale(s);
            }
            if value.algebra_dim() != alg.dim() || value.module_dim() != m.module_dim() {
                return Err(Error::parse(&p, "cocycle dims do not match the algebra and bimodule"));
            }
            self.add(&p, name, Object::Cocycle { algebra: c.algebra.clone(), bimodule: c.bimodule.clone(), value })?;
        }
        for (name, f) in &raw.families {
            let p = format!("families.{name}");
            let obj = self.resolve_family(&p, f)?;
            self.add(&p, name, Object::Family(obj))?;
        }
        for (name, t) in &raw.tensor_families {
            let p = format!("tensor_families.{name}");
            let kind = match t.kind.as_str() {
                "aybf1" => AybfKind::TypeOne,
                "aybf2" => AybfKind::TypeTwo,
                other => return Err(Error::parse(format!("{p}.kind"), format!("unknown kind '{other}'"))),
            };
            let s = self.lookup(&format!("{p}.semigroup"), self.semigroup(&t.semigroup))?.clone();
            let alg = self.lookup(&format!("{p}.algebra"), self.algebra(&t.algebra))?;
            exactly_one(&p, &[("tensors", t.tensors.is_some()), ("constant", t.constant.is_some())])?;
            let value = match (&t.tensors, &t.constant) {
                (Some(ts), _) => wrap(&p, TensorFamily::new(s, matrices(&format!("{p}.tensors"), ts)?))?,
                (_, Some(c)) => wrap(&p, TensorFamily::constant(s, matrix(&format!("{p}.constant"), c)?))?,
                _ => unreachable!(),
            };
            if value.algebra_dim() != alg.dim() {
                return Err(Error::parse(&p, "tensor dimension does not match the algebra"));
            }
            self.add(&p, name, Object::TensorFamily { kind, algebra: t.algebra.clone(), value })?;
        }
        for (name, f) in &raw.family_algebras {
            let p = format!("family_algebras.{name}");
            let s = self.lookup(&format!("{p}.semigroup"), self.semigroup(&f.semigroup))?.clone();
            let prec = tensors(&format!("{p}.prec"), &f.prec)?;
            let succ = tensors(&format!("{p}.succ"), &f.succ)?;
            let obj = match f.kind.as_str() {
                "dendriform" => Object::Dendriform(wrap(&p, DendriformFamily::new(s, prec, succ))?),
                "tridendriform" => {
                    let odot = tensor(&format!("{p}.odot"), &need(&p, &f.odot, "odot")?)?;
                    Object::Tridendriform(wrap(&p, TridendriformFamily::new(s, prec, succ, odot))?)
                }
                "ns" => {
                    let vee = tensors(&format!("{p}.vee"), &need(&p, &f.vee, "vee")?)?;
                    Object::Ns(wrap(&p, NsFamily::new(s, prec, succ, vee))?)
                }
                other => return Err(Error::parse(format!("{p}.kind"), format!("unknown kind '{other}'"))),
            };
            self.add(&p, name, obj)?;
        }
        for (name, c) in &raw.coalgebras {
            let p = format!("coalgebras.{name}");
            exactly_one(&p, &[("comult", c.comult.is_some()), ("dual_of", c.dual_of.is_some())])?;
            let value = match (&c.comult, &c.dual_of) {
                (Some(m), _) => {
                    let m = matrix(&format!("{p}.comult"), m)?;
                    let dim = c.dim.unwrap_or(m.cols());
                    let value = wrap(&p, Coalgebra::new(dim, m))?;
                    match &c.counit {
                        Some(e) => wrap(&format!("{p}.counit"), value.with_counit(e.clone()))?,
                        None => value,
                    }
                }
                (_, Some(a)) => Coalgebra::dual_of(self.lookup(&format!("{p}.dual_of"), self.algebra(a))?),
                _ => unreachable!(),
            };
            self.add(&p, name, Object::Coalgebra(value))?;
        }
        for (name, n) in &raw.cobimodules {
            let p = format!("cobimodules.{name}");
            let c = self.lookup(&format!("{p}.coalgebra"), self.coalgebra(&n.coalgebra))?;
            let value = match (&n.coactions, n.builtin.as_deref()) {
                (Some(co), None) => {
                    let left = matrix(&format!("{p}.coactions.left"), &co.left)?;
                    let right = matrix(&format!("{p}.coactions.right"), &co.right)?;
                    wrap(&p, Cobimodule::new(c.dim(), left.cols(), left, right))?
                }
                (None, Some("regular")) => Cobimodule::regular(c),
                (None, Some("zero")) => Cobimodule::zero(c.dim(), need(&format!("{p}.dim"), &n.dim, "dim")?),
                (None, Some(other)) => {
                    return Err(Error::parse(format!("{p}.builtin"), format!("unknown cobimodule '{other}'")))
                }
                _ => return Err(Error::parse(&p, "give exactly one of coactions, builtin")),
            };
            self.add(&p, name, Object::Cobimodule { coalgebra: n.coalgebra.clone(), value })?;
        }
        for (name, h) in &raw.cococycles {
            let p = format!("cococycles.{name}");
            let c = self.lookup(&format!("{p}.coalgebra"), self.coalgebra(&h.coalgebra))?;
            let n = self.lookup(&format!("{p}.cobimodule"), self.cobimodule(&h.cobimodule))?;
            let value = wrap(&p, CoCocycle::new(c.dim(), n.module_dim(), matrix(&format!("{p}.h"), &h.h)?))?;
            self.add(
                &p,
                name,
                Object::CoCocycle { coalgebra: h.coalgebra.clone(), cobimodule: h.cobimodule.clone(), value },
            )?;
        }
        for (name, f) in &raw.cofamilies {
            let p = format!("cofamilies.{name}");
            let s = self.lookup(&format!("{p}.semigroup"), self.semigroup(&f.semigroup))?.clone();
            let c = self.lookup(&format!("{p}.coalgebra"), self.coalgebra(&f.coalgebra))?.clone();
            let n = self.lookup(&format!("{p}.cobimodule"), self.cobimodule(&f.cobimodule))?.clone();
            let h = match &f.cocycle {
                Some(h) => Some(self.lookup(&format!("{p}.cocycle"), self.cococycle(h))?.clone()),
                None => None,
            };
            let value = wrap(&p, CoFamily::new(s, matrices(&format!("{p}.maps"), &f.maps)?))?;
            wrap(&p, CoContext::new(c, n, h, value.clone()))?;
            self.add(
                &p,
                name,
                Object::CoFamily {
                    coalgebra: f.coalgebra.clone(),
                    cobimodule: f.cobimodule.clone(),
                    cocycle: f.cocycle.clone(),
                    value,
                },
            )?;
        }
        for (name, d) in &raw.deformations {
            let p = format!("deformations.{name}");
            let obj = self.resolve_deformation(&p, d)?;
            self.add(&p, name, obj)?;
        }
        self.commands = raw.commands;
        Ok(())
    }

    fn resolve_family(&self, p: &str, f: &RawFamily) -> Result<FamilyObject> {
        let kind = wrap(&format!("{p}.kind"), FamilyKind::from_tag(&f.kind, f.lambda.clone()))?;
        let s = self.lookup(&format!("{p}.semigroup"), self.semigroup(&f.semigroup))?.clone();
        let a = self.lookup(&format!("{p}.algebra"), self.algebra(&f.algebra))?;
        let dm = match &f.bimodule {
            Some(m) => {
                let m = self.lookup(&format!("{p}.bimodule"), self.bimodule(m))?;
                if m.algebra_dim() != a.dim() {
                    return Err(Error::parse(format!("{p}.bimodule"), "bimodule is over a different algebra"));
                }
                m.module_dim()
            }
            None => a.dim(),
        };
        if let Some(h) = &f.cocycle {
            if kind != FamilyKind::TwistedOOperator {
                return Err(Error::parse(format!("{p}.cocycle"), "only twisted_o_operator families take a cocycle"));
            }
            let h = self.lookup(&format!("{p}.cocycle"), self.cocycle(h))?;
            if h.algebra_dim() != a.dim() || h.module_dim() != dm {
                return Err(Error::parse(format!("{p}.cocycle"), "cocycle dims do not match the algebra and bimodule"));
            }
        }
        let (rows, cols) = match kind {
            FamilyKind::OOperator | FamilyKind::TwistedOOperator => (a.dim(), dm),
            FamilyKind::Derivation => (dm, a.dim()),
            _ => (a.dim(), a.dim()),
        };
        exactly_one(
            p,
            &[("maps", f.maps.is_some()), ("constant", f.constant.is_some()), ("builtin", f.builtin.is_some())],
        )?;
        let value = match (&f.maps, &f.constant, f.builtin.as_deref()) {
            (Some(ms), _, _) => wrap(p, OperatorFamily::new(s, matrices(&format!("{p}.maps"), ms)?))?,
            (_, Some(c), _) => OperatorFamily::constant(s, matrix(&format!("{p}.constant"), c)?),
            (_, _, Some("zero")) => OperatorFamily::zero(s, cols, rows),
            (_, _, Some("identity")) if rows == cols => OperatorFamily::identity(s, rows),
            (_, _, Some(other)) => {
                return Err(Error::parse(format!("{p}.builtin"), format!("no builtin family '{other}' of this shape")))
            }
            _ => unreachable!(),
        };
        if value.codomain_dim() != rows || value.domain_dim() != cols {
            return Err(Error::parse(
                p,
                format!(
                    "maps are {}×{}, expected {rows}×{cols}",
                    value.codomain_dim(),
                    value.domain_dim()
                ),
            ));
        }
        Ok(FamilyObject {
            kind,
            semigroup: f.semigroup.clone(),
            algebra: f.algebra.clone(),
            bimodule: f.bimodule.clone(),
            cocycle: f.cocycle.clone(),
            value,
        })
    }

    fn resolve_deformation(&self, p: &str, d: &RawDeformation) -> Result<Object> {
        let base_path = format!("{p}.base");
        match self.objects.get(&d.base) {
            Some(Object::Family(f)) => {
                let ctx = wrap(&base_path, self.family_context(f))?;
                let mut terms = vec![ctx.family.clone()];
                for (i, v) in d.terms.iter().enumerate() {
                    let tp = format!("{p}.terms[{i}]");
                    let raw: Vec<RawMatrix> = serde_json::from_value(v.clone()).map_err(|e| Error::parse(&tp, e.to_string()))?;
                    terms.push(wrap(&tp, ctx.family.with_maps(matrices(&tp, &raw)?))?);
                }
                let value = wrap(p, TruncatedFamilyDeformation::new(ctx, terms))?;
                Ok(Object::Deformation { base: d.base.clone(), value })
            }
            Some(Object::Ns(_) | Object::Dendriform(_)) => {
                let base = self.ns_family(&d.base)?;
                let mut terms = vec![base.clone()];
                for (i, v) in d.terms.iter().enumerate() {
                    let tp = format!("{p}.terms[{i}]");
                    let raw: RawNsTerm = serde_json::from_value(v.clone()).map_err(|e| Error::parse(&tp, e.to_string()))?;
                    let t = NsFamily::new(
                        base.semigroup().clone(),
                        tensors(&format!("{tp}.prec"), &raw.prec)?,
                        tensors(&format!("{tp}.succ"), &raw.succ)?,
                        tensors(&format!("{tp}.vee"), &raw.vee)?,
                    );
                    terms.push(wrap(&tp, t)?);
                }
                let value = wrap(p, TruncatedNSDeformation::new(terms))?;
                Ok(Object::NsDeformation { base: d.base.clone(), value })
            }
            _ => Err(wrap::<()>(&base_path, Err(self.wrong_kind(&d.base, "family or NS-family algebra"))).unwrap_err()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_workspace() {
        let ws = Workspace::from_json_str(r#"{"semigroups": {"one": {"builtin": "trivial"}}}"#).unwrap();
        assert_eq!(ws.objects().len(), 1);
        assert_eq!(ws.semigroup("one").unwrap(), &FiniteSemigroup::trivial());
    }

    #[test]
    fn dangling_reference_names_the_key() {
        let text = r#"{
            "semigroups": {"one": {"builtin": "trivial"}},
            "families": {"R": {"kind": "rota_baxter", "semigroup": "one", "algebra": "nope", "builtin": "zero"}}
        }"#;
        match Workspace::from_json_str(text).unwrap_err() {
            Error::Parse { path, message } => {
                assert_eq!(path, "families.R.algebra");
                assert!(message.contains("nope"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_rational_names_the_key() {
        let text = r#"{"algebras": {"A": {"mult": [[["1/0"]]]}}}"#;
        match Workspace::from_json_str(text).unwrap_err() {
            Error::Parse { path, .. } => assert_eq!(path, "algebras.A.mult[0][0][0]"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_is_a_parse_error() {
        let text = r#"{
            "semigroups": {"one": {"builtin": "trivial"}},
            "algebras": {"A": {"builtin": "dual_numbers"}},
            "families": {"R": {"kind": "rota_baxter", "semigroup": "one", "algebra": "A", "constant": [["1"]]}}
        }"#;
        assert!(matches!(Workspace::from_json_str(text), Err(Error::Parse { path, .. }) if path == "families.R"));
    }

    #[test]
    fn unknown_field_is_rejected() {
        let text = r#"{"semigroups": {"one": {"builtin": "trivial", "size": 3}}}"#;
        assert!(matches!(Workspace::from_json_str(text), Err(Error::Parse { path, .. }) if path == "semigroups.one.size"));
    }

    #[test]
    fn duplicate_names_across_sections() {
        let text = r#"{"semigroups": {"X": {"builtin": "trivial"}}, "algebras": {"X": {"builtin": "field"}}}"#;
        assert!(matches!(Workspace::from_json_str(text), Err(Error::Parse { path, .. }) if path == "algebras.X"));
    }
}
