//! Command dispatch over a [`Workspace`] and the deterministic reports it produces.
//!
//! A command either fails to run (unknown object, wrong argument kind), which
//! is returned as an error, or runs and yields a [`CommandReport`]. Errors
//! raised by the mathematics itself, such as a violated constructor
//! precondition, are recorded inside the report as a failure.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra_core::{cocycle_extension, coadjoint_bimodule, extend_by_semigroup, semidirect_product, Algebra};
use crate::coalgebra_dual::{
    check_twisted_o_cofamily, dualize_cofamily, induce_ns_cofamily, validate_ns_cofamily, CoContext,
};
use crate::cohomology::{cohomology_dimensions, verify_dsquared_zero, ComplexDescriptor, DegreeRow};
use crate::deformation::{
    check_family_deformation, check_ns_deformation, infinitesimal_cocycle_check, infinitesimal_ns_cocycle_check,
    OrderReports, TruncatedFamilyDeformation, TruncatedNSDeformation,
};
use crate::error::{Error, Result};
use crate::exact_linalg::{Matrix, Scalar};
use crate::family_algebras::{
    induce_ns_family, tot_context, tridendriform_from_weighted_rb, validate_dendriform_family, validate_ns_family,
    validate_tridendriform_family, NsSource,
};
use crate::family_ops::{
    check_family, collapse_family, derivation_from_invertible_reynolds, lifted_context,
    reynolds_from_nilpotent_derivation, FamilyKind, OperatorFamily, TwistedContext,
};
use crate::report::{Report, Violation};
use crate::search::{check_solution, search, SearchSpace, SearchTarget, Solution, DEFAULT_SEARCH_BOUND};
use crate::semigroup::FiniteSemigroup;
use crate::workspace::{AybfKind, FamilyObject, Object, Workspace};
use crate::yang_baxter::{check_aybf_type1, check_aybf_type2, is_skew_symmetric, o_family_from_aybf2, rb_family_from_aybf1};

/// Random cochains fed to the δ² check on top of the basis sweep.
const DSQUARED_TRIALS: usize = 4;

/// One command, as written in a workspace file or assembled from CLI flags.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandRequest {
    /// `validate`, `construct`, `cohomology`, `deform` or `search`.
    pub cmd: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<String>,
    /// Name for a constructed object.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroup: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bimodule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_results: Option<usize>,
    /// Largest candidate space a search may enumerate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nil_bound: Option<usize>,
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Violation>,
}

impl Verdict {
    pub fn from_report(check: impl Into<String>, r: &Report) -> Self {
        Verdict { check: check.into(), passed: r.passed(), checks: r.checks, witness: r.violation.clone() }
    }

    pub fn flag(check: impl Into<String>, passed: bool) -> Self {
        Verdict { check: check.into(), passed, checks: 1, witness: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyTable {
    pub complex: String,
    pub start_degree: usize,
    pub rows: Vec<DegreeRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchSummary {
    pub target: String,
    pub space_size: u64,
    pub examined: u64,
    pub exhausted: bool,
    /// Each hit as its list of per-element matrices.
    pub hits: Vec<Vec<Matrix>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommandReport {
    pub command: CommandRequest,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub created: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologyTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CommandReport {
    fn new(command: &CommandRequest) -> Self {
        CommandReport {
            command: command.clone(),
            verdicts: Vec::new(),
            created: Vec::new(),
            cohomology: None,
            search: None,
            error: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.verdicts.iter().all(|v| v.passed)
    }

    fn push(&mut self, check: impl Into<String>, r: &Report) {
        self.verdicts.push(Verdict::from_report(check, r));
    }

    /// Records a computation error as a failure of this command.
    fn absorb(&mut self, r: Result<()>) {
        if let Err(e) = r {
            self.error = Some(e.to_string());
        }
    }
}

/// Reports of a sequence of commands, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub passed: bool,
    pub reports: Vec<CommandReport>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.reports.iter().enumerate() {
            let c = &r.command;
            let subject = c.object.clone().or_else(|| c.recipe.clone()).or_else(|| c.target.clone()).unwrap_or_default();
            let _ = writeln!(s, "[{}] {} {}: {}", i + 1, c.cmd, subject, if r.passed() { "pass" } else { "FAIL" });
            for v in &r.verdicts {
                let _ = write!(s, "  {} {} ({} checks)", if v.passed { "ok  " } else { "FAIL" }, v.check, v.checks);
                if let Some(w) = &v.witness {
                    let _ = write!(s, ": {w}");
                }
                s.push('\n');
            }
            if let Some(t) = &r.cohomology {
                let _ = writeln!(s, "  {} complex from degree {}", t.complex, t.start_degree);
                let _ = writeln!(s, "  {:>3} {:>8} {:>8} {:>8} {:>8} {:>8}", "n", "dim C", "rank d", "dim Z", "dim B", "dim H");
                for row in &t.rows {
                    let _ = writeln!(
                        s,
                        "  {:>3} {:>8} {:>8} {:>8} {:>8} {:>8}",
                        row.degree, row.dim_cochains, row.rank_delta, row.dim_cocycles, row.dim_coboundaries, row.dim_cohomology
                    );
                }
            }
            if let Some(sr) = &r.search {
                let _ = writeln!(
                    s,
                    "  {} hits after {} of {} candidates{}",
                    sr.hits.len(),
                    sr.examined,
                    sr.space_size,
                    if sr.exhausted { "" } else { " (stopped at max_results)" }
                );
                for h in &sr.hits {
                    let maps: Vec<String> = h.iter().map(render_matrix).collect();
                    let _ = writeln!(s, "    {}", maps.join(" | "));
                }
            }
            for name in &r.created {
                let _ = writeln!(s, "  created {name}");
            }
            if let Some(e) = &r.error {
                let _ = writeln!(s, "  error: {e}");
            }
        }
        s
    }
}

fn render_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

/// Runs every command listed in the workspace.
pub fn run_workspace(ws: &mut Workspace) -> Result<RunReport> {
    let commands = ws.commands().to_vec();
    run_commands(ws, &commands)
}

pub fn run_commands(ws: &mut Workspace, commands: &[CommandRequest]) -> Result<RunReport> {
    let mut reports = Vec::with_capacity(commands.len());
    for c in commands {
        reports.push(run_command(ws, c)?);
    }
    Ok(RunReport { passed: reports.iter().all(CommandReport::passed), reports })
}

pub fn run_command(ws: &mut Workspace, req: &CommandRequest) -> Result<CommandReport> {
    match req.cmd.as_str() {
        "validate" => cmd_validate(ws, req),
        "construct" => cmd_construct(ws, req),
        "cohomology" => cmd_cohomology(ws, req),
        "deform" => cmd_deform(ws, req),
        "search" => cmd_search(ws, req),
        other => Err(Error::Invalid(format!("unknown command '{other}'"))),
    }
}

fn required<'a>(v: &'a Option<String>, flag: &str, cmd: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Invalid(format!("{cmd} needs --{flag}")))
}

// ---------------------------------------------------------------------------
// validate

pub fn cmd_validate(ws: &Workspace, req: &CommandRequest) -> Result<CommandReport> {
    let name = required(&req.object, "object", "validate")?;
    let mut rep = CommandReport::new(req);
    let obj = ws.get(name)?;
    let outcome = validate_object(ws, name, obj, req, &mut rep);
    rep.absorb(outcome);
    Ok(rep)
}

fn validate_object(ws: &Workspace, name: &str, obj: &Object, req: &CommandRequest, rep: &mut CommandReport) -> Result<()> {
    match obj {
        Object::Semigroup(s) => rep.push(format!("{name}: semigroup associativity"), &s.validate().report),
        Object::Algebra(a) => rep.push(format!("{name}: associativity and unit"), &a.validate()),
        Object::Bimodule { algebra, value } => {
            let a = ws.algebra(algebra)?;
            rep.push(format!("{algebra}: associativity and unit"), &a.validate());
            rep.push(format!("{name}: bimodule axioms"), &value.validate(a)?);
        }
        Object::Cocycle { algebra, bimodule, value } => {
            let a = ws.algebra(algebra)?;
            let m = ws.bimodule(bimodule)?;
            rep.push(format!("{algebra}: associativity and unit"), &a.validate());
            rep.push(format!("{bimodule}: bimodule axioms"), &m.validate(a)?);
            rep.push(format!("{name}: Hochschild 2-cocycle"), &value.validate(a, m)?);
        }
        Object::Family(f) => validate_family(ws, name, f, rep)?,
        Object::TensorFamily { kind, algebra, value } => {
            let a = ws.algebra(algebra)?;
            rep.push(format!("{algebra}: associativity and unit"), &a.validate());
            match kind {
                AybfKind::TypeOne => rep.push(format!("{name}: type-I Yang-Baxter family"), &check_aybf_type1(value, a)?),
                AybfKind::TypeTwo => rep.push(format!("{name}: type-II Yang-Baxter family"), &check_aybf_type2(value, a)?),
            }
        }
        Object::Dendriform(d) => rep.push(format!("{name}: dendriform family axioms"), &validate_dendriform_family(d)),
        Object::Tridendriform(t) => {
            rep.push(format!("{name}: tridendriform family axioms"), &validate_tridendriform_family(t))
        }
        Object::Ns(n) => rep.push(format!("{name}: NS-family axioms"), &validate_ns_family(n)),
        Object::Coalgebra(c) => rep.push(format!("{name}: coassociativity"), &c.validate()),
        Object::Cobimodule { coalgebra, value } => {
            let c = ws.coalgebra(coalgebra)?;
            rep.push(format!("{coalgebra}: coassociativity"), &c.validate());
            rep.push(format!("{name}: cobimodule axioms"), &value.validate(c)?);
        }
        Object::CoCocycle { coalgebra, cobimodule, value } => {
            let c = ws.coalgebra(coalgebra)?;
            let n = ws.cobimodule(cobimodule)?;
            rep.push(format!("{coalgebra}: coassociativity"), &c.validate());
            rep.push(format!("{cobimodule}: cobimodule axioms"), &n.validate(c)?);
            rep.push(format!("{name}: coHochschild 2-cocycle"), &value.validate(c, n)?);
        }
        Object::CoFamily { coalgebra, cobimodule, cocycle, value } => {
            let c = ws.coalgebra(coalgebra)?;
            let n = ws.cobimodule(cobimodule)?;
            rep.push(format!("{coalgebra}: coassociativity"), &c.validate());
            rep.push(format!("{cobimodule}: cobimodule axioms"), &n.validate(c)?);
            let h = match cocycle {
                Some(h) => {
                    let h = ws.cococycle(h)?;
                    let r = h.validate(c, n)?;
                    rep.push(format!("{}: coHochschild 2-cocycle", cocycle.as_deref().unwrap_or_default()), &r);
                    if !r.passed() {
                        return Ok(());
                    }
                    Some(h)
                }
                None => None,
            };
            rep.push(format!("{name}: twisted O-operator cofamily"), &check_twisted_o_cofamily(value, c, n, h)?);
        }
        Object::NsCofamily(n) => rep.push(format!("{name}: NS-cofamily coaxioms"), &validate_ns_cofamily(n)),
        Object::Deformation { value, .. } => deform_family(value, req.order, rep)?,
        Object::NsDeformation { value, .. } => deform_ns(value, req.order, rep)?,
    }
    Ok(())
}

fn validate_family(ws: &Workspace, name: &str, f: &FamilyObject, rep: &mut CommandReport) -> Result<()> {
    let s = ws.semigroup(&f.semigroup)?;
    let a = ws.algebra(&f.algebra)?;
    rep.push(format!("{}: semigroup associativity", f.semigroup), &s.validate().report);
    rep.push(format!("{}: associativity and unit", f.algebra), &a.validate());
    let m = match &f.bimodule {
        Some(mn) => {
            let m = ws.bimodule(mn)?;
            rep.push(format!("{mn}: bimodule axioms"), &m.validate(a)?);
            Some(m)
        }
        None => None,
    };
    let h = match &f.cocycle {
        Some(hn) => {
            let h = ws.cocycle(hn)?;
            let m = m.ok_or_else(|| Error::Invalid("a cocycle needs a named bimodule".into()))?;
            rep.push(format!("{hn}: Hochschild 2-cocycle"), &h.validate(a, m)?);
            Some(h)
        }
        None => None,
    };
    let r = check_family(&f.kind, &f.value, a, m, h)?;
    rep.push(format!("{name}: {} family identity", f.kind.tag()), &r);
    Ok(())
}

// ---------------------------------------------------------------------------
// construct

fn arg<'a>(req: &'a CommandRequest, i: usize, recipe: &str) -> Result<&'a str> {
    req.args
        .get(i)
        .map(String::as_str)
        .ok_or_else(|| Error::Invalid(format!("recipe '{recipe}' needs argument {}", i + 1)))
}

fn fresh(ws: &Workspace, base: &str) -> String {
    if ws.get(base).is_err() {
        return base.to_string();
    }
    (2..).map(|i| format!("{base}#{i}")).find(|n| ws.get(n).is_err()).expect("unbounded")
}

/// Stores a twisted context as semigroup, algebra, bimodule, cocycle and family objects.
fn store_context(
    ws: &mut Workspace,
    base: &str,
    ctx: TwistedContext,
    kind: Option<FamilyKind>,
    created: &mut Vec<String>,
) -> Result<()> {
    let sg = fresh(ws, &format!("{base}.semigroup"));
    ws.insert(&sg, Object::Semigroup(ctx.semigroup().clone()))?;
    let an = fresh(ws, &format!("{base}.algebra"));
    ws.insert(&an, Object::Algebra(ctx.algebra.clone()))?;
    let mn = fresh(ws, &format!("{base}.bimodule"));
    ws.insert(&mn, Object::Bimodule { algebra: an.clone(), value: ctx.bimodule.clone() })?;
    created.extend([sg.clone(), an.clone(), mn.clone()]);
    let hn = match &ctx.cocycle {
        Some(h) => {
            let hn = fresh(ws, &format!("{base}.cocycle"));
            ws.insert(&hn, Object::Cocycle { algebra: an.clone(), bimodule: mn.clone(), value: h.clone() })?;
            created.push(hn.clone());
            Some(hn)
        }
        None => None,
    };
    let kind = kind.unwrap_or(if hn.is_some() { FamilyKind::TwistedOOperator } else { FamilyKind::OOperator });
    let fname = fresh(ws, base);
    ws.insert(
        &fname,
        Object::Family(FamilyObject {
            kind,
            semigroup: sg,
            algebra: an,
            bimodule: Some(mn),
            cocycle: hn,
            value: ctx.family,
        }),
    )?;
    created.push(fname);
    Ok(())
}

fn store_family(
    ws: &mut Workspace,
    name: &str,
    kind: FamilyKind,
    src: &FamilyObject,
    value: OperatorFamily,
    created: &mut Vec<String>,
) -> Result<()> {
    let obj = FamilyObject {
        kind,
        semigroup: src.semigroup.clone(),
        algebra: src.algebra.clone(),
        bimodule: None,
        cocycle: None,
        value,
    };
    ws.insert(name, Object::Family(obj))?;
    created.push(name.to_string());
    Ok(())
}

fn ns_source_family(ws: &Workspace, f: &FamilyObject) -> Result<crate::family_algebras::NsFamily> {
    let a = ws.algebra(&f.algebra)?;
    match &f.kind {
        FamilyKind::Nijenhuis => induce_ns_family(NsSource::Nijenhuis { n: &f.value, a }),
        FamilyKind::WeightedRb(l) => induce_ns_family(NsSource::WeightedRb { r: &f.value, a, lambda: l }),
        _ => {
            let ctx = ws.family_context(f)?;
            induce_ns_family(NsSource::from_context(&ctx))
        }
    }
}

pub fn cmd_construct(ws: &mut Workspace, req: &CommandRequest) -> Result<CommandReport> {
    let recipe = required(&req.recipe, "recipe", "construct")?.to_string();
    let name = match &req.name {
        Some(n) => {
            if ws.get(n).is_ok() {
                return Err(Error::Invalid(format!("name '{n}' is already taken")));
            }
            n.clone()
        }
        None => fresh(ws, &format!("{recipe}({})", req.args.join(","))),
    };
    for a in &req.args {
        ws.get(a)?;
    }
    let mut rep = CommandReport::new(req);
    let mut created = Vec::new();
    let outcome = construct(ws, req, &recipe, &name, &mut rep, &mut created);
    rep.created = created;
    rep.absorb(outcome);
    Ok(rep)
}

fn construct(
    ws: &mut Workspace,
    req: &CommandRequest,
    recipe: &str,
    name: &str,
    rep: &mut CommandReport,
    created: &mut Vec<String>,
) -> Result<()> {
    let a0 = || arg(req, 0, recipe);
    match recipe {
        "semidirect" => {
            let mn = a0()?;
            let Object::Bimodule { algebra, value } = ws.get(mn)? else {
                return Err(Error::Invalid(format!("'{mn}' is not a bimodule")));
            };
            let a = ws.algebra(algebra)?;
            let h = req.args.get(1).map(|h| ws.cocycle(h)).transpose()?;
            let out = semidirect_product(a, value, h)?;
            rep.push(format!("{name}: associativity and unit"), &out.validate());
            ws.insert(name, Object::Algebra(out))?;
            created.push(name.to_string());
        }
        "extend" => {
            let a = ws.algebra(a0()?)?;
            let s = ws.semigroup(arg(req, 1, recipe)?)?;
            let (out, _) = extend_by_semigroup(a, None, s)?;
            rep.push(format!("{name}: associativity and unit"), &out.validate());
            ws.insert(name, Object::Algebra(out))?;
            created.push(name.to_string());
        }
        "induce-ns" => {
            let src = a0()?;
            let ns = match ws.get(src)? {
                Object::Family(f) => ns_source_family(ws, f)?,
                Object::Tridendriform(t) => induce_ns_family(NsSource::Tridendriform(t))?,
                other => return Err(Error::Invalid(format!("cannot induce an NS-family from a {}", other.kind()))),
            };
            rep.push(format!("{name}: NS-family axioms"), &validate_ns_family(&ns));
            ws.insert(name, Object::Ns(ns))?;
            created.push(name.to_string());
        }
        "collapse" => {
            let f = ws.family(a0()?)?.clone();
            let ctx = ws.family_context(&f)?;
            let s = ctx.semigroup().clone();
            let t = collapse_family(&ctx.family, &ctx.algebra, &ctx.bimodule, ctx.cocycle.as_ref(), &s)?;
            let (ea, em) = extend_by_semigroup(&ctx.algebra, Some(&ctx.bimodule), &s)?;
            let eh = ctx.cocycle.as_ref().map(|h| cocycle_extension(h, &s));
            let single = TwistedContext::new(
                ea,
                em.expect("module requested"),
                eh,
                OperatorFamily::new(FiniteSemigroup::trivial(), vec![t])?,
            )?;
            rep.push(format!("{name}: collapsed operator identity"), &single.check());
            store_context(ws, name, single, None, created)?;
        }
        "lift" => {
            let f = ws.family(a0()?)?.clone();
            let a = ws.algebra(&f.algebra)?;
            let m = ws.family_bimodule(&f)?;
            let (big, lifted) = lifted_context(&f.value, a, &m)?;
            let an = fresh(ws, &format!("{name}.algebra"));
            rep.push(format!("{an}: associativity and unit"), &big.validate());
            let r = check_family(&FamilyKind::RotaBaxter, &lifted, &big, None, None)?;
            rep.push(format!("{name}: lifted Rota-Baxter family identity"), &r);
            ws.insert(&an, Object::Algebra(big))?;
            created.push(an.clone());
            let obj = FamilyObject {
                kind: FamilyKind::RotaBaxter,
                semigroup: f.semigroup.clone(),
                algebra: an,
                bimodule: None,
                cocycle: None,
                value: lifted,
            };
            ws.insert(name, Object::Family(obj))?;
            created.push(name.to_string());
        }
        "reynolds-from-derivation" => {
            let f = ws.family(a0()?)?.clone();
            let a = ws.algebra(&f.algebra)?;
            let bound = req.nil_bound.unwrap_or(a.dim() + 1);
            let r = reynolds_from_nilpotent_derivation(&f.value, a, bound)?;
            rep.push(format!("{name}: reynolds family identity"), &check_family(&FamilyKind::Reynolds, &r, a, None, None)?);
            store_family(ws, name, FamilyKind::Reynolds, &f, r, created)?;
        }
        "derivation-from-reynolds" => {
            let f = ws.family(a0()?)?.clone();
            let a = ws.algebra(&f.algebra)?;
            let d = derivation_from_invertible_reynolds(&f.value, a)?;
            rep.push(
                format!("{name}: derivation family identity"),
                &check_family(&FamilyKind::Derivation, &d, a, None, None)?,
            );
            store_family(ws, name, FamilyKind::Derivation, &f, d, created)?;
        }
        "tridendriform-from-weighted-rb" => {
            let f = ws.family(a0()?)?.clone();
            let FamilyKind::WeightedRb(l) = &f.kind else {
                return Err(Error::Invalid("needs a weighted_rb family".into()));
            };
            let t = tridendriform_from_weighted_rb(&f.value, ws.algebra(&f.algebra)?, l)?;
            rep.push(format!("{name}: tridendriform family axioms"), &validate_tridendriform_family(&t));
            ws.insert(name, Object::Tridendriform(t))?;
            created.push(name.to_string());
        }
        "rb-from-aybf1" | "o-from-aybf2" => {
            let src = a0()?;
            let Object::TensorFamily { algebra, value, .. } = ws.get(src)? else {
                return Err(Error::Invalid(format!("'{src}' is not a tensor family")));
            };
            let (algebra, value) = (algebra.clone(), value.clone());
            let a = ws.algebra(&algebra)?.clone();
            let sg = ws
                .objects()
                .iter()
                .find_map(|(n, o)| matches!(o, Object::Semigroup(s) if s == value.semigroup()).then(|| n.clone()));
            let sg = match sg {
                Some(n) => n,
                None => {
                    let n = fresh(ws, &format!("{name}.semigroup"));
                    ws.insert(&n, Object::Semigroup(value.semigroup().clone()))?;
                    created.push(n.clone());
                    n
                }
            };
            let (kind, fam, bimodule) = if recipe == "rb-from-aybf1" {
                (FamilyKind::RotaBaxter, rb_family_from_aybf1(&value, &a)?, None)
            } else {
                let fam = o_family_from_aybf2(&value, &a)?;
                let mn = fresh(ws, &format!("{name}.bimodule"));
                ws.insert(&mn, Object::Bimodule { algebra: algebra.clone(), value: coadjoint_bimodule(&a) })?;
                created.push(mn.clone());
                (FamilyKind::OOperator, fam, Some(mn))
            };
            let m = bimodule.as_deref().map(|b| ws.bimodule(b)).transpose()?;
            rep.push(format!("{name}: {} family identity", kind.tag()), &check_family(&kind, &fam, &a, m, None)?);
            let obj = FamilyObject { kind, semigroup: sg, algebra, bimodule, cocycle: None, value: fam };
            ws.insert(name, Object::Family(obj))?;
            created.push(name.to_string());
        }
        "tot" => {
            let ns = ws.ns_family(a0()?)?;
            let ctx = tot_context(&ns)?;
            rep.push(format!("{name}: Id family identity"), &ctx.check());
            store_context(ws, name, ctx, None, created)?;
        }
        "dualize" => {
            let co = ws.co_context(a0()?)?;
            let (t, a, m, h) = dualize_cofamily(&co.cofamily, &co.coalgebra, &co.cobimodule, co.cocycle.as_ref())?;
            let ctx = TwistedContext::new(a, m, Some(h), t)?;
            rep.push(format!("{name}: dual twisted O-operator family"), &ctx.check());
            store_context(ws, name, ctx, Some(FamilyKind::TwistedOOperator), created)?;
        }
        "codualize" => {
            let f = ws.family(a0()?)?.clone();
            let ctx = ws.family_context(&f)?;
            let co = CoContext::dual_of(&ctx);
            rep.push(format!("{name}: twisted O-operator cofamily"), &co.check()?);
            store_co_context(ws, name, co, created)?;
        }
        "induce-ns-co" => {
            let co = ws.co_context(a0()?)?;
            let ns = induce_ns_cofamily(&co.cofamily, &co.coalgebra, &co.cobimodule, co.cocycle.as_ref())?;
            rep.push(format!("{name}: NS-cofamily coaxioms"), &validate_ns_cofamily(&ns));
            ws.insert(name, Object::NsCofamily(ns))?;
            created.push(name.to_string());
        }
        other => return Err(Error::Invalid(format!("unknown recipe '{other}'"))),
    }
    Ok(())
}

fn store_co_context(ws: &mut Workspace, base: &str, co: CoContext, created: &mut Vec<String>) -> Result<()> {
    let sg = fresh(ws, &format!("{base}.semigroup"));
    ws.insert(&sg, Object::Semigroup(co.cofamily.semigroup().clone()))?;
    let cn = fresh(ws, &format!("{base}.coalgebra"));
    ws.insert(&cn, Object::Coalgebra(co.coalgebra))?;
    let nn = fresh(ws, &format!("{base}.cobimodule"));
    ws.insert(&nn, Object::Cobimodule { coalgebra: cn.clone(), value: co.cobimodule })?;
    created.extend([sg, cn.clone(), nn.clone()]);
    let hn = match co.cocycle {
        Some(h) => {
            let hn = fresh(ws, &format!("{base}.cocycle"));
            ws.insert(&hn, Object::CoCocycle { coalgebra: cn.clone(), cobimodule: nn.clone(), value: h })?;
            created.push(hn.clone());
            Some(hn)
        }
        None => None,
    };
    let fname = fresh(ws, base);
    ws.insert(&fname, Object::CoFamily { coalgebra: cn, cobimodule: nn, cocycle: hn, value: co.cofamily })?;
    created.push(fname);
    Ok(())
}

// ---------------------------------------------------------------------------
// cohomology

fn descriptor(ws: &Workspace, name: &str) -> Result<ComplexDescriptor> {
    match ws.get(name)? {
        Object::Family(f) => Ok(ComplexDescriptor::TwOoperf(ws.family_context(f)?)),
        Object::Ns(n) => Ok(ComplexDescriptor::NsFam(n.clone())),
        Object::Dendriform(d) => Ok(ComplexDescriptor::DendFam(d.clone())),
        other => Err(Error::Invalid(format!("no cochain complex is attached to a {}", other.kind()))),
    }
}

pub fn cmd_cohomology(ws: &Workspace, req: &CommandRequest) -> Result<CommandReport> {
    let name = required(&req.object, "object", "cohomology")?;
    let desc = descriptor(ws, name)?;
    let n_max = req.n_max.unwrap_or(2);
    let seed = req.seed.unwrap_or(0);
    let mut rep = CommandReport::new(req);
    let outcome = (|| -> Result<()> {
        let rows = cohomology_dimensions(&desc, n_max)?;
        for r in &rows {
            let ok = r.dim_cocycles + r.rank_delta == r.dim_cochains && r.dim_coboundaries <= r.dim_cocycles;
            rep.verdicts.push(Verdict::flag(format!("rank-nullity in degree {}", r.degree), ok));
        }
        let start = desc.start_degree();
        rep.cohomology = Some(CohomologyTable { complex: desc.tag().to_string(), start_degree: start, rows });
        for n in start..=n_max.saturating_sub(1).max(start) {
            let r = verify_dsquared_zero(&desc, n, DSQUARED_TRIALS, seed)?;
            rep.push(format!("δ∘δ = 0 from degree {n}"), &r);
        }
        Ok(())
    })();
    rep.absorb(outcome);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// deform

fn push_orders(rep: &mut CommandReport, what: &str, orders: &OrderReports) {
    for (n, r) in orders.orders.iter().enumerate() {
        rep.push(format!("{what} identity at order {n}"), r);
    }
}

fn deform_family(d: &TruncatedFamilyDeformation, order: Option<usize>, rep: &mut CommandReport) -> Result<()> {
    let n = order.unwrap_or(d.order()).min(d.order());
    let d = TruncatedFamilyDeformation::new(d.context().clone(), d.terms()[..=n].to_vec())?;
    let orders = check_family_deformation(&d)?;
    push_orders(rep, "deformed family", &orders);
    if n >= 1 && orders.passed_through(1) {
        rep.verdicts.push(Verdict::flag("order-1 term is a cocycle", infinitesimal_cocycle_check(&d)?));
    }
    Ok(())
}

fn deform_ns(d: &TruncatedNSDeformation, order: Option<usize>, rep: &mut CommandReport) -> Result<()> {
    let n = order.unwrap_or(d.order()).min(d.order());
    let d = TruncatedNSDeformation::new(d.terms()[..=n].to_vec())?;
    let orders = check_ns_deformation(&d)?;
    push_orders(rep, "deformed NS-family", &orders);
    if n >= 1 && orders.passed_through(1) {
        rep.verdicts.push(Verdict::flag("order-1 term is a cocycle", infinitesimal_ns_cocycle_check(&d)?));
    }
    Ok(())
}

/// Checks a stored deformation order by order. For a family or NS-family
/// object, reports the cohomology through degree 2: degree 1 (or 2 for
/// NS-families) classifies infinitesimal deformations up to equivalence.
pub fn cmd_deform(ws: &Workspace, req: &CommandRequest) -> Result<CommandReport> {
    let name = required(&req.object, "object", "deform")?;
    let obj = ws.get(name)?;
    let mut rep = CommandReport::new(req);
    let outcome = match obj {
        Object::Deformation { value, .. } => deform_family(value, req.order, &mut rep),
        Object::NsDeformation { value, .. } => deform_ns(value, req.order, &mut rep),
        Object::Family(_) | Object::Ns(_) | Object::Dendriform(_) => {
            let desc = descriptor(ws, name)?;
            let top = if matches!(desc, ComplexDescriptor::TwOoperf(_)) { 2 } else { 3 };
            cohomology_dimensions(&desc, top).map(|rows| {
                rep.cohomology =
                    Some(CohomologyTable { complex: desc.tag().to_string(), start_degree: desc.start_degree(), rows });
            })
        }
        other => return Err(Error::Invalid(format!("cannot deform a {}", other.kind()))),
    };
    rep.absorb(outcome);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// search

pub fn cmd_search(ws: &Workspace, req: &CommandRequest) -> Result<CommandReport> {
    let tag = required(&req.target, "target", "search")?;
    let target = SearchTarget::from_tag(tag, req.lambda.clone())?;
    let s = ws.semigroup(required(&req.semigroup, "semigroup", "search")?)?;
    let a: &Algebra = ws.algebra(required(&req.algebra, "algebra", "search")?)?;
    let m = req.bimodule.as_deref().map(|b| ws.bimodule(b)).transpose()?;
    let h = req.cocycle.as_deref().map(|c| ws.cocycle(c)).transpose()?;
    let coeffs = req.coeffs.clone().unwrap_or_else(|| vec![Scalar::int(-1), Scalar::zero(), Scalar::one()]);
    let max_results = req.max_results.unwrap_or(usize::MAX);
    let bound = req.bound.unwrap_or(DEFAULT_SEARCH_BOUND);
    let space = SearchSpace { semigroup: s, algebra: a, bimodule: m, cocycle: h, coeffs: &coeffs };
    let mut rep = CommandReport::new(req);
    let outcome = (|| -> Result<()> {
        let out = search(&target, &space, max_results, bound)?;
        for (i, hit) in out.hits.iter().enumerate() {
            rep.push(format!("hit {i} re-passes the {tag} check"), &check_solution(&target, &space, hit)?);
            if let Solution::Tensors(r) = hit {
                match target {
                    SearchTarget::AybfType1 => {
                        let fam = rb_family_from_aybf1(r, a)?;
                        let chk = check_family(&FamilyKind::RotaBaxter, &fam, a, None, None)?;
                        rep.push(format!("hit {i} induces a Rota-Baxter family"), &chk);
                    }
                    SearchTarget::AybfType2 { .. } if is_skew_symmetric(r) => {
                        let fam = o_family_from_aybf2(r, a)?;
                        let chk = check_family(&FamilyKind::OOperator, &fam, a, Some(&coadjoint_bimodule(a)), None)?;
                        rep.push(format!("hit {i} induces an O-operator family on the coadjoint bimodule"), &chk);
                    }
                    _ => {}
                }
            }
        }
        let hits = out
            .hits
            .iter()
            .map(|h| match h {
                Solution::Family(f) => f.maps().to_vec(),
                Solution::Tensors(r) => r.tensors().to_vec(),
            })
            .collect();
        rep.search = Some(SearchSummary {
            target: tag.to_string(),
            space_size: out.space_size,
            examined: out.examined,
            exhausted: out.exhausted,
            hits,
        });
        Ok(())
    })();
    rep.absorb(outcome);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CORPUS: &str = r#"{
        "semigroups": {"one": {"builtin": "trivial"}, "z2": {"builtin": "cyclic", "n": 2}},
        "algebras": {"k": {"builtin": "field"}, "D": {"builtin": "dual_numbers"}},
        "bimodules": {"Dadj": {"algebra": "D", "builtin": "adjoint"}},
        "cocycles": {"Dmu": {"algebra": "D", "bimodule": "Dadj", "builtin": "multiplication", "scale": "-1"}},
        "families": {
            "idk": {"kind": "rota_baxter", "semigroup": "one", "algebra": "k", "builtin": "identity"},
            "zero": {"kind": "twisted_o_operator", "semigroup": "z2", "algebra": "D", "bimodule": "Dadj",
                     "cocycle": "Dmu", "builtin": "zero"},
            "N": {"kind": "nijenhuis", "semigroup": "z2", "algebra": "D", "builtin": "identity"},
            "der": {"kind": "derivation", "semigroup": "one", "algebra": "D", "constant": [["1", "0"], ["0", "1"]]}
        }
    }"#;

    fn ws() -> Workspace {
        Workspace::from_json_str(CORPUS).unwrap()
    }

    fn req(cmd: &str) -> CommandRequest {
        CommandRequest { cmd: cmd.into(), ..Default::default() }
    }

    #[test]
    fn identity_on_the_field_is_not_rota_baxter() {
        let w = ws();
        let r = cmd_validate(&w, &CommandRequest { object: Some("idk".into()), ..req("validate") }).unwrap();
        assert!(!r.passed());
        let w = r.verdicts.last().unwrap().witness.clone().unwrap();
        assert_eq!((w.elements, w.basis), (vec![0, 0], vec![0, 0]));
    }

    #[test]
    fn nijenhuis_identity_passes() {
        let w = ws();
        let r = cmd_validate(&w, &CommandRequest { object: Some("N".into()), ..req("validate") }).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn unknown_object_is_an_error() {
        let w = ws();
        let e = cmd_validate(&w, &CommandRequest { object: Some("nope".into()), ..req("validate") }).unwrap_err();
        assert_eq!(e, Error::UnknownObject("nope".into()));
    }

    #[test]
    fn constructions_store_validated_objects() {
        let mut w = ws();
        let c = CommandRequest { recipe: Some("semidirect".into()), args: vec!["Dadj".into()], name: Some("DxD".into()), ..req("construct") };
        let r = cmd_construct(&mut w, &c).unwrap();
        assert!(r.passed());
        assert_eq!(w.algebra("DxD").unwrap().dim(), 4);
        let c = CommandRequest { recipe: Some("induce-ns".into()), args: vec!["N".into()], name: Some("nsN".into()), ..req("construct") };
        assert!(cmd_construct(&mut w, &c).unwrap().passed());
        assert!(matches!(w.get("nsN").unwrap(), Object::Ns(_)));
        let c = CommandRequest { recipe: Some("reynolds-from-derivation".into()), args: vec!["der".into()], ..req("construct") };
        let r = cmd_construct(&mut w, &c).unwrap();
        assert!(!r.passed());
        assert!(r.error.is_some());
    }

    #[test]
    fn cohomology_of_the_one_dimensional_zero_context() {
        let text = r#"{
            "semigroups": {"one": {"builtin": "trivial"}},
            "algebras": {"k": {"builtin": "field"}},
            "families": {"T": {"kind": "rota_baxter", "semigroup": "one", "algebra": "k", "builtin": "zero"}}
        }"#;
        let w = Workspace::from_json_str(text).unwrap();
        let r = cmd_cohomology(&w, &CommandRequest { object: Some("T".into()), n_max: Some(3), ..req("cohomology") }).unwrap();
        assert!(r.passed());
        let dims: Vec<usize> = r.cohomology.unwrap().rows.iter().map(|x| x.dim_cohomology).collect();
        assert_eq!(dims, vec![1, 1, 1, 1]);
    }

    #[test]
    fn search_reports_are_deterministic() {
        let w = ws();
        let c = CommandRequest {
            target: Some("rota_baxter".into()),
            semigroup: Some("one".into()),
            algebra: Some("k".into()),
            coeffs: Some(vec![Scalar::zero(), Scalar::one()]),
            ..req("search")
        };
        let a = cmd_search(&w, &c).unwrap();
        let b = cmd_search(&w, &c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.search.as_ref().unwrap().hits, vec![vec![Matrix::zeros(1, 1)]]);
    }
}
