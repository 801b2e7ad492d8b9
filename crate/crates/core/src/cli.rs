//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::decompose::{self, Decomposition, Options};
use crate::error::{Error, Result};
use crate::galg::{self, LinearCharacter};
use crate::group_spec;
use crate::grp::{self, FiniteGroup, Subgroup, SUBGROUP_LATTICE_BOUND};
use crate::report::{self, Expected, Report};
use crate::schur::NormLimits;
use crate::shoda::{self, ShodaFailure};
use crate::simple::{self, Generalized};

#[derive(Parser, Debug)]
#[command(name = "wedderburn", version, about = "Wedderburn decomposition of rational group algebras via Shoda pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose QG into simple components.
    Decompose(Common),
    /// List representatives of the Shoda-pair classes.
    Pairs(Common),
    /// Strong inductive chain for one pair.
    Chain(PairArgs),
    /// Component report for one pair.
    Component(PairArgs),
    /// Run the invariant checks and print one line per check.
    Verify(VerifyArgs),
    /// Staged power trace for one pair.
    PowerTrace(PairArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Group spec (JSON).
    pub spec: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Refuse groups with more elements.
    #[arg(long, default_value_t = 2000)]
    pub max_order: usize,
    /// Largest numerator in norm-witness coordinates. Denominators are bounded by 2, since the
    /// witnesses that occur in practice are algebraic integers or halves of them.
    #[arg(long, default_value_t = 4)]
    pub height: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Recompute strong components along their chains and check cocycles.
    #[arg(long)]
    pub debug_checks: bool,
    /// Include full idempotents, twisting tables and stage traces.
    #[arg(long)]
    pub full: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    #[command(flatten)]
    pub common: Common,
    /// Generators of H as comma-separated words.
    #[arg(long)]
    pub h: String,
    /// Generators of K as comma-separated words; `e` for the trivial subgroup.
    #[arg(long)]
    pub k: String,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Component sizes claimed elsewhere, as {"components":[{"text":..,"dim_over_q":..}]}.
    #[arg(long)]
    pub expect: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            limits: NormLimits { height: self.height, ..NormLimits::default() },
            jobs: self.jobs,
            debug_checks: self.debug_checks,
            full_scan: false,
        }
    }

    fn load(&self) -> Result<FiniteGroup> {
        if self.max_order == 0 || self.height == 0 || self.jobs == 0 {
            return Err(Error::InvalidSpec("--max-order, --height and --jobs must be positive".into()));
        }
        let text = std::fs::read_to_string(&self.spec)
            .map_err(|e| Error::InvalidSpec(format!("cannot read {}: {e}", self.spec.display())))?;
        group_spec::load_group(&text, self.max_order)
    }
}

fn parse_subgroup(g: &FiniteGroup, s: &str) -> Result<Subgroup> {
    let words: Vec<usize> = s.split(',').map(str::trim).filter(|w| !w.is_empty()).map(|w| g.parse_word(w)).collect::<Result<_>>()?;
    Ok(grp::subgroup_generated(g, &words))
}

fn emit(common: &Common, out: &mut dyn Write, text: &str) -> Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(t: &T) -> String {
    let mut s = serde_json::to_string_pretty(t).unwrap();
    s.push('\n');
    s
}

/// Parse arguments, run, and return the exit code: 0 complete, 2 incomplete, 1 error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn exit_code(report: &Report) -> i32 {
    if report.audit.complete {
        0
    } else {
        2
    }
}

fn check_dims(dec: &Decomposition) -> Result<()> {
    if dec.complete && dec.sum_dim() != dec.order as u64 {
        let dims: Vec<String> = dec.components.iter().map(|c| c.descriptor.dim_over_q().to_string()).collect();
        return Err(Error::Invariant(format!("dimension audit failed: {} != {} (components {})", dims.join(" + "), dec.order, dec.sum_dim())));
    }
    Ok(())
}

fn render(common: &Common, report: &Report) -> String {
    match common.format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Text => report::pretty(&report.to_text()),
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Decompose(c) => {
            let g = c.load()?;
            let dec = decompose::decompose(&g, &c.options())?;
            check_dims(&dec)?;
            let report = report::build_report(&g, &dec, c.full);
            emit(c, out, &render(c, &report))?;
            Ok(exit_code(&report))
        }
        Command::Pairs(c) => {
            let g = c.load()?;
            let subs = grp::all_subgroups(&g, SUBGROUP_LATTICE_BOUND)?;
            let en = shoda::enumerate_shoda_pairs(&g, &subs, false)?;
            let rows: Vec<PairRow> = en
                .classes
                .iter()
                .map(|cl| PairRow {
                    h: report::SubgroupRef::new(&g, &cl.h),
                    k: report::SubgroupRef::new(&g, &cl.k),
                    strong: cl.strong,
                    degree: cl.degree,
                    field: cl.field.clone(),
                    field_name: cl.field.describe(),
                    pci_digest: cl.pci.digest(),
                })
                .collect();
            let listing = PairListing { classes: rows, complete: en.complete };
            let text = match c.format {
                Format::Json => to_json(&listing),
                Format::Text => {
                    let mut s = String::new();
                    for (i, r) in listing.classes.iter().enumerate() {
                        s += &format!(
                            "[{}] H={} K={} degree {} field {}{}\n",
                            i + 1,
                            r.h.describe(),
                            r.k.describe(),
                            r.degree,
                            r.field_name,
                            if r.strong { " strong" } else { "" }
                        );
                    }
                    s += if listing.complete { "complete\n" } else { "incomplete\n" };
                    report::pretty(&s)
                }
            };
            emit(c, out, &text)?;
            Ok(if listing.complete { 0 } else { 2 })
        }
        Command::Chain(p) => {
            let (g, h, k, subs) = load_pair(p)?;
            let strong = shoda::is_strong_shoda_pair(&g, &h, &k)?;
            let chain = shoda::find_strong_inductive_chain(&g, &h, &k, &subs)?;
            let cert = shoda::certificate(&g, &h, &k, strong, &chain, p.common.full);
            emit(&p.common, out, &to_json(&cert))?;
            Ok(0)
        }
        Command::Component(p) => {
            let (g, h, k, subs) = load_pair(p)?;
            let comp = decompose::component(&g, &h, &k, &subs, &p.common.options())?;
            let rep = report::component_report(&g, &comp, p.common.full);
            emit(&p.common, out, &to_json(&rep))?;
            Ok(0)
        }
        Command::PowerTrace(p) => {
            let (g, h, k, subs) = load_pair(p)?;
            let chain = shoda::find_strong_inductive_chain(&g, &h, &k, &subs)?;
            let lam = LinearCharacter::new(&g, &h, &k)?;
            let gen = Generalized::new(&g, lam, chain)?;
            let Some((cf, staged)) = gen.cyclic_form()? else {
                return Err(Error::Invariant("Gal(E/F) is not cyclic; no power to trace".into()));
            };
            let trace = PowerTrace {
                sigma: cf.sigma,
                generator: cf.generator.clone(),
                a: cf.a.clone(),
                power: staged.as_ref().map(|s| s.power),
                stages: staged
                    .as_ref()
                    .map(|s| {
                        s.stages
                            .iter()
                            .map(|st| TraceStage {
                                level: st.level,
                                d: st.d,
                                s: g.label(st.s),
                                a: g.label(st.a),
                                y: st.y.display(&g),
                                b: st.b.display(&g),
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
                staged_equals_direct: staged.is_some(),
            };
            emit(&p.common, out, &to_json(&trace))?;
            Ok(0)
        }
        Command::Verify(v) => verify(v, out, err),
    }
}

fn load_pair(p: &PairArgs) -> Result<(FiniteGroup, Subgroup, Subgroup, Vec<Subgroup>)> {
    let g = p.common.load()?;
    let h = parse_subgroup(&g, &p.h)?;
    let k = parse_subgroup(&g, &p.k)?;
    match shoda::is_shoda_pair(&g, &h, &k) {
        Ok(()) => {}
        Err(ShodaFailure::Condition1(m)) => return Err(Error::NotShoda(m)),
        Err(ShodaFailure::Witness(x)) => {
            return Err(Error::NotShoda(format!("g = {} lies outside H, yet every commutator [h,g] with h in H that lies in H also lies in K", g.label(x))));
        }
    }
    let subs = grp::all_subgroups(&g, SUBGROUP_LATTICE_BOUND)?;
    Ok((g, h, k, subs))
}

#[derive(Serialize)]
struct PairRow {
    h: report::SubgroupRef,
    k: report::SubgroupRef,
    strong: bool,
    degree: usize,
    field: crate::cyclo::FixedFieldSpec,
    field_name: String,
    pci_digest: String,
}

#[derive(Serialize)]
struct PairListing {
    classes: Vec<PairRow>,
    complete: bool,
}

#[derive(Serialize)]
struct TraceStage {
    level: usize,
    d: usize,
    s: String,
    a: String,
    y: String,
    b: String,
}

#[derive(Serialize)]
struct PowerTrace {
    sigma: u64,
    generator: String,
    a: crate::cyclo::CycloNumber,
    power: Option<u64>,
    stages: Vec<TraceStage>,
    staged_equals_direct: bool,
}

fn verify(v: &VerifyArgs, out: &mut dyn Write, _err: &mut dyn Write) -> Result<i32> {
    let c = &v.common;
    let g = c.load()?;
    let mut opts = c.options();
    opts.debug_checks = true;
    let mut lines: Vec<(bool, String)> = Vec::new();
    let dec = decompose::decompose(&g, &opts)?;
    let whole = Subgroup::whole(&g);
    let pcis: Vec<&galg::AlgElement> = dec.components.iter().map(|c| &c.chain.top_pci).collect();
    lines.push((
        pcis.iter().all(|e| galg::is_idempotent(&g, e) && galg::is_central(&g, e, &whole)),
        "every primitive central idempotent is a central idempotent".into(),
    ));
    let orth = (0..pcis.len()).all(|i| (i + 1..pcis.len()).all(|j| galg::are_orthogonal(&g, pcis[i], pcis[j])));
    lines.push((orth, "idempotents are pairwise orthogonal".into()));
    lines.push((dec.complete, "idempotents sum to 1".into()));
    let cocycle = dec.components.iter().all(|c| c.descriptor.check_cocycle());
    lines.push((cocycle, "twisting satisfies the cocycle identity".into()));
    let degrees = dec.components.iter().all(|c| {
        let prod: usize = c.chain.levels.iter().map(|l| l.c.order() / l.h.order()).product();
        prod as u64 == c.descriptor.relative_degree()
    });
    lines.push((degrees, "[E:F] equals the product of |C_i/H_i|".into()));
    let staged = dec.components.iter().all(|c| c.strong || c.cyclic.is_none() || c.chain.len() < 2 || c.staged.is_some());
    lines.push((staged, "staged power equals the direct power".into()));
    let schur_ok = dec.components.iter().all(|c| {
        let prod: u64 = c.chain.levels.iter().map(|l| (l.c.order() / l.h.order()) as u64).product::<u64>().max(c.descriptor.relative_degree());
        c.schur.upper % c.schur.lower == 0 && prod.is_multiple_of(c.schur.upper)
    });
    lines.push((schur_ok, "Schur bounds: lower divides upper divides [E:F]".into()));
    let strong_ok = dec.components.iter().filter(|c| c.strong).all(|c| {
        simple::strong_component(&g, &LinearCharacter::new(&g, &c.h, &c.k).unwrap()).is_ok_and(|s| s.descriptor == c.descriptor)
    });
    lines.push((strong_ok, "strong pairs agree with their length-1 chains".into()));
    let report = report::build_report(&g, &dec, false);
    lines.push((report.audit.sum_dim == report.audit.group_order, format!("dimension audit: {} of {}", report.audit.sum_dim, report.audit.group_order)));
    let again = report::build_report(&g, &decompose::decompose(&g, &opts)?, false);
    lines.push((again.to_json() == report.to_json(), "report is deterministic".into()));
    let round = Report::from_json(&report.to_json())?;
    lines.push((round == report, "report round-trips through JSON".into()));
    let mut text = String::new();
    for (ok, what) in &lines {
        text += &format!("{} {what}\n", if *ok { "PASS" } else { "FAIL" });
    }
    for (i, comp) in report.components.iter().enumerate() {
        let form = comp.reduced_form.as_ref().map_or("undetermined", |r| r.text.as_str());
        text += &format!("component {}: {form} (dim {})\n", i + 1, comp.dim_over_q);
    }
    if let Some(path) = &v.expect {
        let expected: Expected = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        for n in report::compare_expected(&report, &expected) {
            text += &format!("note: {n}\n");
        }
    }
    emit(c, out, &report::pretty(&text))?;
    if lines.iter().any(|(ok, _)| !ok) {
        return Ok(if dec.complete { 1 } else { 2 });
    }
    Ok(0)
}
