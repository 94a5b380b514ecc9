//! `fquot-lab`: congruences, quotients, homomorphisms, formulas and
//! F-quotients of finite structures from the command line.
//!
//! Exit codes: 0 when the command succeeds and every check passes, 1 when
//! the answer is negative (not a congruence, a false formula, a theorem
//! defect), 2 for usage, IO and limit errors.

pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use fquot_core::congruence::{con_lattice_with, CongruenceError, Partition};
use fquot_core::folog::{
    is_quotient_safe, parse_formula, parse_formula_with_warnings, preservation_check_with,
    to_pcnf, Assignment, Compiled, FormulaError, Theory,
};
use fquot_core::fquot::{bounded_free_check, quo_poset_with, verify_quo_con_iso_with};
use fquot_core::hom::{check_strong_hom, enumerate_strong_homs_with, HomError, HomFilter};
use fquot_core::isothms::sweep;
use fquot_core::json::{structure_from_str, structure_to_json};
use fquot_core::limits::{Limits, DEFAULT_MAX_SEARCH, DEFAULT_MAX_UNIVERSE};
use fquot_core::model::{parse_element_set, ElementMap, FiniteStructure, Signature};
use fquot_core::quotient::{quotient_structure, QuotientError};

use report::*;

/// Parsed command line: one command plus the global flags.
#[derive(Parser, Debug)]
#[command(name = "fquot-lab", version, about = "Quotients and congruences of finite structures")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write a Graphviz Hasse diagram (con, fquot).
    #[arg(long, global = true, value_name = "FILE")]
    pub dot: Option<PathBuf>,
    /// Largest universe for which congruence lattices are built.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_MAX_UNIVERSE, value_parser = positive::<usize>)]
    pub max_universe: usize,
    /// Largest number of candidate maps a search may visit.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_MAX_SEARCH, value_parser = positive::<u128>)]
    pub max_search: u128,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a structure file is well formed.
    Validate { file: PathBuf },
    /// List the congruence lattice.
    Con { file: PathBuf },
    /// Build the quotient by a partition.
    Quotient {
        file: PathBuf,
        /// Blocks separated by `|`, e.g. "0 2 4 | 1 3 5".
        #[arg(long)]
        by: String,
        /// Write the quotient structure here instead of stdout.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Check or enumerate strong homomorphisms.
    Hom {
        #[command(subcommand)]
        command: HomCommand,
    },
    /// Run every isomorphism theorem on every instance drawn from a structure.
    IsoTheorems {
        file: PathBuf,
        /// Additional homomorphism targets.
        #[arg(long = "target", value_name = "FILE")]
        targets: Vec<PathBuf>,
    },
    /// Evaluate a formula.
    Eval {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// Value of a free variable, e.g. x=1.
        #[arg(long = "assign", value_name = "VAR=ELEM")]
        assign: Vec<String>,
    },
    /// Prenex conjunctive normal form of a formula or of a theory's axioms.
    Pcnf {
        /// A structure file (with --formula) or a theory file.
        file: PathBuf,
        #[arg(long)]
        formula: Option<String>,
    },
    /// Check that sentences survive every quotient.
    Preserve(PreserveArgs),
    /// The poset of F-quotients and its agreement with the congruence lattice.
    Fquot { file: PathBuf },
    /// Check freeness over a generating set against a finite list of targets.
    FreeCheck(FreeCheckArgs),
}

#[derive(Subcommand, Debug)]
pub enum HomCommand {
    /// Validate one map.
    Check {
        source: PathBuf,
        target: PathBuf,
        /// Comma-separated images, e.g. 0,1,0,1.
        #[arg(long)]
        map: String,
    },
    /// List every strong homomorphism.
    Enum {
        source: PathBuf,
        target: PathBuf,
        /// all, surjective or bijective.
        #[arg(long, default_value = "all")]
        filter: HomFilter,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "sentence")]
pub struct PreserveSource {
    #[arg(long)]
    formula: Option<String>,
    /// Theory file whose axioms are checked.
    #[arg(long, value_name = "FILE")]
    theory: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PreserveArgs {
    file: PathBuf,
    #[command(flatten)]
    source: PreserveSource,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "target_list")]
pub struct TargetSource {
    /// Structure files to test against.
    #[arg(long, num_args = 1.., value_name = "FILE")]
    targets: Vec<PathBuf>,
    /// Every structure of the signature with 1..=N elements.
    #[arg(long, value_name = "N", value_parser = positive::<usize>)]
    all_up_to: Option<usize>,
}

#[derive(Args, Debug)]
pub struct FreeCheckArgs {
    file: PathBuf,
    /// Generators, space separated, e.g. "1 2".
    #[arg(long = "x", value_name = "ELEMS", allow_hyphen_values = true)]
    generators: String,
    #[command(flatten)]
    targets: TargetSource,
}

fn positive<T>(s: &str) -> std::result::Result<T, String>
where
    T: std::str::FromStr + PartialOrd + From<u8>,
{
    match s.parse::<T>() {
        Ok(v) if v >= T::from(1) => Ok(v),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

/// Whether the command's answer was positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    Negative,
}

impl Outcome {
    fn from_bool(ok: bool) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Negative
        }
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let to_stdout = !e.use_stderr();
            let text = e.render().to_string();
            if to_stdout {
                let _ = out.write_all(text.as_bytes());
                return 0;
            }
            let _ = err.write_all(text.as_bytes());
            return 2;
        }
    };
    match execute(&cfg, out) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Negative) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

struct Ctx<'a> {
    cfg: &'a CliConfig,
    limits: Limits,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// Prints `report` as JSON under `--json`, otherwise the text.
    fn emit<R: Serialize>(&mut self, report: &R, text: &str) -> Result<()> {
        if self.cfg.json {
            let s = serde_json::to_string_pretty(report)?;
            writeln!(self.out, "{s}")?;
        } else {
            self.out.write_all(text.as_bytes())?;
        }
        Ok(())
    }

    fn write_dot(&self, dot: &str) -> Result<()> {
        if let Some(path) = &self.cfg.dot {
            std::fs::write(path, dot).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn execute(cfg: &CliConfig, out: &mut dyn Write) -> Result<Outcome> {
    let dot_ok = matches!(cfg.command, Command::Con { .. } | Command::Fquot { .. });
    if cfg.dot.is_some() && !dot_ok {
        bail!("--dot is only supported by `con` and `fquot`");
    }
    let limits = Limits {
        max_universe: cfg.max_universe,
        max_search: cfg.max_search,
        ..Limits::default()
    };
    let mut ctx = Ctx { cfg, limits, out };
    match &cfg.command {
        Command::Validate { file } => validate(&mut ctx, file),
        Command::Con { file } => con(&mut ctx, file),
        Command::Quotient { file, by, output } => quotient(&mut ctx, file, by, output.as_deref()),
        Command::Hom { command } => match command {
            HomCommand::Check {
                source,
                target,
                map,
            } => hom_check(&mut ctx, source, target, map),
            HomCommand::Enum {
                source,
                target,
                filter,
            } => hom_enum(&mut ctx, source, target, *filter),
        },
        Command::IsoTheorems { file, targets } => iso_theorems(&mut ctx, file, targets),
        Command::Eval {
            file,
            formula,
            assign,
        } => eval(&mut ctx, file, formula, assign),
        Command::Pcnf { file, formula } => pcnf(&mut ctx, file, formula.as_deref()),
        Command::Preserve(args) => preserve(&mut ctx, args),
        Command::Fquot { file } => fquot(&mut ctx, file),
        Command::FreeCheck(args) => free_check(&mut ctx, args),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> Result<Arc<FiniteStructure>> {
    let text = read(path)?;
    let m = structure_from_str(&text).with_context(|| format!("loading {}", path.display()))?;
    Ok(Arc::new(m))
}

/// The structure's own name, else the file stem.
fn display_name(m: &FiniteStructure, path: &Path) -> String {
    match m.name() {
        Some(n) => n.to_string(),
        None => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string()),
    }
}

fn symbols(list: &[fquot_core::model::Symbol]) -> Vec<SymbolInfo> {
    list.iter()
        .map(|s| SymbolInfo {
            name: s.name.clone(),
            arity: s.arity,
        })
        .collect()
}

fn symbol_line(list: &[SymbolInfo]) -> String {
    if list.is_empty() {
        return "(none)".to_string();
    }
    list.iter()
        .map(|s| format!("{}/{}", s.name, s.arity))
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_usize(xs: &[usize], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn validate(ctx: &mut Ctx, file: &Path) -> Result<Outcome> {
    let text = read(file)?;
    let shown = file.display().to_string();
    let (report, body) = match structure_from_str(&text) {
        Ok(m) => {
            let r = ValidateReport {
                file: shown.clone(),
                valid: true,
                error: None,
                name: Some(display_name(&m, file)),
                size: Some(m.size()),
                functions: symbols(m.signature().functions()),
                relations: symbols(m.signature().relations()),
            };
            let body = format!(
                "{shown}: valid\nstructure: {}\nuniverse: {} elements\nfunctions: {}\nrelations: {}\n",
                r.name.as_deref().unwrap_or_default(),
                m.size(),
                symbol_line(&r.functions),
                symbol_line(&r.relations),
            );
            (r, body)
        }
        Err(e) => {
            let body = format!("{shown}: invalid: {e}\n");
            (
                ValidateReport {
                    file: shown,
                    valid: false,
                    error: Some(e.to_string()),
                    name: None,
                    size: None,
                    functions: Vec::new(),
                    relations: Vec::new(),
                },
                body,
            )
        }
    };
    ctx.emit(&report, &body)?;
    Ok(Outcome::from_bool(report.valid))
}

fn con(ctx: &mut Ctx, file: &Path) -> Result<Outcome> {
    let m = load(file)?;
    let name = display_name(&m, file);
    let lat = con_lattice_with(&m, &ctx.limits)?;
    let report = ConReport {
        structure: name.clone(),
        size: m.size(),
        congruences: lat.elements().iter().map(|p| p.to_string()).collect(),
        covers: lat.covers(),
    };
    let mut text = format!("Con({name}): {} congruences\n", lat.len());
    for (i, p) in report.congruences.iter().enumerate() {
        let _ = writeln!(text, "  {i}: {p}");
    }
    text.push_str("Hasse edges:\n");
    for (lo, hi) in &report.covers {
        let _ = writeln!(text, "  {lo} -> {hi}");
    }
    ctx.write_dot(&lat.to_dot(&format!("Con({name})")))?;
    ctx.emit(&report, &text)?;
    Ok(Outcome::Pass)
}

fn quotient(ctx: &mut Ctx, file: &Path, by: &str, output: Option<&Path>) -> Result<Outcome> {
    let m = load(file)?;
    let name = display_name(&m, file);
    let theta = Partition::parse(m.size(), by).context("parsing --by")?;
    let mut report = QuotientReport {
        structure: name.clone(),
        congruence: theta.to_string(),
        is_congruence: false,
        violation: None,
        size: None,
        projection: None,
        quotient: None,
    };
    let q = match quotient_structure(&m, &theta) {
        Ok(q) => q,
        Err(QuotientError::Congruence(CongruenceError::NotACongruence(v))) => {
            report.violation = Some(v.to_string());
            let text = format!("{theta} is not a congruence of {name}: {v}\n");
            ctx.emit(&report, &text)?;
            return Ok(Outcome::Negative);
        }
        Err(e) => return Err(e.into()),
    };
    let json = structure_to_json(&q.structure);
    report.is_congruence = true;
    report.size = Some(q.structure.size());
    report.projection = Some(q.proj.images().to_vec());
    report.quotient = Some(json.clone());
    let mut text = format!(
        "{theta} is a congruence of {name}\nquotient: {} elements\nprojection: {}\n",
        q.structure.size(),
        join_usize(q.proj.images(), ","),
    );
    let pretty = serde_json::to_string_pretty(&json)?;
    match output {
        Some(path) => {
            std::fs::write(path, format!("{pretty}\n"))
                .with_context(|| format!("writing {}", path.display()))?;
            let _ = writeln!(text, "wrote {}", path.display());
        }
        None => {
            text.push_str(&pretty);
            text.push('\n');
        }
    }
    ctx.emit(&report, &text)?;
    Ok(Outcome::Pass)
}

fn hom_check(ctx: &mut Ctx, source: &Path, target: &Path, map: &str) -> Result<Outcome> {
    let m = load(source)?;
    let n = load(target)?;
    let em = ElementMap::parse(m.size(), n.size(), map).context("parsing --map")?;
    let mut report = HomCheckReport {
        source: display_name(&m, source),
        target: display_name(&n, target),
        map: em.images().to_vec(),
        strong_hom: false,
        violation: None,
        surjective: em.is_surjective(),
        injective: em.is_injective(),
    };
    let head = format!("{} -> {}: {}", report.source, report.target, join_usize(em.images(), ","));
    let text = match check_strong_hom(&m, &n, em) {
        Ok(h) => {
            report.strong_hom = true;
            let kind = match (h.is_surjective(), h.is_injective()) {
                (true, true) => "bijective",
                (true, false) => "surjective",
                (false, true) => "injective",
                (false, false) => "neither injective nor surjective",
            };
            format!("{head}\nstrong homomorphism ({kind})\n")
        }
        Err(HomError::Violation(v)) => {
            report.violation = Some(v.to_string());
            format!("{head}\nnot a strong homomorphism: {v}\n")
        }
        Err(e) => return Err(e.into()),
    };
    ctx.emit(&report, &text)?;
    Ok(Outcome::from_bool(report.strong_hom))
}

fn filter_name(f: HomFilter) -> &'static str {
    match f {
        HomFilter::All => "all",
        HomFilter::Surjective => "surjective",
        HomFilter::Bijective => "bijective",
    }
}

fn hom_enum(ctx: &mut Ctx, source: &Path, target: &Path, filter: HomFilter) -> Result<Outcome> {
    let m = load(source)?;
    let n = load(target)?;
    let homs = enumerate_strong_homs_with(&m, &n, filter, &ctx.limits)?;
    let report = HomEnumReport {
        source: display_name(&m, source),
        target: display_name(&n, target),
        filter: filter_name(filter).to_string(),
        count: homs.len(),
        homs: homs.iter().map(|h| h.images().to_vec()).collect(),
    };
    let mut text = format!(
        "{} -> {}: {} strong homomorphisms ({})\n",
        report.source, report.target, report.count, report.filter
    );
    for h in &report.homs {
        let _ = writeln!(text, "  {}", join_usize(h, ","));
    }
    ctx.emit(&report, &text)?;
    Ok(Outcome::Pass)
}

fn iso_theorems(ctx: &mut Ctx, file: &Path, targets: &[PathBuf]) -> Result<Outcome> {
    let m = load(file)?;
    let extra = targets.iter().map(|t| load(t)).collect::<Result<Vec<_>>>()?;
    let r = sweep(&m, &extra, &ctx.limits)?;
    let report = IsoTheoremsReport {
        structure: display_name(&m, file),
        rows: r
            .rows
            .iter()
            .map(|row| TheoremRow {
                theorem: row.theorem.to_string(),
                instances: row.instances,
                defects: row.defects.len(),
                details: row.defects.clone(),
            })
            .collect(),
        skipped_targets: r.skipped_targets.clone(),
        total_instances: r.total_instances(),
        total_defects: r.total_defects(),
    };
    let mut text = format!("isomorphism theorems on {}\n", report.structure);
    let _ = writeln!(text, "{:<32} {:>9} {:>7}", "theorem", "instances", "defects");
    for row in &report.rows {
        let _ = writeln!(text, "{:<32} {:>9} {:>7}", row.theorem, row.instances, row.defects);
    }
    let _ = writeln!(
        text,
        "{:<32} {:>9} {:>7}",
        "total", report.total_instances, report.total_defects
    );
    for row in &report.rows {
        for d in &row.details {
            let _ = writeln!(text, "defect in {}: {d}", row.theorem);
        }
    }
    for s in &report.skipped_targets {
        let _ = writeln!(text, "skipped target {s}: search bound exceeded");
    }
    ctx.emit(&report, &text)?;
    Ok(Outcome::from_bool(report.total_defects == 0))
}

fn parse_assignment(items: &[String], n: usize) -> Result<Assignment> {
    let mut asg = Assignment::new();
    for item in items {
        let (var, val) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("--assign expects VAR=ELEM, got `{item}`"))?;
        let val: usize = val
            .trim()
            .parse()
            .map_err(|_| anyhow!("`{}` is not an element index", val.trim()))?;
        if val >= n {
            bail!("element {val} is outside the universe 0..{n}");
        }
        asg.insert(var.trim().to_string(), val);
    }
    Ok(asg)
}

fn eval(ctx: &mut Ctx, file: &Path, formula: &str, assign: &[String]) -> Result<Outcome> {
    let m = load(file)?;
    let phi = parse_formula(m.signature(), formula)?;
    let asg = parse_assignment(assign, m.size())?;
    let value = Compiled::new(m.signature(), &phi)?.eval(&m, &asg)?;
    let report = EvalReport {
        structure: display_name(&m, file),
        formula: phi.to_string(),
        assignment: asg,
        value,
    };
    ctx.emit(&report, &format!("{value}\n"))?;
    Ok(Outcome::from_bool(value))
}

fn pcnf_entry(sig: &Signature, text: &str) -> Result<PcnfEntry> {
    let (phi, warnings) = parse_formula_with_warnings(sig, text)?;
    let p = to_pcnf(&phi);
    Ok(PcnfEntry {
        formula: phi.to_string(),
        pcnf: p.to_string(),
        quotient_safe: is_quotient_safe(&p)?,
        warnings: warnings.iter().map(|w| w.to_string()).collect(),
    })
}

fn is_theory_file(value: &Value) -> bool {
    value.get("axioms").is_some()
}

fn pcnf(ctx: &mut Ctx, file: &Path, formula: Option<&str>) -> Result<Outcome> {
    let text = read(file)?;
    let value: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
    let formulas = if is_theory_file(&value) {
        let t = Theory::from_json(&value)?;
        match formula {
            Some(f) => vec![pcnf_entry(t.signature(), f)?],
            None => t
                .axioms()
                .iter()
                .map(|a| pcnf_entry(t.signature(), &a.to_string()))
                .collect::<Result<Vec<_>>>()?,
        }
    } else {
        let m = structure_from_str(&text).with_context(|| format!("loading {}", file.display()))?;
        let f = formula.ok_or_else(|| anyhow!("--formula is required with a structure file"))?;
        vec![pcnf_entry(m.signature(), f)?]
    };
    let mut out = String::new();
    for e in &formulas {
        for w in &e.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(out, "formula: {}", e.formula);
        let _ = writeln!(out, "pcnf:    {}", e.pcnf);
        let _ = writeln!(
            out,
            "quotient-safe: {}",
            if e.quotient_safe { "yes" } else { "no" }
        );
    }
    ctx.emit(&PcnfReport { formulas }, &out)?;
    Ok(Outcome::Pass)
}

fn preserve_entry(
    m: &FiniteStructure,
    phi: &fquot_core::folog::Formula,
    limits: &Limits,
) -> Result<PreserveEntry> {
    match preservation_check_with(m, phi, limits) {
        Ok(r) => Ok(PreserveEntry {
            formula: r.formula.clone(),
            premise_holds: true,
            pcnf: Some(r.pcnf.clone()),
            quotient_safe: Some(r.safe),
            defects: r.defects().len(),
            counterexamples: r.counterexamples().len(),
            quotients: r
                .rows
                .iter()
                .map(|row| QuotientTruth {
                    congruence: row.congruence.to_string(),
                    size: row.quotient_size,
                    holds: row.holds,
                })
                .collect(),
        }),
        Err(FormulaError::PremiseFails(_)) => Ok(PreserveEntry {
            formula: phi.to_string(),
            premise_holds: false,
            pcnf: None,
            quotient_safe: None,
            quotients: Vec::new(),
            defects: 0,
            counterexamples: 0,
        }),
        Err(e) => Err(e.into()),
    }
}

fn preserve(ctx: &mut Ctx, args: &PreserveArgs) -> Result<Outcome> {
    let m = load(&args.file)?;
    let formulas = match (&args.source.formula, &args.source.theory) {
        (Some(f), _) => vec![parse_formula(m.signature(), f)?],
        (None, Some(path)) => {
            let t = Theory::from_json_str(&read(path)?)
                .with_context(|| format!("loading {}", path.display()))?;
            if !m.signature().same_symbols(t.signature()) {
                bail!("theory `{}` and the structure have different signatures", t.name());
            }
            t.axioms().to_vec()
        }
        (None, None) => unreachable!("clap requires one of --formula and --theory"),
    };
    let entries = formulas
        .iter()
        .map(|phi| preserve_entry(&m, phi, &ctx.limits))
        .collect::<Result<Vec<_>>>()?;
    let report = PreserveReport {
        structure: display_name(&m, &args.file),
        total_defects: entries.iter().map(|e| e.defects).sum(),
        formulas: entries,
    };
    let mut text = String::new();
    for e in &report.formulas {
        let _ = writeln!(text, "formula: {}", e.formula);
        if !e.premise_holds {
            let _ = writeln!(text, "  false in {}; nothing to preserve", report.structure);
            continue;
        }
        let _ = writeln!(text, "  pcnf: {}", e.pcnf.as_deref().unwrap_or_default());
        let safe = e.quotient_safe == Some(true);
        let _ = writeln!(text, "  quotient-safe: {}", if safe { "yes" } else { "no" });
        for q in &e.quotients {
            let _ = writeln!(text, "  {:<24} {:>2} elements  {}", q.congruence, q.size, q.holds);
        }
        let _ = writeln!(
            text,
            "  defects: {}, counterexamples: {}",
            e.defects, e.counterexamples
        );
    }
    let premises = report.formulas.iter().all(|e| e.premise_holds);
    let _ = writeln!(
        text,
        "{}",
        if !premises {
            "FAIL: a premise is false"
        } else if report.total_defects > 0 {
            "FAIL: a quotient-safe sentence was not preserved"
        } else {
            "PASS"
        }
    );
    ctx.emit(&report, &text)?;
    Ok(Outcome::from_bool(premises && report.total_defects == 0))
}

fn fquot(ctx: &mut Ctx, file: &Path) -> Result<Outcome> {
    let m = load(file)?;
    let name = display_name(&m, file);
    let poset = quo_poset_with(&m, &ctx.limits)?;
    let check = verify_quo_con_iso_with(&m, &ctx.limits)?;
    let report = FquotReport {
        structure: name.clone(),
        classes: poset
            .reps()
            .iter()
            .map(|q| QuotientClass {
                kernel: q.congruence().to_string(),
                size: q.structure.size(),
            })
            .collect(),
        covers: poset.covers(),
        congruences: check.congruences,
        order_entries: check.order_entries,
        order_mismatches: check.order_mismatches.clone(),
        kernel_defects: check.kernel_defects.clone(),
        agrees: check.ok(),
    };
    let mut text = format!("F-quotients of {name}: {} classes\n", report.classes.len());
    for (i, c) in report.classes.iter().enumerate() {
        let _ = writeln!(text, "  q{i}: ker = {}  ({} elements)", c.kernel, c.size);
    }
    text.push_str("Hasse edges (factorization order):\n");
    for (lo, hi) in &report.covers {
        let _ = writeln!(text, "  q{lo} -> q{hi}");
    }
    let _ = writeln!(
        text,
        "Quo = Con: {} classes, {} congruences, {} order entries, {} mismatches, {} kernel defects: {}",
        report.classes.len(),
        report.congruences,
        report.order_entries,
        report.order_mismatches.len(),
        report.kernel_defects.len(),
        if report.agrees { "OK" } else { "FAIL" }
    );
    ctx.write_dot(&poset.to_dot(&format!("Quo({name})")))?;
    ctx.emit(&report, &text)?;
    Ok(Outcome::from_bool(report.agrees))
}

/// Number of structures of `sig` on `n` elements, saturating.
fn structure_count(sig: &Signature, n: usize) -> u128 {
    let pow = |b: u128, e: u128| -> u128 {
        let e = u32::try_from(e).unwrap_or(u32::MAX);
        b.checked_pow(e).unwrap_or(u128::MAX)
    };
    let cells = |arity: usize| pow(n as u128, arity as u128);
    let mut total: u128 = 1;
    for f in sig.functions() {
        total = total.saturating_mul(pow(n as u128, cells(f.arity)));
    }
    for r in sig.relations() {
        total = total.saturating_mul(pow(2, cells(r.arity)));
    }
    total
}

fn free_check(ctx: &mut Ctx, args: &FreeCheckArgs) -> Result<Outcome> {
    let a = load(&args.file)?;
    let gens = parse_element_set(a.size(), &args.generators).context("parsing --x")?;
    let inclusion = ElementMap::new(gens.len(), a.size(), gens.clone())?;
    let targets: Vec<Arc<FiniteStructure>> = match args.targets.all_up_to {
        Some(n) => {
            let mut count: u128 = 0;
            for k in 1..=n {
                count = count.saturating_add(structure_count(a.signature(), k));
            }
            if count > ctx.limits.max_search {
                bail!(
                    "--all-up-to {n} would enumerate {count} structures, above the bound {}",
                    ctx.limits.max_search
                );
            }
            (1..=n)
                .flat_map(|k| FiniteStructure::enumerate_all(a.signature(), k))
                .map(Arc::new)
                .collect()
        }
        None => args
            .targets
            .targets
            .iter()
            .map(|t| load(t))
            .collect::<Result<_>>()?,
    };
    let r = bounded_free_check(&a, &inclusion, &targets, &ctx.limits)?;
    let report = FreeCheckReport {
        structure: display_name(&a, &args.file),
        generators: gens,
        targets: r.targets,
        checked: r.checked,
        failures: r.failures,
        passed: r.passed(),
        witness: r.witness.as_ref().map(|w| FreeWitnessReport {
            target: w.target,
            target_name: w.target_name.clone(),
            assignment: w.assignment.clone(),
            extensions: w.extensions,
        }),
    };
    let mut text = format!(
        "free check of {} over X = {{{}}}: {} targets, {} assignments checked, {} failures\n",
        report.structure,
        join_usize(&report.generators, " "),
        report.targets,
        report.checked,
        report.failures
    );
    if let Some(w) = &report.witness {
        let _ = writeln!(
            text,
            "witness: assignment [{}] into target {} ({}) has {} extensions",
            join_usize(&w.assignment, " "),
            w.target,
            w.target_name,
            w.extensions
        );
    }
    let _ = writeln!(text, "{}", if report.passed { "PASS" } else { "FAIL" });
    ctx.emit(&report, &text)?;
    Ok(Outcome::from_bool(report.passed))
}
