//! `belief`: revise, contract, update and query knowledge-base files.
//!
//! Exit status: 0 success, 1 usage or input error, 2 query answered false,
//! 3 the result is inconsistent.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use belief_core::laws::{
    check_contraction_postulates, check_dp, check_identities, check_revision_postulates,
    check_update_postulates, Grid, LawReport, Operator,
};
use belief_core::scenario::{extension_rep, max_eq, ExtensionFamily};
use belief_core::update::update_with_mode;
use belief_core::{
    contract, parse_kb, parse_with, query, revise, revise_ic, Atom, BeliefBase, ChangeOptions,
    EqSet, Formula, IntegrityConstraints, MaximalityMode, ParseOptions, Reasoner, Scenario,
    SelectionStrategy, Variant,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const OK: u8 = 0;
const USAGE: u8 = 1;
const QUERY_FALSE: u8 = 2;
const INCONSISTENT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "belief", version, about = "Consistency-based belief change on knowledge-base files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long, value_enum, default_value_t = VariantArg::Skeptical, global = true)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Inclusion, global = true)]
    mode: ModeArg,
    /// Comma-separated atom ranking for the selection strategy.
    #[arg(long, global = true)]
    order: Option<String>,
    /// File of constraints the result must stay consistent with.
    #[arg(long, value_name = "FILE", global = true)]
    ic_consistency: Option<PathBuf>,
    /// File of constraints the result must entail.
    #[arg(long, value_name = "FILE", global = true)]
    ic_entailment: Option<PathBuf>,
    /// File of constraints relating the old state (primed atoms) to the new one.
    #[arg(long, value_name = "FILE", global = true)]
    ic_dynamic: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    format: FormatArg,
    /// Print the maximal equivalence sets.
    #[arg(long, global = true)]
    show_eq: bool,
    /// Print the models of the result.
    #[arg(long, global = true)]
    models: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    Revise { kb: PathBuf, alpha: String },
    Contract { kb: PathBuf, alpha: String },
    Update { kb: PathBuf, alpha: String },
    Query { kb: PathBuf, alpha: String, beta: String },
    /// Print the equivalence-set family and one representative per extension.
    Extensions {
        kb: PathBuf,
        alpha: String,
        #[arg(long)]
        contraction: bool,
    },
    /// Audit the postulates. Up to 2 atoms the grid is exhaustive, beyond
    /// that it is random.
    Laws {
        #[arg(long, default_value_t = 2)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VariantArg {
    Skeptical,
    Choice,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Inclusion,
    Cardinality,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormatArg {
    Text,
    Records,
}

#[derive(Serialize)]
struct Record {
    operation: &'static str,
    inputs: Inputs,
    eq_sets: Vec<EqSet>,
    result: String,
    status: &'static str,
}

#[derive(Serialize, Default)]
struct Inputs {
    kb: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    ic_consistency: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    ic_entailment: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    ic_dynamic: Vec<String>,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            let _ = out.flush();
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}

fn read_formulas(path: &Path, allow_primed: bool) -> Result<Vec<Formula>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    parse_kb(&text, ParseOptions { allow_primed })
        .map_err(|e| Failure(format!("{}:{e}", path.display())))
}

fn read_kb(path: &Path) -> Result<BeliefBase, Failure> {
    let fs = read_formulas(path, false).map_err(|Failure(m)| {
        Failure(if m.contains("primed") {
            format!("{m} (primed atoms are only accepted in --ic-dynamic files)")
        } else {
            m
        })
    })?;
    Ok(BeliefBase::new(fs)?)
}

fn formula_arg(name: &str, text: &str) -> Result<Formula, Failure> {
    parse_with(text, ParseOptions::default()).map_err(|e| Failure(format!("{name}: {e}")))
}

fn strategy(opts: &Opts) -> Result<SelectionStrategy, Failure> {
    let Some(order) = &opts.order else {
        return Ok(SelectionStrategy::default());
    };
    let atoms = order
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Atom::try_new(s).map_err(|e| Failure(format!("--order: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SelectionStrategy::with_order(atoms))
}

fn change_options(opts: &Opts) -> Result<ChangeOptions, Failure> {
    let mode = match opts.mode {
        ModeArg::Inclusion => MaximalityMode::Inclusion,
        ModeArg::Cardinality => MaximalityMode::Cardinality,
    };
    if opts.variant == VariantArg::Skeptical && opts.order.is_some() && !opts.show_eq {
        return Err(Failure("--order applies to --variant choice (or to --show-eq)".into()));
    }
    let variant = match opts.variant {
        VariantArg::Skeptical => Variant::Skeptical,
        VariantArg::Choice => Variant::Choice(strategy(opts)?),
    };
    Ok(ChangeOptions { variant, mode })
}

fn has_ic(opts: &Opts) -> bool {
    opts.ic_consistency.is_some() || opts.ic_entailment.is_some() || opts.ic_dynamic.is_some()
}

fn reject_ic(opts: &Opts, command: &str) -> Result<(), Failure> {
    if has_ic(opts) {
        return Err(Failure(format!("integrity constraints apply to revise only, not {command}")));
    }
    Ok(())
}

fn strings(fs: &[Formula]) -> Vec<String> {
    fs.iter().map(Formula::to_string).collect()
}

fn family_for(reasoner: &Reasoner, b: &Scenario, opts: &ChangeOptions) -> ExtensionFamily {
    max_eq(reasoner, b, opts.mode, &opts.extensions())
}

struct Report<'a> {
    operation: &'static str,
    inputs: Inputs,
    family: Option<&'a ExtensionFamily>,
    result: &'a BeliefBase,
}

fn emit(cli: &Cli, out: &mut dyn Write, report: Report) -> Outcome {
    let opts = &cli.opts;
    let result = report.result.conjunction().fold_constants();
    let consistent = report.result.is_consistent();
    let status = if consistent { "ok" } else { "inconsistent" };
    let eq_sets: Vec<EqSet> = report
        .family
        .filter(|_| opts.show_eq || opts.format == FormatArg::Records)
        .map(|f| f.eq_sets().to_vec())
        .unwrap_or_default();
    match opts.format {
        FormatArg::Records => {
            let record = Record {
                operation: report.operation,
                inputs: report.inputs,
                eq_sets,
                result: result.to_string(),
                status,
            };
            writeln!(out, "{}", serde_json::to_string(&record)?)?;
        }
        FormatArg::Text => {
            if opts.show_eq {
                print_eq_sets(out, &eq_sets, report.family, opts)?;
            }
            writeln!(out, "{result}")?;
            if opts.models {
                print_models(out, &result, report.inputs_vocab())?;
            }
        }
    }
    Ok(if consistent { OK } else { INCONSISTENT })
}

impl Report<'_> {
    fn inputs_vocab(&self) -> BTreeSet<Atom> {
        let mut v = BTreeSet::new();
        for s in self
            .inputs
            .kb
            .iter()
            .chain(&self.inputs.alpha)
            .chain(&self.inputs.ic_consistency)
            .chain(&self.inputs.ic_entailment)
        {
            if let Ok(f) = parse_with(s, ParseOptions::default()) {
                v.extend(f.vocab());
            }
        }
        v
    }
}

fn print_eq_sets(
    out: &mut dyn Write,
    eq_sets: &[EqSet],
    family: Option<&ExtensionFamily>,
    opts: &Opts,
) -> Outcome {
    if eq_sets.is_empty() {
        writeln!(out, "no consistent equivalence set")?;
    }
    for (i, eq) in eq_sets.iter().enumerate() {
        writeln!(out, "EQ{} = {eq}", i + 1)?;
    }
    if let (Some(family), Some(_), VariantArg::Skeptical) = (family, &opts.order, opts.variant) {
        if let Some(pick) = strategy(opts)?.select(family.eq_sets()) {
            writeln!(out, "selected by --order: {pick}")?;
        }
    }
    Ok(OK)
}

fn print_models(out: &mut dyn Write, result: &Formula, mut vocabulary: BTreeSet<Atom>) -> Outcome {
    vocabulary.extend(result.vocab());
    let models = Reasoner::default().models(std::slice::from_ref(result), &vocabulary)?;
    for m in models {
        writeln!(out, "model: {m}")?;
    }
    Ok(OK)
}

fn run(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let reasoner = Reasoner::default();
    let opts = &cli.opts;
    match &cli.command {
        Command::Revise { kb, alpha } => {
            let k = read_kb(kb)?;
            let a = formula_arg("alpha", alpha)?;
            let change = change_options(opts)?;
            let ic = IntegrityConstraints {
                ic_k: opt_file(&opts.ic_consistency, false)?,
                ic_r: opt_file(&opts.ic_entailment, false)?,
                dynamic: opt_file(&opts.ic_dynamic, true)?,
            };
            for warning in ic.validate()? {
                eprintln!("warning: {warning}");
            }
            let u: Vec<Formula> = std::iter::once(a.clone()).chain(ic.ic_r.iter().cloned()).collect();
            let v: Vec<Formula> = ic.ic_k.iter().chain(&ic.dynamic).cloned().collect();
            let b = Scenario::new(k.clone(), u, v)?;
            let family = family_for(&reasoner, &b, &change);
            let result = if has_ic(opts) {
                revise_ic(&reasoner, &k, &a, &ic, &change)?
            } else {
                revise(&reasoner, &k, &a, &change)?
            };
            let inputs = Inputs {
                kb: strings(k.formulas()),
                alpha: Some(a.to_string()),
                ic_consistency: strings(&ic.ic_k),
                ic_entailment: strings(&ic.ic_r),
                ic_dynamic: strings(&ic.dynamic),
                ..Default::default()
            };
            emit(cli, out, Report { operation: "revise", inputs, family: Some(&family), result: &result })
        }
        Command::Contract { kb, alpha } => {
            reject_ic(opts, "contract")?;
            let k = read_kb(kb)?;
            let a = formula_arg("alpha", alpha)?;
            let change = change_options(opts)?;
            let b = Scenario::contraction(k.clone(), a.clone())?;
            let family = family_for(&reasoner, &b, &change);
            let result = contract(&reasoner, &k, &a, &change)?;
            let inputs = Inputs {
                kb: strings(k.formulas()),
                alpha: Some(a.to_string()),
                ..Default::default()
            };
            emit(cli, out, Report { operation: "contract", inputs, family: Some(&family), result: &result })
        }
        Command::Update { kb, alpha } => {
            reject_ic(opts, "update")?;
            if opts.variant == VariantArg::Choice {
                return Err(Failure("update has no choice variant".into()));
            }
            let change = change_options(opts)?;
            let k = read_kb(kb)?;
            let a = formula_arg("alpha", alpha)?;
            let result = update_with_mode(&reasoner, &k, &a, change.mode)?;
            let inputs = Inputs {
                kb: strings(k.formulas()),
                alpha: Some(a.to_string()),
                ..Default::default()
            };
            emit(cli, out, Report { operation: "update", inputs, family: None, result: &result })
        }
        Command::Query { kb, alpha, beta } => {
            reject_ic(opts, "query")?;
            let k = read_kb(kb)?;
            let a = formula_arg("alpha", alpha)?;
            let b = formula_arg("beta", beta)?;
            let change = change_options(opts)?;
            let answer = query(&reasoner, &k, &a, &b, &change)?;
            match opts.format {
                FormatArg::Records => {
                    let record = Record {
                        operation: "query",
                        inputs: Inputs {
                            kb: strings(k.formulas()),
                            alpha: Some(a.to_string()),
                            beta: Some(b.to_string()),
                            ..Default::default()
                        },
                        eq_sets: Vec::new(),
                        result: answer.to_string(),
                        status: if answer { "true" } else { "false" },
                    };
                    writeln!(out, "{}", serde_json::to_string(&record)?)?;
                }
                FormatArg::Text => writeln!(out, "{answer}")?,
            }
            Ok(if answer { OK } else { QUERY_FALSE })
        }
        Command::Extensions { kb, alpha, contraction } => {
            reject_ic(opts, "extensions")?;
            let k = read_kb(kb)?;
            let a = formula_arg("alpha", alpha)?;
            let change = change_options(opts)?;
            let b = if *contraction {
                Scenario::contraction(k.clone(), a.clone())?
            } else {
                Scenario::revision(k.clone(), a.clone())?
            };
            let family = family_for(&reasoner, &b, &change);
            extensions(out, &reasoner, cli, &k, &a, &b, &family, *contraction)
        }
        Command::Laws { grid, count, seed } => {
            reject_ic(opts, "laws")?;
            let grid = if *grid <= 2 {
                Grid::exhaustive(*grid)
            } else {
                Grid::random(*grid, *count, *seed)
            };
            laws(out, cli, &grid)
        }
    }
}

fn opt_file(path: &Option<PathBuf>, allow_primed: bool) -> Result<Vec<Formula>, Failure> {
    match path {
        Some(p) => read_formulas(p, allow_primed),
        None => Ok(Vec::new()),
    }
}

#[derive(Serialize)]
struct ExtensionRecord {
    eq_set: EqSet,
    representative: String,
}

#[derive(Serialize)]
struct ExtensionsRecord {
    operation: &'static str,
    inputs: Inputs,
    eq_sets: Vec<EqSet>,
    extensions: Vec<ExtensionRecord>,
    result: String,
    status: &'static str,
}

#[allow(clippy::too_many_arguments)]
fn extensions(
    out: &mut dyn Write,
    reasoner: &Reasoner,
    cli: &Cli,
    k: &BeliefBase,
    a: &Formula,
    b: &Scenario,
    family: &ExtensionFamily,
    contraction: bool,
) -> Outcome {
    let change = change_options(&cli.opts)?;
    let result = if contraction {
        contract(reasoner, k, a, &change)?
    } else {
        revise(reasoner, k, a, &change)?
    };
    let reps = family
        .eq_sets()
        .iter()
        .map(|eq| Ok(ExtensionRecord {
            eq_set: eq.clone(),
            representative: extension_rep(reasoner, b, eq)?.fold_constants().to_string(),
        }))
        .collect::<Result<Vec<_>, Failure>>()?;
    let consistent = result.is_consistent();
    let folded = result.conjunction().fold_constants().to_string();
    let status = if consistent { "ok" } else { "inconsistent" };
    match cli.opts.format {
        FormatArg::Records => {
            let record = ExtensionsRecord {
                operation: "extensions",
                inputs: Inputs {
                    kb: strings(k.formulas()),
                    alpha: Some(a.to_string()),
                    ..Default::default()
                },
                eq_sets: family.eq_sets().to_vec(),
                extensions: reps,
                result: folded,
                status,
            };
            writeln!(out, "{}", serde_json::to_string(&record)?)?;
        }
        FormatArg::Text => {
            let kind = if contraction { "contraction" } else { "revision" };
            writeln!(out, "scenario: {kind}")?;
            if reps.is_empty() {
                writeln!(out, "no consistent equivalence set")?;
            }
            for (i, rep) in reps.iter().enumerate() {
                writeln!(out, "EQ{} = {}", i + 1, rep.eq_set)?;
                writeln!(out, "  extension: {}", rep.representative)?;
            }
            writeln!(out, "result: {folded}")?;
        }
    }
    Ok(if consistent { OK } else { INCONSISTENT })
}

fn laws(out: &mut dyn Write, cli: &Cli, grid: &Grid) -> Outcome {
    let skeptical = ChangeOptions::skeptical();
    let choice = ChangeOptions::choice(SelectionStrategy::default());
    let rev = Operator::revision(skeptical.clone());
    let con = Operator::contraction(skeptical);
    let mut reports: Vec<LawReport> = Vec::new();
    reports.extend(check_revision_postulates(&rev, grid));
    reports.extend(check_revision_postulates(&Operator::revision(choice.clone()), grid));
    reports.extend(check_contraction_postulates(&con, grid));
    reports.extend(check_contraction_postulates(&Operator::contraction(choice), grid));
    reports.extend(check_identities(&rev, &con, grid));
    reports.extend(check_dp(&rev, grid));
    reports.extend(check_update_postulates(&Operator::update(MaximalityMode::Inclusion), grid));
    for r in &reports {
        match cli.opts.format {
            FormatArg::Records => writeln!(out, "{}", serde_json::to_string(r)?)?,
            FormatArg::Text => {
                let verdict = if r.holds() { "holds-on-grid" } else { "VIOLATED" };
                writeln!(
                    out,
                    "{:<9} {:<36} {:<13} {} instances, {} violations",
                    r.law, r.operator, verdict, r.instances, r.violation_count
                )?;
                if let Some(v) = r.violations.first() {
                    let inputs: Vec<String> =
                        v.inputs.iter().map(|l| format!("{} = {}", l.name, l.formula)).collect();
                    let seen: Vec<String> =
                        v.observed.iter().map(|l| format!("{} = {}", l.name, l.formula)).collect();
                    writeln!(out, "          e.g. {}; got {}", inputs.join(", "), seen.join(", "))?;
                }
                if r.witness_count > 0 {
                    if let Some(w) = r.witnesses.first() {
                        let inputs: Vec<String> =
                            w.inputs.iter().map(|l| format!("{} = {}", l.name, l.formula)).collect();
                        writeln!(out, "          {} strict, e.g. {}", r.witness_count, inputs.join(", "))?;
                    }
                }
            }
        }
    }
    if cli.opts.format == FormatArg::Text {
        writeln!(out, "grid: {}", grid.describe())?;
    }
    Ok(OK)
}
