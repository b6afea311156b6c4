// SPDX-License-Identifier: Apache-2.0
//! `demarc`: reducts, value reduction, rules and measures from CSV tables.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use demarc_core::classifier::{build_tree_by_names, classify_rules, format_rule, to_rules, ClassifierTree, Outcome, Rule};
use demarc_core::heuristics::{approx_error, heuristic_reduct, HeuristicOptions, Scorer, TieBreak};
use demarc_core::measures::{conditional_variety, meet, mutual_variety, variety, PartitionStats, VarietyValue};
use demarc_core::oracle::{self, OracleBudget, OracleError};
use demarc_core::squeeze::{compute_core, find_irrelevant, pinned_order, twi_squeeze, SqueezeError};
use demarc_core::table::{
    boundary_rows, decisionize, dedupe, load_table, separate_inconsistent, DecisionColumns, DecisionTable, IngestConfig,
    STAR,
};
use demarc_core::valred::{
    core_values, value_reduce_approx, value_reduce_complete_traced, value_reduce_incomplete, ReducedTable,
    ScanDirection, ValredError,
};
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "demarc", version, about = "Relative reducts and value reduction for categorical decision tables")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduct by a right-to-left then left-to-right squeeze.
    Reduce(ReduceArgs),
    /// Reduct by greedy demarcation scoring.
    HeuristicReduce(HeuristicArgs),
    /// Attributes present in every reduct.
    Core(TableArgs),
    /// Attributes that discern nothing relevant to the decision.
    Irrelevant(TableArgs),
    /// Star out condition values that the decision does not need.
    ValueReduce(ValueArgs),
    /// Share of the positive region lost by keeping only some attributes.
    ApproxError(ApproxArgs),
    /// Variety of the partitions induced by attribute sets.
    Measure(MeasureArgs),
    /// Decision rules of a reduced table.
    Rules(ModelArgs),
    /// Classifier tree of a reduced table.
    Tree(TreeArgs),
    /// Classify the rows of a table with a reduced table.
    Classify(ClassifyArgs),
    /// Brute-force cross-checks on small tables.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Time a reduct search and report per-layer sorting work.
    Bench(BenchArgs),
    /// Add a decision column naming the classes of identical rows.
    Decisionize(DecisionizeArgs),
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Compare the fast computation with exhaustive enumeration.
    Check(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Clone)]
struct TableArgs {
    /// Input CSV with a header row.
    input: PathBuf,
    /// Decision column name; repeat or comma-separate for several. Default: last column.
    #[arg(long, value_delimiter = ',')]
    decision: Vec<String>,
    /// Cell text read as a missing value.
    #[arg(long, default_value = "?")]
    missing: String,
    /// Field delimiter (a single character, or "tab").
    #[arg(long, default_value = ",")]
    delimiter: String,
    /// Collapse rows equal on every column first.
    #[arg(long)]
    dedupe: bool,
    /// Attributes moved to the left end of the scan order.
    #[arg(long, value_delimiter = ',')]
    pin_left: Vec<String>,
    /// Attributes moved to the right end of the scan order.
    #[arg(long, value_delimiter = ',')]
    pin_right: Vec<String>,
    /// Proceed on tables where equal condition rows carry different decisions.
    #[arg(long)]
    allow_inconsistent: bool,
    /// Output format; json by default, except CSV text for value-reduce.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    table: TableArgs,
    /// Include the per-attribute intersection checks in the JSON report.
    #[arg(long)]
    checks: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScorerArg {
    Demarcation,
    Entropy,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Latest,
    Earliest,
}

#[derive(Args)]
struct HeuristicArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, value_enum, default_value = "demarcation")]
    scorer: ScorerArg,
    #[arg(long, value_enum, default_value = "latest")]
    tie: TieArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Complete,
    IncompleteL2r,
    IncompleteR2l,
    Approx,
}

#[derive(Args)]
struct ValueArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, value_enum, default_value = "complete")]
    mode: Mode,
    /// Complete mode: star right to left first, retain left to right.
    #[arg(long)]
    reverse: bool,
    /// Take the reduct from a `reduce` JSON report instead of computing it.
    #[arg(long)]
    reduct_from: Option<PathBuf>,
    /// Explicit reduct attributes.
    #[arg(long, value_delimiter = ',', conflicts_with = "reduct_from")]
    attrs: Vec<String>,
}

#[derive(Args)]
struct ApproxArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    attrs: Vec<String>,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    table: TableArgs,
    /// Attributes inducing the first partition. Default: all condition attributes.
    #[arg(long, value_delimiter = ',')]
    attrs: Vec<String>,
    /// Attributes inducing the second partition. Default: the decision.
    #[arg(long, value_delimiter = ',')]
    against: Vec<String>,
}

#[derive(Args)]
struct ModelArgs {
    /// Reduced table CSV as written by `value-reduce`.
    model: PathBuf,
    /// Decision column name(s) of the reduced table. Default: last before coverage.
    #[arg(long, value_delimiter = ',')]
    decision: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct TreeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Attribute per tree level. Default: the reduced table's column order.
    #[arg(long, value_delimiter = ',')]
    order: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Via {
    Tree,
    Rules,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Table whose rows are classified; columns are matched by name.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "tree")]
    via: Via,
    #[arg(long, value_delimiter = ',')]
    order: Vec<String>,
    #[arg(long, default_value = "?")]
    missing: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Reduct,
    Core,
    Values,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, value_enum)]
    what: What,
    #[arg(long, default_value_t = OracleBudget::default().max_rows)]
    max_rows: usize,
    #[arg(long, default_value_t = OracleBudget::default().max_attrs)]
    max_attrs: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Input CSV; omit with --synthetic.
    input: Option<PathBuf>,
    /// Generate a consistent table with this many rows and 20 attributes.
    #[arg(long, conflicts_with = "input")]
    synthetic: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Timed runs; the median is reported.
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    #[arg(long, value_delimiter = ',')]
    decision: Vec<String>,
}

#[derive(Args)]
struct DecisionizeArgs {
    input: PathBuf,
    #[arg(long, default_value = "?")]
    missing: String,
    #[arg(long, default_value = ",")]
    delimiter: String,
}

/// Error carrying the process exit code.
#[derive(Debug)]
struct Exit {
    code: u8,
    msg: String,
    report: Option<Value>,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for Exit {}

fn exit(code: u8, msg: impl Into<String>, report: Option<Value>) -> anyhow::Error {
    Exit { code, msg: msg.into(), report }.into()
}

fn inconsistent(ids: Vec<u32>) -> anyhow::Error {
    let msg = format!("inconsistent input: rows {ids:?} share condition values with rows of another decision (use --allow-inconsistent)");
    exit(3, msg, Some(json!({"schema": 1, "error": "inconsistent", "boundary_row_ids": ids})))
}

fn parse_delimiter(s: &str) -> anyhow::Result<u8> {
    match s {
        "tab" | "\\t" => Ok(b'\t'),
        _ if s.len() == 1 => Ok(s.as_bytes()[0]),
        _ => bail!("delimiter must be one ASCII character, got {s:?}"),
    }
}

fn decision_columns(names: &[String]) -> DecisionColumns {
    if names.is_empty() {
        DecisionColumns::Last
    } else {
        DecisionColumns::Named(names.to_vec())
    }
}

fn open(path: &Path) -> anyhow::Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn read_table(path: &Path, config: &IngestConfig) -> anyhow::Result<DecisionTable> {
    load_table(open(path)?, config).with_context(|| format!("cannot read table {}", path.display()))
}

struct Loaded {
    t: DecisionTable,
    order: Vec<usize>,
}

impl TableArgs {
    fn config(&self) -> anyhow::Result<IngestConfig> {
        Ok(IngestConfig {
            decision: decision_columns(&self.decision),
            missing: self.missing.clone(),
            delimiter: parse_delimiter(&self.delimiter)?,
        })
    }

    fn load(&self) -> anyhow::Result<Loaded> {
        let mut t = read_table(&self.input, &self.config()?)?;
        if self.dedupe {
            t = dedupe(&t).0;
        }
        let left = t.condition_indices(&self.pin_left)?;
        let right = t.condition_indices(&self.pin_right)?;
        if left.iter().any(|a| right.contains(a)) {
            bail!("an attribute cannot be pinned both left and right");
        }
        let order = pinned_order(&t, &left, &right);
        Ok(Loaded { t, order })
    }

    /// Loads and refuses inconsistent tables unless allowed.
    fn load_checked(&self) -> anyhow::Result<Loaded> {
        let l = self.load()?;
        let b = boundary_rows(&l.t);
        if !b.is_empty() && !self.allow_inconsistent {
            return Err(inconsistent(b.iter().map(|&r| l.t.row_id(r)).collect()));
        }
        Ok(l)
    }
}

fn squeeze_err(e: SqueezeError) -> anyhow::Error {
    match e {
        SqueezeError::FullyInconsistent(_) => exit(3, e.to_string(), None),
        other => anyhow!(other),
    }
}

fn emit(format: Format, v: &Value, text: impl FnOnce() -> String) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(v)?)?,
        Format::Text => write!(out, "{}", text())?,
    }
    Ok(())
}

fn names_line(label: &str, names: &[String]) -> String {
    format!("{label}: {}\n", if names.is_empty() { "(none)".to_owned() } else { names.join(" ") })
}

fn reduce(a: &ReduceArgs) -> anyhow::Result<()> {
    let Loaded { t, order } = a.table.load_checked()?;
    let r = twi_squeeze(&t, Some(&order)).map_err(squeeze_err)?;
    let mut v = r.to_json(&t);
    if a.checks {
        v["checks"] = r
            .checks
            .iter()
            .map(|c| json!({"attribute": t.name(c.attr), "kept": c.kept, "comparisons": c.intersection.comparisons}))
            .collect();
    }
    emit(a.table.format.unwrap_or(Format::Json), &v, || {
        let mut s = names_line("s_reduct", &t.names(&r.s_reduct));
        s += &names_line("reduct", &t.names(&r.reduct));
        if !r.boundary_rows.is_empty() {
            s += &format!("boundary rows: {:?}\n", r.boundary_rows);
        }
        s
    })
}

fn heuristic(a: &HeuristicArgs) -> anyhow::Result<()> {
    let Loaded { t, .. } = a.table.load_checked()?;
    let opts = HeuristicOptions {
        scorer: match a.scorer {
            ScorerArg::Demarcation => Scorer::Demarcation,
            ScorerArg::Entropy => Scorer::Entropy,
        },
        tie: match a.tie {
            TieArg::Latest => TieBreak::Latest,
            TieArg::Earliest => TieBreak::Earliest,
        },
    };
    let h = heuristic_reduct(&t, opts).map_err(squeeze_err)?;
    let mut v = h.report.to_json(&t);
    v["picks"] = json!(t.names(&h.picks));
    v["scores"] = h
        .scores
        .iter()
        .map(|layer| {
            layer
                .iter()
                .map(|s| {
                    json!({
                        "attribute": t.name(s.attr),
                        "indiscernible": s.indiscernible as u64,
                        "demarcating": s.demarcating as u64,
                        "entropy": s.entropy,
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    emit(a.table.format.unwrap_or(Format::Json), &v, || {
        let mut s = String::new();
        for (k, layer) in h.scores.iter().enumerate() {
            let cells: Vec<String> = layer.iter().map(|x| format!("I({})={}", t.name(x.attr), x.indiscernible)).collect();
            let pick = h.picks.get(k).map_or("stop", |&p| t.name(p));
            s += &format!("step {}: {} -> {pick}\n", k + 1, cells.join(" "));
        }
        s + &names_line("reduct", &t.names(&h.report.reduct))
    })
}

fn attr_list(a: &TableArgs, what: &str, f: impl Fn(&DecisionTable) -> Vec<usize>) -> anyhow::Result<()> {
    let Loaded { t, .. } = a.load_checked()?;
    let names = t.names(&f(&t));
    emit(a.format.unwrap_or(Format::Json), &json!({"schema": 1, what: names}), || names_line(what, &names))
}

fn reduced_json(rt: &ReducedTable) -> Value {
    let rows: Vec<Value> = (0..rt.rows.len())
        .map(|i| {
            let r = &rt.rows[i];
            json!({
                "values": (0..rt.attributes.len()).map(|k| rt.cell_text(i, k)).collect::<Vec<_>>(),
                "decision": rt.decision_text(&r.decision),
                "coverage": r.coverage,
                "row_ids": r.members,
            })
        })
        .collect();
    json!({
        "schema": 1,
        "attributes": rt.attributes.iter().map(|a| &a.name).collect::<Vec<_>>(),
        "decision": rt.decision_attributes.iter().map(|a| &a.name).collect::<Vec<_>>(),
        "retained_values": rt.retained_values(),
        "compression_ratio": rt.compression_ratio(),
        "rows": rows,
    })
}

fn reduct_from_report(path: &Path, t: &DecisionTable) -> anyhow::Result<Vec<usize>> {
    let v: Value = serde_json::from_reader(open(path)?).with_context(|| format!("{} is not JSON", path.display()))?;
    let names: Vec<String> = serde_json::from_value(v["reduct"].clone())
        .with_context(|| format!("{} has no \"reduct\" name list", path.display()))?;
    Ok(t.condition_indices(&names)?)
}

fn valred_err(e: ValredError) -> anyhow::Error {
    match e {
        ValredError::Inconsistent(ids) => inconsistent(ids),
        other => anyhow!(other),
    }
}

fn value_reduce(a: &ValueArgs) -> anyhow::Result<()> {
    let Loaded { t, order } = a.table.load_checked()?;
    let reduct = if let Some(p) = &a.reduct_from {
        reduct_from_report(p, &t)?
    } else if !a.attrs.is_empty() {
        t.condition_indices(&a.attrs)?
    } else {
        twi_squeeze(&t, Some(&order)).map_err(squeeze_err)?.reduct
    };
    // boundary rows cannot be value-reduced; only the positive part is
    let (pos, _) = separate_inconsistent(&t);
    let mut unresolved = None;
    let rt = match a.mode {
        Mode::Complete => {
            let dir = if a.reverse { ScanDirection::RightToLeft } else { ScanDirection::LeftToRight };
            value_reduce_complete_traced(&pos, &reduct, dir).map_err(valred_err)?.table
        }
        Mode::IncompleteL2r => value_reduce_incomplete(&pos, &reduct, ScanDirection::LeftToRight).map_err(valred_err)?,
        Mode::IncompleteR2l => value_reduce_incomplete(&pos, &reduct, ScanDirection::RightToLeft).map_err(valred_err)?,
        Mode::Approx => {
            let x = value_reduce_approx(&pos, &reduct).map_err(valred_err)?;
            unresolved = Some(x.unresolved);
            x.table
        }
    };
    let mut v = reduced_json(&rt);
    if let Some(u) = &unresolved {
        v["unresolved_row_ids"] = json!(u);
    }
    emit(a.table.format.unwrap_or(Format::Text), &v, || rt.to_csv())
}

fn approx(a: &ApproxArgs) -> anyhow::Result<()> {
    let Loaded { t, .. } = a.table.load()?;
    let b = t.condition_indices(&a.attrs)?;
    let e = approx_error(&t, &b);
    let positive = oracle::positive_region(&t, t.condition()).len() as u64;
    let lost = if positive == 0 { 0 } else { e.numer() * positive / e.denom() };
    let v = json!({
        "schema": 1,
        "attrs": t.names(&b),
        "lost": lost,
        "positive": positive,
        "numerator": e.numer(),
        "denominator": e.denom(),
        "value": *e.numer() as f64 / *e.denom() as f64,
    });
    emit(a.table.format.unwrap_or(Format::Json), &v, || format!("{lost}/{positive}\n"))
}

fn variety_json(v: VarietyValue) -> Value {
    json!({"ordered": v.ordered as u64, "unordered": v.unordered as u64, "log2": v.log_units(2.0)})
}

fn measure(a: &MeasureArgs) -> anyhow::Result<()> {
    let Loaded { t, .. } = a.table.load()?;
    let x = if a.attrs.is_empty() { t.condition().to_vec() } else { t.condition_indices(&a.attrs)? };
    let y = if a.against.is_empty() {
        t.decision().to_vec()
    } else {
        a.against.iter().map(|n| t.attr_index(n)).collect::<Result<_, _>>()?
    };
    let fx: Vec<Vec<u32>> = (0..t.n_rows()).map(|r| t.tuple(r, &x)).collect();
    let fy: Vec<Vec<u32>> = (0..t.n_rows()).map(|r| t.tuple(r, &y)).collect();
    let vx = variety(&PartitionStats::from_labels(&fx))?;
    let vy = variety(&PartitionStats::from_labels(&fy))?;
    let vm = variety(&meet(&fx, &fy)?)?;
    let cond = conditional_variety(&fx, &fy)?;
    let mutual = mutual_variety(&fx, &fy)?;
    let v = json!({
        "schema": 1,
        "rows": t.n_rows(),
        "attrs": t.names(&x),
        "against": t.names(&y),
        "variety": variety_json(vx),
        "against_variety": variety_json(vy),
        "meet_variety": variety_json(vm),
        "conditional_ordered": cond as u64,
        "mutual_ordered": mutual as u64,
    });
    emit(a.table.format.unwrap_or(Format::Json), &v, || {
        format!(
            "variety: {}\nagainst: {}\nmeet: {}\nconditional: {cond}\nmutual: {mutual}\n",
            vx.ordered, vy.ordered, vm.ordered
        )
    })
}

fn read_model(m: &ModelArgs) -> anyhow::Result<ReducedTable> {
    ReducedTable::from_csv(open(&m.model)?, &decision_columns(&m.decision))
        .with_context(|| format!("cannot read reduced table {}", m.model.display()))
}

fn tree_for(rt: &ReducedTable, order: &[String]) -> anyhow::Result<ClassifierTree> {
    let names: Vec<String> =
        if order.is_empty() { rt.attributes.iter().map(|a| a.name.clone()).collect() } else { order.to_vec() };
    build_tree_by_names(rt, &names).map_err(|e| anyhow!("{e}: {names:?}"))
}

fn rules(m: &ModelArgs) -> anyhow::Result<()> {
    let rt = read_model(m)?;
    let rules = to_rules(&rt);
    let text: Vec<String> = rules.iter().map(|r| format_rule(&rt, r)).collect();
    emit(m.format, &json!({"schema": 1, "rules": text}), || text.iter().map(|l| format!("{l}\n")).collect())
}

fn tree(a: &TreeArgs) -> anyhow::Result<()> {
    let rt = read_model(&a.model)?;
    let tree = tree_for(&rt, &a.order)?;
    emit(a.model.format, &tree.to_json(), || tree.to_text())
}

fn outcome_json(rt: &ReducedTable, o: &Outcome) -> Value {
    match o {
        Outcome::Decision(d) => json!({"outcome": "decision", "decision": rt.decision_text(d)}),
        Outcome::Ambiguous(p) => json!({
            "outcome": "ambiguous",
            "probabilities": p.iter().map(|(d, x)| json!({"decision": rt.decision_text(d), "probability": x})).collect::<Vec<_>>(),
        }),
        Outcome::NoMatch => json!({"outcome": "no_match"}),
    }
}

fn classify(a: &ClassifyArgs) -> anyhow::Result<()> {
    let model = read_model(&a.model)?;
    let dec: Vec<String> = model.decision_attributes.iter().map(|x| x.name.clone()).collect();
    let mut config = IngestConfig { decision: DecisionColumns::Named(dec), missing: a.missing.clone(), ..Default::default() };
    let t = match read_table(&a.data, &config) {
        Ok(t) => t,
        Err(_) => {
            config.decision = DecisionColumns::None;
            read_table(&a.data, &config)?
        }
    };
    let labelled = !t.decision().is_empty();
    let rt = model.reencode(&t)?;
    let attrs = rt.attr_indices(&t)?;
    let tree = tree_for(&rt, &a.order)?;
    let rule_list: Vec<Rule> = to_rules(&rt);
    let mut results = Vec::new();
    let mut correct = 0;
    let mut lines = String::new();
    for r in 0..t.n_rows() {
        let obj: Vec<Option<u32>> = attrs.iter().map(|&c| Some(t.value(r, c)).filter(|&v| v != STAR)).collect();
        let o = match a.via {
            Via::Tree => tree.classify(&obj),
            Via::Rules => classify_rules(&rule_list, &obj),
        };
        let mut v = outcome_json(&rt, &o);
        v["row_id"] = json!(t.row_id(r));
        let shown = match &o {
            Outcome::Decision(d) => rt.decision_text(d).join(","),
            Outcome::Ambiguous(p) => {
                p.iter().map(|(d, x)| format!("{}:{x:.2}", rt.decision_text(d).join(","))).collect::<Vec<_>>().join(" ")
            }
            Outcome::NoMatch => "?".to_owned(),
        };
        if labelled {
            let want = t.decision_text(&t.decision_tuple(r));
            let ok = matches!(&o, Outcome::Decision(d) if rt.decision_text(d) == want);
            correct += usize::from(ok);
            v["expected"] = json!(want);
            v["correct"] = json!(ok);
        }
        lines += &format!("{}\t{shown}\n", t.row_id(r));
        results.push(v);
    }
    let mut v = json!({"schema": 1, "results": results});
    if labelled {
        v["correct"] = json!(correct);
        v["total"] = json!(t.n_rows());
    }
    emit(a.model.format, &v, || lines)
}

fn budget_err(e: OracleError) -> anyhow::Error {
    exit(4, e.to_string(), None)
}

fn oracle_check(a: &OracleArgs) -> anyhow::Result<()> {
    let Loaded { t, order } = a.table.load()?;
    let budget = OracleBudget { max_rows: a.max_rows, max_attrs: a.max_attrs, ..Default::default() };
    let fast = twi_squeeze(&t, Some(&order)).map_err(squeeze_err)?;
    let (ok, v) = match a.what {
        What::Reduct => {
            let all = oracle::all_reducts(&t, &budget).map_err(budget_err)?;
            let mut r = fast.reduct.clone();
            r.sort_unstable();
            let ok = all.contains(&r);
            let names: Vec<Vec<String>> = all.iter().map(|x| t.names(x)).collect();
            (ok, json!({"reduct": t.names(&fast.reduct), "all_reducts": names}))
        }
        What::Core => {
            let want = oracle::core(&t, &budget).map_err(budget_err)?;
            let got = compute_core(&t);
            (got == want, json!({"core": t.names(&got), "oracle_core": t.names(&want)}))
        }
        What::Values => {
            if t.n_rows() > budget.max_rows {
                return Err(budget_err(OracleError::BudgetExceeded {
                    what: "rows",
                    actual: t.n_rows(),
                    limit: budget.max_rows,
                }));
            }
            let got = core_values(&t, &fast.reduct);
            let want = oracle::core_values(&t, &fast.reduct);
            let show = |s: &std::collections::BTreeSet<(u32, usize)>| -> Vec<Value> {
                s.iter().map(|&(id, c)| json!({"row_id": id, "attribute": t.name(c)})).collect()
            };
            (got == want, json!({"reduct": t.names(&fast.reduct), "core_values": show(&got), "oracle_core_values": show(&want)}))
        }
    };
    let mut v = v;
    v["schema"] = json!(1);
    v["agree"] = json!(ok);
    emit(a.table.format.unwrap_or(Format::Json), &v, || format!("{}\n", if ok { "agree" } else { "DISAGREE" }))?;
    if ok {
        Ok(())
    } else {
        Err(exit(1, "fast result disagrees with the oracle", None))
    }
}

/// Consistent table: attribute j takes 2 + j % 5 values; the decision is a
/// function of four of the attributes.
fn synthetic(n: usize, seed: u64) -> anyhow::Result<DecisionTable> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s: String = (0..20).map(|j| format!("c{j},")).collect();
    s.push_str("D\n");
    for _ in 0..n {
        let row: Vec<u32> = (0..20).map(|j| rng.gen_range(0..2 + j % 5)).collect();
        for x in &row {
            s.push_str(&format!("{x},"));
        }
        s.push_str(&format!("{}\n", (row[0] * 7 + row[3] * 3 + row[11] + row[17]) % 4));
    }
    Ok(load_table(s.as_bytes(), &IngestConfig::default())?)
}

fn bench(a: &BenchArgs) -> anyhow::Result<()> {
    let t = match (&a.input, a.synthetic) {
        (Some(p), _) => read_table(p, &IngestConfig { decision: decision_columns(&a.decision), ..Default::default() })?,
        (None, Some(n)) => synthetic(n, a.seed)?,
        (None, None) => bail!("give an input table or --synthetic ROWS"),
    };
    let mut times = Vec::new();
    let mut last = None;
    for _ in 0..a.repeat.max(1) {
        let start = Instant::now();
        let r = twi_squeeze(&t, None).map_err(squeeze_err)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        last = Some(r);
    }
    let r = last.expect("at least one run");
    let mut sorted = times.clone();
    sorted.sort_by(f64::total_cmp);
    let layers = |ls: &[demarc_core::squeeze::LayerStat]| -> Vec<Value> {
        ls.iter()
            .map(|l| {
                json!({"attribute": l.attr.map(|x| t.name(x)), "sorted_rows": l.sorted_rows, "tasks": l.tasks, "members": l.members})
            })
            .collect()
    };
    let counts: Vec<u64> = r.stats.r2l.iter().filter(|l| l.attr.is_some()).map(|l| l.sorted_rows).collect();
    let v = json!({
        "schema": 1,
        "rows": t.n_rows(),
        "attributes": t.condition().len(),
        "median_ms": sorted[sorted.len() / 2],
        "runs_ms": times,
        "reduct": t.names(&r.reduct),
        "r2l_layers": layers(&r.stats.r2l),
        "l2r_layers": layers(&r.stats.l2r),
        "taper_off": counts.windows(2).all(|w| w[0] >= w[1]),
    });
    emit(Format::Json, &v, String::new)
}

fn decisionize_cmd(a: &DecisionizeArgs) -> anyhow::Result<()> {
    let config =
        IngestConfig { decision: DecisionColumns::None, missing: a.missing.clone(), delimiter: parse_delimiter(&a.delimiter)? };
    let t = read_table(&a.input, &config)?;
    io::stdout().lock().write_all(decisionize(&t).to_csv(&a.missing).as_bytes())?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.cmd {
        Cmd::Reduce(a) => reduce(a),
        Cmd::HeuristicReduce(a) => heuristic(a),
        Cmd::Core(a) => attr_list(a, "core", compute_core),
        Cmd::Irrelevant(a) => attr_list(a, "irrelevant", find_irrelevant),
        Cmd::ValueReduce(a) => value_reduce(a),
        Cmd::ApproxError(a) => approx(a),
        Cmd::Measure(a) => measure(a),
        Cmd::Rules(a) => rules(a),
        Cmd::Tree(a) => tree(a),
        Cmd::Classify(a) => classify(a),
        Cmd::Oracle { cmd: OracleCmd::Check(a) } => oracle_check(a),
        Cmd::Bench(a) => bench(a),
        Cmd::Decisionize(a) => decisionize_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|x| x.kind() == io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, report) = match e.downcast_ref::<Exit>() {
                Some(x) => (x.code, x.report.clone()),
                None => (2, None),
            };
            if let Some(r) = report {
                let _ = writeln!(io::stdout().lock(), "{}", serde_json::to_string_pretty(&r).unwrap_or_default());
            }
            eprintln!("demarc: {e:#}");
            ExitCode::from(code)
        }
    }
}
