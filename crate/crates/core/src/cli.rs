//! The `dgp` command-line tool.
//!
//! Every command prints one envelope: JSON by default, or CSV or plain text
//! with `--format`. The JSON envelope holds the command name, a provenance
//! block (tool version and the inputs that determine the result) and the
//! payload. Output is a pure function of the arguments.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure or
//! non-convergence, 3 a reproduced table outside tolerance.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::data::{self, FrequencyTable, YEAR_SUMMARIES};
use crate::distribution::{DgpParams, Moment, MomentSpec, SampleSeed};
use crate::error::Error;
use crate::estimation::{fit_mle, FitResult, Model};
use crate::gof::{self, MergeRule, DEFAULT_REPLICATES};
use crate::reproduce::{self, TableReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_REPRODUCTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dgp", version, about = "Discrete generalized Pareto and discrete Lomax count models")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a distribution function.
    Dist(DistArgs),
    /// Fit a model by maximum likelihood.
    Fit(FitArgs),
    /// Fit, then run a goodness-of-fit test.
    Gof(GofArgs),
    /// Draw a sample and print its frequency table.
    Simulate(SimulateArgs),
    /// Recompute a reference table and diff it against the published values.
    Reproduce(ReproduceArgs),
    /// List or export the bundled datasets.
    #[command(subcommand)]
    Data(DataCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistOp {
    Pmf,
    Cdf,
    Sf,
    Quantile,
    Hazard,
    Moment,
    Dispersion,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub mu: u64,
}

impl ParamArgs {
    fn params(&self) -> Result<DgpParams, Error> {
        DgpParams::new(self.alpha, self.lambda, self.mu)
    }
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(value_enum)]
    pub op: DistOp,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Point of evaluation.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
    pub x: Option<i64>,
    /// Inclusive range `lo..hi`, one output row per integer.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(i64, i64)>,
    /// Probability level for `quantile`.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Order for `moment`.
    #[arg(long, default_value_t = 1)]
    pub order: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Dgp,
    Dlo,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Dgp => Model::Dgp,
            ModelArg::Dlo => Model::Dlo,
        }
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file path, or `bundled:<name>`.
    #[arg(long)]
    pub data: String,
    #[arg(long, value_enum, default_value_t = ModelArg::Dgp)]
    pub model: ModelArg,
    /// Location override; defaults to the sample minimum (dgp) or 0 (dlo).
    #[arg(long)]
    pub mu: Option<u64>,
}

impl DataArgs {
    fn location(&self) -> Option<u64> {
        self.mu.or(Model::from(self.model).location())
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Also write `value,observed,expected` rows for the fitted model.
    #[arg(long)]
    pub emit_fit_curve: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestArg {
    Chi2,
    Ks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MergeArg {
    Observed,
    Expected,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub test: TestArg,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Chi-square bin merging rule.
    #[arg(long, value_enum, default_value_t = MergeArg::Observed)]
    pub merge: MergeArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(4..=7))]
    pub table: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
}

#[derive(Debug, Subcommand)]
pub enum DataCommand {
    /// Bundled dataset names with their sizes.
    List,
    /// Print a bundled dataset as CSV.
    Export { name: String },
}

fn parse_grid(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    if hi < lo {
        return Err(format!("empty grid {lo}..{hi}"));
    }
    if hi - lo > 10_000_000 {
        return Err("grid longer than 10^7 points".into());
    }
    Ok((lo, hi))
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<data::DataError> for Failure {
    fn from(e: data::DataError) -> Self {
        Failure::Lib(e.into())
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(Error::Numerical(_) | Error::Degenerate(_)) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

/// A rendered command result.
struct Output {
    command: &'static str,
    inputs: Value,
    payload: Value,
    csv: String,
    human: String,
    code: i32,
}

impl Output {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let envelope = json!({
                    "command": self.command,
                    "provenance": {
                        "tool": "dgp",
                        "version": env!("CARGO_PKG_VERSION"),
                        "inputs": self.inputs,
                    },
                    "result": self.payload,
                });
                let mut s = serde_json::to_string_pretty(&envelope).expect("json values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Human => self.human.clone(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Parses `args` (including the program name), runs the command and writes
/// to `out` / `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, err) {
        Ok(output) => {
            let _ = out.write_all(output.render(cli.format).as_bytes());
            output.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}

fn execute(command: &Command, err: &mut dyn Write) -> Result<Output, Failure> {
    match command {
        Command::Dist(a) => dist(a),
        Command::Fit(a) => fit(a),
        Command::Gof(a) => gof(a, err),
        Command::Simulate(a) => simulate(a),
        Command::Reproduce(a) => reproduce_cmd(a),
        Command::Data(DataCommand::List) => Ok(data_list()),
        Command::Data(DataCommand::Export { name }) => data_export(name),
    }
}

/// Reads `bundled:<name>` from the catalog, anything else as a CSV path.
pub fn load_data(source: &str) -> Result<FrequencyTable, Error> {
    if let Some(name) = source.strip_prefix("bundled:") {
        return Ok(data::bundled(name)?);
    }
    let bytes = std::fs::read(source)
        .map_err(|e| Error::domain(format!("cannot read `{source}`: {e}")))?;
    let label = Path::new(source)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(FrequencyTable::parse_csv(&bytes)?.with_label(label))
}

fn params_json(p: &DgpParams) -> Value {
    json!({ "alpha": p.alpha(), "lambda": p.lambda(), "mu": p.mu() })
}

fn dist(a: &DistArgs) -> Result<Output, Failure> {
    let p = a.params.params()?;
    let op = a.op;
    let name = format!("{op:?}").to_lowercase();
    let mut inputs = json!({ "op": name, "params": params_json(&p) });

    let (rows, header): (Vec<(Value, Value)>, &str) = match op {
        DistOp::Pmf | DistOp::Cdf | DistOp::Sf | DistOp::Hazard => {
            let xs: Vec<i64> = match (a.x, a.grid) {
                (Some(x), None) => vec![x],
                (None, Some((lo, hi))) => (lo..=hi).collect(),
                _ => return Err(Error::domain(format!("{name} needs --x or --grid")).into()),
            };
            inputs["x"] = json!(a.x);
            inputs["grid"] = json!(a.grid.map(|(lo, hi)| format!("{lo}..{hi}")));
            let mut rows = Vec::with_capacity(xs.len());
            for x in xs {
                let v = match op {
                    DistOp::Pmf => p.pmf(x),
                    DistOp::Cdf => p.cdf(x),
                    DistOp::Sf => p.survival(x)?,
                    _ => p.hazard(x)?,
                };
                rows.push((json!(x), json!(v)));
            }
            (rows, "x,value")
        }
        DistOp::Quantile => {
            let gamma = a.gamma.ok_or_else(|| Error::domain("quantile needs --gamma"))?;
            inputs["gamma"] = json!(gamma);
            (vec![(json!(gamma), json!(p.quantile(gamma)?))], "gamma,value")
        }
        DistOp::Moment => {
            inputs["order"] = json!(a.order);
            let m = p.raw_moment(MomentSpec::new(a.order, MomentSpec::DEFAULT_TOLERANCE)?);
            let v = match m {
                Moment::Finite(v) => json!(v),
                Moment::Divergent => json!("divergent"),
            };
            (vec![(json!(a.order), v)], "order,value")
        }
        DistOp::Dispersion => (vec![(Value::Null, json!(p.index_of_dispersion()?))], "value"),
    };

    let mut csv = format!("{header}\n");
    let mut human = String::new();
    for (key, value) in &rows {
        let v = plain(value);
        if key.is_null() {
            let _ = writeln!(csv, "{v}");
            let _ = writeln!(human, "{name}[{p}] = {v}");
        } else {
            let _ = writeln!(csv, "{},{v}", plain(key));
            let _ = writeln!(human, "{name}({}) = {v}", plain(key));
        }
    }
    let payload = match rows.as_slice() {
        [(_, v)] => json!({ "value": v }),
        _ => json!({ "rows": rows.iter().map(|(x, v)| json!({ "x": x, "value": v })).collect::<Vec<_>>() }),
    };
    Ok(Output { command: "dist", inputs, payload, csv, human, code: EXIT_OK })
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn fit_inputs(a: &DataArgs, data: &FrequencyTable) -> Value {
    json!({
        "data": a.data,
        "label": data.label(),
        "n": data.total(),
        "model": Model::from(a.model).name(),
        "mu": a.location(),
    })
}

fn fit_summary(fit: &FitResult) -> String {
    let p = &fit.params;
    let se = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |s| format!("{s:.4}"));
    let mut s = String::new();
    let _ = writeln!(s, "alpha  = {:.4} (se {})", p.alpha(), se(fit.standard_errors.map(|e| e.alpha)));
    let _ = writeln!(s, "lambda = {:.4} (se {})", p.lambda(), se(fit.standard_errors.map(|e| e.lambda)));
    let _ = writeln!(s, "mu     = {}", p.mu());
    let _ = writeln!(s, "loglik = {:.6}", fit.loglik);
    let _ = writeln!(
        s,
        "seed   = ({:.4}, {:.4}){}",
        fit.seed.alpha0,
        fit.seed.lambda0,
        if fit.seed.solved { "" } else { " fallback" }
    );
    let _ = writeln!(
        s,
        "{} after {} iterations",
        if fit.converged { "converged" } else { "NOT converged" },
        fit.iterations
    );
    s
}

fn fit_curve_csv(p: &DgpParams, data: &FrequencyTable) -> String {
    let n = data.total() as f64;
    let mut s = String::from("value,observed,expected\n");
    for x in p.mu()..=data.max_value() {
        let _ = writeln!(s, "{x},{},{}", data.count_of(x), n * p.pmf(x as i64));
    }
    s
}

fn fit(a: &FitArgs) -> Result<Output, Failure> {
    let data = load_data(&a.data.data)?;
    let result = fit_mle(&data, a.data.location())?;
    let mut inputs = fit_inputs(&a.data, &data);
    if let Some(path) = &a.emit_fit_curve {
        std::fs::write(path, fit_curve_csv(&result.params, &data))
            .map_err(|e| Failure::Io(format!("cannot write `{}`: {e}", path.display())))?;
        inputs["emit_fit_curve"] = json!(path.display().to_string());
    }
    let se = result.standard_errors;
    let cell = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    let csv = format!(
        "parameter,estimate,se\nalpha,{},{}\nlambda,{},{}\nmu,{},\n",
        result.params.alpha(),
        cell(se.map(|s| s.alpha)),
        result.params.lambda(),
        cell(se.map(|s| s.lambda)),
        result.params.mu(),
    );
    let code = if result.converged { EXIT_OK } else { EXIT_NUMERICAL };
    Ok(Output {
        command: "fit",
        inputs,
        payload: to_value(&result),
        csv,
        human: fit_summary(&result),
        code,
    })
}

fn gof(a: &GofArgs, err: &mut dyn Write) -> Result<Output, Failure> {
    let data = load_data(&a.data.data)?;
    let model = Model::from(a.data.model);
    let mut inputs = fit_inputs(&a.data, &data);
    match a.test {
        TestArg::Chi2 => {
            let rule = match a.merge {
                MergeArg::Observed => MergeRule::Observed,
                MergeArg::Expected => MergeRule::Expected,
            };
            inputs["test"] = json!("chi2");
            inputs["merge"] = to_value(&rule);
            let fit = fit_mle(&data, a.data.location())?;
            if !fit.converged {
                return Err(Error::Numerical("fit did not converge".into()).into());
            }
            let rep = gof::chi_square_test(&fit.params, &data, model.parameter_count(), rule)?;
            let mut csv = String::from("lo,hi,observed,expected\n");
            for b in &rep.bins.bins {
                let hi = b.hi.map_or_else(|| "inf".to_string(), |h| h.to_string());
                let _ = writeln!(csv, "{},{hi},{},{}", b.lo, b.observed, b.expected);
            }
            let human = format!(
                "chi2 = {:.3}, df = {}, critical(0.95) = {:.3}, p = {:.4}: {}\n",
                rep.statistic,
                rep.df,
                rep.critical_95,
                rep.p_value,
                if rep.reject { "reject at 0.05" } else { "not rejected at 0.05" }
            );
            let payload = json!({ "fit": to_value(&fit), "test": to_value(&rep) });
            Ok(Output { command: "gof", inputs, payload, csv, human, code: EXIT_OK })
        }
        TestArg::Ks => {
            inputs["test"] = json!("ks");
            inputs["replicates"] = json!(a.replicates);
            inputs["seed"] = json!(a.seed);
            let rep = gof::ks_bootstrap_test(&data, a.data.location(), a.replicates, a.seed)?;
            if rep.failure_warning {
                let _ = writeln!(
                    err,
                    "warning: {} of {} bootstrap refits failed",
                    rep.refit_failures, rep.replicates
                );
            }
            let csv = format!(
                "statistic,p_value,replicates,refit_failures,reject\n{},{},{},{},{}\n",
                rep.statistic, rep.p_value, rep.replicates, rep.refit_failures, rep.reject
            );
            let human = format!(
                "KS = {:.4}, bootstrap p = {:.4} ({} replicates, seed {}): {}\n",
                rep.statistic,
                rep.p_value,
                rep.replicates,
                rep.master_seed,
                if rep.reject { "reject at 0.05" } else { "not rejected at 0.05" }
            );
            Ok(Output { command: "gof", inputs, payload: to_value(&rep), csv, human, code: EXIT_OK })
        }
    }
}

fn simulate(a: &SimulateArgs) -> Result<Output, Failure> {
    let p = a.params.params()?;
    let values = p.sample(a.n, SampleSeed(a.seed))?;
    let table = FrequencyTable::from_values("simulated", values)?;
    let csv = table.to_csv();
    Ok(Output {
        command: "simulate",
        inputs: json!({ "params": params_json(&p), "n": a.n, "seed": a.seed }),
        payload: json!({ "entries": table.entries() }),
        human: csv.clone(),
        csv,
        code: EXIT_OK,
    })
}

fn reproduce_cmd(a: &ReproduceArgs) -> Result<Output, Failure> {
    let report = reproduce::reproduce(a.table, a.replicates, a.seed)?;
    let mut inputs = json!({ "table": a.table });
    if a.table == 7 {
        inputs["seed"] = json!(a.seed);
        inputs["replicates"] = json!(a.replicates);
    }
    let code = if report.passed() { EXIT_OK } else { EXIT_REPRODUCTION };
    Ok(Output {
        command: "reproduce",
        inputs,
        payload: to_value(&report),
        csv: report_csv(&report),
        human: report_human(&report),
        code,
    })
}

fn report_csv(r: &TableReport) -> String {
    let mut s = String::from("row,column,printed,computed,tolerance,pass\n");
    for c in &r.cells {
        let _ = writeln!(s, "{},{},{},{},{},{}", c.row, c.column, c.printed, c.computed, c.tolerance, c.pass);
    }
    s
}

fn report_human(r: &TableReport) -> String {
    let mut s = String::new();
    for c in &r.cells {
        let _ = writeln!(
            s,
            "{:<16} {:<10} printed {:>9} computed {:>12.6} {:>8} {}",
            c.row,
            c.column,
            c.printed,
            c.computed,
            c.tolerance.to_string(),
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    let failed = r.failures().count();
    let _ = writeln!(s, "table {}: {} of {} cells within tolerance", r.table, r.cells.len() - failed, r.cells.len());
    s
}

fn data_list() -> Output {
    let mut csv = String::from("name,n,min,max\n");
    let mut human = String::new();
    let mut rows = Vec::new();
    for name in data::dataset_names() {
        let t = data::bundled(name).expect("catalog entries are valid");
        let _ = writeln!(csv, "{name},{},{},{}", t.total(), t.min_value(), t.max_value());
        let _ = writeln!(human, "{name:<16} n = {:>4}  range {}..{}", t.total(), t.min_value(), t.max_value());
        rows.push(json!({ "name": name, "n": t.total(), "min": t.min_value(), "max": t.max_value() }));
    }
    Output {
        command: "data list",
        inputs: json!({}),
        payload: json!({ "datasets": rows, "years": to_value(&YEAR_SUMMARIES) }),
        csv,
        human,
        code: EXIT_OK,
    }
}

fn data_export(name: &str) -> Result<Output, Failure> {
    let t = data::bundled(name)?;
    let csv = t.to_csv();
    Ok(Output {
        command: "data export",
        inputs: json!({ "name": name }),
        payload: to_value(&t),
        human: csv.clone(),
        csv,
        code: EXIT_OK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("dgp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_parser() {
        assert_eq!(parse_grid("0..3"), Ok((0, 3)));
        assert_eq!(parse_grid("-2..1"), Ok((-2, 1)));
        assert!(parse_grid("3..0").is_err());
        assert!(parse_grid("3").is_err());
    }

    #[test]
    fn pmf_at_origin() {
        let (code, out, _) = run_capture(&["--format", "csv", "dist", "pmf", "--alpha", "1", "--lambda", "1", "--x", "0"]);
        assert_eq!(code, 0);
        assert_eq!(out, "x,value\n0,0.5\n");
    }

    #[test]
    fn validation_exit_code() {
        let (code, _, err) = run_capture(&["dist", "pmf", "--alpha", "-1", "--lambda", "1", "--x", "0"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(err.starts_with("error:"));
        let (code, _, _) = run_capture(&["dist", "pmf", "--alpha", "1"]);
        assert_eq!(code, EXIT_VALIDATION);
        let (code, _, _) = run_capture(&["reproduce", "--table", "3"]);
        assert_eq!(code, EXIT_VALIDATION);
    }
}
