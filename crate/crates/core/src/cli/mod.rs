//! Command-line front end: `ncagm table | solve | certify`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::certify::{
    build_m2_certificate, eval_instance, farkas_check_detailed, instance_from_json,
    sos_from_json, sos_to_json, verify_sos_detailed, DEFAULT_INSTANCE_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::ncpoly::falling_factorial;
use crate::sdp::json::{farkas_from_json, farkas_to_json, read_header, solution_to_json};
use crate::sdp::{export_sdpa, Sign, SolveStatus, SolverOptions};
use crate::sos::{assemble_sdp, refute_lambda, solve_bound};

pub const EXIT_OK: i32 = 0;
/// A Farkas search that found no ray, i.e. the target looks feasible.
pub const EXIT_NO_CERTIFICATE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_INVALID_CERTIFICATE: i32 = 4;
pub const EXIT_INSTANCE_VIOLATION: i32 = 5;

/// All `(m, n)` with `m <= n <= max_n`, ordered by `n` then `m`.
pub fn rows_up_to(max_n: usize) -> Vec<(usize, usize)> {
    (1..=max_n).flat_map(|n| (1..=n).map(move |m| (m, n))).collect()
}

#[derive(Parser, Debug)]
#[command(name = "ncagm", version, about = "Noncommutative AM-GM bounds via semidefinite programming")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve both λ-problems for a list of (m, n) and compare with n!/(n-m)!.
    Table(TableArgs),
    /// Compile one λ-problem, export it in SDPA format and solve it.
    Solve(SolveArgs),
    /// Produce and check certificates.
    #[command(subcommand)]
    Certify(CertifyCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolverFlags {
    /// Reduce the problem under the symmetric group before solving.
    #[arg(long, value_enum, default_value = "on")]
    pub symmetry: OnOff,
    /// Solver tolerance on relative gap and residuals.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Rows as comma-separated `MxN` pairs, e.g. `2x2,3x3`.
    #[arg(long, value_delimiter = ',', value_parser = parse_row)]
    pub rows: Option<Vec<(usize, usize)>>,
    /// Use every row up to n = 5 instead of n = 4.
    #[arg(long)]
    pub heavy: bool,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Relative slack for the verdict: VIOLATION iff max(λ₁, λ₂) > bound·(1 + verdict_tol).
    #[arg(long, default_value_t = 1e-6)]
    pub verdict_tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "plus")]
    pub sign: SignArg,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Write the SDPA file and stop.
    #[arg(long)]
    pub export_only: bool,
    /// SDPA output path (default `lambda_mM_nN_SIGN.dat-s`).
    #[arg(long)]
    pub sdpa: Option<PathBuf>,
    /// Solution JSON path (default `lambda_mM_nN_SIGN.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Do not write the solution JSON.
    #[arg(long)]
    pub no_json: bool,
}

#[derive(Subcommand, Debug)]
pub enum CertifyCommand {
    /// Refute a value of λ with a Farkas certificate and re-check it.
    Farkas(FarkasArgs),
    /// Build and exactly verify the closed-form m = 2 certificate.
    SosM2(SosM2Args),
    /// Evaluate the inequalities on matrices from a JSON instance file.
    CheckInstance(InstanceArgs),
    /// Re-check a certificate JSON written by `farkas` or `sos-m2`.
    Recheck(RecheckArgs),
}

#[derive(Args, Debug)]
pub struct FarkasArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "plus")]
    pub sign: SignArg,
    /// The value of λ to refute.
    #[arg(long)]
    pub lambda: f64,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Relative PSD tolerance of the re-check.
    #[arg(long, default_value_t = 1e-6)]
    pub check_tol: f64,
    /// Certificate JSON path (default `farkas_mM_nN.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SosM2Args {
    #[arg(long)]
    pub n: usize,
    /// Certificate JSON path (default `sos_m2_nN.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InstanceArgs {
    /// JSON file `{"n": .., "m": .., "matrices": [..]}`.
    #[arg(long)]
    pub input: PathBuf,
    /// Override the degree stored in the file.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_INSTANCE_TOLERANCE)]
    pub tol: f64,
    /// Report path (default: the input path with `.report.json` appended).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RecheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Relative PSD tolerance for Farkas certificates.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

fn parse_row(s: &str) -> std::result::Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(['x', 'X', ':'])
        .ok_or_else(|| format!("expected MxN, found {s:?}"))?;
    let m: usize = m.trim().parse().map_err(|_| format!("bad m in {s:?}"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad n in {s:?}"))?;
    Ok((m, n))
}

/// Validated run parameters shared by the subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub sign: Sign,
    pub lambda_target: Option<f64>,
    pub symmetry: bool,
    pub tolerance: f64,
    pub output_format: OutputFormat,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: None,
            n: None,
            sign: Sign::Plus,
            lambda_target: None,
            symmetry: true,
            tolerance: 1e-8,
            output_format: OutputFormat::Text,
            input: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::param("tolerance must be positive"));
        }
        if let (Some(m), Some(n)) = (self.m, self.n) {
            check_pair(m, n)?;
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.tolerance,
            ..SolverOptions::default()
        }
    }
}

fn check_pair(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::param(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    if n > 8 {
        return Err(Error::param(format!("n = {n} is beyond the supported range 1..=8")));
    }
    Ok(())
}

/// One row of the λ table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub m: usize,
    pub n: usize,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub bound: f64,
    pub verdict: String,
}

impl TableRow {
    fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "n": self.n,
            "lambda1": self.lambda1.map(fmt_lambda),
            "lambda2": self.lambda2.map(fmt_lambda),
            "bound": fmt_lambda(self.bound),
            "verdict": self.verdict,
        })
    }
}

fn fmt_lambda(v: f64) -> String {
    format!("{v:.6}")
}

fn threads() -> usize {
    std::env::var("NCAGM_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&t| t > 0)
        .unwrap_or(1)
}

fn table_row(m: usize, n: usize, config: &RunConfig, verdict_tol: f64) -> TableRow {
    let bound = falling_factorial(n, m) as f64;
    let opts = config.solver_options();
    let mut lambdas = [None, None];
    let mut failures = Vec::new();
    for (slot, sign) in [Sign::Minus, Sign::Plus].into_iter().enumerate() {
        match solve_bound(m, n, sign, config.symmetry, &opts) {
            Ok(r) if r.solution.status == SolveStatus::Optimal => lambdas[slot] = Some(r.lambda()),
            Ok(r) => failures.push(format!("{sign}: {}", r.solution.status)),
            Err(e) => failures.push(format!("{sign}: {e}")),
        }
    }
    let verdict = if !failures.is_empty() {
        format!("error ({})", failures.join("; "))
    } else {
        let worst = lambdas.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        if worst > bound * (1.0 + verdict_tol) {
            "VIOLATION".to_string()
        } else {
            "ok".to_string()
        }
    };
    TableRow {
        m,
        n,
        lambda1: lambdas[0],
        lambda2: lambdas[1],
        bound,
        verdict,
    }
}

/// Solves both λ-problems for every row. Rows run concurrently on up to
/// `NCAGM_THREADS` threads; output order follows `rows`.
pub fn cmd_table(rows: &[(usize, usize)], config: &RunConfig, verdict_tol: f64) -> Result<Vec<TableRow>> {
    config.validate()?;
    for &(m, n) in rows {
        check_pair(m, n)?;
    }
    let workers = threads().min(rows.len().max(1));
    let mut out: Vec<Option<TableRow>> = vec![None; rows.len()];
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results = std::sync::Mutex::new(&mut out);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                let Some(&(m, n)) = rows.get(k) else { break };
                let row = table_row(m, n, config, verdict_tol);
                results.lock().expect("no panics while holding the lock")[k] = Some(row);
            });
        }
    });
    Ok(out.into_iter().map(|r| r.expect("every row solved")).collect())
}

pub fn render_table(rows: &[TableRow], format: OutputFormat) -> String {
    let opt = |v: Option<f64>| v.map(fmt_lambda).unwrap_or_else(|| "nan".into());
    match format {
        OutputFormat::Csv => {
            let mut s = String::from("m,n,lambda1,lambda2,bound,verdict\n");
            for r in rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.m,
                    r.n,
                    opt(r.lambda1),
                    opt(r.lambda2),
                    fmt_lambda(r.bound),
                    r.verdict
                ));
            }
            s
        }
        OutputFormat::Json => {
            let v = Value::Array(rows.iter().map(TableRow::to_json).collect());
            serde_json::to_string_pretty(&v).expect("serializable") + "\n"
        }
        OutputFormat::Text => {
            let mut s = format!(
                "{:>2} {:>2} {:>12} {:>12} {:>8}  verdict\n",
                "m", "n", "lambda1", "lambda2", "bound"
            );
            for r in rows {
                let o = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
                s.push_str(&format!(
                    "{:>2} {:>2} {:>12} {:>12} {:>8}  {}\n",
                    r.m,
                    r.n,
                    o(r.lambda1),
                    o(r.lambda2),
                    r.bound,
                    r.verdict
                ));
            }
            s
        }
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, v)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Compiles, exports and (unless `export_only`) solves one λ-problem.
pub fn cmd_build_solve(args: &SolveArgs) -> Result<i32> {
    let sign: Sign = args.sign.into();
    let config = RunConfig {
        m: Some(args.m),
        n: Some(args.n),
        sign,
        symmetry: args.solver.symmetry == OnOff::On,
        tolerance: args.solver.tol,
        ..RunConfig::default()
    };
    config.validate()?;
    let (m, n) = (args.m, args.n);
    let stem = format!("lambda_m{m}_n{n}_{sign}");
    let problem = assemble_sdp(m, n, sign)?;
    let sdpa = args
        .sdpa
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.dat-s")));
    export_sdpa(&problem, BufWriter::new(File::create(&sdpa)?))?;
    println!(
        "wrote {} ({} constraints, blocks {:?})",
        sdpa.display(),
        problem.num_constraints(),
        problem.block_dims()
    );
    if args.export_only {
        return Ok(EXIT_OK);
    }
    let r = solve_bound(m, n, sign, config.symmetry, &config.solver_options())?;
    let sol = &r.solution;
    println!(
        "lambda = {:.6}  gap = {:.2e}  status = {}  iterations = {}",
        sol.objective_primal, sol.gap, sol.status, sol.iterations
    );
    if !args.no_json {
        let out = args
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{stem}.json")));
        write_json(&out, &solution_to_json(m, n, sign, sol))?;
        println!("wrote {}", out.display());
    }
    Ok(if sol.status == SolveStatus::Optimal {
        EXIT_OK
    } else {
        EXIT_SOLVER
    })
}

pub fn cmd_certify(cmd: &CertifyCommand) -> Result<i32> {
    match cmd {
        CertifyCommand::Farkas(a) => certify_farkas(a),
        CertifyCommand::SosM2(a) => certify_sos_m2(a),
        CertifyCommand::CheckInstance(a) => certify_instance(a),
        CertifyCommand::Recheck(a) => recheck(a),
    }
}

fn certify_farkas(a: &FarkasArgs) -> Result<i32> {
    let sign: Sign = a.sign.into();
    let config = RunConfig {
        m: Some(a.m),
        n: Some(a.n),
        sign,
        lambda_target: Some(a.lambda),
        symmetry: a.solver.symmetry == OnOff::On,
        tolerance: a.solver.tol,
        ..RunConfig::default()
    };
    config.validate()?;
    let (problem, cert) = refute_lambda(
        a.m,
        a.n,
        sign,
        a.lambda,
        config.symmetry,
        &config.solver_options(),
        a.check_tol,
    )?;
    let Some(cert) = cert else {
        println!(
            "no certificate: lambda = {} could not be refuted (it appears feasible)",
            a.lambda
        );
        return Ok(EXIT_NO_CERTIFICATE);
    };
    let check = match farkas_check_detailed(&problem, &cert, a.check_tol) {
        Ok(c) => c,
        Err(e) => {
            println!("{e}");
            return Ok(EXIT_INVALID_CERTIFICATE);
        }
    };
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("farkas_m{}_n{}.json", a.m, a.n)));
    write_json(&out, &farkas_to_json(a.m, a.n, sign, &cert))?;
    println!(
        "margin = {:.6e}  psd_defect = {:.3e}  scale = {:.3e}  multipliers = {}",
        check.margin,
        check.psd_defect,
        check.scale,
        cert.y.len()
    );
    println!("wrote {}", out.display());
    if check.certifies_infeasibility() {
        println!("lambda = {} is infeasible", a.lambda);
        Ok(EXIT_OK)
    } else {
        println!("margin is not positive; not a certificate");
        Ok(EXIT_INVALID_CERTIFICATE)
    }
}

fn certify_sos_m2(a: &SosM2Args) -> Result<i32> {
    let cert = build_m2_certificate(a.n)?;
    let v = verify_sos_detailed(&cert)?;
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("sos_m2_n{}.json", a.n)));
    write_json(&out, &sos_to_json(&cert))?;
    println!("wrote {}", out.display());
    report_sos(&v, &cert.lambda.to_string())
}

fn report_sos(v: &crate::certify::SosVerification, lambda: &str) -> Result<i32> {
    if v.is_valid() {
        println!("exact identity verified, λ = {lambda}");
        return Ok(EXIT_OK);
    }
    if !v.identity {
        println!("identity fails at words {}", v.mismatched_words.join(", "));
    }
    for (i, ok) in v.psd.iter().enumerate() {
        if !ok {
            println!("Gram block {} is not positive semidefinite", i + 1);
        }
    }
    Ok(EXIT_INVALID_CERTIFICATE)
}

fn certify_instance(a: &InstanceArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&a.input)?;
    let v: Value = serde_json::from_str(&text)?;
    let (m_file, mats) = instance_from_json(&v)?;
    let m = a.m.unwrap_or(m_file);
    let report = eval_instance(&mats, m, a.tol)?;
    let out = a.out.clone().unwrap_or_else(|| {
        let mut p = a.input.clone().into_os_string();
        p.push(".report.json");
        PathBuf::from(p)
    });
    write_json(&out, &report.to_json())?;
    println!(
        "n = {}  m = {}  min_eig = {:.12}  max_eig = {:.12}  bound = {}",
        report.n, report.m, report.min_eig, report.max_eig, report.bound
    );
    if let Some(lb) = report.improved_lower {
        println!("improved lower bound = {lb}");
    }
    if !report.feasible() {
        println!("instance violates the hypotheses (A_i ⪰ 0, ΣA_i ⪯ nI)");
        return Ok(EXIT_INSTANCE_VIOLATION);
    }
    if report.violations.is_empty() {
        println!("all applicable bounds hold");
        Ok(EXIT_OK)
    } else {
        for v in &report.violations {
            println!("violated: {v}");
        }
        Ok(EXIT_INSTANCE_VIOLATION)
    }
}

fn recheck(a: &RecheckArgs) -> Result<i32> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&a.input)?)?;
    let (kind, ..) = read_header(&v)?;
    match kind.as_str() {
        "farkas" => {
            let (m, n, sign, cert) = farkas_from_json(&v)?;
            let problem = assemble_sdp(m, n, sign)?;
            match farkas_check_detailed(&problem, &cert, a.tol) {
                Ok(c) if c.certifies_infeasibility() => {
                    println!("margin = {:.6e}  psd_defect = {:.3e}", c.margin, c.psd_defect);
                    println!("lambda = {} is infeasible", cert.lambda_target);
                    Ok(EXIT_OK)
                }
                Ok(c) => {
                    println!("margin = {:.6e} is not positive; not a certificate", c.margin);
                    Ok(EXIT_INVALID_CERTIFICATE)
                }
                Err(e) => {
                    println!("{e}");
                    Ok(EXIT_INVALID_CERTIFICATE)
                }
            }
        }
        "sos" => {
            let cert = sos_from_json(&v)?;
            let check = verify_sos_detailed(&cert)?;
            report_sos(&check, &cert.lambda.to_string())
        }
        other => Err(Error::param(format!("cannot recheck a record of kind {other:?}"))),
    }
}

fn cmd_table_args(a: &TableArgs) -> Result<i32> {
    let rows = match (&a.rows, a.heavy) {
        (Some(r), _) => r.clone(),
        (None, false) => rows_up_to(4),
        (None, true) => rows_up_to(5),
    };
    let config = RunConfig {
        symmetry: a.solver.symmetry == OnOff::On,
        tolerance: a.solver.tol,
        output_format: a.format,
        output: a.out.clone(),
        ..RunConfig::default()
    };
    let table = cmd_table(&rows, &config, a.verdict_tol)?;
    write_text(config.output.as_deref(), &render_table(&table, config.output_format))?;
    let failed = table.iter().any(|r| r.verdict.starts_with("error"));
    Ok(if failed { EXIT_SOLVER } else { EXIT_OK })
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Table(a) => cmd_table_args(a),
        Command::Solve(a) => cmd_build_solve(a),
        Command::Certify(c) => cmd_certify(c),
    };
    match result {
        Ok(code) => code,
        Err(e @ (Error::Parameter(_) | Error::IndexOutOfRange(_))) => {
            eprintln!("ncagm: usage error: {e}");
            EXIT_USAGE
        }
        Err(e @ Error::InvalidCertificate(_)) => {
            eprintln!("ncagm: {e}");
            EXIT_INVALID_CERTIFICATE
        }
        Err(e) => {
            eprintln!("ncagm: {e}");
            EXIT_SOLVER
        }
    }
}
