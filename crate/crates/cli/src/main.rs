//! `fptdet`: closed-form thresholds, witness certificates and exact `ν`
//! computations from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 budget exhausted / unknown.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use fptdet::cache::{nu_cached, NuCache};
use fptdet::frobenius::{convergence_table_with, frobenius_spot_check, product_mod_bracket, Budget, NuOutcome, NuRecord};
use fptdet::witness::{build_certificate_for_k, verify_certificate, VerificationReport, WitnessCertificate};
use fptdet::{minimizing_k_and_u, Error, MatrixShape, Rational};
use serde_json::{json, Value};

/// `println!` that ignores a closed stdout (e.g. piped into `head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "fptdet", version, about = "F-pure thresholds of determinantal ideals")]
struct Cli {
    /// Machine-readable JSON on stdout; diagnostics go to stderr.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form threshold with its minimizing k and u.
    Fpt(ShapeArgs),
    /// Build, self-verify and emit the witness certificate.
    Delta {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Use this k instead of the minimizing one.
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
        /// Write the certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print initial forms.
        #[arg(long)]
        verbose: bool,
    },
    /// Check a certificate file.
    Verify { path: PathBuf },
    /// Exact nu(p^e) with a witness.
    Nu {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        exp: u32,
        #[command(flatten)]
        run: RunArgs,
        /// Also print the witness product reduced modulo the bracket power.
        #[arg(long)]
        verbose: bool,
    },
    /// nu(p^e)/p^e for e = 1..max-exp against the closed form.
    Table {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        max_exp: u32,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct ShapeArgs {
    /// m
    #[arg(long)]
    rows: usize,
    /// n
    #[arg(long)]
    cols: usize,
    /// t, the size of the minors
    #[arg(long)]
    size: usize,
}

impl ShapeArgs {
    fn shape(&self) -> Result<MatrixShape, Failure> {
        Ok(MatrixShape::new(self.rows, self.cols, self.size)?)
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON-lines result cache.
    #[arg(long, env = "FPTDET_CACHE")]
    cache: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000_000)]
    budget_nodes: u64,
    #[arg(long, default_value_t = 60.0)]
    budget_secs: f64,
}

impl RunArgs {
    fn budget(&self) -> Result<Budget, Failure> {
        if !(self.budget_secs.is_finite() && self.budget_secs > 0.0) {
            return Err(Failure::invalid("--budget-secs must be positive"));
        }
        Ok(Budget {
            max_nodes: self.budget_nodes,
            max_time: Duration::from_secs_f64(self.budget_secs),
            ..Budget::default()
        })
    }

    fn cache(&self) -> Option<NuCache> {
        self.cache.clone().map(NuCache::new)
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure { code: 2, message: msg.into() }
    }

    fn verification(msg: impl Into<String>) -> Self {
        Failure { code: 1, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let result = match cli.command {
        Command::Fpt(shape) => cmd_fpt(&shape, json),
        Command::Delta { shape, k, out, verbose } => cmd_delta(&shape, k, out, verbose, json),
        Command::Verify { path } => cmd_verify(&path, json),
        Command::Nu { shape, prime, exp, run, verbose } => cmd_nu(&shape, prime, exp, &run, verbose, json),
        Command::Table { shape, prime, max_exp, run } => cmd_table(&shape, prime, max_exp, &run, json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Six significant digits, for display next to an exact fraction.
fn decimal(r: Rational) -> String {
    let x = *r.numer() as f64 / *r.denom() as f64;
    if x == 0.0 {
        return "0.00000".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let places = (5 - magnitude).max(0) as usize;
    format!("{x:.places$}")
}

fn frac_json(r: Rational) -> Value {
    json!({ "num": *r.numer() as i64, "den": *r.denom() as i64 })
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string(v).expect("json value serializes"));
}

fn cmd_fpt(args: &ShapeArgs, json: bool) -> Result<u8, Failure> {
    let res = minimizing_k_and_u(args.shape()?)?;
    if json {
        print_json(&json!({ "fpt": frac_json(res.value), "k": res.k, "u": res.u }));
    } else {
        out!(
            "fpt = {}/{}, k = {}, u = {}  (≈ {}, display only)",
            res.value.numer(),
            res.value.denom(),
            res.k,
            res.u,
            decimal(res.value)
        );
    }
    Ok(0)
}

fn cmd_delta(args: &ShapeArgs, k: Option<i64>, out: Option<PathBuf>, verbose: bool, json: bool) -> Result<u8, Failure> {
    let shape = args.shape()?;
    let t = shape.t as i64;
    let k = match k {
        Some(k) if !(0..t).contains(&k) => {
            return Err(Failure::invalid(format!("--k {k} outside [0, {}]", t - 1)));
        }
        Some(k) => k,
        None => minimizing_k_and_u(shape)?.k,
    };
    let cert = build_certificate_for_k(shape, k)
        .map_err(|e| Failure::verification(format!("cannot build the witness for k = {k}: {e}")))?;
    let report = verify_certificate(&cert).map_err(|e| Failure::verification(format!("self-verification: {e}")))?;
    let text = cert.to_canonical_json();
    if let Some(path) = &out {
        std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))?;
    }

    if json {
        out!("{text}");
        eprintln!("{report}");
    } else {
        let prod = cert.product()?;
        out!("{shape}: k = {}, u = {}, case {}", cert.k, cert.u, cert.case);
        out!("{} minors, degree {}", prod.count(), prod.degree());
        for (spec, mult) in prod.factors() {
            if verbose {
                let lead = fptdet::polyfp::leading_monomial_of_product(shape.m, shape.n, &[(spec.clone(), 1)])?;
                out!("  {spec}^{mult}    in = {}", lead.render(shape.n));
            } else {
                out!("  {spec}^{mult}");
            }
        }
        if verbose {
            out!("in(product) = {}", prod.leading_monomial().render(shape.n));
        }
        out!("{report}");
        if let Some(path) = &out {
            out!("wrote {}", path.display());
        }
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn report_json(report: &VerificationReport) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    json!({ "passed": report.passed(), "checks": checks })
}

fn cmd_verify(path: &PathBuf, json: bool) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    let cert = WitnessCertificate::from_json(&text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let report = verify_certificate(&cert)?;
    if json {
        print_json(&report_json(&report));
    } else {
        out!("{report}");
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn witness_json(rec: &NuRecord) -> Value {
    serde_json::to_value(rec.witness.to_factor_json()).expect("factors serialize")
}

fn nu_json(rec: &NuRecord) -> Value {
    let s = rec.shape;
    json!({
        "m": s.m, "n": s.n, "t": s.t, "p": rec.p, "e": rec.e, "q": rec.q,
        "nu": rec.nu, "ratio": frac_json(rec.ratio()), "witness": witness_json(rec),
    })
}

fn cmd_nu(args: &ShapeArgs, p: u64, e: u32, run: &RunArgs, verbose: bool, json: bool) -> Result<u8, Failure> {
    let shape = args.shape()?;
    let budget = run.budget()?;
    let cache = run.cache();
    match nu_cached(cache.as_ref(), shape, p, e, budget)? {
        NuOutcome::Known(rec) => {
            let ratio = rec.ratio();
            if rec.from_cache {
                eprintln!("cache hit");
            } else {
                eprintln!("searched {} nodes in {:.3}s", rec.nodes, rec.elapsed.as_secs_f64());
            }
            if json {
                print_json(&nu_json(&rec));
            } else {
                out!(
                    "nu = {}, q = {}, nu/q = {}/{}  (≈ {}, display only)",
                    rec.nu,
                    rec.q,
                    ratio.numer(),
                    ratio.denom(),
                    decimal(ratio)
                );
                out!("witness: {}", rec.witness);
                if verbose {
                    let reduced = product_mod_bracket(&rec.witness, rec.p, rec.q as u32)?;
                    out!("witness mod m^[q] = {}", reduced.render());
                    out!("frobenius spot check: {}", if frobenius_spot_check(&rec)? { "ok" } else { "FAILED" });
                }
            }
            Ok(0)
        }
        NuOutcome::Unknown(ex) => {
            eprintln!("{ex}");
            if json {
                print_json(&json!({
                    "m": shape.m, "n": shape.n, "t": shape.t, "p": p, "e": e,
                    "nu": Value::Null, "status": "unknown", "lowerBound": ex.lower_bound,
                }));
            } else {
                out!("unknown (nu >= {})", ex.lower_bound);
            }
            Ok(3)
        }
    }
}

fn cmd_table(args: &ShapeArgs, p: u64, max_exp: u32, run: &RunArgs, json: bool) -> Result<u8, Failure> {
    let shape = args.shape()?;
    let budget = run.budget()?;
    let cache = run.cache();
    let table = convergence_table_with(shape, p, max_exp, |e| nu_cached(cache.as_ref(), shape, p, e, budget))?;
    let target = table.target;
    if json {
        let rows: Vec<Value> = table.rows.iter().map(nu_json).collect();
        print_json(&json!({
            "m": shape.m, "n": shape.n, "t": shape.t, "p": p,
            "fpt": frac_json(target),
            "rows": rows,
            "truncatedAt": table.truncated.as_ref().map(|(e, _)| *e),
            "violations": table.violations,
        }));
    } else {
        out!(
            "{shape}, p = {p}, target fpt = {}/{}  (≈ {})",
            target.numer(),
            target.denom(),
            decimal(target)
        );
        out!("{:>3} {:>12} {:>12} {:>24} {:>10}", "e", "q", "nu", "nu/q", "decimal");
        for rec in &table.rows {
            let r = rec.ratio();
            out!(
                "{:>3} {:>12} {:>12} {:>24} {:>10}",
                rec.e,
                rec.q,
                rec.nu,
                format!("{}/{}", r.numer(), r.denom()),
                decimal(r)
            );
        }
        if let Some((e, _)) = &table.truncated {
            out!("{e:>3} unknown (budget exhausted)");
        }
        for v in &table.violations {
            out!("ERROR {v}");
        }
    }
    if let Some((_, ex)) = &table.truncated {
        eprintln!("{ex}");
    }
    Ok(if !table.violations.is_empty() {
        1
    } else if table.truncated.is_some() {
        3
    } else {
        0
    })
}
