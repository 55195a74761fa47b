//! `ffap` command line: argument parsing, dispatch, JSON and CSV output.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::arith::{configured_precision, try_factorize, BoundError, FactorError};
use crate::ffield::{build_ctx, FieldError};
use crate::reproduce::{self, ReproduceError, ReproduceOptions, Scale, TABLE_IDS};
use crate::search::{self, BetaDomain, SearchError, SearchSpec};
use crate::sieve::{self, Certificate, CertifyOptions, SieveError};

pub const SCHEMA: &str = "ffap/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ffap", version, about = "Arithmetic progressions of primitive and normal elements in finite fields")]
struct Cli {
    /// Worker threads (overrides FFAP_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Starting interval precision in bits (overrides FFAP_PRECISION_BITS).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Largest q^n a search may enumerate (overrides FFAP_ENUM_CAP).
    #[arg(long, global = true)]
    enum_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor a positive integer.
    Factor { n: String },
    /// Describe the tower F_p ⊂ F_q ⊂ F_{q^n}, q = p^k.
    FieldInfo { p: u32, k: u32, n: u32 },
    /// Look for a certificate that (q, n) admits m-term progressions.
    ///
    /// Takes `q n m`, or `q n --m M`, or `p k n --m M`.
    Certify {
        #[arg(num_args = 2..=3, required = true)]
        args: Vec<u64>,
        #[arg(long)]
        m: Option<u32>,
        /// Skip the n = 2 conditions.
        #[arg(long)]
        no_n2_special: bool,
        /// JSON output (the default).
        #[arg(long)]
        json: bool,
    },
    /// Recompute a cascade schedule as CSV.
    Cascade {
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long, default_value = "default")]
        schedule: String,
    },
    /// Exhaustive progression search in F_{p^{kn}}.
    Search {
        p: u32,
        k: u32,
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value_t = DomainArg::Base)]
        beta_domain: DomainArg,
        /// A single difference, e.g. `1,2` in F_9 or `1,0;0,1` in F_{9^2}.
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        no_normal: bool,
        #[arg(long)]
        witnesses: bool,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Regenerate a table and diff it against the embedded fixture.
    Reproduce {
        table_id: String,
        #[arg(long, value_enum, default_value_t = ScaleArg::Desk)]
        scale: ScaleArg,
        /// Resumable sweep state for `--scale full`.
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
        #[arg(long)]
        progress: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Base,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Full,
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        let msg = if e.kind() == std::io::ErrorKind::BrokenPipe { String::new() } else { e.to_string() };
        Failure { code: EXIT_MISMATCH, msg }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => io.into(),
            kind => Failure { code: EXIT_MISMATCH, msg: format!("{kind:?}") },
        }
    }
}

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure { code: EXIT_USAGE, msg: msg.to_string() }
    }

    fn resource(msg: impl ToString) -> Self {
        Failure { code: EXIT_RESOURCE, msg: msg.to_string() }
    }
}

impl From<FactorError> for Failure {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::Zero => Failure::usage(e),
            FactorError::RhoExhausted(_) => Failure::resource(e),
        }
    }
}

impl From<BoundError> for Failure {
    fn from(e: BoundError) -> Self {
        Failure::resource(e)
    }
}

impl From<SieveError> for Failure {
    fn from(e: SieveError) -> Self {
        match e {
            SieveError::Factor(f) => f.into(),
            SieveError::Bound(b) => b.into(),
            SieveError::TooManyPrimes(_) => Failure::resource(e),
            SieveError::DeltaUndefined | SieveError::Invalid(_) => Failure::usage(e),
        }
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::TooLarge => Failure::resource(e),
            FieldError::Internal(_) => Failure { code: 1, msg: e.to_string() },
            _ => Failure::usage(e),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::CapExceeded { .. } => Failure::resource(e),
            SearchError::Field(f) => f.into(),
            SearchError::Invalid(_) => Failure::usage(e),
        }
    }
}

impl From<ReproduceError> for Failure {
    fn from(e: ReproduceError) -> Self {
        match e {
            ReproduceError::UnknownTable(_) => Failure::usage(format!("{e}; known: {}", TABLE_IDS.join(", "))),
            ReproduceError::Sieve(s) => s.into(),
            ReproduceError::Search(s) => s.into(),
            ReproduceError::Checkpoint { .. } => Failure::resource(e),
        }
    }
}

/// Runs `ffap` on `argv` (program name first) with the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    if let Some(bits) = cli.precision_bits {
        std::env::set_var("FFAP_PRECISION_BITS", bits.to_string());
    }
    if let Some(cap) = cli.enum_cap {
        std::env::set_var("FFAP_ENUM_CAP", cap.to_string());
    }
    let threads = cli.threads.or_else(|| std::env::var("FFAP_THREADS").ok().and_then(|v| v.trim().parse().ok()));
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = dispatch(cli.command, out);
    match result {
        Ok(code) => code,
        Err(f) if f.msg.is_empty() => f.code,
        Err(f) => {
            let _ = writeln!(err, "{}", json!({"schema": SCHEMA, "error": f.msg, "exit": f.code}));
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("JSON values serialize"))?;
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Factor { n } => cmd_factor(&n, out),
        Command::FieldInfo { p, k, n } => {
            let ctx = build_ctx(p, k, n, 0)?;
            let mut v = serde_json::to_value(ctx.info()).expect("field info serializes");
            v["schema"] = json!(SCHEMA);
            emit(out, &v)?;
            Ok(EXIT_OK)
        }
        Command::Certify { args, m, no_n2_special, json: _ } => cmd_certify(&args, m, no_n2_special, out),
        Command::Cascade { m, schedule } => cmd_cascade(m, &schedule, out),
        Command::Search { p, k, n, m, beta_domain, beta, no_normal, witnesses, json: _, csv } => {
            let mut spec = SearchSpec::new(p, k, n, m);
            spec.require_normal = !no_normal;
            spec.beta_domain = match (beta, beta_domain) {
                (Some(b), _) => BetaDomain::Single(b),
                (None, DomainArg::Base) => BetaDomain::BaseFieldStar,
                (None, DomainArg::Full) => BetaDomain::FullFieldStar,
            };
            cmd_search(&spec, witnesses, csv, out)
        }
        Command::Reproduce { table_id, scale, checkpoint_dir, progress } => {
            let opts = ReproduceOptions {
                scale: match scale {
                    ScaleArg::Desk => Scale::Desk,
                    ScaleArg::Full => Scale::Full,
                },
                checkpoint_dir,
                progress,
            };
            let diff = reproduce::reproduce(&table_id, &opts)?;
            let mut v = serde_json::to_value(&diff).expect("diff serializes");
            v["schema"] = json!(SCHEMA);
            v["match"] = json!(diff.is_empty());
            emit(out, &v)?;
            Ok(if diff.is_empty() { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

fn cmd_factor(text: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let n: BigUint = text.trim().parse().map_err(|_| Failure::usage(format!("not a non-negative integer: {text:?}")))?;
    let f = try_factorize(n.clone())?;
    let factors: Vec<Value> = f.factors().iter().map(|(p, e)| json!([p.to_string(), e])).collect();
    emit(out, &json!({"schema": SCHEMA, "n": n.to_string(), "factors": factors, "certainty": f.certainty()}))?;
    Ok(EXIT_OK)
}

/// `(q, n, m)` from the positional forms.
fn certify_target(args: &[u64], m: Option<u32>) -> Result<(u64, u32, u32), Failure> {
    let small = |v: u64, what: &str| u32::try_from(v).map_err(|_| Failure::usage(format!("{what} {v} is too large")));
    match (args, m) {
        ([q, n], Some(m)) => Ok((*q, small(*n, "n")?, m)),
        ([q, n, m], None) => Ok((*q, small(*n, "n")?, small(*m, "m")?)),
        ([p, k, n], Some(m)) => {
            let q = p.checked_pow(small(*k, "k")?).ok_or_else(|| Failure::usage("p^k overflows"))?;
            Ok((q, small(*n, "n")?, m))
        }
        ([_, _], None) => Err(Failure::usage("missing m: pass `q n m` or `--m`")),
        _ => Err(Failure::usage("expected `q n m`, `q n --m M` or `p k n --m M`")),
    }
}

fn certificate_json(c: &Certificate) -> Value {
    let strs = |v: &[BigUint]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
    let mut v = json!({
        "schema": SCHEMA,
        "q": c.q,
        "n": c.n,
        "m": c.m,
        "method": c.method.as_str(),
        "passed": c.passed,
        "lhs_sq": c.lhs_sq.to_string(),
        "rhs_sq": c.rhs_sq.to_string(),
    });
    if let Some(p) = &c.params {
        v["retained_primes"] = json!(strs(&p.retained_primes));
        v["excluded_primes"] = json!(strs(&p.excluded_primes));
        v["retained_factors"] = json!(p.retained_factors);
        v["excluded_factors"] = json!(p.excluded_factors);
        v["delta"] = json!(p.delta.to_string());
        v["Delta"] = json!(p.big_delta.to_string());
    }
    v
}

fn cmd_certify(args: &[u64], m: Option<u32>, no_n2: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let (q, n, m) = certify_target(args, m)?;
    match sieve::certify_with(q, n, m, CertifyOptions { n2_special: !no_n2 })? {
        Some(c) => {
            emit(out, &certificate_json(&c))?;
            Ok(EXIT_OK)
        }
        None => {
            emit(out, &json!({"schema": SCHEMA, "q": q, "n": n, "m": m, "passed": false, "exhausted": true}))?;
            Ok(EXIT_MISMATCH)
        }
    }
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().from_writer(out)
}

fn cmd_cascade(m: u32, schedule: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let rows = sieve::schedule(schedule).ok_or_else(|| {
        Failure::usage(format!("unknown schedule {schedule:?}; known: {}", sieve::schedule_names().join(", ")))
    })?;
    if rows.iter().any(|r| r.config.m != m) {
        return Err(Failure::usage(format!("schedule {schedule:?} is defined for m = 3 only")));
    }
    let prec = configured_precision();
    let mut all = true;
    let mut w = csv_writer(out);
    w.write_record(["schema", "label", "M", "tilde_p", "printed", "computed_lo", "computed_hi", "match"])?;
    for row in rows {
        let res = sieve::cascade_step_at(&row.config, prec)?;
        let ok = row.matches(&res.value);
        all &= ok;
        w.write_record([
            SCHEMA.to_string(),
            row.label.to_string(),
            row.bound_display(),
            row.printed_tilde_p.to_string(),
            row.printed.to_string(),
            crate::arith::format_sci(res.value.lo(), 6),
            crate::arith::format_sci(res.value.hi(), 6),
            ok.to_string(),
        ])
        ?;
    }
    w.flush()?;
    Ok(if all { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_search(spec: &SearchSpec, witnesses: bool, csv: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let rep = search::exceptions(spec, witnesses)?;
    let code = match spec.beta_domain {
        BetaDomain::Single(_) if !rep.exceptions.is_empty() => EXIT_MISMATCH,
        _ => EXIT_OK,
    };
    if csv {
        let mut w = csv_writer(out);
            w.write_record(["schema", "p", "k", "n", "m", "normal", "beta", "exception", "witness"])?;
        let head = [spec.p, spec.k, spec.n, spec.m].map(|v| v.to_string());
        let mut rows: Vec<(String, bool, String)> = rep.exceptions.iter().map(|b| (b.clone(), true, String::new())).collect();
        if let Some(ws) = &rep.witnesses {
            rows.extend(ws.iter().map(|(b, a)| (b.clone(), false, a.clone())));
        }
        for (b, exc, wit) in rows {
            let mut rec = vec![SCHEMA.to_string()];
            rec.extend(head.iter().cloned());
            rec.extend([spec.require_normal.to_string(), b, exc.to_string(), wit]);
            w.write_record(&rec)?;
        }
        w.flush()?;
    } else {
        let mut v = serde_json::to_value(&rep).expect("report serializes");
        v["schema"] = json!(SCHEMA);
        emit(out, &v)?;
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["ffap"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn certify_forms() {
        let (code, out, _) = run_capture(&["certify", "3", "1", "16", "--m", "3"]);
        assert_eq!(code, EXIT_MISMATCH);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["exhausted"], json!(true));
        assert_eq!(v["schema"], json!(SCHEMA));
        let (code, out, _) = run_capture(&["certify", "3", "17", "3", "--json"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["passed"], json!(true));
        assert!(v["delta"].as_str().unwrap().contains('/') || v["delta"] == json!("1"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
        assert_eq!(run_capture(&["search", "3", "2", "2", "--m", "3", "--beta", "1,x"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["certify", "6", "2", "3"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["reproduce", "t0"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn resource_cap() {
        let (code, _, err) = run_capture(&["search", "2", "1", "40", "--m", "2", "--enum-cap", "1000000"]);
        assert_eq!(code, EXIT_RESOURCE, "{err}");
    }

    #[test]
    fn search_outputs() {
        let (code, out, _) = run_capture(&["search", "13", "1", "2", "--m", "3", "--json"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["exceptions"].as_array().unwrap().len(), 8);
        let (code, out, _) = run_capture(&["search", "3", "2", "2", "--m", "3", "--csv", "--witnesses"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.lines().next().unwrap().starts_with("schema,"));
        assert_eq!(out.lines().count(), 1 + 8);
        let (code, _, _) = run_capture(&["search", "2", "1", "4", "--m", "2", "--beta", "1;0;0;0"]);
        assert_eq!(code, EXIT_MISMATCH);
    }

    #[test]
    fn factor_and_field_info() {
        let (code, out, _) = run_capture(&["factor", "1000001"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("\"101\"") && out.contains("\"9901\""));
        let (code, out, _) = run_capture(&["field-info", "2", "4", "2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains(SCHEMA));
        assert_eq!(run_capture(&["field-info", "4", "1", "2"]).0, EXIT_USAGE);
    }

    #[test]
    fn cascade_csv() {
        let (code, out, _) = run_capture(&["cascade", "--m", "3", "--schedule", "table1"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 4);
        assert!(out.lines().all(|l| !l.ends_with("false")));
        assert_eq!(run_capture(&["cascade", "--m", "2"]).0, EXIT_USAGE);
    }
}
