//! Command dispatch for the `fourfold` binary.
//!
//! Exit codes: 0 success, 1 a negative verdict (violated, not homeomorphic, not equal),
//! 2 usage or input error, 3 internal inconsistency or failed self-check.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fourfold_core::arith::{fmt_rat, parse_rat, Rat};
use fourfold_core::config::Config;
use fourfold_core::dsl::{self, Program};
use fourfold_core::error::Error;
use fourfold_core::eval::evaluate;
use fourfold_core::expr::ManifoldExpr;
use fourfold_core::flags::Tri;
use fourfold_core::geography::{bk_region, free_action_region, GeographyQuery, Query};
use fourfold_core::normal_form::{mode_of, normalize_with};
use fourfold_core::obstruction::{
    check_certificate, decompose_for_obstruction, hitchin_thorpe, homeo_equal, spin_einstein, Certificate, Verdict,
};
use fourfold_core::registry::{self, Registry};
use fourfold_core::reproduce::{reproduce, TARGETS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fourfold", version, about = "Exact invariants, obstructions and normal forms for smooth 4-manifolds")]
struct Cli {
    /// key = value file with c_eps, eps, wall_n0, n1.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Braungardt-Kotschick constant c(eps').
    #[arg(long, global = true)]
    c_eps: Option<String>,
    #[arg(long, global = true)]
    wall_n0: Option<u64>,
    #[arg(long, global = true)]
    n1: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invariants and structure flags of an expression.
    Eval {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Obstruction and homeomorphism checks.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Rewrite to a canonical connected sum.
    Normalize {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Lattice regions as CSV or JSON.
    #[command(subcommand)]
    Enumerate(EnumerateCmd),
    /// Recompute a named result and compare it with its golden file when given.
    Reproduce {
        target: String,
        #[arg(long)]
        json: bool,
        /// Directory holding `<target>.txt` golden files.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCmd {
    /// LeBrun or Ishida-LeBrun obstruction.
    Einstein {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Hitchin-Thorpe inequalities.
    Ht {
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Hambleton-Kreck key comparison.
    Homeo {
        a: String,
        b: String,
        #[arg(long)]
        json: bool,
    },
    /// Re-verify a certificate JSON file.
    Cert { path: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Region {
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    c: Option<String>,
    /// `X,Y` upper bounds.
    #[arg(long)]
    bounds: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum EnumerateCmd {
    /// Points with 0 < y <= (9 - eps') x - c.
    Bk {
        #[command(flatten)]
        region: Region,
    },
    /// Admissible (n, m) for free Z/d actions.
    FreeActions {
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        region: Region,
    },
    /// A `region(...)` or `bk(...)` query in the text syntax.
    Query {
        text: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn with(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Outcome { code, stdout: String::new(), stderr }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) | Error::InconsistentFlags { .. } => EXIT_INTERNAL,
        Error::MismatchedInvariants(_) => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

fn from_error(e: Error) -> Outcome {
    Outcome::fail(error_code(&e), format!("error: {e}\n"))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_else(|_| v.to_string());
    s.push('\n');
    s
}

/// Parses arguments (the first item is the program name) and runs the command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK { Outcome::ok(text) } else { Outcome::fail(code, text) };
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => return from_error(e),
    };
    let reg = registry::standard();
    match dispatch(reg, &cfg, cli.command) {
        Ok(o) => o,
        Err(e) => from_error(e),
    }
}

fn load_config(cli: &Cli) -> fourfold_core::Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(c) = &cli.c_eps {
        cfg.set("c_eps", c)?;
    }
    if let Some(n) = cli.wall_n0 {
        cfg.wall_n0 = n;
    }
    if let Some(n) = cli.n1 {
        cfg.n1 = n;
    }
    Ok(cfg)
}

fn parse_expr(reg: &Registry, text: &str) -> fourfold_core::Result<ManifoldExpr> {
    dsl::parse_with(reg, text)
}

fn dispatch(reg: &Registry, cfg: &Config, cmd: Command) -> fourfold_core::Result<Outcome> {
    match cmd {
        Command::Eval { expr, json } => cmd_eval(reg, &expr, json),
        Command::Check(c) => match c {
            CheckCmd::Einstein { expr, json } => cmd_einstein(reg, &expr, json),
            CheckCmd::Ht { expr, json } => cmd_ht(reg, &expr, json),
            CheckCmd::Homeo { a, b, json } => cmd_homeo(reg, &a, &b, json),
            CheckCmd::Cert { path } => cmd_cert(&path),
        },
        Command::Normalize { expr, json } => cmd_normalize(reg, cfg, &expr, json),
        Command::Enumerate(e) => cmd_enumerate(reg, cfg, e),
        Command::Reproduce { target, json, golden } => cmd_reproduce(cfg, &target, json, golden),
    }
}

fn cmd_eval(reg: &Registry, text: &str, as_json: bool) -> fourfold_core::Result<Outcome> {
    let expr = parse_expr(reg, text)?;
    let ev = evaluate(reg, &expr)?;
    if as_json {
        let mut obj = match ev.record.to_json() {
            Value::Object(m) => m,
            _ => serde_json::Map::new(),
        };
        obj.insert("expr".to_string(), Value::from(dsl::print(&expr)));
        obj.insert("flags".to_string(), ev.flags.to_json());
        obj.insert("labels".to_string(), json!(ev.labels));
        return Ok(Outcome::ok(pretty(&Value::Object(obj))));
    }
    let r = &ev.record;
    let mut out = format!("expr: {}\n", dsl::print(&expr));
    out.push_str(&format!("chi = {}\ntau = {}\nb1 = {}\n", r.chi, r.tau, r.b1));
    out.push_str(&format!("c1^2 = {}\nc2 = {}\nchi_h = {}\n", r.c1sq(), r.c2(), fmt_rat(&r.chi_h())));
    out.push_str(&format!(
        "b2 = {}\nb2+ = {}\nb2- = {}\n",
        r.b2(),
        fmt_rat(&r.b2plus()),
        fmt_rat(&r.b2minus())
    ));
    out.push_str("flags:\n");
    let mut provenance = Vec::new();
    if let Value::Object(flags) = ev.flags.to_json() {
        for (k, v) in flags {
            match (k.as_str(), v) {
                ("provenance", Value::Array(items)) => provenance = items,
                (_, Value::String(s)) => out.push_str(&format!("  {k}: {s}\n")),
                (_, other) => out.push_str(&format!("  {k}: {other}\n")),
            }
        }
    }
    if !provenance.is_empty() {
        out.push_str("provenance:\n");
        for p in provenance {
            let field = |name: &str| p.get(name).and_then(Value::as_str).unwrap_or("").to_string();
            out.push_str(&format!("  {} = {}: {}\n", field("flag"), field("value"), field("rule")));
        }
    }
    for l in &ev.labels {
        out.push_str(&format!("label: {l}\n"));
    }
    Ok(Outcome::ok(out))
}

fn cert_output(cert: &Certificate, header: &str, as_json: bool) -> String {
    if as_json {
        pretty(&cert.to_json())
    } else {
        format!("{header}{}", cert.render_text())
    }
}

fn cmd_ht(reg: &Registry, text: &str, as_json: bool) -> fourfold_core::Result<Outcome> {
    let expr = parse_expr(reg, text)?;
    let rec = evaluate(reg, &expr)?.record;
    let cert = hitchin_thorpe(&rec);
    let ok = cert.verdict == Verdict::HitchinThorpeOk;
    let header = format!(
        "2χ+3τ={}, 2χ−3τ={}, {}\n",
        rec.c1sq(),
        rec.c1sq_reversed(),
        if ok { "ok" } else { "violated" }
    );
    let code = if ok { EXIT_OK } else { EXIT_NEGATIVE };
    Ok(Outcome::with(code, cert_output(&cert, &header, as_json)))
}

fn cmd_homeo(reg: &Registry, a: &str, b: &str, as_json: bool) -> fourfold_core::Result<Outcome> {
    let ea = parse_expr(reg, a)?;
    let eb = parse_expr(reg, b)?;
    match homeo_equal(reg, &ea, &eb) {
        Ok(cert) => {
            let code = if cert.verdict == Verdict::Homeomorphic { EXIT_OK } else { EXIT_NEGATIVE };
            let header = format!("{}\n", cert.verdict);
            Ok(Outcome::with(code, cert_output(&cert, &header, as_json)))
        }
        Err(e @ (Error::UnknownFlag(_) | Error::UnsupportedGroup(_))) => Ok(Outcome::ok(format!("no_verdict: {e}\n"))),
        Err(e) => Err(e),
    }
}

/// Splits a sum into pieces with `b2+ > 0` and a negative-definite rest.
fn spin_split(reg: &Registry, expr: &ManifoldExpr) -> fourfold_core::Result<Option<(Vec<ManifoldExpr>, ManifoldExpr)>> {
    let mut pieces = Vec::new();
    let mut rest = Vec::new();
    for (part, m) in expr.flatten_sum() {
        let ev = evaluate(reg, &part)?;
        let positive = ev.record.b2plus() > Rat::from_integer(0.into());
        for _ in 0..m {
            if positive {
                pieces.push(part.clone());
            } else {
                rest.push(part.clone());
            }
        }
    }
    if !(2..=4).contains(&pieces.len()) {
        return Ok(None);
    }
    let n = if rest.is_empty() { ManifoldExpr::prim("S4") } else { ManifoldExpr::sum_of(rest) };
    Ok(Some((pieces, n)))
}

fn cmd_einstein(reg: &Registry, text: &str, as_json: bool) -> fourfold_core::Result<Outcome> {
    let expr = parse_expr(reg, text)?;
    let ev = evaluate(reg, &expr)?;
    match decompose_for_obstruction(reg, &expr) {
        Ok(splits) => {
            let best = &splits[0];
            let header = format!(
                "{}: X = {}, k = {}, l = {}\n",
                best.certificate.verdict,
                dsl::print(&best.x),
                best.k,
                best.l
            );
            return Ok(Outcome::ok(cert_output(&best.certificate, &header, as_json)));
        }
        Err(Error::NoSplit(_)) => {}
        Err(e) => return Err(e),
    }
    if ev.flags.spin == Tri::Yes {
        if let Some((pieces, n)) = spin_split(reg, &expr)? {
            let m = pieces.len();
            let fillers: Vec<Vec<ManifoldExpr>> = match m {
                4 => vec![vec![]],
                3 => vec![vec![ManifoldExpr::k3()], vec![ManifoldExpr::elliptic(4)]],
                _ => vec![
                    vec![ManifoldExpr::k3(), ManifoldExpr::k3()],
                    vec![ManifoldExpr::k3(), ManifoldExpr::elliptic(4)],
                ],
            };
            let mut last = None;
            for fill in fillers {
                let mut list = pieces.clone();
                list.extend(fill);
                let cert = spin_einstein(reg, &list, m, &n)?;
                if cert.verdict == Verdict::EinsteinObstructed {
                    let header = format!("{}: Ishida-LeBrun with m = {m}\n", cert.verdict);
                    return Ok(Outcome::ok(cert_output(&cert, &header, as_json)));
                }
                last = Some(cert);
            }
            if let Some(cert) = last {
                let header = format!("{}\n", cert.verdict);
                return Ok(Outcome::ok(cert_output(&cert, &header, as_json)));
            }
        }
    }
    Ok(Outcome::ok(format!("no_verdict: no splitting satisfies an obstruction for {}\n", dsl::print(&expr))))
}

fn cmd_cert(path: &PathBuf) -> fourfold_core::Result<Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Error::InvalidExpr(format!("certificate is not JSON: {e}")))?;
    let cert = match Certificate::from_json(&value) {
        Ok(c) => c,
        Err(e) => return Ok(Outcome::fail(EXIT_INTERNAL, format!("rejected: {}\n", e.0))),
    };
    Ok(match check_certificate(&cert) {
        Ok(()) => Outcome::ok(format!("verified: {}\n", cert.verdict)),
        Err(e) => Outcome::fail(EXIT_INTERNAL, format!("rejected: {}\n", e.0)),
    })
}

fn cmd_normalize(reg: &Registry, cfg: &Config, text: &str, as_json: bool) -> fourfold_core::Result<Outcome> {
    let expr = parse_expr(reg, text)?;
    let mode = mode_of(&evaluate(reg, &expr)?);
    let n = normalize_with(reg, &expr, mode, &mode.rules(), cfg.wall_n0)?;
    if as_json {
        let v = json!({
            "expr": dsl::print(&expr),
            "mode": n.mode.as_str(),
            "normal_form": n.form.to_string(),
            "canonical": n.canonical,
            "trace": n.trace_json(),
        });
        return Ok(Outcome::ok(pretty(&v)));
    }
    let mut out = String::new();
    for s in &n.trace {
        out.push_str(&format!("{}: {}\n  [{}]\n  {}\n", s.rule.name(), s.result, s.citation, s.arithmetic));
    }
    out.push_str(&format!("{}\n", n.form));
    if !n.canonical {
        out.push_str("partial: no rule applies and the form is not canonical\n");
    }
    Ok(Outcome::ok(out))
}

fn rational(value: Option<&String>, default: &Rat, what: &str) -> fourfold_core::Result<Rat> {
    match value {
        None => Ok(default.clone()),
        Some(v) => parse_rat(v).ok_or_else(|| Error::InvalidExpr(format!("{what} must be a rational, got {v:?}"))),
    }
}

fn bounds(text: &str) -> fourfold_core::Result<(u64, u64)> {
    let bad = || Error::InvalidExpr(format!("bounds must look like X,Y, got {text:?}"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> fourfold_core::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(header).map_err(internal)?;
    for r in rows {
        w.write_record(&r).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv: {e}")))
}

fn run_query(reg: &Registry, q: Query, format: Format) -> fourfold_core::Result<Outcome> {
    match q {
        Query::Bk { eps_prime, c, bounds } => {
            let pts = bk_region(&eps_prime, &c, bounds)?;
            match format {
                Format::Csv => {
                    let rows = pts.iter().map(|p| vec![p.x.to_string(), p.y.to_string(), p.note.to_string()]).collect();
                    Ok(Outcome::ok(csv_text(&["x", "y", "note"], rows)?))
                }
                Format::Json => {
                    let v: Vec<Value> = pts.iter().map(|p| json!({"x": p.x, "y": p.y, "note": p.note})).collect();
                    Ok(Outcome::ok(pretty(&Value::Array(v))))
                }
            }
        }
        Query::FreeActions(g) => {
            let pts = free_action_region(reg, &g)?;
            if let Some(bad) = pts.iter().find(|p| !p.blueprint.all_passed()) {
                let names: Vec<&str> = bad.blueprint.failures().iter().map(|c| c.name.as_str()).collect();
                return Ok(Outcome::fail(
                    EXIT_INTERNAL,
                    format!("blueprint ({}, {}) failed checks: {}\n", bad.n, bad.m, names.join(", ")),
                ));
            }
            match format {
                Format::Csv => {
                    let rows = pts
                        .iter()
                        .map(|p| vec![p.n.to_string(), p.m.to_string(), p.k.to_string(), p.verdict.to_string()])
                        .collect();
                    Ok(Outcome::ok(csv_text(&["n", "m", "k", "verdict"], rows)?))
                }
                Format::Json => {
                    let v: Vec<Value> = pts
                        .iter()
                        .map(|p| json!({"n": p.n, "m": p.m, "k": p.k, "verdict": p.verdict.as_str(), "blueprint": p.blueprint.to_json()}))
                        .collect();
                    Ok(Outcome::ok(pretty(&Value::Array(v))))
                }
            }
        }
    }
}

fn cmd_enumerate(reg: &Registry, cfg: &Config, e: EnumerateCmd) -> fourfold_core::Result<Outcome> {
    match e {
        EnumerateCmd::Bk { region } => {
            let eps_prime = rational(region.eps.as_ref(), &(Rat::new(3.into(), 2.into()) * &cfg.eps), "--eps")?;
            let c = rational(region.c.as_ref(), &cfg.c_eps, "--c")?;
            run_query(reg, Query::Bk { eps_prime, c, bounds: bounds(&region.bounds)? }, region.format)
        }
        EnumerateCmd::FreeActions { d, region } => {
            let q = GeographyQuery {
                d,
                epsilon: rational(region.eps.as_ref(), &cfg.eps, "--eps")?,
                c_of_eps: rational(region.c.as_ref(), &cfg.c_eps, "--c")?,
                bounds: bounds(&region.bounds)?,
            };
            q.validate()?;
            run_query(reg, Query::FreeActions(q), region.format)
        }
        EnumerateCmd::Query { text, format } => match dsl::parse_program(reg, &text)? {
            Program::Query(q) => run_query(reg, q, format),
            Program::Expr(_) => Err(Error::InvalidExpr("expected a region(...) or bk(...) query".to_string())),
        },
    }
}

fn cmd_reproduce(cfg: &Config, target: &str, as_json: bool, golden: Option<PathBuf>) -> fourfold_core::Result<Outcome> {
    if !TARGETS.contains(&target) {
        return Ok(Outcome::fail(
            EXIT_USAGE,
            format!("error: unknown target {target:?}; expected one of {}\n", TARGETS.join(", ")),
        ));
    }
    let report = reproduce(target, cfg)?;
    let text = report.render_text();
    let mut code = if report.ok() { EXIT_OK } else { EXIT_INTERNAL };
    let mut stderr = String::new();
    if let Some(dir) = golden {
        let path = dir.join(format!("{target}.txt"));
        match std::fs::read_to_string(&path) {
            Ok(expected) if expected == text => {}
            Ok(_) => {
                code = EXIT_INTERNAL;
                stderr.push_str(&format!("output differs from {}\n", path.display()));
            }
            Err(e) => {
                code = EXIT_INTERNAL;
                stderr.push_str(&format!("cannot read {}: {e}\n", path.display()));
            }
        }
    }
    for f in report.failures() {
        stderr.push_str(&format!("check failed: {}: {}\n", f.name, f.detail));
    }
    let stdout = if as_json { pretty(&report.to_json()) } else { text };
    Ok(Outcome { code, stdout, stderr })
}
