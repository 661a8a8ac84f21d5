use std::fs;
use std::io::{ErrorKind, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;
use shioda::classify::{builtin_families, classify, parse_families};
use shioda::equations::{family_equations, mbar_equations, mirror_transpose, Param};
use shioda::fixtures::{fixture, verify_fixtures, FixtureResult};
use shioda::groups::{shioda_groups, AbelianGroupStructure};
use shioda::inverse::{construct_inverse, verify_inverse, InverseMap, InverseVerification};
use shioda::lattice::format_vec;
use shioda::oracle::enumerate_groups;
use shioda::report::{build_report, GroupReport, InputDocument, MatrixInput, ReportOptions};
use shioda::serial::Int;
use shioda::shioda::analyze;
use shioda::Error;

const OUT_DIR_ENV: &str = "SHIODA_OUT_DIR";

#[derive(Parser)]
#[command(name = "shioda", version, about = "Shioda maps and quotient groups of weighted Calabi-Yau hypersurfaces")]
struct Cli {
    /// Write each result to a file in this directory instead of standard output
    /// (default from SHIODA_OUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: weights, strata, groups, equations, fingerprint, inverse.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Only the weight data; accepts matrices that are not Calabi-Yau.
        #[arg(long)]
        basic: bool,
        /// Cross-check the groups by enumerating (Z/d)^n when d^n <= 10^6.
        #[arg(long)]
        oracle: bool,
    },
    /// Recompute every built-in fixture and compare with its recorded values.
    VerifyFixtures {
        /// Only fixtures whose name contains this string.
        filter: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Group families by birational fingerprint.
    Classify {
        /// JSON family list; defaults to the built-in families.
        file: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Equations of the Shioda quotient.
    Equations {
        #[command(flatten)]
        source: Source,
        #[arg(long, alias = "form", value_enum)]
        format: Option<Format>,
        /// The one-parameter family with linear relation sum u_i = t u_0.
        #[arg(long)]
        family: bool,
        /// Family parameter: a rational number or a symbol (implies --family).
        #[arg(short = 't', allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Gamma(q'), Gamma_A and H_A.
    Groups {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        oracle: bool,
    },
    /// Birational inverse of the quotient map, when H_A is trivial.
    Invert {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Verify this inverse map (JSON) instead of constructing one.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Family equations of the transposed matrix at t = 1.
    Mirror {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Args)]
struct Source {
    /// Input document: {"name", "matrix"} or {"name", "monomials", "weights"}; "-" reads stdin.
    #[arg(required_unless_present = "fixture", conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Use a built-in fixture instead of an input file.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Latex,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Text => "txt",
            Format::Latex => "tex",
        }
    }
}

type CliResult<T> = Result<T, Error>;

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn emit(&self, stem: &str, format: Format, content: &str) -> CliResult<()> {
        match &self.dir {
            None => print_stdout(content)?,
            Some(dir) => {
                let path = dir.join(format!("{}.{}", sanitize(stem), format.extension()));
                fs::create_dir_all(dir)
                    .and_then(|_| fs::write(&path, format!("{content}\n")))
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
                print_stdout(&path.display().to_string())?;
            }
        }
        Ok(())
    }
}

/// A closed pipe on stdout ends output quietly.
fn print_stdout(content: &str) -> CliResult<()> {
    match writeln!(std::io::stdout().lock(), "{content}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(Error::Parse(format!("cannot write output: {e}"))),
        _ => Ok(()),
    }
}

fn sanitize(stem: &str) -> String {
    stem.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' }).collect()
}

fn read_text(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load(source: &Source) -> CliResult<(String, MatrixInput)> {
    match (&source.input, &source.fixture) {
        (_, Some(name)) => {
            let f = fixture(name)?;
            Ok((f.name, f.input))
        }
        (Some(path), None) => {
            let doc = InputDocument::parse(&read_text(path)?)?;
            Ok((doc.name, doc.input))
        }
        (None, None) => Err(Error::Parse("an input file or --fixture is required".into())),
    }
}

fn reject_latex(format: Format, command: &str) -> CliResult<()> {
    if format == Format::Latex {
        return Err(Error::Parse(format!("{command} has no LaTeX output; use json or text")));
    }
    Ok(())
}

fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().map(Int::from).collect()
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn group_line(label: &str, g: &AbelianGroupStructure) -> String {
    let gens: Vec<String> = g.generator_lifts.iter().map(|v| format_vec(&v.k)).collect();
    format!("{label} = {}  order {}  generators {}", g.describe(), g.order, if gens.is_empty() { "-".into() } else { gens.join(" ") })
}

fn cmd_analyze(out: &Output, source: &Source, format: Format, basic: bool, oracle: bool) -> CliResult<bool> {
    reject_latex(format, "analyze")?;
    let (name, input) = load(source)?;
    let report = build_report(&name, &input, ReportOptions { basic, oracle })?;
    let content = if format == Format::Json { report.to_json() } else { report.to_text() };
    out.emit(&name, format, &content)?;
    Ok(true)
}

fn fixture_row(r: &FixtureResult) -> String {
    let passed = r.checks.iter().filter(|c| c.passed).count();
    let inverse = r.inverse_lines.map(|(v, n)| format!("  inverse {v}/{n} lines valid (derived u0 powers applied)")).unwrap_or_default();
    format!("{:<18} {:>4}/{:<4} {}{}", r.name, passed, r.checks.len(), if r.passed() { "PASS" } else { "FAIL" }, inverse)
}

fn cmd_verify(out: &Output, filter: Option<&str>, format: Format) -> CliResult<bool> {
    reject_latex(format, "verify-fixtures")?;
    let results = verify_fixtures(filter)?;
    let ok = results.iter().all(FixtureResult::passed);
    let content = if format == Format::Json {
        serde_json::to_string_pretty(&results).expect("results serialize")
    } else {
        let mut lines = vec![format!("{:<18} {:>9} {}", "fixture", "checks", "status")];
        for r in &results {
            lines.push(fixture_row(r));
            for c in r.failures() {
                lines.push(format!("    {} [{}]: expected {}, got {}", c.field, c.provenance, c.expected, c.actual));
            }
            for e in &r.errata {
                lines.push(format!("    erratum: {e}"));
            }
        }
        lines.push(format!("{} of {} fixtures pass", results.iter().filter(|r| r.passed()).count(), results.len()));
        lines.join("\n")
    };
    out.emit("verify-fixtures", format, &content)?;
    Ok(ok)
}

fn cmd_classify(out: &Output, file: Option<&Path>, format: Format) -> CliResult<bool> {
    reject_latex(format, "classify")?;
    let families = match file {
        Some(p) => parse_families(&read_text(p)?)?,
        None => builtin_families()?,
    };
    let c = classify(&families)?;
    let content = if format == Format::Json { c.to_json() } else { c.to_text().trim_end().to_string() };
    out.emit("classify", format, &content)?;
    Ok(c.is_clean())
}

fn cmd_equations(out: &Output, source: &Source, format: Format, family: bool, t: Option<&str>) -> CliResult<bool> {
    let (name, input) = load(source)?;
    let data = analyze(&input.exponent_matrix()?)?;
    let content = if family || t.is_some() {
        let t: Param = t.unwrap_or("t").parse()?;
        let f = family_equations(&data, &t)?;
        match format {
            Format::Json => serde_json::to_string_pretty(&f).expect("equations serialize"),
            Format::Text => f.to_text(),
            Format::Latex => [f.unreduced.to_latex(), f.reduced.to_latex()].join("\n"),
        }
    } else {
        let (unreduced, reduced) = mbar_equations(&data)?;
        match format {
            Format::Json => pretty(&json!({ "unreduced": unreduced, "reduced": reduced })),
            Format::Text => reduced.to_text(),
            Format::Latex => reduced.to_latex(),
        }
    };
    out.emit(&format!("{name}.equations"), format, &content)?;
    Ok(true)
}

fn cmd_groups(out: &Output, source: &Source, format: Format, oracle: bool) -> CliResult<bool> {
    reject_latex(format, "groups")?;
    let (name, input) = load(source)?;
    let data = analyze(&input.exponent_matrix()?)?;
    let g = shioda_groups(&data)?;
    let enumerated = if oracle { enumerate_groups(&data)? } else { None };
    let agrees = enumerated.as_ref().map(|e| {
        let same = |x: &[u64], g: &AbelianGroupStructure| x.iter().map(|&v| BigInt::from(v)).eq(g.invariant_factors.iter().cloned());
        same(&e.gamma_q_prime.invariant_factors, &g.gamma_q_prime)
            && same(&e.gamma_a.invariant_factors, &g.gamma_a)
            && same(&e.h_a.invariant_factors, &g.h_a)
    });
    if agrees == Some(false) {
        return Err(Error::Internal("enumerated groups disagree with the lattice computation".into()));
    }
    let content = if format == Format::Json {
        pretty(&json!({
            "name": name,
            "d": Int::from(&data.d),
            "gamma_q_prime": GroupReport::from(&g.gamma_q_prime),
            "gamma_a": GroupReport::from(&g.gamma_a),
            "h_a": GroupReport::from(&g.h_a),
            "oracle": match (oracle, &enumerated) {
                (false, _) => serde_json::Value::Null,
                (true, None) => json!({ "ran": false }),
                (true, Some(_)) => json!({ "ran": true, "agrees": true }),
            },
        }))
    } else {
        let mut lines = vec![
            format!("d = {}", data.d),
            group_line("Gamma(q')", &g.gamma_q_prime),
            group_line("Gamma_A", &g.gamma_a),
            group_line("H_A", &g.h_a),
        ];
        if oracle {
            lines.push(match enumerated {
                Some(_) => "oracle: enumeration agrees".into(),
                None => "oracle: skipped, d^n above the enumeration limit".into(),
            });
        }
        lines.join("\n")
    };
    out.emit(&format!("{name}.groups"), format, &content)?;
    Ok(true)
}

fn verification_text(v: &InverseVerification) -> Vec<String> {
    let mut lines = vec![format!("valid lines: {}/{}", v.valid_lines(), v.lines.len())];
    for l in &v.lines {
        let fix = match (&l.required_c0, l.valid) {
            (Some(c0), false) => format!("  (u0 power {c0} repairs it)"),
            _ => String::new(),
        };
        lines.push(format!(
            "  line {}: {} vs {} {}{}",
            l.index,
            format_vec(&l.lhs),
            format_vec(&l.rhs),
            if l.valid { "ok" } else { "FAIL" },
            fix
        ));
    }
    lines
}

fn cmd_invert(out: &Output, source: &Source, format: Format, map: Option<&Path>) -> CliResult<bool> {
    reject_latex(format, "invert")?;
    let (name, input) = load(source)?;
    let data = analyze(&input.exponent_matrix()?)?;
    let (inv, ok) = match map {
        Some(p) => {
            let m: InverseMap = serde_json::from_str(&read_text(p)?).map_err(|e| Error::Parse(format!("inverse map: {e}")))?;
            (Some(m), None)
        }
        None => (construct_inverse(&data)?, Some(true)),
    };
    let verification = inv.as_ref().map(|m| verify_inverse(&data, m)).transpose()?;
    let ok = ok.unwrap_or_else(|| verification.as_ref().is_some_and(|v| v.valid));
    let content = if format == Format::Json {
        pretty(&json!({ "name": name, "present": inv.is_some(), "map": inv, "verification": verification }))
    } else {
        match (&inv, &verification) {
            (Some(m), Some(v)) => {
                let mut lines = vec![m.to_text()];
                lines.extend(verification_text(v));
                lines.join("\n")
            }
            _ => "no inverse: H_A is nontrivial, so the quotient map is not birational".into(),
        }
    };
    out.emit(&format!("{name}.inverse"), format, &content)?;
    Ok(ok)
}

fn cmd_mirror(out: &Output, source: &Source, format: Format) -> CliResult<bool> {
    let (name, input) = load(source)?;
    let a = input.exponent_matrix()?;
    let original = analyze(&a)?;
    let m = mirror_transpose(&a)?;
    let content = match format {
        Format::Json => pretty(&json!({
            "name": name,
            "transpose": m.transpose.matrix.matrix().to_rows().iter().map(|r| ints(r)).collect::<Vec<_>>(),
            "q_reduced": ints(&original.q_reduced),
            "equations": m.equations,
            "proportional_to_q": m.proportional_to_q,
        })),
        Format::Text => format!(
            "{}\nrelation exponents proportional to q_reduced {}: {}",
            m.equations.to_text(),
            format_vec(&original.q_reduced),
            m.proportional_to_q
        ),
        Format::Latex => [m.equations.unreduced.to_latex(), m.equations.reduced.to_latex()].join("\n"),
    };
    out.emit(&format!("{name}.mirror"), format, &content)?;
    Ok(true)
}

fn run(cli: Cli) -> CliResult<bool> {
    let dir = cli.out_dir.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
    let out = Output { dir };
    match cli.command {
        Command::Analyze { source, format, basic, oracle } => {
            cmd_analyze(&out, &source, format.unwrap_or(Format::Json), basic, oracle)
        }
        Command::VerifyFixtures { filter, format } => cmd_verify(&out, filter.as_deref(), format.unwrap_or(Format::Text)),
        Command::Classify { file, format } => cmd_classify(&out, file.as_deref(), format.unwrap_or(Format::Text)),
        Command::Equations { source, format, family, t } => {
            cmd_equations(&out, &source, format.unwrap_or(Format::Text), family, t.as_deref())
        }
        Command::Groups { source, format, oracle } => cmd_groups(&out, &source, format.unwrap_or(Format::Text), oracle),
        Command::Invert { source, format, map } => cmd_invert(&out, &source, format.unwrap_or(Format::Text), map.as_deref()),
        Command::Mirror { source, format } => cmd_mirror(&out, &source, format.unwrap_or(Format::Text)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
