//! Command-line front end: check the identity catalog, integrate
//! expressions, sum series.
//!
//! [`run`] takes the argument list and output streams and returns the
//! process exit code, so the whole command surface is testable in-process.

use std::collections::HashSet;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use oddsum::expr::{parse, Bindings, Var};
use oddsum::ledger::{builtin_claims, load_manifest, run_all, Claim, RunConfig};
use oddsum::quad::{try_integrate, DomainKind, IntegrationDomain, QuadConfig, QuadError};
use oddsum::series::{sum_series, SeriesError, SeriesFamily, SeriesSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "oddsum",
    version,
    about = "Numerical checks of odd-power series identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate claims and report agreement.
    Verify(VerifyArgs),
    /// Integrate an expression in one variable.
    Integrate(IntegrateArgs),
    /// Sum an odd-power series.
    Sum(SumArgs),
    /// List claims with their citations.
    Claims {
        /// Read claims from a manifest file instead of the builtin catalog.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Tolerance applied to every claim; also tightens the engine.
    #[arg(long, value_parser = positive)]
    tol: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..=30))]
    max_level: Option<u32>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
    #[arg(long)]
    json: bool,
    /// Only run this claim; repeatable.
    #[arg(long = "claim", value_name = "ID")]
    claims: Vec<String>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(clap::Args)]
struct IntegrateArgs {
    #[arg(allow_hyphen_values = true)]
    expression: String,
    #[arg(long)]
    var: String,
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    /// Upper bound, or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    /// Interior split point; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    split: Vec<f64>,
    #[arg(long, value_parser = positive)]
    tol: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..=30))]
    max_level: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Odd,
    Altodd,
}

#[derive(clap::Args)]
struct SumArgs {
    family: Family,
    exponent: u32,
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    tol: f64,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: u8, message: impl std::fmt::Display) -> u8 {
        // A closed stderr leaves nothing better to do than return the code.
        let _ = writeln!(self.err, "error: {message}");
        code
    }

    fn usage(&mut self, message: impl std::fmt::Display) -> u8 {
        self.fail(EXIT_USAGE, message)
    }
}

/// Engine tolerances for an optional claim tolerance: a hundredth of it,
/// never looser than the defaults.
fn quad_config(tol: Option<f64>, max_level: Option<u32>) -> QuadConfig<f64> {
    let mut config = QuadConfig::<f64>::default();
    if let Some(t) = tol {
        let engine = config.abs_tol.min(t / 100.0);
        config.abs_tol = engine;
        config.rel_tol = engine;
    }
    if let Some(l) = max_level {
        config.max_level = l;
    }
    config
}

fn load_claims(manifest: Option<&PathBuf>) -> Result<Vec<Claim>, String> {
    match manifest {
        None => Ok(builtin_claims()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            load_manifest(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

fn verify(args: VerifyArgs, io: &mut Io) -> std::io::Result<u8> {
    let mut claims = match load_claims(args.manifest.as_ref()) {
        Ok(c) => c,
        Err(e) => return Ok(io.usage(e)),
    };
    if !args.claims.is_empty() {
        let known: HashSet<&str> = claims.iter().map(|c| c.id.as_str()).collect();
        if let Some(bad) = args.claims.iter().find(|id| !known.contains(id.as_str())) {
            return Ok(io.usage(format!("unknown claim id {bad:?}")));
        }
        claims.retain(|c| args.claims.contains(&c.id));
    }
    let config = RunConfig {
        quad: quad_config(args.tol, args.max_level),
        tolerance: args.tol,
        jobs: args.jobs as usize,
    };
    let report = run_all(&claims, &config);
    if args.json {
        writeln!(io.out, "{}", report.to_json())?;
    } else {
        write!(io.out, "{}", report.to_table())?;
        writeln!(io.out, "elapsed {:.3} s", report.elapsed.as_secs_f64())?;
    }
    Ok(if report.any_non_converged() {
        EXIT_NONCONVERGENCE
    } else if report.all_passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn parse_bound(s: &str, what: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{what} bound must be a finite number, got {s:?}")),
    }
}

fn integrate(args: IntegrateArgs, io: &mut Io) -> std::io::Result<u8> {
    let expr = match parse(&args.expression) {
        Ok(e) => e,
        Err(e) => return Ok(io.usage(format!("cannot parse expression: {e}"))),
    };
    let Some(var) = Var::from_name(&args.var) else {
        return Ok(io.usage(format!("--var must be x, y or z, got {:?}", args.var)));
    };
    if let Some(other) = expr.variables().into_iter().find(|v| *v != var) {
        return Ok(io.usage(format!(
            "expression uses {other}, but only {var} is integrated"
        )));
    }
    let lower = match parse_bound(&args.from, "lower") {
        Ok(v) => v,
        Err(e) => return Ok(io.usage(e)),
    };
    let kind = if args.to == "inf" {
        DomainKind::SemiInfinite { lower }
    } else {
        match parse_bound(&args.to, "upper") {
            Ok(upper) => DomainKind::Finite { lower, upper },
            Err(e) => return Ok(io.usage(e)),
        }
    };
    let domain = match IntegrationDomain::new(kind, args.split) {
        Ok(d) => d,
        Err(e) => return Ok(io.usage(e)),
    };
    let config = quad_config(args.tol, args.max_level);
    let f = |t: f64| expr.eval(&Bindings::new().with(var, t));
    Ok(match try_integrate(f, &domain, &config) {
        Ok(r) => {
            writeln!(io.out, "value          {:.16e}", r.value)?;
            writeln!(io.out, "error estimate {:.3e}", r.error_estimate)?;
            writeln!(io.out, "evaluations    {}", r.evaluations)?;
            EXIT_OK
        }
        Err(e @ QuadError::Evaluation { .. }) => {
            io.fail(EXIT_NONCONVERGENCE, format!("domain error: {e}"))
        }
        Err(e @ QuadError::NonConvergence { .. }) => io.fail(EXIT_NONCONVERGENCE, e),
        Err(e) => io.usage(e),
    })
}

fn sum(args: SumArgs, io: &mut Io) -> std::io::Result<u8> {
    let family = match args.family {
        Family::Odd => SeriesFamily::OddPower,
        Family::Altodd => SeriesFamily::AlternatingOddPower,
    };
    let spec = match SeriesSpec::new(family, args.exponent) {
        Ok(s) => s,
        Err(e) => return Ok(io.usage(e)),
    };
    Ok(match sum_series::<f64>(spec, args.tol) {
        Ok(r) => {
            writeln!(io.out, "value       {:.16e}", r.value)?;
            writeln!(io.out, "terms_used  {}", r.terms_used)?;
            writeln!(io.out, "tail_bound  {:.3e}", r.tail_bound)?;
            EXIT_OK
        }
        Err(e @ SeriesError::ToleranceUnreachable { .. }) => io.fail(EXIT_NONCONVERGENCE, e),
        Err(e) => io.usage(e),
    })
}

fn list_claims(manifest: Option<PathBuf>, io: &mut Io) -> std::io::Result<u8> {
    let claims = match load_claims(manifest.as_ref()) {
        Ok(c) => c,
        Err(e) => return Ok(io.usage(e)),
    };
    for c in &claims {
        writeln!(io.out, "{:<6} {}", c.id, c.citation)?;
        if !c.description.is_empty() {
            writeln!(io.out, "       {}", c.description)?;
        }
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
        }
    };
    let mut io = Io { out, err };
    let result = match cli.command {
        Command::Verify(args) => verify(args, &mut io),
        Command::Integrate(args) => integrate(args, &mut io),
        Command::Sum(args) => sum(args, &mut io),
        Command::Claims { manifest } => list_claims(manifest, &mut io),
    };
    // Losing stdout (e.g. a closed pipe) is not a claim failure.
    result.unwrap_or_else(|e| io.usage(format!("cannot write output: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (u8, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("oddsum").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn verify_exit_codes() {
        let (code, out, _) = call(&["verify", "--claim", "C-08", "--json"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("\"passed\": true"));
        let (code, _, err) = call(&["verify", "--claim", "NOPE"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("unknown claim id"));
        assert_eq!(call(&["verify", "--claim", "C-11"]).0, EXIT_FAILED);
        assert_eq!(
            call(&["verify", "--claim", "C-08", "--tol", "1e-14"]).0,
            EXIT_NONCONVERGENCE
        );
    }

    #[test]
    fn tolerance_override_tightens_engine() {
        let c = quad_config(Some(1e-6), None);
        assert_eq!((c.abs_tol, c.rel_tol), (1e-10, 1e-10));
        let c = quad_config(Some(1e-11), Some(9));
        assert!((c.abs_tol / 1e-13 - 1.0).abs() < 1e-12);
        assert_eq!(c.max_level, 9);
    }

    #[test]
    fn integrate_codes() {
        let (code, out, _) = call(&[
            "integrate",
            "1/(1+x^2)",
            "--var",
            "x",
            "--from",
            "0",
            "--to",
            "inf",
        ]);
        assert_eq!(code, EXIT_OK);
        assert!(
            out.starts_with("value          1.5707963267948966e0"),
            "{out}"
        );
        let (code, _, err) = call(&[
            "integrate",
            "ln(y)",
            "--var",
            "y",
            "--from",
            "-1",
            "--to",
            "1",
        ]);
        assert_eq!(code, EXIT_NONCONVERGENCE);
        assert!(err.contains("domain error"));
        assert_eq!(
            call(&[
                "integrate",
                "-x",
                "--var",
                "x",
                "--from",
                "-2",
                "--to",
                "-1"
            ])
            .0,
            EXIT_OK
        );
        assert_eq!(
            call(&[
                "integrate",
                "x",
                "--var",
                "x",
                "--from",
                "0",
                "--to",
                "1",
                "--split",
                "2"
            ])
            .0,
            EXIT_USAGE
        );
    }

    #[test]
    fn sum_codes() {
        let (code, out, _) = call(&["sum", "altodd", "3"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("terms_used"));
        assert_eq!(call(&["sum", "odd", "1"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["sum", "odd", "2", "--tol", "1e-300"]).0,
            EXIT_NONCONVERGENCE
        );
    }

    #[test]
    fn help_is_not_an_error() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("verify"));
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    }

    #[test]
    fn claims_listing() {
        let (code, out, _) = call(&["claims"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().filter(|l| l.starts_with("C-")).count(), 21);
    }
}
