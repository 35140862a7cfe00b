//! Command-line front end. The binary only forwards its arguments to [`run`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chain::ChainModel;
use crate::classify::{check_lemma_predicates, find_ideal, membership, IdealOutcome, Membership};
use crate::error::{Error, Result};
use crate::factorize::{factor, verify_witness, FactorizationWitness, GeneratorParams};
use crate::oracle::{oracle_report, report_csv, MAX_RANK_N};
use crate::ptrans::PiecewiseMap;
use crate::random::random_op_seeded;
use crate::rational::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_OP: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "opchain",
    version,
    about = "Orientation-preserving maps of rational chains"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership, ideal and structural checks for a map.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Write a verified factorization witness for a map.
    Factorize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Re-check a witness file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw a seeded random orientation-preserving map.
    Random {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-chain counts, closures and rank checks as CSV.
    Oracle {
        #[arg(long = "n-max")]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    MinMax,
    MinOnly,
    MaxOnly,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::MinMax)]
    pub model: ModelKind,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<Rational>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<Rational>,
}

impl ModelArgs {
    pub fn model(&self) -> Result<ChainModel> {
        let or = |v: &Option<Rational>, default: i64| {
            v.clone().unwrap_or_else(|| Rational::from_int(default))
        };
        let model = match self.model {
            ModelKind::MinMax => ChainModel::min_max(or(&self.a, 0), or(&self.b, 1))?,
            ModelKind::MinOnly => ChainModel::MinOnly { a: or(&self.a, 0) },
            ModelKind::MaxOnly => ChainModel::MaxOnly { b: or(&self.b, 0) },
        };
        model.validate()?;
        Ok(model)
    }
}

/// Overrides of the default generator parameters.
#[derive(Debug, Default, Args)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<Rational>,
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<Rational>,
    #[arg(long = "c-prime", allow_hyphen_values = true)]
    pub c_prime: Option<Rational>,
    #[arg(long = "y-max", allow_hyphen_values = true)]
    pub y_max: Option<Rational>,
    #[arg(long = "p-fallback", allow_hyphen_values = true)]
    pub p_fallback: Option<Rational>,
}

impl ParamArgs {
    pub fn apply(&self, model: &ChainModel) -> GeneratorParams {
        let mut p = GeneratorParams::default_for(model);
        if let Some(c) = &self.c {
            p.c = c.clone();
        }
        if let Some(d) = &self.d {
            p.d = d.clone();
        }
        if let Some(c) = &self.c_prime {
            p.c_prime = c.clone();
        }
        if self.y_max.is_some() {
            p.y_max = self.y_max.clone();
        }
        if self.p_fallback.is_some() {
            p.p_fallback = self.p_fallback.clone();
        }
        p
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::NotOp => EXIT_NOT_OP,
        Error::VerificationFailed(_) => EXIT_VERIFICATION,
        _ => EXIT_FAILURE,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let io = |e: std::io::Error| Error::Unsupported(format!("{}: {e}", path.display()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn emit(out: &Option<PathBuf>, contents: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => stdout
            .write_all(contents.as_bytes())
            .map_err(|e| Error::Unsupported(e.to_string())),
    }
}

pub fn cmd_classify(path: &Path, stdout: &mut dyn Write) -> Result<i32> {
    let f = PiecewiseMap::from_json(&read(path)?)?;
    let mut text = String::new();
    match (membership(&f), find_ideal(&f)) {
        (Membership::Neither, _) => text.push_str("neither O nor OP\n"),
        (Membership::OrderPreserving, _) => text.push_str("O; ideal = X\n"),
        (Membership::OrientationOnly, IdealOutcome::Ideal(dec)) => {
            text.push_str(&format!("OP, not O; ideal {}\n", dec.x1));
            for s in check_lemma_predicates(&f)?.statements {
                let verdict = match (s.applicable, s.pass) {
                    (false, _) => "n/a",
                    (true, true) => "pass",
                    (true, false) => "FAIL",
                };
                let detail: Vec<String> =
                    s.witness.iter().map(|(k, v)| format!("{k}={v}")).collect();
                text.push_str(&format!("  {}: {verdict} {}\n", s.name, detail.join(" ")));
            }
        }
        (Membership::OrientationOnly, _) => {
            unreachable!("non-constant maps outside O have an ideal")
        }
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::Unsupported(e.to_string()))?;
    Ok(EXIT_OK)
}

pub fn cmd_factorize(
    path: &Path,
    params: &ParamArgs,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let alpha = PiecewiseMap::from_json(&read(path)?)?;
    let w = factor(&alpha, &params.apply(&alpha.model))?;
    emit(out, &(w.to_json() + "\n"), stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(path: &Path, samples: usize, seed: u64, stdout: &mut dyn Write) -> Result<i32> {
    let w = FactorizationWitness::from_json(&read(path)?)?;
    let report = verify_witness(&w, samples, seed);
    let mut text = String::new();
    for c in &report.checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        text.push_str(&format!("{}: {verdict} {}\n", c.name, c.detail).replace(" \n", "\n"));
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::Unsupported(e.to_string()))?;
    Ok(if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

pub fn cmd_random(
    model: &ChainModel,
    seed: u64,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let f = random_op_seeded(model, seed)?;
    emit(out, &(f.to_json() + "\n"), stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_oracle(n_max: usize, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<i32> {
    if n_max > MAX_RANK_N {
        return Err(Error::TooLarge(n_max));
    }
    emit(out, &report_csv(&oracle_report(n_max)?), stdout)?;
    Ok(EXIT_OK)
}

pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    match &config.command {
        Command::Classify { input } => cmd_classify(input, stdout),
        Command::Factorize { input, out, params } => cmd_factorize(input, params, out, stdout),
        Command::Verify {
            input,
            samples,
            seed,
        } => cmd_verify(input, *samples, *seed, stdout),
        Command::Random { model, seed, out } => cmd_random(&model.model()?, *seed, out, stdout),
        Command::Oracle { n_max, out } => cmd_oracle(*n_max, out, stdout),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_PARSE,
            };
        }
    };
    match execute(&config, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("opchain").chain(args.iter().copied()),
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
    fn oracle_bounds() {
        let (code, out, _) = run_capture(&["oracle", "--n-max", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().nth(1).unwrap(), "1,1,1,1,1,0,true");
        let (code, _, err) = run_capture(&["oracle", "--n-max", "9"]);
        assert_ne!(code, 0);
        assert!(err.contains("9"));
    }

    #[test]
    fn random_is_seeded() {
        let a = run_capture(&[
            "random", "--model", "min_max", "--a", "0", "--b", "1", "--seed", "1",
        ]);
        let b = run_capture(&[
            "random", "--model", "min_max", "--a", "0", "--b", "1", "--seed", "1",
        ]);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        assert!(PiecewiseMap::from_json(&a.1).is_ok());
    }

    #[test]
    fn negative_rationals_parse() {
        let (code, out, err) = run_capture(&[
            "random", "--model", "max_only", "--b", "-1/2", "--seed", "3",
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("max_only"));
    }

    #[test]
    fn missing_file_is_a_parse_error() {
        let (code, _, _) = run_capture(&["classify", "--in", "/nonexistent/map.json"]);
        assert_eq!(code, EXIT_PARSE);
    }

    #[test]
    fn unknown_flag_is_a_parse_error() {
        assert_eq!(run_capture(&["classify", "--bogus"]).0, EXIT_PARSE);
    }
}
