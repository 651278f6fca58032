//! The `revtri` command line: verify, extract, construct equality cases,
//! integrate and fuzz from JSON instance files.
//!
//! Exit codes: 0 verified or constructed, 1 conclusion violated beyond
//! tolerance, 2 a precondition or hypothesis fails, 3 bad input. A JSON
//! document is written to standard output for codes 0 to 2.

pub mod instance;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use revtri_core::fuzz::{fuzz_campaign, Backend, Caps, FuzzConfig, FuzzReport, Strategy};
use revtri_core::module::{bessel_defect, cs_gap, BesselSide};
use revtri_core::quadrature::{extract_integral_bounds, verify_integral_corollary};
use revtri_core::reverse::{
    build_additive_equality_instance, build_equality_instance, extract_additive_bounds, extract_family_bounds,
    extract_hermitian_bounds, extract_scalar_bounds, verify_additive, verify_family_modulus, verify_family_norm,
    verify_multiplicative_hermitian, verify_multiplicative_scalar, ScalarBounds,
};
use revtri_core::scalar::{self, HilbertFamily, HilbertVector};
use revtri_core::{check_diamond, Certificate, TheoremId, Verdict, DEFAULT_TOL};
use serde::Serialize;
use thiserror::Error;

pub use instance::{parse_instance, InstanceFile, SchemaError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "revtri", version, about = "Certify lower bounds for norms of sums in matrix-algebra modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Relative tolerance [default: the file's `tol`, else 1e-9]
    #[arg(long)]
    tol: Option<f64>,
    /// scalar, commutative or generic
    #[arg(long, default_value = "generic", value_parser = parse_backend)]
    backend: Backend,
    /// Omit the timestamp so output is byte-stable
    #[arg(long)]
    deterministic: bool,
}

#[derive(Debug, Args)]
struct Input {
    /// Theorem id; must agree with the file's `theorem` when both are set
    #[arg(long, value_parser = parse_theorem)]
    theorem: Option<TheoremId>,
    /// Instance file
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check hypotheses and conclusion, extracting constants the file omits
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Print the best constants the hypotheses allow
    Extract {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Build an equality instance from the family and bounds, then verify it
    ConstructEquality {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Verify the integral form on a sampled or generated path
    Integral {
        /// Instance file with `e` and `path`
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded soundness campaign over extracted constants
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per theorem
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Comma-separated theorem ids [default: all]
        #[arg(long, value_delimiter = ',', value_parser = parse_theorem)]
        theorem: Vec<TheoremId>,
        /// Caps as DIM,RANK,N,M; trailing entries may be omitted
        #[arg(long, value_parser = parse_dims)]
        dims: Option<Caps>,
        /// Perturb constructed equality instances by this relative amount
        #[arg(long)]
        equality_eps: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    s.parse().map_err(|e: revtri_core::Error| e.to_string())
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: revtri_core::Error| e.to_string())
}

fn parse_dims(s: &str) -> Result<Caps, String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if parts.is_empty() || parts.len() > 4 {
        return Err("expected 1 to 4 comma-separated sizes DIM,RANK,N,M".into());
    }
    let d = Caps::default();
    let get = |i: usize, default: usize| parts.get(i).copied().unwrap_or(default);
    Ok(Caps::new(get(0, d.max_dim), get(1, d.max_rank), get(2, d.max_n), get(3, d.max_m)))
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema error at {0}")]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Core(#[from] revtri_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use revtri_core::Error as E;
        match self {
            CliError::Core(E::Hypothesis { .. } | E::Capability(_) | E::Positivity { .. }) => EXIT_PRECONDITION,
            CliError::Core(E::Internal(_)) => EXIT_VIOLATED,
            _ => EXIT_INPUT,
        }
    }

    fn kind(&self) -> &'static str {
        use revtri_core::Error as E;
        match self {
            CliError::Core(E::Hypothesis { .. }) => "hypothesis",
            CliError::Core(E::Capability(_)) => "capability",
            CliError::Core(E::Positivity { .. }) => "positivity",
            CliError::Core(E::Internal(_)) => "internal",
            _ => "input",
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Body {
    Certificate {
        theorem: TheoremId,
        backend: Backend,
        verdict: Verdict,
        certificate: Box<Certificate>,
    },
    Bounds {
        theorem: TheoremId,
        backend: Backend,
        bounds: instance::BoundsFile,
    },
    Construction {
        theorem: TheoremId,
        verdict: Verdict,
        instance: Box<InstanceFile>,
        certificate: Box<Certificate>,
    },
    Fuzz {
        report: Box<FuzzReport>,
    },
    Error {
        #[serde(skip_serializing_if = "Option::is_none")]
        theorem: Option<TheoremId>,
        error: ErrorBody,
    },
}

#[derive(Serialize)]
struct Document<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    #[serde(flatten)]
    body: Body,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

struct Context<'a> {
    command: &'a str,
    deterministic: bool,
    theorem: Option<TheoremId>,
}

impl Context<'_> {
    fn emit(&self, code: u8, body: Body) -> Outcome {
        let timestamp = (!self.deterministic)
            .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
        let doc = Document {
            tool: "revtri",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            body,
            timestamp,
        };
        let mut stdout = serde_json::to_string_pretty(&doc).expect("output is serializable");
        stdout.push('\n');
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(&self, err: CliError) -> Outcome {
        let code = err.exit_code();
        let stderr = format!("revtri: {err}\n");
        if code == EXIT_INPUT {
            return Outcome {
                code,
                stdout: String::new(),
                stderr,
            };
        }
        let mut out = self.emit(
            code,
            Body::Error {
                theorem: self.theorem,
                error: ErrorBody {
                    kind: err.kind(),
                    message: err.to_string(),
                },
            },
        );
        out.stderr = stderr;
        out
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Verified => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::PreconditionFailed => EXIT_PRECONDITION,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match cli.command {
        Command::Verify { input, common } => with_instance("verify", &input.input, input.theorem, &common, verify),
        Command::Extract { input, common } => with_instance("extract", &input.input, input.theorem, &common, extract),
        Command::ConstructEquality { input, common } => {
            with_instance("construct-equality", &input.input, input.theorem, &common, construct)
        }
        Command::Integral { input, common } => {
            with_instance("integral", &input, Some(TheoremId::Integral), &common, verify)
        }
        Command::Fuzz {
            seed,
            trials,
            theorem,
            dims,
            equality_eps,
            common,
        } => {
            let ctx = Context {
                command: "fuzz",
                deterministic: common.deterministic,
                theorem: None,
            };
            let theorems = if theorem.is_empty() { TheoremId::ALL.to_vec() } else { theorem };
            let mut config = FuzzConfig::new(seed, trials, theorems);
            config.caps = dims.unwrap_or_default();
            config.tol = common.tol.unwrap_or(DEFAULT_TOL);
            config.backend = common.backend;
            if let Some(eps) = equality_eps {
                config.strategy = Strategy::EqualityBiased { eps };
            }
            match fuzz_campaign(&config) {
                Ok(report) => {
                    let code = if report.is_clean() { EXIT_OK } else { EXIT_VIOLATED };
                    ctx.emit(code, Body::Fuzz { report: Box::new(report) })
                }
                Err(e) => ctx.fail(e.into()),
            }
        }
    }
}

struct Job<'a> {
    theorem: TheoremId,
    file: &'a InstanceFile,
    resolved: &'a instance::Resolved,
    tol: f64,
    backend: Backend,
}

fn with_instance(
    command: &str,
    path: &PathBuf,
    theorem: Option<TheoremId>,
    common: &Common,
    action: fn(&Job) -> Result<(u8, Body), CliError>,
) -> Outcome {
    let mut ctx = Context {
        command,
        deterministic: common.deterministic,
        theorem,
    };
    let prepared = (|| {
        let bytes = std::fs::read(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        let file = parse_instance(&bytes)?;
        let theorem = match (theorem, file.theorem) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Usage(format!("--theorem {a} disagrees with /theorem = {b}")));
            }
            (Some(t), _) | (None, Some(t)) => t,
            (None, None) => return Err(CliError::Usage("no theorem: pass --theorem or set /theorem".into())),
        };
        let tol = common.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Usage(format!("tolerance {tol} must be positive")));
        }
        let resolved = file.resolve()?;
        match common.backend {
            Backend::Scalar if resolved.space.algebra().dim() != 1 => {
                return Err(CliError::Usage(format!(
                    "the scalar backend needs algebra blocks [1], got {}",
                    resolved.space.algebra()
                )));
            }
            Backend::Commutative if !resolved.space.algebra().is_commutative() => {
                return Err(CliError::Usage(format!(
                    "the commutative backend needs a diagonal algebra, got {}",
                    resolved.space.algebra()
                )));
            }
            _ => {}
        }
        Ok((file, resolved, theorem, tol))
    })();
    let (file, resolved, theorem, tol) = match prepared {
        Ok(p) => p,
        Err(e) => return ctx.fail(e),
    };
    ctx.theorem = Some(theorem);
    let job = Job {
        theorem,
        file: &file,
        resolved: &resolved,
        tol,
        backend: common.backend,
    };
    match action(&job) {
        Ok((code, body)) => ctx.emit(code, body),
        Err(e) => ctx.fail(e),
    }
}

fn certificate_body(job: &Job, cert: Certificate) -> (u8, Body) {
    let verdict = cert.verdict();
    (
        verdict_code(verdict),
        Body::Certificate {
            theorem: job.theorem,
            backend: job.backend,
            verdict,
            certificate: Box::new(cert),
        },
    )
}

fn exactly<'a, T>(items: &'a [T], n: usize, pointer: &str, what: &str) -> Result<&'a [T], CliError> {
    if items.len() != n {
        return Err(SchemaError::new(pointer, format!("{what} needs exactly {n} vector(s), got {}", items.len())).into());
    }
    Ok(items)
}

fn verify(job: &Job) -> Result<(u8, Body), CliError> {
    let cert = if job.backend == Backend::Scalar {
        verify_scalar(job)?
    } else {
        verify_generic(job)?
    };
    Ok(certificate_body(job, cert))
}

fn verify_generic(job: &Job) -> Result<Certificate, CliError> {
    let (f, r, tol) = (job.file, job.resolved, job.tol);
    let t = job.theorem;
    Ok(match t {
        TheoremId::Diamond => check_diamond(r.a()?, tol),
        TheoremId::CauchySchwarz => {
            let xs = exactly(r.xs()?, 2, "/xs", "cauchy-schwarz")?;
            cs_gap(&xs[0], &xs[1], tol)?
        }
        TheoremId::Bessel => {
            let xs = exactly(r.xs()?, 1, "/xs", "bessel")?;
            bessel_defect(&xs[0], r.family()?, BesselSide::Right, tol)?
        }
        TheoremId::MultScalar => {
            let (e, xs) = (r.e()?, r.xs()?);
            let b = match f.scalar_bounds()? {
                Some(b) => b,
                None => extract_scalar_bounds(e, xs)?,
            };
            verify_multiplicative_scalar(e, xs, b, tol)?
        }
        TheoremId::MultHermitian => {
            let (e, xs) = (r.e()?, r.xs()?);
            let b = match f.hermitian_bounds()? {
                Some(b) => b,
                None => extract_hermitian_bounds(e, xs)?,
            };
            verify_multiplicative_hermitian(e, xs, &b, tol)?
        }
        TheoremId::FamilyNorm | TheoremId::FamilyModulus => {
            let (family, xs) = (r.family()?, r.xs()?);
            let b = match f.family_bounds()? {
                Some(b) => b,
                None => extract_family_bounds(family, xs)?,
            };
            if t == TheoremId::FamilyNorm {
                verify_family_norm(family, xs, &b, tol)?
            } else {
                verify_family_modulus(family, xs, &b, tol)?
            }
        }
        TheoremId::Additive => {
            let (family, xs) = (r.family()?, r.xs()?);
            let b = match f.additive_bounds()? {
                Some(b) => b,
                None => extract_additive_bounds(family, xs)?,
            };
            verify_additive(family, xs, &b, tol)?
        }
        TheoremId::Integral => {
            let e = r.e()?;
            let path = r.path()?.build()?;
            let b = match f.hermitian_bounds()? {
                Some(b) => b,
                None => extract_integral_bounds(&path, e)?,
            };
            verify_integral_corollary(&path, e, &b.k1, &b.k2, tol)?
        }
    })
}

fn hilbert(xs: &[revtri_core::ModuleVector]) -> Result<Vec<HilbertVector>, CliError> {
    Ok(xs.iter().map(HilbertVector::from_module).collect::<Result<_, _>>()?)
}

fn verify_scalar(job: &Job) -> Result<Certificate, CliError> {
    let (f, r, tol) = (job.file, job.resolved, job.tol);
    let t = job.theorem;
    let family = || -> Result<HilbertFamily, CliError> { Ok(HilbertFamily::from_module(r.family()?)?) };
    let e = || -> Result<HilbertVector, CliError> { Ok(HilbertVector::from_module(r.e()?)?) };
    Ok(match t {
        TheoremId::CauchySchwarz => {
            let xs = hilbert(exactly(r.xs()?, 2, "/xs", "cauchy-schwarz")?)?;
            scalar::cs_gap(&xs[0], &xs[1], tol)
        }
        TheoremId::Bessel => {
            let xs = hilbert(exactly(r.xs()?, 1, "/xs", "bessel")?)?;
            scalar::bessel_defect(&xs[0], &family()?, tol)
        }
        TheoremId::MultScalar => {
            let (e, xs) = (e()?, hilbert(r.xs()?)?);
            let b = match f.scalar_bounds()? {
                Some(b) => b,
                None => scalar::extract_scalar_bounds(&e, &xs)?,
            };
            scalar::verify_multiplicative_scalar(&e, &xs, b, tol)
        }
        TheoremId::MultHermitian => {
            let b = match f.scalar_bounds()? {
                Some(b) => b,
                None => {
                    let h = extract_hermitian_bounds(r.e()?, r.xs()?)?;
                    ScalarBounds {
                        k1: h.k1.get(0, 0).re,
                        k2: h.k2.get(0, 0).re,
                    }
                }
            };
            scalar::verify_multiplicative_hermitian(&e()?, &hilbert(r.xs()?)?, b.k1, b.k2, tol)
        }
        TheoremId::FamilyNorm | TheoremId::FamilyModulus => {
            let (family, xs) = (family()?, hilbert(r.xs()?)?);
            let b = match f.family_bounds()? {
                Some(b) => b,
                None => scalar::extract_family_bounds(&family, &xs)?,
            };
            if t == TheoremId::FamilyNorm {
                scalar::verify_family_norm(&family, &xs, &b, tol)
            } else {
                scalar::verify_family_modulus(&family, &xs, &b, tol)
            }
        }
        TheoremId::Additive => {
            let (family, xs) = (family()?, hilbert(r.xs()?)?);
            let b = match f.additive_bounds()? {
                Some(b) => b,
                None => scalar::extract_additive_bounds(&family, &xs),
            };
            scalar::verify_additive(&family, &xs, &b, tol)
        }
        TheoremId::Diamond | TheoremId::Integral => {
            return Err(CliError::Usage(format!("{t} is not available on the scalar backend")));
        }
    })
}

fn extract(job: &Job) -> Result<(u8, Body), CliError> {
    use instance::BoundsFile;
    let r = job.resolved;
    let scalar = job.backend == Backend::Scalar;
    let bounds = match job.theorem {
        TheoremId::MultScalar if scalar => {
            BoundsFile::from_scalar(scalar::extract_scalar_bounds(&HilbertVector::from_module(r.e()?)?, &hilbert(r.xs()?)?)?)
        }
        TheoremId::MultScalar => BoundsFile::from_scalar(extract_scalar_bounds(r.e()?, r.xs()?)?),
        TheoremId::MultHermitian => BoundsFile::from_hermitian(&extract_hermitian_bounds(r.e()?, r.xs()?)?),
        TheoremId::FamilyNorm | TheoremId::FamilyModulus if scalar => BoundsFile::from_family(
            &scalar::extract_family_bounds(&HilbertFamily::from_module(r.family()?)?, &hilbert(r.xs()?)?)?,
        ),
        TheoremId::FamilyNorm | TheoremId::FamilyModulus => {
            BoundsFile::from_family(&extract_family_bounds(r.family()?, r.xs()?)?)
        }
        TheoremId::Additive if scalar => BoundsFile::from_additive(&scalar::extract_additive_bounds(
            &HilbertFamily::from_module(r.family()?)?,
            &hilbert(r.xs()?)?,
        )),
        TheoremId::Additive => BoundsFile::from_additive(&extract_additive_bounds(r.family()?, r.xs()?)?),
        TheoremId::Integral => {
            let path = r.path()?.build()?;
            BoundsFile::from_hermitian(&extract_integral_bounds(&path, r.e()?)?)
        }
        t @ (TheoremId::Diamond | TheoremId::CauchySchwarz | TheoremId::Bessel) => {
            return Err(CliError::Usage(format!("{t} has no constants to extract")));
        }
    };
    Ok((
        EXIT_OK,
        Body::Bounds {
            theorem: job.theorem,
            backend: job.backend,
            bounds,
        },
    ))
}

fn construct(job: &Job) -> Result<(u8, Body), CliError> {
    use instance::BoundsFile;
    let (f, r, tol, t) = (job.file, job.resolved, job.tol, job.theorem);
    let family = r.family()?;
    let (xs, bounds, cert) = match t {
        TheoremId::FamilyNorm | TheoremId::FamilyModulus => {
            let b = f.family_bounds()?.ok_or_else(|| SchemaError::new("/bounds", "required field is missing"))?;
            let norms = f.norms.clone().unwrap_or_else(|| vec![1.0]);
            let xs = build_equality_instance(family, &b, &norms)?;
            let cert = if t == TheoremId::FamilyNorm {
                verify_family_norm(family, &xs, &b, tol)?
            } else {
                verify_family_modulus(family, &xs, &b, tol)?
            };
            (xs, BoundsFile::from_family(&b), cert)
        }
        TheoremId::Additive => {
            let scales = f.scales.clone().unwrap_or_else(|| vec![1.0]);
            let xs = build_additive_equality_instance(family, &scales)?;
            let b = extract_additive_bounds(family, &xs)?;
            let cert = verify_additive(family, &xs, &b, tol)?;
            (xs, BoundsFile::from_additive(&b), cert)
        }
        _ => return Err(CliError::Usage(format!("no equality constructor for {t}"))),
    };
    let mut out = f.with_xs(&xs);
    out.theorem = Some(t);
    out.bounds = Some(bounds);
    let verdict = cert.verdict();
    let code = match verdict {
        Verdict::Verified if !cert.equality => EXIT_VIOLATED,
        v => verdict_code(v),
    };
    Ok((
        code,
        Body::Construction {
            theorem: t,
            verdict,
            instance: Box::new(out),
            certificate: Box::new(cert),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parsing() {
        assert_eq!(parse_dims("2,3").unwrap(), Caps::new(2, 3, 5, 3));
        assert_eq!(parse_dims("4,4,5,3").unwrap(), Caps::default());
        assert!(parse_dims("1,2,3,4,5").is_err());
        assert!(parse_dims("a").is_err());
    }

    #[test]
    fn unknown_flags_are_input_errors() {
        let out = run(["revtri", "verify", "--bogus"]);
        assert_eq!(out.code, EXIT_INPUT);
        assert!(out.stdout.is_empty());
        assert!(out.stderr.contains("--bogus"));
        assert_eq!(run(["revtri"]).code, EXIT_INPUT);
        assert_eq!(run(["revtri", "--help"]).code, EXIT_OK);
    }

    #[test]
    fn missing_file_is_input_error() {
        let out = run(["revtri", "verify", "--in", "/nonexistent/instance.json"]);
        assert_eq!(out.code, EXIT_INPUT);
        assert!(out.stderr.contains("cannot read"));
    }
}
