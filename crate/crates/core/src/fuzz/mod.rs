//! Seeded soundness fuzzing and sharpness search.
//!
//! Every trial draws an instance, extracts the best constants its theorem
//! allows and verifies the conclusion. Since the theorems are proven, any
//! failed precondition or negative relative slack beyond tolerance is an
//! implementation bug and is reported as a failure.

mod instance;
mod sharpness;

pub use instance::{evaluate, evaluate_scalar, gen_instance, Instance, ENTRY_CAP};
pub use sharpness::{sharpness_search, SearchBounds, SharpnessOptions, SharpnessResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::DEFAULT_TOL;
use crate::certificate::TheoremId;
use crate::error::{Error, Result};

/// Description of the generator behind every trial.
pub const PRNG_ID: &str = "rand_chacha 0.9 ChaCha20Rng::seed_from_u64(seed), stream (theorem_index << 48) | trial";

/// Which algebras instances are drawn over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// `A = ℂ`.
    Scalar,
    /// `A = ℂ^d`, two-sided modules.
    Commutative,
    /// Random block-diagonal algebras; commutative where a theorem needs a
    /// two-sided module.
    #[default]
    Generic,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(Backend::Scalar),
            "commutative" => Ok(Backend::Commutative),
            "generic" => Ok(Backend::Generic),
            _ => Err(Error::input(format!("unknown backend {s:?}"))),
        }
    }
}

/// Size limits for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Total algebra dimension `Σdᵢ`.
    pub max_dim: usize,
    /// Largest single block.
    pub max_block: usize,
    pub max_rank: usize,
    pub max_n: usize,
    pub max_m: usize,
}

impl Caps {
    pub const LIMIT: Caps = Caps {
        max_dim: 8,
        max_block: 8,
        max_rank: 6,
        max_n: 8,
        max_m: 6,
    };

    pub fn new(max_dim: usize, max_rank: usize, max_n: usize, max_m: usize) -> Self {
        Caps {
            max_dim,
            max_block: max_dim,
            max_rank,
            max_n,
            max_m,
        }
    }

    fn validate(&self) -> Result<()> {
        let l = Caps::LIMIT;
        let fields = [
            ("max_dim", self.max_dim, l.max_dim),
            ("max_block", self.max_block, l.max_block),
            ("max_rank", self.max_rank, l.max_rank),
            ("max_n", self.max_n, l.max_n),
            ("max_m", self.max_m, l.max_m),
        ];
        for (name, v, hi) in fields {
            if v == 0 || v > hi {
                return Err(Error::input(format!("{name} = {v} must be between 1 and {hi}")));
            }
        }
        Ok(())
    }
}

impl Default for Caps {
    fn default() -> Self {
        Caps::new(4, 4, 5, 3)
    }
}

/// How instances are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy {
    /// Random vectors biased toward alignment.
    #[default]
    Random,
    /// Equality instances with every `x_j` moved by `eps·‖x_j‖`.
    EqualityBiased { eps: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub seed: u64,
    /// Trials per theorem.
    pub trials: u64,
    pub caps: Caps,
    pub theorems: Vec<TheoremId>,
    pub tol: f64,
    pub backend: Backend,
    pub strategy: Strategy,
}

impl FuzzConfig {
    pub fn new(seed: u64, trials: u64, theorems: Vec<TheoremId>) -> Self {
        FuzzConfig {
            seed,
            trials,
            caps: Caps::default(),
            theorems,
            tol: DEFAULT_TOL,
            backend: Backend::default(),
            strategy: Strategy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::input("trials must be at least 1"));
        }
        if self.trials >= 1 << 48 {
            return Err(Error::input("trials must be below 2^48"));
        }
        if self.theorems.is_empty() {
            return Err(Error::input("at least one theorem is required"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::input(format!("tolerance {} must be positive", self.tol)));
        }
        if let Strategy::EqualityBiased { eps } = self.strategy {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::input(format!("perturbation {eps} must be nonnegative")));
            }
        }
        self.caps.validate()
    }
}

/// A trial whose certificate did not verify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub theorem: TheoremId,
    pub trial: u64,
    pub reason: String,
    pub relative_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub theorem: TheoremId,
    pub trials: u64,
    pub passes: u64,
    pub failures: u64,
    pub equalities: u64,
    pub worst_relative_slack: f64,
    pub largest_relative_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nearest {
    pub theorem: TheoremId,
    pub trial: u64,
    pub relative_slack: f64,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub prng: String,
    pub config: FuzzConfig,
    pub trials: u64,
    pub passes: u64,
    pub failures: Vec<Failure>,
    /// Smallest relative slack over all verified trials.
    pub worst_relative_slack: f64,
    pub per_theorem: Vec<TheoremSummary>,
    /// Verified trial with the smallest `|relative slack|`.
    pub nearest_to_equality: Option<Nearest>,
}

impl FuzzReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Outcome {
    theorem: TheoremId,
    trial: u64,
    relative_slack: Option<f64>,
    equality: bool,
    failure: Option<String>,
}

fn run_trial(config: &FuzzConfig, theorem: TheoremId, trial: u64) -> Outcome {
    let result = gen_instance(config, theorem, trial).and_then(|inst| match config.backend {
        Backend::Scalar => evaluate_scalar(theorem, &inst, config.tol),
        _ => evaluate(theorem, &inst, config.tol),
    });
    let mut out = Outcome {
        theorem,
        trial,
        relative_slack: None,
        equality: false,
        failure: None,
    };
    match result {
        Err(e) => out.failure = Some(e.to_string()),
        Ok(cert) => {
            out.relative_slack = Some(cert.relative_slack);
            out.equality = cert.equality;
            if !cert.preconditions_ok {
                let names: Vec<_> = cert.failed_preconditions().map(|p| p.name.as_str()).collect();
                out.failure = Some(format!("extracted bounds failed {}", names.join(", ")));
            } else if !cert.holds {
                out.failure = Some(format!("conclusion violated, relative slack {:e}", cert.relative_slack));
            }
        }
    }
    out
}

/// Runs `config.trials` trials for every theorem in parallel; the report is
/// a deterministic function of the configuration.
pub fn fuzz_campaign(config: &FuzzConfig) -> Result<FuzzReport> {
    config.validate()?;
    let jobs: Vec<(TheoremId, u64)> = config
        .theorems
        .iter()
        .flat_map(|&t| (0..config.trials).map(move |i| (t, i)))
        .collect();
    let outcomes: Vec<Outcome> = jobs.par_iter().map(|&(t, i)| run_trial(config, t, i)).collect();

    let mut failures = Vec::new();
    let mut per_theorem: Vec<TheoremSummary> = config
        .theorems
        .iter()
        .map(|&theorem| TheoremSummary {
            theorem,
            trials: 0,
            passes: 0,
            failures: 0,
            equalities: 0,
            worst_relative_slack: f64::INFINITY,
            largest_relative_slack: f64::NEG_INFINITY,
        })
        .collect();
    let mut nearest: Option<(TheoremId, u64, f64)> = None;
    for (idx, o) in outcomes.iter().enumerate() {
        let summary = &mut per_theorem[idx / config.trials as usize];
        summary.trials += 1;
        if let Some(s) = o.relative_slack {
            summary.worst_relative_slack = summary.worst_relative_slack.min(s);
            summary.largest_relative_slack = summary.largest_relative_slack.max(s);
        }
        match &o.failure {
            Some(reason) => {
                summary.failures += 1;
                failures.push(Failure {
                    theorem: o.theorem,
                    trial: o.trial,
                    reason: reason.clone(),
                    relative_slack: o.relative_slack,
                });
            }
            None => {
                summary.passes += 1;
                summary.equalities += o.equality as u64;
                let s = o.relative_slack.expect("verified trials carry a slack");
                if o.theorem != TheoremId::Diamond && nearest.map_or(true, |(_, _, best)| s.abs() < best.abs()) {
                    nearest = Some((o.theorem, o.trial, s));
                }
            }
        }
    }
    let nearest_to_equality = nearest
        .map(|(theorem, trial, relative_slack)| {
            gen_instance(config, theorem, trial).map(|instance| Nearest {
                theorem,
                trial,
                relative_slack,
                instance,
            })
        })
        .transpose()?;
    let passes = per_theorem.iter().map(|s| s.passes).sum();
    let worst = per_theorem
        .iter()
        .map(|s| s.worst_relative_slack)
        .fold(f64::INFINITY, f64::min);
    Ok(FuzzReport {
        prng: PRNG_ID.to_string(),
        config: config.clone(),
        trials: outcomes.len() as u64,
        passes,
        failures,
        worst_relative_slack: worst,
        per_theorem,
        nearest_to_equality,
    })
}
