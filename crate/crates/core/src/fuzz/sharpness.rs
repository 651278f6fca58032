use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::instance::{sharpness_start, trial_rng};
use super::{evaluate, FuzzConfig, Instance};
use crate::algebra::Element;
use crate::certificate::{Certificate, Quantity, TheoremId};
use crate::error::{Error, Result};
use crate::module::ModuleVector;
use crate::random;

/// Constants used while climbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SearchBounds {
    /// Re-extracted best constants for the current vectors.
    #[default]
    Extracted,
    /// All constants zero, so the left side vanishes.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessOptions {
    pub max_steps: usize,
    pub bounds: SearchBounds,
    pub initial_step: f64,
    /// Stop once `1 − ratio` drops below this.
    pub target_gap: f64,
}

impl Default for SharpnessOptions {
    fn default() -> Self {
        SharpnessOptions {
            max_steps: 10_000,
            bounds: SearchBounds::Extracted,
            initial_step: 0.2,
            target_gap: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub theorem: TheoremId,
    pub ratio: f64,
    pub steps: usize,
    pub instance: Instance,
    pub certificate: Certificate,
}

const SUPPORTED: [TheoremId; 4] = [
    TheoremId::MultScalar,
    TheoremId::FamilyNorm,
    TheoremId::FamilyModulus,
    TheoremId::Additive,
];

/// Left side over right side, read off a certificate: the right side is
/// `lhs + slack` for both scalar and `c·1 ≤ b` conclusions.
fn ratio_of(cert: &Certificate, bounds: SearchBounds) -> f64 {
    if !cert.preconditions_ok {
        return f64::NEG_INFINITY;
    }
    let lhs = match (&cert.lhs, bounds) {
        (_, SearchBounds::Zero) => 0.0,
        (Quantity::Scalar(v), _) => *v,
        (Quantity::Matrix(m), _) => m[0][0].0.re,
    };
    let rhs = lhs + cert.slack;
    if rhs > 0.0 {
        lhs / rhs
    } else {
        0.0
    }
}

fn score(theorem: TheoremId, inst: &Instance, tol: f64, bounds: SearchBounds) -> Option<(f64, Certificate)> {
    let cert = evaluate(theorem, inst, tol).ok()?;
    Some((ratio_of(&cert, bounds), cert))
}

/// Adds `delta` to entry `(i, k)` of coordinate `c` of `x`.
fn bump(x: &ModuleVector, c: usize, i: usize, k: usize, delta: Complex64) -> ModuleVector {
    let mut coords = x.coords().to_vec();
    let old = &coords[c];
    coords[c] = Element::from_fn(old.shape(), |r, s| {
        if (r, s) == (i, k) {
            old.get(r, s) + delta
        } else {
            old.get(r, s)
        }
    });
    ModuleVector::from_coords(x.space(), coords).expect("same space")
}

/// Hill climbing on the vectors `x_j` toward the equality case of
/// `theorem`, with the reference vector or family held fixed.
///
/// Each step perturbs one real coordinate of one `x_j` by `±σ` and keeps the
/// move if `lhs/rhs` increases. `σ` grows by 1.5 on success and shrinks so
/// that a success rate of one in five is stationary; after repeated misses a
/// random direction in all coordinates is tried.
pub fn sharpness_search(theorem: TheoremId, config: &FuzzConfig, options: SharpnessOptions) -> Result<SharpnessResult> {
    if !SUPPORTED.contains(&theorem) {
        return Err(Error::capability(format!(
            "sharpness search needs a theorem with a certified equality case, not {theorem}"
        )));
    }
    config.validate()?;
    let mut rng = trial_rng(config.seed, theorem, (1 << 48) - 2);
    let mut inst = sharpness_start(config, theorem)?;
    let (mut best, mut cert) = score(theorem, &inst, config.tol, options.bounds)
        .ok_or_else(|| Error::Internal("sharpness start does not verify".into()))?;
    let shape = inst.space().expect("vector instance").algebra().clone();
    let ranges: Vec<_> = shape.block_ranges().collect();
    let grow = 1.5f64;
    let shrink = grow.powf(-0.25);
    let mut sigma = options.initial_step;
    let mut misses = 0;
    let mut steps = 0;
    while steps < options.max_steps && 1.0 - best > options.target_gap && sigma > 1e-15 {
        steps += 1;
        let xs = inst.xs();
        let candidates: Vec<Vec<ModuleVector>> = if misses >= 8 {
            misses = 0;
            let dir: Vec<ModuleVector> = xs
                .iter()
                .map(|x| {
                    let coords = (0..x.space().rank())
                        .map(|_| random::element(&mut rng, &shape, 1.0))
                        .collect();
                    ModuleVector::from_coords(x.space(), coords).expect("same space")
                })
                .collect();
            let step = |s: f64| xs.iter().zip(&dir).map(|(x, d)| x + &d.scale_real(s)).collect();
            vec![step(sigma), step(-sigma)]
        } else {
            let j = rng.random_range(0..xs.len());
            let c = rng.random_range(0..xs[j].space().rank());
            let block = &ranges[rng.random_range(0..ranges.len())];
            let i = rng.random_range(block.clone());
            let k = rng.random_range(block.clone());
            let unit = if rng.random::<bool>() {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 1.0)
            };
            [sigma, -sigma]
                .iter()
                .map(|&s| {
                    let mut v = xs.to_vec();
                    v[j] = bump(&xs[j], c, i, k, unit * s);
                    v
                })
                .collect()
        };
        let mut improved = false;
        for cand in candidates {
            let next = inst.with_xs(cand);
            if let Some((r, c)) = score(theorem, &next, config.tol, options.bounds) {
                if r > best {
                    best = r;
                    cert = c;
                    inst = next;
                    improved = true;
                    break;
                }
            }
        }
        if improved {
            sigma *= grow;
            misses = 0;
        } else {
            sigma *= shrink;
            misses += 1;
        }
    }
    Ok(SharpnessResult {
        theorem,
        ratio: best,
        steps,
        instance: inst,
        certificate: cert,
    })
}
