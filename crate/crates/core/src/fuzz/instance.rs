use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{Backend, FuzzConfig, Strategy};
use crate::algebra::{AlgebraShape, Element};
use crate::certificate::{check_diamond, Certificate, TheoremId};
use crate::error::Result;
use crate::json::MatrixRepr;
use crate::module::{bessel_defect, cs_gap, make_ortho_family, BesselSide, ModuleSpace, ModuleVector, OrthoFamily};
use crate::quadrature::{extract_integral_bounds, verify_integral_corollary, PathGenerator, PathSpec};
use crate::random;
use crate::reverse::{
    build_additive_equality_instance, build_equality_instance, extract_additive_bounds, extract_family_bounds,
    extract_hermitian_bounds, extract_scalar_bounds, verify_additive, verify_family_modulus, verify_family_norm,
    verify_multiplicative_hermitian, verify_multiplicative_scalar, FamilyBounds,
};

/// Largest coordinate entry magnitude in generated vectors.
pub const ENTRY_CAP: f64 = 2.0;

/// Nodes per generated path in fuzzing.
const PATH_NODES: usize = 48;

/// Data of one randomized trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    Element { algebra: AlgebraShape, a: MatrixRepr },
    Pair { x: ModuleVector, y: ModuleVector },
    Single { e: ModuleVector, xs: Vec<ModuleVector> },
    Family { family: OrthoFamily, xs: Vec<ModuleVector> },
    Path { e: ModuleVector, path: PathSpec },
}

impl Instance {
    pub fn space(&self) -> Option<&ModuleSpace> {
        match self {
            Instance::Element { .. } => None,
            Instance::Pair { x, .. } => Some(x.space()),
            Instance::Single { e, .. } | Instance::Path { e, .. } => Some(e.space()),
            Instance::Family { family, .. } => Some(family.space()),
        }
    }

    pub fn xs(&self) -> &[ModuleVector] {
        match self {
            Instance::Single { xs, .. } | Instance::Family { xs, .. } => xs,
            _ => &[],
        }
    }

    pub(crate) fn with_xs(&self, xs: Vec<ModuleVector>) -> Instance {
        match self {
            Instance::Single { e, .. } => Instance::Single { e: e.clone(), xs },
            Instance::Family { family, .. } => Instance::Family {
                family: family.clone(),
                xs,
            },
            other => other.clone(),
        }
    }
}

/// Extracts bounds for `theorem` from the instance and runs its verifier.
///
/// For the Bessel bound in a two-sided module both sides are checked and the
/// certificate with the smaller relative slack is returned.
pub fn evaluate(theorem: TheoremId, instance: &Instance, tol: f64) -> Result<Certificate> {
    use crate::error::Error;
    let mismatch = || Error::input(format!("instance kind does not fit theorem {theorem}"));
    match (theorem, instance) {
        (TheoremId::Diamond, Instance::Element { algebra, a }) => Ok(check_diamond(&Element::from_repr(algebra, a)?, tol)),
        (TheoremId::CauchySchwarz, Instance::Pair { x, y }) => cs_gap(x, y, tol),
        (TheoremId::Bessel, Instance::Family { family, xs }) => {
            let x = xs.first().ok_or_else(mismatch)?;
            let right = bessel_defect(x, family, BesselSide::Right, tol)?;
            if !family.space().is_two_sided() {
                return Ok(right);
            }
            let left = bessel_defect(x, family, BesselSide::Left, tol)?;
            Ok(if left.relative_slack < right.relative_slack { left } else { right })
        }
        (TheoremId::MultScalar, Instance::Single { e, xs }) => {
            verify_multiplicative_scalar(e, xs, extract_scalar_bounds(e, xs)?, tol)
        }
        (TheoremId::MultHermitian, Instance::Single { e, xs }) => {
            verify_multiplicative_hermitian(e, xs, &extract_hermitian_bounds(e, xs)?, tol)
        }
        (TheoremId::FamilyNorm, Instance::Family { family, xs }) => {
            verify_family_norm(family, xs, &extract_family_bounds(family, xs)?, tol)
        }
        (TheoremId::FamilyModulus, Instance::Family { family, xs }) => {
            verify_family_modulus(family, xs, &extract_family_bounds(family, xs)?, tol)
        }
        (TheoremId::Additive, Instance::Family { family, xs }) => {
            verify_additive(family, xs, &extract_additive_bounds(family, xs)?, tol)
        }
        (TheoremId::Integral, Instance::Path { e, path }) => {
            let path = path.build()?;
            let b = extract_integral_bounds(&path, e)?;
            verify_integral_corollary(&path, e, &b.k1, &b.k2, tol)
        }
        _ => Err(mismatch()),
    }
}

/// [`evaluate`] through the plain complex-arithmetic implementations of
/// [`crate::scalar`]; the instance must live over `blocks = [1]`. Bounds
/// for the hermitian form come from the generic extractor since in `ℂ` they
/// are the same numbers. `diamond` and `integral` have no scalar version
/// and go through [`evaluate`].
pub fn evaluate_scalar(theorem: TheoremId, instance: &Instance, tol: f64) -> Result<Certificate> {
    use crate::error::Error;
    use crate::scalar::{self, HilbertFamily, HilbertVector};
    if let Some(space) = instance.space() {
        if space.algebra().dim() != 1 {
            return Err(Error::input(format!("scalar backend needs blocks [1], got {}", space.algebra())));
        }
    }
    let hs = |xs: &[ModuleVector]| xs.iter().map(HilbertVector::from_module).collect::<Result<Vec<_>>>();
    let mismatch = || Error::input(format!("instance kind does not fit theorem {theorem}"));
    match (theorem, instance) {
        (TheoremId::CauchySchwarz, Instance::Pair { x, y }) => Ok(scalar::cs_gap(
            &HilbertVector::from_module(x)?,
            &HilbertVector::from_module(y)?,
            tol,
        )),
        (TheoremId::Bessel, Instance::Family { family, xs }) => {
            let x = xs.first().ok_or_else(mismatch)?;
            Ok(scalar::bessel_defect(&HilbertVector::from_module(x)?, &HilbertFamily::from_module(family)?, tol))
        }
        (TheoremId::MultScalar, Instance::Single { e, xs }) => {
            let (e, xs) = (HilbertVector::from_module(e)?, hs(xs)?);
            let b = scalar::extract_scalar_bounds(&e, &xs)?;
            Ok(scalar::verify_multiplicative_scalar(&e, &xs, b, tol))
        }
        (TheoremId::MultHermitian, Instance::Single { e, xs }) => {
            let b = extract_hermitian_bounds(e, xs)?;
            let (k1, k2) = (b.k1.get(0, 0).re, b.k2.get(0, 0).re);
            Ok(scalar::verify_multiplicative_hermitian(&HilbertVector::from_module(e)?, &hs(xs)?, k1, k2, tol))
        }
        (TheoremId::FamilyNorm | TheoremId::FamilyModulus, Instance::Family { family, xs }) => {
            let (f, xs) = (HilbertFamily::from_module(family)?, hs(xs)?);
            let b = scalar::extract_family_bounds(&f, &xs)?;
            Ok(if theorem == TheoremId::FamilyNorm {
                scalar::verify_family_norm(&f, &xs, &b, tol)
            } else {
                scalar::verify_family_modulus(&f, &xs, &b, tol)
            })
        }
        (TheoremId::Additive, Instance::Family { family, xs }) => {
            let (f, xs) = (HilbertFamily::from_module(family)?, hs(xs)?);
            let b = scalar::extract_additive_bounds(&f, &xs);
            Ok(scalar::verify_additive(&f, &xs, &b, tol))
        }
        (TheoremId::Diamond | TheoremId::Integral, _) => evaluate(theorem, instance, tol),
        _ => Err(mismatch()),
    }
}

/// Generator for trial `trial` of `theorem`: ChaCha20 seeded from the
/// campaign seed, on stream `theorem_index << 48 | trial`.
pub(crate) fn trial_rng(seed: u64, theorem: TheoremId, trial: u64) -> ChaCha20Rng {
    let index = TheoremId::ALL.iter().position(|&t| t == theorem).unwrap_or(0) as u64;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((index << 48) | (trial & ((1 << 48) - 1)));
    rng
}

/// Deterministic instance for `(config.seed, theorem, trial)`.
///
/// Vectors are biased toward alignment with `e` (or the family) so that the
/// extracted bounds are usually nonzero; entries never exceed
/// [`ENTRY_CAP`] in magnitude.
pub fn gen_instance(config: &FuzzConfig, theorem: TheoremId, trial: u64) -> Result<Instance> {
    let mut rng = trial_rng(config.seed, theorem, trial);
    let g = &mut Gen {
        rng: &mut rng,
        config,
    };
    let equality = match config.strategy {
        Strategy::Random => None,
        Strategy::EqualityBiased { eps } => Some(eps),
    };
    match theorem {
        TheoremId::Diamond => {
            let shape = g.shape(false);
            let a = random::element(g.rng, &shape, ENTRY_CAP);
            Ok(Instance::Element {
                a: a.to_repr(),
                algebra: shape,
            })
        }
        TheoremId::CauchySchwarz => g.pair(equality),
        TheoremId::Bessel => g.bessel(equality),
        TheoremId::MultScalar => g.single(true, equality),
        TheoremId::MultHermitian => g.single(false, equality),
        TheoremId::FamilyNorm => g.family(false, equality),
        TheoremId::FamilyModulus => g.family(true, equality),
        TheoremId::Additive => g.additive(equality),
        TheoremId::Integral => g.path(equality),
    }
}

struct Gen<'a> {
    rng: &'a mut ChaCha20Rng,
    config: &'a FuzzConfig,
}

impl Gen<'_> {
    fn upto(&mut self, max: usize) -> usize {
        self.rng.random_range(1..=max)
    }

    fn coin(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }

    fn shape(&mut self, commutative: bool) -> AlgebraShape {
        let caps = self.config.caps;
        match self.config.backend {
            Backend::Scalar => AlgebraShape::scalar(),
            Backend::Commutative => AlgebraShape::diagonal(self.upto(caps.max_dim)).expect("positive dim"),
            Backend::Generic if commutative => AlgebraShape::diagonal(self.upto(caps.max_dim)).expect("positive dim"),
            Backend::Generic => {
                let mut left = self.upto(caps.max_dim);
                let mut blocks = Vec::new();
                while left > 0 {
                    let b = self.upto(left.min(caps.max_block));
                    blocks.push(b);
                    left -= b;
                }
                AlgebraShape::new(blocks).expect("positive blocks")
            }
        }
    }

    fn space(&mut self, two_sided: bool, min_rank: usize) -> ModuleSpace {
        let shape = self.shape(two_sided);
        let rank = self.upto(self.config.caps.max_rank).max(min_rank);
        if shape.is_commutative() {
            ModuleSpace::new(shape, rank, crate::module::Action::TwoSided).expect("commutative")
        } else {
            ModuleSpace::right(shape, rank).expect("positive rank")
        }
    }

    fn vector(&mut self, space: &ModuleSpace, radius: f64) -> ModuleVector {
        let coords = (0..space.rank())
            .map(|_| random::element(self.rng, space.algebra(), radius))
            .collect();
        ModuleVector::from_coords(space, coords).expect("coordinates match")
    }

    fn nonzero_vector(&mut self, space: &ModuleSpace, radius: f64) -> ModuleVector {
        loop {
            let v = self.vector(space, radius);
            if v.norm() > 1e-3 {
                return v;
            }
        }
    }

    /// `z·(1 + δg)` with `z` in the open first quadrant.
    fn aligned_coeff(&mut self, shape: &AlgebraShape) -> Element {
        let z = Complex64::from_polar(
            self.rng.random_range(0.2..1.5),
            self.rng.random_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05),
        );
        let delta = if self.coin(0.5) { 0.0 } else { 0.2 * self.rng.random::<f64>() };
        let g = random::element(self.rng, shape, 1.0);
        (&Element::identity(shape) + &g.scale_real(delta)).scale(z)
    }

    fn noise(&mut self, x: ModuleVector) -> ModuleVector {
        let level = if self.coin(0.5) { 0.0 } else { 0.3 * self.rng.random::<f64>() };
        let space = x.space().clone();
        let v = self.vector(&space, 1.0);
        clip(x + v.scale_real(level))
    }

    fn unit_e(&mut self, space: &ModuleSpace) -> ModuleVector {
        let seed = self.rng.random();
        make_ortho_family(space, 1, true, seed).expect("rank ≥ 1").members()[0].clone()
    }

    fn perturb(&mut self, xs: Vec<ModuleVector>, eps: f64) -> Vec<ModuleVector> {
        xs.into_iter()
            .map(|x| {
                let space = x.space().clone();
                let d = self.nonzero_vector(&space, 1.0);
                let step = eps * x.norm() / d.norm();
                clip(x + d.scale_real(step))
            })
            .collect()
    }

    fn scales(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.rng.random_range(0.2..1.5)).collect()
    }

    fn pair(&mut self, equality: Option<f64>) -> Result<Instance> {
        let space = self.space(false, 1);
        let x = clip(self.nonzero_vector(&space, ENTRY_CAP));
        let y = if equality.is_some() || self.coin(0.5) {
            let u = random::unitary(self.rng, space.algebra());
            let a = u.scale(random::disk(self.rng, 1.0));
            clip(x.right_mul(&a))
        } else {
            self.vector(&space, ENTRY_CAP)
        };
        let y = match equality {
            Some(eps) => self.perturb(vec![y], eps).remove(0),
            None => y,
        };
        Ok(Instance::Pair { x, y })
    }

    fn bessel(&mut self, equality: Option<f64>) -> Result<Instance> {
        let two_sided = self.coin(0.5);
        let space = self.space(two_sided, 1);
        let m = if equality.is_some() {
            space.rank().min(self.config.caps.max_m)
        } else {
            self.upto(space.rank().min(self.config.caps.max_m))
        };
        let strict = equality.is_some() || self.coin(0.5);
        let family = make_ortho_family(&space, m, strict, self.rng.random())?;
        let x = match equality {
            Some(eps) => {
                let x = family.members().iter().fold(ModuleVector::zeros(&space), |acc, e| {
                    let c = random::element(self.rng, space.algebra(), 1.0);
                    acc + e.right_mul(&c)
                });
                self.perturb(vec![clip(x)], eps).remove(0)
            }
            None => self.vector(&space, ENTRY_CAP),
        };
        Ok(Instance::Family { family, xs: vec![x] })
    }

    fn single(&mut self, positive: bool, equality: Option<f64>) -> Result<Instance> {
        let space = self.space(false, 1);
        let n = self.upto(self.config.caps.max_n);
        if let Some(eps) = equality {
            let e = self.unit_e(&space);
            let z = Complex64::from_polar(1.0, self.rng.random_range(0.1..std::f64::consts::FRAC_PI_2 - 0.1));
            let v = e.scale(z);
            let xs = self.scales(n).into_iter().map(|t| v.scale_real(t)).collect();
            let xs = self.perturb(xs, eps);
            return Ok(Instance::Single { e, xs });
        }
        let e = if self.coin(0.5) {
            self.unit_e(&space)
        } else {
            let v = self.nonzero_vector(&space, 1.0);
            v.scale_real(self.rng.random_range(0.6..1.0) / v.norm())
        };
        let xs = self.draw_xs(std::slice::from_ref(&e), n, positive);
        Ok(Instance::Single { e, xs })
    }

    /// `n` vectors near `Σ_k e_k c_k` for aligned coefficients `c_k`. With
    /// `positive`, every `Re⟨e_k,x_j⟩` and `Im⟨e_k,x_j⟩` is kept positive
    /// semidefinite so that nonnegative constants exist.
    fn draw_xs(&mut self, refs: &[ModuleVector], n: usize, positive: bool) -> Vec<ModuleVector> {
        let space = refs[0].space().clone();
        (0..n)
            .map(|_| {
                for _ in 0..20 {
                    let x = if self.coin(0.2) {
                        self.nonzero_vector(&space, ENTRY_CAP)
                    } else {
                        let x = refs.iter().fold(ModuleVector::zeros(&space), |acc, e| {
                            let c = self.aligned_coeff(space.algebra());
                            acc + e.right_mul(&c)
                        });
                        self.noise(x)
                    };
                    if x.norm() > 0.0 && (!positive || admissible(refs, &x)) {
                        return x;
                    }
                }
                refs.iter().fold(ModuleVector::zeros(&space), |acc, e| {
                    let z = Complex64::from_polar(
                        self.rng.random_range(0.2..1.0),
                        self.rng.random_range(0.0..std::f64::consts::FRAC_PI_2),
                    );
                    acc + e.scale(z)
                })
            })
            .collect()
    }

    fn family(&mut self, modulus: bool, equality: Option<f64>) -> Result<Instance> {
        let space = self.space(modulus, 1);
        let positive = modulus;
        let m = self.upto(space.rank().min(self.config.caps.max_m));
        let n = self.upto(self.config.caps.max_n);
        if let Some(eps) = equality {
            let family = make_ortho_family(&space, m, true, self.rng.random())?;
            let mut r: Vec<f64> = (0..m).map(|_| self.rng.random_range(0.1..1.0)).collect();
            let mut rho: Vec<f64> = (0..m).map(|_| self.rng.random_range(0.1..1.0)).collect();
            let s = r.iter().chain(&rho).map(|v| v * v).sum::<f64>().sqrt();
            r.iter_mut().chain(rho.iter_mut()).for_each(|v| *v /= s);
            let b = FamilyBounds::new(r, rho)?;
            let xs = build_equality_instance(&family, &b, &self.scales(n))?;
            let xs = self.perturb(xs, eps);
            return Ok(Instance::Family { family, xs });
        }
        let family = make_ortho_family(&space, m, self.coin(0.5), self.rng.random())?;
        let xs = self.draw_xs(family.members(), n, positive);
        Ok(Instance::Family { family, xs })
    }

    fn additive(&mut self, equality: Option<f64>) -> Result<Instance> {
        let space = self.space(false, 1);
        let m = self.upto(space.rank().min(self.config.caps.max_m));
        let n = self.upto(self.config.caps.max_n);
        if let Some(eps) = equality {
            let family = make_ortho_family(&space, m, true, self.rng.random())?;
            let xs = build_additive_equality_instance(&family, &self.scales(n))?;
            let xs = self.perturb(xs, eps);
            return Ok(Instance::Family { family, xs });
        }
        let family = make_ortho_family(&space, m, self.coin(0.5), self.rng.random())?;
        let xs = self.draw_xs(family.members(), n, false);
        Ok(Instance::Family { family, xs })
    }

    fn path(&mut self, equality: Option<f64>) -> Result<Instance> {
        let space = self.space(false, 1);
        let e = self.unit_e(&space);
        let generator = match equality {
            Some(eps) => {
                let z = Complex64::from_polar(1.0, self.rng.random_range(0.0..std::f64::consts::FRAC_PI_2));
                PathGenerator::ExpCircle {
                    base: e.scale(z),
                    omega: eps,
                }
            }
            None if self.coin(0.5) => {
                let c = self.aligned_coeff(space.algebra());
                let base = self.noise(e.right_mul(&c));
                PathGenerator::ExpCircle {
                    base,
                    omega: self.rng.random_range(-1.0..1.0),
                }
            }
            None => {
                let c = self.aligned_coeff(space.algebra());
                let offset = clip(self.noise(e.right_mul(&c)).scale_real(0.5));
                // ‖slope‖ < ‖offset‖ keeps f away from zero on [0, 1]
                let v = self.nonzero_vector(&space, 1.0);
                let slope = v.scale_real(0.9 * self.rng.random::<f64>() * offset.norm() / v.norm());
                PathGenerator::Linear { offset, slope }
            }
        };
        let b = self.rng.random_range(0.25..1.0);
        Ok(Instance::Path {
            e,
            path: PathSpec::Generated {
                a: 0.0,
                b,
                n: PATH_NODES,
                generator,
            },
        })
    }
}

fn admissible(refs: &[ModuleVector], x: &ModuleVector) -> bool {
    refs.iter().all(|e| {
        let (re, im) = e.inner(x).re_im_parts();
        re.lambda_min() >= 0.0 && im.lambda_min() >= 0.0
    })
}

/// Rescales `x` so that no entry exceeds [`ENTRY_CAP`] in magnitude.
fn clip(x: ModuleVector) -> ModuleVector {
    let m = x.max_abs();
    if m > ENTRY_CAP {
        x.scale_real(ENTRY_CAP / m)
    } else {
        x
    }
}

/// Starting point for sharpness search: a strict reference (`⟨e,e⟩ = 1` or
/// a strict family) and vectors aligned with it up to a little noise.
pub(crate) fn sharpness_start(config: &FuzzConfig, theorem: TheoremId) -> Result<Instance> {
    let mut rng = trial_rng(config.seed, theorem, (1 << 48) - 1);
    let g = &mut Gen {
        rng: &mut rng,
        config,
    };
    let space = g.space(theorem == TheoremId::FamilyModulus, 1);
    let n = g.upto(config.caps.max_n);
    let aligned = |g: &mut Gen, refs: &[ModuleVector]| -> Vec<ModuleVector> {
        (0..n)
            .map(|_| {
                let x = refs.iter().fold(ModuleVector::zeros(&space), |acc, e| {
                    let c = g.aligned_coeff(space.algebra());
                    acc + e.right_mul(&c)
                });
                let d = g.vector(&space, 1.0);
                x + d.scale_real(0.05)
            })
            .collect()
    };
    match theorem {
        TheoremId::MultScalar | TheoremId::MultHermitian => {
            let e = g.unit_e(&space);
            let xs = aligned(g, std::slice::from_ref(&e));
            Ok(Instance::Single { e, xs })
        }
        _ => {
            let m = g.upto(space.rank().min(config.caps.max_m));
            let family = make_ortho_family(&space, m, true, g.rng.random())?;
            let xs = aligned(g, family.members());
            Ok(Instance::Family { family, xs })
        }
    }
}
