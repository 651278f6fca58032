//! Acceptance run: one PASS or FAIL line per criterion, at the stated
//! tolerances. Exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use revtri_core::fuzz::{evaluate, evaluate_scalar, fuzz_campaign, gen_instance, Backend, Caps, FuzzConfig, Instance};
use revtri_core::module::{bessel_defect, cs_equality_reconstruct, BesselSide};
use revtri_core::quadrature::{verify_integral_corollary, PathGenerator, SampledPath};
use revtri_core::random;
use revtri_core::reverse::{
    build_additive_equality_instance, build_equality_instance, extract_additive_bounds, extract_family_bounds,
    extract_scalar_bounds, verify_additive, verify_family_modulus, verify_family_norm, verify_multiplicative_scalar,
    AdditiveBounds, FamilyBounds, ScalarBounds,
};
use revtri_core::{
    check_diamond, loewner_leq, make_ortho_family, AlgebraShape, Certificate, Element, ModuleSpace, ModuleVector,
    TheoremId,
};

const TOL: f64 = 1e-9;
const SEED: u64 = 0x5eed;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn random_diagonal_space(r: &mut ChaCha20Rng, max_dim: usize, min_rank: usize, max_rank: usize) -> ModuleSpace {
    let dim = r.random_range(1..=max_dim);
    let rank = r.random_range(min_rank..=max_rank);
    ModuleSpace::commutative(dim, rank).unwrap()
}

fn random_shape(r: &mut ChaCha20Rng, max_dim: usize) -> AlgebraShape {
    let mut blocks = Vec::new();
    let mut left = r.random_range(1..=max_dim);
    while left > 0 {
        let b = r.random_range(1..=left);
        blocks.push(b);
        left -= b;
    }
    AlgebraShape::new(blocks).unwrap()
}

fn random_vector(r: &mut ChaCha20Rng, space: &ModuleSpace) -> ModuleVector {
    let coords = (0..space.rank()).map(|_| random::element(r, space.algebra(), 2.0)).collect();
    ModuleVector::from_coords(space, coords).unwrap()
}

fn soundness_fuzz() -> Outcome {
    let mut config = FuzzConfig::new(SEED, 10_000, TheoremId::ALL.to_vec());
    config.caps = Caps::new(4, 4, 5, 3);
    config.tol = TOL;
    let start = Instant::now();
    let report = match fuzz_campaign(&config) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("campaign error: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let below = report
        .per_theorem
        .iter()
        .filter(|s| s.worst_relative_slack < -TOL)
        .count();
    outcome(
        report.is_clean() && below == 0 && secs <= 60.0,
        format!(
            "{} trials over {} theorems, {} failures, worst relative slack {:.3e}, {secs:.1} s",
            report.trials,
            report.per_theorem.len(),
            report.failures.len(),
            report.worst_relative_slack
        ),
    )
}

fn normalized_family_bounds(r: &mut ChaCha20Rng, m: usize) -> FamilyBounds {
    let mut rv: Vec<f64> = (0..m).map(|_| r.random::<f64>()).collect();
    let mut rho: Vec<f64> = (0..m).map(|_| r.random::<f64>()).collect();
    let s = rv.iter().chain(&rho).map(|v| v * v).sum::<f64>().sqrt();
    rv.iter_mut().chain(rho.iter_mut()).for_each(|v| *v /= s);
    FamilyBounds { r: rv, rho }
}

fn equality_ok(c: &Certificate, xs: &[ModuleVector]) -> bool {
    let total: f64 = xs.iter().map(ModuleVector::norm).sum();
    c.preconditions_ok
        && c.equality
        && c.slack.abs() <= TOL * c.scale
        && c.witness_residual.is_some_and(|w| w <= 1e-8 * total)
}

fn equality_round_trip() -> Outcome {
    let mut r = rng(2);
    let (mut family_ok, mut additive_ok, mut converse_ok) = (0u64, 0u64, 0u64);
    let n = 1000;
    for i in 0..n {
        let space = random_diagonal_space(&mut r, 4, 1, 4);
        let m = r.random_range(1..=space.rank().min(3));
        let family = make_ortho_family(&space, m, true, SEED ^ i).unwrap();
        let b = normalized_family_bounds(&mut r, m);
        let norms: Vec<f64> = (0..r.random_range(1..=5)).map(|_| r.random_range(0.1..2.0)).collect();
        let xs = build_equality_instance(&family, &b, &norms).unwrap();
        let norm = verify_family_norm(&family, &xs, &b, TOL).unwrap();
        let modulus = verify_family_modulus(&family, &xs, &b, TOL).unwrap();
        family_ok += (equality_ok(&norm, &xs) && equality_ok(&modulus, &xs)) as u64;

        let scales: Vec<f64> = norms.iter().map(|v| v * 0.5).collect();
        let xs = build_additive_equality_instance(&family, &scales).unwrap();
        let m_min = extract_additive_bounds(&family, &xs).unwrap();
        let cert = verify_additive(&family, &xs, &m_min, TOL).unwrap();
        additive_ok += equality_ok(&cert, &xs) as u64;

        // Converse: a phase on x_0 breaks the witness form, and the verifier
        // must then report strict inequality.
        let mut turned = xs.clone();
        turned[0] = turned[0].scale(Complex64::from_polar(1.0, 0.3));
        let m_turned = extract_additive_bounds(&family, &turned).unwrap();
        let c = verify_additive(&family, &turned, &m_turned, TOL).unwrap();
        converse_ok += (c.preconditions_ok && !c.equality && c.relative_slack > TOL) as u64;
    }
    outcome(
        family_ok == n && additive_ok == n && converse_ok == n,
        format!(
            "family norm+modulus {family_ok}/{n}, additive {additive_ok}/{n}, perturbed additive rejected {converse_ok}/{n}"
        ),
    )
}

fn cauchy_schwarz_reconstruction() -> Outcome {
    let mut r = rng(3);
    let n = 1000;
    let mut worst = 0.0f64;
    let mut errors = 0;
    for i in 0..n {
        let shape = random_shape(&mut r, 4);
        let space = ModuleSpace::right(shape.clone(), r.random_range(1..=4)).unwrap();
        let e = make_ortho_family(&space, 1, true, SEED ^ i).unwrap().members()[0].clone();
        let x = e.scale_real(r.random_range(0.2..2.0));
        let a = random::unitary(&mut r, &shape).scale(random::disk(&mut r, 2.0));
        let y = x.right_mul(&a);
        match cs_equality_reconstruct(&x, &y, TOL) {
            Ok(z) => worst = worst.max((&y - &z).norm() / y.norm().max(1.0)),
            Err(_) => errors += 1,
        }
    }
    outcome(
        errors == 0 && worst <= 1e-10,
        format!("{n} pairs, {errors} rejected, worst residual {worst:.3e}·max(1,‖y‖)"),
    )
}

fn bessel_defect_check() -> Outcome {
    let mut r = rng(4);
    let n = 1000;
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let space = random_diagonal_space(&mut r, 4, 1, 4);
        let m = r.random_range(1..=space.rank().min(3));
        let family = make_ortho_family(&space, m, r.random::<bool>(), SEED ^ i).unwrap();
        let x = random_vector(&mut r, &space);
        for side in [BesselSide::Right, BesselSide::Left] {
            let c = bessel_defect(&x, &family, side, TOL).unwrap();
            worst = worst.min(c.slack);
        }
    }
    outcome(worst >= -1e-9, format!("{n} instances, both sides, min λ_min(defect) = {worst:.3e}"))
}

fn identities() -> Outcome {
    let mut r = rng(5);
    let n = 1000;
    let (mut diamond, mut diamond_rel, mut cstar, mut cstar_rel, mut sqrt_rel) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let shape = random_shape(&mut r, 8);
        let a = random::element(&mut r, &shape, 2.0);
        let norm = a.op_norm();
        let scale = (norm * norm).max(1.0);
        let d = check_diamond(&a, TOL).witness_residual.unwrap();
        diamond = diamond.max(d);
        diamond_rel = diamond_rel.max(d / scale);
        let c = ((&a.adjoint() * &a).op_norm() - norm * norm).abs();
        cstar = cstar.max(c);
        cstar_rel = cstar_rel.max(c / scale);
        let p = random::positive(&mut r, &shape, 2.0);
        let s = p.psd_sqrt(1e-10).unwrap();
        sqrt_rel = sqrt_rel.max((&(&s * &s) - &p).op_norm() / p.op_norm());
    }
    outcome(
        diamond <= 1e-12 && cstar <= 1e-12 && sqrt_rel <= 1e-10,
        format!(
            "{n} elements up to d = 8: diamond {diamond:.2e} (relative {diamond_rel:.2e}), \
             C* {cstar:.2e} (relative {cstar_rel:.2e}), psd_sqrt {sqrt_rel:.2e}·‖a‖"
        ),
    )
}

fn backend_equivalence() -> Outcome {
    let shared = [
        TheoremId::CauchySchwarz,
        TheoremId::Bessel,
        TheoremId::MultScalar,
        TheoremId::MultHermitian,
        TheoremId::FamilyNorm,
        TheoremId::FamilyModulus,
        TheoremId::Additive,
    ];
    let mut worst = 0.0f64;
    let mut mismatches = Vec::new();
    let mut count = 0;
    for theorem in shared {
        let mut c = FuzzConfig::new(SEED, 1, vec![theorem]);
        c.backend = Backend::Scalar;
        c.caps = Caps::new(1, 4, 5, 3);
        for trial in 0..1000 {
            let inst = gen_instance(&c, theorem, trial).unwrap();
            let (a, b) = match (evaluate(theorem, &inst, TOL), evaluate_scalar(theorem, &inst, TOL)) {
                (Ok(a), Ok(b)) => (a, b),
                (a, b) => {
                    mismatches.push(format!("{theorem}#{trial}: {:?} / {:?}", a.err(), b.err()));
                    continue;
                }
            };
            count += 1;
            match a.deviation(&b) {
                Ok(d) => worst = worst.max(d),
                Err(e) => mismatches.push(format!("{theorem}#{trial}: {e}")),
            }
        }
    }
    outcome(
        mismatches.is_empty() && worst <= 1e-12,
        format!(
            "{count} certificate pairs over {} theorems, worst field deviation {worst:.2e}{}",
            shared.len(),
            mismatches.first().map(|m| format!(", first mismatch {m}")).unwrap_or_default()
        ),
    )
}

fn integral_desk_check() -> Outcome {
    let space = ModuleSpace::hilbert(1).unwrap();
    let e = ModuleVector::from_complex(&space, &[Complex64::new(1.0, 0.0)]).unwrap();
    let generator = PathGenerator::ExpCircle {
        base: e.clone(),
        omega: 1.0,
    };
    let path = SampledPath::from_generator(&generator, 0.0, std::f64::consts::FRAC_PI_3, 1024).unwrap();
    let shape = AlgebraShape::scalar();
    let a1 = Element::real_scalar(&shape, 0.5);
    let a2 = Element::zeros(&shape);
    let cert = verify_integral_corollary(&path, &e, &a1, &a2, TOL).unwrap();
    let reading = cert.scalar_reading.unwrap();
    let lhs_err = (reading.lhs - std::f64::consts::FRAC_PI_6).abs();
    let rhs_err = (reading.rhs - 1.0).abs();
    outcome(
        lhs_err <= 1e-6 && rhs_err <= 1e-3 && cert.preconditions_ok && cert.holds,
        format!(
            "lhs {:.9} (π/6 off by {lhs_err:.1e}), rhs {:.9} (off by {rhs_err:.1e}), verdict {:?}",
            reading.lhs,
            reading.rhs,
            cert.verdict()
        ),
    )
}

fn maximality() -> Outcome {
    let n = 1000;
    let (mut checked, mut survived, mut skipped) = (0usize, Vec::new(), 0usize);
    let tried = |ok: bool, what: String, survived: &mut Vec<String>, checked: &mut usize| {
        *checked += 1;
        if ok {
            survived.push(what);
        }
    };
    for theorem in [TheoremId::MultScalar, TheoremId::FamilyNorm, TheoremId::Additive] {
        let c = FuzzConfig::new(SEED, 1, vec![theorem]);
        for trial in 0..n {
            match gen_instance(&c, theorem, trial).unwrap() {
                Instance::Single { e, xs } => {
                    let b = extract_scalar_bounds(&e, &xs).unwrap();
                    for (name, bumped) in [
                        ("k1", ScalarBounds { k1: b.k1 * 1.01, ..b }),
                        ("k2", ScalarBounds { k2: b.k2 * 1.01, ..b }),
                    ] {
                        if bumped == b {
                            skipped += 1;
                            continue;
                        }
                        let cert = verify_multiplicative_scalar(&e, &xs, bumped, TOL).unwrap();
                        tried(cert.preconditions_ok, format!("{theorem}#{trial} {name}"), &mut survived, &mut checked);
                    }
                }
                Instance::Family { family, xs } if theorem == TheoremId::FamilyNorm => {
                    let b = extract_family_bounds(&family, &xs).unwrap();
                    for k in 0..b.len() {
                        for which in ["r", "rho"] {
                            let mut bumped = b.clone();
                            let v = if which == "r" { &mut bumped.r[k] } else { &mut bumped.rho[k] };
                            if *v == 0.0 {
                                skipped += 1;
                                continue;
                            }
                            *v *= 1.01;
                            let cert = verify_family_norm(&family, &xs, &bumped, TOL).unwrap();
                            tried(cert.preconditions_ok, format!("{theorem}#{trial} {which}[{k}]"), &mut survived, &mut checked);
                        }
                    }
                }
                Instance::Family { family, xs } => {
                    // M is an upper bound, so minimality is tested by shrinking.
                    let b = extract_additive_bounds(&family, &xs).unwrap();
                    for j in 0..b.m.len() {
                        for k in 0..b.m[j].len() {
                            if b.m[j][k] == 0.0 {
                                skipped += 1;
                                continue;
                            }
                            let mut m = b.m.clone();
                            m[j][k] /= 1.01;
                            let cert = verify_additive(&family, &xs, &AdditiveBounds { m }, TOL).unwrap();
                            tried(cert.preconditions_ok, format!("{theorem}#{trial} M[{j},{k}]"), &mut survived, &mut checked);
                        }
                    }
                }
                other => panic!("unexpected instance {other:?}"),
            }
        }
    }
    outcome(
        survived.is_empty(),
        format!(
            "{checked} single-constant perturbations over {n} instances each of mult-scalar, family-norm, additive; \
             {} kept all preconditions{}; {skipped} zero constants skipped",
            survived.len(),
            survived.first().map(|s| format!(" (first: {s})")).unwrap_or_default()
        ),
    )
}

fn non_subadditivity_witness() -> Outcome {
    let shape = AlgebraShape::full(2).unwrap();
    let space = ModuleSpace::right(shape.clone(), 1).unwrap();
    let unit = |i: usize, j: usize| {
        Element::from_fn(&shape, |r, c| Complex64::new(if (r, c) == (i, j) { 1.0 } else { 0.0 }, 0.0))
    };
    let x = ModuleVector::slot(&space, 0, unit(0, 0)).unwrap();
    let y = ModuleVector::slot(&space, 0, unit(0, 1)).unwrap();
    let lhs = (&x + &y).modulus().unwrap();
    let rhs = &x.modulus().unwrap() + &y.modulus().unwrap();
    let leq = loewner_leq(&lhs, &rhs, TOL).unwrap();
    outcome(
        !leq,
        format!(
            "x = E11, y = E12 in M2: λ_min(|x|+|y| − |x+y|) = {:.6}",
            (&rhs - &lhs).lambda_min()
        ),
    )
}

fn cli_golden() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let cases: [(&str, &[&str], &str, i32); 6] = [
        ("mult_scalar_verify", &["verify"], "mult_scalar.json", 0),
        ("mult_scalar_verify_scalar_backend", &["verify", "--backend", "scalar"], "mult_scalar.json", 0),
        ("additive_extract", &["extract", "--theorem", "additive"], "additive.json", 0),
        ("additive_verify", &["verify"], "additive.json", 0),
        ("integral_exp_circle", &["integral"], "integral_exp_circle.json", 0),
        ("family_modulus_construct", &["construct-equality"], "family_commutative.json", 0),
    ];
    let mut bad = Vec::new();
    let mut files = std::collections::BTreeSet::new();
    for (name, args, input, exit) in cases {
        files.insert(input);
        let runs: Vec<_> = (0..2)
            .map(|_| {
                Command::new(env!("CARGO_BIN_EXE_revtri"))
                    .args(args)
                    .arg("--in")
                    .arg(dir.join(input))
                    .arg("--deterministic")
                    .output()
                    .unwrap()
            })
            .collect();
        let expected = std::fs::read(dir.join("expected").join(format!("{name}.json"))).unwrap_or_default();
        if runs[0].status.code() != Some(exit) || runs[0].stdout != expected || runs[1].stdout != runs[0].stdout {
            bad.push(name);
        }
    }
    let missing = Command::new(env!("CARGO_BIN_EXE_revtri"))
        .args(["verify", "--theorem", "mult-scalar", "--in"])
        .arg(dir.join("does-not-exist.json"))
        .output()
        .unwrap();
    if missing.status.code() != Some(3) {
        bad.push("missing input exit code");
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} instance files, {} byte-stable cases{}",
            files.len(),
            cases.len(),
            if bad.is_empty() { String::new() } else { format!(", mismatched: {}", bad.join(", ")) }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("soundness fuzz", soundness_fuzz),
        ("equality round-trip", equality_round_trip),
        ("Cauchy-Schwarz reconstruction", cauchy_schwarz_reconstruction),
        ("Bessel defect", bessel_defect_check),
        ("diamond, C* and psd_sqrt residuals", identities),
        ("backend equivalence", backend_equivalence),
        ("integral desk check", integral_desk_check),
        ("maximality of extraction", maximality),
        ("modulus non-subadditivity witness", non_subadditivity_witness),
        ("CLI golden files", cli_golden),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += !o.pass as usize;
        println!("{tag} {:>2} {name}: {} [{:.1} s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
