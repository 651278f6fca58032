//! Seeded random elements, unitaries and contractions.
//!
//! Entries are drawn uniformly from a disk in the complex plane so that
//! spectra stay of order one.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{AlgebraShape, Element};

/// Uniform sample from the closed disk of the given radius.
pub fn disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(r, theta)
}

/// Element with every in-pattern entry uniform in the disk of `radius`.
pub fn element<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape, radius: f64) -> Element {
    Element::from_fn(shape, |_, _| disk(rng, radius))
}

/// Hermitian element `(g + g*)/2` for a random `g`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape, radius: f64) -> Element {
    element(rng, shape, radius).hermitian_part()
}

/// Positive element `g*g` for a random `g`.
pub fn positive<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape, radius: f64) -> Element {
    let g = element(rng, shape, radius);
    &g.adjoint() * &g
}

/// Block-diagonal unitary obtained by orthonormalizing the columns of a
/// random matrix in every block (modified Gram–Schmidt, two passes).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape) -> Element {
    let d = shape.dim();
    let mut data = vec![Complex64::new(0.0, 0.0); d * d];
    for r in shape.block_ranges() {
        let n = r.len();
        let cols = loop {
            let mut cols: Vec<Vec<Complex64>> =
                (0..n).map(|_| (0..n).map(|_| disk(rng, 1.0)).collect()).collect();
            if orthonormalize(&mut cols) {
                break cols;
            }
        };
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[(r.start + i) * d + r.start + j] = v;
            }
        }
    }
    Element::from_fn(shape, |i, j| data[i * d + j])
}

/// Random element with operator norm one.
pub fn contraction<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape) -> Element {
    loop {
        let g = element(rng, shape, 1.0);
        let n = g.op_norm();
        if n > 1e-3 {
            return g.scale_real(1.0 / n);
        }
    }
}

/// Orthonormalizes `cols` in place; false when they are numerically dependent.
fn orthonormalize(cols: &mut [Vec<Complex64>]) -> bool {
    for j in 0..cols.len() {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= q * proj;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return false;
        }
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn unitary_is_unitary_in_every_block() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let shape = AlgebraShape::new(vec![3, 1, 2]).unwrap();
        for _ in 0..20 {
            let u = unitary(&mut rng, &shape);
            let defect = (&(&u.adjoint() * &u) - &Element::identity(&shape)).max_abs();
            assert!(defect < 1e-14, "{defect}");
        }
    }

    #[test]
    fn contraction_has_unit_norm() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let shape = AlgebraShape::full(3).unwrap();
        for _ in 0..20 {
            assert!((contraction(&mut rng, &shape).op_norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn disk_samples_stay_inside() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        assert!((0..1000).all(|_| disk(&mut rng, 2.0).norm() <= 2.0));
    }
}
