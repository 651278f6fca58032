//! Cyclic Jacobi eigensolver for small dense complex hermitian matrices.

use num_complex::Complex64;

/// Convergence threshold on the off-diagonal Frobenius mass, relative to the
/// Frobenius norm of the input.
pub const OFFDIAG_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of the hermitian `n × n` row-major matrix `a`.
///
/// Returns eigenvalues in ascending order and the unitary matrix whose
/// column `k` is the eigenvector for eigenvalue `k`. Only the hermitian part
/// of `a` is used.
pub fn eigh(n: usize, a: &[Complex64]) -> (Vec<f64>, Vec<Complex64>) {
    assert_eq!(a.len(), n * n);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let mut m = vec![zero; n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in i + 1..n {
            let v = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            m[i * n + j] = v;
            m[j * n + i] = v.conj();
        }
    }
    let mut v = vec![zero; n * n];
    for i in 0..n {
        v[i * n + i] = one;
    }

    let scale = m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[i * n + j].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= OFFDIAG_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(n, &mut m, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let mut vectors = vec![zero; n * n];
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + col] = v[r * n + src];
        }
    }
    (values, vectors)
}

/// Annihilates `m[p][q]` with the unitary `U = D·R`, where `D` removes the
/// phase of `m[p][q]` and `R` is the real Jacobi rotation of the resulting
/// real symmetric 2 × 2 problem. Updates `m ← U*·m·U` and `v ← v·U`.
fn rotate(n: usize, m: &mut [Complex64], v: &mut [Complex64], p: usize, q: usize) {
    let apq = m[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let phase = (apq / mag).conj();

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = phase * -s;
    let u_qq = phase * c;

    for r in 0..n {
        let xp = m[r * n + p];
        let xq = m[r * n + q];
        m[r * n + p] = xp * u_pp + xq * u_qp;
        m[r * n + q] = xp * u_pq + xq * u_qq;
    }
    for col in 0..n {
        let xp = m[p * n + col];
        let xq = m[q * n + col];
        m[p * n + col] = u_pp.conj() * xp + u_qp.conj() * xq;
        m[q * n + col] = u_pq.conj() * xp + u_qq.conj() * xq;
    }
    for r in 0..n {
        let xp = v[r * n + p];
        let xq = v[r * n + q];
        v[r * n + p] = xp * u_pp + xq * u_qp;
        v[r * n + q] = xp * u_pq + xq * u_qq;
    }
    m[p * n + q] = Complex64::new(0.0, 0.0);
    m[q * n + p] = Complex64::new(0.0, 0.0);
    m[p * n + p].im = 0.0;
    m[q * n + q].im = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(n: usize, vals: &[f64], vecs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[i * n + j] += vecs[i * n + k] * vals[k] * vecs[j * n + k].conj();
                }
            }
        }
        out
    }

    #[test]
    fn two_by_two_real() {
        let (vals, _) = eigh(2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        // [[1, 2−i, 0.5i], [2+i, −1, 3], [−0.5i, 3, 4]]
        let a = vec![
            c(1.0, 0.0), c(2.0, -1.0), c(0.0, 0.5),
            c(2.0, 1.0), c(-1.0, 0.0), c(3.0, 0.0),
            c(0.0, -0.5), c(3.0, 0.0), c(4.0, 0.0),
        ];
        let (vals, vecs) = eigh(3, &a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let back = reconstruct(3, &vals, &vecs);
        for (x, y) in back.iter().zip(&a) {
            assert!((x - y).norm() < 1e-13, "{x} vs {y}");
        }
        // trace is preserved
        let tr: f64 = vals.iter().sum();
        assert!((tr - 4.0).abs() < 1e-13);
    }

    #[test]
    fn zero_and_diagonal_inputs() {
        let (vals, vecs) = eigh(2, &[c(0.0, 0.0); 4]);
        assert_eq!(vals, vec![0.0, 0.0]);
        assert_eq!(vecs, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let (vals, _) = eigh(2, &[c(9.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(vals, vec![4.0, 9.0]);
    }

    #[test]
    fn tiny_coupling_does_not_overflow() {
        let a = [c(1.0, 0.0), c(1e-300, 1e-300), c(1e-300, -1e-300), c(2.0, 0.0)];
        let (vals, vecs) = eigh(2, &a);
        assert_eq!(vals, vec![1.0, 2.0]);
        assert!(vecs.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }
}
