//! Two-state games in the real Bloch picture.
//!
//! A 2x2 density matrix is `(I + r·σ)/2` for a vector `r` in the unit ball and
//! conjugation by a unitary rotates `r` by an element of SO(3). A Hermitian
//! observable `k0·I + k·σ` has expectation `k0 + k·r`. This turns payoffs into
//! bilinear forms in rotation matrices, which makes single-slot optimization
//! against a correlated mixture a Wahba (orthogonal Procrustes) problem.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

use crate::matrix::{SquareMatrix, Unitary};

pub type Rotation = Matrix3<f64>;
pub type Bloch = Vector3<f64>;

fn paulis() -> [Matrix2<Complex64>; 3] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(z, o, o, z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(o, z, z, -o),
    ]
}

fn as_matrix2(m: &SquareMatrix) -> Matrix2<Complex64> {
    assert_eq!(m.dim(), 2, "Bloch picture needs 2x2 matrices");
    Matrix2::new(m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1))
}

pub fn bloch_vector(rho: &SquareMatrix) -> Bloch {
    let r01 = rho.get(0, 1);
    Vector3::new(2.0 * r01.re, -2.0 * r01.im, rho.get(0, 0).re - rho.get(1, 1).re)
}

/// `(k0, k)` with `K = k0·I + k·σ`.
pub fn observable(k: &SquareMatrix) -> (f64, Bloch) {
    let m = as_matrix2(k);
    let s = paulis();
    let comp = |p: &Matrix2<Complex64>| (m * p).trace().re / 2.0;
    (m.trace().re / 2.0, Vector3::new(comp(&s[0]), comp(&s[1]), comp(&s[2])))
}

/// `R_ij = ½ Tr(σ_i U σ_j U†)`.
pub fn rotation(u: &Unitary) -> Rotation {
    let m = as_matrix2(u.matrix());
    let md = m.adjoint();
    let s = paulis();
    let mut r = Matrix3::zeros();
    for j in 0..3 {
        let conj = m * s[j] * md;
        for i in 0..3 {
            r[(i, j)] = (s[i] * conj).trace().re / 2.0;
        }
    }
    r
}

/// An SU(2) element whose rotation is `r` (sign is irrelevant for actions).
pub fn unitary_from_rotation(r: &Rotation) -> Unitary {
    let (w, x, y, z) = quaternion(r);
    // U = w·I − i(x σx + y σy + z σz)
    let m = SquareMatrix::from_rows(&[
        vec![Complex64::new(w, -z), Complex64::new(-y, -x)],
        vec![Complex64::new(y, -x), Complex64::new(w, z)],
    ])
    .expect("finite entries");
    Unitary::new_unchecked(m)
}

fn quaternion(r: &Rotation) -> (f64, f64, f64, f64) {
    let tr = r.trace();
    let (w, x, y, z) = if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        (0.25 * s, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s)
    } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        ((r[(2, 1)] - r[(1, 2)]) / s, 0.25 * s, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s)
    } else if r[(1, 1)] > r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        ((r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, 0.25 * s, (r[(1, 2)] + r[(2, 1)]) / s)
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        ((r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, 0.25 * s)
    };
    let n = (w * w + x * x + y * y + z * z).sqrt();
    (w / n, x / n, y / n, z / n)
}

/// The rotation maximizing `⟨R, M⟩_F` over SO(3).
pub fn best_rotation(m: &Matrix3<f64>) -> Rotation {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let d = (u * vt).determinant().signum();
    let d = if d == 0.0 { 1.0 } else { d };
    u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * vt
}

pub fn frobenius(r: &Rotation, m: &Matrix3<f64>) -> f64 {
    r.component_mul(m).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{conjugate, random_unitary, DensityMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotation_acts_on_bloch_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let u = random_unitary(&mut rng, 2);
            let rho = DensityMatrix::random(&mut rng, 2);
            let out = conjugate(&u, &rho).unwrap();
            let r = rotation(&u);
            let lhs = bloch_vector(out.matrix());
            let rhs = r * bloch_vector(rho.matrix());
            assert!((lhs - rhs).norm() < 1e-12);
            assert!((r.transpose() * r - Matrix3::identity()).norm() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let u = random_unitary(&mut rng, 2);
            let back = unitary_from_rotation(&rotation(&u));
            assert!(back.same_action(&u, 1e-10));
        }
        // Half turns exercise the non-positive-trace branches.
        for u in crate::pennyflip::pauli_unitaries() {
            let back = unitary_from_rotation(&rotation(&u));
            assert!(back.same_action(&u, 1e-12));
        }
    }

    #[test]
    fn observable_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let k = DensityMatrix::random(&mut rng, 2).matrix().scale(Complex64::new(3.0, 0.0));
            let rho = DensityMatrix::random(&mut rng, 2);
            let (k0, kv) = observable(&k);
            let direct = k.mul(rho.matrix()).trace().re;
            assert!((direct - (k0 + kv.dot(&bloch_vector(rho.matrix())))).abs() < 1e-12);
        }
    }

    #[test]
    fn procrustes_beats_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let m = Matrix3::from_fn(|_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
            let best = best_rotation(&m);
            assert!((best.determinant() - 1.0).abs() < 1e-10);
            let top = frobenius(&best, &m);
            for _ in 0..200 {
                let r = rotation(&random_unitary(&mut rng, 2));
                assert!(frobenius(&r, &m) <= top + 1e-12);
            }
        }
    }
}
