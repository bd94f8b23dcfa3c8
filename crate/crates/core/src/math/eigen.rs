use serde::{Deserialize, Serialize};

use super::{inner, SmallMatrix, C64};
use crate::error::{Error, Result};
use crate::tolerances;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ f(λ_k) v_k v_k†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> SmallMatrix {
        let mut out = SmallMatrix::zeros(self.dim()).expect("spectrum dimension is 2 or 3");
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let proj = SmallMatrix::outer(v, v).expect("eigenvector length matches dimension");
            out = out.add(&proj.scale(f(*lambda)));
        }
        out
    }

    pub fn reconstruct(&self) -> SmallMatrix {
        self.map(|lambda| C64::new(lambda, 0.0))
    }

    /// Largest `|⟨v_i|v_j⟩ − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, u) in self.eigenvectors.iter().enumerate() {
            for (j, v) in self.eigenvectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(u, v) - target).norm());
            }
        }
        worst
    }
}

pub fn hermitian_eigen(m: &SmallMatrix) -> Result<Spectrum> {
    hermitian_eigen_with_tol(m, tolerances::HERMITIAN)
}

/// Cyclic complex Jacobi diagonalisation.
///
/// Each rotation first removes the phase of the pivot `m_pq` with a diagonal
/// unitary and then applies a real Givens rotation to the resulting real
/// symmetric 2×2 block.
pub fn hermitian_eigen_with_tol(m: &SmallMatrix, hermitian_tol: f64) -> Result<Spectrum> {
    let defect = m.hermiticity_defect();
    if !(defect <= hermitian_tol) {
        return Err(Error::NonHermitian {
            max_asymmetry: defect,
        });
    }
    let n = m.dim();

    // Symmetrise so that rounding in the input cannot leak into the result.
    let mut a = SmallMatrix::zeros(n)?;
    for i in 0..n {
        a.set(i, i, C64::new(m.get(i, i).re, 0.0));
        for j in (i + 1)..n {
            let z = 0.5 * (m.get(i, j) + m.get(j, i).conj());
            a.set(i, j, z);
            a.set(j, i, z.conj());
        }
    }
    let mut v = SmallMatrix::identity(n)?;

    let scale: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a.get(i, j).norm_sqr())
        .sum::<f64>()
        .sqrt();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-3 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let theta = 0.5 * (2.0 * r).atan2(a.get(q, q).re - a.get(p, p).re);
                let (s, c) = theta.sin_cos();

                let mut g = SmallMatrix::identity(n)?;
                g.set(p, p, C64::new(c, 0.0));
                g.set(p, q, C64::new(s, 0.0));
                g.set(q, p, -phase.conj() * s);
                g.set(q, q, phase.conj() * c);

                a = g.adjoint() * a * g;
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
                v = v * g;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let eigenvalues = order.iter().map(|&k| a.get(k, k).re).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v.get(i, k)).collect())
        .collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// `exp(−i·angle·m)` for Hermitian `m`.
pub fn unitary_exp(m: &SmallMatrix, angle: f64) -> Result<SmallMatrix> {
    if !angle.is_finite() {
        return Err(Error::range("exponent angle must be finite"));
    }
    let spectrum = hermitian_eigen(m)?;
    Ok(spectrum.map(|lambda| C64::from_polar(1.0, -angle * lambda)))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(rng: &mut impl Rng, dim: usize) -> SmallMatrix {
        let mut rows = vec![vec![c(0.0, 0.0); dim]; dim];
        for i in 0..dim {
            rows[i][i] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..dim {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                rows[i][j] = z;
                rows[j][i] = z.conj();
            }
        }
        SmallMatrix::from_rows(&rows).unwrap()
    }

    fn zeno_m(rabi: f64) -> SmallMatrix {
        let (s, co) = rabi.sin_cos();
        SmallMatrix::from_rows(&[
            [c(0.0, 0.0), c(0.0, -s), c(0.0, 0.0)],
            [c(0.0, s), c(0.0, 0.0), c(co, 0.0)],
            [c(0.0, 0.0), c(co, 0.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    /// Real roots of `λ³ + b λ² + c λ + d` with three real roots (trigonometric form).
    fn cubic_real_roots(b: f64, cc: f64, d: f64) -> [f64; 3] {
        let p = cc - b * b / 3.0;
        let q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
        let shift = -b / 3.0;
        if p.abs() < 1e-300 {
            let t = (-q).cbrt();
            return [t + shift; 3];
        }
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q / (p * r)).clamp(-1.0, 1.0)).acos() / 3.0;
        let mut roots = [0.0; 3];
        for (k, root) in roots.iter_mut().enumerate() {
            *root = r * (arg - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift;
        }
        roots.sort_by(f64::total_cmp);
        roots
    }

    /// Characteristic polynomial coefficients of a 3×3 Hermitian matrix.
    fn char_poly(m: &SmallMatrix) -> (f64, f64, f64) {
        let g = |i, j| m.get(i, j);
        let trace = (g(0, 0) + g(1, 1) + g(2, 2)).re;
        let minors = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2)
            - g(0, 2) * g(2, 0)
            + g(1, 1) * g(2, 2)
            - g(1, 2) * g(2, 1))
        .re;
        let det = (g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0)))
        .re;
        (-trace, minors, -det)
    }

    #[test]
    fn zeno_matrix_has_spectrum_minus_one_zero_one() {
        for k in 0..=20 {
            let rabi = FRAC_PI_2 * k as f64 / 20.0;
            let eig = hermitian_eigen(&zeno_m(rabi)).unwrap();
            for (got, want) in eig.eigenvalues.iter().zip([-1.0, 0.0, 1.0]) {
                assert!((got - want).abs() < 1e-12, "rabi {rabi}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let eig = hermitian_eigen(&SmallMatrix::identity(3).unwrap()).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert!(eig.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn detuned_matrix_matches_cubic_roots() {
        let (rabi, eps) = (0.7_f64, 0.3_f64);
        let nu = rabi.hypot(eps);
        let sinc = nu.sin() / nu;
        let e_pos = C64::from_polar(1.0, eps);
        let e_neg = C64::from_polar(1.0, -eps);
        let m01 = c(0.0, rabi) * e_neg * sinc;
        let m12 = e_pos * c(nu.cos(), -eps * sinc);
        let m = SmallMatrix::from_rows(&[
            [c(0.0, 0.0), m01, c(0.0, 0.0)],
            [m01.conj(), c(0.0, 0.0), m12],
            [c(0.0, 0.0), m12.conj(), c(0.0, 0.0)],
        ])
        .unwrap();
        let (b, cc, d) = char_poly(&m);
        let roots = cubic_real_roots(b, cc, d);
        let eig = hermitian_eigen(&m).unwrap();
        for (got, want) in eig.eigenvalues.iter().zip(roots) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn non_hermitian_input_reports_asymmetry() {
        let m = SmallMatrix::from_real_rows(&[[0.0, 1.0], [0.5, 0.0]]).unwrap();
        match hermitian_eigen(&m) {
            Err(Error::NonHermitian { max_asymmetry }) => {
                assert!((max_asymmetry - 0.5).abs() < 1e-15)
            }
            other => panic!("expected NonHermitian, got {other:?}"),
        }
        assert!(matches!(
            unitary_exp(&m, 1.0),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn reconstruction_and_orthonormality_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let dim = if trial % 2 == 0 { 2 } else { 3 };
            let m = random_hermitian(&mut rng, dim);
            let eig = hermitian_eigen(&m).unwrap();
            assert!(eig.reconstruct().max_abs_diff(&m) <= tolerances::RECONSTRUCTION);
            assert!(eig.orthonormality_defect() <= tolerances::ORTHONORMAL);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn zero_angle_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(&mut rng, 3);
        let u = unitary_exp(&m, 0.0).unwrap();
        assert!(u.max_abs_diff(&SmallMatrix::identity(3).unwrap()) < 1e-14);
    }

    #[test]
    fn rejects_non_finite_angle() {
        let m = SmallMatrix::identity(2).unwrap();
        assert!(unitary_exp(&m, f64::INFINITY).is_err());
    }

    #[test]
    fn zeno_exponential_gives_closed_form_overlap() {
        let (omega, tau) = (5.0_f64, 0.05_f64);
        for rabi in [0.0, 0.3, 0.7, 1.2, FRAC_PI_2] {
            let u = unitary_exp(&zeno_m(rabi), omega * tau).unwrap();
            let u2 = &u * &u;
            // |a⟩ is the last basis vector in the (c, b, a) ordering.
            let got = u2.get(2, 2);
            let want = (2.0 * omega * tau).cos() * rabi.cos().powi(2) + rabi.sin().powi(2);
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
    }

    fn taylor_exp(m: &SmallMatrix, angle: f64, terms: usize) -> SmallMatrix {
        let dim = m.dim();
        let gen = m.scale(c(0.0, -angle));
        let mut term = SmallMatrix::identity(dim).unwrap();
        let mut sum = term;
        for k in 1..terms {
            term = (&term * &gen).scale(c(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        sum
    }

    #[test]
    fn exponential_matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_hermitian(&mut rng, 3);
            let u = unitary_exp(&m, 0.37).unwrap();
            let t = taylor_exp(&m, 0.37, 30);
            assert!(u.max_abs_diff(&t) < 1e-13);
        }
    }

    #[test]
    fn exponential_is_unitary_and_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let dim = rng.gen_range(2..=3);
            let m = random_hermitian(&mut rng, dim);
            let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let ua = unitary_exp(&m, a).unwrap();
            let ub = unitary_exp(&m, b).unwrap();
            let uab = unitary_exp(&m, a + b).unwrap();
            assert!((&ua * &ub).max_abs_diff(&uab) <= 1e-10);
            let id = SmallMatrix::identity(dim).unwrap();
            assert!((&ua.adjoint() * &ua).max_abs_diff(&id) <= tolerances::UNITARITY);
        }
    }
}
