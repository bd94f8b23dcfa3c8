//! Brute-force state-vector simulation of the collision sequence.
//!
//! Basis ordering: the system qubit is the slowest index (`0 = |↓⟩`,
//! `1 = |↑⟩`), followed by ancilla 0, ancilla 1, … Each ancilla uses the
//! basis of its model (see [`crate::models`]) and starts in `|a⟩`.
//!
//! Collisions are applied as dense two-body unitaries `exp(−iωτ σ̂ᶻ ⊗ X)`
//! obtained from a general Hermitian eigensolver, so nothing here reuses the
//! closed-form branch states.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::branch::SystemAmplitudes;
use crate::error::{Error, Result};
use crate::math::{shannon_entropy_bits, C64};
use crate::models::ModelParams;
use crate::tolerances;

pub const MAX_QUBIT_ANCILLAS: usize = 12;
pub const MAX_QUTRIT_ANCILLAS: usize = 8;

/// Pure state of system plus `n_ancillas` ancillas.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    n_ancillas: usize,
    ancilla_dim: usize,
    amplitudes: Vec<C64>,
}

impl JointState {
    /// `(α|↓⟩ + β|↑⟩) ⊗ |g⟩^{⊗n}` with `|g⟩` the basis state `ground`.
    pub fn product(
        amps: &SystemAmplitudes,
        ancilla_dim: usize,
        ground: usize,
        n_ancillas: usize,
    ) -> Result<Self> {
        amps.validate()?;
        let cap = match ancilla_dim {
            2 => MAX_QUBIT_ANCILLAS,
            3 => MAX_QUTRIT_ANCILLAS,
            _ => return Err(Error::range(format!("ancilla dimension {ancilla_dim}"))),
        };
        if n_ancillas > cap {
            return Err(Error::TooLarge {
                n: n_ancillas,
                dim: ancilla_dim,
                cap,
            });
        }
        if ground >= ancilla_dim {
            return Err(Error::range("ground index outside ancilla basis"));
        }
        let env = ancilla_dim.pow(n_ancillas as u32);
        let mut amplitudes = vec![C64::new(0.0, 0.0); 2 * env];
        let ground_index: usize = (0..n_ancillas)
            .map(|j| ground * ancilla_dim.pow((n_ancillas - 1 - j) as u32))
            .sum();
        amplitudes[ground_index] = amps.alpha;
        amplitudes[env + ground_index] = amps.beta;
        Ok(Self {
            n_ancillas,
            ancilla_dim,
            amplitudes,
        })
    }

    pub fn n_ancillas(&self) -> usize {
        self.n_ancillas
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitude of `|system⟩ ⊗ |ancillas[0]⟩ ⊗ …`.
    pub fn amplitude(&self, system: usize, ancillas: &[usize]) -> C64 {
        assert_eq!(ancillas.len(), self.n_ancillas, "one digit per ancilla");
        let idx = ancillas
            .iter()
            .fold(system, |acc, &a| acc * self.ancilla_dim + a);
        self.amplitudes[idx]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Dimension of each tensor position: the system first, then the ancillas.
    fn radices(&self) -> Vec<usize> {
        std::iter::once(2)
            .chain(std::iter::repeat_n(self.ancilla_dim, self.n_ancillas))
            .collect()
    }

    fn stride(&self, position: usize) -> usize {
        self.ancilla_dim.pow((self.n_ancillas - position) as u32)
    }

    /// Applies a `2d × 2d` unitary (index `s·d + a`) to the system and ancilla `j`.
    pub fn apply_collision(&mut self, unitary: &DMatrix<C64>, j: usize) -> Result<()> {
        let d = self.ancilla_dim;
        if j >= self.n_ancillas {
            return Err(Error::BadSubset(format!("ancilla {j} does not exist")));
        }
        if unitary.shape() != (2 * d, 2 * d) {
            return Err(Error::range("collision unitary has wrong shape"));
        }
        let sys_stride = self.stride(0);
        let anc_stride = self.stride(j + 1);
        let mut local = vec![C64::new(0.0, 0.0); 2 * d];
        for base in 0..sys_stride {
            if !(base / anc_stride).is_multiple_of(d) {
                continue;
            }
            for s in 0..2 {
                for a in 0..d {
                    local[s * d + a] = self.amplitudes[base + s * sys_stride + a * anc_stride];
                }
            }
            for s in 0..2 {
                for a in 0..d {
                    let row = s * d + a;
                    let value = (0..2 * d).map(|col| unitary[(row, col)] * local[col]).sum();
                    self.amplitudes[base + s * sys_stride + a * anc_stride] = value;
                }
            }
        }
        Ok(())
    }
}

/// `exp(−iωτ σ̂ᶻ ⊗ X)` with `σ̂ᶻ = diag(−1, +1)` in the `(↓, ↑)` ordering.
pub fn collision_unitary(p: &ModelParams) -> Result<DMatrix<C64>> {
    let x = p.ancilla_coupling()?;
    let d = x.dim();
    let mut h = DMatrix::<C64>::zeros(2 * d, 2 * d);
    for (s, sign) in [(0usize, -1.0), (1usize, 1.0)] {
        for i in 0..d {
            for j in 0..d {
                h[(s * d + i, s * d + j)] = x.get(i, j) * sign;
            }
        }
    }
    let eig = SymmetricEigen::new(h);
    let theta = p.collision_angle();
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|lambda| C64::from_polar(1.0, -theta * lambda)),
    );
    let v = &eig.eigenvectors;
    let u = v * phases * v.adjoint();
    let defect = (&u * u.adjoint() - DMatrix::<C64>::identity(2 * d, 2 * d)).camax();
    if !(defect <= tolerances::UNITARITY) {
        return Err(Error::range(format!(
            "collision unitary has unitarity defect {defect:e}"
        )));
    }
    Ok(u)
}

/// State after the first `ell` of `n` ancillas have collided with the system.
pub fn evolve(
    amps: &SystemAmplitudes,
    p: &ModelParams,
    ell: usize,
    n: usize,
) -> Result<JointState> {
    if ell > n {
        return Err(Error::range(format!(
            "{ell} collisions with only {n} ancillas"
        )));
    }
    let mut state = JointState::product(amps, p.kind.ancilla_dim(), p.kind.ground_index(), n)?;
    let u = collision_unitary(p)?;
    for j in 0..ell {
        state.apply_collision(&u, j)?;
    }
    Ok(state)
}

/// Which tensor factors to keep in a partial trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Subsystem {
    pub system: bool,
    /// Ancilla indices, 0-based.
    pub ancillas: Vec<usize>,
}

impl Subsystem {
    pub fn system_only() -> Self {
        Self {
            system: true,
            ancillas: Vec::new(),
        }
    }

    /// The first `m` ancillas.
    pub fn fragment(m: usize) -> Self {
        Self {
            system: false,
            ancillas: (0..m).collect(),
        }
    }

    /// The system together with the first `m` ancillas.
    pub fn system_and_fragment(m: usize) -> Self {
        Self {
            system: true,
            ancillas: (0..m).collect(),
        }
    }

    pub fn everything(n: usize) -> Self {
        Self::system_and_fragment(n)
    }

    pub fn complement(&self, n: usize) -> Self {
        Self {
            system: !self.system,
            ancillas: (0..n).filter(|j| !self.ancillas.contains(j)).collect(),
        }
    }

    /// Tensor positions, 0 being the system.
    fn positions(&self, n: usize) -> Result<Vec<usize>> {
        let mut seen = vec![false; n];
        for &j in &self.ancillas {
            if j >= n {
                return Err(Error::BadSubset(format!("ancilla {j} out of {n}")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::BadSubset(format!("ancilla {j} listed twice")));
            }
        }
        let mut positions: Vec<usize> = self.ancillas.iter().map(|j| j + 1).collect();
        if self.system {
            positions.push(0);
        }
        positions.sort_unstable();
        Ok(positions)
    }
}

/// A reduced density matrix `ρ = A·A†`, kept together with its factor `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub dim: usize,
    pub matrix: DMatrix<C64>,
    factor: DMatrix<C64>,
}

/// Rows whose residual falls below this fraction of `‖A‖` are treated as
/// linearly dependent; the discarded weight is below `10⁻²⁴`.
const RANK_TOLERANCE: f64 = 1e-12;
const JACOBI_SWEEPS: usize = 100;

impl ReducedState {
    /// Eigenvalues, ascending, with round-off below zero clamped away.
    ///
    /// The rows of `A` are orthonormalised (Gram–Schmidt with a second pass)
    /// into `Q`, so that `A = C·Q` and the nonzero spectrum of `ρ = C·C†`
    /// equals that of the small Gram matrix `C†·C`. Zero eigenvalues are
    /// padded back to length `dim`.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let a = &self.factor;
        let scale = a.norm();
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for i in 0..a.nrows() {
            let mut v: Vec<C64> = a.row(i).iter().copied().collect();
            for _ in 0..2 {
                for q in &basis {
                    let overlap: C64 = q.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (vk, qk) in v.iter_mut().zip(q) {
                        *vk -= overlap * qk;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > RANK_TOLERANCE * scale {
                basis.push(v.into_iter().map(|z| z / norm).collect());
            }
        }
        let r = basis.len();
        let c = DMatrix::<C64>::from_fn(a.nrows(), r, |i, k| {
            basis[k]
                .iter()
                .zip(a.row(i).iter())
                .map(|(q, x)| q.conj() * x)
                .sum()
        });
        let mut values = jacobi_eigenvalues(c.adjoint() * &c)?;
        values.resize(self.dim, 0.0);
        values.sort_by(f64::total_cmp);
        if let Some(&lowest) = values.first() {
            if lowest < -tolerances::POSITIVITY {
                return Err(Error::range(format!(
                    "reduced state has eigenvalue {lowest:e}"
                )));
            }
        }
        for v in values.iter_mut() {
            *v = v.max(0.0);
        }
        Ok(values)
    }

    pub fn entropy_bits(&self) -> Result<f64> {
        shannon_entropy_bits(&self.eigenvalues()?)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
fn jacobi_eigenvalues(mut h: DMatrix<C64>) -> Result<Vec<f64>> {
    let n = h.nrows();
    let scale = h.norm();
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| h[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off == 0.0 || off <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = h[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let theta = 0.5 * (2.0 * r).atan2(h[(q, q)].re - h[(p, p)].re);
                let (s, c) = theta.sin_cos();
                // h ← G†·h·G with G = [[c, s], [−φ̄ s, φ̄ c]] on rows/columns (p, q).
                let (gqp, gqq) = (-phase.conj() * s, phase.conj() * c);
                for k in 0..n {
                    let (hkp, hkq) = (h[(k, p)], h[(k, q)]);
                    h[(k, p)] = hkp * c + hkq * gqp;
                    h[(k, q)] = hkp * s + hkq * gqq;
                }
                for k in 0..n {
                    let (hpk, hqk) = (h[(p, k)], h[(q, k)]);
                    h[(p, k)] = hpk * c + hqk * gqp.conj();
                    h[(q, k)] = hpk * s + hqk * gqq.conj();
                }
                h[(p, q)] = C64::new(0.0, 0.0);
                h[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    let values: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::range(
            "eigenvalue iteration produced a non-finite value",
        ));
    }
    Ok(values)
}

/// Partial trace over everything outside `keep`.
pub fn reduce(state: &JointState, keep: &Subsystem) -> Result<ReducedState> {
    let n = state.n_ancillas;
    let kept = keep.positions(n)?;
    let radices = state.radices();
    let traced: Vec<usize> = (0..=n).filter(|p| !kept.contains(p)).collect();
    let dim_of = |ps: &[usize]| ps.iter().map(|&p| radices[p]).product::<usize>();
    let (dk, dr) = (dim_of(&kept), dim_of(&traced));

    // Row-major strides of each position inside the full, kept and traced indices.
    let full_stride: Vec<usize> = (0..=n).map(|p| state.stride(p)).collect();
    let local_strides = |ps: &[usize]| {
        let mut strides = vec![0usize; n + 1];
        let mut acc = 1;
        for &p in ps.iter().rev() {
            strides[p] = acc;
            acc *= radices[p];
        }
        strides
    };
    let keep_stride = local_strides(&kept);
    let rest_stride = local_strides(&traced);

    let mut a = DMatrix::<C64>::zeros(dk, dr);
    for (idx, amp) in state.amplitudes.iter().enumerate() {
        let (mut k, mut r) = (0, 0);
        for p in 0..=n {
            let digit = (idx / full_stride[p]) % radices[p];
            k += digit * keep_stride[p];
            r += digit * rest_stride[p];
        }
        a[(k, r)] = *amp;
    }
    let matrix = &a * a.adjoint();
    let reduced = ReducedState {
        dim: dk,
        matrix,
        factor: a,
    };
    let trace = reduced.trace();
    if (trace - 1.0).abs() > tolerances::TRACE {
        return Err(Error::range(format!("reduced state has trace {trace}")));
    }
    Ok(reduced)
}

/// Von Neumann entropy of `keep`, diagonalising whichever side of the cut is smaller.
pub fn subsystem_entropy(state: &JointState, keep: &Subsystem) -> Result<f64> {
    let n = state.n_ancillas;
    let complement = keep.complement(n);
    let dim = |s: &Subsystem| -> Result<usize> {
        let radices = state.radices();
        Ok(s.positions(n)?.iter().map(|&p| radices[p]).product())
    };
    let side = if dim(keep)? <= dim(&complement)? {
        keep
    } else {
        &complement
    };
    reduce(state, side)?.entropy_bits()
}

/// Entropies behind `I(S, F_m) = S(S) + S(F_m) − S(SF_m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactEntropies {
    pub system: f64,
    pub fragment: f64,
    pub joint: f64,
}

impl ExactEntropies {
    pub fn mutual_information(&self) -> f64 {
        self.system + self.fragment - self.joint
    }
}

pub fn exact_entropies(state: &JointState, m: usize) -> Result<ExactEntropies> {
    if m > state.n_ancillas {
        return Err(Error::BadSubset(format!(
            "fragment of {m} exceeds {} ancillas",
            state.n_ancillas
        )));
    }
    Ok(ExactEntropies {
        system: subsystem_entropy(state, &Subsystem::system_only())?,
        fragment: subsystem_entropy(state, &Subsystem::fragment(m))?,
        joint: subsystem_entropy(state, &Subsystem::system_and_fragment(m))?,
    })
}

/// `I(S, F_m)` in bits from numerically diagonalised reduced states.
pub fn exact_mutual_information(state: &JointState, m: usize) -> Result<f64> {
    Ok(exact_entropies(state, m)?.mutual_information())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::branch_pair;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn skewed() -> SystemAmplitudes {
        SystemAmplitudes::new(c(0.6, 0.0), C64::from_polar(0.8, 0.4)).unwrap()
    }

    #[test]
    fn no_collisions_leaves_product_state() {
        let p = ModelParams::zeno(5.0, 0.05, 0.6).unwrap();
        let state = evolve(&skewed(), &p, 0, 3).unwrap();
        assert_eq!(state.amplitude(0, &[2, 2, 2]), c(0.6, 0.0));
        assert_eq!(state.amplitude(1, &[2, 2, 2]), C64::from_polar(0.8, 0.4));
        let nonzero = state.amplitudes().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn two_base_collisions_match_branch_expansion() {
        let (omega, tau) = (3.0, 0.1);
        let amps = skewed();
        let state = evolve(&amps, &ModelParams::base(omega, tau).unwrap(), 2, 2).unwrap();
        let (s, co) = (omega * tau).sin_cos();
        let plus = [c(co, 0.0), c(0.0, s)];
        let minus = [c(co, 0.0), c(0.0, -s)];
        for a0 in 0..2 {
            for a1 in 0..2 {
                let down = amps.alpha * plus[a0] * plus[a1];
                let up = amps.beta * minus[a0] * minus[a1];
                assert!((state.amplitude(0, &[a0, a1]) - down).norm() < 1e-14);
                assert!((state.amplitude(1, &[a0, a1]) - up).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn norm_is_preserved_collision_by_collision() {
        let p = ModelParams::anti_zeno(5.0, 0.05, 1.1, 0.8).unwrap();
        let u = collision_unitary(&p).unwrap();
        let mut state = JointState::product(&skewed(), 3, 2, 6).unwrap();
        let mut previous = state.norm();
        for j in 0..6 {
            state.apply_collision(&u, j).unwrap();
            let now = state.norm();
            assert!((now - previous).abs() < 1e-12);
            previous = now;
        }
        assert!((previous - 1.0).abs() < 1e-10);
    }

    #[test]
    fn size_caps_are_enforced() {
        let amps = SystemAmplitudes::uniform();
        assert!(matches!(
            JointState::product(&amps, 2, 0, 13),
            Err(Error::TooLarge { cap: 12, .. })
        ));
        assert!(matches!(
            evolve(&amps, &ModelParams::zeno(1.0, 0.1, 0.2).unwrap(), 1, 9),
            Err(Error::TooLarge { cap: 8, .. })
        ));
        assert!(evolve(&amps, &ModelParams::base(1.0, 0.1).unwrap(), 5, 4).is_err());
    }

    #[test]
    fn keeping_everything_gives_the_pure_projector() {
        let p = ModelParams::base(2.0, 0.2).unwrap();
        let state = evolve(&skewed(), &p, 3, 3).unwrap();
        let rho = reduce(&state, &Subsystem::everything(3)).unwrap();
        let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
        let projector = &psi * psi.adjoint();
        assert!((rho.matrix - projector).camax() < 1e-14);
    }

    #[test]
    fn system_state_matches_closed_form_coherence() {
        let (omega, tau, ell) = (4.0, 0.05, 6);
        let amps = skewed();
        let state = evolve(&amps, &ModelParams::base(omega, tau).unwrap(), ell, 7).unwrap();
        let rho = reduce(&state, &Subsystem::system_only()).unwrap();
        let kappa = (2.0 * omega * tau).cos();
        let off = amps.alpha * amps.beta.conj() * kappa.powi(ell as i32);
        assert!((rho.matrix[(0, 0)].re - amps.alpha.norm_sqr()).abs() < 1e-12);
        assert!((rho.matrix[(1, 1)].re - amps.beta.norm_sqr()).abs() < 1e-12);
        assert!((rho.matrix[(0, 1)] - off).norm() < 1e-12);
        assert!((rho.matrix[(1, 0)] - off.conj()).norm() < 1e-12);
    }

    #[test]
    fn fragment_state_is_two_term_mixture() {
        let p = ModelParams::zeno(5.0, 0.05, 0.9).unwrap();
        let amps = skewed();
        let bp = branch_pair(&p).unwrap();
        let m = 2;
        let state = evolve(&amps, &p, 4, 5).unwrap();
        let rho = reduce(&state, &Subsystem::fragment(m)).unwrap();
        let kron = |v: &[C64]| {
            let mut out = Vec::new();
            for x in v {
                for y in v {
                    out.push(x * y);
                }
            }
            nalgebra::DVector::from_vec(out)
        };
        let (pp, mm) = (kron(&bp.plus), kron(&bp.minus));
        let want = (&pp * pp.adjoint()) * C64::from(amps.alpha.norm_sqr())
            + (&mm * mm.adjoint()) * C64::from(amps.beta.norm_sqr());
        assert!((rho.matrix - want).camax() < 1e-12);
    }

    #[test]
    fn fragment_state_stops_changing_once_collided() {
        let p = ModelParams::anti_zeno(5.0, 0.05, 0.7, 0.3).unwrap();
        let amps = skewed();
        let m = 3;
        let early = reduce(
            &evolve(&amps, &p, m + 1, 7).unwrap(),
            &Subsystem::fragment(m),
        )
        .unwrap();
        let late = reduce(&evolve(&amps, &p, 7, 7).unwrap(), &Subsystem::fragment(m)).unwrap();
        assert!((early.matrix - late.matrix).camax() < 1e-12);
    }

    #[test]
    fn empty_fragment_has_no_information() {
        let p = ModelParams::base(5.0, 0.05).unwrap();
        let state = evolve(&skewed(), &p, 4, 4).unwrap();
        assert!(exact_mutual_information(&state, 0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn complementary_cuts_share_entropy() {
        let p = ModelParams::zeno(6.0, 0.05, 0.4).unwrap();
        let state = evolve(&skewed(), &p, 3, 4).unwrap();
        for m in 0..=4 {
            let keep = Subsystem::system_and_fragment(m);
            let a = reduce(&state, &keep).unwrap().entropy_bits().unwrap();
            let b = reduce(&state, &keep.complement(4))
                .unwrap()
                .entropy_bits()
                .unwrap();
            assert!((a - b).abs() < 1e-10, "m = {m}: {a} vs {b}");
        }
    }

    #[test]
    fn pointer_states_never_decohere() {
        let amps = SystemAmplitudes::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        for p in [
            ModelParams::base(5.0, 0.05).unwrap(),
            ModelParams::zeno(5.0, 0.05, 0.5).unwrap(),
            ModelParams::anti_zeno(5.0, 0.05, 0.5, 1.0).unwrap(),
        ] {
            let n = if p.kind.ancilla_dim() == 2 { 8 } else { 5 };
            for ell in 0..=n {
                let state = evolve(&amps, &p, ell, n).unwrap();
                let s = subsystem_entropy(&state, &Subsystem::system_only()).unwrap();
                assert!(s.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_subsets_are_rejected() {
        let state = evolve(&skewed(), &ModelParams::base(1.0, 0.1).unwrap(), 1, 3).unwrap();
        let dup = Subsystem {
            system: false,
            ancillas: vec![1, 1],
        };
        assert!(matches!(reduce(&state, &dup), Err(Error::BadSubset(_))));
        let out = Subsystem {
            system: true,
            ancillas: vec![3],
        };
        assert!(matches!(reduce(&state, &out), Err(Error::BadSubset(_))));
        assert!(exact_entropies(&state, 4).is_err());
    }

    #[test]
    fn tracing_out_everything_leaves_unit_scalar() {
        let state = evolve(&skewed(), &ModelParams::base(1.0, 0.1).unwrap(), 2, 3).unwrap();
        let rho = reduce(&state, &Subsystem::default()).unwrap();
        assert_eq!(rho.dim, 1);
        assert!((rho.matrix[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_recovers_a_known_spectrum() {
        // U·diag(3, 1, 0.5, 0)·U† for a fixed unitary built from a Hermitian generator.
        let gen = DMatrix::<C64>::from_fn(4, 4, |i, j| {
            let x = C64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.2);
            if i == j {
                C64::new(x.re, 0.0)
            } else if i < j {
                x
            } else {
                C64::new((j + 2 * i) as f64 * 0.1, (j as f64 - i as f64) * 0.2).conj()
            }
        });
        let eig = SymmetricEigen::new(gen);
        let u = &eig.eigenvectors;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [3.0, 1.0, 0.5, 0.0].map(|x| C64::new(x, 0.0)).to_vec(),
        ));
        let mut got = jacobi_eigenvalues(u * d * u.adjoint()).unwrap();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip([0.0, 0.5, 1.0, 3.0]) {
            assert!((g - w).abs() < 1e-13, "{got:?}");
        }
    }

    #[test]
    fn degenerate_product_states_have_finite_entropies() {
        // Exact zeros everywhere outside a 2×2 block.
        let amps = SystemAmplitudes::new(C64::new(0.6, 0.0), C64::from_polar(0.8, 0.4)).unwrap();
        let p = ModelParams::zeno(0.0, 0.05, 0.0).unwrap();
        let state = evolve(&amps, &p, 1, 8).unwrap();
        for m in 0..=8 {
            let e = exact_entropies(&state, m).unwrap();
            assert!(e.system.abs() < 1e-12 && e.fragment.abs() < 1e-12 && e.joint.abs() < 1e-12);
        }
    }
}
