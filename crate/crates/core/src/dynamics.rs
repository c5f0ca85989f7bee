//! Reduced dynamics of a system coupled to an environment.
//!
//! The joint space is ordered system-major: `|s⟩⊗|e⟩` has index `s·d_e + e`.
//! For two qubits the basis reads `|00⟩, |01⟩, |10⟩, |11⟩`.

use crate::error::{Error, Result};
use crate::kraus::{apply_channel_with_tol, factorable_kraus, KrausSet};
use crate::linalg::{c, eigh, expm_hermitian_generator, pauli, Complex64, ComplexMatrix, Subsystem};
use crate::state::DensityMatrix;
use crate::DEFAULT_TOL;

/// Relative size of everything beyond the leading singular value that still
/// counts as an exact Kronecker product.
pub const KRONECKER_GAP_THRESHOLD: f64 = 1e-8;

/// A joint system ⊗ environment state.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    state: DensityMatrix,
    d_i: usize,
    d_e: usize,
}

impl CompositeState {
    pub fn new(state: DensityMatrix, dims: (usize, usize)) -> Result<Self> {
        let (d_i, d_e) = dims;
        if d_i == 0 || d_e == 0 || d_i * d_e != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: d_i * d_e,
                found: state.dim(),
            });
        }
        Ok(Self { state, d_i, d_e })
    }

    /// `ρ_i ⊗ ρ_e`.
    pub fn product(system: &DensityMatrix, env: &DensityMatrix) -> Self {
        Self {
            state: system.kron(env),
            d_i: system.dim(),
            d_e: env.dim(),
        }
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_i, self.d_e)
    }

    pub fn environment_state(&self) -> DensityMatrix {
        let m = self
            .matrix()
            .partial_trace(self.dims(), Subsystem::Environment)
            .expect("dims checked at construction");
        DensityMatrix::new(m, 10.0 * DEFAULT_TOL).expect("partial trace of a state is a state")
    }
}

/// `tr_e ρ_ie`.
pub fn reduced_state(s: &CompositeState) -> DensityMatrix {
    let m = s
        .matrix()
        .partial_trace(s.dims(), Subsystem::System)
        .expect("dims checked at construction");
    DensityMatrix::new(m, 10.0 * DEFAULT_TOL).expect("partial trace of a state is a state")
}

fn check_generator(h: &ComplexMatrix, s: &CompositeState) -> Result<()> {
    let n = s.state.dim();
    if h.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.rows(),
        });
    }
    Ok(())
}

/// `U ρ U†` for an explicit joint unitary.
pub fn evolve_with_unitary(u: &ComplexMatrix, s: &CompositeState) -> Result<CompositeState> {
    let n = s.state.dim();
    if u.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.rows(),
        });
    }
    let out = u.sandwich(s.matrix())?;
    CompositeState::new(DensityMatrix::new(out, 10.0 * DEFAULT_TOL)?, s.dims())
}

/// `U(t) ρ_ie U(t)†` with `U(t) = e^{−iHt}`.
pub fn evolve_joint(h: &ComplexMatrix, s: &CompositeState, t: f64) -> Result<CompositeState> {
    check_generator(h, s)?;
    let u = expm_hermitian_generator(h, t, DEFAULT_TOL)?;
    evolve_with_unitary(&u, s)
}

/// `ρ_cor = ρ_ie − ρ_i ⊗ ρ_e`.
pub fn correlation_operator(s: &CompositeState) -> ComplexMatrix {
    let product = reduced_state(s).kron(&s.environment_state());
    s.matrix() - product.matrix()
}

/// `tr_e{U ρ_cor U†}` for an explicit joint unitary.
pub fn delta_rho_with_unitary(u: &ComplexMatrix, s: &CompositeState) -> Result<ComplexMatrix> {
    let cor = correlation_operator(s);
    u.sandwich(&cor)?.partial_trace(s.dims(), Subsystem::System)
}

/// The inhomogeneous term `δρ(t) = tr_e{U(t) ρ_cor U(t)†}`.
pub fn delta_rho(h: &ComplexMatrix, s: &CompositeState, t: f64) -> Result<ComplexMatrix> {
    check_generator(h, s)?;
    let u = expm_hermitian_generator(h, t, DEFAULT_TOL)?;
    delta_rho_with_unitary(&u, s)
}

/// Everything the reduced dynamics splits into at one time `t`.
#[derive(Debug, Clone)]
pub struct ReducedDynamics {
    pub t: f64,
    pub unitary: ComplexMatrix,
    /// `ρ_i(0)`
    pub rho_0: DensityMatrix,
    /// `ρ_i(t)` from the joint evolution.
    pub rho_t: DensityMatrix,
    /// `ρ_cor(0)`
    pub correlation: ComplexMatrix,
    /// Factorable-case Kraus set built from `U(t)` and `ρ_e(0)`.
    pub factorable: KrausSet,
    /// Output of `factorable` on `ρ_i(0)`.
    pub factorable_part: ComplexMatrix,
    pub delta_rho: ComplexMatrix,
    /// `‖ρ_i(t) − (factorable_part + δρ)‖_max`; zero up to rounding.
    pub decomposition_residual: f64,
}

pub fn reduced_dynamics(h: &ComplexMatrix, s: &CompositeState, t: f64) -> Result<ReducedDynamics> {
    check_generator(h, s)?;
    let u = expm_hermitian_generator(h, t, DEFAULT_TOL)?;
    let rho_0 = reduced_state(s);
    let rho_t = reduced_state(&evolve_with_unitary(&u, s)?);
    let factorable = factorable_kraus(&u, &s.environment_state())?;
    let factorable_part = apply_channel_with_tol(&factorable, &rho_0, 10.0 * DEFAULT_TOL)?.into_matrix();
    let correlation = correlation_operator(s);
    let delta_rho = u.sandwich(&correlation)?.partial_trace(s.dims(), Subsystem::System)?;
    let decomposition_residual = rho_t.matrix().max_diff(&(&factorable_part + &delta_rho))?;
    Ok(ReducedDynamics {
        t,
        unitary: u,
        rho_0,
        rho_t,
        correlation,
        factorable,
        factorable_part,
        delta_rho,
        decomposition_residual,
    })
}

/// `H = σ_x ⊗ ½(I − σ_z) + I ⊗ ½(I + σ_z)`: the environment qubit controls a
/// NOT-type rotation of the system.
pub fn cnot_hamiltonian() -> ComplexMatrix {
    let i2 = pauli::identity();
    let z = pauli::sigma_z();
    let down = (&i2 - &z).scale_real(0.5);
    let up = (&i2 + &z).scale_real(0.5);
    &pauli::sigma_x().kron(&down) + &i2.kron(&up)
}

/// Two qubits under [`cnot_hamiltonian`], starting from the classically
/// correlated state `diag((1−r0)/2, 0, 0, (1+r0)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnotScenario {
    r0: f64,
}

impl CnotScenario {
    /// `r0` must lie in `[0, 1]`. At the endpoints the initial state is a
    /// product state; that is allowed but logged.
    pub fn new(r0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r0) {
            return Err(Error::InvalidArgument(format!("r0 = {r0} outside [0, 1]")));
        }
        if r0 == 0.0 || r0 == 1.0 {
            log::warn!("r0 = {r0}: initial joint state is uncorrelated");
        }
        Ok(Self { r0 })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// `r_t = √(sin²t + r0² cos²t)`, the Bloch radius of the system at `t`.
    pub fn r_t(&self, t: f64) -> f64 {
        let (s, co) = t.sin_cos();
        (s * s + self.r0 * self.r0 * co * co).sqrt()
    }

    pub fn joint_initial_state(&self) -> CompositeState {
        let r0 = self.r0;
        let m = ComplexMatrix::from_real_diagonal(&[(1.0 - r0) / 2.0, 0.0, 0.0, (1.0 + r0) / 2.0]);
        let state = DensityMatrix::new(m, DEFAULT_TOL).expect("diagonal with nonnegative unit-sum entries");
        CompositeState::new(state, (2, 2)).expect("4 = 2·2")
    }

    /// `½(I − r0 σ_z)`, the reduced state of either qubit at `t = 0`.
    pub fn initial_reduced(&self) -> DensityMatrix {
        let m = ComplexMatrix::from_real_diagonal(&[(1.0 - self.r0) / 2.0, (1.0 + self.r0) / 2.0]);
        DensityMatrix::new(m, DEFAULT_TOL).expect("valid for r0 in [0, 1]")
    }

    /// Closed form of `e^{−iHt}`.
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        let (s, co) = t.sin_cos();
        let ph = c(co, -s);
        let z = c(0.0, 0.0);
        let mis = c(0.0, -s);
        let cr = c(co, 0.0);
        ComplexMatrix::from_rows(&[[ph, z, z, z], [z, cr, z, mis], [z, z, ph, z], [z, mis, z, cr]])
    }

    /// `ρ_i(t) = ½[[1 + sin²t − r0 cos²t, −i(1+r0) sin t cos t], [i(1+r0) sin t cos t, (1+r0) cos²t]]`.
    pub fn analytic_rho(&self, t: f64) -> DensityMatrix {
        let r0 = self.r0;
        let (s, co) = t.sin_cos();
        let off = 0.5 * (1.0 + r0) * s * co;
        let m = ComplexMatrix::from_rows(&[
            [c(0.5 * (1.0 + s * s - r0 * co * co), 0.0), c(0.0, -off)],
            [c(0.0, off), c(0.5 * (1.0 + r0) * co * co, 0.0)],
        ]);
        DensityMatrix::new(m, 10.0 * DEFAULT_TOL).expect("closed form is a state")
    }

    /// `ρ_cor(0) = ¼(1 − r0²) σ_z ⊗ σ_z`.
    pub fn analytic_correlation(&self) -> ComplexMatrix {
        let z = pauli::sigma_z();
        z.kron(&z).scale_real(0.25 * (1.0 - self.r0 * self.r0))
    }

    /// `δρ(t) = ¼(1 − r0²)[[2 sin²t, −i sin 2t], [i sin 2t, −2 sin²t]]`.
    pub fn analytic_delta_rho(&self, t: f64) -> ComplexMatrix {
        let k = 0.25 * (1.0 - self.r0 * self.r0);
        let s = t.sin();
        let s2 = (2.0 * t).sin();
        ComplexMatrix::from_rows(&[
            [c(2.0 * s * s * k, 0.0), c(0.0, -s2 * k)],
            [c(0.0, s2 * k), c(-2.0 * s * s * k, 0.0)],
        ])
    }

    /// Closed-form two-operator Kraus set taking [`Self::initial_reduced`] to
    /// [`Self::analytic_rho`]. With `A = sin²t − r0 cos²t` and
    /// `N = √(2 r_t (1 + r0))`:
    ///
    /// ```text
    /// M_0 = 1/N [[ −√((1+r0)(r_t+A)),   ι√((1−r_t)(r_t−A)) ],
    ///            [ −ι√((1+r0)(r_t−A)),   √((1−r_t)(r_t+A)) ]]
    /// M_1 = √(r_t+r0)/N [[ 0, √(r_t+A) ], [ 0, ι√(r_t−A) ]]
    /// ```
    ///
    /// where `ι = i·sgn(sin 2t)` is the azimuthal phase `e^{iφ(t)}` of `ρ_i(t)`
    /// (`ι = i` on `0 ≤ t ≤ π/2`).
    pub fn analytic_kraus(&self, t: f64) -> Result<KrausSet> {
        let r0 = self.r0;
        let rt = self.r_t(t);
        if rt <= DEFAULT_TOL {
            return Err(Error::InvalidArgument(format!("r_t = {rt} vanishes at t = {t}")));
        }
        let (s, co) = t.sin_cos();
        let a = s * s - r0 * co * co;
        let sq = |x: f64| -> Result<f64> {
            if x < -DEFAULT_TOL {
                Err(Error::NegativeRadicand(x))
            } else {
                Ok(x.max(0.0).sqrt())
            }
        };
        let iota = if (2.0 * t).sin() < 0.0 { c(0.0, -1.0) } else { c(0.0, 1.0) };
        let norm = 1.0 / (2.0 * rt * (1.0 + r0)).sqrt();
        let plus = sq(rt + a)?;
        let minus = sq(rt - a)?;
        let m0 = ComplexMatrix::from_rows(&[
            [c(-(1.0 + r0).sqrt() * plus, 0.0), iota * (sq(1.0 - rt)? * minus)],
            [-iota * ((1.0 + r0).sqrt() * minus), c(sq(1.0 - rt)? * plus, 0.0)],
        ])
        .scale_real(norm);
        let m1 = ComplexMatrix::from_rows(&[[c(0.0, 0.0), c(plus, 0.0)], [c(0.0, 0.0), iota * minus]])
            .scale_real(sq(rt + r0)? * norm);
        KrausSet::new(vec![m0, m1])
    }
}

pub fn cnot_analytic_rho(sc: &CnotScenario, t: f64) -> DensityMatrix {
    sc.analytic_rho(t)
}

pub fn cnot_analytic_kraus(sc: &CnotScenario, t: f64) -> Result<KrausSet> {
    sc.analytic_kraus(t)
}

/// A joint generator together with its initial state.
#[derive(Debug, Clone)]
pub enum Scenario {
    Cnot(CnotScenario),
    Custom {
        hamiltonian: ComplexMatrix,
        initial: CompositeState,
    },
}

impl Scenario {
    pub fn custom(hamiltonian: ComplexMatrix, initial: CompositeState) -> Result<Self> {
        check_generator(&hamiltonian, &initial)?;
        let herm = hamiltonian.hermiticity_residual()?;
        if herm > DEFAULT_TOL {
            return Err(Error::NotHermitian(herm));
        }
        Ok(Scenario::Custom { hamiltonian, initial })
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        match self {
            Scenario::Cnot(_) => cnot_hamiltonian(),
            Scenario::Custom { hamiltonian, .. } => hamiltonian.clone(),
        }
    }

    pub fn initial_state(&self) -> CompositeState {
        match self {
            Scenario::Cnot(sc) => sc.joint_initial_state(),
            Scenario::Custom { initial, .. } => initial.clone(),
        }
    }
}

/// Nearest Kronecker factorisation of a joint unitary.
///
/// `u` is rearranged into a `d_i² × d_e²` matrix `R` with
/// `R[(a,b),(e,f)] = u[(a,e),(b,f)]`, which has rank one exactly when
/// `u = A ⊗ B`. The leading singular pair of `R` gives the candidate factors;
/// they are accepted when the remainder `‖R − σ₁u₁v₁†‖_F` is below
/// [`KRONECKER_GAP_THRESHOLD`] relative to `‖R‖_F` and `‖u − A⊗B‖_max ≤ tol`.
///
/// Factors are normalised so that `‖A‖_F² = d_i`, with the first
/// largest entry of `A` real and positive (the factorisation is otherwise
/// unique only up to reciprocal scalars).
pub fn factor_local_unitary(
    u: &ComplexMatrix,
    dims: (usize, usize),
    tol: f64,
) -> Option<(ComplexMatrix, ComplexMatrix)> {
    let (di, de) = dims;
    if di == 0 || de == 0 || u.shape() != (di * de, di * de) {
        return None;
    }
    let mut r = ComplexMatrix::zeros(di * di, de * de);
    for a in 0..di {
        for b in 0..di {
            for e in 0..de {
                for f in 0..de {
                    r[(a * di + b, e * de + f)] = u[(a * de + e, b * de + f)];
                }
            }
        }
    }
    let gram = &r * &r.adjoint();
    let spectrum = eigh(&gram, f64::INFINITY).ok()?;
    let lead = spectrum.vectors.column(0);

    // vec(A) = u₁, vec(B)ᵀ = u₁† R
    let mut a_mat = ComplexMatrix::new(di, di, lead.clone()).ok()?;
    let mut b_mat = ComplexMatrix::zeros(de, de);
    for e in 0..de {
        for f in 0..de {
            b_mat[(e, f)] = (0..di * di).map(|k| lead[k].conj() * r[(k, e * de + f)]).sum();
        }
    }

    let scale = (di as f64).sqrt() / a_mat.norm_fro();
    let anchor = {
        let max = a_mat.norm_max();
        *a_mat
            .data()
            .iter()
            .find(|z| z.norm() >= max * (1.0 - 1e-9))
            .expect("non-zero leading vector")
    };
    let phase: Complex64 = anchor.conj() / anchor.norm();
    a_mat = a_mat.scale(phase * scale);
    b_mat = b_mat.scale(phase.conj() / scale);

    let diff = u - &a_mat.kron(&b_mat);
    let total = u.norm_fro();
    if total == 0.0 || diff.norm_fro() > KRONECKER_GAP_THRESHOLD * total || diff.norm_max() > tol {
        return None;
    }
    Some((a_mat, b_mat))
}
