//! Collective dephasing with a finite-time drive on qubit 1.
//!
//! The generator is
//! `L(ρ) = −(i/2)[Ω₁σ_x⊗I, ρ] + (γ/2)(2J_zρJ_z − J_z²ρ − ρJ_z²)` with
//! `J_z = (σ_z⊗I + I⊗σ_z)/2`. Density matrices are column-stacked, so
//! `A·ρ·B` becomes `(Bᵀ⊗A)·vec(ρ)`.

use crate::error::{Error, Result};
use crate::linalg::{kron, matrix_exponential, pauli, ComplexMatrix, C64, I, ZERO};
use crate::states::{as_x_state, DensityMatrix, XStateCoefficients};
use crate::tolerances::{
    RK4_MAX_STEP_GAMMA, RK4_MAX_STEP_RABI, STATIONARY_RESIDUAL_TOL, X_STATE_TOL,
};

const DIM: usize = 4;

/// Dephasing rate `γ > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    gamma: f64,
}

impl ChannelParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                range: "(0, inf)",
            });
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Step-function drive `Ω₁(t) = Ω₁·Θ(T − t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrivePulse {
    omega1: f64,
    duration: f64,
}

impl DrivePulse {
    pub fn new(omega1: f64, duration: f64) -> Result<Self> {
        non_negative("omega1", omega1)?;
        non_negative("pulse duration", duration)?;
        Ok(Self { omega1, duration })
    }

    /// Pulse from the dimensionless pair `(Ω₁/γ, γT)`.
    pub fn from_scaled(omega_ratio: f64, gamma_t: f64, params: ChannelParams) -> Result<Self> {
        Self::new(omega_ratio * params.gamma, gamma_t / params.gamma)
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, inf)",
        })
    }
}

/// `J_z = diag(1, 0, 0, −1)` in the `|11⟩, |10⟩, |01⟩, |00⟩` basis.
pub fn jz_operator() -> ComplexMatrix {
    let id = pauli::identity();
    let z = pauli::z();
    let sum = &kron(&z, &id).expect("4x4") + &kron(&id, &z).expect("4x4");
    sum.scale(C64::new(0.5, 0.0))
}

/// Diagonal of `J_z`.
pub fn jz_eigenvalues() -> [f64; 4] {
    [1.0, 0.0, 0.0, -1.0]
}

/// `σ_x` acting on qubit 1.
pub fn drive_operator() -> ComplexMatrix {
    kron(&pauli::x(), &pauli::identity()).expect("4x4")
}

pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            v.push(m[(i, j)]);
        }
    }
    v
}

pub fn unvectorize(v: &[C64]) -> ComplexMatrix {
    assert_eq!(v.len(), DIM * DIM, "expected a stacked 4x4 matrix");
    ComplexMatrix::from_fn(DIM, |i, j| v[j * DIM + i])
}

/// 16×16 superoperator of the driven master equation.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    superop: ComplexMatrix,
    omega1: f64,
    params: ChannelParams,
}

impl Liouvillian {
    pub fn build(omega1: f64, params: ChannelParams) -> Result<Self> {
        non_negative("omega1", omega1)?;
        let id = ComplexMatrix::identity(DIM);
        let h = drive_operator().scale(C64::new(omega1 / 2.0, 0.0));
        let jz = jz_operator();
        let jz2 = &jz * &jz;

        // −i(I⊗H − Hᵀ⊗I)
        let coherent = (&kron(&id, &h)? - &kron(&h.transpose(), &id)?).scale(-I);
        // (γ/2)(2 Jzᵀ⊗Jz − I⊗Jz² − (Jz²)ᵀ⊗I)
        let sandwich = kron(&jz.transpose(), &jz)?.scale(C64::new(2.0, 0.0));
        let dissipator = &(&sandwich - &kron(&id, &jz2)?) - &kron(&jz2.transpose(), &id)?;
        let superop = &coherent + &dissipator.scale(C64::new(params.gamma / 2.0, 0.0));
        Ok(Self {
            superop,
            omega1,
            params,
        })
    }

    pub fn superop(&self) -> &ComplexMatrix {
        &self.superop
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn params(&self) -> ChannelParams {
        self.params
    }

    /// `L(m)` for any 4×4 matrix `m`.
    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&self.superop.apply(&vectorize(m)))
    }

    /// `exp(L·t)`.
    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        non_negative("time", t)?;
        let generator = self.superop.scale(C64::new(t, 0.0));
        Ok(Propagator(matrix_exponential(&generator)?))
    }

    pub fn propagate(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        DensityMatrix::new(self.propagator(t)?.apply(rho0.matrix()))
    }

    /// Stationary coefficients after a drive of length `duration` followed by
    /// unlimited free dephasing.
    pub fn stationary_state(
        &self,
        rho0: &DensityMatrix,
        duration: f64,
    ) -> Result<XStateCoefficients> {
        let driven = self.propagate(rho0, duration)?;
        as_x_state(&dephasing_fixed_point(&driven), X_STATE_TOL)
    }
}

/// A fixed-time evolution map `exp(L·t)`.
#[derive(Clone, Debug)]
pub struct Propagator(ComplexMatrix);

impl Propagator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Applies the map to any 4×4 matrix, including non-Hermitian blocks.
    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&self.0.apply(&vectorize(m)))
    }
}

pub fn build_liouvillian(omega1: f64, params: ChannelParams) -> Result<Liouvillian> {
    Liouvillian::build(omega1, params)
}

/// Evolves `rho0` for time `t` under a constant drive `omega1`.
pub fn propagate(
    rho0: &DensityMatrix,
    omega1: f64,
    params: ChannelParams,
    t: f64,
) -> Result<DensityMatrix> {
    Liouvillian::build(omega1, params)?.propagate(rho0, t)
}

/// Evolves `rho0` for time `t` with the pulse switched off after
/// `pulse.duration()`.
pub fn evolve_with_pulse(
    rho0: &DensityMatrix,
    pulse: DrivePulse,
    params: ChannelParams,
    t: f64,
) -> Result<DensityMatrix> {
    non_negative("time", t)?;
    let driven_for = t.min(pulse.duration);
    let rho = propagate(rho0, pulse.omega1, params, driven_for)?;
    propagate(&rho, 0.0, params, t - driven_for)
}

/// Largest step accepted by [`propagate_rk4`].
pub fn rk4_max_step(omega1: f64, params: ChannelParams) -> f64 {
    let mut max = RK4_MAX_STEP_GAMMA / params.gamma;
    if omega1 > 0.0 {
        max = max.min(RK4_MAX_STEP_RABI * 2.0 * std::f64::consts::PI / omega1);
    }
    max
}

fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// Fixed-step classical RK4 integration of the master equation, evaluated
/// directly on 4×4 operators without the superoperator.
///
/// The interval is split into `ceil(t / step)` equal steps.
pub fn propagate_rk4(
    rho0: &DensityMatrix,
    omega1: f64,
    params: ChannelParams,
    t: f64,
    step: f64,
) -> Result<DensityMatrix> {
    non_negative("omega1", omega1)?;
    non_negative("time", t)?;
    let max = rk4_max_step(omega1, params);
    if !(step > 0.0 && step <= max) {
        return Err(Error::StepTooLarge { step, max });
    }
    let h_op = drive_operator().scale(C64::new(omega1 / 2.0, 0.0));
    let jz = jz_operator();
    let jz2 = &jz * &jz;
    let half_gamma = C64::new(params.gamma / 2.0, 0.0);
    let rhs = |rho: &ComplexMatrix| -> ComplexMatrix {
        let coherent = commutator(&h_op, rho).scale(-I);
        let sandwich = (&(&jz * rho) * &jz).scale(C64::new(2.0, 0.0));
        let dissipator = &(&sandwich - &(&jz2 * rho)) - &(rho * &jz2);
        &coherent + &dissipator.scale(half_gamma)
    };

    let steps = (t / step).ceil() as usize;
    let mut rho = rho0.matrix().clone();
    if steps == 0 {
        return DensityMatrix::new(rho);
    }
    let h = t / steps as f64;
    let half = C64::new(h / 2.0, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for _ in 0..steps {
        let k1 = rhs(&rho);
        let k2 = rhs(&(&rho + &k1.scale(half)));
        let k3 = rhs(&(&rho + &k2.scale(half)));
        let k4 = rhs(&(&rho + &k3.scale(full)));
        let incr = &(&(&k1 + &k2.scale(two)) + &k3.scale(two)) + &k4;
        rho = &rho + &incr.scale(sixth);
    }
    DensityMatrix::new(rho)
}

/// Zeroes every entry coupling different `J_z` eigenvalues: the infinite-time
/// limit of undriven collective dephasing. Works on arbitrary 4×4 blocks.
pub fn fixed_point_projection(m: &ComplexMatrix) -> ComplexMatrix {
    let jz = jz_eigenvalues();
    ComplexMatrix::from_fn(DIM, |i, j| if jz[i] == jz[j] { m[(i, j)] } else { ZERO })
}

pub fn dephasing_fixed_point(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new(fixed_point_projection(rho.matrix()))
        .expect("pinching a density matrix keeps it valid")
}

/// Stationary state reached from `rho0` after the pulse and infinite free
/// dephasing, as X-state coefficients.
pub fn stationary_state(
    rho0: &DensityMatrix,
    pulse: DrivePulse,
    params: ChannelParams,
) -> Result<XStateCoefficients> {
    Liouvillian::build(pulse.omega1, params)?.stationary_state(rho0, pulse.duration)
}

/// `‖L₀·vec(ρ)‖₂` for the undriven generator.
pub fn stationary_residual(rho: &DensityMatrix, params: ChannelParams) -> f64 {
    let l0 = Liouvillian::build(0.0, params).expect("undriven generator");
    l0.apply(rho.matrix()).frobenius_norm()
}

pub fn is_stationary(rho: &DensityMatrix, params: ChannelParams) -> bool {
    stationary_residual(rho, params) < STATIONARY_RESIDUAL_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::states::{bell_state, werner_state, BellKind, IDX_00, IDX_10, IDX_11};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit() -> ChannelParams {
        ChannelParams::new(1.0).unwrap()
    }

    fn single(i: usize, j: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        m[(i, j)] = ONE;
        m
    }

    #[test]
    fn jz_diagonal() {
        let jz = jz_operator();
        assert_eq!(
            jz,
            ComplexMatrix::from_real_diag(&jz_eigenvalues()).unwrap()
        );
        assert_eq!(jz[(IDX_11, IDX_11)].re, 1.0);
        assert_eq!(jz[(IDX_10, IDX_10)].re, 0.0);
        assert_eq!(jz[(IDX_00, IDX_00)].re, -1.0);
    }

    #[test]
    fn vec_convention() {
        // vec(AρB) = (Bᵀ⊗A) vec(ρ)
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rand4 = || {
            ComplexMatrix::from_fn(4, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
        };
        let (a, rho, b) = (rand4(), rand4(), rand4());
        let lhs = vectorize(&(&(&a * &rho) * &b));
        let rhs = kron(&b.transpose(), &a).unwrap().apply(&vectorize(&rho));
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).norm() < 1e-13);
        }
        assert_eq!(unvectorize(&vectorize(&a)), a);
    }

    #[test]
    fn liouvillian_matches_operator_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = ChannelParams::new(0.7).unwrap();
        let omega1 = 3.3;
        let l = Liouvillian::build(omega1, params).unwrap();
        let h = drive_operator().scale(C64::new(omega1 / 2.0, 0.0));
        let jz = jz_operator();
        let jz2 = &jz * &jz;
        for _ in 0..20 {
            let rho = ComplexMatrix::from_fn(4, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let coherent = commutator(&h, &rho).scale(-I);
            let diss = &(&(&(&jz * &rho) * &jz).scale(C64::new(2.0, 0.0)) - &(&jz2 * &rho))
                - &(&rho * &jz2);
            let expected = &coherent + &diss.scale(C64::new(0.35, 0.0));
            assert!(l.apply(&rho).max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn liouvillian_examples() {
        let l0 = Liouvillian::build(0.0, unit()).unwrap();
        let out = l0.apply(bell_state(BellKind::PhiMinus).matrix());
        assert!(out.max_abs() < 1e-15);

        // (γ/2)(2·(1)(−1) − 1 − 1) = −2γ
        let gamma = 0.6;
        let l = Liouvillian::build(0.0, ChannelParams::new(gamma).unwrap()).unwrap();
        let out = l.apply(&single(IDX_11, IDX_00));
        assert!(
            out.max_abs_diff(&single(IDX_11, IDX_00).scale(C64::new(-2.0 * gamma, 0.0))) < 1e-15
        );
    }

    #[test]
    fn liouvillian_preserves_trace_and_hermiticity() {
        let l = Liouvillian::build(41.25, unit()).unwrap();
        let s = l.superop();
        for j in 0..16 {
            let tr: C64 = (0..4).map(|k| s[(k * 4 + k, j)]).sum();
            assert!(tr.norm() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let m = ComplexMatrix::from_fn(4, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .hermitian_part();
            assert!(l.apply(&m).hermitian_deviation() < 1e-12);
        }
    }

    #[test]
    fn propagate_examples() {
        let psi = bell_state(BellKind::PsiPlus);
        assert_eq!(propagate(&psi, 41.25, unit(), 0.0).unwrap(), psi);

        let out = propagate(&psi, 0.0, unit(), 1.0).unwrap();
        let expected = 0.5 * (-2.0f64).exp();
        assert!((out.get(IDX_11, IDX_00).re - expected).abs() < 1e-12);
        assert!((out.get(IDX_11, IDX_11).re - 0.5).abs() < 1e-12);
        assert!((out.get(IDX_00, IDX_00).re - 0.5).abs() < 1e-12);

        let phi = bell_state(BellKind::PhiMinus);
        for t in [0.3, 2.0, 17.0] {
            let out = propagate(&phi, 0.0, unit(), t).unwrap();
            assert!(out.matrix().max_abs_diff(phi.matrix()) < 1e-12);
        }
    }

    #[test]
    fn propagate_rejects_negative_time() {
        let phi = bell_state(BellKind::PhiMinus);
        assert!(matches!(
            propagate(&phi, 1.0, unit(), -1.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn rk4_step_bound() {
        let phi = bell_state(BellKind::PhiMinus);
        let max = rk4_max_step(41.25, unit());
        assert!((max - 0.05 * 2.0 * std::f64::consts::PI / 41.25).abs() < 1e-15);
        assert!(matches!(
            propagate_rk4(&phi, 41.25, unit(), 1.0, 0.01),
            Err(Error::StepTooLarge { .. })
        ));
        assert_eq!(propagate_rk4(&phi, 41.25, unit(), 0.0, 1e-3).unwrap(), phi);
    }

    #[test]
    fn rk4_agrees_on_examples() {
        let psi = bell_state(BellKind::PsiPlus);
        let a = propagate(&psi, 0.0, unit(), 1.0).unwrap();
        let b = propagate_rk4(&psi, 0.0, unit(), 1.0, 1e-3).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-6);

        let phi = bell_state(BellKind::PhiMinus);
        let a = propagate(&phi, 41.25, unit(), 0.5).unwrap();
        let b = propagate_rk4(&phi, 41.25, unit(), 0.5, 1e-3).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-6);
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let phi = bell_state(BellKind::PhiMinus);
        let exact = propagate(&phi, 41.25, unit(), 0.5).unwrap();
        let err = |h: f64| {
            propagate_rk4(&phi, 41.25, unit(), 0.5, h)
                .unwrap()
                .matrix()
                .max_abs_diff(exact.matrix())
        };
        let (coarse, fine) = (err(0.005), err(0.0025));
        let ratio = coarse / fine;
        assert!(
            (12.0..20.0).contains(&ratio),
            "ratio {ratio}, errors {coarse:e} {fine:e}"
        );
    }

    #[test]
    fn fixed_point_examples() {
        let fp = dephasing_fixed_point(&bell_state(BellKind::PsiPlus));
        let expected = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(fp.matrix().max_abs_diff(&expected) < 1e-15);

        let phi = bell_state(BellKind::PhiMinus);
        assert_eq!(dephasing_fixed_point(&phi), phi);

        let w = werner_state(0.8).unwrap();
        assert_eq!(dephasing_fixed_point(&w), w);
        assert!(is_stationary(&w, unit()));
        assert!(!is_stationary(&bell_state(BellKind::PsiPlus), unit()));
    }

    #[test]
    fn fixed_point_is_long_time_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let a = ComplexMatrix::from_fn(4, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let m = &a * &a.adjoint();
            let rho = DensityMatrix::new(m.scale(C64::new(1.0 / m.trace().re, 0.0))).unwrap();
            let fp = dephasing_fixed_point(&rho);
            // slowest coherence decays as e^{-γt/2}; at γt = 60 that is below 1e-13
            let long = propagate(&rho, 0.0, unit(), 60.0).unwrap();
            assert!(long.matrix().max_abs_diff(fp.matrix()) < 1e-12);
            // at γt = 20 each coherence still carries its closed-form residue
            let mid = propagate(&rho, 0.0, unit(), 20.0).unwrap();
            let jz = jz_eigenvalues();
            for i in 0..4 {
                for j in 0..4 {
                    let rate = (jz[i] - jz[j]).powi(2) / 2.0;
                    let expected = rho.get(i, j) * (-rate * 20.0).exp();
                    assert!((mid.get(i, j) - expected).norm() < 1e-12);
                }
            }
            assert_eq!(dephasing_fixed_point(&fp), fp);
        }
    }

    #[test]
    fn stationary_examples_at_zero_duration() {
        let p = unit();
        let pulse = DrivePulse::new(41.25, 0.0).unwrap();
        let x = stationary_state(&bell_state(BellKind::PhiMinus), pulse, p).unwrap();
        assert!((x.b - 0.5).abs() < 1e-12 && (x.c - 0.5).abs() < 1e-12);
        assert!(x.a.abs() < 1e-12 && x.d.abs() < 1e-12);
        assert!((x.f + 0.5).norm() < 1e-12);

        let x = stationary_state(&bell_state(BellKind::PsiPlus), pulse, p).unwrap();
        assert!((x.a - 0.5).abs() < 1e-12 && (x.d - 0.5).abs() < 1e-12);
        assert!(x.f.norm() < 1e-12);

        let x = stationary_state(&werner_state(0.8).unwrap(), pulse, p).unwrap();
        assert!((x.a - 0.05).abs() < 1e-12 && (x.b - 0.45).abs() < 1e-12);
        assert!((x.f + 0.4).norm() < 1e-12);
    }

    #[test]
    fn stationary_depends_on_scaled_parameters_only() {
        let rho = werner_state(0.6).unwrap();
        let base = stationary_state(
            &rho,
            DrivePulse::new(41.25, 0.37).unwrap(),
            ChannelParams::new(1.0).unwrap(),
        )
        .unwrap();
        for s in [0.1, 3.0, 250.0] {
            let scaled = stationary_state(
                &rho,
                DrivePulse::new(41.25 * s, 0.37 / s).unwrap(),
                ChannelParams::new(s).unwrap(),
            )
            .unwrap();
            assert!((base.a - scaled.a).abs() < 1e-9);
            assert!((base.b - scaled.b).abs() < 1e-9);
            assert!((base.c - scaled.c).abs() < 1e-9);
            assert!((base.d - scaled.d).abs() < 1e-9);
            assert!((base.f - scaled.f).norm() < 1e-9);
        }
    }

    #[test]
    fn pulse_switches_off() {
        let phi = bell_state(BellKind::PhiMinus);
        let pulse = DrivePulse::new(41.25, 0.2).unwrap();
        let a = evolve_with_pulse(&phi, pulse, unit(), 0.7).unwrap();
        let driven = propagate(&phi, 41.25, unit(), 0.2).unwrap();
        let b = propagate(&driven, 0.0, unit(), 0.5).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
    }
}
