//! Remote control of the two-qubit entanglement through a GHZ partner.
//!
//! Qubit 3 never decoheres, so the three-qubit state is carried as four
//! conditional blocks that each evolve under the two-qubit generator. A
//! projective measurement of qubit 3 in a rotated basis then erases the
//! which-block information and leaves qubits 1 and 2 entangled.

use std::f64::consts::{PI, TAU};

use crate::dynamics::{fixed_point_projection, ChannelParams, DrivePulse, Liouvillian};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::measures::concurrence;
use crate::states::{ghz_blocks, ConditionalBlocks, DensityMatrix, IDX_00, IDX_01, IDX_10, IDX_11};
use crate::tolerances::{GHZ_PATTERN_TOL, OUTCOME_PROBABILITY_FLOOR, TRACE_TOL};

/// Basis `{cos(θ/2)|H⟩ + e^{iφ}sin(θ/2)|V⟩, cos(θ/2)|V⟩ − e^{−iφ}sin(θ/2)|H⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementBasis {
    theta: f64,
    phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    First,
    Second,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::First, Outcome::Second];

    fn label(self) -> u8 {
        match self {
            Outcome::First => 1,
            Outcome::Second => 2,
        }
    }
}

impl MeasurementBasis {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi]",
            });
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2pi)",
            });
        }
        let basis = Self { theta, phi };
        let [u, v] = [basis.vector(Outcome::First), basis.vector(Outcome::Second)];
        let overlap = u.0.conj() * v.0 + u.1.conj() * v.1;
        let norms = (
            u.0.norm_sqr() + u.1.norm_sqr(),
            v.0.norm_sqr() + v.1.norm_sqr(),
        );
        assert!(
            overlap.norm() < 1e-14
                && (norms.0 - 1.0).abs() < 1e-14
                && (norms.1 - 1.0).abs() < 1e-14,
            "measurement basis is not orthonormal"
        );
        Ok(basis)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(⟨H|m⟩, ⟨V|m⟩)` for the requested outcome.
    pub fn vector(&self, outcome: Outcome) -> (C64, C64) {
        let (s, c) = (self.theta / 2.0).sin_cos();
        match outcome {
            Outcome::First => (C64::new(c, 0.0), C64::from_polar(s, self.phi)),
            Outcome::Second => (-C64::from_polar(s, -self.phi), C64::new(c, 0.0)),
        }
    }
}

/// Nonzero amplitudes of the stationary three-qubit state:
/// `ζ_a |11⟩⟨11|⊗|H⟩⟨H|`, `ζ_b |10⟩⟨10|⊗|V⟩⟨V|`, `ζ_c |01⟩⟨01|⊗|H⟩⟨H|`,
/// `ζ_d |00⟩⟨00|⊗|V⟩⟨V|` and `ζ_f |01⟩⟨10|⊗|H⟩⟨V|` plus its conjugate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzStationaryCoefficients {
    pub zeta_a: f64,
    pub zeta_b: f64,
    pub zeta_c: f64,
    pub zeta_d: f64,
    pub zeta_f: C64,
}

impl GhzStationaryCoefficients {
    pub fn new(zeta_a: f64, zeta_b: f64, zeta_c: f64, zeta_d: f64, zeta_f: C64) -> Result<Self> {
        let z = Self {
            zeta_a,
            zeta_b,
            zeta_c,
            zeta_d,
            zeta_f,
        };
        let total = zeta_a + zeta_b + zeta_c + zeta_d;
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidBlocks(format!(
                "zeta populations sum to {total}"
            )));
        }
        z.to_blocks().validate()?;
        Ok(z)
    }

    pub fn to_blocks(&self) -> ConditionalBlocks {
        let mut hh = ComplexMatrix::zeros(4);
        let mut vv = ComplexMatrix::zeros(4);
        let mut hv = ComplexMatrix::zeros(4);
        hh[(IDX_11, IDX_11)] = C64::new(self.zeta_a, 0.0);
        hh[(IDX_01, IDX_01)] = C64::new(self.zeta_c, 0.0);
        vv[(IDX_10, IDX_10)] = C64::new(self.zeta_b, 0.0);
        vv[(IDX_00, IDX_00)] = C64::new(self.zeta_d, 0.0);
        hv[(IDX_01, IDX_10)] = self.zeta_f;
        let vh = hv.adjoint();
        ConditionalBlocks {
            rho_hh: hh,
            rho_hv: hv,
            rho_vh: vh,
            rho_vv: vv,
        }
    }
}

/// Positions `(row, col)` of the assembled 8×8 stationary state that may be
/// nonzero.
pub fn stationary_pattern() -> [(usize, usize); 6] {
    let idx = |k: usize, x: usize| 2 * k + x;
    let (h, v) = (0, 1);
    [
        (idx(IDX_11, h), idx(IDX_11, h)),
        (idx(IDX_10, v), idx(IDX_10, v)),
        (idx(IDX_01, h), idx(IDX_01, h)),
        (idx(IDX_00, v), idx(IDX_00, v)),
        (idx(IDX_01, h), idx(IDX_10, v)),
        (idx(IDX_10, v), idx(IDX_01, h)),
    ]
}

/// Propagates every conditional block with the same two-qubit map.
pub fn evolve_blocks(
    blocks: &ConditionalBlocks,
    omega1: f64,
    params: ChannelParams,
    t: f64,
) -> Result<ConditionalBlocks> {
    evolve_blocks_with(&Liouvillian::build(omega1, params)?, blocks, t)
}

pub fn evolve_blocks_with(
    generator: &Liouvillian,
    blocks: &ConditionalBlocks,
    t: f64,
) -> Result<ConditionalBlocks> {
    let propagator = generator.propagator(t)?;
    let out = blocks.try_map(|m| Ok(propagator.apply(m)))?;
    out.validate()?;
    Ok(out)
}

/// Drives the GHZ blocks for the pulse duration and projects each onto the
/// dephasing fixed point, checking the stationary pattern.
pub fn stationary_ghz_blocks_with(
    generator: &Liouvillian,
    duration: f64,
) -> Result<ConditionalBlocks> {
    let driven = evolve_blocks_with(generator, &ghz_blocks(), duration)?;
    let blocks = driven.try_map(|m| Ok(fixed_point_projection(m)))?;
    let full = blocks.assemble();
    let allowed = stationary_pattern();
    for i in 0..8 {
        for j in 0..8 {
            let magnitude = full[(i, j)].norm();
            if !allowed.contains(&(i, j)) && magnitude >= GHZ_PATTERN_TOL {
                return Err(Error::PatternViolation {
                    row: i,
                    col: j,
                    magnitude,
                });
            }
        }
    }
    Ok(blocks)
}

pub fn stationary_ghz_blocks(
    pulse: DrivePulse,
    params: ChannelParams,
) -> Result<ConditionalBlocks> {
    stationary_ghz_blocks_with(
        &Liouvillian::build(pulse.omega1(), params)?,
        pulse.duration(),
    )
}

fn coefficients_of(blocks: &ConditionalBlocks) -> Result<GhzStationaryCoefficients> {
    GhzStationaryCoefficients::new(
        blocks.rho_hh[(IDX_11, IDX_11)].re,
        blocks.rho_vv[(IDX_10, IDX_10)].re,
        blocks.rho_hh[(IDX_01, IDX_01)].re,
        blocks.rho_vv[(IDX_00, IDX_00)].re,
        blocks.rho_hv[(IDX_01, IDX_10)],
    )
}

pub fn stationary_blocks(
    pulse: DrivePulse,
    params: ChannelParams,
) -> Result<GhzStationaryCoefficients> {
    coefficients_of(&stationary_ghz_blocks(pulse, params)?)
}

pub fn stationary_blocks_with(
    generator: &Liouvillian,
    duration: f64,
) -> Result<GhzStationaryCoefficients> {
    coefficients_of(&stationary_ghz_blocks_with(generator, duration)?)
}

/// `⟨m|ρ|m⟩` as a two-qubit matrix, not normalised.
pub fn conditional_state(
    blocks: &ConditionalBlocks,
    basis: MeasurementBasis,
    outcome: Outcome,
) -> ComplexMatrix {
    let (mh, mv) = basis.vector(outcome);
    let weight = |x: C64, y: C64| x.conj() * y;
    let terms = [
        blocks.rho_hh.scale(weight(mh, mh)),
        blocks.rho_hv.scale(weight(mh, mv)),
        blocks.rho_vh.scale(weight(mv, mh)),
        blocks.rho_vv.scale(weight(mv, mv)),
    ];
    let mut sum = terms[0].clone();
    for t in &terms[1..] {
        sum = &sum + t;
    }
    sum
}

/// Probability of `outcome` and the normalised state of qubits 1 and 2.
pub fn project_qubit3(
    blocks: &ConditionalBlocks,
    basis: MeasurementBasis,
    outcome: Outcome,
) -> Result<(f64, DensityMatrix)> {
    let unnormalised = conditional_state(blocks, basis, outcome);
    let probability = unnormalised.trace().re;
    if probability < OUTCOME_PROBABILITY_FLOOR {
        return Err(Error::ImpossibleOutcome {
            outcome: outcome.label(),
            probability,
        });
    }
    let rho = DensityMatrix::new(
        unnormalised
            .scale(C64::new(1.0 / probability, 0.0))
            .hermitian_part(),
    )?;
    Ok((probability, rho))
}

/// Outcome-weighted concurrence of qubits 1 and 2 after measuring qubit 3.
pub fn average_concurrence(blocks: &ConditionalBlocks, basis: MeasurementBasis) -> Result<f64> {
    let mut total = 0.0;
    for outcome in Outcome::BOTH {
        match project_qubit3(blocks, basis, outcome) {
            Ok((p, rho)) => total += p * concurrence(&rho)?,
            Err(Error::ImpossibleOutcome { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}

/// `2|sin θ|·max(0, |ζ_f| − √(ζ_a ζ_d))`.
pub fn closed_form_average_concurrence(zeta: &GhzStationaryCoefficients, theta: f64) -> f64 {
    let ad = (zeta.zeta_a * zeta.zeta_d).max(0.0).sqrt();
    2.0 * theta.sin().abs() * (zeta.zeta_f.norm() - ad).max(0.0)
}
