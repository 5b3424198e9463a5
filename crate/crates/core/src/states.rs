//! Two-qubit density matrices and the three-qubit conditional-block state.
//!
//! Basis ordering for two qubits is fixed crate-wide as
//! `|11⟩, |10⟩, |01⟩, |00⟩` (indices 0..4), the first label being qubit 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, C64, ONE, ZERO};
use crate::tolerances::{
    BLOCK_ADJOINT_TOL, BLOCK_PSD_TOL, HERMITIAN_TOL, MIN_EIGENVALUE_TOL, TRACE_TOL,
    X_STATE_POPULATION_SLACK,
};

pub const IDX_11: usize = 0;
pub const IDX_10: usize = 1;
pub const IDX_01: usize = 2;
pub const IDX_00: usize = 3;

/// Index of `|q1 q2⟩` in the two-qubit basis.
pub fn basis_index(q1: u8, q2: u8) -> usize {
    assert!(q1 <= 1 && q2 <= 1, "qubit labels are 0 or 1");
    2 * (1 - q1 as usize) + (1 - q2 as usize)
}

/// Unit-trace, Hermitian, positive semidefinite 4×4 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.shape() != (4, 4) {
            return Err(Error::InvalidDensity(format!(
                "expected a 4x4 matrix, got {:?}",
                mat.shape()
            )));
        }
        let diag = validate_density(&mat);
        if !diag.passed() {
            return Err(Error::InvalidDensity(diag.to_string()));
        }
        Ok(Self(mat))
    }

    /// Normalised projector onto `psi`.
    pub fn pure(psi: &[C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v)?)
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(4).scale(C64::new(0.25, 0.0)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

/// Result of [`validate_density`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityDiagnostics {
    pub hermitian_deviation: f64,
    pub trace_deviation: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl DensityDiagnostics {
    pub fn passed(&self) -> bool {
        self.hermitian_deviation <= HERMITIAN_TOL
            && self.trace_deviation <= TRACE_TOL
            && self.min_eigenvalue >= MIN_EIGENVALUE_TOL
    }
}

impl fmt::Display for DensityDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermitian deviation {:e}, trace deviation {:e}, min eigenvalue {:e}",
            self.hermitian_deviation, self.trace_deviation, self.min_eigenvalue
        )
    }
}

/// Measures how far a square matrix is from being a valid density matrix.
pub fn validate_density(mat: &ComplexMatrix) -> DensityDiagnostics {
    let hermitian_deviation = mat.hermitian_deviation();
    let trace_deviation = (mat.trace() - ONE).norm();
    let min_eigenvalue = if mat.is_square() {
        hermitian_eigensystem(&mat.hermitian_part())
            .map(|e| e.values[0])
            .unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    DensityDiagnostics {
        hermitian_deviation,
        trace_deviation,
        min_eigenvalue,
    }
}

/// The four Bell states, labelled as `|Ψ±⟩ = (|11⟩ ± |00⟩)/√2` and
/// `|Φ±⟩ = (|10⟩ ± |01⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    pub fn vector(self) -> [C64; 4] {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut v = [ZERO; 4];
        match self {
            BellKind::PhiPlus | BellKind::PhiMinus => {
                v[IDX_10] = s;
                v[IDX_01] = if self == BellKind::PhiPlus { s } else { -s };
            }
            BellKind::PsiPlus | BellKind::PsiMinus => {
                v[IDX_11] = s;
                v[IDX_00] = if self == BellKind::PsiPlus { s } else { -s };
            }
        }
        v
    }

    pub fn name(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        }
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phi+" => Ok(BellKind::PhiPlus),
            "phi-" => Ok(BellKind::PhiMinus),
            "psi+" => Ok(BellKind::PsiPlus),
            "psi-" => Ok(BellKind::PsiMinus),
            _ => Err(Error::UnknownState(s.to_string())),
        }
    }
}

pub fn bell_state(kind: BellKind) -> DensityMatrix {
    DensityMatrix::pure(&kind.vector()).expect("Bell vectors are normalised")
}

/// `r·|Φ−⟩⟨Φ−| + (1−r)/4·I⊗I`.
pub fn werner_state(r: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfRange {
            name: "werner weight",
            value: r,
            range: "[0, 1]",
        });
    }
    let singlet = bell_state(BellKind::PhiMinus);
    let mixed = ComplexMatrix::identity(4).scale(C64::new((1.0 - r) / 4.0, 0.0));
    DensityMatrix::new(&singlet.matrix().scale(C64::new(r, 0.0)) + &mixed)
}

/// Initial states addressable by name: `phi+`, `phi-`, `psi+`, `psi-`,
/// `werner:<r>` and `ghz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateDescriptor {
    Bell(BellKind),
    Werner(f64),
    Ghz,
}

impl StateDescriptor {
    /// The two-qubit density matrix, or `None` for the three-qubit GHZ state.
    pub fn two_qubit(&self) -> Result<Option<DensityMatrix>> {
        match *self {
            StateDescriptor::Bell(kind) => Ok(Some(bell_state(kind))),
            StateDescriptor::Werner(r) => werner_state(r).map(Some),
            StateDescriptor::Ghz => Ok(None),
        }
    }
}

impl FromStr for StateDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "ghz" {
            return Ok(StateDescriptor::Ghz);
        }
        if let Some(r) = t.strip_prefix("werner:") {
            let r: f64 = r.parse().map_err(|_| Error::UnknownState(s.to_string()))?;
            werner_state(r)?;
            return Ok(StateDescriptor::Werner(r));
        }
        t.parse().map(StateDescriptor::Bell)
    }
}

impl fmt::Display for StateDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateDescriptor::Bell(kind) => f.write_str(kind.name()),
            StateDescriptor::Werner(r) => write!(f, "werner:{r}"),
            StateDescriptor::Ghz => f.write_str("ghz"),
        }
    }
}

/// Coefficients of the X-shaped two-qubit state
/// `a|11⟩⟨11| + b|10⟩⟨10| + c|01⟩⟨01| + d|00⟩⟨00| + f|10⟩⟨01| + f*|01⟩⟨10|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XStateCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: C64,
}

impl XStateCoefficients {
    pub fn new(a: f64, b: f64, c: f64, d: f64, f: C64) -> Result<Self> {
        let x = Self { a, b, c, d, f };
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        let slack = X_STATE_POPULATION_SLACK;
        for (name, value) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !value.is_finite() || value < -slack {
                return Err(Error::InvalidDensity(format!(
                    "population {name} = {value}"
                )));
            }
        }
        let total = self.a + self.b + self.c + self.d;
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("populations sum to {total}")));
        }
        if self.f.norm_sqr() > self.b * self.c + HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "|f|^2 = {} exceeds b*c = {}",
                self.f.norm_sqr(),
                self.b * self.c
            )));
        }
        Ok(())
    }

    /// Assembles the 4×4 matrix.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        m[(IDX_11, IDX_11)] = C64::new(self.a, 0.0);
        m[(IDX_10, IDX_10)] = C64::new(self.b, 0.0);
        m[(IDX_01, IDX_01)] = C64::new(self.c, 0.0);
        m[(IDX_00, IDX_00)] = C64::new(self.d, 0.0);
        m[(IDX_10, IDX_01)] = self.f;
        m[(IDX_01, IDX_10)] = self.f.conj();
        m
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix())
    }
}

fn in_x_pattern(i: usize, j: usize) -> bool {
    i == j || (i, j) == (IDX_10, IDX_01) || (i, j) == (IDX_01, IDX_10)
}

/// Reads the X-state coefficients off `rho`, rejecting any entry outside the
/// pattern (including the `|11⟩⟨00|` corner) with magnitude `>= tol`.
pub fn as_x_state(rho: &DensityMatrix, tol: f64) -> Result<XStateCoefficients> {
    let m = rho.matrix();
    for i in 0..4 {
        for j in 0..4 {
            if !in_x_pattern(i, j) && m[(i, j)].norm() >= tol {
                return Err(Error::PatternViolation {
                    row: i,
                    col: j,
                    magnitude: m[(i, j)].norm(),
                });
            }
        }
    }
    XStateCoefficients::new(
        m[(IDX_11, IDX_11)].re,
        m[(IDX_10, IDX_10)].re,
        m[(IDX_01, IDX_01)].re,
        m[(IDX_00, IDX_00)].re,
        m[(IDX_10, IDX_01)],
    )
}

/// Label of the remote qubit 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
}

/// Three-qubit state `Σ_{x,y ∈ {H,V}} rho_xy ⊗ |x⟩⟨y|` stored as the four
/// two-qubit blocks conditioned on qubit 3.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalBlocks {
    pub rho_hh: ComplexMatrix,
    pub rho_hv: ComplexMatrix,
    pub rho_vh: ComplexMatrix,
    pub rho_vv: ComplexMatrix,
}

impl ConditionalBlocks {
    pub fn new(
        rho_hh: ComplexMatrix,
        rho_hv: ComplexMatrix,
        rho_vh: ComplexMatrix,
        rho_vv: ComplexMatrix,
    ) -> Result<Self> {
        let blocks = Self {
            rho_hh,
            rho_hv,
            rho_vh,
            rho_vv,
        };
        blocks.validate()?;
        Ok(blocks)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in self.iter() {
            if m.shape() != (4, 4) {
                return Err(Error::InvalidBlocks(format!(
                    "{name} has shape {:?}",
                    m.shape()
                )));
            }
        }
        for (name, m) in [("rho_hh", &self.rho_hh), ("rho_vv", &self.rho_vv)] {
            let dev = m.hermitian_deviation();
            if dev > HERMITIAN_TOL {
                return Err(Error::InvalidBlocks(format!(
                    "{name} not Hermitian ({dev:e})"
                )));
            }
            if m.trace().re < -TRACE_TOL {
                return Err(Error::InvalidBlocks(format!("{name} has negative trace")));
            }
        }
        let total = self.rho_hh.trace().re + self.rho_vv.trace().re;
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidBlocks(format!("traces sum to {total}")));
        }
        let dev = self.rho_vh.max_abs_diff(&self.rho_hv.adjoint());
        if dev > BLOCK_ADJOINT_TOL {
            return Err(Error::InvalidBlocks(format!(
                "rho_vh differs from rho_hv† by {dev:e}"
            )));
        }
        let lowest = hermitian_eigensystem(&self.assemble().hermitian_part())?.values[0];
        if lowest < BLOCK_PSD_TOL {
            return Err(Error::InvalidBlocks(format!(
                "assembled state has eigenvalue {lowest:e}"
            )));
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &ComplexMatrix)> {
        [
            ("rho_hh", &self.rho_hh),
            ("rho_hv", &self.rho_hv),
            ("rho_vh", &self.rho_vh),
            ("rho_vv", &self.rho_vv),
        ]
        .into_iter()
    }

    /// Applies `f` to every block.
    pub fn try_map(
        &self,
        mut f: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        Ok(Self {
            rho_hh: f(&self.rho_hh)?,
            rho_hv: f(&self.rho_hv)?,
            rho_vh: f(&self.rho_vh)?,
            rho_vv: f(&self.rho_vv)?,
        })
    }

    pub fn block(&self, row: Polarization, col: Polarization) -> &ComplexMatrix {
        match (row, col) {
            (Polarization::H, Polarization::H) => &self.rho_hh,
            (Polarization::H, Polarization::V) => &self.rho_hv,
            (Polarization::V, Polarization::H) => &self.rho_vh,
            (Polarization::V, Polarization::V) => &self.rho_vv,
        }
    }

    /// The 8×8 three-qubit matrix; index `2·k + x` for two-qubit basis index
    /// `k` and qubit-3 label `x` (`H = 0`, `V = 1`).
    pub fn assemble(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(8, |i, j| {
            let row = if i % 2 == 0 {
                Polarization::H
            } else {
                Polarization::V
            };
            let col = if j % 2 == 0 {
                Polarization::H
            } else {
                Polarization::V
            };
            self.block(row, col)[(i / 2, j / 2)]
        })
    }

    /// Reduced state of qubits 1 and 2.
    pub fn trace_out_qubit3(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(&self.rho_hh + &self.rho_vv)
    }
}

/// `(|11⟩|H⟩ + |00⟩|V⟩)/√2` as conditional blocks.
pub fn ghz_blocks() -> ConditionalBlocks {
    let half = C64::new(0.5, 0.0);
    let single = |i: usize, j: usize| {
        let mut m = ComplexMatrix::zeros(4);
        m[(i, j)] = half;
        m
    };
    ConditionalBlocks::new(
        single(IDX_11, IDX_11),
        single(IDX_11, IDX_00),
        single(IDX_00, IDX_11),
        single(IDX_00, IDX_00),
    )
    .expect("GHZ blocks are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::X_STATE_TOL;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn basis_indices() {
        assert_eq!(basis_index(1, 1), IDX_11);
        assert_eq!(basis_index(1, 0), IDX_10);
        assert_eq!(basis_index(0, 1), IDX_01);
        assert_eq!(basis_index(0, 0), IDX_00);
    }

    #[test]
    fn phi_minus_is_x_state() {
        let x = as_x_state(&bell_state(BellKind::PhiMinus), X_STATE_TOL).unwrap();
        assert!(close(x.a, 0.0, 1e-15) && close(x.d, 0.0, 1e-15));
        assert!(close(x.b, 0.5, 1e-15) && close(x.c, 0.5, 1e-15));
        assert!((x.f - C64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn psi_plus_has_corner_coherence() {
        let rho = bell_state(BellKind::PsiPlus);
        assert!(close(rho.get(IDX_11, IDX_11).re, 0.5, 1e-15));
        assert!(close(rho.get(IDX_00, IDX_00).re, 0.5, 1e-15));
        assert!(close(rho.get(IDX_11, IDX_00).re, 0.5, 1e-15));
        match as_x_state(&rho, X_STATE_TOL) {
            Err(Error::PatternViolation {
                row,
                col,
                magnitude,
            }) => {
                assert_eq!((row, col), (IDX_11, IDX_00));
                assert!(close(magnitude, 0.5, 1e-15));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn werner_limits_and_coefficients() {
        assert!(
            werner_state(1.0)
                .unwrap()
                .matrix()
                .max_abs_diff(bell_state(BellKind::PhiMinus).matrix())
                < 1e-15
        );
        assert!(
            werner_state(0.0)
                .unwrap()
                .matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed().matrix())
                < 1e-15
        );
        // r|Φ−⟩⟨Φ−| gives b = c = r/2, f = −r/2; the mixture adds (1−r)/4 to every population
        let x = as_x_state(&werner_state(0.8).unwrap(), X_STATE_TOL).unwrap();
        assert!(close(x.a, 0.05, 1e-15) && close(x.d, 0.05, 1e-15));
        assert!(close(x.b, 0.45, 1e-15) && close(x.c, 0.45, 1e-15));
        assert!((x.f - C64::new(-0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn werner_rejects_out_of_range() {
        assert!(matches!(werner_state(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(werner_state(-0.1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn ghz_structure() {
        let g = ghz_blocks();
        assert!(close(g.rho_hh.trace().re, 0.5, 1e-15));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (IDX_11, IDX_00) { 0.5 } else { 0.0 };
                assert_eq!(g.rho_hv[(i, j)], C64::new(expected, 0.0));
            }
        }
        let full = g.assemble();
        assert!(close((&full * &full).trace().re, 1.0, 1e-15));
        assert!(close(full.trace().re, 1.0, 1e-15));
    }

    #[test]
    fn validate_density_examples() {
        let d = validate_density(DensityMatrix::maximally_mixed().matrix());
        assert!(d.passed());

        let m = ComplexMatrix::from_real_diag(&[0.3, 0.2, 0.2, 0.2]).unwrap();
        let d = validate_density(&m);
        assert!(!d.passed());
        assert!(close(d.trace_deviation, 0.1, 1e-15));

        let d = validate_density(bell_state(BellKind::PsiMinus).matrix());
        assert!(d.passed());
        assert!(d.min_eigenvalue.abs() < 1e-15);
    }

    #[test]
    fn constructors_pass_validation() {
        for kind in BellKind::ALL {
            assert!(validate_density(bell_state(kind).matrix()).passed());
        }
        for k in 0..=20 {
            assert!(validate_density(werner_state(k as f64 / 20.0).unwrap().matrix()).passed());
        }
        assert!(ghz_blocks().validate().is_ok());
    }

    #[test]
    fn descriptors_parse() {
        assert_eq!(
            "phi-".parse::<StateDescriptor>().unwrap(),
            StateDescriptor::Bell(BellKind::PhiMinus)
        );
        assert_eq!(
            "Werner:0.8".parse::<StateDescriptor>().unwrap(),
            StateDescriptor::Werner(0.8)
        );
        assert_eq!(
            "ghz".parse::<StateDescriptor>().unwrap(),
            StateDescriptor::Ghz
        );
        assert!("werner:2".parse::<StateDescriptor>().is_err());
        assert!("bell".parse::<StateDescriptor>().is_err());
    }

    #[test]
    fn x_state_rejects_bad_coefficients() {
        assert!(XStateCoefficients::new(0.5, 0.5, 0.0, 0.0, ZERO).is_ok());
        assert!(XStateCoefficients::new(0.5, 0.6, 0.0, 0.0, ZERO).is_err());
        assert!(XStateCoefficients::new(0.0, 0.5, 0.5, 0.0, C64::new(0.6, 0.0)).is_err());
    }
}
