//! Wootters concurrence and Von Neumann entropy, for general density
//! matrices and in closed form for X-states.

use crate::error::Result;
use crate::linalg::{hermitian_eigensystem, kron, pauli, psd_sqrt, ComplexMatrix};
use crate::states::{DensityMatrix, XStateCoefficients};
use crate::tolerances::EIGENVALUE_CLAMP;

/// How a measure was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    General,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub method: Method,
}

impl MeasureResult {
    pub fn concurrence(rho: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            value: concurrence(rho)?,
            method: Method::General,
        })
    }

    pub fn concurrence_x(x: &XStateCoefficients) -> Self {
        Self {
            value: concurrence_x(x),
            method: Method::ClosedForm,
        }
    }

    pub fn entropy(rho: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            value: von_neumann_entropy(rho)?,
            method: Method::General,
        })
    }

    pub fn entropy_x(x: &XStateCoefficients) -> Self {
        Self {
            value: entropy_x(x),
            method: Method::ClosedForm,
        }
    }
}

fn clamp_eigenvalue(p: f64) -> f64 {
    if p <= EIGENVALUE_CLAMP {
        0.0
    } else {
        p
    }
}

/// `−p·log₂p` with the `0·log 0 = 0` convention.
fn entropy_term(p: f64) -> f64 {
    let p = clamp_eigenvalue(p);
    if p == 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// `(σʸ⊗σʸ)·ρ*·(σʸ⊗σʸ)`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let yy = kron(&pauli::y(), &pauli::y()).expect("4x4");
    &(&yy * &rho.conj()) * &yy
}

/// Square roots of the eigenvalues of `ρ·ρ̃`, in decreasing order.
///
/// Evaluated through the Hermitian matrix `√ρ·ρ̃·√ρ`, which shares its
/// spectrum with `ρ·ρ̃`.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let m = rho.matrix();
    let root = psd_sqrt(m)?;
    let inner = &(&root * &spin_flip(m)) * &root;
    let eig = hermitian_eigensystem(&inner.hermitian_part())?;
    let mut lambdas = [0.0; 4];
    for (l, &mu) in lambdas.iter_mut().zip(eig.values.iter().rev()) {
        *l = clamp_eigenvalue(mu).sqrt();
    }
    Ok(lambdas)
}

pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// `2·max(0, |f| − √(a·d))`.
pub fn concurrence_x(x: &XStateCoefficients) -> f64 {
    let ad = (x.a * x.d).max(0.0);
    (2.0 * (x.f.norm() - ad.sqrt())).clamp(0.0, 1.0)
}

/// `−Tr(ρ log₂ ρ)` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = hermitian_eigensystem(rho.matrix())?;
    Ok(eig
        .values
        .iter()
        .map(|&p| entropy_term(p))
        .sum::<f64>()
        .max(0.0))
}

/// Eigenvalues `β±` of the inner `{|10⟩, |01⟩}` block.
pub fn beta_pm(x: &XStateCoefficients) -> (f64, f64) {
    let disc = ((x.b - x.c).powi(2) + 4.0 * x.f.norm_sqr()).sqrt();
    ((x.b + x.c + disc) / 2.0, (x.b + x.c - disc) / 2.0)
}

pub fn entropy_x(x: &XStateCoefficients) -> f64 {
    let (plus, minus) = beta_pm(x);
    (entropy_term(x.a) + entropy_term(x.d) + entropy_term(plus) + entropy_term(minus)).max(0.0)
}
