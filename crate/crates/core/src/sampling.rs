//! Random states for property checks.

use rand::Rng;

use crate::linalg::{ComplexMatrix, C64};
use crate::states::{DensityMatrix, XStateCoefficients};

fn gaussian_pair(rng: &mut impl Rng) -> C64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u.ln()).sqrt();
    C64::from_polar(r, std::f64::consts::TAU * v)
}

/// Ginibre-distributed two-qubit density matrix `A·A† / Tr(A·A†)`.
pub fn random_density(rng: &mut impl Rng) -> DensityMatrix {
    let a = ComplexMatrix::from_fn(4, |_, _| gaussian_pair(rng));
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(C64::new(1.0 / tr, 0.0)).hermitian_part())
        .expect("Ginibre samples are valid states")
}

/// Uniform populations on the simplex and `|f| ≤ √(b·c)` with a random phase.
pub fn random_x_state(rng: &mut impl Rng) -> XStateCoefficients {
    let w: [f64; 4] = std::array::from_fn(|_| -rng.gen_range(f64::EPSILON..1.0f64).ln());
    let total: f64 = w.iter().sum();
    let [a, b, c, _] = w.map(|x| x / total);
    let d = 1.0 - a - b - c;
    let magnitude = (b * c).sqrt() * rng.gen_range(0.0..1.0);
    let f = C64::from_polar(magnitude, rng.gen_range(0.0..std::f64::consts::TAU));
    XStateCoefficients::new(a, b, c, d.max(0.0), f).expect("sampled inside the valid region")
}

/// Haar-random single-qubit unitary.
pub fn random_unitary_2(rng: &mut impl Rng) -> ComplexMatrix {
    let (a, b) = (gaussian_pair(rng), gaussian_pair(rng));
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let phase = C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    ComplexMatrix::new(2, 2, vec![a, -b.conj() * phase, b, a.conj() * phase]).expect("2x2")
}

/// Haar-random two-qubit unitary from Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary_4(rng: &mut impl Rng) -> ComplexMatrix {
    let mut cols: Vec<[C64; 4]> = Vec::with_capacity(4);
    while cols.len() < 4 {
        let mut v: [C64; 4] = std::array::from_fn(|_| gaussian_pair(rng));
        for u in &cols {
            let overlap: C64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= overlap * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.map(|z| z / norm));
        }
    }
    ComplexMatrix::from_fn(4, |i, j| cols[j][i])
}
