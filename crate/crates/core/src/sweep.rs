//! Grid sweeps over the scaled pulse length `γT` (and the measurement angle
//! `θ` for the eraser), plus the local-extrema matching between the
//! concurrence and entropy curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ChannelParams, Liouvillian};
use crate::eraser::{average_concurrence, stationary_ghz_blocks_with, MeasurementBasis};
use crate::error::{Error, Result};
use crate::measures::{concurrence_x, entropy_x};
use crate::states::StateDescriptor;

/// Default drive strength, in units of `γ`.
pub const DEFAULT_OMEGA_RATIO: f64 = 41.25;
pub const DEFAULT_GAMMA_T_MAX: f64 = 2.0;
pub const DEFAULT_POINTS: usize = 401;
pub const DEFAULT_WINDOW: usize = 2;

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|k| {
                    if k == n - 1 {
                        end
                    } else {
                        start + step * k as f64
                    }
                })
                .collect()
        }
    }
}

pub fn default_gamma_t_grid() -> Vec<f64> {
    linspace(0.0, DEFAULT_GAMMA_T_MAX, DEFAULT_POINTS)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub omega_ratio: f64,
    pub gamma: f64,
    pub initial: StateDescriptor,
    pub gamma_t_grid: Vec<f64>,
    pub theta_grid: Option<Vec<f64>>,
    /// Azimuth of the qubit-3 measurement basis for eraser sweeps.
    pub phi: f64,
}

impl SweepSpec {
    pub fn stationary(initial: StateDescriptor, omega_ratio: f64, gamma_t_grid: Vec<f64>) -> Self {
        Self {
            omega_ratio,
            gamma: 1.0,
            initial,
            gamma_t_grid,
            theta_grid: None,
            phi: 0.0,
        }
    }

    pub fn eraser(omega_ratio: f64, gamma_t_grid: Vec<f64>, theta_grid: Vec<f64>) -> Self {
        Self {
            omega_ratio,
            gamma: 1.0,
            initial: StateDescriptor::Ghz,
            gamma_t_grid,
            theta_grid: Some(theta_grid),
            phi: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_ratio.is_finite() && self.omega_ratio >= 0.0) {
            return Err(Error::InvalidSweep(format!(
                "omega ratio {} must be >= 0",
                self.omega_ratio
            )));
        }
        ChannelParams::new(self.gamma)?;
        check_grid("gamma_t", &self.gamma_t_grid)?;
        if self.gamma_t_grid[0] < 0.0 {
            return Err(Error::InvalidSweep(
                "gamma_t grid must be non-negative".into(),
            ));
        }
        if let Some(thetas) = &self.theta_grid {
            check_grid("theta", thetas)?;
        }
        Ok(())
    }

    fn generator(&self) -> Result<Liouvillian> {
        let params = ChannelParams::new(self.gamma)?;
        Liouvillian::build(self.omega_ratio * self.gamma, params)
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidSweep(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSweep(format!(
            "{name} grid has non-finite values"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSweep(format!(
            "{name} grid is not strictly ascending"
        )));
    }
    Ok(())
}

/// One grid point. Stationary sweeps fill `concurrence` and `entropy`,
/// eraser sweeps fill `theta` and `c_ave`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub gamma_t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concurrence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_ave: Option<f64>,
}

impl SweepRecord {
    pub fn stationary(gamma_t: f64, concurrence: f64, entropy: f64) -> Self {
        Self {
            gamma_t,
            theta: None,
            concurrence: Some(concurrence),
            entropy: Some(entropy),
            c_ave: None,
        }
    }

    pub fn eraser(gamma_t: f64, theta: f64, c_ave: f64) -> Self {
        Self {
            gamma_t,
            theta: Some(theta),
            concurrence: None,
            entropy: None,
            c_ave: Some(c_ave),
        }
    }
}

fn collect<T, F>(items: Vec<T>, parallel: bool, f: F) -> Result<Vec<SweepRecord>>
where
    T: Send + Sync,
    F: Fn(&T) -> Result<SweepRecord> + Send + Sync,
{
    if parallel {
        items.par_iter().map(&f).collect()
    } else {
        items.iter().map(&f).collect()
    }
}

fn run_stationary(spec: &SweepSpec, parallel: bool) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let rho0 = spec.initial.two_qubit()?.ok_or_else(|| {
        Error::InvalidSweep("stationary sweeps need a two-qubit initial state".into())
    })?;
    let generator = spec.generator()?;
    let gamma = spec.gamma;
    collect(spec.gamma_t_grid.clone(), parallel, |&gt| {
        let x = generator.stationary_state(&rho0, gt / gamma)?;
        Ok(SweepRecord::stationary(
            gt,
            concurrence_x(&x),
            entropy_x(&x),
        ))
    })
}

/// `(C_s, S)` of the stationary state for every `γT`, in grid order.
pub fn sweep_stationary(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    run_stationary(spec, true)
}

pub fn sweep_stationary_serial(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    run_stationary(spec, false)
}

fn run_eraser(spec: &SweepSpec, parallel: bool) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    if spec.initial != StateDescriptor::Ghz {
        return Err(Error::InvalidSweep(
            "eraser sweeps start from the GHZ state".into(),
        ));
    }
    let thetas = spec
        .theta_grid
        .clone()
        .ok_or_else(|| Error::InvalidSweep("eraser sweeps need a theta grid".into()))?;
    let generator = spec.generator()?;
    let gamma = spec.gamma;
    let phi = spec.phi;
    let rows: Vec<Vec<SweepRecord>> = {
        let per_gamma_t = |&gt: &f64| -> Result<Vec<SweepRecord>> {
            let blocks = stationary_ghz_blocks_with(&generator, gt / gamma)?;
            thetas
                .iter()
                .map(|&theta| {
                    let basis = MeasurementBasis::new(theta, phi)?;
                    Ok(SweepRecord::eraser(
                        gt,
                        theta,
                        average_concurrence(&blocks, basis)?,
                    ))
                })
                .collect()
        };
        if parallel {
            spec.gamma_t_grid
                .par_iter()
                .map(per_gamma_t)
                .collect::<Result<_>>()?
        } else {
            spec.gamma_t_grid
                .iter()
                .map(per_gamma_t)
                .collect::<Result<_>>()?
        }
    };
    Ok(rows.into_iter().flatten().collect())
}

/// Average concurrence after the qubit-3 measurement on the `(γT, θ)` grid,
/// `γT` outer and `θ` inner.
pub fn sweep_eraser(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    run_eraser(spec, true)
}

pub fn sweep_eraser_serial(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    run_eraser(spec, false)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Extrema {
    pub maxima: Vec<usize>,
    pub minima: Vec<usize>,
}

/// Interior local extrema. A run of equal values counts once, at its middle
/// index, when both neighbours lie on the same side; runs touching either
/// end of the list are ignored.
pub fn local_extrema(values: &[f64]) -> Result<Extrema> {
    if values.len() < 3 {
        return Err(Error::TooShort {
            len: values.len(),
            min: 3,
        });
    }
    let mut out = Extrema::default();
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && values[end + 1] == values[start] {
            end += 1;
        }
        if start > 0 && end < n - 1 {
            let (left, right, v) = (values[start - 1], values[end + 1], values[start]);
            let mid = (start + end) / 2;
            if left < v && right < v {
                out.maxima.push(mid);
            } else if left > v && right > v {
                out.minima.push(mid);
            }
        }
        start = end + 1;
    }
    Ok(out)
}

/// Outcome of matching every concurrence maximum to a nearby entropy minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceReport {
    pub window: usize,
    pub concurrence_extrema: Extrema,
    pub entropy_extrema: Extrema,
    /// Each concurrence maximum with the closest entropy minimum inside the
    /// window, if any.
    pub matches: Vec<(usize, Option<usize>)>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.matches.iter().all(|(_, m)| m.is_some())
    }

    pub fn unmatched(&self) -> impl Iterator<Item = usize> + '_ {
        self.matches
            .iter()
            .filter(|(_, m)| m.is_none())
            .map(|(i, _)| *i)
    }
}

pub fn extrema_correspondence(
    records: &[SweepRecord],
    window: usize,
) -> Result<CorrespondenceReport> {
    let mut concurrence = Vec::with_capacity(records.len());
    let mut entropy = Vec::with_capacity(records.len());
    for r in records {
        match (r.concurrence, r.entropy) {
            (Some(c), Some(s)) => {
                concurrence.push(c);
                entropy.push(s);
            }
            _ => {
                return Err(Error::InvalidSweep(
                    "extrema matching needs stationary-sweep records".into(),
                ))
            }
        }
    }
    let concurrence_extrema = local_extrema(&concurrence)?;
    let entropy_extrema = local_extrema(&entropy)?;
    let matches = concurrence_extrema
        .maxima
        .iter()
        .map(|&i| {
            let nearest = entropy_extrema
                .minima
                .iter()
                .copied()
                .filter(|&j| i.abs_diff(j) <= window)
                .min_by_key(|&j| i.abs_diff(j));
            (i, nearest)
        })
        .collect();
    Ok(CorrespondenceReport {
        window,
        concurrence_extrema,
        entropy_extrema,
        matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::BellKind;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 2.0, 401);
        assert_eq!(g.len(), 401);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[400], 2.0);
        assert!((g[1] - 0.005).abs() < 1e-15);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn extrema_examples() {
        let e = local_extrema(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(e.maxima, vec![1]);
        assert!(e.minima.is_empty());
        let e = local_extrema(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(e.minima, vec![1]);
        let e = local_extrema(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(e, Extrema::default());
        assert!(matches!(
            local_extrema(&[1.0, 2.0]),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn extrema_plateaus() {
        let e = local_extrema(&[0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(e.maxima, vec![2]);
        assert_eq!(e.minima, vec![4]);
        // plateau touching the start is not an extremum
        let e = local_extrema(&[0.0, 0.0, 1.0, 0.5]).unwrap();
        assert!(e.minima.is_empty());
        assert_eq!(e.maxima, vec![2]);
        // a step is neither
        let e = local_extrema(&[0.0, 1.0, 1.0, 2.0]).unwrap();
        assert_eq!(e, Extrema::default());
    }

    #[test]
    fn correspondence_checker() {
        let flat: Vec<_> = (0..10)
            .map(|k| SweepRecord::stationary(k as f64, 0.3, 1.0))
            .collect();
        assert!(extrema_correspondence(&flat, 2).unwrap().passed());

        let grid = linspace(0.0, 4.0 * PI, 200);
        let in_phase: Vec<_> = grid
            .iter()
            .map(|&x| SweepRecord::stationary(x, x.sin(), x.sin()))
            .collect();
        let report = extrema_correspondence(&in_phase, 2).unwrap();
        assert!(!report.concurrence_extrema.maxima.is_empty());
        assert!(!report.passed());

        let anti: Vec<_> = grid
            .iter()
            .map(|&x| SweepRecord::stationary(x, x.sin(), -x.sin()))
            .collect();
        assert!(extrema_correspondence(&anti, 2).unwrap().passed());

        let eraser = vec![SweepRecord::eraser(0.0, 0.0, 0.0); 5];
        assert!(extrema_correspondence(&eraser, 2).is_err());
    }

    #[test]
    fn spec_validation() {
        let mut spec = SweepSpec::stationary(
            StateDescriptor::Bell(BellKind::PhiMinus),
            41.25,
            vec![0.0, 0.0],
        );
        assert!(spec.validate().is_err());
        spec.gamma_t_grid = vec![];
        assert!(spec.validate().is_err());
        spec.gamma_t_grid = vec![0.0, 1.0];
        spec.gamma = 0.0;
        assert!(spec.validate().is_err());
        spec.gamma = 1.0;
        spec.omega_ratio = -1.0;
        assert!(spec.validate().is_err());

        let ghz = SweepSpec::stationary(StateDescriptor::Ghz, 41.25, vec![0.0]);
        assert!(sweep_stationary(&ghz).is_err());
        let mut eraser = SweepSpec::eraser(41.25, vec![0.0], vec![0.0]);
        eraser.initial = StateDescriptor::Werner(0.5);
        assert!(sweep_eraser(&eraser).is_err());
        eraser.initial = StateDescriptor::Ghz;
        eraser.theta_grid = None;
        assert!(sweep_eraser(&eraser).is_err());
    }

    #[test]
    fn stationary_intercepts() {
        let one =
            |state| sweep_stationary(&SweepSpec::stationary(state, 41.25, vec![0.0])).unwrap()[0];
        let r = one(StateDescriptor::Bell(BellKind::PhiMinus));
        assert!((r.concurrence.unwrap() - 1.0).abs() < 1e-9 && r.entropy.unwrap().abs() < 1e-9);
        let r = one(StateDescriptor::Bell(BellKind::PsiPlus));
        assert!(r.concurrence.unwrap().abs() < 1e-9 && (r.entropy.unwrap() - 1.0).abs() < 1e-9);
        let r = one(StateDescriptor::Werner(0.8));
        let s = -0.85 * 0.85f64.log2() - 0.15 * 0.05f64.log2();
        assert!(
            (r.concurrence.unwrap() - 0.7).abs() < 1e-9 && (r.entropy.unwrap() - s).abs() < 1e-9
        );
    }

    #[test]
    fn eraser_shape_and_symmetry() {
        let thetas = linspace(0.0, PI, 9);
        let spec = SweepSpec::eraser(41.25, linspace(0.0, 1.0, 5), thetas.clone());
        let records = sweep_eraser(&spec).unwrap();
        assert_eq!(records.len(), 45);
        for (k, r) in records.iter().enumerate() {
            assert_eq!(r.theta, Some(thetas[k % 9]));
            if r.gamma_t == 0.0 || k % 9 == 0 {
                assert!(r.c_ave.unwrap().abs() < 1e-12);
            }
        }
        for row in records.chunks(9) {
            for k in 0..9 {
                assert!((row[k].c_ave.unwrap() - row[8 - k].c_ave.unwrap()).abs() < 1e-9);
            }
        }
        let r = sweep_eraser(&SweepSpec::eraser(41.25, vec![0.0], vec![FRAC_PI_2])).unwrap();
        assert!(r[0].c_ave.unwrap().abs() < 1e-12);
    }

    #[test]
    fn parallel_matches_serial() {
        let spec =
            SweepSpec::stationary(StateDescriptor::Werner(0.8), 41.25, linspace(0.0, 2.0, 41));
        assert_eq!(
            sweep_stationary(&spec).unwrap(),
            sweep_stationary_serial(&spec).unwrap()
        );
        let spec = SweepSpec::eraser(41.25, linspace(0.0, 1.0, 7), linspace(0.0, PI, 5));
        assert_eq!(
            sweep_eraser(&spec).unwrap(),
            sweep_eraser_serial(&spec).unwrap()
        );
    }
}
