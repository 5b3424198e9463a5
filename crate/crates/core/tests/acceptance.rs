//! Acceptance criteria 1-11. Each test prints one `PASS`/`FAIL` line before
//! asserting, so `cargo test --test acceptance -- --nocapture` gives a report.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::{Duration, Instant};

use dephasing_core::dynamics::{fixed_point_projection, propagate_rk4, ChannelParams, Liouvillian};
use dephasing_core::eraser::{
    average_concurrence, closed_form_average_concurrence, evolve_blocks_with, project_qubit3,
    stationary_pattern, GhzStationaryCoefficients, MeasurementBasis, Outcome,
};
use dephasing_core::linalg::{hermitian_eigensystem, ComplexMatrix};
use dephasing_core::measures::{concurrence, concurrence_x, entropy_x, von_neumann_entropy};
use dephasing_core::sampling::{random_density, random_x_state};
use dephasing_core::states::{
    as_x_state, bell_state, ghz_blocks, werner_state, BellKind, ConditionalBlocks, DensityMatrix,
    StateDescriptor, IDX_00, IDX_01, IDX_10, IDX_11,
};
use dephasing_core::sweep::{sweep_stationary, SweepSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OMEGA_RATIO: f64 = 41.25;
const GRID_POINTS: usize = 401;
const GRID_MAX: f64 = 2.0;

// e^{-2γt} at γt = 0.5, 1, 5.
const PSI_DECAY: [(f64, f64); 3] = [
    (0.5, 0.367_879_441_171_442_3),
    (1.0, 0.135_335_283_236_612_7),
    (5.0, 4.539_992_976_248_485e-5),
];
// -0.85 log2 0.85 - 3 (0.05 log2 0.05)
const WERNER_08_ENTROPY: f64 = 0.847_584_679_824_573_9;

/// Worst trace and eigenvalue defects over every propagated state.
#[derive(Debug)]
struct Conservation {
    max_trace_error: f64,
    min_eigenvalue: f64,
    states: usize,
}

impl Conservation {
    fn new() -> Self {
        Self {
            max_trace_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            states: 0,
        }
    }

    fn see(&mut self, m: &ComplexMatrix) {
        self.max_trace_error = self.max_trace_error.max((m.trace() - 1.0).norm());
        let eig = hermitian_eigensystem(&m.hermitian_part()).expect("eigensolver converges");
        self.min_eigenvalue = self.min_eigenvalue.min(eig.values[0]);
        self.states += 1;
    }

    fn see_blocks(&mut self, blocks: &ConditionalBlocks) {
        self.see(&blocks.assemble());
    }
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn report(label: &str, verdict: &Verdict, elapsed: Duration) {
    println!(
        "{} {label} ({:.2}s): {}",
        if verdict.passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        verdict.detail
    );
}

fn check(label: &str, limit: Option<Duration>, run: impl FnOnce(&mut Conservation) -> Verdict) {
    let start = Instant::now();
    let mut verdict = run(&mut Conservation::new());
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            verdict.passed = false;
            verdict
                .detail
                .push_str(&format!("; exceeded {:.0}s budget", limit.as_secs_f64()));
        }
    }
    report(label, &verdict, elapsed);
    assert!(verdict.passed, "{label}: {}", verdict.detail);
}

fn unit() -> ChannelParams {
    ChannelParams::new(1.0).unwrap()
}

fn grid() -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|k| GRID_MAX * k as f64 / (GRID_POINTS - 1) as f64)
        .collect()
}

/// Interior strict local extrema with plateaus counted once at their midpoint.
fn extrema(v: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let (mut maxima, mut minima) = (Vec::new(), Vec::new());
    let mut i = 1;
    while i + 1 < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        if j + 1 < v.len() {
            if v[i - 1] < v[i] && v[j + 1] < v[i] {
                maxima.push((i + j) / 2);
            } else if v[i - 1] > v[i] && v[j + 1] > v[i] {
                minima.push((i + j) / 2);
            }
        }
        i = j + 1;
    }
    (maxima, minima)
}

/// Stationary concurrence and entropy after a pulse of scaled length `gamma_t`.
fn stationary_point(
    generator: &Liouvillian,
    rho0: &DensityMatrix,
    gamma_t: f64,
    ledger: &mut Conservation,
) -> (f64, f64) {
    let driven = generator.propagate(rho0, gamma_t).unwrap();
    ledger.see(driven.matrix());
    let pinched = DensityMatrix::new(fixed_point_projection(driven.matrix())).unwrap();
    ledger.see(pinched.matrix());
    let x = as_x_state(&pinched, 1e-12).unwrap();
    (concurrence_x(&x), entropy_x(&x))
}

fn stationary_curve(state: StateDescriptor, ledger: &mut Conservation) -> (Vec<f64>, Vec<f64>) {
    let generator = Liouvillian::build(OMEGA_RATIO, unit()).unwrap();
    let rho0 = state.two_qubit().unwrap().unwrap();
    grid()
        .into_iter()
        .map(|gt| stationary_point(&generator, &rho0, gt, ledger))
        .unzip()
}

/// Driven then pinched GHZ blocks, with the six-entry pattern left unchecked.
fn ghz_stationary(omega_ratio: f64, gamma_t: f64, ledger: &mut Conservation) -> ConditionalBlocks {
    let generator = Liouvillian::build(omega_ratio, unit()).unwrap();
    let driven = evolve_blocks_with(&generator, &ghz_blocks(), gamma_t).unwrap();
    ledger.see_blocks(&driven);
    let blocks = driven.try_map(|m| Ok(fixed_point_projection(m))).unwrap();
    ledger.see_blocks(&blocks);
    blocks
}

fn zeta_of(blocks: &ConditionalBlocks) -> GhzStationaryCoefficients {
    GhzStationaryCoefficients::new(
        blocks.rho_hh[(IDX_11, IDX_11)].re,
        blocks.rho_vv[(IDX_10, IDX_10)].re,
        blocks.rho_hh[(IDX_01, IDX_01)].re,
        blocks.rho_vv[(IDX_00, IDX_00)].re,
        blocks.rho_hv[(IDX_01, IDX_10)],
    )
    .unwrap()
}

fn observe_projections(
    blocks: &ConditionalBlocks,
    basis: MeasurementBasis,
    ledger: &mut Conservation,
) {
    for outcome in Outcome::BOTH {
        if let Ok((_, rho)) = project_qubit3(blocks, basis, outcome) {
            ledger.see(rho.matrix());
        }
    }
}

fn robust_fragile(ledger: &mut Conservation) -> Verdict {
    let generator = Liouvillian::build(0.0, unit()).unwrap();
    let mut worst: f64 = 0.0;
    for (gt, decay) in PSI_DECAY {
        for kind in BellKind::ALL {
            let rho = generator.propagate(&bell_state(kind), gt).unwrap();
            ledger.see(rho.matrix());
            let expected = match kind {
                BellKind::PhiPlus | BellKind::PhiMinus => 1.0,
                BellKind::PsiPlus | BellKind::PsiMinus => decay,
            };
            worst = worst.max((concurrence(&rho).unwrap() - expected).abs());
        }
    }
    Verdict {
        passed: worst <= 1e-9,
        detail: format!("max |C - expected| = {worst:.3e} (tol 1e-9)"),
    }
}

fn x_state_closed_forms(_: &mut Conservation) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let (mut dc, mut ds): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let x = random_x_state(&mut rng);
        let rho = x.to_density().unwrap();
        dc = dc.max((concurrence_x(&x) - concurrence(&rho).unwrap()).abs());
        ds = ds.max((entropy_x(&x) - von_neumann_entropy(&rho).unwrap()).abs());
    }
    Verdict {
        passed: dc <= 1e-9 && ds <= 1e-9,
        detail: format!("10000 X-states: max ΔC = {dc:.3e}, max ΔS = {ds:.3e} (tol 1e-9)"),
    }
}

fn propagator_oracle(ledger: &mut Conservation) -> Verdict {
    let params = unit();
    let generator = Liouvillian::build(OMEGA_RATIO, params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rho0 = random_density(&mut rng);
        for t in [0.1, 0.5, 2.0] {
            let exact = generator.propagate(&rho0, t).unwrap();
            let rk4 = propagate_rk4(&rho0, OMEGA_RATIO, params, t, 1e-4).unwrap();
            ledger.see(exact.matrix());
            ledger.see(rk4.matrix());
            worst = worst.max(exact.matrix().max_abs_diff(rk4.matrix()));
        }
    }
    Verdict {
        passed: worst <= 1e-6,
        detail: format!("20 states x 3 times: max entry difference {worst:.3e} (tol 1e-6)"),
    }
}

fn phi_minus_intercept(ledger: &mut Conservation) -> Verdict {
    let (c, s) = stationary_curve(StateDescriptor::Bell(BellKind::PhiMinus), ledger);
    let intercept = (c[0] - 1.0).abs().max(s[0].abs());
    let spread = |v: &[f64]| {
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - v.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let (cmax, cmin) = extrema(&c);
    let (smax, smin) = extrema(&s);
    let (nc, ns) = (cmax.len() + cmin.len(), smax.len() + smin.len());
    Verdict {
        passed: intercept <= 1e-9 && spread(&c) > 1e-6 && spread(&s) > 1e-6 && nc >= 2 && ns >= 2,
        detail: format!(
            "intercept error {intercept:.3e} (tol 1e-9); ranges C {:.4}, S {:.4}; interior extrema C {nc}, S {ns}",
            spread(&c),
            spread(&s)
        ),
    }
}

fn psi_plus_intercept(ledger: &mut Conservation) -> Verdict {
    let generator = Liouvillian::build(OMEGA_RATIO, unit()).unwrap();
    let (c, _) = stationary_point(&generator, &bell_state(BellKind::PsiPlus), 0.0, ledger);
    Verdict {
        passed: c.abs() <= 1e-9,
        detail: format!("C_s(0) = {c:.3e} (tol 1e-9)"),
    }
}

fn extrema_correspondence(ledger: &mut Conservation) -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for state in [
        StateDescriptor::Bell(BellKind::PhiMinus),
        StateDescriptor::Werner(0.8),
        StateDescriptor::Bell(BellKind::PsiPlus),
    ] {
        let (c, s) = stationary_curve(state, ledger);
        let library = sweep_stationary(&SweepSpec::stationary(state, OMEGA_RATIO, grid())).unwrap();
        let drift = library
            .iter()
            .zip(c.iter().zip(&s))
            .map(|(r, (c, s))| {
                (r.concurrence.unwrap() - c)
                    .abs()
                    .max((r.entropy.unwrap() - s).abs())
            })
            .fold(0.0, f64::max);
        let (maxima, _) = extrema(&c);
        let (_, minima) = extrema(&s);
        let unmatched = maxima
            .iter()
            .filter(|&&i| !minima.iter().any(|&j| i.abs_diff(j) <= 2))
            .count();
        passed &= unmatched == 0 && drift <= 1e-12;
        parts.push(format!(
            "{state}: {}/{} maxima matched",
            maxima.len() - unmatched,
            maxima.len()
        ));
    }
    Verdict {
        passed,
        detail: parts.join("; "),
    }
}

fn werner_baseline(ledger: &mut Conservation) -> Verdict {
    let generator = Liouvillian::build(OMEGA_RATIO, unit()).unwrap();
    let (c, s) = stationary_point(&generator, &werner_state(0.8).unwrap(), 0.0, ledger);
    let (dc, ds) = ((c - 0.7).abs(), (s - WERNER_08_ENTROPY).abs());
    Verdict {
        passed: dc <= 1e-9 && ds <= 1e-9,
        detail: format!("C_s = {c:.12}, S = {s:.12}; errors {dc:.3e}, {ds:.3e} (tol 1e-9)"),
    }
}

fn ghz_structure(ledger: &mut Conservation) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let allowed = stationary_pattern();
    let (mut outside, mut norm): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let gamma_t = rng.gen_range(0.0..3.0);
        let ratio = rng.gen_range(0.0..100.0);
        let blocks = ghz_stationary(ratio, gamma_t, ledger);
        let full = blocks.assemble();
        for i in 0..8 {
            for j in 0..8 {
                if !allowed.contains(&(i, j)) {
                    outside = outside.max(full[(i, j)].norm());
                }
            }
        }
        let z = zeta_of(&blocks);
        norm = norm.max((z.zeta_a + z.zeta_b + z.zeta_c + z.zeta_d - 1.0).abs());
    }
    Verdict {
        passed: outside < 1e-9 && norm <= 1e-10,
        detail: format!("10 pairs: max entry outside pattern {outside:.3e} (tol 1e-9); |Σζ - 1| {norm:.3e} (tol 1e-10)"),
    }
}

fn eraser_closed_form(ledger: &mut Conservation) -> Verdict {
    let thetas: Vec<f64> = (0..21).map(|k| PI * k as f64 / 20.0).collect();
    let phis: Vec<f64> = (0..21).map(|k| TAU * k as f64 / 21.0).collect();
    let (mut closed, mut spread, mut poles): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for gamma_t in [0.1, 0.5, 1.0, 1.5, 2.0] {
        let blocks = ghz_stationary(OMEGA_RATIO, gamma_t, ledger);
        let z = zeta_of(&blocks);
        for &theta in &thetas {
            let expected =
                2.0 * theta.sin().abs() * (z.zeta_f.norm() - (z.zeta_a * z.zeta_d).sqrt()).max(0.0);
            let mut values = Vec::new();
            for &phi in &phis {
                let basis = MeasurementBasis::new(theta, phi).unwrap();
                observe_projections(&blocks, basis, ledger);
                let v = average_concurrence(&blocks, basis).unwrap();
                closed = closed.max((v - expected).abs());
                values.push(v);
            }
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            spread = spread.max(hi - lo);
            if theta == 0.0 || theta == PI {
                poles = poles.max(hi.abs()).max(lo.abs());
            }
            closed = closed.max((closed_form_average_concurrence(&z, theta) - expected).abs());
        }
    }
    Verdict {
        passed: closed <= 1e-9 && spread <= 1e-9 && poles <= 1e-9,
        detail: format!(
            "5 γT x 21 θ x 21 φ: closed form {closed:.3e}, φ spread {spread:.3e}, θ∈{{0,π}} {poles:.3e} (tol 1e-9)"
        ),
    }
}

fn remote_control(ledger: &mut Conservation) -> Verdict {
    let basis = MeasurementBasis::new(FRAC_PI_2, 0.0).unwrap();
    let (mut traced, mut best, mut best_at): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for gamma_t in grid() {
        let blocks = ghz_stationary(OMEGA_RATIO, gamma_t, ledger);
        let reduced = blocks.trace_out_qubit3().unwrap();
        ledger.see(reduced.matrix());
        traced = traced.max(concurrence(&reduced).unwrap());
        observe_projections(&blocks, basis, ledger);
        let c = average_concurrence(&blocks, basis).unwrap();
        if c > best {
            (best, best_at) = (c, gamma_t);
        }
    }
    Verdict {
        passed: traced <= 1e-9 && best > 0.1,
        detail: format!("traced-out C max {traced:.3e} (tol 1e-9); max C_ave(θ=π/2) = {best:.4} at γT = {best_at} (need > 0.1)"),
    }
}

#[test]
fn criterion_01_robust_fragile() {
    check(
        "1 robust/fragile dichotomy",
        Some(Duration::from_secs(1)),
        robust_fragile,
    );
}

#[test]
fn criterion_02_x_state_closed_forms() {
    check(
        "2 X-state closed forms",
        Some(Duration::from_secs(10)),
        x_state_closed_forms,
    );
}

#[test]
fn criterion_03_propagator_oracle() {
    check(
        "3 propagator vs RK4",
        Some(Duration::from_secs(30)),
        propagator_oracle,
    );
}

#[test]
fn criterion_04_phi_minus_intercept_and_oscillation() {
    check(
        "4 phi- intercept and oscillation",
        None,
        phi_minus_intercept,
    );
}

#[test]
fn criterion_05_psi_plus_intercept() {
    check("5 psi+ intercept", None, psi_plus_intercept);
}

#[test]
fn criterion_06_extrema_correspondence() {
    check(
        "6 extrema correspondence",
        Some(Duration::from_secs(60)),
        extrema_correspondence,
    );
}

#[test]
fn criterion_07_werner_baseline() {
    check("7 Werner baseline", None, werner_baseline);
}

#[test]
fn criterion_08_ghz_structure() {
    check("8 GHZ stationary structure", None, ghz_structure);
}

#[test]
fn criterion_09_eraser_closed_form() {
    check("9 eraser closed form", None, eraser_closed_form);
}

#[test]
fn criterion_10_remote_control() {
    check("10 remote control", None, remote_control);
}

#[test]
fn criterion_11_conservation() {
    let start = Instant::now();
    let mut ledger = Conservation::new();
    let runs: [fn(&mut Conservation) -> Verdict; 10] = [
        robust_fragile,
        x_state_closed_forms,
        propagator_oracle,
        phi_minus_intercept,
        psi_plus_intercept,
        extrema_correspondence,
        werner_baseline,
        ghz_structure,
        eraser_closed_form,
        remote_control,
    ];
    for run in runs {
        run(&mut ledger);
    }
    let verdict = Verdict {
        passed: ledger.max_trace_error <= 1e-12 && ledger.min_eigenvalue >= -1e-9,
        detail: format!(
            "{} states: max |Tr - 1| {:.3e} (tol 1e-12), min eigenvalue {:.3e} (floor -1e-9)",
            ledger.states, ledger.max_trace_error, ledger.min_eigenvalue
        ),
    };
    report("11 conservation", &verdict, start.elapsed());
    assert!(verdict.passed, "{}", verdict.detail);
}
