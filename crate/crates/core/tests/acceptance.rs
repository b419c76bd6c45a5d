//! Acceptance criteria. Every test prints one `criterion N: PASS|FAIL` line
//! with the measured quantity, then asserts it.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rydberg_ring::disorder::{
    absorption_profile, covariance_theory, fit_red_wing, sample_covariance, sample_occupations, AbsorptionProfile,
    BinSpec, QuenchEnsemble,
};
use rydberg_ring::dynamics::{resonance_frequency, rf_spectroscopy, rwa_rabi_period, RabiTrace, RfDrive, StepControl};
use rydberg_ring::fermion::validate_against_ed;
use rydberg_ring::flow::{spectral_flow, symmetric_gap, DetuningPath};
use rydberg_ring::io::{parse_config, run, write_table};
use rydberg_ring::spin::frame_identity_residual;
use rydberg_ring::symmetry::{canonical_representative, symmetric_sector};
use rydberg_ring::{StateVector, SystemParams};

fn report(n: u32, pass: bool, detail: String, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} {detail} ({:.2} s)", elapsed.as_secs_f64());
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed < Duration::from_secs(secs)
}

#[test]
fn criterion_01_frame_identity() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let l = 2 + i % 5;
        let occ: Vec<u32> = (0..l).map(|_| rng.random_range(1..6)).collect();
        let p = SystemParams::new(
            l,
            rng.random_range(0.1..3.0),
            rng.random_range(0.0..5.0),
            rng.random_range(-3.0..3.0),
            occ,
        )
        .unwrap();
        worst = worst.max(frame_identity_residual(&p).unwrap());
    }
    let el = t0.elapsed();
    let pass = worst < 1e-12 && el < Duration::from_secs(1);
    report(
        1,
        pass,
        format!("max residual {worst:.2e} over 20 parameter sets (< 1e-12)"),
        el,
    );
    assert!(pass);
}

#[test]
fn criterion_02_fermion_oracle() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for l in [4, 6, 8] {
        for omega in [5.0, 10.0] {
            let p = SystemParams::clean(l, 1.0, omega, 0.0).unwrap();
            worst = worst.max(validate_against_ed(&p).map_or(f64::INFINITY, |r| r.max_deviation));
        }
    }
    let el = t0.elapsed();
    let pass = worst < 1e-9 && within(el, 10);
    report(2, pass, format!("max spectral deviation {worst:.2e} (< 1e-9)"), el);
    assert!(pass);
}

#[test]
fn criterion_03_symmetric_rank() {
    let t0 = Instant::now();
    let mut got = Vec::new();
    let mut pass = true;
    for (l, want) in [(2, 3), (3, 4), (10, 78)] {
        let rank = symmetric_sector(l).unwrap().rank();
        let mut reps: Vec<usize> = (0..1usize << l).map(|i| canonical_representative(i, l)).collect();
        reps.sort_unstable();
        reps.dedup();
        pass &= rank == want && reps.len() == want;
        got.push(format!("L={l}: {rank} (orbits {})", reps.len()));
    }
    let el = t0.elapsed();
    pass &= within(el, 5);
    report(3, pass, got.join(", "), el);
    assert!(pass);
}

#[test]
fn criterion_04_gap_law() {
    let t0 = Instant::now();
    let p = SystemParams::clean(10, 1.0, 10.0, 0.0).unwrap();
    let gap = symmetric_gap(&p, &symmetric_sector(10).unwrap()).unwrap();
    let want = resonance_frequency(&p).unwrap();
    let el = t0.elapsed();
    let pass = (gap - want).abs() <= 0.15 && within(el, 30);
    report(4, pass, format!("gap {gap:.5} vs 2Ω+β/2 = {want} (± 0.15)"), el);
    assert!(pass);
}

#[test]
fn criterion_05_spectral_flow() {
    let t0 = Instant::now();
    let sector = symmetric_sector(10).unwrap();
    let grid: Vec<f64> = (0..=200).map(|i| 10.0 * f64::from(i) / 200.0).collect();
    let flow = |d0: f64| {
        let base = SystemParams::clean(10, 1.0, 0.0, d0).unwrap();
        spectral_flow(&base, &grid, &sector, &DetuningPath::Fixed(d0)).unwrap()
    };
    // |Δ₀| = 1 makes |0⟩ exactly degenerate with the all-Rydberg state at Ω = 0
    let positive = flow(0.7);
    let negative = flow(-0.7);
    let stays = positive.vacuum_stays_ground();
    let crossings = negative.vacuum_avoided_crossings(0.2);
    let min_gap = negative.vacuum_min_gap();
    let el = t0.elapsed();
    let pass = stays && crossings >= 1 && min_gap < 0.2 && within(el, 120);
    report(
        5,
        pass,
        format!("Δ₀=+0.7: |0⟩ stays ground = {stays}; Δ₀=−0.7: {crossings} avoided crossings, min gap {min_gap:.4}"),
        el,
    );
    assert!(pass);
}

/// The criterion-6 drive: L=8, Ω=10β, Δ_osc=0.2β at ω_L, starting from |G⟩.
fn rabi_run() -> &'static (RabiTrace, f64, Duration) {
    static RUN: OnceLock<(RabiTrace, f64, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let t0 = Instant::now();
        let p = SystemParams::clean(8, 1.0, 10.0, 0.0).unwrap();
        let amplitude = 0.2;
        let target = rwa_rabi_period(amplitude, 8);
        let drive = RfDrive {
            amplitude,
            omega: resonance_frequency(&p).unwrap(),
            duration: 1.5 * target,
            phase: 0.0,
        };
        let trace = rf_spectroscopy(
            &StateVector::fermion_vacuum(8),
            &p,
            &drive,
            3000,
            &StepControl::default(),
        )
        .unwrap();
        (trace, target, t0.elapsed())
    })
}

#[test]
fn criterion_06_rabi_flop() {
    let (trace, target, el) = rabi_run();
    let period = trace.period.unwrap_or(f64::NAN);
    let rel = (period - target).abs() / target;
    let pass = trace.peak >= 0.9 && rel <= 0.1 && within(*el, 300);
    report(
        6,
        pass,
        format!(
            "peak P₁ {:.4} (≥ 0.9), period {period:.3} vs π/(Δ_osc√L/4) = {target:.3} (rel. dev. {rel:.3}, ≤ 0.1)",
            trace.peak
        ),
        *el,
    );
    assert!(pass);
}

#[test]
fn criterion_07_selection_rule() {
    let (trace, _, el) = rabi_run();
    let outside = trace.max_outside_symmetric;
    let pass = outside < 1e-6;
    report(
        7,
        pass,
        format!("max population outside the symmetric sector {outside:.2e} (< 1e-6)"),
        *el,
    );
    assert!(pass);
}

#[test]
fn criterion_08_disorder_covariance() {
    let t0 = Instant::now();
    let (l, n0, omega) = (50, 20u32, 10.0);
    let e = QuenchEnsemble::with_mean_occupation(l, n0, 10_000, 8).unwrap();
    let rs = sample_occupations(&e, omega).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut worst: f64 = 0.0;
    let mut pairs = Vec::new();
    for _ in 0..10 {
        let (k, m) = (rng.random_range(1..=l), rng.random_range(1..=l));
        let (cov, se) = sample_covariance(&rs, k, m);
        let z = (cov - covariance_theory(omega, f64::from(n0), l, k, m)).abs() / se;
        worst = worst.max(z);
        pairs.push(format!("({k},{m})"));
    }
    let el = t0.elapsed();
    let pass = worst <= 3.0 && within(el, 30);
    report(
        8,
        pass,
        format!("max |Δ|/SE {worst:.2} (≤ 3) over pairs {}", pairs.join(" ")),
        el,
    );
    assert!(pass);
}

fn figure_profile(n0: u32, seed: u64) -> AbsorptionProfile {
    let e = QuenchEnsemble::with_mean_occupation(50, n0, 1000, seed).unwrap();
    absorption_profile(&e, 10.0, 1.0, &BinSpec::default()).unwrap()
}

#[test]
fn criterion_09_absorption_profiles() {
    let t0 = Instant::now();
    let strong = figure_profile(5, 9);
    let weak = figure_profile(50, 9);
    let el = t0.elapsed();
    let wl = strong.omega_l;
    let wider = strong.fwhm() > weak.fwhm();
    let redder = strong.red_weight_fraction() > weak.red_weight_fraction();
    let centred = (strong.peak_position() - wl).abs() <= 0.2 && (weak.peak_position() - wl).abs() <= 0.2;
    let pass = wider && redder && centred && within(el, 120);
    report(
        9,
        pass,
        format!(
            "N₀=5: FWHM {:.3}, red {:.3}, peak {:.3}; N₀=50: FWHM {:.3}, red {:.3}, peak {:.3}; ω_L = {wl}",
            strong.fwhm(),
            strong.red_weight_fraction(),
            strong.peak_position(),
            weak.fwhm(),
            weak.red_weight_fraction(),
            weak.peak_position(),
        ),
        el,
    );
    assert!(pass);
}

#[test]
fn criterion_10_red_wing() {
    let t0 = Instant::now();
    let p = figure_profile(20, 10);
    let fit = fit_red_wing(&p, 0.5, 2.0).unwrap();
    let el = t0.elapsed();
    let dev = fit.max_relative_deviation;
    let pass = dev <= 0.25 && within(el, 120);
    report(
        10,
        pass,
        format!(
            "max pointwise |model − sim|/sim {dev:.3} over {} bins (≤ 0.25)",
            fit.omega.len()
        ),
        el,
    );
    assert!(pass);
}

#[test]
fn criterion_11_determinism() {
    let t0 = Instant::now();
    let text = r#"{"experiment":"absorption","units":"beta","L":50,"omega":10,"seed":11,
                   "ensemble":{"mean_occupation":20,"realizations":200}}"#;
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for i in 0..2 {
        let config = parse_config(text).unwrap();
        let path = dir.path().join(format!("run{i}.csv"));
        write_table(&run(&config).unwrap(), &path).unwrap();
        files.push(std::fs::read(&path).unwrap());
    }
    let el = t0.elapsed();
    let pass = files[0] == files[1] && !files[0].is_empty();
    report(
        11,
        pass,
        format!(
            "two runs, {} bytes each, identical = {}",
            files[0].len(),
            files[0] == files[1]
        ),
        el,
    );
    assert!(pass);
}
