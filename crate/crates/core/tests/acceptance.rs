//! Acceptance checks for the solver and study drivers.
//!
//! Runs as a plain binary (`harness = false`) so each criterion prints one
//! PASS/FAIL line in order, with its measured values and wall time. Checks
//! run one after another so the timings are not skewed by each other. The
//! process exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use logkg_core::analysis::{
    discretization_convergence_study, epsilon_convergence_study, total_convergence_study, ConvergenceTable,
    DiscretizationMode, EpsilonReference, StudyOptions,
};
use logkg_core::problems::ProblemSpec;
use logkg_core::schemes::Scheme;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    ((value - target) / target).abs() <= rel
}

fn in_band(values: &[f64], lo: f64, hi: f64) -> bool {
    values.iter().all(|v| (lo..=hi).contains(v))
}

fn fmt_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_rates(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.2}")).collect();
    format!("[{}]", parts.join(", "))
}

fn linf_rates(table: &ConvergenceTable) -> Vec<f64> {
    table.rates().iter().map(|r| r.1).collect()
}

fn total_study(scheme: Scheme, epsilon: f64) -> ConvergenceTable {
    let spec = ProblemSpec::example1();
    let mut tables =
        total_convergence_study(&spec, scheme, &[epsilon], 0.1, 0.1, 6, 1.0, &StudyOptions::default()).unwrap();
    tables.remove(0)
}

fn gausson_oracle() -> Outcome {
    let worst = gausson_residual_max(100, 1e-3);
    Outcome::new(worst <= 1e-6, format!("max |residual| = {worst:.2e} (limit 1e-6)"))
}

fn table_reproduction() -> Outcome {
    let expected = [1.63e-3, 6.76e-4, 7.43e-4, 7.68e-4, 7.75e-4];
    let efd = total_study(Scheme::Efd, 1e-3).column_linf();
    let efd_ok = efd.iter().zip(&expected).all(|(v, e)| within(*v, *e, 0.15));
    let sifd = total_study(Scheme::Sifd, 1e-3).column_linf()[0];
    let sifd_ok = within(sifd, 4.03e-3, 0.15);
    Outcome::new(
        efd_ok && sifd_ok,
        format!("EFD l∞ {} vs {}; SIFD first {sifd:.3e} vs 4.03e-3", fmt_list(&efd[..5]), fmt_list(&expected)),
    )
}

fn error_floor() -> Outcome {
    let rates = linf_rates(&total_study(Scheme::Efd, 1e-3 / 4f64.powi(4)));
    let pass = in_band(&rates[..4], 1.7, 2.2) && rates[4] < 1.0;
    Outcome::new(pass, format!("l∞ rates {}", fmt_rates(&rates)))
}

fn discretization_order() -> Outcome {
    let spec = ProblemSpec::example1();
    let opts = StudyOptions::default();
    let mut pass = true;
    let mut detail = Vec::new();
    for mode in [DiscretizationMode::TemporalSpatial, DiscretizationMode::SpatialOnly] {
        let table = discretization_convergence_study(&spec, Scheme::Efd, 1e-7, 5, mode, 1.0, &opts).unwrap();
        let last: Vec<f64> = table.rates()[2..].iter().flat_map(|r| [r.0, r.1, r.2]).collect();
        pass &= in_band(&last, 1.7, 2.2);
        detail.push(format!("{mode:?} last rates (l2, l∞, H1 ×2) {}", fmt_rates(&last)));
    }
    Outcome::new(pass, detail.join("; "))
}

fn regularization_order() -> Outcome {
    let spec = ProblemSpec::example1();
    let eps = [1e-2, 2.5e-3, 6.25e-4, 1.5625e-4];
    let table =
        epsilon_convergence_study(&spec, Scheme::Efd, &eps, 0.5, EpsilonReference::FineGrid, &StudyOptions::default())
            .unwrap();
    let (l2, linf, h1) = *table.rates().last().unwrap();
    let finals = [l2, linf, h1];
    Outcome::new(in_band(&finals, 0.8, 1.2), format!("final rates (l2, l∞, H1) {}", fmt_rates(&finals)))
}

fn stability() -> Outcome {
    let h = 2f64.powi(-3);
    let bounded = stability_probe(Scheme::Efd, 1e-3, h, None, 0.9, 1.0);
    let blowup = stability_probe(Scheme::Efd, 1e-3, h, None, 1.5, 1.0);
    let sifd = stability_probe(Scheme::Sifd, 0.8, h, Some(0.5), 1.0, 1.0);
    let below_ok = !bounded.overflowed && bounded.max_amplitude <= 2.0;
    let blowup_ok = blowup.overflowed || blowup.max_amplitude > 10.0;
    let sifd_ok = sifd.tau_limit.is_none() && !sifd.overflowed && sifd.max_amplitude <= 2.0;
    let scan: Vec<String> = [1.1, 1.5, 2.0, 3.0, 5.0, 10.0]
        .iter()
        .map(|&f| {
            let p = stability_probe(Scheme::Efd, 1e-3, h, None, f, 1.0);
            if p.overflowed {
                format!("{f}×: overflow")
            } else {
                format!("{f}×: {:.3}", p.max_amplitude)
            }
        })
        .collect();
    Outcome::new(
        below_ok && blowup_ok && sifd_ok,
        format!(
            "tau_limit = {:.4}; 0.9× max|u| = {:.3} [{}]; 1.5× max|u| = {:.3} (needs > 10) [{}]; \
             SIFD ε=0.8 τ=0.5 max|u| = {:.3} [{}]; factor scan max|u|: {}",
            bounded.tau_limit.unwrap(),
            bounded.max_amplitude,
            if below_ok { "ok" } else { "violated" },
            blowup.max_amplitude,
            if blowup_ok { "ok" } else { "no blow-up before T=1" },
            sifd.max_amplitude,
            if sifd_ok { "ok" } else { "violated" },
            scan.join(", ")
        ),
    )
}

fn property_suite() -> Outcome {
    let (reversal, _) = reversibility(Scheme::Efd, 500);
    let sbp = summation_by_parts_error(200);
    let zero = zero_preserved(Scheme::Efd) && zero_preserved(Scheme::Sifd);
    let shift_efd = shift_equivariance_error(Scheme::Efd);
    let shift_sifd = shift_equivariance_error(Scheme::Sifd);
    let solve = (0..20).map(sifd_solve_residual).fold(0.0, f64::max);
    let deriv = antiderivative_consistency();
    let energy = energy_identity_error(200);
    let symmetry =
        [Scheme::Efd, Scheme::Sifd].iter().map(|&s| example2_symmetry_drift(s, 2f64.powi(-5), 1.0)).fold(0.0, f64::max);
    let checks = [
        ("reversal", reversal <= 1e-8, reversal),
        ("sbp", sbp <= 1e-12, sbp),
        ("zero", zero, 0.0),
        ("shift efd", shift_efd == 0.0, shift_efd),
        ("shift sifd", shift_sifd <= 1e-13, shift_sifd),
        ("solve", solve <= 1e-12, solve),
        ("F'=f", deriv <= 1e-6, deriv),
        ("energy parts", energy <= 1e-12, energy),
        ("even symmetry", symmetry <= 1e-10, symmetry),
    ];
    let detail: Vec<String> =
        checks.iter().map(|(name, ok, v)| format!("{name} {v:.1e}{}", if *ok { "" } else { " ✗" })).collect();
    Outcome::new(checks.iter().all(|c| c.1), detail.join(", "))
}

fn energy_drift_order() -> Outcome {
    let drifts: Vec<f64> = [3, 4, 5].iter().map(|&j| energy_drift(2f64.powi(-j), 1e-3)).collect();
    let factors: Vec<f64> = drifts.windows(2).map(|w| w[0] / w[1]).collect();
    Outcome::new(in_band(&factors, 3.0, 5.0), format!("drifts {} → factors {}", fmt_list(&drifts), fmt_rates(&factors)))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "Gausson oracle", budget: Duration::from_secs(1), check: gausson_oracle },
        Criterion { id: 2, name: "table reproduction", budget: Duration::from_secs(30), check: table_reproduction },
        Criterion { id: 3, name: "error-floor structure", budget: Duration::from_secs(60), check: error_floor },
        Criterion {
            id: 4,
            name: "discretization order",
            budget: Duration::from_secs(120),
            check: discretization_order,
        },
        Criterion {
            id: 5,
            name: "regularization order",
            budget: Duration::from_secs(120),
            check: regularization_order,
        },
        Criterion { id: 6, name: "stability", budget: Duration::from_secs(10), check: stability },
        Criterion { id: 7, name: "property suite", budget: Duration::from_secs(10), check: property_suite },
        Criterion { id: 8, name: "energy drift order", budget: Duration::from_secs(30), check: energy_drift_order },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {} {}: {} ({:.2} s of {} s{})",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            outcome.detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
