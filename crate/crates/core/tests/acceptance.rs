//! Acceptance suite. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use topmeasure::harness::checks::{self, PropertySuite};
use topmeasure::harness::example::{self, Example};
use topmeasure::harness::random::check_rng;
use topmeasure::quasi::{DistributionOptions, QuasiIntegrator};
use topmeasure::reconstruct::BumpSchedule;
use topmeasure::{
    linear_oracle, quasi_integral, Atom, Frame, ScalarField, TopologicalMeasure,
};

const SEED: u64 = 20240601;
const TRIALS: usize = 200;

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

fn example_golden() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [64, 128] {
        let frame = example::frame(n).unwrap();
        let ex = Example::new(frame, 1.0).unwrap();
        let rho = QuasiIntegrator::new(example::measure());
        let rf = rho.rho(&ex.f).unwrap();
        let rg = rho.rho(&ex.g).unwrap();
        let rh = rho.rho(&ex.f.add(&ex.g).unwrap()).unwrap();
        let defect = rf + rg - rh;
        let ok = (rf - 1.0).abs() <= 1e-9 && (rg - 1.0).abs() <= 1e-9 && (rh - 1.5).abs() <= 1e-9 && defect == 0.5;
        pass &= ok;
        lines.push(format!("{n}x{n}: ({rf}, {rg}, {rh}) defect {defect}"));
    }
    outcome(pass, lines.join("; "))
}

fn linear_baseline() -> Outcome {
    let frame = Frame::square(0.0, 10.0, 512).unwrap();
    let f = ScalarField::tent(frame, 4.0, 4.0, 2.0, 1.0).unwrap();
    let mu = TopologicalMeasure::uniform_density(1.0).unwrap();
    let qi = quasi_integral(&mu, &f, &DistributionOptions::default()).unwrap().value;
    let oracle = linear_oracle(&mu, &f).unwrap();
    let gap = (qi - oracle).abs();
    outcome(gap <= 5e-3, format!("quasi-integral {qi:.6}, oracle {oracle:.6}, gap {gap:.2e}, continuum 16/3"))
}

fn roundtrip() -> Outcome {
    let ex = Example::new(example::frame(128).unwrap(), 1.0).unwrap();
    let rho = QuasiIntegrator::new(example::measure());
    let catalog = ex.catalog().unwrap();
    let schedule = BumpSchedule::default();
    let (rep, _) = checks::check_roundtrip("roundtrip", &rho, &catalog, &schedule, 1e-9);
    let summary: Vec<String> = catalog
        .iter()
        .map(|(n, _)| {
            let tm = rep.values.get(&format!("{n}.tm_eval")).copied().unwrap_or(f64::NAN);
            let rec = rep.values.get(&format!("{n}.reconstructed")).copied().unwrap_or(f64::NAN);
            format!("{n} {tm}/{rec}")
        })
        .collect();
    outcome(rep.pass && rep.trials == 6, format!("{} of 6 regions match (tm/reconstructed: {})", rep.trials - rep.failures, summary.join(", ")))
}

fn property_suites() -> Outcome {
    let frame = example::frame(64).unwrap();
    let rho = QuasiIntegrator::new(example::measure());
    let suites = [
        PropertySuite::Homogeneity,
        PropertySuite::SgaAdditivity,
        PropertySuite::Positivity,
        PropertySuite::DisjointSupport,
        PropertySuite::Monotonicity,
        PropertySuite::Lipschitz,
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for suite in suites {
        let mut rng = check_rng(SEED, suite.name());
        let rep = checks::run_property(suite.name(), suite, &rho, frame, TRIALS, &mut rng, suite.default_tolerance());
        pass &= rep.pass && rep.trials == TRIALS;
        parts.push(format!("{} {}/{}", suite.name(), rep.failures, rep.trials));
        if !rep.pass {
            eprintln!("  worst {} witness: {:?}", suite.name(), rep.worst);
        }
    }
    outcome(pass, format!("failures: {}", parts.join(", ")))
}

fn distribution_invariants() -> Outcome {
    let frame = example::frame(64).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let measures = [
        ("point_count", example::measure()),
        ("density", TopologicalMeasure::uniform_density(0.04).unwrap()),
        (
            "atomic",
            TopologicalMeasure::atomic(vec![
                Atom { x: 2.3, y: 2.7, weight: 0.25 },
                Atom { x: 7.1, y: 3.3, weight: 0.5 },
                Atom { x: 4.4, y: 8.2, weight: 0.25 },
            ])
            .unwrap(),
        ),
    ];
    for (name, mu) in measures {
        let rho = QuasiIntegrator::new(mu);
        let mut rng = check_rng(SEED, &format!("distribution_{name}"));
        let suite = PropertySuite::DistributionInvariants;
        let rep = checks::run_property(name, suite, &rho, frame, TRIALS, &mut rng, 0.0);
        pass &= rep.pass;
        parts.push(format!("{name} {}/{}", rep.failures, rep.trials));
        if !rep.pass {
            eprintln!("  worst {name} witness: {:?}", rep.worst);
        }
    }
    outcome(pass, format!("failures: {}", parts.join(", ")))
}

fn tm_axioms() -> Outcome {
    let frame = example::frame(128).unwrap();
    let ex = Example::new(frame, 1.0).unwrap();
    let mut catalog = ex.catalog().unwrap();
    catalog.push(("U".into(), ex.u.clone()));
    catalog.push(("V".into(), ex.v.clone()));
    let cases = [
        ("point_count", example::measure(), 0.0),
        ("density", TopologicalMeasure::uniform_density(1.0).unwrap(), 1e-3),
        (
            "atomic",
            TopologicalMeasure::atomic(vec![Atom { x: 3.3, y: 6.1, weight: 0.4 }, Atom { x: 6.2, y: 2.9, weight: 0.6 }])
                .unwrap(),
            1e-3,
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, mu, tol) in cases {
        let mut rng = check_rng(SEED, &format!("axioms_{name}"));
        let rep = checks::check_tm_axioms(name, &mu, &catalog, TRIALS, &mut rng, tol).unwrap();
        pass &= rep.pass;
        parts.push(format!("{name} {}/{} (tol {tol})", rep.failures, rep.trials));
        if !rep.pass {
            eprintln!("  worst {name} witness: {:?}", rep.worst);
        }
    }
    outcome(pass, format!("failures: {}", parts.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("1 example reproduction", example_golden, Some(Duration::from_secs(5))),
        ("2 linear baseline", linear_baseline, Some(Duration::from_secs(10))),
        ("3 round trip", roundtrip, None),
        ("4 property suites", property_suites, None),
        ("5 distribution invariants", distribution_invariants, None),
        ("6 axiom suite", tm_axioms, None),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let (o, elapsed) = timed(run);
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = o.pass && in_time;
        failed += !pass as usize;
        let budget_note = budget.map_or(String::new(), |b| format!(" / budget {:.0}s", b.as_secs_f64()));
        println!(
            "criterion {name}: {} [{:.2}s{budget_note}] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
