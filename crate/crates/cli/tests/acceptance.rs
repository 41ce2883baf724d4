//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities once its assertions hold.
//!
//! Criteria 1-7 drive the library APIs directly; criterion 8 drives the
//! built binary and checks the exit-code and file contract.

mod common;

use common::{example_one, example_one_lipschitz, example_two, example_two_growth};
use nivp_core::hypotheses::{
    ball_invariance_check, build_m_theta, falsify_constants, schauder_radii, FalsifyKind,
    LipschitzSpec,
};
use nivp_core::matrix::{NonnegMatrix, Verdict, DEFAULT_BOUNDARY_BAND};
use nivp_core::operator::apply_t;
use nivp_core::oracle::{integrate_ivp, solve_nonlocal};
use nivp_core::solver::perov_solve;
use nivp_core::solver::picard_solve;
use nivp_core::space::{AugmentedState, GridFunction, SystemState, ThetaWeight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

#[test]
fn criterion_1_convergence_threshold() {
    let start = Instant::now();
    let theta = ThetaWeight::new(2.0).unwrap();
    let verdict_at = |a: f64| {
        let m = build_m_theta(&example_one_lipschitz(a), &theta);
        let report = m.check_convergent_to_zero(DEFAULT_BOUNDARY_BAND).unwrap();
        let eig = m.eigenvalues_2x2().unwrap();
        assert!(
            (eig[0] - (0.25 - a.abs())).abs() <= 1e-12,
            "low eigenvalue at a={a}: {}",
            eig[0]
        );
        assert!(
            (eig[1] - (0.75 + a.abs())).abs() <= 1e-12,
            "high eigenvalue at a={a}: {}",
            eig[1]
        );
        report.verdict
    };
    for a in [0.0, 0.1, 0.24] {
        assert_eq!(verdict_at(a), Verdict::Convergent, "a = {a}");
    }
    for a in [0.25 + 1e-6, 0.3, 1.0] {
        assert_eq!(verdict_at(a), Verdict::NotConvergent, "a = {a}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 1 (convergence threshold at theta=2, eigenvalues to 1e-12): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_2_perov_certificate_validity() {
    let start = Instant::now();
    let p = example_one(0.1, 1024);
    // Oracle first: the reference is a one-step integrator plus root finder,
    // no fixed-point machinery involved.
    let shot = solve_nonlocal(&p, [0.0, 0.0], 1e-10).unwrap();
    let oracle_state = shot.system_state().unwrap();

    let solved = perov_solve(&p, &p.zero_state().unwrap(), 1e-8, 500).unwrap();
    assert!(solved.converged);
    assert!(
        solved.iterations < 200,
        "took {} iterations",
        solved.iterations
    );
    let cert = solved.certificate.as_ref().unwrap();
    let d = solved
        .state
        .vector_distance(&oracle_state, &p.theta)
        .unwrap();
    for i in 0..2 {
        assert!(
            d[i] <= cert.aposteriori_bound[i] + 1e-5,
            "component {i}: distance {} exceeds bound {} + 1e-5",
            d[i],
            cert.aposteriori_bound[i]
        );
    }
    let r = &solved.residuals;
    for (name, v) in [
        ("ode1", r.ode1),
        ("ode2", r.ode2),
        ("nl1", r.nl1),
        ("nl2", r.nl2),
    ] {
        assert!(v <= 1e-4, "residual {name} = {v}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "criterion 2 (certificate validity on ex1): PASS in {elapsed:?}: {} iterations, \
         distance {:?} within bounds {:?} + 1e-5",
        solved.iterations, d, cert.aposteriori_bound
    );
}

#[test]
fn criterion_3_criteria_equivalence_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut checked = 0usize;
    let mut skipped_near_one = 0usize;
    for _ in 0..1000 {
        let n = rng.random_range(2..=4usize);
        let entries: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..2.0)).collect();
        let m = NonnegMatrix::from_flat(n, entries).unwrap();
        // A disagreement outside the boundary band is surfaced as an error;
        // unwrap makes it a test failure.
        let report = m.check_convergent_to_zero(DEFAULT_BOUNDARY_BAND).unwrap();
        if (report.spectral_radius - 1.0).abs() <= 1e-6 {
            skipped_near_one += 1;
            continue;
        }
        let expected = report.spectral_radius < 1.0;
        for (name, flag) in [
            ("powers", report.by_power_iteration),
            ("neumann", report.by_neumann),
            ("eigenvalues", report.by_eigenvalues),
            ("inverse-positivity", report.by_inverse_positivity),
        ] {
            assert_eq!(
                flag, expected,
                "criterion {name} disagrees at rho = {}",
                report.spectral_radius
            );
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "criterion 3 (four-criteria equivalence): PASS in {elapsed:?}: {checked} matrices \
         agreed, {skipped_near_one} within 1e-6 of the unit radius"
    );
}

#[test]
fn criterion_4_neumann_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(2000);
    let mut done = 0usize;
    while done < 200 {
        let n = rng.random_range(2..=4usize);
        let entries: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..2.0)).collect();
        let m = NonnegMatrix::from_flat(n, entries).unwrap();
        let rho = m.spectral_radius();
        if rho == 0.0 {
            continue;
        }
        let m = m.scale(rng.random_range(0.05..0.9) / rho);
        let series = m.neumann_inverse(1e-9).unwrap();
        let direct = m.inverse_i_minus().unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (series.entry(i, j) - direct[i][j]).abs() <= 1e-8,
                    "entry ({i},{j}): {} vs {}",
                    series.entry(i, j),
                    direct[i][j]
                );
                assert!(
                    direct[i][j] >= -1e-12,
                    "inverse-positivity violated at ({i},{j}): {}",
                    direct[i][j]
                );
            }
        }
        done += 1;
    }
    println!("criterion 4 (geometric series inverse, 200 matrices): PASS");
}

#[test]
fn criterion_5_schauder_pipeline() {
    let p = example_two(0.1, 1024);
    let growth = example_two_growth(0.1);

    // Radii solve the 2x2 linear system to 1e-10.
    let radii = schauder_radii(&growth, &p.theta).unwrap();
    let m = build_m_theta(&growth, &p.theta);
    let offsets = growth.weighted_offsets(&p.theta);
    for i in 0..2 {
        let lhs = radii[i] - m.entry(i, 0) * radii[0] - m.entry(i, 1) * radii[1];
        assert!(
            (lhs - offsets[i]).abs() <= 1e-10,
            "row {i}: (I-M)R = {lhs} vs {}",
            offsets[i]
        );
        assert!(radii[i] >= 0.0);
    }

    // The sampled invariant-ball check holds with 200 states.
    assert!(ball_invariance_check(&p, radii, 200, 42).unwrap().holds());

    // Uncertified iteration converges with small residuals.
    let solved = picard_solve(&p, &p.zero_state().unwrap(), 1e-9, 1000).unwrap();
    assert!(solved.converged);
    assert_eq!(solved.stayed_in_ball, Some(true));
    let r = &solved.residuals;
    assert!(r.ode1 <= 1e-4 && r.ode2 <= 1e-4 && r.nl1 <= 1e-4 && r.nl2 <= 1e-4);

    // The oracle root lies inside the ball and matches the iteration.
    let shot = solve_nonlocal(&p, [0.0, 0.0], 1e-10).unwrap();
    let oracle_state = shot.system_state().unwrap();
    let norms = oracle_state.weighted_norms(&p.theta);
    assert!(norms[0] <= radii[0] && norms[1] <= radii[1]);
    let d = solved
        .state
        .vector_distance(&oracle_state, &p.theta)
        .unwrap();
    assert!(d[0] <= 1e-6 && d[1] <= 1e-6, "distance {d:?}");

    // No finite Lipschitz claim survives near the oscillation axis: pin the
    // first equation by making everything else effectively unconstrained.
    let mut claimed = p.clone();
    for claim in [1.0, 1e2, 1e4, 1e6] {
        claimed.declared_lipschitz = Some(LipschitzSpec {
            f1_x: claim,
            f1_y: claim,
            f2_x: 1e18,
            f2_y: 1e18,
            alpha_x: 0.125,
            alpha_y: 0.125,
            beta_x: 0.125,
            beta_y: 0.125,
        });
        let cx = falsify_constants(&claimed, FalsifyKind::Lipschitz, 100_000, 100.0, 7)
            .unwrap()
            .unwrap_or_else(|| panic!("claim {claim} must be falsified"));
        assert_eq!(cx.inequality, "f1 Lipschitz bound", "claim {claim}");
        assert!(cx.lhs > cx.rhs);
    }

    println!(
        "criterion 5 (existence pipeline on ex2): PASS: radii {radii:?}, picard-oracle \
         distance {d:?}, Lipschitz claims up to 1e6 falsified"
    );
}

#[test]
fn criterion_6_discrete_contraction() {
    let p = example_one(0.1, 1024);
    let m = build_m_theta(&example_one_lipschitz(0.1), &p.theta);
    let mut rng = ChaCha8Rng::seed_from_u64(3000);
    let random_state = |rng: &mut ChaCha8Rng| {
        let f = |rng: &mut ChaCha8Rng| {
            GridFunction::from_values(
                (0..=1024).map(|_| rng.random_range(-10.0..10.0)).collect(),
            )
            .unwrap()
        };
        let x = f(rng);
        let y = f(rng);
        SystemState::new(
            AugmentedState::new(x, rng.random_range(-10.0..10.0)).unwrap(),
            AugmentedState::new(y, rng.random_range(-10.0..10.0)).unwrap(),
        )
        .unwrap()
    };
    for _ in 0..200 {
        let u = random_state(&mut rng);
        let v = random_state(&mut rng);
        let du = u.vector_distance(&v, &p.theta).unwrap();
        let tu = apply_t(&u, &p).unwrap();
        let tv = apply_t(&v, &p).unwrap();
        let dt = tu.vector_distance(&tv, &p.theta).unwrap();
        for i in 0..2 {
            let rhs = m.entry(i, 0) * du[0] + m.entry(i, 1) * du[1];
            assert!(
                dt[i] <= rhs + 1e-12,
                "component {i}: {} > {} + 1e-12",
                dt[i],
                rhs
            );
        }
    }
    println!("criterion 6 (discrete contraction, 200 state pairs): PASS");
}

#[test]
fn criterion_7_grid_convergence() {
    // Second-order refinement of the fixed-point solution.
    let solved_at = |n: usize| {
        let p = example_one(0.1, n);
        perov_solve(&p, &p.zero_state().unwrap(), 1e-12, 1000)
            .unwrap()
            .state
    };
    let s256 = solved_at(256);
    let s512 = solved_at(512);
    let s1024 = solved_at(1024);
    let sup_diff = |coarse: &SystemState, fine: &SystemState| {
        let k = fine.n_intervals() / coarse.n_intervals();
        let mut worst: f64 = 0.0;
        for i in 0..=coarse.n_intervals() {
            worst = worst.max(
                (coarse.first().func().value_at_node(i)
                    - fine.first().func().value_at_node(i * k))
                .abs(),
            );
        }
        worst
    };
    let e_coarse = sup_diff(&s256, &s512);
    let e_fine = sup_diff(&s512, &s1024);
    let ratio = e_coarse / e_fine;
    assert!(
        (3.0..=5.0).contains(&ratio),
        "refinement ratio {ratio} outside [3,5]"
    );

    // Fourth-order reference integrator on the circular problem.
    let circular_err = |n: usize| {
        let mut p = example_one(0.0, n);
        p.f1 = nivp_core::expr::parse_scalar("y").unwrap();
        p.f2 = nivp_core::expr::parse_scalar("-x").unwrap();
        let (x, _) = integrate_ivp(&p, 1.0, 0.0).unwrap();
        (x.value_at_node(n) - 1f64.cos()).abs()
    };
    let r1 = circular_err(128) / circular_err(256);
    let r2 = circular_err(256) / circular_err(512);
    assert!(r1 >= 12.0, "first halving ratio {r1}");
    assert!(r2 >= 12.0, "second halving ratio {r2}");
    println!(
        "criterion 7 (grid convergence): PASS: solution refinement ratio {ratio:.3}, \
         integrator halving ratios {r1:.1} and {r2:.1}"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8 drives the installed binary.
// ---------------------------------------------------------------------------

struct CliRun {
    status: i32,
    stdout: Vec<u8>,
}

fn run_cli(args: &[&str], dir: &std::path::Path) -> CliRun {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_nivp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    CliRun {
        status: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
    }
}

#[test]
fn criterion_8_cli_contract() {
    let base = std::env::temp_dir().join(format!("nivp-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();

    // Exit codes.
    let run1 = run_cli(&["example", "ex1", "--param", "a=0.1", "--out", "run1"], &base);
    assert_eq!(run1.status, 0, "ex1 a=0.1 must exit 0");
    let bad = run_cli(&["example", "ex1", "--param", "a=0.3", "--out", "bad"], &base);
    assert_eq!(bad.status, 2, "ex1 a=0.3 must exit 2");
    let ex2 = run_cli(&["example", "ex2", "--param", "a=0.1", "--out", "ex2"], &base);
    assert_eq!(ex2.status, 0, "ex2 a=0.1 must exit 0");

    // Determinism: second identical seeded runs produce bit-identical bytes.
    let run2 = run_cli(&["example", "ex1", "--param", "a=0.1", "--out", "run2"], &base);
    assert_eq!(run2.status, 0);
    assert_eq!(run1.stdout, run2.stdout, "ex1 stdout must be bit-identical");
    let ex2_again = run_cli(&["example", "ex2", "--param", "a=0.1", "--out", "ex2b"], &base);
    assert_eq!(ex2.stdout, ex2_again.stdout, "ex2 stdout must be bit-identical");
    for file in [
        "report.txt",
        "solution.csv",
        "oracle_report.txt",
        "oracle_solution.csv",
    ] {
        let a = std::fs::read(base.join("run1").join(file)).unwrap();
        let b = std::fs::read(base.join("run2").join(file)).unwrap();
        assert_eq!(a, b, "ex1 {file} must be bit-identical across runs");
        let a = std::fs::read(base.join("ex2").join(file)).unwrap();
        let b = std::fs::read(base.join("ex2b").join(file)).unwrap();
        assert_eq!(a, b, "ex2 {file} must be bit-identical across runs");
    }

    // CSV schema: header, one row per node, >= 12 significant digits.
    let csv = std::fs::read_to_string(base.join("run1").join("solution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,y"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1025, "one row per grid node");
    for row in [rows[0], rows[512], rows[1024]] {
        for field in row.split(',') {
            let digits = field
                .split(['e', 'E'])
                .next()
                .unwrap()
                .chars()
                .filter(|c| c.is_ascii_digit())
                .count();
            assert!(digits >= 12, "field `{field}` carries too few digits");
            field.parse::<f64>().expect("fields parse as numbers");
        }
    }

    let _ = std::fs::remove_dir_all(&base);
    println!("criterion 8 (CLI contract): PASS: exit codes 0/2/0, bit-identical reruns, CSV schema");
}
