//! Command implementations and the exit-code contract:
//! 0 success, 1 config error, 2 hypotheses fail, 3 non-convergence.

use crate::config::{
    lower_config, ExpressionsConfig, GrowthConfig, LipschitzConfig, LoadedProblem, Overrides,
    ProblemConfig, SolverMode,
};
use crate::report::{write_solution_csv, Report};
use anyhow::{bail, Context, Result};
use nivp_core::hypotheses::{
    apriori_bound, build_m_theta, falsify_constants, find_theta, row_sum_sufficient_check,
    schauder_radii, FalsifyKind, HypothesesError,
};
use nivp_core::matrix::{NonnegMatrix, Verdict, DEFAULT_BOUNDARY_BAND};
use nivp_core::oracle::{solve_nonlocal, OracleError, ShootResult};
use nivp_core::solver::{perov_solve, picard_solve, SolveResult, SolverError};
use std::path::Path;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_HYPOTHESES: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

const FALSIFY_SAMPLES: usize = 10_000;
const FALSIFY_BOX: f64 = 100.0;
const APRIORI_CAP: [f64; 2] = [1e3, 1e3];
const APRIORI_SWEEP_GRID: usize = 100;

pub fn cmd_check(config: &Path, overrides: &Overrides) -> Result<i32> {
    let problem = crate::config::load_problem(config, overrides)?;
    let (report, ok) = check_problem(&problem)?;
    report.print();
    Ok(if ok { EXIT_OK } else { EXIT_HYPOTHESES })
}

pub fn cmd_solve(config: &Path, out_dir: &Path, overrides: &Overrides) -> Result<i32> {
    let problem = crate::config::load_problem(config, overrides)?;
    let (code, _) = solve_problem(&problem, out_dir)?;
    Ok(code)
}

pub fn cmd_oracle(config: &Path, out_dir: &Path, overrides: &Overrides) -> Result<i32> {
    let problem = crate::config::load_problem(config, overrides)?;
    let (code, _) = oracle_problem(&problem, out_dir)?;
    Ok(code)
}

pub fn cmd_matrix(path: &Path) -> Result<i32> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read matrix file {}", path.display()))?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
        .with_context(|| format!("matrix file {} must be a JSON array of arrays", path.display()))?;
    let m = NonnegMatrix::from_rows(&rows)?;
    let mut report = Report::new();
    report.line("dimension", m.dim());
    report.matrix("matrix", &m);
    let conv = m.check_convergent_to_zero(DEFAULT_BOUNDARY_BAND)?;
    report.convergence(&conv);
    if m.dim() == 2 {
        report.line("row_sum_sufficient", row_sum_sufficient_check(&m)?);
    }
    if conv.verdict == Verdict::Convergent {
        let inv = m.neumann_inverse(1e-10)?;
        report.matrix("neumann_inverse", &inv);
    }
    report.print();
    Ok(EXIT_OK)
}

pub fn cmd_example(
    name: &str,
    out_dir: &Path,
    g: Option<&str>,
    h: Option<&str>,
    overrides: &Overrides,
) -> Result<i32> {
    let config = builtin_example(name, g, h, overrides)?;
    let problem = lower_config(config, overrides)?;

    println!("== check");
    let (report, ok) = check_problem(&problem)?;
    report.print();
    if !ok {
        return Ok(EXIT_HYPOTHESES);
    }

    println!("== solve");
    let (code, solved) = solve_problem(&problem, out_dir)?;
    if code != EXIT_OK {
        return Ok(code);
    }
    let solved = solved.expect("exit 0 implies a result");

    println!("== oracle");
    let (code, shot) = oracle_problem(&problem, out_dir)?;
    if code != EXIT_OK {
        return Ok(code);
    }
    let shot = shot.expect("exit 0 implies a result");

    println!("== comparison");
    let oracle_state = shot.system_state()?;
    let mut cmp = Report::new();
    let d = solved
        .state
        .vector_distance(&oracle_state, &problem.spec.theta)?;
    cmp.line("weighted_distance_1", d[0]);
    cmp.line("weighted_distance_2", d[1]);
    cmp.line(
        "initial_first_solver_minus_oracle",
        solved.state.first().scalar() - shot.initial[0],
    );
    cmp.line(
        "initial_second_solver_minus_oracle",
        solved.state.second().scalar() - shot.initial[1],
    );
    if let Some(cert) = &solved.certificate {
        cmp.line("aposteriori_bound_1", cert.aposteriori_bound[0]);
        cmp.line("aposteriori_bound_2", cert.aposteriori_bound[1]);
        cmp.line(
            "within_bound_plus_allowance",
            nivp_core::solver::certificate_check(
                &solved,
                &oracle_state,
                nivp_core::solver::DEFAULT_DISCRETIZATION_ALLOWANCE,
            )?,
        );
    }
    cmp.print();
    Ok(EXIT_OK)
}

/// Hypothesis report plus the verdict for the selected solver mode.
fn check_problem(problem: &LoadedProblem) -> Result<(Report, bool)> {
    let spec = &problem.spec;
    let mut report = Report::new();
    report.line("solver", problem.mode);
    report.line("grid", spec.n_intervals);
    report.line("theta", spec.theta.value());
    report.line("theta_source", problem.theta_source);
    report.line("tolerance", spec.tolerance);
    report.line("seed", problem.seed);

    let mut lipschitz_ok = false;
    let mut growth_ok = false;
    let mut caratheodory_ok = false;

    if let Some(l) = &spec.declared_lipschitz {
        let m = build_m_theta(l, &spec.theta);
        report.matrix("lipschitz_m_theta", &m);
        let conv = m.check_convergent_to_zero(DEFAULT_BOUNDARY_BAND)?;
        report.convergence(&conv);
        report.line("row_sum_sufficient", row_sum_sufficient_check(&m)?);
        let search = find_theta(l);
        report.line("theta_search_theta", search.theta);
        report.line("theta_search_rho", search.rho);
        report.line("theta_search_convergent", search.convergent);
        if !search.convergent {
            report.line("theta_search_note", "no theta achieves rho < 1");
        }
        let falsified =
            falsify_constants(spec, FalsifyKind::Lipschitz, FALSIFY_SAMPLES, FALSIFY_BOX, problem.seed)?;
        match &falsified {
            None => report.line(
                "lipschitz_falsification",
                format!("none ({FALSIFY_SAMPLES} samples)"),
            ),
            Some(cx) => report.line(
                "lipschitz_falsification",
                format!("{} violated: lhs {} > rhs {} at {}", cx.inequality, cx.lhs, cx.rhs, cx.witness),
            ),
        }
        lipschitz_ok = conv.verdict == Verdict::Convergent && falsified.is_none();
    }

    if let Some(g) = &spec.declared_growth {
        let m = build_m_theta(g, &spec.theta);
        report.matrix("growth_m_theta", &m);
        let conv = m.check_convergent_to_zero(DEFAULT_BOUNDARY_BAND)?;
        report.line("growth_spectral_radius", conv.spectral_radius);
        report.line("growth_verdict", conv.verdict);
        let search = find_theta(g);
        report.line("growth_theta_search_theta", search.theta);
        report.line("growth_theta_search_rho", search.rho);
        report.line("growth_theta_search_convergent", search.convergent);
        match schauder_radii(g, &spec.theta) {
            Ok(radii) => {
                report.line("schauder_radius_1", radii[0]);
                report.line("schauder_radius_2", radii[1]);
            }
            Err(HypothesesError::NotConvergent { rho }) => {
                report.line(
                    "schauder_radii",
                    format!("unavailable (matrix not convergent at this theta, rho = {rho})"),
                );
            }
            Err(e) => return Err(e.into()),
        }
        let falsified =
            falsify_constants(spec, FalsifyKind::Growth, FALSIFY_SAMPLES, FALSIFY_BOX, problem.seed)?;
        match &falsified {
            None => report.line(
                "growth_falsification",
                format!("none ({FALSIFY_SAMPLES} samples)"),
            ),
            Some(cx) => report.line(
                "growth_falsification",
                format!("{} violated: lhs {} > rhs {} at {}", cx.inequality, cx.lhs, cx.rhs, cx.witness),
            ),
        }
        growth_ok = search.convergent && falsified.is_none();
    }

    if let Some(cg) = &problem.caratheodory {
        let monotone =
            cg.falsify_monotonicity(&spec.params, FALSIFY_SAMPLES, FALSIFY_BOX, problem.seed)?;
        match &monotone {
            None => report.line(
                "caratheodory_monotonicity",
                format!("not falsified ({FALSIFY_SAMPLES} samples)"),
            ),
            Some(cx) => report.line(
                "caratheodory_monotonicity",
                format!("{} violated: {} > {} at {}", cx.inequality, cx.lhs, cx.rhs, cx.witness),
            ),
        }
        match apriori_bound(cg, &spec.params, APRIORI_CAP, APRIORI_SWEEP_GRID) {
            Ok(out) => {
                match out.bound {
                    Some(b) => {
                        report.line("apriori_bound_1", b[0]);
                        report.line("apriori_bound_2", b[1]);
                        caratheodory_ok = monotone.is_none();
                    }
                    None => {
                        report.line(
                            "apriori_bound",
                            "none (sweep found a self-mapped point beyond the iterated limit)",
                        );
                        if let Some(v) = out.sweep_violation {
                            report.line("apriori_sweep_violation", format!("[{}, {}]", v[0], v[1]));
                        }
                    }
                }
                report.line("apriori_certified_region_only", out.certified_region_only);
            }
            Err(HypothesesError::NoBoundFound { at }) => {
                report.line(
                    "apriori_bound",
                    format!("none (iterates exceeded the cap at [{}, {}])", at[0], at[1]),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }

    let ok = match problem.mode {
        SolverMode::Perov => lipschitz_ok,
        SolverMode::Picard => growth_ok || caratheodory_ok,
    };
    report.line("hypotheses", if ok { "satisfied" } else { "violated" });
    Ok((report, ok))
}

fn solve_problem(
    problem: &LoadedProblem,
    out_dir: &Path,
) -> Result<(i32, Option<SolveResult>)> {
    let spec = &problem.spec;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output dir {}", out_dir.display()))?;
    let u0 = spec.zero_state()?;

    let result = match problem.mode {
        SolverMode::Perov => perov_solve(spec, &u0, spec.tolerance, problem.max_iter),
        SolverMode::Picard => {
            // Existence-only mode: missing or non-contractive hypotheses are
            // warned about, not enforced.
            match &spec.declared_growth {
                None => eprintln!("warning: no growth constants declared; existence unverified"),
                Some(g) => {
                    let search = find_theta(g);
                    if !search.convergent {
                        eprintln!(
                            "warning: growth matrix not convergent for any theta (best rho {})",
                            search.rho
                        );
                    }
                }
            }
            picard_solve(spec, &u0, spec.tolerance, problem.max_iter)
        }
    };
    let result = match result {
        Ok(r) => r,
        Err(e @ (SolverError::MissingLipschitz | SolverError::NotContractive { .. })) => {
            eprintln!("hypotheses not satisfied: {e}");
            return Ok((EXIT_HYPOTHESES, None));
        }
        Err(e @ SolverError::Diverged { .. }) => {
            eprintln!("{e}");
            return Ok((EXIT_NO_CONVERGENCE, None));
        }
        Err(e) => return Err(e.into()),
    };

    let mut report = Report::new();
    report.line("command", "solve");
    report.line("solver", problem.mode);
    report.line("grid", spec.n_intervals);
    report.line("theta", spec.theta.value());
    report.line("theta_source", problem.theta_source);
    report.line("tolerance", spec.tolerance);
    report.line("max_iter", problem.max_iter);
    report.line("converged", result.converged);
    report.line("iterations", result.iterations);
    report.line("residual_ode1", result.residuals.ode1);
    report.line("residual_ode2", result.residuals.ode2);
    report.line("residual_nl1", result.residuals.nl1);
    report.line("residual_nl2", result.residuals.nl2);
    match &result.certificate {
        Some(cert) => {
            report.matrix("certificate_matrix", &cert.matrix);
            report.line("certificate_theta", cert.theta);
            report.line("certificate_iterations", cert.iterations);
            report.line("apriori_bound_1", cert.apriori_bound[0]);
            report.line("apriori_bound_2", cert.apriori_bound[1]);
            report.line("aposteriori_bound_1", cert.aposteriori_bound[0]);
            report.line("aposteriori_bound_2", cert.aposteriori_bound[1]);
        }
        None => {
            report.line("uniqueness_certificate", "none (existence-only hypotheses)");
            if let Some(stayed) = result.stayed_in_ball {
                report.line("iterates_stayed_in_ball", stayed);
            }
        }
    }
    report.write_to(&out_dir.join("report.txt"))?;
    write_solution_csv(&out_dir.join("solution.csv"), &result.state)?;
    report.print();
    let code = if result.converged {
        EXIT_OK
    } else {
        eprintln!("did not converge within {} iterations", problem.max_iter);
        EXIT_NO_CONVERGENCE
    };
    Ok((code, Some(result)))
}

fn oracle_problem(
    problem: &LoadedProblem,
    out_dir: &Path,
) -> Result<(i32, Option<ShootResult>)> {
    let spec = &problem.spec;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output dir {}", out_dir.display()))?;
    let shot = match solve_nonlocal(spec, [0.0, 0.0], spec.tolerance) {
        Ok(s) => s,
        Err(e @ (OracleError::NoRoot { .. } | OracleError::NonFiniteState { .. })) => {
            eprintln!("{e}");
            return Ok((EXIT_NO_CONVERGENCE, None));
        }
        Err(e) => return Err(e.into()),
    };
    let state = shot.system_state()?;
    let residuals = nivp_core::operator::residual(&state, spec)?;
    let mut report = Report::new();
    report.line("command", "oracle");
    report.line("grid", spec.n_intervals);
    report.line("tolerance", spec.tolerance);
    report.line("initial_1", shot.initial[0]);
    report.line("initial_2", shot.initial[1]);
    report.line("mismatch_1", shot.mismatch[0]);
    report.line("mismatch_2", shot.mismatch[1]);
    report.line("newton_steps", shot.newton_steps);
    report.line("residual_ode1", residuals.ode1);
    report.line("residual_ode2", residuals.ode2);
    report.line("residual_nl1", residuals.nl1);
    report.line("residual_nl2", residuals.nl2);
    report.write_to(&out_dir.join("oracle_report.txt"))?;
    write_solution_csv(&out_dir.join("oracle_solution.csv"), &state)?;
    report.print();
    Ok((EXIT_OK, Some(shot)))
}

/// Materializes a built-in example configuration. The forcing terms `g`, `h`
/// default to `t` and `1` and can be overridden with any expression in `t`.
fn builtin_example(
    name: &str,
    g: Option<&str>,
    h: Option<&str>,
    overrides: &Overrides,
) -> Result<ProblemConfig> {
    let a = param_override(overrides, "a")?.unwrap_or(0.1);
    let g = g.unwrap_or("t");
    let h = h.unwrap_or("1");
    let expressions = |f1: String, f2: String| ExpressionsConfig {
        f1,
        f2,
        alpha: "0.125*sin(x(0.25) + y(0.25))".into(),
        beta: "0.125*cos(x(0.25) + y(0.25))".into(),
    };
    let params = std::iter::once(("a".to_string(), a)).collect();
    match name {
        "ex1" => Ok(ProblemConfig {
            solver: SolverMode::Perov,
            grid: None,
            theta: Some(2.0),
            tolerance: None,
            seed: Some(42),
            expressions: expressions(
                format!("0.25*sin(x) + a*y + ({g})"),
                format!("cos(a*x + 0.25*y) + ({h})"),
            ),
            params,
            lipschitz: Some(LipschitzConfig {
                a1: 0.25,
                b1: a.abs(),
                a2: a.abs(),
                b2: 0.25,
                cap_a1: 0.125,
                cap_b1: 0.125,
                cap_a2: 0.125,
                cap_b2: 0.125,
            }),
            growth: None,
            caratheodory: None,
        }),
        "ex2" => {
            // Forcing sups: exact for the defaults, sampled with curvature
            // headroom for overrides.
            let c1 = forcing_bound(g)?;
            let c2 = forcing_bound(h)?;
            Ok(ProblemConfig {
                solver: SolverMode::Picard,
                grid: None,
                theta: Some(2.0),
                tolerance: None,
                seed: Some(42),
                expressions: expressions(
                    format!("0.25*(x*sin(y/x)) + a*(y*sin(x/y)) + ({g})"),
                    format!("a*(x*sin(y/x)) + 0.25*(y*sin(x/y)) + ({h})"),
                ),
                params,
                lipschitz: None,
                growth: Some(GrowthConfig {
                    a1: 0.25,
                    b1: a.abs(),
                    c1,
                    a2: a.abs(),
                    b2: 0.25,
                    c2,
                    cap_a1: 0.125,
                    cap_b1: 0.125,
                    cap_c1: 0.0,
                    cap_a2: 0.125,
                    cap_b2: 0.125,
                    cap_c2: 0.0,
                }),
                caratheodory: None,
            })
        }
        other => bail!("unknown example `{other}` (available: ex1, ex2)"),
    }
}

fn param_override(overrides: &Overrides, name: &str) -> Result<Option<f64>> {
    let mut found = None;
    for binding in &overrides.params {
        if let Some((k, v)) = binding.split_once('=') {
            if k == name {
                found = Some(v.parse::<f64>().with_context(|| {
                    format!("malformed --param `{binding}`: bad number")
                })?);
            }
        }
    }
    Ok(found)
}

/// Sup of a forcing expression over [0,1]: exact for the built-in defaults,
/// otherwise sampled on a fine grid with a small headroom for curvature
/// between nodes.
fn forcing_bound(forcing: &str) -> Result<f64> {
    match forcing {
        "t" | "1" => Ok(1.0),
        src => {
            let expr = nivp_core::expr::parse_scalar(src)
                .with_context(|| format!("in forcing expression `{src}`"))?;
            let n = 4096;
            let mut sup: f64 = 0.0;
            for i in 0..=n {
                let t = i as f64 / n as f64;
                let v = expr
                    .eval(t, 0.0, 0.0, &nivp_core::expr::Params::new())
                    .with_context(|| format!("evaluating forcing `{src}` at t = {t}"))?;
                sup = sup.max(v.abs());
            }
            Ok(sup * (1.0 + 1e-4) + 1e-12)
        }
    }
}
