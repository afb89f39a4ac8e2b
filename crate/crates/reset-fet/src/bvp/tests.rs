use super::*;
use crate::analytic;
use crate::params::ResettingParams;

fn fig1_params() -> ResettingParams {
    ResettingParams::unit_interval(1.0, 1.0, 0.25, 1.0).unwrap()
}

fn max_err_against<F: Fn(f64) -> f64>(sol: &GridSolution, reference: F) -> f64 {
    sol.nodes
        .iter()
        .zip(&sol.values)
        .map(|(&x, &v)| (v - reference(x)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn reproduces_all_eight_defining_problems_at_n_2000() {
    let p = fig1_params();
    let q = ResettingParams::unit_interval(0.0, 0.5, 0.125, 1.0).unwrap();
    let n = 2000;

    // 1. exit probability: L u = 0, u(0) = 1, u(b) = 0
    let sol = resetting_problem(&p, |_| 0.0, |_| 0.0, 1.0, 0.0, n).solve().unwrap();
    assert!(max_err_against(&sol, |x| analytic::exit_prob_left(&p, x).unwrap()) < 1e-5);

    // 2. mean FET: L u = -1, zero boundary values
    let sol = resetting_problem(&p, |_| 0.0, |_| -1.0, 0.0, 0.0, n).solve().unwrap();
    assert!(max_err_against(&sol, |x| analytic::fet_mean(&p, x).unwrap()) < 1e-5);

    // 3. second FET moment: L u = -2 E[tau]
    let pp = p;
    let sol = resetting_problem(&p, |_| 0.0, move |x| -2.0 * analytic::fet_mean(&pp, x).unwrap(), 0.0, 0.0, n)
        .solve()
        .unwrap();
    assert!(max_err_against(&sol, |x| analytic::fet_second_moment(&p, x).unwrap()) < 1e-5);

    // 4. area mean (mu = 0): L u = -x
    let sol = resetting_problem(&q, |_| 0.0, |x| -x, 0.0, 0.0, n).solve().unwrap();
    assert!(max_err_against(&sol, |x| analytic::fea_mean_undrifted(&q, x).unwrap()) < 1e-5);

    // 5. area second moment: L u = -2 x E[A]
    let qq = q;
    let sol = resetting_problem(&q, |_| 0.0, move |x| -2.0 * x * analytic::fea_mean_undrifted(&qq, x).unwrap(), 0.0, 0.0, n)
        .solve()
        .unwrap();
    assert!(max_err_against(&sol, |x| analytic::fea_second_moment_undrifted(&q, x).unwrap()) < 1e-5);

    // 6. joint moment: L u = -x E[tau] - E[A]
    let sol = resetting_problem(
        &q,
        |_| 0.0,
        move |x| -x * analytic::fet_mean(&qq, x).unwrap() - analytic::fea_mean_undrifted(&qq, x).unwrap(),
        0.0,
        0.0,
        n,
    )
    .solve()
    .unwrap();
    assert!(max_err_against(&sol, |x| analytic::joint_moment_tau_area_undrifted(&q, x).unwrap()) < 1e-5);

    // 7. max law: exit-left problem on the subinterval (0, z), z >= x_R
    let z = 0.8;
    let sub = ResettingParams::unit_interval(p.mu, p.r, p.x_reset, z).unwrap();
    let sol = resetting_problem(&sub, |_| 0.0, |_| 0.0, 1.0, 0.0, n).solve().unwrap();
    let err = sol
        .nodes
        .iter()
        .zip(&sol.values)
        .filter(|(&x, _)| x > 0.0 && x < z)
        .map(|(&x, &v)| (v - analytic::max_exit_joint_cdf(&p, x, z).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-5, "max law: {err:.2e}");

    // 8. min law: exit-right problem on (z, b), z <= x_R
    let z = 0.2;
    let sub = ResettingParams::new(p.mu, p.r, p.x_reset, z, 1.0).unwrap();
    let sol = resetting_problem(&sub, |_| 0.0, |_| 0.0, 0.0, 1.0, n).solve().unwrap();
    let err = sol
        .nodes
        .iter()
        .zip(&sol.values)
        .filter(|(&x, _)| x > z && x < 1.0)
        .map(|(&x, &v)| (v - analytic::min_exit_joint_survival(&p, x, z).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-5, "min law: {err:.2e}");
}

#[test]
fn second_order_convergence_slope() {
    // x_reset on-grid for every size, so the pure truncation order shows
    // (an off-grid reset point adds an interpolation error component of the
    // same order but varying sign, which muddies the fit at coarse n)
    let p = ResettingParams::unit_interval(1.0, 1.0, 0.2, 1.0).unwrap();
    let mut errs = Vec::new();
    for &n in &[250usize, 500, 1000, 2000] {
        let sol = resetting_problem(&p, |_| 0.0, |_| 0.0, 1.0, 0.0, n).solve().unwrap();
        errs.push((n as f64, max_err_against(&sol, |x| analytic::exit_prob_left(&p, x).unwrap())));
    }
    // least-squares slope of log(err) against log(n)
    let logs: Vec<(f64, f64)> = errs.iter().map(|&(n, e)| (n.ln(), e.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / logs.len() as f64;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / logs.len() as f64;
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(
        (-slope - 2.0).abs() <= 0.2,
        "expected O(h^2), got error ~ n^{slope:.3}: {errs:?}"
    );
}

#[test]
fn undrifted_no_reset_mean_is_exact_parabola() {
    let p = ResettingParams::unit_interval(0.0, 0.0, 0.5, 1.0).unwrap();
    let sol = resetting_problem(&p, |_| 0.0, |_| -1.0, 0.0, 0.0, 2000).solve().unwrap();
    // the scheme integrates quadratics exactly
    assert!(max_err_against(&sol, |x| x * (1.0 - x)) < 1e-8);
}

#[test]
fn discrete_maximum_principle_spot_check() {
    let p = fig1_params();
    let sol = resetting_problem(&p, |_| 0.0, |_| -1.0, 0.0, 0.0, 512).solve().unwrap();
    assert!(sol.values.iter().all(|&v| v >= -1e-10));
}

#[test]
fn residual_is_small() {
    let p = fig1_params();
    let sol = resetting_problem(&p, |_| 0.0, |_| -1.0, 0.0, 0.0, 2000).solve().unwrap();
    assert!(sol.residual < 1e-10, "residual {:.2e}", sol.residual);
}

#[test]
fn reset_value_is_interpolated_solution() {
    let p = fig1_params();
    let sol = resetting_problem(&p, |_| 0.0, |_| -1.0, 0.0, 0.0, 1000).solve().unwrap();
    assert!((sol.reset_value - sol.interpolate(0.25)).abs() < 1e-14);
    assert!((sol.reset_value - analytic::fet_mean(&p, 0.25).unwrap()).abs() < 1e-5);
}

#[test]
fn peclet_guard_fires() {
    let p = ResettingParams::unit_interval(40.0, 1.0, 0.5, 1.0).unwrap();
    let err = resetting_problem(&p, |_| 0.0, |_| -1.0, 0.0, 0.0, 20).solve().unwrap_err();
    assert!(matches!(err, crate::error::Error::GridTooCoarse(_)), "{err}");
}

#[test]
fn grid_size_minimum_enforced() {
    let p = fig1_params();
    assert!(resetting_problem(&p, |_| 0.0, |_| 0.0, 1.0, 0.0, 8).solve().is_err());
}

#[test]
fn refinement_check_passes_smooth_problem() {
    let p = fig1_params();
    let sol = resetting_problem(&p, |_| 0.0, |_| -1.0, 0.0, 0.0, 500)
        .solve_checked(1e-5)
        .unwrap();
    assert_eq!(sol.nodes.len(), 1001);
    let err = resetting_problem(&p, |_| 0.0, |_| -1.0, 0.0, 0.0, 32).solve_checked(1e-9);
    assert!(matches!(err, Err(crate::error::Error::GridTooCoarse(_))));
}

#[test]
fn variable_coefficients_accepted() {
    // Ornstein-Uhlenbeck-like drift as a stretch test: mu(x) = -2(x - 0.5)
    let problem = NonlocalBvpProblem {
        sigma: |_| 1.0,
        mu: |x: f64| -2.0 * (x - 0.5),
        r: 1.0,
        x_reset: 0.25,
        c: |_| 0.0,
        rhs: |_| -1.0,
        left_bc: 0.0,
        right_bc: 0.0,
        a: 0.0,
        b: 1.0,
        n: 1000,
    };
    let sol = problem.solve_checked(1e-6).unwrap();
    assert!(sol.values.iter().all(|&v| v >= 0.0));
    assert!(sol.reset_value > 0.0);
}

#[test]
fn fea_lt_numeric_basics() {
    let q = ResettingParams::unit_interval(0.0, 0.5, 0.125, 1.0).unwrap();
    assert_eq!(fea_lt_numeric(&q, 0.4, 0.0).unwrap(), 1.0);
    let n1 = fea_lt_numeric(&q, 0.4, 0.5).unwrap();
    let n2 = fea_lt_numeric(&q, 0.4, 2.0).unwrap();
    assert!(0.0 < n2 && n2 < n1 && n1 < 1.0, "N decreasing: {n1}, {n2}");
    assert!(fea_lt_numeric(&q, 0.4, -1.0).is_err());
}

#[test]
fn fea_lt_moment_relation() {
    // -dN/dlambda at 0 equals E[A] (mu = 0)
    let q = ResettingParams::unit_interval(0.0, 0.5, 0.125, 1.0).unwrap();
    for &x in &[0.3, 0.7] {
        let h = 1e-3;
        let d1 = -(fea_lt_numeric_n(&q, x, h, 4000).unwrap() - 1.0) / h;
        let d2 = -(fea_lt_numeric_n(&q, x, h / 2.0, 4000).unwrap() - 1.0) / (h / 2.0);
        let extr = 2.0 * d2 - d1;
        let want = analytic::fea_mean_undrifted(&q, x).unwrap();
        assert!(
            (extr / want - 1.0).abs() < 1e-4,
            "moment relation at x = {x}: {extr} vs {want}"
        );
    }
}

#[test]
fn fea_lt_airy_matches_numeric_and_boundary_conditions() {
    assert!((fea_lt_airy(1.0, 0.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
    assert!((fea_lt_airy(1.0, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
    let free = ResettingParams {
        mu: 0.0,
        r: 0.0,
        x_reset: 0.5,
        a: 0.0,
        b: 1.0,
    };
    for &lam in &[0.5, 2.0, 10.0] {
        for i in 1..8 {
            let x = i as f64 / 8.0;
            let airy_val = fea_lt_airy(1.0, x, lam).unwrap();
            let fd = fea_lt_numeric_n(&free, x, lam, 4000).unwrap();
            assert!(
                (airy_val - fd).abs() < 1e-6,
                "lambda = {lam}, x = {x}: airy {airy_val} vs fd {fd}"
            );
        }
    }
}
