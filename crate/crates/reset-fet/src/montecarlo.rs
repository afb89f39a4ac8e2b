//! Exact-event-time simulation of drifted Brownian motion with Poissonian
//! resetting: the independent oracle behind every analytic claim.
//!
//! Paths advance by Gaussian increments of at most `dt`, truncated exactly at
//! the exponential reset epochs. With the bridge correction on, each step
//! samples the in-step minimum and maximum from the exact Brownian-bridge
//! extreme laws (`P[m <= y | endpoints] = exp(-2 (x1-y)(x2-y)/h)`), so a
//! boundary crossing is declared with exactly the probability
//! `exp(-2 d1 d2 / h)` demanded by the correction — and the recorded path
//! extremes carry only O(dt) bias instead of the O(sqrt(dt)) bias of
//! endpoint tracking, which the extreme-law oracles at n = 1e5 would
//! otherwise fail.
//!
//! Randomness comes from per-path counter-selected ChaCha streams keyed by
//! `(seed, path index)`, so results are bitwise reproducible for a fixed
//! seed and path count, independent of how many worker threads run.

use crate::analytic;
use crate::error::{Error, Result};
use crate::ifet::InitialDensity;
use crate::params::ResettingParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;

/// Simulation controls.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// Time step between Gaussian increments.
    pub dt: f64,
    /// Number of independent paths.
    pub n_paths: usize,
    /// Base seed; path `i` uses stream `i` of this seed.
    pub seed: u64,
    /// Sample in-step bridge extremes / crossings (on by default).
    pub bridge_correction: bool,
    /// Safety horizon; a path still alive at `t_cap` is an error, counted
    /// and reported by the estimators.
    pub t_cap: f64,
    /// Worker threads for the estimators (0 = library default).
    pub threads: usize,
}

impl SimConfig {
    /// Standard configuration: `dt = 1e-4 b^2`, bridge correction on,
    /// horizon `1e4` times the central expected FET.
    pub fn new(params: &ResettingParams, n_paths: usize, seed: u64) -> Result<Self> {
        let w = params.width();
        let mid = params.a + 0.5 * w;
        let scale = analytic::fet_mean(params, mid)?.max(1e-6 * w * w);
        Self {
            dt: 1e-4 * w * w,
            n_paths,
            seed,
            bridge_correction: true,
            t_cap: 1e4 * scale,
            threads: 0,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain(format!("dt = {} must be positive", self.dt)));
        }
        if self.n_paths == 0 {
            return Err(Error::domain("n_paths must be at least 1"));
        }
        if !(self.t_cap > 0.0 && self.t_cap.is_finite()) {
            return Err(Error::domain(format!("t_cap = {} must be finite and positive", self.t_cap)));
        }
        Ok(self)
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_bridge(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

/// Which end the path left through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitSide {
    Left,
    Right,
}

/// One simulated first-exit draw, in the original (untranslated) coordinates.
#[derive(Debug, Clone, Copy)]
pub struct FirstExitSample {
    pub tau: f64,
    /// Swept area `integral of X(t) dt` up to the exit.
    pub area: f64,
    pub side: ExitSide,
    pub max: f64,
    pub min: f64,
    pub resets: u32,
}

fn path_rng(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Simulate one first-exit sample from a fixed interior start.
pub fn sample_first_exit(
    params: &ResettingParams,
    x0: f64,
    config: &SimConfig,
    stream_id: u64,
) -> Result<FirstExitSample> {
    config.validated()?;
    let (p, start) = params.translate_to_origin(x0)?;
    if !(0.0 < start && start < p.b) {
        return Err(Error::domain(format!(
            "start x0 = {x0} must be strictly inside ({}, {})",
            params.a, params.b
        )));
    }
    let mut rng = path_rng(config.seed, stream_id);
    let sample = simulate(&p, start, config, &mut rng)?;
    Ok(translate_back(sample, params.a))
}

fn translate_back(s: FirstExitSample, a: f64) -> FirstExitSample {
    FirstExitSample {
        tau: s.tau,
        area: s.area + a * s.tau,
        side: s.side,
        max: s.max + a,
        min: s.min + a,
        resets: s.resets,
    }
}

/// Core path loop on the translated interval `(0, b)`.
fn simulate(
    p: &ResettingParams,
    start: f64,
    config: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Result<FirstExitSample> {
    let b = p.b;
    let exp_reset = if p.r > 0.0 { Some(Exp::new(p.r).expect("r > 0")) } else { None };
    let draw_epoch = |rng: &mut ChaCha8Rng| -> f64 {
        exp_reset.map_or(f64::INFINITY, |d| d.sample(rng))
    };

    let mut pos = start;
    let mut t = 0.0;
    let mut area = 0.0;
    let mut max = start;
    let mut min = start;
    let mut resets: u32 = 0;
    let mut next_reset = draw_epoch(rng);

    loop {
        if t >= config.t_cap {
            return Err(Error::HorizonExceeded { t_cap: config.t_cap, resets: resets as u64 });
        }
        let h = config.dt.min(next_reset - t).max(1e-300);
        let z: f64 = StandardNormal.sample(rng);
        let new_pos = pos + p.mu * h + h.sqrt() * z;
        t += h;

        // hard exits first: the endpoint itself left the interval
        if new_pos <= 0.0 {
            area += 0.5 * (pos + 0.0) * h;
            return Ok(FirstExitSample { tau: t, area, side: ExitSide::Left, max, min: 0.0, resets });
        }
        if new_pos >= b {
            area += 0.5 * (pos + b) * h;
            return Ok(FirstExitSample { tau: t, area, side: ExitSide::Right, max: b, min, resets });
        }

        if config.bridge_correction {
            // exact bridge extremes for this step; crossing the boundary is
            // declared iff the sampled extreme reaches it, which happens with
            // probability exp(-2 d1 d2 / h) per boundary
            let u: f64 = rng.random();
            let m_step = 0.5 * (pos + new_pos - ((pos - new_pos).powi(2) - 2.0 * h * u.ln()).sqrt());
            let v: f64 = rng.random();
            let mx_step = 0.5 * (pos + new_pos + ((pos - new_pos).powi(2) - 2.0 * h * v.ln()).sqrt());
            if m_step <= 0.0 {
                area += 0.5 * (pos + new_pos) * h;
                return Ok(FirstExitSample { tau: t, area, side: ExitSide::Left, max, min: 0.0, resets });
            }
            if mx_step >= b {
                area += 0.5 * (pos + new_pos) * h;
                return Ok(FirstExitSample { tau: t, area, side: ExitSide::Right, max: b, min, resets });
            }
            min = min.min(m_step);
            max = max.max(mx_step);
        } else {
            min = min.min(new_pos);
            max = max.max(new_pos);
        }

        area += 0.5 * (pos + new_pos) * h;
        pos = new_pos;

        if t >= next_reset - 1e-15 {
            pos = p.x_reset;
            min = min.min(pos);
            max = max.max(pos);
            resets += 1;
            next_reset = t + draw_epoch(rng);
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

fn estimate_of(values: impl Iterator<Item = f64>, n: usize) -> Estimate {
    let vals: Vec<f64> = values.collect();
    debug_assert_eq!(vals.len(), n);
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
    Estimate { mean, std_err: (var / n as f64).sqrt(), n }
}

/// Aggregated statistics over all non-capped paths, with the empirical
/// extreme laws conditioned on exit side.
#[derive(Debug, Clone)]
pub struct EstimateSet {
    pub exit_left: Estimate,
    pub fet_mean: Estimate,
    pub fet_second: Estimate,
    pub area_mean: Estimate,
    pub area_second: Estimate,
    pub tau_area: Estimate,
    pub resets_mean: Estimate,
    /// Paths that hit the safety horizon (excluded from the estimates above
    /// but never silently dropped).
    pub horizon_exceeded: usize,
    /// Total paths attempted.
    pub n_paths: usize,
    maxima_given_left: Vec<f64>,
    minima_given_right: Vec<f64>,
}

impl EstimateSet {
    fn from_samples(samples: &[FirstExitSample], horizon_exceeded: usize, n_total: usize) -> Self {
        let n = samples.len();
        let mut maxima: Vec<f64> = samples
            .iter()
            .filter(|s| s.side == ExitSide::Left)
            .map(|s| s.max)
            .collect();
        maxima.sort_by(f64::total_cmp);
        let mut minima: Vec<f64> = samples
            .iter()
            .filter(|s| s.side == ExitSide::Right)
            .map(|s| s.min)
            .collect();
        minima.sort_by(f64::total_cmp);
        EstimateSet {
            exit_left: estimate_of(
                samples.iter().map(|s| if s.side == ExitSide::Left { 1.0 } else { 0.0 }),
                n,
            ),
            fet_mean: estimate_of(samples.iter().map(|s| s.tau), n),
            fet_second: estimate_of(samples.iter().map(|s| s.tau * s.tau), n),
            area_mean: estimate_of(samples.iter().map(|s| s.area), n),
            area_second: estimate_of(samples.iter().map(|s| s.area * s.area), n),
            tau_area: estimate_of(samples.iter().map(|s| s.tau * s.area), n),
            resets_mean: estimate_of(samples.iter().map(|s| s.resets as f64), n),
            horizon_exceeded,
            n_paths: n_total,
            maxima_given_left: maxima,
            minima_given_right: minima,
        }
    }

    fn count_le(sorted: &[f64], z: f64) -> usize {
        sorted.partition_point(|&v| v <= z)
    }

    /// Empirical joint law `P[max <= z, exit left]` with its standard error.
    pub fn max_joint_cdf(&self, z: f64) -> Estimate {
        let n = self.exit_left.n;
        let p = Self::count_le(&self.maxima_given_left, z) as f64 / n as f64;
        Estimate { mean: p, std_err: (p * (1.0 - p) / n as f64).sqrt(), n }
    }

    /// Empirical conditional CDF of the maximum given exit at the left end.
    pub fn max_conditional_cdf(&self, z: f64) -> Estimate {
        let m = self.maxima_given_left.len();
        let p = Self::count_le(&self.maxima_given_left, z) as f64 / m as f64;
        Estimate { mean: p, std_err: (p * (1.0 - p) / m as f64).sqrt(), n: m }
    }

    /// Empirical joint law `P[min > z, exit right]`.
    pub fn min_joint_survival(&self, z: f64) -> Estimate {
        let n = self.exit_left.n;
        let cnt = self.minima_given_right.len() - Self::count_le(&self.minima_given_right, z);
        let p = cnt as f64 / n as f64;
        Estimate { mean: p, std_err: (p * (1.0 - p) / n as f64).sqrt(), n }
    }

    /// Empirical conditional survival of the minimum given exit at the right.
    pub fn min_conditional_survival(&self, z: f64) -> Estimate {
        let m = self.minima_given_right.len();
        let cnt = m - Self::count_le(&self.minima_given_right, z);
        let p = cnt as f64 / m as f64;
        Estimate { mean: p, std_err: (p * (1.0 - p) / m as f64).sqrt(), n: m }
    }

    /// Empirical covariance of (tau, area) with a delta-method standard error.
    pub fn cov_tau_area(&self) -> Estimate {
        let cov = self.tau_area.mean - self.fet_mean.mean * self.area_mean.mean;
        // first-order propagation; adequate for the 3-sigma oracle checks
        let se = (self.tau_area.std_err.powi(2)
            + (self.area_mean.mean * self.fet_mean.std_err).powi(2)
            + (self.fet_mean.mean * self.area_mean.std_err).powi(2))
        .sqrt();
        Estimate { mean: cov, std_err: se, n: self.tau_area.n }
    }
}

fn run_parallel<F>(config: &SimConfig, job: F) -> Result<(Vec<FirstExitSample>, usize)>
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<FirstExitSample> + Sync,
{
    let worker = |i: u64| -> Result<FirstExitSample> {
        let mut rng = path_rng(config.seed, i);
        job(i, &mut rng)
    };
    let results: Vec<Result<FirstExitSample>> = if config.threads == 1 {
        (0..config.n_paths as u64).map(worker).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::numerical(format!("thread pool: {e}")))?;
        pool.install(|| (0..config.n_paths as u64).into_par_iter().map(worker).collect())
    };
    let mut samples = Vec::with_capacity(config.n_paths);
    let mut capped = 0usize;
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(Error::HorizonExceeded { .. }) => capped += 1,
            Err(e) => return Err(e),
        }
    }
    if samples.is_empty() {
        return Err(Error::numerical("every path hit the safety horizon"));
    }
    Ok((samples, capped))
}

/// Estimate all statistics from `n_paths` independent paths started at `x0`.
///
/// Deterministic for a fixed `(seed, n_paths)` regardless of `threads`.
pub fn estimate_statistics(
    params: &ResettingParams,
    x0: f64,
    config: &SimConfig,
) -> Result<EstimateSet> {
    config.validated()?;
    let (p, start) = params.translate_to_origin(x0)?;
    if !(0.0 < start && start < p.b) {
        return Err(Error::domain(format!("start x0 = {x0} must be interior")));
    }
    let a = params.a;
    let (samples, capped) = run_parallel(config, |_, rng| {
        simulate(&p, start, config, rng).map(|s| translate_back(s, a))
    })?;
    Ok(EstimateSet::from_samples(&samples, capped, config.n_paths))
}

/// Estimate with the starting position drawn per path from `density`.
///
/// A draw that lands exactly on a boundary exits immediately: `tau = 0`,
/// zero area, the exit side being that boundary.
pub fn estimate_with_random_start(
    density: &InitialDensity,
    params: &ResettingParams,
    config: &SimConfig,
) -> Result<EstimateSet> {
    config.validated()?;
    let (p, _) = params.translate_to_origin(params.a)?;
    let support = density.support_upper();
    if support > p.b + 1e-12 {
        return Err(Error::domain(format!(
            "density support [0, {support}] exceeds the interval (0, {})",
            p.b
        )));
    }
    density.sampleable()?;
    let a = params.a;
    let (samples, capped) = run_parallel(config, |_, rng| {
        let eta = density.sample(rng)?;
        if eta <= 0.0 || eta >= p.b {
            let side = if eta <= 0.0 { ExitSide::Left } else { ExitSide::Right };
            return Ok(translate_back(
                FirstExitSample { tau: 0.0, area: 0.0, side, max: eta.clamp(0.0, p.b), min: eta.clamp(0.0, p.b), resets: 0 },
                a,
            ));
        }
        simulate(&p, eta, config, rng).map(|s| translate_back(s, a))
    })?;
    Ok(EstimateSet::from_samples(&samples, capped, config.n_paths))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> ResettingParams {
        ResettingParams::unit_interval(1.0, 1.0, 0.25, 1.0).unwrap()
    }

    #[test]
    fn deterministic_replay() {
        let p = fig1();
        let cfg = SimConfig::new(&p, 1, 42).unwrap();
        let a = sample_first_exit(&p, 0.3, &cfg, 7).unwrap();
        let b = sample_first_exit(&p, 0.3, &cfg, 7).unwrap();
        assert_eq!(a.tau, b.tau);
        assert_eq!(a.area, b.area);
        assert_eq!(a.max, b.max);
        assert_eq!(a.resets, b.resets);
        let c = sample_first_exit(&p, 0.3, &cfg, 8).unwrap();
        assert_ne!(a.tau, c.tau);
    }

    #[test]
    fn estimates_independent_of_thread_count() {
        let p = fig1();
        let base = SimConfig::new(&p, 400, 9).unwrap().with_dt(1e-3);
        let one = estimate_statistics(&p, 0.3, &base.with_threads(1)).unwrap();
        let four = estimate_statistics(&p, 0.3, &base.with_threads(4)).unwrap();
        assert_eq!(one.fet_mean.mean.to_bits(), four.fet_mean.mean.to_bits());
        assert_eq!(one.tau_area.mean.to_bits(), four.tau_area.mean.to_bits());
    }

    #[test]
    fn sample_invariants_hold() {
        let p = fig1();
        let cfg = SimConfig::new(&p, 1, 3).unwrap().with_dt(5e-4);
        for stream in 0..400 {
            let s = sample_first_exit(&p, 0.3, &cfg, stream).unwrap();
            assert!(s.tau > 0.0);
            assert!(s.area >= 0.0 && s.area <= 1.0 * s.tau + 1e-12, "area {}", s.area);
            assert!(s.min >= 0.0 && s.max <= 1.0);
            assert!(s.min <= 0.3 && s.max >= 0.3);
            match s.side {
                ExitSide::Left => assert_eq!(s.min, 0.0),
                ExitSide::Right => assert_eq!(s.max, 1.0),
            }
        }
    }

    #[test]
    fn undrifted_no_reset_mean_matches_parabola() {
        let p = ResettingParams::unit_interval(0.0, 0.0, 0.5, 1.0).unwrap();
        let cfg = SimConfig::new(&p, 20_000, 11).unwrap();
        let est = estimate_statistics(&p, 0.5, &cfg).unwrap();
        let want = 0.25;
        assert!(
            (est.fet_mean.mean - want).abs() <= 3.0 * est.fet_mean.std_err,
            "E[tau] = {} +- {}, want {want}",
            est.fet_mean.mean,
            est.fet_mean.std_err
        );
        assert_eq!(est.horizon_exceeded, 0);
    }

    #[test]
    fn exit_side_and_moments_match_closed_forms() {
        let p = fig1();
        let cfg = SimConfig::new(&p, 30_000, 12).unwrap();
        let est = estimate_statistics(&p, 0.3, &cfg).unwrap();
        let pi0 = crate::analytic::exit_prob_left(&p, 0.3).unwrap();
        assert!(
            (est.exit_left.mean - pi0).abs() <= 3.0 * est.exit_left.std_err,
            "pi0: {} vs {pi0}",
            est.exit_left.mean
        );
        let m1 = crate::analytic::fet_mean(&p, 0.3).unwrap();
        assert!((est.fet_mean.mean - m1).abs() <= 3.0 * est.fet_mean.std_err + 2.0 * cfg.dt);
        let m2 = crate::analytic::fet_second_moment(&p, 0.3).unwrap();
        assert!((est.fet_second.mean - m2).abs() <= 3.0 * est.fet_second.std_err + 2.0 * cfg.dt);
    }

    #[test]
    fn reset_count_tracks_rate_times_mean() {
        let p = fig1();
        let cfg = SimConfig::new(&p, 20_000, 5).unwrap();
        let est = estimate_statistics(&p, 0.3, &cfg).unwrap();
        let want = p.r * crate::analytic::fet_mean(&p, 0.3).unwrap();
        assert!(
            (est.resets_mean.mean - want).abs() <= 3.0 * est.resets_mean.std_err + 0.01,
            "resets {} vs r E[tau] = {want}",
            est.resets_mean.mean
        );
    }

    #[test]
    fn dt_refinement_bias_is_first_order() {
        let p = ResettingParams::unit_interval(0.0, 0.0, 0.5, 1.0).unwrap();
        let coarse = SimConfig::new(&p, 40_000, 21).unwrap().with_dt(2e-3);
        let fine = coarse.with_dt(1e-3);
        let ec = estimate_statistics(&p, 0.5, &coarse).unwrap();
        let ef = estimate_statistics(&p, 0.5, &fine).unwrap();
        let se = (ec.fet_mean.std_err.powi(2) + ef.fet_mean.std_err.powi(2)).sqrt();
        let bound = 3.0 * se + 1.5 * coarse.dt;
        assert!(
            (ec.fet_mean.mean - ef.fet_mean.mean).abs() <= bound,
            "dt bias: {} vs {} (bound {bound})",
            ec.fet_mean.mean,
            ef.fet_mean.mean
        );
    }

    #[test]
    fn bridge_off_biases_tau_upward() {
        // without the correction, in-step crossings are missed and tau is
        // systematically overestimated
        let p = ResettingParams::unit_interval(0.0, 0.0, 0.5, 1.0).unwrap();
        let on = SimConfig::new(&p, 20_000, 31).unwrap().with_dt(2e-3);
        let off = on.with_bridge(false);
        let eon = estimate_statistics(&p, 0.5, &on).unwrap();
        let eoff = estimate_statistics(&p, 0.5, &off).unwrap();
        assert!(eoff.fet_mean.mean > eon.fet_mean.mean + 3.0 * eon.fet_mean.std_err);
    }

    #[test]
    fn random_start_degenerate_matches_fixed_start() {
        let p = fig1();
        let cfg = SimConfig::new(&p, 200, 17).unwrap().with_dt(1e-3);
        let fixed = estimate_statistics(&p, 0.3, &cfg).unwrap();
        let degenerate = InitialDensity::DiscreteUniform { points: vec![0.3] };
        let random = estimate_with_random_start(&degenerate, &p, &cfg).unwrap();
        assert_eq!(fixed.fet_mean.mean.to_bits(), random.fet_mean.mean.to_bits());
    }

    #[test]
    fn boundary_starts_exit_immediately() {
        let p = ResettingParams::unit_interval(0.0, 1.0, 0.5, 2.0).unwrap();
        let density = InitialDensity::DiscreteUniform { points: vec![0.0, 2.0] };
        let cfg = SimConfig::new(&p, 500, 23).unwrap();
        let est = estimate_with_random_start(&density, &p, &cfg).unwrap();
        assert_eq!(est.fet_mean.mean, 0.0);
        assert_eq!(est.area_mean.mean, 0.0);
        assert!(est.exit_left.mean > 0.3 && est.exit_left.mean < 0.7);
    }

    #[test]
    fn horizon_exceeded_is_reported() {
        let p = fig1();
        let mut cfg = SimConfig::new(&p, 1, 2).unwrap();
        cfg.t_cap = 1e-3; // absurdly tight horizon
        let err = sample_first_exit(&p, 0.3, &cfg, 0).unwrap_err();
        assert!(matches!(err, Error::HorizonExceeded { .. }), "{err}");
    }

    #[test]
    fn extreme_laws_match_closed_forms() {
        let p = fig1();
        let cfg = SimConfig::new(&p, 30_000, 8).unwrap();
        let est = estimate_statistics(&p, 0.3, &cfg).unwrap();
        for &z in &[0.4, 0.6, 0.8] {
            let mc = est.max_joint_cdf(z);
            let closed = crate::analytic::max_exit_joint_cdf(&p, 0.3, z).unwrap();
            assert!(
                (mc.mean - closed).abs() <= 3.0 * mc.std_err + 1e-3,
                "max law at z = {z}: {} vs {closed}",
                mc.mean
            );
        }
        for &z in &[0.1, 0.2, 0.28] {
            let mc = est.min_joint_survival(z);
            let closed = crate::analytic::min_exit_joint_survival(&p, 0.3, z).unwrap();
            assert!(
                (mc.mean - closed).abs() <= 3.0 * mc.std_err + 1e-3,
                "min law at z = {z}: {} vs {closed}",
                mc.mean
            );
        }
    }
}
