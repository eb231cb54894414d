//! The acceptance suite: ten property checks with measured values.
//!
//! Each check returns a [`CriterionResult`] holding the numbers it measured
//! and whether they met the thresholds in [`Tolerances`]. Random draws use
//! SplitMix64 seeded from the run seed and the criterion number, so a
//! report is reproducible from its seed.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifacts::Polynomial;
use crate::christoffel::{christoffel_lambda, christoffel_ratio, ChristoffelEvaluator};
use crate::config::{RunConfig, Tolerances};
use crate::cubature::{build_cubature_with, verify_rule, CubatureOptions};
use crate::cutoff::Cutoff;
use crate::error::{Error, Result};
use crate::geometry::{build_point_set, cell_inclusion_check, subdivision_count, MembershipIndex};
use crate::kernels::{
    apply_operator, ball_distance, boundary_gap, norm_sq, weight_cal_w, BallWeightParams, JacobiKernel,
    LocalizedKernel, ProjectorSeries,
};
use crate::needlets::{
    build_frame_with, decay_ratio, needlet_eval, needlet_norms, parseval_check, synthesize_many, FrameOptions,
    NeedletFrame,
};
use crate::orthopoly::{gauss_jacobi, jacobi_eval_all, jacobi_h, JacobiParams};
use crate::quadrature::BallRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Orthonormality,
    Kernel,
    Reproduction,
    Localization,
    Cubature,
    Partition,
    Parseval,
    Decay,
    Metric,
    Christoffel,
}

impl Criterion {
    pub const ALL: [Criterion; 10] = [
        Criterion::Orthonormality,
        Criterion::Kernel,
        Criterion::Reproduction,
        Criterion::Localization,
        Criterion::Cubature,
        Criterion::Partition,
        Criterion::Parseval,
        Criterion::Decay,
        Criterion::Metric,
        Criterion::Christoffel,
    ];

    /// Position in the suite, from 1.
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Orthonormality => "orthonormality",
            Criterion::Kernel => "kernel",
            Criterion::Reproduction => "reproduction",
            Criterion::Localization => "localization",
            Criterion::Cubature => "cubature",
            Criterion::Partition => "partition",
            Criterion::Parseval => "parseval",
            Criterion::Decay => "decay",
            Criterion::Metric => "metric",
            Criterion::Christoffel => "christoffel",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    /// Accepts a name or a number `1..=10`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Ok(k) = s.parse::<usize>() {
            if (1..=10).contains(&k) {
                return Ok(Self::ALL[k - 1]);
            }
        }
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown criterion `{s}`")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip)]
    pub seconds: f64,
    pub measured: BTreeMap<String, Value>,
    /// Human-readable reasons for a failure, empty on success.
    pub failures: Vec<String>,
}

impl CriterionResult {
    /// One-line summary: `[PASS] 7 parseval (12.3 s)`.
    pub fn line(&self) -> String {
        let mut s = format!(
            "[{}] {:>2} {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds
        );
        if !self.failures.is_empty() {
            s.push_str(": ");
            s.push_str(&self.failures.join("; "));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceReport {
    pub passed: bool,
    pub tolerances: Tolerances,
    pub criteria: Vec<CriterionResult>,
}

/// Collects measurements and failure reasons for one criterion.
struct Probe {
    measured: BTreeMap<String, Value>,
    failures: Vec<String>,
}

impl Probe {
    fn new() -> Self {
        Self {
            measured: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    fn put(&mut self, key: impl Into<String>, v: impl Serialize) {
        self.measured.insert(key.into(), json!(v));
    }

    fn require(&mut self, ok: bool, why: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(why());
        }
    }
}

/// Lazily built needlet frames, shared by the frame criteria.
struct Frames {
    levels: usize,
    built: BTreeMap<u64, (NeedletFrame, f64)>,
}

impl Frames {
    fn get(&mut self, mu: f64) -> Result<&(NeedletFrame, f64)> {
        let key = mu.to_bits();
        if !self.built.contains_key(&key) {
            let t = Instant::now();
            let frame = build_frame_with(BallWeightParams::new(mu, 2)?, self.levels, &FrameOptions::default())?;
            self.built.insert(key, (frame, t.elapsed().as_secs_f64()));
        }
        Ok(&self.built[&key])
    }
}

const FRAME_MUS: [f64; 3] = [0.0, 0.5, 1.0];

/// Runs the selected criteria (all when `only` is empty) in suite order.
pub fn run(cfg: &RunConfig, only: &[Criterion]) -> Result<AcceptanceReport> {
    cfg.validate()?;
    let mut selected: Vec<Criterion> = if only.is_empty() { Criterion::ALL.to_vec() } else { only.to_vec() };
    selected.sort();
    selected.dedup();
    let mut frames = Frames {
        levels: cfg.levels.max(5),
        built: BTreeMap::new(),
    };
    let mut criteria = Vec::with_capacity(selected.len());
    for c in selected {
        criteria.push(run_one(cfg, c, &mut frames)?);
    }
    Ok(AcceptanceReport {
        passed: criteria.iter().all(|c| c.passed),
        tolerances: cfg.tol,
        criteria,
    })
}

/// Runs a single criterion.
pub fn run_criterion(cfg: &RunConfig, c: Criterion) -> Result<CriterionResult> {
    cfg.validate()?;
    let mut frames = Frames {
        levels: cfg.levels.max(5),
        built: BTreeMap::new(),
    };
    run_one(cfg, c, &mut frames)
}

fn run_one(cfg: &RunConfig, c: Criterion, frames: &mut Frames) -> Result<CriterionResult> {
    let t = Instant::now();
    let mut probe = Probe::new();
    let mut rng = SplitMix64::seed_from_u64(cfg.seed ^ (c.number() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    match c {
        Criterion::Orthonormality => orthonormality(cfg, &mut probe)?,
        Criterion::Kernel => kernel_equivalence(cfg, &mut probe, &mut rng)?,
        Criterion::Reproduction => reproduction(cfg, &mut probe, &mut rng)?,
        Criterion::Localization => localization(cfg, &mut probe)?,
        Criterion::Cubature => cubature(cfg, &mut probe)?,
        Criterion::Partition => partition(cfg, &mut probe, &mut rng)?,
        Criterion::Parseval => tight_frame(cfg, &mut probe, &mut rng, frames)?,
        Criterion::Decay => decay(cfg, &mut probe, frames)?,
        Criterion::Metric => metric(cfg, &mut probe, &mut rng),
        Criterion::Christoffel => christoffel(cfg, &mut probe)?,
    }
    let seconds = t.elapsed().as_secs_f64();
    let budget = match c {
        Criterion::Orthonormality => Some(5.0),
        Criterion::Kernel => Some(30.0),
        Criterion::Cubature => Some(300.0),
        Criterion::Parseval => Some(600.0),
        Criterion::Metric => Some(1.0),
        _ => None,
    };
    if let Some(b) = budget {
        probe.put("runtime_budget_s", b);
        probe.require(seconds < b, || format!("runtime {seconds:.2} s exceeds {b} s"));
    }
    Ok(CriterionResult {
        id: c.number(),
        name: c.name(),
        passed: probe.failures.is_empty(),
        seconds,
        measured: probe.measured,
        failures: probe.failures,
    })
}

fn random_ball_point(rng: &mut SplitMix64, d: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if norm_sq(&x) < 1.0 {
            return x;
        }
    }
}

/// Half uniform in the ball, half crowded towards the boundary sphere.
fn mixed_ball_point(rng: &mut SplitMix64, d: usize) -> Vec<f64> {
    let x = random_ball_point(rng, d);
    if rng.gen_bool(0.5) {
        return x;
    }
    let r = norm_sq(&x).sqrt();
    if r == 0.0 {
        return x;
    }
    let target = 1.0 - rng.gen_range(0.0f64..1.0).powi(4);
    x.iter().map(|v| v / r * target).collect()
}

/// Points `(r cos θ, r sin θ)` with radii clustered towards the boundary.
fn polar_grid(radii: usize, angles: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(radii * angles + 1);
    out.push([0.0, 0.0]);
    for i in 1..=radii {
        let r = (PI / 2.0 * i as f64 / radii as f64).sin();
        for a in 0..angles {
            let th = 2.0 * PI * (a as f64 + 0.5 * (i % 2) as f64) / angles as f64;
            out.push([r * th.cos(), r * th.sin()]);
        }
    }
    out
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0f64, f64::max)
}

fn orthonormality(cfg: &RunConfig, probe: &mut Probe) -> Result<()> {
    const N: usize = 50;
    for (a, b) in [(0.0, 0.0), (0.5, 0.5), (2.0, 0.5)] {
        let p = JacobiParams::new(a, b)?;
        let rule = gauss_jacobi(p, N + 2)?;
        let c = 1.0 / rule.total_weight();
        let values: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|&t| {
                let mut v = vec![0.0; N + 1];
                jacobi_eval_all(p, t, &mut v);
                v
            })
            .collect();
        let (mut off, mut diag) = (0.0f64, 0.0f64);
        for n in 0..=N {
            for m in 0..=n {
                let g = c * values
                    .iter()
                    .zip(&rule.weights)
                    .map(|(v, w)| w * v[n] * v[m])
                    .sum::<f64>();
                if n == m {
                    diag = diag.max((g / jacobi_h(p, n) - 1.0).abs());
                } else {
                    off = off.max(g.abs());
                }
            }
        }
        let key = format!("alpha={a},beta={b}");
        probe.put(format!("{key}.off_diagonal_max"), off);
        probe.put(format!("{key}.diagonal_rel_max"), diag);
        let tol = cfg.tol.orthonormality;
        probe.require(off < tol && diag < tol, || {
            format!("({a},{b}): off-diagonal {off:.2e}, diagonal {diag:.2e} vs {tol:.0e}")
        });
    }
    Ok(())
}

fn kernel_equivalence(cfg: &RunConfig, probe: &mut Probe, rng: &mut SplitMix64) -> Result<()> {
    for mu in [0.5, 1.0, 2.0] {
        let p = BallWeightParams::new(mu, 2)?;
        let series = ProjectorSeries::new(p, 32)?;
        let kernels: Vec<LocalizedKernel> = (1..=16)
            .map(|n| LocalizedKernel::new(p, n, cfg.cutoff))
            .collect::<Result<_>>()?;
        let mut proj = vec![0.0; 33];
        let mut worst = 0.0f64;
        for i in 0..100 {
            let k = &kernels[i % 16];
            let x = random_ball_point(rng, 2);
            let y = random_ball_point(rng, 2);
            series.eval_all(&x, &y, &mut proj);
            let direct: f64 = (0..=2 * k.n)
                .map(|j| cfg.cutoff.eval(j as f64 / k.n as f64) * proj[j])
                .sum();
            let integral = k.eval(&x, &y);
            // relative to the kernel scale; values near a zero crossing are judged absolutely
            worst = worst.max((integral - direct).abs() / direct.abs().max(1.0));
        }
        probe.put(format!("mu={mu}.max_rel_error"), worst);
        let tol = cfg.tol.kernel;
        probe.require(worst < tol, || format!("mu={mu}: error {worst:.2e} vs {tol:.0e}"));
    }
    Ok(())
}

fn reproduction(cfg: &RunConfig, probe: &mut Probe, rng: &mut SplitMix64) -> Result<()> {
    let p = BallWeightParams::new(cfg.mu, 2)?;
    for n in [4usize, 8, 16] {
        let k = LocalizedKernel::new(p, n, Cutoff::TypeA)?;
        let quad = BallRule::new(cfg.mu, 2, 3 * n)?;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let f = Polynomial::random(rng, 2, n);
            let xs: Vec<Vec<f64>> = (0..5).map(|_| random_ball_point(rng, 2)).collect();
            let scale = max_of(xs.iter().map(|x| f.eval(x).abs()));
            for x in &xs {
                let v = apply_operator(&k, |y| f.eval(y), Some(f.degree()), &quad, x)?;
                worst = worst.max((v - f.eval(x)).abs() / scale);
            }
        }
        probe.put(format!("n={n}.max_rel_error"), worst);
        let tol = cfg.tol.reproduction;
        probe.require(worst < tol, || format!("n={n}: error {worst:.2e} vs {tol:.0e}"));
    }
    probe.put("mu", cfg.mu);
    Ok(())
}

fn localization(cfg: &RunConfig, probe: &mut Probe) -> Result<()> {
    const K: i32 = 6;
    let scales = [16usize, 32, 64];
    let grid = polar_grid(32, 48);
    let anchors: [[f64; 2]; 5] = [[0.0, 0.0], [0.5, 0.2], [-0.3, 0.8], [0.9, 0.0], [0.0, -0.995]];
    for mu in [0.0, 1.0] {
        let p = BallWeightParams::new(mu, 2)?;
        let mut ratios = Vec::new();
        for &n in &scales {
            let k = LocalizedKernel::new(p, n, Cutoff::TypeA)?;
            let nf = n as f64;
            let sup = anchors
                .par_iter()
                .map(|y| {
                    let wy = weight_cal_w(&p, nf, y).sqrt();
                    max_of(grid.iter().map(|x| {
                        k.eval(x, y).abs() * weight_cal_w(&p, nf, x).sqrt() * wy * (1.0 + nf * ball_distance(x, y)).powi(K)
                            / (nf * nf)
                    }))
                })
                .reduce(|| 0.0, f64::max);
            ratios.push(sup);
        }
        let growth = ratios[2] / ratios[0];
        probe.put(format!("ball.mu={mu}.ratios"), &ratios);
        probe.put(format!("ball.mu={mu}.growth_16_to_64"), growth);
        let g = cfg.tol.growth;
        probe.require(growth <= g, || format!("ball mu={mu}: ratio grew {growth:.2}x from n=16 to 64"));
    }

    let jp = JacobiParams::new(0.5, 0.5)?;
    let mut ratios = Vec::new();
    for &n in &scales {
        let k = JacobiKernel::new(jp, n, Cutoff::TypeA)?;
        let nf = n as f64;
        let sup = max_of((0..=4000).map(|i| {
            let th = PI * i as f64 / 4000.0;
            k.eval_at_one(th.cos()).abs() * (1.0 + nf * th).powi(K) / nf.powf(2.0 * jp.alpha + 2.0)
        }));
        ratios.push(sup);
    }
    let growth = ratios[2] / ratios[0];
    probe.put("jacobi.ratios", &ratios);
    probe.put("jacobi.growth_16_to_64", growth);
    let g = cfg.tol.growth;
    probe.require(growth <= g, || format!("univariate: ratio grew {growth:.2}x from n=16 to 64"));
    Ok(())
}

fn cubature(cfg: &RunConfig, probe: &mut Probe) -> Result<()> {
    let opts = CubatureOptions {
        gamma: cfg.gamma,
        ..Default::default()
    };
    for mu in FRAME_MUS {
        let p = BallWeightParams::new(mu, 2)?;
        let mut bounds = Vec::new();
        for &n in &cfg.degrees {
            let key = format!("mu={mu}.n={n}");
            let rule = match build_cubature_with(mu, 2, n, cfg.delta, &opts) {
                Ok(r) => r,
                Err(e) => {
                    probe.require(false, || format!("{key}: {e}"));
                    continue;
                }
            };
            let report = verify_rule(&rule, 0)?;
            let chr = ChristoffelEvaluator::new(p, n / 2)?;
            let pts: Vec<&[f64]> = rule.points.iter().map(|x| &x.coords[..]).collect();
            let lam = chr.lambda_many(&pts);
            let chain = max_of(rule.weights.iter().zip(&lam).map(|(w, l)| w / l));
            probe.put(format!("{key}.points"), rule.len());
            probe.put(format!("{key}.delta"), rule.delta);
            probe.put(format!("{key}.residual_max"), report.residual_max_exact);
            probe.put(format!("{key}.min_weight"), report.min_weight);
            probe.put(format!("{key}.weight_over_christoffel_max"), chain);
            probe.put(format!("{key}.weight_ratio_bounds"), rule.weight_ratio_bounds);
            let tol = cfg.tol.cubature;
            probe.require(report.residual_max_exact < tol, || {
                format!("{key}: residual {:.2e}", report.residual_max_exact)
            });
            probe.require(report.min_weight > 0.0, || format!("{key}: non-positive weight"));
            probe.require(chain <= 1.0 + 1e-6, || format!("{key}: weight exceeds Christoffel bound by {chain:.4}"));
            bounds.push(rule.weight_ratio_bounds);
        }
        if bounds.len() >= 2 {
            let (first, last) = (bounds[0], bounds[bounds.len() - 1]);
            let upper_drift = last.1 / first.1 - 1.0;
            let lower_drift = first.0 / last.0 - 1.0;
            probe.put(format!("mu={mu}.upper_drift"), upper_drift);
            probe.put(format!("mu={mu}.lower_drift"), lower_drift);
            let dr = cfg.tol.drift;
            probe.require(upper_drift < dr, || {
                format!("mu={mu}: upper weight ratio grew {:.1}% across n", 100.0 * upper_drift)
            });
            probe.require(lower_drift < dr, || {
                format!("mu={mu}: lower weight ratio shrank {:.1}% across n", 100.0 * lower_drift)
            });
        }
    }
    Ok(())
}

fn partition(cfg: &RunConfig, probe: &mut Probe, rng: &mut SplitMix64) -> Result<()> {
    let d = 2;
    let mut inner_ratios = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let key = format!("epsilon={eps}");
        let set = build_point_set(eps, d, cfg.mu)?;
        let m = subdivision_count(eps, d);
        let expected = (1usize << d) * m.pow(d as u32);
        probe.put(format!("{key}.points"), set.len());
        probe.require(set.len() == expected, || format!("{key}: {} points, expected 2^d M^d = {expected}", set.len()));

        let radii: Vec<(f64, f64)> = set.cells.par_iter().map(|c| cell_inclusion_check(c, 8)).collect();
        let r_outer = max_of(radii.iter().map(|r| r.1));
        let r_inner = radii.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        probe.put(format!("{key}.r_outer_max"), r_outer);
        probe.put(format!("{key}.r_inner_min_over_epsilon"), r_inner / eps);
        probe.require(r_outer <= eps * (1.0 + 1e-12), || format!("{key}: r_outer {r_outer:.4} > epsilon"));
        probe.require(r_inner > 0.0, || format!("{key}: degenerate cell"));
        inner_ratios.push(r_inner / eps);

        let index = MembershipIndex::new(&set);
        let samples: Vec<Vec<f64>> = (0..4000).map(|_| mixed_ball_point(rng, d)).collect();
        let (mut uncovered, mut overlapped) = (0usize, 0usize);
        for x in &samples {
            let mem = index.membership(x, 1e-12);
            if mem.interior + mem.boundary == 0 {
                uncovered += 1;
            }
            if mem.interior > 1 || (mem.interior == 1 && mem.boundary > 0) {
                overlapped += 1;
            }
        }
        probe.put(format!("{key}.samples"), samples.len());
        probe.put(format!("{key}.uncovered"), uncovered);
        probe.put(format!("{key}.overlapped"), overlapped);
        probe.require(uncovered == 0 && overlapped == 0, || {
            format!("{key}: {uncovered} uncovered and {overlapped} overlapping samples")
        });
    }
    let lo = inner_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = max_of(inner_ratios.iter().copied());
    let spread = hi / lo - 1.0;
    probe.put("r_inner_ratio_spread", spread);
    let dr = cfg.tol.drift;
    probe.require(spread < dr, || format!("min r_inner/epsilon varies {:.0}% across epsilon", 100.0 * spread));
    Ok(())
}

fn tight_frame(cfg: &RunConfig, probe: &mut Probe, rng: &mut SplitMix64, frames: &mut Frames) -> Result<()> {
    let grid: Vec<[f64; 2]> = polar_grid(10, 20).into_iter().take(200).collect();
    let xs: Vec<&[f64]> = grid.iter().map(|x| &x[..]).collect();
    let j_used = cfg.levels;
    for mu in FRAME_MUS {
        let (frame, secs) = frames.get(mu)?;
        let key = format!("mu={mu}");
        probe.put(format!("{key}.frame_build_s"), *secs);
        probe.put(format!("{key}.frame_elements"), frame.total_elements());
        let (mut gap, mut recon) = (0.0f64, 0.0f64);
        for i in 0..50 {
            let degree = 1 + i % 8;
            let f = Polynomial::random(rng, 2, degree);
            let fx = |x: &[f64]| f.eval(x);
            let (report, coeffs) = parseval_check(frame, &fx, degree, j_used)?;
            gap = gap.max(report.rel_gap);
            let approx = synthesize_many(frame, &coeffs, &xs)?;
            let exact: Vec<f64> = xs.iter().map(|x| f.eval(x)).collect();
            let scale = max_of(exact.iter().map(|v| v.abs()));
            recon = recon.max(max_of(approx.iter().zip(&exact).map(|(a, b)| (a - b).abs())) / scale);
        }
        probe.put(format!("{key}.parseval_rel_gap_max"), gap);
        probe.put(format!("{key}.reconstruction_rel_error_max"), recon);
        let (tp, tr) = (cfg.tol.parseval, cfg.tol.reconstruction);
        probe.require(gap < tp, || format!("{key}: Parseval gap {gap:.2e}"));
        probe.require(recon < tr, || format!("{key}: reconstruction error {recon:.2e}"));
    }
    probe.put("J", j_used);
    Ok(())
}

fn decay(cfg: &RunConfig, probe: &mut Probe, frames: &mut Frames) -> Result<()> {
    const K: i32 = 5;
    const KNOTS: usize = 30;
    let grid = polar_grid(40, 48);
    for mu in FRAME_MUS {
        let (frame, _) = frames.get(mu)?;
        let key = format!("mu={mu}");
        let mut sups = Vec::new();
        for j in 3..=5 {
            let len = frame.levels[j].len();
            let knots: Vec<usize> = (0..KNOTS).map(|s| (s * 7919) % len).collect();
            let sup = knots
                .par_iter()
                .map(|&i| {
                    grid.iter()
                        .map(|x| decay_ratio(frame, j, i, x, K))
                        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
                })
                .collect::<Result<Vec<f64>>>()?;
            sups.push(max_of(sup));

            let norms = needlet_norms(frame, j)?;
            let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = max_of(norms.iter().copied());
            let below = norms.iter().filter(|v| **v < cfg.tol.norm_lower).count();
            let above = norms.iter().filter(|v| **v > cfg.tol.norm_upper).count();
            let lkey = format!("{key}.j={j}");
            probe.put(format!("{lkey}.norm_min"), lo);
            probe.put(format!("{lkey}.norm_max"), hi);
            probe.put(format!("{lkey}.knots"), norms.len());
            probe.put(format!("{lkey}.knots_outside_bracket"), below + above);
            probe.require(below + above == 0, || {
                format!(
                    "{lkey}: {} of {} norms outside [{}, {}] (min {lo:.4})",
                    below + above,
                    norms.len(),
                    cfg.tol.norm_lower,
                    cfg.tol.norm_upper
                )
            });

            // the closed form for the norm against a direct integral, at a few knots
            let rule = BallRule::new(mu, 2, 2 * frame.levels[j].kernel_degree())?;
            let worst = knots
                .iter()
                .take(3)
                .map(|&i| {
                    let direct = rule.integrate(|y| needlet_eval(frame, j, i, y).unwrap_or(f64::NAN).powi(2)).sqrt();
                    (direct - norms[i]).abs() / direct
                })
                .fold(0.0f64, f64::max);
            probe.put(format!("{lkey}.norm_identity_rel_error"), worst);
            probe.require(worst < 1e-8, || format!("{lkey}: norm identity off by {worst:.2e}"));
        }
        let growth = [sups[1] / sups[0], sups[2] / sups[1]];
        probe.put(format!("{key}.decay_sup"), &sups);
        probe.put(format!("{key}.decay_growth"), growth);
        let g = cfg.tol.growth;
        for (step, v) in growth.iter().enumerate() {
            probe.require(*v < g, || format!("{key}: decay ratio grew {v:.2}x from j={} to j={}", step + 3, step + 4));
        }
    }
    Ok(())
}

fn metric(cfg: &RunConfig, probe: &mut Probe, rng: &mut SplitMix64) {
    let slack = cfg.tol.metric;
    let (mut symmetry, mut identity, mut triangle, mut dist1, mut dist2) = (0usize, 0usize, 0usize, 0usize, 0usize);
    let mut worst_identity = 0.0f64;
    const PAIRS: usize = 10_000;
    for _ in 0..PAIRS {
        let x = mixed_ball_point(rng, 2);
        let y = mixed_ball_point(rng, 2);
        let z = mixed_ball_point(rng, 2);
        let dxy = ball_distance(&x, &y);
        if dxy != ball_distance(&y, &x) {
            symmetry += 1;
        }
        let dxx = ball_distance(&x, &x);
        worst_identity = worst_identity.max(dxx);
        if dxx > slack || (x != y && dxy == 0.0) {
            identity += 1;
        }
        if dxy > ball_distance(&x, &z) + ball_distance(&z, &y) + slack {
            triangle += 1;
        }
        let (nx, ny) = (norm_sq(&x).sqrt(), norm_sq(&y).sqrt());
        let (gx, gy) = (boundary_gap(&x), boundary_gap(&y));
        if (nx - ny).abs() > dxy * (gx + gy) / 2f64.sqrt() + slack {
            dist1 += 1;
        }
        if (gx - gy).abs() > 2f64.sqrt() * dxy + slack {
            dist2 += 1;
        }
    }
    probe.put("pairs", PAIRS);
    probe.put("symmetry_violations", symmetry);
    probe.put("identity_violations", identity);
    probe.put("self_distance_max", worst_identity);
    probe.put("triangle_violations", triangle);
    probe.put("norm_distance_violations", dist1);
    probe.put("gap_distance_violations", dist2);
    let total = symmetry + identity + triangle + dist1 + dist2;
    probe.require(total == 0, || {
        format!("violations: symmetry {symmetry}, identity {identity}, triangle {triangle}, norm {dist1}, gap {dist2}")
    });
}

fn christoffel(cfg: &RunConfig, probe: &mut Probe) -> Result<()> {
    let radii: Vec<f64> = (0..=40).map(|i| (PI / 2.0 * i as f64 / 40.0).sin()).collect();
    for mu in FRAME_MUS {
        let p = BallWeightParams::new(mu, 2)?;
        let mut sups = Vec::new();
        for n in [8usize, 16, 32] {
            let e = ChristoffelEvaluator::new(p, n)?;
            let ratios: Vec<f64> = radii.iter().map(|&r| christoffel_ratio(&e, &[r, 0.0])).collect();
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = max_of(ratios.iter().copied());
            let key = format!("mu={mu}.n={n}");
            probe.put(format!("{key}.ratio_min"), lo);
            probe.put(format!("{key}.ratio_max"), hi);
            probe.put(
                format!("{key}.lambda_at_center"),
                christoffel_lambda(&e, &[0.0, 0.0]),
            );
            probe.require(lo > 0.0 && hi.is_finite(), || format!("{key}: ratio not bounded ({lo}, {hi})"));
            sups.push(hi);
        }
        let dr = cfg.tol.drift;
        for w in sups.windows(2) {
            let growth = w[1] / w[0] - 1.0;
            probe.require(growth <= dr, || format!("mu={mu}: sup ratio grew {:.1}% with n", 100.0 * growth));
        }
        probe.put(format!("mu={mu}.sup_trend"), &sups);
    }
    Ok(())
}
