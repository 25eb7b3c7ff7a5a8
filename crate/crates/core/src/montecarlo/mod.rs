//! Direct simulation of the linking process on a finite vertex set.
//!
//! Every vertex gets a functionality drawn from `f`, contributing that many free
//! stubs. Edges join two distinct free stubs chosen uniformly at random, which is
//! the same as picking vertices with probability proportional to `m - n`.

mod dsu;

use std::collections::{BTreeMap, HashSet};
use std::io::{self, Write};

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::components::SizeDistribution;
use crate::dist::{DegreeDistribution, FunctionalityDistribution};
use crate::error::{Error, Result};
use crate::gelation::analyze_gelation;

pub use dsu::DisjointSets;

/// Consecutive rejected draws after which a run gives up on reaching its target.
pub const MAX_CONSECUTIVE_REJECTIONS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assignment {
    /// `round(f_m N)` vertices of each functionality, largest-remainder corrected.
    #[default]
    ExactQuota,
    /// Independent draws from `f`.
    Multinomial,
}

impl std::str::FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-quota" | "quota" => Ok(Assignment::ExactQuota),
            "multinomial" => Ok(Assignment::Multinomial),
            other => Err(Error::Parse(format!("unknown functionality assignment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCConfig {
    pub n_vertices: usize,
    pub f: FunctionalityDistribution,
    pub target_c: f64,
    pub runs: usize,
    pub seed: u64,
    pub assignment: Assignment,
    /// Resample draws whose two stubs sit on the same vertex.
    pub reject_self_loops: bool,
    /// Accept a second bond between an already linked pair.
    pub allow_multi_edges: bool,
}

impl MCConfig {
    pub fn new(f: FunctionalityDistribution, n_vertices: usize, target_c: f64) -> Self {
        Self {
            n_vertices,
            f,
            target_c,
            runs: 1,
            seed: 0,
            assignment: Assignment::default(),
            reject_self_loops: true,
            allow_multi_edges: true,
        }
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vertices == 0 || self.n_vertices > u32::MAX as usize {
            return Err(Error::domain(format!("vertex count {} out of range", self.n_vertices)));
        }
        if self.runs == 0 {
            return Err(Error::domain("at least one run is required"));
        }
        if !(0.0..=1.0).contains(&self.target_c) {
            return Err(Error::domain(format!("target conversion {} outside [0, 1]", self.target_c)));
        }
        Ok(())
    }
}

/// Outcome of a single simulated network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    /// `(size, number of components)`, ascending in size.
    pub component_counts: Vec<(usize, u64)>,
    /// Vertices per degree.
    pub degree_counts: Vec<u64>,
    pub largest: usize,
    pub stubs: usize,
    pub edges: usize,
    /// `2 edges / stubs`.
    pub achieved_c: f64,
    pub self_loops: u64,
    pub self_loop_rejections: u64,
    pub multi_edges: u64,
    pub multi_edge_rejections: u64,
}

fn assign_functionalities(cfg: &MCConfig, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let n = cfg.n_vertices;
    let species: Vec<(usize, f64)> = cfg.f.iter().collect();
    match cfg.assignment {
        Assignment::ExactQuota => {
            let mut counts: Vec<usize> = species.iter().map(|&(_, p)| (p * n as f64).floor() as usize).collect();
            let assigned: usize = counts.iter().sum();
            let mut order: Vec<usize> = (0..species.len()).collect();
            let rem = |i: usize| species[i].1 * n as f64 - counts[i] as f64;
            order.sort_by(|&a, &b| rem(b).total_cmp(&rem(a)).then(a.cmp(&b)));
            for &i in order.iter().cycle().take(n.saturating_sub(assigned)) {
                counts[i] += 1;
            }
            let mut out = Vec::with_capacity(n);
            for (&(m, _), &k) in species.iter().zip(&counts) {
                out.extend(std::iter::repeat_n(m as u32, k));
            }
            out.truncate(n);
            out
        }
        Assignment::Multinomial => {
            let dist = WeightedIndex::new(species.iter().map(|&(_, p)| p)).expect("validated distribution");
            (0..n).map(|_| species[rng.sample(&dist)].0 as u32).collect()
        }
    }
}

/// Simulates run number `run_index`; its random stream depends only on `(cfg.seed, run_index)`.
pub fn simulate_run(cfg: &MCConfig, run_index: usize) -> Result<RunResult> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run_index as u64);

    let func = assign_functionalities(cfg, &mut rng);
    let n = func.len();
    let mut owners: Vec<u32> = Vec::with_capacity(func.iter().map(|&m| m as usize).sum());
    for (v, &m) in func.iter().enumerate() {
        owners.extend(std::iter::repeat_n(v as u32, m as usize));
    }
    let stubs = owners.len();
    let target = ((cfg.target_c * stubs as f64 / 2.0).round() as usize).min(stubs / 2);

    let mut free = func.clone();
    let mut vertices_with_free = free.iter().filter(|&&k| k > 0).count();
    let mut dsu = DisjointSets::new(n);
    let mut bonds: HashSet<u64> = HashSet::new();
    let (mut self_loops, mut self_loop_rejections) = (0u64, 0u64);
    let (mut multi_edges, mut multi_edge_rejections) = (0u64, 0u64);
    let mut consecutive = 0u64;
    let mut edges = 0usize;

    while edges < target {
        let live = owners.len();
        if live < 2 || (cfg.reject_self_loops && vertices_with_free < 2) || consecutive >= MAX_CONSECUTIVE_REJECTIONS {
            break;
        }
        let i = rng.random_range(0..live);
        let mut j = rng.random_range(0..live - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (owners[i] as usize, owners[j] as usize);
        if a == b {
            if cfg.reject_self_loops {
                self_loop_rejections += 1;
                consecutive += 1;
                continue;
            }
            self_loops += 1;
        } else {
            let key = ((a.min(b) as u64) << 32) | a.max(b) as u64;
            if bonds.contains(&key) {
                if !cfg.allow_multi_edges {
                    multi_edge_rejections += 1;
                    consecutive += 1;
                    continue;
                }
                multi_edges += 1;
            } else {
                bonds.insert(key);
            }
        }
        consecutive = 0;
        owners.swap_remove(i.max(j));
        owners.swap_remove(i.min(j));
        for v in [a, b] {
            debug_assert!(free[v] > 0, "vertex {v} exceeded its functionality");
            free[v] -= 1;
            if free[v] == 0 {
                vertices_with_free -= 1;
            }
        }
        dsu.union(a, b);
        edges += 1;
    }

    let max_m = func.iter().copied().max().unwrap_or(0) as usize;
    let mut degree_counts = vec![0u64; max_m + 1];
    for (&m, &k) in func.iter().zip(&free) {
        degree_counts[(m - k) as usize] += 1;
    }
    let mut by_size: BTreeMap<usize, u64> = BTreeMap::new();
    for s in dsu.set_sizes() {
        *by_size.entry(s).or_default() += 1;
    }
    let largest = by_size.keys().next_back().copied().unwrap_or(0);

    Ok(RunResult {
        component_counts: by_size.into_iter().collect(),
        degree_counts,
        largest,
        stubs,
        edges,
        achieved_c: if stubs == 0 { 0.0 } else { 2.0 * edges as f64 / stubs as f64 },
        self_loops,
        self_loop_rejections,
        multi_edges,
        multi_edge_rejections,
    })
}

/// Run-averaged empirical distributions.
///
/// Histogram entries are fractions of all `n_vertices`, so post-gel the size
/// histogram sums to roughly `1 - g_f`. Standard errors are NaN for a single run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCEnsembleResult {
    pub n_vertices: usize,
    pub runs_completed: usize,
    /// Whether the largest component of each run was left out of `size_histogram`.
    pub post_gel: bool,
    /// `size_histogram[n - 1]`: mean fraction of vertices in finite components of size `n`.
    pub size_histogram: Vec<f64>,
    pub size_stderr: Vec<f64>,
    /// `degree_histogram[n]`: mean fraction of vertices of degree `n`.
    pub degree_histogram: Vec<f64>,
    pub degree_stderr: Vec<f64>,
    pub largest_fraction: f64,
    pub largest_fraction_stderr: f64,
    /// Mean size of the finite component holding a random sol vertex.
    pub mean_finite_size: f64,
    pub mean_finite_size_stderr: f64,
    pub achieved_c: f64,
    /// `(size, total count)` over all runs, the giant component included.
    pub component_totals: Vec<(usize, u64)>,
    pub self_loop_rejections: u64,
    pub multi_edges: u64,
}

impl MCEnsembleResult {
    pub fn w(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.size_histogram.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn w_stderr(&self, n: usize) -> f64 {
        if n == 0 || self.runs_completed < 2 {
            return f64::NAN;
        }
        self.size_stderr.get(n - 1).copied().unwrap_or(0.0)
    }
}

#[derive(Default, Clone, Copy)]
struct Accumulator {
    sum: u128,
    sum_sq: u128,
}

impl Accumulator {
    fn push(&mut self, k: u64) {
        self.sum += k as u128;
        self.sum_sq += (k as u128) * (k as u128);
    }

    /// Mean and standard error of `scale * k` over `runs` samples.
    fn moments(&self, runs: usize, scale: f64) -> (f64, f64) {
        let r = runs as u128;
        let mean = scale * self.sum as f64 / runs as f64;
        if runs < 2 {
            return (mean, f64::NAN);
        }
        let spread = r * self.sum_sq - self.sum * self.sum;
        let var = scale * scale * spread as f64 / (runs as f64 * (runs - 1) as f64);
        (mean, (var / runs as f64).sqrt())
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `cfg.runs` independent networks in parallel and averages them.
///
/// Per-run results are combined in run order, so the outcome does not depend on
/// the number of worker threads.
pub fn run_ensemble(cfg: &MCConfig) -> Result<MCEnsembleResult> {
    cfg.validate()?;
    let runs: Vec<RunResult> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| simulate_run(cfg, r))
        .collect::<Result<_>>()?;
    Ok(aggregate(cfg, &runs))
}

fn aggregate(cfg: &MCConfig, runs: &[RunResult]) -> MCEnsembleResult {
    let n_runs = runs.len();
    let inv_n = 1.0 / cfg.n_vertices as f64;
    let post_gel = analyze_gelation(&cfg.f).is_post_gel(cfg.target_c);

    let mut sizes: BTreeMap<usize, Accumulator> = BTreeMap::new();
    let mut totals: BTreeMap<usize, u64> = BTreeMap::new();
    let mut degrees: Vec<Accumulator> = Vec::new();
    let mut largest = Accumulator::default();
    let mut finite_means = Vec::with_capacity(n_runs);

    for run in runs {
        largest.push(run.largest as u64);
        let mut first_moment = 0u128;
        let mut second_moment = 0u128;
        for &(s, k) in &run.component_counts {
            *totals.entry(s).or_default() += k;
            let k = if post_gel && s == run.largest { k - 1 } else { k };
            if k > 0 {
                // runs without this size add nothing, which is the same as a zero sample
                sizes.entry(s).or_default().push(k * s as u64);
                first_moment += (s as u128) * k as u128;
                second_moment += (s as u128) * (s as u128) * k as u128;
            }
        }
        if first_moment > 0 {
            finite_means.push(second_moment as f64 / first_moment as f64);
        }
        if degrees.len() < run.degree_counts.len() {
            degrees.resize(run.degree_counts.len(), Accumulator::default());
        }
        for (acc, &k) in degrees.iter_mut().zip(&run.degree_counts) {
            acc.push(k);
        }
    }

    let max_size = sizes.keys().next_back().copied().unwrap_or(0);
    let mut size_histogram = vec![0.0; max_size];
    let mut size_stderr = vec![0.0; max_size];
    for (&s, acc) in &sizes {
        let (m, e) = acc.moments(n_runs, inv_n);
        size_histogram[s - 1] = m;
        size_stderr[s - 1] = e;
    }
    let (degree_histogram, degree_stderr): (Vec<f64>, Vec<f64>) =
        degrees.iter().map(|acc| acc.moments(n_runs, inv_n)).unzip();
    let (largest_fraction, largest_fraction_stderr) = largest.moments(n_runs, inv_n);
    let (mean_finite_size, mean_finite_size_stderr) = mean_and_stderr(&finite_means);
    let achieved: Vec<f64> = runs.iter().map(|r| r.achieved_c).collect();

    MCEnsembleResult {
        n_vertices: cfg.n_vertices,
        runs_completed: n_runs,
        post_gel,
        size_histogram,
        size_stderr,
        degree_histogram,
        degree_stderr,
        largest_fraction,
        largest_fraction_stderr,
        mean_finite_size,
        mean_finite_size_stderr,
        achieved_c: mean_and_stderr(&achieved).0,
        component_totals: totals.into_iter().collect(),
        self_loop_rejections: runs.iter().map(|r| r.self_loop_rejections).sum(),
        multi_edges: runs.iter().map(|r| r.multi_edges).sum(),
    }
}

/// Empirical versus analytic degree distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeCheck {
    pub tv_distance: f64,
    /// Expected total-variation distance of a multinomial sample of `N · runs` vertices.
    pub fluctuation_scale: f64,
    pub bins: usize,
}

pub fn empirical_degree_check(result: &MCEnsembleResult, dd: &DegreeDistribution) -> DegreeCheck {
    let analytic = dd.marginal();
    let bins = analytic.len().max(result.degree_histogram.len());
    let samples = (result.n_vertices * result.runs_completed) as f64;
    let mut tv = 0.0;
    let mut scale = 0.0;
    for n in 0..bins {
        let p = analytic.get(n).copied().unwrap_or(0.0);
        let q = result.degree_histogram.get(n).copied().unwrap_or(0.0);
        tv += (p - q).abs();
        scale += (2.0 * p * (1.0 - p) / (std::f64::consts::PI * samples)).sqrt();
    }
    DegreeCheck {
        tv_distance: 0.5 * tv,
        fluctuation_scale: 0.5 * scale,
        bins,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeRow {
    pub n: usize,
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
    /// `(empirical - analytic) / stderr`; NaN without a usable error estimate.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeComparison {
    pub rows: Vec<SizeRow>,
    /// Half the L1 distance over `n ≤ rows.len()`.
    pub tv_distance: f64,
}

/// Pairs the ensemble histogram with `w(n)` for `n = 1..=n_limit`.
pub fn compare_sizes(result: &MCEnsembleResult, sd: &SizeDistribution, n_limit: usize) -> SizeComparison {
    let n_limit = n_limit.min(sd.n_max());
    let rows: Vec<SizeRow> = (1..=n_limit)
        .map(|n| {
            let analytic = sd.w(n);
            let empirical = result.w(n);
            let stderr = result.w_stderr(n);
            let z = if stderr > 0.0 { (empirical - analytic) / stderr } else { f64::NAN };
            SizeRow {
                n,
                analytic,
                empirical,
                stderr,
                z,
            }
        })
        .collect();
    let tv_distance = 0.5 * rows.iter().map(|r| (r.empirical - r.analytic).abs()).sum::<f64>();
    SizeComparison { rows, tv_distance }
}

/// Writes `size<TAB>count` lines of the ensemble-wide component totals.
pub fn write_component_table<W: Write>(result: &MCEnsembleResult, mut out: W) -> io::Result<()> {
    for &(s, k) in &result.component_totals {
        writeln!(out, "{s}\t{k}")?;
    }
    out.flush()
}
