//! Repeated-trial experiments, gamma sweeps and PI comparisons.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::instance::ClusteredInstance;
use crate::io::{BaselineRow, ResultRow};
use crate::nrga::{Nrga, NrgaError, NrgaParams};
use crate::objective::{total_cost, CostError};
use crate::rng::trial_seed;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "CLUSTP_THREADS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("at least one run is required")]
    NoRuns,
    #[error("gamma list is empty")]
    NoGammas,
    #[error("reference cost must be positive, got {0}")]
    NonpositiveReference(f64),
    #[error(transparent)]
    Nrga(#[from] NrgaError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// BF/Avg statistics for one (instance, gamma) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub instance: String,
    pub gamma: f64,
    pub runs: usize,
    pub master_seed: u64,
    pub costs: Vec<f64>,
    pub seeds: Vec<u64>,
    pub best_found: f64,
    pub average: f64,
    pub seconds_per_run: f64,
}

impl TrialReport {
    fn from_runs(instance: &str, gamma: f64, master_seed: u64, seeds: Vec<u64>, costs: Vec<f64>, seconds: Vec<f64>) -> Self {
        let best_found = costs.iter().copied().fold(f64::INFINITY, f64::min);
        // mean as offset from the minimum: exact when all runs agree
        let spread = crate::objective::kahan_sum(costs.iter().map(|c| c - best_found));
        let average = best_found + spread / costs.len() as f64;
        let seconds_per_run = seconds.iter().sum::<f64>() / seconds.len() as f64;
        TrialReport {
            instance: instance.to_string(),
            gamma,
            runs: costs.len(),
            master_seed,
            costs,
            seeds,
            best_found,
            average,
            seconds_per_run,
        }
    }

    pub fn to_row(&self) -> ResultRow {
        ResultRow {
            instance: self.instance.clone(),
            gamma: self.gamma,
            runs: self.runs,
            best_found: self.best_found,
            average: self.average,
            seconds_per_run: self.seconds_per_run,
            master_seed: self.master_seed,
        }
    }
}

/// Executes trials serially or on a bounded pool. Seeds depend only on the
/// trial index, so the thread count never changes the costs.
#[derive(Debug, Clone, Copy)]
pub struct TrialRunner {
    threads: usize,
}

impl TrialRunner {
    pub fn new(threads: usize) -> Self {
        TrialRunner { threads: threads.max(1) }
    }

    /// Reads `CLUSTP_THREADS`; defaults to the hardware thread count.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn run_trials(
        &self,
        inst: &ClusteredInstance,
        gamma: f64,
        runs: usize,
        master_seed: u64,
    ) -> Result<TrialReport, BenchError> {
        let solver = Nrga::new(inst)?;
        self.run_with(&solver, gamma, runs, master_seed)
    }

    pub fn run_with(&self, solver: &Nrga<'_>, gamma: f64, runs: usize, master_seed: u64) -> Result<TrialReport, BenchError> {
        if runs == 0 {
            return Err(BenchError::NoRuns);
        }
        NrgaParams::new(gamma, 0)?;
        let inst = solver.instance();
        let seeds: Vec<u64> = (0..runs as u64).map(|t| trial_seed(master_seed, t)).collect();
        let one = |&seed: &u64| -> Result<(f64, f64), BenchError> {
            let start = Instant::now();
            let tree = solver.run(&NrgaParams { gamma, seed })?;
            let elapsed = start.elapsed().as_secs_f64();
            Ok((total_cost(&tree, inst)?, elapsed))
        };
        let results: Vec<(f64, f64)> = if self.threads == 1 {
            seeds.iter().map(one).collect::<Result<_, _>>()?
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.threads)
                .build()
                .map_err(|e| BenchError::ThreadPool(e.to_string()))?;
            pool.install(|| seeds.par_iter().map(one).collect::<Result<_, _>>())?
        };
        let (costs, seconds) = results.into_iter().unzip();
        Ok(TrialReport::from_runs(inst.name(), gamma, master_seed, seeds, costs, seconds))
    }

    /// One report per gamma; every gamma reuses the same per-run seeds.
    pub fn gamma_sweep(
        &self,
        inst: &ClusteredInstance,
        gammas: &[f64],
        runs: usize,
        master_seed: u64,
    ) -> Result<Vec<TrialReport>, BenchError> {
        if gammas.is_empty() {
            return Err(BenchError::NoGammas);
        }
        let solver = Nrga::new(inst)?;
        gammas.iter().map(|&g| self.run_with(&solver, g, runs, master_seed)).collect()
    }
}

/// `runs` seeded NRGA executions, threads from `CLUSTP_THREADS`.
pub fn run_trials(inst: &ClusteredInstance, gamma: f64, runs: usize, master_seed: u64) -> Result<TrialReport, BenchError> {
    TrialRunner::from_env().run_trials(inst, gamma, runs, master_seed)
}

pub fn gamma_sweep(
    inst: &ClusteredInstance,
    gammas: &[f64],
    runs: usize,
    master_seed: u64,
) -> Result<Vec<TrialReport>, BenchError> {
    TrialRunner::from_env().gamma_sweep(inst, gammas, runs, master_seed)
}

/// The gamma values of the published sweep.
pub const SWEEP_GAMMAS: [f64; 7] = [1.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0];

/// `PI(A, B) = (C_B - C_A) / C_B * 100`.
pub fn performance_improvement(cost_a: f64, cost_b: f64) -> Result<f64, BenchError> {
    if !(cost_b > 0.0) {
        return Err(BenchError::NonpositiveReference(cost_b));
    }
    Ok((cost_b - cost_a) / cost_b * 100.0)
}

/// PI of our best-found against one baseline row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiRow {
    pub instance: String,
    pub algorithm: String,
    pub ours: f64,
    pub baseline: f64,
    pub pi: f64,
}

/// Matches results to baselines by instance name. When several result rows
/// share an instance the last one wins.
pub fn compare(results: &[ResultRow], baselines: &[BaselineRow]) -> Result<Vec<PiRow>, BenchError> {
    let mut out = Vec::new();
    for b in baselines {
        let Some(ours) = results.iter().rev().find(|r| r.instance == b.instance) else {
            continue;
        };
        out.push(PiRow {
            instance: b.instance.clone(),
            algorithm: b.algorithm.clone(),
            ours: ours.best_found,
            baseline: b.best_found,
            pi: performance_improvement(ours.best_found, b.best_found)?,
        });
    }
    Ok(out)
}

/// `(algorithm, mean PI, max PI, count)` in first-seen order.
pub fn summarize_pi(rows: &[PiRow]) -> Vec<(String, f64, f64, usize)> {
    let mut algos: Vec<String> = Vec::new();
    for r in rows {
        if !algos.contains(&r.algorithm) {
            algos.push(r.algorithm.clone());
        }
    }
    algos
        .into_iter()
        .map(|a| {
            let pis: Vec<f64> = rows.iter().filter(|r| r.algorithm == a).map(|r| r.pi).collect();
            let mean = pis.iter().sum::<f64>() / pis.len() as f64;
            let max = pis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (a, mean, max, pis.len())
        })
        .collect()
}

/// Table with one decimal on costs and two on seconds.
pub fn render_markdown(reports: &[TrialReport]) -> String {
    let mut out = String::new();
    out.push_str("| Instance | gamma | BF | Avg | Time (s) |\n");
    out.push_str("|---|---:|---:|---:|---:|\n");
    for r in reports {
        writeln!(
            out,
            "| {} | {} | {:.1} | {:.1} | {:.2} |",
            r.instance, r.gamma, r.best_found, r.average, r.seconds_per_run
        )
        .unwrap();
    }
    out
}

/// One row per instance, a BF/Avg column pair per gamma.
pub fn render_sweep_markdown(reports: &[TrialReport]) -> String {
    let mut gammas: Vec<f64> = Vec::new();
    let mut instances: Vec<&str> = Vec::new();
    for r in reports {
        if !gammas.contains(&r.gamma) {
            gammas.push(r.gamma);
        }
        if !instances.contains(&r.instance.as_str()) {
            instances.push(&r.instance);
        }
    }
    let mut out = String::from("| Instance |");
    for g in &gammas {
        write!(out, " BF (gamma={g}) | Avg (gamma={g}) |").unwrap();
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|---:|".repeat(gammas.len()));
    out.push('\n');
    for name in instances {
        write!(out, "| {name} |").unwrap();
        for g in &gammas {
            match reports.iter().find(|r| r.instance == name && r.gamma == *g) {
                Some(r) => write!(out, " {:.1} | {:.1} |", r.best_found, r.average).unwrap(),
                None => out.push_str(" - | - |"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn render_pi_markdown(rows: &[PiRow]) -> String {
    let mut out = String::new();
    out.push_str("| Instance | Baseline | Baseline BF | Our BF | PI (%) |\n");
    out.push_str("|---|---|---:|---:|---:|\n");
    for r in rows {
        writeln!(out, "| {} | {} | {:.1} | {:.1} | {:.2} |", r.instance, r.algorithm, r.baseline, r.ours, r.pi).unwrap();
    }
    out.push('\n');
    out.push_str("| Baseline | Instances | Mean PI (%) | Max PI (%) |\n");
    out.push_str("|---|---:|---:|---:|\n");
    for (algo, mean, max, count) in summarize_pi(rows) {
        writeln!(out, "| {algo} | {count} | {mean:.2} | {max:.2} |").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::generate_clustered;

    #[test]
    fn pi_formula() {
        assert!((performance_improvement(1713.2, 3027.7).unwrap() - 43.42).abs() < 0.01);
        assert!((performance_improvement(522572.2, 656800.9).unwrap() - 20.44).abs() < 0.01);
        assert_eq!(performance_improvement(12.5, 12.5).unwrap(), 0.0);
        assert!(performance_improvement(1.0, 2.0).unwrap() > 0.0);
        assert!(performance_improvement(3.0, 2.0).unwrap() < 0.0);
        assert_eq!(performance_improvement(1.0, 0.0), Err(BenchError::NonpositiveReference(0.0)));
    }

    #[test]
    fn single_run_report() {
        let inst = generate_clustered(20, 4, 5.0, 100.0, 2).unwrap();
        let r = TrialRunner::new(1).run_trials(&inst, 5.0, 1, 9).unwrap();
        assert_eq!(r.runs, 1);
        assert_eq!(r.best_found, r.average);
        assert_eq!(r.costs, vec![r.best_found]);
        assert_eq!(r.seeds, vec![trial_seed(9, 0)]);
    }

    #[test]
    fn zero_runs_rejected() {
        let inst = generate_clustered(5, 2, 5.0, 100.0, 2).unwrap();
        assert_eq!(TrialRunner::new(1).run_trials(&inst, 5.0, 0, 0), Err(BenchError::NoRuns));
        assert_eq!(TrialRunner::new(1).gamma_sweep(&inst, &[], 3, 0), Err(BenchError::NoGammas));
    }

    #[test]
    fn single_cluster_has_no_variance() {
        let inst = generate_clustered(15, 1, 20.0, 100.0, 3).unwrap();
        let r = TrialRunner::new(1).run_trials(&inst, 1.0, 10, 4).unwrap();
        assert!(r.costs.iter().all(|&c| c == r.costs[0]));
        assert_eq!(r.best_found, r.average);
    }

    #[test]
    fn parallel_matches_serial() {
        let inst = generate_clustered(40, 6, 8.0, 100.0, 8).unwrap();
        let a = TrialRunner::new(1).run_trials(&inst, 3.0, 12, 77).unwrap();
        let b = TrialRunner::new(4).run_trials(&inst, 3.0, 12, 77).unwrap();
        assert_eq!(a.costs, b.costs);
        assert_eq!(a.seeds, b.seeds);
    }

    #[test]
    fn compare_and_summaries() {
        let results = vec![ResultRow {
            instance: "10eil51".into(),
            gamma: 50.0,
            runs: 30,
            best_found: 1713.2,
            average: 1723.2,
            seconds_per_run: 0.0,
            master_seed: 0,
        }];
        let baselines = vec![
            BaselineRow { instance: "10eil51".into(), algorithm: "E-MFEA".into(), best_found: 1923.9, average: 2020.3 },
            BaselineRow { instance: "10eil51".into(), algorithm: "C-MFEA".into(), best_found: 3027.7, average: 3513.3 },
            BaselineRow { instance: "other".into(), algorithm: "C-MFEA".into(), best_found: 1.0, average: 1.0 },
        ];
        let rows = compare(&results, &baselines).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[1].pi - 43.42).abs() < 0.01);
        let summary = summarize_pi(&rows);
        assert_eq!(summary[0].0, "E-MFEA");
        assert_eq!(summary[1].3, 1);
        let md = render_pi_markdown(&rows);
        assert!(md.contains("| 10eil51 | C-MFEA | 3027.7 | 1713.2 | 43.42 |"));
    }
}
