use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{csv_table, Experiment, ExperimentConfig, Table};
use crate::cml::train_random_cml;
use crate::error::Result;
use crate::experience::{monolithic_experiment, MonolithicConfig};
use crate::hdc::{bundle_recovery_curve, majority_similarity, mean_std, noise_floor, Hypervector};
use crate::hierarchy::{simulate_hierarchy, HierarchyConfig, NOISE_SAMPLES};
use crate::proxy::{consistency_experiment, ProxyConfig};
use crate::seed::derive_rng;

pub(super) struct Output {
    pub summary: Value,
    pub trials: Value,
    pub tables: Vec<Table>,
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<Output> {
    match cfg.experiment {
        Experiment::SuccessRate => success_rate(cfg),
        Experiment::SignSimilarity => sign_similarity(cfg),
        Experiment::NoiseFloor => noise(cfg),
        Experiment::BundleRecovery => recovery(cfg),
        Experiment::Hierarchy => hierarchy(cfg),
        Experiment::MonolithicExp => monolithic(cfg),
        Experiment::ProxyMap => proxy_map(cfg),
    }
}

/// Results in trial order whether or not the trials ran in parallel.
fn per_trial<T, F>(trials: usize, parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if parallel {
        (0..trials).into_par_iter().map(f).collect()
    } else {
        (0..trials).map(f).collect()
    }
}

/// Noise maximum at `d`, the default cleanup threshold where one applies.
fn noise_max(cfg: &ExperimentConfig) -> Result<f64> {
    Ok(noise_floor(cfg.d(), NOISE_SAMPLES, &mut derive_rng(cfg.seed(), &[u64::MAX]))?.max_abs)
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] } else { (values[mid - 1] + values[mid]) / 2.0 })
}

#[derive(Serialize)]
struct SuccessRow {
    trial: usize,
    n: usize,
    d: usize,
    edges: usize,
    epochs: usize,
    success: bool,
    adjacency_errors: usize,
    traversal_failures: usize,
    median_path_ratio: Option<f64>,
    max_path_ratio: Option<f64>,
}

fn success_rate(cfg: &ExperimentConfig) -> Result<Output> {
    let rows = per_trial(cfg.trials(), cfg.parallel(), |t| {
        let mut rng = derive_rng(cfg.seed(), &[t as u64]);
        let model = train_random_cml(cfg.n(), cfg.edges(), cfg.d(), cfg.epochs(), &mut rng)?;
        let ev = model.evaluate(&mut rng)?;
        let mut ratios = ev.path_ratios();
        Ok(SuccessRow {
            trial: t,
            n: cfg.n(),
            d: cfg.d(),
            edges: cfg.edges(),
            epochs: cfg.epochs(),
            success: ev.success(),
            adjacency_errors: ev.adjacency_errors,
            traversal_failures: ev.traversals.iter().filter(|r| !r.succeeded()).count(),
            max_path_ratio: ratios.iter().copied().reduce(f64::max),
            median_path_ratio: median(&mut ratios),
        })
    })?;
    let successes = rows.iter().filter(|r| r.success).count();
    let mut passing_medians: Vec<f64> = rows.iter().filter(|r| r.success).filter_map(|r| r.median_path_ratio).collect();
    let max_ratio = rows.iter().filter(|r| r.success).filter_map(|r| r.max_path_ratio).reduce(f64::max);
    let summary = json!({
        "success_rate": successes as f64 / rows.len() as f64,
        "successes": successes,
        "trials": rows.len(),
        "median_path_ratio": median(&mut passing_medians),
        "max_path_ratio": max_ratio,
    });
    Ok(Output { summary, trials: serde_json::to_value(&rows)?, tables: vec![csv_table(None, &rows)?] })
}

#[derive(Serialize)]
struct SignRow {
    trial: usize,
    i: usize,
    j: usize,
    similarity: f64,
}

fn sign_similarity(cfg: &ExperimentConfig) -> Result<Output> {
    let matrices = per_trial(cfg.trials(), cfg.parallel(), |t| {
        let mut rng = derive_rng(cfg.seed(), &[t as u64]);
        Ok(train_random_cml(cfg.n(), cfg.edges(), cfg.d(), cfg.epochs(), &mut rng)?.sign_similarity_matrix())
    })?;
    let mut rows = Vec::new();
    let mut own = Vec::new();
    let mut cross = Vec::new();
    let mut per = Vec::new();
    for (t, m) in matrices.iter().enumerate() {
        let mut trial_own = Vec::new();
        let mut trial_cross_max = 0.0f64;
        for (i, row) in m.iter().enumerate() {
            for (j, &s) in row.iter().enumerate() {
                rows.push(SignRow { trial: t, i, j, similarity: s });
                if i == j {
                    own.push(s);
                    trial_own.push(s);
                } else {
                    cross.push(s);
                    trial_cross_max = trial_cross_max.max(s.abs());
                }
            }
        }
        per.push(json!({"trial": t, "own_mean": mean_std(&trial_own).0, "cross_max_abs": trial_cross_max}));
    }
    let (own_mean, own_std) = mean_std(&own);
    let (cross_mean, cross_std) = mean_std(&cross);
    let summary = json!({
        "own_mean": own_mean,
        "own_std": own_std,
        "cross_mean": cross_mean,
        "cross_std": cross_std,
        "cross_max_abs": cross.iter().fold(0.0f64, |a, s| a.max(s.abs())),
        "gaussian_sign_similarity": (2.0 / std::f64::consts::PI).sqrt(),
    });
    Ok(Output { summary, trials: Value::Array(per), tables: vec![csv_table(None, &rows)?] })
}

#[derive(Serialize)]
struct NoiseRow {
    sample: usize,
    similarity: f64,
}

fn noise(cfg: &ExperimentConfig) -> Result<Output> {
    let mut rng = derive_rng(cfg.seed(), &[0]);
    let mut rows = Vec::with_capacity(cfg.trials());
    for sample in 0..cfg.trials() {
        let x = Hypervector::random(cfg.d(), &mut rng)?;
        let y = Hypervector::random(cfg.d(), &mut rng)?;
        rows.push(NoiseRow { sample, similarity: x.similarity(&y)? });
    }
    let sims: Vec<f64> = rows.iter().map(|r| r.similarity).collect();
    let (mean, std_dev) = mean_std(&sims);
    let summary = json!({
        "d": cfg.d(),
        "samples": sims.len(),
        "mean": mean,
        "std_dev": std_dev,
        "max_abs": sims.iter().fold(0.0f64, |a, s| a.max(s.abs())),
        "expected_std_dev": 1.0 / (cfg.d() as f64).sqrt(),
    });
    Ok(Output { summary, trials: Value::Null, tables: vec![csv_table(None, &rows)?] })
}

#[derive(Serialize)]
struct RecoveryRow {
    pairs: usize,
    mean: f64,
    min: f64,
    max: f64,
    majority_law: f64,
}

fn recovery(cfg: &ExperimentConfig) -> Result<Output> {
    let curve = bundle_recovery_curve(cfg.d(), cfg.k(), cfg.trials(), &mut derive_rng(cfg.seed(), &[0]))?;
    let rows: Vec<RecoveryRow> = curve
        .iter()
        .map(|p| RecoveryRow {
            pairs: p.pairs,
            mean: p.mean,
            min: p.min,
            max: p.max,
            // even counts get a tie-breaker, so they follow the next odd law
            majority_law: majority_similarity(p.pairs | 1),
        })
        .collect();
    let summary = json!({ "d": cfg.d(), "curve": &rows });
    Ok(Output { summary, trials: Value::Null, tables: vec![csv_table(None, &rows)?] })
}

#[derive(Serialize)]
struct HierarchyRow {
    trial: usize,
    level: usize,
    sim_adjacent: Option<f64>,
    sim_to_s1: f64,
}

#[derive(Serialize)]
struct LevelRow {
    level: usize,
    adjacent_mean: Option<f64>,
    adjacent_std: Option<f64>,
    to_first_mean: f64,
    to_first_std: f64,
}

fn hierarchy(cfg: &ExperimentConfig) -> Result<Output> {
    let sim = simulate_hierarchy(&HierarchyConfig {
        levels: cfg.levels(),
        n: cfg.n(),
        d: cfg.d(),
        trials: cfg.trials(),
        theta: cfg.theta,
        seed: cfg.seed(),
        parallel: cfg.parallel(),
    })?;
    let mut rows = Vec::new();
    for t in &sim.trials {
        for (v, &to_first) in t.to_first.iter().enumerate() {
            rows.push(HierarchyRow { trial: t.trial, level: v + 1, sim_adjacent: t.adjacent.get(v).copied(), sim_to_s1: to_first });
        }
    }
    let levels: Vec<LevelRow> = sim
        .levels
        .iter()
        .map(|l| LevelRow {
            level: l.level,
            adjacent_mean: l.adjacent_mean,
            adjacent_std: l.adjacent_std,
            to_first_mean: l.to_first_mean,
            to_first_std: l.to_first_std,
        })
        .collect();
    let adjacent: Vec<f64> = sim.trials.iter().flat_map(|t| t.adjacent.iter().copied()).collect();
    let (adjacent_mean, adjacent_std) = mean_std(&adjacent);
    let third_below = sim.trials.iter().filter(|t| t.to_first.get(2).is_some_and(|s| s.abs() < sim.theta)).count();
    let summary = json!({
        "theta": sim.theta,
        "adjacent_mean": adjacent_mean,
        "adjacent_std": adjacent_std,
        "majority_law": majority_similarity(cfg.n() | 1),
        "s1_s3_below_theta_fraction": third_below as f64 / sim.trials.len() as f64,
        "reconstruction_rate": sim.reconstruction_rate(),
    });
    Ok(Output {
        summary,
        trials: serde_json::to_value(&sim.trials)?,
        tables: vec![csv_table(None, &rows)?, csv_table(Some("levels"), &levels)?],
    })
}

#[derive(Serialize)]
struct MonolithicSummaryRow {
    n: usize,
    d: usize,
    k: usize,
    theta: f64,
    sensitivity_mean: f64,
    sensitivity_std: f64,
    specificity_mean: f64,
    specificity_std: f64,
    true_pos: u64,
    false_pos: u64,
    true_neg: u64,
    false_neg: u64,
}

fn monolithic(cfg: &ExperimentConfig) -> Result<Output> {
    let theta = match cfg.theta {
        Some(t) => t,
        None => noise_max(cfg)?,
    };
    let result = monolithic_experiment(&MonolithicConfig {
        n: cfg.n(),
        d: cfg.d(),
        edges: cfg.edges(),
        epochs: cfg.epochs(),
        ks: (1..=cfg.k()).collect(),
        theta,
        trials: cfg.trials(),
        cycles: cfg.cycles(),
        seed: cfg.seed(),
        parallel: cfg.parallel(),
    })?;
    let summaries: Vec<MonolithicSummaryRow> = result
        .summaries
        .iter()
        .map(|s| MonolithicSummaryRow {
            n: s.n,
            d: s.d,
            k: s.k,
            theta: s.theta,
            sensitivity_mean: s.sensitivity_mean,
            sensitivity_std: s.sensitivity_std,
            specificity_mean: s.specificity_mean,
            specificity_std: s.specificity_std,
            true_pos: s.tally.true_pos,
            false_pos: s.tally.false_pos,
            true_neg: s.tally.true_neg,
            false_neg: s.tally.false_neg,
        })
        .collect();
    let summary = json!({ "theta": theta, "per_k": &result.summaries });
    Ok(Output {
        summary,
        trials: serde_json::to_value(&result.trials)?,
        tables: vec![csv_table(None, &result.rows)?, csv_table(Some("summary"), &summaries)?],
    })
}

fn proxy_map(cfg: &ExperimentConfig) -> Result<Output> {
    let cells = (1..=cfg.m()).flat_map(|m| (1..=cfg.k()).map(move |k| (m, k))).collect();
    let grid = consistency_experiment(&ProxyConfig {
        d: cfg.d(),
        cells,
        n: cfg.n(),
        edges: cfg.edges(),
        epochs: cfg.epochs(),
        maps_needed: cfg.maps(),
        budget: cfg.budget(),
        theta: cfg.theta,
        seed: cfg.seed(),
        parallel: cfg.parallel(),
    })?;
    let complete: Vec<f64> = grid.details.iter().filter(|x| x.complete).map(|x| x.sensitivity).collect();
    let summary = json!({
        "theta": grid.theta,
        "cells": &grid.cells,
        "complete_maps": complete.len(),
        "min_post_cleanup_sensitivity": complete.iter().copied().reduce(f64::min),
    });
    Ok(Output {
        summary,
        trials: Value::Null,
        tables: vec![csv_table(None, &grid.cells)?, csv_table(Some("maps"), &grid.details)?],
    })
}

#[cfg(test)]
mod tests {
    use super::super::run_experiment;
    use super::*;

    fn quick(e: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            n: Some(10),
            d: Some(200),
            epochs: Some(100),
            trials: Some(4),
            k: Some(3),
            m: Some(2),
            cycles: Some(2),
            levels: Some(5),
            budget: Some(20),
            maps: Some(2),
            seed: Some(9),
            ..ExperimentConfig::new(e)
        }
    }

    #[test]
    fn every_experiment_is_deterministic_serial_vs_parallel() {
        for e in Experiment::ALL {
            let a = run_experiment(&quick(e)).unwrap();
            let b = run_experiment(&ExperimentConfig { serial: true, ..quick(e) }).unwrap();
            assert_eq!(a.tables, b.tables, "{e}");
            assert_eq!(a.summary, b.summary, "{e}");
            assert!(!a.tables[0].csv.is_empty());
        }
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig { out: Some(dir.path().to_owned()), ..quick(Experiment::Hierarchy) };
        run_experiment(&cfg).unwrap();
        for f in ["hierarchy.csv", "hierarchy_levels.csv", "hierarchy.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("hierarchy.json")).unwrap()).unwrap();
        assert_eq!(json["config"]["levels"], 5);
        assert_eq!(json["seed"], 9);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }
}
