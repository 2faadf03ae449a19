//! Hierarchical CMLs. A parent node state bundles one node state from each
//! child CML, so a parent can hand every child a target by cleanup.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cml::CmlModel;
use crate::error::{check_dim, Error, Result};
use crate::graph::Graph;
use crate::hdc::{bundle, cleanup, mean_std, noise_floor, Dictionary, Hypervector, Vector};
use crate::seed::derive_rng;

/// Samples used when the cleanup threshold defaults to the noise maximum.
pub const NOISE_SAMPLES: usize = 1000;

/// Bundle of one state per child; an even count gets the random tie-breaker.
pub fn build_parent_state<R: Rng + ?Sized>(children: &[&Hypervector], rng: &mut R) -> Result<Hypervector> {
    bundle(children.iter().copied(), rng)
}

/// Node states of one level, with the child nodes each state was bundled
/// from: `constituents[p][c]` is the node of child `c` inside state `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyLevel {
    pub level: usize,
    pub states: Vec<Hypervector>,
    pub constituents: Vec<Vec<usize>>,
}

impl HierarchyLevel {
    /// Bundles the signed child states named by `assignment`, one row per
    /// parent node.
    pub fn from_children<R: Rng + ?Sized>(
        level: usize,
        children: &[CmlModel],
        assignment: &[Vec<usize>],
        rng: &mut R,
    ) -> Result<Self> {
        let first = children.first().ok_or_else(|| Error::invalid("no child models"))?;
        let d = first.dim();
        let dicts: Vec<Dictionary<Hypervector>> = children
            .iter()
            .map(|c| check_dim(d, c.dim()).map(|_| c.signed_states()))
            .collect::<Result<_>>()?;
        let mut states = Vec::with_capacity(assignment.len());
        for row in assignment {
            if row.len() != children.len() {
                return Err(Error::ShapeMismatch {
                    expected: format!("{} child nodes per parent node", children.len()),
                    found: row.len().to_string(),
                });
            }
            let parts = row
                .iter()
                .zip(&dicts)
                .map(|(&node, dict)| dict.vector(node).ok_or(Error::OutOfRange { index: node, len: dict.len() }))
                .collect::<Result<Vec<_>>>()?;
            states.push(build_parent_state(&parts, rng)?);
        }
        Ok(Self { level, states, constituents: assignment.to_vec() })
    }
}

/// Parent CML whose state matrix starts from the bundled child states given
/// by `assignment` (one row per parent node, one child node per child).
pub fn build_hierarchical_cml<R: Rng + ?Sized>(
    children: &[CmlModel],
    assignment: &[Vec<usize>],
    parent_graph: Graph,
    epochs: usize,
    freeze_states: bool,
    rng: &mut R,
) -> Result<(CmlModel, HierarchyLevel)> {
    if assignment.len() != parent_graph.node_count() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} parent nodes", parent_graph.node_count()),
            found: assignment.len().to_string(),
        });
    }
    let level = HierarchyLevel::from_children(1, children, assignment, rng)?;
    let mut parent = CmlModel::with_hypervector_states(parent_graph, &level.states, rng)?;
    let mut params = *parent.params();
    params.freeze_states = freeze_states;
    parent.set_params(params);
    parent.train(epochs)?;
    Ok((parent, level))
}

/// Walks down from `top`, cleaning the current state against each level's
/// dictionary (ordered top to bottom) and continuing from the entry found.
/// Fails with the index of the first level whose cleanup misses.
pub fn reconstruct_chain<V: Vector>(top: &V, level_dictionaries: &[Dictionary<Hypervector>], theta: f64) -> Result<Vec<String>> {
    let mut labels = Vec::with_capacity(level_dictionaries.len());
    let mut current: Option<&Hypervector> = None;
    for (level, dict) in level_dictionaries.iter().enumerate() {
        let found = match current {
            None => cleanup(top, dict, theta)?,
            Some(q) => cleanup(q, dict, theta)?,
        };
        let m = match found {
            Some(m) => m,
            None => {
                let sims = match current {
                    None => dict.similarities(top)?,
                    Some(q) => dict.similarities(q)?,
                };
                let similarity = sims.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                return Err(Error::CleanupMiss { level, similarity });
            }
        };
        labels.push(m.label.to_owned());
        current = dict.vector(m.index);
    }
    Ok(labels)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyConfig {
    pub levels: usize,
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    /// Cleanup threshold; the noise maximum at `d` when unset.
    pub theta: Option<f64>,
    pub seed: u64,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyTrial {
    pub trial: usize,
    /// `sim(sᵛ, sᵛ⁺¹)` for `v = 1..levels-1`.
    pub adjacent: Vec<f64>,
    /// `sim(s¹, sᵛ)` for `v = 1..levels`.
    pub to_first: Vec<f64>,
    pub reconstructed: bool,
    /// Level, counted from the top, where reconstruction stopped.
    pub miss_level: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    /// Unset for the top level.
    pub adjacent_mean: Option<f64>,
    pub adjacent_std: Option<f64>,
    pub to_first_mean: f64,
    pub to_first_std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchySimulation {
    pub theta: f64,
    pub trials: Vec<HierarchyTrial>,
    pub levels: Vec<LevelStats>,
}

impl HierarchySimulation {
    pub fn reconstruction_rate(&self) -> f64 {
        self.trials.iter().filter(|t| t.reconstructed).count() as f64 / self.trials.len() as f64
    }
}

/// Random hierarchy: each `sᵛ⁺¹` bundles `sᵛ` with `n − 1` fresh random
/// states. Every level below the top also gets a cleanup dictionary holding
/// `sᵛ` among `n − 1` random node states, and the chain is rebuilt from the top.
pub fn simulate_hierarchy(cfg: &HierarchyConfig) -> Result<HierarchySimulation> {
    if cfg.levels < 2 || cfg.n == 0 || cfg.trials == 0 {
        return Err(Error::invalid("need at least 2 levels, n >= 1 and one trial"));
    }
    let theta = match cfg.theta {
        Some(t) => t,
        None => noise_floor(cfg.d, NOISE_SAMPLES, &mut derive_rng(cfg.seed, &[u64::MAX]))?.max_abs,
    };
    let run = |trial: usize| hierarchy_trial(cfg, theta, trial);
    let trials: Vec<HierarchyTrial> = if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(run).collect::<Result<_>>()?
    } else {
        (0..cfg.trials).map(run).collect::<Result<_>>()?
    };

    let levels = (0..cfg.levels)
        .map(|v| {
            let adj: Vec<f64> = trials.iter().filter_map(|t| t.adjacent.get(v).copied()).collect();
            let first: Vec<f64> = trials.iter().map(|t| t.to_first[v]).collect();
            let (adjacent_mean, adjacent_std) = match adj.is_empty() {
                true => (None, None),
                false => {
                    let (m, s) = mean_std(&adj);
                    (Some(m), Some(s))
                }
            };
            let (to_first_mean, to_first_std) = mean_std(&first);
            LevelStats { level: v + 1, adjacent_mean, adjacent_std, to_first_mean, to_first_std }
        })
        .collect();
    Ok(HierarchySimulation { theta, trials, levels })
}

fn hierarchy_trial(cfg: &HierarchyConfig, theta: f64, trial: usize) -> Result<HierarchyTrial> {
    let mut rng = derive_rng(cfg.seed, &[trial as u64]);
    let mut chain = vec![Hypervector::random(cfg.d, &mut rng)?];
    let mut dictionaries = Vec::with_capacity(cfg.levels - 1);
    let mut truth = Vec::with_capacity(cfg.levels - 1);
    for _ in 1..cfg.levels {
        let current = chain.last().expect("non-empty");
        let others = (1..cfg.n).map(|_| Hypervector::random(cfg.d, &mut rng)).collect::<Result<Vec<_>>>()?;
        let mut parts: Vec<&Hypervector> = vec![current];
        parts.extend(&others);
        let parent = build_parent_state(&parts, &mut rng)?;

        let mut entries = (1..cfg.n).map(|_| Hypervector::random(cfg.d, &mut rng)).collect::<Result<Vec<_>>>()?;
        entries.push(current.clone());
        entries.shuffle(&mut rng);
        let position = entries.iter().position(|e| e == current).expect("inserted");
        dictionaries.push(Dictionary::indexed(entries)?);
        truth.push(position.to_string());
        chain.push(parent);
    }

    let adjacent = chain.windows(2).map(|w| w[0].similarity(&w[1])).collect::<Result<Vec<_>>>()?;
    let to_first = chain.iter().map(|s| chain[0].similarity(s)).collect::<Result<Vec<_>>>()?;

    dictionaries.reverse();
    truth.reverse();
    let top = chain.last().expect("non-empty");
    let (reconstructed, miss_level) = match reconstruct_chain(top, &dictionaries, theta) {
        Ok(labels) => {
            let wrong = labels.iter().zip(&truth).position(|(a, b)| a != b);
            (wrong.is_none(), wrong)
        }
        Err(Error::CleanupMiss { level, .. }) => (false, Some(level)),
        Err(e) => return Err(e),
    };
    Ok(HierarchyTrial { trial, adjacent, to_first, reconstructed, miss_level })
}
