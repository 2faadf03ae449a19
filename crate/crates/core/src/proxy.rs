//! Proxy-symbol interfacing. An EXP is trained once on random proxy
//! symbols; application symbols are then attached through a map hypervector
//! instead of retraining.
//!
//! Scene `i` has one symbol per input, `p_i^1 … p_i^m`. Its template is the
//! bundle `[p_i^1 + … + p_i^m]`, and a map over application symbols is
//! `Σ_i [x_i^1 ⊗ p_i^1 + … + x_i^m ⊗ p_i^m]`: each scene's bound pairs are
//! bundled, and the scene bundles are summed without clipping.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cml::train_random_cml;
use crate::error::{check_dim, Error, Result};
use crate::experience::{train_exp, ExperienceModel};
use crate::hdc::{argmax, bundle, cleanup, Dictionary, Hypervector, Superposition};
use crate::seed::derive_rng;

/// Complete maps sought per grid cell.
pub const MAPS_NEEDED: usize = 10;
/// Attempts allowed per grid cell before consistency is marked 0.
pub const ATTEMPT_BUDGET: usize = 300;

/// Cleanup threshold on proxy paths: the noise-floor standard deviation,
/// exactly `1/√d` for random bipolar pairs.
pub fn proxy_theta(d: usize) -> f64 {
    1.0 / (d as f64).sqrt()
}

fn check_table(table: &[Vec<Hypervector>], k: usize, m: usize, d: usize) -> Result<()> {
    if table.len() != k || table.iter().any(|row| row.len() != m) {
        return Err(Error::ShapeMismatch {
            expected: format!("{k} scenes x {m} inputs"),
            found: format!("{} scenes x {}", table.len(), table.first().map_or(0, Vec::len)),
        });
    }
    for v in table.iter().flatten() {
        check_dim(d, v.dim())?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProxyModel {
    /// `proxies[i][j]` is input `j`'s symbol in scene `i`.
    proxies: Vec<Vec<Hypervector>>,
    templates: Dictionary<Hypervector>,
    exp: ExperienceModel,
}

impl ProxyModel {
    pub fn m(&self) -> usize {
        self.proxies[0].len()
    }

    pub fn k(&self) -> usize {
        self.proxies.len()
    }

    pub fn dim(&self) -> usize {
        self.exp.dim()
    }

    pub fn proxies(&self) -> &[Vec<Hypervector>] {
        &self.proxies
    }

    pub fn templates(&self) -> &Dictionary<Hypervector> {
        &self.templates
    }

    pub fn exp(&self) -> &ExperienceModel {
        &self.exp
    }

    pub fn targets(&self) -> &Dictionary<Hypervector> {
        self.exp.targets()
    }
}

/// `m·k` random proxies, `k` templates and EXP = Σ templateᵢ ⊗ targetᵢ.
pub fn build_proxy_exp<R: Rng + ?Sized>(m: usize, k: usize, targets: &[Hypervector], rng: &mut R) -> Result<ProxyModel> {
    if m == 0 || k == 0 {
        return Err(Error::invalid("m and k must be at least 1"));
    }
    if targets.len() != k {
        return Err(Error::ShapeMismatch { expected: format!("{k} targets"), found: targets.len().to_string() });
    }
    let d = targets[0].dim();
    let proxies = (0..k)
        .map(|_| (0..m).map(|_| Hypervector::random(d, rng)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let templates = proxies.iter().map(|row| bundle(row, rng)).collect::<Result<Vec<_>>>()?;
    let exp = train_exp(&templates, targets)?;
    Ok(ProxyModel { proxies, templates: Dictionary::indexed(templates)?, exp })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolMap {
    map: Superposition,
    /// `symbols[i][j]` is the application symbol bound to proxy `p_i^j`.
    symbols: Vec<Vec<Hypervector>>,
    /// Bundled application scenes, one per template.
    scenes: Vec<Hypervector>,
    complete: bool,
}

impl SymbolMap {
    pub fn map(&self) -> &Superposition {
        &self.map
    }

    pub fn symbols(&self) -> &[Vec<Hypervector>] {
        &self.symbols
    }

    pub fn scenes(&self) -> &[Hypervector] {
        &self.scenes
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }
}

/// Binds each application symbol to its proxy, bundles per scene and sums
/// over scenes. Completeness is checked before returning.
pub fn generate_map<R: Rng + ?Sized>(model: &ProxyModel, symbols: Vec<Vec<Hypervector>>, rng: &mut R) -> Result<SymbolMap> {
    let (k, m, d) = (model.k(), model.m(), model.dim());
    check_table(&symbols, k, m, d)?;
    let mut map = Superposition::new(d)?;
    for (xs, ps) in symbols.iter().zip(&model.proxies) {
        let mut scene_pairs = Superposition::new(d)?;
        for (x, p) in xs.iter().zip(ps) {
            scene_pairs.add_bound(x, p)?;
        }
        map.add(&scene_pairs.clip(rng)?)?;
    }
    let scenes = symbols.iter().map(|row| bundle(row, rng)).collect::<Result<Vec<_>>>()?;
    let mut out = SymbolMap { map, symbols, scenes, complete: false };
    out.complete = check_map_complete(model, &out)?;
    Ok(out)
}

/// True when every application scene bound with the map is most similar to
/// its own template.
pub fn check_map_complete(model: &ProxyModel, map: &SymbolMap) -> Result<bool> {
    for (i, scene) in map.scenes.iter().enumerate() {
        let query = map.map.bind(scene)?;
        let sims = model.templates.similarities(&query)?;
        if argmax(&sims) != Some(i) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Target index for an application scene. With `use_cleanup` the mapped
/// query is first replaced by its nearest template; without it the raw
/// query is bound with EXP directly. `None` on any cleanup miss.
pub fn mapped_query(model: &ProxyModel, scene: &Hypervector, map: &SymbolMap, theta: f64, use_cleanup: bool) -> Result<Option<usize>> {
    let query = map.map.bind(scene)?;
    let exp = model.exp.exp();
    let response: Vec<f64> = if use_cleanup {
        match cleanup(&query, &model.templates, theta)? {
            Some(t) => exp.bind(model.templates.vector(t.index).expect("matched entry"))?.to_real(),
            None => return Ok(None),
        }
    } else {
        query.sums().iter().zip(exp.sums()).map(|(&q, &e)| f64::from(q) * f64::from(e)).collect()
    };
    Ok(cleanup(&response, model.targets(), theta)?.map(|m| m.index))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProxyConfig {
    pub d: usize,
    pub cells: Vec<(usize, usize)>,
    /// Nodes in the CML that supplies targets.
    pub n: usize,
    pub edges: usize,
    pub epochs: usize,
    pub maps_needed: usize,
    pub budget: usize,
    /// Defaults to [`proxy_theta`].
    pub theta: Option<f64>,
    pub seed: u64,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDetail {
    pub m: usize,
    pub k: usize,
    pub map_id: usize,
    pub complete: bool,
    /// Fraction of scenes answered with their target after query cleanup.
    pub sensitivity: f64,
    /// Fraction answered correctly without query cleanup.
    pub no_cleanup_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub attempts: usize,
    pub maps_found: usize,
    pub consistency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProxyGrid {
    pub theta: f64,
    pub cells: Vec<CellResult>,
    pub details: Vec<MapDetail>,
}

impl ProxyGrid {
    pub fn cell(&self, m: usize, k: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.m == m && c.k == k)
    }

    /// Mean no-cleanup accuracy over the complete maps of one cell.
    pub fn no_cleanup_accuracy(&self, m: usize, k: usize) -> Option<f64> {
        let acc: Vec<f64> =
            self.details.iter().filter(|x| x.m == m && x.k == k && x.complete).map(|x| x.no_cleanup_accuracy).collect();
        (!acc.is_empty()).then(|| acc.iter().sum::<f64>() / acc.len() as f64)
    }
}

/// For each `(m, k)` cell, draws random application tables until
/// `maps_needed` complete maps are found or the budget runs out.
/// Consistency is `maps_needed / attempts`, or 0 on exhaustion.
pub fn consistency_experiment(cfg: &ProxyConfig) -> Result<ProxyGrid> {
    if cfg.maps_needed == 0 || cfg.budget < cfg.maps_needed {
        return Err(Error::invalid("budget must cover the maps needed"));
    }
    let max_k = cfg.cells.iter().map(|&(_, k)| k).max().ok_or_else(|| Error::invalid("no grid cells"))?;
    if max_k > cfg.n || cfg.cells.iter().any(|&(m, k)| m == 0 || k == 0) {
        return Err(Error::invalid(format!("cells need m >= 1 and 1 <= k <= {}", cfg.n)));
    }
    let cml = train_random_cml(cfg.n, cfg.edges, cfg.d, cfg.epochs, &mut derive_rng(cfg.seed, &[0]))?;
    let states = cml.signed_states();
    let theta = cfg.theta.unwrap_or_else(|| proxy_theta(cfg.d));

    let run = |&(m, k): &(usize, usize)| consistency_cell(cfg, &states.vectors()[..k], m, k, theta);
    let per_cell: Vec<(CellResult, Vec<MapDetail>)> = if cfg.parallel {
        cfg.cells.par_iter().map(run).collect::<Result<_>>()?
    } else {
        cfg.cells.iter().map(run).collect::<Result<_>>()?
    };
    let mut cells = Vec::new();
    let mut details = Vec::new();
    for (c, d) in per_cell {
        cells.push(c);
        details.extend(d);
    }
    Ok(ProxyGrid { theta, cells, details })
}

fn consistency_cell(cfg: &ProxyConfig, targets: &[Hypervector], m: usize, k: usize, theta: f64) -> Result<(CellResult, Vec<MapDetail>)> {
    let (mm, kk) = (m as u64, k as u64);
    let model = build_proxy_exp(m, k, targets, &mut derive_rng(cfg.seed, &[1, mm, kk]))?;
    let mut details = Vec::new();
    let mut found = 0;
    let mut attempts = 0;
    while attempts < cfg.budget && found < cfg.maps_needed {
        let mut rng = derive_rng(cfg.seed, &[2, mm, kk, attempts as u64]);
        attempts += 1;
        let symbols = (0..k)
            .map(|_| (0..m).map(|_| Hypervector::random(cfg.d, &mut rng)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let map = generate_map(&model, symbols, &mut rng)?;
        let mut hits = 0;
        let mut raw_hits = 0;
        for (i, scene) in map.scenes().iter().enumerate() {
            if mapped_query(&model, scene, &map, theta, true)? == Some(i) {
                hits += 1;
            }
            if mapped_query(&model, scene, &map, theta, false)? == Some(i) {
                raw_hits += 1;
            }
        }
        if map.is_complete() {
            found += 1;
        }
        details.push(MapDetail {
            m,
            k,
            map_id: attempts - 1,
            complete: map.is_complete(),
            sensitivity: hits as f64 / k as f64,
            no_cleanup_accuracy: raw_hits as f64 / k as f64,
        });
    }
    let consistency = if found == cfg.maps_needed { found as f64 / attempts as f64 } else { 0.0 };
    Ok((CellResult { d: cfg.d, m, k, attempts, maps_found: found, consistency }, details))
}
