//! Stimulus-response experience models.
//!
//! A scene bundles one symbol per input channel. A scenario binds a scene to
//! the node state a CML should travel to, and an experience vector (EXP)
//! superposes scenarios. Binding a scene with EXP yields a noisy copy of the
//! paired target, which the CML cleans against its own signed node states.
//!
//! A trained EXP is kept as the unclipped integer sum of its scenarios.
//! Merging clips the summed members once, so a merged EXP is bipolar.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cml::train_random_cml;
use crate::error::{check_dim, Error, Result};
use crate::hdc::{bundle, cleanup, mean_std, Dictionary, Hypervector, Superposition, Vector};
use crate::seed::derive_rng;

/// Named input with `k` trained symbols and an optional pool of novel ones.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputChannel {
    name: String,
    trained: Dictionary<Hypervector>,
    novel: Dictionary<Hypervector>,
}

impl InputChannel {
    pub fn new(name: impl Into<String>, trained: Dictionary<Hypervector>, novel: Dictionary<Hypervector>) -> Result<Self> {
        let d = trained.dim().ok_or_else(|| Error::invalid("channel needs at least one trained symbol"))?;
        if let Some(nd) = novel.dim() {
            check_dim(d, nd)?;
        }
        if novel.vectors().iter().any(|v| trained.vectors().contains(v)) {
            return Err(Error::invalid("trained and novel symbols overlap"));
        }
        Ok(Self { name: name.into(), trained, novel })
    }

    /// `k` trained and `novel` novel random symbols.
    pub fn random<R: Rng + ?Sized>(name: impl Into<String>, k: usize, novel: usize, d: usize, rng: &mut R) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        let trained = Dictionary::indexed((0..k).map(|_| Hypervector::random(d, rng)).collect::<Result<Vec<_>>>()?)?;
        let mut pool = Dictionary::new();
        for j in 0..novel {
            pool.insert(format!("novel{j}"), Hypervector::random(d, rng)?)?;
        }
        Self::new(name, trained, pool)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k(&self) -> usize {
        self.trained.len()
    }

    pub fn dim(&self) -> usize {
        self.trained.dim().expect("non-empty")
    }

    pub fn trained(&self) -> &Dictionary<Hypervector> {
        &self.trained
    }

    pub fn novel(&self) -> &Dictionary<Hypervector> {
        &self.novel
    }

    pub fn pool_size(&self) -> usize {
        self.trained.len() + self.novel.len()
    }

    /// Symbol `index` of the combined pool: trained first, then novel.
    pub fn symbol(&self, index: usize) -> Result<&Hypervector> {
        let k = self.k();
        if index < k {
            Ok(self.trained.vector(index).expect("in range"))
        } else {
            self.novel.vector(index - k).ok_or(Error::OutOfRange { index, len: self.pool_size() })
        }
    }

    pub fn is_trained(&self, index: usize) -> bool {
        index < self.k()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperienceModel {
    exp: Superposition,
    channels: Vec<InputChannel>,
    targets: Dictionary<Hypervector>,
    scenario_count: usize,
}

impl ExperienceModel {
    pub fn exp(&self) -> &Superposition {
        &self.exp
    }

    pub fn dim(&self) -> usize {
        self.exp.dim()
    }

    pub fn channels(&self) -> &[InputChannel] {
        &self.channels
    }

    pub fn targets(&self) -> &Dictionary<Hypervector> {
        &self.targets
    }

    pub fn scenario_count(&self) -> usize {
        self.scenario_count
    }

    pub fn with_channels(mut self, channels: Vec<InputChannel>) -> Result<Self> {
        for c in &channels {
            check_dim(self.dim(), c.dim())?;
        }
        self.channels = channels;
        Ok(self)
    }

    /// Replaces the target dictionary, typically with the owning CML's
    /// signed node states.
    pub fn with_targets(mut self, targets: Dictionary<Hypervector>) -> Result<Self> {
        check_dim(self.dim(), targets.dim().ok_or_else(|| Error::invalid("empty target dictionary"))?)?;
        self.targets = targets;
        Ok(self)
    }
}

/// Bundle of one symbol per channel.
pub fn make_scene<R: Rng + ?Sized>(symbols: &[&Hypervector], rng: &mut R) -> Result<Hypervector> {
    bundle(symbols.iter().copied(), rng)
}

/// EXP = Σᵢ sceneᵢ ⊗ targetᵢ. The target dictionary defaults to the given
/// targets in order.
pub fn train_exp(scenes: &[Hypervector], targets: &[Hypervector]) -> Result<ExperienceModel> {
    if scenes.len() != targets.len() {
        return Err(Error::invalid(format!("{} scenes but {} targets", scenes.len(), targets.len())));
    }
    let first = scenes.first().ok_or_else(|| Error::invalid("no scenarios"))?;
    let mut exp = Superposition::new(first.dim())?;
    for (s, t) in scenes.iter().zip(targets) {
        exp.add_bound(s, t)?;
    }
    Ok(ExperienceModel {
        exp,
        channels: Vec::new(),
        targets: Dictionary::indexed(targets.iter().cloned())?,
        scenario_count: scenes.len(),
    })
}

/// `scene ⊗ EXP` as a real vector.
pub fn query_exp(model: &ExperienceModel, scene: &Hypervector) -> Result<Vec<f64>> {
    Ok(model.exp.bind(scene)?.to_real())
}

/// Bundles member EXPs without retraining. A single model is returned as is.
/// Merged target labels are prefixed with the member index, `"<i>/<label>"`.
pub fn merge_exps<R: Rng + ?Sized>(models: &[ExperienceModel], rng: &mut R) -> Result<ExperienceModel> {
    let first = models.first().ok_or_else(|| Error::invalid("nothing to merge"))?;
    if models.len() == 1 {
        return Ok(first.clone());
    }
    let d = first.dim();
    let mut sum = Superposition::new(d)?;
    let mut channels: Vec<InputChannel> = Vec::new();
    let mut targets = Dictionary::new();
    let mut scenario_count = 0;
    for (i, m) in models.iter().enumerate() {
        check_dim(d, m.dim())?;
        sum.add_superposition(&m.exp)?;
        for c in &m.channels {
            if channels.iter().any(|e| e.name == c.name) {
                return Err(Error::invalid(format!("duplicate channel name `{}`", c.name)));
            }
            channels.push(c.clone());
        }
        for (label, v) in m.targets.iter() {
            targets.insert(format!("{i}/{label}"), v.clone())?;
        }
        scenario_count += m.scenario_count;
    }
    let exp = Superposition::from_hypervector(&sum.clip(rng)?);
    Ok(ExperienceModel { exp, channels, targets, scenario_count })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationTally {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl ClassificationTally {
    pub fn record(&mut self, positive: bool, returned: bool) {
        match (positive, returned) {
            (true, true) => self.true_pos += 1,
            (true, false) => self.false_neg += 1,
            (false, true) => self.false_pos += 1,
            (false, false) => self.true_neg += 1,
        }
    }

    /// Scores one cleanup decision against a dictionary of `entries` targets.
    /// Each entry is a separate classification: the trained target is the only
    /// positive, and an entry counts as returned when cleanup picked it.
    pub fn record_cleanup(&mut self, entries: usize, target: Option<usize>, decision: Option<usize>) {
        for j in 0..entries {
            self.record(target == Some(j), decision == Some(j));
        }
    }

    pub fn merge(&mut self, other: &ClassificationTally) {
        self.true_pos += other.true_pos;
        self.false_pos += other.false_pos;
        self.true_neg += other.true_neg;
        self.false_neg += other.false_neg;
    }

    pub fn positives(&self) -> u64 {
        self.true_pos + self.false_neg
    }

    pub fn sensitivity(&self) -> Result<f64> {
        match self.positives() {
            0 => Err(Error::UndefinedMetric("sensitivity")),
            p => Ok(self.true_pos as f64 / p as f64),
        }
    }

    pub fn specificity(&self) -> Result<f64> {
        match self.true_neg + self.false_pos {
            0 => Err(Error::UndefinedMetric("specificity")),
            q => Ok(self.true_neg as f64 / q as f64),
        }
    }
}

pub fn sensitivity(t: &ClassificationTally) -> Result<f64> {
    t.sensitivity()
}

pub fn specificity(t: &ClassificationTally) -> Result<f64> {
    t.specificity()
}

/// Queries `model` with each trained symbol of `channel` alone and scores the
/// cleanup against `targets`, where symbol `i` was paired with entry
/// `target_of[i]`.
pub fn validate_channel<V: Vector>(
    model: &ExperienceModel,
    channel: &InputChannel,
    target_of: &[usize],
    targets: &Dictionary<V>,
    theta: f64,
) -> Result<ClassificationTally> {
    let mut tally = ClassificationTally::default();
    for (i, (_, x)) in channel.trained().iter().enumerate() {
        let response = model.exp.bind(x)?;
        let decision = cleanup(&response, targets, theta)?.map(|m| m.index);
        tally.record_cleanup(targets.len(), target_of.get(i).copied(), decision);
    }
    Ok(tally)
}

pub const CHANNEL_NAMES: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonolithicConfig {
    pub n: usize,
    pub d: usize,
    pub edges: usize,
    pub epochs: usize,
    pub ks: Vec<usize>,
    pub theta: f64,
    pub trials: usize,
    pub cycles: usize,
    pub seed: u64,
    pub parallel: bool,
}

/// One cleanup decision by one CML for one query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonolithicRow {
    pub trial: usize,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub cycle: usize,
    pub scene: usize,
    pub cml: usize,
    /// The CML's channel contributed a trained symbol.
    pub truth: bool,
    /// Node returned by cleanup.
    pub decision: Option<usize>,
    /// Similarity to the trained target when `truth`, else the best
    /// similarity over the CML's node states.
    pub similarity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonolithicTrial {
    pub trial: usize,
    pub k: usize,
    /// Each member EXP validated on its own training scenes.
    pub member_validation: ClassificationTally,
    /// Merged EXP validated on all training scenes.
    pub merged_validation: ClassificationTally,
    pub tally: ClassificationTally,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonolithicSummary {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub theta: f64,
    pub sensitivity_mean: f64,
    pub sensitivity_std: f64,
    pub specificity_mean: f64,
    pub specificity_std: f64,
    pub merged_validation: ClassificationTally,
    pub tally: ClassificationTally,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonolithicResult {
    pub rows: Vec<MonolithicRow>,
    pub trials: Vec<MonolithicTrial>,
    pub summaries: Vec<MonolithicSummary>,
}

/// Three CMLs, one per input channel, each with an EXP over `k` trained
/// symbols (symbol `i` → node `i`). The merged EXP is queried with every
/// training scene after bundling in a random symbol, trained or novel, from
/// each of the other two channels, and every CML cleans the shared response.
pub fn monolithic_experiment(cfg: &MonolithicConfig) -> Result<MonolithicResult> {
    if cfg.ks.is_empty() || cfg.ks.iter().any(|&k| k == 0 || k > cfg.n) {
        return Err(Error::invalid(format!("each k must be in 1..={}", cfg.n)));
    }
    if cfg.trials == 0 || cfg.cycles == 0 {
        return Err(Error::invalid("trials and cycles must be positive"));
    }
    let run = |trial: usize| monolithic_trial(cfg, trial);
    let per_trial: Vec<(Vec<MonolithicTrial>, Vec<MonolithicRow>)> = if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(run).collect::<Result<_>>()?
    } else {
        (0..cfg.trials).map(run).collect::<Result<_>>()?
    };

    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for (t, r) in per_trial {
        trials.extend(t);
        rows.extend(r);
    }
    trials.sort_by_key(|t| (t.k, t.trial));
    rows.sort_by_key(|r| (r.k, r.trial, r.cycle, r.scene, r.cml));

    let mut summaries = Vec::new();
    for &k in &cfg.ks {
        let group: Vec<&MonolithicTrial> = trials.iter().filter(|t| t.k == k).collect();
        let sens: Vec<f64> = group.iter().map(|t| t.tally.sensitivity()).collect::<Result<_>>()?;
        let spec: Vec<f64> = group.iter().map(|t| t.tally.specificity()).collect::<Result<_>>()?;
        let (sensitivity_mean, sensitivity_std) = mean_std(&sens);
        let (specificity_mean, specificity_std) = mean_std(&spec);
        let mut tally = ClassificationTally::default();
        let mut merged_validation = ClassificationTally::default();
        for t in &group {
            tally.merge(&t.tally);
            merged_validation.merge(&t.merged_validation);
        }
        summaries.push(MonolithicSummary {
            n: cfg.n,
            d: cfg.d,
            k,
            theta: cfg.theta,
            sensitivity_mean,
            sensitivity_std,
            specificity_mean,
            specificity_std,
            merged_validation,
            tally,
        });
    }
    Ok(MonolithicResult { rows, trials, summaries })
}

fn monolithic_trial(cfg: &MonolithicConfig, trial: usize) -> Result<(Vec<MonolithicTrial>, Vec<MonolithicRow>)> {
    let t = trial as u64;
    let cmls = (0..3u64)
        .map(|c| train_random_cml(cfg.n, cfg.edges, cfg.d, cfg.epochs, &mut derive_rng(cfg.seed, &[0, t, c])))
        .collect::<Result<Vec<_>>>()?;
    let states: Vec<Dictionary<Hypervector>> = cmls.iter().map(|m| m.signed_states()).collect();

    let mut out_trials = Vec::new();
    let mut rows = Vec::new();
    for &k in &cfg.ks {
        let kk = k as u64;
        let channels = (0..3)
            .map(|c| InputChannel::random(CHANNEL_NAMES[c], k, k, cfg.d, &mut derive_rng(cfg.seed, &[1, t, kk, c as u64])))
            .collect::<Result<Vec<_>>>()?;
        let target_of: Vec<usize> = (0..k).collect();

        let mut members = Vec::new();
        let mut member_validation = ClassificationTally::default();
        for (c, ch) in channels.iter().enumerate() {
            let targets: Vec<Hypervector> = target_of.iter().map(|&i| states[c].vector(i).expect("k <= n").clone()).collect();
            let model = train_exp(ch.trained().vectors(), &targets)?
                .with_channels(vec![ch.clone()])?
                .with_targets(states[c].clone())?;
            member_validation.merge(&validate_channel(&model, ch, &target_of, &states[c], cfg.theta)?);
            members.push(model);
        }
        let merged = merge_exps(&members, &mut derive_rng(cfg.seed, &[2, t, kk]))?;
        let mut merged_validation = ClassificationTally::default();
        for (c, ch) in channels.iter().enumerate() {
            merged_validation.merge(&validate_channel(&merged, ch, &target_of, &states[c], cfg.theta)?);
        }

        let mut tally = ClassificationTally::default();
        for cycle in 0..cfg.cycles {
            for c in 0..channels.len() {
                for i in 0..k {
                    let scene_index = c * k + i;
                    let mut rng = derive_rng(cfg.seed, &[3, t, kk, cycle as u64, scene_index as u64]);
                    let mut picks = [0usize; 3];
                    for (o, pick) in picks.iter_mut().enumerate() {
                        *pick = if o == c { i } else { rng.random_range(0..channels[o].pool_size()) };
                    }
                    let symbols: Vec<&Hypervector> =
                        picks.iter().enumerate().map(|(o, &p)| channels[o].symbol(p)).collect::<Result<_>>()?;
                    let scene = make_scene(&symbols, &mut rng)?;
                    let response = merged.exp.bind(&scene)?;
                    for (o, dict) in states.iter().enumerate() {
                        let target = channels[o].is_trained(picks[o]).then(|| target_of[picks[o]]);
                        let sims = dict.similarities(&response)?;
                        let decision = crate::hdc::threshold_argmax(&sims, cfg.theta);
                        tally.record_cleanup(dict.len(), target, decision);
                        let similarity = match target {
                            Some(j) => sims[j],
                            None => sims.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        };
                        rows.push(MonolithicRow {
                            trial,
                            n: cfg.n,
                            d: cfg.d,
                            k,
                            cycle,
                            scene: scene_index,
                            cml: o,
                            truth: target.is_some(),
                            decision,
                            similarity,
                        });
                    }
                }
            }
        }
        out_trials.push(MonolithicTrial { trial, k, member_validation, merged_validation, tally });
    }
    Ok((out_trials, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hdc::{cosine_similarity, noise_floor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn hvs(count: usize, d: usize, r: &mut ChaCha8Rng) -> Vec<Hypervector> {
        (0..count).map(|_| Hypervector::random(d, r).unwrap()).collect()
    }

    #[test]
    fn single_symbol_scene_is_the_symbol() {
        let mut r = rng(1);
        let x = Hypervector::random(100, &mut r).unwrap();
        assert_eq!(make_scene(&[&x], &mut r).unwrap(), x);
        assert!(make_scene(&[], &mut r).is_err());
    }

    #[test]
    fn three_symbol_scene_resembles_each_component() {
        let mut r = rng(2);
        let v = hvs(3, 1000, &mut r);
        let scene = make_scene(&[&v[0], &v[1], &v[2]], &mut r).unwrap();
        let floor = noise_floor(1000, 1000, &mut r).unwrap();
        for x in &v {
            assert!(scene.similarity(x).unwrap() > floor.max_abs);
        }
    }

    #[test]
    fn one_scenario_recovers_target_exactly() {
        let mut r = rng(3);
        let v = hvs(2, 500, &mut r);
        let model = train_exp(&v[..1], &v[1..]).unwrap();
        let resp = query_exp(&model, &v[0]).unwrap();
        assert!((cosine_similarity(&resp, &v[1]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cleanup(&resp, model.targets(), 0.5).unwrap().unwrap().index, 0);
    }

    #[test]
    fn train_exp_rejects_length_mismatch() {
        let mut r = rng(4);
        let v = hvs(3, 50, &mut r);
        assert!(train_exp(&v[..2], &v[2..]).is_err());
    }

    #[test]
    fn exp_width_is_fixed() {
        let mut r = rng(5);
        let scenes = hvs(20, 256, &mut r);
        let targets = hvs(20, 256, &mut r);
        let model = train_exp(&scenes, &targets).unwrap();
        assert_eq!(model.dim(), 256);
        assert_eq!(model.scenario_count(), 20);
    }

    #[test]
    fn merge_of_one_is_identity() {
        let mut r = rng(6);
        let v = hvs(4, 100, &mut r);
        let model = train_exp(&v[..2], &v[2..]).unwrap();
        let merged = merge_exps(std::slice::from_ref(&model), &mut r).unwrap();
        assert_eq!(merged.exp(), model.exp());
    }

    #[test]
    fn merge_rejects_duplicate_channels() {
        let mut r = rng(7);
        let ch = InputChannel::random("x", 2, 0, 64, &mut r).unwrap();
        let t = hvs(2, 64, &mut r);
        let a = train_exp(ch.trained().vectors(), &t).unwrap().with_channels(vec![ch.clone()]).unwrap();
        let b = a.clone();
        assert!(merge_exps(&[a, b], &mut r).is_err());
    }

    #[test]
    fn merged_exp_validates_all_members_at_high_d() {
        let mut r = rng(8);
        let d = 10_000;
        let k = 5;
        let mut models = Vec::new();
        let mut dicts = Vec::new();
        for name in CHANNEL_NAMES {
            let ch = InputChannel::random(name, k, 0, d, &mut r).unwrap();
            let targets = Dictionary::indexed(hvs(10, d, &mut r)).unwrap();
            let t: Vec<Hypervector> = targets.vectors()[..k].to_vec();
            models.push(train_exp(ch.trained().vectors(), &t).unwrap().with_channels(vec![ch]).unwrap());
            dicts.push(targets);
        }
        let merged = merge_exps(&models, &mut r).unwrap();
        let target_of: Vec<usize> = (0..k).collect();
        let mut tally = ClassificationTally::default();
        for (m, dict) in models.iter().zip(&dicts) {
            tally.merge(&validate_channel(&merged, &m.channels()[0], &target_of, dict, 0.04).unwrap());
        }
        assert_eq!(tally.sensitivity().unwrap(), 1.0);
        assert_eq!(tally.specificity().unwrap(), 1.0);
    }

    #[test]
    fn novel_scene_is_rejected_at_noise_max() {
        let mut r = rng(9);
        let d = 1000;
        let ch = InputChannel::random("x", 3, 0, d, &mut r).unwrap();
        let targets = hvs(3, d, &mut r);
        let model = train_exp(ch.trained().vectors(), &targets).unwrap();
        let theta = noise_floor(d, 1000, &mut r).unwrap().max_abs;
        let mut hits = 0;
        for _ in 0..200 {
            let novel = Hypervector::random(d, &mut r).unwrap();
            if cleanup(&query_exp(&model, &novel).unwrap(), model.targets(), theta).unwrap().is_some() {
                hits += 1;
            }
        }
        assert!(hits <= 4, "{hits}");
    }

    #[test]
    fn tally_metrics() {
        let t = ClassificationTally { true_pos: 9, false_neg: 1, ..Default::default() };
        assert!((t.sensitivity().unwrap() - 0.9).abs() < 1e-12);
        assert!(matches!(t.specificity(), Err(Error::UndefinedMetric(_))));
        let t = ClassificationTally { true_neg: 30, ..Default::default() };
        assert_eq!(t.specificity().unwrap(), 1.0);
        assert!(t.sensitivity().is_err());
    }

    #[test]
    fn per_entry_scoring_conserves_positives() {
        let mut t = ClassificationTally::default();
        t.record_cleanup(10, Some(3), Some(3));
        t.record_cleanup(10, Some(3), Some(4));
        t.record_cleanup(10, Some(3), None);
        t.record_cleanup(10, None, Some(1));
        t.record_cleanup(10, None, None);
        assert_eq!(t.positives(), 3);
        assert_eq!((t.true_pos, t.false_neg, t.false_pos), (1, 2, 2));
        assert_eq!(t.true_pos + t.false_pos + t.true_neg + t.false_neg, 50);
    }

    #[test]
    fn channel_pool_indexing() {
        let mut r = rng(10);
        let ch = InputChannel::random("x", 2, 2, 32, &mut r).unwrap();
        assert_eq!(ch.pool_size(), 4);
        assert!(ch.is_trained(1) && !ch.is_trained(2));
        assert_eq!(ch.symbol(3).unwrap(), ch.novel().vector(1).unwrap());
        assert!(ch.symbol(4).is_err());
    }

    #[test]
    fn small_monolithic_run_is_deterministic_across_modes() {
        let cfg = MonolithicConfig {
            n: 10,
            d: 1000,
            edges: 20,
            epochs: 100,
            ks: vec![1, 3],
            theta: 0.08,
            trials: 2,
            cycles: 2,
            seed: 11,
            parallel: false,
        };
        let serial = monolithic_experiment(&cfg).unwrap();
        let parallel = monolithic_experiment(&MonolithicConfig { parallel: true, ..cfg.clone() }).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial.summaries.len(), 2);
        assert_eq!(serial.rows.len(), 2 * 2 * 3 * 3 * (1 + 3));
        let k1 = &serial.summaries[0];
        assert_eq!(k1.sensitivity_mean, 1.0);
        assert_eq!(k1.tally.positives(), serial.rows.iter().filter(|r| r.k == 1 && r.truth).count() as u64);
    }
}
