//! Cognitive map learner over a bidirectional graph.
//!
//! Three single-layer networks are trained together with the delta rule:
//!
//! * the state matrix (`d × n`), one column per node, `s = W_q o`;
//! * the action matrix (`d × A`), one displacement column per directed
//!   action, so the predicted next state is `ŝ = s + W_v a`;
//! * the gate matrix (`A × d`), whose generalized-sigmoid output `f_g(W_k s)`
//!   marks which actions are available from `s`.
//!
//! Updates for every directed action are accumulated against the weights at
//! the start of the epoch and applied together, after which state and action
//! columns and gate rows are rescaled to unit length. Planning picks
//! `argmax(g ⊙ W_vᵀ(s* − s))` and advances the internal state by the
//! predicted displacement.

use ndarray::{Array1, Array2, ArrayView1, ShapeBuilder, Zip};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::graph::{Graph, GraphFile};
use crate::hdc::{argmax, cleanup, Dictionary, Hypervector, Vector};

/// Traversals sampled per evaluation.
pub const EVAL_TRAVERSALS: usize = 50;
/// Minimum hop distance between evaluation start and target nodes.
pub const EVAL_MIN_DISTANCE: usize = 2;

const STATE_INIT_SIGMA: f64 = 0.1;
const ACTION_INIT_SIGMA: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmlParams {
    /// Gate saturation point while learning.
    pub alpha_train: f64,
    /// Gate saturation point while planning.
    pub alpha_test: f64,
    pub lr_gate: f64,
    pub lr_action: f64,
    pub lr_state: f64,
    /// Keep the state matrix fixed during training.
    #[serde(default)]
    pub freeze_states: bool,
}

impl Default for CmlParams {
    fn default() -> Self {
        Self { alpha_train: 1.0, alpha_test: 0.1, lr_gate: 0.1, lr_action: 0.1, lr_state: 0.1, freeze_states: false }
    }
}

/// Generalized sigmoid, 0 at `x = 0` and saturating at 1 from `x = alpha`.
pub fn gate_fn(x: f64, alpha: f64) -> f64 {
    let sigmoid = |v: f64| 1.0 / (1.0 + (-v).exp());
    ((sigmoid(x) - 0.5) / (sigmoid(alpha) - 0.5)).clamp(0.0, 1.0)
}

pub fn one_hot(index: usize, len: usize) -> Result<Vec<f64>> {
    if index >= len {
        return Err(Error::OutOfRange { index, len });
    }
    let mut v = vec![0.0; len];
    v[index] = 1.0;
    Ok(v)
}

pub(crate) fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, sigma: f64, rng: &mut R) -> Array2<f64> {
    let normal = Normal::new(0.0, sigma).expect("sigma is positive");
    Array2::from_shape_simple_fn((rows, cols).f(), || normal.sample(rng))
}

/// State and action matrices are stored column-major so that per-node and
/// per-action columns are contiguous.
fn column_major(m: Array2<f64>) -> Array2<f64> {
    if m.t().is_standard_layout() {
        return m;
    }
    let mut out = Array2::zeros(m.raw_dim().f());
    out.assign(&m);
    out
}

fn normalize_columns(m: &mut Array2<f64>) {
    for mut col in m.columns_mut() {
        let norm = col.dot(&col).sqrt();
        if norm > 0.0 {
            col /= norm;
        }
    }
}

fn normalize_rows(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row /= norm;
        }
    }
}

/// Frobenius norms of the summed updates applied in one epoch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpochUpdate {
    pub gate: f64,
    pub action: f64,
    pub state: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub node: usize,
    pub action: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraversalResult {
    /// Steps actually taken; an impermissible selection is not included.
    pub path: Vec<Step>,
    pub reached: bool,
    pub illegal_action: bool,
    pub steps_taken: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraversalRecord {
    pub start: usize,
    pub target: usize,
    pub shortest: usize,
    pub result: TraversalResult,
}

impl TraversalRecord {
    pub fn succeeded(&self) -> bool {
        self.result.reached && !self.result.illegal_action
    }

    /// Path length over the breadth-first optimum.
    pub fn path_ratio(&self) -> f64 {
        self.result.steps_taken as f64 / self.shortest as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    /// Directed actions for which selection between the two endpoint states
    /// returned a different action.
    pub adjacency_errors: usize,
    pub traversals: Vec<TraversalRecord>,
}

impl Evaluation {
    pub fn adjacency_correct(&self) -> bool {
        self.adjacency_errors == 0
    }

    pub fn traversals_correct(&self) -> bool {
        self.traversals.iter().all(TraversalRecord::succeeded)
    }

    pub fn success(&self) -> bool {
        self.adjacency_correct() && self.traversals_correct()
    }

    pub fn path_ratios(&self) -> Vec<f64> {
        self.traversals.iter().filter(|t| t.succeeded()).map(TraversalRecord::path_ratio).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CmlModelFile", into = "CmlModelFile")]
pub struct CmlModel {
    graph: Graph,
    /// `d × n`
    states: Array2<f64>,
    /// `d × A`
    displacements: Array2<f64>,
    /// `A × d`
    gates: Array2<f64>,
    params: CmlParams,
}

impl CmlModel {
    /// Random initialization: Gaussian states (σ = 0.1, then unit columns),
    /// Gaussian displacements (σ = 1) and a zero gate matrix.
    pub fn new<R: Rng + ?Sized>(graph: Graph, d: usize, rng: &mut R) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let states = gaussian_matrix(d, graph.node_count(), STATE_INIT_SIGMA, rng);
        Self::assemble(graph, states, rng)
    }

    /// Initialization around a caller-supplied `d × n` state matrix, which is
    /// rescaled to unit columns and remains trainable unless frozen.
    pub fn with_states<R: Rng + ?Sized>(graph: Graph, states: Array2<f64>, rng: &mut R) -> Result<Self> {
        let (d, n) = states.dim();
        if d == 0 || n != graph.node_count() {
            return Err(Error::ShapeMismatch {
                expected: format!("d x {}", graph.node_count()),
                found: format!("{d} x {n}"),
            });
        }
        Self::assemble(graph, states, rng)
    }

    /// Node states given as bipolar hypervectors, one per node.
    pub fn with_hypervector_states<R: Rng + ?Sized>(graph: Graph, states: &[Hypervector], rng: &mut R) -> Result<Self> {
        let d = states.first().map(Hypervector::dim).ok_or_else(|| Error::invalid("no predefined states"))?;
        let mut m = Array2::zeros((d, states.len()));
        for (j, s) in states.iter().enumerate() {
            check_dim(d, s.dim())?;
            for (i, &e) in s.as_slice().iter().enumerate() {
                m[[i, j]] = f64::from(e);
            }
        }
        Self::with_states(graph, m, rng)
    }

    fn assemble<R: Rng + ?Sized>(graph: Graph, states: Array2<f64>, rng: &mut R) -> Result<Self> {
        let d = states.nrows();
        let mut states = column_major(states);
        normalize_columns(&mut states);
        let displacements = gaussian_matrix(d, graph.action_count(), ACTION_INIT_SIGMA, rng);
        let gates = Array2::zeros((graph.action_count(), d));
        Ok(Self { graph, states, displacements, gates, params: CmlParams::default() })
    }

    pub fn with_params(mut self, params: CmlParams) -> Self {
        self.params = params;
        self
    }

    pub fn params(&self) -> &CmlParams {
        &self.params
    }

    pub fn set_params(&mut self, params: CmlParams) {
        self.params = params;
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.states.nrows()
    }

    pub fn state_matrix(&self) -> &Array2<f64> {
        &self.states
    }

    pub fn action_matrix(&self) -> &Array2<f64> {
        &self.displacements
    }

    pub fn gate_matrix(&self) -> &Array2<f64> {
        &self.gates
    }

    /// Column `node` of the state matrix.
    pub fn state_of(&self, node: usize) -> Result<Vec<f64>> {
        if node >= self.graph.node_count() {
            return Err(Error::OutOfRange { index: node, len: self.graph.node_count() });
        }
        Ok(self.states.column(node).to_vec())
    }

    fn check_state(&self, s: &[f64]) -> Result<()> {
        check_dim(self.dim(), s.len())
    }

    /// `f_g(W_k s)` for every action.
    pub fn gate(&self, s: &[f64], alpha: f64) -> Result<Vec<f64>> {
        self.check_state(s)?;
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::invalid(format!("gate saturation must be positive, got {alpha}")));
        }
        Ok(self.gates.dot(&ArrayView1::from(s)).iter().map(|&x| gate_fn(x, alpha)).collect())
    }

    /// `s + W_v a` for a one-hot action vector.
    pub fn predict_next(&self, s: &[f64], action: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.graph.action_count(), action.len())?;
        let ones = action.iter().filter(|&&x| x == 1.0).count();
        let zeros = action.iter().filter(|&&x| x == 0.0).count();
        if ones != 1 || ones + zeros != action.len() {
            return Err(Error::invalid("action vector is not one-hot"));
        }
        let index = action.iter().position(|&x| x == 1.0).expect("one entry is 1");
        self.predict_with(s, index)
    }

    pub fn predict_with(&self, s: &[f64], action: usize) -> Result<Vec<f64>> {
        self.check_state(s)?;
        if action >= self.graph.action_count() {
            return Err(Error::OutOfRange { index: action, len: self.graph.action_count() });
        }
        Ok(s.iter().zip(self.displacements.column(action)).map(|(a, b)| a + b).collect())
    }

    /// Gated utilities `g ⊙ W_vᵀ(s* − s)` at the planning saturation point.
    pub fn action_scores(&self, s: &[f64], target: &[f64]) -> Result<Vec<f64>> {
        self.check_state(s)?;
        self.check_state(target)?;
        let diff: Array1<f64> = target.iter().zip(s).map(|(t, c)| t - c).collect();
        let utility = self.displacements.t().dot(&diff);
        let gate = self.gate(s, self.params.alpha_test)?;
        Ok(utility.iter().zip(&gate).map(|(u, g)| u * g).collect())
    }

    /// Winner-take-all action index; ties go to the lowest index.
    pub fn select_action(&self, s: &[f64], target: &[f64]) -> Result<usize> {
        let scores = self.action_scores(s, target)?;
        argmax(&scores).ok_or_else(|| Error::invalid("graph has no actions"))
    }

    /// One batch epoch over every directed action.
    pub fn train_epoch(&mut self) -> EpochUpdate {
        let p = self.params;
        let n = self.states.ncols();
        let count = self.graph.action_count();

        // Gate output depends only on the source state, so evaluate it once
        // per node: column u holds f_g(W_k s_u).
        let gate_out = self.gates.dot(&self.states).mapv(|x| gate_fn(x, p.alpha_train));
        // Σ over actions from u of (a_t − g_u), per node.
        let mut gate_err = Array2::<f64>::zeros((count, n));
        for u in 0..n {
            let deg = self.graph.degree(u) as f64;
            let mut col = gate_err.column_mut(u);
            col.scaled_add(-deg, &gate_out.column(u));
            for &a in self.graph.permissible_actions(u).expect("node in range") {
                col[a] += 1.0;
            }
        }
        let d_gate = gate_err.dot(&self.states.t()) * p.lr_gate;
        let gate_norm = d_gate.iter().map(|x| x * x).sum::<f64>().sqrt();
        self.gates += &d_gate;

        // Prediction error per action, e = s_v − (s_u + W_v a), drives both
        // the displacement and the destination state.
        let mut d_state = Array2::<f64>::zeros(self.states.raw_dim().f());
        let mut action_sq = 0.0;
        for (a, act) in self.graph.actions().iter().enumerate() {
            let src = self.states.column(act.source);
            let dst = self.states.column(act.target);
            Zip::from(self.displacements.column_mut(a))
                .and(&src)
                .and(&dst)
                .and(d_state.column_mut(act.target))
                .for_each(|w, &s, &t, q| {
                    let e = t - s - *w;
                    let dw = p.lr_action * e;
                    action_sq += dw * dw;
                    *w += dw;
                    *q -= p.lr_state * e;
                });
        }

        let mut state_norm = 0.0;
        if !p.freeze_states {
            state_norm = d_state.iter().map(|x| x * x).sum::<f64>().sqrt();
            self.states += &d_state;
            normalize_columns(&mut self.states);
        }
        normalize_columns(&mut self.displacements);
        normalize_rows(&mut self.gates);
        EpochUpdate { gate: gate_norm, action: action_sq.sqrt(), state: state_norm }
    }

    pub fn train(&mut self, epochs: usize) -> Result<EpochUpdate> {
        if epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        let mut last = self.train_epoch();
        for _ in 1..epochs {
            last = self.train_epoch();
        }
        Ok(last)
    }

    /// Open-loop planning from `start` toward `target_state`. The internal
    /// state advances by predicted displacements while the true node is
    /// tracked on the graph; an impermissible selection stops the walk.
    pub fn traverse(&self, start: usize, target_state: &[f64], target_node: usize, max_steps: usize) -> Result<TraversalResult> {
        let n = self.graph.node_count();
        for node in [start, target_node] {
            if node >= n {
                return Err(Error::OutOfRange { index: node, len: n });
            }
        }
        if max_steps == 0 {
            return Err(Error::invalid("max_steps must be at least 1"));
        }
        let mut s = self.state_of(start)?;
        let mut node = start;
        let mut path = Vec::new();
        let mut illegal_action = false;
        while node != target_node && path.len() < max_steps {
            let action = self.select_action(&s, target_state)?;
            let a = *self.graph.action(action)?;
            if a.source != node {
                illegal_action = true;
                break;
            }
            path.push(Step { node, action });
            s = self.predict_with(&s, action)?;
            node = a.target;
        }
        let steps_taken = path.len();
        Ok(TraversalResult { path, reached: node == target_node && !illegal_action, illegal_action, steps_taken })
    }

    /// Default step cap for a traversal: four times the node count.
    pub fn default_max_steps(&self) -> usize {
        4 * self.graph.node_count()
    }

    /// Checks every directed action between its endpoint states, then
    /// [`EVAL_TRAVERSALS`] random traversals between nodes at least
    /// [`EVAL_MIN_DISTANCE`] hops apart.
    pub fn evaluate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Evaluation> {
        let mut adjacency_errors = 0;
        for a in self.graph.actions() {
            let chosen = self.select_action(&self.state_of(a.source)?, &self.state_of(a.target)?)?;
            if chosen != a.index {
                adjacency_errors += 1;
            }
        }

        let dist = self.graph.distance_matrix();
        let n = self.graph.node_count();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| dist[u][v] >= EVAL_MIN_DISTANCE)
            .collect();
        let mut traversals = Vec::new();
        if !pairs.is_empty() {
            for _ in 0..EVAL_TRAVERSALS {
                let &(start, target) = pairs.choose(rng).expect("non-empty");
                let result = self.traverse(start, &self.state_of(target)?, target, self.default_max_steps())?;
                traversals.push(TraversalRecord { start, target, shortest: dist[start][target], result });
            }
        }
        Ok(Evaluation { adjacency_errors, traversals })
    }

    /// Signs of the state columns, labelled by node index.
    pub fn signed_states(&self) -> Dictionary<Hypervector> {
        Dictionary::indexed(self.states.columns().into_iter().map(|c| {
            Hypervector::from_real(c.as_slice().map_or(&c.to_vec()[..], |s| s)).expect("d > 0")
        }))
        .expect("node labels are unique")
    }

    /// `[i][j]` = sim(sᵢ, sgn(sⱼ)) over the real-valued states.
    pub fn sign_similarity_matrix(&self) -> Vec<Vec<f64>> {
        let signed = self.signed_states();
        let n = self.graph.node_count();
        (0..n)
            .map(|i| {
                let s = self.states.column(i).to_vec();
                signed.similarities(&s).expect("same dimension")
            })
            .collect()
    }

    /// Real-valued node states, labelled by node index.
    pub fn real_states(&self) -> Dictionary<Vec<f64>> {
        Dictionary::indexed(self.states.columns().into_iter().map(|c| c.to_vec())).expect("node labels are unique")
    }

    /// Cleans `response` against the signed node states. Returns the node the
    /// model should travel to, or `None` when nothing clears `theta`.
    pub fn accept_target<V: Vector + ?Sized>(&self, response: &V, theta: f64) -> Result<Option<usize>> {
        check_dim(self.dim(), response.dim())?;
        let dict = self.signed_states();
        Ok(cleanup(response, &dict, theta)?.map(|m| m.index))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Random connected graph with `edges` undirected edges, then a freshly
/// initialized model trained for `epochs`.
pub fn train_random_cml<R: Rng + ?Sized>(n: usize, edges: usize, d: usize, epochs: usize, rng: &mut R) -> Result<CmlModel> {
    let graph = crate::graph::random_connected_graph(n, edges, rng)?;
    let mut model = CmlModel::new(graph, d, rng)?;
    model.train(epochs)?;
    Ok(model)
}

/// Serialized model: matrices as row-major nested arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CmlModelFile {
    pub d: usize,
    pub graph: GraphFile,
    pub params: CmlParams,
    pub w_q: Vec<Vec<f64>>,
    pub w_v: Vec<Vec<f64>>,
    pub w_k: Vec<Vec<f64>>,
}

fn to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows(name: &str, rows: &[Vec<f64>], shape: (usize, usize)) -> Result<Array2<f64>> {
    let found_cols = rows.first().map_or(0, Vec::len);
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(Error::ShapeMismatch {
            expected: format!("{name} {} x {}", shape.0, shape.1),
            found: format!("{} x {found_cols}", rows.len()),
        });
    }
    Ok(Array2::from_shape_fn(shape.f(), |(i, j)| rows[i][j]))
}

impl TryFrom<CmlModelFile> for CmlModel {
    type Error = Error;
    fn try_from(f: CmlModelFile) -> Result<Self> {
        let graph = Graph::try_from(f.graph)?;
        let (n, a) = (graph.node_count(), graph.action_count());
        Ok(CmlModel {
            states: from_rows("w_q", &f.w_q, (f.d, n))?,
            displacements: from_rows("w_v", &f.w_v, (f.d, a))?,
            gates: from_rows("w_k", &f.w_k, (a, f.d))?,
            graph,
            params: f.params,
        })
    }
}

impl From<CmlModel> for CmlModelFile {
    fn from(m: CmlModel) -> Self {
        CmlModelFile {
            d: m.dim(),
            w_q: to_rows(&m.states),
            w_v: to_rows(&m.displacements),
            w_k: to_rows(&m.gates),
            params: m.params,
            graph: m.graph.into(),
        }
    }
}
