//! Connected bidirectional graphs and their directed-action tables.
//!
//! Edges are stored sorted as `(u, v)` with `u < v`. Edge `i` yields two
//! directed actions: `2i` is `u → v` and `2i + 1` is `v → u`, so the reverse
//! of action `a` is `a ^ 1`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub index: usize,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    actions: Vec<Action>,
    outgoing: Vec<Vec<usize>>,
}

/// On-disk form: `{"n": int, "edges": [[u, v], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;
    fn try_from(f: GraphFile) -> Result<Self> {
        Graph::new(f.n, f.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile { n: g.n, edges: g.edges.iter().map(|&(u, v)| [u, v]).collect() }
    }
}

impl Graph {
    /// Validates and indexes an undirected edge list. The graph must be
    /// connected, without self-loops or duplicate edges.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("graph needs at least 2 nodes, got {n}")));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::OutOfRange { index: u.max(v), len: n });
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at node {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut actions = Vec::with_capacity(2 * edges.len());
        let mut outgoing = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            for (index, source, target) in [(2 * i, u, v), (2 * i + 1, v, u)] {
                actions.push(Action { index, source, target });
                outgoing[source].push(index);
            }
        }
        let g = Graph { n, edges, actions, outgoing };
        if g.distances_from(0)?.iter().any(Option::is_none) {
            return Err(Error::invalid("graph is not connected"));
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, index: usize) -> Result<&Action> {
        self.actions.get(index).ok_or(Error::OutOfRange { index, len: self.actions.len() })
    }

    pub fn degree(&self, node: usize) -> usize {
        self.outgoing.get(node).map_or(0, Vec::len)
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.n {
            return Err(Error::OutOfRange { index: node, len: self.n });
        }
        Ok(())
    }

    /// Directed actions leaving `node`, in index order.
    pub fn permissible_actions(&self, node: usize) -> Result<&[usize]> {
        self.check_node(node)?;
        Ok(&self.outgoing[node])
    }

    /// Index of the action `source → target`, if the edge exists.
    pub fn action_between(&self, source: usize, target: usize) -> Option<usize> {
        self.outgoing.get(source)?.iter().copied().find(|&a| self.actions[a].target == target)
    }

    pub fn action_reverse(action: usize) -> usize {
        action ^ 1
    }

    /// Breadth-first hop counts from `start`; `None` marks unreachable nodes.
    pub fn distances_from(&self, start: usize) -> Result<Vec<Option<usize>>> {
        self.check_node(start)?;
        let mut dist = vec![None; self.n];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have a distance");
            for &a in &self.outgoing[u] {
                let v = self.actions[a].target;
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    pub fn shortest_path_length(&self, u: usize, v: usize) -> Result<usize> {
        self.check_node(v)?;
        self.distances_from(u)?[v].ok_or_else(|| Error::invalid(format!("node {v} unreachable from {u}")))
    }

    /// All-pairs hop counts.
    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|u| {
                self.distances_from(u)
                    .expect("node in range")
                    .into_iter()
                    .map(|d| d.expect("graph is connected"))
                    .collect()
            })
            .collect()
    }
}

/// Uniform random labelled spanning tree (random Prüfer sequence) plus
/// distinct random non-tree edges up to `num_edges`.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, num_edges: usize, rng: &mut R) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!("graph needs at least 2 nodes, got {n}")));
    }
    let max_edges = n * (n - 1) / 2;
    if num_edges < n - 1 || num_edges > max_edges {
        return Err(Error::invalid(format!(
            "{num_edges} edges infeasible for a connected simple graph on {n} nodes (need {}..={max_edges})",
            n - 1
        )));
    }
    let mut edges: BTreeSet<(usize, usize)> = prufer_tree(n, rng).into_iter().collect();
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|e| !edges.contains(e))
        .collect();
    let extra = num_edges - edges.len();
    let (chosen, _) = candidates.partial_shuffle(rng, extra);
    edges.extend(chosen.iter().copied());
    Graph::new(n, edges)
}

fn prufer_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| degree[i] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.push(Reverse(s));
        }
    }
    let Reverse(a) = leaves.pop().expect("two leaves remain");
    let Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push((a.min(b), a.max(b)));
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn two_nodes_forced() {
        let g = random_connected_graph(2, 1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(g.action_count(), 2);
    }

    #[test]
    fn handshake_identity() {
        let g = random_connected_graph(10, 20, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(g.edge_count(), 20);
        assert_eq!(g.action_count(), 40);
        let degree_sum: usize = (0..10).map(|u| g.degree(u)).sum();
        assert_eq!(degree_sum, 40);
    }

    #[test]
    fn generated_graphs_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let g = random_connected_graph(25, 50, &mut rng).unwrap();
            assert!(g.distances_from(0).unwrap().iter().all(Option::is_some));
        }
    }

    #[test]
    fn tree_only_and_complete_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(random_connected_graph(8, 7, &mut rng).unwrap().edge_count(), 7);
        assert_eq!(random_connected_graph(8, 28, &mut rng).unwrap().edge_count(), 28);
        assert!(random_connected_graph(8, 6, &mut rng).is_err());
        assert!(random_connected_graph(8, 29, &mut rng).is_err());
        assert!(random_connected_graph(1, 0, &mut rng).is_err());
    }

    #[test]
    fn shortest_paths_on_a_path() {
        let g = path(4);
        assert_eq!(g.shortest_path_length(2, 2).unwrap(), 0);
        assert_eq!(g.shortest_path_length(1, 2).unwrap(), 1);
        assert_eq!(g.shortest_path_length(0, 3).unwrap(), 3);
        assert!(matches!(g.shortest_path_length(0, 9), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn star_permissible_actions() {
        let g = Graph::new(5, (1..5).map(|i| (0, i))).unwrap();
        assert_eq!(g.permissible_actions(0).unwrap().len(), 4);
        assert_eq!(g.permissible_actions(3).unwrap().len(), 1);
        let mut all: Vec<usize> = (0..5).flat_map(|u| g.permissible_actions(u).unwrap().to_vec()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..g.action_count()).collect::<Vec<_>>());
        assert!(g.permissible_actions(5).is_err());
    }

    #[test]
    fn action_indexing_convention() {
        let g = Graph::new(3, [(2, 1), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        let a = g.actions();
        assert_eq!((a[0].source, a[0].target), (0, 1));
        assert_eq!((a[1].source, a[1].target), (1, 0));
        assert_eq!((a[2].source, a[2].target), (1, 2));
        assert_eq!(g.action_between(2, 1), Some(3));
        assert_eq!(g.action_between(0, 2), None);
    }

    #[test]
    fn invalid_graphs_rejected() {
        assert!(Graph::new(3, [(0, 0), (0, 1), (1, 2)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0), (1, 2)]).is_err());
        assert!(Graph::new(4, [(0, 1), (2, 3)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 5)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = random_connected_graph(6, 9, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.starts_with("{\"n\":6,\"edges\":[["));
        assert_eq!(serde_json::from_str::<Graph>(&json).unwrap(), g);
        assert!(serde_json::from_str::<Graph>(r#"{"n":3,"edges":[[0,1]]}"#).is_err());
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = random_connected_graph(25, 50, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = random_connected_graph(25, 50, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }
}
