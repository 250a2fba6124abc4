//! Exact, exponential-time solvers for checking results on small inputs.
//!
//! Costs are rescaled to integers (`i128`) by their common denominator before
//! any exponential loop runs; inputs whose scaled magnitudes are too large are
//! refused like any other size limit.

use std::collections::HashMap;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::graph::{self, EdgeId, Graph, VertexId};
use crate::instance::{Instance, RoutingSolution};
use crate::rational::{self, Rational};

/// Bound on scaled integer magnitudes; keeps every sum of products well inside `i128`.
const SCALED_BOUND: i128 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Terminals per Dreyfus-Wagner call.
    pub max_terminals: usize,
    /// Edges for exhaustive coverage enumeration.
    pub max_edges: usize,
    /// Groups for exhaustive enumeration.
    pub max_groups: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_terminals: 10,
            max_edges: 14,
            max_groups: 3,
        }
    }
}

impl OracleLimits {
    pub const ENV_VAR: &'static str = "COVNET_ORACLE_LIMITS";

    /// Defaults overridden by `COVNET_ORACLE_LIMITS`, if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(text) => Self::default().with_overrides(&text),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Applies overrides of the form `e=14,g=3,k=10`.
    pub fn with_overrides(mut self, text: &str) -> Result<Self> {
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("oracle limit `{part}` is not key=value")))?;
            let value = usize::from_str(value.trim())
                .map_err(|_| Error::Parse(format!("oracle limit `{part}` is not a number")))?;
            if value == 0 {
                return Err(Error::Parse(format!("oracle limit `{part}` must be positive")));
            }
            match key.trim() {
                "e" => self.max_edges = value,
                "g" => self.max_groups = value,
                "k" => self.max_terminals = value,
                other => return Err(Error::Parse(format!("unknown oracle limit `{other}`"))),
            }
        }
        Ok(self)
    }

    fn check(&self, what: &'static str, actual: usize, limit: usize) -> Result<()> {
        if actual > limit {
            return Err(Error::OracleLimit {
                what,
                actual,
                limit,
            });
        }
        Ok(())
    }
}

fn scaled_costs(graph: &Graph) -> Result<(Vec<i128>, BigInt)> {
    let costs: Vec<Rational> = graph.edges().iter().map(|e| e.cost.clone()).collect();
    let scale = rational::common_denominator(&costs);
    let ints = rational::scaled_integers(&costs, &scale, SCALED_BOUND).ok_or(
        Error::OracleLimit {
            what: "scaled edge cost bits",
            actual: 128,
            limit: 40,
        },
    )?;
    Ok((ints, scale))
}

/// All-pairs shortest paths with the first edge of one shortest path.
struct Metric {
    dist: Vec<Vec<Option<i128>>>,
    next: Vec<Vec<Option<(VertexId, EdgeId)>>>,
}

impl Metric {
    fn new(graph: &Graph, costs: &[i128]) -> Self {
        let n = graph.vertex_count();
        let mut dist = vec![vec![None; n]; n];
        let mut next = vec![vec![None; n]; n];
        for (v, row) in dist.iter_mut().enumerate() {
            row[v] = Some(0);
        }
        for (e, edge) in graph.edges().iter().enumerate() {
            let (u, v) = edge.endpoints();
            if dist[u][v].map_or(true, |d| costs[e] < d) {
                dist[u][v] = Some(costs[e]);
                dist[v][u] = Some(costs[e]);
                next[u][v] = Some((v, e));
                next[v][u] = Some((u, e));
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(dik) = dist[i][k] else { continue };
                for j in 0..n {
                    let Some(dkj) = dist[k][j] else { continue };
                    if dist[i][j].map_or(true, |d| dik + dkj < d) {
                        dist[i][j] = Some(dik + dkj);
                        next[i][j] = next[i][k];
                    }
                }
            }
        }
        Metric { dist, next }
    }

    fn path(&self, mut from: VertexId, to: VertexId, out: &mut Vec<EdgeId>) {
        while from != to {
            let (step, e) = self.next[from][to].expect("connected");
            out.push(e);
            from = step;
        }
    }
}

#[derive(Clone, Copy)]
enum Back {
    Leaf(usize),
    Split(usize),
}

/// Optimal Steiner tree by the Dreyfus-Wagner dynamic program over
/// (terminal subset, vertex) states.
pub fn exact_steiner_tree(
    graph: &Graph,
    terminals: &[VertexId],
    limits: &OracleLimits,
) -> Result<(Vec<EdgeId>, Rational)> {
    let mut ts = terminals.to_vec();
    ts.sort_unstable();
    ts.dedup();
    limits.check("terminals", ts.len(), limits.max_terminals)?;
    if let Some(&bad) = ts.iter().find(|&&t| t >= graph.vertex_count()) {
        return Err(Error::InvalidInstance(format!("terminal {bad} is not a vertex")));
    }
    graph.require_same_component(&ts, "Steiner terminals span several components")?;
    if ts.len() <= 1 {
        return Ok((Vec::new(), Rational::from_integer(0.into())));
    }
    let (costs, _) = scaled_costs(graph)?;
    let metric = Metric::new(graph, &costs);
    let n = graph.vertex_count();
    let k = ts.len();
    let full = (1usize << k) - 1;

    // split[mask][v]: best tree for mask ∪ {v} in which v has degree >= 2 (or v is
    // the terminal itself); best[mask][v] additionally allows a path from v to
    // some u and a split tree at u.
    let mut split: Vec<Vec<Option<i128>>> = vec![vec![None; n]; full + 1];
    let mut split_back: Vec<Vec<Back>> = vec![vec![Back::Leaf(0); n]; full + 1];
    let mut best: Vec<Vec<Option<i128>>> = vec![vec![None; n]; full + 1];
    let mut best_via: Vec<Vec<VertexId>> = vec![vec![0; n]; full + 1];

    for mask in 1..=full {
        if mask.count_ones() == 1 {
            let i = mask.trailing_zeros() as usize;
            for v in 0..n {
                split[mask][v] = metric.dist[ts[i]][v];
                split_back[mask][v] = Back::Leaf(i);
                best[mask][v] = metric.dist[ts[i]][v];
                best_via[mask][v] = v;
            }
            continue;
        }
        let low = mask & mask.wrapping_neg();
        for v in 0..n {
            let mut sub = (mask - 1) & mask;
            let mut value: Option<(i128, usize)> = None;
            while sub > 0 {
                if sub & low != 0 && sub != mask {
                    if let (Some(a), Some(b)) = (best[sub][v], best[mask ^ sub][v]) {
                        if value.map_or(true, |(c, _)| a + b < c) {
                            value = Some((a + b, sub));
                        }
                    }
                }
                sub = (sub - 1) & mask;
            }
            if let Some((c, s)) = value {
                split[mask][v] = Some(c);
                split_back[mask][v] = Back::Split(s);
            }
        }
        for v in 0..n {
            let mut choice: Option<(i128, VertexId)> = None;
            for u in 0..n {
                if let (Some(a), Some(d)) = (split[mask][u], metric.dist[u][v]) {
                    if choice.map_or(true, |(c, _)| a + d < c) {
                        choice = Some((a + d, u));
                    }
                }
            }
            if let Some((c, u)) = choice {
                best[mask][v] = Some(c);
                best_via[mask][v] = u;
            }
        }
    }

    fn rebuild(
        mask: usize,
        v: VertexId,
        ts: &[VertexId],
        metric: &Metric,
        split_back: &[Vec<Back>],
        best_via: &[Vec<VertexId>],
        out: &mut Vec<EdgeId>,
    ) {
        let u = best_via[mask][v];
        metric.path(v, u, out);
        match split_back[mask][u] {
            Back::Leaf(i) => metric.path(u, ts[i], out),
            Back::Split(sub) => {
                rebuild(sub, u, ts, metric, split_back, best_via, out);
                rebuild(mask ^ sub, u, ts, metric, split_back, best_via, out);
            }
        }
    }

    let mut edges = Vec::new();
    rebuild(full, ts[0], &ts, &metric, &split_back, &best_via, &mut edges);
    edges.sort_unstable();
    edges.dedup();
    let tree = graph::prune_to_terminals(graph, &edges, &ts);
    let cost = graph.cost_of(&tree);
    Ok((tree, cost))
}

/// Optimal Steiner forest: every component of an optimal forest connects
/// a union of whole groups, so the optimum is the cheapest partition of the
/// groups into blocks, each block paying one exact Steiner tree.
pub fn exact_steiner_forest(
    graph: &Graph,
    groups: &[Vec<VertexId>],
    limits: &OracleLimits,
) -> Result<(Vec<EdgeId>, Rational)> {
    limits.check("groups", groups.len(), limits.max_groups)?;
    let mut memo: HashMap<usize, Option<(Vec<EdgeId>, Rational)>> = HashMap::new();
    let labels = graph.component_labels();
    let mut best: Option<(Rational, Vec<usize>)> = None;

    for partition in set_partitions(groups.len()) {
        let mut total = Rational::from_integer(0.into());
        let mut feasible = true;
        for &block in &partition {
            if !memo.contains_key(&block) {
                let mut ts: Vec<VertexId> = (0..groups.len())
                    .filter(|j| block >> j & 1 == 1)
                    .flat_map(|j| groups[j].iter().copied())
                    .collect();
                ts.sort_unstable();
                ts.dedup();
                let value = if ts.iter().all(|&t| labels[t] == labels[ts[0]]) {
                    Some(exact_steiner_tree(graph, &ts, limits)?)
                } else {
                    None
                };
                memo.insert(block, value);
            }
            match &memo[&block] {
                Some((_, c)) => total += c,
                None => feasible = false,
            }
        }
        if feasible && best.as_ref().map_or(true, |(c, _)| total < *c) {
            best = Some((total, partition));
        }
    }
    let Some((_, partition)) = best else {
        return Ok((Vec::new(), Rational::from_integer(0.into())));
    };
    let mut edges: Vec<EdgeId> = partition
        .iter()
        .flat_map(|b| memo[b].as_ref().unwrap().0.iter().copied())
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let cost = graph.cost_of(&edges);
    Ok((edges, cost))
}

/// Set partitions of `0..n`, each as a list of block bitmasks.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(i: usize, n: usize, blocks: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            grow(i + 1, n, blocks, out);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        grow(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    grow(0, n, &mut Vec::new(), &mut out);
    out
}

/// Every inclusion-minimal tree containing `terminals`: edge subsets that
/// form a tree whose leaves are all terminals. Sorted lexicographically.
pub fn minimal_trees(graph: &Graph, terminals: &[VertexId]) -> Vec<Vec<EdgeId>> {
    let m = graph.edge_count();
    let n = graph.vertex_count();
    let mut is_terminal = vec![false; n];
    for &t in terminals {
        is_terminal[t] = true;
    }
    let mut trees = Vec::new();
    let mut degree = vec![0usize; n];
    for mask in 1u64..(1u64 << m) {
        let edges: Vec<EdgeId> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        degree.iter_mut().for_each(|d| *d = 0);
        for &e in &edges {
            let (u, v) = graph.edge(e).endpoints();
            degree[u] += 1;
            degree[v] += 1;
        }
        if terminals.iter().any(|&t| degree[t] == 0) {
            continue;
        }
        if (0..n).any(|v| degree[v] == 1 && !is_terminal[v]) {
            continue;
        }
        let touched = degree.iter().filter(|&&d| d > 0).count();
        if edges.len() + 1 != touched || !graph::is_forest(graph, &edges) {
            continue;
        }
        trees.push(edges);
    }
    trees.sort();
    trees
}

/// Exact coverage-cost optimum by branch and bound over per-group minimal trees.
pub fn exact_coverage_optimum(
    instance: &Instance,
    limits: &OracleLimits,
) -> Result<(RoutingSolution, Rational)> {
    let graph = instance.graph();
    limits.check("edges", graph.edge_count(), limits.max_edges.min(63))?;
    limits.check("groups", instance.group_count(), limits.max_groups)?;
    limits.check("packets", instance.packet_names().len(), 128)?;

    let (costs, cost_scale) = scaled_costs(graph)?;
    let weights = instance.packet_weights();
    let weight_scale = rational::common_denominator(weights);
    let packet_weights = rational::scaled_integers(weights, &weight_scale, SCALED_BOUND).ok_or(
        Error::OracleLimit {
            what: "scaled packet weight bits",
            actual: 128,
            limit: 40,
        },
    )?;

    let g = instance.group_count();
    let demand_masks: Vec<u128> = instance
        .groups()
        .iter()
        .map(|grp| grp.demand.iter().fold(0u128, |acc, &p| acc | 1 << p))
        .collect();
    let trees: Vec<Vec<Vec<EdgeId>>> = instance
        .groups()
        .iter()
        .map(|grp| minimal_trees(graph, &grp.terminals))
        .collect();
    let weight_of = |mask: u128| -> i128 {
        (0..128)
            .filter(|p| mask >> p & 1 == 1)
            .map(|p| packet_weights[p])
            .sum()
    };

    // Packets demanded by one group only must be paid on that group's tree.
    let private_bound: Vec<i128> = (0..g)
        .map(|j| {
            let others = (0..g)
                .filter(|&o| o != j)
                .fold(0u128, |acc, o| acc | demand_masks[o]);
            let w = weight_of(demand_masks[j] & !others);
            trees[j]
                .iter()
                .map(|t| t.iter().map(|&e| costs[e] * w).sum::<i128>())
                .min()
                .unwrap_or(0)
        })
        .collect();
    let mut remaining_bound = vec![0i128; g + 1];
    for j in (0..g).rev() {
        remaining_bound[j] = remaining_bound[j + 1] + private_bound[j];
    }

    struct Search<'s> {
        trees: &'s [Vec<Vec<EdgeId>>],
        costs: &'s [i128],
        demand_masks: &'s [u128],
        remaining_bound: &'s [i128],
        weight_cache: HashMap<u128, i128>,
        packet_weights: &'s [i128],
        loads: Vec<u128>,
        choice: Vec<usize>,
        best: Option<(i128, Vec<usize>)>,
    }

    impl Search<'_> {
        fn weight(&mut self, mask: u128) -> i128 {
            let pw = self.packet_weights;
            *self.weight_cache.entry(mask).or_insert_with(|| {
                (0..128)
                    .filter(|p| mask >> p & 1 == 1)
                    .map(|p| pw[p])
                    .sum()
            })
        }

        fn run(&mut self, j: usize, partial: i128) {
            if j == self.trees.len() {
                if self.best.as_ref().map_or(true, |(c, _)| partial < *c) {
                    self.best = Some((partial, self.choice.clone()));
                }
                return;
            }
            let demand = self.demand_masks[j];
            for t in 0..self.trees[j].len() {
                let mut increment = 0i128;
                for &e in &self.trees[j][t] {
                    let before = self.loads[e];
                    let after = before | demand;
                    if after != before {
                        increment += self.costs[e] * (self.weight(after) - self.weight(before));
                    }
                }
                let next = partial + increment;
                if let Some((c, _)) = &self.best {
                    if next + self.remaining_bound[j + 1] >= *c {
                        continue;
                    }
                }
                let saved: Vec<u128> = self.trees[j][t].iter().map(|&e| self.loads[e]).collect();
                for &e in &self.trees[j][t] {
                    self.loads[e] |= demand;
                }
                self.choice.push(t);
                self.run(j + 1, next);
                self.choice.pop();
                for (&e, old) in self.trees[j][t].iter().zip(saved) {
                    self.loads[e] = old;
                }
            }
        }
    }

    let mut search = Search {
        trees: &trees,
        costs: &costs,
        demand_masks: &demand_masks,
        remaining_bound: &remaining_bound,
        weight_cache: HashMap::new(),
        packet_weights: &packet_weights,
        loads: vec![0; graph.edge_count()],
        choice: Vec::with_capacity(g),
        best: None,
    };
    search.run(0, 0);
    let (total, choice) = search
        .best
        .ok_or_else(|| Error::Infeasible("some group has no spanning tree".into()))?;
    let solution = RoutingSolution::new(
        choice
            .iter()
            .enumerate()
            .map(|(j, &t)| trees[j][t].clone())
            .collect(),
    );
    let cost = rational::from_scaled(total, &(cost_scale * weight_scale));
    debug_assert_eq!(cost, crate::instance::load_cost(instance, &solution).unwrap());
    Ok((solution, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use std::collections::BTreeMap;

    fn limits() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn parses_limit_overrides() {
        let l = OracleLimits::default().with_overrides("e=12, g=2,k=8").unwrap();
        assert_eq!(
            l,
            OracleLimits {
                max_terminals: 8,
                max_edges: 12,
                max_groups: 2
            }
        );
        assert!(OracleLimits::default().with_overrides("x=1").is_err());
        assert!(OracleLimits::default().with_overrides("e=0").is_err());
    }

    #[test]
    fn steiner_tree_small_cases() {
        let g = Graph::new(
            4,
            vec![(0, 1, int(2)), (1, 2, int(2)), (0, 2, int(5)), (2, 3, int(1))],
        )
        .unwrap();
        let (t, c) = exact_steiner_tree(&g, &[1], &limits()).unwrap();
        assert!(t.is_empty());
        assert_eq!(c, int(0));
        let (_, c) = exact_steiner_tree(&g, &[0, 2], &limits()).unwrap();
        assert_eq!(c, int(4));
    }

    #[test]
    fn steiner_tree_star_leaves() {
        let g = Graph::unit(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (t, c) = exact_steiner_tree(&g, &[1, 2, 3], &limits()).unwrap();
        assert_eq!(c, int(3));
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn steiner_tree_refuses_too_many_terminals() {
        let g = Graph::unit(12, &(1..12).map(|v| (0, v)).collect::<Vec<_>>()).unwrap();
        let ts: Vec<usize> = (1..12).collect();
        assert!(matches!(
            exact_steiner_tree(&g, &ts, &limits()),
            Err(Error::OracleLimit { actual: 11, limit: 10, .. })
        ));
    }

    #[test]
    fn steiner_forest_cases() {
        let path = Graph::unit(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let (_, c) = exact_steiner_forest(&path, &[vec![0, 1], vec![2, 3]], &limits()).unwrap();
        assert_eq!(c, int(2));
        let (_, c) = exact_steiner_forest(&path, &[vec![0, 3], vec![0, 3]], &limits()).unwrap();
        assert_eq!(c, int(3));
        let (_, c) = exact_steiner_forest(&path, &[vec![0, 2]], &limits()).unwrap();
        assert_eq!(c, int(2));
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn coverage_optimum_cases() {
        let edge = Graph::unit(2, &[(0, 1)]).unwrap();
        let single = Instance::new(
            edge,
            [("p".to_string(), int(3))].into_iter().collect(),
            vec![(vec![0, 1], vec!["p".into()])],
        )
        .unwrap();
        assert_eq!(exact_coverage_optimum(&single, &limits()).unwrap().1, int(3));

        // Path 0-1-2, groups {0,1} and {1,2} with demands {0,1} and {0,2}.
        let path = Graph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        let sun = Instance::new(
            path,
            BTreeMap::new(),
            vec![
                (vec![0, 1], vec!["0".into(), "1".into()]),
                (vec![1, 2], vec!["0".into(), "2".into()]),
            ],
        )
        .unwrap();
        assert_eq!(exact_coverage_optimum(&sun, &limits()).unwrap().1, int(4));
    }

    #[test]
    fn coverage_optimum_shares_edges_on_a_cycle() {
        // Two groups on a 4-cycle demanding the same packet: routing both
        // along one shared path beats two disjoint paths.
        let g = Graph::unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let inst = Instance::new(
            g,
            BTreeMap::new(),
            vec![
                (vec![0, 2], vec!["a".into()]),
                (vec![0, 1], vec!["a".into()]),
            ],
        )
        .unwrap();
        let (sol, cost) = exact_coverage_optimum(&inst, &limits()).unwrap();
        assert_eq!(cost, int(2));
        assert_eq!(crate::instance::load_cost(&inst, &sol).unwrap(), int(2));
    }

    #[test]
    fn minimal_trees_of_a_four_cycle_pair() {
        let g = Graph::unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        // opposite corners: the two 2-paths; adjacent corners: the edge and the 3-path
        assert_eq!(minimal_trees(&g, &[0, 2]).len(), 2);
        assert_eq!(minimal_trees(&g, &[0, 1]).len(), 2);
    }

    #[test]
    fn coverage_refuses_large_inputs() {
        let edges: Vec<_> = (0..15).map(|v| (v, v + 1)).collect();
        let g = Graph::unit(16, &edges).unwrap();
        let inst = Instance::new(g, BTreeMap::new(), vec![(vec![0, 15], vec!["a".into()])]).unwrap();
        assert!(matches!(
            exact_coverage_optimum(&inst, &limits()),
            Err(Error::OracleLimit { what: "edges", .. })
        ));
    }
}
