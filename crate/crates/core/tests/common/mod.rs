//! Brute-force reference implementations, deliberately naive and sharing no
//! code with the library beyond its data types.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use covnet::graph::{EdgeId, Graph, VertexId};
use covnet::instance::Instance;
use covnet::laminar::DualVariable;
use covnet::Rational;
use num_traits::Zero;

pub fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// True iff the edges contain no cycle (counted with multiplicity).
pub fn acyclic(graph: &Graph, edges: &[EdgeId]) -> bool {
    let mut parent: Vec<usize> = (0..graph.vertex_count()).collect();
    for &e in edges {
        let (u, v) = graph.edge(e).endpoints();
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

pub fn connected_by(graph: &Graph, edges: &[EdgeId], vertices: &[VertexId]) -> bool {
    let mut parent: Vec<usize> = (0..graph.vertex_count()).collect();
    for &e in edges {
        let (u, v) = graph.edge(e).endpoints();
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let Some(&first) = vertices.first() else { return true };
    let root = find(&mut parent, first);
    vertices.iter().all(|&v| find(&mut parent, v) == root)
}

fn subset(mask: u64, m: usize) -> Vec<EdgeId> {
    (0..m).filter(|&e| mask >> e & 1 == 1).collect()
}

/// Minimum Steiner tree cost by trying every edge subset.
pub fn steiner_cost(graph: &Graph, terminals: &[VertexId]) -> Rational {
    let m = graph.edge_count();
    assert!(m <= 20, "brute force limited to 20 edges");
    let mut best: Option<Rational> = None;
    for mask in 0u64..(1 << m) {
        let edges = subset(mask, m);
        if connected_by(graph, &edges, terminals) {
            let cost = graph.cost_of(&edges);
            if best.as_ref().map_or(true, |b| cost < *b) {
                best = Some(cost);
            }
        }
    }
    best.expect("terminals connected")
}

/// Every edge subset that is a tree whose leaves are all terminals and that
/// connects the terminals.
pub fn minimal_trees(graph: &Graph, terminals: &[VertexId]) -> Vec<Vec<EdgeId>> {
    let m = graph.edge_count();
    let ts: BTreeSet<VertexId> = terminals.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        let edges = subset(mask, m);
        if !acyclic(graph, &edges) || !connected_by(graph, &edges, terminals) {
            continue;
        }
        let mut degree = vec![0; graph.vertex_count()];
        for &e in &edges {
            let (u, v) = graph.edge(e).endpoints();
            degree[u] += 1;
            degree[v] += 1;
        }
        let touched: Vec<VertexId> = (0..graph.vertex_count()).filter(|&v| degree[v] > 0).collect();
        let one_tree = touched.is_empty() || connected_by(graph, &edges, &touched);
        if one_tree && touched.iter().all(|v| degree[*v] > 1 || ts.contains(v)) {
            out.push(edges);
        }
    }
    out
}

pub fn load_cost(instance: &Instance, trees: &[Vec<EdgeId>]) -> Rational {
    let graph = instance.graph();
    let mut packets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); graph.edge_count()];
    for (j, tree) in trees.iter().enumerate() {
        for &e in tree {
            packets[e].extend(instance.groups()[j].demand.iter().copied());
        }
    }
    packets.iter().enumerate().fold(Rational::zero(), |acc, (e, ps)| {
        let w = ps
            .iter()
            .fold(Rational::zero(), |a, &p| a + &instance.packet_weights()[p]);
        acc + &graph.edge(e).cost * w
    })
}

/// Exact coverage optimum over every combination of minimal trees.
pub fn coverage_optimum(instance: &Instance) -> Rational {
    let graph = instance.graph();
    let options: Vec<Vec<Vec<EdgeId>>> = instance
        .groups()
        .iter()
        .map(|g| minimal_trees(graph, &g.terminals))
        .collect();
    let mut best: Option<Rational> = None;
    let mut choice = vec![0usize; options.len()];
    loop {
        let trees: Vec<Vec<EdgeId>> =
            choice.iter().zip(&options).map(|(&c, o)| o[c].clone()).collect();
        let cost = load_cost(instance, &trees);
        if best.as_ref().map_or(true, |b| cost < *b) {
            best = Some(cost);
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return best.expect("at least one combination");
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Edge constraints of the dual: for every demand set `D` and edge `e`, the
/// duals of sets `D' ⊆ D` on cuts crossing `e` sum to at most `w(D) c_e`.
pub fn dual_feasible(instance: &Instance, duals: &[DualVariable]) -> bool {
    let graph = instance.graph();
    let demands = instance.demands();
    if duals.iter().any(|y| y.value <= Rational::zero() || y.demand >= demands.len()) {
        return false;
    }
    for set in demands {
        let w = set
            .iter()
            .fold(Rational::zero(), |a, &p| a + &instance.packet_weights()[p]);
        for edge in graph.edges().iter() {
            let mut load = Rational::zero();
            for y in duals {
                let inside_u = y.cut.contains(&edge.u);
                let inside_v = y.cut.contains(&edge.v);
                if inside_u != inside_v && demands[y.demand].is_subset(set) {
                    load += &y.value;
                }
            }
            if load > &w * &edge.cost {
                return false;
            }
        }
    }
    true
}

/// Every dual cut separates some group whose demand contains the cut's demand.
pub fn dual_cuts_separate(instance: &Instance, duals: &[DualVariable]) -> bool {
    duals.iter().all(|y| {
        let set = &instance.demands()[y.demand];
        instance.groups().iter().any(|g| {
            set.is_subset(&g.demand)
                && g.terminals.iter().any(|t| y.cut.contains(t))
                && g.terminals.iter().any(|t| !y.cut.contains(t))
        })
    })
}

/// Hop distances from `source` using only `edges`.
pub fn hops(graph: &Graph, edges: &[EdgeId], source: VertexId) -> Vec<Option<usize>> {
    let mut adjacency = vec![Vec::new(); graph.vertex_count()];
    for &e in edges {
        let (u, v) = graph.edge(e).endpoints();
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut dist = vec![None; graph.vertex_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Length of a shortest cycle in an undirected multigraph given as vertex pairs.
pub fn girth(n: usize, pairs: &[(VertexId, VertexId)]) -> Option<usize> {
    let mut best = None;
    for skip in 0..pairs.len() {
        let (u, v) = pairs[skip];
        let mut adjacency = vec![Vec::new(); n];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if i != skip {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        let mut dist = vec![None; n];
        dist[u] = Some(0usize);
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &y in &adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dist[x].unwrap() + 1);
                    queue.push_back(y);
                }
            }
        }
        if let Some(d) = dist[v] {
            let cycle = d + 1;
            best = Some(best.map_or(cycle, |b: usize| b.min(cycle)));
        }
    }
    best
}
