//! Undirected graphs with exact rational edge costs, plus the shared
//! subroutines every solver builds on: MST, shortest paths, the MST Steiner
//! heuristic, connectivity, and edge subdivision.
//!
//! Edges are kept in one canonical order: by `(cost, smaller endpoint,
//! larger endpoint)`. Edge ids are positions in that order, so "smallest edge
//! id" is the tie-break wherever an algorithm has to pick one of several
//! equally good edges.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: Rational,
}

impl Edge {
    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<Edge>,
    index: HashMap<(VertexId, VertexId), EdgeId>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph, collapsing parallel edges to their cheapest copy.
    /// Self-loops, out-of-range endpoints, and negative costs are rejected.
    pub fn new(vertex_count: usize, edges: Vec<(VertexId, VertexId, Rational)>) -> Result<Self> {
        let mut cheapest: HashMap<(VertexId, VertexId), Rational> = HashMap::new();
        for (u, v, cost) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u},{v}) has an endpoint outside 0..{vertex_count}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if cost.is_negative() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u},{v}) has negative cost {cost}"
                )));
            }
            let key = (u.min(v), u.max(v));
            cheapest
                .entry(key)
                .and_modify(|c| {
                    if cost < *c {
                        *c = cost.clone();
                    }
                })
                .or_insert(cost);
        }
        let mut list: Vec<Edge> = cheapest
            .into_iter()
            .map(|((u, v), cost)| Edge { u, v, cost })
            .collect();
        list.sort_by(|a, b| (&a.cost, a.u, a.v).cmp(&(&b.cost, b.u, b.v)));

        let mut index = HashMap::with_capacity(list.len());
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (id, e) in list.iter().enumerate() {
            index.insert((e.u, e.v), id);
            adjacency[e.u].push((e.v, id));
            adjacency[e.v].push((e.u, id));
        }
        Ok(Graph {
            vertex_count,
            edges: list,
            index,
            adjacency,
        })
    }

    /// Graph with all edge costs equal to one.
    pub fn unit(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        Graph::new(
            vertex_count,
            edges.iter().map(|&(u, v)| (u, v, Rational::one())).collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.cost.is_one())
    }

    pub fn cost_of<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Rational {
        edges
            .into_iter()
            .fold(Rational::zero(), |acc, &e| acc + &self.edges[e].cost)
    }

    /// The spanning subgraph on the same vertex set with only `edges` kept.
    pub fn subgraph<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Graph {
        let kept: BTreeSet<EdgeId> = edges.into_iter().copied().collect();
        let list = kept
            .iter()
            .map(|&e| {
                let edge = &self.edges[e];
                (edge.u, edge.v, edge.cost.clone())
            })
            .collect();
        Graph::new(self.vertex_count, list).expect("subgraph of a valid graph is valid")
    }

    /// Translates edge ids of `other` (a graph on the same vertex set) into ids of `self`.
    pub fn map_edges_from(&self, other: &Graph, edges: &[EdgeId]) -> Vec<EdgeId> {
        let mut mapped: Vec<EdgeId> = edges
            .iter()
            .map(|&e| {
                let (u, v) = other.edge(e).endpoints();
                self.edge_between(u, v)
                    .expect("edge of the subgraph exists in the parent graph")
            })
            .collect();
        mapped.sort_unstable();
        mapped
    }

    /// Component label for every vertex; labels are the smallest vertex id of each component.
    pub fn component_labels(&self) -> Vec<VertexId> {
        let mut sets = DisjointSets::new(self.vertex_count);
        for e in &self.edges {
            sets.union(e.u, e.v);
        }
        let mut smallest: HashMap<usize, VertexId> = HashMap::new();
        for v in 0..self.vertex_count {
            smallest.entry(sets.find(v)).or_insert(v);
        }
        (0..self.vertex_count)
            .map(|v| smallest[&sets.find(v)])
            .collect()
    }

    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let labels = self.component_labels();
        let mut groups: Vec<Vec<VertexId>> = Vec::new();
        let mut slot: HashMap<VertexId, usize> = HashMap::new();
        for (v, &label) in labels.iter().enumerate() {
            let idx = *slot.entry(label).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[idx].push(v);
        }
        groups
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count <= 1 || self.components().len() == 1
    }

    /// Fails with the component that does not contain `vertices[0]` if the
    /// given vertices are not all in one component.
    pub fn require_same_component(&self, vertices: &[VertexId], context: &str) -> Result<()> {
        let Some(&first) = vertices.first() else {
            return Ok(());
        };
        let labels = self.component_labels();
        if let Some(&stray) = vertices.iter().find(|&&v| labels[v] != labels[first]) {
            let component = (0..self.vertex_count)
                .filter(|&v| labels[v] == labels[stray])
                .collect();
            return Err(Error::Disconnected {
                context: context.to_string(),
                component,
            });
        }
        Ok(())
    }

    /// Unit-cost BFS distances from `sources` along `edges` (all edges if `None`), up to `limit` hops.
    pub fn hop_distances(
        &self,
        sources: &[VertexId],
        edges: Option<&[bool]>,
        limit: usize,
    ) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            if d == limit {
                continue;
            }
            for &(y, e) in &self.adjacency[x] {
                if edges.map_or(true, |mask| mask[e]) && dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Minimum spanning tree by Kruskal over the canonical edge order.
pub fn mst(graph: &Graph) -> Result<Vec<EdgeId>> {
    let all: Vec<VertexId> = (0..graph.vertex_count()).collect();
    graph.require_same_component(&all, "minimum spanning tree needs a connected graph")?;
    Ok(spanning_forest(graph, 0..graph.edge_count()))
}

/// Kruskal restricted to `edges`, visited in increasing id order.
pub fn spanning_forest(graph: &Graph, edges: impl IntoIterator<Item = EdgeId>) -> Vec<EdgeId> {
    let mut ordered: Vec<EdgeId> = edges.into_iter().collect();
    ordered.sort_unstable();
    ordered.dedup();
    let mut sets = DisjointSets::new(graph.vertex_count());
    ordered
        .into_iter()
        .filter(|&e| {
            let edge = graph.edge(e);
            sets.union(edge.u, edge.v)
        })
        .collect()
}

/// True iff the multiset `edges` contains no cycle. A repeated edge counts as a cycle.
pub fn is_forest(graph: &Graph, edges: &[EdgeId]) -> bool {
    let mut sets = DisjointSets::new(graph.vertex_count());
    edges.iter().all(|&e| {
        let edge = graph.edge(e);
        sets.union(edge.u, edge.v)
    })
}

/// True iff all of `vertices` lie in one component of `(V, edges)`.
pub fn connects(graph: &Graph, edges: &[EdgeId], vertices: &[VertexId]) -> bool {
    let mut sets = DisjointSets::new(graph.vertex_count());
    for &e in edges {
        let edge = graph.edge(e);
        sets.union(edge.u, edge.v);
    }
    match vertices.split_first() {
        None => true,
        Some((&first, rest)) => rest.iter().all(|&v| sets.same(first, v)),
    }
}

/// Reduces `edges` to a forest and strips non-terminal leaves until every
/// leaf is a terminal.
pub fn prune_to_terminals(graph: &Graph, edges: &[EdgeId], terminals: &[VertexId]) -> Vec<EdgeId> {
    let forest = spanning_forest(graph, edges.iter().copied());
    let mut is_terminal = vec![false; graph.vertex_count()];
    for &t in terminals {
        is_terminal[t] = true;
    }
    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); graph.vertex_count()];
    for &e in &forest {
        let edge = graph.edge(e);
        incident[edge.u].push(e);
        incident[edge.v].push(e);
    }
    let mut alive: HashMap<EdgeId, bool> = forest.iter().map(|&e| (e, true)).collect();
    let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut leaves: VecDeque<VertexId> = (0..graph.vertex_count())
        .filter(|&v| degree[v] == 1 && !is_terminal[v])
        .collect();
    while let Some(leaf) = leaves.pop_front() {
        if degree[leaf] != 1 {
            continue;
        }
        let e = *incident[leaf].iter().find(|e| alive[e]).unwrap();
        alive.insert(e, false);
        degree[leaf] = 0;
        let other = graph.edge(e).other(leaf);
        degree[other] -= 1;
        if degree[other] == 1 && !is_terminal[other] {
            leaves.push_back(other);
        }
    }
    forest.into_iter().filter(|e| alive[e]).collect()
}

/// Dijkstra from `source`. Returns distances and the edge used to reach each
/// vertex; among equal-length paths the one discovered first is kept.
pub fn shortest_paths(graph: &Graph, source: VertexId) -> (Vec<Option<Rational>>, Vec<Option<EdgeId>>) {
    let n = graph.vertex_count();
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut via: Vec<Option<EdgeId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, e) in graph.neighbors(x) {
            if done[y] {
                continue;
            }
            let candidate = &d + &graph.edge(e).cost;
            let better = match &dist[y] {
                None => true,
                Some(current) => candidate < *current,
            };
            if better {
                dist[y] = Some(candidate.clone());
                via[y] = Some(e);
                heap.push(Reverse((candidate, y)));
            }
        }
    }
    (dist, via)
}

fn walk_back(graph: &Graph, via: &[Option<EdgeId>], mut target: VertexId, out: &mut Vec<EdgeId>) {
    while let Some(e) = via[target] {
        out.push(e);
        target = graph.edge(e).other(target);
    }
}

/// Shortest-path distance between two vertices, `None` if disconnected.
pub fn distance(graph: &Graph, a: VertexId, b: VertexId) -> Option<Rational> {
    shortest_paths(graph, a).0[b].clone()
}

fn sorted_terminals(terminals: &[VertexId]) -> Vec<VertexId> {
    let mut ts = terminals.to_vec();
    ts.sort_unstable();
    ts.dedup();
    ts
}

/// 2-approximate Steiner tree: MST of the metric closure on `terminals`,
/// closure edges expanded into shortest paths, cycles and non-terminal
/// leaves removed.
pub fn steiner_mst_heuristic(graph: &Graph, terminals: &[VertexId]) -> Result<Vec<EdgeId>> {
    let ts = sorted_terminals(terminals);
    if let Some(&bad) = ts.iter().find(|&&t| t >= graph.vertex_count()) {
        return Err(Error::InvalidInstance(format!("terminal {bad} is not a vertex")));
    }
    graph.require_same_component(&ts, "Steiner terminals span several components")?;
    if ts.len() <= 1 {
        return Ok(Vec::new());
    }
    let runs: Vec<_> = ts.iter().map(|&t| shortest_paths(graph, t)).collect();
    let mut closure: Vec<(Rational, usize, usize)> = Vec::new();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let d = runs[i].0[ts[j]].clone().expect("same component");
            closure.push((d, i, j));
        }
    }
    closure.sort();
    let mut sets = DisjointSets::new(ts.len());
    let mut union_edges = Vec::new();
    for (_, i, j) in closure {
        if sets.union(i, j) {
            walk_back(graph, &runs[i].1, ts[j], &mut union_edges);
        }
    }
    union_edges.sort_unstable();
    union_edges.dedup();
    Ok(prune_to_terminals(graph, &union_edges, &ts))
}

/// Replaces every cost-`c` edge by a path of `c` unit edges through `c - 1`
/// fresh vertices, numbered from `vertex_count` upward in edge order.
pub fn subdivide_edges(graph: &Graph) -> Result<Graph> {
    let mut next = graph.vertex_count();
    let mut unit_edges = Vec::new();
    for e in graph.edges() {
        if !rational::is_integer(&e.cost) || !e.cost.is_positive() {
            return Err(Error::NonIntegerCost(e.cost.to_string()));
        }
        let length = e
            .cost
            .to_integer()
            .to_usize()
            .ok_or_else(|| Error::NonIntegerCost(e.cost.to_string()))?;
        let mut prev = e.u;
        for _ in 1..length {
            unit_edges.push((prev, next));
            prev = next;
            next += 1;
        }
        unit_edges.push((prev, e.v));
    }
    Graph::unit(next, &unit_edges)
}
