//! Linear-size group spanners with logarithmic stretch on unweighted graphs.
//!
//! Every group is first made *uniform*: its terminal set is replaced by all
//! vertices of its MST-heuristic Steiner tree, ordered by a preorder walk, so
//! that each terminal after the first has a *satisfying edge* to an earlier
//! one. Starting from a minimum spanning tree `T`, terminals farther than
//! `2L` hops from their predecessors get their satisfying edge added, where
//! `L = max(1, ceil(log2 g))`.
//!
//! Phase 1 pays for added edges with an orientation: each added edge becomes
//! an arc out of its terminal, and whenever a vertex would get three outgoing
//! arcs, a directed path of at most `L` arcs to a vertex with out-degree at
//! most one is flipped. Out-degrees stay at most two, so phase 1 adds at most
//! `2|V|` edges. Terminals that cannot be paid for this way are at most `|V|`
//! in number; phase 2 adds their satisfying edges outright.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{self, EdgeId, Graph, VertexId};
use crate::oracle::{self, OracleLimits};
use crate::rational::{self, Rational};
use crate::report::{Check, Report};

/// `max(1, ceil(log2 g))`.
pub fn levels_for(groups: usize) -> usize {
    let mut levels = 0;
    while (1usize << levels) < groups {
        levels += 1;
    }
    levels.max(1)
}

/// One terminal of the uniform instance: the `index`-th vertex of group `group`'s order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TerminalRef {
    pub group: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformInstance {
    /// Augmented terminal set of each group, in preorder of its Steiner tree.
    pub order: Vec<Vec<VertexId>>,
    /// Satisfying edge of each terminal (its preorder-parent edge); `None` for the root.
    pub satisfying: Vec<Vec<Option<EdgeId>>>,
    /// The MST-heuristic Steiner tree behind each order.
    pub steiner_trees: Vec<Vec<EdgeId>>,
    /// Whether the original terminal sets cover every vertex.
    pub covers_vertices: bool,
}

impl UniformInstance {
    pub fn vertex(&self, t: TerminalRef) -> VertexId {
        self.order[t.group][t.index]
    }

    pub fn terminals(&self) -> impl Iterator<Item = TerminalRef> + '_ {
        self.order.iter().enumerate().flat_map(|(group, order)| {
            (0..order.len()).map(move |index| TerminalRef { group, index })
        })
    }
}

fn require_unit(graph: &Graph) -> Result<()> {
    if let Some(e) = graph.edges().iter().find(|e| e.cost != Rational::from_integer(1.into())) {
        return Err(Error::Weighted(format!(
            "edge ({},{}) costs {}",
            e.u, e.v, e.cost
        )));
    }
    Ok(())
}

/// Augments each group with the Steiner vertices of its MST-heuristic tree
/// and orders it by a preorder walk from its lowest-id terminal.
pub fn make_uniform(graph: &Graph, groups: &[Vec<VertexId>]) -> Result<UniformInstance> {
    require_unit(graph)?;
    let mut covered = vec![false; graph.vertex_count()];
    let mut order = Vec::with_capacity(groups.len());
    let mut satisfying = Vec::with_capacity(groups.len());
    let mut steiner_trees = Vec::with_capacity(groups.len());
    for terminals in groups {
        for &t in terminals {
            if t < covered.len() {
                covered[t] = true;
            }
        }
        let tree = graph::steiner_mst_heuristic(graph, terminals)?;
        let root = *terminals
            .iter()
            .min()
            .ok_or_else(|| Error::InvalidInstance("empty terminal set".into()))?;

        let mut children: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); graph.vertex_count()];
        for &e in &tree {
            let (u, v) = graph.edge(e).endpoints();
            children[u].push((v, e));
            children[v].push((u, e));
        }
        for list in &mut children {
            list.sort_unstable();
        }
        let mut seq = Vec::new();
        let mut parent_edge = Vec::new();
        let mut stack = vec![(root, None, usize::MAX)];
        while let Some((v, via, from)) = stack.pop() {
            seq.push(v);
            parent_edge.push(via);
            for &(w, e) in children[v].iter().rev() {
                if w != from {
                    stack.push((w, Some(e), v));
                }
            }
        }
        order.push(seq);
        satisfying.push(parent_edge);
        steiner_trees.push(tree);
    }
    Ok(UniformInstance {
        order,
        satisfying,
        steiner_trees,
        covers_vertices: covered.into_iter().all(|c| c),
    })
}

/// True iff `terminal` is more than `2 * levels` hops in `h` (an edge mask)
/// from every earlier terminal of its group. The first terminal is always
/// satisfied.
pub fn is_unsatisfied(
    graph: &Graph,
    h: &[bool],
    uniform: &UniformInstance,
    terminal: TerminalRef,
    levels: usize,
) -> bool {
    if terminal.index == 0 {
        return false;
    }
    let order = &uniform.order[terminal.group];
    let dist = graph.hop_distances(&[order[terminal.index]], Some(h), 2 * levels);
    !order[..terminal.index].iter().any(|&v| dist[v].is_some())
}

/// Hop distance in `h` from a terminal to the set of its predecessors.
pub fn predecessor_distance(
    graph: &Graph,
    h: &[bool],
    uniform: &UniformInstance,
    terminal: TerminalRef,
) -> Option<usize> {
    let order = &uniform.order[terminal.group];
    let dist = graph.hop_distances(&[order[terminal.index]], Some(h), usize::MAX);
    order[..terminal.index].iter().filter_map(|&v| dist[v]).min()
}

/// Oriented copies of the phase-1 edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArcState {
    /// `(tail, head)` per arc; arc `k` is the orientation of `a1[k]`.
    arcs: Vec<(VertexId, VertexId)>,
    out: Vec<Vec<usize>>,
    pub a1: Vec<EdgeId>,
    pub a2: Vec<EdgeId>,
}

impl ArcState {
    pub fn new(vertex_count: usize) -> Self {
        ArcState {
            arcs: Vec::new(),
            out: vec![Vec::new(); vertex_count],
            a1: Vec::new(),
            a2: Vec::new(),
        }
    }

    pub fn arcs(&self) -> &[(VertexId, VertexId)] {
        &self.arcs
    }

    pub fn out_degree(&self, x: VertexId) -> usize {
        self.out[x].len()
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add_arc(&mut self, tail: VertexId, head: VertexId) -> usize {
        let id = self.arcs.len();
        self.arcs.push((tail, head));
        self.out[tail].push(id);
        id
    }

    fn flip(&mut self, arc: usize) {
        let (tail, head) = self.arcs[arc];
        self.out[tail].retain(|&a| a != arc);
        self.out[head].push(arc);
        self.arcs[arc] = (head, tail);
    }

    /// Hop distance and incoming arc for everything within `levels` arcs of `x`.
    fn reach(&self, x: VertexId, levels: usize) -> Vec<Option<(usize, Option<usize>)>> {
        let mut seen: Vec<Option<(usize, Option<usize>)>> = vec![None; self.out.len()];
        seen[x] = Some((0, None));
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            let d = seen[v].unwrap().0;
            if d == levels {
                continue;
            }
            let mut arcs = self.out[v].clone();
            arcs.sort_unstable();
            for a in arcs {
                let w = self.arcs[a].1;
                if seen[w].is_none() {
                    seen[w] = Some((d + 1, Some(a)));
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Vertices reachable from `x` by a directed path of at most `levels` arcs, `x` included.
    pub fn gamma(&self, x: VertexId, levels: usize) -> Vec<VertexId> {
        self.reach(x, levels)
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.map(|_| v))
            .collect()
    }

    /// Nearest vertex of `gamma(x)` with out-degree at most one (ties by id),
    /// with the arcs of the directed path to it.
    pub fn find_sink(&self, x: VertexId, levels: usize) -> Option<(VertexId, Vec<usize>)> {
        let seen = self.reach(x, levels);
        let z = seen
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.map(|(d, _)| (d, v)))
            .filter(|&(_, v)| self.out_degree(v) <= 1)
            .min()?
            .1;
        let mut path = Vec::new();
        let mut at = z;
        while let Some((_, Some(a))) = seen[at] {
            path.push(a);
            at = self.arcs[a].0;
        }
        path.reverse();
        Some((z, path))
    }

    /// Undirected girth of the arc set, `None` if it is acyclic.
    pub fn girth(&self) -> Option<usize> {
        let n = self.out.len();
        let mut adjacency: Vec<Vec<(VertexId, usize)>> = vec![Vec::new(); n];
        for (a, &(u, v)) in self.arcs.iter().enumerate() {
            adjacency[u].push((v, a));
            adjacency[v].push((u, a));
        }
        let mut best: Option<usize> = None;
        for root in 0..n {
            let mut dist: Vec<Option<usize>> = vec![None; n];
            let mut via: Vec<Option<usize>> = vec![None; n];
            dist[root] = Some(0);
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &(w, a) in &adjacency[v] {
                    if via[v] == Some(a) {
                        continue;
                    }
                    match dist[w] {
                        None => {
                            dist[w] = Some(dist[v].unwrap() + 1);
                            via[w] = Some(a);
                            queue.push_back(w);
                        }
                        Some(dw) => {
                            let cycle = dist[v].unwrap() + dw + 1;
                            best = Some(best.map_or(cycle, |b| b.min(cycle)));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Outcome of one phase-1 step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase1Step {
    pub edge: EdgeId,
    pub sink: VertexId,
    /// Arcs reversed to restore out-degree two at the terminal.
    pub flipped: usize,
}

/// Incremental construction state shared by both phases.
#[derive(Debug, Clone)]
pub struct SpannerBuilder<'g> {
    graph: &'g Graph,
    uniform: UniformInstance,
    levels: usize,
    tree: Vec<EdgeId>,
    in_h: Vec<bool>,
    satisfied: Vec<Vec<bool>>,
    pub arcs: ArcState,
    max_out_degree_seen: usize,
    flips: usize,
}

impl<'g> SpannerBuilder<'g> {
    pub fn new(graph: &'g Graph, groups: &[Vec<VertexId>]) -> Result<Self> {
        let uniform = make_uniform(graph, groups)?;
        let tree = graph::mst(graph)?;
        let mut in_h = vec![false; graph.edge_count()];
        for &e in &tree {
            in_h[e] = true;
        }
        let satisfied = uniform
            .order
            .iter()
            .map(|o| (0..o.len()).map(|i| i == 0).collect())
            .collect();
        Ok(SpannerBuilder {
            graph,
            levels: levels_for(groups.len()),
            uniform,
            tree,
            in_h,
            satisfied,
            arcs: ArcState::new(graph.vertex_count()),
            max_out_degree_seen: 0,
            flips: 0,
        })
    }

    pub fn uniform(&self) -> &UniformInstance {
        &self.uniform
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Current `T ∪ A1 ∪ A2` as an edge mask.
    pub fn h_mask(&self) -> &[bool] {
        &self.in_h
    }

    pub fn is_unsatisfied(&mut self, t: TerminalRef) -> bool {
        if self.satisfied[t.group][t.index] {
            return false;
        }
        let unsatisfied = is_unsatisfied(self.graph, &self.in_h, &self.uniform, t, self.levels);
        if !unsatisfied {
            self.satisfied[t.group][t.index] = true;
        }
        unsatisfied
    }

    /// Adds the satisfying edge of an unsatisfied terminal whose `gamma`
    /// contains a vertex of out-degree at most one, flipping a path if the
    /// terminal's out-degree reaches three. Returns `None` (state unchanged)
    /// if the terminal is satisfied or no such vertex exists.
    pub fn phase1_step(&mut self, t: TerminalRef) -> Option<Phase1Step> {
        if !self.is_unsatisfied(t) {
            return None;
        }
        let x = self.uniform.vertex(t);
        let (sink, path) = self.arcs.find_sink(x, self.levels)?;
        let edge = self.uniform.satisfying[t.group][t.index].expect("non-root terminal");
        let y = self.graph.edge(edge).other(x);
        assert!(!self.in_h[edge], "satisfying edge of an unsatisfied terminal is already in H");

        self.arcs.add_arc(x, y);
        self.arcs.a1.push(edge);
        self.in_h[edge] = true;
        let mut flipped = 0;
        if self.arcs.out_degree(x) > 2 {
            for &a in &path {
                self.arcs.flip(a);
            }
            flipped = path.len();
            self.flips += 1;
        }
        let max = self.arcs.max_out_degree();
        assert!(max <= 2, "out-degree {max} after phase-1 step");
        self.max_out_degree_seen = self.max_out_degree_seen.max(max);
        self.satisfied[t.group][t.index] = true;
        Some(Phase1Step {
            edge,
            sink,
            flipped,
        })
    }

    /// Repeats round-robin passes over all terminals until a pass adds nothing.
    pub fn run_phase1(&mut self) -> usize {
        let terminals: Vec<TerminalRef> = self.uniform.terminals().collect();
        let mut steps = 0;
        loop {
            let before = steps;
            for &t in &terminals {
                if self.phase1_step(t).is_some() {
                    steps += 1;
                }
            }
            if steps == before {
                return steps;
            }
        }
    }

    /// Adds the satisfying edge of every terminal still unsatisfied in `T ∪ A1`.
    pub fn run_phase2(&mut self) {
        let terminals: Vec<TerminalRef> = self.uniform.terminals().collect();
        let pending: Vec<TerminalRef> = terminals
            .into_iter()
            .filter(|&t| self.is_unsatisfied(t))
            .collect();
        let pending: Vec<EdgeId> = pending
            .into_iter()
            .map(|t| self.uniform.satisfying[t.group][t.index].expect("non-root terminal"))
            .collect();
        for e in pending {
            if !self.in_h[e] {
                self.in_h[e] = true;
                self.arcs.a2.push(e);
            }
        }
    }

    pub fn finish(self, phase1_steps: usize) -> SpannerResult {
        let mut h: Vec<EdgeId> = (0..self.graph.edge_count()).filter(|&e| self.in_h[e]).collect();
        h.sort_unstable();
        let girth = self.arcs.girth();
        SpannerResult {
            h,
            t: self.tree,
            a1: self.arcs.a1.clone(),
            a2: self.arcs.a2.clone(),
            arcs: self.arcs.arcs.clone(),
            groups: self.uniform.order.len(),
            levels: self.levels,
            vertex_count: self.graph.vertex_count(),
            max_out_degree: self.max_out_degree_seen.max(self.arcs.max_out_degree()),
            arc_girth: girth,
            phase1_steps,
            flips: self.flips,
            uniform: self.uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannerResult {
    /// `T ∪ A1 ∪ A2`, sorted.
    pub h: Vec<EdgeId>,
    pub t: Vec<EdgeId>,
    /// Phase-1 edges in insertion order.
    pub a1: Vec<EdgeId>,
    pub a2: Vec<EdgeId>,
    /// Final orientation of the phase-1 edges.
    pub arcs: Vec<(VertexId, VertexId)>,
    pub groups: usize,
    pub levels: usize,
    pub vertex_count: usize,
    /// Largest out-degree observed after any phase-1 step.
    pub max_out_degree: usize,
    pub arc_girth: Option<usize>,
    pub phase1_steps: usize,
    pub flips: usize,
    pub uniform: UniformInstance,
}

impl SpannerResult {
    /// Hop bound from each terminal to its predecessors: `2L`.
    pub fn distance_bound(&self) -> usize {
        2 * self.levels
    }

    /// Steiner-cost stretch: `4L`.
    pub fn stretch_bound(&self) -> usize {
        4 * self.levels
    }

    /// Size factor against an optimal Steiner forest; only claimed when the
    /// groups cover every vertex.
    pub fn size_factor(&self) -> Option<usize> {
        self.uniform.covers_vertices.then_some(14)
    }

    pub fn h_mask(&self, edge_count: usize) -> Vec<bool> {
        let mut mask = vec![false; edge_count];
        for &e in &self.h {
            mask[e] = true;
        }
        mask
    }
}

/// Builds `H = T ∪ A1 ∪ A2` for an unweighted, connected graph.
pub fn build_group_spanner(graph: &Graph, groups: &[Vec<VertexId>]) -> Result<SpannerResult> {
    let mut builder = SpannerBuilder::new(graph, groups)?;
    let steps = builder.run_phase1();
    builder.run_phase2();
    Ok(builder.finish(steps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannerReport {
    pub report: Report,
    /// Exact `(St_H(X_j), St_G(X_j))` per group checked with the oracle.
    pub exact_stretch: Vec<(usize, Rational, Rational)>,
}

impl SpannerReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.report.failures().collect()
    }
}

/// Verifies size, orientation, and stretch claims. Groups with at most
/// `oracle_limit` terminals get exact Steiner costs in `H` and `G`; larger
/// groups are checked through heuristic costs, which suffices because
/// `heur_H <= 2L * heur_G` implies `St_H <= 4L * St_G`.
pub fn certify_spanner(
    result: &SpannerResult,
    graph: &Graph,
    groups: &[Vec<VertexId>],
    oracle_limit: usize,
) -> Result<SpannerReport> {
    let n = graph.vertex_count();
    let (a1, a2, t) = (result.a1.len(), result.a2.len(), result.t.len());
    let levels = result.levels;
    let mut checks = vec![
        Check::new("A1 <= 2|V|", a1 <= 2 * n, format!("|A1| = {a1}, |V| = {n}")),
        Check::new("A2 <= |V|", a2 <= n, format!("|A2| = {a2}, |V| = {n}")),
        Check::new(
            "A1 + A2 <= 6|T|",
            n < 2 || a1 + a2 <= 6 * t,
            format!("|A1| + |A2| = {}, |T| = {t}", a1 + a2),
        ),
        Check::new(
            "max out-degree <= 2",
            result.max_out_degree <= 2,
            format!("max out-degree {}", result.max_out_degree),
        ),
        Check::new(
            "arc girth >= L",
            result.arc_girth.map_or(true, |g| g >= levels),
            format!("girth {:?}, L = {levels}", result.arc_girth),
        ),
        Check::new(
            "|A1| = |arcs|",
            a1 == result.arcs.len(),
            format!("{a1} edges, {} arcs", result.arcs.len()),
        ),
    ];

    let mut union: Vec<EdgeId> = result
        .t
        .iter()
        .chain(&result.a1)
        .chain(&result.a2)
        .copied()
        .collect();
    union.sort_unstable();
    let duplicates = union.windows(2).any(|w| w[0] == w[1]);
    union.dedup();
    checks.push(Check::new(
        "H = T + A1 + A2 (disjoint)",
        union == result.h && !duplicates,
        format!("|H| = {}", result.h.len()),
    ));
    checks.push(Check::new(
        "|H| <= 7|T|",
        n < 2 || result.h.len() <= 7 * t,
        format!("|H| = {}, |T| = {t}", result.h.len()),
    ));

    let h_mask = result.h_mask(graph.edge_count());
    let mut worst = 0;
    let mut far = Vec::new();
    for term in result.uniform.terminals().filter(|t| t.index > 0) {
        match predecessor_distance(graph, &h_mask, &result.uniform, term) {
            Some(d) if d <= result.distance_bound() => worst = worst.max(d),
            other => far.push((term, other)),
        }
    }
    checks.push(Check::new(
        "terminals within 2L of predecessors",
        far.is_empty(),
        if far.is_empty() {
            format!("max distance {worst}, bound {}", result.distance_bound())
        } else {
            format!("violations {far:?}")
        },
    ));

    let h_graph = graph.subgraph(&result.h);
    let limits = OracleLimits {
        max_terminals: oracle_limit.max(1),
        ..OracleLimits::default()
    };
    let bound = rational::int(result.stretch_bound() as i64);
    let mut exact_stretch = Vec::new();
    for (j, terminals) in groups.iter().enumerate() {
        let distinct = {
            let mut ts = terminals.clone();
            ts.sort_unstable();
            ts.dedup();
            ts.len()
        };
        if distinct <= oracle_limit {
            let (_, in_h) = oracle::exact_steiner_tree(&h_graph, terminals, &limits)?;
            let (_, in_g) = oracle::exact_steiner_tree(graph, terminals, &limits)?;
            checks.push(Check::new(
                format!("group {j}: St_H <= 4L St_G"),
                in_h <= &bound * &in_g,
                format!("St_H = {in_h}, St_G = {in_g}, 4L = {bound}"),
            ));
            exact_stretch.push((j, in_h, in_g));
        } else {
            let heur_h = h_graph.cost_of(&graph::steiner_mst_heuristic(&h_graph, terminals)?);
            let heur_g = graph.cost_of(&graph::steiner_mst_heuristic(graph, terminals)?);
            let half = rational::int(result.distance_bound() as i64);
            checks.push(
                Check::new(
                    format!("group {j}: heur_H <= 2L heur_G"),
                    heur_h <= &half * &heur_g,
                    format!("heur_H = {heur_h}, heur_G = {heur_g}, 2L = {half}"),
                )
                .heuristic(),
            );
        }
    }

    let mut saturated = true;
    let builder_arcs = rebuild_arcs(result, n);
    for term in result.uniform.terminals().filter(|t| t.index > 0) {
        if is_unsatisfied(graph, &phase1_mask(result, graph), &result.uniform, term, levels) {
            let x = result.uniform.vertex(term);
            if builder_arcs
                .gamma(x, levels)
                .iter()
                .any(|&z| builder_arcs.out_degree(z) != 2)
            {
                saturated = false;
            }
        }
    }
    checks.push(Check::new(
        "phase-2 terminals have saturated gamma",
        saturated,
        format!("{} phase-2 edges", a2),
    ));

    Ok(SpannerReport {
        report: Report { checks },
        exact_stretch,
    })
}

fn rebuild_arcs(result: &SpannerResult, n: usize) -> ArcState {
    let mut state = ArcState::new(n);
    for &(u, v) in &result.arcs {
        state.add_arc(u, v);
    }
    state
}

fn phase1_mask(result: &SpannerResult, graph: &Graph) -> Vec<bool> {
    let mut mask = vec![false; graph.edge_count()];
    for &e in result.t.iter().chain(&result.a1) {
        mask[e] = true;
    }
    mask
}
