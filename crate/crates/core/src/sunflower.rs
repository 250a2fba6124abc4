//! Sunflower demands through a group spanner.
//!
//! With a core `P` shared by every demand and pairwise disjoint petals
//! `P_j`, a routing that keeps each tree `H_j` inside one spanner `H` costs
//! `w(P) c(⋃ H_j) + Σ_j w(P_j) c(H_j)`. Against the optimum's lower bound
//! `w(P) c(F*) + Σ_j w(P_j) St_G(X_j)`, a `(14, 4L)` spanner and
//! 2-approximate trees inside it give the factor `14 + 8L` when the groups
//! cover every vertex.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{self, EdgeId, VertexId};
use crate::instance::{self, classify_demands, Instance, RoutingSolution, Sunflower};
use crate::oracle::{self, OracleLimits};
use crate::rational::{self, Rational};
use crate::spanner::{self, SpannerResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SunflowerSolution {
    pub spanner: SpannerResult,
    pub shape: Sunflower,
    /// `H_j` per group, as edge ids of the input graph.
    pub routing: RoutingSolution,
    /// `⋃ H_j`, the edges carrying the core packets.
    pub core_edges: Vec<EdgeId>,
    /// `w(P) c(⋃ H_j) + Σ_j w(P_j) c(H_j)`.
    pub cost: Rational,
    /// The same sum with `c(H)` in place of `c(⋃ H_j)`; never below `cost`.
    pub spanner_cost: Rational,
}

impl SunflowerSolution {
    /// `14 + 8L`.
    pub fn ratio_bound(&self) -> Rational {
        rational::int(14 + 8 * self.spanner.levels as i64)
    }

    /// Whether the ratio bound is backed by the spanner's size guarantee.
    pub fn bound_applies(&self) -> bool {
        self.spanner.uniform.covers_vertices
    }
}

fn sunflower_shape(instance: &Instance) -> Result<Sunflower> {
    classify_demands(instance)
        .sunflower
        .ok_or_else(|| Error::Shape("demand sets do not share one common pairwise intersection".into()))
}

fn terminal_sets(instance: &Instance) -> Vec<Vec<VertexId>> {
    instance.groups().iter().map(|g| g.terminals.clone()).collect()
}

pub fn solve_sunflower(instance: &Instance) -> Result<SunflowerSolution> {
    let shape = sunflower_shape(instance)?;
    let graph = instance.graph();
    if !graph.is_unweighted() {
        return Err(Error::Weighted("sunflower routing needs unit edge costs".into()));
    }
    let groups = terminal_sets(instance);
    let spanner = spanner::build_group_spanner(graph, &groups)?;
    let h_graph = graph.subgraph(&spanner.h);

    let mut trees = Vec::with_capacity(groups.len());
    for terminals in &groups {
        let inner = graph::steiner_mst_heuristic(&h_graph, terminals)?;
        trees.push(graph.map_edges_from(&h_graph, &inner));
    }
    let routing = RoutingSolution::new(trees);
    let mut core_edges: Vec<EdgeId> = routing.trees.iter().flatten().copied().collect();
    core_edges.sort_unstable();
    core_edges.dedup();

    let core_weight = instance.weight(&shape.core);
    let petals = routing
        .trees
        .iter()
        .zip(&shape.petals)
        .fold(Rational::zero(), |acc, (tree, petal)| {
            acc + instance.weight(petal) * graph.cost_of(tree)
        });
    let cost = &core_weight * graph.cost_of(&core_edges) + &petals;
    let spanner_cost = &core_weight * graph.cost_of(&spanner.h) + &petals;

    let evaluated = instance::load_cost(instance, &routing)?;
    if evaluated != cost {
        return Err(Error::Invariant(format!(
            "sunflower cost {cost} differs from load cost {evaluated}"
        )));
    }
    Ok(SunflowerSolution {
        spanner,
        shape,
        routing,
        core_edges,
        cost,
        spanner_cost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// Exact Steiner forest and trees; refused above the oracle limits.
    Oracle,
    /// Heuristic halves and vertex counting; always available.
    Relaxed,
}

impl std::str::FromStr for BoundMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(BoundMode::Oracle),
            "relaxed" => Ok(BoundMode::Relaxed),
            other => Err(Error::Parse(format!("unknown bound mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBound {
    pub mode: BoundMode,
    /// Lower bound on `c(F*)`.
    pub forest: Rational,
    /// Lower bound on `St_G(X_j)` per group.
    pub trees: Vec<Rational>,
    /// `w(P) forest + Σ_j w(P_j) trees[j]`.
    pub value: Rational,
}

/// `w(P) c(F*) + Σ_j w(P_j) St_G(X_j)`, with each term exact or bounded from below.
pub fn sunflower_lower_bound(
    instance: &Instance,
    mode: BoundMode,
    limits: &OracleLimits,
) -> Result<LowerBound> {
    let shape = sunflower_shape(instance)?;
    let graph = instance.graph();
    let groups = terminal_sets(instance);
    let (forest, trees) = match mode {
        BoundMode::Oracle => {
            let (_, forest) = oracle::exact_steiner_forest(graph, &groups, limits)?;
            let trees = groups
                .iter()
                .map(|x| oracle::exact_steiner_tree(graph, x, limits).map(|(_, c)| c))
                .collect::<Result<Vec<_>>>()?;
            (forest, trees)
        }
        BoundMode::Relaxed => {
            let half = rational::ratio(1, 2);
            let trees = groups
                .iter()
                .map(|x| {
                    graph::steiner_mst_heuristic(graph, x).map(|t| graph.cost_of(&t) * &half)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut forest = trees.iter().max().cloned().unwrap_or_else(Rational::zero);
            if graph.is_unweighted() && instance.covers_all_vertices() {
                let counted = rational::ratio(graph.vertex_count() as i64, 2);
                forest = forest.max(counted);
            }
            (forest, trees)
        }
    };
    let value = trees
        .iter()
        .zip(&shape.petals)
        .fold(instance.weight(&shape.core) * &forest, |acc, (t, petal)| {
            acc + instance.weight(petal) * t
        });
    Ok(LowerBound {
        mode,
        forest,
        trees,
        value,
    })
}
