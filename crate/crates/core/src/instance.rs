//! Problem instances, routing solutions, and their coverage cost.
//!
//! An edge pays its cost once per distinct packet crossing it: the load of
//! an edge is the total weight of the union of the demand sets of all
//! groups whose tree uses it.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{self, EdgeId, Graph, VertexId};
use crate::rational::Rational;

pub type PacketId = usize;
pub type DemandId = usize;
pub type DemandSet = BTreeSet<PacketId>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    /// Sorted, duplicate-free, at least two vertices.
    pub terminals: Vec<VertexId>,
    pub demand: DemandSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    packet_names: Vec<String>,
    packet_weights: Vec<Rational>,
    groups: Vec<Group>,
    demands: Vec<DemandSet>,
    group_demand: Vec<DemandId>,
}

impl Instance {
    /// `packets` lists explicit weights; packets named only in a group's
    /// demand get weight one.
    pub fn new(
        graph: Graph,
        packets: BTreeMap<String, Rational>,
        groups: Vec<(Vec<VertexId>, Vec<String>)>,
    ) -> Result<Self> {
        let mut weights = packets;
        for (_, demand) in &groups {
            for name in demand {
                weights.entry(name.clone()).or_insert_with(Rational::one);
            }
        }
        if let Some((name, w)) = weights.iter().find(|(_, w)| **w <= Rational::zero()) {
            return Err(Error::InvalidInstance(format!(
                "packet `{name}` has non-positive weight {w}"
            )));
        }
        let packet_names: Vec<String> = weights.keys().cloned().collect();
        let packet_weights: Vec<Rational> = weights.into_values().collect();
        let lookup: BTreeMap<&str, PacketId> = packet_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();

        let mut parsed = Vec::with_capacity(groups.len());
        for (j, (terminals, demand)) in groups.into_iter().enumerate() {
            let mut terminals = terminals;
            terminals.sort_unstable();
            terminals.dedup();
            if let Some(&bad) = terminals.iter().find(|&&t| t >= graph.vertex_count()) {
                return Err(Error::InvalidInstance(format!(
                    "group {j}: terminal {bad} is not a vertex"
                )));
            }
            if terminals.len() < 2 {
                return Err(Error::InvalidInstance(format!(
                    "group {j} needs at least two distinct terminals"
                )));
            }
            if demand.is_empty() {
                return Err(Error::InvalidInstance(format!("group {j} has an empty demand")));
            }
            graph.require_same_component(
                &terminals,
                &format!("group {j} terminals span several components"),
            )?;
            let demand: DemandSet = demand.iter().map(|n| lookup[n.as_str()]).collect();
            parsed.push(Group { terminals, demand });
        }

        let mut demands: Vec<DemandSet> = Vec::new();
        let mut group_demand = Vec::with_capacity(parsed.len());
        for g in &parsed {
            let id = match demands.iter().position(|d| *d == g.demand) {
                Some(id) => id,
                None => {
                    demands.push(g.demand.clone());
                    demands.len() - 1
                }
            };
            group_demand.push(id);
        }

        Ok(Instance {
            graph,
            packet_names,
            packet_weights,
            groups: parsed,
            demands,
            group_demand,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn packet_names(&self) -> &[String] {
        &self.packet_names
    }

    pub fn packet_weights(&self) -> &[Rational] {
        &self.packet_weights
    }

    pub fn packet_name(&self, p: PacketId) -> &str {
        &self.packet_names[p]
    }

    /// Distinct demand sets, in order of first appearance among the groups.
    pub fn demands(&self) -> &[DemandSet] {
        &self.demands
    }

    pub fn demand_of_group(&self, j: usize) -> DemandId {
        self.group_demand[j]
    }

    pub fn weight(&self, packets: &DemandSet) -> Rational {
        packets
            .iter()
            .fold(Rational::zero(), |acc, &p| acc + &self.packet_weights[p])
    }

    pub fn demand_weight(&self, d: DemandId) -> Rational {
        self.weight(&self.demands[d])
    }

    /// Groups whose demand contains every packet of `demand`.
    pub fn groups_demanding(&self, demand: &DemandSet) -> Vec<usize> {
        (0..self.groups.len())
            .filter(|&j| demand.is_subset(&self.groups[j].demand))
            .collect()
    }

    /// Distinct demand sets that contain `demand` (including itself).
    pub fn supersets_of(&self, d: DemandId) -> Vec<DemandId> {
        (0..self.demands.len())
            .filter(|&o| self.demands[d].is_subset(&self.demands[o]))
            .collect()
    }

    /// Same graph and terminals, new packet universe and demands.
    pub fn with_demands(
        &self,
        packets: BTreeMap<String, Rational>,
        demands: Vec<Vec<String>>,
    ) -> Result<Instance> {
        if demands.len() != self.groups.len() {
            return Err(Error::InvalidInstance(
                "one demand per group is required".into(),
            ));
        }
        let groups = self
            .groups
            .iter()
            .zip(demands)
            .map(|(g, d)| (g.terminals.clone(), d))
            .collect();
        Instance::new(self.graph.clone(), packets, groups)
    }

    /// Sub-instance with only the listed groups.
    pub fn restrict_groups(&self, keep: &[usize]) -> Result<Instance> {
        let packets = self
            .packet_names
            .iter()
            .cloned()
            .zip(self.packet_weights.iter().cloned())
            .collect();
        let groups = keep
            .iter()
            .map(|&j| {
                let g = &self.groups[j];
                let names = g.demand.iter().map(|&p| self.packet_names[p].clone()).collect();
                (g.terminals.clone(), names)
            })
            .collect();
        Instance::new(self.graph.clone(), packets, groups)
    }

    pub fn covers_all_vertices(&self) -> bool {
        let mut covered = vec![false; self.graph.vertex_count()];
        for g in &self.groups {
            for &t in &g.terminals {
                covered[t] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }
}

/// Core and petals of a sunflower demand family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sunflower {
    pub core: DemandSet,
    /// One petal per group: its demand minus the core.
    pub petals: Vec<DemandSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeTag {
    Laminar,
    Sunflower,
    General,
}

/// A family can be laminar and a sunflower at once (e.g. pairwise-disjoint
/// demands), so both answers are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandShape {
    pub laminar: bool,
    pub sunflower: Option<Sunflower>,
}

impl DemandShape {
    /// Laminar wins when both shapes apply.
    pub fn tag(&self) -> ShapeTag {
        if self.laminar {
            ShapeTag::Laminar
        } else if self.sunflower.is_some() {
            ShapeTag::Sunflower
        } else {
            ShapeTag::General
        }
    }
}

pub fn classify_demands(instance: &Instance) -> DemandShape {
    let ds = instance.demands();
    let laminar = ds.iter().enumerate().all(|(i, a)| {
        ds[i + 1..].iter().all(|b| {
            a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)
        })
    });

    let groups = instance.groups();
    let core: DemandSet = match groups.split_first() {
        None => DemandSet::new(),
        Some((first, rest)) => rest.iter().fold(first.demand.clone(), |acc, g| {
            acc.intersection(&g.demand).copied().collect()
        }),
    };
    let is_sunflower = groups.iter().enumerate().all(|(i, a)| {
        groups[i + 1..].iter().all(|b| {
            a.demand.intersection(&b.demand).copied().collect::<DemandSet>() == core
        })
    });
    let sunflower = is_sunflower.then(|| Sunflower {
        petals: groups
            .iter()
            .map(|g| g.demand.difference(&core).copied().collect())
            .collect(),
        core,
    });
    DemandShape { laminar, sunflower }
}

/// One tree per group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoutingSolution {
    /// Sorted edge ids of each group's tree.
    pub trees: Vec<Vec<EdgeId>>,
}

impl RoutingSolution {
    pub fn new(trees: Vec<Vec<EdgeId>>) -> Self {
        let trees = trees
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect();
        RoutingSolution { trees }
    }

    /// Checks that tree `j` is a tree that contains and connects every terminal of group `j`.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.trees.len() != instance.group_count() {
            return Err(Error::InvalidSolution(format!(
                "{} trees for {} groups",
                self.trees.len(),
                instance.group_count()
            )));
        }
        let graph = instance.graph();
        for (j, tree) in self.trees.iter().enumerate() {
            if let Some(&bad) = tree.iter().find(|&&e| e >= graph.edge_count()) {
                return Err(Error::InvalidSolution(format!("tree {j}: unknown edge {bad}")));
            }
            if !graph::is_forest(graph, tree) {
                return Err(Error::InvalidSolution(format!("tree {j} contains a cycle")));
            }
            if !graph::connects(graph, tree, &instance.groups()[j].terminals) {
                return Err(Error::InvalidSolution(format!(
                    "tree {j} does not span the terminals of group {j}"
                )));
            }
        }
        Ok(())
    }

    /// Packet set carried by every edge that some tree uses.
    pub fn edge_loads(&self, instance: &Instance) -> BTreeMap<EdgeId, DemandSet> {
        let mut loads: BTreeMap<EdgeId, DemandSet> = BTreeMap::new();
        for (j, tree) in self.trees.iter().enumerate() {
            for &e in tree {
                loads
                    .entry(e)
                    .or_default()
                    .extend(instance.groups()[j].demand.iter().copied());
            }
        }
        loads
    }
}

/// Total coverage cost: the sum over edges of cost times the weight of the
/// distinct packets routed across the edge.
pub fn load_cost(instance: &Instance, solution: &RoutingSolution) -> Result<Rational> {
    solution.validate(instance)?;
    let graph = instance.graph();
    Ok(solution
        .edge_loads(instance)
        .iter()
        .fold(Rational::zero(), |acc, (&e, packets)| {
            acc + &graph.edge(e).cost * instance.weight(packets)
        }))
}

/// Edges available to group `j` under per-demand forests: the union of the
/// forests of every demand set containing the group's demand.
pub fn available_edges(instance: &Instance, forests: &[Vec<EdgeId>], j: usize) -> Vec<EdgeId> {
    let own = instance.demand_of_group(j);
    let mut edges: Vec<EdgeId> = instance
        .supersets_of(own)
        .into_iter()
        .flat_map(|d| forests[d].iter().copied())
        .collect();
    edges.sort_unstable();
    edges
}

fn check_forest_count(instance: &Instance, forests: &[Vec<EdgeId>]) -> Result<()> {
    if forests.len() != instance.demands().len() {
        return Err(Error::InvalidSolution(format!(
            "{} forests for {} demand sets",
            forests.len(),
            instance.demands().len()
        )));
    }
    Ok(())
}

/// Cost of per-demand forests: `sum_D w(D) * c(H_D)`. Fails if some group
/// is not connected by the forests of the demand sets containing its demand.
pub fn laminar_cost(instance: &Instance, forests: &[Vec<EdgeId>]) -> Result<Rational> {
    check_forest_count(instance, forests)?;
    let graph = instance.graph();
    for j in 0..instance.group_count() {
        let edges = available_edges(instance, forests, j);
        if !graph::connects(graph, &edges, &instance.groups()[j].terminals) {
            return Err(Error::InvalidSolution(format!(
                "group {j} is disconnected in the forests of its demand supersets"
            )));
        }
    }
    Ok(forests
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (d, forest)| {
            acc + instance.demand_weight(d) * graph.cost_of(forest)
        }))
}

/// Routes each group on a minimal tree inside the forests available to it.
pub fn induced_routing(instance: &Instance, forests: &[Vec<EdgeId>]) -> Result<RoutingSolution> {
    check_forest_count(instance, forests)?;
    let graph = instance.graph();
    let mut trees = Vec::with_capacity(instance.group_count());
    for j in 0..instance.group_count() {
        let edges = available_edges(instance, forests, j);
        let terminals = &instance.groups()[j].terminals;
        if !graph::connects(graph, &edges, terminals) {
            return Err(Error::InvalidSolution(format!(
                "group {j} is disconnected in the forests of its demand supersets"
            )));
        }
        trees.push(graph::prune_to_terminals(graph, &edges, terminals));
    }
    Ok(RoutingSolution::new(trees))
}
