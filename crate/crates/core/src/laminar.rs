//! Primal-dual 2-approximation for laminar demand families.
//!
//! Demand sets are processed in increasing size. In the phase for demand set
//! `D`, the duals of the components of the phase forest `F_D` that separate
//! some group whose demand contains `D` are raised uniformly until an edge
//! becomes tight for `D`; that edge joins `F_D`. Edge capacity for `D` is
//! `w(D) * c_e`, shared with every dual of a demand set contained in `D`.
//! Afterwards, demand sets are pruned in decreasing size by reverse delete.
//!
//! The output carries its own certificate: the positive duals, which are
//! feasible for the dual program and sum to at least half the primal cost.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{self, DisjointSets, EdgeId, VertexId};
use crate::instance::{
    self, classify_demands, DemandId, DemandSet, Instance, RoutingSolution,
};
use crate::rational::{self, Rational};

/// A positive dual value on a cut for one demand set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualVariable {
    pub demand: DemandId,
    /// Sorted vertex ids.
    pub cut: Vec<VertexId>,
    pub value: Rational,
}

/// Working state of one dual-ascent phase.
#[derive(Debug, Clone)]
pub struct PhaseState<'a> {
    instance: &'a Instance,
    demand: DemandId,
    capacity_scale: Rational,
    relevant: Vec<usize>,
    forest: Vec<EdgeId>,
    sets: DisjointSets,
    loads: Vec<Rational>,
    /// Dual accumulated so far by each still-unmerged component, keyed by root.
    open: BTreeMap<usize, Rational>,
    duals: Vec<DualVariable>,
}

impl<'a> PhaseState<'a> {
    /// Starts the phase for `demand` with `F_D` empty and edge loads carried
    /// over from every earlier dual whose demand set is contained in `demand`.
    pub fn start(instance: &'a Instance, demand: DemandId, earlier: &[DualVariable]) -> Self {
        let packets = instance.demands()[demand].clone();
        Self::for_packets(instance, demand, &packets, earlier)
    }

    /// Like [`PhaseState::start`], for an arbitrary packet set labelled `demand`.
    pub fn for_packets(
        instance: &'a Instance,
        demand: DemandId,
        packets: &DemandSet,
        earlier: &[DualVariable],
    ) -> Self {
        let graph = instance.graph();
        let mut loads = vec![Rational::zero(); graph.edge_count()];
        for dual in earlier {
            if !instance.demands()[dual.demand].is_subset(packets) {
                continue;
            }
            let inside = membership(graph.vertex_count(), &dual.cut);
            for (e, edge) in graph.edges().iter().enumerate() {
                if inside[edge.u] != inside[edge.v] {
                    loads[e] += &dual.value;
                }
            }
        }
        PhaseState {
            instance,
            demand,
            capacity_scale: instance.weight(packets),
            relevant: instance.groups_demanding(packets),
            forest: Vec::new(),
            sets: DisjointSets::new(graph.vertex_count()),
            loads,
            open: BTreeMap::new(),
            duals: Vec::new(),
        }
    }

    pub fn demand(&self) -> DemandId {
        self.demand
    }

    /// Edges of `F_D` in order of addition.
    pub fn forest(&self) -> &[EdgeId] {
        &self.forest
    }

    /// Accumulated dual load on every edge for this phase's constraint.
    pub fn loads(&self) -> &[Rational] {
        &self.loads
    }

    /// Positive duals of this phase closed so far.
    pub fn duals(&self) -> &[DualVariable] {
        &self.duals
    }

    pub fn capacity(&self, e: EdgeId) -> Rational {
        &self.capacity_scale * &self.instance.graph().edge(e).cost
    }

    fn active_roots(&mut self) -> Vec<usize> {
        let mut roots = Vec::new();
        for &j in &self.relevant {
            let terminals = &self.instance.groups()[j].terminals;
            let group_roots: Vec<usize> = terminals.iter().map(|&t| self.sets.find(t)).collect();
            if group_roots.iter().any(|&r| r != group_roots[0]) {
                roots.extend(group_roots);
            }
        }
        roots.sort_unstable();
        roots.dedup();
        roots
    }

    fn members(&mut self, root: usize) -> Vec<VertexId> {
        (0..self.instance.graph().vertex_count())
            .filter(|&v| self.sets.find(v) == root)
            .collect()
    }

    /// Components of `F_D` that separate a group whose demand contains `D`.
    pub fn active_sets(&mut self) -> Vec<Vec<VertexId>> {
        self.active_roots()
            .into_iter()
            .map(|r| self.members(r))
            .collect()
    }

    /// Every component of `F_D` with its activity flag, ordered by smallest vertex.
    pub fn components(&mut self) -> Vec<(Vec<VertexId>, bool)> {
        let active = self.active_roots();
        let n = self.instance.graph().vertex_count();
        let mut by_root: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for v in 0..n {
            by_root.entry(self.sets.find(v)).or_default().push(v);
        }
        let mut comps: Vec<_> = by_root
            .into_iter()
            .map(|(root, members)| (members, active.binary_search(&root).is_ok()))
            .collect();
        comps.sort_by_key(|(members, _)| members[0]);
        comps
    }

    pub fn is_complete(&mut self) -> bool {
        self.active_roots().is_empty()
    }

    /// One raise-and-add iteration. Returns the edge added, or `None` if no
    /// active set remained.
    pub fn step(&mut self) -> Result<Option<EdgeId>> {
        let active = self.active_roots();
        if active.is_empty() {
            self.close_all();
            return Ok(None);
        }
        let graph = self.instance.graph();
        let mut rates = vec![0u32; graph.edge_count()];
        let mut best: Option<(Rational, EdgeId)> = None;
        for (e, edge) in graph.edges().iter().enumerate() {
            let (ru, rv) = (self.sets.find(edge.u), self.sets.find(edge.v));
            if ru == rv {
                continue;
            }
            let rate = u32::from(active.binary_search(&ru).is_ok())
                + u32::from(active.binary_search(&rv).is_ok());
            if rate == 0 {
                continue;
            }
            rates[e] = rate;
            let slack = self.capacity(e) - &self.loads[e];
            let delta = slack / rational::int(i64::from(rate));
            if best.as_ref().map_or(true, |(d, _)| delta < *d) {
                best = Some((delta, e));
            }
        }
        let Some((delta, tight)) = best else {
            let stuck: Vec<_> = self.active_sets().into_iter().next().unwrap_or_default();
            return Err(Error::Infeasible(format!(
                "demand set {} cannot connect component {:?}",
                self.demand, stuck
            )));
        };

        for root in &active {
            *self.open.entry(*root).or_insert_with(Rational::zero) += &delta;
        }
        for (e, &rate) in rates.iter().enumerate() {
            if rate > 0 {
                self.loads[e] += &delta * rational::int(i64::from(rate));
            }
            assert!(
                self.loads[e] <= self.capacity(e),
                "dual constraint for edge {e} and demand {} exceeded",
                self.demand
            );
        }

        let edge = graph.edge(tight);
        let (ru, rv) = (self.sets.find(edge.u), self.sets.find(edge.v));
        self.close(ru);
        self.close(rv);
        self.sets.union(ru, rv);
        self.forest.push(tight);
        Ok(Some(tight))
    }

    fn close(&mut self, root: usize) {
        if let Some(value) = self.open.remove(&root) {
            if value > Rational::zero() {
                let cut = self.members(root);
                self.duals.push(DualVariable {
                    demand: self.demand,
                    cut,
                    value,
                });
            }
        }
    }

    fn close_all(&mut self) {
        let roots: Vec<usize> = self.open.keys().copied().collect();
        for root in roots {
            self.close(root);
        }
    }

    /// Raises duals and adds tight edges until no active set remains.
    pub fn dual_ascent_phase(mut self) -> Result<Self> {
        while self.step()?.is_some() {}
        Ok(self)
    }
}

fn membership(n: usize, cut: &[VertexId]) -> Vec<bool> {
    let mut inside = vec![false; n];
    for &v in cut {
        if v < n {
            inside[v] = true;
        }
    }
    inside
}

/// Demand ids in increasing cardinality, ties by id.
pub fn phase_order(instance: &Instance) -> Vec<DemandId> {
    let mut order: Vec<DemandId> = (0..instance.demands().len()).collect();
    order.sort_by_key(|&d| (instance.demands()[d].len(), d));
    order
}

/// Result of the dual-ascent stage.
#[derive(Debug, Clone)]
pub struct Ascent {
    /// `F_D` per demand id, in order of edge addition.
    pub forests: Vec<Vec<EdgeId>>,
    pub duals: Vec<DualVariable>,
}

pub fn dual_ascent(instance: &Instance) -> Result<Ascent> {
    let mut forests = vec![Vec::new(); instance.demands().len()];
    let mut duals: Vec<DualVariable> = Vec::new();
    for d in phase_order(instance) {
        let phase = PhaseState::start(instance, d, &duals).dual_ascent_phase()?;
        forests[d] = phase.forest.clone();
        duals.extend(phase.duals);
    }
    Ok(Ascent { forests, duals })
}

/// Reverse delete. Demand sets are visited in decreasing size (ties by id),
/// and each forest's edges in reverse order of addition; an edge goes if the
/// groups with exactly this demand stay connected without it, given the
/// (already pruned) forests of all strict supersets.
pub fn prune(instance: &Instance, forests: &[Vec<EdgeId>]) -> Vec<Vec<EdgeId>> {
    let graph = instance.graph();
    let mut pruned: Vec<Vec<EdgeId>> = forests.to_vec();
    let mut order: Vec<DemandId> = (0..forests.len()).collect();
    order.sort_by_key(|&d| (Reverse(instance.demands()[d].len()), d));
    for d in order {
        let own: Vec<usize> = (0..instance.group_count())
            .filter(|&j| instance.demand_of_group(j) == d)
            .collect();
        let larger: Vec<EdgeId> = instance
            .supersets_of(d)
            .into_iter()
            .filter(|&o| o != d)
            .flat_map(|o| pruned[o].iter().copied())
            .collect();
        let mut kept = pruned[d].clone();
        for e in forests[d].iter().rev() {
            let Some(pos) = kept.iter().position(|x| x == e) else {
                continue;
            };
            let mut candidate: Vec<EdgeId> = kept
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pos)
                .map(|(_, &x)| x)
                .collect();
            candidate.extend(larger.iter().copied());
            let still_connected = own
                .iter()
                .all(|&j| graph::connects(graph, &candidate, &instance.groups()[j].terminals));
            if still_connected {
                kept.remove(pos);
            }
        }
        pruned[d] = kept;
    }
    pruned
}

/// Per-demand forests and duals proving `primal <= 2 * dual`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaminarCertificate {
    /// Pruned forest `H_D` per demand id, sorted edge ids.
    pub forests: Vec<Vec<EdgeId>>,
    pub duals: Vec<DualVariable>,
    pub primal: Rational,
    pub dual: Rational,
}

impl LaminarCertificate {
    pub fn ratio_bound() -> Rational {
        rational::int(2)
    }

    pub fn dual_total(duals: &[DualVariable]) -> Rational {
        duals.iter().fold(Rational::zero(), |acc, y| acc + &y.value)
    }
}

pub fn solve_laminar(instance: &Instance) -> Result<(RoutingSolution, LaminarCertificate)> {
    if !classify_demands(instance).laminar {
        return Err(Error::Shape("demand family is not laminar".into()));
    }
    let ascent = dual_ascent(instance)?;
    let mut forests = prune(instance, &ascent.forests);
    for f in &mut forests {
        f.sort_unstable();
    }
    let primal = instance::laminar_cost(instance, &forests)?;
    let dual = LaminarCertificate::dual_total(&ascent.duals);
    if primal > &dual * LaminarCertificate::ratio_bound() {
        return Err(Error::Invariant(format!(
            "primal {primal} exceeds twice the dual {dual}"
        )));
    }
    let routing = instance::induced_routing(instance, &forests)?;
    Ok((
        routing,
        LaminarCertificate {
            forests,
            duals: ascent.duals,
            primal,
            dual,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualViolation {
    NonPositive { index: usize },
    UnknownDemand { index: usize },
    /// The cut does not separate any group whose demand contains the dual's demand.
    CutNotSeparating { index: usize, demand: DemandId },
    /// `sum_{D' ⊆ D} sum_{S: e ∈ δ(S)} y_{D',S}` exceeds `w(D) * c_e`.
    EdgeOverloaded {
        edge: EdgeId,
        demand: DemandId,
        load: Rational,
        capacity: Rational,
    },
}

impl std::fmt::Display for DualViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DualViolation::NonPositive { index } => write!(f, "dual #{index} is not positive"),
            DualViolation::UnknownDemand { index } => {
                write!(f, "dual #{index} names an unknown demand set")
            }
            DualViolation::CutNotSeparating { index, demand } => write!(
                f,
                "dual #{index}: cut separates no group demanding all of demand set {demand}"
            ),
            DualViolation::EdgeOverloaded {
                edge,
                demand,
                load,
                capacity,
            } => write!(
                f,
                "edge {edge} under demand set {demand}: load {load} > capacity {capacity}"
            ),
        }
    }
}

/// Evaluates every dual constraint exactly; an empty list means feasible.
pub fn check_dual_feasibility(instance: &Instance, duals: &[DualVariable]) -> Vec<DualViolation> {
    let graph = instance.graph();
    let n = graph.vertex_count();
    let demands = instance.demands();
    let mut violations = Vec::new();
    let mut crossing: Vec<Option<Vec<bool>>> = Vec::with_capacity(duals.len());
    for (index, y) in duals.iter().enumerate() {
        if y.value <= Rational::zero() {
            violations.push(DualViolation::NonPositive { index });
        }
        if y.demand >= demands.len() {
            violations.push(DualViolation::UnknownDemand { index });
            crossing.push(None);
            continue;
        }
        let inside = membership(n, &y.cut);
        let separates = instance.groups_demanding(&demands[y.demand]).into_iter().any(|j| {
            let ts = &instance.groups()[j].terminals;
            ts.iter().any(|&t| inside[t]) && ts.iter().any(|&t| !inside[t])
        });
        if !separates {
            violations.push(DualViolation::CutNotSeparating {
                index,
                demand: y.demand,
            });
        }
        crossing.push(Some(
            graph.edges().iter().map(|e| inside[e.u] != inside[e.v]).collect(),
        ));
    }
    for (d, packets) in demands.iter().enumerate() {
        let scale = instance.weight(packets);
        for (e, edge) in graph.edges().iter().enumerate() {
            let load = duals
                .iter()
                .zip(&crossing)
                .filter(|(y, cross)| {
                    cross.as_ref().is_some_and(|c| c[e])
                        && demands[y.demand].is_subset(packets)
                })
                .fold(Rational::zero(), |acc, (y, _)| acc + &y.value);
            let capacity = &scale * &edge.cost;
            if load > capacity {
                violations.push(DualViolation::EdgeOverloaded {
                    edge: e,
                    demand: d,
                    load,
                    capacity,
                });
            }
        }
    }
    violations
}

/// Groups not connected by the forests of the demand sets containing their demand.
pub fn disconnected_groups(instance: &Instance, forests: &[Vec<EdgeId>]) -> Vec<usize> {
    if forests.len() != instance.demands().len() {
        return (0..instance.group_count()).collect();
    }
    (0..instance.group_count())
        .filter(|&j| {
            let edges = instance::available_edges(instance, forests, j);
            !graph::connects(instance.graph(), &edges, &instance.groups()[j].terminals)
        })
        .collect()
}

pub fn check_primal_feasibility(instance: &Instance, forests: &[Vec<EdgeId>]) -> bool {
    disconnected_groups(instance, forests).is_empty()
}

/// Demand sets `D` for which the union of `H_D'` over all `D' ⊇ D` has a cycle.
pub fn forest_violations(instance: &Instance, forests: &[Vec<EdgeId>]) -> Vec<DemandId> {
    (0..instance.demands().len())
        .filter(|&d| {
            let union: Vec<EdgeId> = instance
                .supersets_of(d)
                .into_iter()
                .flat_map(|o| forests[o].iter().copied())
                .collect();
            !graph::is_forest(instance.graph(), &union)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeViolation {
    /// An inactive, non-isolated component of `F_D` met exactly one edge of
    /// the final forests for supersets of `D`.
    InactiveDegreeOne {
        demand: DemandId,
        iteration: usize,
        component: Vec<VertexId>,
    },
    /// Active components had average degree above two.
    ActiveAverageAboveTwo {
        demand: DemandId,
        iteration: usize,
        degree_sum: usize,
        active: usize,
    },
}

/// Replays the dual ascent and checks every iteration against the final
/// pruned forests: inactive components never have degree exactly one, and
/// active components have average degree at most two.
pub fn check_phase_degrees(
    instance: &Instance,
    forests: &[Vec<EdgeId>],
) -> Result<Vec<DegreeViolation>> {
    let graph = instance.graph();
    let mut violations = Vec::new();
    let mut duals: Vec<DualVariable> = Vec::new();
    for d in phase_order(instance) {
        let final_edges: Vec<EdgeId> = instance
            .supersets_of(d)
            .into_iter()
            .flat_map(|o| forests[o].iter().copied())
            .collect();
        let mut state = PhaseState::start(instance, d, &duals);
        let mut iteration = 0;
        while !state.is_complete() {
            let comps = state.components();
            let mut degree_sum = 0;
            let mut active = 0;
            for (members, is_active) in comps {
                let inside = membership(graph.vertex_count(), &members);
                let degree = final_edges
                    .iter()
                    .filter(|&&e| {
                        let edge = graph.edge(e);
                        inside[edge.u] != inside[edge.v]
                    })
                    .count();
                if is_active {
                    active += 1;
                    degree_sum += degree;
                } else if degree == 1 {
                    violations.push(DegreeViolation::InactiveDegreeOne {
                        demand: d,
                        iteration,
                        component: members,
                    });
                }
            }
            if degree_sum > 2 * active {
                violations.push(DegreeViolation::ActiveAverageAboveTwo {
                    demand: d,
                    iteration,
                    degree_sum,
                    active,
                });
            }
            state.step()?;
            iteration += 1;
        }
        state.close_all();
        duals.extend(state.duals);
    }
    Ok(violations)
}

/// The certificate's claimed ratio, `primal / dual`, or `None` for a zero dual.
pub fn certified_ratio(cert: &LaminarCertificate) -> Option<Rational> {
    (!cert.dual.is_zero()).then(|| &cert.primal / &cert.dual)
}
