//! Seeded random instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::instance::Instance;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Nested demand sets on a graph with rational costs.
    Laminar,
    /// Shared core plus disjoint petals; unit costs; groups cover every vertex.
    Sunflower,
    /// One group per backbone edge, covering every vertex; unit costs.
    UniformPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// Random spanning tree plus random extra edges up to `m`.
    #[default]
    Random,
    Cycle,
    Path,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: Kind,
    pub n: usize,
    /// Edge count for the random topology; ignored by cycles and paths.
    #[serde(default)]
    pub m: usize,
    /// Group count; ignored by `uniform-pairs`.
    #[serde(default = "default_groups")]
    pub g: usize,
    /// Longest chain of nested demand sets.
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub topology: Topology,
}

fn default_groups() -> usize {
    2
}

fn default_depth() -> usize {
    2
}

impl GeneratorSpec {
    pub fn new(kind: Kind, n: usize, m: usize, g: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            n,
            m,
            g,
            depth: default_depth(),
            seed,
            topology: Topology::Random,
        }
    }
}

/// Backbone edges (a spanning tree, cycle, or path) followed by extra edges.
fn random_edges(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<(Vec<(VertexId, VertexId)>, usize)> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::InvalidInstance("need at least two vertices".into()));
    }
    match spec.topology {
        Topology::Path => Ok(((0..n - 1).map(|v| (v, v + 1)).collect(), n - 1)),
        Topology::Cycle => {
            if n < 3 {
                return Err(Error::InvalidInstance("a cycle needs at least three vertices".into()));
            }
            Ok(((0..n).map(|v| (v, (v + 1) % n)).collect(), n))
        }
        Topology::Random => {
            let max = n * (n - 1) / 2;
            if spec.m < n - 1 || spec.m > max {
                return Err(Error::InvalidInstance(format!(
                    "m = {} must lie in [{}, {max}] for n = {n}",
                    spec.m,
                    n - 1
                )));
            }
            let mut labels: Vec<VertexId> = (0..n).collect();
            labels.shuffle(rng);
            let mut present = BTreeSet::new();
            let mut edges = Vec::with_capacity(spec.m);
            for i in 1..n {
                let j = rng.gen_range(0..i);
                let (a, b) = (labels[i], labels[j]);
                present.insert((a.min(b), a.max(b)));
                edges.push((a, b));
            }
            let mut missing: Vec<(VertexId, VertexId)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|e| !present.contains(e))
                .collect();
            missing.shuffle(rng);
            edges.extend(missing.into_iter().take(spec.m - (n - 1)));
            Ok((edges, n - 1))
        }
    }
}

fn random_cost(rng: &mut ChaCha8Rng) -> Rational {
    let denom = rng.gen_range(1..=3);
    rational::ratio(rng.gen_range(1..=3 * denom), denom)
}

/// Splits a shuffled vertex list into `g` groups of at least two, then adds a
/// few extra terminals so groups overlap.
fn covering_groups(n: usize, g: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<VertexId>>> {
    if g == 0 || 2 * g > n {
        return Err(Error::InvalidInstance(format!(
            "{g} covering groups need 2 <= 2g <= n = {n}"
        )));
    }
    let mut vertices: Vec<VertexId> = (0..n).collect();
    vertices.shuffle(rng);
    let spare = n - 2 * g;
    let mut cuts: Vec<usize> = (1..g).map(|_| rng.gen_range(0..=spare)).collect();
    cuts.sort_unstable();
    let mut groups = Vec::with_capacity(g);
    let mut start = 0;
    for (i, &cut) in cuts.iter().chain(std::iter::once(&spare)).enumerate() {
        let end = cut + 2 * (i + 1);
        groups.push(vertices[start..end].to_vec());
        start = end;
    }
    for group in &mut groups {
        if rng.gen_bool(0.3) {
            group.push(rng.gen_range(0..n));
        }
    }
    Ok(groups)
}

fn random_terminals(n: usize, rng: &mut ChaCha8Rng) -> Vec<VertexId> {
    let size = rng.gen_range(2..=3.min(n));
    let vertices: Vec<VertexId> = (0..n).collect();
    vertices.choose_multiple(rng, size).copied().collect()
}

/// A random forest of `count` demand sets with chains of length at most
/// `depth`; every set is the union of its children plus fresh packets.
fn laminar_family(count: usize, depth: usize, rng: &mut ChaCha8Rng) -> Vec<BTreeSet<usize>> {
    let mut parent: Vec<Option<usize>> = Vec::with_capacity(count);
    let mut level: Vec<usize> = Vec::with_capacity(count);
    for i in 0..count {
        let candidates: Vec<usize> = (0..i).filter(|&p| level[p] + 1 < depth).collect();
        let p = if candidates.is_empty() || rng.gen_bool(0.3) {
            None
        } else {
            candidates.choose(rng).copied()
        };
        level.push(p.map_or(0, |p| level[p] + 1));
        parent.push(p);
    }
    let mut next = 0;
    let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
    for i in (0..count).rev() {
        let fresh = if sets[i].is_empty() { rng.gen_range(1..=2) } else { 1 };
        for _ in 0..fresh {
            sets[i].insert(next);
            next += 1;
        }
        if let Some(p) = parent[i] {
            let child = sets[i].clone();
            sets[p].extend(child);
        }
    }
    sets
}

/// Deterministic in `spec`: the same spec always yields the same instance.
pub fn generate_instance(spec: &GeneratorSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (edges, backbone) = random_edges(spec, &mut rng)?;
    let n = spec.n;
    match spec.kind {
        Kind::Laminar => {
            if spec.g == 0 || spec.depth == 0 {
                return Err(Error::InvalidInstance("laminar instances need g >= 1 and depth >= 1".into()));
            }
            let weighted = edges.iter().map(|&(u, v)| (u, v, random_cost(&mut rng))).collect();
            let graph = Graph::new(n, weighted)?;
            let count = rng.gen_range(1..=spec.g.min(4));
            let family = laminar_family(count, spec.depth, &mut rng);
            let universe: BTreeSet<usize> = family.iter().flatten().copied().collect();
            let packets: BTreeMap<String, Rational> = universe
                .iter()
                .map(|&p| (format!("p{p}"), rational::int(rng.gen_range(1..=3))))
                .collect();
            let groups = (0..spec.g)
                .map(|j| {
                    let d = if j < count { j } else { rng.gen_range(0..count) };
                    let names = family[d].iter().map(|p| format!("p{p}")).collect();
                    (random_terminals(n, &mut rng), names)
                })
                .collect();
            Instance::new(graph, packets, groups)
        }
        Kind::Sunflower => {
            let graph = Graph::unit(n, &edges)?;
            let terminals = covering_groups(n, spec.g, &mut rng)?;
            let core = rng.gen_range(1..=2);
            let mut next = core;
            let groups = terminals
                .into_iter()
                .map(|x| {
                    let petal = rng.gen_range(1..=2);
                    let names = (0..core).chain(next..next + petal).map(|p| p.to_string()).collect();
                    next += petal;
                    (x, names)
                })
                .collect();
            Instance::new(graph, BTreeMap::new(), groups)
        }
        Kind::UniformPairs => {
            let graph = Graph::unit(n, &edges)?;
            let groups = edges[..backbone]
                .iter()
                .enumerate()
                .map(|(j, &(u, v))| (vec![u, v], vec!["0".to_string(), (j + 1).to_string()]))
                .collect();
            Instance::new(graph, BTreeMap::new(), groups)
        }
    }
}
