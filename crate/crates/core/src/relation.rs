//! Axis relation graph: every joint axis of a mechanism, with parallelism
//! closed transitively and perpendicularity propagated across parallel classes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{JointKind, LegTopology, MechanismTopology, RelationCode};

/// Leg index used for the fixed-platform virtual leg.
pub const FIXED_PLATFORM: u8 = 0;
/// Leg index used for the moving-platform virtual leg.
pub const MOVING_PLATFORM: u8 = 7;

/// A joint axis: leg label and one-based joint index within the leg.
///
/// The platform virtual legs are aliases: `(0, k)` is the first joint of leg
/// k and `(7, k)` is its last joint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AxisRef {
    pub leg: u8,
    pub joint: u8,
}

impl AxisRef {
    pub const fn new(leg: u8, joint: u8) -> Self {
        Self { leg, joint }
    }
}

impl fmt::Display for AxisRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.leg, self.joint)
    }
}

/// A parallel class, identified by its smallest member node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("unknown axis {0}")]
    UnknownAxis(AxisRef),
    #[error("inconsistent axis relations: {detail}")]
    InconsistentRelations { cycle: Vec<AxisRef>, detail: String },
}

#[derive(Clone, Debug)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Unites two sets keeping the smaller index as root. Returns false if
    /// they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ParallelReason {
    Seeded,
    CommonNormal(usize, usize),
}

#[derive(Clone, Debug)]
pub struct RelationGraph {
    nodes: Vec<AxisRef>,
    kinds: Vec<JointKind>,
    index: BTreeMap<AxisRef, usize>,
    leg_len: BTreeMap<u8, u8>,
    parallel: Vec<usize>,
    coaxial: Vec<usize>,
    perpendicular: BTreeSet<(usize, usize)>,
    seeded: BTreeMap<(usize, usize), RelationCode>,
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn merge_codes(old: RelationCode, new: RelationCode) -> Option<RelationCode> {
    use RelationCode::*;
    if old == new || new == Arbitrary {
        return Some(old);
    }
    if old == Arbitrary {
        return Some(new);
    }
    let parallel_like = |c: RelationCode| matches!(c, Parallel | Coaxial);
    if (parallel_like(old) && new == Perpendicular) || (old == Perpendicular && parallel_like(new)) {
        return None;
    }
    let strength = |c: RelationCode| match c {
        Coaxial => 5,
        Parallel => 4,
        Perpendicular => 3,
        CommonPoint => 2,
        Coplanar => 1,
        Arbitrary => 0,
    };
    Some(if strength(new) > strength(old) { new } else { old })
}

impl RelationGraph {
    /// Builds the graph from explicit nodes and seeded pair relations.
    pub fn from_seeds(
        nodes: &[(AxisRef, JointKind)],
        seeds: &[(AxisRef, AxisRef, RelationCode)],
    ) -> Result<Self, RelationError> {
        let mut sorted: Vec<(AxisRef, JointKind)> = nodes.to_vec();
        sorted.sort();
        sorted.dedup_by_key(|(a, _)| *a);
        let index: BTreeMap<AxisRef, usize> =
            sorted.iter().enumerate().map(|(i, (a, _))| (*a, i)).collect();
        let mut leg_len: BTreeMap<u8, u8> = BTreeMap::new();
        for (a, _) in &sorted {
            let e = leg_len.entry(a.leg).or_insert(0);
            *e = (*e).max(a.joint);
        }
        let mut graph = RelationGraph {
            nodes: sorted.iter().map(|(a, _)| *a).collect(),
            kinds: sorted.iter().map(|(_, k)| *k).collect(),
            index,
            leg_len,
            parallel: Vec::new(),
            coaxial: Vec::new(),
            perpendicular: BTreeSet::new(),
            seeded: BTreeMap::new(),
        };

        for &(a, b, code) in seeds {
            let (ia, ib) = (graph.node(a)?, graph.node(b)?);
            if ia == ib {
                continue;
            }
            let key = ordered(ia, ib);
            let old = graph.seeded.get(&key).copied().unwrap_or_default();
            let merged = merge_codes(old, code).ok_or_else(|| RelationError::InconsistentRelations {
                cycle: vec![graph.nodes[key.0], graph.nodes[key.1]],
                detail: format!(
                    "{} and {} are seeded both {} and {}",
                    graph.label_of(key.0),
                    graph.label_of(key.1),
                    old,
                    code
                ),
            })?;
            if merged != RelationCode::Arbitrary {
                graph.seeded.insert(key, merged);
            }
        }
        graph.close()?;
        Ok(graph)
    }

    fn close(&mut self) -> Result<(), RelationError> {
        let n = self.nodes.len();
        let mut coax = UnionFind::new(n);
        let mut par = UnionFind::new(n);
        let mut edges: Vec<(usize, usize, ParallelReason)> = Vec::new();
        let mut perp_pairs: Vec<(usize, usize)> = Vec::new();
        for (&(a, b), &code) in &self.seeded {
            match code {
                RelationCode::Coaxial => {
                    coax.union(a, b);
                    par.union(a, b);
                    edges.push((a, b, ParallelReason::Seeded));
                }
                RelationCode::Parallel => {
                    par.union(a, b);
                    edges.push((a, b, ParallelReason::Seeded));
                }
                RelationCode::Perpendicular => perp_pairs.push((a, b)),
                _ => {}
            }
        }

        loop {
            let mut perp: BTreeSet<(usize, usize)> = BTreeSet::new();
            for &(a, b) in &perp_pairs {
                let (ra, rb) = (par.find(a), par.find(b));
                if ra == rb {
                    return Err(self.contradiction(a, b, &edges));
                }
                perp.insert(ordered(ra, rb));
            }
            let mut neighbours: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for &(x, y) in &perp {
                neighbours.entry(x).or_default().insert(y);
                neighbours.entry(y).or_default().insert(x);
            }
            // Two classes perpendicular to both members of a perpendicular
            // pair are both along its common normal.
            let mut merge = None;
            'search: for (&x, nx) in &neighbours {
                for (&y, ny) in neighbours.range((x + 1)..) {
                    let shared: Vec<usize> = nx.intersection(ny).copied().collect();
                    for (i, &s) in shared.iter().enumerate() {
                        for &t in &shared[i + 1..] {
                            if perp.contains(&ordered(s, t)) {
                                merge = Some((x, y, s, t));
                                break 'search;
                            }
                        }
                    }
                }
            }
            match merge {
                Some((x, y, a, c)) => {
                    par.union(x, y);
                    edges.push((x, y, ParallelReason::CommonNormal(a, c)));
                }
                None => {
                    self.perpendicular = perp;
                    break;
                }
            }
        }
        self.parallel = (0..n).map(|i| par.find(i)).collect();
        self.coaxial = (0..n).map(|i| coax.find(i)).collect();
        Ok(())
    }

    fn contradiction(&self, a: usize, b: usize, edges: &[(usize, usize, ParallelReason)]) -> RelationError {
        // Breadth-first search along parallel edges explains why a and b share a class.
        let mut prev: BTreeMap<usize, (usize, ParallelReason)> = BTreeMap::new();
        let mut queue = VecDeque::from([a]);
        let mut seen = BTreeSet::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &(x, y, why) in edges {
                let v = if x == u {
                    y
                } else if y == u {
                    x
                } else {
                    continue;
                };
                if seen.insert(v) {
                    prev.insert(v, (u, why));
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![b];
        let mut steps = Vec::new();
        let mut cur = b;
        while cur != a {
            let Some(&(p, why)) = prev.get(&cur) else { break };
            steps.push(match why {
                ParallelReason::Seeded => {
                    format!("{} || {}", self.label_of(p), self.label_of(cur))
                }
                ParallelReason::CommonNormal(x, y) => format!(
                    "{} || {} (both normal to {} and {})",
                    self.label_of(p),
                    self.label_of(cur),
                    self.label_of(x),
                    self.label_of(y)
                ),
            });
            path.push(p);
            cur = p;
        }
        path.reverse();
        steps.reverse();
        RelationError::InconsistentRelations {
            cycle: path.iter().map(|&i| self.nodes[i]).collect(),
            detail: format!(
                "{} _|_ {} but {}",
                self.label_of(a),
                self.label_of(b),
                if steps.is_empty() {
                    "they are the same class".to_string()
                } else {
                    steps.join(", ")
                }
            ),
        }
    }

    fn resolve(&self, a: AxisRef) -> AxisRef {
        match a.leg {
            FIXED_PLATFORM => AxisRef::new(a.joint, 1),
            MOVING_PLATFORM => AxisRef::new(a.joint, self.leg_len.get(&a.joint).copied().unwrap_or(0)),
            _ => a,
        }
    }

    fn node(&self, a: AxisRef) -> Result<usize, RelationError> {
        self.index
            .get(&self.resolve(a))
            .copied()
            .ok_or(RelationError::UnknownAxis(a))
    }

    fn label_of(&self, i: usize) -> String {
        let a = self.nodes[i];
        format!("{}{}{}", self.kinds[i].letter(), a.leg, a.joint)
    }

    /// Axis label such as `P43` (joint kind, leg, joint).
    pub fn label(&self, a: AxisRef) -> String {
        match self.node(a) {
            Ok(i) => self.label_of(i),
            Err(_) => format!("?{}{}", a.leg, a.joint),
        }
    }

    pub fn contains(&self, a: AxisRef) -> bool {
        self.node(a).is_ok()
    }

    pub fn nodes(&self) -> &[AxisRef] {
        &self.nodes
    }

    pub fn kind(&self, a: AxisRef) -> Result<JointKind, RelationError> {
        Ok(self.kinds[self.node(a)?])
    }

    pub fn class_of(&self, a: AxisRef) -> Result<ClassId, RelationError> {
        Ok(ClassId(self.parallel[self.node(a)?]))
    }

    /// Representative (smallest) axis of a class.
    pub fn representative(&self, c: ClassId) -> AxisRef {
        self.nodes[c.0]
    }

    pub fn class_label(&self, c: ClassId) -> String {
        self.label_of(c.0)
    }

    pub fn classes(&self) -> Vec<ClassId> {
        let set: BTreeSet<usize> = self.parallel.iter().copied().collect();
        set.into_iter().map(ClassId).collect()
    }

    pub fn members(&self, c: ClassId) -> Vec<AxisRef> {
        (0..self.nodes.len())
            .filter(|&i| self.parallel[i] == c.0)
            .map(|i| self.nodes[i])
            .collect()
    }

    pub fn classes_perpendicular(&self, a: ClassId, b: ClassId) -> bool {
        self.perpendicular.contains(&ordered(a.0, b.0))
    }

    /// Unordered pairs of mutually perpendicular classes.
    pub fn perpendicular_pairs(&self) -> Vec<(ClassId, ClassId)> {
        self.perpendicular
            .iter()
            .map(|&(a, b)| (ClassId(a), ClassId(b)))
            .collect()
    }

    pub fn coaxial(&self, a: AxisRef, b: AxisRef) -> Result<bool, RelationError> {
        Ok(self.coaxial[self.node(a)?] == self.coaxial[self.node(b)?])
    }

    /// Seeded (not derived) relation of a pair.
    pub fn seeded(&self, a: AxisRef, b: AxisRef) -> Result<RelationCode, RelationError> {
        let key = ordered(self.node(a)?, self.node(b)?);
        Ok(self.seeded.get(&key).copied().unwrap_or_default())
    }

    /// All seeded pairs with a non-arbitrary code.
    pub fn seeded_pairs(&self) -> Vec<(AxisRef, AxisRef, RelationCode)> {
        self.seeded
            .iter()
            .map(|(&(a, b), &c)| (self.nodes[a], self.nodes[b], c))
            .collect()
    }

    /// Strongest derivable relation between two axes.
    pub fn relation_between(&self, a: AxisRef, b: AxisRef) -> Result<RelationCode, RelationError> {
        let (ia, ib) = (self.node(a)?, self.node(b)?);
        if ia == ib {
            return Ok(RelationCode::Parallel);
        }
        if self.coaxial[ia] == self.coaxial[ib] {
            return Ok(RelationCode::Coaxial);
        }
        if self.parallel[ia] == self.parallel[ib] {
            return Ok(RelationCode::Parallel);
        }
        if self
            .perpendicular
            .contains(&ordered(self.parallel[ia], self.parallel[ib]))
        {
            return Ok(RelationCode::Perpendicular);
        }
        Ok(self.seeded.get(&ordered(ia, ib)).copied().unwrap_or_default())
    }
}

/// Seeds every leg matrix and both platform matrices into one graph.
pub fn build_relation_graph(mech: &MechanismTopology) -> Result<RelationGraph, RelationError> {
    let mut nodes = Vec::new();
    let mut seeds = Vec::new();
    for leg in &mech.legs {
        push_leg(leg, &mut nodes, &mut seeds);
    }
    for (platform, at_end) in [(&mech.fixed, false), (&mech.moving, true)] {
        for (i, j, code) in platform.relations.pairs() {
            let (Some(li), Some(lj)) = (mech.legs.get(i), mech.legs.get(j)) else {
                continue;
            };
            let end = |leg: &LegTopology| {
                if at_end {
                    AxisRef::new(leg.label, leg.joint_count() as u8)
                } else {
                    AxisRef::new(leg.label, 1)
                }
            };
            seeds.push((end(li), end(lj), code));
        }
    }
    RelationGraph::from_seeds(&nodes, &seeds)
}

/// Graph of a lone leg.
pub fn build_leg_graph(leg: &LegTopology) -> Result<RelationGraph, RelationError> {
    let mut nodes = Vec::new();
    let mut seeds = Vec::new();
    push_leg(leg, &mut nodes, &mut seeds);
    RelationGraph::from_seeds(&nodes, &seeds)
}

fn push_leg(
    leg: &LegTopology,
    nodes: &mut Vec<(AxisRef, JointKind)>,
    seeds: &mut Vec<(AxisRef, AxisRef, RelationCode)>,
) {
    for (j, kind) in leg.joints.iter().enumerate() {
        nodes.push((AxisRef::new(leg.label, j as u8 + 1), *kind));
    }
    for (i, j, code) in leg.relations.pairs() {
        seeds.push((
            AxisRef::new(leg.label, i as u8 + 1),
            AxisRef::new(leg.label, j as u8 + 1),
            code,
        ));
    }
}

pub fn relation_between(g: &RelationGraph, a: AxisRef, b: AxisRef) -> Result<RelationCode, RelationError> {
    g.relation_between(a, b)
}
