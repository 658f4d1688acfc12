//! The 2×6 POC matrix, its normalization and the mechanism-level operations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::direction::{Direction, DirectionDescriptor, Judgement, Source, Token};
use crate::relation::{AxisRef, RelationGraph};
use crate::topology::MAX_SIDE;

/// How an output direction arises from the joints of a leg.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Translation along a joint axis.
    Along(AxisRef),
    /// Translation along a generic line normal to a revolute axis.
    NormalLine(AxisRef, u8),
    /// Translation anywhere in the plane normal to a revolute axis.
    NormalPlane(AxisRef),
    /// Translation along a generic direction produced by a joint.
    Free(AxisRef, u8),
    /// Rotation about a revolute axis.
    About(AxisRef),
    /// A subspace carried over from an intersection, attributed to a joint.
    Given(DirectionDescriptor, AxisRef),
}

impl Generator {
    pub fn axis(&self) -> AxisRef {
        match self {
            Generator::Along(a)
            | Generator::NormalLine(a, _)
            | Generator::NormalPlane(a)
            | Generator::Free(a, _)
            | Generator::About(a)
            | Generator::Given(_, a) => *a,
        }
    }

    pub fn descriptor(&self, g: &RelationGraph) -> DirectionDescriptor {
        use DirectionDescriptor::*;
        match self {
            Generator::Along(a) | Generator::About(a) => Line(Direction::axis(g, *a)),
            Generator::NormalLine(a, slot) => {
                Line(Direction::in_plane(Direction::axis(g, *a), Token::new(*a, *slot)))
            }
            Generator::NormalPlane(a) => Plane(Direction::axis(g, *a)),
            Generator::Free(a, slot) => Line(Direction::Free(Token::new(*a, *slot))),
            Generator::Given(d, _) => d.clone(),
        }
    }
}

/// A generator placed in a matrix column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Placed {
    pub col: usize,
    pub gen: Generator,
}

impl Placed {
    pub fn new(col: usize, gen: Generator) -> Self {
        Self { col, gen }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("overlapping support in {row} row, column {col}")]
    OverlappingSupport { row: char, col: usize },
    #[error("indeterminate relation: {0}")]
    IndeterminateRelation(String),
}

/// What to do when a result depends on an unstated axis relation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationPolicy {
    /// Unrelated axes are taken as non-parallel and non-perpendicular.
    #[default]
    GeneralPosition,
    /// Report an error instead.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PocMatrix {
    pub width: usize,
    pub t: [u8; MAX_SIDE],
    pub r: [u8; MAX_SIDE],
    pub t_attr: [Option<AxisRef>; MAX_SIDE],
    pub r_attr: [Option<AxisRef>; MAX_SIDE],
    /// Legs owning the translation row.
    pub t_owner: Vec<u8>,
    /// Legs owning the rotation row.
    pub r_owner: Vec<u8>,
    pub t_gens: Vec<Placed>,
    pub r_gens: Vec<Placed>,
}

impl PocMatrix {
    pub fn zero(width: usize) -> Self {
        assert!(width <= MAX_SIDE);
        Self {
            width,
            t: [0; MAX_SIDE],
            r: [0; MAX_SIDE],
            t_attr: [None; MAX_SIDE],
            r_attr: [None; MAX_SIDE],
            t_owner: Vec::new(),
            r_owner: Vec::new(),
            t_gens: Vec::new(),
            r_gens: Vec::new(),
        }
    }

    /// Plain integer matrix, without generators. Used for tests and display.
    pub fn from_rows(t: &[u8], r: &[u8]) -> Self {
        let mut m = Self::zero(t.len().max(r.len()));
        m.t[..t.len()].copy_from_slice(t);
        m.r[..r.len()].copy_from_slice(r);
        m
    }

    pub fn xi_t(&self) -> u8 {
        self.t.iter().sum()
    }

    pub fn xi_r(&self) -> u8 {
        self.r.iter().sum()
    }

    pub fn rows(&self) -> ([u8; MAX_SIDE], [u8; MAX_SIDE]) {
        (self.t, self.r)
    }

    /// The first `width` columns of each row.
    pub fn narrow(&self) -> (Vec<u8>, Vec<u8>) {
        (self.t[..self.width].to_vec(), self.r[..self.width].to_vec())
    }

    pub fn add_translation(&mut self, col: usize, count: u8, gen: Generator) {
        self.t[col] += count;
        self.t_attr[col].get_or_insert(gen.axis());
        self.t_gens.push(Placed::new(col, gen));
    }

    pub fn add_rotation(&mut self, col: usize, a: AxisRef) {
        self.r[col] += 1;
        self.r_attr[col].get_or_insert(a);
        self.r_gens.push(Placed::new(col, Generator::About(a)));
    }

    pub fn set_owner(&mut self, leg: u8) {
        self.t_owner = if self.xi_t() > 0 { vec![leg] } else { Vec::new() };
        self.r_owner = if self.xi_r() > 0 { vec![leg] } else { Vec::new() };
    }

    pub fn translation_generators(&self) -> &[Placed] {
        &self.t_gens
    }

    pub fn rotation_generators(&self) -> &[Placed] {
        &self.r_gens
    }

    pub fn format_rows(&self, width: usize) -> String {
        let row = |v: &[u8; MAX_SIDE]| {
            v[..width].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        format!("[{}; {}]", row(&self.t), row(&self.r))
    }
}

impl fmt::Display for PocMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_rows(MAX_SIDE))
    }
}

/// Combine the per-segment matrices of one leg.
pub fn poc_or(parts: &[PocMatrix]) -> Result<PocMatrix, AlgebraError> {
    let width = parts.iter().map(|p| p.width).max().unwrap_or(0);
    let mut out = PocMatrix::zero(width);
    for p in parts {
        for col in 0..MAX_SIDE {
            for (row, dst, src, dattr, sattr) in [
                ('t', &mut out.t, &p.t, &mut out.t_attr, &p.t_attr),
                ('r', &mut out.r, &p.r, &mut out.r_attr, &p.r_attr),
            ] {
                if src[col] == 0 {
                    continue;
                }
                if dst[col] != 0 {
                    return Err(AlgebraError::OverlappingSupport { row, col: col + 1 });
                }
                dst[col] = src[col];
                dattr[col] = sattr[col];
            }
        }
        out.t_gens.extend(p.t_gens.iter().cloned());
        out.r_gens.extend(p.r_gens.iter().cloned());
        for o in p.t_owner.iter().chain(&p.r_owner) {
            if !out.t_owner.contains(o) {
                out.t_owner.push(*o);
            }
        }
    }
    out.r_owner = out.t_owner.clone();
    Ok(out)
}

fn fold_span<'a>(
    items: impl Iterator<Item = &'a Placed>,
    g: &RelationGraph,
) -> (DirectionDescriptor, Vec<(&'a Placed, u8)>) {
    let mut span = DirectionDescriptor::Empty;
    let mut steps = Vec::new();
    for p in items {
        let (next, _) = span.union(&p.gen.descriptor(g), g);
        steps.push((p, next.rank() - span.rank()));
        span = next;
    }
    (span, steps)
}

fn collapse(row: &mut [u8; MAX_SIDE], attr: &mut [Option<AxisRef>; MAX_SIDE]) {
    if row.iter().sum::<u8>() >= 3 {
        *row = [0; MAX_SIDE];
        row[0] = 3;
        *attr = [None; MAX_SIDE];
    }
}

/// Rewrite a leg matrix so that every entry counts an independent output.
///
/// Rotations about axes already represented (parallel, non-coaxial) become
/// translations normal to that axis; rotations beyond the span of the others
/// become generic translations; a row reaching three collapses to `[3 0 ...]`.
pub fn normalize(m: &PocMatrix, g: &RelationGraph) -> PocMatrix {
    let mut rot: Vec<Placed> = Vec::new();
    let mut trans: Vec<Placed> = m.t_gens.clone();
    for p in &m.r_gens {
        let Generator::About(a) = p.gen else {
            rot.push(p.clone());
            continue;
        };
        let mut duplicate = false;
        let mut parallel = false;
        for k in &rot {
            let Generator::About(b) = k.gen else { continue };
            if g.coaxial(a, b).unwrap_or(false) {
                duplicate = true;
                break;
            }
            if g.class_of(a).ok() == g.class_of(b).ok() {
                parallel = true;
            }
        }
        if duplicate {
            continue;
        }
        if parallel {
            trans.push(Placed::new(p.col, Generator::NormalLine(a, 1)));
        } else {
            rot.push(p.clone());
        }
    }

    let (_, steps) = fold_span(rot.iter(), g);
    let mut kept = Vec::new();
    for (p, gain) in steps {
        if gain > 0 {
            kept.push(p.clone());
        } else {
            trans.push(Placed::new(p.col, Generator::Free(p.gen.axis(), 2)));
        }
    }
    trans.sort_by_key(|p| p.col);

    let mut out = PocMatrix::zero(m.width);
    out.t_owner = m.t_owner.clone();
    out.r_owner = m.r_owner.clone();
    let (_, tsteps) = fold_span(trans.iter(), g);
    for (p, gain) in tsteps {
        if gain > 0 {
            out.t[p.col] += gain;
            out.t_attr[p.col].get_or_insert(p.gen.axis());
        }
    }
    let (_, rsteps) = fold_span(kept.iter(), g);
    for (p, gain) in rsteps {
        out.r[p.col] += gain;
        out.r_attr[p.col].get_or_insert(p.gen.axis());
    }
    collapse(&mut out.t, &mut out.t_attr);
    collapse(&mut out.r, &mut out.r_attr);
    out.t_gens = trans;
    out.r_gens = kept;
    out
}

pub fn translation_view(m: &PocMatrix, g: &RelationGraph) -> DirectionDescriptor {
    fold_span(m.t_gens.iter(), g).0
}

pub fn rotation_view(m: &PocMatrix, g: &RelationGraph) -> DirectionDescriptor {
    fold_span(m.r_gens.iter(), g).0
}

fn check(j: bool, policy: RelationPolicy, what: &str, a: &DirectionDescriptor, b: &DirectionDescriptor, g: &RelationGraph) -> Result<(), AlgebraError> {
    if j && policy == RelationPolicy::Strict {
        return Err(AlgebraError::IndeterminateRelation(format!(
            "{what} of {} and {} depends on unrelated axes",
            a.label(g),
            b.label(g)
        )));
    }
    Ok(())
}

pub fn intersect_translation(
    a: &DirectionDescriptor,
    b: &DirectionDescriptor,
    g: &RelationGraph,
    policy: RelationPolicy,
) -> Result<DirectionDescriptor, AlgebraError> {
    let (d, _, assumed) = a.intersect(b, g);
    check(assumed, policy, "translation intersection", a, b, g)?;
    Ok(d)
}

pub fn intersect_rotation(
    a: &DirectionDescriptor,
    b: &DirectionDescriptor,
    g: &RelationGraph,
    policy: RelationPolicy,
) -> Result<DirectionDescriptor, AlgebraError> {
    let (d, _, assumed) = a.intersect(b, g);
    check(assumed, policy, "rotation intersection", a, b, g)?;
    Ok(d)
}

pub fn union_translation_dim(
    a: &DirectionDescriptor,
    b: &DirectionDescriptor,
    g: &RelationGraph,
    policy: RelationPolicy,
) -> Result<u8, AlgebraError> {
    let (d, assumed) = a.union(b, g);
    check(assumed, policy, "translation union", a, b, g)?;
    Ok(d.rank())
}

pub fn union_rotation_dim(
    a: &DirectionDescriptor,
    b: &DirectionDescriptor,
    g: &RelationGraph,
    policy: RelationPolicy,
) -> Result<u8, AlgebraError> {
    let (d, assumed) = a.union(b, g);
    check(assumed, policy, "rotation union", a, b, g)?;
    Ok(d.rank())
}

/// Number of independent displacement equations of one loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopRank {
    pub xi_t: u8,
    pub xi_r: u8,
    pub xi: u8,
}

impl LoopRank {
    pub fn new(xi_t: u8, xi_r: u8) -> Self {
        Self {
            xi_t,
            xi_r,
            xi: xi_t + xi_r,
        }
    }
}

pub fn loop_rank(
    sub: &PocMatrix,
    next: &PocMatrix,
    g: &RelationGraph,
    policy: RelationPolicy,
) -> Result<LoopRank, AlgebraError> {
    let xi_t = union_translation_dim(&translation_view(sub, g), &translation_view(next, g), g, policy)?;
    let xi_r = union_rotation_dim(&rotation_view(sub, g), &rotation_view(next, g), g, policy)?;
    let (dr, _, _) = rotation_view(sub, g).intersect(&rotation_view(next, g), g);
    // The offset between the two axes becomes one more translational constraint.
    let offset = offset_rotation(sub, next, &dr, g, policy)?.is_some() as u8;
    Ok(LoopRank::new(xi_t + offset, xi_r))
}

fn located_axes(m: &PocMatrix, d: &Direction, g: &RelationGraph) -> Vec<AxisRef> {
    m.r_gens
        .iter()
        .filter_map(|p| match p.gen {
            Generator::About(a) if Direction::axis(g, a).parallel(d, g).holds => Some(a),
            _ => None,
        })
        .collect()
}

/// A rotation shared in direction only: both branches turn about parallel
/// axes that are not coaxial, and the two translation rows together cannot
/// absorb the offset between those axes. Returns the lost direction.
fn offset_rotation(
    left: &PocMatrix,
    right: &PocMatrix,
    shared: &DirectionDescriptor,
    g: &RelationGraph,
    policy: RelationPolicy,
) -> Result<Option<Direction>, AlgebraError> {
    let DirectionDescriptor::Line(d) = shared else {
        return Ok(None);
    };
    let (la, ra) = (located_axes(left, d, g), located_axes(right, d, g));
    if la.is_empty() || ra.is_empty() {
        return Ok(None);
    }
    for a in &la {
        for b in &ra {
            if g.coaxial(*a, *b).unwrap_or(false) {
                return Ok(None);
            }
        }
    }
    let (u, _) = translation_view(left, g).union(&translation_view(right, g), g);
    let normal = DirectionDescriptor::Plane(d.clone());
    let (covered, _, _) = normal.intersect(&u, g);
    match covered.rank() {
        2 => Ok(None),
        // The offset could still fall on that one line in special position.
        1 => {
            check(true, policy, "axis offset", &normal, &u, g)?;
            Ok(Some(d.clone()))
        }
        _ => Ok(Some(d.clone())),
    }
}

struct Row<'a> {
    values: &'a [u8; MAX_SIDE],
    attr: &'a [Option<AxisRef>; MAX_SIDE],
    owner: &'a [u8],
    gens: &'a [Placed],
}

fn row_of(m: &PocMatrix, translation: bool) -> Row<'_> {
    if translation {
        Row { values: &m.t, attr: &m.t_attr, owner: &m.t_owner, gens: &m.t_gens }
    } else {
        Row { values: &m.r, attr: &m.r_attr, owner: &m.r_owner, gens: &m.r_gens }
    }
}

fn combine_row(
    d: &DirectionDescriptor,
    src: Source,
    left: Row<'_>,
    right: Row<'_>,
) -> ([u8; MAX_SIDE], [Option<AxisRef>; MAX_SIDE], Vec<u8>, Vec<Placed>) {
    let copy = |r: &Row<'_>| (*r.values, *r.attr, r.owner.to_vec(), r.gens.to_vec());
    match src {
        Source::Left => copy(&left),
        Source::Right => copy(&right),
        Source::Neither => ([0; MAX_SIDE], [None; MAX_SIDE], Vec::new(), Vec::new()),
        Source::Both => {
            let axis = right
                .gens
                .first()
                .or(left.gens.first())
                .map(|p| p.gen.axis())
                .expect("a derived direction comes from nonempty operands");
            let mut values = [0; MAX_SIDE];
            values[0] = d.rank();
            let mut attr = [None; MAX_SIDE];
            if d.rank() < 3 {
                attr[0] = Some(axis);
            }
            let mut owner: Vec<u8> = left.owner.iter().chain(right.owner).copied().collect();
            owner.sort_unstable();
            owner.dedup();
            (values, attr, owner, vec![Placed::new(0, Generator::Given(d.clone(), axis))])
        }
    }
}

/// Output of the sub-mechanism formed by two parallel branches.
pub fn intersect_poc(
    left: &PocMatrix,
    right: &PocMatrix,
    g: &RelationGraph,
    policy: RelationPolicy,
) -> Result<PocMatrix, AlgebraError> {
    let (lt, rt) = (translation_view(left, g), translation_view(right, g));
    let (lr, rr) = (rotation_view(left, g), rotation_view(right, g));
    let (dt, st, at) = lt.intersect(&rt, g);
    check(at, policy, "translation intersection", &lt, &rt, g)?;
    let (mut dr, mut sr, ar) = lr.intersect(&rr, g);
    check(ar, policy, "rotation intersection", &lr, &rr, g)?;
    if offset_rotation(left, right, &dr, g, policy)?.is_some() {
        (dr, sr) = (DirectionDescriptor::Empty, Source::Neither);
    }

    let mut out = PocMatrix::zero(MAX_SIDE);
    (out.t, out.t_attr, out.t_owner, out.t_gens) = combine_row(&dt, st, row_of(left, true), row_of(right, true));
    (out.r, out.r_attr, out.r_owner, out.r_gens) = combine_row(&dr, sr, row_of(left, false), row_of(right, false));
    Ok(out)
}

/// Judgement of two descriptors being the same subspace, for tests.
pub fn same_subspace(a: &DirectionDescriptor, b: &DirectionDescriptor, g: &RelationGraph) -> Judgement {
    use DirectionDescriptor::*;
    match (a, b) {
        (Empty, Empty) | (Full, Full) => Judgement::YES,
        (Line(x), Line(y)) | (Plane(x), Plane(y)) => x.parallel(y, g),
        _ => Judgement::NO,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::RelationGraph;
    use crate::topology::{JointKind::*, RelationCode::*};

    fn a(j: u8) -> AxisRef {
        AxisRef::new(1, j)
    }

    #[test]
    fn or_of_disjoint_parts() {
        let x = PocMatrix::from_rows(&[0, 2, 0, 0, 0], &[0, 1, 0, 0, 0]);
        let y = PocMatrix::from_rows(&[0, 0, 0, 1, 0], &[0, 0, 0, 1, 0]);
        let z = poc_or(&[x.clone(), y]).unwrap();
        assert_eq!(z.narrow(), (vec![0, 2, 0, 1, 0], vec![0, 1, 0, 1, 0]));
        assert_eq!(poc_or(&[x.clone(), PocMatrix::zero(5)]).unwrap().rows(), x.rows());
        let rrc = PocMatrix::from_rows(&[2, 0, 0, 0], &[1, 0, 0, 0]);
        let p = PocMatrix::from_rows(&[0, 0, 0, 1], &[0, 0, 0, 0]);
        assert_eq!(poc_or(&[rrc, p]).unwrap().narrow(), (vec![2, 0, 0, 1], vec![1, 0, 0, 0]));
    }

    #[test]
    fn or_rejects_overlap() {
        let x = PocMatrix::from_rows(&[1, 0], &[1, 0]);
        assert_eq!(
            poc_or(&[x.clone(), x]),
            Err(AlgebraError::OverlappingSupport { row: 't', col: 1 })
        );
    }

    fn orthogonal_triple() -> RelationGraph {
        let nodes: Vec<_> = (1..=4).map(|j| (a(j), Revolute)).collect();
        let seeds = [
            (a(1), a(2), Perpendicular),
            (a(1), a(3), Perpendicular),
            (a(2), a(3), Perpendicular),
            (a(1), a(4), Parallel),
        ];
        RelationGraph::from_seeds(&nodes, &seeds).unwrap()
    }

    #[test]
    fn parallel_rotation_becomes_translation() {
        let g = orthogonal_triple();
        let mut m = PocMatrix::zero(4);
        m.add_rotation(0, a(1));
        m.add_rotation(1, a(2));
        m.add_rotation(3, a(4));
        let n = normalize(&m, &g);
        assert_eq!(n.narrow(), (vec![0, 0, 0, 1], vec![1, 1, 0, 0]));
        assert_eq!(normalize(&n, &g), n);
    }

    #[test]
    fn rotation_overflow_adds_generic_translation() {
        let g = orthogonal_triple();
        let mut m = PocMatrix::zero(4);
        for j in 1..=3 {
            m.add_rotation(j - 1, a(j as u8));
        }
        m.add_translation(0, 2, Generator::NormalPlane(a(1)));
        let n = normalize(&m, &g);
        assert_eq!(n.rows().1[0], 3);
        assert_eq!(n.xi_t(), 2);
        let mut m2 = m.clone();
        m2.add_rotation(3, a(4));
        // R4 is parallel to R1: its translation already lies in the plane.
        let n2 = normalize(&m2, &g);
        assert_eq!((n2.xi_t(), n2.xi_r()), (2, 3));

        let nodes: Vec<_> = (1..=5).map(|j| (a(j), Revolute)).collect();
        let g5 = RelationGraph::from_seeds(
            &nodes,
            &[(a(1), a(2), Perpendicular), (a(1), a(3), Perpendicular), (a(2), a(3), Perpendicular)],
        )
        .unwrap();
        let mut m3 = m.clone();
        m3.width = 5;
        m3.add_rotation(4, a(5));
        let n3 = normalize(&m3, &g5);
        assert_eq!(n3.rows(), ([3, 0, 0, 0, 0, 0], [3, 0, 0, 0, 0, 0]));
        assert_eq!(normalize(&n3, &g5), n3);
    }

    #[test]
    fn full_matrix_is_a_fixed_point() {
        let g = orthogonal_triple();
        let mut m = PocMatrix::zero(6);
        m.add_translation(0, 2, Generator::NormalPlane(a(1)));
        m.add_translation(1, 1, Generator::Along(a(1)));
        for j in 1..=3 {
            m.add_rotation(j - 1, a(j as u8));
        }
        let n = normalize(&m, &g);
        assert_eq!(n.rows(), ([3, 0, 0, 0, 0, 0], [3, 0, 0, 0, 0, 0]));
        assert_eq!(normalize(&n, &g), n);
    }

    #[test]
    fn intersection_keeps_the_newer_leg_on_ties() {
        let g = orthogonal_triple();
        let mut l = PocMatrix::zero(3);
        l.add_translation(0, 2, Generator::NormalPlane(a(1)));
        l.add_rotation(0, a(1));
        l.set_owner(1);
        let mut r = PocMatrix::zero(3);
        r.add_translation(0, 2, Generator::NormalPlane(a(2)));
        r.add_rotation(0, a(4));
        r.set_owner(2);
        let s = intersect_poc(&l, &r, &g, RelationPolicy::GeneralPosition).unwrap();
        assert_eq!(translation_view(&s, &g), DirectionDescriptor::Line(Direction::axis(&g, a(3))));
        assert_eq!(s.t_owner, vec![1, 2]);
        assert_eq!(s.r_owner, vec![2]);
        assert_eq!(s.r_attr[0], Some(a(4)));
        let lr = loop_rank(&l, &r, &g, RelationPolicy::Strict).unwrap();
        assert_eq!(lr, LoopRank::new(3, 1));
    }

    #[test]
    fn strict_policy_reports_unrelated_axes() {
        let nodes = [(a(1), Revolute), (a(2), Revolute)];
        let g = RelationGraph::from_seeds(&nodes, &[]).unwrap();
        let x = DirectionDescriptor::Line(Direction::axis(&g, a(1)));
        let y = DirectionDescriptor::Line(Direction::axis(&g, a(2)));
        assert_eq!(union_rotation_dim(&x, &y, &g, RelationPolicy::GeneralPosition), Ok(2));
        assert!(matches!(
            union_rotation_dim(&x, &y, &g, RelationPolicy::Strict),
            Err(AlgebraError::IndeterminateRelation(_))
        ));
        assert_eq!(intersect_rotation(&x, &x, &g, RelationPolicy::Strict), Ok(x.clone()));
    }
}
