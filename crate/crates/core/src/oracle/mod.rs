//! Numeric check of the symbolic analysis with random joint geometry.
//!
//! Each joint gets a direction and a point consistent with the relation
//! graph; legs become twist spaces (`(w, p x w)` for revolutes, `(0, d)` for
//! prismatic joints), and loops are folded exactly as in the symbolic
//! procedure, with numeric subspace sums and intersections.

pub mod linalg;
pub mod sampler;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Vector3};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mobility::MobilityReport;
use crate::relation::{AxisRef, ClassId, RelationGraph};
use crate::topology::{JointKind, LegTopology, MechanismTopology, RelationCode};

pub use linalg::Subspace;
pub use sampler::DirectionSampler;

/// Residual allowed on every instantiated relation.
pub const GEOM_TOL: f64 = 1e-9;
/// Fresh geometries tried when a rank is numerically ambiguous.
pub const RESAMPLES: u64 = 5;
pub const DEFAULT_SEED: u64 = 0x5eed_2017;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("unsatisfiable geometry for seed {seed}: {detail}")]
    Unsatisfiable { seed: u64, detail: String },
    #[error("near-singular geometry persisted after {0} resamples")]
    RankTolerance(u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointAxis {
    pub dir: Vector3<f64>,
    pub point: Vector3<f64>,
}

#[derive(Clone, Debug)]
pub struct GeometricInstance {
    pub seed: u64,
    pub axes: BTreeMap<AxisRef, JointAxis>,
}

impl GeometricInstance {
    pub fn axis(&self, a: AxisRef) -> &JointAxis {
        &self.axes[&a]
    }
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.2 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Component of `v` orthogonal to every vector in `against`.
pub fn project_out(v: Vector3<f64>, against: &[Vector3<f64>]) -> Vector3<f64> {
    let mut ortho: Vec<Vector3<f64>> = Vec::new();
    for a in against {
        let mut w = *a;
        for o in &ortho {
            w -= o * o.dot(&w);
        }
        if w.norm() > 1e-6 {
            ortho.push(w.normalize());
        }
    }
    let mut out = v;
    for o in &ortho {
        out -= o * o.dot(&out);
    }
    out
}

fn class_directions(g: &RelationGraph, rng: &mut ChaCha8Rng) -> Option<BTreeMap<ClassId, Vector3<f64>>> {
    let classes = g.classes();
    let pairs = g.perpendicular_pairs();
    let neighbours = |c: ClassId| -> Vec<ClassId> {
        pairs
            .iter()
            .filter_map(|&(a, b)| if a == c { Some(b) } else if b == c { Some(a) } else { None })
            .collect()
    };
    let mut order = classes.clone();
    order.sort_by_key(|c| std::cmp::Reverse(neighbours(*c).len()));
    for attempt in 0..20 {
        if attempt > 0 {
            order.shuffle(rng);
        }
        let mut dirs: BTreeMap<ClassId, Vector3<f64>> = BTreeMap::new();
        let mut ok = true;
        for &c in &order {
            let fixed: Vec<Vector3<f64>> = neighbours(c).iter().filter_map(|n| dirs.get(n).copied()).collect();
            let mut placed = None;
            for _ in 0..8 {
                let v = project_out(random_unit(rng), &fixed);
                if v.norm() > 1e-3 {
                    placed = Some(v.normalize());
                    break;
                }
            }
            match placed {
                Some(v) => {
                    dirs.insert(c, v);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Some(dirs);
        }
    }
    None
}

fn random_point(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    Vector3::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
}

/// Connected groups of axes joined by the given seeded codes.
fn groups(g: &RelationGraph, codes: &[RelationCode]) -> Vec<Vec<AxisRef>> {
    let mut out: Vec<Vec<AxisRef>> = Vec::new();
    for (a, b, code) in g.seeded_pairs() {
        if !codes.contains(&code) || g.class_of(a).ok() == g.class_of(b).ok() {
            continue;
        }
        let ia = out.iter().position(|grp| grp.contains(&a));
        let ib = out.iter().position(|grp| grp.contains(&b));
        match (ia, ib) {
            (Some(i), Some(j)) if i != j => {
                let moved = out.remove(i.max(j));
                out[i.min(j)].extend(moved);
            }
            (Some(_), Some(_)) => {}
            (Some(i), None) => out[i].push(b),
            (None, Some(j)) => out[j].push(a),
            (None, None) => out.push(vec![a, b]),
        }
    }
    out
}

pub fn instantiate_geometry(
    mech: &MechanismTopology,
    g: &RelationGraph,
    seed: u64,
) -> Result<GeometricInstance, OracleError> {
    let _ = mech;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = class_directions(g, &mut rng).ok_or_else(|| OracleError::Unsatisfiable {
        seed,
        detail: "perpendicular constraints leave no direction".into(),
    })?;
    let mut axes = BTreeMap::new();
    for &a in g.nodes() {
        let c = g.class_of(a).expect("node of the graph");
        axes.insert(
            a,
            JointAxis {
                dir: dirs[&c],
                point: random_point(&mut rng),
            },
        );
    }
    for grp in groups(g, &[RelationCode::CommonPoint, RelationCode::Coplanar]) {
        let p = random_point(&mut rng);
        for a in grp {
            axes.get_mut(&a).expect("node").point = p;
        }
    }
    // Coaxial axes share the line of their first member.
    let nodes = g.nodes().to_vec();
    for (i, &a) in nodes.iter().enumerate() {
        if let Some(&b) = nodes[..i].iter().find(|&&b| g.coaxial(a, b).unwrap_or(false)) {
            let p = axes[&b].point;
            axes.get_mut(&a).expect("node").point = p;
        }
    }
    let inst = GeometricInstance { seed, axes };
    let worst = residuals(g, &inst);
    if let Some((label, r)) = worst.into_iter().find(|(_, r)| *r > GEOM_TOL) {
        return Err(OracleError::Unsatisfiable {
            seed,
            detail: format!("{label} residual {r:e}"),
        });
    }
    Ok(inst)
}

/// Residual of every derivable or seeded relation, labelled by axis pair.
pub fn residuals(g: &RelationGraph, inst: &GeometricInstance) -> Vec<(String, f64)> {
    let nodes = g.nodes();
    let mut out = Vec::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            let (x, y) = (inst.axis(a), inst.axis(b));
            let cross = x.dir.cross(&y.dir);
            let offset = y.point - x.point;
            let label = format!("{} {} {}", g.label(a), g.relation_between(a, b).expect("nodes"), g.label(b));
            let r = match g.relation_between(a, b).expect("nodes") {
                RelationCode::Parallel => cross.norm(),
                RelationCode::Perpendicular => x.dir.dot(&y.dir).abs(),
                RelationCode::Coaxial => cross.norm().max(offset.cross(&x.dir).norm()),
                RelationCode::CommonPoint | RelationCode::Coplanar => offset.dot(&cross).abs(),
                RelationCode::Arbitrary => 0.0,
            };
            out.push((label, r));
        }
    }
    out
}

/// Stacked joint twists of a leg.
#[derive(Clone, Debug)]
pub struct TwistBasis {
    pub twists: DMatrix<f64>,
    pub space: Subspace,
    pub singular_values: Vec<f64>,
}

impl TwistBasis {
    pub fn rank(&self) -> usize {
        self.space.dim()
    }
}

pub fn joint_twist(kind: JointKind, axis: &JointAxis) -> [f64; 6] {
    let (w, v) = match kind {
        JointKind::Revolute => (axis.dir, axis.point.cross(&axis.dir)),
        JointKind::Prismatic => (Vector3::zeros(), axis.dir),
    };
    [w.x, w.y, w.z, v.x, v.y, v.z]
}

pub fn leg_twist_space(leg: &LegTopology, inst: &GeometricInstance) -> TwistBasis {
    let f = leg.joint_count();
    let mut twists = DMatrix::zeros(6, f);
    for (j, kind) in leg.joints.iter().enumerate() {
        let t = joint_twist(*kind, inst.axis(AxisRef::new(leg.label, j as u8 + 1)));
        for (i, v) in t.iter().enumerate() {
            twists[(i, j)] = *v;
        }
    }
    let singular_values = twists.singular_values().iter().copied().collect();
    TwistBasis {
        space: linalg::span(&twists),
        twists,
        singular_values,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericResult {
    pub seed: u64,
    pub loops: Vec<usize>,
    pub platform_dim: usize,
    pub xi_t: usize,
    pub xi_r: usize,
    pub near_singular: bool,
}

pub fn numeric_loop_and_platform(mech: &MechanismTopology, inst: &GeometricInstance) -> NumericResult {
    let spaces: Vec<Subspace> = mech.legs.iter().map(|l| leg_twist_space(l, inst).space).collect();
    let mut sub = spaces[0].clone();
    let mut loops = Vec::new();
    let mut near = sub.near_singular;
    for next in &spaces[1..] {
        let u = linalg::union(&sub, next);
        near |= u.near_singular;
        loops.push(u.dim());
        sub = linalg::intersect(&sub, next);
        near |= sub.near_singular;
    }
    let (xi_r, flag) = linalg::leading_rank(&sub, 3);
    NumericResult {
        seed: inst.seed,
        loops,
        platform_dim: sub.dim(),
        xi_t: sub.dim() - xi_r,
        xi_r,
        near_singular: near || flag,
    }
}

/// Numeric result for one seed, resampling near-singular geometry.
pub fn evaluate_seed(mech: &MechanismTopology, g: &RelationGraph, seed: u64) -> Result<NumericResult, OracleError> {
    for attempt in 0..=RESAMPLES {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let inst = instantiate_geometry(mech, g, s)?;
        let r = numeric_loop_and_platform(mech, &inst);
        if !r.near_singular {
            return Ok(r);
        }
    }
    Err(OracleError::RankTolerance(RESAMPLES))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree,
    Disagree(String),
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct SeedOutcome {
    pub seed: u64,
    pub verdict: Verdict,
    pub numeric: Option<NumericResult>,
}

#[derive(Clone, Debug)]
pub struct Agreement {
    pub outcomes: Vec<SeedOutcome>,
}

impl Agreement {
    pub fn agreed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.verdict == Verdict::Agree).count()
    }

    pub fn total(&self) -> usize {
        self.outcomes.len()
    }

    pub fn all_agree(&self) -> bool {
        self.agreed() == self.total()
    }

    pub fn first_problem(&self) -> Option<&SeedOutcome> {
        self.outcomes.iter().find(|o| o.verdict != Verdict::Agree)
    }
}

pub fn compare(report: &MobilityReport, mech: &MechanismTopology, n: &NumericResult) -> Verdict {
    let symbolic: Vec<usize> = report.loops.iter().map(|l| l.xi as usize).collect();
    let numeric_dof = mech.total_joint_dof() as i64 - n.loops.iter().sum::<usize>() as i64;
    let mut problems = Vec::new();
    if symbolic != n.loops {
        problems.push(format!("loop ranks {:?} vs numeric {:?}", symbolic, n.loops));
    }
    if (report.xi_t() as usize, report.xi_r() as usize) != (n.xi_t, n.xi_r) {
        problems.push(format!(
            "output {} vs numeric {}T{}R",
            report.classification, n.xi_t, n.xi_r
        ));
    }
    if numeric_dof != report.dof as i64 {
        problems.push(format!("DOF {} vs numeric {}", report.dof, numeric_dof));
    }
    if n.platform_dim as i64 != report.dof.max(0) as i64 {
        problems.push(format!("platform dimension {} vs DOF {}", n.platform_dim, report.dof));
    }
    if problems.is_empty() {
        Verdict::Agree
    } else {
        Verdict::Disagree(problems.join("; "))
    }
}

pub fn seed_list(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}

fn outcome(report: &MobilityReport, mech: &MechanismTopology, g: &RelationGraph, seed: u64) -> SeedOutcome {
    match evaluate_seed(mech, g, seed) {
        Ok(n) => SeedOutcome {
            seed,
            verdict: compare(report, mech, &n),
            numeric: Some(n),
        },
        Err(e) => SeedOutcome {
            seed,
            verdict: Verdict::Failed(e.to_string()),
            numeric: None,
        },
    }
}

/// Compare the report with the oracle over `seeds`, one task per seed.
pub fn check_agreement(
    report: &MobilityReport,
    mech: &MechanismTopology,
    g: &RelationGraph,
    seeds: &[u64],
) -> Agreement {
    Agreement {
        outcomes: crate::par::map(seeds, |&s| outcome(report, mech, g, s)),
    }
}

/// Same as [`check_agreement`], always on the calling thread.
pub fn check_agreement_sequential(
    report: &MobilityReport,
    mech: &MechanismTopology,
    g: &RelationGraph,
    seeds: &[u64],
) -> Agreement {
    Agreement {
        outcomes: crate::par::map_sequential(seeds, |&s| outcome(report, mech, g, s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::build_leg_graph;
    use crate::topology::decode_leg;

    fn leg(m: &[&[u8]]) -> LegTopology {
        decode_leg(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn single(l: LegTopology) -> MechanismTopology {
        MechanismTopology::with_arbitrary_platforms("leg", vec![l])
    }

    #[test]
    fn rrc_axes_share_direction() {
        let l = leg(&[&[8, 1, 1, 1], &[1, 8, 1, 1], &[1, 1, 8, 1], &[1, 1, 1, 9]]);
        let g = build_leg_graph(&l).unwrap();
        let inst = instantiate_geometry(&single(l.clone()), &g, 7).unwrap();
        let d = inst.axis(AxisRef::new(1, 1)).dir;
        for j in 2..=4 {
            assert!(d.cross(&inst.axis(AxisRef::new(1, j)).dir).norm() < 1e-12);
        }
        assert_eq!(leg_twist_space(&l, &inst).rank(), 4);
    }

    #[test]
    fn prrrr_has_two_orthogonal_classes() {
        let l = leg(&[&[9, 2, 2, 1, 1], &[2, 8, 1, 2, 2], &[2, 1, 8, 2, 2], &[1, 2, 2, 8, 1], &[1, 2, 2, 1, 8]]);
        let g = build_leg_graph(&l).unwrap();
        let inst = instantiate_geometry(&single(l), &g, 3).unwrap();
        let (p, r2) = (inst.axis(AxisRef::new(1, 1)).dir, inst.axis(AxisRef::new(1, 2)).dir);
        assert!(p.dot(&r2).abs() < GEOM_TOL);
        assert!(residuals(&g, &inst).iter().all(|(_, r)| *r <= GEOM_TOL));
    }

    #[test]
    fn instances_are_deterministic() {
        let l = leg(&[&[8, 2, 2], &[2, 8, 2], &[2, 2, 9]]);
        let g = build_leg_graph(&l).unwrap();
        let m = single(l);
        let a = instantiate_geometry(&m, &g, 11).unwrap();
        let b = instantiate_geometry(&m, &g, 11).unwrap();
        assert_eq!(a.axes, b.axes);
    }

    #[test]
    fn leg_ranks() {
        let ups = leg(&[
            &[8, 2, 0, 0, 0, 0],
            &[2, 8, 0, 0, 0, 0],
            &[0, 0, 9, 0, 0, 0],
            &[0, 0, 0, 8, 2, 2],
            &[0, 0, 0, 2, 8, 2],
            &[0, 0, 0, 2, 2, 8],
        ]);
        let up = leg(&[&[8, 2, 2], &[2, 8, 2], &[2, 2, 9]]);
        for (l, rank) in [(ups, 6), (up, 3), (leg(&[&[8]]), 1)] {
            let g = build_leg_graph(&l).unwrap();
            let m = single(l.clone());
            let inst = instantiate_geometry(&m, &g, 5).unwrap();
            assert_eq!(leg_twist_space(&l, &inst).rank(), rank);
            let n = numeric_loop_and_platform(&m, &inst);
            assert!(n.loops.is_empty());
            assert_eq!(n.platform_dim, rank);
        }
    }
}
