//! Degree of freedom and output characteristics of a whole mechanism.

use thiserror::Error;

use crate::algebra::{
    intersect_poc, loop_rank, rotation_view, translation_view, AlgebraError, LoopRank, PocMatrix,
    RelationPolicy,
};
use crate::leg::{analyze_leg, LegError, LegPoc};
use crate::relation::{build_relation_graph, AxisRef, RelationError, RelationGraph};
use crate::topology::{validate_mechanism, MechanismTopology, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("invalid mechanism: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("leg {leg}: {source}")]
    Leg { leg: u8, source: LegError },
    #[error("step {step}: {source}")]
    Step { step: u8, source: AlgebraError },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub step: u8,
    pub text: String,
}

#[derive(Clone, Debug)]
pub struct MobilityReport {
    pub name: String,
    pub dof: i32,
    pub total_joint_dof: u32,
    pub loops: Vec<LoopRank>,
    pub legs: Vec<LegPoc>,
    /// Sub-mechanism after each fold; the last one is the final output.
    pub sub_pms: Vec<PocMatrix>,
    pub poc: PocMatrix,
    /// Joint labels of the translation and rotation cells, one per nonzero cell.
    pub t_axes: Vec<String>,
    pub r_axes: Vec<String>,
    pub classification: String,
    pub trace: Vec<TraceStep>,
}

impl MobilityReport {
    pub fn rigid(&self) -> bool {
        self.dof <= 0
    }

    pub fn loop_sum(&self) -> u32 {
        self.loops.iter().map(|l| l.xi as u32).sum()
    }

    pub fn xi_t(&self) -> u8 {
        self.poc.xi_t()
    }

    pub fn xi_r(&self) -> u8 {
        self.poc.xi_r()
    }
}

pub fn classify(poc: &PocMatrix) -> String {
    format!("{}T{}R", poc.xi_t(), poc.xi_r())
}

fn cell_labels(row: &[u8], attr: &[Option<AxisRef>], g: &RelationGraph) -> Vec<String> {
    row.iter()
        .zip(attr)
        .filter(|(v, _)| **v > 0)
        .filter_map(|(_, a)| a.map(|a| g.label(a)))
        .collect()
}

fn describe(m: &PocMatrix, g: &RelationGraph) -> String {
    format!(
        "{}  G: {}  H: {}",
        m,
        translation_view(m, g).label(g),
        rotation_view(m, g).label(g)
    )
}

fn owners(o: &[u8]) -> String {
    if o.is_empty() {
        return "-".into();
    }
    o.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn analyze_mechanism(mech: &MechanismTopology, policy: RelationPolicy) -> Result<MobilityReport, AnalysisError> {
    let violations = validate_mechanism(mech);
    if !violations.is_empty() {
        return Err(AnalysisError::Invalid(violations));
    }
    let g = build_relation_graph(mech)?;
    analyze_with_graph(mech, &g, policy)
}

/// The fold over legs in input order, given a prepared relation graph.
pub fn analyze_with_graph(
    mech: &MechanismTopology,
    g: &RelationGraph,
    policy: RelationPolicy,
) -> Result<MobilityReport, AnalysisError> {
    let mut trace = Vec::new();
    let mut note = |step: u8, text: String| trace.push(TraceStep { step, text });

    note(1, format!("legs = {}", mech.leg_count()));
    for leg in &mech.legs {
        note(1, format!("L{} = {}", leg.label, leg.chain_notation()));
    }

    let mut legs = Vec::new();
    for leg in &mech.legs {
        let p = analyze_leg(leg, g).map_err(|source| AnalysisError::Leg { leg: leg.label, source })?;
        let segs: Vec<String> = p.segmentation.segments.iter().map(|s| s.to_string()).collect();
        note(2, format!("L{}: {}", leg.label, segs.join(", ")));
        note(
            2,
            format!("M_L{} = {}  ({})", leg.label, describe(&p.matrix, g), classify(&p.matrix)),
        );
        legs.push(p);
    }

    let total = mech.total_joint_dof();
    let fs: Vec<String> = mech.legs.iter().map(|l| l.joint_count().to_string()).collect();
    note(3, format!("sum f = {} = {}", fs.join("+"), total));

    let mut loops = Vec::new();
    let mut sub_pms = Vec::new();
    let mut sub = legs[0].matrix.clone();
    for j in 1..legs.len() {
        let next = &legs[j].matrix;
        let loop_step = if j == 1 { 4 } else { 7 };
        let lr = loop_rank(&sub, next, g, policy).map_err(|source| AnalysisError::Step { step: loop_step, source })?;
        note(
            loop_step,
            format!("SLC{}: xi_t = {}, xi_r = {}, xi = {}", j, lr.xi_t, lr.xi_r, lr.xi),
        );
        loops.push(lr);

        let sub_step = if j == 1 { 5 } else { 6 };
        sub = intersect_poc(&sub, next, g, policy).map_err(|source| AnalysisError::Step { step: sub_step, source })?;
        note(
            sub_step,
            format!(
                "P(1-{}) = {}  owners t: {} r: {}",
                j + 1,
                describe(&sub, g),
                owners(&sub.t_owner),
                owners(&sub.r_owner)
            ),
        );
        sub_pms.push(sub.clone());
    }

    let loop_sum: u32 = loops.iter().map(|l| l.xi as u32).sum();
    let dof = total as i32 - loop_sum as i32;
    let xs: Vec<String> = loops.iter().map(|l| l.xi.to_string()).collect();
    note(8, format!("F = {} - ({}) = {}", total, xs.join("+"), dof));

    let classification = classify(&sub);
    note(9, format!("M_pa = {}  ({})", describe(&sub, g), classification));

    Ok(MobilityReport {
        name: mech.name.clone(),
        dof,
        total_joint_dof: total,
        loops,
        t_axes: cell_labels(&sub.t, &sub.t_attr, g),
        r_axes: cell_labels(&sub.r, &sub.r_attr, g),
        legs,
        sub_pms,
        poc: sub,
        classification,
        trace,
    })
}

/// Analyze many mechanisms, in parallel when enabled.
pub fn analyze_batch(
    mechs: &[MechanismTopology],
    policy: RelationPolicy,
) -> Vec<Result<MobilityReport, AnalysisError>> {
    crate::par::map(mechs, |m| analyze_mechanism(m, policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{JointKind::*, LegTopology, PlatformRelations, PlatformSide, RelationCode::*};

    #[test]
    fn coaxial_single_revolutes() {
        let legs = vec![
            LegTopology::with_pairs(1, &[Revolute], &[]),
            LegTopology::with_pairs(2, &[Revolute], &[]),
        ];
        let mut mech = MechanismTopology::with_arbitrary_platforms("2r", legs);
        mech.fixed.relations.set(0, 1, Coaxial);
        let r = analyze_mechanism(&mech, RelationPolicy::Strict).unwrap();
        assert_eq!((r.dof, r.total_joint_dof, r.loops[0].xi), (1, 2, 1));
        assert_eq!(r.classification, "0T1R");
    }

    #[test]
    fn single_leg_is_rejected() {
        let mech = MechanismTopology::with_arbitrary_platforms("one", vec![LegTopology::with_pairs(1, &[Revolute], &[])]);
        assert!(matches!(analyze_mechanism(&mech, RelationPolicy::default()), Err(AnalysisError::Invalid(_))));
    }

    #[test]
    fn swapping_identical_legs_is_symmetric() {
        let up = |label| {
            LegTopology::with_pairs(
                label,
                &[Revolute, Revolute, Prismatic],
                &[(1, 2, Perpendicular), (1, 3, Perpendicular), (2, 3, Perpendicular)],
            )
        };
        let mut mech = MechanismTopology::with_arbitrary_platforms("2up", vec![up(1), up(2)]);
        mech.fixed = PlatformRelations::arbitrary(PlatformSide::Fixed, vec![Revolute, Revolute]);
        let a = analyze_mechanism(&mech, RelationPolicy::default()).unwrap();
        mech.legs.reverse();
        for (i, l) in mech.legs.iter_mut().enumerate() {
            l.label = i as u8 + 1;
        }
        let b = analyze_mechanism(&mech, RelationPolicy::default()).unwrap();
        assert_eq!((a.dof, a.classification.clone()), (b.dof, b.classification.clone()));
        assert_eq!(a.loops, b.loops);
    }
}
