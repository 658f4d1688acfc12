//! POC matrix of a single leg.

use crate::algebra::{normalize, poc_or, AlgebraError, PocMatrix};
use crate::relation::{RelationError, RelationGraph};
use crate::subchain::{extract_subchains, subchain_poc, Segmentation};
use crate::topology::LegTopology;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LegError {
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegStep {
    pub label: String,
    pub matrix: PocMatrix,
}

#[derive(Clone, Debug)]
pub struct LegPoc {
    pub label: u8,
    pub matrix: PocMatrix,
    pub xi_t: u8,
    pub xi_r: u8,
    pub segmentation: Segmentation,
    pub trace: Vec<LegStep>,
}

impl LegPoc {
    pub fn xi(&self) -> u8 {
        self.xi_t + self.xi_r
    }
}

pub fn analyze_leg(leg: &LegTopology, g: &RelationGraph) -> Result<LegPoc, LegError> {
    let f = leg.joint_count();
    let segmentation = extract_subchains(leg, g)?;
    let mut trace = Vec::new();
    let mut parts = Vec::new();
    for seg in &segmentation.segments {
        let m = subchain_poc(seg.kind, seg.start, f, leg.label);
        trace.push(LegStep {
            label: seg.to_string(),
            matrix: m.clone(),
        });
        parts.push(m);
    }
    let combined = poc_or(&parts)?;
    trace.push(LegStep {
        label: "or".into(),
        matrix: combined.clone(),
    });
    let mut matrix = normalize(&combined, g);
    matrix.set_owner(leg.label);
    trace.push(LegStep {
        label: "normalized".into(),
        matrix: matrix.clone(),
    });
    Ok(LegPoc {
        label: leg.label,
        xi_t: matrix.xi_t(),
        xi_r: matrix.xi_r(),
        matrix,
        segmentation,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::build_leg_graph;
    use crate::topology::decode_leg;

    fn run(m: &[&[u8]]) -> LegPoc {
        let l = decode_leg(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let g = build_leg_graph(&l).unwrap();
        analyze_leg(&l, &g).unwrap()
    }

    #[test]
    fn up_leg() {
        let p = run(&[&[8, 2, 2], &[2, 8, 2], &[2, 2, 9]]);
        assert_eq!(p.matrix.rows(), ([0, 0, 1, 0, 0, 0], [1, 1, 0, 0, 0, 0]));
    }

    #[test]
    fn rrc_leg_collapses_translation() {
        let p = run(&[&[8, 1, 1, 1], &[1, 8, 1, 1], &[1, 1, 8, 1], &[1, 1, 1, 9]]);
        assert_eq!(p.trace[2].matrix.narrow(), (vec![2, 0, 0, 1], vec![1, 0, 0, 0]));
        assert_eq!(p.matrix.rows(), ([3, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn prrrr_leg() {
        let p = run(&[&[9, 2, 2, 1, 1], &[2, 8, 1, 2, 2], &[2, 1, 8, 2, 2], &[1, 2, 2, 8, 1], &[1, 2, 2, 1, 8]]);
        assert_eq!(p.trace[2].matrix.narrow(), (vec![0, 2, 0, 1, 0], vec![0, 1, 0, 1, 0]));
        assert_eq!(p.matrix.rows(), ([3, 0, 0, 0, 0, 0], [0, 1, 0, 1, 0, 0]));
    }

    #[test]
    fn ups_leg_is_full() {
        let p = run(&[
            &[8, 2, 0, 0, 0, 0],
            &[2, 8, 0, 0, 0, 0],
            &[0, 0, 9, 0, 0, 0],
            &[0, 0, 0, 8, 2, 2],
            &[0, 0, 0, 2, 8, 2],
            &[0, 0, 0, 2, 2, 8],
        ]);
        assert_eq!(p.matrix.rows(), ([3, 0, 0, 0, 0, 0], [3, 0, 0, 0, 0, 0]));
        assert_eq!(p.xi(), 6);
    }

    #[test]
    fn single_joint_legs() {
        assert_eq!(run(&[&[8]]).matrix.rows().1[0], 1);
        assert_eq!(run(&[&[9]]).matrix.rows().0[0], 1);
    }
}
