//! Recognition of planar and spherical sub-chains inside a leg.

use std::fmt;
use std::ops::RangeInclusive;

use crate::algebra::{Generator, PocMatrix};
use crate::relation::{AxisRef, RelationError, RelationGraph};
use crate::topology::{JointKind, LegTopology, RelationCode};

use JointKind::{Prismatic as P, Revolute as R};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    G2,
    G3,
    S2,
    S3,
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubchainKind {
    /// R ∥ R
    ParallelRR,
    /// R ⊥ P
    RPerpP,
    /// P ⊥ R
    PPerpR,
    /// R ∥ R ∥ R
    ParallelRRR,
    /// R ∥ R ⊥ P
    ParallelRRPerpP,
    /// P ⊥ R ∥ R
    PPerpParallelRR,
    /// R (⊥ P) ∥ R
    RPerpPR,
    /// R (⊥ P) ⊥ P
    RPerpPP,
    /// P (⊥ P) ⊥ R
    PPerpPR,
    /// P (⊥ R) ⊥ P
    PPerpRP,
    /// two revolutes with no direction relation
    GenericRR,
    /// universal joint, R ⊥ R
    Universal,
    /// three revolutes with no direction relation
    GenericRRR,
    /// three revolutes through a common point
    Spherical,
    /// three mutually perpendicular revolutes
    OrthogonalRRR,
    SingleR,
    SingleP,
}

const ALL_ROWS: [SubchainKind; 15] = {
    use SubchainKind::*;
    [
        ParallelRR,
        RPerpP,
        PPerpR,
        ParallelRRR,
        ParallelRRPerpP,
        PPerpParallelRR,
        RPerpPR,
        RPerpPP,
        PPerpPR,
        PPerpRP,
        GenericRR,
        Universal,
        GenericRRR,
        Spherical,
        OrthogonalRRR,
    ]
};

/// Three-joint patterns, planar first.
const TRIPLES: [SubchainKind; 10] = {
    use SubchainKind::*;
    [
        ParallelRRR,
        ParallelRRPerpP,
        PPerpParallelRR,
        RPerpPR,
        RPerpPP,
        PPerpPR,
        PPerpRP,
        Spherical,
        OrthogonalRRR,
        GenericRRR,
    ]
};

const PAIRS: [SubchainKind; 5] = {
    use SubchainKind::*;
    [ParallelRR, RPerpP, PPerpR, Universal, GenericRR]
};

/// What a pair of joints must satisfy.
#[derive(Clone, Copy, Debug)]
enum Need {
    Par,
    Perp,
    Common,
    /// Neither parallel nor perpendicular.
    Loose,
}

impl Need {
    fn accepts(self, code: RelationCode) -> bool {
        use RelationCode::*;
        match self {
            Need::Par => code == Parallel,
            Need::Perp => code == Perpendicular,
            Need::Common => code == CommonPoint,
            Need::Loose => !matches!(code, Parallel | Perpendicular | Coaxial),
        }
    }
}

impl SubchainKind {
    pub fn catalogue() -> &'static [SubchainKind; 15] {
        &ALL_ROWS
    }

    /// Row number in the sub-chain catalogue.
    pub fn row(self) -> Option<u8> {
        ALL_ROWS.iter().position(|k| *k == self).map(|i| i as u8 + 1)
    }

    pub fn family(self) -> Family {
        use SubchainKind::*;
        match self {
            ParallelRR | RPerpP | PPerpR => Family::G2,
            ParallelRRR | ParallelRRPerpP | PPerpParallelRR | RPerpPR | RPerpPP | PPerpPR
            | PPerpRP => Family::G3,
            GenericRR | Universal => Family::S2,
            GenericRRR | Spherical | OrthogonalRRR => Family::S3,
            SingleR | SingleP => Family::Single,
        }
    }

    pub fn joints(self) -> &'static [JointKind] {
        use SubchainKind::*;
        match self {
            ParallelRR | GenericRR | Universal => &[R, R],
            RPerpP => &[R, P],
            PPerpR => &[P, R],
            ParallelRRR | GenericRRR | Spherical | OrthogonalRRR => &[R, R, R],
            ParallelRRPerpP => &[R, R, P],
            PPerpParallelRR => &[P, R, R],
            RPerpPR => &[R, P, R],
            RPerpPP => &[R, P, P],
            PPerpPR => &[P, P, R],
            PPerpRP => &[P, R, P],
            SingleR => &[R],
            SingleP => &[P],
        }
    }

    pub fn len(self) -> usize {
        self.joints().len()
    }

    /// Required relations for the pairs (1,2), (1,3), (2,3).
    fn needs(self) -> &'static [Need] {
        use Need::*;
        use SubchainKind::*;
        match self {
            ParallelRR => &[Par],
            RPerpP | PPerpR | Universal => &[Perp],
            GenericRR => &[Loose],
            ParallelRRR => &[Par, Par, Par],
            ParallelRRPerpP => &[Par, Perp, Perp],
            PPerpParallelRR => &[Perp, Perp, Par],
            RPerpPR => &[Perp, Par, Perp],
            RPerpPP | PPerpPR | PPerpRP | OrthogonalRRR => &[Perp, Perp, Perp],
            Spherical => &[Common, Common, Common],
            GenericRRR => &[Loose, Loose, Loose],
            SingleR | SingleP => &[],
        }
    }

    /// Code matrix of the catalogue entry.
    pub fn topology_matrix(self) -> Vec<Vec<u8>> {
        use RelationCode::*;
        let n = self.len();
        let mut m = vec![vec![0u8; n]; n];
        let pairs = [(0, 1), (0, 2), (1, 2)];
        for (i, k) in self.joints().iter().enumerate() {
            m[i][i] = k.code();
        }
        for (need, &(i, j)) in self.needs().iter().zip(&pairs) {
            let code = match need {
                Need::Par => Parallel,
                Need::Perp => Perpendicular,
                Need::Common => CommonPoint,
                Need::Loose => Arbitrary,
            };
            m[i][j] = code.code();
            m[j][i] = code.code();
        }
        m
    }

    fn symbol(self) -> &'static str {
        use SubchainKind::*;
        match self {
            ParallelRR => "R||R",
            RPerpP => "R_|_P",
            PPerpR => "P_|_R",
            ParallelRRR => "R||R||R",
            ParallelRRPerpP => "R||R_|_P",
            PPerpParallelRR => "P_|_R||R",
            RPerpPR => "R(_|_P)||R",
            RPerpPP => "R(_|_P)_|_P",
            PPerpPR => "P(_|_P)_|_R",
            PPerpRP => "P(_|_R)_|_P",
            GenericRR => "R-R",
            Universal => "R_|_R",
            GenericRRR => "R-R-R",
            Spherical => "R*R*R",
            OrthogonalRRR => "R_|_R_|_R",
            SingleR => "R",
            SingleP => "P",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::G2 => "G2",
            Family::G3 => "G3",
            Family::S2 => "S2",
            Family::S3 => "S3",
            Family::Single => "single",
        };
        f.write_str(s)
    }
}

impl fmt::Display for SubchainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.family(), self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub kind: SubchainKind,
    /// One-based index of the first joint.
    pub start: usize,
}

impl Segment {
    pub fn joints(&self) -> RangeInclusive<usize> {
        self.start..=self.start + self.kind.len() - 1
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.joints();
        if r.start() == r.end() {
            write!(f, "{} at joint {}", self.kind, r.start())
        } else {
            write!(f, "{} at joints {}-{}", self.kind, r.start(), r.end())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub segments: Vec<Segment>,
}

fn matches(kind: SubchainKind, leg: &LegTopology, start: usize, g: &RelationGraph) -> Result<bool, RelationError> {
    let joints = kind.joints();
    let end = start + joints.len() - 1;
    if end > leg.joint_count() || leg.joints[start - 1..end] != *joints {
        return Ok(false);
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    for (need, &(i, j)) in kind.needs().iter().zip(&pairs) {
        let a = AxisRef::new(leg.label, (start + i) as u8);
        let b = AxisRef::new(leg.label, (start + j) as u8);
        if !need.accepts(g.relation_between(a, b)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy longest-match segmentation from the base joint.
pub fn extract_subchains(leg: &LegTopology, g: &RelationGraph) -> Result<Segmentation, RelationError> {
    let mut segments = Vec::new();
    let mut start = 1;
    while start <= leg.joint_count() {
        let mut found = None;
        for kind in TRIPLES.iter().chain(&PAIRS) {
            if matches(*kind, leg, start, g)? {
                found = Some(*kind);
                break;
            }
        }
        let kind = found.unwrap_or(match leg.joints[start - 1] {
            R => SubchainKind::SingleR,
            P => SubchainKind::SingleP,
        });
        segments.push(Segment { kind, start });
        start += kind.len();
    }
    Ok(Segmentation { segments })
}

/// Supplemented matrix of one segment of leg `leg` with `f` joints.
pub fn subchain_poc(kind: SubchainKind, start: usize, f: usize, leg: u8) -> PocMatrix {
    use SubchainKind::*;
    let mut m = PocMatrix::zero(f);
    let ax = |k: usize| AxisRef::new(leg, (start + k) as u8);
    let col = |k: usize| start + k - 1;
    // (column offset of the translation/rotation pair, translation generator)
    let planar = match kind {
        ParallelRR => Some((0, 1, Generator::NormalLine(ax(0), 0))),
        RPerpP => Some((0, 1, Generator::Along(ax(1)))),
        PPerpR => Some((1, 1, Generator::Along(ax(0)))),
        ParallelRRR | ParallelRRPerpP | RPerpPR | RPerpPP => Some((0, 2, Generator::NormalPlane(ax(0)))),
        PPerpParallelRR | PPerpRP => Some((1, 2, Generator::NormalPlane(ax(1)))),
        PPerpPR => Some((2, 2, Generator::NormalPlane(ax(2)))),
        _ => None,
    };
    match planar {
        Some((k, count, gen)) => {
            m.add_translation(col(k), count, gen);
            m.add_rotation(col(k), ax(k));
        }
        None if kind == SingleP => m.add_translation(col(0), 1, Generator::Along(ax(0))),
        None => {
            for k in 0..kind.len() {
                m.add_rotation(col(k), ax(k));
            }
        }
    }
    m.set_owner(leg);
    m
}
