//! Digital topology of legs, platforms and whole mechanisms.
//!
//! A leg is an ordered chain of single-DOF joints (base to platform) plus the
//! pairwise geometric relations between their axes. Its integer form carries
//! the joint codes (8 = R, 9 = P) on the diagonal and relation codes 0..=5
//! off the diagonal. Platform matrices use the same layout, with one row per
//! leg describing that leg's platform-adjacent joint.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest number of joints in a leg, and of legs in a mechanism.
pub const MAX_SIDE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JointKind {
    Revolute,
    Prismatic,
}

impl JointKind {
    pub fn code(self) -> u8 {
        match self {
            JointKind::Revolute => 8,
            JointKind::Prismatic => 9,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            8 => Some(JointKind::Revolute),
            9 => Some(JointKind::Prismatic),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            JointKind::Revolute => 'R',
            JointKind::Prismatic => 'P',
        }
    }
}

/// Geometric relation between two joint axes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationCode {
    #[default]
    Arbitrary,
    Parallel,
    Perpendicular,
    Coaxial,
    Coplanar,
    CommonPoint,
}

impl RelationCode {
    pub const ALL: [RelationCode; 6] = [
        RelationCode::Arbitrary,
        RelationCode::Parallel,
        RelationCode::Perpendicular,
        RelationCode::Coaxial,
        RelationCode::Coplanar,
        RelationCode::CommonPoint,
    ];

    pub fn code(self) -> u8 {
        match self {
            RelationCode::Arbitrary => 0,
            RelationCode::Parallel => 1,
            RelationCode::Perpendicular => 2,
            RelationCode::Coaxial => 3,
            RelationCode::Coplanar => 4,
            RelationCode::CommonPoint => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        RelationCode::ALL.get(code as usize).copied()
    }

    /// ASCII token used in mechanism files.
    pub fn token(self) -> &'static str {
        match self {
            RelationCode::Arbitrary => "-",
            RelationCode::Parallel => "||",
            RelationCode::Perpendicular => "_|_",
            RelationCode::Coaxial => "/",
            RelationCode::Coplanar => "#",
            RelationCode::CommonPoint => "*",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        RelationCode::ALL.iter().copied().find(|r| r.token() == token)
    }

    /// True for relations that constrain axis directions.
    pub fn is_directional(self) -> bool {
        matches!(
            self,
            RelationCode::Parallel | RelationCode::Perpendicular | RelationCode::Coaxial
        )
    }
}

impl fmt::Display for RelationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RelationCode::Arbitrary => "arbitrary",
            RelationCode::Parallel => "parallel",
            RelationCode::Perpendicular => "perpendicular",
            RelationCode::Coaxial => "coaxial",
            RelationCode::Coplanar => "coplanar",
            RelationCode::CommonPoint => "common point",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("matrix side {0} exceeds the maximum of 6")]
    TooLarge(usize),
    #[error("diagonal entry ({index},{index}) = {value} is not a joint code (8 or 9)")]
    InvalidDiagonal { index: usize, value: u8 },
    #[error("entry ({row},{col}) = {value} is not a relation code (0..=5)")]
    InvalidRelation { row: usize, col: usize, value: u8 },
    #[error("matrix is not symmetric at ({row},{col})")]
    Asymmetric { row: usize, col: usize },
}

/// Symmetric square matrix of relation codes. The diagonal is unused.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationMatrix {
    side: usize,
    cells: Vec<RelationCode>,
}

impl RelationMatrix {
    pub fn new(side: usize) -> Self {
        Self {
            side,
            cells: vec![RelationCode::Arbitrary; side * side],
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Zero-based access.
    pub fn get(&self, i: usize, j: usize) -> RelationCode {
        self.cells[i * self.side + j]
    }

    /// Zero-based, writes both (i,j) and (j,i).
    pub fn set(&mut self, i: usize, j: usize, code: RelationCode) {
        assert!(i != j, "relation matrix diagonal holds joint codes");
        self.cells[i * self.side + j] = code;
        self.cells[j * self.side + i] = code;
    }

    /// Off-diagonal pairs (i < j), zero-based.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, RelationCode)> + '_ {
        (0..self.side)
            .flat_map(move |i| ((i + 1)..self.side).map(move |j| (i, j, self.get(i, j))))
    }
}

fn encode_square(diagonal: &[JointKind], relations: &RelationMatrix) -> Vec<Vec<u8>> {
    let n = diagonal.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        diagonal[i].code()
                    } else {
                        relations.get(i, j).code()
                    }
                })
                .collect()
        })
        .collect()
}

fn decode_square(matrix: &[Vec<u8>]) -> Result<(Vec<JointKind>, RelationMatrix), TopologyError> {
    let n = matrix.len();
    if n == 0 {
        return Err(TopologyError::Empty);
    }
    for (row, cells) in matrix.iter().enumerate() {
        if cells.len() != n {
            return Err(TopologyError::NotSquare {
                row: row + 1,
                len: cells.len(),
                expected: n,
            });
        }
    }
    if n > MAX_SIDE {
        return Err(TopologyError::TooLarge(n));
    }
    let mut kinds = Vec::with_capacity(n);
    for (i, row) in matrix.iter().enumerate() {
        let value = row[i];
        kinds.push(JointKind::from_code(value).ok_or(TopologyError::InvalidDiagonal {
            index: i + 1,
            value,
        })?);
    }
    let mut relations = RelationMatrix::new(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let value = matrix[i][j];
            let code = RelationCode::from_code(value).ok_or(TopologyError::InvalidRelation {
                row: i + 1,
                col: j + 1,
                value,
            })?;
            if matrix[j][i] != value {
                let (row, col) = if i < j { (i + 1, j + 1) } else { (j + 1, i + 1) };
                return Err(TopologyError::Asymmetric { row, col });
            }
            if i < j {
                relations.set(i, j, code);
            }
        }
    }
    Ok((kinds, relations))
}

/// One leg: joints from the fixed platform to the moving platform.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegTopology {
    pub label: u8,
    pub joints: Vec<JointKind>,
    pub relations: RelationMatrix,
}

impl LegTopology {
    pub fn new(label: u8, joints: Vec<JointKind>, relations: RelationMatrix) -> Self {
        Self {
            label,
            joints,
            relations,
        }
    }

    /// Builds a leg whose every pair relation is listed explicitly as
    /// `(i, j, code)` with one-based joint indices; missing pairs are arbitrary.
    pub fn with_pairs(label: u8, joints: &[JointKind], pairs: &[(usize, usize, RelationCode)]) -> Self {
        let mut relations = RelationMatrix::new(joints.len());
        for &(i, j, code) in pairs {
            relations.set(i - 1, j - 1, code);
        }
        Self::new(label, joints.to_vec(), relations)
    }

    pub fn joint_count(&self) -> usize {
        self.joints.len()
    }

    pub fn first_joint(&self) -> JointKind {
        self.joints[0]
    }

    pub fn last_joint(&self) -> JointKind {
        self.joints[self.joints.len() - 1]
    }

    /// One-based relation lookup.
    pub fn relation(&self, i: usize, j: usize) -> RelationCode {
        self.relations.get(i - 1, j - 1)
    }

    pub fn check(&self) -> Result<(), TopologyError> {
        if self.joints.is_empty() {
            return Err(TopologyError::Empty);
        }
        if self.joints.len() > MAX_SIDE {
            return Err(TopologyError::TooLarge(self.joints.len()));
        }
        if self.relations.side() != self.joints.len() {
            return Err(TopologyError::NotSquare {
                row: 1,
                len: self.relations.side(),
                expected: self.joints.len(),
            });
        }
        Ok(())
    }

    /// Short chain notation such as `R_|_R_|_P`.
    pub fn chain_notation(&self) -> String {
        let mut out = String::new();
        for (i, kind) in self.joints.iter().enumerate() {
            if i > 0 {
                out.push_str(self.relations.get(i - 1, i).token());
            }
            out.push(kind.letter());
        }
        out
    }
}

/// Integer topology matrix of a leg.
pub fn encode_leg(leg: &LegTopology) -> Vec<Vec<u8>> {
    encode_square(&leg.joints, &leg.relations)
}

/// Inverse of [`encode_leg`]; the decoded leg is labelled 1.
pub fn decode_leg(matrix: &[Vec<u8>]) -> Result<LegTopology, TopologyError> {
    decode_labeled_leg(1, matrix)
}

pub fn decode_labeled_leg(label: u8, matrix: &[Vec<u8>]) -> Result<LegTopology, TopologyError> {
    let (joints, relations) = decode_square(matrix)?;
    Ok(LegTopology::new(label, joints, relations))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlatformSide {
    Moving,
    Fixed,
}

impl fmt::Display for PlatformSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlatformSide::Moving => f.write_str("moving"),
            PlatformSide::Fixed => f.write_str("fixed"),
        }
    }
}

/// Relations between the platform-adjacent joints of all legs. Entry (i, j)
/// relates leg i's joint on this platform with leg j's.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlatformRelations {
    pub side: PlatformSide,
    pub diagonal: Vec<JointKind>,
    pub relations: RelationMatrix,
}

impl PlatformRelations {
    /// Platform matrix with every pair arbitrary.
    pub fn arbitrary(side: PlatformSide, diagonal: Vec<JointKind>) -> Self {
        let n = diagonal.len();
        Self {
            side,
            diagonal,
            relations: RelationMatrix::new(n),
        }
    }

    pub fn encode(&self) -> Vec<Vec<u8>> {
        encode_square(&self.diagonal, &self.relations)
    }

    pub fn decode(side: PlatformSide, matrix: &[Vec<u8>]) -> Result<Self, TopologyError> {
        let (diagonal, relations) = decode_square(matrix)?;
        Ok(Self {
            side,
            diagonal,
            relations,
        })
    }
}

/// A whole parallel mechanism: legs plus the two platform relation matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MechanismTopology {
    pub name: String,
    pub legs: Vec<LegTopology>,
    pub moving: PlatformRelations,
    pub fixed: PlatformRelations,
}

impl MechanismTopology {
    /// Mechanism whose platform matrices are derived from the legs' end joints
    /// with every cross-leg relation arbitrary.
    pub fn with_arbitrary_platforms(name: impl Into<String>, legs: Vec<LegTopology>) -> Self {
        let moving = PlatformRelations::arbitrary(
            PlatformSide::Moving,
            legs.iter().map(|l| l.last_joint()).collect(),
        );
        let fixed = PlatformRelations::arbitrary(
            PlatformSide::Fixed,
            legs.iter().map(|l| l.first_joint()).collect(),
        );
        Self {
            name: name.into(),
            legs,
            moving,
            fixed,
        }
    }

    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    pub fn leg(&self, label: u8) -> Option<&LegTopology> {
        self.legs.iter().find(|l| l.label == label)
    }

    pub fn total_joint_dof(&self) -> u32 {
        self.legs.iter().map(|l| l.joint_count() as u32).sum()
    }
}

/// One violated invariant of a mechanism description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TooFewLegs(usize),
    TooManyLegs(usize),
    LegLabel { position: usize, label: u8 },
    Leg { label: u8, error: TopologyError },
    PlatformSize { side: PlatformSide, size: usize, legs: usize },
    PlatformDiagonal { side: PlatformSide, leg: u8, expected: JointKind, found: JointKind },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewLegs(n) => write!(f, "leg count < 2 (found {n})"),
            Violation::TooManyLegs(n) => write!(f, "leg count > 6 (found {n})"),
            Violation::LegLabel { position, label } => {
                write!(f, "leg at position {position} is labelled {label}, expected {position}")
            }
            Violation::Leg { label, error } => write!(f, "leg {label}: {error}"),
            Violation::PlatformSize { side, size, legs } => write!(
                f,
                "platform matrix size mismatch ({side} platform is {size}x{size}, mechanism has {legs} legs)"
            ),
            Violation::PlatformDiagonal {
                side,
                leg,
                expected,
                found,
            } => write!(
                f,
                "{side} platform diagonal for leg {leg} is {} but the leg's adjacent joint is {}",
                found.letter(),
                expected.letter()
            ),
        }
    }
}

/// Lists every violated invariant; an empty list means the description is valid.
pub fn validate_mechanism(mech: &MechanismTopology) -> Vec<Violation> {
    let mut out = Vec::new();
    let k = mech.legs.len();
    if k < 2 {
        out.push(Violation::TooFewLegs(k));
    }
    if k > MAX_SIDE {
        out.push(Violation::TooManyLegs(k));
    }
    for (i, leg) in mech.legs.iter().enumerate() {
        if leg.label as usize != i + 1 {
            out.push(Violation::LegLabel {
                position: i + 1,
                label: leg.label,
            });
        }
        if let Err(error) = leg.check() {
            out.push(Violation::Leg {
                label: leg.label,
                error,
            });
        }
    }
    for platform in [&mech.moving, &mech.fixed] {
        let size = platform.diagonal.len();
        if size != k || platform.relations.side() != size {
            out.push(Violation::PlatformSize {
                side: platform.side,
                size,
                legs: k,
            });
            continue;
        }
        for (leg, &found) in mech.legs.iter().zip(&platform.diagonal) {
            if leg.joints.is_empty() {
                continue;
            }
            let expected = match platform.side {
                PlatformSide::Moving => leg.last_joint(),
                PlatformSide::Fixed => leg.first_joint(),
            };
            if expected != found {
                out.push(Violation::PlatformDiagonal {
                    side: platform.side,
                    leg: leg.label,
                    expected,
                    found,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use JointKind::{Prismatic as P, Revolute as R};

    fn m(rows: &[&[u8]]) -> Vec<Vec<u8>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn up_leg_encodes_like_the_table() {
        let leg = LegTopology::with_pairs(
            1,
            &[R, R, P],
            &[
                (1, 2, RelationCode::Perpendicular),
                (1, 3, RelationCode::Perpendicular),
                (2, 3, RelationCode::Perpendicular),
            ],
        );
        assert_eq!(encode_leg(&leg), m(&[&[8, 2, 2], &[2, 8, 2], &[2, 2, 9]]));
        assert_eq!(leg.chain_notation(), "R_|_R_|_P");
    }

    #[test]
    fn single_joint_leg() {
        let leg = LegTopology::with_pairs(1, &[R], &[]);
        assert_eq!(encode_leg(&leg), m(&[&[8]]));
    }

    #[test]
    fn rrc_leg_round_trips() {
        let matrix = m(&[&[8, 1, 1, 1], &[1, 8, 1, 1], &[1, 1, 8, 1], &[1, 1, 1, 9]]);
        let leg = decode_leg(&matrix).unwrap();
        assert_eq!(leg.joints, vec![R, R, R, P]);
        assert_eq!(encode_leg(&leg), matrix);
    }

    #[test]
    fn decode_errors() {
        assert_eq!(
            decode_leg(&m(&[&[8, 3], &[2, 8]])),
            Err(TopologyError::Asymmetric { row: 1, col: 2 })
        );
        assert_eq!(
            decode_leg(&m(&[&[8, 7], &[7, 8]])),
            Err(TopologyError::InvalidRelation {
                row: 1,
                col: 2,
                value: 7
            })
        );
        assert_eq!(
            decode_leg(&m(&[&[8, 0], &[0, 7]])),
            Err(TopologyError::InvalidDiagonal { index: 2, value: 7 })
        );
        assert_eq!(decode_leg(&vec![vec![0u8; 7]; 7]), Err(TopologyError::TooLarge(7)));
        assert_eq!(decode_leg(&[]), Err(TopologyError::Empty));
        assert!(matches!(
            decode_leg(&m(&[&[8, 0], &[0]])),
            Err(TopologyError::NotSquare { .. })
        ));
    }

    #[test]
    fn one_leg_mechanism_is_reported() {
        let mech = MechanismTopology::with_arbitrary_platforms(
            "lonely",
            vec![LegTopology::with_pairs(1, &[R], &[])],
        );
        let report = validate_mechanism(&mech);
        assert_eq!(report, vec![Violation::TooFewLegs(1)]);
        assert!(report[0].to_string().contains("leg count < 2"));
    }

    #[test]
    fn platform_size_mismatch_is_reported() {
        let legs: Vec<_> = (1..=3).map(|i| LegTopology::with_pairs(i, &[R, P], &[])).collect();
        let mut mech = MechanismTopology::with_arbitrary_platforms("three", legs);
        mech.fixed = PlatformRelations::arbitrary(PlatformSide::Fixed, vec![R; 4]);
        let report = validate_mechanism(&mech);
        assert_eq!(report.len(), 1);
        assert!(report[0].to_string().contains("platform matrix size mismatch"));
    }

    #[test]
    fn platform_diagonal_must_match_leg_ends() {
        let legs: Vec<_> = (1..=2).map(|i| LegTopology::with_pairs(i, &[R, P], &[])).collect();
        let mut mech = MechanismTopology::with_arbitrary_platforms("two", legs);
        mech.moving.diagonal[1] = R;
        assert!(matches!(
            validate_mechanism(&mech).as_slice(),
            [Violation::PlatformDiagonal { leg: 2, .. }]
        ));
    }

    fn arb_leg() -> impl Strategy<Value = LegTopology> {
        (1usize..=6)
            .prop_flat_map(|f| {
                (
                    proptest::collection::vec(prop_oneof![Just(R), Just(P)], f),
                    proptest::collection::vec(0u8..=5, f * (f - 1) / 2),
                )
            })
            .prop_map(|(joints, codes)| {
                let f = joints.len();
                let mut relations = RelationMatrix::new(f);
                let mut it = codes.into_iter();
                for i in 0..f {
                    for j in (i + 1)..f {
                        relations.set(i, j, RelationCode::from_code(it.next().unwrap()).unwrap());
                    }
                }
                LegTopology::new(1, joints, relations)
            })
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(leg in arb_leg()) {
            prop_assert_eq!(decode_leg(&encode_leg(&leg)).unwrap(), leg);
        }

        #[test]
        fn encoding_is_injective(a in arb_leg(), b in arb_leg()) {
            prop_assert_eq!(a == b, encode_leg(&a) == encode_leg(&b));
        }
    }
}
