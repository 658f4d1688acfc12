//! Symbolic directions and the subspaces of 3-space they span.
//!
//! Every direction is built from joint-axis parallel classes. Two directions
//! are compared with `parallel` / `perpendicular`, each answering with a
//! [`Judgement`] that remembers whether a negative answer relied on the
//! general-position assumption for an arbitrary axis pair.

use std::fmt;

use crate::relation::{AxisRef, ClassId, RelationGraph};

/// Identity of a generic direction: the joint that produced it and a slot
/// distinguishing several generic directions born from the same joint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    pub joint: AxisRef,
    pub slot: u8,
}

impl Token {
    pub const fn new(joint: AxisRef, slot: u8) -> Self {
        Self { joint, slot }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Along the axes of one parallel class.
    Axis(ClassId),
    /// A generic line in the plane normal to `normal`.
    InPlane { normal: Box<Direction>, token: Token },
    /// A generic line in space.
    Free(Token),
    /// The common normal of two non-parallel directions.
    Cross(Box<Direction>, Box<Direction>),
}

/// Outcome of a symbolic relation test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Judgement {
    pub holds: bool,
    /// The answer is `false` only because an arbitrary axis pair was taken
    /// to be in general position.
    pub assumed: bool,
}

impl Judgement {
    pub const YES: Judgement = Judgement {
        holds: true,
        assumed: false,
    };
    pub const NO: Judgement = Judgement {
        holds: false,
        assumed: false,
    };
    pub const GENERIC: Judgement = Judgement {
        holds: false,
        assumed: true,
    };

    fn or(self, other: impl FnOnce() -> Judgement) -> Judgement {
        if self.holds && !self.assumed {
            return self;
        }
        let other = other();
        if other.holds {
            return Judgement {
                holds: true,
                assumed: other.assumed,
            };
        }
        Judgement {
            holds: false,
            assumed: self.assumed || other.assumed,
        }
    }

    fn and(self, other: impl FnOnce() -> Judgement) -> Judgement {
        if !self.holds && !self.assumed {
            return self;
        }
        let other = other();
        match (self.holds, other.holds) {
            (true, true) => Judgement {
                holds: true,
                assumed: self.assumed || other.assumed,
            },
            (true, false) => other,
            (false, true) => self,
            (false, false) => Judgement {
                holds: false,
                assumed: self.assumed && other.assumed,
            },
        }
    }
}

impl Direction {
    pub fn axis(g: &RelationGraph, joint: AxisRef) -> Direction {
        Direction::Axis(g.class_of(joint).expect("axis belongs to the relation graph"))
    }

    pub fn in_plane(normal: Direction, token: Token) -> Direction {
        Direction::InPlane {
            normal: Box::new(normal),
            token,
        }
    }

    /// Common normal of two non-parallel directions, rewritten to a class axis
    /// when some class is known to be perpendicular to both.
    pub fn cross(a: Direction, b: Direction, g: &RelationGraph) -> Direction {
        for class in g.classes() {
            let candidate = Direction::Axis(class);
            if candidate.perpendicular(&a, g).holds && candidate.perpendicular(&b, g).holds {
                return candidate;
            }
        }
        if a <= b {
            Direction::Cross(Box::new(a), Box::new(b))
        } else {
            Direction::Cross(Box::new(b), Box::new(a))
        }
    }

    pub fn parallel(&self, other: &Direction, g: &RelationGraph) -> Judgement {
        use Direction::*;
        if self == other {
            return Judgement::YES;
        }
        match (self, other) {
            (Axis(a), Axis(b)) => {
                if a == b {
                    Judgement::YES
                } else if g.classes_perpendicular(*a, *b) {
                    Judgement::NO
                } else {
                    Judgement::GENERIC
                }
            }
            (Cross(p, q), x) | (x, Cross(p, q)) => x.perpendicular(p, g).and(|| x.perpendicular(q, g)),
            _ => Judgement::NO,
        }
    }

    pub fn perpendicular(&self, other: &Direction, g: &RelationGraph) -> Judgement {
        use Direction::*;
        let mut verdict = Judgement::NO;
        for (x, y) in [(self, other), (other, self)] {
            if let Cross(p, q) = x {
                verdict = verdict.or(|| y.parallel(p, g)).or(|| y.parallel(q, g));
            }
            if let InPlane { normal, .. } = x {
                verdict = verdict.or(|| y.parallel(normal, g));
            }
        }
        if verdict.holds && !verdict.assumed {
            return verdict;
        }
        let direct = match (self, other) {
            (Axis(a), Axis(b)) => {
                if g.classes_perpendicular(*a, *b) {
                    Judgement::YES
                } else if a == b {
                    Judgement::NO
                } else {
                    Judgement::GENERIC
                }
            }
            (Cross(a, b), Cross(c, d)) => {
                // (a x b).(c x d) = (a.c)(b.d) - (a.d)(b.c)
                let first = a.perpendicular(c, g).or(|| b.perpendicular(d, g));
                first.and(|| a.perpendicular(d, g).or(|| b.perpendicular(c, g)))
            }
            _ => Judgement::NO,
        };
        verdict.or(|| direct)
    }

    pub fn label(&self, g: &RelationGraph) -> String {
        match self {
            Direction::Axis(c) => g.class_label(*c),
            Direction::InPlane { normal, token } => {
                format!("~{}{}", normal.label(g), slot_mark(token))
            }
            Direction::Free(token) => format!("?{}{}", g.label(token.joint), slot_mark(token)),
            Direction::Cross(a, b) => format!("({}x{})", a.label(g), b.label(g)),
        }
    }
}

fn slot_mark(token: &Token) -> String {
    format!("'{}", token.slot)
}

/// A linear subspace of direction space: the translational or rotational
/// output of a leg or sub-mechanism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DirectionDescriptor {
    Empty,
    Line(Direction),
    /// Plane given by its normal direction.
    Plane(Direction),
    Full,
}

/// Which operand of a binary operation the surviving direction came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Left,
    Right,
    Both,
    Neither,
}

impl DirectionDescriptor {
    pub fn rank(&self) -> u8 {
        match self {
            DirectionDescriptor::Empty => 0,
            DirectionDescriptor::Line(_) => 1,
            DirectionDescriptor::Plane(_) => 2,
            DirectionDescriptor::Full => 3,
        }
    }

    /// Plane through two non-parallel lines.
    pub fn span(a: Direction, b: Direction, g: &RelationGraph) -> DirectionDescriptor {
        DirectionDescriptor::Plane(Direction::cross(a, b, g))
    }

    /// Subspace intersection. The flag reports whether the result depended
    /// on general position.
    pub fn intersect(&self, other: &Self, g: &RelationGraph) -> (DirectionDescriptor, Source, bool) {
        use DirectionDescriptor::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => (Empty, Source::Neither, false),
            (Full, x) => (x.clone(), Source::Right, false),
            (x, Full) => (x.clone(), Source::Left, false),
            (Line(a), Line(b)) => {
                let j = a.parallel(b, g);
                if j.holds {
                    (Line(b.clone()), Source::Right, j.assumed)
                } else {
                    (Empty, Source::Neither, j.assumed)
                }
            }
            (Line(d), Plane(n)) | (Plane(n), Line(d)) => {
                let j = d.perpendicular(n, g);
                let side = if matches!(self, Line(_)) { Source::Left } else { Source::Right };
                if j.holds {
                    (Line(d.clone()), side, j.assumed)
                } else {
                    (Empty, Source::Neither, j.assumed)
                }
            }
            (Plane(n), Plane(m)) => {
                let j = n.parallel(m, g);
                if j.holds {
                    (Plane(m.clone()), Source::Right, j.assumed)
                } else {
                    (Line(Direction::cross(n.clone(), m.clone(), g)), Source::Both, j.assumed)
                }
            }
        }
    }

    /// Subspace sum.
    pub fn union(&self, other: &Self, g: &RelationGraph) -> (DirectionDescriptor, bool) {
        use DirectionDescriptor::*;
        match (self, other) {
            (Empty, x) | (x, Empty) => (x.clone(), false),
            (Full, _) | (_, Full) => (Full, false),
            (Line(a), Line(b)) => {
                let j = a.parallel(b, g);
                if j.holds {
                    (Line(a.clone()), j.assumed)
                } else {
                    (Self::span(a.clone(), b.clone(), g), j.assumed)
                }
            }
            (Line(d), Plane(n)) | (Plane(n), Line(d)) => {
                let j = d.perpendicular(n, g);
                if j.holds {
                    (Plane(n.clone()), j.assumed)
                } else {
                    (Full, j.assumed)
                }
            }
            (Plane(n), Plane(m)) => {
                let j = n.parallel(m, g);
                if j.holds {
                    (Plane(n.clone()), j.assumed)
                } else {
                    (Full, j.assumed)
                }
            }
        }
    }

    pub fn label(&self, g: &RelationGraph) -> String {
        match self {
            DirectionDescriptor::Empty => "empty".into(),
            DirectionDescriptor::Line(d) => format!("line {}", d.label(g)),
            DirectionDescriptor::Plane(n) => format!("plane _|_ {}", n.label(g)),
            DirectionDescriptor::Full => "arbitrary".into(),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Source::Left => "left",
            Source::Right => "right",
            Source::Both => "both",
            Source::Neither => "neither",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{JointKind::Revolute as R, RelationCode::*};

    fn a(j: u8) -> AxisRef {
        AxisRef::new(1, j)
    }

    /// Axes 1,2,3 mutually perpendicular; 4 parallel to 1; 5 arbitrary.
    fn graph() -> RelationGraph {
        let nodes: Vec<_> = (1..=5).map(|j| (a(j), R)).collect();
        let seeds = [
            (a(1), a(2), Perpendicular),
            (a(1), a(3), Perpendicular),
            (a(2), a(3), Perpendicular),
            (a(1), a(4), Parallel),
        ];
        RelationGraph::from_seeds(&nodes, &seeds).unwrap()
    }

    #[test]
    fn cross_of_two_orthogonal_axes_is_the_third() {
        let g = graph();
        let x = Direction::cross(Direction::axis(&g, a(1)), Direction::axis(&g, a(2)), &g);
        assert_eq!(x, Direction::axis(&g, a(3)));
        let y = Direction::cross(Direction::axis(&g, a(1)), Direction::axis(&g, a(5)), &g);
        assert!(matches!(y, Direction::Cross(..)));
        assert!(y.perpendicular(&Direction::axis(&g, a(4)), &g).holds);
        assert!(y.perpendicular(&Direction::axis(&g, a(5)), &g).holds);
        assert_eq!(y.perpendicular(&Direction::axis(&g, a(2)), &g), Judgement::GENERIC);
    }

    #[test]
    fn in_plane_line_is_normal_to_its_axis_only() {
        let g = graph();
        let t = Direction::in_plane(Direction::axis(&g, a(1)), Token::new(a(1), 0));
        assert!(t.perpendicular(&Direction::axis(&g, a(4)), &g).holds);
        assert!(!t.perpendicular(&Direction::axis(&g, a(2)), &g).holds);
        assert!(!t.parallel(&Direction::axis(&g, a(2)), &g).holds);
    }

    #[test]
    fn intersections_and_unions() {
        use DirectionDescriptor::*;
        let g = graph();
        let d = |j| Direction::axis(&g, a(j));
        let (r, src, _) = Full.intersect(&Line(d(3)), &g);
        assert_eq!((r, src), (Line(d(3)), Source::Right));
        assert_eq!(Line(d(1)).intersect(&Line(d(4)), &g).0.rank(), 1);
        assert_eq!(Line(d(1)).intersect(&Line(d(2)), &g).0.rank(), 0);
        assert_eq!(Line(d(2)).intersect(&Plane(d(1)), &g).0.rank(), 1);
        let (line, src, _) = Plane(d(1)).intersect(&Plane(d(2)), &g);
        assert_eq!((line, src), (Line(d(3)), Source::Both));
        assert_eq!(Line(d(1)).union(&Line(d(2)), &g).0, Plane(d(3)));
        assert_eq!(Line(d(1)).union(&Line(d(4)), &g).0.rank(), 1);
        let (full, assumed) = Line(d(5)).union(&Plane(d(1)), &g);
        assert_eq!((full.rank(), assumed), (3, true));
    }
}
