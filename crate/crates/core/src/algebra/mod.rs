//! Position-and-orientation characteristic algebra.

pub mod direction;
pub mod matrix;

pub use direction::{Direction, DirectionDescriptor, Judgement, Source, Token};
pub use matrix::{
    intersect_poc, intersect_rotation, intersect_translation, loop_rank, normalize, poc_or,
    rotation_view, translation_view, union_rotation_dim, union_translation_dim, AlgebraError,
    Generator, LoopRank, Placed, PocMatrix, RelationPolicy,
};
