//! Random valid mechanism topologies.
//!
//! Every joint axis picks a direction from a palette: three mutually
//! orthogonal directions and a handful of generic ones. Relation codes are
//! read off the palette, so the generated descriptions are always
//! geometrically realizable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::topology::{
    JointKind, LegTopology, MechanismTopology, PlatformRelations, PlatformSide, RelationCode,
    RelationMatrix,
};

const ORTHOGONAL: u8 = 3;
const PALETTE: u8 = 7;

fn code(a: u8, b: u8, rng: &mut impl Rng, both_revolute: bool) -> RelationCode {
    if a == b {
        RelationCode::Parallel
    } else if a < ORTHOGONAL && b < ORTHOGONAL {
        RelationCode::Perpendicular
    } else if both_revolute && rng.gen_bool(0.1) {
        RelationCode::CommonPoint
    } else {
        RelationCode::Arbitrary
    }
}

fn relations(colors: &[u8], kinds: &[JointKind], rng: &mut impl Rng) -> RelationMatrix {
    let mut m = RelationMatrix::new(colors.len());
    for i in 0..colors.len() {
        for j in (i + 1)..colors.len() {
            let rr = kinds[i] == JointKind::Revolute && kinds[j] == JointKind::Revolute;
            m.set(i, j, code(colors[i], colors[j], rng, rr));
        }
    }
    m
}

fn platform(side: PlatformSide, ends: &[(u8, JointKind)], rng: &mut impl Rng) -> PlatformRelations {
    let colors: Vec<u8> = ends.iter().map(|e| e.0).collect();
    let kinds: Vec<JointKind> = ends.iter().map(|e| e.1).collect();
    PlatformRelations {
        side,
        relations: relations(&colors, &kinds, rng),
        diagonal: kinds,
    }
}

pub fn random_mechanism(rng: &mut impl Rng, name: impl Into<String>) -> MechanismTopology {
    let leg_count = rng.gen_range(2..=6usize);
    let mut legs = Vec::new();
    let mut firsts = Vec::new();
    let mut lasts = Vec::new();
    for label in 1..=leg_count as u8 {
        let f = rng.gen_range(1..=6usize);
        let kinds: Vec<JointKind> = (0..f)
            .map(|_| if rng.gen_bool(0.7) { JointKind::Revolute } else { JointKind::Prismatic })
            .collect();
        let colors: Vec<u8> = (0..f).map(|_| rng.gen_range(0..PALETTE)).collect();
        let rel = relations(&colors, &kinds, rng);
        firsts.push((colors[0], kinds[0]));
        lasts.push((colors[f - 1], kinds[f - 1]));
        legs.push(LegTopology::new(label, kinds, rel));
    }
    let moving = platform(PlatformSide::Moving, &lasts, rng);
    let fixed = platform(PlatformSide::Fixed, &firsts, rng);
    MechanismTopology {
        name: name.into(),
        legs,
        moving,
        fixed,
    }
}

pub fn random_mechanisms(seed: u64, count: usize) -> Vec<MechanismTopology> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_mechanism(&mut rng, format!("random-{seed}-{i}"))).collect()
}
