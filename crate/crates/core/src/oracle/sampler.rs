//! Numeric realization of symbolic directions and subspaces.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{instantiate_geometry, linalg, project_out, random_unit, OracleError, Subspace};
use crate::algebra::{Direction, DirectionDescriptor, Token};
use crate::relation::{ClassId, RelationGraph};
use crate::topology::MechanismTopology;

/// Maps symbolic directions to vectors for one random geometry. Generic
/// directions (tokens) get their own random vectors, drawn on first use.
pub struct DirectionSampler<'g> {
    g: &'g RelationGraph,
    classes: BTreeMap<ClassId, Vector3<f64>>,
    tokens: BTreeMap<Token, Vector3<f64>>,
    rng: ChaCha8Rng,
}

impl<'g> DirectionSampler<'g> {
    pub fn new(mech: &MechanismTopology, g: &'g RelationGraph, seed: u64) -> Result<Self, OracleError> {
        let inst = instantiate_geometry(mech, g, seed)?;
        let classes = g
            .classes()
            .into_iter()
            .map(|c| (c, inst.axis(g.representative(c)).dir))
            .collect();
        Ok(Self {
            g,
            classes,
            tokens: BTreeMap::new(),
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0xd1ec_7104),
        })
    }

    fn token(&mut self, t: Token) -> Vector3<f64> {
        if let Some(v) = self.tokens.get(&t) {
            return *v;
        }
        let v = random_unit(&mut self.rng);
        self.tokens.insert(t, v);
        v
    }

    pub fn direction(&mut self, d: &Direction) -> Vector3<f64> {
        match d {
            Direction::Axis(c) => self.classes[c],
            Direction::Free(t) => self.token(*t),
            Direction::InPlane { normal, token } => {
                let n = self.direction(normal);
                let v = self.token(*token);
                project_out(v, &[n]).normalize()
            }
            Direction::Cross(a, b) => {
                let (a, b) = (self.direction(a), self.direction(b));
                a.cross(&b).normalize()
            }
        }
    }

    pub fn subspace(&mut self, d: &DirectionDescriptor) -> Subspace {
        let cols: Vec<Vector3<f64>> = match d {
            DirectionDescriptor::Empty => Vec::new(),
            DirectionDescriptor::Line(x) => vec![self.direction(x)],
            DirectionDescriptor::Plane(n) => {
                let n = self.direction(n);
                let u = project_out(Vector3::new(1.0, 0.3, 0.7), &[n]);
                let u = if u.norm() < 1e-3 { project_out(Vector3::new(0.2, 1.0, -0.4), &[n]) } else { u };
                let u = u.normalize();
                vec![u, n.cross(&u)]
            }
            DirectionDescriptor::Full => vec![Vector3::x(), Vector3::y(), Vector3::z()],
        };
        let m = DMatrix::from_fn(3, cols.len(), |i, j| cols[j][i]);
        linalg::span(&m)
    }

    pub fn graph(&self) -> &RelationGraph {
        self.g
    }
}
