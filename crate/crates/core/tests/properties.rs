use std::path::PathBuf;

use proptest::prelude::*;

use poc_mobility::algebra::RelationPolicy;
use poc_mobility::generate::random_mechanisms;
use poc_mobility::mechfile::{parse_file, to_text};
use poc_mobility::mobility::{analyze_batch, analyze_mechanism};
use poc_mobility::topology::{MechanismTopology, PlatformRelations, RelationMatrix};

const FIXTURES: &[&str] = &[
    "tricept.mech",
    "3rrc.mech",
    "3rrc-parallel.mech",
    "coaxial-2r.mech",
    "3rrc-plus-r.mech",
    "three-p.mech",
    "3-prrr.mech",
    "ups-up.mech",
    "6-ups.mech",
    "offset-r.mech",
    "offset-r-planar.mech",
];

fn load(name: &str) -> MechanismTopology {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    parse_file(&std::fs::read_to_string(path).unwrap()).unwrap().mechanism
}

/// Reorders the legs and renumbers them 1..n.
fn permute(m: &MechanismTopology, order: &[usize]) -> MechanismTopology {
    let platform = |p: &PlatformRelations| {
        let mut rel = RelationMatrix::new(order.len());
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                rel.set(i, j, p.relations.get(order[i], order[j]));
            }
        }
        PlatformRelations {
            side: p.side,
            diagonal: order.iter().map(|&k| p.diagonal[k]).collect(),
            relations: rel,
        }
    };
    let legs = order
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut leg = m.legs[k].clone();
            leg.label = i as u8 + 1;
            leg
        })
        .collect();
    MechanismTopology {
        name: m.name.clone(),
        legs,
        moving: platform(&m.moving),
        fixed: platform(&m.fixed),
    }
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leg_order_does_not_change_mobility(
        (name, order) in prop::sample::select(FIXTURES)
            .prop_flat_map(|f| (Just(f), shuffled(load(f).legs.len())))
    ) {
        let m = load(name);
        let a = analyze_mechanism(&m, RelationPolicy::GeneralPosition).unwrap();
        let b = analyze_mechanism(&permute(&m, &order), RelationPolicy::GeneralPosition).unwrap();
        prop_assert_eq!((a.dof, &a.classification), (b.dof, &b.classification));
    }

    #[test]
    fn mechanism_files_round_trip(seed in any::<u64>()) {
        for m in random_mechanisms(seed, 4) {
            let back = parse_file(&to_text(&m)).unwrap().mechanism;
            prop_assert_eq!(&back.legs, &m.legs);
            prop_assert_eq!(&back.moving, &m.moving);
            prop_assert_eq!(&back.fixed, &m.fixed);
        }
    }

    #[test]
    fn sub_mechanisms_only_lose_freedom(seed in any::<u64>()) {
        for m in random_mechanisms(seed, 4) {
            let r = analyze_mechanism(&m, RelationPolicy::GeneralPosition).unwrap();
            let mut prev = (r.legs[0].xi_t, r.legs[0].xi_r);
            for p in &r.sub_pms {
                let now = (p.xi_t(), p.xi_r());
                prop_assert!(now.0 <= prev.0 && now.1 <= prev.1, "{}: {:?} -> {:?}", m.name, prev, now);
                prev = now;
            }
            prop_assert!(r.loops.iter().all(|l| l.xi <= 6));
        }
    }
}

#[test]
fn batch_matches_one_by_one() {
    let mechs = random_mechanisms(3, 40);
    let batch: Vec<_> = analyze_batch(&mechs, RelationPolicy::GeneralPosition)
        .into_iter()
        .map(|r| r.unwrap().poc.rows())
        .collect();
    let single: Vec<_> = mechs
        .iter()
        .map(|m| analyze_mechanism(m, RelationPolicy::GeneralPosition).unwrap().poc.rows())
        .collect();
    assert_eq!(batch, single);
}
