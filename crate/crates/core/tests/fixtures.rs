use std::path::PathBuf;

use poc_mobility::algebra::RelationPolicy;
use poc_mobility::mechfile::parse_file;
use poc_mobility::mobility::{analyze_mechanism, MobilityReport};
use poc_mobility::oracle::{check_agreement, seed_list, DEFAULT_SEED};
use poc_mobility::relation::build_relation_graph;
use poc_mobility::topology::MechanismTopology;

fn load(name: &str) -> MechanismTopology {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    parse_file(&text).unwrap().mechanism
}

struct Expect {
    file: &'static str,
    dof: i32,
    sum_f: u32,
    loops: &'static [u8],
    class: &'static str,
}

const EXPECTED: &[Expect] = &[
    Expect { file: "tricept.mech", dof: 3, sum_f: 21, loops: &[6, 6, 6], class: "1T2R" },
    Expect { file: "3rrc.mech", dof: 3, sum_f: 12, loops: &[5, 4], class: "3T0R" },
    Expect { file: "3rrc-parallel.mech", dof: 4, sum_f: 12, loops: &[4, 4], class: "3T1R" },
    Expect { file: "coaxial-2r.mech", dof: 1, sum_f: 2, loops: &[1], class: "0T1R" },
    Expect { file: "3rrc-plus-r.mech", dof: 0, sum_f: 13, loops: &[5, 4, 4], class: "0T0R" },
    Expect { file: "three-p.mech", dof: 0, sum_f: 3, loops: &[2, 1], class: "0T0R" },
    Expect { file: "3-prrr.mech", dof: 3, sum_f: 12, loops: &[5, 4], class: "3T0R" },
    Expect { file: "ups-up.mech", dof: 3, sum_f: 9, loops: &[6], class: "1T2R" },
    Expect { file: "6-ups.mech", dof: 6, sum_f: 36, loops: &[6, 6, 6, 6, 6], class: "3T3R" },
    Expect { file: "offset-r.mech", dof: 0, sum_f: 3, loops: &[3], class: "0T0R" },
    Expect { file: "offset-r-planar.mech", dof: 1, sum_f: 4, loops: &[3], class: "0T1R" },
];

fn analyze(name: &str) -> (MechanismTopology, MobilityReport) {
    let m = load(name);
    let r = analyze_mechanism(&m, RelationPolicy::GeneralPosition).unwrap();
    (m, r)
}

#[test]
fn fixtures_match_expected_values() {
    for e in EXPECTED {
        let (_, r) = analyze(e.file);
        let loops: Vec<u8> = r.loops.iter().map(|l| l.xi).collect();
        assert_eq!(
            (r.dof, r.total_joint_dof, loops.as_slice(), r.classification.as_str()),
            (e.dof, e.sum_f, e.loops, e.class),
            "{}",
            e.file
        );
    }
}

#[test]
fn fixtures_agree_with_oracle() {
    for e in EXPECTED {
        let (m, r) = analyze(e.file);
        let g = build_relation_graph(&m).unwrap();
        let a = check_agreement(&r, &m, &g, &seed_list(DEFAULT_SEED, 20));
        assert!(a.all_agree(), "{}: {:?}", e.file, a.first_problem());
    }
}

#[test]
fn closure_makes_base_axes_parallel() {
    use poc_mobility::relation::AxisRef;
    use poc_mobility::topology::RelationCode;
    let m = load("3rrc-parallel.mech");
    let g = build_relation_graph(&m).unwrap();
    assert_eq!(g.relation_between(AxisRef::new(1, 1), AxisRef::new(3, 1)).unwrap(), RelationCode::Parallel);
}
