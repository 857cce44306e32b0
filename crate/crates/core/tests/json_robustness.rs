//! Malformed inputs must come back as structured errors, never panics.

use jointslab::config::{ConfigError, JointsConfiguration};
use jointslab::setsys::JointSetSystem;
use serde_json::json;

#[test]
fn config_loader_rejects_bad_shapes() {
    let ok = json!({
        "field": {"type": "rational"},
        "dim": 2,
        "points": [["0", "0"], ["1", "0"], ["0", "1"]],
        "lines": [
            {"base": 0, "dir": ["1", "0"]},
            {"base": 0, "dir": ["0", "1"]},
            {"base": 1, "dir": ["-1", "1"]},
        ],
        "joints": [
            {"point": 0, "lines": [0, 1]},
            {"point": 1, "lines": [0, 2]},
            {"point": 2, "lines": [1, 2]},
        ],
    });
    JointsConfiguration::from_json(&ok).unwrap();

    let mut bad_index = ok.clone();
    bad_index["joints"][0]["lines"] = json!([0, 9]);
    assert!(matches!(
        JointsConfiguration::from_json(&bad_index),
        Err(ConfigError::BadIndex { .. })
    ));

    let mut bad_scalar = ok.clone();
    bad_scalar["points"][0][0] = json!("1/0");
    assert!(JointsConfiguration::from_json(&bad_scalar).is_err());

    let mut short_dir = ok.clone();
    short_dir["lines"][0]["dir"] = json!(["1"]);
    assert!(matches!(
        JointsConfiguration::from_json(&short_dir),
        Err(ConfigError::WrongDimension { .. })
    ));

    let mut zero_dir = ok.clone();
    zero_dir["lines"][2]["dir"] = json!(["0", "0"]);
    assert!(matches!(
        JointsConfiguration::from_json(&zero_dir),
        Err(ConfigError::ZeroDirection(2))
    ));

    let mut bad_prime = ok.clone();
    bad_prime["field"] = json!({"type": "prime", "p": 10});
    // a composite modulus would make inversion panic downstream; reject it
    assert!(JointsConfiguration::from_json(&bad_prime).is_err());

    assert!(JointsConfiguration::from_json(&json!({"nonsense": 1})).is_err());
}

#[test]
fn system_loader_rejects_bad_shapes() {
    let ok = json!({
        "k": [1], "m": [2], "delta": 0, "ground": 3,
        "J": [[1, 2]],
        "F": [[[1], [2]]],
    });
    JointSetSystem::from_json(&ok).unwrap();

    let mut wrong_size = ok.clone();
    wrong_size["J"] = json!([[1, 2, 3]]);
    assert!(JointSetSystem::from_json(&wrong_size).is_err());

    let mut out_of_ground = ok.clone();
    out_of_ground["F"] = json!([[[1], [7]]]);
    assert!(JointSetSystem::from_json(&out_of_ground).is_err());

    let mut duplicate = ok.clone();
    duplicate["F"] = json!([[[1], [1]]]);
    assert!(JointSetSystem::from_json(&duplicate).is_err());
    // duplicates are fine in multiset mode
    let mut multiset = duplicate.clone();
    multiset["multiset"] = json!(true);
    JointSetSystem::from_json(&multiset).unwrap();

    let mut k_m_mismatch = ok.clone();
    k_m_mismatch["k"] = json!([1, 1]);
    assert!(JointSetSystem::from_json(&k_m_mismatch).is_err());
}
