//! Error paths and round trips for the three on-disk formats: group tables,
//! representation files, and tensor exports.

use std::sync::Arc;

use scenery_core::caps::Caps;
use scenery_core::group::{group_from_file, group_from_json, quaternion8};
use scenery_core::repr::{irreducible_representations, irreps_from_json, irreps_to_json};
use scenery_core::scenery::{multispectrum, tensor_from_json, tensor_to_json, Scenery};

#[test]
fn group_file_happy_path_via_disk() {
    let q8 = quaternion8();
    let json = serde_json::to_string(&q8.to_json()).unwrap();
    let path = std::env::temp_dir().join(format!("scenery-test-group-{}.json", std::process::id()));
    std::fs::write(&path, &json).unwrap();
    let loaded = group_from_file(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(*loaded, *q8);
}

#[test]
fn group_file_rejects_bad_tables() {
    // wrong declared order
    let bad = r#"{"name":"x","order":3,"table":[[0,1],[1,0]]}"#;
    assert!(group_from_json(bad).is_err());
    // identity not at index 0
    let bad = r#"{"name":"x","order":2,"table":[[1,0],[0,1]]}"#;
    let err = group_from_json(bad).unwrap_err().to_string();
    assert!(err.contains("identity"), "{err}");
    // not associative / not a Latin square
    let bad = r#"{"name":"x","order":3,"table":[[0,1,2],[1,1,2],[2,2,2]]}"#;
    assert!(group_from_json(bad).is_err());
    // malformed JSON
    assert!(group_from_json("{not json").is_err());
}

#[test]
fn rep_file_rejects_mismatched_shapes() {
    let q8 = quaternion8();
    let set = irreducible_representations(&q8).unwrap();
    let mut entries = irreps_to_json(&set);
    entries[0].matrices.pop(); // drop one element's matrix
    let json = serde_json::to_string(&entries).unwrap();
    let err = irreps_from_json(&q8, &json).unwrap_err().to_string();
    assert!(err.contains("expected 8 matrices"), "{err}");

    let mut entries = irreps_to_json(&set);
    entries[4].degree = 3; // lie about the degree
    let json = serde_json::to_string(&entries).unwrap();
    assert!(irreps_from_json(&q8, &json).is_err());
}

#[test]
fn rep_file_rejects_non_homomorphisms() {
    let q8 = quaternion8();
    let set = irreducible_representations(&q8).unwrap();
    let mut entries = irreps_to_json(&set);
    entries[4].matrices[3][0][1] = [0.7, 0.7]; // corrupt one entry
    let json = serde_json::to_string(&entries).unwrap();
    assert!(irreps_from_json(&q8, &json).is_err());
}

#[test]
fn tensor_export_row_major_layout() {
    let q8 = quaternion8();
    let f = Scenery::from_bitstring(Arc::clone(&q8), "11010010").unwrap();
    let t = multispectrum(&f, 2, &Caps::default()).unwrap();
    let file = tensor_to_json(&t);
    assert_eq!(file.order, 2);
    assert_eq!(file.values.len(), 64);
    // flat index of (x1, x2) is x1 * 8 + x2
    for x1 in 0..8 {
        for x2 in 0..8 {
            let [re, im] = file.values[x1 * 8 + x2];
            assert_eq!(re, t.get(&[x1, x2]).re);
            assert_eq!(im, 0.0);
        }
    }
    let back = tensor_from_json(&q8, &serde_json::to_string(&file).unwrap()).unwrap();
    assert_eq!(back, t);
}

#[test]
fn tensor_import_rejects_wrong_length() {
    let q8 = quaternion8();
    let json = r#"{"schema_version":1,"group":"Q8","group_order":8,"order":2,"values":[[1.0,0.0]]}"#;
    assert!(tensor_from_json(&q8, json).is_err());
}
