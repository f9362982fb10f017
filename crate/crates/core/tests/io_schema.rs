use std::path::PathBuf;

use nalgebra::Matrix3;
use serde_json::{json, Value};

use slaglab::algebra::phi0;
use slaglab::g2::{coassoc_from_slag, normal_structure, CoassocPlane, SelfDualFieldSample};
use slaglab::io::{load_document, parse_document, IoError, MuDocument, PairDocument};
use slaglab::loops::{connected_sum_descriptor, generate_model_loop, ConnectedSumDescriptor, ModelKind, PairLoop};
use slaglab::random;
use slaglab::slag::{AngleVector, SLagPlane};
use slaglab::Z2;

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn write_temp(name: &str, v: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slaglab-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn mu_doc(n_minus: usize) -> Value {
    let mut r = random::rng(5);
    let plus = random::framing_loop(&mut r, 1, 16).unwrap();
    let minus = random::framing_loop(&mut r, 0, n_minus).unwrap();
    json!({"plus": plus, "minus": minus})
}

#[test]
fn well_formed_plane_loads() {
    let mut r = random::rng(1);
    let p = random::slag_plane(&mut r);
    let path = write_temp("plane.json", &serde_json::to_value(p).unwrap());
    let back: SLagPlane = load_document(&path).unwrap();
    assert!(back.distance(&p) < 1e-15);
    assert!(back.is_special());
}

#[test]
fn non_unitary_plane_is_a_schema_violation() {
    let mut v = serde_json::to_value(SLagPlane::standard()).unwrap();
    v["frame"][0][0] = json!([1.5, 0.0]);
    assert!(schema("plane").is_valid(&v));
    let path = write_temp("bad_plane.json", &v);
    match load_document::<SLagPlane>(&path) {
        Err(IoError::SchemaViolation { pointer, message }) => {
            assert_eq!(pointer, "/");
            assert!(message.contains("unitary"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn mismatched_counts_are_a_schema_violation() {
    let path = write_temp("mu.json", &mu_doc(12));
    match load_document::<MuDocument>(&path) {
        Err(IoError::SchemaViolation { message, .. }) => assert!(message.contains("mismatched"), "{message}"),
        other => panic!("{other:?}"),
    }
    let ok: MuDocument = parse_document(&mu_doc(16).to_string()).unwrap();
    assert_eq!(ok.plus.len(), ok.minus.len());
}

#[test]
fn errors_carry_locations() {
    match parse_document::<PairDocument>("{\"V\": ]") {
        Err(IoError::Syntax { line, .. }) => assert_eq!(line, 1),
        other => panic!("{other:?}"),
    }
    let mut r = random::rng(2);
    let l = random::pair_loop(&mut r, ModelKind::Trivial, 8, 0.5).unwrap();
    let mut v = serde_json::to_value(&l).unwrap();
    v["samples"][3]["Vp"][1][1] = json!([0.0, 0.2]);
    match parse_document::<PairLoop>(&v.to_string()) {
        Err(IoError::SchemaViolation { pointer, .. }) => assert_eq!(pointer, "/samples/3/Vp"),
        other => panic!("{other:?}"),
    }
    let missing = std::env::temp_dir().join("slaglab-no-such-file.json");
    assert!(matches!(load_document::<SLagPlane>(&missing), Err(IoError::Read { .. })));
}

#[test]
fn generated_documents_match_shipped_schemas() {
    let mut r = random::rng(3);
    let pair = random::close_graphical_pair(&mut r);
    let u = random::unit_im_octonion(&mut r);
    let ns = normal_structure(&u).unwrap();
    let coassoc: CoassocPlane = coassoc_from_slag(&ns, &pair.v).unwrap();
    let field = SelfDualFieldSample::from_fn(0.1, 1, |x| [x[1], x[2], x[3]]).unwrap();
    let descriptor = connected_sum_descriptor(&ConnectedSumDescriptor::new(vec![Z2::Plus, Z2::Minus])).unwrap();
    let docs: Vec<(&str, Value)> = vec![
        ("plane", serde_json::to_value(pair.v).unwrap()),
        ("angle_vector", serde_json::to_value(pair.theta).unwrap()),
        ("pair", serde_json::to_value(PairDocument { v: pair.v, vp: pair.vp }).unwrap()),
        ("pair_loop", serde_json::to_value(generate_model_loop(ModelKind::Moebius, 8, 0.5).unwrap()).unwrap()),
        ("framing_loop", serde_json::to_value(random::framing_loop(&mut r, 1, 8).unwrap()).unwrap()),
        ("mu", mu_doc(16)),
        ("field", serde_json::to_value(&field).unwrap()),
        ("coassoc", serde_json::to_value(coassoc).unwrap()),
        ("kform", serde_json::to_value(phi0()).unwrap()),
        ("descriptor", serde_json::to_value(&descriptor).unwrap()),
    ];
    for (name, doc) in &docs {
        let v = schema(name);
        let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
    }

    let mut extra = docs[0].1.clone();
    extra["extra"] = json!(1);
    assert!(!schema("plane").is_valid(&extra));
    assert!(parse_document::<SLagPlane>(&extra.to_string()).is_err());
    assert!(!schema("angle_vector").is_valid(&json!({"theta": [1.0, 1.0], "m": 1})));
    assert!(!schema("coassoc").is_valid(&json!({"span": vec![[0.0; 7]; 4], "orient": 0})));
    let mut both = mu_doc(16);
    both["iso"] = json!([]);
    both["pairs"] = docs[3].1.clone();
    assert!(!schema("mu").is_valid(&both));
}

#[test]
fn angle_and_iso_documents_round_trip() {
    let a: AngleVector = parse_document(r#"{"theta": [0.5, 1.0, 1.6415926535897931], "m": 1}"#).unwrap();
    assert_eq!(a.trace_class(), 1);
    let mut doc = mu_doc(16);
    doc["iso"] = json!(vec![[[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]; 16]);
    assert!(schema("mu").is_valid(&doc));
    let m: MuDocument = parse_document(&doc.to_string()).unwrap();
    assert_eq!(m.iso.unwrap()[0], -Matrix3::identity());
}
