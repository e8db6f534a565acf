use std::fs;
use std::path::PathBuf;

use odelump::ir::Partition;
use odelump::lump::{brute_force_coarsest, check_bde, check_fde, coarsest_bde, coarsest_fde, Mode};
use odelump::parser::{parse_model, serialize_model, Form, ModelDocument, SerializeError};

fn golden() -> Vec<(String, ModelDocument)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "ode"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let text = fs::read_to_string(&p).unwrap();
            let doc = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, doc)
        })
        .collect()
}

#[test]
fn corpus_is_large_enough() {
    assert!(golden().len() >= 20);
}

#[test]
fn ode_form_round_trips() {
    for (name, doc) in golden() {
        let text = serialize_model(&doc, Form::Ode).unwrap();
        let back = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(back.ode(), doc.ode(), "{name}");
        assert_eq!(back.partition, doc.partition, "{name}");
        assert_eq!(serialize_model(&back, Form::Ode).unwrap(), text, "{name}: serialization is not a fixed point");
    }
}

#[test]
fn reaction_form_round_trips_for_polynomial_models() {
    for (name, doc) in golden() {
        let system = doc.ode();
        match serialize_model(&doc, Form::Rn) {
            Ok(text) => {
                assert!(system.is_polynomial(), "{name}");
                let back = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
                assert_eq!(back.ode(), system, "{name}");
                assert_eq!(serialize_model(&back, Form::Rn).unwrap(), text, "{name}");
            }
            Err(SerializeError::NonPolynomialDrift(_)) => assert!(!system.is_polynomial(), "{name}"),
        }
    }
}

#[test]
fn declared_partitions_are_equivalences() {
    for (name, doc) in golden() {
        let system = doc.ode();
        let (Some(p), true) = (&doc.partition, system.is_polynomial()) else { continue };
        let bde = check_bde(&system, p).unwrap().is_ok();
        let fde = check_fde(&system, p).unwrap().is_ok();
        assert!(bde || fde, "{name}: declared partition is neither forward nor backward");
    }
}

#[test]
fn refinement_matches_oracle_on_corpus() {
    for (name, doc) in golden() {
        let system = doc.ode();
        if !system.is_polynomial() {
            continue;
        }
        let seed = Partition::one_block(system.len());
        assert_eq!(coarsest_bde(&system, &seed), brute_force_coarsest(&system, &seed, Mode::Backward), "{name}");
        assert_eq!(coarsest_fde(&system, &seed), brute_force_coarsest(&system, &seed, Mode::Forward), "{name}");
    }
}
