mod common;

use common::config;
use odelump::parser::{parse_model, serialize_model, Form, ParseError};
use proptest::prelude::*;

const BASE: &str = "begin model
  begin init
    x1 = 1
    x2 = 1/2
    x3 = 0
  end init
  begin ode
    d(x1) = -x1 + min(x2, x3)
    d(x2) = 2*x1*x3 - x2/4
    d(x3) = abs(x1 - x2)
  end ode
  begin partition
    {x1}, {x2, x3}
  end partition
  begin observe
    x1
  end observe
end model
";

fn inside(text: &str, e: &ParseError) -> bool {
    let pos = e.position();
    let lines: Vec<&str> = text.split('\n').collect();
    pos.line >= 1
        && pos.line <= lines.len()
        && pos.column >= 1
        && pos.column <= lines[pos.line - 1].chars().count().max(1)
}

#[derive(Clone, Debug)]
enum Edit {
    Delete(usize),
    Insert(usize, char),
    Replace(usize, char),
}

fn edit() -> impl Strategy<Value = Edit> {
    let at = 0..BASE.len();
    let ch = prop::sample::select(vec![
        '(', ')', '{', '}', ',', '+', '*', '/', '=', '-', '>', 'x', '9', '.', ' ', '\n', '#', 'd',
    ]);
    prop_oneof![
        at.clone().prop_map(Edit::Delete),
        (at.clone(), ch.clone()).prop_map(|(i, c)| Edit::Insert(i, c)),
        (at, ch).prop_map(|(i, c)| Edit::Replace(i, c)),
    ]
}

fn apply(edits: &[Edit]) -> String {
    let mut chars: Vec<char> = BASE.chars().collect();
    for e in edits {
        match *e {
            Edit::Delete(i) if i < chars.len() => {
                chars.remove(i);
            }
            Edit::Insert(i, c) => chars.insert(i.min(chars.len()), c),
            Edit::Replace(i, c) if i < chars.len() => chars[i] = c,
            _ => {}
        }
    }
    chars.into_iter().collect()
}

#[test]
fn base_model_parses() {
    let doc = parse_model(BASE).unwrap();
    let text = serialize_model(&doc, Form::Ode).unwrap();
    assert_eq!(parse_model(&text).unwrap().ode(), doc.ode());
}

#[test]
fn end_of_input_errors_point_into_the_text() {
    for cut in [10, 40, 100, BASE.len() - 2] {
        let text = &BASE[..cut];
        let e = parse_model(text).unwrap_err();
        assert!(inside(text, &e), "{e} for prefix of {cut}");
    }
}

proptest! {
    #![proptest_config(config(400))]

    #[test]
    fn errors_point_into_the_text(edits in prop::collection::vec(edit(), 1..4)) {
        let text = apply(&edits);
        if let Err(e) = parse_model(&text) {
            prop_assert!(inside(&text, &e), "{} outside of\n{}", e, text);
        }
    }

    #[test]
    fn accepted_mutants_round_trip(edits in prop::collection::vec(edit(), 1..3)) {
        let text = apply(&edits);
        if let Ok(doc) = parse_model(&text) {
            let again = parse_model(&serialize_model(&doc, Form::Ode).unwrap()).unwrap();
            prop_assert_eq!(again.ode(), doc.ode());
            prop_assert_eq!(again.partition, doc.partition);
        }
    }
}
