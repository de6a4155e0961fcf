use equilibra_core::{corpus, Game, MemoryProfile};

fn is_machine(name: &str) -> bool {
    corpus::machines().iter().any(|(m, _)| *m == name)
}

#[test]
fn corpus_has_the_bundled_figures() {
    let names = corpus::corpus_list();
    assert!(names.len() >= 10);
    for n in ["fig_ne_spe", "fig_first_example", "sans_spe", "not_stationary", "inf_spe", "chaos", "lottery"] {
        assert!(names.contains(&n), "{n} missing");
    }
}

#[test]
fn games_validate_and_round_trip_byte_for_byte() {
    for name in corpus::corpus_list().into_iter().filter(|n| !is_machine(n)) {
        let text = corpus::get(name).unwrap();
        let g = Game::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        g.validate().unwrap();
        assert_eq!(g.to_canonical_string(), text, "{name} is not in canonical form");
        assert_eq!(Game::parse(&g.to_canonical_string()).unwrap().to_canonical_string(), text);
    }
}

#[test]
fn machines_parse_against_their_games() {
    for (m, g) in corpus::machines() {
        let game = corpus::game(g);
        let text = corpus::get(m).unwrap();
        let p = MemoryProfile::parse(&game.arena, text).unwrap_or_else(|e| panic!("{m}: {e}"));
        assert_eq!(p.to_canonical_string(&game.arena), text, "{m} is not in canonical form");
    }
}

#[test]
fn files_on_disk_match_the_bundle() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus");
    for name in corpus::corpus_list() {
        let disk = std::fs::read_to_string(format!("{dir}/{name}.json")).unwrap();
        assert_eq!(disk, corpus::get(name).unwrap(), "{name}");
    }
}

#[test]
fn rejects_bad_probabilities() {
    let text = r#"{"players":["p"],"mode":"terminal","init":"a",
        "vertices":[{"id":"a","owner":"chance"},{"id":"t","owner":"terminal"},{"id":"u","owner":"terminal"}],
        "edges":[{"from":"a","to":"t","prob":"1/2"},{"from":"a","to":"u","prob":"1/3"}],
        "terminals":{"t":{"p":"1/1"},"u":{"p":"0/1"}}}"#;
    let err = Game::parse(text).unwrap_err().to_string();
    assert!(err.contains("probab"), "{err}");
}
