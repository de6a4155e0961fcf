//! Bundled example games and memory structures.

const FILES: &[(&str, &str)] = &[
    ("chaos", include_str!("../../../corpus/chaos.json")),
    ("chaos_leader_machine", include_str!("../../../corpus/chaos_leader_machine.json")),
    ("ex_extreme1", include_str!("../../../corpus/ex_extreme1.json")),
    ("ex_extreme2", include_str!("../../../corpus/ex_extreme2.json")),
    ("ex_extreme3", include_str!("../../../corpus/ex_extreme3.json")),
    ("fig_ex_1player_machine", include_str!("../../../corpus/fig_ex_1player_machine.json")),
    ("fig_first_example", include_str!("../../../corpus/fig_first_example.json")),
    ("fig_ne_spe", include_str!("../../../corpus/fig_ne_spe.json")),
    ("inf_spe", include_str!("../../../corpus/inf_spe.json")),
    ("lottery", include_str!("../../../corpus/lottery.json")),
    ("not_stationary", include_str!("../../../corpus/not_stationary.json")),
    ("sans_spe", include_str!("../../../corpus/sans_spe.json")),
];

/// Names of the bundled files, sorted.
pub fn corpus_list() -> Vec<&'static str> {
    FILES.iter().map(|(n, _)| *n).collect()
}

pub fn get(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Memory-structure files, paired with the game they apply to.
pub fn machines() -> Vec<(&'static str, &'static str)> {
    vec![("fig_ex_1player_machine", "fig_first_example"), ("chaos_leader_machine", "chaos")]
}

/// Convenience loader for games in the corpus; panics on unknown names.
pub fn game(name: &str) -> crate::Game {
    crate::Game::parse(get(name).unwrap_or_else(|| panic!("no corpus entry {name}"))).expect("corpus game parses")
}
