//! Deterministic game families for the benchmarks in `benches/`.

use equilibra_core::graph::WAdj;
use equilibra_core::num::q;
use equilibra_core::zs::Graph2;

/// `n` vertices, each with edges to `v+1` and `(3v+1) mod n`, alternating owners.
pub fn two_player_ring(n: usize) -> (Graph2, Vec<u32>) {
    let succ = (0..n).map(|v| {
        let mut s = vec![(v + 1) % n, (3 * v + 1) % n];
        s.dedup();
        s
    });
    let g = Graph2::new(succ.collect(), (0..n).map(|v| v % 2 == 0).collect());
    let colors = (0..n).map(|v| ((v * 7) % 5) as u32).collect();
    (g, colors)
}

/// Weighted version of [`two_player_ring`] with rewards in `-3..=3`.
pub fn weighted_ring(n: usize) -> WAdj {
    (0..n)
        .map(|v| {
            let mut s = vec![((v + 1) % n, q((v as i64 * 5) % 7 - 3)), ((3 * v + 1) % n, q((v as i64 * 3) % 7 - 3))];
            s.dedup_by_key(|e| e.0);
            s
        })
        .collect()
}

/// Game file text for a `k`-level lottery ladder: chance vertices `c0..ck-1` each
/// exiting to terminal `t_i` with probability 1/2, the last one to `t_k`.
pub fn lottery_ladder(k: usize) -> String {
    let mut vertices = vec![r#"{"id":"s","owner":"A"}"#.to_string()];
    let mut edges = vec![r#"{"from":"s","to":"c0"}"#.to_string(), r#"{"from":"s","to":"tk"}"#.to_string()];
    let mut terminals = vec![r#""tk":{"A":"1/1","B":"1/1"}"#.to_string()];
    for i in 0..k {
        vertices.push(format!(r#"{{"id":"c{i}","owner":"chance"}}"#));
        vertices.push(format!(r#"{{"id":"t{i}","owner":"terminal"}}"#));
        let next = if i + 1 < k { format!("c{}", i + 1) } else { "tk".into() };
        edges.push(format!(r#"{{"from":"c{i}","to":"t{i}","prob":"1/2"}}"#));
        edges.push(format!(r#"{{"from":"c{i}","to":"{next}","prob":"1/2"}}"#));
        terminals.push(format!(r#""t{i}":{{"A":"{}/1","B":"{}/1"}}"#, i % 3, 2 - i % 3));
    }
    vertices.push(r#"{"id":"tk","owner":"terminal"}"#.to_string());
    format!(
        r#"{{"players":["A","B"],"mode":"terminal","init":"s","vertices":[{}],"edges":[{}],"terminals":{{{}}}}}"#,
        vertices.join(","),
        edges.join(","),
        terminals.join(",")
    )
}
