//! Plain digraph helpers over successor lists: SCCs, reachability, cycles, Karp.

use std::collections::VecDeque;

use num_traits::Zero;

use crate::num::Q;

/// Strongly connected components of the subgraph induced by `alive`,
/// in reverse topological order (sinks first).
pub fn sccs(adj: &[Vec<usize>], alive: &[bool]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if !alive[root] || index[root] != usize::MAX {
            continue;
        }
        // (vertex, next successor position)
        let mut call = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if !alive[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// True if the component carries a cycle (more than one vertex or a self-loop).
pub fn is_nontrivial(adj: &[Vec<usize>], comp: &[usize]) -> bool {
    comp.len() > 1 || adj[comp[0]].contains(&comp[0])
}

pub fn reachable(adj: &[Vec<usize>], from: &[usize], alive: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut q: VecDeque<usize> = VecDeque::new();
    for &s in from {
        if alive[s] && !seen[s] {
            seen[s] = true;
            q.push_back(s);
        }
    }
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if alive[w] && !seen[w] {
                seen[w] = true;
                q.push_back(w);
            }
        }
    }
    seen
}

/// Shortest path (as a vertex list, both ends included) from `s` to a vertex of `target`.
pub fn bfs_path(adj: &[Vec<usize>], s: usize, target: &[bool], alive: &[bool]) -> Option<Vec<usize>> {
    if !alive[s] {
        return None;
    }
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        if target[v] {
            let mut path = vec![v];
            let mut x = v;
            while x != s {
                x = parent[x];
                path.push(x);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &adj[v] {
            if alive[w] && !seen[w] {
                seen[w] = true;
                parent[w] = v;
                q.push_back(w);
            }
        }
    }
    None
}

/// A closed walk inside the strongly connected set `comp` visiting each of its vertices,
/// starting at `start`. Returns the walk without repeating `start` at the end.
pub fn covering_cycle(adj: &[Vec<usize>], comp: &[usize], start: usize) -> Vec<usize> {
    let n = adj.len();
    let mut alive = vec![false; n];
    for &v in comp {
        alive[v] = true;
    }
    let mut walk = vec![start];
    let mut cur = start;
    let mut visited = vec![false; n];
    visited[start] = true;
    let mut order: Vec<usize> = comp.to_vec();
    order.sort_unstable();
    for &t in &order {
        if visited[t] {
            continue;
        }
        let mut tgt = vec![false; n];
        tgt[t] = true;
        let p = bfs_path(adj, cur, &tgt, &alive).expect("strongly connected");
        for &x in &p[1..] {
            visited[x] = true;
            walk.push(x);
        }
        cur = t;
    }
    // close the walk
    let mut tgt = vec![false; n];
    tgt[start] = true;
    if cur == start {
        if walk.len() == 1 {
            // single vertex: needs its self-loop, which the caller guarantees
            return walk;
        }
    }
    // path back to start (may be just an edge)
    let back = {
        let mut best: Option<Vec<usize>> = None;
        for &w in &adj[cur] {
            if !alive[w] {
                continue;
            }
            if let Some(p) = bfs_path(adj, w, &tgt, &alive) {
                if best.as_ref().map_or(true, |b| p.len() < b.len()) {
                    best = Some(p);
                }
            }
        }
        best.expect("strongly connected")
    };
    // `back` goes from a successor of cur to start; drop the final start
    walk.extend(&back[..back.len() - 1]);
    walk
}

/// All simple cycles of the subgraph induced by `alive`; each starts at its least vertex.
pub fn simple_cycles(adj: &[Vec<usize>], alive: &[bool]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut path = Vec::new();
    for s in 0..n {
        if !alive[s] {
            continue;
        }
        // DFS over vertices >= s only
        fn dfs(
            adj: &[Vec<usize>],
            alive: &[bool],
            s: usize,
            v: usize,
            on_path: &mut Vec<bool>,
            path: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            path.push(v);
            on_path[v] = true;
            for &w in &adj[v] {
                if !alive[w] || w < s {
                    continue;
                }
                if w == s {
                    out.push(path.clone());
                } else if !on_path[w] {
                    dfs(adj, alive, s, w, on_path, path, out);
                }
            }
            on_path[v] = false;
            path.pop();
        }
        dfs(adj, alive, s, s, &mut on_path, &mut path, &mut out);
    }
    out
}

/// Weighted successor list entry: (target, weight).
pub type WAdj = Vec<Vec<(usize, Q)>>;

/// Minimum mean over all cycles of the subgraph induced by `alive` (Karp), with a witness
/// simple cycle. Returns `None` if that subgraph is acyclic.
pub fn min_mean_cycle(adj: &WAdj, alive: &[bool]) -> Option<(Q, Vec<usize>)> {
    let plain: Vec<Vec<usize>> = adj.iter().map(|s| s.iter().map(|(w, _)| *w).collect()).collect();
    let mut best: Option<(Q, Vec<usize>)> = None;
    for comp in sccs(&plain, alive) {
        if !is_nontrivial(&plain, &comp) {
            continue;
        }
        let mu = karp_component(adj, &comp);
        let better = best.as_ref().map_or(true, |(b, _)| mu < *b);
        if better {
            let c = tight_cycle(adj, &comp, &mu);
            best = Some((mu, c));
        }
    }
    best
}

/// Maximum mean cycle, by negation.
pub fn max_mean_cycle(adj: &WAdj, alive: &[bool]) -> Option<(Q, Vec<usize>)> {
    let neg: WAdj = adj.iter().map(|s| s.iter().map(|(w, x)| (*w, -x.clone())).collect()).collect();
    min_mean_cycle(&neg, alive).map(|(m, c)| (-m, c))
}

fn karp_component(adj: &WAdj, comp: &[usize]) -> Q {
    let n = adj.len();
    let k = comp.len();
    let mut pos = vec![usize::MAX; n];
    for (j, &v) in comp.iter().enumerate() {
        pos[v] = j;
    }
    // d[t][j]: least weight of a walk with t edges from comp[0] to comp[j]
    let mut d: Vec<Vec<Option<Q>>> = vec![vec![None; k]; k + 1];
    d[0][0] = Some(Q::zero());
    for t in 1..=k {
        for (j, &v) in comp.iter().enumerate() {
            if let Some(dv) = d[t - 1][j].clone() {
                for (w, x) in &adj[v] {
                    let pw = pos[*w];
                    if pw == usize::MAX {
                        continue;
                    }
                    let cand = &dv + x;
                    let slot = &mut d[t][pw];
                    if slot.as_ref().map_or(true, |s| cand < *s) {
                        *slot = Some(cand);
                    }
                }
            }
        }
    }
    let mut best: Option<Q> = None;
    for j in 0..k {
        let Some(dn) = d[k][j].clone() else { continue };
        let mut worst: Option<Q> = None;
        for t in 0..k {
            if let Some(dt) = &d[t][j] {
                let val = (&dn - dt) / Q::from_integer(((k - t) as i64).into());
                if worst.as_ref().map_or(true, |w| val > *w) {
                    worst = Some(val);
                }
            }
        }
        if let Some(w) = worst {
            if best.as_ref().map_or(true, |b| w < *b) {
                best = Some(w);
            }
        }
    }
    best.expect("a nontrivial component has a walk of every length")
}

/// A simple cycle of mean exactly `mu` inside `comp`, where `mu` is the minimum mean there:
/// after shifting weights by `mu` no cycle is negative, so any cycle of tight edges has weight 0.
/// Among tight cycles the one with the least canonical vertex sequence is returned.
fn tight_cycle(adj: &WAdj, comp: &[usize], mu: &Q) -> Vec<usize> {
    let n = adj.len();
    let mut inside = vec![false; n];
    for &v in comp {
        inside[v] = true;
    }
    // Bellman-Ford from a virtual source at distance 0 to everyone.
    let mut dist: Vec<Q> = vec![Q::zero(); n];
    for _ in 0..comp.len() {
        let mut changed = false;
        for &u in comp {
            for (v, x) in &adj[u] {
                if !inside[*v] {
                    continue;
                }
                let cand = &dist[u] + x - mu;
                if cand < dist[*v] {
                    dist[*v] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            if !inside[u] {
                return Vec::new();
            }
            adj[u]
                .iter()
                .filter(|(v, x)| inside[*v] && &dist[u] + x - mu == dist[*v])
                .map(|(v, _)| *v)
                .collect()
        })
        .collect();
    let mut cycles = simple_cycles(&tight, &inside);
    cycles.sort();
    cycles.into_iter().next().expect("a minimum-mean cycle is tight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qf};

    #[test]
    fn scc_order() {
        let adj = vec![vec![1], vec![0, 2], vec![2]];
        let c = sccs(&adj, &[true; 3]);
        assert_eq!(c, vec![vec![2], vec![0, 1]]);
    }

    #[test]
    fn karp_two_loops() {
        let adj: WAdj = vec![vec![(0, q(0)), (1, q(2))], vec![(1, q(1)), (0, q(2))]];
        let (m, c) = min_mean_cycle(&adj, &[true; 2]).unwrap();
        assert_eq!(m, q(0));
        assert_eq!(c, vec![0]);
        let (m, c) = max_mean_cycle(&adj, &[true; 2]).unwrap();
        assert_eq!(m, q(2));
        assert_eq!(c, vec![0, 1]);
    }

    #[test]
    fn karp_fractional() {
        let adj: WAdj = vec![vec![(1, q(1))], vec![(2, q(0))], vec![(0, q(0))]];
        assert_eq!(min_mean_cycle(&adj, &[true; 3]).unwrap().0, qf(1, 3));
    }

    #[test]
    fn covering() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let w = covering_cycle(&adj, &[0, 1, 2], 0);
        assert_eq!(w, vec![0, 1, 2, 1]);
    }
}
