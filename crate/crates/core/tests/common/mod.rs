#![allow(dead_code)]

use gsci::channels::{PauliParams, RayDirection};
use gsci::graphs::CodeGraph;
use gsci::permgroup::canonical_form;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform point of the probability simplex.
pub fn random_point(rng: &mut ChaCha8Rng) -> PauliParams {
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
    let s: f64 = w.iter().sum();
    PauliParams::new(w[0] / s, w[1] / s, w[2] / s, 1.0 - (w[0] + w[1] + w[2]) / s).unwrap()
}

pub fn random_direction(rng: &mut ChaCha8Rng) -> RayDirection {
    let w: [f64; 3] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
    RayDirection::normalized(w).unwrap()
}

pub fn connected(adj: &[u64]) -> bool {
    let n = adj.len();
    if n == 0 {
        return false;
    }
    let mut seen = 1u64;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        let mut fresh = adj[v] & !seen;
        seen |= fresh;
        while fresh != 0 {
            stack.push(fresh.trailing_zeros() as usize);
            fresh &= fresh - 1;
        }
    }
    seen.count_ones() as usize == n
}

/// Random connected graph on `n` vertices with edge probability 1/2.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
    loop {
        let mut adj = vec![0u64; n];
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.5) {
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                }
            }
        }
        if connected(&adj) {
            return adj;
        }
    }
}

/// Non-isomorphic graphs on `n` vertices (connected or not), grown one
/// vertex at a time.
pub fn all_graphs(n: usize) -> Vec<Vec<u64>> {
    let mut level: Vec<Vec<u64>> = vec![vec![]];
    for m in 1..=n {
        let mut next = std::collections::BTreeMap::new();
        for g in &level {
            for nb in 0..1u64 << (m - 1) {
                let mut adj = g.clone();
                adj.push(nb);
                for v in 0..m - 1 {
                    if nb >> v & 1 == 1 {
                        adj[v] |= 1 << (m - 1);
                    }
                }
                let cf = canonical_form(&adj, &vec![0; m]);
                next.entry(cf.rows).or_insert(adj);
            }
        }
        level = next.into_values().collect();
    }
    level
}

/// Connected codes on `n` vertices with `k_sys` system vertices, one per
/// isomorphism class that keeps the system set.
pub fn all_codes(n: usize, k_sys: usize) -> Vec<CodeGraph> {
    let mut out = std::collections::BTreeMap::new();
    for adj in all_graphs(n).into_iter().filter(|a| connected(a)) {
        // Every choice of environment set, as a relabeling putting it last.
        for env in 0..1u64 << n {
            if env.count_ones() as usize != n - k_sys {
                continue;
            }
            let order: Vec<usize> = (0..n).filter(|v| env >> v & 1 == 0).chain((0..n).filter(|v| env >> v & 1 == 1)).collect();
            let mut rel = vec![0u64; n];
            for (new_a, &a) in order.iter().enumerate() {
                for (new_b, &b) in order.iter().enumerate() {
                    if adj[a] >> b & 1 == 1 {
                        rel[new_a] |= 1 << new_b;
                    }
                }
            }
            let colors: Vec<u32> = (0..n).map(|v| u32::from(v >= k_sys)).collect();
            let cf = canonical_form(&rel, &colors);
            out.entry(cf.rows).or_insert(rel);
        }
    }
    out.into_values().map(|adj| CodeGraph::from_adjacency(k_sys, adj).unwrap()).collect()
}
