//! Depolarizing thresholds of all two-level trees with `k` system vertices.
//!
//! Usage: `cargo run --release --example tree_thresholds -- 16`
//!
//! Trees whose build exceeds the coloring cap are reported and skipped.

use gsci::channels::RayDirection;
use gsci::graphs::tree_graph;
use gsci::scan::threshold_default;
use gsci::symci::symmetric_lambda;

/// Nonincreasing leaf counts with `branches + leaves = total`.
fn profiles(total: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if total == 0 {
        out.push(prefix.clone());
        return;
    }
    // A branch with `c` leaves uses `c + 1` vertices.
    for c in (0..max_part.min(total - 1) + 1).rev() {
        prefix.push(c);
        profiles(total - c - 1, c, prefix, out);
        prefix.pop();
    }
}

fn main() {
    let k: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(16);
    let mut all = Vec::new();
    profiles(k - 1, k, &mut Vec::new(), &mut all);
    let d = RayDirection::depolarizing();
    let mut rows = Vec::new();
    for p in all {
        let g = tree_graph(&p).expect("valid tree");
        match symmetric_lambda(&g).and_then(|s| threshold_default(&s, &d)) {
            Ok(Some(t)) => {
                eprintln!("{t:.8} {p:?}");
                rows.push((t, p));
            }
            Ok(None) => {}
            Err(e) => eprintln!("{p:?}: {e}"),
        }
    }
    rows.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (t, p) in rows.iter().take(10) {
        println!("{t:.8} {p:?}");
    }
}
