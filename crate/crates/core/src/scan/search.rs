use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use super::threshold;
use crate::channels::RayDirection;
use crate::error::{Error, Result};
use crate::graphs::CodeGraph;
use crate::permgroup::canonical_form;
use crate::symci::{symmetric_lambda_with, BuildOptions};

pub const SEARCH_HEADER: &str = "canon_key,k_sys,k_env,threshold,is_best";

/// Largest number of labeled environment attachments the search will visit.
pub const SEARCH_CANDIDATE_CAP: f64 = 5e6;

#[derive(Debug, Clone)]
pub struct SearchRecord {
    pub canon_key: String,
    pub k_sys: usize,
    pub k_env: usize,
    pub threshold: Option<f64>,
    pub is_best: bool,
    /// The canonically labeled code.
    pub graph: CodeGraph,
}

fn split_colors(n: usize, k_sys: usize) -> Vec<u32> {
    (0..n).map(|v| u32::from(v >= k_sys)).collect()
}

/// Canonical relabeling of `g` (system vertices first) and its key.
fn canonicalize(adj: &[u64], k_sys: usize) -> (String, Vec<u64>) {
    let cf = canonical_form(adj, &split_colors(adj.len(), k_sys));
    let rows: Vec<String> = cf.rows.iter().map(|r| format!("{r:x}")).collect();
    (format!("{k_sys}+{}:{}", adj.len() - k_sys, rows.join("-")), cf.rows)
}

/// Key identifying `g` up to isomorphisms that keep the system set.
pub fn canonical_key(g: &CodeGraph) -> String {
    canonicalize(g.adjacency(), g.k_sys()).0
}

/// Non-isomorphic graphs on `k` vertices, as canonical adjacency rows.
fn system_graphs(k: usize) -> Vec<Vec<u64>> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let mut seen = BTreeMap::new();
    for bits in 0..1u64 << pairs.len() {
        let mut adj = vec![0u64; k];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if bits >> i & 1 == 1 {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
        let cf = canonical_form(&adj, &vec![0; k]);
        seen.entry(cf.rows.clone()).or_insert(cf.rows);
    }
    seen.into_values().collect()
}

fn connected(adj: &[u64]) -> bool {
    let all = (1u64 << adj.len()) - 1;
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & !seen;
        seen |= new;
        frontier |= new;
    }
    seen == all
}

fn binomial(n: u64, r: u64) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Advances a nondecreasing sequence over `1..=max`; false when exhausted.
fn next_multiset(cols: &mut [u64], max: u64) -> bool {
    for i in (0..cols.len()).rev() {
        if cols[i] < max {
            let v = cols[i] + 1;
            cols[i..].iter_mut().for_each(|c| *c = v);
            return true;
        }
    }
    false
}

/// Every connected code with `k_sys` system vertices and `1..=k_env_max`
/// environment vertices, none of them adjacent to each other, one per
/// isomorphism class, ordered by key.
pub fn candidate_graphs(k_sys: usize, k_env_max: usize) -> Result<Vec<(String, CodeGraph)>> {
    if k_sys == 0 || k_env_max == 0 {
        return Err(Error::domain("search needs k_sys >= 1 and k_env_max >= 1"));
    }
    let masks = (1u64 << k_sys.min(20)) - 1;
    let attachments: f64 = (1..=k_env_max as u64).map(|e| binomial(masks + e - 1, e)).sum();
    let resource = |estimate: f64| {
        Error::resource(format!(
            "search over k_sys = {k_sys}, k_env <= {k_env_max} would visit about {estimate:.3e} candidates \
             (supported: k_sys <= 5, k_env_max <= k_sys + 1, at most {SEARCH_CANDIDATE_CAP:e})"
        ))
    };
    if k_sys > 5 || k_env_max > k_sys + 1 {
        // Labeled system graphs over k! as a stand-in for the class count.
        let classes = 2f64.powi((k_sys * (k_sys - 1) / 2) as i32) / (1..=k_sys).map(|i| i as f64).product::<f64>();
        return Err(resource(classes.max(1.0) * attachments));
    }
    let sys = system_graphs(k_sys);
    let estimate = sys.len() as f64 * attachments;
    if estimate > SEARCH_CANDIDATE_CAP {
        return Err(resource(estimate));
    }
    let mut found: BTreeMap<String, CodeGraph> = BTreeMap::new();
    for base in &sys {
        for e in 1..=k_env_max {
            let mut cols = vec![1u64; e];
            loop {
                let mut adj: Vec<u64> = base.clone();
                adj.extend(cols.iter().copied());
                for (j, &c) in cols.iter().enumerate() {
                    for v in 0..k_sys {
                        if c >> v & 1 == 1 {
                            adj[v] |= 1 << (k_sys + j);
                        }
                    }
                }
                if connected(&adj) {
                    let (key, rows) = canonicalize(&adj, k_sys);
                    if !found.contains_key(&key) {
                        found.insert(key, CodeGraph::from_adjacency(k_sys, rows)?);
                    }
                }
                if !next_multiset(&mut cols, masks) {
                    break;
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Thresholds of every candidate along `d`; the best ones are flagged.
pub fn exhaustive_search(k_sys: usize, k_env_max: usize, d: &RayDirection, eps: f64) -> Result<Vec<SearchRecord>> {
    let candidates = candidate_graphs(k_sys, k_env_max)?;
    log::info!("search k_sys={k_sys} k_env<={k_env_max}: {} codes", candidates.len());
    let opts = BuildOptions { threads: 1, ..BuildOptions::default() };
    let mut records: Vec<SearchRecord> = candidates
        .into_par_iter()
        .map(|(canon_key, graph)| {
            let (spectrum, _) = symmetric_lambda_with(&graph, &opts)?;
            Ok(SearchRecord {
                canon_key,
                k_sys,
                k_env: graph.k_env(),
                threshold: threshold(&spectrum, d, eps)?,
                is_best: false,
                graph,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(best) = records.iter().filter_map(|r| r.threshold).reduce(f64::max) {
        for r in &mut records {
            r.is_best = r.threshold == Some(best);
        }
    }
    Ok(records)
}

pub fn write_search_csv<W: Write>(records: &[SearchRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SEARCH_HEADER}")?;
    for r in records {
        let t = r.threshold.map_or_else(|| "none".to_string(), |t| t.to_string());
        writeln!(out, "{},{},{},{},{}", r.canon_key, r.k_sys, r.k_env, t, r.is_best)?;
    }
    Ok(())
}
