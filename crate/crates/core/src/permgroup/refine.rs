//! Equitable partition refinement with individualization and automorphism
//! pruning, for vertex-colored graphs on at most 64 vertices.

use std::collections::VecDeque;

use super::Permutation;

type Cells = Vec<u64>;

#[inline]
fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

fn refine(adj: &[u64], cells: &mut Cells, mut queue: VecDeque<u64>) {
    let mut groups: Vec<(u32, u64)> = Vec::with_capacity(8);
    while let Some(splitter) = queue.pop_front() {
        let mut idx = 0;
        while idx < cells.len() {
            let c = cells[idx];
            if c & (c - 1) == 0 {
                idx += 1;
                continue;
            }
            groups.clear();
            for v in bits(c) {
                let cnt = (adj[v] & splitter).count_ones();
                match groups.iter_mut().find(|(k, _)| *k == cnt) {
                    Some(g) => g.1 |= 1 << v,
                    None => groups.push((cnt, 1 << v)),
                }
            }
            if groups.len() == 1 {
                idx += 1;
                continue;
            }
            groups.sort_unstable_by_key(|g| g.0);
            cells.splice(idx..=idx, groups.iter().map(|g| g.1));
            for g in &groups {
                queue.push_back(g.1);
            }
            idx += groups.len();
        }
    }
}

fn individualize(adj: &[u64], cells: &Cells, cell: usize, v: usize) -> Cells {
    let mut out = cells.clone();
    let rest = out[cell] & !(1u64 << v);
    out[cell] = 1u64 << v;
    out.insert(cell + 1, rest);
    refine(adj, &mut out, VecDeque::from([1u64 << v]));
    out
}

fn sizes(cells: &Cells) -> Vec<u32> {
    cells.iter().map(|c| c.count_ones()).collect()
}

/// Canonically relabeled graph: `rows[p]` holds the positions adjacent to position `p`.
fn relabeled(adj: &[u64], lab: &[usize]) -> Vec<u64> {
    let mut pos = vec![0usize; adj.len()];
    for (p, &v) in lab.iter().enumerate() {
        pos[v] = p;
    }
    lab.iter()
        .map(|&v| bits(adj[v]).fold(0u64, |acc, u| acc | 1 << pos[u]))
        .collect()
}

struct Leaf {
    lab: Vec<usize>,
    key: Vec<u64>,
}

struct Search<'a> {
    adj: &'a [u64],
    n: usize,
    want_canon: bool,
    first: Option<Leaf>,
    first_path: Vec<usize>,
    first_trace: Vec<Vec<u32>>,
    best: Option<Leaf>,
    gens: Vec<Permutation>,
}

/// Outcome of a search step: keep going, or unwind to the given depth.
enum Flow {
    Continue,
    UnwindTo(usize),
}

impl<'a> Search<'a> {
    fn orbit_reps(&self, path: &[usize]) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in &self.gens {
            if path.iter().any(|&v| g.image(v) != v) {
                continue;
            }
            for v in 0..self.n {
                let (a, b) = (find(&mut parent, v), find(&mut parent, g.image(v)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..self.n).map(|v| find(&mut parent, v)).collect()
    }

    fn record(&mut self, lab_a: &[usize], lab_b: &[usize]) {
        // Maps lab_b[p] to lab_a[p].
        let mut images = vec![0usize; self.n];
        for p in 0..self.n {
            images[lab_b[p]] = lab_a[p];
        }
        let g = Permutation::from_images_unchecked(images);
        if !g.is_identity() && !self.gens.contains(&g) {
            self.gens.push(g);
        }
    }

    fn leaf(&mut self, cells: &Cells, path: &[usize]) -> Flow {
        let lab: Vec<usize> = cells.iter().map(|c| c.trailing_zeros() as usize).collect();
        let key = relabeled(self.adj, &lab);
        let Some(first) = &self.first else {
            self.first_path = path.to_vec();
            self.first = Some(Leaf { lab: lab.clone(), key: key.clone() });
            self.best = Some(Leaf { lab, key });
            return Flow::Continue;
        };
        if first.key == key {
            let first_lab = first.lab.clone();
            self.record(&first_lab, &lab);
            let common = path
                .iter()
                .zip(&self.first_path)
                .take_while(|(a, b)| a == b)
                .count();
            return Flow::UnwindTo(common);
        }
        if self.want_canon {
            let best = self.best.as_ref().expect("best leaf set with first");
            if key == best.key {
                let best_lab = best.lab.clone();
                self.record(&best_lab, &lab);
            } else if key > best.key {
                self.best = Some(Leaf { lab, key });
            }
        }
        Flow::Continue
    }

    fn visit(&mut self, cells: Cells, path: &mut Vec<usize>, on_first: bool) -> Flow {
        let depth = path.len();
        if on_first {
            self.first_trace.push(sizes(&cells));
        } else if !self.want_canon && self.first_trace.get(depth) != Some(&sizes(&cells)) {
            return Flow::Continue;
        }
        let Some(target) = cells.iter().position(|c| c & (c - 1) != 0) else {
            return self.leaf(&cells, path);
        };
        let mut explored: Vec<usize> = Vec::new();
        for v in bits(cells[target]) {
            if !explored.is_empty() {
                let reps = self.orbit_reps(path);
                if explored.iter().any(|&u| reps[u] == reps[v]) {
                    continue;
                }
            }
            let child_on_first = on_first && explored.is_empty();
            explored.push(v);
            let child = individualize(self.adj, &cells, target, v);
            path.push(v);
            let flow = self.visit(child, path, child_on_first);
            path.pop();
            if let Flow::UnwindTo(d) = flow {
                if d < depth {
                    return flow;
                }
            }
        }
        Flow::Continue
    }
}

/// Result of a colored-graph search.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Automorphism generators (preserving colors).
    pub generators: Vec<Permutation>,
    /// `labeling[p]` is the vertex placed at canonical position `p`.
    pub labeling: Vec<usize>,
    /// Adjacency rows of the canonically relabeled graph.
    pub rows: Vec<u64>,
    /// Sorted color sequence of the relabeled graph.
    pub colors: Vec<u32>,
}

/// Searches the individualization-refinement tree of a colored graph.
///
/// With `want_canon` the best leaf over the whole (pruned) tree is kept and
/// defines the canonical form; otherwise only automorphisms are collected and
/// `labeling` is the first leaf.
pub fn colored_search(adj: &[u64], colors: &[u32], want_canon: bool) -> CanonicalForm {
    let n = adj.len();
    assert_eq!(colors.len(), n);
    let mut palette: Vec<u32> = colors.to_vec();
    palette.sort_unstable();
    palette.dedup();
    let mut cells: Cells = palette
        .iter()
        .map(|&c| (0..n).filter(|&v| colors[v] == c).fold(0u64, |m, v| m | 1 << v))
        .collect();
    let queue: VecDeque<u64> = cells.iter().copied().collect();
    refine(adj, &mut cells, queue);
    let mut search = Search {
        adj,
        n,
        want_canon,
        first: None,
        first_path: Vec::new(),
        first_trace: Vec::new(),
        best: None,
        gens: Vec::new(),
    };
    if n > 0 {
        search.visit(cells, &mut Vec::new(), true);
    }
    let best = search.best.take();
    let (labeling, rows) = match best {
        Some(b) => (b.lab, b.key),
        None => (Vec::new(), Vec::new()),
    };
    let out_colors = labeling.iter().map(|&v| colors[v]).collect();
    CanonicalForm { generators: search.gens, labeling, rows, colors: out_colors }
}

/// Canonical form of a vertex-colored graph; two colored graphs are
/// isomorphic iff their `(colors, rows)` agree.
pub fn canonical_form(adj: &[u64], colors: &[u32]) -> CanonicalForm {
    colored_search(adj, colors, true)
}
