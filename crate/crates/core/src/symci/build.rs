//! Orbit-compressed construction of the σ_RB and σ_B spectra.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;

use super::coloring::{digit, highest_nonzero, unit, ColoringChain, Scratch};
use super::{CISpectrum, Monomial, SparsePoly, SpectrumTerm};
use crate::error::{Error, Result};
use crate::graphs::CodeGraph;
use crate::permgroup::{
    automorphism_group, BitAction, ColoredGraphAut, Count, DenseOrbitTable, OrbitKeyer,
    Permutation, TwinClasses,
};

pub const DEFAULT_COLORING_CAP: u64 = 100_000_000;
pub const MEM_CAP_ENV: &str = "GSCI_MEM_CAP";

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Abort when the Burnside lower bound `4^k / |G_A|` on the number of
    /// canonical 4-colorings exceeds this.
    pub coloring_cap: u64,
    /// Largest width for which orbit tables are tabulated.
    pub dense_limit: usize,
    pub threads: usize,
    /// Digit-sum depth at which the coloring tree is cut into tasks.
    pub split_depth: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        let cap = std::env::var(MEM_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| *v >= 1.0)
            .map_or(DEFAULT_COLORING_CAP, |v| v as u64);
        BuildOptions {
            coloring_cap: cap,
            dense_limit: 26,
            threads: rayon::current_num_threads(),
            split_depth: 3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BuildStats {
    pub group_order: String,
    pub system_group_order: String,
    pub colorings: u64,
    /// Σ orbit sizes over canonical colorings; must equal `4^k_sys`.
    pub coloring_mass: u128,
    pub rb_orbits: usize,
    pub b_orbits: usize,
    pub monomials: usize,
    pub estimate: f64,
    pub dense_keys: bool,
    pub seconds: f64,
}

pub fn symmetric_lambda(g: &CodeGraph) -> Result<CISpectrum> {
    symmetric_lambda_with(g, &BuildOptions::default()).map(|(s, _)| s)
}

#[derive(Clone, Copy)]
struct Node {
    w: u128,
    u: u64,
    e: [u8; 4],
    depth: u32,
}

/// Accumulated `Σ m4` per (orbit representative, monomial).
type Acc = FxHashMap<(u64, Monomial), u128>;

#[derive(Default)]
struct Partial {
    rb: Acc,
    b: Acc,
    colorings: u64,
    mass: u128,
}

impl Partial {
    fn merge(&mut self, other: Partial) {
        for (k, v) in other.rb {
            *self.rb.entry(k).or_default() += v;
        }
        for (k, v) in other.b {
            *self.b.entry(k).or_default() += v;
        }
        self.colorings += other.colorings;
        self.mass += other.mass;
    }
}

trait OrbitCount: Count {
    fn orbit(chain: &ColoringChain, stab: &Self) -> u128;
}

impl OrbitCount for u128 {
    fn orbit(chain: &ColoringChain, stab: &Self) -> u128 {
        chain.orbit_size_small(*stab)
    }
}

impl OrbitCount for BigUint {
    fn orbit(chain: &ColoringChain, stab: &Self) -> u128 {
        chain.orbit_size_big(stab)
    }
}

struct Ctx<'a> {
    k: usize,
    sys_mask: u64,
    /// `contrib[j][c]`: change of `U` when vertex `j` carries color `c`.
    contrib: Vec<[u64; 4]>,
    chain: &'a ColoringChain,
    rb_keys: &'a OrbitKeyer,
    b_keys: &'a OrbitKeyer,
}

impl Ctx<'_> {
    fn root(&self) -> Node {
        Node { w: 0, u: 0, e: [self.k as u8, 0, 0, 0], depth: 0 }
    }

    fn children(&self, n: &Node, out: &mut Vec<Node>) {
        let h = highest_nonzero(n.w, self.k);
        if let Some(h) = h {
            let c = digit(n.w, h) as usize;
            if c < 3 {
                let w = n.w + unit(h);
                if self.chain.passes_guards(w, h) {
                    let mut e = n.e;
                    e[c] -= 1;
                    e[c + 1] += 1;
                    let u = n.u ^ self.contrib[h][c] ^ self.contrib[h][c + 1];
                    out.push(Node { w, u, e, depth: n.depth + 1 });
                }
            }
        }
        for i in h.map_or(0, |h| h + 1)..self.k {
            let w = n.w + unit(i);
            if self.chain.passes_guards(w, i) {
                let mut e = n.e;
                e[0] -= 1;
                e[1] += 1;
                out.push(Node { w, u: n.u ^ self.contrib[i][1], e, depth: n.depth + 1 });
            }
        }
    }

    fn record(&self, n: &Node, m4: u128, acc: &mut Partial) -> Result<()> {
        let mono = Monomial::new(n.e[1], n.e[2], n.e[3]);
        let rb = self.rb_keys.lookup(n.u);
        if rb.size != 0 && m4 % rb.size != 0 {
            return Err(nondivisible("σ_RB", rb.rep, m4, rb.size));
        }
        *acc.rb.entry((rb.rep, mono)).or_default() += m4;
        let b = self.b_keys.lookup(n.u & self.sys_mask);
        if b.size != 0 && m4 % b.size != 0 {
            return Err(nondivisible("σ_B", b.rep, m4, b.size));
        }
        *acc.b.entry((b.rep, mono)).or_default() += m4;
        acc.colorings += 1;
        acc.mass += m4;
        Ok(())
    }

    /// Depth-first walk below `start`. Nodes at digit-sum `split` are
    /// handed to `frontier` unprocessed.
    fn walk<C: OrbitCount>(
        &self,
        start: Node,
        split: Option<u32>,
        mut frontier: Option<&mut Vec<Node>>,
        acc: &mut Partial,
        scratch: &mut Scratch<C>,
    ) -> Result<()> {
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            if split == Some(n.depth) {
                if let Some(f) = frontier.as_deref_mut() {
                    f.push(n);
                    continue;
                }
            }
            let Some(stab) = self.chain.stabilizer_sorted::<C>(n.w, scratch) else {
                continue;
            };
            self.record(&n, C::orbit(self.chain, &stab), acc)?;
            self.children(&n, &mut stack);
        }
        Ok(())
    }
}

fn nondivisible(which: &str, rep: u64, m4: u128, m2: u128) -> Error {
    Error::consistency(format!(
        "{which} weight not integral: orbit {rep:#x} of size {m2} does not divide coloring orbit size {m4}"
    ))
}

fn run<C: OrbitCount>(ctx: &Ctx, threads: usize, split: u32) -> Result<Partial> {
    let mut main = Partial::default();
    let mut scratch = Scratch::<C>::new();
    if threads <= 1 {
        ctx.walk(ctx.root(), None, None, &mut main, &mut scratch)?;
        return Ok(main);
    }
    let mut tasks = Vec::new();
    ctx.walk(ctx.root(), Some(split), Some(&mut tasks), &mut main, &mut scratch)?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Result<Partial>>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| {
                let mut acc = Partial::default();
                let mut scratch = Scratch::<C>::new();
                let out = loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&node) = tasks.get(i) else { break Ok(()) };
                    if let Err(e) = ctx.walk(node, None, None, &mut acc, &mut scratch) {
                        // Drain the queue so the other workers stop.
                        next.store(tasks.len(), Ordering::Relaxed);
                        break Err(e);
                    }
                };
                results.lock().expect("poisoned").push(out.map(|_| acc));
            });
        }
    });
    for r in results.into_inner().expect("poisoned") {
        main.merge(r?);
    }
    Ok(main)
}

fn contributions(g: &CodeGraph) -> Vec<[u64; 4]> {
    (0..g.k_sys())
        .map(|j| {
            let x = g.neighbors(j);
            let z = 1u64 << j;
            [0, x, x ^ z, z]
        })
        .collect()
}

fn system_keyer(g: &CodeGraph, aut: &ColoredGraphAut, dense_limit: usize) -> OrbitKeyer {
    let k = g.k_sys();
    if k <= dense_limit {
        let gens: Vec<Permutation> = aut.generators.iter().map(|p| p.restrict(k)).collect();
        OrbitKeyer::Dense(DenseOrbitTable::build(k, &gens))
    } else {
        OrbitKeyer::Search(BitAction::new(&aut.sgs, &TwinClasses::of_graph(g, k)))
    }
}

fn full_keyer(
    g: &CodeGraph,
    aut: &ColoredGraphAut,
    sys: &Arc<OrbitKeyer>,
    dense_limit: usize,
) -> OrbitKeyer {
    let (k, n) = (g.k_sys(), g.n());
    let fixes_env = aut.generators.iter().all(|p| (k..n).all(|v| p.image(v) == v));
    if fixes_env {
        OrbitKeyer::FixedTail { inner: Arc::clone(sys), split: k, width: n }
    } else if n <= dense_limit {
        OrbitKeyer::Dense(DenseOrbitTable::build(n, &aut.generators))
    } else {
        OrbitKeyer::Search(BitAction::new(&aut.full_sgs, &TwinClasses::of_graph(g, n)))
    }
}

/// Divides accumulated numerators by orbit sizes, grouped by representative.
fn finish_terms(acc: Acc, keys: &OrbitKeyer, which: &str) -> Result<FxHashMap<u64, (u128, Vec<(Monomial, u128)>)>> {
    let mut grouped: FxHashMap<u64, (u128, Vec<(Monomial, u128)>)> = FxHashMap::default();
    for ((rep, mono), num) in acc {
        grouped.entry(rep).or_insert((0, Vec::new())).1.push((mono, num));
    }
    for (rep, (size, terms)) in grouped.iter_mut() {
        *size = keys.orbit_size(*rep);
        for (_, c) in terms.iter_mut() {
            if *c % *size != 0 {
                return Err(nondivisible(which, *rep, *c, *size));
            }
            *c /= *size;
        }
    }
    Ok(grouped)
}

/// Basis of the column space of `Γ_AR`, as system subsets.
fn env_image_basis(g: &CodeGraph) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for j in 0..g.k_env() {
        let mut v = g.gamma_ar_apply(1 << j);
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Orbit representatives of system subsets with their orbit sizes.
fn system_orbits(keys: &OrbitKeyer, chain: &ColoringChain) -> Result<Vec<(u64, u128)>> {
    if let Some(count) = keys.id_count() {
        return Ok((0..count as u32).map(|id| (keys.rep_of_id(id), keys.size_of_id(id))).collect());
    }
    let colorings = super::CanonicalColorings::new(chain.clone(), 2)?;
    Ok(colorings
        .map(|(c, size)| {
            let w = c.iter().enumerate().fold(0u64, |m, (i, &d)| m | u64::from(d) << i);
            (w, size)
        })
        .collect())
}

/// Full construction with options; also returns build statistics.
pub fn symmetric_lambda_with(g: &CodeGraph, opts: &BuildOptions) -> Result<(CISpectrum, BuildStats)> {
    let started = Instant::now();
    let (k, n) = (g.k_sys(), g.n());
    if k >= 64 {
        return Err(Error::domain(format!("k_sys = {k} exceeds the supported 63")));
    }
    let aut = automorphism_group(g);
    let chain = ColoringChain::with_twins(&aut.sgs, &TwinClasses::of_graph(g, k))?;
    let sys_order = aut.system_order();
    let estimate = 4f64.powi(k as i32) / sys_order.to_f64().unwrap_or(f64::INFINITY);
    if estimate > opts.coloring_cap as f64 {
        return Err(Error::resource(format!(
            "at least {estimate:.3e} canonical colorings expected, cap is {}; raise {MEM_CAP_ENV} to continue",
            opts.coloring_cap
        )));
    }
    log::debug!("k_sys={k} n={n} |G|={} |G_A|={sys_order} estimate={estimate:.3e}", aut.order);

    let sys_keys = Arc::new(system_keyer(g, &aut, opts.dense_limit));
    let rb_keys = full_keyer(g, &aut, &sys_keys, opts.dense_limit);
    let ctx = Ctx {
        k,
        sys_mask: g.system_mask(),
        contrib: contributions(g),
        chain: &chain,
        rb_keys: &rb_keys,
        b_keys: &sys_keys,
    };
    let threads = opts.threads.max(1);
    let partial = if chain.order_small().is_some() {
        run::<u128>(&ctx, threads, opts.split_depth)?
    } else {
        run::<BigUint>(&ctx, threads, opts.split_depth)?
    };
    if Some(partial.mass) != 1u128.checked_shl(2 * k as u32) {
        return Err(Error::consistency(format!(
            "coloring orbits cover {} of 4^{k} colorings",
            partial.mass
        )));
    }

    let rb_groups = finish_terms(partial.rb, &rb_keys, "σ_RB")?;
    let mut rb: Vec<SpectrumTerm> = rb_groups
        .into_iter()
        .map(|(key, (m, terms))| SpectrumTerm { key, multiplicity: m, poly: SparsePoly::from_terms(terms) })
        .collect();
    rb.sort_unstable_by_key(|t| t.key);

    let mu: FxHashMap<u64, SparsePoly> = finish_terms(partial.b, &sys_keys, "σ_B")?
        .into_iter()
        .map(|(rep, (_, terms))| (rep, SparsePoly::from_terms(terms)))
        .collect();
    let basis = env_image_basis(g);
    let span: Vec<u64> = (0..1u64 << basis.len())
        .map(|sel| {
            basis
                .iter()
                .enumerate()
                .filter(|(i, _)| sel >> i & 1 == 1)
                .fold(0, |acc, (_, &b)| acc ^ b)
        })
        .collect();
    // Each image point is hit 2^(k_env - rank) times.
    let fold = 1u128 << (g.k_env() - basis.len());
    let mut b: Vec<SpectrumTerm> = Vec::new();
    for (a, size) in system_orbits(&sys_keys, &chain)? {
        let mut terms: Vec<(Monomial, u128)> = Vec::new();
        for &s in &span {
            let rep = sys_keys.lookup(a ^ s).rep;
            if let Some(p) = mu.get(&rep) {
                terms.extend(p.terms().iter().map(|&(m, c)| (m, c * fold)));
            }
        }
        let poly = SparsePoly::from_terms(terms);
        if !poly.is_empty() {
            b.push(SpectrumTerm { key: a, multiplicity: size, poly });
        }
    }
    b.sort_unstable_by_key(|t| t.key);

    let spectrum = CISpectrum::new(k, g.k_env(), rb, b);
    let stats = BuildStats {
        group_order: aut.order.to_string(),
        system_group_order: sys_order.to_string(),
        colorings: partial.colorings,
        coloring_mass: partial.mass,
        rb_orbits: spectrum.rb.len(),
        b_orbits: spectrum.b.len(),
        monomials: spectrum.term_count(),
        estimate,
        dense_keys: sys_keys.id_count().is_some(),
        seconds: started.elapsed().as_secs_f64(),
    };
    log::info!(
        "spectrum built: {} colorings, {} σ_RB orbits, {} σ_B orbits, {} monomials in {:.2}s",
        stats.colorings,
        stats.rb_orbits,
        stats.b_orbits,
        stats.monomials,
        stats.seconds
    );
    Ok((spectrum, stats))
}
