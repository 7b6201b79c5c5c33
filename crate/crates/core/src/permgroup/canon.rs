//! Orbits, stabilizers and lexicographically maximal orbit representatives.
//!
//! Colorings are acted on from the right, `(c·g)[j] = c[g(j)]`, and compared
//! lexicographically with position 0 most significant.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::{Permutation, StrongGeneratingSystem};
use crate::error::{Error, Result};
use crate::graphs::{low_mask, CodeGraph};

/// Exact counter used for stabilizer orders.
pub trait Count: Clone + std::fmt::Debug + Send {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&mut self, other: &Self);
    fn scale(&mut self, by: u32);
    fn mul(&mut self, other: &Self);
}

impl Count for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add(&mut self, other: &Self) {
        *self += *other;
    }
    fn scale(&mut self, by: u32) {
        *self *= u128::from(by);
    }
    fn mul(&mut self, other: &Self) {
        *self *= *other;
    }
}

impl Count for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn scale(&mut self, by: u32) {
        *self *= by;
    }
    fn mul(&mut self, other: &Self) {
        *self *= other;
    }
}

/// Classes of mutually twin vertices of one color: swapping two members is a
/// graph automorphism.
#[derive(Debug, Clone, Default)]
pub struct TwinClasses {
    classes: Vec<Vec<usize>>,
}

impl TwinClasses {
    pub fn none() -> Self {
        Self::default()
    }

    /// Twin classes among vertices `0..width` (width `k_sys` or `n`).
    pub fn of_graph(g: &CodeGraph, width: usize) -> Self {
        let adj = g.adjacency();
        let k = g.k_sys();
        let mut assigned = vec![false; width];
        let mut classes = Vec::new();
        for x in 0..width {
            if assigned[x] {
                continue;
            }
            let mut class = vec![x];
            for y in x + 1..width {
                if assigned[y] || (x < k) != (y < k) {
                    continue;
                }
                let strip = !((1u64 << x) | (1u64 << y));
                if adj[x] & strip == adj[y] & strip {
                    class.push(y);
                }
            }
            if class.len() > 1 {
                for &v in &class {
                    assigned[v] = true;
                }
                classes.push(class);
            }
        }
        Self { classes }
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Sorts the values within each class at positions `> after`
    /// (all positions when `after` is `None`) into descending order.
    fn sort_word(&self, word: &mut [u8], after: Option<usize>, perm: Option<&mut Permutation>) {
        let mut perm = perm;
        for class in &self.classes {
            let pos: Vec<usize> = class
                .iter()
                .copied()
                .filter(|&p| after.map_or(true, |a| p > a))
                .collect();
            if pos.len() < 2 {
                continue;
            }
            if pos.windows(2).all(|w| word[w[0]] >= word[w[1]]) {
                continue;
            }
            let mut order: Vec<usize> = (0..pos.len()).collect();
            order.sort_by(|&a, &b| word[pos[b]].cmp(&word[pos[a]]).then(a.cmp(&b)));
            let vals: Vec<u8> = pos.iter().map(|&p| word[p]).collect();
            for (r, &o) in order.iter().enumerate() {
                word[pos[r]] = vals[o];
            }
            if let Some(g) = perm.as_deref_mut() {
                // k maps pos[r] to pos[order[r]]; g becomes g ∘ k.
                let mut k: Vec<usize> = (0..g.degree()).collect();
                for (r, &o) in order.iter().enumerate() {
                    k[pos[r]] = pos[o];
                }
                *g = g.compose(&Permutation::from_images_unchecked(k));
            }
        }
    }
}

fn check_width(sgs: &StrongGeneratingSystem, width: usize) -> Result<()> {
    if sgs.degree() != width {
        return Err(Error::Width { expected: sgs.degree(), got: width });
    }
    Ok(())
}

/// Lexicographically maximal element of the orbit of `coloring`, with a
/// permutation `g` such that `coloring·g` is that element.
pub fn canonical_image(
    sgs: &StrongGeneratingSystem,
    twins: &TwinClasses,
    coloring: &[u8],
) -> Result<(Vec<u8>, Permutation)> {
    check_width(sgs, coloring.len())?;
    let n = coloring.len();
    let mut start = (coloring.to_vec(), Permutation::identity(n));
    twins.sort_word(&mut start.0, None, Some(&mut start.1));
    let mut cands = vec![start];
    for i in 0..n {
        let orbit = sgs.basic_orbit(i);
        let best = cands
            .iter()
            .flat_map(|(w, _)| orbit.iter().map(move |&b| w[b]))
            .max()
            .expect("nonempty candidates");
        let mut next: Vec<(Vec<u8>, Permutation)> = Vec::new();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        for (w, g) in &cands {
            for (t, u) in sgs.transversal(i).iter().enumerate() {
                if w[orbit[t]] != best {
                    continue;
                }
                let mut child = u.act(w);
                let mut gc = g.compose(u);
                twins.sort_word(&mut child, Some(i), Some(&mut gc));
                if seen.insert(child.clone()) {
                    next.push((child, gc));
                }
            }
        }
        cands = next;
    }
    Ok(cands.swap_remove(0))
}

/// Stabilizer order of `coloring` if it is its own canonical image, else `None`.
pub fn canonical_stabilizer<C: Count>(
    sgs: &StrongGeneratingSystem,
    twins: &TwinClasses,
    coloring: &[u8],
) -> Option<C> {
    let n = coloring.len();
    let mut queue: Vec<(Vec<u8>, C)> = vec![(coloring.to_vec(), C::one())];
    for i in 0..n {
        let orbit = sgs.basic_orbit(i);
        let mut next: Vec<(Vec<u8>, C)> = Vec::new();
        let mut index: FxHashMap<Vec<u8>, usize> = FxHashMap::default();
        for (w, cnt) in &queue {
            for (t, u) in sgs.transversal(i).iter().enumerate() {
                let v = w[orbit[t]];
                if v > coloring[i] {
                    return None;
                }
                if v < coloring[i] {
                    continue;
                }
                let mut child = u.act(w);
                twins.sort_word(&mut child, Some(i), None);
                match index.get(&child) {
                    Some(&at) => next[at].1.add(cnt),
                    None => {
                        index.insert(child.clone(), next.len());
                        next.push((child, cnt.clone()));
                    }
                }
            }
        }
        queue = next;
    }
    debug_assert_eq!(queue.len(), 1);
    queue.pop().map(|(_, c)| c)
}

/// Orbit of a point, by closure under the transversal elements.
pub fn orbit_of_point(sgs: &StrongGeneratingSystem, point: usize) -> Result<Vec<usize>> {
    if point >= sgs.degree() {
        return Err(Error::Width { expected: sgs.degree(), got: point + 1 });
    }
    let gens: Vec<&Permutation> = (0..sgs.degree()).flat_map(|i| sgs.transversal(i)).collect();
    let mut seen = vec![false; sgs.degree()];
    seen[point] = true;
    let mut orbit = vec![point];
    let mut head = 0;
    while head < orbit.len() {
        let p = orbit[head];
        for g in &gens {
            let q = g.image(p);
            if !seen[q] {
                seen[q] = true;
                orbit.push(q);
            }
        }
        head += 1;
    }
    orbit.sort_unstable();
    Ok(orbit)
}

/// Full orbit of a coloring, for small groups and tests.
pub fn orbit_of_coloring(sgs: &StrongGeneratingSystem, coloring: &[u8]) -> Result<Vec<Vec<u8>>> {
    check_width(sgs, coloring.len())?;
    let gens: Vec<&Permutation> = (0..sgs.degree()).flat_map(|i| sgs.transversal(i)).collect();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    seen.insert(coloring.to_vec());
    let mut orbit = vec![coloring.to_vec()];
    let mut head = 0;
    while head < orbit.len() {
        let w = orbit[head].clone();
        for g in &gens {
            let c = g.act(&w);
            if seen.insert(c.clone()) {
                orbit.push(c);
            }
        }
        head += 1;
    }
    orbit.sort_unstable();
    Ok(orbit)
}

/// Order of the stabilizer of a coloring.
pub fn stabilizer_order(sgs: &StrongGeneratingSystem, coloring: &[u8]) -> Result<BigUint> {
    let (canon, _) = canonical_image(sgs, &TwinClasses::none(), coloring)?;
    canonical_stabilizer::<BigUint>(sgs, &TwinClasses::none(), &canon)
        .ok_or_else(|| Error::consistency("canonical image failed its own canonicity check"))
}

#[inline]
fn lex_key(w: u64) -> u64 {
    w.reverse_bits()
}

/// Clears all but the `k` lowest set bits of `mask`.
#[inline]
fn lowest_bits(mut mask: u64, k: u32) -> u64 {
    let mut out = 0u64;
    for _ in 0..k {
        let b = mask & mask.wrapping_neg();
        out |= b;
        mask ^= b;
    }
    out
}

#[derive(Debug, Clone)]
struct BitMove {
    fixed: u64,
    moves: Vec<(u8, u8)>,
}

impl BitMove {
    fn new(u: &Permutation) -> Self {
        let mut fixed = 0u64;
        let mut moves = Vec::new();
        for j in 0..u.degree() {
            let src = u.image(j);
            if src == j {
                fixed |= 1 << j;
            } else {
                moves.push((j as u8, src as u8));
            }
        }
        BitMove { fixed, moves }
    }

    #[inline]
    fn apply(&self, w: u64) -> u64 {
        let mut out = w & self.fixed;
        for &(dst, src) in &self.moves {
            out |= (w >> src & 1) << dst;
        }
        out
    }
}

/// Byte-table permuter for the right action on subset masks.
#[derive(Debug, Clone)]
struct ByteTables {
    tables: Vec<[u64; 256]>,
}

impl ByteTables {
    fn new(g: &Permutation) -> Self {
        let width = g.degree();
        let inv = g.inverse();
        let chunks = width.div_ceil(8);
        let mut tables = vec![[0u64; 256]; chunks];
        for (c, table) in tables.iter_mut().enumerate() {
            for v in 0..256usize {
                let mut out = 0u64;
                for t in 0..8 {
                    let x = c * 8 + t;
                    if v >> t & 1 == 1 && x < width {
                        out |= 1 << inv.image(x);
                    }
                }
                table[v] = out;
            }
        }
        ByteTables { tables }
    }

    #[inline]
    fn apply(&self, w: u64) -> u64 {
        let mut out = 0u64;
        for (c, table) in self.tables.iter().enumerate() {
            out |= table[(w >> (8 * c) & 0xff) as usize];
        }
        out
    }
}

/// Right action of a group on subsets of `0..width`, given by a stabilizer chain.
#[derive(Debug, Clone)]
pub struct BitAction {
    width: usize,
    orbits: Vec<Vec<usize>>,
    moves: Vec<Vec<BitMove>>,
    twins: Vec<u64>,
    order: BigUint,
}

impl BitAction {
    pub fn new(sgs: &StrongGeneratingSystem, twins: &TwinClasses) -> Self {
        let width = sgs.degree();
        assert!(width <= 64);
        let orbits = (0..width).map(|i| sgs.basic_orbit(i).to_vec()).collect();
        let moves = (0..width)
            .map(|i| sgs.transversal(i).iter().map(BitMove::new).collect())
            .collect();
        let twins = twins
            .classes()
            .iter()
            .map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        BitAction { width, orbits, moves, twins, order: sgs.order() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    #[inline]
    fn sort_twins(&self, mut w: u64, after: Option<usize>) -> u64 {
        let keep = match after {
            Some(a) => !low_mask(a + 1),
            None => u64::MAX,
        };
        for &class in &self.twins {
            let rel = class & keep;
            if rel == 0 {
                continue;
            }
            let ones = (w & rel).count_ones();
            w = (w & !rel) | lowest_bits(rel, ones);
        }
        w
    }

    /// Lexicographically maximal element of the orbit of `w`.
    pub fn canonical(&self, w: u64) -> u64 {
        let mut cands = vec![self.sort_twins(w, None)];
        let mut next: Vec<u64> = Vec::new();
        let mut seen: rustc_hash::FxHashSet<u64> = Default::default();
        for i in 0..self.width {
            let orbit = &self.orbits[i];
            let mut best = 0u64;
            'outer: for &c in &cands {
                for &b in orbit {
                    if c >> b & 1 == 1 {
                        best = 1;
                        break 'outer;
                    }
                }
            }
            next.clear();
            seen.clear();
            for &c in &cands {
                for (t, mv) in self.moves[i].iter().enumerate() {
                    if c >> orbit[t] & 1 != best {
                        continue;
                    }
                    let child = self.sort_twins(mv.apply(c), Some(i));
                    if seen.insert(child) {
                        next.push(child);
                    }
                }
            }
            std::mem::swap(&mut cands, &mut next);
        }
        cands[0]
    }

    /// Stabilizer order of `w` if `w` is canonical.
    pub fn canonical_stabilizer<C: Count>(&self, w: u64) -> Option<C> {
        let mut queue: Vec<(u64, C)> = vec![(w, C::one())];
        let mut next: Vec<(u64, C)> = Vec::new();
        let mut index: FxHashMap<u64, usize> = FxHashMap::default();
        for i in 0..self.width {
            let target = w >> i & 1;
            let orbit = &self.orbits[i];
            next.clear();
            index.clear();
            for (c, cnt) in &queue {
                for (t, mv) in self.moves[i].iter().enumerate() {
                    let v = c >> orbit[t] & 1;
                    if v > target {
                        return None;
                    }
                    if v < target {
                        continue;
                    }
                    let child = self.sort_twins(mv.apply(*c), Some(i));
                    match index.get(&child) {
                        Some(&at) => next[at].1.add(cnt),
                        None => {
                            index.insert(child, next.len());
                            next.push((child, cnt.clone()));
                        }
                    }
                }
            }
            std::mem::swap(&mut queue, &mut next);
        }
        queue.pop().map(|(_, c)| c)
    }

    /// Orbit size of a canonical `w`.
    pub fn orbit_size(&self, w: u64) -> u128 {
        let stab = if self.order.bits() < 127 {
            let order = self.order.to_u128().expect("fits");
            let s: u128 = self.canonical_stabilizer(w).expect("canonical input");
            return order / s;
        } else {
            self.canonical_stabilizer::<BigUint>(w).expect("canonical input")
        };
        (&self.order / stab).to_u128().expect("orbit size bounded by 2^width")
    }
}

/// Canonical test for masks, mirroring [`canonical_stabilizer`].
pub fn is_canonical_bits(action: &BitAction, w: u64) -> bool {
    action.canonical(w) == w
}

/// Orbit labels for every subset of `0..width`, for small widths.
#[derive(Debug)]
pub struct DenseOrbitTable {
    width: usize,
    ids: Vec<u32>,
    reps: Vec<u64>,
    sizes: Vec<u32>,
}

impl DenseOrbitTable {
    pub fn build(width: usize, generators: &[Permutation]) -> Self {
        assert!(width <= 32);
        let tables: Vec<ByteTables> = generators
            .iter()
            .filter(|g| !g.is_identity())
            .map(ByteTables::new)
            .collect();
        let total = 1usize << width;
        let mut ids = vec![u32::MAX; total];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        let mut stack: Vec<u64> = Vec::new();
        let mut members: Vec<u64> = Vec::new();
        for w in 0..total as u64 {
            if ids[w as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            ids[w as usize] = id;
            stack.push(w);
            members.clear();
            let mut best = w;
            while let Some(x) = stack.pop() {
                members.push(x);
                if lex_key(x) > lex_key(best) {
                    best = x;
                }
                for t in &tables {
                    let y = t.apply(x);
                    if ids[y as usize] == u32::MAX {
                        ids[y as usize] = id;
                        stack.push(y);
                    }
                }
            }
            reps.push(best);
            sizes.push(members.len() as u32);
        }
        DenseOrbitTable { width, ids, reps, sizes }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }

    #[inline]
    pub fn lookup(&self, w: u64) -> (u64, u128) {
        let id = self.ids[w as usize] as usize;
        (self.reps[id], u128::from(self.sizes[id]))
    }

    #[inline]
    pub fn orbit_id(&self, w: u64) -> u32 {
        self.ids[w as usize]
    }

    pub fn rep_of(&self, id: u32) -> u64 {
        self.reps[id as usize]
    }

    pub fn size_of(&self, id: u32) -> u128 {
        u128::from(self.sizes[id as usize])
    }
}

/// Orbit representative, orbit size and dense orbit id of a subset.
/// `size` is 0 and `id` is [`OrbitInfo::NO_ID`] when the keyer cannot
/// supply them cheaply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitInfo {
    pub rep: u64,
    pub size: u128,
    pub id: u32,
}

impl OrbitInfo {
    pub const NO_ID: u32 = u32::MAX;
}

/// Maps subsets to their orbit representative and orbit size.
#[derive(Debug)]
pub enum OrbitKeyer {
    Dense(DenseOrbitTable),
    Search(BitAction),
    /// The group fixes every point from `split` to `width`; keys come from
    /// the inner keyer on the low bits.
    FixedTail { inner: Arc<OrbitKeyer>, split: usize, width: usize },
}

impl OrbitKeyer {
    #[inline]
    pub fn lookup(&self, w: u64) -> OrbitInfo {
        match self {
            OrbitKeyer::Dense(t) => {
                let id = t.orbit_id(w);
                OrbitInfo { rep: t.rep_of(id), size: t.size_of(id), id }
            }
            OrbitKeyer::Search(a) => OrbitInfo { rep: a.canonical(w), size: 0, id: OrbitInfo::NO_ID },
            OrbitKeyer::FixedTail { inner, split, .. } => {
                let low = low_mask(*split);
                let tail = w >> split;
                let info = inner.lookup(w & low);
                let id = if info.id == OrbitInfo::NO_ID {
                    info.id
                } else {
                    ((info.id as u64) << self.tail_bits() | tail) as u32
                };
                OrbitInfo { rep: info.rep | (w & !low), size: info.size, id }
            }
        }
    }

    fn tail_bits(&self) -> usize {
        match self {
            OrbitKeyer::FixedTail { split, width, .. } => width - split,
            _ => 0,
        }
    }

    /// Number of dense orbit ids, if ids are available.
    pub fn id_count(&self) -> Option<usize> {
        match self {
            OrbitKeyer::Dense(t) => Some(t.orbit_count()),
            OrbitKeyer::Search(_) => None,
            OrbitKeyer::FixedTail { inner, .. } => {
                inner.id_count().map(|c| c << self.tail_bits())
            }
        }
    }

    pub fn rep_of_id(&self, id: u32) -> u64 {
        match self {
            OrbitKeyer::Dense(t) => t.rep_of(id),
            OrbitKeyer::Search(_) => panic!("search keyer has no ids"),
            OrbitKeyer::FixedTail { inner, split, .. } => {
                let tb = self.tail_bits();
                let tail = u64::from(id) & low_mask(tb);
                inner.rep_of_id(id >> tb) | tail << split
            }
        }
    }

    pub fn size_of_id(&self, id: u32) -> u128 {
        match self {
            OrbitKeyer::Dense(t) => t.size_of(id),
            OrbitKeyer::Search(_) => panic!("search keyer has no ids"),
            OrbitKeyer::FixedTail { inner, .. } => inner.size_of_id(id >> self.tail_bits()),
        }
    }

    /// Orbit size of a representative.
    pub fn orbit_size(&self, rep: u64) -> u128 {
        match self {
            OrbitKeyer::Dense(t) => t.lookup(rep).1,
            OrbitKeyer::Search(a) => a.orbit_size(rep),
            OrbitKeyer::FixedTail { inner, split, .. } => inner.orbit_size(rep & low_mask(*split)),
        }
    }
}
