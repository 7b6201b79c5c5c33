//! Canonical colorings: the prefix-pruned canonicity test and depth-first
//! enumeration of one representative per orbit.
//!
//! Colorings of up to 64 positions with colors `< 4` are packed into a
//! `u128`, two bits per position, position 0 in the most significant bits,
//! so that integer order is lexicographic order.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graphs::CodeGraph;
use crate::permgroup::{
    automorphism_group, canonical_stabilizer, Count, Permutation, StrongGeneratingSystem,
    TwinClasses,
};

pub const MAX_POSITIONS: usize = 64;
pub const MAX_COLORS: u8 = 4;

#[inline]
fn shift(j: usize) -> u32 {
    (126 - 2 * j) as u32
}

#[inline]
pub(crate) fn digit(w: u128, j: usize) -> u8 {
    (w >> shift(j) & 3) as u8
}

#[inline]
pub(crate) fn unit(j: usize) -> u128 {
    1u128 << shift(j)
}

pub fn pack(coloring: &[u8]) -> u128 {
    coloring
        .iter()
        .enumerate()
        .fold(0u128, |w, (j, &c)| w | u128::from(c & 3) << shift(j))
}

pub fn unpack(w: u128, k: usize) -> Vec<u8> {
    (0..k).map(|j| digit(w, j)).collect()
}

/// A permutation of packed digits as shifted runs: consecutive positions
/// taken from consecutive positions move together.
#[derive(Debug, Clone)]
struct PackedMove {
    fixed: u128,
    /// `(destination mask, shift)`; positive shifts move left.
    runs: Vec<(u128, i32)>,
}

impl PackedMove {
    /// `images[j]` is the position whose digit lands at `j`.
    fn from_images(images: &[usize]) -> Self {
        let mut fixed = 0u128;
        let mut runs: Vec<(u128, i32)> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (j, &src) in images.iter().enumerate() {
            if src == j {
                fixed |= 3u128 << shift(j);
                last = None;
                continue;
            }
            let extends = matches!(last, Some((d, s)) if d + 1 == j && s + 1 == src);
            if !extends {
                runs.push((0, 2 * (src as i32 - j as i32)));
            }
            runs.last_mut().expect("run").0 |= 3u128 << shift(j);
            last = Some((j, src));
        }
        PackedMove { fixed, runs }
    }

    #[inline]
    fn apply(&self, w: u128) -> u128 {
        let mut out = w & self.fixed;
        for &(mask, by) in &self.runs {
            let moved = if by >= 0 { w << by } else { w >> -by };
            out |= moved & mask;
        }
        out
    }
}

#[derive(Debug, Clone)]
struct PackedLevel {
    orbit: Vec<u8>,
    moves: Vec<PackedMove>,
    /// The basic orbit lies inside the twin class of the base point.
    twin: bool,
    /// Orbit points other than the base point, ascending.
    rest: Vec<u8>,
    /// Length of the run of positions `i, i+1, …` forming the rest of a
    /// twin class, when this level heads one; such runs are handled at once.
    segment: usize,
    segment_mask: u128,
}

const NO_CLASS: u16 = u16::MAX;

/// Replaces the transversal element `u` of level `i` by the member of
/// `u·G_(i+1)` that reads every twin class beyond `i` in increasing order,
/// so that sorted classes stay sorted.
fn order_preserving(u: &Permutation, classes: &[Vec<u8>], i: usize) -> Vec<usize> {
    let mut images = u.images().to_vec();
    for c in classes {
        let pos: Vec<usize> = c.iter().map(|&p| p as usize).filter(|&p| p > i).collect();
        let mut src: Vec<usize> = pos.iter().map(|&p| images[p]).collect();
        src.sort_unstable();
        for (p, s) in pos.into_iter().zip(src) {
            images[p] = s;
        }
    }
    images
}

/// A stabilizer chain specialized to packed colorings.
///
/// Twin classes (vertices with equal neighborhoods) are kept sorted in
/// descending color order after every level: a transposition of two twins
/// beyond the current base point lies in every later stabilizer, so
/// sorting never changes the stabilizer count.
#[derive(Debug, Clone)]
pub struct ColoringChain {
    k: usize,
    levels: Vec<PackedLevel>,
    /// `guards[p]`: earlier base points whose basic orbit contains `p`.
    guards: Vec<Vec<u8>>,
    classes: Vec<Vec<u8>>,
    order: BigUint,
    order_small: Option<u128>,
}

/// Small multiset of words with exact counts.
struct CountedWords<C> {
    items: Vec<(u128, C)>,
    index: FxHashMap<u128, usize>,
}

impl<C: Count> CountedWords<C> {
    fn new() -> Self {
        Self { items: Vec::new(), index: FxHashMap::default() }
    }

    fn clear(&mut self) {
        self.items.clear();
        self.index.clear();
    }

    #[inline]
    fn add(&mut self, w: u128, c: &C) {
        if self.items.len() < 16 {
            if let Some(item) = self.items.iter_mut().find(|(x, _)| *x == w) {
                item.1.add(c);
                return;
            }
            self.items.push((w, c.clone()));
            if self.items.len() == 16 {
                for (i, (x, _)) in self.items.iter().enumerate() {
                    self.index.insert(*x, i);
                }
            }
            return;
        }
        match self.index.get(&w) {
            Some(&i) => self.items[i].1.add(c),
            None => {
                self.index.insert(w, self.items.len());
                self.items.push((w, c.clone()));
            }
        }
    }
}

/// Reusable buffers for [`ColoringChain::stabilizer`].
pub struct Scratch<C> {
    a: CountedWords<C>,
    b: CountedWords<C>,
}

impl<C: Count> Scratch<C> {
    pub fn new() -> Self {
        Self { a: CountedWords::new(), b: CountedWords::new() }
    }
}

impl<C: Count> Default for Scratch<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl ColoringChain {
    pub fn new(sgs: &StrongGeneratingSystem) -> Result<Self> {
        Self::with_twins(sgs, &TwinClasses::none())
    }

    /// Chain that keeps the given twin classes sorted. Every transposition
    /// inside a class must be a group element.
    pub fn with_twins(sgs: &StrongGeneratingSystem, twins: &TwinClasses) -> Result<Self> {
        let k = sgs.degree();
        if k > MAX_POSITIONS {
            return Err(Error::domain(format!("{k} positions exceed the packed limit of 64")));
        }
        let classes: Vec<Vec<u8>> = twins
            .classes()
            .iter()
            .map(|c| {
                let mut c: Vec<u8> = c.iter().map(|&p| p as u8).collect();
                c.sort_unstable();
                c
            })
            .collect();
        let mut class_of = vec![NO_CLASS; k];
        for (ci, c) in classes.iter().enumerate() {
            for &p in c {
                if p as usize >= k {
                    return Err(Error::Width { expected: k, got: p as usize + 1 });
                }
                class_of[p as usize] = ci as u16;
            }
        }
        let mut guards = vec![Vec::new(); k];
        let levels = (0..k)
            .map(|i| {
                let orbit: Vec<u8> = sgs.basic_orbit(i).iter().map(|&p| p as u8).collect();
                for &p in &orbit {
                    if p as usize != i {
                        guards[p as usize].push(i as u8);
                    }
                }
                let twin = orbit.len() > 1
                    && class_of[i] != NO_CLASS
                    && orbit.iter().all(|&p| class_of[p as usize] == class_of[i]);
                let moves: Vec<PackedMove> = sgs
                    .transversal(i)
                    .iter()
                    .map(|u| PackedMove::from_images(&order_preserving(u, &classes, i)))
                    .collect();
                let mut rest: Vec<u8> = orbit.iter().copied().filter(|&p| p as usize != i).collect();
                rest.sort_unstable();
                let segment = if twin && rest.iter().enumerate().all(|(r, &p)| p as usize == i + 1 + r) {
                    rest.len() + 1
                } else {
                    0
                };
                let segment_mask = (i..i + segment).fold(0u128, |m, j| m | 3u128 << shift(j));
                PackedLevel { orbit, moves, twin, rest, segment, segment_mask }
            })
            .collect();
        let order = sgs.order();
        let order_small = if order.bits() < 127 { order.to_u128() } else { None };
        Ok(ColoringChain { k, levels, guards, classes, order, order_small })
    }

    pub fn positions(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Group order when it fits comfortably in 128 bits.
    pub fn order_small(&self) -> Option<u128> {
        self.order_small
    }

    /// Cheap necessary condition for canonicity of a child obtained by raising position `p`.
    #[inline]
    pub fn passes_guards(&self, w: u128, p: usize) -> bool {
        let v = digit(w, p);
        self.guards[p].iter().all(|&l| digit(w, l as usize) >= v)
    }

    fn twins_sorted(&self, w: u128) -> bool {
        self.classes.iter().all(|c| {
            c.windows(2).all(|x| digit(w, x[0] as usize) >= digit(w, x[1] as usize))
        })
    }

    /// Stabilizer order of `c` if `c` is canonical (lexicographically maximal
    /// in its orbit), else `None`.
    pub fn stabilizer<C: Count>(&self, c: u128, scratch: &mut Scratch<C>) -> Option<C> {
        if !self.twins_sorted(c) {
            return None;
        }
        self.stabilizer_sorted(c, scratch)
    }

    /// [`Self::stabilizer`] for a coloring already known to have sorted twin
    /// classes (every node of the depth-first tree does).
    pub(crate) fn stabilizer_sorted<C: Count>(&self, c: u128, scratch: &mut Scratch<C>) -> Option<C> {
        let Scratch { a: queue, b: next } = scratch;
        queue.clear();
        queue.add(c, &C::one());
        let mut i = 0;
        while i < self.k {
            let target = digit(c, i);
            let level = &self.levels[i];
            if level.segment > 0 {
                // All words agree with `c` on the segment or are decided by
                // their first difference; survivors gain Π m! for the color
                // multiplicities m of the segment.
                let mask = level.segment_mask;
                let mut drop = false;
                for (w, _) in &queue.items {
                    let d = (*w ^ c) & mask;
                    if d != 0 {
                        let j = d.leading_zeros() as usize / 2;
                        if digit(*w, j) > digit(c, j) {
                            return None;
                        }
                        drop = true;
                    }
                }
                let mut counts = [0u32; 4];
                for j in i..i + level.segment {
                    counts[digit(c, j) as usize] += 1;
                }
                let mut factor = C::one();
                for m in counts {
                    for f in 2..=m {
                        factor.scale(f);
                    }
                }
                if drop {
                    next.clear();
                    for (w, cnt) in &queue.items {
                        if (*w ^ c) & mask == 0 {
                            next.add(*w, cnt);
                        }
                    }
                    std::mem::swap(queue, next);
                }
                for (_, cnt) in queue.items.iter_mut() {
                    cnt.mul(&factor);
                }
                i += level.segment;
                continue;
            }
            i += 1;
            let i = i - 1;
            if level.orbit.len() == 1 || level.twin {
                // Either only position `i` is reachable, or the reachable
                // positions form a sorted run of twins headed by `i`.
                let mut drop = false;
                for (w, cnt) in queue.items.iter_mut() {
                    let v = digit(*w, i);
                    if v > target {
                        return None;
                    }
                    if v < target {
                        drop = true;
                    } else if level.twin {
                        let run = level
                            .rest
                            .iter()
                            .take_while(|&&p| digit(*w, p as usize) == target)
                            .count();
                        if run > 0 {
                            cnt.scale(run as u32 + 1);
                        }
                    }
                }
                if drop {
                    next.clear();
                    for (w, cnt) in &queue.items {
                        if digit(*w, i) == target {
                            next.add(*w, cnt);
                        }
                    }
                    std::mem::swap(queue, next);
                }
                continue;
            }
            next.clear();
            for (w, cnt) in &queue.items {
                for (t, &src) in level.orbit.iter().enumerate() {
                    let v = digit(*w, src as usize);
                    if v > target {
                        return None;
                    }
                    if v == target {
                        let child = level.moves[t].apply(*w);
                        next.add(child, cnt);
                    }
                }
            }
            std::mem::swap(queue, next);
        }
        debug_assert_eq!(queue.items.len(), 1);
        queue.items.pop().map(|(_, cnt)| cnt)
    }

    /// Orbit size from a stabilizer order.
    pub fn orbit_size_small(&self, stab: u128) -> u128 {
        self.order_small.expect("small group order") / stab
    }

    pub fn orbit_size_big(&self, stab: &BigUint) -> u128 {
        (&self.order / stab).to_u128().expect("orbit size fits 128 bits")
    }

    /// Orbit size of `c` if canonical.
    pub fn canonical_orbit_size(&self, c: u128) -> Option<u128> {
        if self.order_small.is_some() {
            let s: u128 = self.stabilizer(c, &mut Scratch::new())?;
            Some(self.orbit_size_small(s))
        } else {
            let s: BigUint = self.stabilizer(c, &mut Scratch::new())?;
            Some(self.orbit_size_big(&s))
        }
    }
}

/// Algorithm-2 canonicity test on an explicit color array.
pub fn is_canonical(coloring: &[u8], sgs: &StrongGeneratingSystem) -> Result<bool> {
    if coloring.len() != sgs.degree() {
        return Err(Error::Width { expected: sgs.degree(), got: coloring.len() });
    }
    Ok(canonical_stabilizer::<BigUint>(sgs, &TwinClasses::none(), coloring).is_some())
}

/// Children of a node in the depth-first coloring tree.
#[inline]
pub(crate) fn highest_nonzero(w: u128, k: usize) -> Option<usize> {
    if w == 0 {
        None
    } else {
        let h = (127 - w.trailing_zeros() as usize) / 2;
        debug_assert!(h < k);
        Some(h)
    }
}

/// Depth-first enumeration of canonical colorings, yielding each coloring
/// with its orbit size.
pub struct CanonicalColorings {
    chain: ColoringChain,
    colors: u8,
    stack: Vec<u128>,
}

impl CanonicalColorings {
    pub fn new(chain: ColoringChain, colors: u8) -> Result<Self> {
        if colors == 0 || colors > MAX_COLORS {
            return Err(Error::domain(format!("color count must be in 1..=4, got {colors}")));
        }
        Ok(Self { chain, colors, stack: vec![0] })
    }
}

impl Iterator for CanonicalColorings {
    type Item = (Vec<u8>, u128);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let w = self.stack.pop()?;
            let Some(size) = self.chain.canonical_orbit_size(w) else {
                continue;
            };
            let k = self.chain.k;
            let h = highest_nonzero(w, k);
            let lo = h.map_or(0, |h| h + 1);
            if let Some(h) = h {
                if digit(w, h) + 1 < self.colors {
                    let child = w + unit(h);
                    if self.chain.passes_guards(child, h) {
                        self.stack.push(child);
                    }
                }
            }
            if self.colors > 1 {
                for i in lo..k {
                    let child = w + unit(i);
                    if self.chain.passes_guards(child, i) {
                        self.stack.push(child);
                    }
                }
            }
            return Some((unpack(w, k), size));
        }
    }
}

/// All canonical `c`-colorings of the system vertices of `g`.
pub fn canonical_colorings(g: &CodeGraph, c: u8) -> Result<CanonicalColorings> {
    let aut = automorphism_group(g);
    let twins = TwinClasses::of_graph(g, g.k_sys());
    CanonicalColorings::new(ColoringChain::with_twins(&aut.sgs, &twins)?, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{repetition_graph, CodeGraph};
    use crate::permgroup::schreier_sims;

    #[test]
    fn packing_is_lexicographic() {
        let a = pack(&[1, 0, 3]);
        let b = pack(&[0, 3, 3]);
        assert!(a > b);
        assert_eq!(unpack(a, 3), vec![1, 0, 3]);
        assert_eq!(highest_nonzero(a, 3), Some(2));
        assert_eq!(highest_nonzero(pack(&[2, 0, 0]), 3), Some(0));
        assert_eq!(highest_nonzero(0, 3), None);
    }

    #[test]
    fn star_counts() {
        let g = repetition_graph(5).unwrap();
        let two: Vec<_> = canonical_colorings(&g, 2).unwrap().collect();
        assert_eq!(two.len(), 10);
        assert_eq!(two.iter().map(|(_, m)| m).sum::<u128>(), 32);
        let four: Vec<_> = canonical_colorings(&g, 4).unwrap().collect();
        assert_eq!(four.len(), 140);
        assert_eq!(four.iter().map(|(_, m)| m).sum::<u128>(), 1024);
        let sgs = automorphism_group(&g).sgs;
        let mut canonical = 0;
        for w in 0..32u32 {
            let c: Vec<u8> = (0..5).map(|i| (w >> i & 1) as u8).collect();
            if is_canonical(&c, &sgs).unwrap() {
                canonical += 1;
            }
        }
        assert_eq!(canonical, 10);
        assert!(is_canonical(&[0, 1], &sgs).is_err());
    }

    #[test]
    fn trivial_group_keeps_everything() {
        let path = CodeGraph::from_edges(4, 3, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let all: Vec<_> = canonical_colorings(&path, 2).unwrap().collect();
        assert_eq!(all.len(), 8);
        let sgs = schreier_sims(3, &[]).unwrap();
        assert!(is_canonical(&[0, 1, 0], &sgs).unwrap());
    }

    #[test]
    fn packed_chain_agrees_with_arrays() {
        let g = repetition_graph(4).unwrap();
        let sgs = automorphism_group(&g).sgs;
        let chain = ColoringChain::new(&sgs).unwrap();
        let twin_chain = ColoringChain::with_twins(&sgs, &TwinClasses::of_graph(&g, 4)).unwrap();
        for w in 0..256u32 {
            let c: Vec<u8> = (0..4).map(|i| (w >> (2 * i) & 3) as u8).collect();
            let a = canonical_stabilizer::<BigUint>(&sgs, &TwinClasses::none(), &c);
            let b: Option<u128> = chain.stabilizer(pack(&c), &mut Scratch::new());
            assert_eq!(a.clone().map(|x| x.to_u128().unwrap()), b);
            let t: Option<u128> = twin_chain.stabilizer(pack(&c), &mut Scratch::new());
            assert_eq!(a.map(|x| x.to_u128().unwrap()), t);
        }
    }
}
