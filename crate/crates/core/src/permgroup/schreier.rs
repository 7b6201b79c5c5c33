//! Stabilizer chains relative to the standard base `0, 1, …, n-1`.

use num_bigint::BigUint;

use super::Permutation;
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Level {
    /// `reps[t]` maps the base point to `orbit[t]`; `reps[0]` is the identity.
    reps: Vec<Permutation>,
    inv_reps: Vec<Permutation>,
    orbit: Vec<usize>,
    /// Position of a point in `orbit`, or `NONE`.
    index: Vec<u32>,
}

impl Level {
    fn trivial(n: usize, base: usize) -> Self {
        let mut index = vec![NONE; n];
        index[base] = 0;
        Level {
            reps: vec![Permutation::identity(n)],
            inv_reps: vec![Permutation::identity(n)],
            orbit: vec![base],
            index,
        }
    }

    fn build(n: usize, base: usize, gens: &[&Permutation]) -> Self {
        let mut level = Level::trivial(n, base);
        let mut head = 0;
        while head < level.orbit.len() {
            let beta = level.orbit[head];
            let u = level.reps[head].clone();
            for s in gens {
                let img = s.image(beta);
                if level.index[img] == NONE {
                    level.index[img] = level.orbit.len() as u32;
                    level.orbit.push(img);
                    let rep = s.compose(&u);
                    level.inv_reps.push(rep.inverse());
                    level.reps.push(rep);
                }
            }
            head += 1;
        }
        level
    }
}

/// Transversals `t_0, …, t_{m-1}` of a stabilizer chain for the standard base.
#[derive(Debug, Clone)]
pub struct StrongGeneratingSystem {
    n: usize,
    levels: Vec<Level>,
}

impl StrongGeneratingSystem {
    pub fn degree(&self) -> usize {
        self.n
    }

    /// The base; always `0..degree`.
    pub fn base(&self) -> Vec<usize> {
        (0..self.levels.len()).collect()
    }

    /// Transversal of `G_i / G_{i+1}`: element `t` maps `i` to `orbit(i)[t]`.
    pub fn transversal(&self, i: usize) -> &[Permutation] {
        &self.levels[i].reps
    }

    /// Orbit of base point `i` under `G_i`.
    pub fn basic_orbit(&self, i: usize) -> &[usize] {
        &self.levels[i].orbit
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Sifts `g` through the chain; returns the residue and the level where it stopped.
    fn sift_from(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for i in start..self.levels.len() {
            let beta = g.image(i);
            if beta == i {
                continue;
            }
            let t = self.levels[i].index[beta];
            if t == NONE {
                return (g, i);
            }
            g = self.levels[i].inv_reps[t as usize].compose(&g);
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.n && self.sift_from(g.clone(), 0).0.is_identity()
    }

    /// Chain of the action on `0..k`, valid when the group maps `0..k` to itself.
    pub fn restrict(&self, k: usize) -> StrongGeneratingSystem {
        let levels = self.levels[..k]
            .iter()
            .map(|l| Level {
                reps: l.reps.iter().map(|p| p.restrict(k)).collect(),
                inv_reps: l.inv_reps.iter().map(|p| p.restrict(k)).collect(),
                orbit: l.orbit.clone(),
                index: l.index[..k].to_vec(),
            })
            .collect();
        StrongGeneratingSystem { n: k, levels }
    }

    /// All group elements, for small groups.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.n)];
        for level in self.levels.iter().rev() {
            if level.reps.len() == 1 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * level.reps.len());
            for u in &level.reps {
                for h in &out {
                    next.push(u.compose(h));
                }
            }
            out = next;
        }
        out
    }

    /// Elements as products `u_0 ∘ u_1 ∘ …` of one transversal element per level.
    pub fn random_element<R: rand::Rng>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.n);
        for level in &self.levels {
            let u = &level.reps[rng.gen_range(0..level.reps.len())];
            g = g.compose(u);
        }
        g
    }
}

/// Schreier–Sims for the standard base.
pub fn schreier_sims(n: usize, generators: &[Permutation]) -> Result<StrongGeneratingSystem> {
    if let Some(g) = generators.iter().find(|g| g.degree() != n) {
        return Err(Error::Width { expected: n, got: g.degree() });
    }
    // Strong generators with the first point they move.
    let mut strong: Vec<(usize, Permutation)> = Vec::new();
    for g in generators {
        if let Some(f) = g.first_moved() {
            if !strong.iter().any(|(_, s)| s == g) {
                strong.push((f, g.clone()));
            }
        }
    }
    let level_gens = |strong: &[(usize, Permutation)], i: usize| -> Vec<Permutation> {
        strong.iter().filter(|(f, _)| *f >= i).map(|(_, s)| s.clone()).collect()
    };
    let mut sgs = StrongGeneratingSystem {
        n,
        levels: (0..n)
            .map(|i| {
                let gens = level_gens(&strong, i);
                Level::build(n, i, &gens.iter().collect::<Vec<_>>())
            })
            .collect(),
    };
    if n == 0 {
        return Ok(sgs);
    }
    let mut i = n - 1;
    loop {
        let gens = level_gens(&strong, i);
        let mut added = None;
        'scan: for t in 0..sgs.levels[i].orbit.len() {
            let beta = sgs.levels[i].orbit[t];
            for s in &gens {
                let img = s.image(beta);
                let t2 = sgs.levels[i].index[img] as usize;
                let schreier =
                    sgs.levels[i].inv_reps[t2].compose(&s.compose(&sgs.levels[i].reps[t]));
                let (residue, j) = sgs.sift_from(schreier, i + 1);
                if !residue.is_identity() {
                    added = Some((j, residue));
                    break 'scan;
                }
            }
        }
        match added {
            Some((j, h)) => {
                strong.push((j, h));
                for l in i + 1..=j {
                    let gens = level_gens(&strong, l);
                    sgs.levels[l] = Level::build(n, l, &gens.iter().collect::<Vec<_>>());
                }
                i = j;
            }
            None => {
                if i == 0 {
                    break;
                }
                i -= 1;
                let gens = level_gens(&strong, i);
                sgs.levels[i] = Level::build(n, i, &gens.iter().collect::<Vec<_>>());
            }
        }
    }
    Ok(sgs)
}
