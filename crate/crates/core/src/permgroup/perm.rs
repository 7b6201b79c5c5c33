use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `0..n`; entry `i` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::domain(format!("not a permutation: {images:?}")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        Self { images }
    }

    /// Product of disjoint or overlapping cycles, applied right to left.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut p = Self::identity(n);
        for cycle in cycles.iter().rev() {
            if cycle.iter().any(|&c| c >= n) {
                return Err(Error::domain(format!("cycle {cycle:?} out of range for degree {n}")));
            }
            let mut c = Self::identity(n);
            for w in 0..cycle.len() {
                c.images[cycle[w]] = cycle[(w + 1) % cycle.len()];
            }
            Self::from_images(c.images.clone())?;
            p = c.compose(&p);
        }
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// First point moved, if any.
    pub fn first_moved(&self) -> Option<usize> {
        self.images.iter().enumerate().position(|(i, &j)| i != j)
    }

    /// Restriction to `0..k`; the points `0..k` must be mapped among themselves.
    pub fn restrict(&self, k: usize) -> Permutation {
        debug_assert!(self.images[..k].iter().all(|&i| i < k));
        Permutation { images: self.images[..k].to_vec() }
    }

    /// Right action on a color array: `(c·g)[j] = c[g(j)]`.
    pub fn act<T: Copy>(&self, colors: &[T]) -> Vec<T> {
        self.images.iter().map(|&j| colors[j]).collect()
    }

    /// Right action on a subset mask over the first `degree` points.
    pub fn act_mask(&self, mask: u64) -> u64 {
        let mut out = 0u64;
        for (j, &src) in self.images.iter().enumerate() {
            out |= (mask >> src & 1) << j;
        }
        out
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut cycle = vec![s];
            seen[s] = true;
            let mut j = self.images[s];
            while j != s {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_and_display() {
        let p = Permutation::from_cycles(5, &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(p.images(), &[0, 2, 1, 4, 3]);
        assert_eq!(p.to_string(), "(1 2)(3 4)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_cycles(3, &[&[0, 3]]).is_err());
    }

    #[test]
    fn composition_order() {
        let a = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        // a ∘ b sends 1 -> 2 -> 2 and 2 -> 1 -> 0.
        let ab = a.compose(&b);
        assert_eq!(ab.images(), &[1, 2, 0]);
        assert!(ab.compose(&ab.inverse()).is_identity());
    }

    #[test]
    fn right_action() {
        let a = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let c = [7u8, 8, 9];
        assert_eq!(b.act(&a.act(&c)), a.compose(&b).act(&c));
        let m = 0b011u64;
        assert_eq!(a.act_mask(b.act_mask(m)), b.compose(&a).act_mask(m));
        assert_eq!(b.act_mask(m), 0b101);
    }
}
