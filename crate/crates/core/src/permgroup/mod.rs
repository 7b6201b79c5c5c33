//! Permutation groups, colored-graph automorphisms and canonical images.

mod canon;
mod perm;
mod refine;
mod schreier;

pub use canon::{
    canonical_image, canonical_stabilizer, is_canonical_bits, orbit_of_coloring, orbit_of_point, stabilizer_order,
    BitAction, Count, DenseOrbitTable, OrbitInfo, OrbitKeyer, TwinClasses,
};
pub use perm::Permutation;
pub use refine::{canonical_form, colored_search, CanonicalForm};
pub use schreier::{schreier_sims, StrongGeneratingSystem};

use num_bigint::BigUint;

use crate::graphs::CodeGraph;

/// Automorphisms of a code graph that preserve the system/environment split.
#[derive(Debug, Clone)]
pub struct ColoredGraphAut {
    pub generators: Vec<Permutation>,
    /// Order of the full group acting on all vertices.
    pub order: BigUint,
    /// Chain for the action on system vertices only.
    pub sgs: StrongGeneratingSystem,
    /// Chain for the action on all vertices.
    pub full_sgs: StrongGeneratingSystem,
}

impl ColoredGraphAut {
    /// Order of the group restricted to system vertices.
    pub fn system_order(&self) -> BigUint {
        self.sgs.order()
    }
}

pub fn automorphism_group(g: &CodeGraph) -> ColoredGraphAut {
    let colors: Vec<u32> = (0..g.n()).map(|v| u32::from(v >= g.k_sys())).collect();
    let found = colored_search(g.adjacency(), &colors, false);
    let full_sgs = schreier_sims(g.n(), &found.generators).expect("generators share the degree");
    let sgs = full_sgs.restrict(g.k_sys());
    ColoredGraphAut { order: full_sgs.order(), generators: found.generators, sgs, full_sgs }
}
