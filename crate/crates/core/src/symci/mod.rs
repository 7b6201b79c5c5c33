//! Symmetry-compressed spectra of the decohered graph state and their
//! evaluation at arbitrary channel points.

mod build;
mod cache;
mod coloring;
mod eval;

pub use build::{symmetric_lambda, symmetric_lambda_with, BuildOptions, BuildStats};
pub use cache::{load_spectrum, save_spectrum, spectrum_from_json, spectrum_to_json};
pub use coloring::{
    canonical_colorings, is_canonical, pack, unpack, CanonicalColorings, ColoringChain, Scratch,
};
pub use eval::{evaluate_ci, evaluate_parts, EvalPlan};

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;

/// Exponents `(e1, e2, e3)` of `(p1, p2, p3)`, packed one byte each.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(u32);

impl Monomial {
    pub fn new(e1: u8, e2: u8, e3: u8) -> Self {
        Monomial(u32::from(e1) | u32::from(e2) << 8 | u32::from(e3) << 16)
    }

    pub fn exponents(self) -> [u8; 3] {
        [self.0 as u8, (self.0 >> 8) as u8, (self.0 >> 16) as u8]
    }

    pub fn degree(self) -> usize {
        self.exponents().iter().map(|&e| e as usize).sum()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.exponents();
        write!(f, "{a},{b},{c}")
    }
}

/// Polynomial in `(p1, p2, p3)` with positive integer coefficients; each
/// monomial is completed by `p0^(k - e1 - e2 - e3)` at evaluation.
///
/// Coefficients are exact. For codes on at most 64 vertices every
/// coefficient is below `2^(k_sys + n) <= 2^127`, so `u128` is exact.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SparsePoly {
    terms: Vec<(Monomial, u128)>,
}

impl SparsePoly {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sums duplicate monomials and drops zero coefficients.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, u128)>>(terms: I) -> Self {
        let mut v: Vec<(Monomial, u128)> = terms.into_iter().filter(|t| t.1 != 0).collect();
        v.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(Monomial, u128)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => out.push((m, c)),
            }
        }
        SparsePoly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, u128)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: Monomial) -> u128 {
        self.terms
            .binary_search_by_key(&m, |t| t.0)
            .map_or(0, |i| self.terms[i].1)
    }

    pub fn coefficient_big(&self, m: Monomial) -> BigUint {
        BigUint::from(self.coefficient(m))
    }

    /// Sum of all coefficients (the value at `p0 = p1 = p2 = p3 = 1`).
    pub fn coefficient_sum(&self) -> u128 {
        self.terms.iter().map(|t| t.1).sum()
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        SparsePoly { terms: out }
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("{c}·[{m:?}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// One orbit of eigenvalues: `multiplicity` equal eigenvalues, each the
/// value of `poly`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumTerm {
    /// Canonical orbit representative (subset mask).
    pub key: u64,
    pub multiplicity: u128,
    pub poly: SparsePoly,
}

/// Orbit-compressed spectra of `σ_RB` (`rb`) and `σ_B` (`b`). The `b`
/// values carry an extra factor `2^-k_env` applied at evaluation.
#[derive(Debug)]
pub struct CISpectrum {
    pub k_sys: usize,
    pub k_env: usize,
    pub rb: Vec<SpectrumTerm>,
    pub b: Vec<SpectrumTerm>,
    plan: OnceLock<EvalPlan>,
}

impl Clone for CISpectrum {
    fn clone(&self) -> Self {
        CISpectrum::new(self.k_sys, self.k_env, self.rb.clone(), self.b.clone())
    }
}

impl PartialEq for CISpectrum {
    fn eq(&self, other: &Self) -> bool {
        self.k_sys == other.k_sys
            && self.k_env == other.k_env
            && self.rb == other.rb
            && self.b == other.b
    }
}

impl CISpectrum {
    pub fn new(k_sys: usize, k_env: usize, rb: Vec<SpectrumTerm>, b: Vec<SpectrumTerm>) -> Self {
        CISpectrum { k_sys, k_env, rb, b, plan: OnceLock::new() }
    }

    /// Floating-point evaluation plan, built on first use.
    pub fn plan(&self) -> &EvalPlan {
        self.plan.get_or_init(|| EvalPlan::new(self))
    }

    /// Number of stored monomials across both spectra.
    pub fn term_count(&self) -> usize {
        self.rb.iter().chain(&self.b).map(|t| t.poly.len()).sum()
    }
}
