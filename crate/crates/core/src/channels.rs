//! Pauli channel parameters, ray parametrization and the single-letter quantities.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tolerance on the probability sum of a channel point or ray direction.
pub const SUM_TOL: f64 = 1e-12;
/// Weights below this are treated as exact zeros in entropies.
pub const ZERO_WEIGHT: f64 = 1e-300;
/// Default bisection tolerance, 2^-20.
pub const DEFAULT_EPS: f64 = 1.0 / 1048576.0;

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// `-w log2 w`, with tiny weights treated as zero.
#[inline]
pub fn entropy_term(w: f64) -> f64 {
    if w < ZERO_WEIGHT {
        0.0
    } else {
        -w * w.log2()
    }
}

fn check_simplex(values: &[f64], what: &str) -> Result<Vec<f64>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("{what}: non-finite component")));
    }
    if values.iter().any(|&v| v < 0.0) {
        return Err(Error::domain(format!("{what}: negative component in {values:?}")));
    }
    let s: f64 = values.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::domain(format!(
            "{what}: components sum to {s}, not 1 within {SUM_TOL}"
        )));
    }
    Ok(values.iter().map(|v| v / s).collect())
}

fn parse_list(s: &str, len: usize, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != len {
        return Err(Error::domain(format!(
            "{what}: expected {len} comma-separated numbers, got {:?}",
            s
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|e| Error::domain(format!("{what}: cannot parse {p:?}: {e}")))
        })
        .collect()
}

/// A Pauli channel `rho -> p0 rho + p1 X rho X + p2 Y rho Y + p3 Z rho Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliParams {
    p: [f64; 4],
}

impl PauliParams {
    pub fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let v = check_simplex(&[p0, p1, p2, p3], "channel point")?;
        Ok(Self { p: [v[0], v[1], v[2], v[3]] })
    }

    pub fn from_array(p: [f64; 4]) -> Result<Self> {
        Self::new(p[0], p[1], p[2], p[3])
    }

    pub fn noiseless() -> Self {
        Self { p: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn probs(&self) -> [f64; 4] {
        self.p
    }

    pub fn p(&self, i: usize) -> f64 {
        self.p[i]
    }

    /// `q_i = p_i / p_0`; infinite when `p0 = 0` and `p_i > 0`.
    pub fn q(&self, i: usize) -> f64 {
        self.p[i] / self.p[0]
    }
}

impl FromStr for PauliParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = parse_list(s, 4, "channel point")?;
        Self::new(v[0], v[1], v[2], v[3])
    }
}

impl fmt::Display for PauliParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.p[0], self.p[1], self.p[2], self.p[3])
    }
}

/// Direction `(d1, d2, d3)` of a ray through the Pauli simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayDirection {
    d: [f64; 3],
}

impl RayDirection {
    pub fn new(d1: f64, d2: f64, d3: f64) -> Result<Self> {
        let v = check_simplex(&[d1, d2, d3], "ray direction")?;
        Ok(Self { d: [v[0], v[1], v[2]] })
    }

    pub fn depolarizing() -> Self {
        Self { d: [1.0 / 3.0; 3] }
    }

    /// Normalizes an arbitrary nonnegative vector onto the simplex.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let v = [v[0].max(0.0), v[1].max(0.0), v[2].max(0.0)];
        let s = v[0] + v[1] + v[2];
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain("ray direction: zero vector"));
        }
        Ok(Self { d: [v[0] / s, v[1] / s, v[2] / s] })
    }

    pub fn components(&self) -> [f64; 3] {
        self.d
    }

    /// True for a permutation of (0,0,1).
    pub fn is_dephasing(&self) -> bool {
        self.d.iter().filter(|&&x| x == 1.0).count() == 1
    }
}

impl FromStr for RayDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = parse_list(s, 3, "ray direction")?;
        Self::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for RayDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.d[0], self.d[1], self.d[2])
    }
}

/// The point `(1-x, x d1, x d2, x d3)`.
pub fn ray_at(d: &RayDirection, x: f64) -> Result<PauliParams> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("ray parameter x = {x} outside [0,1]")));
    }
    Ok(ray_point(d, x))
}

/// Unchecked variant of [`ray_at`] for hot loops with `x` already in range.
#[inline]
pub(crate) fn ray_point(d: &RayDirection, x: f64) -> PauliParams {
    PauliParams { p: [1.0 - x, x * d.d[0], x * d.d[1], x * d.d[2]] }
}

/// Shannon entropy in bits.
pub fn shannon_entropy(weights: &[f64]) -> Result<f64> {
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::domain("entropy: negative or non-finite weight"));
    }
    let mut total = KahanSum::new();
    weights.iter().for_each(|&w| total.add(w));
    if (total.value() - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "entropy: weights sum to {}, not 1",
            total.value()
        )));
    }
    let mut h = KahanSum::new();
    for &w in weights {
        h.add(entropy_term(w));
    }
    Ok(h.value())
}

pub fn binary_entropy(x: f64) -> f64 {
    entropy_term(x) + entropy_term(1.0 - x)
}

/// Single-letter coherent information `1 - H(p)`.
pub fn hashing_ci(p: &PauliParams) -> f64 {
    let mut h = KahanSum::new();
    for &w in &p.p {
        h.add(entropy_term(w));
    }
    1.0 - h.value()
}

fn direction_entropy(d: &RayDirection) -> f64 {
    d.d.iter().map(|&w| entropy_term(w)).sum()
}

/// Root of `1 - h(x) - x H(d)` on (0, 1/2], by bisection to `DEFAULT_EPS`.
pub fn single_letter_threshold(d: &RayDirection) -> f64 {
    let hd = direction_entropy(d);
    let f = |x: f64| 1.0 - binary_entropy(x) - x * hd;
    if f(0.5) >= 0.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0, 0.5);
    while hi - lo > DEFAULT_EPS {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sufficient condition for antidegradability of a Pauli channel.
pub fn is_antidegradable(p: &PauliParams) -> bool {
    let [p0, p1, p2, p3] = p.p;
    let sq = p0 * p0 + p1 * p1 + p2 * p2 + p3 * p3;
    1.0 >= 2.0 * sq - 8.0 * (p0 * p1 * p2 * p3).sqrt()
}
