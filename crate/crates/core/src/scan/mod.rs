//! Thresholds along rays, threshold surfaces, rate planes and the
//! exhaustive search over small codes.

mod rates;
mod search;
mod surface;

pub use rates::{rate_planes, write_rates_csv, RateNode, RATES_HEADER};
pub use search::{
    candidate_graphs, canonical_key, exhaustive_search, write_search_csv, SearchRecord, SEARCH_CANDIDATE_CAP,
    SEARCH_HEADER,
};
pub use surface::{surface, surface_direction, write_surface_csv, ThresholdSample, SURFACE_HEADER};

use crate::channels::{ray_at, RayDirection, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::symci::CISpectrum;

/// Points of the validation grid `j/32`, `j = 0..=16`.
pub const GRID_POINTS: usize = 17;

/// CI values up to this size are numerically indistinguishable from zero
/// and count as nonpositive.
pub const SIGN_TOL: f64 = 1e-12;

#[inline]
fn positive(v: f64) -> bool {
    v > SIGN_TOL
}

/// CI on the validation grid over `[0, 1/2]`.
pub fn sign_grid<F: Fn(f64) -> f64>(ci: F) -> [f64; GRID_POINTS] {
    std::array::from_fn(|j| ci(j as f64 / 32.0))
}

/// Number of sign changes on a grid.
pub fn sign_changes(values: &[f64]) -> usize {
    values.windows(2).filter(|w| positive(w[0]) != positive(w[1])).count()
}

fn check_pattern(values: &[f64]) -> Result<()> {
    if let Some(first) = values.iter().position(|&v| !positive(v)) {
        if let Some(j) = values[first..].iter().position(|&v| positive(v)) {
            return Err(Error::consistency(format!(
                "CI turns positive again at x = {}/32 after a nonpositive value at x = {first}/32; grid: {values:?}",
                first + j
            )));
        }
    }
    Ok(())
}

/// Root of a CI curve on `[0, 1/2]` by bisection to width `eps`.
///
/// `None` when the curve starts nonpositive, `1/2` when it is still positive
/// at `1/2 - eps`. Positivity is judged against [`SIGN_TOL`].
pub fn threshold_of<F: Fn(f64) -> f64>(ci: F, eps: f64) -> Result<Option<f64>> {
    if !(eps > 0.0 && eps < 1.0 / 32.0) {
        return Err(Error::domain(format!("eps must lie in (0, 1/32), got {eps}")));
    }
    let grid = sign_grid(&ci);
    check_pattern(&grid)?;
    if !positive(grid[0]) {
        return Ok(None);
    }
    if positive(ci(0.5 - eps)) {
        return Ok(Some(0.5));
    }
    let j = grid.iter().position(|&v| !positive(v)).ok_or_else(|| {
        Error::consistency(format!("CI positive on the whole grid but not at 1/2 - eps; grid: {grid:?}"))
    })?;
    let (mut lo, mut hi) = ((j - 1) as f64 / 32.0, j as f64 / 32.0);
    while hi - lo > eps {
        let mid = 0.5 * (lo + hi);
        if positive(ci(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let below = ci((t - 2.0 * eps).max(0.0));
    let above = ci((t + 2.0 * eps).min(0.5));
    if !(positive(below) && !positive(above)) {
        return Err(Error::consistency(format!(
            "threshold {t} fails verification: CI(t-2eps) = {below:e}, CI(t+2eps) = {above:e}"
        )));
    }
    Ok(Some(t))
}

/// Threshold of a code along `d`.
pub fn threshold(spectrum: &CISpectrum, d: &RayDirection, eps: f64) -> Result<Option<f64>> {
    let plan = spectrum.plan();
    threshold_of(|x| plan.ci(&ray_at(d, x).expect("x stays in [0, 1/2]")), eps)
}

/// [`threshold`] with the default tolerance `2^-20`.
pub fn threshold_default(spectrum: &CISpectrum, d: &RayDirection) -> Result<Option<f64>> {
    threshold(spectrum, d, DEFAULT_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{binary_entropy, single_letter_threshold};
    use crate::graphs::{repetition_graph, CodeGraph};
    use crate::symci::symmetric_lambda;

    fn edge() -> CISpectrum {
        symmetric_lambda(&CodeGraph::from_edges(2, 1, &[(0, 1)]).unwrap()).unwrap()
    }

    #[test]
    fn dephasing_edge_reaches_half() {
        let d = RayDirection::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(threshold_default(&edge(), &d).unwrap(), Some(0.5));
    }

    #[test]
    fn edge_matches_hashing_root() {
        let d = RayDirection::depolarizing();
        let t = threshold_default(&edge(), &d).unwrap().unwrap();
        assert!((t - single_letter_threshold(&d)).abs() <= DEFAULT_EPS);
    }

    #[test]
    fn second_sign_change_is_rejected() {
        let err = threshold_of(|x| (20.0 * x).cos(), DEFAULT_EPS).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert_eq!(threshold_of(|x| -0.1 - x, DEFAULT_EPS).unwrap(), None);
        assert_eq!(threshold_of(|x| x - 0.1, DEFAULT_EPS).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn bisection_on_a_known_curve() {
        let f = |x: f64| 1.0 - binary_entropy(x) - x * 3f64.log2();
        let t = threshold_of(f, DEFAULT_EPS).unwrap().unwrap();
        assert!(f(t - 2.0 * DEFAULT_EPS) > 0.0 && f(t + 2.0 * DEFAULT_EPS) < 0.0);
    }

    #[test]
    fn vanishing_tail_counts_as_zero() {
        // Positive all the way to 1/2, but below the tolerance near the end.
        let t = threshold_of(|x| (1.0 - 2.0 * x).powi(40), DEFAULT_EPS).unwrap().unwrap();
        assert!(t < 0.5 && (1.0 - 2.0 * t).powi(40) <= 1e-11);
    }

    #[test]
    fn repetition_grid_has_one_change() {
        let s = symmetric_lambda(&repetition_graph(3).unwrap()).unwrap();
        let d = RayDirection::new(0.5, 0.2, 0.3).unwrap();
        let grid = sign_grid(|x| s.plan().ci(&ray_at(&d, x).unwrap()));
        assert_eq!(sign_changes(&grid), 1);
    }
}
