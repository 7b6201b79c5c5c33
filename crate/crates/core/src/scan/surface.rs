use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rayon::prelude::*;

use super::threshold;
use crate::channels::{single_letter_threshold, RayDirection};
use crate::error::{Error, Result};
use crate::symci::CISpectrum;

pub const SURFACE_HEADER: &str = "theta,phi,p1,p2,p3,x_code,x_single,delta";

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSample {
    pub theta: f64,
    pub phi: f64,
    pub direction: RayDirection,
    pub x_code: Option<f64>,
    pub x_single: f64,
    /// `x_code - x_single`; `None` together with `x_code`.
    pub delta: Option<f64>,
}

/// Direction of the spherical grid node `(theta, phi)`, snapped so that the
/// corners are exact axes.
pub fn surface_direction(theta: f64, phi: f64) -> Result<RayDirection> {
    let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    RayDirection::normalized([
        snap(theta.sin() * phi.cos()),
        snap(theta.sin() * phi.sin()),
        snap(theta.cos()),
    ])
}

/// Thresholds on the `R x R` grid over `theta, phi ∈ [0, π/2]`, both ends
/// included, in row-major `theta`-then-`phi` order.
pub fn surface(spectrum: &CISpectrum, resolution: usize, eps: f64) -> Result<Vec<ThresholdSample>> {
    if resolution < 2 {
        return Err(Error::domain(format!("surface resolution must be >= 2, got {resolution}")));
    }
    let step = FRAC_PI_2 / (resolution - 1) as f64;
    let angle = |i: usize| if i + 1 == resolution { FRAC_PI_2 } else { i as f64 * step };
    // Build the plan once before fanning out.
    spectrum.plan();
    (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let (theta, phi) = (angle(idx / resolution), angle(idx % resolution));
            let direction = surface_direction(theta, phi)?;
            let x_code = threshold(spectrum, &direction, eps)?;
            let x_single = single_letter_threshold(&direction);
            Ok(ThresholdSample {
                theta,
                phi,
                direction,
                x_code,
                x_single,
                delta: x_code.map(|x| x - x_single),
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

pub fn write_surface_csv<W: Write>(rows: &[ThresholdSample], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SURFACE_HEADER}")?;
    for r in rows {
        let [p1, p2, p3] = r.direction.components();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.theta,
            r.phi,
            p1,
            p2,
            p3,
            opt(r.x_code),
            r.x_single,
            opt(r.delta)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::DEFAULT_EPS;
    use crate::graphs::CodeGraph;
    use crate::symci::symmetric_lambda;

    #[test]
    fn corners() {
        let s = symmetric_lambda(&CodeGraph::from_edges(2, 1, &[(0, 1)]).unwrap()).unwrap();
        let rows = surface(&s, 2, DEFAULT_EPS).unwrap();
        let dirs: Vec<[f64; 3]> = rows.iter().map(|r| r.direction.components()).collect();
        assert_eq!(dirs, vec![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
    }

    #[test]
    fn edge_has_zero_delta() {
        let s = symmetric_lambda(&CodeGraph::from_edges(2, 1, &[(0, 1)]).unwrap()).unwrap();
        let rows = surface(&s, 5, DEFAULT_EPS).unwrap();
        assert_eq!(rows.len(), 25);
        for r in &rows {
            assert!(r.delta.unwrap().abs() <= DEFAULT_EPS, "{r:?}");
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_surface_csv(&rows, &mut a).unwrap();
        write_surface_csv(&surface(&s, 5, DEFAULT_EPS).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().starts_with(SURFACE_HEADER));
    }
}
