use std::io::Write;

use rayon::prelude::*;

use crate::channels::{hashing_ci, is_antidegradable, PauliParams};
use crate::error::{Error, Result};
use crate::symci::CISpectrum;

pub const RATES_HEADER: &str = "r,y,p1,p2,p3,best_code,diff";

/// One node of a rate plane. `best` is `(code index, CI - hashing)`; it is
/// absent outside the non-antidegradable region.
#[derive(Debug, Clone, PartialEq)]
pub struct RateNode {
    pub r: f64,
    pub y: f64,
    pub p: [f64; 3],
    pub best: Option<(usize, f64)>,
}

/// Best per-qubit CI over `spectra` minus the hashing bound on the plane
/// `p1 = f p3`, sampled at `(r/s, y, r f/s)` with `s = sqrt(1 + f^2)` and
/// `r, y` on `res` points each over `[0, 1/2]`.
pub fn rate_planes(spectra: &[CISpectrum], f: f64, res: usize) -> Result<Vec<RateNode>> {
    if spectra.is_empty() {
        return Err(Error::domain("rate planes need at least one code"));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::domain(format!("plane slope f must be positive, got {f}")));
    }
    if res < 2 {
        return Err(Error::domain(format!("rate grid needs >= 2 points per axis, got {res}")));
    }
    let s = (1.0 + f * f).sqrt();
    let h = 0.5 / (res - 1) as f64;
    spectra.iter().for_each(|c| {
        c.plan();
    });
    Ok((0..res * res)
        .into_par_iter()
        .map(|idx| {
            let (r, y) = ((idx / res) as f64 * h, (idx % res) as f64 * h);
            let p = [r / s, y, r * f / s];
            let p0 = 1.0 - p[0] - p[1] - p[2];
            let best = if p0 < 0.0 {
                None
            } else {
                PauliParams::new(p0, p[0], p[1], p[2])
                    .ok()
                    .filter(|q| !is_antidegradable(q))
                    .map(|q| {
                        let single = hashing_ci(&q);
                        spectra
                            .iter()
                            .enumerate()
                            .map(|(i, c)| (i, c.plan().ci(&q) - single))
                            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
                    })
            };
            RateNode { r, y, p, best }
        })
        .collect())
}

pub fn write_rates_csv<W: Write>(nodes: &[RateNode], names: &[String], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{RATES_HEADER}")?;
    for n in nodes {
        let (code, diff) = match n.best {
            Some((i, d)) => (names.get(i).cloned().unwrap_or_else(|| i.to_string()), d.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(out, "{},{},{},{},{},{},{}", n.r, n.y, n.p[0], n.p[1], n.p[2], code, diff)?;
    }
    Ok(())
}
