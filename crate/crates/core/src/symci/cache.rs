//! JSON cache for spectra.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CISpectrum, Monomial, SparsePoly, SpectrumTerm};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct TermFile {
    key: String,
    m: String,
    poly: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumFile {
    k_sys: usize,
    k_env: usize,
    rb: Vec<TermFile>,
    b: Vec<TermFile>,
}

fn term_to_file(t: &SpectrumTerm) -> TermFile {
    TermFile {
        key: t.key.to_string(),
        m: t.multiplicity.to_string(),
        poly: t
            .poly
            .terms()
            .iter()
            .map(|(m, c)| (format!("{m:?}"), c.to_string()))
            .collect(),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::domain(format!("spectrum cache: bad {what} {s:?}")))
}

fn term_from_file(t: &TermFile, k_sys: usize) -> Result<SpectrumTerm> {
    let mut terms = Vec::with_capacity(t.poly.len());
    for (mono, coef) in &t.poly {
        let parts: Vec<&str> = mono.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::domain(format!("spectrum cache: bad monomial {mono:?}")));
        }
        let e: Vec<u8> = parts
            .iter()
            .map(|p| parse_num::<u8>(p, "exponent"))
            .collect::<Result<_>>()?;
        let m = Monomial::new(e[0], e[1], e[2]);
        if m.degree() > k_sys {
            return Err(Error::domain(format!("spectrum cache: degree of {mono:?} exceeds k_sys")));
        }
        let c: u128 = parse_num(coef, "coefficient")?;
        if c == 0 {
            return Err(Error::domain("spectrum cache: zero coefficient"));
        }
        terms.push((m, c));
    }
    Ok(SpectrumTerm {
        key: parse_num(&t.key, "orbit key")?,
        multiplicity: parse_num(&t.m, "multiplicity")?,
        poly: SparsePoly::from_terms(terms),
    })
}

pub fn spectrum_to_json(s: &CISpectrum) -> String {
    let file = SpectrumFile {
        k_sys: s.k_sys,
        k_env: s.k_env,
        rb: s.rb.iter().map(term_to_file).collect(),
        b: s.b.iter().map(term_to_file).collect(),
    };
    let mut out = serde_json::to_string(&file).expect("spectrum serialization");
    out.push('\n');
    out
}

pub fn spectrum_from_json(text: &str) -> Result<CISpectrum> {
    let file: SpectrumFile = serde_json::from_str(text)
        .map_err(|e| Error::domain(format!("spectrum cache: {e}")))?;
    let rb = file.rb.iter().map(|t| term_from_file(t, file.k_sys)).collect::<Result<_>>()?;
    let b = file.b.iter().map(|t| term_from_file(t, file.k_sys)).collect::<Result<_>>()?;
    Ok(CISpectrum::new(file.k_sys, file.k_env, rb, b))
}

pub fn save_spectrum(s: &CISpectrum, path: &Path) -> Result<()> {
    fs::write(path, spectrum_to_json(s)).map_err(|source| Error::Io { path: path.into(), source })
}

pub fn load_spectrum(path: &Path) -> Result<CISpectrum> {
    let text =
        fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    spectrum_from_json(&text)
}
