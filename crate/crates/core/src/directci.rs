//! Reference engines: the unsymmetrized λ/μ computation over every Pauli
//! error pattern, and a dense density-matrix simulation for tiny graphs.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::channels::{entropy_term, KahanSum, PauliParams};
use crate::error::{Error, Result};
use crate::graphs::{decimal_to_binary, CodeGraph};

pub use crate::graphs::binary_to_decimal;

pub const DIRECT_MAX_VERTICES: usize = 26;
pub const DENSE_MAX_VERTICES: usize = 10;

/// One column of the error-pattern table: `(U1, U2, U3)` as vertex masks.
pub type UTriple = (u64, u64, u64);

/// Odometer over all disjoint triples of subsets of `0..k`; vertex 0 is
/// the fastest-running digit.
#[derive(Debug, Clone)]
pub struct UTriples {
    k: usize,
    digits: Vec<u8>,
    done: bool,
}

impl Iterator for UTriples {
    type Item = UTriple;

    fn next(&mut self) -> Option<UTriple> {
        if self.done {
            return None;
        }
        let mut t = (0u64, 0u64, 0u64);
        for (j, &d) in self.digits.iter().enumerate() {
            match d {
                1 => t.0 |= 1 << j,
                2 => t.1 |= 1 << j,
                3 => t.2 |= 1 << j,
                _ => {}
            }
        }
        self.done = true;
        for d in self.digits.iter_mut() {
            if *d < 3 {
                *d += 1;
                self.done = false;
                break;
            }
            *d = 0;
        }
        Some(t)
    }
}

/// All `4^k` triples. `r` environment rows are carried as zeros in each
/// column and do not change the masks.
pub fn get_u_subsets(k: usize, r: usize) -> Result<UTriples> {
    if k + r > 64 {
        return Err(Error::Width { expected: 64, got: k + r });
    }
    Ok(UTriples { k, digits: vec![0; k], done: false })
}

impl UTriples {
    pub fn width(&self) -> usize {
        self.k
    }
}

/// All `2^k` indicator vectors, in integer order.
pub fn subsets(k: usize) -> Vec<Vec<u8>> {
    (0..1u64 << k).map(|v| decimal_to_binary(v, k)).collect()
}

/// `out[a] = v[a ⊕ delta]`.
pub fn perm_vector(v: &[f64], delta: u64) -> Result<Vec<f64>> {
    if !v.len().is_power_of_two() || delta as usize >= v.len() {
        return Err(Error::Width { expected: v.len(), got: delta as usize + 1 });
    }
    Ok((0..v.len()).map(|a| v[a ^ delta as usize]).collect())
}

/// Unsymmetrized spectra of `σ_RB` (`lambda`), `σ_B` (`lambda_a`) and the
/// intermediate `μ`.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    pub lambda: Vec<f64>,
    pub lambda_a: Vec<f64>,
    pub mu: Vec<f64>,
}

fn accumulate(g: &CodeGraph, pows: &[Vec<f64>; 4], prefix: usize, low: usize) -> (Vec<f64>, Vec<f64>) {
    let k = g.k_sys();
    let mut lambda = vec![0.0; 1 << g.n()];
    let mut mu = vec![0.0; 1 << k];
    let contrib = |j: usize, c: u8| -> u64 {
        let x = g.neighbors(j);
        match c {
            1 => x,
            2 => x ^ 1 << j,
            3 => 1 << j,
            _ => 0,
        }
    };
    // Fixed high digits.
    let mut u_hi = 0u64;
    let mut e_hi = [0usize; 4];
    for j in low..k {
        let c = (prefix >> (2 * (j - low)) & 3) as u8;
        u_hi ^= contrib(j, c);
        e_hi[c as usize] += 1;
    }
    let sys = g.system_mask();
    for (u1, u2, u3) in get_u_subsets(low, 0).expect("width checked") {
        let d = u1 | u2;
        let u = u_hi ^ g.apply(d) ^ u2 ^ u3;
        let e1 = e_hi[1] + u1.count_ones() as usize;
        let e2 = e_hi[2] + u2.count_ones() as usize;
        let e3 = e_hi[3] + u3.count_ones() as usize;
        let w = pows[0][k - e1 - e2 - e3] * pows[1][e1] * pows[2][e2] * pows[3][e3];
        lambda[u as usize] += w;
        mu[(u & sys) as usize] += w;
    }
    (lambda, mu)
}

/// λ, μ and σ_B for `g` at `p`.
pub fn direct_spectrum(g: &CodeGraph, p: &PauliParams) -> Result<DenseSpectrum> {
    let (k, n) = (g.k_sys(), g.n());
    if n > DIRECT_MAX_VERTICES {
        return Err(Error::resource(format!(
            "direct engine holds 2^{n} eigenvalues; limit is {DIRECT_MAX_VERTICES} vertices"
        )));
    }
    let probs = p.probs();
    let pows: [Vec<f64>; 4] = std::array::from_fn(|i| {
        (0..=k).scan(1.0, |acc, _| {
            let v = *acc;
            *acc *= probs[i];
            Some(v)
        }).collect()
    });
    // Split on the top digits when private accumulators stay small.
    let threads = rayon::current_num_threads();
    let hi = if threads > 1 && n <= 20 { k.min(3) } else { 0 };
    let low = k - hi;
    let (lambda, mu) = (0..1usize << (2 * hi))
        .into_par_iter()
        .map(|prefix| accumulate(g, &pows, prefix, low))
        .reduce_with(|mut a, b| {
            a.0.iter_mut().zip(&b.0).for_each(|(x, y)| *x += y);
            a.1.iter_mut().zip(&b.1).for_each(|(x, y)| *x += y);
            a
        })
        .expect("at least one chunk");

    let kr = g.k_env();
    let mut lambda_a = vec![0.0; 1 << k];
    for b in 0..1u64 << kr {
        let delta = g.gamma_ar_apply(b);
        for (a, v) in perm_vector(&mu, delta)?.into_iter().enumerate() {
            lambda_a[a] += v;
        }
    }
    let scale = 0.5f64.powi(kr as i32);
    lambda_a.iter_mut().for_each(|v| *v *= scale);
    Ok(DenseSpectrum { lambda, lambda_a, mu })
}

fn entropy(values: &[f64]) -> f64 {
    let mut h = KahanSum::new();
    for &v in values {
        h.add(entropy_term(v));
    }
    h.value()
}

/// Coherent information per system qubit from the unsymmetrized spectra.
pub fn direct_ci(g: &CodeGraph, p: &PauliParams) -> Result<f64> {
    let s = direct_spectrum(g, p)?;
    Ok((entropy(&s.lambda_a) - entropy(&s.lambda)) / g.k_sys() as f64)
}

/// Graph state amplitudes, `(−1)^{#edges inside x} / 2^{n/2}`.
fn graph_state(g: &CodeGraph) -> Vec<f64> {
    let n = g.n();
    let edges = g.edges();
    let norm = 0.5f64.powf(n as f64 / 2.0);
    (0..1u64 << n)
        .map(|x| {
            let parity = edges.iter().filter(|&&(a, b)| x >> a & x >> b & 1 == 1).count();
            if parity % 2 == 0 { norm } else { -norm }
        })
        .collect()
}

fn von_neumann(m: DMatrix<f64>) -> f64 {
    entropy(SymmetricEigen::new(m).eigenvalues.as_slice())
}

/// Coherent information from an explicit density matrix.
pub fn dense_oracle_ci(g: &CodeGraph, p: &PauliParams) -> Result<f64> {
    let (k, n) = (g.k_sys(), g.n());
    if n > DENSE_MAX_VERTICES {
        return Err(Error::resource(format!(
            "dense oracle limited to {DENSE_MAX_VERTICES} vertices, got {n}"
        )));
    }
    let dim = 1usize << n;
    let psi = graph_state(g);
    let mut rho = DMatrix::from_fn(dim, dim, |a, b| psi[a] * psi[b]);
    let [p0, p1, p2, p3] = p.probs();
    for j in 0..k {
        let m = 1usize << j;
        let sign = |a: usize| if a & m == 0 { 1.0 } else { -1.0 };
        rho = DMatrix::from_fn(dim, dim, |a, b| {
            let s = sign(a) * sign(b);
            let flip = rho[(a ^ m, b ^ m)];
            p0 * rho[(a, b)] + p1 * flip + p2 * s * flip + p3 * s * rho[(a, b)]
        });
    }
    // Partial trace over the environment (high bits).
    let ks = 1usize << k;
    let sigma_b = DMatrix::from_fn(ks, ks, |a, b| {
        (0..1usize << (n - k)).map(|r| rho[(a | r << k, b | r << k)]).sum()
    });
    Ok((von_neumann(sigma_b) - von_neumann(rho)) / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{hashing_ci, ray_at, RayDirection};
    use crate::graphs::repetition_graph;

    #[test]
    fn subroutines() {
        let cols: Vec<UTriple> = get_u_subsets(1, 0).unwrap().collect();
        assert_eq!(cols, vec![(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]);
        assert_eq!(get_u_subsets(3, 2).unwrap().count(), 64);
        assert_eq!(subsets(2), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        for v in 0..32 {
            assert_eq!(binary_to_decimal(&decimal_to_binary(v, 5)), v);
        }
        assert_eq!(perm_vector(&[1.0, 2.0, 3.0, 4.0], 1).unwrap(), vec![2.0, 1.0, 4.0, 3.0]);
        assert!(perm_vector(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn single_letter_engines() {
        let g = CodeGraph::from_edges(2, 1, &[(0, 1)]).unwrap();
        for p in [[0.7, 0.1, 0.1, 0.1], [0.91, 0.03, 0.02, 0.04], [0.5, 0.0, 0.0, 0.5]] {
            let p = PauliParams::from_array(p).unwrap();
            assert!((direct_ci(&g, &p).unwrap() - hashing_ci(&p)).abs() < 1e-12);
            assert!((dense_oracle_ci(&g, &p).unwrap() - hashing_ci(&p)).abs() < 1e-10);
        }
    }

    #[test]
    fn spectra_are_normalized() {
        let g = repetition_graph(3).unwrap();
        let p = PauliParams::new(0.7, 0.1, 0.15, 0.05).unwrap();
        let s = direct_spectrum(&g, &p).unwrap();
        for v in [&s.lambda, &s.lambda_a, &s.mu] {
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(v.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn path_dephasing_matches_dense() {
        let g = CodeGraph::from_edges(3, 2, &[(0, 1), (1, 2)]).unwrap();
        let p = PauliParams::new(0.8, 0.0, 0.0, 0.2).unwrap();
        let a = direct_ci(&g, &p).unwrap();
        let b = dense_oracle_ci(&g, &p).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn two_repetition_regression() {
        let g = repetition_graph(2).unwrap();
        let p = ray_at(&RayDirection::depolarizing(), 0.1).unwrap();
        let dense = dense_oracle_ci(&g, &p).unwrap();
        let direct = direct_ci(&g, &p).unwrap();
        assert!((dense - 0.195_648_071_464_106).abs() < 1e-12);
        assert!((direct - 0.195_648_071_464_106).abs() < 1e-12);
    }
}
