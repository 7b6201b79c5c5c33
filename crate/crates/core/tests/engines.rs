mod common;

use gsci::directci::{dense_oracle_ci, direct_ci, direct_spectrum};
use gsci::graphs::{cat_graph, local_complement, repetition_graph, tree_graph, CodeGraph};
use gsci::symci::{evaluate_ci, spectrum_from_json, spectrum_to_json, symmetric_lambda, CISpectrum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_point;

/// Orbit-expanded σ_RB eigenvalues of a spectrum, sorted.
fn expanded(s: &CISpectrum, p: &gsci::channels::PauliParams) -> Vec<f64> {
    let (rb, _) = s.plan().eigenvalues(p);
    let mut out = Vec::new();
    for (v, m) in rb {
        out.extend(std::iter::repeat(v).take(m as usize));
    }
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn eigenvalue_multisets_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let graphs = [
        repetition_graph(3).unwrap(),
        CodeGraph::from_edges(5, 3, &[(0, 1), (1, 2), (2, 3), (0, 4)]).unwrap(),
        CodeGraph::from_edges(5, 4, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 4)]).unwrap(),
    ];
    for g in &graphs {
        let s = symmetric_lambda(g).unwrap();
        for _ in 0..5 {
            let p = random_point(&mut rng);
            let mut direct: Vec<f64> = direct_spectrum(g, &p).unwrap().lambda.into_iter().filter(|&v| v > 0.0).collect();
            direct.sort_by(f64::total_cmp);
            let sym: Vec<f64> = expanded(&s, &p).into_iter().filter(|&v| v > 0.0).collect();
            assert_eq!(direct.len(), sym.len(), "{g:?}");
            for (a, b) in direct.iter().zip(&sym) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn larger_codes_agree_across_engines() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let graphs = [
        cat_graph(2, 3).unwrap(),
        tree_graph(&[2, 1]).unwrap(),
        local_complement(&repetition_graph(4).unwrap(), 1).unwrap(),
    ];
    for g in &graphs {
        let s = symmetric_lambda(g).unwrap();
        for _ in 0..5 {
            let p = random_point(&mut rng);
            let a = dense_oracle_ci(g, &p).unwrap();
            let b = direct_ci(g, &p).unwrap();
            let c = evaluate_ci(&s, &p);
            assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10, "{g:?}: {a} {b} {c}");
        }
    }
}

#[test]
fn cached_spectrum_round_trips() {
    let s = symmetric_lambda(&cat_graph(3, 3).unwrap()).unwrap();
    let text = spectrum_to_json(&s);
    let back = spectrum_from_json(&text).unwrap();
    assert_eq!(back, s);
    assert_eq!(spectrum_to_json(&back), text);
}
