use super::CISpectrum;
use crate::channels::{entropy_term, KahanSum, PauliParams};

#[derive(Debug, Clone)]
struct FlatSpectrum {
    /// Per term: start offset into `coef`/`exps`, and multiplicity.
    starts: Vec<u32>,
    mult: Vec<f64>,
    coef: Vec<f64>,
    exps: Vec<[u8; 4]>,
    scale: f64,
}

impl FlatSpectrum {
    fn new(terms: &[super::SpectrumTerm], k: usize, scale: f64) -> Self {
        let mut starts = Vec::with_capacity(terms.len() + 1);
        let mut mult = Vec::with_capacity(terms.len());
        let mut coef = Vec::new();
        let mut exps = Vec::new();
        for t in terms {
            starts.push(coef.len() as u32);
            mult.push(t.multiplicity as f64);
            for (m, c) in t.poly.terms() {
                let [e1, e2, e3] = m.exponents();
                let e0 = (k - m.degree()) as u8;
                coef.push(*c as f64);
                exps.push([e0, e1, e2, e3]);
            }
        }
        starts.push(coef.len() as u32);
        FlatSpectrum { starts, mult, coef, exps, scale }
    }

    /// Returns `(trace, entropy)`.
    fn entropy(&self, pows: &[Vec<f64>; 4]) -> (f64, f64) {
        let mut h = KahanSum::new();
        let mut tr = KahanSum::new();
        for t in 0..self.mult.len() {
            let (a, b) = (self.starts[t] as usize, self.starts[t + 1] as usize);
            let mut v = 0.0;
            for i in a..b {
                let [e0, e1, e2, e3] = self.exps[i];
                v += self.coef[i]
                    * pows[0][e0 as usize]
                    * pows[1][e1 as usize]
                    * pows[2][e2 as usize]
                    * pows[3][e3 as usize];
            }
            v *= self.scale;
            tr.add(self.mult[t] * v);
            h.add(self.mult[t] * entropy_term(v));
        }
        (tr.value(), h.value())
    }

    fn values(&self, pows: &[Vec<f64>; 4]) -> Vec<(f64, f64)> {
        (0..self.mult.len())
            .map(|t| {
                let (a, b) = (self.starts[t] as usize, self.starts[t + 1] as usize);
                let v: f64 = (a..b)
                    .map(|i| {
                        let [e0, e1, e2, e3] = self.exps[i];
                        self.coef[i]
                            * pows[0][e0 as usize]
                            * pows[1][e1 as usize]
                            * pows[2][e2 as usize]
                            * pows[3][e3 as usize]
                    })
                    .sum();
                (v * self.scale, self.mult[t])
            })
            .collect()
    }
}

/// Flattened floating-point form of a [`CISpectrum`].
#[derive(Debug, Clone)]
pub struct EvalPlan {
    k_sys: usize,
    rb: FlatSpectrum,
    b: FlatSpectrum,
}

impl EvalPlan {
    pub fn new(s: &CISpectrum) -> Self {
        let k = s.k_sys;
        EvalPlan {
            k_sys: k,
            rb: FlatSpectrum::new(&s.rb, k, 1.0),
            b: FlatSpectrum::new(&s.b, k, 0.5f64.powi(s.k_env as i32)),
        }
    }

    fn powers(&self, p: &PauliParams) -> [Vec<f64>; 4] {
        let probs = p.probs();
        std::array::from_fn(|i| {
            let mut v = Vec::with_capacity(self.k_sys + 1);
            let mut acc = 1.0;
            for _ in 0..=self.k_sys {
                v.push(acc);
                acc *= probs[i];
            }
            v
        })
    }

    /// `(trace σ_RB, H(σ_RB), trace σ_B, H(σ_B))`.
    pub fn parts(&self, p: &PauliParams) -> (f64, f64, f64, f64) {
        let pows = self.powers(p);
        let (t_rb, h_rb) = self.rb.entropy(&pows);
        let (t_b, h_b) = self.b.entropy(&pows);
        (t_rb, h_rb, t_b, h_b)
    }

    pub fn ci(&self, p: &PauliParams) -> f64 {
        let (_, h_rb, _, h_b) = self.parts(p);
        (h_b - h_rb) / self.k_sys as f64
    }

    /// Eigenvalues with multiplicities: `(rb, b)`, each a list of `(value, multiplicity)`.
    pub fn eigenvalues(&self, p: &PauliParams) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let pows = self.powers(p);
        (self.rb.values(&pows), self.b.values(&pows))
    }
}

/// Coherent information per system qubit, `(H(σ_B) - H(σ_RB)) / k_sys`.
pub fn evaluate_ci(s: &CISpectrum, p: &PauliParams) -> f64 {
    s.plan().ci(p)
}

/// Traces and entropies of both spectra.
pub fn evaluate_parts(s: &CISpectrum, p: &PauliParams) -> (f64, f64, f64, f64) {
    s.plan().parts(p)
}
