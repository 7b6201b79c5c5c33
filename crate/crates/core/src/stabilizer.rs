//! Binary symplectic stabilizer generators and conversion to graph states.

use crate::error::{Error, Result, StabilizerError};
use crate::graphs::low_mask;

/// Generator rows in binary symplectic form; qubit `j` is bit `j` of the
/// X-part and of the Z-part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

/// Local operations applied by [`to_graph_state`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOps {
    /// `qubit_order[new] = old`: the column relabeling of the canonical form.
    pub qubit_order: Vec<usize>,
    /// Qubits (new labels) that received a Hadamard.
    pub hadamard: Vec<usize>,
    /// Qubits (new labels) that received a phase gate.
    pub phase: Vec<usize>,
}

/// Output of [`to_graph_state`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStateForm {
    /// Adjacency in the relabeled qubit order.
    pub adjacency: Vec<u64>,
    pub ops: LocalOps,
}

impl GraphStateForm {
    /// Adjacency expressed in the input's original qubit labels.
    pub fn adjacency_original_order(&self) -> Vec<u64> {
        let order = &self.ops.qubit_order;
        let n = order.len();
        let mut out = vec![0u64; n];
        for a in 0..n {
            for b in 0..n {
                if self.adjacency[a] >> b & 1 == 1 {
                    out[order[a]] |= 1 << order[b];
                }
            }
        }
        out
    }
}

fn symplectic(xa: u64, za: u64, xb: u64, zb: u64) -> u32 {
    ((xa & zb).count_ones() + (za & xb).count_ones()) & 1
}

/// Rank over GF(2) of `(x | z)` rows.
fn rank(x: &[u64], z: &[u64]) -> usize {
    let mut rows: Vec<u128> = x
        .iter()
        .zip(z)
        .map(|(&a, &b)| u128::from(a) | u128::from(b) << 64)
        .collect();
    let mut r = 0;
    for bit in 0..128 {
        let Some(p) = (r..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i] >> bit & 1 == 1 {
                rows[i] ^= rows[r];
            }
        }
        r += 1;
    }
    r
}

impl GeneratorMatrix {
    /// Validated construction from X- and Z-part masks.
    pub fn new(n: usize, x: Vec<u64>, z: Vec<u64>) -> Result<Self> {
        if n > 64 {
            return Err(StabilizerError::TooLarge(n).into());
        }
        if x.is_empty() {
            return Err(StabilizerError::Empty.into());
        }
        if x.len() != z.len() {
            return Err(Error::Width { expected: x.len(), got: z.len() });
        }
        let mask = low_mask(n);
        if x.iter().chain(&z).any(|r| r & !mask != 0) {
            return Err(Error::domain("generator row wider than n"));
        }
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                if symplectic(x[i], z[i], x[j], z[j]) == 1 {
                    return Err(StabilizerError::Anticommuting(i, j).into());
                }
            }
        }
        for i in 0..x.len() {
            if rank(&x[..=i], &z[..=i]) != i + 1 {
                return Err(StabilizerError::Dependent(i).into());
            }
        }
        Ok(Self { n, x, z })
    }

    /// Graph-state generators `(I_n | Γ)`.
    pub fn from_graph(adj: &[u64]) -> Result<Self> {
        let n = adj.len();
        Self::new(n, (0..n).map(|i| 1u64 << i).collect(), adj.to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.x.len()
    }

    pub fn x_part(&self) -> &[u64] {
        &self.x
    }

    pub fn z_part(&self) -> &[u64] {
        &self.z
    }

    /// True when both matrices generate the same group (same GF(2) row span).
    pub fn same_span(&self, other: &GeneratorMatrix) -> bool {
        if self.n != other.n {
            return false;
        }
        let r = rank(&self.x, &self.z);
        let ro = rank(&other.x, &other.z);
        let mut x = self.x.clone();
        let mut z = self.z.clone();
        x.extend_from_slice(&other.x);
        z.extend_from_slice(&other.z);
        r == ro && rank(&x, &z) == r
    }

    /// Applies the recorded local operations to this matrix.
    pub fn conjugate(&self, ops: &LocalOps) -> GeneratorMatrix {
        let permute = |v: u64| {
            let mut out = 0u64;
            for (new, &old) in ops.qubit_order.iter().enumerate() {
                out |= (v >> old & 1) << new;
            }
            out
        };
        let mut x: Vec<u64> = self.x.iter().map(|&v| permute(v)).collect();
        let mut z: Vec<u64> = self.z.iter().map(|&v| permute(v)).collect();
        for (xr, zr) in x.iter_mut().zip(z.iter_mut()) {
            for &q in &ops.hadamard {
                let (xb, zb) = (*xr >> q & 1, *zr >> q & 1);
                *xr = (*xr & !(1 << q)) | zb << q;
                *zr = (*zr & !(1 << q)) | xb << q;
            }
            for &q in &ops.phase {
                *zr ^= *xr & (1 << q);
            }
        }
        GeneratorMatrix { n: self.n, x, z }
    }
}

/// Parses Pauli strings. Blank lines and `#` comments are skipped; a leading
/// sign is ignored.
pub fn parse_stabilizers<S: AsRef<str>>(lines: &[S]) -> Result<GeneratorMatrix> {
    let mut x = Vec::new();
    let mut z = Vec::new();
    let mut width = None;
    for line in lines {
        let line = line.as_ref();
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let body = body.strip_prefix(['+', '-']).unwrap_or(body).trim_start();
        let row = x.len();
        let len = body.chars().count();
        let expected = *width.get_or_insert(len);
        if len != expected {
            return Err(StabilizerError::Ragged { row, len, expected }.into());
        }
        if len > 64 {
            return Err(StabilizerError::TooLarge(len).into());
        }
        let (mut xr, mut zr) = (0u64, 0u64);
        for (j, ch) in body.chars().enumerate() {
            let (a, b) = match ch {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                _ => return Err(StabilizerError::IllegalChar { row, ch }.into()),
            };
            xr |= a << j;
            zr |= b << j;
        }
        x.push(xr);
        z.push(zr);
    }
    let n = width.ok_or(StabilizerError::Empty)?;
    GeneratorMatrix::new(n, x, z)
}

/// Brings a full-rank generator matrix into the block form
/// `[I_k A | B 0; 0 0 | A^T I_{n-k}]` with synchronized column swaps.
/// Returns the matrix, `k`, and `qubit_order[new] = old`.
pub fn canonical_form(m: &GeneratorMatrix) -> Result<(GeneratorMatrix, usize, Vec<usize>)> {
    let n = m.n;
    if m.rows() != n {
        return Err(StabilizerError::RankDeficient { rows: m.rows(), n }.into());
    }
    let mut x = m.x.clone();
    let mut z = m.z.clone();

    // Reduced row echelon form of the X block.
    let mut pivots = Vec::new();
    for col in 0..n {
        let r = pivots.len();
        let Some(p) = (r..n).find(|&i| x[i] >> col & 1 == 1) else {
            continue;
        };
        x.swap(r, p);
        z.swap(r, p);
        for i in 0..n {
            if i != r && x[i] >> col & 1 == 1 {
                x[i] ^= x[r];
                z[i] ^= z[r];
            }
        }
        pivots.push(col);
    }
    let k = pivots.len();

    // Pivot columns first, remaining columns after, both in ascending order.
    let mut order = pivots.clone();
    order.extend((0..n).filter(|c| !pivots.contains(c)));
    let permute = |v: u64| {
        let mut out = 0u64;
        for (new, &old) in order.iter().enumerate() {
            out |= (v >> old & 1) << new;
        }
        out
    };
    for i in 0..n {
        x[i] = permute(x[i]);
        z[i] = permute(z[i]);
    }

    // Lower rows have zero X part; reduce their Z part on columns k..n.
    for col in k..n {
        let Some(p) = (col..n).find(|&i| z[i] >> col & 1 == 1) else {
            return Err(Error::consistency(
                "stabilizer canonical form: Z block of lower rows is singular",
            ));
        };
        x.swap(col, p);
        z.swap(col, p);
        for i in 0..n {
            if i != col && z[i] >> col & 1 == 1 {
                x[i] ^= x[col];
                z[i] ^= z[col];
            }
        }
    }
    let out = GeneratorMatrix { n, x, z };
    Ok((out, k, order))
}

/// Converts a stabilizer state into a local-Clifford-equivalent graph state.
pub fn to_graph_state(m: &GeneratorMatrix) -> Result<GraphStateForm> {
    let (c, k, order) = canonical_form(m)?;
    let n = c.n;
    let hadamard: Vec<usize> = (k..n).collect();
    let mut x = c.x;
    let mut z = c.z;
    for i in 0..n {
        for &q in &hadamard {
            let (xb, zb) = (x[i] >> q & 1, z[i] >> q & 1);
            x[i] = (x[i] & !(1 << q)) | zb << q;
            z[i] = (z[i] & !(1 << q)) | xb << q;
        }
    }
    let mut phase = Vec::new();
    for j in 0..n {
        if z[j] >> j & 1 == 1 {
            phase.push(j);
        }
    }
    for i in 0..n {
        for &q in &phase {
            z[i] ^= x[i] & (1 << q);
        }
    }
    for i in 0..n {
        if x[i] != 1 << i {
            return Err(Error::consistency("graph-state conversion: X block is not the identity"));
        }
        for j in 0..n {
            if (z[i] >> j & 1) != (z[j] >> i & 1) {
                return Err(Error::consistency("graph-state conversion: Z block is not symmetric"));
            }
        }
    }
    Ok(GraphStateForm { adjacency: z, ops: LocalOps { qubit_order: order, hadamard, phase } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let m = parse_stabilizers(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]).unwrap();
        assert_eq!(m.x_part()[0], 0b01001);
        assert_eq!(m.z_part()[0], 0b00110);
        assert!(parse_stabilizers(&["XX", "ZZ"]).is_ok());
        assert_eq!(
            parse_stabilizers(&["XI", "ZI"]).unwrap_err().to_string(),
            StabilizerError::Anticommuting(0, 1).to_string()
        );
        assert!(matches!(
            parse_stabilizers(&["XX", "Z"]),
            Err(Error::Stabilizer(StabilizerError::Ragged { row: 1, .. }))
        ));
        assert!(matches!(
            parse_stabilizers(&["XQ"]),
            Err(Error::Stabilizer(StabilizerError::IllegalChar { ch: 'Q', .. }))
        ));
        assert!(matches!(
            parse_stabilizers(&["XX", "XX"]),
            Err(Error::Stabilizer(StabilizerError::Dependent(1)))
        ));
        let signed = parse_stabilizers(&["# bell pair", "+XX", "-ZZ  # comment", ""]).unwrap();
        assert_eq!(signed, parse_stabilizers(&["XX", "ZZ"]).unwrap());
    }

    #[test]
    fn bell_pair_canonical_form() {
        let m = parse_stabilizers(&["XX", "ZZ"]).unwrap();
        let (c, k, order) = canonical_form(&m).unwrap();
        assert_eq!(k, 1);
        assert_eq!(order, vec![0, 1]);
        assert_eq!(c.x_part(), &[0b11, 0b00]);
        assert_eq!(c.z_part(), &[0b00, 0b11]);
        let g = to_graph_state(&m).unwrap();
        assert_eq!(g.adjacency, vec![0b10, 0b01]);
    }

    #[test]
    fn graph_state_is_fixpoint() {
        let adj = vec![0b0110, 0b1001, 0b1001, 0b0110];
        let m = GeneratorMatrix::from_graph(&adj).unwrap();
        let (c, k, order) = canonical_form(&m).unwrap();
        assert_eq!(k, 4);
        assert_eq!(order, vec![0, 1, 2, 3]);
        assert_eq!(c, m);
        let g = to_graph_state(&m).unwrap();
        assert_eq!(g.adjacency, adj);
        assert!(g.ops.hadamard.is_empty() && g.ops.phase.is_empty());
    }

    #[test]
    fn row_permutation_invariance() {
        let rows = ["XXXX", "ZZII", "IZZI", "IIZZ"];
        let a = parse_stabilizers(&rows).unwrap();
        let b = parse_stabilizers(&[rows[2], rows[0], rows[3], rows[1]]).unwrap();
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn rank_deficient() {
        let m = parse_stabilizers(&["XX"]).unwrap();
        assert!(matches!(
            canonical_form(&m),
            Err(Error::Stabilizer(StabilizerError::RankDeficient { rows: 1, n: 2 }))
        ));
    }
}
