//! Dense density-matrix simulation used to validate the closed-form
//! purification step.
//!
//! Every state and gate involved (Bell states, CNOT, Hadamard, Pauli X/Z up
//! to a global phase on the matrices we conjugate by) is real, so the matrices
//! are stored as `f64`. Qubit 0 is the most significant bit of a basis index,
//! matching the ordering of a Kronecker product.

use crate::quantmath::{NoiseParams, WernerFidelity};

use super::CircuitOutcome;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    data: Vec<f64>,
}

impl DensityMatrix {
    /// `W |Φ+⟩⟨Φ+| + (1 - W) I/4` on two qubits.
    pub fn werner(f: WernerFidelity) -> Self {
        let w = f.w();
        let mut data = vec![0.0; 16];
        for i in 0..4 {
            data[i * 4 + i] = (1.0 - w) / 4.0;
        }
        // |Φ+⟩ = (|00⟩ + |11⟩)/√2 occupies indices 0 and 3
        for &i in &[0, 3] {
            for &j in &[0, 3] {
                data[i * 4 + j] += w / 2.0;
            }
        }
        DensityMatrix { qubits: 2, data }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1 << qubits;
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0 / dim as f64;
        }
        DensityMatrix { qubits, data }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim() + col]
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![0.0; dim * dim];
        for i in 0..da {
            for j in 0..da {
                let a = self.data[i * da + j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        data[(i * db + k) * dim + j * db + l] = a * other.data[k * db + l];
                    }
                }
            }
        }
        DensityMatrix {
            qubits: self.qubits + other.qubits,
            data,
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (self.bit(control), self.bit(target));
        let perm = |i: usize| if i & c != 0 { i ^ t } else { i };
        let dim = self.dim();
        let old = std::mem::take(&mut self.data);
        self.data = (0..dim * dim)
            .map(|idx| old[perm(idx / dim) * dim + perm(idx % dim)])
            .collect();
    }

    /// Conjugates by a real 2x2 matrix `u` on one qubit: `ρ -> U ρ Uᵀ`.
    pub fn apply_single(&mut self, qubit: usize, u: [[f64; 2]; 2]) {
        let b = self.bit(qubit);
        let dim = self.dim();
        let amp = |i: usize, j: usize| u[usize::from(i & b != 0)][usize::from(j & b != 0)];
        let mut left = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let i0 = i & !b;
                left[i * dim + j] =
                    amp(i, i0) * self.data[i0 * dim + j] + amp(i, i0 | b) * self.data[(i0 | b) * dim + j];
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let j0 = j & !b;
                self.data[i * dim + j] = left[i * dim + j0] * amp(j, j0) + left[i * dim + (j0 | b)] * amp(j, j0 | b);
            }
        }
    }

    /// `ρ -> s ρ + (1 - s) (I/2^k ⊗ Tr_q ρ)` over the listed qubits.
    pub fn depolarize(&mut self, qubits: &[usize], survival: f64) {
        if survival == 1.0 {
            return;
        }
        let mask: usize = qubits.iter().map(|&q| self.bit(q)).sum();
        let sub = 1usize << qubits.len();
        let dim = self.dim();
        // every assignment of the depolarized bits, as offsets inside `mask`
        let assignments: Vec<usize> = (0..dim).filter(|x| x & !mask == 0).collect();
        let mut mixed = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                if i & mask != j & mask {
                    continue;
                }
                let (ri, rj) = (i & !mask, j & !mask);
                let reduced: f64 = assignments.iter().map(|&x| self.data[(ri | x) * dim + (rj | x)]).sum();
                mixed[i * dim + j] = reduced / sub as f64;
            }
        }
        for (rho, mix) in self.data.iter_mut().zip(mixed) {
            *rho = survival * *rho + (1.0 - survival) * mix;
        }
    }

    /// Unnormalized post-measurement state for outcome `outcome` of qubit `qubit`.
    pub fn project(&self, qubit: usize, outcome: bool) -> DensityMatrix {
        let b = self.bit(qubit);
        let keep = |i: usize| (i & b != 0) == outcome;
        let dim = self.dim();
        let mut data = self.data.clone();
        for i in 0..dim {
            for j in 0..dim {
                if !(keep(i) && keep(j)) {
                    data[i * dim + j] = 0.0;
                }
            }
        }
        DensityMatrix {
            qubits: self.qubits,
            data,
        }
    }

    /// Traces out every qubit not listed in `keep` (which must be ascending).
    pub fn partial_trace(&self, keep: &[usize]) -> DensityMatrix {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        let dim = self.dim();
        let kept_dim = 1usize << keep.len();
        let traced: Vec<usize> = (0..self.qubits).filter(|q| !keep.contains(q)).collect();
        let embed = |sub_index: usize, qs: &[usize]| -> usize {
            qs.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if sub_index & (1 << (qs.len() - 1 - pos)) != 0 {
                    acc | self.bit(q)
                } else {
                    acc
                }
            })
        };
        let mut data = vec![0.0; kept_dim * kept_dim];
        for i in 0..kept_dim {
            for j in 0..kept_dim {
                let (ei, ej) = (embed(i, keep), embed(j, keep));
                data[i * kept_dim + j] = (0..1usize << traced.len())
                    .map(|x| {
                        let ex = embed(x, &traced);
                        self.data[(ei | ex) * dim + (ej | ex)]
                    })
                    .sum();
            }
        }
        DensityMatrix {
            qubits: keep.len(),
            data,
        }
    }

    pub fn scaled(mut self, factor: f64) -> DensityMatrix {
        self.data.iter_mut().for_each(|x| *x *= factor);
        self
    }

    pub fn add_assign(&mut self, other: &DensityMatrix) {
        assert_eq!(self.qubits, other.qubits);
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
    }

    /// `⟨Φ+|ρ|Φ+⟩ / Tr ρ` for a two-qubit state.
    pub fn bell_fidelity(&self) -> f64 {
        assert_eq!(self.qubits, 2);
        let overlap = (self.get(0, 0) + self.get(0, 3) + self.get(3, 0) + self.get(3, 3)) / 2.0;
        overlap / self.trace()
    }
}

/// Probability that two noisy measurement reports agree given whether the
/// true outcomes agree.
fn report_agreement(eta: f64, truly_agree: bool) -> f64 {
    if truly_agree {
        eta * eta + (1.0 - eta) * (1.0 - eta)
    } else {
        2.0 * eta * (1.0 - eta)
    }
}

/// One recurrence step simulated on the full four-qubit state.
///
/// Qubit layout is (A1, B1, A2, B2): pair 1 is kept, pair 2 is measured.
/// Each party's CNOT depolarizes its two qubits with survival `p2`; each of
/// the two Z measurements on pair 2 is flipped with probability `1 - eta`;
/// the step succeeds when the reported outcomes coincide.
pub fn oracle_simulate_step(f1: WernerFidelity, f2: WernerFidelity, noise: NoiseParams) -> CircuitOutcome {
    let mut rho = DensityMatrix::werner(f1).tensor(&DensityMatrix::werner(f2));
    rho.depolarize(&[0, 2], noise.p2());
    rho.depolarize(&[1, 3], noise.p2());
    rho.apply_cnot(0, 2);
    rho.apply_cnot(1, 3);

    let mut kept = DensityMatrix::maximally_mixed(2).scaled(0.0);
    for a in [false, true] {
        for b in [false, true] {
            let branch = rho.project(2, a).project(3, b);
            let weight = report_agreement(noise.eta(), a == b);
            kept.add_assign(&branch.partial_trace(&[0, 1]).scaled(weight));
        }
    }
    let p_succ = kept.trace();
    CircuitOutcome {
        // twirling preserves the Φ+ overlap, so the Werner form follows directly
        f_out: WernerFidelity::from_computed(kept.bell_fidelity()),
        p_succ,
    }
}
