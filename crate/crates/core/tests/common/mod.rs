//! Test-only oracles that share no code path with the structured solver:
//! dense diagonalization of `H` and an explicit register-circuit simulation
//! of phase estimation.

#![allow(dead_code)]

use std::f64::consts::PI;

use gengrover::numerics::{hermitian_eig, ComplexMatrix};
use gengrover::{Complex64, SearchInstance, StateVector};

/// Sorted eigenvalues of the dense `D×D` Hamiltonian.
pub fn dense_spectrum(inst: &SearchInstance) -> Vec<f64> {
    hermitian_eig(&inst.hamiltonian()).unwrap().eigenvalues
}

/// `e^{-iHτ}` from the dense eigendecomposition.
pub fn dense_propagator(inst: &SearchInstance, tau: f64) -> ComplexMatrix {
    let eig = hermitian_eig(&inst.hamiltonian()).unwrap();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &e) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -e * tau);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    scaled * v.adjoint()
}

/// Register ⊗ system amplitudes, index `reg * dim + x`.
pub struct Circuit {
    pub qubits: u32,
    pub dim: usize,
    pub amps: Vec<Complex64>,
}

impl Circuit {
    pub fn new(qubits: u32, input: &[Complex64]) -> Self {
        let dim = input.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim << qubits];
        amps[..dim].copy_from_slice(input);
        Self { qubits, dim, amps }
    }

    fn registers(&self) -> usize {
        1 << self.qubits
    }

    /// Hadamard on register qubit `q` (bit `q` of the register index).
    pub fn h(&mut self, q: u32) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bit = 1usize << q;
        for reg in (0..self.registers()).filter(|r| r & bit == 0) {
            for x in 0..self.dim {
                let i0 = reg * self.dim + x;
                let i1 = (reg | bit) * self.dim + x;
                let (a, b) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = (a + b) * s;
                self.amps[i1] = (a - b) * s;
            }
        }
    }

    /// Phase `e^{iθ}` on register states where qubits `a` and `b` are both 1.
    pub fn cphase(&mut self, a: u32, b: u32, theta: f64) {
        let mask = (1usize << a) | (1usize << b);
        let ph = Complex64::from_polar(1.0, theta);
        for reg in (0..self.registers()).filter(|r| r & mask == mask) {
            for x in 0..self.dim {
                self.amps[reg * self.dim + x] *= ph;
            }
        }
    }

    pub fn swap(&mut self, a: u32, b: u32) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for reg in 0..self.registers() {
            if reg & ba != 0 && reg & bb == 0 {
                let other = (reg & !ba) | bb;
                for x in 0..self.dim {
                    self.amps.swap(reg * self.dim + x, other * self.dim + x);
                }
            }
        }
    }

    /// System unitary on the register branches where qubit `q` is 1.
    pub fn controlled(&mut self, q: u32, u: &ComplexMatrix) {
        let bit = 1usize << q;
        for reg in (0..self.registers()).filter(|r| r & bit != 0) {
            let slice = &mut self.amps[reg * self.dim..(reg + 1) * self.dim];
            let v = nalgebra::DVector::from_column_slice(slice);
            let w = u * v;
            slice.copy_from_slice(w.as_slice());
        }
    }

    /// Textbook QFT gate sequence run backwards with conjugated phases.
    /// Qubit `n-1` is the most significant bit.
    pub fn inverse_qft(&mut self) {
        let n = self.qubits;
        for i in 0..n / 2 {
            self.swap(i, n - 1 - i);
        }
        // forward: for target t from MSB down: H(t), then CR_k from lower qubits
        for t in 0..n {
            for c in (0..t).rev() {
                let k = t - c + 1;
                self.cphase(t, c, -2.0 * PI / (1u64 << k) as f64);
            }
            self.h(t);
        }
    }

    pub fn forward_qft(&mut self) {
        let n = self.qubits;
        for t in (0..n).rev() {
            self.h(t);
            for c in 0..t {
                let k = t - c + 1;
                self.cphase(t, c, 2.0 * PI / (1u64 << k) as f64);
            }
        }
        for i in 0..n / 2 {
            self.swap(i, n - 1 - i);
        }
    }

    pub fn register_probabilities(&self) -> Vec<f64> {
        (0..self.registers())
            .map(|reg| {
                self.amps[reg * self.dim..(reg + 1) * self.dim]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// Normalized system state conditioned on register outcome `m`.
    pub fn conditional_state(&self, m: usize) -> Vec<Complex64> {
        let slice = &self.amps[m * self.dim..(m + 1) * self.dim];
        let norm: f64 = slice.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        slice.iter().map(|z| z / norm).collect()
    }
}

/// Full phase-estimation circuit: Hadamards, controlled `U^{2^k}`, inverse QFT.
pub fn explicit_qpe(inst: &SearchInstance, input: &StateVector, r: u32, tau: f64) -> Circuit {
    let mut circuit = Circuit::new(r, input.amplitudes());
    for q in 0..r {
        circuit.h(q);
    }
    let mut u = dense_propagator(inst, tau);
    for q in 0..r {
        circuit.controlled(q, &u);
        u = &u * &u;
    }
    circuit.inverse_qft();
    circuit
}

/// Deterministic pseudo-random unit vector for test inputs.
pub fn test_state(dim: usize, salt: u64) -> StateVector {
    let amps = (0..dim)
        .map(|x| {
            let a = ((x as f64 + 1.3) * (salt as f64 + 0.7) * 12.9898).sin() * 43758.5453;
            let b = ((x as f64 + 2.1) * (salt as f64 + 1.9) * 78.233).sin() * 12345.678;
            Complex64::new(a.fract(), b.fract())
        })
        .collect();
    StateVector::normalized(amps).unwrap()
}
