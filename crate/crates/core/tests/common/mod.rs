//! Reference computations that share no code path with the library kernels:
//! full density matrices, index-by-index partial traces, Kronecker-product
//! Hamiltonian diagonals and the general Hermitian eigensolver.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `|ψ⟩⟨ψ|` as a full matrix.
pub fn full_projector(amps: &[Complex64]) -> DMatrix<Complex64> {
    let d = amps.len();
    DMatrix::from_fn(d, d, |i, j| amps[i] * amps[j].conj())
}

fn bit(index: usize, q: usize, n: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

/// Partial trace by visiting every entry of the full matrix and keeping those
/// whose traced-out bits agree.
pub fn naive_partial_trace(
    rho: &DMatrix<Complex64>,
    keep: &[usize],
    n: usize,
) -> DMatrix<Complex64> {
    let dk = 1 << keep.len();
    let mut out = DMatrix::<Complex64>::zeros(dk, dk);
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    for i in 0..(1 << n) {
        for j in 0..(1 << n) {
            if traced.iter().any(|&q| bit(i, q, n) != bit(j, q, n)) {
                continue;
            }
            let ri = keep.iter().fold(0, |acc, &q| acc * 2 + bit(i, q, n));
            let rj = keep.iter().fold(0, |acc, &q| acc * 2 + bit(j, q, n));
            out[(ri, rj)] += rho[(i, j)];
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix through nalgebra's general solver.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// `½ Σ |λ_i(ρ − σ)|`.
pub fn naive_trace_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    0.5 * eigenvalues(&(a - b)).iter().map(|l| l.abs()).sum::<f64>()
}

pub fn kron_diag(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Diagonal of `½ σ_z ⊗ Σ_i g_i σ_z^(i)` assembled from Kronecker products of
/// single-qubit diagonals.
pub fn hamiltonian_diagonal(g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let sz = [1.0, -1.0];
    let id = [1.0, 1.0];
    let dim = 1 << (n + 1);
    let mut h = vec![0.0; dim];
    for (i, gi) in g.iter().enumerate() {
        let mut term = sz.to_vec();
        for k in 0..n {
            term = kron_diag(&term, if k == i { &sz } else { &id });
        }
        for (hk, tk) in h.iter_mut().zip(term) {
            *hk += 0.5 * gi * tk;
        }
    }
    h
}

pub fn evolve_oracle(g: &[f64], amps: &[Complex64], t: f64) -> Vec<Complex64> {
    hamiltonian_diagonal(g)
        .iter()
        .zip(amps)
        .map(|(e, a)| a * Complex64::from_polar(1.0, -e * t))
        .collect()
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// `⟨E₋(t)|E₊(t)⟩` read off the evolved statevector of `|+x⟩ ⊗ |E₀⟩`.
pub fn branch_overlap_oracle(g: &[f64], env: &[Complex64], t: f64) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = kron_vec(&[c(s, 0.0), c(s, 0.0)], env);
    let evolved = evolve_oracle(g, &psi, t);
    let (up, down) = evolved.split_at(evolved.len() / 2);
    // each branch carries amplitude 1/√2
    2.0 * down
        .iter()
        .zip(up)
        .map(|(d, u)| d.conj() * u)
        .sum::<Complex64>()
}

/// Mean of `D` for a Haar state on a qubit times a `d_rest`-dimensional
/// complement, from the induced density of the Bloch radius,
/// `p(r) ∝ r² (1 − r²)^(d_rest − 2)`, integrated with Simpson's rule.
pub fn haar_qubit_mean_distance(d_rest: usize) -> f64 {
    let steps = 20_000;
    let h = 1.0 / steps as f64;
    let weight = |r: f64| r * r * (1.0 - r * r).powi(d_rest as i32 - 2);
    let simpson = |f: &dyn Fn(f64) -> f64| {
        (0..=steps)
            .map(|k| {
                let w = if k == 0 || k == steps {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * f(k as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0
    };
    simpson(&|r| 0.5 * r * weight(r)) / simpson(&weight)
}

/// Page's mean entanglement entropy, in bits, of an `m`-dimensional subsystem of
/// a Haar state on `m·n` dimensions (`m ≤ n`).
pub fn page_entropy_bits(m: usize, n: usize) -> f64 {
    let harmonic: f64 = ((n + 1)..=(m * n)).map(|k| 1.0 / k as f64).sum();
    (harmonic - (m as f64 - 1.0) / (2.0 * n as f64)) / std::f64::consts::LN_2
}
