//! Coin blocks, the arc-reversal shift and the one-step walk operator `U = S·C`.
//!
//! The coin `C` is block diagonal with one `kᵢ × kᵢ` block per node acting on
//! the arcs leaving that node; the shift `S` sends every arc `i→j` to `j→i`.
//! [`WalkOperator`] keeps both in structured form so that a step costs
//! `O(Σ kᵢ²)`; [`WalkOperator::materialize_dense`] builds the full `D × D`
//! matrix for the eigensolver.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::WalkState;
use crate::graph::Graph;

/// Largest walk dimension materialized densely unless overridden.
pub const DEFAULT_DENSE_CAP: usize = 6000;

/// Tolerance used when asserting unitarity of coins and dense operators.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("coin dimension must be at least 1")]
    ZeroDimension,
    #[error("state has dimension {found}, operator expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dense materialization of dimension {dim} exceeds the cap of {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },
    #[error("cycle length must be at least 3, got {0}")]
    CycleTooShort(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoinKind {
    Fourier,
    Grover,
}

impl FromStr for CoinKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fourier" => Ok(Self::Fourier),
            "grover" => Ok(Self::Grover),
            other => Err(format!("unknown coin {other:?} (expected fourier or grover)")),
        }
    }
}

impl fmt::Display for CoinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fourier => "fourier",
            Self::Grover => "grover",
        })
    }
}

/// A small dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinBlock {
    dim: usize,
    entries: Vec<Complex64>,
}

impl CoinBlock {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks_exact(self.dim)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `max |(B†B − I)ₐᵦ|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let k = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..k {
            for b in 0..k {
                let dot: Complex64 = (0..k).map(|r| self.get(r, a).conj() * self.get(r, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

/// Discrete Fourier matrix `exp(2πi·a·b/k)/√k` (phase parameter fixed at 2π).
pub fn fourier_coin(k: usize) -> Result<CoinBlock, OperatorError> {
    if k == 0 {
        return Err(OperatorError::ZeroDimension);
    }
    let scale = 1.0 / (k as f64).sqrt();
    let entries = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| {
            // reduce a·b first so large degrees keep full phase accuracy
            let phase = 2.0 * PI * ((a * b) % k) as f64 / k as f64;
            Complex64::from_polar(scale, phase)
        })
        .collect();
    Ok(CoinBlock { dim: k, entries })
}

/// Grover diffusion matrix: `(2 − k)/k` on the diagonal, `2/k` elsewhere.
pub fn grover_coin(k: usize) -> Result<CoinBlock, OperatorError> {
    if k == 0 {
        return Err(OperatorError::ZeroDimension);
    }
    let kf = k as f64;
    let entries = (0..k * k)
        .map(|idx| {
            let value = if idx / k == idx % k { (2.0 - kf) / kf } else { 2.0 / kf };
            Complex64::new(value, 0.0)
        })
        .collect();
    Ok(CoinBlock { dim: k, entries })
}

pub fn coin_block(kind: CoinKind, k: usize) -> Result<CoinBlock, OperatorError> {
    match kind {
        CoinKind::Fourier => fourier_coin(k),
        CoinKind::Grover => grover_coin(k),
    }
}

/// Dense square complex matrix (column-major, backed by `faer`).
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    inner: Mat<Complex64>,
}

impl DenseMatrix {
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            inner: Mat::from_fn(dim, dim, f),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_faer(&self) -> &Mat<Complex64> {
        &self.inner
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (c, &x) in v.iter().enumerate() {
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.inner[(r, c)] * x;
            }
        }
        out
    }

    /// `max |(M†M − I)ᵢⱼ|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = self.inner.adjoint() * &self.inner;
        let n = self.dim();
        let mut worst = 0.0_f64;
        for c in 0..n {
            for r in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((gram[(r, c)] - target).norm());
            }
        }
        worst
    }
}

/// The walk operator `U = S·C` on a graph, held in structured form.
#[derive(Debug, Clone)]
pub struct WalkOperator<'g> {
    graph: &'g Graph,
    coin: CoinKind,
    // blocks[k] is the coin for degree k; nodes of equal degree share it
    blocks: Vec<Option<CoinBlock>>,
}

impl<'g> WalkOperator<'g> {
    pub fn new(graph: &'g Graph, coin: CoinKind) -> Self {
        let mut blocks = vec![None; graph.max_degree() + 1];
        for node in 0..graph.node_count() {
            let k = graph.degree(node);
            if blocks[k].is_none() {
                blocks[k] = Some(coin_block(coin, k).expect("degree is at least 1"));
            }
        }
        Self { graph, coin, blocks }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn coin(&self) -> CoinKind {
        self.coin
    }

    pub fn dim(&self) -> usize {
        self.graph.arc_count()
    }

    /// Coin block acting on the arcs leaving `node`.
    pub fn block(&self, node: usize) -> &CoinBlock {
        self.blocks[self.graph.degree(node)]
            .as_ref()
            .expect("built for every degree present")
    }

    /// Shift permutation: `shift_permutation()[a]` is the image of arc `a`.
    pub fn shift_permutation(&self) -> &[usize] {
        self.graph.reverse_map()
    }

    /// One step `output = U·input` without allocating.
    pub fn step_into(&self, input: &[Complex64], output: &mut [Complex64]) -> Result<(), OperatorError> {
        let d = self.dim();
        for len in [input.len(), output.len()] {
            if len != d {
                return Err(OperatorError::DimensionMismatch { expected: d, found: len });
            }
        }
        let reverse = self.graph.reverse_map();
        for node in 0..self.graph.node_count() {
            let arcs = self.graph.arc_range(node);
            let local = &input[arcs.clone()];
            let base = arcs.start;
            match self.coin {
                CoinKind::Grover => {
                    let k = local.len() as f64;
                    let mean2: Complex64 = local.iter().sum::<Complex64>() * (2.0 / k);
                    for (slot, &amp) in local.iter().enumerate() {
                        output[reverse[base + slot]] = mean2 - amp;
                    }
                }
                CoinKind::Fourier => {
                    for (slot, row) in self.block(node).rows().enumerate() {
                        let value: Complex64 = row.iter().zip(local).map(|(c, a)| c * a).sum();
                        output[reverse[base + slot]] = value;
                    }
                }
            }
        }
        Ok(())
    }

    /// `|ψ(t+1)⟩ = U|ψ(t)⟩`; the returned state carries time `t + 1`.
    pub fn apply(&self, state: &WalkState) -> Result<WalkState, OperatorError> {
        let mut next = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.step_into(state.amplitudes(), &mut next)?;
        Ok(WalkState::from_parts(next, state.time() + 1))
    }

    /// Dense `D × D` matrix of `S·C`, refusing dimensions above `cap`.
    pub fn materialize_dense(&self, cap: usize) -> Result<DenseMatrix, OperatorError> {
        let d = self.dim();
        if d > cap {
            return Err(OperatorError::DenseCapExceeded { dim: d, cap });
        }
        let mut dense = Mat::<Complex64>::zeros(d, d);
        let reverse = self.graph.reverse_map();
        for node in 0..self.graph.node_count() {
            let arcs = self.graph.arc_range(node);
            let block = self.block(node);
            for a in 0..block.dim() {
                let row = reverse[arcs.start + a];
                for b in 0..block.dim() {
                    dense[(row, arcs.start + b)] = block.get(a, b);
                }
            }
        }
        Ok(DenseMatrix { inner: dense })
    }
}

/// Outcome of comparing the arc-reversal shift with the standard lattice shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftEquivalence {
    /// `S·P` equals the standard shift `S′` as a permutation.
    pub permutations_match: bool,
    /// `S·(P·C)` equals `S′·C` entrywise for the 2×2 Fourier coin.
    pub walks_match: bool,
}

impl ShiftEquivalence {
    pub fn holds(&self) -> bool {
        self.permutations_match && self.walks_match
    }
}

/// Checks on a ring of `n` sites that the arc-reversal shift composed with a
/// per-site flip of the two movers is the standard chirality-preserving shift.
///
/// Basis order per site `x`: index `2x` is `x→x−1`, index `2x + 1` is `x→x+1`.
pub fn verify_shift_equivalence(n: usize) -> Result<ShiftEquivalence, OperatorError> {
    if n < 3 {
        return Err(OperatorError::CycleTooShort(n));
    }
    let left = |x: usize| 2 * (x % n);
    let right = |x: usize| 2 * (x % n) + 1;
    let dim = 2 * n;

    // permutations as image maps: perm[input] = output
    let mut reversal = vec![0; dim];
    let mut flip = vec![0; dim];
    let mut standard = vec![0; dim];
    for x in 0..n {
        let prev = (x + n - 1) % n;
        let next = (x + 1) % n;
        reversal[left(x)] = right(prev); // x→x−1  ↦  x−1→x
        reversal[right(x)] = left(next); // x→x+1  ↦  x+1→x
        flip[left(x)] = right(x);
        flip[right(x)] = left(x);
        standard[right(x)] = right(prev); // x→x+1  ↦  x−1→x
        standard[left(x)] = left(next); // x→x−1  ↦  x+1→x
    }
    let composed: Vec<usize> = (0..dim).map(|i| reversal[flip[i]]).collect();
    let permutations_match = composed == standard;

    let as_matrix = |perm: &[usize]| {
        Mat::<Complex64>::from_fn(dim, dim, |r, c| {
            if perm[c] == r {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let hadamard = fourier_coin(2)?;
    let coin = Mat::<Complex64>::from_fn(dim, dim, |r, c| {
        if r / 2 == c / 2 {
            hadamard.get(r % 2, c % 2)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let s = as_matrix(&reversal);
    let p = as_matrix(&flip);
    let s_std = as_matrix(&standard);
    let jammed = &p * &coin;
    let lhs = &s * &jammed;
    let rhs = &s_std * &coin;
    let walks_match = (0..dim).all(|c| (0..dim).all(|r| lhs[(r, c)] == rhs[(r, c)]));

    Ok(ShiftEquivalence {
        permutations_match,
        walks_match,
    })
}
