//! Eigendecomposition of the walk operator and everything computed from it.
//!
//! The infinite-time (Cesàro) average of `|⟨l→m|Uᵗ|i→j⟩|²` equals
//! `Σ_g |⟨l→m|P_g|i→j⟩|²`, where `P_g` projects onto the eigenspace `g`. When
//! every eigenvalue is simple this is the familiar `Σ_μ |⟨l→m|μ⟩|²|⟨μ|i→j⟩|²`;
//! Grover walks have large `±1` eigenspaces, so the projector form is used
//! throughout.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::{TransitionMatrix, TransitionRow, WalkState};
use crate::graph::{Graph, GraphError};
use crate::operators::{CoinKind, DenseMatrix, OperatorError, WalkOperator};

/// Default argument tolerance for grouping eigenvalues into eigenspaces.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// Largest accepted `‖U|μ⟩ − λ_μ|μ⟩‖`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest accepted `max |(V†V − I)ᵢⱼ|`.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;
/// Largest accepted `||λ_μ| − 1|`.
pub const MODULUS_TOL: f64 = 1e-10;
/// Input must satisfy `max |(U†U − I)ᵢⱼ| ≤ INPUT_UNITARITY_TOL`.
pub const INPUT_UNITARITY_TOL: f64 = 1e-10;

/// Longest cycle for which all sign patterns are searched.
pub const MAX_LOOP_SEARCH: usize = 6;

// distance from ±1 below which a group counts as the ±1 eigenspace
const PINNED_EIGENVALUE_TOL: f64 = 1e-6;
const LOOP_EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("operator is not unitary (max |U†U − I| = {0:e})")]
    NotUnitary(f64),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("eigenvectors of the group at argument {argument} are linearly dependent")]
    DependentGroup { argument: f64 },
    #[error("decomposition check failed: {check} = {value:e}")]
    CheckFailed { check: &'static str, value: f64 },
    #[error("eigenstate {index} out of range (dimension {dim})")]
    InvalidEigenstate { index: usize, dim: usize },
    #[error("decomposition has dimension {found}, graph has {expected} arcs")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("node list is not a cycle of the graph: {0}")]
    NotACycle(String),
    #[error("sign search is limited to cycles of length <= {MAX_LOOP_SEARCH}, got {0}")]
    LoopTooLong(usize),
    #[error("sign pattern needs {expected} entries of ±1")]
    BadPattern { expected: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How well the returned decomposition satisfies its invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionChecks {
    pub input_unitarity: f64,
    pub max_residual: f64,
    pub max_modulus_error: f64,
    pub max_orthonormality_error: f64,
}

/// Eigenvalues, orthonormal eigenvectors and their eigenspace grouping.
///
/// Eigenpairs are stored in ascending order of argument in `[−π, π)`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<Complex64>,
    arguments: Vec<f64>,
    vectors: Mat<Complex64>,
    groups: Vec<Vec<usize>>,
    tolerance: f64,
    checks: DecompositionChecks,
}

fn wrap_argument(z: Complex64) -> f64 {
    let theta = z.arg();
    if theta >= PI {
        -PI
    } else {
        theta
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Modified Gram–Schmidt, two passes, in place.
fn orthonormalize(columns: &mut [Vec<Complex64>]) -> bool {
    for pass in 0..2 {
        for j in 0..columns.len() {
            let (done, rest) = columns.split_at_mut(j);
            let v = &mut rest[0];
            for q in done.iter() {
                let c = dot(q, v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if pass == 0 && norm < 1e-6 {
                return false;
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
    }
    true
}

/// Splits sorted arguments into chains whose neighbours differ by less than
/// `tol`, joining the first and last chain across the `±π` cut.
fn group_arguments(sorted: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (idx, &theta) in sorted.iter().enumerate() {
        match groups.last_mut() {
            Some(group) if theta - sorted[*group.last().unwrap()] < tol => group.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    if groups.len() > 1 {
        let first = sorted[groups[0][0]];
        let last = sorted[*groups.last().unwrap().last().unwrap()];
        if first + 2.0 * PI - last < tol {
            let mut tail = groups.pop().unwrap();
            tail.append(&mut groups[0]);
            groups[0] = tail;
        }
    }
    groups
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Eigenvalue arguments in `[−π, π)`, ascending.
    pub fn arguments(&self) -> &[f64] {
        &self.arguments
    }

    pub fn eigenvector(&self, index: usize) -> &[Complex64] {
        self.vectors.col_as_slice(index)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn checks(&self) -> DecompositionChecks {
        self.checks
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }

    /// Unit-modulus mean of a group's eigenvalues, with the argument snapped
    /// to exactly 0 or −π when it lies within the grouping tolerance.
    pub fn group_representative(&self, group: usize) -> (Complex64, f64) {
        let sum: Complex64 = self.groups[group].iter().map(|&m| self.eigenvalues[m]).sum();
        let mut theta = wrap_argument(sum);
        if theta.abs() < self.tolerance {
            theta = 0.0;
        } else if PI - theta.abs() < self.tolerance {
            theta = -PI;
        }
        (Complex64::from_polar(1.0, theta), theta)
    }

    /// Node probabilities `p_μ(l) = Σ_m |⟨l→m|μ⟩|²` of one eigenvector.
    pub fn node_probability(&self, graph: &Graph, index: usize) -> Vec<f64> {
        crate::evolution::node_probability_of(graph, self.eigenvector(index))
    }

    fn check_graph(&self, graph: &Graph) -> Result<(), SpectralError> {
        if graph.arc_count() != self.dim() {
            return Err(SpectralError::DimensionMismatch {
                expected: graph.arc_count(),
                found: self.dim(),
            });
        }
        Ok(())
    }
}

/// Diagonalizes a unitary matrix and verifies the result.
///
/// Within each group of (numerically) equal eigenvalues the eigenvectors are
/// re-orthonormalized, so every group carries an orthonormal basis of its
/// eigenspace.
pub fn decompose(u: &DenseMatrix, tolerance: f64) -> Result<SpectralDecomposition, SpectralError> {
    let input_unitarity = u.unitarity_deviation();
    if input_unitarity.is_nan() || input_unitarity > INPUT_UNITARITY_TOL {
        return Err(SpectralError::NotUnitary(input_unitarity));
    }
    let d = u.dim();
    let eigen = u.as_faer().eigen().map_err(|_| SpectralError::NoConvergence)?;
    let values = eigen.S();
    let raw_vectors = eigen.U();

    let mut order: Vec<usize> = (0..d).collect();
    let raw_args: Vec<f64> = (0..d).map(|i| wrap_argument(values[i])).collect();
    order.sort_by(|&a, &b| raw_args[a].total_cmp(&raw_args[b]));
    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let arguments: Vec<f64> = order.iter().map(|&i| raw_args[i]).collect();
    let mut vectors = Mat::<Complex64>::from_fn(d, d, |r, c| raw_vectors[(r, order[c])]);

    let groups = group_arguments(&arguments, tolerance);
    for group in &groups {
        let mut columns: Vec<Vec<Complex64>> = group.iter().map(|&c| vectors.col_as_slice(c).to_vec()).collect();
        if !orthonormalize(&mut columns) {
            return Err(SpectralError::DependentGroup {
                argument: arguments[group[0]],
            });
        }
        for (&c, column) in group.iter().zip(columns) {
            vectors.col_as_slice_mut(c).copy_from_slice(&column);
        }
    }

    let checks = verify(u, &eigenvalues, &vectors, input_unitarity);
    for (check, value, limit) in [
        ("max residual", checks.max_residual, RESIDUAL_TOL),
        ("max modulus error", checks.max_modulus_error, MODULUS_TOL),
        ("max orthonormality error", checks.max_orthonormality_error, ORTHONORMALITY_TOL),
    ] {
        if value.is_nan() || value > limit {
            return Err(SpectralError::CheckFailed { check, value });
        }
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        arguments,
        vectors,
        groups,
        tolerance,
        checks,
    })
}

/// Decomposes the dense walk operator of `graph` with the given coin.
pub fn decompose_walk(
    graph: &Graph,
    coin: CoinKind,
    dense_cap: usize,
    tolerance: f64,
) -> Result<SpectralDecomposition, SpectralError> {
    let dense = WalkOperator::new(graph, coin).materialize_dense(dense_cap)?;
    decompose(&dense, tolerance)
}

// Column blocks keep the verification products at O(D · CHUNK) memory.
const CHUNK: usize = 256;

fn verify(u: &DenseMatrix, eigenvalues: &[Complex64], vectors: &Mat<Complex64>, input_unitarity: f64) -> DecompositionChecks {
    let d = eigenvalues.len();
    let mut max_residual = 0.0_f64;
    let mut max_orthonormality_error = 0.0_f64;
    let max_modulus_error = eigenvalues
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut start = 0;
    while start < d {
        let len = CHUNK.min(d - start);
        let block = vectors.as_ref().subcols(start, len);
        let image = u.as_faer() * block;
        let gram = vectors.adjoint() * block;
        for c in 0..len {
            let lambda = eigenvalues[start + c];
            let residual: f64 = (0..d)
                .map(|r| (image[(r, c)] - lambda * block[(r, c)]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            max_residual = max_residual.max(residual);
            for r in 0..d {
                let target = if r == start + c { 1.0 } else { 0.0 };
                max_orthonormality_error = max_orthonormality_error.max((gram[(r, c)] - target).norm());
            }
        }
        start += len;
    }
    DecompositionChecks {
        input_unitarity,
        max_residual,
        max_modulus_error,
        max_orthonormality_error,
    }
}

/// One eigenspace in a [`DegeneracyReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenGroup {
    pub re: f64,
    pub im: f64,
    pub argument: f64,
    pub multiplicity: usize,
}

/// Eigenvalue multiplicities, with the `±1` counts compared against the
/// cycle-rank prediction for Grover walks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub groups: Vec<EigenGroup>,
    pub plus_one: usize,
    pub minus_one: usize,
    pub betti: usize,
    pub bipartite: bool,
    /// `b₁ + 1`.
    pub predicted_plus_one: usize,
    /// `b₁ + 1` if bipartite, else `b₁ − 1`.
    pub predicted_minus_one: usize,
}

impl DegeneracyReport {
    pub fn matches_prediction(&self) -> bool {
        self.plus_one == self.predicted_plus_one && self.minus_one == self.predicted_minus_one
    }

    pub fn max_multiplicity(&self) -> usize {
        self.groups.iter().map(|g| g.multiplicity).max().unwrap_or(0)
    }
}

/// `(b₁ + 1, b₁ + 1)` for bipartite graphs, `(b₁ + 1, b₁ − 1)` otherwise.
pub fn predicted_grover_degeneracy(graph: &Graph) -> Result<(usize, usize), GraphError> {
    let b = graph.betti_number()?;
    if graph.is_bipartite() {
        Ok((b + 1, b + 1))
    } else {
        // non-bipartite graphs contain an odd cycle, so b ≥ 1
        Ok((b + 1, b - 1))
    }
}

pub fn degeneracy_report(dec: &SpectralDecomposition, graph: &Graph) -> Result<DegeneracyReport, SpectralError> {
    dec.check_graph(graph)?;
    let (predicted_plus_one, predicted_minus_one) = predicted_grover_degeneracy(graph)?;
    let mut plus_one = 0;
    let mut minus_one = 0;
    let groups = (0..dec.groups.len())
        .map(|g| {
            let (z, argument) = dec.group_representative(g);
            let multiplicity = dec.groups[g].len();
            if (z - 1.0).norm() < PINNED_EIGENVALUE_TOL {
                plus_one += multiplicity;
            } else if (z + 1.0).norm() < PINNED_EIGENVALUE_TOL {
                minus_one += multiplicity;
            }
            EigenGroup {
                re: z.re,
                im: z.im,
                argument,
                multiplicity,
            }
        })
        .collect();
    Ok(DegeneracyReport {
        groups,
        plus_one,
        minus_one,
        betti: graph.betti_number()?,
        bipartite: graph.is_bipartite(),
        predicted_plus_one,
        predicted_minus_one,
    })
}

/// Symmetric kernel `K(i, l) = Σ_g Σ_{m,j} |⟨l→m|P_g|i→j⟩|²`, row-major.
///
/// With it, `p̄(i→l) = K(i, l)/kᵢ` and `P̄(i→l) = K(i, l)/(kᵢ k_l)`.
fn cesaro_kernel(dec: &SpectralDecomposition, graph: &Graph) -> Vec<f64> {
    let n = graph.node_count();
    let d = dec.dim();
    let mut kernel = vec![0.0; n * n];

    // simple eigenvalues: rank-one projectors give p_μ(i) p_μ(l)
    let simple: Vec<usize> = dec.groups.iter().filter(|g| g.len() == 1).map(|g| g[0]).collect();
    if !simple.is_empty() {
        let weights = Mat::<f64>::from_fn(n, simple.len(), |l, c| {
            dec.eigenvector(simple[c])[graph.arc_range(l)]
                .iter()
                .map(|a| a.norm_sqr())
                .sum()
        });
        let product = &weights * weights.transpose();
        for i in 0..n {
            for l in 0..n {
                kernel[i * n + l] += product[(i, l)];
            }
        }
    }

    // degenerate eigenspaces: form the projector and sum |P_g|² over node blocks
    let tails = graph.arc_tails();
    for group in dec.groups.iter().filter(|g| g.len() > 1) {
        let basis = Mat::<Complex64>::from_fn(d, group.len(), |r, c| dec.eigenvector(group[c])[r]);
        let projector = &basis * basis.adjoint();
        for col in 0..d {
            let i = tails[col];
            for row in 0..d {
                kernel[i * n + tails[row]] += projector[(row, col)].norm_sqr();
            }
        }
    }
    kernel
}

/// Infinite-time averaged transition probabilities for every initial node.
pub fn infinite_time_matrix(dec: &SpectralDecomposition, graph: &Graph) -> Result<TransitionMatrix, SpectralError> {
    dec.check_graph(graph)?;
    let n = graph.node_count();
    let kernel = cesaro_kernel(dec, graph);
    let rows = (0..n)
        .map(|i| {
            let k = graph.degree(i) as f64;
            let probability = kernel[i * n..(i + 1) * n].iter().map(|v| v / k).collect();
            TransitionRow::from_probability(graph, i, probability)
        })
        .collect();
    Ok(TransitionMatrix::from_rows(rows))
}

/// Infinite-time averaged row `p̄(i→l)`, `P̄(i→l)` for one initial node.
///
/// Computed column-wise from the projectors onto the arcs of `source` only,
/// independently of [`infinite_time_matrix`].
pub fn infinite_time_average(
    dec: &SpectralDecomposition,
    graph: &Graph,
    source: usize,
) -> Result<TransitionRow, SpectralError> {
    dec.check_graph(graph)?;
    if source >= graph.node_count() {
        return Err(SpectralError::Graph(GraphError::NodeOutOfRange {
            a: source,
            b: source,
            n: graph.node_count(),
        }));
    }
    let n = graph.node_count();
    let d = dec.dim();
    let tails = graph.arc_tails();
    let source_arcs = graph.arc_range(source);
    let mut acc = vec![0.0; n];
    for group in &dec.groups {
        for arc in source_arcs.clone() {
            // column `arc` of the projector: Σ_μ |μ⟩⟨μ|i→j⟩
            let mut column = vec![Complex64::new(0.0, 0.0); d];
            for &mu in group {
                let v = dec.eigenvector(mu);
                let overlap = v[arc].conj();
                column.iter_mut().zip(v).for_each(|(c, x)| *c += x * overlap);
            }
            for (row, value) in column.iter().enumerate() {
                acc[tails[row]] += value.norm_sqr();
            }
        }
    }
    let k = graph.degree(source) as f64;
    acc.iter_mut().for_each(|p| *p /= k);
    Ok(TransitionRow::from_probability(graph, source, acc))
}

/// The eigenvector sum that assumes all eigenvalues are simple,
/// `(1/kᵢ) Σ_μ p_μ(i) p_μ(l)`, applied to every eigenvector regardless of
/// grouping. Equals [`infinite_time_matrix`] for non-degenerate spectra.
pub fn naive_infinite_time_matrix(dec: &SpectralDecomposition, graph: &Graph) -> Result<TransitionMatrix, SpectralError> {
    dec.check_graph(graph)?;
    let n = graph.node_count();
    let weights: Vec<Vec<f64>> = (0..dec.dim()).map(|mu| dec.node_probability(graph, mu)).collect();
    let rows = (0..n)
        .map(|i| {
            let k = graph.degree(i) as f64;
            let probability = (0..n)
                .map(|l| weights.iter().map(|w| w[i] * w[l]).sum::<f64>() / k)
                .collect();
            TransitionRow::from_probability(graph, i, probability)
        })
        .collect();
    Ok(TransitionMatrix::from_rows(rows))
}

/// `Σ_l p(l)² / (Σ_l p(l))²`: 1 for a single node, `1/N` when spread evenly.
pub fn inverse_participation_ratio(probability: &[f64]) -> f64 {
    let total: f64 = probability.iter().sum();
    probability.iter().map(|p| p * p).sum::<f64>() / (total * total)
}

/// IPR of every eigenvector, in eigenpair order.
pub fn ipr(dec: &SpectralDecomposition, graph: &Graph) -> Result<Vec<f64>, SpectralError> {
    dec.check_graph(graph)?;
    Ok((0..dec.dim())
        .map(|mu| inverse_participation_ratio(&dec.node_probability(graph, mu)))
        .collect())
}

/// Degree-normalized node profile `P_μ(l) = p_μ(l)/k_l` of eigenvector `index`.
pub fn eigenstate_profile(dec: &SpectralDecomposition, graph: &Graph, index: usize) -> Result<Vec<f64>, SpectralError> {
    dec.check_graph(graph)?;
    if index >= dec.dim() {
        return Err(SpectralError::InvalidEigenstate { index, dim: dec.dim() });
    }
    Ok(dec
        .node_probability(graph, index)
        .iter()
        .enumerate()
        .map(|(l, p)| p / graph.degree(l) as f64)
        .collect())
}

/// A `±1` eigenvector of the Grover walk supported on the arcs of one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopEigenvector {
    /// Signs on the cycle's arcs: first the forward arcs `v_a → v_{a+1}`,
    /// then the backward arcs `v_{a+1} → v_a`, for `a = 0..n`.
    pub signs: Vec<i8>,
    pub eigenvalue: i8,
    pub state: WalkState,
}

fn cycle_arcs(graph: &Graph, cycle: &[usize]) -> Result<Vec<usize>, SpectralError> {
    let n = cycle.len();
    if n < 3 {
        return Err(SpectralError::NotACycle(format!("{n} nodes; need at least 3")));
    }
    let mut distinct = cycle.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != n {
        return Err(SpectralError::NotACycle("repeated node".into()));
    }
    let mut forward = Vec::with_capacity(n);
    let mut backward = Vec::with_capacity(n);
    for a in 0..n {
        let (x, y) = (cycle[a], cycle[(a + 1) % n]);
        let arc = graph
            .arc_between(x, y)
            .ok_or_else(|| SpectralError::NotACycle(format!("no edge between nodes {} and {}", x + 1, y + 1)))?;
        forward.push(arc);
        backward.push(graph.reverse(arc));
    }
    forward.extend(backward);
    Ok(forward)
}

fn test_loop_pattern(
    op: &WalkOperator<'_>,
    arcs: &[usize],
    signs: &[i8],
    buffer: &mut [Complex64],
) -> Option<LoopEigenvector> {
    let scale = 1.0 / (arcs.len() as f64).sqrt();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); op.dim()];
    for (&arc, &s) in arcs.iter().zip(signs) {
        amplitudes[arc] = Complex64::new(f64::from(s) * scale, 0.0);
    }
    op.step_into(&amplitudes, buffer).expect("sized to D");
    for eigenvalue in [1i8, -1] {
        let lambda = f64::from(eigenvalue);
        let ok = buffer
            .iter()
            .zip(&amplitudes)
            .all(|(image, v)| (image - v * lambda).norm() < LOOP_EIGEN_TOL);
        if ok {
            return Some(LoopEigenvector {
                signs: signs.to_vec(),
                eigenvalue,
                state: WalkState::from_parts(amplitudes, 0),
            });
        }
    }
    None
}

/// Searches sign patterns `±1/√(2n)` on the arcs of `cycle` for Grover-walk
/// eigenvectors with eigenvalue `+1` or `−1`.
///
/// With `pattern = None` every pattern whose first sign is `+` is tried
/// (cycles up to [`MAX_LOOP_SEARCH`] nodes); otherwise only the given one.
pub fn loop_eigenvectors(
    graph: &Graph,
    cycle: &[usize],
    pattern: Option<&[i8]>,
) -> Result<Vec<LoopEigenvector>, SpectralError> {
    let arcs = cycle_arcs(graph, cycle)?;
    let op = WalkOperator::new(graph, CoinKind::Grover);
    let mut buffer = vec![Complex64::new(0.0, 0.0); op.dim()];
    if let Some(signs) = pattern {
        if signs.len() != arcs.len() || signs.iter().any(|s| s.abs() != 1) {
            return Err(SpectralError::BadPattern { expected: arcs.len() });
        }
        return Ok(test_loop_pattern(&op, &arcs, signs, &mut buffer).into_iter().collect());
    }
    if cycle.len() > MAX_LOOP_SEARCH {
        return Err(SpectralError::LoopTooLong(cycle.len()));
    }
    let m = arcs.len();
    let mut found = Vec::new();
    for mask in 0u32..(1 << (m - 1)) {
        let signs: Vec<i8> = std::iter::once(1)
            .chain((0..m - 1).map(|b| if mask >> b & 1 == 1 { -1 } else { 1 }))
            .collect();
        found.extend(test_loop_pattern(&op, &arcs, &signs, &mut buffer));
    }
    Ok(found)
}

/// Counts of eigenvalue arguments over `bins` equal bins on `[−π, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgumentHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl ArgumentHistogram {
    pub fn bin_of(&self, theta: f64) -> usize {
        let bins = self.counts.len();
        let x = (theta + PI) / (2.0 * PI) * bins as f64;
        (x.floor() as isize).clamp(0, bins as isize - 1) as usize
    }
}

/// Histogram of eigenvalue arguments; members of a degenerate group are
/// counted at the group's representative argument.
pub fn argument_histogram(dec: &SpectralDecomposition, bins: usize) -> Result<ArgumentHistogram, SpectralError> {
    if bins < 2 {
        return Err(SpectralError::TooFewBins(bins));
    }
    let edges = (0..=bins).map(|b| -PI + 2.0 * PI * b as f64 / bins as f64).collect();
    let mut histogram = ArgumentHistogram {
        edges,
        counts: vec![0; bins],
    };
    for g in 0..dec.groups.len() {
        let (_, theta) = dec.group_representative(g);
        let bin = histogram.bin_of(theta);
        histogram.counts[bin] += dec.groups[g].len();
    }
    Ok(histogram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;
    use crate::operators::DEFAULT_DENSE_CAP;

    fn decompose_builtin(graph: &Graph, coin: CoinKind) -> SpectralDecomposition {
        decompose_walk(graph, coin, DEFAULT_DENSE_CAP, DEFAULT_DEGENERACY_TOL).unwrap()
    }

    #[test]
    fn swap_has_plus_and_minus_one() {
        let g = datasets::path(2).unwrap();
        let dec = decompose_builtin(&g, CoinKind::Fourier);
        assert_eq!(dec.dim(), 2);
        assert!((dec.eigenvalues()[0] + 1.0).norm() < 1e-14);
        assert!((dec.eigenvalues()[1] - 1.0).norm() < 1e-14);
        let report = degeneracy_report(&dec, &g).unwrap();
        assert_eq!((report.plus_one, report.minus_one), (1, 1));
        assert!(report.matches_prediction());
    }

    #[test]
    fn rejects_non_unitary_input() {
        let m = DenseMatrix::from_fn(3, |r, c| Complex64::new(if r == c { 2.0 } else { 0.0 }, 0.0));
        assert!(matches!(decompose(&m, DEFAULT_DEGENERACY_TOL), Err(SpectralError::NotUnitary(_))));
    }

    #[test]
    fn grouping_wraps_across_the_cut() {
        let args = [-PI, -PI + 1e-12, -1.0, 0.0, 1e-13, PI - 1e-12];
        let groups = group_arguments(&args, 1e-8);
        assert_eq!(groups, vec![vec![5, 0, 1], vec![2], vec![3, 4]]);
        assert_eq!(group_arguments(&[0.5], 1e-8), vec![vec![0]]);
    }

    #[test]
    fn ipr_reference_values() {
        assert_eq!(inverse_participation_ratio(&[0.0, 1.0, 0.0]), 1.0);
        let uniform = vec![1.0 / 21.0; 21];
        assert!((inverse_participation_ratio(&uniform) - 1.0 / 21.0).abs() < 1e-15);
        let mut community = vec![0.0; 21];
        community[..7].iter_mut().for_each(|p| *p = 1.0 / 7.0);
        assert!((inverse_participation_ratio(&community) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn cycle_four_grover_prediction() {
        let g = datasets::cycle(4).unwrap();
        let dec = decompose_builtin(&g, CoinKind::Grover);
        let report = degeneracy_report(&dec, &g).unwrap();
        assert_eq!((report.predicted_plus_one, report.predicted_minus_one), (2, 2));
        assert!(report.matches_prediction());
    }

    #[test]
    fn house_grover_degeneracy() {
        let g = datasets::house();
        let dec = decompose_builtin(&g, CoinKind::Grover);
        let report = degeneracy_report(&dec, &g).unwrap();
        assert_eq!((report.plus_one, report.minus_one), (3, 1));
    }

    #[test]
    fn profile_and_errors() {
        let g = datasets::cycle(5).unwrap();
        let dec = decompose_builtin(&g, CoinKind::Fourier);
        let profile = eigenstate_profile(&dec, &g, 3).unwrap();
        let total: f64 = profile.iter().enumerate().map(|(l, p)| p * g.degree(l) as f64).sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(matches!(
            eigenstate_profile(&dec, &g, 10),
            Err(SpectralError::InvalidEigenstate { index: 10, dim: 10 })
        ));
        let other = datasets::cycle(6).unwrap();
        assert!(matches!(
            infinite_time_matrix(&dec, &other),
            Err(SpectralError::DimensionMismatch { .. })
        ));
        assert_eq!(argument_histogram(&dec, 1), Err(SpectralError::TooFewBins(1)));
    }

    #[test]
    fn loop_search_rejects_non_cycles() {
        let g = datasets::house();
        assert!(matches!(loop_eigenvectors(&g, &[0, 1], None), Err(SpectralError::NotACycle(_))));
        assert!(matches!(loop_eigenvectors(&g, &[0, 2, 3], None), Err(SpectralError::NotACycle(_))));
        assert!(matches!(loop_eigenvectors(&g, &[0, 1, 0], None), Err(SpectralError::NotACycle(_))));
        assert!(matches!(
            loop_eigenvectors(&g, &[0, 1, 4], Some(&[1, 1])),
            Err(SpectralError::BadPattern { expected: 6 })
        ));
        let big = datasets::cycle(7).unwrap();
        assert_eq!(
            loop_eigenvectors(&big, &[0, 1, 2, 3, 4, 5, 6], None),
            Err(SpectralError::LoopTooLong(7))
        );
    }
}
