//! Dense Hermitian discretizations of the reduced block matrix and the full
//! two-boson Hamiltonian on midpoint grids, eigensolves, exact inertia-based
//! eigenvalue counting, and the rank-4 block-diagonalization check.

use crate::model::{C64, ModelSpec};
use crate::pencil::PencilParams;
use crate::spectrum::IntervalUnion;
use crate::{Error, Result};
use nalgebra::DMatrix;
use serde::Serialize;
use std::io::Write as _;

/// Midpoint-rule quadrature grid over the model support.
#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of unordered pairs (i <= j).
    pub fn pair_count(&self) -> usize {
        let n = self.len();
        n * (n + 1) / 2
    }

    /// Index of the pair (i, j), i <= j, within the pair block.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.len());
        let n = self.len();
        i * n - i * (i + 1) / 2 + j
    }
}

/// Midpoint nodes `a + (i - 1/2) h` with uniform weights `h`.
pub fn build_grid(model: &ModelSpec, n: usize) -> Grid {
    assert!(n >= 2, "grid needs at least two nodes");
    let (a, b) = model.support();
    let h = (b - a) / n as f64;
    let nodes = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
    Grid { nodes, weights: vec![h; n] }
}

/// Which operator a dense discretization represents.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum MatrixKind {
    /// Reduced 2x2 block matrix at fixed (gamma, alpha); basis = one-particle
    /// block then symmetric pairs (i <= j).
    ReducedA { gamma: f64, alpha: f64 },
    /// Full Hamiltonian; basis = [vac, one, pair] for spin +, then the same
    /// for spin -.
    Hamiltonian { epsilon: f64, alpha: f64 },
}

/// Dense Hermitian discretization with its grid and parameters.
#[derive(Debug, Clone)]
pub struct OperatorMatrixDisc {
    pub matrix: DMatrix<C64>,
    pub grid: Grid,
    pub kind: MatrixKind,
}

impl OperatorMatrixDisc {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest deviation from Hermitian symmetry, relative to the largest
    /// entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
                scale = scale.max(self.matrix[(i, j)].norm());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    /// Binary dump: 32-byte header (magic `SBSM`, version, N, sector dims)
    /// followed by the row-major little-endian (re, im) f64 pairs.
    pub fn write_binary(&self, path: &std::path::Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        let n = self.grid.len() as u32;
        let (s0, s1) = match self.kind {
            MatrixKind::ReducedA { .. } => (n, self.grid.pair_count() as u32),
            MatrixKind::Hamiltonian { .. } => {
                let d2 = (self.dim() / 2) as u32;
                (d2, d2)
            }
        };
        let mut header = [0u8; 32];
        header[0..4].copy_from_slice(b"SBSM");
        header[4..8].copy_from_slice(&1u32.to_le_bytes());
        header[8..12].copy_from_slice(&n.to_le_bytes());
        header[12..16].copy_from_slice(&2u32.to_le_bytes());
        header[16..20].copy_from_slice(&s0.to_le_bytes());
        header[20..24].copy_from_slice(&s1.to_le_bytes());
        f.write_all(&header)?;
        let dim = self.dim();
        let mut buf = Vec::with_capacity(dim * 16);
        for i in 0..dim {
            buf.clear();
            for j in 0..dim {
                let v = self.matrix[(i, j)];
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
            f.write_all(&buf)?;
        }
        Ok(())
    }
}

/// Coupling entry between one-particle index `m` and the symmetric pair
/// `(i, j)`, `i <= j`, in weight-embedded coordinates.
///
/// These are the matrix elements of the two-to-one annihilation map in the
/// orthonormal basis of the symmetric pair space; the sqrt(2) on diagonal
/// pairs and the plain weights on off-diagonal pairs make the discretized
/// Schur complement reproduce the continuum kernel with full strength.
fn b_entry(model: &ModelSpec, grid: &Grid, alpha: f64, m: usize, i: usize, j: usize) -> C64 {
    let lam = |idx: usize| model.eval(grid.nodes[idx]).1 * grid.weights[idx].sqrt();
    if i == j {
        if m == i {
            lam(i) * std::f64::consts::SQRT_2 * alpha
        } else {
            C64::new(0.0, 0.0)
        }
    } else {
        let mut v = C64::new(0.0, 0.0);
        if m == i {
            v += lam(j);
        }
        if m == j {
            v += lam(i);
        }
        v * alpha
    }
}

/// Dense discretization of the reduced block matrix.
pub fn build_a_matrix(model: &ModelSpec, p: &PencilParams, grid: &Grid) -> OperatorMatrixDisc {
    let n = grid.len();
    let dim = n + grid.pair_count();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..n {
        let w = model.eval(grid.nodes[i]).0;
        m[(i, i)] = C64::new(w - p.gamma, 0.0);
    }
    for i in 0..n {
        for j in i..n {
            let wi = model.eval(grid.nodes[i]).0;
            let wj = model.eval(grid.nodes[j]).0;
            let pi = n + grid.pair_index(i, j);
            m[(pi, pi)] = C64::new(wi + wj + p.gamma, 0.0);
            for mm in [i, j] {
                let b = b_entry(model, grid, p.alpha, mm, i, j);
                m[(mm, pi)] = b;
                m[(pi, mm)] = b.conj();
            }
        }
    }
    OperatorMatrixDisc {
        matrix: m,
        grid: grid.clone(),
        kind: MatrixKind::ReducedA { gamma: p.gamma, alpha: p.alpha },
    }
}

/// Dense discretization of the full Hamiltonian with two spin sectors.
pub fn build_h_matrix(model: &ModelSpec, epsilon: f64, alpha: f64, grid: &Grid) -> OperatorMatrixDisc {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let n = grid.len();
    let d2 = 1 + n + grid.pair_count();
    let mut m = DMatrix::<C64>::zeros(2 * d2, 2 * d2);
    // sector s: 0 -> sigma = +, 1 -> sigma = -
    let off = |s: usize| s * d2;
    for s in 0..2 {
        let sig = if s == 0 { 1.0 } else { -1.0 };
        let o = off(s);
        m[(o, o)] = C64::new(sig * epsilon, 0.0);
        for i in 0..n {
            let w = model.eval(grid.nodes[i]).0;
            m[(o + 1 + i, o + 1 + i)] = C64::new(sig * epsilon + w, 0.0);
            for j in i..n {
                let wj = model.eval(grid.nodes[j]).0;
                let pi = o + 1 + n + grid.pair_index(i, j);
                m[(pi, pi)] = C64::new(sig * epsilon + w + wj, 0.0);
            }
        }
    }
    // couplings flip the spin sector and change the particle number by one
    for s in 0..2 {
        let o = off(s);
        let q = off(1 - s);
        for i in 0..n {
            // vac (sector s) <-> one particle (sector 1-s)
            let lam = model.eval(grid.nodes[i]).1 * grid.weights[i].sqrt();
            m[(o, q + 1 + i)] = lam.conj() * alpha;
            m[(q + 1 + i, o)] = lam * alpha;
            // one particle (sector s) <-> pairs (sector 1-s)
            for j in 0..n {
                let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                let b = b_entry(model, grid, alpha, i, lo, hi);
                if b != C64::new(0.0, 0.0) {
                    let pi = q + 1 + n + grid.pair_index(lo, hi);
                    m[(o + 1 + i, pi)] = b;
                    m[(pi, o + 1 + i)] = b.conj();
                }
            }
        }
    }
    OperatorMatrixDisc {
        matrix: m,
        grid: grid.clone(),
        kind: MatrixKind::Hamiltonian { epsilon, alpha },
    }
}

/// Full real spectrum of a Hermitian matrix, sorted ascending.
///
/// Real-symmetric inputs take a faster real path; the result is
/// deterministic for identical input bits.
pub fn eig_sym(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eig_sym needs a square matrix");
    let scale = m.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let all_real = m.iter().all(|v| v.im.abs() <= 1e-14 * (1.0 + scale));
    let mut eigs: Vec<f64> = if all_real {
        let r = DMatrix::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
        nalgebra::linalg::SymmetricEigen::try_new(r, f64::EPSILON, 100_000)
            .ok_or(Error::ConvergenceFailure)?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        nalgebra::linalg::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000)
            .ok_or(Error::ConvergenceFailure)?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    };
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eigs)
}

/// Exact count of eigenvalues of the discretized reduced matrix below `t`,
/// by inertia: the pair-block diagonal is resolved directly and the
/// congruence-invariant negative count of the Schur complement
/// `(A - t) - B (D - t)^{-1} B*` (built from the same entries as
/// [`build_a_matrix`]) supplies the rest.
///
/// `t` must not collide with a pair-block diagonal entry.
pub fn count_below(model: &ModelSpec, p: &PencilParams, grid: &Grid, t: f64) -> Result<usize> {
    let n = grid.len();
    let omega: Vec<f64> = grid.nodes.iter().map(|&k| model.eval(k).0).collect();
    let lam: Vec<C64> = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&k, &w)| model.eval(k).1 * w.sqrt())
        .collect();
    let a2 = p.alpha * p.alpha;

    let mut below_d = 0usize;
    let mut min_dist = f64::INFINITY;
    for i in 0..n {
        for j in i..n {
            let d = omega[i] + omega[j] + p.gamma;
            min_dist = min_dist.min((d - t).abs());
            if d < t {
                below_d += 1;
            }
        }
    }
    let scale = omega.iter().fold(0.0f64, |a, &b| a.max(b.abs())) + p.gamma.abs() + t.abs() + 1.0;
    if min_dist < 1e-10 * scale {
        return Err(Error::SingularDenominator { k: t });
    }

    let mut s = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        let mut diag = omega[i] - p.gamma - t;
        for j in 0..n {
            let denom = omega[i] + omega[j] + p.gamma - t;
            let factor = if j == i { 2.0 } else { 1.0 };
            diag -= factor * a2 * lam[j].norm_sqr() / denom;
        }
        s[(i, i)] = C64::new(diag, 0.0);
        for j in (i + 1)..n {
            let denom = omega[i] + omega[j] + p.gamma - t;
            s[(i, j)] = -lam[i].conj() * lam[j] * (a2 / denom);
            s[(j, i)] = s[(i, j)].conj();
        }
    }
    let eigs = eig_sym(&s)?;
    Ok(below_d + eigs.iter().filter(|&&e| e < 0.0).count())
}

/// Exact count of eigenvalues of the discretized reduced matrix inside
/// `(lo, hi)`.
pub fn count_in_interval(
    model: &ModelSpec,
    p: &PencilParams,
    grid: &Grid,
    lo: f64,
    hi: f64,
) -> Result<usize> {
    assert!(lo < hi);
    Ok(count_below(model, p, grid, hi)? - count_below(model, p, grid, lo)?)
}

/// Classification of computed eigenvalues against a predicted interval union.
#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub eigenvalues: Vec<f64>,
    /// Tolerance used for the classification.
    pub residual_bound: f64,
    pub inside_predicted: usize,
    /// (eigenvalue, distance to the predicted union) for each outlier.
    pub outliers: Vec<(f64, f64)>,
}

pub fn compare_spectrum(eigs: &[f64], predicted: &IntervalUnion, tol: f64) -> EigenReport {
    assert!(tol >= 0.0);
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut inside = 0usize;
    let mut outliers = Vec::new();
    for &e in &sorted {
        let d = predicted.distance_to(e);
        if d <= tol {
            inside += 1;
        } else {
            outliers.push((e, d));
        }
    }
    EigenReport { eigenvalues: sorted, residual_bound: tol, inside_predicted: inside, outliers }
}

/// Permutes the Hamiltonian into the two spin-mixed blocks, subtracts the
/// embedded reduced matrices at `gamma = +epsilon` and `gamma = -epsilon`,
/// and returns all singular values of the remainder (descending).
///
/// The remainder is supported on the rows and columns of the two scalar
/// components, so its rank is at most 4; the 5th singular value measures the
/// defect of the block-diagonalization.
pub fn block_diag_check(
    h: &OperatorMatrixDisc,
    aplus: &OperatorMatrixDisc,
    aminus: &OperatorMatrixDisc,
) -> Result<Vec<f64>> {
    let n = h.grid.len();
    let npair = h.grid.pair_count();
    let d2 = 1 + n + npair;
    if h.dim() != 2 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian dimension {} does not match grid size {n}",
            h.dim()
        )));
    }
    let da = n + npair;
    if aplus.dim() != da || aminus.dim() != da {
        return Err(Error::DimensionMismatch(format!(
            "reduced matrices must have dimension {da}, got {} and {}",
            aplus.dim(),
            aminus.dim()
        )));
    }
    match (h.kind, aplus.kind, aminus.kind) {
        (
            MatrixKind::Hamiltonian { epsilon, alpha },
            MatrixKind::ReducedA { gamma: gp, alpha: ap },
            MatrixKind::ReducedA { gamma: gm, alpha: am },
        ) => {
            let ok = (gp - epsilon).abs() < 1e-14
                && (gm + epsilon).abs() < 1e-14
                && (ap - alpha).abs() < 1e-14
                && (am - alpha).abs() < 1e-14;
            if !ok {
                return Err(Error::DimensionMismatch(
                    "parameter mismatch between Hamiltonian and reduced matrices".into(),
                ));
            }
        }
        _ => {
            return Err(Error::DimensionMismatch(
                "expected one Hamiltonian and two reduced matrices".into(),
            ))
        }
    }

    // Coordinate permutation: block 1 = (vac+, one-, pair+),
    // block 2 = (vac-, one+, pair-). Original layout per sector: vac, one,
    // pair with sector + first.
    let dim = 2 * d2;
    let mut perm = vec![0usize; dim];
    let mut pos = 0usize;
    let sector_base = |s: usize| s * d2;
    for (vac_s, one_s, pair_s) in [(0usize, 1usize, 0usize), (1, 0, 1)] {
        perm[pos] = sector_base(vac_s);
        pos += 1;
        for i in 0..n {
            perm[pos] = sector_base(one_s) + 1 + i;
            pos += 1;
        }
        for q in 0..npair {
            perm[pos] = sector_base(pair_s) + 1 + n + q;
            pos += 1;
        }
    }

    // Remainder entries; only rows/columns touching the two vac slots can be
    // nonzero, collect its support to keep the SVD small.
    let block_of = |r: usize| -> Option<(usize, usize)> {
        // returns (block, offset within the embedded reduced matrix)
        let (b, local) = if r < d2 { (0, r) } else { (1, r - d2) };
        if local == 0 {
            None
        } else {
            Some((b, local - 1))
        }
    };
    let rem_entry = |r: usize, c: usize| -> C64 {
        let v = h.matrix[(perm[r], perm[c])];
        match (block_of(r), block_of(c)) {
            (Some((br, ir)), Some((bc, ic))) if br == bc => {
                let a = if br == 0 { aplus } else { aminus };
                v - a.matrix[(ir, ic)]
            }
            _ => v,
        }
    };

    let mut support: Vec<usize> = Vec::new();
    for r in 0..dim {
        let nonzero = (0..dim).any(|c| rem_entry(r, c) != C64::new(0.0, 0.0));
        if nonzero {
            support.push(r);
        }
    }
    let k = support.len();
    let mut sv: Vec<f64> = if k == 0 {
        Vec::new()
    } else {
        let sub = DMatrix::<C64>::from_fn(k, k, |i, j| rem_entry(support[i], support[j]));
        sub.singular_values().iter().copied().collect()
    };
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv.resize(dim, 0.0);
    Ok(sv)
}
