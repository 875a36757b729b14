//! Complex-linear structure subspaces of `C^{n×n}` with Frobenius-orthonormal
//! bases.
//!
//! Every built-in basis element is sparse, so a basis is stored as a list of
//! `(row, col, value)` triplets per element. The full space keeps no basis at
//! all; callers branch on [`StructureSubspace::is_full`] and take the
//! closed-form unstructured path instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, ensure_finite, CMatrix, CVector, C64};

/// Drop tolerance (relative to the largest generator norm) used when
/// orthonormalizing a custom generating set.
pub const GRAM_SCHMIDT_DROP_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceKind {
    Full,
    Pattern,
    Toeplitz,
    ToeplitzPattern,
    Companion,
    Custom,
}

impl std::fmt::Display for SubspaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Full => "full",
            Self::Pattern => "pattern",
            Self::Toeplitz => "toeplitz",
            Self::ToeplitzPattern => "toeplitz-pattern",
            Self::Companion => "companion",
            Self::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Position of the free coefficients in a companion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompanionForm {
    /// Coefficients `−a_{k−1}, …, −a_0` in the first row, ones on the subdiagonal.
    FirstRow,
    /// Transpose of [`CompanionForm::FirstRow`].
    FirstColumn,
    /// Ones on the superdiagonal, `−a_0, …, −a_{k−1}` in the last row
    /// (the "flipped" companion matrix).
    LastRow,
}

impl std::str::FromStr for CompanionForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-row" => Ok(Self::FirstRow),
            "first-column" => Ok(Self::FirstColumn),
            "last-row" | "flipped" => Ok(Self::LastRow),
            other => Err(Error::Parameter(format!("unknown companion form `{other}`"))),
        }
    }
}

impl CompanionForm {
    /// Matrix positions holding the coefficients, ordered `a_0, …, a_{n−1}`.
    pub fn coefficient_positions(self, n: usize) -> Vec<(usize, usize)> {
        (0..n)
            .map(|i| match self {
                Self::FirstRow => (0, n - 1 - i),
                Self::FirstColumn => (n - 1 - i, 0),
                Self::LastRow => (n - 1, i),
            })
            .collect()
    }
}

/// A basis matrix stored by its nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    entries: Vec<(usize, usize, C64)>,
}

impl BasisMatrix {
    fn unit(i: usize, j: usize) -> Self {
        Self {
            entries: vec![(i, j, c64(1.0, 0.0))],
        }
    }

    fn from_dense(x: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for j in 0..x.ncols() {
            for i in 0..x.nrows() {
                if x[(i, j)] != c64(0.0, 0.0) {
                    entries.push((i, j, x[(i, j)]));
                }
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn to_dense(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for &(i, j, c) in &self.entries {
            m[(i, j)] += c;
        }
        m
    }

    /// `⟨X, P⟩ = Σ conj(P_ij) X_ij`.
    pub fn inner_with(&self, x: &CMatrix) -> C64 {
        self.entries.iter().map(|&(i, j, c)| c.conj() * x[(i, j)]).sum()
    }
}

/// Complex-linear subspace `S ⊆ C^{n×n}` with orthonormal basis `P^(1..p)`.
#[derive(Debug, Clone)]
pub struct StructureSubspace {
    n: usize,
    kind: SubspaceKind,
    basis: Vec<BasisMatrix>,
}

impl StructureSubspace {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Subspace dimension `p`.
    pub fn dim(&self) -> usize {
        if self.is_full() {
            self.n * self.n
        } else {
            self.basis.len()
        }
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn is_full(&self) -> bool {
        self.kind == SubspaceKind::Full
    }

    /// Basis elements; empty for the full space.
    pub fn basis(&self) -> &[BasisMatrix] {
        &self.basis
    }

    /// The `n²×p` matrix `[vec P^(1) … vec P^(p)]` (column-major `vec`).
    /// For the full space this is the identity; avoid it in hot paths.
    pub fn basis_matrix(&self) -> CMatrix {
        let n2 = self.n * self.n;
        if self.is_full() {
            return CMatrix::identity(n2, n2);
        }
        let mut m = CMatrix::zeros(n2, self.basis.len());
        for (k, b) in self.basis.iter().enumerate() {
            for &(i, j, c) in b.entries() {
                m[(i + j * self.n, k)] += c;
            }
        }
        m
    }

    fn check_shape(&self, x: &CMatrix) -> Result<()> {
        if x.shape() != (self.n, self.n) {
            return Err(Error::Dimension(format!(
                "expected {}x{} matrix, got {:?}",
                self.n,
                self.n,
                x.shape()
            )));
        }
        Ok(())
    }

    /// Coordinates `δ = P* vec X` of the projection of `X`.
    pub fn coordinates(&self, x: &CMatrix) -> Result<CVector> {
        self.check_shape(x)?;
        if self.is_full() {
            return Ok(CVector::from_column_slice(x.as_slice()));
        }
        Ok(CVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|b| b.inner_with(x)),
        ))
    }

    /// `Σ δ_j P^(j)`.
    pub fn combine(&self, delta: &CVector) -> Result<CMatrix> {
        if delta.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "coefficient vector has length {}, subspace dimension is {}",
                delta.len(),
                self.dim()
            )));
        }
        if self.is_full() {
            return Ok(CMatrix::from_column_slice(self.n, self.n, delta.as_slice()));
        }
        let mut m = CMatrix::zeros(self.n, self.n);
        for (b, &d) in self.basis.iter().zip(delta.iter()) {
            for &(i, j, c) in b.entries() {
                m[(i, j)] += c * d;
            }
        }
        Ok(m)
    }

    /// Orthogonal projection onto `S` in the Frobenius inner product.
    pub fn project(&self, x: &CMatrix) -> Result<CMatrix> {
        if self.is_full() {
            self.check_shape(x)?;
            return Ok(x.clone());
        }
        self.combine(&self.coordinates(x)?)
    }

    /// Split `A = A_S + A_⊥` for the constraint `A + Δ ∈ S`.
    pub fn shift_for_affine_target(&self, a: &CMatrix) -> Result<AffineShift> {
        let a_s = self.project(a)?;
        let a_perp = a - &a_s;
        let offset_norm_sq = a_perp.norm_squared();
        Ok(AffineShift {
            a_s,
            a_perp,
            offset_norm_sq,
        })
    }
}

/// Result of [`StructureSubspace::shift_for_affine_target`].
#[derive(Debug, Clone)]
pub struct AffineShift {
    pub a_s: CMatrix,
    pub a_perp: CMatrix,
    pub offset_norm_sq: f64,
}

pub fn full_space(n: usize) -> Result<StructureSubspace> {
    if n < 2 {
        return Err(Error::Dimension(format!("full space needs n ≥ 2, got {n}")));
    }
    Ok(StructureSubspace {
        n,
        kind: SubspaceKind::Full,
        basis: Vec::new(),
    })
}

fn check_mask(mask: &[Vec<bool>]) -> Result<usize> {
    let n = mask.len();
    if n == 0 || mask.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension("mask must be square and nonempty".into()));
    }
    if !mask.iter().flatten().any(|&b| b) {
        return Err(Error::Dimension("mask has no true entries".into()));
    }
    Ok(n)
}

/// Matrices supported on the `true` positions of `mask` (row-major rows).
pub fn pattern_space(mask: &[Vec<bool>]) -> Result<StructureSubspace> {
    let n = check_mask(mask)?;
    let mut basis = Vec::new();
    // column-major order, matching vec()
    for j in 0..n {
        for (i, row) in mask.iter().enumerate() {
            if row[j] {
                basis.push(BasisMatrix::unit(i, j));
            }
        }
    }
    Ok(StructureSubspace {
        n,
        kind: SubspaceKind::Pattern,
        basis,
    })
}

/// Nonzero pattern of `a` as a mask.
pub fn nonzero_mask(a: &CMatrix) -> Vec<Vec<bool>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] != c64(0.0, 0.0)).collect())
        .collect()
}

fn diagonal_element(n: usize, offset: isize) -> BasisMatrix {
    let len = n - offset.unsigned_abs();
    let w = c64(1.0 / (len as f64).sqrt(), 0.0);
    let entries = (0..len)
        .map(|k| {
            if offset >= 0 {
                (k, k + offset as usize, w)
            } else {
                (k + offset.unsigned_abs(), k, w)
            }
        })
        .collect();
    BasisMatrix { entries }
}

/// Toeplitz matrices; one normalized basis element per diagonal, ordered
/// from the lowest subdiagonal up to the last superdiagonal.
pub fn toeplitz_space(n: usize) -> Result<StructureSubspace> {
    if n < 2 {
        return Err(Error::Dimension(format!("toeplitz space needs n ≥ 2, got {n}")));
    }
    let m = n as isize;
    let basis = (-(m - 1)..m).map(|d| diagonal_element(n, d)).collect();
    Ok(StructureSubspace {
        n,
        kind: SubspaceKind::Toeplitz,
        basis,
    })
}

/// Toeplitz matrices supported on a union of whole diagonals.
pub fn toeplitz_pattern_space(mask: &[Vec<bool>]) -> Result<StructureSubspace> {
    let n = check_mask(mask)?;
    let m = n as isize;
    let mut basis = Vec::new();
    for d in -(m - 1)..m {
        let cells: Vec<bool> = (0..n)
            .filter_map(|i| {
                let j = i as isize + d;
                (0..m).contains(&j).then(|| mask[i][j as usize])
            })
            .collect();
        let on = cells.iter().filter(|&&b| b).count();
        if on == 0 {
            continue;
        }
        if on != cells.len() {
            return Err(Error::Structure(format!(
                "diagonal {d} is only partially covered by the mask"
            )));
        }
        basis.push(diagonal_element(n, d));
    }
    Ok(StructureSubspace {
        n,
        kind: SubspaceKind::ToeplitzPattern,
        basis,
    })
}

/// Perturbations of the coefficient positions of an `n×n` companion matrix,
/// ordered `a_0, …, a_{n−1}`.
pub fn companion_space(n: usize, form: CompanionForm) -> Result<StructureSubspace> {
    if n < 2 {
        return Err(Error::Dimension(format!("companion space needs n ≥ 2, got {n}")));
    }
    let mut positions = form.coefficient_positions(n);
    // column-major order of vec()
    positions.sort_by_key(|&(i, j)| (j, i));
    let basis = positions
        .into_iter()
        .map(|(i, j)| BasisMatrix::unit(i, j))
        .collect();
    Ok(StructureSubspace {
        n,
        kind: SubspaceKind::Companion,
        basis,
    })
}

/// Span of arbitrary generators, orthonormalized by modified Gram–Schmidt
/// (with one reorthogonalization pass) in the Frobenius inner product.
pub fn custom_space(generators: &[CMatrix]) -> Result<StructureSubspace> {
    let first = generators
        .first()
        .ok_or_else(|| Error::Dimension("no generators given".into()))?;
    let n = first.nrows();
    for g in generators {
        ensure_finite(g, "generator")?;
        if g.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "generators must all be {n}x{n}, got {:?}",
                g.shape()
            )));
        }
    }
    let max_norm = generators.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let drop = GRAM_SCHMIDT_DROP_RTOL * max_norm;
    let mut ortho: Vec<CMatrix> = Vec::new();
    for g in generators {
        let mut w = g.clone();
        for _ in 0..2 {
            for q in &ortho {
                let coeff: C64 = q.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
                w -= q * coeff;
            }
        }
        let norm = w.norm();
        if norm > drop && norm > 0.0 {
            ortho.push(w / c64(norm, 0.0));
        }
    }
    if ortho.is_empty() {
        return Err(Error::Dimension("all generators are numerically zero".into()));
    }
    Ok(StructureSubspace {
        n,
        kind: SubspaceKind::Custom,
        basis: ortho.iter().map(BasisMatrix::from_dense).collect(),
    })
}

#[derive(Deserialize)]
struct CustomBasisFile {
    n: usize,
    generators: Vec<Vec<[f64; 2]>>,
}

/// Parse `{ "n": …, "generators": [[[re, im], …], …] }` with each generator
/// given as `n²` row-major entries.
pub fn custom_space_from_json(text: &str) -> Result<StructureSubspace> {
    let file: CustomBasisFile = serde_json::from_str(text)?;
    let n = file.n;
    let mut gens = Vec::with_capacity(file.generators.len());
    for (k, g) in file.generators.iter().enumerate() {
        if g.len() != n * n {
            return Err(Error::Dimension(format!(
                "generator {k} has {} entries, expected {}",
                g.len(),
                n * n
            )));
        }
        gens.push(CMatrix::from_fn(n, n, |i, j| {
            let [re, im] = g[i * n + j];
            c64(re, im)
        }));
    }
    custom_space(&gens)
}
