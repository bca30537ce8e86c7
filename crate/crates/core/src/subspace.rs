//! Euclidean subspace geometry: spans, projections, the Kuo distance, the
//! elimination bases used in Kuo's projection formula, the one-sided gap
//! between subspaces and principal angles.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{axpy, columns, dot, norm, scaled};

/// Relative tolerance for rank decisions in [`orthonormalize`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Principal angles at or below this value count as a shared direction.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-7;
/// [`elimination_basis`] refuses frames whose Kuo distance falls below this
/// fraction of the largest vector norm.
pub const ELIMINATION_KAPPA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubspaceError {
    #[error("empty frame")]
    EmptyFrame,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite vector entry")]
    NonFinite,
    #[error("frame is rank deficient (kappa = {kappa:e}, threshold {threshold:e})")]
    RankDeficient { kappa: f64, threshold: f64 },
    #[error("elimination basis vector {index} is zero")]
    ZeroBasisVector { index: usize },
    #[error("gap needs dim(l) <= dim(w), got {l} > {w}")]
    GapDimension { l: usize, w: usize },
    #[error("gap of the zero subspace is undefined")]
    EmptySubspace,
}

/// An ordered, possibly dependent list of vectors in `R^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    vectors: Vec<Vec<f64>>,
    dim_ambient: usize,
}

impl Frame {
    pub fn new(vectors: Vec<Vec<f64>>, dim_ambient: usize) -> Result<Self, SubspaceError> {
        for v in &vectors {
            if v.len() != dim_ambient {
                return Err(SubspaceError::DimensionMismatch {
                    expected: dim_ambient,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(SubspaceError::NonFinite);
            }
        }
        Ok(Frame {
            vectors,
            dim_ambient,
        })
    }

    /// Infers the ambient dimension from the first vector.
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self, SubspaceError> {
        let m = vectors.first().ok_or(SubspaceError::EmptyFrame)?.len();
        Self::new(vectors, m)
    }

    pub fn empty(dim_ambient: usize) -> Self {
        Frame {
            vectors: Vec::new(),
            dim_ambient,
        }
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn max_norm(&self) -> f64 {
        self.vectors.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    /// All vectors except index `i`, in a canonical (sorted) order so that the
    /// result depends only on the multiset of remaining vectors.
    fn others_canonical(&self, i: usize) -> Vec<&[f64]> {
        let mut others: Vec<&[f64]> = self
            .vectors
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, v)| v.as_slice())
            .collect();
        others.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        others
    }
}

/// A subspace of `R^m` stored by an orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    basis: Vec<Vec<f64>>,
    dim_ambient: usize,
}

impl Subspace {
    pub fn zero(dim_ambient: usize) -> Self {
        Subspace {
            basis: Vec::new(),
            dim_ambient,
        }
    }

    pub fn full(dim_ambient: usize) -> Self {
        Subspace {
            basis: (0..dim_ambient).map(|i| unit(dim_ambient, i)).collect(),
            dim_ambient,
        }
    }

    /// Span of arbitrary vectors with the default rank tolerance.
    pub fn span(vectors: Vec<Vec<f64>>, dim_ambient: usize) -> Result<Self, SubspaceError> {
        let fr = Frame::new(vectors, dim_ambient)?;
        if fr.is_empty() {
            return Ok(Subspace::zero(dim_ambient));
        }
        orthonormalize(&fr, DEFAULT_RANK_TOL)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_ambient];
        for b in &self.basis {
            axpy(dot(v, b), b, &mut out);
        }
        out
    }

    /// `v` minus its projection; two Gram-Schmidt passes.
    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        residual_against(v, self.basis.iter().map(Vec::as_slice))
    }

    pub fn distance(&self, v: &[f64]) -> f64 {
        norm(&self.residual(v))
    }

    /// Orthogonal complement in `R^m`.
    pub fn complement(&self) -> Subspace {
        let m = self.dim_ambient;
        let mut basis = self.basis.clone();
        let mut out = Vec::new();
        let mut remaining: Vec<usize> = (0..m).collect();
        while basis.len() < m && !remaining.is_empty() {
            // Greedy: take the axis with the largest residual.
            let (pos, res) = remaining
                .iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let e = unit(m, i);
                    (pos, residual_against(&e, basis.iter().map(Vec::as_slice)))
                })
                .max_by(|a, b| norm(&a.1).total_cmp(&norm(&b.1)))
                .expect("non-empty");
            remaining.swap_remove(pos);
            let n = norm(&res);
            if n <= 1e-8 {
                break;
            }
            let u = scaled(&res, 1.0 / n);
            basis.push(u.clone());
            out.push(u);
        }
        Subspace {
            basis: out,
            dim_ambient: m,
        }
    }

    /// `self + other` with the default rank tolerance.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.dim_ambient, other.dim_ambient);
        let mut vectors = self.basis.clone();
        vectors.extend(other.basis.iter().cloned());
        if vectors.is_empty() {
            return Subspace::zero(self.dim_ambient);
        }
        let fr = Frame::new(vectors, self.dim_ambient).expect("finite orthonormal vectors");
        orthonormalize(&fr, DEFAULT_RANK_TOL).expect("non-empty frame")
    }

    /// Orthogonal projector as a dense row-major matrix.
    pub fn projector(&self) -> Vec<Vec<f64>> {
        let m = self.dim_ambient;
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| self.basis.iter().map(|b| b[i] * b[j]).sum())
                    .collect()
            })
            .collect()
    }
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    e
}

fn residual_against<'a>(v: &[f64], basis: impl Iterator<Item = &'a [f64]> + Clone) -> Vec<f64> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis.clone() {
            let c = dot(&w, b);
            axpy(-c, b, &mut w);
        }
    }
    w
}

fn gram_schmidt<'a>(vectors: impl Iterator<Item = &'a [f64]>, drop_below: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let w = residual_against(v, basis.iter().map(Vec::as_slice));
        let n = norm(&w);
        if n > drop_below {
            basis.push(scaled(&w, 1.0 / n));
        }
    }
    basis
}

/// Orthonormal basis of `span(fr)`. Vectors whose residual is at most
/// `tol * max_norm` are dropped.
pub fn orthonormalize(fr: &Frame, tol: f64) -> Result<Subspace, SubspaceError> {
    assert!(tol > 0.0, "rank tolerance must be positive");
    if fr.is_empty() {
        return Err(SubspaceError::EmptyFrame);
    }
    let basis = gram_schmidt(fr.vectors.iter().map(Vec::as_slice), tol * fr.max_norm());
    Ok(Subspace {
        basis,
        dim_ambient: fr.dim_ambient,
    })
}

fn check_len(v: &[f64], m: usize) -> Result<(), SubspaceError> {
    if v.len() != m {
        return Err(SubspaceError::DimensionMismatch {
            expected: m,
            got: v.len(),
        });
    }
    Ok(())
}

fn residual_to_vectors(v: &[f64], others: &[&[f64]]) -> Vec<f64> {
    let max = others.iter().map(|o| norm(o)).fold(0.0, f64::max);
    let basis = gram_schmidt(others.iter().copied(), DEFAULT_RANK_TOL * max);
    residual_against(v, basis.iter().map(Vec::as_slice))
}

/// Euclidean distance from `v` to `span(fr)`; `|v|` when the span is `{0}`.
pub fn dist_to_span(v: &[f64], fr: &Frame) -> Result<f64, SubspaceError> {
    check_len(v, fr.dim_ambient)?;
    let refs: Vec<&[f64]> = fr.vectors.iter().map(Vec::as_slice).collect();
    Ok(norm(&residual_to_vectors(v, &refs)))
}

/// Kuo distance: the minimum over `i` of the distance from `v_i` to the span
/// of the other vectors. For a single vector this is its norm.
///
/// The other vectors are put in a canonical order before orthogonalization, so
/// the result is exactly invariant under permutations of the frame.
pub fn kuo_distance(fr: &Frame) -> f64 {
    (0..fr.len())
        .map(|i| {
            norm(&residual_to_vectors(
                &fr.vectors[i],
                &fr.others_canonical(i),
            ))
        })
        .fold(f64::INFINITY, f64::min)
}

/// `N_j = v_j - proj(v_j onto span{v_k : k != j})` for each `j`.
pub fn elimination_basis(fr: &Frame) -> Result<Frame, SubspaceError> {
    if fr.is_empty() {
        return Err(SubspaceError::EmptyFrame);
    }
    let nbasis: Vec<Vec<f64>> = (0..fr.len())
        .map(|i| residual_to_vectors(&fr.vectors[i], &fr.others_canonical(i)))
        .collect();
    let kappa = nbasis.iter().map(|n| norm(n)).fold(f64::INFINITY, f64::min);
    let threshold = ELIMINATION_KAPPA_TOL * fr.max_norm();
    if kappa.is_nan() || kappa <= threshold {
        return Err(SubspaceError::RankDeficient { kappa, threshold });
    }
    Frame::new(nbasis, fr.dim_ambient)
}

/// Kuo's projection formula `sum_j <x, v_j> N_j / |N_j|^2`; equals the
/// orthogonal projection of `x` onto `span(fr)` when `nbasis` is the
/// elimination basis of `fr`.
pub fn kuo_projection(x: &[f64], fr: &Frame, nbasis: &Frame) -> Result<Vec<f64>, SubspaceError> {
    check_len(x, fr.dim_ambient)?;
    if nbasis.len() != fr.len() {
        return Err(SubspaceError::DimensionMismatch {
            expected: fr.len(),
            got: nbasis.len(),
        });
    }
    if nbasis.dim_ambient != fr.dim_ambient {
        return Err(SubspaceError::DimensionMismatch {
            expected: fr.dim_ambient,
            got: nbasis.dim_ambient,
        });
    }
    let mut out = vec![0.0; fr.dim_ambient];
    for (j, (v, n)) in fr.vectors.iter().zip(&nbasis.vectors).enumerate() {
        let n2 = dot(n, n);
        if n2 == 0.0 {
            return Err(SubspaceError::ZeroBasisVector { index: j });
        }
        axpy(dot(x, v) / n2, n, &mut out);
    }
    Ok(out)
}

/// Result of [`gap`]: the largest distance from a unit vector of `l` to `w`
/// and a unit vector of `l` attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub gap: f64,
    pub attaining_vector: Vec<f64>,
}

/// One-sided gap `max_{v in l, |v| = 1} d(v, w)`, zero iff `l ⊂ w`.
///
/// Computed as the largest singular value of `(I - P_w) L`, i.e. the sine of
/// the largest principal angle between `l` and `w`.
pub fn gap(l: &Subspace, w: &Subspace) -> Result<GapResult, SubspaceError> {
    if l.dim_ambient != w.dim_ambient {
        return Err(SubspaceError::DimensionMismatch {
            expected: l.dim_ambient,
            got: w.dim_ambient,
        });
    }
    if l.dim() > w.dim() {
        return Err(SubspaceError::GapDimension {
            l: l.dim(),
            w: w.dim(),
        });
    }
    if l.dim() == 0 {
        return Err(SubspaceError::EmptySubspace);
    }
    let m = l.dim_ambient;
    let residuals: Vec<Vec<f64>> = l.basis.iter().map(|b| w.residual(b)).collect();
    let r = columns(&residuals, m);
    let svd = SVD::new(r, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("dim(l) >= 1");
    let mut attaining = vec![0.0; m];
    for (k, b) in l.basis.iter().enumerate() {
        axpy(v_t[(idx, k)], b, &mut attaining);
    }
    let n = norm(&attaining);
    Ok(GapResult {
        gap: s.min(1.0),
        attaining_vector: scaled(&attaining, 1.0 / n),
    })
}

/// Principal angles in `[0, pi/2]`, ascending, `min(dim a, dim b)` of them.
///
/// Cosines come from the singular values of `A^T B` and sines from those of
/// `(I - P_B) A` (with `A` the smaller subspace); each angle is recovered with
/// `atan2` so both small and large angles keep full precision.
pub fn principal_angles(a: &Subspace, b: &Subspace) -> Result<Vec<f64>, SubspaceError> {
    if a.dim_ambient != b.dim_ambient {
        return Err(SubspaceError::DimensionMismatch {
            expected: a.dim_ambient,
            got: b.dim_ambient,
        });
    }
    let (small, large) = if a.dim() <= b.dim() { (a, b) } else { (b, a) };
    let k = small.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    let m = a.dim_ambient;
    let cross =
        nalgebra::DMatrix::from_fn(k, large.dim(), |i, j| dot(&small.basis[i], &large.basis[j]));
    let mut cosines: Vec<f64> = if large.dim() == 0 {
        vec![0.0; k]
    } else {
        SVD::new(cross, false, false)
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    let residuals: Vec<Vec<f64>> = small.basis.iter().map(|v| large.residual(v)).collect();
    let mut sines: Vec<f64> = SVD::new(columns(&residuals, m), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    cosines.sort_by(|x, y| y.total_cmp(x));
    sines.sort_by(f64::total_cmp);
    Ok(cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            s.max(0.0)
                .atan2(c.max(0.0))
                .clamp(0.0, std::f64::consts::FRAC_PI_2)
        })
        .collect())
}

/// Number of principal angles at or below `angle_tol`: the numerical
/// dimension of `a ∩ b`.
pub fn intersection_dim(
    a: &Subspace,
    b: &Subspace,
    angle_tol: f64,
) -> Result<usize, SubspaceError> {
    Ok(principal_angles(a, b)?
        .iter()
        .filter(|&&t| t <= angle_tol)
        .count())
}
