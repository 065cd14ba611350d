//! Covariance matrices and symplectic transforms for N-mode Gaussian states.
//!
//! Conventions used throughout the crate:
//!
//! * quadrature ordering is interleaved, `(x1, p1, x2, p2, ...)`;
//! * shot-noise units: the vacuum covariance matrix is the identity;
//! * a state transforms as `gamma -> S gamma S^T` under a symplectic `S`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance for the symmetry check on covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Tolerance for the `S O S^T = O` membership check on symplectic transforms.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Slack below 1 still accepted as physical (or PPT) for symplectic eigenvalues.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// The symplectic form for `n_modes` modes in interleaved ordering:
/// a direct sum of `[[0, 1], [-1, 0]]` blocks.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    assert!(n_modes >= 1, "need at least one mode");
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

fn check_even_square(m: &DMatrix<f64>) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows != cols || rows == 0 || rows % 2 != 0 {
        return Err(Error::BadShape { rows, cols });
    }
    Ok(rows / 2)
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let dev = (m[(i, j)] - m[(j, i)]).abs();
            if dev > SYMMETRY_TOL {
                return Err(Error::NotSymmetric {
                    i,
                    j,
                    dev,
                    tol: SYMMETRY_TOL,
                });
            }
        }
    }
    Ok(())
}

fn check_modes(modes: &[usize], n_modes: usize) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    for (k, &m) in modes.iter().enumerate() {
        if m >= n_modes {
            return Err(Error::ModeOutOfRange {
                index: m,
                n_modes,
            });
        }
        if modes[..k].contains(&m) {
            return Err(Error::DuplicateMode { index: m });
        }
    }
    Ok(())
}

/// Covariance matrix of an N-mode Gaussian state (second moments only;
/// all states handled by this crate have zero mean).
///
/// Construction checks shape and symmetry. The uncertainty relation is
/// deliberately not enforced here: partially transposed matrices violate
/// it by design. Use [`CovarianceMatrix::is_physical`] where physicality
/// matters.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n_modes = check_even_square(&entries)?;
        check_symmetric(&entries)?;
        Ok(Self { n_modes, entries })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    /// Entry accessor in raw quadrature indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Partial transpose on the listed modes: flips the sign of each listed
    /// mode's momentum row and column, `gamma -> L gamma L`.
    ///
    /// Involutive and symmetry-preserving; the result is generally not a
    /// physical state (that is the point of the PPT test).
    pub fn partial_transpose(&self, modes: &[usize]) -> Result<CovarianceMatrix> {
        check_modes(modes, self.n_modes)?;
        let dim = 2 * self.n_modes;
        let mut signs = vec![1.0; dim];
        for &m in modes {
            signs[2 * m + 1] = -1.0;
        }
        let mut out = self.entries.clone();
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] *= signs[i] * signs[j];
            }
        }
        Ok(CovarianceMatrix {
            n_modes: self.n_modes,
            entries: out,
        })
    }

    /// Sub-matrix of the kept modes, in the given order (marginal state).
    pub fn reduce(&self, keep: &[usize]) -> Result<CovarianceMatrix> {
        check_modes(keep, self.n_modes)?;
        let dim = 2 * keep.len();
        let mut out = DMatrix::zeros(dim, dim);
        for (r, &mr) in keep.iter().enumerate() {
            for (c, &mc) in keep.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        out[(2 * r + a, 2 * c + b)] = self.entries[(2 * mr + a, 2 * mc + b)];
                    }
                }
            }
        }
        Ok(CovarianceMatrix {
            n_modes: keep.len(),
            entries: out,
        })
    }

    /// Mode relabeling: output mode `k` is input mode `perm[k]`.
    /// `perm` must be a permutation of `0..n_modes`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<CovarianceMatrix> {
        if perm.len() != self.n_modes {
            return Err(Error::BadShape {
                rows: perm.len(),
                cols: self.n_modes,
            });
        }
        self.reduce(perm)
    }

    /// Extract `(a, b, c)` from a two-mode matrix of the standard block form
    /// `[[a I, c sz], [c sz, b I]]`, verifying the pattern holds.
    pub fn two_mode_blocks(&self) -> Result<TwoModeBlocks> {
        if self.n_modes != 2 {
            return Err(Error::BadShape {
                rows: self.entries.nrows(),
                cols: self.entries.ncols(),
            });
        }
        let g = &self.entries;
        let a = g[(0, 0)];
        let b = g[(2, 2)];
        let c = g[(0, 2)];
        let dev = [
            g[(1, 1)] - a,
            g[(3, 3)] - b,
            g[(1, 3)] + c,
            g[(0, 1)],
            g[(0, 3)],
            g[(1, 2)],
            g[(2, 3)],
        ]
        .iter()
        .fold(0.0f64, |acc, d| acc.max(d.abs()));
        if dev > BLOCK_FORM_TOL {
            return Err(Error::NotBlockForm { dev });
        }
        Ok(TwoModeBlocks { a, b, c })
    }
}

/// Tolerance on the block-form pattern check of [`CovarianceMatrix::two_mode_blocks`].
pub const BLOCK_FORM_TOL: f64 = 1e-8;

/// The `(a, b, c)` parameters of a two-mode covariance matrix
/// `[[a I, c sz], [c sz, b I]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeBlocks {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TwoModeBlocks {
    /// Assemble the covariance matrix this block triple describes.
    pub fn to_cm(self) -> CovarianceMatrix {
        let TwoModeBlocks { a, b, c } = self;
        let entries = DMatrix::from_row_slice(
            4,
            4,
            &[
                a, 0.0, c, 0.0, //
                0.0, a, 0.0, -c, //
                c, 0.0, b, 0.0, //
                0.0, -c, 0.0, b,
            ],
        );
        CovarianceMatrix {
            n_modes: 2,
            entries,
        }
    }
}

/// A real symplectic matrix acting on covariance matrices as `S gamma S^T`.
///
/// Construction verifies `S O S^T = O` to [`SYMPLECTIC_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    n_modes: usize,
    entries: DMatrix<f64>,
}

impl SymplecticTransform {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n_modes = check_even_square(&entries)?;
        let omega = symplectic_form(n_modes);
        let residual = &entries * &omega * entries.transpose() - &omega;
        let dev = residual.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if dev > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic {
                dev,
                tol: SYMPLECTIC_TOL,
            });
        }
        Ok(Self { n_modes, entries })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Conjugation action on a state: `gamma -> S gamma S^T`.
    pub fn apply(&self, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        if gamma.n_modes() != self.n_modes {
            return Err(Error::BadShape {
                rows: gamma.entries().nrows(),
                cols: self.entries.nrows(),
            });
        }
        let out = &self.entries * gamma.entries() * self.entries.transpose();
        CovarianceMatrix::new(out)
    }

    /// The inverse transform, `S^{-1} = -O S^T O`.
    pub fn inverse(&self) -> SymplecticTransform {
        let omega = symplectic_form(self.n_modes);
        let inv = -(&omega * self.entries.transpose() * &omega);
        SymplecticTransform {
            n_modes: self.n_modes,
            entries: inv,
        }
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &SymplecticTransform) -> Result<SymplecticTransform> {
        if self.n_modes != other.n_modes {
            return Err(Error::BadShape {
                rows: self.entries.nrows(),
                cols: other.entries.nrows(),
            });
        }
        SymplecticTransform::new(&self.entries * &other.entries)
    }
}
