//! Symplectic spectra, the PPT entanglement test, and Gaussian entropies.
//!
//! The symplectic eigenvalues of a covariance matrix `gamma` are the moduli
//! of the eigenvalues of `i O gamma` (equivalently of `O gamma`), which come
//! in degenerate pairs; a physical state has all of them >= 1. A symplectic
//! eigenvalue of a *partially transposed* matrix below 1 certifies
//! entanglement across the transposed cut.

use nalgebra::linalg::Schur;

use crate::cm::{symplectic_form, CovarianceMatrix, PHYSICALITY_TOL};
use crate::error::{Error, Result};

/// Relative tolerance when collapsing the doubly degenerate eigenvalue
/// moduli of `O gamma` into one entry per mode.
pub const PAIR_COLLAPSE_REL_TOL: f64 = 1e-8;

/// Iteration cap for the Schur decomposition used by the generic routine.
const SCHUR_MAX_ITER: usize = 100_000;

/// Sorted (ascending) symplectic eigenvalues of a state, one per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl CovarianceMatrix {
    /// Symplectic eigenvalues via a general eigen-solver: the moduli of the
    /// eigenvalues of `O gamma`, with each degenerate pair collapsed to a
    /// single entry, sorted ascending.
    pub fn symplectic_spectrum(&self) -> Result<SymplecticSpectrum> {
        let omega = symplectic_form(self.n_modes());
        let m = &omega * self.entries();
        let dim = m.nrows();
        let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(|| {
            Error::EigenNonConvergence {
                dim,
                matrix: format!("{m:.6}"),
            }
        })?;
        let mut moduli: Vec<f64> = schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(f64::total_cmp);

        let mut values = Vec::with_capacity(self.n_modes());
        for pair in moduli.chunks_exact(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if hi - lo > PAIR_COLLAPSE_REL_TOL * hi.max(1.0) {
                return Err(Error::UnpairedSpectrum { lo, hi });
            }
            values.push(0.5 * (lo + hi));
        }
        Ok(SymplecticSpectrum { values })
    }

    /// Smallest symplectic eigenvalue of the partial transpose on `modes`.
    /// A value below 1 witnesses entanglement across the cut; >= 1 is the
    /// PPT separability indicator.
    pub fn min_pt_symplectic_eigenvalue(&self, modes: &[usize]) -> Result<f64> {
        Ok(self.partial_transpose(modes)?.symplectic_spectrum()?.min())
    }

    /// Whether every symplectic eigenvalue is >= 1 (up to [`PHYSICALITY_TOL`]).
    pub fn is_physical(&self) -> Result<bool> {
        Ok(self.symplectic_spectrum()?.min() >= 1.0 - PHYSICALITY_TOL)
    }
}

/// Negative-discriminant slack accepted (and clamped) by the closed forms.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

/// Closed-form symplectic eigenvalues of a two-mode matrix in the block form
/// `[[a I, c sz], [c sz, b I]]`:
///
/// `nu^2 = (D ± sqrt(D^2 - 4 d^2)) / 2` with `D = a^2 + b^2 - 2 c^2` and
/// `d = a b - c^2`. Returns `(nu1, nu2)` with `nu1 >= nu2`.
///
/// Discriminants within [`DISCRIMINANT_TOL`] of zero are clamped; larger
/// negatives indicate an inconsistent matrix and are an error.
pub fn symplectic_eigenvalues_two_mode(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    if a <= 0.0 {
        return Err(Error::Domain {
            op: "symplectic_eigenvalues_two_mode",
            name: "a",
            value: a,
            requirement: "a > 0",
        });
    }
    if b <= 0.0 {
        return Err(Error::Domain {
            op: "symplectic_eigenvalues_two_mode",
            name: "b",
            value: b,
            requirement: "b > 0",
        });
    }
    let delta = a * a + b * b - 2.0 * c * c;
    let det = a * b - c * c;
    let disc = delta * delta - 4.0 * det * det;
    let disc = if disc < 0.0 {
        if disc < -DISCRIMINANT_TOL {
            return Err(Error::Domain {
                op: "symplectic_eigenvalues_two_mode",
                name: "Delta^2 - 4 D^2",
                value: disc,
                requirement: "discriminant >= -1e-12",
            });
        }
        0.0
    } else {
        disc
    };
    let root = disc.sqrt();
    let nu1 = (0.5 * (delta + root)).max(0.0).sqrt();
    let nu2 = (0.5 * (delta - root)).max(0.0).sqrt();
    Ok((nu1, nu2))
}

/// Symplectic eigenvalue of the one-mode state left after a homodyne
/// measurement of the first mode: `nu3 = sqrt(b (b - c^2 / a))`.
pub fn conditional_eigenvalue_nu3(a: f64, b: f64, c: f64) -> Result<f64> {
    if a <= 0.0 {
        return Err(Error::Domain {
            op: "conditional_eigenvalue_nu3",
            name: "a",
            value: a,
            requirement: "a > 0",
        });
    }
    let cond = b - c * c / a;
    if cond < -DISCRIMINANT_TOL {
        return Err(Error::Domain {
            op: "conditional_eigenvalue_nu3",
            name: "b - c^2/a",
            value: cond,
            requirement: "conditional variance >= 0",
        });
    }
    Ok((b * cond.max(0.0)).sqrt())
}

/// Logarithmic negativity from the smallest PT symplectic eigenvalue:
/// `max(0, -log2(nu_min))`, in ebits.
pub fn log_negativity(nu_min: f64) -> Result<f64> {
    if nu_min <= 0.0 {
        return Err(Error::Domain {
            op: "log_negativity",
            name: "nu_min",
            value: nu_min,
            requirement: "nu_min > 0",
        });
    }
    Ok((-nu_min.log2()).max(0.0))
}

/// Von Neumann entropy contribution of one symplectic eigenvalue:
///
/// `G(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2)`,
///
/// extended by continuity with `G(1) = 0`. Inputs within 1e-9 below 1 are
/// clamped to 1; anything lower is a domain error.
pub fn entropy_g(x: f64) -> Result<f64> {
    if x < 1.0 - PHYSICALITY_TOL {
        return Err(Error::Domain {
            op: "entropy_g",
            name: "x",
            value: x,
            requirement: "x >= 1 - 1e-9",
        });
    }
    let x = x.max(1.0);
    if x == 1.0 {
        return Ok(0.0);
    }
    let hi = 0.5 * (x + 1.0);
    let lo = 0.5 * (x - 1.0);
    Ok(hi * hi.log2() - lo * lo.log2())
}
