//! Constructors for the Gaussian states and transforms used by the
//! protocol pipelines: squeezed vacua, two-mode squeezed states, beam
//! splitters, the lossy thermal channel, and the correlated-displacement
//! noise that keeps the transmitted ancilla separable.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::cm::{CovarianceMatrix, SymplecticTransform};
use crate::error::{Error, Result};

/// Squeezing direction of a single-mode squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqueezeAxis {
    /// Anti-squeezed position: `diag(e^{2 tau}, e^{-2 tau})`.
    Position,
    /// Anti-squeezed momentum: `diag(e^{-2 tau}, e^{2 tau})`.
    Momentum,
}

/// Vacuum state of `n_modes` modes (identity in shot-noise units).
pub fn vacuum_cm(n_modes: usize) -> CovarianceMatrix {
    assert!(n_modes >= 1, "need at least one mode");
    CovarianceMatrix::new(DMatrix::identity(2 * n_modes, 2 * n_modes))
        .expect("identity is a valid covariance matrix")
}

fn require_nonnegative(op: &'static str, name: &'static str, value: f64) -> Result<()> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::Domain {
            op,
            name,
            value,
            requirement: ">= 0",
        });
    }
    Ok(())
}

/// Single-mode squeezed vacuum with squeezing parameter `tau >= 0`.
pub fn squeezed_vacuum_cm(tau: f64, axis: SqueezeAxis) -> Result<CovarianceMatrix> {
    require_nonnegative("squeezed_vacuum_cm", "tau", tau)?;
    let (vx, vp) = match axis {
        SqueezeAxis::Position => ((2.0 * tau).exp(), (-2.0 * tau).exp()),
        SqueezeAxis::Momentum => ((-2.0 * tau).exp(), (2.0 * tau).exp()),
    };
    CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![vx, vp])))
}

/// Two-mode squeezed vacuum:
/// `[[cosh(2 tau) I, sinh(2 tau) sz], [sinh(2 tau) sz, cosh(2 tau) I]]`.
pub fn two_mode_squeezed_cm(tau: f64) -> Result<CovarianceMatrix> {
    require_nonnegative("two_mode_squeezed_cm", "tau", tau)?;
    let ch = (2.0 * tau).cosh();
    let sh = (2.0 * tau).sinh();
    CovarianceMatrix::new(DMatrix::from_row_slice(
        4,
        4,
        &[
            ch, 0.0, sh, 0.0, //
            0.0, ch, 0.0, -sh, //
            sh, 0.0, ch, 0.0, //
            0.0, -sh, 0.0, ch,
        ],
    ))
}

fn check_pair(n_modes: usize, i: usize, j: usize) -> Result<()> {
    for &m in &[i, j] {
        if m >= n_modes {
            return Err(Error::ModeOutOfRange {
                index: m,
                n_modes,
            });
        }
    }
    if i == j {
        return Err(Error::DuplicateMode { index: i });
    }
    Ok(())
}

fn embed_pair_blocks(
    n_modes: usize,
    i: usize,
    j: usize,
    bii: f64,
    bij: f64,
    bji: f64,
    bjj: f64,
) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for q in 0..2 {
        s[(2 * i + q, 2 * i + q)] = bii;
        s[(2 * i + q, 2 * j + q)] = bij;
        s[(2 * j + q, 2 * i + q)] = bji;
        s[(2 * j + q, 2 * j + q)] = bjj;
    }
    s
}

/// Beam splitter of transmittance `eta` on modes `(mode_i, mode_j)`,
/// identity elsewhere. Block convention on the pair:
///
/// `[[sqrt(eta) I, sqrt(1-eta) I], [-sqrt(1-eta) I, sqrt(eta) I]]`.
pub fn beam_splitter(
    n_modes: usize,
    mode_i: usize,
    mode_j: usize,
    eta: f64,
) -> Result<SymplecticTransform> {
    check_pair(n_modes, mode_i, mode_j)?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain {
            op: "beam_splitter",
            name: "eta",
            value: eta,
            requirement: "0 <= eta <= 1",
        });
    }
    let t = eta.sqrt();
    let r = (1.0 - eta).sqrt();
    SymplecticTransform::new(embed_pair_blocks(n_modes, mode_i, mode_j, t, r, -r, t))
}

/// Balanced beam splitter traversed in reverse, with its output ports
/// relabeled so that the first mode of the pair carries the symmetric
/// `(in_i + in_j)/sqrt(2)` combination. This is the interference that
/// undoes an earlier balanced mixing and concentrates the correlations
/// on the retained port.
pub fn reversed_balanced_splitter(
    n_modes: usize,
    mode_i: usize,
    mode_j: usize,
) -> Result<SymplecticTransform> {
    check_pair(n_modes, mode_i, mode_j)?;
    let h = 0.5f64.sqrt();
    SymplecticTransform::new(embed_pair_blocks(n_modes, mode_i, mode_j, h, h, h, -h))
}

/// Single-mode squeezer `diag(e^r, e^{-r})` on `mode`, identity elsewhere.
pub fn squeezer(n_modes: usize, mode: usize, r: f64) -> Result<SymplecticTransform> {
    if mode >= n_modes {
        return Err(Error::ModeOutOfRange {
            index: mode,
            n_modes,
        });
    }
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    s[(2 * mode, 2 * mode)] = r.exp();
    s[(2 * mode + 1, 2 * mode + 1)] = (-r).exp();
    SymplecticTransform::new(s)
}

/// Single-mode phase rotation by `theta` on `mode`, identity elsewhere.
pub fn phase_rotation(n_modes: usize, mode: usize, theta: f64) -> Result<SymplecticTransform> {
    if mode >= n_modes {
        return Err(Error::ModeOutOfRange {
            index: mode,
            n_modes,
        });
    }
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let (sin, cos) = theta.sin_cos();
    s[(2 * mode, 2 * mode)] = cos;
    s[(2 * mode, 2 * mode + 1)] = sin;
    s[(2 * mode + 1, 2 * mode)] = -sin;
    s[(2 * mode + 1, 2 * mode + 1)] = cos;
    SymplecticTransform::new(s)
}

/// The generating vectors of the correlated displacement noise, in the
/// three-mode interleaved ordering (x_A, p_A, x_B, p_B, x_C, p_C).
pub const Q1: [f64; 6] = [0.0, 1.0, 0.0, -2.0, 0.0, 1.0];
pub const Q2: [f64; 6] = [1.0, 0.0, 2.0, 0.0, -1.0, 0.0];

/// The fixed rank-2 noise matrix `P = q1 q1^T + q2 q2^T` added (scaled by
/// the displacement strength `x`) to the three-mode state to smear the
/// entanglement with the transmitted ancilla. Positive semidefinite with
/// eigenvalues `{6, 6, 0, 0, 0, 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementMatrix {
    entries: DMatrix<f64>,
}

impl DisplacementMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn q1() -> DVector<f64> {
        DVector::from_row_slice(&Q1)
    }

    pub fn q2() -> DVector<f64> {
        DVector::from_row_slice(&Q2)
    }

    /// Rank of the matrix (two non-zero eigenvalues by construction).
    pub fn rank(&self) -> usize {
        2
    }
}

impl Default for DisplacementMatrix {
    fn default() -> Self {
        displacement_matrix_p()
    }
}

/// Build `P = q1 q1^T + q2 q2^T`.
pub fn displacement_matrix_p() -> DisplacementMatrix {
    let q1 = DisplacementMatrix::q1();
    let q2 = DisplacementMatrix::q2();
    let entries = &q1 * q1.transpose() + &q2 * q2.transpose();
    DisplacementMatrix { entries }
}

/// Add the correlated displacement noise `x P` to a three-mode state.
pub fn add_correlated_displacement(
    gamma: &CovarianceMatrix,
    x: f64,
) -> Result<CovarianceMatrix> {
    require_nonnegative("add_correlated_displacement", "x", x)?;
    if gamma.n_modes() != 3 {
        return Err(Error::BadShape {
            rows: gamma.entries().nrows(),
            cols: gamma.entries().ncols(),
        });
    }
    let p = displacement_matrix_p();
    CovarianceMatrix::new(gamma.entries() + x * p.entries())
}

/// Transmittance and environment thermal variance of a lossy channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    eta: f64,
    n0: f64,
}

impl ChannelParams {
    pub fn new(eta: f64, n0: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Param {
                name: "eta",
                value: eta,
                requirement: "0 < eta <= 1",
            });
        }
        if n0.is_nan() || n0 < 1.0 {
            return Err(Error::Param {
                name: "n0",
                value: n0,
                requirement: "n0 >= 1",
            });
        }
        Ok(Self { eta, n0 })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }
}

/// Send `target_mode` through a lossy thermal channel: adjoin an environment
/// mode of variance `n0`, mix it with the target on a beam splitter of
/// transmittance `eta`, and trace the environment out again.
///
/// The target's variance maps as `v -> eta v + (1 - eta) n0` and its
/// cross-correlations scale by `sqrt(eta)`; all other blocks are untouched.
pub fn lossy_thermal_channel(
    gamma: &CovarianceMatrix,
    channel: &ChannelParams,
    target_mode: usize,
) -> Result<CovarianceMatrix> {
    let n = gamma.n_modes();
    if target_mode >= n {
        return Err(Error::ModeOutOfRange {
            index: target_mode,
            n_modes: n,
        });
    }
    // adjoin the environment as mode n
    let dim = 2 * (n + 1);
    let mut ext = DMatrix::zeros(dim, dim);
    ext.view_mut((0, 0), (2 * n, 2 * n)).copy_from(gamma.entries());
    ext[(2 * n, 2 * n)] = channel.n0;
    ext[(2 * n + 1, 2 * n + 1)] = channel.n0;
    let extended = CovarianceMatrix::new(ext)?;

    let splitter = beam_splitter(n + 1, target_mode, n, channel.eta)?;
    let mixed = splitter.apply(&extended)?;
    mixed.reduce(&(0..n).collect::<Vec<_>>())
}

/// Draw `count` classical displacement vectors with covariance `x P`,
/// deterministically for a fixed `seed`.
///
/// Uses the rank-2 factorization of `P`: each sample is
/// `sqrt(x) (g1 q1 + g2 q2)` with independent standard normals `g1, g2`
/// (a full Cholesky does not exist since `x P` is singular).
pub fn sample_correlated_displacements(
    x: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<[f64; 6]>> {
    require_nonnegative("sample_correlated_displacements", "x", x)?;
    if count < 1 {
        return Err(Error::Param {
            name: "count",
            value: count as f64,
            requirement: "count >= 1",
        });
    }
    let scale = x.sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        let mut d = [0.0; 6];
        for k in 0..6 {
            d[k] = scale * (g1 * Q1[k] + g2 * Q2[k]);
        }
        samples.push(d);
    }
    Ok(samples)
}
