//! Separability engineering of the three-mode state: closed-form extremal
//! eigenvalues under partial transposition, the displacement bound that
//! keeps the transmitted ancilla separable, and PPT certification of all
//! three bipartitions.

use crate::cm::{CovarianceMatrix, PHYSICALITY_TOL};
use crate::error::{Error, Result};
use crate::protocol;
use crate::spectrum::log_negativity;

/// One of the three bipartitions of a three-mode state, labeled by the
/// single mode that is split off (and partially transposed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    /// First mode against the rest.
    AVsBc,
    /// Second mode against the rest.
    BVsAc,
    /// Third mode against the rest.
    CVsAb,
}

impl Cut {
    pub const ALL: [Cut; 3] = [Cut::AVsBc, Cut::BVsAc, Cut::CVsAb];

    /// The mode index partial transposition acts on.
    pub fn pt_mode(&self) -> usize {
        match self {
            Cut::AVsBc => 0,
            Cut::BVsAc => 1,
            Cut::CVsAb => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Cut::AVsBc => "A|BC",
            Cut::BVsAc => "B|AC",
            Cut::CVsAb => "C|AB",
        }
    }
}

impl std::fmt::Display for Cut {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// PPT verdict for one bipartition of a three-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartitionReport {
    pub cut: Cut,
    /// Smallest symplectic eigenvalue of the partial transpose across the cut.
    pub nu_min: f64,
    /// `nu_min >= 1` up to the physicality slack; implies separability for
    /// one-mode-versus-rest cuts of Gaussian states.
    pub is_ppt: bool,
    /// `max(0, -log2(nu_min))`, in ebits.
    pub log_negativity: f64,
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

/// Closed form for the smallest symplectic eigenvalue of the displaced
/// three-mode state partially transposed on the transmitted ancilla:
///
/// `( sqrt((1 + 6x + e^{-2 tau})^2 - 32 x^2) - (1 + 2x - e^{-2 tau}) ) / 2`.
///
/// Values >= 1 certify that the ancilla is PPT from the remaining pair.
pub fn nu_min_closed_form(tau: f64, x: f64) -> Result<f64> {
    require_nonnegative("nu_min_closed_form", "tau", tau)?;
    require_nonnegative("nu_min_closed_form", "x", x)?;
    let e = (-2.0 * tau).exp();
    let s = 1.0 + 6.0 * x + e;
    let radicand = s * s - 32.0 * x * x;
    if radicand < -1e-12 {
        return Err(Error::Domain {
            op: "nu_min_closed_form",
            name: "radicand",
            value: radicand,
            requirement: ">= 0 for tau, x >= 0",
        });
    }
    Ok(0.5 * (radicand.max(0.0).sqrt() - (1.0 + 2.0 * x - e)))
}

/// Closed form for the lowest eigenvalue associated with transposing the
/// retained mode instead:
///
/// `( 1 + 6x + e^{-2 tau} - sqrt((1 + 2x - e^{2 tau})^2 + 32 x^2) ) / 2`.
///
/// Reported as a diagnostic only: the expression goes negative at x = 0 for
/// any squeezing, so it cannot be a symplectic eigenvalue there, and this
/// crate's authoritative entanglement test for that cut is the generic PT
/// routine ([`CovarianceMatrix::min_pt_symplectic_eigenvalue`]).
pub fn kappa_min_closed_form(tau: f64, x: f64) -> Result<f64> {
    require_nonnegative("kappa_min_closed_form", "tau", tau)?;
    require_nonnegative("kappa_min_closed_form", "x", x)?;
    let em = (-2.0 * tau).exp();
    let ep = (2.0 * tau).exp();
    let t = 1.0 + 2.0 * x - ep;
    Ok(0.5 * (1.0 + 6.0 * x + em - (t * t + 32.0 * x * x).sqrt()))
}

/// Smallest displacement strength that makes the transmitted ancilla PPT
/// from the retained pair: `(e^{2 tau} - 1) / 2`.
pub fn separable_bound_x(tau: f64) -> f64 {
    0.5 * ((2.0 * tau).exp() - 1.0)
}

/// PPT verdict for each one-versus-rest bipartition of a three-mode state.
/// Partial transposition on the single mode of a cut suffices.
pub fn certify_bipartitions(gamma: &CovarianceMatrix) -> Result<Vec<BipartitionReport>> {
    if gamma.n_modes() != 3 {
        return Err(Error::BadShape {
            rows: gamma.entries().nrows(),
            cols: gamma.entries().ncols(),
        });
    }
    Cut::ALL
        .iter()
        .map(|&cut| {
            let nu_min = gamma.min_pt_symplectic_eigenvalue(&[cut.pt_mode()])?;
            Ok(BipartitionReport {
                cut,
                nu_min,
                is_ppt: nu_min >= 1.0 - PHYSICALITY_TOL,
                log_negativity: log_negativity(nu_min)?,
            })
        })
        .collect()
}

/// Run the full distribution pipeline and report what ends up shared
/// between the two distant parties: the smallest PT symplectic eigenvalue
/// of their reduced two-mode state and its logarithmic negativity.
pub fn distributed_entanglement(tau: f64, x: f64) -> Result<(f64, f64)> {
    let final_state = protocol::run_distribution(tau, x)?;
    let alice_bob = final_state.reduce(&[0, 1])?;
    let nu_ab = alice_bob.min_pt_symplectic_eigenvalue(&[1])?;
    Ok((nu_ab, log_negativity(nu_ab)?))
}
