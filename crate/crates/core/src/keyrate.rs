//! Secret-key rates for both protocol variants.
//!
//! The separable variant leaks nothing to an eavesdropper confined to the
//! channel (the transmitted ancilla is separable from the key-bearing pair),
//! so its rate is `xi * I_AB`. The traditional baseline pays the Holevo
//! bound: `xi * I_AB - chi_BE`.

use crate::cm::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::protocol::{
    self, Detection, MiPath, ProtocolParams, ResolvedParams, Variant,
};
use crate::spectrum::{
    conditional_eigenvalue_nu3, entropy_g, symplectic_eigenvalues_two_mode,
};

pub use crate::protocol::{distance_to_transmittance, transmittance_to_distance};

/// Equivalent noise referred to the receiver for the separable protocol:
///
/// `omega = (1 + (1 - eta) n0 + 4 x (2 - sqrt(eta))) / 2`.
///
/// At `x = 0` this is the equivalent noise of the protocol without the
/// displacement operation (the baseline curve in the noise-comparison
/// figure); the displacement contributes the `4 x (2 - sqrt(eta))` term.
pub fn equivalent_noise_omega(eta: f64, n0: f64, x: f64) -> f64 {
    0.5 * (1.0 + (1.0 - eta) * n0 + 4.0 * x * (2.0 - eta.sqrt()))
}

/// Signal-to-noise mutual information `I = log2((phi + 1) / omega)` in
/// bits per pulse. May be negative; rates are clamped downstream.
pub fn mutual_information_formula(phi: f64, omega: f64) -> Result<f64> {
    if phi.is_nan() || phi <= 0.0 {
        return Err(Error::Domain {
            op: "mutual_information_formula",
            name: "phi",
            value: phi,
            requirement: "phi > 0",
        });
    }
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain {
            op: "mutual_information_formula",
            name: "omega",
            value: omega,
            requirement: "omega > 0",
        });
    }
    Ok(((phi + 1.0) / omega).log2())
}

/// Mutual information of a two-mode Gaussian state in `(a, b, c)` block
/// form, for the given detection at the second mode:
///
/// * homodyne:   `I = (1/2) log2( b / (b - c^2/a) )`
/// * heterodyne: `I = log2( (b + 1) / (b - c^2/a + 1) )`
pub fn mutual_information_from_cm(
    gamma_ab: &CovarianceMatrix,
    detection: Detection,
) -> Result<f64> {
    let blocks = gamma_ab.two_mode_blocks()?;
    let cond = blocks.b - blocks.c * blocks.c / blocks.a;
    if cond <= 0.0 {
        return Err(Error::Domain {
            op: "mutual_information_from_cm",
            name: "b - c^2/a",
            value: cond,
            requirement: "conditional variance > 0",
        });
    }
    Ok(match detection {
        Detection::Homodyne => 0.5 * (blocks.b / cond).log2(),
        Detection::Heterodyne => ((blocks.b + 1.0) / (cond + 1.0)).log2(),
    })
}

/// Holevo bound on the eavesdropper's information about the receiver's data
/// for the entanglement-based baseline:
///
/// `chi = G(nu1) + G(nu2) - G(nu3)`, clamped below at zero, where
/// `(nu1, nu2)` is the symplectic spectrum of the two-mode state and
/// `nu3^2 = b (b - c^2/a)` is the conditional eigenvalue.
pub fn holevo_chi_be(gamma_ab: &CovarianceMatrix) -> Result<f64> {
    let blocks = gamma_ab.two_mode_blocks()?;
    let (nu1, nu2) = symplectic_eigenvalues_two_mode(blocks.a, blocks.b, blocks.c)?;
    let nu3 = conditional_eigenvalue_nu3(blocks.a, blocks.b, blocks.c)?;
    let chi = entropy_g(nu1)? + entropy_g(nu2)? - entropy_g(nu3)?;
    Ok(chi.max(0.0))
}

/// Repeaterless upper bound on the secret-key capacity of the pure-loss
/// channel: `-log2(1 - eta)`. Diverges as `eta -> 1`.
pub fn plob_bound(eta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::Domain {
            op: "plob_bound",
            name: "eta",
            value: eta,
            requirement: "0 <= eta < 1 (infinite at eta = 1)",
        });
    }
    Ok(-(1.0 - eta).log2())
}

/// One evaluated operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRatePoint {
    pub params: ResolvedParams,
    /// Mutual information actually used for the rate (per `params.mi_path`).
    pub i_ab: f64,
    /// Signal-to-noise-formula mutual information; absent for the
    /// traditional variant, which has no equivalent-noise description.
    pub i_ab_formula: Option<f64>,
    /// Conditional-variance mutual information of the reduced state.
    pub i_ab_cm: f64,
    /// Holevo leakage; identically zero for the separable variant.
    pub chi_be: f64,
    /// `xi * i_ab - chi_be`, before clamping.
    pub rate_raw: f64,
    /// `max(0, rate_raw)`.
    pub rate: f64,
    /// Equivalent noise at this point (`x = 0` for the traditional variant).
    pub omega: f64,
    /// Pure-loss upper bound at this transmittance (infinite at `eta = 1`).
    pub plob: f64,
}

/// Evaluate the key rate at one parameter point.
pub fn key_rate(params: &ProtocolParams) -> Result<KeyRatePoint> {
    key_rate_resolved(&params.resolve()?)
}

/// [`key_rate`] for already-validated parameters (sweep engines resolve
/// per grid point to keep `x = bound` tracking the swept squeezing).
pub fn key_rate_resolved(p: &ResolvedParams) -> Result<KeyRatePoint> {
    let plob = if p.eta < 1.0 {
        plob_bound(p.eta)?
    } else {
        f64::INFINITY
    };
    match p.variant {
        Variant::Separable => {
            let trace = protocol::run_separable_protocol(p)?;
            let omega = equivalent_noise_omega(p.eta, p.n0, p.x);
            let i_formula = mutual_information_formula(p.phi, omega)?;
            let i_cm = mutual_information_from_cm(&trace.alice_bob, p.detection)?;
            let i_ab = match p.mi_path {
                MiPath::Formula => i_formula,
                MiPath::FromCm => i_cm,
            };
            let rate_raw = p.xi * i_ab;
            Ok(KeyRatePoint {
                params: *p,
                i_ab,
                i_ab_formula: Some(i_formula),
                i_ab_cm: i_cm,
                chi_be: 0.0,
                rate_raw,
                rate: rate_raw.max(0.0),
                omega,
                plob,
            })
        }
        Variant::Traditional => {
            let gamma_ab = protocol::run_traditional_protocol(p)?;
            let i_cm = mutual_information_from_cm(&gamma_ab, p.detection)?;
            let chi = holevo_chi_be(&gamma_ab)?;
            let rate_raw = p.xi * i_cm - chi;
            Ok(KeyRatePoint {
                params: *p,
                i_ab: i_cm,
                i_ab_formula: None,
                i_ab_cm: i_cm,
                chi_be: chi,
                rate_raw,
                rate: rate_raw.max(0.0),
                omega: equivalent_noise_omega(p.eta, p.n0, 0.0),
                plob,
            })
        }
    }
}

/// How the equivalent noise tracks the modulation variance in
/// [`energy_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaScaling {
    /// Physical linkage: `V = phi`, `tau = arccosh(V)/2`, `x` at the
    /// separability bound, so the displacement noise grows with the signal.
    Linked,
    /// Control: hold omega fixed regardless of `phi`. The resulting rate
    /// grows like `log2(phi + 1)` and the check flags it as unbounded.
    Fixed(f64),
}

/// Outcome of the signal-energy boundedness check.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBoundReport {
    /// Raw separable-variant rate at each grid value of `phi`.
    pub rates: Vec<f64>,
    /// Relative change between the last two grid values.
    pub final_increment: f64,
    /// Whether the sequence has stopped growing (final increment < 1%).
    pub saturated: bool,
}

/// Relative-increment threshold below which the rate sequence counts as
/// saturated.
pub const SATURATION_THRESHOLD: f64 = 0.01;

/// Rate as a function of increasing modulation variance. With the physical
/// linkage the displacement noise scales with the signal and the rate
/// saturates; with a fixed omega it grows without bound, which the report
/// flags.
pub fn energy_bound_check(
    params: &ResolvedParams,
    phi_grid: &[f64],
    scaling: OmegaScaling,
) -> Result<EnergyBoundReport> {
    if phi_grid.len() < 3 {
        return Err(Error::Param {
            name: "phi_grid.len",
            value: phi_grid.len() as f64,
            requirement: "at least 3 grid points",
        });
    }
    if phi_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Param {
            name: "phi_grid",
            value: f64::NAN,
            requirement: "strictly ascending",
        });
    }
    let mut rates = Vec::with_capacity(phi_grid.len());
    for &phi in phi_grid {
        let omega = match scaling {
            OmegaScaling::Linked => {
                if phi < 1.0 {
                    return Err(Error::Domain {
                        op: "energy_bound_check",
                        name: "phi",
                        value: phi,
                        requirement: "phi >= 1 under the linked scaling (V = phi)",
                    });
                }
                let tau = phi.acosh() / 2.0;
                let x = crate::separability::separable_bound_x(tau);
                equivalent_noise_omega(params.eta, params.n0, x)
            }
            OmegaScaling::Fixed(w) => w,
        };
        rates.push(params.xi * mutual_information_formula(phi, omega)?);
    }
    let last = rates[rates.len() - 1];
    let prev = rates[rates.len() - 2];
    let final_increment = (last - prev).abs() / prev.abs().max(1e-12);
    Ok(EnergyBoundReport {
        saturated: final_increment < SATURATION_THRESHOLD,
        final_increment,
        rates,
    })
}

/// Convert input-referred excess noise `epsilon` to the environment thermal
/// variance used by the channel model: `n0 = 1 + eta epsilon / (1 - eta)`,
/// so the channel's added noise is `(1 - eta) + eta epsilon`. A convention
/// choice; both spellings appear in the literature.
pub fn excess_noise_to_n0(eta: f64, epsilon: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain {
            op: "excess_noise_to_n0",
            name: "eta",
            value: eta,
            requirement: "0 < eta < 1 (the added noise vanishes at eta = 1)",
        });
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::Domain {
            op: "excess_noise_to_n0",
            name: "epsilon",
            value: epsilon,
            requirement: ">= 0",
        });
    }
    Ok(1.0 + eta * epsilon / (1.0 - eta))
}

/// Bisect the raw-rate zero crossing in distance, to 0.01 km, scanning
/// `[0, l_max_km]`. Returns `None` when the raw rate does not change sign
/// on the interval.
pub fn zero_crossing_distance(base: &ResolvedParams, l_max_km: f64) -> Result<Option<f64>> {
    let rate_at = |l: f64| -> Result<f64> {
        let mut p = *base;
        p.eta = distance_to_transmittance(l);
        Ok(key_rate_resolved(&p)?.rate_raw)
    };
    let steps = 200;
    let mut lo = 0.0;
    let mut f_lo = rate_at(lo)?;
    if f_lo <= 0.0 {
        return Ok(Some(0.0));
    }
    let mut hi = None;
    for k in 1..=steps {
        let l = l_max_km * k as f64 / steps as f64;
        let f = rate_at(l)?;
        if f <= 0.0 {
            hi = Some(l);
            break;
        }
        lo = l;
        f_lo = f;
    }
    let _ = f_lo;
    let Some(mut hi) = hi else {
        return Ok(None);
    };
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
