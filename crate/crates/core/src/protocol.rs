//! The two state-evolution pipelines.
//!
//! *Entanglement distribution*: a two-mode squeezed pair is split between a
//! retained mode and a transmitted ancilla, correlated displacement noise
//! `x P` makes the ancilla separable from the rest, and interference with
//! the distant vacuum at the far end restores two-party entanglement while
//! the ancilla stays separable throughout.
//!
//! *Key distribution*: the same preparation, but the ancilla crosses a lossy
//! thermal channel before the final interference, and the reduced two-mode
//! state of the two parties feeds the key-rate computation.
//!
//! Mode layouts are stated per stage; the two pipelines keep the layouts of
//! the matrices they are checked against, so the displacement stage of the
//! key-distribution pipeline carries the transmitted ancilla in the middle
//! slot (see [`TRANSMITTED_MODE`]).

use crate::cm::{CovarianceMatrix, TwoModeBlocks};
use crate::error::{Error, Result};
use crate::optics::{
    add_correlated_displacement, beam_splitter, displacement_matrix_p, lossy_thermal_channel,
    reversed_balanced_splitter, two_mode_squeezed_cm, ChannelParams,
};
use crate::separability::separable_bound_x;

/// Index of the transmitted ancilla in the displaced/transmitted/interfered
/// stages of [`run_separable_protocol`] (and in [`displaced_cm`]).
pub const TRANSMITTED_MODE: usize = 1;

/// Homodyne or heterodyne detection at the receiving side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Homodyne,
    Heterodyne,
}

/// Which protocol is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// The separable-ancilla protocol of this crate.
    Separable,
    /// Entanglement-based baseline: a two-mode squeezed state with one arm
    /// through the channel, measured directly.
    Traditional,
}

/// Which mutual-information computation feeds the key rate of the
/// separable variant. Both are evaluated and recorded either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiPath {
    /// `log2((phi + 1) / omega)` from the modulation variance and the
    /// equivalent noise.
    Formula,
    /// Conditional-variance mutual information of the reduced two-mode state.
    FromCm,
}

/// Displacement strength: an explicit value, or the separability bound
/// resolved from the squeezing parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Displacement {
    Value(f64),
    Bound,
}

/// Channel strength given either directly or as a fiber length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Link {
    Transmittance(f64),
    DistanceKm(f64),
}

/// User-facing parameter bundle driving the pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Squeezing parameter (>= 0); the squeezed-pair variance is `cosh(2 tau)`.
    pub tau: f64,
    /// Displacement strength (>= 0) or the separability bound.
    pub x: Displacement,
    /// Channel transmittance in (0, 1] or distance in km.
    pub link: Link,
    /// Thermal variance of the channel environment (>= 1).
    pub n0: f64,
    /// Reconciliation efficiency in (0, 1].
    pub xi: f64,
    /// Modulation variance in shot-noise units (> 0).
    pub phi: f64,
    pub detection: Detection,
    pub variant: Variant,
    pub mi_path: MiPath,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        let tau = 10.0f64.ln() / 2.0;
        Self {
            tau,
            x: Displacement::Bound,
            link: Link::Transmittance(1.0),
            n0: 1.0,
            xi: 0.95,
            phi: (2.0 * tau).cosh(),
            detection: Detection::Homodyne,
            variant: Variant::Separable,
            mi_path: MiPath::Formula,
        }
    }
}

/// Distance-to-transmittance map for standard fiber: `eta = 10^{-L/50}`.
pub fn distance_to_transmittance(distance_km: f64) -> f64 {
    10f64.powf(-distance_km / 50.0)
}

/// Inverse of [`distance_to_transmittance`], for reporting.
pub fn transmittance_to_distance(eta: f64) -> f64 {
    -50.0 * eta.log10()
}

/// Fully validated scalar parameters with the displacement and link
/// indirections resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedParams {
    pub tau: f64,
    pub x: f64,
    pub eta: f64,
    pub n0: f64,
    pub xi: f64,
    pub phi: f64,
    pub detection: Detection,
    pub variant: Variant,
    pub mi_path: MiPath,
}

impl ResolvedParams {
    pub fn distance_km(&self) -> f64 {
        transmittance_to_distance(self.eta)
    }
}

fn check_param(name: &'static str, value: f64, ok: bool, requirement: &'static str) -> Result<f64> {
    if ok {
        Ok(value)
    } else {
        Err(Error::Param {
            name,
            value,
            requirement,
        })
    }
}

impl ProtocolParams {
    pub fn resolve(&self) -> Result<ResolvedParams> {
        let tau = check_param("tau", self.tau, self.tau >= 0.0, "tau >= 0")?;
        let x = match self.x {
            Displacement::Value(v) => check_param("x", v, v >= 0.0, "x >= 0")?,
            Displacement::Bound => separable_bound_x(tau),
        };
        let eta = match self.link {
            Link::Transmittance(e) => {
                check_param("eta", e, e > 0.0 && e <= 1.0, "0 < eta <= 1")?
            }
            Link::DistanceKm(l) => {
                check_param("distance_km", l, l >= 0.0, "distance_km >= 0")?;
                distance_to_transmittance(l)
            }
        };
        let n0 = check_param("n0", self.n0, self.n0 >= 1.0, "n0 >= 1")?;
        let xi = check_param("xi", self.xi, self.xi > 0.0 && self.xi <= 1.0, "0 < xi <= 1")?;
        let phi = check_param("phi", self.phi, self.phi > 0.0, "phi > 0")?;
        Ok(ResolvedParams {
            tau,
            x,
            eta,
            n0,
            xi,
            phi,
            detection: self.detection,
            variant: self.variant,
            mi_path: self.mi_path,
        })
    }
}

/// Three-mode state before displacement, mode order (alice, bob, link):
/// a squeezed pair of variance `V = cosh(2 tau)` shared between the alice
/// and link modes, with the distant bob mode in vacuum.
pub fn source_cm(tau: f64) -> Result<CovarianceMatrix> {
    let pair = two_mode_squeezed_cm(tau)?;
    let mut ext = nalgebra::DMatrix::identity(6, 6);
    ext.view_mut((0, 0), (4, 4)).copy_from(pair.entries());
    // (alice, link, vacuum) -> (alice, vacuum, link)
    CovarianceMatrix::new(ext)?.permute_modes(&[0, 2, 1])
}

/// Three-mode state after the correlated displacement, mode order
/// (alice, link, bob):
///
/// `[[a I, b sz, 2x sz], [b sz, a I, -2x I], [2x sz, -2x I, (1+4x) I]]`
///
/// with `a = V + x` and `b = sqrt(V^2 - 1) - x`. Note the transmitted
/// ancilla sits in the middle slot of this layout.
pub fn displaced_cm(tau: f64, x: f64) -> Result<CovarianceMatrix> {
    let displaced = add_correlated_displacement(&source_cm(tau)?, x)?;
    // (alice, bob, link) -> (alice, link, bob)
    displaced.permute_modes(&[0, 2, 1])
}

/// The distribution pipeline: displace the three-mode source, then undo the
/// initial mixing by interfering the distant vacuum with the transmitted
/// ancilla on a reversed balanced splitter. Mode order (alice, bob, link).
///
/// Output blocks, with `a = cosh(2 tau) + x` and `b = sinh(2 tau) - x`:
/// alice-bob correlation `(2x + b)/sqrt(2) sz`, bob variance `(1 + a)/2`,
/// link variance `(1 + 8x + a)/2`.
pub fn run_distribution(tau: f64, x: f64) -> Result<CovarianceMatrix> {
    let displaced = add_correlated_displacement(&source_cm(tau)?, x)?;
    let recombiner = reversed_balanced_splitter(3, 1, 2)?;
    recombiner.apply(&displaced)
}

/// Snapshots of the key-distribution pipeline. The three-mode stages after
/// the source are in (alice, link, bob) order; `interfered` holds bob's
/// kept port in slot 1 and the discarded port in slot 2.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTrace {
    /// (alice, bob, link), before displacement.
    pub source: CovarianceMatrix,
    /// (alice, link, bob), after the correlated displacement.
    pub displaced: CovarianceMatrix,
    /// (alice, link, bob), after the lossy thermal channel on the link.
    pub transmitted: CovarianceMatrix,
    /// (alice, kept, discarded), after bob's balanced splitter.
    pub interfered: CovarianceMatrix,
    /// Reduced two-mode state of alice and bob's kept mode.
    pub alice_bob: CovarianceMatrix,
}

/// The separable-state key-distribution pipeline: source, displacement,
/// lossy thermal channel on the transmitted ancilla, interference with
/// bob's displaced vacuum on a balanced splitter (the second port is
/// discarded), and reduction to the alice-bob pair.
pub fn run_separable_protocol(params: &ResolvedParams) -> Result<PipelineTrace> {
    let source = source_cm(params.tau)?;
    let displaced = displaced_cm(params.tau, params.x)?;
    let channel = ChannelParams::new(params.eta, params.n0)?;
    let transmitted = lossy_thermal_channel(&displaced, &channel, TRANSMITTED_MODE)?;
    let splitter = beam_splitter(3, 1, 2, 0.5)?;
    let interfered = splitter.apply(&transmitted)?;
    let alice_bob = interfered.reduce(&[0, 1])?;
    Ok(PipelineTrace {
        source,
        displaced,
        transmitted,
        interfered,
        alice_bob,
    })
}

/// Closed-form blocks of the reduced alice-bob state produced by
/// [`run_separable_protocol`]:
///
/// `a = V + x`, correlation `c = (2x + (sqrt(V^2-1) - x) sqrt(eta)) / sqrt(2)`,
/// bob variance `(1 + n0 + 4x (1 - sqrt(eta)) + a eta - n0 eta) / 2`.
pub fn alice_bob_closed_form(tau: f64, x: f64, eta: f64, n0: f64) -> TwoModeBlocks {
    let v = (2.0 * tau).cosh();
    let a = v + x;
    let corr_pre = (v * v - 1.0).sqrt() - x;
    let se = eta.sqrt();
    let c = (2.0 * x + corr_pre * se) / 2.0f64.sqrt();
    let b = 0.5 * (1.0 + n0 + 4.0 * x * (1.0 - se) + a * eta - n0 * eta);
    TwoModeBlocks { a, b, c }
}

/// Entanglement-based baseline: a two-mode squeezed state of variance
/// `V = cosh(2 tau)` with one arm through the lossy thermal channel.
///
/// `[[V I, sqrt(eta) sqrt(V^2-1) sz], [.., (eta V + (1-eta) n0) I]]`
pub fn run_traditional_protocol(params: &ResolvedParams) -> Result<CovarianceMatrix> {
    let pair = two_mode_squeezed_cm(params.tau)?;
    let channel = ChannelParams::new(params.eta, params.n0)?;
    lossy_thermal_channel(&pair, &channel, 1)
}

/// Permutation-conjugated copy of the displacement noise matrix matching the
/// (alice, link, bob) layout of [`displaced_cm`].
pub fn displacement_matrix_protocol_order() -> nalgebra::DMatrix<f64> {
    let p = displacement_matrix_p();
    let as_cm = CovarianceMatrix::new(p.entries().clone())
        .expect("P is symmetric")
        .permute_modes(&[0, 2, 1])
        .expect("valid permutation");
    as_cm.into_entries()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    const TAU_10: f64 = 1.1512925464970228; // e^{2 tau} = 10
    const EXACT: f64 = 1e-12;

    fn max_dev(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    fn resolved(tau: f64, x: f64, eta: f64, n0: f64) -> ResolvedParams {
        ProtocolParams {
            tau,
            x: Displacement::Value(x),
            link: Link::Transmittance(eta),
            n0,
            ..ProtocolParams::default()
        }
        .resolve()
        .unwrap()
    }

    #[test]
    fn source_without_squeezing_is_vacuum() {
        let g = source_cm(0.0).unwrap();
        assert_eq!(g.entries(), &DMatrix::identity(6, 6));
    }

    #[test]
    fn source_blocks_and_purity() {
        let g = source_cm(TAU_10).unwrap();
        assert!((g.get(0, 0) - 5.05).abs() < EXACT);
        assert!((g.get(2, 2) - 1.0).abs() < EXACT);
        assert!((g.get(4, 4) - 5.05).abs() < EXACT);
        assert!((g.get(0, 4) - 4.95).abs() < EXACT);
        assert!((g.get(1, 5) + 4.95).abs() < EXACT);
        assert!(g.get(0, 2).abs() < EXACT);

        let spectrum = g.symplectic_spectrum().unwrap();
        assert!(spectrum.values().iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn displaced_state_without_noise_keeps_source_pattern() {
        let g = displaced_cm(TAU_10, 0.0).unwrap();
        assert!((g.get(0, 0) - 5.05).abs() < EXACT);
        assert!((g.get(2, 2) - 5.05).abs() < EXACT);
        assert!((g.get(4, 4) - 1.0).abs() < EXACT);
        assert!((g.get(0, 2) - 4.95).abs() < EXACT);
    }

    #[test]
    fn displaced_state_blocks_at_anchor() {
        let g = displaced_cm(TAU_10, 4.5).unwrap();
        // diag a, a, 1+4x with a = V + x = 9.55
        assert!((g.get(0, 0) - 9.55).abs() < EXACT);
        assert!((g.get(2, 2) - 9.55).abs() < EXACT);
        assert!((g.get(4, 4) - 19.0).abs() < EXACT);
        // alice-link b sz with b = 4.95 - 4.5
        assert!((g.get(0, 2) - 0.45).abs() < EXACT);
        assert!((g.get(1, 3) + 0.45).abs() < EXACT);
        // alice-bob 2x sz, link-bob -2x I
        assert!((g.get(0, 4) - 9.0).abs() < EXACT);
        assert!((g.get(1, 5) + 9.0).abs() < EXACT);
        assert!((g.get(2, 4) + 9.0).abs() < EXACT);
        assert!((g.get(3, 5) + 9.0).abs() < EXACT);
    }

    #[test]
    fn displacement_is_linear_in_the_permuted_noise_matrix() {
        let x = 2.25;
        let with = displaced_cm(TAU_10, x).unwrap();
        let without = displaced_cm(TAU_10, 0.0).unwrap();
        let diff = with.entries() - without.entries();
        assert_eq!(diff, x * displacement_matrix_protocol_order());
    }

    #[test]
    fn distribution_output_blocks_at_anchor() {
        let g = run_distribution(TAU_10, 4.5).unwrap();
        let a = 5.05 + 4.5;
        let b = 4.95 - 4.5;
        let sqrt2 = 2.0f64.sqrt();
        // alice-bob correlation (2x + b)/sqrt(2)
        let ab = (9.0 + b) / sqrt2;
        assert!((g.get(0, 2) - ab).abs() < EXACT);
        assert!((ab - 6.6822).abs() < 1e-4);
        // bob variance (1 + a)/2 = 5.275, link variance (1 + 8x + a)/2 = 23.275
        assert!((g.get(2, 2) - 0.5 * (1.0 + a)).abs() < EXACT);
        assert!((g.get(2, 2) - 5.275).abs() < EXACT);
        assert!((g.get(4, 4) - 0.5 * (1.0 + 8.0 * 4.5 + a)).abs() < EXACT);
        assert!((g.get(4, 4) - 23.275).abs() < EXACT);
        // alice-link correlation (2x - b)/sqrt(2), bob-link (1 + 4x - a)/2
        assert!((g.get(0, 4) - (9.0 - b) / sqrt2).abs() < EXACT);
        assert!((g.get(2, 4) - 0.5 * (19.0 - a)).abs() < EXACT);
    }

    #[test]
    fn distribution_degenerates_to_vacuum() {
        let g = run_distribution(0.0, 0.0).unwrap();
        assert!(max_dev(g.entries(), &DMatrix::identity(6, 6)) < EXACT);
    }

    #[test]
    fn distribution_reduced_pair_matches_anchor() {
        let g = run_distribution(TAU_10, 4.5).unwrap();
        let ab = g.reduce(&[0, 1]).unwrap();
        let blocks = ab.two_mode_blocks().unwrap();
        assert!((blocks.a - 9.55).abs() < EXACT);
        assert!((blocks.b - 5.275).abs() < EXACT);
        assert!((blocks.c - 9.45 / 2.0f64.sqrt()).abs() < EXACT);
        let nu = ab.min_pt_symplectic_eigenvalue(&[1]).unwrap();
        assert!((nu - 0.3968).abs() < 5e-4);
    }

    #[test]
    fn protocol_reduced_state_matches_closed_form_at_anchor() {
        let p = resolved(TAU_10, 4.5, 0.1, 1.0);
        let trace = run_separable_protocol(&p).unwrap();
        let blocks = trace.alice_bob.two_mode_blocks().unwrap();
        assert!((blocks.a - 9.55).abs() < EXACT);
        assert!((blocks.c - 6.4646).abs() < 1e-4);
        assert!((blocks.b - 7.5814).abs() < 1e-4);

        let expected = alice_bob_closed_form(TAU_10, 4.5, 0.1, 1.0);
        assert!((blocks.a - expected.a).abs() < EXACT);
        assert!((blocks.b - expected.b).abs() < EXACT);
        assert!((blocks.c - expected.c).abs() < EXACT);
    }

    #[test]
    fn lossless_undisplaced_protocol_reduces_to_distribution_marginal() {
        let p = resolved(TAU_10, 0.0, 1.0, 1.0);
        let trace = run_separable_protocol(&p).unwrap();
        let blocks = trace.alice_bob.two_mode_blocks().unwrap();
        assert!((blocks.b - 0.5 * (1.0 + 5.05)).abs() < EXACT);

        let dist_ab = run_distribution(TAU_10, 0.0).unwrap().reduce(&[0, 1]).unwrap();
        assert!(max_dev(trace.alice_bob.entries(), dist_ab.entries()) < EXACT);
        // n0 must not matter at eta = 1
        let p5 = resolved(TAU_10, 0.0, 1.0, 5.0);
        let trace5 = run_separable_protocol(&p5).unwrap();
        assert!(max_dev(trace5.alice_bob.entries(), trace.alice_bob.entries()) < EXACT);
    }

    #[test]
    fn trivial_protocol_point_is_vacuum() {
        let p = resolved(0.0, 0.0, 1.0, 1.0);
        let trace = run_separable_protocol(&p).unwrap();
        assert!(max_dev(trace.alice_bob.entries(), &DMatrix::identity(4, 4)) < EXACT);
    }

    #[test]
    fn trace_snapshots_are_consistent() {
        let p = resolved(0.6, 1.2, 0.3, 2.0);
        let trace = run_separable_protocol(&p).unwrap();
        assert_eq!(trace.source.n_modes(), 3);
        assert_eq!(trace.displaced.n_modes(), 3);
        assert_eq!(trace.transmitted.n_modes(), 3);
        assert_eq!(trace.interfered.n_modes(), 3);
        assert_eq!(trace.alice_bob.n_modes(), 2);
        for stage in [
            &trace.source,
            &trace.displaced,
            &trace.transmitted,
            &trace.interfered,
        ] {
            assert!(stage.is_physical().unwrap());
        }
        assert!(trace.alice_bob.is_physical().unwrap());
    }

    #[test]
    fn traditional_baseline_blocks() {
        let lossless = resolved(TAU_10, 0.0, 1.0, 1.0);
        let g = run_traditional_protocol(&lossless).unwrap();
        let expected = two_mode_squeezed_cm(TAU_10).unwrap();
        assert!(max_dev(g.entries(), expected.entries()) < EXACT);

        let p = resolved(TAU_10, 0.0, 0.1, 1.0);
        let g = run_traditional_protocol(&p).unwrap();
        let blocks = g.two_mode_blocks().unwrap();
        assert!((blocks.a - 5.05).abs() < EXACT);
        assert!((blocks.b - 1.405).abs() < EXACT);
        assert!((blocks.c - 1.5653).abs() < 1e-4);
        assert!((blocks.c - 4.95 * 0.1f64.sqrt()).abs() < EXACT);
    }

    #[test]
    fn traditional_full_loss_is_a_thermal_product() {
        let p = resolved(TAU_10, 0.0, 1e-12, 3.0);
        let g = run_traditional_protocol(&p).unwrap();
        let blocks = g.two_mode_blocks().unwrap();
        assert!((blocks.a - 5.05).abs() < EXACT);
        assert!((blocks.b - 3.0).abs() < 1e-10);
        assert!(blocks.c.abs() < 1e-5);
    }

    #[test]
    fn parameter_validation() {
        let bad_tau = ProtocolParams {
            tau: -0.1,
            ..ProtocolParams::default()
        };
        assert!(bad_tau.resolve().is_err());

        let bad_eta = ProtocolParams {
            link: Link::Transmittance(0.0),
            ..ProtocolParams::default()
        };
        assert!(bad_eta.resolve().is_err());

        let bad_xi = ProtocolParams {
            xi: 1.5,
            ..ProtocolParams::default()
        };
        assert!(bad_xi.resolve().is_err());

        // the bound token resolves against tau
        let p = ProtocolParams {
            tau: TAU_10,
            x: Displacement::Bound,
            ..ProtocolParams::default()
        }
        .resolve()
        .unwrap();
        assert!((p.x - 4.5).abs() < EXACT);

        // the distance map
        let p = ProtocolParams {
            link: Link::DistanceKm(50.0),
            ..ProtocolParams::default()
        }
        .resolve()
        .unwrap();
        assert!((p.eta - 0.1).abs() < 1e-15);
        assert!((p.distance_km() - 50.0).abs() < 1e-12);
    }
}
