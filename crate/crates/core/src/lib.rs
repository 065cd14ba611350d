//! Gaussian-state toolkit and key-rate engine for continuous-variable
//! quantum key distribution with separable ancillas.
//!
//! Everything works at the covariance-matrix level in shot-noise units
//! (vacuum variance 1, interleaved `(x1, p1, x2, p2, ...)` quadrature
//! ordering). The crate provides:
//!
//! * [`cm`] — covariance matrices, symplectic transforms, partial
//!   transposition and reduction;
//! * [`spectrum`] — symplectic eigenvalues (generic and two-mode closed
//!   form), logarithmic negativity, and the Gaussian entropy function;
//! * [`optics`] — squeezed states, beam splitters, the lossy thermal
//!   channel, and the correlated-displacement noise;
//! * [`separability`] — the displacement bound and PPT certification of
//!   the three-mode state;
//! * [`protocol`] — the entanglement-distribution and key-distribution
//!   pipelines;
//! * [`keyrate`] — mutual information, the Holevo bound, secret-key rates
//!   and related bounds.
//!
//! ```
//! use sepqkd_core::{distributed_entanglement, separable_bound_x};
//!
//! // squeeze so that e^{2 tau} = 10, displace at the separability bound
//! let tau = 10f64.ln() / 2.0;
//! let x = separable_bound_x(tau);
//! let (nu, ebits) = distributed_entanglement(tau, x).unwrap();
//! assert!(nu < 1.0 && ebits > 1.0);
//! ```

pub mod cm;
pub mod error;
pub mod keyrate;
pub mod optics;
pub mod protocol;
pub mod separability;
pub mod spectrum;

pub use cm::{symplectic_form, CovarianceMatrix, SymplecticTransform, TwoModeBlocks};
pub use error::{Error, Result};
pub use keyrate::{
    distance_to_transmittance, energy_bound_check, equivalent_noise_omega, excess_noise_to_n0,
    holevo_chi_be, key_rate, key_rate_resolved, mutual_information_formula,
    mutual_information_from_cm, plob_bound, transmittance_to_distance, zero_crossing_distance,
    EnergyBoundReport, KeyRatePoint, OmegaScaling,
};
pub use optics::{
    add_correlated_displacement, beam_splitter, displacement_matrix_p, lossy_thermal_channel,
    sample_correlated_displacements, squeezed_vacuum_cm, two_mode_squeezed_cm, vacuum_cm,
    ChannelParams, DisplacementMatrix, SqueezeAxis,
};
pub use protocol::{
    run_distribution, run_separable_protocol, run_traditional_protocol, Detection, Displacement,
    Link, MiPath, PipelineTrace, ProtocolParams, ResolvedParams, Variant,
};
pub use separability::{
    certify_bipartitions, distributed_entanglement, kappa_min_closed_form, nu_min_closed_form,
    separable_bound_x, BipartitionReport, Cut,
};
pub use spectrum::{
    conditional_eigenvalue_nu3, entropy_g, log_negativity, symplectic_eigenvalues_two_mode,
    SymplecticSpectrum,
};
