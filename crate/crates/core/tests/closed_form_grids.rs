//! Deterministic grid checks pinning the closed-form expressions to the
//! generic matrix pipelines.

use sepqkd_core::optics::add_correlated_displacement;
use sepqkd_core::protocol::{
    self, alice_bob_closed_form, source_cm, Displacement, Link, ProtocolParams,
};
use sepqkd_core::separability::{nu_min_closed_form, separable_bound_x};

const TAU_10: f64 = 1.1512925464970228; // ln(10)/2

fn tau_grid() -> [f64; 4] {
    [0.1, 0.5, 1.0, TAU_10]
}

fn x_grid(tau: f64) -> [f64; 5] {
    let bound = separable_bound_x(tau);
    [0.0, 0.1, 1.0, bound, 2.0 * bound]
}

#[test]
fn ancilla_eigenvalue_closed_form_agrees_with_generic_pt() {
    // The closed form evaluates one branch of the PT spectrum. It is an
    // eigenvalue of the generic spectrum at every grid point, and it is the
    // *minimum* wherever x does not exceed the separability bound (the
    // regime the protocol operates in; past the bound the branch keeps
    // growing and can cross above another eigenvalue, see the
    // `..._beyond_the_bound` test below).
    for tau in tau_grid() {
        for x in x_grid(tau) {
            let closed = nu_min_closed_form(tau, x).unwrap();
            let displaced = add_correlated_displacement(&source_cm(tau).unwrap(), x).unwrap();
            let pt = displaced.partial_transpose(&[2]).unwrap();
            let spectrum = pt.symplectic_spectrum().unwrap();
            let member = spectrum
                .values()
                .iter()
                .any(|nu| (closed - nu).abs() < 1e-9);
            assert!(
                member,
                "tau = {tau}, x = {x}: closed {closed} not in {:?}",
                spectrum.values()
            );
            if x <= separable_bound_x(tau) {
                assert!(
                    (closed - spectrum.min()).abs() < 1e-9,
                    "tau = {tau}, x = {x}: closed {closed} vs min {}",
                    spectrum.min()
                );
            }
        }
    }
}

#[test]
fn ancilla_eigenvalue_branch_crossing_beyond_the_bound() {
    // At weak squeezing and displacement far past the bound, the generic
    // minimum is a different branch (here e^{2 tau}) while the closed form
    // continues on its own, still-present branch.
    let (tau, x) = (0.1, 1.0);
    let closed = nu_min_closed_form(tau, x).unwrap();
    let displaced = add_correlated_displacement(&source_cm(tau).unwrap(), x).unwrap();
    let pt = displaced.partial_transpose(&[2]).unwrap();
    let spectrum = pt.symplectic_spectrum().unwrap();
    assert!((spectrum.min() - (2.0 * tau).exp()).abs() < 1e-9);
    assert!(closed > spectrum.min());
    assert!((closed - spectrum.values()[1]).abs() < 1e-9);
}

#[test]
fn ancilla_eigenvalue_is_one_at_the_bound() {
    for tau in tau_grid() {
        let nu = nu_min_closed_form(tau, separable_bound_x(tau)).unwrap();
        assert!((nu - 1.0).abs() < 1e-12, "tau = {tau}: nu = {nu}");
    }
}

#[test]
fn ancilla_eigenvalue_is_monotone_in_displacement() {
    for tau in tau_grid() {
        let mut xs = x_grid(tau);
        xs.sort_by(f64::total_cmp);
        let mut prev = f64::NEG_INFINITY;
        for x in xs {
            let nu = nu_min_closed_form(tau, x).unwrap();
            assert!(nu >= prev - 1e-12, "tau = {tau}, x = {x}");
            prev = nu;
        }
    }
}

fn channel_grid() -> ([f64; 3], [f64; 2], [f64; 4], [f64; 3]) {
    (
        [0.1, 1.0, TAU_10],
        [0.0, f64::NAN], // NaN slot resolved to the bound per tau below
        [0.01, 0.1, 0.5, 1.0],
        [1.0, 2.0, 5.0],
    )
}

#[test]
fn reduced_pair_closed_form_matches_pipeline_on_the_grid() {
    let (taus, _, etas, n0s) = channel_grid();
    let mut points = 0;
    for tau in taus {
        for x in [0.0, separable_bound_x(tau)] {
            for eta in etas {
                for n0 in n0s {
                    let p = ProtocolParams {
                        tau,
                        x: Displacement::Value(x),
                        link: Link::Transmittance(eta),
                        n0,
                        ..Default::default()
                    }
                    .resolve()
                    .unwrap();
                    let trace = protocol::run_separable_protocol(&p).unwrap();
                    let expected = alice_bob_closed_form(tau, x, eta, n0).to_cm();
                    let dev = (trace.alice_bob.entries() - expected.entries())
                        .iter()
                        .fold(0.0f64, |acc, v| acc.max(v.abs()));
                    assert!(
                        dev < 1e-12,
                        "tau = {tau}, x = {x}, eta = {eta}, n0 = {n0}: dev = {dev:.3e}"
                    );
                    points += 1;
                }
            }
        }
    }
    assert_eq!(points, 72);
}

#[test]
fn transmitted_ancilla_stays_ppt_through_the_channel_at_the_bound() {
    let (taus, _, etas, n0s) = channel_grid();
    for tau in taus {
        let x = separable_bound_x(tau);
        for eta in etas {
            for n0 in n0s {
                let p = ProtocolParams {
                    tau,
                    x: Displacement::Value(x),
                    link: Link::Transmittance(eta),
                    n0,
                    ..Default::default()
                }
                .resolve()
                .unwrap();
                let trace = protocol::run_separable_protocol(&p).unwrap();
                for (stage, cm) in [
                    ("displaced", &trace.displaced),
                    ("transmitted", &trace.transmitted),
                ] {
                    let nu = cm
                        .min_pt_symplectic_eigenvalue(&[protocol::TRANSMITTED_MODE])
                        .unwrap();
                    assert!(
                        nu >= 1.0 - 1e-9,
                        "{stage} not PPT at tau = {tau}, eta = {eta}, n0 = {n0}: nu = {nu}"
                    );
                }
            }
        }
    }
}
