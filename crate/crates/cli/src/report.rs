//! Human-readable output for the single-shot subcommands.

use sepqkd_core::cm::CovarianceMatrix;
use sepqkd_core::optics::{displacement_matrix_p, sample_correlated_displacements};
use sepqkd_core::protocol::{
    self, Detection, MiPath, ResolvedParams, Variant,
};
use sepqkd_core::separability::certify_bipartitions;
use sepqkd_core::KeyRatePoint;

use crate::sweep::{fmt_float, variant_name, RunError};

fn push_row(out: &mut String, key: &str, value: impl AsRef<str>) {
    out.push_str(&format!("{key:<14} {}\n", value.as_ref()));
}

fn push_num(out: &mut String, key: &str, value: f64) {
    push_row(out, key, format!("{value:.6}"));
}

/// Aligned key/value table for one evaluated operating point.
pub fn point_table(point: &KeyRatePoint) -> String {
    let p = &point.params;
    let mut out = String::new();
    push_row(&mut out, "variant", variant_name(p.variant));
    push_row(
        &mut out,
        "detection",
        match p.detection {
            Detection::Homodyne => "homodyne",
            Detection::Heterodyne => "heterodyne",
        },
    );
    if p.variant == Variant::Separable {
        push_row(
            &mut out,
            "mi_path",
            match p.mi_path {
                MiPath::Formula => "formula",
                MiPath::FromCm => "cm",
            },
        );
    }
    push_num(&mut out, "tau", p.tau);
    push_num(&mut out, "x", p.x);
    push_num(&mut out, "eta", p.eta);
    push_num(&mut out, "distance_km", p.distance_km());
    push_num(&mut out, "n0", p.n0);
    push_num(&mut out, "xi", p.xi);
    push_num(&mut out, "phi", p.phi);
    push_num(&mut out, "omega", point.omega);
    push_num(&mut out, "i_ab", point.i_ab);
    if let Some(f) = point.i_ab_formula {
        push_num(&mut out, "i_ab_formula", f);
    }
    push_num(&mut out, "i_ab_cm", point.i_ab_cm);
    push_num(&mut out, "chi_be", point.chi_be);
    push_num(&mut out, "rate_raw", point.rate_raw);
    push_num(&mut out, "rate", point.rate);
    push_row(
        &mut out,
        "plob",
        if point.plob.is_infinite() {
            "inf".to_string()
        } else {
            format!("{:.6}", point.plob)
        },
    );
    out
}

fn certify_stage(out: &mut String, stage: &str, cm: &CovarianceMatrix) -> Result<(), RunError> {
    let reports = certify_bipartitions(cm).map_err(|e| {
        if e.is_validation() {
            RunError::Config(vec![crate::config::ConfigError {
                line: 0,
                message: e.to_string(),
            }])
        } else {
            RunError::Numerical(e)
        }
    })?;
    for r in reports {
        out.push_str(&format!(
            "{stage:<14} {:<6} nu_min = {:<16} {}  E_N = {:.4}\n",
            r.cut.label(),
            format!("{:.10}", r.nu_min),
            if r.is_ppt { "PPT      " } else { "entangled" },
            r.log_negativity,
        ));
    }
    Ok(())
}

/// PPT certification of every one-versus-rest cut at each pipeline stage.
/// All stages are reported in (alice, bob, link) mode order, so the `C|AB`
/// row always refers to the transmitted ancilla against the two parties.
pub fn certify_report(params: &ResolvedParams) -> Result<String, RunError> {
    let mut out = String::new();
    out.push_str(&format!(
        "bipartition certification at tau = {}, x = {}, eta = {}, n0 = {}\n\n",
        params.tau, params.x, params.eta, params.n0
    ));
    out.push_str("stage          cut    smallest PT symplectic eigenvalue\n");

    let source = protocol::source_cm(params.tau).map_err(RunError::Numerical)?;
    certify_stage(&mut out, "source", &source)?;

    let trace = protocol::run_separable_protocol(params).map_err(RunError::Numerical)?;
    // permute the (alice, link, bob) stages to (alice, bob, link) so the
    // cut labels line up across stages
    let displaced = trace
        .displaced
        .permute_modes(&[0, 2, 1])
        .map_err(RunError::Numerical)?;
    certify_stage(&mut out, "displaced", &displaced)?;
    let transmitted = trace
        .transmitted
        .permute_modes(&[0, 2, 1])
        .map_err(RunError::Numerical)?;
    certify_stage(&mut out, "transmitted", &transmitted)?;

    let recombined = protocol::run_distribution(params.tau, params.x).map_err(RunError::Numerical)?;
    certify_stage(&mut out, "recombined", &recombined)?;
    Ok(out)
}

/// Deterministic sampler demo: draw displacement vectors, compare their
/// empirical covariance with `x P`, and optionally return the samples as
/// CSV rows.
pub fn sample_report(
    x: f64,
    count: usize,
    seed: u64,
    with_csv: bool,
) -> Result<(String, Option<String>), RunError> {
    let samples = sample_correlated_displacements(x, count, seed).map_err(|e| {
        RunError::Config(vec![crate::config::ConfigError {
            line: 0,
            message: e.to_string(),
        }])
    })?;

    // empirical second moments (zero-mean by construction)
    let mut cov = [[0.0f64; 6]; 6];
    for d in &samples {
        for (i, row) in cov.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c += d[i] * d[j];
            }
        }
    }
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v /= count as f64;
        }
    }
    let expected = displacement_matrix_p();
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, row) in cov.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let e = x * expected.entries()[(i, j)];
            num += (c - e) * (c - e);
            den += e * e;
        }
    }
    let rel = if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    };

    let mut out = String::new();
    push_row(&mut out, "samples", format!("{count}"));
    push_row(&mut out, "seed", format!("{seed}"));
    push_num(&mut out, "x", x);
    push_row(
        &mut out,
        "cov_error",
        format!("{rel:.6} (relative Frobenius vs x P)"),
    );

    let csv = with_csv.then(|| {
        let mut s = String::from("# sepqkd displacement samples\n");
        s.push_str(&format!("# x = {x}, seed = {seed}\n"));
        s.push_str("xa,pa,xb,pb,xc,pc\n");
        for d in &samples {
            let row: Vec<String> = d.iter().map(|v| fmt_float(*v)).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    });
    Ok((out, csv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sepqkd_core::protocol::{Displacement, Link, ProtocolParams};
    use sepqkd_core::key_rate;

    fn anchor_params(variant: Variant) -> ProtocolParams {
        ProtocolParams {
            tau: 10f64.ln() / 2.0,
            x: Displacement::Value(4.5),
            link: Link::DistanceKm(50.0),
            n0: 1.0,
            xi: 0.95,
            phi: 10.0,
            variant,
            ..ProtocolParams::default()
        }
    }

    #[test]
    fn point_table_lists_the_expected_noise() {
        let point = key_rate(&anchor_params(Variant::Separable)).unwrap();
        let table = point_table(&point);
        let omega_line = table.lines().find(|l| l.starts_with("omega")).unwrap();
        let value: f64 = omega_line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!((value - 16.1039).abs() < 1e-3);
        assert!(table.contains("chi_be         0.000000"));
    }

    #[test]
    fn traditional_point_table_has_no_formula_row() {
        let point = key_rate(&anchor_params(Variant::Traditional)).unwrap();
        let table = point_table(&point);
        assert!(!table.contains("i_ab_formula"));
        assert!(table.contains("rate_raw"));
    }

    #[test]
    fn certify_report_is_coherent_across_stages() {
        let p = anchor_params(Variant::Separable).resolve().unwrap();
        let report = certify_report(&p).unwrap();
        // the displaced and transmitted ancilla cut is PPT at x = bound
        let ancilla_rows: Vec<&str> = report
            .lines()
            .filter(|l| l.contains("C|AB") && (l.starts_with("displaced") || l.starts_with("transmitted")))
            .collect();
        assert_eq!(ancilla_rows.len(), 2);
        for row in ancilla_rows {
            assert!(row.contains("PPT"), "{row}");
        }
        // the source is entangled across the ancilla cut
        let source_row = report
            .lines()
            .find(|l| l.starts_with("source") && l.contains("C|AB"))
            .unwrap();
        assert!(source_row.contains("entangled"));
    }

    #[test]
    fn sample_report_matches_expected_covariance() {
        let (summary, csv) = sample_report(1.0, 20_000, 9, true).unwrap();
        let err_line = summary.lines().find(|l| l.starts_with("cov_error")).unwrap();
        let value: f64 = err_line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!(value < 0.1, "cov_error = {value}");
        let csv = csv.unwrap();
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 20_001);
    }
}
