//! Grid evaluation and CSV emission.
//!
//! Grid points are independent pure evaluations, so they may run in
//! parallel; rows are always assembled in grid order (axis 1 outer, axis 2
//! inner) and formatted identically, making the output byte-for-byte
//! reproducible regardless of the execution mode.

use rayon::prelude::*;

use sepqkd_core::protocol::{Displacement, Link, ProtocolParams, Variant};
use sepqkd_core::separability::{
    distributed_entanglement, kappa_min_closed_form, nu_min_closed_form,
};
use sepqkd_core::{key_rate_resolved, transmittance_to_distance, KeyRatePoint};

use crate::config::{Column, ConfigError, RunConfig, SweepParam, SweepSpec};

/// Errors of a CLI run, grouped by exit code.
#[derive(Debug)]
pub enum RunError {
    /// Configuration or parameter-validation problem (exit 2).
    Config(Vec<ConfigError>),
    /// Numerical failure during evaluation (exit 3).
    Numerical(sepqkd_core::Error),
    /// Filesystem problem (exit 4).
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 4,
        }
    }

    fn from_core(e: sepqkd_core::Error) -> Self {
        if e.is_validation() {
            RunError::Config(vec![ConfigError {
                line: 0,
                message: e.to_string(),
            }])
        } else {
            RunError::Numerical(e)
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(errs) => {
                for (k, e) in errs.iter().enumerate() {
                    if k > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            RunError::Numerical(e) => write!(f, "numerical error: {e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Format a value with 10 significant digits, locale-free.
/// Negative zero is normalized so equal values print identically.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        let v = if v == 0.0 { 0.0 } else { v };
        format!("{v:.9e}")
    }
}

/// Override one swept parameter on the base parameter bundle.
pub fn apply_axis(params: &mut ProtocolParams, param: SweepParam, value: f64) {
    match param {
        SweepParam::Tau => params.tau = value,
        SweepParam::X => params.x = Displacement::Value(value),
        SweepParam::Eta => params.link = Link::Transmittance(value),
        SweepParam::DistanceKm => params.link = Link::DistanceKm(value),
        SweepParam::N0 => params.n0 = value,
        SweepParam::Xi => params.xi = value,
        SweepParam::Phi => params.phi = value,
    }
}

/// Evaluate one parameter point and extract the requested columns.
pub fn evaluate_columns(
    params: &ProtocolParams,
    columns: &[Column],
) -> Result<Vec<f64>, sepqkd_core::Error> {
    let resolved = params.resolve()?;
    let point = key_rate_resolved(&resolved)?;
    let needs_separability = columns
        .iter()
        .any(|c| matches!(c, Column::NuMin | Column::KappaMin | Column::EN));
    let (nu_min, kappa_min, e_n) = if needs_separability {
        let (_, e_n) = distributed_entanglement(resolved.tau, resolved.x)?;
        (
            nu_min_closed_form(resolved.tau, resolved.x)?,
            kappa_min_closed_form(resolved.tau, resolved.x)?,
            e_n,
        )
    } else {
        (0.0, 0.0, 0.0)
    };
    Ok(columns
        .iter()
        .map(|c| match c {
            Column::L => transmittance_to_distance(resolved.eta),
            Column::Eta => resolved.eta,
            Column::Omega => point.omega,
            Column::IAb => point.i_ab,
            Column::ChiBe => point.chi_be,
            Column::RateRaw => point.rate_raw,
            Column::Rate => point.rate,
            Column::Plob => point.plob,
            Column::NuMin => nu_min,
            Column::KappaMin => kappa_min,
            Column::EN => e_n,
        })
        .collect())
}

fn displacement_str(d: Displacement) -> String {
    match d {
        Displacement::Bound => "bound".to_string(),
        Displacement::Value(v) => format!("{v}"),
    }
}

pub fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Separable => "separable",
        Variant::Traditional => "traditional",
    }
}

/// The `#`-prefixed metadata block recording the full resolved base
/// parameter set and the sweep layout.
fn metadata(config: &RunConfig, sweep_spec: &SweepSpec) -> Vec<String> {
    let p = &config.params;
    let mut lines = vec!["# sepqkd sweep".to_string()];
    lines.push(format!("# variant = {}", variant_name(p.variant)));
    lines.push(format!(
        "# detection = {}",
        match p.detection {
            sepqkd_core::Detection::Homodyne => "homodyne",
            sepqkd_core::Detection::Heterodyne => "heterodyne",
        }
    ));
    lines.push(format!(
        "# mi_path = {}",
        match p.mi_path {
            sepqkd_core::MiPath::Formula => "formula",
            sepqkd_core::MiPath::FromCm => "cm",
        }
    ));
    let swept = |param: SweepParam| {
        sweep_spec.axis1.param == param || sweep_spec.axis2.as_ref().is_some_and(|a| a.param == param)
    };
    let fixed = |name: &str, value: String, is_swept: bool| {
        if is_swept {
            format!("# {name} = <axis>")
        } else {
            format!("# {name} = {value}")
        }
    };
    lines.push(fixed("tau", format!("{}", p.tau), swept(SweepParam::Tau)));
    lines.push(fixed("x", displacement_str(p.x), swept(SweepParam::X)));
    let link_swept = swept(SweepParam::Eta) || swept(SweepParam::DistanceKm);
    let link_value = match p.link {
        Link::Transmittance(e) => format!("eta {e}"),
        Link::DistanceKm(l) => format!("distance_km {l}"),
    };
    lines.push(fixed("link", link_value, link_swept));
    lines.push(fixed("n0", format!("{}", p.n0), swept(SweepParam::N0)));
    lines.push(fixed("xi", format!("{}", p.xi), swept(SweepParam::Xi)));
    lines.push(fixed("phi", format!("{}", p.phi), swept(SweepParam::Phi)));
    let axis_line = |tag: &str, a: &crate::config::SweepAxis| {
        format!(
            "# {tag} = {} from {} to {} in {} steps",
            a.param.name(),
            a.start,
            a.stop,
            a.steps
        )
    };
    lines.push(axis_line("axis1", &sweep_spec.axis1));
    if let Some(a2) = &sweep_spec.axis2 {
        lines.push(axis_line("axis2", a2));
    }
    lines
}

/// Run the configured sweep and return the CSV document.
///
/// `parallel` selects the execution mode only; the bytes produced are
/// identical either way.
pub fn sweep_csv(config: &RunConfig, parallel: bool) -> Result<String, RunError> {
    let sweep_spec = config.sweep.as_ref().ok_or_else(|| {
        RunError::Config(vec![ConfigError {
            line: 0,
            message: "no sweep axes configured".to_string(),
        }])
    })?;

    let outer = sweep_spec.axis1.values();
    let inner = sweep_spec
        .axis2
        .as_ref()
        .map(|a| a.values())
        .unwrap_or_else(|| vec![f64::NAN]);
    let mut grid = Vec::with_capacity(outer.len() * inner.len());
    for &v1 in &outer {
        for &v2 in &inner {
            grid.push((v1, v2));
        }
    }

    let row = |&(v1, v2): &(f64, f64)| -> Result<String, sepqkd_core::Error> {
        let mut params = config.params;
        apply_axis(&mut params, sweep_spec.axis1.param, v1);
        if let Some(a2) = &sweep_spec.axis2 {
            apply_axis(&mut params, a2.param, v2);
        }
        let values = evaluate_columns(&params, &sweep_spec.outputs)?;
        Ok(values
            .iter()
            .map(|v| fmt_float(*v))
            .collect::<Vec<_>>()
            .join(","))
    };

    let rows: Result<Vec<String>, sepqkd_core::Error> = if parallel {
        grid.par_iter().map(row).collect()
    } else {
        grid.iter().map(row).collect()
    };
    let rows = rows.map_err(RunError::from_core)?;

    let mut out = String::new();
    for line in metadata(config, sweep_spec) {
        out.push_str(&line);
        out.push('\n');
    }
    let header: Vec<&str> = sweep_spec.outputs.iter().map(|c| c.name()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

/// Evaluate a single operating point.
pub fn run_point(config: &RunConfig) -> Result<KeyRatePoint, RunError> {
    let resolved = config.params.resolve().map_err(RunError::from_core)?;
    key_rate_resolved(&resolved).map_err(RunError::from_core)
}
