//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, numbers in decimal or scientific
//! notation, `x = bound` resolves the displacement to the separability bound
//! of the configured squeezing. Unknown keys are rejected. All errors carry
//! the 1-based line number they came from (line 0 for cross-line problems
//! such as missing or conflicting keys).

use std::fmt;

use sepqkd_core::protocol::{
    Detection, Displacement, Link, MiPath, ProtocolParams, Variant,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config line {}: {}", self.line, self.message)
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// Parameter a sweep axis can range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Tau,
    X,
    Eta,
    DistanceKm,
    N0,
    Xi,
    Phi,
}

impl SweepParam {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "tau" => Self::Tau,
            "x" => Self::X,
            "eta" => Self::Eta,
            "distance_km" | "L" => Self::DistanceKm,
            "n0" => Self::N0,
            "xi" => Self::Xi,
            "phi" => Self::Phi,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Tau => "tau",
            Self::X => "x",
            Self::Eta => "eta",
            Self::DistanceKm => "distance_km",
            Self::N0 => "n0",
            Self::Xi => "xi",
            Self::Phi => "phi",
        }
    }
}

/// Output column of a sweep CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    L,
    Eta,
    Omega,
    IAb,
    ChiBe,
    RateRaw,
    Rate,
    Plob,
    NuMin,
    KappaMin,
    EN,
}

impl Column {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "L" => Self::L,
            "eta" => Self::Eta,
            "omega" => Self::Omega,
            "i_ab" => Self::IAb,
            "chi_be" => Self::ChiBe,
            "rate_raw" => Self::RateRaw,
            "rate" => Self::Rate,
            "plob" => Self::Plob,
            "nu_min" => Self::NuMin,
            "kappa_min" => Self::KappaMin,
            "e_n" => Self::EN,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::L => "L",
            Self::Eta => "eta",
            Self::Omega => "omega",
            Self::IAb => "i_ab",
            Self::ChiBe => "chi_be",
            Self::RateRaw => "rate_raw",
            Self::Rate => "rate",
            Self::Plob => "plob",
            Self::NuMin => "nu_min",
            Self::KappaMin => "kappa_min",
            Self::EN => "e_n",
        }
    }
}

pub const DEFAULT_COLUMNS: [Column; 8] = [
    Column::L,
    Column::Eta,
    Column::Omega,
    Column::IAb,
    Column::ChiBe,
    Column::RateRaw,
    Column::Rate,
    Column::Plob,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis1: SweepAxis,
    pub axis2: Option<SweepAxis>,
    pub outputs: Vec<Column>,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ProtocolParams,
    pub sweep: Option<SweepSpec>,
    pub seed: u64,
    pub output_path: Option<String>,
}

/// Partially specified configuration; file contents and command-line flags
/// are merged at this level (flags override the file), then validated once.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Draft {
    pub tau: Option<(usize, f64)>,
    pub x: Option<(usize, Displacement)>,
    pub eta: Option<(usize, f64)>,
    pub distance_km: Option<(usize, f64)>,
    pub n0: Option<(usize, f64)>,
    pub xi: Option<(usize, f64)>,
    pub phi: Option<(usize, f64)>,
    pub variant: Option<(usize, Variant)>,
    pub detection: Option<(usize, Detection)>,
    pub mi_path: Option<(usize, MiPath)>,
    pub seed: Option<(usize, u64)>,
    pub out: Option<(usize, String)>,
    pub sweep_param: Option<(usize, SweepParam)>,
    pub sweep_start: Option<(usize, f64)>,
    pub sweep_stop: Option<(usize, f64)>,
    pub sweep_steps: Option<(usize, usize)>,
    pub sweep2_param: Option<(usize, SweepParam)>,
    pub sweep2_start: Option<(usize, f64)>,
    pub sweep2_stop: Option<(usize, f64)>,
    pub sweep2_steps: Option<(usize, usize)>,
    pub outputs: Option<(usize, Vec<Column>)>,
}

impl Draft {
    /// Merge `other` on top of `self` (later source wins per key).
    pub fn overridden_by(mut self, other: Draft) -> Draft {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field; })*
            };
        }
        take!(
            tau, x, eta, distance_km, n0, xi, phi, variant, detection, mi_path, seed, out,
            sweep_param, sweep_start, sweep_stop, sweep_steps, sweep2_param, sweep2_start,
            sweep2_stop, sweep2_steps, outputs
        );
        self
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| err(line, format!("malformed number for `{key}`: `{value}`")))
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|_| err(line, format!("malformed integer for `{key}`: `{value}`")))
}

/// Parse the flat key=value document into a draft, collecting every
/// line-level error.
pub fn parse_draft(text: &str) -> Result<Draft, Vec<ConfigError>> {
    let mut draft = Draft::default();
    let mut errors = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let n = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(err(n, format!("expected `key = value`, got `{line}`")));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        let mut set = |r: Result<(), ConfigError>| {
            if let Err(e) = r {
                errors.push(e);
            }
        };
        match key {
            "tau" => set(parse_f64(n, key, value).map(|v| draft.tau = Some((n, v)))),
            "x" => {
                if value == "bound" {
                    draft.x = Some((n, Displacement::Bound));
                } else {
                    set(parse_f64(n, key, value)
                        .map(|v| draft.x = Some((n, Displacement::Value(v)))));
                }
            }
            "eta" => set(parse_f64(n, key, value).map(|v| draft.eta = Some((n, v)))),
            "distance_km" => {
                set(parse_f64(n, key, value).map(|v| draft.distance_km = Some((n, v))))
            }
            "n0" => set(parse_f64(n, key, value).map(|v| draft.n0 = Some((n, v)))),
            "xi" => set(parse_f64(n, key, value).map(|v| draft.xi = Some((n, v)))),
            "phi" => set(parse_f64(n, key, value).map(|v| draft.phi = Some((n, v)))),
            "variant" => match value {
                "separable" => draft.variant = Some((n, Variant::Separable)),
                "traditional" => draft.variant = Some((n, Variant::Traditional)),
                _ => errors.push(err(
                    n,
                    format!("variant must be `separable` or `traditional`, got `{value}`"),
                )),
            },
            "detection" => match value {
                "homodyne" => draft.detection = Some((n, Detection::Homodyne)),
                "heterodyne" => draft.detection = Some((n, Detection::Heterodyne)),
                _ => errors.push(err(
                    n,
                    format!("detection must be `homodyne` or `heterodyne`, got `{value}`"),
                )),
            },
            "mi_path" => match value {
                "formula" => draft.mi_path = Some((n, MiPath::Formula)),
                "cm" => draft.mi_path = Some((n, MiPath::FromCm)),
                _ => errors.push(err(
                    n,
                    format!("mi_path must be `formula` or `cm`, got `{value}`"),
                )),
            },
            "seed" => set(value
                .parse::<u64>()
                .map(|v| draft.seed = Some((n, v)))
                .map_err(|_| err(n, format!("malformed integer for `seed`: `{value}`")))),
            "out" => draft.out = Some((n, value.to_string())),
            "sweep_param" | "sweep2_param" => match SweepParam::parse(value) {
                Some(p) => {
                    if key == "sweep_param" {
                        draft.sweep_param = Some((n, p));
                    } else {
                        draft.sweep2_param = Some((n, p));
                    }
                }
                None => errors.push(err(n, format!("unknown sweep parameter `{value}`"))),
            },
            "sweep_start" => set(parse_f64(n, key, value).map(|v| draft.sweep_start = Some((n, v)))),
            "sweep_stop" => set(parse_f64(n, key, value).map(|v| draft.sweep_stop = Some((n, v)))),
            "sweep_steps" => {
                set(parse_usize(n, key, value).map(|v| draft.sweep_steps = Some((n, v))))
            }
            "sweep2_start" => {
                set(parse_f64(n, key, value).map(|v| draft.sweep2_start = Some((n, v))))
            }
            "sweep2_stop" => set(parse_f64(n, key, value).map(|v| draft.sweep2_stop = Some((n, v)))),
            "sweep2_steps" => {
                set(parse_usize(n, key, value).map(|v| draft.sweep2_steps = Some((n, v))))
            }
            "outputs" => {
                let mut cols = Vec::new();
                let mut ok = true;
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match Column::parse(name) {
                        Some(c) => cols.push(c),
                        None => {
                            errors.push(err(n, format!("unknown output column `{name}`")));
                            ok = false;
                        }
                    }
                }
                if ok {
                    if cols.is_empty() {
                        errors.push(err(n, "outputs list is empty"));
                    } else {
                        draft.outputs = Some((n, cols));
                    }
                }
            }
            _ => errors.push(err(n, format!("unknown key `{key}`"))),
        }
    }

    if errors.is_empty() {
        Ok(draft)
    } else {
        Err(errors)
    }
}

fn finalize_sweep(draft: &Draft, errors: &mut Vec<ConfigError>) -> Option<SweepSpec> {
    let any_axis1 = draft.sweep_param.is_some()
        || draft.sweep_start.is_some()
        || draft.sweep_stop.is_some()
        || draft.sweep_steps.is_some();
    let any_axis2 = draft.sweep2_param.is_some()
        || draft.sweep2_start.is_some()
        || draft.sweep2_stop.is_some()
        || draft.sweep2_steps.is_some();
    if !any_axis1 && !any_axis2 {
        return None;
    }
    if !any_axis1 && any_axis2 {
        errors.push(err(0, "sweep2_* keys given without a primary sweep axis"));
        return None;
    }

    let axis = |param: Option<(usize, SweepParam)>,
                start: Option<(usize, f64)>,
                stop: Option<(usize, f64)>,
                steps: Option<(usize, usize)>,
                tag: &str,
                errors: &mut Vec<ConfigError>|
     -> Option<SweepAxis> {
        let mut missing = Vec::new();
        if param.is_none() {
            missing.push(format!("{tag}_param"));
        }
        if start.is_none() {
            missing.push(format!("{tag}_start"));
        }
        if stop.is_none() {
            missing.push(format!("{tag}_stop"));
        }
        if steps.is_none() {
            missing.push(format!("{tag}_steps"));
        }
        if !missing.is_empty() {
            errors.push(err(0, format!("incomplete sweep axis: missing {}", missing.join(", "))));
            return None;
        }
        let (line, steps) = steps.unwrap();
        if steps < 2 {
            errors.push(err(line, "sweep steps must be >= 2"));
            return None;
        }
        Some(SweepAxis {
            param: param.unwrap().1,
            start: start.unwrap().1,
            stop: stop.unwrap().1,
            steps,
        })
    };

    let axis1 = axis(
        draft.sweep_param,
        draft.sweep_start,
        draft.sweep_stop,
        draft.sweep_steps,
        "sweep",
        errors,
    )?;
    let axis2 = if any_axis2 {
        Some(axis(
            draft.sweep2_param,
            draft.sweep2_start,
            draft.sweep2_stop,
            draft.sweep2_steps,
            "sweep2",
            errors,
        )?)
    } else {
        None
    };

    if let Some(a2) = &axis2 {
        if a2.param == axis1.param {
            errors.push(err(0, "sweep axes must range over different parameters"));
        }
    }

    // a swept parameter must not also carry a fixed value
    let fixed_line = |p: SweepParam, d: &Draft| -> Option<usize> {
        match p {
            SweepParam::Tau => d.tau.map(|(l, _)| l),
            SweepParam::X => d.x.map(|(l, _)| l),
            SweepParam::Eta => d.eta.map(|(l, _)| l),
            SweepParam::DistanceKm => d.distance_km.map(|(l, _)| l),
            SweepParam::N0 => d.n0.map(|(l, _)| l),
            SweepParam::Xi => d.xi.map(|(l, _)| l),
            SweepParam::Phi => d.phi.map(|(l, _)| l),
        }
    };
    for ax in std::iter::once(&axis1).chain(axis2.iter()) {
        if let Some(line) = fixed_line(ax.param, draft) {
            errors.push(err(
                line,
                format!("`{}` is a sweep axis and must not also be fixed", ax.param.name()),
            ));
        }
    }

    let outputs = draft
        .outputs
        .clone()
        .map(|(_, v)| v)
        .unwrap_or_else(|| DEFAULT_COLUMNS.to_vec());

    Some(SweepSpec {
        axis1,
        axis2,
        outputs,
    })
}

/// Validate a merged draft into a runnable configuration.
///
/// Keys covered by a sweep axis are exempt from the required-key check
/// (their per-point values come from the grid).
pub fn finalize(draft: &Draft) -> Result<RunConfig, Vec<ConfigError>> {
    let mut errors = Vec::new();

    let sweep = finalize_sweep(draft, &mut errors);
    let swept = |p: SweepParam| -> bool {
        sweep
            .as_ref()
            .map(|s| {
                s.axis1.param == p || s.axis2.as_ref().is_some_and(|a| a.param == p)
            })
            .unwrap_or(false)
    };

    let mut missing: Vec<&str> = Vec::new();
    if draft.tau.is_none() && !swept(SweepParam::Tau) {
        missing.push("tau");
    }
    if draft.x.is_none() && !swept(SweepParam::X) {
        missing.push("x");
    }
    if draft.n0.is_none() && !swept(SweepParam::N0) {
        missing.push("n0");
    }
    if draft.xi.is_none() && !swept(SweepParam::Xi) {
        missing.push("xi");
    }
    if draft.phi.is_none() && !swept(SweepParam::Phi) {
        missing.push("phi");
    }
    if draft.variant.is_none() {
        missing.push("variant");
    }

    let link_swept = swept(SweepParam::Eta) || swept(SweepParam::DistanceKm);
    match (&draft.eta, &draft.distance_km) {
        (Some((l1, _)), Some((l2, _))) => {
            errors.push(err(
                *l1.min(l2),
                "conflicting keys: `eta` and `distance_km` are both set",
            ));
        }
        (None, None) if !link_swept => missing.push("eta or distance_km"),
        _ => {
            if link_swept && (draft.eta.is_some() || draft.distance_km.is_some()) {
                errors.push(err(
                    0,
                    "the channel is a sweep axis and must not also be fixed",
                ));
            }
        }
    }

    if !missing.is_empty() {
        errors.push(err(
            0,
            format!("missing required key(s): {}", missing.join(", ")),
        ));
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    // placeholder values for swept parameters; the sweep engine overrides
    // them per grid point before resolving
    let link = match (&draft.eta, &draft.distance_km) {
        (Some((_, e)), None) => Link::Transmittance(*e),
        (None, Some((_, l))) => Link::DistanceKm(*l),
        _ => Link::Transmittance(1.0),
    };
    let params = ProtocolParams {
        tau: draft.tau.map(|(_, v)| v).unwrap_or(0.0),
        x: draft.x.map(|(_, v)| v).unwrap_or(Displacement::Value(0.0)),
        link,
        n0: draft.n0.map(|(_, v)| v).unwrap_or(1.0),
        xi: draft.xi.map(|(_, v)| v).unwrap_or(1.0),
        phi: draft.phi.map(|(_, v)| v).unwrap_or(1.0),
        detection: draft.detection.map(|(_, v)| v).unwrap_or(Detection::Homodyne),
        variant: draft.variant.map(|(_, v)| v).unwrap_or(Variant::Separable),
        mi_path: draft.mi_path.map(|(_, v)| v).unwrap_or(MiPath::Formula),
    };

    // catch range errors now unless the offending parameter is swept
    if let Err(e) = params.resolve() {
        if !(sweep.is_some()) {
            errors.push(err(0, e.to_string()));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    Ok(RunConfig {
        params,
        sweep,
        seed: draft.seed.map(|(_, v)| v).unwrap_or(1),
        output_path: draft.out.clone().map(|(_, v)| v),
    })
}

/// Parse and validate a complete config document.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<ConfigError>> {
    finalize(&parse_draft(text)?)
}
