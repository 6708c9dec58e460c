//! JSON configuration files.
//!
//! Every rate key is a frequency divided by 2π, in Hz. Either member of the
//! `Gamma_over_2pi_hz | g_over_2pi_hz` and `h_over_2pi_hz | epsilon` pairs
//! may be given; the other is derived. Unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{Map, Value};

use crate::cqed::{HilbertSpace, MasterOptions, RateUnit, SteadyStateMethod};
use crate::error::{Error, Result};
use crate::model::{
    angular_from_hz, BackscatterSpec, BridgeForm, Direction, EmitterSpec, RateSet, RingGeometry, SystemConfig,
};
use crate::sweep::{Method, SweepSpec};

/// Everything a configuration file describes, plus the parsed document.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub system: SystemConfig,
    pub sweep: SweepSpec,
    pub master: MasterOptions,
    /// The document as read, echoed into output metadata.
    pub raw: Value,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let raw: Value = if text.trim().is_empty() {
        Value::Object(Map::new())
    } else {
        serde_json::from_str(text).map_err(|e| Error::config("$", format!("invalid JSON: {e}")))?
    };
    let root = raw
        .as_object()
        .ok_or_else(|| Error::config("$", "top level must be an object"))?;
    let empty = Map::new();
    let mut top = Section::new("", root);

    let rates_obj = top.object("rates")?;
    let geometry_obj = top.object("geometry")?;
    let mut rates = Section::new("rates", rates_obj.unwrap_or(&empty));
    let kappa_ex = rates.required("kappa_ex_over_2pi_hz")?;
    let kappa_in = rates.required("kappa_in_over_2pi_hz")?;
    let gamma = rates.required("gamma_over_2pi_hz")?;
    let big_gamma = rates.optional("Gamma_over_2pi_hz")?;
    let g = rates.optional("g_over_2pi_hz")?;
    let h = rates.optional("h_over_2pi_hz")?;
    let epsilon = rates.optional("epsilon")?;
    let omega_qe = rates.optional("omega_qe_over_2pi_hz")?;
    rates.finish()?;

    let mut geo = Section::new("geometry", geometry_obj.unwrap_or(&empty));
    let radius = geo.required("radius_m")?;
    let n_eff = geo.required("n_eff")?;
    let fsr = geo.required("fsr_over_2pi_hz")?;
    let resonance = geo.required("resonance_over_2pi_hz")?;
    geo.finish()?;
    let geometry = RingGeometry::new(radius, n_eff, angular_from_hz(fsr), angular_from_hz(resonance))
        .map_err(|e| at("geometry", e))?;

    let emitter = match (big_gamma, g) {
        (Some(d), Some(c)) => EmitterSpec::Both {
            decay: angular_from_hz(d),
            coupling: angular_from_hz(c),
        },
        (Some(d), None) => EmitterSpec::Decay(angular_from_hz(d)),
        (None, Some(c)) => EmitterSpec::Coupling(angular_from_hz(c)),
        (None, None) => EmitterSpec::Decay(0.0),
    };
    let backscatter = match (h, epsilon) {
        (Some(r), Some(s)) => BackscatterSpec::Both {
            strength: s,
            rate: angular_from_hz(r),
        },
        (Some(r), None) => BackscatterSpec::Rate(angular_from_hz(r)),
        (None, Some(s)) => BackscatterSpec::Strength(s),
        (None, None) => BackscatterSpec::Rate(0.0),
    };
    let pair_path = match (big_gamma.is_some() && g.is_some(), h.is_some() && epsilon.is_some()) {
        (true, _) => "rates.g_over_2pi_hz",
        (false, true) => "rates.h_over_2pi_hz",
        _ => "rates",
    };
    let rate_set = RateSet::bridged(
        angular_from_hz(kappa_in),
        angular_from_hz(kappa_ex),
        angular_from_hz(gamma),
        emitter,
        backscatter,
        omega_qe.map_or(geometry.resonance(), angular_from_hz),
        geometry.fsr(),
    )
    .map_err(|e| at(pair_path, e))?;

    let drive_obj = top.object("drive")?;
    let mut drive = Section::new("drive", drive_obj.unwrap_or(&empty));
    let alpha_in = drive.optional("alpha_in")?.unwrap_or(DEFAULT_ALPHA_IN);
    drive.finish()?;

    let directions = match top.string("direction")? {
        None => vec![Direction::Forward],
        Some("both") => vec![Direction::Forward, Direction::Backward],
        Some(s) => vec![s
            .parse::<Direction>()
            .map_err(|_| Error::config("direction", format!("expected forward, backward or both, got {s:?}")))?],
    };
    let sigma_z = top.number("sigma_z")?.unwrap_or(-1.0);
    let form = match top.string("bridge_form")? {
        None | Some("exact") => BridgeForm::Exact,
        Some("first-order") => BridgeForm::FirstOrder,
        Some(s) => {
            return Err(Error::config(
                "bridge_form",
                format!("expected exact or first-order, got {s:?}"),
            ))
        }
    };

    let system = SystemConfig::new(geometry, rate_set, alpha_in, directions[0], sigma_z, form).map_err(|e| match e {
        Error::Config { .. } => e,
        other => at("rates", other),
    })?;

    let sweep_obj = top.object("sweep")?;
    let sweep = parse_sweep(sweep_obj.unwrap_or(&empty), directions)?;
    let master_obj = top.object("master")?;
    let master = parse_master(master_obj.unwrap_or(&empty))?;
    top.finish()?;

    Ok(LoadedConfig {
        system,
        sweep,
        master,
        raw,
    })
}

pub const DEFAULT_ALPHA_IN: f64 = 0.1;

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::config(path, other.to_string()),
    }
}

fn parse_sweep(obj: &Map<String, Value>, directions: Vec<Direction>) -> Result<SweepSpec> {
    let d = SweepSpec::default();
    let mut s = Section::new("sweep", obj);
    let min = s.optional("min_over_kappa_tot")?.unwrap_or(d.min_over_kappa_tot);
    let max = s.optional("max_over_kappa_tot")?.unwrap_or(d.max_over_kappa_tot);
    let points = s.count("points")?.unwrap_or(d.points);
    let master_stride = s.count("master_stride")?.unwrap_or(d.master_stride);
    let methods = match s.take("methods") {
        None => d.methods,
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let path = format!("sweep.methods[{i}]");
                v.as_str()
                    .ok_or_else(|| Error::config(&path, "expected a string"))?
                    .parse::<Method>()
                    .map_err(|e| Error::config(&path, e))
            })
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(Error::config("sweep.methods", "expected an array of method names")),
    };
    s.finish()?;
    let spec = SweepSpec {
        min_over_kappa_tot: min,
        max_over_kappa_tot: max,
        points,
        methods,
        master_stride,
        directions,
    };
    spec.validate().map_err(|e| at("sweep", e))?;
    Ok(spec)
}

fn parse_master(obj: &Map<String, Value>) -> Result<MasterOptions> {
    let mut opts = MasterOptions::default();
    let mut s = Section::new("master", obj);
    if let Some(n) = s.count("n_max")? {
        opts.space = HilbertSpace::new(n, n).map_err(|e| match e {
            Error::Config { message, .. } => Error::config("master.n_max", message),
            other => other,
        })?;
    }
    match s.take("rate_unit_over_2pi_hz") {
        None => {}
        Some(Value::String(k)) if k == "gamma" => opts.rate_unit = RateUnit::Gamma,
        Some(Value::String(k)) if k == "kappa_tot" => opts.rate_unit = RateUnit::KappaTot,
        Some(Value::Number(n)) => {
            let hz = n.as_f64().unwrap_or(f64::NAN);
            if !(hz.is_finite() && hz > 0.0) {
                return Err(Error::config("master.rate_unit_over_2pi_hz", "must be positive"));
            }
            opts.rate_unit = RateUnit::Angular(angular_from_hz(hz));
        }
        Some(_) => {
            return Err(Error::config(
                "master.rate_unit_over_2pi_hz",
                "expected a positive number, \"gamma\" or \"kappa_tot\"",
            ))
        }
    }
    if let Some(m) = s.string("method")? {
        opts.method = match m {
            "linear-solve" => SteadyStateMethod::LinearSolve,
            "null-space" => SteadyStateMethod::NullSpace,
            "time-evolution" => SteadyStateMethod::TimeEvolution,
            other => {
                return Err(Error::config(
                    "master.method",
                    format!("expected linear-solve, null-space or time-evolution, got {other:?}"),
                ))
            }
        };
    }
    s.finish()?;
    Ok(opts)
}

/// One JSON object being consumed key by key.
struct Section<'a> {
    prefix: &'static str,
    map: &'a Map<String, Value>,
    seen: BTreeSet<&'a str>,
}

impl<'a> Section<'a> {
    fn new(prefix: &'static str, map: &'a Map<String, Value>) -> Self {
        Section {
            prefix,
            map,
            seen: BTreeSet::new(),
        }
    }

    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn take(&mut self, key: &str) -> Option<&'a Value> {
        let (k, v) = self.map.get_key_value(key)?;
        self.seen.insert(k.as_str());
        Some(v)
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(Error::config(self.path(key), "expected a finite number")),
            },
        }
    }

    fn optional(&mut self, key: &str) -> Result<Option<f64>> {
        self.number(key)
    }

    fn required(&mut self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| Error::config(self.path(key), "missing required key"))
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .and_then(|n| usize::try_from(n).ok())
                .map(Some)
                .ok_or_else(|| Error::config(self.path(key), "expected a non-negative integer")),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<&'a str>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(Error::config(self.path(key), "expected a string")),
        }
    }

    fn object(&mut self, key: &str) -> Result<Option<&'a Map<String, Value>>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Object(m)) => Ok(Some(m)),
            Some(_) => Err(Error::config(self.path(key), "expected an object")),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().find(|k| !self.seen.contains(k.as_str())) {
            Some(k) => Err(Error::config(self.path(k), "unknown key")),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    const BASELINE: &str = r#"{
        "geometry": {"radius_m": 10.5e-6, "n_eff": 1.5, "fsr_over_2pi_hz": 3e12, "resonance_over_2pi_hz": 300e12},
        "rates": {"kappa_in_over_2pi_hz": 30e9, "kappa_ex_over_2pi_hz": 30e9, "gamma_over_2pi_hz": 6e6,
                  "Gamma_over_2pi_hz": 600e6, "h_over_2pi_hz": 30e9},
        "drive": {"alpha_in": 0.1},
        "direction": "forward"
    }"#;

    fn path_of(e: Error) -> String {
        match e {
            Error::Config { path, .. } => path,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn baseline_values() {
        let c = parse_config(BASELINE).unwrap();
        assert_eq!(c.system.rates.kappa_ex, TAU * 30e9);
        assert_eq!(c.system.rates.gamma, TAU * 6e6);
        assert_eq!(c.system.rates.omega_qe, c.system.geometry.resonance());
        assert_eq!(c.sweep.points, 2001);
        assert_eq!(c.sweep.directions, vec![Direction::Forward]);
    }

    #[test]
    fn empty_file_names_first_missing_key() {
        assert_eq!(path_of(parse_config("").unwrap_err()), "rates.kappa_ex_over_2pi_hz");
        assert_eq!(path_of(parse_config("{}").unwrap_err()), "rates.kappa_ex_over_2pi_hz");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = BASELINE.replace("\"n_eff\"", "\"n_ef\": 1, \"n_eff\"");
        assert_eq!(path_of(parse_config(&text).unwrap_err()), "geometry.n_ef");
        let text = BASELINE.replace("\"direction\"", "\"colour\": 1, \"direction\"");
        assert_eq!(path_of(parse_config(&text).unwrap_err()), "colour");
    }

    #[test]
    fn inconsistent_emitter_pair() {
        let text = BASELINE.replace("\"Gamma_over_2pi_hz\": 600e6", "\"Gamma_over_2pi_hz\": 600e6, \"g_over_2pi_hz\": 1e9");
        assert_eq!(path_of(parse_config(&text).unwrap_err()), "rates.g_over_2pi_hz");
    }

    #[test]
    fn consistent_emitter_pair_accepted() {
        let g = (600e6_f64 * (2.0 * 3e12 - 60e9)).sqrt();
        let text = BASELINE.replace(
            "\"Gamma_over_2pi_hz\": 600e6",
            &format!("\"Gamma_over_2pi_hz\": 600e6, \"g_over_2pi_hz\": {g}"),
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(c.system.rates.g, TAU * g);
    }

    #[test]
    fn wrong_types_are_reported() {
        let text = BASELINE.replace("\"n_eff\": 1.5", "\"n_eff\": \"1.5\"");
        assert_eq!(path_of(parse_config(&text).unwrap_err()), "geometry.n_eff");
        let text = BASELINE.replace("\"forward\"", "\"sideways\"");
        assert_eq!(path_of(parse_config(&text).unwrap_err()), "direction");
    }

    #[test]
    fn sweep_and_master_sections() {
        let text = BASELINE.replace(
            "\"direction\": \"forward\"",
            r#""direction": "both",
               "sweep": {"min_over_kappa_tot": -2, "max_over_kappa_tot": 3, "points": 11,
                         "methods": ["spt", "cqed-master"], "master_stride": 5},
               "master": {"n_max": 3, "rate_unit_over_2pi_hz": 1e9, "method": "null-space"}"#,
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(c.sweep.points, 11);
        assert_eq!(c.sweep.methods, vec![Method::Spt, Method::CqedMaster]);
        assert_eq!(c.sweep.directions, vec![Direction::Forward, Direction::Backward]);
        assert_eq!(c.master.space.levels_a, 3);
        assert_eq!(c.master.rate_unit, RateUnit::Angular(TAU * 1e9));
        assert_eq!(c.master.method, SteadyStateMethod::NullSpace);

        let bad = BASELINE.replace("\"direction\": \"forward\"", r#""sweep": {"methods": ["fdtd"]}"#);
        assert_eq!(path_of(parse_config(&bad).unwrap_err()), "sweep.methods[0]");
        let bad = BASELINE.replace("\"direction\": \"forward\"", r#""sweep": {"points": 1}"#);
        assert_eq!(path_of(parse_config(&bad).unwrap_err()), "sweep");
    }

    #[test]
    fn invalid_json_is_a_validation_error() {
        assert_eq!(parse_config("{").unwrap_err().exit_code(), 1);
    }
}
