//! Detuning sweeps across the four descriptions.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cqed::{master_transmission, semiclassical_transmission_at, MasterOptions, Physicality};
use crate::error::{Error, Result};
use crate::model::{Direction, SystemConfig};
use crate::spt::{spt_power, SptInput};
use crate::tm::tm_transmission;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Tm,
    Spt,
    CqedSemiclassical,
    CqedMaster,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Tm, Method::Spt, Method::CqedSemiclassical, Method::CqedMaster];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Tm => "tm",
            Method::Spt => "spt",
            Method::CqedSemiclassical => "cqed-semiclassical",
            Method::CqedMaster => "cqed-master",
        }
    }

    /// CSV column header.
    pub fn column(&self) -> &'static str {
        match self {
            Method::Tm => "T_tm",
            Method::Spt => "T_spt",
            Method::CqedSemiclassical => "T_cqed_semiclassical",
            Method::CqedMaster => "T_cqed_master",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected tm, spt, cqed-semiclassical or cqed-master)"))
    }
}

/// Detuning grid and method selection. Detunings are in units of `κ_tot`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub min_over_kappa_tot: f64,
    pub max_over_kappa_tot: f64,
    pub points: usize,
    pub methods: Vec<Method>,
    /// The master equation is solved at every `master_stride`-th grid point.
    pub master_stride: usize,
    pub directions: Vec<Direction>,
}

pub const MAX_POINTS: usize = 10_000_000;

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            min_over_kappa_tot: -10.0,
            max_over_kappa_tot: 10.0,
            points: 2001,
            methods: Method::ALL.to_vec(),
            master_stride: 10,
            directions: vec![Direction::Forward],
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.min_over_kappa_tot, self.max_over_kappa_tot);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("range must satisfy min < max, got [{lo}, {hi}]")));
        }
        if !(2..=MAX_POINTS).contains(&self.points) {
            return Err(Error::Domain(format!("point count must lie in [2, {MAX_POINTS}], got {}", self.points)));
        }
        if self.methods.is_empty() {
            return Err(Error::Domain("at least one method must be selected".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::Domain(format!("method {m} selected twice")));
            }
        }
        if self.master_stride == 0 {
            return Err(Error::Domain("master stride must be at least 1".into()));
        }
        if self.directions.is_empty() {
            return Err(Error::Domain("at least one direction must be selected".into()));
        }
        Ok(())
    }

    /// Evenly spaced detunings in units of `κ_tot`, endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = (self.min_over_kappa_tot, self.max_over_kappa_tot);
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64) / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub method: Method,
    /// `None` where the method was not evaluated.
    pub transmission: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDiff {
    pub first: Method,
    pub second: Method,
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterCertificate {
    pub index: usize,
    pub delta1_over_kappa_tot: f64,
    pub residual: f64,
    pub physicality: Physicality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterMetadata {
    pub options: MasterOptions,
    pub residual_tol: f64,
    pub certificates: Vec<MasterCertificate>,
    pub all_physical: bool,
    pub truncation_adequate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub config: SystemConfig,
    /// Configuration document as read from disk, if any.
    pub input: Option<Value>,
    pub sweep: SweepSpec,
    pub kappa_tot: f64,
    pub master: Option<MasterMetadata>,
    pub pairwise: Vec<PairDiff>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub direction: Direction,
    pub delta1_over_kappa_tot: Vec<f64>,
    pub series: Vec<Series>,
    pub metadata: SpectrumMetadata,
}

impl Spectrum {
    pub fn series(&self, method: Method) -> Option<&Series> {
        self.series.iter().find(|s| s.method == method)
    }

    /// Transmission of `method` at every grid point where it was evaluated.
    pub fn values(&self, method: Method) -> Option<Vec<(f64, f64)>> {
        let s = self.series(method)?;
        Some(
            self.delta1_over_kappa_tot
                .iter()
                .zip(&s.transmission)
                .filter_map(|(&x, t)| t.map(|t| (x, t)))
                .collect(),
        )
    }
}

/// Largest accepted transmission; anything above signals a solver problem.
pub const TRANSMISSION_CEILING: f64 = 1.0 + 1e-9;

fn point_error(x: f64, source: Error) -> Error {
    Error::AtGridPoint {
        delta1_over_kappa_tot: x,
        source: Box::new(source),
    }
}

fn check_range(t: f64) -> Result<f64> {
    if t.is_finite() && (0.0..=TRANSMISSION_CEILING).contains(&t) {
        Ok(t)
    } else {
        Err(Error::Convergence(format!("transmission {t} lies outside [0, 1]")))
    }
}

fn closed_form(method: Method, config: &SystemConfig, delta1: f64) -> Result<f64> {
    match method {
        Method::Tm => tm_transmission(config, delta1).map(|t| t.norm_sqr()),
        Method::Spt => spt_power(&SptInput::from_config(config, delta1)),
        Method::CqedSemiclassical => semiclassical_transmission_at(config, delta1).map(|t| t.norm_sqr()),
        Method::CqedMaster => unreachable!("master equation is not a closed form"),
    }
}

/// Sweeps every selected method for the direction stored in `config`.
pub fn run_sweep(config: &SystemConfig, spec: &SweepSpec, master: &MasterOptions) -> Result<Spectrum> {
    spec.validate()?;
    let kappa = config.rates.kappa_tot();
    if !(kappa > 0.0) {
        return Err(Error::Domain("detunings are scaled by kappa_tot, which must be positive".into()));
    }
    let grid = spec.grid();
    // An inverted emitter amplifies in the frozen-inversion picture.
    let inverted = config.sigma_z > 0.0;
    let mut series = Vec::with_capacity(spec.methods.len());
    let mut master_meta = None;
    for &method in &spec.methods {
        let transmission = if method == Method::CqedMaster {
            let idx: Vec<usize> = (0..grid.len()).step_by(spec.master_stride).collect();
            let results = idx
                .par_iter()
                .map(|&i| {
                    let x = grid[i];
                    master_transmission(config, x * kappa, master)
                        .and_then(|r| check_range(r.transmission).map(|_| r))
                        .map_err(|e| point_error(x, e))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut values = vec![None; grid.len()];
            let mut certificates = Vec::with_capacity(idx.len());
            for (&i, r) in idx.iter().zip(&results) {
                values[i] = Some(r.transmission);
                certificates.push(MasterCertificate {
                    index: i,
                    delta1_over_kappa_tot: grid[i],
                    residual: r.residual,
                    physicality: r.physicality,
                });
            }
            master_meta = Some(MasterMetadata {
                options: *master,
                residual_tol: crate::cqed::steady::RESIDUAL_TOL,
                all_physical: certificates.iter().all(|c| c.physicality.is_physical()),
                truncation_adequate: certificates.iter().all(|c| c.physicality.truncation_adequate()),
                certificates,
            });
            values
        } else {
            grid.par_iter()
                .map(|&x| {
                    closed_form(method, config, x * kappa)
                        .and_then(|t| if inverted && method == Method::CqedSemiclassical { Ok(t) } else { check_range(t) })
                        .map(Some)
                        .map_err(|e| point_error(x, e))
                })
                .collect::<Result<Vec<_>>>()?
        };
        series.push(Series { method, transmission });
    }
    let pairwise = pairwise_max_diffs(&series);
    Ok(Spectrum {
        direction: config.direction,
        delta1_over_kappa_tot: grid,
        series,
        metadata: SpectrumMetadata {
            config: *config,
            input: None,
            sweep: spec.clone(),
            kappa_tot: kappa,
            master: master_meta,
            pairwise,
        },
    })
}

/// One spectrum per direction in `spec.directions`.
pub fn run_directions(config: &SystemConfig, spec: &SweepSpec, master: &MasterOptions) -> Result<Vec<Spectrum>> {
    spec.directions
        .iter()
        .map(|&d| run_sweep(&config.with_direction(d), spec, master))
        .collect()
}

pub(crate) fn pairwise_max_diffs(series: &[Series]) -> Vec<PairDiff> {
    let mut out = Vec::new();
    for (i, a) in series.iter().enumerate() {
        for b in &series[i + 1..] {
            let max_abs_diff = a
                .transmission
                .iter()
                .zip(&b.transmission)
                .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).abs()))
                .fold(0.0, f64::max);
            out.push(PairDiff {
                first: a.method,
                second: b.method,
                max_abs_diff,
            });
        }
    }
    out
}
