//! Cross-method comparison and forward/backward contrast.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Direction;
use crate::sweep::{Method, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Transport amplitude vs semiclassical steady state with `σ_z = −1`,
    /// which agree identically.
    pub identity: f64,
    /// Any other pair.
    pub approximate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-12,
            approximate: 1e-2,
        }
    }
}

impl Tolerances {
    pub fn for_pair(&self, a: Method, b: Method) -> f64 {
        let mut pair = [a, b];
        pair.sort();
        if pair == [Method::Spt, Method::CqedSemiclassical] {
            self.identity
        } else {
            self.approximate
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub first: Method,
    pub second: Method,
    pub points_compared: usize,
    pub max_abs_diff: f64,
    pub mean_abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub delta1_over_kappa_tot: f64,
    pub transmission: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDips {
    pub method: Method,
    pub dips: Vec<Dip>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub direction: Direction,
    pub pairs: Vec<PairReport>,
    pub dips: Vec<MethodDips>,
    pub pass: bool,
}

/// Interior local minima: strictly below the left neighbour and not above
/// the right one.
pub fn find_dips(points: &[(f64, f64)]) -> Vec<Dip> {
    points
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 <= w[2].1)
        .map(|w| Dip {
            delta1_over_kappa_tot: w[1].0,
            transmission: w[1].1,
        })
        .collect()
}

/// Compares every pair of methods found in `spectra`, which must share one
/// grid and one direction.
pub fn compare_report(spectra: &[Spectrum], tol: &Tolerances) -> Result<CompareReport> {
    let first = spectra
        .first()
        .ok_or_else(|| Error::Domain("no spectra to compare".into()))?;
    for s in &spectra[1..] {
        if s.delta1_over_kappa_tot != first.delta1_over_kappa_tot {
            return Err(Error::GridMismatch(format!(
                "grids of {} and {} points differ",
                first.delta1_over_kappa_tot.len(),
                s.delta1_over_kappa_tot.len()
            )));
        }
        if s.direction != first.direction {
            return Err(Error::GridMismatch("spectra belong to different directions".into()));
        }
    }
    let series: Vec<_> = spectra.iter().flat_map(|s| s.series.iter()).collect();
    for (i, s) in series.iter().enumerate() {
        if s.transmission.len() != first.delta1_over_kappa_tot.len() {
            return Err(Error::GridMismatch(format!("series {} has the wrong length", s.method)));
        }
        if series[..i].iter().any(|t| t.method == s.method) {
            return Err(Error::Domain(format!("method {} appears twice", s.method)));
        }
    }
    if series.len() < 2 {
        return Err(Error::Domain("comparison needs at least two methods".into()));
    }

    let mut pairs = Vec::new();
    for (i, a) in series.iter().enumerate() {
        for b in &series[i + 1..] {
            let diffs: Vec<f64> = a
                .transmission
                .iter()
                .zip(&b.transmission)
                .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).abs()))
                .collect();
            let n = diffs.len();
            let max_abs_diff = diffs.iter().copied().fold(0.0, f64::max);
            let mean_abs_diff = if n == 0 { 0.0 } else { diffs.iter().sum::<f64>() / n as f64 };
            let tolerance = tol.for_pair(a.method, b.method);
            pairs.push(PairReport {
                first: a.method,
                second: b.method,
                points_compared: n,
                max_abs_diff,
                mean_abs_diff,
                tolerance,
                pass: n > 0 && max_abs_diff < tolerance,
            });
        }
    }
    let dips = series
        .iter()
        .map(|s| {
            let pts: Vec<(f64, f64)> = first
                .delta1_over_kappa_tot
                .iter()
                .zip(&s.transmission)
                .filter_map(|(&x, t)| t.map(|t| (x, t)))
                .collect();
            MethodDips {
                method: s.method,
                dips: find_dips(&pts),
            }
        })
        .collect();
    Ok(CompareReport {
        direction: first.direction,
        pass: pairs.iter().all(|p| p.pass),
        pairs,
        dips,
    })
}

pub fn render_compare(report: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "direction: {}", report.direction.as_str());
    for p in &report.pairs {
        let _ = writeln!(
            out,
            "{:<4} {} vs {}: max |dT| = {:.3e}, mean |dT| = {:.3e} over {} points (tolerance {:.0e})",
            if p.pass { "PASS" } else { "FAIL" },
            p.first,
            p.second,
            p.max_abs_diff,
            p.mean_abs_diff,
            p.points_compared,
            p.tolerance
        );
    }
    for d in &report.dips {
        let list: Vec<String> = d
            .dips
            .iter()
            .map(|x| format!("{:.4} (T = {:.4e})", x.delta1_over_kappa_tot, x.transmission))
            .collect();
        let _ = writeln!(out, "dips {}: {}", d.method, if list.is_empty() { "none".into() } else { list.join(", ") });
    }
    let _ = writeln!(out, "overall: {}", if report.pass { "PASS" } else { "FAIL" });
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiralityEntry {
    pub method: Method,
    /// Grid point closest to resonance at which the method was evaluated.
    pub delta1_over_kappa_tot: f64,
    pub forward: f64,
    pub backward: f64,
    /// Largest `|T_forward − T_backward|` over the grid.
    pub max_contrast: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiralityReport {
    pub entries: Vec<ChiralityEntry>,
}

pub fn chirality_report(forward: &Spectrum, backward: &Spectrum) -> Result<ChiralityReport> {
    if forward.delta1_over_kappa_tot != backward.delta1_over_kappa_tot {
        return Err(Error::GridMismatch("forward and backward grids differ".into()));
    }
    let mut entries = Vec::new();
    for fs in &forward.series {
        let Some(bs) = backward.series(fs.method) else {
            continue;
        };
        let both: Vec<(f64, f64, f64)> = forward
            .delta1_over_kappa_tot
            .iter()
            .zip(fs.transmission.iter().zip(&bs.transmission))
            .filter_map(|(&x, (f, b))| Some((x, (*f)?, (*b)?)))
            .collect();
        let Some(&(x, f, b)) = both.iter().min_by(|p, q| p.0.abs().total_cmp(&q.0.abs())) else {
            continue;
        };
        entries.push(ChiralityEntry {
            method: fs.method,
            delta1_over_kappa_tot: x,
            forward: f,
            backward: b,
            max_contrast: both.iter().map(|p| (p.1 - p.2).abs()).fold(0.0, f64::max),
        });
    }
    if entries.is_empty() {
        return Err(Error::Domain("no method was evaluated in both directions".into()));
    }
    Ok(ChiralityReport { entries })
}

pub fn render_chirality(report: &ChiralityReport) -> String {
    let mut out = String::new();
    for e in &report.entries {
        let _ = writeln!(
            out,
            "{}: at delta1/kappa_tot = {}: T_forward = {:.6e}, T_backward = {:.6e}; max contrast {:.6e}",
            e.method, e.delta1_over_kappa_tot, e.forward, e.backward, e.max_contrast
        );
    }
    out
}
