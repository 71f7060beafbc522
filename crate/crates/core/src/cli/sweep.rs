//! Parameter sweeps over the isotropic family.

use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::detect::{f_hat, f_hat_isotropic_closed_form, isotropic_state, v_hat, MeasureReport, Verdict};
use crate::error::{Error, Result};
use crate::measures::{q_uncertainty_spectral, total_variance, von_neumann_entropy};
use crate::numfmt::fmt_f64;
use crate::qstate::Subsystem;
use crate::specfun::MonotoneFunctionSpec;

/// Refuse grids larger than this.
const MAX_POINTS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Isotropic,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ParamGrid {
    /// Grid points from `start` up to `stop`. When `step` divides the
    /// interval the points are `start + (stop - start) k / N`, which lands
    /// exactly on `stop`.
    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let ratio = span / self.step;
        let n = (ratio + 1e-9).floor() as usize;
        if (ratio - n as f64).abs() <= 1e-9 && n > 0 {
            (0..=n).map(|k| self.start + span * k as f64 / n as f64).collect()
        } else {
            (0..=n).map(|k| self.start + self.step * k as f64).collect()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::Domain("param_grid entries must be finite".into()));
        }
        if self.start > self.stop {
            return Err(Error::Domain(format!("param_grid start {} exceeds stop {}", self.start, self.stop)));
        }
        if self.step <= 0.0 {
            return Err(Error::Domain(format!("param_grid step must be positive, got {}", self.step)));
        }
        if (self.stop - self.start) / self.step >= MAX_POINTS as f64 {
            return Err(Error::Domain(format!("param_grid has more than {MAX_POINTS} points")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum SweepOutput {
    #[serde(rename = "f_hat")]
    FHat,
    #[serde(rename = "f_hat_closed")]
    FHatClosed,
    #[serde(rename = "v_hat")]
    VHat,
    #[serde(rename = "q_a")]
    QA,
    #[serde(rename = "q_b")]
    QB,
    #[serde(rename = "entropy")]
    Entropy,
    #[serde(rename = "total_variance")]
    TotalVariance,
}

impl SweepOutput {
    pub fn name(self) -> &'static str {
        match self {
            SweepOutput::FHat => "f_hat",
            SweepOutput::FHatClosed => "f_hat_closed",
            SweepOutput::VHat => "v_hat",
            SweepOutput::QA => "q_a",
            SweepOutput::QB => "q_b",
            SweepOutput::Entropy => "entropy",
            SweepOutput::TotalVariance => "total_variance",
        }
    }

    /// Whether the output depends on the choice of `f`.
    pub fn per_spec(self) -> bool {
        matches!(self, SweepOutput::FHat | SweepOutput::FHatClosed | SweepOutput::QA | SweepOutput::QB)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    family: Family,
    dim: usize,
    param_grid: ParamGrid,
    specs: Vec<String>,
    outputs: Vec<SweepOutput>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub dim: usize,
    pub param_grid: ParamGrid,
    pub specs: Vec<MonotoneFunctionSpec>,
    pub outputs: Vec<SweepOutput>,
}

impl SweepConfig {
    pub fn new(
        family: Family,
        dim: usize,
        param_grid: ParamGrid,
        specs: Vec<MonotoneFunctionSpec>,
        outputs: Vec<SweepOutput>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("sweep dim must be at least 2, got {dim}")));
        }
        param_grid.validate()?;
        if param_grid.start < 0.0 || param_grid.stop > 1.0 {
            return Err(Error::Domain("isotropic parameter must lie in [0, 1]".into()));
        }
        if specs.is_empty() {
            return Err(Error::Domain("sweep needs at least one spec".into()));
        }
        Ok(Self { family, dim, param_grid, specs, outputs })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse(format!("sweep config: {e}")))?;
        let specs = raw.specs.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?;
        Self::new(raw.family, raw.dim, raw.param_grid, specs, raw.outputs)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// `param`, then `<output>:<spec>` for spec-dependent outputs or the bare
    /// output name otherwise, then `verdict`.
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["param".to_string()];
        for out in &self.outputs {
            if out.per_spec() {
                h.extend(self.specs.iter().map(|s| format!("{}:{}", out.name(), s)));
            } else {
                h.push(out.name().to_string());
            }
        }
        h.push("verdict".into());
        h
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub param: f64,
    /// One entry per header column between `param` and `verdict`.
    pub values: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        if idx == 0 {
            return Some(self.rows.iter().map(|r| r.param).collect());
        }
        self.rows.iter().map(|r| r.values.get(idx - 1).copied()).collect()
    }

    pub fn write_csv<W: io::Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&self.header)?;
        for row in &self.rows {
            let mut rec = Vec::with_capacity(row.values.len() + 2);
            rec.push(fmt_f64(row.param));
            rec.extend(row.values.iter().map(|&v| fmt_f64(v)));
            rec.push(row.verdict.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn sweep_row(cfg: &SweepConfig, p: f64) -> Result<ResultRow> {
    let d = cfg.dim;
    let state = isotropic_state(p, d)?;
    let f_hats = cfg.specs.iter().map(|&s| f_hat(s, &state)).collect::<Result<Vec<_>>>()?;
    let vh = v_hat(&state)?;
    let rho_a = state.partial_trace(Subsystem::A);
    let rho_b = state.partial_trace(Subsystem::B);

    let mut values = Vec::new();
    for out in &cfg.outputs {
        match out {
            SweepOutput::FHat => values.extend(&f_hats),
            SweepOutput::FHatClosed => {
                for (&spec, &numeric) in cfg.specs.iter().zip(&f_hats) {
                    values.push(match f_hat_isotropic_closed_form(spec, p, d) {
                        Ok(v) => v,
                        Err(Error::Unsupported(_)) => numeric,
                        Err(e) => return Err(e),
                    });
                }
            }
            SweepOutput::VHat => values.push(vh),
            SweepOutput::QA => values.extend(cfg.specs.iter().map(|&s| q_uncertainty_spectral(s, &rho_a))),
            SweepOutput::QB => values.extend(cfg.specs.iter().map(|&s| q_uncertainty_spectral(s, &rho_b))),
            SweepOutput::Entropy => values.push(von_neumann_entropy(state.state())),
            SweepOutput::TotalVariance => values.push(total_variance(state.state())),
        }
    }

    let fires =
        cfg.specs.iter().zip(&f_hats).any(|(&s, &v)| MeasureReport::f_hat(s, v, d).verdict == Verdict::Entangled)
            || MeasureReport::v_hat(vh, d).verdict == Verdict::Entangled;
    let verdict = if fires { Verdict::Entangled } else { Verdict::Inconclusive };
    Ok(ResultRow { param: p, values, verdict })
}

/// Evaluates every grid point, in parallel. Rows come back in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    let rows = cfg.param_grid.points().par_iter().map(|&p| sweep_row(cfg, p)).collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { header: cfg.header(), rows })
}

pub fn write_sweep_csv(path: &Path, table: &SweepTable) -> Result<()> {
    table.write_csv(fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(outputs: &str, specs: &str, grid: &str) -> String {
        format!(r#"{{"family": "isotropic", "dim": 3, "param_grid": {grid}, "specs": {specs}, "outputs": {outputs}}}"#)
    }

    #[test]
    fn grid_points() {
        let g = ParamGrid { start: 0.0, stop: 1.0, step: 0.1 };
        let pts = g.points();
        assert_eq!(pts.len(), 11);
        assert_eq!(pts[7], 0.7);
        assert_eq!(pts[10], 1.0);
        assert_eq!(ParamGrid { start: 0.3, stop: 0.3, step: 0.1 }.points(), vec![0.3]);
        let uneven = ParamGrid { start: 0.0, stop: 1.0, step: 0.3 }.points();
        assert_eq!(uneven.len(), 4);
        assert!(uneven[3] < 1.0);
        assert_eq!(ParamGrid { start: 0.0, stop: 1.0, step: 0.05 }.points().len(), 21);
    }

    #[test]
    fn example_row() {
        let cfg = SweepConfig::parse(&config(
            r#"["f_hat", "v_hat"]"#,
            r#"["sld"]"#,
            r#"{"start": 0, "stop": 1, "step": 0.1}"#,
        ))
        .unwrap();
        assert_eq!(cfg.header(), ["param", "f_hat:sld", "v_hat", "verdict"]);
        let table = run_sweep(&cfg).unwrap();
        assert_eq!(table.rows.len(), 11);
        let row = &table.rows[7];
        assert_eq!(row.param, 0.7);
        assert!((row.values[0] - 4.26087).abs() < 1e-5);
        assert!((row.values[1] - 6.26667).abs() < 1e-5);
        assert_eq!(row.verdict, Verdict::Entangled);
        assert_eq!(table.rows[0].verdict, Verdict::Inconclusive);
        let params = table.column("param").unwrap();
        assert!(params.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn all_outputs_and_closed_form() {
        let cfg = SweepConfig::parse(&config(
            r#"["f_hat", "f_hat_closed", "v_hat", "q_a", "q_b", "entropy", "total_variance"]"#,
            r#"["wy", "sld"]"#,
            r#"{"start": 0, "stop": 1, "step": 0.25}"#,
        ))
        .unwrap();
        let table = run_sweep(&cfg).unwrap();
        assert_eq!(table.header.len(), 1 + 2 + 2 + 1 + 2 + 2 + 1 + 1 + 1);
        for row in &table.rows {
            assert_eq!(row.values.len(), table.header.len() - 2);
        }
        let num = table.column("f_hat:wy").unwrap();
        let closed = table.column("f_hat_closed:wy").unwrap();
        for (a, b) in num.iter().zip(&closed) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-300) + 1e-15);
        }
        // reduced states of the isotropic family are maximally mixed
        for v in table.column("q_a:sld").unwrap() {
            assert!(v.abs() < 1e-12);
        }
        let tv = table.column("total_variance").unwrap();
        assert!((tv[0] - (9.0 - 1.0 / 9.0)).abs() < 1e-12);
        assert!((tv[4] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_falls_back_for_other_dims() {
        let text = r#"{"family": "isotropic", "dim": 2, "param_grid": {"start": 0.5, "stop": 0.5, "step": 1},
            "specs": ["sld"], "outputs": ["f_hat", "f_hat_closed"]}"#;
        let table = run_sweep(&SweepConfig::parse(text).unwrap()).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].values[0], table.rows[0].values[1]);
    }

    #[test]
    fn invalid_configs() {
        let grid = r#"{"start": 0, "stop": 1, "step": 0.1}"#;
        assert!(SweepConfig::parse(&config(r#"["f_hat"]"#, r#"[]"#, grid)).is_err());
        assert!(SweepConfig::parse(&config(r#"["f_hat"]"#, r#"["nope"]"#, grid)).is_err());
        assert!(SweepConfig::parse(&config(r#"["bogus"]"#, r#"["sld"]"#, grid)).is_err());
        for bad in [
            r#"{"start": 1, "stop": 0, "step": 0.1}"#,
            r#"{"start": 0, "stop": 1, "step": 0}"#,
            r#"{"start": 0, "stop": 2, "step": 0.1}"#,
            r#"{"start": 0, "stop": 1}"#,
        ] {
            assert!(SweepConfig::parse(&config(r#"["f_hat"]"#, r#"["sld"]"#, bad)).is_err(), "{bad}");
        }
        let low_dim = r#"{"family": "isotropic", "dim": 1, "param_grid": {"start": 0, "stop": 1, "step": 0.5},
            "specs": ["sld"], "outputs": []}"#;
        assert!(SweepConfig::parse(low_dim).is_err());
        let other = r#"{"family": "werner", "dim": 3, "param_grid": {"start": 0, "stop": 1, "step": 0.5},
            "specs": ["sld"], "outputs": []}"#;
        assert!(SweepConfig::parse(other).is_err());
    }

    #[test]
    fn csv_rendering() {
        let cfg = SweepConfig::parse(&config(r#"["v_hat"]"#, r#"["sld"]"#, r#"{"start": 0, "stop": 1, "step": 0.5}"#))
            .unwrap();
        let mut buf = Vec::new();
        run_sweep(&cfg).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "param,v_hat,verdict");
        assert_eq!(lines.len(), 4);
        let fields: Vec<&str> = lines[3].split(',').collect();
        assert_eq!(fields[0], "1.0000000000000000e0");
        let v: f64 = fields[1].parse().unwrap();
        assert!((v - 20.0 / 3.0).abs() < 1e-12);
        assert_eq!(fields[2], "entangled");
    }
}
