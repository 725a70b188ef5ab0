//! Distance sweep along the S–D line: passive versus active leakage and the
//! attack strategy used at each eavesdropper position.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{build_collinear_scenario, GeometryConfig};
use crate::error::{Error, Result};
use crate::leakage::passive_leakage;
use crate::optimizer::{solve_attack, StrategyClass};

pub const CSV_HEADER: &str =
    "d_se_m,passive_bps_hz,active_bps_hz,strategy,rho_star,v_mag,jam_power";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Template geometry; its `d_se` is overwritten at every point.
    pub geometry: GeometryConfig,
    pub d_se_start: f64,
    pub d_se_stop: f64,
    pub d_se_step: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            geometry: GeometryConfig::default(),
            d_se_start: 50.0,
            d_se_stop: 3000.0,
            d_se_step: 5.0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let (a, b, h) = (self.d_se_start, self.d_se_stop, self.d_se_step);
        if !(a.is_finite() && b.is_finite() && h.is_finite()) {
            return Err(Error::domain("sweep bounds must be finite"));
        }
        if !(a < b) {
            return Err(Error::domain(format!(
                "sweep start {a} must be below stop {b}"
            )));
        }
        if !(h > 0.0) {
            return Err(Error::domain(format!(
                "sweep step must be positive, got {h}"
            )));
        }
        if !(a > 0.0) {
            return Err(Error::domain(format!(
                "sweep start must be positive, got {a}"
            )));
        }
        if self.len() < 2 {
            return Err(Error::domain("sweep must contain at least 2 points"));
        }
        self.geometry.validate()
    }

    /// Number of points: `start + i·step` for every `i` that stays at or
    /// below `stop` (with a little slack for rounding in the step).
    pub fn len(&self) -> usize {
        let span = (self.d_se_stop - self.d_se_start) / self.d_se_step;
        (span + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.d_se_start + self.d_se_step * i as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub d_se: f64,
    pub passive_leakage: f64,
    pub active_leakage: f64,
    pub strategy: StrategyClass,
    pub rho_star: f64,
    pub v_mag: f64,
    pub jam_power: f64,
}

fn sweep_point(template: &GeometryConfig, d_se: f64) -> Result<SweepRecord> {
    let geometry = GeometryConfig { d_se, ..*template };
    let s = build_collinear_scenario(&geometry)?;
    let sol = solve_attack(&s)?;
    Ok(SweepRecord {
        d_se,
        passive_leakage: passive_leakage(&s),
        active_leakage: sol.leakage_bps_hz,
        strategy: sol.strategy,
        rho_star: sol.rho_star,
        v_mag: sol.v_star.norm(),
        jam_power: sol.jam_power_used,
    })
}

/// Solves every sweep point; records come back ordered by `d_se`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let distances: Vec<f64> = cfg.distances().collect();
    let mut records = distances
        .par_iter()
        .map(|&d| sweep_point(&cfg.geometry, d))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.d_se.total_cmp(&b.d_se));
    Ok(records)
}

/// A maximal run of sweep points sharing one strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyRegion {
    pub strategy: StrategyClass,
    /// First and last `d_se` of the run.
    pub d_first: f64,
    pub d_last: f64,
}

pub fn strategy_regions(records: &[SweepRecord]) -> Result<Vec<StrategyRegion>> {
    let Some(first) = records.first() else {
        return Err(Error::domain("no sweep records"));
    };
    let mut regions = vec![StrategyRegion {
        strategy: first.strategy,
        d_first: first.d_se,
        d_last: first.d_se,
    }];
    for r in &records[1..] {
        let last = regions.last_mut().unwrap();
        if r.strategy == last.strategy {
            last.d_last = r.d_se;
        } else {
            regions.push(StrategyRegion {
                strategy: r.strategy,
                d_first: r.d_se,
                d_last: r.d_se,
            });
        }
    }
    Ok(regions)
}

/// `x` with 9 significant digits, in the shortest of fixed or exponent form.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(records: &[SweepRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_sig(r.d_se),
            fmt_sig(r.passive_leakage),
            fmt_sig(r.active_leakage),
            r.strategy,
            fmt_sig(r.rho_star),
            fmt_sig(r.v_mag),
            fmt_sig(r.jam_power),
        )?;
    }
    Ok(())
}

pub fn write_csv_file(records: &[SweepRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_csv(records, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sweep_has_591_points() {
        let cfg = SweepConfig::default();
        assert_eq!(cfg.len(), 591);
        let d: Vec<f64> = cfg.distances().collect();
        assert_eq!(d[0], 50.0);
        assert_eq!(*d.last().unwrap(), 3000.0);
        assert_eq!(d[190], 1000.0);
    }

    #[test]
    fn invalid_sweeps() {
        for cfg in [
            SweepConfig {
                d_se_step: 0.0,
                ..SweepConfig::default()
            },
            SweepConfig {
                d_se_stop: 10.0,
                ..SweepConfig::default()
            },
            SweepConfig {
                d_se_step: 5000.0,
                ..SweepConfig::default()
            },
        ] {
            assert!(cfg.validate().is_err());
        }
    }

    #[test]
    fn regions_of_empty_input() {
        assert!(strategy_regions(&[]).is_err());
    }

    #[test]
    fn regions_merge_runs() {
        let rec = |d: f64, strategy| SweepRecord {
            d_se: d,
            passive_leakage: 0.0,
            active_leakage: 0.0,
            strategy,
            rho_star: 0.0,
            v_mag: 0.0,
            jam_power: 0.0,
        };
        use StrategyClass::*;
        let recs = [
            rec(1.0, ConstructiveForwarding),
            rec(2.0, ConstructiveForwarding),
            rec(3.0, JammingOnly),
            rec(4.0, ConstructiveForwarding),
        ];
        let r = strategy_regions(&recs).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!((r[0].d_first, r[0].d_last), (1.0, 2.0));
        assert_eq!(r[1].strategy, JammingOnly);
        assert_eq!((r[2].d_first, r[2].d_last), (4.0, 4.0));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(11f64.log2()), "3.45943162");
        assert_eq!(fmt_sig(50.0), "50");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1234567890.0), "1.23456789e9");
        assert_eq!(fmt_sig(0.000123456789123), "0.000123456789");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(0.999999999999), "1");
    }

    #[test]
    fn csv_layout() {
        let rec = SweepRecord {
            d_se: 1005.0,
            passive_leakage: 0.0,
            active_leakage: 2.5,
            strategy: StrategyClass::DestructiveForwardingPlusJamming,
            rho_star: 0.125,
            v_mag: 3.0,
            jam_power: 9.0,
        };
        let mut buf = Vec::new();
        write_csv(&[rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            format!("{CSV_HEADER}\n1005,0,2.5,destructive_jamming,0.125,3,9\n")
        );
    }
}
