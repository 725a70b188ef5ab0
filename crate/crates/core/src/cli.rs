//! Command implementations behind the `spoofrelay` binary.
//!
//! Each command returns the text it would print so the binary stays a thin
//! wrapper and the commands can be tested in-process.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::channel::phase;
use crate::error::{Error, Result};
use crate::experiments::{fmt_sig, run_sweep, strategy_regions, write_csv_file};
use crate::files::{read_scenario_file, read_sweep_file};
use crate::optimizer::{solve_attack, AttackSolution};
use crate::oracle::GridSize;
use crate::verify::{run_verify, Subject, VerifyConfig, VerifyReport};

pub const SOLVE_HEADER: &str =
    "strategy,rho_star,v_mag,v_phase_rad,gamma_d,gamma_e,leakage_bps_hz,residual,jam_power";

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [r, m, p] = parts.as_slice() else {
            return Err(format!("expected n_rho,n_mag,n_phase, got `{s}`"));
        };
        let num = |x: &str| x.parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
        let g = GridSize {
            n_rho: num(r)?,
            n_mag: num(m)?,
            n_phase: num(p)?,
        };
        if g.n_rho < 2 || g.n_mag < 2 || g.n_phase < 2 {
            return Err("grid sizes must be at least 2".into());
        }
        Ok(g)
    }
}

pub fn solution_record(sol: &AttackSolution) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        sol.strategy,
        fmt_sig(sol.rho_star),
        fmt_sig(sol.v_star.norm()),
        fmt_sig(phase(sol.v_star)),
        fmt_sig(sol.gamma_d),
        fmt_sig(sol.gamma_e),
        fmt_sig(sol.leakage_bps_hz),
        fmt_sig(sol.residual),
        fmt_sig(sol.jam_power_used),
    )
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn cmd_solve(scenario: &Path, out: Option<&Path>) -> Result<String> {
    let s = read_scenario_file(scenario)?.scenario()?;
    let sol = solve_attack(&s)?;
    let record = format!("{SOLVE_HEADER}\n{}\n", solution_record(&sol));
    let mut text = String::new();
    writeln!(text, "strategy        {}", sol.strategy).unwrap();
    writeln!(text, "rho*            {}", fmt_sig(sol.rho_star)).unwrap();
    writeln!(text, "|v*|            {}", fmt_sig(sol.v_star.norm())).unwrap();
    writeln!(text, "arg v* (rad)    {}", fmt_sig(phase(sol.v_star))).unwrap();
    writeln!(text, "gamma_D         {}", fmt_sig(sol.gamma_d)).unwrap();
    writeln!(text, "gamma_E         {}", fmt_sig(sol.gamma_e)).unwrap();
    writeln!(text, "leakage bps/Hz  {}", fmt_sig(sol.leakage_bps_hz)).unwrap();
    writeln!(text, "residual        {}", fmt_sig(sol.residual)).unwrap();
    text.push('\n');
    text.push_str(&record);
    if let Some(path) = out {
        write_file(path, &record)?;
    }
    Ok(text)
}

pub fn cmd_sweep(config: &Path, out: &Path) -> Result<String> {
    let cfg = read_sweep_file(config)?;
    let records = run_sweep(&cfg)?;
    write_csv_file(&records, out)?;
    let regions = strategy_regions(&records)?;
    let best = records
        .iter()
        .max_by(|a, b| a.active_leakage.total_cmp(&b.active_leakage))
        .expect("sweep has at least two points");
    let violations = records
        .iter()
        .filter(|r| r.active_leakage < r.passive_leakage - 1e-12)
        .count();

    let mut text = String::new();
    writeln!(
        text,
        "{} points written to {}",
        records.len(),
        out.display()
    )
    .unwrap();
    writeln!(text, "regions:").unwrap();
    for r in &regions {
        writeln!(
            text,
            "  {:<20} {} .. {} m",
            r.strategy.as_str(),
            fmt_sig(r.d_first),
            fmt_sig(r.d_last)
        )
        .unwrap();
    }
    writeln!(
        text,
        "max active leakage {} bps/Hz at d_se = {} m",
        fmt_sig(best.active_leakage),
        fmt_sig(best.d_se)
    )
    .unwrap();
    writeln!(text, "dominance violations: {violations}").unwrap();
    Ok(text)
}

pub fn render_report(report: &VerifyReport) -> String {
    let mut text = String::new();
    for c in &report.checks {
        let status = if c.failures == 0 { "PASS" } else { "FAIL" };
        writeln!(
            text,
            "{status} {:<22} {} cases, {} failures, worst {:.3e}",
            c.name, c.cases, c.failures, c.worst
        )
        .unwrap();
    }
    for ce in &report.counterexamples {
        writeln!(
            text,
            "counterexample [{} #{}]: {}",
            ce.check, ce.index, ce.detail
        )
        .unwrap();
        writeln!(text, "  scenario: {}", ce.scenario).unwrap();
    }
    text
}

/// Runs the verification suites; returns the report text and whether all passed.
pub fn cmd_verify(cfg: &VerifyConfig, dump: Option<&Path>) -> Result<(String, bool)> {
    if cfg.n_scenarios == 0 {
        return Err(Error::domain("need at least one scenario"));
    }
    let report = run_verify(cfg, &Subject::default());
    if let Some(path) = dump {
        let json = serde_json::to_string_pretty(&report.counterexamples).expect("plain data");
        write_file(path, &json)?;
    }
    Ok((render_report(&report), report.passed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_argument() {
        let g: GridSize = "256, 256,64".parse().unwrap();
        assert_eq!(g, GridSize::default());
        assert!("1,2,3".parse::<GridSize>().is_err());
        assert!("4,4".parse::<GridSize>().is_err());
        assert!("a,4,4".parse::<GridSize>().is_err());
    }

    #[test]
    fn zero_scenarios_rejected() {
        let cfg = VerifyConfig {
            n_scenarios: 0,
            ..VerifyConfig::default()
        };
        assert!(cmd_verify(&cfg, None).is_err());
    }
}
