//! Optimal spoofing-relay attack.
//!
//! For a fixed splitting ratio the destination SNR can be placed anywhere in
//! the envelope `[snr_d_min(ρ), snr_d_max(ρ)]`, so maximizing the leakage
//! reduces to a one-dimensional search over `ρ` subject to
//! `γ_D(ρ) <= γ_E(ρ)`. Which side of the envelope is active depends on how
//! the eavesdropping channel compares with the legitimate one:
//!
//! * `|h_SE|² > |h_SD|²`: forward constructively and raise `γ_D` until it
//!   meets the decreasing `γ_E`;
//! * `|h_SD|²/(1+|h_ED|²P̃_E) <= |h_SE|² <= |h_SD|²`: jam only, with exactly
//!   the power that drags `γ_D` down to `γ_E(0)`;
//! * otherwise: forward destructively while jamming, taking the smallest `ρ`
//!   at which `snr_d_min` drops to `γ_E`, or give up if there is none.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{phase, wrap_phase, ComplexGain, Scenario};
use crate::error::{Error, Result};
use crate::leakage::{eavesdropper_snr, rate, snr_d_max, snr_d_min};
use crate::roots::{bisect, first_sign_change_at, poly_eval, quartic_real_roots, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyClass {
    #[serde(rename = "constructive")]
    ConstructiveForwarding,
    #[serde(rename = "jamming")]
    JammingOnly,
    #[serde(rename = "destructive_jamming")]
    DestructiveForwardingPlusJamming,
    Infeasible,
}

impl StrategyClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyClass::ConstructiveForwarding => "constructive",
            StrategyClass::JammingOnly => "jamming",
            StrategyClass::DestructiveForwardingPlusJamming => "destructive_jamming",
            StrategyClass::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for StrategyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constructive" => Ok(StrategyClass::ConstructiveForwarding),
            "jamming" => Ok(StrategyClass::JammingOnly),
            "destructive_jamming" => Ok(StrategyClass::DestructiveForwardingPlusJamming),
            "infeasible" => Ok(StrategyClass::Infeasible),
            other => Err(Error::domain(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Optimal attack for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackSolution {
    pub strategy: StrategyClass,
    pub rho_star: f64,
    pub v_star: ComplexGain,
    /// Destination SNR induced by the attack (the rate S adapts to).
    pub gamma_d: f64,
    /// SNR at the eavesdropper's decoder.
    pub gamma_e: f64,
    pub leakage_bps_hz: f64,
    /// `gamma_d − gamma_e` at the returned control.
    pub residual: f64,
    /// Power spent amplifying relay noise, `|v|²σ²`.
    pub jam_power_used: f64,
}

/// Knobs for the numerical parts of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Uniform scan points on `[0, 1]` used to locate the first crossing of
    /// the min envelope with `γ_E`. A crossing that only touches `γ_E`
    /// without changing sign can be missed and is reported as infeasible.
    pub n_scan: usize,
    pub tolerance: Tolerance,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            n_scan: 4096,
            tolerance: Tolerance::default(),
        }
    }
}

/// Case split on the ordering of `|h_SE|²` against `|h_SD|²` and
/// `|h_SD|²/(1 + |h_ED|²P̃_E)`. Both thresholds belong to the jamming case.
pub fn classify_case(s: &Scenario) -> StrategyClass {
    let (a, b) = (s.sd_sq(), s.se_sq());
    let jam_floor = a / (1.0 + s.ed_sq() * s.pe_norm());
    if a < b {
        StrategyClass::ConstructiveForwarding
    } else if jam_floor <= b {
        StrategyClass::JammingOnly
    } else {
        StrategyClass::DestructiveForwardingPlusJamming
    }
}

fn solution(
    s: &Scenario,
    strategy: StrategyClass,
    rho: f64,
    v: ComplexGain,
    gamma_d: f64,
) -> Result<AttackSolution> {
    let gamma_e = eavesdropper_snr(s, rho)?;
    Ok(AttackSolution {
        strategy,
        rho_star: rho,
        v_star: v,
        gamma_d,
        gamma_e,
        leakage_bps_hz: rate(gamma_d),
        residual: gamma_d - gamma_e,
        jam_power_used: v.norm_sqr() * s.sigma2(),
    })
}

fn infeasible(s: &Scenario) -> AttackSolution {
    let gamma_d = s.sd_sq() * s.ps_norm();
    let gamma_e = s.se_sq() * s.ps_norm();
    AttackSolution {
        strategy: StrategyClass::Infeasible,
        rho_star: 0.0,
        v_star: Complex64::new(0.0, 0.0),
        gamma_d,
        gamma_e,
        leakage_bps_hz: 0.0,
        residual: gamma_d - gamma_e,
        jam_power_used: 0.0,
    }
}

fn max_gap(s: &Scenario, rho: f64) -> f64 {
    // rho always comes from inside [0, 1] here
    snr_d_max(s, rho).map(|e| e.gamma).unwrap_or(f64::NAN)
        - eavesdropper_snr(s, rho).unwrap_or(f64::NAN)
}

fn min_gap(s: &Scenario, rho: f64) -> f64 {
    snr_d_min(s, rho).map(|e| e.gamma).unwrap_or(f64::NAN)
        - eavesdropper_snr(s, rho).unwrap_or(f64::NAN)
}

/// Constructive forwarding: the unique crossing of `snr_d_max` and `γ_E`.
pub fn solve_case1(s: &Scenario, opts: &SolverOptions) -> Result<AttackSolution> {
    let rho = bisect(|r| max_gap(s, r), 0.0, 1.0, opts.tolerance)?;
    let env = snr_d_max(s, rho)?;
    solution(
        s,
        StrategyClass::ConstructiveForwarding,
        rho,
        env.v_opt,
        env.gamma,
    )
}

/// Normalized jamming power `|v|²` that pulls `γ_D(0, v)` down to `γ_E(0)`.
pub fn case2_jam_power(s: &Scenario) -> f64 {
    let (a, b, c) = (s.sd_sq(), s.se_sq(), s.ed_sq());
    if b >= a || c == 0.0 {
        0.0
    } else {
        (a / b - 1.0) / c
    }
}

/// Jamming only: no forwarding, just enough amplified noise to equalize SNRs.
pub fn solve_case2(s: &Scenario) -> Result<AttackSolution> {
    let jam = case2_jam_power(s).min(s.pe_norm());
    let theta =
        wrap_phase(std::f64::consts::PI + phase(s.h_sd()) - phase(s.h_se()) - phase(s.h_ed()));
    let v = Complex64::from_polar(jam.sqrt(), theta);
    solution(
        s,
        StrategyClass::JammingOnly,
        0.0,
        v,
        s.se_sq() * s.ps_norm(),
    )
}

/// Scan points for Case 3: `n` uniform points on `[0, 1]` merged with `n`
/// points uniform in `√ρ`.
///
/// The min envelope has a `√ρ` term, so near the jamming threshold the gap
/// can dip below zero on an interval far narrower than `1/n` right after
/// `ρ = 0`; the square-root spacing resolves it.
pub fn case3_scan_grid(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0, 1.0];
    }
    let last = (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n)
        .flat_map(|i| {
            let t = i as f64 / last;
            [t, t * t]
        })
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Destructive forwarding plus jamming: the smallest `ρ` where the min
/// envelope meets `γ_E`, or [`StrategyClass::Infeasible`] when it never does.
pub fn solve_case3(s: &Scenario, opts: &SolverOptions) -> Result<AttackSolution> {
    let grid = case3_scan_grid(opts.n_scan);
    let Some((lo, hi)) = first_sign_change_at(|r| min_gap(s, r), &grid) else {
        return Ok(infeasible(s));
    };
    let rho = if lo == hi {
        lo
    } else {
        bisect(|r| min_gap(s, r), lo, hi, opts.tolerance)?
    };
    let env = snr_d_min(s, rho)?;
    solution(
        s,
        StrategyClass::DestructiveForwardingPlusJamming,
        rho,
        env.v_opt,
        env.gamma,
    )
}

/// Maximum-leakage attack for `s` with default solver options.
pub fn solve_attack(s: &Scenario) -> Result<AttackSolution> {
    solve_attack_with(s, &SolverOptions::default())
}

pub fn solve_attack_with(s: &Scenario, opts: &SolverOptions) -> Result<AttackSolution> {
    match classify_case(s) {
        StrategyClass::ConstructiveForwarding => solve_case1(s, opts),
        StrategyClass::JammingOnly => solve_case2(s),
        _ => solve_case3(s, opts),
    }
}

/// Coefficients (ascending) of the quartic whose roots contain every crossing
/// of the min envelope with `γ_E` while the envelope is nonzero.
///
/// Writing `u = 1 + ρ b ps` and `D = u + c pe`, the crossing condition is
/// `2√(a b c pe ρ u) = p(ρ)` with `p = a u + ρ b c pe − b (1 − ρ) D`; squaring
/// gives `p(ρ)² − 4 a b c pe ρ u = 0`.
pub fn case3_quartic(s: &Scenario) -> ([f64; 5], [f64; 3]) {
    let (a, b, c) = (s.sd_sq(), s.se_sq(), s.ed_sq());
    let (ps, pe) = (s.ps_norm(), s.pe_norm());
    let p0 = a - b * (1.0 + c * pe);
    let p1 = a * b * ps + b * c * pe - b * (b * ps - 1.0 - c * pe);
    let p2 = b * b * ps;
    let k = 4.0 * a * b * c * pe;
    let quartic = [
        p0 * p0,
        2.0 * p0 * p1 - k,
        p1 * p1 + 2.0 * p0 * p2 - k * b * ps,
        2.0 * p1 * p2,
        p2 * p2,
    ];
    (quartic, [p0, p1, p2])
}

/// Smallest admissible root of [`case3_quartic`] in `[0, 1]`.
///
/// Companion-matrix eigenvalues are polished with Newton steps on the
/// quartic, then roots introduced by squaring (where `p(ρ) < 0`) are dropped.
pub fn case3_quartic_root(s: &Scenario) -> Option<f64> {
    let (q, p) = case3_quartic(s);
    let dq = [q[1], 2.0 * q[2], 3.0 * q[3], 4.0 * q[4]];
    let scale = q.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    quartic_real_roots(q, 1e-6)
        .into_iter()
        .map(|mut r| {
            for _ in 0..8 {
                let d = poly_eval(&dq, r);
                if d == 0.0 {
                    break;
                }
                r -= poly_eval(&q, r) / d;
            }
            r
        })
        .filter(|r| (-1e-9..=1.0 + 1e-9).contains(r))
        .filter(|r| poly_eval(&p, *r) >= -1e-9 * scale.sqrt())
        .map(|r| r.clamp(0.0, 1.0))
        .min_by(f64::total_cmp)
}
