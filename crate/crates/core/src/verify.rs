//! Randomized cross-checks of the closed forms against the oracles.
//!
//! The functions under test are passed in as a [`Subject`], so the harness
//! can be pointed at a deliberately broken model to prove that it notices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::Scenario;
use crate::error::Result;
use crate::files::scenario_to_json;
use crate::leakage::{self, Envelope, RelayControl};
use crate::optimizer::{self, AttackSolution};
use crate::oracle::{self, GridSize, ScenarioRanges};

/// The closed-form model being verified.
#[derive(Clone, Copy)]
pub struct Subject {
    pub solve: fn(&Scenario) -> Result<AttackSolution>,
    pub snr_d_max: fn(&Scenario, f64) -> Result<Envelope>,
    pub snr_d_min: fn(&Scenario, f64) -> Result<Envelope>,
    pub effective_snr_d: fn(&Scenario, &RelayControl) -> Result<f64>,
}

impl Default for Subject {
    fn default() -> Self {
        Subject {
            solve: optimizer::solve_attack,
            snr_d_max: leakage::snr_d_max,
            snr_d_min: leakage::snr_d_min,
            effective_snr_d: leakage::effective_snr_d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub n_scenarios: usize,
    pub grid: GridSize,
    /// Allowed |closed form − grid| leakage gap, bps/Hz.
    pub agreement_tol: f64,
    pub envelope_rhos: usize,
    pub envelope_controls: usize,
    /// Absolute slack on envelope containment.
    pub envelope_tol: f64,
    pub mc_pairs: usize,
    pub mc_symbols: usize,
    pub ranges: ScenarioRanges,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            n_scenarios: 100,
            grid: GridSize::default(),
            agreement_tol: 0.02,
            envelope_rhos: 8,
            envelope_controls: 10_000,
            envelope_tol: 1e-9,
            mc_pairs: 20,
            mc_symbols: 1_000_000,
            ranges: ScenarioRanges::default(),
        }
    }
}

/// A single failed comparison, with everything needed to replay it.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub check: &'static str,
    pub index: usize,
    pub detail: String,
    /// Scenario in the scenario-file JSON format.
    pub scenario: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest observed deviation in the check's own unit.
    pub worst: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckSummary>,
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub const ORACLE_AGREEMENT: &str = "oracle_agreement";
pub const ENVELOPE_CONTAINMENT: &str = "envelope_containment";
pub const MONTE_CARLO: &str = "monte_carlo_snr";

/// Seeded random scenarios used by every check.
pub fn scenarios(cfg: &VerifyConfig) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.n_scenarios)
        .map(|_| oracle::random_scenario(&mut rng, &cfg.ranges))
        .collect()
}

struct Outcome {
    worst: f64,
    failure: Option<String>,
}

fn agreement(subject: &Subject, s: &Scenario, cfg: &VerifyConfig) -> Outcome {
    let sol = match (subject.solve)(s) {
        Ok(sol) => sol,
        Err(e) => {
            return Outcome {
                worst: f64::INFINITY,
                failure: Some(format!("solver error: {e}")),
            }
        }
    };
    let grid = match oracle::grid_oracle(s, cfg.grid) {
        Ok(g) => g,
        Err(e) => {
            return Outcome {
                worst: f64::INFINITY,
                failure: Some(format!("oracle error: {e}")),
            }
        }
    };
    let gap = sol.leakage_bps_hz - grid.leakage_bps_hz;
    let failure = if gap.abs() > cfg.agreement_tol || !gap.is_finite() {
        Some(format!(
            "solver {:.9} vs grid {:.9} (gap {gap:.3e}, strategy {}, grid bound {:.3e})",
            sol.leakage_bps_hz, grid.leakage_bps_hz, sol.strategy, grid.resolution_bound
        ))
    } else {
        None
    };
    Outcome {
        worst: gap.abs(),
        failure,
    }
}

fn containment(subject: &Subject, s: &Scenario, idx: usize, cfg: &VerifyConfig) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in 0..cfg.envelope_rhos {
        let rho = if cfg.envelope_rhos == 1 {
            0.5
        } else {
            r as f64 / (cfg.envelope_rhos - 1) as f64
        };
        let (hi, lo) = match ((subject.snr_d_max)(s, rho), (subject.snr_d_min)(s, rho)) {
            (Ok(h), Ok(l)) => (h.gamma, l.gamma),
            (Err(e), _) | (_, Err(e)) => {
                return Outcome {
                    worst: f64::INFINITY,
                    failure: Some(format!("envelope error: {e}")),
                }
            }
        };
        let seed = cfg.seed ^ ((idx as u64) << 20) ^ r as u64;
        let samples = match oracle::envelope_samples(s, rho, cfg.envelope_controls, seed) {
            Ok(v) => v,
            Err(e) => {
                return Outcome {
                    worst: f64::INFINITY,
                    failure: Some(e.to_string()),
                }
            }
        };
        for g in samples {
            let excess = (lo - g).max(g - hi);
            worst = worst.max(excess);
            if excess > cfg.envelope_tol {
                return Outcome {
                    worst,
                    failure: Some(format!(
                        "rho = {rho}: sampled SNR {g:.12e} outside [{lo:.12e}, {hi:.12e}]"
                    )),
                };
            }
        }
    }
    Outcome {
        worst,
        failure: None,
    }
}

fn monte_carlo(subject: &Subject, s: &Scenario, c: &RelayControl, seed: u64, n: usize) -> Outcome {
    let closed = match (subject.effective_snr_d)(s, c) {
        Ok(g) => g,
        Err(e) => {
            return Outcome {
                worst: f64::INFINITY,
                failure: Some(e.to_string()),
            }
        }
    };
    let est = match oracle::monte_carlo_snr_d(s, c, n, seed) {
        Ok(g) => g,
        Err(e) => {
            return Outcome {
                worst: f64::INFINITY,
                failure: Some(e.to_string()),
            }
        }
    };
    let rel = (est / closed - 1.0).abs();
    let tol = oracle::monte_carlo_tolerance(n);
    Outcome {
        worst: rel,
        failure: (rel > tol || !rel.is_finite()).then(|| {
            format!(
                "rho = {}, v = {}: empirical {est:.9e} vs closed form {closed:.9e} (rel {rel:.3e} > {tol:.3e})",
                c.rho, c.v
            )
        }),
    }
}

/// Runs every check over the seeded scenario set.
pub fn run_verify(cfg: &VerifyConfig, subject: &Subject) -> VerifyReport {
    let set = scenarios(cfg);
    let mut checks = Vec::new();
    let mut counterexamples = Vec::new();

    let mut collect = |name: &'static str, outcomes: Vec<(usize, Scenario, Outcome)>| {
        let mut summary = CheckSummary {
            name,
            cases: outcomes.len(),
            failures: 0,
            worst: 0.0,
        };
        for (index, s, o) in outcomes {
            summary.worst = summary.worst.max(o.worst);
            if let Some(detail) = o.failure {
                summary.failures += 1;
                counterexamples.push(Counterexample {
                    check: name,
                    index,
                    detail,
                    scenario: scenario_to_json(&s),
                });
            }
        }
        checks.push(summary);
    };

    // Scenarios are independent; the oracle itself parallelizes over ρ.
    let agree: Vec<_> = set
        .iter()
        .enumerate()
        .map(|(i, s)| (i, *s, agreement(subject, s, cfg)))
        .collect();
    collect(ORACLE_AGREEMENT, agree);

    let contain: Vec<_> = set
        .par_iter()
        .enumerate()
        .map(|(i, s)| (i, *s, containment(subject, s, i, cfg)))
        .collect();
    collect(ENVELOPE_CONTAINMENT, contain);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let pairs: Vec<(usize, Scenario, RelayControl, u64)> = (0..cfg.mc_pairs)
        .map(|i| {
            let s = set
                .get(i % set.len().max(1))
                .copied()
                .unwrap_or_else(|| oracle::random_scenario(&mut rng, &cfg.ranges));
            let c = oracle::random_control(&mut rng, &s);
            (i, s, c, rng.gen())
        })
        .collect();
    let mc: Vec<_> = pairs
        .par_iter()
        .map(|(i, s, c, seed)| (*i, *s, monte_carlo(subject, s, c, *seed, cfg.mc_symbols)))
        .collect();
    collect(MONTE_CARLO, mc);

    VerifyReport {
        checks,
        counterexamples,
    }
}
