//! Rates, effective SNRs and the achievable-SNR envelope at the destination.
//!
//! Notation used throughout: `a = |h_SD|²`, `b = |h_SE|²`, `c = |h_ED|²`,
//! `ps = P_S/σ²`, `pe = P_E/σ²`. For a fixed splitting ratio `rho` the relay
//! can steer the destination SNR anywhere in `[snr_d_min, snr_d_max]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{phase, ComplexGain, Scenario};
use crate::error::{Error, Result};

/// Relative slack allowed on the relay power constraint.
pub const POWER_TOL: f64 = 1e-9;

/// An eavesdropper action: power-splitting ratio and amplification coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayControl {
    pub rho: f64,
    pub v: ComplexGain,
}

impl RelayControl {
    pub fn new(rho: f64, v: ComplexGain) -> Self {
        RelayControl { rho, v }
    }

    pub fn silent() -> Self {
        RelayControl {
            rho: 0.0,
            v: Complex64::new(0.0, 0.0),
        }
    }
}

/// One end of the achievable SNR interval together with the control reaching it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub gamma: f64,
    pub v_opt: ComplexGain,
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "splitting ratio must lie in [0, 1], got {rho}"
        )))
    }
}

fn log2_1p(snr: f64) -> f64 {
    snr.ln_1p() / std::f64::consts::LN_2
}

/// Shannon rate in bps/Hz for a given SNR.
pub fn rate(snr: f64) -> f64 {
    log2_1p(snr)
}

pub fn passive_rate_d(s: &Scenario) -> f64 {
    rate(s.ps_norm() * s.sd_sq())
}

pub fn passive_rate_e(s: &Scenario) -> f64 {
    rate(s.ps_norm() * s.se_sq())
}

/// Leakage under passive eavesdropping: the legitimate rate when E can decode it, else zero.
pub fn passive_leakage(s: &Scenario) -> f64 {
    let r_d = passive_rate_d(s);
    if passive_rate_e(s) >= r_d {
        r_d
    } else {
        0.0
    }
}

/// Power the relay radiates for a given control.
pub fn relay_power_used(s: &Scenario, c: &RelayControl) -> f64 {
    c.v.norm_sqr() * (c.rho * s.se_sq() * s.p_s() + s.sigma2())
}

/// Largest `|v|` allowed by the power budget at splitting ratio `rho`.
pub fn amplification_cap(s: &Scenario, rho: f64) -> f64 {
    (s.pe_norm() / (rho * s.se_sq() * s.ps_norm() + 1.0)).sqrt()
}

/// Destination SNR under an arbitrary relay control, in full complex arithmetic.
pub fn effective_snr_d(s: &Scenario, c: &RelayControl) -> Result<f64> {
    check_rho(c.rho)?;
    let used = relay_power_used(s, c);
    if used > s.p_e() * (1.0 + POWER_TOL) + f64::MIN_POSITIVE {
        return Err(Error::PowerBudget {
            used,
            budget: s.p_e(),
        });
    }
    Ok(snr_d_unchecked(s, c.rho, c.v))
}

pub(crate) fn snr_d_unchecked(s: &Scenario, rho: f64, v: ComplexGain) -> f64 {
    let coeff = s.h_sd() + v * rho.sqrt() * s.h_se() * s.h_ed();
    coeff.norm_sqr() * s.ps_norm() / (1.0 + v.norm_sqr() * s.ed_sq())
}

/// SNR at the eavesdropper's decoder after diverting `rho` of its signal.
pub fn eavesdropper_snr(s: &Scenario, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok((1.0 - rho) * s.se_sq() * s.ps_norm())
}

/// Splitting ratio beyond which the constructive optimum hits the power cap.
pub fn rho1(s: &Scenario) -> f64 {
    let (a, b, c) = (s.sd_sq(), s.se_sq(), s.ed_sq());
    let (ps, pe) = (s.ps_norm(), s.pe_norm());
    let den = 2.0 * b * ps;
    if den == 0.0 {
        return 1.0;
    }
    let num = -1.0 + (1.0 + 4.0 * ps * pe * a * c).sqrt();
    (num / den).min(1.0)
}

/// The ratio `|h_SD|² / (|h_SE|²(|h_ED|²P̃_E − |h_SD|²P̃_S))`, or `None` when
/// the denominator is not positive.
fn nulling_threshold(s: &Scenario) -> Option<f64> {
    let (a, b, c) = (s.sd_sq(), s.se_sq(), s.ed_sq());
    let den = b * (c * s.pe_norm() - a * s.ps_norm());
    if den > 0.0 {
        Some(a / den)
    } else {
        None
    }
}

/// Splitting ratio from which destructive forwarding can null the direct path.
pub fn rho2(s: &Scenario) -> f64 {
    match nulling_threshold(s) {
        Some(c) if c <= 1.0 => c,
        _ => 1.0,
    }
}

/// Phase of `v` that rotates the relayed path onto the direct path.
fn aligned_phase(s: &Scenario) -> f64 {
    phase(s.h_sd()) - phase(s.h_se()) - phase(s.h_ed())
}

/// `(√a·√(1+ρ b ps) ± √(ρ b c pe))² · ps / (1 + ρ b ps + c pe)`: the SNR when
/// the relay runs at full power with aligned (`+`) or opposed (`−`) phase.
fn full_power_snr(s: &Scenario, rho: f64, sign: f64) -> f64 {
    let (a, b, c) = (s.sd_sq(), s.se_sq(), s.ed_sq());
    let (ps, pe) = (s.ps_norm(), s.pe_norm());
    let load = 1.0 + rho * b * ps;
    let amp = (a * load).sqrt() + sign * (rho * b * c * pe).sqrt();
    amp * amp * ps / (load + c * pe)
}

/// Maximum destination SNR over all feasible `v` at splitting ratio `rho`.
pub fn snr_d_max(s: &Scenario, rho: f64) -> Result<Envelope> {
    check_rho(rho)?;
    let (a, b, c) = (s.sd_sq(), s.se_sq(), s.ed_sq());
    let theta = aligned_phase(s);
    if rho <= rho1(s) {
        // Interior stationary point of (√a + t|v|)² / (1 + c|v|²), t = √(ρbc).
        let mag = if rho == 0.0 || b == 0.0 {
            0.0
        } else {
            (rho * b).sqrt() / (a * c).sqrt()
        };
        Ok(Envelope {
            gamma: (a + rho * b) * s.ps_norm(),
            v_opt: Complex64::from_polar(mag, theta),
        })
    } else {
        Ok(Envelope {
            gamma: full_power_snr(s, rho, 1.0),
            v_opt: Complex64::from_polar(amplification_cap(s, rho), theta),
        })
    }
}

/// Minimum destination SNR over all feasible `v` at splitting ratio `rho`.
pub fn snr_d_min(s: &Scenario, rho: f64) -> Result<Envelope> {
    check_rho(rho)?;
    let theta = aligned_phase(s) + PI;
    let r2 = rho2(s);
    let gamma = if rho <= r2 {
        // The opposed-phase amplitude is nonnegative up to the threshold and
        // exactly zero on it, so clamp the rounding residue.
        let g = full_power_snr(s, rho, -1.0);
        if nulling_threshold(s) == Some(rho) {
            0.0
        } else {
            g
        }
    } else {
        0.0
    };
    let nulls = matches!(nulling_threshold(s), Some(c) if c <= 1.0 && rho >= c);
    let mag = if nulls {
        let t = (rho * s.se_sq() * s.ed_sq()).sqrt();
        if t == 0.0 {
            0.0
        } else {
            s.sd_sq().sqrt() / t
        }
    } else {
        amplification_cap(s, rho)
    };
    Ok(Envelope {
        gamma,
        v_opt: Complex64::from_polar(mag, crate::channel::wrap_phase(theta)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(a: f64, b: f64, c: f64, ps: f64, pe: f64) -> Scenario {
        Scenario::from_power_gains(a, b, c, ps, pe).unwrap()
    }

    fn close(x: f64, y: f64, rel: f64) -> bool {
        (x - y).abs() <= rel * (1.0 + y.abs())
    }

    #[test]
    fn passive_rates() {
        assert_eq!(passive_rate_d(&real(0.0, 1.0, 1.0, 10.0, 1.0)), 0.0);
        assert!((passive_rate_d(&real(1.0, 1.0, 1.0, 10.0, 1.0)) - 11f64.log2()).abs() < 1e-15);
        assert!((passive_rate_d(&real(0.1, 1.0, 1.0, 10.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!((passive_rate_e(&real(1.0, 0.3, 1.0, 10.0, 1.0)) - 2.0).abs() < 1e-15);
        assert_eq!(passive_rate_e(&real(1.0, 0.0, 1.0, 10.0, 1.0)), 0.0);
        let s = real(0.7, 0.7, 1.0, 3.0, 1.0);
        assert_eq!(passive_rate_e(&s), passive_rate_d(&s));
    }

    #[test]
    fn passive_leakage_rule() {
        assert!((passive_leakage(&real(1.0, 2.0, 1.0, 10.0, 1.0)) - 11f64.log2()).abs() < 1e-15);
        assert_eq!(passive_leakage(&real(1.0, 0.5, 1.0, 10.0, 1.0)), 0.0);
        assert!((passive_leakage(&real(1.0, 1.0, 1.0, 10.0, 1.0)) - 11f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn effective_snr_examples() {
        let s = real(1.0, 1.0, 1.0, 10.0, 10.0);
        let silent = effective_snr_d(&s, &RelayControl::new(0.6, Complex64::new(0.0, 0.0)));
        assert_eq!(silent.unwrap(), 10.0);
        // |1 + 0.5|² · 10 / (1 + 1)
        let g = effective_snr_d(&s, &RelayControl::new(0.25, Complex64::new(1.0, 0.0))).unwrap();
        assert!((g - 11.25).abs() < 1e-12);
        // pure jamming at full budget, any phase
        let pe = s.pe_norm();
        for theta in [0.0, 1.0, PI] {
            let v = Complex64::from_polar(pe.sqrt(), theta);
            let g = effective_snr_d(&s, &RelayControl::new(0.0, v)).unwrap();
            assert!((g - 10.0 / (1.0 + pe)).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_snr_rejects_over_budget() {
        let s = real(1.0, 1.0, 1.0, 10.0, 1.0);
        let err = effective_snr_d(&s, &RelayControl::new(0.5, Complex64::new(1.0, 0.0)));
        assert!(matches!(err, Err(Error::PowerBudget { .. })));
        let err = effective_snr_d(&s, &RelayControl::new(1.5, Complex64::new(0.0, 0.0)));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn eavesdropper_snr_linear_in_split() {
        let s = real(1.0, 4.0, 1.0, 10.0, 1.0);
        assert_eq!(eavesdropper_snr(&s, 1.0).unwrap(), 0.0);
        assert_eq!(eavesdropper_snr(&s, 0.0).unwrap(), 40.0);
        assert_eq!(eavesdropper_snr(&s, 0.5).unwrap(), 20.0);
        assert!(eavesdropper_snr(&s, -0.1).is_err());
    }

    #[test]
    fn relay_power_examples() {
        let s = real(1.0, 9.0, 1.0, 1.0, 100.0);
        let zero = RelayControl::silent();
        assert_eq!(relay_power_used(&s, &zero), 0.0);
        let c = RelayControl::new(0.0, Complex64::new(3f64.sqrt(), 0.0));
        assert!((relay_power_used(&s, &c) - 3.0).abs() < 1e-12);
        let c = RelayControl::new(1.0, Complex64::new(0.0, 2f64.sqrt()));
        assert!((relay_power_used(&s, &c) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn rho1_examples() {
        assert_eq!(rho1(&real(1.0, 4.0, 0.0, 10.0, 10.0)), 0.0);
        let r = rho1(&real(1.0, 4.0, 1.0, 10.0, 10.0));
        assert!((r - (401f64.sqrt() - 1.0) / 80.0).abs() < 1e-15);
        assert!((r - 0.23781).abs() < 1e-5);
        assert_eq!(rho1(&real(1.0, 4.0, 1.0, 10.0, 1e9)), 1.0);
        assert_eq!(rho1(&real(1.0, 0.0, 1.0, 10.0, 10.0)), 1.0);
    }

    #[test]
    fn rho2_examples() {
        assert!((rho2(&real(1.0, 1.0, 1.0, 10.0, 20.0)) - 0.1).abs() < 1e-15);
        assert_eq!(rho2(&real(1.0, 1.0, 1.0, 10.0, 5.0)), 1.0);
        assert_eq!(rho2(&real(1.0, 1.0, 1.0, 10.0, 10.0)), 1.0);
        // threshold above one
        assert_eq!(rho2(&real(1.0, 0.01, 1.0, 10.0, 20.0)), 1.0);
    }

    #[test]
    fn max_envelope_examples() {
        let s = real(1.0, 4.0, 1.0, 10.0, 10.0);
        let e = snr_d_max(&s, 0.0).unwrap();
        assert_eq!(e.gamma, 10.0);
        assert_eq!(e.v_opt.norm(), 0.0);
        let e = snr_d_max(&s, 0.1).unwrap();
        assert!((e.gamma - 14.0).abs() < 1e-12);
        let s0 = real(1.0, 4.0, 0.0, 10.0, 10.0);
        for rho in [0.0, 0.2, 0.7, 1.0] {
            assert!((snr_d_max(&s0, rho).unwrap().gamma - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn min_envelope_examples() {
        let s = real(1.0, 1.0, 1.0, 10.0, 20.0);
        let e = snr_d_min(&s, 0.0).unwrap();
        assert!((e.gamma - 10.0 / 21.0).abs() < 1e-12);
        let e = snr_d_min(&s, 0.1).unwrap();
        assert_eq!(e.gamma, 0.0);
        let achieved = snr_d_unchecked(&s, 0.1, e.v_opt);
        assert!(achieved < 1e-12, "{achieved}");
        for rho in [0.2, 0.5, 1.0] {
            assert_eq!(snr_d_min(&s, rho).unwrap().gamma, 0.0);
        }
    }

    #[test]
    fn envelope_controls_reproduce_gamma() {
        let s = Scenario::new(
            Complex64::new(0.3, -0.8),
            Complex64::new(-1.1, 0.4),
            Complex64::new(0.2, 0.9),
            7.0,
            3.0,
            0.5,
        )
        .unwrap();
        for i in 0..=20 {
            let rho = i as f64 / 20.0;
            for e in [snr_d_max(&s, rho).unwrap(), snr_d_min(&s, rho).unwrap()] {
                let c = RelayControl::new(rho, e.v_opt);
                let got = effective_snr_d(&s, &c).unwrap();
                assert!(close(got, e.gamma, 1e-9), "rho={rho} {got} vs {}", e.gamma);
            }
        }
    }

    #[test]
    fn degenerate_channels_stay_finite() {
        for s in [
            real(0.0, 1.0, 1.0, 10.0, 10.0),
            real(1.0, 0.0, 1.0, 10.0, 10.0),
            real(1.0, 1.0, 0.0, 10.0, 10.0),
            real(0.0, 0.0, 0.0, 10.0, 0.0),
        ] {
            for rho in [0.0, 0.3, 1.0] {
                let hi = snr_d_max(&s, rho).unwrap();
                let lo = snr_d_min(&s, rho).unwrap();
                assert!(hi.gamma.is_finite() && lo.gamma.is_finite());
                assert!(hi.v_opt.norm().is_finite() && lo.v_opt.norm().is_finite());
                assert!(lo.gamma <= hi.gamma + 1e-12);
                let got = snr_d_unchecked(&s, rho, hi.v_opt);
                assert!(close(got, hi.gamma, 1e-9));
                let got = snr_d_unchecked(&s, rho, lo.v_opt);
                assert!(close(got, lo.gamma, 1e-9));
            }
        }
    }

    #[test]
    fn rho_out_of_range() {
        let s = real(1.0, 1.0, 1.0, 1.0, 1.0);
        assert!(snr_d_max(&s, 1.01).is_err());
        assert!(snr_d_min(&s, -0.01).is_err());
    }
}
