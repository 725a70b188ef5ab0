//! Channel and scenario construction.
//!
//! A [`Scenario`] holds the three complex link gains (source→destination,
//! source→eavesdropper, eavesdropper→destination) together with the source
//! power, the eavesdropper's power budget and the receiver noise power.
//! Scenarios are either supplied directly or built from a collinear
//! free-space geometry with [`build_collinear_scenario`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Complex baseband channel coefficient.
pub type ComplexGain = Complex64;

/// Phase of `z` in (−π, π], with the phase of zero taken as 0.
pub fn phase(z: ComplexGain) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        0.0
    } else {
        wrap_phase(z.im.atan2(z.re))
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn wavelength(carrier_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_hz
}

/// Free-space power gain `(λ / 4πd)²`.
pub fn friis_power_gain(d: f64, carrier_hz: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(format!("distance must be positive, got {d}")));
    }
    if !(carrier_hz > 0.0) || !carrier_hz.is_finite() {
        return Err(Error::domain(format!(
            "carrier frequency must be positive, got {carrier_hz}"
        )));
    }
    let ratio = wavelength(carrier_hz) / (4.0 * PI * d);
    Ok(ratio * ratio)
}

/// Line-of-sight gain: Friis magnitude with propagation phase `−2πd/λ`.
pub fn gain_from_distance(d: f64, carrier_hz: f64) -> Result<ComplexGain> {
    let power = friis_power_gain(d, carrier_hz)?;
    let theta = wrap_phase(-2.0 * PI * d / wavelength(carrier_hz));
    Ok(Complex64::from_polar(power.sqrt(), theta))
}

/// Complete channel and power description of one S/D/E configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    h_sd: ComplexGain,
    h_se: ComplexGain,
    h_ed: ComplexGain,
    p_s: f64,
    p_e: f64,
    sigma2: f64,
}

impl Scenario {
    pub fn new(
        h_sd: ComplexGain,
        h_se: ComplexGain,
        h_ed: ComplexGain,
        p_s: f64,
        p_e: f64,
        sigma2: f64,
    ) -> Result<Self> {
        for (name, h) in [("h_sd", h_sd), ("h_se", h_se), ("h_ed", h_ed)] {
            if !h.re.is_finite() || !h.im.is_finite() {
                return Err(Error::domain(format!("{name} must be finite, got {h}")));
            }
        }
        if !(p_s > 0.0) || !p_s.is_finite() {
            return Err(Error::domain(format!("p_s must be positive, got {p_s}")));
        }
        if !(p_e >= 0.0) || !p_e.is_finite() {
            return Err(Error::domain(format!("p_e must be nonnegative, got {p_e}")));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::domain(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        if !(p_s / sigma2).is_finite() || !(p_e / sigma2).is_finite() {
            return Err(Error::domain("normalized powers overflow"));
        }
        Ok(Scenario {
            h_sd,
            h_se,
            h_ed,
            p_s,
            p_e,
            sigma2,
        })
    }

    /// Real, nonnegative channels given by their power gains, with unit noise.
    /// Handy for the closed-form fixtures, which are stated in terms of
    /// `|h|²` and normalized powers only.
    pub fn from_power_gains(sd_sq: f64, se_sq: f64, ed_sq: f64, ps: f64, pe: f64) -> Result<Self> {
        let amp = |g: f64| -> Result<ComplexGain> {
            if !(g >= 0.0) {
                return Err(Error::domain(format!(
                    "power gain must be nonnegative, got {g}"
                )));
            }
            Ok(Complex64::new(g.sqrt(), 0.0))
        };
        Scenario::new(amp(sd_sq)?, amp(se_sq)?, amp(ed_sq)?, ps, pe, 1.0)
    }

    pub fn h_sd(&self) -> ComplexGain {
        self.h_sd
    }
    pub fn h_se(&self) -> ComplexGain {
        self.h_se
    }
    pub fn h_ed(&self) -> ComplexGain {
        self.h_ed
    }
    pub fn p_s(&self) -> f64 {
        self.p_s
    }
    pub fn p_e(&self) -> f64 {
        self.p_e
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sd_sq(&self) -> f64 {
        self.h_sd.norm_sqr()
    }
    pub fn se_sq(&self) -> f64 {
        self.h_se.norm_sqr()
    }
    pub fn ed_sq(&self) -> f64 {
        self.h_ed.norm_sqr()
    }

    /// Source power over noise power.
    pub fn ps_norm(&self) -> f64 {
        self.p_s / self.sigma2
    }

    /// Eavesdropper budget over noise power.
    pub fn pe_norm(&self) -> f64 {
        self.p_e / self.sigma2
    }

    /// Same scenario with every channel multiplied by a unit-modulus factor.
    pub fn rotated(&self, sd: f64, se: f64, ed: f64) -> Self {
        let rot = |h: ComplexGain, t: f64| h * Complex64::from_polar(1.0, t);
        Scenario {
            h_sd: rot(self.h_sd, sd),
            h_se: rot(self.h_se, se),
            h_ed: rot(self.h_ed, ed),
            ..*self
        }
    }
}

/// Collinear geometry: E sits on the S–D line at distance `d_se` from S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub d_sd: f64,
    pub d_se: f64,
    pub carrier_hz: f64,
    /// Received SNR at D without any attack.
    pub snr_d_db: f64,
    pub pe_over_ps: f64,
    /// Lower clamp for the E–D distance, which vanishes when E sits on D.
    pub min_distance_m: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            d_sd: 1000.0,
            d_se: 500.0,
            carrier_hz: 1.8e9,
            snr_d_db: 10.0,
            pe_over_ps: 1.0,
            min_distance_m: 1.0,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d_sd", self.d_sd),
            ("d_se", self.d_se),
            ("carrier_hz", self.carrier_hz),
            ("min_distance_m", self.min_distance_m),
        ];
        for (name, x) in positive {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {x}")));
            }
        }
        if !(self.pe_over_ps >= 0.0) || !self.pe_over_ps.is_finite() {
            return Err(Error::domain(format!(
                "pe_over_ps must be nonnegative, got {}",
                self.pe_over_ps
            )));
        }
        if !self.snr_d_db.is_finite() {
            return Err(Error::domain("snr_d_db must be finite"));
        }
        Ok(())
    }

    pub fn d_ed(&self) -> f64 {
        (self.d_se - self.d_sd).abs().max(self.min_distance_m)
    }
}

/// Builds the free-space scenario for a collinear placement.
///
/// Noise is normalized to one and the source power is chosen so that the
/// unattacked SNR at D equals `snr_d_db`.
pub fn build_collinear_scenario(cfg: &GeometryConfig) -> Result<Scenario> {
    cfg.validate()?;
    let h_sd = gain_from_distance(cfg.d_sd, cfg.carrier_hz)?;
    let h_se = gain_from_distance(cfg.d_se, cfg.carrier_hz)?;
    let h_ed = gain_from_distance(cfg.d_ed(), cfg.carrier_hz)?;
    let p_s = db_to_linear(cfg.snr_d_db) / h_sd.norm_sqr();
    Scenario::new(h_sd, h_se, h_ed, p_s, cfg.pe_over_ps * p_s, 1.0)
}
