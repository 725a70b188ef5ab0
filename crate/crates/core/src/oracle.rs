//! Brute-force references for the closed forms.
//!
//! Nothing here uses the envelope formulas or the case analysis: the grid
//! search evaluates the destination SNR directly over `(ρ, |v|, ∠v)`, and the
//! Monte-Carlo estimator synthesizes the received samples symbol by symbol.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ComplexGain, Scenario};
use crate::error::{Error, Result};
use crate::leakage::{rate, snr_d_unchecked, RelayControl};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub leakage_bps_hz: f64,
    pub rho_hat: f64,
    pub v_hat: ComplexGain,
    /// Estimated distance between the grid optimum and the true optimum, bps/Hz.
    pub resolution_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSize {
    pub n_rho: usize,
    pub n_mag: usize,
    pub n_phase: usize,
}

impl Default for GridSize {
    fn default() -> Self {
        GridSize {
            n_rho: 256,
            n_mag: 256,
            n_phase: 64,
        }
    }
}

impl GridSize {
    fn validate(&self) -> Result<()> {
        if self.n_rho < 2 || self.n_mag < 2 || self.n_phase < 2 {
            return Err(Error::domain(format!(
                "grid sizes must be at least 2, got {}x{}x{}",
                self.n_rho, self.n_mag, self.n_phase
            )));
        }
        Ok(())
    }

    fn rho(&self, i: usize) -> f64 {
        if i + 1 == self.n_rho {
            1.0
        } else {
            i as f64 / (self.n_rho - 1) as f64
        }
    }
}

fn cap(s: &Scenario, rho: f64) -> f64 {
    (s.p_e() / (rho * s.se_sq() * s.p_s() + s.sigma2())).sqrt()
}

fn eve_snr(s: &Scenario, rho: f64) -> f64 {
    (1.0 - rho) * s.se_sq() * s.p_s() / s.sigma2()
}

struct Slice {
    /// (leakage, mag index, phase index) of the best decodable point.
    best: Option<(f64, usize, usize)>,
    /// Largest destination rate reachable anywhere in the slice.
    top_rate: f64,
    /// Eavesdropper rate at this ρ.
    eve_rate: f64,
}

impl Slice {
    /// Upper estimate of the slice optimum: decodable rates sit below both
    /// the destination's best rate and the eavesdropper's rate.
    fn ceiling(&self) -> f64 {
        self.top_rate.min(self.eve_rate)
    }
}

struct Grid<'a> {
    s: &'a Scenario,
    size: GridSize,
    phasors: Vec<Complex64>,
}

impl<'a> Grid<'a> {
    fn new(s: &'a Scenario, size: GridSize) -> Self {
        let phasors = (0..size.n_phase)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / size.n_phase as f64))
            .collect();
        Grid { s, size, phasors }
    }

    fn control(&self, i: usize, j: usize, k: usize) -> RelayControl {
        let rho = self.size.rho(i);
        let mag = cap(self.s, rho) * j as f64 / (self.size.n_mag - 1) as f64;
        RelayControl::new(rho, self.phasors[k] * mag)
    }

    fn snr(&self, i: usize, j: usize, k: usize) -> f64 {
        let c = self.control(i, j, k);
        snr_d_unchecked(self.s, c.rho, c.v)
    }

    /// Largest rate change from the top point of slice `i` to a grid
    /// neighbour in `v`: how far the true maximum may sit above the grid's.
    fn top_spread(&self, i: usize) -> f64 {
        let n = self.size;
        let mut top = (f64::NEG_INFINITY, 0, 0);
        for j in 0..n.n_mag {
            let phases = if j == 0 { 1 } else { n.n_phase };
            for k in 0..phases {
                let g = self.snr(i, j, k);
                if g > top.0 {
                    top = (g, j, k);
                }
            }
        }
        let (g, j, k) = top;
        let mut neighbours = vec![];
        if j > 0 {
            neighbours.push((j - 1, if j == 1 { 0 } else { k }));
            neighbours.push((j, (k + 1) % n.n_phase));
            neighbours.push((j, (k + n.n_phase - 1) % n.n_phase));
        }
        if j + 1 < n.n_mag {
            neighbours.push((j + 1, k));
        }
        neighbours
            .into_iter()
            .map(|(jj, kk)| (rate(self.snr(i, jj, kk)) - rate(g)).abs())
            .fold(0.0, f64::max)
    }

    fn slice(&self, i: usize) -> Slice {
        let gamma_e = eve_snr(self.s, self.size.rho(i));
        let mut best: Option<(f64, usize, usize)> = None;
        let mut top = f64::NEG_INFINITY;
        for j in 0..self.size.n_mag {
            // |v| = 0 is the same point for every phase
            let phases = if j == 0 { 1 } else { self.size.n_phase };
            for k in 0..phases {
                let g = self.snr(i, j, k);
                top = top.max(g);
                if g <= gamma_e {
                    let leak = rate(g);
                    if best.is_none_or(|(b, _, _)| leak > b) {
                        best = Some((leak, j, k));
                    }
                }
            }
        }
        Slice {
            best,
            top_rate: rate(top),
            eve_rate: rate(gamma_e),
        }
    }
}

/// Exhaustive search for the leakage-optimal control over a uniform grid.
///
/// `ρ` is uniform on `[0, 1]`, `|v|` uniform on `[0, cap(ρ)]` so that the
/// full-power controls are always on the grid, and `∠v` uniform on `[0, 2π)`.
/// Ties are broken by the lowest grid index, so the result does not depend
/// on how the ρ-slices are scheduled across threads.
pub fn grid_oracle(s: &Scenario, size: GridSize) -> Result<OracleResult> {
    size.validate()?;
    let grid = Grid::new(s, size);
    let slices: Vec<Slice> = (0..size.n_rho)
        .into_par_iter()
        .map(|i| grid.slice(i))
        .collect();

    let mut best: Option<(f64, usize, usize, usize)> = None;
    for (i, sl) in slices.iter().enumerate() {
        if let Some((leak, j, k)) = sl.best {
            if best.is_none_or(|(b, ..)| leak > b) {
                best = Some((leak, i, j, k));
            }
        }
    }
    let Some((leak, i, j, k)) = best else {
        return Ok(OracleResult {
            leakage_bps_hz: 0.0,
            rho_hat: 0.0,
            v_hat: Complex64::new(0.0, 0.0),
            resolution_bound: 0.0,
        });
    };

    // Over a cell [ρ_a, ρ_b] the destination's best rate is nondecreasing and
    // the eavesdropper's rate decreasing, so no control in the cell leaks more
    // than min(top(ρ_b), eve(ρ_a)). The bound is the largest such excess over
    // the two cells around ρ̂; `top` gets the v-grid spacing as slack.
    let top_slack = |n: usize| slices[n].top_rate + grid.top_spread(n);
    let mut ceiling = slices[i].ceiling();
    if i > 0 {
        ceiling = ceiling.max(top_slack(i).min(slices[i - 1].eve_rate));
    }
    if i + 1 < size.n_rho {
        ceiling = ceiling.max(top_slack(i + 1).min(slices[i].eve_rate));
    }

    let c = grid.control(i, j, k);
    Ok(OracleResult {
        leakage_bps_hz: leak,
        rho_hat: c.rho,
        v_hat: c.v,
        resolution_bound: (ceiling - leak).max(0.0),
    })
}

/// Writes every grid point as `rho,v_re,v_im,gamma_d,gamma_e,feasible`.
pub fn write_grid_csv<W: Write>(s: &Scenario, size: GridSize, mut out: W) -> std::io::Result<()> {
    size.validate()
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e.to_string()))?;
    let grid = Grid::new(s, size);
    writeln!(out, "rho,v_re,v_im,gamma_d,gamma_e,feasible")?;
    for i in 0..size.n_rho {
        let gamma_e = eve_snr(s, size.rho(i));
        for j in 0..size.n_mag {
            for k in 0..size.n_phase {
                let c = grid.control(i, j, k);
                let g = snr_d_unchecked(s, c.rho, c.v);
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    c.rho,
                    c.v.re,
                    c.v.im,
                    g,
                    gamma_e,
                    u8::from(g <= gamma_e)
                )?;
            }
        }
    }
    Ok(())
}

/// Destination SNRs at `n_samples` random feasible controls for a fixed `rho`.
///
/// The first sample is always the silent relay `v = 0`; the rest draw `v`
/// uniformly over the disc of feasible amplification coefficients.
pub fn envelope_samples(s: &Scenario, rho: f64, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::domain(format!(
            "splitting ratio must lie in [0, 1], got {rho}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = cap(s, rho);
    Ok((0..n_samples)
        .map(|n| {
            let v = if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let mag = r * rng.gen::<f64>().sqrt();
                Complex64::from_polar(mag, 2.0 * PI * rng.gen::<f64>())
            };
            snr_d_unchecked(s, rho, v)
        })
        .collect())
}

/// One circularly-symmetric complex Gaussian sample of variance `var`
/// (Box–Muller on two uniforms).
fn cscg(rng: &mut ChaCha8Rng, var: f64) -> Complex64 {
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    Complex64::from_polar((var * -u1.ln()).sqrt(), 2.0 * PI * u2)
}

/// Stream indices of the three noise sources; each gets its own ChaCha stream.
const STREAM_SYMBOL: u64 = 0;
const STREAM_RELAY_NOISE: u64 = 1;
const STREAM_DEST_NOISE: u64 = 2;

/// Empirical destination SNR from a symbol-level simulation of the relay link.
///
/// Per symbol: `x_E = v(√ρ h_SE √P_S d + n_R)` and
/// `y_D = h_SD √P_S d + h_ED x_E + n_D`. The noise part of `y_D` is
/// `h_ED v n_R + n_D`; whatever remains is the signal, and the estimate is the
/// ratio of their empirical powers.
pub fn monte_carlo_snr_d(
    s: &Scenario,
    c: &RelayControl,
    n_symbols: usize,
    seed: u64,
) -> Result<f64> {
    if n_symbols < 10_000 {
        return Err(Error::domain(format!(
            "need at least 10^4 symbols, got {n_symbols}"
        )));
    }
    if !(0.0..=1.0).contains(&c.rho) {
        return Err(Error::domain(format!(
            "splitting ratio must lie in [0, 1], got {}",
            c.rho
        )));
    }
    let stream = |k: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(k);
        r
    };
    let (mut rd, mut rr, mut rn) = (
        stream(STREAM_SYMBOL),
        stream(STREAM_RELAY_NOISE),
        stream(STREAM_DEST_NOISE),
    );
    let sqrt_ps = s.p_s().sqrt();
    let sqrt_rho = c.rho.sqrt();

    let mut signal_energy = 0.0;
    let mut noise_energy = 0.0;
    for _ in 0..n_symbols {
        let d = cscg(&mut rd, 1.0);
        let n_r = cscg(&mut rr, s.sigma2());
        let n_d = cscg(&mut rn, s.sigma2());
        let x_e = c.v * (sqrt_rho * s.h_se() * sqrt_ps * d + n_r);
        let y_d = s.h_sd() * sqrt_ps * d + s.h_ed() * x_e + n_d;
        let noise = c.v * s.h_ed() * n_r + n_d;
        signal_energy += (y_d - noise).norm_sqr();
        noise_energy += noise.norm_sqr();
    }
    Ok(signal_energy / noise_energy)
}

/// Relative tolerance for the Monte-Carlo estimate at `n_symbols`.
pub fn monte_carlo_tolerance(n_symbols: usize) -> f64 {
    5.0 * (2.0 / n_symbols as f64).sqrt()
}

/// Ranges for [`random_scenario`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioRanges {
    /// Log-uniform range of every `|h|²`.
    pub gain: (f64, f64),
    /// Log-uniform range of `P_S/σ²` and `P_E/σ²`.
    pub snr: (f64, f64),
    /// Log-uniform range of the noise power.
    pub sigma2: (f64, f64),
}

impl Default for ScenarioRanges {
    fn default() -> Self {
        ScenarioRanges {
            gain: (1e-3, 10.0),
            snr: (0.1, 1e3),
            sigma2: (0.1, 10.0),
        }
    }
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Draws a scenario with random channel phases and log-uniform magnitudes.
pub fn random_scenario<R: Rng>(rng: &mut R, ranges: &ScenarioRanges) -> Scenario {
    let gain = |rng: &mut R| {
        Complex64::from_polar(
            log_uniform(rng, ranges.gain).sqrt(),
            2.0 * PI * rng.gen::<f64>() - PI,
        )
    };
    let h_sd = gain(rng);
    let h_se = gain(rng);
    let h_ed = gain(rng);
    let sigma2 = log_uniform(rng, ranges.sigma2);
    let ps = log_uniform(rng, ranges.snr);
    let pe = log_uniform(rng, ranges.snr);
    Scenario::new(h_sd, h_se, h_ed, ps * sigma2, pe * sigma2, sigma2)
        .expect("ranges produce valid scenarios")
}

/// A random feasible relay control for `s`.
pub fn random_control<R: Rng>(rng: &mut R, s: &Scenario) -> RelayControl {
    let rho = rng.gen::<f64>();
    let mag = cap(s, rho) * rng.gen::<f64>().sqrt();
    RelayControl::new(rho, Complex64::from_polar(mag, 2.0 * PI * rng.gen::<f64>()))
}
