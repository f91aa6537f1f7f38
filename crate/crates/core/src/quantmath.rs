//! Werner-state calculus.
//!
//! A two-qubit Werner state `W |Φ+⟩⟨Φ+| + (1 - W) I/4` is fully described by
//! its fidelity `F = (3W + 1) / 4` to `|Φ+⟩`. Everything in this module works
//! on that single parameter: conversion between `F` and `W`, fidelity after
//! a chain of noisy entanglement swaps, and the hashing bound on distillable
//! entanglement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when a computed value lands a few ulps outside `[0.25, 1]`.
const ROUNDING_SLACK: f64 = 1e-12;

/// Fidelity of a Werner state, always within `[0.25, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WernerFidelity(f64);

impl WernerFidelity {
    /// The maximally mixed state.
    pub const MIXED: WernerFidelity = WernerFidelity(0.25);
    pub const PERFECT: WernerFidelity = WernerFidelity(1.0);

    pub fn new(f: f64) -> Result<Self> {
        if (0.25..=1.0).contains(&f) {
            Ok(WernerFidelity(f))
        } else {
            Err(Error::FidelityOutOfRange(f))
        }
    }

    /// Wraps a value produced by arithmetic on valid fidelities, absorbing
    /// rounding drift at the interval ends.
    pub(crate) fn from_computed(f: f64) -> Self {
        debug_assert!(
            (0.25 - ROUNDING_SLACK..=1.0 + ROUNDING_SLACK).contains(&f),
            "computed fidelity {f} out of range"
        );
        WernerFidelity(f.clamp(0.25, 1.0))
    }

    pub fn from_w(w: f64) -> Result<Self> {
        w_to_fidelity(w)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The Werner parameter `W = (4F - 1) / 3`.
    #[inline]
    pub fn w(self) -> f64 {
        (4.0 * self.0 - 1.0) / 3.0
    }
}

impl TryFrom<f64> for WernerFidelity {
    type Error = Error;

    fn try_from(f: f64) -> Result<Self> {
        WernerFidelity::new(f)
    }
}

impl From<WernerFidelity> for f64 {
    fn from(f: WernerFidelity) -> f64 {
        f.0
    }
}

impl std::fmt::Display for WernerFidelity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Physical error model of the repeater hardware.
///
/// `p2` is the probability that a two-qubit gate does not depolarize its
/// qubits, `eta` the probability that a measurement reports the right result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    p2: f64,
    eta: f64,
}

impl NoiseParams {
    pub const PERFECT: NoiseParams = NoiseParams { p2: 1.0, eta: 1.0 };

    /// `eta` below one half would describe a measurement that is more often
    /// wrong than right, which flips the sign of the swap factor; such values
    /// are rejected.
    pub fn new(p2: f64, eta: f64) -> Result<Self> {
        if p2 > 0.0 && p2 <= 1.0 && (0.5..=1.0).contains(&eta) {
            Ok(NoiseParams { p2, eta })
        } else {
            Err(Error::InvalidNoise { p2, eta })
        }
    }

    /// Same fidelity for gates and measurements, as in all the sweeps.
    pub fn uniform(fidelity: f64) -> Result<Self> {
        Self::new(fidelity, fidelity)
    }

    #[inline]
    pub fn p2(&self) -> f64 {
        self.p2
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Multiplicative factor on `W` contributed by one noisy Bell-state
    /// measurement: `p2 (4 eta^2 - 1) / 3`.
    #[inline]
    pub fn swap_factor(&self) -> f64 {
        self.p2 * (4.0 * self.eta * self.eta - 1.0) / 3.0
    }

    pub fn is_perfect(&self) -> bool {
        self.p2 == 1.0 && self.eta == 1.0
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams::PERFECT
    }
}

/// `W = (4F - 1) / 3` for a raw fidelity value.
pub fn fidelity_to_w(f: f64) -> Result<f64> {
    Ok(WernerFidelity::new(f)?.w())
}

/// `F = (3W + 1) / 4`.
pub fn w_to_fidelity(w: f64) -> Result<WernerFidelity> {
    if (0.0..=1.0).contains(&w) {
        Ok(WernerFidelity::from_computed((3.0 * w + 1.0) / 4.0))
    } else {
        Err(Error::WernerOutOfRange(w))
    }
}

/// Fidelity after joining `fids.len()` Werner links with `fids.len() - 1`
/// noisy swaps. The Werner parameters multiply, each swap adding one
/// [`NoiseParams::swap_factor`].
pub fn swap_fidelity(fids: &[WernerFidelity], noise: NoiseParams) -> Result<WernerFidelity> {
    let (first, rest) = fids.split_first().ok_or(Error::EmptyFidelities)?;
    if rest.is_empty() {
        return Ok(*first);
    }
    let w = swap_w(fids.iter().map(|f| f.w()), noise);
    Ok(WernerFidelity::from_computed(0.25 + 0.75 * w))
}

/// Combined Werner parameter of a swapped chain of links given by their own
/// Werner parameters.
pub(crate) fn swap_w(ws: impl IntoIterator<Item = f64>, noise: NoiseParams) -> f64 {
    let mut product = 1.0;
    let mut links = 0i32;
    for w in ws {
        product *= w;
        links += 1;
    }
    if links > 1 {
        product *= noise.swap_factor().powi(links - 1);
    }
    product
}

/// Hashing-bound yield per pair, floored at zero:
/// `max(0, 1 + F log2 F + (1 - F) log2((1 - F) / 3))`.
pub fn distillable_per_pair(f: WernerFidelity) -> f64 {
    let f = f.value();
    let x_log_x = |x: f64, arg: f64| if x == 0.0 { 0.0 } else { x * arg.log2() };
    let rate = 1.0 + x_log_x(f, f) + x_log_x(1.0 - f, (1.0 - f) / 3.0);
    rate.max(0.0)
}

/// Distillable entanglement (ebits) of `m` pairs of fidelity `f`.
pub fn distillable(m: f64, f: WernerFidelity) -> f64 {
    debug_assert!(m >= 0.0);
    m * distillable_per_pair(f)
}
