// SPDX-License-Identifier: Apache-2.0

//! Rate functions for causal erasure channels and the classical
//! minimum-distance comparison curves.
//!
//! All logarithms are base 2: rates are in bits per channel use.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Absolute tolerance on the abscissa for every bisection in this module.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Iteration cap for bisection.
pub const ROOT_MAX_ITERATIONS: usize = 200;

#[inline]
pub fn log2_four_thirds() -> f64 {
    libm::log2(4.0 / 3.0)
}

/// Erasure fraction where the linear branch of [`rate_lower`] hands over to
/// the root branch: `3 log(4/3) / (2 + 3 log(4/3))`.
pub fn p1() -> f64 {
    let l = log2_four_thirds();
    3.0 * l / (2.0 + 3.0 * l)
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            name,
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

pub(crate) fn entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * libm::log2(x) - (1.0 - x) * libm::log2(1.0 - x)
}

/// Binary entropy `H(x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(entropy(x))
}

/// `(1 - 2p)^+`, the wait-push impossibility bound.
pub fn rate_upper(p: f64) -> f64 {
    (1.0 - 2.0 * p).clamp(0.0, 1.0)
}

fn g_unchecked(p: f64, x: f64) -> f64 {
    (1.0 - x) * entropy((p - x) / (1.0 - x)) - 1.0 + 2.0 * x
}

/// `G_p(x) = (1 - x) H((p - x) / (1 - x)) - 1 + 2x` for `0 <= x <= p < 1`.
pub fn g_p(p: f64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "[0, 1)",
        });
    }
    if !(0.0..=p).contains(&x) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            domain: "[0, p]",
        });
    }
    Ok(g_unchecked(p, x))
}

/// Bisection on a sign change of `f` over `[lo, hi]`.
///
/// An endpoint whose value is within [`ROOT_TOLERANCE`] of zero is accepted
/// as the root even when both endpoints share a sign; that covers the case
/// where the root sits on the bracket edge and rounding nudges it outside.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        if f_lo.abs() <= ROOT_TOLERANCE {
            return Ok(lo);
        }
        if f_hi.abs() <= ROOT_TOLERANCE {
            return Ok(hi);
        }
        return Err(Error::Internal("bisection bracket has no sign change"));
    }
    for _ in 0..ROOT_MAX_ITERATIONS {
        if hi - lo <= ROOT_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn root_with_offset(p: f64, offset: f64) -> Result<f64> {
    let hi = 1.5 * p - 0.5;
    bisect(|x| g_unchecked(p, x) + offset, 0.0, hi)
}

/// `r(p)`: the root of `G_p` on `[0, 3p/2 - 1/2]`, defined for `p1 <= p <= 1/2`.
pub fn root_r(p: f64) -> Result<f64> {
    let lo = p1();
    if !(lo..=0.5).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "[p1, 0.5]",
        });
    }
    root_with_offset(p, 0.0)
}

/// `R_L(p)`: the achievable rate against every `p`-bounded causal channel.
pub fn rate_lower(p: f64) -> f64 {
    let p = p.max(0.0);
    if p >= 0.5 {
        return 0.0;
    }
    if p <= p1() {
        return (1.0 - p / log2_four_thirds()).min(1.0);
    }
    root_with_offset(p, 0.0).expect("G_p changes sign on [0, 3p/2 - 1/2] for p1 < p < 1/2")
}

/// Slack parameters `(delta, eta)` for the finite-rate function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaEta {
    pub delta: f64,
    pub eta: f64,
}

impl DeltaEta {
    pub fn new(delta: f64, eta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "delta",
                value: delta,
                domain: "(0, inf)",
            });
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "eta",
                value: eta,
                domain: "(0, inf)",
            });
        }
        Ok(DeltaEta { delta, eta })
    }

    pub fn sum(&self) -> f64 {
        self.delta + self.eta
    }
}

fn check_open_half(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "(0, 0.5)",
        });
    }
    Ok(())
}

/// Largest admissible `delta + eta` at erasure fraction `p`.
pub fn constraint_bound(p: f64) -> Result<f64> {
    check_open_half(p)?;
    let l = log2_four_thirds();
    Ok(if p < 1.0 / 3.0 {
        3.0 * l - 1.0
    } else if p < p1() {
        1.5 * l - (1.5 * l + 1.0) * p
    } else {
        1.0 - entropy(p)
    })
}

pub fn constraint_check(p: f64, de: DeltaEta) -> Result<bool> {
    Ok(de.sum() <= constraint_bound(p)?)
}

/// `R_{delta,eta}(p)`, the rate whose forbidden balls stay exponentially
/// smaller than the suffix space.
pub fn rate_delta_eta(p: f64, de: DeltaEta) -> Result<f64> {
    if !constraint_check(p, de)? {
        return Err(Error::invalid(alloc::format!(
            "delta + eta = {} exceeds the admissible bound {} at p = {p}",
            de.sum(),
            constraint_bound(p)?
        )));
    }
    Ok(rate_delta_eta_unchecked(p, de))
}

fn rate_delta_eta_unchecked(p: f64, de: DeltaEta) -> f64 {
    let l = log2_four_thirds();
    if p < p1() {
        1.0 - p / l - de.delta * (1.0 - l) / l - de.eta / l
    } else {
        root_with_offset(p, de.sum()).expect("feasible slack keeps the root bracketed") + de.delta
    }
}

/// Classical rate bounds for codes of relative minimum distance `p`, plus
/// the random-erasure capacity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalBounds {
    pub gv: f64,
    pub plotkin: f64,
    pub elias_bassalygo: f64,
    pub mrrw: f64,
    pub random_capacity: f64,
}

impl ClassicalBounds {
    /// Best known upper bound on minimum-distance codes used for the
    /// crossover point.
    pub fn best_upper(&self) -> f64 {
        self.elias_bassalygo.min(self.mrrw)
    }
}

pub fn classical_bounds(p: f64) -> ClassicalBounds {
    let p = p.clamp(0.0, 1.0);
    let half = p <= 0.5;
    let clamp = |r: f64| r.clamp(0.0, 1.0);
    ClassicalBounds {
        gv: if half { clamp(1.0 - entropy(p)) } else { 0.0 },
        plotkin: rate_upper(p),
        elias_bassalygo: if half {
            clamp(1.0 - entropy((1.0 - libm::sqrt(1.0 - 2.0 * p)) / 2.0))
        } else {
            0.0
        },
        mrrw: if half {
            clamp(entropy(0.5 - libm::sqrt(p * (1.0 - p))))
        } else {
            0.0
        },
        random_capacity: 1.0 - p,
    }
}

/// Erasure fraction where [`rate_lower`] crosses the best known upper bound
/// on minimum-distance codes (pointwise minimum of Elias-Bassalygo and MRRW).
pub fn phi_intersection() -> f64 {
    bisect(
        |p| rate_lower(p) - classical_bounds(p).best_upper(),
        0.25,
        p1(),
    )
    .expect("lower bound crosses the upper bounds between 0.25 and p1")
}

/// Curve labels, in output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    UpperCausal,
    LowerCausal,
    LowerCausalFinite,
    Gv,
    Plotkin,
    EliasBassalygo,
    Mrrw,
    RandomCapacity,
}

impl Bound {
    pub const ALL: [Bound; 8] = [
        Bound::UpperCausal,
        Bound::LowerCausal,
        Bound::LowerCausalFinite,
        Bound::Gv,
        Bound::Plotkin,
        Bound::EliasBassalygo,
        Bound::Mrrw,
        Bound::RandomCapacity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Bound::UpperCausal => "upper_causal",
            Bound::LowerCausal => "lower_causal",
            Bound::LowerCausalFinite => "lower_causal_finite",
            Bound::Gv => "gv",
            Bound::Plotkin => "plotkin",
            Bound::EliasBassalygo => "elias_bassalygo",
            Bound::Mrrw => "mrrw",
            Bound::RandomCapacity => "random_capacity",
        }
    }

    /// Curves taken from the coding-theory literature rather than derived
    /// for causal channels.
    pub fn is_external_standard(self) -> bool {
        matches!(
            self,
            Bound::Gv | Bound::Plotkin | Bound::EliasBassalygo | Bound::Mrrw
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub p: f64,
    pub rate: f64,
    pub bound: Bound,
}

/// One bound sampled over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RateCurve {
    pub bound: Bound,
    pub external_standard: bool,
    /// Slack used for [`Bound::LowerCausalFinite`].
    pub delta_eta: Option<DeltaEta>,
    pub points: Vec<(f64, f64)>,
}

/// `R_{delta,eta}` as plotted: slack shrinks proportionally where the
/// requested one is infeasible, `p = 0` uses the linear branch, and the
/// curve is 0 from `p = 1/2` on.
pub fn rate_delta_eta_curve(p: f64, de: DeltaEta) -> f64 {
    if p >= 0.5 {
        return 0.0;
    }
    if p <= 0.0 {
        return rate_delta_eta_unchecked(0.0, de).clamp(0.0, 1.0);
    }
    let bound = constraint_bound(p).expect("p in (0, 1/2)");
    let scale = if de.sum() > bound {
        bound / de.sum()
    } else {
        1.0
    };
    let scaled = DeltaEta {
        delta: de.delta * scale,
        eta: de.eta * scale,
    };
    rate_delta_eta_unchecked(p, scaled).clamp(0.0, 1.0)
}

pub fn evaluate(bound: Bound, p: f64, de: DeltaEta) -> f64 {
    let c = classical_bounds(p);
    match bound {
        Bound::UpperCausal => rate_upper(p),
        Bound::LowerCausal => rate_lower(p),
        Bound::LowerCausalFinite => rate_delta_eta_curve(p, de),
        Bound::Gv => c.gv,
        Bound::Plotkin => c.plotkin,
        Bound::EliasBassalygo => c.elias_bassalygo,
        Bound::Mrrw => c.mrrw,
        Bound::RandomCapacity => c.random_capacity,
    }
}

/// Grid `p_min, p_min + step, ...` up to `p_max` inclusive.
pub fn grid(p_min: f64, p_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(0.0 <= p_min && p_min < p_max && p_max <= 1.0) {
        return Err(Error::invalid(alloc::format!(
            "grid needs 0 <= p_min < p_max <= 1, got [{p_min}, {p_max}]"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(alloc::format!("grid step must be positive, got {step}")));
    }
    let count = libm::floor((p_max - p_min) / step + 1e-9) as usize + 1;
    Ok((0..count)
        .map(|i| (p_min + i as f64 * step).min(p_max))
        .collect())
}

/// Every bound at every grid point: ascending `p`, then [`Bound::ALL`] order.
pub fn emit_curves(p_min: f64, p_max: f64, step: f64, de: DeltaEta) -> Result<Vec<RatePoint>> {
    let ps = grid(p_min, p_max, step)?;
    let mut out = Vec::with_capacity(ps.len() * Bound::ALL.len());
    for &p in &ps {
        for bound in Bound::ALL {
            out.push(RatePoint {
                p,
                rate: evaluate(bound, p, de),
                bound,
            });
        }
    }
    Ok(out)
}

/// [`emit_curves`] regrouped per bound.
pub fn rate_curves(p_min: f64, p_max: f64, step: f64, de: DeltaEta) -> Result<Vec<RateCurve>> {
    let ps = grid(p_min, p_max, step)?;
    Ok(Bound::ALL
        .iter()
        .map(|&bound| RateCurve {
            bound,
            external_standard: bound.is_external_standard(),
            delta_eta: (bound == Bound::LowerCausalFinite).then_some(de),
            points: ps.iter().map(|&p| (p, evaluate(bound, p, de))).collect(),
        })
        .collect())
}
