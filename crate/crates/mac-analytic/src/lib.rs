//! Closed-form MAC model for slotted random access where the receiver
//! resolves two-user collisions.
//!
//! A lone transmission is delivered with probability `P0`; when exactly two
//! users transmit, both packets are recovered with probability `P1` and
//! exactly one (picked uniformly) with probability `P2`. Three or more
//! transmitters always collide. Everything below is parameterized by
//! `P' = P1 + P2/2`, the per-packet success probability inside a pair.
//!
//! The model covers the infinite-backlog network throughput and its optimal
//! contention probability, the asymptotic (large user count) throughput, and
//! the finite-backlog geom/geom/1 approximation: per-queue stability region,
//! active probability, throughput and delays.

use thiserror::Error;

/// Link-level outcome probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkProbs {
    /// Success probability of a lone transmission.
    pub p0: f64,
    /// Probability that both packets of a pair are recovered.
    pub p1: f64,
    /// Probability that exactly one packet of a pair is recovered.
    pub p2: f64,
}

#[derive(Debug, Error)]
pub enum LinkProbsError {
    #[error("probability {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("P1 + P2 = {0} exceeds 1")]
    PairBudgetExceeded(f64),
}

impl LinkProbs {
    pub fn new(p0: f64, p1: f64, p2: f64) -> Result<LinkProbs, LinkProbsError> {
        for v in [p0, p1, p2] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(LinkProbsError::OutOfRange(v));
            }
        }
        if p1 + p2 > 1.0 + 1e-12 {
            return Err(LinkProbsError::PairBudgetExceeded(p1 + p2));
        }
        Ok(LinkProbs { p0, p1, p2 })
    }

    /// The off-line measured values used by the bundled experiment configs.
    pub fn testbed_reference() -> LinkProbs {
        LinkProbs {
            p0: 0.998,
            p1: 0.965,
            p2: 0.009,
        }
    }

    /// Classical slotted ALOHA: pairs always collide.
    pub fn classical(p0: f64) -> LinkProbs {
        LinkProbs { p0, p1: 0.0, p2: 0.0 }
    }

    /// Per-packet success probability within a two-user slot.
    pub fn p_prime(&self) -> f64 {
        self.p1 + self.p2 / 2.0
    }
}

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("degenerate link: P0 = 0 leaves the optimum undefined")]
    DegenerateLink,
    #[error("root finding did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("undefined on this branch: {0}")]
    Undefined(&'static str),
}

/// Network throughput (packets per slot) with `j` always-active users each
/// contending with probability `p`.
pub fn throughput_finite(j: usize, p: f64, probs: &LinkProbs) -> f64 {
    let jf = j as f64;
    let single = probs.p0 * jf * p * (1.0 - p).powi(j as i32 - 1);
    let pair = probs.p_prime() * jf * (jf - 1.0) * p * p * (1.0 - p).powi(j as i32 - 2);
    single + pair
}

/// The contention probability maximizing [`throughput_finite`].
#[derive(Debug, Clone, Copy)]
pub struct OptimalContention {
    pub p_star: f64,
    /// The closed form exceeded 1 and was clamped (throughput is increasing
    /// on (0, 1] there).
    pub clamped: bool,
}

pub fn optimal_contention(j: usize, probs: &LinkProbs) -> Result<OptimalContention, AnalyticError> {
    assert!(j >= 2, "need at least two users");
    if probs.p0 <= 0.0 {
        return Err(AnalyticError::DegenerateLink);
    }
    let jf = j as f64;
    let p_prime = probs.p_prime();
    let a = (probs.p0 - 2.0 * p_prime) * (jf - 1.0);
    let b = p_prime * (jf - 1.0) * (jf - 2.0);
    let raw = 2.0 * probs.p0 / (2.0 * probs.p0 + a + (a * a + 4.0 * probs.p0 * b).sqrt());
    if raw > 1.0 || !raw.is_finite() {
        Ok(OptimalContention {
            p_star: 1.0,
            clamped: true,
        })
    } else {
        Ok(OptimalContention {
            p_star: raw,
            clamped: false,
        })
    }
}

/// Maximum throughput in the limit of infinitely many users.
pub fn asymptotic_throughput(probs: &LinkProbs) -> Result<f64, AnalyticError> {
    let p_prime = probs.p_prime();
    let eta = probs.p0 - 2.0 * p_prime + (probs.p0 * probs.p0 + 4.0 * p_prime * p_prime).sqrt();
    if eta <= 0.0 || !eta.is_finite() {
        return Err(AnalyticError::DegenerateLink);
    }
    let lead = 2.0 * probs.p0 * probs.p0 / eta;
    Ok(lead * (1.0 + 2.0 * p_prime / eta) * (-2.0 * probs.p0 / eta).exp())
}

/// Per-slot success probability of one active queue when every other queue is
/// active with probability `q` and contends with probability `p`.
///
/// The pair term carries the factor `q p^2`: the tagged queue transmits and
/// exactly one of the other `j - 1` queues is both active and transmitting.
/// This keeps `q * success_prob(q, p) = f(q p)` exactly, the fixed point the
/// stability analysis solves.
pub fn success_prob(q: f64, p: f64, j: usize, probs: &LinkProbs) -> f64 {
    let jf = j as f64;
    let idle = 1.0 - q * p;
    let single = probs.p0 * p * idle.powi(j as i32 - 1);
    let pair = probs.p_prime() * (jf - 1.0) * q * p * p * idle.powi(j as i32 - 2);
    single + pair
}

/// `f(z)`: success probability of a saturated queue at effective contention
/// `z`, i.e. `success_prob(1, z, ...)`.
pub fn saturated_success(z: f64, j: usize, probs: &LinkProbs) -> f64 {
    success_prob(1.0, z, j, probs)
}

fn saturated_success_derivative(z: f64, j: usize, probs: &LinkProbs) -> f64 {
    let jf = j as f64;
    let one = 1.0 - z;
    let jm1 = j as i32 - 1;
    let jm2 = j as i32 - 2;
    let mut d = probs.p0 * (one.powi(jm1) - (jf - 1.0) * z * pow_or_zero(one, jm1 - 1));
    let p_prime = probs.p_prime();
    d += p_prime * (jf - 1.0) * 2.0 * z * one.powi(jm2);
    if jm2 > 0 {
        d -= p_prime * (jf - 1.0) * (jf - 2.0) * z * z * pow_or_zero(one, jm2 - 1);
    }
    d
}

fn pow_or_zero(base: f64, exp: i32) -> f64 {
    if exp < 0 {
        0.0
    } else {
        base.powi(exp)
    }
}

/// Stability classification of one (J, r, p) operating point.
#[derive(Debug, Clone, Copy)]
pub struct StabilityProfile {
    /// Peak of `f` over (0, 1].
    pub f_max: f64,
    /// Argmax of `f`.
    pub p_star: f64,
    /// Lower root of `f(z) = r`, present when `r < f_max`.
    pub p_min: Option<f64>,
    /// Upper root of `f(z) = r` (1.0 when `f(1) >= r`).
    pub p_max: Option<f64>,
    /// The queue is stable at this contention probability.
    pub stable: bool,
    /// Steady-state active probability (1 when unstable).
    pub q: f64,
}

const ROOT_TOL: f64 = 1e-12;
const ROOT_ITERS: usize = 200;

/// Solve `f(z) = r` on a bracket where `f` is monotone.
fn solve_saturated(
    j: usize,
    probs: &LinkProbs,
    r: f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64, AnalyticError> {
    let g = |z: f64| saturated_success(z, j, probs) - r;
    let mut glo = g(lo);
    let ghi = g(hi);
    debug_assert!(glo * ghi <= 0.0, "root must be bracketed");
    let mut z = 0.5 * (lo + hi);
    for _ in 0..ROOT_ITERS {
        let gz = g(z);
        if gz.abs() < ROOT_TOL {
            return Ok(z);
        }
        // keep the bracket tight
        if gz * glo <= 0.0 {
            hi = z;
        } else {
            lo = z;
            glo = gz;
        }
        let d = saturated_success_derivative(z, j, probs);
        let newton = z - gz / d;
        z = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(AnalyticError::NoConvergence(ROOT_ITERS))
}

/// Classify the operating point and solve for the active probability.
///
/// `r >= f_max` (boundary included) is unstable with `q = 1`; otherwise the
/// two roots `p_min <= p_star <= p_max` of `f(z) = r` bound the stable
/// region, and inside it `q = p_min / p`.
pub fn stability_profile(
    j: usize,
    r: f64,
    p: f64,
    probs: &LinkProbs,
) -> Result<StabilityProfile, AnalyticError> {
    assert!(j >= 2, "need at least two users");
    assert!((0.0..=1.0).contains(&r), "arrival rate in [0, 1]");
    assert!(p > 0.0 && p < 1.0 + 1e-15, "contention in (0, 1]");
    let p_star = optimal_contention(j, probs)?.p_star;
    let f_max = saturated_success(p_star, j, probs);

    if r >= f_max || r <= 0.0 {
        let stable_trivially = r <= 0.0;
        return Ok(StabilityProfile {
            f_max,
            p_star,
            p_min: if stable_trivially { Some(0.0) } else { None },
            p_max: if stable_trivially { Some(1.0) } else { None },
            stable: stable_trivially,
            q: if stable_trivially { 0.0 } else { 1.0 },
        });
    }

    let p_min = solve_saturated(j, probs, r, 0.0, p_star)?;
    let f_at_one = saturated_success(1.0, j, probs);
    let p_max = if f_at_one >= r {
        1.0
    } else {
        solve_saturated(j, probs, r, p_star, 1.0)?
    };
    let stable = p >= p_min && p <= p_max;
    let q = if stable { (p_min / p).min(1.0) } else { 1.0 };
    Ok(StabilityProfile {
        f_max,
        p_star,
        p_min: Some(p_min),
        p_max: Some(p_max),
        stable,
        q,
    })
}

/// Steady-state active probability at contention `p`.
pub fn active_probability(profile: &StabilityProfile, p: f64) -> f64 {
    if profile.stable {
        match profile.p_min {
            Some(p_min) => (p_min / p).min(1.0),
            None => 0.0,
        }
    } else {
        1.0
    }
}

/// Network throughput of the finite-backlog approximation: `J r` when stable,
/// the saturated throughput otherwise.
pub fn approx_throughput(j: usize, r: f64, p: f64, probs: &LinkProbs) -> Result<f64, AnalyticError> {
    let profile = stability_profile(j, r, p, probs)?;
    Ok(if profile.stable {
        j as f64 * r
    } else {
        j as f64 * saturated_success(p, j, probs)
    })
}

/// Total (queueing plus service) delay prediction in slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayPrediction {
    Finite(f64),
    /// Unstable queue: the total delay grows without bound.
    Unbounded,
}

impl DelayPrediction {
    pub fn finite(&self) -> Option<f64> {
        match self {
            DelayPrediction::Finite(v) => Some(*v),
            DelayPrediction::Unbounded => None,
        }
    }
}

/// geom/geom/1 total delay on the stable branch.
pub fn total_delay(j: usize, r: f64, p: f64, probs: &LinkProbs) -> Result<DelayPrediction, AnalyticError> {
    let profile = stability_profile(j, r, p, probs)?;
    if !profile.stable {
        return Ok(DelayPrediction::Unbounded);
    }
    if r <= 0.0 {
        return Err(AnalyticError::Undefined("total delay with no traffic"));
    }
    let s = success_prob(profile.q, p, j, probs);
    let birth = r * (1.0 - s);
    let death = s * (1.0 - r);
    Ok(DelayPrediction::Finite(1.0 / (s * (1.0 - birth / death))))
}

/// Mean service (head-of-line) delay in slots: `q / r` when stable, the
/// saturated service time otherwise.
pub fn service_delay(j: usize, r: f64, p: f64, probs: &LinkProbs) -> Result<f64, AnalyticError> {
    let profile = stability_profile(j, r, p, probs)?;
    if profile.stable {
        if r <= 0.0 {
            return Err(AnalyticError::Undefined("service delay with no traffic"));
        }
        Ok(profile.q / r)
    } else {
        Ok(1.0 / saturated_success(p, j, probs))
    }
}
