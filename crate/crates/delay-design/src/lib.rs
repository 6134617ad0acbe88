//! Intentional-delay design.
//!
//! Two colliding users are separable when the peaks of their pulses are at
//! least `delta` apart modulo the symbol interval. With intentional delays
//! drawn uniformly on `[0, T]` and natural delay differences distributed as
//! `f_delta`, the relative delay density is the convolution of a triangular
//! density with `f_delta`, and the non-resolvable probability is the mass of
//! that density inside windows of width `delta` around every multiple of the
//! symbol interval. This crate evaluates that probability by adaptive
//! quadrature and scans it over the spread `T`, where a local minimum
//! appears at `T = Ts` regardless of the natural-delay family.

pub mod quadrature;

use thiserror::Error;

pub use quadrature::QuadratureError;
use quadrature::integrate_piecewise;
#[cfg(test)]
use quadrature::integrate;

/// Density family for the natural delay difference, symmetric about zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NaturalDelaySpread {
    /// No natural delay spread.
    Dirac,
    /// Zero-mean Gaussian with standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Uniform on `[-width/2, width/2]`.
    Uniform { width: f64 },
}

impl NaturalDelaySpread {
    /// Density value at `x`. The Dirac case has no density; callers special-case it.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            NaturalDelaySpread::Dirac => panic!("Dirac spread has no pointwise density"),
            NaturalDelaySpread::Gaussian { sigma } => {
                (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            NaturalDelaySpread::Uniform { width } => {
                if x.abs() <= width / 2.0 {
                    1.0 / width
                } else {
                    0.0
                }
            }
        }
    }

    /// Half-width outside which the density is negligible (exactly zero for
    /// Dirac/Uniform, below 1e-12 of the peak for Gaussian).
    pub fn support(&self) -> f64 {
        match *self {
            NaturalDelaySpread::Dirac => 0.0,
            NaturalDelaySpread::Gaussian { sigma } => 8.0 * sigma,
            NaturalDelaySpread::Uniform { width } => width / 2.0,
        }
    }

    /// Draw one natural delay difference.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            NaturalDelaySpread::Dirac => 0.0,
            NaturalDelaySpread::Gaussian { sigma } => {
                use rand_distr::Distribution;
                rand_distr::Normal::new(0.0, sigma).unwrap().sample(rng)
            }
            NaturalDelaySpread::Uniform { width } => rng.random_range(-width / 2.0..=width / 2.0),
        }
    }

    /// Interior points the quadrature must sample when this density is
    /// centered at `center` (edges of the uniform, the bell of the Gaussian).
    fn breakpoints(&self, center: f64) -> Vec<f64> {
        match *self {
            NaturalDelaySpread::Dirac => Vec::new(),
            NaturalDelaySpread::Uniform { width } => vec![center - width / 2.0, center + width / 2.0],
            NaturalDelaySpread::Gaussian { sigma } => {
                vec![center - sigma, center, center + sigma]
            }
        }
    }

    /// Kink locations of `triangular(spread) * f_delta` as a function of the
    /// convolution output variable.
    fn convolution_breakpoints(&self, spread: f64) -> Vec<f64> {
        let mut kinks = vec![-spread, 0.0, spread];
        if let NaturalDelaySpread::Uniform { width } = *self {
            for base in [-spread, 0.0, spread] {
                kinks.push(base - width / 2.0);
                kinks.push(base + width / 2.0);
            }
        }
        kinks
    }
}

#[derive(Debug, Error)]
pub enum DelayModelError {
    #[error("spread T must be positive, got {0}")]
    NonPositiveSpread(f64),
    #[error("symbol interval must be positive, got {0}")]
    NonPositiveSymbolInterval(f64),
    #[error("delta must satisfy 0 < delta < T (delta {delta}, T {spread})")]
    DeltaOutOfRange { delta: f64, spread: f64 },
    #[error("density parameter must be positive")]
    BadDensityParameter,
}

/// Inputs to the non-resolvable-collision probability.
#[derive(Debug, Clone)]
pub struct DelayModel {
    /// Intentional-delay spread `T` (same unit as the symbol interval).
    pub spread: f64,
    /// Symbol interval `Ts`.
    pub symbol_interval: f64,
    /// Minimum resolvable peak separation, `0 < delta < T`.
    pub delta: f64,
    pub f_delta: NaturalDelaySpread,
    /// Half-range of the window sum; windows at `n Ts` for `|n| <= n_range`.
    pub n_range: usize,
    /// Absolute quadrature tolerance.
    pub quad_tol: f64,
}

impl DelayModel {
    pub fn new(
        spread: f64,
        symbol_interval: f64,
        delta: f64,
        f_delta: NaturalDelaySpread,
    ) -> Result<DelayModel, DelayModelError> {
        if !(spread > 0.0) {
            return Err(DelayModelError::NonPositiveSpread(spread));
        }
        if !(symbol_interval > 0.0) {
            return Err(DelayModelError::NonPositiveSymbolInterval(symbol_interval));
        }
        if !(delta > 0.0 && delta < spread) {
            return Err(DelayModelError::DeltaOutOfRange { delta, spread });
        }
        match f_delta {
            NaturalDelaySpread::Gaussian { sigma } if !(sigma > 0.0) => {
                return Err(DelayModelError::BadDensityParameter)
            }
            NaturalDelaySpread::Uniform { width } if !(width > 0.0) => {
                return Err(DelayModelError::BadDensityParameter)
            }
            _ => {}
        }
        // windows beyond the density support contribute nothing; cover it fully
        let reach = spread + f_delta.support() + delta / 2.0;
        let n_range = ((reach / symbol_interval).ceil() as usize + 1).max(3);
        Ok(DelayModel {
            spread,
            symbol_interval,
            delta,
            f_delta,
            n_range,
            quad_tol: 1e-9,
        })
    }

    /// Same model with a different spread.
    pub fn with_spread(&self, spread: f64) -> Result<DelayModel, DelayModelError> {
        DelayModel::new(spread, self.symbol_interval, self.delta, self.f_delta)
    }
}

/// Density of the intentional-delay difference: `1/T - |x|/T^2` on `|x| <= T`.
pub fn triangular_density(spread: f64, x: f64) -> f64 {
    if x.abs() <= spread {
        1.0 / spread - x.abs() / (spread * spread)
    } else {
        0.0
    }
}

/// Density of the total relative delay: triangular convolved with `f_delta`.
pub fn relative_delay_density(model: &DelayModel, x: f64) -> Result<f64, QuadratureError> {
    let t = model.spread;
    match model.f_delta {
        NaturalDelaySpread::Dirac => Ok(triangular_density(t, x)),
        _ => {
            let supp = model.f_delta.support();
            // restrict to where both factors are nonzero so the adaptive
            // refinement cannot overlook a narrow density
            let lo = (-t).max(x - supp);
            let hi = t.min(x + supp);
            if lo >= hi {
                return Ok(0.0);
            }
            let mut breaks = vec![0.0];
            breaks.extend(model.f_delta.breakpoints(x));
            integrate_piecewise(
                |v| triangular_density(t, v) * model.f_delta.density(x - v),
                lo,
                hi,
                &breaks,
                model.quad_tol / 10.0,
            )
        }
    }
}

/// Probability that the relative delay falls within `delta/2` of a multiple
/// of the symbol interval (the collision cannot be resolved).
pub fn nonresolvable_probability(model: &DelayModel) -> Result<f64, QuadratureError> {
    let ts = model.symbol_interval;
    let half = model.delta / 2.0;
    let n = model.n_range as i64;
    let mut total = 0.0;
    for k in -n..=n {
        let center = k as f64 * ts;
        let lo = center - half;
        let hi = center + half;
        if lo > model.spread + model.f_delta.support() || hi < -(model.spread + model.f_delta.support()) {
            continue;
        }
        let breaks = model.f_delta.convolution_breakpoints(model.spread);
        total += integrate_piecewise(
            |x| relative_delay_density(model, x).unwrap_or(0.0),
            lo,
            hi,
            &breaks,
            model.quad_tol,
        )?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// One point of a spread scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanPoint {
    pub spread: f64,
    pub probability: f64,
}

/// Result of scanning the spread grid.
#[derive(Debug, Clone)]
pub struct SpreadScan {
    pub points: Vec<ScanPoint>,
    /// Probability at exactly `T = Ts`.
    pub probability_at_ts: f64,
    /// `P_c(Ts) < P_c(neighbors)` on the grid.
    pub local_min_at_ts: bool,
    /// Centered finite difference of `P_c` at `T = Ts`.
    pub derivative_at_ts: f64,
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Model(#[from] DelayModelError),
    #[error("spread grid must contain points on both sides of Ts")]
    GridDoesNotStraddleTs,
}

/// Evaluate `P_c` over a grid of spreads and check for the local minimum
/// at `T = Ts`.
pub fn scan_spread(model: &DelayModel, t_grid: &[f64]) -> Result<SpreadScan, ScanError> {
    let ts = model.symbol_interval;
    if !(t_grid.iter().any(|&t| t < ts) && t_grid.iter().any(|&t| t > ts)) {
        return Err(ScanError::GridDoesNotStraddleTs);
    }
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let p = nonresolvable_probability(&model.with_spread(t)?)?;
        points.push(ScanPoint {
            spread: t,
            probability: p,
        });
    }
    points.sort_by(|a, b| a.spread.partial_cmp(&b.spread).unwrap());

    let p_ts = nonresolvable_probability(&model.with_spread(ts)?)?;
    let below = points
        .iter().rfind(|p| p.spread < ts * (1.0 - 1e-12));
    let above = points.iter().find(|p| p.spread > ts * (1.0 + 1e-12));
    let local_min_at_ts = match (below, above) {
        (Some(b), Some(a)) => p_ts < b.probability && p_ts < a.probability,
        _ => false,
    };

    let h = 1e-3 * ts;
    let plus = nonresolvable_probability(&model.with_spread(ts + h)?)?;
    let minus = nonresolvable_probability(&model.with_spread(ts - h)?)?;
    let derivative_at_ts = (plus - minus) / (2.0 * h);

    Ok(SpreadScan {
        points,
        probability_at_ts: p_ts,
        local_min_at_ts,
        derivative_at_ts,
    })
}

/// Monte Carlo estimate of the non-resolvable probability: draw the delay
/// difference directly, reduce modulo the symbol interval and count hits
/// inside the window. Returns `(estimate, standard_error)`.
pub fn nonresolvable_probability_monte_carlo<R: rand::Rng>(
    model: &DelayModel,
    draws: usize,
    rng: &mut R,
) -> (f64, f64) {
    let ts = model.symbol_interval;
    let mut hits = 0usize;
    for _ in 0..draws {
        let alpha = rng.random_range(0.0..=model.spread) - rng.random_range(0.0..=model.spread);
        let tau = alpha + model.f_delta.sample(rng);
        let mut m = tau.rem_euclid(ts);
        if m > ts / 2.0 {
            m -= ts;
        }
        if m.abs() <= model.delta / 2.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / draws as f64;
    let se = (p * (1.0 - p) / draws as f64).sqrt();
    (p, se)
}
