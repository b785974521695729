use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Performance over abstract time steps with a disturbance at
/// `disturbance_step` and a recovery window of `recovery_window` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResilienceTrace {
    pub performance: Vec<f64>,
    pub disturbance_step: usize,
    pub recovery_window: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceScores {
    /// Worst performance inside the window, relative to the baseline.
    pub robustness: f64,
    /// Performance at the end of the window, relative to the baseline.
    pub resiliency: f64,
}

/// Baseline is the mean performance before the disturbance; both scores are
/// clamped to `[0, 1]`.
pub fn score_trace(trace: &ResilienceTrace) -> Result<TraceScores> {
    let p = &trace.performance;
    let (d, t) = (trace.disturbance_step, trace.recovery_window);
    if p.is_empty() {
        return Err(Error::param("performance", "trace is empty"));
    }
    if let Some(x) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::param("performance", format!("value {x} is not a finite non-negative number")));
    }
    if d == 0 {
        return Err(Error::param("disturbance_step", "no pre-disturbance steps to form a baseline"));
    }
    if d + t >= p.len() {
        return Err(Error::param(
            "recovery_window",
            format!("window ends at step {} but the trace has {} steps", d + t, p.len()),
        ));
    }
    let baseline = p[..d].iter().sum::<f64>() / d as f64;
    if baseline <= 0.0 {
        return Err(Error::param("performance", "baseline performance is zero"));
    }
    let worst = p[d..=d + t].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TraceScores {
        robustness: (worst / baseline).clamp(0.0, 1.0),
        resiliency: (p[d + t] / baseline).clamp(0.0, 1.0),
    })
}
