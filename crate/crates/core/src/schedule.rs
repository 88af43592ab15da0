//! Anneal schedules over the dimensionless anneal parameter s ∈ [0,1].
//!
//! A schedule is an ordered list of (time µs, s) breakpoints, interpolated
//! piecewise-linearly. s = 1 is a fully annealed system; the simulator maps s
//! to a Metropolis temperature elsewhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-linear anneal schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    points: Vec<(f64, f64)>,
}

impl AnnealSchedule {
    /// Validates breakpoints: at least two, times strictly increasing from 0,
    /// every s in [0,1].
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid(
                "AnnealSchedule::new",
                format!("need at least 2 breakpoints, got {}", points.len()),
            ));
        }
        if points[0].0 != 0.0 {
            return Err(Error::invalid(
                "AnnealSchedule::new",
                format!("first breakpoint must be at t = 0, got {}", points[0].0),
            ));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid(
                    "AnnealSchedule::new",
                    format!("times must be strictly increasing: {} then {}", w[0].0, w[1].0),
                ));
            }
        }
        for &(t, s) in &points {
            if !(0.0..=1.0).contains(&s) || !s.is_finite() {
                return Err(Error::invalid(
                    "AnnealSchedule::new",
                    format!("anneal parameter must lie in [0,1], got s = {s} at t = {t}"),
                ));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Total schedule duration in µs.
    pub fn duration_us(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Linearly interpolated anneal parameter at time `t_us`, clamped to the
    /// schedule's endpoints.
    pub fn parameter_at(&self, t_us: f64) -> f64 {
        if t_us <= self.points[0].0 {
            return self.points[0].1;
        }
        for w in self.points.windows(2) {
            let (t0, s0) = w[0];
            let (t1, s1) = w[1];
            if t_us <= t1 {
                let frac = (t_us - t0) / (t1 - t0);
                return s0 + frac * (s1 - s0);
            }
        }
        self.points[self.points.len() - 1].1
    }
}

/// The default forward schedule: s ramps 0 → 1 over 20 µs.
pub fn forward_schedule() -> AnnealSchedule {
    AnnealSchedule {
        points: vec![(0.0, 0.0), (20.0, 1.0)],
    }
}

/// Reverse schedule for reversal distance `r` and hold time `t_r_us`:
/// `[(0,1), (10,1−r), (10+t_r,1−r), (20+t_r,1)]`.
pub fn reverse_schedule(r: f64, t_r_us: f64) -> Result<AnnealSchedule> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::invalid(
            "reverse_schedule",
            format!("reversal distance must lie in (0,1], got {r}"),
        ));
    }
    if !(t_r_us > 0.0) {
        return Err(Error::invalid(
            "reverse_schedule",
            format!("reversal time must be positive, got {t_r_us}"),
        ));
    }
    AnnealSchedule::new(vec![
        (0.0, 1.0),
        (10.0, 1.0 - r),
        (10.0 + t_r_us, 1.0 - r),
        (20.0 + t_r_us, 1.0),
    ])
}
