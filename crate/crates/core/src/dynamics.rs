//! Cumulative damage under exponential self-healing and the aging failure
//! boundary.
//!
//! [`cumulative_damage`] and [`effective_boundary`] evaluate the closed-form
//! sums directly. [`DamageTracker`] carries the same sum forward over a fixed
//! observation grid so a trajectory costs O(epochs + shocks).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shocks::ShockTrain;

/// Quadratic aging boundary `a + b t - c t^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BoundaryCoeffs {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let coeffs = Self { a, b, c };
        coeffs.validate()?;
        Ok(coeffs)
    }

    pub fn constant(a: f64) -> Result<Self> {
        Self::new(a, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::domain("a", format!("must be positive, got {}", self.a)));
        }
        if !self.b.is_finite() {
            return Err(Error::domain("b", "must be finite"));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(Error::domain("c", format!("must be non-negative, got {}", self.c)));
        }
        Ok(())
    }

    /// The slope `b - 2ct` is largest at `t = 0`, so the boundary is
    /// non-increasing on any `[0, horizon]` exactly when `b <= 0`.
    pub fn check_non_increasing(&self, horizon: f64) -> Result<()> {
        if self.b > 0.0 {
            let peak = (self.b / (2.0 * self.c)).min(horizon);
            return Err(Error::domain(
                "b",
                format!(
                    "boundary increases on [0, {peak}] (b = {} > 0); it must be non-increasing",
                    self.b
                ),
            ));
        }
        Ok(())
    }

    /// `a + b t - c t^2`, unclamped.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.a + self.b * t - self.c * t * t
    }
}

/// Healing rate `kappa` and healing duration `tau` (`f64::INFINITY` for
/// indefinite healing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HealingParams {
    pub kappa: f64,
    pub tau: f64,
}

impl HealingParams {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        let p = Self { kappa, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn indefinite(kappa: f64) -> Result<Self> {
        Self::new(kappa, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::domain(
                "kappa",
                format!("must be non-negative, got {}", self.kappa),
            ));
        }
        if !(self.tau > 0.0) {
            return Err(Error::domain("tau", format!("must be positive, got {}", self.tau)));
        }
        Ok(())
    }

    /// Residual weight of a shock of age `age`: `exp(-kappa * min(age, tau))`.
    #[inline]
    pub fn weight(&self, age: f64) -> f64 {
        (-self.kappa * age.min(self.tau)).exp()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain("t", format!("must be non-negative, got {t}")))
    }
}

/// Damage at time `t`: the sum of `Y_i exp(-kappa min(t - S_i, tau))` over
/// healable shocks with `S_i <= t`.
pub fn cumulative_damage(train: &ShockTrain, t: f64, healing: &HealingParams) -> Result<f64> {
    check_time(t)?;
    Ok(train
        .iter()
        .take_while(|s| s.time <= t)
        .filter(|s| s.healable)
        .map(|s| s.magnitude * healing.weight(t - s.time))
        .sum())
}

/// Boundary at time `t` lowered by every drop that has occurred by `t`.
pub fn effective_boundary(coeffs: &BoundaryCoeffs, t: f64, drops: &[(f64, f64)]) -> Result<f64> {
    check_time(t)?;
    if let Some(&(s, _)) = drops.iter().find(|(s, _)| !(*s >= 0.0)) {
        return Err(Error::domain("drop time", format!("must be non-negative, got {s}")));
    }
    let lowered: f64 = drops.iter().filter(|(s, _)| *s <= t).map(|(_, u)| u).sum();
    Ok(coeffs.value(t) - lowered)
}

/// Incremental damage evaluation along the grid `t = delta, 2 delta, ...`.
///
/// Shocks still inside their healing window live in `active`, which decays by
/// `exp(-kappa delta)` per step. Once a shock's age exceeds `tau` its current
/// weight is removed from `active` and its frozen residual `Y exp(-kappa tau)`
/// moves to `frozen`.
#[derive(Debug, Clone)]
pub struct DamageTracker<'a> {
    train: &'a ShockTrain,
    healing: HealingParams,
    step_decay: f64,
    frozen_weight: f64,
    /// next shock not yet arrived
    next: usize,
    /// next arrived shock whose healing window might still be open
    expiring: usize,
    live: usize,
    active: f64,
    frozen: f64,
}

/// What happened during one observation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub damage: f64,
    /// a healable shock arrived in `(t - delta, t]`
    pub healable_arrival: bool,
}

impl<'a> DamageTracker<'a> {
    pub fn new(train: &'a ShockTrain, healing: HealingParams, delta: f64) -> Self {
        Self {
            train,
            healing,
            step_decay: (-healing.kappa * delta).exp(),
            frozen_weight: (-healing.kappa * healing.tau).exp(),
            next: 0,
            expiring: 0,
            live: 0,
            active: 0.0,
            frozen: 0.0,
        }
    }

    /// Advances to the next grid epoch `t` (exactly one `delta` after the
    /// previous call, or `delta` for the first call).
    pub fn advance(&mut self, t: f64) -> Step {
        let arrivals = self.train.arrivals();
        let magnitudes = self.train.magnitudes();
        let flags = self.train.healable_flags();

        self.active *= self.step_decay;

        let mut healable_arrival = false;
        while self.next < arrivals.len() && arrivals[self.next] <= t {
            if flags[self.next] {
                self.active += magnitudes[self.next] * (-self.healing.kappa * (t - arrivals[self.next])).exp();
                self.live += 1;
                healable_arrival = true;
            }
            self.next += 1;
        }

        while self.expiring < self.next {
            let i = self.expiring;
            if flags[i] {
                let age = t - arrivals[i];
                if !(age > self.healing.tau) {
                    break;
                }
                self.active -= magnitudes[i] * (-self.healing.kappa * age).exp();
                self.frozen += magnitudes[i] * self.frozen_weight;
                self.live -= 1;
                if self.live == 0 {
                    self.active = 0.0;
                }
            }
            self.expiring += 1;
        }

        Step {
            damage: self.active + self.frozen,
            healable_arrival,
        }
    }
}
