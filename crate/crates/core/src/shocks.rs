//! Shock trains: arrival epochs, magnitudes and healability marks.

use crate::error::{Error, Result};
use crate::stochastic::{Lane, RngStream, Variate};

/// One replication's shocks in arrival order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShockTrain {
    arrivals: Vec<f64>,
    magnitudes: Vec<f64>,
    healable: Vec<bool>,
}

/// A single shock of a train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shock {
    pub time: f64,
    pub magnitude: f64,
    pub healable: bool,
}

impl ShockTrain {
    /// Builds a train, checking that arrivals are positive and strictly
    /// increasing, magnitudes positive and all three lists aligned.
    pub fn new(arrivals: Vec<f64>, magnitudes: Vec<f64>, healable: Vec<bool>) -> Result<Self> {
        if arrivals.len() != magnitudes.len() || arrivals.len() != healable.len() {
            return Err(Error::domain(
                "shock_train",
                format!(
                    "list lengths differ: {} arrivals, {} magnitudes, {} flags",
                    arrivals.len(),
                    magnitudes.len(),
                    healable.len()
                ),
            ));
        }
        let mut prev = 0.0;
        for (i, &s) in arrivals.iter().enumerate() {
            if !(s > prev) || !s.is_finite() {
                return Err(Error::domain(
                    "shock_train",
                    format!("arrival {i} at {s} is not after {prev}"),
                ));
            }
            prev = s;
        }
        if let Some(y) = magnitudes.iter().find(|&&y| !(y > 0.0 && y.is_finite())) {
            return Err(Error::domain("shock_train", format!("magnitude {y} is not positive")));
        }
        Ok(Self {
            arrivals,
            magnitudes,
            healable,
        })
    }

    /// All-healable train.
    pub fn healable(arrivals: Vec<f64>, magnitudes: Vec<f64>) -> Result<Self> {
        let flags = vec![true; arrivals.len()];
        Self::new(arrivals, magnitudes, flags)
    }

    /// All-nonhealable train (boundary drops).
    pub fn nonhealable(arrivals: Vec<f64>, magnitudes: Vec<f64>) -> Result<Self> {
        let flags = vec![false; arrivals.len()];
        Self::new(arrivals, magnitudes, flags)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn healable_flags(&self) -> &[bool] {
        &self.healable
    }

    pub fn get(&self, i: usize) -> Option<Shock> {
        Some(Shock {
            time: *self.arrivals.get(i)?,
            magnitude: self.magnitudes[i],
            healable: self.healable[i],
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Shock> + '_ {
        (0..self.len()).map(move |i| Shock {
            time: self.arrivals[i],
            magnitude: self.magnitudes[i],
            healable: self.healable[i],
        })
    }

    /// Number of shocks with arrival time `<= t`.
    pub fn count_until(&self, t: f64) -> usize {
        self.arrivals.partition_point(|&s| s <= t)
    }

    pub fn all_healable(&self) -> bool {
        self.healable.iter().all(|&h| h)
    }

    /// `(time, magnitude)` of every nonhealable shock.
    pub fn drops(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.iter().filter(|s| !s.healable).map(|s| (s.time, s.magnitude))
    }

    fn push(&mut self, time: f64, magnitude: f64, healable: bool) {
        // a vanishing inter-arrival draw can be absorbed by rounding
        let time = match self.arrivals.last() {
            Some(&prev) if time <= prev => prev.next_up(),
            _ => time,
        };
        self.arrivals.push(time);
        self.magnitudes.push(magnitude);
        self.healable.push(healable);
    }
}

/// Draws `count` shocks: cumulative IID inter-arrival times paired with IID
/// magnitudes, drawn interleaved (X1, Y1, X2, Y2, ...). All shocks healable.
pub fn generate_train(
    inter_arrival: &impl Variate,
    magnitude: &impl Variate,
    count: usize,
    rng: &mut RngStream,
) -> ShockTrain {
    let mut train = ShockTrain {
        arrivals: Vec::with_capacity(count),
        magnitudes: Vec::with_capacity(count),
        healable: Vec::with_capacity(count),
    };
    let mut t = 0.0;
    for _ in 0..count {
        t += inter_arrival.sample(rng);
        let y = magnitude.sample(rng);
        train.push(t, y, true);
        t = *train.arrivals.last().unwrap();
    }
    train
}

/// Like [`generate_train`] but keeps drawing until the next arrival would
/// fall beyond `horizon`; that overshooting shock is not kept.
pub fn generate_until(
    inter_arrival: &impl Variate,
    magnitude: &impl Variate,
    horizon: f64,
    healable: bool,
    rng: &mut RngStream,
) -> ShockTrain {
    let mut train = ShockTrain::empty();
    let mut t = 0.0;
    loop {
        t += inter_arrival.sample(rng);
        let y = magnitude.sample(rng);
        if t > horizon {
            return train;
        }
        train.push(t, y, healable);
        t = *train.arrivals.last().unwrap();
    }
}

/// Marks each shock nonhealable independently with probability `p`.
///
/// The input must be entirely healable: re-marking a train would redraw its
/// flags rather than leave them alone.
pub fn mark_nonhealable(train: &ShockTrain, p: f64, rng: &mut RngStream) -> Result<ShockTrain> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("p", format!("must lie in [0, 1], got {p}")));
    }
    if !train.all_healable() {
        return Err(Error::domain("shock_train", "train has already been marked"));
    }
    let healable = train.healable.iter().map(|_| rng.uniform() >= p).collect();
    Ok(ShockTrain {
        arrivals: train.arrivals.clone(),
        magnitudes: train.magnitudes.clone(),
        healable,
    })
}

/// Healable and nonhealable trains covering `[0, horizon]`, drawn from the
/// healable and nonhealable lanes of `stream`.
pub fn generate_two_streams(
    healable: (&impl Variate, &impl Variate),
    nonhealable: (&impl Variate, &impl Variate),
    horizon: f64,
    stream: &RngStream,
) -> Result<(ShockTrain, ShockTrain)> {
    if !(horizon > 0.0) {
        return Err(Error::domain("horizon", format!("must be positive, got {horizon}")));
    }
    let mut rng_h = stream.on_lane(Lane::Healable);
    let mut rng_n = stream.on_lane(Lane::Nonhealable);
    let first = generate_until(healable.0, healable.1, horizon, true, &mut rng_h);
    let second = generate_until(nonhealable.0, nonhealable.1, horizon, false, &mut rng_n);
    Ok((first, second))
}
