//! The state space: functions sampled on a uniform grid over [0,1], paired
//! with a scalar initial value, and the weighted vector-valued distance
//! between pairs of such states.
//!
//! A [`SystemState`] is `((x, a), (y, b))`, where `x`, `y` are grid functions
//! and `a`, `b` the scalars the nonlocal conditions act on. Distances are
//! measured per component by `|x|_sup + theta * |a|`, which keeps the two
//! error channels (function and scalar) coupled through a tunable weight.

use thiserror::Error;

/// Minimum number of grid intervals.
pub const MIN_INTERVALS: usize = 4;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("grid needs at least {MIN_INTERVALS} intervals, got {n}")]
    GridTooCoarse { n: usize },
    #[error("grid value at node {index} is {value}, expected finite")]
    NonFiniteValue { index: usize, value: f64 },
    #[error("scalar component is {value}, expected finite")]
    NonFiniteScalar { value: f64 },
    #[error("grid mismatch: {left} vs {right} intervals")]
    GridMismatch { left: usize, right: usize },
    #[error("weight must be positive and finite, got {theta}")]
    InvalidTheta { theta: f64 },
}

/// Real-valued function sampled at the nodes `t_i = i / N` of a uniform grid
/// on [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps `N + 1` node values; rejects coarse grids and non-finite data.
    pub fn from_values(values: Vec<f64>) -> Result<Self, SpaceError> {
        if values.len() < MIN_INTERVALS + 1 {
            return Err(SpaceError::GridTooCoarse {
                n: values.len().saturating_sub(1),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(SpaceError::NonFiniteValue { index: i, value: v });
            }
        }
        Ok(Self { values })
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(n_intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self, SpaceError> {
        let h = 1.0 / n_intervals as f64;
        Self::from_values((0..=n_intervals).map(|i| f(i as f64 * h)).collect())
    }

    pub fn constant(n_intervals: usize, c: f64) -> Result<Self, SpaceError> {
        Self::from_values(vec![c; n_intervals + 1])
    }

    pub fn zero(n_intervals: usize) -> Result<Self, SpaceError> {
        Self::constant(n_intervals, 0.0)
    }

    pub fn n_intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n_intervals() as f64
    }

    /// Abscissa of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at_node(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
    }

    /// Linear interpolation between neighboring nodes; exact at nodes.
    /// `t` must lie in [0,1].
    pub fn interpolate(&self, t: f64) -> f64 {
        assert!((0.0..=1.0).contains(&t), "abscissa {t} outside [0,1]");
        let n = self.n_intervals() as f64;
        let pos = t * n;
        let i = (pos.floor() as usize).min(self.n_intervals() - 1);
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Max of |values| over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Composite trapezoid rule over the whole grid.
    pub fn trapezoid_integral(&self) -> f64 {
        let h = self.step();
        let n = self.n_intervals();
        let interior: f64 = self.values[1..n].iter().sum();
        h * (0.5 * (self.values[0] + self.values[n]) + interior)
    }

    /// Applies `f` nodewise; the caller guarantees finite outputs.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, SpaceError> {
        Self::from_values(self.values.iter().map(|&v| f(v)).collect())
    }
}

/// A grid function together with its scalar initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    func: GridFunction,
    scalar: f64,
}

impl AugmentedState {
    pub fn new(func: GridFunction, scalar: f64) -> Result<Self, SpaceError> {
        if !scalar.is_finite() {
            return Err(SpaceError::NonFiniteScalar { value: scalar });
        }
        Ok(Self { func, scalar })
    }

    pub fn func(&self) -> &GridFunction {
        &self.func
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    /// `|x|_sup + theta * |a|`.
    pub fn weighted_norm(&self, weight: &ThetaWeight) -> f64 {
        self.func.sup_norm() + weight.value() * self.scalar.abs()
    }
}

/// The full solver state `((x, a), (y, b))`; both components share one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    first: AugmentedState,
    second: AugmentedState,
}

impl SystemState {
    pub fn new(first: AugmentedState, second: AugmentedState) -> Result<Self, SpaceError> {
        if !first.func.same_grid(&second.func) {
            return Err(SpaceError::GridMismatch {
                left: first.func.n_intervals(),
                right: second.func.n_intervals(),
            });
        }
        Ok(Self { first, second })
    }

    pub fn zero(n_intervals: usize) -> Result<Self, SpaceError> {
        Ok(Self {
            first: AugmentedState::new(GridFunction::zero(n_intervals)?, 0.0)?,
            second: AugmentedState::new(GridFunction::zero(n_intervals)?, 0.0)?,
        })
    }

    pub fn first(&self) -> &AugmentedState {
        &self.first
    }

    pub fn second(&self) -> &AugmentedState {
        &self.second
    }

    pub fn n_intervals(&self) -> usize {
        self.first.func.n_intervals()
    }

    /// Componentwise weighted norms `(|x_a|, |y_b|)`.
    pub fn weighted_norms(&self, weight: &ThetaWeight) -> [f64; 2] {
        [
            self.first.weighted_norm(weight),
            self.second.weighted_norm(weight),
        ]
    }

    /// Componentwise weighted distance to `other`. This is the vector-valued
    /// metric the contraction estimates are stated in: nonnegative, symmetric,
    /// zero exactly on equal states, and componentwise triangular.
    pub fn vector_distance(
        &self,
        other: &Self,
        weight: &ThetaWeight,
    ) -> Result<[f64; 2], SpaceError> {
        if self.n_intervals() != other.n_intervals() {
            return Err(SpaceError::GridMismatch {
                left: self.n_intervals(),
                right: other.n_intervals(),
            });
        }
        let component = |a: &AugmentedState, b: &AugmentedState| {
            let sup = a
                .func
                .values()
                .iter()
                .zip(b.func.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            sup + weight.value() * (a.scalar - b.scalar).abs()
        };
        Ok([
            component(&self.first, &other.first),
            component(&self.second, &other.second),
        ])
    }
}

/// Positive weight `theta` coupling the scalar part into the norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaWeight(f64);

impl ThetaWeight {
    pub fn new(theta: f64) -> Result<Self, SpaceError> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(SpaceError::InvalidTheta { theta });
        }
        Ok(Self(theta))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}
