use statrs::function::gamma::ln_gamma;

use super::inverse::{pseudo_inverse, MonotoneMap};
use crate::{Error, Result};

/// Tail-integrability class of a bounding function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailClass {
    /// Non-increasing and bounded; tail integral may diverge.
    Fbar,
    /// Every iterated tail integral is finite.
    Gbar,
}

/// Uniform grid `x_i = i * step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    step: f64,
    len: usize,
}

impl Grid {
    pub fn new(step: f64, x_max: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::param("step", format!("must be > 0, got {step}")));
        }
        if !(x_max.is_finite() && x_max >= 0.0) {
            return Err(Error::param("x_max", format!("must be >= 0, got {x_max}")));
        }
        let len = (x_max / step + 1e-9).floor() as usize + 1;
        Ok(Self { step, len })
    }

    pub fn with_len(step: f64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Empty("grid"));
        }
        Self::new(step, step * (len - 1) as f64)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.x(i))
    }

    /// Index of the last grid point `<= x`, tolerant to rounding just below a point.
    pub fn floor_index(&self, x: f64) -> usize {
        ((x / self.step) + 1e-9).floor().max(0.0) as usize
    }

    /// Grid sharing this step and reaching at least `x_max`.
    pub fn extended_to(&self, x_max: f64) -> Self {
        if x_max <= self.x_max() {
            *self
        } else {
            Self { step: self.step, len: (x_max / self.step).ceil() as usize + 1 }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Shape {
    Step,
    Exponential { amplitude: f64, decay: f64 },
    Md1Wait { rate: f64, hbar: f64 },
    Sampled { grid: Grid, values: Vec<f64>, tail_decay: Option<f64> },
    Scaled { base: Box<BoundingFunction>, scale: f64 },
    Warped { base: Box<BoundingFunction>, map: MonotoneMap },
    Inflated { base: Box<BoundingFunction>, eta: f64 },
    Shifted { base: Box<BoundingFunction>, shift: f64 },
}

/// Non-increasing violation-probability envelope, equal to 1 for `x < 0` and
/// clipped to `[0, 1]` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingFunction {
    pub(crate) shape: Shape,
    class: TailClass,
}

impl BoundingFunction {
    /// 1 for `x < 0`, 0 for `x >= 0`: the bound of a deterministic quantity.
    pub fn step() -> Self {
        Self { shape: Shape::Step, class: TailClass::Gbar }
    }

    /// `min(1, amplitude * exp(-decay * x))`.
    pub fn exponential(amplitude: f64, decay: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::param("amplitude", format!("must be >= 0, got {amplitude}")));
        }
        if !(decay.is_finite() && decay > 0.0) {
            return Err(Error::param("decay", format!("must be > 0, got {decay}")));
        }
        Ok(Self { shape: Shape::Exponential { amplitude, decay }, class: TailClass::Gbar })
    }

    /// Steady-state waiting-time tail of a queue with Poisson(`rate`) input and
    /// constant service `hbar`:
    ///
    /// ```text
    /// h(x) = 1 - (1-rho) * sum_{i=0}^{floor(x/hbar)} e^{-mu(i hbar - x)} [mu(i hbar - x)]^i / i!
    ///      =     (1-rho) * sum_{i>floor(x/hbar)}   e^{-mu(i hbar - x)} [mu(i hbar - x)]^i / i!
    /// ```
    ///
    /// with `rho = mu * hbar < 1`. The second form has positive terms only and
    /// is what gets evaluated.
    pub fn md1_wait(rate: f64, hbar: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param("rate", format!("must be > 0, got {rate}")));
        }
        if !(hbar.is_finite() && hbar > 0.0 && rate * hbar < 1.0) {
            return Err(Error::param("hbar", format!("need 0 < hbar < 1/rate, got hbar={hbar}, rate={rate}")));
        }
        Ok(Self { shape: Shape::Md1Wait { rate, hbar }, class: TailClass::Gbar })
    }

    /// Left-continuous samples on `grid`, read as a right-continuous staircase.
    /// Beyond the grid the last value decays as `exp(-tail_decay * dx)`, or is
    /// held when no decay is declared. Values must be non-increasing in `[0,1]`.
    pub fn sampled(grid: Grid, values: Vec<f64>, tail_decay: Option<f64>, class: TailClass) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { left: values.len(), right: grid.len() });
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::param("values", "must lie in [0, 1]"));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::param("values", format!("increasing at index {}", i + 1)));
        }
        if let Some(d) = tail_decay {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::param("tail_decay", format!("must be > 0, got {d}")));
            }
        }
        let last = *values.last().unwrap();
        if class == TailClass::Gbar && tail_decay.is_none() && last > 0.0 {
            return Err(Error::param("tail_decay", "required for a Gbar function with a nonzero last sample"));
        }
        Ok(Self { shape: Shape::Sampled { grid, values, tail_decay }, class })
    }

    /// Builds a sampled function from raw values, clipping to `[0, 1]` and
    /// lifting any rounding-level increase so the result is non-increasing.
    pub(crate) fn sampled_lifted(grid: Grid, mut values: Vec<f64>, tail_decay: Option<f64>, class: TailClass) -> Self {
        for v in values.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        for i in (0..values.len().saturating_sub(1)).rev() {
            if values[i] < values[i + 1] {
                values[i] = values[i + 1];
            }
        }
        let last = values.last().copied().unwrap_or(0.0);
        let class = if last > 0.0 && tail_decay.is_none() { TailClass::Fbar } else { class };
        Self { shape: Shape::Sampled { grid, values, tail_decay }, class }
    }

    /// `x -> base(scale * x)`.
    pub fn scaled(base: &BoundingFunction, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::param("scale", format!("must be > 0, got {scale}")));
        }
        if base.is_step() {
            return Ok(Self::step());
        }
        Ok(Self { shape: Shape::Scaled { base: Box::new(base.clone()), scale }, class: base.class })
    }

    /// `x -> base(z^{-1}(x))` with the lower pseudo-inverse of `map`.
    pub fn warped(base: &BoundingFunction, map: MonotoneMap) -> Self {
        if base.is_step() {
            return Self::step();
        }
        Self { shape: Shape::Warped { base: Box::new(base.clone()), map }, class: TailClass::Fbar }
    }

    /// `x -> base(x - shift)`, equal to 1 below `shift`.
    pub fn shifted(base: &BoundingFunction, shift: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::param("shift", format!("must be finite, got {shift}")));
        }
        if shift == 0.0 {
            return Ok(base.clone());
        }
        Ok(Self { shape: Shape::Shifted { base: Box::new(base.clone()), shift }, class: base.class })
    }

    pub(crate) fn inflated(base: &BoundingFunction, eta: f64) -> Self {
        Self { shape: Shape::Inflated { base: Box::new(base.clone()), eta }, class: TailClass::Gbar }
    }

    pub fn class(&self) -> TailClass {
        self.class
    }

    pub fn is_step(&self) -> bool {
        matches!(self.shape, Shape::Step)
    }

    /// Declared exponential decay rate of the tail, if known.
    pub fn tail_decay(&self) -> Option<f64> {
        match &self.shape {
            Shape::Step => None,
            Shape::Exponential { decay, .. } => Some(*decay),
            Shape::Md1Wait { rate, hbar } => Some(md1_decay(*rate, *hbar)),
            Shape::Sampled { tail_decay, .. } => *tail_decay,
            Shape::Scaled { base, scale } => base.tail_decay().map(|d| d * scale),
            Shape::Warped { .. } => None,
            Shape::Inflated { base, .. } => base.tail_decay(),
            Shape::Shifted { base, .. } => base.tail_decay(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        let v = match &self.shape {
            Shape::Step => 0.0,
            Shape::Exponential { amplitude, decay } => amplitude * (-decay * x).exp(),
            Shape::Md1Wait { rate, hbar } => md1_tail(*rate, *hbar, x),
            Shape::Sampled { grid, values, tail_decay } => {
                let i = grid.floor_index(x);
                if i + 1 < values.len() {
                    values[i]
                } else {
                    let last = *values.last().unwrap();
                    match tail_decay {
                        Some(d) => last * (-d * (x - grid.x_max()).max(0.0)).exp(),
                        None => last,
                    }
                }
            }
            Shape::Scaled { base, scale } => base.eval(scale * x),
            Shape::Warped { base, map } => base.eval(pseudo_inverse(map, x)),
            Shape::Inflated { base, eta } => {
                // the tail integral exists by construction
                base.eval(x) + base.tail_integral(x).unwrap_or(f64::INFINITY) / eta
            }
            Shape::Shifted { base, shift } => base.eval(x - shift),
        };
        v.clamp(0.0, 1.0)
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.points().map(|x| self.eval(x)).collect()
    }

    /// `int_x^inf self(y) dy`; `Err(NotIntegrable)` when it cannot be shown finite.
    pub fn tail_integral(&self, x: f64) -> Result<f64> {
        let x = x.max(0.0);
        match &self.shape {
            Shape::Step => Ok(0.0),
            Shape::Exponential { amplitude, decay } => {
                let knee = if *amplitude > 1.0 { amplitude.ln() / decay } else { 0.0 };
                if x < knee {
                    Ok(knee - x + 1.0 / decay)
                } else {
                    Ok(amplitude * (-decay * x).exp() / decay)
                }
            }
            Shape::Sampled { grid, values, tail_decay } => {
                let last = *values.last().unwrap();
                let beyond = |from: f64| -> Result<f64> {
                    if last == 0.0 {
                        return Ok(0.0);
                    }
                    match tail_decay {
                        Some(d) => Ok(last * (-d * (from - grid.x_max())).exp() / d),
                        None => Err(Error::NotIntegrable),
                    }
                };
                if x >= grid.x_max() {
                    return beyond(x);
                }
                let i = grid.floor_index(x).min(values.len() - 2);
                let mut acc = (grid.x(i + 1) - x).max(0.0) * values[i];
                acc += values[i + 1..values.len() - 1].iter().sum::<f64>() * grid.step();
                Ok(acc + beyond(grid.x_max())?)
            }
            Shape::Scaled { base, scale } => Ok(base.tail_integral(scale * x)? / scale),
            Shape::Shifted { base, shift } => {
                if x >= *shift {
                    base.tail_integral(x - shift)
                } else {
                    Ok((shift - x) + base.tail_integral(0.0)?)
                }
            }
            _ => self.numeric_tail_integral(x),
        }
    }

    /// Upper Riemann sum of the non-increasing function, closed by the declared
    /// exponential tail once values are negligible.
    fn numeric_tail_integral(&self, x: f64) -> Result<f64> {
        let step = match &self.shape {
            Shape::Md1Wait { hbar, .. } => hbar / 64.0,
            _ => 1.0 / 64.0,
        };
        let decay = self.tail_decay();
        let mut acc = 0.0;
        let mut y = x;
        for _ in 0..4_000_000 {
            let v = self.eval(y);
            if v == 0.0 {
                return Ok(acc);
            }
            if v < 1e-15 {
                return match decay {
                    Some(d) => Ok(acc + v / d),
                    None => Err(Error::NotIntegrable),
                };
            }
            acc += v * step;
            y += step;
        }
        Err(Error::NotIntegrable)
    }
}

/// Positive-term evaluation of the M/D/1 waiting-time tail.
fn md1_tail(mu: f64, hbar: f64, x: f64) -> f64 {
    let rho = mu * hbar;
    let k0 = (x / hbar).floor() as u64 + 1;
    let mut ln_fact = ln_gamma(k0 as f64 + 1.0);
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut j = k0;
    loop {
        let v = mu * (j as f64 * hbar - x);
        let term = if v > 0.0 { (-v + j as f64 * v.ln() - ln_fact).exp() } else { 0.0 };
        sum += term;
        if (term < prev && term <= 1e-17 * sum) || j > k0 + 1_000_000 {
            break;
        }
        prev = term;
        j += 1;
        ln_fact += (j as f64).ln();
    }
    (1.0 - rho) * sum
}

/// Root `theta > 0` of `exp(theta * hbar) = 1 + theta / mu`: the exponential
/// decay rate of the waiting-time tail (and of the bound `h(x) <= exp(-theta x)`).
fn md1_decay(mu: f64, hbar: f64) -> f64 {
    let g = |t: f64| t * hbar - (t / mu).ln_1p();
    let mut hi = 1.0 / hbar;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    // g < 0 just right of zero because hbar < 1/mu
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
