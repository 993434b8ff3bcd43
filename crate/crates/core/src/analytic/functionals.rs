//! Test functionals: point functionals `f: R^d -> [0, ∞)` for Laplace
//! functionals and window functionals `f(y_s, ..., y_t)` for the
//! time-change identity.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::window::SpectralWindow;
use crate::rv::norm::NormSpec;

pub type PointFn = Arc<dyn Fn(&[f64], &NormSpec) -> f64 + Send + Sync>;

/// Nonnegative function on `R^d` that vanishes on a ball around the origin.
#[derive(Clone)]
pub enum PointFunctional {
    Zero,
    /// `scale · 1(‖x‖ > level)`.
    Indicator { scale: f64, level: f64 },
    /// `scale · (‖x‖ - level)_+`.
    Excess { scale: f64, level: f64 },
    /// User function; `radius` is the radius of the ball it vanishes on.
    Custom {
        name: String,
        radius: Option<f64>,
        f: PointFn,
    },
}

impl fmt::Debug for PointFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointFunctional::Zero => f.write_str("Zero"),
            PointFunctional::Indicator { scale, level } => f
                .debug_struct("Indicator")
                .field("scale", scale)
                .field("level", level)
                .finish(),
            PointFunctional::Excess { scale, level } => f
                .debug_struct("Excess")
                .field("scale", scale)
                .field("level", level)
                .finish(),
            PointFunctional::Custom { name, radius, .. } => f
                .debug_struct("Custom")
                .field("name", name)
                .field("radius", radius)
                .finish(),
        }
    }
}

impl PointFunctional {
    /// Radius of the ball around 0 on which the function vanishes.
    pub fn vanishing_radius(&self) -> Option<f64> {
        match self {
            PointFunctional::Zero => Some(f64::INFINITY),
            PointFunctional::Indicator { level, .. } | PointFunctional::Excess { level, .. } => {
                Some(*level)
            }
            PointFunctional::Custom { radius, .. } => *radius,
        }
    }

    /// `f(y θ)`; `buf` is scratch space of the same length as `theta`.
    pub fn eval_scaled(&self, theta: &[f64], y: f64, norm: &NormSpec, buf: &mut Vec<f64>) -> f64 {
        match self {
            PointFunctional::Zero => 0.0,
            PointFunctional::Indicator { scale, level } => {
                if y * norm.eval(theta) > *level {
                    *scale
                } else {
                    0.0
                }
            }
            PointFunctional::Excess { scale, level } => scale * (y * norm.eval(theta) - level).max(0.0),
            PointFunctional::Custom { f, .. } => {
                buf.clear();
                buf.extend(theta.iter().map(|x| y * x));
                f(buf, norm)
            }
        }
    }
}

/// Read-only view `y_l = scale · Θ_{l + shift}` of a window, zero outside
/// the drawn lags.
#[derive(Debug, Clone, Copy)]
pub struct WindowView<'a> {
    pub(crate) win: &'a SpectralWindow,
    pub(crate) shift: i64,
    pub(crate) scale: f64,
    pub(crate) norm: &'a NormSpec,
}

impl WindowView<'_> {
    /// `‖y_lag‖`.
    pub fn norm_at(&self, lag: i64) -> f64 {
        let j = lag + self.shift;
        if self.win.covers(j) {
            self.scale * self.win.norm_at(j, self.norm)
        } else {
            0.0
        }
    }

    /// Writes `y_lag` into `out`.
    pub fn vector(&self, lag: i64, out: &mut [f64]) {
        let j = lag + self.shift;
        if self.win.covers(j) {
            out.iter_mut()
                .zip(self.win.at(j))
                .for_each(|(o, x)| *o = self.scale * x);
        } else {
            out.fill(0.0);
        }
    }
}

pub type WindowFn = Arc<dyn Fn(&WindowView<'_>) -> f64 + Send + Sync>;

/// Bounded function of `(y_lo, ..., y_hi)`. The time-change identity needs
/// `f = 0` whenever `y_0 = 0`; the caller vouches for that.
#[derive(Clone)]
pub struct WindowFunctional {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    f: WindowFn,
}

impl fmt::Debug for WindowFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WindowFunctional")
            .field("name", &self.name)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

fn cap(x: f64) -> f64 {
    x.min(1.0)
}

impl WindowFunctional {
    pub fn new(name: impl Into<String>, lo: i64, hi: i64, f: WindowFn) -> Self {
        assert!(lo <= 0 && 0 <= hi, "window functional must involve lag 0");
        WindowFunctional {
            name: name.into(),
            lo,
            hi,
            f,
        }
    }

    pub fn eval(&self, view: &WindowView<'_>) -> f64 {
        (self.f)(view)
    }

    /// The five built-in test functionals, each carrying the factor
    /// `min(‖y_0‖, 1)`.
    pub fn battery() -> Vec<WindowFunctional> {
        alloc::vec![
            WindowFunctional::new(
                "indicator-lag1",
                0,
                1,
                Arc::new(|v| cap(v.norm_at(0)) * if v.norm_at(1) > 0.5 { 1.0 } else { 0.0 }),
            ),
            WindowFunctional::new(
                "cap-lag-minus1",
                -1,
                0,
                Arc::new(|v| cap(v.norm_at(0)) * cap(v.norm_at(-1))),
            ),
            WindowFunctional::new(
                "exp-lag1",
                0,
                1,
                Arc::new(|v| cap(v.norm_at(0)) * libm::exp(-v.norm_at(1))),
            ),
            WindowFunctional::new(
                "cap-max-neighbours",
                -1,
                1,
                Arc::new(|v| cap(v.norm_at(0)) * cap(v.norm_at(-1).max(v.norm_at(1)))),
            ),
            WindowFunctional::new(
                "cap-sum-2",
                -2,
                2,
                Arc::new(|v| {
                    let s: f64 = (-2..=2).map(|l| v.norm_at(l)).sum();
                    cap(v.norm_at(0)) * s.min(3.0) / 3.0
                }),
            ),
        ]
    }
}
