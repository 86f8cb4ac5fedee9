//! Temporal mode functions and the trapezoidal overlaps used for mode
//! matching.
//!
//! A [`TemporalMode`] is always carried as samples on a uniform
//! [`TimeGrid`]. Modes built from a closed form also keep that closed form,
//! so the integrator can evaluate the drive between grid points and a mode
//! can be resampled exactly onto another grid. Every mode also records its
//! support, the closed interval outside which it vanishes identically;
//! quadratures never straddle a support edge, which keeps the step
//! discontinuity of `Theta(-t)` from spoiling second-order accuracy.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{param, Error, Result};

/// Uniform sampling of `[t_start, t_end]` with `n_points >= 2` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::Grid(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(Error::Grid(format!(
                "need finite t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            n_points,
        })
    }

    /// Grid starting at `t_start` with spacing `dt` and `n_points` samples.
    pub fn with_step(t_start: f64, dt: f64, n_points: usize) -> Result<Self> {
        Self::new(t_start, t_start + dt * (n_points as f64 - 1.0), n_points)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.t_end
        } else {
            self.t_start + i as f64 * self.dt()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.time(i))
    }

    /// Index range of samples inside `[lo, hi]` (with a small slack).
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let dt = self.dt();
        let slack = 1e-9 * dt;
        let first = ((lo - self.t_start - slack) / dt).ceil().max(0.0) as usize;
        let last = ((hi - self.t_start + slack) / dt).floor();
        if last < 0.0 {
            return 0..0;
        }
        let last = (last as usize).min(self.n_points - 1);
        if first > last {
            0..0
        } else {
            first..last + 1
        }
    }

    fn same_as(&self, other: &TimeGrid) -> bool {
        let tol = 1e-9 * self.dt();
        self.n_points == other.n_points
            && (self.t_start - other.t_start).abs() <= tol
            && (self.t_end - other.t_end).abs() <= tol
    }
}

/// How to evaluate a closed-form mode exactly at an edge of its support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    /// The edge sample takes the closed-form value.
    Closed,
    /// Limit approached from smaller times.
    FromBelow,
    /// Limit approached from larger times.
    FromAbove,
}

impl Limit {
    fn flipped(self) -> Self {
        match self {
            Limit::Closed => Limit::Closed,
            Limit::FromBelow => Limit::FromAbove,
            Limit::FromAbove => Limit::FromBelow,
        }
    }
}

const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum ShapeKind {
    /// `sqrt(2 kappa) e^{kappa t} L_n(-2 kappa t)` on `t <= 0`.
    Laguerre { n: usize, kappa: f64 },
    /// `-i conj(e^{kappa_+ t} sinh(m t) / m)` on `t <= 0`.
    Atomic { kappa_plus: Complex64, m: Complex64 },
}

impl ShapeKind {
    fn eval(&self, s: f64, limit: Limit) -> Complex64 {
        let inside = if s.abs() <= EDGE_EPS {
            limit != Limit::FromAbove
        } else {
            s < 0.0
        };
        if !inside {
            return Complex64::new(0.0, 0.0);
        }
        match *self {
            ShapeKind::Laguerre { n, kappa } => {
                let v = (2.0 * kappa).sqrt() * (kappa * s).exp() * laguerre(n, -2.0 * kappa * s);
                Complex64::new(v, 0.0)
            }
            ShapeKind::Atomic { kappa_plus, m } => {
                let k = (kappa_plus * s).exp() * sinh_over(m, s);
                -Complex64::i() * k.conj()
            }
        }
    }
}

/// Closed form `q(t) = c(scale * f(sign * t + offset))`, with `c` an
/// optional complex conjugation.
#[derive(Debug, Clone, PartialEq)]
struct Shape {
    kind: ShapeKind,
    scale: f64,
    sign: f64,
    offset: f64,
    conj: bool,
}

impl Shape {
    fn new(kind: ShapeKind) -> Self {
        Self {
            kind,
            scale: 1.0,
            sign: 1.0,
            offset: 0.0,
            conj: false,
        }
    }

    fn eval(&self, t: f64, limit: Limit) -> Complex64 {
        let limit = if self.sign < 0.0 {
            limit.flipped()
        } else {
            limit
        };
        let v = self.kind.eval(self.sign * t + self.offset, limit) * self.scale;
        if self.conj {
            v.conj()
        } else {
            v
        }
    }

    /// `t -> conj(q(T - t))`.
    fn reversed(&self, about: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            scale: self.scale,
            sign: -self.sign,
            offset: self.sign * about + self.offset,
            conj: !self.conj,
        }
    }
}

/// A complex envelope sampled on a uniform grid (units `1/sqrt(time)`).
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalMode {
    grid: TimeGrid,
    samples: Vec<Complex64>,
    shape: Option<Shape>,
    support: (f64, f64),
}

impl TemporalMode {
    pub fn from_samples(grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        Ok(Self {
            support: (grid.t_start(), grid.t_end()),
            grid,
            samples,
            shape: None,
        })
    }

    fn from_shape(shape: Shape, support: (f64, f64), grid: TimeGrid) -> Self {
        let samples = grid.times().map(|t| shape.eval(t, Limit::Closed)).collect();
        Self {
            grid,
            samples,
            shape: Some(shape),
            support,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Closed interval outside which the mode vanishes.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn has_closed_form(&self) -> bool {
        self.shape.is_some()
    }

    /// Value at `t`: the closed form when one exists, otherwise linear
    /// interpolation of the samples (zero outside the grid).
    pub fn value_at(&self, t: f64, limit: Limit) -> Complex64 {
        if let Some(shape) = &self.shape {
            return shape.eval(t, limit);
        }
        let (s0, s1) = self.support;
        if t < s0 - EDGE_EPS || t > s1 + EDGE_EPS {
            return Complex64::new(0.0, 0.0);
        }
        let x = (t - self.grid.t_start()) / self.grid.dt();
        if x < -EDGE_EPS || x > (self.grid.len() - 1) as f64 + EDGE_EPS {
            return Complex64::new(0.0, 0.0);
        }
        let x = x.clamp(0.0, (self.grid.len() - 1) as f64);
        let i = (x.floor() as usize).min(self.grid.len() - 2);
        let w = x - i as f64;
        self.samples[i] * (1.0 - w) + self.samples[i + 1] * w
    }

    /// The same mode sampled on another grid.
    pub fn resample(&self, grid: &TimeGrid) -> TemporalMode {
        let samples = grid
            .times()
            .map(|t| self.value_at(t, Limit::Closed))
            .collect();
        TemporalMode {
            grid: *grid,
            samples,
            shape: self.shape.clone(),
            support: self.support,
        }
    }

    /// `int |u|^2 dt` by trapezoidal quadrature over the support.
    pub fn norm_sq(&self) -> f64 {
        inner_product(self, self).re
    }

    /// Rescales to unit quadrature norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sq();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical(format!(
                "cannot normalize mode with quadrature norm {n}"
            )));
        }
        let f = 1.0 / n.sqrt();
        self.samples.iter_mut().for_each(|s| *s *= f);
        if let Some(shape) = &mut self.shape {
            shape.scale *= f;
        }
        Ok(self)
    }

    /// Multiplies by a complex factor. Closed forms are dropped unless the
    /// factor is real.
    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.samples.iter_mut().for_each(|s| *s *= factor);
        match &mut self.shape {
            Some(shape) if factor.im == 0.0 => shape.scale *= factor.re,
            _ => self.shape = None,
        }
        self
    }
}

/// Laguerre polynomial `L_n(z)` by the three-term recurrence.
pub fn laguerre(n: usize, z: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - z) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `sinh(m t) / m`, regular through `m = 0` and valid for complex `m`.
pub fn sinh_over(m: Complex64, t: f64) -> Complex64 {
    let x = m * t;
    if x.norm() < 1e-4 {
        t * (1.0 + x * x / 6.0)
    } else {
        x.sinh() / m
    }
}

/// Laguerre past-time mode `u_n(t) = sqrt(2 kappa) e^{kappa t} L_n(-2 kappa t) Theta(-t)`,
/// renormalized on `grid`.
pub fn laguerre_input_mode(n: usize, kappa: f64, grid: &TimeGrid) -> Result<TemporalMode> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(param("kappa", format!("must be > 0, got {kappa}")));
    }
    let shape = Shape::new(ShapeKind::Laguerre { n, kappa });
    TemporalMode::from_shape(shape, (f64::NEG_INFINITY, 0.0), *grid).normalized()
}

/// Input mode that maximizes transfer into the oscillator during writing,
/// `u(t) ∝ -i conj(e^{kappa_+ t} sinh(m t) / m)` for `t <= 0`, with
/// `kappa_± = [kappa ± (gamma + i delta)] / 2` and `m = sqrt(kappa_-^2 - g^2)`.
///
/// Overdamped (`m` real), underdamped (`m` imaginary) and critical (`m = 0`,
/// shape `t e^{kappa_+ t}`) regimes are all handled by [`sinh_over`]. The
/// result is normalized on `grid`.
pub fn atomic_input_mode(
    kappa: f64,
    gamma: f64,
    g: f64,
    delta: f64,
    grid: &TimeGrid,
) -> Result<TemporalMode> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(param("kappa", format!("must be > 0, got {kappa}")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(param("gamma", format!("must be >= 0, got {gamma}")));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(param("g", format!("must be >= 0, got {g}")));
    }
    let (kappa_plus, m) = atomic_rates(kappa, gamma, g, delta);
    let shape = Shape::new(ShapeKind::Atomic { kappa_plus, m });
    TemporalMode::from_shape(shape, (f64::NEG_INFINITY, 0.0), *grid).normalized()
}

/// `(kappa_+, m)` for the two-mode drift matrix.
pub fn atomic_rates(kappa: f64, gamma: f64, g: f64, delta: f64) -> (Complex64, Complex64) {
    let loss = Complex64::new(gamma, delta);
    let kappa_plus = (kappa + loss) * 0.5;
    let kappa_minus = (kappa - loss) * 0.5;
    let m = (kappa_minus * kappa_minus - g * g).sqrt();
    (kappa_plus, m)
}

/// `u_out(t) = conj(u_in(T - t))`.
pub fn time_reverse(mode: &TemporalMode, about: f64) -> TemporalMode {
    let g = mode.grid;
    let grid = TimeGrid {
        t_start: about - g.t_end,
        t_end: about - g.t_start,
        n_points: g.n_points,
    };
    TemporalMode {
        grid,
        samples: mode.samples.iter().rev().map(|s| s.conj()).collect(),
        shape: mode.shape.as_ref().map(|s| s.reversed(about)),
        support: (about - mode.support.1, about - mode.support.0),
    }
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[Complex64], dt: f64) -> Complex64 {
    match values {
        [] | [_] => Complex64::new(0.0, 0.0),
        [first, inner @ .., last] => {
            let sum: Complex64 = inner.iter().sum();
            (sum + (first + last) * 0.5) * dt
        }
    }
}

/// `int conj(f(t)) h(t) dt` over the overlap of grids and supports.
///
/// When the grids differ, the finer mode is evaluated on the coarser grid
/// (closed form when available, otherwise linear interpolation).
pub fn inner_product(f: &TemporalMode, h: &TemporalMode) -> Complex64 {
    let lo = f
        .support
        .0
        .max(h.support.0)
        .max(f.grid.t_start())
        .max(h.grid.t_start());
    let hi = f
        .support
        .1
        .min(h.support.1)
        .min(f.grid.t_end())
        .min(h.grid.t_end());
    if lo > hi {
        return Complex64::new(0.0, 0.0);
    }
    if f.grid.same_as(&h.grid) {
        let r = f.grid.index_range(lo, hi);
        let prod: Vec<Complex64> = r.map(|i| f.samples[i].conj() * h.samples[i]).collect();
        return trapezoid(&prod, f.grid.dt());
    }
    let (coarse, fine, coarse_is_f) = if f.grid.dt() >= h.grid.dt() {
        (f, h, true)
    } else {
        (h, f, false)
    };
    let r = coarse.grid.index_range(lo, hi);
    let prod: Vec<Complex64> = r
        .map(|i| {
            let c = coarse.samples[i];
            let x = fine.value_at(coarse.grid.time(i), Limit::Closed);
            if coarse_is_f {
                c.conj() * x
            } else {
                x.conj() * c
            }
        })
        .collect();
    trapezoid(&prod, coarse.grid.dt())
}

/// Hermitian matrix of pairwise overlaps.
pub fn gram_matrix(modes: &[TemporalMode]) -> Result<DMatrix<Complex64>> {
    if modes.is_empty() {
        return Err(param("modes", "need at least one mode"));
    }
    let n = modes.len();
    let raw = DMatrix::from_fn(n, n, |i, j| inner_product(&modes[i], &modes[j]));
    Ok((&raw + raw.adjoint()) * Complex64::new(0.5, 0.0))
}
