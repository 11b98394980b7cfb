//! Small fixed-capacity points and axis-aligned boxes in `R^d`, `d ≤ MAX_DIM`.

use core::fmt;
use core::ops::Deref;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 4;

/// A point of `R^d` stored inline; `Copy` so hot sampling loops never allocate.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Point {
    /// Panics if `coords.len()` is zero or exceeds [`MAX_DIM`].
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            !coords.is_empty() && coords.len() <= MAX_DIM,
            "point dimension {} outside 1..={MAX_DIM}",
            coords.len()
        );
        let mut p = Self::zeros(coords.len());
        p.coords[..coords.len()].copy_from_slice(coords);
        p
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Self { coords: [0.0; MAX_DIM], dim }
    }

    pub fn splat(dim: usize, v: f64) -> Self {
        let mut p = Self::zeros(dim);
        p.coords[..dim].iter_mut().for_each(|c| *c = v);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coords[..self.dim]
    }

    pub fn norm(&self) -> f64 {
        crate::math::sqrt(self.as_slice().iter().map(|c| c * c).sum())
    }

    pub fn norm_inf(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut p = *self;
        p.as_mut_slice().iter_mut().for_each(|c| *c *= s);
        p
    }

    /// `self + k` for an integer lattice vector `k`.
    pub fn shifted(&self, k: &[i64]) -> Self {
        debug_assert_eq!(k.len(), self.dim);
        let mut p = *self;
        p.as_mut_slice().iter_mut().zip(k).for_each(|(c, &ki)| *c += ki as f64);
        p
    }

    pub fn add(&self, other: &Point) -> Self {
        let mut p = *self;
        p.as_mut_slice()
            .iter_mut()
            .zip(other.as_slice())
            .for_each(|(c, o)| *c += o);
        p
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        self.as_slice()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl serde::Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.as_slice())
    }
}

/// Closed axis-aligned box `[lo, hi]`. Empty when some `lo_i > hi_i`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Bbox {
    pub lo: Point,
    pub hi: Point,
}

impl Bbox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Self {
        assert_eq!(lo.len(), hi.len());
        Self { lo: Point::new(lo), hi: Point::new(hi) }
    }

    /// `[-h, h]^d`.
    pub fn centered(dim: usize, half_width: f64) -> Self {
        Self { lo: Point::splat(dim, -half_width), hi: Point::splat(dim, half_width) }
    }

    pub fn empty(dim: usize) -> Self {
        Self { lo: Point::splat(dim, 1.0), hi: Point::splat(dim, -1.0) }
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(self.hi.iter()).any(|(l, h)| l > h)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.lo.iter().zip(self.hi.iter()).map(|(l, h)| h - l).product()
    }

    pub fn intersect(&self, other: &Bbox) -> Bbox {
        let mut out = *self;
        for i in 0..self.dim() {
            out.lo.as_mut_slice()[i] = self.lo[i].max(other.lo[i]);
            out.hi.as_mut_slice()[i] = self.hi[i].min(other.hi[i]);
        }
        out
    }

    pub fn hull(&self, other: &Bbox) -> Bbox {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        let mut out = *self;
        for i in 0..self.dim() {
            out.lo.as_mut_slice()[i] = self.lo[i].min(other.lo[i]);
            out.hi.as_mut_slice()[i] = self.hi[i].max(other.hi[i]);
        }
        out
    }

    /// Sup-norm distance from `x` to the box boundary (0 when outside or on it).
    pub fn depth(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        x.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .fold(f64::INFINITY, |m, (v, (l, h))| m.min(v - l).min(h - v))
    }
}
