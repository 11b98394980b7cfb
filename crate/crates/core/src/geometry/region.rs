use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::genspace::RealFunction;
use crate::point::Bbox;
use crate::TAU_SUPP;

type Membership = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A measurable set given by a deterministic membership predicate.
///
/// The optional bounding box is a hint used for sampling and quadrature; it must
/// contain the set whenever present.
#[derive(Clone)]
pub struct RegionSet {
    dim: usize,
    label: String,
    membership: Arc<Membership>,
    bounding: Option<Bbox>,
}

impl fmt::Debug for RegionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegionSet")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("bounding", &self.bounding)
            .finish()
    }
}

pub(crate) fn fmt_num(v: f64) -> String {
    format!("{}", v)
}

fn join(values: impl Iterator<Item = f64>) -> String {
    values.map(fmt_num).collect::<Vec<_>>().join(",")
}

impl RegionSet {
    pub fn from_predicate<F>(dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        Self { dim, label: label.into(), membership: Arc::new(f), bounding: None }
    }

    pub fn with_bounding(mut self, b: Bbox) -> Self {
        self.bounding = Some(b);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `R^d`.
    pub fn all(dim: usize) -> Self {
        Self::from_predicate(dim, "all", |_| true)
    }

    /// Open Euclidean ball `{|x| < r}`.
    pub fn ball(dim: usize, r: f64) -> Self {
        Self::from_predicate(dim, format!("ball({})", fmt_num(r)), move |x| {
            crate::math::sqrt(x.iter().map(|v| v * v).sum::<f64>()) < r
        })
        .with_bounding(Bbox::centered(dim, r))
    }

    /// Closed box `[lo, hi]`.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Self {
        let b = Bbox::new(lo, hi);
        let label = format!("box({})", join(lo.iter().zip(hi).flat_map(|(l, h)| [*l, *h])));
        Self::from_predicate(lo.len(), label, move |x| b.contains(x)).with_bounding(b)
    }

    /// Open half-space `{x : n·x > c}`.
    pub fn half_space(normal: &[f64], c: f64) -> Self {
        let n: Vec<f64> = normal.to_vec();
        let label = format!("halfspace({},{})", join(normal.iter().copied()), fmt_num(c));
        Self::from_predicate(normal.len(), label, move |x| {
            n.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() > c
        })
    }

    /// Finite union of closed intervals in `R`.
    pub fn interval_union(intervals: &[(f64, f64)]) -> Self {
        let iv: Vec<(f64, f64)> = intervals.to_vec();
        let label = if iv.len() == 1 {
            format!("interval({},{})", fmt_num(iv[0].0), fmt_num(iv[0].1))
        } else {
            let parts: Vec<String> =
                iv.iter().map(|(a, b)| format!("interval({},{})", fmt_num(*a), fmt_num(*b))).collect();
            format!("union({})", parts.join(","))
        };
        let lo = iv.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = iv.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        Self::from_predicate(1, label, move |x| iv.iter().any(|(a, b)| x[0] >= *a && x[0] <= *b))
            .with_bounding(Bbox::new(&[lo], &[hi]))
    }

    /// `{f > TAU_SUPP}`.
    pub fn support_of(f: &RealFunction) -> Self {
        let g = f.clone();
        Self::from_predicate(f.dim(), format!("supp({})", f.label()), move |x| g.eval(x) > TAU_SUPP)
    }

    pub fn complement(&self) -> Self {
        let m = self.membership.clone();
        Self::from_predicate(self.dim, format!("complement({})", self.label), move |x| !m(x))
    }

    pub fn intersection(&self, other: &RegionSet) -> Self {
        let (a, b) = (self.membership.clone(), other.membership.clone());
        let bounding = match (self.bounding, other.bounding) {
            (Some(x), Some(y)) => Some(x.intersect(&y)),
            (x, y) => x.or(y),
        };
        Self {
            dim: self.dim,
            label: format!("intersect({},{})", self.label, other.label),
            membership: Arc::new(move |x| a(x) && b(x)),
            bounding,
        }
    }

    pub fn union(&self, other: &RegionSet) -> Self {
        let (a, b) = (self.membership.clone(), other.membership.clone());
        let bounding = match (self.bounding, other.bounding) {
            (Some(x), Some(y)) => Some(x.hull(&y)),
            _ => None,
        };
        Self {
            dim: self.dim,
            label: format!("union({},{})", self.label, other.label),
            membership: Arc::new(move |x| a(x) || b(x)),
            bounding,
        }
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        (self.membership)(x)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bounding(&self) -> Option<Bbox> {
        self.bounding
    }

    pub fn is_bounded(&self) -> bool {
        self.bounding.is_some()
    }
}

impl fmt::Display for RegionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_is_open() {
        let b = RegionSet::ball(2, 1.0);
        assert!(b.contains(&[0.6, 0.79]));
        assert!(!b.contains(&[1.0, 0.0]));
        assert!(!b.contains(&[0.8, 0.6 + 1e-12]));
    }

    #[test]
    fn set_algebra() {
        let pos = RegionSet::half_space(&[1.0], 0.0);
        let unit = RegionSet::interval_union(&[(-1.0, 1.0)]);
        let both = pos.intersection(&unit);
        assert!(both.contains(&[0.5]));
        assert!(!both.contains(&[-0.5]));
        assert!(!both.contains(&[0.0]));
        assert_eq!(both.bounding(), unit.bounding());
        let either = pos.union(&unit);
        assert!(either.contains(&[7.0]) && either.contains(&[-0.5]) && !either.contains(&[-2.0]));
        assert!(either.bounding().is_none());
        assert!(pos.complement().contains(&[0.0]));
    }

    #[test]
    fn labels_are_expressions() {
        assert_eq!(RegionSet::half_space(&[1.0], 0.0).label(), "halfspace(1,0)");
        assert_eq!(RegionSet::boxed(&[-0.5], &[0.5]).label(), "box(-0.5,0.5)");
        assert_eq!(RegionSet::ball(1, 1.0).label(), "ball(1)");
    }
}
