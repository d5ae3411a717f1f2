use crate::geometry::PointSet;
use crate::linalg::{dist, sq_dist, sub};

/// A smooth convex function on `ℝ^d` with pure value and gradient callbacks.
pub trait Objective {
    fn value(&self, w: &[f64]) -> f64;

    fn gradient(&self, w: &[f64]) -> Vec<f64>;

    /// Bound on `‖∇f(w)‖` over the hull of `pts`, when one is cheap to state.
    fn gradient_norm_bound(&self, _pts: &PointSet) -> Option<f64> {
        None
    }
}

/// `f(w) = ½‖w - μ‖²`, which is 1-smooth.
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub mu: Vec<f64>,
}

impl Quadratic {
    pub fn new(mu: Vec<f64>) -> Self {
        Self { mu }
    }
}

impl Objective for Quadratic {
    fn value(&self, w: &[f64]) -> f64 {
        0.5 * sq_dist(w, &self.mu)
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        sub(w, &self.mu)
    }

    /// `‖w - μ‖` is convex in `w`, so its maximum over the hull sits at a vertex.
    fn gradient_norm_bound(&self, pts: &PointSet) -> Option<f64> {
        Some(pts.iter().map(|x| dist(x, &self.mu)).fold(0.0, f64::max))
    }
}

/// An objective assembled from two closures.
pub struct FnObjective<V, G> {
    pub value: V,
    pub gradient: G,
}

impl<V, G> Objective for FnObjective<V, G>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value(&self, w: &[f64]) -> f64 {
        (self.value)(w)
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        (self.gradient)(w)
    }
}
