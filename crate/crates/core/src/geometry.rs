//! Points, point sets and the asymmetric transforms that turn the
//! Frank-Wolfe direction search into maximum inner product search on the
//! unit sphere.
//!
//! For a query point `a` with gradient `g = ∇f(a)` and a data point `b`:
//!
//! ```text
//! φ₀(a) = [g; ⟨a, g⟩]            ψ₀(b) = [-b; 1]
//! φ₁(v) = [v/D_x; 0; √(1-‖v/D_x‖²)]
//! ψ₁(v) = [v/D_y; √(1-‖v/D_y‖²); 0]
//! ```
//!
//! so that `⟨φ₁φ₀(a), ψ₁ψ₀(b)⟩ = ⟨b - a, -g⟩ / (D_x D_y)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm, sq_dist};

/// Slack allowed when a vector sits on the radius boundary.
const RADIUS_SLACK: f64 = 1e-12;

/// Point sets up to this size get an exact diameter; larger ones use `2 * max_radius`.
pub const EXACT_DIAMETER_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct DensePoint(Vec<f64>);

impl DensePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords)?;
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for DensePoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// `n` points of dimension `d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
    max_radius: f64,
    diameter_bound: f64,
}

impl PointSet {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::config("point set must not be empty"))?;
        let dim = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            check_dim(dim, r.as_ref().len())?;
            data.extend_from_slice(r.as_ref());
        }
        Self::from_flat(dim, data)
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::config(format!(
                "flat buffer of length {} does not hold whole points of dimension {dim}",
                data.len()
            )));
        }
        check_finite(&data)?;
        let mut set = Self {
            dim,
            data,
            max_radius: 0.0,
            diameter_bound: 0.0,
        };
        set.refresh_metadata();
        Ok(set)
    }

    fn refresh_metadata(&mut self) {
        self.max_radius = self.iter().map(norm).fold(0.0, f64::max);
        let n = self.len();
        self.diameter_bound = if n <= EXACT_DIAMETER_LIMIT {
            let mut best = 0.0f64;
            for i in 0..n {
                for j in i + 1..n {
                    best = best.max(sq_dist(self.point(i), self.point(j)));
                }
            }
            best.sqrt()
        } else {
            2.0 * self.max_radius
        };
    }

    /// Appends a point and returns its index.
    pub fn push(&mut self, p: &[f64]) -> Result<usize> {
        check_dim(self.dim, p.len())?;
        check_finite(p)?;
        let n = self.len();
        if n < EXACT_DIAMETER_LIMIT {
            let far = (0..n).map(|i| sq_dist(self.point(i), p)).fold(0.0, f64::max);
            self.diameter_bound = self.diameter_bound.max(far.sqrt());
            self.max_radius = self.max_radius.max(norm(p));
            self.data.extend_from_slice(p);
        } else {
            self.data.extend_from_slice(p);
            self.refresh_metadata();
        }
        Ok(n)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// Upper bound on the largest pairwise distance.
    pub fn diameter_bound(&self) -> f64 {
        self.diameter_bound
    }

    /// Coordinate-wise mean under probability weights `p`.
    pub fn weighted_mean(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.len(), p.len())?;
        let mut out = vec![0.0; self.dim];
        for (x, &w) in self.iter().zip(p) {
            crate::linalg::axpy(w, x, &mut out);
        }
        Ok(out)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let w = vec![1.0 / self.len() as f64; self.len()];
        self.weighted_mean(&w).expect("lengths agree")
    }

    /// Applies `f` to every point.
    pub fn map(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self.iter().map(&mut f).collect();
        Self::from_rows(&rows)
    }
}

/// `φ₀(a) = [∇g(a); ⟨a, ∇g(a)⟩]`
pub fn transform_direct_query(grad: &[f64], point: &[f64]) -> Result<Vec<f64>> {
    check_dim(point.len(), grad.len())?;
    check_finite(grad)?;
    check_finite(point)?;
    let mut out = Vec::with_capacity(grad.len() + 1);
    out.extend_from_slice(grad);
    out.push(dot(point, grad));
    Ok(out)
}

/// `ψ₀(b) = [-b; 1]`
pub fn transform_direct_data(point: &[f64]) -> Result<Vec<f64>> {
    check_finite(point)?;
    let mut out: Vec<f64> = point.iter().map(|x| -x).collect();
    out.push(1.0);
    Ok(out)
}

fn lift(v: &[f64], radius: f64, pad_first: bool) -> Result<Vec<f64>> {
    check_finite(v)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::config(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    let nv = norm(v);
    if nv > radius * (1.0 + RADIUS_SLACK) + RADIUS_SLACK {
        return Err(Error::Radius { norm: nv, radius });
    }
    let mut out: Vec<f64> = v.iter().map(|x| x / radius).collect();
    let rest = (1.0 - crate::linalg::sq_norm(&out)).max(0.0).sqrt();
    if pad_first {
        out.extend([0.0, rest]);
    } else {
        out.extend([rest, 0.0]);
    }
    Ok(out)
}

/// `φ₁(v) = [v/D_x; 0; √(1-‖v/D_x‖²)]`
pub fn transform_unit_query(v: &[f64], d_x: f64) -> Result<Vec<f64>> {
    lift(v, d_x, true)
}

/// `ψ₁(v) = [v/D_y; √(1-‖v/D_y‖²); 0]`
pub fn transform_unit_data(v: &[f64], d_y: f64) -> Result<Vec<f64>> {
    lift(v, d_y, false)
}

/// Radii of the two unit-sphere lifts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformPair {
    pub query_radius: f64,
    pub data_radius: f64,
}

impl TransformPair {
    pub fn new(query_radius: f64, data_radius: f64) -> Result<Self> {
        for (name, r) in [("query", query_radius), ("data", data_radius)] {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::config(format!("{name} radius must be positive, got {r}")));
            }
        }
        Ok(Self {
            query_radius,
            data_radius,
        })
    }

    /// Data radius covering `ψ₀` of every point in `set`.
    pub fn data_radius_for(set: &PointSet) -> f64 {
        set.iter()
            .map(|b| (crate::linalg::sq_norm(b) + 1.0).sqrt())
            .fold(0.0, f64::max)
    }

    /// `C = D_x · D_y`
    pub fn scale(&self) -> f64 {
        self.query_radius * self.data_radius
    }

    /// `φ(a) = φ₁(φ₀(a))`, a unit vector in `ℝ^{d+3}`.
    pub fn query(&self, grad: &[f64], point: &[f64]) -> Result<Vec<f64>> {
        transform_unit_query(&transform_direct_query(grad, point)?, self.query_radius)
    }

    /// `ψ(b) = ψ₁(ψ₀(b))`, a unit vector in `ℝ^{d+3}`.
    pub fn data(&self, point: &[f64]) -> Result<Vec<f64>> {
        transform_unit_data(&transform_direct_data(point)?, self.data_radius)
    }

    pub fn data_set(&self, set: &PointSet) -> Result<PointSet> {
        let rows = set.iter().map(|b| self.data(b)).collect::<Result<Vec<_>>>()?;
        PointSet::from_rows(&rows)
    }
}

/// Query-side composed transform; see [`TransformPair::query`].
pub fn compose_transforms(grad: &[f64], point: &[f64], pair: &TransformPair) -> Result<Vec<f64>> {
    pair.query(grad, point)
}

/// Checks that `weights` are a probability vector reproducing `x`.
pub fn check_hull_weights(set: &PointSet, x: &[f64], weights: &[f64]) -> Result<()> {
    check_dim(set.dim(), x.len())?;
    if weights.len() != set.len() {
        return Err(Error::NotInHull(format!(
            "{} weights for {} points",
            weights.len(),
            set.len()
        )));
    }
    if let Some(i) = weights.iter().position(|&w| !(w >= 0.0)) {
        return Err(Error::NotInHull(format!("weight {i} is negative ({})", weights[i])));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotInHull(format!("weights sum to {total}")));
    }
    let combo = set.weighted_mean(weights)?;
    let err = crate::linalg::dist(&combo, x);
    if err > 1e-6 {
        return Err(Error::NotInHull(format!("weighted combination is {err} away from x")));
    }
    Ok(())
}

/// `min_{s ∈ S} ⟨grad, s - x⟩` for a hull point `x` given by `weights`.
pub fn hull_min_ip_property(set: &PointSet, x: &[f64], weights: &[f64], grad: &[f64]) -> Result<f64> {
    check_dim(set.dim(), grad.len())?;
    check_hull_weights(set, x, weights)?;
    let gx = dot(grad, x);
    Ok(set.iter().map(|s| dot(grad, s) - gx).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{argmax, sub};
    use crate::rng::StreamRng;

    fn gaussian(rng: &mut StreamRng, d: usize) -> Vec<f64> {
        (0..d).map(|_| rng.normal()).collect()
    }

    #[test]
    fn direct_transforms_on_small_inputs() {
        assert_eq!(
            transform_direct_query(&[2.0, 3.0], &[1.0, 0.0]).unwrap(),
            vec![2.0, 3.0, 2.0]
        );
        assert_eq!(transform_direct_query(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), vec![0.0; 3]);
        assert_eq!(transform_direct_data(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(transform_direct_data(&[1.0, -2.0]).unwrap(), vec![-1.0, 2.0, 1.0]);
        assert!(matches!(
            transform_direct_query(&[1.0], &[1.0, 2.0]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            transform_direct_data(&[f64::NAN]),
            Err(Error::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn direct_identity_holds() {
        let mut rng = StreamRng::new(11, 0);
        let a = gaussian(&mut rng, 5);
        let g = gaussian(&mut rng, 5);
        let phi = transform_direct_query(&g, &a).unwrap();
        for _ in 0..100 {
            let b = gaussian(&mut rng, 5);
            let lhs = dot(&sub(&b, &a), &g);
            let rhs = -dot(&phi, &transform_direct_data(&b).unwrap());
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_argopt_agree() {
        let mut rng = StreamRng::new(12, 0);
        let a = gaussian(&mut rng, 4);
        let g = gaussian(&mut rng, 4);
        let pts: Vec<Vec<f64>> = (0..20).map(|_| gaussian(&mut rng, 4)).collect();
        let phi = transform_direct_query(&g, &a).unwrap();
        let raw = argmax(pts.iter().map(|b| -dot(&sub(b, &a), &g))).unwrap().0;
        let lifted = argmax(pts.iter().map(|b| dot(&phi, &transform_direct_data(b).unwrap())))
            .unwrap()
            .0;
        assert_eq!(raw, lifted);
    }

    #[test]
    fn unit_lifts() {
        let q = transform_unit_query(&[3.0, 4.0], 5.0).unwrap();
        assert!((norm(&q) - 1.0).abs() < 1e-12);
        assert_eq!(q[3], 0.0);
        assert_eq!(
            transform_unit_query(&[0.0, 0.0], 2.0).unwrap(),
            vec![0.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(transform_unit_data(&[0.0, 0.0], 2.0).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
        let d = transform_unit_data(&[0.0, 2.0], 2.0).unwrap();
        assert_eq!(&d[2..], &[0.0, 0.0]);
        assert!(matches!(
            transform_unit_query(&[3.0, 4.0], 4.9),
            Err(Error::Radius { .. })
        ));

        let mut rng = StreamRng::new(13, 0);
        for _ in 0..50 {
            let u = gaussian(&mut rng, 6);
            let v = gaussian(&mut rng, 6);
            let (dx, dy) = (norm(&u) * 1.5, norm(&v) * 1.1);
            let lhs = dot(
                &transform_unit_query(&u, dx).unwrap(),
                &transform_unit_data(&v, dy).unwrap(),
            );
            assert!((lhs - dot(&u, &v) / (dx * dy)).abs() < 1e-9);
        }
    }

    #[test]
    fn composed_identity_and_argmax() {
        let mut rng = StreamRng::new(14, 0);
        let pts: Vec<Vec<f64>> = (0..50).map(|_| gaussian(&mut rng, 8)).collect();
        let set = PointSet::from_rows(&pts).unwrap();
        let a = set.centroid();
        let g = gaussian(&mut rng, 8);
        let raw: Vec<f64> = pts.iter().map(|b| -dot(&sub(b, &a), &g)).collect();
        for factor in [1.0, 2.0] {
            let g2: Vec<f64> = g.iter().map(|x| x * factor).collect();
            let dx = norm(&transform_direct_query(&g2, &a).unwrap());
            let pair = TransformPair::new(dx, TransformPair::data_radius_for(&set)).unwrap();
            let phi = compose_transforms(&g2, &a, &pair).unwrap();
            assert!((norm(&phi) - 1.0).abs() < 1e-9);
            let lifted: Vec<f64> = pts.iter().map(|b| dot(&phi, &pair.data(b).unwrap())).collect();
            for (l, r) in lifted.iter().zip(&raw) {
                assert!((l * pair.scale() - r * factor).abs() < 1e-9);
            }
            assert_eq!(argmax(lifted).unwrap().0, argmax(raw.iter().copied()).unwrap().0);
        }
        let pair = TransformPair::new(10.0, TransformPair::data_radius_for(&set)).unwrap();
        let phi = pair.query(&g, &pts[3]).unwrap();
        assert!(dot(&phi, &pair.data(&pts[3]).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn point_set_metadata() {
        let mut set = PointSet::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(set.max_radius(), 5.0);
        assert_eq!(set.diameter_bound(), 5.0);
        set.push(&[-3.0, -4.0]).unwrap();
        assert_eq!(set.diameter_bound(), 10.0);
        assert_eq!(set.len(), 3);
        assert!(PointSet::from_rows::<Vec<f64>>(&[]).is_err());
        assert!(PointSet::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn hull_min_ip() {
        let mut rng = StreamRng::new(15, 0);
        let pts: Vec<Vec<f64>> = (0..10).map(|_| gaussian(&mut rng, 3)).collect();
        let set = PointSet::from_rows(&pts).unwrap();
        let g = gaussian(&mut rng, 3);
        let mut w = vec![0.0; 10];
        w[4] = 1.0;
        assert!(hull_min_ip_property(&set, &pts[4], &w, &g).unwrap() <= 0.0);
        let mut w = vec![0.0; 10];
        w[1] = 1.0 / 3.0;
        w[5] = 1.0 / 3.0;
        w[7] = 1.0 / 3.0;
        let x = set.weighted_mean(&w).unwrap();
        assert!(hull_min_ip_property(&set, &x, &w, &g).unwrap() <= 1e-9);
        assert!(matches!(
            hull_min_ip_property(&set, &pts[0], &w, &g),
            Err(Error::NotInHull(_))
        ));
    }
}
