//! Rate pairs and convex rate-region polygons.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// User 1 decodes successively; user 2 decodes its own message alone.
    One,
    /// User 2 decodes successively; user 1 decodes its own message alone.
    Two,
}

impl Scheme {
    pub fn number(&self) -> u8 {
        match self {
            Self::One => 1,
            Self::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub scheme: Scheme,
    pub alpha: f64,
    pub theta: f64,
}

/// An achievable `(R₁, R₂)` pair in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
    pub provenance: Provenance,
}

/// Convex polygon in the `(R₁, R₂)` plane.
///
/// Vertices run clockwise from the lexicographically smallest point, so a
/// rate region (which always contains the origin and both axis anchors)
/// lists the origin first and then its boundary with `R₁` non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPolygon {
    vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Monotone-chain convex hull; collinear and duplicate points are dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> RegionPolygon {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() <= 2 {
        return RegionPolygon { vertices: pts };
    }
    let mut upper: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    let mut lower: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) >= 0.0 {
            upper.pop();
        }
        upper.push(p);
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut vertices = upper;
    let n_lower = lower.len();
    vertices.extend(lower.into_iter().rev().skip(1).take(n_lower.saturating_sub(2)));
    RegionPolygon { vertices }
}

impl RegionPolygon {
    /// Hull of the given rate pairs together with the origin and the two
    /// axis projections of the extreme rates, i.e. the convex hull of the
    /// rectangle-closure of the points.
    pub fn rate_region(points: &[(f64, f64)]) -> Self {
        let max_r1 = points.iter().map(|p| p.0).fold(0.0f64, f64::max);
        let max_r2 = points.iter().map(|p| p.1).fold(0.0f64, f64::max);
        let mut all = points.to_vec();
        all.extend([(0.0, 0.0), (max_r1, 0.0), (0.0, max_r2)]);
        convex_hull(&all)
    }

    pub fn from_vertices(vertices: Vec<(f64, f64)>) -> Self {
        convex_hull(&vertices)
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Euclidean distance from `p` to the polygon (0 inside or on it).
    pub fn distance_outside(&self, p: (f64, f64)) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => f64::INFINITY,
            1 => segment_distance(p, v[0], v[0]),
            2 => segment_distance(p, v[0], v[1]),
            n => {
                let inside = (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) <= 0.0);
                if inside {
                    0.0
                } else {
                    (0..n)
                        .map(|i| segment_distance(p, v[i], v[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    pub fn contains(&self, p: (f64, f64), slack: f64) -> bool {
        self.distance_outside(p) <= slack
    }

    /// Largest distance from one polygon's vertices to the other polygon,
    /// taken in both directions. Zero iff the polygons coincide.
    pub fn hausdorff(&self, other: &RegionPolygon) -> f64 {
        let one = self.vertices.iter().map(|&p| other.distance_outside(p));
        let two = other.vertices.iter().map(|&p| self.distance_outside(p));
        one.chain(two).fold(0.0f64, f64::max)
    }

    pub fn is_convex(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        n < 3 || (0..n).all(|i| cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) < 0.0)
    }

    pub fn is_vertex(&self, p: (f64, f64), tol: f64) -> bool {
        self.vertices
            .iter()
            .any(|v| (v.0 - p.0).abs() <= tol && (v.1 - p.1).abs() <= tol)
    }
}
