//! Integer polyline curves, exact segment intersection, intersection graphs,
//! and segment realizations of permutation graphs.
//!
//! All predicates run on exact integer orientation tests. Coordinates are
//! bounded by `2^20` in magnitude so every cross product fits comfortably in
//! `i64`. A shared point (touching, collinear overlap, common endpoint)
//! counts as an intersection.

use crate::graph::Graph;
use crate::poset::Poset;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coordinate magnitude bound keeping orientation arithmetic overflow-free.
pub const COORD_BOUND: i64 = 1 << 20;

/// Horizontal spacing of realized permutation segments.
const SPACING: i64 = 4;
/// Vertical gap between the two anchor lines.
const HEIGHT: i64 = 4;

pub type Point = (i64, i64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("coordinate {0} exceeds the bound ±{COORD_BOUND}")]
    CoordinateOutOfBounds(i64),
    #[error("polyline {0} has fewer than 2 points")]
    DegeneratePolyline(usize),
    #[error("permutation is not a bijection on 0..n")]
    BadPermutation,
    #[error("malformed curves input: {0}")]
    Parse(String),
}

/// A family of integer-coordinate polylines; its intersection graph is a
/// string graph by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFamily {
    curves: Vec<Vec<Point>>,
}

impl CurveFamily {
    pub fn new(curves: Vec<Vec<Point>>) -> Result<CurveFamily, GeometryError> {
        for (i, poly) in curves.iter().enumerate() {
            if poly.len() < 2 {
                return Err(GeometryError::DegeneratePolyline(i));
            }
            for &(x, y) in poly {
                for c in [x, y] {
                    if c.abs() > COORD_BOUND {
                        return Err(GeometryError::CoordinateOutOfBounds(c));
                    }
                }
            }
        }
        Ok(CurveFamily { curves })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn curves(&self) -> &[Vec<Point>] {
        &self.curves
    }

    fn segments(&self, i: usize) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.curves[i].windows(2).map(|w| (w[0], w[1]))
    }

    /// Do curves `i` and `j` share a point? Self-intersections are ignored.
    pub fn curves_intersect(&self, i: usize, j: usize) -> bool {
        self.segments(i)
            .any(|s1| self.segments(j).any(|s2| segments_intersect(s1, s2)))
    }
}

/// Orientation of the triple `(a, b, c)`: positive for counter-clockwise,
/// negative for clockwise, zero for collinear. Exact in `i64` under the
/// coordinate bound.
#[inline]
pub fn orientation(a: Point, b: Point, c: Point) -> i64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

#[inline]
fn on_segment(a: Point, b: Point, p: Point) -> bool {
    // Assumes p collinear with a-b.
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

/// Closed-segment intersection with exact arithmetic; touching counts.
pub fn segments_intersect(s1: (Point, Point), s2: (Point, Point)) -> bool {
    let (p1, p2) = s1;
    let (p3, p4) = s2;
    let d1 = orientation(p3, p4, p1);
    let d2 = orientation(p3, p4, p2);
    let d3 = orientation(p1, p2, p3);
    let d4 = orientation(p1, p2, p4);

    if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)) {
        return true;
    }
    (d1 == 0 && on_segment(p3, p4, p1))
        || (d2 == 0 && on_segment(p3, p4, p2))
        || (d3 == 0 && on_segment(p1, p2, p3))
        || (d4 == 0 && on_segment(p1, p2, p4))
}

/// Vertex per curve, edge iff any two of their segments intersect.
/// Straightforward pairwise enumeration; this is the reference construction.
pub fn intersection_graph(family: &CurveFamily) -> Graph {
    let n = family.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if family.curves_intersect(i, j) {
                edges.push((i, j));
            }
        }
    }
    Graph::build(n, &edges).expect("indices are in range by construction")
}

/// Realizes a permutation as straight segments between two horizontal lines:
/// segment `i` runs from `(i·K, 0)` to `(pi[i]·K, H)`. Two segments cross
/// exactly when the permutation inverts the pair, so the intersection graph
/// is the inversion graph of `pi` — the incomparability graph of the
/// returned witness poset (`i ≺ j` iff `i < j` and `pi[i] < pi[j]`).
pub fn permutation_to_segments(pi: &[usize]) -> Result<(CurveFamily, Poset), GeometryError> {
    let n = pi.len();
    let mut seen = vec![false; n];
    for &v in pi {
        if v >= n || seen[v] {
            return Err(GeometryError::BadPermutation);
        }
        seen[v] = true;
    }
    if (n as i64) * SPACING > COORD_BOUND {
        return Err(GeometryError::CoordinateOutOfBounds(n as i64 * SPACING));
    }
    let curves: Vec<Vec<Point>> = (0..n)
        .map(|i| vec![(i as i64 * SPACING, 0), (pi[i] as i64 * SPACING, HEIGHT)])
        .collect();
    let family = CurveFamily::new(curves)?;

    let identity: Vec<usize> = (0..n).collect();
    let by_pi: Vec<usize> = {
        // Order listing elements by increasing pi-value.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| pi[i]);
        order
    };
    let witness = Poset::from_orders(&[identity, by_pi])
        .expect("two permutations always intersect to a poset");
    Ok((family, witness))
}

/// Attempts to read a curve family back as a permutation realization: every
/// curve a single segment between two common horizontal lines with distinct
/// anchors. Returns the dimension-2 witness poset on curve indices
/// (`i ≺ j` iff curve `i` is left of `j` on both lines), after verifying
/// that the intersection graph really equals its incomparability graph.
pub fn witness_from_curves(family: &CurveFamily) -> Option<Poset> {
    let n = family.len();
    if n == 0 {
        return None;
    }
    let mut bottoms = Vec::with_capacity(n);
    let mut tops = Vec::with_capacity(n);
    for poly in family.curves() {
        if poly.len() != 2 {
            return None;
        }
        let (a, b) = (poly[0], poly[1]);
        let (lo, hi) = if a.1 < b.1 { (a, b) } else { (b, a) };
        bottoms.push(lo);
        tops.push(hi);
    }
    let y0 = bottoms[0].1;
    let y1 = tops[0].1;
    if y0 == y1 || bottoms.iter().any(|p| p.1 != y0) || tops.iter().any(|p| p.1 != y1) {
        return None;
    }
    for i in 0..n {
        for j in i + 1..n {
            if bottoms[i].0 == bottoms[j].0 || tops[i].0 == tops[j].0 {
                return None;
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && bottoms[i].0 < bottoms[j].0 && tops[i].0 < tops[j].0 {
                pairs.push((i, j));
            }
        }
    }
    let witness = Poset::from_relations(n, &pairs).ok()?;
    if intersection_graph(family) == witness.incomparability_graph() {
        Some(witness)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Serialization: {"curves": [[[x,y],...], ...]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CurvesJson {
    curves: Vec<Vec<(i64, i64)>>,
}

impl CurveFamily {
    pub fn to_json(&self) -> String {
        let doc = CurvesJson {
            curves: self.curves.clone(),
        };
        serde_json::to_string(&doc).expect("curve serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<CurveFamily, GeometryError> {
        let doc: CurvesJson =
            serde_json::from_str(text).map_err(|e| GeometryError::Parse(e.to_string()))?;
        CurveFamily::new(doc.curves)
    }
}
