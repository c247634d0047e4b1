//! Exact rational points and segment intersection.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Self { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Self {
            x: BigRational::from_integer(BigInt::from(x)),
            y: BigRational::from_integer(BigInt::from(y)),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Parses a rational written as `p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let r = BigRational::from_str(s.trim()).ok()?;
    Some(r)
}

fn cross(ax: &BigRational, ay: &BigRational, bx: &BigRational, by: &BigRational) -> BigRational {
    ax * by - ay * bx
}

/// Sign of the turn `a -> b -> c`: positive for counter-clockwise.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> i8 {
    let v = cross(&(&b.x - &a.x), &(&b.y - &a.y), &(&c.x - &a.x), &(&c.y - &a.y));
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Whether `p` lies on the closed segment `a b`.
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if orientation(a, b, p) != 0 {
        return false;
    }
    let (lx, hx) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (ly, hy) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= lx && &p.x <= hx && &p.y >= ly && &p.y <= hy
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentIntersection {
    None,
    Point(Point),
    /// The segments share a piece of positive length.
    Overlap,
}

/// Exact intersection of the closed segments `p1 p2` and `q1 q2`.
pub fn intersect_segments(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> SegmentIntersection {
    let rx = &p2.x - &p1.x;
    let ry = &p2.y - &p1.y;
    let sx = &q2.x - &q1.x;
    let sy = &q2.y - &q1.y;
    let qpx = &q1.x - &p1.x;
    let qpy = &q1.y - &p1.y;
    let denom = cross(&rx, &ry, &sx, &sy);
    if denom.is_zero() {
        if !cross(&qpx, &qpy, &rx, &ry).is_zero() {
            return SegmentIntersection::None;
        }
        // collinear: compare along the dominant axis
        let use_x = rx.abs() + sx.abs() >= ry.abs() + sy.abs();
        let key = |p: &Point| if use_x { p.x.clone() } else { p.y.clone() };
        let (a0, a1) = order(key(p1), key(p2));
        let (b0, b1) = order(key(q1), key(q2));
        let lo = if a0 > b0 { a0 } else { b0 };
        let hi = if a1 < b1 { a1 } else { b1 };
        if lo > hi {
            return SegmentIntersection::None;
        }
        if lo < hi {
            return SegmentIntersection::Overlap;
        }
        for cand in [p1, p2, q1, q2] {
            if key(cand) == lo && on_segment(cand, p1, p2) && on_segment(cand, q1, q2) {
                return SegmentIntersection::Point(cand.clone());
            }
        }
        return SegmentIntersection::None;
    }
    let t = cross(&qpx, &qpy, &sx, &sy) / &denom;
    let u = cross(&qpx, &qpy, &rx, &ry) / &denom;
    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));
    if t < zero || t > one || u < zero || u > one {
        return SegmentIntersection::None;
    }
    SegmentIntersection::Point(Point::new(&p1.x + &t * &rx, &p1.y + &t * &ry))
}

fn order(a: BigRational, b: BigRational) -> (BigRational, BigRational) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Axis-aligned bounding box in floating point, widened slightly so that
/// rounding never hides a touching pair.
#[derive(Debug, Clone, Copy)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    pub fn of_segment(a: &Point, b: &Point) -> Self {
        let (ax, ay) = a.to_f64();
        let (bx, by) = b.to_f64();
        let eps = 1e-9 * (1.0 + ax.abs().max(bx.abs()).max(ay.abs()).max(by.abs()));
        Self {
            x0: ax.min(bx) - eps,
            y0: ay.min(by) - eps,
            x1: ax.max(bx) + eps,
            y1: ay.max(by) + eps,
        }
    }

    pub fn overlaps(&self, o: &BBox) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::int(x, y)
    }

    #[test]
    fn proper_crossing() {
        let r = intersect_segments(&p(0, 0), &p(2, 2), &p(0, 2), &p(2, 0));
        assert_eq!(r, SegmentIntersection::Point(p(1, 1)));
        let r = intersect_segments(&p(0, 0), &p(3, 1), &p(0, 1), &p(3, 0));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(
            r,
            SegmentIntersection::Point(Point::new(BigRational::from_integer(BigInt::from(3)) / BigInt::from(2), half))
        );
    }

    #[test]
    fn disjoint_and_parallel() {
        assert_eq!(intersect_segments(&p(0, 0), &p(1, 0), &p(0, 1), &p(1, 1)), SegmentIntersection::None);
        assert_eq!(intersect_segments(&p(0, 0), &p(1, 1), &p(3, 0), &p(2, 1)), SegmentIntersection::None);
    }

    #[test]
    fn collinear_cases() {
        assert_eq!(intersect_segments(&p(0, 0), &p(2, 0), &p(1, 0), &p(3, 0)), SegmentIntersection::Overlap);
        assert_eq!(
            intersect_segments(&p(0, 0), &p(2, 0), &p(2, 0), &p(3, 0)),
            SegmentIntersection::Point(p(2, 0))
        );
        assert_eq!(intersect_segments(&p(0, 0), &p(1, 0), &p(2, 0), &p(3, 0)), SegmentIntersection::None);
        assert_eq!(
            intersect_segments(&p(0, 0), &p(0, 4), &p(0, 4), &p(0, 9)),
            SegmentIntersection::Point(p(0, 4))
        );
    }

    #[test]
    fn touching_endpoint() {
        assert_eq!(
            intersect_segments(&p(0, 0), &p(2, 0), &p(1, 0), &p(1, 5)),
            SegmentIntersection::Point(p(1, 0))
        );
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(parse_rational("-4").unwrap(), BigRational::from_integer(BigInt::from(-4)));
        assert!(parse_rational("x").is_none());
    }
}
