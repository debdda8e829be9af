use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// A position in the plane or in space. Planar points keep `z == 0`, so one
/// distance routine serves both.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub const ORIGIN: Point = Point([0.0; 3]);

    pub const fn xy(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub const fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point([self.0[0] * rhs, self.0[1] * rhs, self.0[2] * rhs])
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

// Serialized as `[x, y]` when z is zero, `[x, y, z]` otherwise.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let len = if self.0[2] == 0.0 { 2 } else { 3 };
        let mut seq = serializer.serialize_seq(Some(len))?;
        for c in &self.0[..len] {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = Point;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of 2 or 3 numbers")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Point, A::Error> {
                let mut c = [0.0; 3];
                let mut n = 0;
                while let Some(v) = seq.next_element::<f64>()? {
                    if n == 3 {
                        return Err(de::Error::invalid_length(4, &self));
                    }
                    c[n] = v;
                    n += 1;
                }
                if n < 2 {
                    return Err(de::Error::invalid_length(n, &self));
                }
                Ok(Point(c))
            }
        }

        deserializer.deserialize_seq(PointVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_points_serialize_without_z() {
        let s = serde_json::to_string(&Point::xy(1.5, -2.0)).unwrap();
        assert_eq!(s, "[1.5,-2.0]");
        let p: Point = serde_json::from_str("[1, 2, 3]").unwrap();
        assert_eq!(p, Point::xyz(1.0, 2.0, 3.0));
        assert!(serde_json::from_str::<Point>("[1]").is_err());
        assert!(serde_json::from_str::<Point>("[1,2,3,4]").is_err());
    }

    #[test]
    fn distance_is_euclidean() {
        assert_eq!(Point::xy(0.0, 0.0).distance(&Point::xy(3.0, 4.0)), 5.0);
    }
}
