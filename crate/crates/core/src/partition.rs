//! Tri- and quadripartitions of an open chain.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Tri,
    Quad,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Tri => "tri",
            Geometry::Quad => "quad",
        })
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tri" | "tripartition" => Ok(Geometry::Tri),
            "quad" | "quadripartition" => Ok(Geometry::Quad),
            _ => Err(Error::Parse(format!("unknown geometry {s:?}"))),
        }
    }
}

/// The four regions entering a topological combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    AB,
    BC,
    B,
    ABC,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::AB, Region::BC, Region::B, Region::ABC];

    pub fn name(self) -> &'static str {
        match self {
            Region::AB => "AB",
            Region::BC => "BC",
            Region::B => "B",
            Region::ABC => "ABC",
        }
    }
}

/// Contiguous windows of a partitioned chain, as 0-based half-open ranges.
/// In the quadripartition the chain reads A, B, D, C from left to right; in the
/// tripartition it reads A, B, C and `d` is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub geometry: Geometry,
    pub len: usize,
    pub a: Range<usize>,
    pub b: Range<usize>,
    pub d: Range<usize>,
    pub c: Range<usize>,
}

impl PartitionSpec {
    pub fn new(geometry: Geometry, len: usize) -> Result<Self> {
        match geometry {
            Geometry::Quad => {
                if len < 4 || len % 4 != 0 {
                    return Err(Error::ChainLength { len, reason: "quadripartition needs L divisible by 4".into() });
                }
                let q = len / 4;
                Self::quad_windows(q, q, q, q)
            }
            Geometry::Tri => {
                if len < 3 || len % 3 != 0 {
                    return Err(Error::ChainLength { len, reason: "tripartition needs L divisible by 3".into() });
                }
                let t = len / 3;
                Self::tri_windows(t, t, t)
            }
        }
    }

    /// Quadripartition with window lengths for A, B, D, C in chain order.
    pub fn quad_windows(a: usize, b: usize, d: usize, c: usize) -> Result<Self> {
        if [a, b, d, c].iter().any(|&x| x == 0) {
            return Err(Error::Parameter("quadripartition windows must be non-empty".into()));
        }
        Ok(Self {
            geometry: Geometry::Quad,
            len: a + b + d + c,
            a: 0..a,
            b: a..a + b,
            d: a + b..a + b + d,
            c: a + b + d..a + b + d + c,
        })
    }

    /// Tripartition with window lengths for A, B, C in chain order.
    pub fn tri_windows(a: usize, b: usize, c: usize) -> Result<Self> {
        if [a, b, c].iter().any(|&x| x == 0) {
            return Err(Error::Parameter("tripartition windows must be non-empty".into()));
        }
        Ok(Self { geometry: Geometry::Tri, len: a + b + c, a: 0..a, b: a..a + b, d: a + b..a + b, c: a + b..a + b + c })
    }

    /// Windows making up `region`, merged where adjacent.
    pub fn windows(&self, region: Region) -> Vec<Range<usize>> {
        let raw = match region {
            Region::AB => vec![self.a.clone(), self.b.clone()],
            Region::BC => vec![self.b.clone(), self.c.clone()],
            Region::B => vec![self.b.clone()],
            Region::ABC => vec![self.a.clone(), self.b.clone(), self.c.clone()],
        };
        crate::mps::normalize_windows(&raw, self.len).expect("partition windows lie within the chain")
    }

    pub fn region_len(&self, region: Region) -> usize {
        self.windows(region).iter().map(|w| w.len()).sum()
    }

    /// Per-site membership flags for `region`.
    pub fn mask(&self, region: Region) -> Vec<bool> {
        let w = self.windows(region);
        (0..self.len).map(|i| w.iter().any(|r| r.contains(&i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_layout() {
        let p = PartitionSpec::new(Geometry::Quad, 16).unwrap();
        assert_eq!((p.a.clone(), p.b.clone(), p.d.clone(), p.c.clone()), (0..4, 4..8, 8..12, 12..16));
        assert_eq!(p.windows(Region::AB), vec![0..8]);
        assert_eq!(p.windows(Region::BC), vec![4..8, 12..16]);
        assert_eq!(p.windows(Region::ABC), vec![0..8, 12..16]);
        assert_eq!(p.region_len(Region::BC), 8);
        assert!(PartitionSpec::new(Geometry::Quad, 10).is_err());
    }

    #[test]
    fn tri_layout() {
        let p = PartitionSpec::new(Geometry::Tri, 9).unwrap();
        assert_eq!(p.windows(Region::BC), vec![3..9]);
        assert_eq!(p.windows(Region::ABC), vec![0..9]);
        let q = PartitionSpec::tri_windows(2, 4, 2).unwrap();
        assert_eq!(q.len, 8);
        assert_eq!(q.windows(Region::B), vec![2..6]);
        assert!(PartitionSpec::new(Geometry::Tri, 8).is_err());
    }
}
