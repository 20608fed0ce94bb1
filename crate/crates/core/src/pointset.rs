//! Point sets in the half-open unit cube and their text format.
//!
//! Text format: a header line `d N`, then `N` lines of `d` space-separated
//! coordinates, each written positionally with 17 significant digits
//! (enough to round-trip any `f64`).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::SampleSpec;

/// A multi-set of `N` points in `[0,1)^d`. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    d: usize,
    points: Vec<Vec<f64>>,
    provenance: Option<SampleSpec>,
}

impl PointSet {
    /// Validates that every point has `d` coordinates in `[0,1)`.
    pub fn new(d: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
            for (j, &c) in p.iter().enumerate() {
                if !(0.0..1.0).contains(&c) {
                    return Err(Error::CoordinateOutOfRange {
                        point: i,
                        axis: j,
                        value: c,
                    });
                }
            }
        }
        Ok(PointSet {
            d,
            points,
            provenance: None,
        })
    }

    pub(crate) fn from_sampler(spec: SampleSpec, points: Vec<Vec<f64>>) -> Self {
        debug_assert!(points
            .iter()
            .all(|p| p.len() == spec.d && p.iter().all(|c| (0.0..1.0).contains(c))));
        PointSet {
            d: spec.d,
            points,
            provenance: Some(spec),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn provenance(&self) -> Option<&SampleSpec> {
        self.provenance.as_ref()
    }

    /// Coordinates of axis `j` in point order.
    pub fn axis(&self, j: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[j]).collect()
    }

    /// One-dimensional projection onto axis `j`.
    pub fn projection(&self, j: usize) -> PointSet {
        PointSet {
            d: 1,
            points: self.points.iter().map(|p| vec![p[j]]).collect(),
            provenance: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.d, self.points.len());
        for p in &self.points {
            for (j, &c) in p.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                out.push_str(&format_coordinate(c));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let mut fields = header.split_whitespace();
        let mut header_field = |name: &str| -> Result<usize> {
            fields
                .next()
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    msg: format!("missing {name}"),
                })?
                .parse()
                .map_err(|e| Error::Parse {
                    line: 1,
                    msg: format!("bad {name}: {e}"),
                })
        };
        let d = header_field("dimension")?;
        let n = header_field("point count")?;

        let mut points = Vec::with_capacity(n);
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let coords = line
                .split_whitespace()
                .map(|f| {
                    f.parse::<f64>().map_err(|e| Error::Parse {
                        line: idx + 1,
                        msg: format!("bad coordinate {f:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if coords.len() != d {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {d} coordinates, found {}", coords.len()),
                });
            }
            points.push(coords);
        }
        if points.len() != n {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {n} points, found {}", points.len()),
            });
        }
        PointSet::new(d, points)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PointSet::from_text(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Positional decimal with 17 significant digits, e.g. `0.12345678901234567`
/// or `0.000012345678901234567`.
pub fn format_coordinate(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::new();
    if x < 0.0 {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        let split = (exp as usize + 1).min(digits.len());
        let _ = write!(out, "{}", &digits[..split]);
        for _ in digits.len()..(exp as usize + 1) {
            out.push('0');
        }
        out.push('.');
        out.push_str(if split < digits.len() {
            &digits[split..]
        } else {
            "0"
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn rejects_coordinate_one() {
        let err = PointSet::new(2, vec![vec![0.5, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::CoordinateOutOfRange { axis: 1, .. }));
    }

    #[test]
    fn rejects_ragged_points() {
        assert!(matches!(
            PointSet::new(2, vec![vec![0.5]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn coordinate_formatting() {
        assert_eq!(format_coordinate(0.0), "0.0000000000000000");
        assert_eq!(format_coordinate(0.5), "0.50000000000000000");
        assert_eq!(format_coordinate(0.1), "0.10000000000000001");
        assert_eq!(format_coordinate(1.25e-5), "0.000012500000000000001");
        assert_eq!(format_coordinate(12.5), "12.500000000000000");
    }

    #[test]
    fn header_and_counts_are_checked() {
        assert!(PointSet::from_text("2 2\n0.1 0.2\n").is_err());
        assert!(PointSet::from_text("2 1\n0.1\n").is_err());
        assert!(PointSet::from_text("").is_err());
        let p = PointSet::from_text("1 2\n0.25\n0.75\n\n").unwrap();
        assert_eq!(p.axis(0), vec![0.25, 0.75]);
    }

    proptest! {
        #[test]
        fn text_round_trip_is_bit_exact(
            raw in prop::collection::vec(prop::collection::vec(0u64..(1u64 << 53), 3), 1..20)
        ) {
            let points: Vec<Vec<f64>> = raw
                .iter()
                .map(|p| p.iter().map(|&k| k as f64 / (1u64 << 53) as f64).collect())
                .collect();
            let set = PointSet::new(3, points).unwrap();
            let back = PointSet::from_text(&set.to_text()).unwrap();
            for (a, b) in set.points().iter().zip(back.points()) {
                for (x, y) in a.iter().zip(b) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }

        #[test]
        fn any_finite_unit_float_round_trips(x in 0.0f64..1.0) {
            let s = format_coordinate(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
