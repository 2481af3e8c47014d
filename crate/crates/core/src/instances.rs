//! The three-line point family `G(n, d)`: `3n` points at `(i, j*d)` for
//! `i = 1..=n`, `j = 1..=3`, under an `L^p` metric.
//!
//! Points are stored row-major, lowest row first and left to right, so the
//! point in column `i` and row `j` has index `(j - 1) * n + (i - 1)`.

use std::fmt::{self, Write as _};

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance function between planar points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// `L^p` with integral `p >= 1`.
    Lp(u32),
    /// `L^inf`, the maximum coordinate difference.
    LInf,
}

impl Metric {
    pub const EUCLIDEAN: Metric = Metric::Lp(2);

    pub fn distance(self, a: Point, b: Point) -> f64 {
        let dx = (a.x - b.x).abs();
        let dy = (a.y - b.y).abs();
        match self {
            Metric::Lp(1) => dx + dy,
            Metric::Lp(2) => dx.hypot(dy),
            Metric::Lp(p) => {
                let m = dx.max(dy);
                if m == 0.0 {
                    return 0.0;
                }
                // Factor out the larger coordinate to avoid overflow for large p.
                let p = p as i32;
                m * ((dx / m).powi(p) + (dy / m).powi(p)).powf(1.0 / p as f64)
            }
            Metric::LInf => dx.max(dy),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Metric::Lp(0) => Err(Error::Domain("metric exponent p must be >= 1".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Lp(p) => write!(f, "{p}"),
            Metric::LInf => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Metric::LInf);
        }
        let p: u32 = s
            .parse()
            .map_err(|_| Error::Parse(format!("invalid metric exponent `{s}`")))?;
        let metric = Metric::Lp(p);
        metric.validate()?;
        Ok(metric)
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Metric::Lp(p) => serializer.serialize_u32(*p),
            Metric::LInf => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct MetricVisitor;

        impl Visitor<'_> for MetricVisitor {
            type Value = Metric;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive integer or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Metric, E> {
                match u32::try_from(v) {
                    Ok(p) if p >= 1 => Ok(Metric::Lp(p)),
                    _ => Err(E::custom(format!("metric exponent {v} out of range"))),
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Metric, E> {
                if v < 1 {
                    return Err(E::custom(format!("metric exponent {v} out of range")));
                }
                self.visit_u64(v as u64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Metric, E> {
                if v == "inf" {
                    Ok(Metric::LInf)
                } else {
                    Err(E::custom(format!("unknown metric `{v}`")))
                }
            }
        }

        deserializer.deserialize_any(MetricVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Role of a point with respect to the convex hull of `G(n, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Role {
    /// Interior middle-row point `g_1..g_{n-2}`.
    Inner,
    /// Top row.
    HullUpper,
    /// First or last point of the middle row.
    HullMiddleEnd,
    /// Bottom row.
    HullLower,
}

impl Role {
    pub fn is_hull(self) -> bool {
        self != Role::Inner
    }

    /// Hull points on the two lower lines.
    pub fn is_lower_hull(self) -> bool {
        matches!(self, Role::HullMiddleEnd | Role::HullLower)
    }
}

/// Parameters of `G(n, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub d: f64,
    pub p: Metric,
}

impl InstanceSpec {
    pub fn new(n: usize, d: f64, p: Metric) -> Self {
        InstanceSpec { n, d, p }
    }

    pub fn euclidean(n: usize, d: f64) -> Self {
        InstanceSpec::new(n, d, Metric::EUCLIDEAN)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!("n must be >= 2, got {}", self.n)));
        }
        if !self.d.is_finite() || self.d <= 0.0 {
            return Err(Error::Domain(format!("d must be finite and > 0, got {}", self.d)));
        }
        self.p.validate()
    }
}

/// Point rows, numbered bottom to top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Row {
    Lower = 1,
    Middle = 2,
    Upper = 3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    spec: InstanceSpec,
    points: Vec<Point>,
    roles: Vec<Role>,
}

/// Build `G(n, d)`.
pub fn generate(spec: InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    let n = spec.n;
    let mut points = Vec::with_capacity(3 * n);
    let mut roles = Vec::with_capacity(3 * n);
    for row in 1..=3 {
        for col in 1..=n {
            points.push(Point::new(col as f64, row as f64 * spec.d));
            roles.push(match row {
                1 => Role::HullLower,
                3 => Role::HullUpper,
                _ if col == 1 || col == n => Role::HullMiddleEnd,
                _ => Role::Inner,
            });
        }
    }
    Ok(Instance { spec, points, roles })
}

impl Instance {
    pub fn spec(&self) -> &InstanceSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn d(&self) -> f64 {
        self.spec.d
    }

    pub fn metric(&self) -> Metric {
        self.spec.p
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// Index of the point in column `col` (1-based) of `row`.
    pub fn index(&self, col: usize, row: Row) -> usize {
        debug_assert!((1..=self.spec.n).contains(&col));
        (row as usize - 1) * self.spec.n + (col - 1)
    }

    /// Index of `g_i`, `1 <= i <= n - 2`.
    pub fn inner(&self, i: usize) -> usize {
        self.index(i + 1, Row::Middle)
    }

    pub fn inner_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == Role::Inner)
            .map(|(i, _)| i)
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let len = self.points.len();
        for index in [i, j] {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        Ok(self.dist(i, j))
    }


    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceJson::from(self)).expect("instance serializes")
    }

    /// Parse and validate an instance written by [`Instance::to_json`]. The
    /// points and roles must match what [`generate`] produces for the stored
    /// parameters.
    pub fn from_json(text: &str) -> Result<Instance> {
        let raw: InstanceJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let spec = InstanceSpec::new(raw.n, raw.d, raw.p);
        let inst = generate(spec).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.points != inst.points {
            return Err(Error::Parse("points do not match G(n, d) for the stored n and d".into()));
        }
        if raw.roles != inst.roles {
            return Err(Error::Parse("roles do not match G(n, d)".into()));
        }
        Ok(inst)
    }

    /// TSPLIB `EUC_2D` rendering with coordinates multiplied by `scale`.
    ///
    /// TSPLIB rounds `EUC_2D` distances to the nearest integer, so the exported
    /// file only approximates `G(n, d)`; a larger `scale` gives a closer match.
    pub fn to_tsplib(&self, scale: u64) -> Result<String> {
        if self.spec.p != Metric::EUCLIDEAN {
            return Err(Error::Unsupported(format!(
                "TSPLIB EUC_2D export needs p = 2, instance has p = {}",
                self.spec.p
            )));
        }
        if scale == 0 {
            return Err(Error::Domain("TSPLIB scale factor must be positive".into()));
        }
        let s = scale as f64;
        let mut out = String::new();
        let _ = writeln!(out, "NAME : G_{}_{}", self.spec.n, self.spec.d);
        let _ = writeln!(out, "TYPE : TSP");
        let _ = writeln!(
            out,
            "COMMENT : three-line instance n={} d={} scaled by {} (EUC_2D rounding applies)",
            self.spec.n, self.spec.d, scale
        );
        let _ = writeln!(out, "DIMENSION : {}", self.points.len());
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
        let _ = writeln!(out, "NODE_COORD_SECTION");
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(out, "{} {} {}", i + 1, p.x * s, p.y * s);
        }
        out.push_str("EOF\n");
        Ok(out)
    }
}

/// Symmetric pairwise costs over `len()` points, the input of the exact and
/// LP solvers.
pub trait Distances {
    fn len(&self) -> usize;

    /// Cost between points `i` and `j`; callers guarantee both are in range.
    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Distances for Instance {
    fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.spec.p.distance(self.points[i], self.points[j])
    }
}

/// An arbitrary list of points under a metric. Used for small oracle checks
/// outside the `G(n, d)` family.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub metric: Metric,
}

impl PointSet {
    pub fn new(points: Vec<Point>, metric: Metric) -> Self {
        PointSet { points, metric }
    }

    pub fn euclidean(coords: &[(f64, f64)]) -> Self {
        PointSet::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect(), Metric::EUCLIDEAN)
    }
}

impl Distances for PointSet {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(self.points[i], self.points[j])
    }
}

/// Read the node coordinates of a TSPLIB `EUC_2D` file.
pub fn parse_tsplib_coords(text: &str) -> Result<Vec<Point>> {
    let mut dimension = None;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut in_coords = false;
    let mut points = Vec::new();
    for line in lines.by_ref() {
        if in_coords {
            if line == "EOF" {
                break;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [idx, x, y] = fields[..] else {
                return Err(Error::Parse(format!("bad NODE_COORD line `{line}`")));
            };
            let idx: usize = idx.parse().map_err(|_| Error::Parse(format!("bad node id `{idx}`")))?;
            if idx != points.len() + 1 {
                return Err(Error::Parse(format!("node ids out of order at `{line}`")));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad coordinate `{s}`")));
            points.push(Point::new(parse(x)?, parse(y)?));
            continue;
        }
        if line == "NODE_COORD_SECTION" {
            in_coords = true;
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(Error::Parse(format!("unexpected line `{line}`")));
        };
        match key.trim() {
            "DIMENSION" => {
                dimension = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad DIMENSION `{value}`")))?,
                )
            }
            "EDGE_WEIGHT_TYPE" if value.trim() != "EUC_2D" => {
                return Err(Error::Unsupported(format!("EDGE_WEIGHT_TYPE {}", value.trim())))
            }
            _ => {}
        }
    }
    match dimension {
        Some(dim) if dim == points.len() => Ok(points),
        Some(dim) => Err(Error::Parse(format!("DIMENSION {dim} but {} coordinates", points.len()))),
        None => Err(Error::Parse("missing DIMENSION".into())),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    n: usize,
    d: f64,
    p: Metric,
    points: Vec<Point>,
    roles: Vec<Role>,
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> Self {
        InstanceJson {
            n: inst.spec.n,
            d: inst.spec.d,
            p: inst.spec.p,
            points: inst.points.clone(),
            roles: inst.roles.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g18_3_layout() {
        let inst = generate(InstanceSpec::euclidean(18, 3.0)).unwrap();
        assert_eq!(inst.len(), 54);
        let inner: Vec<usize> = inst.inner_indices().collect();
        assert_eq!(inner.len(), 16);
        for (k, &idx) in inner.iter().enumerate() {
            let i = k + 1;
            assert_eq!(idx, inst.inner(i));
            assert_eq!(inst.points()[idx], Point::new(i as f64 + 1.0, 6.0));
        }
        for col in 1..=18 {
            for row in 1..=3 {
                let p = Point::new(col as f64, row as f64 * 3.0);
                assert!(inst.points().contains(&p));
            }
        }
        let lower_hull = inst.roles().iter().filter(|r| r.is_lower_hull()).count();
        assert_eq!(lower_hull, 18 + 2);
        let hull = inst.roles().iter().filter(|r| r.is_hull()).count();
        assert_eq!(hull, 54 - 16);
    }

    #[test]
    fn smallest_instance_has_no_inner_points() {
        let inst = generate(InstanceSpec::euclidean(2, 1.0)).unwrap();
        assert_eq!(inst.len(), 6);
        assert_eq!(inst.inner_indices().count(), 0);
    }

    #[test]
    fn collinear_distance() {
        let inst = generate(InstanceSpec::euclidean(4, 4.0)).unwrap();
        assert_eq!(inst.len(), 12);
        let a = inst.index(1, Row::Lower);
        let b = inst.index(4, Row::Lower);
        assert_eq!(inst.points()[a], Point::new(1.0, 4.0));
        assert_eq!(inst.distance(a, b).unwrap(), 3.0);
    }

    #[test]
    fn metric_examples() {
        let o = Point::new(0.0, 0.0);
        let q = Point::new(3.0, 4.0);
        assert_eq!(Metric::Lp(2).distance(o, q), 5.0);
        assert_eq!(Metric::Lp(1).distance(o, q), 7.0);
        assert_eq!(Metric::LInf.distance(o, q), 4.0);
        let g1 = Point::new(2.0, 6.0);
        let r = Point::new(0.0, 3.0);
        assert!((Metric::EUCLIDEAN.distance(g1, r) - 13f64.sqrt()).abs() < 1e-12);
        let inst = generate(InstanceSpec::euclidean(18, 3.0)).unwrap();
        let d = inst.distance(inst.inner(1), inst.index(1, Row::Lower)).unwrap();
        assert!((d - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        for spec in [
            InstanceSpec::euclidean(1, 1.0),
            InstanceSpec::euclidean(0, 1.0),
            InstanceSpec::euclidean(4, 0.0),
            InstanceSpec::euclidean(4, -2.0),
            InstanceSpec::euclidean(4, f64::NAN),
            InstanceSpec::new(4, 1.0, Metric::Lp(0)),
        ] {
            assert!(matches!(generate(spec), Err(Error::Domain(_))), "{spec:?}");
        }
    }

    #[test]
    fn distance_index_out_of_range() {
        let inst = generate(InstanceSpec::euclidean(3, 1.0)).unwrap();
        assert!(matches!(inst.distance(0, 9), Err(Error::IndexOutOfRange { index: 9, len: 9 })));
    }

    #[test]
    fn json_round_trip() {
        let inst = generate(InstanceSpec::new(4, 4.0, Metric::LInf)).unwrap();
        let text = inst.to_json();
        assert!(text.contains("\"p\":\"inf\""));
        assert_eq!(Instance::from_json(&text).unwrap(), inst);
        let inst = generate(InstanceSpec::euclidean(4, 4.0)).unwrap();
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let inst = generate(InstanceSpec::euclidean(4, 4.0)).unwrap();
        let text = inst.to_json();
        for bad in [
            text[..text.len() / 2].to_string(),
            text.replace("[1.0,4.0]", "[1.5,4.0]"),
            text.replace("\"n\":4", "\"n\":5"),
            text.replace("\"p\":2", "\"p\":0"),
            text.replacen("INNER", "HULL_LOWER", 1),
        ] {
            assert!(matches!(Instance::from_json(&bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn tsplib_export() {
        let inst = generate(InstanceSpec::euclidean(4, 4.0)).unwrap();
        let text = inst.to_tsplib(1000).unwrap();
        assert!(text.contains("TYPE : TSP"));
        assert!(text.contains("EDGE_WEIGHT_TYPE : EUC_2D"));
        let section = text.split("NODE_COORD_SECTION\n").nth(1).unwrap();
        assert_eq!(section.lines().filter(|l| *l != "EOF").count(), 12);
        let coords = parse_tsplib_coords(&text).unwrap();
        assert_eq!(coords.len(), 12);
        assert_eq!(coords[11], Point::new(4000.0, 12000.0));

        let manhattan = generate(InstanceSpec::new(4, 4.0, Metric::Lp(1))).unwrap();
        assert!(matches!(manhattan.to_tsplib(1000), Err(Error::Unsupported(_))));
        assert!(parse_tsplib_coords("DIMENSION : 3\nNODE_COORD_SECTION\n1 0 0\nEOF\n").is_err());
    }

    fn metric_strategy() -> impl Strategy<Value = Metric> {
        prop_oneof![(1u32..8).prop_map(Metric::Lp), Just(Metric::LInf)]
    }

    fn point_strategy() -> impl Strategy<Value = Point> {
        (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn metric_is_symmetric_and_satisfies_triangle_inequality(
            m in metric_strategy(), a in point_strategy(), b in point_strategy(), c in point_strategy()
        ) {
            prop_assert_eq!(m.distance(a, b), m.distance(b, a));
            prop_assert_eq!(m.distance(a, a), 0.0);
            prop_assert!(m.distance(a, c) <= m.distance(a, b) + m.distance(b, c) + 1e-9);
        }

        #[test]
        fn generate_is_deterministic(n in 2usize..30, d in 0.1..20.0f64, m in metric_strategy()) {
            let spec = InstanceSpec::new(n, d, m);
            let a = generate(spec).unwrap();
            prop_assert_eq!(&a, &generate(spec).unwrap());
            for i in 0..a.len() {
                for j in 0..a.len() {
                    let dij = a.distance(i, j).unwrap();
                    prop_assert_eq!(dij, a.distance(j, i).unwrap());
                    prop_assert_eq!(dij == 0.0, i == j);
                }
            }
        }
    }
}
