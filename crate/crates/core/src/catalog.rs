//! Named constructions.

use std::fmt;

use crate::config::{product_configuration, LineConfiguration, PointLabel};
use crate::error::{Error, Result};
use crate::gf2geom::{
    enumerate_projective_points, lines_in_point_set, minus_quadric, variety_points, PointSet,
};

fn algebraic(set: &PointSet) -> Result<LineConfiguration> {
    let labels = set
        .points()
        .iter()
        .map(|p| PointLabel::Coords(p.coords()))
        .collect();
    Ok(LineConfiguration::new(labels, lines_in_point_set(set))?.with_dim(set.dim()))
}

/// Points and F2-lines of P^n.
pub fn projective_configuration(n: usize) -> Result<LineConfiguration> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "projective configuration needs n >= 1".into(),
        ));
    }
    algebraic(&PointSet::new(n, enumerate_projective_points(n)?)?)
}

/// P^2(F2).
pub fn fano() -> LineConfiguration {
    projective_configuration(2).expect("P^2 is always constructible")
}

/// The configuration of points and lines of the elliptic quadric Q_{2n}^-.
pub fn quadric_configuration(n: usize) -> Result<LineConfiguration> {
    algebraic(&variety_points(&minus_quadric(n)?)?)
}

/// Product of `n` copies of P^1.
pub fn p1_power(n: usize) -> Result<LineConfiguration> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one factor".into()));
    }
    let p1 = projective_configuration(1)?;
    product_configuration(&vec![p1; n])
}

/// Classical name of one of the 27 lines: `a_i`, `b_i` or `c_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchlaefliLabel {
    A(u8),
    B(u8),
    C(u8, u8),
}

impl SchlaefliLabel {
    /// All 27 labels: a1..a6, b1..b6, then c_ij in lexicographic order.
    pub fn all() -> Vec<SchlaefliLabel> {
        let mut out: Vec<SchlaefliLabel> = (1..=6).map(SchlaefliLabel::A).collect();
        out.extend((1..=6).map(SchlaefliLabel::B));
        for i in 1..=6u8 {
            for j in (i + 1)..=6 {
                out.push(SchlaefliLabel::C(i, j));
            }
        }
        out
    }
}

impl fmt::Display for SchlaefliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchlaefliLabel::A(i) => write!(f, "a{i}"),
            SchlaefliLabel::B(i) => write!(f, "b{i}"),
            SchlaefliLabel::C(i, j) => write!(f, "c{i}{j}"),
        }
    }
}

/// The 27 lines of a smooth cubic surface with their 45 tritangent triples:
/// `{a_i, b_j, c_ij}` for `i != j` and `{c_ij, c_kl, c_mn}` for each
/// partition of `{1..6}` into three pairs.
pub fn schlaefli_configuration() -> LineConfiguration {
    let labels = SchlaefliLabel::all();
    let idx = |l: SchlaefliLabel| labels.iter().position(|&x| x == l).unwrap();
    let c = |i: u8, j: u8| idx(SchlaefliLabel::C(i.min(j), i.max(j)));
    let mut lines = Vec::with_capacity(45);
    for i in 1..=6u8 {
        for j in 1..=6u8 {
            if i != j {
                lines.push([
                    idx(SchlaefliLabel::A(i)),
                    idx(SchlaefliLabel::B(j)),
                    c(i, j),
                ]);
            }
        }
    }
    for pairing in pairings(&[1, 2, 3, 4, 5, 6]) {
        lines.push([
            c(pairing[0].0, pairing[0].1),
            c(pairing[1].0, pairing[1].1),
            c(pairing[2].0, pairing[2].1),
        ]);
    }
    let names = labels
        .iter()
        .map(|l| PointLabel::Name(l.to_string()))
        .collect();
    LineConfiguration::new(names, lines).expect("the 45 tritangent triples form a configuration")
}

/// Perfect matchings of an even-sized list.
fn pairings(items: &[u8]) -> Vec<Vec<(u8, u8)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let first = items[0];
    let mut out = Vec::new();
    for k in 1..items.len() {
        let rest: Vec<u8> = items[1..]
            .iter()
            .copied()
            .filter(|&x| x != items[k])
            .collect();
        for mut tail in pairings(&rest) {
            tail.insert(0, (first, items[k]));
            out.push(tail);
        }
    }
    out
}

/// Resolves a catalog name. Accepted forms: `fano`, `line`, `p<n>`,
/// `q-minus<n>`, `schlaefli`, `points<n>`, `p1^<n>` (also `p1x<n>`).
/// Whitespace between the name and its index is allowed.
pub fn by_name(name: &str) -> Result<LineConfiguration> {
    let key: String = name
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let index = |prefix: &str| -> Option<Result<usize>> {
        key.strip_prefix(prefix).map(|rest| {
            rest.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad index in catalog name {name:?}")))
        })
    };
    match key.as_str() {
        "fano" => return Ok(fano()),
        "line" => return projective_configuration(1),
        "schlaefli" | "schlafli" => return Ok(schlaefli_configuration()),
        _ => {}
    }
    for sep in ["p1^", "p1x"] {
        if let Some(n) = index(sep) {
            return p1_power(n?);
        }
    }
    if let Some(n) = index("q-minus") {
        return quadric_configuration(n?);
    }
    if let Some(n) = index("points") {
        return Ok(LineConfiguration::isolated_points(n?));
    }
    if let Some(n) = index("p") {
        return projective_configuration(n?);
    }
    Err(Error::InvalidArgument(format!(
        "unknown catalog name {name:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_shape() {
        let f = fano();
        assert_eq!(f.num_points(), 7);
        assert_eq!(f.lines().len(), 7);
        assert!((0..7).all(|p| f.degree(p) == 3));
        assert_eq!(f, projective_configuration(2).unwrap());
    }

    #[test]
    fn projective_line_counts() {
        let p1 = projective_configuration(1).unwrap();
        assert_eq!((p1.num_points(), p1.lines().len()), (3, 1));
        let p3 = projective_configuration(3).unwrap();
        assert_eq!(p3.num_points(), 15);
        assert_eq!(p3.lines().len(), (16 - 1) * (16 - 2) / 6);
        assert!(projective_configuration(0).is_err());
    }

    #[test]
    fn quadric_shapes() {
        let q4 = quadric_configuration(2).unwrap();
        assert_eq!((q4.num_points(), q4.lines().len()), (5, 0));
        let q6 = quadric_configuration(3).unwrap();
        assert_eq!((q6.num_points(), q6.lines().len()), (27, 45));
        let q8 = quadric_configuration(4).unwrap();
        assert_eq!((q8.num_points(), q8.lines().len()), (119, 119 * 27 / 3));
    }

    #[test]
    fn schlaefli_shape() {
        let s = schlaefli_configuration();
        assert_eq!(s.num_points(), 27);
        assert_eq!(s.lines().len(), 45);
        assert!((0..27).all(|p| s.degree(p) == 5));
        assert_eq!(pairings(&[1, 2, 3, 4, 5, 6]).len(), 15);
    }

    #[test]
    fn names_resolve() {
        assert_eq!(by_name("q-minus 3").unwrap().num_points(), 27);
        assert_eq!(by_name("q-minus4").unwrap().num_points(), 119);
        assert_eq!(by_name("p3").unwrap().num_points(), 15);
        assert_eq!(by_name("p1^3").unwrap().num_points(), 27);
        assert_eq!(by_name("points4").unwrap().num_points(), 4);
        assert_eq!(by_name("line").unwrap().lines().len(), 1);
        assert!(by_name("dodecahedron").is_err());
        assert!(by_name("q-minusx").is_err());
    }
}
