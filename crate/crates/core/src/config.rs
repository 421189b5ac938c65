//! Abstract line configurations: points, 3-point lines, and the invariants
//! read off their collinearity graph.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// A point label: F2 coordinates for algebraic configurations, a name otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointLabel {
    Coords(Vec<u8>),
    Name(String),
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointLabel::Coords(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(":"))
            }
            PointLabel::Name(s) => f.write_str(s),
        }
    }
}

/// Outcome of checking the configuration axioms on raw point/line data.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    /// Lines that are not three distinct in-range points.
    pub malformed: Vec<String>,
    /// Pairs of distinct lines (by input index) sharing two or more points.
    pub violations: Vec<(usize, usize)>,
}

/// Checks `|l| = 3` and `|l ∩ l'| >= 2 => l = l'` for raw data. Lines listed
/// twice are the same element of the line set and are not reported.
pub fn validate_parts(num_points: usize, lines: &[[usize; 3]]) -> ValidityReport {
    let mut report = ValidityReport::default();
    let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
    let mut pair_owner: HashMap<(usize, usize), usize> = HashMap::new();
    let mut flagged: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (idx, line) in lines.iter().enumerate() {
        let mut l = *line;
        l.sort_unstable();
        if l[2] >= num_points {
            report.malformed.push(format!(
                "line {idx} {line:?} has a point outside 0..{num_points}"
            ));
            continue;
        }
        if l[0] == l[1] || l[1] == l[2] {
            report
                .malformed
                .push(format!("line {idx} {line:?} repeats a point"));
            continue;
        }
        if seen.contains_key(&l) {
            continue;
        }
        seen.insert(l, idx);
        for (a, b) in [(l[0], l[1]), (l[0], l[2]), (l[1], l[2])] {
            match pair_owner.get(&(a, b)) {
                Some(&other) => {
                    flagged.insert((other, idx));
                }
                None => {
                    pair_owner.insert((a, b), idx);
                }
            }
        }
    }
    report.violations = flagged.into_iter().collect();
    report.valid = report.malformed.is_empty() && report.violations.is_empty();
    report
}

/// A finite line configuration. Lines are stored sorted, each as a sorted
/// triple; point `i` carries `labels[i]`.
#[derive(Clone)]
pub struct LineConfiguration {
    labels: Vec<PointLabel>,
    dim: Option<usize>,
    lines: Vec<[usize; 3]>,
    through: Vec<Vec<usize>>,
    // third[p * n + q] = third point on the line through p and q
    third: Vec<u32>,
}

impl fmt::Debug for LineConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineConfiguration")
            .field("points", &self.labels.len())
            .field("lines", &self.lines)
            .finish()
    }
}

impl PartialEq for LineConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.lines == other.lines && self.dim == other.dim
    }
}

impl Eq for LineConfiguration {}

impl LineConfiguration {
    pub fn new(labels: Vec<PointLabel>, lines: Vec<[usize; 3]>) -> Result<Self> {
        let n = labels.len();
        let report = validate_parts(n, &lines);
        if !report.valid {
            let mut msg = report.malformed.join("; ");
            if !report.violations.is_empty() {
                if !msg.is_empty() {
                    msg.push_str("; ");
                }
                msg.push_str(&format!(
                    "line pairs sharing two points: {:?}",
                    report.violations
                ));
            }
            return Err(Error::InvalidConfiguration(msg));
        }
        let mut lines: Vec<[usize; 3]> = lines
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l
            })
            .collect();
        lines.sort_unstable();
        lines.dedup();
        let mut through = vec![Vec::new(); n];
        let mut third = vec![NONE; n * n];
        for (id, l) in lines.iter().enumerate() {
            for &p in l {
                through[p].push(id);
            }
            let [a, b, c] = *l;
            for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
                third[x * n + y] = z as u32;
                third[y * n + x] = z as u32;
            }
        }
        Ok(LineConfiguration {
            labels,
            dim: None,
            lines,
            through,
            third,
        })
    }

    /// Points labelled `0..n` by name.
    pub fn unlabeled(n: usize, lines: Vec<[usize; 3]>) -> Result<Self> {
        let labels = (0..n).map(|i| PointLabel::Name(i.to_string())).collect();
        Self::new(labels, lines)
    }

    /// `n` points and no lines.
    pub fn isolated_points(n: usize) -> Self {
        Self::unlabeled(n, Vec::new()).expect("no lines is always valid")
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = Some(dim);
        self
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn num_points(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[PointLabel] {
        &self.labels
    }

    pub fn lines(&self) -> &[[usize; 3]] {
        &self.lines
    }

    /// Line ids through `p`, ascending.
    pub fn lines_through(&self, p: usize) -> &[usize] {
        &self.through[p]
    }

    pub fn degree(&self, p: usize) -> usize {
        self.through[p].len()
    }

    pub fn third_point(&self, p: usize, q: usize) -> Option<usize> {
        let n = self.num_points();
        match self.third[p * n + q] {
            NONE => None,
            t => Some(t as usize),
        }
    }

    pub fn line_id(&self, line: [usize; 3]) -> Option<usize> {
        let mut l = line;
        l.sort_unstable();
        self.lines.binary_search(&l).ok()
    }

    pub fn is_line(&self, a: usize, b: usize, c: usize) -> bool {
        a != b && self.third_point(a, b) == Some(c)
    }

    /// Re-checks the axioms. Always valid for a constructed configuration.
    pub fn validate(&self) -> ValidityReport {
        validate_parts(self.num_points(), &self.lines)
    }

    fn check_point(&self, p: usize) -> Result<()> {
        if p >= self.num_points() {
            return Err(Error::InvalidArgument(format!(
                "point {p} out of range (configuration has {} points)",
                self.num_points()
            )));
        }
        Ok(())
    }

    /// Whether two distinct points lie on a common line.
    pub fn collinear(&self, p: usize, q: usize) -> Result<bool> {
        self.check_point(p)?;
        self.check_point(q)?;
        if p == q {
            return Err(Error::InvalidArgument(
                "collinearity needs two distinct points".into(),
            ));
        }
        Ok(self.third_point(p, q).is_some())
    }

    /// Whether two lines lie in a common Fano-plane subconfiguration.
    ///
    /// Two lines of P^2 always meet, so disjoint lines are never coplanar. For
    /// lines `{p,a,b}` and `{p,c,d}` through `p` the remaining two points of
    /// a plane are forced: `x` must be the third point of both `a c` and
    /// `b d`, `y` that of both `a d` and `b c`, and `{p, x, y}` must be a line.
    /// Trying both pairings exhausts every embedding containing the two lines.
    /// A line is coplanar with itself.
    pub fn coplanar(&self, l1: usize, l2: usize) -> Result<bool> {
        if l1 >= self.lines.len() || l2 >= self.lines.len() {
            return Err(Error::InvalidArgument("line index out of range".into()));
        }
        if l1 == l2 {
            return Ok(true);
        }
        Ok(self.coplanar_lines(self.lines[l1], self.lines[l2]))
    }

    pub(crate) fn coplanar_lines(&self, m1: [usize; 3], m2: [usize; 3]) -> bool {
        coplanar_by(|a, b| self.third_point(a, b), m1, m2)
    }

    /// Coplanarity graph on the lines through `p`: vertices are positions in
    /// `lines_through(p)`.
    pub fn coplanarity_graph_at(&self, p: usize) -> Graph {
        let ls = &self.through[p];
        let mut edges = Vec::new();
        for i in 0..ls.len() {
            for j in (i + 1)..ls.len() {
                if self.coplanar_lines(self.lines[ls[i]], self.lines[ls[j]]) {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(ls.len(), edges)
    }

    /// Graph on points, joining collinear pairs.
    pub fn incidence_graph(&self) -> Graph {
        let mut edges = Vec::with_capacity(self.lines.len() * 3);
        for &[a, b, c] in &self.lines {
            edges.extend([(a, b), (a, c), (b, c)]);
        }
        Graph::new(self.num_points(), edges)
    }

    /// Distance counts `v_i(p)`, pair counts `v_{i,j}(p,q)`, symmetry,
    /// diameter and components of the incidence graph.
    pub fn profile(&self) -> IncidenceProfile {
        IncidenceProfile::measure(&self.incidence_graph())
    }

    /// Configuration with points renamed: point `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_points();
        if perm.len() != n {
            return Err(Error::InvalidArgument(
                "permutation has the wrong length".into(),
            ));
        }
        let mut labels = vec![PointLabel::Name(String::new()); n];
        let mut hit = vec![false; n];
        for (i, &j) in perm.iter().enumerate() {
            if j >= n || hit[j] {
                return Err(Error::InvalidArgument(
                    "relabeling is not a permutation".into(),
                ));
            }
            hit[j] = true;
            labels[j] = self.labels[i].clone();
        }
        let lines = self
            .lines
            .iter()
            .map(|l| [perm[l[0]], perm[l[1]], perm[l[2]]])
            .collect();
        let mut out = LineConfiguration::new(labels, lines)?;
        out.dim = self.dim;
        Ok(out)
    }

    /// The configuration spanned by a subset of points with every line of
    /// `self` lying inside it.
    pub fn induced(&self, points: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.num_points()];
        for (i, &p) in points.iter().enumerate() {
            self.check_point(p)?;
            pos[p] = i;
        }
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        let lines = self
            .lines
            .iter()
            .filter(|l| l.iter().all(|&x| pos[x] != usize::MAX))
            .map(|l| [pos[l[0]], pos[l[1]], pos[l[2]]])
            .collect();
        LineConfiguration::new(labels, lines)
    }
}

/// Fano-plane closure test for two lines, given a third-point oracle.
pub(crate) fn coplanar_by(
    third: impl Fn(usize, usize) -> Option<usize>,
    m1: [usize; 3],
    m2: [usize; 3],
) -> bool {
    let Some(p) = m1.iter().copied().find(|x| m2.contains(x)) else {
        return false;
    };
    let others = |m: [usize; 3]| -> [usize; 2] {
        let mut it = m.iter().copied().filter(|&x| x != p);
        [it.next().unwrap(), it.next().unwrap()]
    };
    let [a, b] = others(m1);
    let [c, d] = others(m2);
    match (third(a, c), third(b, d), third(a, d), third(b, c)) {
        (Some(x), Some(x2), Some(y), Some(y2)) if x == x2 && y == y2 && x != y => {
            third(p, x) == Some(y)
        }
        _ => false,
    }
}

/// Disjoint union, points of `b` following those of `a`.
pub fn disjoint_union(a: &LineConfiguration, b: &LineConfiguration) -> LineConfiguration {
    let off = a.num_points();
    let labels = a
        .labels
        .iter()
        .map(|l| PointLabel::Name(format!("a{l}")))
        .chain(b.labels.iter().map(|l| PointLabel::Name(format!("b{l}"))))
        .collect();
    let lines = a
        .lines
        .iter()
        .copied()
        .chain(b.lines.iter().map(|l| [l[0] + off, l[1] + off, l[2] + off]))
        .collect();
    LineConfiguration::new(labels, lines).expect("disjoint union of valid configurations")
}

/// Cartesian product: points are tuples, lines vary one coordinate along a
/// line of that factor. Tuples are ordered with the first factor most
/// significant.
pub fn product_configuration(factors: &[LineConfiguration]) -> Result<LineConfiguration> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument(
            "product of an empty factor list".into(),
        ));
    }
    if factors.len() == 1 {
        return Ok(factors[0].clone());
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.num_points()).collect();
    let total: usize = sizes.iter().product();
    // stride[k] = product of sizes after k
    let mut strides = vec![1usize; sizes.len()];
    for k in (0..sizes.len() - 1).rev() {
        strides[k] = strides[k + 1] * sizes[k + 1];
    }
    let coords_of = |mut idx: usize| -> Vec<usize> {
        sizes
            .iter()
            .zip(&strides)
            .map(|(_, &s)| {
                let c = idx / s;
                idx %= s;
                c
            })
            .collect()
    };
    let labels = (0..total)
        .map(|idx| {
            let parts: Vec<String> = coords_of(idx)
                .iter()
                .zip(factors)
                .map(|(&c, f)| f.labels[c].to_string())
                .collect();
            PointLabel::Name(format!("({})", parts.join(",")))
        })
        .collect();
    let mut lines = Vec::new();
    for idx in 0..total {
        let coords = coords_of(idx);
        for (k, f) in factors.iter().enumerate() {
            if coords[k] != 0 {
                continue; // enumerate each fibre once, from its 0-th coordinate
            }
            for l in &f.lines {
                let base = idx;
                lines.push([
                    base + l[0] * strides[k],
                    base + l[1] * strides[k],
                    base + l[2] * strides[k],
                ]);
            }
        }
    }
    LineConfiguration::new(labels, lines)
}

/// An injective point map. Whether it sends lines to lines is checked by
/// [`is_morphism`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationMorphism {
    pub map: Vec<usize>,
}

impl ConfigurationMorphism {
    pub fn identity(n: usize) -> Self {
        ConfigurationMorphism {
            map: (0..n).collect(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ConfigurationMorphism) -> Result<Self> {
        let map =
            self.map
                .iter()
                .map(|&x| {
                    other.map.get(x).copied().ok_or_else(|| {
                        Error::InvalidArgument("morphisms are not composable".into())
                    })
                })
                .collect::<Result<_>>()?;
        Ok(ConfigurationMorphism { map })
    }

    /// Inverse of a bijective map.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.map.len();
        let mut inv = vec![usize::MAX; n];
        for (i, &j) in self.map.iter().enumerate() {
            if j >= n || inv[j] != usize::MAX {
                return Err(Error::InvalidArgument("map is not a bijection".into()));
            }
            inv[j] = i;
        }
        Ok(ConfigurationMorphism { map: inv })
    }
}

/// Whether `f` maps every line of `v` onto a line of `w`. Errors if `f` is
/// not an injective map from the points of `v` into those of `w`.
pub fn is_morphism(f: &[usize], v: &LineConfiguration, w: &LineConfiguration) -> Result<bool> {
    if f.len() != v.num_points() {
        return Err(Error::InvalidArgument(format!(
            "map has {} entries for {} points",
            f.len(),
            v.num_points()
        )));
    }
    let mut hit = vec![false; w.num_points()];
    for &x in f {
        if x >= w.num_points() {
            return Err(Error::InvalidArgument(format!(
                "image {x} is not a point of the target"
            )));
        }
        if hit[x] {
            return Err(Error::InvalidArgument("map is not injective".into()));
        }
        hit[x] = true;
    }
    Ok(v.lines.iter().all(|l| w.is_line(f[l[0]], f[l[1]], f[l[2]])))
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Graph { adj }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    /// Breadth-first distances from `src`; `None` for unreachable vertices.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph incidence {\n");
        for v in 0..self.adj.len() {
            s.push_str(&format!("  {v};\n"));
        }
        for (a, b) in self.edges() {
            s.push_str(&format!("  {a} -- {b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// Distance invariants of a configuration's incidence graph.
///
/// `distance_counts[p][i]` is `v_i(p)`. `pair_rows[i]` holds every distinct
/// row `(v_{i,j}(p,q))_j` observed over points `p` and `q` at distance `i`
/// from `p`. Rows and distance vectors run over `j = 0..=D` where `D` is the
/// largest finite distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceProfile {
    pub distance_counts: Vec<Vec<usize>>,
    pub pair_rows: Vec<Vec<Vec<usize>>>,
    pub symmetric: bool,
    /// `None` when the graph is disconnected.
    pub diameter: Option<usize>,
    pub components: usize,
    pub component_sizes: Vec<usize>,
    /// Shared `v_i` when symmetric.
    pub v: Option<Vec<usize>>,
    /// Shared `v_{i,j}` when symmetric, indexed `[i][j]`.
    pub v_pair: Option<Vec<Vec<usize>>>,
}

impl IncidenceProfile {
    pub fn measure(g: &Graph) -> Self {
        let n = g.num_vertices();
        let dists: Vec<Vec<Option<usize>>> = (0..n).map(|p| g.distances_from(p)).collect();
        let max_d = dists.iter().flatten().flatten().copied().max().unwrap_or(0);
        let width = max_d + 1;

        let mut distance_counts = Vec::with_capacity(n);
        let mut pair_rows: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); width];
        for d in &dists {
            let mut counts = vec![0usize; width];
            for x in d.iter().flatten() {
                counts[*x] += 1;
            }
            distance_counts.push(counts);
            for (q, dq) in d.iter().enumerate() {
                let Some(i) = *dq else { continue };
                let mut row = vec![0usize; width];
                for &r in g.neighbors(q) {
                    if let Some(j) = d[r] {
                        row[j] += 1;
                    }
                }
                pair_rows[i].insert(row);
            }
        }

        let mut comp = vec![usize::MAX; n];
        let mut component_sizes = Vec::new();
        for p in 0..n {
            if comp[p] != usize::MAX {
                continue;
            }
            let id = component_sizes.len();
            let mut size = 0;
            for (q, dq) in dists[p].iter().enumerate() {
                if dq.is_some() {
                    comp[q] = id;
                    size += 1;
                }
            }
            component_sizes.push(size);
        }
        let components = component_sizes.len();
        let diameter = if components <= 1 { Some(max_d) } else { None };

        let symmetric = distance_counts.windows(2).all(|w| w[0] == w[1])
            && pair_rows.iter().all(|rows| rows.len() <= 1);
        let (v, v_pair) = if symmetric && n > 0 {
            let v = distance_counts[0].clone();
            let vp = pair_rows
                .iter()
                .map(|rows| {
                    rows.iter()
                        .next()
                        .cloned()
                        .unwrap_or_else(|| vec![0; width])
                })
                .collect();
            (Some(v), Some(vp))
        } else {
            (None, None)
        };

        IncidenceProfile {
            distance_counts,
            pair_rows: pair_rows
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
            symmetric,
            diameter,
            components,
            component_sizes,
            v,
            v_pair,
        }
    }

    pub fn is_connected(&self) -> bool {
        self.components <= 1
    }

    /// Shared `v_i`, zero outside the realized range. Panics if not symmetric.
    pub fn vi(&self, i: i64) -> usize {
        let v = self.v.as_ref().expect("profile is not symmetric");
        if i < 0 {
            return 0;
        }
        v.get(i as usize).copied().unwrap_or(0)
    }

    /// Shared `v_{i,j}`, zero outside the realized range. Panics if not symmetric.
    pub fn vij(&self, i: i64, j: i64) -> usize {
        let vp = self.v_pair.as_ref().expect("profile is not symmetric");
        if i < 0 || j < 0 {
            return 0;
        }
        vp.get(i as usize)
            .and_then(|row| row.get(j as usize))
            .copied()
            .unwrap_or(0)
    }

    /// Largest distance realized.
    pub fn max_distance(&self) -> usize {
        self.distance_counts
            .first()
            .map_or(0, |c| c.len().saturating_sub(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> LineConfiguration {
        LineConfiguration::unlabeled(
            7,
            vec![
                [0, 1, 2],
                [0, 3, 4],
                [0, 5, 6],
                [1, 3, 5],
                [1, 4, 6],
                [2, 3, 6],
                [2, 4, 5],
            ],
        )
        .unwrap()
    }

    fn p1() -> LineConfiguration {
        LineConfiguration::unlabeled(3, vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn validation_reports_offending_pair() {
        let r = validate_parts(5, &[[0, 1, 2], [0, 1, 3], [2, 3, 4]]);
        assert!(!r.valid);
        assert_eq!(r.violations, vec![(0, 1)]);
        let bad = validate_parts(3, &[[0, 0, 1], [0, 1, 5]]);
        assert_eq!(bad.malformed.len(), 2);
        assert!(LineConfiguration::unlabeled(4, vec![[0, 1, 2], [1, 2, 3]]).is_err());
        assert!(fano().validate().valid);
    }

    #[test]
    fn duplicate_lines_collapse() {
        let c = LineConfiguration::unlabeled(3, vec![[0, 1, 2], [2, 1, 0]]).unwrap();
        assert_eq!(c.lines().len(), 1);
    }

    #[test]
    fn collinearity() {
        let f = fano();
        for p in 0..7 {
            for q in 0..7 {
                if p != q {
                    assert!(f.collinear(p, q).unwrap());
                }
            }
        }
        assert!(f.collinear(2, 2).is_err());
        let five = LineConfiguration::isolated_points(5);
        assert!(!five.collinear(0, 4).unwrap());
    }

    #[test]
    fn fano_lines_coplanar() {
        let f = fano();
        for a in 0..7 {
            for b in 0..7 {
                assert!(f.coplanar(a, b).unwrap());
            }
        }
    }

    #[test]
    fn grid_lines_not_coplanar() {
        let grid = product_configuration(&[p1(), p1()]).unwrap();
        assert_eq!(grid.num_points(), 9);
        assert_eq!(grid.lines().len(), 6);
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(grid.coplanar(a, b).unwrap(), a == b);
            }
        }
    }

    #[test]
    fn morphisms() {
        let f = fano();
        assert!(is_morphism(&(0..7).collect::<Vec<_>>(), &f, &f).unwrap());
        // swapping 0 and 1 keeps {0,1,2} but breaks {0,3,4}
        let swap = [1, 0, 2, 3, 4, 5, 6];
        assert!(!is_morphism(&swap, &f, &f).unwrap());
        assert!(is_morphism(&[0, 0, 1, 2, 3, 4, 5], &f, &f).is_err());
        assert!(is_morphism(&[3, 5, 1], &p1(), &f).unwrap());
        let id = ConfigurationMorphism::identity(7);
        let m = ConfigurationMorphism {
            map: vec![1, 2, 0, 3, 4, 5, 6],
        };
        assert_eq!(m.then(&m.inverse().unwrap()).unwrap(), id);
    }

    #[test]
    fn product_counts() {
        let cube = product_configuration(&[p1(), p1(), p1()]).unwrap();
        assert_eq!(cube.num_points(), 27);
        assert_eq!(cube.lines().len(), 27);
        assert!((0..27).all(|p| cube.degree(p) == 3));
        assert_eq!(product_configuration(&[p1()]).unwrap(), p1());
        assert!(product_configuration(&[]).is_err());
    }

    #[test]
    fn line_profile() {
        let prof = p1().profile();
        assert!(prof.symmetric);
        assert_eq!(prof.diameter, Some(1));
        assert_eq!(prof.vi(1), 2);
        assert_eq!(prof.vij(1, 0), 1);
        assert_eq!(prof.vij(1, 1), 1);
    }

    #[test]
    fn isolated_points_profile() {
        let prof = LineConfiguration::isolated_points(5).profile();
        assert!(prof.symmetric);
        assert_eq!(prof.diameter, None);
        assert_eq!(prof.components, 5);
        assert_eq!(prof.vi(0), 1);
        assert_eq!(prof.vi(1), 0);
    }

    #[test]
    fn asymmetric_profile() {
        let c = disjoint_union(&p1(), &LineConfiguration::isolated_points(1));
        let prof = c.profile();
        assert!(!prof.symmetric);
        assert_eq!(prof.components, 2);
        assert_eq!(prof.component_sizes, vec![3, 1]);
    }

    #[test]
    fn dot_is_stable() {
        let dot = p1().incidence_graph().to_dot();
        assert_eq!(
            dot,
            "graph incidence {\n  0;\n  1;\n  2;\n  0 -- 1;\n  0 -- 2;\n  1 -- 2;\n}\n"
        );
    }
}
