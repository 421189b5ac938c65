//! Isomorphism, automorphism and canonical-form search for line
//! configurations and small graphs.
//!
//! Everything runs on one engine: colour refinement over a uniform
//! hypergraph (lines are 3-edges, graph edges are 2-edges) followed by
//! individualization and depth-first backtracking. Colours produced by
//! refinement are ranks of sorted signatures, so they are invariant under
//! relabeling; all choices are made in ascending vertex order, which makes
//! every result deterministic.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::config::{ConfigurationMorphism, Graph, LineConfiguration};

/// Hypergraph view consumed by the refinement engine.
#[derive(Clone, Debug)]
pub(crate) struct Structure {
    n: usize,
    edges: Vec<Vec<u32>>,
    incident: Vec<Vec<u32>>,
    edge_set: HashSet<Vec<u32>>,
}

impl Structure {
    pub(crate) fn new(n: usize, edges: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut edges: Vec<Vec<u32>> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut incident = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            for &v in e {
                incident[v as usize].push(id as u32);
            }
        }
        let edge_set = edges.iter().cloned().collect();
        Structure {
            n,
            edges,
            incident,
            edge_set,
        }
    }

    pub(crate) fn from_lines(n: usize, lines: &[[usize; 3]]) -> Self {
        Structure::new(
            n,
            lines.iter().map(|l| l.iter().map(|&x| x as u32).collect()),
        )
    }

    pub(crate) fn from_config(c: &LineConfiguration) -> Self {
        Structure::from_lines(c.num_points(), c.lines())
    }

    pub(crate) fn from_graph(g: &Graph) -> Self {
        Structure::new(
            g.num_vertices(),
            g.edges().into_iter().map(|(a, b)| vec![a as u32, b as u32]),
        )
    }

    fn union(a: &Structure, b: &Structure) -> Structure {
        let off = a.n as u32;
        let edges = a
            .edges
            .iter()
            .cloned()
            .chain(b.edges.iter().map(|e| e.iter().map(|&x| x + off).collect()));
        Structure::new(a.n + b.n, edges)
    }

    fn is_automorphic_image(&self, other: &Structure, map: &[u32]) -> bool {
        self.edges.len() == other.edges.len()
            && self.edges.iter().all(|e| {
                let mut img: Vec<u32> = e.iter().map(|&x| map[x as usize]).collect();
                img.sort_unstable();
                other.edge_set.contains(&img)
            })
    }

    /// Invariant digest of the multiset of colour tuples on the edges at `v`.
    fn signature(&self, v: usize, colors: &[u32], keys: &mut Vec<u64>) -> u64 {
        keys.clear();
        for &eid in &self.incident[v] {
            let mut a = u64::MAX;
            let mut b = u64::MAX;
            for &x in &self.edges[eid as usize] {
                if x as usize == v {
                    continue;
                }
                let c = u64::from(colors[x as usize]);
                if c < a {
                    b = a;
                    a = c;
                } else if c < b {
                    b = c;
                }
            }
            keys.push((a << 32) ^ b);
        }
        keys.sort_unstable();
        keys.iter()
            .fold(0x9e37_79b9_7f4a_7c15u64, |h, &k| mix(h ^ k))
    }

    /// Refines `colors` to the coarsest stable colouring finer than it.
    /// Returns the number of colours.
    fn refine(&self, colors: &mut [u32]) -> usize {
        let mut count = distinct(colors);
        let mut keys = Vec::new();
        let mut order: Vec<(u32, u64, u32)> = Vec::with_capacity(self.n);
        loop {
            order.clear();
            order.extend(
                (0..self.n).map(|v| (colors[v], self.signature(v, colors, &mut keys), v as u32)),
            );
            order.sort_unstable();
            let mut next = 0u32;
            for k in 0..order.len() {
                if k > 0 && (order[k].0, order[k].1) != (order[k - 1].0, order[k - 1].1) {
                    next += 1;
                }
                colors[order[k].2 as usize] = next;
            }
            let new_count = if self.n == 0 { 0 } else { next as usize + 1 };
            if new_count == count {
                return new_count;
            }
            count = new_count;
        }
    }
}

fn mix(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^ (x >> 33)
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn individualize(colors: &mut [u32], vs: &[usize]) {
    let fresh = colors.iter().copied().max().map_or(0, |m| m + 1);
    for &v in vs {
        colors[v] = fresh;
    }
}

/// Search for an isomorphism `a -> b` extending the prescribed pairs.
struct IsoSearch<'s> {
    a: &'s Structure,
    b: &'s Structure,
    union: Structure,
    nodes: u64,
}

impl<'s> IsoSearch<'s> {
    fn new(a: &'s Structure, b: &'s Structure) -> Self {
        IsoSearch {
            a,
            b,
            union: Structure::union(a, b),
            nodes: 0,
        }
    }

    fn run(&mut self, fixed: &[(usize, usize)]) -> Option<Vec<u32>> {
        if self.a.n != self.b.n || self.a.edges.len() != self.b.edges.len() {
            return None;
        }
        let na = self.a.n;
        let mut colors = vec![0u32; 2 * na];
        for &(x, y) in fixed {
            individualize(&mut colors, &[x, na + y]);
        }
        self.dfs(colors)
    }

    fn dfs(&mut self, mut colors: Vec<u32>) -> Option<Vec<u32>> {
        self.nodes += 1;
        let na = self.a.n;
        let k = self.union.refine(&mut colors);
        let mut count_a = vec![0usize; k];
        let mut count_b = vec![0usize; k];
        for v in 0..na {
            count_a[colors[v] as usize] += 1;
            count_b[colors[na + v] as usize] += 1;
        }
        if count_a != count_b {
            return None;
        }
        let target = (0..k)
            .filter(|&c| count_a[c] > 1)
            .min_by_key(|&c| (count_a[c], c));
        let Some(cell) = target else {
            let mut pos = vec![0u32; k];
            for v in 0..na {
                pos[colors[na + v] as usize] = v as u32;
            }
            let map: Vec<u32> = (0..na).map(|v| pos[colors[v] as usize]).collect();
            return self.a.is_automorphic_image(self.b, &map).then_some(map);
        };
        let cell = cell as u32;
        let v = (0..na).find(|&v| colors[v] == cell).unwrap();
        for w in (0..na).filter(|&w| colors[na + w] == cell) {
            let mut next = colors.clone();
            individualize(&mut next, &[v, na + w]);
            if let Some(map) = self.dfs(next) {
                return Some(map);
            }
        }
        None
    }
}

pub(crate) fn find_isomorphism(
    a: &Structure,
    b: &Structure,
    fixed: &[(usize, usize)],
) -> Option<Vec<usize>> {
    IsoSearch::new(a, b)
        .run(fixed)
        .map(|m| m.into_iter().map(|x| x as usize).collect())
}

/// An isomorphism `v -> w` (point map sending lines onto lines), or `None`
/// when the configurations are not isomorphic.
pub fn are_isomorphic(
    v: &LineConfiguration,
    w: &LineConfiguration,
) -> Option<ConfigurationMorphism> {
    find_isomorphism(&Structure::from_config(v), &Structure::from_config(w), &[])
        .map(|map| ConfigurationMorphism { map })
}

/// A vertex bijection `g -> h` preserving adjacency both ways.
pub fn graph_isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    if g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges() {
        return None;
    }
    find_isomorphism(&Structure::from_graph(g), &Structure::from_graph(h), &[])
}

/// Automorphism group data from a stabilizer chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismGroup {
    pub order: u128,
    pub base: Vec<usize>,
    /// `orbit_sizes[k]` is the orbit of `base[k]` under the pointwise
    /// stabilizer of `base[..k]`.
    pub orbit_sizes: Vec<usize>,
    pub generators: Vec<Vec<usize>>,
}

impl AutomorphismGroup {
    /// Orbits of the point set under the generated group.
    pub fn orbits(&self, n: usize) -> Vec<Vec<usize>> {
        orbits_under(n, &self.generators.iter().collect::<Vec<_>>())
    }
}

fn orbits_under(n: usize, gens: &[&Vec<usize>]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(n);
    for g in gens {
        for (x, &y) in g.iter().enumerate() {
            uf.union(x, y);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        groups[uf.find(x)].push(x);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// Computes |Aut(C)| as the product of basic orbit lengths. At each level
/// the base point is the first vertex of the smallest non-singleton cell
/// of the refined partition; a candidate image is tested only when the
/// automorphisms already found do not reach it (orbit pruning).
pub fn automorphism_group(c: &LineConfiguration) -> AutomorphismGroup {
    structure_automorphisms(&Structure::from_config(c))
}

pub fn automorphism_group_order(c: &LineConfiguration) -> u128 {
    automorphism_group(c).order
}

pub(crate) fn structure_automorphisms(s: &Structure) -> AutomorphismGroup {
    let n = s.n;
    let mut base: Vec<usize> = Vec::new();
    let mut orbit_sizes = Vec::new();
    let mut generators: Vec<Vec<usize>> = Vec::new();
    let mut order: u128 = 1;
    loop {
        let mut colors = vec![0u32; n];
        for &b in &base {
            individualize(&mut colors, &[b]);
        }
        let k = s.refine(&mut colors);
        let mut sizes = vec![0usize; k];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let Some(cell) = (0..k)
            .filter(|&c| sizes[c] > 1)
            .min_by_key(|&c| (sizes[c], c))
        else {
            break;
        };
        let cell_members: Vec<usize> = (0..n).filter(|&v| colors[v] as usize == cell).collect();
        let b = cell_members[0];
        let fixes_base = |g: &Vec<usize>| base.iter().all(|&x| g[x] == x);
        let mut orbit = orbit_of(b, n, generators.iter().filter(|g| fixes_base(g)));
        for &cand in &cell_members[1..] {
            if orbit.contains(&cand) {
                continue;
            }
            let mut fixed: Vec<(usize, usize)> = base.iter().map(|&x| (x, x)).collect();
            fixed.push((b, cand));
            if let Some(g) = find_isomorphism(s, s, &fixed) {
                generators.push(g);
                orbit = orbit_of(b, n, generators.iter().filter(|g| fixes_base(g)));
            }
        }
        order *= orbit.len() as u128;
        orbit_sizes.push(orbit.len());
        base.push(b);
    }
    AutomorphismGroup {
        order,
        base,
        orbit_sizes,
        generators,
    }
}

fn orbit_of<'g>(
    start: usize,
    n: usize,
    gens: impl Iterator<Item = &'g Vec<usize>>,
) -> HashSet<usize> {
    let gens: Vec<&Vec<usize>> = gens.collect();
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    let mut out = HashSet::from([start]);
    while let Some(x) = stack.pop() {
        for g in &gens {
            let y = g[x];
            if !seen[y] {
                seen[y] = true;
                out.insert(y);
                stack.push(y);
            }
        }
    }
    out
}

/// Whether the automorphism group is transitive on points.
pub fn homogeneity_check(c: &LineConfiguration) -> bool {
    let n = c.num_points();
    if n <= 1 {
        return true;
    }
    let s = Structure::from_config(c);
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut orbit = HashSet::from([0usize]);
    for target in 1..n {
        if orbit.contains(&target) {
            continue;
        }
        match find_isomorphism(&s, &s, &[(0, target)]) {
            Some(g) => {
                gens.push(g);
                orbit = orbit_of(0, n, gens.iter());
            }
            None => return false,
        }
    }
    true
}

/// Canonical relabeling of a configuration: isomorphic configurations get
/// identical certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// `labeling[v]` is the canonical position of point `v`.
    pub labeling: Vec<usize>,
    /// Relabeled lines, sorted.
    pub certificate: Vec<Vec<u32>>,
    pub leaves: u64,
}

pub fn canonical_form(c: &LineConfiguration) -> CanonicalForm {
    canonical_structure(&Structure::from_config(c))
}

pub(crate) fn canonical_lines(n: usize, lines: &[[usize; 3]]) -> CanonicalForm {
    canonical_structure(&Structure::from_lines(n, lines))
}

struct CanonSearch<'s> {
    s: &'s Structure,
    best: Option<Leaf>,
    first: Option<Leaf>,
    autos: Vec<Vec<usize>>,
    leaves: u64,
}

struct Leaf {
    cert: Vec<u32>,
    labeling: Vec<u32>,
    path: Vec<usize>,
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl CanonSearch<'_> {
    /// Relabeled edges, sorted and concatenated.
    fn certificate(&self, lab: &[u32]) -> Vec<u32> {
        let mut edges: Vec<Vec<u32>> = self
            .s
            .edges
            .iter()
            .map(|e| {
                let mut img: Vec<u32> = e.iter().map(|&x| lab[x as usize]).collect();
                img.sort_unstable();
                img
            })
            .collect();
        edges.sort_unstable();
        edges.concat()
    }

    fn record_auto(&mut self, from: &[u32], to: &[u32]) {
        // from and to give the same certificate: to^{-1} ∘ from is an automorphism
        let n = self.s.n;
        let mut inv = vec![0usize; n];
        for (v, &l) in to.iter().enumerate() {
            inv[l as usize] = v;
        }
        let g: Vec<usize> = from.iter().map(|&l| inv[l as usize]).collect();
        if g.iter().enumerate().any(|(i, &x)| i != x) {
            self.autos.push(g);
        }
    }

    /// Handles a leaf. Returns the depth to resume at when the leaf is
    /// equivalent to an earlier one: the subtree below the divergence point
    /// is then an automorphic image of one already searched.
    fn leaf(&mut self, colors: Vec<u32>, prefix: &[usize]) -> Option<usize> {
        self.leaves += 1;
        let cert = self.certificate(&colors);
        let Some(first) = &self.first else {
            self.first = Some(Leaf {
                cert: cert.clone(),
                labeling: colors.clone(),
                path: prefix.to_vec(),
            });
            self.best = Some(Leaf {
                cert,
                labeling: colors,
                path: prefix.to_vec(),
            });
            return None;
        };
        if first.cert == cert {
            let (lab, jump) = (first.labeling.clone(), common_prefix(prefix, &first.path));
            self.record_auto(&colors, &lab);
            return Some(jump);
        }
        let best = self.best.as_ref().expect("set with first");
        if best.cert == cert {
            let (lab, jump) = (best.labeling.clone(), common_prefix(prefix, &best.path));
            self.record_auto(&colors, &lab);
            return Some(jump);
        }
        if cert < best.cert {
            self.best = Some(Leaf {
                cert,
                labeling: colors,
                path: prefix.to_vec(),
            });
        }
        None
    }

    fn dfs(&mut self, mut colors: Vec<u32>, prefix: &mut Vec<usize>) -> Option<usize> {
        let n = self.s.n;
        let k = self.s.refine(&mut colors);
        let mut sizes = vec![0usize; k];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let Some(cell) = (0..k)
            .filter(|&c| sizes[c] > 1)
            .min_by_key(|&c| (sizes[c], c))
        else {
            return self.leaf(colors, prefix);
        };
        let depth = prefix.len();
        let members: Vec<usize> = (0..n).filter(|&v| colors[v] as usize == cell).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &members {
            if !explored.is_empty() {
                let gens: Vec<&Vec<usize>> = self
                    .autos
                    .iter()
                    .filter(|g| prefix.iter().all(|&x| g[x] == x))
                    .collect();
                let orbit = orbit_of(v, n, gens.into_iter());
                if explored.iter().any(|u| orbit.contains(u)) {
                    continue;
                }
            }
            explored.push(v);
            let mut next = colors.clone();
            individualize(&mut next, &[v]);
            prefix.push(v);
            let jump = self.dfs(next, prefix);
            prefix.pop();
            if let Some(level) = jump {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }
}

pub(crate) fn canonical_structure(s: &Structure) -> CanonicalForm {
    let mut search = CanonSearch {
        s,
        best: None,
        first: None,
        autos: Vec::new(),
        leaves: 0,
    };
    search.dfs(vec![0u32; s.n], &mut Vec::new());
    let (flat, lab) = search
        .best
        .map(|b| (b.cert, b.labeling))
        .unwrap_or_default();
    let width = s.edges.first().map_or(1, Vec::len).max(1);
    let certificate = flat.chunks(width).map(<[u32]>::to_vec).collect();
    CanonicalForm {
        labeling: lab.into_iter().map(|x| x as usize).collect(),
        certificate,
        leaves: search.leaves,
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::is_morphism;

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

    /// Brute-force automorphism count over all 7! permutations.
    #[test]
    fn fano_order_matches_brute_force() {
        let f = fano();
        let mut perm: Vec<usize> = (0..7).collect();
        let mut count = 0u32;
        permute(&mut perm, 0, &mut |p| {
            if is_morphism(p, &f, &f).unwrap() {
                count += 1;
            }
        });
        assert_eq!(count, 168);
        assert_eq!(automorphism_group_order(&f), 168);
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn single_line_order() {
        let l = LineConfiguration::unlabeled(3, vec![[0, 1, 2]]).unwrap();
        assert_eq!(automorphism_group_order(&l), 6);
        assert_eq!(
            automorphism_group_order(&LineConfiguration::isolated_points(4)),
            24
        );
    }

    #[test]
    fn permuted_fano_isomorphic() {
        let f = fano();
        let g = f.relabel(&[3, 6, 0, 2, 5, 1, 4]).unwrap();
        let m = are_isomorphic(&f, &g).expect("witness");
        assert!(is_morphism(&m.map, &f, &g).unwrap());
        assert!(are_isomorphic(&f, &LineConfiguration::isolated_points(7)).is_none());
    }

    #[test]
    fn canonical_forms_agree_on_relabeling() {
        let f = fano();
        let g = f.relabel(&[6, 5, 4, 3, 2, 1, 0]).unwrap();
        assert_eq!(
            canonical_form(&f).certificate,
            canonical_form(&g).certificate
        );
        let path = LineConfiguration::unlabeled(5, vec![[0, 1, 2], [2, 3, 4]]).unwrap();
        let twisted = LineConfiguration::unlabeled(5, vec![[0, 3, 4], [1, 2, 4]]).unwrap();
        assert_eq!(
            canonical_form(&path).certificate,
            canonical_form(&twisted).certificate
        );
        assert_ne!(
            canonical_form(&path).certificate,
            canonical_form(&f).certificate
        );
    }

    #[test]
    fn canonical_form_of_large_symmetric_star() {
        // 27 lines through one point and 64 isolated points
        let lines: Vec<[usize; 3]> = (0..27).map(|i| [0, 2 * i + 1, 2 * i + 2]).collect();
        let star = LineConfiguration::unlabeled(119, lines).unwrap();
        let perm: Vec<usize> = (0..119).map(|i| (i * 50 + 7) % 119).collect();
        let moved = star.relabel(&perm).unwrap();
        let (a, b) = (canonical_form(&star), canonical_form(&moved));
        assert_eq!(a.certificate, b.certificate);
        assert!(a.leaves < 1000, "{} leaves", a.leaves);
    }

    #[test]
    fn homogeneity() {
        assert!(homogeneity_check(&fano()));
        let mixed = LineConfiguration::unlabeled(4, vec![[0, 1, 2]]).unwrap();
        assert!(!homogeneity_check(&mixed));
    }

    #[test]
    fn graph_iso_cycles() {
        let c5 = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5)));
        let star = Graph::new(5, [(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]);
        let m = graph_isomorphism(&c5, &star).unwrap();
        for (a, b) in c5.edges() {
            assert!(star.has_edge(m[a], m[b]));
        }
        let path = Graph::new(5, (0..4).map(|i| (i, i + 1)));
        assert!(graph_isomorphism(&c5, &path).is_none());
    }
}
