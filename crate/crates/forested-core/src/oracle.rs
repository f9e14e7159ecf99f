//! Brute-force enumeration of small rooted p-valent planar maps, with their
//! spanning forests, Tutte polynomials and tour-order activities.
//!
//! Darts are `0..2E`. Raw enumeration fixes `alpha(d) = d ^ 1` and searches
//! over vertex rotations `sigma` only. Maps are compared through a canonical
//! relabeling that starts at the root dart, which is a complete invariant
//! because rooted maps have no symmetries.
//!
//! Chirality: `sigma` is read as the counterclockwise rotation, and the tour
//! of a spanning tree turns with `sigma`.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ExactRational, Ring, UPolynomial};

/// Largest number of raw rotation systems searched without an explicit
/// override.
pub const DEFAULT_SCALE_LIMIT: u128 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CombMap {
    pub n_darts: usize,
    pub sigma: Vec<usize>,
    pub alpha: Vec<usize>,
    pub root_dart: usize,
}

fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut d = s;
        while !seen[d] {
            seen[d] = true;
            c.push(d);
            d = perm[d];
        }
        out.push(c);
    }
    out
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Underlying multigraph of a map.
#[derive(Clone, Debug)]
pub struct MapGraph {
    pub n_vertices: usize,
    /// Endpoints of each edge.
    pub edges: Vec<(usize, usize)>,
    /// Vertex of each dart.
    pub vertex_of: Vec<usize>,
    /// Edge of each dart.
    pub edge_of: Vec<usize>,
}

impl CombMap {
    pub fn new(sigma: Vec<usize>, alpha: Vec<usize>, root_dart: usize) -> Result<Self> {
        let n = sigma.len();
        let m = CombMap { n_darts: n, sigma, alpha, root_dart };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_darts;
        if n % 2 != 0 || self.sigma.len() != n || self.alpha.len() != n || self.root_dart >= n {
            return Err(Error::Invalid("inconsistent dart counts".into()));
        }
        let is_perm = |p: &[usize]| {
            let mut s = vec![false; n];
            p.iter().all(|&x| x < n && !std::mem::replace(&mut s[x], true))
        };
        if !is_perm(&self.sigma) || !is_perm(&self.alpha) {
            return Err(Error::Invalid("sigma and alpha must be permutations".into()));
        }
        if (0..n).any(|d| self.alpha[d] == d || self.alpha[self.alpha[d]] != d) {
            return Err(Error::Invalid("alpha must be a fixed-point-free involution".into()));
        }
        if !self.is_connected() {
            return Err(Error::Invalid("map is not connected".into()));
        }
        if self.genus() != 0 {
            return Err(Error::Invalid("map is not planar".into()));
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        let mut u = Dsu::new(self.n_darts);
        for d in 0..self.n_darts {
            u.union(d, self.sigma[d]);
            u.union(d, self.alpha[d]);
        }
        (0..self.n_darts).all(|d| u.find(d) == u.find(0))
    }

    pub fn n_vertices(&self) -> usize {
        cycles(&self.sigma).len()
    }
    pub fn n_edges(&self) -> usize {
        self.n_darts / 2
    }
    pub fn face_perm(&self) -> Vec<usize> {
        (0..self.n_darts).map(|d| self.sigma[self.alpha[d]]).collect()
    }
    pub fn n_faces(&self) -> usize {
        cycles(&self.face_perm()).len()
    }
    pub fn genus(&self) -> i64 {
        let chi = self.n_vertices() as i64 - self.n_edges() as i64 + self.n_faces() as i64;
        (2 - chi) / 2
    }

    /// Relabel darts in order of discovery by a breadth-first traversal from
    /// the root, following `sigma` before `alpha`.
    pub fn canonical(&self) -> CombMap {
        let n = self.n_darts;
        let mut label = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        label[self.root_dart] = 0;
        order.push(self.root_dart);
        queue.push_back(self.root_dart);
        while let Some(d) = queue.pop_front() {
            for next in [self.sigma[d], self.alpha[d]] {
                if label[next] == usize::MAX {
                    label[next] = order.len();
                    order.push(next);
                    queue.push_back(next);
                }
            }
        }
        let sigma = order.iter().map(|&d| label[self.sigma[d]]).collect();
        let alpha = order.iter().map(|&d| label[self.alpha[d]]).collect();
        CombMap { n_darts: n, sigma, alpha, root_dart: 0 }
    }

    pub fn graph(&self) -> MapGraph {
        let mut vertex_of = vec![0; self.n_darts];
        let vs = cycles(&self.sigma);
        for (i, c) in vs.iter().enumerate() {
            for &d in c {
                vertex_of[d] = i;
            }
        }
        let mut edge_of = vec![usize::MAX; self.n_darts];
        let mut edges = Vec::new();
        for d in 0..self.n_darts {
            if edge_of[d] == usize::MAX {
                let a = self.alpha[d];
                edge_of[d] = edges.len();
                edge_of[a] = edges.len();
                edges.push((vertex_of[d], vertex_of[a]));
            }
        }
        MapGraph { n_vertices: vs.len(), edges, vertex_of, edge_of }
    }

    pub fn root_edge(&self) -> usize {
        self.graph().edge_of[self.root_dart]
    }
}

impl MapGraph {
    /// Components of the spanning subgraph with edge set `mask`, or `None`
    /// if it contains a cycle.
    fn forest_components(&self, mask: u64) -> Option<usize> {
        let mut u = Dsu::new(self.n_vertices);
        let mut comps = self.n_vertices;
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if !u.union(a, b) {
                    return None;
                }
                comps -= 1;
            }
        }
        Some(comps)
    }

    fn components(&self, mask: u64) -> usize {
        let mut u = Dsu::new(self.n_vertices);
        let mut comps = self.n_vertices;
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if mask >> i & 1 == 1 && u.union(a, b) {
                comps -= 1;
            }
        }
        comps
    }

    fn check_size(&self) -> Result<()> {
        if self.edges.len() > 24 {
            return Err(Error::ScaleGuard { estimate: 1u128 << self.edges.len(), limit: 1 << 24 });
        }
        Ok(())
    }
}

fn upoly(counts: &[i64]) -> UPolynomial {
    UPolynomial::from_coeffs(counts.iter().map(|&c| ExactRational::from(c)).collect())
}

/// `Σ_F u^{c(F)-1}` over spanning forests `F`.
pub fn forest_poly(m: &CombMap) -> Result<UPolynomial> {
    forest_poly_filtered(m, false)
}

fn forest_poly_filtered(m: &CombMap, exclude_root: bool) -> Result<UPolynomial> {
    let g = m.graph();
    g.check_size()?;
    let root = g.edge_of[m.root_dart];
    let mut counts = vec![0i64; g.n_vertices];
    for mask in 0u64..1 << g.edges.len() {
        if exclude_root && mask >> root & 1 == 1 {
            continue;
        }
        if let Some(c) = g.forest_components(mask) {
            counts[c - 1] += 1;
        }
    }
    Ok(upoly(&counts))
}

/// Integer polynomial in `(μ, ν)`; `coeffs[i][j]` multiplies `μ^i ν^j`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct TuttePoly {
    pub coeffs: Vec<Vec<i64>>,
}

impl TuttePoly {
    fn add(&mut self, i: usize, j: usize, c: i64) {
        if self.coeffs.len() <= i {
            self.coeffs.resize(i + 1, Vec::new());
        }
        if self.coeffs[i].len() <= j {
            self.coeffs[i].resize(j + 1, 0);
        }
        self.coeffs[i][j] += c;
    }

    fn trim(mut self) -> Self {
        for row in &mut self.coeffs {
            while row.last() == Some(&0) {
                row.pop();
            }
        }
        while self.coeffs.last().is_some_and(|r| r.is_empty()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.coeffs.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0)
    }

    /// `T(μ, 1)` as a polynomial in `μ`.
    pub fn at_nu_one(&self) -> UPolynomial {
        let counts: Vec<i64> = self.coeffs.iter().map(|r| r.iter().sum()).collect();
        upoly(&counts)
    }

    pub fn pretty(&self) -> String {
        let mut terms = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate().rev() {
            for (j, &c) in row.iter().enumerate().rev() {
                if c == 0 {
                    continue;
                }
                let mono = match (i, j) {
                    (0, 0) => String::new(),
                    _ => {
                        let f = |v: &str, e: usize| match e {
                            0 => String::new(),
                            1 => v.to_string(),
                            _ => format!("{v}^{e}"),
                        };
                        [f("μ", i), f("ν", j)].iter().filter(|s| !s.is_empty()).cloned().collect::<Vec<_>>().join("·")
                    }
                };
                terms.push(match (c, mono.is_empty()) {
                    (_, true) => c.to_string(),
                    (1, false) => mono,
                    _ => format!("{c}·{mono}"),
                });
            }
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Subset expansion `Σ_S (μ-1)^{c(S)-c(G)} (ν-1)^{|S|+c(S)-v}`.
pub fn tutte_poly(m: &CombMap) -> Result<TuttePoly> {
    let g = m.graph();
    g.check_size()?;
    let c_g = g.components(u64::MAX);
    let mut t = TuttePoly::default();
    for mask in 0u64..1 << g.edges.len() {
        let c = g.components(mask);
        let a = c - c_g;
        let b = mask.count_ones() as usize + c - g.n_vertices;
        // expand (μ-1)^a (ν-1)^b
        for i in 0..=a {
            for j in 0..=b {
                let sign = if (a - i + b - j) % 2 == 0 { 1 } else { -1 };
                t.add(i, j, sign * binom(a, i) * binom(b, j));
            }
        }
    }
    Ok(t.trim())
}

/// Edge order of the tour around the spanning tree `tree` (an edge mask).
pub fn tour_order(m: &CombMap, tree: u64) -> Vec<usize> {
    let g = m.graph();
    let mut seen = vec![false; g.edges.len()];
    let mut order = Vec::with_capacity(g.edges.len());
    let mut h = m.root_dart;
    for _ in 0..m.n_darts {
        let e = g.edge_of[h];
        if !seen[e] {
            seen[e] = true;
            order.push(e);
        }
        h = if tree >> e & 1 == 1 { m.sigma[m.alpha[h]] } else { m.sigma[h] };
    }
    order
}

/// Internal and external activities of a spanning tree under the tour
/// order.
pub fn bernardi_activities(m: &CombMap, tree: u64) -> Result<(usize, usize)> {
    let g = m.graph();
    g.check_size()?;
    let ne = g.edges.len();
    if tree >> ne != 0 || g.forest_components(tree) != Some(1) {
        return Err(Error::Invalid("edge set is not a spanning tree".into()));
    }
    let order = tour_order(m, tree);
    let mut rank = vec![0; ne];
    for (i, &e) in order.iter().enumerate() {
        rank[e] = i;
    }
    let in_tree = |e: usize| tree >> e & 1 == 1;
    let (mut internal, mut external) = (0, 0);
    for e in 0..ne {
        if in_tree(e) {
            // fundamental cocycle: edges joining the two sides of T - e
            let mut u = Dsu::new(g.n_vertices);
            for f in (0..ne).filter(|&f| in_tree(f) && f != e) {
                u.union(g.edges[f].0, g.edges[f].1);
            }
            let side = u.find(g.edges[e].0);
            let cut_min = (0..ne)
                .filter(|&f| {
                    let (a, b) = g.edges[f];
                    (u.find(a) == side) != (u.find(b) == side)
                })
                .min_by_key(|&f| rank[f]);
            if cut_min == Some(e) {
                internal += 1;
            }
        } else {
            // fundamental cycle: e plus the tree path between its ends
            let path = tree_path(&g, tree, g.edges[e].0, g.edges[e].1);
            if path.iter().all(|&f| rank[f] > rank[e]) {
                external += 1;
            }
        }
    }
    Ok((internal, external))
}

fn tree_path(g: &MapGraph, tree: u64, from: usize, to: usize) -> Vec<usize> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.n_vertices];
    let mut seen = vec![false; g.n_vertices];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        for (e, &(a, b)) in g.edges.iter().enumerate() {
            if tree >> e & 1 == 0 {
                continue;
            }
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while let Some((p, e)) = prev[v] {
        path.push(e);
        v = p;
    }
    path
}

/// All spanning trees as edge masks.
pub fn spanning_trees(m: &CombMap) -> Result<Vec<u64>> {
    let g = m.graph();
    g.check_size()?;
    Ok((0u64..1 << g.edges.len()).filter(|&mask| g.forest_components(mask) == Some(1)).collect())
}

/// `Σ_T μ^{int} ν^{ext}` over spanning trees.
pub fn activity_poly(m: &CombMap) -> Result<TuttePoly> {
    let mut t = TuttePoly::default();
    for tree in spanning_trees(m)? {
        let (i, e) = bernardi_activities(m, tree)?;
        t.add(i, e, 1);
    }
    Ok(t.trim())
}

/// Number of vertices forced by Euler's formula, if feasible.
pub fn vertex_count(p: usize, n_faces: usize) -> Option<usize> {
    if p < 3 || n_faces < 2 {
        return None;
    }
    let num = 2 * (n_faces - 2);
    if num == 0 || num % (p - 2) != 0 {
        return None;
    }
    let v = num / (p - 2);
    if (v * p) % 2 != 0 {
        return None;
    }
    Some(v)
}

/// Number of raw rotation systems, `(pv)!/(p^v v!)`.
pub fn raw_count(p: usize, v: usize) -> u128 {
    let mut r: u128 = 1;
    for k in 1..=(p * v) as u128 {
        r = r.saturating_mul(k);
    }
    for k in 1..=v as u128 {
        r /= (p as u128) * k;
    }
    r
}

/// One representative per rooted map with `n_faces` faces, all vertices of
/// degree `p`, in canonical form and sorted.
pub fn enumerate_maps(p: usize, n_faces: usize) -> Result<Vec<CombMap>> {
    enumerate_maps_with_limit(p, n_faces, DEFAULT_SCALE_LIMIT)
}

pub fn enumerate_maps_with_limit(p: usize, n_faces: usize, limit: u128) -> Result<Vec<CombMap>> {
    let Some(v) = vertex_count(p, n_faces) else { return Ok(Vec::new()) };
    let estimate = raw_count(p, v);
    if estimate > limit {
        return Err(Error::ScaleGuard { estimate, limit });
    }
    let n = p * v;
    let alpha: Vec<usize> = (0..n).map(|d| d ^ 1).collect();
    let mut found = BTreeSet::new();
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];
    search(p, &mut sigma, &mut used, &mut |s: &[usize]| {
        let m = CombMap { n_darts: n, sigma: s.to_vec(), alpha: alpha.clone(), root_dart: 0 };
        if m.n_faces() == n_faces && m.is_connected() && m.genus() == 0 {
            found.insert(m.canonical());
        }
    });
    Ok(found.into_iter().collect())
}

/// Fill `sigma` with disjoint p-cycles; the smallest free dart opens each
/// cycle so every rotation system is produced once.
fn search(p: usize, sigma: &mut Vec<usize>, used: &mut Vec<bool>, visit: &mut dyn FnMut(&[usize])) {
    let Some(first) = used.iter().position(|&u| !u) else {
        visit(sigma);
        return;
    };
    used[first] = true;
    let mut cyc = vec![first];
    extend_cycle(p, &mut cyc, sigma, used, visit);
    used[first] = false;
}

fn extend_cycle(p: usize, cyc: &mut Vec<usize>, sigma: &mut Vec<usize>, used: &mut Vec<bool>, visit: &mut dyn FnMut(&[usize])) {
    if cyc.len() == p {
        for i in 0..p {
            sigma[cyc[i]] = cyc[(i + 1) % p];
        }
        search(p, sigma, used, visit);
        return;
    }
    for d in 0..used.len() {
        if !used[d] {
            used[d] = true;
            cyc.push(d);
            extend_cycle(p, cyc, sigma, used, visit);
            cyc.pop();
            used[d] = false;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVariant {
    AllForests,
    TreeRootedActivity,
    RootEdgeOutside,
}

impl std::str::FromStr for OracleVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_forests" | "all-forests" => Ok(OracleVariant::AllForests),
            "tree_rooted_activity" | "tree-rooted-activity" => Ok(OracleVariant::TreeRootedActivity),
            "root_edge_outside" | "root-edge-outside" => Ok(OracleVariant::RootEdgeOutside),
            _ => Err(Error::Parse(format!("unknown oracle variant {s:?}"))),
        }
    }
}

/// `[z^n]` of the forest generating function, computed by enumeration.
pub fn oracle_f(p: usize, n_faces: usize, variant: OracleVariant) -> Result<UPolynomial> {
    let maps = enumerate_maps(p, n_faces)?;
    oracle_sum(&maps, variant)
}

pub fn oracle_sum(maps: &[CombMap], variant: OracleVariant) -> Result<UPolynomial> {
    let mut total = UPolynomial::zero();
    for m in maps {
        let part = match variant {
            OracleVariant::AllForests => forest_poly(m)?,
            // Σ μ^int with μ = u + 1
            OracleVariant::TreeRootedActivity => activity_poly(m)?.at_nu_one().shift(&ExactRational::one()),
            OracleVariant::RootEdgeOutside => forest_poly_filtered(m, true)?,
        };
        total = total.plus(&part);
    }
    Ok(total)
}

/// JSON records of the enumerated maps.
pub fn dump_maps(maps: &[CombMap]) -> String {
    serde_json::to_string_pretty(maps).unwrap_or_else(|_| "[]".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> CombMap {
        CombMap::new(vec![0, 1], vec![1, 0], 0).unwrap()
    }
    fn single_loop() -> CombMap {
        CombMap::new(vec![1, 0], vec![1, 0], 0).unwrap()
    }
    fn theta() -> CombMap {
        // two vertices (0 2 4) and (1 5 3), edges {0,1} {2,3} {4,5}
        CombMap::new(vec![2, 5, 4, 1, 0, 3], vec![1, 0, 3, 2, 5, 4], 0).unwrap()
    }

    fn poly(cs: &[i64]) -> UPolynomial {
        UPolynomial::from_ints(cs)
    }

    #[test]
    fn small_forest_polys() {
        assert_eq!(forest_poly(&single_edge()).unwrap(), poly(&[1, 1]));
        assert_eq!(forest_poly(&single_loop()).unwrap(), poly(&[1]));
        assert_eq!(forest_poly(&theta()).unwrap(), poly(&[3, 1]));
        assert_eq!(theta().n_faces(), 3);
    }

    #[test]
    fn small_tutte_polys() {
        assert_eq!(tutte_poly(&single_edge()).unwrap().pretty(), "μ");
        assert_eq!(tutte_poly(&single_loop()).unwrap().pretty(), "ν");
        let t = tutte_poly(&theta()).unwrap();
        assert_eq!((t.get(1, 0), t.get(0, 1), t.get(0, 2)), (1, 1, 1));
        assert_eq!(activity_poly(&theta()).unwrap(), t);
    }

    #[test]
    fn small_activities() {
        assert_eq!(bernardi_activities(&single_edge(), 1).unwrap(), (1, 0));
        assert_eq!(bernardi_activities(&single_loop(), 0).unwrap(), (0, 1));
        assert!(bernardi_activities(&theta(), 0b011).is_err());
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(CombMap::new(vec![0, 1], vec![0, 1], 0).is_err());
        assert!(CombMap::new(vec![1, 0, 3, 2], vec![1, 0, 3, 2], 0).is_err());
    }

    #[test]
    fn euler_feasibility() {
        assert!(enumerate_maps(3, 2).unwrap().is_empty());
        assert_eq!(vertex_count(3, 3), Some(2));
        assert_eq!(vertex_count(4, 3), Some(1));
        assert_eq!(vertex_count(3, 2), None);
    }

    #[test]
    fn cubic_three_faces() {
        let maps = enumerate_maps(3, 3).unwrap();
        assert_eq!(oracle_sum(&maps, OracleVariant::AllForests).unwrap(), poly(&[6, 4]));
        assert_eq!(oracle_sum(&maps, OracleVariant::TreeRootedActivity).unwrap(), poly(&[6, 4]));
        let forested: usize = maps.iter().map(|m| forest_poly(m).unwrap().eval(&ExactRational::one()).to_f64() as usize).sum();
        assert_eq!(forested, 10);
    }

    #[test]
    fn scale_guard() {
        assert!(matches!(enumerate_maps_with_limit(3, 5, 1000), Err(Error::ScaleGuard { .. })));
    }
}
