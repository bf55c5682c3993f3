//! Implicit finite transitive graphs with O(1) neighbor access and canonical
//! edge identifiers.
//!
//! The built-in families (torus, Hamming cube, complete graph) never
//! materialize adjacency lists: neighbors and edge ids are computed
//! arithmetically from the vertex numbering, so a graph value is a handful of
//! integers no matter how large `n` is. Explicit graphs loaded from an edge
//! list keep a CSR adjacency and are the only family that allocates.

use std::fmt;
use std::path::Path;

use crate::Error;

/// Hard cap on vertex counts so index arithmetic stays comfortably in `u64`
/// and per-vertex scratch arrays stay addressable.
const MAX_VERTICES: u64 = 1 << 40;

/// Which built-in family a graph belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// D-dimensional torus with `side` vertices per axis (cycle when D = 1).
    Torus { side: u64, dim: u32 },
    /// Hypercube {0,1}^dim with bit-flip adjacency.
    Hamming { dim: u32 },
    /// Complete graph on `n` vertices.
    Complete { n: u64 },
    /// Graph loaded from an explicit edge list.
    Explicit,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Torus { side, dim } => write!(f, "torus({side},{dim})"),
            Family::Hamming { dim } => write!(f, "hamming({dim})"),
            Family::Complete { n } => write!(f, "complete({n})"),
            Family::Explicit => write!(f, "explicit"),
        }
    }
}

/// Canonical identifier of an undirected edge; a bijection onto `[0, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u64);

#[derive(Debug, Clone)]
struct ExplicitData {
    offsets: Vec<usize>,
    neighbors: Vec<u64>,
    edge_ids: Vec<u64>,
    /// Edges sorted lexicographically as (u, v) with u < v; index = edge id.
    edges: Vec<(u64, u64)>,
}

/// A finite graph with a fixed vertex numbering `0..n`.
///
/// Built-in families are vertex-transitive and regular by construction.
/// Explicit graphs are validated for regularity at load time; irregular ones
/// are accepted with `regular = false` so that tiny oracle fixtures (paths,
/// stars) can be used, but estimators that rely on transitivity refuse them
/// unless [`TransitiveGraph::with_irregular_ok`] was called.
#[derive(Debug, Clone)]
pub struct TransitiveGraph {
    family: Family,
    n: u64,
    degree: u64,
    edge_count: u64,
    regular: bool,
    irregular_ok: bool,
    explicit: Option<ExplicitData>,
}

impl TransitiveGraph {
    /// D-dimensional torus with `side` vertices per axis.
    ///
    /// Vertices are mixed-radix encodings of coordinate vectors. `side = 2`
    /// collapses the +/- directions onto the same neighbor, so the degree is
    /// `dim` rather than `2 * dim`; `side = 1` is the one-vertex graph.
    pub fn torus(side: u64, dim: u32) -> Result<Self, Error> {
        if side < 1 || dim < 1 {
            return Err(Error::Usage("torus requires side >= 1 and dim >= 1".into()));
        }
        let mut n: u64 = 1;
        for _ in 0..dim {
            n = n
                .checked_mul(side)
                .filter(|&v| v <= MAX_VERTICES)
                .ok_or_else(|| Error::Usage(format!("torus({side},{dim}) is too large")))?;
        }
        let degree = match side {
            1 => 0,
            2 => dim as u64,
            _ => 2 * dim as u64,
        };
        Ok(Self {
            family: Family::Torus { side, dim },
            n,
            degree,
            edge_count: n * degree / 2,
            regular: true,
            irregular_ok: false,
            explicit: None,
        })
    }

    /// Hypercube on bitmasks of `dim` bits; neighbors differ in one bit.
    pub fn hamming(dim: u32) -> Result<Self, Error> {
        if dim < 1 || dim > 40 {
            return Err(Error::Usage("hamming requires 1 <= dim <= 40".into()));
        }
        let n = 1u64 << dim;
        Ok(Self {
            family: Family::Hamming { dim },
            n,
            degree: dim as u64,
            edge_count: n * dim as u64 / 2,
            regular: true,
            irregular_ok: false,
            explicit: None,
        })
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: u64) -> Result<Self, Error> {
        if n < 1 || n > MAX_VERTICES {
            return Err(Error::Usage(format!("complete graph size {n} out of range")));
        }
        Ok(Self {
            family: Family::Complete { n },
            n,
            degree: n - 1,
            edge_count: n * (n - 1) / 2,
            regular: true,
            irregular_ok: false,
            explicit: None,
        })
    }

    /// Builds an explicit graph from an edge list over vertices `0..n`.
    ///
    /// Rejects self-loops, duplicate edges and out-of-range endpoints.
    /// Irregular graphs are accepted; `regular()` reports the outcome.
    pub fn from_edge_list(n: u64, edges: &[(u64, u64)]) -> Result<Self, Error> {
        if n < 1 || n > MAX_VERTICES {
            return Err(Error::Usage(format!("vertex count {n} out of range")));
        }
        let mut sorted: Vec<(u64, u64)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::Usage(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Usage(format!("edge ({u},{v}) out of range for n={n}")));
            }
            sorted.push((u.min(v), u.max(v)));
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Usage(format!("duplicate edge ({},{})", w[0].0, w[0].1)));
        }

        let nu = n as usize;
        let mut deg = vec![0usize; nu];
        for &(u, v) in &sorted {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = vec![0usize; nu + 1];
        for v in 0..nu {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u64; sorted.len() * 2];
        let mut edge_ids = vec![0u64; sorted.len() * 2];
        for (id, &(u, v)) in sorted.iter().enumerate() {
            neighbors[cursor[u as usize]] = v;
            edge_ids[cursor[u as usize]] = id as u64;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            edge_ids[cursor[v as usize]] = id as u64;
            cursor[v as usize] += 1;
        }
        // Adjacency within a vertex is already ascending because edges were
        // sorted lexicographically, except for the "v side" entries; sort
        // each row to get a canonical neighbor order.
        for v in 0..nu {
            let range = offsets[v]..offsets[v + 1];
            let mut row: Vec<(u64, u64)> = neighbors[range.clone()]
                .iter()
                .zip(&edge_ids[range.clone()])
                .map(|(&a, &b)| (a, b))
                .collect();
            row.sort_unstable();
            for (i, (nb, eid)) in row.into_iter().enumerate() {
                neighbors[offsets[v] + i] = nb;
                edge_ids[offsets[v] + i] = eid;
            }
        }

        let max_deg = deg.iter().copied().max().unwrap_or(0);
        let regular = deg.iter().all(|&d| d == max_deg);
        Ok(Self {
            family: Family::Explicit,
            n,
            degree: max_deg as u64,
            edge_count: sorted.len() as u64,
            regular,
            irregular_ok: false,
            explicit: Some(ExplicitData {
                offsets,
                neighbors,
                edge_ids,
                edges: sorted,
            }),
        })
    }

    /// Loads an explicit graph from a text file: first line `n m`, then `m`
    /// lines `u v` with `0 <= u < v < n`.
    pub fn from_edge_file<P: AsRef<Path>>(path: P) -> Result<Self, Error> {
        let (n, edges) = parse_edge_file(path)?;
        Self::from_edge_list(n, &edges)
    }

    /// Like [`Self::from_edge_file`], but swaps vertex labels `0` and
    /// `origin` so origin-based estimators probe the requested vertex.
    pub fn from_edge_file_relabeled<P: AsRef<Path>>(path: P, origin: u64) -> Result<Self, Error> {
        let (n, mut edges) = parse_edge_file(path)?;
        if origin >= n {
            return Err(Error::Usage(format!("origin {origin} out of range (n={n})")));
        }
        let swap = |v: u64| {
            if v == 0 {
                origin
            } else if v == origin {
                0
            } else {
                v
            }
        };
        for (u, v) in &mut edges {
            *u = swap(*u);
            *v = swap(*v);
        }
        Self::from_edge_list(n, &edges)
    }

    /// Marks an irregular explicit graph as acceptable for origin-based
    /// estimators (they otherwise refuse non-transitive input).
    pub fn with_irregular_ok(mut self) -> Self {
        self.irregular_ok = true;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Number of vertices.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Common degree (maximum degree for irregular explicit graphs).
    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// Number of edges; equals `n * degree / 2` for regular graphs.
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn regular(&self) -> bool {
        self.regular
    }

    pub fn irregular_ok(&self) -> bool {
        self.irregular_ok
    }

    /// Degree of a single vertex.
    pub fn degree_of(&self, v: u64) -> u64 {
        debug_assert!(v < self.n);
        match &self.explicit {
            Some(data) => (data.offsets[v as usize + 1] - data.offsets[v as usize]) as u64,
            None => self.degree,
        }
    }

    /// The `slot`-th incident edge of `v`: returns `(neighbor, edge id)`.
    ///
    /// Slots run over `0..degree_of(v)` in the canonical neighbor order.
    /// This is the hot call of every exploration loop.
    #[inline]
    pub fn incident(&self, v: u64, slot: u64) -> (u64, u64) {
        match self.family {
            Family::Torus { side, dim } => {
                if side == 2 {
                    return hypercube_incident(v, slot, self.n);
                }
                let dim = dim as u64;
                let (axis, up) = if slot < dim { (slot, true) } else { (slot - dim, false) };
                let stride = side.pow(axis as u32);
                let coord = (v / stride) % side;
                if up {
                    let u = if coord + 1 == side { v - (side - 1) * stride } else { v + stride };
                    (u, axis * self.n + v)
                } else {
                    let u = if coord == 0 { v + (side - 1) * stride } else { v - stride };
                    (u, axis * self.n + u)
                }
            }
            Family::Hamming { .. } => hypercube_incident(v, slot, self.n),
            Family::Complete { n } => {
                let u = if slot < v { slot } else { slot + 1 };
                (u, complete_edge_id(n, u.min(v), u.max(v)))
            }
            Family::Explicit => {
                let data = self.explicit.as_ref().expect("explicit data");
                let at = data.offsets[v as usize] + slot as usize;
                (data.neighbors[at], data.edge_ids[at])
            }
        }
    }

    /// Neighbors of `v` in canonical order.
    pub fn neighbors(&self, v: u64) -> Result<Vec<u64>, Error> {
        if v >= self.n {
            return Err(Error::Usage(format!("vertex {v} out of range (n={})", self.n)));
        }
        Ok((0..self.degree_of(v)).map(|s| self.incident(v, s).0).collect())
    }

    /// Canonical id of the edge between adjacent vertices `u` and `v`.
    pub fn edge_id(&self, u: u64, v: u64) -> Result<EdgeId, Error> {
        if u >= self.n || v >= self.n {
            return Err(Error::Usage(format!(
                "vertex pair ({u},{v}) out of range (n={})",
                self.n
            )));
        }
        for slot in 0..self.degree_of(u) {
            let (nb, id) = self.incident(u, slot);
            if nb == v {
                return Ok(EdgeId(id));
            }
        }
        Err(Error::Usage(format!("vertices {u} and {v} are not adjacent")))
    }

    /// Endpoints `(u, v)` with `u < v` of a canonical edge id.
    pub fn edge_endpoints(&self, e: EdgeId) -> Result<(u64, u64), Error> {
        if e.0 >= self.edge_count {
            return Err(Error::Usage(format!(
                "edge id {} out of range (m={})",
                e.0, self.edge_count
            )));
        }
        let id = e.0;
        let pair = match self.family {
            Family::Torus { side, dim } => {
                if side == 2 {
                    hypercube_edge_endpoints(id, self.n)
                } else {
                    let _ = dim;
                    let axis = id / self.n;
                    let v = id % self.n;
                    let (u, _) = self.incident(v, axis); // +axis neighbor
                    (v.min(u), v.max(u))
                }
            }
            Family::Hamming { .. } => hypercube_edge_endpoints(id, self.n),
            Family::Complete { n } => complete_edge_endpoints(n, id),
            Family::Explicit => self.explicit.as_ref().expect("explicit data").edges[id as usize],
        };
        Ok(pair)
    }

    /// Visits every edge once as `(id, u, v)`; ids are visited in a
    /// family-specific fixed order with O(1) work per edge.
    pub fn for_each_edge<F: FnMut(u64, u64, u64)>(&self, mut f: F) {
        match self.family {
            Family::Torus { side, .. } if side >= 3 => {
                let dim = match self.family {
                    Family::Torus { dim, .. } => dim as u64,
                    _ => unreachable!(),
                };
                for axis in 0..dim {
                    let stride = side.pow(axis as u32);
                    for v in 0..self.n {
                        let coord = (v / stride) % side;
                        let u = if coord + 1 == side { v - (side - 1) * stride } else { v + stride };
                        f(axis * self.n + v, v.min(u), v.max(u));
                    }
                }
            }
            Family::Torus { .. } | Family::Hamming { .. } => {
                if self.degree == 0 {
                    return;
                }
                let dim = self.degree;
                let half = self.n / 2;
                for axis in 0..dim {
                    let stride = 1u64 << axis;
                    for idx in 0..half {
                        let low = idx & (stride - 1);
                        let high = (idx >> axis) << (axis + 1);
                        let w = high | low;
                        f(axis * half + idx, w, w | stride);
                    }
                }
            }
            Family::Complete { n } => {
                let mut id = 0u64;
                for u in 0..n {
                    for v in (u + 1)..n {
                        f(id, u, v);
                        id += 1;
                    }
                }
            }
            Family::Explicit => {
                let data = self.explicit.as_ref().expect("explicit data");
                for (id, &(u, v)) in data.edges.iter().enumerate() {
                    f(id as u64, u, v);
                }
            }
        }
    }

    /// Vertices at graph distance at most `r` from `v` (labels open, p = 1).
    pub fn ball_graph(&self, v: u64, r: u64) -> Result<Vec<u64>, Error> {
        if v >= self.n {
            return Err(Error::Usage(format!("vertex {v} out of range (n={})", self.n)));
        }
        let n = self.n as usize;
        let mut dist = vec![u64::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[v as usize] = 0;
        queue.push_back(v);
        let mut ball = vec![v];
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            if du == r {
                continue;
            }
            for slot in 0..self.degree_of(u) {
                let (w, _) = self.incident(u, slot);
                if dist[w as usize] == u64::MAX {
                    dist[w as usize] = du + 1;
                    ball.push(w);
                    queue.push_back(w);
                }
            }
        }
        ball.sort_unstable();
        Ok(ball)
    }
}

/// Hypercube incident edge for `Hamming` and side-2 tori: flipping bit
/// `slot`. The edge is owned by the endpoint with that bit clear; its id is
/// `slot * n/2 + (index of v with bit `slot` squeezed out)`.
#[inline]
fn hypercube_incident(v: u64, slot: u64, n: u64) -> (u64, u64) {
    let stride = 1u64 << slot;
    let w = v & !stride; // endpoint with the bit clear
    let low = w & (stride - 1);
    let high = (w >> (slot + 1)) << slot;
    (v ^ stride, slot * (n / 2) + (high | low))
}

fn hypercube_edge_endpoints(id: u64, n: u64) -> (u64, u64) {
    let half = n / 2;
    let axis = id / half;
    let idx = id % half;
    let stride = 1u64 << axis;
    let low = idx & (stride - 1);
    let high = (idx >> axis) << (axis + 1);
    let w = high | low;
    (w, w | stride)
}

/// Row-major upper-triangle edge index for the complete graph.
#[inline]
fn complete_edge_id(n: u64, u: u64, v: u64) -> u64 {
    debug_assert!(u < v && v < n);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

fn complete_edge_endpoints(n: u64, id: u64) -> (u64, u64) {
    // Invert the triangular index with a float guess, then correct locally.
    let nf = n as f64;
    let guess = (nf - 0.5 - ((nf - 0.5) * (nf - 0.5) - 2.0 * id as f64).max(0.0).sqrt()) as i64;
    let mut u = guess.clamp(0, n as i64 - 2) as u64;
    let base = |u: u64| u * n - u * (u + 1) / 2;
    while base(u) > id {
        u -= 1;
    }
    while u + 2 < n && base(u + 1) <= id {
        u += 1;
    }
    let v = id - base(u) + u + 1;
    (u, v)
}

fn parse_field(field: Option<&str>, name: &str) -> Result<u64, Error> {
    field
        .ok_or_else(|| Error::Usage(format!("missing field {name} in graph file")))?
        .parse::<u64>()
        .map_err(|e| Error::Usage(format!("bad {name} in graph file: {e}")))
}

fn parse_edge_file<P: AsRef<Path>>(path: P) -> Result<(u64, Vec<(u64, u64)>), Error> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Usage("empty graph file".into()))?;
    let mut it = header.split_whitespace();
    let n: u64 = parse_field(it.next(), "n")?;
    let m: u64 = parse_field(it.next(), "m")?;
    let mut edges = Vec::with_capacity(m as usize);
    for line in lines {
        let mut it = line.split_whitespace();
        let u: u64 = parse_field(it.next(), "u")?;
        let v: u64 = parse_field(it.next(), "v")?;
        if u >= v {
            return Err(Error::Usage(format!("edge line \"{line}\" must satisfy u < v")));
        }
        edges.push((u, v));
    }
    if edges.len() as u64 != m {
        return Err(Error::Usage(format!(
            "header declares {m} edges but {} lines follow",
            edges.len()
        )));
    }
    Ok((n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn families_under_test() -> Vec<TransitiveGraph> {
        vec![
            TransitiveGraph::torus(4, 1).unwrap(),
            TransitiveGraph::torus(6, 1).unwrap(),
            TransitiveGraph::torus(4, 3).unwrap(),
            TransitiveGraph::torus(3, 2).unwrap(),
            TransitiveGraph::torus(2, 3).unwrap(),
            TransitiveGraph::hamming(2).unwrap(),
            TransitiveGraph::hamming(5).unwrap(),
            TransitiveGraph::complete(2).unwrap(),
            TransitiveGraph::complete(7).unwrap(),
        ]
    }

    #[test]
    fn neighbor_examples() {
        let cycle = TransitiveGraph::torus(4, 1).unwrap();
        let mut nb = cycle.neighbors(0).unwrap();
        nb.sort_unstable();
        assert_eq!(nb, vec![1, 3]);

        let cube = TransitiveGraph::hamming(3).unwrap();
        let mut nb = cube.neighbors(0).unwrap();
        nb.sort_unstable();
        assert_eq!(nb, vec![0b001, 0b010, 0b100]);

        let k4 = TransitiveGraph::complete(4).unwrap();
        assert_eq!(k4.neighbors(2).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn out_of_range_vertex_is_usage_error() {
        let g = TransitiveGraph::complete(4).unwrap();
        assert!(matches!(g.neighbors(4), Err(Error::Usage(_))));
    }

    #[test]
    fn regularity_and_symmetry() {
        for g in families_under_test() {
            let mut probe = 0u64;
            for i in 0..1000u64 {
                probe = probe.wrapping_mul(6364136223846793005).wrapping_add(i);
                let v = probe % g.n();
                let nbs = g.neighbors(v).unwrap();
                assert_eq!(nbs.len() as u64, g.degree(), "degree at {v} in {}", g.family());
                let set: HashSet<u64> = nbs.iter().copied().collect();
                assert_eq!(set.len(), nbs.len(), "distinct neighbors in {}", g.family());
                assert!(!set.contains(&v), "no self-loop in {}", g.family());
                for &u in &nbs {
                    assert!(
                        g.neighbors(u).unwrap().contains(&v),
                        "symmetry {u}<->{v} in {}",
                        g.family()
                    );
                }
            }
        }
    }

    #[test]
    fn edge_ids_are_bijective() {
        for g in families_under_test() {
            let mut seen = HashSet::new();
            for v in 0..g.n() {
                for slot in 0..g.degree_of(v) {
                    let (u, id) = g.incident(v, slot);
                    assert!(id < g.edge_count());
                    assert_eq!(g.edge_id(v, u).unwrap().0, id);
                    assert_eq!(g.edge_id(u, v).unwrap().0, id, "undirected id in {}", g.family());
                    let (a, b) = g.edge_endpoints(EdgeId(id)).unwrap();
                    assert_eq!((a, b), (v.min(u), v.max(u)), "decode in {}", g.family());
                    seen.insert(id);
                }
            }
            assert_eq!(seen.len() as u64, g.edge_count(), "coverage in {}", g.family());
            assert_eq!(g.edge_count(), g.n() * g.degree() / 2);
        }
    }

    #[test]
    fn for_each_edge_matches_incident_enumeration() {
        for g in families_under_test() {
            let mut listed = Vec::new();
            g.for_each_edge(|id, u, v| {
                assert!(u < v);
                listed.push((id, u, v));
            });
            assert_eq!(listed.len() as u64, g.edge_count());
            let ids: HashSet<u64> = listed.iter().map(|&(id, _, _)| id).collect();
            assert_eq!(ids.len(), listed.len());
            for (id, u, v) in listed {
                assert_eq!(g.edge_id(u, v).unwrap().0, id);
            }
        }
    }

    #[test]
    fn side_two_torus_deduplicates_directions() {
        let g = TransitiveGraph::torus(2, 3).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.degree(), 3);
        let h = TransitiveGraph::hamming(3).unwrap();
        for v in 0..8 {
            assert_eq!(g.neighbors(v).unwrap(), h.neighbors(v).unwrap());
        }
    }

    #[test]
    fn ball_graph_examples() {
        let cycle6 = TransitiveGraph::torus(6, 1).unwrap();
        assert_eq!(cycle6.ball_graph(0, 2).unwrap(), vec![0, 1, 2, 4, 5]);
        assert_eq!(cycle6.ball_graph(3, 0).unwrap(), vec![3]);
        let k5 = TransitiveGraph::complete(5).unwrap();
        assert_eq!(k5.ball_graph(2, 1).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn ball_graph_reaches_everything_at_diameter() {
        for g in families_under_test() {
            let all = g.ball_graph(0, g.n()).unwrap();
            assert_eq!(all.len() as u64, g.n(), "connected family {}", g.family());
        }
    }

    #[test]
    fn explicit_graph_from_list() {
        // 3-path: degrees 1, 2, 1 -> irregular but accepted.
        let g = TransitiveGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(!g.regular());
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1).unwrap(), vec![0, 2]);
        assert!(matches!(
            TransitiveGraph::from_edge_list(3, &[(0, 0)]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            TransitiveGraph::from_edge_list(3, &[(0, 1), (1, 0)]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            TransitiveGraph::from_edge_list(2, &[(0, 5)]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn edge_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, "4 4\n0 1\n1 2\n2 3\n0 3\n").unwrap();
        let g = TransitiveGraph::from_edge_file(&path).unwrap();
        assert!(g.regular());
        assert_eq!(g.n(), 4);
        assert_eq!(g.degree(), 2);

        std::fs::write(&path, "4 1\n2 1\n").unwrap();
        assert!(matches!(
            TransitiveGraph::from_edge_file(&path),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn non_adjacent_edge_id_is_error() {
        let cycle = TransitiveGraph::torus(6, 1).unwrap();
        assert!(matches!(cycle.edge_id(0, 3), Err(Error::Usage(_))));
    }
}
