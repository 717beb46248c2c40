//! Schreier graphs of the action on tree levels and on boundary orbits, their
//! growth, and the inverted orbit growth `Δ(n)`.
//!
//! Points are acted on from the right, `x·(uv) = (x·u)·v`. Generators are
//! involutions, so `x·s` is simply the image of `x` under `s`.

use crate::error::{Error, Result};
use crate::groups::{word_string, Gen, GroupContext, GENERATORS};
use crate::tree::{Automorphism, BoundaryPoint, Vertex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt::Display;
use std::hash::Hash;

pub const DEFAULT_EXPANSION_CAP: usize = 256;
pub const DEFAULT_MAX_VERTICES: usize = 1 << 22;

/// Graph of a generator action on a set of points. `edges[v][s]` is the image
/// of `v` under generator `s`, or `None` when it lies outside the
/// materialized part.
#[derive(Clone, Debug)]
pub struct SchreierGraph<V> {
    vertices: Vec<V>,
    index: HashMap<V, u32>,
    edges: Vec<[Option<u32>; 4]>,
    base: u32,
}

impl<V: Clone + Eq + Hash + Display> SchreierGraph<V> {
    fn with_base(base: V) -> Self {
        let mut g = SchreierGraph {
            vertices: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            base: 0,
        };
        g.add(base);
        g
    }

    fn add(&mut self, v: V) -> u32 {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.vertices.len() as u32;
        self.index.insert(v.clone(), i);
        self.vertices.push(v);
        self.edges.push([None; 4]);
        i
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn base(&self) -> &V {
        &self.vertices[self.base as usize]
    }

    pub fn index_of(&self, v: &V) -> Option<usize> {
        self.index.get(v).map(|&i| i as usize)
    }

    pub fn neighbor(&self, v: usize, s: Gen) -> Option<usize> {
        self.edges[v][s as usize].map(|u| u as usize)
    }

    /// Labeled edges `(v, s, u)` with `u = v·s`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Gen, usize)> + '_ {
        self.edges.iter().enumerate().flat_map(|(v, row)| {
            GENERATORS
                .iter()
                .filter_map(move |&s| row[s as usize].map(|u| (v, s, u as usize)))
        })
    }

    /// Number of edge endpoints at `v`, counting both directions of every
    /// generator edge (loops count twice).
    pub fn degree(&self, v: usize) -> usize {
        2 * self.edges[v].iter().filter(|e| e.is_some()).count()
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(self.base as usize)
            .iter()
            .all(|d| d.is_some())
    }

    /// Breadth-first distances; `None` for vertices not reachable from `start`.
    pub fn distances_from(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for u in self.edges[v].iter().flatten() {
                let u = *u as usize;
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Edge list, one `v TAB label TAB u` line per edge.
    pub fn to_edge_list(&self) -> String {
        self.edges()
            .map(|(v, s, u)| {
                format!(
                    "{}\t{}\t{}\n",
                    self.vertices[v],
                    s.to_char(),
                    self.vertices[u]
                )
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "schreier/1",
            "base": self.base().to_string(),
            "vertices": self.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "edges": self.edges().map(|(v, s, u)| serde_json::json!([v, s.to_char().to_string(), u])).collect::<Vec<_>>(),
        })
    }
}

/// Counts of vertices within distance `n` of `base`, for `n = 0, 1, …` up to
/// the eccentricity of `base`.
pub fn graph_growth<V: Clone + Eq + Hash + Display>(
    graph: &SchreierGraph<V>,
    base: &V,
) -> Vec<u64> {
    let Some(start) = graph.index_of(base) else {
        return Vec::new();
    };
    let dist = graph.distances_from(start);
    let max = dist.iter().flatten().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; max + 1];
    for d in dist.into_iter().flatten() {
        counts[d] += 1;
    }
    let mut acc = 0;
    counts
        .into_iter()
        .map(|c| {
            acc += c;
            acc
        })
        .collect()
}

/// The action on the `2^k` vertices of level `k`.
pub fn level_graph(ctx: &GroupContext, k: usize) -> Result<SchreierGraph<Vertex>> {
    level_graph_with(ctx, k, DEFAULT_MAX_VERTICES)
}

pub fn level_graph_with(
    ctx: &GroupContext,
    k: usize,
    max_vertices: usize,
) -> Result<SchreierGraph<Vertex>> {
    if k >= usize::BITS as usize - 1 || (1usize << k) > max_vertices {
        return Err(Error::ResourceCap(format!(
            "level {k} has more than {max_vertices} vertices"
        )));
    }
    let n = 1usize << k;
    let gens: Vec<Automorphism> = GENERATORS.iter().map(|&s| ctx.generator(s)).collect();
    let mut g = SchreierGraph::with_base(Vertex::from_index(0, k));
    for i in 1..n {
        g.add(Vertex::from_index(i, k));
    }
    let images: Vec<[Option<u32>; 4]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let v = Vertex::from_index(i, k);
            let mut row = [None; 4];
            for (s, gen) in gens.iter().enumerate() {
                row[s] = Some(gen.apply(&v).index() as u32);
            }
            row
        })
        .collect();
    g.edges = images;
    Ok(g)
}

fn boundary_step(
    ctx: &GroupContext,
    p: &BoundaryPoint,
    s: Gen,
    cap: usize,
) -> Result<BoundaryPoint> {
    ctx.generator(s).apply_boundary(p, cap)
}

/// Ball of radius `radius` around `base` in the orbital Schreier graph of the
/// boundary action.
pub fn orbit_graph_ball(
    ctx: &GroupContext,
    base: &BoundaryPoint,
    radius: usize,
) -> Result<SchreierGraph<BoundaryPoint>> {
    orbit_graph_ball_with(
        ctx,
        base,
        radius,
        DEFAULT_EXPANSION_CAP,
        DEFAULT_MAX_VERTICES,
    )
}

pub fn orbit_graph_ball_with(
    ctx: &GroupContext,
    base: &BoundaryPoint,
    radius: usize,
    expansion_cap: usize,
    max_vertices: usize,
) -> Result<SchreierGraph<BoundaryPoint>> {
    if base.is_cofinal_with_ones() {
        return Err(Error::InvalidInput(format!(
            "{base} lies in the orbit of 1^∞"
        )));
    }
    let mut g = SchreierGraph::with_base(base.clone());
    let mut frontier = vec![0u32];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            for s in GENERATORS {
                let image = boundary_step(ctx, &g.vertices[v as usize], s, expansion_cap)?;
                let before = g.vertex_count();
                let u = g.add(image);
                if g.vertex_count() > before {
                    if g.vertex_count() > max_vertices {
                        return Err(Error::ResourceCap(format!(
                            "orbit ball exceeds {max_vertices} vertices"
                        )));
                    }
                    next.push(u);
                }
                g.edges[v as usize][s as usize] = Some(u);
                g.edges[u as usize][s as usize] = Some(v);
            }
        }
        frontier = next;
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertedOrbitRecord {
    pub n: usize,
    pub delta: usize,
    /// Lexicographically least word of length `n` attaining `delta`.
    pub witness: String,
}

/// `Δ(n) = max_{|w| = n} |{x, x·w_n, x·w_{n−1}w_n, …, x·w_1⋯w_n}|`.
///
/// Words are built from the right. The suffix product `S_i = w_i⋯w_n` is
/// held as its action on the ball of radius `i − 1` around `x` in the orbit
/// graph, which is all that later points need; each step costs one lookup per
/// ball vertex, and branches that cannot beat the best count are cut.
pub fn inverted_orbit_growth(
    ctx: &GroupContext,
    base: &BoundaryPoint,
    n: usize,
) -> Result<InvertedOrbitRecord> {
    inverted_orbit_growth_with(ctx, base, n, 16)
}

pub fn inverted_orbit_growth_with(
    ctx: &GroupContext,
    base: &BoundaryPoint,
    n: usize,
    max_n: usize,
) -> Result<InvertedOrbitRecord> {
    if n > max_n {
        return Err(Error::ResourceCap(format!(
            "inverted orbit search over 4^{n} words exceeds the cap 4^{max_n}"
        )));
    }
    if n == 0 {
        return Ok(InvertedOrbitRecord {
            n,
            delta: 1,
            witness: String::new(),
        });
    }
    let graph = orbit_graph_ball(ctx, base, n)?;
    let dist: Vec<usize> = graph
        .distances_from(0)
        .into_iter()
        .map(|d| d.unwrap())
        .collect();
    // Vertices ordered by distance so ball(r) is a prefix.
    let mut order: Vec<usize> = (0..graph.vertex_count()).collect();
    order.sort_by_key(|&v| (dist[v], v));
    let mut ball_size = vec![0usize; n + 1];
    for r in 0..=n {
        ball_size[r] = dist.iter().filter(|&&d| d <= r).count();
    }
    let search = Search {
        graph: &graph,
        order: &order,
        ball_size: &ball_size,
        n,
    };
    let best = GENERATORS
        .par_iter()
        .map(|&last| search.run(last))
        .reduce(|| (0, Vec::new()), better);
    Ok(InvertedOrbitRecord {
        n,
        delta: best.0,
        witness: word_string(&best.1),
    })
}

fn better(a: (usize, Vec<Gen>), b: (usize, Vec<Gen>)) -> (usize, Vec<Gen>) {
    if b.0 > a.0 || (b.0 == a.0 && !b.1.is_empty() && (a.1.is_empty() || b.1 < a.1)) {
        b
    } else {
        a
    }
}

struct Search<'a> {
    graph: &'a SchreierGraph<BoundaryPoint>,
    order: &'a [usize],
    ball_size: &'a [usize],
    n: usize,
}

struct SearchState {
    /// Suffix action on the ball, one map per depth: maps[d][j] is the image
    /// of order[j] under the current suffix of length d.
    maps: Vec<Vec<u32>>,
    hits: Vec<u32>,
    distinct: usize,
    word: Vec<Gen>,
    best: (usize, Vec<Gen>),
}

impl Search<'_> {
    fn run(&self, last: Gen) -> (usize, Vec<Gen>) {
        let v = self.graph.vertex_count();
        let identity: Vec<u32> = self.order[..self.ball_size[self.n]]
            .iter()
            .map(|&x| x as u32)
            .collect();
        let mut position = vec![0u32; v];
        for (j, &x) in self.order.iter().enumerate() {
            position[x] = j as u32;
        }
        let mut st = SearchState {
            maps: vec![identity],
            hits: vec![0; v],
            distinct: 1,
            word: vec![Gen::A; self.n],
            best: (0, Vec::new()),
        };
        st.hits[0] = 1;
        self.descend(&mut st, &position, last);
        st.best
    }

    /// Prepends `s` to the current suffix.
    fn descend(&self, st: &mut SearchState, position: &[u32], s: Gen) {
        let depth = st.maps.len();
        let remaining = self.n - depth;
        let domain = self.ball_size[remaining];
        let prev = &st.maps[depth - 1];
        let map: Vec<u32> = self.order[..domain]
            .iter()
            .map(|&y| {
                let ys = self
                    .graph
                    .neighbor(y, s)
                    .expect("ball contains all needed edges");
                prev[position[ys] as usize]
            })
            .collect();
        let point = map[0] as usize;
        st.word[remaining] = s;
        st.hits[point] += 1;
        if st.hits[point] == 1 {
            st.distinct += 1;
        }
        if remaining == 0 {
            let candidate = (st.distinct, st.word.clone());
            st.best = better(std::mem::take(&mut st.best), candidate);
        } else if st.distinct + remaining >= st.best.0 {
            st.maps.push(map);
            for t in GENERATORS {
                self.descend(st, position, t);
            }
            st.maps.pop();
        }
        st.hits[point] -= 1;
        if st.hits[point] == 0 {
            st.distinct -= 1;
        }
    }
}
