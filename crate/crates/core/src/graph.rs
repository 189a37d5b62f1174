//! The linked complete graphs: two `M`-vertex cliques with unit edges, where
//! vertex `i` of the first clique is joined to vertex `i + M` of the second by
//! an edge of weight `w`.
//!
//! Vertex `0` is the marked vertex `a`, vertex `M` is its link partner `c`.
//! The remaining vertices of the first clique are of type `b`, those of the
//! second clique of type `d`.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{check_m, check_positive, Error, Result};

/// Default upper bound on `M` for dense storage.
pub const DEFAULT_MAX_M: usize = 2048;

/// Symmetry class of a vertex relative to the marked vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VertexKind {
    A,
    B,
    C,
    D,
}

/// Dense weighted adjacency of the linked complete graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    m: usize,
    w: f64,
    // row-major, (2M)^2 entries
    adjacency: Vec<f64>,
}

/// Build the graph with the default size cap.
pub fn build_linked_complete(m: usize, w: f64) -> Result<WeightedGraph> {
    build_linked_complete_capped(m, w, DEFAULT_MAX_M)
}

pub fn build_linked_complete_capped(m: usize, w: f64, max_m: usize) -> Result<WeightedGraph> {
    check_m(m)?;
    check_positive("w", w)?;
    if m > max_m {
        return Err(Error::SizeLimit { m, cap: max_m });
    }
    let n = 2 * m;
    let mut adjacency = vec![0.0; n * n];
    for clique in 0..2 {
        let base = clique * m;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    adjacency[(base + i) * n + base + j] = 1.0;
                }
            }
        }
    }
    for i in 0..m {
        adjacency[i * n + i + m] = w;
        adjacency[(i + m) * n + i] = w;
    }
    Ok(WeightedGraph { m, w, adjacency })
}

impl WeightedGraph {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.m
    }

    pub fn marked(&self) -> usize {
        0
    }

    /// Link partner of `v` in the other clique.
    pub fn partner(&self, v: usize) -> usize {
        if v < self.m {
            v + self.m
        } else {
            v - self.m
        }
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        match v {
            0 => VertexKind::A,
            v if v < self.m => VertexKind::B,
            v if v == self.m => VertexKind::C,
            _ => VertexKind::D,
        }
    }

    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adjacency[u * self.vertex_count() + v]
    }

    /// Row-major adjacency matrix.
    pub fn adjacency(&self) -> &[f64] {
        &self.adjacency
    }

    /// Weighted degree of `v`.
    pub fn degree(&self, v: usize) -> f64 {
        let n = self.vertex_count();
        self.adjacency[v * n..(v + 1) * n].iter().sum()
    }

    /// Iterate over undirected edges `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.vertex_count();
        (0..n).flat_map(move |u| {
            (u + 1..n).filter_map(move |v| {
                let x = self.weight(u, v);
                (x != 0.0).then_some((u, v, x))
            })
        })
    }

    /// Write the edge list, one `u v weight` line per undirected edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v, x) in self.edges() {
            writeln!(out, "{u} {v} {x}")?;
        }
        Ok(())
    }
}

/// Connection type between two vertex classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Connection {
    AB,
    AC,
    BB,
    BD,
    CD,
    DD,
}

impl Connection {
    pub const ALL: [Connection; 6] =
        [Connection::AB, Connection::AC, Connection::BB, Connection::BD, Connection::CD, Connection::DD];

    fn of(x: VertexKind, y: VertexKind) -> Option<Connection> {
        use VertexKind::*;
        let (x, y) = if (x as u8) <= (y as u8) { (x, y) } else { (y, x) };
        match (x, y) {
            (A, B) => Some(Connection::AB),
            (A, C) => Some(Connection::AC),
            (B, B) => Some(Connection::BB),
            (B, D) => Some(Connection::BD),
            (C, D) => Some(Connection::CD),
            (D, D) => Some(Connection::DD),
            _ => None,
        }
    }
}

impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Connection::AB => "a~b",
            Connection::AC => "a~c",
            Connection::BB => "b~b",
            Connection::BD => "b~d",
            Connection::CD => "c~d",
            Connection::DD => "d~d",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeClass {
    pub connection: Connection,
    pub weight: f64,
    pub count: usize,
}

/// Edge counts per connection type, obtained by classifying every edge of
/// the constructed graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeCensus {
    pub classes: [EdgeClass; 6],
}

impl EdgeCensus {
    pub fn get(&self, c: Connection) -> &EdgeClass {
        &self.classes[Connection::ALL.iter().position(|&x| x == c).unwrap()]
    }

    pub fn count(&self, c: Connection) -> usize {
        self.get(c).count
    }

    pub fn total_edges(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }
}

pub fn edge_census(g: &WeightedGraph) -> EdgeCensus {
    let mut counts = [0usize; 6];
    let mut weights = [0.0f64; 6];
    for (u, v, x) in g.edges() {
        let conn =
            Connection::of(g.kind(u), g.kind(v)).expect("linked complete graph has only the six connection types");
        let idx = Connection::ALL.iter().position(|&c| c == conn).unwrap();
        counts[idx] += 1;
        weights[idx] = x;
    }
    let classes =
        std::array::from_fn(|i| EdgeClass { connection: Connection::ALL[i], weight: weights[i], count: counts[i] });
    EdgeCensus { classes }
}
