//! Oriented tree diagrams: weighted trees whose edges point from the lower
//! numbered node to the higher numbered one.
//!
//! Nodes are numbered 1..=n.  A valid diagram is connected and has exactly
//! n-1 edges, so the underlying graph is a tree; directed chains between two
//! nodes are therefore unique when they exist.  Roots have no incoming edge,
//! tips no outgoing edge.

use num::BigInt;
use num::{Integer, One};
use std::collections::BTreeSet;
use std::fmt;

/// 1-based node index.
pub type NodeId = usize;

/// Directed weighted edge; `tail < head` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub weight: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Toward ancestors (against the arrows).
    Up,
    /// Toward descendants (along the arrows).
    Down,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("diagram must have at least one node")]
    NoNodes,
    #[error("edge ({tail},{head}) does not point from a lower to a higher node")]
    EdgeOrder { tail: NodeId, head: NodeId },
    #[error("edge ({tail},{head}) has zero weight; weights must be positive")]
    ZeroWeight { tail: NodeId, head: NodeId },
    #[error("edge ({tail},{head}) references a node outside 1..={nodes}")]
    EdgeOutOfRange { tail: NodeId, head: NodeId, nodes: usize },
    #[error("duplicate edge ({tail},{head})")]
    DuplicateEdge { tail: NodeId, head: NodeId },
    #[error("a tree on {nodes} nodes needs exactly {} edges, found {found}", nodes - 1)]
    EdgeCount { nodes: usize, found: usize },
    #[error("diagram is disconnected: node {node} is not reachable from node 1")]
    Disconnected { node: NodeId },
    #[error("node index {node} out of range 1..={nodes}")]
    NodeOutOfRange { node: NodeId, nodes: usize },
    #[error("no directed chain from node {from} to node {to}")]
    EmptyChain { from: NodeId, to: NodeId },
    #[error("invalid embedding: {0}")]
    Embedding(String),
    #[error("induced node set {0:?} does not span a connected subtree")]
    InducedDisconnected(Vec<NodeId>),
    #[error("unknown builtin family {0:?}")]
    UnknownBuiltin(String),
    #[error("builtin parameter out of range: {0}")]
    BuiltinParam(String),
}

/// A validated oriented tree diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDiagram {
    node_count: usize,
    edges: Vec<Edge>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl TreeDiagram {
    /// Validates node count, edge orientation, weights, edge count and
    /// connectivity.  Edges are stored sorted by (tail, head).
    pub fn new(node_count: usize, mut edges: Vec<Edge>) -> Result<Self, DiagramError> {
        if node_count == 0 {
            return Err(DiagramError::NoNodes);
        }
        for e in &edges {
            if e.tail == 0 || e.head == 0 || e.tail > node_count || e.head > node_count {
                return Err(DiagramError::EdgeOutOfRange {
                    tail: e.tail,
                    head: e.head,
                    nodes: node_count,
                });
            }
            if e.tail >= e.head {
                return Err(DiagramError::EdgeOrder { tail: e.tail, head: e.head });
            }
            if e.weight == 0 {
                return Err(DiagramError::ZeroWeight { tail: e.tail, head: e.head });
            }
        }
        edges.sort();
        for w in edges.windows(2) {
            if w[0].tail == w[1].tail && w[0].head == w[1].head {
                return Err(DiagramError::DuplicateEdge { tail: w[1].tail, head: w[1].head });
            }
        }
        if edges.len() != node_count - 1 {
            return Err(DiagramError::EdgeCount { nodes: node_count, found: edges.len() });
        }
        let mut in_edges = vec![Vec::new(); node_count + 1];
        let mut out_edges = vec![Vec::new(); node_count + 1];
        for (idx, e) in edges.iter().enumerate() {
            out_edges[e.tail].push(idx);
            in_edges[e.head].push(idx);
        }
        // Connectivity of the underlying undirected graph; with n-1 edges this
        // also rules out cycles.
        let mut seen = vec![false; node_count + 1];
        let mut stack = vec![1];
        seen[1] = true;
        while let Some(v) = stack.pop() {
            for &i in out_edges[v].iter().chain(in_edges[v].iter()) {
                let e = edges[i];
                let other = if e.tail == v { e.head } else { e.tail };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        if let Some(node) = (1..=node_count).find(|&v| !seen[v]) {
            return Err(DiagramError::Disconnected { node });
        }
        Ok(TreeDiagram { node_count, edges, in_edges, out_edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn check_node(&self, v: NodeId) -> Result<(), DiagramError> {
        if v == 0 || v > self.node_count {
            Err(DiagramError::NodeOutOfRange { node: v, nodes: self.node_count })
        } else {
            Ok(())
        }
    }

    /// Nodes with no incoming edge.
    pub fn roots(&self) -> Vec<NodeId> {
        (1..=self.node_count).filter(|&v| self.in_edges[v].is_empty()).collect()
    }

    /// Nodes with no outgoing edge.
    pub fn tips(&self) -> Vec<NodeId> {
        (1..=self.node_count).filter(|&v| self.out_edges[v].is_empty()).collect()
    }

    /// The unique directed node sequence from `i` to `j`, if any.
    /// `chain(i, i)` is the one-node sequence `[i]`.
    pub fn chain(&self, i: NodeId, j: NodeId) -> Result<Option<Vec<NodeId>>, DiagramError> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Ok(Some(vec![i]));
        }
        // Walk up from j: each step picks the unique in-edge lying on a path
        // from i.  In a tree the directed path is unique, so a simple search
        // from i suffices.
        let mut parent: Vec<Option<NodeId>> = vec![None; self.node_count + 1];
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            for &ei in &self.out_edges[v] {
                let h = self.edges[ei].head;
                if parent[h].is_none() && h != i {
                    parent[h] = Some(v);
                    if h == j {
                        let mut path = vec![j];
                        let mut cur = j;
                        while let Some(p) = parent[cur] {
                            path.push(p);
                            cur = p;
                            if cur == i {
                                break;
                            }
                        }
                        path.reverse();
                        return Ok(Some(path));
                    }
                    stack.push(h);
                }
            }
        }
        Ok(None)
    }

    /// Closure of `{i}` under the ancestor (`Up`) or descendant (`Down`)
    /// relation; always contains `i` itself.
    pub fn node_closure(&self, i: NodeId, dir: Direction) -> Result<BTreeSet<NodeId>, DiagramError> {
        self.check_node(i)?;
        let mut set = BTreeSet::new();
        let mut stack = vec![i];
        set.insert(i);
        while let Some(v) = stack.pop() {
            let step = match dir {
                Direction::Up => &self.in_edges[v],
                Direction::Down => &self.out_edges[v],
            };
            for &ei in step {
                let e = self.edges[ei];
                let next = match dir {
                    Direction::Up => e.tail,
                    Direction::Down => e.head,
                };
                if set.insert(next) {
                    stack.push(next);
                }
            }
        }
        Ok(set)
    }

    /// Ancestors of `i`, including `i`.
    pub fn ancestors(&self, i: NodeId) -> Result<BTreeSet<NodeId>, DiagramError> {
        self.node_closure(i, Direction::Up)
    }

    /// Edges with both endpoints among the ancestors of `i`.
    pub fn ancestor_edges(&self, i: NodeId) -> Result<Vec<Edge>, DiagramError> {
        let anc = self.ancestors(i)?;
        Ok(self
            .edges
            .iter()
            .copied()
            .filter(|e| anc.contains(&e.tail) && anc.contains(&e.head))
            .collect())
    }

    /// Edges lying on the directed chain from `i` to `j`.
    pub fn chain_edges(&self, i: NodeId, j: NodeId) -> Result<Option<Vec<Edge>>, DiagramError> {
        let Some(path) = self.chain(i, j)? else { return Ok(None) };
        let mut out = Vec::with_capacity(path.len().saturating_sub(1));
        for w in path.windows(2) {
            let e = self
                .edges
                .iter()
                .find(|e| e.tail == w[0] && e.head == w[1])
                .expect("chain step must be an edge");
            out.push(*e);
        }
        Ok(Some(out))
    }

    /// Product of edge weights over the ancestor edges of `i`; 1 for roots.
    pub fn kappa(&self, i: NodeId) -> Result<BigInt, DiagramError> {
        let mut k = BigInt::one();
        for e in self.ancestor_edges(i)? {
            k *= BigInt::from(e.weight);
        }
        Ok(k)
    }

    /// `kappa(j)` divided by the product of weights along the chain from `i`
    /// to `j`.  The chain must exist; the division is always exact because
    /// chain edges are ancestor edges of `j`.
    pub fn kappa_rel(&self, i: NodeId, j: NodeId) -> Result<BigInt, DiagramError> {
        let edges = self
            .chain_edges(i, j)?
            .ok_or(DiagramError::EmptyChain { from: i, to: j })?;
        let mut denom = BigInt::one();
        for e in edges {
            denom *= BigInt::from(e.weight);
        }
        let kj = self.kappa(j)?;
        let (q, r) = kj.div_rem(&denom);
        assert!(r == BigInt::ZERO, "kappa_rel division must be exact");
        Ok(q)
    }

    /// Parses the plain-text format:
    ///
    /// ```text
    /// nodes N
    /// edge I J D    # one line per edge, I < J, D >= 1
    /// ```
    ///
    /// `#` starts a comment; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, DiagramError> {
        let mut node_count: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let toks = tokenize(content);
            if toks.is_empty() {
                continue;
            }
            let word = |idx: usize| -> Result<(&str, usize), DiagramError> {
                toks.get(idx).copied().ok_or_else(|| DiagramError::Syntax {
                    line,
                    col: content.len() + 1,
                    msg: "unexpected end of line".into(),
                })
            };
            let number = |idx: usize| -> Result<u64, DiagramError> {
                let (tok, col) = word(idx)?;
                tok.parse::<u64>().map_err(|_| DiagramError::Syntax {
                    line,
                    col,
                    msg: format!("expected a nonnegative integer, found {tok:?}"),
                })
            };
            match toks[0].0 {
                "nodes" => {
                    if node_count.is_some() {
                        return Err(DiagramError::Syntax {
                            line,
                            col: toks[0].1,
                            msg: "repeated nodes line".into(),
                        });
                    }
                    if toks.len() != 2 {
                        return Err(DiagramError::Syntax {
                            line,
                            col: toks[0].1,
                            msg: "expected: nodes N".into(),
                        });
                    }
                    node_count = Some(number(1)? as usize);
                }
                "edge" => {
                    if node_count.is_none() {
                        return Err(DiagramError::Syntax {
                            line,
                            col: toks[0].1,
                            msg: "edge line before nodes line".into(),
                        });
                    }
                    if toks.len() != 4 {
                        return Err(DiagramError::Syntax {
                            line,
                            col: toks[0].1,
                            msg: "expected: edge I J D".into(),
                        });
                    }
                    edges.push(Edge {
                        tail: number(1)? as usize,
                        head: number(2)? as usize,
                        weight: number(3)?,
                    });
                }
                other => {
                    return Err(DiagramError::Syntax {
                        line,
                        col: toks[0].1,
                        msg: format!("unknown directive {other:?}"),
                    });
                }
            }
        }
        let Some(n) = node_count else {
            return Err(DiagramError::Syntax {
                line: text.lines().count() + 1,
                col: 1,
                msg: "missing nodes line".into(),
            });
        };
        TreeDiagram::new(n, edges)
    }

    /// Canonical text form: the nodes line, then edges sorted by (tail, head).
    pub fn render(&self) -> String {
        let mut out = format!("nodes {}\n", self.node_count);
        for e in &self.edges {
            out.push_str(&format!("edge {} {} {}\n", e.tail, e.head, e.weight));
        }
        out
    }

    pub fn builtin(family: BuiltinFamily) -> Result<Self, DiagramError> {
        use BuiltinFamily::*;
        let edge = |tail, head, weight| Edge { tail, head, weight };
        match family {
            Path(n) => {
                if n == 0 {
                    return Err(DiagramError::BuiltinParam("path:N needs N >= 1".into()));
                }
                let edges = (1..n).map(|i| edge(i, i + 1, 1)).collect();
                TreeDiagram::new(n, edges)
            }
            BranchedPath(n, m) => {
                if n == 0 {
                    return Err(DiagramError::BuiltinParam("a:N,M needs N >= 1".into()));
                }
                let mut edges: Vec<Edge> = (1..n).map(|i| edge(i, i + 1, 1)).collect();
                edges.extend((1..=m).map(|k| edge(n, n + k, 1)));
                TreeDiagram::new(n + m, edges)
            }
            InStar(n) => {
                if n == 0 {
                    return Err(DiagramError::BuiltinParam("instar:N needs N >= 1".into()));
                }
                let edges = (1..=n).map(|i| edge(i, n + 1, 1)).collect();
                TreeDiagram::new(n + 1, edges)
            }
            OutStar(m) => {
                if m == 0 {
                    return Err(DiagramError::BuiltinParam("outstar:M needs M >= 1".into()));
                }
                let edges = (1..=m).map(|k| edge(1, 1 + k, 1)).collect();
                TreeDiagram::new(m + 1, edges)
            }
            MultiEdge(d) => {
                if d == 0 {
                    return Err(DiagramError::BuiltinParam("multi:D needs D >= 1".into()));
                }
                TreeDiagram::new(2, vec![edge(1, 2, d)])
            }
            Figure1 => TreeDiagram::new(
                6,
                vec![edge(1, 3, 1), edge(2, 3, 1), edge(3, 4, 2), edge(4, 5, 1), edge(4, 6, 1)],
            ),
        }
    }

    /// Subdiagram induced by a sorted set of nodes, together with the
    /// embedding back into `self` (`embedding[k-1]` is the original number of
    /// new node `k`).  The kept edges must form a tree on the kept nodes.
    pub fn induced(&self, nodes: &[NodeId]) -> Result<(TreeDiagram, Vec<NodeId>), DiagramError> {
        let set: BTreeSet<NodeId> = nodes.iter().copied().collect();
        for &v in &set {
            self.check_node(v)?;
        }
        let embedding: Vec<NodeId> = set.iter().copied().collect();
        let renumber = |v: NodeId| embedding.iter().position(|&w| w == v).unwrap() + 1;
        let edges = self
            .edges
            .iter()
            .filter(|e| set.contains(&e.tail) && set.contains(&e.head))
            .map(|e| Edge { tail: renumber(e.tail), head: renumber(e.head), weight: e.weight })
            .collect();
        match TreeDiagram::new(embedding.len(), edges) {
            Ok(d) => Ok((d, embedding)),
            Err(DiagramError::NoNodes) => Err(DiagramError::NoNodes),
            Err(_) => Err(DiagramError::InducedDisconnected(embedding)),
        }
    }
}

/// True iff `embedding` realizes `sub` as a subdiagram of `ambient` that is
/// closed under taking ancestors (a "clan" closed upward, weights intact).
/// `embedding[k-1]` is the ambient node for sub node `k`; it must be injective
/// and strictly increasing so that edge orientation is preserved.
pub fn is_homoclan(
    sub: &TreeDiagram,
    embedding: &[NodeId],
    ambient: &TreeDiagram,
) -> Result<bool, DiagramError> {
    if embedding.len() != sub.node_count() {
        return Err(DiagramError::Embedding(format!(
            "embedding has {} entries for {} nodes",
            embedding.len(),
            sub.node_count()
        )));
    }
    for w in embedding.windows(2) {
        if w[0] >= w[1] {
            return Err(DiagramError::Embedding(
                "embedding must be strictly increasing".into(),
            ));
        }
    }
    for &v in embedding {
        if v == 0 || v > ambient.node_count() {
            return Err(DiagramError::Embedding(format!(
                "embedded node {v} out of range 1..={}",
                ambient.node_count()
            )));
        }
    }
    let image: BTreeSet<NodeId> = embedding.iter().copied().collect();
    // Subdiagram: every sub edge maps onto an ambient edge of equal weight,
    // and no ambient edge between image nodes is missing from sub.
    let mapped: BTreeSet<(NodeId, NodeId, u64)> = sub
        .edges()
        .iter()
        .map(|e| (embedding[e.tail - 1], embedding[e.head - 1], e.weight))
        .collect();
    let ambient_inside: BTreeSet<(NodeId, NodeId, u64)> = ambient
        .edges()
        .iter()
        .filter(|e| image.contains(&e.tail) && image.contains(&e.head))
        .map(|e| (e.tail, e.head, e.weight))
        .collect();
    if mapped != ambient_inside {
        return Ok(false);
    }
    // Clan condition: ancestor-closed in the ambient diagram.
    for &v in &image {
        let anc = ambient.ancestors(v)?;
        if !anc.is_subset(&image) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builtin diagram families; parsed from specs like `path:3`, `a:1,2`,
/// `multi:4`, `instar:2`, `outstar:3`, `figure1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinFamily {
    Path(usize),
    /// Path on `n` nodes with `m` extra tip nodes attached to node `n`.
    BranchedPath(usize, usize),
    InStar(usize),
    OutStar(usize),
    MultiEdge(u64),
    Figure1,
}

impl std::str::FromStr for BuiltinFamily {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DiagramError::UnknownBuiltin(s.to_string());
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let one = |args: Option<&str>| -> Result<u64, DiagramError> {
            args.ok_or_else(bad)?.parse().map_err(|_| bad())
        };
        match name {
            "figure1" => {
                if args.is_some() {
                    return Err(bad());
                }
                Ok(BuiltinFamily::Figure1)
            }
            "path" => Ok(BuiltinFamily::Path(one(args)? as usize)),
            "instar" => Ok(BuiltinFamily::InStar(one(args)? as usize)),
            "outstar" => Ok(BuiltinFamily::OutStar(one(args)? as usize)),
            "multi" => Ok(BuiltinFamily::MultiEdge(one(args)?)),
            "a" => {
                let (n, m) = args.ok_or_else(bad)?.split_once(',').ok_or_else(bad)?;
                Ok(BuiltinFamily::BranchedPath(
                    n.parse().map_err(|_| bad())?,
                    m.parse().map_err(|_| bad())?,
                ))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BuiltinFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinFamily::Path(n) => write!(f, "path:{n}"),
            BuiltinFamily::BranchedPath(n, m) => write!(f, "a:{n},{m}"),
            BuiltinFamily::InStar(n) => write!(f, "instar:{n}"),
            BuiltinFamily::OutStar(m) => write!(f, "outstar:{m}"),
            BuiltinFamily::MultiEdge(d) => write!(f, "multi:{d}"),
            BuiltinFamily::Figure1 => write!(f, "figure1"),
        }
    }
}

/// Splits a line into (token, 1-based column) pairs.
fn tokenize(line: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut rest = line;
    let mut offset = 0;
    loop {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return out;
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        out.push((&trimmed[..end], offset + 1));
        rest = &trimmed[end..];
        offset += end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure1() -> TreeDiagram {
        TreeDiagram::builtin(BuiltinFamily::Figure1).unwrap()
    }

    #[test]
    fn builtin_shapes() {
        let p3 = TreeDiagram::builtin(BuiltinFamily::Path(3)).unwrap();
        assert_eq!(p3.node_count(), 3);
        assert_eq!(p3.roots(), vec![1]);
        assert_eq!(p3.tips(), vec![3]);

        let a12 = TreeDiagram::builtin(BuiltinFamily::BranchedPath(1, 2)).unwrap();
        assert_eq!(a12.node_count(), 3);
        assert_eq!(a12.roots(), vec![1]);
        assert_eq!(a12.tips(), vec![2, 3]);

        let instar = TreeDiagram::builtin(BuiltinFamily::InStar(2)).unwrap();
        assert_eq!(instar.roots(), vec![1, 2]);
        assert_eq!(instar.tips(), vec![3]);

        let outstar = TreeDiagram::builtin(BuiltinFamily::OutStar(3)).unwrap();
        assert_eq!(outstar.roots(), vec![1]);
        assert_eq!(outstar.tips(), vec![2, 3, 4]);

        // a:N,0 and path:N agree.
        let a30 = TreeDiagram::builtin(BuiltinFamily::BranchedPath(3, 0)).unwrap();
        assert_eq!(a30, TreeDiagram::builtin(BuiltinFamily::Path(3)).unwrap());

        let single = TreeDiagram::builtin(BuiltinFamily::Path(1)).unwrap();
        assert_eq!(single.roots(), vec![1]);
        assert_eq!(single.tips(), vec![1]);
    }

    #[test]
    fn figure1_structure() {
        let d = figure1();
        assert_eq!(d.node_count(), 6);
        assert_eq!(d.roots(), vec![1, 2]);
        assert_eq!(d.tips(), vec![5, 6]);
        assert_eq!(
            d.edges(),
            &[
                Edge { tail: 1, head: 3, weight: 1 },
                Edge { tail: 2, head: 3, weight: 1 },
                Edge { tail: 3, head: 4, weight: 2 },
                Edge { tail: 4, head: 5, weight: 1 },
                Edge { tail: 4, head: 6, weight: 1 },
            ]
        );
    }

    #[test]
    fn parse_render_round_trip() {
        let d = figure1();
        let text = d.render();
        assert_eq!(TreeDiagram::parse(&text).unwrap(), d);

        let with_noise = "# a comment\n\nnodes 2\n  edge 1 2 3   # weighted\n";
        let parsed = TreeDiagram::parse(with_noise).unwrap();
        assert_eq!(parsed, TreeDiagram::builtin(BuiltinFamily::MultiEdge(3)).unwrap());
    }

    #[test]
    fn parse_errors() {
        // Missing nodes line.
        assert!(matches!(
            TreeDiagram::parse("edge 1 2 1\n"),
            Err(DiagramError::Syntax { line: 1, .. })
        ));
        // Bad token with position.
        let err = TreeDiagram::parse("nodes 2\nedge 1 x 1\n").unwrap_err();
        assert_eq!(
            err,
            DiagramError::Syntax {
                line: 2,
                col: 8,
                msg: "expected a nonnegative integer, found \"x\"".into()
            }
        );
        // Unknown directive.
        assert!(matches!(
            TreeDiagram::parse("nodes 1\nvertex 1\n"),
            Err(DiagramError::Syntax { line: 2, col: 1, .. })
        ));
    }

    #[test]
    fn validation_errors() {
        let e = |t, h, w| Edge { tail: t, head: h, weight: w };
        assert_eq!(TreeDiagram::new(0, vec![]), Err(DiagramError::NoNodes));
        assert_eq!(
            TreeDiagram::new(2, vec![e(2, 1, 1)]),
            Err(DiagramError::EdgeOrder { tail: 2, head: 1 })
        );
        assert_eq!(
            TreeDiagram::new(2, vec![e(1, 1, 1)]),
            Err(DiagramError::EdgeOrder { tail: 1, head: 1 })
        );
        assert_eq!(
            TreeDiagram::new(2, vec![e(1, 2, 0)]),
            Err(DiagramError::ZeroWeight { tail: 1, head: 2 })
        );
        assert_eq!(
            TreeDiagram::new(2, vec![e(1, 3, 1)]),
            Err(DiagramError::EdgeOutOfRange { tail: 1, head: 3, nodes: 2 })
        );
        assert_eq!(
            TreeDiagram::new(3, vec![e(1, 2, 1)]),
            Err(DiagramError::EdgeCount { nodes: 3, found: 1 })
        );
        assert_eq!(
            TreeDiagram::new(3, vec![e(1, 2, 1), e(1, 2, 2)]),
            Err(DiagramError::DuplicateEdge { tail: 1, head: 2 })
        );
        assert_eq!(
            TreeDiagram::new(4, vec![e(1, 2, 1), e(1, 2, 2), e(3, 4, 1)]),
            Err(DiagramError::DuplicateEdge { tail: 1, head: 2 })
        );
        // Right count, still disconnected (needs n >= 5 to avoid duplicates).
        assert_eq!(
            TreeDiagram::new(5, vec![e(1, 2, 1), e(1, 3, 1), e(2, 3, 1), e(4, 5, 1)]),
            Err(DiagramError::Disconnected { node: 4 })
        );
    }

    #[test]
    fn chains_and_closures() {
        let d = figure1();
        assert_eq!(d.chain(1, 5).unwrap(), Some(vec![1, 3, 4, 5]));
        assert_eq!(d.chain(1, 2).unwrap(), None);
        assert_eq!(d.chain(5, 1).unwrap(), None);
        assert_eq!(d.chain(4, 4).unwrap(), Some(vec![4]));

        let c4: Vec<NodeId> = d.node_closure(4, Direction::Up).unwrap().into_iter().collect();
        assert_eq!(c4, vec![1, 2, 3, 4]);
        let d3: Vec<NodeId> = d.node_closure(3, Direction::Down).unwrap().into_iter().collect();
        assert_eq!(d3, vec![3, 4, 5, 6]);
        // A root's upward closure is itself.
        let c1: Vec<NodeId> = d.node_closure(1, Direction::Up).unwrap().into_iter().collect();
        assert_eq!(c1, vec![1]);

        // chain(i, j) exists exactly when j is in the downward closure of i.
        for i in 1..=6 {
            let down = d.node_closure(i, Direction::Down).unwrap();
            for j in 1..=6 {
                assert_eq!(d.chain(i, j).unwrap().is_some(), down.contains(&j));
            }
        }
    }

    #[test]
    fn kappa_values() {
        let d = figure1();
        for root in d.roots() {
            assert_eq!(d.kappa(root).unwrap(), BigInt::from(1));
        }
        assert_eq!(d.kappa(3).unwrap(), BigInt::from(1));
        assert_eq!(d.kappa(4).unwrap(), BigInt::from(2));
        assert_eq!(d.kappa(5).unwrap(), BigInt::from(2));
        assert_eq!(d.kappa_rel(4, 5).unwrap(), BigInt::from(2));
        assert_eq!(d.kappa_rel(1, 5).unwrap(), BigInt::from(1));
        assert_eq!(d.kappa_rel(3, 4).unwrap(), BigInt::from(1));
        assert_eq!(
            d.kappa_rel(1, 2),
            Err(DiagramError::EmptyChain { from: 1, to: 2 })
        );

        // kappa_rel(i, j) * chain weight product == kappa(j) on every chain.
        for i in 1..=6 {
            for j in 1..=6 {
                if let Some(edges) = d.chain_edges(i, j).unwrap() {
                    let prod: u64 = edges.iter().map(|e| e.weight).product();
                    assert_eq!(
                        d.kappa_rel(i, j).unwrap() * BigInt::from(prod),
                        d.kappa(j).unwrap()
                    );
                }
            }
        }

        let multi = TreeDiagram::builtin(BuiltinFamily::MultiEdge(4)).unwrap();
        assert_eq!(multi.kappa(2).unwrap(), BigInt::from(4));
        assert_eq!(multi.kappa_rel(1, 2).unwrap(), BigInt::from(1));
    }

    #[test]
    fn homoclan_checks() {
        let d = figure1();
        let (sub, emb) = d.induced(&[1, 2, 3, 4]).unwrap();
        assert_eq!(emb, vec![1, 2, 3, 4]);
        assert_eq!(sub.edges().len(), 3);
        assert!(is_homoclan(&sub, &emb, &d).unwrap());

        // A lone tip is not ancestor-closed.
        let (tip, emb) = d.induced(&[5]).unwrap();
        assert!(!is_homoclan(&tip, &emb, &d).unwrap());

        // Whole diagram into itself.
        let all: Vec<NodeId> = (1..=6).collect();
        assert!(is_homoclan(&d, &all, &d).unwrap());

        // path(i) sits inside a branched path for i <= n+1.
        let a22 = TreeDiagram::builtin(BuiltinFamily::BranchedPath(2, 2)).unwrap();
        for i in 1..=3 {
            let p = TreeDiagram::builtin(BuiltinFamily::Path(i)).unwrap();
            let emb: Vec<NodeId> = (1..=i).collect();
            assert!(is_homoclan(&p, &emb, &a22).unwrap(), "path({i}) in a(2,2)");
        }

        // Weight mismatch breaks the subdiagram condition.
        let (mut sub4, emb4) = d.induced(&[1, 2, 3, 4]).unwrap();
        sub4.edges[2].weight = 1;
        assert!(!is_homoclan(&sub4, &emb4, &d).unwrap());

        // Disconnected induced sets are rejected.
        assert!(matches!(
            d.induced(&[1, 5]),
            Err(DiagramError::InducedDisconnected(_))
        ));

        // Bad embeddings are errors, not `false`.
        assert!(is_homoclan(&sub, &[1, 2, 3], &d).is_err());
        assert!(is_homoclan(&sub, &[1, 1, 3, 4], &d).is_err());
        assert!(is_homoclan(&sub, &[1, 2, 3, 9], &d).is_err());
    }

    #[test]
    fn builtin_specs_parse() {
        for (s, f) in [
            ("path:3", BuiltinFamily::Path(3)),
            ("a:1,2", BuiltinFamily::BranchedPath(1, 2)),
            ("multi:4", BuiltinFamily::MultiEdge(4)),
            ("instar:2", BuiltinFamily::InStar(2)),
            ("outstar:3", BuiltinFamily::OutStar(3)),
            ("figure1", BuiltinFamily::Figure1),
        ] {
            assert_eq!(s.parse::<BuiltinFamily>().unwrap(), f);
            assert_eq!(f.to_string(), s);
        }
        assert!("ring:3".parse::<BuiltinFamily>().is_err());
        assert!("a:1".parse::<BuiltinFamily>().is_err());
        assert!("path".parse::<BuiltinFamily>().is_err());
        assert!("figure1:2".parse::<BuiltinFamily>().is_err());
        assert!(TreeDiagram::builtin(BuiltinFamily::Path(0)).is_err());
        assert!(TreeDiagram::builtin(BuiltinFamily::MultiEdge(0)).is_err());
    }
}
