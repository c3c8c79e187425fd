//! Core-network topology: nodes with population shares and datacenter/fog
//! placement, undirected links with distances, and the line-oriented file
//! format they are stored in.
//!
//! ```text
//! [nodes]
//! # id,name,population_share,has_datacenter,has_fog
//! 1,Seattle,0.5,1,0
//! 2,Denver,0.5,0,0
//! [links]
//! # m,n,distance_km
//! 1,2,1641
//! ```

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Shares must sum to one within this tolerance.
pub const SHARE_SUM_TOLERANCE: f64 = 1e-9;

const ATT25: &str = include_str!("../data/att25.topo");

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    /// 1-based node index.
    pub id: usize,
    pub name: String,
    /// Fraction of all users located at this node.
    pub population_share: f64,
    pub has_datacenter: bool,
    /// A fog datacenter sits next to this node (used by cloud-fog delivery).
    pub has_fog: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkRecord {
    pub m: usize,
    pub n: usize,
    pub distance_km: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: Vec<NodeRecord>,
    links: Vec<LinkRecord>,
}

impl Topology {
    /// Builds and validates a topology. Nodes are reordered by id.
    pub fn new(mut nodes: Vec<NodeRecord>, links: Vec<LinkRecord>) -> Result<Self> {
        nodes.sort_by_key(|n| n.id);
        let topo = Topology { nodes, links };
        topo.validate()?;
        Ok(topo)
    }

    /// The bundled 25-node, 54-link AT&T-like US core network.
    pub fn att25() -> Self {
        Self::parse(ATT25, Path::new("<att25>")).expect("bundled att25 dataset is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Nodes,
            Links,
        }

        let err = |line: usize, message: String| Error::Parse {
            path: PathBuf::from(path),
            line,
            message,
        };

        let mut section = Section::None;
        let mut nodes = Vec::new();
        let mut links = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            match line {
                "[nodes]" => {
                    section = Section::Nodes;
                    continue;
                }
                "[links]" => {
                    section = Section::Links;
                    continue;
                }
                _ if line.starts_with('[') => {
                    return Err(err(lineno, format!("unknown section {line}")));
                }
                _ => {}
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match section {
                Section::None => {
                    return Err(err(lineno, "record outside of a section".into()));
                }
                Section::Nodes => {
                    if fields.len() != 5 {
                        return Err(err(
                            lineno,
                            format!("expected 5 node fields, found {}", fields.len()),
                        ));
                    }
                    nodes.push(NodeRecord {
                        id: parse_field(fields[0], "id").map_err(|m| err(lineno, m))?,
                        name: fields[1].to_string(),
                        population_share: parse_field(fields[2], "population_share")
                            .map_err(|m| err(lineno, m))?,
                        has_datacenter: parse_flag(fields[3]).map_err(|m| err(lineno, m))?,
                        has_fog: parse_flag(fields[4]).map_err(|m| err(lineno, m))?,
                    });
                }
                Section::Links => {
                    if fields.len() != 3 {
                        return Err(err(
                            lineno,
                            format!("expected 3 link fields, found {}", fields.len()),
                        ));
                    }
                    links.push(LinkRecord {
                        m: parse_field(fields[0], "m").map_err(|m| err(lineno, m))?,
                        n: parse_field(fields[1], "n").map_err(|m| err(lineno, m))?,
                        distance_km: parse_field(fields[2], "distance_km")
                            .map_err(|m| err(lineno, m))?,
                    });
                }
            }
        }
        Topology::new(nodes, links)
    }

    /// Serializes to the text format accepted by [`Topology::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::from("[nodes]\n");
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                n.id,
                n.name,
                n.population_share,
                u8::from(n.has_datacenter),
                u8::from(n.has_fog)
            );
        }
        out.push_str("[links]\n");
        for l in &self.links {
            let _ = writeln!(out, "{},{},{}", l.m, l.n, l.distance_km);
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Topology(msg));
        if self.nodes.is_empty() {
            return bad("no nodes".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i + 1 {
                return bad(format!(
                    "node ids must be unique and contiguous from 1; found {} at position {}",
                    node.id,
                    i + 1
                ));
            }
            if node.name.is_empty() {
                return bad(format!("node {} has an empty name", node.id));
            }
            if !node.population_share.is_finite() || node.population_share < 0.0 {
                return bad(format!(
                    "node {} has invalid population share {}",
                    node.id, node.population_share
                ));
            }
        }
        let total: f64 = self.nodes.iter().map(|n| n.population_share).sum();
        if (total - 1.0).abs() > SHARE_SUM_TOLERANCE {
            return bad(format!("population shares sum to {total}, expected 1"));
        }

        let count = self.nodes.len();
        let mut seen = HashSet::new();
        for link in &self.links {
            if link.m == link.n {
                return bad(format!("self-loop at node {}", link.m));
            }
            for end in [link.m, link.n] {
                if end == 0 || end > count {
                    return bad(format!(
                        "link {}-{} references unknown node {end}",
                        link.m, link.n
                    ));
                }
            }
            if !link.distance_km.is_finite() || link.distance_km <= 0.0 {
                return bad(format!(
                    "link {}-{} has non-positive distance {}",
                    link.m, link.n, link.distance_km
                ));
            }
            if !seen.insert((link.m.min(link.n), link.m.max(link.n))) {
                return bad(format!("duplicate link {}-{}", link.m, link.n));
            }
        }

        let adjacency = self.adjacency();
        let mut visited = vec![false; count];
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adjacency[u] {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if let Some(lost) = visited.iter().position(|v| !v) {
            return bad(format!(
                "graph is disconnected: node {} unreachable",
                lost + 1
            ));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn links(&self) -> &[LinkRecord] {
        &self.links
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Looks up a node by its 1-based id.
    pub fn node(&self, id: usize) -> Option<&NodeRecord> {
        id.checked_sub(1).and_then(|i| self.nodes.get(i))
    }

    /// Number of nodes hosting a cloud datacenter.
    pub fn datacenter_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.has_datacenter).count()
    }

    pub fn datacenter_ids(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|n| n.has_datacenter)
            .map(|n| n.id)
            .collect()
    }

    /// Zero-based adjacency lists `(neighbour, distance_km)`, both directions,
    /// each list sorted by neighbour index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for l in &self.links {
            adj[l.m - 1].push((l.n - 1, l.distance_km));
            adj[l.n - 1].push((l.m - 1, l.distance_km));
        }
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        adj
    }

    /// Distance of the link between two 1-based node ids, if adjacent.
    pub fn distance(&self, m: usize, n: usize) -> Option<f64> {
        self.links
            .iter()
            .find(|l| (l.m == m && l.n == n) || (l.m == n && l.n == m))
            .map(|l| l.distance_km)
    }

    /// Ids of the `count` most populous nodes, ties broken by lower id.
    pub fn most_populous(&self, count: usize) -> Vec<usize> {
        let mut order: Vec<&NodeRecord> = self.nodes.iter().collect();
        order.sort_by(|a, b| {
            b.population_share
                .total_cmp(&a.population_share)
                .then(a.id.cmp(&b.id))
        });
        let mut ids: Vec<usize> = order.iter().take(count).map(|n| n.id).collect();
        ids.sort_unstable();
        ids
    }
}

fn parse_field<T: std::str::FromStr>(raw: &str, what: &str) -> std::result::Result<T, String> {
    raw.parse()
        .map_err(|_| format!("cannot parse {what} from {raw:?}"))
}

fn parse_flag(raw: &str) -> std::result::Result<bool, String> {
    match raw {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(format!("expected 0 or 1, found {other:?}")),
    }
}
