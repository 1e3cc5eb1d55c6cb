//! JSON network documents and CSV report tables.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{fmt_float, round_sig, Hypernetwork, Network, ReceptionMap};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum NodeId {
    Num(i64),
    Text(String),
}

impl NodeId {
    fn into_string(self) -> String {
        match self {
            NodeId::Num(n) => n.to_string(),
            NodeId::Text(s) => s,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ArcDoc {
    tail: NodeId,
    head: NodeId,
    cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cap: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct HyperarcDoc {
    tail: NodeId,
    heads: Vec<NodeId>,
    cost: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkDoc {
    tail: NodeId,
    head: NodeId,
    p: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct LossDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    links: Vec<LinkDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    nodes: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    arcs: Vec<ArcDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    hyperarcs: Vec<HyperarcDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    loss: Option<LossDoc>,
}

/// A parsed network document.
#[derive(Clone, Debug, PartialEq)]
pub enum NetworkDoc {
    Wireline(Network),
    Wireless(Hypernetwork),
}

fn text_id(name: &str) -> NodeId {
    NodeId::Text(name.to_string())
}

fn lookup(names: &std::collections::HashMap<String, usize>, id: NodeId) -> Result<usize> {
    let s = id.into_string();
    names.get(&s).copied().ok_or(Error::UnknownNode(s))
}

/// Parse a network document. Documents with hyperarcs yield a
/// [`Hypernetwork`], otherwise a [`Network`].
pub fn read_network(text: &str) -> Result<NetworkDoc> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    let names: Vec<String> = doc.nodes.into_iter().map(NodeId::into_string).collect();
    let index: std::collections::HashMap<String, usize> =
        names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    if !doc.arcs.is_empty() && !doc.hyperarcs.is_empty() {
        return Err(Error::Document("a document holds either arcs or hyperarcs, not both".into()));
    }
    if doc.hyperarcs.is_empty() && doc.loss.is_none() {
        let mut net = Network::new(names)?;
        for a in doc.arcs {
            let (t, h) = (lookup(&index, a.tail)?, lookup(&index, a.head)?);
            net.add_arc(t, h, a.cost, a.cap.unwrap_or(f64::INFINITY))?;
        }
        return Ok(NetworkDoc::Wireline(net));
    }
    let mut hn = Hypernetwork::new(names)?;
    for h in doc.hyperarcs {
        let tail = lookup(&index, h.tail)?;
        let heads = h.heads.into_iter().map(|j| lookup(&index, j)).collect::<Result<Vec<_>>>()?;
        hn.add_hyperarc(tail, &heads, h.cost)?;
    }
    if let Some(loss) = doc.loss {
        if let Some(pos) = &loss.positions {
            hn.set_positions(pos.iter().map(|p| (p[0], p[1])).collect())
                .map_err(|e| Error::Document(e.to_string()))?;
        }
        let mut map = ReceptionMap::new();
        if !loss.links.is_empty() {
            for l in loss.links {
                map.set(lookup(&index, l.tail)?, lookup(&index, l.head)?, l.p)?;
            }
        } else {
            let (Some(beta), Some(pos)) = (loss.beta, hn.positions()) else {
                return Err(Error::Document("loss model needs links or beta with positions".into()));
            };
            if !(beta > 0.0) {
                return Err(Error::Document(format!("beta {beta} must be positive")));
            }
            for h in hn.hyperarcs() {
                for &j in &h.heads {
                    let (a, b) = (pos[h.tail], pos[j]);
                    let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
                    map.set(h.tail, j, (-beta * d2).exp())?;
                }
            }
        }
        hn.set_reception(map);
    }
    Ok(NetworkDoc::Wireless(hn))
}

fn r12(x: f64) -> f64 {
    round_sig(x, 12)
}

pub fn write_network(net: &Network) -> String {
    let doc = Document {
        nodes: net.names().iter().map(|n| text_id(n)).collect(),
        arcs: net
            .arcs()
            .iter()
            .map(|a| ArcDoc {
                tail: text_id(net.name(a.tail)),
                head: text_id(net.name(a.head)),
                cost: r12(a.cost),
                cap: a.capacity.is_finite().then(|| r12(a.capacity)),
            })
            .collect(),
        hyperarcs: Vec::new(),
        loss: None,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn write_hypernetwork(h: &Hypernetwork) -> String {
    let name = |i: usize| text_id(h.name(i));
    let loss = h.reception().map(|m| LossDoc {
        beta: None,
        positions: h.positions().map(|p| p.iter().map(|&(x, y)| [r12(x), r12(y)]).collect()),
        links: m
            .entries()
            .into_iter()
            .map(|(i, j, p)| LinkDoc { tail: name(i), head: name(j), p: r12(p) })
            .collect(),
    });
    let doc = Document {
        nodes: h.names().iter().map(|n| text_id(n)).collect(),
        arcs: Vec::new(),
        hyperarcs: h
            .hyperarcs()
            .iter()
            .map(|a| HyperarcDoc {
                tail: name(a.tail),
                heads: a.heads.iter().map(|&j| name(j)).collect(),
                cost: r12(a.cost),
            })
            .collect(),
        loss,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn load_network(path: &std::path::Path) -> Result<NetworkDoc> {
    read_network(&std::fs::read_to_string(path)?)
}

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A CSV table with a header row; floats render with 12 significant digits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::netmodel::io::Cell::from($x)),*]
    };
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.header.len(), "row width must match the header");
        self.rows.push(cells.iter().map(Cell::render).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Document(format!("missing column `{name}`")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<&str>> {
        let c = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[c].as_str()).collect())
    }

    pub fn float_column(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Document(format!("`{s}` in `{name}` is not a number"))))
            .collect()
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn read<R: Read>(r: R) -> Result<Table> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.iter().map(str::to_string).collect();
        let rows = rd
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Table { header, rows })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        self.write(std::fs::File::create(path)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Table> {
        Table::read(std::fs::File::open(path)?)
    }
}
