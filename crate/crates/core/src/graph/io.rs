//! Edge-list text format: one edge per line, `u v` or `u v w`, 0-indexed,
//! `#` starts a comment line.

use std::fmt::Write as _;
use std::io::BufRead;

use super::Graph;
use crate::error::{Error, Result};

/// Parses an edge list. The node count is `max index + 1` unless `n` is given.
pub fn read_edge_list(reader: impl BufRead, n: Option<usize>) -> Result<Graph> {
    let mut plain = Vec::new();
    let mut weighted = Vec::new();
    let mut max_node = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let parse_node = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("bad node `{s}`: {e}"),
            })
        };
        let (u, v) = match fields.as_slice() {
            [u, v] | [u, v, _] => (parse_node(u)?, parse_node(v)?),
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected 2 or 3 fields, found {}", fields.len()),
                })
            }
        };
        max_node = Some(max_node.unwrap_or(0).max(u).max(v));
        if let [_, _, w] = fields.as_slice() {
            let w: f64 = w.parse().map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("bad weight `{w}`: {e}"),
            })?;
            weighted.push((u, v, w));
        } else {
            plain.push((u, v));
        }
    }
    if !plain.is_empty() && !weighted.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "either every edge carries a weight or none does".into(),
        });
    }
    let n = n.unwrap_or(max_node.map_or(0, |m| m + 1));
    if weighted.is_empty() {
        Graph::new(n, plain)
    } else {
        Graph::weighted(n, weighted)
    }
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nodes {}", g.node_count());
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        match g.weights() {
            Some(w) => {
                let _ = writeln!(out, "{u} {v} {}", w[id]);
            }
            None => {
                let _ = writeln!(out, "{u} {v}");
            }
        }
    }
    out
}

/// Reads an edge list, honouring a leading `# nodes N` comment written by
/// [`write_edge_list`] so isolated trailing nodes survive a round trip.
pub fn read_edge_list_str(text: &str) -> Result<Graph> {
    let n = text.lines().find_map(|l| {
        l.trim()
            .strip_prefix("# nodes")
            .and_then(|rest| rest.trim().parse::<usize>().ok())
    });
    read_edge_list(text.as_bytes(), n)
}
