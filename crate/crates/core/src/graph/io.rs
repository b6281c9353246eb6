//! Network file formats.
//!
//! Canonical attributed format (whitespace-separated ASCII decimal):
//!
//! ```text
//! N M
//! id age gender income      (N lines, id ascending)
//! u v duration meeting_type (M lines)
//! ```
//!
//! The plain edge-list format is one `u v` pair per line; duration defaults
//! to 1 second and meeting type to `other`. Saving always emits the
//! canonical attributed form: node lines by id, edge lines sorted by
//! `(min endpoint, max endpoint, duration, type)`.

use super::{
    ContactEdge, ContactNetwork, Demographics, Gender, GraphError, MeetingType, NodeId, MAX_AGE,
};
use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    /// `u v` pairs with default duration 1 and type `other`.
    EdgeList,
    /// Canonical header + node + edge lines.
    Attributed,
}

pub fn load_network(path: &Path, format: FileFormat) -> Result<ContactNetwork, GraphError> {
    let text = fs::read_to_string(path)?;
    parse_network(&text, format)
}

pub fn parse_network(text: &str, format: FileFormat) -> Result<ContactNetwork, GraphError> {
    match format {
        FileFormat::EdgeList => parse_edge_list(text),
        FileFormat::Attributed => parse_attributed(text),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, GraphError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

/// Durations are parsed signed first so a negative value reports as such
/// rather than as a generic integer parse failure.
fn parse_duration(tok: &str, line: usize) -> Result<u32, GraphError> {
    let raw: i64 = parse_field(tok, line, "duration")?;
    if raw < 0 {
        return Err(GraphError::NegativeDuration { line });
    }
    u32::try_from(raw).map_err(|_| parse_err(line, format!("duration `{tok}` out of range")))
}

fn parse_edge_line(
    tokens: &[&str],
    line: usize,
    n: usize,
    default_edge: bool,
) -> Result<ContactEdge, GraphError> {
    let expected = if default_edge { 2 } else { 4 };
    if tokens.len() != expected {
        return Err(parse_err(
            line,
            format!("expected {expected} fields, found {}", tokens.len()),
        ));
    }
    let u: u32 = parse_field(tokens[0], line, "node id")?;
    let v: u32 = parse_field(tokens[1], line, "node id")?;
    if u == v {
        return Err(GraphError::SelfLoop { line, node: u });
    }
    for id in [u, v] {
        if id as usize >= n {
            return Err(GraphError::DanglingNode { line, node: id });
        }
    }
    let (duration, meeting_type) = if default_edge {
        (1, MeetingType::Other)
    } else {
        let duration = parse_duration(tokens[2], line)?;
        let code: u32 = parse_field(tokens[3], line, "meeting type")?;
        let meeting_type = MeetingType::from_code(code)
            .ok_or_else(|| parse_err(line, format!("meeting type `{code}` not in 1..=6")))?;
        (duration, meeting_type)
    };
    Ok(ContactEdge {
        u: NodeId(u),
        v: NodeId(v),
        duration,
        meeting_type,
    })
}

fn parse_edge_list(text: &str) -> Result<ContactNetwork, GraphError> {
    let mut raw_edges = Vec::new();
    let mut max_id = 0u32;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        // Ids define the node set here, so bounds are checked afterwards.
        let edge = parse_edge_line(&tokens, line, usize::MAX, true)?;
        max_id = max_id.max(edge.u.0).max(edge.v.0);
        raw_edges.push(edge);
    }
    if raw_edges.is_empty() {
        return Err(parse_err(1, "empty edge list"));
    }
    let n = max_id as usize + 1;
    let demographics = vec![
        Demographics {
            age: 0,
            gender: Gender::Female,
            income: 0,
        };
        n
    ];
    Ok(ContactNetwork::new(demographics, raw_edges))
}

fn parse_attributed(text: &str) -> Result<ContactNetwork, GraphError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(parse_err(line, "header must be `N M`"));
    }
    let n: usize = parse_field(tokens[0], line, "node count")?;
    let m: usize = parse_field(tokens[1], line, "edge count")?;

    let mut demographics = Vec::with_capacity(n);
    for expect in 0..n {
        let (line, raw) = lines
            .next()
            .ok_or_else(|| parse_err(expect + 2, "unexpected end of file in node section"))?;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(parse_err(line, "node line must be `id age gender income`"));
        }
        let id: usize = parse_field(tokens[0], line, "node id")?;
        if id != expect {
            return Err(parse_err(line, format!("node ids must be dense; expected {expect}, found {id}")));
        }
        let age: u32 = parse_field(tokens[1], line, "age")?;
        if age > MAX_AGE {
            return Err(parse_err(line, format!("age {age} exceeds {MAX_AGE}")));
        }
        let gender_code: u32 = parse_field(tokens[2], line, "gender")?;
        let gender = Gender::from_code(gender_code)
            .ok_or_else(|| parse_err(line, format!("gender code `{gender_code}` not in {{0,1}}")))?;
        let income: u32 = parse_field(tokens[3], line, "income")?;
        demographics.push(Demographics { age, gender, income });
    }

    let mut edges = Vec::with_capacity(m);
    for count in 0..m {
        let (line, raw) = lines
            .next()
            .ok_or_else(|| parse_err(n + count + 2, "unexpected end of file in edge section"))?;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        edges.push(parse_edge_line(&tokens, line, n, false)?);
    }
    if let Some((line, raw)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(line, format!("trailing content `{}`", raw.trim())));
    }
    Ok(ContactNetwork::new(demographics, edges))
}

/// Render the canonical attributed form.
pub fn canonical_string(net: &ContactNetwork) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", net.node_count(), net.edge_count()));
    for v in net.nodes() {
        let d = net.demographics(v);
        out.push_str(&format!("{} {} {} {}\n", v, d.age, d.gender.code(), d.income));
    }
    let mut keys: Vec<(u32, u32, u32, u32)> = net
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = if e.u.0 <= e.v.0 { (e.u.0, e.v.0) } else { (e.v.0, e.u.0) };
            (a, b, e.duration, e.meeting_type.code())
        })
        .collect();
    keys.sort_unstable();
    for (a, b, duration, ty) in keys {
        out.push_str(&format!("{a} {b} {duration} {ty}\n"));
    }
    out
}

pub fn save_network(net: &ContactNetwork, path: &Path) -> Result<(), GraphError> {
    let mut file = fs::File::create(path)?;
    file.write_all(canonical_string(net).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degree_stats;

    #[test]
    fn triangle_edge_list() {
        let net = parse_network("0 1\n1 2\n0 2\n", FileFormat::EdgeList).unwrap();
        let stats = degree_stats(&net);
        assert_eq!(stats.n, 3);
        assert_eq!(stats.avg_degree, 2.0);
    }

    #[test]
    fn self_loop_rejected_with_line() {
        let mut text = String::from("6 1\n");
        for id in 0..6 {
            text.push_str(&format!("{id} 30 0 100\n"));
        }
        text.push_str("5 5 100 2\n");
        match parse_network(&text, FileFormat::Attributed).unwrap_err() {
            GraphError::SelfLoop { line, node } => {
                assert_eq!(line, 8);
                assert_eq!(node, 5);
            }
            other => panic!("expected self-loop error, got {other}"),
        }
        // Same rejection in the plain edge-list format.
        assert!(matches!(
            parse_network("0 1\n5 5\n", FileFormat::EdgeList).unwrap_err(),
            GraphError::SelfLoop { line: 2, node: 5 }
        ));
    }

    #[test]
    fn attributed_round_trip_is_canonical() {
        let text = "3 2\n0 34 0 52000\n1 8 1 0\n2 61 0 18000\n0 1 25000 2\n1 2 300 3\n";
        let net = parse_network(text, FileFormat::Attributed).unwrap();
        assert_eq!(canonical_string(&net), text);
    }

    #[test]
    fn attributed_rejects_dangling_and_negative() {
        let dangling = "2 1\n0 10 0 0\n1 11 1 0\n0 7 5 1\n";
        assert!(matches!(
            parse_network(dangling, FileFormat::Attributed).unwrap_err(),
            GraphError::DanglingNode { line: 4, node: 7 }
        ));
        let negative = "2 1\n0 10 0 0\n1 11 1 0\n0 1 -5 1\n";
        assert!(matches!(
            parse_network(negative, FileFormat::Attributed).unwrap_err(),
            GraphError::NegativeDuration { line: 4 }
        ));
    }

    #[test]
    fn parse_error_carries_line_number() {
        let bad = "2 1\n0 10 0 0\n1 eleven 1 0\n0 1 5 1\n";
        match parse_network(bad, FileFormat::Attributed).unwrap_err() {
            GraphError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn derived_table_shape_avg_degree() {
        // A file with 10,670 nodes and 21,999 edges must report
        // avg degree 2|E|/N = 4.1237...
        let n = 10_670usize;
        let m = 21_999usize;
        let mut text = format!("{n} {m}\n");
        for id in 0..n {
            text.push_str(&format!("{id} 30 0 1000\n"));
        }
        // Ring plus chords: n ring edges would overshoot, so n-1 path edges
        // then chords (i, i+2) until m edges total.
        let mut written = 0;
        for i in 0..n - 1 {
            text.push_str(&format!("{} {} 60 6\n", i, i + 1));
            written += 1;
        }
        let mut i = 0;
        while written < m {
            // Wrap both endpoints; repeats are fine, parallel edges are
            // allowed and each still counts toward |E|.
            text.push_str(&format!("{} {} 60 6\n", i % n, (i + 2) % n));
            written += 1;
            i += 1;
        }
        let net = parse_network(&text, FileFormat::Attributed).unwrap();
        let stats = degree_stats(&net);
        assert_eq!(stats.n, 10_670);
        assert_eq!(net.edge_count(), 21_999);
        assert!((stats.avg_degree - 2.0 * 21_999.0 / 10_670.0).abs() < 1e-12);
        assert!((stats.avg_degree - 4.12).abs() < 0.01);
    }
}
