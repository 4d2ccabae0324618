//! Plain-text edge lists: a header line `n m`, then one `u v` pair per line,
//! 0-based, LF-terminated. Blank lines and lines starting with `#` are
//! skipped when reading.

use std::io::{BufRead, Write};

use super::{Graph, GraphError, NodeId};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<(), GraphError> {
    writeln!(out, "{} {}", g.node_count(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}

fn skippable(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#')
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph, GraphError> {
    let mut lines = input.lines().enumerate();
    let parse_err = |line: usize, reason: String| GraphError::Parse { line: line + 1, reason };
    let (header_no, header) = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                if !skippable(&line) {
                    break (i, line);
                }
            }
            None => return Err(parse_err(0, "missing header".into())),
        }
    };
    let (n, m) = parse_pair::<usize>(&header).map_err(|r| parse_err(header_no, r))?;
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        let line = line?;
        if skippable(&line) {
            continue;
        }
        edges.push(parse_pair::<NodeId>(&line).map_err(|r| parse_err(i, r))?);
    }
    if edges.len() != m {
        return Err(parse_err(
            header_no,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    let g = Graph::from_edges(n, edges)?;
    if g.edge_count() != m {
        return Err(parse_err(header_no, "edge list contains duplicate edges".into()));
    }
    Ok(g)
}

fn parse_pair<T: std::str::FromStr>(line: &str) -> Result<(T, T), String> {
    let mut it = line.split_whitespace();
    let mut next = || {
        it.next()
            .ok_or_else(|| format!("expected two integers in {line:?}"))?
            .parse::<T>()
            .map_err(|_| format!("not an integer in {line:?}"))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(format!("trailing fields in {line:?}"));
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_exact_format() {
        let g = Graph::path(3);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "3 2\n0 1\n1 2\n");
    }

    #[test]
    fn round_trips() {
        let g = Graph::cycle(7);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(read_edge_list(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn skips_comments() {
        let text = "# seed=3\n\n3 1\n# middle\n0 2\n";
        assert_eq!(
            read_edge_list(text.as_bytes()).unwrap(),
            Graph::from_edges(3, [(0, 2)]).unwrap()
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_edge_list("".as_bytes()).is_err());
        assert!(read_edge_list("3 2\n0 1\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 x\n".as_bytes()).is_err());
        assert!(read_edge_list("3 2\n0 1\n1 0\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 5\n".as_bytes()).is_err());
    }
}
