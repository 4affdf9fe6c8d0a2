use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::GraphError;
use crate::graph::LabeledGraph;
use crate::sample::QuerySet;

/// Text graph format:
///   t <num_vertices> <num_edges>
///   v <id> <label> <degree>     (one per vertex, ascending id)
///   e <u> <v>                   (one per undirected edge, u < v)
/// ASCII, single spaces, LF line endings.
pub fn load_graph(path: impl AsRef<Path>) -> Result<LabeledGraph, GraphError> {
    let file = fs::File::open(path.as_ref())?;
    read_graph(BufReader::new(file))
}

pub fn read_graph(reader: impl Read) -> Result<LabeledGraph, GraphError> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate();

    let (line_no, header) = next_line(&mut lines)?;
    let fields = split_fields(&header, line_no)?;
    if fields.len() != 3 || fields[0] != "t" {
        return Err(GraphError::parse(line_no, "expected header `t <vertices> <edges>`"));
    }
    let num_vertices: usize = parse_int(fields[1], line_no, "vertex count")?;
    let num_edges: usize = parse_int(fields[2], line_no, "edge count")?;

    let mut labels = Vec::with_capacity(num_vertices);
    let mut declared_degrees = Vec::with_capacity(num_vertices);
    for expected_id in 0..num_vertices {
        let (line_no, line) = next_line(&mut lines)?;
        let fields = split_fields(&line, line_no)?;
        if fields.len() != 4 || fields[0] != "v" {
            return Err(GraphError::parse(line_no, "expected `v <id> <label> <degree>`"));
        }
        let id: usize = parse_int(fields[1], line_no, "vertex id")?;
        if id != expected_id {
            return Err(GraphError::parse(
                line_no,
                format!("vertex ids must be dense and ascending; expected {expected_id}, got {id}"),
            ));
        }
        labels.push(parse_int(fields[2], line_no, "label")?);
        declared_degrees.push(parse_int(fields[3], line_no, "degree")?);
    }

    let mut edges = Vec::with_capacity(num_edges);
    for _ in 0..num_edges {
        let (line_no, line) = next_line(&mut lines)?;
        let fields = split_fields(&line, line_no)?;
        if fields.len() != 3 || fields[0] != "e" {
            return Err(GraphError::parse(line_no, "expected `e <u> <v>`"));
        }
        let u: usize = parse_int(fields[1], line_no, "edge endpoint")?;
        let v: usize = parse_int(fields[2], line_no, "edge endpoint")?;
        if u >= num_vertices || v >= num_vertices {
            return Err(GraphError::parse(line_no, "vertex id out of range"));
        }
        if u >= v {
            return Err(GraphError::parse(line_no, "edge endpoints must satisfy u < v"));
        }
        edges.push((u, v));
    }

    if let Some((line_no, Ok(line))) = lines.next() {
        if !line.trim().is_empty() {
            return Err(GraphError::parse(line_no + 1, "trailing content after edge list"));
        }
    }

    let graph = LabeledGraph::new(labels, &edges)
        .map_err(|e| GraphError::parse(1, format!("inconsistent graph body: {e}")))?;
    for v in 0..num_vertices {
        if graph.degree(v) != declared_degrees[v] {
            return Err(GraphError::parse(
                2 + v,
                format!(
                    "vertex {v} declares degree {} but has {} incident edges",
                    declared_degrees[v],
                    graph.degree(v)
                ),
            ));
        }
    }
    Ok(graph)
}

pub fn save_graph(graph: &LabeledGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let file = fs::File::create(path.as_ref())?;
    let mut writer = BufWriter::new(file);
    write_graph(graph, &mut writer)?;
    writer.flush()?;
    Ok(())
}

pub fn write_graph(graph: &LabeledGraph, writer: &mut impl Write) -> Result<(), GraphError> {
    writeln!(writer, "t {} {}", graph.vertex_count(), graph.edge_count())?;
    for v in 0..graph.vertex_count() {
        writeln!(writer, "v {} {} {}", v, graph.label(v), graph.degree(v))?;
    }
    for (u, v) in graph.edges() {
        writeln!(writer, "e {u} {v}")?;
    }
    Ok(())
}

/// Query set directory layout: `query_<k>.graph` files plus `manifest.txt`
/// recording seed and source.
pub fn save_query_set(set: &QuerySet, dir: impl AsRef<Path>) -> Result<(), GraphError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for (k, query) in set.queries.iter().enumerate() {
        save_graph(query, dir.join(format!("query_{k}.graph")))?;
    }
    let mut manifest = String::new();
    manifest.push_str(&format!("seed={}\n", set.seed));
    manifest.push_str(&format!("source={}\n", set.source));
    manifest.push_str(&format!("count={}\n", set.queries.len()));
    fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(())
}

pub fn load_query_set(dir: impl AsRef<Path>) -> Result<QuerySet, GraphError> {
    let dir = dir.as_ref();
    let manifest = fs::read_to_string(dir.join("manifest.txt"))?;
    let mut seed = 0u64;
    let mut source = String::new();
    let mut count = None;
    for (i, line) in manifest.lines().enumerate() {
        let Some((key, value)) = line.split_once('=') else {
            return Err(GraphError::parse(i + 1, "manifest line is not key=value"));
        };
        match key {
            "seed" => seed = parse_int(value, i + 1, "seed")? as u64,
            "source" => source = value.to_string(),
            "count" => count = Some(parse_int(value, i + 1, "count")?),
            _ => {}
        }
    }
    let count = count.ok_or_else(|| GraphError::parse(1, "manifest missing count"))?;
    let mut queries = Vec::with_capacity(count);
    for k in 0..count {
        queries.push(load_graph(dir.join(format!("query_{k}.graph")))?);
    }
    Ok(QuerySet { queries, seed, source })
}

type NumberedLines<'a, R> = std::iter::Enumerate<std::io::Lines<BufReader<R>>>;

fn next_line<R: Read>(lines: &mut NumberedLines<R>) -> Result<(usize, String), GraphError> {
    loop {
        match lines.next() {
            Some((idx, Ok(line))) => {
                if line.trim().is_empty() {
                    continue;
                }
                return Ok((idx + 1, line));
            }
            Some((idx, Err(e))) => return Err(GraphError::parse(idx + 1, e.to_string())),
            None => return Err(GraphError::parse(0, "unexpected end of file")),
        }
    }
}

fn split_fields(line: &str, line_no: usize) -> Result<Vec<&str>, GraphError> {
    if line.contains('\t') {
        return Err(GraphError::parse(line_no, "tabs are not allowed; use single spaces"));
    }
    Ok(line.split(' ').filter(|f| !f.is_empty()).collect())
}

fn parse_int(field: &str, line_no: usize, what: &str) -> Result<usize, GraphError> {
    field
        .parse::<usize>()
        .map_err(|_| GraphError::parse(line_no, format!("invalid {what}: `{field}`")))
}
