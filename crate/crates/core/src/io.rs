//! Text file formats (edge list, node/edge data CSV, solution CSV, solve
//! summary) and the bulk load path behind the CLI.
//!
//! All formats are plain ASCII-compatible text. Floating-point values in the
//! solution file are printed at 17 significant digits, so a write/reload
//! round trip reproduces the solved values exactly.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dsl::{parse_edge_template, parse_node_template, ColumnValue};
use crate::error::{Error, Result};
use crate::graph::{
    EdgeDataRow, EdgeDataTable, EdgeSpec, NodeDataRow, NodeDataTable, NodeId, NodeSpec,
    ProblemGraph,
};
use crate::solver::SolveResult;

fn parse_err(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::ParseError {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

/// Parses edge-list text: one `j k` pair per line, `#` starts a comment,
/// blank lines ignored. Self-loops and repeated pairs are rejected.
pub fn parse_edge_list(text: &str, file: &str) -> Result<Vec<(NodeId, NodeId)>> {
    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(
                file,
                lineno + 1,
                format!("expected `j k`, got {} fields", fields.len()),
            ));
        }
        let mut ids = [0u64; 2];
        for (i, f) in fields.iter().enumerate() {
            ids[i] = f
                .parse::<u64>()
                .map_err(|_| parse_err(file, lineno + 1, format!("invalid node id `{f}`")))?;
        }
        let (a, b) = (NodeId(ids[0]), NodeId(ids[1]));
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if !seen.insert(key) {
            return Err(Error::DuplicateEdge(key.0, key.1));
        }
        pairs.push((a, b));
    }
    Ok(pairs)
}

pub fn read_edge_list(path: &Path) -> Result<Vec<(NodeId, NodeId)>> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, &path.display().to_string())
}

/// One parsed CSV column: a scalar (plain name) or one slot of a vector
/// column family (`name[i]`, indices contiguous from 0).
enum Column {
    Scalar(String),
    VectorSlot(String, usize),
}

fn parse_header(line: &str, file: &str, leading: &[&str]) -> Result<Vec<Column>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() < leading.len() {
        return Err(parse_err(
            file,
            1,
            format!("header must start with {}", leading.join(",")),
        ));
    }
    for (i, want) in leading.iter().enumerate() {
        if fields[i] != *want {
            return Err(parse_err(
                file,
                1,
                format!(
                    "header column {} must be `{want}`, got `{}`",
                    i + 1,
                    fields[i]
                ),
            ));
        }
    }
    let mut columns = Vec::new();
    let mut scalars = BTreeSet::new();
    let mut vectors: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for &field in &fields[leading.len()..] {
        if field.is_empty() {
            return Err(parse_err(file, 1, "empty header column name"));
        }
        if let Some(open) = field.find('[') {
            let name = &field[..open];
            let rest = &field[open + 1..];
            let close = rest
                .find(']')
                .ok_or_else(|| parse_err(file, 1, format!("malformed column `{field}`")))?;
            if name.is_empty() || !rest[close + 1..].is_empty() {
                return Err(parse_err(file, 1, format!("malformed column `{field}`")));
            }
            let idx: usize = rest[..close]
                .parse()
                .map_err(|_| parse_err(file, 1, format!("malformed column `{field}`")))?;
            if scalars.contains(name) {
                return Err(parse_err(
                    file,
                    1,
                    format!("column `{name}` is both scalar and vector"),
                ));
            }
            if !vectors.entry(name.to_string()).or_default().insert(idx) {
                return Err(parse_err(file, 1, format!("duplicate column `{field}`")));
            }
            columns.push(Column::VectorSlot(name.to_string(), idx));
        } else {
            if vectors.contains_key(field) {
                return Err(parse_err(
                    file,
                    1,
                    format!("column `{field}` is both scalar and vector"),
                ));
            }
            if !scalars.insert(field.to_string()) {
                return Err(parse_err(file, 1, format!("duplicate column `{field}`")));
            }
            columns.push(Column::Scalar(field.to_string()));
        }
    }
    for (name, indices) in &vectors {
        for (want, &got) in indices.iter().enumerate() {
            if want != got {
                return Err(parse_err(
                    file,
                    1,
                    format!("vector column `{name}` indices must be contiguous from 0"),
                ));
            }
        }
    }
    Ok(columns)
}

fn parse_value(field: &str, file: &str, lineno: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_err(file, lineno, format!("invalid number `{}`", field.trim())))
}

fn parse_data_row(
    columns: &[Column],
    fields: &[&str],
    file: &str,
    lineno: usize,
) -> Result<BTreeMap<String, ColumnValue>> {
    let mut scalars: BTreeMap<String, f64> = BTreeMap::new();
    let mut vectors: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for (column, field) in columns.iter().zip(fields) {
        let v = parse_value(field, file, lineno)?;
        match column {
            Column::Scalar(name) => {
                scalars.insert(name.clone(), v);
            }
            Column::VectorSlot(name, idx) => {
                vectors.entry(name.clone()).or_default().push((*idx, v));
            }
        }
    }
    let mut bindings = BTreeMap::new();
    for (name, v) in scalars {
        bindings.insert(name, ColumnValue::Scalar(v));
    }
    for (name, mut slots) in vectors {
        slots.sort_by_key(|&(i, _)| i);
        bindings.insert(
            name,
            ColumnValue::Vector(slots.into_iter().map(|(_, v)| v).collect()),
        );
    }
    Ok(bindings)
}

/// Parses node data CSV: header `id,<columns>`, one row per node.
pub fn parse_node_data(text: &str, file: &str) -> Result<NodeDataTable> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(parse_err(file, 1, "missing header"));
    };
    let columns = parse_header(header, file, &["id"])?;
    let mut table = NodeDataTable::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() + 1 {
            return Err(parse_err(
                file,
                lineno + 1,
                format!(
                    "expected {} fields, got {}",
                    columns.len() + 1,
                    fields.len()
                ),
            ));
        }
        let id: u64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(file, lineno + 1, format!("invalid node id `{}`", fields[0])))?;
        let bindings = parse_data_row(&columns, &fields[1..], file, lineno + 1)?;
        table
            .push(NodeDataRow {
                id: NodeId(id),
                bindings,
            })
            .map_err(|_| parse_err(file, lineno + 1, format!("duplicate node id {id}")))?;
    }
    Ok(table)
}

pub fn read_node_data(path: &Path) -> Result<NodeDataTable> {
    let text = fs::read_to_string(path)?;
    parse_node_data(&text, &path.display().to_string())
}

/// Parses edge data CSV: header `j,k,<columns>`, one row per edge.
pub fn parse_edge_data(text: &str, file: &str) -> Result<EdgeDataTable> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(parse_err(file, 1, "missing header"));
    };
    let columns = parse_header(header, file, &["j", "k"])?;
    let mut table = EdgeDataTable::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() + 2 {
            return Err(parse_err(
                file,
                lineno + 1,
                format!(
                    "expected {} fields, got {}",
                    columns.len() + 2,
                    fields.len()
                ),
            ));
        }
        let mut ids = [0u64; 2];
        for i in 0..2 {
            ids[i] = fields[i].trim().parse().map_err(|_| {
                parse_err(file, lineno + 1, format!("invalid node id `{}`", fields[i]))
            })?;
        }
        let bindings = parse_data_row(&columns, &fields[2..], file, lineno + 1)?;
        table.push(EdgeDataRow {
            a: NodeId(ids[0]),
            b: NodeId(ids[1]),
            bindings,
        });
    }
    Ok(table)
}

pub fn read_edge_data(path: &Path) -> Result<EdgeDataTable> {
    let text = fs::read_to_string(path)?;
    parse_edge_data(&text, &path.display().to_string())
}

/// Assembles a full problem from an edge-list file, node data, and objective
/// templates. Nodes appearing only in the edge list get zero objectives with
/// the dimension inferred from the node template and first data row.
pub fn load_problem(
    graph_path: &Path,
    node_data_path: &Path,
    node_template: &str,
    edge_template: &str,
    edge_data_path: Option<&Path>,
) -> Result<ProblemGraph> {
    let node_template = parse_node_template(node_template)?;
    let edge_template = parse_edge_template(edge_template)?;
    let pairs = read_edge_list(graph_path)?;
    let node_data = read_node_data(node_data_path)?;
    let edge_data = edge_data_path.map(read_edge_data).transpose()?;

    let mut graph = ProblemGraph::new();
    graph.add_node_objectives(&node_template, &node_data)?;
    let default_dim = node_data
        .rows()
        .first()
        .map(|r| node_template.infer_dim(&r.bindings))
        .unwrap_or(1);
    for &(a, b) in &pairs {
        for id in [a, b] {
            if graph.node(id).is_none() {
                graph.add_node(NodeSpec::new(id, default_dim))?;
            }
        }
        graph.add_edge(EdgeSpec::new(a, b, Vec::new()))?;
    }
    graph.add_edge_objectives(&edge_template, edge_data.as_ref())?;
    Ok(graph)
}

/// Formats a value at 17 significant digits (exact f64 round trip).
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the solution CSV: `id,x[0],x[1],...`, one row per node in
/// ascending id order. Rows carry exactly as many values as the node's
/// dimension; the header is sized for the largest.
pub fn write_solution(out: &mut dyn Write, result: &SolveResult) -> Result<()> {
    let max_dim = result.x.values().map(Vec::len).max().unwrap_or(0);
    let mut header = String::from("id");
    for k in 0..max_dim {
        header.push_str(&format!(",x[{k}]"));
    }
    writeln!(out, "{header}")?;
    for (id, values) in &result.x {
        let row: Vec<String> = values.iter().map(|&v| fmt17(v)).collect();
        writeln!(out, "{id},{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_solution_file(path: &Path, result: &SolveResult) -> Result<()> {
    let mut buf = Vec::new();
    write_solution(&mut buf, result)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Reads a solution CSV back into per-node values.
pub fn parse_solution(text: &str, file: &str) -> Result<BTreeMap<NodeId, Vec<f64>>> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(parse_err(file, 1, "missing header"));
    };
    if header.split(',').next().map(str::trim) != Some("id") {
        return Err(parse_err(file, 1, "solution header must start with `id`"));
    }
    let mut solution = BTreeMap::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(parse_err(file, lineno + 1, "expected id and values"));
        }
        let id: u64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(file, lineno + 1, format!("invalid node id `{}`", fields[0])))?;
        let mut values = Vec::with_capacity(fields.len() - 1);
        for f in &fields[1..] {
            values.push(parse_value(f, file, lineno + 1)?);
        }
        if solution.insert(NodeId(id), values).is_some() {
            return Err(parse_err(
                file,
                lineno + 1,
                format!("duplicate node id {id}"),
            ));
        }
    }
    Ok(solution)
}

pub fn read_solution(path: &Path) -> Result<BTreeMap<NodeId, Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    parse_solution(&text, &path.display().to_string())
}

/// Writes the solve summary: status, iteration count, objective, final
/// residuals, and the endpoints of the rho trajectory.
pub fn write_summary(out: &mut dyn Write, result: &SolveResult, rho_initial: f64) -> Result<()> {
    let last = result.history.last();
    writeln!(out, "status = {}", result.status)?;
    writeln!(out, "iters = {}", result.iters)?;
    writeln!(out, "objective = {}", fmt17(result.objective))?;
    writeln!(
        out,
        "primal_norm = {}",
        fmt17(last.map_or(0.0, |h| h.primal_norm))
    )?;
    writeln!(
        out,
        "dual_norm = {}",
        fmt17(last.map_or(0.0, |h| h.dual_norm))
    )?;
    writeln!(out, "eps_pri = {}", fmt17(last.map_or(0.0, |h| h.eps_pri)))?;
    writeln!(
        out,
        "eps_dual = {}",
        fmt17(last.map_or(0.0, |h| h.eps_dual))
    )?;
    writeln!(out, "rho_initial = {}", fmt17(rho_initial))?;
    writeln!(
        out,
        "rho_final = {}",
        fmt17(last.map_or(rho_initial, |h| h.rho))
    )?;
    Ok(())
}

pub fn write_summary_file(path: &Path, result: &SolveResult, rho_initial: f64) -> Result<()> {
    let mut buf = Vec::new();
    write_summary(&mut buf, result, rho_initial)?;
    fs::write(path, buf)?;
    Ok(())
}
