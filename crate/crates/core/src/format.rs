//! The `BDG v1` text format.
//!
//! ```text
//! BDG v1 <M> <N>
//! Q <j> <leak complement> <k>:<inhibition> <k>:<inhibition> ...   (one line per query, j = 0..N)
//! PRIOR <alpha_0> ... <alpha_{M-1}>
//! ```
//!
//! Indices are 0-based and fields are separated by single spaces. Every
//! probability is written as a plain decimal with 17 significant digits,
//! which reads back to the identical `f64`.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::model::{DiagnosisGraph, DiagnosisSpec, ModelError, NoiseModel};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_error(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        reason: reason.into(),
    }
}

/// Plain decimal with 17 significant digits.
pub fn format_probability(p: f64) -> String {
    if p == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{p:.16e}");
    let exponent: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .expect("scientific format has an exponent");
    let decimals = (16 - exponent).max(0) as usize;
    format!("{p:.decimals$}")
}

pub fn save_graph<W: Write>(
    graph: &DiagnosisGraph,
    model: &NoiseModel,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "BDG v1 {} {}", graph.num_objects(), graph.num_queries())?;
    for j in 0..graph.num_queries() {
        write!(out, "Q {j} {}", format_probability(model.leak_complement(j)))?;
        for (&k, &rho) in graph.parents(j).iter().zip(model.inhibition(j)) {
            write!(out, " {k}:{}", format_probability(rho))?;
        }
        writeln!(out)?;
    }
    write!(out, "PRIOR")?;
    for &a in model.prior() {
        write!(out, " {}", format_probability(a))?;
    }
    writeln!(out)
}

pub fn save_graph_to_string(graph: &DiagnosisGraph, model: &NoiseModel) -> String {
    let mut buf = Vec::new();
    save_graph(graph, model, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("format is ASCII")
}

fn parse_usize(line: usize, field: &str, what: &str) -> Result<usize, FormatError> {
    field
        .parse()
        .map_err(|_| parse_error(line, format!("invalid {what} `{field}`")))
}

fn parse_prob(line: usize, field: &str, what: &str) -> Result<f64, FormatError> {
    field
        .parse()
        .map_err(|_| parse_error(line, format!("invalid {what} `{field}`")))
}

pub fn load_graph<R: BufRead>(input: R) -> Result<(DiagnosisGraph, NoiseModel), FormatError> {
    let mut lines = input.lines();
    let mut line_no = 0;
    let mut next_line = |expected: &str| -> Result<(usize, String), FormatError> {
        line_no += 1;
        match lines.next() {
            Some(Ok(l)) => Ok((line_no, l)),
            Some(Err(e)) => Err(e.into()),
            None => Err(parse_error(
                line_no,
                format!("unexpected end of input, expected {expected}"),
            )),
        }
    };

    let (ln, header) = next_line("`BDG v1` header")?;
    let fields: Vec<&str> = header.split(' ').collect();
    let [magic, version, m, n] = fields.as_slice() else {
        return Err(parse_error(ln, "header must be `BDG v1 <M> <N>`"));
    };
    if *magic != "BDG" || *version != "v1" {
        return Err(parse_error(ln, "header must start with `BDG v1`"));
    }
    let num_objects = parse_usize(ln, m, "object count")?;
    let num_queries = parse_usize(ln, n, "query count")?;

    let mut parents = Vec::with_capacity(num_queries);
    let mut leak_complement = Vec::with_capacity(num_queries);
    let mut inhibition = BTreeMap::new();
    for j in 0..num_queries {
        let (ln, text) = next_line(&format!("`Q {j}` line"))?;
        let mut fields = text.split(' ');
        if fields.next() != Some("Q") {
            return Err(parse_error(ln, format!("expected `Q {j}` line")));
        }
        let id = parse_usize(ln, fields.next().unwrap_or(""), "query id")?;
        if id != j {
            return Err(parse_error(ln, format!("expected query {j}, found {id}")));
        }
        let leak = fields
            .next()
            .ok_or_else(|| parse_error(ln, "missing leak complement"))?;
        leak_complement.push(parse_prob(ln, leak, "leak complement")?);
        let mut set = Vec::new();
        for pair in fields {
            let (k, rho) = pair
                .split_once(':')
                .ok_or_else(|| parse_error(ln, format!("expected `object:inhibition`, found `{pair}`")))?;
            let k = parse_usize(ln, k, "object index")?;
            let rho = parse_prob(ln, rho, "inhibition")?;
            if inhibition.insert((k, j), rho).is_some() {
                return Err(parse_error(ln, format!("object {k} listed twice")));
            }
            set.push(k);
        }
        parents.push(set);
    }

    let (ln, text) = next_line("`PRIOR` line")?;
    let mut fields = text.split(' ');
    if fields.next() != Some("PRIOR") {
        return Err(parse_error(ln, "expected `PRIOR` line"));
    }
    let prior = fields
        .map(|f| parse_prob(ln, f, "prior"))
        .collect::<Result<Vec<_>, _>>()?;
    if prior.len() != num_objects {
        return Err(parse_error(
            ln,
            format!("expected {num_objects} prior values, found {}", prior.len()),
        ));
    }

    let spec = DiagnosisSpec {
        num_objects,
        parents,
        prior,
        leak_complement,
        inhibition,
    };
    Ok(spec.build()?)
}

pub fn load_graph_from_str(text: &str) -> Result<(DiagnosisGraph, NoiseModel), FormatError> {
    load_graph(text.as_bytes())
}
