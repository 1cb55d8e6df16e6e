//! Text format for problem instances.
//!
//! ```text
//! rshwc v1 <vertex count> <skill universe size>
//! v <id> s <skill ids...>
//! c <u> <v> <sigma>
//! p <u> <v> <onsite> <remote>
//! R <skill ids...>
//! S <vertex ids...>
//! C <budget>
//! T <exchange cap>
//! ```
//!
//! Tokens are whitespace-separated; `#` starts a comment that runs to the end
//! of the line. Parallel edges are rejected rather than merged.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::network::{BuildError, NetworkBuilder, ProblemInstance};

pub const FORMAT_HEADER: &str = "rshwc";
pub const FORMAT_VERSION: &str = "v1";

const DEFAULT_EXCHANGE_CAP: u32 = 50;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Structure {
        line: usize,
        #[source]
        source: BuildError,
    },
    #[error("missing `rshwc v1` header")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_token<T: std::str::FromStr>(
    token: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, FormatError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("cannot parse {what} from `{token}`")))
}

pub fn parse_instance_str(text: &str) -> Result<ProblemInstance, FormatError> {
    let mut builder: Option<NetworkBuilder> = None;
    let mut vertex_count = 0usize;
    let mut seen_vertex = Vec::new();
    let mut required: Vec<u32> = Vec::new();
    let mut seeds: Vec<u32> = Vec::new();
    let mut budget = 0.0f64;
    let mut exchange_cap = DEFAULT_EXCHANGE_CAP;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let mut tokens = line.split_whitespace();
        let Some(tag) = tokens.next() else { continue };

        if builder.is_none() {
            if tag != FORMAT_HEADER {
                return Err(FormatError::MissingHeader);
            }
            let version: String = parse_token(tokens.next(), line_no, "format version")?;
            if version != FORMAT_VERSION {
                return Err(syntax(line_no, format!("unsupported version `{version}`")));
            }
            vertex_count = parse_token(tokens.next(), line_no, "vertex count")?;
            let universe: usize = parse_token(tokens.next(), line_no, "skill universe size")?;
            builder = Some(NetworkBuilder::new(vertex_count, universe));
            seen_vertex = vec![false; vertex_count];
            continue;
        }
        let b = builder.as_mut().expect("header parsed");

        match tag {
            "v" => {
                let id: u32 = parse_token(tokens.next(), line_no, "vertex id")?;
                match tokens.next() {
                    Some("s") => {}
                    _ => return Err(syntax(line_no, "expected `s` before skill list")),
                }
                if (id as usize) < vertex_count {
                    if seen_vertex[id as usize] {
                        return Err(syntax(line_no, format!("duplicate vertex line for {id}")));
                    }
                    seen_vertex[id as usize] = true;
                }
                let skills: Vec<u32> = tokens
                    .map(|t| parse_token(Some(t), line_no, "skill id"))
                    .collect::<Result<_, _>>()?;
                b.skills(id, &skills)
                    .map_err(|source| FormatError::Structure {
                        line: line_no,
                        source,
                    })?;
            }
            "c" => {
                let u: u32 = parse_token(tokens.next(), line_no, "vertex id")?;
                let v: u32 = parse_token(tokens.next(), line_no, "vertex id")?;
                let sigma: f64 = parse_token(tokens.next(), line_no, "sigma")?;
                b.contact_edge(u, v, sigma)
                    .map_err(|source| FormatError::Structure {
                        line: line_no,
                        source,
                    })?;
            }
            "p" => {
                let u: u32 = parse_token(tokens.next(), line_no, "vertex id")?;
                let v: u32 = parse_token(tokens.next(), line_no, "vertex id")?;
                let onsite: f64 = parse_token(tokens.next(), line_no, "onsite score")?;
                let remote: f64 = parse_token(tokens.next(), line_no, "remote score")?;
                b.partnership_edge(u, v, onsite, remote).map_err(|source| {
                    FormatError::Structure {
                        line: line_no,
                        source,
                    }
                })?;
            }
            "R" => {
                required = tokens
                    .map(|t| parse_token(Some(t), line_no, "skill id"))
                    .collect::<Result<_, _>>()?;
            }
            "S" => {
                seeds = tokens
                    .map(|t| parse_token(Some(t), line_no, "vertex id"))
                    .collect::<Result<_, _>>()?;
            }
            "C" => {
                budget = parse_token(tokens.next(), line_no, "budget")?;
            }
            "T" => {
                exchange_cap = parse_token(tokens.next(), line_no, "exchange cap")?;
            }
            other => {
                return Err(syntax(line_no, format!("unknown record tag `{other}`")));
            }
        }
    }

    let builder = builder.ok_or(FormatError::MissingHeader)?;
    Ok(ProblemInstance::new(
        builder.build(),
        required,
        seeds,
        budget,
        exchange_cap,
    ))
}

pub fn parse_instance(path: &Path) -> Result<ProblemInstance, FormatError> {
    let text = fs::read_to_string(path)?;
    parse_instance_str(&text)
}

/// Serializes an instance in the canonical `rshwc v1` layout. The `{}` float
/// formatting is shortest-round-trip, so parse(write(x)) == x field-by-field.
pub fn write_instance_string(instance: &ProblemInstance) -> String {
    let net = &instance.network;
    let mut out = String::new();
    out.push_str(&format!(
        "{FORMAT_HEADER} {FORMAT_VERSION} {} {}\n",
        net.vertex_count(),
        net.skill_universe()
    ));
    for v in net.vertices() {
        out.push_str(&format!("v {v} s"));
        for skill in net.skills(v) {
            out.push_str(&format!(" {skill}"));
        }
        out.push('\n');
    }
    for e in net.contact_edges() {
        out.push_str(&format!("c {} {} {}\n", e.u, e.v, e.sigma));
    }
    for e in net.partnership_edges() {
        out.push_str(&format!("p {} {} {} {}\n", e.u, e.v, e.onsite, e.remote));
    }
    out.push('R');
    for skill in &instance.required_skills {
        out.push_str(&format!(" {skill}"));
    }
    out.push_str("\nS");
    for v in &instance.seed_set {
        out.push_str(&format!(" {v}"));
    }
    out.push_str(&format!("\nC {}\n", instance.budget));
    out.push_str(&format!("T {}\n", instance.exchange_cap));
    out
}

pub fn write_instance(instance: &ProblemInstance, path: &Path) -> Result<(), FormatError> {
    let mut file = fs::File::create(path)?;
    file.write_all(write_instance_string(instance).as_bytes())?;
    Ok(())
}
