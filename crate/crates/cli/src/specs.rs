//! Compact string forms for graphs and initial laws.

use std::fmt;
use std::str::FromStr;

use fixlab_core::exact::InitialDistribution;
use fixlab_core::{Config, Error, Graph, GraphKind, Result};

/// `cycle:N`, `complete:N`, `torus:AxB`, `rr:N:k:seed`, `petersen` or
/// `file:PATH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Named(GraphKind),
    File(String),
}

fn parse_usize(field: &str, what: &str, spec: &str) -> Result<usize> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {field:?} in graph spec {spec:?}")))
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let parts: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(':').collect() };
        let arity = |n: usize| -> Result<()> {
            if parts.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("graph spec {s:?} expects {n} field(s) after {head:?}")))
            }
        };
        let kind = match head {
            "cycle" => {
                arity(1)?;
                GraphKind::Cycle { n: parse_usize(parts[0], "size", s)? }
            }
            "complete" => {
                arity(1)?;
                GraphKind::Complete { n: parse_usize(parts[0], "size", s)? }
            }
            "torus" => {
                arity(1)?;
                let (a, b) = parts[0]
                    .split_once('x')
                    .ok_or_else(|| Error::Parse(format!("torus spec {s:?} needs AxB")))?;
                GraphKind::Torus2d {
                    rows: parse_usize(a, "side", s)?,
                    cols: parse_usize(b, "side", s)?,
                }
            }
            "rr" => {
                arity(3)?;
                GraphKind::RandomRegular {
                    n: parse_usize(parts[0], "size", s)?,
                    k: parse_usize(parts[1], "degree", s)?,
                    seed: parts[2]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad seed in graph spec {s:?}")))?,
                }
            }
            "petersen" => {
                arity(0)?;
                GraphKind::Petersen
            }
            "file" => {
                if rest.is_empty() {
                    return Err(Error::Parse("file: spec needs a path".into()));
                }
                return Ok(GraphSpec::File(rest.to_string()));
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown graph family {other:?} (expected cycle, complete, torus, rr, petersen or file)"
                )))
            }
        };
        Ok(GraphSpec::Named(kind))
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Named(GraphKind::Cycle { n }) => write!(f, "cycle:{n}"),
            GraphSpec::Named(GraphKind::Complete { n }) => write!(f, "complete:{n}"),
            GraphSpec::Named(GraphKind::Torus2d { rows, cols }) => write!(f, "torus:{rows}x{cols}"),
            GraphSpec::Named(GraphKind::RandomRegular { n, k, seed }) => write!(f, "rr:{n}:{k}:{seed}"),
            GraphSpec::Named(GraphKind::Petersen) => write!(f, "petersen"),
            GraphSpec::File(path) => write!(f, "file:{path}"),
        }
    }
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSpec::Named(kind) => Graph::build_named(*kind),
            GraphSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read edge list {path:?}: {e}")))?;
                Graph::parse_edge_list(&text)
            }
        }
    }
}

/// Substitutes a population size into a spec template such as `cycle:{N}`.
pub fn instantiate(template: &str, n_total: usize) -> String {
    template.replace("{N}", &n_total.to_string())
}

/// `un:n`, `point:0110` or `bern:u`.
pub fn parse_init(s: &str) -> Result<InitialDistribution> {
    let (head, value) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("initial law {s:?} should look like un:1, point:1010 or bern:0.5")))?;
    match head {
        "un" | "uniform" => value
            .parse()
            .map(InitialDistribution::UniformN)
            .map_err(|_| Error::Parse(format!("bad cooperator count in {s:?}"))),
        "point" => Ok(InitialDistribution::Point(value.parse::<Config>()?)),
        "bern" | "bernoulli" => value
            .parse()
            .map(InitialDistribution::Bernoulli)
            .map_err(|_| Error::Parse(format!("bad density in {s:?}"))),
        other => Err(Error::Parse(format!("unknown initial law {other:?} (expected un, point or bern)"))),
    }
}

pub fn format_init(init: &InitialDistribution) -> String {
    match init {
        InitialDistribution::Point(eta) => format!("point:{eta}"),
        InitialDistribution::UniformN(n) => format!("un:{n}"),
        InitialDistribution::Bernoulli(u) => format!("bern:{u}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_specs_round_trip() {
        for s in ["cycle:5", "complete:4", "torus:3x4", "rr:30:3:7", "petersen", "file:/tmp/g.txt"] {
            assert_eq!(s.parse::<GraphSpec>().unwrap().to_string(), s);
        }
        for bad in ["cycle", "cycle:x", "torus:3", "rr:10:3", "petersen:1", "ring:5", "file:"] {
            assert!(bad.parse::<GraphSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn templates() {
        assert_eq!(instantiate("cycle:{N}", 7), "cycle:7");
        assert_eq!(instantiate("rr:{N}:3:1", 12), "rr:12:3:1");
    }

    #[test]
    fn init_specs() {
        assert_eq!(parse_init("un:2").unwrap(), InitialDistribution::UniformN(2));
        assert_eq!(parse_init("bern:0.25").unwrap(), InitialDistribution::Bernoulli(0.25));
        let p = parse_init("point:1010").unwrap();
        assert_eq!(format_init(&p), "point:1010");
        assert!(parse_init("un").is_err());
        assert!(parse_init("un:x").is_err());
        assert!(parse_init("dirac:1").is_err());
    }
}
