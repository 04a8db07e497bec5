//! Two-column `<vertex-id> <value>` text for vertex functions.

use std::fmt::Write as _;

use super::GeometryError;
use crate::scalar::Real;

pub fn write_vertex_values<T: Real>(values: &[T]) -> String {
    let mut out = String::new();
    for (v, x) in values.iter().enumerate() {
        let _ = writeln!(out, "{v} {x}");
    }
    out
}

/// Parses a vertex function on `n` vertices. Every vertex must appear once.
pub fn parse_vertex_values(text: &str, n: usize) -> Result<Vec<f64>, GeometryError> {
    let err = |line: usize, message: String| GeometryError::Parse { line, message };
    let mut out = vec![None; n];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(id), Some(val), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(err(
                i + 1,
                format!("expected `<vertex-id> <value>`, found `{line}`"),
            ));
        };
        let id: usize = id
            .parse()
            .map_err(|_| err(i + 1, format!("invalid vertex id `{id}`")))?;
        let val: f64 = val
            .parse()
            .map_err(|_| err(i + 1, format!("invalid value `{val}`")))?;
        if id >= n {
            return Err(err(
                i + 1,
                format!("vertex {id} out of range (mesh has {n})"),
            ));
        }
        if !val.is_finite() {
            return Err(err(i + 1, format!("value for vertex {id} is not finite")));
        }
        if out[id].replace(val).is_some() {
            return Err(err(i + 1, format!("vertex {id} listed twice")));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| err(0, format!("missing value for vertex {v}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let vals = vec![0.0, -1.5e-7, std::f64::consts::PI, 1.0 / 3.0];
        assert_eq!(
            parse_vertex_values(&write_vertex_values(&vals), 4).unwrap(),
            vals
        );
    }

    #[test]
    fn rejects_incomplete_or_bad_input() {
        assert!(parse_vertex_values("0 1\n", 2).is_err());
        assert!(parse_vertex_values("0 1\n0 2\n", 1).is_err());
        assert!(parse_vertex_values("5 1\n", 2).is_err());
        assert!(parse_vertex_values("0 x\n", 1).is_err());
        assert!(parse_vertex_values("0 1 2\n", 1).is_err());
        assert_eq!(
            parse_vertex_values("# comment\n1 2\n\n0 1\n", 2).unwrap(),
            vec![1.0, 2.0]
        );
    }
}
