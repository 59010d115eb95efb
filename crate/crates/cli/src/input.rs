//! Parsing of JSON arguments, level ranges and covers.

use crate::Failure;
use flatcoh::cover::{Cover, NerveJson};
use serde::de::DeserializeOwned;
use std::ops::RangeInclusive;

/// Inline JSON, or a path to a JSON file when the argument does not start with `{`, `[`
/// or a digit.
pub fn json_arg<T: DeserializeOwned>(what: &str, raw: &str) -> Result<T, Failure> {
    let t = raw.trim_start();
    let text = if t.starts_with(['{', '[', '-']) || t.starts_with(|c: char| c.is_ascii_digit()) {
        raw.to_string()
    } else {
        std::fs::read_to_string(raw).map_err(|e| Failure::Usage(format!("{what}: cannot read {raw}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{what}: {e}")))
}

/// `a..b` (inclusive) or a single level.
pub fn level_range(raw: &str) -> Result<RangeInclusive<i64>, Failure> {
    let bad = || Failure::Usage(format!("levels: expected N or A..B, got {raw:?}"));
    let parse = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
    let r = match raw.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => {
            let n = parse(raw)?;
            n..=n
        }
    };
    if r.is_empty() {
        return Err(bad());
    }
    Ok(r)
}

/// Cover from `--grid` or `--nerve`, with the identifier stored in file headers.
pub fn cover(grid: Option<usize>, nerve: Option<&str>, default_grid: usize) -> Result<(Cover, String), Failure> {
    match (grid, nerve) {
        (Some(_), Some(_)) => Err(Failure::Usage("give at most one of --grid and --nerve".into())),
        (_, Some(raw)) => {
            let j: NerveJson = json_arg("nerve", raw)?;
            let id = format!("nerve:{}", serde_json::to_string(&j).map_err(|e| Failure::Io(e.to_string()))?);
            Ok((j.into_cover()?, id))
        }
        (g, None) => {
            let m = g.unwrap_or(default_grid);
            Ok((Cover::grid(m)?, format!("grid-{m}")))
        }
    }
}

/// Inverse of the identifier produced by [`cover`].
pub fn cover_from_id(id: &str) -> Result<Cover, Failure> {
    if let Some(m) = id.strip_prefix("grid-") {
        let m = m.parse().map_err(|_| Failure::Usage(format!("bad cover id {id:?}")))?;
        return Ok(Cover::grid(m)?);
    }
    if let Some(j) = id.strip_prefix("nerve:") {
        let j: NerveJson = serde_json::from_str(j).map_err(|e| Failure::Usage(format!("cover id: {e}")))?;
        return Ok(j.into_cover()?);
    }
    Err(Failure::Usage(format!("unknown cover id {id:?}; pass --grid or --nerve")))
}
