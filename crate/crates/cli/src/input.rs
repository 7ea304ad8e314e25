//! Parsing of models, channels, states and scalars given on the command line.

use squarebit::channels::Channel;
use squarebit::geometry::{Scalar, Vector};
use squarebit::models::{pr_entangled_state, square, ModelDescriptor, TwoCoordState};

use crate::commands::CliError;

/// `square`, `hexagon`, `evengon:K`, `K`, or a JSON descriptor.
pub fn model(s: &str) -> Result<ModelDescriptor, CliError> {
    let t = s.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| CliError::usage(format!("invalid model JSON: {e}")));
    }
    let lower = t.to_ascii_lowercase();
    let k = match lower.as_str() {
        "square" => 2,
        "hexagon" => 3,
        "octagon" => 4,
        other => other
            .strip_prefix("evengon:")
            .unwrap_or(other)
            .parse::<usize>()
            .map_err(|_| CliError::usage(format!("unknown model '{s}' (try square, evengon:K or a JSON descriptor)")))?,
    };
    Ok(ModelDescriptor::Evengon { k })
}

/// Table name, `id`, or channel JSON (`{"r":…,"s":…}` or `{"matrix":…}`).
pub fn channel<S: Scalar>(s: &str) -> Result<Channel<S>, CliError> {
    let t = s.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| CliError::usage(format!("invalid channel JSON: {e}")));
    }
    if matches!(t, "id" | "I" | "identity") {
        return Ok(Channel::identity(3));
    }
    Channel::parse_name(t).map_err(CliError::from)
}

pub fn scalar<S: Scalar>(name: &str, s: &str) -> Result<S, CliError> {
    S::parse_scalar(s.trim()).map_err(|e| CliError::usage(format!("--{name}: {e}")))
}

pub fn state<S: Scalar>(p: &str, q: &str) -> Result<TwoCoordState<S>, CliError> {
    Ok(TwoCoordState::new(scalar("p", p)?, scalar("q", q)?)?)
}

/// `p,q`.
pub fn state_pair<S: Scalar>(flag: &str, s: &str) -> Result<TwoCoordState<S>, CliError> {
    let (p, q) = s
        .split_once(',')
        .ok_or_else(|| CliError::usage(format!("--{flag} expects p,q, got '{s}'")))?;
    Ok(TwoCoordState::new(scalar(flag, p)?, scalar(flag, q)?)?)
}

/// `ent`, vertex labels `w1,w3` (product of square-bit vertices), or a JSON array.
pub fn composite_state<S: Scalar>(s: &str) -> Result<Vector<S>, CliError> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("ent") {
        return Ok(pr_entangled_state());
    }
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| CliError::usage(format!("invalid state JSON: {e}")));
    }
    let sq = square::<S>();
    let mut out: Option<Vector<S>> = None;
    for label in t.split(',') {
        let i: usize = label
            .trim()
            .trim_start_matches(['w', 'ω'])
            .parse()
            .ok()
            .filter(|i| (1..=4).contains(i))
            .ok_or_else(|| CliError::usage(format!("bad vertex label '{label}' (expected w1..w4)")))?;
        let w = sq.omega(i).clone();
        out = Some(match out {
            None => w,
            Some(acc) => acc.kron(&w),
        });
    }
    out.ok_or_else(|| CliError::usage("empty state"))
}
