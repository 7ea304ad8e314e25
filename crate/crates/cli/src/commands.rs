//! Subcommand implementations, generic over the arithmetic mode.

use std::fmt;
use std::process::ExitCode;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use squarebit::channels::{
    birkhoff_gap, classify, collision_certificate, enumerate_extreme_channels_capped, evengon_collapse_map,
    is_admissible, tensor_channel, Channel, ChannelClass, ChannelSet, DEFAULT_ENUMERATION_CAP,
};
use squarebit::geometry::{Scalar, Vector};
use squarebit::models::{build_evengon, Model, TwoCoordState};
use squarebit::rac::{
    bisto_bias_formula, canonical_bisto_encodings, canonical_rare_encodings, evaluate_strategy, identity_only,
    optimal_bias, rare_bias_formula, sweep, RacInstance,
};
use squarebit::resource::{
    convertible, convertible_oracle, entropy_report, folded_grid, reachable_vertices, FoldedPair, Operations,
};
use squarebit::verify::{run_suite, VerifyConfig};
use squarebit::Error;

use crate::input;
use crate::output::{cell, Format, Report};
use crate::{BirkhoffCmd, ChannelsCmd, Command, Config, ConvertCmd, ModelCmd, RacCmd, Strategy, TensorCmd};

#[derive(Debug)]
pub struct CliError {
    usage: bool,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { usage: true, message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        if self.usage {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Internal consistency failures are verification failures; everything else
/// the library rejects is bad input.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { usage: !matches!(e, Error::Consistency(_)), message: e.to_string() }
    }
}

type Outcome = Result<ExitCode, CliError>;

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize to JSON")
}

fn emit(report: Report, cfg: &Config, default: Format) {
    print!("{}", report.render(cfg.format.unwrap_or(default)));
}

fn single<S: Scalar>(model: &str) -> Result<Model<S>, CliError> {
    Ok(input::model(model)?.build()?)
}

fn name_and_symbol<S: Scalar>(t: &Channel<S>) -> (Value, Value) {
    (to_json(&t.name()), to_json(&t.table_symbol()))
}

pub fn dispatch<S: Scalar>(cmd: &Command, cfg: &Config) -> Outcome {
    match cmd {
        Command::Model(ModelCmd::Info { model }) => model_info::<S>(model, cfg),
        Command::Channels(ChannelsCmd::Enumerate { model, force }) => channels_enumerate::<S>(model, *force, cfg),
        Command::Channels(ChannelsCmd::Check { channel, model }) => channels_check::<S>(channel, model, cfg),
        Command::Birkhoff(BirkhoffCmd::Gap { model }) => birkhoff_gap_cmd::<S>(model, cfg),
        Command::Birkhoff(BirkhoffCmd::Certificate { channel, collapse, model }) => {
            certificate::<S>(channel.as_deref(), *collapse, model, cfg)
        }
        Command::Rac(RacCmd::Eval { p, q, set, strategy }) => rac_eval::<S>(p, q, set, *strategy, cfg),
        Command::Rac(RacCmd::Sweep { n }) => rac_sweep::<S>(*n, cfg),
        Command::Convert(ConvertCmd::Check { from, to, set }) => convert_check::<S>(from, to, set, cfg),
        Command::Reachable { p, q, set } => reachable::<S>(p, q, set, cfg),
        Command::Entropy { p, q } => entropy::<S>(p, q, cfg),
        Command::Tensor(TensorCmd::Act { channel, state }) => tensor_act::<S>(channel, state, cfg),
        Command::VerifyPaper { only, random_pairs, monotone_cases } => {
            verify_paper(only, *random_pairs, *monotone_cases, cfg)
        }
    }
}

fn model_info<S: Scalar>(model: &str, cfg: &Config) -> Outcome {
    let m = single::<S>(model)?;
    let json = json!({
        "descriptor": m.descriptor(),
        "mode": S::MODE,
        "dimension": m.dimension(),
        "vertices": m.vertices(),
        "mixed_state": m.mixed_state(),
        "facets": m.facets(),
        "effects": m.effects(),
        "measurements": m.measurements(),
    });
    let mut rows = Vec::new();
    for (i, v) in m.vertices().iter().enumerate() {
        rows.push(vec!["vertex".into(), format!("ω{}", i + 1), cell(&to_json(v))]);
    }
    for (i, h) in m.facets().iter().enumerate() {
        rows.push(vec!["facet".into(), format!("f{}", i + 1), format!("{} <= {}", cell(&to_json(&h.normal)), h.offset)]);
    }
    for e in m.effects() {
        rows.push(vec!["effect".into(), e.label.clone(), cell(&to_json(&e.functional))]);
    }
    for meas in m.measurements() {
        let labels: Vec<&str> = meas.effects.iter().map(|e| e.label.as_str()).collect();
        rows.push(vec!["measurement".into(), meas.label.clone(), labels.join(" ")]);
    }
    emit(Report::new(json, vec!["kind", "label", "value"], rows), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn channel_entry<S: Scalar>(t: &Channel<S>) -> Value {
    let (name, symbol) = name_and_symbol(t);
    let mut v = json!({ "name": name, "symbol": symbol });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, to_json(t)) {
        dst.extend(src);
    }
    v
}

fn channel_cells<S: Scalar>(t: &Channel<S>) -> Vec<String> {
    let j = to_json(t);
    let rs = |k: &str| j.get(k).map(cell).unwrap_or_default();
    vec![t.name().unwrap_or_default(), t.table_symbol().unwrap_or_default(), rs("r"), rs("s")]
}

fn channels_enumerate<S: Scalar>(model: &str, force: bool, cfg: &Config) -> Outcome {
    let m = single::<S>(model)?;
    let cap = if force { None } else { Some(DEFAULT_ENUMERATION_CAP) };
    let channels = enumerate_extreme_channels_capped(&m, cap)?;
    let json = Value::Array(channels.iter().map(channel_entry).collect());
    let rows = channels
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut row = vec![(i + 1).to_string()];
            row.extend(channel_cells(t));
            row
        })
        .collect();
    emit(Report::new(json, vec!["index", "name", "symbol", "r", "s"], rows), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn channels_check<S: Scalar>(channel: &str, model: &str, cfg: &Config) -> Outcome {
    let m = single::<S>(model)?;
    let t = input::channel::<S>(channel)?;
    let class = if is_admissible(&t, &m)? {
        classify(&t, &m)?
    } else {
        ChannelClass { admissible: false, reversible: false, bistochastic: false, extreme: false, measure_and_prepare: false }
    };
    let (name, symbol) = name_and_symbol(&t);
    let mut json = json!({ "channel": t, "name": name, "symbol": symbol });
    if let (Value::Object(dst), Value::Object(src)) = (&mut json, to_json(&class)) {
        dst.extend(src);
    }
    let flags = [class.admissible, class.reversible, class.bistochastic, class.extreme, class.measure_and_prepare];
    let mut row = vec![t.name().unwrap_or_default(), t.table_symbol().unwrap_or_default()];
    row.extend(flags.iter().map(|b| b.to_string()));
    let header = vec!["name", "symbol", "admissible", "reversible", "bistochastic", "extreme", "measure_and_prepare"];
    emit(Report::new(json, header, vec![row]), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn birkhoff_gap_cmd<S: Scalar>(model: &str, cfg: &Config) -> Outcome {
    let m = single::<S>(model)?;
    let entries = birkhoff_gap(&m)?;
    let json = Value::Array(
        entries
            .iter()
            .map(|e| {
                let (name, symbol) = name_and_symbol(&e.channel);
                let mut v = json!({ "name": name, "symbol": symbol });
                if let (Value::Object(dst), Value::Object(src)) = (&mut v, to_json(e)) {
                    dst.extend(src);
                }
                v
            })
            .collect(),
    );
    let rows = entries
        .iter()
        .map(|e| {
            vec![
                e.channel.name().unwrap_or_default(),
                e.channel.table_symbol().unwrap_or_default(),
                cell(&to_json(&e.functional)),
                e.threshold.to_scalar_string(),
                e.gap.to_scalar_string(),
            ]
        })
        .collect();
    let header = vec!["name", "symbol", "separating_functional", "threshold", "gap"];
    emit(Report::new(json, header, rows), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn certificate<S: Scalar>(channel: Option<&str>, collapse: Option<usize>, model: &str, cfg: &Config) -> Outcome {
    let (t, m) = match (channel, collapse) {
        (_, Some(k)) => (evengon_collapse_map::<S>(k)?, build_evengon::<S>(k)?),
        (Some(c), None) => (input::channel::<S>(c)?, single::<S>(model)?),
        (None, None) => return Err(CliError::usage("give --channel or --collapse")),
    };
    let cert = collision_certificate(&t, &m)?;
    let verified = match &cert {
        Some(c) => c.verify(&m)?,
        None => false,
    };
    let summary = cert.as_ref().map(|c| format!("ω{}, ω{} → ω{}", c.a, c.b, c.c));
    let json = json!({
        "channel": t,
        "name": t.name(),
        "certificate": cert,
        "summary": summary,
        "verified": verified,
    });
    let row = match &cert {
        Some(c) => vec![c.a.to_string(), c.b.to_string(), c.c.to_string(), c.bistochastic.to_string(), verified.to_string()],
        None => vec![String::new(), String::new(), String::new(), String::new(), "false".into()],
    };
    emit(Report::new(json, vec!["a", "b", "c", "bistochastic", "verified"], vec![row]), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn rac_eval<S: Scalar>(p: &str, q: &str, set: &str, strategy: Strategy, cfg: &Config) -> Outcome {
    let state = input::state::<S>(p, q)?;
    let set_lower = set.to_ascii_lowercase();
    let channel_set = if set_lower == "identity" { identity_only() } else { ChannelSet::named(&set_lower)? };
    let inst = RacInstance::new(state.clone(), channel_set.clone());
    let out = match strategy {
        Strategy::Optimal => optimal_bias(&inst)?,
        Strategy::Canonical => {
            let encodings = match channel_set {
                ChannelSet::RaRe => canonical_rare_encodings(&state),
                ChannelSet::BiSto => canonical_bisto_encodings(&state),
                _ => return Err(CliError::usage("canonical strategies exist only for rare and bisto")),
            };
            evaluate_strategy(&inst, &encodings)?
        }
    };
    let formula = match channel_set {
        ChannelSet::RaRe => Some(rare_bias_formula(&state).to_scalar_string()),
        ChannelSet::BiSto => Some(bisto_bias_formula(&state).to_scalar_string()),
        _ => None,
    };
    let strategy_name = match strategy {
        Strategy::Optimal => "optimal",
        Strategy::Canonical => "canonical",
    };
    let mut json = json!({
        "p": state.p.to_scalar_string(),
        "q": state.q.to_scalar_string(),
        "set": set_lower,
        "strategy": strategy_name,
        "formula_bias": formula,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut json, to_json(&out)) {
        dst.extend(src);
    }
    let row = vec![
        state.p.to_scalar_string(),
        state.q.to_scalar_string(),
        set_lower.clone(),
        strategy_name.into(),
        out.bias.to_scalar_string(),
        out.probability.to_scalar_string(),
    ];
    emit(Report::new(json, vec!["p", "q", "set", "strategy", "bias", "probability"], vec![row]), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn rac_sweep<S: Scalar>(n: i64, cfg: &Config) -> Outcome {
    if n < 1 {
        return Err(CliError::usage(format!("--n must be at least 1, got {n}")));
    }
    let rows = sweep(&folded_grid::<S>(n))?;
    let table = rows
        .iter()
        .map(|r| [&r.p, &r.q, &r.bias_rare, &r.bias_bisto].iter().map(|x| x.to_scalar_string()).collect())
        .collect();
    emit(Report::new(to_json(&rows), vec!["p", "q", "bias_rare", "bias_bisto"], table), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn ops(set: &str) -> Result<Operations, CliError> {
    Ok(Operations::from_str(set)?)
}

fn convert_check<S: Scalar>(from: &str, to: &str, set: &str, cfg: &Config) -> Outcome {
    let (a, b) = (input::state_pair::<S>("from", from)?, input::state_pair::<S>("to", to)?);
    let ops = ops(set)?;
    let verdict = convertible(&a, &b, ops);
    let agrees = convertible_oracle(&a, &b, ops)? == verdict;
    let json = json!({ "from": a, "to": b, "set": ops.name(), "convertible": verdict, "oracle_agrees": agrees });
    let row = vec![
        a.p.to_scalar_string(),
        a.q.to_scalar_string(),
        b.p.to_scalar_string(),
        b.q.to_scalar_string(),
        ops.name().into(),
        verdict.to_string(),
        agrees.to_string(),
    ];
    let header = vec!["from_p", "from_q", "to_p", "to_q", "set", "convertible", "oracle_agrees"];
    emit(Report::new(json, header, vec![row]), cfg, Format::Json);
    if agrees {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: criterion and oracle disagree");
        Ok(ExitCode::from(1))
    }
}

fn reachable<S: Scalar>(p: &str, q: &str, set: &str, cfg: &Config) -> Outcome {
    let state = input::state::<S>(p, q)?;
    let ops = ops(set)?;
    let vertices = reachable_vertices(&state, ops)
        .iter()
        .map(TwoCoordState::from_vector)
        .collect::<Result<Vec<_>, _>>()?;
    let json = json!({
        "p": state.p.to_scalar_string(),
        "q": state.q.to_scalar_string(),
        "set": ops.name(),
        "folded": FoldedPair::of(&state),
        "vertices": vertices,
    });
    let rows = vertices.iter().map(|v| vec![v.p.to_scalar_string(), v.q.to_scalar_string()]).collect();
    emit(Report::new(json, vec!["p", "q"], rows), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn entropy<S: Scalar>(p: &str, q: &str, cfg: &Config) -> Outcome {
    let report = entropy_report(&input::state::<S>(p, q)?);
    let row = vec![report.p.to_scalar_string(), report.q.to_scalar_string(), report.s_vn.to_string(), report.s_tot.to_string()];
    emit(Report::new(to_json(&report), vec!["p", "q", "s_vn", "s_tot"], vec![row]), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn tensor_act<S: Scalar>(channels: &[String], state: &str, cfg: &Config) -> Outcome {
    let parts = channels.iter().map(|c| input::channel::<S>(c)).collect::<Result<Vec<_>, _>>()?;
    let t = if parts.len() == 1 { parts[0].clone() } else { tensor_channel(&parts)? };
    let state: Vector<S> = input::composite_state(state)?;
    let image = t.apply(&state)?;
    let names: Vec<String> = parts.iter().map(|c| c.to_string()).collect();
    let json = json!({ "channels": names, "state": state, "image": image });
    let row = vec![names.join(" ⊗ "), cell(&to_json(&state)), cell(&to_json(&image))];
    emit(Report::new(json, vec!["channel", "state", "image"], vec![row]), cfg, Format::Json);
    Ok(ExitCode::SUCCESS)
}

fn verify_paper(only: &[u8], random_pairs: usize, monotone_cases: usize, cfg: &Config) -> Outcome {
    let vcfg = VerifyConfig { seed: cfg.seed, random_pairs, monotone_cases, ..VerifyConfig::default() };
    let results = run_suite(&vcfg, only).map_err(|e| CliError::usage(e.to_string()))?;
    let rows = results
        .iter()
        .map(|r| {
            vec![
                r.id.to_string(),
                r.key.to_string(),
                if r.passed { "PASS" } else { "FAIL" }.to_string(),
                format!("{:.2}", r.seconds),
                r.detail.clone(),
            ]
        })
        .collect();
    let all_passed = results.iter().all(|r| r.passed);
    emit(Report::new(to_json(&results), vec!["id", "check", "result", "seconds", "detail"], rows), cfg, Format::Table);
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
