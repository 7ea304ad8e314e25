//! The reproduction suite: eight checks covering the square-bit channel
//! polytope, the Birkhoff gap and its asymptotic certificates, the entangled
//! action, the restricted RAC biases, convertibility, the entropic monotones
//! and the reference constants.
//!
//! Non-randomized checks are deterministic and independent of the seed.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{
    birkhoff_gap, bisto_vertices, collision_certificate, enumerate_extreme_channels, evengon_collapse_map,
    gamma_pairs, reversibles, Channel, ChannelSet, Gamma,
};
use crate::error::{Error, Result};
use crate::geometry::{enumerate_vertices, Float, HalfSpace, Polytope, Rational, Scalar, Vector};
use crate::models::{build_evengon, pr_entangled_state, square, Model, TwoCoordState};
use crate::rac::{
    bisto_bias_formula, canonical_bisto_encodings, canonical_rare_encodings, evaluate_strategy, identity_only,
    optimal_bias, rare_bias_formula, sweep, RacInstance,
};
use crate::resource::{
    convertible, folded_grid, majorization_vector, majorizes, random_state, random_weights, s_tot,
    s_vn_nondecreasing, ConvertibilityOracle, Operations,
};

type Q = Rational;

/// Number of checks in the suite.
pub const CHECK_COUNT: u8 = 8;

/// Knobs for the randomized checks.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random ordered pairs compared against the oracle.
    pub random_pairs: usize,
    /// Random (state, channel) draws per channel family for the monotones.
    pub monotone_cases: usize,
    /// Largest denominator of random state coordinates.
    pub max_denominator: i64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 7, random_pairs: 10_000, monotone_cases: 1_000, max_denominator: 12 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: u8,
    /// Short key naming the result being reproduced.
    pub key: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Key of check `id`, or `None` when out of range.
pub fn check_key(id: u8) -> Option<&'static str> {
    Some(match id {
        1 => "extreme-channels",
        2 => "birkhoff-gap",
        3 => "asymptotic-violation",
        4 => "entangled-action",
        5 => "rac-bias",
        6 => "convertibility",
        7 => "monotones",
        8 => "reference-constants",
        _ => return None,
    })
}

/// Runs one check. Internal errors turn into a failed result carrying the
/// error text.
pub fn run_check(id: u8, cfg: &VerifyConfig) -> Result<CheckResult> {
    let key = check_key(id).ok_or_else(|| Error::InvalidConfig(format!("no check with id {id}")))?;
    let start = Instant::now();
    let outcome = match id {
        1 => extreme_channels(),
        2 => gap(),
        3 => asymptotic_violation(),
        4 => entangled_action(),
        5 => rac_bias(),
        6 => convertibility(cfg),
        7 => monotones(cfg),
        _ => reference_constants(),
    };
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(Verdict { passed, detail, limit }) => match limit {
            Some(limit) if elapsed > limit => {
                (false, format!("{detail}; took {:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
            }
            _ => (passed, detail),
        },
        Err(e) => (false, format!("error: {e}")),
    };
    Ok(CheckResult { id, key, passed, detail, seconds: elapsed.as_secs_f64() })
}

/// Runs the selected checks (all when `only` is empty) in id order.
pub fn run_suite(cfg: &VerifyConfig, only: &[u8]) -> Result<Vec<CheckResult>> {
    let ids: Vec<u8> = if only.is_empty() {
        (1..=CHECK_COUNT).collect()
    } else {
        let mut ids = only.to_vec();
        ids.sort_unstable();
        ids.dedup();
        ids
    };
    ids.into_iter().map(|id| run_check(id, cfg)).collect()
}

struct Verdict {
    passed: bool,
    detail: String,
    limit: Option<Duration>,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict { passed, detail: detail.into(), limit: None }
    }

    fn within(mut self, secs: u64) -> Self {
        self.limit = Some(Duration::from_secs(secs));
        self
    }
}

fn sorted(mut v: Vec<Channel<Q>>) -> Vec<Channel<Q>> {
    v.sort_by(|a, b| a.canonical_cmp(b));
    v
}

fn extreme_channels() -> Result<Verdict> {
    let found = sorted(enumerate_extreme_channels(&square::<Q>())?);
    let expected = sorted(gamma_pairs());
    let ok = found == expected;
    Ok(Verdict::new(ok, format!("{} extreme channels, set-equal to the γ pairs: {ok}", found.len())).within(5))
}

/// `[γₐ^±, γₐ^±]` for a ∈ {1, 2}: the bistochastic vertices that are not reversible.
fn expected_gap() -> Vec<Channel<Q>> {
    use Gamma::*;
    let mut out = Vec::new();
    for axis in [[G1Plus, G1Minus], [G2Plus, G2Minus]] {
        for r in axis {
            for s in axis {
                out.push(Channel::from_gammas(r, s));
            }
        }
    }
    sorted(out)
}

fn gap() -> Result<Verdict> {
    let sq = square::<Q>();
    let rev = reversibles(&sq)?;
    let bisto = bisto_vertices(&sq)?;
    let entries = birkhoff_gap(&sq)?;
    let gap_channels = sorted(entries.iter().map(|e| e.channel.clone()).collect());

    let mut certified = 0;
    for e in &entries {
        let at_channel = e.functional.dot(&e.channel.to_point())?;
        let mut ok = e.gap.is_positive() && at_channel == e.threshold.clone() + &e.gap;
        for t in &rev {
            ok &= !e.functional.dot(&t.to_point())?.cmp_tol(&e.threshold).is_gt();
        }
        certified += ok as usize;
    }
    let passed = rev.len() == 8
        && bisto.len() == 16
        && entries.len() == 8
        && gap_channels == expected_gap()
        && certified == entries.len();
    Ok(Verdict::new(
        passed,
        format!(
            "{} reversible, {} bistochastic vertices, {} outside the reversible hull ({} with verified positive-gap functionals)",
            rev.len(),
            bisto.len(),
            entries.len(),
            certified
        ),
    ))
}

fn max_abs_diff<S: Scalar>(a: &Vector<S>, b: &Vector<S>) -> f64 {
    a.to_f64().iter().zip(b.to_f64()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn certified_collapse<S: Scalar>(k: usize, tol: f64) -> Result<bool> {
    let m: Model<S> = build_evengon(k)?;
    let t = evengon_collapse_map::<S>(k)?;
    let mixed = m.mixed_state();
    let drift = max_abs_diff(&t.apply(&mixed)?, &mixed);
    let Some(cert) = collision_certificate(&t, &m)? else { return Ok(false) };
    Ok(cert.verify(&m)? && cert.bistochastic && drift <= tol)
}

fn asymptotic_violation() -> Result<Verdict> {
    let sq = square::<Q>();
    let t = Channel::from_gammas(Gamma::G1Plus, Gamma::G1Plus);
    let square_cert = collision_certificate(&t, &sq)?
        .map(|c| (c.a, c.b, c.c) == (1, 2, 1) && c.bistochastic && c.verify(&sq).unwrap_or(false))
        .unwrap_or(false);

    let mut failed = Vec::new();
    if !certified_collapse::<Q>(2, 0.0)? {
        failed.push(2);
    }
    for k in 3..=6 {
        if !certified_collapse::<Float>(k, 1e-12)? {
            failed.push(k);
        }
    }

    let tt = t.kron(&t);
    let tensor_ok = tt.apply(&sq.omega(2).kron(sq.omega(2)))? == sq.omega(1).kron(sq.omega(1));

    let passed = square_cert && failed.is_empty() && tensor_ok;
    Ok(Verdict::new(
        passed,
        format!(
            "square certificate (ω₁, ω₂ → ω₁): {square_cert}; collapse maps k = 2..6 failing: {failed:?}; T⊗T(ω₂⊗ω₂) = ω₁⊗ω₁: {tensor_ok}"
        ),
    ))
}

fn entangled_action() -> Result<Verdict> {
    let sq = square::<Q>();
    let t = Channel::from_gammas(Gamma::G1Plus, Gamma::G1Plus);
    let mut ok = true;
    for (from, to) in [(1, 1), (2, 1), (3, 3), (4, 3)] {
        ok &= t.apply(sq.omega(from))? == *sq.omega(to);
    }
    let image = t.kron(&Channel::identity(3)).apply(&pr_entangled_state())?;
    let w13 = sq.omega(1).kron(sq.omega(3));
    let w31 = sq.omega(3).kron(sq.omega(1));
    let expected = w13.add(&w31)?.scale(&Q::half());
    let passed = ok && image == expected;
    Ok(Verdict::new(passed, format!("(T⊗I)(ω_ent) = {image}; expected {expected}")))
}

fn rac_bias() -> Result<Verdict> {
    let grid = folded_grid::<Q>(10);
    let rows = sweep(&grid)?;
    let mut formula_misses = 0;
    let mut dominance_misses = 0;
    for (s, row) in grid.iter().zip(&rows) {
        if row.bias_rare != rare_bias_formula(s) || row.bias_bisto != bisto_bias_formula(s) {
            formula_misses += 1;
        }
        let (a, b) = s.radii();
        let equal = row.bias_rare == row.bias_bisto;
        if row.bias_rare > row.bias_bisto || equal != (a == b) {
            dominance_misses += 1;
        }
    }
    let canonical_misses: usize = grid
        .par_iter()
        .zip(&rows)
        .map(|(s, row)| -> Result<usize> {
            let rare = evaluate_strategy(&RacInstance::new(s.clone(), ChannelSet::RaRe), &canonical_rare_encodings(s))?;
            let bisto =
                evaluate_strategy(&RacInstance::new(s.clone(), ChannelSet::BiSto), &canonical_bisto_encodings(s))?;
            Ok((rare.bias != row.bias_rare) as usize + (bisto.bias != row.bias_bisto) as usize)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let passed = formula_misses == 0 && dominance_misses == 0 && canonical_misses == 0;
    Ok(Verdict::new(
        passed,
        format!(
            "{} grid states: formula mismatches {formula_misses}, dominance violations {dominance_misses}, canonical strategies short of optimum {canonical_misses}",
            grid.len()
        ),
    )
    .within(60))
}

struct Oracles {
    bisto: ConvertibilityOracle<Q>,
    rare: ConvertibilityOracle<Q>,
}

impl Oracles {
    fn new() -> Result<Self> {
        Ok(Oracles { bisto: ConvertibilityOracle::new(Operations::BiSto)?, rare: ConvertibilityOracle::new(Operations::RaRe)? })
    }

    /// Number of operation sets (0, 1 or 2) on which criterion and oracle disagree.
    fn disagreements(&self, from: &TwoCoordState<Q>, to: &TwoCoordState<Q>) -> Result<usize> {
        let mut n = 0;
        for oracle in [&self.bisto, &self.rare] {
            if convertible(from, to, oracle.operations()) != oracle.convertible(from, to)? {
                n += 1;
            }
        }
        Ok(n)
    }
}

fn convertibility(cfg: &VerifyConfig) -> Result<Verdict> {
    let oracles = Oracles::new()?;
    let grid = folded_grid::<Q>(20);
    let grid_misses: usize = grid
        .par_iter()
        .map(|from| grid.iter().map(|to| oracles.disagreements(from, to)).sum::<Result<usize>>())
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pairs: Vec<_> = (0..cfg.random_pairs)
        .map(|_| (random_state(&mut rng, cfg.max_denominator), random_state(&mut rng, cfg.max_denominator)))
        .collect();
    let random_misses: usize = pairs
        .par_iter()
        .map(|(a, b)| oracles.disagreements(a, b))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    Ok(Verdict::new(
        grid_misses == 0 && random_misses == 0,
        format!(
            "{} grid pairs: {grid_misses} disagreements; {} random pairs (seed {}): {random_misses} disagreements",
            grid.len() * grid.len(),
            pairs.len(),
            cfg.seed
        ),
    ))
}

/// Slack for comparing float entropies of exactly related states.
const ENTROPY_SLACK: f64 = 1e-12;

fn random_image(rng: &mut ChaCha8Rng, cfg: &VerifyConfig, family: &[Channel<Q>]) -> Result<(TwoCoordState<Q>, TwoCoordState<Q>)> {
    let from = random_state(rng, cfg.max_denominator);
    let t = Channel::mix(&random_weights(rng, family.len()), family)?;
    let to = TwoCoordState::from_vector(&t.apply(&from.vector())?)?;
    Ok((from, to))
}

fn monotones(cfg: &VerifyConfig) -> Result<Verdict> {
    let sq = square::<Q>();
    let bisto = bisto_vertices(&sq)?;
    let rare = reversibles(&sq)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6d6f_6e6f);

    let mut svn_drops = 0;
    for _ in 0..cfg.monotone_cases {
        let (from, to) = random_image(&mut rng, cfg, &bisto)?;
        svn_drops += !s_vn_nondecreasing(&from, &to) as usize;
    }

    let mut stot_drops = 0;
    let mut majorization_misses = 0;
    let mut rare_convertible = 0;
    for _ in 0..cfg.monotone_cases {
        let (from, to) = random_image(&mut rng, cfg, &rare)?;
        stot_drops += (s_tot(&to) < s_tot(&from) - ENTROPY_SLACK) as usize;
        for (a, b) in [(from.clone(), to.clone()), (from, random_state(&mut rng, cfg.max_denominator))] {
            if convertible(&a, &b, Operations::RaRe) {
                rare_convertible += 1;
                majorization_misses += !majorizes(&majorization_vector(&a), &majorization_vector(&b))? as usize;
            }
        }
    }

    Ok(Verdict::new(
        svn_drops == 0 && stot_drops == 0 && majorization_misses == 0,
        format!(
            "{n} BiSto draws: s_vn decreased {svn_drops} times; {n} RaRe draws: s_tot decreased {stot_drops} times; \
             majorization failed on {majorization_misses} of {rare_convertible} RaRe-convertible pairs",
            n = cfg.monotone_cases
        ),
    ))
}

fn reference_constants() -> Result<Verdict> {
    let classical = optimal_bias(&RacInstance::new(TwoCoordState::<Q>::mixed(), identity_only()))?;
    let classical_ok = classical.bias.is_zero() && classical.probability == Q::half();

    let mut hs = Vec::with_capacity(8);
    for a in [1, -1] {
        for b in [1, -1] {
            let n = Vector::from_i64s(&[a, b, 1]);
            hs.push(HalfSpace::new(n.clone(), Q::one())?);
            hs.push(HalfSpace::new(n.scale(&-Q::one()), Q::one())?);
        }
    }
    let octahedron = Polytope::from_halfspaces(hs, 3)?;
    let mut found = enumerate_vertices(&octahedron, 3)?;
    found.sort_by(|a, b| a.canonical_cmp(b));
    let mut gammas: Vec<Vector<Q>> = Gamma::ALL.iter().map(|g| g.vector()).collect();
    gammas.sort_by(|a, b| a.canonical_cmp(b));
    let octahedron_ok = found == gammas;

    Ok(Verdict::new(
        classical_ok && octahedron_ok,
        format!(
            "classical bias {} (probability {}); octahedron vertices {} = γ set: {octahedron_ok}",
            classical.bias,
            classical.probability,
            found.len()
        ),
    ))
}
