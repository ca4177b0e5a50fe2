//! Simulated-annealing search for low-merit nets.
//!
//! The objective is `lg W(P; μ+h)`, evaluated by the fast single-`f64`
//! engine — plenty of resolution for *ranking* candidates even though the
//! final reported merit is always recomputed with the double-double
//! inversion path.  Moves either flip one digit of one generator matrix
//! (re-drawn until the basis stays full rank) or add one generator to
//! another, which is an elementary row operation and can never drop rank.
//!
//! Restart `r` of a run with seed `σ` consumes the stream `(σ, SEARCH, r)`,
//! so restarts can run on any number of threads with identical results;
//! ties between restarts break toward the lowest index.  With a checkpoint
//! file the restarts run sequentially instead, and the file — a
//! self-describing text format carrying the config, the ChaCha word
//! position, and the current/best bases — resumes into exactly the run an
//! uninterrupted execution would have produced.

use crate::error::{Error, Result};
use crate::net::{random_net_with, DigitMatrix, DigitalNet, NetParams, MAX_RETRIES};
use crate::rng::{stream_rng, DOMAIN_PROBE, DOMAIN_RANDOM_SEARCH, DOMAIN_SEARCH};
use crate::wafom::{wafom_inversion, FastWafomEngine};
use crate::weight::WeightSpec;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::path::Path;
use std::time::{Duration, Instant};

/// Annealing schedule and budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealConfig {
    /// Proposal evaluations per restart.
    pub steps: u64,
    /// Starting temperature; `None` calibrates it as the standard deviation
    /// of the objective over 100 random probe nets.
    pub initial_temperature: Option<f64>,
    /// Geometric cooling factor applied every `moves_per_temperature` steps.
    pub cooling_rate: f64,
    pub moves_per_temperature: u64,
    pub seed: u64,
    /// Independent restarts; the best result wins, ties to the lowest index.
    pub restarts: u64,
}

impl AnnealConfig {
    pub fn new(seed: u64) -> Self {
        AnnealConfig {
            steps: 10_000,
            initial_temperature: None,
            cooling_rate: 0.98,
            moves_per_temperature: 50,
            seed,
            restarts: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.cooling_rate > 0.0 && self.cooling_rate <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "cooling_rate must be in (0, 1], got {}",
                self.cooling_rate
            )));
        }
        if self.moves_per_temperature == 0 {
            return Err(Error::InvalidParams("moves_per_temperature must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParams("restarts must be >= 1".into()));
        }
        if let Some(t) = self.initial_temperature {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "initial_temperature must be finite and >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Counters over a whole search run (all restarts plus calibration probes).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Objective evaluations consumed, probes and initial points included.
    pub evaluations: u64,
    pub accepted: u64,
    /// Accepted moves that worsened the objective (always 0 at temperature 0).
    pub accepted_worsening: u64,
}

/// Outcome of a search run.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best_net: DigitalNet,
    /// `lg W` of `best_net`, recomputed with the double-double inversion
    /// engine (the trace holds fast-engine objective values).
    pub best_lg_w: f64,
    /// Best-so-far improvements of the winning restart: `(evaluation, lg W)`,
    /// entry 0 being the starting point.  Non-increasing in the second slot.
    pub trace: Vec<(u64, f64)>,
    pub wall_time: Duration,
    pub stats: SearchStats,
}

/// Objective: fast base-2 engine when possible, double-double inversion
/// otherwise.
struct Objective {
    engine: Option<FastWafomEngine>,
    weight: WeightSpec,
}

impl Objective {
    fn new(params: NetParams) -> Result<Self> {
        let weight = WeightSpec::dick_plus_hamming(params.s, params.n);
        let engine =
            if params.b == 2 { Some(FastWafomEngine::new(params.s, params.n, &weight)?) } else { None };
        Ok(Objective { engine, weight })
    }

    fn lg(&self, net: &DigitalNet) -> Result<f64> {
        match &self.engine {
            Some(e) => e.lg_w(net),
            None => Ok(wafom_inversion(net, &self.weight)?.lg_w),
        }
    }
}

/// One rank-preserving neighbor of `net`.
pub fn neighbor_with(net: &DigitalNet, rng: &mut impl Rng) -> Result<DigitalNet> {
    let p = net.params();
    if p.m == 0 {
        return Err(Error::InvalidParams("a net with m = 0 has no neighbors".into()));
    }
    for _ in 0..MAX_RETRIES {
        let mut cand = net.clone();
        let flip = p.m == 1 || rng.random_range(0..2u32) == 0;
        if flip {
            let k = rng.random_range(0..p.m);
            let i = rng.random_range(0..p.s);
            let j = rng.random_range(0..p.n);
            let old = cand.basis()[k].get(i, j);
            let delta = rng.random_range(1..p.b);
            cand.basis_mut()[k].set(i, j, ((u32::from(old) + delta) % p.b) as u8);
            if cand.is_full_rank() {
                return Ok(cand);
            }
        } else {
            let k = rng.random_range(0..p.m);
            let l = (k + rng.random_range(1..p.m)) % p.m;
            let (dst, src) = if k < l {
                let (a, b) = cand.basis_mut().split_at_mut(l);
                (&mut a[k], &b[0])
            } else {
                let (a, b) = cand.basis_mut().split_at_mut(k);
                (&mut b[0], &a[l])
            };
            for (i, j, v) in iter_positions(p, src) {
                let sum = ((u32::from(dst.get(i, j)) + u32::from(v)) % p.b) as u8;
                dst.set(i, j, sum);
            }
            // v_k += v_l is an elementary row operation: rank is unchanged.
            return Ok(cand);
        }
    }
    Err(Error::RetriesExhausted(MAX_RETRIES))
}

fn iter_positions(p: NetParams, m: &DigitMatrix) -> Vec<(usize, usize, u8)> {
    let mut out = Vec::with_capacity(p.s * p.n);
    for i in 0..p.s {
        for j in 0..p.n {
            out.push((i, j, m.get(i, j)));
        }
    }
    out
}

fn draw_full_rank(params: NetParams, rng: &mut impl Rng) -> Result<DigitalNet> {
    for _ in 0..MAX_RETRIES {
        let net = random_net_with(params, rng);
        if net.is_full_rank() {
            return Ok(net);
        }
    }
    Err(Error::RetriesExhausted(MAX_RETRIES))
}

/// Resolve the starting temperature: the sample standard deviation of the
/// objective over 100 random probe nets (stream `(seed, PROBE, 0)`).
fn calibrate_t0(params: NetParams, seed: u64, obj: &Objective) -> Result<(f64, u64)> {
    const PROBES: u64 = 100;
    let mut rng = stream_rng(seed, DOMAIN_PROBE, 0, 0);
    let mut values = Vec::with_capacity(PROBES as usize);
    for _ in 0..PROBES {
        values.push(obj.lg(&random_net_with(params, &mut rng))?);
    }
    let mean = values.iter().sum::<f64>() / PROBES as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (PROBES - 1) as f64;
    Ok((var.max(0.0).sqrt(), PROBES))
}

/// Full state of one in-flight restart.
struct RestartState {
    restart: u64,
    eval: u64,
    temperature: f64,
    rng: ChaCha12Rng,
    current: DigitalNet,
    current_lg: f64,
    best: DigitalNet,
    best_lg: f64,
    trace: Vec<(u64, f64)>,
    stats: SearchStats,
}

/// Finished restart.
#[derive(Clone, Debug)]
struct RestartOutcome {
    restart: u64,
    best: DigitalNet,
    best_lg: f64,
    trace: Vec<(u64, f64)>,
    stats: SearchStats,
}

fn start_restart(
    params: NetParams,
    cfg: &AnnealConfig,
    t0: f64,
    restart: u64,
    obj: &Objective,
) -> Result<RestartState> {
    let mut rng = stream_rng(cfg.seed, DOMAIN_SEARCH, restart, 0);
    let current = draw_full_rank(params, &mut rng)?;
    let current_lg = obj.lg(&current)?;
    Ok(RestartState {
        restart,
        eval: 0,
        temperature: t0,
        rng,
        current: current.clone(),
        current_lg,
        best: current,
        best_lg: current_lg,
        trace: vec![(0, current_lg)],
        stats: SearchStats { evaluations: 1, accepted: 0, accepted_worsening: 0 },
    })
}

/// Advance a restart until `steps` evaluations are done, optionally pausing
/// at the next multiple of `pause_every` evaluations.  Returns true when the
/// restart is finished.
fn advance_restart(
    st: &mut RestartState,
    cfg: &AnnealConfig,
    obj: &Objective,
    pause_every: Option<u64>,
) -> Result<bool> {
    while st.eval < cfg.steps {
        let cand = neighbor_with(&st.current, &mut st.rng)?;
        let cand_lg = obj.lg(&cand)?;
        st.eval += 1;
        st.stats.evaluations += 1;
        let delta = cand_lg - st.current_lg;
        let accept = if delta <= 0.0 {
            true
        } else if st.temperature > 0.0 {
            st.rng.random::<f64>() < (-delta / st.temperature).exp()
        } else {
            false
        };
        if accept {
            if delta > 0.0 {
                st.stats.accepted_worsening += 1;
            }
            st.stats.accepted += 1;
            st.current = cand;
            st.current_lg = cand_lg;
            if st.current_lg < st.best_lg {
                st.best = st.current.clone();
                st.best_lg = st.current_lg;
                st.trace.push((st.eval, st.best_lg));
            }
        }
        if st.eval % cfg.moves_per_temperature == 0 {
            st.temperature *= cfg.cooling_rate;
        }
        if let Some(every) = pause_every {
            if st.eval < cfg.steps && st.eval % every == 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn finish(st: RestartState) -> RestartOutcome {
    RestartOutcome {
        restart: st.restart,
        best: st.best,
        best_lg: st.best_lg,
        trace: st.trace,
        stats: st.stats,
    }
}

fn assemble(
    params: NetParams,
    outcomes: Vec<RestartOutcome>,
    probe_evals: u64,
    started: Instant,
) -> Result<SearchResult> {
    let winner = outcomes
        .iter()
        .min_by(|a, b| {
            a.best_lg
                .partial_cmp(&b.best_lg)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.restart.cmp(&b.restart))
        })
        .expect("at least one restart");
    let mut stats = SearchStats { evaluations: probe_evals, ..Default::default() };
    for o in &outcomes {
        stats.evaluations += o.stats.evaluations;
        stats.accepted += o.stats.accepted;
        stats.accepted_worsening += o.stats.accepted_worsening;
    }
    let weight = WeightSpec::dick_plus_hamming(params.s, params.n);
    let best_lg_w = wafom_inversion(&winner.best, &weight)?.lg_w;
    Ok(SearchResult {
        best_net: winner.best.clone(),
        best_lg_w,
        trace: winner.trace.clone(),
        wall_time: started.elapsed(),
        stats,
    })
}

/// Annealing run with parallel restarts.
pub fn anneal(params: NetParams, cfg: &AnnealConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let started = Instant::now();
    let obj = Objective::new(params)?;
    let (t0, probe_evals) = match cfg.initial_temperature {
        Some(t) => (t, 0),
        None => calibrate_t0(params, cfg.seed, &obj)?,
    };
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut st = start_restart(params, cfg, t0, r, &obj)?;
            advance_restart(&mut st, cfg, &obj, None)?;
            Ok(finish(st))
        })
        .collect::<Result<_>>()?;
    assemble(params, outcomes, probe_evals, started)
}

/// Sequential annealing that records a resumable checkpoint at every
/// multiple of `every` evaluations (and on completion).
pub fn anneal_checkpointed(
    params: NetParams,
    cfg: &AnnealConfig,
    path: &Path,
    every: u64,
) -> Result<SearchResult> {
    Ok(run_checkpointed(params, cfg, path, every, None)?.expect("unhalted run completes"))
}

/// Continue a checkpointed run to completion.
pub fn anneal_resume(path: &Path) -> Result<SearchResult> {
    let text = std::fs::read_to_string(path)?;
    let ck = Checkpoint::parse(&text)?;
    resume_from(ck, path, None).map(|r| r.expect("unhalted run completes"))
}

/// Test hook: run checkpointed but abandon the run (without writing further
/// state) once `halt_after` evaluations of the current restart have
/// completed.  Returns `None` when halted.
pub(crate) fn run_checkpointed(
    params: NetParams,
    cfg: &AnnealConfig,
    path: &Path,
    every: u64,
    halt_after: Option<u64>,
) -> Result<Option<SearchResult>> {
    cfg.validate()?;
    if every == 0 {
        return Err(Error::InvalidParams("checkpoint interval must be >= 1".into()));
    }
    let started = Instant::now();
    let obj = Objective::new(params)?;
    let (t0, probe_evals) = match cfg.initial_temperature {
        Some(t) => (t, 0),
        None => calibrate_t0(params, cfg.seed, &obj)?,
    };
    let resolved = AnnealConfig { initial_temperature: Some(t0), ..*cfg };
    let ck = Checkpoint {
        params,
        config: resolved,
        every,
        probe_evals,
        done: Vec::new(),
        state: None,
    };
    drive(ck, path, halt_after, started, &obj)
}

fn resume_from(
    ck: Checkpoint,
    path: &Path,
    halt_after: Option<u64>,
) -> Result<Option<SearchResult>> {
    let started = Instant::now();
    let obj = Objective::new(ck.params)?;
    drive(ck, path, halt_after, started, &obj)
}

fn drive(
    mut ck: Checkpoint,
    path: &Path,
    halt_after: Option<u64>,
    started: Instant,
    obj: &Objective,
) -> Result<Option<SearchResult>> {
    let cfg = ck.config;
    loop {
        let mut st = match ck.state.take() {
            Some(st) => st,
            None => {
                let next = ck.done.len() as u64;
                if next == cfg.restarts {
                    break;
                }
                let t0 = cfg.initial_temperature.expect("resolved before driving");
                start_restart(ck.params, &cfg, t0, next, obj)?
            }
        };
        loop {
            let finished = advance_restart(&mut st, &cfg, obj, Some(ck.every))?;
            if finished {
                ck.done.push(finish(st));
                ck.state = None;
                ck.write(path)?;
                break;
            }
            if halt_after.is_some_and(|h| st.eval >= h) {
                ck.state = Some(st);
                ck.write(path)?;
                return Ok(None);
            }
            ck.state = Some(st);
            ck.write(path)?;
            st = ck.state.take().unwrap();
        }
    }
    let result = assemble(ck.params, std::mem::take(&mut ck.done), ck.probe_evals, started)?;
    Ok(Some(result))
}

/// Best of `count` independent uniform draws; draw `k` uses the stream
/// `(seed, RANDOM_SEARCH, 0, k)`, so a longer run extends a shorter one.
pub fn random_search(params: NetParams, count: u64, seed: u64) -> Result<SearchResult> {
    if count == 0 {
        return Err(Error::InvalidParams("random search needs count >= 1".into()));
    }
    let started = Instant::now();
    let obj = Objective::new(params)?;
    let lgs: Vec<(f64, DigitalNet)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let net = random_net_with(params, &mut stream_rng(seed, DOMAIN_RANDOM_SEARCH, 0, k));
            Ok((obj.lg(&net)?, net))
        })
        .collect::<Result<_>>()?;
    let mut trace = Vec::new();
    let mut best_k = 0usize;
    let mut improvements = 0u64;
    for (k, (lg, _)) in lgs.iter().enumerate() {
        if k == 0 || *lg < lgs[best_k].0 {
            best_k = k;
            trace.push((k as u64, *lg));
            improvements += 1;
        }
    }
    let weight = WeightSpec::dick_plus_hamming(params.s, params.n);
    let best_net = lgs[best_k].1.clone();
    let best_lg_w = wafom_inversion(&best_net, &weight)?.lg_w;
    Ok(SearchResult {
        best_net,
        best_lg_w,
        trace,
        wall_time: started.elapsed(),
        stats: SearchStats {
            evaluations: count,
            accepted: improvements,
            accepted_worsening: 0,
        },
    })
}

// --- checkpoint format ----------------------------------------------------

struct Checkpoint {
    params: NetParams,
    config: AnnealConfig,
    every: u64,
    probe_evals: u64,
    done: Vec<RestartOutcome>,
    state: Option<RestartState>,
}

fn f64_hex(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn digits_hex(net: &DigitalNet) -> String {
    let mut out = String::new();
    for mat in net.basis() {
        for &d in mat.digits() {
            out.push_str(&format!("{d:02x}"));
        }
    }
    out
}

impl Checkpoint {
    fn write(&self, path: &Path) -> Result<()> {
        let mut text = String::new();
        text.push_str("# annealing checkpoint\nformat 1\n");
        let p = self.params;
        text.push_str(&format!("params {} {} {} {}\n", p.b, p.s, p.n, p.m));
        let c = &self.config;
        text.push_str(&format!(
            "config {} {} {} {} {} {} {}\n",
            c.steps,
            f64_hex(c.initial_temperature.expect("resolved")),
            f64_hex(c.cooling_rate),
            c.moves_per_temperature,
            c.seed,
            c.restarts,
            self.every
        ));
        text.push_str(&format!("probe_evals {}\n", self.probe_evals));
        for d in &self.done {
            text.push_str(&format!(
                "done {} {} {} {} {} {}\n",
                d.restart,
                f64_hex(d.best_lg),
                d.stats.evaluations,
                d.stats.accepted,
                d.stats.accepted_worsening,
                digits_hex(&d.best)
            ));
            for (step, lg) in &d.trace {
                text.push_str(&format!("done_trace {} {} {}\n", d.restart, step, f64_hex(*lg)));
            }
        }
        if let Some(st) = &self.state {
            text.push_str(&format!(
                "state {} {} {} {}\n",
                st.restart,
                st.eval,
                f64_hex(st.temperature),
                st.rng.get_word_pos()
            ));
            text.push_str(&format!(
                "stats {} {} {}\n",
                st.stats.evaluations, st.stats.accepted, st.stats.accepted_worsening
            ));
            text.push_str(&format!(
                "current {} {}\n",
                f64_hex(st.current_lg),
                digits_hex(&st.current)
            ));
            text.push_str(&format!("best {} {}\n", f64_hex(st.best_lg), digits_hex(&st.best)));
            for (step, lg) in &st.trace {
                text.push_str(&format!("trace {} {}\n", step, f64_hex(*lg)));
            }
        }
        text.push_str("end\n");
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, &text)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    fn parse(text: &str) -> Result<Self> {
        let mut params: Option<NetParams> = None;
        let mut config: Option<AnnealConfig> = None;
        let mut every = 0u64;
        let mut probe_evals = 0u64;
        let mut done: Vec<RestartOutcome> = Vec::new();
        let mut state_header: Option<(u64, u64, f64, u128)> = None;
        let mut state_stats = SearchStats::default();
        let mut current: Option<(f64, DigitalNet)> = None;
        let mut best: Option<(f64, DigitalNet)> = None;
        let mut trace: Vec<(u64, f64)> = Vec::new();
        let mut saw_end = false;

        for (ln, raw) in text.lines().enumerate() {
            let lineno = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let tag = it.next().unwrap();
            let mut field = |name: &str| {
                it.next().ok_or_else(|| Error::parse(lineno, format!("missing {name}")))
            };
            match tag {
                "format" => {
                    let v: u64 = parse_num(field("version")?, lineno)?;
                    if v != 1 {
                        return Err(Error::parse(lineno, format!("unsupported format {v}")));
                    }
                }
                "params" => {
                    let b: u32 = parse_num(field("b")?, lineno)?;
                    let s: usize = parse_num(field("s")?, lineno)?;
                    let n: usize = parse_num(field("n")?, lineno)?;
                    let m: usize = parse_num(field("m")?, lineno)?;
                    params = Some(
                        NetParams::new(b, s, n, m)
                            .map_err(|e| Error::parse(lineno, e.to_string()))?,
                    );
                }
                "config" => {
                    config = Some(AnnealConfig {
                        steps: parse_num(field("steps")?, lineno)?,
                        initial_temperature: Some(parse_f64_hex(field("t0")?, lineno)?),
                        cooling_rate: parse_f64_hex(field("cooling")?, lineno)?,
                        moves_per_temperature: parse_num(field("moves")?, lineno)?,
                        seed: parse_num(field("seed")?, lineno)?,
                        restarts: parse_num(field("restarts")?, lineno)?,
                    });
                    every = parse_num(field("every")?, lineno)?;
                }
                "probe_evals" => probe_evals = parse_num(field("count")?, lineno)?,
                "done" => {
                    let p = params.ok_or_else(|| Error::parse(lineno, "done before params"))?;
                    let restart: u64 = parse_num(field("restart")?, lineno)?;
                    let best_lg = parse_f64_hex(field("lg")?, lineno)?;
                    let evaluations: u64 = parse_num(field("evals")?, lineno)?;
                    let accepted: u64 = parse_num(field("accepted")?, lineno)?;
                    let accepted_worsening: u64 = parse_num(field("worsening")?, lineno)?;
                    let net = parse_digits_hex(field("digits")?, p, lineno)?;
                    done.push(RestartOutcome {
                        restart,
                        best: net,
                        best_lg,
                        trace: Vec::new(),
                        stats: SearchStats { evaluations, accepted, accepted_worsening },
                    });
                }
                "done_trace" => {
                    let restart: u64 = parse_num(field("restart")?, lineno)?;
                    let step: u64 = parse_num(field("step")?, lineno)?;
                    let lg = parse_f64_hex(field("lg")?, lineno)?;
                    let slot = done
                        .iter_mut()
                        .find(|d| d.restart == restart)
                        .ok_or_else(|| Error::parse(lineno, "trace for unknown restart"))?;
                    slot.trace.push((step, lg));
                }
                "state" => {
                    state_header = Some((
                        parse_num(field("restart")?, lineno)?,
                        parse_num(field("eval")?, lineno)?,
                        parse_f64_hex(field("temperature")?, lineno)?,
                        parse_num(field("word_pos")?, lineno)?,
                    ));
                }
                "stats" => {
                    state_stats = SearchStats {
                        evaluations: parse_num(field("evals")?, lineno)?,
                        accepted: parse_num(field("accepted")?, lineno)?,
                        accepted_worsening: parse_num(field("worsening")?, lineno)?,
                    };
                }
                "current" => {
                    let p = params.ok_or_else(|| Error::parse(lineno, "current before params"))?;
                    let lg = parse_f64_hex(field("lg")?, lineno)?;
                    current = Some((lg, parse_digits_hex(field("digits")?, p, lineno)?));
                }
                "best" => {
                    let p = params.ok_or_else(|| Error::parse(lineno, "best before params"))?;
                    let lg = parse_f64_hex(field("lg")?, lineno)?;
                    best = Some((lg, parse_digits_hex(field("digits")?, p, lineno)?));
                }
                "trace" => {
                    let step: u64 = parse_num(field("step")?, lineno)?;
                    let lg = parse_f64_hex(field("lg")?, lineno)?;
                    trace.push((step, lg));
                }
                "end" => saw_end = true,
                other => return Err(Error::parse(lineno, format!("unknown tag {other:?}"))),
            }
        }
        if !saw_end {
            return Err(Error::parse(text.lines().count(), "missing end marker"));
        }
        let params = params.ok_or_else(|| Error::parse(1, "missing params"))?;
        let config = config.ok_or_else(|| Error::parse(1, "missing config"))?;
        let state = match state_header {
            None => None,
            Some((restart, eval, temperature, word_pos)) => {
                let (current_lg, current) =
                    current.ok_or_else(|| Error::parse(1, "state without current net"))?;
                let (best_lg, best) =
                    best.ok_or_else(|| Error::parse(1, "state without best net"))?;
                let mut rng = stream_rng(config.seed, DOMAIN_SEARCH, restart, 0);
                rng.set_word_pos(word_pos);
                Some(RestartState {
                    restart,
                    eval,
                    temperature,
                    rng,
                    current,
                    current_lg,
                    best,
                    best_lg,
                    trace: std::mem::take(&mut trace),
                    stats: state_stats,
                })
            }
        };
        Ok(Checkpoint { params, config, every, probe_evals, done, state })
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::parse(line, format!("bad number {tok:?}")))
}

fn parse_f64_hex(tok: &str, line: usize) -> Result<f64> {
    u64::from_str_radix(tok, 16)
        .map(f64::from_bits)
        .map_err(|_| Error::parse(line, format!("bad f64 bits {tok:?}")))
}

fn parse_digits_hex(tok: &str, p: NetParams, line: usize) -> Result<DigitalNet> {
    let want = 2 * p.m * p.s * p.n;
    if tok.len() != want {
        return Err(Error::parse(line, format!("expected {want} hex chars, got {}", tok.len())));
    }
    let bytes: Vec<u8> = (0..tok.len() / 2)
        .map(|t| {
            u8::from_str_radix(&tok[2 * t..2 * t + 2], 16)
                .map_err(|_| Error::parse(line, "bad hex digit pair"))
        })
        .collect::<Result<_>>()?;
    let mut basis = Vec::with_capacity(p.m);
    for k in 0..p.m {
        let flat = &bytes[k * p.s * p.n..(k + 1) * p.s * p.n];
        let rows: Vec<Vec<u8>> =
            (0..p.s).map(|i| flat[i * p.n..(i + 1) * p.n].to_vec()).collect();
        basis.push(
            DigitMatrix::from_rows(&rows).map_err(|e| Error::parse(line, e.to_string()))?,
        );
    }
    DigitalNet::new(p, basis).map_err(|e| Error::parse(line, e.to_string()))
}
