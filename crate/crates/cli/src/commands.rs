use std::time::Instant;

use anyhow::Context;
use melscope::distinguish::{dissociation_set, CensusRow, ProbeSearchResult};
use melscope::teleport::two_copy_report;
use melscope::weyl::{two_qubit_canonicalize, two_qubit_family, TwoQubitPair};
use melscope::{
    bell_state, classify_sets, conjugated_probe_search, entropy_bound_check, kron, probe_search, run_teleport,
    standard_protocol, weyl_u, weyl_v, BellIndex, SearchConfig, StateSet, StateVector, C64,
};
use serde_json::{json, Map, Value};

use crate::args::{CheckSetArgs, Command, Format, Preset, SearchArgs};
use crate::output::{complex, fmt_f64, matrix, real, vector, CommandResult};

pub const SEED_ENV: &str = "MELSCOPE_SEED";

pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

pub fn dispatch(command: &Command, start: Instant) -> Outcome<String> {
    let seed = resolve_seed(command)?;
    let result = match command {
        Command::Bell { d, n, m } => bell(*d, *n, *m, seed)?,
        Command::Teleport { d, channel, probe } => teleport(*d, channel, probe, seed)?,
        Command::TwoCopy { d, all, hidden } => two_copy(*d, *all, hidden.as_deref(), seed)?,
        Command::CheckSet(a) => check_set("check-set", a, seed, false)?,
        Command::CheckSetConjugated(a) => check_set("check-set-conjugated", a, seed, true)?,
        Command::Census {
            d,
            k,
            limit,
            format,
            search,
        } => {
            let (result, rows) = census(*d, *k, *limit, search, seed)?;
            if *format == Format::Csv {
                return census_csv(&rows);
            }
            result
        }
        Command::EntropyBound { d, set } => entropy_bound(*d, set, seed)?,
        Command::Canonicalize2 { theta, delta } => canonicalize2(*theta, *delta, seed)?,
    };
    Ok(result.render(start.elapsed().as_millis()))
}

fn resolve_seed(command: &Command) -> Outcome<u64> {
    let explicit = match command {
        Command::CheckSet(a) | Command::CheckSetConjugated(a) => a.search.seed,
        Command::Census { search, .. } => search.seed,
        _ => None,
    };
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .or_else(|_| usage(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn check_dim(d: usize) -> Outcome<()> {
    if d < 2 {
        return usage(format!("--d must be at least 2, got {d}"));
    }
    Ok(())
}

fn index(d: usize, n: usize, m: usize) -> Outcome<BellIndex> {
    BellIndex::new(d, n, m).or_else(|e| usage(e.to_string()))
}

/// `N,M` or `N:M`.
fn parse_pair(d: usize, text: &str) -> Outcome<BellIndex> {
    let parts: Vec<&str> = text.split([',', ':']).map(str::trim).collect();
    match parts.as_slice() {
        [n, m] => match (n.parse(), m.parse()) {
            (Ok(n), Ok(m)) => index(d, n, m),
            _ => usage(format!("malformed index {text:?}")),
        },
        _ => usage(format!("expected an index of the form N,M, got {text:?}")),
    }
}

/// Comma-separated entries, each `N:M`, or two digits `NM` when `d ≤ 9`.
pub fn parse_set(d: usize, text: &str) -> Outcome<Vec<BellIndex>> {
    let entries: Vec<&str> = text.split(',').map(str::trim).collect();
    if entries.iter().any(|e| e.is_empty()) {
        return usage(format!("empty entry in set {text:?}"));
    }
    entries
        .into_iter()
        .map(|e| {
            if let Some((n, m)) = e.split_once(':') {
                match (n.trim().parse(), m.trim().parse()) {
                    (Ok(n), Ok(m)) => index(d, n, m),
                    _ => usage(format!("malformed set entry {e:?}")),
                }
            } else if d <= 9 && e.len() == 2 && e.bytes().all(|b| b.is_ascii_digit()) {
                let b = e.as_bytes();
                index(d, (b[0] - b'0') as usize, (b[1] - b'0') as usize)
            } else if d > 9 {
                usage(format!("set entry {e:?}: use the N:M form when d > 9"))
            } else {
                usage(format!("set entry {e:?}: expected two digits NM or N:M"))
            }
        })
        .collect()
}

/// One amplitude `re`, `re+imi`, `re-imi` or `imi`.
fn parse_complex(text: &str) -> Option<C64> {
    let t = text.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse().ok().map(|re| C64::new(re, 0.0));
    };
    // Split at the last sign that is not the leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().ok()?;
            let im_text = &body[k..];
            let im: f64 = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                s => s.parse().ok()?,
            };
            Some(C64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => s.parse().ok()?,
            };
            Some(C64::new(0.0, im))
        }
    }
}

pub fn parse_probe(d: usize, text: &str) -> Outcome<StateVector> {
    match text.trim() {
        "zero" => return Ok(StateVector::basis(d, 0).expect("d >= 2")),
        "uniform" => return Ok(StateVector::uniform(d)),
        _ => {}
    }
    let amps = text
        .split(',')
        .map(|s| parse_complex(s).ok_or_else(|| Failure::Usage(format!("malformed amplitude {s:?}"))))
        .collect::<Outcome<Vec<C64>>>()?;
    if amps.len() != d {
        return usage(format!("probe has {} amplitudes, expected {d}", amps.len()));
    }
    if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return usage("probe amplitudes must be finite");
    }
    StateVector::normalized(vec![d], amps).or_else(|e| usage(format!("probe: {e}")))
}

fn pair_json(i: BellIndex) -> Value {
    json!([i.n(), i.m()])
}

fn set_json(set: &[BellIndex]) -> Value {
    Value::Array(set.iter().copied().map(pair_json).collect())
}

fn params(entries: &[(&str, Value)]) -> Map<String, Value> {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn bell(d: usize, n: Option<usize>, m: Option<usize>, seed: u64) -> Outcome<CommandResult> {
    check_dim(d)?;
    let payload = match (n, m) {
        (Some(n), Some(m)) => {
            let idx = index(d, n, m)?;
            json!({
                "index": pair_json(idx),
                "amplitudes": vector(bell_state(idx).amplitudes()),
                "u": matrix(&weyl_u(idx)),
                "v": matrix(&weyl_v(idx)),
            })
        }
        _ => json!({
            "states": BellIndex::all(d)
                .map(|idx| json!({"index": pair_json(idx), "amplitudes": vector(bell_state(idx).amplitudes())}))
                .collect::<Vec<_>>(),
        }),
    };
    Ok(CommandResult {
        command: "bell",
        parameters: params(&[("d", json!(d)), ("n", json!(n)), ("m", json!(m))]),
        status: "ok".into(),
        payload,
        seed,
    })
}

fn teleport(d: usize, channel: &str, probe: &str, seed: u64) -> Outcome<CommandResult> {
    check_dim(d)?;
    let idx = parse_pair(d, channel)?;
    let phi = parse_probe(d, probe)?;
    let protocol = standard_protocol(d).map_err(runtime)?;
    let branches = run_teleport(&protocol, &bell_state(idx), &phi).map_err(runtime)?;
    let expected = phi.apply(&weyl_v(idx)).map_err(runtime)?;
    let outcomes: Vec<BellIndex> = BellIndex::all(d).collect();
    let rows: Vec<Value> = branches
        .iter()
        .map(|b| {
            json!({
                "outcome": pair_json(outcomes[b.outcome]),
                "probability": b.probability,
                "output": vector(b.output_state.amplitudes()),
                "fidelity_with_channel_image": b.output_state.fidelity(&expected),
            })
        })
        .collect();
    let pure = branches
        .iter()
        .all(|b| b.output_state.fidelity(&branches[0].output_state) >= 1.0 - 1e-10);
    Ok(CommandResult {
        command: "teleport",
        parameters: params(&[("d", json!(d)), ("channel", pair_json(idx)), ("probe", json!(probe))]),
        status: if pure { "pure_output" } else { "mixed_output" }.into(),
        payload: json!({
            "probe": vector(phi.amplitudes()),
            "channel_image": vector(expected.amplitudes()),
            "branches": rows,
        }),
        seed,
    })
}

fn two_copy(d: usize, all: bool, hidden: Option<&str>, seed: u64) -> Outcome<CommandResult> {
    check_dim(d)?;
    let targets: Vec<BellIndex> = if all {
        BellIndex::all(d).collect()
    } else {
        vec![match hidden {
            Some(h) => parse_pair(d, h)?,
            None => index(d, 0, 0)?,
        }]
    };
    let reports = targets
        .iter()
        .map(|&h| two_copy_report(d, h))
        .collect::<Result<Vec<_>, _>>()
        .map_err(runtime)?;
    let recovered = reports.iter().filter(|r| r.recovered.is_some()).count();
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "hidden": pair_json(r.hidden),
                "recovered": r.recovered.map(pair_json),
                "branch_pairs": r.branch_pairs,
                "successful_pairs": r.successful_pairs,
            })
        })
        .collect();
    Ok(CommandResult {
        command: "two-copy",
        parameters: params(&[("d", json!(d)), ("all", json!(all)), ("hidden", json!(hidden))]),
        status: if recovered == reports.len() {
            "all_recovered"
        } else {
            "recovery_failed"
        }
        .into(),
        payload: json!({"recovered": recovered, "total": reports.len(), "rows": rows}),
        seed,
    })
}

fn search_config(search: &SearchArgs, seed: u64) -> Outcome<SearchConfig> {
    let cfg = SearchConfig {
        restarts: search.restarts,
        max_iterations: search.max_iterations,
        seed,
        ..SearchConfig::default()
    };
    cfg.validate().or_else(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn search_json(r: &ProbeSearchResult) -> Value {
    json!({
        "status": r.status.to_string(),
        "defect": r.defect,
        "best_objective": r.best_objective,
        "restarts_used": r.restarts_used,
        "above_infeasibility_threshold": r.above_infeasibility_threshold,
        "probe": r.probe.as_ref().map(|p| vector(p.amplitudes())),
    })
}

fn check_set(name: &'static str, a: &CheckSetArgs, seed: u64, conjugated: bool) -> Outcome<CommandResult> {
    check_dim(a.d)?;
    let cfg = search_config(&a.search, seed)?;
    let (set, set_param) = match (&a.set, a.preset) {
        (_, Some(Preset::Dissociation)) => {
            if a.d != 3 {
                return usage("the dissociation preset lives in d = 3");
            }
            (dissociation_set(), json!("dissociation"))
        }
        (Some(text), None) => {
            let members = parse_set(a.d, text)?;
            let set = StateSet::canonical(a.d, members.clone()).or_else(|e| usage(e.to_string()))?;
            (set, set_json(&members))
        }
        (None, None) => return usage("one of --set or --preset is required"),
    };
    let result = if conjugated {
        let protocol = standard_protocol(a.d).map_err(runtime)?;
        conjugated_probe_search(&set, &protocol, &cfg)
    } else {
        probe_search(&set, &cfg)
    }
    .map_err(runtime)?;
    Ok(CommandResult {
        command: name,
        parameters: params(&[
            ("d", json!(a.d)),
            ("set", set_param),
            ("restarts", json!(cfg.restarts)),
            ("max_iterations", json!(cfg.max_iterations)),
        ]),
        status: result.status.to_string(),
        payload: search_json(&result),
        seed,
    })
}

fn census(
    d: usize,
    k: usize,
    limit: Option<usize>,
    search: &SearchArgs,
    seed: u64,
) -> Outcome<(CommandResult, Vec<CensusRow>)> {
    check_dim(d)?;
    if k < 2 || k > d * d {
        return usage(format!("--k must lie in 2..={}", d * d));
    }
    let cfg = search_config(search, seed)?;
    let report = classify_sets(d, k, &cfg, limit).map_err(runtime)?;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "members": set_json(&r.members),
                "status": r.status.to_string(),
                "defect": r.defect,
                "best_objective": r.best_objective,
            })
        })
        .collect();
    let result = CommandResult {
        command: "census",
        parameters: params(&[
            ("d", json!(d)),
            ("k", json!(k)),
            ("limit", json!(limit)),
            ("restarts", json!(cfg.restarts)),
            ("max_iterations", json!(cfg.max_iterations)),
        ]),
        status: "ok".into(),
        payload: json!({
            "subsets": report.rows.len(),
            "feasible_by_catalog": report.feasible_by_catalog,
            "feasible_by_search": report.feasible_by_search,
            "undecided": report.undecided,
            "rows": rows,
        }),
        seed,
    };
    Ok((result, report.rows))
}

fn census_csv(rows: &[CensusRow]) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| runtime(e);
    w.write_record(["members", "status", "defect", "best_objective", "probe"])
        .map_err(io)?;
    for r in rows {
        let members = r
            .members
            .iter()
            .map(|i| format!("{}:{}", i.n(), i.m()))
            .collect::<Vec<_>>()
            .join(" ");
        let probe = r
            .probe
            .as_ref()
            .map(|p| {
                p.amplitudes()
                    .iter()
                    .map(|z| {
                        let sign = if z.im.is_sign_negative() && z.im != 0.0 {
                            '-'
                        } else {
                            '+'
                        };
                        format!("{}{sign}{}i", fmt_f64(z.re), fmt_f64(z.im.abs()))
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        w.write_record([
            members,
            r.status.to_string(),
            fmt_f64(r.defect),
            fmt_f64(r.best_objective),
            probe,
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| runtime(anyhow::anyhow!("{e}")))?;
    String::from_utf8(bytes).context("CSV output is UTF-8").map_err(runtime)
}

fn entropy_bound(d: usize, set: &str, seed: u64) -> Outcome<CommandResult> {
    check_dim(d)?;
    let members = parse_set(d, set)?;
    let r = entropy_bound_check(&members).map_err(runtime)?;
    Ok(CommandResult {
        command: "entropy-bound",
        parameters: params(&[("d", json!(d)), ("set", set_json(&members))]),
        status: if r.pass { "pass" } else { "fail" }.into(),
        payload: json!({
            "value": real(r.value),
            "bound": r.bound,
            "gap": real(r.gap),
            "pass": r.pass,
            "diagnostic": r.diagnostic,
        }),
        seed,
    })
}

fn canonicalize2(theta: f64, delta: f64, seed: u64) -> Outcome<CommandResult> {
    if !theta.is_finite() || !delta.is_finite() {
        return usage("angles must be finite");
    }
    let pair = TwoQubitPair { theta, delta };
    let c = two_qubit_canonicalize(pair);
    let family = two_qubit_family(pair);
    let local = kron(&c.u_a, &c.v_b);
    let mut residual: f64 = 0.0;
    for (k, idx) in BellIndex::all(2).enumerate() {
        let mapped = bell_state(idx).apply(&local).map_err(runtime)?;
        for (a, b) in family[k].amplitudes().iter().zip(mapped.amplitudes()) {
            residual = residual.max((a - c.phases[k] * b).norm());
        }
    }
    Ok(CommandResult {
        command: "canonicalize2",
        parameters: params(&[("theta", json!(theta)), ("delta", json!(delta))]),
        status: if residual <= 1e-12 { "ok" } else { "mismatch" }.into(),
        payload: json!({
            "u_a": matrix(&c.u_a),
            "v_b": matrix(&c.v_b),
            "phases": c.phases.iter().copied().map(complex).collect::<Vec<_>>(),
            "alpha": (theta - delta) / 2.0,
            "beta": (theta + delta) / 2.0,
            "max_residual": residual,
        }),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok<T>(o: Outcome<T>) -> T {
        match o {
            Ok(v) => v,
            Err(Failure::Usage(m)) => panic!("usage: {m}"),
            Err(Failure::Runtime(e)) => panic!("runtime: {e}"),
        }
    }

    #[test]
    fn set_grammar() {
        let s = ok(parse_set(4, "00,10,20,02"));
        assert_eq!(
            s.iter().map(|i| (i.n(), i.m())).collect::<Vec<_>>(),
            vec![(0, 0), (1, 0), (2, 0), (0, 2)]
        );
        let s = ok(parse_set(4, "0:0, 1:0,2:0,0:2"));
        assert_eq!(s.len(), 4);
        let s = ok(parse_set(12, "11:3,0:10"));
        assert_eq!((s[0].n(), s[0].m(), s[1].m()), (11, 3, 10));
        for bad in ["00,", "0", "000", "0:x", "44", "a1"] {
            assert!(matches!(parse_set(4, bad), Err(Failure::Usage(_))), "{bad}");
        }
        assert!(matches!(parse_set(12, "11"), Err(Failure::Usage(_))));
    }

    #[test]
    fn complex_grammar() {
        assert_eq!(parse_complex("1+2i"), Some(C64::new(1.0, 2.0)));
        assert_eq!(parse_complex("0.5-0.25i"), Some(C64::new(0.5, -0.25)));
        assert_eq!(parse_complex("-1e-3+1e+2i"), Some(C64::new(-1e-3, 1e2)));
        assert_eq!(parse_complex("i"), Some(C64::new(0.0, 1.0)));
        assert_eq!(parse_complex("-i"), Some(C64::new(0.0, -1.0)));
        assert_eq!(parse_complex("1-i"), Some(C64::new(1.0, -1.0)));
        assert_eq!(parse_complex("3"), Some(C64::new(3.0, 0.0)));
        assert_eq!(parse_complex("-2.5i"), Some(C64::new(0.0, -2.5)));
        assert_eq!(parse_complex("x"), None);
        assert_eq!(parse_complex("1+xi"), None);
    }

    #[test]
    fn probe_grammar() {
        assert_eq!(ok(parse_probe(3, "zero")), StateVector::basis(3, 0).unwrap());
        assert_eq!(ok(parse_probe(3, "uniform")), StateVector::uniform(3));
        let p = ok(parse_probe(2, "1+0i,0+1i"));
        assert!((p.amplitudes()[1].im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(parse_probe(2, "1,0,0"), Err(Failure::Usage(_))));
        assert!(matches!(parse_probe(2, "0,0"), Err(Failure::Usage(_))));
    }
}
