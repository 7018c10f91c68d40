//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use itertools::Itertools;
use melscope::distinguish::{dissociation_set, suspected_counterexample_set, OverlapObjective};
use melscope::entropy::entropy_bound_sweep;
use melscope::linalg::{inner, l2_norm, root_of_unity};
use melscope::teleport::{channel_operator, two_copy_report};
use melscope::weyl::twisted_reference;
use melscope::{
    bell_state, classify_sets, compose_u, compose_v, conjugated_probe_search, entropy_bound_check, kron,
    orthogonality_defect, partial_trace, probe_search, run_teleport, standard_protocol, weyl_u, weyl_v, BellIndex,
    ComplexMatrix, SearchConfig, SearchStatus, StateSet, StateVector, C64,
};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

/// Objective floors from `objective_floor_oracle` (10⁴ restarts each), less 1e−6.
const BAR_D4_A: f64 = 0.499_999;
const BAR_D4_B: f64 = 0.499_999;
const BAR_D5_FIVE: f64 = 0.834_027;
const BAR_D6_SIX: f64 = 0.547_168;
/// The oracle reached 6.6e−24 on this set: no positive floor exists.
const BAR_D5_QUAD: f64 = 0.0;
/// Weyl twirl: the (I, F) terms alone sum to at least 9·(1/3)² = 1.
const BAR_DISSOCIATION_CONJUGATED: f64 = 1.0 - 1e-6;

const NEGATIVE_RESTARTS: usize = 200;

type Check = Result<String, String>;
type CriterionFn = fn() -> Check;
/// Name, dimension, members and the probe to teleport.
type WorkedCase = (String, usize, Vec<(usize, usize)>, StateVector);

fn idx(d: usize, n: usize, m: usize) -> BellIndex {
    BellIndex::new(d, n, m).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, started: Instant, what: &str) -> Result<(), String> {
    let t = started.elapsed();
    ensure(t <= limit, || format!("{what} took {t:?} > {limit:?}"))
}

fn vec_diff(a: &[C64], b: &[C64]) -> f64 {
    l2_norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::new();
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for u in &cols {
            let p = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * y;
            }
        }
        let n = l2_norm(&v);
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(d, d, |r, k| cols[k][r])
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> StateVector {
    let amps = (0..d)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(vec![d], amps).unwrap()
}

fn criterion_1() -> Check {
    let started = Instant::now();
    for d in 2..=6 {
        let states: Vec<StateVector> = BellIndex::all(d).map(bell_state).collect();
        let psi00 = &states[0];
        let mixed = ComplexMatrix::identity(d).scale(c(1.0 / d as f64, 0.0));
        let id = ComplexMatrix::identity(d);
        for (a, i) in BellIndex::all(d).enumerate() {
            let s = &states[a];
            ensure((s.norm() - 1.0).abs() <= 1e-12, || format!("{i} norm {}", s.norm()))?;
            for keep in [0, 1] {
                let red = partial_trace(&s.projector(), &[d, d], &[keep]).unwrap();
                let dev = red.max_abs_diff(&mixed).unwrap();
                ensure(dev <= 1e-12, || format!("d={d} {i} reduced state off by {dev:e}"))?;
            }
            let via_u = psi00.apply(&kron(&weyl_u(i), &id)).unwrap();
            let via_v = psi00.apply(&kron(&id, &weyl_v(i))).unwrap();
            let eu = vec_diff(via_u.amplitudes(), s.amplitudes());
            let ev = vec_diff(via_v.amplitudes(), s.amplitudes());
            ensure(eu <= 1e-12 && ev <= 1e-12, || {
                format!("d={d} {i} generation error {eu:e}/{ev:e}")
            })?;
            for t in &states[a + 1..] {
                let ov = s.inner(t).norm();
                ensure(ov <= 1e-12, || format!("d={d} overlap {ov:e}"))?;
            }
        }
    }
    within(Duration::from_secs(10), started, "canonical family checks")?;
    Ok(format!("d=2..6 verified in {:?}", started.elapsed()))
}

fn criterion_2() -> Check {
    let mut worst: f64 = 0.0;
    for d in 2..=5 {
        for (a, b) in BellIndex::all(d).cartesian_product(BellIndex::all(d).collect::<Vec<_>>()) {
            let (pu, iu) = compose_u(a, b).unwrap();
            let lhs = &weyl_u(a) * &weyl_u(b).adjoint();
            worst = worst.max(lhs.max_abs_diff(&weyl_u(iu).scale(pu.to_complex())).unwrap());
            let (pv, iv) = compose_v(a, b).unwrap();
            let lhs = &weyl_v(a) * &weyl_v(b).adjoint();
            worst = worst.max(lhs.max_abs_diff(&weyl_v(iv).scale(pv.to_complex())).unwrap());
        }
    }
    ensure(worst <= 1e-12, || format!("max entry error {worst:e}"))?;
    Ok(format!("max entry error {worst:.2e}"))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_fid: f64 = 1.0;
    let mut worst_p: f64 = 0.0;
    for d in 2..=5 {
        let protocol = standard_protocol(d).unwrap();
        for _ in 0..50 {
            let v = random_unitary(&mut rng, d);
            let channel = twisted_reference(&v).unwrap();
            ensure(
                channel_operator(&channel).unwrap().max_abs_diff(&v).unwrap() <= 1e-12,
                || "channel operator round trip".into(),
            )?;
            let probe = random_state(&mut rng, d);
            for b in run_teleport(&protocol, &channel, &probe).unwrap() {
                let t = protocol.correction(b.outcome);
                let closed = probe.apply(&(&(t * &v) * &t.adjoint())).unwrap();
                worst_fid = worst_fid.min(b.output_state.fidelity(&closed));
                worst_p = worst_p.max((b.probability - 1.0 / (d * d) as f64).abs());
            }
        }
    }
    ensure(worst_fid >= 1.0 - 1e-10, || format!("min fidelity {worst_fid}"))?;
    ensure(worst_p <= 1e-10, || format!("probability deviation {worst_p:e}"))?;
    Ok(format!(
        "min fidelity 1-{:.1e}, max |p-1/d²| {worst_p:.1e}",
        1.0 - worst_fid
    ))
}

fn criterion_4() -> Check {
    let mut summary = Vec::new();
    for d in 2..=6 {
        let started = Instant::now();
        for h in BellIndex::all(d) {
            let r = two_copy_report(d, h).unwrap();
            ensure(r.branch_pairs == d.pow(4), || {
                format!("d={d} {h}: {} branch pairs", r.branch_pairs)
            })?;
            ensure(r.successful_pairs == r.branch_pairs && r.recovered == Some(h), || {
                format!("d={d} {h}: {}/{} pairs", r.successful_pairs, r.branch_pairs)
            })?;
        }
        if d == 6 {
            within(Duration::from_secs(60), started, "d=6 two-copy")?;
        }
        summary.push(format!("d={d} {:?}", started.elapsed()));
    }
    Ok(format!(
        "all hidden indices recovered on every branch pair ({})",
        summary.join(", ")
    ))
}

/// Teleports `probe` through every member with the standard protocol and
/// returns the worst orthogonality defect over Alice's outcomes.
fn teleported_defect(d: usize, members: &[(usize, usize)], probe: &StateVector) -> f64 {
    let protocol = standard_protocol(d).unwrap();
    let per_member: Vec<_> = members
        .iter()
        .map(|&(n, m)| run_teleport(&protocol, &bell_state(idx(d, n, m)), probe).unwrap())
        .collect();
    (0..d * d)
        .map(|k| {
            let outs: Vec<StateVector> = per_member.iter().map(|b| b[k].output_state.clone()).collect();
            orthogonality_defect(&outs).unwrap()
        })
        .fold(0.0, f64::max)
}

fn criterion_5() -> Check {
    let s = FRAC_1_SQRT_2;
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let w = root_of_unity(3, 1);
    let third = 1.0 / 3f64.sqrt();
    let probe = |d: usize, amps: Vec<C64>| StateVector::new(vec![d], amps).unwrap();
    let mut cases: Vec<WorkedCase> = vec![
        (
            "(2.1)".into(),
            2,
            vec![(0, 0), (1, 0)],
            probe(2, vec![c(s, 0.0), c(s, 0.0)]),
        ),
        (
            "(2.2)".into(),
            2,
            vec![(0, 0), (0, 1)],
            probe(2, vec![one, c(0.0, 0.0)]),
        ),
        (
            "(3.1)".into(),
            3,
            vec![(0, 0), (1, 0), (0, 1)],
            probe(3, vec![one * third, w * third, one * third]),
        ),
        (
            "(3.2)".into(),
            3,
            vec![(0, 0), (1, 0), (2, 0)],
            probe(3, vec![one * third; 3]),
        ),
        (
            "(3.3)".into(),
            3,
            vec![(0, 0), (0, 1), (0, 2)],
            StateVector::basis(3, 0).unwrap(),
        ),
    ];
    for d in 2..=8 {
        for k in 0..d {
            let same_m = (0..d).map(|n| (n, k)).collect();
            cases.push((format!("same m={k} d={d}"), d, same_m, StateVector::uniform(d)));
            let same_n = (0..d).map(|m| (k, m)).collect();
            cases.push((
                format!("same n={k} d={d}"),
                d,
                same_n,
                StateVector::basis(d, 0).unwrap(),
            ));
        }
    }
    let grid_probes = [
        (1, vec![one, i, one, i]),
        (2, vec![one, one, -one, one]),
        (3, vec![one, -i, one, -i]),
    ];
    for (m, amps) in grid_probes {
        let p = probe(4, amps.into_iter().map(|z| z * 0.5).collect());
        cases.push((format!("(4.1) m={m}"), 4, vec![(0, 0), (1, 0), (0, m), (1, m)], p));
    }
    let mut worst: f64 = 0.0;
    for (name, d, members, p) in &cases {
        let defect = teleported_defect(*d, members, p);
        ensure(defect <= 1e-10, || format!("{name}: defect {defect:e}"))?;
        worst = worst.max(defect);
    }
    Ok(format!(
        "{} cases, max defect over all outcomes {worst:.1e}",
        cases.len()
    ))
}

fn negative_cfg(seed: u64) -> SearchConfig {
    SearchConfig {
        restarts: NEGATIVE_RESTARTS,
        ..SearchConfig::with_seed(seed)
    }
}

fn criterion_6() -> Check {
    let cases: [(&str, StateSet, f64); 5] = [
        (
            "d=4 {00,10,20,02}",
            StateSet::from_pairs(4, &[(0, 0), (1, 0), (2, 0), (0, 2)]).unwrap(),
            BAR_D4_A,
        ),
        (
            "d=4 {10,20,30,12}",
            StateSet::from_pairs(4, &[(1, 0), (2, 0), (3, 0), (1, 2)]).unwrap(),
            BAR_D4_B,
        ),
        (
            "d=5 {00,11,21,13,23}",
            StateSet::from_pairs(5, &[(0, 0), (1, 1), (2, 1), (1, 3), (2, 3)]).unwrap(),
            BAR_D5_FIVE,
        ),
        (
            "d=6 {00,10,20,30,40,03}",
            StateSet::from_pairs(6, &[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (0, 3)]).unwrap(),
            BAR_D6_SIX,
        ),
        ("d=5 {11,21,13,23}", suspected_counterexample_set(), BAR_D5_QUAD),
    ];
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for (name, set, bar) in cases {
        let r = probe_search(&set, &negative_cfg(6)).unwrap();
        let ok = r.status == SearchStatus::Undecided && r.best_objective > bar;
        let line = format!(
            "{name}: {} best_objective {:.6e} (bar {bar})",
            r.status, r.best_objective
        );
        if ok {
            notes.push(line);
        } else {
            failures.push(line);
        }
    }
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{} | passing: {}", failures.join("; "), notes.join("; ")))
    }
}

fn criterion_7() -> Check {
    let started = Instant::now();
    let set = StateSet::from_pairs(5, &[(0, 0), (1, 0), (2, 0), (3, 0), (0, 3)]).unwrap();
    let cfg = SearchConfig {
        restarts: 200,
        ..SearchConfig::with_seed(7)
    };
    let r = probe_search(&set, &cfg).unwrap();
    within(Duration::from_secs(30), started, "d=5 positive search")?;
    ensure(r.status.is_feasible(), || {
        format!("status {} best {:e}", r.status, r.best_objective)
    })?;
    let p = r.probe.as_ref().unwrap();
    let images: Vec<StateVector> = set.operators().iter().map(|v| p.apply(v).unwrap()).collect();
    let defect = orthogonality_defect(&images).unwrap();
    ensure(defect <= 1e-8, || format!("recomputed defect {defect:e}"))?;
    Ok(format!(
        "{} after {} restarts, defect {defect:.1e}, {:?}",
        r.status,
        r.restarts_used,
        started.elapsed()
    ))
}

fn criterion_8() -> Check {
    let set = dissociation_set();
    let plain = probe_search(&set, &negative_cfg(8)).unwrap();
    let protocol = standard_protocol(3).unwrap();
    let conj = conjugated_probe_search(&set, &protocol, &negative_cfg(8)).unwrap();
    let conj_ok = conj.status == SearchStatus::Undecided && conj.best_objective > BAR_DISSOCIATION_CONJUGATED;
    let detail = format!(
        "plain {} (best {:.6e}); conjugated {} (best {:.6e}, bar {BAR_DISSOCIATION_CONJUGATED})",
        plain.status, plain.best_objective, conj.status, conj.best_objective
    );
    ensure(plain.status.is_feasible() && conj_ok, || detail.clone())?;
    Ok(detail)
}

fn criterion_9() -> Check {
    let sets2: Vec<Vec<BellIndex>> = BellIndex::all(2).combinations(3).collect();
    let r2 = entropy_bound_sweep(2, &sets2).unwrap();
    let failing2 = r2.iter().filter(|r| !r.pass).count();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let all3: Vec<BellIndex> = BellIndex::all(3).collect();
    let mut failing3 = 0;
    let mut slowest = Duration::ZERO;
    let mut first_diag = None;
    for _ in 0..100 {
        let set: Vec<BellIndex> = sample(&mut rng, 9, 4).into_iter().map(|k| all3[k]).collect();
        let started = Instant::now();
        let r = entropy_bound_check(&set).unwrap();
        slowest = slowest.max(started.elapsed());
        if !r.pass {
            failing3 += 1;
            first_diag.get_or_insert_with(|| format!("value {} ({})", r.value, r.diagnostic.unwrap_or_default()));
        }
    }
    let detail = format!(
        "d=2: {}/{} canonical 3-sets pass; d=3: {}/100 random 4-sets pass, slowest {slowest:?}{}",
        sets2.len() - failing2,
        sets2.len(),
        100 - failing3,
        first_diag.map(|s| format!("; first failure {s}")).unwrap_or_default()
    );
    ensure(
        failing2 == 0 && failing3 == 0 && slowest <= Duration::from_secs(5),
        || detail.clone(),
    )?;
    Ok(detail)
}

fn criterion_10() -> Check {
    let started = Instant::now();
    let cfg = SearchConfig::with_seed(10);
    let expect = [(2, 2, 6, 6), (2, 3, 4, 0), (3, 3, 84, 84)];
    let mut notes = Vec::new();
    for (d, k, total, feasible) in expect {
        let r = classify_sets(d, k, &cfg, None).unwrap();
        ensure(r.rows.len() == total && r.feasible() == feasible, || {
            format!(
                "d={d} k={k}: {}/{} feasible, expected {feasible}/{total}",
                r.feasible(),
                r.rows.len()
            )
        })?;
        notes.push(format!("d={d},k={k}: {}/{}", r.feasible(), r.rows.len()));
    }
    within(Duration::from_secs(300), started, "census")?;
    Ok(format!("{} in {:?}", notes.join(", "), started.elapsed()))
}

fn criterion_11() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for d in 3..=5 {
        let all: Vec<BellIndex> = BellIndex::all(d).collect();
        for _ in 0..20 {
            let size = rng.random_range(2..=d);
            let members = sample(&mut rng, d * d, size).into_iter().map(|k| all[k]).collect();
            let obj = OverlapObjective::plain(&StateSet::canonical(d, members).unwrap());
            let phi: Vec<C64> = (0..d)
                .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let g = obj.gradient(&phi);
            let fd: Vec<C64> = (0..d)
                .map(|k| {
                    let mut part = [0.0; 2];
                    for (slot, dir) in [c(1.0, 0.0), c(0.0, 1.0)].into_iter().enumerate() {
                        let mut p = phi.clone();
                        let mut q = phi.clone();
                        p[k] += dir * h;
                        q[k] -= dir * h;
                        part[slot] = (obj.value(&p) - obj.value(&q)) / (2.0 * h);
                    }
                    c(part[0], part[1])
                })
                .collect();
            let rel = vec_diff(&g, &fd) / l2_norm(&g).max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-6, || format!("max relative error {worst:e}"))?;
    Ok(format!("60 instances, max relative error {worst:.1e}"))
}

fn run_cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_melscope"))
        .args(args)
        .env_remove("MELSCOPE_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn criterion_12() -> Check {
    let mut notes = Vec::new();
    for set in [("4", "0:0,1:0,2:0,0:2"), ("3", "01,12,21"), ("5", "00,10,20,30,03")] {
        let runs = (0..3)
            .map(|_| run_cli(&["check-set", "--d", set.0, "--set", set.1, "--seed", "12"]))
            .collect::<Result<Vec<_>, _>>()?;
        let key = |v: &Value| {
            (
                v["status"].clone(),
                v["payload"]["defect"].clone(),
                v["payload"]["best_objective"].clone(),
                v["payload"]["restarts_used"].clone(),
            )
        };
        ensure(runs.iter().map(key).all_equal(), || {
            format!("d={} set {} differs across runs", set.0, set.1)
        })?;
        ensure(runs.iter().map(|r| &r["payload"]).all_equal(), || {
            format!("payload differs for {}", set.1)
        })?;
        notes.push(format!("d={} {}", set.0, runs[0]["status"].as_str().unwrap_or("?")));
    }
    Ok(format!("3 identical runs each: {}", notes.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, CriterionFn); 12] = [
        ("canonical family", criterion_1),
        ("composition algebra", criterion_2),
        ("teleportation law", criterion_3),
        ("two-copy discrimination", criterion_4),
        ("worked-case regressions", criterion_5),
        ("negative cases", criterion_6),
        ("positive d=5 case", criterion_7),
        ("dissociation set", criterion_8),
        ("entropy bound", criterion_9),
        ("census reproduction", criterion_10),
        ("gradient check", criterion_11),
        ("CLI determinism", criterion_12),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2} ({name})", k + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        match check() {
            Ok(detail) => println!("PASS {label}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {label}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
