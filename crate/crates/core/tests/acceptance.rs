//! Acceptance gate. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use crnforge::compiler::{compile_affine, CompileOptions};
use crnforge::crn::Crc;
use crnforge::format::{manifest_path, parse_crn, Manifest};
use crnforge::kinetics::{run_trials, simulate_observed, trial_rng, Machine, Oracle, SimLimits, VolumePolicy};
use crnforge::semilinear::{parse_fn_spec, vectors_in_box, vectors_up_to_norm, PiecewiseAffineFn};
use crnforge::verifier::{check_stable_computation, VerifyOptions, VerifyReport, DEFAULT_CAP};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn example(name: &str) -> PathBuf {
    examples().join(name)
}

fn bin(args: &[&str]) -> Output {
    bin_env(args, &[])
}

fn bin_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_crnforge"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(out: &Output, what: &str) -> Result<(), String> {
    if out.status.code() == Some(0) {
        Ok(())
    } else {
        Err(format!(
            "{what}: exit {:?}\n{}{}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn load_fn(name: &str) -> PiecewiseAffineFn {
    parse_fn_spec(&std::fs::read_to_string(example(name)).unwrap()).unwrap()
}

fn load_crc(path: &Path) -> Crc {
    let crc = parse_crn(&std::fs::read_to_string(path).unwrap()).unwrap().into_crc().unwrap();
    match std::fs::read_to_string(manifest_path(path)) {
        Ok(m) => Manifest::from_json(&m).unwrap().apply_to(crc),
        Err(_) => crc,
    }
}

fn slowest(r: &VerifyReport) -> Duration {
    r.stats.iter().map(|s| s.elapsed).max().unwrap_or_default()
}

fn fig1_corpus() -> Outcome {
    let floor_half = |x: &[u64]| Some(vec![x[0] / 2]);
    let gated = |x: &[u64]| Some(vec![if x[0] > x[1] { x[1] } else { 0 }]);
    let max = |x: &[u64]| Some(vec![x[0].max(x[1])]);
    let cases: [(&str, &Oracle, Vec<Vec<u64>>); 3] = [
        ("fig1a.crn", &floor_half, (0..=8).map(|x| vec![x]).collect()),
        ("fig1b.crn", &gated, vectors_in_box(2, 5)),
        ("fig1c.crn", &max, vectors_in_box(2, 5)),
    ];
    let mut notes = Vec::new();
    for (name, oracle, inputs) in cases {
        let crc = load_crc(&example(name));
        let n = inputs.len();
        let opts = VerifyOptions { cap: DEFAULT_CAP, ..Default::default() };
        let r = check_stable_computation(&crc, oracle, inputs, opts).map_err(|e| format!("{name}: {e}"))?;
        ensure!(r.passed(), "{name}: {}", r.render_text(Some(crc.crn())));
        ensure!(r.stats.len() == n, "{name}: {} of {n} inputs checked", r.stats.len());
        let worst = slowest(&r);
        ensure!(worst < Duration::from_secs(10), "{name}: an input took {worst:?}");
        notes.push(format!("{name} {n} inputs, slowest {worst:.2?}"));
    }
    Ok(notes.join("; "))
}

fn compiler_correctness(dir: &Path) -> Outcome {
    let crn = dir.join("fig2.crn");
    let fig2 = example("fig2.json");
    ok(&bin(&["compile", "--fn", s(&fig2), "-o", s(&crn)]), "compile")?;
    let v = bin(&["verify", "--crn", s(&crn), "--fn", s(&fig2), "--max-norm", "5"]);
    ok(&v, "verify")?;
    let verdict = String::from_utf8_lossy(&v.stdout).lines().next().unwrap_or_default().to_string();

    let crc = load_crc(&crn);
    let f = load_fn("fig2.json");
    let oracle = |x: &[u64]| f.eval(x).ok();
    let inputs = vectors_up_to_norm(2, 60);
    for x in &inputs {
        let st = run_trials(&crc, x, 100, 2024, VolumePolicy::Auto, SimLimits::default(), Some(&oracle))
            .map_err(|e| format!("simulate {x:?}: {e}"))?;
        ensure!(st.fraction_correct == Some(1.0), "input {x:?}: fraction_correct {:?}", st.fraction_correct);
    }
    Ok(format!("{verdict}; 100 trials on each of {} inputs all correct", inputs.len()))
}

fn decomposition(dir: &Path) -> Outcome {
    let out = dir.join("pieces.json");
    ok(&bin(&["decompose", "--graph", s(&example("identity-graph.json")), "-o", s(&out)]), "decompose")?;
    let f = parse_fn_spec(&std::fs::read_to_string(&out).unwrap()).map_err(|e| e.to_string())?;
    ensure!(f.pieces.len() == 1, "{} pieces", f.pieces.len());
    let p = &f.pieces[0];
    ensure!(
        p.num == vec![vec![1, 1]] && p.den == vec![2] && p.b == vec![0] && p.c == vec![0, 0],
        "got n={:?} d={:?} b={:?} c={:?}",
        p.num,
        p.den,
        p.b,
        p.c
    );
    let bad = bin(&["decompose", "--graph", s(&example("not-a-graph.json"))]);
    ensure!(bad.status.code() == Some(1), "not-a-graph exit {:?}", bad.status.code());
    Ok("n=(1,1) d=2 b=0 c=(0,0); non-graph rejected with exit 1".into())
}

fn graph_decider(dir: &Path) -> Outcome {
    let d = dir.join("fig1a-graph.crn");
    ok(&bin(&["graph-decider", "--crn", s(&example("fig1a.crn")), "-o", s(&d)]), "graph-decider")?;
    let v = bin(&[
        "verify-pred",
        "--crd",
        s(&d),
        "--graph-of",
        s(&example("fig1a.json")),
        "--max-entry",
        "6",
    ]);
    ok(&v, "verify-pred")?;
    Ok(String::from_utf8_lossy(&v.stdout).lines().next().unwrap_or_default().to_string())
}

fn harmonic(n: u64) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

fn calibration() -> Outcome {
    let start = Instant::now();
    let net = |text: &str| parse_crn(text).unwrap().into_crc().unwrap();
    let death = net("input X\noutput Y\nrxn X -> 0\n");
    let growth = net("input X\noutput Y\nrxn X -> 2 Y\n");
    let leader = net("input X\noutput Z\ninit L=1\nrxn L + X -> L + Z\n");
    // Exponential waiting times: mean 1/k per stage for k remaining.
    let cases = [
        ("death", &death, 1, VolumePolicy::Auto, 1.0, 0.05),
        ("X->2Y", &growth, 100, VolumePolicy::Fixed(100.0), harmonic(100), 0.15),
        ("leader", &leader, 10, VolumePolicy::Fixed(10.0), 10.0 * harmonic(10), 1.5),
    ];
    let mut notes = Vec::new();
    for (name, crc, x, policy, expect, tol) in cases {
        let st = run_trials(crc, &[x], 10_000, 11, policy, SimLimits::default(), None).map_err(|e| e.to_string())?;
        ensure!(st.terminal, "{name}: censored trials");
        let got = st.mean_end_time.unwrap();
        ensure!((got - expect).abs() <= tol, "{name}: mean {got:.4}, expected {expect:.4} +- {tol}");
        notes.push(format!("{name} {got:.3} (oracle {expect:.3})"));
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!("{}, {took:.1?}", notes.join(", ")))
}

fn scaling(dir: &Path) -> Outcome {
    let start = Instant::now();
    let ns = "16,32,64,128,256,512,1024";
    let mut notes = Vec::new();
    for name in ["double.json", "fig2.json"] {
        let out = dir.join(format!("{name}.bench.csv"));
        let b = bin(&["bench", "--fn", s(&example(name)), "--ns", ns, "--trials", "25", "--seed", "5", "-o", s(&out)]);
        ok(&b, "bench")?;
        let csv = std::fs::read_to_string(&out).unwrap();
        let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
        ensure!(rows.len() == 7, "{name}: {} rows", rows.len());
        for r in &rows {
            ensure!(r[5].parse::<f64>() == Ok(0.0), "{name}: n={} censored {}", r[0], r[5]);
        }
        let slope: f64 = rows[6][7].parse().map_err(|_| format!("{name}: no slope"))?;
        ensure!((0.7..=1.4).contains(&slope), "{name}: slope {slope:.4}");
        notes.push(format!("{name} slope {slope:.3}"));
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(600), "took {took:?}");
    Ok(format!("{}, no censoring, {took:.1?}", notes.join(", ")))
}

fn structural_invariants() -> Outcome {
    let mut pieces = Vec::new();
    for name in ["double.json", "fig2.json", "fig1c.json", "fig1b.json"] {
        pieces.extend(load_fn(name).pieces);
    }
    let mut runs = 0;
    for p in &pieces {
        let crc = compile_affine(p, &CompileOptions::default()).map_err(|e| e.to_string())?;
        let outs = crc.outputs().to_vec();
        for x in vectors_up_to_norm(p.inputs(), 30).into_iter().step_by(7) {
            let limit = crc.count_bound().ok_or("compiled computer has no count bound")?.limit(x.iter().sum());
            for seed in 0..4 {
                let mut last = vec![0u64; outs.len()];
                let mut monotone = true;
                let mut peak = 0;
                let r = simulate_observed(
                    Machine::Computer(&crc),
                    &x,
                    VolumePolicy::Auto,
                    SimLimits::default(),
                    &mut trial_rng(seed, 0),
                    &mut |_, counts, _| {
                        for (j, &o) in outs.iter().enumerate() {
                            monotone &= counts[o] >= last[j];
                            last[j] = counts[o];
                        }
                        peak = peak.max(counts.iter().sum::<u64>());
                    },
                )
                .map_err(|e| format!("{x:?}: {e}"))?;
                ensure!(monotone, "output decreased on {x:?} seed {seed}");
                ensure!(peak <= limit && r.count_peak <= limit, "{x:?}: peak {peak} above bound {limit}");
                ensure!(r.terminal, "{x:?}: not terminal");
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} trajectories over {} affine pieces", pieces.len()))
}

fn predicates(dir: &Path) -> Outcome {
    let ties: [(&str, &[[u64; 2]]); 3] = [
        ("less-than.json", &[[0, 0], [5, 5]]),
        ("parity.json", &[]),
        ("conjunction.json", &[[3, 3], [6, 3], [0, 0]]),
    ];
    let mut notes = Vec::new();
    for (name, tie_inputs) in ties {
        let g = example(name);
        let d = dir.join(format!("{name}.crn"));
        let report = dir.join(format!("{name}.report.json"));
        ok(&bin(&["compile", "--guard", s(&g), "-o", s(&d)]), "compile --guard")?;
        let v = bin(&["verify-pred", "--crd", s(&d), "--guard", s(&g), "--max-norm", "10", "--json", s(&report)]);
        ok(&v, name)?;
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        let checked: Vec<Vec<u64>> = json["stats"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| serde_json::from_value(s["input"].clone()).unwrap())
            .collect();
        let k = checked.first().map_or(0, Vec::len);
        ensure!(checked.len() == vectors_up_to_norm(k, 10).len(), "{name}: {} inputs checked", checked.len());
        for t in tie_inputs {
            ensure!(checked.contains(&t.to_vec()), "{name}: tie {t:?} not checked");
        }
        notes.push(format!("{name} {} inputs", checked.len()));
    }
    Ok(notes.join(", "))
}

fn determinism(dir: &Path) -> Outcome {
    let crn = dir.join("det.crn");
    let fig2 = example("fig2.json");
    ok(&bin(&["compile", "--fn", s(&fig2), "-o", s(&crn)]), "compile")?;
    let mut sims = Vec::new();
    let mut benches = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let env = [("CRNFORGE_THREADS", *threads)];
        let json = dir.join(format!("sim{i}.json"));
        let csv = dir.join(format!("sim{i}.csv"));
        let args = [
            "simulate", "--crn", s(&crn), "--input", "x1=30,x2=12", "--trials", "40", "--seed", "99", "--fn", s(&fig2),
            "-o", s(&json), "--csv", s(&csv),
        ];
        ok(&bin_env(&args, &env), "simulate")?;
        sims.push((std::fs::read(&json).unwrap(), std::fs::read(&csv).unwrap()));
        let bench = dir.join(format!("bench{i}.csv"));
        let args = ["bench", "--fn", s(&fig2), "--ns", "16,32,64,128", "--trials", "10", "--seed", "3", "-o", s(&bench)];
        ok(&bin_env(&args, &env), "bench")?;
        benches.push(std::fs::read(&bench).unwrap());
    }
    ensure!(sims[0] == sims[1], "simulate outputs differ between runs");
    ensure!(benches[0] == benches[1], "bench outputs differ between runs");
    Ok("simulate JSON/CSV and bench CSV byte-identical across reruns and thread counts".into())
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let dir = tmp.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("fig1 corpus certification", Box::new(fig1_corpus)),
        ("compiler correctness", Box::new(|| compiler_correctness(dir))),
        ("decomposition", Box::new(|| decomposition(dir))),
        ("graph decider", Box::new(|| graph_decider(dir))),
        ("kinetics calibration", Box::new(calibration)),
        ("convergence scaling", Box::new(|| scaling(dir))),
        ("structural invariants", Box::new(structural_invariants)),
        ("predicate deciders", Box::new(|| predicates(dir))),
        ("determinism", Box::new(|| determinism(dir))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{took:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{took:.1?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
