//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{projection_residual_snr, rayleigh, Paired};
use ssus::complexity::{model_cost, reconcile_ledger, CostMethod, CostQuery};
use ssus::harness::{run_monte_carlo, sweep, ExperimentConfig, RunOutput, Variant};
use ssus::metrics::{zf_post_snr, SelectedChannel};
use ssus::numerics::{binomial, correlation, gram_schmidt_extend, subset_count, OpLedger};
use ssus::selectors::{ss_us, ss_us_basis, sus};
use ssus::{Algorithm, SelectionConfig};

const SEED: u64 = 20_240_601;
const P0_6DB: f64 = -90.0;

/// Achieved values, pinned as regression anchors.
const PINNED_ORACLE_RATIO: f64 = 0.896471498047;
const PINNED_GZF_RATIOS: [f64; 3] = [0.937322165664, 0.947562857506, 0.958438543121];
const PIN_TOL: f64 = 1e-9;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn scenario(m: usize, u: usize, trials: usize, algorithms: Vec<Algorithm>) -> ExperimentConfig {
    ExperimentConfig {
        antennas: vec![m],
        users: vec![u],
        p0_dbm: vec![P0_6DB],
        algorithms,
        trials,
        master_seed: SEED,
        ..ExperimentConfig::default()
    }
}

/// Per-trial sum SE of one variant; panics on failed cells.
fn series(out: &RunOutput, scenario_id: usize, variant: usize) -> Vec<f64> {
    out.trials_for(scenario_id)
        .map(|t| t.cells[variant].as_ref().expect("cell succeeded").sum_se)
        .collect()
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn pinned(value: f64, anchor: f64) -> bool {
    (value - anchor).abs() <= PIN_TOL
}

fn cost(method: CostMethod, u: u64, m: u64, k: u64) -> BigUint {
    model_cost(&CostQuery::new(method, u, m, k, 1).unwrap())
}

fn complexity_ratios() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for m in [4, 8, 16] {
        let s = cost(CostMethod::Ssus, 100, m, m);
        let u = cost(CostMethod::Sus, 100, m, m);
        let g = cost(CostMethod::Gzf, 100, m, m);
        ok &= s < u && u < g;
        notes.push(format!("M={m}: {s}<{u}<{g}"));
    }
    let (g8, s8) = (
        cost(CostMethod::Gzf, 100, 8, 8),
        cost(CostMethod::Ssus, 100, 8, 8),
    );
    let (c16, s16) = (
        cost(CostMethod::McorePlus, 100, 16, 16),
        cost(CostMethod::Ssus, 100, 16, 16),
    );
    ok &= g8 == BigUint::from(180_252u32) && s8 == BigUint::from(6912u32);
    ok &= g8 > &s8 * 10u32;
    ok &= c16 > &s16 * 2500u32;
    notes.push(format!(
        "GZF/SSUS(8)={g8}/{s8}, mCore+/SSUS(16)={c16}/{s16}"
    ));
    outcome(ok, notes.join("; "))
}

fn oracle_bound() -> Outcome {
    let algs = vec![
        Algorithm::Ssus,
        Algorithm::Sus,
        Algorithm::Gzf,
        Algorithm::McorePlus,
        Algorithm::Random,
        Algorithm::Exhaustive,
    ];
    let out = run_monte_carlo(&scenario(4, 10, 200, algs), 0).unwrap();
    let oracle = out.variants.len() - 1;
    let best = series(&out, 0, oracle);
    let mut violations = 0;
    for v in 0..oracle {
        violations += series(&out, 0, v)
            .iter()
            .zip(&best)
            .filter(|(a, b)| a > b)
            .count();
    }
    let ssus = series(&out, 0, 0);
    let ratio = mean(
        &ssus
            .iter()
            .zip(&best)
            .map(|(a, b)| a / b)
            .collect::<Vec<_>>(),
    );
    outcome(
        violations == 0 && ratio >= 0.80 && pinned(ratio, PINNED_ORACLE_RATIO),
        format!("violations={violations}, mean SS-US/oracle={ratio:.12} (floor 0.80)"),
    )
}

fn l_monotonicity() -> Outcome {
    let mut cfg = scenario(8, 100, 500, vec![Algorithm::Ssus]);
    cfg.bases = vec![1, 10, 100];
    let out = run_monte_carlo(&cfg, 0).unwrap();
    let s: Vec<Vec<f64>> = (0..3).map(|v| series(&out, 0, v)).collect();
    let mut ok = true;
    let mut notes = Vec::new();
    for (lo, hi, name) in [(0, 1, "L10-L1"), (1, 2, "L100-L10")] {
        let p = Paired::new(&s[hi], &s[lo]);
        ok &= mean(&s[hi]) >= mean(&s[lo]) && p.lower95() >= 0.0;
        notes.push(format!(
            "{name}: mean diff {:.4}, 95% lower {:.4}",
            p.mean,
            p.lower95()
        ));
    }
    notes.push(format!(
        "means {:.4}/{:.4}/{:.4}",
        mean(&s[0]),
        mean(&s[1]),
        mean(&s[2])
    ));
    outcome(ok, notes.join("; "))
}

fn random_lower_bound() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for m in [4, 8] {
        let ss = run_monte_carlo(&scenario(m, 50, 500, vec![Algorithm::Ssus]), 0).unwrap();
        let kb = ss.report.rows[0].mean_kb.unwrap();
        let k = (kb.round() as usize).clamp(1, m);
        let mut rcfg = scenario(m, 50, 500, vec![Algorithm::Random]);
        rcfg.k_max = Some(k);
        let rnd = run_monte_carlo(&rcfg, 0).unwrap();
        let paired = ss
            .trials
            .iter()
            .zip(&rnd.trials)
            .all(|(a, b)| a.channel_fingerprint == b.channel_fingerprint);
        let p = Paired::new(&series(&ss, 0, 0), &series(&rnd, 0, 0));
        ok &= paired && p.mean > 0.0 && p.t_stat() > p.t95();
        notes.push(format!(
            "M={m}: K={k} (mean K_b {kb:.3}), diff {:.4}, t={:.2}",
            p.mean,
            p.t_stat()
        ));
    }
    outcome(ok, notes.join("; "))
}

fn baseline_proximity() -> Outcome {
    let alphas = [0.35, 0.45, 0.55, 0.65];
    let mut cfg = scenario(4, 20, 1000, vec![Algorithm::Ssus, Algorithm::Gzf]);
    cfg.users = vec![20, 50, 100];
    cfg.alphas = alphas.to_vec();
    let out = sweep(&cfg, 0).unwrap();
    let gzf = out
        .variant_index(|v| v.algorithm == Algorithm::Gzf)
        .unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for (i, p) in out.points.iter().enumerate() {
        let g = mean(&series(&out, p.id, gzf));
        let (best_alpha, best) = alphas
            .iter()
            .map(|&a| {
                let v = out.variant_index(|v: &Variant| v.alpha == Some(a)).unwrap();
                (a, mean(&series(&out, p.id, v)))
            })
            .fold(
                (0.0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        let ratio = best / g;
        ok &= ratio >= 0.85 && pinned(ratio, PINNED_GZF_RATIOS[i]);
        notes.push(format!(
            "U={}: alpha={best_alpha} ratio={ratio:.12}",
            p.users
        ));
    }
    outcome(ok, notes.join("; "))
}

fn invariants() -> Outcome {
    let mut notes = Vec::new();

    let mut worst = 0.0f64;
    for m in [2, 4, 8, 16] {
        for s in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(s ^ (m as u64) << 32);
            let seed = ssus::numerics::complex_gaussian(&mut rng, m);
            let n = seed.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let seed: Vec<_> = seed.iter().map(|z| z / n).collect();
            let b = gram_schmidt_extend(&seed, 0, &mut rng, &mut OpLedger::new()).unwrap();
            worst = worst.max(b.max_cross_inner()).max(b.max_norm_error());
        }
    }
    let gs_ok = worst <= 1e-10;
    notes.push(format!("GS err {worst:.2e}"));

    let mut cone_ok = true;
    let mut seed_ok = true;
    for s in 0..200u64 {
        let (m, u) = ([2, 4, 8][s as usize % 3], 10 + (s as usize % 40));
        let h = rayleigh(m, u, s);
        let alpha = 0.3 + 0.1 * (s % 5) as f64;
        let cfg = SelectionConfig::new(Algorithm::Ssus, m)
            .with_alpha(alpha)
            .with_bases(1 + s as usize % 7)
            .with_seed(s);
        let r = ss_us(&h, &cfg, 0.25, &mut OpLedger::new()).unwrap();
        let norms: Vec<f64> = h
            .columns()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        let max = norms.iter().cloned().fold(f64::MIN, f64::max);
        seed_ok &= norms[r.selected[0]] == max;
        let su = sus(&h, &cfg.with_sus_epsilon(0.3), 0.25, &mut OpLedger::new()).unwrap();
        seed_ok &= norms[su.selected[0]] == max;
        let basis = ss_us_basis(&h, s, r.winning_basis.unwrap()).unwrap();
        for (&user, &dir) in r
            .selected
            .iter()
            .zip(r.matched_direction.as_ref().unwrap())
            .skip(1)
        {
            cone_ok &= correlation(h.column(user), basis.column(dir), &mut OpLedger::new())
                .unwrap()
                >= alpha;
        }
    }
    notes.push(format!("cone {cone_ok}, seed=max-norm {seed_ok}"));

    let grid = ExperimentConfig {
        antennas: vec![4, 8],
        users: vec![20, 50],
        p0_dbm: vec![-90.0],
        trials: 40,
        master_seed: SEED,
        bases: vec![1, 10],
        ..ExperimentConfig::default()
    };
    let one = sweep(&grid, 1).unwrap().report.to_csv().unwrap();
    let eight = sweep(&grid, 8).unwrap().report.to_csv().unwrap();
    let det_ok = one == eight;
    notes.push(format!("1 vs 8 workers identical {det_ok}"));

    let mut zf_worst = 0.0f64;
    for s in 0..1000u64 {
        let k = 1 + (s as usize % 6);
        let m = k + (s as usize / 6) % 3;
        let h = rayleigh(m, k, 10_000 + s);
        let users: Vec<usize> = (0..k).collect();
        let sel = SelectedChannel::new(&h, users.clone()).unwrap();
        let a = zf_post_snr(&sel, 0.3, &mut OpLedger::new()).unwrap();
        let b = projection_residual_snr(&h, &users, 0.3);
        for (x, y) in a.iter().zip(&b) {
            zf_worst = zf_worst.max((x - y).abs() / y.abs().max(1.0));
        }
    }
    let zf_ok = zf_worst <= 1e-8;
    notes.push(format!("ZF vs residual {zf_worst:.2e}"));

    outcome(
        gs_ok && cone_ok && seed_ok && det_ok && zf_ok,
        notes.join("; "),
    )
}

fn ledger_reconciliation() -> Outcome {
    let (m, u) = (8usize, 100usize);
    let h = rayleigh(m, u, SEED);
    let n0 = 0.25;
    let macs = |l: usize| {
        let mut ledger = OpLedger::new();
        let cfg = SelectionConfig::new(Algorithm::Ssus, m)
            .with_bases(l)
            .with_seed(7);
        ss_us(&h, &cfg, n0, &mut ledger).unwrap();
        ledger
    };
    let base = macs(1).complex_macs;
    let slope = macs(2).complex_macs - base;
    // One basis: completing the seed with MGS plus the full correlation table.
    let mgs: usize = (1..m).map(|j| 2 * m * j + 2 * m).sum();
    let single_basis = (mgs + u * (m - 1) * m) as u64;
    let affine = [1u64, 2, 3, 5, 10, 25, 100]
        .iter()
        .all(|&l| macs(l as usize).complex_macs == base + (l - 1) * slope);
    let mut ok = affine && slope == single_basis;
    let mut notes = vec![format!(
        "affine {affine}, slope {slope} (single basis {single_basis})"
    )];

    let k = m / 2;
    for (method, ledger) in [
        (CostMethod::Ssus, {
            let mut l = OpLedger::new();
            ss_us(
                &h,
                &SelectionConfig::new(Algorithm::Ssus, k).with_seed(7),
                n0,
                &mut l,
            )
            .unwrap();
            l
        }),
        (CostMethod::Sus, {
            let mut l = OpLedger::new();
            sus(&h, &SelectionConfig::new(Algorithm::Sus, k), n0, &mut l).unwrap();
            l
        }),
    ] {
        let q = CostQuery::new(method, u as u64, m as u64, k as u64, 1).unwrap();
        let r = reconcile_ledger(&q, &ledger).unwrap();
        ok &= r.within_band;
        notes.push(format!(
            "{}: {}/{} = {:.3}",
            method.name(),
            r.measured_macs,
            r.model,
            r.ratio
        ));
    }
    outcome(ok, notes.join("; "))
}

fn subset_anchors() -> Outcome {
    // The top-size term of the cumulative count is the plain binomial.
    let top = |u: u64, k: u64| subset_count(u, k).unwrap() - subset_count(u, k - 1).unwrap();
    let (a, b) = (binomial(50, 4), binomial(100, 8));
    let ok = a == BigUint::from(230_300u32)
        && b == BigUint::from(186_087_894_300u64)
        && top(50, 4) == a
        && top(100, 8) == b;
    outcome(
        ok,
        format!(
            "C(50,4)={a}, C(100,8)={b}, subset_count(100,8)={}",
            subset_count(100, 8).unwrap()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("complexity-model ratios", complexity_ratios),
        ("oracle bound and near-optimality", oracle_bound),
        ("L-monotonicity", l_monotonicity),
        ("random lower bound", random_lower_bound),
        ("baseline proximity", baseline_proximity),
        ("algorithmic invariants", invariants),
        ("ledger reconciliation", ledger_reconciliation),
        ("subset-count anchors", subset_anchors),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} criterion {}: {name} [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
