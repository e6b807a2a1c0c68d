//! Acceptance criteria 1-8. Runs as a plain binary and prints one line per criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use doubling::achart::{
    cover_monomial_graph, extended_value_ratio, verify_achart, AChartLocator, MonomialData,
};
use doubling::io::{covering_to_string, read_covering};
use doubling::levelset::{level_base, level_residual};
use doubling::suspension::{covered_radius, layer_zeta, suspended_factor};
use doubling::verify::{
    certify_polydisc, chain_between, check_coverage, check_coverage_with, complexity_of,
    fit_log_exponent, intersection_witness, linear_fit, scaling_experiment, BoundFormula,
    Experiment,
};
use doubling::{
    cover_annulus, cover_monomial_level_set, eta_from_delta, AnnulusLayout, EtaParams,
    PolydiscCover,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const DELTAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

fn criterion_1() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for zeta in [2.0, 4.0] {
        let mut ks = Vec::new();
        for delta in DELTAS {
            let t = Instant::now();
            let cov = cover_annulus(delta, zeta).unwrap();
            let report = check_coverage(&cov, cov.target().unwrap(), 20_000, 0).unwrap();
            let whitney = cov
                .affine_charts()
                .unwrap()
                .iter()
                .all(|c| zeta * c.scales()[0].norm() < c.translation()[0].norm());
            let fast = t.elapsed() < Duration::from_secs(5);
            ok &= report.pass && report.samples_total >= 20_000 && whitney && fast;
            if !(report.pass && whitney && fast) {
                notes.push(format!(
                    "zeta={zeta} delta={delta}: coverage {} whitney {whitney} {:?}",
                    report.rate(),
                    t.elapsed()
                ));
            }
            ks.push(cov.kappa() as f64);
        }
        let xs: Vec<f64> = DELTAS.iter().map(|d| (1.0 / d).ln()).collect();
        let fit = linear_fit(&xs, &ks).unwrap();
        ok &= fit.r2 >= 0.99;
        notes.push(format!("zeta={zeta} kappa={ks:?} r2={:.5}", fit.r2));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let t = Instant::now();
    let mut rows = Vec::new();
    for eta in [1e-1, 1e-2, 1e-3] {
        let cover = PolydiscCover::new(2, eta, 2.0).unwrap();
        let plan = cover.plan();
        // independent recount of every level
        let zetas = [4.0, 2.0 * 4.0 / 2.0 / (1.0f64 - 0.25).sqrt()];
        let mut kappa = 1;
        for (l, zeta) in zetas.into_iter().enumerate() {
            let count = AnnulusLayout::new(eta, zeta).unwrap().count();
            kappa *= count;
            ok &= plan.per_level_count[l] == count && plan.per_level_kappa[l] == kappa;
            ok &= (plan.per_level_zeta[l] - zeta).abs() <= 1e-12 * zeta;
        }
        ok &= plan.per_level_kappa[1] == plan.per_level_count[1] * plan.per_level_kappa[0];
        let cert = certify_polydisc(&cover);
        let cov = check_coverage_with(&cover, &[eta, eta], 10_000, 0).unwrap();
        ok &= cert.pass && cov.pass;
        notes.push(format!(
            "eta={eta} kappa={} avoid={} coverage={}",
            cover.kappa(),
            cert.pass,
            cov.rate()
        ));
        rows.push((eta, cover.kappa()));
    }
    let full = t.elapsed();
    ok &= full < Duration::from_secs(60);
    let fit2 = fit_log_exponent(
        &scaling_experiment(
            &Experiment::Polydisc { n: 2, gamma: 2.0 },
            &[1e-1, 1e-2, 1e-3],
        )
        .unwrap(),
    )
    .unwrap();
    ok &= (fit2.slope - 2.0).abs() <= 0.3;
    let t3 = Instant::now();
    let plan3 = doubling::polydisc::polydisc_plan(3, 0.1, 2.0).unwrap();
    let rows3 = scaling_experiment(
        &Experiment::Polydisc { n: 3, gamma: 2.0 },
        &[0.3, 0.1, 0.03],
    )
    .unwrap();
    let fit3 = fit_log_exponent(&rows3).unwrap();
    let count_only = t3.elapsed();
    ok &= plan3.kappa() > 0
        && (fit3.slope - 3.0).abs() <= 0.4
        && count_only < Duration::from_secs(10);
    notes.push(format!(
        "n=2 exponent {:.3} in {full:.1?}; n=3 kappa(0.1)={} exponent {:.3} in {count_only:.1?}",
        fit2.slope,
        plan3.kappa(),
        fit3.slope
    ));
    outcome(ok, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let f = BoundFormula::Polydisc {
        n: 2,
        gamma: 2.0,
        eta: 0.1,
    };
    let kappa = PolydiscCover::new(2, 0.1, 2.0).unwrap().kappa();
    let report = complexity_of(kappa, &f);
    // 36^2 log(360)^2
    let expected = 44_901.501_987_093_7;
    let bound_ok =
        (report.bound - expected).abs() <= 5e-6 * expected && (report.bound - 4.49e4).abs() < 50.0;
    let eta = eta_from_delta(0.1, &EtaParams::new(0.5, 2.0, 2, 2).unwrap()).unwrap();
    let eta_ok = (eta - 0.05).abs() <= 1e-15;
    outcome(
        bound_ok && eta_ok,
        format!(
            "bound {:.6e} kappa {kappa} ratio {:.3}; eta {eta}",
            report.bound, report.ratio
        ),
    )
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let alpha = [2u32, 1];
    let c = Complex64::new(0.04, 0.0);
    let cov = cover_monomial_level_set(&alpha, c, 2.0).unwrap();
    let base = level_base(&alpha, c, 2.0).unwrap();
    let count_ok = cov.kappa() == 2 * base.kappa();
    let charts = cov.level_charts().unwrap();
    let worst = charts
        .par_iter()
        .enumerate()
        .map(|(i, ch)| {
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            let mut worst: f64 = 0.0;
            for _ in 0..1000 {
                let x = [Complex64::from_polar(
                    rng.gen::<f64>().sqrt(),
                    rng.gen_range(-3.2..3.2),
                )];
                let p = ch.evaluate(&x, 1.0).unwrap();
                worst = worst.max(level_residual(&p, &alpha, c) / c.norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let graph = check_coverage(&cov, cov.target().unwrap(), 10_000, 0).unwrap();
    let fast = t.elapsed() < Duration::from_secs(60);
    outcome(
        count_ok && worst <= 1e-10 && graph.pass && fast,
        format!(
            "kappa {} = 2 x {}; max rel residual {worst:.2e}; graph coverage {}; {:.1?}",
            cov.kappa(),
            base.kappa(),
            graph.rate(),
            t.elapsed()
        ),
    )
}

fn graph_coverage(
    data: &MonomialData,
    eps: f64,
    set: &doubling::achart::AChartSet,
    samples: usize,
) -> usize {
    let loc = AChartLocator::new(set).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut missed = 0;
    let mut tested = 0;
    while tested < samples {
        let x: Vec<f64> = (0..data.dim())
            .map(|_| eps.powf(rng.gen::<f64>()))
            .collect();
        if x.iter().any(|&v| v <= eps || v >= 1.0) || data.value(&x) >= 1.0 {
            continue;
        }
        tested += 1;
        let good = loc.locate(&x).into_iter().any(|(i, w)| {
            let p = set.charts[i].eval_real(&w);
            w.iter().all(|v| v.abs() <= 1.0)
                && p[..x.len()]
                    .iter()
                    .zip(&x)
                    .all(|(a, b)| (a - b).abs() <= 1e-12)
                && (p[x.len()] - data.value(&x)).abs() <= 1e-12 * data.value(&x)
        });
        if !good {
            missed += 1;
        }
    }
    missed
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for mu in [vec![1.0], vec![0.5, -0.25]] {
        let data = MonomialData::new(1.0, mu.clone()).unwrap();
        let a = 2f64.powf(mu.iter().map(|m: &f64| m.abs()).sum());
        for eps in DELTAS {
            let t = Instant::now();
            let set = cover_monomial_graph(&data, eps).unwrap();
            let (worst_dev, worst_ratio) = set
                .charts
                .par_iter()
                .map(|ch| {
                    let r = verify_achart(ch, 16).unwrap();
                    let dev = if r.pass {
                        r.max_deviation
                    } else {
                        f64::INFINITY
                    };
                    (dev, extended_value_ratio(ch, 16).unwrap())
                })
                .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
            let missed = graph_coverage(&data, eps, &set, 10_000);
            let fast = t.elapsed() < Duration::from_secs(30);
            let pass = worst_dev <= 1.0 + 1e-9 && worst_ratio <= a && missed == 0 && fast;
            ok &= pass;
            if !pass || eps == 1e-4 {
                notes.push(format!(
                    "mu={mu:?} eps={eps}: {} charts dev {worst_dev:.4} ratio {worst_ratio:.3}/{a:.3} missed {missed} {:.1?}",
                    set.charts.len(),
                    t.elapsed()
                ));
            }
        }
        let rows = scaling_experiment(&Experiment::Graph { data }, &DELTAS).unwrap();
        let fit = fit_log_exponent(&rows).unwrap();
        ok &= (fit.slope - mu.len() as f64).abs() <= 0.3;
        notes.push(format!("mu={mu:?} exponent {:.3}", fit.slope));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let tol = 1e-12;
    let mut ok = (suspended_factor(4.0, 2.0) - 2.0).abs() <= tol;
    ok &= (suspended_factor(3.0, 1.5) - 2.0).abs() <= tol;
    ok &= (covered_radius(2.0, 2.0) - 2.0 * 0.75f64.sqrt()).abs() <= tol;
    ok &= (covered_radius(1.0, 3.0) - (8.0f64 / 9.0).sqrt()).abs() <= tol;
    ok &= (layer_zeta(4.0, 2.0) - 8.0 / 3f64.sqrt()).abs() <= tol;
    ok &= (layer_zeta(2.0, 1.5) - 8.0 / 3.0 / (5.0f64 / 9.0).sqrt()).abs() <= tol;
    outcome(
        ok,
        format!("layer_zeta(4, 2) = {:.15}", layer_zeta(4.0, 2.0)),
    )
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut lengths = Vec::new();
    let mut radial = Vec::new();
    for delta in DELTAS {
        let cov = cover_annulus(delta, 2.0).unwrap();
        let charts = cov.affine_charts().unwrap();
        let r = delta * 1.05;
        let ends = [
            ([Complex64::new(r, 0.0)], [Complex64::new(-r, 0.0)]),
            ([Complex64::new(r, 0.0)], [Complex64::new(0.95, 0.0)]),
        ];
        for (k, (p, q)) in ends.iter().enumerate() {
            let chain = chain_between(&cov, p, q).unwrap();
            let ch = &chain.chart_indices;
            let mut valid = charts[ch[0]].contains(p, 1.0).unwrap()
                && charts[ch[ch.len() - 1]].contains(q, 1.0).unwrap();
            for (i, w) in chain.witnesses.iter().enumerate() {
                valid &= charts[ch[i]].contains(w, 1.0).unwrap()
                    && charts[ch[i + 1]].contains(w, 1.0).unwrap();
                valid &= intersection_witness(&charts[ch[i]], &charts[ch[i + 1]]).is_some();
            }
            ok &= valid && chain.length == ch.len() && chain.witnesses.len() + 1 == ch.len();
            if k == 0 {
                lengths.push(chain.length as f64);
            } else {
                radial.push(chain.length as f64);
            }
        }
    }
    let xs: Vec<f64> = DELTAS.iter().map(|d| (1.0 / d).ln()).collect();
    let fit = linear_fit(&xs, &lengths).unwrap();
    let radial_fit = linear_fit(&xs, &radial).unwrap();
    ok &= fit.slope.is_finite() && fit.r2 >= 0.95;
    outcome(
        ok,
        format!(
            "antipodal lengths {lengths:?} slope {:.3} r2 {:.4}; radial lengths {radial:?} slope {:.3} r2 {:.4}",
            fit.slope, fit.r2, radial_fit.slope, radial_fit.r2
        ),
    )
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_doubling"))
        .args(args)
        .output()
        .unwrap()
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut checked = 0;
    let jobs: [&[&str]; 4] = [
        &["cover", "annulus", "--delta", "0.01", "--zeta", "2"],
        &["cover", "polydisc", "--dim", "2", "--eta", "0.3"],
        &["cover", "levelset", "--alpha", "2,1", "--c", "0.04"],
        &["cover", "graph", "--mu", "0.5,-0.25", "--eps", "0.01"],
    ];
    for (i, job) in jobs.iter().enumerate() {
        let mut outs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{i}-{run}.json"));
            let mut args = job.to_vec();
            let p = path.to_str().unwrap().to_string();
            args.extend(["--out", p.as_str()]);
            ok &= run_cli(&args).status.success();
            outs.push(std::fs::read(&path).unwrap());
        }
        ok &= outs[0] == outs[1];
        if job[1] != "graph" {
            let cov = read_covering(outs[0].as_slice()).unwrap();
            ok &= covering_to_string(&cov).unwrap().as_bytes() == outs[0].as_slice();
        } else {
            let set = doubling::io::read_achart_set(outs[0].as_slice()).unwrap();
            let mut buf = Vec::new();
            doubling::io::write_achart_set(&set, &mut buf).unwrap();
            ok &= buf == outs[0];
        }
        checked += 1;
    }
    outcome(
        ok,
        format!("{checked} constructions byte-identical across runs and after reload"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("annulus construction", criterion_1),
        ("polydisc induction", criterion_2),
        ("bound instantiation", criterion_3),
        ("monomial level sets", criterion_4),
        ("real a-charts", criterion_5),
        ("suspension formulas", criterion_6),
        ("chains", criterion_7),
        ("determinism and round trip", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({}) [{:.1?}]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
