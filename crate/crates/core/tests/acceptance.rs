//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use polar_wiretap::channels::{compose_degraded, DegradationKernel, DiscreteChannel};
use polar_wiretap::construction::{bec_z_profile, WiretapCodeSpec};
use polar_wiretap::gf2::ColumnSet;
use polar_wiretap::gf2::{mat_vec_mul, polar_generator, BitVector};
use polar_wiretap::polar::{exact_combined_prob, exact_split_table, vector_prob};
use polar_wiretap::secrecy::{
    conditional_mutual_info_profile, conjecture_scan, exact_equivocation,
    exact_equivocation_per_position, fano_equivocation_bound, mutual_info_profile,
    noisy_code_parity_check, pattern_equivocation, ErasurePattern, PolarizationClass,
};
use polar_wiretap::sim::{
    run_conjecture_scan, run_fer_experiment, run_secrecy_experiment, ExperimentConfig,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_secs: u64, what: &str) -> Result<(), String> {
    if elapsed > Duration::from_secs(limit_secs) {
        Err(format!(
            "{what} took {:.2}s, limit {limit_secs}s",
            elapsed.as_secs_f64()
        ))
    } else {
        Ok(())
    }
}

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(text).expect("acceptance config parses")
}

fn bits(v: usize, len: usize) -> BitVector {
    BitVector::from_bools((0..len).map(|j| (v >> (len - 1 - j)) & 1 == 1))
}

/// Recursive combined-channel probability against the matrix form.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for c in [
        DiscreteChannel::bec(0.5).unwrap(),
        DiscreteChannel::bsc(0.3).unwrap(),
    ] {
        for n in [2usize, 4] {
            let g = polar_generator(n).unwrap();
            let q = c.outputs();
            for w_idx in 0..1usize << n {
                let w = bits(w_idx, n);
                let x = mat_vec_mul(&w, &g).unwrap();
                for y_idx in 0..q.pow(n as u32) {
                    let y: Vec<usize> = (0..n)
                        .map(|p| (y_idx / q.pow((n - 1 - p) as u32)) % q)
                        .collect();
                    let recursive = exact_combined_prob(&c, &w, &y).map_err(|e| e.to_string())?;
                    worst = worst.max((recursive - vector_prob(&c, x.as_slice(), &y)).abs());
                }
            }
        }
    }
    within(start.elapsed(), 10, "enumeration")?;
    check(
        worst <= 1e-12,
        format!("max |diff| = {worst:.3e} (limit 1e-12)"),
    )
}

/// Erasure recursion: conservation, small values, and agreement with the split tables.
fn criterion_2() -> Outcome {
    let mut worst_cons = 0.0f64;
    for delta in [0.5, 0.3, 0.123] {
        let mut parent = bec_z_profile(delta, 1).unwrap().z;
        let mut n = 2;
        while n <= 1 << 16 {
            let child = bec_z_profile(delta, n).unwrap().z;
            for (i, &z) in parent.iter().enumerate() {
                worst_cons = worst_cons.max((child[2 * i] + child[2 * i + 1] - 2.0 * z).abs());
            }
            parent = child;
            n *= 2;
        }
    }
    let z4 = bec_z_profile(0.5, 4).unwrap().z;
    let want = [0.9375, 0.5625, 0.4375, 0.0625];
    let values_ok = z4.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-12);
    let c = DiscreteChannel::bec(0.5).unwrap();
    let mut worst_table = 0.0f64;
    for (l, &z) in z4.iter().enumerate() {
        let b = exact_split_table(&c, 4, l).unwrap().bhattacharyya();
        worst_table = worst_table.max((b - z).abs());
    }
    check(
        worst_cons <= 1e-12 && values_ok && worst_table <= 1e-9,
        format!(
            "conservation max {worst_cons:.3e} (<=1e-12), n=4 values {z4:?}, split-table max diff {worst_table:.3e} (<=1e-9)"
        ),
    )
}

/// Polarization fractions at `n = 2^20`.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let p = bec_z_profile(0.5, 1 << 20).unwrap();
    let low = p.fraction_below(1e-9);
    let high = p.fraction_above(1.0 - 1e-9);
    within(start.elapsed(), 5, "profile")?;
    check(
        (0.45..=0.50).contains(&low) && (0.45..=0.50).contains(&high) && low + high >= 0.93,
        format!(
            "fraction Z<1e-9 = {low:.6}, fraction Z>1-1e-9 = {high:.6}, sum = {:.6} (need each in [0.45, 0.50], sum >= 0.93)",
            low + high
        ),
    )
}

/// FER decay and the union bound on BEC(0.3) at rate 0.5.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let cfg = config(
        "seed = 4\nn = [256, 1024, 4096]\ntrials = 10000\nr = 0.5\nr_star = 0.0\n[legit]\nkind = \"bec\"\np = 0.3\n",
    );
    let report = run_fer_experiment(&cfg).map_err(|e| e.to_string())?;
    within(start.elapsed(), 120, "simulation")?;
    let t = cfg.trials as f64;
    let sigma = |p: f64| (p * (1.0 - p) / t).sqrt();
    let mut lines = Vec::new();
    let mut ok = report.points.iter().all(|p| p.skipped.is_none());
    let fers: Vec<f64> = report
        .points
        .iter()
        .map(|p| p.fer.unwrap_or(f64::NAN))
        .collect();
    for p in &report.points {
        let (fer, ub) = (p.fer.unwrap_or(f64::NAN), p.union_bound.unwrap_or(f64::NAN));
        let ub_ok = fer <= ub + 3.0 * sigma(fer);
        ok &= ub_ok;
        lines.push(format!("n={} fer={fer:.5} union={ub:.5}", p.n));
    }
    for w in fers.windows(2) {
        ok &= w[1] <= w[0] + 3.0 * (sigma(w[0]).powi(2) + sigma(w[1]).powi(2)).sqrt();
    }
    ok &= fers[2] < fers[0] / 5.0;
    check(ok, lines.join(", "))
}

/// Split channels of a degraded pair factor through the kernel.
fn criterion_5() -> Outcome {
    let pair = compose_degraded(
        &DiscreteChannel::bec(0.2).unwrap(),
        &DegradationKernel::erase_surviving(0.25).unwrap(),
    )
    .unwrap();
    let joint = pair.joint();
    let (ys, zs) = (pair.legit.outputs(), pair.kernel.outputs());
    let mut worst = 0.0f64;
    for n in [2usize, 4] {
        for l in 0..n {
            let jt = exact_split_table(&joint, n, l).unwrap();
            let gt = exact_split_table(&pair.legit, n, l).unwrap();
            for j_idx in 0..jt.output_vectors() {
                let v = jt.output_vector(j_idx);
                let (y, z): (Vec<usize>, Vec<usize>) =
                    v.iter().map(|&s| pair.split_joint(s)).unzip();
                let y_idx = y.iter().fold(0, |acc, &s| acc * ys + s);
                let d: f64 = y
                    .iter()
                    .zip(&z)
                    .map(|(&a, &b)| pair.kernel.prob(a, b))
                    .product();
                debug_assert!(z.iter().all(|&s| s < zs));
                for prefix in 0..jt.prefixes() {
                    let (p0, p1) = jt.pair(j_idx, prefix);
                    let (g0, g1) = gt.pair(y_idx, prefix);
                    worst = worst.max((p0 - g0 * d).abs()).max((p1 - g1 * d).abs());
                }
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("max |diff| = {worst:.3e} over n in {{2, 4}} (limit 1e-12)"),
    )
}

/// Per-pattern exact entropy equals the rank at the erased columns.
fn criterion_6() -> Outcome {
    let specs: Vec<(usize, Vec<usize>)> = vec![
        (2, vec![1]),
        (4, vec![3]),
        (4, vec![1, 3]),
        (4, vec![]),
        (8, vec![7]),
        (8, vec![3, 5, 6, 7]),
        (8, vec![0, 1, 2, 3]),
        (8, vec![1, 2, 3, 4, 5, 6, 7]),
    ];
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for (n, noisy) in &specs {
        let info: Vec<usize> = (0..*n).filter(|i| !noisy.contains(i)).collect();
        let spec = WiretapCodeSpec::new(*n, &info, noisy, None).unwrap();
        let h = ColumnSet::new(&noisy_code_parity_check(&spec).unwrap());
        for mask in 0..1usize << n {
            let d: Vec<usize> = (0..*n).filter(|i| (mask >> i) & 1 == 1).collect();
            let pattern = ErasurePattern::new(*n, &d).unwrap();
            let exact =
                exact_equivocation_per_position(&spec, &pattern.as_channels(), None).unwrap();
            let rank = pattern_equivocation(&h, &pattern).unwrap();
            worst = worst.max((exact - rank as f64).abs());
            checked += 1;
        }
    }
    let spec = WiretapCodeSpec::new(2, &[0], &[1], None).unwrap();
    let h2 = exact_equivocation(&spec, &DiscreteChannel::bec(0.5).unwrap(), None).unwrap();
    check(
        worst <= 1e-12 && (h2 - 0.75).abs() <= 1e-12,
        format!("{checked} patterns, max |entropy - rank| = {worst:.3e}; n=2 H(U|Z) = {h2}"),
    )
}

fn secrecy_bec_1024() -> Result<polar_wiretap::sim::RunReport, String> {
    let cfg = config(
        "seed = 7\nn = [1024]\ntrials = 1000\nepsilon = 0.01\n[secrecy]\nmode = \"rank\"\n[legit]\nkind = \"noiseless\"\n[eve]\nkind = \"bec\"\np = 0.4\n",
    );
    run_secrecy_experiment(&cfg).map_err(|e| e.to_string())
}

/// Desk-scale secrecy with a noiseless main channel and BEC(0.4) eavesdropper.
fn criterion_7() -> Outcome {
    let start = Instant::now();
    let report = secrecy_bec_1024()?;
    within(start.elapsed(), 60, "secrecy run")?;
    let p = &report.points[0];
    if let Some(reason) = &p.skipped {
        return Err(format!("point skipped: {reason}"));
    }
    let a_rate = p.info_size as f64 / 1024.0;
    let eq = p.equiv_rate.unwrap();
    check(
        a_rate >= 0.38 && eq >= 0.9 * a_rate,
        format!(
            "|A|/n = {a_rate:.4} (>= 0.38), equivocation rate = {eq:.4} (>= {:.4})",
            0.9 * a_rate
        ),
    )
}

/// Measured equivocation dominates the Fano bound on every secrecy run.
fn criterion_8() -> Outcome {
    let runs = [
        secrecy_bec_1024()?,
        run_secrecy_experiment(&config(
            "seed = 8\nn = [8]\ntrials = 10000\n[legit]\nkind = \"bsc\"\np = 0.05\n[kernel]\nkind = \"flip\"\np = 0.0666666666666667\n",
        ))
        .map_err(|e| e.to_string())?,
        run_secrecy_experiment(&config(
            "seed = 9\nn = [4, 8]\ntrials = 10000\n[secrecy]\nmode = \"exact\"\n[legit]\nkind = \"bec\"\np = 0.1\n[eve]\nkind = \"bec\"\np = 0.5\n",
        ))
        .map_err(|e| e.to_string())?,
        run_secrecy_experiment(&config(
            "seed = 10\nn = [256, 1024]\ntrials = 2000\nr_star = 0.3\n[legit]\nkind = \"noiseless\"\n[eve]\nkind = \"bec\"\np = 0.6\n",
        ))
        .map_err(|e| e.to_string())?,
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for report in &runs {
        for p in &report.points {
            if let Some(reason) = &p.skipped {
                ok = false;
                lines.push(format!("n={} skipped: {reason}", p.n));
                continue;
            }
            let n = p.n as f64;
            let t = p.trials as f64;
            let pe = p.fer_informed.unwrap();
            let pe_hi = (pe + 3.0 * (pe * (1.0 - pe) / t).sqrt()).min(1.0);
            let bound =
                fano_equivocation_bound(p.info_size, p.n, p.r_star, report_eps(report, p), pe_hi)
                    .unwrap();
            ok &= p.equiv_rate.unwrap() + 3.0 * p.equiv_std_error.unwrap_or(0.0) / n >= bound;
            lines.push(format!(
                "n={} equiv_rate={:.4} fano={:.4}{}",
                p.n,
                p.equiv_rate.unwrap(),
                p.fano_bound.unwrap(),
                if p.exact { " (exact)" } else { "" }
            ));
        }
    }
    check(ok, lines.join(", "))
}

/// `ε` used by the run's own bound: eavesdropper capacity minus the noisy-set rate.
fn report_eps(report: &polar_wiretap::sim::RunReport, p: &polar_wiretap::sim::PointResult) -> f64 {
    let ch = report.config.channels().expect("validated config");
    ch.eve_capacity.expect("secrecy run has an eavesdropper") - p.r_star
}

/// Mutual information identities of the conjecture explorer.
fn criterion_9() -> Outcome {
    let c = DiscreteChannel::bec(0.5).unwrap();
    let cap = c.capacity().unwrap();
    let delta = 0.3;
    let mut worst_sum = 0.0f64;
    let mut violations = 0usize;
    let mut identity_ok = true;
    let mut misclassified = 0usize;
    let mut choices = 0usize;
    for n in [2usize, 4, 8] {
        let i_report = mutual_info_profile(&c, n).map_err(|e| e.to_string())?;
        let i: Vec<f64> = (0..n).map(|k| i_report.get(k).unwrap()).collect();
        worst_sum = worst_sum.max((i.iter().sum::<f64>() - n as f64 * cap).abs());
        for mask in 1..1usize << n {
            let d: Vec<usize> = (0..n).filter(|k| (mask >> k) & 1 == 1).collect();
            let j = conditional_mutual_info_profile(&c, n, &d).map_err(|e| e.to_string())?;
            violations += d
                .iter()
                .filter(|&&k| j.get(k).unwrap() < i[k] - 1e-12)
                .count();
            if d.len() == n {
                identity_ok &= (0..n).all(|k| j.get(k) == Some(i[k]));
            }
        }
        // Revealed indices all precede the decoded ones.
        let good: Vec<usize> = (0..n).filter(|&k| i[k] > 1.0 - delta).collect();
        for first in 0..n {
            let d: Vec<usize> = (first..n).collect();
            let a_prime: Vec<usize> = d.iter().copied().filter(|k| good.contains(k)).collect();
            let s: Vec<usize> = d.iter().copied().filter(|k| !good.contains(k)).collect();
            let r = conjecture_scan(&c, n, delta, &a_prime, &s).map_err(|e| e.to_string())?;
            choices += 1;
            for (&k, class) in s.iter().zip(&r.classes) {
                let by_i = if i[k] < delta {
                    PolarizationClass::Bad
                } else if i[k] > 1.0 - delta {
                    PolarizationClass::Good
                } else {
                    PolarizationClass::Unpolarized
                };
                misclassified += usize::from(*class != by_i);
            }
        }
    }
    check(
        worst_sum <= 1e-9 && violations == 0 && identity_ok && misclassified == 0,
        format!(
            "max |sum I - nC| = {worst_sum:.3e}, J<I violations = {violations}, J=I with nothing revealed: {identity_ok}, \
             {misclassified} misclassified over {choices} degenerate choices"
        ),
    )
}

/// Fixing the noisy bits leaks information.
fn criterion_10() -> Outcome {
    let spec = WiretapCodeSpec::new(2, &[0], &[1], None).unwrap();
    let eve = DiscreteChannel::bec(0.5).unwrap();
    let random = exact_equivocation(&spec, &eve, None).unwrap();
    let fixed = exact_equivocation(&spec, &eve, Some(&BitVector::zeros(1))).unwrap();
    let margin = random - fixed;
    check(
        margin > 0.0 && (margin - 0.25).abs() <= 1e-12,
        format!("H(U|Z) = {random}, H(U|Z, b* fixed) = {fixed}, margin = {margin}"),
    )
}

/// Same seed, same CSV body, whatever the worker count.
fn criterion_11() -> Outcome {
    let base = [
        ("fer", "n = [64, 256]\ntrials = 2000\nconstruction_trials = 2000\n[legit]\nkind = \"bsc\"\np = 0.08\n"),
        ("secrecy", "n = [8, 256]\ntrials = 500\nconstruction_trials = 500\n[legit]\nkind = \"noiseless\"\n[eve]\nkind = \"bec\"\np = 0.45\n"),
        ("conjecture", "n = [4, 8]\n[legit]\nkind = \"bsc\"\np = 0.1\n"),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (kind, body) in base {
        let mut bodies = Vec::new();
        for workers in [1usize, 4, 1, 3] {
            let cfg = config(&format!("seed = 11\nworkers = {workers}\n{body}"));
            let report = match kind {
                "fer" => run_fer_experiment(&cfg),
                "secrecy" => run_secrecy_experiment(&cfg),
                _ => run_conjecture_scan(&cfg),
            }
            .map_err(|e| e.to_string())?;
            bodies.push(report.to_csv().map_err(|e| e.to_string())?);
        }
        let same = bodies.windows(2).all(|w| w[0] == w[1]);
        ok &= same && bodies[0].lines().count() > 1;
        lines.push(format!("{kind}: {} runs identical = {same}", bodies.len()));
    }
    check(ok, lines.join(", "))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("combined-channel recursion equals matrix form", criterion_1),
        ("erasure Z-recursion", criterion_2),
        ("polarization fractions at n = 2^20", criterion_3),
        ("FER decay and union bound", criterion_4),
        ("split-channel degradation", criterion_5),
        ("rank/equivocation identity", criterion_6),
        ("secrecy at n = 1024", criterion_7),
        ("Fano bound consistency", criterion_8),
        ("mutual information suite", criterion_9),
        ("fixed noisy bits leak", criterion_10),
        ("determinism across worker counts", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
