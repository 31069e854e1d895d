//! Acceptance suite. Each test prints one `criterion N [PASS|FAIL]` line.
//!
//! Run with `cargo test -p thermimo-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermimo::*;

const TAU: f64 = 5e-8;

fn verdict(n: u32, name: &str, ok: bool, detail: String) {
    println!(
        "criterion {n} [{}] {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// A branch described only by its send and noise energies and temperatures.
fn energy_branch(send_energy: f64, t_send: f64, noise_energy: f64, t_noise: f64) -> BranchParams {
    BranchParams {
        signal_power: 0.75 * send_energy / TAU,
        fec_power: 0.25 * send_energy / TAU,
        noise_power: noise_energy / TAU,
        signal_dof: 1.0,
        fec_dof: 0.0,
        noise_dof: 1.0,
        signal_temperature: t_send,
        noise_temperature: t_noise,
    }
}

fn random_branches(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> Vec<BranchParams> {
    (0..n)
        .map(|_| {
            energy_branch(
                log_uniform(rng, 1e-20, 1e-20 * spread),
                rng.random_range(50.0..5000.0),
                log_uniform(rng, 1e-20, 1e-20 * spread),
                rng.random_range(50.0..5000.0),
            )
        })
        .collect()
}

/// Decoded outputs with independent temperatures and energies scaled so that
/// `U/T_HI = -Σ U_O/T_O + (U - Σ U_O)/T_LO` holds.
fn balanced_random_outputs(
    rng: &mut ChaCha8Rng,
    received: &ThermoQuantity,
    t_lo: f64,
) -> Vec<DecodeBranch> {
    let t_hi = received.temperature();
    let u = received.energy();
    let k = rng.random_range(1..=4);
    let temps: Vec<f64> = (0..k)
        .map(|_| t_hi * rng.random_range(0.01..=1.0))
        .collect();
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let denom: f64 = weights
        .iter()
        .zip(&temps)
        .map(|(w, t)| w * (1.0 / t + 1.0 / t_lo))
        .sum();
    let c = u * (1.0 / t_lo - 1.0 / t_hi) / denom;
    weights
        .iter()
        .zip(&temps)
        .map(|(w, &t)| DecodeBranch::new(c * w, t).unwrap())
        .collect()
}

fn random_decode(rng: &mut ChaCha8Rng) -> (ThermoQuantity, f64, Vec<DecodeBranch>) {
    let n = rng.random_range(1..=4);
    let received = received_quantity(&random_branches(rng, n, 1e3), TAU).unwrap();
    let t_lo = received.temperature() * rng.random_range(0.01..0.999);
    let outputs = balanced_random_outputs(rng, &received, t_lo);
    (received, t_lo, outputs)
}

#[test]
fn criterion_1_landauer_floor() {
    let floor = landauer_floor(298.15);
    let floor_err = rel(floor, 2.852e-21);

    // A detector far hotter than both the outputs and the noise pool.
    let hot = ThermoQuantity::from_energy_temperature(1e-12, 1e12).unwrap();
    let outputs = balanced_outputs(&hot, 4, 298.15, 298.15).unwrap();
    let limit = energy_per_bit(&hot, &outputs, 298.15).unwrap();
    let limit_err = rel(limit.direct, 2.852e-21).max(rel(limit.closed_form, 2.852e-21));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut below = 0;
    let mut tightest = f64::INFINITY;
    for _ in 0..10_000 {
        let (received, t_lo, outputs) = random_decode(&mut rng);
        let e = energy_per_bit(&received, &outputs, t_lo).unwrap();
        let f = landauer_floor(t_lo);
        tightest = tightest.min(e.direct / f);
        if e.direct < f {
            below += 1;
        }
    }
    let ok = floor_err <= 1e-3 && limit_err <= 1e-3 && below == 0;
    verdict(
        1,
        "landauer floor",
        ok,
        format!(
            "floor(298.15 K) = {floor:.6e} J/bit (rel err {floor_err:.1e}), hot-detector limit rel err \
             {limit_err:.1e}, 10000 balanced scenarios: {below} below floor, min direct/floor = {tightest:.4}"
        ),
    );
}

/// The nested-product closed form of the detector temperature, written term
/// for term.
fn detector_temperature_product_form(u: f64, send: &[BranchParams], noise: &[BranchParams]) -> f64 {
    let t: Vec<f64> = send.iter().map(|b| b.signal_temperature).collect();
    let tn: Vec<f64> = noise.iter().map(|b| b.noise_temperature).collect();
    let prod_t: f64 = t.iter().product();
    let prod_tn: f64 = tn.iter().product();
    let mut first = 0.0;
    for (i, b) in send.iter().enumerate() {
        let others: f64 = t
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v)
            .product();
        first += others * (b.signal_power * TAU + b.fec_power * TAU);
    }
    let mut second = 0.0;
    for (p, b) in noise.iter().enumerate() {
        let others: f64 = tn
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != p)
            .map(|(_, v)| v)
            .product();
        second += b.noise_power * TAU * others;
    }
    prod_t * u / (first + prod_t / prod_tn * second)
}

#[test]
fn criterion_2_product_form_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n_t = rng.random_range(1..=6);
        let n_r = rng.random_range(1..=4);
        let send = random_branches(&mut rng, n_t, 1e3);
        let noise = random_branches(&mut rng, n_r, 1e3);
        let u = log_uniform(&mut rng, 1e-20, 1e-16);
        let library = detector_temperature(u, &send, &noise, TAU).unwrap();
        let oracle = detector_temperature_product_form(u, &send, &noise);
        worst = worst.max(rel(library, oracle));
    }
    verdict(
        2,
        "detector temperature matches product-form oracle",
        worst <= 1e-6,
        format!("1000 scenarios (n_t <= 6, n_r <= 4), max rel diff {worst:.2e} (tol 1e-6)"),
    );
}

fn scaled(branches: &[BranchParams], factor: f64) -> Vec<BranchParams> {
    branches
        .iter()
        .map(|b| BranchParams {
            signal_power: b.signal_power * factor,
            fec_power: b.fec_power * factor,
            ..*b
        })
        .collect()
}

fn asymptote_errors(branches: &[BranchParams]) -> (f64, f64) {
    let mut errs = [0.0; 2];
    for (slot, factor) in [1e6, 1e-6].into_iter().enumerate() {
        let b = scaled(branches, factor);
        let u: f64 = b
            .iter()
            .map(|x| x.send_energy(TAU) + x.noise_energy(TAU))
            .sum();
        let t_hi = detector_temperature(u, &b, &b, TAU).unwrap();
        let limits = detector_temperature_limits(&b, &b, TAU).unwrap();
        let target = if factor > 1.0 {
            limits.high_snr
        } else {
            limits.low_snr
        };
        errs[slot] = rel(t_hi, target);
    }
    (errs[0], errs[1])
}

#[test]
fn criterion_3_temperature_asymptotes() {
    // One send branch of 1e-20 J at 300 K and one noise branch of 1e-20 J at 298.15 K.
    let worked = [energy_branch(1e-20, 300.0, 1e-20, 298.15)];
    let (mut high, mut low) = asymptote_errors(&worked);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let n = rng.random_range(1..=6);
        let (h, l) = asymptote_errors(&random_branches(&mut rng, n, 10.0));
        high = high.max(h);
        low = low.max(l);
    }
    verdict(
        3,
        "detector temperature asymptotes",
        high <= 1e-3 && low <= 1e-3,
        format!("signal x1e6: max rel dist to high-SNR limit {high:.2e}; signal x1e-6: to low-SNR limit {low:.2e} (tol 1e-3)"),
    );
}

fn ratio_spec(rng: &mut ChaCha8Rng, n: usize) -> LinkSpec {
    let bandwidth = log_uniform(rng, 1e3, 1e8);
    let branches = (0..n)
        .map(|_| BranchParams {
            signal_power: log_uniform(rng, 1e-3, 1e4),
            fec_power: 0.0,
            noise_power: 1.0,
            signal_dof: log_uniform(rng, 1e-3, 1e3),
            fec_dof: 0.0,
            noise_dof: 1.0,
            signal_temperature: 300.0,
            noise_temperature: 300.0,
        })
        .collect();
    LinkSpec::new(bandwidth, 1.0 / bandwidth, branches, n, n).unwrap()
}

#[test]
fn criterion_4_bound_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    let mut single_worst: f64 = 0.0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=8);
        let spec = ratio_spec(&mut rng, n);
        let r = thermo_capacity(&spec).unwrap();
        // Rounding allowance proportional to the size of the log terms.
        let scale: f64 = r
            .per_branch_terms
            .iter()
            .map(|t| t.snr_term + t.dof_term)
            .sum::<f64>()
            + spec.bandwidth;
        let slack = 1e-12 * scale;
        if r.lower_bound > r.thermo_capacity + slack || r.thermo_capacity > r.upper_bound + slack {
            violations += 1;
        }
        if n == 1 {
            let gap = (r.lower_bound - r.thermo_capacity)
                .abs()
                .max((r.upper_bound - r.thermo_capacity).abs());
            single_worst = single_worst.max(gap / scale);
        }
    }
    verdict(
        4,
        "capacity bound sandwich",
        violations == 0 && single_worst <= 1e-12,
        format!("10000 specs (n <= 8): {violations} violations; n = 1 max |bound - C| / scale = {single_worst:.1e}"),
    );
}

/// Capacity with the freedom terms removed, summed directly from the powers.
fn shannon_oracle(spec: &LinkSpec) -> f64 {
    spec.branches
        .iter()
        .map(|b| spec.bandwidth * (1.0 + (b.signal_power + b.fec_power) / b.noise_power).log2())
        .sum()
}

#[test]
fn criterion_5_fig4_trend() {
    let base = Scenario::table1();
    let records = fig4_sweep(base.clone()).unwrap();
    let thermo: Vec<f64> = records
        .iter()
        .map(|r| r.capacity_result.thermo_capacity)
        .collect();
    let increasing = thermo.windows(2).all(|w| w[1] > w[0]);
    let first_dof = records[0].variable_value;
    let last_dof = records.last().unwrap().variable_value;
    let mut at_end = base.clone();
    at_end.noise_dof = last_dof;
    let shannon = shannon_oracle(&scenario_to_link_spec(&at_end).unwrap());
    let gap = rel(*thermo.last().unwrap(), shannon);
    let min_first = thermo.iter().all(|&c| c >= thermo[0]);
    let ok = increasing && min_first && first_dof == 1.0 && last_dof == 1e6 && gap <= 1e-2;
    verdict(
        5,
        "fig4 trend",
        ok,
        format!(
            "{} points over M_N in [{first_dof}, {last_dof:e}], strictly increasing: {increasing}, \
             minimum at first point: {min_first}, final rel gap to Shannon {gap:.2e} (tol 1e-2)",
            records.len()
        ),
    );
}

#[test]
fn criterion_6_fig5_trend() {
    let base = Scenario::table1();
    let records = fig5_sweep(base.clone()).unwrap();
    let psi: Vec<f64> = records.iter().map(|r| r.variable_value).collect();
    let thermo: Vec<f64> = records
        .iter()
        .map(|r| r.capacity_result.thermo_capacity)
        .collect();
    let uniform = psi
        .windows(3)
        .all(|w| rel(w[2] - w[1], w[1] - w[0]) <= 1e-9);
    let increasing = thermo.windows(2).all(|w| w[1] > w[0]);
    let max_second = thermo
        .windows(3)
        .map(|w| (w[2] - w[1]) - (w[1] - w[0]))
        .fold(f64::NEG_INFINITY, f64::max);
    // Second differences are a few orders of magnitude above rounding noise.
    let concave = max_second <= 1e-9 * thermo.last().unwrap();
    let mut below = true;
    let mut sandwich = true;
    for r in &records {
        let mut s = base.clone();
        s.coding_overhead = r.variable_value;
        let shannon = shannon_oracle(&scenario_to_link_spec(&s).unwrap());
        let c = &r.capacity_result;
        below &= c.thermo_capacity < shannon;
        sandwich &= c.lower_bound <= c.thermo_capacity && c.thermo_capacity <= c.upper_bound;
    }
    let ok = uniform && increasing && concave && below && sandwich;
    verdict(
        6,
        "fig5 trend",
        ok,
        format!(
            "{} points, uniform grid: {uniform}, increasing: {increasing}, max second difference \
             {max_second:.3e} bit/s, below Shannon: {below}, sandwich: {sandwich}",
            records.len()
        ),
    );
}

#[test]
fn criterion_7_conservation_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // Freedom balance on branches built from known freedoms and temperatures.
    let mut dof_worst: f64 = 0.0;
    for _ in 0..1000 {
        let n_t = rng.random_range(1..=6);
        let n_r = rng.random_range(1..=4);
        let mut known = 0.0;
        let mut draw = |rng: &mut ChaCha8Rng| {
            let m = rng.random_range(0.1..100.0);
            let t = rng.random_range(50.0..5000.0);
            known += m;
            (BIT_FACTOR * m * t, t)
        };
        let send: Vec<BranchParams> = (0..n_t)
            .map(|_| {
                let (e, t) = draw(&mut rng);
                energy_branch(e, t, 1e-20, 300.0)
            })
            .collect();
        let noise: Vec<BranchParams> = (0..n_r)
            .map(|_| {
                let (e, t) = draw(&mut rng);
                energy_branch(1e-20, 300.0, e, t)
            })
            .collect();
        let u: f64 = send.iter().map(|b| b.send_energy(TAU)).sum::<f64>()
            + noise.iter().map(|b| b.noise_energy(TAU)).sum::<f64>();
        let t_hi = detector_temperature(u, &send, &noise, TAU).unwrap();
        dof_worst = dof_worst.max(rel(u / (BIT_FACTOR * t_hi), known));
    }

    // Entropy balance and the Carnot relation on balance-satisfying decodes.
    let mut entropy_worst: f64 = 0.0;
    let mut carnot_worst: f64 = 0.0;
    let mut corrected_worst: f64 = 0.0;
    for _ in 0..1000 {
        let (received, t_lo, outputs) = random_decode(&mut rng);
        let balance = decode_entropy_balance(&received, &outputs, t_lo).unwrap();
        let output_entropy: f64 = outputs
            .iter()
            .map(|o| o.output_energy() / o.output_temperature())
            .sum();
        let sink_entropy = BIT_FACTOR * balance.noise_sink_dof;
        entropy_worst = entropy_worst
            .max(rel(received.entropy(), sink_entropy - output_entropy))
            .max(balance.residual.abs());

        let eta = carnot_efficiency(t_lo, received.temperature()).unwrap();
        let m_out: f64 = outputs.iter().map(|o| o.output_dof()).sum();
        carnot_worst = carnot_worst.max(rel(m_out, eta * balance.noise_sink_dof));

        // Relation implied by the balance: the factor 1 + T_O/T_HI, with T_O
        // the freedom-weighted mean output temperature.
        let mean_t_out: f64 = outputs
            .iter()
            .map(|o| o.output_dof() * o.output_temperature())
            .sum::<f64>()
            / m_out;
        let implied = eta * balance.noise_sink_dof / (1.0 + mean_t_out / received.temperature());
        corrected_worst = corrected_worst.max(rel(m_out, implied));
    }

    let ok = dof_worst <= 1e-9 && entropy_worst <= 1e-9 && carnot_worst <= 1e-6;
    verdict(
        7,
        "conservation identities",
        ok,
        format!(
            "freedom balance max rel err {dof_worst:.1e} (tol 1e-9); entropy balance {entropy_worst:.1e} \
             (tol 1e-9); Carnot relation sum M_O = eta_c * sum M_NS {carnot_worst:.3e} (tol 1e-6); \
             with the 1/(1 + T_O/T_HI) factor implied by the balance {corrected_worst:.1e}"
        ),
    );
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (f(a) + inner + f(b))
}

#[test]
fn criterion_8_derivation_consistency() {
    let bandwidth = 20e6;
    let tau = 1.0 / bandwidth;
    let psi = 0.2;
    let noise_temp = 298.15;
    let noise_power = BOLTZMANN * noise_temp * bandwidth;
    // Noise freedom chosen so that N tau = k_B T_N M_N ln 2.
    let noise_dof = noise_power * tau / (BIT_FACTOR * noise_temp);
    let signal_power = 10.0 * noise_power;
    let signal_dof = 6.0;
    let signal_temp = signal_power * tau / (BIT_FACTOR * signal_dof);
    let branch = BranchParams {
        signal_power,
        fec_power: psi * signal_power,
        noise_power,
        signal_dof,
        fec_dof: psi * signal_dof,
        noise_dof,
        signal_temperature: signal_temp,
        noise_temperature: noise_temp,
    };
    let spec = LinkSpec::new(bandwidth, tau, vec![branch; 4], 4, 4).unwrap();
    let result = thermo_capacity(&spec).unwrap();
    let net = result.per_branch_terms[0].net();

    let energy = (branch.signal_power + branch.fec_power + branch.noise_power) * tau;
    let dof = branch.signal_dof + branch.fec_dof + branch.noise_dof;
    let t_ip = energy / (BIT_FACTOR * dof);
    let integral = simpson(|t| 1.0 / t, noise_temp, t_ip, 2000);
    let rate = tau * bandwidth / std::f64::consts::LN_2 * integral / tau;
    let err = rel(rate, net);
    verdict(
        8,
        "derivation consistency",
        err <= 1e-4,
        format!(
            "T_N = {noise_temp} K, T_IP = {t_ip:.4} K, integrated rate {rate:.6e} bit/s vs branch term \
             {net:.6e} bit/s, rel err {err:.1e} (tol 1e-4)"
        ),
    );
}

fn run_fig(dir: &Path, fig: &str, threads: &str, tag: &str) -> Vec<u8> {
    let out = dir.join(format!("{fig}-{tag}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_thermimo"))
        .args([fig, "--preset", "table1", "-o"])
        .arg(&out)
        .env("THERMIMO_THREADS", threads)
        .output()
        .expect("run thermimo");
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    std::fs::read(out).unwrap()
}

#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut sizes = Vec::new();
    for fig in ["fig4", "fig5"] {
        let one = run_fig(dir.path(), fig, "1", "t1");
        let four = run_fig(dir.path(), fig, "4", "t4a");
        let again = run_fig(dir.path(), fig, "4", "t4b");
        ok &= one == four && four == again && !one.is_empty();
        sizes.push(format!("{fig} {} bytes", one.len()));
    }
    verdict(
        9,
        "determinism",
        ok,
        format!(
            "{}; identical across 1 and 4 threads and across reruns: {ok}",
            sizes.join(", ")
        ),
    );
}
