//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any fails.

mod common;

use common::{all_words, brute_force_delta, naive_ball};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim_core::groups::{
    build_group, local_relations_hold, word_string, Gen, GroupContext, OracleSequence, GENERATORS,
};
use selfsim_core::growth::{
    ball_prefix_experiment, check_anti_contracting, check_contracting, enumerate_ball,
    enumerate_ball_with, growth_constants, BallOptions,
};
use selfsim_core::growth::{rho_polynomial, GrowthTable};
use selfsim_core::orbits::{graph_growth, inverted_orbit_growth, level_graph, orbit_graph_ball};
use selfsim_core::presentations::{generate_relators, verify_relators};
use selfsim_core::tree::{bisimilar, first_grigorchuk_automaton, BoundaryPoint};
use selfsim_core::walks::{
    monte_carlo_return, psi_map, self_similar_check, walk_series, walks_json, Measure, PsiMethod,
};
use selfsim_core::word::{equal, is_identity, order_of, signature_at, Order};
use std::collections::HashMap;
use std::time::Instant;

const RELATOR_LEVEL: usize = 6;
const RELATOR_SECONDS: f64 = 60.0;
const NEGATIVE_CONTROLS: usize = 20;
const ORACLE_SET_RADIUS: usize = 6;
const ORACLE_COUNT_RADIUS: usize = 10;
const RELATION_DEPTH: usize = 12;
const PREFIX_RADIUS_TARGET: usize = 32;
const PREFIX_RADIUS_MIN: usize = 16;
const CONTRACTION_RADIUS: usize = 8;
const TORSION_RADIUS: usize = 6;
const TORSION_CAP: u64 = 256;
const WALK_EXACT_N: usize = 6;
const WALK_BOUND_N: usize = 10;
const MC_SIGMAS: f64 = 4.0;
const PSI_TV_MC: f64 = 0.01;
const PSI_TV_EXACT: f64 = 1e-3;
const PSI_SAMPLES: u64 = 1_000_000;
const PSI_LENGTH_CAP: usize = 30;
const PSI_CAPTURED: f64 = 0.999;
const RHO_RESIDUAL: f64 = 1e-12;
const CONSTANT_TOL: f64 = 1e-4;
const LEVEL_MAX: usize = 12;
const ORBIT_RADIUS: usize = 200;
const DELTA_N: usize = 8;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn xi() -> GroupContext {
    build_group(&OracleSequence::xi(), 0)
}

fn random_reduced_word(rng: &mut ChaCha8Rng, len: usize) -> Vec<Gen> {
    let mut w = Vec::with_capacity(len);
    let mut spine_next = rng.gen_bool(0.5);
    for _ in 0..len {
        w.push(if spine_next {
            [Gen::B, Gen::C, Gen::D][rng.gen_range(0..3)]
        } else {
            Gen::A
        });
        spine_next = !spine_next;
    }
    w
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let g = xi();
    let set = generate_relators(RELATOR_LEVEL).map_err(|e| e.to_string())?;
    ensure(
        set.len() == 5 + 2 * (RELATOR_LEVEL + 1),
        format!("{} relators generated", set.len()),
    )?;
    ensure(
        set.max_length() <= 3usize.pow(RELATOR_LEVEL as u32) * 24,
        "relator longer than 3^k·24",
    )?;
    let report = verify_relators(&g, &set).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut controls = 0;
    while controls < NEGATIVE_CONTROLS {
        let len = rng.gen_range(5..=9);
        let w = random_reduced_word(&mut rng, len);
        if g.word_to_automorphism(&w).is_trivial_to_depth(6) {
            continue;
        }
        ensure(
            !is_identity(&g, &w),
            format!("negative control {} reported as identity", word_string(&w)),
        )?;
        controls += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < RELATOR_SECONDS, format!("took {secs:.1}s"))?;
    Ok(format!(
        "{} relators up to σ^{RELATOR_LEVEL} (longest {} letters) are trivial; {controls} controls non-trivial; {secs:.2}s",
        report.checked, report.max_length
    ))
}

/// Ball sizes with deduplication by exact word-problem equality, bucketed by
/// a fixed-depth portrait signature.
fn slow_ball_counts(g: &GroupContext, radius: usize) -> Vec<usize> {
    let mut buckets: HashMap<Vec<u8>, Vec<Vec<Gen>>> = HashMap::new();
    let mut frontier = vec![Vec::new()];
    buckets
        .entry(signature_at(g, &[], 8).to_bytes())
        .or_default()
        .push(Vec::new());
    let mut spheres = vec![1];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for s in GENERATORS {
                let mut v = w.clone();
                v.push(s);
                let bucket = buckets
                    .entry(signature_at(g, &v, 8).to_bytes())
                    .or_default();
                if !bucket.iter().any(|u| equal(g, u, &v)) {
                    bucket.push(v.clone());
                    next.push(v);
                }
            }
        }
        spheres.push(next.len());
        frontier = next;
    }
    spheres
}

fn criterion_2() -> Check {
    let g = xi();
    let table = enumerate_ball(&g, ORACLE_COUNT_RADIUS).map_err(|e| e.to_string())?;
    let naive = naive_ball(&g, ORACLE_SET_RADIUS, 12);
    for (n, layer) in naive.iter().enumerate() {
        let fast: std::collections::BTreeSet<Vec<_>> = table
            .elements()
            .filter(|e| e.length == n)
            .map(|e| g.word_to_automorphism(&e.word).portrait(12))
            .collect();
        ensure(&fast == layer, format!("element sets differ at radius {n}"))?;
    }
    let slow = slow_ball_counts(&g, ORACLE_COUNT_RADIUS);
    let fast: Vec<usize> = table.spheres().iter().map(|&x| x as usize).collect();
    ensure(
        slow == fast,
        format!("sphere counts {fast:?} vs independent {slow:?}"),
    )?;
    Ok(format!(
        "element sets equal to depth-12 action classes for r ≤ {ORACLE_SET_RADIUS}; counts equal for r ≤ {ORACLE_COUNT_RADIUS} (γ({ORACLE_COUNT_RADIUS}) = {})",
        table.ball(ORACLE_COUNT_RADIUS)
    ))
}

fn criterion_3() -> Check {
    let mut oracles = vec![OracleSequence::xi(), OracleSequence::eta()];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let prefix: Vec<u8> = (0..rng.gen_range(0..5))
            .map(|_| rng.gen_range(0..3))
            .collect();
        let period: Vec<u8> = (0..rng.gen_range(1..6))
            .map(|_| rng.gen_range(0..3))
            .collect();
        oracles.push(OracleSequence::new(prefix, period).map_err(|e| e.to_string())?);
    }
    for o in &oracles {
        let g = build_group(o, 0);
        ensure(
            local_relations_hold(&g, RELATION_DEPTH),
            format!("relations fail for {o}"),
        )?;
    }
    let g = xi();
    let explicit = first_grigorchuk_automaton();
    for s in GENERATORS {
        let state = g.generator(s).states()[0];
        let name = s.to_char().to_string();
        ensure(
            bisimilar(
                (g.family().automaton(), state),
                (&explicit, explicit.state(&name).unwrap()),
            ),
            format!("{name} differs from the explicit recursion"),
        )?;
    }
    let names: Vec<String> = oracles.iter().map(ToString::to_string).collect();
    Ok(format!(
        "relations hold to depth {RELATION_DEPTH} for {}; ξ bisimilar to b=(a,c), c=(a,d), d=(1,b)",
        names.join(", ")
    ))
}

fn criterion_4() -> Check {
    let first = OracleSequence::xi();
    let second = OracleSequence::parse("012012(0)*").unwrap();
    let cmp = ball_prefix_experiment(&first, &second, 6, &BallOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(
        cmp.compared_radius >= PREFIX_RADIUS_MIN,
        format!("only reached radius {}", cmp.compared_radius),
    )?;
    ensure(
        cmp.agree,
        format!("first mismatch at radius {:?}", cmp.first_mismatch),
    )?;
    let reached = if cmp.compared_radius >= PREFIX_RADIUS_TARGET {
        "full target"
    } else {
        "budget-limited"
    };
    Ok(format!(
        "{first} and {second}: γ(n) identical for n ≤ {} ({reached}; γ({}) = {})",
        cmp.compared_radius, cmp.compared_radius, cmp.first[cmp.compared_radius]
    ))
}

fn criterion_5() -> Check {
    let g = xi();
    let table = enumerate_ball(&g, CONTRACTION_RADIUS).map_err(|e| e.to_string())?;
    let c = check_contracting(&g, &table, 0.5, 1.0).map_err(|e| e.to_string())?;
    let a = check_anti_contracting(&g, &table, 1, 2.0, 1.0).map_err(|e| e.to_string())?;
    ensure(
        c.holds(),
        format!(
            "{} contracting violations, worst {:?}",
            c.violations, c.worst
        ),
    )?;
    ensure(
        a.holds(),
        format!(
            "{} anti-contracting violations, worst {:?}",
            a.violations, a.worst
        ),
    )?;
    Ok(format!(
        "{} section checks and {} elements, zero violations of either inequality",
        c.checked, a.checked
    ))
}

fn criterion_6() -> Check {
    let g = xi();
    let table = enumerate_ball(&g, TORSION_RADIUS).map_err(|e| e.to_string())?;
    let mut largest = 1;
    for e in table.elements() {
        match order_of(&g, &e.word, TORSION_CAP) {
            Order::Finite(n) if n.is_power_of_two() => largest = largest.max(n),
            other => return Err(format!("{} has order {other:?}", word_string(&e.word))),
        }
    }
    Ok(format!(
        "{} elements, all orders powers of 2, largest {largest}",
        table.ball(TORSION_RADIUS)
    ))
}

fn criterion_7() -> Check {
    let g = xi();
    let mu = Measure::uniform_generators(&g);
    let table = enumerate_ball(&g, 2 * WALK_BOUND_N).map_err(|e| e.to_string())?;
    let stats = walk_series(&g, &mu, 2 * WALK_BOUND_N, &table).map_err(|e| e.to_string())?;
    ensure(
        stats[2].return_probability == "1/4",
        format!("P(2) = {}", stats[2].return_probability),
    )?;
    for n in 0..=WALK_EXACT_N {
        let hits = all_words(n).filter(|w| is_identity(&g, w)).count();
        let naive = format!(
            "{}",
            num_rational::Ratio::new(hits as u64, 4u64.pow(n as u32))
        );
        ensure(
            stats[n].return_probability == naive,
            format!("P({n}) = {} vs {naive}", stats[n].return_probability),
        )?;
    }
    for n in 0..=WALK_BOUND_N {
        let p = stats[2 * n].return_probability_f64;
        ensure(
            1.0 / p <= table.ball(2 * n) as f64,
            format!("1/P({}) exceeds γ", 2 * n),
        )?;
        ensure(
            stats[n].entropy <= (table.ball(n) as f64).ln() + 1e-12,
            format!("H({n}) exceeds log γ({n})"),
        )?;
    }
    let mut worst: f64 = 0.0;
    for (n, seed) in [(6, 1), (10, 2)] {
        let mc = monte_carlo_return(&g, &mu, n, 200_000, seed);
        let p = stats[n].return_probability_f64;
        let sigma = (p * (1.0 - p) / mc.samples as f64).sqrt();
        let z = (mc.estimate - p).abs() / sigma;
        worst = worst.max(z);
        ensure(
            z <= MC_SIGMAS,
            format!(
                "Monte Carlo P({n}) = {} vs exact {p} ({z:.2}σ)",
                mc.estimate
            ),
        )?;
    }
    Ok(format!(
        "P(2) = 1/4; P(n) matches 4^n word count for n ≤ {WALK_EXACT_N}; Kesten/entropy bounds for n ≤ {WALK_BOUND_N}; Monte Carlo within {worst:.2}σ"
    ))
}

fn criterion_8() -> Check {
    let g = xi();
    let mu = Measure::kaimanovich(&g);
    let mc = PsiMethod::MonteCarlo {
        samples: PSI_SAMPLES,
        path_cap: 10_000,
        seed: 8,
    };
    let exact = PsiMethod::TruncatedExact {
        length_cap: PSI_LENGTH_CAP,
    };
    let v_mc = self_similar_check(&g, &mu, 0.5, PSI_TV_MC, 0, &mc).map_err(|e| e.to_string())?;
    let v_ex =
        self_similar_check(&g, &mu, 0.5, PSI_TV_EXACT, 0, &exact).map_err(|e| e.to_string())?;
    ensure(v_mc.pass, format!("Monte Carlo distance {}", v_mc.distance))?;
    ensure(
        v_ex.pass,
        format!("truncated-exact distance {}", v_ex.distance),
    )?;
    ensure(
        v_ex.psi.captured_mass > PSI_CAPTURED,
        format!("captured mass {}", v_ex.psi.captured_mass),
    )?;
    let uniform = Measure::uniform_generators(&g);
    let v_u = self_similar_check(&g, &uniform, 0.5, PSI_TV_EXACT, 0, &exact)
        .map_err(|e| e.to_string())?;
    let margin = v_u.distance + v_u.residual_mass - PSI_TV_EXACT;
    ensure(
        !v_u.pass && margin > 0.0,
        "uniform measure passed the check",
    )?;
    let other = psi_map(&g, &mu, 1, &exact).map_err(|e| e.to_string())?;
    let e_mass = other
        .atoms
        .iter()
        .find(|a| a.word.is_empty())
        .map_or(0.0, |a| a.mass);
    Ok(format!(
        "vertex 0: TV {:.2e} (MC, 10^6 samples), {:.2e} (exact, captured {:.6}); uniform fails by {margin:.4}; vertex 1 ψ(e) = {e_mass:.4}",
        v_mc.distance, v_ex.distance, v_ex.psi.captured_mass
    ))
}

fn criterion_9() -> Check {
    let c = growth_constants();
    let residual = rho_polynomial(c.rho).abs();
    ensure(residual < RHO_RESIDUAL, format!("ρ residual {residual:e}"))?;
    ensure(
        (c.alpha0 - 0.7674).abs() < CONSTANT_TOL,
        format!("α₀ = {}", c.alpha0),
    )?;
    ensure(
        (c.alpha0 - 2f64.ln() / (2.0 / c.rho).ln()).abs() < 1e-15,
        "α₀ formula",
    )?;
    ensure(
        (c.eta_plus - 2.4675).abs() < CONSTANT_TOL,
        format!("η₊ = {}", c.eta_plus),
    )?;
    Ok(format!(
        "ρ = {:.12} (residual {residual:.1e}), α₀ = {:.6}, η₊ = {:.6}",
        c.rho, c.alpha0, c.eta_plus
    ))
}

fn criterion_10() -> Check {
    let g = xi();
    for k in 0..=LEVEL_MAX {
        let graph = level_graph(&g, k).map_err(|e| e.to_string())?;
        ensure(
            graph.vertex_count() == 1 << k && graph.is_connected(),
            format!("level {k} graph"),
        )?;
    }
    let x = BoundaryPoint::constant(0);
    let orbit = orbit_graph_ball(&g, &x, ORBIT_RADIUS).map_err(|e| e.to_string())?;
    let growth = graph_growth(&orbit, &x);
    for (r, &b) in growth.iter().enumerate().take(ORBIT_RADIUS + 1) {
        ensure(b <= 4 * r as u64 + 1, format!("|ball({r})| = {b}"))?;
    }
    let mut deltas = Vec::new();
    for n in 0..=DELTA_N {
        let fast = inverted_orbit_growth(&g, &x, n).map_err(|e| e.to_string())?;
        let (delta, w) = brute_force_delta(&g, &x, n);
        ensure(
            fast.delta == delta && fast.witness == word_string(&w),
            format!("Δ({n}) = {} vs {delta}", fast.delta),
        )?;
        deltas.push(delta);
    }
    Ok(format!(
        "level graphs connected on 2^k vertices for k ≤ {LEVEL_MAX}; |ball({ORBIT_RADIUS})| = {}; Δ(0..={DELTA_N}) = {deltas:?} equals brute force",
        growth[ORBIT_RADIUS]
    ))
}

fn artifacts() -> (String, String) {
    let g = xi();
    let opts = BallOptions {
        keep_elements: true,
        ..Default::default()
    };
    let table: GrowthTable = enumerate_ball_with(&g, 14, &opts).unwrap();
    let mu = Measure::uniform_generators(&g);
    let stats = walk_series(&g, &mu, 10, &table).unwrap();
    let mc = vec![monte_carlo_return(&g, &mu, 10, 50_000, 11)];
    let psi = psi_map(
        &g,
        &Measure::kaimanovich(&g),
        0,
        &PsiMethod::MonteCarlo {
            samples: 20_000,
            path_cap: 1000,
            seed: 5,
        },
    )
    .unwrap();
    (
        serde_json::to_string(&table.to_json(true)).unwrap(),
        serde_json::to_string(&(walks_json(&g, &mu, &stats, &mc), psi)).unwrap(),
    )
}

fn criterion_11() -> Check {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(artifacts)
    };
    let one = run(1);
    let many = run(4);
    ensure(
        one.0 == many.0,
        "growth table JSON differs between 1 and 4 threads",
    )?;
    ensure(
        one.1 == many.1,
        "walk statistics JSON differs between 1 and 4 threads",
    )?;
    Ok(format!(
        "growth JSON ({} bytes) and walk JSON ({} bytes) identical for 1 and 4 threads",
        one.0.len(),
        one.1.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("relator suite", criterion_1),
        ("oracle equivalence", criterion_2),
        ("relations and construction", criterion_3),
        ("ball-prefix coincidence", criterion_4),
        ("contraction sweeps", criterion_5),
        ("torsion", criterion_6),
        ("walks, exact", criterion_7),
        ("self-similar measure", criterion_8),
        ("constants", criterion_9),
        ("orbits", criterion_10),
        ("determinism", criterion_11),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2} ({name})", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {label} [{secs:.1}s]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {label} [{secs:.1}s]: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
