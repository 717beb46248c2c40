use crate::config::{Command, Format, RunConfig};
use crate::{emit_plot_data, CliError, PlotSource};
use selfsim_core::groups::{build_group, classify_oracle, GroupContext, OracleSequence};
use selfsim_core::growth::{
    ball_prefix_experiment, check_anti_contracting, check_contracting, enumerate_ball_with,
    growth_constants, growth_exponent_fit, BallOptions,
};
use selfsim_core::orbits::{
    graph_growth, inverted_orbit_growth_with, level_graph_with, orbit_graph_ball_with,
    InvertedOrbitRecord,
};
use selfsim_core::presentations::{generate_relators, verify_relators};
use selfsim_core::tree::BoundaryPoint;
use selfsim_core::walks::{
    monte_carlo_return, self_similar_check, spectral_radius_estimate, walk_series, walks_json,
    Measure, PsiMethod,
};
use serde_json::{json, Value};
use std::fmt::Write;

/// Result of a run: the main artifact, an optional plot file body, and the
/// description of a failed property check (if any).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub plot: Option<String>,
    pub failure: Option<String>,
}

impl Outcome {
    fn new(output: String) -> Self {
        Outcome {
            output,
            plot: None,
            failure: None,
        }
    }

    fn fail_if(mut self, failed: bool, message: impl Into<String>) -> Self {
        if failed {
            self.failure = Some(message.into());
        }
        self
    }
}

fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes") + "\n"
}

fn oracle(cfg: &RunConfig) -> Result<OracleSequence, CliError> {
    Ok(OracleSequence::parse(&cfg.oracle)?)
}

fn context(cfg: &RunConfig) -> Result<GroupContext, CliError> {
    Ok(build_group(&oracle(cfg)?, 0))
}

fn ball_options(cfg: &RunConfig, keep_elements: bool) -> BallOptions {
    BallOptions {
        max_elements: cfg.max_elements,
        max_seconds: cfg.max_seconds,
        keep_elements,
        allow_partial: false,
    }
}

fn measure(cfg: &RunConfig, ctx: &GroupContext, default: &str) -> Result<Measure, CliError> {
    Ok(match cfg.measure.as_deref().unwrap_or(default) {
        "uniform" => Measure::uniform_generators(ctx),
        "kaimanovich" => Measure::kaimanovich(ctx),
        text => Measure::parse(ctx, text)?,
    })
}

/// Runs on a dedicated pool when `threads` is set, otherwise on the global one.
pub fn run_in_pool(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Pool(e.to_string()))?
            .install(|| run(cfg)),
        None => run(cfg),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Growth => growth(cfg),
        Command::Contraction => contraction(cfg),
        Command::Schreier => schreier(cfg),
        Command::Orbit => orbit(cfg),
        Command::InvertedOrbit => inverted_orbit(cfg),
        Command::Walk => walk(cfg),
        Command::Psi => psi(cfg),
        Command::Relators => relators(cfg),
        Command::Constants => constants(cfg),
        Command::Classify => classify(cfg),
    }
}

fn growth(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if let Some(other) = &cfg.compare {
        let first = oracle(cfg)?;
        let second = OracleSequence::parse(other)?;
        let n = match cfg.shared_prefix {
            Some(n) => n,
            None => (0..64)
                .take_while(|&i| first.symbol_at(i) == second.symbol_at(i))
                .count()
                .min(6),
        };
        let cmp = ball_prefix_experiment(&first, &second, n, &ball_options(cfg, false))?;
        let output = match cfg.format {
            Format::Json => json_text(
                &json!({"schema": "ball-prefix/1", "first_oracle": first.to_string(),
                "second_oracle": second.to_string(), "comparison": cmp}),
            ),
            Format::Csv | Format::Text => {
                let mut s = String::from("n,first,second\n");
                for (n, (a, b)) in cmp.first.iter().zip(&cmp.second).enumerate() {
                    let _ = writeln!(s, "{n},{a},{b}");
                }
                s
            }
        };
        let msg = format!("ball sizes differ at radius {:?}", cmp.first_mismatch);
        return Ok(Outcome::new(output).fail_if(!cmp.agree, msg));
    }
    let ctx = context(cfg)?;
    let table = enumerate_ball_with(&ctx, cfg.radius, &ball_options(cfg, cfg.include_elements))?;
    let output = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut doc = table.to_json(cfg.include_elements);
            if let Ok(fit) = growth_exponent_fit(&table) {
                doc["exponent_fit"] = serde_json::to_value(fit).unwrap();
            }
            json_text(&doc)
        }
        Format::Text => {
            let mut s = format!("oracle {}\n", table.oracle());
            for n in 0..=table.radius() {
                let _ = writeln!(
                    s,
                    "n = {n:>3}  ball = {:>10}  sphere = {:>10}",
                    table.ball(n),
                    table.sphere(n)
                );
            }
            s
        }
    };
    Ok(Outcome {
        output,
        plot: Some(emit_plot_data(PlotSource::Growth(&table))),
        failure: None,
    })
}

fn contraction(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = context(cfg)?;
    let table = enumerate_ball_with(&ctx, cfg.radius, &ball_options(cfg, true))?;
    let contracting = check_contracting(&ctx, &table, cfg.lambda, cfg.constant)?;
    let anti = check_anti_contracting(&ctx, &table, cfg.anti_level, cfg.anti_ratio, cfg.constant)?;
    let output = match cfg.format {
        Format::Json => json_text(
            &json!({"schema": "contraction/1", "oracle": ctx.oracle().to_string(),
            "radius": cfg.radius, "contracting": contracting, "anti_contracting": anti}),
        ),
        Format::Csv | Format::Text => {
            let mut s = String::from("check,ratio,constant,level,checked,violations\n");
            for r in [&contracting, &anti] {
                let name = if r.anti { "anti" } else { "contracting" };
                let _ = writeln!(
                    s,
                    "{name},{},{},{},{},{}",
                    r.ratio, r.constant, r.level, r.checked, r.violations
                );
            }
            s
        }
    };
    let failed = !(contracting.holds() && anti.holds());
    let msg = format!(
        "{} contracting and {} anti-contracting violations",
        contracting.violations, anti.violations
    );
    Ok(Outcome::new(output).fail_if(failed, msg))
}

fn schreier(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = context(cfg)?;
    let graph = level_graph_with(&ctx, cfg.level, cfg.max_vertices)?;
    let output = match cfg.format {
        Format::Json => {
            let mut doc = graph.to_json();
            doc["level"] = json!(cfg.level);
            doc["connected"] = json!(graph.is_connected());
            json_text(&doc)
        }
        Format::Text => graph.to_edge_list(),
        Format::Csv => {
            let mut s = String::from("source,label,target\n");
            for (v, g, u) in graph.edges() {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    graph.vertices()[v],
                    g.to_char(),
                    graph.vertices()[u]
                );
            }
            s
        }
    };
    let ok = graph.vertex_count() == 1 << cfg.level && graph.is_connected();
    Ok(Outcome::new(output).fail_if(!ok, "level graph is not a connected graph on 2^k vertices"))
}

fn orbit(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = context(cfg)?;
    let point = BoundaryPoint::parse(&cfg.point)?;
    let graph = orbit_graph_ball_with(
        &ctx,
        &point,
        cfg.radius,
        cfg.expansion_cap,
        cfg.max_vertices,
    )?;
    let growth = graph_growth(&graph, &point);
    let linear = growth
        .iter()
        .enumerate()
        .all(|(r, &b)| b <= 4 * r as u64 + 1);
    let output = match cfg.format {
        Format::Json => json_text(
            &json!({"schema": "orbit/1", "oracle": ctx.oracle().to_string(),
            "point": point.to_string(), "radius": cfg.radius, "ball": growth, "within_linear_bound": linear}),
        ),
        Format::Csv | Format::Text => {
            let mut s = String::from("r,ball\n");
            for (r, b) in growth.iter().enumerate() {
                let _ = writeln!(s, "{r},{b}");
            }
            s
        }
    };
    Ok(Outcome::new(output))
}

fn inverted_orbit(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = context(cfg)?;
    let point = BoundaryPoint::parse(&cfg.point)?;
    let records: Vec<InvertedOrbitRecord> = (0..=cfg.steps)
        .map(|n| inverted_orbit_growth_with(&ctx, &point, n, cfg.max_inverted_steps))
        .collect::<Result<_, _>>()?;
    let output = match cfg.format {
        Format::Json => json_text(
            &json!({"schema": "inverted-orbit/1", "oracle": ctx.oracle().to_string(),
            "point": point.to_string(), "records": records}),
        ),
        Format::Csv | Format::Text => {
            let mut s = String::from("n,delta,witness\n");
            for r in &records {
                let _ = writeln!(s, "{},{},{}", r.n, r.delta, r.witness);
            }
            s
        }
    };
    Ok(Outcome::new(output))
}

fn walk(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = context(cfg)?;
    let mu = measure(cfg, &ctx, "uniform")?;
    let longest = mu.atoms().map(|a| a.word.len()).max().unwrap_or(1);
    let table = enumerate_ball_with(&ctx, cfg.steps * longest, &ball_options(cfg, true))?;
    let stats = walk_series(&ctx, &mu, cfg.steps, &table)?;
    let mc: Vec<_> = if cfg.samples > 0 {
        vec![monte_carlo_return(
            &ctx,
            &mu,
            cfg.steps,
            cfg.samples,
            cfg.seed,
        )]
    } else {
        Vec::new()
    };
    let csv = emit_plot_data(PlotSource::Walk(&stats));
    let output = match cfg.format {
        Format::Json => json_text(&walks_json(&ctx, &mu, &stats, &mc)),
        Format::Csv => csv.clone(),
        Format::Text => {
            let mut s = String::new();
            for st in &stats {
                let _ = writeln!(
                    s,
                    "n = {:>3}  P = {:<24}  H = {:.6}  L = {:.6}",
                    st.n, st.return_probability, st.entropy, st.drift
                );
            }
            if let Some(sup) = spectral_radius_estimate(&stats).running_sup.last() {
                let _ = writeln!(s, "sup P(2n)^(1/2n) = {sup:.6} (lower-bound diagnostic)");
            }
            for m in &mc {
                let _ = writeln!(
                    s,
                    "monte carlo P({}) = {:.6} ± {:.6}",
                    m.n, m.estimate, m.std_error
                );
            }
            s
        }
    };
    Ok(Outcome {
        output,
        plot: Some(csv),
        failure: None,
    })
}

fn psi(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = context(cfg)?;
    let mu = measure(cfg, &ctx, "kaimanovich")?;
    let method = match cfg.length_cap {
        Some(length_cap) => PsiMethod::TruncatedExact { length_cap },
        None => PsiMethod::MonteCarlo {
            samples: cfg.samples,
            path_cap: cfg.path_cap,
            seed: cfg.seed,
        },
    };
    let verdict = self_similar_check(&ctx, &mu, cfg.lambda, cfg.tol, cfg.vertex, &method)?;
    let output = match cfg.format {
        Format::Json => json_text(
            &json!({"schema": "psi/1", "oracle": ctx.oracle().to_string(), "verdict": verdict}),
        ),
        Format::Csv | Format::Text => {
            let mut s = String::from("word,mass\n");
            for a in &verdict.psi.atoms {
                let _ = writeln!(
                    s,
                    "{},{}",
                    if a.word.is_empty() { "e" } else { &a.word },
                    a.mass
                );
            }
            let _ = writeln!(
                s,
                "# distance {} residual {} tol {}",
                verdict.distance, verdict.residual_mass, verdict.tol
            );
            s
        }
    };
    let msg = format!(
        "distance {} + residual {} ≥ {}",
        verdict.distance, verdict.residual_mass, verdict.tol
    );
    Ok(Outcome::new(output).fail_if(!verdict.pass, msg))
}

fn relators(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let set = generate_relators(cfg.level)?;
    let ctx = build_group(&OracleSequence::xi(), 0);
    let report = verify_relators(&ctx, &set)?;
    let output = match cfg.format {
        Format::Json => json_text(&json!({"schema": "relators/1", "max_level": cfg.level,
            "report": report, "relators": set.relators()})),
        Format::Csv | Format::Text => set.to_text(),
    };
    Ok(Outcome::new(output))
}

fn constants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c = growth_constants();
    let output = match cfg.format {
        Format::Json => json_text(
            &json!({"schema": "constants/1", "rho": c.rho, "alpha0": c.alpha0, "eta_plus": c.eta_plus}),
        ),
        Format::Csv => format!(
            "name,value\nrho,{}\nalpha0,{}\neta_plus,{}\n",
            c.rho, c.alpha0, c.eta_plus
        ),
        Format::Text => format!(
            "rho = {}\nalpha0 = {}\neta_plus = {}\n",
            c.rho, c.alpha0, c.eta_plus
        ),
    };
    Ok(Outcome::new(output))
}

fn classify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let o = oracle(cfg)?;
    let class = classify_oracle(&o);
    let output = match cfg.format {
        Format::Json => {
            let mut doc = serde_json::to_value(&class).unwrap();
            doc["oracle"] = json!(o.to_string());
            json_text(&doc)
        }
        Format::Csv => format!(
            "oracle,in_omega0,in_omega1,in_theta,gap_constant\n{},{},{},{},{}\n",
            o,
            class.in_omega0,
            class.in_omega1,
            class.in_theta,
            class.gap_constant.map_or(String::new(), |g| g.to_string())
        ),
        Format::Text => format!("{o}: {class:?}\n"),
    };
    Ok(Outcome::new(output))
}
