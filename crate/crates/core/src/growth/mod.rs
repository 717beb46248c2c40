//! Exact ball enumeration in the Cayley graph of `𝒢_ω` with respect to
//! `{a, b, c, d}`, plus contraction sweeps, ball-prefix comparisons, growth
//! exponent diagnostics and numeric constants.

mod constants;
mod contraction;
mod keyset;

pub use constants::{eta_polynomial, growth_constants, rho_polynomial, Constants};
pub use contraction::{check_anti_contracting, check_contracting, ContractionReport, Witness};

use crate::error::{Error, Result};
use crate::groups::{build_group, word_string, Gen, GroupContext, OracleSequence, GENERATORS};
use crate::word::{element_key_into, ElementKey};
use keyset::KeySet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const DEFAULT_MAX_ELEMENTS: usize = 5_000_000;
const CHUNK: usize = 1 << 15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallOptions {
    /// Stop once the ball holds more than this many elements.
    pub max_elements: usize,
    /// Soft wall-clock limit, checked between chunks of a layer.
    pub max_seconds: Option<f64>,
    /// Keep every element (key and geodesic word); otherwise only the last
    /// layers needed for deduplication are held.
    pub keep_elements: bool,
    /// Return a table marked incomplete instead of `ResourceCap`.
    pub allow_partial: bool,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions {
            max_elements: DEFAULT_MAX_ELEMENTS,
            max_seconds: None,
            keep_elements: true,
            allow_partial: false,
        }
    }
}

#[derive(Debug, Default)]
struct Layer {
    /// Geodesic words of length `n`, concatenated.
    words: Vec<Gen>,
    keys: KeySet,
}

impl Layer {
    fn word(&self, i: usize, n: usize) -> &[Gen] {
        &self.words[i * n..(i + 1) * n]
    }
}

/// One element of a ball: canonical key, geodesic length and the
/// lexicographically least geodesic word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub key: ElementKey,
    pub length: usize,
    pub word: Vec<Gen>,
}

#[derive(Debug)]
pub struct GrowthTable {
    oracle: OracleSequence,
    stage: usize,
    requested_radius: usize,
    ball: Vec<u64>,
    layers: Vec<Layer>,
    /// First layer index still held in `layers`.
    first_layer: usize,
    complete: bool,
}

impl GrowthTable {
    pub fn oracle(&self) -> &OracleSequence {
        &self.oracle
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// Largest radius for which the ball is known exactly.
    pub fn radius(&self) -> usize {
        self.ball.len() - 1
    }

    pub fn requested_radius(&self) -> usize {
        self.requested_radius
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn ball(&self, n: usize) -> u64 {
        self.ball[n]
    }

    pub fn balls(&self) -> &[u64] {
        &self.ball
    }

    pub fn sphere(&self, n: usize) -> u64 {
        if n == 0 {
            self.ball[0]
        } else {
            self.ball[n] - self.ball[n - 1]
        }
    }

    pub fn spheres(&self) -> Vec<u64> {
        (0..self.ball.len()).map(|n| self.sphere(n)).collect()
    }

    pub fn has_elements(&self) -> bool {
        self.first_layer == 0 && self.layers.len() == self.ball.len()
    }

    /// Geodesic length of the element with this key, if it lies in the ball.
    pub fn length_of_key(&self, key: &ElementKey) -> Option<usize> {
        self.layers
            .iter()
            .enumerate()
            .find_map(|(i, l)| l.keys.find(&key.0).map(|_| self.first_layer + i))
    }

    /// Geodesic length of `word` read in the table's group.
    pub fn length_of(&self, ctx: &GroupContext, word: &[Gen]) -> Option<usize> {
        assert_eq!(
            ctx.stage(),
            self.stage,
            "context stage differs from the table's"
        );
        self.length_of_key(&crate::word::element_key(ctx, word))
    }

    /// Geodesic representative of the element with this key.
    pub fn word_of_key(&self, key: &ElementKey) -> Option<&[Gen]> {
        self.layers.iter().enumerate().find_map(|(i, l)| {
            l.keys
                .find(&key.0)
                .map(|j| l.word(j as usize, self.first_layer + i))
        })
    }

    /// All elements, in order of length then lexicographic word order.
    pub fn elements(&self) -> impl Iterator<Item = ElementRecord> + '_ {
        assert!(
            self.has_elements(),
            "table was built without keeping elements"
        );
        self.layers.iter().enumerate().flat_map(|(n, l)| {
            (0..l.keys.len()).map(move |i| ElementRecord {
                key: ElementKey(l.keys.get(i).into()),
                length: n,
                word: l.word(i, n).to_vec(),
            })
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ball,sphere\n");
        for n in 0..self.ball.len() {
            out.push_str(&format!("{n},{},{}\n", self.ball[n], self.sphere(n)));
        }
        out
    }

    pub fn to_json(&self, include_elements: bool) -> serde_json::Value {
        let mut doc = serde_json::json!({
            "schema": "growth/1",
            "oracle": self.oracle.to_string(),
            "stage": self.stage,
            "requested_radius": self.requested_radius,
            "radius": self.radius(),
            "complete": self.complete,
            "ball": self.ball,
            "sphere": self.spheres(),
        });
        if include_elements && self.has_elements() {
            let elements: Vec<_> = self
                .elements()
                .map(|e| serde_json::json!({"length": e.length, "word": word_string(&e.word), "key": e.key.to_hex()}))
                .collect();
            doc["elements"] = serde_json::Value::Array(elements);
        }
        doc
    }
}

/// Canonical letters at the context's stage, in alphabetical order.
fn letters(ctx: &GroupContext) -> Vec<Gen> {
    let mut v: Vec<Gen> = GENERATORS
        .iter()
        .filter_map(|&g| ctx.canonical_letter(g))
        .collect();
    v.dedup();
    v
}

pub fn enumerate_ball(ctx: &GroupContext, radius: usize) -> Result<GrowthTable> {
    enumerate_ball_with(ctx, radius, &BallOptions::default())
}

/// Layer-synchronous BFS over reduced words. Candidates of a layer are keyed
/// in parallel and merged in lexicographic order, so the result (including
/// the stored geodesic words) does not depend on the thread count.
pub fn enumerate_ball_with(
    ctx: &GroupContext,
    radius: usize,
    options: &BallOptions,
) -> Result<GrowthTable> {
    let started = Instant::now();
    let family: &crate::groups::GroupFamily = ctx.family();
    let stage = ctx.stage();
    let alphabet = letters(ctx);
    let mut root = Layer::default();
    root.keys.insert(&[0]);
    let mut table = GrowthTable {
        oracle: ctx.oracle().clone(),
        stage,
        requested_radius: radius,
        ball: vec![1],
        layers: vec![root],
        first_layer: 0,
        complete: true,
    };
    let mut total = 1usize;
    'layers: for n in 0..radius {
        let frontier = table.layers.last().unwrap();
        let count = frontier.keys.len();
        let mut next = Layer::default();
        let mut start = 0;
        while start < count {
            let end = (start + CHUNK).min(count);
            let candidates: Vec<(Vec<Gen>, Vec<u8>)> = (start..end)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let word = frontier.word(i, n);
                    let last = word.last().copied();
                    alphabet
                        .iter()
                        .filter(move |&&y| match last {
                            None => true,
                            Some(Gen::A) => y.is_spine(),
                            Some(_) => y == Gen::A,
                        })
                        .map(move |&y| {
                            let mut w = word.to_vec();
                            w.push(y);
                            let mut key = Vec::with_capacity(2 * w.len() + 1);
                            element_key_into(family, stage, &w, &mut key);
                            (w, key)
                        })
                })
                .collect();
            for (w, key) in candidates {
                let depth = table.layers.len();
                let seen = table.layers[depth.saturating_sub(2)..]
                    .iter()
                    .any(|l| l.keys.contains(&key));
                if !seen && next.keys.insert(&key) {
                    next.words.extend_from_slice(&w);
                    total += 1;
                    if total > options.max_elements {
                        table.complete = false;
                        break 'layers;
                    }
                }
            }
            if let Some(limit) = options.max_seconds {
                if started.elapsed().as_secs_f64() > limit {
                    table.complete = false;
                    break 'layers;
                }
            }
            start = end;
        }
        table.ball.push(total as u64);
        table.layers.push(next);
        if !options.keep_elements && table.layers.len() > 3 {
            table.layers.remove(0);
            table.first_layer += 1;
        }
    }
    if !table.complete && !options.allow_partial {
        return Err(Error::ResourceCap(format!(
            "ball enumeration stopped at radius {} of {radius} ({total} elements)",
            table.radius()
        )));
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallPrefixComparison {
    pub shared_prefix: usize,
    /// `2^{n-1}`, or 0 when nothing is asserted.
    pub target_radius: usize,
    /// Radius up to which both tables are exact.
    pub compared_radius: usize,
    pub first: Vec<u64>,
    pub second: Vec<u64>,
    pub asserted: bool,
    pub agree: bool,
    pub first_mismatch: Option<usize>,
}

/// Compares ball sizes of two groups whose oracles share a prefix of length
/// `n` up to radius `2^{n-1}`. A budget stop shortens the compared range.
pub fn ball_prefix_experiment(
    first: &OracleSequence,
    second: &OracleSequence,
    n: usize,
    options: &BallOptions,
) -> Result<BallPrefixComparison> {
    if first.take(n) != second.take(n) {
        return Err(Error::InvalidInput(format!(
            "{first} and {second} do not share a prefix of length {n}"
        )));
    }
    if n == 0 {
        return Ok(BallPrefixComparison {
            shared_prefix: 0,
            target_radius: 0,
            compared_radius: 0,
            first: vec![1],
            second: vec![1],
            asserted: false,
            agree: true,
            first_mismatch: None,
        });
    }
    if n > 40 {
        return Err(Error::ResourceCap(format!(
            "radius 2^{} is out of reach",
            n - 1
        )));
    }
    let target = 1usize << (n - 1);
    let opts = BallOptions {
        keep_elements: false,
        allow_partial: true,
        ..options.clone()
    };
    let t1 = enumerate_ball_with(&build_group(first, 0), target, &opts)?;
    let t2 = enumerate_ball_with(&build_group(second, 0), target, &opts)?;
    let compared = t1.radius().min(t2.radius());
    let first_mismatch = (0..=compared).find(|&r| t1.ball(r) != t2.ball(r));
    Ok(BallPrefixComparison {
        shared_prefix: n,
        target_radius: target,
        compared_radius: compared,
        first: t1.balls()[..=compared].to_vec(),
        second: t2.balls()[..=compared].to_vec(),
        asserted: true,
        agree: first_mismatch.is_none(),
        first_mismatch,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// Slope of `log log γ(n)` against `log n`.
    pub alpha: f64,
    pub intercept: f64,
    /// Root mean square residual of the fit.
    pub residual: f64,
    pub points: usize,
    /// Finite-radius fits do not certify asymptotic behaviour.
    pub diagnostic_only: bool,
}

/// Least-squares fit of `log log γ(n) ≈ α log n + β` over `n ≥ 3`.
pub fn growth_exponent_fit(table: &GrowthTable) -> Result<ExponentFit> {
    if table.radius() < 6 {
        return Err(Error::InvalidInput(format!(
            "fit needs radius ≥ 6, table has {}",
            table.radius()
        )));
    }
    let pts: Vec<(f64, f64)> = (3..=table.radius())
        .filter(|&n| table.ball(n) > 1)
        .map(|n| ((n as f64).ln(), (table.ball(n) as f64).ln().ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidInput(
            "growth table is constant; nothing to fit".into(),
        ));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - alpha * p.0 - intercept).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(ExponentFit {
        alpha,
        intercept,
        residual,
        points: pts.len(),
        diagnostic_only: true,
    })
}

/// Rows `n, γ(n), log γ(n), log log γ(n)` for external plotting.
pub fn plot_rows(table: &GrowthTable) -> String {
    let mut out = String::from("n,gamma,log_gamma,log_log_gamma\n");
    for (n, &g) in table.balls().iter().enumerate() {
        let lg = (g as f64).ln();
        let llg = if g > 1 {
            format!("{}", lg.ln())
        } else {
            String::new()
        };
        out.push_str(&format!("{n},{g},{lg},{llg}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_group;

    fn xi() -> GroupContext {
        build_group(&OracleSequence::xi(), 0)
    }

    #[test]
    fn small_balls() {
        let t = enumerate_ball(&xi(), 2).unwrap();
        assert_eq!(t.balls(), &[1, 5, 11]);
        assert_eq!(t.spheres(), vec![1, 4, 6]);
        assert_eq!(enumerate_ball(&xi(), 0).unwrap().balls(), &[1]);
        assert!(t.to_csv().starts_with("n,ball,sphere\n0,1,1\n1,5,4\n"));
    }

    #[test]
    fn dihedral_growth_is_linear() {
        let ctx = build_group(&OracleSequence::parse("(0)*").unwrap(), 0);
        let t = enumerate_ball(&ctx, 40).unwrap();
        for n in 0..=40 {
            assert_eq!(t.ball(n), 2 * n as u64 + 1);
        }
        let fit = growth_exponent_fit(&t).unwrap();
        assert!(fit.diagnostic_only && fit.alpha < 0.5);
    }

    #[test]
    fn budget_stops_with_partial_table() {
        let opts = BallOptions {
            max_elements: 100,
            allow_partial: true,
            ..Default::default()
        };
        let t = enumerate_ball_with(&xi(), 20, &opts).unwrap();
        assert!(!t.is_complete());
        assert!(t.ball(t.radius()) <= 100);
        let strict = BallOptions {
            max_elements: 100,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_ball_with(&xi(), 20, &strict),
            Err(Error::ResourceCap(_))
        ));
    }

    #[test]
    fn fit_preconditions() {
        let t = enumerate_ball(&xi(), 4).unwrap();
        assert!(growth_exponent_fit(&t).is_err());
        let t = enumerate_ball(&xi(), 10).unwrap();
        let fit = growth_exponent_fit(&t).unwrap();
        assert!(fit.alpha > 0.0);
    }

    #[test]
    fn prefix_experiment_cases() {
        let xi = OracleSequence::xi();
        let other = OracleSequence::parse("0(1)*").unwrap();
        let r = ball_prefix_experiment(&xi, &other, 1, &BallOptions::default()).unwrap();
        assert!(r.asserted && r.agree && r.target_radius == 1);
        let zeros = OracleSequence::parse("(0)*").unwrap();
        let r = ball_prefix_experiment(&xi, &zeros, 0, &BallOptions::default()).unwrap();
        assert!(!r.asserted);
        assert!(ball_prefix_experiment(&xi, &zeros, 2, &BallOptions::default()).is_err());
    }

    #[test]
    fn plot_rows_shape() {
        let t = enumerate_ball(&xi(), 8).unwrap();
        assert_eq!(plot_rows(&t).lines().count(), 10);
    }
}
