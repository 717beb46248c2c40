//! Empirical sweeps of the contracting inequality `|g_x| ≤ λ|g| + C` and the
//! anti-contracting inequality `|g| ≤ μ Σ_{v ∈ V_k} |g_v| + C` over a ball.

use super::{enumerate_ball, GrowthTable};
use crate::error::{Error, Result};
use crate::groups::{word_string, Gen, GroupContext};
use crate::word::{element_key, sections};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub word: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub anti: bool,
    pub level: usize,
    /// λ for the contracting check, μ for the anti-contracting one.
    pub ratio: f64,
    pub constant: f64,
    pub checked: usize,
    pub violations: usize,
    /// Element with the largest `lhs − rhs`.
    pub worst: Option<Witness>,
}

impl ContractionReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, word: &[Gen], lhs: f64, rhs: f64) {
        self.checked += 1;
        if lhs > rhs {
            self.violations += 1;
        }
        let worse = self
            .worst
            .as_ref()
            .is_none_or(|w| lhs - rhs > w.lhs - w.rhs);
        if worse {
            self.worst = Some(Witness {
                word: word_string(word),
                lhs,
                rhs,
            });
        }
    }
}

/// Sections of `word` at every vertex of level `k`, as reduced words over
/// stage `ctx.stage() + k`.
pub(crate) fn level_sections(ctx: &GroupContext, word: &[Gen], k: usize) -> Vec<Vec<Gen>> {
    let mut level = vec![crate::word::reduce(ctx, word).into_vec()];
    let mut c = ctx.clone();
    for _ in 0..k {
        level = level
            .iter()
            .flat_map(|w| sections(&c, w).map(|s| s.into_vec()))
            .collect();
        c = c.shifted();
    }
    level
}

fn companion(ctx: &GroupContext, needed: usize) -> Result<GrowthTable> {
    enumerate_ball(ctx, needed).map_err(|_| Error::NeedsLargerTable { radius: 0, needed })
}

fn section_length(companion: &GrowthTable, ctx: &GroupContext, w: &[Gen]) -> Result<usize> {
    companion
        .length_of_key(&element_key(ctx, w))
        .ok_or(Error::NeedsLargerTable {
            radius: companion.radius(),
            needed: w.len(),
        })
}

pub fn check_contracting(
    ctx: &GroupContext,
    table: &GrowthTable,
    lambda: f64,
    c: f64,
) -> Result<ContractionReport> {
    let next = ctx.shifted();
    let needed = max_section_len(ctx, table, 1);
    let companion = companion(&next, needed)?;
    check_contracting_against(ctx, table, &companion, lambda, c)
}

/// Same as [`check_contracting`] with an explicit companion table for the
/// next stage.
pub fn check_contracting_against(
    ctx: &GroupContext,
    table: &GrowthTable,
    companion: &GrowthTable,
    lambda: f64,
    c: f64,
) -> Result<ContractionReport> {
    let next = ctx.shifted();
    let mut report = ContractionReport {
        anti: false,
        level: 1,
        ratio: lambda,
        constant: c,
        checked: 0,
        violations: 0,
        worst: None,
    };
    for e in table.elements() {
        let rhs = lambda * e.length as f64 + c;
        for s in level_sections(ctx, &e.word, 1) {
            let lhs = section_length(companion, &next, &s)? as f64;
            report.record(&e.word, lhs, rhs);
        }
    }
    Ok(report)
}

pub fn check_anti_contracting(
    ctx: &GroupContext,
    table: &GrowthTable,
    k: usize,
    mu: f64,
    c: f64,
) -> Result<ContractionReport> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "anti-contracting level must be at least 1".into(),
        ));
    }
    let deep = ctx.at_stage(ctx.stage() + k);
    let needed = max_section_len(ctx, table, k);
    let companion = companion(&deep, needed)?;
    let mut report = ContractionReport {
        anti: true,
        level: k,
        ratio: mu,
        constant: c,
        checked: 0,
        violations: 0,
        worst: None,
    };
    for e in table.elements() {
        let mut total = 0usize;
        for s in level_sections(ctx, &e.word, k) {
            total += section_length(&companion, &deep, &s)?;
        }
        report.record(&e.word, e.length as f64, mu * total as f64 + c);
    }
    Ok(report)
}

fn max_section_len(ctx: &GroupContext, table: &GrowthTable, k: usize) -> usize {
    table
        .elements()
        .flat_map(|e| level_sections(ctx, &e.word, k))
        .map(|s| s.len())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_group, OracleSequence};

    #[test]
    fn contraction_on_small_ball() {
        let ctx = build_group(&OracleSequence::xi(), 0);
        let table = enumerate_ball(&ctx, 6).unwrap();
        let r = check_contracting(&ctx, &table, 0.5, 1.0).unwrap();
        assert!(r.holds());
        assert_eq!(r.checked, 2 * table.ball(6) as usize);
        let r = check_contracting(&ctx, &table, 0.0, 0.0).unwrap();
        assert!(!r.holds());
        assert!(r.worst.unwrap().lhs > 0.0);
    }

    #[test]
    fn anti_contraction_on_small_ball() {
        let ctx = build_group(&OracleSequence::xi(), 0);
        let table = enumerate_ball(&ctx, 6).unwrap();
        assert!(check_anti_contracting(&ctx, &table, 1, 2.0, 1.0)
            .unwrap()
            .holds());
        let r = check_anti_contracting(&ctx, &table, 1, 0.0, 0.0).unwrap();
        assert!(!r.holds());
        assert!(check_anti_contracting(&ctx, &table, 0, 2.0, 1.0).is_err());
    }

    #[test]
    fn identity_is_trivially_fine() {
        let ctx = build_group(&OracleSequence::xi(), 0);
        let table = enumerate_ball(&ctx, 0).unwrap();
        let r = check_contracting(&ctx, &table, 0.5, 1.0).unwrap();
        assert!(r.holds() && r.checked == 2);
        assert!(check_anti_contracting(&ctx, &table, 1, 2.0, 1.0)
            .unwrap()
            .holds());
    }

    #[test]
    fn small_companion_is_reported() {
        let ctx = build_group(&OracleSequence::xi(), 0);
        let table = enumerate_ball(&ctx, 6).unwrap();
        let tiny = enumerate_ball(&ctx.shifted(), 1).unwrap();
        assert!(matches!(
            check_contracting_against(&ctx, &table, &tiny, 0.5, 1.0),
            Err(Error::NeedsLargerTable { radius: 1, .. })
        ));
    }
}
