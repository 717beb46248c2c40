//! The family `𝒢_ω`: oracle sequences over `{0, 1, 2}`, their rows `U, V, W`
//! over `{I, P}`, and the generators `a, b_ω, c_ω, d_ω` at every shift stage.
//!
//! Column bijection: `0 ↔ (P, P, I)`, `1 ↔ (P, I, P)`, `2 ↔ (I, P, P)`. At
//! stage `i` the spine generators are
//!
//! ```text
//! b = (β(U_i), b'),  c = (β(V_i), c'),  d = (β(W_i), d')
//! ```
//!
//! with `β(P) = a`, `β(I) = 1` and primes denoting stage `i + 1`.

use crate::error::{Error, Result};
use crate::periodic::EventuallyPeriodic;
use crate::tree::{Automaton, AutomatonBuilder, Automorphism, Perm};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Gen {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

pub const GENERATORS: [Gen; 4] = [Gen::A, Gen::B, Gen::C, Gen::D];
pub const SPINE: [Gen; 3] = [Gen::B, Gen::C, Gen::D];

impl Gen {
    #[inline]
    pub fn from_index(i: u8) -> Gen {
        GENERATORS[i as usize]
    }

    pub fn to_char(self) -> char {
        (b'a' + self as u8) as char
    }

    /// Accepts `a..d`; upper case letters are the formal inverses, which equal
    /// the generators themselves.
    pub fn from_char(c: char) -> Option<Gen> {
        match c.to_ascii_lowercase() {
            'a' => Some(Gen::A),
            'b' => Some(Gen::B),
            'c' => Some(Gen::C),
            'd' => Some(Gen::D),
            _ => None,
        }
    }

    #[inline]
    pub fn is_spine(self) -> bool {
        self != Gen::A
    }

    /// Product of two distinct spine letters in the Klein four-group `{1, b, c, d}`.
    #[inline]
    pub fn klein_product(self, other: Gen) -> Gen {
        debug_assert!(self.is_spine() && other.is_spine() && self != other);
        Gen::from_index(6 - self as u8 - other as u8)
    }

    fn row(self) -> Row {
        match self {
            Gen::B => Row::U,
            Gen::C => Row::V,
            Gen::D => Row::W,
            Gen::A => panic!("a has no row"),
        }
    }
}

/// Parses a word over `a, b, c, d` (whitespace ignored, `1` or `e` alone is the
/// empty word).
pub fn parse_word(text: &str) -> Result<Vec<Gen>> {
    let trimmed = text.trim();
    if trimmed == "1" || trimmed == "e" {
        return Ok(Vec::new());
    }
    text.chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(position, c)| {
            Gen::from_char(c).ok_or(Error::UnknownLetter {
                letter: c,
                position,
            })
        })
        .collect()
}

pub fn word_string(word: &[Gen]) -> String {
    word.iter().map(|g| g.to_char()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Row {
    U,
    V,
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Col {
    I,
    P,
}

/// Eventually periodic oracle `ω = prefix · period^∞` over `{0, 1, 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OracleSequence(EventuallyPeriodic);

impl OracleSequence {
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("oracle period must be nonempty".into()));
        }
        if let Some(&s) = prefix.iter().chain(&period).find(|&&s| s > 2) {
            return Err(Error::InvalidInput(format!(
                "oracle symbol {s} outside {{0,1,2}}"
            )));
        }
        Ok(OracleSequence(EventuallyPeriodic::new(prefix, period)))
    }

    /// `(012)^∞`, the oracle of the first Grigorchuk group.
    pub fn xi() -> Self {
        OracleSequence::new(vec![], vec![0, 1, 2]).unwrap()
    }

    /// `(01)^∞`, the oracle of Erschler's group.
    pub fn eta() -> Self {
        OracleSequence::new(vec![], vec![0, 1]).unwrap()
    }

    pub fn parse(text: &str) -> Result<Self> {
        EventuallyPeriodic::parse_with(text, |c| c.to_digit(10).filter(|&d| d < 3).map(|d| d as u8))
            .map(OracleSequence)
            .map_err(|(position, message)| Error::Parse { position, message })
    }

    pub fn prefix(&self) -> &[u8] {
        self.0.prefix()
    }

    pub fn period(&self) -> &[u8] {
        self.0.period()
    }

    pub fn symbol_at(&self, i: usize) -> u8 {
        self.0.at(i)
    }

    pub fn shift(&self) -> Self {
        OracleSequence(self.0.shift())
    }

    pub fn take(&self, n: usize) -> Vec<u8> {
        self.0.take(n)
    }

    pub fn row(&self, row: Row, i: usize) -> Col {
        column(self.symbol_at(i), row)
    }

    /// Number of distinct shifts of the sequence.
    pub fn stage_count(&self) -> usize {
        self.0.distinct_tails()
    }

    /// Representative in `0..stage_count()` of the stage `i` (stages with the
    /// same tail define the same generators).
    pub fn canonical_stage(&self, i: usize) -> usize {
        let pre = self.prefix().len();
        if i < pre {
            i
        } else {
            pre + (i - pre) % self.period().len()
        }
    }
}

impl fmt::Display for OracleSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write_with(f, |s| (b'0' + s) as char)
    }
}

fn column(symbol: u8, row: Row) -> Col {
    let identity_row = match symbol {
        0 => Row::W,
        1 => Row::V,
        _ => Row::U,
    };
    if row == identity_row {
        Col::I
    } else {
        Col::P
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleClass {
    pub in_omega0: bool,
    pub in_omega1: bool,
    pub in_theta: bool,
    /// Least `C` such that every window of `C` consecutive symbols contains
    /// all of `0, 1, 2`; present iff `in_theta`.
    pub gap_constant: Option<usize>,
}

pub fn classify_oracle(oracle: &OracleSequence) -> OracleClass {
    let mut present = [false; 3];
    for &s in oracle.period() {
        present[s as usize] = true;
    }
    let distinct = present.iter().filter(|&&p| p).count();
    let in_omega0 = distinct == 3;
    let gap_constant = in_omega0.then(|| {
        // Windows starting past prefix + period repeat earlier ones.
        (0..oracle.stage_count())
            .map(|start| {
                let mut seen = [false; 3];
                let mut len = 0;
                while !seen.iter().all(|&x| x) {
                    seen[oracle.symbol_at(start + len) as usize] = true;
                    len += 1;
                }
                len
            })
            .max()
            .unwrap_or(0)
    });
    OracleClass {
        in_omega0,
        in_omega1: distinct >= 2,
        in_theta: gap_constant.is_some(),
        gap_constant,
    }
}

#[derive(Debug)]
struct StageData {
    next: usize,
    /// Canonical representative of each letter at this stage; `None` for
    /// letters acting trivially.
    canon: [Option<Gen>; 4],
    /// Section at vertex 0 of each letter: `a` or the identity.
    zero_section: [Option<Gen>; 4],
    degenerate: [bool; 4],
    states: [u32; 4],
}

/// Stage-independent data for one oracle. Shared by all contexts.
#[derive(Debug)]
pub struct GroupFamily {
    oracle: OracleSequence,
    stages: Vec<StageData>,
    automaton: Arc<Automaton>,
    memo: crate::word::IdentityMemo,
}

impl GroupFamily {
    fn new(oracle: OracleSequence) -> Self {
        let n = oracle.stage_count();
        let mut builder = AutomatonBuilder::new();
        builder.state("a", Perm::Swap, "1", "1");
        let mut stages = Vec::with_capacity(n);
        for s in 0..n {
            let next = oracle.canonical_stage(s + 1);
            let tail = oracle.0.drop_front(s);
            // A spine letter is degenerate when its row is I from here on,
            // i.e. the tail is constant at the symbol whose column has I there.
            let constant =
                (tail.period().len() == 1 && tail.prefix().is_empty()).then(|| tail.period()[0]);
            let mut degenerate = [false; 4];
            let mut zero_section = [None; 4];
            for g in SPINE {
                let col = oracle.row(g.row(), s);
                zero_section[g as usize] = (col == Col::P).then_some(Gen::A);
                degenerate[g as usize] = constant.is_some_and(|c| column(c, g.row()) == Col::I);
                builder.state(
                    &format!("{}_{s}", g.to_char()),
                    Perm::Id,
                    if col == Col::P { "a" } else { "1" },
                    &format!("{}_{next}", g.to_char()),
                );
            }
            let mut canon = [Some(Gen::A), Some(Gen::B), Some(Gen::C), Some(Gen::D)];
            if let Some(dead) = SPINE.into_iter().find(|&g| degenerate[g as usize]) {
                // x = 1 forces y·z = x = 1, so y = z: keep the smaller of the two.
                let others: Vec<Gen> = SPINE.into_iter().filter(|&g| g != dead).collect();
                canon[dead as usize] = None;
                canon[others[1] as usize] = Some(others[0]);
            }
            stages.push(StageData {
                next,
                canon,
                zero_section,
                degenerate,
                states: [0; 4],
            });
        }
        let automaton = builder.build().expect("family automaton is well formed");
        for (s, data) in stages.iter_mut().enumerate() {
            data.states[0] = automaton.state("a").unwrap();
            for g in SPINE {
                data.states[g as usize] = automaton.state(&format!("{}_{s}", g.to_char())).unwrap();
            }
        }
        GroupFamily {
            oracle,
            stages,
            automaton,
            memo: Default::default(),
        }
    }

    pub fn oracle(&self) -> &OracleSequence {
        &self.oracle
    }

    pub(crate) fn memo(&self) -> &crate::word::IdentityMemo {
        &self.memo
    }

    /// Number of memoized identity tests currently held.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn automaton(&self) -> &Arc<Automaton> {
        &self.automaton
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    #[inline]
    pub fn next_stage(&self, stage: usize) -> usize {
        self.stages[stage].next
    }

    #[inline]
    pub fn canonical_letter(&self, stage: usize, g: Gen) -> Option<Gen> {
        self.stages[stage].canon[g as usize]
    }

    #[inline]
    pub fn zero_section(&self, stage: usize, g: Gen) -> Option<Gen> {
        self.stages[stage].zero_section[g as usize]
    }

    #[inline]
    pub fn is_degenerate(&self, stage: usize, g: Gen) -> bool {
        self.stages[stage].degenerate[g as usize]
    }
}

/// The group `𝒢_{τ^i ω}` at shift stage `i`, with its canonical generators.
#[derive(Clone, Debug)]
pub struct GroupContext {
    family: Arc<GroupFamily>,
    stage: usize,
}

impl PartialEq for GroupContext {
    fn eq(&self, other: &Self) -> bool {
        self.stage == other.stage
            && (Arc::ptr_eq(&self.family, &other.family)
                || self.family.oracle == other.family.oracle)
    }
}

impl GroupContext {
    pub fn family(&self) -> &Arc<GroupFamily> {
        &self.family
    }

    pub fn oracle(&self) -> &OracleSequence {
        &self.family.oracle
    }

    /// Canonical stage index (stages with equal tails are identified).
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn at_stage(&self, stage: usize) -> GroupContext {
        GroupContext {
            family: self.family.clone(),
            stage: self.family.oracle.canonical_stage(stage),
        }
    }

    pub fn shifted(&self) -> GroupContext {
        GroupContext {
            family: self.family.clone(),
            stage: self.family.next_stage(self.stage),
        }
    }

    /// The oracle of this stage, `τ^i ω`.
    pub fn tail(&self) -> OracleSequence {
        OracleSequence(self.family.oracle.0.drop_front(self.stage))
    }

    pub fn is_degenerate(&self, g: Gen) -> bool {
        self.family.is_degenerate(self.stage, g)
    }

    pub fn canonical_letter(&self, g: Gen) -> Option<Gen> {
        self.family.canonical_letter(self.stage, g)
    }

    pub fn generator(&self, g: Gen) -> Automorphism {
        Automorphism::from_state(
            &self.family.automaton,
            self.family.stages[self.stage].states[g as usize],
        )
    }

    pub fn identity(&self) -> Automorphism {
        Automorphism::identity(&self.family.automaton)
    }

    pub fn word_to_automorphism(&self, word: &[Gen]) -> Automorphism {
        let states = word
            .iter()
            .map(|&g| self.family.stages[self.stage].states[g as usize])
            .collect();
        Automorphism::from_states(&self.family.automaton, states)
    }

    pub fn parse_to_automorphism(&self, text: &str) -> Result<Automorphism> {
        Ok(self.word_to_automorphism(&parse_word(text)?))
    }

    /// Relabeling `π` of spine letters with `x` at this stage equal to `π(x)`
    /// at `target`, when the two tails differ by a permutation of rows.
    pub fn relabeling_to(&self, target: &GroupContext) -> Option<[Gen; 4]> {
        let oracle = &self.family.oracle;
        let horizon = oracle.stage_count() + oracle.period().len();
        let perms = [
            [Gen::B, Gen::C, Gen::D],
            [Gen::B, Gen::D, Gen::C],
            [Gen::C, Gen::B, Gen::D],
            [Gen::C, Gen::D, Gen::B],
            [Gen::D, Gen::B, Gen::C],
            [Gen::D, Gen::C, Gen::B],
        ];
        perms.into_iter().find_map(|p| {
            let ok = (0..horizon).all(|j| {
                SPINE.iter().zip(p).all(|(&x, y)| {
                    oracle.row(x.row(), self.stage + j)
                        == target.oracle().row(y.row(), target.stage + j)
                })
            });
            ok.then_some([Gen::A, p[0], p[1], p[2]])
        })
    }

    fn verify_local_relations(&self, depth: usize) -> bool {
        let g = |x| self.generator(x);
        let involutions = GENERATORS
            .iter()
            .all(|&x| g(x).compose(&g(x)).is_trivial_to_depth(depth));
        let klein = [
            (Gen::B, Gen::C, Gen::D),
            (Gen::B, Gen::D, Gen::C),
            (Gen::C, Gen::D, Gen::B),
        ]
        .iter()
        .all(|&(x, y, z)| {
            g(x).compose(&g(y)).agrees_to_depth(&g(z), depth)
                && g(y).compose(&g(x)).agrees_to_depth(&g(z), depth)
        });
        involutions && klein
    }
}

/// Builds the context for `oracle` at shift stage `stage` and checks the
/// involution and Klein four-group relations to depth 10.
pub fn build_group(oracle: &OracleSequence, stage: usize) -> GroupContext {
    let family = Arc::new(GroupFamily::new(oracle.clone()));
    let ctx = GroupContext {
        stage: oracle.canonical_stage(stage),
        family,
    };
    assert!(
        ctx.verify_local_relations(10),
        "local relations fail for {oracle}"
    );
    ctx
}

/// Checks the involution and Klein relations to the given depth.
pub fn local_relations_hold(ctx: &GroupContext, depth: usize) -> bool {
    ctx.verify_local_relations(depth)
}
