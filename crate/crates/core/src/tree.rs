//! Automorphisms of the binary rooted tree.
//!
//! An automorphism is stored as a product of states of a finite Mealy
//! automaton over the alphabet `{0, 1}`. Each state carries a root
//! permutation and one section per letter, so portraits are expanded lazily
//! and infinitely deep recursions (such as the spine of `b`) cost O(1) per
//! level.
//!
//! Composition convention: `g.compose(&h)` is `g · h` and means *apply `h`
//! first*. For a product word `s₁ s₂ … sₙ` the letter `sₙ` acts first. With
//! this convention the sections obey
//!
//! ```text
//! (g·h)|ₓ = g|_{h(x)} · h|ₓ        (g⁻¹)|ₓ = (g|_{g⁻¹(x)})⁻¹
//! ```

use crate::error::{Error, Result};
use crate::periodic::EventuallyPeriodic;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Permutation of the two-letter alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Perm {
    Id,
    Swap,
}

impl Perm {
    #[inline]
    pub fn apply(self, x: u8) -> u8 {
        match self {
            Perm::Id => x,
            Perm::Swap => x ^ 1,
        }
    }

    #[inline]
    pub fn then(self, other: Perm) -> Perm {
        if self == other {
            Perm::Id
        } else {
            Perm::Swap
        }
    }
}

/// A vertex of the tree: a finite word over `{0, 1}`. The empty word is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex(pub Vec<u8>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// Vertex number `index` of level `level`, most significant letter first.
    pub fn from_index(index: usize, level: usize) -> Self {
        Vertex(
            (0..level)
                .map(|i| ((index >> (level - 1 - i)) & 1) as u8)
                .collect(),
        )
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &x| (acc << 1) | x as usize)
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse {
                    position,
                    message: format!("expected 0 or 1, found {c:?}"),
                }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Vertex)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for &x in &self.0 {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// A point of the boundary: an eventually periodic infinite word over `{0, 1}`,
/// kept in canonical form (primitive period, shortest prefix).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryPoint(EventuallyPeriodic);

impl BoundaryPoint {
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Self {
        assert!(
            prefix.iter().chain(&period).all(|&x| x < 2),
            "boundary letters are 0 or 1"
        );
        BoundaryPoint(EventuallyPeriodic::new(prefix, period))
    }

    pub fn constant(x: u8) -> Self {
        BoundaryPoint::new(Vec::new(), vec![x])
    }

    pub fn prefix(&self) -> &[u8] {
        self.0.prefix()
    }

    pub fn period(&self) -> &[u8] {
        self.0.period()
    }

    pub fn at(&self, i: usize) -> u8 {
        self.0.at(i)
    }

    pub fn truncate(&self, level: usize) -> Vertex {
        Vertex(self.0.take(level))
    }

    /// True when the point differs from `1^∞` in finitely many letters.
    pub fn is_cofinal_with_ones(&self) -> bool {
        self.period() == [1]
    }

    pub fn parse(text: &str) -> Result<Self> {
        EventuallyPeriodic::parse_with(text, |c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .map(BoundaryPoint)
        .map_err(|(position, message)| Error::Parse { position, message })
    }

    fn inner(&self) -> &EventuallyPeriodic {
        &self.0
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write_with(f, |x| (b'0' + x) as char)
    }
}

pub type StateId = u32;

#[derive(Clone, Debug)]
struct State {
    name: String,
    perm: Perm,
    sections: [StateId; 2],
}

/// Mealy automaton over `{0, 1}`, closed under inverses, with its states
/// partitioned into bisimulation classes (states in one class define the same
/// automorphism).
#[derive(Debug)]
pub struct Automaton {
    states: Vec<State>,
    inverse: Vec<StateId>,
    class: Vec<u32>,
    identity: StateId,
    by_name: HashMap<String, StateId>,
}

/// Declares states by name; sections may refer to states declared later.
/// The name `"1"` is reserved for the identity state.
#[derive(Default)]
pub struct AutomatonBuilder {
    decls: Vec<(String, Perm, [String; 2])>,
}

impl AutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: &str, perm: Perm, section0: &str, section1: &str) -> &mut Self {
        self.decls.push((
            name.to_string(),
            perm,
            [section0.to_string(), section1.to_string()],
        ));
        self
    }

    pub fn build(&self) -> Result<Arc<Automaton>> {
        let mut by_name = HashMap::new();
        let mut states = vec![State {
            name: "1".into(),
            perm: Perm::Id,
            sections: [0, 0],
        }];
        by_name.insert("1".to_string(), 0);
        for (name, perm, _) in &self.decls {
            if by_name.contains_key(name) {
                return Err(Error::InvalidInput(format!("duplicate state {name}")));
            }
            by_name.insert(name.clone(), states.len() as StateId);
            states.push(State {
                name: name.clone(),
                perm: *perm,
                sections: [0, 0],
            });
        }
        for (i, (_, _, secs)) in self.decls.iter().enumerate() {
            for x in 0..2 {
                let id = *by_name
                    .get(&secs[x])
                    .ok_or_else(|| Error::InvalidInput(format!("undeclared state {}", secs[x])))?;
                states[i + 1].sections[x] = id;
            }
        }
        Ok(Arc::new(Automaton::close(states, by_name)))
    }
}

impl Automaton {
    fn close(mut states: Vec<State>, by_name: HashMap<String, StateId>) -> Automaton {
        // Formal inverse s' of every state s: same root permutation,
        // s'|ₓ = (s|_{perm(x)})'.
        let n = states.len();
        let mut inverse: Vec<StateId> = (0..n)
            .map(|i| if i == 0 { 0 } else { (n + i - 1) as StateId })
            .collect();
        for i in 1..n {
            let s = states[i].clone();
            let sections = [0u8, 1].map(|x| inverse[s.sections[s.perm.apply(x) as usize] as usize]);
            states.push(State {
                name: format!("{}^-1", s.name),
                perm: s.perm,
                sections,
            });
        }
        inverse.extend((1..n).map(|i| i as StateId));
        let class = bisimulation_classes(&states);
        // Prefer an original state as the inverse when one is equivalent.
        for i in 0..n {
            let inv = inverse[i] as usize;
            if let Some(j) = (0..n).find(|&j| class[j] == class[inv]) {
                inverse[i] = j as StateId;
            }
        }
        Automaton {
            states,
            inverse,
            class,
            identity: 0,
            by_name,
        }
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.states[s as usize].name
    }

    pub fn perm(&self, s: StateId) -> Perm {
        self.states[s as usize].perm
    }

    pub fn section(&self, s: StateId, x: u8) -> StateId {
        self.states[s as usize].sections[x as usize]
    }

    pub fn inverse(&self, s: StateId) -> StateId {
        self.inverse[s as usize]
    }

    pub fn identity(&self) -> StateId {
        self.identity
    }

    pub fn is_trivial(&self, s: StateId) -> bool {
        self.class[s as usize] == self.class[self.identity as usize]
    }

    /// Exact equality of the automorphisms defined by two states.
    pub fn equivalent(&self, s: StateId, t: StateId) -> bool {
        self.class[s as usize] == self.class[t as usize]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Image of a single letter stream under state `s`.
    fn apply_state(&self, mut s: StateId, word: &mut [u8]) {
        for x in word.iter_mut() {
            if self.is_trivial(s) {
                break;
            }
            let st = &self.states[s as usize];
            let y = *x;
            *x = st.perm.apply(y);
            s = st.sections[y as usize];
        }
    }

    fn apply_state_boundary(
        &self,
        mut s: StateId,
        p: &EventuallyPeriodic,
        cap: usize,
    ) -> Result<EventuallyPeriodic> {
        let pre = p.prefix().len();
        let per = p.period().len();
        let mut out = Vec::new();
        let mut seen: HashMap<(StateId, usize), usize> = HashMap::new();
        let mut i = 0;
        loop {
            if self.is_trivial(s) {
                return Ok(p.drop_front(i).prepend(&out));
            }
            if i >= pre {
                let key = (s, (i - pre) % per);
                if let Some(&j) = seen.get(&key) {
                    return Ok(EventuallyPeriodic::new(
                        out[..j].to_vec(),
                        out[j..].to_vec(),
                    ));
                }
                seen.insert(key, i);
            }
            if i >= cap {
                return Err(Error::CapExceeded { cap });
            }
            let x = p.at(i);
            out.push(self.perm(s).apply(x));
            s = self.section(s, x);
            i += 1;
        }
    }
}

/// Moore-style partition refinement: states are equivalent iff they have the
/// same root permutation at every vertex.
fn bisimulation_classes(states: &[State]) -> Vec<u32> {
    let mut class: Vec<u32> = states
        .iter()
        .map(|s| (s.perm == Perm::Swap) as u32)
        .collect();
    let mut count = 0;
    loop {
        let mut ids: HashMap<(u32, u32, u32), u32> = HashMap::new();
        let next: Vec<u32> = states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let sig = (
                    class[i],
                    class[s.sections[0] as usize],
                    class[s.sections[1] as usize],
                );
                let n = ids.len() as u32;
                *ids.entry(sig).or_insert(n)
            })
            .collect();
        if ids.len() == count {
            return next;
        }
        count = ids.len();
        class = next;
    }
}

/// Product `s₁ · s₂ · … · sₙ` of automaton states (`sₙ` acts first).
#[derive(Clone)]
pub struct Automorphism {
    automaton: Arc<Automaton>,
    states: Vec<StateId>,
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.states.is_empty() {
            return write!(f, "1");
        }
        let names: Vec<&str> = self
            .states
            .iter()
            .map(|&s| self.automaton.name(s))
            .collect();
        write!(f, "{}", names.join("·"))
    }
}

impl PartialEq for Automorphism {
    /// Structural equality of the (identity-free) state products. Use
    /// [`Automorphism::agrees_to_depth`] to compare actions.
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.automaton, &other.automaton) && self.states == other.states
    }
}

impl Automorphism {
    pub fn identity(automaton: &Arc<Automaton>) -> Self {
        Automorphism {
            automaton: automaton.clone(),
            states: Vec::new(),
        }
    }

    pub fn from_state(automaton: &Arc<Automaton>, s: StateId) -> Self {
        Self::from_states(automaton, vec![s])
    }

    pub fn from_states(automaton: &Arc<Automaton>, states: Vec<StateId>) -> Self {
        let states = states
            .into_iter()
            .filter(|&s| !automaton.is_trivial(s))
            .collect();
        Automorphism {
            automaton: automaton.clone(),
            states,
        }
    }

    pub fn named(automaton: &Arc<Automaton>, name: &str) -> Option<Self> {
        automaton
            .state(name)
            .map(|s| Self::from_state(automaton, s))
    }

    pub fn automaton(&self) -> &Arc<Automaton> {
        &self.automaton
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    /// True when the product is empty after dropping trivial states. A
    /// nonempty product may still act trivially.
    pub fn is_syntactically_identity(&self) -> bool {
        self.states.is_empty()
    }

    pub fn root_perm(&self) -> Perm {
        self.states
            .iter()
            .fold(Perm::Id, |p, &s| p.then(self.automaton.perm(s)))
    }

    pub fn apply_letter(&self, x: u8) -> u8 {
        self.root_perm().apply(x)
    }

    pub fn apply(&self, v: &Vertex) -> Vertex {
        let mut word = v.0.clone();
        for &s in self.states.iter().rev() {
            self.automaton.apply_state(s, &mut word);
        }
        Vertex(word)
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        assert!(
            Arc::ptr_eq(&self.automaton, &other.automaton),
            "automorphisms over different automata"
        );
        let mut states = self.states.clone();
        states.extend_from_slice(&other.states);
        Automorphism {
            automaton: self.automaton.clone(),
            states,
        }
    }

    pub fn invert(&self) -> Automorphism {
        let states = self
            .states
            .iter()
            .rev()
            .map(|&s| self.automaton.inverse(s))
            .collect();
        Automorphism {
            automaton: self.automaton.clone(),
            states,
        }
    }

    /// Section at a first-level vertex.
    pub fn section_at(&self, x: u8) -> Automorphism {
        let mut cur = x;
        let mut out = Vec::with_capacity(self.states.len());
        for &s in self.states.iter().rev() {
            let t = self.automaton.section(s, cur);
            if !self.automaton.is_trivial(t) {
                out.push(t);
            }
            cur = self.automaton.perm(s).apply(cur);
        }
        out.reverse();
        Automorphism {
            automaton: self.automaton.clone(),
            states: out,
        }
    }

    pub fn section(&self, v: &Vertex) -> Automorphism {
        v.0.iter().fold(self.clone(), |g, &x| g.section_at(x))
    }

    pub fn apply_boundary(&self, p: &BoundaryPoint, expansion_cap: usize) -> Result<BoundaryPoint> {
        if expansion_cap == 0 {
            return Err(Error::InvalidInput(
                "expansion cap must be at least 1".into(),
            ));
        }
        let mut cur = p.inner().clone();
        for &s in self.states.iter().rev() {
            cur = self
                .automaton
                .apply_state_boundary(s, &cur, expansion_cap)?;
        }
        Ok(BoundaryPoint(cur))
    }

    /// Root permutations of all sections at vertices of level `< depth`,
    /// listed level by level with vertices in lexicographic order.
    pub fn portrait(&self, depth: usize) -> Vec<Perm> {
        let mut out = Vec::with_capacity((1 << depth) - 1);
        let mut level = vec![self.clone()];
        for _ in 0..depth {
            out.extend(level.iter().map(Automorphism::root_perm));
            level = level
                .iter()
                .flat_map(|g| [g.section_at(0), g.section_at(1)])
                .collect();
        }
        out
    }

    /// Compares the action on every vertex of level `depth`.
    pub fn agrees_to_depth(&self, other: &Automorphism, depth: usize) -> bool {
        self.portrait(depth) == other.portrait(depth)
    }

    /// Acts trivially on every vertex of level `depth`.
    pub fn is_trivial_to_depth(&self, depth: usize) -> bool {
        self.portrait(depth).iter().all(|&p| p == Perm::Id)
    }
}

/// Exact comparison of two single-state automorphisms from possibly different
/// automata, by simultaneous exploration of state pairs.
pub fn bisimilar(g: (&Automaton, StateId), h: (&Automaton, StateId)) -> bool {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(g.1, h.1)];
    while let Some((s, t)) = stack.pop() {
        if !seen.insert((s, t)) {
            continue;
        }
        if g.0.perm(s) != h.0.perm(t) {
            return false;
        }
        for x in 0..2 {
            stack.push((g.0.section(s, x), h.0.section(t, x)));
        }
    }
    true
}

/// The explicit recursion `a = σ, b = (a, c), c = (a, d), d = (1, b)`.
pub fn first_grigorchuk_automaton() -> Arc<Automaton> {
    AutomatonBuilder::new()
        .state("a", Perm::Swap, "1", "1")
        .state("b", Perm::Id, "a", "c")
        .state("c", Perm::Id, "a", "d")
        .state("d", Perm::Id, "1", "b")
        .build()
        .expect("static automaton")
}
