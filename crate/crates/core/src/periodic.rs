//! Eventually periodic sequences `prefix · period^∞` over a small alphabet.
//!
//! Both boundary points of the tree and oracle sequences are values of this
//! shape. The canonical form has a primitive period and the shortest prefix,
//! so equality and hashing of the underlying infinite sequence reduce to
//! structural equality.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventuallyPeriodic {
    prefix: Vec<u8>,
    period: Vec<u8>,
}

impl EventuallyPeriodic {
    /// Builds the canonical representative. Panics on an empty period.
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Self {
        assert!(!period.is_empty(), "period must be nonempty");
        let mut prefix = prefix;
        let mut period = primitive_root(period);
        while let (Some(&p), Some(&q)) = (prefix.last(), period.last()) {
            if p != q {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        EventuallyPeriodic { prefix, period }
    }

    pub fn constant(symbol: u8) -> Self {
        EventuallyPeriodic {
            prefix: Vec::new(),
            period: vec![symbol],
        }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn at(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// First `n` symbols.
    pub fn take(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// Drops the first symbol.
    pub fn shift(&self) -> Self {
        self.drop_front(1)
    }

    pub fn drop_front(&self, k: usize) -> Self {
        if k <= self.prefix.len() {
            return EventuallyPeriodic::new(self.prefix[k..].to_vec(), self.period.clone());
        }
        let mut period = self.period.clone();
        let r = (k - self.prefix.len()) % period.len();
        period.rotate_left(r);
        EventuallyPeriodic::new(Vec::new(), period)
    }

    /// `letters · self`.
    pub fn prepend(&self, letters: &[u8]) -> Self {
        let mut prefix = letters.to_vec();
        prefix.extend_from_slice(&self.prefix);
        EventuallyPeriodic::new(prefix, self.period.clone())
    }

    /// Number of distinct suffixes `drop_front(k)`, i.e. `|prefix| + |period|`.
    pub fn distinct_tails(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// Parses `PREFIX(PERIOD)*` where symbols are single characters mapped by
    /// `symbol`; whitespace is ignored. Errors carry the character position.
    pub fn parse_with(
        text: &str,
        symbol: impl Fn(char) -> Option<u8>,
    ) -> std::result::Result<Self, (usize, String)> {
        let mut prefix = Vec::new();
        let mut period = Vec::new();
        // 0 = prefix, 1 = inside parens, 2 = after ')', 3 = after '*'
        let mut state = 0;
        for (pos, ch) in text.chars().enumerate() {
            if ch.is_whitespace() {
                continue;
            }
            match (state, ch) {
                (0, '(') => state = 1,
                (1, ')') => {
                    if period.is_empty() {
                        return Err((pos, "empty period".into()));
                    }
                    state = 2
                }
                (2, '*') => state = 3,
                (0, c) | (1, c) => match symbol(c) {
                    Some(s) if state == 0 => prefix.push(s),
                    Some(s) => period.push(s),
                    None => return Err((pos, format!("unexpected symbol {c:?}"))),
                },
                (2, c) => return Err((pos, format!("expected '*', found {c:?}"))),
                (_, c) => return Err((pos, format!("trailing input {c:?}"))),
            }
        }
        match state {
            3 => Ok(EventuallyPeriodic::new(prefix, period)),
            2 => Err((text.chars().count(), "missing '*' after period".into())),
            _ => Err((text.chars().count(), "missing '(PERIOD)*'".into())),
        }
    }

    pub fn write_with(
        &self,
        f: &mut fmt::Formatter<'_>,
        symbol: impl Fn(u8) -> char,
    ) -> fmt::Result {
        for &s in &self.prefix {
            write!(f, "{}", symbol(s))?;
        }
        write!(f, "(")?;
        for &s in &self.period {
            write!(f, "{}", symbol(s))?;
        }
        write!(f, ")*")
    }
}

fn primitive_root(period: Vec<u8>) -> Vec<u8> {
    let n = period.len();
    for p in 1..n {
        if n.is_multiple_of(p) && (p..n).all(|i| period[i] == period[i - p]) {
            return period[..p].to_vec();
        }
    }
    period
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn canonical_form_absorbs_prefix_and_powers() {
        let p = EventuallyPeriodic::new(digits("0101"), digits("0101"));
        assert!(p.prefix().is_empty());
        assert_eq!(p.period(), &digits("01")[..]);
        let q = EventuallyPeriodic::new(digits("1"), digits("01"));
        assert_eq!(q, EventuallyPeriodic::new(vec![], digits("10")));
    }

    #[test]
    fn shift_rotates_into_period() {
        let p = EventuallyPeriodic::new(vec![], digits("012"));
        assert_eq!(p.shift(), EventuallyPeriodic::new(vec![], digits("120")));
        assert_eq!(p.drop_front(3), p);
        assert_eq!(p.at(4), 1);
    }

    #[test]
    fn parse_reports_position() {
        let f = |c: char| c.to_digit(3).map(|d| d as u8);
        let p = EventuallyPeriodic::parse_with(" 01 (2)* ", f).unwrap();
        assert_eq!(p.prefix(), &[0, 1]);
        assert_eq!(p.period(), &[2]);
        assert_eq!(EventuallyPeriodic::parse_with("0(3)*", f).unwrap_err().0, 2);
        assert!(EventuallyPeriodic::parse_with("012", f).is_err());
        assert!(EventuallyPeriodic::parse_with("()*", f).is_err());
    }
}
