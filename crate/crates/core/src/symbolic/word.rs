//! Finite words and per-coordinate symbol sets.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Alphabet symbols are small unsigned integers `0..alphabet_size`.
pub type Symbol = u8;

/// Largest alphabet the toolkit supports. Symbol sets are fixed-width
/// bitmasks, so this is a hard cap rather than a tunable.
pub const MAX_ALPHABET: usize = 256;

/// A finite block of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// True when every symbol is a valid letter of an `m`-symbol alphabet.
    pub fn fits_alphabet(&self, m: usize) -> bool {
        self.0.iter().all(|&s| (s as usize) < m)
    }

    /// Suffix of length `n` (the whole word when shorter).
    pub fn suffix(&self, n: usize) -> Word {
        let start = self.0.len().saturating_sub(n);
        Word(self.0[start..].to_vec())
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Compact digit form for small alphabets, dotted form otherwise.
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl From<&[Symbol]> for Word {
    fn from(s: &[Symbol]) -> Self {
        Word(s.to_vec())
    }
}

impl<const N: usize> From<[Symbol; N]> for Word {
    fn from(s: [Symbol; N]) -> Self {
        Word(s.to_vec())
    }
}

/// A subset of the alphabet, as a 256-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolSet {
    bits: [u64; 4],
}

impl SymbolSet {
    pub fn empty() -> Self {
        SymbolSet { bits: [0; 4] }
    }

    /// The full alphabet `{0, .., m-1}`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_ALPHABET, "alphabet size {m} exceeds {MAX_ALPHABET}");
        let mut set = SymbolSet::empty();
        for s in 0..m {
            set.insert(s as Symbol);
        }
        set
    }

    pub fn singleton(s: Symbol) -> Self {
        let mut set = SymbolSet::empty();
        set.insert(s);
        set
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        let mut set = SymbolSet::empty();
        for s in iter {
            set.insert(s);
        }
        set
    }

    pub fn insert(&mut self, s: Symbol) {
        self.bits[(s >> 6) as usize] |= 1u64 << (s & 63);
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.bits[(s >> 6) as usize] & (1u64 << (s & 63)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn is_subset_of(&self, other: &SymbolSet) -> bool {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersect(&self, other: &SymbolSet) -> SymbolSet {
        let mut bits = [0u64; 4];
        for i in 0..4 {
            bits[i] = self.bits[i] & other.bits[i];
        }
        SymbolSet { bits }
    }

    pub fn union(&self, other: &SymbolSet) -> SymbolSet {
        let mut bits = [0u64; 4];
        for i in 0..4 {
            bits[i] = self.bits[i] | other.bits[i];
        }
        SymbolSet { bits }
    }

    /// Symbols in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..MAX_ALPHABET as u32).filter_map(move |s| {
            let s = s as Symbol;
            if self.contains(s) {
                Some(s)
            } else {
                None
            }
        })
    }

    pub fn min_symbol(&self) -> Option<Symbol> {
        self.iter().next()
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for s in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolset_basics() {
        let full = SymbolSet::full(4);
        assert_eq!(full.len(), 4);
        assert!(full.contains(3));
        assert!(!full.contains(4));

        let single = SymbolSet::singleton(2);
        assert!(single.is_subset_of(&full));
        assert!(!full.is_subset_of(&single));
        assert_eq!(single.intersect(&full), single);
        assert_eq!(single.min_symbol(), Some(2));
    }

    #[test]
    fn symbolset_high_symbols() {
        let set = SymbolSet::from_symbols([0u8, 127, 255]);
        assert_eq!(set.len(), 3);
        assert!(set.contains(127));
        assert!(set.contains(255));
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![0, 127, 255]);
    }

    #[test]
    fn word_display() {
        assert_eq!(Word::from([0, 1, 0, 1]).to_string(), "0101");
        assert_eq!(Word::from([12, 3]).to_string(), "12.3");
        assert_eq!(Word::from([0, 1, 1]).suffix(2), Word::from([1, 1]));
    }
}
