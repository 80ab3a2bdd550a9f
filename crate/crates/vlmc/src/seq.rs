//! Binary symbols and short packed sequences.
//!
//! Sequences follow one fixed orientation everywhere: the rightmost symbol
//! is the most recent one. For a past `w` written as a string, the last
//! character is the symbol observed last. The largest suffix `suf(w)` drops
//! the leftmost (oldest) symbol.

use std::fmt;

use crate::error::Error;

/// One symbol of the binary alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u8);

/// Alphabet size; the flip channel `a ⊕ b` is specific to two symbols.
pub const ALPHABET: usize = 2;

impl Symbol {
    pub const ZERO: Symbol = Symbol(0);
    pub const ONE: Symbol = Symbol(1);

    /// Both symbols, in order.
    pub const ALL: [Symbol; ALPHABET] = [Symbol::ZERO, Symbol::ONE];

    pub fn new(value: u8) -> Result<Symbol, Error> {
        match value {
            0 | 1 => Ok(Symbol(value)),
            other => Err(Error::BadSymbol(other as char)),
        }
    }

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The other symbol: `a ⊕ 1`.
    #[inline]
    pub fn complement(self) -> Symbol {
        Symbol(self.0 ^ 1)
    }

    /// Addition mod 2; the flip channel applies `x ⊕ ξ`.
    #[inline]
    pub fn xor(self, other: Symbol) -> Symbol {
        Symbol(self.0 ^ other.0)
    }

    pub fn from_char(c: char) -> Result<Symbol, Error> {
        match c {
            '0' => Ok(Symbol::ZERO),
            '1' => Ok(Symbol::ONE),
            other => Err(Error::BadSymbol(other)),
        }
    }

    pub fn to_char(self) -> char {
        if self.0 == 0 {
            '0'
        } else {
            '1'
        }
    }
}

/// Longest sequence representable by [`Seq`].
pub const MAX_SEQ_LEN: usize = 63;

/// A short binary sequence, packed into a word.
///
/// Bit 0 holds the most recent (rightmost) symbol, bit `len-1` the oldest.
/// This makes suffix tests cheap: `s` is a suffix of `w` exactly when the
/// low `s.len()` bits of `w` equal `s`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seq {
    len: u8,
    bits: u64,
}

impl Seq {
    /// The empty sequence λ.
    pub const EMPTY: Seq = Seq { len: 0, bits: 0 };

    /// Builds a sequence from its packed form; low bit = most recent symbol.
    pub fn from_bits(len: usize, bits: u64) -> Seq {
        assert!(len <= MAX_SEQ_LEN, "sequence too long: {len}");
        debug_assert!(len == 64 || bits < (1u64 << len));
        Seq {
            len: len as u8,
            bits,
        }
    }

    pub fn from_symbols(symbols: &[Symbol]) -> Seq {
        assert!(symbols.len() <= MAX_SEQ_LEN);
        let mut bits = 0u64;
        for s in symbols {
            bits = (bits << 1) | s.value() as u64;
        }
        Seq {
            len: symbols.len() as u8,
            bits,
        }
    }

    /// Parses a string of `0`/`1` characters (oldest first); `.` denotes λ.
    pub fn parse(text: &str) -> Result<Seq, Error> {
        if text == "." {
            return Ok(Seq::EMPTY);
        }
        if text.len() > MAX_SEQ_LEN {
            return Err(Error::SequenceTooLong {
                len: text.len(),
                cap: MAX_SEQ_LEN,
            });
        }
        let mut bits = 0u64;
        for c in text.chars() {
            bits = (bits << 1) | Symbol::from_char(c)?.value() as u64;
        }
        Ok(Seq {
            len: text.len() as u8,
            bits,
        })
    }

    #[inline]
    pub fn len(self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Symbol at distance `back` from the most recent end (0 = most recent).
    #[inline]
    pub fn symbol_back(self, back: usize) -> Symbol {
        debug_assert!(back < self.len());
        Symbol(((self.bits >> back) & 1) as u8)
    }

    /// The most recent symbol.
    #[inline]
    pub fn last(self) -> Option<Symbol> {
        if self.len == 0 {
            None
        } else {
            Some(Symbol((self.bits & 1) as u8))
        }
    }

    /// `suf(w)`: drops the oldest symbol. The suffix of a length-1 sequence is λ.
    #[inline]
    pub fn suffix(self) -> Seq {
        match self.len {
            0 => Seq::EMPTY,
            n => Seq {
                len: n - 1,
                bits: self.bits & mask(n as usize - 1),
            },
        }
    }

    /// Appends a new most recent symbol on the right.
    #[inline]
    pub fn push_recent(self, a: Symbol) -> Seq {
        assert!(self.len() < MAX_SEQ_LEN);
        Seq {
            len: self.len + 1,
            bits: (self.bits << 1) | a.value() as u64,
        }
    }

    /// Prepends an older symbol on the left, producing `a·w`.
    #[inline]
    pub fn push_oldest(self, a: Symbol) -> Seq {
        assert!(self.len() < MAX_SEQ_LEN);
        Seq {
            len: self.len + 1,
            bits: self.bits | (a.value() as u64) << self.len,
        }
    }

    /// The `k` most recent symbols.
    #[inline]
    pub fn last_k(self, k: usize) -> Seq {
        debug_assert!(k <= self.len());
        Seq {
            len: k as u8,
            bits: self.bits & mask(k),
        }
    }

    /// True when `self` is a suffix of `other` (equality included).
    #[inline]
    pub fn is_suffix_of(self, other: Seq) -> bool {
        self.len <= other.len && (other.bits & mask(self.len())) == self.bits
    }

    /// True when `self` is a proper suffix of `other` (`self ≺ other`).
    #[inline]
    pub fn is_proper_suffix_of(self, other: Seq) -> bool {
        self.len < other.len && self.is_suffix_of(other)
    }

    /// Flips every symbol.
    pub fn complemented(self) -> Seq {
        Seq {
            len: self.len,
            bits: !self.bits & mask(self.len()),
        }
    }

    /// Symbols oldest first.
    pub fn symbols(self) -> impl Iterator<Item = Symbol> {
        let len = self.len();
        let bits = self.bits;
        (0..len).map(move |i| Symbol(((bits >> (len - 1 - i)) & 1) as u8))
    }

    /// All sequences of the given length, ordered by packed bits.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = Seq> {
        assert!(len <= MAX_SEQ_LEN);
        (0..(1u64 << len)).map(move |bits| Seq {
            len: len as u8,
            bits,
        })
    }
}

#[inline]
pub(crate) fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, ".");
        }
        for s in self.symbols() {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seq({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_involution() {
        for s in Symbol::ALL {
            assert_eq!(s.complement().complement(), s);
        }
        assert_ne!(Symbol::ZERO, Symbol::ONE);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["0", "1", "10", "00", "0110", "."] {
            let s = Seq::parse(text).unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!(Seq::parse("012").is_err());
    }

    #[test]
    fn suffix_drops_oldest() {
        let w = Seq::parse("10").unwrap();
        assert_eq!(w.suffix(), Seq::parse("0").unwrap());
        assert_eq!(w.suffix().suffix(), Seq::EMPTY);
        assert_eq!(Seq::EMPTY.suffix(), Seq::EMPTY);
    }

    #[test]
    fn suffix_relation_uses_recent_end() {
        let one = Seq::parse("1").unwrap();
        let eleven = Seq::parse("11").unwrap();
        let ten = Seq::parse("10").unwrap();
        assert!(one.is_proper_suffix_of(eleven));
        assert!(!one.is_suffix_of(ten));
        assert!(Seq::parse("0").unwrap().is_proper_suffix_of(ten));
        assert!(one.is_suffix_of(one));
        assert!(!one.is_proper_suffix_of(one));
        // λ is a proper suffix of every nonempty sequence
        assert!(Seq::EMPTY.is_proper_suffix_of(one));
    }

    #[test]
    fn push_ends() {
        let w = Seq::parse("10").unwrap();
        assert_eq!(w.push_recent(Symbol::ONE).to_string(), "101");
        assert_eq!(w.push_oldest(Symbol::ONE).to_string(), "110");
        assert_eq!(w.last(), Some(Symbol::ZERO));
        assert_eq!(w.symbol_back(1), Symbol::ONE);
    }

    #[test]
    fn complemented_flips_all() {
        let w = Seq::parse("0110").unwrap();
        assert_eq!(w.complemented().to_string(), "1001");
    }
}
