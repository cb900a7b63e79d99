//! Tree nodes and the letters they are built from.
//!
//! A node is a finite sequence of letters, the letter at position `i` drawn
//! from the level-`i` alphabet. The binary family uses indexed letters 0/1;
//! the star family uses fixed-width bit words (total functions into 2),
//! packed so that lexicographic order on the bit string equals the derived
//! order on the packed value.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// letter from a small indexed alphabet; the binary family uses 0 and 1
    Index(u8),
    /// bit word of `width` coordinates; coordinate 0 is the leading bit
    Word { bits: u32, width: u8 },
}

impl Letter {
    pub fn word(width: u8, bits: u32) -> Letter {
        debug_assert!(width as u32 <= 32);
        debug_assert!(width == 32 || bits < (1u32 << width));
        Letter::Word { bits, width }
    }

    /// Parses a star letter from its bit-string form, e.g. "0110".
    pub fn parse_word(s: &str) -> Result<Letter> {
        if s.is_empty() || s.len() > 32 {
            return Err(Error::input(format!("bad letter width in {s:?}")));
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::input(format!("bad bit {c:?} in letter {s:?}"))),
            }
        }
        Ok(Letter::word(s.len() as u8, bits))
    }

    /// Value of the letter at coordinate `i` when viewed as a function into 2.
    pub fn bit(&self, i: u8) -> bool {
        match *self {
            Letter::Index(v) => {
                debug_assert!(i == 0);
                v != 0
            }
            Letter::Word { bits, width } => {
                debug_assert!(i < width);
                (bits >> (width - 1 - i)) & 1 == 1
            }
        }
    }

    pub fn width(&self) -> u8 {
        match *self {
            Letter::Index(_) => 1,
            Letter::Word { width, .. } => width,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::Index(v) => write!(f, "{v}"),
            Letter::Word { bits, width } => {
                for i in 0..width {
                    write!(f, "{}", (bits >> (width - 1 - i)) & 1)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A node of a tree: the sequence of letters read off the branch so far.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Node(Vec<Letter>);

impl Node {
    pub fn root() -> Node {
        Node(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Node {
        Node(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn letter(&self, i: usize) -> Letter {
        self.0[i]
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn child(&self, letter: Letter) -> Node {
        let mut v = self.0.clone();
        v.push(letter);
        Node(v)
    }

    pub fn parent(&self) -> Option<Node> {
        if self.0.is_empty() {
            None
        } else {
            Some(Node(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Initial segment of the given length.
    pub fn prefix(&self, len: usize) -> Node {
        Node(self.0[..len.min(self.0.len())].to_vec())
    }

    /// True when `self` is an initial segment of `other` (allowing equality).
    pub fn is_prefix_of(&self, other: &Node) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_strict_prefix_of(&self, other: &Node) -> bool {
        other.0.len() > self.0.len() && self.is_prefix_of(other)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "<>");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A partial function from bit-word coordinates to 2, kept sorted by
/// coordinate. This is both the constraint `g` carried by a star creature
/// and the label `h` of a functional row.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PartialBits(Vec<(u8, bool)>);

impl PartialBits {
    pub fn empty() -> PartialBits {
        PartialBits(Vec::new())
    }

    pub fn new(mut pairs: Vec<(u8, bool)>) -> Result<PartialBits> {
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::input(format!(
                    "coordinate {} assigned twice in partial function",
                    w[0].0
                )));
            }
        }
        Ok(PartialBits(pairs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(u8, bool)] {
        &self.0
    }

    pub fn get(&self, coord: u8) -> Option<bool> {
        self.0
            .binary_search_by_key(&coord, |&(c, _)| c)
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn domain(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().map(|&(c, _)| c)
    }

    /// True when every constrained coordinate of `self` agrees with `letter`.
    pub fn constrains(&self, letter: &Letter) -> bool {
        self.0.iter().all(|&(c, b)| {
            c < letter.width() && letter.bit(c) == b
        })
    }

    /// True when `self` is a sub-function of `other`.
    pub fn subset_of(&self, other: &PartialBits) -> bool {
        self.0.iter().all(|&(c, b)| other.get(c) == Some(b))
    }

    /// Union with `other`; errors on a conflicting coordinate.
    pub fn union(&self, other: &PartialBits) -> Result<PartialBits> {
        let mut pairs = self.0.clone();
        for &(c, b) in &other.0 {
            match self.get(c) {
                Some(x) if x != b => {
                    return Err(Error::input(format!(
                        "conflicting bit at coordinate {c} in partial-function union"
                    )))
                }
                Some(_) => {}
                None => pairs.push((c, b)),
            }
        }
        PartialBits::new(pairs)
    }

    /// Coordinates of `self` not constrained by `other`.
    pub fn minus_size(&self, other: &PartialBits) -> usize {
        self.0
            .iter()
            .filter(|&&(c, _)| other.get(c).is_none())
            .count()
    }
}

impl fmt::Display for PartialBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (c, b)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}:{}", u8::from(*b))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for PartialBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_letters_order_lexicographically() {
        let a = Letter::parse_word("0100").unwrap();
        let b = Letter::parse_word("1000").unwrap();
        assert!(a < b);
        assert_eq!(a.to_string(), "0100");
        assert!(a.bit(1) && !a.bit(0) && !a.bit(2));
    }

    #[test]
    fn prefix_relations() {
        let root = Node::root();
        let n = root.child(Letter::Index(0)).child(Letter::Index(1));
        assert!(root.is_prefix_of(&n));
        assert!(n.prefix(1).is_strict_prefix_of(&n));
        assert!(!n.is_prefix_of(&n.prefix(1)));
        assert_eq!(n.parent().unwrap(), n.prefix(1));
    }

    #[test]
    fn partial_bits_algebra() {
        let g = PartialBits::new(vec![(2, true), (0, false)]).unwrap();
        let h = PartialBits::new(vec![(0, false)]).unwrap();
        assert!(h.subset_of(&g));
        assert!(!g.subset_of(&h));
        assert_eq!(g.minus_size(&h), 1);
        let letter = Letter::parse_word("0110").unwrap();
        assert!(g.constrains(&letter));
        assert!(PartialBits::new(vec![(1, true), (1, false)]).is_err());
        let conflict = PartialBits::new(vec![(0, true)]).unwrap();
        assert!(g.union(&conflict).is_err());
    }
}
