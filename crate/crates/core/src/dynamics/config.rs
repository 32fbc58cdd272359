use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A spin configuration: bit `x` is 1 when vertex `x` holds a cooperator.
///
/// Text form is one character per vertex in label order, so `"1000"` puts a
/// single cooperator at vertex 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Config {
    words: Vec<u64>,
    n: usize,
    ones: usize,
}

impl Config {
    pub fn zeros(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
            n,
            ones: 0,
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut c = Self::zeros(n);
        for x in 0..n {
            c.set(x, true);
        }
        c
    }

    /// Configuration whose bit pattern is the integer `index` (`N <= 64`).
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 64, "index encoding supports at most 64 vertices");
        let masked = if n == 64 { index } else { index & ((1u64 << n) - 1) };
        Self {
            words: if n == 0 { vec![] } else { vec![masked] },
            n,
            ones: masked.count_ones() as usize,
        }
    }

    /// Inverse of [`Config::from_index`].
    pub fn index(&self) -> u64 {
        assert!(self.n <= 64, "index encoding supports at most 64 vertices");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut c = Self::zeros(bits.len());
        for (x, &b) in bits.iter().enumerate() {
            c.set(x, b);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, x: usize) -> bool {
        debug_assert!(x < self.n);
        (self.words[x / 64] >> (x % 64)) & 1 == 1
    }

    /// `η(x)` as 0 or 1.
    #[inline]
    pub fn value(&self, x: usize) -> u8 {
        self.get(x) as u8
    }

    pub fn set(&mut self, x: usize, v: bool) {
        if self.get(x) != v {
            self.flip(x);
        }
    }

    #[inline]
    pub fn flip(&mut self, x: usize) {
        let mask = 1u64 << (x % 64);
        let word = &mut self.words[x / 64];
        *word ^= mask;
        if *word & mask != 0 {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
    }

    /// The single-site flip `η^x`.
    pub fn flipped(&self, x: usize) -> Self {
        let mut c = self.clone();
        c.flip(x);
        c
    }

    pub fn ones_count(&self) -> usize {
        self.ones
    }

    pub fn is_all_ones(&self) -> bool {
        self.ones == self.n
    }

    pub fn is_all_zeros(&self) -> bool {
        self.ones == 0
    }

    pub fn is_absorbing(&self) -> bool {
        self.is_all_ones() || self.is_all_zeros()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n).map(move |x| self.get(x))
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Config({self})")
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(Error::Parse(format!("configuration digit {other:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::Parse("empty configuration".into()));
        }
        Ok(Self::from_bits(&bits))
    }
}

impl Serialize for Config {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_and_index_forms_agree() {
        let c: Config = "1010".parse().unwrap();
        assert_eq!(c.index(), 0b0101);
        assert_eq!(c.ones_count(), 2);
        assert_eq!(Config::from_index(4, 5), c);
        assert_eq!(c.to_string(), "1010");
        assert!("10a".parse::<Config>().is_err());
    }

    #[test]
    fn wide_configs() {
        let mut c = Config::zeros(130);
        c.flip(129);
        c.flip(64);
        assert_eq!(c.ones_count(), 2);
        assert!(c.get(129) && c.get(64) && !c.get(63));
        assert!(Config::ones(130).is_all_ones());
    }

    proptest! {
        #[test]
        fn flip_tracks_ones(bits in proptest::collection::vec(any::<bool>(), 1..100), x in 0usize..100) {
            let c = Config::from_bits(&bits);
            let x = x % bits.len();
            let f = c.flipped(x);
            prop_assert_eq!(f.ones_count(), f.iter().filter(|&b| b).count());
            prop_assert_ne!(f.get(x), c.get(x));
            prop_assert_eq!(f.flipped(x), c);
        }
    }
}
