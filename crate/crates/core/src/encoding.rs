//! Dual-rail delay-insensitive codes for return-to-zero and return-to-one
//! four-phase handshaking.
//!
//! A bit travels on two rails `(rail1, rail0)`. Under RTZ the active level
//! is 1: data sets exactly one rail high and the spacer is all-low. RTO is
//! the bitwise complement: data pulls exactly one rail low and the spacer is
//! all-high.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("word width must be in 1..=64, got {0}")]
    BadWidth(usize),
    #[error("value {value:#x} does not fit in {width} bits")]
    ValueTooWide { value: u64, width: usize },
    #[error("protocol mismatch: expected {expected}, found {found}")]
    ProtocolMismatch { expected: Protocol, found: Protocol },
}

/// Four-phase handshake discipline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Return-to-zero: spacer is all-0, data transitions rise.
    Rtz,
    /// Return-to-one: spacer is all-1, data transitions fall.
    Rto,
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Rtz, Protocol::Rto];

    /// Rail level held by every rail while the bus carries the spacer.
    pub fn spacer_level(self) -> bool {
        matches!(self, Protocol::Rto)
    }

    /// Rail level that marks an asserted rail during data.
    pub fn active_level(self) -> bool {
        !self.spacer_level()
    }

    pub fn dual(self) -> Protocol {
        match self {
            Protocol::Rtz => Protocol::Rto,
            Protocol::Rto => Protocol::Rtz,
        }
    }

    /// Legend prefix used by the reference tables (`Z` for RTZ, `O` for RTO).
    pub fn legend_prefix(self) -> char {
        match self {
            Protocol::Rtz => 'Z',
            Protocol::Rto => 'O',
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Rtz => "RTZ",
            Protocol::Rto => "RTO",
        })
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rtz" => Ok(Protocol::Rtz),
            "rto" => Ok(Protocol::Rto),
            other => Err(format!("unknown protocol `{other}` (expected rtz or rto)")),
        }
    }
}

/// Rail values of one dual-rail bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RailPair {
    pub rail1: bool,
    pub rail0: bool,
}

impl RailPair {
    pub const fn new(rail1: bool, rail0: bool) -> Self {
        Self { rail1, rail0 }
    }

    pub fn complement(self) -> Self {
        Self::new(!self.rail1, !self.rail0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PairClass {
    Data0,
    Data1,
    Spacer,
    Illegal,
}

impl PairClass {
    pub fn is_data(self) -> bool {
        matches!(self, PairClass::Data0 | PairClass::Data1)
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            PairClass::Data0 => Some(false),
            PairClass::Data1 => Some(true),
            _ => None,
        }
    }
}

pub fn encode_bit(value: bool, protocol: Protocol) -> RailPair {
    let active = protocol.active_level();
    let idle = protocol.spacer_level();
    if value {
        RailPair::new(active, idle)
    } else {
        RailPair::new(idle, active)
    }
}

pub fn spacer_pair(protocol: Protocol) -> RailPair {
    let level = protocol.spacer_level();
    RailPair::new(level, level)
}

pub fn classify_pair(pair: RailPair, protocol: Protocol) -> PairClass {
    let active = protocol.active_level();
    match (pair.rail1 == active, pair.rail0 == active) {
        (false, false) => PairClass::Spacer,
        (true, false) => PairClass::Data1,
        (false, true) => PairClass::Data0,
        (true, true) => PairClass::Illegal,
    }
}

/// Whole-bus classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WordClass {
    Data,
    Spacer,
    /// Mixture of data and spacer pairs; seen transiently mid-phase.
    Partial,
    Illegal,
}

/// Result of decoding a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Decoded {
    Value(u64),
    Spacer,
    Partial,
    Illegal,
}

/// A bus of rail pairs, LSB first, tagged with its protocol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualRailWord {
    pairs: Vec<RailPair>,
    protocol: Protocol,
}

impl DualRailWord {
    pub fn new(pairs: Vec<RailPair>, protocol: Protocol) -> Self {
        Self { pairs, protocol }
    }

    pub fn pairs(&self) -> &[RailPair] {
        &self.pairs
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn width(&self) -> usize {
        self.pairs.len()
    }

    pub fn classify(&self) -> WordClass {
        let mut data = 0;
        let mut spacer = 0;
        for &pair in &self.pairs {
            match classify_pair(pair, self.protocol) {
                PairClass::Illegal => return WordClass::Illegal,
                PairClass::Spacer => spacer += 1,
                _ => data += 1,
            }
        }
        match (data, spacer) {
            (_, 0) => WordClass::Data,
            (0, _) => WordClass::Spacer,
            _ => WordClass::Partial,
        }
    }

    /// Per-rail active flags in rail order `(bit0.1, bit0.0, bit1.1, ...)`.
    pub fn active_rails(&self) -> Vec<bool> {
        let active = self.protocol.active_level();
        self.pairs
            .iter()
            .flat_map(|p| [p.rail1 == active, p.rail0 == active])
            .collect()
    }

    /// Bitwise complement of every rail, reinterpreted under the dual protocol.
    pub fn dual(&self) -> DualRailWord {
        DualRailWord {
            pairs: self.pairs.iter().map(|p| p.complement()).collect(),
            protocol: self.protocol.dual(),
        }
    }
}

fn check_width(width: usize) -> Result<(), EncodingError> {
    if width == 0 || width > 64 {
        return Err(EncodingError::BadWidth(width));
    }
    Ok(())
}

pub fn encode_word(value: u64, width: usize, protocol: Protocol) -> Result<DualRailWord, EncodingError> {
    check_width(width)?;
    if width < 64 && value >> width != 0 {
        return Err(EncodingError::ValueTooWide { value, width });
    }
    let pairs = (0..width)
        .map(|i| encode_bit(value >> i & 1 == 1, protocol))
        .collect();
    Ok(DualRailWord::new(pairs, protocol))
}

pub fn spacer_word(width: usize, protocol: Protocol) -> Result<DualRailWord, EncodingError> {
    check_width(width)?;
    Ok(DualRailWord::new(vec![spacer_pair(protocol); width], protocol))
}

pub fn decode_word(word: &DualRailWord) -> Decoded {
    match word.classify() {
        WordClass::Illegal => Decoded::Illegal,
        WordClass::Spacer => Decoded::Spacer,
        WordClass::Partial => Decoded::Partial,
        WordClass::Data => {
            let value = word
                .pairs
                .iter()
                .enumerate()
                .filter(|(_, &p)| classify_pair(p, word.protocol) == PairClass::Data1)
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            Decoded::Value(value)
        }
    }
}

/// Decode several words that must share one protocol.
pub fn decode_all(words: &[DualRailWord], protocol: Protocol) -> Result<Vec<Decoded>, EncodingError> {
    words
        .iter()
        .map(|w| {
            if w.protocol != protocol {
                Err(EncodingError::ProtocolMismatch { expected: protocol, found: w.protocol })
            } else {
                Ok(decode_word(w))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rtz_and_rto_bit_codes() {
        assert_eq!(encode_bit(true, Protocol::Rtz), RailPair::new(true, false));
        assert_eq!(encode_bit(true, Protocol::Rto), RailPair::new(false, true));
        assert_eq!(encode_bit(false, Protocol::Rto), RailPair::new(true, false));
        assert_eq!(encode_bit(false, Protocol::Rtz), RailPair::new(false, true));
    }

    #[test]
    fn spacer_words() {
        let rtz = spacer_word(2, Protocol::Rtz).unwrap();
        assert!(rtz.pairs().iter().all(|p| !p.rail1 && !p.rail0));
        let rto = spacer_word(2, Protocol::Rto).unwrap();
        assert!(rto.pairs().iter().all(|p| p.rail1 && p.rail0));
        let one = spacer_word(1, Protocol::Rtz).unwrap();
        assert_ne!(one.pairs()[0], encode_bit(false, Protocol::Rtz));
        assert_eq!(spacer_word(0, Protocol::Rtz), Err(EncodingError::BadWidth(0)));
    }

    #[test]
    fn illegal_codes() {
        assert_eq!(classify_pair(RailPair::new(true, true), Protocol::Rtz), PairClass::Illegal);
        assert_eq!(classify_pair(RailPair::new(false, false), Protocol::Rto), PairClass::Illegal);
        assert_eq!(classify_pair(RailPair::new(false, false), Protocol::Rtz), PairClass::Spacer);
        assert_eq!(classify_pair(RailPair::new(true, true), Protocol::Rto), PairClass::Spacer);
    }

    #[test]
    fn decode_statuses() {
        let w = encode_word(5, 4, Protocol::Rtz).unwrap();
        assert_eq!(decode_word(&w), Decoded::Value(5));
        assert_eq!(decode_word(&spacer_word(4, Protocol::Rto).unwrap()), Decoded::Spacer);

        let mut pairs = encode_word(5, 4, Protocol::Rtz).unwrap().pairs().to_vec();
        pairs[2] = spacer_pair(Protocol::Rtz);
        assert_eq!(decode_word(&DualRailWord::new(pairs.clone(), Protocol::Rtz)), Decoded::Partial);
        pairs[1] = RailPair::new(true, true);
        assert_eq!(decode_word(&DualRailWord::new(pairs, Protocol::Rtz)), Decoded::Illegal);
    }

    #[test]
    fn value_range_checked() {
        assert!(matches!(
            encode_word(16, 4, Protocol::Rtz),
            Err(EncodingError::ValueTooWide { .. })
        ));
        assert!(encode_word(u64::MAX, 64, Protocol::Rto).is_ok());
    }

    #[test]
    fn mixed_protocols_rejected() {
        let words = [
            encode_word(1, 2, Protocol::Rtz).unwrap(),
            encode_word(1, 2, Protocol::Rto).unwrap(),
        ];
        assert!(decode_all(&words, Protocol::Rtz).is_err());
    }

    fn any_protocol() -> impl Strategy<Value = Protocol> {
        prop_oneof![Just(Protocol::Rtz), Just(Protocol::Rto)]
    }

    proptest! {
        #[test]
        fn word_round_trip(width in 1usize..=64, raw: u64, p in any_protocol()) {
            let v = if width == 64 { raw } else { raw & ((1u64 << width) - 1) };
            let w = encode_word(v, width, p).unwrap();
            prop_assert_eq!(decode_word(&w), Decoded::Value(v));
        }

        #[test]
        fn rto_is_complement_of_rtz(width in 1usize..=16, raw: u16) {
            let v = raw as u64 & ((1u64 << width) - 1);
            let rtz = encode_word(v, width, Protocol::Rtz).unwrap();
            let rto = encode_word(v, width, Protocol::Rto).unwrap();
            prop_assert_eq!(rtz.dual(), rto);
            prop_assert_eq!(
                spacer_word(width, Protocol::Rtz).unwrap().dual(),
                spacer_word(width, Protocol::Rto).unwrap()
            );
        }

        #[test]
        fn classification_is_total(r1: bool, r0: bool, p in any_protocol()) {
            let class = classify_pair(RailPair::new(r1, r0), p);
            let data = class.is_data();
            let spacer = class == PairClass::Spacer;
            let illegal = class == PairClass::Illegal;
            prop_assert_eq!(data as u8 + spacer as u8 + illegal as u8, 1);
            if let Some(bit) = class.bit() {
                prop_assert_eq!(encode_bit(bit, p), RailPair::new(r1, r0));
            }
        }
    }
}
