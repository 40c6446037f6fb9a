//! Operand vectors for adder simulation.
//!
//! Text format: one vector per line, `a b cin`, with `a` and `b` in hex (an
//! optional `0x` prefix is accepted) and `cin` as `0` or `1`. Blank lines and
//! anything after `#` are ignored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VectorError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("operand {value:#x} does not fit in {width} bits")]
    TooWide { value: u64, width: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vector {
    pub a: u64,
    pub b: u64,
    pub cin: bool,
}

impl Vector {
    pub fn new(a: u64, b: u64, cin: bool) -> Self {
        Self { a, b, cin }
    }

    /// `a + b + cin` as a `width + 1`-bit result.
    pub fn expected(&self) -> u64 {
        self.a + self.b + self.cin as u64
    }

    /// Port values in generated-adder input order: `a`, `b`, `cin`.
    pub fn port_values(&self) -> [u64; 3] {
        [self.a, self.b, self.cin as u64]
    }

    pub fn check_width(&self, width: u32) -> Result<(), VectorError> {
        for v in [self.a, self.b] {
            if width < 64 && v >> width != 0 {
                return Err(VectorError::TooWide { value: v, width });
            }
        }
        Ok(())
    }
}

pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// `count` vectors drawn uniformly over `[0, 2^width)` for both operands.
pub fn random(width: u32, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = mask(width);
    (0..count)
        .map(|_| Vector::new(rng.gen::<u64>() & m, rng.gen::<u64>() & m, rng.gen()))
        .collect()
}

/// Every `(a, b, cin)` at `width`, cin fastest.
pub fn exhaustive(width: u32) -> Vec<Vector> {
    assert!(width <= 12, "exhaustive enumeration limited to 12 bits");
    let n = 1u64 << width;
    let mut v = Vec::with_capacity((n * n * 2) as usize);
    for a in 0..n {
        for b in 0..n {
            for cin in [false, true] {
                v.push(Vector::new(a, b, cin));
            }
        }
    }
    v
}

/// Corner cases: full carry propagation with and without carry-in, all
/// zeros, all ones.
pub fn directed(width: u32) -> Vec<Vector> {
    let m = mask(width);
    vec![
        Vector::new(m, 0, true),
        Vector::new(m, 0, false),
        Vector::new(0, 0, false),
        Vector::new(m, m, true),
    ]
}

pub fn parse(text: &str) -> Result<Vec<Vector>, VectorError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| VectorError::Parse { line: i + 1, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected `a b cin`, got {} field(s)", fields.len())));
        }
        let hex = |s: &str| {
            let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
            u64::from_str_radix(digits, 16).map_err(|e| err(format!("bad operand `{s}`: {e}")))
        };
        let cin = match fields[2] {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("cin must be 0 or 1, got `{other}`"))),
        };
        out.push(Vector::new(hex(fields[0])?, hex(fields[1])?, cin));
    }
    Ok(out)
}

pub fn format(vectors: &[Vector]) -> String {
    vectors
        .iter()
        .map(|v| format!("{:x} {:x} {}\n", v.a, v.b, v.cin as u8))
        .collect()
}
