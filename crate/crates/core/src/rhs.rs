//! Right-hand sides for the experiments.
//!
//! The random variant uses SplitMix64 so that ports in other languages can
//! reproduce the exact vector from the seed:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! value = (z >> 11) * 2^-53            // uniform in [0, 1)
//! ```
//!
//! All arithmetic is wrapping on 64-bit unsigned integers; entry `i` of the
//! vector is the `i`-th draw, in lexicographic grid order.

use std::fmt;
use std::str::FromStr;

use crate::grid::{GridSpec, GridVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightHandSide {
    Ones,
    Random { seed: u64 },
}

impl RightHandSide {
    pub fn build(self, spec: GridSpec) -> GridVector {
        match self {
            RightHandSide::Ones => GridVector::filled(spec, 1.0),
            RightHandSide::Random { seed } => {
                let mut rng = SplitMix64::new(seed);
                GridVector::from_fn(spec, |_| rng.next_f64())
            }
        }
    }
}

impl fmt::Display for RightHandSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RightHandSide::Ones => f.write_str("ones"),
            RightHandSide::Random { seed } => write!(f, "random(seed={seed})"),
        }
    }
}

/// The SplitMix64 generator described in the module docs.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Parses `ones` or `random`; the seed is supplied separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsKind {
    Ones,
    Random,
}

impl FromStr for RhsKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ones" => Ok(RhsKind::Ones),
            "random" => Ok(RhsKind::Random),
            other => Err(format!("unknown right-hand side `{other}` (expected ones|random)")),
        }
    }
}

impl RhsKind {
    pub fn with_seed(self, seed: u64) -> RightHandSide {
        match self {
            RhsKind::Ones => RightHandSide::Ones,
            RhsKind::Random => RightHandSide::Random { seed },
        }
    }
}
