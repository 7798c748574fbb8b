use serde::{Deserialize, Serialize};

/// Size caps. Exceeding any of them is an error, never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest group order accepted from a permutation closure.
    pub order: usize,
    /// Largest group order whose full subgroup lattice is enumerated.
    pub lattice: usize,
    /// Largest subgroup order whose automorphism group is enumerated.
    pub aut: usize,
    /// Largest number of nondegenerate chains in any nerve degree.
    pub nerve_chains: u128,
    /// Largest nerve degree accepted.
    pub dmax: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            order: 10_000,
            lattice: 2_000,
            aut: 256,
            nerve_chains: 5_000_000,
            dmax: 4,
        }
    }
}

/// Groups up to this order carry a dense multiplication table.
pub const TABLE_LIMIT: usize = 512;
