//! Bit-level substrate shared by every structure.

pub mod bits;
pub mod bounds;
pub mod broadword;
pub mod enumerative;

pub use bits::{bits_for, ceil_lg, floor_lg, BitReader, BitVector, Bits, IntVector};
pub use bounds::{info_bound, info_bound_exact, ktree_bound, ktree_bound_exact};
pub use broadword::{popcount_word, select_in_word};
pub use enumerative::{decode_block, encode_block, BinomialTable, BlockCode};
