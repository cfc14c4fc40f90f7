pub mod bench;
pub mod bitcore;
pub mod check;
pub mod error;
pub mod format;
pub mod hashkit;
pub mod idict;
pub mod ktree;
pub mod multidict;
pub mod multiset;
pub mod oracle;
pub mod parts;
pub mod prefixsum;
pub mod rankselect;
pub mod rrrfid;
pub mod stats;

pub use error::{Error, Result};
pub use parts::{Parts, Persist};
pub use prefixsum::SearchablePrefixSum;
pub use rankselect::{Fid, RsDirectory};
pub use rrrfid::RrrFid;
