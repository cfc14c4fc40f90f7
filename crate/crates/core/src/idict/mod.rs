//! Indexable dictionaries: leaf dictionaries, MSB bucketing, collections of
//! sets over a shared payload, and the main dictionary built on them.

pub mod bucketed;
pub mod collection;
pub mod leaf;
pub mod main_dict;

pub use bucketed::{BucketedDict, DEFAULT_D};
pub use collection::{DictCollection, IndexedCollection};
pub use leaf::{LeafDict, LeafView};
pub use main_dict::{
    choose_shift, main_is_dense, MainDict, MainRepr, SelectOnlySet, ShiftedDict, TwoLevelDict,
};
