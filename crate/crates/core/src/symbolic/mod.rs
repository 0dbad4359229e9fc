//! Words, subshifts of finite type, repetition and return times.

mod blocks;
mod returns;
mod sft;
mod word;

pub use blocks::{remove_hole, survivor_shift, BlockShift};
pub use returns::{
    choose_branching_symbol, find_connecting_paths, induced_alphabet, shortest_path, ReturnAlphabet, ReturnEntry,
};
pub use sft::Sft;
pub use word::{
    repetition_time, repetition_time_of, repetition_times_of, return_time_to_cylinder, z_function, Word, SYMBOL_CHARS,
};
pub(crate) use blocks::hole_set;
pub(crate) use sft::gcd;
