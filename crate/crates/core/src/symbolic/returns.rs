use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::symbolic::word::first_return;
use crate::symbolic::{Sft, Word};

/// A first-return word to the base cylinder together with its return time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnEntry {
    pub word: Word,
    pub return_time: usize,
}

/// The alphabet of the induced (first-return) system on a cylinder `[A]`, truncated
/// to return times below `bound`. Concatenations of entries are always admissible
/// and parse back uniquely, so the induced system is a full shift over the entries.
#[derive(Clone, Debug)]
pub struct ReturnAlphabet {
    base_cylinder: Word,
    entries: Vec<ReturnEntry>,
    bound: Option<usize>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl ReturnAlphabet {
    fn from_entries(base_cylinder: Word, entries: Vec<ReturnEntry>, bound: Option<usize>) -> Self {
        let lookup = entries.iter().enumerate().map(|(i, e)| (e.word.symbols().to_vec(), i)).collect();
        Self { base_cylinder, entries, bound, lookup }
    }

    pub fn base_cylinder(&self) -> &Word {
        &self.base_cylinder
    }

    pub fn entries(&self) -> &[ReturnEntry] {
        &self.entries
    }

    pub fn bound(&self) -> Option<usize> {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, symbols: &[u32]) -> Option<usize> {
        self.lookup.get(symbols).copied()
    }

    pub fn return_time(&self, letter: usize) -> usize {
        self.entries[letter].return_time
    }

    /// Sub-alphabet of entries with return time below `bound`, re-indexed.
    pub fn truncated(&self, bound: usize) -> ReturnAlphabet {
        let entries = self.entries.iter().filter(|e| e.return_time < bound).cloned().collect();
        Self::from_entries(self.base_cylinder.clone(), entries, Some(bound))
    }

    /// Concatenates letters into a base-symbol sequence.
    pub fn flatten(&self, letters: &[usize]) -> Vec<u32> {
        let mut out = Vec::new();
        for &l in letters {
            out.extend_from_slice(self.entries[l].word.symbols());
        }
        out
    }

    /// Splits a base sequence lying in `[A]` into successive first-return words.
    /// Stops at the first return that is not found within `seq` or whose word is not
    /// in this alphabet; returns the letters and the number of base symbols consumed.
    pub fn parse(&self, seq: &[u32]) -> (Vec<usize>, usize) {
        let a = self.base_cylinder.symbols();
        let mut letters = Vec::new();
        let mut pos = 0;
        while seq[pos..].starts_with(a) {
            let Some(t) = first_return(&seq[pos..], a) else { break };
            let Some(idx) = self.index_of(&seq[pos..pos + t]) else { break };
            letters.push(idx);
            pos += t;
        }
        (letters, pos)
    }
}

/// Enumerates the first-return words to `[a]` with return time `< t_max`, sorted by
/// return time and then lexicographically.
pub fn induced_alphabet(sft: &Sft, a: &Word, t_max: usize) -> Result<ReturnAlphabet> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("base cylinder must be nonempty".into()));
    }
    if t_max < 2 {
        return Err(Error::InvalidArgument("t_max must be at least 2".into()));
    }
    sft.check_word(a)?;
    let m = a.len();
    let mut entries = Vec::new();
    let mut path = a.symbols().to_vec();
    collect_returns(sft, a.symbols(), m, t_max, &mut path, &mut entries);
    if entries.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    entries.sort_by(|x: &ReturnEntry, y| (x.return_time, x.word.symbols()).cmp(&(y.return_time, y.word.symbols())));
    Ok(ReturnAlphabet::from_entries(a.clone(), entries, Some(t_max)))
}

fn collect_returns(sft: &Sft, a: &[u32], m: usize, t_max: usize, path: &mut Vec<u32>, out: &mut Vec<ReturnEntry>) {
    // The next extension would return at time path.len() + 1 - m at the earliest.
    if path.len() + 1 - m >= t_max {
        return;
    }
    let last = *path.last().unwrap();
    for &s in sft.successors(last) {
        path.push(s);
        let len = path.len();
        if path[len - m..] == *a {
            let t = len - m;
            out.push(ReturnEntry {
                word: Word::new(path[..t].to_vec(), sft.alphabet_size()).unwrap(),
                return_time: t,
            });
        } else {
            collect_returns(sft, a, m, t_max, path, out);
        }
        path.pop();
    }
}

/// Lexicographically smallest among the shortest admissible paths from `from` to `to`,
/// both endpoints included.
pub fn shortest_path(sft: &Sft, from: u32, to: u32) -> Option<Vec<u32>> {
    if from == to {
        return Some(vec![from]);
    }
    let n = sft.alphabet_size();
    let mut parent: Vec<Option<u32>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from as usize] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in sft.successors(u) {
            if seen[v as usize] {
                continue;
            }
            seen[v as usize] = true;
            parent[v as usize] = Some(u);
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while let Some(p) = parent[cur as usize] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(v);
        }
    }
    None
}

/// Smallest symbol with at least two successors.
pub fn choose_branching_symbol(sft: &Sft) -> Result<u32> {
    (0..sft.alphabet_size() as u32)
        .find(|&s| sft.successors(s).len() >= 2)
        .ok_or(Error::NoBranchingSymbol)
}

/// For a branching symbol `a` with two smallest successors `b < c`, returns the
/// cylinder word `A = aB` and the competitor `aC`, where `B` (resp. `C`) is the
/// shortest, then lexicographically smallest, path from `b` (resp. `c`) back to `a`.
pub fn find_connecting_paths(sft: &Sft, a: u32) -> Result<(Word, Word)> {
    choose_branching_symbol(sft)?;
    if a as usize >= sft.alphabet_size() {
        return Err(Error::SymbolOutOfRange { symbol: a, alphabet_size: sft.alphabet_size() });
    }
    if !sft.is_primitive() {
        return Err(Error::NotMixing);
    }
    let succ = sft.successors(a);
    if succ.len() < 2 {
        return Err(Error::InvalidArgument(format!("symbol {a} has a single successor")));
    }
    let q = sft.alphabet_size();
    let build = |start: u32| -> Word {
        let mut symbols = vec![a];
        symbols.extend(shortest_path(sft, start, a).expect("mixing shifts are strongly connected"));
        Word::new(symbols, q).unwrap()
    };
    Ok((build(succ[0]), build(succ[1])))
}
