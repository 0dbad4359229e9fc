use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::symbolic::Word;

/// One-sided subshift of finite type given by a 0/1 transition matrix, stored as
/// sorted successor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sft {
    alphabet_size: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Sft {
    /// Builds the subshift from its allowed transitions `(i, j)`. Every symbol
    /// must have at least one successor and one predecessor.
    pub fn new(alphabet_size: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidSubshift("empty alphabet".into()));
        }
        let mut succ = vec![Vec::new(); alphabet_size];
        for (i, j) in edges {
            for s in [i, j] {
                if s as usize >= alphabet_size {
                    return Err(Error::SymbolOutOfRange { symbol: s, alphabet_size });
                }
            }
            succ[i as usize].push(j);
        }
        let sft = Self::from_successors(succ);
        let mut has_pred = vec![false; alphabet_size];
        for &t in &sft.targets {
            has_pred[t as usize] = true;
        }
        for i in 0..alphabet_size {
            if sft.successors(i as u32).is_empty() {
                return Err(Error::InvalidSubshift(format!("symbol {i} has no successor")));
            }
            if !has_pred[i] {
                return Err(Error::InvalidSubshift(format!("symbol {i} has no predecessor")));
            }
        }
        Ok(sft)
    }

    /// Builds from successor lists without checking for stranded symbols.
    /// Used for survivor shifts of open systems, which may contain transient symbols.
    pub(crate) fn from_successors(mut succ: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(succ.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for row in &mut succ {
            row.sort_unstable();
            row.dedup();
            targets.extend_from_slice(row);
            offsets.push(targets.len());
        }
        Self { alphabet_size: succ.len(), offsets, targets }
    }

    pub(crate) fn from_csr(offsets: Vec<usize>, targets: Vec<u32>) -> Self {
        Self { alphabet_size: offsets.len() - 1, offsets, targets }
    }

    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut edges = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSubshift("transition matrix is not square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => edges.push((i as u32, j as u32)),
                    _ => return Err(Error::InvalidSubshift(format!("entry ({i},{j}) is not 0/1"))),
                }
            }
        }
        Self::new(n, edges)
    }

    /// The full shift on `q` symbols.
    pub fn full(q: usize) -> Self {
        let succ = (0..q).map(|_| (0..q as u32).collect()).collect();
        Self::from_successors(succ)
    }

    /// Two symbols, the word `11` forbidden.
    pub fn golden_mean() -> Self {
        Self::from_successors(vec![vec![0, 1], vec![0]])
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn successors(&self, symbol: u32) -> &[u32] {
        let i = symbol as usize;
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn has_transition(&self, i: u32, j: u32) -> bool {
        self.successors(i).binary_search(&j).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.alphabet_size as u32).flat_map(move |i| self.successors(i).iter().map(move |&j| (i, j)))
    }

    pub fn transition_matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.alphabet_size]; self.alphabet_size];
        for (i, j) in self.edges() {
            m[i as usize][j as usize] = 1;
        }
        m
    }

    pub fn is_admissible(&self, symbols: &[u32]) -> bool {
        symbols.iter().all(|&s| (s as usize) < self.alphabet_size)
            && symbols.windows(2).all(|p| self.has_transition(p[0], p[1]))
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        if w.alphabet_size() > self.alphabet_size || !self.is_admissible(w.symbols()) {
            return Err(Error::InadmissibleWord(w.to_string()));
        }
        Ok(())
    }

    pub(crate) fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut pred = vec![Vec::new(); self.alphabet_size];
        for (i, j) in self.edges() {
            pred[j as usize].push(i);
        }
        pred
    }

    /// True if the transition graph contains at least one cycle.
    pub fn has_cycle(&self) -> bool {
        // Kahn's algorithm: a cycle exists iff some vertex is never released.
        let mut indeg = vec![0usize; self.alphabet_size];
        for &t in &self.targets {
            indeg[t as usize] += 1;
        }
        let mut queue: VecDeque<u32> = (0..self.alphabet_size as u32).filter(|&i| indeg[i as usize] == 0).collect();
        let mut released = 0;
        while let Some(i) = queue.pop_front() {
            released += 1;
            for &j in self.successors(i) {
                indeg[j as usize] -= 1;
                if indeg[j as usize] == 0 {
                    queue.push_back(j);
                }
            }
        }
        released < self.alphabet_size
    }

    fn reachable_from(&self, start: u32, adj: impl Fn(u32) -> Vec<u32>) -> Vec<Option<usize>> {
        let mut level = vec![None; self.alphabet_size];
        level[start as usize] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let d = level[i as usize].unwrap();
            for j in adj(i) {
                if level[j as usize].is_none() {
                    level[j as usize] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        level
    }

    pub fn is_irreducible(&self) -> bool {
        let fwd = self.reachable_from(0, |i| self.successors(i).to_vec());
        if fwd.iter().any(Option::is_none) {
            return false;
        }
        let pred = self.predecessors();
        let bwd = self.reachable_from(0, |i| pred[i as usize].clone());
        bwd.iter().all(Option::is_some)
    }

    /// Period of an irreducible shift (gcd of cycle lengths); `None` if reducible.
    pub fn period(&self) -> Option<usize> {
        if !self.is_irreducible() {
            return None;
        }
        let level = self.reachable_from(0, |i| self.successors(i).to_vec());
        let mut g = 0usize;
        for (i, j) in self.edges() {
            let li = level[i as usize].unwrap() as i64;
            let lj = level[j as usize].unwrap() as i64;
            g = gcd(g, (li + 1 - lj).unsigned_abs() as usize);
        }
        Some(g)
    }

    /// Irreducible and aperiodic, i.e. some power of the matrix is strictly positive.
    pub fn is_primitive(&self) -> bool {
        self.period() == Some(1)
    }

    /// All admissible words of length `len` in lexicographic order.
    pub fn admissible_words(&self, len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut buf = Vec::with_capacity(len);
        if len == 0 {
            return vec![Word::empty(self.alphabet_size)];
        }
        for s in 0..self.alphabet_size as u32 {
            buf.push(s);
            self.extend_words(&mut buf, len, &mut |w| out.push(Word::new(w.to_vec(), self.alphabet_size).unwrap()));
            buf.pop();
        }
        out
    }

    pub(crate) fn extend_words(&self, buf: &mut Vec<u32>, len: usize, visit: &mut dyn FnMut(&[u32])) {
        if buf.len() == len {
            visit(buf);
            return;
        }
        let last = *buf.last().unwrap();
        for &s in self.successors(last) {
            buf.push(s);
            self.extend_words(buf, len, visit);
            buf.pop();
        }
    }

    /// Parses the adjacency-list text format: the alphabet size on the first line,
    /// then one allowed transition `i j` per line. `#` starts a comment.
    pub fn parse_adjacency(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty());
        let size: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("missing alphabet size".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("alphabet size: {e}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("expected `i j`, got {line:?}")));
            }
            let parse = |s: &str| s.parse::<u32>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
            edges.push((parse(parts[0])?, parse(parts[1])?));
        }
        Self::new(size, edges)
    }

    pub fn to_adjacency(&self) -> String {
        let mut out = format!("{}\n", self.alphabet_size);
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}").unwrap();
        }
        out
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}
