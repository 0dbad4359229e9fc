use std::fmt;

use crate::error::{Error, Result};

/// Characters used to print and parse symbols of alphabets with at most 36 letters.
pub const SYMBOL_CHARS: &str = "0123456789abcdefghijklmnopqrstuvwxyz";

/// A finite word over the alphabet `{0, .., alphabet_size - 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<u32>,
    alphabet_size: usize,
}

impl Word {
    pub fn new(symbols: Vec<u32>, alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidArgument("alphabet size must be positive".into()));
        }
        if let Some(&symbol) = symbols.iter().find(|&&s| s as usize >= alphabet_size) {
            return Err(Error::SymbolOutOfRange { symbol, alphabet_size });
        }
        Ok(Self { symbols, alphabet_size })
    }

    pub fn empty(alphabet_size: usize) -> Self {
        Self { symbols: Vec::new(), alphabet_size }
    }

    /// Parses a word written with the digits of [`SYMBOL_CHARS`]; whitespace is ignored.
    pub fn parse(text: &str, alphabet_size: usize) -> Result<Self> {
        let symbols = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                SYMBOL_CHARS
                    .find(c.to_ascii_lowercase())
                    .map(|i| i as u32)
                    .ok_or_else(|| Error::Parse(format!("unknown symbol character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols, alphabet_size)
    }

    /// Parses `text` where each character is looked up in `alphabet` (`"ab"` maps `a` to 0).
    pub fn from_letters(text: &str, alphabet: &str) -> Result<Self> {
        let letters: Vec<char> = alphabet.chars().collect();
        let symbols = text
            .chars()
            .map(|c| {
                letters
                    .iter()
                    .position(|&l| l == c)
                    .map(|i| i as u32)
                    .ok_or_else(|| Error::Parse(format!("{c:?} is not in alphabet {alphabet:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols, letters.len())
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<u32> {
        self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.symbols.starts_with(&prefix.symbols)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word { symbols: self.symbols[..len.min(self.len())].to_vec(), alphabet_size: self.alphabet_size }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word { symbols, alphabet_size: self.alphabet_size.max(other.alphabet_size) }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet_size <= SYMBOL_CHARS.len() {
            let chars = SYMBOL_CHARS.as_bytes();
            for &s in &self.symbols {
                write!(f, "{}", chars[s as usize] as char)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Z-array of `s`: `z[i]` is the length of the longest common prefix of `s` and `s[i..]`.
/// `z[0]` is set to `s.len()`.
pub fn z_function<T: Eq>(s: &[T]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0, 0);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// `R_k` on a finite prefix: the least `n > 0` with `s[n..n+k] == s[..k]`, if it fits in `s`.
pub fn repetition_time_of<T: Eq>(s: &[T], k: usize) -> Result<Option<usize>> {
    if k == 0 || k >= s.len() {
        return Err(Error::InvalidArgument(format!(
            "repetition time needs 0 < k < length (k = {k}, length = {})",
            s.len()
        )));
    }
    // Z-algorithm with early exit at the first full match.
    let n = s.len();
    let mut z = vec![0usize; n];
    let (mut l, mut r) = (0, 0);
    for i in 1..=n - k {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if z[i] >= k {
            return Ok(Some(i));
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    Ok(None)
}

/// All repetition times at once: entry `k` holds `R_k(s)` for `1 <= k < s.len()`
/// (entry 0 is unused and `None`).
pub fn repetition_times_of<T: Eq>(s: &[T]) -> Vec<Option<usize>> {
    let n = s.len();
    let mut out = vec![None; n.max(1)];
    let z = z_function(s);
    let mut next_k = 1;
    for (i, &zi) in z.iter().enumerate().skip(1) {
        // R_k is nondecreasing in k, so each shift settles a contiguous range of k.
        while next_k <= zi && next_k < n {
            out[next_k] = Some(i);
            next_k += 1;
        }
        if next_k >= n {
            break;
        }
    }
    out
}

/// The `k`-repetition time of `w`.
pub fn repetition_time(w: &Word, k: usize) -> Result<Option<usize>> {
    repetition_time_of(w.symbols(), k)
}

/// First return of `w` to the cylinder `[a]`: least `t > 0` with `w[t..t+|a|] == a`.
pub fn return_time_to_cylinder(w: &Word, a: &Word) -> Result<Option<usize>> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("cylinder word must be nonempty".into()));
    }
    if !w.starts_with(a) {
        return Err(Error::InvalidArgument(format!("{w} does not lie in the cylinder [{a}]")));
    }
    Ok(first_return(w.symbols(), a.symbols()))
}

pub(crate) fn first_return(s: &[u32], a: &[u32]) -> Option<usize> {
    let m = a.len();
    (1..s.len().saturating_sub(m) + 1).find(|&t| &s[t..t + m] == a)
}
