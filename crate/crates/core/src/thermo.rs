//! Pressure, equilibrium states and dimension roots for locally constant potentials.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::perron::PerronSolver;
use crate::symbolic::{hole_set, induced_alphabet, BlockShift, Sft, Word};

/// A potential constant on the blocks of a (possibly hole-restricted) block shift.
#[derive(Clone, Debug)]
pub struct Potential {
    base: Sft,
    blocks: Arc<BlockShift>,
    values: Vec<f64>,
}

impl Potential {
    /// Potential of the given level, with `f` evaluated on every admissible block.
    pub fn from_fn(base: &Sft, level: usize, f: impl Fn(&[u32]) -> f64) -> Result<Self> {
        let blocks = BlockShift::higher_block(base, level)?;
        let values = (0..blocks.len()).map(|i| f(blocks.block(i))).collect();
        Ok(Self { base: base.clone(), blocks: Arc::new(blocks), values })
    }

    pub fn constant(base: &Sft, value: f64) -> Self {
        Self::from_fn(base, 1, |_| value).expect("level 1 is valid")
    }

    /// Level-1 potential given by one value per symbol.
    pub fn from_symbol_values(base: &Sft, values: &[f64]) -> Result<Self> {
        if values.len() != base.alphabet_size() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} symbols",
                values.len(),
                base.alphabet_size()
            )));
        }
        Self::from_fn(base, 1, |b| values[b[0] as usize])
    }

    pub fn base(&self) -> &Sft {
        &self.base
    }

    pub fn level(&self) -> usize {
        self.blocks.level()
    }

    pub fn blocks(&self) -> &Arc<BlockShift> {
        &self.blocks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value on a block of this potential's level.
    pub fn value_of(&self, block: &[u32]) -> Option<f64> {
        self.blocks.index_of(block).map(|i| self.values[i])
    }

    pub fn scaled(&self, s: f64) -> Self {
        let values = self.values.iter().map(|v| s * v).collect();
        Self { base: self.base.clone(), blocks: Arc::clone(&self.blocks), values }
    }

    pub fn shifted(&self, c: f64) -> Self {
        let values = self.values.iter().map(|v| v + c).collect();
        Self { base: self.base.clone(), blocks: Arc::clone(&self.blocks), values }
    }

    /// Re-expresses the potential on `level`-blocks (`level >= self.level()`).
    pub fn lifted(&self, level: usize) -> Result<Self> {
        self.restricted(&[], level)
    }

    /// The potential on the survivor shift of `holes` (common length `n`), presented
    /// on blocks of length `max(n, level)`. The result may have no cycles.
    pub fn with_holes(&self, holes: &[Word]) -> Result<Self> {
        let n = holes.first().map_or(0, Word::len);
        self.restricted(holes, n.max(self.level()))
    }

    fn restricted(&self, holes: &[Word], level: usize) -> Result<Self> {
        let l = self.level();
        if level < l {
            return Err(Error::LevelMismatch);
        }
        let (n, set) = hole_set(&self.base, holes)?;
        if level < n {
            return Err(Error::LevelMismatch);
        }
        let blocks = BlockShift::filtered(&self.base, level, |b| {
            !set.contains(&b[..n]) && self.blocks.index_of(&b[..l]).is_some()
        });
        let mut values = Vec::with_capacity(blocks.len());
        for i in 0..blocks.len() {
            let idx = self.blocks.index_of(&blocks.block(i)[..l]).ok_or(Error::LevelMismatch)?;
            values.push(self.values[idx]);
        }
        Ok(Self { base: self.base.clone(), blocks: Arc::new(blocks), values })
    }

    /// `word,value` rows, one per block.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("word,value\n");
        for (i, v) in self.values.iter().enumerate() {
            writeln!(s, "{},{}", self.blocks.block_word(i), fmt_float(*v)).unwrap();
        }
        s
    }

    /// Parses `word,value` rows; every admissible block of the common length must appear.
    pub fn from_csv(base: &Sft, text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with("word")) {
                continue;
            }
            let bad = |m: &str| Error::Parse(format!("line {}: {m}", lineno + 1));
            let (w, v) = line.split_once(',').ok_or_else(|| bad("expected `word,value`"))?;
            let w = Word::parse(w.trim(), base.alphabet_size())?;
            let v: f64 = v.trim().parse().map_err(|_| bad("bad number"))?;
            rows.push((w, v));
        }
        let level = rows.first().ok_or_else(|| Error::Parse("no rows".into()))?.0.len();
        let blocks = BlockShift::higher_block(base, level)?;
        let mut values = vec![f64::NAN; blocks.len()];
        for (w, v) in rows {
            let i = blocks.index_of(w.symbols()).ok_or_else(|| Error::Parse(format!("`{w}` is not an admissible {level}-block")))?;
            values[i] = v;
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Parse(format!("missing value for `{}`", blocks.block_word(i))));
        }
        Ok(Self { base: base.clone(), blocks: Arc::new(blocks), values })
    }
}

/// Formats with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..=11).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s }
    } else {
        format!("{x:.11e}")
    }
}

/// Topological pressure: log spectral radius of the weighted transition matrix.
pub fn pressure(phi: &Potential) -> Result<f64> {
    PerronSolver::new(phi.blocks.sft()).log_spectral_radius(&phi.values)
}

/// Pressure of the open system with the given holes; `-inf` if nothing survives.
pub fn pressure_with_holes(phi: &Potential, holes: &[Word]) -> Result<f64> {
    match pressure(&phi.with_holes(holes)?) {
        Err(Error::EmptySurvivor) => Ok(f64::NEG_INFINITY),
        other => other,
    }
}

/// The Markov equilibrium state of a locally constant potential on its dominant
/// component.
#[derive(Clone, Debug)]
pub struct EquilibriumState {
    pressure: f64,
    blocks: Arc<BlockShift>,
    /// Block indices of the dominant component, ascending.
    states: Vec<u32>,
    right: Vec<f64>,
    left: Vec<f64>,
    measure: Vec<f64>,
    log_weights: Vec<f64>,
    /// Transition probabilities in CSR form over local indices.
    offsets: Vec<usize>,
    targets: Vec<u32>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    entropy: f64,
    integral: f64,
}

pub fn equilibrium_state(phi: &Potential) -> Result<EquilibriumState> {
    EquilibriumState::new(phi)
}

impl EquilibriumState {
    pub fn new(phi: &Potential) -> Result<Self> {
        let sft = phi.blocks.sft();
        let pv = PerronSolver::new(sft).solve(&phi.values)?;
        let states = pv.states;
        let n = states.len();
        let local = |s: u32| states.binary_search(&s).ok();
        let rho_log = pv.log_rho;
        let measure: Vec<f64> = pv.left.iter().zip(&pv.right).map(|(u, v)| u * v).collect();
        let total: f64 = measure.iter().sum();
        let measure: Vec<f64> = measure.into_iter().map(|m| m / total).collect();
        let log_weights: Vec<f64> = states.iter().map(|&s| phi.values[s as usize]).collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut probs = Vec::new();
        let mut cumulative = Vec::new();
        offsets.push(0);
        let mut entropy = 0.0;
        for (i, &s) in states.iter().enumerate() {
            let mut acc = 0.0;
            let start = probs.len();
            for &t in sft.successors(s) {
                if let Some(j) = local(t) {
                    let p = (log_weights[i] - rho_log).exp() * pv.right[j] / pv.right[i];
                    targets.push(j as u32);
                    probs.push(p);
                    acc += p;
                    cumulative.push(acc);
                }
            }
            // Row sums are 1 up to solver tolerance; renormalise for sampling.
            for c in &mut cumulative[start..] {
                *c /= acc;
            }
            let row_entropy: f64 = probs[start..].iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum();
            entropy += measure[i] * row_entropy;
            offsets.push(targets.len());
        }
        let integral = measure.iter().zip(&log_weights).map(|(m, w)| m * w).sum();
        Ok(Self {
            pressure: rho_log,
            blocks: Arc::clone(&phi.blocks),
            states,
            right: pv.right,
            left: pv.left,
            measure,
            log_weights,
            offsets,
            targets,
            probs,
            cumulative,
            entropy,
            integral,
        })
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }

    /// Measure-theoretic entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    /// Integral of the defining potential.
    pub fn potential_integral(&self) -> f64 {
        self.integral
    }

    pub fn blocks(&self) -> &Arc<BlockShift> {
        &self.blocks
    }

    pub fn level(&self) -> usize {
        self.blocks.level()
    }

    /// `(block index, mass)` for blocks in the support.
    pub fn block_masses(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.states.iter().zip(&self.measure).map(|(&s, &m)| (s as usize, m))
    }

    pub fn right_eigenvector(&self) -> &[f64] {
        &self.right
    }

    pub fn left_eigenvector(&self) -> &[f64] {
        &self.left
    }

    fn local(&self, block: &[u32]) -> Option<usize> {
        let b = self.blocks.index_of(block)?;
        self.states.binary_search(&(b as u32)).ok()
    }

    fn transition(&self, i: usize, j: usize) -> f64 {
        let row = &self.targets[self.offsets[i]..self.offsets[i + 1]];
        row.binary_search(&(j as u32)).map_or(0.0, |k| self.probs[self.offsets[i] + k])
    }

    /// Mass of the cylinder of a base word.
    pub fn cylinder_mass(&self, word: &[u32]) -> f64 {
        let l = self.level();
        if word.len() <= l {
            let range = self.blocks.prefix_range(word);
            let lo = self.states.partition_point(|&s| (s as usize) < range.start);
            let hi = self.states.partition_point(|&s| (s as usize) < range.end);
            return self.measure[lo..hi].iter().sum();
        }
        let Some(mut cur) = self.local(&word[..l]) else { return 0.0 };
        let mut mass = self.measure[cur];
        for i in 1..=word.len() - l {
            let Some(next) = self.local(&word[i..i + l]) else { return 0.0 };
            mass *= self.transition(cur, next);
            if mass == 0.0 {
                return 0.0;
            }
            cur = next;
        }
        mass
    }

    /// Integral of a potential whose level does not exceed this state's level.
    pub fn integrate(&self, f: &Potential) -> Result<f64> {
        let lf = f.level();
        if lf > self.level() {
            return Err(Error::LevelMismatch);
        }
        let mut total = 0.0;
        for (b, m) in self.block_masses() {
            let v = f.value_of(&self.blocks.block(b)[..lf]).ok_or(Error::LevelMismatch)?;
            total += m * v;
        }
        Ok(total)
    }

    /// `mu(Z) * exp(m P - S_m phi)` for a cylinder of length `m + level - 1`,
    /// where `S_m phi` sums the potential over the `m` blocks of `Z`.
    pub fn gibbs_ratio(&self, word: &[u32]) -> Option<f64> {
        let l = self.level();
        if word.len() < l {
            return None;
        }
        let m = word.len() - l + 1;
        let mut sum = 0.0;
        for i in 0..m {
            sum += self.log_weights[self.local(&word[i..i + l])?];
        }
        let mass = self.cylinder_mass(word);
        Some(mass * (m as f64 * self.pressure - sum).exp())
    }

    /// Smallest `c0` with `1/c0 <= gibbs_ratio(Z) <= c0` over supported cylinders of
    /// length `level..=max_len`.
    pub fn gibbs_constant(&self, max_len: usize) -> f64 {
        let l = self.level();
        let mut c0: f64 = 1.0;
        let mut stack: Vec<(Vec<u32>, usize)> = self.states.iter().enumerate().map(|(i, &s)| (self.blocks.block(s as usize).to_vec(), i)).collect();
        while let Some((word, last)) = stack.pop() {
            if let Some(r) = self.gibbs_ratio(&word) {
                if r > 0.0 {
                    c0 = c0.max(r).max(1.0 / r);
                }
            }
            if word.len() < max_len {
                for &j in &self.targets[self.offsets[last]..self.offsets[last + 1]] {
                    let mut next = word.clone();
                    next.push(self.blocks.block(self.states[j as usize] as usize)[l - 1]);
                    stack.push((next, j as usize));
                }
            }
        }
        c0
    }

    /// Samples a base-symbol path of length `len` from the stationary Markov chain,
    /// started from a block whose prefix is `prefix` (`|prefix| <= level`), chosen
    /// with probability proportional to its mass.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R, prefix: &[u32], len: usize) -> Result<Vec<u32>> {
        let l = self.level();
        if prefix.len() > l {
            return Err(Error::LevelMismatch);
        }
        let range = self.blocks.prefix_range(prefix);
        let lo = self.states.partition_point(|&s| (s as usize) < range.start);
        let hi = self.states.partition_point(|&s| (s as usize) < range.end);
        let total: f64 = self.measure[lo..hi].iter().sum();
        if !(total > 0.0) {
            return Err(Error::ZeroMassCylinder { mass: total });
        }
        let mut x = rng.random::<f64>() * total;
        let mut cur = hi - 1;
        for i in lo..hi {
            x -= self.measure[i];
            if x < 0.0 {
                cur = i;
                break;
            }
        }
        let mut path: Vec<u32> = self.blocks.block(self.states[cur] as usize).to_vec();
        while path.len() < len {
            let row = &self.cumulative[self.offsets[cur]..self.offsets[cur + 1]];
            let u = rng.random::<f64>();
            let k = row.partition_point(|&c| c <= u).min(row.len() - 1);
            cur = self.targets[self.offsets[cur] + k] as usize;
            path.push(self.blocks.block(self.states[cur] as usize)[l - 1]);
        }
        path.truncate(len);
        Ok(path)
    }

    /// `block,mass` rows over the support.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("block,mass\n");
        for (b, m) in self.block_masses() {
            writeln!(s, "{},{}", self.blocks.block_word(b), fmt_float(m)).unwrap();
        }
        s
    }
}

/// Masses `mu({w in [A] : t(w) >= n})` for `n = 1..=n_max` and the least-squares
/// slope of their logarithm.
#[derive(Clone, Debug)]
pub struct DecayTable {
    pub rows: Vec<(usize, f64)>,
    pub log_slope: f64,
}

pub fn hole_measure_decay(state: &EquilibriumState, base: &Sft, a: &Word, n_max: usize) -> Result<DecayTable> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mass_a = state.cylinder_mass(a.symbols());
    let by_time = return_masses(state, base, a, n_max)?;
    let mut rows = Vec::with_capacity(n_max);
    let mut remaining = mass_a;
    for n in 1..=n_max {
        if n >= 2 {
            remaining -= by_time[n - 1];
        }
        rows.push((n, remaining.max(0.0)));
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.1 > 0.0).map(|&(n, m)| (n as f64, m.ln())).collect();
    Ok(DecayTable { rows, log_slope: least_squares_slope(&pts) })
}

/// `by_time[t]` = mass of `{t(w) = t} ∩ [A]` for `1 <= t < t_max`.
fn return_masses(state: &EquilibriumState, base: &Sft, a: &Word, t_max: usize) -> Result<Vec<f64>> {
    let mut by_time = vec![0.0; t_max.max(2)];
    if t_max < 2 {
        return Ok(by_time);
    }
    let alpha = match induced_alphabet(base, a, t_max) {
        Ok(alpha) => alpha,
        Err(Error::EmptyAlphabet) => return Ok(by_time),
        Err(e) => return Err(e),
    };
    for e in alpha.entries() {
        let mut w = e.word.symbols().to_vec();
        w.extend_from_slice(a.symbols());
        by_time[e.return_time] += state.cylinder_mass(&w);
    }
    Ok(by_time)
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Kac's identity on a cylinder: `nu(A) * E_A[t] = 1`.
#[derive(Clone, Debug)]
pub struct KacReport {
    pub mass: f64,
    /// Truncated mean return time `sum_{t < t_max} t nu(t = t, A) / nu(A)`.
    pub mean_return: f64,
    pub product: f64,
    /// Conditional mass of returns at or after `t_max`, not included in the mean.
    pub tail_mass: f64,
}

pub fn kac_check(state: &EquilibriumState, base: &Sft, a: &Word, t_max: usize) -> Result<KacReport> {
    let mass = state.cylinder_mass(a.symbols());
    if mass < 1e-300 {
        return Err(Error::ZeroMassCylinder { mass });
    }
    let by_time = return_masses(state, base, a, t_max)?;
    let mean_return: f64 = by_time.iter().enumerate().map(|(t, m)| t as f64 * m).sum::<f64>() / mass;
    let captured: f64 = by_time.iter().sum();
    Ok(KacReport { mass, mean_return, product: mass * mean_return, tail_mass: ((mass - captured) / mass).max(0.0) })
}

/// Root `s >= 0` of `P(-s psi) = 0` for a strictly positive `psi`, by bisection on
/// `[0, ln(#alphabet) / min psi]`.
pub fn bowen_root(psi: &Potential) -> Result<f64> {
    let min_psi = psi.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_psi > 0.0) {
        return Err(Error::NotExpanding { min_slope: min_psi.exp() });
    }
    let solver = PerronSolver::new(psi.blocks.sft());
    let p = |s: f64| -> Result<f64> {
        let phi: Vec<f64> = psi.values.iter().map(|v| -s * v).collect();
        solver.log_spectral_radius(&phi)
    };
    let p0 = p(0.0)?;
    if p0 <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = (psi.base.alphabet_size() as f64).ln() / min_psi;
    while hi - lo > 1e-14 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid)? > 0.0 { lo = mid } else { hi = mid }
    }
    Ok(0.5 * (lo + hi))
}

/// An eventually periodic one-sided sequence `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub prefix: Vec<u32>,
    pub period: Vec<u32>,
}

impl EventuallyPeriodic {
    pub fn new(prefix: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("period must be nonempty".into()));
        }
        Ok(Self { prefix, period })
    }

    pub fn symbol(&self, i: usize) -> u32 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The `n`-prefixes of every shift of the sequence.
    pub fn orbit_prefixes(&self, n: usize) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = (0..self.prefix.len() + self.period.len())
            .map(|s| (s..s + n).map(|i| self.symbol(i)).collect())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// One row of a boundary-removal schedule.
#[derive(Clone, Debug)]
pub struct ScheduleRow {
    pub n: usize,
    pub holes: Vec<Word>,
    pub survivor_states: usize,
    /// `None` when the survivor is empty.
    pub dimension: Option<f64>,
}

/// For each `n` in `1..=n_max`, removes the `n`-cylinders around the orbits of the
/// boundary codes and computes the Bowen root of `psi` on the survivor.
pub fn boundary_removal_schedule(psi: &Potential, boundary: &[EventuallyPeriodic], n_max: usize) -> Result<Vec<ScheduleRow>> {
    let q = psi.base.alphabet_size();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut holes: Vec<Word> = Vec::new();
        for code in boundary {
            for p in code.orbit_prefixes(n) {
                let w = Word::new(p, q)?;
                if psi.base.is_admissible(w.symbols()) && !holes.contains(&w) {
                    holes.push(w);
                }
            }
        }
        let restricted = psi.with_holes(&holes)?;
        let dimension = match bowen_root(&restricted) {
            Ok(s) => Some(s),
            Err(Error::EmptySurvivor) => None,
            Err(e) => return Err(e),
        };
        rows.push(ScheduleRow { n, holes, survivor_states: restricted.blocks.len(), dimension });
    }
    Ok(rows)
}
