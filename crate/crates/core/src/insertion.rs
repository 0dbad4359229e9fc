//! Growth sequences `(l_k)` and the marker insertion map `g`.
//!
//! For a source word `w` over an inner alphabet, `g(w)` starts with a marker `m`
//! followed by `w`; at stage `k` the block `w_1 .. w_k y_k` (letters of the current
//! word) is inserted after position `l_k`. Every image then satisfies
//! `R_k(g(w)) = l_k` for all `k >= n0`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::symbolic::repetition_times_of;

/// Lower envelope imposed on a growth sequence, standing in for the asymptotic
/// requirement `l_k / k^2 -> infinity`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthFloor {
    /// `l_k >= k^3`.
    #[default]
    Cubic,
    /// `l_k >= ceil(k^2 ln k)`; slower, so small log-rates are visible at short horizons.
    QuadLog,
}

impl GrowthFloor {
    pub fn at(self, k: usize) -> u128 {
        let k64 = k as u128;
        match self {
            GrowthFloor::Cubic => k64.saturating_pow(3),
            GrowthFloor::QuadLog => ((k as f64).powi(2) * (k as f64).ln()).ceil().max(0.0) as u128,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllSequence {
    n0: usize,
    values: Vec<u128>,
    floor: GrowthFloor,
    target_lower: f64,
    target_upper: f64,
}

impl EllSequence {
    /// Validates `values = [l_{n0}, l_{n0+1}, ...]` against growth condition
    /// `l_{k+1} >= l_k + 2k`, the floor, and `l_{n0} >= n0 + 1`.
    pub fn new(n0: usize, values: Vec<u128>, floor: GrowthFloor) -> Result<Self> {
        if n0 < 1 {
            return Err(Error::InvalidArgument("n0 must be at least 1".into()));
        }
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty sequence".into()));
        }
        if values[0] < n0 as u128 + 1 {
            return Err(Error::InvalidArgument(format!("l_{n0} = {} is below n0 + 1", values[0])));
        }
        for (i, &v) in values.iter().enumerate() {
            let k = n0 + i;
            if v < floor.at(k) {
                return Err(Error::InvalidArgument(format!("l_{k} = {v} is below the growth floor")));
            }
            if i > 0 && v < values[i - 1] + 2 * (k as u128 - 1) {
                return Err(Error::InvalidArgument(format!("l_{k} = {v} violates l_k >= l_(k-1) + 2(k-1)")));
            }
        }
        let rates: Vec<f64> = values.iter().enumerate().map(|(i, &v)| (v as f64).ln() / (n0 + i) as f64).collect();
        let (lo, hi) = tail_extremes(&rates);
        Ok(Self { n0, values, floor, target_lower: lo, target_upper: hi })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Largest index `K`.
    pub fn last_index(&self) -> usize {
        self.n0 + self.values.len() - 1
    }

    pub fn values(&self) -> &[u128] {
        &self.values
    }

    pub fn floor(&self) -> GrowthFloor {
        self.floor
    }

    pub fn target_lower(&self) -> f64 {
        self.target_lower
    }

    pub fn target_upper(&self) -> f64 {
        self.target_upper
    }

    pub fn get(&self, k: usize) -> Option<u128> {
        k.checked_sub(self.n0).and_then(|i| self.values.get(i).copied())
    }

    /// `(k, l_k)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u128)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.n0 + i, v))
    }

    /// `(k, ln l_k / k)` pairs.
    pub fn log_rates(&self) -> Vec<(usize, f64)> {
        self.iter().map(|(k, v)| (k, (v as f64).ln() / k as f64)).collect()
    }

    /// Minimum and maximum of `ln l_k / k` over the last half of the indices.
    pub fn tail_rates(&self) -> (f64, f64) {
        let r: Vec<f64> = self.log_rates().into_iter().map(|(_, x)| x).collect();
        tail_extremes(&r)
    }

    /// Restriction to indices `<= k_max`.
    pub fn truncated(&self, k_max: usize) -> Result<Self> {
        if k_max < self.n0 {
            return Err(Error::InvalidArgument("truncation below n0".into()));
        }
        let mut out = self.clone();
        out.values.truncate(k_max - self.n0 + 1);
        Ok(out)
    }

    /// Largest `k` with `l_k + k <= horizon`.
    pub fn max_index_within(&self, horizon: u128) -> Option<usize> {
        self.iter().take_while(|&(k, v)| v.saturating_add(k as u128) <= horizon).map(|(k, _)| k).last()
    }

    /// Stage `p` with `l_p <= pos < l_{p+1}`, if `pos >= l_{n0}`.
    pub fn stage_of(&self, pos: u128) -> Option<usize> {
        let i = self.values.partition_point(|&v| v <= pos);
        (i > 0).then(|| self.n0 + i - 1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,ell\n");
        for (k, v) in self.iter() {
            writeln!(s, "{k},{v}").unwrap();
        }
        s
    }

    pub fn from_csv(text: &str, floor: GrowthFloor) -> Result<Self> {
        let mut n0 = None;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('k')) {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected `k,ell`", lineno + 1));
            let (k, v) = line.split_once(',').ok_or_else(bad)?;
            let k: usize = k.trim().parse().map_err(|_| bad())?;
            let v: u128 = v.trim().parse().map_err(|_| bad())?;
            let start = *n0.get_or_insert(k);
            if k != start + values.len() {
                return Err(Error::Parse(format!("line {}: indices must be consecutive", lineno + 1)));
            }
            values.push(v);
        }
        Self::new(n0.ok_or_else(|| Error::Parse("no rows".into()))?, values, floor)
    }
}

fn tail_extremes(rates: &[f64]) -> (f64, f64) {
    let tail = &rates[rates.len() / 2..];
    (tail.iter().cloned().fold(f64::INFINITY, f64::min), tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// `ceil(exp(x))`, snapping to the nearest integer when within rounding error.
fn ceil_exp(x: f64, index: usize) -> Result<u128> {
    let v = x.exp();
    if !v.is_finite() || v >= u128::MAX as f64 {
        return Err(Error::Overflow { index });
    }
    let r = v.round();
    Ok(if (v - r).abs() <= 1e-9 * v.max(1.0) { r as u128 } else { v.ceil() as u128 })
}

/// Builds `l_{n0}, ..., l_K` with `liminf ln l_k / k = alpha` and
/// `limsup ln l_k / k = beta` (`beta` may be infinite), using the cubic floor.
pub fn build_ell_sequence(alpha: f64, beta: f64, k_max: usize, n0: usize) -> Result<EllSequence> {
    build_ell_sequence_with(alpha, beta, k_max, n0, GrowthFloor::Cubic)
}

/// As [`build_ell_sequence`] with a chosen floor.
///
/// The sequence stalls (`l_{k+1} = max(l_k + 2k, floor, e^{alpha (k+1)})`) until
/// `ln l_k / k` has come down to `alpha` (to twice the floor's rate when `alpha = 0`),
/// then jumps to `e^{beta (k+1)}` (to `(k+1)^(k+1)` when `beta` is infinite, so the
/// jump rates `ln(k+1)` are unbounded). The final step is always a jump so the upper
/// target is visible within the horizon.
pub fn build_ell_sequence_with(alpha: f64, beta: f64, k_max: usize, n0: usize, floor: GrowthFloor) -> Result<EllSequence> {
    if !(alpha >= 0.0) || alpha.is_infinite() || !(beta >= alpha) {
        return Err(Error::InfeasibleTarget(format!("need 0 <= alpha <= beta, alpha finite; got ({alpha}, {beta})")));
    }
    if n0 < 2 || k_max <= n0 {
        return Err(Error::InfeasibleTarget(format!("need K > n0 >= 2; got K = {k_max}, n0 = {n0}")));
    }
    let oscillating = beta > alpha;
    if oscillating && k_max < n0 + 2 {
        return Err(Error::InfeasibleTarget("horizon too short for one oscillation".into()));
    }
    let mut values = Vec::with_capacity(k_max - n0 + 1);
    let first = floor.at(n0).max(n0 as u128 + 1).max(ceil_exp(alpha * n0 as f64, n0)?);
    values.push(first);
    for k in n0..k_max {
        let cur = *values.last().unwrap();
        let next = k + 1;
        let stall = cur
            .checked_add(2 * k as u128)
            .ok_or(Error::Overflow { index: next })?
            .max(floor.at(next))
            .max(ceil_exp(alpha * next as f64, next)?);
        let rate = (cur as f64).ln() / k as f64;
        // A zero target is only approached at the floor's own pace.
        let threshold = if alpha > 0.0 { alpha * (1.0 + 1e-12) } else { 2.0 * (floor.at(k) as f64).ln() / k as f64 };
        let jump = oscillating && (rate <= threshold || next == k_max);
        let value = if jump {
            let high = if beta.is_infinite() {
                (next as u128).checked_pow(next as u32).ok_or(Error::Overflow { index: next })?
            } else {
                ceil_exp(beta * next as f64, next)?
            };
            stall.max(high)
        } else {
            stall
        };
        values.push(value);
    }
    let mut seq = EllSequence::new(n0, values, floor)?;
    seq.target_lower = alpha;
    seq.target_upper = beta;
    Ok(seq)
}

/// Alphabets and distinguished letters for the insertion map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionSpec {
    inner: Vec<u32>,
    outer: Vec<u32>,
    marker: u32,
    c: u32,
    c_bar: u32,
}

impl InsertionSpec {
    pub fn new(inner: Vec<u32>, outer: Vec<u32>, marker: u32, c: u32, c_bar: u32) -> Result<Self> {
        let mut inner = inner;
        let mut outer = outer;
        inner.sort_unstable();
        inner.dedup();
        outer.sort_unstable();
        outer.dedup();
        let has = |set: &[u32], x: u32| set.binary_search(&x).is_ok();
        if outer.len() < 3 {
            return Err(Error::InvalidArgument("outer alphabet needs at least 3 letters".into()));
        }
        if inner.is_empty() || !inner.iter().all(|&x| has(&outer, x)) || inner.len() == outer.len() {
            return Err(Error::InvalidArgument("inner alphabet must be a nonempty proper subset of the outer".into()));
        }
        if !has(&outer, marker) || has(&inner, marker) {
            return Err(Error::InvalidArgument("marker must lie in outer minus inner".into()));
        }
        if c == c_bar || c == marker || c_bar == marker || !has(&outer, c) || !has(&outer, c_bar) {
            return Err(Error::InvalidArgument("c and c_bar must be distinct outer letters other than the marker".into()));
        }
        Ok(Self { inner, outer, marker, c, c_bar })
    }

    /// Inner alphabet `0..q`, marker `q`, `c = 0`, `c_bar = 1`.
    pub fn standard(q: usize) -> Result<Self> {
        let q32 = q as u32;
        Self::new((0..q32).collect(), (0..=q32).collect(), q32, 0, 1.min(q32))
    }

    pub fn inner(&self) -> &[u32] {
        &self.inner
    }

    pub fn outer(&self) -> &[u32] {
        &self.outer
    }

    pub fn marker(&self) -> u32 {
        self.marker
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn c_bar(&self) -> u32 {
        self.c_bar
    }
}

/// How the closing letter `y_k` of each inserted block is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClosingRule {
    /// `y_k = c` unless the letter at position `k + 1` is `c`, then `c_bar`.
    #[default]
    Alternate,
    /// Always `c`. Breaks the repetition identity; used as a control.
    AlwaysC,
}

/// Output of the insertion map with per-letter provenance.
#[derive(Clone, Debug)]
pub struct Inserted {
    pub letters: Vec<u32>,
    /// `true` where the letter was copied from the source.
    pub from_source: Vec<bool>,
    /// Source letters consumed.
    pub consumed: usize,
    /// Stages `k` whose block was emitted within the horizon.
    pub stages: Vec<usize>,
}

impl Inserted {
    /// Number of non-source letters among the first `len` positions.
    pub fn inserted_within(&self, len: usize) -> usize {
        self.from_source[..len.min(self.from_source.len())].iter().filter(|&&s| !s).count()
    }
}

/// Number of source letters needed to fill `horizon` output letters.
pub fn required_source_len(ell: &EllSequence, horizon: usize) -> usize {
    let mut inserted = 1usize;
    for (k, l) in ell.iter() {
        if l as usize >= horizon {
            break;
        }
        inserted += k + 1;
    }
    horizon.saturating_sub(inserted)
}

/// First `horizon` letters of `g(w)`.
pub fn insert(w: &[u32], spec: &InsertionSpec, ell: &EllSequence, horizon: usize) -> Result<Vec<u32>> {
    Ok(insert_with(w, spec, ell, horizon, ClosingRule::Alternate)?.letters)
}

pub fn insert_with(w: &[u32], spec: &InsertionSpec, ell: &EllSequence, horizon: usize, rule: ClosingRule) -> Result<Inserted> {
    if let Some(&bad) = w.iter().find(|&&x| spec.inner.binary_search(&x).is_err()) {
        return Err(Error::InvalidArgument(format!("source letter {bad} is not in the inner alphabet")));
    }
    let needed = required_source_len(ell, horizon);
    if w.len() < needed {
        return Err(Error::HorizonTooShort { needed, available: w.len() });
    }
    let mut letters = Vec::with_capacity(horizon + ell.last_index() + 1);
    let mut from_source = Vec::with_capacity(letters.capacity());
    letters.push(spec.marker);
    from_source.push(false);
    let mut src = 0usize;
    let mut stages = Vec::new();
    for (k, l) in ell.iter() {
        let l = l as usize;
        if l >= horizon {
            break;
        }
        let take = l - letters.len();
        letters.extend_from_slice(&w[src..src + take]);
        from_source.extend(std::iter::repeat_n(true, take));
        src += take;
        let y = match rule {
            ClosingRule::Alternate if letters[k] == spec.c => spec.c_bar,
            _ => spec.c,
        };
        letters.extend_from_within(..k);
        letters.push(y);
        from_source.extend(std::iter::repeat_n(false, k + 1));
        stages.push(k);
    }
    if letters.len() < horizon {
        let take = horizon - letters.len();
        letters.extend_from_slice(&w[src..src + take]);
        from_source.extend(std::iter::repeat_n(true, take));
        src += take;
    }
    letters.truncate(horizon);
    from_source.truncate(horizon);
    Ok(Inserted { letters, from_source, consumed: src, stages })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    /// `(k, R_k(g(w)), l_k)` for each checked `k`.
    pub checked: Vec<(usize, Option<usize>, u128)>,
    /// Indices `k` where the identity fails.
    pub violations: Vec<usize>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `R_k(g(w)) = l_k` for `k` in `k_lo..=k_hi`.
pub fn verify_lemma_g(w: &[u32], spec: &InsertionSpec, ell: &EllSequence, k_lo: usize, k_hi: usize) -> Result<LemmaReport> {
    verify_lemma_g_with(w, spec, ell, k_lo, k_hi, ClosingRule::Alternate)
}

pub fn verify_lemma_g_with(
    w: &[u32],
    spec: &InsertionSpec,
    ell: &EllSequence,
    k_lo: usize,
    k_hi: usize,
    rule: ClosingRule,
) -> Result<LemmaReport> {
    if k_lo < ell.n0() || k_hi > ell.last_index() || k_lo > k_hi {
        return Err(Error::InvalidArgument(format!(
            "k range {k_lo}..={k_hi} outside {}..={}",
            ell.n0(),
            ell.last_index()
        )));
    }
    let horizon = ell.get(k_hi).unwrap() as usize + k_hi + 1;
    let g = insert_with(w, spec, ell, horizon, rule)?;
    Ok(check_repetition_identity(&g.letters, ell, k_lo, k_hi))
}

/// Compares repetition times of `seq` against `l_k` for `k` in `k_lo..=k_hi`.
pub fn check_repetition_identity<T: Eq>(seq: &[T], ell: &EllSequence, k_lo: usize, k_hi: usize) -> LemmaReport {
    let times = repetition_times_of(seq);
    let mut checked = Vec::new();
    let mut violations = Vec::new();
    for k in k_lo..=k_hi {
        let want = ell.get(k).unwrap();
        let got = times.get(k).copied().flatten();
        if got != Some(want as usize) {
            violations.push(k);
        }
        checked.push((k, got, want));
    }
    LemmaReport { checked, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_rates_give_cubes() {
        let ell = build_ell_sequence(0.0, 0.0, 50, 2).unwrap();
        let cubes: Vec<u128> = (2..=50u128).map(|k| k * k * k).collect();
        assert_eq!(ell.values(), &cubes[..]);
    }

    #[test]
    fn log2_rates_give_powers() {
        let ell = build_ell_sequence(2f64.ln(), 2f64.ln(), 40, 2).unwrap();
        for (k, v) in ell.iter() {
            assert_eq!(v, (1u128 << k).max((k as u128).pow(3)), "k = {k}");
        }
    }

    #[test]
    fn oscillating_rates() {
        for (k_max, tol) in [(30, 0.1), (60, 0.05)] {
            let ell = build_ell_sequence(0.3, 0.9, k_max, 2).unwrap();
            let (lo, hi) = ell.tail_rates();
            assert!((lo - 0.3).abs() < tol && (hi - 0.9).abs() < tol, "K = {k_max}: {lo} {hi}");
        }
    }

    #[test]
    fn infinite_upper_rate() {
        let ell = build_ell_sequence(0.0, f64::INFINITY, 12, 2).unwrap();
        let (_, hi) = ell.tail_rates();
        assert!(hi > 2.0);
        assert!(matches!(build_ell_sequence(0.0, 5.0, 40, 2), Err(Error::Overflow { .. })));
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(matches!(build_ell_sequence(0.5, 0.3, 20, 2), Err(Error::InfeasibleTarget(_))));
        assert!(matches!(build_ell_sequence(0.1, 0.3, 3, 2), Err(Error::InfeasibleTarget(_))));
        assert!(matches!(build_ell_sequence(0.1, 0.3, 10, 1), Err(Error::InfeasibleTarget(_))));
    }

    #[test]
    fn validation() {
        assert!(EllSequence::new(2, vec![9, 13], GrowthFloor::QuadLog).is_ok());
        assert!(EllSequence::new(2, vec![9, 12], GrowthFloor::QuadLog).is_err());
        assert!(EllSequence::new(2, vec![7, 30], GrowthFloor::Cubic).is_err());
        assert!(EllSequence::new(2, vec![3, 10, 23], GrowthFloor::QuadLog).is_ok());
        let ell = build_ell_sequence(0.2, 0.6, 20, 2).unwrap();
        let back = EllSequence::from_csv(&ell.to_csv(), GrowthFloor::Cubic).unwrap();
        assert_eq!(back.values(), ell.values());
    }

    #[test]
    fn hand_executed_example() {
        // inner {0}, marker m = 1, c = 2 ('x'), c_bar = 3 ('y'); l_2 = 9, l_3 = 13.
        let spec = InsertionSpec::new(vec![0], vec![0, 1, 2, 3], 1, 2, 3).unwrap();
        let ell = EllSequence::new(2, vec![9, 13, 64], GrowthFloor::QuadLog).unwrap();
        let out = insert(&[0; 100], &spec, &ell, 20).unwrap();
        // m00000000 | m0x | 0 | m00y | ...
        assert_eq!(out, [1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 2, 0, 1, 0, 0, 2, 0, 0, 0]);
    }

    #[test]
    fn marker_positions_and_stability() {
        let spec = InsertionSpec::standard(3).unwrap();
        let ell = build_ell_sequence(0.0, 0.0, 12, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w: Vec<u32> = (0..5000).map(|_| rng.random_range(0..3)).collect();
        let l3 = ell.get(3).unwrap() as usize;
        let l4 = ell.get(4).unwrap() as usize;
        let a = insert(&w, &spec, &ell, l3).unwrap();
        let b = insert(&w, &spec, &ell, l4).unwrap();
        let c = insert(&w, &spec, &ell, 1500).unwrap();
        assert_eq!(a[..], b[..l3]);
        assert_eq!(b[..], c[..l4]);
        let markers: Vec<usize> = c.iter().enumerate().filter(|(_, &x)| x == 3).map(|(i, _)| i + 1).collect();
        // Stage k copies the markers found among the first k positions to l_k + j.
        let mut expected = vec![1];
        for (k, l) in ell.iter().filter(|&(_, l)| (l as usize) < 1500) {
            let copies: Vec<usize> = expected.iter().filter(|&&j| j <= k).map(|&j| l as usize + j).collect();
            expected.extend(copies);
        }
        expected.retain(|&j| j <= 1500);
        assert_eq!(markers, expected);
    }

    #[test]
    fn source_too_short() {
        let spec = InsertionSpec::standard(2).unwrap();
        let ell = build_ell_sequence(0.0, 0.0, 10, 2).unwrap();
        let needed = required_source_len(&ell, 500);
        assert!(insert(&vec![0; needed], &spec, &ell, 500).is_ok());
        assert_eq!(
            insert(&vec![0; needed - 1], &spec, &ell, 500).unwrap_err(),
            Error::HorizonTooShort { needed, available: needed - 1 }
        );
    }

    #[test]
    fn spec_validation() {
        assert!(InsertionSpec::new(vec![0, 1], vec![0, 1], 1, 0, 1).is_err());
        assert!(InsertionSpec::new(vec![0], vec![0, 1, 2], 2, 2, 0).is_err());
        assert!(InsertionSpec::new(vec![0], vec![0, 1, 2], 1, 0, 2).is_ok());
    }

    #[test]
    fn constant_word_power_sequence() {
        let spec = InsertionSpec::standard(3).unwrap();
        let ell = build_ell_sequence(2f64.ln(), 2f64.ln(), 15, 2).unwrap();
        let w = vec![0; 1 << 16];
        assert!(verify_lemma_g(&w, &spec, &ell, 2, 15).unwrap().holds());
    }

    #[test]
    fn mutation_breaks_identity() {
        // With c inside the inner alphabet, always closing with c can recreate the
        // leading block one step early.
        let spec = InsertionSpec::standard(3).unwrap();
        let ell = build_ell_sequence(0.0, 0.0, 12, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut broken = 0;
        for _ in 0..50 {
            let w: Vec<u32> = (0..3000).map(|_| rng.random_range(0..3)).collect();
            assert!(verify_lemma_g(&w, &spec, &ell, 2, 12).unwrap().holds());
            if !verify_lemma_g_with(&w, &spec, &ell, 2, 12, ClosingRule::AlwaysC).unwrap().holds() {
                broken += 1;
            }
        }
        assert!(broken > 0);
    }

    proptest! {
        #[test]
        fn lemma_holds_for_random_inputs(
            q in 2usize..=5,
            alpha in 0.0f64..0.6,
            spread in 0.0f64..0.6,
            seed in any::<u64>(),
        ) {
            let spec = InsertionSpec::standard(q).unwrap();
            let ell = build_ell_sequence(alpha, alpha + spread, 14, 2).unwrap();
            let k_hi = ell.max_index_within(20_000).unwrap();
            let horizon = ell.get(k_hi).unwrap() as usize + k_hi + 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w: Vec<u32> = (0..horizon).map(|_| rng.random_range(0..q as u32)).collect();
            let report = verify_lemma_g(&w, &spec, &ell, 2, k_hi).unwrap();
            prop_assert!(report.holds(), "{:?}", report.violations);
        }

        #[test]
        fn letter_budget(seed in any::<u64>(), p in 3usize..10) {
            let spec = InsertionSpec::standard(2).unwrap();
            let ell = build_ell_sequence(0.0, 0.0, 12, 2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w: Vec<u32> = (0..3000).map(|_| rng.random_range(0..2)).collect();
            let g = insert_with(&w, &spec, &ell, 2000, ClosingRule::Alternate).unwrap();
            let lp = ell.get(p).unwrap() as usize;
            let bound: usize = (ell.n0() + 1..=p + 1).sum();
            prop_assert!(g.inserted_within(lp) <= bound);
            // Source letters appear in order.
            let copied: Vec<u32> = g.letters.iter().zip(&g.from_source).filter(|(_, &s)| s).map(|(&x, _)| x).collect();
            prop_assert_eq!(&copied[..], &w[..copied.len()]);
        }
    }
}
