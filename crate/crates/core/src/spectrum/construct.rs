use crate::error::{Error, Result};
use crate::geometry::MarkovExpandingMap;
use crate::insertion::{
    build_ell_sequence_with, check_repetition_identity, insert_with, ClosingRule, EllSequence, GrowthFloor, InsertionSpec,
    LemmaReport,
};
use crate::symbolic::{repetition_times_of, Word};

use super::estimate::{compare_routes, RecurrenceEstimate, RouteComparison};
use super::source::{build_source, sample_source_point, SourceConfig, SourceSample};

/// Largest number of base symbols a constructed point may have.
pub const MAX_HORIZON: usize = 10_000_000;

/// Tunables for [`construct_e_point_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructOptions {
    pub n0: usize,
    pub floor: GrowthFloor,
    pub birkhoff_tolerance: f64,
    /// Finest base scale examined by the geometric diagnostic; the comparison window is
    /// the last half of the accessible base scales below this.
    pub geometric_depth: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self { n0: 2, floor: GrowthFloor::QuadLog, birkhoff_tolerance: 0.01, geometric_depth: 45 }
    }
}

/// `|hat S_k t(g w) - hat S_k t(w)| <= k eps_k n` over the checked range.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationReport {
    pub k_min: usize,
    pub k_max: usize,
    pub violations: Vec<usize>,
    /// Largest `|difference| / (k eps_k n)`.
    pub worst_ratio: f64,
}

impl PerturbationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A constructed point of `E(alpha, beta)` and everything measured on it.
#[derive(Clone, Debug)]
pub struct ConstructedPoint {
    pub alpha: f64,
    pub beta: f64,
    pub source: SourceConfig,
    pub sample: SourceSample,
    pub spec: InsertionSpec,
    pub marker_word: Word,
    /// Rates fed to the `l`-sequence, `alpha lambda_n hat nu_n(t)` and the same for `beta`.
    pub ell_rates: (f64, f64),
    pub ell: EllSequence,
    /// `g(w)` over the source letters.
    pub induced: Vec<u32>,
    /// `g(w)` flattened to base symbols.
    pub base: Vec<u32>,
    /// Midpoint of the hull of the coding prefix.
    pub point: f64,
    /// `R_k = l_k` on the induced sequence re-parsed from `base`.
    pub identity: LemmaReport,
    pub perturbation: PerturbationReport,
    /// `ln hat R_k / (lambda_n hat nu_n(t) k)` for `k` up to the last accessible index.
    pub symbolic: RecurrenceEstimate,
    /// `ln R_h / S_h psi` on the base word, `h` up to `hat S_K t`.
    pub base_symbolic: RecurrenceEstimate,
    pub routes: RouteComparison,
}

pub fn construct_e_point(map: &MarkovExpandingMap, alpha: f64, beta: f64, n: usize, horizon: usize, seed: u64) -> Result<ConstructedPoint> {
    let opts = ConstructOptions::default();
    let source = build_source(map, n, opts.birkhoff_tolerance)?;
    construct_e_point_with(map, &source, alpha, beta, horizon, seed, &opts)
}

/// Builds `g(w)` for a source sample `w` so that `ln hat R_k / k` oscillates between
/// `alpha lambda_n hat nu_n(t)` and `beta lambda_n hat nu_n(t)`, with `horizon` base symbols.
pub fn construct_e_point_with(
    map: &MarkovExpandingMap,
    source: &SourceConfig,
    alpha: f64,
    beta: f64,
    horizon: usize,
    seed: u64,
    opts: &ConstructOptions,
) -> Result<ConstructedPoint> {
    if !(alpha >= 0.0) || !(beta >= alpha) {
        return Err(Error::InfeasibleTarget(format!("need 0 <= alpha <= beta; got ({alpha}, {beta})")));
    }
    if horizon > MAX_HORIZON {
        return Err(Error::InvalidArgument(format!("horizon {horizon} exceeds {MAX_HORIZON}")));
    }
    let scale = source.lambda * source.mean_return;
    let rates = (alpha * scale, if beta.is_infinite() { f64::INFINITY } else { beta * scale });
    let len = (horizon as f64 / source.mean_return) as usize;
    let ell = fit_ell(rates, len, opts)?;
    let k_last = ell.last_index();

    let (spec, marker_word) = insertion_letters(source)?;
    let sample = sample_source_point(source, len, seed)?;
    let g = insert_with(&sample.letters, &spec, &ell, len, ClosingRule::Alternate)?;
    let letters = &source.letters;
    let idx: Vec<usize> = g.letters.iter().map(|&l| l as usize).collect();
    let base = letters.flatten(&idx);

    let mut closed = base.clone();
    closed.extend_from_slice(source.a.symbols());
    let (reparsed, _) = letters.parse(&closed);
    if reparsed != idx {
        return Err(Error::InadmissibleWord("flattened point does not re-parse into its letters".into()));
    }
    let identity = check_repetition_identity(&reparsed, &ell, opts.n0, k_last);

    let perturbation = perturbation_check(source, &ell, &g.letters, &sample.letters);

    let rep = repetition_times_of(&reparsed);
    let samples: Vec<(f64, f64)> = (opts.n0..=k_last)
        .filter_map(|k| rep[k].map(|r| (k as f64, (r as f64).ln() / (scale * k as f64))))
        .collect();
    let symbolic = RecurrenceEstimate::from_samples(samples, Vec::new())?;

    let orbit = map.shadow_orbit(&base)?;
    let logd = map.log_derivatives(&orbit, &base);
    let h_last: usize = idx[..k_last].iter().map(|&l| letters.return_time(l)).sum();
    let h_first: usize = idx[..opts.n0].iter().map(|&l| letters.return_time(l)).sum();
    let base_symbolic = super::estimate::symbolic_estimate(&base, &logd, h_first.max(1), h_last)?;
    let h_top = h_last.min(opts.geometric_depth);
    let routes = compare_routes(&base, &orbit, &logd, h_top / 2, h_top)?;

    let depth = base.len().min(60);
    let [lo, hi] = map.hull(&base[..depth])?;
    Ok(ConstructedPoint {
        alpha,
        beta,
        source: source.clone(),
        sample,
        spec,
        marker_word,
        ell_rates: rates,
        ell,
        induced: g.letters,
        base,
        point: 0.5 * (lo + hi),
        identity,
        perturbation,
        symbolic,
        base_symbolic,
        routes,
    })
}

/// The longest `l`-sequence whose last inserted block fits in `len` letters.
fn fit_ell(rates: (f64, f64), len: usize, opts: &ConstructOptions) -> Result<EllSequence> {
    let mut best = None;
    let mut needed = 0;
    for k in opts.n0 + 2.. {
        let ell = match build_ell_sequence_with(rates.0, rates.1, k, opts.n0, opts.floor) {
            Ok(e) => e,
            Err(Error::Overflow { .. }) => break,
            Err(e) => return Err(e),
        };
        let end = ell.get(k).unwrap() + k as u128 + 1;
        if end > len as u128 {
            needed = end.min(usize::MAX as u128) as usize;
            break;
        }
        best = Some(ell);
    }
    best.ok_or(Error::HorizonTooShort { needed, available: len })
}

/// Inner letters `t < n`, the marker (smallest letter with `t >= n`) and the two
/// smallest remaining letters as `c`, `c_bar`.
fn insertion_letters(source: &SourceConfig) -> Result<(InsertionSpec, Word)> {
    let letters = &source.letters;
    let all: Vec<u32> = (0..letters.len() as u32).collect();
    let marker = all
        .iter()
        .copied()
        .find(|&l| letters.return_time(l as usize) >= source.n)
        .ok_or(Error::EmptyAlphabet)?;
    let mut others = all.iter().copied().filter(|&l| l != marker);
    let (Some(c), Some(c_bar)) = (others.next(), others.next()) else {
        return Err(Error::EmptyAlphabet);
    };
    let spec = InsertionSpec::new(source.inner_letters(), all, marker, c, c_bar)?;
    Ok((spec, letters.entries()[marker as usize].word.clone()))
}

fn perturbation_check(source: &SourceConfig, ell: &EllSequence, g: &[u32], w: &[u32]) -> PerturbationReport {
    let t = |l: u32| source.letters.return_time(l as usize) as f64;
    let k_min = ell.get(ell.n0()).unwrap() as usize;
    let k_max = g.len().min(w.len());
    let values = ell.values();
    let mut violations = Vec::new();
    let mut worst = 0.0f64;
    let (mut sg, mut sw) = (0.0, 0.0);
    let mut p_idx = 0;
    for k in 1..=k_max {
        sg += t(g[k - 1]);
        sw += t(w[k - 1]);
        if k < k_min {
            continue;
        }
        while p_idx + 1 < values.len() && values[p_idx + 1] as usize <= k {
            p_idx += 1;
        }
        let p = ell.n0() + p_idx;
        let eps = ((p + 2) * (p + 2)) as f64 / values[p_idx] as f64;
        let bound = k as f64 * eps * source.n as f64;
        let ratio = (sg - sw).abs() / bound;
        worst = worst.max(ratio);
        if ratio > 1.0 {
            violations.push(k);
        }
    }
    PerturbationReport { k_min, k_max, violations, worst_ratio: worst }
}
