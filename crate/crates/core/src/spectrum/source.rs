use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::MarkovExpandingMap;
use crate::symbolic::{choose_branching_symbol, find_connecting_paths, induced_alphabet, ReturnAlphabet, Sft, Word};
use crate::thermo::{bowen_root, equilibrium_state, kac_check, EquilibriumState, KacReport, Potential};

/// The equilibrium source on the survivor of `H_n = {w in [A] : t(w) >= n}`.
#[derive(Clone, Debug)]
pub struct SourceConfig {
    pub n: usize,
    pub a: Word,
    /// Block level of the survivor presentation, `n - 1 + |A|`.
    pub level: usize,
    /// Bowen dimension of the full repeller at this level.
    pub full_dimension: f64,
    /// `log |Df|` at this level, on the full shift.
    pub psi: Potential,
    /// `-full_dimension * psi` restricted to the survivor.
    pub phi: Potential,
    pub hole_count: usize,
    pub nu: EquilibriumState,
    /// `P(phi | survivor)`; at most 0.
    pub pressure: f64,
    pub mass_a: f64,
    /// `lambda_n = integral of psi`.
    pub lambda: f64,
    /// Mean induced return time `hat nu_n(t)`.
    pub mean_return: f64,
    pub kac: KacReport,
    pub entropy: f64,
    /// `h / lambda`.
    pub source_dimension: f64,
    pub birkhoff_tolerance: f64,
    /// Return words with `t <= n`, sorted by return time then lexicographically.
    pub letters: ReturnAlphabet,
}

impl SourceConfig {
    pub fn sft(&self) -> &Sft {
        self.psi.base()
    }

    /// `dim Λ + P / lambda`, which equals `source_dimension` for an equilibrium state.
    pub fn dimension_identity(&self) -> f64 {
        self.full_dimension + self.pressure / self.lambda
    }

    /// Letters of return time below `n`.
    pub fn inner_letters(&self) -> Vec<u32> {
        (0..self.letters.len() as u32).filter(|&i| self.letters.return_time(i as usize) < self.n).collect()
    }
}

/// Base cylinder `A = aB` built from the smallest branching symbol.
pub fn default_base_cylinder(sft: &Sft) -> Result<Word> {
    let a = choose_branching_symbol(sft)?;
    Ok(find_connecting_paths(sft, a)?.0)
}

/// The `L`-words (`L = n - 1 + |A|`) starting with `A` whose next occurrence of `A`
/// is at shift `n` or later.
pub fn long_return_holes(sft: &Sft, a: &Word, n: usize) -> Result<Vec<Word>> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    sft.check_word(a)?;
    let m = a.len();
    let level = n - 1 + m;
    let q = sft.alphabet_size();
    let mut holes = Vec::new();
    let mut buf = a.symbols().to_vec();
    sft.extend_words(&mut buf, level, &mut |w| {
        if (1..n).all(|s| w[s..s + m] != *a.symbols()) {
            holes.push(Word::new(w.to_vec(), q).unwrap());
        }
    });
    Ok(holes)
}

pub fn build_source(map: &MarkovExpandingMap, n: usize, birkhoff_tolerance: f64) -> Result<SourceConfig> {
    let a = default_base_cylinder(map.sft())?;
    build_source_with(map, &a, n, birkhoff_tolerance)
}

pub fn build_source_with(map: &MarkovExpandingMap, a: &Word, n: usize, birkhoff_tolerance: f64) -> Result<SourceConfig> {
    let sft = map.sft();
    let holes = long_return_holes(sft, a, n)?;
    let level = n - 1 + a.len();
    let psi = map.log_derivative_potential(level)?;
    let full_dimension = bowen_root(&psi)?;
    let phi = psi.scaled(-full_dimension).with_holes(&holes)?;
    let nu = match equilibrium_state(&phi) {
        Ok(nu) => nu,
        Err(Error::EmptySurvivor) => return Err(Error::SourceInfeasible { n }),
        Err(e) => return Err(e),
    };
    let mass_a = nu.cylinder_mass(a.symbols());
    if !(mass_a > 1e-300) {
        return Err(Error::SourceInfeasible { n });
    }
    let lambda = nu.integrate(&psi)?;
    let kac = kac_check(&nu, sft, a, n + 1)?;
    let letters = source_letters(sft, a, n)?;
    let entropy = nu.entropy();
    Ok(SourceConfig {
        n,
        a: a.clone(),
        level,
        full_dimension,
        pressure: nu.pressure(),
        hole_count: holes.len(),
        psi,
        phi,
        mass_a,
        lambda,
        mean_return: kac.mean_return,
        kac,
        entropy,
        source_dimension: entropy / lambda,
        birkhoff_tolerance,
        nu,
        letters,
    })
}

/// A word drawn from the source, parsed into return words.
#[derive(Clone, Debug)]
pub struct SourceSample {
    /// Indices into the source's letters.
    pub letters: Vec<u32>,
    /// `(1/k) S_k psi` over the base symbols of `letters`.
    pub psi_average: f64,
    /// `(1/k) hat S_k t`.
    pub return_average: f64,
    pub attempts: usize,
}

const SAMPLE_RETRIES: usize = 8;

/// Draws `letters` return words from the Gibbs chain of the source started in `[A]`,
/// accepting the first draw whose Birkhoff averages of `psi` and of the return time are
/// within tolerance.
pub fn sample_source_point(source: &SourceConfig, letters: usize, seed: u64) -> Result<SourceSample> {
    if letters == 0 {
        return Err(Error::InvalidArgument("need at least one letter".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let a = source.a.symbols();
    let base_len = (letters as f64 * source.mean_return * 1.05) as usize + 4 * source.n + a.len();
    for attempt in 1..=SAMPLE_RETRIES {
        let mut path = source.nu.sample_path(&mut rng, a, base_len)?;
        let (mut parsed, mut used) = source.letters.parse(&path);
        while parsed.len() < letters {
            // Rare: the draw was short of returns; extend the chain from its end.
            let tail = source.nu.sample_path(&mut rng, &path[path.len() - source.level..], base_len / 4 + source.level)?;
            path.extend_from_slice(&tail[source.level..]);
            (parsed, used) = source.letters.parse(&path);
        }
        let _ = used;
        parsed.truncate(letters);
        let base_total: usize = parsed.iter().map(|&l| source.letters.return_time(l)).sum();
        let psi_average = birkhoff_average(&source.psi, &path[..base_total + source.level]);
        let return_average = base_total as f64 / letters as f64;
        let dev = (psi_average - source.lambda).abs().max((return_average - source.mean_return).abs());
        worst = if attempt == 1 { dev } else { worst.min(dev) };
        if dev <= source.birkhoff_tolerance {
            return Ok(SourceSample {
                letters: parsed.into_iter().map(|l| l as u32).collect(),
                psi_average,
                return_average,
                attempts: attempt,
            });
        }
    }
    Err(Error::BirkhoffMiss { attempts: SAMPLE_RETRIES, deviation: worst })
}

/// Average of a level-`L` potential over the `|path| - L + 1` windows of `path`.
pub fn birkhoff_average(psi: &Potential, path: &[u32]) -> f64 {
    let l = psi.level();
    let count = path.len() + 1 - l;
    let sum: f64 = (0..count).map(|i| psi.value_of(&path[i..i + l]).unwrap_or(f64::NAN)).sum();
    sum / count as f64
}

/// Return words with `t <= n`; when no return word has `t = n` the alphabet is extended
/// to the smallest return time above `n` that occurs.
fn source_letters(sft: &Sft, a: &Word, n: usize) -> Result<ReturnAlphabet> {
    let letters = induced_alphabet(sft, a, n + 1)?;
    if letters.entries().iter().any(|e| e.return_time == n) {
        return Ok(letters);
    }
    for t_max in n + 2..=n + 64 {
        let wider = induced_alphabet(sft, a, t_max)?;
        if let Some(t) = wider.entries().iter().map(|e| e.return_time).find(|&t| t > n) {
            return Ok(wider.truncated(t + 1));
        }
    }
    Err(Error::EmptyAlphabet)
}
