use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{tau_grid, MarkovExpandingMap, ReturnTime};
use crate::thermo::{equilibrium_state, least_squares_slope, Potential};

use super::source::{build_source_with, default_base_cylinder};

/// Rate measured at one sampled point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointRate {
    pub index: usize,
    /// Least-squares slope of `ln tau_r` against `-ln r`.
    pub slope: f64,
    /// `ln tau_r / (-ln r)` at the finest uncensored radius.
    pub finest_ratio: f64,
    pub censored: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AeReport {
    pub points: Vec<PointRate>,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub median_finest: f64,
    /// `dim mu = h / lambda`.
    pub target: f64,
    pub radii: Vec<f64>,
}

impl AeReport {
    pub fn to_csv(&self) -> String {
        use crate::thermo::fmt_float;
        let mut out = String::from("index,slope,finest_ratio,censored\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{}\n", p.index, fmt_float(p.slope), fmt_float(p.finest_ratio), p.censored));
        }
        out
    }
}

/// Samples `sample_count` points from the equilibrium state of `phi` (each coded by a
/// word of length `horizon` and placed by shadowing), and measures `tau_r` on `radii`.
/// Point `i` uses stream `i` of a generator seeded with `seed`.
pub fn ae_rate_experiment(
    map: &MarkovExpandingMap,
    phi: &Potential,
    sample_count: usize,
    horizon: usize,
    radii: &[f64],
    seed: u64,
) -> Result<AeReport> {
    if sample_count == 0 || radii.len() < 2 {
        return Err(Error::InvalidArgument("need at least one sample and two radii".into()));
    }
    if phi.base() != map.sft() {
        return Err(Error::InvalidArgument("potential is not defined on the map's shift".into()));
    }
    let state = equilibrium_state(phi)?;
    let psi = map.log_derivative_potential(phi.level())?;
    let target = state.entropy() / state.integrate(&psi)?;
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    let points = (0..sample_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let word = state.sample_path(&mut rng, &[], horizon)?;
            let orbit = map.shadow_orbit(&word)?;
            let taus = tau_grid(&orbit, &radii, horizon);
            let pts: Vec<(f64, f64)> = radii
                .iter()
                .zip(&taus)
                .filter_map(|(&r, t)| t.found().map(|n| (-r.ln(), (n as f64).ln())))
                .collect();
            let censored = taus.iter().filter(|t| matches!(t, ReturnTime::Censored(_))).count();
            if pts.len() < 2 {
                return Err(Error::HorizonTooShort { needed: horizon + 1, available: horizon });
            }
            let (s, l) = pts[pts.len() - 1];
            Ok(PointRate { index: i, slope: least_squares_slope(&pts), finest_ratio: l / s, censored })
        })
        .collect::<Result<Vec<_>>>()?;
    let slopes: Vec<f64> = points.iter().map(|p| p.slope).collect();
    let finest: Vec<f64> = points.iter().map(|p| p.finest_ratio).collect();
    Ok(AeReport {
        median: quantile(&slopes, 0.5),
        q1: quantile(&slopes, 0.25),
        q3: quantile(&slopes, 0.75),
        median_finest: quantile(&finest, 0.5),
        points,
        target,
        radii,
    })
}

/// Linear-interpolated quantile.
pub(crate) fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(v.len() - 1);
    v[i] + (pos - i as f64) * (v[j] - v[i])
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderRow {
    pub n: usize,
    pub holes: usize,
    /// `P(phi | Sigma_n)`.
    pub pressure: f64,
    pub lambda: f64,
    pub entropy: f64,
    /// `h / lambda`.
    pub dimension: f64,
    /// `dim Λ + P / lambda` at the same level.
    pub identity: f64,
    pub full_dimension: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderReport {
    pub rows: Vec<LadderRow>,
    /// `n` values skipped because the source misses the base cylinder.
    pub skipped: Vec<usize>,
    /// Slope of `ln(dim Λ - dim pi nu_n)` against `n`.
    pub gap_rate: Option<f64>,
}

impl LadderReport {
    pub fn to_csv(&self) -> String {
        use crate::thermo::fmt_float;
        let mut out = String::from("n,holes,pressure,lambda,entropy,dimension,full_dimension\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                r.holes,
                fmt_float(r.pressure),
                fmt_float(r.lambda),
                fmt_float(r.entropy),
                fmt_float(r.dimension),
                fmt_float(r.full_dimension)
            ));
        }
        out
    }
}

pub fn dimension_ladder(map: &MarkovExpandingMap, schedule: &[usize]) -> Result<LadderReport> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("schedule must be increasing".into()));
    }
    let a = default_base_cylinder(map.sft())?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &n in schedule {
        match build_source_with(map, &a, n, f64::INFINITY) {
            Ok(s) => rows.push(LadderRow {
                n,
                holes: s.hole_count,
                pressure: s.pressure,
                lambda: s.lambda,
                entropy: s.entropy,
                dimension: s.source_dimension,
                identity: s.dimension_identity(),
                full_dimension: s.full_dimension,
            }),
            Err(Error::SourceInfeasible { .. }) => skipped.push(n),
            Err(e) => return Err(e),
        }
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.full_dimension - r.dimension > 0.0)
        .map(|r| (r.n as f64, (r.full_dimension - r.dimension).ln()))
        .collect();
    let gap_rate = (pts.len() >= 2).then(|| least_squares_slope(&pts));
    Ok(LadderReport { rows, skipped, gap_rate })
}
