use crate::error::{Error, Result};
use crate::geometry::{tau_grid, MarkovExpandingMap, ReturnTime};
use crate::symbolic::repetition_times_of;

/// Finite-scale estimate of a lower/upper recurrence rate.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceEstimate {
    /// `(scale, ratio)` from coarse to fine. The scale is `-ln r` on the geometric route
    /// and the word length on the symbolic route.
    pub samples: Vec<(f64, f64)>,
    /// Scales at which the return was not seen within the horizon.
    pub censored: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub window: String,
}

impl RecurrenceEstimate {
    /// Takes `lower`/`upper` as the inf/sup over the finer half of the samples.
    pub fn from_samples(samples: Vec<(f64, f64)>, censored: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::HorizonTooShort { needed: 1, available: 0 });
        }
        let start = samples.len() / 2;
        let tail = &samples[start..];
        let lower = tail.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let upper = tail.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let window = format!("last half: scales {}..={}", tail[0].0, tail[tail.len() - 1].0);
        Ok(Self { samples, censored, lower, upper, window })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,ratio\n");
        for (s, r) in &self.samples {
            out.push_str(&format!("{},{}\n", crate::thermo::fmt_float(*s), crate::thermo::fmt_float(*r)));
        }
        out
    }
}

/// Which scales to measure.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalePolicy {
    /// `ln tau_r / (-ln r)` on the given radii.
    Geometric { radii: Vec<f64> },
    /// `ln R_k / S_k psi` for `k` in `k_min..=k_max`.
    Symbolic { k_min: usize, k_max: usize },
}

impl ScalePolicy {
    /// Radii `2^-j_min, ..., 2^-j_max`.
    pub fn dyadic(j_min: i32, j_max: i32) -> Self {
        ScalePolicy::Geometric { radii: (j_min..=j_max).map(|j| 2f64.powi(-j)).collect() }
    }
}

/// What to measure: an interval point (iterated forward) or a coding word (shadowed).
#[derive(Clone, Copy, Debug)]
pub enum RateInput<'a> {
    Point { x: f64, horizon: usize },
    Word(&'a [u32]),
}

pub fn estimate_recurrence_rate(map: &MarkovExpandingMap, input: RateInput<'_>, policy: &ScalePolicy) -> Result<RecurrenceEstimate> {
    let (orbit, word) = match input {
        RateInput::Point { x, horizon } => {
            let orbit = map.orbit(x, horizon)?;
            let word = map.code(x, horizon)?.into_symbols();
            (orbit, word)
        }
        RateInput::Word(w) => (map.shadow_orbit(w)?, w.to_vec()),
    };
    match policy {
        ScalePolicy::Geometric { radii } => geometric_estimate(&orbit, radii),
        ScalePolicy::Symbolic { k_min, k_max } => {
            let logd = map.log_derivatives(&orbit, &word);
            symbolic_estimate(&word, &logd, *k_min, *k_max)
        }
    }
}

/// Geometric route on a precomputed orbit; radii are sorted coarse to fine.
pub fn geometric_estimate(orbit: &[f64], radii: &[f64]) -> Result<RecurrenceEstimate> {
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    let taus = tau_grid(orbit, &radii, orbit.len());
    let mut samples = Vec::new();
    let mut censored = Vec::new();
    for (&r, t) in radii.iter().zip(taus) {
        match t {
            ReturnTime::Found(n) => samples.push((-r.ln(), (n as f64).ln() / -r.ln())),
            ReturnTime::Censored(_) => censored.push(-r.ln()),
        }
    }
    RecurrenceEstimate::from_samples(samples, censored)
}

/// Symbolic route: `ln R_k(w) / S_k psi` with `S_k psi` summed from `log_derivatives`.
pub fn symbolic_estimate(word: &[u32], log_derivatives: &[f64], k_min: usize, k_max: usize) -> Result<RecurrenceEstimate> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidArgument(format!("bad k range {k_min}..={k_max}")));
    }
    let times = repetition_times_of(word);
    let mut samples = Vec::new();
    let mut censored = Vec::new();
    let mut s = 0.0;
    for k in 1..=k_max.min(word.len()).min(log_derivatives.len()) {
        s += log_derivatives[k - 1];
        if k < k_min {
            continue;
        }
        match times.get(k).copied().flatten() {
            Some(r) => samples.push((k as f64, (r as f64).ln() / s)),
            None => censored.push(k as f64),
        }
    }
    RecurrenceEstimate::from_samples(samples, censored)
}

/// Both routes on one orbit over the same window of scales: at each `h` the geometric
/// ratio is taken at `r_h = exp(-S_h psi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteComparison {
    /// `(h, symbolic ratio, geometric ratio)`.
    pub rows: Vec<(usize, f64, f64)>,
    pub symbolic: (f64, f64),
    pub geometric: (f64, f64),
    /// Largest difference between the routes' lower or upper estimates.
    pub max_gap: f64,
}

pub fn compare_routes(word: &[u32], orbit: &[f64], log_derivatives: &[f64], h_min: usize, h_max: usize) -> Result<RouteComparison> {
    let times = repetition_times_of(word);
    let mut sums = Vec::with_capacity(h_max + 1);
    let mut s = 0.0;
    sums.push(0.0);
    for &d in log_derivatives.iter().take(h_max) {
        s += d;
        sums.push(s);
    }
    let hs: Vec<usize> = (h_min.max(1)..=h_max.min(sums.len() - 1)).collect();
    let radii: Vec<f64> = hs.iter().map(|&h| (-sums[h]).exp()).collect();
    let taus = tau_grid(orbit, &radii, orbit.len());
    let mut rows = Vec::new();
    for ((&h, t), &r) in hs.iter().zip(taus).zip(&radii) {
        if let (Some(rep), ReturnTime::Found(tau)) = (times.get(h).copied().flatten(), t) {
            rows.push((h, (rep as f64).ln() / sums[h], (tau as f64).ln() / -r.ln()));
        }
    }
    if rows.is_empty() {
        return Err(Error::HorizonTooShort { needed: h_max, available: word.len() });
    }
    let range = |f: fn(&(usize, f64, f64)) -> f64| {
        rows.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let symbolic = range(|r| r.1);
    let geometric = range(|r| r.2);
    let max_gap = (symbolic.0 - geometric.0).abs().max((symbolic.1 - geometric.1).abs());
    Ok(RouteComparison { rows, symbolic, geometric, max_gap })
}
