use crate::error::{Error, Result};
use crate::geometry::MarkovExpandingMap;
use crate::symbolic::{repetition_time_of, Word};

/// A return time, or censoring at the end of the available orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnTime {
    Found(usize),
    Censored(usize),
}

impl ReturnTime {
    pub fn found(self) -> Option<usize> {
        match self {
            ReturnTime::Found(n) => Some(n),
            ReturnTime::Censored(_) => None,
        }
    }
}

/// `inf { n in 1..=n_max : |orbit[n] - orbit[0]| < r }`.
pub fn tau_r(orbit: &[f64], r: f64, n_max: usize) -> ReturnTime {
    let n_max = n_max.min(orbit.len().saturating_sub(1));
    let x = orbit[0];
    (1..=n_max).find(|&n| (orbit[n] - x).abs() < r).map_or(ReturnTime::Censored(n_max), ReturnTime::Found)
}

/// Return times for every radius of `radii` in a single pass over the orbit.
pub fn tau_grid(orbit: &[f64], radii: &[f64], n_max: usize) -> Vec<ReturnTime> {
    let n_max = n_max.min(orbit.len().saturating_sub(1));
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]));
    let mut out = vec![ReturnTime::Censored(n_max); radii.len()];
    let x = orbit[0];
    let mut next = 0;
    for n in 1..=n_max {
        if next == order.len() {
            break;
        }
        let d = (orbit[n] - x).abs();
        // Found radii form a prefix of the descending order.
        while next < order.len() && d < radii[order[next]] {
            out[order[next]] = ReturnTime::Found(n);
            next += 1;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionData {
    /// Largest observed `sup |D f^n| / inf |D f^n|` over a cylinder of length `n`.
    pub d: f64,
    /// Minimal gap between the repeller hulls of distinct level-1 cylinders.
    pub delta: f64,
    pub kappa: f64,
    /// Set when some level-1 hulls touch (`delta = 0`); `kappa` is then half the
    /// smallest level-1 hull length.
    pub full_branch_adjacent: bool,
}

/// Distortion over cylinders of length up to `probe_depth` (at most 4096 per level,
/// spread evenly over the admissible words), probed at 17 points each.
pub fn distortion_constants(map: &MarkovExpandingMap, probe_depth: usize) -> Result<DistortionData> {
    if probe_depth == 0 {
        return Err(Error::InvalidArgument("probe depth must be at least 1".into()));
    }
    let mut d: f64 = 1.0;
    for n in 1..=probe_depth {
        let words = map.sft().admissible_words(n);
        let stride = words.len().div_ceil(4096).max(1);
        for w in words.iter().step_by(stride) {
            let [lo, hi] = map.decode(w)?;
            let (mut sup, mut inf) = (0.0f64, f64::INFINITY);
            for i in 0..17 {
                let x = lo + (hi - lo) * (i as f64 + 0.5) / 17.0;
                let mut y = x;
                let mut log_der = 0.0;
                for &s in w.symbols() {
                    let b = &map.branches()[s as usize];
                    log_der += b.derivative(y).abs().ln();
                    y = b.apply(y);
                }
                sup = sup.max(log_der);
                inf = inf.min(log_der);
            }
            d = d.max((sup - inf).exp());
        }
    }
    let hulls = map.level_one_hulls();
    let mut sorted = hulls.to_vec();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let delta = sorted.windows(2).map(|p| (p[1][0] - p[0][1]).max(0.0)).fold(f64::INFINITY, f64::min);
    if delta > 0.0 {
        Ok(DistortionData { d, delta, kappa: (delta / d).min(0.5), full_branch_adjacent: false })
    } else {
        let min_len = hulls.iter().map(|h| h[1] - h[0]).fold(f64::INFINITY, f64::min);
        Ok(DistortionData { d, delta: 0.0, kappa: 0.5 * min_len / d, full_branch_adjacent: true })
    }
}

/// Outcome of comparing a cylinder with the two balls around a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichReport {
    /// `kappa / |D f^n(x)|`.
    pub inner_radius: f64,
    /// `1 / (kappa |D f^n(x)|)`.
    pub outer_radius: f64,
    /// Distance from `x` to the nearest repeller point outside the cylinder (hull bound).
    pub outside_distance: f64,
    /// Largest distance from `x` to a repeller point of the cylinder (hull bound).
    pub inside_extent: f64,
    pub inner_holds: bool,
    pub outer_holds: bool,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.inner_holds && self.outer_holds
    }

    /// `outside_distance / inner_radius` and `outer_radius / inside_extent`; both at
    /// least 1 when the inclusions hold.
    pub fn slack(&self) -> (f64, f64) {
        (self.outside_distance / self.inner_radius, self.outer_radius / self.inside_extent)
    }
}

/// Checks `B(x, kappa |D f^n x|^-1) ∩ Λ ⊂ [w_1..w_n] ⊂ B(x, kappa^-1 |D f^n x|^-1)`
/// for the repeller point `x` coded by `w` (|w| > n; `x` is its shadow point).
pub fn ball_cylinder_check(map: &MarkovExpandingMap, w: &[u32], n: usize, dist: &DistortionData) -> Result<SandwichReport> {
    if n == 0 || w.len() <= n {
        return Err(Error::InvalidArgument(format!("need 1 <= n < |w|; got n = {n}, |w| = {}", w.len())));
    }
    let orbit = map.shadow_orbit(w)?;
    let x = orbit[0];
    let log_der: f64 = map.log_derivatives(&orbit[..n], &w[..n]).iter().sum();
    let inner_radius = dist.kappa * (-log_der).exp();
    let outer_radius = (-log_der).exp() / dist.kappa;
    let [lo, hi] = map.hull(&w[..n])?;
    let inside_extent = (x - lo).abs().max((hi - x).abs());
    let mut outside_distance = f64::INFINITY;
    let q = map.alphabet_size() as u32;
    for m in 1..=n {
        let prefix = &w[..m - 1];
        for j in 0..q {
            if j == w[m - 1] {
                continue;
            }
            let mut sib = prefix.to_vec();
            sib.push(j);
            if !map.sft().is_admissible(&sib) {
                continue;
            }
            let [a, b] = map.hull(&sib)?;
            let d = if x < a { a - x } else if x > b { x - b } else { 0.0 };
            outside_distance = outside_distance.min(d);
        }
    }
    Ok(SandwichReport {
        inner_radius,
        outer_radius,
        outside_distance,
        inside_extent,
        inner_holds: outside_distance >= inner_radius,
        outer_holds: inside_extent < outer_radius,
    })
}

/// Comparison of symbolic and geometric return times at one `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecurrenceSandwich {
    pub k: usize,
    pub repetition: Option<usize>,
    pub birkhoff: f64,
    /// `tau` at radius `kappa exp(-S_k psi)`.
    pub tau_small: ReturnTime,
    /// `tau` at radius `kappa^-1 exp(-S_k psi)`.
    pub tau_large: ReturnTime,
}

impl RecurrenceSandwich {
    /// `tau_small >= R_k >= tau_large`; `None` if any side is censored.
    pub fn holds(&self) -> Option<bool> {
        let r = self.repetition?;
        let small = match self.tau_small {
            ReturnTime::Found(t) => t,
            // Censored beyond the repetition time still certifies the upper side.
            ReturnTime::Censored(n) if n >= r => usize::MAX,
            ReturnTime::Censored(_) => return None,
        };
        let large = self.tau_large.found()?;
        Some(small >= r && r >= large)
    }
}

/// `tau_{kappa e^{-S_k psi}}(x) >= R_k(w) >= tau_{kappa^{-1} e^{-S_k psi}}(x)` for the
/// point `x` coded by `w`, over the orbit available from `w`.
pub fn recurrence_sandwich_check(map: &MarkovExpandingMap, w: &Word, k: usize, dist: &DistortionData) -> Result<RecurrenceSandwich> {
    let s = w.symbols();
    let orbit = map.shadow_orbit(s)?;
    recurrence_sandwich_on_orbit(map, s, &orbit, k, dist)
}

pub fn recurrence_sandwich_on_orbit(
    map: &MarkovExpandingMap,
    w: &[u32],
    orbit: &[f64],
    k: usize,
    dist: &DistortionData,
) -> Result<RecurrenceSandwich> {
    if k == 0 || k >= w.len() {
        return Err(Error::InvalidArgument(format!("need 1 <= k < |w|; got k = {k}")));
    }
    let repetition = repetition_time_of(w, k)?;
    let birkhoff: f64 = map.log_derivatives(&orbit[..k], &w[..k]).iter().sum();
    let base = (-birkhoff).exp();
    let n_max = orbit.len() - 1;
    let grid = tau_grid(orbit, &[dist.kappa * base, base / dist.kappa], n_max);
    Ok(RecurrenceSandwich { k, repetition, birkhoff, tau_small: grid[0], tau_large: grid[1] })
}
