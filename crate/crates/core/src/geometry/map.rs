use crate::error::{Error, Result};
use crate::symbolic::{Sft, Word};
use crate::thermo::{bowen_root, EventuallyPeriodic, Potential};

const MARKOV_TOL: f64 = 1e-12;

/// Shape of a branch in normalised coordinates: an increasing homeomorphism `h` of
/// `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchShape {
    Linear,
    /// `h(u) = u + (eps / pi) sin(pi u)`, `|eps| < 1`.
    Sine { eps: f64 },
}

impl BranchShape {
    fn h(self, u: f64) -> f64 {
        match self {
            BranchShape::Linear => u,
            BranchShape::Sine { eps } => u + eps / std::f64::consts::PI * (std::f64::consts::PI * u).sin(),
        }
    }

    fn dh(self, u: f64) -> f64 {
        match self {
            BranchShape::Linear => 1.0,
            BranchShape::Sine { eps } => 1.0 + eps * (std::f64::consts::PI * u).cos(),
        }
    }

    fn h_inv(self, v: f64) -> f64 {
        match self {
            BranchShape::Linear => v,
            BranchShape::Sine { .. } => {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                let mut u = v.clamp(0.0, 1.0);
                for _ in 0..100 {
                    let f = self.h(u) - v;
                    if f == 0.0 {
                        return u;
                    }
                    if f < 0.0 { lo = u } else { hi = u }
                    let next = u - f / self.dh(u);
                    u = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
                    if hi - lo < 1e-17 {
                        break;
                    }
                }
                u
            }
        }
    }

    fn min_dh(self) -> f64 {
        match self {
            BranchShape::Linear => 1.0,
            BranchShape::Sine { eps } => 1.0 - eps.abs(),
        }
    }
}

/// A monotone branch mapping `domain` onto `image`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Branch {
    pub domain: [f64; 2],
    pub image: [f64; 2],
    pub increasing: bool,
    pub shape: BranchShape,
}

impl Branch {
    pub fn linear(domain: [f64; 2], image: [f64; 2]) -> Self {
        Self { domain, image, increasing: true, shape: BranchShape::Linear }
    }

    fn width(&self) -> f64 {
        self.domain[1] - self.domain[0]
    }

    fn height(&self) -> f64 {
        self.image[1] - self.image[0]
    }

    pub fn apply(&self, x: f64) -> f64 {
        let v = self.shape.h((x - self.domain[0]) / self.width());
        if self.increasing { self.image[0] + self.height() * v } else { self.image[1] - self.height() * v }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let d = self.height() / self.width() * self.shape.dh((x - self.domain[0]) / self.width());
        if self.increasing { d } else { -d }
    }

    /// Inverse branch on `image`.
    pub fn inverse(&self, y: f64) -> f64 {
        let v = if self.increasing { (y - self.image[0]) / self.height() } else { (self.image[1] - y) / self.height() };
        self.domain[0] + self.width() * self.shape.h_inv(v.clamp(0.0, 1.0))
    }

    /// Image of an interval under the inverse branch.
    pub fn pull_back(&self, [a, b]: [f64; 2]) -> [f64; 2] {
        let (p, q) = (self.inverse(a), self.inverse(b));
        if p <= q { [p, q] } else { [q, p] }
    }

    pub fn min_slope(&self) -> f64 {
        self.height() / self.width() * self.shape.min_dh()
    }
}

/// A piecewise expanding Markov interval map. Branch `i` is the symbol `i`, and
/// `i -> j` is allowed when the domain of branch `j` lies in the image of branch `i`.
#[derive(Clone, Debug)]
pub struct MarkovExpandingMap {
    name: String,
    branches: Vec<Branch>,
    sft: Sft,
    hulls: Vec<[f64; 2]>,
}

impl MarkovExpandingMap {
    pub fn new(name: impl Into<String>, branches: Vec<Branch>) -> Result<Self> {
        if branches.len() < 2 {
            return Err(Error::InvalidMap("need at least two branches".into()));
        }
        for (i, b) in branches.iter().enumerate() {
            let finite = b.domain.iter().chain(&b.image).all(|x| x.is_finite());
            if !finite || !(b.width() > 0.0) || !(b.height() > 0.0) {
                return Err(Error::InvalidMap(format!("branch {i} has an empty or invalid interval")));
            }
            if let BranchShape::Sine { eps } = b.shape {
                if !(eps.abs() < 1.0) {
                    return Err(Error::InvalidMap(format!("branch {i}: sine amplitude must satisfy |eps| < 1")));
                }
            }
            if i > 0 && b.domain[0] < branches[i - 1].domain[1] - MARKOV_TOL {
                return Err(Error::InvalidMap("branch domains must be ordered and disjoint".into()));
            }
        }
        let mut edges = Vec::new();
        for (i, b) in branches.iter().enumerate() {
            for (j, d) in branches.iter().enumerate() {
                let inside = d.domain[0] >= b.image[0] - MARKOV_TOL && d.domain[1] <= b.image[1] + MARKOV_TOL;
                let overlap = d.domain[0] < b.image[1] - MARKOV_TOL && d.domain[1] > b.image[0] + MARKOV_TOL;
                if inside {
                    edges.push((i as u32, j as u32));
                } else if overlap {
                    return Err(Error::InvalidMap(format!(
                        "image of branch {i} cuts the domain of branch {j} (not Markov)"
                    )));
                }
            }
        }
        let sft = Sft::new(branches.len(), edges).map_err(|e| Error::InvalidMap(format!("transition structure: {e}")))?;
        let min_slope = branches.iter().map(Branch::min_slope).fold(f64::INFINITY, f64::min);
        if !(min_slope > 1.0) {
            return Err(Error::NotExpanding { min_slope });
        }
        let mut map = Self { name: name.into(), branches, sft, hulls: Vec::new() };
        map.hulls = map.compute_hulls();
        Ok(map)
    }

    pub fn doubling() -> Self {
        Self::new("doubling", vec![Branch::linear([0.0, 0.5], [0.0, 1.0]), Branch::linear([0.5, 1.0], [0.0, 1.0])]).unwrap()
    }

    /// Two slope-3 branches over the middle-third Cantor set.
    pub fn cantor3() -> Self {
        let third = 1.0 / 3.0;
        Self::new("cantor3", vec![Branch::linear([0.0, third], [0.0, 1.0]), Branch::linear([2.0 * third, 1.0], [0.0, 1.0])]).unwrap()
    }

    /// Slopes 2 and 4 on `[0, 1/2]` and `[1/2, 3/4]`, both onto `[0, 1]`.
    pub fn slopes24() -> Self {
        Self::new("slopes24", vec![Branch::linear([0.0, 0.5], [0.0, 1.0]), Branch::linear([0.5, 0.75], [0.0, 1.0])]).unwrap()
    }

    /// `x -> phi x mod 1` with the golden ratio `phi`; codes the golden mean shift.
    pub fn golden() -> Self {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        Self::new("golden", vec![Branch::linear([0.0, g], [0.0, 1.0]), Branch::linear([g, 1.0], [0.0, g])]).unwrap()
    }

    /// Doubling map with both branches bent by `h(u) = u + (eps/pi) sin(pi u)`.
    pub fn sine_doubling(eps: f64) -> Result<Self> {
        let shape = BranchShape::Sine { eps };
        Self::new(
            "sine-doubling",
            vec![
                Branch { domain: [0.0, 0.5], image: [0.0, 1.0], increasing: true, shape },
                Branch { domain: [0.5, 1.0], image: [0.0, 1.0], increasing: true, shape },
            ],
        )
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "doubling" => Ok(Self::doubling()),
            "cantor3" => Ok(Self::cantor3()),
            "slopes24" => Ok(Self::slopes24()),
            "golden" => Ok(Self::golden()),
            "sine-doubling" => Self::sine_doubling(0.1),
            _ => Err(Error::InvalidMap(format!("unknown preset `{name}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn alphabet_size(&self) -> usize {
        self.branches.len()
    }

    pub fn min_slope(&self) -> f64 {
        self.branches.iter().map(Branch::min_slope).fold(f64::INFINITY, f64::min)
    }

    pub fn is_piecewise_linear(&self) -> bool {
        self.branches.iter().all(|b| b.shape == BranchShape::Linear)
    }

    /// Branch containing `x`. A point on the common endpoint of two domains belongs
    /// to the branch whose repeller hull contains it; `BoundaryOrbit` if that does not
    /// decide, `Escaped` outside every domain.
    pub fn branch_of(&self, x: f64, step: usize) -> Result<usize> {
        let mut found = None;
        for (i, b) in self.branches.iter().enumerate() {
            if x >= b.domain[0] && x <= b.domain[1] {
                if let Some(prev) = found {
                    let in_hull = |k: usize| self.hulls.get(k).is_some_and(|h| x >= h[0] && x <= h[1]);
                    return match (in_hull(prev), in_hull(i)) {
                        (true, false) => Ok(prev),
                        (false, true) => Ok(i),
                        _ => Err(Error::BoundaryOrbit { step, point: x }),
                    };
                }
                found = Some(i);
            }
        }
        found.ok_or(Error::Escaped { step, point: x })
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        Ok(self.branches[self.branch_of(x, 0)?].apply(x))
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.branches[self.branch_of(x, 0)?].derivative(x))
    }

    /// Itinerary of `x` of the given length.
    pub fn code(&self, x: f64, depth: usize) -> Result<Word> {
        let mut symbols = Vec::with_capacity(depth);
        let mut y = x;
        for step in 0..depth {
            let i = self.branch_of(y, step)?;
            symbols.push(i as u32);
            y = self.branches[i].apply(y);
        }
        Word::new(symbols, self.alphabet_size())
    }

    /// Forward orbit `x, f x, ..., f^n x`.
    pub fn orbit(&self, x: f64, n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut y = x;
        out.push(y);
        for step in 0..n {
            y = self.branches[self.branch_of(y, step)?].apply(y);
            out.push(y);
        }
        Ok(out)
    }

    /// Points whose itinerary starts with `w`.
    pub fn decode(&self, w: &Word) -> Result<[f64; 2]> {
        self.pull_back_word(w.symbols(), None)
    }

    /// Smallest interval containing the repeller points of the cylinder `w`.
    pub fn hull(&self, w: &[u32]) -> Result<[f64; 2]> {
        self.pull_back_word(w, Some(()))
    }

    fn pull_back_word(&self, w: &[u32], hull: Option<()>) -> Result<[f64; 2]> {
        let Some(&last) = w.last() else {
            let lo = self.branches[0].domain[0];
            let hi = self.branches.last().unwrap().domain[1];
            return Ok([lo, hi]);
        };
        let q = self.alphabet_size();
        if w.iter().any(|&s| s as usize >= q) || !self.sft.is_admissible(w) {
            return Err(Error::InadmissibleWord(Word::new(w.to_vec(), q.max(1)).map(|w| w.to_string()).unwrap_or_default()));
        }
        let mut iv = if hull.is_some() { self.hulls[last as usize] } else { self.branches[last as usize].domain };
        for &s in w[..w.len() - 1].iter().rev() {
            iv = self.branches[s as usize].pull_back(iv);
        }
        Ok(iv)
    }

    fn compute_hulls(&self) -> Vec<[f64; 2]> {
        let mut hulls: Vec<[f64; 2]> = self.branches.iter().map(|b| b.domain).collect();
        for _ in 0..10_000 {
            let next: Vec<[f64; 2]> = (0..self.branches.len())
                .map(|i| {
                    let b = &self.branches[i];
                    self.sft.successors(i as u32).iter().fold([f64::INFINITY, f64::NEG_INFINITY], |acc, &j| {
                        let iv = b.pull_back(hulls[j as usize]);
                        [acc[0].min(iv[0]), acc[1].max(iv[1])]
                    })
                })
                .collect();
            let done = next.iter().zip(&hulls).all(|(a, b)| a == b);
            hulls = next;
            if done {
                break;
            }
        }
        hulls
    }

    /// Repeller hulls of the level-1 cylinders.
    pub fn level_one_hulls(&self) -> &[[f64; 2]] {
        &self.hulls
    }

    /// Codes of the endpoints of the level-1 repeller hulls. Each is eventually
    /// periodic since an endpoint of a hull is the image under an inverse branch of
    /// an endpoint of another hull.
    pub fn hull_endpoint_codes(&self) -> Vec<EventuallyPeriodic> {
        let q = self.alphabet_size();
        let mut out: Vec<EventuallyPeriodic> = Vec::new();
        for start in 0..2 * q {
            // Node 2 i is the left end of hull i, 2 i + 1 the right end.
            let mut seen = vec![usize::MAX; 2 * q];
            let mut path = Vec::new();
            let mut node = start;
            while seen[node] == usize::MAX {
                seen[node] = path.len();
                let i = node / 2;
                let want_left = (node % 2 == 0) == self.branches[i].increasing;
                let succ = self.sft.successors(i as u32);
                let key = |j: &&u32| if want_left { self.hulls[**j as usize][0] } else { -self.hulls[**j as usize][1] };
                let j = *succ.iter().min_by(|a, b| key(a).total_cmp(&key(b))).unwrap() as usize;
                path.push(i as u32);
                node = 2 * j + usize::from(!want_left);
            }
            let cut = seen[node];
            let code = EventuallyPeriodic::new(path[..cut].to_vec(), path[cut..].to_vec()).unwrap();
            if !out.contains(&code) {
                out.push(code);
            }
        }
        out
    }

    /// Level-`level` approximation of `psi = log |Df|`: on the cylinder `w`, the log
    /// of the secant slope of branch `w_0` over that cylinder. Exact for linear branches.
    pub fn log_derivative_potential(&self, level: usize) -> Result<Potential> {
        let q = self.alphabet_size();
        Potential::from_fn(&self.sft, level, |b| {
            let b0 = &self.branches[b[0] as usize];
            if b0.shape == BranchShape::Linear {
                return (b0.height() / b0.width()).ln();
            }
            let w = Word::new(b.to_vec(), q).expect("blocks use map symbols");
            let [lo, hi] = self.decode(&w).expect("blocks are admissible");
            ((b0.apply(hi) - b0.apply(lo)).abs() / (hi - lo)).ln()
        })
    }

    /// Bowen root of `P(-s psi_level) = 0` with the refinement gap to level `level + 1`.
    pub fn bowen_dimension(&self, level: usize) -> Result<BowenDimension> {
        let dimension = bowen_root(&self.log_derivative_potential(level)?)?;
        let refined = bowen_root(&self.log_derivative_potential(level + 1)?)?;
        Ok(BowenDimension { level, dimension, refinement_gap: (dimension - refined).abs() })
    }

    /// `S_k log|Df|` along the first `k` points of an orbit.
    pub fn birkhoff_sum(&self, orbit: &[f64], k: usize) -> Result<f64> {
        if k > orbit.len() {
            return Err(Error::InvalidArgument(format!("orbit of length {} is shorter than {k}", orbit.len())));
        }
        let mut sum = 0.0;
        for (step, &y) in orbit[..k].iter().enumerate() {
            sum += self.branches[self.branch_of(y, step)?].derivative(y).abs().ln();
        }
        Ok(sum)
    }

    /// `S_k log|Df|` over a word: exact slopes for linear branches, otherwise the
    /// derivative at the midpoint of each successive cylinder.
    pub fn birkhoff_sum_word(&self, w: &Word, k: usize) -> Result<f64> {
        if k > w.len() {
            return Err(Error::InvalidArgument(format!("word of length {} is shorter than {k}", w.len())));
        }
        self.sft.check_word(w)?;
        let s = w.symbols();
        let mut sum = 0.0;
        for j in 0..k {
            let b = &self.branches[s[j] as usize];
            sum += if b.shape == BranchShape::Linear {
                (b.height() / b.width()).ln()
            } else {
                let [lo, hi] = self.pull_back_word(&s[j..], None)?;
                b.derivative(0.5 * (lo + hi)).abs().ln()
            };
        }
        Ok(sum)
    }

    /// The orbit of the repeller point coded by `w`, computed backwards through
    /// inverse branches so that every point is accurate to rounding: `out[j]` is the
    /// point of the cylinder of `w[j..]` obtained from the midpoint of the last hull.
    pub fn shadow_orbit(&self, w: &[u32]) -> Result<Vec<f64>> {
        let Some(&last) = w.last() else { return Ok(Vec::new()) };
        if !self.sft.is_admissible(w) || w.iter().any(|&s| s as usize >= self.alphabet_size()) {
            return Err(Error::InadmissibleWord("shadowed word".into()));
        }
        let [lo, hi] = self.hulls[last as usize];
        let mut out = vec![0.0; w.len()];
        let mut y = 0.5 * (lo + hi);
        out[w.len() - 1] = y;
        for j in (0..w.len() - 1).rev() {
            y = self.branches[w[j] as usize].inverse(y);
            out[j] = y;
        }
        Ok(out)
    }

    /// `ln |D f(y)|` along an orbit whose itinerary is `w`.
    pub fn log_derivatives(&self, orbit: &[f64], w: &[u32]) -> Vec<f64> {
        orbit.iter().zip(w).map(|(&y, &s)| self.branches[s as usize].derivative(y).abs().ln()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BowenDimension {
    pub level: usize,
    pub dimension: f64,
    /// `|s_level - s_{level+1}|`.
    pub refinement_gap: f64,
}
