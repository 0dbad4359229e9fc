//! Perron–Frobenius eigendata of row-weighted transition matrices
//! `M[i][j] = exp(phi[i]) * A[i][j]`.
//!
//! Each nontrivial strongly connected component is handled separately by power
//! iteration with a Collatz–Wielandt stopping rule; the component of largest spectral
//! radius is dominant. Small components that fail to converge fall back to a dense
//! eigensolver.

use nalgebra::DMatrix;
use petgraph::algo::kosaraju_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symbolic::{gcd, Sft};

const TOLERANCE: f64 = 1e-13;
const MAX_ITERATIONS: usize = 100_000;
const DENSE_LIMIT: usize = 2000;
const PARALLEL_THRESHOLD: usize = 1 << 15;

/// Dominant eigendata restricted to one strongly connected component.
#[derive(Clone, Debug)]
pub struct PerronVectors {
    /// Natural log of the spectral radius.
    pub log_rho: f64,
    /// States of the dominant component, ascending.
    pub states: Vec<u32>,
    /// Right eigenvector on `states`, maximum entry 1.
    pub right: Vec<f64>,
    /// Left eigenvector on `states`, normalised so that `sum left[i] * right[i] = 1`.
    pub left: Vec<f64>,
    pub period: usize,
}

#[derive(Clone, Debug)]
struct Component {
    states: Vec<u32>,
    succ_offsets: Vec<usize>,
    succ: Vec<u32>,
    pred_offsets: Vec<usize>,
    pred: Vec<u32>,
    period: usize,
}

/// Caches the component structure of an SFT so that many potentials can be solved
/// on the same graph.
#[derive(Clone, Debug)]
pub struct PerronSolver {
    alphabet_size: usize,
    components: Vec<Component>,
}

impl PerronSolver {
    pub fn new(sft: &Sft) -> Self {
        let n = sft.alphabet_size();
        let mut graph = DiGraph::<(), ()>::with_capacity(n, sft.edge_count());
        for _ in 0..n {
            graph.add_node(());
        }
        for (i, j) in sft.edges() {
            graph.add_edge(NodeIndex::new(i as usize), NodeIndex::new(j as usize), ());
        }
        let mut local = vec![usize::MAX; n];
        let mut components = Vec::new();
        for scc in kosaraju_scc(&graph) {
            let mut states: Vec<u32> = scc.iter().map(|v| v.index() as u32).collect();
            states.sort_unstable();
            if states.len() == 1 && !sft.has_transition(states[0], states[0]) {
                continue;
            }
            for (k, &s) in states.iter().enumerate() {
                local[s as usize] = k;
            }
            let inside = |t: u32| states.get(local[t as usize]) == Some(&t);
            let mut succ_offsets = vec![0];
            let mut succ = Vec::new();
            let mut in_lists: Vec<Vec<u32>> = vec![Vec::new(); states.len()];
            for (k, &s) in states.iter().enumerate() {
                for &t in sft.successors(s) {
                    if inside(t) {
                        let lt = local[t as usize] as u32;
                        succ.push(lt);
                        in_lists[lt as usize].push(k as u32);
                    }
                }
                succ_offsets.push(succ.len());
            }
            let mut pred_offsets = vec![0];
            let mut pred = Vec::new();
            for list in in_lists {
                pred.extend(list);
                pred_offsets.push(pred.len());
            }
            let period = component_period(&succ_offsets, &succ);
            components.push(Component { states, succ_offsets, succ, pred_offsets, pred, period });
        }
        Self { alphabet_size: n, components }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Number of nontrivial strongly connected components.
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    fn check(&self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.alphabet_size {
            return Err(Error::InvalidArgument(format!(
                "potential has {} values for {} states",
                phi.len(),
                self.alphabet_size
            )));
        }
        if phi.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
            return Err(Error::InvalidArgument("potential values must be finite or -inf".into()));
        }
        Ok(())
    }

    /// Log spectral radius of the weighted matrix; `EmptySurvivor` if there is no cycle.
    pub fn log_spectral_radius(&self, phi: &[f64]) -> Result<f64> {
        self.check(phi)?;
        let mut best: Option<f64> = None;
        for c in &self.components {
            let (log_rho, _) = c.right_vector(phi)?;
            best = Some(best.map_or(log_rho, |b| b.max(log_rho)));
        }
        best.ok_or(Error::EmptySurvivor)
    }

    /// Right and left eigenvectors on the dominant component.
    pub fn solve(&self, phi: &[f64]) -> Result<PerronVectors> {
        self.check(phi)?;
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for (idx, c) in self.components.iter().enumerate() {
            let (log_rho, right) = c.right_vector(phi)?;
            if best.as_ref().is_none_or(|b| log_rho > b.1) {
                best = Some((idx, log_rho, right));
            }
        }
        let (idx, log_rho, right) = best.ok_or(Error::EmptySurvivor)?;
        let c = &self.components[idx];
        let (_, mut left) = c.left_vector(phi)?;
        let dot: f64 = left.iter().zip(&right).map(|(u, v)| u * v).sum();
        for u in &mut left {
            *u /= dot;
        }
        Ok(PerronVectors { log_rho, states: c.states.clone(), right, left, period: c.period })
    }
}

fn component_period(offsets: &[usize], succ: &[u32]) -> usize {
    let n = offsets.len() - 1;
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut g = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &succ[offsets[u]..offsets[u + 1]] {
            let v = v as usize;
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = gcd(g, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    g.max(1)
}

enum Direction {
    Right,
    Left,
}

impl Component {
    fn len(&self) -> usize {
        self.states.len()
    }

    fn right_vector(&self, phi: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.iterate(phi, Direction::Right)
    }

    fn left_vector(&self, phi: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.iterate(phi, Direction::Left)
    }

    /// Row weights scaled by the largest one; returns the weights and the log scale.
    fn weights(&self, phi: &[f64]) -> (Vec<f64>, f64) {
        let scale = self.states.iter().map(|&s| phi[s as usize]).fold(f64::NEG_INFINITY, f64::max);
        let w = self.states.iter().map(|&s| (phi[s as usize] - scale).exp()).collect();
        (w, scale)
    }

    fn iterate(&self, phi: &[f64], dir: Direction) -> Result<(f64, Vec<f64>)> {
        let (w, scale) = self.weights(phi);
        if scale == f64::NEG_INFINITY {
            return Ok((f64::NEG_INFINITY, vec![1.0; self.len()]));
        }
        match self.power_iteration(&w, &dir) {
            Some((rho, v)) => Ok((rho.ln() + scale, v)),
            None if self.len() <= DENSE_LIMIT => {
                let (rho, v) = self.dense(&w, &dir)?;
                Ok((rho.ln() + scale, v))
            }
            None => Err(Error::NotConverged(format!(
                "power iteration on a component of size {}",
                self.len()
            ))),
        }
    }

    fn apply(&self, w: &[f64], dir: &Direction, shift: f64, v: &[f64], out: &mut [f64]) {
        let row = |i: usize| -> f64 {
            match dir {
                Direction::Right => {
                    let s: f64 = self.succ[self.succ_offsets[i]..self.succ_offsets[i + 1]].iter().map(|&j| v[j as usize]).sum();
                    w[i] * s + shift * v[i]
                }
                Direction::Left => {
                    let s: f64 = self.pred[self.pred_offsets[i]..self.pred_offsets[i + 1]]
                        .iter()
                        .map(|&j| w[j as usize] * v[j as usize])
                        .sum();
                    s + shift * v[i]
                }
            }
        };
        if out.len() >= PARALLEL_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = row(i);
            }
        }
    }

    /// Returns the spectral radius of the (unscaled-shift) matrix and a positive
    /// eigenvector with maximum entry 1, or `None` if the bracket does not close.
    fn power_iteration(&self, w: &[f64], dir: &Direction) -> Option<(f64, Vec<f64>)> {
        let n = self.len();
        let shift = if self.period > 1 { w.iter().cloned().fold(0.0, f64::max) } else { 0.0 };
        let mut v = vec![1.0; n];
        let mut y = vec![0.0; n];
        let mut best_gap = f64::INFINITY;
        let mut stale = 0;
        for _ in 0..MAX_ITERATIONS {
            self.apply(w, dir, shift, &v, &mut y);
            let (mut lo, mut hi, mut top) = (f64::INFINITY, 0.0f64, 0.0f64);
            for (yi, vi) in y.iter().zip(&v) {
                let r = yi / vi;
                lo = lo.min(r);
                hi = hi.max(r);
                top = top.max(*yi);
            }
            if !(top > 0.0) || !top.is_finite() {
                return None;
            }
            for (vi, yi) in v.iter_mut().zip(&y) {
                // Entries never vanish on a strongly connected component, but may underflow.
                *vi = (yi / top).max(f64::MIN_POSITIVE);
            }
            let gap = (hi - lo) / hi;
            if gap < TOLERANCE {
                return Some(((lo + hi) / 2.0 - shift, v));
            }
            if gap < best_gap * 0.999 {
                best_gap = gap;
                stale = 0;
            } else {
                stale += 1;
                // Rounding floor reached.
                if stale > 200 && best_gap < 1e-11 {
                    return Some(((lo + hi) / 2.0 - shift, v));
                }
            }
        }
        None
    }

    fn dense(&self, w: &[f64], dir: &Direction) -> Result<(f64, Vec<f64>)> {
        let n = self.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for &j in &self.succ[self.succ_offsets[i]..self.succ_offsets[i + 1]] {
                m[(i, j as usize)] = w[i];
            }
        }
        if let Direction::Left = dir {
            m = m.transpose();
        }
        let rho = m
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() <= 1e-9 * z.re.abs().max(1.0))
            .map(|z| z.re)
            .fold(0.0, f64::max);
        if rho <= 0.0 {
            return Err(Error::NotConverged("dense eigensolver found no positive eigenvalue".into()));
        }
        let shifted = &m - DMatrix::<f64>::identity(n, n) * rho;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or_else(|| Error::NotConverged("singular value decomposition".into()))?;
        let (k, _) = svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
        let mut v: Vec<f64> = v_t.row(k).iter().map(|x| x.abs()).collect();
        let top = v.iter().cloned().fold(0.0, f64::max);
        for x in &mut v {
            *x = (*x / top).max(f64::MIN_POSITIVE);
        }
        Ok((rho, v))
    }
}

/// Spectral radius of the 0/1 transition matrix.
pub fn spectral_radius(sft: &Sft) -> Result<f64> {
    let phi = vec![0.0; sft.alphabet_size()];
    Ok(PerronSolver::new(sft).log_spectral_radius(&phi)?.exp())
}
