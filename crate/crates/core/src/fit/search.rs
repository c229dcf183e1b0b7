use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::space::ParameterSpace;
use super::FitError;

pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;

/// Outcome of any fitting procedure.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub best: Vec<f64>,
    pub best_error: f64,
    /// Grid index of `best`, for grid-based searches.
    pub best_index: Option<u64>,
    pub evaluations: usize,
    /// `(state, error)` per evaluation, in evaluation order. For grid
    /// searches the state is the grid index, for hill climbing it is the
    /// evaluation's ordinal.
    pub trace: Vec<(u64, f64)>,
    pub seed: u64,
}

/// Strictly better, or equally good at a lower grid index.
fn improves(err: f64, index: u64, best: Option<(f64, u64)>) -> bool {
    match best {
        None => true,
        Some((be, bi)) => err < be || (err == be && index < bi),
    }
}

struct Grid<'a, F> {
    space: &'a ParameterSpace,
    objective: F,
    cache: HashMap<u64, f64>,
    trace: Vec<(u64, f64)>,
    best: Option<(f64, u64)>,
}

impl<'a, F: FnMut(&[f64]) -> f64> Grid<'a, F> {
    fn new(space: &'a ParameterSpace, objective: F) -> Self {
        Grid { space, objective, cache: HashMap::new(), trace: Vec::new(), best: None }
    }

    fn eval(&mut self, index: u64) -> f64 {
        if let Some(&e) = self.cache.get(&index) {
            return e;
        }
        let e = (self.objective)(&self.space.point(index));
        self.cache.insert(index, e);
        self.trace.push((index, e));
        if improves(e, index, self.best) {
            self.best = Some((e, index));
        }
        e
    }

    fn finish(self, seed: u64) -> FitResult {
        let (best_error, index) = self.best.expect("at least one evaluation");
        FitResult {
            best: self.space.point(index),
            best_error,
            best_index: Some(index),
            evaluations: self.trace.len(),
            trace: self.trace,
            seed,
        }
    }
}

/// Evaluates every grid state and returns the minimum, ties to the lowest
/// index. Refuses grids larger than `cap`.
pub fn exhaustive<F: FnMut(&[f64]) -> f64>(objective: F, space: &ParameterSpace, cap: u64) -> Result<FitResult, FitError> {
    let size = space.size();
    if size > cap {
        return Err(FitError::GridTooLarge { size, cap });
    }
    if space.dims() == 0 {
        return Err(FitError::Config("empty parameter space".into()));
    }
    let mut g = Grid::new(space, objective);
    for i in 0..size {
        g.eval(i);
    }
    Ok(g.finish(0))
}

/// Best of `n` uniform draws from the grid, with replacement.
pub fn random_baseline<F: FnMut(&[f64]) -> f64>(
    objective: F,
    space: &ParameterSpace,
    n: usize,
    seed: u64,
) -> Result<FitResult, FitError> {
    if n == 0 || space.dims() == 0 {
        return Err(FitError::Config("random baseline needs n >= 1 and a non-empty space".into()));
    }
    let size = space.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut objective = objective;
    let mut trace = Vec::with_capacity(n);
    let mut best: Option<(f64, u64)> = None;
    for _ in 0..n {
        let i = rng.gen_range(0..size);
        let e = objective(&space.point(i));
        trace.push((i, e));
        if improves(e, i, best) {
            best = Some((e, i));
        }
    }
    let (best_error, i) = best.expect("n >= 1");
    Ok(FitResult { best: space.point(i), best_error, best_index: Some(i), evaluations: n, trace, seed })
}

/// Two-phase grid search under an evaluation budget.
///
/// The first half of the budget samples distinct states uniformly (starting
/// with `start` when given). The rest refines coordinate by coordinate: from
/// the incumbent, every level of one coordinate is tried and the best kept,
/// sweeping until no coordinate improves, then restarting from the next best
/// unused sample. A budget covering the whole grid enumerates it.
pub fn state_space_search<F: FnMut(&[f64]) -> f64>(
    objective: F,
    space: &ParameterSpace,
    budget: usize,
    start: Option<u64>,
    seed: u64,
) -> Result<FitResult, FitError> {
    if budget < space.dims() || space.dims() == 0 {
        return Err(FitError::Config(format!("a budget of {budget} is below the {} coordinates", space.dims())));
    }
    let size = space.size();
    if budget as u64 >= size {
        let mut r = exhaustive(objective, space, u64::MAX)?;
        r.seed = seed;
        return Ok(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Grid::new(space, objective);

    let sample = (budget / 2).max(1);
    if let Some(s) = start.filter(|&s| s < size) {
        g.eval(s);
    }
    while g.trace.len() < sample {
        let i = rng.gen_range(0..size);
        if !g.cache.contains_key(&i) {
            g.eval(i);
        }
    }
    let mut elites: Vec<(f64, u64)> = g.trace.iter().map(|&(i, e)| (e, i)).collect();
    elites.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    'restarts: for &(err0, idx0) in &elites {
        let (mut cur_err, mut cur) = (err0, idx0);
        loop {
            let mut moved = false;
            for c in 0..space.dims() {
                let mut levels = space.levels_of(cur);
                let mut line_best = (cur_err, cur);
                for l in 0..space.coords[c].levels.len() {
                    levels[c] = l;
                    let i = space.index_of(&levels);
                    if !g.cache.contains_key(&i) && g.trace.len() >= budget {
                        break 'restarts;
                    }
                    let e = g.eval(i);
                    if improves(e, i, Some(line_best)) {
                        line_best = (e, i);
                    }
                }
                if line_best.1 != cur {
                    (cur_err, cur) = line_best;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
    }
    Ok(g.finish(seed))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HillClimbConfig {
    pub step: f64,
    pub max_iters: usize,
    /// Extra runs from uniform random starting points, after the run from
    /// the given start.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for HillClimbConfig {
    fn default() -> Self {
        HillClimbConfig { step: 0.1, max_iters: 100, restarts: 4, seed: 0 }
    }
}

/// Steepest descent over single-coordinate moves of ±`step`, kept inside
/// each coordinate's bounds. Runs once from `init` and once from each random
/// restart; the best point found wins, so the result never scores worse
/// than `init`.
pub fn hill_climb<F: FnMut(&[f64]) -> f64>(
    objective: F,
    space: &ParameterSpace,
    init: &[f64],
    config: &HillClimbConfig,
) -> Result<FitResult, FitError> {
    if !(config.step > 0.0) || config.max_iters == 0 {
        return Err(FitError::Config("hill climbing needs a positive step and iteration budget".into()));
    }
    if init.len() != space.dims() {
        return Err(FitError::Config(format!("start point has {} coordinates, space has {}", init.len(), space.dims())));
    }
    let mut objective = objective;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace: Vec<(u64, f64)> = Vec::new();
    let mut eval = |p: &[f64], trace: &mut Vec<(u64, f64)>| {
        let e = objective(p);
        trace.push((trace.len() as u64, e));
        e
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for run in 0..=config.restarts {
        let mut cur: Vec<f64> = if run == 0 {
            init.iter().zip(&space.coords).map(|(v, c)| v.clamp(c.lo, c.hi)).collect()
        } else {
            space.coords.iter().map(|c| if c.lo < c.hi { rng.gen_range(c.lo..=c.hi) } else { c.lo }).collect()
        };
        let mut cur_err = eval(&cur, &mut trace);
        for _ in 0..config.max_iters {
            let mut step_best: Option<(f64, Vec<f64>)> = None;
            for (c, coord) in space.coords.iter().enumerate() {
                for dir in [-1.0, 1.0] {
                    let v = cur[c] + dir * config.step;
                    if v < coord.lo - 1e-12 || v > coord.hi + 1e-12 {
                        continue;
                    }
                    let mut next = cur.clone();
                    next[c] = v;
                    let e = eval(&next, &mut trace);
                    if step_best.as_ref().is_none_or(|(be, _)| e < *be) {
                        step_best = Some((e, next));
                    }
                }
            }
            match step_best {
                Some((e, next)) if e < cur_err => (cur_err, cur) = (e, next),
                _ => break,
            }
        }
        if best.as_ref().is_none_or(|(be, _)| cur_err < *be) {
            best = Some((cur_err, cur));
        }
    }
    let (best_error, best) = best.expect("at least one run");
    Ok(FitResult { best, best_error, best_index: None, evaluations: trace.len(), trace, seed: config.seed })
}
