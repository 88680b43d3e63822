//! Posterior learning by minimizing the empirical omega-margin C-bound.
//!
//! The omega-margin is affine in the posterior: on the simplex,
//! `M(x_i, y_i) = a_i . rho` with `a_ij = I(h_j(x_i) = y_i) - 1/omega`. Hence
//! `mu1 = abar . rho` is linear and `mu2 = rho' G rho` is a convex quadratic.
//! For a fixed target `mu1 = mu` the bound `1 - mu^2 / mu2` is minimized by
//! minimizing `mu2` over the slice of the simplex where `abar . rho = mu`.
//! That convex problem is solved by projected gradient descent with an exact
//! Euclidean projection onto the slice; the outer search runs over a grid of
//! `mu` values, then refines around the best grid point.

use serde::Serialize;

use crate::ensemble::{Dataset, Label, LabelKind, Posterior, VoteView, Voter};
use crate::error::{Error, Result};
use crate::margins::check_omega;

/// Armijo sufficient-decrease constant.
const ARMIJO: f64 = 1e-4;
/// Step halvings before a point is declared stationary.
const MAX_HALVINGS: usize = 60;
/// Slack on `mu` feasibility against the vertex range.
const FEASIBILITY_TOL: f64 = 1e-12;
/// Golden-section iterations used to refine `mu` between grid neighbours.
const REFINE_STEPS: usize = 40;

/// Linear margin map `margins = A rho + b` with `b = -1/omega` on every row.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginOperator {
    /// Row-major `m x n` matrix of correctness indicators.
    pub a: Vec<Vec<f64>>,
    /// Constant offset added to every margin.
    pub offset: f64,
    pub weights: Vec<f64>,
}

/// Builds the correctness matrix of a multiclass voter pool.
pub fn margin_operator(dataset: &Dataset, voters: &[Voter], omega: f64) -> Result<MarginOperator> {
    check_omega(omega)?;
    let space = dataset.label_space();
    if space.kind() != LabelKind::Multiclass {
        return Err(Error::config(format!(
            "margin operator needs a multiclass dataset, got {}",
            space.kind().as_str()
        )));
    }
    if voters.is_empty() {
        return Err(Error::config("voter pool is empty"));
    }
    for (j, v) in voters.iter().enumerate() {
        v.validate(&space, dataset.len(), dataset.feature_dim())
            .map_err(|e| Error::config(format!("voter {j}: {e}")))?;
    }
    let a = dataset
        .examples()
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            let Label::Class(y) = ex.target else {
                unreachable!("multiclass dataset")
            };
            voters
                .iter()
                .map(|v| match v.vote(i, ex) {
                    VoteView::Class(c) if c == y => 1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    Ok(MarginOperator {
        a,
        offset: -1.0 / omega,
        weights: dataset.weights().collect(),
    })
}

impl MarginOperator {
    pub fn voters(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    /// Margin vector `A rho + b`.
    pub fn margins(&self, rho: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| dot(row, rho) + self.offset)
            .collect()
    }

    /// Rows shifted so that `margin_i = shifted_i . rho` on the simplex.
    fn shifted_rows(&self) -> Vec<Vec<f64>> {
        self.a
            .iter()
            .map(|row| row.iter().map(|x| x + self.offset).collect())
            .collect()
    }

    /// `mu1 = abar . rho` and `mu2 = rho' G rho` on the simplex.
    pub fn quadratic_form(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.voters();
        let rows = self.shifted_rows();
        let mut abar = vec![0.0; n];
        let mut gram = vec![vec![0.0; n]; n];
        for (row, w) in rows.iter().zip(&self.weights) {
            for j in 0..n {
                abar[j] += w * row[j];
                for k in 0..n {
                    gram[j][k] += w * row[j] * row[k];
                }
            }
        }
        (abar, gram)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quad(gram: &[Vec<f64>], rho: &[f64]) -> f64 {
    gram.iter().zip(rho).map(|(row, r)| r * dot(row, rho)).sum()
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            tau = t;
        }
    }
    y.iter().map(|v| (v - tau).max(0.0)).collect()
}

/// Euclidean projection of `z` onto `{rho >= 0, sum rho = 1, abar . rho = mu}`.
///
/// The projection has the form `max(0, z - lambda - nu abar)`. For fixed `nu`,
/// `lambda` comes from the simplex projection; `abar . rho(nu)` is
/// nonincreasing in `nu`, so `nu` is found by bisection. The result is then
/// polished by solving the two equality constraints on the detected support.
/// Returns `None` when `mu` lies outside `[min abar, max abar]`.
pub fn project_slice(z: &[f64], abar: &[f64], mu: f64) -> Option<Vec<f64>> {
    let lo = abar.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = abar.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mu < lo - FEASIBILITY_TOL || mu > hi + FEASIBILITY_TOL {
        return None;
    }
    let face = |target: f64| -> Vec<f64> {
        let idx: Vec<usize> = (0..z.len())
            .filter(|&j| (abar[j] - target).abs() <= FEASIBILITY_TOL)
            .collect();
        let sub = project_simplex(&idx.iter().map(|&j| z[j]).collect::<Vec<_>>());
        let mut out = vec![0.0; z.len()];
        for (&j, v) in idx.iter().zip(sub) {
            out[j] = v;
        }
        out
    };
    if hi - lo <= FEASIBILITY_TOL {
        return Some(project_simplex(z));
    }
    if mu >= hi - FEASIBILITY_TOL {
        return Some(face(hi));
    }
    if mu <= lo + FEASIBILITY_TOL {
        return Some(face(lo));
    }

    let at = |nu: f64| -> Vec<f64> {
        let shifted: Vec<f64> = z.iter().zip(abar).map(|(zj, aj)| zj - nu * aj).collect();
        project_simplex(&shifted)
    };
    let level = |nu: f64| dot(abar, &at(nu));

    let mut nu_lo = -1.0;
    let mut nu_hi = 1.0;
    while level(nu_lo) < mu && nu_lo > -1e300 {
        nu_lo *= 2.0;
    }
    while level(nu_hi) > mu && nu_hi < 1e300 {
        nu_hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (nu_lo + nu_hi);
        if mid <= nu_lo || mid >= nu_hi {
            break;
        }
        if level(mid) > mu {
            nu_lo = mid;
        } else {
            nu_hi = mid;
        }
    }
    let rough = at(0.5 * (nu_lo + nu_hi));

    // Solve sum rho = 1 and abar . rho = mu with the support fixed.
    let support: Vec<usize> = (0..z.len()).filter(|&j| rough[j] > 0.0).collect();
    let k = support.len() as f64;
    let sa: f64 = support.iter().map(|&j| abar[j]).sum();
    let saa: f64 = support.iter().map(|&j| abar[j] * abar[j]).sum();
    let sz: f64 = support.iter().map(|&j| z[j]).sum();
    let saz: f64 = support.iter().map(|&j| abar[j] * z[j]).sum();
    let det = k * saa - sa * sa;
    if det.abs() > 1e-14 {
        let r1 = sz - 1.0;
        let r2 = saz - mu;
        let lambda = (r1 * saa - sa * r2) / det;
        let nu = (k * r2 - sa * r1) / det;
        let mut polished = vec![0.0; z.len()];
        let mut ok = true;
        for &j in &support {
            let v = z[j] - lambda - nu * abar[j];
            if v < -1e-12 {
                ok = false;
                break;
            }
            polished[j] = v.max(0.0);
        }
        if ok {
            return Some(polished);
        }
    }
    Some(rough)
}

/// Solution of one fixed-`mu` subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSolution {
    pub rho: Vec<f64>,
    pub mu2: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after the starting projection and after every accepted step.
    pub objective_history: Vec<f64>,
}

/// Minimizes `rho' G rho` over the simplex slice `abar . rho = mu`, starting
/// from the projection of `start`.
pub fn solve_slice(
    gram: &[Vec<f64>],
    abar: &[f64],
    mu: f64,
    start: &[f64],
    max_iterations: usize,
    tolerance: f64,
) -> Option<SliceSolution> {
    let mut rho = project_slice(start, abar, mu)?;
    let mut f = quad(gram, &rho);
    let mut history = vec![f];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let grad: Vec<f64> = gram.iter().map(|row| 2.0 * dot(row, &rho)).collect();
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = rho.iter().zip(&grad).map(|(r, g)| r - step * g).collect();
            let cand = project_slice(&trial, abar, mu)?;
            let direction: f64 = grad
                .iter()
                .zip(cand.iter().zip(&rho))
                .map(|(g, (c, r))| g * (c - r))
                .sum();
            let fc = quad(gram, &cand);
            if fc <= f + ARMIJO * direction && fc <= f {
                accepted = Some((cand, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            converged = true;
            break;
        };
        let decrease = f - fc;
        rho = cand;
        f = fc;
        history.push(f);
        if decrease <= tolerance {
            converged = true;
            break;
        }
    }
    Some(SliceSolution {
        rho,
        mu2: f,
        iterations,
        converged,
        objective_history: history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeConfig {
    pub omega: f64,
    /// Target first moments. `None` selects `grid_points` values spaced
    /// geometrically up to the largest vertex first moment.
    pub mu_grid: Option<Vec<f64>>,
    pub grid_points: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Recorded for provenance; the solver itself is deterministic.
    pub seed: u64,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            omega: 2.0,
            mu_grid: None,
            grid_points: 20,
            max_iterations: 10_000,
            tolerance: 1e-8,
            seed: 0,
        }
    }
}

/// Outcome of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub mu: f64,
    pub feasible: bool,
    pub mu2: Option<f64>,
    pub bound: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective never increased across accepted steps.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub posterior: Posterior,
    pub mu: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grid: Vec<GridPoint>,
}

struct Problem {
    abar: Vec<f64>,
    gram: Vec<Vec<f64>>,
    uniform: Vec<f64>,
    max_iterations: usize,
    tolerance: f64,
}

struct Solved {
    point: GridPoint,
    solution: Option<SliceSolution>,
}

impl Problem {
    fn solve(&self, mu: f64) -> Solved {
        let mut point = GridPoint {
            mu,
            feasible: false,
            mu2: None,
            bound: None,
            iterations: 0,
            converged: false,
            monotone: true,
        };
        let lo = self.abar.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.abar.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(mu > 0.0) || mu < lo - FEASIBILITY_TOL || mu > hi + FEASIBILITY_TOL {
            return Solved {
                point,
                solution: None,
            };
        }
        let solution = solve_slice(
            &self.gram,
            &self.abar,
            mu,
            &self.uniform,
            self.max_iterations,
            self.tolerance,
        );
        if let Some(s) = &solution {
            let mu1 = dot(&self.abar, &s.rho);
            point.feasible = true;
            point.mu2 = Some(s.mu2);
            point.bound = Some(1.0 - mu1 * mu1 / s.mu2);
            point.iterations = s.iterations;
            point.converged = s.converged;
            point.monotone = s.objective_history.windows(2).all(|w| w[1] <= w[0]);
        }
        Solved { point, solution }
    }
}

/// Default target grid over the feasible first moments `[mu_min, mu_max]`.
///
/// When `mu_min > 0` the `points` values are evenly spaced over the interval.
/// Otherwise they are spaced geometrically from `min(1e-3, mu_max/2)` to
/// `mu_max`, which crowds them near zero where the bound changes fastest.
pub fn default_grid(mu_min: f64, mu_max: f64, points: usize) -> Vec<f64> {
    if !(mu_max > 0.0) || points == 0 || mu_min > mu_max {
        return Vec::new();
    }
    if points == 1 || mu_min == mu_max {
        return vec![mu_max];
    }
    let last = points - 1;
    if mu_min > 0.0 {
        let step = (mu_max - mu_min) / last as f64;
        return (0..points)
            .map(|k| {
                if k == last {
                    mu_max
                } else {
                    mu_min + step * k as f64
                }
            })
            .collect();
    }
    let lo = 1e-3f64.min(mu_max / 2.0);
    let ratio = (mu_max / lo).ln() / last as f64;
    (0..points)
        .map(|k| {
            if k == last {
                mu_max
            } else {
                lo * (ratio * k as f64).exp()
            }
        })
        .collect()
}

/// Learns a posterior over `voters` minimizing the omega-margin C-bound.
pub fn minimize(
    dataset: &Dataset,
    voters: &[Voter],
    config: &MinimizeConfig,
) -> Result<MinimizeResult> {
    let op = margin_operator(dataset, voters, config.omega)?;
    let n = voters.len();
    let (abar, gram) = op.quadratic_form();
    let vertex_min = abar.iter().copied().fold(f64::INFINITY, f64::min);
    let vertex_max = abar.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(vertex_max > FEASIBILITY_TOL) {
        return Err(Error::undefined(
            "theorem6",
            "every posterior has a nonpositive first omega-margin moment",
        ));
    }
    let uniform = vec![1.0 / n as f64; n];
    let problem = Problem {
        abar: abar.clone(),
        gram,
        uniform: uniform.clone(),
        max_iterations: config.max_iterations,
        tolerance: config.tolerance,
    };

    let cap = 1.0 - 1.0 / config.omega;
    let mut grid = match &config.mu_grid {
        Some(g) => {
            if let Some(bad) = g
                .iter()
                .find(|m| !(**m > 0.0) || **m > cap + FEASIBILITY_TOL)
            {
                return Err(Error::config(format!(
                    "grid value {bad} outside (0, {cap}]"
                )));
            }
            g.clone()
        }
        None => default_grid(vertex_min, vertex_max.min(cap), config.grid_points),
    };
    let uniform_mu = dot(&abar, &uniform);
    if uniform_mu > 0.0 && !grid.contains(&uniform_mu) {
        grid.push(uniform_mu);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut solved: Vec<Solved> = grid.iter().map(|&mu| problem.solve(mu)).collect();
    let best_index = solved
        .iter()
        .enumerate()
        .filter_map(|(k, s)| s.point.bound.map(|b| (k, b)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
        .ok_or_else(|| {
            Error::undefined("theorem6", "no grid value of the first moment is feasible")
        })?;

    // Golden-section refinement between the neighbours of the best grid point.
    // The best achievable ratio mu / sqrt(min mu2) is quasi-concave in mu.
    let mut best = best_index;
    if config.mu_grid.is_none() {
        let lo = if best_index > 0 {
            grid[best_index - 1]
        } else {
            grid[0]
        };
        let hi = grid
            .get(best_index + 1)
            .copied()
            .unwrap_or(grid[best_index]);
        let lo = lo.max(vertex_min);
        let hi = hi.min(vertex_max).min(cap);
        if hi > lo {
            let score = |s: &Solved| s.point.bound.unwrap_or(f64::INFINITY);
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            let (mut a, mut b) = (lo, hi);
            let mut c = b - phi * (b - a);
            let mut d = a + phi * (b - a);
            let mut sc = problem.solve(c);
            let mut sd = problem.solve(d);
            for _ in 0..REFINE_STEPS {
                if score(&sc) <= score(&sd) {
                    b = d;
                    d = c;
                    sd = sc;
                    c = b - phi * (b - a);
                    sc = problem.solve(c);
                } else {
                    a = c;
                    c = d;
                    sc = sd;
                    d = a + phi * (b - a);
                    sd = problem.solve(d);
                }
            }
            for cand in [sc, sd] {
                if score(&cand) < score(&solved[best]) {
                    solved.push(cand);
                    best = solved.len() - 1;
                }
            }
        }
    }

    let all_points: Vec<GridPoint> = solved.iter().map(|s| s.point.clone()).collect();
    let chosen = solved.swap_remove(best);
    let solution = chosen.solution.expect("best point is feasible");
    let mut rho = solution.rho;
    let total: f64 = rho.iter().sum();
    rho.iter_mut().for_each(|r| *r /= total);
    let margins = op.margins(&rho);
    let (mu1, mu2) = margins
        .iter()
        .zip(&op.weights)
        .fold((0.0, 0.0), |(a, b), (m, w)| (a + w * m, b + w * m * m));
    if !(mu1 > 0.0) {
        return Err(Error::undefined(
            "theorem6",
            format!("learned posterior has first omega-margin moment {mu1}"),
        ));
    }
    Ok(MinimizeResult {
        posterior: Posterior::new(rho)?,
        mu: chosen.point.mu,
        mu1,
        mu2,
        bound: 1.0 - mu1 * mu1 / mu2,
        iterations: all_points.iter().map(|p| p.iterations).sum(),
        converged: all_points
            .iter()
            .filter(|p| p.feasible)
            .all(|p| p.converged),
        grid: all_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{LabelSpace, Vote};

    fn dataset(q: usize, targets: &[usize]) -> Dataset {
        Dataset::uniform(
            LabelSpace::multiclass(q).unwrap(),
            targets.iter().map(|_| vec![0.0]).collect(),
            targets.iter().map(|&c| Label::Class(c)).collect(),
        )
        .unwrap()
    }

    fn table(classes: &[usize]) -> Voter {
        Voter::Table(classes.iter().map(|&c| Vote::Class(c)).collect())
    }

    #[test]
    fn operator_columns() {
        let ds = dataset(3, &[0, 1, 2]);
        let op = margin_operator(&ds, &[table(&[0, 1, 2]), table(&[1, 2, 0])], 2.0).unwrap();
        assert_eq!(op.a, vec![vec![1.0, 0.0]; 3]);
        assert_eq!(op.offset, -0.5);
        assert_eq!(op.margins(&[0.3, 0.7]), vec![-0.2; 3]);
        assert_eq!(op.margins(&[1.0, 0.0]), vec![0.5; 3]);
    }

    #[test]
    fn operator_rejects_bad_inputs() {
        let ds = dataset(3, &[0, 1]);
        assert!(margin_operator(&ds, &[], 2.0).is_err());
        assert!(margin_operator(&ds, &[table(&[0])], 2.0).is_err());
        assert!(margin_operator(&ds, &[table(&[0, 1])], 0.5).is_err());
    }

    #[test]
    fn simplex_projection_known_values() {
        assert_eq!(project_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_simplex(&[1.0, 1.0, 1.0]);
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn slice_projection_is_feasible_and_optimal() {
        let abar = [0.5, -0.5, 0.1, 0.3];
        let z = [0.9, -0.4, 0.3, 0.6];
        let mu = 0.2;
        let p = project_slice(&z, &abar, mu).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((dot(&abar, &p) - mu).abs() < 1e-12);
        assert!(p.iter().all(|v| *v >= 0.0));
        // no feasible point on a fine grid is closer to z
        let d = |x: &[f64]| x.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let best = d(&p);
        let steps = 60;
        for i in 0..=steps {
            for j in 0..=steps - i {
                let (a, b) = (i as f64 / steps as f64, j as f64 / steps as f64);
                let rest = 1.0 - a - b;
                // solve for the last two coordinates on the slice
                let r = mu - abar[0] * a - abar[1] * b;
                let x3 = (r - abar[3] * rest) / (abar[2] - abar[3]);
                let x4 = rest - x3;
                if x3 >= 0.0 && x4 >= 0.0 {
                    assert!(d(&[a, b, x3, x4]) >= best - 1e-12);
                }
            }
        }
        assert!(project_slice(&z, &abar, 0.6).is_none());
        assert_eq!(
            project_slice(&z, &abar, 0.5).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn single_voter_returns_unit_posterior() {
        let ds = dataset(3, &[0, 1, 2, 0]);
        let r = minimize(&ds, &[table(&[0, 1, 0, 0])], &MinimizeConfig::default()).unwrap();
        assert_eq!(r.posterior.weights(), &[1.0]);
        // margins 1/2, 1/2, -1/2, 1/2: mu1 = 1/4, mu2 = 1/4
        assert!((r.bound - 0.75).abs() < 1e-12);
    }

    #[test]
    fn duplicate_voters_match_single_voter() {
        let ds = dataset(3, &[0, 1, 2, 0]);
        let v = table(&[0, 1, 0, 0]);
        let single = minimize(&ds, std::slice::from_ref(&v), &MinimizeConfig::default()).unwrap();
        let double = minimize(&ds, &[v.clone(), v], &MinimizeConfig::default()).unwrap();
        assert!((single.bound - double.bound).abs() < 1e-12);
    }

    #[test]
    fn infeasible_pool_is_undefined() {
        let ds = dataset(3, &[0, 1]);
        let r = minimize(
            &ds,
            &[table(&[1, 0]), table(&[2, 2])],
            &MinimizeConfig::default(),
        );
        assert!(matches!(r, Err(Error::BoundUndefined { .. })));
    }

    #[test]
    fn explicit_grid_is_validated() {
        let ds = dataset(3, &[0, 1]);
        let cfg = MinimizeConfig {
            mu_grid: Some(vec![0.6]),
            ..MinimizeConfig::default()
        };
        assert!(matches!(
            minimize(&ds, &[table(&[0, 1])], &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid(-0.2, 0.4, 20);
        assert_eq!(g.len(), 20);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert_eq!(g[19], 0.4);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(default_grid(-0.1, 0.0, 20).is_empty());

        let g = default_grid(0.3, 0.4, 11);
        assert_eq!(g[0], 0.3);
        assert_eq!(g[10], 0.4);
        assert!((g[5] - 0.35).abs() < 1e-15);
        assert_eq!(default_grid(0.25, 0.25, 20), vec![0.25]);
    }
}
