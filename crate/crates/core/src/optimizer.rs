//! Minimum total SFN transmit power subject to an outage target.
//!
//! ```text
//! minimise  sum P_i
//! s.t.      P_T(theta_hat) <= t_hat,   0 <= P_i <= p_max
//! ```
//!
//! The constraint is evaluated with the analytic outage, which is
//! non-increasing in every `P_i`. Two solvers are provided: a uniform-power
//! bisection baseline and a real-coded genetic search seeded with it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::analytic::OutageModel;
use crate::error::{Result, SfnError};
use crate::scenario::Scenario;

/// Slack on the outage constraint when checking a returned solution.
pub const CONSTRAINT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PaProblem {
    /// Deployment; station powers in here are ignored.
    pub scenario: Scenario,
    pub theta_hat: f64,
    pub t_hat: f64,
    pub p_max: f64,
}

impl PaProblem {
    pub fn new(scenario: Scenario, theta_hat: f64, t_hat: f64, p_max: f64) -> Result<Self> {
        let problem = PaProblem {
            scenario,
            theta_hat,
            t_hat,
            p_max,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_hat > 0.0) || !self.theta_hat.is_finite() {
            return Err(SfnError::invalid("theta_hat", "must be finite and > 0"));
        }
        if !(self.t_hat > 0.0 && self.t_hat <= 1.0) {
            return Err(SfnError::invalid("t_hat", "must lie in (0, 1]"));
        }
        if !(self.p_max > 0.0) || !self.p_max.is_finite() {
            return Err(SfnError::invalid("p_max", "must be finite and > 0"));
        }
        self.scenario.validate()
    }

    pub fn num_stations(&self) -> usize {
        self.scenario.num_stations()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaSolution {
    /// Empty when infeasible.
    pub powers: Vec<f64>,
    /// NaN when infeasible.
    pub total_power: f64,
    /// Outage at the returned powers, or at full power when infeasible.
    pub achieved_outage: f64,
    pub feasible: bool,
}

impl PaSolution {
    fn infeasible(outage_at_max: f64) -> Self {
        PaSolution {
            powers: Vec::new(),
            total_power: f64::NAN,
            achieved_outage: outage_at_max,
            feasible: false,
        }
    }
}

/// Constraint oracle shared by both solvers.
struct Constraint {
    model: OutageModel,
    theta: f64,
    target: f64,
    p_max: f64,
}

impl Constraint {
    fn new(problem: &PaProblem) -> Result<Self> {
        problem.validate()?;
        Ok(Constraint {
            model: OutageModel::new(&problem.scenario)?,
            theta: problem.theta_hat,
            target: problem.t_hat,
            p_max: problem.p_max,
        })
    }

    fn outage(&self, powers: &[f64]) -> Result<f64> {
        Ok(self.model.outage(powers, self.theta)?.probability)
    }

    /// Evaluation failures count as violations.
    fn holds(&self, powers: &[f64]) -> bool {
        self.outage(powers).is_ok_and(|p| p <= self.target)
    }

    fn outage_at_max(&self) -> Result<f64> {
        self.outage(&vec![self.p_max; self.model.num_stations()])
    }

    /// Smallest `t` in `[0, 1]` with `holds(path(t))`, assuming `holds(path(1))`
    /// and monotonicity along the path. Returns the feasible end of the bracket.
    fn bisect_path(&self, path: impl Fn(f64) -> Vec<f64>, rel_tol: f64) -> f64 {
        if self.holds(&path(0.0)) {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            if hi - lo <= rel_tol * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.holds(&path(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    fn solution(&self, powers: Vec<f64>) -> Result<PaSolution> {
        let achieved = self.outage(&powers)?;
        Ok(PaSolution {
            total_power: powers.iter().sum(),
            feasible: achieved <= self.target + CONSTRAINT_SLACK,
            achieved_outage: achieved,
            powers,
        })
    }
}

/// True when full power on every station meets the outage target.
pub fn check_feasibility(problem: &PaProblem) -> bool {
    Constraint::new(problem).is_ok_and(|c| c.holds(&vec![c.p_max; c.model.num_stations()]))
}

fn require_feasible(c: &Constraint) -> Result<()> {
    let at_max = c.outage_at_max()?;
    if at_max > c.target {
        return Err(SfnError::Infeasible {
            outage_at_max: at_max,
            target: c.target,
        });
    }
    Ok(())
}

/// Relative tolerance of the uniform-power bisection.
pub const BISECTION_RTOL: f64 = 1e-6;

/// Smallest common power meeting the target.
pub fn solve_uniform_bisection(problem: &PaProblem) -> Result<PaSolution> {
    let c = Constraint::new(problem)?;
    require_feasible(&c)?;
    let m = c.model.num_stations();
    let t = c.bisect_path(|t| vec![t * c.p_max; m], BISECTION_RTOL);
    c.solution(vec![t * c.p_max; m])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    /// Number of candidate evaluations (one per individual per generation).
    pub budget: usize,
    pub seed: u64,
    pub population: usize,
    /// Fraction of the population kept as parents.
    pub parent_fraction: f64,
    /// Initial mutation scale as a fraction of `p_max`.
    pub mutation_scale: f64,
    pub mutation_decay: f64,
    pub crossover_prob: f64,
    pub elites: usize,
    /// Relative precision of the repair line search.
    pub repair_rtol: f64,
}

impl EvolutionConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        EvolutionConfig {
            budget,
            seed,
            population: 32,
            parent_fraction: 0.25,
            mutation_scale: 0.1,
            mutation_decay: 0.95,
            crossover_prob: 0.5,
            elites: 2,
            repair_rtol: 1e-9,
        }
    }
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig::new(3200, 7)
    }
}

#[derive(Debug, Clone)]
struct Individual {
    powers: Vec<f64>,
    total: f64,
    peak: f64,
    feasible: bool,
}

impl Individual {
    fn new(powers: Vec<f64>, feasible: bool) -> Self {
        Individual {
            total: powers.iter().sum(),
            peak: powers.iter().copied().fold(0.0, f64::max),
            powers,
            feasible,
        }
    }

    /// Feasible first, then lower total, then lower peak power.
    fn rank_key(&self) -> (bool, f64, f64) {
        (!self.feasible, self.total, self.peak)
    }
}

fn cmp_individuals(a: &Individual, b: &Individual) -> std::cmp::Ordering {
    let (fa, ta, pa) = a.rank_key();
    let (fb, tb, pb) = b.rank_key();
    fa.cmp(&fb).then(ta.total_cmp(&tb)).then(pa.total_cmp(&pb))
}

impl Constraint {
    /// Moves a candidate onto the constraint boundary: feasible points are
    /// scaled down toward zero, infeasible ones pushed toward `p_max` along
    /// `P + t (p_max - P)`. Both directions are monotone in the outage.
    fn repair(&self, mut powers: Vec<f64>, rtol: f64) -> Individual {
        for p in powers.iter_mut() {
            *p = p.clamp(0.0, self.p_max);
        }
        if self.holds(&powers) {
            let s = self.bisect_path(|s| powers.iter().map(|p| s * p).collect(), rtol);
            return Individual::new(powers.iter().map(|p| s * p).collect(), true);
        }
        let path = |t: f64| -> Vec<f64> {
            powers
                .iter()
                .map(|&p| {
                    if t >= 1.0 {
                        self.p_max
                    } else {
                        p + t * (self.p_max - p)
                    }
                })
                .collect()
        };
        if !self.holds(&path(1.0)) {
            return Individual::new(powers, false);
        }
        let t = self.bisect_path(path, rtol);
        Individual::new(path(t), true)
    }

    /// Zeroes powers below `1e-6 p_max` when that keeps the point feasible.
    fn snap_off(&self, ind: Individual) -> Individual {
        let floor = 1e-6 * self.p_max;
        if !ind.powers.iter().any(|&p| p > 0.0 && p < floor) {
            return ind;
        }
        let snapped: Vec<f64> = ind
            .powers
            .iter()
            .map(|&p| if p < floor { 0.0 } else { p })
            .collect();
        if self.holds(&snapped) {
            Individual::new(snapped, true)
        } else {
            ind
        }
    }
}

/// Genetic search over `[0, p_max]^M` with repair onto the constraint
/// boundary. The uniform bisection solution is part of the initial
/// population and elitism keeps the best point, so the result never uses
/// more power than the uniform baseline.
pub fn solve_evolutionary(problem: &PaProblem, budget: usize, seed: u64) -> Result<PaSolution> {
    solve_evolutionary_with(problem, &EvolutionConfig::new(budget, seed))
}

pub fn solve_evolutionary_with(problem: &PaProblem, config: &EvolutionConfig) -> Result<PaSolution> {
    let c = Constraint::new(problem)?;
    require_feasible(&c)?;
    let pop_size = config.population.max(4);
    if config.budget < pop_size {
        return Err(SfnError::invalid(
            "budget",
            format!("must be at least the population size {pop_size}"),
        ));
    }
    let m = c.model.num_stations();
    let p_max = c.p_max;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let uniform = solve_uniform_bisection(problem)?;
    let seed_ind = Individual::new(uniform.powers.clone(), true);

    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(pop_size - 1);
    for _ in 1..pop_size {
        raw.push((0..m).map(|_| rng.random::<f64>() * p_max).collect());
    }
    let mut population: Vec<Individual> = raw
        .into_par_iter()
        .map(|p| c.repair(p, config.repair_rtol))
        .collect();
    population.push(seed_ind);
    population.sort_by(cmp_individuals);

    let generations = config.budget / pop_size;
    let n_parents = ((pop_size as f64 * config.parent_fraction).round() as usize).clamp(2, pop_size);
    let elites = config.elites.min(pop_size);
    let mut sigma = config.mutation_scale * p_max;

    for _ in 1..generations {
        let normal = Normal::new(0.0, sigma).expect("finite mutation scale");
        let mut children = Vec::with_capacity(pop_size - elites);
        for _ in elites..pop_size {
            let a = &population[rng.random_range(0..n_parents)];
            let b = &population[rng.random_range(0..n_parents)];
            let child: Vec<f64> = (0..m)
                .map(|i| {
                    let gene = if rng.random_bool(config.crossover_prob) {
                        a.powers[i]
                    } else {
                        b.powers[i]
                    };
                    (gene + normal.sample(&mut rng)).clamp(0.0, p_max)
                })
                .collect();
            children.push(child);
        }
        let mut next: Vec<Individual> = population[..elites].to_vec();
        next.extend(
            children
                .into_par_iter()
                .map(|p| c.repair(p, config.repair_rtol))
                .collect::<Vec<_>>(),
        );
        next.sort_by(cmp_individuals);
        population = next;
        sigma *= config.mutation_decay;
    }

    let best = c.snap_off(population.swap_remove(0));
    let candidate = c.solution(best.powers)?;
    if candidate.feasible && candidate.total_power <= uniform.total_power {
        Ok(candidate)
    } else {
        Ok(uniform)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    Bisection,
    Evolutionary { budget: usize, seed: u64 },
}

impl Solver {
    pub fn solve(&self, problem: &PaProblem) -> Result<PaSolution> {
        match *self {
            Solver::Bisection => solve_uniform_bisection(problem),
            Solver::Evolutionary { budget, seed } => solve_evolutionary(problem, budget, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Linear SINR targets.
    Theta(Vec<f64>),
    /// Interferer densities per square metre.
    Lambda(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta_hat: f64,
    pub lambda_i: f64,
    pub solution: PaSolution,
}

/// One solve per axis value. Infeasible points come back as rows with
/// `feasible == false`; parameter errors are still reported.
pub fn sweep_pa(template: &PaProblem, axis: &SweepAxis, solver: Solver) -> Result<Vec<SweepRow>> {
    let problems: Vec<PaProblem> = match axis {
        SweepAxis::Theta(values) => values
            .iter()
            .map(|&t| PaProblem {
                theta_hat: t,
                ..template.clone()
            })
            .collect(),
        SweepAxis::Lambda(values) => values
            .iter()
            .map(|&l| PaProblem {
                scenario: template.scenario.with_lambda(l),
                ..template.clone()
            })
            .collect(),
    };
    if problems.is_empty() {
        return Err(SfnError::invalid("sweep", "axis has no values"));
    }
    problems
        .iter()
        .map(|p| {
            p.validate()?;
            let solution = match solver.solve(p) {
                Ok(s) => s,
                Err(SfnError::Infeasible { outage_at_max, .. }) => PaSolution::infeasible(outage_at_max),
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                theta_hat: p.theta_hat,
                lambda_i: p.scenario.interference.lambda_i,
                solution,
            })
        })
        .collect()
}
