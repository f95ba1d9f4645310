//! Genetic algorithm for the multi-UAV tour problem.
//!
//! A chromosome is a permutation of all cluster heads plus `U' - 1` sorted,
//! distinct breakpoints that cut it into one nonempty route per UAV. Fitness
//! is the total flown length. Each generation keeps an elite unchanged and
//! fills the rest with tournament-selected parents recombined by ordered
//! crossover, followed by swap mutation of the permutation and occasional
//! uniform redraws of the breakpoints.
//!
//! With a fairness threshold, any individual whose route-length standard
//! deviation exceeds it has infinite fitness; such individuals only compete
//! with each other, by how far they overshoot.

use std::cmp::Ordering;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{population_std, RoutePlan, RouteProblem};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SeededRng};

const TOURNAMENT_SIZE: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GAConfig {
    pub population_size: usize,
    pub max_generations: usize,
    /// Per-gene swap probability; also the per-breakpoint redraw probability.
    pub mutation_rate: f64,
    pub elite_fraction: f64,
    /// Stop once the best fitness has not improved for this many generations.
    pub stall_generations: usize,
    /// Fairness bound on the route-length standard deviation, meters.
    pub delta_threshold: Option<f64>,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            population_size: 500,
            max_generations: 1000,
            mutation_rate: 0.02,
            elite_fraction: 0.05,
            stall_generations: 150,
            delta_threshold: None,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::invalid("GA population must hold at least 2 individuals"));
        }
        if self.max_generations < 1 {
            return Err(Error::invalid("GA needs at least one generation"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) || !(0.0..=1.0).contains(&self.elite_fraction) {
            return Err(Error::invalid("GA rates must lie in [0, 1]"));
        }
        if let Some(d) = self.delta_threshold {
            if d.is_nan() || d < 0.0 {
                return Err(Error::invalid("fairness threshold must be non-negative"));
            }
        }
        Ok(())
    }

    fn elite_count(&self) -> usize {
        ((self.elite_fraction * self.population_size as f64).round() as usize).clamp(1, self.population_size)
    }
}

/// Outcome of a GA run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaRun {
    pub plan: RoutePlan,
    /// Best fitness after each generation; index 0 is the initial population.
    pub best_history: Vec<f64>,
    pub generations: usize,
}

#[derive(Debug, Clone)]
struct Individual {
    perm: Vec<usize>,
    breaks: Vec<usize>,
    fitness: f64,
    violation: f64,
}

impl Individual {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.fitness
            .total_cmp(&other.fitness)
            .then(self.violation.total_cmp(&other.violation))
    }

    fn routes(&self) -> Vec<Vec<usize>> {
        let mut cuts = Vec::with_capacity(self.breaks.len() + 2);
        cuts.push(0);
        cuts.extend_from_slice(&self.breaks);
        cuts.push(self.perm.len());
        cuts.windows(2).map(|w| self.perm[w[0]..w[1]].to_vec()).collect()
    }
}

struct Evaluator {
    dist: Vec<Vec<f64>>,
    delta: Option<f64>,
}

impl Evaluator {
    fn route_len(&self, route: &[usize]) -> f64 {
        let (Some(&first), Some(&last)) = (route.first(), route.last()) else {
            return 0.0;
        };
        let inner: f64 = route.windows(2).map(|w| self.dist[w[0] + 1][w[1] + 1]).sum();
        self.dist[0][first + 1] + inner + self.dist[last + 1][0]
    }

    fn score(&self, ind: &mut Individual) {
        let mut lengths = Vec::with_capacity(ind.breaks.len() + 1);
        let mut start = 0;
        for &end in ind.breaks.iter().chain(std::iter::once(&ind.perm.len())) {
            lengths.push(self.route_len(&ind.perm[start..end]));
            start = end;
        }
        let total: f64 = lengths.iter().sum();
        ind.violation = match self.delta {
            Some(delta) => (population_std(&lengths) - delta).max(0.0),
            None => 0.0,
        };
        ind.fitness = if ind.violation > 0.0 { f64::INFINITY } else { total };
    }
}

fn random_breaks(rng: &mut SeededRng, n: usize, uavs: usize) -> Vec<usize> {
    if uavs <= 1 {
        return Vec::new();
    }
    let mut b: Vec<usize> = sample(rng, n - 1, uavs - 1).into_iter().map(|i| i + 1).collect();
    b.sort_unstable();
    b
}

/// Ordered crossover: keep a random slice of `p1` in place, fill the other
/// positions with the remaining genes in the order they follow the slice in `p2`.
pub(crate) fn ordered_crossover(p1: &[usize], p2: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let n = p1.len();
    if n < 2 {
        return p1.to_vec();
    }
    let mut a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in a..=b {
        child[i] = p1[i];
        used[p1[i]] = true;
    }
    let mut pos = (b + 1) % n;
    for off in 0..n {
        let gene = p2[(b + 1 + off) % n];
        if !used[gene] {
            child[pos] = gene;
            used[gene] = true;
            pos = (pos + 1) % n;
        }
    }
    child
}

pub(crate) fn swap_mutation(perm: &mut [usize], rate: f64, rng: &mut impl Rng) {
    let n = perm.len();
    if n < 2 || rate <= 0.0 {
        return;
    }
    for i in 0..n {
        if rng.gen_bool(rate) {
            let j = rng.gen_range(0..n);
            perm.swap(i, j);
        }
    }
}

fn redraw_breaks(breaks: &mut [usize], n: usize, rate: f64, rng: &mut SeededRng) {
    for i in 0..breaks.len() {
        if rate > 0.0 && rng.gen_bool(rate) {
            // uniform over the positions not used by the other breakpoints
            let others: Vec<usize> = breaks.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &b)| b).collect();
            let free: Vec<usize> = (1..n).filter(|p| !others.contains(p)).collect();
            breaks[i] = *free.choose(rng).expect("a free cut position exists");
            breaks.sort_unstable();
        }
    }
}

fn tournament<'a>(pop: &'a [Individual], rng: &mut SeededRng) -> &'a Individual {
    let mut best = &pop[rng.gen_range(0..pop.len())];
    for _ in 1..TOURNAMENT_SIZE {
        let cand = &pop[rng.gen_range(0..pop.len())];
        if cand.key_cmp(best) == Ordering::Less {
            best = cand;
        }
    }
    best
}

/// Runs the GA, honoring `cfg.delta_threshold` when set.
pub fn run_ga(problem: &RouteProblem, cfg: &GAConfig, seed: u64) -> Result<GaRun> {
    problem.validate()?;
    cfg.validate()?;
    let n = problem.chs.len();
    let uavs = problem.uavs;
    let eval = Evaluator {
        dist: problem.distance_matrix(),
        delta: cfg.delta_threshold,
    };
    let mut rng = rng_from_seed(seed);

    let mut population: Vec<Individual> = (0..cfg.population_size)
        .map(|_| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let breaks = random_breaks(&mut rng, n, uavs);
            let mut ind = Individual {
                perm,
                breaks,
                fitness: 0.0,
                violation: 0.0,
            };
            eval.score(&mut ind);
            ind
        })
        .collect();
    population.sort_by(Individual::key_cmp);

    let elites = cfg.elite_count();
    let mut history = vec![population[0].fitness];
    let mut stall = 0;
    let mut generations = 0;

    while generations < cfg.max_generations && stall < cfg.stall_generations {
        let mut next: Vec<Individual> = population[..elites].to_vec();
        while next.len() < cfg.population_size {
            let p1 = tournament(&population, &mut rng);
            let p2 = tournament(&population, &mut rng);
            let mut perm = ordered_crossover(&p1.perm, &p2.perm, &mut rng);
            let mut breaks = p1.breaks.clone();
            swap_mutation(&mut perm, cfg.mutation_rate, &mut rng);
            redraw_breaks(&mut breaks, n, cfg.mutation_rate, &mut rng);
            let mut child = Individual {
                perm,
                breaks,
                fitness: 0.0,
                violation: 0.0,
            };
            eval.score(&mut child);
            next.push(child);
        }
        next.sort_by(Individual::key_cmp);
        let improved = next[0].key_cmp(&population[0]) == Ordering::Less;
        population = next;
        generations += 1;
        history.push(population[0].fitness);
        stall = if improved { 0 } else { stall + 1 };
    }

    let best = &population[0];
    if best.fitness.is_infinite() {
        return Err(Error::Infeasible(format!(
            "no plan with route-length std <= {:.3} m found in {generations} generations (closest overshoot {:.3} m)",
            cfg.delta_threshold.unwrap_or(f64::INFINITY),
            best.violation
        )));
    }
    Ok(GaRun {
        plan: problem.plan_from_routes(best.routes()),
        best_history: history,
        generations,
    })
}

/// Shortest-total-length plan found by the GA, with no fairness constraint.
pub fn ga_mtsp(problem: &RouteProblem, cfg: &GAConfig, seed: u64) -> Result<RoutePlan> {
    let cfg = GAConfig {
        delta_threshold: None,
        ..cfg.clone()
    };
    run_ga(problem, &cfg, seed).map(|r| r.plan)
}

/// As [`ga_mtsp`], restricted to plans whose route-length standard deviation
/// is at most `delta_threshold` meters.
pub fn ga_mtsp_fair(problem: &RouteProblem, cfg: &GAConfig, seed: u64, delta_threshold: f64) -> Result<RoutePlan> {
    let cfg = GAConfig {
        delta_threshold: Some(delta_threshold),
        ..cfg.clone()
    };
    run_ga(problem, &cfg, seed).map(|r| r.plan)
}
