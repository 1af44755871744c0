//! Ant colony wrapper feature selection.
//!
//! Every feature carries its own pheromone `τ_i` and heuristic desirability
//! `η_i`; the search graph is fully connected, so an ant's tour is simply the
//! order in which it adds features to its subset. After each addition the ant
//! measures the retrieval F-measure of its partial subset and stops once
//!
//! ```text
//! φ·exp(−|subset| / N) + ω·exp(F) ≥ θ
//! ```
//!
//! Each ant then deposits `α·F + β·(N − |subset|) / N` on every feature of its
//! subset, trails evaporate by `ρ`, and the elite ant deposits once more.
//!
//! Runs are reproducible: ant `a` of iteration `t` draws from its own ChaCha
//! stream keyed by `(seed, t, a)`, so serial and parallel colonies agree bit
//! for bit.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::{mean_f_measure, select_queries, QueryPolicy};
use crate::mask::FeatureMask;
use crate::rank::{ImageIndex, Ranker};
use crate::schema::FEATURE_COUNT;

/// Which ant lays the extra elitist deposit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elitism {
    /// Best ant of the iteration being deposited.
    IterationBest,
    /// Best ant seen so far in the run.
    GlobalBest,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcoConfig {
    /// Pheromone exponent γ.
    pub gamma: f64,
    /// Heuristic exponent δ.
    pub delta: f64,
    /// Deposit weight on F-measure.
    pub alpha: f64,
    /// Deposit weight on subset compactness.
    pub beta: f64,
    /// Evaporation rate.
    pub rho: f64,
    /// Stop-rule weight on subset size.
    pub phi: f64,
    /// Stop-rule weight on F-measure.
    pub omega: f64,
    pub ants: usize,
    pub iterations: usize,
    pub tau0: f64,
    /// Stop threshold θ.
    pub theta: f64,
    /// Result count used by the fitness evaluation.
    pub k: usize,
    pub queries: QueryPolicy,
    pub elitism: Elitism,
}

/// `φ·exp(−0.33) + ω·exp(0.5)`: an ant reaching F = 0.5 stops while it holds
/// at most a third of the features.
pub fn default_theta(phi: f64, omega: f64) -> f64 {
    phi * libm::exp(-0.33) + omega * libm::exp(0.5)
}

impl Default for AcoConfig {
    fn default() -> Self {
        let (phi, omega) = (0.2, 0.8);
        Self {
            gamma: 1.0,
            delta: 2.0,
            alpha: 0.7,
            beta: 0.3,
            rho: 0.2,
            phi,
            omega,
            ants: 20,
            iterations: 50,
            tau0: 1.0,
            theta: default_theta(phi, omega),
            k: 20,
            queries: QueryPolicy::Stratified { per_class: 5 },
            elitism: Elitism::IterationBest,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        let params = [
            self.gamma, self.delta, self.alpha, self.beta, self.rho, self.phi, self.omega, self.tau0,
        ];
        if params.iter().any(|v| !v.is_finite()) || self.theta.is_nan() {
            return bad("parameters must be finite");
        }
        if (self.phi + self.omega - 1.0).abs() > 1e-9 {
            return bad("phi + omega must equal 1");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must lie in (0, 1)");
        }
        if self.gamma < 0.0 || self.delta < 0.0 {
            return bad("gamma and delta must be non-negative");
        }
        if self.tau0 <= 0.0 {
            return bad("tau0 must be positive");
        }
        if self.ants == 0 {
            return bad("at least one ant is required");
        }
        if self.k == 0 {
            return bad("k must be positive");
        }
        if let QueryPolicy::Stratified { per_class: 0 } = self.queries {
            return bad("queries_per_class must be positive");
        }
        Ok(())
    }
}

/// Maps a candidate subset to its retrieval F-measure in `[0, 1]`.
pub trait Fitness: Sync {
    fn f_measure(&self, mask: &FeatureMask) -> Result<f64>;
}

impl<F> Fitness for F
where
    F: Fn(&FeatureMask) -> Result<f64> + Sync,
{
    fn f_measure(&self, mask: &FeatureMask) -> Result<f64> {
        self(mask)
    }
}

/// Mean query F-measure of top-K retrieval over a fixed query set.
pub struct RetrievalFitness<'r, 'i> {
    ranker: &'r Ranker<'i>,
    queries: Vec<usize>,
    k: usize,
}

impl<'r, 'i> RetrievalFitness<'r, 'i> {
    pub fn new(ranker: &'r Ranker<'i>, policy: QueryPolicy, k: usize) -> Self {
        Self {
            queries: select_queries(ranker, policy),
            ranker,
            k,
        }
    }

    pub fn queries(&self) -> &[usize] {
        &self.queries
    }
}

impl Fitness for RetrievalFitness<'_, '_> {
    fn f_measure(&self, mask: &FeatureMask) -> Result<f64> {
        let plan = self.ranker.plan(mask)?;
        Ok(mean_f_measure(self.ranker, &self.queries, &plan, self.k))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AntResult {
    pub mask: FeatureMask,
    pub f_measure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcoState {
    pub tau: Vec<f64>,
    pub eta: Vec<f64>,
    /// Completed iterations.
    pub iteration: usize,
    /// Best ant seen so far.
    pub best: Option<AntResult>,
}

impl AcoState {
    pub fn new(eta: Vec<f64>, config: &AcoConfig) -> Result<Self> {
        if eta.len() != FEATURE_COUNT {
            return Err(Error::LengthMismatch {
                expected: FEATURE_COUNT,
                actual: eta.len(),
            });
        }
        if eta.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::InvalidConfig(
                "heuristic values must be finite and non-negative".to_string(),
            ));
        }
        Ok(Self {
            tau: alloc::vec![config.tau0; FEATURE_COUNT],
            eta,
            iteration: 0,
            best: None,
        })
    }
}

/// Selection probability of every feature given the ones already visited.
pub fn transition_probabilities(state: &AcoState, visited: &FeatureMask, config: &AcoConfig) -> Result<Vec<f64>> {
    let n = state.tau.len();
    let open = |i: usize| !visited.contains(i);
    if !(0..n).any(open) {
        return Err(Error::NoCandidates);
    }
    let mut weights: Vec<f64> = (0..n)
        .map(|i| {
            if open(i) {
                libm::pow(state.tau[i], config.gamma) * libm::pow(state.eta[i], config.delta)
            } else {
                0.0
            }
        })
        .collect();
    let mut total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        // no heuristic signal left among the candidates: pheromone alone
        for (i, w) in weights.iter_mut().enumerate() {
            *w = if open(i) { libm::pow(state.tau[i], config.gamma) } else { 0.0 };
        }
        total = weights.iter().sum();
    }
    if !(total > 0.0 && total.is_finite()) {
        for (i, w) in weights.iter_mut().enumerate() {
            *w = if open(i) { 1.0 } else { 0.0 };
        }
        total = weights.iter().sum();
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Stop-rule value `φ·exp(−selected/total) + ω·exp(F)`.
pub fn ant_threshold(selected: usize, total: usize, f_measure: f64, config: &AcoConfig) -> f64 {
    config.phi * libm::exp(-(selected as f64) / total as f64) + config.omega * libm::exp(f_measure)
}

/// Pheromone an ant lays on each feature of its subset.
pub fn pheromone_deposit(mask: &FeatureMask, f_measure: f64, config: &AcoConfig) -> f64 {
    let n = FEATURE_COUNT as f64;
    config.alpha * f_measure + config.beta * (n - mask.count() as f64) / n
}

fn sample(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

fn checked_fitness(fitness: &dyn Fitness, mask: &FeatureMask) -> Result<f64> {
    let f = fitness.f_measure(mask)?;
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Fitness(alloc::format!("F-measure {f} outside [0, 1]")));
    }
    Ok(f)
}

/// One ant's tour: a uniformly random first feature, then transition-rule
/// picks until the stop rule fires or every feature is taken.
pub fn construct_solution<R: Rng + ?Sized>(
    state: &AcoState,
    config: &AcoConfig,
    fitness: &dyn Fitness,
    rng: &mut R,
) -> Result<AntResult> {
    let n = state.tau.len();
    let mut mask = FeatureMask::empty();
    mask.insert(rng.random_range(0..n));
    loop {
        let f = checked_fitness(fitness, &mask)?;
        let size = mask.count();
        if size == n || ant_threshold(size, n, f, config) >= config.theta {
            return Ok(AntResult { mask, f_measure: f });
        }
        let probs = transition_probabilities(state, &mask, config)?;
        mask.insert(sample(&probs, rng.random::<f64>()));
    }
}

fn iteration_best(ants: &[AntResult]) -> Option<&AntResult> {
    ants.iter()
        .fold(None, |best: Option<&AntResult>, a| match best {
            Some(b) if b.f_measure >= a.f_measure => Some(b),
            _ => Some(a),
        })
}

/// Evaporation, per-ant deposits and the elitist deposit; also advances the
/// iteration counter and the best-so-far record.
pub fn update_pheromones(state: &mut AcoState, ants: &[AntResult], config: &AcoConfig) {
    let it_best = iteration_best(ants).cloned();
    if let Some(b) = &it_best {
        if state.best.as_ref().is_none_or(|g| b.f_measure > g.f_measure) {
            state.best = Some(b.clone());
        }
    }
    for t in &mut state.tau {
        *t *= 1.0 - config.rho;
    }
    for ant in ants {
        let d = pheromone_deposit(&ant.mask, ant.f_measure, config);
        for i in ant.mask.indices() {
            state.tau[i] += d;
        }
    }
    let elite = match config.elitism {
        Elitism::IterationBest => it_best,
        Elitism::GlobalBest => state.best.clone(),
    };
    if let Some(g) = elite {
        let d = pheromone_deposit(&g.mask, g.f_measure, config);
        for i in g.mask.indices() {
            state.tau[i] += d;
        }
    }
    state.iteration += 1;
}

/// Deterministic random stream of ant `ant` in iteration `iteration`.
pub fn ant_rng(seed: u64, iteration: usize, ant: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | ant as u64);
    rng
}

/// Per-feature Fisher ratio (between-class over within-class variance),
/// min-max scaled onto `[0.1, 1]`.
pub fn fisher_heuristic(index: &ImageIndex) -> Vec<f64> {
    let classes = index.classes();
    let n = index.len() as f64;
    let records = index.records();
    let ratios: Vec<f64> = (0..FEATURE_COUNT)
        .map(|i| {
            let overall = records.iter().map(|r| r.features.vector[i]).sum::<f64>() / n;
            let mut between = 0.0;
            let mut within = 0.0;
            for members in classes.values() {
                let m = members.len() as f64;
                let mean = members.iter().map(|&j| records[j].features.vector[i]).sum::<f64>() / m;
                between += m * (mean - overall) * (mean - overall);
                within += members
                    .iter()
                    .map(|&j| {
                        let d = records[j].features.vector[i] - mean;
                        d * d
                    })
                    .sum::<f64>();
            }
            if within > 0.0 {
                between / within
            } else if between > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    scale_heuristic(&ratios)
}

fn scale_heuristic(ratios: &[f64]) -> Vec<f64> {
    let finite = ratios.iter().copied().filter(|r| r.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    ratios
        .iter()
        .map(|&r| {
            if !r.is_finite() || hi.partial_cmp(&lo) != Some(core::cmp::Ordering::Greater) {
                1.0
            } else {
                0.1 + 0.9 * (r - lo) / (hi - lo)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationStats {
    pub iteration: usize,
    /// Best F-measure seen so far (monotone).
    pub best_f: f64,
    pub iteration_best_f: f64,
    pub mean_f: f64,
    pub mean_size: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub best: AntResult,
    pub history: Vec<IterationStats>,
    /// `false` when no iteration ran and the mask came from the heuristic ranking.
    pub searched: bool,
    pub state: AcoState,
    pub seed: u64,
}

/// Adds features in decreasing heuristic order until the stop rule fires.
fn greedy_by_heuristic(state: &AcoState, config: &AcoConfig, fitness: &dyn Fitness) -> Result<AntResult> {
    let n = state.eta.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| state.eta[b].total_cmp(&state.eta[a]).then(a.cmp(&b)));
    let mut mask = FeatureMask::empty();
    for i in order {
        mask.insert(i);
        let f = checked_fitness(fitness, &mask)?;
        if mask.count() == n || ant_threshold(mask.count(), n, f, config) >= config.theta {
            return Ok(AntResult { mask, f_measure: f });
        }
    }
    unreachable!("loop returns once every feature is selected")
}

fn run_ants(state: &AcoState, config: &AcoConfig, fitness: &dyn Fitness, seed: u64) -> Result<Vec<AntResult>> {
    let t = state.iteration;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..config.ants)
            .into_par_iter()
            .map(|a| construct_solution(state, config, fitness, &mut ant_rng(seed, t, a)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..config.ants)
            .map(|a| construct_solution(state, config, fitness, &mut ant_rng(seed, t, a)))
            .collect()
    }
}

/// Runs the colony against an arbitrary fitness function.
pub fn run_colony(fitness: &dyn Fitness, eta: Vec<f64>, config: &AcoConfig, seed: u64) -> Result<Selection> {
    config.validate()?;
    let mut state = AcoState::new(eta, config)?;
    if config.iterations == 0 {
        let best = greedy_by_heuristic(&state, config, fitness)?;
        state.best = Some(best.clone());
        return Ok(Selection {
            best,
            history: Vec::new(),
            searched: false,
            state,
            seed,
        });
    }
    let mut history = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let ants = run_ants(&state, config, fitness, seed)?;
        let iteration = state.iteration;
        update_pheromones(&mut state, &ants, config);
        let m = ants.len() as f64;
        history.push(IterationStats {
            iteration,
            best_f: state.best.as_ref().map_or(0.0, |b| b.f_measure),
            iteration_best_f: iteration_best(&ants).map_or(0.0, |b| b.f_measure),
            mean_f: ants.iter().map(|a| a.f_measure).sum::<f64>() / m,
            mean_size: ants.iter().map(|a| a.mask.count() as f64).sum::<f64>() / m,
        });
    }
    let best = state.best.clone().expect("at least one iteration ran");
    Ok(Selection {
        best,
        history,
        searched: true,
        state,
        seed,
    })
}

/// Wrapper selection over an index: Fisher heuristic, retrieval F-measure fitness.
pub fn select_features(ranker: &Ranker<'_>, config: &AcoConfig, seed: u64) -> Result<Selection> {
    let index = ranker.index();
    let populated = index.classes().values().filter(|m| m.len() >= 2).count();
    if populated < 2 {
        return Err(Error::DegenerateIndex(alloc::format!(
            "feature selection needs at least two classes with two or more images; found {populated}"
        )));
    }
    let fitness = RetrievalFitness::new(ranker, config.queries, config.k);
    run_colony(&fitness, fisher_heuristic(index), config, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_with(tau: &[f64], eta: &[f64]) -> AcoState {
        let mut s = AcoState::new(alloc::vec![1.0; FEATURE_COUNT], &AcoConfig::default()).unwrap();
        s.tau[..tau.len()].copy_from_slice(tau);
        s.eta[..eta.len()].copy_from_slice(eta);
        s
    }

    fn visit_all_but(open: &[usize]) -> FeatureMask {
        let mut m = FeatureMask::full();
        for &i in open {
            m.remove(i);
        }
        m
    }

    #[test]
    fn default_config_values() {
        let c = AcoConfig::default();
        assert_eq!(
            (c.gamma, c.delta, c.alpha, c.beta, c.rho, c.phi, c.omega),
            (1.0, 2.0, 0.7, 0.3, 0.2, 0.2, 0.8)
        );
        assert!(c.validate().is_ok());
        let bad = AcoConfig {
            phi: 0.3,
            ..AcoConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AcoConfig {
            rho: 1.0,
            ..AcoConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn symmetric_and_substituted_transitions() {
        let c = AcoConfig::default();
        let s = state_with(&[1.0, 1.0], &[0.5, 0.5]);
        let p = transition_probabilities(&s, &visit_all_but(&[0, 1]), &c).unwrap();
        assert_eq!((p[0], p[1]), (0.5, 0.5));

        let s = state_with(&[1.0, 2.0], &[1.0, 1.0]);
        let p = transition_probabilities(&s, &visit_all_but(&[0, 1]), &c).unwrap();
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-15 && (p[1] - 2.0 / 3.0).abs() < 1e-15);

        let p = transition_probabilities(&s, &visit_all_but(&[7]), &c).unwrap();
        assert_eq!(p[7], 1.0);
        assert_eq!(p.iter().sum::<f64>(), 1.0);

        assert_eq!(
            transition_probabilities(&s, &FeatureMask::full(), &c),
            Err(Error::NoCandidates)
        );
    }

    #[test]
    fn zero_heuristic_falls_back_to_pheromone() {
        let c = AcoConfig::default();
        let s = state_with(&[1.0, 3.0], &[0.0, 0.0]);
        let p = transition_probabilities(&s, &visit_all_but(&[0, 1]), &c).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-15 && (p[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn deposit_examples() {
        let c = AcoConfig::default();
        assert_eq!(pheromone_deposit(&FeatureMask::full(), 0.0, &c), 0.0);
        assert!((pheromone_deposit(&FeatureMask::empty(), 1.0, &c) - 1.0).abs() < 1e-15);
        let m = FeatureMask::from_indices(0..42).unwrap();
        assert!((pheromone_deposit(&m, 0.5, &c) - 0.55).abs() < 1e-12);
    }

    #[test]
    fn evaporation_and_elitist_deposit() {
        let c = AcoConfig::default();
        let mut s = state_with(&[], &[]);
        update_pheromones(&mut s, &[], &c);
        assert!(s.tau.iter().all(|t| (t - 0.8).abs() < 1e-15));

        let mut s = state_with(&[], &[]);
        let ant = AntResult {
            mask: FeatureMask::from_indices([0]).unwrap(),
            f_measure: 0.5,
        };
        let d = pheromone_deposit(&ant.mask, 0.5, &c);
        update_pheromones(&mut s, core::slice::from_ref(&ant), &c);
        // sole ant is also the iteration best
        assert!((s.tau[0] - (0.8 + 2.0 * d)).abs() < 1e-15);
        assert!((s.tau[1] - 0.8).abs() < 1e-15);
        assert_eq!(s.best, Some(ant));
        assert_eq!(s.iteration, 1);
    }

    #[test]
    fn stop_rule_edges() {
        let n = FEATURE_COUNT;
        let constant = |f: f64| move |_: &FeatureMask| -> Result<f64> { Ok(f) };
        let state = state_with(&[], &[]);

        let c = AcoConfig {
            theta: 0.2 * libm::exp(-1.0 / 126.0) + 0.8,
            ..AcoConfig::default()
        };
        let ant = construct_solution(&state, &c, &constant(0.0), &mut ant_rng(1, 0, 0)).unwrap();
        assert_eq!(ant.mask.count(), 1);

        let c = AcoConfig {
            theta: f64::INFINITY,
            ..AcoConfig::default()
        };
        let ant = construct_solution(&state, &c, &constant(0.3), &mut ant_rng(1, 0, 0)).unwrap();
        assert_eq!(ant.mask.count(), n);

        // F = 1 everywhere: stops at the first size s where θ ≤ φ·exp(−s/N) + ω·e
        let theta = 0.2 * libm::exp(-3.5 / 126.0) + 0.8 * core::f64::consts::E;
        let c = AcoConfig {
            theta,
            ..AcoConfig::default()
        };
        let ant = construct_solution(&state, &c, &constant(1.0), &mut ant_rng(1, 0, 0)).unwrap();
        assert_eq!(ant.mask.count(), 1);
        let c = AcoConfig {
            theta: 0.8 * core::f64::consts::E + 0.2 * libm::exp(-0.5 / 126.0),
            ..AcoConfig::default()
        };
        let ant = construct_solution(&state, &c, &constant(1.0), &mut ant_rng(1, 0, 0)).unwrap();
        assert_eq!(ant.mask.count(), n);
    }

    #[test]
    fn out_of_range_fitness_is_an_error() {
        let state = state_with(&[], &[]);
        let f = |_: &FeatureMask| -> Result<f64> { Ok(1.5) };
        let err = construct_solution(&state, &AcoConfig::default(), &f, &mut ant_rng(0, 0, 0));
        assert!(matches!(err, Err(Error::Fitness(_))));
    }

    #[test]
    fn heuristic_scaling() {
        let eta = scale_heuristic(&[0.0, 2.0, 1.0, f64::INFINITY]);
        assert_eq!(eta, [0.1, 1.0, 0.55, 1.0]);
        assert_eq!(scale_heuristic(&[3.0, 3.0]), [1.0, 1.0]);
    }

    #[test]
    fn zero_iterations_is_greedy_and_unsearched() {
        let mut eta = alloc::vec![0.1; FEATURE_COUNT];
        eta[40] = 1.0;
        eta[3] = 0.9;
        let f = |m: &FeatureMask| -> Result<f64> { Ok(if m.contains(3) { 0.9 } else { 0.1 }) };
        let c = AcoConfig {
            iterations: 0,
            ..AcoConfig::default()
        };
        let sel = run_colony(&f, eta, &c, 0).unwrap();
        assert!(!sel.searched);
        assert_eq!(sel.best.mask.to_indices(), [3, 40]);
        assert!(sel.state.tau.iter().all(|t| *t == c.tau0));
    }
}
