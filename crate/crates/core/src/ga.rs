//! Generational genetic algorithm over fixed-length binary chromosomes.
//!
//! Selection is by tournament, recombination by uniform crossover, and
//! variation by per-bit mutation with repair to keep every chromosome
//! non-empty. Fitness values are cached per unique chromosome, so the
//! number of calls to the fitness function equals the number of distinct
//! chromosomes ever evaluated.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::FeatureMask;

/// Genetic-algorithm hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    /// Number of bits per chromosome (one per candidate feature).
    pub chromosome_length: usize,
    pub population_size: usize,
    /// Generations to evolve after the initial population.
    pub generations: usize,
    /// Probability that each bit of an initial chromosome is set.
    pub init_one_prob: f64,
    /// Probability that a parent pair is recombined at all.
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` selects `1 / chromosome_length`.
    pub mutation_rate: Option<f64>,
    pub tournament_size: usize,
    /// Top individuals copied unchanged into the next generation.
    pub elite_count: usize,
    pub seed: u64,
}

impl GaConfig {
    /// Defaults sized for wrapper feature selection; only the chromosome
    /// length is mandatory.
    pub fn new(chromosome_length: usize) -> Self {
        Self {
            chromosome_length,
            population_size: 50,
            generations: 100,
            init_one_prob: 0.05,
            crossover_rate: 0.9,
            mutation_rate: None,
            tournament_size: 3,
            elite_count: 1,
            seed: 0,
        }
    }

    pub fn with_population_size(mut self, population_size: usize) -> Self {
        self.population_size = population_size;
        self
    }

    pub fn with_generations(mut self, generations: usize) -> Self {
        self.generations = generations;
        self
    }

    pub fn with_init_one_prob(mut self, p: f64) -> Self {
        self.init_one_prob = p;
        self
    }

    pub fn with_crossover_rate(mut self, p: f64) -> Self {
        self.crossover_rate = p;
        self
    }

    pub fn with_mutation_rate(mut self, p: f64) -> Self {
        self.mutation_rate = Some(p);
        self
    }

    pub fn with_tournament_size(mut self, k: usize) -> Self {
        self.tournament_size = k;
        self
    }

    pub fn with_elite_count(mut self, n: usize) -> Self {
        self.elite_count = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The per-bit mutation probability actually used.
    pub fn effective_mutation_rate(&self) -> f64 {
        self.mutation_rate
            .unwrap_or(1.0 / self.chromosome_length as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.chromosome_length == 0 {
            return Err(Error::Config("chromosome_length must be positive".into()));
        }
        if self.population_size < 2 {
            return Err(Error::Config(format!(
                "population_size must be at least 2, got {}",
                self.population_size
            )));
        }
        if self.generations == 0 {
            return Err(Error::Config("generations must be at least 1".into()));
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return Err(Error::Config(format!(
                "tournament_size must lie in 1..={}, got {}",
                self.population_size, self.tournament_size
            )));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::Config(format!(
                "elite_count must be smaller than the population ({}), got {}",
                self.population_size, self.elite_count
            )));
        }
        for (name, p) in [
            ("init_one_prob", self.init_one_prob),
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.effective_mutation_rate()),
        ] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// One generation's summary in an evolution trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_popcount: usize,
}

/// Per-generation progress, starting with generation 0 (the evaluated
/// initial population), so a run of `g` generations yields `g + 1` rows.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GaTrace {
    pub rows: Vec<TraceRow>,
}

impl GaTrace {
    pub fn best_fitness_series(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.best_fitness).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,best_fitness,mean_fitness,best_popcount\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.generation, r.best_fitness, r.mean_fitness, r.best_popcount
            ));
        }
        out
    }
}

/// Result of an evolution run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub best: FeatureMask,
    pub best_fitness: f64,
    pub trace: GaTrace,
    /// Distinct chromosomes evaluated (cache misses).
    pub evaluations: usize,
}

/// Draw the initial population: each bit is set with `init_one_prob`, and
/// any all-zero chromosome is repaired by setting one uniformly random bit.
pub fn init_population<R: Rng>(cfg: &GaConfig, rng: &mut R) -> Vec<FeatureMask> {
    (0..cfg.population_size)
        .map(|_| {
            let mut mask = FeatureMask::from_bits(
                (0..cfg.chromosome_length)
                    .map(|_| rng.gen_bool(cfg.init_one_prob))
                    .collect(),
            );
            repair(&mut mask, rng);
            mask
        })
        .collect()
}

fn repair<R: Rng>(mask: &mut FeatureMask, rng: &mut R) {
    if mask.is_all_zero() {
        let bit = rng.gen_range(0..mask.len());
        mask.set(bit, true);
    }
}

/// `true` when (fitness, popcount) `a` beats `b`: higher fitness first,
/// then fewer selected features. Equal pairs do not beat each other, so
/// earlier candidates win by default.
fn beats(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Tournament selection: draw `tournament_size` contestants uniformly with
/// replacement and return the winner's population index. Fitness ties go to
/// the lower popcount, then to the lower population index.
pub fn tournament_select<R: Rng>(
    population: &[FeatureMask],
    fitness: &[f64],
    tournament_size: usize,
    rng: &mut R,
) -> Result<usize> {
    if population.is_empty() {
        return Err(Error::State("tournament over an empty population".into()));
    }
    assert_eq!(population.len(), fitness.len(), "fitness per individual");
    assert!(tournament_size >= 1, "tournament needs a contestant");
    let mut winner = rng.gen_range(0..population.len());
    for _ in 1..tournament_size {
        let c = rng.gen_range(0..population.len());
        let cand = (fitness[c], population[c].popcount());
        let best = (fitness[winner], population[winner].popcount());
        if beats(cand, best) || (cand == best && c < winner) {
            winner = c;
        }
    }
    Ok(winner)
}

/// Uniform crossover: with probability `crossover_rate` the pair is
/// recombined by swapping each bit independently with probability 1/2;
/// otherwise both parents are returned unchanged.
pub fn uniform_crossover<R: Rng>(
    a: &FeatureMask,
    b: &FeatureMask,
    crossover_rate: f64,
    rng: &mut R,
) -> Result<(FeatureMask, FeatureMask)> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            what: "crossover parents",
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    if rng.gen_bool(crossover_rate) {
        for i in 0..a.len() {
            if rng.gen_bool(0.5) {
                let (x, y) = (c1.bit(i), c2.bit(i));
                c1.set(i, y);
                c2.set(i, x);
            }
        }
    }
    Ok((c1, c2))
}

/// Flip each bit independently with probability `mutation_rate`, then
/// repair an all-zero chromosome by setting one uniformly random bit.
pub fn mutate<R: Rng>(mask: &mut FeatureMask, mutation_rate: f64, rng: &mut R) {
    for i in 0..mask.len() {
        if rng.gen_bool(mutation_rate) {
            mask.flip(i);
        }
    }
    repair(mask, rng);
}

/// Evolve a population against `fitness_fn` and return the best chromosome
/// ever evaluated. Deterministic in `cfg.seed`; non-finite fitness values
/// abort the run with a fitness error naming the chromosome.
pub fn evolve(
    cfg: &GaConfig,
    mut fitness_fn: impl FnMut(&FeatureMask) -> Result<f64>,
) -> Result<GaOutcome> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cache: HashMap<FeatureMask, f64> = HashMap::new();
    let mut evaluations = 0usize;

    let mut evaluate = |pop: &[FeatureMask],
                        cache: &mut HashMap<FeatureMask, f64>,
                        evaluations: &mut usize|
     -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(pop.len());
        for mask in pop {
            let fit = match cache.get(mask) {
                Some(&f) => f,
                None => {
                    let f = fitness_fn(mask)?;
                    if !f.is_finite() {
                        return Err(Error::Fitness {
                            chromosome: mask.summary(),
                        });
                    }
                    *evaluations += 1;
                    cache.insert(mask.clone(), f);
                    f
                }
            };
            out.push(fit);
        }
        Ok(out)
    };

    let mut population = init_population(cfg, &mut rng);
    let mut fitness = evaluate(&population, &mut cache, &mut evaluations)?;

    let mut best = population[0].clone();
    let mut best_fitness = fitness[0];
    let mut trace = GaTrace::default();
    let mut record = |gen: usize,
                      population: &[FeatureMask],
                      fitness: &[f64],
                      best: &mut FeatureMask,
                      best_fitness: &mut f64| {
        let mut leader = 0usize;
        for i in 1..population.len() {
            if beats(
                (fitness[i], population[i].popcount()),
                (fitness[leader], population[leader].popcount()),
            ) {
                leader = i;
            }
        }
        if beats(
            (fitness[leader], population[leader].popcount()),
            (*best_fitness, best.popcount()),
        ) {
            *best = population[leader].clone();
            *best_fitness = fitness[leader];
        }
        trace.rows.push(TraceRow {
            generation: gen,
            best_fitness: fitness[leader],
            mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
            best_popcount: population[leader].popcount(),
        });
    };
    record(0, &population, &fitness, &mut best, &mut best_fitness);

    let mutation_rate = cfg.effective_mutation_rate();
    for gen in 1..=cfg.generations {
        let mut ranked: Vec<usize> = (0..population.len()).collect();
        ranked.sort_by(|&i, &j| {
            fitness[j]
                .partial_cmp(&fitness[i])
                .expect("finite fitness")
                .then(population[i].popcount().cmp(&population[j].popcount()))
                .then(i.cmp(&j))
        });
        let mut next: Vec<FeatureMask> = ranked[..cfg.elite_count]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        while next.len() < cfg.population_size {
            let pa = tournament_select(&population, &fitness, cfg.tournament_size, &mut rng)?;
            let pb = tournament_select(&population, &fitness, cfg.tournament_size, &mut rng)?;
            let (mut c1, mut c2) =
                uniform_crossover(&population[pa], &population[pb], cfg.crossover_rate, &mut rng)?;
            mutate(&mut c1, mutation_rate, &mut rng);
            mutate(&mut c2, mutation_rate, &mut rng);
            next.push(c1);
            if next.len() < cfg.population_size {
                next.push(c2);
            }
        }
        debug_assert_eq!(next.len(), cfg.population_size);
        population = next;
        fitness = evaluate(&population, &mut cache, &mut evaluations)?;
        record(gen, &population, &fitness, &mut best, &mut best_fitness);
    }

    Ok(GaOutcome {
        best,
        best_fitness,
        trace,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;
    use std::collections::HashSet;

    fn onemax(mask: &FeatureMask) -> Result<f64> {
        Ok(mask.popcount() as f64 / mask.len() as f64)
    }

    #[test]
    fn config_validation_catches_bad_settings() {
        assert!(GaConfig::new(10).validate().is_ok());
        assert!(GaConfig::new(0).validate().is_err());
        assert!(GaConfig::new(10).with_population_size(1).validate().is_err());
        assert!(GaConfig::new(10).with_generations(0).validate().is_err());
        assert!(GaConfig::new(10)
            .with_population_size(2)
            .with_tournament_size(3)
            .validate()
            .is_err());
        assert!(GaConfig::new(10)
            .with_population_size(5)
            .with_elite_count(5)
            .validate()
            .is_err());
        assert!(GaConfig::new(10).with_crossover_rate(1.5).validate().is_err());
        assert!(GaConfig::new(10).with_mutation_rate(-0.1).validate().is_err());
    }

    #[test]
    fn default_mutation_rate_is_one_over_length() {
        assert_eq!(GaConfig::new(2000).effective_mutation_rate(), 1.0 / 2000.0);
        assert_eq!(
            GaConfig::new(2000)
                .with_mutation_rate(0.25)
                .effective_mutation_rate(),
            0.25
        );
    }

    #[test]
    fn init_population_shape_and_repair() {
        let cfg = GaConfig::new(40).with_population_size(30);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pop = init_population(&cfg, &mut rng);
        assert_eq!(pop.len(), 30);
        assert!(pop.iter().all(|m| m.len() == 40 && !m.is_all_zero()));

        // Zero set-probability exercises the repair path: exactly one bit.
        let sparse_cfg = GaConfig::new(40).with_init_one_prob(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sparse = init_population(&sparse_cfg, &mut rng);
        assert!(sparse.iter().all(|m| m.popcount() == 1));

        let dense_cfg = GaConfig::new(40).with_init_one_prob(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let dense = init_population(&dense_cfg, &mut rng);
        assert!(dense.iter().all(|m| m.popcount() == 40));
    }

    #[test]
    fn sparse_colon_scale_population_has_the_expected_density() {
        // 2000 bits at 5% → binomial mean popcount 100 per chromosome.
        let cfg = GaConfig::new(2000);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pop = init_population(&cfg, &mut rng);
        let mean =
            pop.iter().map(|m| m.popcount() as f64).sum::<f64>() / pop.len() as f64;
        assert!((80.0..=120.0).contains(&mean), "mean popcount {mean}");
    }

    #[test]
    fn init_population_is_deterministic() {
        let cfg = GaConfig::new(64).with_population_size(10);
        let a = init_population(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
        let b = init_population(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
        let c = init_population(&cfg, &mut ChaCha8Rng::seed_from_u64(10));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn singleton_tournament_draws_uniformly() {
        let population: Vec<FeatureMask> = (0..5)
            .map(|i| FeatureMask::from_indices(8, &[i]).unwrap())
            .collect();
        let fitness = [0.1, 0.9, 0.3, 0.2, 0.4];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            counts[tournament_select(&population, &fitness, 1, &mut rng).unwrap()] += 1;
        }
        // Expect ~2000 each; a comfortable band rules out any fitness bias.
        for (i, &c) in counts.iter().enumerate() {
            assert!((1800..=2200).contains(&c), "index {i} drawn {c} times");
        }
    }

    #[test]
    fn stronger_member_wins_when_drawn() {
        // Two members, tournament of two with replacement: index 1 (fitter)
        // wins exactly when it is drawn at least once, probability 3/4.
        let population = vec![
            FeatureMask::from_indices(8, &[0]).unwrap(),
            FeatureMask::from_indices(8, &[1]).unwrap(),
        ];
        let fitness = [0.1, 0.9];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let wins = (0..4000)
            .filter(|_| tournament_select(&population, &fitness, 2, &mut rng).unwrap() == 1)
            .count();
        assert!((2700..=3300).contains(&wins), "index 1 won {wins}/4000");
    }

    #[test]
    fn fitness_ties_prefer_fewer_features_then_lower_index() {
        // Equal fitness, popcounts 3 vs 1: the sparse member (index 1) wins
        // whenever it is drawn (P = 3/4 per tournament of two).
        let population = vec![
            FeatureMask::from_indices(8, &[0, 1, 2]).unwrap(),
            FeatureMask::from_indices(8, &[3]).unwrap(),
        ];
        let fitness = [0.5, 0.5];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sparse_wins = (0..4000)
            .filter(|_| tournament_select(&population, &fitness, 2, &mut rng).unwrap() == 1)
            .count();
        assert!((2700..=3300).contains(&sparse_wins), "sparse won {sparse_wins}/4000");

        // Fully tied members: the lower index wins whenever it is drawn.
        let population = vec![
            FeatureMask::from_indices(8, &[0]).unwrap(),
            FeatureMask::from_indices(8, &[1]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let low_wins = (0..4000)
            .filter(|_| tournament_select(&population, &fitness, 2, &mut rng).unwrap() == 0)
            .count();
        assert!((2700..=3300).contains(&low_wins), "index 0 won {low_wins}/4000");
    }

    #[test]
    fn empty_population_is_a_state_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            tournament_select(&[], &[], 3, &mut rng),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn crossover_preserves_bits_per_position() {
        let a = FeatureMask::from_indices(32, &[0, 3, 5, 8, 13, 21]).unwrap();
        let b = FeatureMask::from_indices(32, &[1, 2, 3, 30]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (c1, c2) = uniform_crossover(&a, &b, 1.0, &mut rng).unwrap();
        for i in 0..32 {
            let parents = (a.bit(i), b.bit(i));
            let children = (c1.bit(i), c2.bit(i));
            let swapped = (parents.1, parents.0);
            assert!(children == parents || children == swapped);
        }
        // With 32 positions and this seed, at least one position must swap.
        assert!(c1 != a || c2 != b);
    }

    #[test]
    fn zero_crossover_rate_clones_parents() {
        let a = FeatureMask::from_indices(16, &[0, 1]).unwrap();
        let b = FeatureMask::from_indices(16, &[14, 15]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (c1, c2) = uniform_crossover(&a, &b, 0.0, &mut rng).unwrap();
        assert_eq!(c1, a);
        assert_eq!(c2, b);
    }

    #[test]
    fn equal_parents_produce_equal_children() {
        let a = FeatureMask::from_indices(16, &[2, 7, 9]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let (c1, c2) = uniform_crossover(&a, &a, 1.0, &mut rng).unwrap();
            assert_eq!(c1, a);
            assert_eq!(c2, a);
        }
    }

    #[test]
    fn crossover_rejects_mismatched_lengths() {
        let a = FeatureMask::all_ones(8);
        let b = FeatureMask::all_ones(9);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            uniform_crossover(&a, &b, 0.5, &mut rng),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn mutation_extremes_behave() {
        let mut mask = FeatureMask::from_indices(16, &[2, 9]).unwrap();
        let before = mask.clone();
        mutate(&mut mask, 0.0, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(mask, before);

        // Rate 1 is a deterministic complement: 0110 → 1001.
        let mut four = FeatureMask::from_indices(4, &[1, 2]).unwrap();
        mutate(&mut four, 1.0, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(four.ones(), vec![0, 3]);

        // An all-ones input complements to all-zero and must be repaired
        // back to a single set bit.
        let mut ones = FeatureMask::all_ones(16);
        mutate(&mut ones, 1.0, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(ones.popcount(), 1);
    }

    #[test]
    fn evolve_climbs_onemax() {
        let cfg = GaConfig::new(24)
            .with_population_size(24)
            .with_generations(40)
            .with_init_one_prob(0.2)
            .with_seed(17);
        let outcome = evolve(&cfg, onemax).unwrap();
        assert!(outcome.best_fitness >= 0.9, "got {}", outcome.best_fitness);
        assert_eq!(outcome.trace.rows.len(), 41);
        assert_eq!(
            outcome.best.popcount(),
            (outcome.best_fitness * 24.0).round() as usize
        );
    }

    #[test]
    fn repair_floor_shows_up_under_anti_popcount_fitness() {
        // Minimizing popcount bottoms out at 1 because repair forbids empty
        // chromosomes.
        let cfg = GaConfig::new(16)
            .with_population_size(20)
            .with_generations(30)
            .with_init_one_prob(0.5)
            .with_seed(5);
        let outcome = evolve(&cfg, |m| Ok(-(m.popcount() as f64))).unwrap();
        assert_eq!(outcome.best.popcount(), 1);
        assert_eq!(outcome.best_fitness, -1.0);
    }

    #[test]
    fn elitism_makes_best_fitness_monotone() {
        // Start from an all-ones population so generation 0 is already
        // optimal; elitism must hold the line at fitness 1.
        let cfg = GaConfig::new(12)
            .with_population_size(10)
            .with_generations(15)
            .with_init_one_prob(1.0)
            .with_elite_count(1)
            .with_seed(2);
        let outcome = evolve(&cfg, onemax).unwrap();
        let series = outcome.trace.best_fitness_series();
        assert_eq!(series[0], 1.0);
        for pair in series.windows(2) {
            assert!(pair[1] >= pair[0], "series decreased: {series:?}");
        }
    }

    #[test]
    fn near_total_elitism_freezes_the_initial_best() {
        let cfg = GaConfig::new(20)
            .with_population_size(8)
            .with_generations(1)
            .with_elite_count(7)
            .with_init_one_prob(0.5)
            .with_seed(14);
        // Reproduce the initial population evolve() draws from its seed.
        let initial = init_population(&cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed));
        let initial_best = initial
            .iter()
            .map(|m| onemax(m).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let outcome = evolve(&cfg, onemax).unwrap();
        assert!(outcome.best_fitness >= initial_best);
        assert_eq!(outcome.trace.rows[0].best_fitness, initial_best);
    }

    #[test]
    fn fitness_calls_match_unique_chromosomes() {
        let seen: RefCell<HashSet<FeatureMask>> = RefCell::new(HashSet::new());
        let calls = RefCell::new(0usize);
        let cfg = GaConfig::new(4)
            .with_population_size(8)
            .with_generations(25)
            .with_init_one_prob(0.5)
            .with_seed(6);
        let outcome = evolve(&cfg, |mask| {
            *calls.borrow_mut() += 1;
            assert!(mask.popcount() >= 1, "an all-zero chromosome was evaluated");
            assert!(
                seen.borrow_mut().insert(mask.clone()),
                "fitness function saw {mask:?} twice despite the cache"
            );
            onemax(mask)
        })
        .unwrap();
        assert_eq!(*calls.borrow(), outcome.evaluations);
        // Four-bit chromosomes admit only 15 non-zero patterns.
        assert!(outcome.evaluations <= 15, "got {}", outcome.evaluations);
    }

    #[test]
    fn non_finite_fitness_is_reported_with_the_chromosome() {
        let cfg = GaConfig::new(8).with_population_size(4).with_seed(0);
        let err = evolve(&cfg, |_| Ok(f64::NAN)).unwrap_err();
        assert!(matches!(err, Error::Fitness { .. }));
    }

    #[test]
    fn evolve_is_deterministic_in_the_seed() {
        let cfg = GaConfig::new(16)
            .with_population_size(12)
            .with_generations(10)
            .with_seed(33);
        let a = evolve(&cfg, onemax).unwrap();
        let b = evolve(&cfg, onemax).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.trace, b.trace);
        let c = evolve(&cfg.clone().with_seed(34), onemax).unwrap();
        assert!(a.best != c.best || a.trace != c.trace);
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let cfg = GaConfig::new(8)
            .with_population_size(4)
            .with_generations(2)
            .with_seed(1);
        let outcome = evolve(&cfg, onemax).unwrap();
        let csv = outcome.trace.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "generation,best_fitness,mean_fitness,best_popcount");
        assert_eq!(lines.len(), 4);
    }
}
