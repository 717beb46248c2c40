//! Random walks on `𝒢_ω`: exact convolution powers over canonical element
//! keys, return probabilities, entropy, drift, Monte Carlo estimates, and the
//! first-hit projection map `ψ` used to test self-similarity of a measure.
//!
//! The walk after `n` steps is the product `s₁ s₂ ⋯ sₙ` of independent
//! increments, read with the crate-wide product convention.

use crate::error::{Error, Result};
use crate::groups::{parse_word, word_string, Gen, GroupContext, GENERATORS};
use crate::growth::GrowthTable;
use crate::word::{element_key, push_reduced, reduce, split, swaps_first_level, ElementKey};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Weight = BigRational;

pub fn ratio(n: i64, d: i64) -> Weight {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// An atom: a representative reduced word and its weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub word: Vec<Gen>,
    pub weight: Weight,
}

/// Finitely supported distribution on group elements, keyed canonically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    atoms: BTreeMap<ElementKey, Atom>,
}

impl Distribution {
    pub fn dirac_identity() -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(
            ElementKey(vec![0].into()),
            Atom {
                word: Vec::new(),
                weight: Weight::one(),
            },
        );
        Distribution { atoms }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&ElementKey, &Atom)> {
        self.atoms.iter()
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn mass(&self, key: &ElementKey) -> Weight {
        self.atoms
            .get(key)
            .map_or_else(Weight::zero, |a| a.weight.clone())
    }

    pub fn total(&self) -> Weight {
        self.atoms
            .values()
            .fold(Weight::zero(), |acc, a| acc + &a.weight)
    }

    pub fn identity_mass(&self) -> Weight {
        self.mass(&ElementKey(vec![0].into()))
    }

    fn add(&mut self, key: ElementKey, word: Vec<Gen>, weight: Weight) {
        match self.atoms.get_mut(&key) {
            Some(atom) => {
                atom.weight += weight;
                if (word.len(), &word) < (atom.word.len(), &atom.word) {
                    atom.word = word;
                }
            }
            None => {
                self.atoms.insert(key, Atom { word, weight });
            }
        }
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .atoms
            .values()
            .map(|a| {
                let p = to_f64(&a.weight);
                if p > 0.0 {
                    p * p.ln()
                } else {
                    0.0
                }
            })
            .sum::<f64>()
    }
}

pub(crate) fn to_f64(w: &Weight) -> f64 {
    w.to_f64().unwrap_or(f64::NAN)
}

/// Probability measure with finite support and exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    dist: Distribution,
}

impl Measure {
    /// Validates positivity, total mass one, symmetry and that the support
    /// generates the group (each canonical generator is a product of at most
    /// four support elements).
    pub fn new(ctx: &GroupContext, atoms: Vec<(Vec<Gen>, Weight)>) -> Result<Self> {
        let mut dist = Distribution {
            atoms: BTreeMap::new(),
        };
        for (word, weight) in atoms {
            if !weight.is_positive() {
                return Err(Error::InvalidInput(format!(
                    "weight of {} is not positive",
                    word_string(&word)
                )));
            }
            let w = reduce(ctx, &word).into_vec();
            dist.add(element_key(ctx, &w), w, weight);
        }
        if dist.total() != Weight::one() {
            return Err(Error::InvalidInput(format!(
                "weights sum to {}, not 1",
                dist.total()
            )));
        }
        for atom in dist.atoms.values() {
            let inverse: Vec<Gen> = atom.word.iter().rev().copied().collect();
            if dist.mass(&element_key(ctx, &inverse)) != atom.weight {
                return Err(Error::InvalidInput(format!(
                    "measure is not symmetric at {}",
                    word_string(&atom.word)
                )));
            }
        }
        let m = Measure { dist };
        if !m.generates(ctx, 4) {
            return Err(Error::InvalidInput(
                "support does not generate the group".into(),
            ));
        }
        Ok(m)
    }

    /// Parses `word:num/den` pairs separated by commas, e.g. `a:4/7,b:1/7,c:1/7,d:1/7`.
    pub fn parse(ctx: &GroupContext, text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (word, weight) = part.split_once(':').ok_or_else(|| {
                Error::InvalidInput(format!("expected word:weight, got {part:?}"))
            })?;
            let weight: Weight = weight
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad rational weight {weight:?}")))?;
            atoms.push((parse_word(word)?, weight));
        }
        Measure::new(ctx, atoms)
    }

    pub fn uniform_generators(ctx: &GroupContext) -> Self {
        let atoms = GENERATORS.iter().map(|&g| (vec![g], ratio(1, 4))).collect();
        Measure::new(ctx, atoms).expect("uniform measure on generators")
    }

    /// `(4/7) a + (1/7)(b + c + d)`.
    pub fn kaimanovich(ctx: &GroupContext) -> Self {
        let atoms = vec![
            (vec![Gen::A], ratio(4, 7)),
            (vec![Gen::B], ratio(1, 7)),
            (vec![Gen::C], ratio(1, 7)),
            (vec![Gen::D], ratio(1, 7)),
        ];
        Measure::new(ctx, atoms).expect("Kaimanovich measure")
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.dist.atoms.values()
    }

    fn generates(&self, ctx: &GroupContext, depth: usize) -> bool {
        let support: Vec<&Vec<Gen>> = self.dist.atoms.values().map(|a| &a.word).collect();
        let mut reached = std::collections::HashSet::new();
        let mut layer = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &layer {
                for s in &support {
                    let mut v: Vec<Gen> = w.clone();
                    v.extend_from_slice(s);
                    let v = reduce(ctx, &v).into_vec();
                    if reached.insert(element_key(ctx, &v)) {
                        next.push(v);
                    }
                }
            }
            layer = next;
        }
        GENERATORS
            .iter()
            .filter_map(|&g| ctx.canonical_letter(g))
            .all(|g| reached.contains(&element_key(ctx, &[g])))
    }

    fn sampler(&self) -> (Vec<f64>, Vec<&Atom>) {
        let atoms: Vec<&Atom> = self.dist.atoms.values().collect();
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|a| {
                acc += to_f64(&a.weight);
                acc
            })
            .collect();
        (cumulative, atoms)
    }
}

fn sample<'a>(rng: &mut ChaCha8Rng, cumulative: &[f64], atoms: &[&'a Atom]) -> &'a Atom {
    let u: f64 = rng.gen::<f64>() * cumulative.last().copied().unwrap_or(1.0);
    let i = cumulative.partition_point(|&c| c <= u).min(atoms.len() - 1);
    atoms[i]
}

pub const DEFAULT_MAX_SUPPORT: usize = 2_000_000;

/// One convolution step `dist * μ`.
pub fn convolve(ctx: &GroupContext, dist: &Distribution, mu: &Measure) -> Distribution {
    let pairs: Vec<(&Atom, &Atom)> = dist
        .atoms
        .values()
        .flat_map(|g| mu.dist.atoms.values().map(move |s| (g, s)))
        .collect();
    let keyed: Vec<(ElementKey, Vec<Gen>, Weight)> = pairs
        .par_iter()
        .map(|(g, s)| {
            let mut w = g.word.clone();
            push_reduced(ctx.family(), ctx.stage(), &mut w, &s.word);
            (element_key(ctx, &w), w, &g.weight * &s.weight)
        })
        .collect();
    let mut out = Distribution {
        atoms: BTreeMap::new(),
    };
    for (k, w, p) in keyed {
        out.add(k, w, p);
    }
    out
}

/// `μ^{*n}` as an exact distribution.
pub fn convolve_power(ctx: &GroupContext, mu: &Measure, n: usize) -> Result<Distribution> {
    convolve_powers(ctx, mu, n, DEFAULT_MAX_SUPPORT).map(|mut v| v.pop().unwrap())
}

/// `μ^{*0}, μ^{*1}, …, μ^{*n}`.
pub fn convolve_powers(
    ctx: &GroupContext,
    mu: &Measure,
    n: usize,
    max_support: usize,
) -> Result<Vec<Distribution>> {
    let mut out = vec![Distribution::dirac_identity()];
    for k in 1..=n {
        let next = convolve(ctx, out.last().unwrap(), mu);
        if next.support_size() > max_support {
            return Err(Error::ResourceCap(format!(
                "support of μ^*{k} exceeds {max_support}"
            )));
        }
        debug_assert_eq!(next.total(), Weight::one());
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub n: usize,
    /// `P(n) = μ^{*n}(e)` as an exact fraction.
    pub return_probability: String,
    pub return_probability_f64: f64,
    /// `H(n)`, natural logarithm.
    pub entropy: f64,
    /// `L(n) = Σ |g| μ^{*n}(g)`.
    pub drift: f64,
    pub support: usize,
}

/// Statistics of one convolution power; lengths come from `table`.
pub fn walk_stats_of(n: usize, dist: &Distribution, table: &GrowthTable) -> Result<WalkStats> {
    let mut drift = 0.0;
    for (key, atom) in dist.atoms() {
        let len = table.length_of_key(key).ok_or(Error::MissingLength)?;
        drift += len as f64 * to_f64(&atom.weight);
    }
    let p = dist.identity_mass();
    Ok(WalkStats {
        n,
        return_probability: p.to_string(),
        return_probability_f64: to_f64(&p),
        entropy: dist.entropy(),
        drift,
        support: dist.support_size(),
    })
}

pub fn walk_stats(
    ctx: &GroupContext,
    mu: &Measure,
    n: usize,
    table: &GrowthTable,
) -> Result<WalkStats> {
    if table.radius() < n {
        return Err(Error::InvalidInput(format!(
            "growth table radius {} is below n = {n}",
            table.radius()
        )));
    }
    walk_stats_of(n, &convolve_power(ctx, mu, n)?, table)
}

/// Statistics for `n = 0..=n_max`.
pub fn walk_series(
    ctx: &GroupContext,
    mu: &Measure,
    n_max: usize,
    table: &GrowthTable,
) -> Result<Vec<WalkStats>> {
    let powers = convolve_powers(ctx, mu, n_max, DEFAULT_MAX_SUPPORT)?;
    powers
        .iter()
        .enumerate()
        .map(|(n, d)| walk_stats_of(n, d, table))
        .collect()
}

pub fn walk_csv(stats: &[WalkStats]) -> String {
    let mut out = String::from("n,P,H,L\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.n, s.return_probability_f64, s.entropy, s.drift
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    /// `(n, P(2n)^{1/(2n)})`.
    pub roots: Vec<(usize, f64)>,
    pub running_sup: Vec<f64>,
    /// Always false: a finite prefix only gives a lower-bound diagnostic.
    pub certified: bool,
}

pub fn spectral_radius_estimate(stats: &[WalkStats]) -> SpectralEstimate {
    let mut roots = Vec::new();
    let mut running_sup = Vec::new();
    let mut sup = 0.0f64;
    for s in stats.iter().filter(|s| s.n > 0 && s.n % 2 == 0) {
        let r = s.return_probability_f64.powf(1.0 / s.n as f64);
        sup = sup.max(r);
        roots.push((s.n / 2, r));
        running_sup.push(sup);
    }
    SpectralEstimate {
        roots,
        running_sup,
        certified: false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReturn {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub returns: u64,
    pub estimate: f64,
    pub std_error: f64,
}

const MC_CHUNKS: u64 = 64;

/// Splits `samples` into fixed chunks, each with its own ChaCha stream, and
/// folds the chunk results in chunk order.
fn chunked<T: Send>(
    samples: u64,
    seed: u64,
    f: impl Fn(&mut ChaCha8Rng, u64) -> T + Sync,
) -> Vec<T> {
    (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = samples / MC_CHUNKS + u64::from(c < samples % MC_CHUNKS);
            f(&mut rng, count)
        })
        .collect()
}

pub fn monte_carlo_return(
    ctx: &GroupContext,
    mu: &Measure,
    n: usize,
    samples: u64,
    seed: u64,
) -> MonteCarloReturn {
    let (cumulative, atoms) = mu.sampler();
    let family = ctx.family();
    let returns: u64 = chunked(samples, seed, |rng, count| {
        let mut hits = 0;
        let mut w = Vec::new();
        for _ in 0..count {
            w.clear();
            for _ in 0..n {
                push_reduced(
                    family,
                    ctx.stage(),
                    &mut w,
                    &sample(rng, &cumulative, &atoms).word,
                );
            }
            if crate::word::is_identity(ctx, &w) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    let p = returns as f64 / samples.max(1) as f64;
    MonteCarloReturn {
        n,
        samples,
        seed,
        returns,
        estimate: p,
        std_error: (p * (1.0 - p) / samples.max(1) as f64).sqrt(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PsiMethod {
    MonteCarlo {
        samples: u64,
        path_cap: usize,
        seed: u64,
    },
    TruncatedExact {
        length_cap: usize,
    },
}

pub const DEFAULT_PATH_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiAtom {
    pub word: String,
    pub mass: f64,
    /// Exact mass for the truncated-exact method.
    pub exact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiResult {
    pub vertex: u8,
    pub method: PsiMethod,
    /// Atoms of the projected first-hit distribution, in canonical key order,
    /// expressed in the generators of the original stage.
    pub atoms: Vec<PsiAtom>,
    pub captured_mass: f64,
    /// Mass of trajectories that did not hit the stabilizer within the cap.
    pub residual_mass: f64,
    pub capped_paths: u64,
}

impl PsiResult {
    fn mass_by_key(&self, ctx: &GroupContext) -> BTreeMap<ElementKey, f64> {
        self.atoms
            .iter()
            .map(|a| (element_key(ctx, &parse_word(&a.word).unwrap()), a.mass))
            .collect()
    }
}

/// Word over the next stage's generators rewritten over the context's own
/// generators via the stage relabeling.
fn relabel(word: &[Gen], pi: &[Gen; 4]) -> Vec<Gen> {
    word.iter().map(|&g| pi[g as usize]).collect()
}

/// First-hit projection `ψ_x(μ)`: the law of the section at `x` of the walk
/// stopped at its first visit to the stabilizer of the first level.
pub fn psi_map(ctx: &GroupContext, mu: &Measure, x: u8, method: &PsiMethod) -> Result<PsiResult> {
    if x > 1 {
        return Err(Error::InvalidInput(
            "ψ is defined for first-level vertices 0 and 1".into(),
        ));
    }
    let next = ctx.shifted();
    let pi = next.relabeling_to(ctx).ok_or_else(|| {
        Error::InvalidInput("sections do not return to the same group (no stage relabeling)".into())
    })?;
    let project = |w: &[Gen]| -> (ElementKey, Vec<Gen>) {
        let [s0, s1] = split(ctx.family(), ctx.stage(), w);
        let s = relabel(if x == 0 { &s0 } else { &s1 }, &pi);
        let s = reduce(ctx, &s).into_vec();
        (element_key(ctx, &s), s)
    };
    match *method {
        PsiMethod::MonteCarlo {
            samples,
            path_cap,
            seed,
        } => {
            let (cumulative, atoms) = mu.sampler();
            let family = ctx.family();
            let parts = chunked(samples, seed, |rng, count| {
                let mut counts: BTreeMap<ElementKey, (Vec<Gen>, u64)> = BTreeMap::new();
                let mut capped = 0u64;
                let mut w = Vec::new();
                for _ in 0..count {
                    w.clear();
                    let mut hit = false;
                    for _ in 0..path_cap {
                        push_reduced(
                            family,
                            ctx.stage(),
                            &mut w,
                            &sample(rng, &cumulative, &atoms).word,
                        );
                        if !swaps_first_level(&w) {
                            hit = true;
                            break;
                        }
                    }
                    if !hit {
                        capped += 1;
                        continue;
                    }
                    let (k, s) = project(&w);
                    counts.entry(k).or_insert((s, 0)).1 += 1;
                }
                (counts, capped)
            });
            let mut counts: BTreeMap<ElementKey, (Vec<Gen>, u64)> = BTreeMap::new();
            let mut capped = 0;
            for (part, c) in parts {
                capped += c;
                for (k, (w, n)) in part {
                    let e = counts.entry(k).or_insert((w.clone(), 0));
                    if (w.len(), &w) < (e.0.len(), &e.0) {
                        e.0 = w;
                    }
                    e.1 += n;
                }
            }
            let total = samples.max(1) as f64;
            let atoms: Vec<PsiAtom> = counts
                .into_values()
                .map(|(w, n)| PsiAtom {
                    word: word_string(&w),
                    mass: n as f64 / total,
                    exact: None,
                })
                .collect();
            let residual = capped as f64 / total;
            Ok(PsiResult {
                vertex: x,
                method: method.clone(),
                atoms,
                captured_mass: 1.0 - residual,
                residual_mass: residual,
                capped_paths: capped,
            })
        }
        PsiMethod::TruncatedExact { length_cap } => {
            let mut alive = Distribution::dirac_identity();
            let mut hits = Distribution {
                atoms: BTreeMap::new(),
            };
            for _ in 0..length_cap {
                let stepped = convolve(ctx, &alive, mu);
                alive = Distribution {
                    atoms: BTreeMap::new(),
                };
                for (k, atom) in stepped.atoms {
                    if swaps_first_level(&atom.word) {
                        alive.atoms.insert(k, atom);
                    } else {
                        let (pk, s) = project(&atom.word);
                        hits.add(pk, s, atom.weight);
                    }
                }
                if alive.support_size() > DEFAULT_MAX_SUPPORT {
                    return Err(Error::ResourceCap(
                        "ψ truncated-exact state space too large".into(),
                    ));
                }
                if alive.atoms.is_empty() {
                    break;
                }
            }
            let captured = hits.total();
            let residual = alive.total();
            let atoms = hits
                .atoms
                .into_values()
                .map(|a| PsiAtom {
                    word: word_string(&a.word),
                    mass: to_f64(&a.weight),
                    exact: Some(a.weight.to_string()),
                })
                .collect();
            Ok(PsiResult {
                vertex: x,
                method: method.clone(),
                atoms,
                captured_mass: to_f64(&captured),
                residual_mass: to_f64(&residual),
                capped_paths: 0,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarVerdict {
    pub vertex: u8,
    pub lambda: f64,
    pub tol: f64,
    /// Total variation distance `½ Σ |ψ(g) − ν(g)|` to `ν = (1−λ)δ_e + λμ`.
    pub distance: f64,
    pub residual_mass: f64,
    pub pass: bool,
    pub psi: PsiResult,
}

pub fn self_similar_check(
    ctx: &GroupContext,
    mu: &Measure,
    lambda: f64,
    tol: f64,
    x: u8,
    method: &PsiMethod,
) -> Result<SelfSimilarVerdict> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidInput(format!(
            "contraction coefficient {lambda} must lie in (0, 1)"
        )));
    }
    let psi = psi_map(ctx, mu, x, method)?;
    let mut target: BTreeMap<ElementKey, f64> = BTreeMap::new();
    *target.entry(ElementKey(vec![0].into())).or_default() += 1.0 - lambda;
    for (k, a) in mu.distribution().atoms() {
        *target.entry(k.clone()).or_default() += lambda * to_f64(&a.weight);
    }
    let observed = psi.mass_by_key(ctx);
    let keys: std::collections::BTreeSet<&ElementKey> =
        target.keys().chain(observed.keys()).collect();
    let l1: f64 = keys
        .into_iter()
        .map(|k| {
            (observed.get(k).copied().unwrap_or(0.0) - target.get(k).copied().unwrap_or(0.0)).abs()
        })
        .sum();
    let distance = 0.5 * l1;
    let residual = psi.residual_mass;
    Ok(SelfSimilarVerdict {
        vertex: x,
        lambda,
        tol,
        distance,
        residual_mass: residual,
        pass: distance + residual < tol,
        psi,
    })
}

pub fn walks_json(
    ctx: &GroupContext,
    mu: &Measure,
    stats: &[WalkStats],
    mc: &[MonteCarloReturn],
) -> serde_json::Value {
    let measure: Vec<_> = mu
        .atoms()
        .map(|a| serde_json::json!({"word": word_string(&a.word), "weight": a.weight.to_string()}))
        .collect();
    serde_json::json!({
        "schema": "walks/1",
        "oracle": ctx.oracle().to_string(),
        "measure": measure,
        "stats": stats,
        "spectral": spectral_radius_estimate(stats),
        "monte_carlo": mc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_group, OracleSequence};
    use crate::growth::enumerate_ball;

    fn xi() -> GroupContext {
        build_group(&OracleSequence::xi(), 0)
    }

    #[test]
    fn low_powers() {
        let ctx = xi();
        let mu = Measure::uniform_generators(&ctx);
        let d0 = convolve_power(&ctx, &mu, 0).unwrap();
        assert_eq!(d0, Distribution::dirac_identity());
        let d2 = convolve_power(&ctx, &mu, 2).unwrap();
        assert_eq!(d2.identity_mass(), ratio(1, 4));
        assert_eq!(d2.total(), Weight::one());
    }

    #[test]
    fn stats_at_zero_and_one() {
        let ctx = xi();
        let mu = Measure::uniform_generators(&ctx);
        let table = enumerate_ball(&ctx, 2).unwrap();
        let s0 = walk_stats(&ctx, &mu, 0, &table).unwrap();
        assert_eq!(
            (s0.return_probability.as_str(), s0.entropy, s0.drift),
            ("1", 0.0, 0.0)
        );
        let s1 = walk_stats(&ctx, &mu, 1, &table).unwrap();
        assert!((s1.entropy - 4f64.ln()).abs() < 1e-12);
        assert!((s1.drift - 1.0).abs() < 1e-12);
        assert!(walk_stats(&ctx, &mu, 3, &table).is_err());
    }

    #[test]
    fn spectral_estimates() {
        let ctx = xi();
        let mu = Measure::uniform_generators(&ctx);
        let table = enumerate_ball(&ctx, 2).unwrap();
        let stats = walk_series(&ctx, &mu, 2, &table).unwrap();
        let est = spectral_radius_estimate(&stats);
        assert_eq!(est.roots, vec![(1, 0.5)]);
        assert!(!est.certified);
        let dirac = WalkStats {
            n: 2,
            return_probability: "1".into(),
            return_probability_f64: 1.0,
            entropy: 0.0,
            drift: 0.0,
            support: 1,
        };
        assert_eq!(spectral_radius_estimate(&[dirac]).roots, vec![(1, 1.0)]);
    }

    #[test]
    fn measure_validation() {
        let ctx = xi();
        assert!(Measure::parse(&ctx, "a:1/2,b:1/2").is_err());
        assert!(Measure::parse(&ctx, "a:1/2,b:1/4,c:1/4").is_ok());
        assert!(Measure::parse(&ctx, "a:1/2,b:1/4,c:1/8").is_err());
        assert!(Measure::parse(&ctx, "ab:1/2,ba:1/4,c:1/4").is_err());
        assert!(Measure::parse(&ctx, "a:0,b:1").is_err());
        let k = Measure::parse(&ctx, "a:4/7, b:1/7, c:1/7, d:1/7").unwrap();
        assert_eq!(k, Measure::kaimanovich(&ctx));
    }

    #[test]
    fn psi_rejects_bad_input() {
        let ctx = xi();
        let mu = Measure::kaimanovich(&ctx);
        let m = PsiMethod::TruncatedExact { length_cap: 5 };
        assert!(psi_map(&ctx, &mu, 2, &m).is_err());
        assert!(self_similar_check(&ctx, &mu, 1.0, 0.01, 0, &m).is_err());
        assert!(self_similar_check(&ctx, &mu, 0.0, 0.01, 0, &m).is_err());
    }

    #[test]
    fn psi_truncated_exact_kaimanovich() {
        let ctx = xi();
        let mu = Measure::kaimanovich(&ctx);
        let v = self_similar_check(
            &ctx,
            &mu,
            0.5,
            1e-3,
            0,
            &PsiMethod::TruncatedExact { length_cap: 30 },
        )
        .unwrap();
        assert!(v.psi.captured_mass > 0.999);
        assert!(v.pass, "{v:?}");
    }
}
