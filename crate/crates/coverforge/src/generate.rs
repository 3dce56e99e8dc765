//! Generators for the worked families: Ostrowski covers, odometers,
//! Sturmian languages, full shifts, substitution fixed points, and interval
//! exchange transformations with Rauzy induction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::digraph::{ArrowId, DiGraph};
use crate::language::{LanguageOracle, OracleError};
use crate::sadic::{SAdicSystem, Substitution};
use crate::tower::{BondingMap, CoverTower};

/// A finite prefix of continued-fraction partial quotients, all >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    quotients: Vec<u64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("continued-fraction quotients must be positive")]
    BadQuotient,
    #[error("requested depth {depth} exceeds the {have} available partial quotients")]
    DepthExceedsQuotients { depth: usize, have: usize },
    #[error("the substitution image of {seed} does not start with {seed}")]
    NotProlongable { seed: String },
    #[error("iterating the substitution from {seed} stops growing at length {len}")]
    NoGrowth { seed: String, len: usize },
    #[error("continued-fraction prefix too short to build all factors of length {need}")]
    PrefixTooShort { need: usize },
    #[error("interval lengths must be positive and sum to 1")]
    BadLengths,
    #[error("permutation is not a bijection of 1..d")]
    BadPermutation,
    #[error("permutation is reducible: it fixes the initial segment 1..{k}")]
    ReduciblePermutation { k: usize },
    #[error("the two comparison intervals have equal length at induction step {step}; the Keane condition fails here")]
    KeaneTie { step: usize },
    #[error("first-return itinerary exceeded depth {depth}")]
    ReturnTimeExceeded { depth: usize },
    #[error("window endpoints must be partition points of the domain or image partition")]
    InvalidWindow,
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl ContinuedFraction {
    pub fn new(quotients: Vec<u64>) -> Result<Self, GenerateError> {
        if quotients.is_empty() || quotients.contains(&0) {
            return Err(GenerateError::BadQuotient);
        }
        Ok(ContinuedFraction { quotients })
    }

    pub fn constant(a: u64, len: usize) -> Self {
        ContinuedFraction {
            quotients: vec![a; len],
        }
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn quotient(&self, n: usize) -> u64 {
        self.quotients[n - 1]
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    /// Denominators `q_0, q_1, ..., q_n` of the convergents:
    /// `q_0 = 1`, `q_1 = a_1`, `q_n = a_n q_{n-1} + q_{n-2}`.
    pub fn convergent_denominators(&self, n: usize) -> Vec<u64> {
        assert!(n <= self.len());
        let mut q = vec![1u64];
        let mut prev = 0u64;
        for k in 1..=n {
            let next = self.quotient(k) * q[k - 1] + prev;
            prev = q[k - 1];
            q.push(next);
        }
        q
    }
}

/// Two-loop weighted cover driven by continued-fraction quotients.
///
/// Level 0 carries loops labeled `0` and `1`; each deeper level carries
/// loops `g` (arrow 0) and `g'` (arrow 1). The bonding maps wrap
/// `g_{n+1}` around `g_n` `a_{n+1}` times followed by `g'_n`, and send
/// `g'_{n+1}` to `g_n`. At level 1 the images are `0^(a_1 - 1) 1` and `0`,
/// which keeps the maps edge surjective and makes the arrow weights equal
/// to the convergent denominators of the continued fraction.
pub fn ostrowski_cover(cf: &ContinuedFraction, depth: usize) -> CoverTower {
    assert!(
        depth <= cf.len(),
        "depth {depth} exceeds the {} partial quotients",
        cf.len()
    );
    let q = cf.convergent_denominators(depth);
    let weighted_bouquet = |labels: [&str; 2], weights: [u64; 2]| {
        let arrows = labels
            .iter()
            .zip(weights)
            .map(|(l, w)| {
                let mut a = crate::digraph::Arrow::weighted(
                    crate::digraph::VertexId(0),
                    crate::digraph::VertexId(0),
                    w,
                );
                a.label = Some(l.to_string());
                a
            })
            .collect();
        DiGraph::new(vec!["v".to_owned()], arrows).unwrap()
    };
    let mut levels = vec![DiGraph::loop_bouquet(&["0", "1"])];
    let mut bondings = Vec::new();
    for n in 1..=depth {
        levels.push(weighted_bouquet(["g", "g'"], [q[n], q[n - 1]]));
        let a = cf.quotient(n);
        let copies = if n == 1 { a - 1 } else { a };
        let mut g_image = vec![ArrowId(0); copies as usize];
        g_image.push(ArrowId(1));
        let gp_image = vec![ArrowId(0)];
        bondings.push(BondingMap::new(&levels[n - 1], vec![g_image, gp_image]).unwrap());
    }
    CoverTower::new(levels, bondings).unwrap()
}

/// Single-vertex single-loop tower where the bonding at level `n` wraps the
/// loop `q_n` times; the level-`n` weight is the product of the `q_i`.
pub fn odometer_cover(q: &[u64], depth: usize) -> CoverTower {
    assert!(depth <= q.len());
    assert!(q.iter().all(|&x| x >= 2), "odometer steps must be >= 2");
    let mut levels = vec![DiGraph::loop_bouquet(&["0"])];
    let mut bondings = Vec::new();
    let mut weight = 1u64;
    for n in 1..=depth {
        weight = weight
            .checked_mul(q[n - 1])
            .expect("odometer weight overflow");
        let mut loop_arrow = crate::digraph::Arrow::weighted(
            crate::digraph::VertexId(0),
            crate::digraph::VertexId(0),
            weight,
        );
        loop_arrow.label = Some("0".to_owned());
        levels.push(DiGraph::new(vec!["v".to_owned()], vec![loop_arrow]).unwrap());
        bondings.push(
            BondingMap::new(&levels[n - 1], vec![vec![ArrowId(0); q[n - 1] as usize]]).unwrap(),
        );
    }
    CoverTower::new(levels, bondings).unwrap()
}

/// First `len` (or more) symbols of the standard-word limit for the given
/// quotients: `s_{-1} = "0"`, `s_0 = "1"`, `s_{k+1} = s_k^{a_{k+1}} s_{k-1}`.
pub fn sturmian_word(cf: &ContinuedFraction, min_len: usize) -> Result<String, GenerateError> {
    let mut prev = "0".to_string();
    let mut cur = "1".to_string();
    for k in 1..=cf.len() {
        if cur.len() >= min_len {
            return Ok(cur);
        }
        let a = cf.quotient(k) as usize;
        let mut next = String::with_capacity(cur.len() * a + prev.len());
        for _ in 0..a {
            next.push_str(&cur);
        }
        next.push_str(&prev);
        prev = cur;
        cur = next;
    }
    if cur.len() >= min_len {
        Ok(cur)
    } else {
        Err(GenerateError::PrefixTooShort { need: min_len })
    }
}

/// Factor sets of the standard Sturmian word for the given quotients.
/// The oracle is checked to have exactly `n + 1` factors of each length `n`.
pub fn sturmian_oracle(
    cf: &ContinuedFraction,
    n_max: usize,
) -> Result<LanguageOracle, GenerateError> {
    let max_a = cf.quotients().iter().copied().max().unwrap_or(1) as usize;
    // Uniform recurrence of Sturmian words: a window linear in n_max (scaled
    // by the largest quotient) sees every factor.
    let need = (n_max + 2) * (max_a + 3) * 4;
    let word = sturmian_word(cf, need)?;
    let oracle = LanguageOracle::from_word(&word, n_max)?;
    for n in 0..=n_max {
        if oracle.count(n) != n + 1 {
            return Err(GenerateError::PrefixTooShort { need: n_max });
        }
    }
    Ok(oracle)
}

/// The full shift on `alphabet_size` letters.
pub fn full_shift_oracle(alphabet_size: usize, n_max: usize) -> LanguageOracle {
    LanguageOracle::full_shift(alphabet_size, n_max)
}

/// First `len` symbols of the fixed point of `s` starting from `seed`.
pub fn substitution_fixed_point(
    s: &Substitution,
    seed: &str,
    len: usize,
) -> Result<Vec<String>, GenerateError> {
    let seed_idx =
        s.domain()
            .iter()
            .position(|l| l == seed)
            .ok_or_else(|| GenerateError::NotProlongable {
                seed: seed.to_owned(),
            })?;
    assert_eq!(
        s.domain(),
        s.codomain(),
        "fixed points need an endomorphism"
    );
    if s.image(seed_idx)[0] != seed_idx {
        return Err(GenerateError::NotProlongable {
            seed: seed.to_owned(),
        });
    }
    let mut word = vec![seed_idx];
    while word.len() < len {
        let next = s.apply(&word);
        if next.len() == word.len() {
            return Err(GenerateError::NoGrowth {
                seed: seed.to_owned(),
                len: word.len(),
            });
        }
        word = next;
    }
    word.truncate(len);
    Ok(word.into_iter().map(|i| s.domain()[i].clone()).collect())
}

/// An interval exchange: `d` intervals with exact rational lengths,
/// rearranged by the permutation `zeta` (0-indexed: block `j` of the domain
/// is moved to image slot `zeta[j]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IETConfig {
    lengths: Vec<BigRational>,
    zeta: Vec<usize>,
}

impl IETConfig {
    /// Validates positivity, total length 1 and bijectivity.
    pub fn new(lengths: Vec<BigRational>, zeta: Vec<usize>) -> Result<Self, GenerateError> {
        let total: BigRational = lengths.iter().cloned().sum();
        if lengths.iter().any(|l| !l.is_positive()) || !total.is_one() {
            return Err(GenerateError::BadLengths);
        }
        Self::with_any_total(lengths, zeta)
    }

    /// Same checks except the unit-total requirement; induction shrinks the
    /// supporting interval.
    pub fn with_any_total(
        lengths: Vec<BigRational>,
        zeta: Vec<usize>,
    ) -> Result<Self, GenerateError> {
        let d = lengths.len();
        if lengths.iter().any(|l| !l.is_positive()) {
            return Err(GenerateError::BadLengths);
        }
        let mut seen = vec![false; d];
        for &s in &zeta {
            if s >= d || seen[s] {
                return Err(GenerateError::BadPermutation);
            }
            seen[s] = true;
        }
        if zeta.len() != d {
            return Err(GenerateError::BadPermutation);
        }
        Ok(IETConfig { lengths, zeta })
    }

    pub fn interval_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[BigRational] {
        &self.lengths
    }

    pub fn zeta(&self) -> &[usize] {
        &self.zeta
    }

    pub fn total(&self) -> BigRational {
        self.lengths.iter().cloned().sum()
    }

    /// `zeta` restricted to a proper initial segment would disconnect the
    /// induction.
    pub fn check_irreducible(&self) -> Result<(), GenerateError> {
        let d = self.lengths.len();
        for k in 1..d {
            if (0..k).all(|j| self.zeta[j] < k) {
                return Err(GenerateError::ReduciblePermutation { k });
            }
        }
        Ok(())
    }

    /// Domain partition points `q_0 = 0, ..., q_d = total`.
    pub fn domain_breaks(&self) -> Vec<BigRational> {
        let mut q = vec![BigRational::zero()];
        for l in &self.lengths {
            let last = q.last().unwrap().clone();
            q.push(last + l.clone());
        }
        q
    }

    /// Image partition points: slot `k` holds the translated block
    /// `zeta^{-1}(k)`.
    pub fn image_breaks(&self) -> Vec<BigRational> {
        let d = self.lengths.len();
        let mut inv = vec![0usize; d];
        for (j, &s) in self.zeta.iter().enumerate() {
            inv[s] = j;
        }
        let mut q = vec![BigRational::zero()];
        for k in 0..d {
            let last = q.last().unwrap().clone();
            q.push(last + self.lengths[inv[k]].clone());
        }
        q
    }

    /// Applies the exchange to a point.
    pub fn apply(&self, x: &BigRational) -> BigRational {
        let dom = self.domain_breaks();
        let img = self.image_breaks();
        let j = (0..self.lengths.len())
            .find(|&j| *x >= dom[j] && *x < dom[j + 1])
            .expect("point inside the domain");
        x - &dom[j] + &img[self.zeta[j]]
    }
}

/// Which end of the support was cut at one Rauzy induction step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RauzyStep {
    /// `|I_d| > |I_e|`: the image of `I_e` is cut off the right end.
    Type0,
    /// `|I_d| < |I_e|`: the rightmost domain block `I_d` is cut off.
    Type1,
}

/// Result of iterating Rauzy induction.
#[derive(Debug, Clone)]
pub struct RauzyInduction {
    pub system: SAdicSystem,
    pub steps: Vec<RauzyStep>,
    /// Configuration after each step (position 0 is the input).
    pub configs: Vec<IETConfig>,
}

fn letter_names(d: usize) -> Vec<String> {
    (1..=d).map(|i| i.to_string()).collect()
}

/// One Rauzy induction step: returns the emitted substitution (new letters
/// to old first-return itineraries), the step type, and the induced
/// configuration.
pub fn rauzy_step(
    cfg: &IETConfig,
    step_index: usize,
) -> Result<(Substitution, RauzyStep, IETConfig), GenerateError> {
    cfg.check_irreducible()?;
    let d = cfg.interval_count();
    let last = d - 1;
    let e = cfg.zeta().iter().position(|&s| s == last).unwrap();
    let names = letter_names(d);
    let lam = cfg.lengths();
    if lam[last] == lam[e] {
        return Err(GenerateError::KeaneTie { step: step_index });
    }
    if lam[last] > lam[e] {
        // Cut the image of I_e: block e returns through the last block.
        let mut images: Vec<Vec<usize>> = (0..d).map(|a| vec![a]).collect();
        images[e] = vec![e, last];
        let chi = Substitution::new(names.clone(), names, images).unwrap();
        let mut lengths = lam.to_vec();
        lengths[last] = &lam[last] - &lam[e];
        let split = cfg.zeta()[last];
        let mut zeta = vec![0usize; d];
        for a in 0..d {
            if a == e {
                zeta[a] = split + 1;
            } else if a == last {
                zeta[a] = split;
            } else {
                zeta[a] = cfg.zeta()[a] + usize::from(cfg.zeta()[a] > split);
            }
        }
        let next = IETConfig::with_any_total(lengths, zeta)?;
        Ok((chi, RauzyStep::Type0, next))
    } else {
        // Cut the domain block I_d: block e splits in two.
        let mut images: Vec<Vec<usize>> = Vec::with_capacity(d);
        for a in 0..d {
            if a <= e {
                images.push(vec![a]);
            } else if a == e + 1 {
                images.push(vec![e, last]);
            } else {
                images.push(vec![a - 1]);
            }
        }
        let chi = Substitution::new(names.clone(), names, images).unwrap();
        let mut lengths = Vec::with_capacity(d);
        let mut zeta = vec![0usize; d];
        for a in 0..d {
            if a < e {
                lengths.push(lam[a].clone());
                zeta[a] = cfg.zeta()[a];
            } else if a == e {
                lengths.push(&lam[e] - &lam[last]);
                zeta[a] = last;
            } else if a == e + 1 {
                lengths.push(lam[last].clone());
                zeta[a] = cfg.zeta()[last];
            } else {
                lengths.push(lam[a - 1].clone());
                zeta[a] = cfg.zeta()[a - 1];
            }
        }
        let next = IETConfig::with_any_total(lengths, zeta)?;
        Ok((chi, RauzyStep::Type1, next))
    }
}

/// Iterates Rauzy induction for `steps` steps, or fewer if a tie stops it.
/// The tie is reported as an error only when no step completed; otherwise
/// the completed prefix is returned along with the tie step index.
pub fn iet_rauzy_induction(
    cfg: &IETConfig,
    steps: usize,
) -> Result<(RauzyInduction, Option<usize>), GenerateError> {
    cfg.check_irreducible()?;
    let mut configs = vec![cfg.clone()];
    let mut subs = Vec::new();
    let mut tape = Vec::new();
    let mut tie = None;
    for k in 1..=steps {
        match rauzy_step(configs.last().unwrap(), k) {
            Ok((chi, ty, next)) => {
                subs.push(chi);
                tape.push(ty);
                configs.push(next);
            }
            Err(GenerateError::KeaneTie { step }) => {
                if subs.is_empty() {
                    return Err(GenerateError::KeaneTie { step });
                }
                tie = Some(step);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok((
        RauzyInduction {
            system: SAdicSystem::new(subs).unwrap(),
            steps: tape,
            configs,
        },
        tie,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ReturnBlock {
    lo: BigRational,
    hi: BigRational,
    itinerary: Vec<usize>,
    img_lo: BigRational,
    img_hi: BigRational,
    done: bool,
}

/// First-return substitution to the window `[lo, hi)` computed by exact
/// interval tracking. The window endpoints must be partition points of the
/// domain or of the image partition. New letters are the return intervals in
/// spatial order; images are their itineraries through the original blocks.
pub fn induced_substitution_check(
    cfg: &IETConfig,
    lo: &BigRational,
    hi: &BigRational,
    depth: usize,
) -> Result<(Substitution, Vec<(BigRational, BigRational)>), GenerateError> {
    let dom = cfg.domain_breaks();
    let img = cfg.image_breaks();
    let is_break = |x: &BigRational| dom.contains(x) || img.contains(x);
    if lo >= hi || !is_break(lo) || !is_break(hi) {
        return Err(GenerateError::InvalidWindow);
    }
    let d = cfg.interval_count();
    let block_of = |x: &BigRational| (0..d).find(|&j| *x >= dom[j] && *x < dom[j + 1]);

    // Seed blocks: the window refined by the domain partition.
    let mut queue: Vec<ReturnBlock> = Vec::new();
    let mut cuts: Vec<BigRational> = vec![lo.clone()];
    for q in &dom {
        if q > lo && q < hi {
            cuts.push(q.clone());
        }
    }
    cuts.push(hi.clone());
    for w in cuts.windows(2) {
        let j = block_of(&w[0]).ok_or(GenerateError::InvalidWindow)?;
        let shift = &img[cfg.zeta()[j]] - &dom[j];
        queue.push(ReturnBlock {
            lo: w[0].clone(),
            hi: w[1].clone(),
            itinerary: vec![j],
            img_lo: &w[0] + &shift,
            img_hi: &w[1] + &shift,
            done: false,
        });
    }

    loop {
        if queue.iter().all(|b| b.done) {
            break;
        }
        let idx = queue.iter().position(|b| !b.done).unwrap();
        let b = queue[idx].clone();
        if b.itinerary.len() > depth {
            return Err(GenerateError::ReturnTimeExceeded { depth });
        }
        // Returned blocks are finished; their itinerary stops here.
        if b.img_lo >= *lo && b.img_hi <= *hi {
            queue[idx].done = true;
            continue;
        }
        // Split the block wherever its image straddles the window boundary
        // or a domain break.
        let mut split_at: Option<BigRational> = None;
        for p in [lo, hi].into_iter().chain(dom.iter()) {
            if *p > b.img_lo && *p < b.img_hi {
                split_at = Some(p.clone());
                break;
            }
        }
        if let Some(c) = split_at {
            let offset = &c - &b.img_lo;
            let mid = &b.lo + &offset;
            let left = ReturnBlock {
                hi: mid.clone(),
                img_hi: c.clone(),
                ..b.clone()
            };
            let right = ReturnBlock {
                lo: mid,
                img_lo: c,
                ..b.clone()
            };
            queue.splice(idx..=idx, [left, right]);
            continue;
        }
        let j = block_of(&b.img_lo).expect("image inside the support");
        let shift = &img[cfg.zeta()[j]] - &dom[j];
        queue[idx].itinerary.push(j);
        queue[idx].img_lo = &b.img_lo + &shift;
        queue[idx].img_hi = &b.img_hi + &shift;
    }

    queue.sort_by(|a, b| a.lo.cmp(&b.lo));
    // Keane: a first-return map to an admissible window has at most d blocks.
    assert!(
        queue.len() <= d,
        "first-return map has {} continuity intervals, more than d = {d}",
        queue.len()
    );
    let new_names = letter_names(queue.len());
    let old_names = letter_names(d);
    let images = queue.iter().map(|b| b.itinerary.clone()).collect();
    let chi = Substitution::new(new_names, old_names, images).unwrap();
    let intervals = queue.into_iter().map(|b| (b.lo, b.hi)).collect();
    Ok((chi, intervals))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
