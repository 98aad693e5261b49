use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use super::spec::{separation, RepElement, RepPoint, Representation, SemigroupSpec, Word};
use crate::boundary::{classify_isometry, displacement, IsometryKind};
use crate::error::{Error, Result};
use crate::projective::{proximal_data, singular_values};
use crate::sampling::{purpose, stream_rng};
use crate::tolerances::{SPECTRAL_TOL, TAU_TRANS};

const RANDOM_LEN_SPAN: usize = 24;

/// Candidate words: all words of increasing length in shortlex order while
/// they fit in `exhaustive` slots, then random words whose length grows
/// with the index until `budget` words are produced.
pub(crate) fn candidate_words(
    rank: usize,
    budget: usize,
    exhaustive: usize,
    seed: u64,
    stream: u64,
) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::with_capacity(budget);
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    let mut len = 0usize;
    let cap = exhaustive.min(budget);
    'outer: loop {
        let next: Vec<Vec<usize>> = layer
            .iter()
            .flat_map(|w| (0..rank).map(move |g| [w.as_slice(), &[g]].concat()))
            .collect();
        len += 1;
        for w in &next {
            if out.len() >= cap {
                break 'outer;
            }
            out.push(Word::new(w.clone()).expect("nonempty"));
        }
        layer = next;
    }
    let mut rng = stream_rng(seed, purpose::WORD_SEARCH, stream);
    let remaining = budget - out.len();
    for k in 0..remaining {
        let l = len + 1 + k * RANDOM_LEN_SPAN / remaining.max(1);
        out.push(Word::new((0..l).map(|_| rng.random_range(0..rank)).collect()).expect("nonempty"));
    }
    out
}

/// Condition (*) data: for each representation, the points `Z^+` and the
/// hyperplanes or boundary points `Z^-` that must be moved off each other.
#[derive(Clone, Debug)]
pub struct TransversalityTask {
    pub z_plus: Vec<Vec<RepPoint>>,
    pub z_minus: Vec<Vec<RepPoint>>,
    pub budget: usize,
    /// Smallest accepted margin.
    pub tau: f64,
}

impl TransversalityTask {
    pub fn new(z_plus: Vec<Vec<RepPoint>>, z_minus: Vec<Vec<RepPoint>>, budget: usize) -> Self {
        Self {
            z_plus,
            z_minus,
            budget,
            tau: TAU_TRANS,
        }
    }

    fn check(&self, spec: &SemigroupSpec) -> Result<()> {
        let n = spec.representations().len();
        if self.z_plus.len() > n || self.z_minus.len() > n {
            return Err(Error::InvalidInput(format!(
                "task lists more than {n} representations"
            )));
        }
        for (i, rep) in spec.representations().iter().enumerate() {
            let plus = self.z_plus.get(i).map_or(&[][..], |v| v.as_slice());
            let minus = self.z_minus.get(i).map_or(&[][..], |v| v.as_slice());
            let ok = match rep {
                Representation::Linear { images, .. } => {
                    let d = images[0].dim();
                    plus.iter()
                        .all(|p| matches!(p, RepPoint::Point(x) if x.dim() == d))
                        && minus
                            .iter()
                            .all(|p| matches!(p, RepPoint::Hyperplane(h) if h.dim() == d))
                }
                Representation::Boundary { model, .. } => {
                    plus.iter().chain(minus).all(|p| match p {
                        RepPoint::Boundary(b) => model.check_boundary(b).is_ok(),
                        _ => false,
                    })
                }
            };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "task sets for representation {i} must be points/hyperplanes of matching dimension or boundary points of its model"
                )));
            }
        }
        Ok(())
    }

    /// `min` over representations and pairs of
    /// `min(d(g z^+, z^-), d(z^+, g z^-))`; `+inf` when the task is empty.
    pub fn margin(&self, spec: &SemigroupSpec, w: &Word) -> Result<f64> {
        let mut m = f64::INFINITY;
        for (i, rep) in spec.representations().iter().enumerate() {
            let plus = self.z_plus.get(i).map_or(&[][..], |v| v.as_slice());
            let minus = self.z_minus.get(i).map_or(&[][..], |v| v.as_slice());
            if plus.is_empty() || minus.is_empty() {
                continue;
            }
            let g = spec.evaluate(w, i)?;
            let moved_minus: Vec<RepPoint> =
                minus.iter().map(|z| g.act(z)).collect::<Result<_>>()?;
            for zp in plus {
                let gz = g.act(zp)?;
                for (zm, gzm) in minus.iter().zip(&moved_minus) {
                    m = m
                        .min(separation(rep, &gz, zm)?)
                        .min(separation(rep, zp, gzm)?);
                }
            }
        }
        Ok(m)
    }
}

/// Witness of condition (*).
#[derive(Clone, Debug, PartialEq)]
pub struct Transversal {
    pub word: Word,
    pub margin: f64,
}

fn best_of(words: &[Word], scores: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        let better = match best {
            None => true,
            Some((b, bs)) => s > bs || (s == bs && words[k].shortlex_cmp(&words[b]).is_lt()),
        };
        if better {
            best = Some((k, s));
        }
    }
    best
}

/// Searches `task.budget` words (short ones exhaustively, then random words
/// of growing length) and returns the one with the largest margin.
///
/// Fails with `BudgetExhausted` carrying the best margin when it does not
/// exceed `task.tau`.
pub fn find_transversal(spec: &SemigroupSpec, task: &TransversalityTask) -> Result<Transversal> {
    task.check(spec)?;
    let budget = task.budget.max(1);
    let words = candidate_words(spec.rank(), budget, budget / 2, spec.seed, 0);
    let scores: Vec<f64> = words
        .par_iter()
        .map(|w| task.margin(spec, w))
        .collect::<Result<_>>()?;
    let (k, margin) = best_of(&words, &scores).expect("nonempty candidate list");
    if !(margin > task.tau) {
        return Err(Error::BudgetExhausted {
            best_margin: margin,
            detail: format!(
                "no word among {budget} reaches transversality margin {}",
                task.tau
            ),
        });
    }
    Ok(Transversal {
        word: words[k].clone(),
        margin,
    })
}

/// Smallest singular value of the matrix with the given unit columns.
fn sigma_min(cols: &[&DVector<f64>]) -> f64 {
    let m = DMatrix::from_columns(&cols.iter().map(|c| (*c).clone()).collect::<Vec<_>>());
    singular_values(&m).map(|s| s[s.len() - 1]).unwrap_or(0.0)
}

fn subsets_with(n_old: usize, n_new: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    // Index sets of size k over old ++ new containing at least one new index.
    let total = n_old + n_new;
    let mut idx: Vec<usize> = (0..k).collect();
    if k > total {
        return;
    }
    loop {
        if idx[k - 1] >= n_old {
            f(&idx);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < total - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn vector_of(p: &RepPoint) -> Option<&DVector<f64>> {
    match p {
        RepPoint::Point(x) => Some(x.vector()),
        RepPoint::Hyperplane(h) => Some(h.normal()),
        RepPoint::Boundary(_) => None,
    }
}

/// Smallest general-position margin of `old ++ new` over subsets that meet
/// `new`: pairwise distances, and for subsets of `3..=dim` projective points
/// the smallest singular value of their unit representatives.
pub(crate) fn general_position_margin(
    rep: &Representation,
    old: &[RepPoint],
    new: &[RepPoint],
) -> Result<f64> {
    let all: Vec<&RepPoint> = old.iter().chain(new).collect();
    let mut m = f64::INFINITY;
    for (j, b) in new.iter().enumerate() {
        for a in &all[..old.len() + j] {
            m = m.min(separation(rep, a, b)?);
        }
    }
    if let Representation::Linear { images, .. } = rep {
        let d = images[0].dim();
        let vecs: Vec<&DVector<f64>> = all
            .iter()
            .map(|p| vector_of(p).expect("linear objects"))
            .collect();
        for k in 3..=d {
            subsets_with(old.len(), new.len(), k, &mut |idx| {
                let cols: Vec<&DVector<f64>> = idx.iter().map(|&i| vecs[i]).collect();
                m = m.min(sigma_min(&cols));
            });
        }
    }
    Ok(m)
}

/// Transported families of one candidate: `rho(beta) X^+`, `rho(beta)^{-1} X^-`
/// (the two used by the separation radius), then `rho(beta)^{-1} X^+` and
/// `rho(beta) X^-`.
#[derive(Clone, Debug)]
pub(crate) struct Transports {
    pub families: Vec<[Vec<RepPoint>; 4]>,
}

pub(crate) fn transports(
    spec: &SemigroupSpec,
    w: &Word,
    x_plus: &[Vec<RepPoint>],
    x_minus: &[Vec<RepPoint>],
) -> Result<Transports> {
    let mut families = Vec::new();
    for i in 0..spec.representations().len() {
        let plus = x_plus.get(i).map_or(&[][..], |v| v.as_slice());
        let minus = x_minus.get(i).map_or(&[][..], |v| v.as_slice());
        if plus.is_empty() && minus.is_empty() {
            families.push([vec![], vec![], vec![], vec![]]);
            continue;
        }
        let g = spec.evaluate(w, i)?;
        let gi = g.inverse();
        let map =
            |h: &RepElement, s: &[RepPoint]| s.iter().map(|z| h.act(z)).collect::<Result<Vec<_>>>();
        families.push([
            map(&g, plus)?,
            map(&gi, minus)?,
            map(&gi, plus)?,
            map(&g, minus)?,
        ]);
    }
    Ok(Transports { families })
}

/// Greedy inductive family: each step adds the candidate whose transported
/// families keep the largest general-position margin, subject to margin
/// `> tau` for all four families. Returns the words and the final margin.
pub(crate) fn greedy_family(
    spec: &SemigroupSpec,
    x_plus: &[Vec<RepPoint>],
    x_minus: &[Vec<RepPoint>],
    size: usize,
    pool: &[Word],
    tau: f64,
) -> Result<(Vec<Word>, f64)> {
    let reps = spec.representations();
    let moved: Vec<Transports> = pool
        .par_iter()
        .map(|w| transports(spec, w, x_plus, x_minus))
        .collect::<Result<_>>()?;
    let mut chosen: Vec<usize> = Vec::new();
    let mut acc: Vec<[Vec<RepPoint>; 4]> = vec![[vec![], vec![], vec![], vec![]]; reps.len()];
    let mut overall = f64::INFINITY;
    while chosen.len() < size {
        let scores: Vec<f64> = (0..pool.len())
            .into_par_iter()
            .map(|c| {
                if chosen.contains(&c) {
                    return Ok(f64::NAN);
                }
                let mut used = f64::INFINITY;
                let mut other = f64::INFINITY;
                for (i, rep) in reps.iter().enumerate() {
                    for f in 0..4 {
                        let m = general_position_margin(rep, &acc[i][f], &moved[c].families[i][f])?;
                        if f < 2 {
                            used = used.min(m);
                        } else {
                            other = other.min(m);
                        }
                    }
                }
                Ok(if other > tau { used } else { f64::NAN })
            })
            .collect::<Result<_>>()?;
        match best_of(pool, &scores) {
            Some((k, s)) if s > tau => {
                chosen.push(k);
                overall = overall.min(s);
                for (i, fams) in moved[k].families.iter().enumerate() {
                    for f in 0..4 {
                        acc[i][f].extend(fams[f].iter().cloned());
                    }
                }
            }
            best => return Err(Error::BudgetExhausted {
                best_margin: best.map_or(0.0, |b| b.1),
                detail: format!(
                    "general-position family stalled at {} of {size} elements among {} candidates",
                    chosen.len(),
                    pool.len()
                ),
            }),
        }
    }
    Ok((
        chosen.into_iter().map(|k| pool[k].clone()).collect(),
        overall,
    ))
}

fn check_input_position(
    spec: &SemigroupSpec,
    x_plus: &[Vec<RepPoint>],
    x_minus: &[Vec<RepPoint>],
) -> Result<()> {
    for (i, rep) in spec.representations().iter().enumerate() {
        for (label, set) in [("X+", x_plus.get(i)), ("X-", x_minus.get(i))] {
            let set = set.map_or(&[][..], |v| v.as_slice());
            if set.len() > 1 && !(general_position_margin(rep, &set[..1], &set[1..])? > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{label} of representation {i} is not in general position"
                )));
            }
        }
    }
    Ok(())
}

/// A family of `size` words whose translates of `X^+` and `X^-` (by
/// `rho(beta)` and `rho(beta)^{-1}`) are in general position in every
/// representation with nonempty sets.
///
/// Candidates are all words in shortlex order up to `budget` of them; each
/// inductive step keeps the candidate that maximizes the margin against
/// the accumulated translates.
pub fn build_general_position_family(
    spec: &SemigroupSpec,
    x_plus: &[Vec<RepPoint>],
    x_minus: &[Vec<RepPoint>],
    size: usize,
    budget: usize,
) -> Result<Vec<Word>> {
    TransversalityTask::new(x_plus.to_vec(), x_minus.to_vec(), budget).check(spec)?;
    check_input_position(spec, x_plus, x_minus)?;
    let pool = candidate_words(
        spec.rank(),
        budget.max(size),
        budget.max(size),
        spec.seed,
        1,
    );
    Ok(greedy_family(spec, x_plus, x_minus, size, &pool, TAU_TRANS)?.0)
}

/// Whether `w` acts proximally (linear) or hyperbolically (boundary).
pub(crate) fn proximal_in(spec: &SemigroupSpec, w: &Word, rep: usize) -> Result<bool> {
    Ok(match (spec.representation(rep)?, spec.evaluate(w, rep)?) {
        (_, RepElement::Linear(g)) => proximal_data(&g, SPECTRAL_TOL).is_ok(),
        (Representation::Boundary { model, .. }, RepElement::Boundary(g)) => {
            classify_isometry(model, &g, 8)?.kind == IsometryKind::Hyperbolic
        }
        _ => unreachable!("element matches its representation"),
    })
}

fn proximal_set(spec: &SemigroupSpec, w: &Word) -> Result<Vec<bool>> {
    (0..spec.representations().len())
        .map(|i| proximal_in(spec, w, i))
        .collect()
}

const COMBINATION_POWERS: [usize; 4] = [1, 2, 4, 8];

/// A word that is proximal in every linear representation and hyperbolic
/// in every boundary representation.
///
/// Plain search first (short words exhaustively, then random words); if
/// that stalls, per-representation witnesses are merged one at a time in
/// declaration order with the move `beta g^k beta' g_1^k`.
pub fn find_simultaneous_proximal(spec: &SemigroupSpec, budget: usize) -> Result<Word> {
    find_simultaneous_proximal_filtered(spec, budget, &|_| true)
}

pub(crate) fn find_simultaneous_proximal_filtered(
    spec: &SemigroupSpec,
    budget: usize,
    accept: &(dyn Fn(&Word) -> bool + Sync),
) -> Result<Word> {
    let n_reps = spec.representations().len();
    let plain = (budget / 2).max(1);
    let words = candidate_words(spec.rank(), plain, plain / 2, spec.seed, 2);
    let sets: Vec<Vec<bool>> = words
        .par_iter()
        .map(|w| proximal_set(spec, w))
        .collect::<Result<_>>()?;
    if let Some(k) = (0..words.len()).find(|&k| sets[k].iter().all(|&b| b) && accept(&words[k])) {
        return Ok(words[k].clone());
    }
    let witness: Vec<Option<usize>> = (0..n_reps)
        .map(|i| (0..words.len()).find(|&k| sets[k][i]))
        .collect();
    if let Some(i) = witness.iter().position(|w| w.is_none()) {
        return Err(Error::BudgetExhausted {
            best_margin: 0.0,
            detail: format!(
                "no proximal element of representation {i} ({}) among {plain} sampled words",
                spec.representations()[i].name()
            ),
        });
    }
    let shorts: Vec<Word> = candidate_words(
        spec.rank(),
        spec.rank() * (spec.rank() + 1),
        usize::MAX,
        spec.seed,
        3,
    );
    let mut spent = plain;
    let mut current = words[witness[0].expect("checked")].clone();
    let mut have = proximal_set(spec, &current)?;
    for i in 0..n_reps {
        if have[i] {
            continue;
        }
        let g1 = &words[witness[i].expect("checked")];
        let mut found = None;
        'search: for &k in &COMBINATION_POWERS {
            for b in &shorts {
                for b2 in &shorts {
                    if spent >= budget {
                        break 'search;
                    }
                    spent += 1;
                    let cand = b.concat(&current.pow(k)).concat(b2).concat(&g1.pow(k));
                    let s = proximal_set(spec, &cand)?;
                    if (0..n_reps).all(|j| !have[j] || s[j]) && s[i] {
                        found = Some((cand, s));
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some((c, s)) => {
                current = c;
                have = s;
            }
            None => {
                return Err(Error::BudgetExhausted {
                    best_margin: have.iter().filter(|&&b| b).count() as f64,
                    detail: format!(
                        "combination move failed to add representation {i} within budget {budget}"
                    ),
                })
            }
        }
    }
    if !accept(&current) {
        current = current.pow(2);
    }
    if !proximal_set(spec, &current)?.iter().all(|&b| b) || !accept(&current) {
        return Err(Error::BudgetExhausted {
            best_margin: 0.0,
            detail: "combined word is not simultaneously proximal".into(),
        });
    }
    Ok(current)
}

/// A word moving the basepoint of every boundary representation by at
/// least `c`.
pub fn find_large_displacement(spec: &SemigroupSpec, c: f64, budget: usize) -> Result<Word> {
    let budget = budget.max(1);
    let words = candidate_words(spec.rank(), budget, budget / 4, spec.seed, 4);
    let scores: Vec<f64> = words
        .par_iter()
        .map(|w| {
            let mut m = f64::INFINITY;
            for (i, rep) in spec.representations().iter().enumerate() {
                if let (Representation::Boundary { model, .. }, RepElement::Boundary(g)) =
                    (rep, spec.evaluate(w, i)?)
                {
                    m = m.min(displacement(model, &g)?);
                }
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    if let Some(k) = scores.iter().position(|&s| s >= c) {
        return Ok(words[k].clone());
    }
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Err(Error::BudgetExhausted {
        best_margin: best - c,
        detail: format!("largest minimal displacement {best} among {budget} words is below {c}"),
    })
}
