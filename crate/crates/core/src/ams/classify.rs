use rand::Rng;

use super::spec::{RepElement, Representation, SemigroupSpec, Word};
use crate::boundary::{classify_isometry, displacement, same_boundary_point, IsometryKind};
use crate::error::{Error, Result};
use crate::gromov::BoundaryPoint;
use crate::sampling::{purpose, stream_rng};

/// Outcome of the sampled classification of a boundary representation.
#[derive(Clone, Debug, PartialEq)]
pub enum SemigroupClass {
    /// No hyperbolic sample and displacements bounded by the generators'.
    /// A heuristic verdict: sampling cannot exclude unbounded orbits.
    Elliptic {
        heuristic: bool,
    },
    /// Every hyperbolic sample has the same fixed pair.
    Lineal {
        fix: (BoundaryPoint, BoundaryPoint),
    },
    /// Two hyperbolic samples with four pairwise distinct fixed points.
    GeneralType,
    Unresolved,
}

impl std::fmt::Display for SemigroupClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SemigroupClass::Elliptic { .. } => f.write_str("elliptic"),
            SemigroupClass::Lineal { fix } => write!(f, "lineal {{{}, {}}}", fix.0, fix.1),
            SemigroupClass::GeneralType => f.write_str("general-type"),
            SemigroupClass::Unresolved => f.write_str("unresolved"),
        }
    }
}

const MAX_SAMPLE_LEN: usize = 12;

/// Generators followed by random words of length up to 12.
pub(crate) fn sample_words(
    spec: &SemigroupSpec,
    budget: usize,
    purpose: u64,
    stream: u64,
) -> Vec<Word> {
    let mut out: Vec<Word> = (0..spec.rank()).map(Word::generator).take(budget).collect();
    let mut rng = stream_rng(spec.seed, purpose, stream);
    while out.len() < budget {
        let len = rng.random_range(1..=MAX_SAMPLE_LEN);
        out.push(
            Word::new((0..len).map(|_| rng.random_range(0..spec.rank())).collect())
                .expect("nonempty"),
        );
    }
    out
}

fn same_pair(a: &(BoundaryPoint, BoundaryPoint), b: &(BoundaryPoint, BoundaryPoint)) -> bool {
    (same_boundary_point(&a.0, &b.0) && same_boundary_point(&a.1, &b.1))
        || (same_boundary_point(&a.0, &b.1) && same_boundary_point(&a.1, &b.0))
}

fn disjoint_pairs(a: &(BoundaryPoint, BoundaryPoint), b: &(BoundaryPoint, BoundaryPoint)) -> bool {
    [&b.0, &b.1]
        .iter()
        .all(|y| !same_boundary_point(&a.0, y) && !same_boundary_point(&a.1, y))
}

/// Samples `budget` words (the generators first) and classifies the
/// action of the semigroup on the boundary of representation `rep`.
pub fn classify_semigroup(
    spec: &SemigroupSpec,
    rep: usize,
    budget: usize,
) -> Result<SemigroupClass> {
    let r = spec.representation(rep)?;
    let model = r.model().ok_or_else(|| {
        Error::InvalidInput(format!(
            "representation {rep} is linear, not a boundary action"
        ))
    })?;
    let mut axes: Vec<(BoundaryPoint, BoundaryPoint)> = Vec::new();
    let mut max_disp = 0.0f64;
    let mut gen_disp = 0.0f64;
    for (k, w) in sample_words(spec, budget.max(spec.rank()), purpose::CLASSIFY, rep as u64)
        .iter()
        .enumerate()
    {
        let g = match spec.evaluate(w, rep)? {
            RepElement::Boundary(g) => g,
            RepElement::Linear(_) => unreachable!("boundary representation"),
        };
        let d = displacement(model, &g)?;
        max_disp = max_disp.max(d);
        if k < spec.rank() {
            gen_disp = gen_disp.max(d);
        }
        let class = classify_isometry(model, &g, 8)?;
        if class.kind == IsometryKind::Hyperbolic {
            let (p, m) = class.axis().expect("hyperbolic");
            axes.push((p.clone(), m.clone()));
        }
    }
    if axes.is_empty() {
        return Ok(if max_disp <= gen_disp * (1.0 + 1e-9) + 1e-9 {
            SemigroupClass::Elliptic { heuristic: true }
        } else {
            SemigroupClass::Unresolved
        });
    }
    if axes.iter().all(|a| same_pair(a, &axes[0])) {
        return Ok(SemigroupClass::Lineal {
            fix: axes[0].clone(),
        });
    }
    for i in 0..axes.len() {
        for j in i + 1..axes.len() {
            if disjoint_pairs(&axes[i], &axes[j]) {
                return Ok(SemigroupClass::GeneralType);
            }
        }
    }
    Ok(SemigroupClass::Unresolved)
}

/// Indices of the linear, general-type and lineal representations.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub linear: Vec<usize>,
    pub general: Vec<usize>,
    pub lineal: Vec<(usize, (BoundaryPoint, BoundaryPoint))>,
}

impl Partition {
    /// Linear and general-type representations, in declaration order.
    pub fn transverse(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.linear.iter().chain(&self.general).copied().collect();
        v.sort_unstable();
        v
    }

    pub fn lineal_indices(&self) -> Vec<usize> {
        self.lineal.iter().map(|(i, _)| *i).collect()
    }
}

/// Classifies every boundary representation; elliptic or unresolved ones
/// fail with `HypothesisFailed`.
pub fn partition(spec: &SemigroupSpec, budget: usize) -> Result<Partition> {
    let mut p = Partition {
        linear: vec![],
        general: vec![],
        lineal: vec![],
    };
    for (i, r) in spec.representations().iter().enumerate() {
        match r {
            Representation::Linear { .. } => p.linear.push(i),
            Representation::Boundary { .. } => match classify_semigroup(spec, i, budget)? {
                SemigroupClass::GeneralType => p.general.push(i),
                SemigroupClass::Lineal { fix } => p.lineal.push((i, fix)),
                c => {
                    return Err(Error::HypothesisFailed(format!(
                        "representation {i} ({}) is {c}; only general-type and lineal actions are supported",
                        r.name()
                    )))
                }
            },
        }
    }
    Ok(p)
}

/// Parity of a generator in one lineal representation: whether it swaps
/// the two ends of the invariant axis.
fn generator_parity(
    spec: &SemigroupSpec,
    rep: usize,
    fix: &(BoundaryPoint, BoundaryPoint),
    gen: usize,
) -> Result<bool> {
    let g = match spec.evaluate(&Word::generator(gen), rep)? {
        RepElement::Boundary(g) => g,
        RepElement::Linear(_) => {
            return Err(Error::NotLineal(format!("representation {rep} is linear")))
        }
    };
    let a = g.act_boundary(&fix.0)?;
    let b = g.act_boundary(&fix.1)?;
    if same_boundary_point(&a, &fix.0) && same_boundary_point(&b, &fix.1) {
        Ok(false)
    } else if same_boundary_point(&a, &fix.1) && same_boundary_point(&b, &fix.0) {
        Ok(true)
    } else {
        Err(Error::NotLineal(format!(
            "generator {} does not preserve {{{}, {}}} in representation {rep}",
            spec.generators()[gen],
            fix.0,
            fix.1
        )))
    }
}

/// Parity vectors of the generators, one entry per lineal representation.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityMap {
    pub reps: Vec<usize>,
    pub generators: Vec<Vec<bool>>,
}

impl ParityMap {
    pub fn new(
        spec: &SemigroupSpec,
        lineal: &[(usize, (BoundaryPoint, BoundaryPoint))],
    ) -> Result<Self> {
        let generators = (0..spec.rank())
            .map(|g| {
                lineal
                    .iter()
                    .map(|(i, fix)| generator_parity(spec, *i, fix, g))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            reps: lineal.iter().map(|(i, _)| *i).collect(),
            generators,
        })
    }

    /// `phi(w)`: the parity map is a homomorphism to `(Z/2)^N`.
    pub fn of(&self, w: &Word) -> Vec<bool> {
        let mut v = vec![false; self.reps.len()];
        for &g in w.indices() {
            for (x, y) in v.iter_mut().zip(&self.generators[g]) {
                *x ^= *y;
            }
        }
        v
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().flatten().all(|x| !x)
    }
}

/// Representative of one realized parity vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityRep {
    pub word: Word,
    pub parity: Vec<bool>,
}

fn parity_span(gens: &[Vec<bool>]) -> usize {
    let mut seen: Vec<Vec<bool>> = vec![vec![false; gens.first().map_or(0, |g| g.len())]];
    for g in gens {
        let extra: Vec<Vec<bool>> = seen
            .iter()
            .map(|v| v.iter().zip(g).map(|(a, b)| a ^ b).collect())
            .collect();
        for e in extra {
            if !seen.contains(&e) {
                seen.push(e);
            }
        }
    }
    seen.len()
}

/// One shortest word per realized parity vector, so that every `gamma`
/// has some `s_0` with `phi(gamma s_0) = 0`.
///
/// Fails with `NotLineal` when the spec has no lineal representation or a
/// generator does not preserve the invariant pair, and with
/// `BudgetExhausted` if fewer than `budget` words do not realize the span.
pub fn lineal_fix_reduction(spec: &SemigroupSpec, budget: usize) -> Result<Vec<ParityRep>> {
    let lineal = partition(spec, budget.max(64))?.lineal;
    if lineal.is_empty() {
        return Err(Error::NotLineal("no lineal boundary representation".into()));
    }
    let map = ParityMap::new(spec, &lineal)?;
    reduction_from_map(spec, &map, budget)
}

pub(crate) fn reduction_from_map(
    spec: &SemigroupSpec,
    map: &ParityMap,
    budget: usize,
) -> Result<Vec<ParityRep>> {
    let target = parity_span(&map.generators);
    let mut reps: Vec<ParityRep> = Vec::new();
    let mut frontier: Vec<Word> = (0..spec.rank()).map(Word::generator).collect();
    let mut examined = 0usize;
    while !frontier.is_empty() && reps.len() < target && examined < budget.max(1) {
        let mut next = Vec::new();
        for w in frontier {
            examined += 1;
            let p = map.of(&w);
            if !reps.iter().any(|r| r.parity == p) {
                reps.push(ParityRep {
                    word: w.clone(),
                    parity: p,
                });
            }
            if reps.len() == target || examined >= budget.max(1) {
                break;
            }
            for g in 0..spec.rank() {
                next.push(w.concat(&Word::generator(g)));
            }
        }
        frontier = next;
    }
    if reps.len() < target {
        return Err(Error::BudgetExhausted {
            best_margin: reps.len() as f64,
            detail: format!(
                "found {} of {target} parity classes in {examined} words",
                reps.len()
            ),
        });
    }
    reps.sort_by(|a, b| a.parity.cmp(&b.parity));
    Ok(reps)
}
