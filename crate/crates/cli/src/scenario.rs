//! Scenario files: a semigroup, a seed, an output directory and a list of
//! commands. See `docs/scenario.md` for the schema.

use std::path::{Path, PathBuf};

use proxlab_core::ams::{Representation, SemigroupSpec};
use proxlab_core::gromov::{Mobius, SpaceIsometry, SpaceModel};
use proxlab_core::projective::SquareMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    /// Relative paths are resolved against the scenario file's directory.
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub spec: SpecDef,
    #[serde(default)]
    pub commands: Vec<CommandDef>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDef {
    pub generators: Vec<String>,
    pub representations: Vec<RepDef>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RepDef {
    Linear {
        name: String,
        images: Vec<MatrixDef>,
    },
    Boundary {
        name: String,
        model: ModelDef,
        images: Vec<IsometryDef>,
    },
}

/// `{"dim": d, "rows": [[...], ...]}`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDef {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixDef {
    pub fn build(&self) -> Result<SquareMatrix, CliError> {
        if self.rows.len() != self.dim {
            return Err(CliError::Input(format!(
                "matrix declares dim {} but has {} rows",
                self.dim,
                self.rows.len()
            )));
        }
        Ok(SquareMatrix::from_rows(&self.rows)?)
    }
}

/// `{"model": "tree", "rank": 2, "a": 2.0}` or `{"model": "plane", "a": e}`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelDef {
    Tree {
        rank: usize,
        #[serde(default = "two")]
        a: f64,
    },
    Plane {
        #[serde(default = "euler")]
        a: f64,
    },
}

fn two() -> f64 {
    2.0
}

fn euler() -> f64 {
    std::f64::consts::E
}

impl ModelDef {
    pub fn build(&self) -> Result<SpaceModel, CliError> {
        Ok(match self {
            ModelDef::Tree { rank, a } => SpaceModel::tree(*rank, *a)?,
            ModelDef::Plane { a } => SpaceModel::plane_with_base(*a)?,
        })
    }
}

/// A reduced word such as `"abA"` (tree) or `{"mat": [[a, b], [c, d]]}`
/// (plane).
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum IsometryDef {
    Word(String),
    Mat { mat: [[f64; 2]; 2] },
}

impl IsometryDef {
    pub fn build(&self, model: &SpaceModel) -> Result<SpaceIsometry, CliError> {
        let g = match self {
            IsometryDef::Word(w) => SpaceIsometry::Tree(w.parse()?),
            IsometryDef::Mat { mat } => {
                SpaceIsometry::Plane(Mobius::new(mat[0][0], mat[0][1], mat[1][0], mat[1][1])?)
            }
        };
        model.check_isometry(&g)?;
        Ok(g)
    }
}

impl SpecDef {
    pub fn build(&self, seed: u64) -> Result<SemigroupSpec, CliError> {
        let reps = self
            .representations
            .iter()
            .map(|r| {
                Ok(match r {
                    RepDef::Linear { name, images } => Representation::Linear {
                        name: name.clone(),
                        images: images
                            .iter()
                            .map(MatrixDef::build)
                            .collect::<Result<_, CliError>>()?,
                    },
                    RepDef::Boundary {
                        name,
                        model,
                        images,
                    } => {
                        let model = model.build()?;
                        let images = images
                            .iter()
                            .map(|g| g.build(&model))
                            .collect::<Result<_, CliError>>()?;
                        Representation::Boundary {
                            name: name.clone(),
                            model,
                            images,
                        }
                    }
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(SemigroupSpec::new(self.generators.clone(), reps, seed)?)
    }
}

/// Overrides accepted by every command.
#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub resolution: Option<usize>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    /// Fields of `over` take precedence.
    pub fn merge(self, over: Overrides) -> Overrides {
        Overrides {
            resolution: over.resolution.or(self.resolution),
            budget: over.budget.or(self.budget),
            seed: over.seed.or(self.seed),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandDef {
    AnalyzeMatrix(AnalyzeMatrix),
    AnalyzeIsometry(AnalyzeIsometry),
    EstimateDelta(EstimateDelta),
    BuildAms(BuildAms),
    Proximalize(Proximalize),
    VerifyBounds(VerifyBounds),
    Sweep(Sweep),
}

impl CommandDef {
    pub fn name(&self) -> &'static str {
        match self {
            CommandDef::AnalyzeMatrix(_) => "analyze-matrix",
            CommandDef::AnalyzeIsometry(_) => "analyze-isometry",
            CommandDef::EstimateDelta(_) => "estimate-delta",
            CommandDef::BuildAms(_) => "build-ams",
            CommandDef::Proximalize(_) => "proximalize",
            CommandDef::VerifyBounds(_) => "verify-bounds",
            CommandDef::Sweep(_) => "sweep",
        }
    }

    pub fn overrides_mut(&mut self) -> &mut Overrides {
        match self {
            CommandDef::AnalyzeMatrix(c) => &mut c.common,
            CommandDef::AnalyzeIsometry(c) => &mut c.common,
            CommandDef::EstimateDelta(c) => &mut c.common,
            CommandDef::BuildAms(c) => &mut c.common,
            CommandDef::Proximalize(c) => &mut c.common,
            CommandDef::VerifyBounds(c) => &mut c.common,
            CommandDef::Sweep(c) => &mut c.common,
        }
    }
}

// Each command flattens its overrides into its own object.
macro_rules! command {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Debug, Default, Deserialize, Serialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $($(#[$fm])* #[serde(default, skip_serializing_if = "Option::is_none")] pub $field: Option<$ty>,)*
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub resolution: Option<usize>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub budget: Option<usize>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub seed: Option<u64>,
            #[serde(skip)]
            pub common: Overrides,
        }

        impl $name {
            /// Scenario-level values overridden by command-line ones.
            pub fn settings(&self) -> Overrides {
                Overrides { resolution: self.resolution, budget: self.budget, seed: self.seed }.merge(self.common)
            }
        }
    };
}

command!(
    /// Cartan and Jordan projections, proximal data, gap bound and an
    /// optional `(r, eps)` certificate of a matrix, or of the image of a
    /// word in a linear representation.
    AnalyzeMatrix { matrix: MatrixDef, rep: usize, word: String, power: u64, r: f64, eps: f64 }
);

command!(
    /// Displacement, stable length, classification, fixed points and length
    /// gap of an isometry, or of the image of a word.
    AnalyzeIsometry { model: ModelDef, isometry: IsometryDef, rep: usize, word: String, n_max: usize, r: f64, eps: f64 }
);

command!(
    /// Four-point delta on random samples of growing size.
    EstimateDelta { model: ModelDef, samples: usize }
);

command!(
    /// Builds the set `S`; later commands of the scenario reuse it.
    BuildAms { r: f64, eps: f64, n_scan_max: usize }
);

command!(
    /// Finds `s` in `S` for explicit words or for random words.
    Proximalize { words: Vec<String>, samples: usize, max_len: usize }
);

command!(
    /// Spectral and length discrepancies of `gamma s` against their budgets.
    VerifyBounds { samples: usize, max_len: usize, n_max: usize }
);

command!(
    /// Certification of `w^n` for `n` in a range.
    Sweep { rep: usize, word: String, n_min: usize, n_max: usize, r: f64, eps: f64 }
);

/// Parses a scenario, reporting the JSON path of the first schema error.
pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Schema(format!("at {path}: {inner}"))
    })
}

/// Reads and parses a scenario file and builds its semigroup.
pub fn load(path: &Path) -> Result<(Scenario, SemigroupSpec), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let sc = parse(&text)?;
    let spec = sc.spec.build(sc.seed)?;
    Ok((sc, spec))
}
