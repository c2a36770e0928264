use std::path::PathBuf;

use clap::{Args, ValueEnum};
use gengrover::generate::{Family, InstanceRecipe};
use gengrover::instance::load_instance;
use gengrover::SearchInstance;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "GENGROVER_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Hadamard,
    Random,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Hadamard => Family::Hadamard,
            FamilyArg::Random => Family::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Either an instance file or a generator spec.
#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Instance JSON file.
    #[arg(long, conflicts_with_all = ["d", "n", "m", "family", "sources", "targets"])]
    pub instance: Option<PathBuf>,
    /// Hilbert-space dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of source states (defaults to the length of --sources).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of targets (defaults to the length of --targets).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value = "hadamard")]
    pub family: FamilyArg,
    /// Hadamard row indices of the sources.
    #[arg(long, value_delimiter = ',')]
    pub sources: Option<Vec<usize>>,
    /// Target basis indices.
    #[arg(long, value_delimiter = ',')]
    pub targets: Option<Vec<usize>>,
    /// Master seed; required whenever something is drawn at random.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the instance as JSON.
    #[arg(long)]
    pub save_instance: Option<PathBuf>,
}

/// A loaded instance and where it came from.
pub struct Loaded {
    pub instance: SearchInstance,
    pub metadata: Vec<(String, String)>,
}

impl InstanceArgs {
    pub fn recipe(&self) -> CliResult<InstanceRecipe> {
        let d = self
            .d
            .ok_or_else(|| CliError::Usage("either --instance or --d is required".into()))?;
        let n = self
            .n
            .or(self.sources.as_ref().map(Vec::len))
            .ok_or_else(|| CliError::Usage("--n is required without --sources".into()))?;
        let m = self
            .m
            .or(self.targets.as_ref().map(Vec::len))
            .ok_or_else(|| CliError::Usage("--m is required without --targets".into()))?;
        let mut recipe = InstanceRecipe {
            sources: self.sources.clone(),
            targets: self.targets.clone(),
            family: self.family.into(),
            ..InstanceRecipe::hadamard(d, n, m, 0)
        };
        match self.seed {
            Some(seed) => recipe.seed = seed,
            None if recipe.is_stochastic() => {
                return Err(CliError::Usage(
                    "--seed is required for generated instances".into(),
                ))
            }
            None => {}
        }
        Ok(recipe)
    }

    pub fn load(&self) -> CliResult<Loaded> {
        let (instance, mut metadata) = match &self.instance {
            Some(path) => (
                load_instance(path)?,
                vec![("instance_file".to_string(), path.display().to_string())],
            ),
            None => {
                let recipe = self.recipe()?;
                let family = match recipe.family {
                    Family::Hadamard => "hadamard",
                    Family::Random => "random",
                };
                let mut meta = vec![("family".to_string(), family.to_string())];
                if let Some(seed) = self.seed {
                    meta.push(("seed".to_string(), seed.to_string()));
                }
                (recipe.build()?, meta)
            }
        };
        metadata.push(("D".into(), instance.dim().to_string()));
        metadata.push(("N".into(), instance.n().to_string()));
        metadata.push(("M".into(), instance.m().to_string()));
        metadata.push(("instance_sha256".into(), instance_hash(&instance)));
        if let Some(path) = &self.save_instance {
            instance
                .save(path)
                .map_err(|e| CliError::Io(path.clone(), e))?;
        }
        Ok(Loaded { instance, metadata })
    }
}

pub fn instance_hash(inst: &SearchInstance) -> String {
    hex::encode(Sha256::digest(inst.to_json().as_bytes()))
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; defaults to `<subcommand>.<format>` in $GENGROVER_OUT_DIR
    /// or the working directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; csv by default, json lines for `search`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputArgs {
    pub fn path(&self, stem: &str, ext: &str) -> PathBuf {
        if let Some(p) = &self.out {
            return p.clone();
        }
        let dir = std::env::var_os(OUT_DIR_VAR)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("{stem}.{ext}"))
    }
}
