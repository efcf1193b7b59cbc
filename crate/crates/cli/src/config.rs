//! Pipeline configuration: a TOML file with nested sections. Unknown keys
//! are rejected so typos cannot silently change a benchmark.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qmkl_core::kernels::{default_basis, KernelSpec};
use qmkl_core::qsim::{Entangler, FeatureMapSpec, RotationAxis};

use crate::error::CliError;

fn default_pca_components() -> usize {
    4
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pca_components")]
    pub pca_components: usize,
    /// Center kernels before the target alignment.
    #[serde(default = "default_true")]
    pub center_alignment: bool,
    /// Output directory; `--out` overrides it.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub input: InputConfig,
    /// Basis kernels; the built-in five-member set when omitted.
    #[serde(default)]
    pub kernels: Option<Vec<KernelConfig>>,
    #[serde(default)]
    pub svm: SvmConfig,
    #[serde(default)]
    pub gbm: GbmConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Pre-split train CSV; requires either `test_csv` or `test_fraction`.
    #[serde(default)]
    pub train_csv: Option<PathBuf>,
    #[serde(default)]
    pub test_csv: Option<PathBuf>,
    /// Seeded stratified split fraction applied to `train_csv` rows.
    #[serde(default)]
    pub test_fraction: Option<f64>,
    /// Synthetic two-Gaussian benchmark source.
    #[serde(default)]
    pub synthetic: Option<SyntheticConfig>,
    /// Binary 0/1 label column.
    #[serde(default)]
    pub label_column: Option<String>,
    /// Activity column; labels via pIC50 >= 6 after unit conversion.
    #[serde(default)]
    pub activity_column: Option<String>,
    /// Unit of the activity column: `nM` (default), `uM` or `M`.
    #[serde(default)]
    pub activity_unit: Option<String>,
    #[serde(default)]
    pub feature_columns: Option<Vec<String>>,
    #[serde(default)]
    pub id_column: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_train: usize,
    pub n_test: usize,
    #[serde(default = "default_pca_components")]
    pub dims: usize,
    pub class_shift: f64,
}

/// One basis kernel entry. `kind` selects the variant; fields that do not
/// belong to the selected kind are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub name: String,
    /// `quantum` or `rbf`.
    pub kind: String,
    #[serde(default)]
    pub axis: Option<String>,
    #[serde(default)]
    pub reps: Option<usize>,
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub entangler: Option<String>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmConfig {
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            tol: 1e-3,
            max_passes: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GbmConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
}

impl Default for GbmConfig {
    fn default() -> Self {
        GbmConfig {
            n_trees: 100,
            max_depth: 3,
            learning_rate: 0.1,
            min_leaf: 2,
        }
    }
}

impl PipelineConfig {
    pub fn from_path(path: &Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: PipelineConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let input = &self.input;
        if self.pca_components == 0 {
            return Err(CliError::Config("pca_components must be >= 1".to_string()));
        }
        match (&input.synthetic, &input.train_csv) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "input.synthetic and input.train_csv are mutually exclusive".to_string(),
                ));
            }
            (Some(_), None) => {
                if input.test_csv.is_some() || input.test_fraction.is_some() {
                    return Err(CliError::Config(
                        "synthetic input does not take test_csv or test_fraction".to_string(),
                    ));
                }
                if input.label_column.is_some() || input.activity_column.is_some() {
                    return Err(CliError::Config(
                        "synthetic input does not take label or activity columns".to_string(),
                    ));
                }
            }
            (None, Some(_)) => {
                match (&input.test_csv, &input.test_fraction) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::Config(
                            "set exactly one of input.test_csv or input.test_fraction".to_string(),
                        ));
                    }
                    (None, None) => {
                        return Err(CliError::Config(
                            "set exactly one of input.test_csv or input.test_fraction".to_string(),
                        ));
                    }
                    (None, Some(f)) if !(*f > 0.0 && *f < 1.0) => {
                        return Err(CliError::Config(format!(
                            "input.test_fraction must lie in (0, 1), got {f}"
                        )));
                    }
                    _ => {}
                }
                match (&input.label_column, &input.activity_column) {
                    (Some(_), Some(_)) | (None, None) => {
                        return Err(CliError::Config(
                            "set exactly one of input.label_column or input.activity_column"
                                .to_string(),
                        ));
                    }
                    _ => {}
                }
                if input.activity_column.is_none() && input.activity_unit.is_some() {
                    return Err(CliError::Config(
                        "input.activity_unit requires input.activity_column".to_string(),
                    ));
                }
                if let Some(unit) = &input.activity_unit {
                    activity_unit_to_nm(unit)?;
                }
            }
            (None, None) => {
                return Err(CliError::Config(
                    "input needs either train_csv or a synthetic block".to_string(),
                ));
            }
        }
        if let Some(synth) = &input.synthetic {
            if synth.n_train < 4 || synth.n_test < 2 {
                return Err(CliError::Config(
                    "synthetic input needs n_train >= 4 and n_test >= 2".to_string(),
                ));
            }
            if synth.dims == 0 {
                return Err(CliError::Config("synthetic dims must be >= 1".to_string()));
            }
        }
        if let Some(kernels) = &self.kernels {
            if kernels.is_empty() {
                return Err(CliError::Config("kernels list must not be empty".to_string()));
            }
            let mut names = std::collections::BTreeSet::new();
            for k in kernels {
                if !names.insert(&k.name) {
                    return Err(CliError::Config(format!("duplicate kernel name `{}`", k.name)));
                }
            }
            self.basis_specs()?;
        }
        if !(self.svm.c > 0.0) || !(self.svm.tol > 0.0) || self.svm.max_passes == 0 {
            return Err(CliError::Config(
                "svm requires c > 0, tol > 0 and max_passes >= 1".to_string(),
            ));
        }
        if self.gbm.n_trees == 0
            || self.gbm.max_depth == 0
            || self.gbm.min_leaf == 0
            || !(self.gbm.learning_rate > 0.0 && self.gbm.learning_rate <= 1.0)
        {
            return Err(CliError::Config(
                "gbm requires n_trees, max_depth, min_leaf >= 1 and learning_rate in (0, 1]"
                    .to_string(),
            ));
        }
        Ok(())
    }

    /// The configured basis kernels instantiated for `d` features, or the
    /// default five-member basis when the config omits them.
    pub fn basis_for(&self, d: usize) -> Result<Vec<KernelSpec>, CliError> {
        match &self.kernels {
            None => default_basis(d).map_err(|e| CliError::Config(e.to_string())),
            Some(_) => {
                let specs = self.basis_specs()?;
                specs
                    .into_iter()
                    .map(|(name, kind)| match kind {
                        ParsedKernel::Quantum { reps, axis, scale, entangler } => {
                            let map = FeatureMapSpec::new(d, reps, axis, scale, entangler)
                                .map_err(|e| CliError::Config(format!("kernel `{name}`: {e}")))?;
                            Ok(KernelSpec::quantum(name, map))
                        }
                        ParsedKernel::Rbf { gamma } => {
                            let gamma = gamma.unwrap_or(1.0 / d as f64);
                            KernelSpec::rbf(name.clone(), gamma)
                                .map_err(|e| CliError::Config(format!("kernel `{name}`: {e}")))
                        }
                    })
                    .collect()
            }
        }
    }

    fn basis_specs(&self) -> Result<Vec<(String, ParsedKernel)>, CliError> {
        let kernels = self.kernels.as_ref().expect("checked by caller");
        kernels.iter().map(parse_kernel_entry).collect()
    }
}

enum ParsedKernel {
    Quantum {
        reps: usize,
        axis: RotationAxis,
        scale: f64,
        entangler: Entangler,
    },
    Rbf {
        gamma: Option<f64>,
    },
}

fn parse_kernel_entry(entry: &KernelConfig) -> Result<(String, ParsedKernel), CliError> {
    let forbid = |field: Option<()>, name: &str| -> Result<(), CliError> {
        if field.is_some() {
            Err(CliError::Config(format!(
                "kernel `{}`: `{name}` does not apply to kind `{}`",
                entry.name, entry.kind
            )))
        } else {
            Ok(())
        }
    };
    match entry.kind.as_str() {
        "quantum" => {
            forbid(entry.gamma.map(|_| ()), "gamma")?;
            let axis = match entry.axis.as_deref().unwrap_or("y") {
                "y" => RotationAxis::Y,
                "zh" | "z_after_h" => RotationAxis::ZAfterH,
                other => {
                    return Err(CliError::Config(format!(
                        "kernel `{}`: unknown axis `{other}` (expected `y` or `zh`)",
                        entry.name
                    )))
                }
            };
            let entangler = match entry.entangler.as_deref().unwrap_or("ring") {
                "ring" => Entangler::Ring,
                "linear" => Entangler::Linear,
                other => {
                    return Err(CliError::Config(format!(
                        "kernel `{}`: unknown entangler `{other}` (expected `ring` or `linear`)",
                        entry.name
                    )))
                }
            };
            Ok((
                entry.name.clone(),
                ParsedKernel::Quantum {
                    reps: entry.reps.unwrap_or(1),
                    axis,
                    scale: entry.scale.unwrap_or(1.0),
                    entangler,
                },
            ))
        }
        "rbf" => {
            forbid(entry.axis.as_ref().map(|_| ()), "axis")?;
            forbid(entry.reps.map(|_| ()), "reps")?;
            forbid(entry.scale.map(|_| ()), "scale")?;
            forbid(entry.entangler.as_ref().map(|_| ()), "entangler")?;
            Ok((entry.name.clone(), ParsedKernel::Rbf { gamma: entry.gamma }))
        }
        other => Err(CliError::Config(format!(
            "kernel `{}`: unknown kind `{other}` (expected `quantum` or `rbf`)",
            entry.name
        ))),
    }
}

/// Conversion factor from the configured activity unit to nanomolar.
pub fn activity_unit_to_nm(unit: &str) -> Result<f64, CliError> {
    match unit {
        "nM" => Ok(1.0),
        "uM" => Ok(1e3),
        "M" => Ok(1e9),
        other => Err(CliError::Config(format!(
            "unknown activity unit `{other}` (expected nM, uM or M)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PipelineConfig, CliError> {
        let config: PipelineConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    #[test]
    fn minimal_synthetic_config() {
        let config = parse(
            r#"
            seed = 7
            [input]
            synthetic = { n_train = 200, n_test = 100, dims = 4, class_shift = 0.7 }
            "#,
        )
        .unwrap();
        assert_eq!(config.seed, 7);
        assert_eq!(config.pca_components, 4);
        assert!(config.center_alignment);
        assert_eq!(config.basis_for(4).unwrap().len(), 5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse(
            r#"
            sead = 7
            [input]
            synthetic = { n_train = 10, n_test = 4, dims = 2, class_shift = 0.5 }
            "#
        )
        .is_err());
        assert!(parse(
            r#"
            [input]
            synthetic = { n_train = 10, n_test = 4, dims = 2, class_shift = 0.5, bogus = 1 }
            "#
        )
        .is_err());
    }

    #[test]
    fn exactly_one_test_source() {
        let both = r#"
            [input]
            train_csv = "a.csv"
            test_csv = "b.csv"
            test_fraction = 0.2
            label_column = "y"
        "#;
        assert!(parse(both).is_err());
        let neither = r#"
            [input]
            train_csv = "a.csv"
            label_column = "y"
        "#;
        assert!(parse(neither).is_err());
    }

    #[test]
    fn label_xor_activity() {
        let both = r#"
            [input]
            train_csv = "a.csv"
            test_fraction = 0.2
            label_column = "y"
            activity_column = "ic50"
        "#;
        assert!(parse(both).is_err());
    }

    #[test]
    fn kernel_entries_parse() {
        let config = parse(
            r#"
            [input]
            synthetic = { n_train = 10, n_test = 4, dims = 2, class_shift = 0.5 }
            [[kernels]]
            name = "q"
            kind = "quantum"
            axis = "zh"
            reps = 2
            scale = 1.5
            entangler = "linear"
            [[kernels]]
            name = "r"
            kind = "rbf"
            gamma = 0.5
            "#,
        )
        .unwrap();
        let basis = config.basis_for(2).unwrap();
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn kernel_field_kind_mismatch_is_rejected() {
        assert!(parse(
            r#"
            [input]
            synthetic = { n_train = 10, n_test = 4, dims = 2, class_shift = 0.5 }
            [[kernels]]
            name = "bad"
            kind = "rbf"
            reps = 2
            "#
        )
        .is_err());
        assert!(parse(
            r#"
            [input]
            synthetic = { n_train = 10, n_test = 4, dims = 2, class_shift = 0.5 }
            [[kernels]]
            name = "bad"
            kind = "quantum"
            gamma = 0.5
            "#
        )
        .is_err());
    }

    #[test]
    fn duplicate_kernel_names_are_rejected() {
        assert!(parse(
            r#"
            [input]
            synthetic = { n_train = 10, n_test = 4, dims = 2, class_shift = 0.5 }
            [[kernels]]
            name = "k"
            kind = "rbf"
            [[kernels]]
            name = "k"
            kind = "rbf"
            "#
        )
        .is_err());
    }

    #[test]
    fn activity_units() {
        assert_eq!(activity_unit_to_nm("nM").unwrap(), 1.0);
        assert_eq!(activity_unit_to_nm("uM").unwrap(), 1e3);
        assert_eq!(activity_unit_to_nm("M").unwrap(), 1e9);
        assert!(activity_unit_to_nm("pM").is_err());
    }
}
