use std::path::{Path, PathBuf};

use clap::ValueEnum;
use cmalab_core::elliptic::{GridSpec, HarmonicSeed};
use cmalab_core::radial::catalog_entry;
use cmalab_core::{BiSeries, HoloSeed};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyFlat,
    VerifyCylinder,
    Curvature,
    Radial,
    Donaldson,
    Picard,
    Appendix,
    #[default]
    All,
}

impl Command {
    pub const PIPELINES: [Command; 7] = [
        Command::VerifyFlat,
        Command::VerifyCylinder,
        Command::Curvature,
        Command::Radial,
        Command::Donaldson,
        Command::Picard,
        Command::Appendix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyFlat => "verify-flat",
            Command::VerifyCylinder => "verify-cylinder",
            Command::Curvature => "curvature",
            Command::Radial => "radial",
            Command::Donaldson => "donaldson",
            Command::Picard => "picard",
            Command::Appendix => "appendix",
            Command::All => "all",
        }
    }
}

/// Holomorphic function of `w`, given in closed form or by Taylor coefficients `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeedSpec {
    Zero,
    Linear { scale: [f64; 2] },
    Exp { kappa: [f64; 2] },
    Taylor { coeffs: Vec<[f64; 2]> },
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl SeedSpec {
    pub fn build(&self, label: &str, order: usize) -> Result<HoloSeed, CliError> {
        Ok(match self {
            SeedSpec::Zero => HoloSeed::zero(order),
            SeedSpec::Linear { scale } => HoloSeed::linear(cx(*scale), order),
            SeedSpec::Exp { kappa } => HoloSeed::exp(cx(*kappa), order),
            SeedSpec::Taylor { coeffs } => {
                let taylor: Vec<Complex64> = coeffs.iter().copied().map(cx).collect();
                HoloSeed::from_taylor(label, &taylor, f64::INFINITY, order)
                    .map_err(|e| CliError::ConfigInvalid(format!("seed {label}: {e}")))?
            }
        })
    }

    fn check(&self, label: &str) -> Result<(), CliError> {
        let finite = |p: &[f64; 2]| p.iter().all(|v| v.is_finite());
        let ok = match self {
            SeedSpec::Zero => true,
            SeedSpec::Linear { scale: p } | SeedSpec::Exp { kappa: p } => finite(p),
            SeedSpec::Taylor { coeffs } => coeffs.iter().all(finite),
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::ConfigInvalid(format!("seed {label} has non-finite coefficients")))
        }
    }
}

/// Deliberate corruption of a constructed solution, for exercising failure paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Replace `b` by `w̄` after construction.
    BWbar,
}

impl Fault {
    pub fn apply(self, coeffs: &cmalab_core::SolutionCoeffs) -> cmalab_core::SolutionCoeffs {
        match self {
            Fault::BWbar => coeffs.with_b(BiSeries::wbar(coeffs.order())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatSeeds {
    pub h: SeedSpec,
    pub f: SeedSpec,
    pub b: SeedSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DonaldsonSeed {
    /// One of `constant`, `linear`, `re-power`, `im-power`.
    pub name: String,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedConfig {
    pub flat: FlatSeeds,
    pub fault: Option<Fault>,
    /// Radius of the disc carrying the nowhere-flat example.
    pub cylinder_radius: f64,
    pub radial_entries: Vec<String>,
    pub donaldson: DonaldsonSeed,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig {
            flat: FlatSeeds {
                h: SeedSpec::Linear { scale: [1.0, 0.0] },
                f: SeedSpec::Exp { kappa: [-1.0, 0.0] },
                b: SeedSpec::Zero,
            },
            fault: None,
            cylinder_radius: 1.0,
            radial_entries: cmalab_core::radial::catalog()
                .iter()
                .map(|e| e.name.to_string())
                .collect(),
            donaldson: DonaldsonSeed {
                name: "linear".into(),
                coeffs: vec![2.0, 1.0, 0.0],
            },
        }
    }
}

impl SeedConfig {
    pub const PRESETS: [&'static str; 4] = ["standard", "polynomial", "periodic", "fault-b-wbar"];

    pub fn preset(name: &str) -> Result<SeedConfig, CliError> {
        let mut s = SeedConfig::default();
        match name {
            "standard" => {}
            "polynomial" => {
                s.flat = FlatSeeds {
                    h: SeedSpec::Taylor {
                        coeffs: vec![[0.0, 0.0], [0.3, 0.0], [0.0, 0.2]],
                    },
                    f: SeedSpec::Taylor {
                        coeffs: vec![[1.0, 0.0], [1.0 / 3.0, 0.0]],
                    },
                    b: SeedSpec::Taylor {
                        coeffs: vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
                    },
                };
                s.donaldson = DonaldsonSeed {
                    name: "im-power".into(),
                    coeffs: vec![2.0, 2.0, 0.5],
                };
            }
            "periodic" => {
                s.flat = FlatSeeds {
                    h: SeedSpec::Zero,
                    f: SeedSpec::Exp { kappa: [0.0, 0.5] },
                    b: SeedSpec::Exp { kappa: [1.0, 0.0] },
                };
            }
            "fault-b-wbar" => s.fault = Some(Fault::BWbar),
            other => {
                return Err(CliError::ConfigInvalid(format!(
                    "unknown seed preset {other:?}; expected one of {:?}",
                    Self::PRESETS
                )))
            }
        }
        Ok(s)
    }

    pub fn donaldson_seed(&self) -> Result<HarmonicSeed, CliError> {
        HarmonicSeed::from_name(&self.donaldson.name, &self.donaldson.coeffs)
            .map_err(|e| CliError::ConfigInvalid(format!("donaldson seed: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    /// Truncation order `N` of the series constructions.
    pub order: usize,
    /// Truncation order for the nowhere-flat example, whose series converge slowly near the rim.
    pub cylinder_order: usize,
    /// Finest lattice spacing of the grid pipelines.
    pub grid_h: f64,
    /// Stopping tolerance of the iterative grid solvers.
    pub solver_tol: f64,
    pub samples: usize,
    pub sample_seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            order: 24,
            cylinder_order: 48,
            grid_h: 1.0 / 64.0,
            solver_tol: 1e-9,
            samples: 25,
            sample_seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub det: f64,
    pub det_cylinder: f64,
    pub coefficients: f64,
    pub curvature: f64,
    pub obstruction: f64,
    pub geodesic_rel: f64,
    pub mae: f64,
    pub radial_identities: f64,
    pub displayed_u: f64,
    pub system: f64,
    pub donaldson_exact: f64,
    pub donaldson_grid: f64,
    pub extraction: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub appendix: f64,
    pub pairing_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            det: 1e-9,
            det_cylinder: 1e-8,
            coefficients: 1e-12,
            curvature: 1e-8,
            obstruction: 1e-8,
            geodesic_rel: 1e-6,
            mae: 1e-7,
            radial_identities: 1e-9,
            displayed_u: 1e-12,
            system: 1e-10,
            donaldson_exact: 1e-7,
            donaldson_grid: 5e-3,
            extraction: 1e-12,
            ratio_min: 3.0,
            ratio_max: 5.0,
            appendix: 1e-10,
            pairing_rel: 0.02,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 17] {
        [
            ("det", self.det),
            ("det_cylinder", self.det_cylinder),
            ("coefficients", self.coefficients),
            ("curvature", self.curvature),
            ("obstruction", self.obstruction),
            ("geodesic_rel", self.geodesic_rel),
            ("mae", self.mae),
            ("radial_identities", self.radial_identities),
            ("displayed_u", self.displayed_u),
            ("system", self.system),
            ("donaldson_exact", self.donaldson_exact),
            ("donaldson_grid", self.donaldson_grid),
            ("extraction", self.extraction),
            ("ratio_min", self.ratio_min),
            ("ratio_max", self.ratio_max),
            ("appendix", self.appendix),
            ("pairing_rel", self.pairing_rel),
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub csv_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Command,
    pub seeds: SeedConfig,
    pub numeric: NumericConfig,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

/// Every grid pipeline runs on a lattice whose extent is a multiple of this.
pub const GRID_UNIT: f64 = 0.125;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::ConfigInvalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::ConfigInvalid(msg));
        for (name, v) in self.tolerances.entries() {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.tolerances.ratio_min >= self.tolerances.ratio_max {
            return bad("ratio_min must be below ratio_max".into());
        }
        let n = &self.numeric;
        if !(n.solver_tol > 0.0 && n.solver_tol.is_finite()) {
            return bad(format!("solver_tol must be positive, got {}", n.solver_tol));
        }
        if n.order < 4 || n.cylinder_order < 4 {
            return bad(format!("truncation orders must be at least 4, got {} and {}", n.order, n.cylinder_order));
        }
        if n.samples == 0 {
            return bad("samples must be positive".into());
        }
        if GridSpec::new(2, n.grid_h, GRID_UNIT).is_err() {
            return bad(format!("grid_h = {} must be positive and divide {GRID_UNIT}", n.grid_h));
        }
        let r = self.seeds.cylinder_radius;
        if !(r > 0.0 && r.is_finite()) {
            return bad(format!("cylinder_radius must be positive and finite, got {r}"));
        }
        let flat = &self.seeds.flat;
        flat.h.check("h")?;
        flat.f.check("f")?;
        flat.b.check("b")?;
        for name in &self.seeds.radial_entries {
            if catalog_entry(name).is_none() {
                return bad(format!("unknown radial catalog entry {name:?}"));
            }
        }
        self.seeds.donaldson_seed()?;
        Ok(())
    }
}
