//! Study configuration files (TOML).
//!
//! Unknown keys are rejected before deserialization so that a typo such as
//! `meshh` fails with the nearest valid key instead of being ignored.

use std::fmt;
use std::path::Path;

use cylspec_core::coefficient::{verify_ellipticity, CoefficientField, DEFAULT_GRID};
use cylspec_core::eigen::SolverOptions;
use cylspec_core::geometry::{BaseSpec, ConvexPolygon, CrossSectionSpec, CylinderSpec, Direction};
use cylspec_core::mesh::CellFamily;
use cylspec_core::spectral::Discretization;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    CrossSection,
    Reduced,
    Sweep,
    Full,
    Convergence,
    Decay,
    UpperBound,
    DirichletBracket,
}

impl StudyKind {
    pub const ALL: [StudyKind; 8] = [
        StudyKind::CrossSection,
        StudyKind::Reduced,
        StudyKind::Sweep,
        StudyKind::Full,
        StudyKind::Convergence,
        StudyKind::Decay,
        StudyKind::UpperBound,
        StudyKind::DirichletBracket,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StudyKind::CrossSection => "cross-section",
            StudyKind::Reduced => "reduced",
            StudyKind::Sweep => "sweep",
            StudyKind::Full => "full",
            StudyKind::Convergence => "convergence",
            StudyKind::Decay => "decay",
            StudyKind::UpperBound => "upper-bound",
            StudyKind::DirichletBracket => "dirichlet-bracket",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseConfig {
    Interval {
        a: f64,
        b: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    /// Regular polygon centred at the origin, first outward normal at
    /// `rotation` radians.
    Regular {
        sides: usize,
        circumradius: f64,
        #[serde(default)]
        rotation: f64,
    },
    /// Disk approximated by a regular polygon.
    Disk {
        radius: f64,
        #[serde(default = "default_disk_sides")]
        sides: usize,
    },
}

fn default_disk_sides() -> usize {
    24
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossConfig {
    pub intervals: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub base: BaseConfig,
    pub cross: CrossConfig,
}

/// A matrix entry: a number or an expression in `xi1..xiP`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Expr(String),
}

impl Entry {
    fn source(&self) -> String {
        match self {
            Entry::Number(v) => format!("{v:?}"),
            Entry::Expr(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientConfig {
    pub entries: Vec<Vec<Entry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyConfig {
    Simplex,
    Tensor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshConfig {
    #[serde(default = "default_target_h")]
    pub target_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_divisions: Option<usize>,
    #[serde(default = "default_family")]
    pub family: FamilyConfig,
}

fn default_target_h() -> f64 {
    0.25
}

fn default_family() -> FamilyConfig {
    FamilyConfig::Simplex
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            target_h: default_target_h(),
            xi_divisions: None,
            family: default_family(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default = "default_dof_cap")]
    pub dof_cap: usize,
    #[serde(default)]
    pub shift: f64,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_seed() -> u64 {
    42
}

fn default_dof_cap() -> usize {
    100_000
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            seed: default_seed(),
            max_iter: None,
            dof_cap: default_dof_cap(),
            shift: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcConfig {
    Mixed,
    Dirichlet,
}

/// Study parameters. Which keys matter depends on the study kind.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StudySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<StudyKind>,
    /// Scales `ℓ` (full, convergence, dirichlet-bracket).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    /// Single scale `ℓ` (decay, upper-bound).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BcConfig>,
    /// Truncation lengths `L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
    /// Directions for the reduced study (normalized on load).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    /// Slab sizes `K` (reduced study, `m = 2`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slab_sizes: Option<Vec<f64>>,
    /// Grid size of the direction sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<bool>,
    /// Cross-section subdivisions (cross-section study).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisions: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Skip the gap-condition check of the decay study.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face: Option<usize>,
    /// Test-function support sizes `K` (upper-bound study).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default)]
    pub quiet: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub geometry: GeometryConfig,
    pub coefficient: CoefficientConfig,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

const TOP_KEYS: &[&str] = &["geometry", "coefficient", "mesh", "solver", "study", "output"];
const GEOMETRY_KEYS: &[&str] = &["base", "cross"];
const BASE_KEYS: &[&str] = &["kind", "a", "b", "vertices", "sides", "circumradius", "rotation", "radius"];
const CROSS_KEYS: &[&str] = &["intervals"];
const COEFFICIENT_KEYS: &[&str] = &["entries"];
const MESH_KEYS: &[&str] = &["target_h", "xi_divisions", "family"];
const SOLVER_KEYS: &[&str] = &["tol", "seed", "max_iter", "dof_cap", "shift"];
const STUDY_KEYS: &[&str] = &[
    "kind",
    "scales",
    "scale",
    "k",
    "bc",
    "lengths",
    "directions",
    "slab_sizes",
    "samples",
    "refine",
    "divisions",
    "radii",
    "control",
    "face",
    "sizes",
];
const OUTPUT_KEYS: &[&str] = &["dir", "quiet"];

/// The valid key closest to `key` by edit distance.
pub fn nearest_key<'a>(key: &str, valid: &[&'a str]) -> Option<&'a str> {
    valid
        .iter()
        .map(|v| (strsim::levenshtein(key, v), *v))
        .min()
        .map(|(_, v)| v)
}

fn check_table(table: &toml::Table, valid: &[&str], path: &str) -> Result<(), ConfigError> {
    for key in table.keys() {
        if !valid.contains(&key.as_str()) {
            let place = if path.is_empty() { "at the top level".to_string() } else { format!("in [{path}]") };
            let hint = nearest_key(key, valid).map(|n| format!("; did you mean `{n}`?")).unwrap_or_default();
            return err(format!("unknown key `{key}` {place}{hint}"));
        }
    }
    Ok(())
}

fn sub_table<'a>(table: &'a toml::Table, key: &str) -> Option<&'a toml::Table> {
    table.get(key).and_then(|v| v.as_table())
}

fn check_keys(root: &toml::Table) -> Result<(), ConfigError> {
    check_table(root, TOP_KEYS, "")?;
    let sections: [(&str, &[&str]); 5] = [
        ("coefficient", COEFFICIENT_KEYS),
        ("mesh", MESH_KEYS),
        ("solver", SOLVER_KEYS),
        ("study", STUDY_KEYS),
        ("output", OUTPUT_KEYS),
    ];
    for (name, keys) in sections {
        if let Some(t) = sub_table(root, name) {
            check_table(t, keys, name)?;
        }
    }
    if let Some(g) = sub_table(root, "geometry") {
        check_table(g, GEOMETRY_KEYS, "geometry")?;
        if let Some(b) = sub_table(g, "base") {
            check_table(b, BASE_KEYS, "geometry.base")?;
        }
        if let Some(c) = sub_table(g, "cross") {
            check_table(c, CROSS_KEYS, "geometry.cross")?;
        }
    }
    Ok(())
}

impl StudyConfig {
    pub fn from_toml_str(src: &str) -> Result<Self, ConfigError> {
        let root: toml::Table = src.parse().map_err(|e: toml::de::Error| ConfigError(format!("{e}")))?;
        check_keys(&root)?;
        let cfg: StudyConfig = root.try_into().map_err(|e: toml::de::Error| ConfigError(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Ok((Self::from_toml_str(&src)?, src))
    }

    pub fn base(&self) -> Result<BaseSpec, ConfigError> {
        let b = match &self.geometry.base {
            BaseConfig::Interval { a, b } => BaseSpec::interval(*a, *b),
            BaseConfig::Polygon { vertices } => BaseSpec::polygon(vertices.clone()),
            BaseConfig::Regular {
                sides,
                circumradius,
                rotation,
            } => ConvexPolygon::regular(*sides, *circumradius, *rotation).map(BaseSpec::Polygon),
            BaseConfig::Disk { radius, sides } => {
                ConvexPolygon::regular(*sides, *radius, 0.0).map(BaseSpec::Polygon)
            }
        };
        b.map_err(|e| ConfigError(format!("geometry.base: {e}")))
    }

    pub fn cross(&self) -> Result<CrossSectionSpec, ConfigError> {
        CrossSectionSpec::new(self.geometry.cross.intervals.iter().map(|iv| (iv[0], iv[1])).collect())
            .map_err(|e| ConfigError(format!("geometry.cross: {e}")))
    }

    pub fn cylinder(&self, scale: f64) -> Result<CylinderSpec, ConfigError> {
        CylinderSpec::new(self.base()?, self.cross()?, scale).map_err(|e| ConfigError(format!("geometry: {e}")))
    }

    pub fn m(&self) -> Result<usize, ConfigError> {
        Ok(self.base()?.dim())
    }

    pub fn p(&self) -> usize {
        self.geometry.cross.intervals.len()
    }

    pub fn coefficient(&self) -> Result<CoefficientField, ConfigError> {
        let rows: Vec<Vec<String>> = self
            .coefficient
            .entries
            .iter()
            .map(|r| r.iter().map(Entry::source).collect())
            .collect();
        CoefficientField::parse(self.m()?, self.p(), &rows).map_err(|e| ConfigError(format!("coefficient: {e}")))
    }

    pub fn discretization(&self) -> Discretization {
        let family = match self.mesh.family {
            FamilyConfig::Simplex => CellFamily::Simplex,
            FamilyConfig::Tensor => CellFamily::Tensor,
        };
        let d = Discretization::new(self.mesh.target_h).with_family(family);
        match self.mesh.xi_divisions {
            Some(n) => d.with_xi_divisions(n),
            None => d,
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver.tol,
            shift: self.solver.shift,
            seed: self.solver.seed,
            max_iter: self.solver.max_iter,
            ..SolverOptions::default()
        }
    }

    pub fn scales(&self) -> Vec<f64> {
        self.study.scales.clone().unwrap_or_else(|| vec![2.0, 4.0, 8.0])
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.study.lengths.clone().unwrap_or_else(|| vec![4.0, 8.0, 16.0, 32.0])
    }

    pub fn k(&self) -> usize {
        self.study.k.unwrap_or(1)
    }

    pub fn samples(&self) -> usize {
        self.study.samples.unwrap_or(64)
    }

    pub fn divisions(&self) -> Vec<usize> {
        self.study.divisions.clone().unwrap_or_else(|| vec![16, 32, 64])
    }

    pub fn directions(&self) -> Result<Vec<Direction>, ConfigError> {
        let m = self.m()?;
        let raw = self.study.directions.clone().unwrap_or_else(|| {
            let mut e1 = vec![0.0; m];
            e1[0] = 1.0;
            vec![e1]
        });
        raw.into_iter()
            .map(|d| {
                if d.len() != m {
                    return err(format!("study.directions: expected {m} components, got {}", d.len()));
                }
                Direction::normalized(d).map_err(|e| ConfigError(format!("study.directions: {e}")))
            })
            .collect()
    }

    pub fn single_scale(&self) -> f64 {
        self.study.scale.unwrap_or(8.0)
    }

    pub fn radii(&self) -> Vec<f64> {
        self.study.radii.clone().unwrap_or_else(|| {
            let l = self.single_scale();
            (1..).map(f64::from).take_while(|r| *r <= l - 1.0).collect()
        })
    }

    pub fn sizes(&self) -> Vec<f64> {
        self.study.sizes.clone().unwrap_or_else(|| vec![2.0, 4.0])
    }

    /// Checks every parameter that any study kind may read.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.cylinder(1.0)?;
        let a = self.coefficient()?;
        verify_ellipticity(&a, &self.cross()?, DEFAULT_GRID).map_err(|e| ConfigError(format!("coefficient: {e}")))?;
        if !(self.mesh.target_h > 0.0 && self.mesh.target_h.is_finite()) {
            return err(format!("mesh.target_h must be positive, got {}", self.mesh.target_h));
        }
        if self.mesh.xi_divisions == Some(0) {
            return err("mesh.xi_divisions must be at least 1");
        }
        if !(self.solver.tol > 0.0) {
            return err("solver.tol must be positive");
        }
        if self.solver.dof_cap == 0 {
            return err("solver.dof_cap must be positive");
        }
        positive_ascending("study.scales", &self.scales())?;
        positive_ascending("study.lengths", &self.lengths())?;
        positive_ascending("study.sizes", &self.sizes())?;
        if let Some(s) = &self.study.slab_sizes {
            positive_ascending("study.slab_sizes", s)?;
        }
        if self.k() == 0 {
            return err("study.k must be at least 1");
        }
        if self.m()? == 2 && self.samples() < 3 {
            return err("study.samples must be at least 3");
        }
        let divisions = self.divisions();
        if divisions.is_empty() || divisions.iter().any(|&n| n < 4) {
            return err("study.divisions must be nonempty with every entry >= 4");
        }
        let l = self.single_scale();
        if !(l > 0.0) {
            return err("study.scale must be positive");
        }
        let radii = self.radii();
        positive_ascending("study.radii", &radii)?;
        if radii.iter().any(|&r| r > l - 1.0 + 1e-12) {
            return err(format!("study.radii must lie in (0, scale - 1] = (0, {}]", l - 1.0));
        }
        let faces = self.base()?.num_faces();
        if self.study.face.unwrap_or(0) >= faces {
            return err(format!("study.face must be below {faces}"));
        }
        self.directions()?;
        Ok(())
    }
}

fn positive_ascending(name: &str, v: &[f64]) -> Result<(), ConfigError> {
    if v.is_empty() || v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) || v.windows(2).any(|w| !(w[0] < w[1])) {
        return err(format!("{name} must be a nonempty, positive, strictly ascending list"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[geometry]
base = { kind = "interval", a = -1.0, b = 1.0 }
cross = { intervals = [[0.0, 1.0]] }

[coefficient]
entries = [[2.0, 0.5], ["0.5", "1"]]
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = StudyConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.mesh.target_h, 0.25);
        assert_eq!(c.solver.seed, 42);
        assert_eq!(c.m().unwrap(), 1);
        assert_eq!(c.coefficient().unwrap().evaluate(&[0.5]).unwrap().get(0, 1), 0.5);
        assert_eq!(c.radii(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    fn unknown_key_names_nearest() {
        let src = format!("{MINIMAL}\n[meshh]\ntarget_h = 0.5\n");
        let e = StudyConfig::from_toml_str(&src).unwrap_err();
        assert!(e.0.contains("`meshh`") && e.0.contains("`mesh`"), "{e}");
        let src = format!("{MINIMAL}\n[solver]\nsed = 3\n");
        let e = StudyConfig::from_toml_str(&src).unwrap_err();
        assert!(e.0.contains("`sed`") && e.0.contains("`seed`"), "{e}");
    }

    #[test]
    fn rejects_non_elliptic_and_bad_lists() {
        let bad = MINIMAL.replace("[2.0, 0.5]", "[0.1, 0.5]");
        assert!(StudyConfig::from_toml_str(&bad).unwrap_err().0.contains("elliptic"));
        let src = format!("{MINIMAL}\n[study]\nscales = [4.0, 2.0]\n");
        assert!(StudyConfig::from_toml_str(&src).is_err());
    }

    #[test]
    fn json_echo_round_trips() {
        let src = format!("{MINIMAL}\n[study]\nkind = \"convergence\"\nscales = [2.0, 4.0]\n");
        let c = StudyConfig::from_toml_str(&src).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: StudyConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
