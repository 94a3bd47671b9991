//! Plain-text model artifact: one `key = value` pair per line, reals at full
//! round-trip precision.
//!
//! ```text
//! t = 5
//! normalization = unit_pooled_variance
//! weight.1 = 3.108962404735103
//! industry.4.location = -1.25
//! industry.4.skew = positive
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use zm_core::discriminant::{DiscriminantModel, FitDiagnostics, Normalization};
use zm_core::lmom::LMomentSet;
use zm_core::pearson3::{P3Params, Skew};
use zm_core::pipeline::{IndustryFit, IndustryFits};

use crate::csvio::write_atomic;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub model: DiscriminantModel,
    pub fits: IndustryFits,
}

fn skew_str(s: Skew) -> &'static str {
    match s {
        Skew::Positive => "positive",
        Skew::Negative => "negative",
    }
}

impl ModelArtifact {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# zmrate model artifact\n");
        let m = &self.model;
        let _ = writeln!(s, "t = {}", m.weights.len());
        let _ = writeln!(s, "normalization = {}", m.normalization.as_str());
        for (i, w) in m.weights.iter().enumerate() {
            let _ = writeln!(s, "weight.{} = {w}", i + 1);
        }
        if let Some(d) = &m.diagnostics {
            let _ = writeln!(s, "n_bankrupt = {}", d.n_bankrupt);
            let _ = writeln!(s, "n_non_bankrupt = {}", d.n_non_bankrupt);
            for (i, x) in d.mean_bankrupt.iter().enumerate() {
                let _ = writeln!(s, "mean_bankrupt.{} = {x}", i + 1);
            }
            for (i, x) in d.mean_non_bankrupt.iter().enumerate() {
                let _ = writeln!(s, "mean_non_bankrupt.{} = {x}", i + 1);
            }
            for (i, row) in d.pooled_scatter.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    let _ = writeln!(s, "scatter.{}.{} = {x}", i + 1, j + 1);
                }
            }
        }
        for (id, fit) in &self.fits {
            let p = &fit.params;
            let lm = &fit.l_moments;
            let _ = writeln!(s, "industry.{id}.location = {}", p.location);
            let _ = writeln!(s, "industry.{id}.scale = {}", p.scale);
            let _ = writeln!(s, "industry.{id}.shape = {}", p.shape);
            let _ = writeln!(s, "industry.{id}.skew = {}", skew_str(p.skew));
            let _ = writeln!(s, "industry.{id}.n = {}", lm.n);
            for r in 0..3 {
                let _ = writeln!(s, "industry.{id}.beta.{r} = {}", lm.beta[r]);
            }
            for r in 0..3 {
                let _ = writeln!(s, "industry.{id}.theta.{} = {}", r + 1, lm.theta[r]);
            }
            if let Some(t2) = lm.tau2 {
                let _ = writeln!(s, "industry.{id}.tau2 = {t2}");
            }
            let _ = writeln!(s, "industry.{id}.tau3 = {}", lm.tau3);
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        Entries::read(text, origin)?.build()
    }
}

struct Entries {
    origin: PathBuf,
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn read(text: &str, origin: &Path) -> Result<Self> {
        let err = |line, message: String| CliError::Artifact { path: origin.to_path_buf(), line, message };
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(i + 1, format!("expected key = value, found {line:?}")))?;
            let key = k.trim().to_string();
            if map.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(err(i + 1, format!("duplicate key {key}")));
            }
        }
        Ok(Entries { origin: origin.to_path_buf(), map })
    }

    fn err(&self, line: usize, message: String) -> CliError {
        CliError::Artifact { path: self.origin.clone(), line, message }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let (line, v) = self.map.get(key).ok_or_else(|| self.err(0, format!("missing key {key}")))?;
        v.parse().map_err(|_| self.err(*line, format!("bad value {v:?} for {key}")))
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        if self.map.contains_key(key) {
            self.get(key).map(Some)
        } else {
            Ok(None)
        }
    }

    fn real(&self, key: &str) -> Result<f64> {
        let x: f64 = self.get(key)?;
        if !x.is_finite() {
            return Err(self.err(self.map[key].0, format!("{key} is not finite")));
        }
        Ok(x)
    }

    fn build(&self) -> Result<ModelArtifact> {
        let t: usize = self.get("t")?;
        let norm_raw: String = self.get("normalization")?;
        let normalization = Normalization::parse(&norm_raw)
            .ok_or_else(|| self.err(self.map["normalization"].0, format!("unknown normalization {norm_raw:?}")))?;
        let weights = (1..=t).map(|i| self.real(&format!("weight.{i}"))).collect::<Result<Vec<_>>>()?;
        let diagnostics = match self.opt::<usize>("n_bankrupt")? {
            None => None,
            Some(n_bankrupt) => {
                let vec = |prefix: &str| (1..=t).map(|i| self.real(&format!("{prefix}.{i}"))).collect::<Result<Vec<_>>>();
                let pooled_scatter = (1..=t)
                    .map(|i| (1..=t).map(|j| self.real(&format!("scatter.{i}.{j}"))).collect())
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                Some(FitDiagnostics {
                    mean_bankrupt: vec("mean_bankrupt")?,
                    mean_non_bankrupt: vec("mean_non_bankrupt")?,
                    pooled_scatter,
                    n_bankrupt,
                    n_non_bankrupt: self.get("n_non_bankrupt")?,
                })
            }
        };

        let mut ids = std::collections::BTreeSet::new();
        for (key, (line, _)) in &self.map {
            if let Some(rest) = key.strip_prefix("industry.") {
                let id = rest.split('.').next().unwrap_or("");
                let id: u32 = id.parse().map_err(|_| self.err(*line, format!("bad industry id in {key}")))?;
                ids.insert(id);
            }
        }
        let mut fits = IndustryFits::new();
        for id in ids {
            let k = |f: &str| format!("industry.{id}.{f}");
            let skew_raw: String = self.get(&k("skew"))?;
            let skew = match skew_raw.as_str() {
                "positive" => Skew::Positive,
                "negative" => Skew::Negative,
                other => return Err(self.err(self.map[&k("skew")].0, format!("unknown skew {other:?}"))),
            };
            let params = P3Params {
                location: self.real(&k("location"))?,
                scale: self.real(&k("scale"))?,
                shape: self.real(&k("shape"))?,
                skew,
            };
            if !(params.scale > 0.0 && params.shape > 0.0) {
                return Err(self.err(self.map[&k("scale")].0, format!("industry {id}: scale and shape must be positive")));
            }
            let l_moments = LMomentSet {
                beta: [self.real(&k("beta.0"))?, self.real(&k("beta.1"))?, self.real(&k("beta.2"))?],
                theta: [self.real(&k("theta.1"))?, self.real(&k("theta.2"))?, self.real(&k("theta.3"))?],
                tau2: self.opt(&k("tau2"))?,
                tau3: self.real(&k("tau3"))?,
                n: self.get(&k("n"))?,
            };
            fits.insert(id, IndustryFit { industry: id, params, l_moments });
        }
        Ok(ModelArtifact {
            model: DiscriminantModel { weights, normalization, diagnostics },
            fits,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use zm_core::pearson3::ThresholdTable;
    use zm_core::pipeline::run_pipeline;
    use zm_core::synth::{generate, SyntheticConfig};

    #[test]
    fn fitted_artifact_round_trips_exactly() {
        let data = generate(&SyntheticConfig { records: 300, industries: 4, ..Default::default() });
        let out = run_pipeline(&data, None, &ThresholdTable::default()).unwrap();
        let art = ModelArtifact { model: out.model, fits: out.fits };
        let back = ModelArtifact::parse(&art.to_text(), Path::new("m")).unwrap();
        assert_eq!(back, art);
    }

    #[test]
    fn weights_only_artifact() {
        let text = "t = 2\nnormalization = fixed\nweight.1 = 1.5\nweight.2 = -0.25\n";
        let art = ModelArtifact::parse(text, Path::new("m")).unwrap();
        assert_eq!(art.model, DiscriminantModel::from_weights(vec![1.5, -0.25]));
        assert!(art.fits.is_empty());
    }

    #[test]
    fn malformed_lines_are_located() {
        let err = ModelArtifact::parse("t = 1\nnormalization = fixed\nweight.1 = abc\n", Path::new("m")).unwrap_err();
        assert!(matches!(err, CliError::Artifact { line: 3, .. }), "{err}");
        let err = ModelArtifact::parse("t = 1\nnonsense\n", Path::new("m")).unwrap_err();
        assert!(matches!(err, CliError::Artifact { line: 2, .. }));
        let err = ModelArtifact::parse("t = 2\nnormalization = fixed\nweight.1 = 1\n", Path::new("m")).unwrap_err();
        assert!(err.to_string().contains("weight.2"));
    }
}
