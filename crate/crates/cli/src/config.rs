use std::path::Path;

use serde::Deserialize;

use crate::args::{
    Common, DecoderArg, FamilyArg, Format, LatticeArg, ModeArg, ScalarDecoderArg, StrategyArg, SuiteArg,
};
use crate::CliError;

/// Keys accepted in a `--config` JSON file. Names match the long flags with
/// dashes replaced by underscores.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub m: Option<usize>,
    pub k: Option<f64>,
    pub sigma0: Option<f64>,
    pub xi: Option<f64>,
    pub lattice: Option<LatticeArg>,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub out: Option<std::path::PathBuf>,
    pub format: Option<Format>,
    pub l_search: Option<bool>,
    pub mode: Option<ModeArg>,
    pub k_range: Option<String>,
    pub sigma0_range: Option<String>,
    pub strategy: Option<StrategyArg>,
    pub decoder: Option<serde_json::Value>,
    #[serde(rename = "P", alias = "power")]
    pub power: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub scale: Option<f64>,
    pub family: Option<FamilyArg>,
    pub suite: Option<SuiteArg>,
    pub mc_samples: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// The `decoder` key is shared by `simulate` and `scalar-exact`, which
    /// accept different value sets.
    fn decoder_as<T: for<'de> Deserialize<'de>>(&self) -> Result<Option<T>, CliError> {
        self.decoder
            .clone()
            .map(|v| serde_json::from_value(v).map_err(|e| CliError::Usage(format!("bad decoder in config: {e}"))))
            .transpose()
    }

    pub fn sim_decoder(&self) -> Result<Option<DecoderArg>, CliError> {
        self.decoder_as()
    }

    pub fn scalar_decoder(&self) -> Result<Option<ScalarDecoderArg>, CliError> {
        self.decoder_as()
    }
}

/// Shared flags after applying the config file.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub m: Option<usize>,
    pub k: Option<f64>,
    pub sigma0: Option<f64>,
    pub xi: Option<f64>,
    pub lattice: Option<LatticeArg>,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub out: Option<std::path::PathBuf>,
    pub format: Option<Format>,
}

pub fn resolve(flags: &Common, cfg: &ConfigFile) -> Resolved {
    Resolved {
        m: flags.m.or(cfg.m),
        k: flags.k.or(cfg.k),
        sigma0: flags.sigma0.or(cfg.sigma0),
        xi: flags.xi.or(cfg.xi),
        lattice: flags.lattice.or(cfg.lattice),
        seed: flags.seed.or(cfg.seed),
        n: flags.n.or(cfg.n),
        out: flags.out.clone().or_else(|| cfg.out.clone()),
        format: flags.format.or(cfg.format),
    }
}

impl Resolved {
    pub fn require_k(&self) -> Result<f64, CliError> {
        self.k.ok_or_else(|| CliError::Usage("--k is required".into()))
    }

    pub fn require_sigma0(&self) -> Result<f64, CliError> {
        self.sigma0
            .ok_or_else(|| CliError::Usage("--sigma0 is required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cfg: ConfigFile = serde_json::from_str(r#"{"m": 2, "k": 0.5, "lattice": "hex", "P": 4}"#).unwrap();
        let flags = Common {
            k: Some(0.2),
            ..Common::default()
        };
        let r = resolve(&flags, &cfg);
        assert_eq!(r.m, Some(2));
        assert_eq!(r.k, Some(0.2));
        assert_eq!(r.lattice, Some(LatticeArg::Hex));
        assert_eq!(cfg.power, Some(4.0));
        assert_eq!(r.seed, None);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<ConfigFile>(r#"{"sigma": 1}"#).is_err());
    }

    #[test]
    fn decoder_key_is_context_dependent() {
        let cfg: ConfigFile = serde_json::from_str(r#"{"decoder": "mle"}"#).unwrap();
        assert_eq!(cfg.scalar_decoder().unwrap(), Some(ScalarDecoderArg::Mle));
        assert!(cfg.sim_decoder().is_err());
    }
}
