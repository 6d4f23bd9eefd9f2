//! Run configuration: JSON parsing, validation with field-path messages, and
//! resolution into a chain plus task parameters.
//!
//! Complex numbers are two-element arrays `[re, im]` throughout. Spins are
//! accepted as numbers (`1`, `0.5`) or `"1/2"`-style strings and stored as the
//! integer `2l`; serialization writes integers back as numbers and half-odd
//! values as `"n/2"` strings, so a parse/serialize round trip is lossless.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chain::{ChainSpec, Site};
use crate::error::{Error, Result};
use crate::roots_of_unity::RootCtx;
use crate::scalar::C64;

/// Complex number serialized as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx(pub [f64; 2]);

impl Cx {
    pub fn to_c64(self) -> C64 {
        C64::new(self.0[0], self.0[1])
    }
}

impl From<C64> for Cx {
    fn from(c: C64) -> Self {
        Cx([c.re, c.im])
    }
}

/// Spin stored as the integer `2l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spin(pub i64);

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 % 2 == 0 {
            s.serialize_i64(self.0 / 2)
        } else {
            s.serialize_str(&format!("{}/2", self.0))
        }
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let two_ell = match Raw::deserialize(d)? {
            Raw::Num(x) => {
                let doubled = 2.0 * x;
                if (doubled - doubled.round()).abs() > 1e-9 {
                    return Err(D::Error::custom(format!(
                        "spin must be a half-integer (got {x})"
                    )));
                }
                doubled.round() as i64
            }
            Raw::Text(s) => {
                if let Some(num) = s.strip_suffix("/2") {
                    num.trim().parse::<i64>().map_err(|_| {
                        D::Error::custom(format!(
                            "spin string must be \"n/2\" or \"n\" (got {s:?})"
                        ))
                    })?
                } else {
                    2 * s.trim().parse::<i64>().map_err(|_| {
                        D::Error::custom(format!(
                            "spin string must be \"n/2\" or \"n\" (got {s:?})"
                        ))
                    })?
                }
            }
        };
        if two_ell < 1 {
            return Err(D::Error::custom("spin must be positive"));
        }
        Ok(Spin(two_ell))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub spin: Spin,
    pub z: Cx,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootOfUnityConfig {
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "K")]
    pub k: i64,
}

fn default_format_version() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    /// Anisotropy; may be omitted when `root_of_unity` fixes it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Cx>,
    pub sites: Vec<SiteConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_of_unity: Option<RootOfUnityConfig>,

    /// Excitation number for solve/verify/census.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Integer of the degenerate construction; pairs with the twist.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    /// Number of creation operators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Explicit rapidities, bypassing the solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_list: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_samples: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_start: Option<Cx>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub newton_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub newton_iters: Option<usize>,
    /// Random (u, v) pairs for identity sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Twist samples for the census.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_samples: Option<usize>,
    /// Residual tolerance override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Dimension cap override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

impl RunConfig {
    /// Parse a JSON document; error messages carry the field path.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })?;
        if cfg.format_version != 1 {
            return Err(Error::Config {
                path: "format_version".into(),
                msg: format!("unsupported format_version {}", cfg.format_version),
            });
        }
        if cfg.sites.is_empty() {
            return Err(Error::Config {
                path: "sites".into(),
                msg: "at least one site required".into(),
            });
        }
        for (i, s) in cfg.sites.iter().enumerate() {
            if s.z.to_c64() == C64::new(0.0, 0.0) {
                return Err(Error::Config {
                    path: format!("sites[{i}].z"),
                    msg: "inhomogeneity must be nonzero".into(),
                });
            }
        }
        if let Some(r) = &cfg.root_of_unity {
            RootCtx::new(r.m, r.k).map_err(|e| Error::Config {
                path: "root_of_unity".into(),
                msg: e.to_string(),
            })?;
        }
        if cfg.u_samples.as_ref().is_some_and(|us| us.is_empty()) {
            return Err(Error::Config {
                path: "u_samples".into(),
                msg: "must be non-empty when given".into(),
            });
        }
        if cfg.gamma.is_none() && cfg.root_of_unity.is_none() {
            return Err(Error::Config {
                path: "gamma".into(),
                msg: "either gamma or root_of_unity must be given".into(),
            });
        }
        Ok(cfg)
    }

    /// Resolve into the chain, the optional root-of-unity context, and notices
    /// about silent normalizations.
    pub fn resolve(&self) -> Result<(ChainSpec, Option<RootCtx>, Vec<String>)> {
        let mut notices = Vec::new();
        let root = match &self.root_of_unity {
            Some(r) => Some(RootCtx::new(r.m, r.k)?),
            None => None,
        };
        let gamma = match (&root, self.gamma) {
            (Some(ctx), Some(g)) => {
                let g0 = C64::new(ctx.gamma0, 0.0);
                if (g.to_c64() - g0).norm() > 1e-12 * (1.0 + ctx.gamma0.abs()) {
                    notices.push(format!(
                        "gamma {} conflicts with root_of_unity; forced to pi*{}/{} = {}",
                        g.to_c64(),
                        ctx.k,
                        ctx.m,
                        ctx.gamma0
                    ));
                }
                g0
            }
            (Some(ctx), None) => C64::new(ctx.gamma0, 0.0),
            (None, Some(g)) => g.to_c64(),
            (None, None) => unreachable!("validated in parse"),
        };
        let kappa = match (self.kappa, self.p, &root) {
            (Some(k), _, _) => k.to_c64(),
            // no explicit twist: a given p at a root of unity implies one
            (None, Some(p), Some(ctx)) => {
                let sites: Vec<Site> = self
                    .sites
                    .iter()
                    .map(|s| Site {
                        two_ell: s.spin.0,
                        z: s.z.to_c64(),
                    })
                    .collect();
                let tmp = ChainSpec::new(sites, gamma, C64::new(1.0, 0.0))?;
                let k = ctx.kappa_for_p(&tmp, p);
                notices.push(format!(
                    "kappa defaulted to q0^(2(p - l_tot)) = {k} for p = {p}"
                ));
                k
            }
            _ => C64::new(1.0, 0.0),
        };
        let sites: Vec<Site> = self
            .sites
            .iter()
            .map(|s| Site {
                two_ell: s.spin.0,
                z: s.z.to_c64(),
            })
            .collect();
        let spec = ChainSpec::new(sites, gamma, kappa)?;
        if spec.coprime_warning {
            notices.push("vacuum eigenvalue polynomials share a root (coprimality warning)".into());
        }
        Ok((spec, root, notices))
    }
}
