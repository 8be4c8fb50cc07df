//! JSON form of a mixture. Numbers are decimal strings in shortest
//! round-trip notation, so parsing recovers every `f64` bit for bit.

use serde::{Deserialize, Serialize};

use super::{weight_sum, Mixture, MixtureComponent, PARSE_SIMPLEX_TOL, SIMPLEX_TOL};
use crate::density::{DensityJson, DensitySpec};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct MixtureDoc {
    dim: usize,
    kernel: DensityJson,
    components: Vec<ComponentDoc>,
}

#[derive(Serialize, Deserialize)]
struct ComponentDoc {
    w: String,
    mu: Vec<String>,
    sigma: String,
}

/// Serializes to pretty-printed UTF-8 JSON with a trailing newline.
pub fn serialize_mixture(mix: &Mixture) -> Vec<u8> {
    let doc = MixtureDoc {
        dim: mix.dim(),
        kernel: mix.kernel().to_json(),
        components: mix
            .components()
            .iter()
            .map(|c| ComponentDoc {
                w: c.weight.to_string(),
                mu: c.location.iter().map(f64::to_string).collect(),
                sigma: c.scale.to_string(),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("mixture document serializes");
    out.push(b'\n');
    out
}

/// Parses a mixture document. Weights within `1e-9` of the simplex are
/// renormalized; larger violations are rejected.
pub fn parse_mixture(bytes: &[u8]) -> Result<Mixture> {
    let doc: MixtureDoc =
        serde_json::from_slice(bytes).map_err(|e| Error::ParseError(format!("mixture document: {e}")))?;
    let kernel = DensitySpec::from_json(&doc.kernel)?;
    if kernel.dim() != doc.dim {
        return Err(Error::ParseError(format!(
            "document declares dim {} but kernel `{}` has dim {}",
            doc.dim,
            kernel.name(),
            kernel.dim()
        )));
    }
    let components = doc
        .components
        .iter()
        .map(|c| {
            Ok(MixtureComponent {
                weight: number(&c.w)?,
                location: c.mu.iter().map(|s| number(s)).collect::<Result<_>>()?,
                scale: number(&c.sigma)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = weight_sum(&components);
    if (total - 1.0).abs() <= SIMPLEX_TOL {
        Mixture::new(kernel, components)
    } else if (total - 1.0).abs() <= PARSE_SIMPLEX_TOL {
        Mixture::normalized(kernel, components)
    } else {
        Err(Error::InvalidMixture(format!("weights sum to {total}, not 1")))
    }
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::ParseError(format!("`{s}` is not a decimal number")))
}

impl Mixture {
    pub fn to_json(&self) -> Vec<u8> {
        serialize_mixture(self)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        parse_mixture(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Mixture {
        let g = DensitySpec::parse("gaussian:0,1").unwrap();
        let w = [0.1, 0.2, 0.7];
        Mixture::new(
            g,
            vec![
                MixtureComponent::new(w[0], vec![-1.0 / 3.0], 0.1),
                MixtureComponent::new(w[1], vec![0.0], std::f64::consts::PI),
                MixtureComponent::new(1.0 - w[0] - w[1], vec![2.5e-17], 1e300),
            ],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = sample();
        let back = parse_mixture(&serialize_mixture(&m)).unwrap();
        assert_eq!(back, m);
        for (a, b) in m.components().iter().zip(back.components()) {
            assert_eq!(a.weight.to_bits(), b.weight.to_bits());
            assert_eq!(a.scale.to_bits(), b.scale.to_bits());
        }
    }

    #[test]
    fn kernel_parameters_round_trip_bitwise() {
        let mut rng = 0x9e3779b97f4a7c15_u64;
        for _ in 0..2000 {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let mu = (rng >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
            let sigma = 0.3 + mu.abs() * std::f64::consts::E;
            let kernel = DensitySpec::builtin("gaussian", &[mu, sigma]).unwrap();
            let m = Mixture::single(kernel, vec![mu / 3.0], sigma / 7.0).unwrap();
            assert_eq!(parse_mixture(&serialize_mixture(&m)).unwrap(), m);
        }
    }

    #[test]
    fn field_order_is_fixed() {
        let text = String::from_utf8(serialize_mixture(&sample())).unwrap();
        let d = text.find("\"dim\"").unwrap();
        let k = text.find("\"kernel\"").unwrap();
        let c = text.find("\"components\"").unwrap();
        assert!(d < k && k < c);
        let w = text.find("\"w\"").unwrap();
        let mu = text.find("\"mu\"").unwrap();
        let s = text.find("\"sigma\"").unwrap();
        assert!(w < mu && mu < s);
    }

    #[test]
    fn rejects_bad_documents() {
        let doc = |w: [&str; 2], sigma: &str| {
            format!(
                r#"{{"dim":1,"kernel":{{"family":"gaussian","params":[0,1]}},"components":[{{"w":"{}","mu":["0"],"sigma":"1"}},{{"w":"{}","mu":["1"],"sigma":"{}"}}]}}"#,
                w[0], w[1], sigma
            )
        };
        assert!(matches!(parse_mixture(doc(["0.6", "0.6"], "1").as_bytes()), Err(Error::InvalidMixture(_))));
        assert!(matches!(parse_mixture(doc(["0.5", "0.5"], "-1").as_bytes()), Err(Error::InvalidMixture(_))));
        assert!(matches!(parse_mixture(doc(["0.5", "x"], "1").as_bytes()), Err(Error::ParseError(_))));
        assert!(matches!(parse_mixture(b"{not json"), Err(Error::ParseError(_))));
        let near = parse_mixture(doc(["0.5", "0.5000000001"], "1").as_bytes()).unwrap();
        assert!((near.weight_sum() - 1.0).abs() <= SIMPLEX_TOL);
        let unknown = r#"{"dim":1,"kernel":{"family":"cauchy","params":[0,1]},"components":[{"w":"1","mu":["0"],"sigma":"1"}]}"#;
        assert!(matches!(parse_mixture(unknown.as_bytes()), Err(Error::UnknownDensity(_))));
    }
}
