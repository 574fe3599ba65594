use serde_json::{json, Value};

use super::{config_from_value, ScenarioConfig};
use crate::{Error, Result};

/// Corpus ids in listing order.
pub const CORPUS_IDS: [&str; 7] = [
    "example-4.1",
    "example-4.2",
    "example-4.3",
    "example-4.4",
    "torsion-p2",
    "torsion-p3",
    "plaplace-exact",
];

fn interval() -> Value {
    json!({"kind": "interval", "lo": -1.0, "hi": 1.0})
}

fn torsion_bracket_data() -> Value {
    // 1 ≤ f ≤ ρ₁ with ρ₁ = 2, so the solution of -Δ_A u = 2 bounds u above.
    json!({
        "rho1": {"const": 2.0},
        "rho2": {"const": 1.0},
        "g1": {"const": 0.0},
        "g2": {"const": 0.0},
        "a": {"const": 0.0},
        "s0": 1.0,
        "k1": 0.5
    })
}

/// Raw JSON of a corpus entry.
pub fn corpus_value(id: &str) -> Result<Value> {
    let v = match id {
        "example-4.1" => json!({
            "name": id,
            "description": "(p,q)-Laplacian, f = (1 - s^2) x + A'(|ξ|)|ξ|; g vanishes at s1 = -1 and s2 = 1, h(x) = x changes sign",
            "conditions": [
                "g(-1) = g(1) = 0 and g ≠ 0 on (-1, 1)",
                "h > 0 and h < 0 on sets of positive measure",
                "|f| ≤ |h(x)| max|g| + max|a| A'(|ξ|)|ξ| on [-1, 1]"
            ],
            "young": {"family": "power_sum", "p": 3.0, "q": 2.0},
            "domain": interval(),
            "h": 1.0 / 64.0,
            "convection": {
                "terms": [
                    {"source": {"g": {"poly": [1.0, 0.0, -1.0]}, "h": {"affine": {"c": [1.0]}}}},
                    {"gradient": {"a": {"const": 1.0}}}
                ],
                "growth": {"sigma": {"abs_affine": {"c": [1.0]}}, "a": 1.0}
            },
            "bracket": {"constant": {"lower": -1.0, "upper": 1.0}},
            "checks": {"growth_h": true, "nontrivial": true, "sub_super": true}
        }),
        "example-4.2" => json!({
            "name": id,
            "description": "(p,q)-Laplacian, f = (1 - s) + A'(|ξ|)|ξ|; g(s) = 1 - s vanishes at s1 = 1, h ≡ 1",
            "conditions": [
                "g(1) = 0, g ≠ 0 on [0, 1), g(0) h ≥ 0",
                "h ≥ 0 and h > 0 on a set of positive measure"
            ],
            "young": {"family": "power_sum", "p": 3.0, "q": 2.0},
            "domain": interval(),
            "h": 1.0 / 64.0,
            "convection": {
                "terms": [
                    {"source": {"g": {"poly": [1.0, -1.0]}, "h": {"const": 1.0}}},
                    {"gradient": {"a": {"const": 1.0}}}
                ],
                "growth": {"sigma": {"const": 1.0}, "a": 1.0}
            },
            "bracket": {"constant": {"lower": 0.0, "upper": 1.0}},
            "checks": {"growth_h": true, "sign": "positive", "sub_super": true}
        }),
        "example-4.3" => json!({
            "name": id,
            "description": "A'(t) = t ln(1 + t), f = (1 - s)/(1 + s^2) + A'(|ξ|)|ξ|/4",
            "conditions": [
                "f(x, 1, 0) ≤ 0",
                "f(x, 0, 0) = 1 > 0",
                "f ≥ -(|ξ| ln(1 + |ξ|) + b(s)) for s ≥ 0, |ξ| ≤ 1, with b(s) = s^2",
                "|f| ≤ 1 + |ξ|^2 ln(1 + |ξ|)"
            ],
            "young": {"family": "power_log", "p": 2.0, "q": 1.0, "sign": "+"},
            "domain": interval(),
            "h": 1.0 / 64.0,
            "convection": {
                "terms": [
                    {"source": {"g": {"rational": {"num": [1.0, -1.0], "den": [1.0, 0.0, 1.0]}}, "h": {"const": 1.0}}},
                    {"gradient": {"a": {"const": 0.25}}}
                ],
                "growth": {"sigma": {"const": 1.0}, "a": 0.25}
            },
            "bracket": {"constant": {"lower": 0.0, "upper": 1.0}},
            "checks": {
                "growth_h": true,
                "sign": "positive",
                "certificate": {"k": 1.0, "delta_bar": 1.0},
                "sub_super": true
            }
        }),
        "example-4.4" => json!({
            "name": id,
            "description": "A'(t) = t^2 / ln(1 + t), f = -1 + |s| - A'(|ξ|)|ξ|/2; c1 = 1, g1(s) = s, k = 1",
            "conditions": [
                "-c1 + g1(|s|) - a1 A'(|ξ|)|ξ| ≤ f ≤ -c2 + g2(|s|) rho + a2 A'(|ξ|)|ξ| with c1 = c2 = 1, g1 = g2 = s, rho = 1, a1 = 1/2, a2 = 0",
                "k = inf{s > 0 : g1(s) ≥ c1} = 1"
            ],
            "young": {"family": "power_log", "p": 3.0, "q": 1.0, "sign": "-"},
            "domain": interval(),
            "h": 1.0 / 64.0,
            "convection": {
                "terms": [
                    {"source": {"g": {"sum": [{"const": -1.0}, {"abs_power": {"c": 1.0, "p": 1.0}}]}, "h": {"const": 1.0}}},
                    {"gradient": {"a": {"const": -0.5}}}
                ],
                "growth": {"sigma": {"const": 1.0}, "a": 0.5}
            },
            "bracket": {"constant": {"lower": -1.0, "upper": 0.0}},
            "checks": {"growth_h": true, "sign": "negative", "sub_super": true}
        }),
        "torsion-p2" => json!({
            "name": id,
            "description": "-u'' = 1 on (-1, 1), exact u = (1 - x^2)/2",
            "young": {"family": "power", "p": 2.0},
            "domain": interval(),
            "h": 1.0 / 64.0,
            "convection": {
                "terms": [{"source": {"g": {"const": 1.0}, "h": {"const": 1.0}}}],
                "growth": {"sigma": {"const": 1.0}, "a": 0.0},
                "one_sided": torsion_bracket_data()
            },
            "bracket": {"auxiliary": {"lower": 0.0}},
            "checks": {"growth_h": true, "hypothesis_h": true, "sign": "positive", "sub_super": true},
            "reference": {"p_torsion": {"p": 2.0, "tol": 1e-3}}
        }),
        "torsion-p3" => json!({
            "name": id,
            "description": "-Δ_3 u = 1 on the unit square",
            "young": {"family": "power", "p": 3.0},
            "domain": {"kind": "rectangle", "lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            "h": 1.0 / 16.0,
            "convection": {
                "terms": [{"source": {"g": {"const": 1.0}, "h": {"const": 1.0}}}],
                "growth": {"sigma": {"const": 1.0}, "a": 0.0},
                "one_sided": torsion_bracket_data()
            },
            "bracket": {"auxiliary": {"lower": 0.0}},
            "checks": {"growth_h": true, "hypothesis_h": true, "sign": "positive", "sub_super": true}
        }),
        "plaplace-exact" => json!({
            "name": id,
            "description": "-(|u'| u')' = 1 on (-1, 1), exact u = (2/3)(1 - |x|^{3/2})",
            "young": {"family": "power", "p": 3.0},
            "domain": interval(),
            "h": 1.0 / 128.0,
            "convection": {
                "terms": [{"source": {"g": {"const": 1.0}, "h": {"const": 1.0}}}],
                "growth": {"sigma": {"const": 1.0}, "a": 0.0},
                "one_sided": torsion_bracket_data()
            },
            "bracket": {"auxiliary": {"lower": 0.0}},
            "checks": {"growth_h": true, "hypothesis_h": true, "sign": "positive", "sub_super": true},
            "reference": {"p_torsion": {"p": 3.0, "tol": 5e-3}}
        }),
        _ => {
            return Err(Error::config(
                "corpus",
                format!("unknown corpus id `{id}` (known: {})", CORPUS_IDS.join(", ")),
            ))
        }
    };
    Ok(v)
}

pub fn corpus_config(id: &str) -> Result<ScenarioConfig> {
    config_from_value(corpus_value(id)?)
}

/// `(id, description)` rows.
pub fn list_corpus() -> Vec<(&'static str, String)> {
    CORPUS_IDS
        .iter()
        .map(|id| (*id, corpus_config(id).map(|c| c.description).unwrap_or_default()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_parse() {
        assert_eq!(list_corpus().len(), 7);
        for id in CORPUS_IDS {
            let c = corpus_config(id).unwrap();
            assert_eq!(c.name, id);
        }
        assert!(corpus_config("nope").is_err());
    }

    #[test]
    fn example_4_3_carries_conditions() {
        let c = corpus_config("example-4.3").unwrap();
        assert!(c.conditions.iter().any(|s| s == "f(x, 1, 0) ≤ 0"));
    }
}
