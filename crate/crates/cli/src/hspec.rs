use std::path::Path;
use std::str::FromStr;

use isocomp::comparison_space::hl_function;
use isocomp::immersed_surface::radial_envelope_from_samples;
use isocomp::radial_math::{RadialFunction, TailPolicy};

/// Envelope bins used for the `envelope` h-spec.
pub const ENVELOPE_BINS: usize = 64;

/// How `h` is given in a run configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum HSpec {
    Zero,
    Hl(f64),
    Constant(f64),
    /// Uniformly spaced `(r, h)` nodes; decays like `exp(-2k r)` past the
    /// last node.
    Table(Vec<(f64, f64)>),
    /// Radial envelope of the surface's radial mean curvature.
    Envelope,
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("bad {what} {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{what} must be finite"))
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = vec![];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != 2 {
            return Err(format!("table rows need 2 fields, got {}", rec.len()));
        }
        if rec[0].eq_ignore_ascii_case("r") {
            continue;
        }
        out.push((number(&rec[0], "table r")?, number(&rec[1], "table h")?));
    }
    Ok(out)
}

impl FromStr for HSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
        let rest = rest.trim();
        match head {
            "zero" if rest.is_empty() => Ok(HSpec::Zero),
            "envelope" if rest.is_empty() => Ok(HSpec::Envelope),
            "hL" => {
                let l = number(rest, "L")?;
                if l > 0.0 {
                    Ok(HSpec::Hl(l))
                } else {
                    Err("L must be positive".into())
                }
            }
            "constant" => Ok(HSpec::Constant(number(rest, "constant")?)),
            "table" => {
                let text = if Path::new(rest).is_file() {
                    std::fs::read_to_string(rest).map_err(|e| format!("{rest}: {e}"))?
                } else {
                    rest.replace(';', "\n")
                };
                let pairs = parse_pairs(&text)?;
                check_uniform(&pairs)?;
                Ok(HSpec::Table(pairs))
            }
            _ => Err(format!("unknown h-spec {s:?}")),
        }
    }
}

fn check_uniform(pairs: &[(f64, f64)]) -> Result<(), String> {
    if pairs.len() < 2 {
        return Err("table needs at least two rows".into());
    }
    let step = pairs[1].0 - pairs[0].0;
    if !(step > 0.0) || pairs[0].0 < 0.0 {
        return Err("table radii must start at r >= 0 and increase".into());
    }
    for (i, w) in pairs.windows(2).enumerate() {
        if ((w[1].0 - w[0].0) - step).abs() > 1e-9 * step.max(w[1].0) {
            return Err(format!("table radii must be evenly spaced (row {})", i + 2));
        }
    }
    Ok(())
}

impl HSpec {
    pub fn needs_surface(&self) -> bool {
        matches!(self, HSpec::Envelope)
    }

    /// Build `h`. The envelope needs the surface's `(r, C)` samples.
    pub fn build(&self, b: f64, surface: Option<&[(f64, f64)]>) -> anyhow::Result<RadialFunction> {
        let k = (-b).sqrt();
        Ok(match self {
            HSpec::Zero => RadialFunction::constant(0.0),
            HSpec::Hl(l) => hl_function(b, *l),
            HSpec::Constant(c) => RadialFunction::constant(*c),
            HSpec::Table(pairs) => RadialFunction::sampled(
                "table",
                pairs[0].0,
                pairs[1].0 - pairs[0].0,
                pairs.iter().map(|p| p.1).collect(),
                TailPolicy::ExpDecay { rate: 2.0 * k },
            )?,
            HSpec::Envelope => {
                let samples = surface.ok_or_else(|| anyhow::anyhow!("the envelope needs a surface"))?;
                radial_envelope_from_samples(samples, ENVELOPE_BINS, TailPolicy::ExpDecay { rate: 2.0 * k })?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        assert_eq!("zero".parse::<HSpec>(), Ok(HSpec::Zero));
        assert_eq!("hL 2".parse::<HSpec>(), Ok(HSpec::Hl(2.0)));
        assert_eq!(" constant 0.3 ".parse::<HSpec>(), Ok(HSpec::Constant(0.3)));
        assert_eq!("envelope".parse::<HSpec>(), Ok(HSpec::Envelope));
        assert_eq!(
            "table 0,0.5; 1,0.25; 2,0.125".parse::<HSpec>(),
            Ok(HSpec::Table(vec![(0.0, 0.5), (1.0, 0.25), (2.0, 0.125)]))
        );
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["", "hL", "hL -1", "hL x", "constant", "zero 1", "table 0,1", "table 0,1;2,1;3,1", "table 0,1,2;1,1", "sinh 2"] {
            assert!(bad.parse::<HSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn table_from_file() {
        let dir = std::env::temp_dir().join(format!("isocomp-h-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("h.csv");
        std::fs::write(&path, "r,h\n0,0.1\n0.5,0.05\n1.0,0.02\n").unwrap();
        let spec: HSpec = format!("table {}", path.display()).parse().unwrap();
        let h = spec.build(-1.0, None).unwrap();
        assert!((h.eval(0.25) - 0.075).abs() < 1e-12);
        assert!(h.eval(3.0) < 0.02);
        std::fs::remove_dir_all(dir).unwrap();
    }

    mod props {
        use proptest::prelude::*;

        use super::super::*;

        proptest! {
            #[test]
            fn numeric_specs_round_trip(x in 1e-6f64..1e6) {
                prop_assert_eq!(format!("hL {x}").parse::<HSpec>(), Ok(HSpec::Hl(x)));
                prop_assert_eq!(format!("constant {x}").parse::<HSpec>(), Ok(HSpec::Constant(x)));
                prop_assert_eq!(format!("constant -{x}").parse::<HSpec>(), Ok(HSpec::Constant(-x)));
            }

            #[test]
            fn table_hits_its_nodes(step in 0.01f64..1.0, values in proptest::collection::vec(0.0f64..1.0, 2..20)) {
                let text: Vec<String> = values.iter().enumerate().map(|(i, v)| format!("{},{v}", i as f64 * step)).collect();
                let spec: HSpec = format!("table {}", text.join(";")).parse().unwrap();
                let h = spec.build(-1.0, None).unwrap();
                for (i, v) in values.iter().enumerate() {
                    prop_assert!((h.eval(i as f64 * step) - v).abs() <= 1e-12 * (1.0 + v.abs()));
                }
            }
        }
    }
}
