use anyhow::{bail, Context, Result};
use fflab_core::oscillatory::Phase;

/// Highest derivative oracle attached to trigonometric phases.
const MAX_TRIG_ORDER: usize = 8;

pub const PHASE_SYNTAX: &str = "poly:c0,c1,...,cd (ascending coefficients) | sin:w (sin(w x)) | cos:w (cos(w x))";

/// Parses a phase spec such as `poly:0,0,1` (x^2) or `sin:2.5`.
pub fn parse_phase(spec: &str) -> Result<Phase> {
    let (kind, rest) = spec
        .split_once(':')
        .with_context(|| format!("phase '{spec}' is not of the form {PHASE_SYNTAX}"))?;
    match kind.trim() {
        "poly" => {
            let coeffs = rest
                .split(',')
                .map(|c| c.trim().parse::<f64>().with_context(|| format!("bad coefficient '{c}'")))
                .collect::<Result<Vec<_>>>()?;
            if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                bail!("polynomial phase needs finite coefficients");
            }
            Ok(Phase::polynomial(&coeffs))
        }
        "sin" | "cos" => {
            let w: f64 = rest.trim().parse().with_context(|| format!("bad frequency '{rest}'"))?;
            if !w.is_finite() {
                bail!("frequency must be finite");
            }
            // d^j/dx^j sin(w x + s) = w^j sin(w x + s + j pi/2)
            let shift = if kind == "sin" { 0.0 } else { std::f64::consts::FRAC_PI_2 };
            let term = move |j: usize| {
                let phase_shift = shift + j as f64 * std::f64::consts::FRAC_PI_2;
                move |x: f64| w.powi(j as i32) * (w * x + phase_shift).sin()
            };
            let mut phase = Phase::new(format!("{kind}({w} x)"), term(0), term(1));
            for j in 2..=MAX_TRIG_ORDER {
                phase = phase.with_derivative(term(j));
            }
            Ok(phase)
        }
        other => bail!("unknown phase kind '{other}'; expected {PHASE_SYNTAX}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_phase() {
        let g = parse_phase("poly:1,0,2").unwrap();
        assert_eq!(g.eval(3.0), 19.0);
        assert_eq!(g.derivative(1, 3.0), Some(12.0));
    }

    #[test]
    fn trigonometric_phase() {
        let g = parse_phase("sin:2").unwrap();
        assert!((g.eval(0.25) - 0.5f64.sin()).abs() < 1e-15);
        assert!((g.derivative(2, 0.25).unwrap() + 4.0 * 0.5f64.sin()).abs() < 1e-14);
        assert!((g.derivative(5, 0.25).unwrap() - 32.0 * 0.5f64.cos()).abs() < 1e-12);
        let h = parse_phase("cos:3").unwrap();
        assert!((h.derivative(1, 0.1).unwrap() + 3.0 * 0.3f64.sin()).abs() < 1e-14);
        assert!(h.derivative(9, 0.1).is_none());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_phase("x^2").is_err());
        assert!(parse_phase("poly:1,a").is_err());
        assert!(parse_phase("tan:1").is_err());
    }
}
