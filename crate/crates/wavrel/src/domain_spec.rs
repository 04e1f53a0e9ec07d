//! Domain-spec JSON documents.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wavrel_core::geometry::{Domain, Metric, ParamCurve, Shape};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
    #[serde(default)]
    pub outer: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    Conformal { conformal: PolySpec },
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::Named("minkowski".into())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySpec {
    pub poly: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        r: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Fourier {
        cx: Vec<f64>,
        cy: Vec<f64>,
        #[serde(rename = "T")]
        period: f64,
    },
    Diamond { sp: [f64; 2], sm: [f64; 2] },
}

impl CurveSpec {
    fn curve(&self) -> ParamCurve {
        match self {
            CurveSpec::Circle { r, center } => ParamCurve::circle(*r, *center),
            CurveSpec::Ellipse { a, b, center } => ParamCurve::new(Shape::Ellipse { a: *a, b: *b, center: *center }),
            CurveSpec::Fourier { cx, cy, period } => ParamCurve::fourier(cx.clone(), cy.clone(), *period),
            CurveSpec::Diamond { sp, sm } => ParamCurve::diamond(*sp, *sm),
        }
    }
}

impl DomainSpec {
    pub fn parse(text: &str) -> Result<DomainSpec, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("domain spec: {e}")))
    }

    pub fn load(path: &str) -> Result<DomainSpec, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        DomainSpec::parse(&text)
    }

    pub fn is_misner(&self) -> bool {
        matches!(&self.metric, MetricSpec::Named(n) if n == "misner")
    }

    fn metric(&self) -> Result<Metric, CliError> {
        match &self.metric {
            MetricSpec::Named(n) if n == "minkowski" => Ok(Metric::Minkowski),
            MetricSpec::Named(n) if n == "misner" => Ok(Metric::Misner),
            MetricSpec::Named(n) => Err(CliError::Input(format!("unknown metric '{n}'"))),
            MetricSpec::Conformal { conformal } => Ok(Metric::Conformal { poly: conformal.poly.clone() }),
        }
    }

    pub fn build(&self) -> Result<Domain, CliError> {
        let metric = self.metric()?;
        if matches!(metric, Metric::Misner) {
            return Ok(Domain::misner());
        }
        let curves = self.curves.iter().map(CurveSpec::curve).collect();
        Ok(Domain::new(curves, self.outer, metric)?)
    }

    /// SHA-256 of the canonical re-serialization, so formatting of the input
    /// file does not matter.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disk() {
        let spec = DomainSpec::parse(r#"{"curves":[{"kind":"circle","r":1}],"metric":"minkowski"}"#).unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn annulus_inner_is_clockwise() {
        let spec = DomainSpec::parse(
            r#"{"curves":[{"kind":"circle","r":2},{"kind":"circle","r":1}],"outer":0}"#,
        )
        .unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.component_count(), 2);
        assert!(d.curve(1).signed_area(256) < 0.0);
    }

    #[test]
    fn negative_conformal_factor_rejected() {
        let spec = DomainSpec::parse(r#"{"metric":{"conformal":{"poly":[[-1.0]]}},"curves":[{"kind":"circle","r":1}]}"#).unwrap();
        let err = spec.build().unwrap_err();
        assert!(err.to_string().contains("not Lorentzian"));
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!(DomainSpec::parse(r#"{"curves":[{"kind":"square","r":1}]}"#).is_err());
        assert!(DomainSpec::parse(r#"{"metric":"euclidean","curves":[{"kind":"circle","r":1}]}"#).unwrap().build().is_err());
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = DomainSpec::parse(r#"{"curves":[{"kind":"circle","r":1}]}"#).unwrap();
        let b = DomainSpec::parse("{\n  \"curves\": [ {\"r\": 1, \"kind\": \"circle\"} ]\n}").unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = DomainSpec::parse(r#"{"curves":[{"kind":"circle","r":2}]}"#).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn misner_spec() {
        let spec = DomainSpec::parse(r#"{"metric":"misner"}"#).unwrap();
        assert!(spec.is_misner());
        assert!(spec.build().unwrap().is_misner());
    }
}
