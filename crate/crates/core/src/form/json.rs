//! JSON encoding of forms.
//!
//! ```json
//! {"model":"grid","domain":"h1","atoms":[{"kind":"dirichlet","c":"1/1"},
//!  {"kind":"boundary","alpha":"1/1","beta":"1/1"}]}
//! ```
//!
//! Rationals are written as `"p/q"`; plain integers are accepted on input.
//! Canonical output round-trips byte for byte.

use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{fmt_rational, parse_rational, DomainTag, FormAtom, FormError, FormSpec, Generator, LambdaFn, Rational};
use crate::hilbert::Model;

#[derive(Serialize, Deserialize)]
struct FormJson {
    model: Model,
    domain: String,
    atoms: Vec<AtomJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum AtomJson {
    Diag {
        lambda: String,
        sup: Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeff: Option<String>,
    },
    Dirichlet {
        c: String,
    },
    Boundary {
        alpha: String,
        beta: String,
    },
    BoundedMat {
        gen: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeff: Option<String>,
    },
    Hamel {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeff: Option<String>,
    },
    Zero,
}

fn coeff_out(c: &Rational) -> Option<String> {
    (!c.is_one()).then(|| fmt_rational(c))
}

fn coeff_in(c: &Option<String>) -> Result<Rational, FormError> {
    c.as_deref().map(parse_rational).unwrap_or(Ok(Rational::one()))
}

fn sup_value(lambda: &LambdaFn) -> Value {
    match lambda.sup() {
        None => Value::from("inf"),
        Some(r) if r.is_integer() => Value::from(*r.numer()),
        Some(r) => Value::from(*r.numer() as f64 / *r.denom() as f64),
    }
}

fn check_sup(lambda: &LambdaFn, declared: &Value) -> Result<(), FormError> {
    let mismatch = || FormError::InconsistentSup {
        lambda: lambda.id(),
        declared: declared.to_string(),
    };
    match (lambda.sup(), declared) {
        (None, Value::String(s)) if s == "inf" => Ok(()),
        (Some(r), Value::Number(n)) => {
            let d = n.as_f64().ok_or_else(mismatch)?;
            let a = *r.numer() as f64 / *r.denom() as f64;
            if (d - a).abs() <= 1e-12 * a.abs().max(1.0) {
                Ok(())
            } else {
                Err(mismatch())
            }
        }
        _ => Err(mismatch()),
    }
}

impl From<&FormAtom> for AtomJson {
    fn from(a: &FormAtom) -> AtomJson {
        match a {
            FormAtom::Diag { lambda, coeff } => AtomJson::Diag {
                lambda: lambda.id(),
                sup: sup_value(lambda),
                coeff: coeff_out(coeff),
            },
            FormAtom::Dirichlet { c } => AtomJson::Dirichlet { c: fmt_rational(c) },
            FormAtom::Boundary { alpha, beta } => AtomJson::Boundary {
                alpha: fmt_rational(alpha),
                beta: fmt_rational(beta),
            },
            FormAtom::BoundedMat { gen, coeff } => AtomJson::BoundedMat {
                gen: gen.id(),
                coeff: coeff_out(coeff),
            },
            FormAtom::Hamel { coeff } => AtomJson::Hamel { coeff: coeff_out(coeff) },
            FormAtom::Zero => AtomJson::Zero,
        }
    }
}

impl TryFrom<&AtomJson> for FormAtom {
    type Error = FormError;
    fn try_from(a: &AtomJson) -> Result<FormAtom, FormError> {
        Ok(match a {
            AtomJson::Diag { lambda, sup, coeff } => {
                let lambda = LambdaFn::parse(lambda)?;
                check_sup(&lambda, sup)?;
                FormAtom::Diag {
                    lambda,
                    coeff: coeff_in(coeff)?,
                }
            }
            AtomJson::Dirichlet { c } => FormAtom::Dirichlet { c: parse_rational(c)? },
            AtomJson::Boundary { alpha, beta } => FormAtom::Boundary {
                alpha: parse_rational(alpha)?,
                beta: parse_rational(beta)?,
            },
            AtomJson::BoundedMat { gen, coeff } => FormAtom::BoundedMat {
                gen: Generator::parse(gen)?,
                coeff: coeff_in(coeff)?,
            },
            AtomJson::Hamel { coeff } => FormAtom::Hamel { coeff: coeff_in(coeff)? },
            AtomJson::Zero => FormAtom::Zero,
        })
    }
}

impl FormSpec {
    /// Compact canonical JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("form JSON is always serializable")
    }

    pub fn to_json_value(&self) -> Value {
        let j = FormJson {
            model: self.model(),
            domain: self.domain().id(),
            atoms: self.atoms().iter().map(AtomJson::from).collect(),
        };
        serde_json::to_value(j).expect("form JSON is always serializable")
    }

    pub fn from_json(s: &str) -> Result<FormSpec, FormError> {
        let v: Value = serde_json::from_str(s).map_err(|e| FormError::Json(e.to_string()))?;
        FormSpec::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<FormSpec, FormError> {
        let j: FormJson = serde_json::from_value(v.clone()).map_err(|e| FormError::Json(e.to_string()))?;
        let domain = DomainTag::parse(&j.domain)?;
        let atoms = j.atoms.iter().map(FormAtom::try_from).collect::<Result<Vec<_>, _>>()?;
        FormSpec::new(j.model, domain, atoms)
    }
}

impl Serialize for FormSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::catalog::*;

    #[test]
    fn catalog_round_trips_byte_for_byte() {
        for (name, t) in catalog_forms() {
            let s = t.to_json();
            let back = FormSpec::from_json(&s).unwrap();
            assert_eq!(back, t, "{name}");
            assert_eq!(back.to_json(), s, "{name}");
        }
        let h = hamel_form();
        assert_eq!(FormSpec::from_json(&h.to_json()).unwrap(), h);
    }

    #[test]
    fn robin_form_encoding() {
        assert_eq!(
            robin_form().to_json(),
            r#"{"atoms":[{"c":"1/1","kind":"dirichlet"},{"alpha":"1/1","beta":"1/1","kind":"boundary"}],"domain":"h1","model":"grid"}"#
        );
    }

    #[test]
    fn integers_and_zero_atoms_are_accepted() {
        let s = r#"{"model":"sequence","domain":"diag-max:j","atoms":[{"kind":"diag","lambda":"j","sup":"inf","coeff":"2"},{"kind":"zero"}]}"#;
        let t = FormSpec::from_json(s).unwrap();
        assert_eq!(t, linear_diag().scaled(Rational::from_integer(2)).unwrap());
    }

    #[test]
    fn inconsistent_sup_is_rejected() {
        let s = r#"{"model":"sequence","domain":"full","atoms":[{"kind":"diag","lambda":"1/j","sup":"inf"}]}"#;
        assert!(matches!(FormSpec::from_json(s), Err(FormError::InconsistentSup { .. })));
        let s = r#"{"model":"sequence","domain":"full","atoms":[{"kind":"diag","lambda":"1/j","sup":2}]}"#;
        assert!(matches!(FormSpec::from_json(s), Err(FormError::InconsistentSup { .. })));
    }

    #[test]
    fn malformed_input_is_an_error() {
        assert!(matches!(FormSpec::from_json("{"), Err(FormError::Json(_))));
        let s = r#"{"model":"grid","domain":"h1","atoms":[{"kind":"dirichlet","c":"-1/2"}]}"#;
        assert!(matches!(FormSpec::from_json(s), Err(FormError::NegativeCoefficient(_))));
    }
}
