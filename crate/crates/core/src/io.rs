//! Serialization: run configurations, field/line dumps (CSV + JSON) and the
//! basis-solution interchange format. Complex numbers serialize uniformly as
//! [re, im] arrays; CSV uses '.' decimals with 17 significant digits so that
//! doubles roundtrip exactly.

use crate::determinants::Branch;
use crate::dynamics::{SingularityLine, TraceEvent};
use crate::error::{Error, Result};
use crate::interp::BasisSolution;
use crate::poly::Poly;
use crate::solutions::SolutionField;
use crate::spectral::{EquationKind, SpectralData};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

/// One complex scalar as [re, im].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CPair(pub f64, pub f64);

impl From<CPair> for C {
    fn from(p: CPair) -> C {
        C::new(p.0, p.1)
    }
}

impl From<C> for CPair {
    fn from(z: C) -> CPair {
        CPair(z.re, z.im)
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Run configuration shared by the field/lines/params commands.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub kind: EquationKind,
    pub omega: Vec<CPair>,
    pub alpha0: Vec<CPair>,
    /// [min, max, steps]
    pub x_range: (f64, f64, usize),
    pub t_range: (f64, f64, usize),
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Io(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.is_empty() {
            return Err(Error::Domain("empty omega list".into()));
        }
        for (name, r) in [("x_range", &self.x_range), ("t_range", &self.t_range)] {
            if !r.0.is_finite() || !r.1.is_finite() || r.0 >= r.1 {
                return Err(Error::Domain(format!("{name} must be finite with min < max")));
            }
            if r.2 < 2 {
                return Err(Error::Domain(format!("{name} needs at least 2 steps")));
            }
        }
        Ok(())
    }

    pub fn spectral_data(&self) -> Result<SpectralData> {
        SpectralData::new(
            self.omega.iter().map(|&p| p.into()).collect(),
            self.alpha0.iter().map(|&p| p.into()).collect(),
            self.kind,
        )
    }

    pub fn xs(&self) -> Vec<f64> {
        let (a, b, n) = self.x_range;
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        let (a, b, n) = self.t_range;
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }
}

/// CSV dump of a solution field: x,t,re,im,singular.
pub fn field_csv(field: &SolutionField) -> String {
    let mut out = String::from("x,t,re,im,singular\n");
    for (ti, &t) in field.ts.iter().enumerate() {
        for (xi, &x) in field.xs.iter().enumerate() {
            let idx = ti * field.xs.len() + xi;
            let v = field.values[idx];
            let singular = field.singular_mask[idx];
            let (re, im) = if singular { (0.0, 0.0) } else { (v.re, v.im) };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(x),
                fmt17(t),
                fmt17(re),
                fmt17(im),
                u8::from(singular)
            ));
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    x: Vec<f64>,
    t: Vec<f64>,
    values: Vec<Vec<CPair>>,
    singular_mask: Vec<Vec<bool>>,
}

/// JSON dump of a solution field (values indexed [t][x]).
pub fn field_json(field: &SolutionField) -> String {
    let nx = field.xs.len();
    let values = field
        .ts
        .iter()
        .enumerate()
        .map(|(ti, _)| {
            (0..nx)
                .map(|xi| {
                    let v = field.values[ti * nx + xi];
                    if field.singular_mask[ti * nx + xi] {
                        CPair(0.0, 0.0)
                    } else {
                        v.into()
                    }
                })
                .collect()
        })
        .collect();
    let mask = field
        .ts
        .iter()
        .enumerate()
        .map(|(ti, _)| (0..nx).map(|xi| field.singular_mask[ti * nx + xi]).collect())
        .collect();
    serde_json::to_string_pretty(&FieldJson {
        x: field.xs.clone(),
        t: field.ts.clone(),
        values,
        singular_mask: mask,
    })
    .expect("field serialization cannot fail")
}

/// CSV dump of traced lines: line_id,t,x,residue_type,branch.
pub fn lines_csv(lines: &[SingularityLine]) -> String {
    let mut out = String::from("line_id,t,x,residue_type,branch\n");
    for (id, line) in lines.iter().enumerate() {
        for &(t, x) in &line.samples {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                id,
                fmt17(t),
                fmt17(x),
                line.residue_type,
                line.branch
            ));
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct LinesJson {
    lines: Vec<LineJson>,
    events: Vec<EventJson>,
}

#[derive(Serialize, Deserialize)]
struct LineJson {
    id: usize,
    branch: String,
    residue_type: i8,
    samples: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct EventJson {
    kind: String,
    t: f64,
    x: f64,
}

/// JSON dump of traced lines plus the event list.
pub fn lines_json(lines: &[SingularityLine], events: &[TraceEvent]) -> String {
    let lj = lines
        .iter()
        .enumerate()
        .map(|(id, l)| LineJson {
            id,
            branch: l.branch.to_string(),
            residue_type: l.residue_type,
            samples: l.samples.clone(),
        })
        .collect();
    let ej = events
        .iter()
        .map(|e| EventJson {
            kind: format!("{:?}", e.kind).to_lowercase(),
            t: e.t,
            x: e.x,
        })
        .collect();
    serde_json::to_string_pretty(&LinesJson { lines: lj, events: ej })
        .expect("line serialization cannot fail")
}

#[derive(Serialize, Deserialize)]
struct BasisSolutionJson {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "D11")]
    d11: Vec<CPair>,
    #[serde(rename = "D12")]
    d12: Vec<CPair>,
    #[serde(rename = "D21")]
    d21: Vec<CPair>,
    #[serde(rename = "D22")]
    d22: Vec<CPair>,
}

/// BasisSolution as JSON with coefficients listed highest power first.
pub fn basis_solution_json(bs: &BasisSolution) -> String {
    let conv = |p: &Poly| -> Vec<CPair> { p.to_high_to_low().into_iter().map(Into::into).collect() };
    serde_json::to_string_pretty(&BasisSolutionJson {
        n: bs.n,
        d11: conv(&bs.d11),
        d12: conv(&bs.d12),
        d21: conv(&bs.d21),
        d22: conv(&bs.d22),
    })
    .expect("basis solution serialization cannot fail")
}

pub fn basis_solution_from_json(text: &str) -> Result<BasisSolution> {
    let raw: BasisSolutionJson =
        serde_json::from_str(text).map_err(|e| Error::Io(format!("basis solution parse: {e}")))?;
    let conv = |v: &[CPair]| -> Poly {
        Poly::from_high_to_low(&v.iter().map(|&p| p.into()).collect::<Vec<C>>())
    };
    Ok(BasisSolution {
        n: raw.n,
        d11: conv(&raw.d11),
        d12: conv(&raw.d12),
        d21: conv(&raw.d21),
        d22: conv(&raw.d22),
    })
}

/// Interpolation data interchange format for the interp command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpolationDataJson {
    pub mu: Vec<CPair>,
    pub nu: Vec<CPair>,
    pub xi: Vec<CPair>,
}

impl InterpolationDataJson {
    pub fn into_data(self) -> Result<crate::structured::InterpolationData> {
        crate::structured::InterpolationData::new(
            self.mu.into_iter().map(Into::into).collect(),
            self.nu.into_iter().map(Into::into).collect(),
            self.xi.into_iter().map(Into::into).collect(),
        )
    }
}

/// Branch tag helper for CSV consumers.
pub fn branch_tag(b: Branch) -> &'static str {
    match b {
        Branch::Delta1 => "delta1",
        Branch::Delta2 => "delta2",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrip_and_validation() {
        let text = r#"{
            "kind": "SHG",
            "omega": [[1.0, 0.0], [2.0, 0.0]],
            "alpha0": [[0.0, 0.0], [0.5, 0.0]],
            "x_range": [-8.0, 8.0, 400],
            "t_range": [-5.0, 5.0, 100]
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.xs().len(), 400);
        assert_eq!(cfg.ts().len(), 100);
        let sd = cfg.spectral_data().unwrap();
        assert_eq!(sd.n(), 2);

        let bad = text.replace("400", "1");
        assert!(RunConfig::from_json(&bad).is_err());
        let empty = text.replace("[[1.0, 0.0], [2.0, 0.0]]", "[]");
        assert!(RunConfig::from_json(&empty).is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = RunConfig {
            kind: EquationKind::Mkdv,
            omega: vec![CPair(1.0, 0.0)],
            alpha0: vec![CPair(0.3, 0.0)],
            x_range: (-2.0, 2.0, 9),
            t_range: (0.0, 1.0, 3),
            seed: None,
        };
        let sd = cfg.spectral_data().unwrap();
        let f1 = SolutionField::evaluate(&sd, cfg.xs(), cfg.ts());
        let f2 = SolutionField::evaluate(&sd, cfg.xs(), cfg.ts());
        assert_eq!(field_csv(&f1), field_csv(&f2));
        assert_eq!(field_json(&f1), field_json(&f2));
    }

    #[test]
    fn basis_solution_json_roundtrip() {
        use crate::interp::basis_solution;
        use crate::structured::InterpolationData;
        let data = InterpolationData::new(
            vec![C::new(1.0, 0.0), C::new(0.5, 0.2), C::new(-1.0, 0.3), C::new(2.0, 0.0)],
            vec![C::new(0.3, -1.0), C::new(2.0, 0.0), C::new(1.0, 1.0), C::new(-0.4, 0.6)],
            vec![C::new(1.0, 0.0), C::new(-2.0, 0.5), C::new(0.4, -1.2), C::new(3.0, 1.0)],
        )
        .unwrap();
        let bs = basis_solution(&data).unwrap();
        let text = basis_solution_json(&bs);
        let back = basis_solution_from_json(&text).unwrap();
        for (p, q) in [(&bs.d11, &back.d11), (&bs.d12, &back.d12), (&bs.d21, &back.d21), (&bs.d22, &back.d22)] {
            assert!(p.sub(q).max_coeff() < 1e-15);
        }
    }
}
