//! TOML problem files: field, ring, algebra by structure constants, named
//! framings and named modules. See `docs/problem-format.md`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::algdata::{
    default_truncation, Algebra, AlgebraInput, FramedModule, RelationPresentation,
};
use crate::error::{Error, Result};
use crate::exactla::PrimeField;
use crate::gradedcore::{GradedDims, Poly, PolyMatrix, WeightedPolyRing};
use crate::polyparse::parse_poly;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    truncation: Option<i64>,
    field: RawField,
    ring: RawRing,
    #[serde(default)]
    algebra: RawAlgebra,
    #[serde(default)]
    framings: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    modules: BTreeMap<String, RawModule>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    p: u64,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    variables: Vec<String>,
    weights: Vec<i64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    #[serde(default)]
    generators: Vec<String>,
    #[serde(default)]
    shifts: Vec<i64>,
    #[serde(default = "yes")]
    commutative: bool,
    #[serde(default)]
    isolated_singularity: bool,
    #[serde(default)]
    products: BTreeMap<String, Spanned<String>>,
    #[serde(default)]
    relations: Vec<RawRelation>,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelation {
    shift: i64,
    value: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FramingRef {
    Name(String),
    Degrees(Vec<i64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModule {
    framing: FramingRef,
    #[serde(default)]
    action: BTreeMap<String, Spanned<Vec<Vec<String>>>>,
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub algebra: Arc<Algebra>,
    pub framings: BTreeMap<String, GradedDims>,
    pub modules: BTreeMap<String, FramedModule>,
}

impl Problem {
    pub fn framing(&self, name: &str) -> Result<&GradedDims> {
        self.framings
            .get(name)
            .ok_or_else(|| Error::Input(format!("unknown framing '{name}'")))
    }

    pub fn module(&self, name: &str) -> Result<&FramedModule> {
        self.modules
            .get(name)
            .ok_or_else(|| Error::Input(format!("unknown module '{name}'")))
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

pub fn parse_problem(path: &Path) -> Result<Problem> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_problem_str(&src)
}

pub fn parse_problem_str(src: &str) -> Result<Problem> {
    let raw: RawProblem = toml::from_str(src).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| line_of(src, s.start)),
        message: e.message().to_string(),
    })?;
    let field = PrimeField::new(raw.field.p)?;
    let ring = WeightedPolyRing::new(raw.ring.weights.clone())?;
    if raw.ring.variables.len() != ring.num_vars() {
        return Err(Error::Input(
            "ring variables and weights differ in length".into(),
        ));
    }
    let alg = &raw.algebra;
    if alg.generators.len() != alg.shifts.len() {
        return Err(Error::Input(
            "algebra generators and shifts differ in length".into(),
        ));
    }
    let mut names = raw.ring.variables.clone();
    names.extend(alg.generators.iter().cloned());
    let nv = ring.num_vars();
    let g = alg.generators.len() + 1;
    for (k, n) in names.iter().enumerate() {
        if names[..k].contains(n) || n == "1" {
            return Err(Error::Input(format!(
                "name '{n}' is reserved or declared twice"
            )));
        }
    }
    // Linear forms in the generators with coefficients in R.
    let linear = |s: &str, line: usize| -> Result<Vec<Poly>> {
        let p = parse_poly(s, &names, field).map_err(|e| Error::Parse {
            line,
            message: format!("'{s}': {e}"),
        })?;
        let mut out = vec![Poly::zero(); g];
        for (m, c) in p.terms() {
            let gens: Vec<usize> = (nv..names.len()).filter(|&i| m.0[i] > 0).collect();
            let slot = match gens.as_slice() {
                [] => 0,
                [i] if m.0[*i] == 1 => i - nv + 1,
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("'{s}' is not linear in the generators"),
                    });
                }
            };
            let rm = crate::gradedcore::Monomial(m.0[..nv].to_vec());
            out[slot].add_term(rm, c, field);
        }
        Ok(out)
    };
    let mut sc = vec![vec![vec![Poly::zero(); g]; g]; g];
    for j in 0..g {
        sc[0][j][j] = Poly::constant(1, nv);
        sc[j][0][j] = Poly::constant(1, nv);
    }
    for (key, val) in &alg.products {
        let line = line_of(src, val.span().start);
        let parts: Vec<&str> = key.split('*').map(str::trim).collect();
        let idx = |n: &str| alg.generators.iter().position(|x| x == n).map(|i| i + 1);
        let (Some(i), Some(j)) = (
            parts.first().and_then(|n| idx(n)),
            parts.get(1).and_then(|n| idx(n)),
        ) else {
            return Err(Error::Parse {
                line,
                message: format!("product key '{key}' must be 'a*b' with generators a, b"),
            });
        };
        if parts.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("product key '{key}' must name two generators"),
            });
        }
        sc[i][j] = linear(val.get_ref(), line)?;
    }
    let relations = if alg.relations.is_empty() {
        None
    } else {
        let mut columns = Vec::new();
        for r in &alg.relations {
            columns.push(linear(
                r.value.get_ref(),
                line_of(src, r.value.span().start),
            )?);
        }
        Some(RelationPresentation {
            shifts: alg.relations.iter().map(|r| r.shift).collect(),
            columns,
        })
    };
    let mut gnames = vec!["1".to_string()];
    gnames.extend(alg.generators.iter().cloned());
    let mut shifts = vec![0];
    shifts.extend(alg.shifts.iter().copied());
    let input = AlgebraInput {
        field,
        ring: ring.clone(),
        ring_names: raw.ring.variables.clone(),
        generator_names: gnames,
        generator_shifts: shifts,
        structure_constants: sc,
        commutative: alg.commutative,
        isolated_singularity: alg.isolated_singularity,
        relations,
    };

    let mut framings = BTreeMap::new();
    for (name, d) in &raw.framings {
        framings.insert(name.clone(), GradedDims::from_degrees(d));
    }
    let module_degrees = |m: &RawModule| -> Result<Vec<i64>> {
        match &m.framing {
            FramingRef::Name(n) => Ok(framings
                .get(n)
                .ok_or_else(|| Error::Input(format!("unknown framing '{n}'")))?
                .degrees()),
            FramingRef::Degrees(d) => Ok(d.clone()),
        }
    };
    let mut spread = 0;
    for d in framings.values().flat_map(|v| v.degrees()) {
        spread = spread.max(d.abs());
    }
    for m in raw.modules.values() {
        for d in module_degrees(m)? {
            spread = spread.max(d.abs());
        }
    }
    let alpha = input.generator_shifts.iter().map(|a| -a).max().unwrap_or(0);
    let truncation = raw
        .truncation
        .unwrap_or_else(|| default_truncation(alpha, spread));
    let algebra = Arc::new(Algebra::build(input, truncation)?);

    let ring_names = &raw.ring.variables;
    let mut modules = BTreeMap::new();
    for (name, m) in &raw.modules {
        let degrees = module_degrees(m)?;
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Input(format!(
                "module '{name}': framing degrees must be ascending"
            )));
        }
        let n = degrees.len();
        let mut actions = Vec::new();
        for gname in &alg.generators {
            let Some(rows) = m.action.get(gname) else {
                return Err(Error::Input(format!(
                    "module '{name}': missing action of '{gname}'"
                )));
            };
            let line = line_of(src, rows.span().start);
            let rows = rows.get_ref();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Parse {
                    line,
                    message: format!("module '{name}': action of '{gname}' must be {n}×{n}"),
                });
            }
            let mut entries = Vec::with_capacity(n * n);
            for r in rows {
                for s in r {
                    entries.push(parse_poly(s, ring_names, field).map_err(|e| Error::Parse {
                        line,
                        message: format!("module '{name}', action of '{gname}', entry '{s}': {e}"),
                    })?);
                }
            }
            actions.push(PolyMatrix::from_entries(n, n, entries));
        }
        if let Some(extra) = m.action.keys().find(|k| !alg.generators.contains(k)) {
            return Err(Error::Input(format!(
                "module '{name}': unknown generator '{extra}'"
            )));
        }
        modules.insert(
            name.clone(),
            FramedModule::new(algebra.clone(), degrees, actions)?,
        );
    }
    Ok(Problem {
        algebra,
        framings,
        modules,
    })
}

#[derive(Serialize)]
struct EmitProblem {
    truncation: Option<i64>,
    field: RawField,
    ring: RawRing,
    algebra: EmitAlgebra,
    framings: BTreeMap<String, Vec<i64>>,
    modules: BTreeMap<String, EmitModule>,
}

#[derive(Serialize)]
struct EmitAlgebra {
    generators: Vec<String>,
    shifts: Vec<i64>,
    commutative: bool,
    isolated_singularity: bool,
    products: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct EmitModule {
    framing: Vec<i64>,
    action: BTreeMap<String, Vec<Vec<String>>>,
}

/// Renders a problem file; the output parses back to the same data.
pub fn emit_problem(
    input: &AlgebraInput,
    truncation: Option<i64>,
    framings: &BTreeMap<String, Vec<i64>>,
    modules: &[(String, FramedModule)],
) -> Result<String> {
    let f = input.field;
    let ring = &input.ring;
    let rn = &input.ring_names;
    let g = input.num_generators();
    let mut products = BTreeMap::new();
    for i in 1..g {
        for j in 1..g {
            let mut terms = Vec::new();
            for l in 0..g {
                let c = &input.structure_constants[i][j][l];
                if c.is_zero() {
                    continue;
                }
                let cs = c.display(rn, f, ring);
                terms.push(if l == 0 {
                    format!("({cs})")
                } else {
                    format!("({cs})*{}", input.generator_names[l])
                });
            }
            if !terms.is_empty() {
                products.insert(
                    format!("{}*{}", input.generator_names[i], input.generator_names[j]),
                    terms.join(" + "),
                );
            }
        }
    }
    let mut mods = BTreeMap::new();
    for (name, m) in modules {
        let mut action = BTreeMap::new();
        for i in 1..g {
            let a = m.action(i);
            let rows = (0..a.rows())
                .map(|r| {
                    (0..a.cols())
                        .map(|c| a.get(r, c).display(rn, f, ring))
                        .collect()
                })
                .collect();
            action.insert(input.generator_names[i].clone(), rows);
        }
        mods.insert(
            name.clone(),
            EmitModule {
                framing: m.degrees().to_vec(),
                action,
            },
        );
    }
    let doc = EmitProblem {
        truncation,
        field: RawField { p: f.p() },
        ring: RawRing {
            variables: rn.clone(),
            weights: ring.weights.clone(),
        },
        algebra: EmitAlgebra {
            generators: input.generator_names[1..].to_vec(),
            shifts: input.generator_shifts[1..].to_vec(),
            commutative: input.commutative,
            isolated_singularity: input.isolated_singularity,
            products,
        },
        framings: framings.clone(),
        modules: mods,
    };
    toml::to_string(&doc).map_err(|e| Error::Computation(format!("cannot render problem: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NODAL: &str = r#"
[field]
p = 32003

[ring]
variables = ["t"]
weights = [1]

[algebra]
generators = ["x"]
shifts = [-1]
isolated_singularity = true

[algebra.products]
"x*x" = "t*x"

[framings]
rank1 = [0]

[modules.MX]
framing = "rank1"
action.x = [["t"]]
"#;

    #[test]
    fn nodal_round_trip() {
        let p = parse_problem_str(NODAL).unwrap();
        assert_eq!(
            p.algebra.input(),
            &AlgebraInput::nodal(PrimeField::new(32003).unwrap())
        );
        assert_eq!(p.modules["MX"].degrees(), &[0]);
        let text = emit_problem(
            p.algebra.input(),
            None,
            &BTreeMap::new(),
            &[("MX".into(), p.modules["MX"].clone())],
        )
        .unwrap();
        let q = parse_problem_str(&text).unwrap();
        assert_eq!(q.algebra.input(), p.algebra.input());
        assert_eq!(q.modules["MX"].action(1), p.modules["MX"].action(1));
    }

    #[test]
    fn inhomogeneous_constant_rejected() {
        let bad = NODAL.replace("\"x*x\" = \"t*x\"", "\"x*x\" = \"1\"");
        let e = parse_problem_str(&bad).unwrap_err();
        assert!(
            e.to_string().contains("inhomogeneous structure constant"),
            "{e}"
        );
    }

    #[test]
    fn empty_modules_section_is_valid() {
        let src = NODAL.split("[modules.MX]").next().unwrap().to_string() + "[modules]\n";
        assert!(parse_problem_str(&src).unwrap().modules.is_empty());
    }

    #[test]
    fn errors_report_lines() {
        let bad = NODAL.replace("action.x = [[\"t\"]]", "action.x = [[\"t + q\"]]");
        match parse_problem_str(&bad).unwrap_err() {
            Error::Parse { line, message } => {
                assert_eq!(line, 22);
                assert!(message.contains("unknown name 'q'"));
            }
            e => panic!("{e}"),
        }
        let bad = NODAL.replace("p = 32003", "p = ");
        let e = parse_problem_str(&bad).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3 | 4, .. }), "{e:?}");
    }
}
