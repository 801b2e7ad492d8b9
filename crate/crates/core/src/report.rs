//! Serializable decomposition reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cyclo::{CycloNumber, FixedFieldSpec};
use crate::decompose::{Component, Decomposition};
use crate::error::Result;
use crate::galg::AlgElement;
use crate::grp::{FiniteGroup, Subgroup};
use crate::schur::{reduced_form, ReducedForm, SchurBounds};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupRef {
    pub gens: Vec<String>,
    pub order: usize,
}

impl SubgroupRef {
    pub fn new(g: &FiniteGroup, s: &Subgroup) -> Self {
        SubgroupRef { gens: s.gens().iter().map(|&x| g.label(x)).collect(), order: s.order() }
    }

    pub fn describe(&self) -> String {
        if self.gens.is_empty() {
            "<e>".into()
        } else {
            format!("<{}>", self.gens.join(", "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairReport {
    pub h: SubgroupRef,
    pub k: SubgroupRef,
    pub strong: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainStep {
    pub h: SubgroupRef,
    pub c: SubgroupRef,
    pub k: usize,
    pub pci_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pci: Option<AlgElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauEntry {
    pub sigma: u64,
    pub rho: u64,
    pub value: CycloNumber,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageReport {
    pub level: usize,
    pub d: usize,
    pub s: String,
    pub a: String,
    pub y_digest: String,
    pub b_digest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentReport {
    pub pair: PairReport,
    pub chain: Vec<ChainStep>,
    pub matrix_degree_raw: usize,
    #[serde(rename = "E_conductor")]
    pub e_conductor: u64,
    #[serde(rename = "F")]
    pub f: FixedFieldSpec,
    #[serde(rename = "F_name")]
    pub f_name: String,
    /// `field`, `cyclic` or `crossed_product`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<CycloNumber>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_table: Option<Vec<TauEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<StageReport>>,
    pub schur: SchurBounds,
    pub dim_over_q: u64,
    pub reduced_form: Option<ReducedForm>,
    pub pci_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pci: Option<AlgElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Audit {
    pub sum_dim: u64,
    pub group_order: u64,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInfo {
    pub order: usize,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub group: GroupInfo,
    pub components: Vec<ComponentReport>,
    pub audit: Audit,
}

pub fn component_report(g: &FiniteGroup, c: &Component, full: bool) -> ComponentReport {
    let d = &c.descriptor;
    let kind = if d.relative_degree() == 1 {
        "field"
    } else if c.cyclic.is_some() {
        "cyclic"
    } else {
        "crossed_product"
    };
    let tau_table = (kind == "crossed_product" || full)
        .then(|| d.tau.iter().map(|(&(s, r), v)| TauEntry { sigma: s, rho: r, value: v.clone() }).collect());
    let stages = c.staged.as_ref().filter(|_| full).map(|sp| {
        sp.stages
            .iter()
            .map(|s| StageReport { level: s.level, d: s.d, s: g.label(s.s), a: g.label(s.a), y_digest: s.y.digest(), b_digest: s.b.digest() })
            .collect()
    });
    let (sigma, a, generator) = match (&c.cyclic, kind) {
        (Some(cf), "cyclic") => (Some(cf.sigma), Some(cf.a.clone()), Some(cf.generator.clone())),
        _ => (None, None, None),
    };
    ComponentReport {
        pair: PairReport { h: SubgroupRef::new(g, &c.h), k: SubgroupRef::new(g, &c.k), strong: c.strong },
        chain: c
            .chain
            .levels
            .iter()
            .map(|l| ChainStep {
                h: SubgroupRef::new(g, &l.h),
                c: SubgroupRef::new(g, &l.c),
                k: l.k(),
                pci_digest: l.pci.digest(),
                pci: full.then(|| l.pci.clone()),
            })
            .collect(),
        matrix_degree_raw: d.matrix_degree,
        e_conductor: d.m,
        f: d.f.clone(),
        f_name: d.f.describe(),
        kind: kind.into(),
        sigma,
        a,
        generator,
        tau_table,
        stages,
        schur: c.schur.clone(),
        dim_over_q: d.dim_over_q(),
        reduced_form: c.schur.index().map(|s| reduced_form(d, s)),
        pci_digest: c.chain.top_pci.digest(),
        pci: full.then(|| c.chain.top_pci.clone()),
    }
}

pub fn build_report(g: &FiniteGroup, dec: &Decomposition, full: bool) -> Report {
    let components: Vec<ComponentReport> = dec.components.iter().map(|c| component_report(g, c, full)).collect();
    let sum_dim = components.iter().map(|c| c.dim_over_q).sum();
    let mut notes = Vec::new();
    if sum_dim != g.order() as u64 {
        notes.push(format!("component dimensions sum to {sum_dim}, not {}", g.order()));
    }
    for (i, c) in components.iter().enumerate() {
        if c.reduced_form.is_none() {
            notes.push(format!("component {}: Schur index between {} and {}", i + 1, c.schur.lower, c.schur.upper));
        }
    }
    Report {
        group: GroupInfo { order: g.order(), generators: g.gen_labels().to_vec() },
        components,
        audit: Audit { sum_dim, group_order: g.order() as u64, complete: dec.complete && sum_dim == g.order() as u64, notes },
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One line per component, then the decomposition and the audit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "group of order {} generated by {}", self.group.order, self.group.generators.join(", ")).unwrap();
        for (i, c) in self.components.iter().enumerate() {
            let form = c.reduced_form.as_ref().map_or_else(
                || format!("M_{}((Q(zeta_{})/{}, tau)) with Schur index in [{}, {}]", c.matrix_degree_raw, c.e_conductor, c.f_name, c.schur.lower, c.schur.upper),
                |r| r.text.clone(),
            );
            let via = if c.pair.strong { "strong".to_string() } else { format!("chain of length {}", c.chain.len()) };
            write!(out, "[{}] H={} K={} {}: {} (dim {})", i + 1, c.pair.h.describe(), c.pair.k.describe(), via, form, c.dim_over_q).unwrap();
            if let (Some(s), Some(a)) = (c.sigma, &c.a) {
                write!(out, "; cyclic over {} with sigma = {s}, a = {a}", c.f_name).unwrap();
            }
            out.push('\n');
        }
        let forms: Vec<String> = self
            .components
            .iter()
            .map(|c| c.reduced_form.as_ref().map_or_else(|| "?".to_string(), |r| r.text.clone()))
            .collect();
        writeln!(out, "QG = {}", forms.join(" + ")).unwrap();
        writeln!(
            out,
            "audit: sum of dimensions {} of {}, {}",
            self.audit.sum_dim,
            self.audit.group_order,
            if self.audit.complete { "complete" } else { "incomplete" }
        )
        .unwrap();
        for n in &self.audit.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        out
    }
}

/// Component sizes claimed elsewhere, compared against a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub components: Vec<ExpectedComponent>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedComponent {
    pub text: String,
    pub dim_over_q: u64,
}

/// Notes for every expected component missing from the report and for an expected total that
/// differs from the group order.
pub fn compare_expected(report: &Report, expected: &Expected) -> Vec<String> {
    let mut notes = Vec::new();
    let mut pool: Vec<&str> = report.components.iter().filter_map(|c| c.reduced_form.as_ref()).map(|r| r.text.as_str()).collect();
    let mut unmatched = Vec::new();
    for e in &expected.components {
        match pool.iter().position(|t| *t == e.text) {
            Some(i) => {
                pool.remove(i);
            }
            None => unmatched.push(e),
        }
    }
    for e in &unmatched {
        notes.push(format!("expected {} (dimension {}) is not among the computed components", e.text, e.dim_over_q));
    }
    if !unmatched.is_empty() {
        notes.push(format!("computed components without an expected match: {}", pool.join(", ")));
    }
    let total: u64 = expected.components.iter().map(|e| e.dim_over_q).sum();
    if total != report.audit.group_order {
        notes.push(format!(
            "expected sizes sum to dimension {total}, but |G| = {}; the computed sizes sum to {}",
            report.audit.group_order, report.audit.sum_dim
        ));
    }
    notes
}

/// Display names: `Q` as ℚ, `zeta_n` as ζ_n, `sqrt(d)` as √d and `H(` as ℍ(.
pub fn pretty(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find("sqrt(") {
        out.push_str(&rest[..i]);
        let tail = &rest[i + 5..];
        match tail.find(')') {
            Some(j) => {
                out.push('√');
                out.push_str(&tail[..j]);
                rest = &tail[j + 1..];
            }
            None => {
                out.push_str("sqrt(");
                rest = tail;
            }
        }
    }
    out.push_str(rest);
    let out = out.replace("zeta_", "ζ_").replace("H(", "ℍ(");
    let mut res = String::with_capacity(out.len());
    let chars: Vec<char> = out.chars().collect();
    for (i, &ch) in chars.iter().enumerate() {
        let prev_alpha = i > 0 && (chars[i - 1].is_alphanumeric() || chars[i - 1] == '_');
        let next_ok = chars.get(i + 1).is_none_or(|c| !c.is_alphanumeric() && *c != '_');
        if ch == 'Q' && !prev_alpha && next_ok {
            res.push('ℚ');
        } else {
            res.push(ch);
        }
    }
    res
}
