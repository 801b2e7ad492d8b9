//! JSON group descriptions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grp::{self, FiniteGroup};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Permutation {
        degree: usize,
        generators: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Semidirect {
        normal: Box<GroupSpec>,
        cyclic_order: usize,
        #[serde(default)]
        action: BTreeMap<String, String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Cyclic {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Direct {
        factors: Vec<GroupSpec>,
    },
    Heisenberg {
        p: usize,
    },
    Quaternion8,
}

pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let spec: GroupSpec = serde_json::from_str(text)?;
    spec.check_depth(0)?;
    Ok(spec)
}

impl GroupSpec {
    fn check_depth(&self, d: usize) -> Result<()> {
        if d > 16 {
            return Err(Error::InvalidSpec("constructor tree too deep".into()));
        }
        match self {
            GroupSpec::Semidirect { normal, .. } => normal.check_depth(d + 1),
            GroupSpec::Direct { factors } => factors.iter().try_for_each(|f| f.check_depth(d + 1)),
            _ => Ok(()),
        }
    }

    /// Build the Cayley table; `max_order` bounds every intermediate group.
    pub fn build(&self, max_order: usize) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Permutation { degree, generators, labels } => {
                if *degree == 0 || *degree > 64 || generators.is_empty() {
                    return Err(Error::InvalidSpec("permutation degree must be in 1..=64 with at least one generator".into()));
                }
                let gens: Vec<Vec<usize>> = generators
                    .iter()
                    .map(|g| {
                        if g.len() != *degree || g.iter().any(|&x| x == 0 || x > *degree) {
                            Err(Error::InvalidSpec(format!("generator must list {degree} images in 1..={degree}")))
                        } else {
                            Ok(g.iter().map(|x| x - 1).collect())
                        }
                    })
                    .collect::<Result<_>>()?;
                let labels = labels.clone().unwrap_or_else(|| (1..=gens.len()).map(|i| format!("g{i}")).collect());
                grp::build_from_permutations(&gens, &labels, max_order)
            }
            GroupSpec::Semidirect { normal, cyclic_order, action, label } => {
                let n = normal.build(max_order)?;
                if *cyclic_order == 0 || n.order().saturating_mul(*cyclic_order) > max_order {
                    return Err(Error::OrderBoundExceeded(max_order));
                }
                for k in action.keys() {
                    if !n.gen_labels().contains(k) {
                        return Err(Error::InvalidSpec(format!("action names unknown generator {k:?}")));
                    }
                }
                let imgs = n
                    .gen_labels()
                    .iter()
                    .zip(n.gens())
                    .map(|(l, &g)| match action.get(l) {
                        Some(w) => n.parse_word(w),
                        None => Ok(g),
                    })
                    .collect::<Result<Vec<_>>>()?;
                grp::build_semidirect_from_action(&n, *cyclic_order, &imgs, label.as_deref().unwrap_or("w"), max_order)
            }
            GroupSpec::Cyclic { n, label } => {
                if *n == 0 || *n > max_order {
                    return Err(Error::OrderBoundExceeded(max_order));
                }
                grp::build_cyclic(*n, label.as_deref().unwrap_or("c"))
            }
            GroupSpec::Direct { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidSpec("direct product of no factors".into()));
                }
                let fs = factors.iter().map(|f| f.build(max_order)).collect::<Result<Vec<_>>>()?;
                let total = fs.iter().try_fold(1usize, |a, f| a.checked_mul(f.order()));
                if total.is_none_or(|t| t > max_order) {
                    return Err(Error::OrderBoundExceeded(max_order));
                }
                grp::build_direct(&fs, max_order)
            }
            GroupSpec::Heisenberg { p } => {
                let g = grp::build_heisenberg(*p)?;
                if g.order() > max_order {
                    return Err(Error::OrderBoundExceeded(max_order));
                }
                Ok(g)
            }
            GroupSpec::Quaternion8 => grp::build_quaternion8(),
        }
    }
}

pub fn load_group(text: &str, max_order: usize) -> Result<FiniteGroup> {
    parse_group_spec(text)?.build(max_order)
}
