//! Full decomposition: enumerate Shoda pairs, describe each component, audit dimensions.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::galg::{self, LinearCharacter};
use crate::grp::{self, FiniteGroup, Subgroup, SUBGROUP_LATTICE_BOUND};
use crate::schur::{self, NormLimits, SchurBounds};
use crate::shoda::{self, InductiveChain};
use crate::simple::{self, CyclicForm, Descriptor, Generalized, StagedPower};

#[derive(Clone, Debug)]
pub struct Options {
    pub limits: NormLimits,
    pub jobs: usize,
    pub debug_checks: bool,
    pub full_scan: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { limits: NormLimits::default(), jobs: 1, debug_checks: false, full_scan: false }
    }
}

#[derive(Clone, Debug)]
pub struct Component {
    pub h: Subgroup,
    pub k: Subgroup,
    pub strong: bool,
    pub chain: InductiveChain,
    pub descriptor: Descriptor,
    pub cyclic: Option<CyclicForm>,
    pub staged: Option<StagedPower>,
    pub schur: SchurBounds,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub order: usize,
    pub components: Vec<Component>,
    /// The primitive central idempotents found sum to 1.
    pub complete: bool,
}

impl Decomposition {
    pub fn sum_dim(&self) -> u64 {
        self.components.iter().map(|c| c.descriptor.dim_over_q()).sum()
    }
}

/// Component of `QG` for the Shoda pair `(H, K)`. Strong pairs use the normalizer description,
/// the others the chain; both paths report the chain.
pub fn component(g: &FiniteGroup, h: &Subgroup, k: &Subgroup, subgroups: &[Subgroup], opts: &Options) -> Result<Component> {
    let strong = shoda::is_strong_shoda_pair(g, h, k)?;
    let lam = LinearCharacter::new(g, h, k)?;
    let chain = shoda::find_strong_inductive_chain(g, h, k, subgroups)?;
    let (descriptor, cyclic, staged) = if strong {
        let sc = simple::strong_component(g, &lam)?;
        let cf = sc.cyclic_form(g);
        if opts.debug_checks {
            let gen = Generalized::new(g, lam.clone(), chain.clone())?;
            if gen.descriptor != sc.descriptor {
                return Err(Error::Invariant("strong-pair description differs from the chain description".into()));
            }
        }
        (sc.descriptor, cf, None)
    } else {
        let gen = Generalized::new(g, lam, chain.clone())?;
        let (cf, sp) = match gen.cyclic_form()? {
            Some((cf, sp)) => (Some(cf), sp),
            None => (None, None),
        };
        (gen.descriptor, cf, sp)
    };
    if opts.debug_checks && !descriptor.check_cocycle() {
        return Err(Error::Invariant("twisting fails the cocycle identity".into()));
    }
    let pci_dim = galg::dimension(g, &chain.top_pci).to_u64();
    if pci_dim != Some(descriptor.dim_over_q()) {
        return Err(Error::Invariant(format!("component dimension {} differs from the idempotent's {:?}", descriptor.dim_over_q(), pci_dim)));
    }
    let schur = schur::schur_bounds(&descriptor, cyclic.as_ref(), opts.limits)?;
    Ok(Component { h: h.clone(), k: k.clone(), strong, chain, descriptor, cyclic, staged, schur })
}

/// Run `f` over `0..n` on `jobs` threads; results come back in index order.
pub fn par_map<T: Send, F: Fn(usize) -> T + Sync>(n: usize, jobs: usize, f: F) -> Vec<T> {
    let jobs = jobs.clamp(1, n.max(1));
    if jobs == 1 {
        return (0..n).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let f = &f;
                s.spawn(move || (j..n).step_by(jobs).map(|i| (i, f(i))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (i, t) in h.join().expect("worker panicked") {
                slots[i] = Some(t);
            }
        }
    });
    slots.into_iter().map(|t| t.unwrap()).collect()
}

pub fn decompose(g: &FiniteGroup, opts: &Options) -> Result<Decomposition> {
    let subgroups = grp::all_subgroups(g, SUBGROUP_LATTICE_BOUND)?;
    let en = shoda::enumerate_shoda_pairs(g, &subgroups, opts.full_scan)?;
    let results = par_map(en.classes.len(), opts.jobs, |i| {
        let c = &en.classes[i];
        component(g, &c.h, &c.k, &subgroups, opts)
    });
    let components = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Decomposition { order: g.order(), components, complete: en.complete })
}
