//! Randomized invariants, 200 cases each from a fixed seed.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

use wedderburn::arith::Q;
use wedderburn::cyclo::{galois_apply, hilbert_symbol_rational, relative_norm, relevant_places, CycloNumber, FixedFieldSpec};
use wedderburn::decompose::{self, Decomposition, Options};
use wedderburn::galg::{self, AlgElement, LinearCharacter};
use wedderburn::grp::{self, FiniteGroup, Subgroup};
use wedderburn::simple::{self, Descriptor, Generalized, Tower};

use super::{fixture, sub, Outcome};

const SEED: [u8; 32] = *b"wedderburn-acceptance-seed-00001";
pub const CASES: u32 = 200;

pub fn runner() -> TestRunner {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

pub fn verdict<T: std::fmt::Debug>(r: Result<(), TestError<T>>, what: &str) -> Result<String, String> {
    r.map(|_| format!("{CASES} cases: {what}")).map_err(|e| e.to_string())
}

pub fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

pub fn alg_element(order: usize, max_terms: usize) -> impl Strategy<Value = AlgElement> {
    prop::collection::vec((0..order, small_q()), 0..=max_terms).prop_map(AlgElement::from_terms)
}

pub fn cyclo(m: u64) -> impl Strategy<Value = CycloNumber> {
    prop::collection::vec((0..m as i64, small_q()), 1..=4).prop_map(move |t| CycloNumber::from_exponents(m, &t))
}

struct Pool {
    groups: Vec<(FiniteGroup, Decomposition)>,
}

impl Pool {
    fn components(&self) -> Vec<(usize, usize)> {
        self.groups.iter().enumerate().flat_map(|(i, (_, d))| (0..d.components.len()).map(move |j| (i, j))).collect()
    }
}

fn descriptor_cocycle(d: &Descriptor, s: u64, r: u64, p: u64) -> bool {
    let m = d.m;
    let norm = |k: u64| if m <= 2 { 1 } else { k % m };
    let t = |a: u64, b: u64| d.tau[&(norm(a), norm(b))].clone();
    let act = |k: u64, x: &CycloNumber| galois_apply(k as i64, x).unwrap();
    let lhs = t(s * r, p).mul(&act(p, &t(s, r)));
    let rhs = t(s, r * p).mul(&t(r, p));
    lhs == rhs
}

fn phi(m: u64) -> u64 {
    (1..=m.max(1)).filter(|&k| num_integer::gcd(k, m.max(1)) == 1).count() as u64
}

pub fn run(out: &mut Outcome, g1000: &FiniteGroup, dec1000: &Decomposition) {
    let mut groups: Vec<(FiniteGroup, Decomposition)> = ["c4", "c6", "q8", "d8", "s3", "frob21", "g168"]
        .iter()
        .map(|n| {
            let g = fixture(n);
            let d = decompose::decompose(&g, &Options::default()).unwrap();
            (g, d)
        })
        .collect();
    groups.push((g1000.clone(), dec1000.clone()));
    let pool = Pool { groups };
    let comps = pool.components();

    out.check("C4.pci_idempotent_central", || {
        let r = runner().run(&prop::sample::select(comps.clone()), |(i, j)| {
            let (g, d) = &pool.groups[i];
            let e = &d.components[j].chain.top_pci;
            prop_assert!(galg::is_idempotent(g, e) && galg::is_central(g, e, &Subgroup::whole(g)));
            Ok(())
        });
        verdict(r, "e^2 = e and ge = eg for every generator g")
    });

    out.check("C4.orthogonality", || {
        let pairs: Vec<(usize, usize, usize)> = pool
            .groups
            .iter()
            .enumerate()
            .flat_map(|(i, (_, d))| {
                let n = d.components.len();
                (0..n).flat_map(move |a| (0..n).filter(move |&b| b != a).map(move |b| (i, a, b)))
            })
            .collect();
        let r = runner().run(&prop::sample::select(pairs), |(i, a, b)| {
            let (g, d) = &pool.groups[i];
            prop_assert!(d.components[a].chain.top_pci.mul(g, &d.components[b].chain.top_pci).is_zero());
            Ok(())
        });
        verdict(r, "e_i e_j = 0 for distinct classes")
    });

    out.check("C4.matrix_image_multiplicative", || {
        // Heis(3) with λ faithful on the centre: H = <x,y> normal, k = 3
        let g = grp::build_heisenberg(3).unwrap();
        let (h, k) = (sub(&g, &["x", "y"]), sub(&g, &["y"]));
        let chain = wedderburn::shoda::chain_through(&g, &h, &k, &[]).unwrap();
        if chain.levels[0].k() != 3 {
            return Err(format!("expected k = 3, got {}", chain.levels[0].k()));
        }
        let tower = Tower::new(&g, LinearCharacter::new(&g, &h, &k).unwrap(), chain);
        let top = tower.e(1).clone();
        let r = runner().run(&(alg_element(27, 8), alg_element(27, 8)), |(a, b)| {
            let (a, b) = (a.mul(&g, &top), b.mul(&g, &top));
            let (ma, mb) = (tower.matrix_image(&a, 0), tower.matrix_image(&b, 0));
            let mab = tower.matrix_image(&a.mul(&g, &b), 0);
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = AlgElement::zero();
                    for l in 0..3 {
                        s = s.add(&ma[i][l].mul(&g, &mb[l][j]));
                    }
                    prop_assert_eq!(&s, &mab[i][j]);
                }
            }
            prop_assert_eq!(tower.from_matrix(&ma, 0), a);
            Ok(())
        });
        verdict(r, "M(ab) = M(a)M(b) and the inverse map recovers a, in Heis(3) with k = 3")
    });

    let descs: Vec<Descriptor> = pool.groups.iter().flat_map(|(_, d)| d.components.iter().map(|c| c.descriptor.clone())).collect();
    out.check("C4.tau_cocycle", || {
        let triples: Vec<(usize, u64, u64, u64)> = descs
            .iter()
            .enumerate()
            .flat_map(|(i, d)| {
                let gal = d.galois().to_vec();
                let gal2 = gal.clone();
                let gal3 = gal.clone();
                gal.into_iter().flat_map(move |s| {
                    let gal3 = gal3.clone();
                    gal2.clone().into_iter().flat_map(move |r| gal3.clone().into_iter().map(move |p| (i, s, r, p)))
                })
            })
            .collect();
        let r = runner().run(&prop::sample::select(triples), |(i, s, r, p)| {
            prop_assert!(descriptor_cocycle(&descs[i], s, r, p));
            Ok(())
        });
        verdict(r, "tau(sr,p) p(tau(s,r)) = tau(s,rp) tau(r,p)")
    });

    out.check("C4.degree_product", || {
        let r = runner().run(&prop::sample::select(comps.clone()), |(i, j)| {
            let c = &pool.groups[i].1.components[j];
            let prod: u64 = c.chain.levels.iter().map(|l| (l.c.order() / l.h.order()) as u64).product();
            let d = &c.descriptor;
            prop_assert_eq!(d.relative_degree(), prod);
            prop_assert_eq!(phi(d.m), prod * d.f.degree());
            Ok(())
        });
        verdict(r, "[E:F] = prod |C_i/H_i| = phi(m)/[F:Q]")
    });

    out.check("C4.staged_equals_direct", || staged_vs_direct(&pool));

    out.check("C4.hilbert_product_formula", || {
        let nz = (1i64..=300, 1i64..=60, any::<bool>()).prop_map(|(n, d, s)| Q::new((if s { -n } else { n }).into(), d.into()));
        let r = runner().run(&(nz.clone(), nz), |(a, b)| {
            let mut prod = 1;
            for v in relevant_places(&a, &b) {
                prod *= hilbert_symbol_rational(&a, &b, v).unwrap();
            }
            prop_assert_eq!(prod, 1);
            Ok(())
        });
        verdict(r, "product of (a,b)_v over all places is 1")
    });
}

/// For the non-strong cyclic components, the staged recursion and the direct power agree on
/// `z·β` for random `β ∈ E`, and both equal `a·N_{E/F}(β)`.
fn staged_vs_direct(pool: &Pool) -> Result<String, String> {
    let (g, dec) = &pool.groups[6];
    let c = dec.components.iter().find(|c| !c.strong).ok_or("no chain component")?;
    let lam = LinearCharacter::new(g, &c.h, &c.k).unwrap();
    let gen = Generalized::new(g, lam, c.chain.clone()).map_err(|e| e.to_string())?;
    let (cf, _) = gen.cyclic_form().map_err(|e| e.to_string())?.ok_or("not cyclic")?;
    let tower = &gen.tower;
    let n = tower.n();
    let tuple = &gen.tuples[&cf.sigma];
    let a0 = gen.levels[n - 1].reps[tuple[n - 1]];
    let orders: Vec<usize> = gen.levels.iter().map(|l| l.reps.len()).collect();
    let z = &gen.units[&cf.sigma];
    let big_n = gen.descriptor.relative_degree();
    let m = gen.descriptor.m;
    let e_full = FixedFieldSpec::full(m);
    let mut cfg = runner();
    let r = cfg.run(&cyclo(m).prop_filter("nonzero", |b| !b.is_zero()), |beta| {
        let zb = z.mul(g, &tower.embed(&beta, n).unwrap());
        let direct = tower.project(&zb.pow(g, big_n), n).unwrap();
        let sp = simple::staged_power(tower, &zb, a0, &orders).unwrap();
        let staged = tower.to_cyclo(&sp.b.left_mul(g, sp.a)).unwrap();
        prop_assert_eq!(&staged, &direct);
        let nb = relative_norm(&beta, &e_full, &gen.descriptor.f).unwrap();
        prop_assert_eq!(direct, cf.a.mul(&nb));
        Ok(())
    });
    verdict(r, &format!("order-168 component, stages {orders:?}: staged = direct = a N(beta)"))
}

