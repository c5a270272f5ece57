//! A seeded property suite covering every module, run by `homalg selftest`.

use serde::Serialize;

use crate::counterexample::{demonstrate_violation, CounterexampleSpec, ViolationOptions};
use crate::error::Result;
use crate::exec::Limits;
use crate::field::FieldSpec;
use crate::graphs::{all_maps, simple_graphs_up_to, LabelMap};
use crate::hom::{alpha_product, hom_partial_with, hom_with};
use crate::isomorphism::{
    decide_pinned_iso, enumerate_isomorphisms, recover_isomorphism, IsoCertificate, Mode,
    VertexBijection,
};
use crate::random::{self, TestRng};
use crate::tensor::{verify_rank_theorem, RankOptions};
use crate::twin::{contract, is_twin_free};
use crate::vandermonde::{shifted_conclusion_check, MomentSystem};
use crate::witness::extend_map;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

type Check = fn(&mut TestRng, &Limits) -> Result<(usize, Option<String>)>;

const CHECKS: &[(&str, Check)] = &[
    ("field_axioms", field_axioms),
    ("hom_decomposition", decomposition),
    ("glue_multiplicativity", multiplicativity),
    ("twin_contraction", twin_contraction),
    ("moment_cancellation", moments),
    ("pinned_iso_agreement", pinned_agreement),
    ("constructive_recovery", recovery),
    ("rank_theorem", ranks),
    ("finite_characteristic_counterexample", counterexample),
];

pub fn run(seed: u64, limits: &Limits) -> SelftestReport {
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = random::rng(seed.wrapping_add(i as u64));
            let (cases, failure) = match check(&mut rng, limits) {
                Ok(r) => r,
                Err(e) => (0, Some(e.to_string())),
            };
            CheckResult {
                name,
                cases,
                passed: failure.is_none(),
                failure,
            }
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    SelftestReport {
        seed,
        checks,
        passed,
    }
}

fn fields() -> [FieldSpec; 2] {
    [
        FieldSpec::rationals(),
        FieldSpec::prime(5).expect("5 is prime"),
    ]
}

fn field_axioms(rng: &mut TestRng, _: &Limits) -> Result<(usize, Option<String>)> {
    let mut cases = 0;
    for spec in fields() {
        for _ in 0..200 {
            let a = random::field_value(rng, spec);
            let b = random::field_value(rng, spec);
            let c = random::field_value(rng, spec);
            cases += 1;
            if &a * &(&b + &c) != &(&a * &b) + &(&a * &c) || &a + &b != &b + &a {
                return Ok((
                    cases,
                    Some(format!("ring axiom fails at {a:?}, {b:?}, {c:?}")),
                ));
            }
            if !a.is_zero() && !(&a * &a.inv()?).is_one() {
                return Ok((cases, Some(format!("inverse fails at {a:?}"))));
            }
            if a.pow(5) != &a.pow(2) * &a.pow(3) {
                return Ok((cases, Some(format!("power law fails at {a:?}"))));
            }
        }
    }
    Ok((cases, None))
}

fn decomposition(rng: &mut TestRng, limits: &Limits) -> Result<(usize, Option<String>)> {
    for case in 0..60 {
        let spec = fields()[case % 2];
        let k = case % 3;
        let g = random::labeled_graph(rng, k, k + 2, case % 4 == 0, 2);
        let h = random::generic_weighted_graph(rng, spec, 1 + case % 3, g.is_directed());
        let mut total = spec.zero();
        for psi in all_maps(k, h.order()) {
            total += alpha_product(&h, &psi) * hom_partial_with(&g, &h, &psi, limits)?;
        }
        if total != hom_with(&g, &h, limits)? {
            return Ok((
                case + 1,
                Some(format!("decomposition fails for {}", g.to_json_string())),
            ));
        }
    }
    Ok((60, None))
}

fn multiplicativity(rng: &mut TestRng, limits: &Limits) -> Result<(usize, Option<String>)> {
    for case in 0..60 {
        let spec = fields()[case % 2];
        let k = 1 + case % 2;
        let directed = case % 3 == 0;
        let g1 = random::labeled_graph(rng, k, k + 2, directed, 2);
        let g2 = random::labeled_graph(rng, k, k + 1, directed, 2);
        let h = random::generic_weighted_graph(rng, spec, 2 + case % 2, directed);
        let psi = random::label_map(rng, k, h.order());
        let glued = hom_partial_with(&g1.glue(&g2)?, &h, &psi, limits)?;
        let product =
            hom_partial_with(&g1, &h, &psi, limits)? * hom_partial_with(&g2, &h, &psi, limits)?;
        if glued != product {
            return Ok((case + 1, Some("glue is not multiplicative".into())));
        }
    }
    Ok((60, None))
}

fn twin_contraction(rng: &mut TestRng, limits: &Limits) -> Result<(usize, Option<String>)> {
    let graphs = simple_graphs_up_to(0, 3, false)?;
    for case in 0..30 {
        let spec = if case % 2 == 0 {
            FieldSpec::rationals()
        } else {
            FieldSpec::prime(3)?
        };
        let h = random::weighted_graph(rng, spec, 2 + case % 3, false, &[-1, 1, 2]);
        let c = contract(&h);
        for g in graphs.iter() {
            if hom_with(g, &h, limits)? != hom_with(g, &c, limits)? {
                return Ok((
                    case + 1,
                    Some(format!("contraction changes hom of {}", g.to_json_string())),
                ));
            }
        }
    }
    Ok((30, None))
}

fn moments(rng: &mut TestRng, limits: &Limits) -> Result<(usize, Option<String>)> {
    for case in 0..100 {
        let spec = fields()[case % 2];
        let len = 1 + case % 4;
        let width = 1 + case % 2;
        let a = (0..len)
            .map(|_| random::field_value(rng, spec))
            .collect::<Vec<_>>();
        // Small value pools make repeated tuples, hence cancelling classes, common.
        let b = (0..len)
            .map(|_| {
                (0..width)
                    .map(|_| spec.from_i64(rand::Rng::gen_range(rng, 0..3)))
                    .collect()
            })
            .collect();
        let sys = MomentSystem::new(spec, a.clone(), b)?;
        if !sys.cancellation_conclusion_check(limits.moment_evaluations)? {
            return Ok((case + 1, Some("cancellation conclusion fails".into())));
        }
        let x: Vec<_> = (0..len)
            .map(|_| spec.from_i64(rand::Rng::gen_range(rng, 0..3)))
            .collect();
        if !shifted_conclusion_check(spec, &a, &x)? {
            return Ok((case + 1, Some("shifted conclusion fails".into())));
        }
    }
    Ok((100, None))
}

fn twin_free_graph(rng: &mut TestRng, m: usize, directed: bool) -> crate::graphs::WeightedGraph {
    loop {
        let h = random::weighted_graph(rng, FieldSpec::rationals(), m, directed, &[-1, 1, 2]);
        if is_twin_free(&h) {
            return h;
        }
    }
}

fn pinned_agreement(rng: &mut TestRng, limits: &Limits) -> Result<(usize, Option<String>)> {
    for case in 0..20 {
        let directed = case % 4 == 0;
        let h = twin_free_graph(rng, 1 + case % 3, directed);
        let h2 = if case % 2 == 0 {
            h.permuted(&random::permutation(rng, h.order()))?
        } else {
            twin_free_graph(rng, 1 + case % 3, directed)
        };
        let k = case % 2;
        let phi = random::label_map(rng, k, h.order());
        let psi = random::label_map(rng, k, h2.order());
        match decide_pinned_iso(&h, &h2, &phi, &psi, Mode::Both, limits)? {
            IsoCertificate::Iso { sigma } if !sigma.is_isomorphism(&h, &h2) => {
                return Ok((case + 1, Some("returned map is not an isomorphism".into())));
            }
            IsoCertificate::NonIso { lhs, rhs, .. } if lhs == rhs => {
                return Ok((case + 1, Some("witness does not separate".into())));
            }
            _ => {}
        }
    }
    Ok((20, None))
}

fn recovery(rng: &mut TestRng, limits: &Limits) -> Result<(usize, Option<String>)> {
    for case in 0..20 {
        let h = twin_free_graph(rng, 1 + case % 3, case % 3 == 0);
        let p = random::permutation(rng, h.order());
        let hp = h.permuted(&p)?;
        let (_, eta) = extend_map(&LabelMap::empty(), &h);
        let expected = IsoCertificate::Iso {
            sigma: VertexBijection::new(p.clone()),
        };
        let cert = recover_isomorphism(&h, &hp, &eta, &eta.compose(&p), limits)?;
        // Recovery returns the unique σ with ψ = σ∘φ; φ is surjective so σ = P.
        if cert != expected
            || !enumerate_isomorphisms(&h, &hp, limits)?.contains(&VertexBijection::new(p))
        {
            return Ok((
                case + 1,
                Some("recovered map differs from the permutation".into()),
            ));
        }
    }
    Ok((20, None))
}

fn ranks(rng: &mut TestRng, limits: &Limits) -> Result<(usize, Option<String>)> {
    let options = RankOptions {
        max_free: 2,
        ..RankOptions::default()
    };
    for case in 0..6 {
        let h = twin_free_graph(rng, 1 + case % 3, false);
        let k = case % 3;
        let r = verify_rank_theorem(&h, k, &options, limits)?;
        if !r.holds {
            return Ok((
                case + 1,
                Some(format!(
                    "rank N {} rank M {} orbits {}",
                    r.rank_n, r.rank_m, r.orbit_count
                )),
            ));
        }
    }
    Ok((6, None))
}

fn counterexample(_: &mut TestRng, limits: &Limits) -> Result<(usize, Option<String>)> {
    let spec = CounterexampleSpec::new(2, 2, vec![2, 1])?;
    let options = ViolationOptions {
        max_free: 3,
        control_max_free: 3,
    };
    for k in [0, 1] {
        let r = demonstrate_violation(&spec, k, &options, limits)?;
        if !r.violation || !r.control.separated {
            return Ok((
                k + 1,
                Some(format!("no violation demonstrated for k = {k}")),
            ));
        }
    }
    Ok((2, None))
}
