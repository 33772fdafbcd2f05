//! Named property suites shared by the CLI `verify` subcommand and the
//! acceptance tests. Every suite is deterministic in (trials, seed) and
//! reports counterexamples as data.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::field::{cyclotomic_spec, FieldElement, FieldSpec};
use crate::oracles::{
    artin_hasse_pi, artin_hasse_zeta, kummer_exponent, norm_membership, norm_oracle_basis,
    random_norm, sen_exponent,
};
use crate::pairing::{
    evaluate_once, fitted_sign, signed_exponent, vostokov_exponent, vostokov_exponent_perturbed,
    PrecisionPlan,
};
use crate::sample::Sampler;
use crate::series::{
    dlog, invert_s, invert_unit, log_scaled, residue, shafarevich_exp, DiffForm, Exp, IterSeries,
    Window,
};
use crate::shafarevich::{build_basis, decompose, dual_search, verify_orthogonality};
use crate::witt::{frobenius, make_ring, teichmuller, trace_wzp, WittElement};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: u32,
    pub checks: u32,
    pub failures: Vec<String>,
    pub stability_checks: u32,
    pub stability_failures: Vec<String>,
    /// The fitted global sign in effect during the run.
    pub sign: i8,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.into(),
            trials: 0,
            checks: 0,
            failures: vec![],
            stability_checks: 0,
            stability_failures: vec![],
            sign: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.stability_failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub trials: u32,
    pub seed: u64,
    /// Re-evaluate every stabilized symbol once more at a grown plan and
    /// require the exponent to be reproduced.
    pub check_stability: bool,
}

fn plan_from_stabilized(spec: &FieldSpec, stabilized: (u32, [i64; 2])) -> PrecisionPlan {
    PrecisionPlan {
        prec: stabilized.0,
        window: Window {
            lo: [-stabilized.1[0], if spec.arity() == 1 { 0 } else { -stabilized.1[1] }],
            hi: stabilized.1,
        },
        max_retries: 0,
        prec_step: spec.m() + 1,
    }
}

/// Compute a symbol, optionally confirming it at one growth past the
/// stabilized plan; failures land in the report.
fn symbol_checked(
    xs: &[FieldElement],
    spec: &Arc<FieldSpec>,
    opts: &SuiteOptions,
    report: &mut SuiteReport,
    context: &str,
) -> Result<u64> {
    let plan = PrecisionPlan::initial(spec);
    let v = vostokov_exponent(xs, spec, &plan)?;
    if opts.check_stability {
        report.stability_checks += 1;
        let doubled = plan_from_stabilized(spec, v.stabilized_at).grow();
        match evaluate_once(xs, spec, &doubled) {
            Ok((value, _)) if value == v.value => {}
            Ok((value, _)) => report.stability_failures.push(format!(
                "{}: exponent {} became {} at the doubled plan",
                context, v.value, value
            )),
            Err(e) => report
                .stability_failures
                .push(format!("{}: doubled plan failed: {}", context, e)),
        }
    }
    Ok(v.value)
}

// ---------------------------------------------------------------------------
// Oracle-agreement suites.
// ---------------------------------------------------------------------------

/// Criterion: V(eps, eta) = sigma * Kummer residue at K = Q_p(zeta_p),
/// p in {3, 5}. Trials are split between the primes.
pub fn suite_kummer(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("kummer");
    report.sign = fitted_sign();
    for &p in &[3u64, 5] {
        let spec = cyclotomic_spec(p, 1, 1, 1, 8)?;
        let mut sampler = Sampler::new(opts.seed ^ p);
        for t in 0..opts.trials / 2 {
            let eps = sampler.principal_unit(&spec);
            let eta = sampler.principal_unit(&spec);
            report.trials += 1;
            let v = symbol_checked(
                &[eps.clone(), eta.clone()],
                &spec,
                opts,
                &mut report,
                &format!("kummer p={} trial {}", p, t),
            )?;
            let lift_eps = crate::field::lift_element(&eps)?;
            let lift_eta = crate::field::lift_element(&eta)?;
            let oracle = kummer_exponent(&lift_eps, &lift_eta, p)?;
            report.checks += 1;
            if v != signed_exponent(oracle, p) {
                report.failures.push(format!(
                    "p={} trial {}: V = {} but sigma*kummer = {}",
                    p,
                    t,
                    v,
                    signed_exponent(oracle, p)
                ));
            }
        }
    }
    Ok(report)
}

/// Criterion: V(eps, zeta) and V(eps, pi) against the two trace formulas
/// at (p, m) in {(3,1), (3,2), (5,1)}.
pub fn suite_artin_hasse(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("artin-hasse");
    report.sign = fitted_sign();
    for &(p, m) in &[(3u64, 1u32), (3, 2), (5, 1)] {
        let spec = cyclotomic_spec(p, m, 1, 1, 2 * m + 8)?;
        let pm = p.pow(m);
        let mut sampler = Sampler::new(opts.seed ^ (p << 8) ^ m as u64);
        let zeta = FieldElement::zeta(&spec);
        let pi = FieldElement::pi(&spec);
        for t in 0..opts.trials {
            let eps = sampler.principal_unit(&spec);
            report.trials += 1;
            let vz = symbol_checked(
                &[eps.clone(), zeta.clone()],
                &spec,
                opts,
                &mut report,
                &format!("ah-zeta p={} m={} trial {}", p, m, t),
            )?;
            let oz = artin_hasse_zeta(&eps)?;
            report.checks += 1;
            if vz != signed_exponent(oz, pm) {
                report.failures.push(format!(
                    "(p,m)=({},{}) trial {}: V(eps, zeta) = {} but sigma*AH = {}",
                    p,
                    m,
                    t,
                    vz,
                    signed_exponent(oz, pm)
                ));
            }
            let vp = symbol_checked(
                &[eps.clone(), pi.clone()],
                &spec,
                opts,
                &mut report,
                &format!("ah-pi p={} m={} trial {}", p, m, t),
            )?;
            let op = artin_hasse_pi(&eps)?;
            report.checks += 1;
            if vp != signed_exponent(op, pm) {
                report.failures.push(format!(
                    "(p,m)=({},{}) trial {}: V(eps, pi) = {} but sigma*AH = {}",
                    p,
                    m,
                    t,
                    vp,
                    signed_exponent(op, pm)
                ));
            }
        }
    }
    Ok(report)
}

/// Criterion: the pinned hand-verified value V(zeta_3, 1 - pi) = 2 mod 3.
pub fn suite_pinned(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("pinned");
    report.sign = fitted_sign();
    let spec = cyclotomic_spec(3, 1, 1, 1, 6)?;
    let z = FieldElement::zeta(&spec);
    let u = FieldElement::one(&spec).sub(&FieldElement::pi(&spec));
    report.trials = 1;
    let v = symbol_checked(&[z, u], &spec, opts, &mut report, "pinned")?;
    report.checks = 1;
    if v != 2 {
        report
            .failures
            .push(format!("V(zeta, 1-pi) = {} (expected 2)", v));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Symbol-axiom suites.
// ---------------------------------------------------------------------------

fn axiom_specs() -> Result<Vec<Arc<FieldSpec>>> {
    Ok(vec![
        cyclotomic_spec(3, 1, 1, 1, 8)?,
        cyclotomic_spec(5, 1, 1, 1, 8)?,
        cyclotomic_spec(3, 1, 2, 1, 8)?,
    ])
}

/// Exact additivity in every slot, over the three axiom configurations.
pub fn suite_multilinearity(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("multilinearity");
    report.sign = fitted_sign();
    for spec in axiom_specs()? {
        let pm = spec.p().pow(spec.m());
        let n = spec.arity() as usize;
        let mut sampler = Sampler::new(opts.seed ^ (spec.p() << 4) ^ spec.arity() as u64);
        for t in 0..opts.trials {
            let slot = t as usize % (n + 1);
            let base: Vec<FieldElement> =
                (0..=n).map(|_| sampler.any_element(&spec)).collect();
            let x = sampler.any_element(&spec);
            let y = sampler.any_element(&spec);
            let mut with_x = base.clone();
            with_x[slot] = x.clone();
            let mut with_y = base.clone();
            with_y[slot] = y.clone();
            let mut with_xy = base.clone();
            with_xy[slot] = x.mul(&y);
            let ctx = format!(
                "multilinearity p={} n={} trial {} slot {}",
                spec.p(),
                n,
                t,
                slot
            );
            let vx = symbol_checked(&with_x, &spec, opts, &mut report, &ctx)?;
            let vy = symbol_checked(&with_y, &spec, opts, &mut report, &ctx)?;
            let vxy = symbol_checked(&with_xy, &spec, opts, &mut report, &ctx)?;
            report.trials += 1;
            report.checks += 1;
            if (vx + vy) % pm != vxy {
                report.failures.push(format!(
                    "{}: V(x) + V(y) = {} + {} != V(xy) = {}",
                    ctx, vx, vy, vxy
                ));
            }
        }
    }
    Ok(report)
}

/// V(alpha, 1 - alpha) = 0 and V(alpha, -alpha) = 0 (with the K-slot pair
/// {alpha, 1-alpha} in dimension 2).
pub fn suite_steinberg(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("steinberg");
    report.sign = fitted_sign();
    for spec in axiom_specs()? {
        let n = spec.arity() as usize;
        let mut sampler = Sampler::new(opts.seed ^ (spec.p() << 12) ^ spec.arity() as u64);
        for t in 0..opts.trials {
            let alpha = sampler.any_element(&spec);
            let one_minus = FieldElement::one(&spec).sub(&alpha);
            let ctx = format!("steinberg p={} n={} trial {}", spec.p(), n, t);
            report.trials += 1;
            if !one_minus.is_zero() {
                let args: Vec<FieldElement> = if n == 1 {
                    vec![alpha.clone(), one_minus.clone()]
                } else {
                    vec![alpha.clone(), one_minus.clone(), sampler.any_element(&spec)]
                };
                let v = symbol_checked(&args, &spec, opts, &mut report, &ctx)?;
                report.checks += 1;
                if v != 0 {
                    report
                        .failures
                        .push(format!("{}: V(alpha, 1-alpha, ...) = {}", ctx, v));
                }
            }
            if n == 1 {
                let v = symbol_checked(
                    &[alpha.clone(), alpha.neg()],
                    &spec,
                    opts,
                    &mut report,
                    &ctx,
                )?;
                report.checks += 1;
                if v != 0 {
                    report.failures.push(format!("{}: V(alpha, -alpha) = {}", ctx, v));
                }
            }
        }
    }
    Ok(report)
}

/// Antisymmetry for n = 1 and K-slot antisymmetry for n = 2.
pub fn suite_antisymmetry(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("antisymmetry");
    report.sign = fitted_sign();
    for spec in axiom_specs()? {
        let pm = spec.p().pow(spec.m());
        let n = spec.arity() as usize;
        let mut sampler = Sampler::new(opts.seed ^ (spec.p() << 20) ^ spec.arity() as u64);
        for t in 0..opts.trials {
            report.trials += 1;
            let ctx = format!("antisymmetry p={} n={} trial {}", spec.p(), n, t);
            if n == 1 {
                let a = sampler.any_element(&spec);
                let b = sampler.any_element(&spec);
                let vab = symbol_checked(&[a.clone(), b.clone()], &spec, opts, &mut report, &ctx)?;
                let vba = symbol_checked(&[b, a], &spec, opts, &mut report, &ctx)?;
                report.checks += 1;
                if (vab + vba) % pm != 0 {
                    report.failures.push(format!(
                        "{}: V(a,b) + V(b,a) = {} + {} != 0",
                        ctx, vab, vba
                    ));
                }
            } else {
                let a = sampler.any_element(&spec);
                let b = sampler.any_element(&spec);
                let beta = sampler.any_element(&spec);
                let vab = symbol_checked(
                    &[a.clone(), b.clone(), beta.clone()],
                    &spec,
                    opts,
                    &mut report,
                    &ctx,
                )?;
                let vba = symbol_checked(&[b, a, beta], &spec, opts, &mut report, &ctx)?;
                report.checks += 1;
                if (vab + vba) % pm != 0 {
                    report.failures.push(format!(
                        "{}: swapped K-slots give {} and {}",
                        ctx, vab, vba
                    ));
                }
            }
        }
    }
    Ok(report)
}

/// Random lift perturbations leave every exponent unchanged (n = 1).
pub fn suite_well_defined(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("well-defined");
    report.sign = fitted_sign();
    let spec = cyclotomic_spec(3, 1, 1, 1, 8)?;
    let plan = PrecisionPlan::initial(&spec);
    let mut sampler = Sampler::new(opts.seed ^ 0x9E37);
    for t in 0..opts.trials {
        let a = sampler.element(&spec);
        let b = sampler.element(&spec);
        let base = vostokov_exponent(&[a.clone(), b.clone()], &spec, &plan)?;
        let perts = vec![sampler.perturbation(&spec), sampler.perturbation(&spec)];
        let v = vostokov_exponent_perturbed(&[a, b], &perts, &spec, &plan)?;
        report.trials += 1;
        report.checks += 1;
        if v.value != base.value {
            report.failures.push(format!(
                "trial {}: canonical {} vs perturbed {} ({:?})",
                t, base.value, v.value, perts
            ));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Basis suites.
// ---------------------------------------------------------------------------

/// Orthogonality of the basis at (3,1,1), (5,1,1), (3,2,1), (3,1,2).
pub fn suite_orthogonality(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("orthogonality");
    report.sign = fitted_sign();
    let _ = opts;
    for &(p, m, n) in &[(3u64, 1u32, 1u8), (5, 1, 1), (3, 2, 1), (3, 1, 2)] {
        let spec = cyclotomic_spec(p, m, n, 1, m + 6)?;
        let basis = build_basis(&spec, 2)?;
        let orth = verify_orthogonality(&basis)?;
        for entry in &orth.entries {
            report.checks += 1;
            if !entry.pass {
                report.failures.push(format!(
                    "({},{},{}) {}: expected {} got {}",
                    p, m, n, entry.label, entry.expected, entry.got
                ));
            }
        }
        report.trials += 1;
    }
    Ok(report)
}

/// Exhaustive dual-element search over every admissible (theta, I, l) at
/// p = 3, m = 1, n in {1, 2}.
pub fn suite_dual(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("dual");
    report.sign = fitted_sign();
    let _ = opts;
    for &n in &[1u8, 2] {
        let spec = cyclotomic_spec(3, 1, n, 1, 7)?;
        let basis = build_basis(&spec, 2)?;
        for (j, theta) in &basis.epsilons {
            let eps = crate::shafarevich::epsilon_unit(&spec, j, theta);
            for l in 0..n as usize {
                let i_l = if n == 1 { j.0[0] } else { j.0[l] };
                if i_l % 3 == 0 {
                    continue;
                }
                report.trials += 1;
                report.checks += 1;
                match dual_search(&eps, l, &spec) {
                    Ok(_) => {}
                    Err(e) => report.failures.push(format!(
                        "n={} J=({},{}) theta={:?} hat l={}: {}",
                        n, j.0[0], j.0[1], theta, l, e
                    )),
                }
            }
        }
    }
    Ok(report)
}

/// Decomposition round trips and pairing consistency at (3, 1).
pub fn suite_decompose(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("decompose");
    report.sign = fitted_sign();
    let spec = cyclotomic_spec(3, 1, 1, 1, 12)?;
    let basis = build_basis(&spec, 2)?;
    let plan = PrecisionPlan::initial(&spec);
    let pi = FieldElement::pi(&spec);
    let omega_symbol = vostokov_exponent(&[pi.clone(), basis.omega.clone()], &spec, &plan)?;
    let mut sampler = Sampler::new(opts.seed ^ 0xDEC0);
    for t in 0..opts.trials {
        let alpha = sampler.element(&spec);
        report.trials += 1;
        let d = decompose(&alpha, &basis)?;
        let back = d.reconstruct(&basis)?;
        report.checks += 1;
        let diff = back.sub(&alpha.retarget(&spec).cap_prec(back.prec()));
        if !diff.is_zero() {
            report.failures.push(format!(
                "trial {}: reconstruction differs ({:?})",
                t, d
            ));
            continue;
        }
        // pairing consistency: V(t, alpha) = c * V(t, omega) mod p
        let v = vostokov_exponent(&[pi.clone(), alpha.clone()], &spec, &plan)?;
        report.checks += 1;
        let expect = (d.omega_exponent * omega_symbol.value) % 3;
        if v.value != expect {
            report.failures.push(format!(
                "trial {}: V(t, alpha) = {} but omega exponent {} gives {}",
                t, v.value, d.omega_exponent, expect
            ));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Sen and norm suites.
// ---------------------------------------------------------------------------

/// Sen agreement at (3, 1): random alpha in the validity domain against
/// beta in {pi, zeta, random unit}.
pub fn suite_sen(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("sen");
    report.sign = fitted_sign();
    let spec = cyclotomic_spec(3, 1, 1, 1, 10)?;
    let mut sampler = Sampler::new(opts.seed ^ 0x5E4);
    let h = vec![1i128, 1];
    for t in 0..opts.trials {
        let alpha = sampler.sen_alpha(&spec);
        let (beta, g): (FieldElement, Vec<i128>) = match t % 3 {
            0 => (FieldElement::pi(&spec), vec![0, 1]),
            1 => (FieldElement::zeta(&spec), vec![1, 1]),
            _ => {
                let u = sampler.unit(&spec);
                // read the reduced polynomial off the unit's parts
                let flat = u.fold_shift().unwrap_or_else(|_| u.clone());
                let poly = flat
                    .parts()
                    .get(&0)
                    .map(|poly| poly.iter().map(|c| c.coords()[0] as i128).collect())
                    .unwrap_or_default();
                (u, poly)
            }
        };
        report.trials += 1;
        let c = sen_exponent(&alpha, &beta, &g, &h, &spec)?;
        let v = symbol_checked(
            &[alpha.clone(), beta.clone()],
            &spec,
            opts,
            &mut report,
            &format!("sen trial {}", t),
        )?;
        report.checks += 1;
        if v != signed_exponent(c, 3) {
            report.failures.push(format!(
                "trial {}: V = {} but sigma*sen = {}",
                t,
                v,
                signed_exponent(c, 3)
            ));
        }
    }
    Ok(report)
}

/// Norm-group ground truth at (3, 1): membership iff the symbol vanishes.
pub fn suite_norm(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("norm");
    report.sign = fitted_sign();
    let spec = cyclotomic_spec(3, 1, 1, 1, 12)?;
    let basis = norm_oracle_basis(&spec)?;
    let plan = PrecisionPlan::initial(&spec);
    let mut sampler = Sampler::new(opts.seed ^ 0x41);
    let mut done = 0u32;
    let mut attempt = 0u32;
    while done < opts.trials && attempt < opts.trials * 8 {
        attempt += 1;
        let beta = sampler.element(&spec);
        // half the alphas are constructed norms, half generic
        let alpha = if done % 2 == 0 {
            sampler.element(&spec)
        } else {
            match random_norm(&beta, &basis, opts.seed ^ done as u64) {
                Ok(n) => n,
                Err(_) => continue,
            }
        };
        let member = match norm_membership(&alpha, &beta, &basis, opts.seed ^ 0xBEE) {
            Ok(m) => m,
            Err(CoreError::Precondition(_)) => continue, // beta was a cube
            Err(e) => return Err(e),
        };
        let v = vostokov_exponent(&[alpha.clone(), beta.clone()], &spec, &plan)?;
        done += 1;
        report.trials += 1;
        report.checks += 1;
        if member != (v.value == 0) {
            report.failures.push(format!(
                "pair {}: membership {} but V = {}",
                done, member, v.value
            ));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Kernel invariants.
// ---------------------------------------------------------------------------

/// Randomized identities of the coefficient ring and the series layer:
/// Frobenius/Teichmuller/trace, the twist endomorphism, log additivity,
/// E-integrality and additivity, residues of exact forms, and the
/// s-inverse reconstruction. All exact.
pub fn suite_kernel(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("kernel");
    report.sign = fitted_sign();
    let mut sampler = Sampler::new(opts.seed ^ 0xCE);
    let rings = [make_ring(3, 2, 4)?, make_ring(5, 1, 4)?, make_ring(3, 1, 6)?];
    let mut fail = |msg: String, report: &mut SuiteReport| report.failures.push(msg);

    for ring in &rings {
        let p = ring.p();
        let f = ring.residue_degree();
        let q = ring.q();
        for t in 0..opts.trials {
            report.trials += 1;
            let rand_w = |s: &mut Sampler| {
                let coords: Vec<u64> = (0..f)
                    .map(|_| s.rng().gen_range(0..ring.scalar_modulus()))
                    .collect();
                WittElement::from_coords(ring, coords)
            };
            let x = rand_w(&mut sampler);
            let y = rand_w(&mut sampler);
            report.checks += 5;
            if frobenius(&x.mul(&y)) != frobenius(&x).mul(&frobenius(&y)) {
                fail(format!("p={} f={} t={}: Frobenius not multiplicative", p, f, t), &mut report);
            }
            if frobenius(&x.add(&y)) != frobenius(&x).add(&frobenius(&y)) {
                fail(format!("p={} f={} t={}: Frobenius not additive", p, f, t), &mut report);
            }
            if !frobenius(&x).sub(&x.pow(p)).is_zero_mod(1) {
                fail(format!("p={} f={} t={}: Frobenius != p-power mod p", p, f, t), &mut report);
            }
            let mut z = x.clone();
            for _ in 0..f {
                z = frobenius(&z);
            }
            if z != x {
                fail(format!("p={} f={} t={}: Frobenius^f != id", p, f, t), &mut report);
            }
            if trace_wzp(&frobenius(&x)) != trace_wzp(&x) {
                fail(format!("p={} f={} t={}: trace not Frobenius-invariant", p, f, t), &mut report);
            }
            // Teichmuller fixed point
            let digits: Vec<u64> = (0..f).map(|_| sampler.rng().gen_range(0..p)).collect();
            let th = teichmuller(ring, &digits);
            report.checks += 1;
            if th.pow(q) != th {
                fail(format!("p={} f={} t={}: Teichmuller not q-power fixed", p, f, t), &mut report);
            }
        }
    }

    // Series identities over Z/3^6.
    let ring = &rings[2];
    let hi = [14, 1];
    for t in 0..opts.trials {
        report.trials += 1;
        let mut rand_series = |max_deg: i64, lo_deg: i64, s: &mut Sampler| {
            let terms: Vec<(Exp, WittElement)> = (lo_deg..=max_deg)
                .map(|k| {
                    (
                        Exp([k, 0]),
                        WittElement::from_int(ring, s.rng().gen_range(0..729) as i128),
                    )
                })
                .collect();
            IterSeries::from_terms(ring, 1, 6, terms)
        };
        let a = rand_series(4, 0, &mut sampler);
        let b = rand_series(4, 0, &mut sampler);
        report.checks += 2;
        // twist endomorphism
        if a.add(&b).delta_twist(None) != a.delta_twist(None).add(&b.delta_twist(None))
            || a.mul(&b).delta_twist(None) != a.delta_twist(None).mul(&b.delta_twist(None))
        {
            fail(format!("series t={}: twist not a ring map", t), &mut report);
        }
        let cube = a.mul(&a).mul(&a);
        if a.delta_twist(None).sub(&cube).terms().any(|(_, c)| !c.is_zero_mod(1)) {
            fail(format!("series t={}: twist != p-power mod p", t), &mut report);
        }
        // log additivity at the common scale, over principal units
        let one = IterSeries::one(ring, 1, 6);
        let u = one.add(&rand_series(4, 1, &mut sampler));
        let v = one.add(&rand_series(4, 1, &mut sampler));
        let (lu, du) = log_scaled(&u, hi)?;
        let (lv, dv) = log_scaled(&v, hi)?;
        let (luv, duv) = log_scaled(&u.mul(&v).truncate_above(hi), hi)?;
        report.checks += 1;
        if du != dv || du != duv {
            fail(format!("series t={}: log scales disagree", t), &mut report);
        } else {
            let diff = luv.sub(&lu.add(&lv));
            let prec = diff.prec();
            if diff.terms().any(|(_, c)| !c.is_zero_mod(prec)) {
                fail(format!("series t={}: log not additive", t), &mut report);
            }
        }
        // E: integral by construction, additive on random positive inputs
        let fterm = rand_series(3, 1, &mut sampler);
        let gterm = rand_series(3, 1, &mut sampler);
        let ef = shafarevich_exp(&fterm, hi)?;
        let eg = shafarevich_exp(&gterm, hi)?;
        let efg = shafarevich_exp(&fterm.add(&gterm), hi)?;
        let diff = ef.mul(&eg).truncate_above(hi).sub(&efg);
        report.checks += 1;
        let prec = diff.prec();
        if diff.terms().any(|(_, c)| !c.is_zero_mod(prec)) {
            fail(format!("series t={}: E not multiplicative", t), &mut report);
        }
        // residue of exact forms
        let g = rand_series(5, -4, &mut sampler);
        report.checks += 1;
        if !residue(&DiffForm::new(g.derivative(0)))?.is_zero() {
            fail(format!("series t={}: residue of d(g) != 0", t), &mut report);
        }
        // invert_s reconstruction on a cyclotomic-shaped s with noise
        let spec = cyclotomic_spec(3, 1, 1, 1, 6)?;
        let s_base = spec.s_series(6);
        let noise = rand_series(2, 1, &mut sampler).scale_int(3);
        let s_noisy = IterSeries::from_terms(
            ring,
            1,
            6,
            s_base.terms().map(|(e, c)| (*e, c.clone())).chain(
                noise.terms().map(|(e, c)| (*e, c.clone())),
            ),
        );
        let inv = invert_s(&s_noisy, 4, hi)?;
        let mut total = IterSeries::zero(ring, 1, 6);
        for (k, tk) in &inv.terms {
            total = total.add(&tk.scale_int(3i128.pow(*k)));
        }
        let prod = s_noisy.mul(&total).truncate_above([10, 1]);
        report.checks += 1;
        let mut ok = prod.coeff(&Exp([0, 0])).sub(&WittElement::one(ring)).is_zero_mod(4);
        for (e, c) in prod.terms() {
            if *e != Exp([0, 0]) && !c.is_zero_mod(4) {
                ok = false;
            }
        }
        if !ok {
            fail(format!("series t={}: s * invert_s(s) != 1 mod p^4", t), &mut report);
        }
        // unit inversion round trip
        let unit = one.add(&rand_series(4, 1, &mut sampler));
        let uinv = invert_unit(&unit, hi)?;
        let prod = unit.mul(&uinv);
        report.checks += 1;
        let mut ok = prod.coeff(&Exp([0, 0])) == WittElement::one(ring);
        for (e, c) in prod.terms() {
            if *e != Exp([0, 0]) && !c.is_zero() {
                ok = false;
            }
        }
        if !ok {
            fail(format!("series t={}: unit inverse round trip", t), &mut report);
        }
        // dlog turns a product into a sum of forms
        let w1 = one.add(&rand_series(3, 1, &mut sampler));
        let w2 = one.add(&rand_series(3, 1, &mut sampler));
        let d12 = dlog(&w1.mul(&w2).truncate_above(hi), hi)?;
        let dsum = dlog(&w1, hi)?.body.add(&dlog(&w2, hi)?.body);
        let diff = d12.body.sub(&dsum);
        report.checks += 1;
        let prec = diff.prec();
        if diff.terms().any(|(_, c)| !c.is_zero_mod(prec)) {
            fail(format!("series t={}: dlog not additive on products", t), &mut report);
        }
    }
    Ok(report)
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    match name {
        "kummer" => suite_kummer(opts),
        "artin-hasse" => suite_artin_hasse(opts),
        "pinned" => suite_pinned(opts),
        "multilinearity" => suite_multilinearity(opts),
        "steinberg" => suite_steinberg(opts),
        "antisymmetry" => suite_antisymmetry(opts),
        "well-defined" => suite_well_defined(opts),
        "orthogonality" => suite_orthogonality(opts),
        "dual" => suite_dual(opts),
        "decompose" => suite_decompose(opts),
        "sen" => suite_sen(opts),
        "norm" => suite_norm(opts),
        "kernel" => suite_kernel(opts),
        other => Err(CoreError::Unsupported(format!("unknown suite '{}'", other))),
    }
}

pub fn suite_names() -> &'static [&'static str] {
    &[
        "kummer",
        "artin-hasse",
        "pinned",
        "multilinearity",
        "steinberg",
        "antisymmetry",
        "well-defined",
        "orthogonality",
        "dual",
        "decompose",
        "sen",
        "norm",
        "kernel",
    ]
}
