//! Independent classical formulas used as ground truth for the pairing:
//! the Kummer residue, the two Artin-Hasse trace formulas, Sen's formula,
//! and a brute-force norm-group membership test in K(beta^{1/p})/K.

use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::field::{field_log, field_trace, FieldElement, FieldSpec};
use crate::series::{dlog, log_scaled, Exp, IterSeries};
use crate::shafarevich::{build_basis, decompose, BasisDescription};
use crate::witt::WittElement;

/// res(log eta(X) dlog eps(X) X^{-p}) mod p, for principal-unit series over
/// Z_p: K = Q_p(zeta_p). The log is carried at the p^D scale and the
/// residue divided back out, with divisibility asserted.
pub fn kummer_exponent(eps: &IterSeries, eta: &IterSeries, p: u64) -> Result<u64> {
    for s in [eps, eta] {
        assert_eq!(s.arity(), 1);
        assert_eq!(s.ring().residue_degree(), 1, "Kummer's field has f = 1");
        if !s.coeff(&Exp([0, 0])).sub(&WittElement::one(s.ring())).is_zero()
            || s.terms().any(|(e, _)| e.0[0] < 0)
        {
            return Err(CoreError::Precondition(
                "Kummer oracle needs principal-unit series".into(),
            ));
        }
    }
    let hi = [p as i64 + 6, 1];
    let (log_eta, d) = log_scaled(eta, hi)?;
    let dl = dlog(eps, hi)?;
    // residue of log(eta) dlog(eps) X^{-p}: the coefficient at p - 1
    let target = Exp([p as i64 - 1, 0]);
    let raw = log_eta.convolve_coeff_at(&dl.body, &target)?;
    let mut val = if dl.orientation >= 0 { raw } else { raw.neg() };
    for _ in 0..d {
        val = val.div_p_exact()?;
    }
    Ok(val.coords()[0] % p)
}

/// (eps, zeta_{p^m}) = zeta^{Tr(-log eps)/p^m}: the trace formula, exact
/// mod p^m. Requires f = 1 and a principal unit.
pub fn artin_hasse_zeta(eps: &FieldElement) -> Result<u64> {
    let spec = eps.spec().clone();
    check_ah_input(eps)?;
    let (s, d) = field_log(eps)?;
    let tr = field_trace(&s.neg())?;
    divide_trace(&spec, tr, d, s.prec())
}

/// (eps, pi) = zeta^{-Tr(pi^{-1} zeta log eps)/p^m}. The integrand
/// pi^{-1} zeta log eps is integral (log eps lands in pi O_K at the
/// carried scale); asserted by the exact division. The trace expression is
/// oriented so that the exponent refers to the same slot order as the
/// residue pairing; see the antisymmetry note in the oracle tests.
pub fn artin_hasse_pi(eps: &FieldElement) -> Result<u64> {
    let spec = eps.spec().clone();
    check_ah_input(eps)?;
    let (s, d) = field_log(eps)?;
    let integrand = FieldElement::zeta(&spec)
        .mul(&s)
        .shift_by(0, -1)
        .fold_shift()?
        .neg();
    let tr = field_trace(&integrand)?;
    divide_trace(&spec, tr, d, integrand.prec())
}

fn check_ah_input(eps: &FieldElement) -> Result<()> {
    let spec = eps.spec();
    if spec.arity() != 1 || spec.residue_degree() != 1 {
        return Err(CoreError::Unsupported("trace oracles need n = 1, f = 1".into()));
    }
    let w = eps.sub(&FieldElement::one(spec));
    if !w.is_zero() && w.valuation()?.0[0] < 1 {
        return Err(CoreError::Precondition("not a principal unit".into()));
    }
    Ok(())
}

/// Divide the raw trace by p^{m + d} (asserting exact divisibility, whose
/// failure is a precision fault) and reduce mod p^m. `avail` is the
/// precision at which the trace is actually valid; the quotient must
/// still be good mod p^m.
fn divide_trace(spec: &Arc<FieldSpec>, tr: u64, d: u32, avail: u32) -> Result<u64> {
    let p = spec.p();
    let m = spec.m();
    let shift = m + d;
    if shift + m > avail {
        return Err(CoreError::NonIntegral(shift));
    }
    let p_shift = p.pow(shift);
    if tr % p_shift != 0 {
        return Err(CoreError::NonIntegral(shift));
    }
    Ok((tr / p_shift) % p.pow(m))
}

/// Sen's formula: c = (1/p^m) Tr(zeta/h'(pi) * g'(pi)/beta * log alpha)
/// with caller-supplied g, h in W[T] satisfying g(pi) = beta and
/// h(pi) = zeta. alpha must satisfy v(alpha - 1) >= 2 v_K(p)/(p-1).
pub fn sen_exponent(
    alpha: &FieldElement,
    beta: &FieldElement,
    g: &[i128],
    h: &[i128],
    spec: &Arc<FieldSpec>,
) -> Result<u64> {
    if spec.arity() != 1 || spec.residue_degree() != 1 {
        return Err(CoreError::Unsupported("Sen oracle needs n = 1, f = 1".into()));
    }
    let eval = |poly: &[i128]| -> FieldElement {
        let mut acc = FieldElement::zero(spec);
        for &c in poly.iter().rev() {
            acc = acc.mul(&FieldElement::pi(spec)).add(&FieldElement::from_int(spec, c));
        }
        acc
    };
    let deriv = |poly: &[i128]| -> Vec<i128> {
        poly.iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as i128)
            .collect()
    };
    if !eval(g).equals(&beta.cap_prec(spec.precision())) {
        return Err(CoreError::Precondition("g(pi) != beta".into()));
    }
    if !eval(h).equals(&FieldElement::zeta(spec)) {
        return Err(CoreError::Precondition("h(pi) != zeta".into()));
    }
    let w = alpha.sub(&FieldElement::one(spec));
    let threshold = (2 * spec.ramification() as i64).div_euclid(spec.p() as i64 - 1);
    if !w.is_zero() && w.valuation()?.0[0] < threshold {
        return Err(CoreError::Precondition(format!(
            "v(alpha - 1) must be at least {}",
            threshold
        )));
    }
    let (s, d) = field_log(alpha)?;
    let h_prime = eval(&deriv(h));
    let g_prime = eval(&deriv(g));
    // oriented to the residue pairing's slot order, like artin_hasse_pi
    let integrand = FieldElement::zeta(spec)
        .mul(&h_prime.invert()?)
        .mul(&g_prime)
        .mul(&beta.invert()?)
        .mul(&s)
        .fold_shift()?
        .neg();
    let tr = field_trace(&integrand)?;
    divide_trace(spec, tr, d, integrand.prec())
}

impl FieldElement {
    /// Fold a negative pi-shift back into the parts with the minimal
    /// number of exact divisions (one unit of precision each); errs when
    /// the element is not integral.
    pub fn fold_shift(&self) -> Result<Self> {
        let sh = self.shift();
        if sh[1] >= 0 || self.is_zero() {
            return Ok(self.clone());
        }
        self.divide_parts_by_pi((-sh[1]) as u32)
            .map(|x| x.shift_by(0, -sh[1]))
            .map_err(|_| CoreError::Precondition("element is not integral".into()))
    }
}

// ---------------------------------------------------------------------------
// Norm-group membership in L = K(beta^{1/p}) at (p, m) = (3, 1).
// ---------------------------------------------------------------------------

/// Elements of L = K[Y]/(Y^3 - beta) as coordinate triples over K.
#[derive(Clone, Debug)]
struct LElt {
    c: [FieldElement; 3],
}

struct LExt {
    beta: FieldElement,
    spec: Arc<FieldSpec>,
}

impl LExt {
    fn zero_elt(&self) -> LElt {
        LElt {
            c: [
                FieldElement::zero(&self.spec),
                FieldElement::zero(&self.spec),
                FieldElement::zero(&self.spec),
            ],
        }
    }

    fn from_k(&self, x: &FieldElement) -> LElt {
        let mut e = self.zero_elt();
        e.c[0] = x.clone();
        e
    }

    fn gamma(&self) -> LElt {
        let mut e = self.zero_elt();
        e.c[1] = FieldElement::one(&self.spec);
        e
    }

    fn add(&self, a: &LElt, b: &LElt) -> LElt {
        LElt {
            c: [
                a.c[0].add(&b.c[0]),
                a.c[1].add(&b.c[1]),
                a.c[2].add(&b.c[2]),
            ],
        }
    }

    fn mul(&self, a: &LElt, b: &LElt) -> LElt {
        let mut acc = vec![FieldElement::zero(&self.spec); 5];
        for i in 0..3 {
            for j in 0..3 {
                acc[i + j] = acc[i + j].add(&a.c[i].mul(&b.c[j]));
            }
        }
        // gamma^3 = beta, gamma^4 = beta gamma
        let mut out = self.zero_elt();
        out.c[0] = acc[0].add(&acc[3].mul(&self.beta));
        out.c[1] = acc[1].add(&acc[4].mul(&self.beta));
        out.c[2] = acc[2].clone();
        out
    }

    /// Norm to K: determinant of the multiplication matrix of x on the
    /// basis 1, gamma, gamma^2.
    fn norm(&self, x: &LElt) -> FieldElement {
        // columns: x * gamma^j
        let cols: Vec<LElt> = {
            let g = self.gamma();
            let xg = self.mul(x, &g);
            let xgg = self.mul(&xg, &g);
            vec![x.clone(), xg, xgg]
        };
        let m = |i: usize, j: usize| -> &FieldElement { &cols[j].c[i] };
        let det = m(0, 0)
            .mul(&m(1, 1).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 1))))
            .sub(&m(0, 1).mul(&m(1, 0).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 0)))))
            .add(&m(0, 2).mul(&m(1, 0).mul(m(2, 1)).sub(&m(1, 1).mul(m(2, 0)))));
        det
    }
}

/// Exponent vector of alpha in K^* / (K^{*p} U^{(c)}) over the Shafarevich
/// filtration basis: (v mod p, b_1, b_2, c_omega).
fn class_vector(alpha: &FieldElement, basis: &BasisDescription) -> Result<[u64; 4]> {
    let d = decompose(alpha, basis)?;
    let p = basis.spec.p();
    Ok([
        d.param_exponent.rem_euclid(p as i64) as u64,
        *d.eps_exponents.get(&1).unwrap_or(&0) % p,
        *d.eps_exponents.get(&2).unwrap_or(&0) % p,
        d.omega_exponent % p,
    ])
}

/// Gaussian span membership over F_p in dimension 4.
struct Span {
    p: u64,
    rows: Vec<[u64; 4]>,
}

impl Span {
    fn new(p: u64) -> Self {
        Span { p, rows: vec![] }
    }

    /// Reduce v against the rows; returns the residual.
    fn reduce(&self, mut v: [u64; 4]) -> [u64; 4] {
        for row in &self.rows {
            let lead = row.iter().position(|&x| x != 0).unwrap();
            if v[lead] != 0 {
                let factor = (v[lead] * crate::witt::inv_mod(row[lead], self.p).unwrap()) % self.p;
                for i in 0..4 {
                    v[i] = (v[i] + self.p * self.p - factor * row[i] % self.p) % self.p;
                }
            }
        }
        v
    }

    fn insert(&mut self, v: [u64; 4]) {
        let r = self.reduce(v);
        if r.iter().any(|&x| x != 0) {
            self.rows.push(r);
            self.rows.sort_by_key(|row| row.iter().position(|&x| x != 0));
        }
    }

    fn contains(&self, v: [u64; 4]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }
}

/// Deterministic xorshift for the extra random norm generators.
struct MiniRng(u64);
impl MiniRng {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// Normalize beta mod cubes so that v(beta) lies in {0, 1}: the extension
/// K(beta^{1/3}) only depends on the class of beta.
fn normalize_beta(beta: &FieldElement) -> Result<FieldElement> {
    let spec = beta.spec().clone();
    let v = beta.valuation()?.0[0];
    let k = v.div_euclid(3);
    let mut b = beta.mul(&FieldElement::pi(&spec).pow(-3 * k)?);
    if v.rem_euclid(3) == 2 {
        // inverse class generates the same Kummer extension
        b = b.invert()?.mul(&FieldElement::pi(&spec).pow(3)?);
    }
    Ok(b)
}

/// Brute-force norm test: alpha is a norm from K(beta^{1/3}) times a p-th
/// power iff its class vector lies in the span of the norms of a
/// generating family of L^*. (p, m) = (3, 1) only; beta must not be a cube.
pub fn norm_membership(
    alpha: &FieldElement,
    beta: &FieldElement,
    basis: &BasisDescription,
    seed: u64,
) -> Result<bool> {
    let spec = basis.spec.clone();
    if spec.p() != 3 || spec.m() != 1 || spec.arity() != 1 || spec.residue_degree() != 1 {
        return Err(CoreError::Unsupported("norm oracle runs at (p, m) = (3, 1)".into()));
    }
    let beta_vec = class_vector(beta, basis)?;
    if beta_vec.iter().all(|&x| x == 0) {
        return Err(CoreError::Precondition(
            "beta is a p-th power: degenerate extension".into(),
        ));
    }
    let span = norm_span(beta, basis, seed)?;
    let v = class_vector(alpha, basis)?;
    Ok(span.contains(v))
}

/// Span of the class vectors of norms from L^*.
fn norm_span(beta: &FieldElement, basis: &BasisDescription, seed: u64) -> Result<Span> {
    let spec = basis.spec.clone();
    let b = normalize_beta(beta)?;
    let ext = LExt {
        beta: b.clone(),
        spec: spec.clone(),
    };
    let mut span = Span::new(3);
    let mut feed = |x: &FieldElement, span: &mut Span| -> Result<()> {
        if x.is_zero() {
            return Ok(());
        }
        span.insert(class_vector(x, basis)?);
        Ok(())
    };
    // gamma itself and the torsion unit
    feed(&ext.norm(&ext.gamma()), &mut span)?;
    feed(&FieldElement::from_int(&spec, -1), &mut span)?;
    // unit filtration of L along monomials gamma^a pi^b: levels are
    // covered generously up to p e_L/(p-1) + p for both the ramified
    // (e_L = 6) and unramified (e_L = 2, f_L = 3) cases.
    let pi = FieldElement::pi(&spec);
    let gamma = ext.gamma();
    let one_l = ext.from_k(&FieldElement::one(&spec));
    // w = gamma - 1 enters units both as a uniformizer candidate and as a
    // residue generator after division by pi.
    let gm1 = ext.add(&gamma, &ext.from_k(&FieldElement::one(&spec).neg()));
    for a in 0..3i64 {
        for bpow in -1..=4i64 {
            if a == 0 && bpow <= 0 {
                continue;
            }
            for c in 1..3i64 {
                // u = 1 + c * (gamma-1)^a * pi^b
                let mut mon = one_l.clone();
                for _ in 0..a {
                    mon = ext.mul(&mon, &gm1);
                }
                let shift = ext.from_k(&pi.pow(bpow).unwrap().mul_int(c as i128));
                let u = ext.add(&one_l, &ext.mul(&mon, &shift));
                let n = ext.norm(&u);
                if n.is_zero() {
                    continue;
                }
                // skip non-integral garbage from the pi^{-1} shifts when
                // (gamma-1)^a does not absorb it
                if n.valuation().is_err() {
                    continue;
                }
                feed(&n, &mut span)?;
            }
        }
    }
    // a few random elements of L^* for robustness
    let mut rng = MiniRng(seed | 1);
    for _ in 0..24 {
        let mut x = ext.zero_elt();
        for i in 0..3 {
            let mut acc = FieldElement::zero(&spec);
            for d in 0..3i64 {
                let coeff = rng.below(27) as i128;
                acc = acc.add(&FieldElement::pi(&spec).pow(d).unwrap().mul_int(coeff));
            }
            x.c[i] = acc;
        }
        let n = ext.norm(&x);
        if !n.is_zero() {
            feed(&n, &mut span)?;
        }
    }
    Ok(span)
}

/// The norm of a deterministic pseudo-random element of L^*, for the
/// construction-side check that norms always pass the membership test.
pub fn random_norm(beta: &FieldElement, basis: &BasisDescription, seed: u64) -> Result<FieldElement> {
    let spec = basis.spec.clone();
    let b = normalize_beta(beta)?;
    let ext = LExt {
        beta: b,
        spec: spec.clone(),
    };
    let mut rng = MiniRng(seed.wrapping_mul(0x9E3779B97F4A7C15) | 1);
    loop {
        let mut x = ext.zero_elt();
        for i in 0..3 {
            let mut acc = FieldElement::zero(&spec);
            for d in 0..3i64 {
                let coeff = rng.below(27) as i128;
                acc = acc.add(&FieldElement::pi(&spec).pow(d).unwrap().mul_int(coeff));
            }
            x.c[i] = acc;
        }
        let n = ext.norm(&x);
        if !n.is_zero() && n.valuation().is_ok() {
            return Ok(n);
        }
    }
}

/// Convenience: build the (3, 1) basis used by the norm oracle.
pub fn norm_oracle_basis(spec: &Arc<FieldSpec>) -> Result<BasisDescription> {
    build_basis(spec, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{cyclotomic_spec, parse_element};
    use crate::pairing::{signed_exponent, vostokov_exponent, PrecisionPlan};
    use crate::witt::make_ring;

    fn spec31(prec: u32) -> Arc<FieldSpec> {
        cyclotomic_spec(3, 1, 1, 1, prec).unwrap()
    }

    #[test]
    fn kummer_examples() {
        let ring = make_ring(3, 1, 6).unwrap();
        let one = IterSeries::one(&ring, 1, 6);
        let mk = |terms: &[(i64, i128)]| {
            IterSeries::from_terms(
                &ring,
                1,
                6,
                terms
                    .iter()
                    .map(|&(e, c)| (Exp([e, 0]), WittElement::from_int(&ring, c))),
            )
        };
        let eps = mk(&[(0, 1), (1, 1)]); // 1 + X
        let eta = mk(&[(0, 1), (1, -1)]); // 1 - X
        assert_eq!(kummer_exponent(&eps, &one, 3).unwrap(), 0);
        assert_eq!(kummer_exponent(&one, &eta, 3).unwrap(), 0);
        // res(log(1-X) dlog(1+X) X^{-3}) = 1/2 = 2 mod 3
        assert_eq!(kummer_exponent(&eps, &eta, 3).unwrap(), 2);
        // antisymmetry
        let k_ab = kummer_exponent(&eps, &eta, 3).unwrap();
        let k_ba = kummer_exponent(&eta, &eps, 3).unwrap();
        assert_eq!((k_ab + k_ba) % 3, 0);
        // non-principal input rejected
        let bad = mk(&[(0, 2), (1, 1)]);
        assert!(kummer_exponent(&bad, &eta, 3).is_err());
    }

    #[test]
    fn artin_hasse_examples() {
        let s = spec31(9);
        let one = FieldElement::one(&s);
        assert_eq!(artin_hasse_zeta(&one).unwrap(), 0);
        assert_eq!(artin_hasse_pi(&one).unwrap(), 0);
        let z = FieldElement::zeta(&s);
        assert_eq!(artin_hasse_zeta(&z).unwrap(), 0);
        assert_eq!(artin_hasse_pi(&z).unwrap(), 0);
        // eps = 1 - pi: Tr(-log eps) = 3 mod 9, so the zeta-exponent is 1
        let eps = parse_element("1-pi", &s).unwrap();
        assert_eq!(artin_hasse_zeta(&eps).unwrap(), 1);
        // and the pi-symbol vanishes: (1 - pi, pi) = (Steinberg flipped)
        assert_eq!(artin_hasse_pi(&eps).unwrap(), 0);
        // additivity in eps
        let a = parse_element("1+pi", &s).unwrap();
        let b = parse_element("1+2*pi+2*pi^2", &s).unwrap();
        let za = artin_hasse_zeta(&a).unwrap();
        let zb = artin_hasse_zeta(&b).unwrap();
        let zab = artin_hasse_zeta(&a.mul(&b)).unwrap();
        assert_eq!((za + zb) % 3, zab);
        let pa = artin_hasse_pi(&a).unwrap();
        let pb = artin_hasse_pi(&b).unwrap();
        let pab = artin_hasse_pi(&a.mul(&b)).unwrap();
        assert_eq!((pa + pb) % 3, pab);
    }

    #[test]
    fn artin_hasse_matches_pairing() {
        let s = spec31(9);
        let plan = PrecisionPlan::initial(&s);
        let z = FieldElement::zeta(&s);
        let pi = FieldElement::pi(&s);
        for text in ["1-pi", "1+pi^2", "1+2*pi", "1+pi+pi^2"] {
            let eps = parse_element(text, &s).unwrap();
            let vz = vostokov_exponent(&[eps.clone(), z.clone()], &s, &plan).unwrap();
            assert_eq!(
                vz.value,
                signed_exponent(artin_hasse_zeta(&eps).unwrap(), 3),
                "zeta symbol mismatch for {}",
                text
            );
            let vp = vostokov_exponent(&[eps.clone(), pi.clone()], &s, &plan).unwrap();
            assert_eq!(
                vp.value,
                signed_exponent(artin_hasse_pi(&eps).unwrap(), 3),
                "pi symbol mismatch for {}",
                text
            );
        }
    }

    #[test]
    fn sen_examples() {
        let s = spec31(9);
        let one = FieldElement::one(&s);
        let pi = FieldElement::pi(&s);
        // alpha = 1: exponent 0 for any valid (g, h)
        assert_eq!(
            sen_exponent(&one, &pi, &[0, 1], &[1, 1], &s).unwrap(),
            0
        );
        // g validation failure
        assert!(sen_exponent(&one, &pi, &[1, 1], &[1, 1], &s).is_err());
        // alpha below the validity threshold is rejected
        let shallow = parse_element("1+pi", &s).unwrap();
        assert!(sen_exponent(&shallow, &pi, &[0, 1], &[1, 1], &s).is_err());
        // in-range alpha against beta = pi matches the pairing
        let plan = PrecisionPlan::initial(&s);
        for text in ["1+pi^2", "1+3*pi", "1+2*pi^2+pi^3", "1+pi^2+2*pi^4"] {
            let alpha = parse_element(text, &s).unwrap();
            let c = sen_exponent(&alpha, &pi, &[0, 1], &[1, 1], &s).unwrap();
            let v = vostokov_exponent(&[alpha.clone(), pi.clone()], &s, &plan).unwrap();
            assert_eq!(v.value, signed_exponent(c, 3), "Sen mismatch for {}", text);
        }
        // beta = zeta via g = 1 + T
        for text in ["1+pi^2", "1+2*pi^3"] {
            let alpha = parse_element(text, &s).unwrap();
            let z = FieldElement::zeta(&s);
            let c = sen_exponent(&alpha, &z, &[1, 1], &[1, 1], &s).unwrap();
            let v = vostokov_exponent(&[alpha.clone(), z.clone()], &s, &plan).unwrap();
            assert_eq!(v.value, signed_exponent(c, 3), "Sen/zeta mismatch for {}", text);
        }
    }

    #[test]
    fn norm_membership_examples() {
        let s = spec31(12);
        let basis = norm_oracle_basis(&s).unwrap();
        let beta = FieldElement::pi(&s);
        // constructed norms are always members
        for seed in 1..=3u64 {
            let alpha = random_norm(&beta, &basis, seed).unwrap();
            assert!(
                norm_membership(&alpha, &beta, &basis, 7).unwrap(),
                "norm with seed {} not recognized",
                seed
            );
        }
        // -1 is a cube for odd p, hence always a member
        let minus_one = FieldElement::from_int(&s, -1);
        assert!(norm_membership(&minus_one, &beta, &basis, 7).unwrap());
        // a cube beta is rejected as degenerate
        let cube = parse_element("1+pi^4", &s).unwrap(); // level 4 > 3: a cube
        assert!(norm_membership(&minus_one, &cube, &basis, 7).is_err());
        // cross-check against the pairing on a few pairs
        let plan = PrecisionPlan::initial(&s);
        for (ta, tb) in [("z", "pi"), ("1-pi", "pi"), ("pi", "1-pi"), ("1+pi^2", "pi")] {
            let alpha = parse_element(ta, &s).unwrap();
            let beta = parse_element(tb, &s).unwrap();
            let member = norm_membership(&alpha, &beta, &basis, 11).unwrap();
            let v = vostokov_exponent(&[alpha, beta], &s, &plan).unwrap();
            assert_eq!(
                member,
                v.value == 0,
                "membership vs symbol mismatch for ({}, {})",
                ta,
                tb
            );
        }
    }
}
