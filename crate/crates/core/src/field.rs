//! The fields under test: cyclotomic K = Q_p(zeta_{p^m}) and the
//! two-dimensional K{{t1}} with t2 = pi = zeta - 1.
//!
//! Elements are kept integral: a monomial shift in the local parameters
//! times polynomials in pi reduced mod the Eisenstein minimal polynomial.
//! Division by pi is exact through the relation p = -(pi^e + ... + a_1 pi),
//! which is also what pushes p-divisible constants into positive-order
//! monomials when building series lifts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::series::{Exp, IterSeries};
use crate::witt::{make_ring, teichmuller, WittElement, WittRingSpec};

/// The result class of a symbol computation: the exponent c of
/// zeta_{p^m}^c together with the plan at which it stabilized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolExponent {
    pub value: u64,
    pub modulus: u64,
    /// (p-adic precision, per-variable window hi) of the stabilized plan.
    pub stabilized_at: (u32, [i64; 2]),
}

/// Description of the field K.
pub struct FieldSpec {
    p: u64,
    m: u32,
    arity: u8,
    f: usize,
    ring: Arc<WittRingSpec>,
    /// Monic Eisenstein minimal polynomial of pi over W(K0), degree e,
    /// exact integer coefficients; constant term is p itself.
    minpoly: Vec<i128>,
    e: usize,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            fm,
            "FieldSpec(p={}, m={}, n={}, f={}, e={}, N={})",
            self.p,
            self.m,
            self.arity,
            self.f,
            self.e,
            self.ring.precision()
        )
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.m == other.m
            && self.arity == other.arity
            && self.f == other.f
            && self.ring == other.ring
    }
}
impl Eq for FieldSpec {}

fn binomial_row(n: u64) -> Vec<i128> {
    let mut row = vec![1i128];
    for k in 1..=n {
        let prev = row[(k - 1) as usize];
        row.push(prev * (n as i128 - k as i128 + 1) / k as i128);
    }
    row
}

/// K = Q_p(zeta_{p^m}) (n = 1) or Q_p(zeta_{p^m}){{t1}} (n = 2), with the
/// coefficient ring W(F_{p^f}) at the given working precision.
pub fn cyclotomic_spec(p: u64, m: u32, arity: u8, f: usize, prec: u32) -> Result<Arc<FieldSpec>> {
    if p == 2 {
        return Err(CoreError::BadPrime(2));
    }
    assert!(m >= 1 && (arity == 1 || arity == 2) && f >= 1);
    let ring = make_ring(p, f, prec)?;
    // ((1+X)^{p^m} - 1) / ((1+X)^{p^{m-1}} - 1): binomial rows, exact division.
    let num: Vec<i128> = binomial_row(p.pow(m)).into_iter().skip(1).collect();
    let den: Vec<i128> = binomial_row(p.pow(m - 1)).into_iter().skip(1).collect();
    // num(X)/X divided by den(X)/X as polynomials (ascending coefficients).
    let mut rem = num;
    let e = rem.len() - den.len();
    let mut quot = vec![0i128; e + 1];
    for d in (0..=e).rev() {
        let c = rem[d + den.len() - 1] / den[den.len() - 1];
        quot[d] = c;
        for (i, dc) in den.iter().enumerate() {
            rem[d + i] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    debug_assert_eq!(quot[0], p as i128);
    debug_assert_eq!(quot[e], 1);
    debug_assert_eq!(e as u64, p.pow(m - 1) * (p - 1));
    Ok(Arc::new(FieldSpec {
        p,
        m,
        arity,
        f,
        ring,
        minpoly: quot,
        e,
    }))
}

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn arity(&self) -> u8 {
        self.arity
    }
    pub fn residue_degree(&self) -> usize {
        self.f
    }
    pub fn ring(&self) -> &Arc<WittRingSpec> {
        &self.ring
    }
    pub fn ramification(&self) -> usize {
        self.e
    }
    pub fn minpoly(&self) -> &[i128] {
        &self.minpoly
    }
    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }
    /// v(p) as an exponent tuple: (e) for n = 1, (0, e) for n = 2.
    pub fn e_vec(&self) -> Exp {
        if self.arity == 1 {
            Exp([self.e as i64, 0])
        } else {
            Exp([0, self.e as i64])
        }
    }
    /// Axis of the cyclotomic parameter pi in the series model.
    pub fn pi_axis(&self) -> usize {
        self.arity as usize - 1
    }

    /// The same field at a different working precision.
    pub fn at_precision(self: &Arc<Self>, prec: u32) -> Result<Arc<FieldSpec>> {
        if prec == self.precision() {
            return Ok(self.clone());
        }
        cyclotomic_spec(self.p, self.m, self.arity, self.f, prec)
    }

    /// The series s = (1 + X)^{p^m} - 1 in the pi-variable.
    pub fn s_series(&self, prec: u32) -> IterSeries {
        let axis = self.pi_axis();
        let row = binomial_row(self.p.pow(self.m));
        let terms = row.into_iter().enumerate().skip(1).map(|(k, c)| {
            let mut e = Exp::zero();
            e.0[axis] = k as i64;
            (e, WittElement::from_int(&self.ring, c))
        });
        IterSeries::from_terms(&self.ring, self.arity, prec.min(self.precision()), terms)
    }

    /// The minimal polynomial as an exact series in the pi-variable.
    pub fn minpoly_series(&self, prec: u32) -> IterSeries {
        let axis = self.pi_axis();
        let terms = self.minpoly.iter().enumerate().map(|(k, &c)| {
            let mut e = Exp::zero();
            e.0[axis] = k as i64;
            (e, WittElement::from_int(&self.ring, c))
        });
        IterSeries::from_terms(&self.ring, self.arity, prec.min(self.precision()), terms)
    }
}

// ---------------------------------------------------------------------------
// Elements.
// ---------------------------------------------------------------------------

type EPoly = Vec<WittElement>;

/// An element t1^{shift[0]} * pi^{shift[1]} * sum_j c_j(pi) t1^j with each
/// c_j a polynomial in pi reduced to degree < e. Arity 1 uses the single
/// key j = 0 and shift[0] = 0.
#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    shift: [i64; 2],
    parts: BTreeMap<i64, EPoly>,
    prec: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "Elt[shift={:?} prec={}; ", self.shift, self.prec)?;
        for (j, poly) in &self.parts {
            write!(fm, "t1^{}*(", j)?;
            for (d, c) in poly.iter().enumerate() {
                if !c.is_zero() {
                    write!(fm, "{:?} pi^{} + ", c, d)?;
                }
            }
            write!(fm, ") ")?;
        }
        write!(fm, "]")
    }
}

impl FieldElement {
    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        FieldElement {
            spec: spec.clone(),
            shift: [0, 0],
            parts: BTreeMap::new(),
            prec: spec.precision(),
        }
    }

    pub fn from_int(spec: &Arc<FieldSpec>, v: i128) -> Self {
        let mut parts = BTreeMap::new();
        let c = WittElement::from_int(spec.ring(), v);
        if !c.is_zero() {
            parts.insert(0, vec![c]);
        }
        FieldElement {
            spec: spec.clone(),
            shift: [0, 0],
            parts,
            prec: spec.precision(),
        }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        Self::from_int(spec, 1)
    }

    pub fn from_witt(spec: &Arc<FieldSpec>, c: WittElement) -> Self {
        let mut el = Self::zero(spec);
        if !c.is_zero() {
            el.parts.insert(0, vec![c]);
        }
        el
    }

    /// pi, as an element (shift in the pi-direction).
    pub fn pi(spec: &Arc<FieldSpec>) -> Self {
        let mut el = Self::one(spec);
        el.shift[1] = 1;
        el
    }

    /// zeta = 1 + pi.
    pub fn zeta(spec: &Arc<FieldSpec>) -> Self {
        let one = WittElement::one(spec.ring());
        let mut parts = BTreeMap::new();
        parts.insert(0, vec![one.clone(), one]);
        let mut el = FieldElement {
            spec: spec.clone(),
            shift: [0, 0],
            parts,
            prec: spec.precision(),
        };
        el.normalize();
        el
    }

    /// t1 (arity 2 only).
    pub fn t1(spec: &Arc<FieldSpec>) -> Self {
        assert_eq!(spec.arity(), 2, "t1 exists in the two-dimensional model");
        let mut el = Self::one(spec);
        el.shift[0] = 1;
        el
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn shift(&self) -> [i64; 2] {
        self.shift
    }
    pub fn parts(&self) -> &BTreeMap<i64, EPoly> {
        &self.parts
    }

    fn normalize(&mut self) {
        let e = self.spec.e;
        let prec = self.prec;
        let ring = self.spec.ring().clone();
        let minpoly = &self.spec.minpoly;
        let mut new_parts = BTreeMap::new();
        for (j, mut poly) in std::mem::take(&mut self.parts) {
            // reduce degrees >= e via pi^e = -(a_{e-1} pi^{e-1} + ... + a_0)
            let mut d = poly.len();
            while d > e {
                d -= 1;
                let c = poly[d].clone();
                if c.is_zero() {
                    poly.truncate(d);
                    continue;
                }
                poly.truncate(d);
                for i in 0..e {
                    let sub = c.mul_int(minpoly[i]);
                    let idx = d - e + i;
                    while poly.len() <= idx {
                        poly.push(WittElement::zero(&ring));
                    }
                    poly[idx] = poly[idx].sub(&sub);
                }
                d = poly.len();
            }
            for c in poly.iter_mut() {
                *c = c.reduce_mod(prec);
            }
            while poly.last().map(|c| c.is_zero()) == Some(true) {
                poly.pop();
            }
            if !poly.is_empty() {
                new_parts.insert(j, poly);
            }
        }
        self.parts = new_parts;
        if self.parts.is_empty() {
            self.shift = [0, 0];
        }
        if self.spec.arity() == 1 {
            assert!(self.shift[0] == 0 && self.parts.keys().all(|&j| j == 0));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    fn same_spec(&self, other: &Self) {
        assert!(self.spec == other.spec, "elements of different fields");
    }

    /// Multiply by t1^a pi^b (exact, any sign).
    pub fn shift_by(&self, a: i64, b: i64) -> Self {
        let mut el = self.clone();
        el.shift[0] += a;
        el.shift[1] += b;
        if el.spec.arity() == 1 {
            // the single parameter is pi; fold any t1-shift request
            assert_eq!(a, 0);
        }
        el
    }

    /// Raise the representation so both elements share a common shift
    /// (multiplying parts up by parameter powers is exact).
    fn with_shift(&self, target: [i64; 2]) -> Self {
        assert!(target[0] <= self.shift[0] && target[1] <= self.shift[1]);
        let dt1 = (self.shift[0] - target[0]) as usize;
        let dpi = (self.shift[1] - target[1]) as usize;
        let ring = self.spec.ring().clone();
        let mut parts = BTreeMap::new();
        for (j, poly) in &self.parts {
            let mut lifted = vec![WittElement::zero(&ring); dpi];
            lifted.extend(poly.iter().cloned());
            parts.insert(j + dt1 as i64, lifted);
        }
        let mut el = FieldElement {
            spec: self.spec.clone(),
            shift: target,
            parts,
            prec: self.prec,
        };
        el.normalize();
        el
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_spec(other);
        if self.is_zero() {
            let mut o = other.clone();
            o.prec = o.prec.min(self.prec);
            o.normalize();
            return o;
        }
        if other.is_zero() {
            let mut s = self.clone();
            s.prec = s.prec.min(other.prec);
            s.normalize();
            return s;
        }
        let target = [
            self.shift[0].min(other.shift[0]),
            self.shift[1].min(other.shift[1]),
        ];
        let a = self.with_shift(target);
        let b = other.with_shift(target);
        let ring = self.spec.ring().clone();
        let mut parts = a.parts;
        for (j, poly) in b.parts {
            let entry = parts.entry(j).or_default();
            for (d, c) in poly.into_iter().enumerate() {
                while entry.len() <= d {
                    entry.push(WittElement::zero(&ring));
                }
                entry[d] = entry[d].add(&c);
            }
        }
        let mut el = FieldElement {
            spec: self.spec.clone(),
            shift: target,
            parts,
            prec: self.prec.min(other.prec),
        };
        el.normalize();
        el
    }

    pub fn neg(&self) -> Self {
        let mut el = self.clone();
        for poly in el.parts.values_mut() {
            for c in poly.iter_mut() {
                *c = c.neg();
            }
        }
        el
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_spec(other);
        let ring = self.spec.ring().clone();
        let mut parts: BTreeMap<i64, EPoly> = BTreeMap::new();
        for (j1, p1) in &self.parts {
            for (j2, p2) in &other.parts {
                let j = j1 + j2;
                let entry = parts.entry(j).or_default();
                for (d1, c1) in p1.iter().enumerate() {
                    if c1.is_zero() {
                        continue;
                    }
                    for (d2, c2) in p2.iter().enumerate() {
                        let d = d1 + d2;
                        while entry.len() <= d {
                            entry.push(WittElement::zero(&ring));
                        }
                        entry[d] = entry[d].add(&c1.mul(c2));
                    }
                }
            }
        }
        let mut el = FieldElement {
            spec: self.spec.clone(),
            shift: [
                self.shift[0] + other.shift[0],
                self.shift[1] + other.shift[1],
            ],
            parts,
            prec: self.prec.min(other.prec),
        };
        el.normalize();
        el
    }

    pub fn mul_int(&self, v: i128) -> Self {
        let mut el = self.clone();
        for poly in el.parts.values_mut() {
            for c in poly.iter_mut() {
                *c = c.mul_int(v);
            }
        }
        el.normalize();
        el
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// pi-adic valuation of a reduced polynomial: min over digits d of
    /// d + e * v_p(coefficient); None for (effectively) zero.
    fn poly_valuation(&self, poly: &EPoly) -> Option<i64> {
        let e = self.spec.e as i64;
        let mut best: Option<i64> = None;
        for (d, c) in poly.iter().enumerate() {
            let vp = c.reduce_mod(self.prec).valuation().min(self.prec);
            if vp >= self.prec {
                continue;
            }
            let v = d as i64 + e * vp as i64;
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        best
    }

    /// The rank-n valuation as an exponent tuple in the series convention:
    /// (v_pi) on axis 0 for n = 1, (v_t1, v_pi) for n = 2.
    pub fn valuation(&self) -> Result<Exp> {
        if self.is_zero() {
            return Err(CoreError::ZeroElement);
        }
        let mut best: Option<Exp> = None;
        for (j, poly) in &self.parts {
            if let Some(vpi) = self.poly_valuation(poly) {
                let cand = if self.spec.arity() == 1 {
                    Exp([vpi + self.shift[1], 0])
                } else {
                    Exp([j + self.shift[0], vpi + self.shift[1]])
                };
                best = Some(match best {
                    Some(b) if b <= cand => b,
                    _ => cand,
                });
            }
        }
        best.ok_or(CoreError::ZeroElement)
    }

    /// Exact division of one reduced polynomial by pi, assuming v >= 1:
    /// the constant digit is divisible by p and p/pi is integral.
    fn poly_div_pi(&self, poly: &EPoly) -> Result<EPoly> {
        let ring = self.spec.ring().clone();
        let e = self.spec.e;
        let mut out: EPoly = poly.iter().skip(1).cloned().collect();
        let c0 = poly.first().cloned().unwrap_or_else(|| WittElement::zero(&ring));
        if !c0.is_zero() {
            let w = c0.div_p_exact()?;
            // c0/pi = -(c0/p)(pi^{e-1} + a_{e-1} pi^{e-2} + ... + a_1)
            while out.len() < e {
                out.push(WittElement::zero(&ring));
            }
            for i in 1..=e {
                let coeff = if i == e { 1i128 } else { self.spec.minpoly[i] };
                out[i - 1] = out[i - 1].sub(&w.mul_int(coeff));
            }
        }
        Ok(out)
    }

    /// Public wrapper for exact pi-division of the parts.
    pub fn divide_parts_by_pi(&self, k: u32) -> Result<Self> {
        self.parts_div_pi(k)
    }

    /// Divide the whole element by pi^k without touching the shift
    /// (requires every part to have pi-valuation >= k). Costs one unit of
    /// precision per division step.
    fn parts_div_pi(&self, k: u32) -> Result<Self> {
        let mut el = self.clone();
        for _ in 0..k {
            let mut parts = BTreeMap::new();
            for (j, poly) in &el.parts {
                parts.insert(*j, el.poly_div_pi(poly)?);
            }
            el.parts = parts;
            el.prec = el.prec.saturating_sub(1);
            if el.prec == 0 {
                return Err(CoreError::NonIntegral(1));
            }
            el.normalize();
        }
        Ok(el)
    }

    /// Write the element as t^V * unit, extracting the full valuation into
    /// the shift. Errs on zero.
    pub fn to_unit_form(&self) -> Result<(Exp, Self)> {
        let v = self.valuation()?;
        let (vt1, vpi) = if self.spec.arity() == 1 {
            (0i64, v.0[0])
        } else {
            (v.0[0], v.0[1])
        };
        let dpi = vpi - self.shift[1];
        assert!(dpi >= 0, "valuation below the stored shift");
        let mut unit = self.parts_div_pi(dpi as u32)?;
        // move the t1 part of the valuation into the keys
        let dt1 = vt1 - self.shift[0];
        if dt1 != 0 {
            unit.parts = unit
                .parts
                .into_iter()
                .map(|(j, poly)| (j - dt1, poly))
                .collect();
        }
        unit.shift = [0, 0];
        Ok((v, unit))
    }

    /// Residue of a unit: the constant digit mod p.
    pub fn residue(&self) -> Result<WittElement> {
        let (_, unit) = self.to_unit_form()?;
        let c0 = unit
            .parts
            .get(&0)
            .and_then(|poly| poly.first())
            .cloned()
            .unwrap_or_else(|| WittElement::zero(self.spec.ring()));
        Ok(c0.reduce_mod(1))
    }

    /// Inverse in K. For arity 2 only monomial-times-unit shapes are
    /// invertible in the finite model.
    pub fn invert(&self) -> Result<Self> {
        let (v, unit) = self.to_unit_form()?;
        if self.spec.arity() == 2 {
            let keys: Vec<i64> = unit.parts.keys().cloned().collect();
            if keys.iter().any(|&j| j < 0) || keys.first() != Some(&0) {
                return Err(CoreError::NotInvertible);
            }
            if keys.len() > 1 {
                // A finite sum with several t1-monomials has no finite
                // inverse; geometric expansion in t1 stays in series land.
                return Err(CoreError::NotInvertible);
            }
        }
        // Newton: z <- z(2 - u z) from the residue inverse; (p, pi)-adic
        // convergence doubles each step.
        let ring = self.spec.ring().clone();
        let c0 = unit
            .parts
            .get(&0)
            .and_then(|poly| poly.first())
            .cloned()
            .unwrap_or_else(|| WittElement::zero(&ring));
        let z0 = c0.invert().map_err(|_| CoreError::NotInvertible)?;
        let mut z = Self::from_witt(&self.spec, z0);
        let two = Self::from_int(&self.spec, 2);
        let bits = 64 - ((self.prec as u64 * self.spec.e as u64 + 2).leading_zeros() as u64) + 1;
        for _ in 0..bits {
            let uz = unit.mul(&z);
            z = z.mul(&two.sub(&uz));
        }
        debug_assert!(unit.mul(&z).equals(&Self::one(&self.spec)));
        let (vt1, vpi) = if self.spec.arity() == 1 {
            (0, v.0[0])
        } else {
            (v.0[0], v.0[1])
        };
        Ok(z.shift_by(-vt1, -vpi))
    }

    pub fn pow(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 { self.invert()? } else { self.clone() };
        let mut acc = Self::one(&self.spec);
        let mut b = base;
        let mut k = exp.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Level and graded digit of a nonzero element (n = 1): the valuation
    /// v and the residue of x / pi^v. Since v = d + e k with d < e, the
    /// digit is read off one coefficient without any pi-division.
    pub fn leading_level_digit(&self) -> Result<(i64, WittElement)> {
        assert_eq!(self.spec.arity(), 1);
        let v = self.valuation()?;
        let e = self.spec.e as i64;
        let r = v.0[0] - self.shift[1];
        let d = r.rem_euclid(e) as usize;
        let k = (r - d as i64) / e;
        let c = self.parts[&0][d].reduce_mod(self.prec);
        let mut digit = c;
        for _ in 0..k {
            digit = digit.div_p_exact()?;
        }
        // the digit also picks up the residue of (p / pi^e)^k = (-u_p)^k;
        // p = -(pi^e + ... ) makes that unit -1 mod pi for Eisenstein
        // minpoly with p-divisible middle coefficients, so the sign is
        // (-1)^k... but the coefficient c belongs to pi^d p^k = pi^d (pi^e u_p)^k,
        // i.e. x = c pi^d p^k / p^k: the digit of x/pi^v is c/p^k times
        // (p/pi^e)^k with p/pi^e = -1 mod pi.
        if k % 2 == 1 {
            digit = digit.neg();
        }
        Ok((v.0[0], digit.reduce_mod(1)))
    }

    /// Cap the precision tag (coefficients re-reduced).
    pub fn cap_prec(&self, prec: u32) -> Self {
        let mut el = self.clone();
        el.prec = el.prec.min(prec);
        el.normalize();
        el
    }

    /// Move to a spec at a different precision (coefficients re-embedded).
    pub fn retarget(&self, spec: &Arc<FieldSpec>) -> Self {
        assert!(
            spec.p() == self.spec.p()
                && spec.m() == self.spec.m()
                && spec.arity() == self.spec.arity()
                && spec.residue_degree() == self.spec.residue_degree()
        );
        let ring = spec.ring().clone();
        let parts = self
            .parts
            .iter()
            .map(|(j, poly)| {
                (
                    *j,
                    poly.iter()
                        .map(|c| WittElement::from_coords(&ring, c.coords().to_vec()))
                        .collect(),
                )
            })
            .collect();
        let mut el = FieldElement {
            spec: spec.clone(),
            shift: self.shift,
            parts,
            prec: self.prec.min(spec.precision()),
        };
        el.normalize();
        el
    }
}

// ---------------------------------------------------------------------------
// Lifts.
// ---------------------------------------------------------------------------

/// The canonical series lift theta X^V (1 + psi): substitute X_i for t_i in
/// the normalized expansion, with p-divisible non-positive monomials pushed
/// into positive order through p = -(X^e + ... + a_1 X). Evaluating the
/// result at pi recovers the element exactly.
pub fn lift_element(x: &FieldElement) -> Result<IterSeries> {
    let spec = x.spec().clone();
    let ring = spec.ring().clone();
    let n = spec.arity();
    let (v, unit) = x.to_unit_form()?;
    let theta = {
        let c0 = unit
            .parts
            .get(&0)
            .and_then(|poly| poly.first())
            .cloned()
            .unwrap_or_else(|| WittElement::zero(&ring));
        let p = ring.p();
        let residue: Vec<u64> = c0.coords().iter().map(|&c| c % p).collect();
        teichmuller(&ring, &residue)
    };
    if theta.is_zero() {
        return Err(CoreError::ZeroElement);
    }
    let theta_inv = theta.invert()?;
    let prec = unit.prec();

    // psi-term collection: (t1-degree, pi-degree) -> coefficient.
    let mut terms: BTreeMap<Exp, WittElement> = BTreeMap::new();
    for (j, poly) in unit.parts() {
        for (d, c) in poly.iter().enumerate() {
            let e = if n == 1 {
                Exp([d as i64, 0])
            } else {
                Exp([*j, d as i64])
            };
            let mut val = c.mul(&theta_inv);
            if e == Exp::zero() {
                val = val.sub(&WittElement::one(&ring));
            }
            if !val.is_zero() {
                terms.insert(e, val);
            }
        }
    }
    // Push non-positive monomials (their coefficients are p-divisible for a
    // normalized unit) up into the pi-direction.
    let pi_axis = spec.pi_axis();
    let offenders: Vec<Exp> = terms
        .keys()
        .filter(|e| !e.is_positive())
        .cloned()
        .collect();
    for off in offenders {
        let c = terms.remove(&off).unwrap();
        let w = c.div_p_exact().map_err(|_| {
            CoreError::NotUnitShaped("non-positive monomial with unit coefficient".into())
        })?;
        for i in 1..=spec.ramification() {
            let coeff = if i == spec.ramification() {
                1i128
            } else {
                spec.minpoly()[i]
            };
            let mut e = off;
            e.0[pi_axis] += i as i64;
            let add = w.mul_int(coeff).neg();
            let prev = terms.remove(&e).unwrap_or_else(|| WittElement::zero(&ring));
            let merged = prev.add(&add);
            if !merged.is_zero() {
                terms.insert(e, merged);
            }
        }
    }
    let mut all = vec![(Exp::zero(), WittElement::one(&ring))];
    all.extend(terms);
    let psi_plus_one = IterSeries::from_terms(&ring, n, prec, all);
    let lift = psi_plus_one
        .scale(&theta)
        .shift(&if n == 1 { Exp([v.0[0], 0]) } else { v });
    Ok(lift)
}

/// A perturbed lift: lift(x) + r(X) * minpoly(X) for the supplied integral
/// perturbation r. Evaluates to the same element; exercises well-definedness.
pub fn relift_perturbed(x: &FieldElement, perturbation: &IterSeries) -> Result<IterSeries> {
    assert_eq!(x.spec().arity(), 1, "perturbed lifts are one-dimensional");
    let base = lift_element(x)?;
    let m = x.spec().minpoly_series(base.prec());
    Ok(base.add(&perturbation.mul(&m)))
}

/// Evaluate a series at the local parameters: X_i -> t_i, reduced in K.
pub fn eval_series(spec: &Arc<FieldSpec>, s: &IterSeries) -> FieldElement {
    let n = spec.arity();
    let mut shift_min = [0i64; 2];
    for (e, _) in s.terms() {
        shift_min[0] = shift_min[0].min(e.0[0]);
        shift_min[1] = shift_min[1].min(e.0[1]);
    }
    let ring = spec.ring().clone();
    let mut parts: BTreeMap<i64, EPoly> = BTreeMap::new();
    for (e, c) in s.terms() {
        let (j, d) = if n == 1 {
            (0i64, (e.0[0] - shift_min[0]) as usize)
        } else {
            (e.0[0] - shift_min[0], (e.0[1] - shift_min[1]) as usize)
        };
        let entry = parts.entry(j).or_default();
        while entry.len() <= d {
            entry.push(WittElement::zero(&ring));
        }
        entry[d] = entry[d].add(c);
    }
    let shift = if n == 1 {
        [0, shift_min[0]]
    } else {
        [shift_min[0], shift_min[1]]
    };
    let mut el = FieldElement {
        spec: spec.clone(),
        shift,
        parts,
        prec: s.prec().min(spec.precision()),
    };
    el.normalize();
    el
}

// ---------------------------------------------------------------------------
// Trace and logarithm (arity 1).
// ---------------------------------------------------------------------------

/// Trace of multiplication by x on the power basis 1, pi, ..., pi^{e-1},
/// computed as a matrix trace. Requires n = 1, f = 1 and an integral x.
pub fn field_trace(x: &FieldElement) -> Result<u64> {
    let spec = x.spec().clone();
    if spec.arity() != 1 || spec.residue_degree() != 1 {
        return Err(CoreError::Unsupported(
            "trace oracle needs n = 1, f = 1".into(),
        ));
    }
    if x.is_zero() {
        return Ok(0);
    }
    if x.shift[1] < 0 {
        return Err(CoreError::Precondition("trace of a non-integral element".into()));
    }
    let x0 = x.with_shift([0, 0]);
    let ring = spec.ring().clone();
    let mut acc = WittElement::zero(&ring);
    let mut basis = FieldElement::one(&spec);
    let pi = FieldElement::pi(&spec).with_shift([0, 0]);
    for d in 0..spec.ramification() {
        let prod = x0.mul(&basis);
        // fold any shift back into the parts to read the pi^d digit
        let flat = prod.with_shift([0, 0]);
        let digit = flat
            .parts
            .get(&0)
            .and_then(|poly| poly.get(d))
            .cloned()
            .unwrap_or_else(|| WittElement::zero(&ring));
        acc = acc.add(&digit);
        basis = basis.mul(&pi);
    }
    Ok(acc.coords()[0])
}

/// log of a principal unit, as (p^D * log u, D) with the first component
/// integral; the denominators from p | k are carried globally.
pub fn field_log(u: &FieldElement) -> Result<(FieldElement, u32)> {
    let spec = u.spec().clone();
    if spec.arity() != 1 {
        return Err(CoreError::Unsupported("log oracle needs n = 1".into()));
    }
    let one = FieldElement::one(&spec);
    let x = u.sub(&one);
    if x.is_zero() {
        return Ok((FieldElement::zero(&spec), 0));
    }
    let v = x.valuation()?;
    if v.0[0] < 1 {
        return Err(CoreError::Precondition("log of a non-principal unit".into()));
    }
    let prec = u.prec();
    let e = spec.ramification() as u32;
    let p = spec.p();
    let k_max: u32 = e * (prec + 6) + 8;
    let mut dexp = 0u32;
    while p.pow(dexp + 1) <= k_max as u64 {
        dexp += 1;
    }
    let pn = spec.ring().scalar_modulus();
    let mut acc = FieldElement::zero(&spec);
    let mut power = one.clone();
    for k in 1..=k_max {
        power = power.mul(&x);
        if power.is_zero() {
            break;
        }
        let mut vk = 0u32;
        let mut ku = k as u64;
        while ku % p == 0 {
            vk += 1;
            ku /= p;
        }
        let inv = crate::witt::inv_mod(ku, pn).expect("unit part of k");
        let scalar = (spec.ring().p_pow(dexp - vk) as i128 * inv as i128) % pn as i128;
        let signed = if k % 2 == 1 { scalar } else { -scalar };
        acc = acc.add(&power.mul_int(signed));
    }
    Ok((acc, dexp))
}

// ---------------------------------------------------------------------------
// Expression parsing.
// ---------------------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    spec: Arc<FieldSpec>,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> CoreError {
        CoreError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn parse_int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let mut neg = false;
        if self.bytes.get(self.pos) == Some(&b'-') {
            neg = true;
            self.pos += 1;
        }
        let ds = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == ds {
            self.pos = start;
            return Err(self.err("expected an integer"));
        }
        let text = std::str::from_utf8(&self.bytes[ds..self.pos]).unwrap();
        let v: i64 = text.parse().map_err(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn parse_expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.parse_term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.parse_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<FieldElement> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.parse_factor()?);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<FieldElement> {
        let atom = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.parse_int()?;
            return atom.pow(e);
        }
        Ok(atom)
    }

    fn parse_atom(&mut self) -> Result<FieldElement> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.parse_atom()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.parse_int()?;
                Ok(FieldElement::from_int(&self.spec, v as i128))
            }
            Some(b'T') => {
                self.pos += 1;
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after T"));
                }
                self.pos += 1;
                let v = self.parse_int()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                let ring = self.spec.ring().clone();
                let p = ring.p();
                let mut digits = vec![];
                let mut k = v.rem_euclid(ring.q() as i64) as u64;
                for _ in 0..ring.residue_degree() {
                    digits.push(k % p);
                    k /= p;
                }
                Ok(FieldElement::from_witt(
                    &self.spec,
                    teichmuller(&ring, &digits),
                ))
            }
            Some(b'p') => {
                // 'p' or 'pi'
                if self.bytes[self.pos..].starts_with(b"pi") {
                    self.pos += 2;
                    Ok(FieldElement::pi(&self.spec))
                } else {
                    self.pos += 1;
                    Ok(FieldElement::from_int(&self.spec, self.spec.p() as i128))
                }
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(FieldElement::zeta(&self.spec))
            }
            Some(b't') => {
                if self.bytes[self.pos..].starts_with(b"t1") {
                    self.pos += 2;
                    if self.spec.arity() == 1 {
                        // n = 1: t1 is the single parameter pi
                        Ok(FieldElement::pi(&self.spec))
                    } else {
                        Ok(FieldElement::t1(&self.spec))
                    }
                } else if self.bytes[self.pos..].starts_with(b"t2") {
                    self.pos += 2;
                    if self.spec.arity() != 2 {
                        return Err(self.err("t2 requires the two-dimensional model"));
                    }
                    Ok(FieldElement::pi(&self.spec))
                } else {
                    Err(self.err("unknown identifier"))
                }
            }
            _ => Err(self.err("expected an atom")),
        }
    }
}

/// Parse an element expression: integers, `p`, `z`, `pi`, `t1`, `t2`,
/// `T(<int>)`, operators + - * ^ ( ), whitespace insignificant.
pub fn parse_element(text: &str, spec: &Arc<FieldSpec>) -> Result<FieldElement> {
    let mut parser = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        spec: spec.clone(),
    };
    let el = parser.parse_expr()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(parser.err("trailing input"));
    }
    Ok(el)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec31() -> Arc<FieldSpec> {
        cyclotomic_spec(3, 1, 1, 1, 8).unwrap()
    }

    #[test]
    fn cyclotomic_spec_examples() {
        let s = spec31();
        assert_eq!(s.minpoly(), &[3, 3, 1]); // X^2 + 3X + 3
        assert_eq!(s.ramification(), 2);
        assert_eq!(s.e_vec(), Exp([2, 0]));

        let s = cyclotomic_spec(3, 2, 1, 1, 6).unwrap();
        assert_eq!(s.ramification(), 6);
        // Phi_9(1+X) = X^6 + 9X^5 + 33X^4 + 63X^3 + 66X^2 + 36X + 9? No:
        // computed exactly below instead; Eisenstein with constant p.
        assert_eq!(s.minpoly()[0], 3);
        assert_eq!(*s.minpoly().last().unwrap(), 1);
        assert!(s.minpoly()[1..6].iter().all(|c| c % 3 == 0));

        let s2 = cyclotomic_spec(3, 1, 2, 1, 6).unwrap();
        assert_eq!(s2.e_vec(), Exp([0, 2]));
        assert!(cyclotomic_spec(2, 1, 1, 1, 4).is_err());
    }

    #[test]
    fn minpoly_m2_exact() {
        // (1+X)^9 - 1 divided by (1+X)^3 - 1, checked by multiplication.
        let s = cyclotomic_spec(3, 2, 1, 1, 6).unwrap();
        let q = s.minpoly();
        let den = [3i128, 3, 1];
        let mut prod = vec![0i128; 9];
        for (i, &a) in den.iter().enumerate() {
            for (j, &b) in q.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let num: Vec<i128> = binomial_row(9).into_iter().skip(1).collect();
        assert_eq!(prod, num);
    }

    #[test]
    fn parse_examples() {
        let s = spec31();
        let a = parse_element("1 - pi", &s).unwrap();
        let b = FieldElement::one(&s).sub(&FieldElement::pi(&s));
        assert!(a.equals(&b));

        let z = parse_element("z", &s).unwrap();
        assert!(z.equals(&FieldElement::one(&s).add(&FieldElement::pi(&s))));

        let s2 = cyclotomic_spec(3, 1, 2, 1, 8).unwrap();
        let el = parse_element("t1^2*(1+T(2)*pi)", &s2).unwrap();
        let theta = teichmuller(s2.ring(), &[2]);
        let manual = FieldElement::t1(&s2)
            .pow(2)
            .unwrap()
            .mul(&FieldElement::one(&s2).add(&FieldElement::from_witt(&s2, theta).mul(&FieldElement::pi(&s2))));
        assert!(el.equals(&manual));

        assert!(parse_element("t2", &s).is_err());
        assert!(parse_element("1 +", &s).is_err());
        assert!(parse_element("(1", &s).is_err());
        // z^3 = 1
        let z3 = parse_element("z^3", &s).unwrap();
        assert!(z3.equals(&FieldElement::one(&s)));
        // (1+pi)^-1 * (1+pi) = 1
        let u = parse_element("z^-1 * z", &s).unwrap();
        assert!(u.equals(&FieldElement::one(&s)));
        // pi^-1 has negative shift and pi^-1 * pi = 1
        let w = parse_element("pi^-1 * pi", &s).unwrap();
        assert!(w.equals(&FieldElement::one(&s)));
    }

    #[test]
    fn lift_examples() {
        let s = spec31();
        let one_minus_pi = parse_element("1-pi", &s).unwrap();
        let lift = lift_element(&one_minus_pi).unwrap();
        assert_eq!(lift.coeff(&Exp([0, 0])), WittElement::one(s.ring()));
        assert_eq!(
            lift.coeff(&Exp([1, 0])),
            WittElement::one(s.ring()).neg()
        );
        assert_eq!(lift.term_count(), 2);

        let zeta = parse_element("z", &s).unwrap();
        let lift = lift_element(&zeta).unwrap();
        assert_eq!(lift.coeff(&Exp([0, 0])), WittElement::one(s.ring()));
        assert_eq!(lift.coeff(&Exp([1, 0])), WittElement::one(s.ring()));
        assert_eq!(lift.term_count(), 2);

        // pi^2 + 3 pi + 3 reduces to zero: lifting errs
        let zero = parse_element("pi^2 + 3*pi + 3", &s).unwrap();
        assert!(zero.is_zero());
        assert!(lift_element(&zero).is_err());
    }

    #[test]
    fn lift_evaluate_round_trip() {
        let s = spec31();
        for text in [
            "1 - pi",
            "z",
            "pi",
            "2 + pi",
            "1 + 3*pi",
            "pi^2*(1+T(2)*pi)",
            "5 + 7*pi + 2*pi^2",
            "pi^-2*(1+pi)",
            "3 + pi^3",
        ] {
            let x = parse_element(text, &s).unwrap();
            let lift = lift_element(&x).unwrap();
            // shape: every psi-monomial strictly positive
            let mut seen_lead = false;
            for (e, c) in lift.terms() {
                if !seen_lead {
                    seen_lead = true;
                    assert!(c.is_unit(), "leading coefficient is Teichmuller");
                }
                let _ = e;
            }
            let back = eval_series(&s, &lift);
            assert!(
                back.equals(&x.retarget(&s).reduce_like(&back)),
                "round trip failed for {}: {:?} vs {:?}",
                text,
                back,
                x
            );
        }
    }

    impl FieldElement {
        /// test helper: cap precision to another element's tag
        fn reduce_like(&self, other: &FieldElement) -> FieldElement {
            let mut el = self.clone();
            el.prec = el.prec.min(other.prec);
            el.normalize();
            el
        }
    }

    #[test]
    fn relift_evaluates_to_same_element() {
        let s = spec31();
        let x = parse_element("1-pi", &s).unwrap();
        let pert = IterSeries::from_terms(
            s.ring(),
            1,
            8,
            [(Exp([0, 0]), WittElement::one(s.ring()))],
        );
        let lifted = relift_perturbed(&x, &pert).unwrap();
        // 1 - X + (X^2 + 3X + 3) = 4 + 2X + X^2
        assert_eq!(lifted.coeff(&Exp([0, 0])), WittElement::from_int(s.ring(), 4));
        assert_eq!(lifted.coeff(&Exp([1, 0])), WittElement::from_int(s.ring(), 2));
        assert_eq!(lifted.coeff(&Exp([2, 0])), WittElement::from_int(s.ring(), 1));
        let back = eval_series(&s, &lifted);
        assert!(back.equals(&x.reduce_like(&back)));
    }

    #[test]
    fn s_series_examples() {
        let s = spec31();
        let ss = s.s_series(4);
        // X^3 + 3X^2 + 3X
        assert_eq!(ss.coeff(&Exp([1, 0])), WittElement::from_int(s.ring(), 3));
        assert_eq!(ss.coeff(&Exp([2, 0])), WittElement::from_int(s.ring(), 3));
        assert_eq!(ss.coeff(&Exp([3, 0])), WittElement::from_int(s.ring(), 1));
        assert_eq!(ss.term_count(), 3);
        // reduction mod p is X^{p^m}
        for (e, c) in ss.terms() {
            if *e != Exp([3, 0]) {
                assert!(c.is_zero_mod(1));
            }
        }
        let s92 = cyclotomic_spec(3, 2, 1, 1, 4).unwrap();
        let ss = s92.s_series(4);
        assert_eq!(ss.coeff(&Exp([9, 0])), WittElement::one(s92.ring()));
        assert_eq!(ss.coeff(&Exp([1, 0])), WittElement::from_int(s92.ring(), 9));
    }

    #[test]
    fn trace_examples() {
        let s = spec31();
        assert_eq!(field_trace(&FieldElement::one(&s)).unwrap(), 2);
        let pn = s.ring().scalar_modulus();
        assert_eq!(field_trace(&FieldElement::pi(&s)).unwrap(), pn - 3);
        let pi2 = FieldElement::pi(&s).pow(2).unwrap();
        assert_eq!(field_trace(&pi2).unwrap(), 3);
        // additivity
        let a = parse_element("2+5*pi", &s).unwrap();
        let b = parse_element("1+7*pi+pi^2", &s).unwrap();
        let lhs = field_trace(&a.add(&b)).unwrap();
        let rhs = (field_trace(&a).unwrap() + field_trace(&b).unwrap()) % pn;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn newton_identities_small_powers() {
        // trace(pi^k) from Newton's identities on X^2 + 3X + 3: power sums
        // s_1 = -3, s_2 = s_1*(-3) - 2*3 = 3, s_k = -3 s_{k-1} - 3 s_{k-2}.
        let s = spec31();
        let pn = s.ring().scalar_modulus() as i128;
        let mut power_sums = vec![2i128, -3, 3];
        for k in 3..=4usize {
            let v = -3 * power_sums[k - 1] - 3 * power_sums[k - 2];
            power_sums.push(v);
        }
        for (k, expect) in power_sums.iter().enumerate() {
            let got = field_trace(&FieldElement::pi(&s).pow(k as i64).unwrap()).unwrap();
            assert_eq!(got as i128, expect.rem_euclid(pn), "k = {}", k);
        }
    }

    #[test]
    fn field_log_examples() {
        let s = spec31();
        let one = FieldElement::one(&s);
        let (l, _) = field_log(&one).unwrap();
        assert!(l.is_zero());

        // log(zeta) = 0: p^m log(zeta) = log(1) and K is torsion-free.
        let z = FieldElement::zeta(&s);
        let (l, _) = field_log(&z).unwrap();
        assert!(l.is_zero(), "log zeta = {:?}", l);

        // Tr(log(1-pi)) = -3 mod 9
        let u = parse_element("1-pi", &s).unwrap();
        let (sc, d) = field_log(&u).unwrap();
        let tr = field_trace(&sc).unwrap();
        let pn = s.ring().scalar_modulus();
        // tr = p^d * Tr(log(1-pi)); divide exactly
        let pd = s.ring().p_pow(d);
        assert_eq!(tr % pd, 0);
        let val = (tr / pd) % 9;
        assert_eq!(val, (pn - 3) % 9 % 9, "Tr log(1-pi) should be -3 mod 9");

        // additivity on principal units
        let a = parse_element("1-pi", &s).unwrap();
        let b = parse_element("1+pi+2*pi^2", &s).unwrap();
        let (la, da) = field_log(&a).unwrap();
        let (lb, db) = field_log(&b).unwrap();
        let (lab, dab) = field_log(&a.mul(&b)).unwrap();
        assert_eq!(da, db);
        assert_eq!(da, dab);
        let diff = lab.sub(&la.add(&lb));
        assert!(diff.is_zero(), "log not additive: {:?}", diff);

        assert!(field_log(&FieldElement::pi(&s)).is_err());
    }

    #[test]
    fn valuation_and_unit_form() {
        let s = spec31();
        let x = parse_element("3 + pi^2", &s).unwrap(); // = -3 pi
        assert_eq!(x.valuation().unwrap(), Exp([3, 0]));
        let (v, u) = x.to_unit_form().unwrap();
        assert_eq!(v, Exp([3, 0]));
        // unit should be zeta^{-1} = -2 - pi
        let expect = parse_element("z^-1", &s).unwrap();
        assert!(u.reduce_like(&u).sub(&expect.reduce_like(&u)).is_zero());

        // n = 2 tuple order: pi dominates t1
        let s2 = cyclotomic_spec(3, 1, 2, 1, 8).unwrap();
        let x = parse_element("t1^3*pi + t1^-1*pi^2", &s2).unwrap();
        assert_eq!(x.valuation().unwrap(), Exp([3, 1]));
        let y = parse_element("t1^2 + pi^5", &s2).unwrap();
        assert_eq!(y.valuation().unwrap(), Exp([2, 0]));
        // compatibility with multiplication of leading terms
        let prod = x.mul(&y).valuation().unwrap();
        assert_eq!(prod, Exp([5, 1]));
    }

    #[test]
    fn invert_field_elements() {
        let s = spec31();
        for text in ["z", "1+pi", "2+pi^3", "pi", "pi^2*(1+pi)", "3+pi"] {
            let x = parse_element(text, &s).unwrap();
            let inv = x.invert().unwrap();
            let prod = x.mul(&inv);
            // products through negative shifts can cost precision; compare
            // at the product's own tag
            assert!(
                prod.sub(&FieldElement::one(&s).reduce_like(&prod)).is_zero(),
                "inverse failed for {}",
                text
            );
        }
    }
}
