//! The truncated unramified coefficient ring W(F_q) mod p^N.
//!
//! Elements are stored in power-basis coordinates over a fixed monic modulus
//! whose reduction mod p is irreducible. The ring carries its Frobenius
//! (the unique automorphism lifting x -> x^p), Teichmuller lifts and the
//! trace down to Z/p^N. Everything is immutable after construction.

use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, Result};

/// Modular exponentiation with u128 intermediates.
fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` (not necessarily prime), when gcd(a, m) = 1.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Dense polynomial helpers over F_p, used only for modulus selection.
// ---------------------------------------------------------------------------

fn fp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p).expect("monic-or-unit leading coeff");
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = (r[dr] as u128 * lead_inv as u128 % p as u128) as u64;
        for i in 0..=dm {
            let sub = (c as u128 * m[i] as u128 % p as u128) as u64;
            r[dr - dm + i] = (r[dr - dm + i] + p - sub) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    fp_rem(&prod, m, p)
}

fn fp_powmod_x(e: u64, m: &[u64], p: u64) -> Vec<u64> {
    // X^e mod m
    let mut acc = vec![1u64];
    let mut base = fp_rem(&[0, 1], m, p);
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            acc = fp_mulmod(&acc, &base, m, p);
        }
        base = fp_mulmod(&base, &base, m, p);
        k >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility of a monic polynomial over F_p: X^{p^f} = X mod m, and
/// gcd(X^{p^{f/l}} - X, m) = 1 for every prime l | f.
fn fp_is_irreducible(m: &[u64], p: u64) -> bool {
    let f = (m.len() - 1) as u64;
    if f == 1 {
        return true;
    }
    let xq = fp_powmod_x(pow_checked(p, f as u32).unwrap_or(u64::MAX), m, p);
    // For desk-scale p and f, p^f fits comfortably; bail out otherwise.
    let mut xq_minus_x = xq.clone();
    while xq_minus_x.len() < 2 {
        xq_minus_x.push(0);
    }
    xq_minus_x[1] = (xq_minus_x[1] + p - 1) % p;
    fp_trim(&mut xq_minus_x);
    if !xq_minus_x.is_empty() {
        return false;
    }
    let mut ell = 2u64;
    let mut ff = f;
    let mut primes = vec![];
    while ell * ell <= ff {
        if ff % ell == 0 {
            primes.push(ell);
            while ff % ell == 0 {
                ff /= ell;
            }
        }
        ell += 1;
    }
    if ff > 1 {
        primes.push(ff);
    }
    for l in primes {
        let mut g = fp_powmod_x(pow_checked(p, (f / l) as u32).unwrap(), m, p);
        while g.len() < 2 {
            g.push(0);
        }
        g[1] = (g[1] + p - 1) % p;
        fp_trim(&mut g);
        let d = fp_gcd(m, &g, p);
        if d.len() != 1 {
            return false;
        }
    }
    true
}

fn pow_checked(p: u64, n: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

// ---------------------------------------------------------------------------
// The ring spec.
// ---------------------------------------------------------------------------

/// Description of O_0 = W(F_{p^f}) mod p^N: odd prime, residue degree,
/// precision exponent and a fixed monic modulus (deterministically chosen).
pub struct WittRingSpec {
    p: u64,
    f: usize,
    prec_exp: u32,
    pn: u64,
    /// Monic of degree f; coefficients in [0, p) lifted from the
    /// lexicographically smallest irreducible reduction.
    modulus: Vec<u64>,
    /// Coordinates of frobenius(y^i) for i = 0..f, where y is the generator.
    frob_images: Vec<Vec<u64>>,
}

impl fmt::Debug for WittRingSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            fm,
            "WittRingSpec(p={}, f={}, N={}, modulus={:?})",
            self.p, self.f, self.prec_exp, self.modulus
        )
    }
}

impl PartialEq for WittRingSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.f == other.f
            && self.prec_exp == other.prec_exp
            && self.modulus == other.modulus
    }
}
impl Eq for WittRingSpec {}

impl WittRingSpec {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn residue_degree(&self) -> usize {
        self.f
    }
    /// q = p^f, the size of the residue field.
    pub fn q(&self) -> u64 {
        pow_checked(self.p, self.f as u32).expect("q fits")
    }
    pub fn precision(&self) -> u32 {
        self.prec_exp
    }
    /// p^N, the scalar modulus.
    pub fn scalar_modulus(&self) -> u64 {
        self.pn
    }
    pub fn modulus_coeffs(&self) -> &[u64] {
        &self.modulus
    }

    /// p^k as a scalar, for k <= N.
    pub fn p_pow(&self, k: u32) -> u64 {
        pow_checked(self.p, k).expect("within precision")
    }
}

/// Construct the ring spec for (p, f, N). The modulus is the
/// lexicographically smallest monic irreducible of degree f over F_p
/// (constant coefficient least significant), lifted with coefficients in
/// [0, p). Rejects p = 2 and non-primes.
pub fn make_ring(p: u64, f: usize, prec_exp: u32) -> Result<Arc<WittRingSpec>> {
    if p == 2 || !is_prime(p) {
        return Err(CoreError::BadPrime(p));
    }
    assert!(f >= 1 && prec_exp >= 1, "f and N must be positive");
    let pn = pow_checked(p, prec_exp).ok_or(CoreError::PrecisionOverflow { p, n: prec_exp })?;
    // (p^N - 1)^2 must fit an u128 multiply: automatic for u64 inputs.

    // Deterministic modulus search: k enumerates the low coefficients in
    // base p, least-significant digit = constant term.
    let pf = pow_checked(p, f as u32).ok_or(CoreError::PrecisionOverflow { p, n: f as u32 })?;
    let mut modulus = None;
    for k in 0..pf {
        let mut coeffs = Vec::with_capacity(f + 1);
        let mut kk = k;
        for _ in 0..f {
            coeffs.push(kk % p);
            kk /= p;
        }
        coeffs.push(1);
        if fp_is_irreducible(&coeffs, p) {
            modulus = Some(coeffs);
            break;
        }
    }
    let modulus = modulus.ok_or(CoreError::NoModulus { p, f })?;

    let mut spec = WittRingSpec {
        p,
        f,
        prec_exp,
        pn,
        modulus,
        frob_images: vec![],
    };
    spec.frob_images = compute_frobenius_images(&spec);
    Ok(Arc::new(spec))
}

// Raw coordinate-vector arithmetic used during construction and by
// WittElement. Vectors have length f, entries reduced mod p^N.

fn raw_add(s: &WittRingSpec, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let v = x as u128 + y as u128;
            (v % s.pn as u128) as u64
        })
        .collect()
}

fn raw_sub(s: &WittRingSpec, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| ((x as u128 + s.pn as u128 - y as u128) % s.pn as u128) as u64)
        .collect()
}

fn raw_mul(s: &WittRingSpec, a: &[u64], b: &[u64]) -> Vec<u64> {
    let f = s.f;
    if f == 1 {
        return vec![((a[0] as u128 * b[0] as u128) % s.pn as u128) as u64];
    }
    let mut prod = vec![0u128; 2 * f - 1];
    for i in 0..f {
        if a[i] == 0 {
            continue;
        }
        for j in 0..f {
            prod[i + j] = (prod[i + j] + a[i] as u128 * b[j] as u128) % s.pn as u128;
        }
    }
    // Reduce by the monic modulus: y^f = -(m_{f-1} y^{f-1} + ... + m_0).
    for d in (f..2 * f - 1).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for i in 0..f {
            let sub = c * s.modulus[i] as u128 % s.pn as u128;
            prod[d - f + i] = (prod[d - f + i] + s.pn as u128 - sub) % s.pn as u128;
        }
    }
    prod[..f].iter().map(|&x| x as u64).collect()
}

fn raw_scalar_mul(s: &WittRingSpec, a: &[u64], c: u64) -> Vec<u64> {
    a.iter()
        .map(|&x| ((x as u128 * c as u128) % s.pn as u128) as u64)
        .collect()
}

fn raw_eval_poly(s: &WittRingSpec, poly: &[u64], at: &[u64]) -> Vec<u64> {
    // poly has scalar coefficients; Horner in the ring.
    let mut acc = vec![0u64; s.f];
    for &c in poly.iter().rev() {
        acc = raw_mul(s, &acc, at);
        acc[0] = ((acc[0] as u128 + c as u128) % s.pn as u128) as u64;
    }
    acc
}

fn raw_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&x| x == 0)
}

/// Invert a coordinate vector that is a unit (nonzero residue mod p):
/// mod-p inverse via Fermat in F_q, then Newton lifting x <- x(2 - ax).
fn raw_invert(s: &WittRingSpec, a: &[u64]) -> Option<Vec<u64>> {
    let p = s.p;
    let red: Vec<u64> = a.iter().map(|&x| x % p).collect();
    if raw_is_zero(&red) {
        return None;
    }
    // Inverse in F_q = F_p[y]/(m): b = red^(q-2).
    let q = s.q();
    let mut b = vec![0u64; s.f];
    b[0] = 1;
    {
        let mp: Vec<u64> = s.modulus.iter().map(|&c| c % p).collect();
        let mut base = red.clone();
        let mut e = q - 2;
        while e > 0 {
            if e & 1 == 1 {
                let t = fp_mulmod(&b, &base, &mp, p);
                b = t;
                b.resize(s.f, 0);
            }
            let t = fp_mulmod(&base, &base, &mp, p);
            base = t;
            base.resize(s.f, 0);
            e >>= 1;
        }
    }
    // Newton: doubles the p-adic precision each step.
    let steps = 64 - (s.prec_exp as u64).leading_zeros() + 1;
    for _ in 0..steps {
        let ab = raw_mul(s, a, &b);
        let mut two_minus = vec![0u64; s.f];
        two_minus[0] = 2 % s.pn;
        let tm = raw_sub(s, &two_minus, &ab);
        b = raw_mul(s, &b, &tm);
    }
    debug_assert!({
        let check = raw_mul(s, a, &b);
        check[0] == 1 % s.pn && check[1..].iter().all(|&x| x == 0)
    });
    Some(b)
}

/// Hensel-lift the p-power map on the generator: the image g of y under
/// Frobenius is the unique root of the modulus with g = y^p (mod p).
fn compute_frobenius_images(s: &WittRingSpec) -> Vec<Vec<u64>> {
    let f = s.f;
    let mut y = vec![0u64; f];
    if f == 1 {
        // Trivial extension: Frobenius is the identity on Z/p^N.
        return vec![vec![1 % s.pn]];
    }
    y[1] = 1;
    // g0 = y^p
    let mut g = {
        let mut acc = vec![0u64; f];
        acc[0] = 1;
        let mut base = y.clone();
        let mut e = s.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = raw_mul(s, &acc, &base);
            }
            base = raw_mul(s, &base, &base);
            e >>= 1;
        }
        acc
    };
    // Newton on M(g) with derivative M'(g), which is a unit by separability.
    let deriv: Vec<u64> = (1..=f)
        .map(|i| ((i as u128 * s.modulus[i] as u128) % s.pn as u128) as u64)
        .collect();
    let steps = 64 - (s.prec_exp as u64).leading_zeros() + 1;
    for _ in 0..steps {
        let mg = raw_eval_poly(s, &s.modulus, &g);
        if raw_is_zero(&mg) {
            break;
        }
        let dg = raw_eval_poly(s, &deriv, &g);
        let dg_inv = raw_invert(s, &dg).expect("separable modulus");
        let corr = raw_mul(s, &mg, &dg_inv);
        g = raw_sub(s, &g, &corr);
    }
    debug_assert!(raw_is_zero(&raw_eval_poly(s, &s.modulus, &g)));
    // Images of the power basis: g^0, g^1, ..., g^{f-1}.
    let mut images = Vec::with_capacity(f);
    let mut acc = vec![0u64; f];
    acc[0] = 1;
    images.push(acc.clone());
    for _ in 1..f {
        acc = raw_mul(s, &acc, &g);
        images.push(acc.clone());
    }
    images
}

// ---------------------------------------------------------------------------
// Elements.
// ---------------------------------------------------------------------------

/// An element of the coefficient ring, in power-basis coordinates reduced
/// to [0, p^N). Arithmetic is only defined between elements of the same
/// ring spec (asserted).
#[derive(Clone, PartialEq, Eq)]
pub struct WittElement {
    ring: Arc<WittRingSpec>,
    coords: Vec<u64>,
}

impl fmt::Debug for WittElement {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "W{:?}", self.coords)
    }
}

impl WittElement {
    pub fn from_coords(ring: &Arc<WittRingSpec>, mut coords: Vec<u64>) -> Self {
        coords.resize(ring.f, 0);
        for c in &mut coords {
            *c %= ring.pn;
        }
        WittElement {
            ring: ring.clone(),
            coords,
        }
    }

    pub fn from_int(ring: &Arc<WittRingSpec>, v: i128) -> Self {
        let r = v.rem_euclid(ring.pn as i128) as u64;
        let mut coords = vec![0u64; ring.f];
        coords[0] = r;
        WittElement {
            ring: ring.clone(),
            coords,
        }
    }

    pub fn zero(ring: &Arc<WittRingSpec>) -> Self {
        Self::from_int(ring, 0)
    }
    pub fn one(ring: &Arc<WittRingSpec>) -> Self {
        Self::from_int(ring, 1)
    }

    pub fn ring(&self) -> &Arc<WittRingSpec> {
        &self.ring
    }
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        raw_is_zero(&self.coords)
    }

    /// Zero test modulo p^k (k <= N).
    pub fn is_zero_mod(&self, k: u32) -> bool {
        let pk = self.ring.p_pow(k.min(self.ring.prec_exp));
        self.coords.iter().all(|&c| c % pk == 0)
    }

    fn same_ring(&self, other: &Self) {
        assert!(
            self.ring == other.ring,
            "arithmetic between different ring specs"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_ring(other);
        WittElement {
            ring: self.ring.clone(),
            coords: raw_add(&self.ring, &self.coords, &other.coords),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_ring(other);
        WittElement {
            ring: self.ring.clone(),
            coords: raw_sub(&self.ring, &self.coords, &other.coords),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_ring(other);
        WittElement {
            ring: self.ring.clone(),
            coords: raw_mul(&self.ring, &self.coords, &other.coords),
        }
    }

    pub fn neg(&self) -> Self {
        let z = Self::zero(&self.ring);
        z.sub(self)
    }

    pub fn mul_int(&self, c: i128) -> Self {
        let r = c.rem_euclid(self.ring.pn as i128) as u64;
        WittElement {
            ring: self.ring.clone(),
            coords: raw_scalar_mul(&self.ring, &self.coords, r),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// True when the element is a unit (nonzero residue).
    pub fn is_unit(&self) -> bool {
        self.coords.iter().any(|&c| c % self.ring.p != 0)
    }

    pub fn invert(&self) -> Result<Self> {
        let inv = raw_invert(&self.ring, &self.coords).ok_or(CoreError::NotAUnit)?;
        Ok(WittElement {
            ring: self.ring.clone(),
            coords: inv,
        })
    }

    /// Division by an integer k with p not dividing k.
    pub fn div_int_unit(&self, k: i128) -> Result<Self> {
        let m = self.ring.pn;
        let r = k.rem_euclid(m as i128) as u64;
        let inv = inv_mod(r, m).ok_or(CoreError::NotAUnit)?;
        Ok(WittElement {
            ring: self.ring.clone(),
            coords: raw_scalar_mul(&self.ring, &self.coords, inv),
        })
    }

    /// Exact division by p: requires every coordinate divisible by p.
    /// The caller is responsible for decrementing its precision tag.
    pub fn div_p_exact(&self) -> Result<Self> {
        let p = self.ring.p;
        if self.coords.iter().any(|&c| c % p != 0) {
            return Err(CoreError::NonIntegral(1));
        }
        Ok(WittElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|&c| c / p).collect(),
        })
    }

    /// p-adic valuation of the element, capped at the ring precision.
    pub fn valuation(&self) -> u32 {
        let p = self.ring.p;
        let mut v = 0;
        let mut coords = self.coords.clone();
        while v < self.ring.prec_exp {
            if coords.iter().any(|&c| c % p != 0) {
                return v;
            }
            for c in &mut coords {
                *c /= p;
            }
            v += 1;
        }
        self.ring.prec_exp
    }

    /// Reduce coordinates modulo p^k (canonical representative of the
    /// lower-precision class, still in this ring).
    pub fn reduce_mod(&self, k: u32) -> Self {
        let pk = self.ring.p_pow(k.min(self.ring.prec_exp));
        WittElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|&c| c % pk).collect(),
        }
    }

    /// Move the element into a ring of lower precision exponent.
    pub fn retract(&self, target: &Arc<WittRingSpec>) -> Self {
        assert!(
            target.p == self.ring.p
                && target.f == self.ring.f
                && target.prec_exp <= self.ring.prec_exp
        );
        WittElement::from_coords(target, self.coords.clone())
    }
}

/// The Frobenius automorphism: applies y -> frob(y) coordinate-wise using
/// the images precomputed at ring construction.
pub fn frobenius(x: &WittElement) -> WittElement {
    let s = x.ring();
    let mut acc = vec![0u64; s.f];
    for (i, img) in s.frob_images.iter().enumerate() {
        if x.coords[i] == 0 {
            continue;
        }
        let term = raw_scalar_mul(s, img, x.coords[i]);
        acc = raw_add(s, &acc, &term);
    }
    WittElement {
        ring: x.ring.clone(),
        coords: acc,
    }
}

/// Teichmuller lift of a residue-field element given by coordinates mod p:
/// iterate x -> x^q to the fixed point, which is reached within N steps.
pub fn teichmuller(ring: &Arc<WittRingSpec>, residue_coords: &[u64]) -> WittElement {
    let mut x = WittElement::from_coords(ring, residue_coords.to_vec());
    let q = ring.q();
    for _ in 0..=ring.prec_exp {
        let next = x.pow(q);
        if next == x {
            break;
        }
        x = next;
    }
    debug_assert_eq!(x.pow(ring.q()), x);
    x
}

/// Trace down to Z/p^N: the sum of the f Frobenius conjugates. The result
/// is a scalar; the higher coordinates vanish exactly.
pub fn trace_wzp(x: &WittElement) -> u64 {
    let mut acc = x.clone();
    let mut conj = x.clone();
    for _ in 1..x.ring().f {
        conj = frobenius(&conj);
        acc = acc.add(&conj);
    }
    debug_assert!(
        acc.coords[1..].iter().all(|&c| c == 0),
        "trace must land in Z/p^N"
    );
    acc.coords[0]
}
