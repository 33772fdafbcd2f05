//! Seeded random generation of field elements for the property suites.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldElement, FieldSpec};
use crate::witt::teichmuller;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// 1 + sum_{j=1}^{depth} c_j pi^j with small coefficients, nonzero tail.
    pub fn principal_unit(&mut self, spec: &Arc<FieldSpec>) -> FieldElement {
        let depth = spec.ramification() + 2;
        loop {
            let mut acc = FieldElement::one(spec);
            let cap = (spec.p() * spec.p()) as i128;
            let mut nonzero = false;
            for j in 1..=depth {
                let c = self.rng.gen_range(0..cap);
                if c != 0 {
                    nonzero = true;
                    let term = FieldElement::from_int(spec, c).shift_by(0, j as i64);
                    acc = acc.add(&term);
                }
            }
            if nonzero {
                return acc;
            }
        }
    }

    /// Teichmuller times principal.
    pub fn unit(&mut self, spec: &Arc<FieldSpec>) -> FieldElement {
        let q = spec.ring().q();
        let k = self.rng.gen_range(1..q);
        let mut digits = vec![0u64; spec.residue_degree()];
        let mut kk = k;
        for d in digits.iter_mut() {
            *d = kk % spec.p();
            kk /= spec.p();
        }
        let theta = teichmuller(spec.ring(), &digits);
        FieldElement::from_witt(spec, theta).mul(&self.principal_unit(spec))
    }

    /// pi^v times a unit, v in [-2, 2].
    pub fn element(&mut self, spec: &Arc<FieldSpec>) -> FieldElement {
        let v = self.rng.gen_range(-2..=2);
        self.unit(spec).shift_by(0, v)
    }

    /// A unit of the two-dimensional field with a handful of monomials of
    /// positive tuple order (keeps lifts and inverses desk-sized).
    pub fn unit_n2(&mut self, spec: &Arc<FieldSpec>) -> FieldElement {
        assert_eq!(spec.arity(), 2);
        let mut acc = FieldElement::one(spec);
        let terms = self.rng.gen_range(1..=3);
        for _ in 0..terms {
            let c = self.rng.gen_range(1..(spec.p() * spec.p()) as i128);
            let j2 = self.rng.gen_range(0..=2i64);
            let j1 = if j2 == 0 {
                self.rng.gen_range(1..=2i64)
            } else {
                self.rng.gen_range(-2..=2i64)
            };
            let term = FieldElement::from_int(spec, c).shift_by(j1, j2);
            acc = acc.add(&term);
        }
        // optional Teichmuller twist
        if self.rng.gen_bool(0.5) {
            let k = self.rng.gen_range(1..spec.ring().q());
            let theta = teichmuller(spec.ring(), &[k % spec.p()]);
            acc = acc.mul(&FieldElement::from_witt(spec, theta));
        }
        acc
    }

    /// t1^a pi^b times a unit, small exponents.
    pub fn element_n2(&mut self, spec: &Arc<FieldSpec>) -> FieldElement {
        let a = self.rng.gen_range(-1..=1);
        let b = self.rng.gen_range(-1..=1);
        self.unit_n2(spec).shift_by(a, b)
    }

    pub fn any_element(&mut self, spec: &Arc<FieldSpec>) -> FieldElement {
        if spec.arity() == 1 {
            self.element(spec)
        } else {
            self.element_n2(spec)
        }
    }

    /// alpha in Sen's validity domain: v(alpha - 1) >= 2e/(p-1).
    pub fn sen_alpha(&mut self, spec: &Arc<FieldSpec>) -> FieldElement {
        let threshold = (2 * spec.ramification() as i64).div_euclid(spec.p() as i64 - 1);
        loop {
            let mut acc = FieldElement::one(spec);
            let mut nonzero = false;
            for j in threshold..threshold + 4 {
                let c = self.rng.gen_range(0..(spec.p() * spec.p()) as i128);
                if c != 0 {
                    nonzero = true;
                    acc = acc.add(&FieldElement::from_int(spec, c).shift_by(0, j));
                }
            }
            if nonzero {
                return acc;
            }
        }
    }

    /// Integer perturbation data for relift tests: (exponent, coefficient).
    pub fn perturbation(&mut self, spec: &Arc<FieldSpec>) -> Vec<(i64, i128)> {
        let len = self.rng.gen_range(1..=3);
        (0..len)
            .map(|_| {
                (
                    self.rng.gen_range(0..=3i64),
                    self.rng.gen_range(1..(spec.p() * spec.p()) as i128),
                )
            })
            .collect()
    }
}
