use super::{root_of_unity, FieldElement, FieldError, MULTIPLICATIVE_GENERATOR};

/// A multiplicative coset `shift * <generator>` of power-of-two size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvaluationDomain {
    size: usize,
    log_size: u32,
    generator: FieldElement,
    shift: FieldElement,
}

impl EvaluationDomain {
    /// The subgroup of order `size`.
    pub fn new(size: usize) -> Result<Self, FieldError> {
        Self::coset(size, FieldElement::ONE)
    }

    pub fn coset(size: usize, shift: FieldElement) -> Result<Self, FieldError> {
        let generator = root_of_unity(size as u64)?;
        if shift.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(Self {
            size,
            log_size: size.trailing_zeros(),
            generator,
            shift,
        })
    }

    /// Coset shifted by the multiplicative generator, disjoint from every subgroup.
    pub fn lde(size: usize) -> Result<Self, FieldError> {
        Self::coset(size, MULTIPLICATIVE_GENERATOR)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn log_size(&self) -> u32 {
        self.log_size
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn shift(&self) -> FieldElement {
        self.shift
    }

    pub fn element(&self, index: usize) -> FieldElement {
        self.shift * self.generator.pow(index as u64)
    }

    pub fn elements(&self) -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(self.size);
        let mut x = self.shift;
        for _ in 0..self.size {
            out.push(x);
            x *= self.generator;
        }
        out
    }

    /// The vanishing polynomial of the underlying subgroup, `x^n - 1`.
    pub fn vanishing_at(&self, x: FieldElement) -> FieldElement {
        x.pow(self.size as u64) - FieldElement::ONE
    }
}

fn bit_reverse_permute(values: &mut [FieldElement]) {
    let n = values.len();
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for k in 0..n {
        let rev = k.reverse_bits() >> (usize::BITS - bits);
        if k < rev {
            values.swap(k, rev);
        }
    }
}

/// In-place radix-2 decimation-in-time transform over the subgroup generated
/// by `root` (which must have order `values.len()`).
fn transform(values: &mut [FieldElement], root: FieldElement) {
    let n = values.len();
    bit_reverse_permute(values);
    let mut len = 2;
    while len <= n {
        let step = root.pow((n / len) as u64);
        let half = len / 2;
        let twiddles: Vec<FieldElement> = std::iter::successors(Some(FieldElement::ONE), |w| Some(*w * step))
            .take(half)
            .collect();
        for chunk in values.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((a, b), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = *b * w;
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }
}

/// Evaluates the polynomial with coefficients `values` over `domain`.
pub fn ntt(values: &[FieldElement], domain: &EvaluationDomain) -> Result<Vec<FieldElement>, FieldError> {
    if values.len() != domain.size() {
        return Err(FieldError::SizeMismatch {
            expected: domain.size(),
            actual: values.len(),
        });
    }
    let mut out = values.to_vec();
    if domain.shift() != FieldElement::ONE {
        let mut s = FieldElement::ONE;
        for c in out.iter_mut() {
            *c *= s;
            s *= domain.shift();
        }
    }
    transform(&mut out, domain.generator());
    Ok(out)
}

/// Interpolates evaluations over `domain` back to coefficients.
pub fn intt(values: &[FieldElement], domain: &EvaluationDomain) -> Result<Vec<FieldElement>, FieldError> {
    if values.len() != domain.size() {
        return Err(FieldError::SizeMismatch {
            expected: domain.size(),
            actual: values.len(),
        });
    }
    let mut out = values.to_vec();
    transform(&mut out, domain.generator().inverse()?);
    let n_inv = FieldElement::new(domain.size() as u64).inverse()?;
    let shift_inv = domain.shift().inverse()?;
    let mut s = n_inv;
    for c in out.iter_mut() {
        *c *= s;
        s *= shift_inv;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::horner;
    use proptest::prelude::*;

    fn naive_dft(coeffs: &[FieldElement], domain: &EvaluationDomain) -> Vec<FieldElement> {
        domain.elements().into_iter().map(|x| horner(coeffs, x)).collect()
    }

    #[test]
    fn zeros_and_delta() {
        let d = EvaluationDomain::new(8).unwrap();
        let zeros = vec![FieldElement::ZERO; 8];
        assert_eq!(ntt(&zeros, &d).unwrap(), zeros);
        let mut delta = zeros.clone();
        delta[0] = FieldElement::ONE;
        assert_eq!(ntt(&delta, &d).unwrap(), vec![FieldElement::ONE; 8]);
    }

    #[test]
    fn size_mismatch() {
        let d = EvaluationDomain::new(8).unwrap();
        assert!(matches!(
            ntt(&[FieldElement::ONE; 4], &d),
            Err(FieldError::SizeMismatch { expected: 8, actual: 4 })
        ));
        assert!(intt(&[FieldElement::ONE; 16], &d).is_err());
    }

    #[test]
    fn single_point_domain() {
        let d = EvaluationDomain::new(1).unwrap();
        let v = [FieldElement::new(42)];
        assert_eq!(ntt(&v, &d).unwrap(), v);
        assert_eq!(intt(&v, &d).unwrap(), v);
    }

    proptest! {
        #[test]
        fn matches_quadratic_dft(raw in proptest::collection::vec(any::<u64>(), 8), coset in any::<bool>()) {
            let coeffs: Vec<_> = raw.into_iter().map(FieldElement::new).collect();
            let d = if coset { EvaluationDomain::lde(8).unwrap() } else { EvaluationDomain::new(8).unwrap() };
            let evals = ntt(&coeffs, &d).unwrap();
            prop_assert_eq!(&evals, &naive_dft(&coeffs, &d));
            prop_assert_eq!(intt(&evals, &d).unwrap(), coeffs);
        }

        #[test]
        fn linearity(a in proptest::collection::vec(any::<u64>(), 16),
                     b in proptest::collection::vec(any::<u64>(), 16),
                     alpha in any::<u64>(), beta in any::<u64>()) {
            let d = EvaluationDomain::new(16).unwrap();
            let a: Vec<_> = a.into_iter().map(FieldElement::new).collect();
            let b: Vec<_> = b.into_iter().map(FieldElement::new).collect();
            let (alpha, beta) = (FieldElement::new(alpha), FieldElement::new(beta));
            let mix: Vec<_> = a.iter().zip(&b).map(|(x, y)| alpha * *x + beta * *y).collect();
            let lhs = ntt(&mix, &d).unwrap();
            let na = ntt(&a, &d).unwrap();
            let nb = ntt(&b, &d).unwrap();
            let rhs: Vec<_> = na.iter().zip(&nb).map(|(x, y)| alpha * *x + beta * *y).collect();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
