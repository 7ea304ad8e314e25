//! Collision certificates, the polygon collapse map, and measure-and-prepare
//! channels.

use serde::Serialize;

use super::{is_admissible, Channel};
use crate::error::{Error, Result};
use crate::geometry::{solve_affine_map, Matrix, Scalar, Vector};
use crate::models::{build_evengon, Measurement, Model};

/// Two distinct vertices ω_a, ω_b sent to the same vertex ω_c. Labels are
/// 1-based, matching ωᵢ.
///
/// For a bistochastic channel this rules out `T^{⊗n}` being a mixture of
/// reversible channels for every n: reversible maps are injective on extreme
/// states, so a mixture can only send ω_a^{⊗n} to an extreme state if every
/// component does, and then every component sends ω_a^{⊗n} and ω_b^{⊗n} to
/// the same point.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct CollisionCertificate<S: Scalar> {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub bistochastic: bool,
    pub channel: Channel<S>,
}

impl<S: Scalar> CollisionCertificate<S> {
    /// Re-checks the certificate against the model.
    pub fn verify(&self, m: &Model<S>) -> Result<bool> {
        let n = m.vertices().len();
        if self.a == self.b || [self.a, self.b, self.c].iter().any(|&l| l == 0 || l > n) {
            return Ok(false);
        }
        let wc = m.omega(self.c);
        Ok(self.channel.apply(m.omega(self.a))?.approx_eq(wc) && self.channel.apply(m.omega(self.b))?.approx_eq(wc))
    }
}

/// First pair `a < b` of vertices with `T(ω_a) = T(ω_b) = ω_c`, scanning in
/// label order.
pub fn collision_certificate<S: Scalar>(t: &Channel<S>, m: &Model<S>) -> Result<Option<CollisionCertificate<S>>> {
    if !is_admissible(t, m)? {
        return Err(Error::Inadmissible);
    }
    let images: Vec<Vector<S>> = m.vertices().iter().map(|w| t.apply(w)).collect::<Result<_>>()?;
    let mixed = m.mixed_state();
    let bistochastic = t.apply(&mixed)?.approx_eq(&mixed);
    for a in 0..images.len() {
        let Some(c) = m.vertex_index(&images[a]) else { continue };
        for b in a + 1..images.len() {
            if images[b].approx_eq(&images[a]) {
                return Ok(Some(CollisionCertificate { a: a + 1, b: b + 1, c: c + 1, bistochastic, channel: t.clone() }));
            }
        }
    }
    Ok(None)
}

/// The map fixing ω₁ and ω_{k+1} and folding ω₂ onto ω₁ (and ω_{k+2} onto
/// ω_{k+1}). It is bistochastic and collides two extreme states.
pub fn evengon_collapse_map<S: Scalar>(k: usize) -> Result<Channel<S>> {
    let m = build_evengon::<S>(k)?;
    let w = |i: usize| m.omega(i).clone();
    let pairs = [(w(1), w(1)), (w(2), w(1)), (w(k + 1), w(k + 1))];
    let t = Channel::from_matrix(solve_affine_map(&pairs)?)?;

    if !t.apply(&w(k + 2))?.approx_eq(&w(k + 1)) {
        return Err(Error::Consistency(format!("collapse map for k = {k} does not send ω_{} to ω_{}", k + 2, k + 1)));
    }
    let mixed = m.mixed_state();
    if !t.apply(&mixed)?.approx_eq(&mixed) {
        return Err(Error::Consistency(format!("collapse map for k = {k} moves the mixed state")));
    }
    if !is_admissible(&t, &m)? {
        return Err(Error::Consistency(format!("collapse map for k = {k} leaves the polygon")));
    }
    Ok(t)
}

/// `T = Σᵢ σᵢ eᵢᵀ`: measure `M`, prepare `σᵢ` on outcome i.
pub fn measure_prepare_channel<S: Scalar>(
    m: &Model<S>,
    measurement: &Measurement<S>,
    prepared: &[Vector<S>],
) -> Result<Channel<S>> {
    if prepared.len() != measurement.len() {
        return Err(Error::LengthMismatch { left: measurement.len(), right: prepared.len() });
    }
    let d = m.dimension();
    let mut acc = Matrix::zeros(d, d);
    for (e, sigma) in measurement.effects.iter().zip(prepared) {
        if sigma.dim() != d || e.functional.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: sigma.dim() });
        }
        if !sigma[d - 1].approx_eq(&S::one()) || !m.contains(sigma)? {
            return Err(Error::InvalidState(format!("prepared state {sigma} is not a normalized state")));
        }
        acc = acc.add(&Matrix::outer(sigma, &e.functional))?;
    }
    let t = Channel::from_matrix(acc)?;
    if m.is_single() && !is_admissible(&t, m)? {
        return Err(Error::Inadmissible);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Float, Rational};
    use crate::models::{square, Effect};

    type Q = Rational;

    fn ch(s: &str) -> Channel<Q> {
        Channel::parse_name(s).unwrap()
    }

    #[test]
    fn collision_for_collapse_and_none_for_identity() {
        let sq = square::<Q>();
        let cert = collision_certificate(&ch("[g1+,g1+]"), &sq).unwrap().unwrap();
        assert_eq!((cert.a, cert.b, cert.c, cert.bistochastic), (1, 2, 1, true));
        assert!(cert.verify(&sq).unwrap());
        assert!(collision_certificate(&ch("[g1+,g2+]"), &sq).unwrap().is_none());
    }

    #[test]
    fn square_collapse_is_the_gamma_pair() {
        assert_eq!(evengon_collapse_map::<Q>(2).unwrap(), ch("[g1+,g1+]"));
    }

    #[test]
    fn hexagon_collapse() {
        let m = build_evengon::<Float>(3).unwrap();
        let t = evengon_collapse_map::<Float>(3).unwrap();
        assert!(t.apply(m.omega(5)).unwrap().approx_eq(m.omega(4)));
        let cert = collision_certificate(&t, &m).unwrap().unwrap();
        assert_eq!((cert.a, cert.b, cert.c), (1, 2, 1));
    }

    #[test]
    fn measure_prepare_examples() {
        let sq = square::<Q>();
        let m24 = sq.measurement("M24").unwrap();
        let m13 = sq.measurement("M13").unwrap();
        let prep = [sq.omega(1).clone(), sq.omega(3).clone()];
        assert_eq!(measure_prepare_channel(&sq, m24, &prep).unwrap(), ch("[g1+,g1+]"));
        assert_eq!(measure_prepare_channel(&sq, m13, &prep).unwrap(), ch("[g2+,g2+]"));
        let trivial = Measurement::new("U", vec![Effect::new("u", Vector::from_i64s(&[0, 0, 1]))]).unwrap();
        assert_eq!(measure_prepare_channel(&sq, &trivial, &prep[..1]).unwrap(), ch("[g3+,g3+]"));
        assert!(matches!(measure_prepare_channel(&sq, m24, &prep[..1]), Err(Error::LengthMismatch { .. })));
    }
}
