//! Randomized coset encoder and the successive cancellation decoders.

use rand::Rng;

use crate::channels::DiscreteChannel;
use crate::construction::{IndexRole, WiretapCodeSpec};
use crate::error::{invalid, Result};
use crate::gf2::BitVector;
use crate::polar::{polar_encode, BeliefPair, SuccessiveCanceller};

/// A transmitted codeword together with the pieces it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WiretapCodeword {
    pub x: BitVector,
    /// Confidential message on the information set.
    pub u: BitVector,
    /// Random bits on the noisy set.
    pub b_star: BitVector,
    /// Frozen bits on the frozen set.
    pub b: BitVector,
}

/// Encodes `u` with fresh uniform bits on the noisy set.
pub fn wiretap_encode<R: Rng + ?Sized>(
    spec: &WiretapCodeSpec,
    u: &BitVector,
    rng: &mut R,
) -> Result<WiretapCodeword> {
    let b_star = BitVector::from_bools((0..spec.noisy_set().len()).map(|_| rng.gen::<bool>()));
    wiretap_encode_with(spec, u, &b_star)
}

/// Encodes `u` with the given noisy-set bits.
pub fn wiretap_encode_with(
    spec: &WiretapCodeSpec,
    u: &BitVector,
    b_star: &BitVector,
) -> Result<WiretapCodeword> {
    let w = spec.assemble(u, b_star)?;
    Ok(WiretapCodeword {
        x: polar_encode(&w)?,
        u: u.clone(),
        b_star: b_star.clone(),
        b: spec.frozen_bits().clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub u_hat: BitVector,
    pub b_star_hat: BitVector,
    pub w_hat: BitVector,
    /// Belief at each position just before its decision, if requested.
    pub posteriors: Option<Vec<BeliefPair>>,
}

impl DecodeResult {
    /// True when both the message and the noisy bits were recovered.
    pub fn matches(&self, cw: &WiretapCodeword) -> bool {
        self.u_hat == cw.u && self.b_star_hat == cw.b_star
    }
}

fn canceller(
    spec: &WiretapCodeSpec,
    c: &DiscreteChannel,
    y: &[usize],
) -> Result<SuccessiveCanceller> {
    if y.len() != spec.n() {
        return invalid(format!(
            "received {} symbols for blocklength {}",
            y.len(),
            spec.n()
        ));
    }
    SuccessiveCanceller::from_outputs(c, y)
}

/// Successive cancellation with frozen positions pinned to `b`.
pub fn sc_decode(spec: &WiretapCodeSpec, c: &DiscreteChannel, y: &[usize]) -> Result<DecodeResult> {
    decode(spec, c, y, false)
}

/// Like [`sc_decode`], also returning the belief behind every decision.
pub fn sc_decode_with_posteriors(
    spec: &WiretapCodeSpec,
    c: &DiscreteChannel,
    y: &[usize],
) -> Result<DecodeResult> {
    decode(spec, c, y, true)
}

fn decode(
    spec: &WiretapCodeSpec,
    c: &DiscreteChannel,
    y: &[usize],
    keep: bool,
) -> Result<DecodeResult> {
    let mut sc = canceller(spec, c, y)?;
    let n = spec.n();
    let mut w_hat = BitVector::zeros(n);
    let mut posteriors = keep.then(|| Vec::with_capacity(n));
    let mut frozen = spec.frozen_bits().as_slice().iter();
    for (i, role) in spec.roles().iter().enumerate() {
        let belief = sc.next_belief();
        if let Some(p) = posteriors.as_mut() {
            p.push(belief);
        }
        let bit = match role {
            IndexRole::Frozen => *frozen.next().expect("frozen bits match the frozen set"),
            _ => belief.decision(),
        };
        w_hat.set(i, bit);
        sc.commit(bit);
    }
    debug_assert_eq!(w_hat.gather(spec.frozen_set()), *spec.frozen_bits());
    Ok(DecodeResult {
        u_hat: w_hat.gather(spec.info_set()),
        b_star_hat: w_hat.gather(spec.noisy_set()),
        w_hat,
        posteriors,
    })
}

/// Successive cancellation that knows `b` and the message `u` and only
/// decides the noisy positions.
pub fn informed_sc_decode(
    spec: &WiretapCodeSpec,
    c: &DiscreteChannel,
    y: &[usize],
    known_u: &BitVector,
) -> Result<BitVector> {
    if known_u.len() != spec.info_set().len() {
        return invalid(format!(
            "known message has {} bits, information set has {}",
            known_u.len(),
            spec.info_set().len()
        ));
    }
    let mut sc = canceller(spec, c, y)?;
    let mut frozen = spec.frozen_bits().as_slice().iter();
    let mut info = known_u.as_slice().iter();
    let mut b_star_hat = Vec::with_capacity(spec.noisy_set().len());
    for role in spec.roles() {
        let belief = sc.next_belief();
        let bit = match role {
            IndexRole::Frozen => *frozen.next().expect("frozen bits match the frozen set"),
            IndexRole::Info => *info.next().expect("message matches the information set"),
            IndexRole::Noisy => {
                let d = belief.decision();
                b_star_hat.push(d);
                d
            }
        };
        sc.commit(bit);
    }
    BitVector::new(b_star_hat)
}
