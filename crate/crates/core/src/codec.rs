//! End-to-end coding modes built on the SC and SCL decoders.
//!
//! * Source coding with decoder side information: the encoder sends
//!   `u_{I_1}` of `u = x G`; the decoder rebuilds `x` from the codeword and
//!   priors derived from its side information.
//! * Non-systematic channel coding: `x = u G` with the message at `I_0`.
//! * Systematic channel coding: the message sits verbatim in `x` at `I'_0`.
//!
//! An optional CRC acts as outer parity for list decoding. It is always
//! evaluated on something readable from a path's reproduction `x̂`:
//!
//! * source mode: CRC of `x` itself, sent as an extension `s` next to the
//!   codeword;
//! * systematic mode: the last `w` positions of `I'_0` carry the CRC of the
//!   payload held in the others;
//! * non-systematic mode: the last `w` positions of `I_0` carry the CRC of the
//!   payload, and the check runs on `x̂ G = û`.
//!
//! Decoding never fails on bad statistics: the best estimate comes back
//! together with a `parity_failed` flag.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PolarError, Result};
use crate::index::{polar_transform, BinaryVector, CodeSpec};
use crate::sc::{convert_priors, DecodeResult, ScDecoder};
use crate::scl::SclDecoder;
use crate::systematic::systematic_encode;
use crate::theta::{TernaryTheta, Theta};

/// CRC used as outer parity: MSB-first long division with a zero initial
/// register, no reflection and no final XOR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterParity {
    width: u8,
    /// Generator without its implied top bit `x^width`.
    generator: u32,
}

impl OuterParity {
    /// The default: CRC-8 with generator `x^8 + x^2 + x + 1` (0x07).
    pub const CRC8: OuterParity = OuterParity { width: 8, generator: 0x07 };

    pub fn new(width: u8, generator: u32) -> Result<Self> {
        if !(1..=32).contains(&width) {
            return Err(PolarError::InvalidCrc(format!("width {width} outside 1..=32")));
        }
        if width < 32 && generator >> width != 0 {
            return Err(PolarError::InvalidCrc(format!(
                "generator {generator:#x} wider than {width} bits"
            )));
        }
        Ok(OuterParity { width, generator })
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    fn mask(&self) -> u32 {
        if self.width == 32 {
            u32::MAX
        } else {
            (1u32 << self.width) - 1
        }
    }

    /// CRC register after feeding `bits` in order.
    pub fn remainder(&self, bits: impl IntoIterator<Item = u8>) -> u32 {
        let top = self.width - 1;
        let mask = self.mask();
        bits.into_iter().fold(0u32, |reg, bit| {
            let feedback = ((reg >> top) as u8 & 1) ^ (bit & 1);
            let shifted = (reg << 1) & mask;
            if feedback == 1 {
                shifted ^ self.generator
            } else {
                shifted
            }
        })
    }

    /// CRC bits, most significant first.
    pub fn parity_bits(&self, bits: &[u8]) -> Vec<u8> {
        let r = self.remainder(bits.iter().copied());
        (0..self.width).rev().map(|j| ((r >> j) & 1) as u8).collect()
    }

    /// Whether `parity` is the CRC of `data`.
    pub fn check(&self, data: &[u8], parity: &[u8]) -> bool {
        parity.len() == self.width() && self.parity_bits(data) == parity
    }
}

/// CRC bits of `bits` under `cfg`, most significant first.
pub fn crc_parity(bits: &[u8], cfg: &OuterParity) -> Vec<u8> {
    cfg.parity_bits(bits)
}

impl fmt::Display for OuterParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:#04x}", self.width, self.generator)
    }
}

impl FromStr for OuterParity {
    type Err = PolarError;

    /// Parses `WIDTH:GENERATOR`, the generator in decimal or `0x` hex.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || PolarError::InvalidCrc(format!("expected WIDTH:GENERATOR, got {s:?}"));
        let (w, g) = s.split_once(':').ok_or_else(bad)?;
        let width: u8 = w.trim().parse().map_err(|_| bad())?;
        let g = g.trim();
        let generator = match g.strip_prefix("0x").or_else(|| g.strip_prefix("0X")) {
            Some(hex) => u32::from_str_radix(hex, 16),
            None => g.parse(),
        }
        .map_err(|_| bad())?;
        OuterParity::new(width, generator)
    }
}

/// Which decoder to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecoderKind {
    Sc { ternary: bool },
    Scl { list_size: usize, ternary: bool },
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Sc { .. } => "sc",
            DecoderKind::Scl { .. } => "scl",
        }
    }

    pub fn list_size(&self) -> usize {
        match *self {
            DecoderKind::Sc { .. } => 1,
            DecoderKind::Scl { list_size, .. } => list_size,
        }
    }

    pub fn ternary(&self) -> bool {
        match *self {
            DecoderKind::Sc { ternary } | DecoderKind::Scl { ternary, .. } => ternary,
        }
    }
}

/// Decoder output after path selection.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub result: DecodeResult,
    /// Parity was supplied and the selected output does not satisfy it.
    pub parity_failed: bool,
    /// List renormalization met an all-zero pool.
    pub degenerate: bool,
}

/// A decoder bound to one code, reusable across frames.
#[derive(Clone, Debug)]
pub enum Engine {
    Sc(ScDecoder<Theta>),
    ScTernary(ScDecoder<TernaryTheta>),
    Scl(SclDecoder<Theta>),
    SclTernary(SclDecoder<TernaryTheta>),
}

impl Engine {
    pub fn new(spec: &CodeSpec, kind: DecoderKind) -> Result<Self> {
        Ok(match kind {
            DecoderKind::Sc { ternary: false } => Engine::Sc(ScDecoder::new(spec.clone())),
            DecoderKind::Sc { ternary: true } => Engine::ScTernary(ScDecoder::new(spec.clone())),
            DecoderKind::Scl { list_size, ternary: false } => {
                Engine::Scl(SclDecoder::new(spec.clone(), list_size)?)
            }
            DecoderKind::Scl { list_size, ternary: true } => {
                Engine::SclTernary(SclDecoder::new(spec.clone(), list_size)?)
            }
        })
    }

    pub fn spec(&self) -> &CodeSpec {
        match self {
            Engine::Sc(d) => d.spec(),
            Engine::ScTernary(d) => d.spec(),
            Engine::Scl(d) => d.spec(),
            Engine::SclTernary(d) => d.spec(),
        }
    }

    /// Decodes one frame. `parity` judges a candidate reproduction `x̂`;
    /// list decoders use it to select among survivors.
    pub fn decode(
        &mut self,
        priors: &[Theta],
        frozen_values: &[u8],
        parity: Option<&dyn Fn(&BinaryVector) -> bool>,
    ) -> Result<Decoded> {
        let single = |result: DecodeResult| Decoded {
            parity_failed: parity.is_some_and(|p| !p(&result.x_hat)),
            result,
            degenerate: false,
        };
        let listed = |out: crate::scl::SclOutput| Decoded {
            parity_failed: out.parity_failed,
            degenerate: out.degenerate,
            result: out.paths.into_iter().nth(out.selected).expect("selected path exists").decode,
        };
        Ok(match self {
            Engine::Sc(d) => single(d.decode(priors, frozen_values)?),
            Engine::ScTernary(d) => single(d.decode(&convert_priors(priors)?, frozen_values)?),
            Engine::Scl(d) => listed(d.decode(priors, frozen_values, parity)?),
            Engine::SclTernary(d) => listed(d.decode(&convert_priors(priors)?, frozen_values, parity)?),
        })
    }
}

fn check_bits(bits: &[u8], expected: usize) -> Result<()> {
    if bits.len() != expected {
        return Err(PolarError::LengthMismatch {
            expected,
            got: bits.len(),
        });
    }
    match bits.iter().find(|&&b| b > 1) {
        Some(&b) => Err(PolarError::InvalidBit(b)),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------- source

/// Source codeword `(x G)_{I_1}`.
pub fn source_encode(spec: &CodeSpec, x: &BinaryVector) -> Result<Vec<u8>> {
    if x.len() != spec.block_len() {
        return Err(PolarError::LengthMismatch {
            expected: spec.block_len(),
            got: x.len(),
        });
    }
    Ok(polar_transform(x).gather(spec.frozen()))
}

/// Source decoding: reconstructs `x` from the codeword and side-information
/// priors. With `parity = Some((crc, s))` list decoders prefer a path whose
/// reproduction has CRC `s`.
pub fn source_decode(
    engine: &mut Engine,
    codeword: &[u8],
    priors: &[Theta],
    parity: Option<(&OuterParity, &[u8])>,
) -> Result<Decoded> {
    match parity {
        None => engine.decode(priors, codeword, None),
        Some((crc, s)) => {
            let check = |x: &BinaryVector| crc.check(&x.to_vec(), s);
            engine.decode(priors, codeword, Some(&check))
        }
    }
}

// ---------------------------------------------------------------- channel

/// Layout of a channel code: the polar code, the frozen values shared by
/// both ends, and an optional CRC occupying the last `w` message positions.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelCode {
    spec: CodeSpec,
    frozen_u: Vec<u8>,
    crc: Option<OuterParity>,
}

impl ChannelCode {
    pub fn new(spec: CodeSpec, frozen_u: Vec<u8>, crc: Option<OuterParity>) -> Result<Self> {
        check_bits(&frozen_u, spec.frozen().len())?;
        if let Some(c) = crc {
            if c.width() > spec.unfrozen().len() {
                return Err(PolarError::InvalidCrc(format!(
                    "{} CRC bits do not fit in {} message positions",
                    c.width(),
                    spec.unfrozen().len()
                )));
            }
        }
        Ok(ChannelCode { spec, frozen_u, crc })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn frozen_u(&self) -> &[u8] {
        &self.frozen_u
    }

    pub fn crc(&self) -> Option<&OuterParity> {
        self.crc.as_ref()
    }

    /// Message bits left after the CRC.
    pub fn payload_len(&self) -> usize {
        self.spec.unfrozen().len() - self.crc.map_or(0, |c| c.width())
    }

    fn with_crc(&self, payload: &[u8]) -> Result<Vec<u8>> {
        check_bits(payload, self.payload_len())?;
        let mut full = payload.to_vec();
        if let Some(c) = &self.crc {
            full.extend(c.parity_bits(payload));
        }
        Ok(full)
    }

    fn split_crc_ok(&self, message: &[u8]) -> bool {
        match &self.crc {
            None => true,
            Some(c) => {
                let (data, parity) = message.split_at(self.payload_len());
                c.check(data, parity)
            }
        }
    }

    /// `x = u G` with `u_{I_1}` frozen and `u_{I_0}` = payload ‖ CRC.
    pub fn encode_nonsystematic(&self, payload: &[u8]) -> Result<BinaryVector> {
        let message = self.with_crc(payload)?;
        let mut u = BinaryVector::zeros(self.spec.n())?;
        for (&i, &b) in self.spec.frozen().iter().zip(&self.frozen_u) {
            u.set(i, b);
        }
        for (&i, &b) in self.spec.unfrozen().iter().zip(&message) {
            u.set(i, b);
        }
        Ok(polar_transform(&u))
    }

    /// Payload estimate read from the selected path's message buffer.
    pub fn decode_nonsystematic(&self, engine: &mut Engine, priors: &[Theta]) -> Result<(Vec<u8>, Decoded)> {
        let unfrozen = self.spec.unfrozen();
        let check = |x: &BinaryVector| self.split_crc_ok(&polar_transform(x).gather(unfrozen));
        let parity: Option<&dyn Fn(&BinaryVector) -> bool> = self.crc.map(|_| &check as _);
        let decoded = engine.decode(priors, &self.frozen_u, parity)?;
        let payload = decoded.result.message_bits[..self.payload_len()].to_vec();
        Ok((payload, decoded))
    }

    /// Systematic encoding with `x_{I'_0}` = payload ‖ CRC.
    pub fn encode_systematic(&self, payload: &[u8]) -> Result<BinaryVector> {
        systematic_encode(&self.spec, &self.with_crc(payload)?, &self.frozen_u)
    }

    /// Payload estimate read from the selected reproduction at `I'_0`.
    pub fn decode_systematic(&self, engine: &mut Engine, priors: &[Theta]) -> Result<(Vec<u8>, Decoded)> {
        let positions = self.spec.systematic_unfrozen();
        let check = |x: &BinaryVector| self.split_crc_ok(&x.gather(positions));
        let parity: Option<&dyn Fn(&BinaryVector) -> bool> = self.crc.map(|_| &check as _);
        let decoded = engine.decode(priors, &self.frozen_u, parity)?;
        let mut payload = decoded.result.x_hat.gather(positions);
        payload.truncate(self.payload_len());
        Ok((payload, decoded))
    }
}

/// Non-systematic channel encoding without outer parity.
pub fn channel_encode_nonsystematic(spec: &CodeSpec, message: &[u8], frozen_u: &[u8]) -> Result<BinaryVector> {
    ChannelCode::new(spec.clone(), frozen_u.to_vec(), None)?.encode_nonsystematic(message)
}

/// Non-systematic channel decoding; returns `û_{I_0}`.
pub fn channel_decode_nonsystematic(
    spec: &CodeSpec,
    priors: &[Theta],
    frozen_u: &[u8],
    kind: DecoderKind,
) -> Result<Vec<u8>> {
    let code = ChannelCode::new(spec.clone(), frozen_u.to_vec(), None)?;
    Ok(code.decode_nonsystematic(&mut Engine::new(spec, kind)?, priors)?.0)
}

/// Systematic channel encoding without outer parity.
pub fn channel_encode_systematic(spec: &CodeSpec, message: &[u8], frozen_u: &[u8]) -> Result<BinaryVector> {
    systematic_encode(spec, message, frozen_u)
}

/// Systematic channel decoding; returns `x̂_{I'_0}`.
pub fn channel_decode_systematic(
    spec: &CodeSpec,
    priors: &[Theta],
    frozen_u: &[u8],
    kind: DecoderKind,
) -> Result<Vec<u8>> {
    let code = ChannelCode::new(spec.clone(), frozen_u.to_vec(), None)?;
    Ok(code.decode_systematic(&mut Engine::new(spec, kind)?, priors)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook polynomial division over the message followed by `w` zeros.
    fn crc_by_division(message: &[u8], width: usize, generator: u32) -> Vec<u8> {
        let mut poly: Vec<u8> = (0..=width).rev().map(|j| if j == width { 1 } else { ((generator >> j) & 1) as u8 }).collect();
        poly.truncate(width + 1);
        let mut work: Vec<u8> = message.to_vec();
        work.extend(std::iter::repeat_n(0, width));
        for start in 0..message.len() {
            if work[start] == 1 {
                for (j, &g) in poly.iter().enumerate() {
                    work[start + j] ^= g;
                }
            }
        }
        work[message.len()..].to_vec()
    }

    fn byte_bits(bytes: &[u8]) -> Vec<u8> {
        bytes.iter().flat_map(|&b| (0..8).rev().map(move |j| (b >> j) & 1)).collect()
    }

    #[test]
    fn crc8_check_string() {
        let bits = byte_bits(b"123456789");
        assert_eq!(crc_by_division(&bits, 8, 0x07), byte_bits(&[0xF4]));
        assert_eq!(OuterParity::CRC8.remainder(bits.iter().copied()), 0xF4);
        assert_eq!(crc_parity(&bits, &OuterParity::CRC8), byte_bits(&[0xF4]));
    }

    #[test]
    fn crc_against_division_oracle() {
        let cfgs = [(8u8, 0x07u32), (16, 0x1021), (5, 0x05), (1, 0x1), (32, 0x04C1_1DB7)];
        let mut state = 0x1234_5678u32;
        for (w, g) in cfgs {
            let crc = OuterParity::new(w, g).unwrap();
            for len in [0usize, 1, 7, 33, 100] {
                let msg: Vec<u8> = (0..len)
                    .map(|_| {
                        state = state.wrapping_mul(1_664_525).wrapping_add(1_013_904_223);
                        (state >> 31) as u8
                    })
                    .collect();
                let parity = crc.parity_bits(&msg);
                assert_eq!(parity, crc_by_division(&msg, w as usize, g), "w={w} len={len}");
                let mut appended = msg.clone();
                appended.extend(&parity);
                assert_eq!(crc.remainder(appended), 0);
            }
        }
        assert_eq!(OuterParity::CRC8.remainder(std::iter::empty()), 0);
    }

    #[test]
    fn crc_parse() {
        assert_eq!("8:0x07".parse::<OuterParity>().unwrap(), OuterParity::CRC8);
        assert_eq!("16:4129".parse::<OuterParity>().unwrap().generator(), 0x1021);
        for bad in ["0:0x1", "33:0x1", "8:0x107", "8", "x:1"] {
            assert!(bad.parse::<OuterParity>().is_err(), "{bad}");
        }
        assert_eq!(OuterParity::CRC8.to_string(), "8:0x07");
    }

    #[test]
    fn source_examples() {
        let spec = CodeSpec::new(2, [0, 1]).unwrap();
        let x = BinaryVector::from_bits(&[1, 1, 0, 0]).unwrap();
        assert_eq!(source_encode(&spec, &x).unwrap(), vec![0, 0]);
        assert_eq!(source_encode(&spec, &BinaryVector::zeros(2).unwrap()).unwrap(), vec![0, 0]);

        // Everything frozen: the codeword alone determines x.
        let all = CodeSpec::new(2, 0..4).unwrap();
        let codeword = source_encode(&all, &x).unwrap();
        let priors = vec![Theta::new(0.9).unwrap(); 4];
        for kind in [DecoderKind::Sc { ternary: false }, DecoderKind::Scl { list_size: 4, ternary: false }] {
            let mut engine = Engine::new(&all, kind).unwrap();
            let d = source_decode(&mut engine, &codeword, &priors, None).unwrap();
            assert_eq!(d.result.x_hat, x);
        }

        // Perfect side information.
        let priors: Vec<Theta> = x.iter().map(Theta::certain).collect();
        let mut engine = Engine::new(&spec, DecoderKind::Sc { ternary: true }).unwrap();
        let d = source_decode(&mut engine, &[0, 0], &priors, None).unwrap();
        assert_eq!(d.result.x_hat, x);
    }

    #[test]
    fn nonsystematic_example() {
        let spec = CodeSpec::new(1, [0]).unwrap();
        let x = channel_encode_nonsystematic(&spec, &[1], &[0]).unwrap();
        assert_eq!(x.to_vec(), vec![1, 1]);
        let priors: Vec<Theta> = x.iter().map(Theta::certain).collect();
        assert_eq!(
            channel_decode_nonsystematic(&spec, &priors, &[0], DecoderKind::Sc { ternary: false }).unwrap(),
            vec![1]
        );
    }

    #[test]
    fn systematic_example_end_to_end() {
        let spec = CodeSpec::new(2, [0, 1]).unwrap();
        let x = channel_encode_systematic(&spec, &[1, 0], &[0, 1]).unwrap();
        assert_eq!(x.to_vec(), vec![0, 1, 1, 0]);
        let priors: Vec<Theta> = x.iter().map(Theta::certain).collect();
        for kind in [DecoderKind::Sc { ternary: false }, DecoderKind::Scl { list_size: 2, ternary: true }] {
            assert_eq!(channel_decode_systematic(&spec, &priors, &[0, 1], kind).unwrap(), vec![1, 0]);
        }
    }

    #[test]
    fn crc_layout_round_trip() {
        let spec = CodeSpec::from_unfrozen(4, 4..16).unwrap();
        let code = ChannelCode::new(spec.clone(), vec![1, 0, 1, 1], Some(OuterParity::new(4, 0x3).unwrap())).unwrap();
        assert_eq!(code.payload_len(), 8);
        let payload = [1, 0, 0, 1, 1, 1, 0, 1];
        let kind = DecoderKind::Scl { list_size: 4, ternary: false };
        let x = code.encode_nonsystematic(&payload).unwrap();
        let priors: Vec<Theta> = x.iter().map(Theta::certain).collect();
        let (got, d) = code.decode_nonsystematic(&mut Engine::new(&spec, kind).unwrap(), &priors).unwrap();
        assert_eq!(got, payload);
        assert!(!d.parity_failed);

        let x = code.encode_systematic(&payload).unwrap();
        assert_eq!(x.gather(spec.systematic_unfrozen())[..8], payload);
        let priors: Vec<Theta> = x.iter().map(Theta::certain).collect();
        let (got, d) = code.decode_systematic(&mut Engine::new(&spec, kind).unwrap(), &priors).unwrap();
        assert_eq!(got, payload);
        assert!(!d.parity_failed);

        assert!(ChannelCode::new(spec, vec![0; 4], Some(OuterParity::new(13, 1).unwrap())).is_err());
    }
}
