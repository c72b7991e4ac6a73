//! Binary envelope for keys and ciphertexts.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "MFHE"            4 bytes
//! version           u16
//! name length       u16, then the parameter-set name in UTF-8
//! object tag        u8
//! word width        u8   (32 or 64)
//! dimension count   u8, then that many u64 dimensions
//! word count        u64, then the payload words
//! ```
//!
//! Payloads are written and read in chunks, so multi-gigabyte keys never
//! need a second in-memory copy.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::bootstrap::{BootstrapContext, RefreshKey, RlweSecret};
use crate::error::{Error, Result};
use crate::lwe::{KeySwitchKey, LweCiphertext, LweSecretKey};
use crate::params::{load_param_set, BootstrapMode, ParamSet, SecretDist};
use crate::storage::WordBuf;

pub const MAGIC: &[u8; 4] = b"MFHE";
pub const FORMAT_VERSION: u16 = 1;

const CHUNK_WORDS: usize = 1 << 16;

/// What an envelope holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectTag {
    SecretKey,
    LweCiphertext,
    KeySwitchKey,
    RefreshKeyAp,
    RefreshKeyGinx,
    RlweSecret,
}

impl ObjectTag {
    const ALL: [ObjectTag; 6] = [
        ObjectTag::SecretKey,
        ObjectTag::LweCiphertext,
        ObjectTag::KeySwitchKey,
        ObjectTag::RefreshKeyAp,
        ObjectTag::RefreshKeyGinx,
        ObjectTag::RlweSecret,
    ];

    pub fn code(self) -> u8 {
        match self {
            ObjectTag::SecretKey => 1,
            ObjectTag::LweCiphertext => 2,
            ObjectTag::KeySwitchKey => 3,
            ObjectTag::RefreshKeyAp => 4,
            ObjectTag::RefreshKeyGinx => 5,
            ObjectTag::RlweSecret => 6,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.code() == code)
            .ok_or_else(|| Error::Format(format!("unknown object tag {code}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectTag::SecretKey => "secret-key",
            ObjectTag::LweCiphertext => "lwe-ct",
            ObjectTag::KeySwitchKey => "ksk",
            ObjectTag::RefreshKeyAp => "rk-ap",
            ObjectTag::RefreshKeyGinx => "rk-ginx",
            ObjectTag::RlweSecret => "rlwe-secret",
        }
    }

    fn refresh(mode: BootstrapMode) -> Self {
        match mode {
            BootstrapMode::Ap => ObjectTag::RefreshKeyAp,
            BootstrapMode::Ginx => ObjectTag::RefreshKeyGinx,
        }
    }
}

impl fmt::Display for ObjectTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown object tag `{s}`")))
    }
}

/// Everything in an envelope before the payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub version: u16,
    pub params: String,
    pub tag: ObjectTag,
    pub word_bits: u8,
    pub dims: Vec<u64>,
    pub word_count: u64,
}

/// Word width used for every object of a parameter set.
pub fn word_bits_for(params: &ParamSet) -> u8 {
    if params.fits_u32() { 32 } else { 64 }
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == ErrorKind::UnexpectedEof {
        Error::Format("truncated file".into())
    } else {
        Error::Io(e)
    }
}

fn read_array<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf).map_err(truncated)?;
    Ok(buf)
}

pub fn write_header(w: &mut impl Write, h: &Header) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&h.version.to_le_bytes())?;
    let name = h.params.as_bytes();
    w.write_all(&(name.len() as u16).to_le_bytes())?;
    w.write_all(name)?;
    w.write_all(&[h.tag.code(), h.word_bits, h.dims.len() as u8])?;
    for d in &h.dims {
        w.write_all(&d.to_le_bytes())?;
    }
    w.write_all(&h.word_count.to_le_bytes())?;
    Ok(())
}

pub fn read_header(r: &mut impl Read) -> Result<Header> {
    if &read_array::<4>(r)? != MAGIC {
        return Err(Error::Format("not an envelope (bad magic)".into()));
    }
    let version = u16::from_le_bytes(read_array(r)?);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version} (expected {FORMAT_VERSION})")));
    }
    let len = u16::from_le_bytes(read_array(r)?) as usize;
    let mut name = vec![0u8; len];
    r.read_exact(&mut name).map_err(truncated)?;
    let params = String::from_utf8(name).map_err(|_| Error::Format("parameter-set name is not UTF-8".into()))?;
    let [tag, word_bits, ndims] = read_array::<3>(r)?;
    let tag = ObjectTag::from_code(tag)?;
    if word_bits != 32 && word_bits != 64 {
        return Err(Error::Format(format!("unsupported word width {word_bits}")));
    }
    let dims = (0..ndims).map(|_| Ok(u64::from_le_bytes(read_array(r)?))).collect::<Result<Vec<_>>>()?;
    let word_count = u64::from_le_bytes(read_array(r)?);
    Ok(Header { version, params, tag, word_bits, dims, word_count })
}

fn write_words<'a>(w: &mut impl Write, word_bits: u8, words: impl Iterator<Item = u64> + 'a) -> Result<()> {
    let mut bytes = Vec::with_capacity(CHUNK_WORDS * 8);
    for x in words {
        if word_bits == 32 {
            bytes.extend_from_slice(&(x as u32).to_le_bytes());
        } else {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        if bytes.len() >= CHUNK_WORDS * 4 {
            w.write_all(&bytes)?;
            bytes.clear();
        }
    }
    w.write_all(&bytes)?;
    Ok(())
}

fn read_words(r: &mut impl Read, word_bits: u8, count: usize) -> Result<WordBuf> {
    // grow as data arrives so a corrupt word count cannot force a huge allocation
    let mut out = WordBuf::zeros(0, word_bits == 64);
    let width = word_bits as usize / 8;
    let mut bytes = vec![0u8; CHUNK_WORDS * width];
    let mut done = 0;
    while done < count {
        let take = (count - done).min(CHUNK_WORDS);
        let chunk = &mut bytes[..take * width];
        r.read_exact(chunk).map_err(truncated)?;
        match &mut out {
            WordBuf::U32(v) => v.extend(chunk.chunks_exact(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()))),
            WordBuf::U64(v) => v.extend(chunk.chunks_exact(8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))),
        }
        done += take;
    }
    Ok(out)
}

fn expect_end(r: &mut impl Read) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::Format("trailing bytes after payload".into())),
    }
}

fn put(w: &mut impl Write, params: &ParamSet, tag: ObjectTag, dims: Vec<u64>, words: &WordBuf) -> Result<()> {
    let word_bits = word_bits_for(params);
    let h = Header {
        version: FORMAT_VERSION,
        params: params.name.clone(),
        tag,
        word_bits,
        dims,
        word_count: words.len() as u64,
    };
    write_header(w, &h)?;
    write_words(w, word_bits, words.iter())
}

/// Reads one object, checking the tag and resolving its parameter set.
fn take(r: &mut impl Read, accept: &[ObjectTag], ndims: usize) -> Result<(Header, ParamSet, WordBuf)> {
    let h = read_header(r)?;
    if !accept.contains(&h.tag) {
        let want: Vec<&str> = accept.iter().map(|t| t.name()).collect();
        return Err(Error::Format(format!("expected a {} file, found {}", want.join(" or "), h.tag)));
    }
    let params = load_param_set(&h.params)
        .map_err(|_| Error::Format(format!("file names unknown parameter set `{}`", h.params)))?;
    if h.word_bits != word_bits_for(&params) {
        return Err(Error::Format(format!("{} files use {}-bit words", params.name, word_bits_for(&params))));
    }
    if h.dims.len() != ndims {
        return Err(Error::Format(format!("{} header has {} dimensions, expected {ndims}", h.tag, h.dims.len())));
    }
    let words = read_words(r, h.word_bits, h.word_count as usize)?;
    expect_end(r)?;
    Ok((h, params, words))
}

fn dim_check(what: &str, got: u64, want: usize) -> Result<()> {
    if got != want as u64 {
        return Err(Error::Format(format!("{what} is {got}, expected {want}")));
    }
    Ok(())
}

pub fn write_secret_key(w: &mut impl Write, params: &ParamSet, sk: &LweSecretKey) -> Result<()> {
    let dist = match sk.dist() {
        SecretDist::Binary => 0,
        SecretDist::Ternary => 1,
    };
    let words = WordBuf::U64(sk.residues().to_vec());
    put(w, params, ObjectTag::SecretKey, vec![sk.dim() as u64, sk.modulus(), dist], &words)
}

pub fn read_secret_key(r: &mut impl Read) -> Result<(ParamSet, LweSecretKey)> {
    let (h, params, words) = take(r, &[ObjectTag::SecretKey], 3)?;
    dim_check("secret dimension", h.dims[0], params.lwe_dim)?;
    dim_check("secret modulus", h.dims[1], params.lwe_modulus as usize)?;
    dim_check("secret length", h.word_count, params.lwe_dim)?;
    let dist = match h.dims[2] {
        0 => SecretDist::Binary,
        1 => SecretDist::Ternary,
        d => return Err(Error::Format(format!("unknown secret distribution code {d}"))),
    };
    let sk = LweSecretKey::from_residues(words.iter().collect(), params.lwe_modulus, dist)?;
    Ok((params, sk))
}

pub fn write_ciphertext(w: &mut impl Write, params: &ParamSet, ct: &LweCiphertext) -> Result<()> {
    let mut v = ct.a.clone();
    v.push(ct.b);
    put(w, params, ObjectTag::LweCiphertext, vec![ct.dim() as u64, ct.modulus], &WordBuf::U64(v))
}

pub fn read_ciphertext(r: &mut impl Read) -> Result<(ParamSet, LweCiphertext)> {
    let (h, params, words) = take(r, &[ObjectTag::LweCiphertext], 2)?;
    let (dim, modulus) = (h.dims[0] as usize, h.dims[1]);
    dim_check("ciphertext length", h.word_count, dim + 1)?;
    if modulus < 2 || words.iter().any(|x| x >= modulus) {
        return Err(Error::Format("ciphertext word outside its modulus".into()));
    }
    let mut a: Vec<u64> = words.iter().collect();
    let b = a.pop().unwrap();
    Ok((params, LweCiphertext { a, b, modulus }))
}

pub fn write_keyswitch_key(w: &mut impl Write, params: &ParamSet, ksk: &KeySwitchKey) -> Result<()> {
    let (src, digits, base) = ksk.shape();
    let dims = vec![src as u64, digits as u64, base as u64, ksk.target_dim() as u64];
    put(w, params, ObjectTag::KeySwitchKey, dims, ksk.words())
}

pub fn read_keyswitch_key(r: &mut impl Read) -> Result<(ParamSet, KeySwitchKey)> {
    let (h, params, words) = take(r, &[ObjectTag::KeySwitchKey], 4)?;
    dim_check("key-switch source dimension", h.dims[0], params.ring_dim)?;
    dim_check("key-switch digits", h.dims[1], params.ks_digits)?;
    dim_check("key-switch base", h.dims[2], params.ks_base as usize)?;
    dim_check("key-switch target dimension", h.dims[3], params.lwe_dim)?;
    let ksk = KeySwitchKey::from_words(
        params.ring_dim,
        params.ks_digits,
        params.ks_base,
        params.lwe_dim,
        params.ring_modulus,
        words,
    )?;
    Ok((params, ksk))
}

pub fn write_refresh_key(w: &mut impl Write, params: &ParamSet, key: &RefreshKey) -> Result<()> {
    let (a, b, c) = key.shape();
    let dims = vec![a as u64, b as u64, c as u64];
    put(w, params, ObjectTag::refresh(key.mode()), dims, key.words())
}

pub fn read_refresh_key(r: &mut impl Read) -> Result<(ParamSet, RefreshKey)> {
    let (h, params, words) = take(r, &[ObjectTag::RefreshKeyAp, ObjectTag::RefreshKeyGinx], 3)?;
    let mode = if h.tag == ObjectTag::RefreshKeyAp { BootstrapMode::Ap } else { BootstrapMode::Ginx };
    let key = RefreshKey::from_words(&params, mode, words)?;
    let (a, b, c) = key.shape();
    if h.dims != [a as u64, b as u64, c as u64] {
        return Err(Error::Format(format!("refresh key shape {:?} does not match {}", h.dims, params.name)));
    }
    Ok((params, key))
}

pub fn write_ring_secret(w: &mut impl Write, params: &ParamSet, z: &RlweSecret) -> Result<()> {
    let m = z.ring().modulus();
    let words = WordBuf::U64(z.signed().iter().map(|&s| m.from_signed(s)).collect());
    put(w, params, ObjectTag::RlweSecret, vec![params.ring_dim as u64], &words)
}

pub fn read_ring_secret(r: &mut impl Read) -> Result<(ParamSet, RlweSecret)> {
    let (h, params, words) = take(r, &[ObjectTag::RlweSecret], 1)?;
    dim_check("ring dimension", h.dims[0], params.ring_dim)?;
    dim_check("ring secret length", h.word_count, params.ring_dim)?;
    let ctx = BootstrapContext::new(&params)?;
    let m = ctx.ring.modulus();
    let signed = words.iter().map(|x| m.centered(x)).collect();
    let z = RlweSecret::from_signed(&ctx.ring, signed)?;
    Ok((params, z))
}

/// Reads only the header of a file.
pub fn peek_header(path: &Path) -> Result<Header> {
    read_header(&mut BufReader::new(File::open(path)?))
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn save(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Opens `path` and hands a buffered reader to `f`.
pub fn load<T>(path: &Path, f: impl FnOnce(&mut BufReader<File>) -> Result<T>) -> Result<T> {
    f(&mut BufReader::new(File::open(path)?))
}
