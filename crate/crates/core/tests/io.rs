use std::io::Cursor;

use fhew_pim::io::{
    read_ciphertext, read_header, read_keyswitch_key, read_refresh_key, read_ring_secret, read_secret_key,
    write_ciphertext, write_header, write_keyswitch_key, write_refresh_key, write_ring_secret, write_secret_key,
    Header, ObjectTag, FORMAT_VERSION, MAGIC,
};
use fhew_pim::keys::{generate_keys, ClientKey};
use fhew_pim::params::{load_param_set, BootstrapMode};
use fhew_pim::sampler::Sampler;
use fhew_pim::Error;

fn bytes(f: impl FnOnce(&mut Vec<u8>)) -> Vec<u8> {
    let mut v = Vec::new();
    f(&mut v);
    v
}

fn is_format(e: Error) -> bool {
    matches!(e, Error::Format(_))
}

#[test]
fn every_object_round_trips() {
    for mode in [BootstrapMode::Ap, BootstrapMode::Ginx] {
        let p = load_param_set("TOY").unwrap();
        let (client, server) = generate_keys(&p, mode, 3).unwrap();
        let buf = bytes(|w| write_secret_key(w, &p, &client.lwe).unwrap());
        let (p2, sk) = read_secret_key(&mut Cursor::new(buf)).unwrap();
        assert_eq!((p2, sk), (p.clone(), client.lwe.clone()));

        let buf = bytes(|w| write_ring_secret(w, &p, &client.ring_secret).unwrap());
        let (_, z) = read_ring_secret(&mut Cursor::new(buf)).unwrap();
        assert_eq!(z.signed(), client.ring_secret.signed());

        let buf = bytes(|w| write_keyswitch_key(w, &p, &server.ksk).unwrap());
        let (_, ksk) = read_keyswitch_key(&mut Cursor::new(buf)).unwrap();
        assert_eq!(ksk, server.ksk);

        let buf = bytes(|w| write_refresh_key(w, &p, &server.refresh).unwrap());
        let h = read_header(&mut Cursor::new(&buf)).unwrap();
        assert_eq!(h.tag, if mode == BootstrapMode::Ap { ObjectTag::RefreshKeyAp } else { ObjectTag::RefreshKeyGinx });
        let (_, rk) = read_refresh_key(&mut Cursor::new(buf)).unwrap();
        assert_eq!(rk.mode(), mode);
        assert_eq!(rk.words(), server.refresh.words());
    }
}

#[test]
fn ciphertexts_round_trip_with_set_word_width() {
    for (name, bits) in [("STD128", 32u8), ("STD128Q", 64), ("STD192", 64), ("STD256Q", 32)] {
        let p = load_param_set(name).unwrap();
        let client = ClientKey::generate(&p, BootstrapMode::Ginx, &mut Sampler::new(1)).unwrap();
        let ct = client.encrypt(true, &mut Sampler::new(2));
        let buf = bytes(|w| write_ciphertext(w, &p, &ct).unwrap());
        let h = read_header(&mut Cursor::new(&buf)).unwrap();
        assert_eq!(h.word_bits, bits, "{name}");
        assert_eq!(h.dims, vec![p.lwe_dim as u64, p.lwe_modulus]);
        assert_eq!(h.word_count, p.lwe_dim as u64 + 1);
        let (_, back) = read_ciphertext(&mut Cursor::new(buf)).unwrap();
        assert_eq!(back, ct);
        assert!(client.decrypt(&back));
    }
}

#[test]
fn header_layout() {
    let h = Header {
        version: FORMAT_VERSION,
        params: "TOY".into(),
        tag: ObjectTag::LweCiphertext,
        word_bits: 32,
        dims: vec![4, 16],
        word_count: 5,
    };
    let buf = bytes(|w| write_header(w, &h).unwrap());
    assert_eq!(&buf[..4], MAGIC);
    assert_eq!(&buf[4..6], &1u16.to_le_bytes());
    assert_eq!(&buf[6..8], &3u16.to_le_bytes());
    assert_eq!(&buf[8..11], b"TOY");
    assert_eq!(&buf[11..14], &[2, 32, 2]);
    assert_eq!(buf.len(), 14 + 16 + 8);
    assert_eq!(read_header(&mut Cursor::new(buf)).unwrap(), h);
    for t in ["secret-key", "lwe-ct", "ksk", "rk-ap", "rk-ginx", "rlwe-secret"] {
        assert_eq!(t.parse::<ObjectTag>().unwrap().name(), t);
    }
}

fn toy_ct_file() -> (Vec<u8>, fhew_pim::lwe::LweCiphertext) {
    let p = load_param_set("TOY").unwrap();
    let (client, _) = generate_keys(&p, BootstrapMode::Ginx, 4).unwrap();
    let ct = client.encrypt(false, &mut Sampler::new(5));
    (bytes(|w| write_ciphertext(w, &p, &ct).unwrap()), ct)
}

#[test]
fn every_truncation_is_a_format_error() {
    let (buf, _) = toy_ct_file();
    for cut in 0..buf.len() {
        let err = read_ciphertext(&mut Cursor::new(&buf[..cut])).unwrap_err();
        assert!(is_format(err), "cut at {cut}");
    }
}

#[test]
fn corrupt_envelopes_are_rejected() {
    let (buf, _) = toy_ct_file();
    let mut trailing = buf.clone();
    trailing.push(0);
    assert!(is_format(read_ciphertext(&mut Cursor::new(trailing)).unwrap_err()));

    let mut magic = buf.clone();
    magic[0] = b'X';
    assert!(is_format(read_ciphertext(&mut Cursor::new(magic)).unwrap_err()));

    let mut version = buf.clone();
    version[4] = 2;
    let err = read_ciphertext(&mut Cursor::new(version)).unwrap_err();
    assert!(err.to_string().contains("version"));

    assert!(is_format(read_secret_key(&mut Cursor::new(buf.clone())).unwrap_err()));

    let mut tag = buf.clone();
    tag[11] = 99;
    assert!(is_format(read_ciphertext(&mut Cursor::new(tag)).unwrap_err()));

    let mut width = buf.clone();
    width[12] = 64;
    assert!(is_format(read_ciphertext(&mut Cursor::new(width)).unwrap_err()));

    // first payload word pushed past the modulus
    let mut word = buf.clone();
    let payload = buf.len() - 5 * 4;
    word[payload..payload + 4].copy_from_slice(&16u32.to_le_bytes());
    assert!(is_format(read_ciphertext(&mut Cursor::new(word)).unwrap_err()));

    // a claimed word count far beyond the data
    let mut count = buf.clone();
    let at = payload - 8;
    count[at..at + 8].copy_from_slice(&(u64::MAX / 16).to_le_bytes());
    assert!(is_format(read_ciphertext(&mut Cursor::new(count)).unwrap_err()));

    let mut name = buf;
    name[8..11].copy_from_slice(b"TOZ");
    let err = read_ciphertext(&mut Cursor::new(name)).unwrap_err();
    assert!(is_format(err));
}
