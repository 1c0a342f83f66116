//! Acceptance suite: one test per scheme-level guarantee, each printing a
//! pass line with its measured numbers. Run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wpss::access::{build_access_structure, check_threshold_property, enumerate_subsets};
use wpss::analysis::{coalition_attack, pool_attack, AttackVerdict};
use wpss::bits::Bits;
use wpss::combiner::{decode_message, decode_single, verify_signature};
use wpss::coxeter::{is_identity_tits, perm_oracle_type_a, CoxeterMatrix, DEFAULT_COXETER_BUDGET};
use wpss::dealer::{
    embed_rng, embed_signature, encode_message, encode_message_for_recipient, generate_platform,
    setup_scheme, EncodingConfig, Platform, PlatformChoice,
};
use wpss::files::{format_message, format_scheme, format_share, SchemeFile};
use wpss::polycyclic::{dihedral, heisenberg, BuiltinPresentation, DEFAULT_PC_BUDGET};
use wpss::word::{Letter, Sign, Word};
use wpss::{SchemeParams, Share};

fn random_bits(rng: &mut impl Rng, len: usize) -> Bits {
    Bits::new((0..len).map(|_| rng.random_bool(0.5)).collect())
}

/// Criterion 1: for every (n, t) with 2 <= t <= n <= 8, each t-coalition
/// sees all m relators and each (t-1)-coalition misses exactly one.
#[test]
fn criterion_1_threshold_exhaustiveness() {
    let start = Instant::now();
    let mut schemes = 0;
    for n in 2..=8 {
        for t in 2..=n {
            let structure = build_access_structure(n, t).expect("valid params");
            let report = check_threshold_property(&structure);
            assert!(report.pass, "({n},{t}) failed: {:?}", report.failures);
            assert_eq!(
                report.sub_missing_exactly_one, report.sub_coalitions_checked,
                "({n},{t}): some sub-threshold coalition misses more than one relator"
            );
            schemes += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "took {elapsed:?}, budget is 10 s"
    );
    println!(
        "criterion 1 (threshold exhaustiveness): PASS — {schemes} schemes, {:?}",
        elapsed
    );
}

/// Criterion 2: Coxeter round trips. All (n, t) with n <= 5, 20 random
/// 32-bit messages each, decoded by every t-coalition with zero bit errors.
#[test]
fn criterion_2_round_trip_decoding() {
    let start = Instant::now();
    let mut messages_checked = 0u32;
    let mut decodes = 0u32;
    for n in 2..=5usize {
        for t in 2..=n {
            let seed = (n * 100 + t) as u64;
            let setup = setup_scheme(PlatformChoice::Coxeter, n, t, seed).unwrap();
            let platform = Platform::new(setup.presentation.clone()).unwrap();
            let coalitions = enumerate_subsets(n, t).unwrap();
            let mut bit_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbead);
            for msg_index in 0..20u64 {
                let bits = random_bits(&mut bit_rng, 32);
                let mut cfg = EncodingConfig::new(seed * 1000 + msg_index);
                cfg.decode_budget = Some(DEFAULT_COXETER_BUDGET);
                let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg)
                    .expect("encoding stays within default budgets");
                messages_checked += 1;
                for coalition in &coalitions {
                    let members: Vec<Share> = coalition
                        .iter()
                        .map(|&i| setup.shares[i - 1].clone())
                        .collect();
                    let decoded = decode_message(&members, &outcome.message, None).unwrap();
                    assert_eq!(
                        decoded.bits, bits,
                        "({n},{t}) msg {msg_index} coalition {coalition:?}"
                    );
                    decodes += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget is 5 min"
    );
    println!(
        "criterion 2 (round-trip decoding): PASS — {messages_checked} messages, \
         {decodes} coalition decodes, zero bit errors, {:?}",
        elapsed
    );
}

fn all_positive_words(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut level: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for stem in &level {
            for gen in 0..k {
                let mut word = stem.clone();
                word.push(gen);
                out.push(Word::from_letters(
                    word.iter().map(|&g| Letter::positive(g)).collect(),
                ));
                next.push(word);
            }
        }
        level = next;
    }
    out
}

/// Criterion 3a: the Tits engine agrees with the symmetric-group oracle on
/// the type-A matrix, exhaustively for short words and on long random ones.
#[test]
fn criterion_3a_coxeter_oracle_equivalence() {
    let start = Instant::now();
    let mut checked = 0u64;
    for k in 1..=4usize {
        let matrix = CoxeterMatrix::type_a(k);
        for word in all_positive_words(k, 10) {
            let decision = is_identity_tits(&matrix, &word, DEFAULT_COXETER_BUDGET)
                .expect("short words terminate");
            assert_eq!(
                decision.is_identity,
                perm_oracle_type_a(k, &word),
                "k={k} word={word:?}"
            );
            checked += 1;
        }
    }
    let k = 4;
    let matrix = CoxeterMatrix::type_a(k);
    let gens = wpss::Generators::numbered("s", k);
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a);
    for _ in 0..1000 {
        let len = 1 + (rng.next_u64() % 16) as usize;
        let word = wpss::random_word(&gens, len, &mut rng).unwrap();
        let decision = is_identity_tits(&matrix, &word, DEFAULT_COXETER_BUDGET).unwrap();
        assert_eq!(decision.is_identity, perm_oracle_type_a(k, &word));
        checked += 1;
    }
    println!(
        "criterion 3a (Tits vs symmetric group): PASS — {checked} words, 100% agreement, {:?}",
        start.elapsed()
    );
}

fn all_signed_words(gens: &[usize], max_len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = gens
        .iter()
        .flat_map(|&g| [Letter::positive(g), Letter::negative(g)])
        .collect();
    let mut out = vec![Word::empty()];
    let mut level: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for stem in &level {
            for &letter in &alphabet {
                let mut word = stem.clone();
                word.push(letter);
                out.push(Word::from_letters(word.clone()));
                next.push(word);
            }
        }
        level = next;
    }
    out
}

fn check_pc_builtin(
    builtin: &BuiltinPresentation,
    restricted_gens: &[usize],
    exhaustive_len: usize,
    rng: &mut ChaCha8Rng,
) -> u64 {
    let mut checked = 0;
    for word in all_signed_words(restricted_gens, exhaustive_len) {
        let engine = builtin.pc.is_identity(&word, DEFAULT_PC_BUDGET).unwrap();
        assert_eq!(
            engine,
            builtin.oracle.is_identity(&word),
            "{}: {word:?}",
            builtin.name
        );
        checked += 1;
    }
    let k = builtin.pc.generator_count();
    for _ in 0..1000 {
        let len = (rng.next_u64() % 21) as usize;
        let word = Word::from_letters(
            (0..len)
                .map(|_| {
                    Letter::new(
                        rng.random_range(0..k),
                        if rng.random_bool(0.5) {
                            Sign::Plus
                        } else {
                            Sign::Minus
                        },
                    )
                })
                .collect(),
        );
        let engine = builtin.pc.is_identity(&word, DEFAULT_PC_BUDGET).unwrap();
        assert_eq!(engine, builtin.oracle.is_identity(&word), "{}", builtin.name);
        checked += 1;
    }
    checked
}

/// Criterion 3b: collection agrees with the matrix/permutation oracles on
/// Heisenberg and the dihedral family, exhaustively on a restricted
/// alphabet and on long random words.
#[test]
fn criterion_3b_polycyclic_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3b);
    let mut checked = 0;
    // Heisenberg restricted to signed x, y: z is generated by commutators.
    checked += check_pc_builtin(&heisenberg(), &[0, 1], 8, &mut rng);
    for q in [3u32, 4, 6] {
        checked += check_pc_builtin(&dihedral(q), &[0, 1], 8, &mut rng);
    }
    println!(
        "criterion 3b (collection vs oracles): PASS — {checked} words, 100% agreement, {:?}",
        start.elapsed()
    );
}

/// Criterion 4: quotient soundness. Over round-trip fixtures, every
/// sub-threshold ProvedIdentity verdict corresponds to a true 1-bit.
#[test]
fn criterion_4_quotient_soundness() {
    let start = Instant::now();
    let mut proved = 0u32;
    let mut words_seen = 0u32;
    for n in 2..=5usize {
        for t in 2..=n {
            let seed = (n * 100 + t) as u64;
            let setup = setup_scheme(PlatformChoice::Coxeter, n, t, seed).unwrap();
            let platform = Platform::new(setup.presentation.clone()).unwrap();
            let mut bit_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x50d);
            for msg_index in 0..3u64 {
                let bits = random_bits(&mut bit_rng, 32);
                let cfg = EncodingConfig::new(seed * 777 + msg_index);
                let outcome =
                    encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
                for coalition in enumerate_subsets(n, t - 1).unwrap() {
                    let members: Vec<Share> = coalition
                        .iter()
                        .map(|&i| setup.shares[i - 1].clone())
                        .collect();
                    let report =
                        coalition_attack(&members, &outcome.message, None).unwrap();
                    for (word, bit) in report.words.iter().zip(bits.iter()) {
                        words_seen += 1;
                        match word.verdict {
                            AttackVerdict::ProvedIdentity => {
                                assert!(bit, "sub-threshold identity proof on a 0-bit");
                                proved += 1;
                            }
                            AttackVerdict::ProvedNonIdentity => {
                                assert!(!bit, "non-identity proof on a 1-bit");
                            }
                            AttackVerdict::Undecided => {}
                        }
                    }
                }
            }
        }
    }
    println!(
        "criterion 4 (quotient soundness): PASS — {proved} sound identity proofs across \
         {words_seen} word verdicts, zero violations, {:?}",
        start.elapsed()
    );
}

/// Criterion 5: targeted decoding. 100 targeted words per recipient over a
/// (4,3) scheme decode correctly with the single intended share.
#[test]
fn criterion_5_targeted_decoding() {
    let start = Instant::now();
    let setup = setup_scheme(PlatformChoice::Coxeter, 4, 3, 0x7a55).unwrap();
    let platform = Platform::new(setup.presentation.clone()).unwrap();
    let mut bit_rng = ChaCha8Rng::seed_from_u64(0x7a56);
    for share in &setup.shares {
        let bits = random_bits(&mut bit_rng, 100);
        let cfg = EncodingConfig::new(0x7a57 + share.participant as u64);
        let message =
            encode_message_for_recipient(&platform, share, &bits, &cfg).unwrap();
        let decoded = decode_single(share, &message, None).unwrap();
        assert_eq!(
            decoded.bits, bits,
            "participant {} mis-decoded a targeted message",
            share.participant
        );
    }
    println!(
        "criterion 5 (targeted decoding): PASS — 4 recipients x 100 words, zero errors, {:?}",
        start.elapsed()
    );
}

/// Criterion 6: embedded signatures are always found after a round trip;
/// the decoy false-positive rate in a pool search is measured and
/// reported (the scheme fixes no threshold for it).
#[test]
fn criterion_6_signature_validation() {
    let start = Instant::now();
    let signature: Bits = "10110100".parse().unwrap();
    let mut found = 0;
    let fixtures = 20u64;
    for fixture in 0..fixtures {
        let seed = 0x516 + fixture;
        let setup = setup_scheme(PlatformChoice::Coxeter, 3, 2, seed).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let mut bit_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf1f);
        let payload = random_bits(&mut bit_rng, 16);
        let carrying =
            embed_signature(&payload, &signature, &mut embed_rng(seed)).unwrap();
        let cfg = EncodingConfig::new(seed);
        let outcome = encode_message(&platform, setup.scheme_id, &carrying, &cfg).unwrap();
        let decoded = decode_message(&setup.shares[..2], &outcome.message, None).unwrap();
        let report = verify_signature(&decoded.bits, &signature);
        assert!(report.authentic, "fixture {fixture}: signature lost");
        found += 1;
    }

    // Pool search: the true platform plus decoys; measure how many decoys
    // happen to contain the signature in their garbage decode.
    let seed = 0x516;
    let setup = setup_scheme(PlatformChoice::Coxeter, 3, 2, seed).unwrap();
    let platform = Platform::new(setup.presentation.clone()).unwrap();
    let mut bit_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf1f);
    let payload = random_bits(&mut bit_rng, 16);
    let carrying = embed_signature(&payload, &signature, &mut embed_rng(seed)).unwrap();
    let mut cfg = EncodingConfig::new(seed);
    cfg.commutator_count = Some(4);
    let outcome = encode_message(&platform, setup.scheme_id, &carrying, &cfg).unwrap();
    let params = SchemeParams::new(3, 2).unwrap();
    let decoys = 99u64;
    let mut pool = vec![setup.presentation.clone()];
    for i in 0..decoys {
        pool.push(generate_platform(PlatformChoice::Coxeter, params, 90_000 + i).unwrap());
    }
    let report = pool_attack(&pool, &outcome.message, &signature, 100_000);
    let true_candidate = report
        .candidates
        .iter()
        .find(|c| c.position == 0)
        .expect("true platform is in the pool");
    assert!(true_candidate.matched(), "true platform must match");
    let decoy_matches = report.match_count - 1;
    let rate = decoy_matches as f64 / decoys as f64;
    println!(
        "criterion 6 (signature validation): PASS — {found}/{fixtures} round-trip fixtures \
         found the signature; decoy false-positive rate {decoy_matches}/{decoys} = {rate:.3} \
         (reported, no threshold asserted), {:?}",
        start.elapsed()
    );
}

/// Criterion 7: identical seeds produce byte-identical scheme, share, and
/// message files.
#[test]
fn criterion_7_determinism() {
    let start = Instant::now();
    let render = |seed: u64| -> (String, Vec<String>, String) {
        let setup = setup_scheme(PlatformChoice::Coxeter, 4, 3, seed).unwrap();
        let platform = Platform::new(setup.presentation.clone()).unwrap();
        let scheme_text = format_scheme(&SchemeFile {
            scheme_id: setup.scheme_id,
            params: setup.structure.params,
            presentation: setup.presentation.clone(),
        });
        let share_texts = setup.shares.iter().map(format_share).collect();
        let cfg = EncodingConfig::new(seed ^ 0xabc);
        let bits: Bits = "1100110101".parse().unwrap();
        let outcome = encode_message(&platform, setup.scheme_id, &bits, &cfg).unwrap();
        let message_text =
            format_message(&outcome.message, setup.presentation.generators());
        (scheme_text, share_texts, message_text)
    };
    let first = render(0xd00d);
    let second = render(0xd00d);
    assert_eq!(first.0, second.0, "scheme files differ across runs");
    assert_eq!(first.1, second.1, "share files differ across runs");
    assert_eq!(first.2, second.2, "message files differ across runs");
    let other = render(0xd00e);
    assert_ne!(first.0, other.0, "different seeds collide");
    println!(
        "criterion 7 (determinism): PASS — byte-identical scheme, {} share, and message \
         files across repeated runs, {:?}",
        first.1.len(),
        start.elapsed()
    );
}
