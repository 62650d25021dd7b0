use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::corpus::{Corpus, CorpusError, Example};

/// Real English base/past pairs used for the irregular part of a
/// synthetic corpus.
pub const IRREGULAR_VERBS: &[(&str, &str)] = &[
    ("arise", "arose"),
    ("awake", "awoke"),
    ("bear", "bore"),
    ("begin", "began"),
    ("bend", "bent"),
    ("bind", "bound"),
    ("bite", "bit"),
    ("bleed", "bled"),
    ("blow", "blew"),
    ("break", "broke"),
    ("breed", "bred"),
    ("bring", "brought"),
    ("build", "built"),
    ("buy", "bought"),
    ("catch", "caught"),
    ("choose", "chose"),
    ("cling", "clung"),
    ("come", "came"),
    ("creep", "crept"),
    ("deal", "dealt"),
    ("dig", "dug"),
    ("draw", "drew"),
    ("drink", "drank"),
    ("drive", "drove"),
    ("eat", "ate"),
    ("fall", "fell"),
    ("feed", "fed"),
    ("feel", "felt"),
    ("fight", "fought"),
    ("find", "found"),
    ("flee", "fled"),
    ("fling", "flung"),
    ("fly", "flew"),
    ("forget", "forgot"),
    ("freeze", "froze"),
    ("get", "got"),
    ("give", "gave"),
    ("go", "went"),
    ("grind", "ground"),
    ("grow", "grew"),
    ("hang", "hung"),
    ("have", "had"),
    ("hear", "heard"),
    ("hide", "hid"),
    ("hold", "held"),
    ("keep", "kept"),
    ("kneel", "knelt"),
    ("know", "knew"),
    ("lay", "laid"),
    ("lead", "led"),
    ("leave", "left"),
    ("lend", "lent"),
    ("lose", "lost"),
    ("make", "made"),
    ("mean", "meant"),
    ("meet", "met"),
    ("pay", "paid"),
    ("ride", "rode"),
    ("ring", "rang"),
    ("rise", "rose"),
    ("run", "ran"),
    ("say", "said"),
    ("see", "saw"),
    ("seek", "sought"),
    ("sell", "sold"),
    ("send", "sent"),
    ("shake", "shook"),
    ("shine", "shone"),
    ("shoot", "shot"),
    ("sing", "sang"),
    ("sink", "sank"),
    ("sit", "sat"),
    ("sleep", "slept"),
    ("slide", "slid"),
    ("speak", "spoke"),
    ("spend", "spent"),
    ("stand", "stood"),
    ("steal", "stole"),
    ("sting", "stung"),
    ("strike", "struck"),
    ("swear", "swore"),
    ("sweep", "swept"),
    ("swim", "swam"),
    ("swing", "swung"),
    ("take", "took"),
    ("teach", "taught"),
    ("tear", "tore"),
    ("tell", "told"),
    ("think", "thought"),
    ("throw", "threw"),
    ("wake", "woke"),
    ("wear", "wore"),
    ("weep", "wept"),
    ("win", "won"),
    ("wind", "wound"),
    ("write", "wrote"),
];

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z", "bl",
    "br", "cl", "cr", "dr", "fl", "fr", "gl", "gr", "pl", "pr", "sk", "sl", "sm", "sn", "sp", "st",
    "tr", "sh", "ch", "th",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ea", "oa", "oo", "ou"];
// Codas that never make a regular verb look like it needs a doubled consonant.
const CODAS: &[&str] = &[
    "ck", "ct", "ft", "ld", "lk", "lm", "lp", "lt", "mp", "nd", "nk", "nt", "pt", "rb", "rd", "rk",
    "rm", "rn", "rp", "rt", "sh", "sk", "sp", "st", "ch", "th", "lf", "rf", "ng", "rl",
];
const MEDIAL: &[&str] = &[
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
];
// Before a final "e" or "y".
const PRE_E: &[&str] = &[
    "b", "c", "d", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "dg", "rs", "nc",
];

/// How a regular stem forms its past tense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularClass {
    /// Ends in a consonant: add "ed".
    AddEd,
    /// Ends in "e": add "d".
    AddD,
    /// Ends in consonant + "y": replace "y" by "ied".
    YToIed,
}

/// The past tense the three regular rules assign to `stem`.
pub fn regular_past(stem: &str) -> (RegularClass, String) {
    let bytes = stem.as_bytes();
    match bytes.last() {
        Some(b'e') => (RegularClass::AddD, format!("{stem}d")),
        Some(b'y') if bytes.len() >= 2 && !b"aeiou".contains(&bytes[bytes.len() - 2]) => (
            RegularClass::YToIed,
            format!("{}ied", &stem[..stem.len() - 1]),
        ),
        _ => (RegularClass::AddEd, format!("{stem}ed")),
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items.choose(rng).copied().expect("non-empty table")
}

fn random_stem(rng: &mut ChaCha8Rng) -> String {
    let mut stem = String::from(pick(rng, ONSETS));
    stem.push_str(pick(rng, VOWELS));
    if rng.gen_bool(0.3) {
        stem.push_str(pick(rng, MEDIAL));
        stem.push_str(pick(rng, &VOWELS[..5]));
    }
    let roll: f64 = rng.gen();
    if roll < 0.6 {
        stem.push_str(pick(rng, CODAS));
    } else if roll < 0.85 {
        stem.push_str(pick(rng, PRE_E));
        stem.push('e');
    } else {
        stem.push_str(pick(rng, PRE_E));
        stem.push('y');
    }
    stem
}

/// A corpus of `n` pairs: `round(n * irregular_fraction)` drawn from
/// [`IRREGULAR_VERBS`], the rest random stems inflected by the regular
/// rules (no consonant doubling). The same seed gives the same corpus.
pub fn synthesize_corpus(
    n: usize,
    irregular_fraction: f64,
    seed: u64,
) -> Result<Corpus, CorpusError> {
    if !(0.0..=1.0).contains(&irregular_fraction) {
        return Err(CorpusError::Size(format!(
            "irregular fraction {irregular_fraction} is outside [0, 1]"
        )));
    }
    let n_irregular = (n as f64 * irregular_fraction).round() as usize;
    if n_irregular > IRREGULAR_VERBS.len() {
        return Err(CorpusError::Size(format!(
            "{n_irregular} irregular verbs requested but only {} are available",
            IRREGULAR_VERBS.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut irregular: Vec<(&str, &str)> = IRREGULAR_VERBS.to_vec();
    irregular.shuffle(&mut rng);
    irregular.truncate(n_irregular);

    let mut taken: HashSet<String> = IRREGULAR_VERBS.iter().map(|(b, _)| b.to_string()).collect();
    let mut examples: Vec<Example> = irregular
        .iter()
        .map(|(b, p)| Example::from_words(b, p))
        .collect();
    let n_regular = n - n_irregular;
    let max_attempts = 1000 + 200 * n_regular;
    let mut attempts = 0;
    while examples.len() < n {
        attempts += 1;
        if attempts > max_attempts {
            return Err(CorpusError::Size(format!(
                "could not generate {n_regular} distinct regular stems"
            )));
        }
        let stem = random_stem(&mut rng);
        if taken.insert(stem.clone()) {
            let (_, past) = regular_past(&stem);
            examples.push(Example::from_words(&stem, &past));
        }
    }
    examples.shuffle(&mut rng);
    let note =
        format!("synthetic corpus: n={n} irregular_fraction={irregular_fraction} seed={seed}");
    Ok(Corpus::new(examples)?.with_note(&note))
}
