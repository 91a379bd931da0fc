//! Seeded synthetic data: planted-signal corpora, beta-regression samples and the
//! shipped end-to-end fixture.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde_json::json;

use crate::affect::sigmoid;
use crate::corpus::{Corpus, GroupLabels, Post};
use crate::lexicon::{inflect_verb, IdiomEntry, Lexicon, SlotKind};
use crate::{Error, Result};

/// `n` rows of standard-normal features with beta-distributed targets whose mean
/// is `sigmoid(beta[0] + x . beta[1..])` and whose precision is `phi`.
pub fn beta_regression_data(
    n: usize,
    beta: &[f64],
    phi: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = beta.len() - 1;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let eta = beta[0] + beta[1..].iter().zip(&x).map(|(b, v)| b * v).sum::<f64>();
        let mu = sigmoid(eta);
        let y: f64 = Beta::new(mu * phi, (1.0 - mu) * phi)
            .expect("positive shape parameters")
            .sample(&mut rng);
        xs.push(x);
        ys.push(y);
    }
    (xs, ys)
}

struct IdiomSpec {
    canonical: &'static str,
    definition: &'static str,
    verb: Option<usize>,
    slot: Option<usize>,
    /// Words that tend to surround the idiom, per group.
    context: [&'static [&'static str]; 2],
    /// Relative usage weight per group.
    weight: [f64; 2],
    /// Share of draws that use the idiom's words literally: one constituent
    /// word in the idiom's usual company instead of the idiom itself.
    literal: f64,
}

const PLANTED_IDIOMS: &[IdiomSpec] = &[
    IdiomSpec {
        canonical: "spill the beans",
        definition: "to reveal a secret",
        verb: Some(0),
        slot: None,
        context: [&["secret", "reveal", "surprise"], &["secret", "reveal", "surprise"]],
        weight: [5.0, 1.0],
        literal: 0.0,
    },
    IdiomSpec {
        canonical: "swallow one's pride",
        definition: "to accept something humiliating",
        verb: Some(0),
        slot: Some(1),
        context: [&["apologize", "accept", "humiliating"], &["apologize", "accept", "humiliating"]],
        weight: [2.0, 2.0],
        literal: 0.5,
    },
    IdiomSpec {
        canonical: "bury the hatchet",
        definition: "to end a quarrel and make peace",
        verb: Some(0),
        slot: None,
        context: [
            &["sister", "friend", "hug", "quarrel", "peace", "cousin"],
            &["treaty", "negotiate", "rival", "deal", "quarrel", "peace"],
        ],
        weight: [2.0, 2.0],
        literal: 0.0,
    },
    IdiomSpec {
        canonical: "over the moon",
        definition: "extremely happy and delighted",
        verb: None,
        slot: None,
        context: [&["happy", "delighted", "extremely"], &["happy", "delighted", "extremely"]],
        weight: [2.0, 2.0],
        literal: 0.0,
    },
    IdiomSpec {
        canonical: "pick a fight",
        definition: "to start an argument deliberately",
        verb: Some(0),
        slot: None,
        context: [&["argument", "start", "deliberately"], &["argument", "start", "deliberately"]],
        weight: [1.0, 3.0],
        literal: 0.0,
    },
];

/// Canonical form of the idiom planted to favour the first group.
pub const PLANTED_IDIOM: &str = "spill the beans";
/// Canonical form of the idiom whose context differs between the groups.
pub const SHIFTED_IDIOM: &str = "bury the hatchet";

const SHARED_WORDS: &[&str] = &[
    "day", "time", "people", "thing", "really", "good", "think", "know", "going", "week",
    "work", "home", "today", "year", "little", "right", "back", "way", "lot", "new",
    "told", "said", "maybe", "still", "never", "always", "night", "morning", "money", "life",
    // constituents of the lexicon idioms in their literal senses
    "beans", "spill", "moon", "fight", "pick", "bury",
];

const TOPICS: &[(&str, &[&str])] = &[
    ("cooking", &["recipe", "oven", "garlic", "bake", "dinner", "butter", "flour", "soup", "pasta", "kitchen", "spicy", "sauce"]),
    ("fashion", &["dress", "shoes", "makeup", "lipstick", "skirt", "jacket", "outfit", "boots", "style", "color", "scarf", "earrings"]),
    ("family", &["mom", "kids", "daughter", "baby", "husband", "wedding", "parents", "school", "birthday", "grandma", "toddler", "nanny"]),
    ("sports", &["game", "team", "season", "coach", "league", "score", "playoffs", "defense", "goal", "stadium", "trade", "roster"]),
    ("gaming", &["console", "level", "boss", "loot", "server", "patch", "controller", "quest", "raid", "spawn", "ranked", "lag"]),
    ("cars", &["engine", "tires", "brakes", "garage", "mileage", "truck", "gearbox", "exhaust", "turbo", "wheel", "mechanic", "oil"]),
    ("fitness", &["gym", "workout", "protein", "squat", "cardio", "muscle", "diet", "running", "stretch", "weights", "yoga", "sleep"]),
    ("feelings", &["sad", "anxious", "lonely", "angry", "calm", "proud", "scared", "excited", "tired", "grateful", "upset", "hopeful"]),
];

/// Topic weights per group, parallel to `TOPICS`.
const TOPIC_WEIGHTS: [[f64; 8]; 2] = [
    [4.0, 4.0, 4.0, 1.0, 1.0, 1.0, 2.0, 3.0],
    [1.0, 1.0, 1.0, 4.0, 4.0, 4.0, 3.0, 2.0],
];

const FILLER: &[&str] = &["the", "a", "and", "i", "it", "to", "of", "my", "so", "just", "was", "with", "that", "is"];

/// Knobs for [`generate_corpus`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub posts_per_group: usize,
    /// Probability that a post contains one idiom occurrence.
    pub idiom_rate: f64,
    /// Content words per post, inclusive range.
    pub min_words: usize,
    pub max_words: usize,
    /// When set, the second group's posts are copies of the first group's.
    pub mirror_groups: bool,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            posts_per_group: 500,
            idiom_rate: 0.5,
            min_words: 8,
            max_words: 14,
            mirror_groups: false,
            seed: 7,
        }
    }
}

/// The five-idiom lexicon used by the synthetic corpora.
pub fn synth_lexicon() -> Lexicon {
    Lexicon::from_entries(PLANTED_IDIOMS.iter().map(|s| {
        IdiomEntry::with_annotations(s.canonical, s.definition, s.verb, s.slot)
            .expect("valid built-in entry")
    }))
    .expect("distinct built-in canonicals")
}

fn realize(spec: &IdiomSpec, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut words: Vec<String> = spec.canonical.split(' ').map(str::to_string).collect();
    if let Some(v) = spec.verb {
        // the canonical form most of the time, an inflection otherwise
        if rng.random_bool(0.4) {
            let forms: Vec<String> = inflect_verb(&words[v]).into_iter().collect();
            words[v] = forms.choose(rng).expect("non-empty").clone();
        }
    }
    if let Some(s) = spec.slot {
        if rng.random_bool(0.6) {
            words[s] = SlotKind::Possessive
                .pronouns()
                .choose(rng)
                .expect("non-empty")
                .to_string();
        }
    }
    words
}

fn post_text(spec: &SynthSpec, group: usize, rng: &mut ChaCha8Rng) -> String {
    let topics = WeightedIndex::new(TOPIC_WEIGHTS[group]).expect("positive weights");
    let idioms = WeightedIndex::new(PLANTED_IDIOMS.iter().map(|s| s.weight[group]))
        .expect("positive weights");
    let topic = TOPICS[topics.sample(rng)].1;
    let n = rng.random_range(spec.min_words..=spec.max_words);
    let mut words: Vec<String> = (0..n)
        .map(|_| {
            let r: f64 = rng.random();
            let pool = if r < 0.55 {
                topic
            } else if r < 0.8 {
                SHARED_WORDS
            } else {
                FILLER
            };
            pool.choose(rng).expect("non-empty").to_string()
        })
        .collect();
    if rng.random_bool(spec.idiom_rate) {
        let idiom = &PLANTED_IDIOMS[idioms.sample(rng)];
        let mut span = if rng.random_bool(idiom.literal) {
            let content: Vec<&str> = idiom
                .canonical
                .split(' ')
                .enumerate()
                .filter(|&(i, w)| Some(i) != idiom.slot && w.len() > 3)
                .map(|(_, w)| w)
                .collect();
            vec![content.choose(rng).expect("a content word").to_string()]
        } else {
            realize(idiom, rng)
        };
        let context = idiom.context[group];
        for _ in 0..2 {
            span.push(context.choose(rng).expect("non-empty").to_string());
            span.insert(0, context.choose(rng).expect("non-empty").to_string());
        }
        let at = rng.random_range(0..=words.len());
        words.splice(at..at, span);
    }
    words.join(" ")
}

/// Two-group corpus over the [`synth_lexicon`] idioms. Group 0 uses
/// [`PLANTED_IDIOM`] five times as often as group 1, and the groups surround
/// [`SHIFTED_IDIOM`] with different words.
pub fn generate_corpus(spec: &SynthSpec, labels: &GroupLabels) -> Result<Corpus> {
    if spec.min_words == 0 || spec.min_words > spec.max_words {
        return Err(Error::InvalidArgument("bad post length range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut posts: Vec<Post> = Vec::with_capacity(2 * spec.posts_per_group);
    for g in 0..2 {
        for i in 0..spec.posts_per_group {
            let text = if spec.mirror_groups && g == 1 {
                posts[i].text.clone()
            } else {
                post_text(spec, g, &mut rng)
            };
            posts.push(Post::new(format!("{}{i}", labels.label(g)), g, text));
        }
    }
    Corpus::new(labels.clone(), posts)
}

/// The planted-signal corpus: 500 posts per group with the default spec.
pub fn planted_corpus(seed: u64) -> (Corpus, Lexicon) {
    let spec = SynthSpec {
        seed,
        ..SynthSpec::default()
    };
    let corpus = generate_corpus(&spec, &GroupLabels::default()).expect("valid spec");
    (corpus, synth_lexicon())
}

/// Words of the VAD fixture with hand-assigned (valence, arousal, dominance) anchors.
const VAD_ANCHORS: &[(&str, [f64; 3])] = &[
    ("happy", [0.95, 0.6, 0.75]), ("delighted", [0.95, 0.7, 0.7]), ("grateful", [0.9, 0.35, 0.6]),
    ("proud", [0.85, 0.6, 0.85]), ("excited", [0.9, 0.9, 0.7]), ("hopeful", [0.85, 0.5, 0.6]),
    ("calm", [0.75, 0.1, 0.6]), ("peace", [0.85, 0.15, 0.65]), ("friend", [0.9, 0.4, 0.65]),
    ("hug", [0.9, 0.4, 0.55]), ("wedding", [0.9, 0.65, 0.6]), ("birthday", [0.9, 0.7, 0.6]),
    ("baby", [0.85, 0.5, 0.3]), ("surprise", [0.75, 0.85, 0.5]), ("secret", [0.45, 0.6, 0.45]),
    ("reveal", [0.6, 0.6, 0.55]), ("sad", [0.1, 0.3, 0.25]), ("lonely", [0.1, 0.25, 0.2]),
    ("anxious", [0.15, 0.85, 0.2]), ("angry", [0.1, 0.9, 0.6]), ("scared", [0.1, 0.85, 0.15]),
    ("upset", [0.15, 0.7, 0.3]), ("tired", [0.25, 0.1, 0.3]), ("humiliating", [0.05, 0.7, 0.1]),
    ("quarrel", [0.15, 0.75, 0.5]), ("argument", [0.2, 0.75, 0.55]), ("rival", [0.3, 0.7, 0.6]),
    ("apologize", [0.45, 0.4, 0.3]), ("accept", [0.65, 0.3, 0.5]), ("negotiate", [0.55, 0.55, 0.7]),
    ("deal", [0.6, 0.5, 0.65]), ("treaty", [0.6, 0.3, 0.6]), ("start", [0.6, 0.6, 0.65]),
    ("extremely", [0.5, 0.8, 0.55]), ("deliberately", [0.45, 0.55, 0.7]), ("defense", [0.5, 0.6, 0.6]),
    ("game", [0.75, 0.7, 0.6]), ("team", [0.75, 0.55, 0.65]), ("goal", [0.8, 0.6, 0.75]),
    ("boss", [0.45, 0.6, 0.8]), ("engine", [0.55, 0.55, 0.65]), ("garage", [0.5, 0.3, 0.55]),
    ("gym", [0.65, 0.7, 0.7]), ("muscle", [0.65, 0.65, 0.8]), ("dinner", [0.85, 0.4, 0.6]),
    ("recipe", [0.7, 0.35, 0.6]), ("dress", [0.75, 0.45, 0.55]), ("makeup", [0.65, 0.45, 0.5]),
    ("school", [0.6, 0.5, 0.5]), ("money", [0.75, 0.6, 0.75]),
];

/// Writes the end-to-end fixture: `corpus.jsonl`, `lexicon.jsonl`, `vad.csv` and
/// `figlex.conf`. Paths in the config are relative to `dir`.
pub fn write_fixture(dir: &Path, spec: &SynthSpec) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let labels = GroupLabels::default();
    let corpus = generate_corpus(spec, &labels)?;
    let mut out = String::new();
    for p in corpus.posts() {
        let rec = json!({
            "author_id": p.author_id,
            "group": labels.label(p.group),
            "text": p.text,
        });
        writeln!(out, "{rec}").unwrap();
    }
    write(dir.join("corpus.jsonl").as_path(), &out)?;

    let mut out = String::new();
    for s in PLANTED_IDIOMS {
        let mut rec = json!({ "canonical": s.canonical, "definition": s.definition });
        if let Some(v) = s.verb {
            rec["verb_index"] = json!(v);
        }
        if let Some(i) = s.slot {
            rec["slot_index"] = json!(i);
            rec["slot_kind"] = json!("possessive");
        }
        writeln!(out, "{rec}").unwrap();
    }
    write(dir.join("lexicon.jsonl").as_path(), &out)?;

    // anchors with a little seeded jitter so the ratings are not exactly separable
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed);
    let mut out = String::from("word,valence,arousal,dominance\n");
    for (word, vad) in VAD_ANCHORS {
        let v: Vec<String> = vad
            .iter()
            .map(|x| {
                let j: f64 = rng.random_range(-0.03..0.03);
                format!("{:.3}", (x + j).clamp(0.0, 1.0))
            })
            .collect();
        writeln!(out, "{word},{}", v.join(",")).unwrap();
    }
    write(dir.join("vad.csv").as_path(), &out)?;

    let config = "\
# end-to-end fixture; paths are relative to this file
corpus = corpus.jsonl
lexicon = lexicon.jsonl
vad_lexicon = vad.csv
out = out
seed = 11
groups = F,M
min_count = 2
literality_threshold = 0.75
rbo_depth = 30
n_splits = 200
dim = 32
window = 4
negatives = 5
embed_min_count = 3
epochs = 20
initial_lr = 0.025
baseline_n = 200
";
    write(dir.join("figlex.conf").as_path(), config)
}

fn write(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}
