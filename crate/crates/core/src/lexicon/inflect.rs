//! English verb inflection for canonical-form expansion.

use std::collections::BTreeSet;

// lemma, 3rd person singular, past, past participle, gerund
const IRREGULAR: &[(&str, &[&str])] = &[
    ("be", &["is", "was", "been", "being", "am", "are", "were"]),
    ("have", &["has", "had", "having"]),
    ("do", &["does", "did", "done", "doing"]),
    ("go", &["goes", "went", "gone", "going"]),
    ("bear", &["bears", "bore", "borne", "born", "bearing"]),
    ("beat", &["beats", "beat", "beaten", "beating"]),
    ("become", &["becomes", "became", "become", "becoming"]),
    ("begin", &["begins", "began", "begun", "beginning"]),
    ("bend", &["bends", "bent", "bending"]),
    ("bet", &["bets", "bet", "betting"]),
    ("bite", &["bites", "bit", "bitten", "biting"]),
    ("bleed", &["bleeds", "bled", "bleeding"]),
    ("blow", &["blows", "blew", "blown", "blowing"]),
    ("break", &["breaks", "broke", "broken", "breaking"]),
    ("bring", &["brings", "brought", "bringing"]),
    ("build", &["builds", "built", "building"]),
    ("burn", &["burns", "burned", "burnt", "burning"]),
    ("buy", &["buys", "bought", "buying"]),
    ("catch", &["catches", "caught", "catching"]),
    ("choose", &["chooses", "chose", "chosen", "choosing"]),
    ("come", &["comes", "came", "come", "coming"]),
    ("cost", &["costs", "cost", "costing"]),
    ("cut", &["cuts", "cut", "cutting"]),
    ("deal", &["deals", "dealt", "dealing"]),
    ("dig", &["digs", "dug", "digging"]),
    ("draw", &["draws", "drew", "drawn", "drawing"]),
    ("drink", &["drinks", "drank", "drunk", "drinking"]),
    ("drive", &["drives", "drove", "driven", "driving"]),
    ("eat", &["eats", "ate", "eaten", "eating"]),
    ("fall", &["falls", "fell", "fallen", "falling"]),
    ("feed", &["feeds", "fed", "feeding"]),
    ("feel", &["feels", "felt", "feeling"]),
    ("fight", &["fights", "fought", "fighting"]),
    ("find", &["finds", "found", "finding"]),
    ("fly", &["flies", "flew", "flown", "flying"]),
    ("forget", &["forgets", "forgot", "forgotten", "forgetting"]),
    ("forgive", &["forgives", "forgave", "forgiven", "forgiving"]),
    ("freeze", &["freezes", "froze", "frozen", "freezing"]),
    ("get", &["gets", "got", "gotten", "getting"]),
    ("give", &["gives", "gave", "given", "giving"]),
    ("grow", &["grows", "grew", "grown", "growing"]),
    ("hang", &["hangs", "hung", "hanged", "hanging"]),
    ("hear", &["hears", "heard", "hearing"]),
    ("hide", &["hides", "hid", "hidden", "hiding"]),
    ("hit", &["hits", "hit", "hitting"]),
    ("hold", &["holds", "held", "holding"]),
    ("hurt", &["hurts", "hurt", "hurting"]),
    ("keep", &["keeps", "kept", "keeping"]),
    ("know", &["knows", "knew", "known", "knowing"]),
    ("lay", &["lays", "laid", "laying"]),
    ("lead", &["leads", "led", "leading"]),
    ("leave", &["leaves", "left", "leaving"]),
    ("lend", &["lends", "lent", "lending"]),
    ("let", &["lets", "let", "letting"]),
    ("lie", &["lies", "lay", "lain", "lied", "lying"]),
    ("light", &["lights", "lit", "lighted", "lighting"]),
    ("lose", &["loses", "lost", "losing"]),
    ("make", &["makes", "made", "making"]),
    ("mean", &["means", "meant", "meaning"]),
    ("meet", &["meets", "met", "meeting"]),
    ("pay", &["pays", "paid", "paying"]),
    ("put", &["puts", "put", "putting"]),
    ("quit", &["quits", "quit", "quitting"]),
    ("read", &["reads", "read", "reading"]),
    ("ride", &["rides", "rode", "ridden", "riding"]),
    ("ring", &["rings", "rang", "rung", "ringing"]),
    ("rise", &["rises", "rose", "risen", "rising"]),
    ("run", &["runs", "ran", "run", "running"]),
    ("say", &["says", "said", "saying"]),
    ("see", &["sees", "saw", "seen", "seeing"]),
    ("seek", &["seeks", "sought", "seeking"]),
    ("sell", &["sells", "sold", "selling"]),
    ("send", &["sends", "sent", "sending"]),
    ("set", &["sets", "set", "setting"]),
    ("shake", &["shakes", "shook", "shaken", "shaking"]),
    ("shed", &["sheds", "shed", "shedding"]),
    ("shoot", &["shoots", "shot", "shooting"]),
    ("show", &["shows", "showed", "shown", "showing"]),
    ("shut", &["shuts", "shut", "shutting"]),
    ("sing", &["sings", "sang", "sung", "singing"]),
    ("sink", &["sinks", "sank", "sunk", "sinking"]),
    ("sit", &["sits", "sat", "sitting"]),
    ("sleep", &["sleeps", "slept", "sleeping"]),
    ("slide", &["slides", "slid", "sliding"]),
    ("speak", &["speaks", "spoke", "spoken", "speaking"]),
    ("spend", &["spends", "spent", "spending"]),
    ("spill", &["spills", "spilled", "spilt", "spilling"]),
    ("spin", &["spins", "spun", "spinning"]),
    ("split", &["splits", "split", "splitting"]),
    ("spread", &["spreads", "spread", "spreading"]),
    ("stand", &["stands", "stood", "standing"]),
    ("steal", &["steals", "stole", "stolen", "stealing"]),
    ("stick", &["sticks", "stuck", "sticking"]),
    ("sting", &["stings", "stung", "stinging"]),
    ("strike", &["strikes", "struck", "stricken", "striking"]),
    ("swear", &["swears", "swore", "sworn", "swearing"]),
    ("sweep", &["sweeps", "swept", "sweeping"]),
    ("swim", &["swims", "swam", "swum", "swimming"]),
    ("swing", &["swings", "swung", "swinging"]),
    ("take", &["takes", "took", "taken", "taking"]),
    ("teach", &["teaches", "taught", "teaching"]),
    ("tear", &["tears", "tore", "torn", "tearing"]),
    ("tell", &["tells", "told", "telling"]),
    ("think", &["thinks", "thought", "thinking"]),
    ("throw", &["throws", "threw", "thrown", "throwing"]),
    ("wake", &["wakes", "woke", "woken", "waking"]),
    ("wear", &["wears", "wore", "worn", "wearing"]),
    ("weep", &["weeps", "wept", "weeping"]),
    ("win", &["wins", "won", "winning"]),
    ("wind", &["winds", "wound", "winding"]),
    ("write", &["writes", "wrote", "written", "writing"]),
];

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn vowel_groups(word: &[u8]) -> usize {
    let mut groups = 0;
    let mut prev = false;
    for &c in word {
        let v = is_vowel(c) || c == b'y' && groups > 0 && !prev;
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    groups
}

/// Short consonant-vowel-consonant endings double their last letter (`stop` -> `stopped`).
fn doubles_final(word: &str) -> bool {
    let b = word.as_bytes();
    let n = b.len();
    if n < 3 {
        return false;
    }
    let (c1, v, c2) = (b[n - 3], b[n - 2], b[n - 1]);
    !is_vowel(c1)
        && is_vowel(v)
        && !is_vowel(c2)
        && !matches!(c2, b'w' | b'x' | b'y')
        && vowel_groups(b) == 1
}

fn consonant_y(word: &str) -> bool {
    let b = word.as_bytes();
    b.len() >= 2 && b[b.len() - 1] == b'y' && !is_vowel(b[b.len() - 2])
}

fn third_person(lemma: &str) -> String {
    if consonant_y(lemma) {
        format!("{}ies", &lemma[..lemma.len() - 1])
    } else if ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| lemma.ends_with(s)) {
        format!("{lemma}es")
    } else {
        format!("{lemma}s")
    }
}

fn past(lemma: &str) -> String {
    if lemma.ends_with('e') {
        format!("{lemma}d")
    } else if consonant_y(lemma) {
        format!("{}ied", &lemma[..lemma.len() - 1])
    } else if doubles_final(lemma) {
        format!("{lemma}{}ed", &lemma[lemma.len() - 1..])
    } else {
        format!("{lemma}ed")
    }
}

fn gerund(lemma: &str) -> String {
    if let Some(stem) = lemma.strip_suffix("ie") {
        format!("{stem}ying")
    } else if lemma.ends_with('e') && !["ee", "ye", "oe"].iter().any(|s| lemma.ends_with(s)) {
        format!("{}ing", &lemma[..lemma.len() - 1])
    } else if doubles_final(lemma) {
        format!("{lemma}{}ing", &lemma[lemma.len() - 1..])
    } else {
        format!("{lemma}ing")
    }
}

/// All inflected forms of `lemma`, including the lemma itself.
///
/// Irregular verbs come from a built-in table; everything else follows the regular
/// suffix rules (e-drop, consonant doubling, y to ies/ied).
pub fn inflect_verb(lemma: &str) -> BTreeSet<String> {
    let mut forms = BTreeSet::new();
    forms.insert(lemma.to_string());
    if let Some((_, irregular)) = IRREGULAR.iter().find(|(l, _)| *l == lemma) {
        forms.extend(irregular.iter().map(|s| s.to_string()));
        return forms;
    }
    if !lemma.bytes().all(|c| c.is_ascii_lowercase()) {
        return forms;
    }
    forms.insert(third_person(lemma));
    forms.insert(past(lemma));
    forms.insert(gerund(lemma));
    forms
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn regular_verbs() {
        assert_eq!(inflect_verb("pick"), set(&["pick", "picks", "picked", "picking"]));
        assert_eq!(
            inflect_verb("swallow"),
            set(&["swallow", "swallows", "swallowed", "swallowing"])
        );
        assert_eq!(inflect_verb("stop"), set(&["stop", "stops", "stopped", "stopping"]));
        assert_eq!(inflect_verb("bury"), set(&["bury", "buries", "buried", "burying"]));
        assert_eq!(inflect_verb("raise"), set(&["raise", "raises", "raised", "raising"]));
        assert_eq!(inflect_verb("kick"), set(&["kick", "kicks", "kicked", "kicking"]));
        assert_eq!(inflect_verb("miss"), set(&["miss", "misses", "missed", "missing"]));
        assert_eq!(inflect_verb("play"), set(&["play", "plays", "played", "playing"]));
        assert_eq!(inflect_verb("visit"), set(&["visit", "visits", "visited", "visiting"]));
        assert_eq!(inflect_verb("agree"), set(&["agree", "agrees", "agreed", "agreeing"]));
    }

    #[test]
    fn irregular_verbs() {
        assert_eq!(
            inflect_verb("be"),
            set(&["be", "is", "was", "been", "being", "am", "are", "were"])
        );
        assert_eq!(inflect_verb("mean"), set(&["mean", "means", "meant", "meaning"]));
        assert_eq!(inflect_verb("sit"), set(&["sit", "sits", "sat", "sitting"]));
        assert_eq!(inflect_verb("put"), set(&["put", "puts", "putting"]));
    }
}
