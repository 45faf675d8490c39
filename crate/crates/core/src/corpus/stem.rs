//! English Snowball (Porter2) stemmer.
//!
//! This is the classic revision of the algorithm, the one whose reference
//! vocabulary/output pair ships with the Snowball test data. Regions, the
//! `Y` marking and every step follow the Snowball source semantics exactly,
//! including longest-suffix selection before the region test.

const EXCEPTIONS: &[(&str, &str)] = &[
    ("skis", "ski"),
    ("skies", "sky"),
    ("dying", "die"),
    ("lying", "lie"),
    ("tying", "tie"),
    ("idly", "idl"),
    ("gently", "gentl"),
    ("ugly", "ugli"),
    ("early", "earli"),
    ("only", "onli"),
    ("singly", "singl"),
    ("sky", "sky"),
    ("news", "news"),
    ("howe", "howe"),
    ("atlas", "atlas"),
    ("cosmos", "cosmos"),
    ("bias", "bias"),
    ("andes", "andes"),
];

const POST_STEP_1A_INVARIANT: &[&str] = &[
    "inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed",
];

const REGION_PREFIXES: &[&str] = &["gener", "commun", "arsen"];

#[inline]
fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

#[inline]
fn is_vowel_wxy(c: char) -> bool {
    is_vowel(c) || matches!(c, 'w' | 'x' | 'Y')
}

#[inline]
fn is_valid_li(c: char) -> bool {
    matches!(c, 'c' | 'd' | 'e' | 'g' | 'h' | 'k' | 'm' | 'n' | 'r' | 't')
}

struct Word {
    chars: Vec<char>,
    r1: usize,
    r2: usize,
}

impl Word {
    fn len(&self) -> usize {
        self.chars.len()
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        n <= self.len() && self.chars[self.len() - n..].iter().copied().eq(suffix.chars())
    }

    /// Longest suffix from `candidates` the word ends with.
    fn longest<'a>(&self, candidates: &[&'a str]) -> Option<&'a str> {
        candidates
            .iter()
            .copied()
            .filter(|s| self.ends_with(s))
            .max_by_key(|s| s.chars().count())
    }

    fn start_of(&self, suffix: &str) -> usize {
        self.len() - suffix.chars().count()
    }

    fn replace_suffix(&mut self, suffix: &str, with: &str) {
        let start = self.start_of(suffix);
        self.chars.truncate(start);
        self.chars.extend(with.chars());
    }

    fn char_before(&self, pos: usize) -> Option<char> {
        pos.checked_sub(1).map(|i| self.chars[i])
    }

    /// Short syllable ending at `end` (exclusive).
    fn short_syllable_at(&self, end: usize) -> bool {
        let c = &self.chars;
        if end >= 3 && !is_vowel_wxy(c[end - 1]) && is_vowel(c[end - 2]) && !is_vowel(c[end - 3]) {
            return true;
        }
        end == 2 && !is_vowel(c[1]) && is_vowel(c[0])
    }

    fn mark_regions(&mut self) {
        let n = self.len();
        self.r1 = n;
        self.r2 = n;
        let prefixed = REGION_PREFIXES.iter().find(|p| {
            let p: Vec<char> = p.chars().collect();
            self.chars.starts_with(&p)
        });
        let r1 = match prefixed {
            Some(p) => Some(p.chars().count()),
            None => self.past_vowel_consonant(0),
        };
        if let Some(r1) = r1 {
            self.r1 = r1;
            if let Some(r2) = self.past_vowel_consonant(r1) {
                self.r2 = r2;
            }
        }
    }

    /// Position just after the first non-vowel that follows a vowel, scanning from `from`.
    fn past_vowel_consonant(&self, from: usize) -> Option<usize> {
        let c = &self.chars;
        let v = (from..c.len()).find(|&i| is_vowel(c[i]))?;
        let nv = (v + 1..c.len()).find(|&i| !is_vowel(c[i]))?;
        Some(nv + 1)
    }

    fn step_1a(&mut self) {
        if let Some(s) = self.longest(&["'", "'s", "'s'"]) {
            let start = self.start_of(s);
            self.chars.truncate(start);
        }
        match self.longest(&["sses", "ied", "ies", "s", "us", "ss"]) {
            Some("sses") => self.replace_suffix("sses", "ss"),
            Some(s @ ("ied" | "ies")) => {
                let with = if self.start_of(s) >= 2 { "i" } else { "ie" };
                self.replace_suffix(s, with);
            }
            Some("s") => {
                let start = self.start_of("s");
                if start >= 1 && self.chars[..start - 1].iter().any(|&c| is_vowel(c)) {
                    self.chars.truncate(start);
                }
            }
            _ => {}
        }
    }

    fn step_1b(&mut self) {
        match self.longest(&["eed", "eedly", "ed", "edly", "ing", "ingly"]) {
            Some(s @ ("eed" | "eedly")) => {
                if self.start_of(s) >= self.r1 {
                    self.replace_suffix(s, "ee");
                }
            }
            Some(s) => {
                let start = self.start_of(s);
                if !self.chars[..start].iter().any(|&c| is_vowel(c)) {
                    return;
                }
                self.chars.truncate(start);
                const DOUBLES: &[&str] = &["bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"];
                if self.longest(&["at", "bl", "iz"]).is_some() {
                    self.chars.push('e');
                } else if self.longest(DOUBLES).is_some() {
                    self.chars.pop();
                } else if self.len() == self.r1 && self.short_syllable_at(self.len()) {
                    self.chars.push('e');
                }
            }
            None => {}
        }
    }

    fn step_1c(&mut self) {
        let n = self.len();
        if n >= 3 && matches!(self.chars[n - 1], 'y' | 'Y') && !is_vowel(self.chars[n - 2]) {
            self.chars[n - 1] = 'i';
        }
    }

    fn step_2(&mut self) {
        const SUFFIXES: &[&str] = &[
            "tional", "enci", "anci", "abli", "entli", "izer", "ization", "ational", "ation",
            "ator", "alism", "aliti", "alli", "fulness", "ousli", "ousness", "iveness", "iviti",
            "biliti", "bli", "ogi", "fulli", "lessli", "li",
        ];
        let Some(s) = self.longest(SUFFIXES) else { return };
        let start = self.start_of(s);
        if start < self.r1 {
            return;
        }
        let with = match s {
            "tional" => "tion",
            "enci" => "ence",
            "anci" => "ance",
            "abli" => "able",
            "entli" => "ent",
            "izer" | "ization" => "ize",
            "ational" | "ation" | "ator" => "ate",
            "alism" | "aliti" | "alli" => "al",
            "fulness" | "fulli" => "ful",
            "ousli" | "ousness" => "ous",
            "iveness" | "iviti" => "ive",
            "biliti" | "bli" => "ble",
            "lessli" => "less",
            "ogi" => {
                if self.char_before(start) != Some('l') {
                    return;
                }
                "og"
            }
            "li" => {
                if !self.char_before(start).is_some_and(is_valid_li) {
                    return;
                }
                ""
            }
            _ => unreachable!(),
        };
        self.replace_suffix(s, with);
    }

    fn step_3(&mut self) {
        const SUFFIXES: &[&str] = &[
            "tional", "ational", "alize", "icate", "iciti", "ical", "ful", "ness", "ative",
        ];
        let Some(s) = self.longest(SUFFIXES) else { return };
        let start = self.start_of(s);
        if start < self.r1 {
            return;
        }
        let with = match s {
            "tional" => "tion",
            "ational" => "ate",
            "alize" => "al",
            "icate" | "iciti" | "ical" => "ic",
            "ful" | "ness" => "",
            "ative" => {
                if start < self.r2 {
                    return;
                }
                ""
            }
            _ => unreachable!(),
        };
        self.replace_suffix(s, with);
    }

    fn step_4(&mut self) {
        const SUFFIXES: &[&str] = &[
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent",
            "ism", "ate", "iti", "ous", "ive", "ize", "ion",
        ];
        let Some(s) = self.longest(SUFFIXES) else { return };
        let start = self.start_of(s);
        if start < self.r2 {
            return;
        }
        if s == "ion" && !matches!(self.char_before(start), Some('s' | 't')) {
            return;
        }
        self.chars.truncate(start);
    }

    fn step_5(&mut self) {
        let n = self.len();
        if self.ends_with("e") {
            let start = n - 1;
            if start >= self.r2 || (start >= self.r1 && !self.short_syllable_at(start)) {
                self.chars.truncate(start);
            }
        } else if self.ends_with("l") {
            let start = n - 1;
            if start >= self.r2 && self.char_before(start) == Some('l') {
                self.chars.truncate(start);
            }
        }
    }
}

/// Stems a single lowercase word.
pub fn stem_word(word: &str) -> String {
    if let Some((_, out)) = EXCEPTIONS.iter().find(|(w, _)| *w == word) {
        return (*out).to_string();
    }
    let mut chars: Vec<char> = word.chars().collect();
    if chars.len() < 3 {
        return word.to_string();
    }

    if chars[0] == '\'' {
        chars.remove(0);
    }
    let mut y_marked = false;
    if chars.first() == Some(&'y') {
        chars[0] = 'Y';
        y_marked = true;
    }
    for i in 1..chars.len() {
        if chars[i] == 'y' && is_vowel(chars[i - 1]) {
            chars[i] = 'Y';
            y_marked = true;
        }
    }

    let mut w = Word { chars, r1: 0, r2: 0 };
    w.mark_regions();
    w.step_1a();
    let invariant = {
        let s: String = w.chars.iter().collect();
        POST_STEP_1A_INVARIANT.contains(&s.as_str())
    };
    if !invariant {
        w.step_1b();
        w.step_1c();
        w.step_2();
        w.step_3();
        w.step_4();
        w.step_5();
    }

    w.chars
        .into_iter()
        .map(|c| if y_marked && c == 'Y' { 'y' } else { c })
        .collect()
}

/// Stems a token. Underscore-joined multiword tokens are stemmed segment by
/// segment and rejoined.
pub fn stem(token: &str) -> String {
    if token.contains('_') {
        token.split('_').map(stem_word).collect::<Vec<_>>().join("_")
    } else {
        stem_word(token)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fatigue_family_collapses() {
        for w in ["fatigue", "fatigues", "fatigued", "fatiguing"] {
            assert_eq!(stem(w), "fatigu", "{w}");
        }
    }

    #[test]
    fn short_and_plain_words() {
        assert_eq!(stem("flu"), "flu");
        assert_eq!(stem("a"), "a");
        assert_eq!(stem("psoriasis"), "psoriasi");
        assert_eq!(stem("headache"), "headach");
    }

    #[test]
    fn exceptions_and_invariants() {
        assert_eq!(stem("skies"), "sky");
        assert_eq!(stem("news"), "news");
        assert_eq!(stem("succeed"), "succeed");
        assert_eq!(stem("generously"), "generous");
    }

    #[test]
    fn y_handling() {
        assert_eq!(stem("cry"), "cri");
        assert_eq!(stem("say"), "say");
        assert_eq!(stem("youth"), "youth");
        assert_eq!(stem("enjoying"), "enjoy");
    }

    #[test]
    fn multiword_is_stemmed_per_segment() {
        assert_eq!(stem("chili_peppers"), "chili_pepper");
        assert_eq!(stem("pig_out"), "pig_out");
        assert_eq!(stem("dead_weights"), "dead_weight");
    }
}
