//! Porter stemmer, original 1980 algorithm.
//!
//! Within each rule group only the longest matching suffix is considered;
//! if its condition fails no other rule in the group fires. This follows
//! the published rule lists exactly (no later revisions such as
//! bli -> ble or logi -> log).

struct Stemmer {
    b: Vec<u8>,
    /// Length of the stem part once a suffix has matched.
    stem_len: usize,
}

impl Stemmer {
    fn new(word: &[u8]) -> Self {
        Stemmer {
            b: word.to_vec(),
            stem_len: 0,
        }
    }

    fn last(&self) -> u8 {
        *self.b.last().unwrap()
    }

    fn is_consonant(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => {
                if i == 0 {
                    true
                } else {
                    !self.is_consonant(i - 1)
                }
            }
            _ => true,
        }
    }

    /// The measure m of b[0..len]: number of VC sequences.
    fn measure_of(&self, len: usize) -> usize {
        let mut n = 0;
        let mut i = 0;
        // Skip the initial consonant run.
        while i < len && self.is_consonant(i) {
            i += 1;
        }
        loop {
            while i < len && !self.is_consonant(i) {
                i += 1;
            }
            if i == len {
                return n;
            }
            n += 1;
            while i < len && self.is_consonant(i) {
                i += 1;
            }
            if i == len {
                return n;
            }
        }
    }

    fn measure(&self) -> usize {
        self.measure_of(self.stem_len)
    }

    fn stem_has_vowel(&self) -> bool {
        (0..self.stem_len).any(|i| !self.is_consonant(i))
    }

    /// True when b[i-1..=i] is a double consonant.
    fn double_consonant(&self, i: usize) -> bool {
        i >= 1 && self.b[i] == self.b[i - 1] && self.is_consonant(i)
    }

    /// True when b[i-2..=i] is consonant-vowel-consonant and the final
    /// consonant is not w, x, or y.
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.is_consonant(i) || self.is_consonant(i - 1) || !self.is_consonant(i - 2) {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    /// If the word ends with `suffix`, record the stem length and return true.
    fn ends(&mut self, suffix: &[u8]) -> bool {
        if suffix.len() > self.b.len() {
            return false;
        }
        if self.b.ends_with(suffix) {
            self.stem_len = self.b.len() - suffix.len();
            true
        } else {
            false
        }
    }

    /// Replace the matched suffix with `s`.
    fn set_to(&mut self, s: &[u8]) {
        self.b.truncate(self.stem_len);
        self.b.extend_from_slice(s);
    }

    fn replace_if_measure(&mut self, s: &[u8]) {
        if self.measure() > 0 {
            self.set_to(s);
        }
    }

    // SSES -> SS, IES -> I, SS -> SS, S -> ""
    fn step_1a(&mut self) {
        if self.last() == b's' {
            if self.ends(b"sses") {
                self.b.truncate(self.b.len() - 2);
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.b.len() >= 2 && self.b[self.b.len() - 2] != b's' {
                self.b.truncate(self.b.len() - 1);
            }
        }
    }

    // (m>0) EED -> EE; (*v*) ED -> ""; (*v*) ING -> ""; plus cleanup.
    fn step_1b(&mut self) {
        if self.ends(b"eed") {
            if self.measure() > 0 {
                self.b.truncate(self.b.len() - 1);
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.stem_has_vowel() {
            self.set_to(b"");
            if self.ends(b"at") || self.ends(b"bl") || self.ends(b"iz") {
                self.b.push(b'e');
            } else if !self.b.is_empty() && self.double_consonant(self.b.len() - 1) {
                if !matches!(self.last(), b'l' | b's' | b'z') {
                    self.b.truncate(self.b.len() - 1);
                }
            } else if self.measure_of(self.b.len()) == 1 && self.cvc(self.b.len() - 1) {
                self.b.push(b'e');
            }
        }
    }

    // (*v*) Y -> I
    fn step_1c(&mut self) {
        if self.ends(b"y") && self.stem_has_vowel() {
            let n = self.b.len();
            self.b[n - 1] = b'i';
        }
    }

    fn apply_rules(&mut self, rules: &[(&[u8], &[u8])]) {
        // Longest matching suffix wins; if its condition (m > 0) fails,
        // no other rule in the group is tried.
        let mut candidates: Vec<&(&[u8], &[u8])> = rules.iter().collect();
        candidates.sort_by_key(|(suf, _)| std::cmp::Reverse(suf.len()));
        for (suffix, replacement) in candidates {
            if self.ends(suffix) {
                self.replace_if_measure(replacement);
                return;
            }
        }
    }

    fn step_2(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"ational", b"ate"),
            (b"tional", b"tion"),
            (b"enci", b"ence"),
            (b"anci", b"ance"),
            (b"izer", b"ize"),
            (b"abli", b"able"),
            (b"alli", b"al"),
            (b"entli", b"ent"),
            (b"eli", b"e"),
            (b"ousli", b"ous"),
            (b"ization", b"ize"),
            (b"ation", b"ate"),
            (b"ator", b"ate"),
            (b"alism", b"al"),
            (b"iveness", b"ive"),
            (b"fulness", b"ful"),
            (b"ousness", b"ous"),
            (b"aliti", b"al"),
            (b"iviti", b"ive"),
            (b"biliti", b"ble"),
        ];
        self.apply_rules(RULES);
    }

    fn step_3(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"icate", b"ic"),
            (b"ative", b""),
            (b"alize", b"al"),
            (b"iciti", b"ic"),
            (b"ical", b"ic"),
            (b"ful", b""),
            (b"ness", b""),
        ];
        self.apply_rules(RULES);
    }

    fn step_4(&mut self) {
        const SUFFIXES: &[&[u8]] = &[
            b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment",
            b"ent", b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
        ];
        let mut candidates: Vec<&&[u8]> = SUFFIXES.iter().collect();
        candidates.sort_by_key(|suf| std::cmp::Reverse(suf.len()));
        for suffix in candidates {
            if self.ends(suffix) {
                // ION is only removed after s or t.
                let ion_ok = **suffix != *b"ion"
                    || (self.stem_len >= 1
                        && matches!(self.b[self.stem_len - 1], b's' | b't'));
                if ion_ok && self.measure() > 1 {
                    self.set_to(b"");
                }
                return;
            }
        }
    }

    // (m>1) E -> ""; (m=1 and not *o) E -> ""
    fn step_5a(&mut self) {
        if self.last() == b'e' {
            let a = self.measure_of(self.b.len());
            if a > 1 || (a == 1 && !self.cvc(self.b.len() - 2)) {
                self.b.truncate(self.b.len() - 1);
            }
        }
    }

    // (m>1 and *d and *L) -> single letter
    fn step_5b(&mut self) {
        if self.last() == b'l'
            && self.double_consonant(self.b.len() - 1)
            && self.measure_of(self.b.len()) > 1
        {
            self.b.truncate(self.b.len() - 1);
        }
    }

    fn run(mut self) -> String {
        self.step_1a();
        if self.b.len() > 1 {
            self.step_1b();
        }
        if self.b.len() > 1 {
            self.step_1c();
            self.step_2();
            self.step_3();
            self.step_4();
            self.step_5a();
            self.step_5b();
        }
        String::from_utf8(self.b).expect("stemmer operates on ascii")
    }
}

/// Stems a lowercase alphabetic word. Words of length <= 2 are returned
/// unchanged; non-lowercase-ascii input passes through untouched.
pub fn porter_stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    Stemmer::new(word.as_bytes()).run()
}
