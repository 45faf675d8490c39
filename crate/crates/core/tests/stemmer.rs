use chvenrich::corpus::stem_word;

#[test]
fn matches_reference_vocabulary() {
    let data = include_str!("data/porter2_en.tsv");
    let mut mismatches = Vec::new();
    let mut total = 0;
    for line in data.lines() {
        let (word, expected) = line.split_once('\t').expect("word<TAB>stem");
        total += 1;
        let got = stem_word(word);
        if got != expected {
            mismatches.push(format!("{word}: got {got}, want {expected}"));
        }
    }
    assert!(total > 29_000);
    assert!(mismatches.is_empty(), "{} of {total} differ:\n{}", mismatches.len(), mismatches[..mismatches.len().min(40)].join("\n"));
}
