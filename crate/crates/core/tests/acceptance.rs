//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use squatlab::detector::{analyze, Detector, DetectorConfig, Technique};
use squatlab::distance::{damerau_levenshtein, levenshtein};
use squatlab::domain::{punycode_decode, punycode_encode, ConfusableTable, Domain};
use squatlab::evaluator::{evaluate, EvalMetrics, HeuristicEngine, Verdict};
use squatlab::gateway::mock::{MockReply, MockServer};
use squatlab::gateway::{EndpointConfig, LlmClient};
use squatlab::generator::{build_dataset, generate_variant, BuildOptions, Dataset, LabeledExample, Source};
use squatlab::index::ReferenceIndex;

fn assets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("assets")
}

fn read_list(name: &str) -> Vec<String> {
    fs::read_to_string(assets().join(name))
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

fn d(s: &str) -> Domain {
    Domain::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1

const KNOWN_REFS: [&str; 9] = [
    "google.com",
    "microsoft.com",
    "facebook.com",
    "paypal.com",
    "netflix.com",
    "apple.com",
    "bankofamerica.com",
    "dell.com",
    "ihg.com",
];

const KNOWN_SQUATS: [&str; 13] = [
    "go0gle.com",
    "gogle.com",
    "gooogle.com",
    "rnicrosoft.com",
    "facbook.com",
    "faceb0ok.com",
    "paypal.co",
    "nutelix.com",
    "nute1ix.com",
    "apple-support.com",
    "bankofamerica-login.com",
    "dellsupport.com",
    "ihg-hotels.com",
];

fn known_fixture() -> Outcome {
    let start = Instant::now();
    let index = ReferenceIndex::build(KNOWN_REFS, ConfusableTable::bundled(), None).map_err(|e| e.to_string())?;
    let config = DetectorConfig::from_file(assets().join("detector.conf")).map_err(|e| e.to_string())?;
    for c in KNOWN_SQUATS {
        let r = analyze(&d(c), &index, &config);
        ensure(r.verdict, || format!("{c} not flagged"))?;
    }
    for c in KNOWN_REFS {
        let r = analyze(&d(c), &index, &config);
        ensure(!r.verdict && r.matches.is_empty(), || format!("reference {c} flagged"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{} squats true, {} references false in {elapsed:.2?}", KNOWN_SQUATS.len(), KNOWN_REFS.len()))
}

// 2

/// Shortest sequence of single insert/delete/substitute/adjacent-swap
/// operations, by breadth-first search over strings of bounded length.
fn bfs_distances(source: &[char], alphabet: &[char], max_len: usize) -> HashMap<Vec<char>, usize> {
    let mut dist = HashMap::from([(source.to_vec(), 0usize)]);
    let mut queue = VecDeque::from([source.to_vec()]);
    while let Some(s) = queue.pop_front() {
        let here = dist[&s];
        let mut next = Vec::new();
        for i in 0..s.len() {
            let mut t = s.clone();
            t.remove(i);
            next.push(t);
            for &c in alphabet {
                if c != s[i] {
                    let mut t = s.clone();
                    t[i] = c;
                    next.push(t);
                }
            }
            if i + 1 < s.len() && s[i] != s[i + 1] {
                let mut t = s.clone();
                t.swap(i, i + 1);
                next.push(t);
            }
        }
        if s.len() < max_len {
            for i in 0..=s.len() {
                for &c in alphabet {
                    let mut t = s.clone();
                    t.insert(i, c);
                    next.push(t);
                }
            }
        }
        for t in next {
            if !dist.contains_key(&t) {
                dist.insert(t.clone(), here + 1);
                queue.push_back(t);
            }
        }
    }
    dist
}

/// Unrestricted Damerau–Levenshtein by its defining recursion: a
/// transposition of `a[k]`/`a[i-1]` with `b[l]`/`b[j-1]` may span deleted
/// and inserted characters. Every `(k, l)` pair is tried.
fn dl_oracle(a: &[char], b: &[char]) -> usize {
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == 0 {
            return j;
        }
        if j == 0 {
            return i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let cost = usize::from(a[i - 1] != b[j - 1]);
        let mut best =
            (go(a, b, i - 1, j, memo) + 1).min(go(a, b, i, j - 1, memo) + 1).min(go(a, b, i - 1, j - 1, memo) + cost);
        for k in 1..i {
            for l in 1..j {
                if a[k - 1] == b[j - 1] && a[i - 1] == b[l - 1] {
                    let v = go(a, b, k - 1, l - 1, memo) + (i - k - 1) + 1 + (j - l - 1);
                    best = best.min(v);
                }
            }
        }
        memo.insert((i, j), best);
        best
    }
    go(a, b, a.len(), b.len(), &mut HashMap::new())
}

fn lev_oracle(a: &[char], b: &[char]) -> usize {
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == 0 || j == 0 {
            return i + j;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let cost = usize::from(a[i - 1] != b[j - 1]);
        let v =
            (go(a, b, i - 1, j, memo) + 1).min(go(a, b, i, j - 1, memo) + 1).min(go(a, b, i - 1, j - 1, memo) + cost);
        memo.insert((i, j), v);
        v
    }
    go(a, b, a.len(), b.len(), &mut HashMap::new())
}

fn all_strings(alphabet: &[char], max_len: usize) -> Vec<Vec<char>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for &c in alphabet {
                let mut t: Vec<char> = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let alphabet = ['a', 'b', '0'];
    let strings = all_strings(&alphabet, 4);
    let mut exhaustive = 0;
    for a in &strings {
        let bfs = bfs_distances(a, &alphabet, 6);
        for b in &strings {
            let (sa, sb): (String, String) = (a.iter().collect(), b.iter().collect());
            let got = damerau_levenshtein(&sa, &sb);
            ensure(got == bfs[b], || format!("dl({sa:?},{sb:?}) = {got}, search says {}", bfs[b]))?;
            ensure(got == dl_oracle(a, b), || format!("dl({sa:?},{sb:?}) = {got}, recursion disagrees"))?;
            let lev = levenshtein(&sa, &sb);
            ensure(lev == lev_oracle(a, b), || format!("lev({sa:?},{sb:?}) = {lev}"))?;
            exhaustive += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1);
    let pool = ['a', 'b', 'c', 'd', '0', 'é'];
    for _ in 0..10_000 {
        let mut gen =
            || -> Vec<char> { (0..rng.random_range(0..=8)).map(|_| *pool.choose(&mut rng).unwrap()).collect() };
        let (a, b) = (gen(), gen());
        let (sa, sb): (String, String) = (a.iter().collect(), b.iter().collect());
        let got = damerau_levenshtein(&sa, &sb);
        ensure(got == dl_oracle(&a, &b), || format!("dl({sa:?},{sb:?}) = {got}"))?;
        let lev = levenshtein(&sa, &sb);
        ensure(lev == lev_oracle(&a, &b), || format!("lev({sa:?},{sb:?}) = {lev}"))?;
    }
    Ok(format!("{exhaustive} exhaustive pairs, 10000 random pairs"))
}

// 3

fn random_label(rng: &mut ChaCha8Rng) -> String {
    const RANGES: [(u32, u32); 6] =
        [(0xE0, 0x24F), (0x370, 0x3FF), (0x400, 0x4FF), (0x4E00, 0x9FFF), (0xAC00, 0xD7A3), (0x1F300, 0x1F64F)];
    loop {
        let len = rng.random_range(1..=12);
        let mut s = String::new();
        for _ in 0..len {
            if rng.random_bool(0.4) {
                s.push(*b"abcdefghijklmnopqrstuvwxyz0123456789-".choose(rng).unwrap() as char);
            } else {
                let (lo, hi) = *RANGES.choose(rng).unwrap();
                s.push(char::from_u32(rng.random_range(lo..=hi)).unwrap());
            }
        }
        if !s.is_ascii() {
            return s;
        }
    }
}

fn punycode_round_trips() -> Outcome {
    ensure(punycode_decode("xn--mller-kva").ok().as_deref() == Some("müller"), || "xn--mller-kva".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x9c);
    for _ in 0..10_000 {
        // valid ACE labels come from an independent encoder
        let unicode = random_label(&mut rng);
        let ace = format!("xn--{}", idna::punycode::encode_str(&unicode).unwrap());
        let decoded = punycode_decode(&ace).map_err(|e| format!("{ace}: {e}"))?;
        ensure(decoded == unicode, || format!("decode({ace}) = {decoded:?}"))?;
        let again = punycode_encode(&decoded).map_err(|e| format!("{decoded:?}: {e}"))?;
        ensure(again == ace, || format!("encode(decode({ace})) = {again}"))?;
    }
    for _ in 0..10_000 {
        let unicode = random_label(&mut rng);
        let ace = punycode_encode(&unicode).map_err(|e| format!("{unicode:?}: {e}"))?;
        let back = punycode_decode(&ace).map_err(|e| format!("{ace}: {e}"))?;
        ensure(back == unicode, || format!("decode(encode({unicode:?})) = {back:?}"))?;
    }
    Ok("müller decoded; 10000 + 10000 round trips".into())
}

// 4

fn closure_accuracy() -> Outcome {
    let brands: Vec<Domain> = read_list("brands.txt").iter().map(|s| d(s)).collect();
    let legit: Vec<Domain> = read_list("legit.txt").iter().map(|s| d(s)).collect();
    ensure(brands.len() >= 100, || format!("only {} brands", brands.len()))?;
    let opts = BuildOptions { per_brand: 20, seed: 1, legit_domains: legit, ..BuildOptions::default() };
    let dataset = build_dataset(&brands, &opts).map_err(|e| e.to_string())?;
    ensure(dataset.len() >= 2000, || format!("only {} rows", dataset.len()))?;
    let techniques: HashSet<Technique> = dataset.examples.iter().filter_map(|e| e.technique).collect();
    ensure(techniques.len() == 8, || format!("only {} techniques generated", techniques.len()))?;

    let index = ReferenceIndex::build(brands.iter().map(|b| b.ascii()), ConfusableTable::bundled(), None)
        .map_err(|e| e.to_string())?;
    let engine = HeuristicEngine::new(index, DetectorConfig::default());
    let m = evaluate(&engine, &dataset).map_err(|e| e.to_string())?;
    ensure(m.accuracy() >= 0.95, || format!("accuracy {:.4}", m.accuracy()))?;
    let spec = m.specificity().unwrap_or(0.0);
    ensure(spec >= 0.98, || format!("specificity {spec:.4}"))?;
    let mut recalls = Vec::new();
    for (t, r) in &m.per_technique {
        let recall = r.recall().unwrap_or(0.0);
        let floor = if *t == Technique::Phonetic { 0.80 } else { 0.90 };
        ensure(recall >= floor, || format!("{t} recall {recall:.4}"))?;
        recalls.push(format!("{t} {recall:.3}"));
    }
    Ok(format!(
        "{} rows from {} brands: accuracy {:.4}, specificity {spec:.4}; recall {}",
        dataset.len(),
        brands.len(),
        m.accuracy(),
        recalls.join(", ")
    ))
}

// 5

fn random_reference_list(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    let consonants = b"bcdfghjklmnprstvwz";
    let vowels = b"aeiou";
    let tlds = ["com", "net", "org", "io"];
    let mut seen = HashSet::new();
    while seen.len() < n {
        let syllables = rng.random_range(2..=5);
        let mut s = String::new();
        for _ in 0..syllables {
            s.push(*consonants.choose(rng).unwrap() as char);
            s.push(*vowels.choose(rng).unwrap() as char);
            if rng.random_bool(0.3) {
                s.push(*consonants.choose(rng).unwrap() as char);
            }
        }
        seen.insert(format!("{s}.{}", tlds.choose(rng).unwrap()));
    }
    let mut out: Vec<String> = seen.into_iter().collect();
    out.sort();
    out
}

fn index_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d);
    let refs = random_reference_list(&mut rng, 5000);
    let table = ConfusableTable::bundled();
    let index = ReferenceIndex::build(&refs, table.clone(), None).map_err(|e| e.to_string())?;
    ensure(index.len() == 5000, || format!("index holds {}", index.len()))?;

    let mut queries: Vec<Domain> = Vec::new();
    for i in 0..1000 {
        let base = d(refs.choose(&mut rng).unwrap());
        let q = match i % 4 {
            0 => base,
            1 => d(&generate_variant(&base, Technique::OmissionAddition, i).unwrap()),
            2 => d(&generate_variant(&base, Technique::Misspelling, i).unwrap_or_else(|_| base.ascii())),
            _ => d(&random_reference_list(&mut rng, 1)[0]),
        };
        queries.push(q);
    }
    for (i, q) in queries.iter().enumerate() {
        let radius = i % 4;
        let qs = table.skeleton(q.sld());
        let got: HashSet<usize> = index.nearest(q.sld(), radius).into_iter().map(|n| n.id).collect();
        let want: HashSet<usize> = index
            .references()
            .iter()
            .enumerate()
            .filter(|(_, r)| damerau_levenshtein(&qs, &r.skeleton) <= radius)
            .map(|(id, _)| id)
            .collect();
        ensure(got == want, || format!("query {} radius {radius}: {} vs {} hits", q, got.len(), want.len()))?;
    }

    let config = DetectorConfig::default();
    let detector = Detector::new(&index, &config);
    let rounds = 20;
    let start = Instant::now();
    let mut flagged = 0usize;
    for _ in 0..rounds {
        for q in &queries {
            flagged += usize::from(detector.analyze(q).verdict);
        }
    }
    let calls = rounds * queries.len();
    let rate = calls as f64 / start.elapsed().as_secs_f64();
    ensure(rate >= 10_000.0, || format!("throughput {rate:.0} analyze/s"))?;
    Ok(format!(
        "1000 queries match linear scan; {rate:.0} analyze/s single-threaded ({flagged} verdicts true of {calls})"
    ))
}

// 6

fn generate_cli(out: &Path, seed: u64, threads: usize) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_squatlab"))
        .args(["generate", "--brands"])
        .arg(assets().join("brands.txt"))
        .arg("--legit")
        .arg(assets().join("legit.txt"))
        .args(["--per-brand", "8", "--seed", &seed.to_string(), "--threads", &threads.to_string(), "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
    let mut bytes = fs::read(out).map_err(|e| e.to_string())?;
    bytes.extend(fs::read(squatlab::generator::manifest_path(out)).map_err(|e| e.to_string())?);
    Ok(bytes)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = generate_cli(&dir.path().join("a.jsonl"), 7, 1)?;
    let b = generate_cli(&dir.path().join("b.jsonl"), 7, 1)?;
    let c = generate_cli(&dir.path().join("c.jsonl"), 7, 4)?;
    ensure(!a.is_empty(), || "empty output".into())?;
    ensure(a == b, || "two runs differ".into())?;
    ensure(a == c, || "thread count changes output".into())?;
    let other = generate_cli(&dir.path().join("d.jsonl"), 8, 1)?;
    ensure(a != other, || "seed has no effect".into())?;
    Ok(format!("{} bytes identical across runs and 1/4 threads", a.len()))
}

// 7

fn mock_config(server: &MockServer) -> EndpointConfig {
    EndpointConfig {
        initial_backoff: Duration::from_millis(5),
        timeout: Duration::from_secs(5),
        credential: None,
        max_concurrent: 3,
        ..EndpointConfig::new(server.base_url(), "mock")
    }
}

const ESSAY: &str = "To determine whether this domain is a typosquat we must first consider the edit distance.\n\n\
The domain contains several characters that could be confused.\n\nIn conclusion, further analysis is needed.";

fn gateway_conformance() -> Outcome {
    let cases = [("True", Verdict::True), ("false.", Verdict::False), (ESSAY, Verdict::NonConforming(ESSAY.into()))];
    for (reply, want) in cases {
        let server = MockServer::scripted(vec![MockReply::content(reply)]).map_err(|e| e.to_string())?;
        let client = LlmClient::new(mock_config(&server)).map_err(|e| e.to_string())?;
        let got = client.classify_domain("go0gle.com").map_err(|e| e.to_string())?;
        ensure(got == want, || format!("{reply:?} parsed as {got:?}"))?;
    }

    let server =
        MockServer::scripted(vec![MockReply::Status(500), MockReply::content("True")]).map_err(|e| e.to_string())?;
    let client = LlmClient::new(mock_config(&server)).map_err(|e| e.to_string())?;
    let got = client.classify_domain("gogle.com").map_err(|e| e.to_string())?;
    ensure(got == Verdict::True && server.request_count() == 2, || format!("retry gave {got:?}"))?;

    let server = MockServer::start_with_delay(
        |req| MockReply::content(if req.user_message() == Some("google.com") { "False" } else { "True" }),
        Duration::from_millis(20),
    )
    .map_err(|e| e.to_string())?;
    let client = LlmClient::new(mock_config(&server)).map_err(|e| e.to_string())?;
    let domains: Vec<String> =
        (0..10).map(|i| if i % 3 == 0 { "google.com".into() } else { format!("g{i}ogle.com") }).collect();
    let refs: Vec<&str> = domains.iter().map(String::as_str).collect();
    let verdicts = client.batch_classify(&refs);
    for (dom, v) in domains.iter().zip(&verdicts) {
        let want = if dom == "google.com" { Verdict::False } else { Verdict::True };
        ensure(*v == want, || format!("{dom} got {v:?}"))?;
    }
    let in_flight = server.max_in_flight();
    ensure(in_flight <= 3, || format!("{in_flight} requests in flight"))?;

    let server = MockServer::scripted(vec![MockReply::content(ESSAY)]).map_err(|e| e.to_string())?;
    let client = LlmClient::new(mock_config(&server)).map_err(|e| e.to_string())?;
    let dataset = Dataset::from_examples(
        (0..20)
            .map(|i| LabeledExample {
                domain: format!("site{i}.com"),
                label: i % 2 == 0,
                brand: (i % 2 == 0).then(|| "brand.com".to_string()),
                technique: (i % 2 == 0).then_some(Technique::Misspelling),
                source: Source::Synthetic,
            })
            .collect(),
        None,
    );
    let m = evaluate(&client, &dataset).map_err(|e| e.to_string())?;
    ensure(m.accuracy() == 0.0 && m.non_conforming() == 20, || format!("essay model scored {}", m.accuracy()))?;
    Ok(format!("verdict parsing, retry, 10 aligned results (max {in_flight} in flight), essay model accuracy 0"))
}

// 8

fn metric_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x8e);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    for fixture in 0..1000 {
        let n = rng.random_range(1..=200);
        let positive_rate: f64 = rng.random_range(0.0..=1.0);
        let rows: Vec<(bool, Verdict)> = (0..n)
            .map(|_| {
                let label = rng.random_bool(positive_rate);
                let v = match rng.random_range(0..10) {
                    0 => Verdict::NonConforming("noise".into()),
                    1..=6 => Verdict::from(label),
                    _ => Verdict::from(!label),
                };
                (label, v)
            })
            .collect();
        let dataset = Dataset::from_examples(
            rows.iter()
                .enumerate()
                .map(|(i, (label, _))| LabeledExample {
                    domain: format!("row{i}.com"),
                    label: *label,
                    brand: label.then(|| "brand.com".to_string()),
                    technique: label.then_some(Technique::Substitution),
                    source: Source::Synthetic,
                })
                .collect(),
            None,
        );
        let answers: HashMap<String, Verdict> =
            rows.iter().enumerate().map(|(i, (_, v))| (format!("row{i}.com"), v.clone())).collect();
        let classifier = |dom: &str| answers[dom].clone();
        let m: EvalMetrics = evaluate(&classifier, &dataset).map_err(|e| e.to_string())?;

        let (mut tp, mut fp, mut tn, mut fnn, mut nc) = (0usize, 0usize, 0usize, 0usize, 0usize);
        for (label, v) in &rows {
            match (label, v) {
                (true, Verdict::True) => tp += 1,
                (false, Verdict::True) => fp += 1,
                (false, Verdict::False) => tn += 1,
                (true, Verdict::False) => fnn += 1,
                _ => nc += 1,
            }
        }
        let c = m.confusion;
        let fail = || format!("fixture {fixture}");
        ensure((c.tp, c.fp, c.tn, c.fn_, m.non_conforming()) == (tp, fp, tn, fnn, nc), fail)?;
        ensure(c.tp + c.fp + c.tn + c.fn_ + m.non_conforming() == n, fail)?;
        ensure(close(m.accuracy(), (tp + tn) as f64 / n as f64), fail)?;
        let p = (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64);
        let r = (tp + fnn > 0).then(|| tp as f64 / (tp + fnn) as f64);
        ensure(m.precision().is_some() == p.is_some(), fail)?;
        ensure(m.recall().is_some() == r.is_some(), fail)?;
        if let (Some(a), Some(b)) = (m.precision(), p) {
            ensure(close(a, b), fail)?;
        }
        if let (Some(a), Some(b)) = (m.recall(), r) {
            ensure(close(a, b), fail)?;
        }
        match m.f1() {
            Some(f1) => {
                let (p, r) = (p.unwrap(), r.unwrap());
                ensure(close(f1, 2.0 * p * r / (p + r)), fail)?;
                ensure(close(f1, 2.0 * tp as f64 / (2 * tp + fp + fnn) as f64), fail)?;
            }
            None => ensure(p.is_none() || r.is_none() || tp == 0, fail)?,
        }

        let mut shuffled = dataset.clone();
        shuffled.examples.reverse();
        let m2 = evaluate(&classifier, &shuffled).map_err(|e| e.to_string())?;
        ensure(m2.confusion == m.confusion && m2.non_conforming() == m.non_conforming(), fail)?;
    }
    Ok("1000 random fixtures satisfy the confusion and ratio identities".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("known example fixtures", known_fixture),
        ("distance oracle equivalence", oracle_equivalence),
        ("punycode", punycode_round_trips),
        ("generator/detector closure", closure_accuracy),
        ("index correctness and throughput", index_correctness),
        ("generate determinism", determinism),
        ("gateway conformance", gateway_conformance),
        ("metric identities", metric_identities),
    ];
    let mut failures = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{secs:.2}s]", n + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {}. {name}: {why} [{secs:.2}s]", n + 1);
            }
        }
    }
    println!("{} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
