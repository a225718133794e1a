//! Synthetic filing corpus with planted shared risks.
//!
//! Eight fictional firms file three annual reports each. Every filing is
//! HTML with a table of contents, inline XBRL, tables and entity references,
//! so the full ingest path is exercised. Risk paragraphs are assembled from
//! sentence pools:
//!
//! * each firm has its own risk theme;
//! * the first two firms also share a foundry supply-chain theme (six
//!   paragraphs per filing), the planted relation;
//! * the fifth and sixth firms share a weaker health-data theme (two
//!   paragraphs per filing);
//! * every filing carries the same boilerplate market-risk paragraph.
//!
//! Within a firm, paragraphs of the same theme are matched two by two and
//! each match shares one dated event, so every such paragraph has exactly
//! one chronological partner. Accounting period ends are sprinkled in as
//! distractors. Prices follow a factor model in which the planted firms
//! share a strong common factor and the health-data firms a weaker one.

mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use text::{Theme, ACCOUNTING, FIRMS, FOCUS_CLOSE, FOCUS_MID, FOCUS_OPEN, GENERIC, PLANTED, SECONDARY, SHARED_MARKET};

pub const DEFAULT_SEED: u64 = 7;
pub const YEARS: [i32; 3] = [2018, 2019, 2020];
/// Risk-factor paragraphs per filing.
pub const RISK_PARAGRAPHS: usize = 18;
/// Word present in every planted paragraph and nowhere else.
pub const PLANTED_MARKER: &str = "foundry";
/// Word present in every secondary shared-theme paragraph and nowhere else.
pub const SECONDARY_MARKER: &str = "patient";
const PRICE_YEAR: i32 = 2021;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirmProfile {
    pub ticker: &'static str,
    pub name: &'static str,
    pub sector: &'static str,
    pub industry: &'static str,
}

pub const FIRM_PROFILES: [FirmProfile; 8] = [
    FirmProfile {
        ticker: "AVSL",
        name: "Avalon Solar Systems Inc.",
        sector: "Information Technology",
        industry: "Semiconductor Equipment",
    },
    FirmProfile {
        ticker: "BLMD",
        name: "Bluemont Devices Corp.",
        sector: "Information Technology",
        industry: "Technology Hardware",
    },
    FirmProfile {
        ticker: "CRDB",
        name: "Cordell Bancorp",
        sector: "Financials",
        industry: "Regional Banks",
    },
    FirmProfile {
        ticker: "DSRE",
        name: "Desert Ridge Energy Co.",
        sector: "Energy",
        industry: "Oil & Gas Exploration",
    },
    FirmProfile {
        ticker: "ELMH",
        name: "Elmwood Health Systems Inc.",
        sector: "Health Care",
        industry: "Health Care Facilities",
    },
    FirmProfile {
        ticker: "FNWP",
        name: "Fenwick Pharmaceuticals Inc.",
        sector: "Health Care",
        industry: "Pharmaceuticals",
    },
    FirmProfile {
        ticker: "GRNF",
        name: "Greenlane Foods Inc.",
        sector: "Consumer Staples",
        industry: "Packaged Foods",
    },
    FirmProfile {
        ticker: "HBRL",
        name: "Harbor Line Logistics Inc.",
        sector: "Industrials",
        industry: "Trucking",
    },
];

/// Tickers of the two firms that share the planted theme.
pub fn planted_pair() -> (&'static str, &'static str) {
    (FIRM_PROFILES[0].ticker, FIRM_PROFILES[1].ticker)
}

/// Tickers of the two firms that share the secondary theme.
pub fn secondary_pair() -> (&'static str, &'static str) {
    (FIRM_PROFILES[4].ticker, FIRM_PROFILES[5].ticker)
}

pub const PIPELINE_CONF: &str = "\
# Pipeline configuration for the bundled synthetic corpus.
# Relative paths are resolved against the directory holding this file.
root = filings
prices = prices
gics = gics.csv

# corpus
sections = 1A,7A
min_tokens = 20

# pairs
seed = 7
view = both
train = 160
val = 40
min_span = 32
overlap_cap = 128
max_pairs_per_paragraph = 1

# training
batch_size = 16
learning_rate = 0.001
warmup_steps = 50
max_epochs = 50
patience = 5
temperature = 0.05
l2_coeff = 0.0001
max_len = 256
dim = 64
min_freq = 2

# scoring and evaluation
threshold = 0.75
grid = 0.6:0.9:0.05
";

/// Generated files keyed by `/`-separated path relative to the fixture root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub files: BTreeMap<String, String>,
}

impl Fixture {
    pub fn write(&self, root: &Path) -> std::io::Result<()> {
        for (rel, body) in &self.files {
            let path = root.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, body)?;
        }
        Ok(())
    }

    /// Paths whose on-disk content under `root` differs from the generated
    /// content, including missing files.
    pub fn diff(&self, root: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|(rel, body)| std::fs::read_to_string(root.join(rel)).ok().as_deref() != Some(body.as_str()))
            .map(|(rel, _)| rel.clone())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    Own,
    Planted,
    Secondary,
}

#[derive(Debug, Clone)]
struct Slot {
    year: i32,
    category: Category,
    event: Option<String>,
    focus: [&'static str; 3],
    /// Theme sentences carried over between the two paragraphs of a pair.
    core: Vec<&'static str>,
}

#[derive(Debug, Clone, Copy)]
enum DateStyle {
    Long,
    Slash,
    Iso,
    MonthOnly,
}

fn month_name(m: u32) -> &'static str {
    [
        "January",
        "February",
        "March",
        "April",
        "May",
        "June",
        "July",
        "August",
        "September",
        "October",
        "November",
        "December",
    ][m as usize - 1]
}

fn render_date(d: NaiveDate, style: DateStyle) -> String {
    match style {
        DateStyle::Long => format!("{} {}, {}", month_name(d.month()), d.day(), d.year()),
        DateStyle::Slash => format!("{:02}/{:02}/{}", d.month(), d.day(), d.year()),
        DateStyle::Iso => d.format("%Y-%m-%d").to_string(),
        DateStyle::MonthOnly => format!("{} {}", month_name(d.month()), d.year()),
    }
}

struct NameGen {
    used: BTreeSet<String>,
}

impl NameGen {
    const ONSETS: [&'static str; 14] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
    const VOWELS: [&'static str; 5] = ["a", "e", "i", "o", "u"];
    const CODAS: [&'static str; 6] = ["", "", "n", "r", "l", "s"];

    /// A fresh capitalized pseudo-word that is not an English word in any pool.
    fn next(&mut self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let syllables = rng.random_range(2..=3);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(Self::ONSETS.choose(rng).unwrap());
                w.push_str(Self::VOWELS.choose(rng).unwrap());
            }
            w.push_str(Self::CODAS.choose(rng).unwrap());
            let mut c = w.chars();
            let name: String = c.next().unwrap().to_uppercase().chain(c).collect();
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn theme_for(firm: usize, category: Category) -> &'static Theme {
    match category {
        Category::Own => &FIRMS[firm].theme,
        Category::Planted => &PLANTED,
        Category::Secondary => &SECONDARY,
    }
}

fn shared_count(firm: usize) -> (Category, usize) {
    match firm {
        0 | 1 => (Category::Planted, 6),
        4 | 5 => (Category::Secondary, 2),
        _ => (Category::Own, 0),
    }
}

/// Lays out one firm's risk paragraphs and plants matched event sentences.
fn plan_firm(firm: usize, rng: &mut ChaCha8Rng, names: &mut NameGen) -> BTreeMap<i32, Vec<Slot>> {
    let (shared, n_shared) = shared_count(firm);
    let mut plan: BTreeMap<i32, Vec<Slot>> = BTreeMap::new();
    for &year in &YEARS {
        let mut slots: Vec<Slot> = (0..RISK_PARAGRAPHS)
            .map(|k| Slot {
                year,
                category: if k < n_shared { shared } else { Category::Own },
                event: None,
                focus: ["", "", ""],
                core: Vec::new(),
            })
            .collect();
        slots.shuffle(rng);
        plan.insert(year, slots);
    }

    let mut used_dates = BTreeSet::new();
    for category in [Category::Own, Category::Planted, Category::Secondary] {
        let mut members: Vec<(i32, usize)> = plan
            .iter()
            .flat_map(|(&y, slots)| {
                slots
                    .iter()
                    .enumerate()
                    .filter(move |(_, s)| s.category == category)
                    .map(move |(k, _)| (y, k))
            })
            .collect();
        if members.is_empty() {
            continue;
        }
        assert!(
            members.len().is_multiple_of(2),
            "odd {category:?} count for firm {firm}"
        );
        members.shuffle(rng);
        let theme = theme_for(firm, category);
        for pair in members.chunks_exact(2) {
            let (mut a, mut b) = (pair[0], pair[1]);
            if b.0 < a.0 {
                std::mem::swap(&mut a, &mut b);
            }
            let month_only = rng.random_bool(0.2);
            let date = loop {
                let month = rng.random_range(1..=12);
                let day = if month_only { 1 } else { rng.random_range(1..=28) };
                let d = NaiveDate::from_ymd_opt(a.0, month, day).unwrap();
                if used_dates.insert(d) {
                    break d;
                }
            };
            let styles = [DateStyle::Long, DateStyle::Long, DateStyle::Slash, DateStyle::Iso];
            let (sa, sb) = if month_only {
                (DateStyle::MonthOnly, DateStyle::MonthOnly)
            } else {
                (*styles.choose(rng).unwrap(), *styles.choose(rng).unwrap())
            };
            let (first, follow) = *theme.events.choose(rng).unwrap();
            let name = names.next(rng);
            let fill = |t: &str, s| t.replace("{name}", &name).replace("{date}", &render_date(date, s));
            let focus: Vec<&'static str> = theme.focus.choose_multiple(rng, 3).copied().collect();
            let focus = [focus[0], focus[1], focus[2]];
            let core: Vec<&'static str> = theme.sentences.choose_multiple(rng, 2).copied().collect();
            let sa_slot = &mut plan.get_mut(&a.0).unwrap()[a.1];
            sa_slot.event = Some(fill(first, sa));
            sa_slot.focus = focus;
            sa_slot.core = core.clone();
            let sb_slot = &mut plan.get_mut(&b.0).unwrap()[b.1];
            sb_slot.event = Some(fill(follow, sb));
            sb_slot.focus = focus;
            sb_slot.core = core;
        }
    }
    plan
}

fn accounting_sentence(year: i32, rng: &mut ChaCha8Rng) -> String {
    let ends = [(3, 31), (6, 30), (9, 30), (12, 31), (12, 31)];
    let (m, d) = *ends.choose(rng).unwrap();
    let date = NaiveDate::from_ymd_opt(year, m, d).unwrap();
    let style = if rng.random_bool(0.25) {
        DateStyle::Slash
    } else {
        DateStyle::Long
    };
    ACCOUNTING
        .choose(rng)
        .unwrap()
        .replace("{date}", &render_date(date, style))
}

fn paragraph_text(firm: usize, slot: &Slot, rng: &mut ChaCha8Rng) -> String {
    let theme = theme_for(firm, slot.category);
    let n_theme = if slot.category == Category::Secondary { 3 } else { 4 };
    let rest: Vec<&str> = theme
        .sentences
        .iter()
        .copied()
        .filter(|s| !slot.core.contains(s))
        .collect();
    let mut body: Vec<String> = slot
        .core
        .iter()
        .copied()
        .chain(rest.choose_multiple(rng, n_theme - slot.core.len()).copied())
        .map(str::to_string)
        .collect();
    body.shuffle(rng);
    if let Some(event) = &slot.event {
        let at = rng.random_range(0..=body.len());
        body.insert(at, event.clone());
    }
    if rng.random_bool(0.35) {
        body.push(accounting_sentence(slot.year, rng));
    }
    let [a, b, c] = slot.focus;
    let focus = |t: &str| t.replace("{a}", a).replace("{b}", b).replace("{c}", c);
    let mid = rng.random_range(1..body.len());
    body.insert(mid, focus(FOCUS_MID.choose(rng).unwrap()));
    let mut sentences = vec![
        GENERIC.choose(rng).unwrap().to_string(),
        focus(FOCUS_OPEN.choose(rng).unwrap()),
    ];
    sentences.extend(body);
    sentences.push(focus(FOCUS_CLOSE.choose(rng).unwrap()));
    sentences.join(" ")
}

/// Light HTML dressing: an occasional bold lead sentence, line wraps and
/// non-breaking spaces, none of which change the cleaned text's tokens.
fn dress(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut out = String::new();
    let mut words = text.split(' ').peekable();
    let bold = rng.random_bool(0.3);
    if bold {
        out.push_str("<b>");
    }
    let mut in_bold = bold;
    let mut col = 0;
    while let Some(w) = words.next() {
        out.push_str(w);
        col += w.len() + 1;
        if in_bold && w.ends_with('.') {
            out.push_str("</b>");
            in_bold = false;
        }
        if words.peek().is_some() {
            if col > 90 {
                out.push('\n');
                col = 0;
            } else if rng.random_bool(0.03) {
                out.push_str("&nbsp;");
            } else {
                out.push(' ');
            }
        }
    }
    if in_bold {
        out.push_str("</b>");
    }
    out
}

fn filing_html(firm: usize, year: i32, slots: &[Slot], rng: &mut ChaCha8Rng) -> String {
    let p = &FIRM_PROFILES[firm];
    let t = &FIRMS[firm];
    let mut h = String::new();
    let _ = writeln!(
        h,
        "<!DOCTYPE html>\n<html>\n<head>\n<title>{} Form 10-K {}</title>",
        p.ticker, year
    );
    h.push_str("<style>p { margin: 0 0 12pt 0; } td { padding: 2pt; }</style>\n</head>\n<body>\n");
    let _ = writeln!(
        h,
        "<ix:header><ix:hidden><ix:nonNumeric name=\"dei:EntityCentralIndexKey\" contextRef=\"FY{year}\">000{}{}</ix:nonNumeric>\
<ix:nonNumeric name=\"dei:DocumentFiscalYearFocus\" contextRef=\"FY{year}\">{year}</ix:nonNumeric></ix:hidden></ix:header>",
        firm + 1,
        year % 100
    );
    let _ = writeln!(
        h,
        "<div style=\"text-align:center\"><p>UNITED STATES SECURITIES AND EXCHANGE COMMISSION</p>"
    );
    let _ = writeln!(
        h,
        "<p>FORM 10-K</p>\n<p>ANNUAL REPORT FOR THE FISCAL YEAR ENDED DECEMBER 31, {year}</p>"
    );
    let _ = writeln!(
        h,
        "<p><ix:nonNumeric name=\"dei:EntityRegistrantName\" contextRef=\"FY{year}\">{}</ix:nonNumeric> (Ticker&#58; {})</p></div>",
        p.name.replace('&', "&amp;"),
        p.ticker
    );
    h.push_str("<p>TABLE OF CONTENTS</p>\n");
    let toc = [
        ("1", "Business", 3),
        ("1A", "Risk Factors", 9),
        ("1B", "Unresolved Staff Comments", 24),
        ("2", "Properties", 24),
        ("7", "Management&#8217;s Discussion and Analysis", 31),
        ("7A", "Quantitative and Qualitative Disclosures About Market Risk", 44),
        ("8", "Financial Statements and Supplementary Data", 46),
    ];
    for (code, title, page) in toc {
        let _ = writeln!(h, "<p>Item {code}. {title} &#8230; {page}</p>");
    }
    h.push_str("<hr/>\n<p>PART I</p>\n");
    let _ = writeln!(h, "<p><b>Item 1. Business</b></p>\n<p>{}</p>", t.business);
    let _ = writeln!(
        h,
        "<p>Our company&#8217;s principal executive offices are leased, and we employ staff across several locations.</p>"
    );

    let _ = writeln!(h, "<p><b>ITEM 1A. RISK FACTORS</b></p>");
    h.push_str("<p>The following risks could affect us.</p>\n");
    let table_at = rng.random_range(4..RISK_PARAGRAPHS - 4);
    for (k, slot) in slots.iter().enumerate() {
        let body = dress(&paragraph_text(firm, slot, rng), rng);
        if k % 5 == 3 {
            let _ = writeln!(h, "<div class=\"risk\"><p style=\"text-indent:12pt\">{body}</p></div>");
        } else {
            let _ = writeln!(h, "<p>{body}</p>");
        }
        if k == table_at {
            h.push_str("<p><i>Selected exposure data:</i></p>\n<table>\n");
            h.push_str("<tr><th>Exposure</th><th>Amount</th></tr>\n");
            for row in 0..3 {
                let _ = writeln!(
                    h,
                    "<tr><td>Category {}</td><td>{}</td></tr>",
                    row + 1,
                    rng.random_range(100..9_999)
                );
            }
            h.push_str("</table>\n");
        }
    }

    h.push_str("<p><b>Item 1B. Unresolved Staff Comments</b></p>\n<p>None.</p>\n");
    h.push_str(
        "<p><b>Item 2. Properties</b></p>\n<p>We lease our headquarters and believe our facilities are adequate.</p>\n",
    );
    h.push_str("<p>PART II</p>\n");
    let _ = writeln!(
        h,
        "<p><b>Item 7. Management&#8217;s Discussion and Analysis of Financial Condition and Results of Operations</b></p>\n\
<p>Revenue for fiscal {year} was <ix:nonFraction name=\"us-gaap:Revenues\" contextRef=\"FY{year}\" unitRef=\"usd\" decimals=\"-6\" scale=\"6\">{}</ix:nonFraction> million.</p>",
        rng.random_range(200..5_000)
    );

    let _ = writeln!(
        h,
        "<p><b>Item 7A &#8212; Quantitative and Qualitative Disclosures About Market Risk</b></p>"
    );
    let _ = writeln!(h, "<p>{}</p>", dress(SHARED_MARKET, rng));
    let mut market: Vec<&str> = t.market.to_vec();
    market.shuffle(rng);
    let mut own = market.join(" ");
    own.push(' ');
    own.push_str(&accounting_sentence(year, rng));
    let _ = writeln!(h, "<p>{}</p>", dress(&own, rng));

    h.push_str("<p><b>Item 8. Financial Statements and Supplementary Data</b></p>\n");
    h.push_str("<table>\n<tr><td>Total assets</td><td><ix:nonFraction name=\"us-gaap:Assets\" contextRef=\"FY\" unitRef=\"usd\">");
    let _ = write!(h, "{}", rng.random_range(1_000..90_000));
    h.push_str("</ix:nonFraction></td></tr>\n</table>\n</body>\n</html>\n");
    h
}

fn trading_days(year: i32) -> Vec<NaiveDate> {
    let holidays = [
        (1, 1),
        (1, 18),
        (2, 15),
        (4, 2),
        (5, 31),
        (7, 5),
        (9, 6),
        (11, 25),
        (12, 24),
    ];
    let mut d = NaiveDate::from_ymd_opt(year, 1, 1).unwrap();
    let mut out = Vec::new();
    while d.year() == year {
        let weekend = matches!(d.weekday(), Weekday::Sat | Weekday::Sun);
        if !weekend && !holidays.contains(&(d.month(), d.day())) {
            out.push(d);
        }
        d = d.succ_opt().unwrap();
    }
    out
}

/// Closing prices from a factor model with volatility regimes.
fn price_files(rng: &mut ChaCha8Rng) -> Vec<(String, String)> {
    let days = trading_days(PRICE_YEAR);
    let z = Normal::new(0.0, 1.0).unwrap();
    let n = FIRM_PROFILES.len();
    // group 0: planted pair, group 1: secondary pair, otherwise idiosyncratic
    let group = |f: usize| match f {
        0 | 1 => Some(0),
        4 | 5 => Some(1),
        _ => None,
    };
    let loadings = [0.018, 0.009];
    let mut prices: Vec<f64> = (0..n).map(|f| 40.0 + 15.0 * f as f64).collect();
    let mut rows: Vec<String> = vec!["date,close\n".to_string(); n];
    let mut regime = [0.0f64; 2];
    let mut market_regime = 0.0f64;
    for (t, day) in days.iter().enumerate() {
        market_regime = 0.9 * market_regime + 0.3 * z.sample(rng);
        for r in regime.iter_mut() {
            *r = 0.9 * *r + 0.45 * z.sample(rng);
        }
        let m = z.sample(rng);
        let g = [z.sample(rng), z.sample(rng)];
        for f in 0..n {
            let mut r = 0.004 * market_regime.exp() * m + 0.011 * z.sample(rng);
            if let Some(k) = group(f) {
                r += loadings[k] * regime[k].exp() * g[k];
            }
            if t > 0 {
                prices[f] *= 1.0 + r.clamp(-0.5, 0.5);
            }
            let _ = writeln!(rows[f], "{},{:.4}", day.format("%Y-%m-%d"), prices[f]);
        }
    }
    FIRM_PROFILES
        .iter()
        .zip(rows)
        .map(|(p, body)| (format!("prices/{}.csv", p.ticker), body))
        .collect()
}

/// Generates the full fixture tree for `seed`.
pub fn generate(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names = NameGen { used: BTreeSet::new() };
    let mut files = BTreeMap::new();
    for (firm, profile) in FIRM_PROFILES.iter().enumerate() {
        let plan = plan_firm(firm, &mut rng, &mut names);
        for (year, slots) in &plan {
            let html = filing_html(firm, *year, slots, &mut rng);
            files.insert(format!("filings/{}/{}.txt", profile.ticker, year), html);
        }
    }
    files.extend(price_files(&mut rng));
    let mut gics = String::from("ticker,sector,industry\n");
    for p in &FIRM_PROFILES {
        let _ = writeln!(gics, "{},{},{}", p.ticker, p.sector, p.industry);
    }
    files.insert("gics.csv".into(), gics);
    files.insert("pipeline.conf".into(), PIPELINE_CONF.into());
    Fixture { files }
}
