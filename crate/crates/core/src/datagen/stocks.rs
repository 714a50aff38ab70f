//! Stocks requests, annotated in both labeling schemes at once.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::builder::{chance, describe, ending, pick, Builder, Draft};

const METRICS: &[&str] = &[
    "revenue", "market cap", "ebitda", "net income", "profit margin", "stock price", "dividend yield", "earnings",
    "operating income", "debt", "cash flow", "gross margin", "sales", "free cash flow", "book value",
];
/// `(modifier, trailing word, is above)`
const MODIFIERS: &[(&str, &str, bool)] = &[
    ("over", "", true),
    ("above", "", true),
    ("more", "than", true),
    ("less", "than", false),
    ("under", "", false),
    ("below", "", false),
];
const AMOUNT_NUMBERS: &[&str] = &["1", "2", "5", "10", "20", "50", "100", "250", "500"];
const AMOUNT_UNITS: &[&str] = &["million", "billion", "percent", "thousand"];
const LOCATIONS: &[&str] = &[
    "europe", "asia", "germany", "japan", "france", "china", "canada", "brazil", "india", "north america",
    "south america", "italy", "spain", "mexico", "australia", "korea", "africa", "sweden",
];
const SECTORS: &[&str] = &[
    "healthcare", "energy", "technology", "finance", "retail", "utilities", "telecom", "mining", "biotech",
    "real estate", "automotive", "aerospace", "banking", "insurance", "pharma", "media",
];
const DATES: &[&str] = &["2014", "2015", "2016", "2017", "2018", "2019", "2020", "2021", "2022", "2023"];
/// `(negation word, words before the negated slot)`
const NEGATIONS: &[(&str, &str)] = &[("excluding", ""), ("outside", ""), ("outside", "of"), ("except", ""), ("except", "for")];
const QUERY_LEADS: &[(&str, &str)] = &[
    ("show me the", "of"),
    ("what is the", "of"),
    ("list the", "of"),
    ("give me the", "for"),
    ("what was the", "of"),
];
const PLAIN_LEADS: &[(&str, bool)] = &[
    ("show me", false),
    ("list", false),
    ("find", false),
    ("which", true),
    ("give me", false),
    ("show me all the", false),
];
const FILTER_LEADS: &[&str] = &["with", "that have", "with a", "whose"];

#[derive(Clone, Copy)]
enum Part {
    Location,
    Exclusion,
    Filters,
}

struct Plan {
    query: Option<(usize, Option<usize>)>,
    sector: Option<usize>,
    location: Option<usize>,
    excluded: Option<(bool, usize)>,
    filters: Vec<(usize, Option<usize>, usize, usize, usize)>,
}

impl Plan {
    fn slots(&self) -> usize {
        self.query.map_or(0, |q| 1 + q.1.is_some() as usize)
            + self.sector.is_some() as usize
            + self.location.is_some() as usize
            + self.excluded.map_or(0, |_| 2)
            + self.filters.iter().map(|f| 3 + f.1.is_some() as usize).sum::<usize>()
    }
}

fn plan(rng: &mut ChaCha8Rng) -> Plan {
    let n_filters = match rng.gen_range(0..10) {
        0..=4 => 0,
        5..=8 => 1,
        _ => 2,
    };
    let mut filters = Vec::new();
    while filters.len() < n_filters {
        let metric = rng.gen_range(0..METRICS.len());
        if filters.iter().any(|f: &(usize, _, _, _, _)| f.0 == metric) {
            continue;
        }
        filters.push((
            metric,
            chance(rng, 0.25).then(|| rng.gen_range(0..DATES.len())),
            rng.gen_range(0..MODIFIERS.len()),
            rng.gen_range(0..AMOUNT_NUMBERS.len()),
            rng.gen_range(0..AMOUNT_UNITS.len()),
        ));
    }
    let sector_negation = chance(rng, 0.25);
    Plan {
        query: chance(rng, 0.4).then(|| {
            (rng.gen_range(0..METRICS.len()), chance(rng, 0.3).then(|| rng.gen_range(0..DATES.len())))
        }),
        sector: chance(rng, 0.35).then(|| rng.gen_range(0..SECTORS.len())),
        location: chance(rng, 0.45).then(|| rng.gen_range(0..LOCATIONS.len())),
        excluded: if sector_negation {
            Some((true, rng.gen_range(0..SECTORS.len())))
        } else if chance(rng, 0.3) {
            Some((false, rng.gen_range(0..LOCATIONS.len())))
        } else {
            None
        },
        filters,
    }
}

pub(crate) fn draft(rng: &mut ChaCha8Rng, n: usize) -> Option<Draft> {
    let p = (0..200)
        .map(|_| plan(rng))
        .find(|p| p.slots() == n && p.sector.zip(p.excluded).is_none_or(|(s, e)| !e.0 || s != e.1))?;
    let mut b = Builder::new();
    let question = match p.query {
        Some((metric, date)) => {
            let &(lead, of) = pick(rng, QUERY_LEADS);
            b.words(lead);
            let d = date.map(|d| b.slot2("date_metric", Some("date"), DATES[d]));
            let m = b.slot2("metric_name", Some("query_metric"), METRICS[metric]);
            if let Some(d) = d {
                b.rel(d, m, "date_relation");
            }
            b.words(of);
            lead.starts_with("what")
        }
        None => {
            let &(lead, q) = pick(rng, PLAIN_LEADS);
            b.words(lead);
            q
        }
    };
    if let Some(s) = p.sector {
        b.slot2("sector_name", Some("sector"), SECTORS[s]);
    }
    b.words("companies");

    let mut parts = Vec::new();
    if p.location.is_some() {
        parts.push(Part::Location);
    }
    if p.excluded.is_some() {
        parts.push(Part::Exclusion);
    }
    if !p.filters.is_empty() {
        parts.push(Part::Filters);
    }
    parts.shuffle(rng);
    for (i, part) in parts.iter().enumerate() {
        if i > 0 && chance(rng, 0.3) {
            b.words(",");
        }
        match part {
            Part::Location => {
                b.words(if chance(rng, 0.8) { "in" } else { "based in" });
                b.slot2("location", Some("location_inside"), LOCATIONS[p.location.unwrap()]);
            }
            Part::Exclusion => {
                let (sector, value) = p.excluded.unwrap();
                let &(word, then) = pick(rng, NEGATIONS);
                let neg = b.slot("negation_modifier", word);
                b.words(then);
                let target = if sector {
                    let t = b.slot2("sector_name", Some("sector_outside"), SECTORS[value]);
                    if chance(rng, 0.5) {
                        b.words(if chance(rng, 0.5) { "companies" } else { "stocks" });
                    }
                    t
                } else {
                    b.slot2("location", Some("location_outside"), LOCATIONS[value])
                };
                b.rel(neg, target, "negation_relation");
            }
            Part::Filters => {
                b.words(pick(rng, FILTER_LEADS));
                for (j, &(metric, date, modifier, number, unit)) in p.filters.iter().enumerate() {
                    if j > 0 {
                        b.words(if chance(rng, 0.5) { "and" } else { "and a" });
                    }
                    let d = date.map(|d| b.slot2("date_metric", Some("date"), DATES[d]));
                    let m = b.slot2("metric_name", Some("filter_metric"), METRICS[metric]);
                    let (word, then, above) = MODIFIERS[modifier];
                    let f = b.slot("filter_modifier", word);
                    b.words(then);
                    let sb = if above { "filter_amount_above" } else { "filter_amount_below" };
                    let a = b.slot2("amount", Some(sb), &format!("{} {}", AMOUNT_NUMBERS[number], AMOUNT_UNITS[unit]));
                    if AMOUNT_UNITS[unit] != "percent" && chance(rng, 0.4) {
                        b.words("dollars");
                    }
                    b.rel(f, m, "filter_metric_relation");
                    b.rel(f, a, "filter_amount_relation");
                    if let Some(d) = d {
                        b.rel(d, m, "date_relation");
                    }
                }
            }
        }
    }
    Some(b.finish("query_companies", ending(rng, question), true))
}

pub(crate) fn inventory() -> String {
    let modifiers: Vec<&str> = MODIFIERS.iter().map(|m| m.0).collect();
    let negations: Vec<&str> = NEGATIONS.iter().map(|n| n.0).collect();
    let query: Vec<&str> = QUERY_LEADS.iter().map(|q| q.0).collect();
    let plain: Vec<&str> = PLAIN_LEADS.iter().map(|q| q.0).collect();
    let mut out = String::new();
    out.push_str(&describe("stocks.metric", METRICS));
    out.push_str(&describe("stocks.modifier", &modifiers));
    out.push_str(&describe("stocks.amount_numbers", AMOUNT_NUMBERS));
    out.push_str(&describe("stocks.amount_units", AMOUNT_UNITS));
    out.push_str(&describe("stocks.location", LOCATIONS));
    out.push_str(&describe("stocks.sector", SECTORS));
    out.push_str(&describe("stocks.date", DATES));
    out.push_str(&describe("stocks.negation", &negations));
    out.push_str(&describe("stocks.query_leads", &query));
    out.push_str(&describe("stocks.plain_leads", &plain));
    out.push_str(&describe("stocks.filter_leads", FILTER_LEADS));
    out
}
