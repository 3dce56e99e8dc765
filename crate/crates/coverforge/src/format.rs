//! Plain-text document formats: towers, Bratteli diagrams, S-adic systems,
//! languages and KR data. Printing is canonical (identical values print to
//! identical bytes) and parsing reports the first offending line.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::bratteli::{BdEdge, BratteliDiagram};
use crate::digraph::{Arrow, ArrowId, DiGraph, VertexId};
use crate::kr::{KRLevel, KRTower};
use crate::language::LanguageOracle;
use crate::sadic::{SAdicSystem, Substitution};
use crate::tower::{BondingMap, CoverTower};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// Any document this tool reads or writes.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Tower(CoverTower),
    Diagram(BratteliDiagram),
    Sadic(SAdicSystem),
    Language(LanguageOracle),
    Kr(KRTower),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Tower(_) => "tower",
            Document::Diagram(_) => "diagram",
            Document::Sadic(_) => "sadic",
            Document::Language(_) => "language",
            Document::Kr(_) => "kr",
        }
    }
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty() && !t[0].starts_with('#'))
            .collect();
        Lines { items, pos: 0 }
    }
    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let item = self.items.get(self.pos).cloned();
        self.pos += 1;
        item
    }
    fn expect(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>), ParseError> {
        match self.next() {
            Some((n, tokens)) if tokens[0] == keyword => Ok((n, tokens)),
            Some((n, tokens)) => err(n, format!("expected '{keyword}', found '{}'", tokens[0])),
            None => err(0, format!("unexpected end of file, expected '{keyword}'")),
        }
    }
    fn last_line(&self) -> usize {
        self.items.last().map(|(n, _)| *n).unwrap_or(0)
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, ParseError> {
    token.parse::<T>().map_err(|_| ParseError {
        line,
        message: format!("cannot parse {what} from '{token}'"),
    })
}

/// Detects the document kind from the first keyword and parses it.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let lines = Lines::new(text);
    let Some((n, first)) = lines.peek().cloned() else {
        return err(0, "empty document");
    };
    match first[0] {
        "tower" => parse_tower(text).map(Document::Tower),
        "diagram" => parse_diagram(text).map(Document::Diagram),
        "sadic" => parse_sadic(text).map(Document::Sadic),
        "language" => parse_language(text).map(Document::Language),
        "kr" => parse_kr(text).map(Document::Kr),
        other => err(n, format!("unknown document kind '{other}'")),
    }
}

pub fn print_document(doc: &Document) -> String {
    match doc {
        Document::Tower(t) => print_tower(t),
        Document::Diagram(d) => print_diagram(d),
        Document::Sadic(s) => print_sadic(s),
        Document::Language(o) => print_language(o),
        Document::Kr(k) => print_kr(k),
    }
}

pub fn print_tower(t: &CoverTower) -> String {
    let mut out = String::new();
    writeln!(out, "tower v1").unwrap();
    writeln!(out, "levels {}", t.depth() + 1).unwrap();
    for (n, g) in t.levels().iter().enumerate() {
        writeln!(out, "level {n}").unwrap();
        writeln!(out, "vertices {}", g.vertex_names().join(" ")).unwrap();
        for a in g.arrow_ids() {
            let arrow = g.arrow(a);
            let mut line = format!(
                "arrow {} {} {} {}",
                a.0,
                g.vertex_name(arrow.source),
                g.vertex_name(arrow.target),
                arrow.weight
            );
            if let Some(l) = &arrow.label {
                line.push(' ');
                line.push_str(l);
            }
            writeln!(out, "{line}").unwrap();
        }
    }
    for n in 1..=t.depth() {
        writeln!(out, "bonding {n}").unwrap();
        for a in t.level(n).arrow_ids() {
            let ids: Vec<String> = t
                .bonding(n)
                .image(a)
                .arrows()
                .iter()
                .map(|b| b.0.to_string())
                .collect();
            writeln!(out, "map {} {}", a.0, ids.join(" ")).unwrap();
        }
    }
    out
}

pub fn parse_tower(text: &str) -> Result<CoverTower, ParseError> {
    let mut lines = Lines::new(text);
    lines.expect("tower")?;
    let (n, tokens) = lines.expect("levels")?;
    if tokens.len() != 2 {
        return err(n, "expected 'levels <count>'");
    }
    let count: usize = parse_num(n, tokens[1], "level count")?;
    if count == 0 {
        return err(n, "towers need at least one level");
    }
    let mut levels: Vec<DiGraph> = Vec::with_capacity(count);
    for want in 0..count {
        let (n, tokens) = lines.expect("level")?;
        if tokens.len() != 2 || parse_num::<usize>(n, tokens[1], "level index")? != want {
            return err(n, format!("expected 'level {want}'"));
        }
        let (vn, vtokens) = lines.expect("vertices")?;
        if vtokens.len() < 2 {
            return err(vn, "each level needs at least one vertex");
        }
        let names: Vec<String> = vtokens[1..].iter().map(|s| s.to_string()).collect();
        let mut arrows = Vec::new();
        while let Some((an, atokens)) = lines.peek().cloned() {
            if atokens[0] != "arrow" {
                break;
            }
            lines.next();
            if atokens.len() != 5 && atokens.len() != 6 {
                return err(
                    an,
                    "expected 'arrow <id> <source> <target> <weight> [label]'",
                );
            }
            let id: usize = parse_num(an, atokens[1], "arrow id")?;
            if id != arrows.len() {
                return err(
                    an,
                    format!("arrow ids must be dense; expected {}", arrows.len()),
                );
            }
            let find = |name: &str| -> Result<VertexId, ParseError> {
                names
                    .iter()
                    .position(|x| x == name)
                    .map(VertexId)
                    .ok_or(ParseError {
                        line: an,
                        message: format!("unknown vertex '{name}'"),
                    })
            };
            let weight: u64 = parse_num(an, atokens[4], "weight")?;
            if weight == 0 {
                return err(an, "arrow weights must be >= 1");
            }
            let mut arrow = Arrow::weighted(find(atokens[2])?, find(atokens[3])?, weight);
            if atokens.len() == 6 {
                arrow.label = Some(atokens[5].to_string());
            }
            arrows.push(arrow);
        }
        levels.push(DiGraph::new(names, arrows).map_err(|e| ParseError {
            line: n,
            message: e.to_string(),
        })?);
    }
    let mut bondings = Vec::with_capacity(count.saturating_sub(1));
    for want in 1..count {
        let (bn, btokens) = lines.expect("bonding")?;
        if btokens.len() != 2 || parse_num::<usize>(bn, btokens[1], "bonding index")? != want {
            return err(bn, format!("expected 'bonding {want}'"));
        }
        let mut images = Vec::new();
        for expect_id in 0..levels[want].arrow_count() {
            let (mn, mtokens) = lines.expect("map")?;
            if mtokens.len() < 3 {
                return err(mn, "expected 'map <arrow-id> <image arrow ids...>'");
            }
            let id: usize = parse_num(mn, mtokens[1], "arrow id")?;
            if id != expect_id {
                return err(mn, format!("map lines must be dense; expected {expect_id}"));
            }
            let mut image = Vec::new();
            for tok in &mtokens[2..] {
                let b: usize = parse_num(mn, tok, "image arrow id")?;
                if b >= levels[want - 1].arrow_count() {
                    return err(mn, format!("image arrow {b} out of range"));
                }
                image.push(ArrowId(b));
            }
            images.push(image);
        }
        let map = BondingMap::new(&levels[want - 1], images).map_err(|e| ParseError {
            line: bn,
            message: e.to_string(),
        })?;
        bondings.push(map);
    }
    if let Some((n, tokens)) = lines.next() {
        return err(
            n,
            format!("unexpected trailing line '{}'", tokens.join(" ")),
        );
    }
    CoverTower::new(levels, bondings).map_err(|e| ParseError {
        line: lines.last_line(),
        message: e.to_string(),
    })
}

pub fn print_diagram(d: &BratteliDiagram) -> String {
    let mut out = String::new();
    writeln!(out, "diagram v1").unwrap();
    writeln!(out, "levels {}", d.edge_levels()).unwrap();
    let counts: Vec<String> = (0..=d.edge_levels())
        .map(|i| d.vertex_count(i).to_string())
        .collect();
    writeln!(out, "vertices {}", counts.join(" ")).unwrap();
    for i in 1..=d.edge_levels() {
        writeln!(out, "edges {i}").unwrap();
        for (id, e) in d.edge_level(i).iter().enumerate() {
            let rank = d
                .incoming(i, e.target)
                .iter()
                .position(|&x| x == id)
                .unwrap();
            writeln!(out, "edge {id} {} {} {rank}", e.source, e.target).unwrap();
        }
    }
    out
}

pub fn parse_diagram(text: &str) -> Result<BratteliDiagram, ParseError> {
    let mut lines = Lines::new(text);
    lines.expect("diagram")?;
    let (n, tokens) = lines.expect("levels")?;
    let m: usize = parse_num(n, tokens[1], "edge level count")?;
    let (vn, vtokens) = lines.expect("vertices")?;
    if vtokens.len() != m + 2 {
        return err(vn, format!("expected {} vertex counts", m + 1));
    }
    let counts: Vec<usize> = vtokens[1..]
        .iter()
        .map(|t| parse_num(vn, t, "vertex count"))
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::new();
    let mut ranks: Vec<Vec<(usize, usize)>> = Vec::new();
    for want in 1..=m {
        let (en, etokens) = lines.expect("edges")?;
        if parse_num::<usize>(en, etokens[1], "edge level")? != want {
            return err(en, format!("expected 'edges {want}'"));
        }
        let mut level = Vec::new();
        let mut level_ranks = Vec::new();
        while let Some((ln, ltokens)) = lines.peek().cloned() {
            if ltokens[0] != "edge" {
                break;
            }
            lines.next();
            if ltokens.len() != 5 {
                return err(ln, "expected 'edge <id> <source> <target> <rank>'");
            }
            let id: usize = parse_num(ln, ltokens[1], "edge id")?;
            if id != level.len() {
                return err(
                    ln,
                    format!("edge ids must be dense; expected {}", level.len()),
                );
            }
            let source: usize = parse_num(ln, ltokens[2], "source")?;
            let target: usize = parse_num(ln, ltokens[3], "target")?;
            let rank: usize = parse_num(ln, ltokens[4], "rank")?;
            level.push(BdEdge { source, target });
            level_ranks.push((target, rank));
        }
        if level.is_empty() {
            return err(en, "edge level is empty");
        }
        edges.push(level);
        ranks.push(level_ranks);
    }
    if let Some((n, tokens)) = lines.next() {
        return err(
            n,
            format!("unexpected trailing line '{}'", tokens.join(" ")),
        );
    }
    // Rebuild the per-vertex incoming orders from the ranks.
    let mut orders: Vec<Vec<Vec<usize>>> = Vec::new();
    for (i, level_ranks) in ranks.iter().enumerate() {
        let target_count = counts[i + 1];
        let mut per_vertex: Vec<Vec<(usize, usize)>> = vec![Vec::new(); target_count];
        for (id, &(target, rank)) in level_ranks.iter().enumerate() {
            if target >= target_count {
                return err(
                    0,
                    format!("edge target {target} out of range at level {}", i + 1),
                );
            }
            per_vertex[target].push((rank, id));
        }
        let mut order = Vec::with_capacity(target_count);
        for (v, mut list) in per_vertex.into_iter().enumerate() {
            list.sort_unstable();
            for (expect, &(rank, _)) in list.iter().enumerate() {
                if rank != expect {
                    return err(
                        0,
                        format!(
                            "incoming ranks of vertex {v} at level {} are not dense",
                            i + 1
                        ),
                    );
                }
            }
            order.push(list.into_iter().map(|(_, id)| id).collect());
        }
        orders.push(order);
    }
    BratteliDiagram::with_orders(counts, edges, orders).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })
}

pub fn print_sadic(s: &SAdicSystem) -> String {
    let mut out = String::new();
    writeln!(out, "sadic v1").unwrap();
    writeln!(out, "levels {}", s.len()).unwrap();
    for n in 0..=s.len() {
        writeln!(out, "alphabet {n} {}", s.alphabet(n).join(" ")).unwrap();
    }
    for n in 1..=s.len() {
        let chi = s.substitution(n);
        for (i, letter) in chi.domain().iter().enumerate() {
            let word: Vec<&str> = chi
                .image(i)
                .iter()
                .map(|&j| chi.codomain()[j].as_str())
                .collect();
            writeln!(out, "sub {n} {letter} = {}", word.join(" ")).unwrap();
        }
    }
    out
}

pub fn parse_sadic(text: &str) -> Result<SAdicSystem, ParseError> {
    let mut lines = Lines::new(text);
    lines.expect("sadic")?;
    let (n, tokens) = lines.expect("levels")?;
    let count: usize = parse_num(n, tokens[1], "substitution count")?;
    if count == 0 {
        return err(n, "an S-adic system needs at least one substitution");
    }
    let mut alphabets: Vec<Vec<String>> = Vec::new();
    for want in 0..=count {
        let (an, atokens) = lines.expect("alphabet")?;
        if parse_num::<usize>(an, atokens[1], "alphabet level")? != want {
            return err(an, format!("expected 'alphabet {want} ...'"));
        }
        if atokens.len() < 3 {
            return err(an, "alphabets must be nonempty");
        }
        alphabets.push(atokens[2..].iter().map(|s| s.to_string()).collect());
    }
    let mut images: Vec<HashMap<String, Vec<usize>>> = vec![HashMap::new(); count];
    while let Some((sn, stokens)) = lines.next() {
        if stokens[0] != "sub" {
            return err(sn, format!("unexpected line '{}'", stokens.join(" ")));
        }
        if stokens.len() < 5 || stokens[3] != "=" {
            return err(sn, "expected 'sub <level> <letter> = <word...>'");
        }
        let level: usize = parse_num(sn, stokens[1], "substitution level")?;
        if level == 0 || level > count {
            return err(sn, format!("substitution level {level} out of range"));
        }
        let letter = stokens[2].to_string();
        if !alphabets[level].contains(&letter) {
            return err(sn, format!("letter '{letter}' not in alphabet {level}"));
        }
        let image = stokens[4..]
            .iter()
            .map(|w| {
                alphabets[level - 1]
                    .iter()
                    .position(|l| l == w)
                    .ok_or(ParseError {
                        line: sn,
                        message: format!("letter '{w}' not in alphabet {}", level - 1),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        images[level - 1].insert(letter, image);
    }
    let mut subs = Vec::with_capacity(count);
    for level in 1..=count {
        let table = &images[level - 1];
        let image_list = alphabets[level]
            .iter()
            .map(|l| {
                table.get(l).cloned().ok_or(ParseError {
                    line: lines.last_line(),
                    message: format!("missing image for letter '{l}' at level {level}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let chi = Substitution::new(
            alphabets[level].clone(),
            alphabets[level - 1].clone(),
            image_list,
        )
        .map_err(|e| ParseError {
            line: lines.last_line(),
            message: e.to_string(),
        })?;
        subs.push(chi);
    }
    SAdicSystem::new(subs).map_err(|e| ParseError {
        line: lines.last_line(),
        message: e.to_string(),
    })
}

pub fn print_language(o: &LanguageOracle) -> String {
    let mut out = String::new();
    writeln!(out, "language v1").unwrap();
    let letters: Vec<String> = o.alphabet().iter().map(|c| c.to_string()).collect();
    writeln!(out, "alphabet {}", letters.join(" ")).unwrap();
    writeln!(out, "nmax {}", o.n_max()).unwrap();
    for n in 1..=o.n_max() {
        let words: Vec<String> = o.factors(n).unwrap().iter().cloned().collect();
        writeln!(out, "words {n} {}", words.join(" ")).unwrap();
    }
    out
}

pub fn parse_language(text: &str) -> Result<LanguageOracle, ParseError> {
    let mut lines = Lines::new(text);
    lines.expect("language")?;
    let (an, atokens) = lines.expect("alphabet")?;
    let mut alphabet = Vec::new();
    for tok in &atokens[1..] {
        if tok.chars().count() != 1 {
            return err(an, "letters must be single characters");
        }
        alphabet.push(tok.chars().next().unwrap());
    }
    let (nn, ntokens) = lines.expect("nmax")?;
    let n_max: usize = parse_num(nn, ntokens[1], "nmax")?;
    let mut factors = vec![BTreeSet::from([String::new()])];
    for want in 1..=n_max {
        let (wn, wtokens) = lines.expect("words")?;
        if parse_num::<usize>(wn, wtokens[1], "word length")? != want {
            return err(wn, format!("expected 'words {want} ...'"));
        }
        let set: BTreeSet<String> = wtokens[2..].iter().map(|s| s.to_string()).collect();
        if set.iter().any(|w| w.chars().count() != want) {
            return err(
                wn,
                format!("all words on this line must have length {want}"),
            );
        }
        factors.push(set);
    }
    if let Some((n, tokens)) = lines.next() {
        return err(
            n,
            format!("unexpected trailing line '{}'", tokens.join(" ")),
        );
    }
    LanguageOracle::new(alphabet, factors).map_err(|e| ParseError {
        line: lines.last_line(),
        message: e.to_string(),
    })
}

pub fn print_kr(k: &KRTower) -> String {
    let mut out = String::new();
    writeln!(out, "kr v1").unwrap();
    writeln!(out, "levels {}", k.levels.len()).unwrap();
    for (n, level) in k.levels.iter().enumerate() {
        writeln!(out, "level {n} columns {}", level.heights.len()).unwrap();
        let hs: Vec<String> = level.heights.iter().map(|h| h.to_string()).collect();
        writeln!(out, "heights {}", hs.join(" ")).unwrap();
        for (i, t) in level.transitions.iter().enumerate() {
            let ts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            writeln!(out, "transitions {i} = {}", ts.join(" ")).unwrap();
        }
        for (i, d) in level.decomposition.iter().enumerate() {
            let ds: Vec<String> = d.iter().map(|x| x.to_string()).collect();
            writeln!(out, "visits {i} = {}", ds.join(" ")).unwrap();
        }
    }
    out
}

pub fn parse_kr(text: &str) -> Result<KRTower, ParseError> {
    let mut lines = Lines::new(text);
    lines.expect("kr")?;
    let (n, tokens) = lines.expect("levels")?;
    let count: usize = parse_num(n, tokens[1], "level count")?;
    let mut levels = Vec::with_capacity(count);
    for want in 0..count {
        let (ln, ltokens) = lines.expect("level")?;
        if ltokens.len() != 4
            || parse_num::<usize>(ln, ltokens[1], "level index")? != want
            || ltokens[2] != "columns"
        {
            return err(ln, format!("expected 'level {want} columns <k>'"));
        }
        let columns: usize = parse_num(ln, ltokens[3], "column count")?;
        let (hn, htokens) = lines.expect("heights")?;
        if htokens.len() != columns + 1 {
            return err(hn, format!("expected {columns} heights"));
        }
        let heights: Vec<u64> = htokens[1..]
            .iter()
            .map(|t| parse_num(hn, t, "height"))
            .collect::<Result<_, _>>()?;
        let mut transitions = Vec::with_capacity(columns);
        for i in 0..columns {
            let (tn, ttokens) = lines.expect("transitions")?;
            if parse_num::<usize>(tn, ttokens[1], "column")? != i || ttokens[2] != "=" {
                return err(tn, format!("expected 'transitions {i} = ...'"));
            }
            let set: BTreeSet<usize> = ttokens[3..]
                .iter()
                .map(|t| parse_num(tn, t, "transition target"))
                .collect::<Result<_, _>>()?;
            transitions.push(set);
        }
        let mut decomposition = Vec::with_capacity(columns);
        for i in 0..columns {
            let (vn, vtokens) = lines.expect("visits")?;
            if parse_num::<usize>(vn, vtokens[1], "column")? != i || vtokens[2] != "=" {
                return err(vn, format!("expected 'visits {i} = ...'"));
            }
            let list: Vec<usize> = vtokens[3..]
                .iter()
                .map(|t| parse_num(vn, t, "visited column"))
                .collect::<Result<_, _>>()?;
            decomposition.push(list);
        }
        levels.push(KRLevel {
            heights,
            transitions,
            decomposition,
        });
    }
    if let Some((n, tokens)) = lines.next() {
        return err(
            n,
            format!("unexpected trailing line '{}'", tokens.join(" ")),
        );
    }
    Ok(KRTower { levels })
}
