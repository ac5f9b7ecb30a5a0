//! Named automata, seeded random automata, and the reduction from finite
//! automata intersection to subset reachability.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dfa::{parse_header, parse_letter_line, Dfa, Word};
use crate::error::{Error, Result};
use crate::limits::{Limits, MAX_STATES};
use crate::state::StateSet;
use crate::transform::Transformation;

/// Identifier of the generator behind [`random_dfa`]: SplitMix64 seeded with
/// the raw seed, bounded draws by the multiply-shift map
/// `x ↦ (x · n) >> 64` on 64-bit outputs.
pub const RANDOM_ALGORITHM: &str = "splitmix64/mulshift-v1";

/// The Černý automaton `C_n`: `a` fixes `1..n-1` and sends `n` to 1, `b` is
/// the cycle `i ↦ i + 1 (mod n)`.
pub fn cerny(n: usize) -> Result<Dfa> {
    if n < 2 {
        return Err(Error::precondition("the Černý series starts at n = 2"));
    }
    let a: Vec<usize> = (1..=n).map(|i| if i < n { i } else { 1 }).collect();
    Dfa::from_tables(n, vec![("a", a), ("b", cycle(n))])
}

fn cycle(n: usize) -> Vec<usize> {
    (1..=n).map(|i| i % n + 1).collect()
}

/// Two constant letters on two states.
pub fn flip_flop() -> Dfa {
    Dfa::from_tables(2, vec![("a", vec![1, 1]), ("b", vec![2, 2])]).expect("static table")
}

/// The 3-state, 4-letter automaton that is completely reachable although its
/// defect-1 graph is not strongly connected.
pub fn e3() -> Dfa {
    Dfa::from_tables(
        3,
        vec![
            ("a_[1]", vec![2, 2, 3]),
            ("a_[2]", vec![1, 1, 3]),
            ("a_[3]", vec![1, 1, 2]),
            ("a_[1,2]", vec![3, 3, 3]),
        ],
    )
    .expect("static table")
}

/// Six states, `a = (2,3,6,4,5,3)` and the 6-cycle `b`; completely reachable.
pub fn e6() -> Dfa {
    Dfa::from_tables(6, vec![("a", vec![2, 3, 6, 4, 5, 3]), ("b", cycle(6))]).expect("static table")
}

/// Six states, `a = (2,3,6,5,4,3)` and the 6-cycle `b`; not synchronizing.
pub fn e6_prime() -> Dfa {
    Dfa::from_tables(6, vec![("a", vec![2, 3, 6, 5, 4, 3]), ("b", cycle(6))]).expect("static table")
}

/// Look up a built-in automaton by its command-line name.
pub fn by_name(name: &str, n: Option<usize>) -> Result<Dfa> {
    match name {
        "cerny" => cerny(n.ok_or_else(|| Error::precondition("cerny needs a state count"))?),
        "flipflop" => Ok(flip_flop()),
        "e3" => Ok(e3()),
        "e6" => Ok(e6()),
        "e6prime" => Ok(e6_prime()),
        other => Err(Error::precondition(format!("unknown family `{other}`"))),
    }
}

/// Default letter names for generated automata: `a`, `b`, …, `z`, then `x26`, `x27`, ….
pub fn letter_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

/// Seeded generator for harness automata (see [`RANDOM_ALGORITHM`]).
pub struct HarnessRng(SplitMix64);

impl HarnessRng {
    pub fn new(seed: u64) -> Self {
        HarnessRng(SplitMix64::seed_from_u64(seed))
    }

    /// Uniform draw from `0..bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.0.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Uniform total map on `n` states.
    pub fn map(&mut self, n: usize) -> Transformation {
        Transformation::from_indices((0..n).map(|_| self.below(n) as u8).collect())
    }

    /// Uniform permutation (Fisher–Yates).
    pub fn permutation(&mut self, n: usize) -> Transformation {
        let mut p: Vec<u8> = (0..n as u8).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            p.swap(i, j);
        }
        Transformation::from_indices(p)
    }

    /// Uniform `n`-cycle (Sattolo).
    pub fn cyclic_permutation(&mut self, n: usize) -> Transformation {
        let mut order: Vec<u8> = (0..n as u8).collect();
        for i in (1..n).rev() {
            let j = self.below(i);
            order.swap(i, j);
        }
        Transformation::from_indices(order)
    }

    /// A map of defect exactly 1 (`n ≥ 2`): a permutation followed by
    /// merging one random pair of states.
    pub fn defect_one(&mut self, n: usize) -> Transformation {
        assert!(n >= 2);
        let p = self.permutation(n);
        let x = self.below(n);
        let mut y = self.below(n - 1);
        if y >= x {
            y += 1;
        }
        let mut map = p.indices().to_vec();
        map[y] = map[x];
        Transformation::from_indices(map)
    }
}

/// An automaton whose letter images are drawn independently and uniformly
/// from `1..=n`. The same arguments always give the same automaton.
pub fn random_dfa(n: usize, m: usize, seed: u64) -> Result<Dfa> {
    check_random_shape(n, m)?;
    let mut rng = HarnessRng::new(seed);
    let letters = (0..m).map(|i| (letter_name(i), rng.map(n))).collect();
    Dfa::new(n, letters)
}

/// Harness generator biased towards interesting automata: each letter is a
/// uniform map, a uniform permutation or a uniform defect-1 map with equal
/// probability (defect-1 maps need `n ≥ 2`).
pub fn random_mixed_dfa(n: usize, m: usize, seed: u64) -> Result<Dfa> {
    check_random_shape(n, m)?;
    let mut rng = HarnessRng::new(seed);
    let letters = (0..m)
        .map(|i| {
            let t = match rng.below(3) {
                0 => rng.map(n),
                1 => rng.permutation(n),
                _ if n >= 2 => rng.defect_one(n),
                _ => rng.map(n),
            };
            (letter_name(i), t)
        })
        .collect();
    Dfa::new(n, letters)
}

/// A 2-letter automaton with a uniform defect-1 letter `a` and a uniform
/// cyclic permutation `b` (`n ≥ 2`).
pub fn random_binary_main_case(n: usize, seed: u64) -> Result<Dfa> {
    if n < 2 {
        return Err(Error::precondition("need at least two states"));
    }
    let mut rng = HarnessRng::new(seed);
    let a = rng.defect_one(n);
    let b = rng.cyclic_permutation(n);
    Dfa::new(n, vec![("a", a), ("b", b)])
}

fn check_random_shape(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::precondition("random automata need n, m ≥ 1"));
    }
    if n > MAX_STATES {
        return Err(Error::CapExceeded {
            what: "state count",
            limit: MAX_STATES,
            requested: n,
        });
    }
    Ok(())
}

/// One automaton of an intersection instance, with local states `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaiAutomaton {
    /// Letter actions in the order of the shared alphabet.
    pub actions: Vec<Transformation>,
    /// 0-based initial state.
    pub initial: usize,
    /// 0-based final state.
    pub final_state: usize,
}

impl FaiAutomaton {
    pub fn n(&self) -> usize {
        self.actions.first().map_or(0, Transformation::n)
    }
}

/// An instance of finite automata intersection: does some word lead every
/// automaton from its initial state to its final state?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaiInstance {
    pub alphabet: Vec<String>,
    pub automata: Vec<FaiAutomaton>,
}

impl FaiInstance {
    pub fn new(alphabet: Vec<String>, automata: Vec<FaiAutomaton>) -> Result<Self> {
        let inst = FaiInstance { alphabet, automata };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.alphabet.is_empty() {
            return Err(Error::precondition("the alphabet must not be empty"));
        }
        if self.automata.is_empty() {
            return Err(Error::precondition(
                "an instance needs at least one automaton",
            ));
        }
        let mut seen = HashSet::new();
        for name in &self.alphabet {
            if name == "rho" {
                return Err(Error::precondition("letter name `rho` is reserved"));
            }
            if !seen.insert(name) {
                return Err(Error::DuplicateLetter(name.clone()));
            }
        }
        for aut in &self.automata {
            if aut.actions.len() != self.alphabet.len() {
                return Err(Error::precondition(format!(
                    "automaton defines {} letters, alphabet has {}",
                    aut.actions.len(),
                    self.alphabet.len()
                )));
            }
            let n = aut.n();
            if aut.actions.iter().any(|t| t.n() != n) {
                return Err(Error::precondition(
                    "letters of one automaton disagree on its state count",
                ));
            }
            if aut.initial >= n || aut.final_state >= n {
                return Err(Error::StateOutOfRange {
                    state: aut.initial.max(aut.final_state) + 1,
                    n,
                });
            }
        }
        Ok(())
    }

    pub fn total_states(&self) -> usize {
        self.automata.iter().map(FaiAutomaton::n).sum()
    }

    /// Parse the instance format:
    ///
    /// ```text
    /// fai <k>
    /// alphabet <name> ...
    /// aut <n> init <s> final <t>
    /// <name>: <images>      (one line per alphabet letter, in alphabet order)
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            });
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing `fai <k>` header"))?;
        let k = parse_header(line_no, header, "fai")?;
        let (line_no, alpha_line) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no + 1, 1, "missing `alphabet` line"))?;
        let mut parts = alpha_line.split_whitespace();
        if parts.next() != Some("alphabet") {
            return Err(Error::parse(line_no, 1, "expected `alphabet <names>`"));
        }
        let alphabet: Vec<String> = parts.map(str::to_string).collect();
        let mut automata = Vec::with_capacity(k);
        for _ in 0..k {
            let (line_no, aut_line) = lines
                .next()
                .ok_or_else(|| Error::parse(line_no + 1, 1, "missing `aut` block"))?;
            let fields: Vec<&str> = aut_line.split_whitespace().collect();
            let (n, s, t) = match fields.as_slice() {
                ["aut", n, "init", s, "final", t] => {
                    let num = |x: &str| {
                        x.parse::<usize>()
                            .map_err(|_| Error::parse(line_no, 1, format!("`{x}` is not a number")))
                    };
                    (num(n)?, num(s)?, num(t)?)
                }
                _ => {
                    return Err(Error::parse(
                        line_no,
                        1,
                        "expected `aut <n> init <s> final <t>`",
                    ))
                }
            };
            if n == 0 || s == 0 || s > n || t == 0 || t > n {
                return Err(Error::parse(line_no, 1, "initial/final state out of range"));
            }
            let mut actions = Vec::with_capacity(alphabet.len());
            for name in &alphabet {
                let (line_no, line) = lines.next().ok_or_else(|| {
                    Error::parse(line_no + 1, 1, format!("missing letter `{name}`"))
                })?;
                let (got, images) = parse_letter_line(line_no, line, n)?;
                if &got != name {
                    return Err(Error::parse(
                        line_no,
                        1,
                        format!("expected letter `{name}`, found `{got}`"),
                    ));
                }
                actions.push(Transformation::from_images(&images)?);
            }
            automata.push(FaiAutomaton {
                actions,
                initial: s - 1,
                final_state: t - 1,
            });
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::parse(
                line_no,
                1,
                "trailing content after the last automaton",
            ));
        }
        FaiInstance::new(alphabet, automata)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "fai {}\nalphabet {}\n",
            self.automata.len(),
            self.alphabet.join(" ")
        );
        for aut in &self.automata {
            let _ = writeln!(
                out,
                "aut {} init {} final {}",
                aut.n(),
                aut.initial + 1,
                aut.final_state + 1
            );
            for (name, t) in self.alphabet.iter().zip(&aut.actions) {
                let images: Vec<String> = t.images().iter().map(|q| q.to_string()).collect();
                let _ = writeln!(out, "{name}: {}", images.join(" "));
            }
        }
        out
    }
}

/// Reduce an intersection instance to a subset-reachability instance.
///
/// Automaton `j` occupies the block of states right after the blocks of
/// automata `1..j`; letters of the alphabet act blockwise, and the extra last
/// letter `rho` sends every state of block `j` to its initial state. The
/// target subset collects the final states.
pub fn reduce_fai(inst: &FaiInstance) -> Result<(Dfa, StateSet)> {
    inst.validate()?;
    let total = inst.total_states();
    if total > MAX_STATES {
        return Err(Error::CapExceeded {
            what: "reduced state count",
            limit: MAX_STATES,
            requested: total,
        });
    }
    let mut maps = vec![Vec::with_capacity(total); inst.alphabet.len() + 1];
    let mut target = StateSet::empty(total);
    let mut offset = 0;
    for aut in &inst.automata {
        for (letter, t) in aut.actions.iter().enumerate() {
            maps[letter].extend(t.indices().iter().map(|&q| (q as usize + offset) as u8));
        }
        maps[inst.alphabet.len()]
            .extend(std::iter::repeat_n((aut.initial + offset) as u8, aut.n()));
        target.insert(crate::state::StateId::from_index(offset + aut.final_state));
        offset += aut.n();
    }
    let names = inst
        .alphabet
        .iter()
        .cloned()
        .chain(std::iter::once("rho".to_string()));
    let letters = names
        .zip(maps)
        .map(|(name, map)| (name, Transformation::from_indices(map)))
        .collect();
    Ok((Dfa::new(total, letters)?, target))
}

/// Shortest word accepted by every automaton of the instance, by
/// breadth-first search on the product automaton (ties by alphabet order).
pub fn product_accepts(inst: &FaiInstance, limits: &Limits) -> Result<Option<Word>> {
    inst.validate()?;
    let size = inst
        .automata
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.n()))
        .unwrap_or(usize::MAX);
    if size > limits.product_states {
        return Err(Error::CapExceeded {
            what: "product state count",
            limit: limits.product_states,
            requested: size,
        });
    }
    let start: Vec<u8> = inst.automata.iter().map(|a| a.initial as u8).collect();
    let goal: Vec<u8> = inst.automata.iter().map(|a| a.final_state as u8).collect();
    let mut order = vec![start.clone()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut head = 0;
    while head < order.len() {
        if order[head] == goal {
            let mut letters = Vec::new();
            let mut i = head;
            while let Some((p, a)) = parent[i] {
                letters.push(a);
                i = p;
            }
            letters.reverse();
            return Ok(Some(Word::new(letters)));
        }
        for a in 0..inst.alphabet.len() {
            let next: Vec<u8> = inst
                .automata
                .iter()
                .zip(&order[head])
                .map(|(aut, &q)| aut.actions[a].apply_index(q as usize) as u8)
                .collect();
            if !index.contains_key(&next) {
                index.insert(next.clone(), order.len());
                order.push(next);
                parent.push(Some((head, a)));
            }
        }
        head += 1;
    }
    Ok(None)
}
