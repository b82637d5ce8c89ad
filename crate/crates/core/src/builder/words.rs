use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AkError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn to_char(self) -> char {
        match (self.gen, self.inverse) {
            (Generator::X, false) => 'x',
            (Generator::X, true) => 'X',
            (Generator::Y, false) => 'y',
            (Generator::Y, true) => 'Y',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        let (gen, inverse) = match c {
            'x' => (Generator::X, false),
            'X' => (Generator::X, true),
            'y' => (Generator::Y, false),
            'Y' => (Generator::Y, true),
            _ => return None,
        };
        Some(Letter { gen, inverse })
    }

    pub fn inv(self) -> Letter {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }
}

/// A nonempty cyclically reduced word over {x, X, y, Y}; capitals are inverses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelatorWord {
    letters: Vec<Letter>,
}

impl RelatorWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        let n = letters.len();
        let reduced = (0..n).all(|i| letters[(i + 1) % n] != letters[i].inv());
        if n == 0 || !reduced {
            let w: String = letters.iter().map(|l| l.to_char()).collect();
            return Err(AkError::Construction(format!(
                "word `{w}` is not cyclically reduced"
            )));
        }
        Ok(RelatorWord { letters })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| AkError::Construction(format!("bad letter `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn count(&self, gen: Generator) -> usize {
        self.letters.iter().filter(|l| l.gen == gen).count()
    }

    /// Signed exponent sum of `gen`.
    pub fn exponent_sum(&self, gen: Generator) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| if l.inverse { -1 } else { 1 })
            .sum()
    }
}

impl fmt::Display for RelatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// The blue relator `xyxYXY` and the red relator `xʳ Yʳ⁻¹`.
pub fn relator_words(r: usize) -> Result<(RelatorWord, RelatorWord)> {
    if r < 3 {
        return Err(AkError::RTooSmall(r));
    }
    let blue = RelatorWord::parse("xyxYXY")?;
    let red = RelatorWord::parse(&("x".repeat(r) + &"Y".repeat(r - 1)))?;
    Ok((blue, red))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrandRegion {
    HandleX,
    HandleY,
    Ball,
}

/// Strand decomposition of a relator curve: one handle strand per letter,
/// one ball strand between consecutive letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveChain {
    pub strands: Vec<StrandRegion>,
    pub vertex_count: usize,
}

pub fn build_curve_chain(word: &RelatorWord) -> CurveChain {
    let strands = word
        .letters()
        .iter()
        .flat_map(|l| {
            let h = match l.gen {
                Generator::X => StrandRegion::HandleX,
                Generator::Y => StrandRegion::HandleY,
            };
            [h, StrandRegion::Ball]
        })
        .collect::<Vec<_>>();
    CurveChain {
        vertex_count: 3 * strands.len(),
        strands,
    }
}
