use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use fock_core::GridConfig;
use serde::{Deserialize, Serialize};

use crate::{
    basic_process, identity_process, BasicKind, CmxProcess, ProcessError, Quadruple, Result, C64,
};

/// Basic integrator, labelled in Evans notation `A^α_β`:
/// `Λ = A^1_1`, `A = A^0_1`, `A† = A^1_0`, `t = A^0_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Letter {
    Gauge,
    Annihilation,
    Creation,
    Time,
}

impl Letter {
    pub fn label(self) -> (u8, u8) {
        match self {
            Letter::Gauge => (1, 1),
            Letter::Annihilation => (0, 1),
            Letter::Creation => (1, 0),
            Letter::Time => (0, 0),
        }
    }

    pub fn from_label(alpha: u8, beta: u8) -> Self {
        match (alpha, beta) {
            (1, 1) => Letter::Gauge,
            (0, 1) => Letter::Annihilation,
            (1, 0) => Letter::Creation,
            _ => Letter::Time,
        }
    }

    /// `dA^α_β dA^γ_δ = δ_{β,1} δ_{γ,1} dA^α_δ`.
    pub fn ito_product(self, other: Letter) -> Option<Letter> {
        let (a, b) = self.label();
        let (c, d) = other.label();
        (b == 1 && c == 1).then(|| Letter::from_label(a, d))
    }

    pub fn basic_kind(self) -> BasicKind {
        match self {
            Letter::Gauge => BasicKind::Gauge,
            Letter::Annihilation => BasicKind::Annihilation,
            Letter::Creation => BasicKind::Creation,
            Letter::Time => BasicKind::Time,
        }
    }

    fn symbol(self) -> char {
        match self {
            Letter::Gauge => 'L',
            Letter::Annihilation => 'A',
            Letter::Creation => 'C',
            Letter::Time => 'T',
        }
    }
}

/// `coeff · X_1 X_2 ⋯ X_r` with a real constant coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    /// Letters `L` (Λ), `A`, `C` (A†), `T` (time), leftmost acting last.
    pub word: String,
}

impl Term {
    pub fn coefficient(&self) -> C64 {
        C64::new(self.coeff, 0.0)
    }

    pub fn letters(&self) -> Result<Vec<Letter>> {
        self.word
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '*')
            .map(|c| match c {
                'L' => Ok(Letter::Gauge),
                'A' => Ok(Letter::Annihilation),
                'C' => Ok(Letter::Creation),
                'T' => Ok(Letter::Time),
                other => Err(ProcessError::UnknownScenario(format!(
                    "letter '{other}' in word"
                ))),
            })
            .collect()
    }
}

/// Polynomial in `(Λ_t, A_t, A_t†, t)` with constant real coefficients,
/// serialized as a sum string such as `"A + C"` or `"0.5 AC + 0.5 CA"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PolyExpr {
    pub terms: Vec<Term>,
}

impl PolyExpr {
    pub fn word(word: &str) -> Self {
        Self {
            terms: vec![Term {
                coeff: 1.0,
                word: word.into(),
            }],
        }
    }

    pub fn max_len(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.word.chars().filter(|c| c.is_alphabetic()).count())
            .max()
            .unwrap_or(0)
    }
}

impl FromStr for PolyExpr {
    type Err = ProcessError;

    /// `"A C + 0.5 C A"`-style sums; a coefficient may prefix each word.
    fn from_str(s: &str) -> Result<Self> {
        let mut terms = vec![];
        if s.trim().is_empty() {
            return Err(ProcessError::UnknownScenario("empty polynomial".into()));
        }
        for part in s.split('+') {
            let part = part.trim();
            let (coef, word) = match part.find(|c: char| c.is_alphabetic()) {
                Some(0) => (1.0, part),
                Some(p) => (
                    part[..p]
                        .trim()
                        .trim_end_matches('*')
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| {
                            ProcessError::UnknownScenario(format!("bad coefficient in '{part}'"))
                        })?,
                    &part[p..],
                ),
                None => (
                    part.parse::<f64>()
                        .map_err(|_| ProcessError::UnknownScenario(part.into()))?,
                    "",
                ),
            };
            let t = Term {
                coeff: coef,
                word: word.chars().filter(|c| !c.is_whitespace()).collect(),
            };
            t.letters()?;
            terms.push(t);
        }
        Ok(Self { terms })
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let w: String = t
                    .letters()
                    .unwrap_or_default()
                    .iter()
                    .map(|l| l.symbol())
                    .collect();
                format!("{} {}", t.coeff, w).trim_end().to_string()
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl TryFrom<String> for PolyExpr {
    type Error = ProcessError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolyExpr> for String {
    fn from(p: PolyExpr) -> String {
        p.to_string()
    }
}

struct Basics {
    grid: GridConfig,
    max_level: usize,
    cache: HashMap<Letter, CmxProcess>,
}

impl Basics {
    fn get(&mut self, l: Letter) -> Result<CmxProcess> {
        if let Some(p) = self.cache.get(&l) {
            return Ok(p.clone());
        }
        let p = basic_process(self.grid, self.max_level, l.basic_kind())?;
        self.cache.insert(l, p.clone());
        Ok(p)
    }

    fn product(&mut self, letters: &[Letter]) -> Result<CmxProcess> {
        let mut acc = identity_process(self.grid, self.max_level)?;
        for &l in letters {
            acc = acc.mul(&self.get(l)?)?;
        }
        Ok(acc)
    }
}

fn check_depth(expr: &PolyExpr, depth: usize) -> Result<()> {
    let len = expr.max_len();
    if len > depth {
        return Err(ProcessError::Depth { len, depth });
    }
    Ok(())
}

/// Samplewise evaluation of the polynomial on the basic processes.
pub fn polynomial_process(
    expr: &PolyExpr,
    grid: GridConfig,
    max_level: usize,
    depth: usize,
) -> Result<CmxProcess> {
    check_depth(expr, depth)?;
    let mut basics = Basics {
        grid,
        max_level,
        cache: HashMap::new(),
    };
    let mut acc = CmxProcess::zero(grid, max_level)?;
    for t in &expr.terms {
        acc = acc.add(&basics.product(&t.letters()?)?.scale(t.coefficient())?)?;
    }
    Ok(acc)
}

/// Integrands of the polynomial process from the iterated Ito product rule:
/// every nonempty set `S` of positions whose differentials chain through the
/// Ito table contributes the product of the remaining letters against the
/// chained differential `dA^{α(first)}_{β(last)}`.
pub fn polynomial_quadruple(
    expr: &PolyExpr,
    grid: GridConfig,
    max_level: usize,
    depth: usize,
) -> Result<Quadruple> {
    check_depth(expr, depth)?;
    let mut basics = Basics {
        grid,
        max_level,
        cache: HashMap::new(),
    };
    let zero = CmxProcess::zero(grid, max_level)?;
    let mut parts: HashMap<Letter, CmxProcess> = HashMap::new();
    for t in &expr.terms {
        let word = t.letters()?;
        let r = word.len();
        for mask in 1u32..(1 << r) {
            let chosen: Vec<usize> = (0..r).filter(|&p| mask >> p & 1 == 1).collect();
            let mut label = Some(word[chosen[0]]);
            for &p in &chosen[1..] {
                label = label.and_then(|l| l.ito_product(word[p]));
            }
            let Some(label) = label else { continue };
            let rest: Vec<Letter> = (0..r)
                .filter(|&p| mask >> p & 1 == 0)
                .map(|p| word[p])
                .collect();
            let integrand = basics.product(&rest)?.scale(t.coefficient())?;
            let slot = parts.entry(label).or_insert_with(|| zero.clone());
            *slot = slot.add(&integrand)?;
        }
    }
    let mut take = |l: Letter| parts.remove(&l).unwrap_or_else(|| zero.clone());
    let (e, f, g, h) = (
        take(Letter::Gauge),
        take(Letter::Annihilation),
        take(Letter::Creation),
        take(Letter::Time),
    );
    let mut q = Quadruple::new(e, f, g, h, false)?;
    q.symmetric = q.symmetry_residual()? <= 1e-12;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fock_core::FockBasis;

    #[test]
    fn ito_table() {
        use Letter::*;
        assert_eq!(Annihilation.ito_product(Creation), Some(Time));
        assert_eq!(Creation.ito_product(Annihilation), None);
        assert_eq!(Gauge.ito_product(Gauge), Some(Gauge));
        assert_eq!(Annihilation.ito_product(Gauge), Some(Annihilation));
        assert_eq!(Gauge.ito_product(Creation), Some(Creation));
        assert_eq!(Time.ito_product(Time), None);
    }

    #[test]
    fn a_squared_single_mode() {
        let grid = GridConfig::new(1).unwrap();
        let p = polynomial_process(&PolyExpr::word("AA"), grid, 2, 4).unwrap();
        let s = p.sample(1);
        assert!((s.block(0, 2).unwrap()[[0, 0]].re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_word_is_identity() {
        let grid = GridConfig::new(2).unwrap();
        let p = polynomial_process(&PolyExpr::word(""), grid, 2, 4).unwrap();
        let id = cmx::ChaosMatrix::identity(FockBasis::shared(2, 2).unwrap());
        assert_eq!(p.sample(2).max_abs_diff(&id).unwrap(), 0.0);
    }

    #[test]
    fn gauge_times_annihilation_kills_vacuum() {
        let grid = GridConfig::new(2).unwrap();
        let p = polynomial_process(&PolyExpr::word("LA"), grid, 3, 4).unwrap();
        let b = FockBasis::shared(2, 3).unwrap();
        let v = fock_core::StateVector::vacuum(&b);
        assert_eq!(p.sample(2).apply(&v).norm(), 0.0);
    }

    #[test]
    fn a_squared_quadruple_is_two_a_da() {
        let grid = GridConfig::new(3).unwrap();
        let q = polynomial_quadruple(&PolyExpr::word("AA"), grid, 3, 4).unwrap();
        let a = basic_process(grid, 3, BasicKind::Annihilation)
            .unwrap()
            .scale(C64::new(2.0, 0.0))
            .unwrap();
        assert_eq!(q.f.max_abs_diff(&a).unwrap(), 0.0);
        assert!(q.e.is_zero() && q.g.is_zero() && q.h.is_zero());
    }

    #[test]
    fn product_with_correction() {
        // A A†: F = A†, G = A, H = I.
        let grid = GridConfig::new(2).unwrap();
        let q = polynomial_quadruple(&PolyExpr::word("AC"), grid, 3, 4).unwrap();
        let id = identity_process(grid, 3).unwrap();
        assert_eq!(q.h.max_abs_diff(&id).unwrap(), 0.0);
        let c = basic_process(grid, 3, BasicKind::Creation).unwrap();
        assert_eq!(q.f.max_abs_diff(&c).unwrap(), 0.0);
    }

    #[test]
    fn parse_and_depth() {
        let e: PolyExpr = "A + C".parse().unwrap();
        assert_eq!(e.terms.len(), 2);
        let e2: PolyExpr = "0.5 * AC + 2 CA".parse().unwrap();
        assert_eq!(e2.terms[0].coeff, 0.5);
        let back: PolyExpr = e2.to_string().parse().unwrap();
        assert_eq!(back, e2);
        assert_eq!(e2.terms[1].word, "CA");
        assert!("A + X".parse::<PolyExpr>().is_err());
        let grid = GridConfig::new(1).unwrap();
        assert!(polynomial_process(&PolyExpr::word("AAAAA"), grid, 2, 4).is_err());
        let q = polynomial_quadruple(&e, grid, 2, 4).unwrap();
        assert!(q.symmetric);
    }
}
