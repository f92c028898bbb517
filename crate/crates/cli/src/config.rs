//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, keys may appear once.
//! Lists are comma separated. Unset optional keys fall back to a default that
//! depends on the command (see [`RunConfig::help_table`]).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use bo4lab_core::diagnostics::InequalityId;
use bo4lab_core::{CoefficientSet, Scheme, TimeDirection};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Identities,
    Commutators,
    Symbols,
    Gn,
    Mollifier,
    Loss,
    TwoSolution,
    BonaSmith,
    Conserve,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Evolve,
        Command::Identities,
        Command::Commutators,
        Command::Symbols,
        Command::Gn,
        Command::Mollifier,
        Command::Loss,
        Command::TwoSolution,
        Command::BonaSmith,
        Command::Conserve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Identities => "identities",
            Command::Commutators => "commutators",
            Command::Symbols => "symbols",
            Command::Gn => "gn",
            Command::Mollifier => "mollifier",
            Command::Loss => "loss",
            Command::TwoSolution => "two-solution",
            Command::BonaSmith => "bona-smith",
            Command::Conserve => "conserve",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    /// `amplitude * cos(mode x)`.
    Cos,
    /// Seeded mean-free field with `|u^(xi)| ~ <xi>^{-decay}` on `1..=cutoff`,
    /// scaled so that `||u0||_{H^s} = amplitude`.
    Random,
}

/// Fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub coeffs: CoefficientSet,
    pub s: f64,
    pub s0: f64,
    pub s_prime: f64,
    pub epsilon: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub cfl: f64,
    pub t_end: f64,
    pub sample_every: usize,
    pub scheme: Scheme,
    pub time_direction: TimeDirection,
    pub seed: u64,
    pub initial: InitialData,
    pub amplitude: f64,
    pub mode: i64,
    pub cutoff: i64,
    pub decay: Option<f64>,
    pub count: Option<usize>,
    pub s_list: Option<Vec<f64>>,
    pub kinds: Vec<u8>,
    pub inequalities: Vec<InequalityId>,
    pub box_radius: i64,
    pub fit_radius: i64,
    pub gn_l: Option<Vec<u32>>,
    pub gn_p: Vec<f64>,
    pub alphas: Option<Vec<f64>>,
    pub k0: Vec<i64>,
    pub steps: Option<usize>,
    pub horizon: Option<f64>,
    /// Not echoed into manifests, so replays can target another directory.
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Evolve,
            n: 256,
            coeffs: CoefficientSet::INTEGRABLE,
            s: 4.0,
            s0: 3.6,
            s_prime: 4.0,
            epsilon: None,
            dt: None,
            cfl: 0.5,
            t_end: 1.0,
            sample_every: 10,
            scheme: Scheme::Etdrk4,
            time_direction: TimeDirection::Forward,
            seed: 0,
            initial: InitialData::Random,
            amplitude: 0.1,
            mode: 1,
            cutoff: 8,
            decay: None,
            count: None,
            s_list: None,
            kinds: (1..=9).collect(),
            inequalities: vec![InequalityId::ThirdOrderSymbol, InequalityId::PowerDifference],
            box_radius: 256,
            fit_radius: 64,
            gn_l: None,
            gn_p: vec![2.0, 4.0, f64::INFINITY],
            alphas: None,
            k0: vec![4, 8, 16, 32],
            steps: None,
            horizon: None,
            out: PathBuf::from("bo4lab-out"),
        }
    }
}

const KEYS: &[&str] = &[
    "command",
    "n",
    "preset",
    "c1",
    "c2",
    "c3",
    "c4",
    "c5",
    "c6",
    "c7",
    "c8",
    "s",
    "s0",
    "s_prime",
    "epsilon",
    "dt",
    "cfl",
    "t_end",
    "sample_every",
    "scheme",
    "time_direction",
    "seed",
    "initial",
    "amplitude",
    "mode",
    "cutoff",
    "decay",
    "count",
    "s_list",
    "kinds",
    "inequalities",
    "box_radius",
    "fit_radius",
    "gn_l",
    "gn_p",
    "alphas",
    "k0",
    "steps",
    "horizon",
    "out",
];

fn bad(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn take<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| bad(key, format!("expected {what}, got {v:?}"))),
        }
    }

    fn list<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<Vec<T>>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|item| {
                    let item = item.trim();
                    item.parse::<T>()
                        .map_err(|_| bad(key, format!("expected a list of {what}, got item {item:?}")))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

fn parse_scheme(key: &str, v: &str) -> Result<Scheme> {
    match v {
        "etdrk4" => Ok(Scheme::Etdrk4),
        "ifrk4" => Ok(Scheme::Ifrk4),
        _ => Err(bad(key, format!("expected etdrk4 or ifrk4, got {v:?}"))),
    }
}

fn parse_inequality(key: &str, v: &str) -> Result<InequalityId> {
    match v {
        "third-order" => Ok(InequalityId::ThirdOrderSymbol),
        "power-difference" => Ok(InequalityId::PowerDifference),
        "first-order" => Ok(InequalityId::FirstOrderSymbol),
        _ => Err(bad(
            key,
            format!("expected third-order, power-difference or first-order, got {v:?}"),
        )),
    }
}

fn inequality_name(id: InequalityId) -> &'static str {
    match id {
        InequalityId::ThirdOrderSymbol => "third-order",
        InequalityId::PowerDifference => "power-difference",
        InequalityId::FirstOrderSymbol => "first-order",
    }
}

/// Parses and validates a configuration. Every error names the offending key.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Syntax {
            line: lineno + 1,
            text: raw.to_string(),
        })?;
        let (k, v) = (k.trim(), v.trim());
        let k = if k == "s'" { "s_prime" } else { k };
        if !KEYS.contains(&k) {
            return Err(bad(k, "unknown key"));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(bad(k, "given more than once"));
        }
    }
    let mut e = Entries(map);
    let mut c = RunConfig::default();

    if let Some(v) = e.0.remove("command") {
        c.command = v.parse().map_err(|m: String| bad("command", m))?;
    }
    if let Some(v) = e.take("n", "an integer")? {
        c.n = v;
    }
    if let Some(v) = e.0.remove("preset") {
        c.coeffs = match v.as_str() {
            "integrable" => CoefficientSet::INTEGRABLE,
            "zero" | "linear" => CoefficientSet::ZERO,
            _ => return Err(bad("preset", format!("expected integrable or zero, got {v:?}"))),
        };
    }
    let mut cs = c.coeffs.to_array();
    for (j, slot) in cs.iter_mut().enumerate() {
        let key = format!("c{}", j + 1);
        if let Some(v) = e.take::<f64>(&key, "a number")? {
            *slot = v;
        }
    }
    c.coeffs = CoefficientSet::from_array(cs);
    macro_rules! set {
        ($field:ident, $what:expr) => {
            if let Some(v) = e.take(stringify!($field), $what)? {
                c.$field = v;
            }
        };
    }
    set!(s, "a number");
    set!(s0, "a number");
    set!(s_prime, "a number");
    c.epsilon = e.list("epsilon", "numbers")?;
    c.dt = e.take("dt", "a number")?;
    set!(cfl, "a number");
    set!(t_end, "a number");
    set!(sample_every, "a positive integer");
    if let Some(v) = e.0.remove("scheme") {
        c.scheme = parse_scheme("scheme", &v)?;
    }
    if let Some(v) = e.take::<i64>("time_direction", "1 or -1")? {
        c.time_direction = TimeDirection::from_sign(v).map_err(|_| bad("time_direction", "expected 1 or -1"))?;
    }
    set!(seed, "a nonnegative integer");
    if let Some(v) = e.0.remove("initial") {
        c.initial = match v.as_str() {
            "cos" => InitialData::Cos,
            "random" => InitialData::Random,
            _ => return Err(bad("initial", format!("expected cos or random, got {v:?}"))),
        };
    }
    set!(amplitude, "a number");
    set!(mode, "an integer");
    set!(cutoff, "an integer");
    c.decay = e.take("decay", "a number")?;
    c.count = e.take("count", "a positive integer")?;
    c.s_list = e.list("s_list", "numbers")?;
    if let Some(v) = e.list("kinds", "integers")? {
        c.kinds = v;
    }
    if let Some(v) = e.0.remove("inequalities") {
        c.inequalities = v
            .split(',')
            .map(|x| parse_inequality("inequalities", x.trim()))
            .collect::<Result<_>>()?;
    }
    set!(box_radius, "an integer");
    set!(fit_radius, "an integer");
    c.gn_l = e.list("gn_l", "nonnegative integers")?;
    if let Some(v) = e.list::<f64>("gn_p", "numbers or inf")? {
        c.gn_p = v;
    }
    c.alphas = e.list("alphas", "numbers")?;
    if let Some(v) = e.list("k0", "integers")? {
        c.k0 = v;
    }
    c.steps = e.take("steps", "a positive integer")?;
    c.horizon = e.take("horizon", "a number")?;
    if let Some(v) = e.0.remove("out") {
        c.out = PathBuf::from(v);
    }
    debug_assert!(e.0.is_empty(), "every accepted key is consumed");
    c.validate()?;
    Ok(c)
}

fn finite_at_least(key: &str, v: f64, lo: f64) -> Result<()> {
    if v.is_finite() && v >= lo {
        Ok(())
    } else {
        Err(bad(key, format!("must be finite and >= {lo}, got {v}")))
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(key, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.n.is_multiple_of(2) || !(16..=1 << 16).contains(&self.n) {
            return Err(bad("n", format!("must be even and lie in 16..=65536, got {}", self.n)));
        }
        self.coeffs.validate().map_err(|e| bad("c1..c8", e.to_string()))?;
        finite_at_least("s", self.s, 0.0)?;
        if !(self.s0 > 3.5 && self.s0.is_finite()) {
            return Err(bad("s0", format!("s0 must exceed 3.5, got {}", self.s0)));
        }
        finite_at_least("s_prime", self.s_prime, 0.0)?;
        if let Some(eps) = &self.epsilon {
            if eps.is_empty() {
                return Err(bad("epsilon", "empty list"));
            }
            for &v in eps {
                if !(0.0..1.0).contains(&v) {
                    return Err(bad("epsilon", format!("must lie in [0, 1), got {v}")));
                }
            }
        }
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
        }
        positive("cfl", self.cfl)?;
        positive("t_end", self.t_end)?;
        if self.sample_every == 0 {
            return Err(bad("sample_every", "must be at least 1"));
        }
        if !self.amplitude.is_finite() {
            return Err(bad("amplitude", "must be finite"));
        }
        let k_max = (self.n / 2 - 1) as i64;
        if !(0..=k_max).contains(&self.mode) {
            return Err(bad("mode", format!("must lie in 0..={k_max}, got {}", self.mode)));
        }
        if self.cutoff < 1 {
            return Err(bad("cutoff", format!("must be at least 1, got {}", self.cutoff)));
        }
        if let Some(d) = self.decay {
            finite_at_least("decay", d, 0.0)?;
        }
        if self.count == Some(0) {
            return Err(bad("count", "must be at least 1"));
        }
        if let Some(list) = &self.s_list {
            if list.is_empty() {
                return Err(bad("s_list", "empty list"));
            }
            for &v in list {
                finite_at_least("s_list", v, 0.0)?;
            }
        }
        if self.kinds.is_empty() || self.kinds.iter().any(|k| !(1..=9).contains(k)) {
            return Err(bad(
                "kinds",
                format!("must be a nonempty subset of 1..=9, got {:?}", self.kinds),
            ));
        }
        if self.inequalities.is_empty() {
            return Err(bad("inequalities", "empty list"));
        }
        if self.fit_radius < 16 {
            return Err(bad("fit_radius", format!("must be >= 16, got {}", self.fit_radius)));
        }
        if self.box_radius < 4 * self.fit_radius {
            return Err(bad("box_radius", "must be at least 4 * fit_radius"));
        }
        if self.gn_p.is_empty() || self.gn_p.iter().any(|&p| p.is_nan() || p < 2.0) {
            return Err(bad("gn_p", "every exponent must be >= 2 (inf allowed)"));
        }
        if let Some(a) = &self.alphas {
            if a.is_empty() {
                return Err(bad("alphas", "empty list"));
            }
            for &v in a {
                finite_at_least("alphas", v, 0.0)?;
            }
        }
        if self.k0.len() < 2 || self.k0.iter().any(|&k| k < 1) {
            return Err(bad("k0", "needs at least two positive wavenumbers"));
        }
        if self.command == Command::Loss && self.k0.iter().any(|&k| k > k_max) {
            return Err(bad(
                "k0",
                format!("wavenumbers must not exceed k_max = {k_max} for n = {}", self.n),
            ));
        }
        if self.steps == Some(0) {
            return Err(bad("steps", "must be at least 1"));
        }
        if let Some(h) = self.horizon {
            positive("horizon", h)?;
        }
        Ok(())
    }

    /// Viscosities for the command, with the command's default when unset.
    pub fn epsilons(&self) -> Vec<f64> {
        if let Some(e) = &self.epsilon {
            return e.clone();
        }
        match self.command {
            Command::Loss => vec![0.0],
            Command::BonaSmith => (4..=10).map(|j| 2f64.powi(-j)).collect(),
            Command::Conserve => vec![1e-2, 1e-3, 1e-4],
            _ => vec![1e-3],
        }
    }

    /// Sobolev indices for the command, with the command's default when unset.
    pub fn s_values(&self) -> Vec<f64> {
        if let Some(s) = &self.s_list {
            return s.clone();
        }
        match self.command {
            Command::Symbols => vec![0.0, 1.0, 2.0, 2.5, 3.7],
            Command::Commutators => vec![0.0, 2.0, 4.0],
            Command::Identities => vec![1.0, 2.5, 4.0],
            Command::Gn => vec![1.0, 2.0, 3.0],
            _ => vec![self.s],
        }
    }

    /// Corpus size for the command, with the command's default when unset.
    pub fn corpus_size(&self) -> usize {
        self.count.unwrap_or(1000)
    }

    /// Canonical text form: every key explicit except `out`. Parsing it back
    /// yields the same configuration (apart from `out`).
    pub fn echo(&self) -> String {
        fn join<T: fmt::Debug>(v: &[T]) -> String {
            v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
        }
        fn float(x: f64) -> String {
            if x.is_infinite() {
                "inf".to_string()
            } else {
                format!("{x:?}")
            }
        }
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("command", self.command.to_string());
        kv("n", self.n.to_string());
        for (j, c) in self.coeffs.to_array().iter().enumerate() {
            kv(&format!("c{}", j + 1), float(*c));
        }
        kv("s", float(self.s));
        kv("s0", float(self.s0));
        kv("s_prime", float(self.s_prime));
        if let Some(e) = &self.epsilon {
            kv("epsilon", join(e));
        }
        if let Some(dt) = self.dt {
            kv("dt", float(dt));
        }
        kv("cfl", float(self.cfl));
        kv("t_end", float(self.t_end));
        kv("sample_every", self.sample_every.to_string());
        kv(
            "scheme",
            match self.scheme {
                Scheme::Etdrk4 => "etdrk4",
                Scheme::Ifrk4 => "ifrk4",
            }
            .to_string(),
        );
        kv("time_direction", format!("{}", self.time_direction.sign() as i64));
        kv("seed", self.seed.to_string());
        kv(
            "initial",
            match self.initial {
                InitialData::Cos => "cos",
                InitialData::Random => "random",
            }
            .to_string(),
        );
        kv("amplitude", float(self.amplitude));
        kv("mode", self.mode.to_string());
        kv("cutoff", self.cutoff.to_string());
        if let Some(d) = self.decay {
            kv("decay", float(d));
        }
        if let Some(n) = self.count {
            kv("count", n.to_string());
        }
        if let Some(l) = &self.s_list {
            kv("s_list", join(l));
        }
        kv("kinds", join(&self.kinds));
        kv(
            "inequalities",
            self.inequalities
                .iter()
                .map(|&i| inequality_name(i))
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv("box_radius", self.box_radius.to_string());
        kv("fit_radius", self.fit_radius.to_string());
        if let Some(l) = &self.gn_l {
            kv("gn_l", join(l));
        }
        kv(
            "gn_p",
            self.gn_p.iter().map(|&p| float(p)).collect::<Vec<_>>().join(", "),
        );
        if let Some(a) = &self.alphas {
            kv("alphas", join(a));
        }
        kv("k0", join(&self.k0));
        if let Some(st) = self.steps {
            kv("steps", st.to_string());
        }
        if let Some(h) = self.horizon {
            kv("horizon", float(h));
        }
        s
    }

    /// Key reference printed by `--help`.
    pub fn help_table() -> &'static str {
        HELP
    }
}

const HELP: &str = "\
Config keys (one `key = value` per line, `#` comments, lists comma separated):
  command          evolve | identities | commutators | symbols | gn | mollifier |
                   loss | two-solution | bona-smith | conserve   (set by the CLI)
  n                grid points, even, 16..=65536                  [256]
  preset           integrable | zero                              [integrable]
  c1 .. c8         explicit coefficients, override the preset
  s, s0, s_prime   Sobolev indices; s0 > 3.5                      [4, 3.6, 4]
  epsilon          viscosity or list                              [1e-3; loss 0;
                   bona-smith 2^-4..2^-10; conserve 1e-2, 1e-3, 1e-4]
  dt               fixed step; unset = chosen from the data       [auto]
  cfl              nonlinear gain bound for the automatic step    [0.5]
  t_end            final time                                     [1]
  sample_every     steps between samples                          [10]
  scheme           etdrk4 | ifrk4                                 [etdrk4]
  time_direction   1 | -1                                         [1]
  seed             RNG seed                                       [0]
  initial          random | cos                                   [random]
  amplitude        ||u0||_{H^s} (random) or cos amplitude         [0.1]
  mode, cutoff     cos wavenumber; highest random mode (clamped)  [1, 8]
  decay            random spectrum decay                          [s + 1]
  count            operator and sandwich corpus size              [1000]
  s_list           indices scanned by the check commands          [per command]
  kinds            commutator kinds                               [1..9]
  inequalities     third-order, power-difference, first-order     [first two]
  box_radius       symbol scan box R                              [256]
  fit_radius       symbol fit box r                               [64]
  gn_l, gn_p       interpolation derivative orders and exponents  [0..s; 2, 4, inf]
  alphas           mollifier / Bona-Smith smoothness gaps         [1..s; s]
  k0               derivative-loss wavenumbers                    [4, 8, 16, 32]
  steps, horizon   experiment step count and time scale           [per command]
  out              output directory (the --out flag wins)         [bo4lab-out]
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!((c.n, c.s, c.s0, c.seed), (256, 4.0, 3.6, 0));
        assert_eq!(c.epsilons(), vec![1e-3]);
        assert_eq!(c.coeffs, CoefficientSet::INTEGRABLE);
    }

    #[test]
    fn preset_sets_the_hierarchy_coefficients() {
        let c = parse_config("preset = integrable\n").unwrap();
        assert_eq!(c.coeffs.to_array(), [3.0, 2.0, -1.0, -1.0, -2.0, -2.0, -2.0, 1.0]);
        let z = parse_config("preset = zero\nc1 = 0.5").unwrap();
        assert_eq!(z.coeffs.c1, 0.5);
        assert_eq!(z.coeffs.c2, 0.0);
    }

    #[test]
    fn explicit_coefficients_override_preset_in_any_order() {
        let c = parse_config("c3 = 7\npreset = integrable").unwrap();
        assert_eq!(c.coeffs.c3, 7.0);
    }

    #[test]
    fn s0_bound_is_strict() {
        let err = parse_config("s0 = 3.5").unwrap_err().to_string();
        assert!(err.contains("s0 must exceed 3.5"), "{err}");
        assert!(parse_config("s0 = 3.5000001").is_ok());
    }

    #[test]
    fn errors_name_the_key() {
        for (text, key) in [
            ("bogus = 1", "bogus"),
            ("n = abc", "`n`"),
            ("n = 7", "`n`"),
            ("epsilon = 1e-3, x", "epsilon"),
            ("kinds = 0, 3", "kinds"),
            ("scheme = rk4", "scheme"),
            ("seed = -1", "seed"),
            ("dt = 0", "dt"),
        ] {
            let err = parse_config(text).unwrap_err().to_string();
            assert!(err.contains(key), "{text}: {err}");
        }
    }

    #[test]
    fn comments_blank_lines_and_prime_alias() {
        let c = parse_config("# header\n\n s' = 4.5  # trailing\nseed=7\n").unwrap();
        assert_eq!((c.s_prime, c.seed), (4.5, 7));
    }

    #[test]
    fn duplicates_and_missing_equals_are_rejected() {
        assert!(parse_config("n = 64\nn = 128").unwrap_err().to_string().contains("`n`"));
        assert!(parse_config("n 64").unwrap_err().to_string().contains("line 1"));
    }

    #[test]
    fn echo_round_trips() {
        let text = "command = symbols\nn = 64\nepsilon = 1e-3, 5e-4\ngn_p = 2, inf\nc4 = 0.25\n\
                    s_list = 0, 2.5\ninequalities = first-order\ndecay = 3.3\ndt = 1e-4\n";
        let c = parse_config(text).unwrap();
        let back = parse_config(&c.echo()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.echo(), c.echo());
    }
}
