//! Parameter files: one `key = value` integer per line, `#` comments.
//!
//! Keys: `M`, `Q`, `P`, `B`, `B_sm`, `N`, `T`, `inner_M`, `inner_Q`,
//! `inner_P`, `inner_B`, `seed`. Every key is optional; [`ParamSet::atasses`]
//! reports which ones it needs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::atasses::AtassesConfig;
use crate::cipher::CipherParams;
use crate::error::{Error, Result};
use crate::ring::Ring;

pub const PRESET_PN12QP109: &str = "PN12QP109-compat";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParamSet {
    pub m: Option<usize>,
    pub q: Option<BigUint>,
    pub p: Option<u64>,
    pub b: Option<u64>,
    pub b_sm: Option<u64>,
    pub n: Option<usize>,
    pub t: Option<usize>,
    pub inner_m: Option<usize>,
    pub inner_q: Option<BigUint>,
    pub inner_p: Option<BigUint>,
    pub inner_b: Option<u64>,
    pub seed: Option<u64>,
}

fn parse_value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse { line, msg: format!("{key}: `{raw}` is not a non-negative integer") })
}

impl ParamSet {
    /// Message ring of degree 4096 over `Z_65537`, `B_sm = 2^16`, inner
    /// degree 4096 and inner error bound 19.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            PRESET_PN12QP109 => Ok(ParamSet {
                m: Some(4096),
                q: Some(BigUint::from(65537u32)),
                b_sm: Some(1 << 16),
                inner_m: Some(4096),
                inner_p: Some(BigUint::from(65537u32)),
                inner_b: Some(19),
                ..Default::default()
            }),
            other => Err(Error::param(format!("unknown preset `{other}`"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ParamSet::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, msg: format!("expected `key = value`, got `{content}`") })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "M" => out.m = Some(parse_value(line, key, value)?),
                "Q" => out.q = Some(parse_value(line, key, value)?),
                "P" => out.p = Some(parse_value(line, key, value)?),
                "B" => out.b = Some(parse_value(line, key, value)?),
                "B_sm" => out.b_sm = Some(parse_value(line, key, value)?),
                "N" => out.n = Some(parse_value(line, key, value)?),
                "T" => out.t = Some(parse_value(line, key, value)?),
                "inner_M" => out.inner_m = Some(parse_value(line, key, value)?),
                "inner_Q" => out.inner_q = Some(parse_value(line, key, value)?),
                "inner_P" => out.inner_p = Some(parse_value(line, key, value)?),
                "inner_B" => out.inner_b = Some(parse_value(line, key, value)?),
                "seed" => out.seed = Some(parse_value(line, key, value)?),
                other => return Err(Error::Parse { line, msg: format!("unknown key `{other}`") }),
            }
        }
        Ok(out)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: &ParamSet) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(m, q, p, b, b_sm, n, t, inner_m, inner_q, inner_p, inner_b, seed);
        self
    }

    /// Message ring `Z_Q[x]/(x^M + 1)`.
    pub fn message_ring(&self) -> Result<Ring> {
        Ring::new(need(self.m, "M")?, need(self.q.clone(), "Q")?)
    }

    /// Inner cipher for `N` parties, searching `inner_Q` when unset.
    pub fn cipher(&self) -> Result<CipherParams> {
        let q = need(self.q.clone(), "Q")?;
        let inner_p = self.inner_p.clone().unwrap_or_else(|| q.clone());
        if inner_p != q {
            return Err(Error::param(format!("inner_P = {inner_p} must equal the message modulus Q = {q}")));
        }
        let (m, b, n) = (need(self.inner_m, "inner_M")?, need(self.inner_b, "inner_B")?, need(self.n, "N")?);
        match &self.inner_q {
            Some(inner_q) => CipherParams::new(m, inner_q.clone(), inner_p, b, n),
            None => CipherParams::search(m, inner_p, b, n),
        }
    }

    /// ATASSES configuration; the CRS seed is `seed` (default 0).
    pub fn atasses(&self) -> Result<AtassesConfig> {
        AtassesConfig::new(
            need(self.n, "N")?,
            need(self.t, "T")?,
            self.message_ring()?,
            self.cipher()?,
            need(self.b_sm, "B_sm")?,
            self.seed.unwrap_or(0),
        )
    }
}

fn need<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::param(format!("missing parameter `{key}`")))
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        macro_rules! line {
            ($($key:literal => $f:ident),*) => {
                $( if let Some(v) = &self.$f { writeln!(f, "{} = {}", $key, v)?; } )*
            };
        }
        line!("M" => m, "Q" => q, "P" => p, "B" => b, "B_sm" => b_sm, "N" => n, "T" => t,
              "inner_M" => inner_m, "inner_Q" => inner_q, "inner_P" => inner_p, "inner_B" => inner_b,
              "seed" => seed);
        Ok(())
    }
}
