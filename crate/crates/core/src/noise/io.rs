//! One fault per line: `time op_id site_list effect_tag payload`.
//!
//! `site_list` is `kind:i,j;i,j;...` with kind `s` (structure) or `d` (data)
//! and the written site first. Tags: `scramble` (payload `k:tau,x,y;...`),
//! `flip` (payload `k`), `pauli` (payload `k:x:z` in hex) and
//! `custom:<tag>` (payload verbatim).

use std::fmt::Write as _;

use super::{FaultEffect, FaultEvent, FaultPath, LocKind, Location};
use crate::error::{Error, Result};
use crate::lattice::{Site, StructureState};

const HEADER: &str = "# toomqca-faults 1";

fn sites_str(s: &[Site]) -> String {
    s.iter().map(|s| format!("{},{}", s.i, s.j)).collect::<Vec<_>>().join(";")
}

impl FaultPath {
    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER} seed={} p={}\n", self.seed, self.p);
        for e in &self.events {
            let l = &e.location;
            let (tag, payload) = match &e.effect {
                FaultEffect::StructureScramble(v) => (
                    "scramble".to_string(),
                    v.iter()
                        .map(|(k, s)| format!("{k}:{},{},{}", s.tau, s.x, s.y))
                        .collect::<Vec<_>>()
                        .join(";"),
                ),
                FaultEffect::DataBitFlip(k) => ("flip".into(), k.to_string()),
                FaultEffect::DataPauli { index, x, z } => ("pauli".into(), format!("{index}:{x:x}:{z:x}")),
                FaultEffect::Custom { tag, payload } => (format!("custom:{tag}"), payload.clone()),
            };
            let kind = match l.kind {
                LocKind::Structure => "s",
                LocKind::Data => "d",
            };
            let _ = writeln!(out, "{} {} {}:{} {} {}", l.time, l.op_id, kind, sites_str(&l.support), tag, payload);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<FaultPath> {
        let mut path = FaultPath::default();
        for (no, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())) {
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix(HEADER) {
                for kv in h.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("seed", v)) => path.seed = v.parse().map_err(|_| Error::parse(no, "bad seed"))?,
                        Some(("p", v)) => path.p = v.parse().map_err(|_| Error::parse(no, "bad p"))?,
                        _ => return Err(Error::parse(no, format!("unknown header field `{kv}`"))),
                    }
                }
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            path.events.push(parse_event(no, line)?);
        }
        Ok(path)
    }
}

fn num<T: std::str::FromStr>(no: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::parse(no, format!("bad number `{s}`")))
}

fn parse_event(no: usize, line: &str) -> Result<FaultEvent> {
    let mut f = line.splitn(5, ' ');
    let mut field = |name: &str| f.next().ok_or_else(|| Error::parse(no, format!("missing {name}")));
    let time = num(no, field("time")?)?;
    let op_id = num(no, field("op_id")?)?;
    let sites = field("site_list")?;
    let tag = field("effect_tag")?;
    let payload = f.next().unwrap_or("");
    let (kind, sites) = sites.split_once(':').ok_or_else(|| Error::parse(no, "site list needs a kind prefix"))?;
    let kind = match kind {
        "s" => LocKind::Structure,
        "d" => LocKind::Data,
        k => return Err(Error::parse(no, format!("unknown location kind `{k}`"))),
    };
    let support = sites
        .split(';')
        .map(|p| {
            let (i, j) = p.split_once(',').ok_or_else(|| Error::parse(no, format!("bad site `{p}`")))?;
            Ok(Site::new(num(no, i)?, num(no, j)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let effect = match tag {
        "scramble" => FaultEffect::StructureScramble(
            payload
                .split(';')
                .map(|item| {
                    let (k, v) = item.split_once(':').ok_or_else(|| Error::parse(no, "expected k:tau,x,y"))?;
                    let v: Vec<u32> = v.split(',').map(|t| num(no, t)).collect::<Result<_>>()?;
                    if v.len() != 3 {
                        return Err(Error::parse(no, "expected three register values"));
                    }
                    Ok((num(no, k)?, StructureState::new(v[0], v[1], v[2])))
                })
                .collect::<Result<_>>()?,
        ),
        "flip" => FaultEffect::DataBitFlip(num(no, payload)?),
        "pauli" => {
            let v: Vec<&str> = payload.split(':').collect();
            if v.len() != 3 {
                return Err(Error::parse(no, "expected k:x:z"));
            }
            let hex = |s: &str| u64::from_str_radix(s, 16).map_err(|_| Error::parse(no, "bad hex mask"));
            FaultEffect::DataPauli { index: num(no, v[0])?, x: hex(v[1])?, z: hex(v[2])? }
        }
        t => match t.strip_prefix("custom:") {
            Some(tag) => FaultEffect::Custom { tag: tag.into(), payload: payload.into() },
            None => return Err(Error::parse(no, format!("unknown effect tag `{t}`"))),
        },
    };
    Ok(FaultEvent { location: Location { time, op_id, kind, support }, effect })
}
