//! Line-oriented text snapshots of a [`LatticeState`].
//!
//! ```text
//! toomqca-snapshot 1
//! n 18
//! time 0
//! params m=9 t_ref=2 ...
//! data bits
//! tau 0 0 ...
//! x ...
//! y ...
//! counter ...
//! values ...
//! ```
//! Frame planes write `values` as `x:z` hex pairs.

use std::fmt::Write as _;

use super::{DataPlane, LatticeState, ScheduleParams};
use crate::error::{Error, Result};

const MAGIC: &str = "toomqca-snapshot";
const VERSION: u32 = 1;

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn params_line(p: &ScheduleParams) -> String {
    format!(
        "m={} t_ref={} t_code={} t_sim={} t_ec={} t_ec_s={} t_ec_d={} w={} r={} c_bound={} d_d={}",
        p.m, p.t_ref, p.t_code, p.t_sim, p.t_ec, p.t_ec_s, p.t_ec_d, p.w, p.r, p.c_bound, p.d_d
    )
}

fn parse_params(line: usize, body: &str) -> Result<ScheduleParams> {
    let mut p = ScheduleParams::default();
    for kv in body.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, got `{kv}`")))?;
        let v: u64 = v.parse().map_err(|_| Error::parse(line, format!("bad number in `{kv}`")))?;
        let v32 = v as u32;
        match k {
            "m" => p.m = v32,
            "t_ref" => p.t_ref = v32,
            "t_code" => p.t_code = v32,
            "t_sim" => p.t_sim = v32,
            "t_ec" => p.t_ec = v32,
            "t_ec_s" => p.t_ec_s = v32,
            "t_ec_d" => p.t_ec_d = v32,
            "w" => p.w = v32,
            "r" => p.r = v32,
            "c_bound" => p.c_bound = v32,
            "d_d" => p.d_d = v,
            _ => return Err(Error::parse(line, format!("unknown parameter `{k}`"))),
        }
    }
    p.rederive();
    Ok(p)
}

fn parse_nums<T: std::str::FromStr>(line: usize, body: &str, len: usize) -> Result<Vec<T>> {
    let v: Vec<T> = body
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::parse(line, format!("bad value `{t}`"))))
        .collect::<Result<_>>()?;
    if v.len() != len {
        return Err(Error::parse(line, format!("expected {len} values, found {}", v.len())));
    }
    Ok(v)
}

impl LatticeState {
    pub fn to_snapshot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {VERSION}");
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "time {}", self.global_time);
        let _ = writeln!(out, "params {}", params_line(&self.params));
        let (kind, values) = match &self.data {
            DataPlane::Bits(b) => ("bits".to_string(), join(b)),
            DataPlane::Frames { x, z, width } => (
                format!("frames {width}"),
                x.iter().zip(z).map(|(a, b)| format!("{a:x}:{b:x}")).collect::<Vec<_>>().join(" "),
            ),
            DataPlane::Opaque { values, alphabet } => (format!("opaque {alphabet}"), join(values)),
        };
        let _ = writeln!(out, "data {kind}");
        let _ = writeln!(out, "tau {}", join(&self.tau));
        let _ = writeln!(out, "x {}", join(&self.x));
        let _ = writeln!(out, "y {}", join(&self.y));
        let _ = writeln!(out, "counter {}", join(&self.counter));
        let _ = writeln!(out, "values {values}");
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        let mut next = |key: &str| -> Result<(usize, String)> {
            let (no, l) = lines.next().ok_or_else(|| Error::parse(0, format!("missing `{key}` line")))?;
            let (k, rest) = l.split_once(' ').unwrap_or((l, ""));
            if k != key {
                return Err(Error::parse(no, format!("expected `{key}`, found `{k}`")));
            }
            Ok((no, rest.to_string()))
        };
        let (no, v) = next(MAGIC)?;
        if v.trim() != VERSION.to_string() {
            return Err(Error::parse(no, format!("unsupported snapshot version `{v}`")));
        }
        let (no, v) = next("n")?;
        let n: usize = v.trim().parse().map_err(|_| Error::parse(no, "bad n"))?;
        let (no, v) = next("time")?;
        let global_time: u64 = v.trim().parse().map_err(|_| Error::parse(no, "bad time"))?;
        let (no, v) = next("params")?;
        let params = parse_params(no, &v)?;
        let (no, kind) = next("data")?;
        let len = n * n;
        let (nt, tau) = next("tau")?;
        let (nx, x) = next("x")?;
        let (ny, y) = next("y")?;
        let (nc, counter) = next("counter")?;
        let (nv, values) = next("values")?;
        let mut words = kind.split_whitespace();
        let data = match (words.next(), words.next()) {
            (Some("bits"), None) => DataPlane::Bits(parse_nums(nv, &values, len)?),
            (Some("opaque"), Some(a)) => DataPlane::Opaque {
                values: parse_nums(nv, &values, len)?,
                alphabet: a.parse().map_err(|_| Error::parse(no, "bad alphabet"))?,
            },
            (Some("frames"), Some(w)) => {
                let mut xs = Vec::with_capacity(len);
                let mut zs = Vec::with_capacity(len);
                for tok in values.split_whitespace() {
                    let (a, b) = tok.split_once(':').ok_or_else(|| Error::parse(nv, "expected x:z"))?;
                    let hex = |s| u64::from_str_radix(s, 16).map_err(|_| Error::parse(nv, "bad hex"));
                    xs.push(hex(a)?);
                    zs.push(hex(b)?);
                }
                if xs.len() != len {
                    return Err(Error::parse(nv, "wrong number of frames"));
                }
                DataPlane::Frames {
                    x: xs,
                    z: zs,
                    width: w.parse().map_err(|_| Error::parse(no, "bad width"))?,
                }
            }
            _ => return Err(Error::parse(no, format!("unknown data kind `{kind}`"))),
        };
        Ok(LatticeState {
            n,
            params,
            tau: parse_nums(nt, &tau, len)?,
            x: parse_nums(nx, &x, len)?,
            y: parse_nums(ny, &y, len)?,
            data,
            counter: parse_nums(nc, &counter, len)?,
            global_time,
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::lattice::{DataRule, Init, LatticeState, ScheduleParams};

    #[test]
    fn round_trip_each_plane_kind() {
        let p = ScheduleParams::new(3, 2, 1, 1);
        for rule in [
            DataRule::ClassicalBit { initial: 1 },
            DataRule::PauliFrame { width: 7 },
            DataRule::Opaque { alphabet: 5 },
        ] {
            let mut lat = LatticeState::new(6, p, Init::Ideal, rule).unwrap();
            lat.global_time = 17;
            lat.counter[4] = 3;
            let back = LatticeState::from_snapshot(&lat.to_snapshot()).unwrap();
            assert_eq!(back, lat);
        }
    }

    #[test]
    fn rejects_wrong_version() {
        let lat = LatticeState::new(3, ScheduleParams::new(3, 2, 1, 1), Init::Ideal, DataRule::default()).unwrap();
        let text = lat.to_snapshot().replacen("toomqca-snapshot 1", "toomqca-snapshot 9", 1);
        assert!(LatticeState::from_snapshot(&text).is_err());
    }
}
