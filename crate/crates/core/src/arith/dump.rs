//! Text dump of a ball: header `family t count`, then one element per line
//! as decimal integers in canonical order.

use std::io::{BufRead, Write};

use super::element::GroupElement;
use super::gaussian::GaussInt;
use super::spec::Family;
use crate::{Error, Result};

pub fn write_ball<W: Write>(mut w: W, family: Family, t: f64, elements: &[GroupElement]) -> Result<()> {
    writeln!(w, "{} {} {}", family, t, elements.len())?;
    for g in elements {
        let line: Vec<String> = g.canonical_integers().iter().map(i64::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_ball<R: BufRead>(r: R) -> Result<(Family, f64, Vec<GroupElement>)> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::domain("empty ball dump"))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [family, t, count] = fields[..] else {
        return Err(Error::domain(format!("bad dump header {header:?}")));
    };
    let family: Family = family.parse()?;
    let t: f64 = t.parse().map_err(|_| Error::domain(format!("bad t in header {header:?}")))?;
    let count: usize =
        count.parse().map_err(|_| Error::domain(format!("bad count in header {header:?}")))?;
    let mut out = Vec::with_capacity(count);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<i64> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::domain(format!("bad integer {s:?}"))))
            .collect::<Result<_>>()?;
        if v.len() < 8 {
            return Err(Error::domain(format!("short dump line {line:?}")));
        }
        let lin = [0, 1, 2, 3].map(|i| GaussInt::new(v[2 * i], v[2 * i + 1]));
        let mut g = GroupElement::gaussian(lin)?;
        let rest = &v[8..];
        match (family, rest) {
            (Family::CyclicSolvable, [x, y, n]) => g = g.with_translation([*x, *y]).with_power(*n),
            (Family::Sl2zAffine, [x, y]) => g = g.with_translation([*x, *y]),
            (_, []) => {}
            _ => return Err(Error::domain(format!("unexpected fields in {line:?}"))),
        }
        out.push(g);
    }
    if out.len() != count {
        return Err(Error::domain(format!("header says {count} elements, found {}", out.len())));
    }
    Ok((family, t, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{enumerate_ball, GroupSpec};
    use crate::gauge::Height;

    #[test]
    fn round_trip() {
        for spec in [GroupSpec::sl2_gauss(), GroupSpec::affine(), GroupSpec::cyclic_solvable([[2, 1], [1, 1]]).unwrap()] {
            let e = enumerate_ball(&spec, Height(1.3)).unwrap();
            let mut buf = Vec::new();
            write_ball(&mut buf, spec.family, 1.3, &e.elements).unwrap();
            let (f, t, back) = read_ball(&buf[..]).unwrap();
            assert_eq!((f, t), (spec.family, 1.3));
            assert_eq!(back, e.elements);
        }
    }
}
