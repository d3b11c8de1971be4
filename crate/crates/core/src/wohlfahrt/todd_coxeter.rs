//! Coset enumeration (HLT strategy with immediate coincidence processing).

use super::CosetGraph;
use crate::error::{Error, Result};
use crate::presentation::{Family, Gen, GenLetter, VeechWord};

// columns: 0 = T, 1 = T^-1, 2 = rotation, 3 = rotation^-1
const COLS: usize = 4;

fn column(l: GenLetter) -> usize {
    let base = if l.gen == Gen::T { 0 } else { 2 };
    base + usize::from(l.inverse)
}

fn inv_col(x: usize) -> usize {
    x ^ 1
}

struct Table {
    rows: Vec<[Option<usize>; COLS]>,
    parent: Vec<usize>,
    live: usize,
    cap: usize,
}

impl Table {
    fn rep(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[c] != root {
            let next = self.parent[c];
            self.parent[c] = root;
            c = next;
        }
        root
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.live >= self.cap {
            return Err(Error::CosetCapExceeded(self.cap));
        }
        let d = self.rows.len();
        self.rows.push([None; COLS]);
        self.parent.push(d);
        self.live += 1;
        self.rows[c][x] = Some(d);
        self.rows[d][inv_col(x)] = Some(c);
        Ok(())
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(k), self.rep(l));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi] = lo;
            self.live -= 1;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let g = queue[i];
            i += 1;
            for x in 0..COLS {
                let Some(d) = self.rows[g][x] else { continue };
                self.rows[d][inv_col(x)] = None;
                let mu = self.rep(g);
                let nu = self.rep(d);
                if let Some(e) = self.rows[mu][x] {
                    let e = self.rep(e);
                    self.merge(nu, e, &mut queue);
                } else if let Some(e) = self.rows[nu][inv_col(x)] {
                    let e = self.rep(e);
                    self.merge(mu, e, &mut queue);
                } else {
                    self.rows[mu][x] = Some(nu);
                    self.rows[nu][inv_col(x)] = Some(mu);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len() - 1;
        loop {
            while i <= j {
                match self.rows[f][w[i]] {
                    Some(next) => {
                        f = next;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i {
                match self.rows[b][inv_col(w[j])] {
                    Some(next) => {
                        b = next;
                        if j == 0 {
                            // only reachable when i == 0, so the word closed up
                            self.coincidence(f, b);
                            return Ok(());
                        }
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                self.rows[f][w[i]] = Some(b);
                self.rows[b][inv_col(w[i])] = Some(f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }
}

/// Enumerates the cosets of the subgroup generated by `words` and returns the
/// left-coset graph with the base coset first and the rest in order of
/// definition. Fails with [`Error::CosetCapExceeded`] once more than
/// `max_cosets` cosets are alive at the same time.
pub fn todd_coxeter(
    family: Family,
    n: usize,
    words: &[VeechWord],
    max_cosets: usize,
) -> Result<CosetGraph> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::UnsupportedParameter(format!("n = {n} must be odd and at least 5")));
    }
    for w in words {
        w.check_family(family)?;
    }
    let encode = |w: &VeechWord| w.letters().iter().map(|&l| column(l)).collect::<Vec<_>>();
    let relators: Vec<Vec<usize>> = family.relators(n).iter().map(encode).collect();
    let subgroup: Vec<Vec<usize>> = words.iter().map(encode).collect();

    let mut t = Table {
        rows: vec![[None; COLS]],
        parent: vec![0],
        live: 1,
        cap: max_cosets.max(1),
    };
    for w in &subgroup {
        t.scan_and_fill(0, w)?;
    }
    let mut c = 0;
    while c < t.rows.len() {
        for r in &relators {
            if !t.is_live(c) {
                break;
            }
            t.scan_and_fill(c, r)?;
        }
        if t.is_live(c) {
            for x in 0..COLS {
                if t.rows[c][x].is_none() {
                    t.define(c, x)?;
                }
            }
        }
        c += 1;
    }

    let live: Vec<usize> = (0..t.rows.len()).filter(|&c| t.is_live(c)).collect();
    let mut label = vec![usize::MAX; t.rows.len()];
    for (i, &c) in live.iter().enumerate() {
        label[c] = i;
    }
    // the right action of g^-1 on Hx is the left action of g on x^-1 H
    let mut perm_t = Vec::with_capacity(live.len());
    let mut perm_rot = Vec::with_capacity(live.len());
    for &c in &live {
        let img = |x: usize| t.rows[c][x].map(|d| label[d]);
        match (img(1), img(3)) {
            (Some(a), Some(b)) if a != usize::MAX && b != usize::MAX => {
                perm_t.push(a);
                perm_rot.push(b);
            }
            _ => return Err(Error::InvalidGraph("incomplete coset table".into())),
        }
    }
    CosetGraph::new(family, n, perm_t, perm_rot, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_word_list;
    use crate::wohlfahrt::{canonical_form, validate_coset_graph, wohlfahrt_level};

    fn run(words: &str, family: Family) -> Result<CosetGraph> {
        todd_coxeter(family, 5, &parse_word_list(words).unwrap(), 1000)
    }

    #[test]
    fn whole_group_has_one_coset() {
        let g = run("T,R", Family::DoubleNGon).unwrap();
        assert_eq!(g.degree(), 1);
        let g = run("T,S", Family::Regular2NGon).unwrap();
        assert_eq!(g.degree(), 1);
    }

    #[test]
    fn small_subgroups() {
        assert_eq!(run("T,R^2", Family::DoubleNGon).unwrap().degree(), 1);
        // the rotation subgroup is finite, so its index is not
        assert_eq!(run("R", Family::DoubleNGon), Err(Error::CosetCapExceeded(1000)));
    }

    #[test]
    fn ten_coset_example() {
        let words = parse_word_list(crate::wohlfahrt::TEN_COSET_GENERATORS).unwrap();
        let g = todd_coxeter(Family::DoubleNGon, 5, &words, 1000).unwrap();
        assert_eq!(g.degree(), 10);
        let known = CosetGraph::parse(crate::wohlfahrt::TEN_COSET_EXAMPLE).unwrap();
        assert_eq!(canonical_form(&g).unwrap(), canonical_form(&known).unwrap());
    }

    #[test]
    fn trivial_subgroup_overflows() {
        assert_eq!(run("", Family::DoubleNGon), Err(Error::CosetCapExceeded(1000)));
    }

    #[test]
    fn generated_words_fix_the_base() {
        let words = parse_word_list(crate::wohlfahrt::TEN_COSET_GENERATORS).unwrap();
        let g = todd_coxeter(Family::DoubleNGon, 5, &words, 1000).unwrap();
        assert!(validate_coset_graph(&g).passed());
        for w in &words {
            assert_eq!(g.word_perm(w).unwrap()[g.base], g.base);
        }
        assert!(wohlfahrt_level(&g).is_ok());
        assert_eq!(canonical_form(&g).unwrap(), canonical_form(&canonical_form(&g).unwrap()).unwrap());
    }

    #[test]
    fn rejects_foreign_symbols() {
        assert!(matches!(run("S", Family::DoubleNGon), Err(Error::UnknownSymbol(_))));
    }
}
