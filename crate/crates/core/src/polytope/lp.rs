//! Dense two-phase simplex method over the rationals with Bland's rule.

use num_traits::{Signed, Zero};

use super::AffineForm;
use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        let nz: Vec<usize> = (0..=self.cols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        for &j in &nz {
            self.rows[r][j] /= &p;
        }
        let prow = self.rows[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let k = self.rows[i][c].clone();
            for &j in &nz {
                let delta = &k * &prow[j];
                self.rows[i][j] -= delta;
            }
        }
        if !self.obj[c].is_zero() {
            let k = self.obj[c].clone();
            for &j in &nz {
                let delta = &k * &prow[j];
                self.obj[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex iterations on the current objective row (which holds
    /// negated reduced costs). Returns false when unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| allowed[j] && self.obj[j].is_negative());
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Maximises `objective . y` over `{ y in R^n : form(y) >= 0 for every form }`.
///
/// Free variables are split as `y = y+ - y-`; rows with a negative right
/// hand side receive an artificial variable for the first phase.
pub fn maximize(forms: &[AffineForm], n: usize, objective: &[Rational]) -> LpOutcome {
    assert_eq!(objective.len(), n);
    let m = forms.len();
    // Row j: -a.y <= b, i.e. (-a, a) x + s_j = b.
    let needs_art: Vec<bool> = forms.iter().map(|f| f.constant.is_negative()).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let cols = 2 * n + m + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 2 * n + m;
    for (j, f) in forms.iter().enumerate() {
        assert_eq!(f.coeffs.len(), n);
        let mut row = vec![Rational::zero(); cols + 1];
        let neg = needs_art[j];
        let sgn = |r: Rational| if neg { -r } else { r };
        for i in 0..n {
            row[i] = sgn(-f.coeffs[i].clone());
            row[n + i] = sgn(f.coeffs[i].clone());
        }
        row[2 * n + j] = sgn(Rational::from_integer(1.into()));
        row[cols] = sgn(f.constant.clone());
        if neg {
            row[art] = Rational::from_integer(1.into());
            basis.push(art);
            art += 1;
        } else {
            basis.push(2 * n + j);
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        obj: vec![Rational::zero(); cols + 1],
        basis,
        cols,
    };

    if n_art > 0 {
        // Phase one: maximise -(sum of artificials).
        for j in 2 * n + m..cols {
            t.obj[j] = Rational::from_integer(1.into());
        }
        for i in 0..m {
            if t.basis[i] >= 2 * n + m {
                for j in 0..=cols {
                    let v = t.rows[i][j].clone();
                    t.obj[j] -= v;
                }
            }
        }
        let all = vec![true; cols];
        t.optimize(&all);
        if t.obj[cols].is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining artificials (at level zero) out of the basis.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= 2 * n + m {
                match (0..2 * n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(c) => {
                        t.pivot(i, c);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    // Phase two.
    let allowed: Vec<bool> = (0..cols).map(|j| j < 2 * n + m).collect();
    t.obj = vec![Rational::zero(); cols + 1];
    for i in 0..n {
        t.obj[i] = -objective[i].clone();
        t.obj[n + i] = objective[i].clone();
    }
    for i in 0..t.rows.len() {
        let c = t.basis[i];
        if !t.obj[c].is_zero() {
            let k = t.obj[c].clone();
            for j in 0..=cols {
                let delta = &k * &t.rows[i][j];
                t.obj[j] -= delta;
            }
        }
    }
    if !t.optimize(&allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &b) in t.basis.iter().enumerate() {
        x[b] = t.rhs(i).clone();
    }
    let point: Vec<Rational> = (0..n).map(|i| &x[i] - &x[n + i]).collect();
    let value = objective.iter().zip(&point).map(|(c, y)| c * y).sum();
    LpOutcome::Optimal { value, point }
}
