//! Exhaustive small-group oracles.
//!
//! Everything here works on the *full* group `G = Z_b^{s×n}` with a dense
//! table, so identities can be checked exactly: Fourier coefficients by
//! direct DFT, integration error variance both by enumerating every digital
//! shift and by summing `|F̂|²` over the dual, Poisson summation, and the
//! Walsh-coefficient decay bound that underpins the figure of merit.  All of
//! it is deliberately brute force — these are the referees for the fast
//! production routines, not production code themselves — and guarded so the
//! tables stay at desk scale: `b^{s·n} ≤ 2^24` entries for a table, `2^13`
//! for the quadratic-cost DFT.
//!
//! Complex arithmetic is confined to this module; the production estimators
//! never touch it.

use crate::accum::Neumaier;
use crate::error::{Error, Result};
use crate::integrands::Integrand;
use crate::net::{dual, scan_span_digits, DigitMatrix, DigitalNet, DigitalShift, NetParams};
use crate::wafom::wafom_inversion;
use crate::weight::WeightSpec;
use num_complex::Complex64;

const GROUP_GUARD_LOG2: f64 = 24.0;
const DFT_GUARD: usize = 1 << 13;

/// Index arithmetic for the full group: element = flat digit row (row-major,
/// `s·n` digits), index = its little-endian base-`b` value.
#[derive(Clone, Debug)]
pub(crate) struct Indexer {
    b: u32,
    width: usize,
    pow: Vec<usize>,
}

impl Indexer {
    pub(crate) fn new(params: NetParams) -> Result<Self> {
        let width = params.s * params.n;
        let log2_size = width as f64 * f64::from(params.b).log2();
        if log2_size > GROUP_GUARD_LOG2 {
            return Err(Error::GroupTooLarge {
                exponent: width,
                log2_size,
                mib: (log2_size + 3.0 - 20.0).exp2().ceil() as u64,
            });
        }
        let mut pow = Vec::with_capacity(width + 1);
        let mut p = 1usize;
        for _ in 0..=width {
            pow.push(p);
            p = p.saturating_mul(params.b as usize);
        }
        Ok(Indexer { b: params.b, width, pow })
    }

    pub(crate) fn size(&self) -> usize {
        self.pow[self.width]
    }

    pub(crate) fn index_of(&self, flat: &[u8]) -> usize {
        debug_assert_eq!(flat.len(), self.width);
        flat.iter().enumerate().map(|(t, &d)| d as usize * self.pow[t]).sum()
    }

    pub(crate) fn decode(&self, idx: usize, out: &mut [u8]) {
        let mut r = idx;
        for d in out.iter_mut() {
            *d = (r % self.b as usize) as u8;
            r /= self.b as usize;
        }
    }

    /// Index of the digit-wise sum of two elements.
    fn add(&self, a: usize, b: usize) -> usize {
        if self.b == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out) = (a, b, 0usize);
        let base = self.b as usize;
        for t in 0..self.width {
            out += (a % base + b % base) % base * self.pow[t];
            a /= base;
            b /= base;
        }
        out
    }

    /// Index of the digit-wise negation.
    fn neg(&self, a: usize) -> usize {
        if self.b == 2 {
            return a;
        }
        let (mut a, mut out) = (a, 0usize);
        let base = self.b as usize;
        for t in 0..self.width {
            let d = a % base;
            out += if d == 0 { 0 } else { base - d } * self.pow[t];
            a /= base;
        }
        out
    }
}

/// Character value `ω_b^{Σ_{i,j} h_{i,j} g_{i,j}}` of the dual pairing.
/// Exact `±1` in base 2.
pub fn pairing(b: u32, h: &DigitMatrix, g: &DigitMatrix) -> Complex64 {
    let dot: u64 = h
        .digits()
        .iter()
        .zip(g.digits())
        .map(|(&x, &y)| u64::from(x) * u64::from(y))
        .sum();
    root_of_unity(b, (dot % u64::from(b)) as u32)
}

fn root_of_unity(b: u32, t: u32) -> Complex64 {
    if b == 2 {
        return Complex64::new(if t % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    let angle = std::f64::consts::TAU * f64::from(t % b) / f64::from(b);
    Complex64::new(angle.cos(), angle.sin())
}

/// A real-valued function on the full group, stored densely.
#[derive(Clone, Debug)]
pub struct GroupFunction {
    params: NetParams,
    idx: Indexer,
    table: Vec<f64>,
}

impl GroupFunction {
    pub fn from_table(params: NetParams, table: Vec<f64>) -> Result<Self> {
        let idx = Indexer::new(params)?;
        if table.len() != idx.size() {
            return Err(Error::ShapeMismatch(format!(
                "group of b^{} = {} elements, table has {}",
                idx.width,
                idx.size(),
                table.len()
            )));
        }
        Ok(GroupFunction { params, idx, table })
    }

    /// Tabulate `f` over every group element, in index order.
    pub fn from_element_fn(
        params: NetParams,
        mut f: impl FnMut(&DigitMatrix) -> f64,
    ) -> Result<Self> {
        let idx = Indexer::new(params)?;
        let mut flat = vec![0u8; idx.width];
        let mut table = Vec::with_capacity(idx.size());
        for k in 0..idx.size() {
            idx.decode(k, &mut flat);
            table.push(f(&matrix_from_flat(params, &flat)));
        }
        Ok(GroupFunction { params, idx, table })
    }

    /// Discretize a point function into per-cell averages: element `X` gets
    /// the mean of `f` over the cell `Π_i [ψ_i(X), ψ_i(X) + b^{-n})`,
    /// computed by tensor Gauss–Legendre quadrature with `quad_cells` panels
    /// per axis.  Panels additionally split at the listed per-axis
    /// breakpoints so piecewise-smooth functions are integrated piece by
    /// piece.  Exact for per-axis polynomials (degree ≤ 15) already at
    /// `quad_cells = 1`.
    pub fn discretize_fn(
        params: NetParams,
        breaks: &[f64],
        quad_cells: usize,
        mut f: impl FnMut(&[f64]) -> Result<f64>,
    ) -> Result<Self> {
        if quad_cells == 0 {
            return Err(Error::InvalidParams("quad_cells must be >= 1".into()));
        }
        let idx = Indexer::new(params)?;
        let cell_width = f64::from(params.b).powi(-(params.n as i32));
        let mut flat = vec![0u8; idx.width];
        let mut table = Vec::with_capacity(idx.size());
        let mut corner = vec![0.0f64; params.s];
        let mut nodes: Vec<Vec<(f64, f64)>> = vec![Vec::new(); params.s];
        for k in 0..idx.size() {
            idx.decode(k, &mut flat);
            for (i, c) in corner.iter_mut().enumerate() {
                let bf = f64::from(params.b);
                *c = flat[i * params.n..(i + 1) * params.n]
                    .iter()
                    .rev()
                    .fold(0.0, |a, &d| (a + f64::from(d)) / bf);
            }
            for (i, list) in nodes.iter_mut().enumerate() {
                axis_nodes(corner[i], cell_width, breaks, quad_cells, list);
            }
            let mut acc = Neumaier::new();
            let mut x = vec![0.0f64; params.s];
            tensor_sum(&nodes, &mut x, 0, 1.0, &mut f, &mut acc)?;
            table.push(acc.value() / cell_width.powi(params.s as i32));
        }
        Ok(GroupFunction { params, idx, table })
    }

    /// [`discretize_fn`] for one of the named integrands.
    pub fn discretize(f: &Integrand, params: NetParams, quad_cells: usize) -> Result<Self> {
        if f.dimension() != params.s {
            return Err(Error::ShapeMismatch(format!(
                "integrand {} has dimension {}, net has s = {}",
                f.id(),
                f.dimension(),
                params.s
            )));
        }
        Self::discretize_fn(params, f.axis_breakpoints(), quad_cells, |x| f.eval(x))
    }

    /// Discretize with doubling quadrature resolution until two successive
    /// tables agree to 1e−12 everywhere (capped at 64 panels per axis; the
    /// last table wins if the cap is hit).
    pub fn discretize_converged(f: &Integrand, params: NetParams) -> Result<Self> {
        let mut prev = Self::discretize(f, params, 1)?;
        let mut q = 2;
        while q <= 64 {
            let cur = Self::discretize(f, params, q)?;
            let dev = prev
                .table
                .iter()
                .zip(&cur.table)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if dev < 1e-12 {
                return Ok(cur);
            }
            prev = cur;
            q *= 2;
        }
        Ok(prev)
    }

    pub fn params(&self) -> NetParams {
        self.params
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn value(&self, element: &DigitMatrix) -> f64 {
        self.table[self.idx.index_of(element.digits())]
    }

    /// Mean over the whole group — the exact integral of the discretization.
    pub fn mean(&self) -> f64 {
        let mut acc = Neumaier::new();
        for &v in &self.table {
            acc.add(v);
        }
        acc.value() / self.table.len() as f64
    }

    fn check_net(&self, net: &DigitalNet) -> Result<Vec<usize>> {
        let p = net.params();
        if p.b != self.params.b || p.s != self.params.s || p.n != self.params.n {
            return Err(Error::ShapeMismatch(format!(
                "group is over b={} {}x{}, net is b={} {}x{}",
                self.params.b, self.params.s, self.params.n, p.b, p.s, p.n
            )));
        }
        let mut points = Vec::new();
        scan_span_digits(net, |flat| points.push(self.idx.index_of(flat)));
        Ok(points)
    }

    /// QMC estimate `I_P(F)`: mean of `F` over the net's points (multiset
    /// semantics on a deficient basis).
    pub fn net_mean(&self, net: &DigitalNet) -> Result<f64> {
        let points = self.check_net(net)?;
        Ok(self.mean_over(&points, 0))
    }

    fn mean_over(&self, points: &[usize], sigma: usize) -> f64 {
        let mut acc = Neumaier::new();
        for &p in points {
            acc.add(self.table[self.idx.add(p, sigma)]);
        }
        acc.value() / points.len() as f64
    }

    /// `I_{P+σ}(F)` for every shift `σ` in the group, in index order.
    pub fn all_shift_estimates(&self, net: &DigitalNet) -> Result<Vec<f64>> {
        let points = self.check_net(net)?;
        Ok((0..self.idx.size()).map(|sigma| self.mean_over(&points, sigma)).collect())
    }

    /// Direct DFT: `F̂(h) = |G|^{-1} Σ_g F(g)·ω^{−h·g}`, every coefficient.
    pub fn dft(&self) -> Result<FourierTable> {
        let size = self.idx.size();
        if size > DFT_GUARD {
            return Err(Error::InvalidParams(format!(
                "direct DFT is quadratic; a group of {size} elements is past the {DFT_GUARD} guard"
            )));
        }
        let scale = 1.0 / size as f64;
        let mut out = Vec::with_capacity(size);
        if self.params.b == 2 {
            for h in 0..size {
                let mut acc = Neumaier::new();
                for (g, &v) in self.table.iter().enumerate() {
                    if (h & g).count_ones() % 2 == 0 {
                        acc.add(v);
                    } else {
                        acc.add(-v);
                    }
                }
                out.push(Complex64::new(acc.value() * scale, 0.0));
            }
        } else {
            let base = self.params.b as usize;
            let mut digits = vec![0u8; size * self.idx.width];
            let mut flat = vec![0u8; self.idx.width];
            for g in 0..size {
                self.idx.decode(g, &mut flat);
                digits[g * self.idx.width..(g + 1) * self.idx.width].copy_from_slice(&flat);
            }
            let roots: Vec<Complex64> = (0..self.params.b).map(|t| root_of_unity(self.params.b, t)).collect();
            for h in 0..size {
                let hd = &digits[h * self.idx.width..(h + 1) * self.idx.width];
                let mut re = Neumaier::new();
                let mut im = Neumaier::new();
                for (g, &v) in self.table.iter().enumerate() {
                    let gd = &digits[g * self.idx.width..(g + 1) * self.idx.width];
                    let dot: usize =
                        hd.iter().zip(gd).map(|(&a, &b)| a as usize * b as usize).sum();
                    // conj(ω^dot) = ω^{-dot}
                    let w = roots[(base - dot % base) % base];
                    re.add(v * w.re);
                    im.add(v * w.im);
                }
                out.push(Complex64::new(re.value() * scale, im.value() * scale));
            }
        }
        Ok(FourierTable { params: self.params, idx: self.idx.clone(), table: out })
    }

    /// The DFT summed in descending element order instead of ascending: a
    /// reordering of the same terms, for summation-order invariance checks.
    pub fn dft_descending(&self) -> Result<FourierTable> {
        let size = self.idx.size();
        if size > DFT_GUARD {
            return Err(Error::InvalidParams(format!(
                "direct DFT is quadratic; a group of {size} elements is past the {DFT_GUARD} guard"
            )));
        }
        let scale = 1.0 / size as f64;
        let b64 = u64::from(self.params.b);
        let mut flat_h = vec![0u8; self.idx.width];
        let mut flat_g = vec![0u8; self.idx.width];
        let mut out = Vec::with_capacity(size);
        for h in 0..size {
            self.idx.decode(h, &mut flat_h);
            let mut re = Neumaier::new();
            let mut im = Neumaier::new();
            for g in (0..size).rev() {
                self.idx.decode(g, &mut flat_g);
                let dot: u64 = flat_h
                    .iter()
                    .zip(&flat_g)
                    .map(|(&a, &b)| u64::from(a) * u64::from(b))
                    .sum();
                let w = root_of_unity(self.params.b, ((b64 - dot % b64) % b64) as u32);
                re.add(self.table[g] * w.re);
                im.add(self.table[g] * w.im);
            }
            out.push(Complex64::new(re.value() * scale, im.value() * scale));
        }
        Ok(FourierTable { params: self.params, idx: self.idx.clone(), table: out })
    }
}

fn matrix_from_flat(params: NetParams, flat: &[u8]) -> DigitMatrix {
    let rows: Vec<Vec<u8>> =
        (0..params.s).map(|i| flat[i * params.n..(i + 1) * params.n].to_vec()).collect();
    DigitMatrix::from_rows(&rows).expect("flat digits are rectangular")
}

/// Gauss–Legendre 8-point nodes/weights on [-1, 1] (positive half).
const GL8_X: [f64; 4] =
    [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
const GL8_W: [f64; 4] =
    [0.362683783378362, 0.31370664587788727, 0.22238103445337448, 0.10122853629037626];

/// Quadrature nodes covering `[lo, lo+width)`: split at interior breakpoints,
/// then `quad_cells` uniform panels per piece, GL-8 per panel.  Weights sum
/// to `width`.
fn axis_nodes(lo: f64, width: f64, breaks: &[f64], quad_cells: usize, out: &mut Vec<(f64, f64)>) {
    out.clear();
    let hi = lo + width;
    let mut edges = vec![lo];
    for &bp in breaks {
        if bp > lo && bp < hi {
            edges.push(bp);
        }
    }
    edges.push(hi);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in edges.windows(2) {
        let step = (w[1] - w[0]) / quad_cells as f64;
        for p in 0..quad_cells {
            let a = w[0] + p as f64 * step;
            let c = a + 0.5 * step;
            let h = 0.5 * step;
            for t in 0..4 {
                out.push((c - h * GL8_X[t], h * GL8_W[t]));
                out.push((c + h * GL8_X[t], h * GL8_W[t]));
            }
        }
    }
}

fn tensor_sum(
    nodes: &[Vec<(f64, f64)>],
    x: &mut Vec<f64>,
    axis: usize,
    weight: f64,
    f: &mut impl FnMut(&[f64]) -> Result<f64>,
    acc: &mut Neumaier,
) -> Result<()> {
    if axis == nodes.len() {
        acc.add(weight * f(x)?);
        return Ok(());
    }
    for &(xi, wi) in &nodes[axis] {
        x[axis] = xi;
        tensor_sum(nodes, x, axis + 1, weight * wi, f, acc)?;
    }
    Ok(())
}

/// Dense table of Fourier coefficients, indexed like the group.
#[derive(Clone, Debug)]
pub struct FourierTable {
    params: NetParams,
    idx: Indexer,
    table: Vec<Complex64>,
}

impl FourierTable {
    pub fn params(&self) -> NetParams {
        self.params
    }

    pub fn table(&self) -> &[Complex64] {
        &self.table
    }

    pub fn coef(&self, h: &DigitMatrix) -> Complex64 {
        self.table[self.idx.index_of(h.digits())]
    }

    /// Max over `h` of `|F̂(−h) − conj(F̂(h))|`: zero for a real `F`.
    pub fn conjugate_symmetry_dev(&self) -> f64 {
        (0..self.table.len())
            .map(|h| (self.table[self.idx.neg(h)] - self.table[h].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Both sides of the exact error-variance identity: the variance of
/// `I_{P+σ}(F)` over all digital shifts (population divisor `|G|`), and the
/// dual-side sum `Σ_{h ∈ P^⊥∖0} |F̂(h)|²`.
pub fn variance_exact(f: &GroupFunction, net: &DigitalNet) -> Result<(f64, f64)> {
    let estimates = f.all_shift_estimates(net)?;
    let mean = f.mean();
    let mut acc = Neumaier::new();
    for &e in &estimates {
        let d = e - mean;
        acc.add(d * d);
    }
    let by_shifts = acc.value() / estimates.len() as f64;

    let ft = f.dft()?;
    let dual_net = dual(net)?.as_net();
    let mut dual_acc = Neumaier::new();
    let mut first = true;
    scan_span_digits(&dual_net, |flat| {
        if first {
            first = false; // skip the zero element, always visited first
            return;
        }
        dual_acc.add(ft.table[ft.idx.index_of(flat)].norm_sqr());
    });
    Ok((by_shifts, dual_acc.value()))
}

/// Both sides of Poisson summation `|P|^{-1} Σ_{g∈P} F(g) = Σ_{h∈P^⊥} F̂(h)`,
/// plus the magnitude of the dual side's imaginary part (must vanish).
#[derive(Clone, Copy, Debug)]
pub struct PoissonCheck {
    pub net_side: f64,
    pub dual_side: f64,
    pub dual_imag_abs: f64,
}

pub fn poisson_check(f: &GroupFunction, net: &DigitalNet) -> Result<PoissonCheck> {
    let net_side = f.net_mean(net)?;
    let ft = f.dft()?;
    let dual_net = dual(net)?.as_net();
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    scan_span_digits(&dual_net, |flat| {
        let c = ft.table[ft.idx.index_of(flat)];
        re.add(c.re);
        im.add(c.im);
    });
    Ok(PoissonCheck { net_side, dual_side: re.value(), dual_imag_abs: im.value().abs() })
}

/// Max over `h` of `|F̂_σ(h) − (h∙σ)·F̂(h)|` where `F_σ(x) = F(x+σ)`:
/// a digital shift multiplies each coefficient by the pairing character.
pub fn shifted_fourier_check(f: &GroupFunction, sigma: &DigitalShift) -> Result<f64> {
    let p = f.params();
    if sigma.sigma.s() != p.s || sigma.sigma.n() != p.n {
        return Err(Error::ShapeMismatch(format!(
            "shift is {}x{}, group is {}x{}",
            sigma.sigma.s(),
            sigma.sigma.n(),
            p.s,
            p.n
        )));
    }
    let s_idx = f.idx.index_of(sigma.sigma.digits());
    let shifted_table: Vec<f64> =
        (0..f.idx.size()).map(|g| f.table[f.idx.add(g, s_idx)]).collect();
    let shifted = GroupFunction::from_table(p, shifted_table)?;
    let ft = f.dft()?;
    let ft_sigma = shifted.dft()?;
    let mut flat_h = vec![0u8; f.idx.width];
    let mut worst = 0.0f64;
    for h in 0..f.idx.size() {
        f.idx.decode(h, &mut flat_h);
        let chi = pairing(p.b, &matrix_from_flat(p, &flat_h), &sigma.sigma);
        worst = worst.max((ft_sigma.table[h] - chi * ft.table[h]).norm());
    }
    Ok(worst)
}

/// Worst ratio `|f̂_n(A)| / (‖f^{(N(A))}‖_∞ · 2^{−(μ(A)+h(A))})` over nonzero
/// `A`, base 2 only; the decay bound holds iff this stays ≤ 1.  `N(A)` counts
/// the nonzero digits per row.  Coefficients that the bound forces to vanish
/// (zero sup-norm) must sit at discretization noise and are checked, not
/// ratioed.
pub fn walsh_coefficient_bound_check(f: &Integrand, params: NetParams) -> Result<f64> {
    if params.b != 2 {
        return Err(Error::InvalidParams(
            "the Walsh coefficient decay bound is stated for base 2".into(),
        ));
    }
    let table = GroupFunction::discretize_converged(f, params)?;
    let ft = table.dft()?;
    let mut flat = vec![0u8; params.s * params.n];
    let mut n_idx = vec![0usize; params.s];
    let mut worst = 0.0f64;
    for h in 1..ft.table.len() {
        ft.idx.decode(h, &mut flat);
        let mut weight = 0.0f64;
        for (i, cnt) in n_idx.iter_mut().enumerate() {
            *cnt = 0;
            for j in 0..params.n {
                if flat[i * params.n + j] != 0 {
                    *cnt += 1;
                    weight += (j + 2) as f64;
                }
            }
        }
        let sup = f.derivative_bound(&n_idx)?;
        let coef = ft.table[h].norm();
        let rhs = sup * (-weight).exp2();
        if rhs == 0.0 {
            if coef > 1e-12 {
                return Err(Error::InvalidParams(format!(
                    "coefficient forced to vanish has magnitude {coef:e}"
                )));
            }
            continue;
        }
        worst = worst.max(coef / rhs);
    }
    Ok(worst)
}

/// Both sides of the RMS-error bound: the true root-variance over all shifts
/// against `max_N ‖f^{(N)}‖_∞ · W(P; μ+h)`, the max running over derivative
/// orders `0 ≤ N_i ≤ n`, `N ≠ 0`.  Base 2 only.
pub fn kh_rmse_check(f: &Integrand, net: &DigitalNet) -> Result<(f64, f64)> {
    let p = net.params();
    if p.b != 2 {
        return Err(Error::InvalidParams("the RMS-error bound is stated for base 2".into()));
    }
    let table = GroupFunction::discretize_converged(f, p)?;
    let (var, _) = variance_exact(&table, net)?;
    let lhs = var.max(0.0).sqrt();

    let mut n_idx = vec![0usize; p.s];
    let mut sup_max = 0.0f64;
    loop {
        // odometer over derivative multi-indices 0..=n per axis
        let mut t = 0;
        while t < p.s && n_idx[t] == p.n {
            n_idx[t] = 0;
            t += 1;
        }
        if t == p.s {
            break;
        }
        n_idx[t] += 1;
        sup_max = sup_max.max(f.derivative_bound(&n_idx)?);
    }
    let merit = wafom_inversion(net, &WeightSpec::dick_plus_hamming(p.s, p.n))?;
    Ok((lhs, sup_max * merit.w))
}

/// Max deviation from character orthogonality: `Σ_g ω^{h·g}` must be `|G|`
/// at `h = 0` and vanish elsewhere.
pub fn character_orthogonality_dev(params: NetParams) -> Result<f64> {
    let idx = Indexer::new(params)?;
    let size = idx.size();
    if size > DFT_GUARD {
        return Err(Error::InvalidParams(format!(
            "orthogonality sweep is quadratic; group of {size} elements is past the {DFT_GUARD} guard"
        )));
    }
    let mut flat_h = vec![0u8; idx.width];
    let mut flat_g = vec![0u8; idx.width];
    let mut worst = 0.0f64;
    for h in 0..size {
        idx.decode(h, &mut flat_h);
        let mut re = Neumaier::new();
        let mut im = Neumaier::new();
        for g in 0..size {
            idx.decode(g, &mut flat_g);
            let dot: u64 =
                flat_h.iter().zip(&flat_g).map(|(&a, &b)| u64::from(a) * u64::from(b)).sum();
            let w = root_of_unity(params.b, (dot % u64::from(params.b)) as u32);
            re.add(w.re);
            im.add(w.im);
        }
        let expect = if h == 0 { size as f64 } else { 0.0 };
        worst = worst.max((Complex64::new(re.value() - expect, im.value())).norm());
    }
    Ok(worst)
}

/// Max over `h` of the difference between ascending- and descending-order
/// DFT sums: summation order must not matter beyond roundoff.
pub fn dft_order_invariance_dev(f: &GroupFunction) -> Result<f64> {
    let up = f.dft()?;
    let down = f.dft_descending()?;
    Ok(up
        .table
        .iter()
        .zip(&down.table)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{random_net_with, NetParams};
    use crate::rng::{stream_rng, DOMAIN_NET, DOMAIN_PROBE, DOMAIN_SHIFT};
    use rand::Rng;

    fn params(b: u32, s: usize, n: usize, m: usize) -> NetParams {
        NetParams::new(b, s, n, m).unwrap()
    }

    fn random_table(p: NetParams, seed: u64) -> GroupFunction {
        let mut rng = stream_rng(seed, DOMAIN_PROBE, 70, 0);
        let size = Indexer::new(p).unwrap().size();
        GroupFunction::from_table(p, (0..size).map(|_| rng.random::<f64>()).collect()).unwrap()
    }

    fn shift_from_flat(p: NetParams, flat: &[u8]) -> DigitalShift {
        DigitalShift { sigma: matrix_from_flat(p, flat) }
    }

    #[test]
    fn characters_are_orthogonal_at_tiny_scale() {
        assert!(character_orthogonality_dev(params(2, 2, 2, 0)).unwrap() < 1e-12);
        assert!(character_orthogonality_dev(params(3, 1, 3, 0)).unwrap() < 1e-12);
        assert!(character_orthogonality_dev(params(5, 1, 2, 0)).unwrap() < 1e-12);
    }

    #[test]
    fn dft_hand_examples() {
        // Constant 1 transforms to the delta at zero.
        let p = params(2, 2, 2, 0);
        let ones = GroupFunction::from_table(p, vec![1.0; 16]).unwrap();
        let ft = ones.dft().unwrap();
        assert_eq!(ft.table()[0], Complex64::new(1.0, 0.0));
        for h in 1..16 {
            assert!(ft.table()[h].norm() < 1e-15);
        }

        // Indicator of the zero element: every coefficient is 1/|G|.
        let mut t = vec![0.0; 16];
        t[0] = 1.0;
        let delta = GroupFunction::from_table(p, t).unwrap();
        let ft = delta.dft().unwrap();
        for h in 0..16 {
            assert_eq!(ft.table()[h], Complex64::new(1.0 / 16.0, 0.0));
        }

        // Z_2, F(0)=0, F(1)=1: F̂(0) = 1/2, F̂(1) = −1/2.
        let p1 = params(2, 1, 1, 0);
        let f = GroupFunction::from_table(p1, vec![0.0, 1.0]).unwrap();
        let ft = f.dft().unwrap();
        assert_eq!(ft.table()[0], Complex64::new(0.5, 0.0));
        assert_eq!(ft.table()[1], Complex64::new(-0.5, 0.0));
    }

    #[test]
    fn dft_conjugate_symmetry_for_real_tables() {
        for (p, seed) in [(params(3, 1, 4, 0), 1u64), (params(5, 1, 3, 0), 2), (params(2, 2, 3, 0), 3)] {
            let f = random_table(p, seed);
            assert!(f.dft().unwrap().conjugate_symmetry_dev() < 1e-13);
        }
    }

    #[test]
    fn discretize_hand_examples() {
        // f(x) = x, one coordinate, two cells: averages 1/4 and 3/4.
        let p = params(2, 1, 1, 0);
        let f = GroupFunction::discretize_fn(p, &[], 1, |x| Ok(x[0])).unwrap();
        assert!((f.table()[0] - 0.25).abs() < 1e-15);
        assert!((f.table()[1] - 0.75).abs() < 1e-15);

        // f(x) = x²: cell averages 1/12 and 7/12.
        let g = GroupFunction::discretize_fn(p, &[], 1, |x| Ok(x[0] * x[0])).unwrap();
        assert!((g.table()[0] - 1.0 / 12.0).abs() < 1e-15);
        assert!((g.table()[1] - 7.0 / 12.0).abs() < 1e-15);

        // Means equal the true integrals.
        assert!((f.mean() - 0.5).abs() < 1e-15);
        assert!((g.mean() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn discretize_converges_for_every_integrand() {
        let p = params(2, 2, 2, 0);
        for f in Integrand::all(2).unwrap() {
            let table = GroupFunction::discretize_converged(&f, p).unwrap();
            assert!(
                (table.mean() - f.exact_integral()).abs() <= 1e-11 * f.exact_integral().abs().max(1.0),
                "{}: table mean {} vs integral {}",
                f.id(),
                table.mean(),
                f.exact_integral()
            );
        }
    }

    #[test]
    fn net_mean_matches_direct_point_enumeration() {
        let p = params(3, 2, 2, 2);
        let mut rng = stream_rng(11, DOMAIN_NET, 71, 0);
        let f = random_table(p, 4);
        for _ in 0..5 {
            let net = random_net_with(p, &mut rng);
            let by_table = f.net_mean(&net).unwrap();
            let mut acc = 0.0;
            let mut count = 0usize;
            scan_span_digits(&net, |flat| {
                acc += f.value(&matrix_from_flat(p, flat));
                count += 1;
            });
            assert_eq!(count, 9);
            assert!((by_table - acc / 9.0).abs() < 1e-14);
        }
    }

    #[test]
    fn mean_of_all_shift_estimates_is_the_integral() {
        for (p, seed) in [(params(2, 2, 3, 2), 5u64), (params(3, 1, 4, 2), 6)] {
            let f = random_table(p, seed);
            let mut rng = stream_rng(seed, DOMAIN_NET, 72, 0);
            let net = random_net_with(p, &mut rng);
            let est = f.all_shift_estimates(&net).unwrap();
            let mut acc = Neumaier::new();
            for &e in &est {
                acc.add(e);
            }
            let mean = acc.value() / est.len() as f64;
            assert!((mean - f.mean()).abs() < 1e-13);
        }
    }

    #[test]
    fn variance_identity_hand_example() {
        // b=2, s=1, n=1, P = {0}: F(0)=0, F(1)=1 has I = 1/2, the two shifted
        // estimates are 0 and 1, so the variance is 1/4 — and the dual side
        // is the single coefficient |F̂(1)|² = 1/4.
        let p = params(2, 1, 1, 0);
        let f = GroupFunction::from_table(p, vec![0.0, 1.0]).unwrap();
        let net = DigitalNet::new(p, vec![]).unwrap();
        let (by_shifts, by_dual) = variance_exact(&f, &net).unwrap();
        assert_eq!(by_shifts, 0.25);
        assert_eq!(by_dual, 0.25);
    }

    #[test]
    fn variance_identity_on_random_pairs() {
        let cases = [
            (params(2, 2, 3, 2), 7u64),
            (params(2, 3, 3, 4), 8),
            (params(2, 2, 5, 3), 9),
            (params(3, 2, 2, 2), 10),
            (params(3, 1, 4, 3), 11),
            (params(5, 1, 3, 2), 12),
        ];
        for (p, seed) in cases {
            let f = random_table(p, seed);
            let mut rng = stream_rng(seed, DOMAIN_NET, 73, 0);
            for _ in 0..3 {
                let net = random_net_with(p, &mut rng);
                let (a, b) = variance_exact(&f, &net).unwrap();
                assert!(
                    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0),
                    "b={} shifts {a} vs dual {b}",
                    p.b
                );
            }
        }
    }

    #[test]
    fn full_rank_full_space_net_has_zero_variance() {
        let p = params(2, 1, 3, 3);
        let basis = (0..3)
            .map(|j| {
                let mut m = DigitMatrix::zero(1, 3);
                m.set(0, j, 1);
                m
            })
            .collect();
        let net = DigitalNet::new(p, basis).unwrap();
        let f = random_table(p, 13);
        let (a, b) = variance_exact(&f, &net).unwrap();
        assert!(a < 1e-28);
        assert_eq!(b, 0.0);
    }

    #[test]
    fn poisson_summation_on_random_pairs() {
        for (p, seed) in [(params(2, 2, 3, 3), 14u64), (params(3, 1, 4, 2), 15)] {
            let f = random_table(p, seed);
            let mut rng = stream_rng(seed, DOMAIN_NET, 74, 0);
            for _ in 0..3 {
                let net = random_net_with(p, &mut rng);
                let chk = poisson_check(&f, &net).unwrap();
                assert!((chk.net_side - chk.dual_side).abs() < 1e-12, "{chk:?}");
                assert!(chk.dual_imag_abs < 1e-12, "{chk:?}");
            }
        }
    }

    #[test]
    fn digital_shift_multiplies_coefficients_by_the_character() {
        for (p, seed) in [(params(2, 2, 3, 0), 16u64), (params(3, 1, 4, 0), 17)] {
            let f = random_table(p, seed);
            let mut rng = stream_rng(seed, DOMAIN_SHIFT, 75, 0);
            let width = p.s * p.n;
            for _ in 0..3 {
                let flat: Vec<u8> =
                    (0..width).map(|_| rng.random_range(0..p.b) as u8).collect();
                let sigma = shift_from_flat(p, &flat);
                assert!(shifted_fourier_check(&f, &sigma).unwrap() < 1e-13);
            }
        }
    }

    #[test]
    fn walsh_coefficients_obey_the_decay_bound() {
        for (id, s, n) in [("f1", 1usize, 3usize), ("f1", 2, 2), ("f3", 1, 3), ("f3", 2, 2)] {
            let f = Integrand::by_id(id, s).unwrap();
            let p = params(2, s, n, 0);
            let worst = walsh_coefficient_bound_check(&f, p).unwrap();
            assert!(worst <= 1.0 + 1e-3, "{id} s={s} n={n}: worst ratio {worst}");
            assert!(worst > 0.0);
        }
    }

    #[test]
    fn rms_error_bound_holds_for_random_nets() {
        let f = Integrand::by_id("f1", 1).unwrap();
        let p = params(2, 1, 3, 2);
        let mut rng = stream_rng(18, DOMAIN_NET, 76, 0);
        for _ in 0..10 {
            let net = random_net_with(p, &mut rng);
            let (lhs, rhs) = kh_rmse_check(&f, &net).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-9), "lhs {lhs} > rhs {rhs}");
        }
    }

    #[test]
    fn dft_is_summation_order_invariant() {
        for (p, seed) in [(params(2, 2, 3, 0), 19u64), (params(3, 1, 3, 0), 20)] {
            let f = random_table(p, seed);
            assert!(dft_order_invariance_dev(&f).unwrap() < 1e-12);
        }
    }

    #[test]
    fn group_guard_reports_size_and_memory() {
        let p = params(2, 5, 5, 0);
        match Indexer::new(p) {
            Err(Error::GroupTooLarge { exponent, log2_size, mib }) => {
                assert_eq!(exponent, 25);
                assert_eq!(log2_size, 25.0);
                assert_eq!(mib, 256);
            }
            other => panic!("expected GroupTooLarge, got {other:?}"),
        }
        let msg = Indexer::new(p).unwrap_err().to_string();
        assert!(msg.contains("2^25.0"), "{msg}");
        assert!(msg.contains("256 MiB"), "{msg}");
    }

    #[test]
    fn dft_guard_refuses_quadratic_blowup() {
        let p = params(2, 2, 7, 0);
        let f = GroupFunction::from_table(p, vec![0.0; 1 << 14]).unwrap();
        assert!(f.dft().is_err());
    }

    #[test]
    fn indexer_roundtrips_and_adds() {
        let p = params(3, 2, 2, 0);
        let idx = Indexer::new(p).unwrap();
        let mut buf = vec![0u8; 4];
        for k in 0..idx.size() {
            idx.decode(k, &mut buf);
            assert_eq!(idx.index_of(&buf), k);
            assert_eq!(idx.add(k, idx.neg(k)), 0);
        }
        // (1,2,0,1) + (2,2,1,0) = (0,1,1,1) digit-wise mod 3.
        let a = idx.index_of(&[1, 2, 0, 1]);
        let b = idx.index_of(&[2, 2, 1, 0]);
        assert_eq!(idx.add(a, b), idx.index_of(&[0, 1, 1, 1]));
    }
}
