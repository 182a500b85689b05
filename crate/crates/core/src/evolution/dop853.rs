//! Dormand–Prince 8(5,3) with Hairer's step-size control, on complex vectors.
//!
//! Each complex component counts as two real components in the error norm.

use super::{integration_failure, OdeConfig};
use crate::error::Result;
use crate::state::{C64, ZERO};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

pub struct Dop853 {
    config: OdeConfig,
    k: [Vec<C64>; 12],
    y_stage: Vec<C64>,
    y_new: Vec<C64>,
    /// Step size carried across calls to `integrate`.
    h: Option<f64>,
    stats: OdeStats,
}

const SAFE: f64 = 0.9;
const FAC1: f64 = 0.333;
const FAC2: f64 = 6.0;
const EXPO1: f64 = 1.0 / 8.0;

impl Dop853 {
    pub fn new(n: usize, config: OdeConfig) -> Self {
        Dop853 {
            config,
            k: std::array::from_fn(|_| vec![ZERO; n]),
            y_stage: vec![ZERO; n],
            y_new: vec![ZERO; n],
            h: None,
            stats: OdeStats::default(),
        }
    }

    pub fn stats(&self) -> OdeStats {
        self.stats
    }

    fn sk(&self, a: f64, b: f64) -> f64 {
        self.config.abs_tol + self.config.rel_tol * a.abs().max(b.abs())
    }

    /// Hairer's starting step heuristic.
    fn initial_step<F>(&mut self, f: &F, t: f64, y: &[C64], span: f64) -> Result<f64>
    where
        F: Fn(f64, &[C64], &mut [C64]) -> Result<()>,
    {
        let n = 2.0 * y.len() as f64;
        let (mut dnf, mut dny) = (0.0, 0.0);
        for (yi, fi) in y.iter().zip(&self.k[0]) {
            for (yv, fv) in [(yi.re, fi.re), (yi.im, fi.im)] {
                let sk = self.sk(yv, yv);
                dnf += (fv / sk).powi(2);
                dny += (yv / sk).powi(2);
            }
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
        h = h.min(span);
        for (s, (yi, fi)) in self.y_stage.iter_mut().zip(y.iter().zip(&self.k[0])) {
            *s = yi + fi * h;
        }
        f(t + h, &self.y_stage, &mut self.k[1])?;
        self.stats.evaluations += 1;
        let mut der2 = 0.0;
        for ((k2, k1), yi) in self.k[1].iter().zip(&self.k[0]).zip(y) {
            let diff = k2 - k1;
            der2 += (diff.re / self.sk(yi.re, yi.re)).powi(2);
            der2 += (diff.im / self.sk(yi.im, yi.im)).powi(2);
        }
        let der2 = (der2 / n).sqrt() / h;
        let der12 = der2.abs().max((dnf / n).sqrt());
        let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(1.0 / 8.0) };
        Ok((100.0 * h).min(h1).min(span))
    }

    /// Advances `y` in place from `t0` to exactly `t1`.
    pub fn integrate<F>(&mut self, f: &F, t0: f64, t1: f64, y: &mut [C64]) -> Result<()>
    where
        F: Fn(f64, &[C64], &mut [C64]) -> Result<()>,
    {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        let n_real = 2.0 * y.len() as f64;
        let mut t = t0;
        f(t, y, &mut self.k[0])?;
        self.stats.evaluations += 1;
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(f, t, y, span)?,
        };
        let mut last_rejected = false;

        while t < t1 {
            if self.stats.accepted + self.stats.rejected >= self.config.max_steps {
                return Err(integration_failure(t, "maximum number of steps exceeded"));
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(integration_failure(t, format!("step size underflow (h = {h:.3e})")));
            }
            let clipped = t + h >= t1;
            let h_try = if clipped { t1 - t } else { h };

            self.stages(f, t, h_try, y)?;

            // 8th-order solution increment lives in k[3]
            let (mut err, mut err2) = (0.0, 0.0);
            for i in 0..y.len() {
                let inc = B1 * self.k[0][i]
                    + B6 * self.k[5][i]
                    + B7 * self.k[6][i]
                    + B8 * self.k[7][i]
                    + B9 * self.k[8][i]
                    + B10 * self.k[9][i]
                    + B11 * self.k[10][i]
                    + B12 * self.k[11][i];
                self.y_new[i] = y[i] + inc * h_try;
                let e5 = inc - BHH1 * self.k[0][i] - BHH2 * self.k[8][i] - BHH3 * self.k[11][i];
                let e8 = ER1 * self.k[0][i]
                    + ER6 * self.k[5][i]
                    + ER7 * self.k[6][i]
                    + ER8 * self.k[7][i]
                    + ER9 * self.k[8][i]
                    + ER10 * self.k[9][i]
                    + ER11 * self.k[10][i]
                    + ER12 * self.k[11][i];
                let sk_re = self.sk(y[i].re, self.y_new[i].re);
                let sk_im = self.sk(y[i].im, self.y_new[i].im);
                err2 += (e5.re / sk_re).powi(2) + (e5.im / sk_im).powi(2);
                err += (e8.re / sk_re).powi(2) + (e8.im / sk_im).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h_try.abs() * err * (1.0 / (deno * n_real)).sqrt();

            let fac11 = err.powf(EXPO1);
            let fac = (1.0 / FAC2).max((1.0 / FAC1).min(fac11 / SAFE));
            let mut h_new = h_try / fac;

            if err <= 1.0 {
                self.stats.accepted += 1;
                t = if clipped { t1 } else { t + h_try };
                y.copy_from_slice(&self.y_new);
                f(t, y, &mut self.k[0])?;
                self.stats.evaluations += 1;
                if last_rejected {
                    h_new = h_new.min(h_try);
                }
                last_rejected = false;
                // a clipped step says little about the natural step size
                if !clipped {
                    h = h_new;
                }
            } else {
                self.stats.rejected += 1;
                last_rejected = true;
                h = h_try / (1.0 / FAC1).min(fac11 / SAFE);
            }
        }
        self.h = Some(h);
        Ok(())
    }

    fn stages<F>(&mut self, f: &F, t: f64, h: f64, y: &[C64]) -> Result<()>
    where
        F: Fn(f64, &[C64], &mut [C64]) -> Result<()>,
    {
        for (stage, (c, row)) in TABLEAU.iter().enumerate() {
            let target = stage + 1;
            for i in 0..y.len() {
                let mut acc = ZERO;
                for &(j, a) in row.iter() {
                    acc += self.k[j][i] * a;
                }
                self.y_stage[i] = y[i] + acc * h;
            }
            f(t + c * h, &self.y_stage, &mut self.k[target])?;
        }
        self.stats.evaluations += TABLEAU.len() as u64;
        Ok(())
    }
}

/// `(c_i, [(j, a_ij)])` for stages 2..=12 (0-based `j`).
const TABLEAU: [(f64, &[(usize, f64)]); 11] = [
    (C2, &[(0, A21)]),
    (C3, &[(0, A31), (1, A32)]),
    (C4, &[(0, A41), (2, A43)]),
    (C5, &[(0, A51), (2, A53), (3, A54)]),
    (C6, &[(0, A61), (3, A64), (4, A65)]),
    (C7, &[(0, A71), (3, A74), (4, A75), (5, A76)]),
    (C8, &[(0, A81), (3, A84), (4, A85), (5, A86), (6, A87)]),
    (C9, &[(0, A91), (3, A94), (4, A95), (5, A96), (6, A97), (7, A98)]),
    (C10, &[(0, A101), (3, A104), (4, A105), (5, A106), (6, A107), (7, A108), (8, A109)]),
    (C11, &[(0, A111), (3, A114), (4, A115), (5, A116), (6, A117), (7, A118), (8, A119), (9, A1110)]),
    (1.0, &[(0, A121), (3, A124), (4, A125), (5, A126), (6, A127), (7, A128), (8, A129), (9, A1210), (10, A1211)]),
];

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;
