//! Verification suites run by the `verify` command.
//!
//! Each suite returns one [`MetricReport`]. A run fails iff some report fails.
//! Random draws come from a ChaCha stream seeded by the configuration, so two
//! runs of the same configuration produce identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::{certify_contraction, random_padic, AffineMap, ContractionSystem};
use crate::config::{RunConfig, VerifyToggles};
use crate::error::Result;
use crate::exec::Execution;
use crate::family::{compose_word, concat_words, IndexFamily, SymbolWord, UnconventionalMap};
use crate::gallery::{
    case_image, closed_form_fp, flip_word, lambda_member, make_px_system, parity_family, XiMatrix,
};
use crate::limit::{
    enumerate_lambda0_with, f_tilde, lambda0_point, limit_point, EnumerateOptions, LimitSetSample,
    SampleHeader,
};
use crate::metric::{
    closure_containment, diameter, disconnect_separation_with, doubling_cover, exhaustive_triples,
    isolation_scan, perfect_annulus, quasi_symmetry_audit, random_triples, Eta, MetricReport,
    Verdict,
};
use crate::padic::PadicInt;

/// Longest word length for the exhaustive gallery loops.
const GALLERY_WORDS: usize = 6;
/// Longest word length for exhaustive quasi-symmetry triples.
const QS_EXHAUSTIVE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyPlan {
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub annulus_c: usize,
    pub budget: u128,
    pub toggles: VerifyToggles,
    pub execution: Execution,
}

impl VerifyPlan {
    pub fn from_config(config: &RunConfig) -> Self {
        VerifyPlan {
            depth: config.depth,
            samples: config.samples,
            seed: config.seed,
            annulus_c: config.annulus_c,
            budget: config.budget,
            toggles: config.verify,
            execution: Execution::default(),
        }
    }
}

/// Whether a system is the worked two-map system, and with which family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GalleryKind {
    /// The 1x1 identity family.
    Plain,
    Case(u32),
}

pub fn detect_gallery(system: &ContractionSystem, family: &IndexFamily) -> Option<GalleryKind> {
    let px = make_px_system(system.prime(), system.precision()).ok()?;
    if px.system() != system {
        return None;
    }
    if family.maps() == IndexFamily::identity(2).maps() {
        return Some(GalleryKind::Plain);
    }
    (1..=4)
        .find(|&c| {
            XiMatrix::case(c)
                .and_then(|m| parity_family(&m))
                .is_ok_and(|f| f.maps() == family.maps())
        })
        .map(GalleryKind::Case)
}

fn random_word<R: Rng>(rng: &mut R, alphabet: u32, len: usize) -> SymbolWord {
    let symbols = (0..len).map(|_| rng.random_range(1..=alphabet)).collect();
    SymbolWord::finite(alphabet, symbols).expect("symbols drawn from the alphabet")
}

/// Tallies a batch of checks into one report.
struct Tally {
    report: MetricReport,
    checks: usize,
    failures: usize,
}

impl Tally {
    fn new(property: &str) -> Self {
        Tally {
            report: MetricReport::new(property, Verdict::Pass),
            checks: 0,
            failures: 0,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            if self.failures == 0 {
                self.report.witnesses.push(witness());
            }
            self.failures += 1;
        }
    }

    fn finish(mut self) -> MetricReport {
        if self.failures > 0 {
            self.report.verdict = Verdict::Fail;
        }
        self.report
            .constant("checks", self.checks)
            .constant("failures", self.failures)
    }
}

fn words_up_to(len: usize) -> impl Iterator<Item = SymbolWord> {
    (1..=len).flat_map(|n| (0..1u128 << n).map(move |i| SymbolWord::nth_of_length(2, n, i)))
}

pub struct Verifier<'a> {
    system: &'a ContractionSystem,
    family: &'a IndexFamily,
    plan: VerifyPlan,
}

impl<'a> Verifier<'a> {
    pub fn new(system: &'a ContractionSystem, family: &'a IndexFamily, plan: VerifyPlan) -> Self {
        Verifier {
            system,
            family,
            plan,
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.plan.seed);
        rng.set_stream(stream);
        rng
    }

    fn enumerate(&self, family: &IndexFamily, depth: usize) -> Result<LimitSetSample> {
        let options = EnumerateOptions {
            budget: self.plan.budget,
            execution: self.plan.execution,
        };
        enumerate_lambda0_with(self.system, family, depth, &options)
    }

    pub fn certificate(&self) -> MetricReport {
        let mut tally = Tally::new("contraction_certificate");
        let mut worst: Option<i64> = None;
        for (i, f) in self.system.maps().iter().enumerate() {
            let cert = certify_contraction(f, self.plan.samples, self.plan.seed);
            if let Some(g) = cert.worst_gain {
                worst = Some(worst.map_or(g, |w| w.min(g)));
            }
            tally.record(cert.passed(), || {
                format!("map {} fails the certificate", i + 1)
            });
        }
        let mut r = tally.finish();
        if let Some(g) = worst {
            r = r.constant("worst_gain", g);
        }
        r
    }

    /// `v(F(x) - F(y)) >= v(x - y) + n` for random words of length `n`.
    pub fn lipschitz(&self) -> Result<MetricReport> {
        let mut rng = self.rng(1);
        let (p, k) = (self.system.prime(), self.system.precision());
        let mut tally = Tally::new("lipschitz");
        let mut min_gain: Option<usize> = None;
        for _ in 0..self.plan.samples {
            let n = rng.random_range(1..=self.plan.depth.max(1));
            let w = random_word(&mut rng, self.family.alphabet(), n);
            let (x, y) = (random_padic(&mut rng, p, k), random_padic(&mut rng, p, k));
            let f = UnconventionalMap::build(self.system, self.family, &w, n)?;
            let dv = x.agreement(&y);
            let dfv = f.apply(&x)?.agreement(&f.apply(&y)?);
            if dfv < k {
                let gain = dfv.saturating_sub(dv);
                min_gain = Some(min_gain.map_or(gain, |g| g.min(gain)));
            }
            tally.record(dfv >= (dv + n).min(k), || format!("word {w} x={x} y={y}"));
        }
        let mut r = tally.finish().param("samples", self.plan.samples);
        if let Some(g) = min_gain {
            r = r.constant("min_gain", g);
        }
        Ok(r)
    }

    /// Depth-`n` and depth-`m` points agree mod `p^m`.
    pub fn cauchy(&self) -> Result<MetricReport> {
        let mut rng = self.rng(2);
        let d = self.plan.depth;
        let k = self.system.precision();
        let mut tally = Tally::new("cauchy_rate");
        for _ in 0..self.plan.samples.min(100) {
            let w = random_word(&mut rng, self.family.alphabet(), d);
            let pts = (1..=d)
                .map(|n| lambda0_point(self.system, self.family, &w, n))
                .collect::<Result<Vec<_>>>()?;
            for m in 1..=d {
                for n in m + 1..=d {
                    let ok = pts[n - 1].agreement(&pts[m - 1]) >= m.min(k);
                    tally.record(ok, || format!("word {w} m={m} n={n}"));
                }
            }
        }
        Ok(tally.finish().param("depth", d))
    }

    /// `F~[x_beta] = x_{alpha^[n] beta}` mod `p^min(n+m, K)`.
    pub fn teor5(&self) -> Result<MetricReport> {
        let mut rng = self.rng(3);
        let k = self.system.precision();
        let alphabet = self.family.alphabet();
        let mut tally = Tally::new("f_tilde_identity");
        for _ in 0..self.plan.samples.min(100) {
            let n = rng.random_range(1..=4);
            let m = rng.random_range(1..=6);
            let alpha = random_word(&mut rng, alphabet, n);
            let beta = random_word(&mut rng, alphabet, m);
            let lhs = f_tilde(self.system, self.family, &alpha, n, &beta, m)?;
            let joined = concat_words(&alpha, n, &beta)?;
            let rhs = limit_point(self.system, self.family, &joined, n + m)?;
            let ok = lhs.agreement(&rhs.value) >= (n + m).min(k);
            tally.record(ok, || format!("alpha={alpha} n={n} beta={beta} m={m}"));
        }
        Ok(tally.finish())
    }

    pub fn closure(&self) -> Result<MetricReport> {
        let d = self.plan.depth;
        if d < 2 {
            return Ok(
                MetricReport::new("closure_containment", Verdict::NotApplicable)
                    .witness("depth below 2"),
            );
        }
        Ok(closure_containment(
            &self.enumerate(self.family, d - 1)?,
            &self.enumerate(self.family, d)?,
        ))
    }

    pub fn isolation(&self) -> Result<MetricReport> {
        let d = self.plan.depth;
        if d < 2 {
            return Ok(MetricReport::new("isolation_scan", Verdict::NotApplicable)
                .witness("depth below 2"));
        }
        Ok(isolation_scan(
            &self.enumerate(self.family, d / 2)?,
            &self.enumerate(self.family, d)?,
            0,
        ))
    }

    /// Every annulus `p^-(r+c) <= |y - x0| <= p^-r` inside the resolved range meets the sample.
    pub fn annulus(&self, sample: &LimitSetSample) -> MetricReport {
        let c = self.plan.annulus_c;
        let Ok(diam) = diameter(sample) else {
            return MetricReport::new("uniform_perfectness", Verdict::NotApplicable)
                .witness("fewer than two points");
        };
        let top = sample.header().modulus().saturating_sub(c);
        let mut tally = Tally::new("uniform_perfectness");
        let mut needed = 0usize;
        for x in sample.points() {
            for r in diam.exponent()..top {
                let rep = perfect_annulus(sample, x, r, c);
                if let Some(v) = rep
                    .get_constant("valuation")
                    .and_then(|v| v.parse::<usize>().ok())
                {
                    needed = needed.max(v - r);
                }
                tally.record(rep.passed(), || format!("x0={x} r_exp={r} annulus empty"));
            }
        }
        tally.report = tally.report.param("c_exp", c);
        tally.finish().constant("max_c_exp_used", needed)
    }

    pub fn separation(&self, sample: &LimitSetSample) -> MetricReport {
        let mut tally = Tally::new("uniform_disconnectedness");
        for a in sample.points() {
            for r in 0..sample.header().modulus() {
                let rep = disconnect_separation_with(sample, a, r, Execution::Sequential);
                tally.record(rep.passed(), || {
                    format!("a={a} r_exp={r}: {}", rep.witnesses.join("; "))
                });
            }
        }
        tally.finish()
    }

    pub fn doubling(&self, sample: &LimitSetSample) -> MetricReport {
        let mut tally = Tally::new("doubling");
        let mut most = 0usize;
        for a in sample.points() {
            for r in 0..sample.header().modulus() {
                let rep = doubling_cover(sample, a, r);
                if let Some(n) = rep
                    .get_constant("subballs")
                    .and_then(|v| v.parse::<usize>().ok())
                {
                    most = most.max(n);
                }
                tally.record(rep.passed(), || format!("a={a} r_exp={r}"));
            }
        }
        tally
            .finish()
            .constant("max_subballs", most)
            .constant("bound", sample.prime())
    }

    pub fn quasi_symmetry(&self) -> Result<MetricReport> {
        match detect_gallery(self.system, self.family) {
            Some(GalleryKind::Plain | GalleryKind::Case(4)) => {}
            _ => {
                return Ok(MetricReport::new("quasi_symmetry_audit", Verdict::NotApplicable)
                    .witness("no coding map is known for this family; see doubling, perfectness and disconnectedness"))
            }
        }
        let d = self.plan.depth;
        let eta = Eta::Log2Of(self.system.prime() as u64);
        let small = d.min(QS_EXHAUSTIVE);
        let exhaustive = quasi_symmetry_audit(
            &exhaustive_triples(2, small),
            self.system,
            self.family,
            small,
            eta,
            self.plan.execution,
        )?;
        if exhaustive.failed() || d <= QS_EXHAUSTIVE {
            return Ok(exhaustive);
        }
        let random = random_triples(2, d, self.plan.samples, self.plan.seed);
        let deep = quasi_symmetry_audit(
            &random,
            self.system,
            self.family,
            d,
            eta,
            self.plan.execution,
        )?;
        let exhaustive_checked = exhaustive
            .get_constant("checked")
            .unwrap_or("0")
            .to_string();
        Ok(deep
            .param("exhaustive_depth", small)
            .constant("exhaustive_checked", exhaustive_checked))
    }

    /// Closed forms, flips, membership and image identities of the two-map system.
    pub fn gallery(&self, kind: GalleryKind) -> Result<Vec<MetricReport>> {
        let px = make_px_system(self.system.prime(), self.system.precision())?;
        let d = self.plan.depth;
        let words: Vec<SymbolWord> = words_up_to(d.min(GALLERY_WORDS)).collect();

        let mut closed = Tally::new("closed_form_fixed_points");
        let mut flip = Tally::new("flip_symmetry");
        for w in &words {
            let n = w.len().expect("finite word");
            let x = closed_form_fp(&px, w, n)?;
            let composed: AffineMap = compose_word(px.system(), &w.unfold(n)?)?;
            let banach = composed
                .iterate_fixed_point(&x.zero_like(), 4 * px.precision() + 8)?
                .0;
            let ok = x == composed.fixed_point()? && x == banach;
            closed.record(ok, || format!("word {w}"));
            let y = closed_form_fp(&px, &flip_word(w)?, n)?;
            flip.record(y == &x.one_like() - &x, || format!("word {w}"));
        }

        let plain = self.enumerate(&IndexFamily::identity(2), d)?;
        let mut member = Tally::new("lambda_membership");
        for x in plain.points() {
            member.record(lambda_member(x).member, || format!("{x}"));
        }
        let mut out = vec![closed.finish(), flip.finish(), member.finish()];

        if let GalleryKind::Case(c) = kind {
            let family_sample = self.enumerate(self.family, d)?;
            let images = plain
                .points()
                .iter()
                .map(|x| case_image(c, x))
                .collect::<Result<Vec<PadicInt>>>()?;
            let mapped = LimitSetSample::from_points(
                SampleHeader::for_family(self.system, self.family, d),
                images,
            );
            let k = d.min(self.system.precision());
            let (lhs, rhs) = (family_sample.residues(k), mapped.residues(k));
            let mut image = Tally::new("case_image_identity");
            image.report = image.report.param("case", c).param("depth", d);
            image.record(lhs == rhs, || {
                format!(
                    "{} residues only in the enumeration, {} only in the image",
                    lhs.difference(&rhs).count(),
                    rhs.difference(&lhs).count()
                )
            });
            out.push(image.finish().constant("points", lhs.len()));
        }
        Ok(out)
    }

    pub fn run(&self) -> Result<Vec<MetricReport>> {
        let t = self.plan.toggles;
        let mut out = Vec::new();
        if t.certificate {
            out.push(self.certificate());
        }
        if t.lipschitz {
            out.push(self.lipschitz()?);
        }
        if t.cauchy {
            out.push(self.cauchy()?);
        }
        if t.teor5 {
            out.push(self.teor5()?);
        }
        if t.closure {
            out.push(self.closure()?);
        }
        if t.isolation {
            out.push(self.isolation()?);
        }
        if t.annulus || t.separation || t.doubling {
            let sample = self.enumerate(self.family, self.plan.depth)?;
            if t.annulus {
                out.push(self.annulus(&sample));
            }
            if t.separation {
                out.push(self.separation(&sample));
            }
            if t.doubling {
                out.push(self.doubling(&sample));
            }
        }
        if t.quasi_symmetry {
            out.push(self.quasi_symmetry()?);
        }
        if t.gallery {
            if let Some(kind) = detect_gallery(self.system, self.family) {
                out.extend(self.gallery(kind)?);
            }
        }
        Ok(out)
    }
}

pub fn run_verification(config: &RunConfig) -> Result<Vec<MetricReport>> {
    Verifier::new(
        &config.system,
        &config.family,
        VerifyPlan::from_config(config),
    )
    .run()
}
