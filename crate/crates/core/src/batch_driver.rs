//! Entry points for one chunk of [`S`] matrices, one matrix, and a whole
//! batch processed by a parallel loop over its chunks.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::batch_layout::{Batch2x2, FieldKind, SvdBatchOut, SvdRecord};
use crate::lane_math::{ComplexPair, F64x1, F64x8, Lanes, S};
use crate::svd2_core::{svd2, Assembly, Backscale, Complex, Field, Mat2, Options, Real};

/// Which instantiation of the pipeline processes a chunk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Path {
    /// One width-[`S`] call per chunk.
    #[default]
    Vectorized,
    /// [`S`] width-1 calls per chunk.
    Pointwise,
}

impl Path {
    pub fn name(self) -> &'static str {
        match self {
            Path::Vectorized => "vec",
            Path::Pointwise => "ptw",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RunConfig {
    pub path: Path,
    /// Worker threads; at least 1.
    pub threads: usize,
    pub backscale: Backscale,
    pub assembly: Assembly,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            path: Path::Vectorized,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            backscale: Backscale::None,
            assembly: Assembly::Tangent,
        }
    }
}

impl RunConfig {
    pub fn options(&self) -> Options {
        Options { assembly: self.assembly, backscale: self.backscale }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("thread count must be at least 1")]
    NoThreads,
    #[error("could not start the worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Read-only views of one chunk's input trains, each at least [`S`] long.
#[derive(Clone, Copy, Debug)]
pub struct ChunkIn<'a> {
    pub re: [&'a [f64]; 4],
    /// Empty slices for a real batch.
    pub im: [&'a [f64]; 4],
}

/// Views of one chunk's output trains, each at least [`S`] long.
#[derive(Debug)]
pub struct ChunkOut<'a> {
    pub u_re: [&'a mut [f64]; 4],
    pub u_im: [&'a mut [f64]; 4],
    pub v_re: [&'a mut [f64]; 4],
    pub v_im: [&'a mut [f64]; 4],
    pub sig_max: &'a mut [f64],
    pub sig_min: &'a mut [f64],
    pub s: &'a mut [f64],
}

fn at(x: &[f64], off: usize) -> &[f64] {
    x.get(off..).unwrap_or(&[])
}

fn at_mut(x: &mut [f64], off: usize) -> &mut [f64] {
    if x.is_empty() {
        x
    } else {
        &mut x[off..]
    }
}

#[inline(always)]
fn run_lanes<F: Field, V: Lanes>(input: &ChunkIn<'_>, out: &mut ChunkOut<'_>, off: usize, opts: Options) {
    let e = |j: usize| F::load::<V>(at(input.re[j], off), at(input.im[j], off));
    let a = Mat2::new(e(0), e(1), e(2), e(3));
    let r = svd2::<F, V>(&a, opts);
    for (j, (u, v)) in r.u.entries().into_iter().zip(r.v.entries()).enumerate() {
        F::store(u, at_mut(out.u_re[j], off), at_mut(out.u_im[j], off));
        F::store(v, at_mut(out.v_re[j], off), at_mut(out.v_im[j], off));
    }
    r.sig_max.store(&mut out.sig_max[off..]);
    r.sig_min.store(&mut out.sig_min[off..]);
    r.s.store(&mut out.s[off..]);
}

/// The vectorized pipeline on one chunk of [`S`] matrices.
#[inline(never)]
pub fn svd2_chunk<F: Field>(input: &ChunkIn<'_>, out: &mut ChunkOut<'_>, opts: Options) {
    run_lanes::<F, F64x8>(input, out, 0, opts);
}

/// The same chunk through [`S`] width-1 calls.
#[inline(never)]
pub fn svd2_chunk_pointwise<F: Field>(input: &ChunkIn<'_>, out: &mut ChunkOut<'_>, opts: Options) {
    for lane in 0..S {
        svd2_lane::<F>(input, out, lane, opts);
    }
}

#[inline(never)]
fn svd2_lane<F: Field>(input: &ChunkIn<'_>, out: &mut ChunkOut<'_>, lane: usize, opts: Options) {
    run_lanes::<F, F64x1>(input, out, lane, opts);
}

/// The width-1 pipeline on one real matrix.
pub fn svd2_single_real(a: &Mat2<f64>, opts: Options) -> SvdRecord<f64> {
    let r = svd2::<Real, F64x1>(&a.map(F64x1), opts);
    SvdRecord { u: r.u.map(|e| e.0), v: r.v.map(|e| e.0), sig_max: r.sig_max.0, sig_min: r.sig_min.0, s: r.s.0 }
}

/// The width-1 pipeline on one complex matrix.
pub fn svd2_single_complex(a: &Mat2<Complex64>, opts: Options) -> SvdRecord<Complex64> {
    let r = svd2::<Complex, F64x1>(&a.map(|z| ComplexPair::new(F64x1(z.re), F64x1(z.im))), opts);
    let c = |e: ComplexPair<F64x1>| Complex64::new(e.re.0, e.im.0);
    SvdRecord { u: r.u.map(c), v: r.v.map(c), sig_max: r.sig_max.0, sig_min: r.sig_min.0, s: r.s.0 }
}

/// Base pointers of the output trains, shared by the workers.
///
/// Each worker derives slices only for its own chunk index, so the slices
/// created from these pointers never overlap.
struct OutPtrs {
    u_re: [*mut f64; 4],
    u_im: [*mut f64; 4],
    v_re: [*mut f64; 4],
    v_im: [*mut f64; 4],
    sig_max: *mut f64,
    sig_min: *mut f64,
    s: *mut f64,
    complex: bool,
}

// SAFETY: see the type's documentation; the pointers are only used to build
// disjoint per-chunk slices while the owning `SvdBatchOut` is borrowed
// mutably by `run_batch`.
unsafe impl Send for OutPtrs {}
unsafe impl Sync for OutPtrs {}

impl OutPtrs {
    fn new(out: &mut SvdBatchOut) -> Self {
        let ptr = |t: &mut crate::batch_layout::Train| t.as_mut_slice().as_mut_ptr();
        OutPtrs {
            u_re: out.u_re.each_mut().map(ptr),
            u_im: out.u_im.each_mut().map(ptr),
            v_re: out.v_re.each_mut().map(ptr),
            v_im: out.v_im.each_mut().map(ptr),
            sig_max: ptr(&mut out.sig_max),
            sig_min: ptr(&mut out.sig_min),
            s: ptr(&mut out.s),
            complex: out.field() == FieldKind::Complex,
        }
    }

    /// # Safety
    /// `v` must be a chunk index of the batch, and no two live `ChunkOut`s
    /// may share a `v`.
    unsafe fn chunk(&self, v: usize) -> ChunkOut<'_> {
        let off = v * S;
        // SAFETY: by the caller's contract the range `off..off + S` is in
        // bounds and not aliased.
        let sl = |p: *mut f64| unsafe { std::slice::from_raw_parts_mut(p.add(off), S) };
        let im = |p: *mut f64| if self.complex { sl(p) } else { &mut [][..] };
        ChunkOut {
            u_re: self.u_re.map(sl),
            u_im: self.u_im.map(im),
            v_re: self.v_re.map(sl),
            v_im: self.v_im.map(im),
            sig_max: sl(self.sig_max),
            sig_min: sl(self.sig_min),
            s: sl(self.s),
        }
    }
}

fn chunk_in(batch: &Batch2x2, v: usize) -> ChunkIn<'_> {
    let r = v * S..(v + 1) * S;
    let im = |j: usize| if batch.field() == FieldKind::Complex { &batch.im(j)[r.clone()] } else { &[][..] };
    ChunkIn { re: std::array::from_fn(|j| &batch.re(j)[r.clone()]), im: std::array::from_fn(im) }
}

fn kernel(field: FieldKind, path: Path) -> fn(&ChunkIn<'_>, &mut ChunkOut<'_>, Options) {
    match (field, path) {
        (FieldKind::Real, Path::Vectorized) => svd2_chunk::<Real>,
        (FieldKind::Real, Path::Pointwise) => svd2_chunk_pointwise::<Real>,
        (FieldKind::Complex, Path::Vectorized) => svd2_chunk::<Complex>,
        (FieldKind::Complex, Path::Pointwise) => svd2_chunk_pointwise::<Complex>,
    }
}

/// Processes every chunk of `batch` on `cfg.threads` workers.
///
/// The returned duration covers only the parallel loop. Results do not
/// depend on the thread count or the order in which chunks are processed.
pub fn run_batch(batch: &Batch2x2, cfg: &RunConfig) -> Result<(SvdBatchOut, Duration), DriverError> {
    if cfg.threads == 0 {
        return Err(DriverError::NoThreads);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build()?;
    let mut out = SvdBatchOut::zeros(batch.field(), batch.len());
    let chunks = batch.padded_len() / S;
    let ptrs = OutPtrs::new(&mut out);
    let f = kernel(batch.field(), cfg.path);
    let opts = cfg.options();

    let start = Instant::now();
    pool.install(|| {
        (0..chunks).into_par_iter().with_min_len(64).for_each(|v| {
            // SAFETY: `v < chunks` and each index is visited once.
            let mut o = unsafe { ptrs.chunk(v) };
            f(&chunk_in(batch, v), &mut o, opts);
        })
    });
    let elapsed = start.elapsed();
    Ok((out, elapsed))
}

/// Runs every chunk on the calling thread in the given order.
///
/// Used to check that the chunk schedule cannot affect any output bit.
pub fn run_batch_in_order(batch: &Batch2x2, cfg: &RunConfig, order: impl IntoIterator<Item = usize>) -> SvdBatchOut {
    let mut out = SvdBatchOut::zeros(batch.field(), batch.len());
    let chunks = batch.padded_len() / S;
    let ptrs = OutPtrs::new(&mut out);
    let f = kernel(batch.field(), cfg.path);
    let mut seen = vec![false; chunks];
    for v in order {
        assert!(!std::mem::replace(&mut seen[v], true), "chunk {v} visited twice");
        // SAFETY: `v` is in bounds (indexing `seen` above) and visited once.
        let mut o = unsafe { ptrs.chunk(v) };
        f(&chunk_in(batch, v), &mut o, cfg.options());
    }
    out
}
